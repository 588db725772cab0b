use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::martingales::WalshPaleyMartingale;
use crate::math;
use crate::operators::DenseOperator;
use crate::rng;
use crate::spaces::{dot, Exponent, NormedSpace};

use super::pi2::pi2_bounds;

/// Default bound on the number of `(k-1)`-subsets visited in exact mode.
pub const WEDGE_BUDGET: u64 = 20_000_000;

/// `|x_1 ∧ ... ∧ x_k|_X`, exact or a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Wedge {
    pub value: f64,
    pub exact: bool,
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n.saturating_sub(k));
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

/// Distinct nonzero projections `(⟨x_i, a⟩)_i` over the extreme points `a`
/// of the dual ball, identified up to sign.
fn projections(xs: &[Vec<f64>], space: &NormedSpace) -> Option<Vec<Vec<f64>>> {
    let k = xs.len();
    let m = space.dim();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |mut y: Vec<f64>| {
        if let Some(first) = y.iter().find(|v| **v != 0.0) {
            if *first < 0.0 {
                y.iter_mut().for_each(|v| *v = -*v);
            }
            out.push(y);
        }
    };
    match space.p() {
        Exponent::Infinity => {
            for j in 0..m {
                push(xs.iter().map(|x| x[j]).collect());
            }
        }
        Exponent::Finite(1.0) => {
            if m > 24 {
                return None;
            }
            // Sign vectors with the first entry fixed; the rest are negatives.
            let mut y: Vec<f64> = xs.iter().map(|x| x.iter().sum()).collect();
            let mut signs = 0u64;
            push(y.clone());
            for i in 1..1u64 << (m - 1) {
                let j = i.trailing_zeros() as usize + 1;
                signs ^= 1 << j;
                let s = if signs >> j & 1 == 1 { -2.0 } else { 2.0 };
                for (yi, x) in y.iter_mut().zip(xs) {
                    *yi += s * x[j];
                }
                if i % 1024 == 0 {
                    for (yi, x) in y.iter_mut().zip(xs) {
                        *yi = x
                            .iter()
                            .enumerate()
                            .map(|(l, v)| if signs >> l & 1 == 1 { -v } else { *v })
                            .sum();
                    }
                }
                push(y.clone());
            }
        }
        _ => return None,
    }
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    out.dedup();
    debug_assert!(out.iter().all(|y| y.len() == k));
    Some(out)
}

/// Generalized cross product: `c` with `⟨c, y⟩ = det(rows..., y)`.
fn cofactor_vector(rows: &[&[f64]], k: usize) -> Vec<f64> {
    let mut a = vec![0.0; k * k];
    for (r, row) in rows.iter().enumerate() {
        a[r * k..(r + 1) * k].copy_from_slice(row);
    }
    (0..k)
        .map(|l| {
            a[(k - 1) * k..].iter_mut().for_each(|v| *v = 0.0);
            a[(k - 1) * k + l] = 1.0;
            linalg::det(&a, k)
        })
        .collect()
}

fn subset_max(ys: &[Vec<f64>], k: usize) -> f64 {
    let p = ys.len();
    if p < k {
        return 0.0;
    }
    let mut best = 0.0f64;
    let mut idx: Vec<usize> = (0..k - 1).collect();
    loop {
        let rows: Vec<&[f64]> = idx.iter().map(|&i| ys[i].as_slice()).collect();
        let c = cofactor_vector(&rows, k);
        let start = idx.last().map_or(0, |&i| i + 1);
        for y in &ys[start..] {
            best = best.max(dot(&c, y).abs());
        }
        // Next (k-1)-subset in lexicographic order, leaving room for one more.
        let mut i = k - 1;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < p - 1 - (k - 1 - i) {
                idx[i] += 1;
                for j in i + 1..k - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `|det(⟨x_i, a_j⟩)|`.
fn pairing_det(xs: &[Vec<f64>], a: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let k = xs.len();
    let mut y = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            y[i * k + j] = dot(&xs[i], &a[j]);
        }
    }
    (linalg::det(&y, k), y)
}

/// Column sweeps: with the other columns fixed, `det` is `⟨Σ_i C_ij x_i, a_j⟩`,
/// maximized over the dual ball by the norming functional.
fn sweep_lower(xs: &[Vec<f64>], space: &NormedSpace, seed: u64) -> f64 {
    let k = xs.len();
    let m = space.dim();
    let mut rng = rng::keyed(seed, "wedge-sweep");
    let dual = space.dual();
    let mut best = 0.0f64;
    for start in 0..8 {
        let mut a: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let v: Vec<f64> = if start == 0 {
                    xs[j].clone()
                } else {
                    (0..m).map(|_| rng.sample(StandardNormal)).collect()
                };
                let n = dual.norm(&v);
                if n > 0.0 {
                    v.iter().map(|x| x / n).collect()
                } else {
                    v
                }
            })
            .collect();
        let mut value = pairing_det(xs, &a).0.abs();
        for _ in 0..200 {
            let before = value;
            for j in 0..k {
                let (_, y) = pairing_det(xs, &a);
                let c = linalg::cofactors(&y, k);
                let mut z = vec![0.0; m];
                for (i, x) in xs.iter().enumerate() {
                    for (zl, xl) in z.iter_mut().zip(x) {
                        *zl += c[i * k + j] * xl;
                    }
                }
                let f = space.norming_functional(&z);
                if f.iter().any(|v| *v != 0.0) {
                    a[j] = f;
                }
            }
            value = pairing_det(xs, &a).0.abs();
            if value <= before * (1.0 + 1e-14) {
                break;
            }
        }
        best = best.max(value);
    }
    best
}

/// `sup { |det(⟨x_i, a_j⟩)| : a_j ∈ B_{X'} }`.
///
/// Exact for `l_2` (square root of the Gram determinant) and for `l_1`,
/// `l_∞` when the distinct extreme-point projections allow full subset
/// enumeration within `budget`; a lower bound from column sweeps otherwise.
pub fn wedge(xs: &[Vec<f64>], space: &NormedSpace, budget: u64) -> Result<Wedge> {
    let k = xs.len();
    for x in xs {
        if x.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: x.len(),
            });
        }
    }
    if k == 0 {
        return Ok(Wedge {
            value: 1.0,
            exact: true,
        });
    }
    if k > space.dim() {
        return Ok(Wedge {
            value: 0.0,
            exact: true,
        });
    }
    if space.p().is_two() {
        let mut g = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                g[i * k + j] = dot(&xs[i], &xs[j]);
            }
        }
        return Ok(Wedge {
            value: math::sqrt(linalg::det(&g, k).max(0.0)),
            exact: true,
        });
    }
    if let Some(ys) = projections(xs, space) {
        if binomial(ys.len(), k - 1) <= budget {
            return Ok(Wedge {
                value: subset_max(&ys, k),
                exact: true,
            });
        }
    }
    Ok(Wedge {
        value: sweep_lower(xs, space, 0),
        exact: false,
    })
}

/// Both sides of the block-average identity for `|M_0(ω) ∧ ... ∧ M_k(ω)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lemma31Values {
    pub lhs: f64,
    pub rhs: f64,
    pub exact: bool,
}

/// `lhs = |M_0(ω) ∧ ... ∧ M_k(ω)|`;
/// `rhs = 2^{-k} |x̄(I(-ω_1)) ∧ x̄(I(ω_1, -ω_2)) ∧ ... ∧ x̄(I(ω_1, ..., ω_k))|`
/// where `x̄(I)` is the average of the terminal values over `I`.
pub fn verify_lemma31(
    m: &WalshPaleyMartingale,
    k: usize,
    row: usize,
    budget: u64,
) -> Result<Lemma31Values> {
    use crate::martingales::MartingaleView;
    let n = m.depth();
    if k > n {
        return Err(Error::LevelOutOfRange { level: k, depth: n });
    }
    if row >= 1 << n {
        return Err(Error::InvalidArgument("point index out of range"));
    }
    let space = m.space();
    let levels: Vec<Vec<f64>> = (0..=k).map(|j| m.level_at(j, row).to_vec()).collect();
    let mut blocks: Vec<Vec<f64>> = (1..=k)
        .map(|j| m.level_at(j, row ^ (1 << (n - j))).to_vec())
        .collect();
    blocks.push(m.level_at(k, row).to_vec());
    let lhs = wedge(&levels, &space, budget)?;
    let rhs = wedge(&blocks, &space, budget)?;
    Ok(Lemma31Values {
        lhs: lhs.value,
        rhs: rhs.value * math::powf(2.0, -(k as f64)),
        exact: lhs.exact && rhs.exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lemma32Values {
    pub wedge: f64,
    pub bound: f64,
    pub wedge_exact: bool,
}

/// `|u e_1 ∧ ... ∧ u e_k|` against `(1/k!)^{1/2} π_2(u)^k`, with the
/// certified upper bound on `π_2`.
pub fn verify_lemma32(u: &DenseOperator, seed: u64) -> Result<Lemma32Values> {
    let k = u.cols();
    let a = u.matrix();
    let cols: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..u.rows()).map(|i| a[i * k + j]).collect())
        .collect();
    let w = wedge(&cols, u.codomain(), WEDGE_BUDGET)?;
    let pi2 = pi2_bounds(u, seed)?;
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    Ok(Lemma32Values {
        wedge: w.value,
        bound: math::powf(pi2.upper, k as f64) / math::sqrt(factorial),
        wedge_exact: w.exact,
    })
}
