//! Norms of Rademacher sums `Σ_k ε_k v_k` for a fixed family of vectors.
//!
//! The vectors are transposed into per-coordinate tuples
//! `t_j = (v_1[j], ..., v_n[j])`, and `Σ ε_k v_k` is evaluated only on a
//! reduced set of tuples:
//!
//! - zero tuples are dropped;
//! - runs of equal (or opposite) consecutive tuples are merged, carrying a
//!   multiplicity weight for finite `p`;
//! - for `p = ∞`, a tuple that is the exact midpoint of its neighbours is
//!   dropped, since `|⟨ε, t⟩|` is then bounded by the neighbours' values.
//!
//! Exact moments enumerate `ε` in Gray-code order with `ε_1 = 1` fixed,
//! using `‖Σ ε_k v_k‖ = ‖Σ -ε_k v_k‖`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::math;
use crate::rng::Rng;
use crate::spaces::Exponent;

/// Upper limit on the number of signs for exact enumeration.
pub const DEFAULT_EXACT_CAP: usize = 20;

const RESYNC: usize = 1024;

/// A reduced family of `n` vectors in `l_p^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSum {
    n: usize,
    p: Exponent,
    /// Reduced tuples, row-major `R x n`.
    tuples: Vec<f64>,
    weights: Vec<f64>,
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a == b
}

fn opposite(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == -*y)
}

impl SignSum {
    /// `vectors` holds `n` vectors of length `m`, vector-major.
    pub fn new(vectors: &[f64], n: usize, p: Exponent) -> Result<Self> {
        if n == 0 {
            return Ok(Self {
                n,
                p,
                tuples: Vec::new(),
                weights: Vec::new(),
            });
        }
        if !vectors.len().is_multiple_of(n) {
            return Err(Error::InvalidArgument("vector lengths differ"));
        }
        let m = vectors.len() / n;
        let tuple = |j: usize, out: &mut [f64]| {
            for (k, o) in out.iter_mut().enumerate() {
                *o = vectors[k * m + j];
            }
        };
        let mut kept: Vec<f64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut cur = vec![0.0; n];
        let (mut prev, mut next) = (vec![0.0; n], vec![0.0; n]);
        for j in 0..m {
            tuple(j, &mut cur);
            if cur.iter().all(|&x| x == 0.0) {
                continue;
            }
            if p.is_infinity() && j > 0 && j + 1 < m {
                tuple(j - 1, &mut prev);
                tuple(j + 1, &mut next);
                let mid = cur
                    .iter()
                    .zip(prev.iter().zip(&next))
                    .all(|(c, (a, b))| *c == 0.5 * (a + b));
                if mid {
                    continue;
                }
            }
            let r = weights.len();
            if r > 0 {
                let last = &kept[(r - 1) * n..r * n];
                if same(last, &cur) || opposite(last, &cur) {
                    weights[r - 1] += 1.0;
                    continue;
                }
            }
            kept.extend_from_slice(&cur);
            weights.push(1.0);
        }
        Ok(Self {
            n,
            p,
            tuples: kept,
            weights,
        })
    }

    pub fn from_vectors(vectors: &[Vec<f64>], p: Exponent) -> Result<Self> {
        let flat: Vec<f64> = vectors.iter().flatten().copied().collect();
        if let Some(first) = vectors.first() {
            if vectors.iter().any(|v| v.len() != first.len()) {
                return Err(Error::InvalidArgument("vector lengths differ"));
            }
        }
        Self::new(&flat, vectors.len(), p)
    }

    /// Number of vectors (signs).
    pub fn signs(&self) -> usize {
        self.n
    }

    /// Number of reduced coordinates.
    pub fn reduced_len(&self) -> usize {
        self.weights.len()
    }

    fn norm_of(&self, s: &[f64]) -> f64 {
        match self.p {
            Exponent::Infinity => s.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
            Exponent::Finite(1.0) => s.iter().zip(&self.weights).map(|(x, w)| w * x.abs()).sum(),
            Exponent::Finite(2.0) => {
                math::sqrt(s.iter().zip(&self.weights).map(|(x, w)| w * x * x).sum())
            }
            Exponent::Finite(p) => math::root(
                s.iter()
                    .zip(&self.weights)
                    .map(|(x, w)| w * math::abs_pow(*x, p))
                    .sum(),
                p,
            ),
        }
    }

    fn sum_into(&self, eps: u64, s: &mut [f64]) {
        let n = self.n;
        for (r, out) in s.iter_mut().enumerate() {
            let t = &self.tuples[r * n..(r + 1) * n];
            *out = t
                .iter()
                .enumerate()
                .map(|(k, x)| if eps >> k & 1 == 1 { -x } else { *x })
                .sum();
        }
    }

    /// Visits `‖Σ ε_k v_k‖` for every `ε` with `ε_1 = 1`, in Gray-code order.
    fn for_each_norm(&self, mut visit: impl FnMut(f64)) {
        let n = self.n;
        if n == 0 || self.weights.is_empty() {
            let states = if n == 0 { 1 } else { 1usize << (n - 1) };
            (0..states).for_each(|_| visit(0.0));
            return;
        }
        let r = self.weights.len();
        let mut s = vec![0.0; r];
        let mut eps = 0u64;
        self.sum_into(eps, &mut s);
        visit(self.norm_of(&s));
        for i in 1..1usize << (n - 1) {
            let k = i.trailing_zeros() as usize + 1;
            eps ^= 1 << k;
            if i % RESYNC == 0 {
                self.sum_into(eps, &mut s);
            } else {
                let sign = if eps >> k & 1 == 1 { -2.0 } else { 2.0 };
                for (j, x) in s.iter_mut().enumerate() {
                    *x += sign * self.tuples[j * n + k];
                }
            }
            visit(self.norm_of(&s));
        }
    }

    /// `E_ε ‖Σ ε_k v_k‖^q` for each `q`, exact.
    pub fn moments(&self, qs: &[f64]) -> Vec<f64> {
        let mut chunks: Vec<Vec<f64>> = vec![Vec::new(); qs.len()];
        let mut acc = vec![0.0; qs.len()];
        let mut count = 0usize;
        let mut total = 0usize;
        self.for_each_norm(|x| {
            for (a, q) in acc.iter_mut().zip(qs) {
                *a += math::abs_pow(x, *q);
            }
            count += 1;
            total += 1;
            if count == RESYNC {
                for (c, a) in chunks.iter_mut().zip(acc.iter_mut()) {
                    c.push(*a);
                    *a = 0.0;
                }
                count = 0;
            }
        });
        chunks
            .iter_mut()
            .zip(acc)
            .map(|(c, a)| {
                c.push(a);
                math::pairwise_sum(c) / total as f64
            })
            .collect()
    }

    /// `(E_ε ‖Σ ε_k v_k‖^q)^{1/q}`, exact.
    pub fn average(&self, q: f64) -> f64 {
        math::root(self.moments(&[q])[0], q)
    }

    /// `max_ε ‖Σ ε_k v_k‖`.
    pub fn max_norm(&self) -> f64 {
        let mut best = 0.0f64;
        self.for_each_norm(|x| best = best.max(x));
        best
    }

    /// `samples` independent draws of `‖Σ ε_k v_k‖`.
    pub fn sample_norms(&self, samples: usize, rng: &mut Rng) -> Vec<f64> {
        let mut s = vec![0.0; self.weights.len()];
        (0..samples)
            .map(|_| {
                let eps: u64 = if self.n == 0 {
                    0
                } else {
                    rng.gen::<u64>() & (u64::MAX >> (64 - self.n))
                };
                self.sum_into(eps, &mut s);
                self.norm_of(&s)
            })
            .collect()
    }

    /// `E_ε ‖Σ ε_k v_k‖_1` coordinate by coordinate; each reduced
    /// coordinate costs `2^{k'-1}` terms where `k'` counts its nonzero
    /// entries. Requires `p = 1`.
    pub fn expected_l1(&self) -> Result<f64> {
        if !self.p.is_one() {
            return Err(Error::UnsupportedSpace);
        }
        let n = self.n;
        let mut nz = Vec::with_capacity(n);
        let mut terms = Vec::with_capacity(self.weights.len());
        for (r, w) in self.weights.iter().enumerate() {
            nz.clear();
            nz.extend(
                self.tuples[r * n..(r + 1) * n]
                    .iter()
                    .copied()
                    .filter(|&x| x != 0.0),
            );
            if nz.len() > 63 {
                return Err(Error::ExactCapExceeded {
                    requested: nz.len(),
                    cap: 63,
                });
            }
            terms.push(w * expected_abs(&nz));
        }
        Ok(math::pairwise_sum(&terms))
    }
}

/// `E_ε |Σ ε_k a_k|`, exact.
pub fn expected_abs(a: &[f64]) -> f64 {
    match a.len() {
        0 => 0.0,
        1 => a[0].abs(),
        2 => 0.5 * ((a[0] + a[1]).abs() + (a[0] - a[1]).abs()),
        k => {
            let rest = &a[1..];
            let mut s: f64 = a.iter().sum();
            let mut eps = 0u64;
            let mut total = s.abs();
            for i in 1..1usize << (k - 1) {
                let j = i.trailing_zeros() as usize;
                eps ^= 1 << j;
                if eps >> j & 1 == 1 {
                    s -= 2.0 * rest[j];
                } else {
                    s += 2.0 * rest[j];
                }
                if i % RESYNC == 0 {
                    s = a[0]
                        + rest
                            .iter()
                            .enumerate()
                            .map(|(l, x)| if eps >> l & 1 == 1 { -x } else { *x })
                            .sum::<f64>();
                }
                total += s.abs();
            }
            total / (1u64 << (k - 1)) as f64
        }
    }
}
