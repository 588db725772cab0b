use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math;
use crate::operators::{DenseOperator, PointMeasure};
use crate::rng;
use crate::signsum::{SignSum, DEFAULT_EXACT_CAP};

/// Lower bound on `T_p^n(T)` with the sequence that attains it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TypeEstimate {
    pub p: f64,
    pub n: usize,
    pub lower: f64,
    /// Analytic upper bound when one is known.
    pub upper: Option<f64>,
    /// Normalized to `Σ ‖x_k‖^p = 1`.
    pub witness: Vec<Vec<f64>>,
    pub evaluations: u64,
}

/// `(E_ε ‖Σ ε_k T x_k‖^2)^{1/2} / (Σ ‖x_k‖^p)^{1/p}`; zero for a zero
/// sequence.
pub fn type_ratio(t: &DenseOperator, xs: &[Vec<f64>], p: f64) -> Result<f64> {
    if xs.len() > DEFAULT_EXACT_CAP {
        return Err(Error::ExactCapExceeded {
            requested: xs.len(),
            cap: DEFAULT_EXACT_CAP,
        });
    }
    let mut denom = 0.0;
    let mut images = Vec::with_capacity(xs.len());
    for x in xs {
        if x.len() != t.cols() {
            return Err(Error::DimensionMismatch {
                expected: t.cols(),
                got: x.len(),
            });
        }
        denom += math::abs_pow(t.domain().norm(x), p);
        images.push(t.apply(x));
    }
    if denom == 0.0 {
        return Ok(0.0);
    }
    let num = SignSum::from_vectors(&images, t.codomain().p())?.average(2.0);
    Ok(num / math::root(denom, p))
}

/// Type-2 constants known in closed form: `2` for summation operators
/// (Doob's inequality for the partial-sum process) and `‖T‖` between
/// Hilbert spaces.
pub fn doob_type2_bound(t: &DenseOperator) -> Option<f64> {
    if t.is_summation() {
        return Some(2.0);
    }
    if t.domain().p().is_two() && t.codomain().p().is_two() {
        return Some(t.operator_norm().upper);
    }
    None
}

/// The point measure `Σ_j x_j δ_{t_j}` on `[0, 1]` with increasing `t_j`,
/// for which `Φμ` sampled at the atoms is `σ_N x`.
pub fn summation_as_point_measure(x: &[f64]) -> Result<PointMeasure> {
    let n = x.len();
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    PointMeasure::new(
        x.iter()
            .enumerate()
            .map(|(j, &v)| (j as f64 / denom, v))
            .collect(),
    )
}

struct Start {
    xs: Vec<Vec<f64>>,
    value: f64,
    step: f64,
}

/// Best `type_ratio` found by multi-start random search with coordinate
/// hill climbing, spending at most `budget` norm evaluations.
pub fn type_constant_lower(
    t: &DenseOperator,
    p: f64,
    n: usize,
    budget: u64,
    seed: u64,
) -> Result<TypeEstimate> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidExponent(p));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be positive"));
    }
    if n > DEFAULT_EXACT_CAP {
        return Err(Error::ExactCapExceeded {
            requested: n,
            cap: DEFAULT_EXACT_CAP,
        });
    }
    let dim = t.cols();
    let cost = 1u64 << (n - 1);
    let mut rng = rng::keyed(seed, "type-constant-search");
    let mut spent = 0u64;

    let mut seeds: Vec<Vec<Vec<f64>>> = Vec::new();
    let (_, dir) = t.norm_witness(seed);
    let mut single = vec![vec![0.0; dim]; n];
    single[0] = dir;
    seeds.push(single);
    seeds.push(
        (0..n)
            .map(|k| {
                let mut e = vec![0.0; dim];
                e[k % dim] = 1.0;
                e
            })
            .collect(),
    );
    for _ in 0..16 {
        seeds.push(
            (0..n)
                .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
                .collect(),
        );
    }

    let mut starts: Vec<Start> = Vec::new();
    for xs in seeds {
        if spent + cost > budget && !starts.is_empty() {
            break;
        }
        spent += cost;
        let value = type_ratio(t, &xs, p)?;
        starts.push(Start {
            xs,
            value,
            step: 0.5,
        });
    }
    let mut turn = 0usize;
    while spent + cost <= budget {
        let count = starts.len();
        let s = &mut starts[turn % count];
        turn += 1;
        let k = rng.gen_range(0..n);
        let scale = t.domain().norm(&s.xs[k]).max(1e-3);
        let old = s.xs[k].clone();
        for x in s.xs[k].iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *x += s.step * scale * g / math::sqrt(dim as f64);
        }
        spent += cost;
        let v = type_ratio(t, &s.xs, p)?;
        if v > s.value {
            s.value = v;
            s.step = (s.step * 1.5).min(4.0);
        } else {
            s.xs[k] = old;
            s.step = (s.step * 0.8).max(1e-6);
        }
    }
    let best = starts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
        .map(|(_, s)| s)
        .ok_or(Error::Internal("no starting point evaluated"))?;
    let norm = math::root(
        best.xs
            .iter()
            .map(|x| math::abs_pow(t.domain().norm(x), p))
            .sum(),
        p,
    );
    let witness = best
        .xs
        .iter()
        .map(|x| x.iter().map(|v| v / norm).collect())
        .collect();
    Ok(TypeEstimate {
        p,
        n,
        lower: best.value,
        upper: if p == 2.0 { doob_type2_bound(t) } else { None },
        witness,
        evaluations: spent,
    })
}
