//! Rademacher averages, moment ratios, type constants, 2-summing norm
//! bounds and wedge products.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::rng;
use crate::signsum::{SignSum, DEFAULT_EXACT_CAP};
use crate::spaces::NormedSpace;

mod pi2;
mod type_constant;
mod wedge;

pub use pi2::{pi2_bounds, Pi2Estimate};
pub use type_constant::{
    doob_type2_bound, summation_as_point_measure, type_constant_lower, type_ratio, TypeEstimate,
};
pub use wedge::{
    verify_lemma31, verify_lemma32, wedge, Lemma31Values, Lemma32Values, Wedge, WEDGE_BUDGET,
};

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: usize = 200_000;

/// How to evaluate the expectation over signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Mode {
    /// Full enumeration; fails above `cap` signs.
    Exact {
        cap: usize,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
    /// Exact up to `cap` signs, Monte Carlo beyond.
    Auto {
        cap: usize,
        samples: usize,
        seed: u64,
    },
}

impl Default for Mode {
    fn default() -> Self {
        Mode::Exact {
            cap: DEFAULT_EXACT_CAP,
        }
    }
}

/// How a reported average was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "snake_case"))]
pub enum Evaluation {
    Exact,
    MonteCarlo {
        samples: usize,
        seed: u64,
        stderr: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RademacherAverage {
    pub value: f64,
    pub evaluation: Evaluation,
}

fn check_vectors(vectors: &[Vec<f64>], space: &NormedSpace) -> Result<()> {
    for v in vectors {
        if v.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: v.len(),
            });
        }
    }
    Ok(())
}

fn check_moment(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidExponent(q));
    }
    Ok(())
}

/// Stable label for a vector family, used to key its random stream.
pub(crate) fn family_label(prefix: &str, vectors: &[Vec<f64>]) -> alloc::string::String {
    let mut bytes = Vec::with_capacity(8 * vectors.iter().map(Vec::len).sum::<usize>());
    for v in vectors {
        for x in v {
            bytes.extend_from_slice(&x.to_bits().to_le_bytes());
        }
        bytes.push(0xff);
    }
    alloc::format!("{prefix}:{:016x}", rng::instance_hash(&bytes))
}

/// Mean of `x^q` over samples with the delta-method standard error of its
/// `q`-th root.
pub(crate) fn root_mean_with_stderr(norms: &[f64], q: f64) -> (f64, f64) {
    let n = norms.len() as f64;
    let pows: Vec<f64> = norms.iter().map(|&x| math::abs_pow(x, q)).collect();
    let mean = math::pairwise_sum(&pows) / n;
    let sq: Vec<f64> = pows.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = if norms.len() > 1 {
        math::pairwise_sum(&sq) / (n - 1.0)
    } else {
        0.0
    };
    let se_mean = math::sqrt(var / n);
    let value = math::root(mean, q);
    let stderr = if mean > 0.0 {
        value / (q * mean) * se_mean
    } else {
        0.0
    };
    (value, stderr)
}

/// `(E_ε ‖Σ_k ε_k x_k‖^q)^{1/q}`.
pub fn rademacher_average(
    vectors: &[Vec<f64>],
    space: &NormedSpace,
    q: f64,
    mode: Mode,
) -> Result<RademacherAverage> {
    check_vectors(vectors, space)?;
    check_moment(q)?;
    let k = vectors.len();
    let (exact, samples, seed) = match mode {
        Mode::Exact { cap } => {
            if k > cap {
                return Err(Error::ExactCapExceeded { requested: k, cap });
            }
            (true, 0, 0)
        }
        Mode::MonteCarlo { samples, seed } => (false, samples, seed),
        Mode::Auto { cap, samples, seed } => (k <= cap, samples, seed),
    };
    let sum = SignSum::from_vectors(vectors, space.p())?;
    if exact {
        return Ok(RademacherAverage {
            value: sum.average(q),
            evaluation: Evaluation::Exact,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least one sample",
        ));
    }
    let label = family_label("rademacher", vectors);
    let shards = samples.div_ceil(SHARD);
    let parts = math::map_indices_with(shards, |s| {
        let len = SHARD.min(samples - s * SHARD);
        let mut r = rng::shard(seed, &label, s as u64);
        sum.sample_norms(len, &mut r)
    });
    let norms: Vec<f64> = parts.into_iter().flatten().collect();
    let (value, stderr) = root_mean_with_stderr(&norms, q);
    Ok(RademacherAverage {
        value,
        evaluation: Evaluation::MonteCarlo {
            samples,
            seed,
            stderr,
        },
    })
}

const SHARD: usize = 8192;

/// `E_ε ‖Σ_k ε_k v_k‖_1` summed coordinate by coordinate.
pub fn rademacher_average_l1_exact(vectors: &[Vec<f64>]) -> Result<f64> {
    SignSum::from_vectors(vectors, crate::spaces::Exponent::Finite(1.0))?.expected_l1()
}

/// `(E‖Σ ε_k v_k‖^r)^{1/r} / (E‖Σ ε_k v_k‖^p)^{1/p}`; `1` for a family
/// whose sums all vanish.
pub fn kahane_ratio(vectors: &[Vec<f64>], space: &NormedSpace, p: f64, r: f64) -> Result<f64> {
    check_vectors(vectors, space)?;
    check_moment(p)?;
    check_moment(r)?;
    if p > r {
        return Err(Error::InvalidArgument("kahane_ratio needs p <= r"));
    }
    if vectors.len() > DEFAULT_EXACT_CAP {
        return Err(Error::ExactCapExceeded {
            requested: vectors.len(),
            cap: DEFAULT_EXACT_CAP,
        });
    }
    let m = SignSum::from_vectors(vectors, space.p())?.moments(&[p, r]);
    let (lp, lr) = (math::root(m[0], p), math::root(m[1], r));
    if lp == 0.0 {
        return Ok(1.0);
    }
    Ok((lr / lp).max(1.0))
}
