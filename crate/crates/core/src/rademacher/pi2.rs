use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::operators::DenseOperator;
use crate::rng;

const EIGEN_FLOOR: f64 = 1e-12;
const RESTARTS: usize = 8;
const ITERATIONS: usize = 60;

/// Bounds on the 2-summing norm of `u : l_2^d → X`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pi2Estimate {
    pub lower: f64,
    pub upper: f64,
    /// Orthonormal basis (columns, `d x d` row-major) attaining `lower`.
    pub witness_basis: Vec<f64>,
    /// Symmetric PSD matrix of trace one attaining `upper`.
    pub pietsch_matrix: Vec<f64>,
}

/// `(Σ_i ‖u b_i‖^2)^{1/2}` for the columns `b_i` of `basis`.
fn system_value(u: &DenseOperator, basis: &[f64], d: usize) -> f64 {
    let mut col = vec![0.0; d];
    let mut acc = 0.0;
    for i in 0..d {
        for (r, c) in col.iter_mut().enumerate() {
            *c = basis[r * d + i];
        }
        let v = u.codomain().norm(&u.apply(&col));
        acc += v * v;
    }
    math::sqrt(acc)
}

/// Floors the spectrum of a symmetric matrix and rescales it to trace one.
fn regularize(w: &[f64], d: usize) -> Vec<f64> {
    let floored = linalg::symmetric_apply(w, d, |l| l.max(EIGEN_FLOOR));
    let tr: f64 = (0..d).map(|i| floored[i * d + i]).sum();
    floored.iter().map(|x| x / tr).collect()
}

/// `‖u W^{-1/2} : l_2 → X‖` (certified upper end) for trace-one `W`.
fn domination_value(u: &DenseOperator, w: &[f64], d: usize) -> f64 {
    let inv_sqrt = linalg::symmetric_apply(w, d, |l| 1.0 / math::sqrt(l));
    let m = linalg::matmul(&u.matrix(), &inv_sqrt, u.rows(), d, d);
    DenseOperator::new(*u.domain(), *u.codomain(), m)
        .expect("shape preserved")
        .operator_norm()
        .upper
}

fn from_factor(c: &[f64], d: usize) -> Vec<f64> {
    let ct = linalg::transpose(c, d, d);
    let w = linalg::matmul(c, &ct, d, d, d);
    let tr: f64 = (0..d).map(|i| w[i * d + i]).sum();
    if tr <= 0.0 {
        let mut id = vec![0.0; d * d];
        (0..d).for_each(|i| id[i * d + i] = 1.0 / d as f64);
        return id;
    }
    regularize(&w.iter().map(|x| x / tr).collect::<Vec<_>>(), d)
}

/// Lower and upper bounds on `π_2(u)` for `u` with an `l_2^d` domain.
///
/// The lower bound is the best orthonormal system among the standard
/// basis, the right singular vectors and random rotations. The upper bound
/// minimizes `‖u W^{-1/2}‖` over `W = C C^T / tr(C C^T)` by descent on `C`
/// with a numerical gradient; every evaluated `W` gives a valid bound.
pub fn pi2_bounds(u: &DenseOperator, seed: u64) -> Result<Pi2Estimate> {
    if !u.domain().p().is_two() {
        return Err(Error::UnsupportedSpace);
    }
    let d = u.cols();
    let mut rng = rng::keyed(seed, "pi2");

    let mut identity = vec![0.0; d * d];
    (0..d).for_each(|i| identity[i * d + i] = 1.0);
    let a = u.matrix();
    let ata = linalg::gram(&a, u.rows(), d);
    let (_, singular_basis) = linalg::symmetric_eigen(&ata, d);
    let mut systems = vec![identity.clone(), singular_basis];
    for _ in 0..32 {
        let mut q: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
        if linalg::orthonormalize_columns(&mut q, d) {
            systems.push(q);
        }
    }
    let (lower, witness_basis) = systems
        .into_iter()
        .map(|b| (system_value(u, &b, d), b))
        .fold((f64::NEG_INFINITY, Vec::new()), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        });

    // Starting factors: I (W = I/d), |u|^{1/2} (optimal between Hilbert
    // spaces), then random ones.
    let abs_sqrt = linalg::symmetric_apply(&ata, d, |l| math::sqrt(math::sqrt(l.max(0.0))));
    let mut factors = vec![identity, abs_sqrt];
    while factors.len() < RESTARTS + 2 {
        factors.push((0..d * d).map(|_| rng.sample(StandardNormal)).collect());
    }
    let mut upper = f64::INFINITY;
    let mut pietsch = Vec::new();
    for mut c in factors {
        let mut w = from_factor(&c, d);
        let mut value = domination_value(u, &w, d);
        let mut step = 0.1;
        for _ in 0..ITERATIONS {
            let h = 1e-6;
            let grad: Vec<f64> = (0..d * d)
                .map(|i| {
                    let mut cp = c.clone();
                    cp[i] += h;
                    let mut cm = c.clone();
                    cm[i] -= h;
                    (domination_value(u, &from_factor(&cp, d), d)
                        - domination_value(u, &from_factor(&cm, d), d))
                        / (2.0 * h)
                })
                .collect();
            let gnorm = math::sqrt(grad.iter().map(|g| g * g).sum());
            if gnorm < 1e-12 {
                break;
            }
            let mut improved = false;
            while step > 1e-9 {
                let trial: Vec<f64> = c
                    .iter()
                    .zip(&grad)
                    .map(|(x, g)| x - step * g / gnorm)
                    .collect();
                let tw = from_factor(&trial, d);
                let tv = domination_value(u, &tw, d);
                if tv < value {
                    c = trial;
                    w = tw;
                    value = tv;
                    step *= 1.5;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if value < upper {
            upper = value;
            pietsch = w;
        }
    }
    Ok(Pi2Estimate {
        lower,
        upper: upper.max(lower),
        witness_basis,
        pietsch_matrix: pietsch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::NormedSpace;

    #[test]
    fn identity_is_hilbert_schmidt() {
        for d in 1..=4 {
            let u = DenseOperator::identity(NormedSpace::l2(d).unwrap());
            let e = pi2_bounds(&u, 0).unwrap();
            let hs = math::sqrt(d as f64);
            assert!((e.lower - hs).abs() < 1e-9);
            assert!(e.upper <= hs * 1.01);
            let tr: f64 = (0..d).map(|i| e.pietsch_matrix[i * d + i]).sum();
            assert!((tr - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_one_meets() {
        let y = [1.0, -2.0, 0.5];
        let a = [0.6, 0.8];
        let m: Vec<f64> = y
            .iter()
            .flat_map(|yi| a.iter().map(move |aj| yi * aj))
            .collect();
        let u = DenseOperator::new(NormedSpace::l2(2).unwrap(), NormedSpace::l1(3).unwrap(), m)
            .unwrap();
        let e = pi2_bounds(&u, 1).unwrap();
        assert!((e.lower - 3.5).abs() < 1e-9);
        assert!((e.upper - 3.5).abs() < 1e-3 * 3.5);
    }

    #[test]
    fn rejects_non_hilbert_domain() {
        let u = DenseOperator::identity(NormedSpace::l1(2).unwrap());
        assert!(pi2_bounds(&u, 0).is_err());
    }
}
