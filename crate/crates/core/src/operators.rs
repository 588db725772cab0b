//! Linear operators between `l_p` spaces, summation operators and the
//! distribution-function map on point measures.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::rng;
use crate::spaces::{dot, NormedSpace};

/// Extreme-point enumeration is used for exact norms up to this count.
pub const EXTREME_ENUMERATION_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Row-major `codim x dim`.
    Matrix(Vec<f64>),
    ScaledIdentity(f64),
    /// `(x_k) ↦ (Σ_{l <= k} x_l)`.
    Summation,
    /// Transpose of [`Repr::Summation`]: `(x_k) ↦ (Σ_{l >= k} x_l)`.
    ReverseSummation,
}

/// A linear map between two `l_p` spaces.
///
/// Identities and summation operators keep a structured representation so
/// that applying `σ_N` costs `O(N)`; [`DenseOperator::matrix`] always
/// returns the full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    domain: NormedSpace,
    codomain: NormedSpace,
    repr: Repr,
}

/// Result of an operator-norm computation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormBound {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl NormBound {
    fn exact(v: f64) -> Self {
        Self {
            lower: v,
            upper: v,
            exact: true,
        }
    }
}

impl DenseOperator {
    pub fn new(domain: NormedSpace, codomain: NormedSpace, matrix: Vec<f64>) -> Result<Self> {
        if matrix.len() != domain.dim() * codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim() * codomain.dim(),
                got: matrix.len(),
            });
        }
        Ok(Self {
            domain,
            codomain,
            repr: Repr::Matrix(matrix),
        })
    }

    pub fn identity(space: NormedSpace) -> Self {
        Self::scaled_identity(space, 1.0)
    }

    pub fn scaled_identity(space: NormedSpace, s: f64) -> Self {
        Self {
            domain: space,
            codomain: space,
            repr: Repr::ScaledIdentity(s),
        }
    }

    /// Identity matrix between two spaces of equal dimension.
    pub fn embedding(domain: NormedSpace, codomain: NormedSpace) -> Result<Self> {
        if domain.dim() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: codomain.dim(),
            });
        }
        Ok(Self {
            domain,
            codomain,
            repr: Repr::ScaledIdentity(1.0),
        })
    }

    pub fn zero(domain: NormedSpace, codomain: NormedSpace) -> Self {
        Self {
            domain,
            codomain,
            repr: Repr::Matrix(vec![0.0; domain.dim() * codomain.dim()]),
        }
    }

    pub fn domain(&self) -> &NormedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    pub fn rows(&self) -> usize {
        self.codomain.dim()
    }

    pub fn cols(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_identity(&self) -> bool {
        self.repr == Repr::ScaledIdentity(1.0) && self.domain == self.codomain
    }

    /// `true` for the lower-triangular all-ones map.
    pub fn is_summation(&self) -> bool {
        self.repr == Repr::Summation
    }

    /// Returns `T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols());
        debug_assert_eq!(out.len(), self.rows());
        match &self.repr {
            Repr::Matrix(m) => {
                let cols = self.cols();
                for (o, row) in out.iter_mut().zip(m.chunks_exact(cols)) {
                    *o = dot(row, x);
                }
            }
            Repr::ScaledIdentity(s) => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = s * v;
                }
            }
            Repr::Summation => {
                let mut acc = 0.0;
                for (o, v) in out.iter_mut().zip(x) {
                    acc += v;
                    *o = acc;
                }
            }
            Repr::ReverseSummation => {
                let mut acc = 0.0;
                for (o, v) in out.iter_mut().zip(x).rev() {
                    acc += v;
                    *o = acc;
                }
            }
        }
    }

    /// The full `codim x dim` matrix, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Matrix(m) => m.clone(),
            _ => {
                let (rows, cols) = (self.rows(), self.cols());
                let mut m = vec![0.0; rows * cols];
                let mut e = vec![0.0; cols];
                let mut col = vec![0.0; rows];
                for j in 0..cols {
                    e[j] = 1.0;
                    self.apply_into(&e, &mut col);
                    for i in 0..rows {
                        m[i * cols + j] = col[i];
                    }
                    e[j] = 0.0;
                }
                m
            }
        }
    }

    /// `T' : Y' → X'`, the transpose acting between dual spaces.
    pub fn adjoint(&self) -> Self {
        let repr = match &self.repr {
            Repr::Matrix(m) => Repr::Matrix(linalg::transpose(m, self.rows(), self.cols())),
            Repr::ScaledIdentity(s) => Repr::ScaledIdentity(*s),
            Repr::Summation => Repr::ReverseSummation,
            Repr::ReverseSummation => Repr::Summation,
        };
        Self {
            domain: self.codomain.dual(),
            codomain: self.domain.dual(),
            repr,
        }
    }

    /// `‖T : X → Y‖`. Exact when a closed form or an enumerable extreme set
    /// is available; otherwise a certified interval.
    pub fn operator_norm(&self) -> NormBound {
        self.operator_norm_with_seed(0)
    }

    pub fn operator_norm_with_seed(&self, seed: u64) -> NormBound {
        let (rows, cols) = (self.rows(), self.cols());
        let p = self.domain.p();
        let q = self.codomain.p();
        if let Repr::ScaledIdentity(s) = self.repr {
            // ‖id : l_p^m → l_q^m‖ = m^{max(0, 1/q - 1/p)}
            let e = (q.reciprocal() - p.reciprocal()).max(0.0);
            return NormBound::exact(s.abs() * math::powf(cols as f64, e));
        }
        if p.is_one() {
            // Sup over the extreme points ±e_j of B_{l_1}.
            let mut e = vec![0.0; cols];
            let mut col = vec![0.0; rows];
            let mut best = 0.0f64;
            for j in 0..cols {
                e[j] = 1.0;
                self.apply_into(&e, &mut col);
                best = best.max(self.codomain.norm(&col));
                e[j] = 0.0;
            }
            return NormBound::exact(best);
        }
        if q.is_infinity() {
            let t = self.adjoint();
            let mut e = vec![0.0; rows];
            let mut row = vec![0.0; cols];
            let mut best = 0.0f64;
            for i in 0..rows {
                e[i] = 1.0;
                t.apply_into(&e, &mut row);
                best = best.max(self.domain.dual_norm(&row));
                e[i] = 0.0;
            }
            return NormBound::exact(best);
        }
        if p.is_two() && q.is_two() {
            return NormBound::exact(linalg::spectral_norm(&self.matrix(), rows, cols));
        }
        if p.is_infinity() && (cols as u32) < 128 && (1u128 << cols) <= EXTREME_ENUMERATION_CAP {
            let best = self
                .domain
                .extreme_points()
                .expect("l_inf extreme points")
                .map(|s| self.codomain.norm(&self.apply(&s)))
                .fold(0.0, f64::max);
            return NormBound::exact(best);
        }
        if q.is_one() && (rows as u32) < 128 && (1u128 << rows) <= EXTREME_ENUMERATION_CAP {
            let t = self.adjoint();
            let best = t
                .domain
                .extreme_points()
                .expect("l_inf extreme points")
                .map(|s| t.codomain.norm(&t.apply(&s)))
                .fold(0.0, f64::max);
            return NormBound::exact(best);
        }
        let lower = self.norm_lower_search(seed, 64);
        // ‖T‖ ≤ ‖ι : X → l_2‖ ‖T‖_{2→2} ‖ι : l_2 → Y‖
        let into_l2 = math::powf(cols as f64, (0.5 - p.reciprocal()).max(0.0));
        let from_l2 = math::powf(rows as f64, (q.reciprocal() - 0.5).max(0.0));
        let upper = into_l2 * linalg::spectral_norm(&self.matrix(), rows, cols) * from_l2;
        NormBound {
            lower,
            upper: upper.max(lower),
            exact: false,
        }
    }

    /// Random-start alternating ascent for `sup ‖Tx‖ / ‖x‖`; always a valid
    /// lower bound.
    pub fn norm_lower_search(&self, seed: u64, starts: usize) -> f64 {
        self.norm_search(seed, starts).0
    }

    /// A unit-free direction `x` with `‖Tx‖ / ‖x‖` as large as found, and
    /// that ratio. Exact for domain `l_1` (best unit vector).
    pub fn norm_witness(&self, seed: u64) -> (f64, Vec<f64>) {
        if self.domain.p().is_one() {
            let mut e = vec![0.0; self.cols()];
            let mut col = vec![0.0; self.rows()];
            let mut best = (0.0f64, 0usize);
            for j in 0..self.cols() {
                e[j] = 1.0;
                self.apply_into(&e, &mut col);
                let v = self.codomain.norm(&col);
                if v > best.0 {
                    best = (v, j);
                }
                e[j] = 0.0;
            }
            e[best.1] = 1.0;
            return (best.0, e);
        }
        self.norm_search(seed, 64)
    }

    fn norm_search(&self, seed: u64, starts: usize) -> (f64, Vec<f64>) {
        let mut rng = rng::keyed(seed, "operator-norm-search");
        let t = self.adjoint();
        let mut best = 0.0f64;
        let mut arg = vec![0.0; self.cols()];
        arg[0] = 1.0;
        for _ in 0..starts {
            let mut x: Vec<f64> = (0..self.cols())
                .map(|_| rng.sample(StandardNormal))
                .collect();
            for _ in 0..50 {
                let nx = self.domain.norm(&x);
                if nx == 0.0 {
                    break;
                }
                let y = self.apply(&x);
                let val = self.codomain.norm(&y) / nx;
                if val > best {
                    best = val;
                    arg.clone_from(&x);
                }
                // x ← argmax over B_X of ⟨x, T' b⟩ with b norming Tx.
                let b = self.codomain.norming_functional(&y);
                let g = t.apply(&b);
                let next = self.domain.dual().norming_functional(&g);
                if next.iter().all(|&v| v == 0.0) {
                    break;
                }
                x = next;
            }
        }
        (best, arg)
    }
}

/// `σ_N : l_1^N → l_∞^N`.
pub fn summation_operator(n: usize) -> Result<DenseOperator> {
    Ok(DenseOperator {
        domain: NormedSpace::l1(n)?,
        codomain: NormedSpace::linf(n)?,
        repr: Repr::Summation,
    })
}

/// A finite signed combination of Dirac measures on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure {
    atoms: Vec<(f64, f64)>,
}

/// Step-function summary of `t ↦ μ([0, t])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSummary {
    /// Distinct atom locations, ascending.
    pub breakpoints: Vec<f64>,
    /// `μ([0, t])` at each breakpoint.
    pub partial_sums: Vec<f64>,
    /// `sup_t |μ([0, t])|`.
    pub sup_norm: f64,
}

impl PointMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms
            .iter()
            .any(|&(t, l)| !(0.0..=1.0).contains(&t) || !l.is_finite())
        {
            return Err(Error::InvalidArgument(
                "atoms must lie in [0, 1] with finite mass",
            ));
        }
        Ok(Self { atoms })
    }

    pub fn dirac(t: f64, mass: f64) -> Result<Self> {
        Self::new(vec![(t, mass)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Atoms sorted by location with equal locations merged.
    pub fn merged(&self) -> Vec<(f64, f64)> {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (t, l) in atoms {
            match out.last_mut() {
                Some(last) if last.0 == t => last.1 += l,
                _ => out.push((t, l)),
            }
        }
        out
    }

    pub fn total_variation(&self) -> f64 {
        self.merged().iter().map(|a| a.1.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|&(t, l)| (t, s * l)).collect(),
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Self { atoms }
    }
}

/// `μ ↦ (t ↦ μ([0, t]))` evaluated on a point measure.
pub fn phi_apply(mu: &PointMeasure) -> PhiSummary {
    let merged = mu.merged();
    let mut acc = 0.0;
    let mut sup = 0.0f64;
    let mut breakpoints = Vec::with_capacity(merged.len());
    let mut partial_sums = Vec::with_capacity(merged.len());
    for (t, l) in merged {
        acc += l;
        sup = sup.max(acc.abs());
        breakpoints.push(t);
        partial_sums.push(acc);
    }
    PhiSummary {
        breakpoints,
        partial_sums,
        sup_norm: sup,
    }
}
