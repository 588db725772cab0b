//! Finite-dimensional `l_p^m` spaces and Bochner norms over `Ω_n`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dyadic::Table;
use crate::error::{Error, Result};
use crate::math;

/// An exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// The conjugate exponent, `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Self {
        match self {
            Self::Infinity => Self::Finite(1.0),
            Self::Finite(1.0) => Self::Infinity,
            Self::Finite(p) => Self::Finite(p / (p - 1.0)),
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Infinity => 0.0,
            Self::Finite(p) => 1.0 / p,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Self::Infinity => f64::INFINITY,
            Self::Finite(p) => p,
        }
    }

    pub fn is_one(self) -> bool {
        self == Self::Finite(1.0)
    }

    pub fn is_two(self) -> bool {
        self == Self::Finite(2.0)
    }

    pub fn is_infinity(self) -> bool {
        self == Self::Infinity
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => f.write_str("inf"),
            Self::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "oo" => Ok(Self::Infinity),
            _ => s
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument("unparsable exponent"))
                .and_then(Self::new),
        }
    }
}

/// `l_p^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormedSpace {
    p: Exponent,
    dim: usize,
}

impl NormedSpace {
    pub fn new(p: Exponent, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Exponent::Finite(x) = p {
            if x.is_nan() || x < 1.0 {
                return Err(Error::InvalidExponent(x));
            }
        }
        Ok(Self { p, dim })
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Self::new(Exponent::new(p)?, dim)
    }

    pub fn l1(dim: usize) -> Result<Self> {
        Self::new(Exponent::Finite(1.0), dim)
    }

    pub fn l2(dim: usize) -> Result<Self> {
        Self::new(Exponent::Finite(2.0), dim)
    }

    pub fn linf(dim: usize) -> Result<Self> {
        Self::new(Exponent::Infinity, dim)
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `l_{p'}^m`.
    pub fn dual(&self) -> Self {
        Self {
            p: self.p.conjugate(),
            dim: self.dim,
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        lp_norm(v, self.p)
    }

    pub fn dual_norm(&self, a: &[f64]) -> f64 {
        lp_norm(a, self.p.conjugate())
    }

    /// A functional `a` in the dual unit ball with `⟨v, a⟩ = ‖v‖`.
    pub fn norming_functional(&self, v: &[f64]) -> Vec<f64> {
        let norm = self.norm(v);
        let mut a = vec![0.0; v.len()];
        if norm == 0.0 {
            return a;
        }
        match self.p {
            Exponent::Infinity => {
                let (j, x) = v.iter().enumerate().fold((0, 0.0f64), |best, (j, &x)| {
                    if x.abs() > best.1.abs() {
                        (j, x)
                    } else {
                        best
                    }
                });
                a[j] = x.signum();
            }
            Exponent::Finite(1.0) => {
                for (aj, &x) in a.iter_mut().zip(v) {
                    *aj = if x > 0.0 {
                        1.0
                    } else if x < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                }
            }
            Exponent::Finite(p) => {
                let scale = math::powf(norm, p - 1.0);
                for (aj, &x) in a.iter_mut().zip(v) {
                    *aj = x.signum() * math::powf(x.abs(), p - 1.0) / scale;
                }
            }
        }
        a
    }

    /// Extreme points of the unit ball of this space.
    pub fn extreme_points(&self) -> Result<ExtremePoints> {
        match self.p {
            Exponent::Infinity => {
                if self.dim >= 64 {
                    return Err(Error::InvalidArgument("too many sign vectors to index"));
                }
                Ok(ExtremePoints {
                    dim: self.dim,
                    kind: ExtremeKind::Signs,
                    next: 0,
                    end: 1u64 << self.dim,
                })
            }
            p if p.is_one() => Ok(ExtremePoints {
                dim: self.dim,
                kind: ExtremeKind::SignedUnits,
                next: 0,
                end: 2 * self.dim as u64,
            }),
            _ => Err(Error::UnsupportedSpace),
        }
    }

    /// Number of extreme points, if enumerable.
    pub fn extreme_count(&self) -> Option<u128> {
        match self.p {
            Exponent::Infinity => 1u128.checked_shl(self.dim as u32),
            p if p.is_one() => Some(2 * self.dim as u128),
            _ => None,
        }
    }
}

impl fmt::Display for NormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}:{}", self.p, self.dim)
    }
}

impl FromStr for NormedSpace {
    type Err = Error;

    /// Parses `l<p>:<m>`, e.g. `l1:16`, `linf:8`, `l1.5:4`.
    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix('l')
            .ok_or(Error::InvalidArgument("space must look like l<p>:<m>"))?;
        let (p, m) = rest
            .split_once(':')
            .ok_or(Error::InvalidArgument("space must look like l<p>:<m>"))?;
        let dim = m
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument("unparsable dimension"))?;
        Self::new(p.parse()?, dim)
    }
}

pub fn lp_norm(v: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => v.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
        Exponent::Finite(1.0) => v.iter().map(|x| x.abs()).sum(),
        Exponent::Finite(2.0) => {
            // Scaled to avoid overflow on large entries.
            let scale = v.iter().fold(0.0, |m, x| f64::max(m, x.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale * math::sqrt(v.iter().map(|x| (x / scale) * (x / scale)).sum::<f64>())
        }
        Exponent::Finite(p) => {
            let scale = v.iter().fold(0.0, |m, x| f64::max(m, x.abs()));
            if scale == 0.0 {
                return 0.0;
            }
            scale
                * math::powf(
                    v.iter()
                        .map(|x| math::powf(x.abs() / scale, p))
                        .sum::<f64>(),
                    1.0 / p,
                )
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy)]
enum ExtremeKind {
    Signs,
    SignedUnits,
}

/// Lazy iterator over extreme points; sign vectors are generated from a
/// counter and never stored together.
#[derive(Debug, Clone)]
pub struct ExtremePoints {
    dim: usize,
    kind: ExtremeKind,
    next: u64,
    end: u64,
}

impl Iterator for ExtremePoints {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.next >= self.end {
            return None;
        }
        let i = self.next;
        self.next += 1;
        let mut v = vec![0.0; self.dim];
        match self.kind {
            ExtremeKind::Signs => {
                for (j, x) in v.iter_mut().enumerate() {
                    *x = if (i >> j) & 1 == 0 { 1.0 } else { -1.0 };
                }
            }
            ExtremeKind::SignedUnits => {
                let j = (i / 2) as usize;
                v[j] = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
            }
        }
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for ExtremePoints {}

/// An element of `L_q^X(Ω_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BochnerFunction {
    space: NormedSpace,
    table: Table,
}

impl BochnerFunction {
    pub fn new(space: NormedSpace, table: Table) -> Result<Self> {
        if table.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: table.dim(),
            });
        }
        Ok(Self { space, table })
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn depth(&self) -> usize {
        self.table.depth()
    }

    /// Pointwise norms `‖F(ω)‖` in index order.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        (0..self.table.rows())
            .map(|r| self.space.norm(self.table.row(r)))
            .collect()
    }

    pub fn bochner_norm(&self, q: f64) -> Result<f64> {
        bochner_norm(self, q)
    }
}

/// `(2^{-n} Σ_ω ‖F(ω)‖^q)^{1/q}`.
pub fn bochner_norm(f: &BochnerFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidExponent(q));
    }
    let powers: Vec<f64> = f
        .pointwise_norms()
        .into_iter()
        .map(|x| math::abs_pow(x, q))
        .collect();
    let mean = math::pairwise_sum(&powers) / powers.len() as f64;
    Ok(math::root(mean, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let v = [1.0, -2.0, 3.0];
        assert_eq!(NormedSpace::l1(3).unwrap().norm(&v), 6.0);
        assert_eq!(NormedSpace::linf(3).unwrap().norm(&v), 3.0);
        assert_eq!(NormedSpace::l2(2).unwrap().norm(&[3.0, 4.0]), 5.0);
    }

    #[test]
    fn rejects_small_exponent() {
        assert!(matches!(Exponent::new(0.5), Err(Error::InvalidExponent(_))));
        assert!(NormedSpace::lp(0.99, 3).is_err());
        assert!(NormedSpace::l1(0).is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::Finite(1.0).conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.conjugate(), Exponent::Finite(1.0));
        assert_eq!(Exponent::Finite(2.0).conjugate(), Exponent::Finite(2.0));
        assert!((Exponent::Finite(3.0).conjugate().as_f64() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn extreme_point_examples() {
        let l1 = NormedSpace::l1(2).unwrap();
        let pts: Vec<_> = l1.extreme_points().unwrap().collect();
        assert_eq!(pts.len(), 4);
        assert!(pts.contains(&vec![1.0, 0.0]));
        assert!(pts.contains(&vec![0.0, -1.0]));
        let linf = NormedSpace::linf(2).unwrap();
        let pts: Vec<_> = linf.extreme_points().unwrap().collect();
        assert_eq!(pts.len(), 4);
        assert!(pts.contains(&vec![-1.0, 1.0]));
        assert_eq!(
            NormedSpace::linf(20)
                .unwrap()
                .extreme_points()
                .unwrap()
                .len(),
            1 << 20
        );
        assert_eq!(
            NormedSpace::l2(3).unwrap().extreme_points().unwrap_err(),
            Error::UnsupportedSpace
        );
    }

    #[test]
    fn parse_space() {
        assert_eq!(
            "l1:16".parse::<NormedSpace>().unwrap(),
            NormedSpace::l1(16).unwrap()
        );
        assert_eq!(
            "linf:4".parse::<NormedSpace>().unwrap(),
            NormedSpace::linf(4).unwrap()
        );
        assert_eq!("l2:4".parse::<NormedSpace>().unwrap().to_string(), "l2:4");
        assert!("x1:3".parse::<NormedSpace>().is_err());
        assert!("l0.5:3".parse::<NormedSpace>().is_err());
    }

    #[test]
    fn norming_functional_attains_norm() {
        let v = [0.3, -1.7, 2.2, 0.0];
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let s = NormedSpace::lp(p, 4).unwrap();
            let a = s.norming_functional(&v);
            assert!((dot(&v, &a) - s.norm(&v)).abs() < 1e-12, "p = {p}");
            assert!(s.dual_norm(&a) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn bochner_examples() {
        let s = NormedSpace::l2(2).unwrap();
        let x = [3.0, 4.0];
        let c = Table::from_fn(3, 2, |_, o| o.copy_from_slice(&x)).unwrap();
        let f = BochnerFunction::new(s, c).unwrap();
        for q in [1.0, 2.0, 3.5] {
            assert!((f.bochner_norm(q).unwrap() - 5.0).abs() < 1e-12);
        }
        let t = Table::from_fn(1, 2, |r, o| {
            if r == 0 {
                o.copy_from_slice(&x)
            }
        })
        .unwrap();
        let f = BochnerFunction::new(s, t).unwrap();
        assert!((f.bochner_norm(2.0).unwrap() - 5.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(f.bochner_norm(0.5).is_err());
    }
}
