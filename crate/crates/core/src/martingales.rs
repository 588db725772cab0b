//! Walsh-Paley martingales, the canonical constructions built on unit
//! vectors, translation martingales and martingale transforms.
//!
//! A martingale is determined by its terminal table; the levels
//! `M_k = E(M_n | F_k)` are derived on first use and cached as block means
//! (`2^k` rows for level `k`).

use alloc::vec;
use alloc::vec::Vec;

use once_cell::race::OnceBox;

use crate::dyadic::{self, omega, Table};
use crate::error::{Error, Result};
use crate::math;
use crate::operators::DenseOperator;
use crate::spaces::{dot, BochnerFunction, NormedSpace};

/// Read access to a Walsh-Paley martingale of depth `n` with values in an
/// `l_p^m` space, one point at a time.
pub trait MartingaleView: Sync {
    fn depth(&self) -> usize;

    fn space(&self) -> NormedSpace;

    fn dim(&self) -> usize {
        self.space().dim()
    }

    /// Writes `M_k(ω)` for the point stored at `row`.
    fn level_into(&self, k: usize, row: usize, out: &mut [f64]);

    /// Writes `dM_k(ω)` for `1 <= k <= n`.
    fn difference_into(&self, k: usize, row: usize, out: &mut [f64]) {
        debug_assert!(k >= 1);
        let mut prev = vec![0.0; out.len()];
        self.level_into(k, row, out);
        self.level_into(k - 1, row, &mut prev);
        for (o, p) in out.iter_mut().zip(&prev) {
            *o -= p;
        }
    }

    fn terminal_into(&self, row: usize, out: &mut [f64]) {
        self.level_into(self.depth(), row, out);
    }

    /// `M_0`, the mean of the terminal values.
    fn start(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.level_into(0, 0, &mut out);
        out
    }
}

/// A martingale stored by its terminal table.
#[derive(Debug)]
pub struct WalshPaleyMartingale {
    space: NormedSpace,
    terminal: Table,
    levels: OnceBox<Vec<Vec<f64>>>,
}

impl Clone for WalshPaleyMartingale {
    fn clone(&self) -> Self {
        Self {
            space: self.space,
            terminal: self.terminal.clone(),
            levels: OnceBox::new(),
        }
    }
}

impl PartialEq for WalshPaleyMartingale {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.terminal == other.terminal
    }
}

impl WalshPaleyMartingale {
    pub fn new(space: NormedSpace, terminal: Table) -> Result<Self> {
        if terminal.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: terminal.dim(),
            });
        }
        Ok(Self {
            space,
            terminal,
            levels: OnceBox::new(),
        })
    }

    /// The martingale of `terminal - E terminal`, so that `M_0 = 0`.
    pub fn zero_start(space: NormedSpace, mut terminal: Table) -> Result<Self> {
        let mean = terminal.mean();
        terminal.sub_row(&mean);
        Self::new(space, terminal)
    }

    pub fn terminal(&self) -> &Table {
        &self.terminal
    }

    pub fn into_terminal(self) -> Table {
        self.terminal
    }

    fn levels(&self) -> &Vec<Vec<f64>> {
        self.levels
            .get_or_init(|| alloc::boxed::Box::new(dyadic::all_levels(&self.terminal)))
    }

    /// `M_k(ω)` for the point stored at `row`.
    pub fn level_at(&self, k: usize, row: usize) -> &[f64] {
        let n = self.terminal.depth();
        let dim = self.space.dim();
        let p = row >> (n - k);
        &self.levels()[k][p * dim..(p + 1) * dim]
    }

    /// `M_k` expanded to a full table.
    pub fn level(&self, k: usize) -> Result<Table> {
        let n = self.depth();
        if k > n {
            return Err(Error::LevelOutOfRange { level: k, depth: n });
        }
        Table::from_fn(n, self.space.dim(), |row, out| {
            out.copy_from_slice(self.level_at(k, row))
        })
    }

    /// `[dM_0, ..., dM_n]` as full tables.
    pub fn differences(&self) -> Vec<Table> {
        dyadic::differences(&self.terminal)
    }

    /// `true` when `M_0` vanishes up to `tol` relative to the table scale.
    pub fn is_zero_start(&self, tol: f64) -> bool {
        let scale = self
            .terminal
            .as_slice()
            .iter()
            .fold(0.0, |m, x| f64::max(m, x.abs()))
            .max(1.0);
        self.start().iter().all(|x| x.abs() <= tol * scale)
    }

    pub fn as_bochner(&self) -> BochnerFunction {
        BochnerFunction::new(self.space, self.terminal.clone()).expect("dims checked")
    }

    /// Pointwise image under `T`, levelwise (conditional expectation
    /// commutes with linear maps).
    pub fn map(&self, t: &DenseOperator) -> Result<Self> {
        if t.cols() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                got: t.cols(),
            });
        }
        let table = Table::from_fn(self.depth(), t.rows(), |row, out| {
            t.apply_into(self.terminal.row(row), out)
        })?;
        Self::new(*t.codomain(), table)
    }
}

impl MartingaleView for WalshPaleyMartingale {
    fn depth(&self) -> usize {
        self.terminal.depth()
    }

    fn space(&self) -> NormedSpace {
        self.space
    }

    fn level_into(&self, k: usize, row: usize, out: &mut [f64]) {
        out.copy_from_slice(self.level_at(k, row));
    }

    fn difference_into(&self, k: usize, row: usize, out: &mut [f64]) {
        let cur = self.level_at(k, row);
        let prev = self.level_at(k - 1, row);
        for ((o, c), p) in out.iter_mut().zip(cur).zip(prev) {
            *o = c - p;
        }
    }
}

/// `M_n^1(ω) = e_{i(ω)}` in `l_1^{2^n}`, materialized.
pub fn haar_l1(n: usize) -> Result<WalshPaleyMartingale> {
    HaarWitness::new(n)?.materialize()
}

/// The image `σ_n M^1` in `l_∞^{2^n}`, materialized by applying `σ_n` to
/// every terminal value.
pub fn summation_image(n: usize) -> Result<WalshPaleyMartingale> {
    let sigma = crate::operators::summation_operator(1 << n)?;
    haar_l1(n)?.map(&sigma)
}

/// `dM_k^∞(ω) = ω_k 2^{k-n-1} (0, ..., 0, 1, 2, ..., 2^{n-k}, 2^{n-k}-1, ..., 1, 0, ..., 0)`
/// with the rising ramp on `I(ω_1, ..., ω_{k-1}, 1)` and the falling ramp on
/// `I(ω_1, ..., ω_{k-1}, -1)`.
pub fn difference_formula_minf(n: usize, k: usize, row: usize) -> Result<Vec<f64>> {
    dyadic::check_depth(n)?;
    if k == 0 || k > n {
        return Err(Error::LevelOutOfRange { level: k, depth: n });
    }
    let mut out = vec![0.0; 1 << n];
    tent_into(n, k, row, &mut out);
    Ok(out)
}

fn tent_into(n: usize, k: usize, row: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    let half = 1usize << (n - k);
    let start = (row >> (n - k + 1)) * 2 * half;
    let s = f64::from(omega(row, n, k)) * math::powf(2.0, k as f64 - n as f64 - 1.0);
    for j in 0..half {
        out[start + j] = s * (j + 1) as f64;
        out[start + half + j] = s * (half - 1 - j) as f64;
    }
}

/// The unit-vector martingale `M^1` evaluated analytically, optionally
/// balanced, mean-shifted and zero-padded into a larger `l_1^N`.
///
/// The balanced variant has terminal value `e_{i(ω)} - e_{i(ω')}` where
/// `ω'` is `ω` with the first sign flipped; its mean is zero without any
/// shift. It is the translation martingale of `χ_{(1,...,1)} -
/// χ_{(-1,1,...,1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HaarWitness {
    depth: usize,
    dim: usize,
    balanced: bool,
    zero_start: bool,
}

impl HaarWitness {
    pub fn new(n: usize) -> Result<Self> {
        dyadic::check_depth(n)?;
        Ok(Self {
            depth: n,
            dim: 1 << n,
            balanced: false,
            zero_start: false,
        })
    }

    pub fn balanced(n: usize) -> Result<Self> {
        Ok(Self {
            balanced: true,
            ..Self::new(n)?
        })
    }

    /// Subtracts `M_0` (a no-op for the balanced variant).
    pub fn zero_started(self) -> Self {
        Self {
            zero_start: true,
            ..self
        }
    }

    /// Embeds into `l_1^dim`, `dim >= 2^n`, by zero padding.
    pub fn padded(self, dim: usize) -> Result<Self> {
        if dim < 1 << self.depth {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.depth,
                got: dim,
            });
        }
        Ok(Self { dim, ..self })
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced
    }

    pub fn is_zero_start(&self) -> bool {
        self.zero_start || self.balanced
    }

    pub fn materialize(&self) -> Result<WalshPaleyMartingale> {
        let n = self.depth;
        let table = Table::from_fn(n, self.dim, |row, out| self.level_into(n, row, out))?;
        WalshPaleyMartingale::new(self.space(), table)
    }

    fn plain_level(&self, k: usize, row: usize, sign: f64, out: &mut [f64]) {
        let n = self.depth;
        let width = 1usize << (n - k);
        let start = (row >> (n - k)) * width;
        let v = sign / width as f64;
        out[start..start + width].iter_mut().for_each(|x| *x += v);
    }

    fn plain_difference(&self, k: usize, row: usize, sign: f64, out: &mut [f64]) {
        let n = self.depth;
        let width = 1usize << (n - k);
        let own = (row >> (n - k)) * width;
        let sib = ((row >> (n - k)) ^ 1) * width;
        let v = sign * math::powf(2.0, k as f64 - n as f64 - 1.0);
        out[own..own + width].iter_mut().for_each(|x| *x += v);
        out[sib..sib + width].iter_mut().for_each(|x| *x -= v);
    }
}

impl MartingaleView for HaarWitness {
    fn depth(&self) -> usize {
        self.depth
    }

    fn space(&self) -> NormedSpace {
        NormedSpace::l1(self.dim).expect("nonzero dimension")
    }

    fn level_into(&self, k: usize, row: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        let n = self.depth;
        if self.balanced {
            if k == 0 {
                return;
            }
            let flip = 1usize << (n - 1);
            self.plain_level(k, row, 1.0, out);
            self.plain_level(k, row ^ flip, -1.0, out);
            return;
        }
        self.plain_level(k, row, 1.0, out);
        if self.zero_start {
            let v = 1.0 / (1usize << n) as f64;
            out[..1 << n].iter_mut().for_each(|x| *x -= v);
        }
    }

    fn difference_into(&self, k: usize, row: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        let n = self.depth;
        if self.balanced {
            let flip = 1usize << (n - 1);
            if k == 1 {
                self.plain_difference(1, row, 2.0, out);
            } else {
                self.plain_difference(k, row, 1.0, out);
                self.plain_difference(k, row ^ flip, -1.0, out);
            }
            return;
        }
        self.plain_difference(k, row, 1.0, out);
    }
}

/// `σ_n M^1` evaluated analytically: levels are ramps, differences tents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummationImage {
    depth: usize,
}

impl SummationImage {
    pub fn new(n: usize) -> Result<Self> {
        dyadic::check_depth(n)?;
        Ok(Self { depth: n })
    }

    /// `|dM_k^∞(ω)|`.
    pub fn abs_difference_into(&self, k: usize, row: usize, out: &mut [f64]) {
        tent_into(self.depth, k, row, out);
        out.iter_mut().for_each(|x| *x = x.abs());
    }
}

impl MartingaleView for SummationImage {
    fn depth(&self) -> usize {
        self.depth
    }

    fn space(&self) -> NormedSpace {
        NormedSpace::linf(1 << self.depth).expect("nonzero dimension")
    }

    fn level_into(&self, k: usize, row: usize, out: &mut [f64]) {
        let n = self.depth;
        let width = 1usize << (n - k);
        let start = (row >> (n - k)) * width;
        let step = 1.0 / width as f64;
        for (j, x) in out.iter_mut().enumerate() {
            *x = if j < start {
                0.0
            } else if j < start + width {
                step * (j - start + 1) as f64
            } else {
                1.0
            };
        }
    }

    fn difference_into(&self, k: usize, row: usize, out: &mut [f64]) {
        tent_into(self.depth, k, row, out);
    }
}

/// `M^f(ω) = f_ω` with `f_ω(ω') = f(ωω')`, valued in `l_p(Ω_n)`.
///
/// Coordinates of `l_p(Ω_n)` are indexed by storage rows, so `ωω'`
/// corresponds to the XOR of the two row indices.
pub fn translation_martingale(f: &[f64], space: NormedSpace) -> Result<WalshPaleyMartingale> {
    let m = f.len();
    if !m.is_power_of_two() || m < 2 {
        return Err(Error::InvalidArgument("f must have 2^n entries, n >= 1"));
    }
    if space.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: space.dim(),
        });
    }
    let n = m.trailing_zeros() as usize;
    let table = Table::from_fn(n, m, |row, out| {
        for (j, o) in out.iter_mut().enumerate() {
            *o = f[row ^ j];
        }
    })?;
    WalshPaleyMartingale::new(space, table)
}

/// Scalar differences `[df_0, ..., df_n]` of `f : Ω_n → R`, each a vector
/// in `R^{2^n}`.
pub fn scalar_differences(f: &[f64]) -> Result<Vec<Vec<f64>>> {
    let m = f.len();
    if !m.is_power_of_two() || m < 2 {
        return Err(Error::InvalidArgument("f must have 2^n entries, n >= 1"));
    }
    let n = m.trailing_zeros() as usize;
    let table = Table::new(n, 1, f.to_vec())?;
    Ok(dyadic::differences(&table)
        .into_iter()
        .map(Table::into_vec)
        .collect())
}

/// `φ(T_1, ..., T_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleTransform {
    operators: Vec<DenseOperator>,
}

impl MartingaleTransform {
    pub fn new(operators: Vec<DenseOperator>) -> Result<Self> {
        let first = operators.first().ok_or(Error::InvalidArgument(
            "a transform needs at least one operator",
        ))?;
        let (rows, cols) = (first.rows(), first.cols());
        for t in &operators {
            if t.cols() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: t.cols(),
                });
            }
            if t.rows() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: t.rows(),
                });
            }
        }
        Ok(Self { operators })
    }

    /// `T_k = ε_k T`.
    pub fn signed(t: &DenseOperator, signs: &[i8]) -> Result<Self> {
        let m = t.matrix();
        Self::new(
            signs
                .iter()
                .map(|&s| {
                    let scaled: Vec<f64> = m.iter().map(|x| f64::from(s) * x).collect();
                    DenseOperator::new(*t.domain(), *t.codomain(), scaled)
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[DenseOperator] {
        &self.operators
    }

    pub fn codomain(&self) -> NormedSpace {
        *self.operators[0].codomain()
    }

    /// `φ'(T_1', ..., T_n')`.
    pub fn adjoint(&self) -> Self {
        Self {
            operators: self.operators.iter().map(DenseOperator::adjoint).collect(),
        }
    }
}

/// `φ(M)(ω) = Σ_{k=1}^n T_k dM_k(ω)`.
pub fn apply_transform(
    phi: &MartingaleTransform,
    m: &dyn MartingaleView,
) -> Result<BochnerFunction> {
    let n = m.depth();
    if phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phi.len(),
        });
    }
    if phi.operators[0].cols() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: phi.operators[0].cols(),
        });
    }
    let out_dim = phi.operators[0].rows();
    let mut diff = vec![0.0; m.dim()];
    let mut img = vec![0.0; out_dim];
    let table = Table::from_fn(n, out_dim, |row, out| {
        for (k, t) in phi.operators.iter().enumerate() {
            m.difference_into(k + 1, row, &mut diff);
            t.apply_into(&diff, &mut img);
            for (o, v) in out.iter_mut().zip(&img) {
                *o += v;
            }
        }
    })?;
    BochnerFunction::new(phi.codomain(), table)
}

/// `E_ω ⟨A(ω), B(ω)⟩`.
pub fn pairing(a: &Table, b: &Table) -> Result<f64> {
    if a.dim() != b.dim() || a.depth() != b.depth() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let terms: Vec<f64> = (0..a.rows()).map(|r| dot(a.row(r), b.row(r))).collect();
    Ok(math::pairwise_sum(&terms) / a.rows() as f64)
}

/// `⟨φ(M), F⟩ - ⟨M, φ'(F)⟩` with `φ'(F) = Σ T_k' dF_k`.
pub fn duality_gap(
    m: &WalshPaleyMartingale,
    f: &BochnerFunction,
    phi: &MartingaleTransform,
) -> Result<f64> {
    let image = apply_transform(phi, m)?;
    let fm = WalshPaleyMartingale::new(*f.space(), f.table().clone())?;
    let back = apply_transform(&phi.adjoint(), &fm)?;
    Ok(pairing(image.table(), f.table())? - pairing(m.terminal(), back.table())?)
}

/// `e(ω)`: the unique index (one-based) in `∩_k supp dM_k^∞(ω)`.
pub fn selector_e(n: usize) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::InvalidArgument("the selector needs n >= 2"));
    }
    dyadic::check_depth(n)?;
    let mut buf = vec![0.0; 1 << n];
    (0..1usize << n)
        .map(|row| {
            let mut common: Option<Vec<usize>> = None;
            for k in 1..=n {
                tent_into(n, k, row, &mut buf);
                let supp: Vec<usize> = (0..buf.len()).filter(|&j| buf[j] != 0.0).collect();
                common = Some(match common {
                    None => supp,
                    Some(c) => c
                        .into_iter()
                        .filter(|j| supp.binary_search(j).is_ok())
                        .collect(),
                });
            }
            match common.as_deref() {
                Some([i]) => Ok(i + 1),
                _ => Err(Error::Internal("support intersection is not a singleton")),
            }
        })
        .collect()
}

/// `μ_n{ω : |⟨dM_k^∞(ω), e(ω)⟩| >= 1/4}` for `k = 1..=n`, exact.
pub fn selector_measures(n: usize) -> Result<Vec<f64>> {
    let e = selector_e(n)?;
    let mut buf = vec![0.0; 1 << n];
    let mut hits = vec![0usize; n];
    for (row, &i) in e.iter().enumerate() {
        for k in 1..=n {
            tent_into(n, k, row, &mut buf);
            if buf[i - 1].abs() >= 0.25 {
                hits[k - 1] += 1;
            }
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| h as f64 / (1usize << n) as f64)
        .collect())
}

/// Summary of the James-tree conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JamesTreeReport {
    pub in_ball: bool,
    pub max_norm: f64,
    pub min_diff: f64,
}

/// Checks `max_{k,ω} ‖M_k(ω)‖ <= 1` and reports `min_{k>=1,ω} ‖dM_k(ω)‖`.
pub fn james_tree_check(m: &dyn MartingaleView) -> JamesTreeReport {
    let n = m.depth();
    let space = m.space();
    let mut buf = vec![0.0; m.dim()];
    let mut max_norm = 0.0f64;
    let mut min_diff = f64::INFINITY;
    for row in 0..1usize << n {
        for k in 0..=n {
            // Levels are constant on blocks; visit each block once.
            if k < n && row & ((1usize << (n - k)) - 1) != 0 {
                continue;
            }
            m.level_into(k, row, &mut buf);
            max_norm = max_norm.max(space.norm(&buf));
            if k >= 1 {
                m.difference_into(k, row, &mut buf);
                min_diff = min_diff.min(space.norm(&buf));
            }
        }
    }
    JamesTreeReport {
        in_ball: max_norm <= 1.0 + 1e-12,
        max_norm,
        min_diff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::summation_operator;

    #[test]
    fn haar_n1() {
        let m = haar_l1(1).unwrap();
        assert_eq!(m.terminal().row(0), &[1.0, 0.0]);
        assert_eq!(m.terminal().row(1), &[0.0, 1.0]);
        let d = m.differences();
        assert_eq!(d[1].row(0), &[0.5, -0.5]);
        assert_eq!(d[1].row(1), &[-0.5, 0.5]);
    }

    #[test]
    fn haar_level_example() {
        let m = haar_l1(2).unwrap();
        assert_eq!(m.level_at(1, 0), &[0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn analytic_haar_matches_table() {
        for n in 1..=6 {
            for w in [
                HaarWitness::new(n).unwrap(),
                HaarWitness::balanced(n).unwrap(),
            ] {
                for w in [w, w.zero_started()] {
                    let t = w.materialize().unwrap();
                    let mut a = vec![0.0; 1 << n];
                    let mut b = vec![0.0; 1 << n];
                    for row in 0..1 << n {
                        for k in 0..=n {
                            w.level_into(k, row, &mut a);
                            t.level_into(k, row, &mut b);
                            assert_eq!(a, b);
                            if k >= 1 {
                                w.difference_into(k, row, &mut a);
                                t.difference_into(k, row, &mut b);
                                assert_eq!(a, b, "n={n} k={k} row={row}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn minf_formula_examples() {
        assert_eq!(
            difference_formula_minf(2, 2, 0).unwrap(),
            vec![0.5, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            difference_formula_minf(2, 1, 0).unwrap(),
            vec![0.25, 0.5, 0.25, 0.0]
        );
        assert_eq!(
            difference_formula_minf(2, 1, 1).unwrap(),
            vec![0.25, 0.5, 0.25, 0.0]
        );
        let a = difference_formula_minf(3, 2, 0b000).unwrap();
        let b = difference_formula_minf(3, 2, 0b010).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
        assert!(difference_formula_minf(3, 0, 0).is_err());
    }

    #[test]
    fn summation_image_matches_formula_exactly() {
        for n in 1..=7 {
            let m = summation_image(n).unwrap();
            let view = SummationImage::new(n).unwrap();
            let mut a = vec![0.0; 1 << n];
            for row in 0..1 << n {
                for k in 1..=n {
                    let f = difference_formula_minf(n, k, row).unwrap();
                    let mut d = vec![0.0; 1 << n];
                    m.difference_into(k, row, &mut d);
                    assert_eq!(d, f);
                    view.difference_into(k, row, &mut a);
                    assert_eq!(a, f);
                }
                for k in 0..=n {
                    view.level_into(k, row, &mut a);
                    assert_eq!(a, m.level_at(k, row));
                }
            }
        }
    }

    #[test]
    fn selector_examples() {
        let e = selector_e(2).unwrap();
        assert_eq!(e[0], 1);
        let d = difference_formula_minf(2, 1, 0).unwrap();
        assert_eq!(d[0], 0.25);
        assert!(selector_e(1).is_err());
        // k = n holds pointwise.
        for n in 2..=8 {
            let e = selector_e(n).unwrap();
            for (row, &i) in e.iter().enumerate() {
                let d = difference_formula_minf(n, n, row).unwrap();
                assert!(d[i - 1].abs() >= 0.25);
            }
        }
    }

    #[test]
    fn james_tree_examples() {
        let r = james_tree_check(&haar_l1(4).unwrap());
        assert!(r.in_ball);
        assert_eq!(r.min_diff, 1.0);
        let r = james_tree_check(&SummationImage::new(4).unwrap());
        assert!(r.in_ball);
        assert_eq!(r.min_diff, 0.5);
        let z = WalshPaleyMartingale::new(NormedSpace::l2(3).unwrap(), Table::zeros(3, 3).unwrap())
            .unwrap();
        let r = james_tree_check(&z);
        assert!(r.in_ball);
        assert_eq!(r.min_diff, 0.0);
    }

    #[test]
    fn transform_identities() {
        let n = 3;
        let space = NormedSpace::l2(2).unwrap();
        let table = Table::from_fn(n, 2, |r, o| {
            o[0] = r as f64;
            o[1] = (r * r) as f64 - 3.0;
        })
        .unwrap();
        let m = WalshPaleyMartingale::new(space, table.clone()).unwrap();
        let id = DenseOperator::identity(space);
        let phi = MartingaleTransform::new(vec![id.clone(); n]).unwrap();
        let out = apply_transform(&phi, &m).unwrap();
        let mut expected = table.clone();
        expected.sub_row(&m.start());
        assert!(out.table().max_abs_diff(&expected) < 1e-12);

        let zero = MartingaleTransform::new(vec![DenseOperator::zero(space, space); n]).unwrap();
        let out = apply_transform(&zero, &m).unwrap();
        assert!(out.table().as_slice().iter().all(|&x| x == 0.0));

        let bad = MartingaleTransform::new(vec![id; n - 1]).unwrap();
        assert!(apply_transform(&bad, &m).is_err());
    }

    #[test]
    fn translation_martingale_of_point_mass_is_haar() {
        for n in 1..=6 {
            let mut f = vec![0.0; 1 << n];
            f[0] = 1.0;
            let m = translation_martingale(&f, NormedSpace::l1(1 << n).unwrap()).unwrap();
            assert_eq!(m, haar_l1(n).unwrap());
        }
    }

    #[test]
    fn translation_martingale_small_cases() {
        let f = [2.0, -1.0];
        let m = translation_martingale(&f, NormedSpace::l1(2).unwrap()).unwrap();
        let mut d = [0.0; 2];
        for row in 0..2 {
            m.difference_into(1, row, &mut d);
            assert_eq!(d[0].abs() + d[1].abs(), 3.0);
        }
        let c = [1.5; 8];
        let m = translation_martingale(&c, NormedSpace::l1(8).unwrap()).unwrap();
        for dk in &m.differences()[1..] {
            assert!(dk.as_slice().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn sigma_levelwise() {
        let n = 4;
        let sigma = summation_operator(1 << n).unwrap();
        let m1 = haar_l1(n).unwrap();
        let mi = summation_image(n).unwrap();
        for row in 0..1 << n {
            for k in 0..=n {
                assert_eq!(sigma.apply(m1.level_at(k, row)), mi.level_at(k, row));
            }
        }
    }
}
