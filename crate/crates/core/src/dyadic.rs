//! The uniform probability space on `{-1, 1}^n`, its coordinate filtration,
//! the index bijection `i(ω)` and dyadic blocks.
//!
//! A point `ω` is stored as an `n`-bit integer. Bit `j` counted from the
//! most significant of the `n` bits holds `ω_{j+1}`, with bit value 0 for
//! the sign `+1` and 1 for `-1`. With this layout `i(ω) = bits + 1`, and
//! the points sharing a prefix `(ω_1, ..., ω_k)` form one contiguous run
//! of storage rows.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::spaces::NormedSpace;
use crate::MAX_DEPTH;

pub(crate) fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::DepthOutOfRange {
            depth,
            max: MAX_DEPTH,
        });
    }
    Ok(())
}

/// A sign vector `ω ∈ {-1, 1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    depth: usize,
    bits: usize,
}

impl DyadicPoint {
    pub fn new(depth: usize, bits: usize) -> Result<Self> {
        check_depth(depth)?;
        if bits >> depth != 0 {
            return Err(Error::InvalidArgument("point index out of range"));
        }
        Ok(Self { depth, bits })
    }

    /// Builds `ω` from signs `±1`. Any nonnegative entry counts as `+1`.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        check_depth(signs.len())?;
        let bits = signs
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s < 0));
        Ok(Self {
            depth: signs.len(),
            bits,
        })
    }

    /// The all-`+1` point.
    pub fn ones(depth: usize) -> Result<Self> {
        Self::new(depth, 0)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Storage row of the point, `i(ω) - 1`.
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// `ω_j` for `1 <= j <= n`.
    pub fn sign(&self, j: usize) -> i8 {
        debug_assert!(j >= 1 && j <= self.depth);
        omega(self.bits, self.depth, j)
    }

    pub fn signs(&self) -> Vec<i8> {
        (1..=self.depth).map(|j| self.sign(j)).collect()
    }

    /// The interval `I(ω_1, ..., ω_k)` containing this point.
    pub fn prefix(&self, k: usize) -> DyadicInterval {
        debug_assert!(k <= self.depth);
        DyadicInterval {
            depth: self.depth,
            len: k,
            bits: self.bits >> (self.depth - k),
        }
    }
}

/// `ω_j` of the point stored at row `bits` of a depth-`depth` table.
#[inline]
pub fn omega(bits: usize, depth: usize, j: usize) -> i8 {
    if (bits >> (depth - j)) & 1 == 0 {
        1
    } else {
        -1
    }
}

/// `i(ω) = 1 + Σ_j (1 - ω_j)/2 · 2^{n-j}`.
pub fn index_of(point: &DyadicPoint) -> usize {
    point.bits + 1
}

/// Inverse of [`index_of`].
pub fn omega_of(depth: usize, index: usize) -> Result<DyadicPoint> {
    if index == 0 {
        return Err(Error::InvalidArgument("indices start at 1"));
    }
    DyadicPoint::new(depth, index - 1)
}

/// The dyadic block `I(ω_1, ..., ω_k)` of a depth-`n` cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    depth: usize,
    len: usize,
    bits: usize,
}

impl DyadicInterval {
    pub fn new(depth: usize, prefix: &[i8]) -> Result<Self> {
        check_depth(depth)?;
        if prefix.len() > depth {
            return Err(Error::LevelOutOfRange {
                level: prefix.len(),
                depth,
            });
        }
        let bits = prefix
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | usize::from(s < 0));
        Ok(Self {
            depth,
            len: prefix.len(),
            bits,
        })
    }

    /// `I_0`, the whole index set.
    pub fn root(depth: usize) -> Result<Self> {
        Self::new(depth, &[])
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of fixed signs `k`.
    pub fn level(&self) -> usize {
        self.len
    }

    pub fn prefix_signs(&self) -> Vec<i8> {
        (1..=self.len)
            .map(|j| omega(self.bits, self.len, j))
            .collect()
    }

    /// Zero-based storage rows covered by the block.
    pub fn rows(&self) -> Range<usize> {
        let width = 1usize << (self.depth - self.len);
        let start = self.bits * width;
        start..start + width
    }

    pub fn size(&self) -> usize {
        1usize << (self.depth - self.len)
    }

    /// The two halves `I(..., 1)` and `I(..., -1)`.
    pub fn children(&self) -> Option<(Self, Self)> {
        if self.len == self.depth {
            return None;
        }
        let child = |b: usize| Self {
            depth: self.depth,
            len: self.len + 1,
            bits: (self.bits << 1) | b,
        };
        Some((child(0), child(1)))
    }

    /// The block obtained by flipping the last fixed sign.
    pub fn sibling(&self) -> Option<Self> {
        if self.len == 0 {
            return None;
        }
        Some(Self {
            bits: self.bits ^ 1,
            ..*self
        })
    }
}

/// One-based indices `{ i(ω_1, ..., ω_k, τ_{k+1}, ..., τ_n) }`, ascending.
pub fn interval_indices(interval: &DyadicInterval) -> Vec<usize> {
    interval.rows().map(|r| r + 1).collect()
}

/// A function `Ω_n → R^m` stored as `2^n` rows of `m` values in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    depth: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Table {
    pub fn new(depth: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        check_depth(depth)?;
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != dim << depth {
            return Err(Error::TableShape {
                depth,
                dim,
                got: data.len(),
            });
        }
        Ok(Self { depth, dim, data })
    }

    pub fn zeros(depth: usize, dim: usize) -> Result<Self> {
        check_depth(depth)?;
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            depth,
            dim,
            data: vec![0.0; dim << depth],
        })
    }

    /// Tabulates `f(row, out)` over all points.
    pub fn from_fn<F>(depth: usize, dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &mut [f64]),
    {
        let mut table = Self::zeros(depth, dim)?;
        for (row, out) in table.data.chunks_exact_mut(dim).enumerate() {
            f(row, out);
        }
        Ok(table)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        1usize << self.depth
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn at(&self, point: &DyadicPoint) -> &[f64] {
        self.row(point.bits())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Average of all rows, `E_ω M(ω)`.
    pub fn mean(&self) -> Vec<f64> {
        block_means(self, 0).into_iter().next().unwrap_or_default()
    }

    pub fn sub_row(&mut self, v: &[f64]) {
        for row in self.data.chunks_exact_mut(self.dim) {
            for (x, y) in row.iter_mut().zip(v) {
                *x -= y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn max_abs_diff(&self, other: &Table) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| f64::max(acc, (a - b).abs()))
    }
}

/// Block averages at level `k`: `2^k` rows, row `p` holding the mean of the
/// block whose first `k` signs are encoded by `p`.
pub fn block_means(table: &Table, k: usize) -> Vec<Vec<f64>> {
    let width = 1usize << (table.depth - k);
    let inv = 1.0 / width as f64;
    (0..1usize << k)
        .map(|p| {
            let mut acc = vec![0.0; table.dim];
            for r in p * width..(p + 1) * width {
                for (a, x) in acc.iter_mut().zip(table.row(r)) {
                    *a += x;
                }
            }
            acc.iter_mut().for_each(|a| *a *= inv);
            acc
        })
        .collect()
}

/// Coarsens level-`k+1` block means to level `k` by averaging sibling pairs.
pub(crate) fn coarsen(fine: &[f64], dim: usize) -> Vec<f64> {
    let rows = fine.len() / dim;
    let mut out = vec![0.0; fine.len() / 2];
    for p in 0..rows / 2 {
        let a = &fine[2 * p * dim..(2 * p + 1) * dim];
        let b = &fine[(2 * p + 1) * dim..(2 * p + 2) * dim];
        for ((o, x), y) in out[p * dim..(p + 1) * dim].iter_mut().zip(a).zip(b) {
            *o = 0.5 * (x + y);
        }
    }
    out
}

/// All block-mean levels `0..=n`, level `k` flattened with `2^k` rows.
/// Built by repeated pairwise averaging from the terminal table, `O(2^n m)`.
pub(crate) fn all_levels(table: &Table) -> Vec<Vec<f64>> {
    let mut levels = vec![Vec::new(); table.depth + 1];
    levels[table.depth] = table.data.clone();
    for k in (0..table.depth).rev() {
        levels[k] = coarsen(&levels[k + 1], table.dim);
    }
    levels
}

/// `E(M | F_k)` expanded back to a full table.
pub fn conditional_expectation(table: &Table, k: usize) -> Result<Table> {
    if k > table.depth {
        return Err(Error::LevelOutOfRange {
            level: k,
            depth: table.depth,
        });
    }
    let mut out = table.clone();
    // Pairwise averaging over the n - k trailing sign bits.
    for bit in 0..table.depth - k {
        let stride = 1usize << bit;
        let dim = table.dim;
        for base in (0..table.rows()).step_by(2 * stride) {
            for r in base..base + stride {
                let (lo, hi) = out.data.split_at_mut((r + stride) * dim);
                let a = &mut lo[r * dim..(r + 1) * dim];
                let b = &mut hi[..dim];
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let m = 0.5 * (*x + *y);
                    *x = m;
                    *y = m;
                }
            }
        }
    }
    Ok(out)
}

/// The difference sequence `[dM_0, ..., dM_n]` of the martingale closed by
/// `table`, each expanded to a full table.
pub fn differences(table: &Table) -> Vec<Table> {
    let levels = all_levels(table);
    let n = table.depth;
    let dim = table.dim;
    (0..=n)
        .map(|k| {
            Table::from_fn(n, dim, |row, out| {
                let cur = &levels[k][(row >> (n - k)) * dim..][..dim];
                if k == 0 {
                    out.copy_from_slice(cur);
                } else {
                    let prev = &levels[k - 1][(row >> (n - k + 1)) * dim..][..dim];
                    for ((o, c), p) in out.iter_mut().zip(cur).zip(prev) {
                        *o = c - p;
                    }
                }
            })
            .expect("shape inherited from a valid table")
        })
        .collect()
}

/// `M_k^*(ω) = max_{0 <= l <= k} ‖M_l(ω)‖`.
pub fn maximal_function(
    table: &Table,
    space: &NormedSpace,
    k: usize,
    point: &DyadicPoint,
) -> Result<f64> {
    if k > table.depth {
        return Err(Error::LevelOutOfRange {
            level: k,
            depth: table.depth,
        });
    }
    if space.dim() != table.dim {
        return Err(Error::DimensionMismatch {
            expected: table.dim,
            got: space.dim(),
        });
    }
    let n = table.depth;
    Ok((0..=k)
        .map(|l| {
            let block = point.prefix(l).rows();
            let mut acc = vec![0.0; table.dim];
            for r in block.clone() {
                for (a, x) in acc.iter_mut().zip(table.row(r)) {
                    *a += x;
                }
            }
            let inv = 1.0 / (1usize << (n - l)) as f64;
            acc.iter_mut().for_each(|a| *a *= inv);
            space.norm(&acc)
        })
        .fold(0.0, f64::max))
}
