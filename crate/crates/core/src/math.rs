//! Scalar helpers that work without `std`.

use alloc::vec::Vec;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// `|x|^q`, with the cheap cases spelled out.
#[inline]
pub fn abs_pow(x: f64, q: f64) -> f64 {
    let a = x.abs();
    if q == 1.0 {
        a
    } else if q == 2.0 {
        a * a
    } else {
        powf(a, q)
    }
}

/// `x^(1/q)` for `x >= 0`.
#[inline]
pub fn root(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == 2.0 {
        sqrt(x)
    } else {
        powf(x, 1.0 / q)
    }
}

/// Pairwise (tree) summation. The association order depends only on the
/// length of the input, which keeps parallel and serial callers bitwise
/// identical.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Evaluates `f` on `0..count` and returns the results in index order.
/// With the `parallel` feature the evaluations run on the rayon pool.
pub fn map_indices<F>(count: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Like [`map_indices`] for arbitrary `Send` results.
pub fn map_indices_with<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Relative closeness with an absolute floor of `tol` near zero.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
