//! Library results against naive reference computations written from the
//! definitions: full sign enumeration, block averaging by hand, and direct
//! determinant expansion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rumdlab_core::martingales::{haar_l1, summation_image, HaarWitness};
use rumdlab_core::operators::summation_operator;
use rumdlab_core::rademacher::{rademacher_average, wedge, Mode, WEDGE_BUDGET};
use rumdlab_core::rumd::{rumd_ratio, RatioMode};
use rumdlab_core::spaces::lp_norm;
use rumdlab_core::{
    DenseOperator, Exponent, MartingaleView, NormedSpace, Table, WalshPaleyMartingale,
};

fn naive_average(vectors: &[Vec<f64>], p: Exponent, q: f64) -> f64 {
    let k = vectors.len();
    let m = vectors[0].len();
    let mut total = 0.0;
    for signs in 0..1u32 << k {
        let mut s = vec![0.0; m];
        for (j, v) in vectors.iter().enumerate() {
            let e = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
            for (a, b) in s.iter_mut().zip(v) {
                *a += e * b;
            }
        }
        total += lp_norm(&s, p).powf(q);
    }
    (total / f64::from(1u32 << k)).powf(1.0 / q)
}

/// `M_k` at `row`: mean of the terminal rows that share the first `k` bits.
fn naive_level(t: &Table, k: usize, row: usize) -> Vec<f64> {
    let n = t.depth();
    let shift = n - k;
    let mut acc = vec![0.0; t.dim()];
    let mut count = 0.0;
    for r in 0..t.rows() {
        if r >> shift == row >> shift {
            for (a, b) in acc.iter_mut().zip(t.row(r)) {
                *a += b;
            }
            count += 1.0;
        }
    }
    acc.iter().map(|a| a / count).collect()
}

fn naive_ratio(m: &WalshPaleyMartingale, t: &DenseOperator, q: f64) -> f64 {
    let table = m.terminal();
    let n = table.depth();
    let p_out = t.codomain().p();
    let mut num = 0.0;
    let mut den = 0.0;
    let start = naive_level(table, 0, 0);
    for row in 0..table.rows() {
        let diffs: Vec<Vec<f64>> = (1..=n)
            .map(|k| {
                let a = naive_level(table, k, row);
                let b = naive_level(table, k - 1, row);
                let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                t.apply(&d)
            })
            .collect();
        num += naive_average(&diffs, p_out, q).powf(q);
        let centered: Vec<f64> = table
            .row(row)
            .iter()
            .zip(&start)
            .map(|(x, s)| x - s)
            .collect();
        den += lp_norm(&centered, m.space().p()).powf(q);
    }
    (num / den).powf(1.0 / q)
}

fn random_martingale(rng: &mut ChaCha8Rng, n: usize, space: NormedSpace) -> WalshPaleyMartingale {
    let data = (0..space.dim() << n)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    WalshPaleyMartingale::new(space, Table::new(n, space.dim(), data).unwrap()).unwrap()
}

#[test]
fn rademacher_average_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        let exp = if p.is_infinite() {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        };
        let space = NormedSpace::new(exp, 5).unwrap();
        for k in 1..=7 {
            let vs: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            for q in [1.0, 2.0, 3.5] {
                let got = rademacher_average(&vs, &space, q, Mode::default())
                    .unwrap()
                    .value;
                let want = naive_average(&vs, exp, q);
                assert!(
                    (got - want).abs() <= 1e-12 * want.max(1.0),
                    "p={p} k={k} q={q}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn rumd_ratio_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (space, n) in [
        (NormedSpace::l1(3).unwrap(), 3),
        (NormedSpace::l2(2).unwrap(), 4),
        (NormedSpace::linf(4).unwrap(), 3),
        (NormedSpace::lp(2.5, 3).unwrap(), 2),
    ] {
        let m = random_martingale(&mut rng, n, space);
        let id = DenseOperator::identity(space);
        for q in [1.0, 2.0, 3.0] {
            let got = rumd_ratio(&m, &id, q, RatioMode::exact()).unwrap().value;
            let want = naive_ratio(&m, &id, q);
            assert!(
                (got - want).abs() < 1e-11 * want,
                "{space} q={q}: {got} vs {want}"
            );
        }
    }
    let s = summation_operator(8).unwrap();
    let m = random_martingale(&mut rng, 3, NormedSpace::l1(8).unwrap());
    let got = rumd_ratio(&m, &s, 2.0, RatioMode::exact()).unwrap().value;
    assert!((got - naive_ratio(&m, &s, 2.0)).abs() < 1e-11);
}

#[test]
fn analytic_witnesses_match_their_tables() {
    for n in 2..=5 {
        let id = DenseOperator::identity(NormedSpace::l1(1 << n).unwrap());
        for view in [
            HaarWitness::new(n).unwrap().zero_started(),
            HaarWitness::balanced(n).unwrap(),
        ] {
            let table = view.materialize().unwrap();
            let a = rumd_ratio(&view, &id, 1.0, RatioMode::exact())
                .unwrap()
                .value;
            let b = naive_ratio(&table, &id, 1.0);
            assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn unit_vector_martingale_levels_are_block_indicators() {
    // M_k(ω) is the uniform average of e_j over the block of ω.
    let n = 5;
    let m = haar_l1(n).unwrap();
    for k in 0..=n {
        for row in 0..1 << n {
            let got = m.level_at(k, row);
            let want = naive_level(m.terminal(), k, row);
            assert_eq!(got, &want[..]);
            let size = 1usize << (n - k);
            let block = row >> (n - k) << (n - k);
            for (j, &x) in got.iter().enumerate() {
                let inside = j >= block && j < block + size;
                assert_eq!(x, if inside { 1.0 / size as f64 } else { 0.0 });
            }
        }
    }
}

#[test]
fn summation_image_is_the_mapped_unit_vector_martingale() {
    let n = 4;
    let s = summation_operator(1 << n).unwrap();
    let mapped = haar_l1(n).unwrap().map(&s).unwrap();
    let direct = summation_image(n).unwrap();
    assert!(mapped.terminal().max_abs_diff(direct.terminal()) == 0.0);
}

fn det(a: &[Vec<f64>]) -> f64 {
    // Laplace expansion along the first row.
    let k = a.len();
    if k == 1 {
        return a[0][0];
    }
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<f64>> = a[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * a[0][j] * det(&minor)
        })
        .sum()
}

/// `sup |det(⟨x_i, f_j⟩)|` over dual extreme points `f_j ∈ {±1}^m` (the
/// dual ball of `l_1^m`).
fn naive_l1_wedge(xs: &[Vec<f64>]) -> f64 {
    let k = xs.len();
    let m = xs[0].len();
    let signs: Vec<Vec<f64>> = (0..1u32 << m)
        .map(|b| {
            (0..m)
                .map(|i| if b >> i & 1 == 1 { -1.0 } else { 1.0 })
                .collect()
        })
        .collect();
    let mut best: f64 = 0.0;
    let mut choice = vec![0usize; k];
    loop {
        let mat: Vec<Vec<f64>> = xs
            .iter()
            .map(|x| {
                choice
                    .iter()
                    .map(|&c| x.iter().zip(&signs[c]).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect();
        best = best.max(det(&mat).abs());
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            choice[i] += 1;
            if choice[i] < signs.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn l1_wedge_matches_dual_extreme_point_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let space = NormedSpace::l1(3).unwrap();
    for k in 1..=3 {
        for _ in 0..4 {
            let xs: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let w = wedge(&xs, &space, WEDGE_BUDGET).unwrap();
            assert!(w.exact);
            let want = naive_l1_wedge(&xs);
            assert!(
                (w.value - want).abs() < 1e-12 * want.max(1.0),
                "k={k}: {} vs {want}",
                w.value
            );
        }
    }
}

#[test]
fn l2_wedge_is_the_volume() {
    let space = NormedSpace::l2(3).unwrap();
    let xs = vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 3.0]];
    // |x ∧ y| = |x × y| in R^3.
    let cross = [2.0 * 3.0 - 0.0, -(3.0 - 0.0), 1.0];
    let want = cross.iter().map(|c: &f64| c * c).sum::<f64>().sqrt();
    let w = wedge(&xs, &space, WEDGE_BUDGET).unwrap();
    assert!((w.value - want).abs() < 1e-12);
}
