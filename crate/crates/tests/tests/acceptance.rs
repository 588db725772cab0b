//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Reference values are recomputed here from closed forms
//! or by brute force wherever that is feasible.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rumdlab_core::martingales::{
    selector_measures, translation_martingale, HaarWitness, SummationImage,
};
use rumdlab_core::operators::summation_operator;
use rumdlab_core::rademacher::{doob_type2_bound, type_constant_lower};
use rumdlab_core::rumd::{
    minf_double_average, minf_fraction_above, pointwise_averages, pq_equivalence_probe,
    rumd1_scalar_probe, rumd_lower, rumd_ratio, RatioMode, Strategy,
};
use rumdlab_core::suites::{
    block_wedge_checks, constant_path_checks, duality_checks, selector_checks,
    summation_norm_checks, summing_bound_checks, unit_vector_checks, Check,
};
use rumdlab_core::{
    DenseOperator, Exponent, MartingaleView, NormedSpace, Table, WalshPaleyMartingale,
};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Least-squares slope of `log y` on `log x`, computed independently of the
/// library fit.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn fit(points: &[(f64, f64)]) -> f64 {
    let lib = rumdlab_core::rumd::growth_exponent(points).unwrap().slope;
    let own = loglog_slope(points);
    assert!((lib - own).abs() < 1e-12, "slope mismatch {lib} vs {own}");
    lib
}

// Closed forms: M^1_k(ω) is 2^{k-n} on the level-k block of ω, and
// M^∞_k(ω) is its running sum.
fn m1_level(n: usize, k: usize, row: usize) -> Vec<f64> {
    let size = 1usize << (n - k);
    let start = row >> (n - k) << (n - k);
    let mut v = vec![0.0; 1 << n];
    for x in &mut v[start..start + size] {
        *x = 1.0 / size as f64;
    }
    v
}

fn minf_level(n: usize, k: usize, row: usize) -> Vec<f64> {
    let mut acc = 0.0;
    m1_level(n, k, row)
        .into_iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn c1_norm_identities() -> Outcome {
    let mut suites_ok = true;
    let mut mismatches = 0usize;
    for n in 1..=12 {
        suites_ok &= all_pass(&unit_vector_checks(n).unwrap());
        suites_ok &= all_pass(&summation_norm_checks(n).unwrap());
        let h = HaarWitness::new(n).unwrap();
        let s = SummationImage::new(n).unwrap();
        mismatches += (0..1usize << n)
            .into_par_iter()
            .map(|row| {
                let mut bad = 0;
                let mut buf = vec![0.0; 1 << n];
                for k in 0..=n {
                    let a = m1_level(n, k, row);
                    let b = minf_level(n, k, row);
                    h.level_into(k, row, &mut buf);
                    bad += usize::from(buf != a || l1(&a) != 1.0);
                    s.level_into(k, row, &mut buf);
                    bad += usize::from(buf != b || linf(&b) != 1.0);
                    if k >= 1 {
                        let da = sub(&a, &m1_level(n, k - 1, row));
                        let db = sub(&b, &minf_level(n, k - 1, row));
                        h.difference_into(k, row, &mut buf);
                        bad += usize::from(buf != da || l1(&da) != 1.0);
                        s.difference_into(k, row, &mut buf);
                        bad += usize::from(buf != db || linf(&db) != 0.5);
                    }
                }
                bad
            })
            .sum::<usize>();
    }
    Outcome::new(
        suites_ok && mismatches == 0,
        format!(
            "n=1..12, suites {}, {mismatches} mismatches against closed forms",
            if suites_ok { "pass" } else { "fail" }
        ),
    )
}

fn c2_selector_measure() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut agree = true;
    for n in 2..=12 {
        let lib = selector_measures(n).unwrap();
        let ok = all_pass(&selector_checks(n).unwrap());
        // e(ω) is the one index in the support of every dM_k^∞(ω).
        let hits: Vec<Vec<usize>> = (0..1usize << n)
            .into_par_iter()
            .map(|row| {
                let diffs: Vec<Vec<f64>> = (1..=n)
                    .map(|k| sub(&minf_level(n, k, row), &minf_level(n, k - 1, row)))
                    .collect();
                let common: Vec<usize> = (0..1 << n)
                    .filter(|&j| diffs.iter().all(|d| d[j] != 0.0))
                    .collect();
                assert_eq!(common.len(), 1, "n={n} row={row}");
                diffs
                    .iter()
                    .map(|d| usize::from(d[common[0]].abs() >= 0.25))
                    .collect()
            })
            .collect();
        for k in 0..n {
            let m = hits.iter().map(|h| h[k]).sum::<usize>() as f64 / (1usize << n) as f64;
            agree &= m == lib[k];
            worst = worst.min(m);
        }
        agree &= ok;
    }
    Outcome::new(
        agree && worst >= 0.5,
        format!("n=2..12, min measure {worst}, library agrees: {agree}"),
    )
}

fn c3_constant_path() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 1..=13 {
        let checks = constant_path_checks(n).unwrap();
        ok &= all_pass(&checks);
        worst = worst.max(checks[0].value);
        if n <= 10 {
            let d: Vec<Vec<f64>> = (1..=n)
                .map(|k| sub(&minf_level(n, k, 0), &minf_level(n, k - 1, 0)))
                .collect();
            let brute = (0..1u32 << n)
                .into_par_iter()
                .map(|signs| {
                    let mut s = vec![0.0; 1 << n];
                    for (k, v) in d.iter().enumerate() {
                        let e = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                        for (a, b) in s.iter_mut().zip(v) {
                            *a += e * b;
                        }
                    }
                    linf(&s)
                })
                .reduce(|| 0.0, f64::max);
            ok &= brute == checks[0].value;
        }
    }
    Outcome::new(ok && worst <= 2.0, format!("n=1..13, max over ε {worst}"))
}

fn c4_duality() -> Outcome {
    let checks = duality_checks(6, 500, 1).unwrap();
    let worst = checks.iter().map(|c| c.value).fold(0.0, f64::max);
    Outcome::new(
        all_pass(&checks),
        format!("500 instances, max gap {worst:e}"),
    )
}

fn c5_block_wedge() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let checks = block_wedge_checks(n, 2).unwrap();
        ok &= all_pass(&checks);
        worst = worst.max(checks[0].value);
    }
    Outcome::new(
        ok,
        format!("n=1..3, l1 and linf, exact mode, max relative gap {worst:e}"),
    )
}

fn c6_summing_bound() -> Outcome {
    let checks = summing_bound_checks(4, 100, 3).unwrap();
    Outcome::new(
        all_pass(&checks),
        format!(
            "100 operators, {} violations, max wedge/bound {}",
            checks[0].value, checks[1].value
        ),
    )
}

fn c7_linear_growth() -> Outcome {
    let mut inf_series = Vec::new();
    for n in 4..=14 {
        let id = DenseOperator::identity(NormedSpace::l1(1 << n).unwrap());
        let avgs = pointwise_averages(&HaarWitness::new(n).unwrap(), &id, 1.0).unwrap();
        let inf = avgs.iter().copied().fold(f64::INFINITY, f64::min);
        inf_series.push((n as f64, inf));
    }
    // Brute-force reference at small n.
    let mut brute_ok = true;
    for n in 4..=7 {
        let brute = (0..1usize << n)
            .map(|row| {
                let d: Vec<Vec<f64>> = (1..=n)
                    .map(|k| sub(&m1_level(n, k, row), &m1_level(n, k - 1, row)))
                    .collect();
                let total: f64 = (0..1u32 << n)
                    .map(|signs| {
                        let mut s = vec![0.0; 1 << n];
                        for (k, v) in d.iter().enumerate() {
                            let e = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                            for (a, b) in s.iter_mut().zip(v) {
                                *a += e * b;
                            }
                        }
                        l1(&s)
                    })
                    .sum();
                total / f64::from(1u32 << n)
            })
            .fold(f64::INFINITY, f64::min);
        brute_ok &= (brute - inf_series[n - 4].1).abs() < 1e-12;
    }
    let slope1 = fit(&inf_series);
    let alpha = inf_series
        .iter()
        .map(|&(n, v)| v / n)
        .fold(f64::INFINITY, f64::min);
    let mut lower = Vec::new();
    for n in 2..=10 {
        let id = DenseOperator::identity(NormedSpace::l1(1 << n).unwrap());
        let e = rumd_lower(&id, n, 2.0, Strategy::default()).unwrap();
        lower.push((n as f64, e.lower));
    }
    let slope2 = fit(&lower);
    let pass1 = (0.9..=1.1).contains(&slope1);
    let pass2 = slope2 >= 0.85;
    let values: Vec<String> = inf_series.iter().map(|p| format!("{}", p.1)).collect();
    Outcome::new(
        pass1 && pass2 && brute_ok,
        format!(
            "inf_ω average slope {slope1:.4} over n=4..14 ({}; values [{}]; fitted α = min inf/n = {alpha:.4}); lower-bound slope {slope2:.4} over n=2..10 ({}); brute force agrees: {brute_ok}",
            if pass1 { "in [0.9, 1.1]" } else { "outside [0.9, 1.1]" },
            values.join(", "),
            if pass2 { ">= 0.85" } else { "< 0.85" },
        ),
    )
}

fn c8_sqrt_growth() -> Outcome {
    let mut series = Vec::new();
    let mut bounded = true;
    let mut notes = Vec::new();
    for n in 4..=12 {
        let t = summation_operator(1 << n).unwrap();
        let e = rumd_lower(&t, n, 2.0, Strategy::default()).unwrap();
        let cap = 4.0 * (n as f64).sqrt();
        bounded &= e.lower <= e.upper.value && e.upper.value <= cap + 1e-12;
        let best_canonical = e
            .candidates
            .iter()
            .filter(|c| c.method.tag().starts_with("canonical"))
            .map(|c| c.ratio.value)
            .fold(0.0, f64::max);
        notes.push(format!(
            "n={n}: {} ({}), best canonical {best_canonical:.4}",
            e.lower, e.lower_method
        ));
        series.push((n as f64, e.lower));
    }
    let slope = fit(&series);
    let in_band = (0.4..=0.6).contains(&slope);
    // Empirical (α, β): α is the smallest median of
    // E_ε‖Σ ε_k dM_k^∞(ω)‖ / √n over the depths, β the smallest fraction of
    // points at or above α√n.
    let per_depth: Vec<(usize, Vec<f64>)> = (4..=12)
        .map(|n| {
            let id = DenseOperator::identity(NormedSpace::linf(1 << n).unwrap());
            (
                n,
                pointwise_averages(&SummationImage::new(n).unwrap(), &id, 1.0).unwrap(),
            )
        })
        .collect();
    let alpha = per_depth
        .iter()
        .map(|(n, v)| median(v.clone()) / (*n as f64).sqrt())
        .fold(f64::INFINITY, f64::min);
    let beta = per_depth
        .iter()
        .map(|(n, v)| minf_fraction_above(v, *n, alpha))
        .fold(f64::INFINITY, f64::min);
    notes.push(format!("fitted (α, β) = ({alpha:.4}, {beta:.4})"));
    Outcome::new(
        in_band && bounded,
        format!(
            "slope {slope:.4} ({}), all lower <= upper <= 4√n: {bounded}; {}",
            if in_band {
                "in [0.4, 0.6]"
            } else {
                "outside [0.4, 0.6]"
            },
            notes.join("; ")
        ),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

fn c9_signed_absolute() -> Outcome {
    let mut worst = 0.0f64;
    let mut brute_ok = true;
    for n in 1..=8 {
        let a = minf_double_average(n, false).unwrap();
        let b = minf_double_average(n, true).unwrap();
        worst = worst.max((a - b).abs());
        if n <= 5 {
            let mut total = [0.0f64; 2];
            for row in 0..1usize << n {
                let d: Vec<Vec<f64>> = (1..=n)
                    .map(|k| sub(&minf_level(n, k, row), &minf_level(n, k - 1, row)))
                    .collect();
                for signs in 0..1u32 << n {
                    for (slot, absolute) in [(0, false), (1, true)] {
                        let mut s = vec![0.0; 1 << n];
                        for (k, v) in d.iter().enumerate() {
                            let e = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                            for (x, y) in s.iter_mut().zip(v) {
                                *x += e * if absolute { y.abs() } else { *y };
                            }
                        }
                        total[slot] += linf(&s).powi(2);
                    }
                }
            }
            let scale = f64::from(1u32 << n) * (1usize << n) as f64;
            brute_ok &= ((total[0] / scale).sqrt() - a).abs() < 1e-12;
            brute_ok &= ((total[1] / scale).sqrt() - b).abs() < 1e-12;
        }
    }
    Outcome::new(
        worst <= 1e-12 && brute_ok,
        format!("n=1..8, max |signed - absolute| {worst:e}, brute force agrees: {brute_ok}"),
    )
}

fn c10_scalar_q1() -> Outcome {
    let mut series = Vec::new();
    let mut point_mass = Vec::new();
    let mut within = true;
    for n in 2..=12 {
        let p = rumd1_scalar_probe(n).unwrap();
        within &= p.point_mass <= 2.0 * n as f64 && p.antipodal <= 2.0 * n as f64;
        series.push((n as f64, p.value));
        point_mass.push((n as f64, p.point_mass));
    }
    // Random translation martingales in l_1(Ω_n).
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let space = NormedSpace::l1(1 << n).unwrap();
        let id = DenseOperator::identity(space);
        for _ in 0..5 {
            let f: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = translation_martingale(&f, space).unwrap();
            let r = rumd_ratio(&m, &id, 1.0, RatioMode::exact()).unwrap().value;
            worst = worst.max(r / (2.0 * n as f64));
        }
    }
    within &= worst <= 1.0;
    let slope = fit(&series);
    let chi = fit(&point_mass);
    let in_band = (0.9..=1.1).contains(&slope);
    Outcome::new(
        in_band && within,
        format!(
            "slope {slope:.4} ({}; point-mass witness alone {chi:.4}), max witness ratio / 2n {worst:.4}",
            if in_band { "in [0.9, 1.1]" } else { "outside [0.9, 1.1]" }
        ),
    )
}

fn c11_type2() -> Outcome {
    let mut worst = 0.0f64;
    let mut analytic = true;
    for big_n in [2usize, 4, 8, 16, 32, 64] {
        let t = summation_operator(big_n).unwrap();
        analytic &= doob_type2_bound(&t) == Some(2.0);
        for n in 1..=8 {
            let e = type_constant_lower(&t, 2.0, n, 1_000_000, 11).unwrap();
            worst = worst.max(e.lower);
            analytic &= e.upper == Some(2.0);
        }
    }
    Outcome::new(
        worst <= 2.0 * (1.0 + 1e-6) && analytic,
        format!("N in 2..64, n=1..8, best ratio found {worst:.6}, analytic bound 2 reported: {analytic}"),
    )
}

fn c12_depth_one() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let dim = rng.gen_range(1..=6);
        let p = match i % 4 {
            0 => Exponent::Finite(1.0),
            1 => Exponent::Finite(2.0),
            2 => Exponent::Finite(rng.gen_range(1.1..8.0)),
            _ => Exponent::Infinity,
        };
        let space = NormedSpace::new(p, dim).unwrap();
        let data: Vec<f64> = (0..2 * dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let m = WalshPaleyMartingale::new(space, Table::new(1, dim, data).unwrap()).unwrap();
        let q = rng.gen_range(1.0..5.0);
        let r = rumd_ratio(&m, &DenseOperator::identity(space), q, RatioMode::exact()).unwrap();
        worst = worst.max((r.value - 1.0).abs());
    }
    for s in ["l1:3", "l2:4", "l3.5:2", "linf:5"] {
        let space: NormedSpace = s.parse().unwrap();
        let e = rumd_lower(&DenseOperator::identity(space), 1, 2.0, Strategy::default()).unwrap();
        worst = worst.max((e.lower - 1.0).abs());
    }
    Outcome::new(
        worst <= 1e-12,
        format!("100 random witnesses and 4 searches, max |ratio - 1| {worst:e}"),
    )
}

fn c13_pq_probe() -> Outcome {
    let mut factors = Vec::new();
    let mut ok = true;
    for summation in [false, true] {
        for balanced in [false, true] {
            let mut vals = Vec::new();
            for n in [4usize, 12] {
                let t = if summation {
                    summation_operator(1 << n).unwrap()
                } else {
                    DenseOperator::identity(NormedSpace::l1(1 << n).unwrap())
                };
                let w = if balanced {
                    HaarWitness::balanced(n).unwrap()
                } else {
                    HaarWitness::new(n).unwrap().zero_started()
                };
                let probe =
                    pq_equivalence_probe(&t, n, 2.0, 3.0, &[&w], RatioMode::exact()).unwrap();
                vals.push(probe.ratios[0]);
            }
            let f = (vals[0] / vals[1]).max(vals[1] / vals[0]);
            ok &= f < 2.0;
            let name = match (summation, balanced) {
                (false, false) => "m1",
                (false, true) => "m1_balanced",
                (true, false) => "minf",
                (true, true) => "minf_balanced",
            };
            factors.push(format!("{name} {:.4} -> {:.4} (x{f:.3})", vals[0], vals[1]));
        }
    }
    Outcome::new(
        ok,
        format!(
            "p=2, r=3, n=4 vs n=12: {}; consistency evidence only",
            factors.join(", ")
        ),
    )
}

/// Every output path of the command line, rendered to bytes.
fn outputs() -> Vec<String> {
    use rumdlab::commands::{estimate, render_sweep_csv, render_sweep_json, sweep, verify, Target};
    use rumdlab::config::{OperatorSpec, RunConfig};
    use rumdlab_core::suites::Suite;

    let mut out = Vec::new();
    let mut c = RunConfig::new("sweep", "4..7".parse().unwrap());
    c.budget = 20_000;
    c.seed = 5;
    out.push(render_sweep_csv(&sweep(Target::SigmaN, &c).unwrap(), &c).unwrap());
    let mut c = RunConfig::new("sweep", "2..6".parse().unwrap());
    c.budget = 20_000;
    out.push(render_sweep_json(&sweep(Target::L1, &c).unwrap(), &c).unwrap());
    let mut c = RunConfig::new("estimate", "5".parse().unwrap());
    c.operator = Some(OperatorSpec::from_op("sigma:32").unwrap());
    c.budget = 50_000;
    c.seed = 9;
    out.push(serde_json::to_string(&estimate(&c, None).unwrap()).unwrap());
    // Sampled path: n = 6 beyond an exact cap of 3.
    let mut c = RunConfig::new("estimate", "6".parse().unwrap());
    c.operator = Some(OperatorSpec::from_space("l1:64").unwrap());
    c.budget = 0;
    c.exact_cap = 3;
    c.samples = 20_000;
    out.push(serde_json::to_string(&estimate(&c, None).unwrap()).unwrap());
    out.push(serde_json::to_string(&verify(Suite::DualityGap, None, 4).unwrap()).unwrap());
    out
}

fn c14_determinism() -> Outcome {
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(outputs)
    };
    let a = in_pool(1);
    let b = in_pool(4);
    let c = in_pool(4);
    let identical = (0..a.len())
        .filter(|&i| a[i] == b[i] && b[i] == c[i])
        .count();
    Outcome::new(
        identical == a.len(),
        format!(
            "{identical}/{} outputs byte-identical across 3 runs on 1 and 4 threads",
            a.len()
        ),
    )
}

type Criterion = (usize, &'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 14] = [
        (
            1,
            "exact norm identities",
            c1_norm_identities,
            Some(Duration::from_secs(30)),
        ),
        (
            2,
            "selector measure bound",
            c2_selector_measure,
            Some(Duration::from_secs(60)),
        ),
        (3, "constant path sum", c3_constant_path, None),
        (4, "transform duality", c4_duality, None),
        (5, "block wedge identity", c5_block_wedge, None),
        (6, "wedge vs 2-summing bound", c6_summing_bound, None),
        (
            7,
            "linear growth in l1",
            c7_linear_growth,
            Some(Duration::from_secs(300)),
        ),
        (
            8,
            "square-root growth for summation",
            c8_sqrt_growth,
            Some(Duration::from_secs(300)),
        ),
        (
            9,
            "signed vs absolute double average",
            c9_signed_absolute,
            None,
        ),
        (10, "scalar q=1 growth", c10_scalar_q1, None),
        (11, "type-2 bound for summation", c11_type2, None),
        (12, "depth one ratio", c12_depth_one, None),
        (13, "p/r moment-ratio probe", c13_pq_probe, None),
        (14, "determinism", c14_determinism, None),
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        if !filters.is_empty()
            && !filters
                .iter()
                .any(|f| name.contains(f.as_str()) || f == &id.to_string())
        {
            continue;
        }
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                outcome.passed = false;
                outcome
                    .detail
                    .push_str(&format!("; over the {} s time limit", limit.as_secs()));
            }
        }
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {verdict} [{name}] {} ({:.1} s)",
            outcome.detail,
            elapsed.as_secs_f64()
        );
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
