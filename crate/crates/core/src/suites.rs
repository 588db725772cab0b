//! Named verification suites: each runs a family of exact or randomized
//! checks and reports the extremal values against their bounds.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::dyadic::Table;
use crate::error::{Error, Result};
use crate::martingales::{
    apply_transform, duality_gap, haar_l1, scalar_differences, selector_e, selector_measures,
    summation_image, translation_martingale, HaarWitness, MartingaleTransform, MartingaleView,
    SummationImage, WalshPaleyMartingale,
};
use crate::math;
use crate::operators::{phi_apply, summation_operator, DenseOperator};
use crate::rademacher::{
    summation_as_point_measure, type_constant_lower, verify_lemma31, verify_lemma32, WEDGE_BUDGET,
};
use crate::rng;
use crate::rumd::{minf_double_average, EXACT_PAIR_CAP};
use crate::signsum::SignSum;
use crate::spaces::{BochnerFunction, Exponent, NormedSpace};

/// The available suites, keyed by their command-line ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    DualityGap,
    BlockWedgeIdentity,
    WedgeSummingBound,
    UnitVectorNorms,
    SelectorMeasure,
    SummationNorms,
    SummationType2,
    TranslationIdentity,
    ConstantPathSum,
    SignedAbsoluteAverage,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::DualityGap,
        Suite::BlockWedgeIdentity,
        Suite::WedgeSummingBound,
        Suite::UnitVectorNorms,
        Suite::SelectorMeasure,
        Suite::SummationNorms,
        Suite::SummationType2,
        Suite::TranslationIdentity,
        Suite::ConstantPathSum,
        Suite::SignedAbsoluteAverage,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::DualityGap => "lemma2.1",
            Suite::BlockWedgeIdentity => "lemma3.1",
            Suite::WedgeSummingBound => "lemma3.2",
            Suite::UnitVectorNorms => "lemma3.3-1",
            Suite::SelectorMeasure => "lemma4.1",
            Suite::SummationNorms => "lemma4.2-1",
            Suite::SummationType2 => "lemma4.5",
            Suite::TranslationIdentity => "lemma5.1",
            Suite::ConstantPathSum => "remark4.2",
            Suite::SignedAbsoluteAverage => "cor4.7",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.id() == id)
    }

    /// Default size parameter (depth, or sequence length for the type-2
    /// and wedge suites).
    pub fn default_n(self) -> usize {
        match self {
            Suite::DualityGap => 6,
            Suite::BlockWedgeIdentity => 3,
            Suite::WedgeSummingBound => 4,
            Suite::UnitVectorNorms => 12,
            Suite::SelectorMeasure => 10,
            Suite::SummationNorms => 12,
            Suite::SummationType2 => 8,
            Suite::TranslationIdentity => 8,
            Suite::ConstantPathSum => 12,
            Suite::SignedAbsoluteAverage => 8,
        }
    }

    /// Largest size parameter accepted.
    pub fn max_n(self) -> usize {
        match self {
            Suite::DualityGap => 10,
            Suite::BlockWedgeIdentity => 3,
            Suite::WedgeSummingBound => 4,
            Suite::UnitVectorNorms | Suite::SummationNorms => 14,
            Suite::SelectorMeasure => 14,
            Suite::SummationType2 => 8,
            Suite::TranslationIdentity => 10,
            Suite::ConstantPathSum => 20,
            Suite::SignedAbsoluteAverage => EXACT_PAIR_CAP,
        }
    }
}

impl core::fmt::Display for Suite {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.id())
    }
}

/// A single compared quantity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// The bound `value` is compared against.
    pub bound: f64,
    /// `"<="`, `">="` or `"=="`.
    pub relation: String,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, "<=", value <= bound)
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, ">=", value >= bound)
    }

    fn equal(name: &str, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, "==", value == bound)
    }

    fn new(name: &str, value: f64, bound: f64, relation: &str, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            value,
            bound,
            relation: relation.to_string(),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuiteReport {
    pub suite: String,
    pub n: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Runs `suite` at size `n`.
pub fn run_suite(suite: Suite, n: usize, seed: u64) -> Result<SuiteReport> {
    let min = match suite {
        Suite::SelectorMeasure => 2,
        _ => 1,
    };
    if n < min || n > suite.max_n() {
        return Err(Error::DepthOutOfRange {
            depth: n,
            max: suite.max_n(),
        });
    }
    let checks = match suite {
        Suite::DualityGap => duality_checks(n, 500, seed)?,
        Suite::BlockWedgeIdentity => block_wedge_checks(n, seed)?,
        Suite::WedgeSummingBound => summing_bound_checks(n, 100, seed)?,
        Suite::UnitVectorNorms => unit_vector_checks(n)?,
        Suite::SelectorMeasure => selector_checks(n)?,
        Suite::SummationNorms => summation_norm_checks(n)?,
        Suite::SummationType2 => type2_checks(n, seed)?,
        Suite::TranslationIdentity => translation_checks(n, seed)?,
        Suite::ConstantPathSum => constant_path_checks(n)?,
        Suite::SignedAbsoluteAverage => signed_absolute_checks(n)?,
    };
    Ok(SuiteReport {
        suite: suite.id().to_string(),
        n,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn gaussian_table(r: &mut rng::Rng, n: usize, dim: usize) -> Result<Table> {
    Table::new(
        n,
        dim,
        (0..dim << n).map(|_| r.sample(StandardNormal)).collect(),
    )
}

fn random_space(r: &mut rng::Rng, dim: usize) -> Result<NormedSpace> {
    let p = match r.gen_range(0..4) {
        0 => Exponent::Finite(1.0),
        1 => Exponent::Finite(2.0),
        2 => Exponent::Finite(r.gen_range(1.1..6.0)),
        _ => Exponent::Infinity,
    };
    NormedSpace::new(p, dim)
}

/// `|⟨φM, F⟩ - ⟨M, φ'F⟩|` over random instances, relative to the scale of
/// the pairing.
pub fn duality_checks(n: usize, instances: usize, seed: u64) -> Result<Vec<Check>> {
    let mut r = rng::keyed(seed, "suite-duality");
    let mut worst = 0.0f64;
    let mut identity_gap = 0.0f64;
    let mut constant_pairing = 0.0f64;
    for i in 0..instances {
        let depth = 1 + i % n;
        let (a, b) = (r.gen_range(1..5), r.gen_range(1..5));
        let x = random_space(&mut r, a)?;
        let y = random_space(&mut r, b)?;
        let m = WalshPaleyMartingale::new(x, gaussian_table(&mut r, depth, a)?)?;
        let f = BochnerFunction::new(y.dual(), gaussian_table(&mut r, depth, b)?)?;
        let ops = (0..depth)
            .map(|_| {
                DenseOperator::new(x, y, (0..a * b).map(|_| r.sample(StandardNormal)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let phi = MartingaleTransform::new(ops)?;
        worst = worst.max(duality_gap(&m, &f, &phi)?.abs());
        if i < 20 {
            let fx = BochnerFunction::new(x.dual(), gaussian_table(&mut r, depth, a)?)?;
            let id = MartingaleTransform::new(vec![DenseOperator::identity(x); depth])?;
            identity_gap = identity_gap.max(duality_gap(&m, &fx, &id)?.abs());
            let c: Vec<f64> = (0..b).map(|_| r.sample(StandardNormal)).collect();
            let constant = Table::from_fn(depth, b, |_, o| o.copy_from_slice(&c))?;
            let image = apply_transform(&phi, &m)?;
            constant_pairing =
                constant_pairing.max(crate::martingales::pairing(image.table(), &constant)?.abs());
        }
    }
    Ok(vec![
        Check::at_most("max duality gap, random transforms", worst, 1e-10),
        Check::at_most("max duality gap, identity transform", identity_gap, 1e-10),
        Check::at_most(
            "max pairing with a constant function",
            constant_pairing,
            1e-10,
        ),
    ])
}

/// Both sides of the block-average wedge identity at every `(k, ω)` for
/// random martingales in `l_1^{2^n}` and `l_∞^{2^n}`, plus `M^1`.
pub fn block_wedge_checks(n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut r = rng::keyed(seed, "suite-block-wedge");
    let mut worst = 0.0f64;
    let mut all_exact = true;
    let mut cases: Vec<WalshPaleyMartingale> = vec![haar_l1(n)?];
    for depth in 1..=n {
        for space in [NormedSpace::l1(1 << depth)?, NormedSpace::linf(1 << depth)?] {
            for _ in 0..2 {
                cases.push(WalshPaleyMartingale::new(
                    space,
                    gaussian_table(&mut r, depth, 1 << depth)?,
                )?);
            }
        }
    }
    for m in &cases {
        for k in 0..=m.depth() {
            for row in 0..1usize << m.depth() {
                let v = verify_lemma31(m, k, row, WEDGE_BUDGET)?;
                all_exact &= v.exact;
                worst = worst.max((v.lhs - v.rhs).abs() / v.lhs.abs().max(1.0));
            }
        }
    }
    Ok(vec![
        Check::at_most("max relative |lhs - rhs|", worst, 1e-9),
        Check::equal("all wedges exact", f64::from(u8::from(all_exact)), 1.0),
    ])
}

/// `|ue_1 ∧ ... ∧ ue_k| <= (1/k!)^{1/2} π_2(u)^k` for random
/// `u : l_2^k → l_1^m` with `k <= kmax`, `m <= 8`, and for the difference
/// operators of `M^1`.
pub fn summing_bound_checks(kmax: usize, instances: usize, seed: u64) -> Result<Vec<Check>> {
    let mut r = rng::keyed(seed, "suite-summing-bound");
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0usize;
    let mut record = |w: f64, b: f64| {
        worst = worst.max(w / b);
        if w > b * (1.0 + 1e-12) {
            violations += 1;
        }
    };
    for i in 0..instances {
        let k = 1 + i % kmax;
        let m = r.gen_range(k..=8);
        let u = DenseOperator::new(
            NormedSpace::l2(k)?,
            NormedSpace::l1(m)?,
            (0..k * m).map(|_| r.sample(StandardNormal)).collect(),
        )?;
        let v = verify_lemma32(&u, seed.wrapping_add(i as u64))?;
        record(v.wedge, v.bound);
    }
    // u_ω : e_k ↦ dM_k^1(ω) at depth 3.
    let h = HaarWitness::new(3)?;
    let mut d = vec![0.0; 8];
    for row in 0..8 {
        let mut a = vec![0.0; 8 * 3];
        for k in 1..=3 {
            h.difference_into(k, row, &mut d);
            for (i, x) in d.iter().enumerate() {
                a[i * 3 + k - 1] = *x;
            }
        }
        let u = DenseOperator::new(NormedSpace::l2(3)?, NormedSpace::l1(8)?, a)?;
        let v = verify_lemma32(&u, seed)?;
        record(v.wedge, v.bound);
    }
    Ok(vec![
        Check::at_most("violations", violations as f64, 0.0),
        Check::at_most("max wedge / bound", worst, 1.0 + 1e-12),
    ])
}

/// `‖M_k^1(ω)‖_1 = ‖dM_k^1(ω)‖_1 = 1` exactly for all `k`, `ω`.
pub fn unit_vector_checks(n: usize) -> Result<Vec<Check>> {
    let view = HaarWitness::new(n)?;
    let (lo, hi, dlo, dhi) = norm_extremes(&view);
    let mut checks = vec![
        Check::equal("min ‖M_k(ω)‖", lo, 1.0),
        Check::equal("max ‖M_k(ω)‖", hi, 1.0),
        Check::equal("min ‖dM_k(ω)‖", dlo, 1.0),
        Check::equal("max ‖dM_k(ω)‖", dhi, 1.0),
    ];
    if n <= 10 {
        // The same identities on the table built by conditional expectation.
        let m = haar_l1(n)?;
        let (lo, hi, dlo, dhi) = norm_extremes(&m);
        checks.push(Check::equal("table: min ‖M_k(ω)‖", lo, 1.0));
        checks.push(Check::equal("table: max ‖M_k(ω)‖", hi, 1.0));
        checks.push(Check::equal("table: min ‖dM_k(ω)‖", dlo, 1.0));
        checks.push(Check::equal("table: max ‖dM_k(ω)‖", dhi, 1.0));
        let b = m.as_bochner();
        checks.push(Check::equal(
            "L_2 norm of the terminal value",
            b.bochner_norm(2.0)?,
            1.0,
        ));
    }
    Ok(checks)
}

/// `(min, max)` of `‖M_k(ω)‖` over `k >= 0` and of `‖dM_k(ω)‖` over `k >= 1`.
fn norm_extremes(m: &dyn MartingaleView) -> (f64, f64, f64, f64) {
    let n = m.depth();
    let space = m.space();
    let per_row = math::map_indices_with(1usize << n, |row| {
        let mut buf = vec![0.0; m.dim()];
        let mut e = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for k in 0..=n {
            m.level_into(k, row, &mut buf);
            let v = space.norm(&buf);
            e.0 = e.0.min(v);
            e.1 = e.1.max(v);
            if k >= 1 {
                m.difference_into(k, row, &mut buf);
                let v = space.norm(&buf);
                e.2 = e.2.min(v);
                e.3 = e.3.max(v);
            }
        }
        e
    });
    per_row.into_iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |a, b| (a.0.min(b.0), a.1.max(b.1), a.2.min(b.2), a.3.max(b.3)),
    )
}

/// `μ_n{|⟨dM_k^∞, e(ω)⟩| >= 1/4} >= 1/2` for every `k`, exactly, and
/// pointwise for `k = n`.
pub fn selector_checks(n: usize) -> Result<Vec<Check>> {
    let measures = selector_measures(n)?;
    let min = measures.iter().copied().fold(f64::INFINITY, f64::min);
    let e = selector_e(n)?;
    let view = SummationImage::new(n)?;
    let mut buf = vec![0.0; 1 << n];
    let mut last = f64::INFINITY;
    for (row, &i) in e.iter().enumerate() {
        view.difference_into(n, row, &mut buf);
        last = last.min(buf[i - 1].abs());
    }
    Ok(vec![
        Check::at_least("min over k of the measure", min, 0.5),
        Check::at_least("min over ω of |⟨dM_n, e(ω)⟩|", last, 0.25),
    ])
}

/// `‖M_k^∞(ω)‖_∞ = 1` and `‖dM_k^∞(ω)‖_∞ = 1/2` exactly.
pub fn summation_norm_checks(n: usize) -> Result<Vec<Check>> {
    let view = SummationImage::new(n)?;
    let (lo, hi, dlo, dhi) = norm_extremes(&view);
    let mut checks = vec![
        Check::equal("min ‖M_k(ω)‖", lo, 1.0),
        Check::equal("max ‖M_k(ω)‖", hi, 1.0),
        Check::equal("min ‖dM_k(ω)‖", dlo, 0.5),
        Check::equal("max ‖dM_k(ω)‖", dhi, 0.5),
    ];
    if n <= 10 {
        // σ_n applied to the M^1 table against the closed-form tents.
        let m = summation_image(n)?;
        let mut mismatches = 0usize;
        let mut a = vec![0.0; 1 << n];
        let mut b = vec![0.0; 1 << n];
        for row in 0..1usize << n {
            for k in 1..=n {
                m.difference_into(k, row, &mut a);
                view.difference_into(k, row, &mut b);
                mismatches += usize::from(a != b);
            }
        }
        checks.push(Check::equal(
            "table vs closed form mismatches",
            mismatches as f64,
            0.0,
        ));
    }
    Ok(checks)
}

/// The searched type-2 lower bound for `σ_N` stays below the analytic
/// value 2, and `σ_N` agrees with `Φ` on the matching point measures.
pub fn type2_checks(nmax: usize, seed: u64) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for big_n in [8usize, 64] {
        for len in [2usize, 4, nmax] {
            let t = summation_operator(big_n)?;
            let est = type_constant_lower(&t, 2.0, len, 1_000_000, seed)?;
            worst = worst.max(est.lower);
        }
    }
    let t = summation_operator(16)?;
    let mut r = rng::keyed(seed, "suite-point-measures");
    let mut bridge = 0.0f64;
    for _ in 0..50 {
        let x: Vec<f64> = (0..16).map(|_| r.sample(StandardNormal)).collect();
        let via_phi = phi_apply(&summation_as_point_measure(&x)?).sup_norm;
        let direct = t.codomain().norm(&t.apply(&x));
        bridge = bridge.max((via_phi - direct).abs());
    }
    Ok(vec![
        Check::at_most("best type-2 ratio found", worst, 2.0 * (1.0 + 1e-6)),
        Check::at_most("max |‖Φμ‖ - ‖σx‖|", bridge, 1e-12),
    ])
}

/// `‖Σ α_k dM_k^f(ω)‖ = ‖Σ α_k df_k‖` for random `f`, `α`, every `ω`, in
/// `l_1(Ω_n)` and `l_2(Ω_n)`.
pub fn translation_checks(n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut r = rng::keyed(seed, "suite-translation");
    let mut worst = 0.0f64;
    for depth in 1..=n {
        let size = 1usize << depth;
        for p in [1.0, 2.0] {
            let space = NormedSpace::lp(p, size)?;
            for _ in 0..3 {
                let f: Vec<f64> = (0..size).map(|_| r.sample(StandardNormal)).collect();
                let alpha: Vec<f64> = (0..depth).map(|_| r.sample(StandardNormal)).collect();
                let df = scalar_differences(&f)?;
                let mut target = vec![0.0; size];
                for (a, d) in alpha.iter().zip(&df[1..]) {
                    for (t, x) in target.iter_mut().zip(d) {
                        *t += a * x;
                    }
                }
                let rhs = space.norm(&target);
                let m = translation_martingale(&f, space)?;
                let mut d = vec![0.0; size];
                let mut sum = vec![0.0; size];
                for row in 0..size {
                    sum.iter_mut().for_each(|x| *x = 0.0);
                    for (k, a) in alpha.iter().enumerate() {
                        m.difference_into(k + 1, row, &mut d);
                        for (s, x) in sum.iter_mut().zip(&d) {
                            *s += a * x;
                        }
                    }
                    let lhs = space.norm(&sum);
                    worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
                }
            }
        }
    }
    Ok(vec![Check::at_most("max relative deviation", worst, 1e-10)])
}

/// `max_ε ‖Σ ε_k dM_k^∞(1, ..., 1)‖_∞ <= 2`, by enumeration of all signs.
pub fn constant_path_checks(n: usize) -> Result<Vec<Check>> {
    let view = SummationImage::new(n)?;
    let dim = 1usize << n;
    let mut flat = vec![0.0; n * dim];
    for k in 1..=n {
        view.difference_into(k, 0, &mut flat[(k - 1) * dim..k * dim]);
    }
    let sum = SignSum::new(&flat, n, Exponent::Infinity)?;
    Ok(vec![
        Check::at_most("max over ε", sum.max_norm(), 2.0),
        Check::at_most("E over ε", sum.moments(&[1.0])[0], 2.0),
    ])
}

/// The `L_2` double average over `(ε, ω)` of `Σ ε_k dM_k^∞` equals the one
/// built from `|dM_k^∞|`.
pub fn signed_absolute_checks(n: usize) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for depth in 1..=n {
        let a = minf_double_average(depth, false)?;
        let b = minf_double_average(depth, true)?;
        worst = worst.max((a - b).abs());
    }
    Ok(vec![Check::at_most(
        "max |signed - absolute|",
        worst,
        1e-12,
    )])
}
