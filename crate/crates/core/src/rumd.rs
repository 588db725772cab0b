//! Random unconditional constants of martingale differences.
//!
//! For a zero-start martingale `M` and an operator `T`,
//! `ratio_q(M, T) = (E_{ε,ω} ‖Σ_k ε_k T dM_k(ω)‖^q)^{1/q} / (E_ω ‖M_n(ω)‖^q)^{1/q}`
//! and `RUMD_n^q(T)` is its supremum over `M`. Lower bounds come from
//! explicit witnesses, upper bounds from closed-form estimates.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::dyadic::{self, omega, Table};
use crate::error::{Error, Result};
use crate::martingales::{HaarWitness, MartingaleView, SummationImage, WalshPaleyMartingale};
use crate::math;
use crate::operators::DenseOperator;
use crate::rademacher::doob_type2_bound;
use crate::rng;
use crate::signsum::SignSum;
use crate::spaces::{Exponent, NormedSpace};

/// Largest depth with full `(ε, ω)` enumeration.
pub const EXACT_PAIR_CAP: usize = 13;
/// Default search budget, in norm evaluations.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_STARTS: usize = 16;
/// Default total number of sampled sign vectors in Monte Carlo mode.
pub const DEFAULT_SAMPLES: usize = 200_000;

const DEGENERATE: f64 = 1e-14;

/// How the expectation over `ε` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatioMode {
    /// Full enumeration of `ε` for `n <= exact_cap`.
    pub exact_cap: usize,
    /// Total sampled sign vectors (spread over all `ω`) beyond the cap.
    pub samples: usize,
    pub seed: u64,
}

impl Default for RatioMode {
    fn default() -> Self {
        Self {
            exact_cap: EXACT_PAIR_CAP,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

impl RatioMode {
    /// Exact enumeration only; larger depths are rejected.
    pub fn exact() -> Self {
        Self {
            samples: 0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RumdRatio {
    pub value: f64,
    pub exact: bool,
    /// Standard error of `value` when sampled, `0` when exact.
    pub stderr: f64,
}

/// Writes `T dM_k(ω)` for `k = 1..=n` into `flat`, vector-major.
fn point_images(
    m: &dyn MartingaleView,
    t: &DenseOperator,
    row: usize,
    diff: &mut [f64],
    flat: &mut [f64],
) {
    let rows = t.rows();
    for k in 1..=m.depth() {
        let out = &mut flat[(k - 1) * rows..k * rows];
        if t.is_identity() {
            m.difference_into(k, row, out);
        } else {
            m.difference_into(k, row, diff);
            t.apply_into(diff, out);
        }
    }
}

fn check_operator(m: &dyn MartingaleView, t: &DenseOperator) -> Result<()> {
    if t.cols() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: t.cols(),
        });
    }
    Ok(())
}

/// `E_ε ‖Σ_k ε_k T dM_k(ω)‖^q` for every `ω`, exact, for each `q`.
pub fn pointwise_moments(
    m: &dyn MartingaleView,
    t: &DenseOperator,
    qs: &[f64],
) -> Result<Vec<Vec<f64>>> {
    check_operator(m, t)?;
    let n = m.depth();
    let p = t.codomain().p();
    let l1_fast = p.is_one() && qs == [1.0];
    let per_point = math::map_indices_with(1usize << n, |row| {
        let mut diff = vec![0.0; m.dim()];
        let mut flat = vec![0.0; n * t.rows()];
        point_images(m, t, row, &mut diff, &mut flat);
        let sum = SignSum::new(&flat, n, p)?;
        if l1_fast {
            Ok(vec![sum.expected_l1()?])
        } else {
            Ok(sum.moments(qs))
        }
    });
    per_point.into_iter().collect()
}

/// `(E_ε ‖Σ_k ε_k T dM_k(ω)‖^q)^{1/q}` for every `ω`.
pub fn pointwise_averages(m: &dyn MartingaleView, t: &DenseOperator, q: f64) -> Result<Vec<f64>> {
    Ok(pointwise_moments(m, t, &[q])?
        .into_iter()
        .map(|v| math::root(v[0], q))
        .collect())
}

/// `E_ω ‖M_n(ω) - M_0‖^q`.
fn terminal_moment(m: &dyn MartingaleView, q: f64) -> f64 {
    let start = m.start();
    let space = m.space();
    let norms = math::map_indices(1usize << m.depth(), |row| {
        let mut buf = vec![0.0; m.dim()];
        m.terminal_into(row, &mut buf);
        for (b, s) in buf.iter_mut().zip(&start) {
            *b -= s;
        }
        math::abs_pow(space.norm(&buf), q)
    });
    math::pairwise_sum(&norms) / norms.len() as f64
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidExponent(q));
    }
    Ok(())
}

/// `ratio_q(M, T)` for each `q` in `qs`.
///
/// `M` is measured after removing `M_0`; the differences `dM_k`, `k >= 1`,
/// do not see that shift.
pub fn rumd_ratios(
    m: &dyn MartingaleView,
    t: &DenseOperator,
    qs: &[f64],
    mode: RatioMode,
) -> Result<Vec<RumdRatio>> {
    check_operator(m, t)?;
    for &q in qs {
        check_q(q)?;
    }
    let n = m.depth();
    let denoms: Vec<f64> = qs
        .iter()
        .map(|&q| math::root(terminal_moment(m, q), q))
        .collect();
    if denoms.iter().any(|&d| d < DEGENERATE) {
        return Err(Error::UndefinedRatio);
    }
    let points = 1usize << n;
    if n <= mode.exact_cap {
        let moments = pointwise_moments(m, t, qs)?;
        return Ok(qs
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                let col: Vec<f64> = moments.iter().map(|v| v[i]).collect();
                let num = math::root(math::pairwise_sum(&col) / points as f64, q);
                RumdRatio {
                    value: num / denoms[i],
                    exact: true,
                    stderr: 0.0,
                }
            })
            .collect());
    }
    if mode.samples == 0 {
        return Err(Error::ExactCapExceeded {
            requested: n,
            cap: mode.exact_cap,
        });
    }
    let per_point = mode.samples.div_ceil(points).max(32);
    let p = t.codomain().p();
    // Per point: sample mean of ‖·‖^q and its variance over the samples.
    let stats = math::map_indices_with(points, |row| {
        let mut diff = vec![0.0; m.dim()];
        let mut flat = vec![0.0; n * t.rows()];
        point_images(m, t, row, &mut diff, &mut flat);
        let sum = SignSum::new(&flat, n, p)?;
        let mut r = rng::shard(mode.seed, "rumd-ratio", row as u64);
        let norms = sum.sample_norms(per_point, &mut r);
        Ok(qs
            .iter()
            .map(|&q| {
                let pows: Vec<f64> = norms.iter().map(|&x| math::abs_pow(x, q)).collect();
                let mean = math::pairwise_sum(&pows) / per_point as f64;
                let var = pows.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                    / (per_point as f64 - 1.0);
                (mean, var)
            })
            .collect::<Vec<_>>())
    });
    let stats: Vec<Vec<(f64, f64)>> = stats.into_iter().collect::<Result<_>>()?;
    Ok(qs
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let means: Vec<f64> = stats.iter().map(|s| s[i].0).collect();
            let vars: Vec<f64> = stats.iter().map(|s| s[i].1).collect();
            let mean = math::pairwise_sum(&means) / points as f64;
            let se_mean = math::sqrt(math::pairwise_sum(&vars) / per_point as f64) / points as f64;
            let num = math::root(mean, q);
            let stderr = if mean > 0.0 {
                num / (q * mean) * se_mean
            } else {
                0.0
            };
            RumdRatio {
                value: num / denoms[i],
                exact: false,
                stderr: stderr / denoms[i],
            }
        })
        .collect())
}

/// `ratio_q(M, T)`.
pub fn rumd_ratio(
    m: &dyn MartingaleView,
    t: &DenseOperator,
    q: f64,
    mode: RatioMode,
) -> Result<RumdRatio> {
    Ok(rumd_ratios(m, t, &[q], mode)?[0])
}

/// The martingale `M(ω) = ω_1 x`: a single nonzero difference.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingleDifference {
    depth: usize,
    space: NormedSpace,
    direction: Vec<f64>,
}

impl SingleDifference {
    pub fn new(depth: usize, space: NormedSpace, direction: Vec<f64>) -> Result<Self> {
        dyadic::check_depth(depth)?;
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be positive"));
        }
        if direction.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: direction.len(),
            });
        }
        Ok(Self {
            depth,
            space,
            direction,
        })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }
}

impl MartingaleView for SingleDifference {
    fn depth(&self) -> usize {
        self.depth
    }

    fn space(&self) -> NormedSpace {
        self.space
    }

    fn level_into(&self, k: usize, row: usize, out: &mut [f64]) {
        if k == 0 {
            out.iter_mut().for_each(|x| *x = 0.0);
            return;
        }
        let s = f64::from(omega(row, self.depth, 1));
        for (o, x) in out.iter_mut().zip(&self.direction) {
            *o = s * x;
        }
    }
}

/// Where a bound came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    SingleDifference,
    CanonicalM1,
    CanonicalM1Balanced,
    CanonicalMinf,
    CanonicalMinfBalanced,
    RandomSearch,
    Trivial2n,
    Type2Bound,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::SingleDifference => "single_difference",
            Method::CanonicalM1 => "canonical_m1",
            Method::CanonicalM1Balanced => "canonical_m1_balanced",
            Method::CanonicalMinf => "canonical_minf",
            Method::CanonicalMinfBalanced => "canonical_minf_balanced",
            Method::RandomSearch => "random_search",
            Method::Trivial2n => "trivial_2n",
            Method::Type2Bound => "type2_bound",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A martingale that attains a reported lower bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Haar(HaarWitness),
    SingleDifference(SingleDifference),
    Table(WalshPaleyMartingale),
}

impl Witness {
    pub fn view(&self) -> &dyn MartingaleView {
        match self {
            Witness::Haar(h) => h,
            Witness::SingleDifference(s) => s,
            Witness::Table(t) => t,
        }
    }

    /// The witness as an explicit terminal table.
    pub fn materialize(&self) -> Result<WalshPaleyMartingale> {
        match self {
            Witness::Table(t) => Ok(t.clone()),
            other => {
                let v = other.view();
                let table =
                    Table::from_fn(v.depth(), v.dim(), |row, out| v.terminal_into(row, out))?;
                WalshPaleyMartingale::new(v.space(), table)
            }
        }
    }
}

/// One evaluated lower-bound candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Candidate {
    pub method: Method,
    pub ratio: RumdRatio,
}

/// An upper bound and the argument behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UpperBound {
    pub value: f64,
    pub method: Method,
}

/// Certified interval for `RUMD_n^q(T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RumdEstimate {
    pub n: usize,
    pub q: f64,
    pub lower: f64,
    pub lower_method: Method,
    /// Standard error of `lower`, `0` when exact.
    pub lower_stderr: f64,
    pub upper: UpperBound,
    pub witness: Witness,
    pub candidates: Vec<Candidate>,
    pub seed: u64,
    /// Norm evaluations spent by the random search.
    pub search_evaluations: u64,
}

/// Options for [`rumd_lower`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Strategy {
    pub budget: u64,
    pub starts: usize,
    pub seed: u64,
    pub mode: RatioMode,
}

impl Default for Strategy {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            starts: DEFAULT_STARTS,
            seed: 0,
            mode: RatioMode::default(),
        }
    }
}

/// `min(2n ‖T‖, 2 √n T_2(T))`, the second term only for `q = 2` and an
/// operator with a known type-2 constant.
pub fn rumd_upper(t: &DenseOperator, n: usize, q: f64) -> Result<UpperBound> {
    check_q(q)?;
    if n == 0 {
        return Err(Error::InvalidArgument("depth must be positive"));
    }
    let trivial = UpperBound {
        value: 2.0 * n as f64 * t.operator_norm().upper,
        method: Method::Trivial2n,
    };
    if q == 2.0 {
        if let Some(c) = doob_type2_bound(t) {
            let v = 2.0 * math::sqrt(n as f64) * c;
            if v < trivial.value {
                return Ok(UpperBound {
                    value: v,
                    method: Method::Type2Bound,
                });
            }
        }
    }
    Ok(trivial)
}

/// The closed-form witnesses for `T`: a best single difference, and the
/// unit-vector martingales when `T` acts on `l_1^N` with `N >= 2^n`.
pub fn canonical_witnesses(
    t: &DenseOperator,
    n: usize,
    seed: u64,
) -> Result<Vec<(Method, Witness)>> {
    let (_, x) = t.norm_witness(seed);
    let mut out = vec![(
        Method::SingleDifference,
        Witness::SingleDifference(SingleDifference::new(n, *t.domain(), x)?),
    )];
    let dim = t.cols();
    if t.domain().p().is_one() && n < usize::BITS as usize - 1 && dim >= 1 << n {
        let (plain, balanced) = if t.is_summation() {
            (Method::CanonicalMinf, Method::CanonicalMinfBalanced)
        } else {
            (Method::CanonicalM1, Method::CanonicalM1Balanced)
        };
        out.push((
            plain,
            Witness::Haar(HaarWitness::new(n)?.zero_started().padded(dim)?),
        ));
        if n >= 2 {
            out.push((
                balanced,
                Witness::Haar(HaarWitness::balanced(n)?.padded(dim)?),
            ));
        }
    }
    Ok(out)
}

struct SearchStart {
    table: Table,
    value: f64,
    step: f64,
    rng: rng::Rng,
}

fn search_value(space: NormedSpace, table: &Table, t: &DenseOperator, q: f64) -> f64 {
    WalshPaleyMartingale::zero_start(space, table.clone())
        .and_then(|m| rumd_ratio(&m, t, q, RatioMode::exact()))
        .map_or(0.0, |r| r.value)
}

/// Multi-start hill climbing on terminal tables, starting from `seeded`
/// and then from Gaussian tables. Starts are evaluated in order, then
/// improved round-robin, so a larger budget replays a smaller one and
/// continues it.
fn random_search(
    t: &DenseOperator,
    n: usize,
    q: f64,
    strategy: &Strategy,
    seeded: Vec<Table>,
) -> Option<(f64, WalshPaleyMartingale, u64)> {
    let points = 1u64 << n;
    let cost = points * (points / 2).max(1) + points;
    if n > strategy.mode.exact_cap || n > 20 || cost > strategy.budget || strategy.starts == 0 {
        return None;
    }
    let space = *t.domain();
    let dim = t.cols();
    let mut spent = 0u64;
    let total = seeded.len() + strategy.starts;
    let mut seeded = seeded.into_iter();
    let mut starts: Vec<SearchStart> = Vec::new();
    for s in 0..total {
        if spent + cost > strategy.budget {
            break;
        }
        let mut r = rng::shard(strategy.seed, "rumd-search", s as u64);
        let mut table = match seeded.next() {
            Some(table) => table,
            None => {
                let data: Vec<f64> = (0..points as usize * dim)
                    .map(|_| r.sample(StandardNormal))
                    .collect();
                Table::new(n, dim, data).ok()?
            }
        };
        let mean = table.mean();
        table.sub_row(&mean);
        spent += cost;
        let value = search_value(space, &table, t, q);
        starts.push(SearchStart {
            table,
            value,
            step: 0.5,
            rng: r,
        });
    }
    if starts.len() == total {
        let mut turn = 0usize;
        while spent + cost <= strategy.budget {
            let count = starts.len();
            let s = &mut starts[turn % count];
            turn += 1;
            let row = s.rng.gen_range(0..points as usize);
            let scale = space.norm(s.table.row(row)).max(1e-3) / math::sqrt(dim as f64);
            let old = s.table.as_slice().to_vec();
            let delta: Vec<f64> = (0..dim)
                .map(|_| s.step * scale * s.rng.sample::<f64, _>(StandardNormal))
                .collect();
            for (x, d) in s.table.row_mut(row).iter_mut().zip(&delta) {
                *x += d;
            }
            let mean = s.table.mean();
            s.table.sub_row(&mean);
            spent += cost;
            let v = search_value(space, &s.table, t, q);
            if v > s.value {
                s.value = v;
                s.step = (s.step * 1.5).min(4.0);
            } else {
                s.table = Table::new(n, dim, old).ok()?;
                s.step = (s.step * 0.8).max(1e-6);
            }
        }
    }
    let best = starts
        .into_iter()
        .fold(None::<SearchStart>, |best, s| match best {
            Some(b) if b.value >= s.value => Some(b),
            _ => Some(s),
        })?;
    let m = WalshPaleyMartingale::new(space, best.table).ok()?;
    Some((best.value, m, spent))
}

/// Lower bound on `RUMD_n^q(T)`: the best of the canonical witnesses and a
/// budgeted random search, paired with [`rumd_upper`].
pub fn rumd_lower(t: &DenseOperator, n: usize, q: f64, strategy: Strategy) -> Result<RumdEstimate> {
    check_q(q)?;
    dyadic::check_depth(n)?;
    if n == 0 {
        return Err(Error::InvalidArgument("depth must be positive"));
    }
    let mode = RatioMode {
        seed: strategy.seed,
        ..strategy.mode
    };
    let mut candidates = Vec::new();
    let mut best: Option<(Method, RumdRatio, Witness)> = None;
    for (method, w) in canonical_witnesses(t, n, strategy.seed)? {
        let ratio = rumd_ratio(w.view(), t, q, mode)?;
        candidates.push(Candidate { method, ratio });
        if best.as_ref().is_none_or(|b| ratio.value > b.1.value) {
            best = Some((method, ratio, w));
        }
    }
    // Canonical tables double as search starts when they are small.
    let seeded: Vec<Table> = if (t.cols() as u64) << n <= 1 << 16 {
        canonical_witnesses(t, n, strategy.seed)?
            .iter()
            .filter(|(m, _)| *m != Method::SingleDifference)
            .map(|(_, w)| w.materialize().map(WalshPaleyMartingale::into_terminal))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut search_evaluations = 0;
    if let Some((value, m, spent)) = random_search(t, n, q, &strategy, seeded) {
        search_evaluations = spent;
        let ratio = RumdRatio {
            value,
            exact: true,
            stderr: 0.0,
        };
        candidates.push(Candidate {
            method: Method::RandomSearch,
            ratio,
        });
        if best.as_ref().is_none_or(|b| value > b.1.value) {
            best = Some((Method::RandomSearch, ratio, Witness::Table(m)));
        }
    }
    let (lower_method, ratio, witness) = best.ok_or(Error::Internal("no witness evaluated"))?;
    Ok(RumdEstimate {
        n,
        q,
        lower: ratio.value,
        lower_method,
        lower_stderr: ratio.stderr,
        upper: rumd_upper(t, n, q)?,
        witness,
        candidates,
        seed: strategy.seed,
        search_evaluations,
    })
}

/// Per-witness ratios `ratio_p / ratio_r`. A consistency probe only: it
/// cannot certify equivalence of the constants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PqProbe {
    pub n: usize,
    pub p: f64,
    pub r: f64,
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn pq_equivalence_probe(
    t: &DenseOperator,
    n: usize,
    p: f64,
    r: f64,
    sample: &[&dyn MartingaleView],
    mode: RatioMode,
) -> Result<PqProbe> {
    check_q(p)?;
    check_q(r)?;
    if p > r {
        return Err(Error::InvalidArgument("pq probe needs p <= r"));
    }
    let mut ratios = Vec::with_capacity(sample.len());
    for m in sample {
        if m.depth() != n {
            return Err(Error::InvalidArgument(
                "sampled martingale has the wrong depth",
            ));
        }
        let v = rumd_ratios(*m, t, &[p, r], mode)?;
        ratios.push(v[0].value / v[1].value);
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PqProbe {
        n,
        p,
        r,
        ratios,
        min,
        max,
    })
}

/// Least-squares fit of `log value` against `log n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn growth_exponent(series: &[(f64, f64)]) -> Result<GrowthFit> {
    if series.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: series.len(),
        });
    }
    for &(n, v) in series {
        if n <= 0.0 {
            return Err(Error::NonPositive(n));
        }
        if v <= 0.0 {
            return Err(Error::NonPositive(v));
        }
    }
    let xs: Vec<f64> = series.iter().map(|&(n, _)| math::ln(n)).collect();
    let ys: Vec<f64> = series.iter().map(|&(_, v)| math::ln(v)).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all n values coincide"));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(GrowthFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// `q = 1` ratios of the two translation-martingale witnesses in
/// `l_1(Ω_n)`: `f = χ_{(1,...,1)}` (mean removed) and
/// `f = χ_{(1,...,1)} - χ_{(-1,1,...,1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rumd1Probe {
    pub n: usize,
    pub point_mass: f64,
    pub antipodal: f64,
    /// The larger of the two.
    pub value: f64,
}

/// Both witnesses are evaluated through the coordinate relabeling that
/// turns the translation martingale of a point mass into `M^1`.
pub fn rumd1_scalar_probe(n: usize) -> Result<Rumd1Probe> {
    if n == 0 || n > EXACT_PAIR_CAP {
        return Err(Error::DepthOutOfRange {
            depth: n,
            max: EXACT_PAIR_CAP,
        });
    }
    let id = DenseOperator::identity(NormedSpace::l1(1 << n)?);
    let mode = RatioMode::exact();
    let point_mass = rumd_ratio(&HaarWitness::new(n)?.zero_started(), &id, 1.0, mode)?.value;
    let antipodal = if n >= 2 {
        rumd_ratio(&HaarWitness::balanced(n)?, &id, 1.0, mode)?.value
    } else {
        point_mass
    };
    Ok(Rumd1Probe {
        n,
        point_mass,
        antipodal,
        value: point_mass.max(antipodal),
    })
}

/// `(E_{ε,ω} ‖Σ_k ε_k D_k(ω)‖_∞^2)^{1/2}` with `D_k = dM_k^∞` or, when
/// `absolute`, `D_k = |dM_k^∞|`.
pub fn minf_double_average(n: usize, absolute: bool) -> Result<f64> {
    if n > EXACT_PAIR_CAP {
        return Err(Error::ExactCapExceeded {
            requested: n,
            cap: EXACT_PAIR_CAP,
        });
    }
    let view = SummationImage::new(n)?;
    let dim = 1usize << n;
    let per_point = math::map_indices_with(dim, |row| {
        let mut flat = vec![0.0; n * dim];
        for k in 1..=n {
            let out = &mut flat[(k - 1) * dim..k * dim];
            if absolute {
                view.abs_difference_into(k, row, out);
            } else {
                view.difference_into(k, row, out);
            }
        }
        SignSum::new(&flat, n, Exponent::Infinity).map(|s| s.moments(&[2.0])[0])
    });
    let values: Vec<f64> = per_point.into_iter().collect::<Result<_>>()?;
    Ok(math::sqrt(math::pairwise_sum(&values) / dim as f64))
}

/// Fraction of points with `E_ε ‖Σ_k ε_k dM_k^∞(ω)‖_∞ >= α √n`.
pub fn minf_fraction_above(averages: &[f64], n: usize, alpha: f64) -> f64 {
    let level = alpha * math::sqrt(n as f64);
    averages.iter().filter(|&&v| v >= level).count() as f64 / averages.len() as f64
}

/// Compact description of a witness for reports.
pub fn witness_label(w: &Witness) -> String {
    match w {
        Witness::Haar(h) if h.is_balanced() => alloc::format!("haar_balanced:{}", h.depth()),
        Witness::Haar(h) => alloc::format!("haar:{}", h.depth()),
        Witness::SingleDifference(s) => alloc::format!("single_difference:{}", s.depth()),
        Witness::Table(t) => alloc::format!("table:{}x{}", t.depth(), t.dim()),
    }
}
