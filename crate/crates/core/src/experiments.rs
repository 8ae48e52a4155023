//! Monte Carlo harness for the limit laws: range statistics, normalized
//! cylinder-cover growth, local-time functionals, scaling-exponent fits,
//! dyadic-class diagnostics, and the reference distributions they are
//! compared against. Trials are independent tasks keyed by
//! `trial_seed(master, t, stream)`; results are pure functions of
//! `(config, master_seed)` regardless of worker count.

use crate::complexity::{
    phi_log2_from_range_size, q_rwrs_bound, q_upper_bound,
};
use crate::error::{Error, Result};
use crate::hyperspace::{dyadic_inner, dyadic_outer, is_admissible, lemma4_cover, HyperSet};
use crate::rng::{trial_seed, Rng64, Stream};
use crate::scenery::SceneryModel;
use crate::stable_laws::JumpLaw;
use crate::walk::{
    endpoint, min_local_time_over, occupation_field, scaled_range, simulate_path,
    OccupationField,
};
use rayon::prelude::*;
use statrs::function::gamma::gamma;
use std::collections::HashMap;

/// Which jump family an experiment runs on.
#[derive(Clone, Debug, PartialEq)]
pub enum LawSpec {
    Lazy { laziness: f64 },
    Pareto { alpha: f64, zero_mass: f64 },
    /// Deterministic +1 jumps; validation runs only.
    UnitStep,
}

impl LawSpec {
    pub fn build(&self) -> Result<JumpLaw> {
        match self {
            LawSpec::Lazy { laziness } => JumpLaw::lazy_gaussian(*laziness),
            LawSpec::Pareto { alpha, zero_mass } => JumpLaw::pareto(*alpha, *zero_mass),
            LawSpec::UnitStep => Ok(JumpLaw::unit_step()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LawSpec::Lazy { laziness } => format!("lazy(laziness={laziness})"),
            LawSpec::Pareto { alpha, zero_mass } => {
                format!("pareto(alpha={alpha},zero_mass={zero_mass})")
            }
            LawSpec::UnitStep => "unit_step".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub law: LawSpec,
    pub scenery_probs: Vec<f64>,
    /// Window lengths, strictly increasing. Single-n experiments use the
    /// first entry.
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub epsilons: Vec<f64>,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("need at least one trial".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n == 0) {
            return Err(Error::Domain("window grid must be nonempty, n >= 1".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("window grid must be strictly increasing".into()));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::Domain("epsilons must lie in (0,1)".into()));
        }
        self.law.build()?;
        SceneryModel::bernoulli(&self.scenery_probs)?;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n_grid[0]
    }

    pub fn scenery(&self) -> Result<SceneryModel> {
        SceneryModel::bernoulli(&self.scenery_probs)
    }

    pub fn describe(&self) -> String {
        format!(
            "law={} scenery={:?} n_grid={:?} trials={} epsilons={:?}",
            self.law.describe(),
            self.scenery_probs,
            self.n_grid,
            self.trials,
            self.epsilons
        )
    }

    pub fn digest(&self) -> u64 {
        fnv64(&self.describe())
    }
}

fn fnv64(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// A seeded Monte Carlo sample set with its provenance.
#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    pub config_digest: u64,
    pub master_seed: u64,
}

impl EmpiricalDistribution {
    pub fn from_samples(mut samples: Vec<f64>, config_digest: u64, master_seed: u64) -> Self {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        EmpiricalDistribution {
            samples,
            config_digest,
            master_seed,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    pub fn median(&self) -> f64 {
        median_of_sorted(&self.samples)
    }

    pub fn sd(&self) -> f64 {
        let m = self.mean();
        (self.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / self.len() as f64).sqrt()
    }

    /// Right-continuous empirical CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    /// Associative, commutative merge of partial sample sets.
    pub fn merge(&self, other: &EmpiricalDistribution) -> EmpiricalDistribution {
        let mut samples = Vec::with_capacity(self.len() + other.len());
        samples.extend_from_slice(&self.samples);
        samples.extend_from_slice(&other.samples);
        EmpiricalDistribution::from_samples(samples, self.config_digest, self.master_seed)
    }
}

pub fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Exact two-sample Kolmogorov–Smirnov statistic (sup-norm distance of the
/// empirical CDFs, merged sweep).
pub fn ks_statistic(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution) -> f64 {
    assert!(!d1.is_empty() && !d2.is_empty());
    let (xs, ys) = (d1.samples(), d2.samples());
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut diff = 0.0f64;
    let mut best = 0.0f64;
    while i < xs.len() || j < ys.len() {
        let take_x = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x <= y,
            (Some(_), None) => true,
            _ => false,
        };
        if take_x {
            let x = xs[i];
            while i < xs.len() && xs[i] == x {
                diff += 1.0 / nx;
                i += 1;
            }
            while j < ys.len() && ys[j] == x {
                diff -= 1.0 / ny;
                j += 1;
            }
        } else {
            let y = ys[j];
            while j < ys.len() && ys[j] == y {
                diff -= 1.0 / ny;
                j += 1;
            }
        }
        best = best.max(diff.abs());
    }
    best
}

/// One-sample Kolmogorov–Smirnov statistic against a reference CDF.
pub fn ks_vs_cdf(d: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = d.len() as f64;
    let mut best = 0.0f64;
    for (i, &x) in d.samples().iter().enumerate() {
        let f = cdf(x);
        best = best.max((f - i as f64 / n).abs());
        best = best.max(((i + 1) as f64 / n - f).abs());
    }
    best
}

fn run_trials<F>(trials: usize, f: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync,
{
    (0..trials as u64).into_par_iter().map(&f).collect()
}

// --- range law ---------------------------------------------------------------

/// Samples of `#V_n / a(n)` in trial order.
pub fn run_range_samples(config: &ExperimentConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let law = config.law.build()?;
    let n = config.n();
    let a = law.normalizing_constant(n)?;
    Ok(run_trials(config.trials, |t| {
        let path = simulate_path(&law, n, trial_seed(config.master_seed, t, Stream::Walk));
        occupation_field(&path).range_size() as f64 / a
    }))
}

/// Samples of `#V_n / a(n)`, one per trial.
pub fn run_range_experiment(config: &ExperimentConfig) -> Result<EmpiricalDistribution> {
    Ok(EmpiricalDistribution::from_samples(
        run_range_samples(config)?,
        config.digest(),
        config.master_seed,
    ))
}

// --- complexity law ----------------------------------------------------------

/// Per-ε output of the complexity pipeline at one window length.
#[derive(Clone, Debug)]
pub struct ComplexityRun {
    pub epsilon: f64,
    /// `log₂Φ` per trial, in trial order.
    pub log2_phi: Vec<f64>,
    /// `(1/a(n))·log₂Φ`, sorted.
    pub normalized: EmpiricalDistribution,
    /// Direct-estimation ball bound at this ε (bits).
    pub log2_q_upper: f64,
    /// Sandwich midpoints `(max(Φ-𝒬,0)+Φ)/2` per trial, in trial order.
    pub midpoints: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ComplexityExperimentResult {
    pub n: usize,
    pub a_n: f64,
    /// `#V_n` per trial, in trial order.
    pub range_sizes: Vec<usize>,
    pub runs: Vec<ComplexityRun>,
}

/// The complexity pipeline at `n = config.n()`: simulate walks (same walk
/// stream as the range experiment, so a shared master seed yields the same
/// paths), then the minimal cylinder-cover count per ε, plus the ball-count
/// bound for the sandwich.
pub fn run_complexity_experiment(
    config: &ExperimentConfig,
) -> Result<ComplexityExperimentResult> {
    config.validate()?;
    let law = config.law.build()?;
    let model = config.scenery()?;
    let n = config.n();
    let a = law.normalizing_constant(n)?;

    let range_sizes: Vec<usize> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let path = simulate_path(&law, n, trial_seed(config.master_seed, t, Stream::Walk));
            occupation_field(&path).range_size()
        })
        .collect();

    let mut runs = Vec::with_capacity(config.epsilons.len());
    for &eps in &config.epsilons {
        // Φ depends on the trial only through #V, so memoize per range size
        let mut phi_cache: HashMap<usize, f64> = HashMap::new();
        let mut log2_phi = Vec::with_capacity(config.trials);
        for &m in &range_sizes {
            let v = match phi_cache.get(&m) {
                Some(&v) => v,
                None => {
                    let v = phi_log2_from_range_size(&model, m, eps)?;
                    phi_cache.insert(m, v);
                    v
                }
            };
            log2_phi.push(v);
        }
        let log2_q_upper = if eps <= 0.5 {
            q_upper_bound(n, eps, model.alphabet_size())?
        } else {
            // the binomial ball bound needs ε ≤ 1/2; past that only the
            // trivial full-count bound remains
            n as f64 * (model.alphabet_size() as f64).log2()
        };
        let midpoints = log2_phi
            .iter()
            .map(|&phi| {
                let (lo, hi) = crate::complexity::sandwich(phi, log2_q_upper);
                0.5 * (lo + hi)
            })
            .collect();
        let normalized = EmpiricalDistribution::from_samples(
            log2_phi.iter().map(|&v| v / a).collect(),
            config.digest(),
            config.master_seed,
        );
        runs.push(ComplexityRun {
            epsilon: eps,
            log2_phi,
            normalized,
            log2_q_upper,
            midpoints,
        });
    }
    Ok(ComplexityExperimentResult {
        n,
        a_n: a,
        range_sizes,
        runs,
    })
}

// --- reference distributions --------------------------------------------------

/// Donsker proxy samples in trial order; see [`brownian_range_reference`].
pub fn brownian_range_samples(steps: usize, trials: usize, seed: u64) -> Vec<f64> {
    assert!(steps >= 1 && trials >= 1);
    run_trials(trials, |t| {
        let mut rng = Rng64::new(trial_seed(seed, t, Stream::Reference));
        let (mut s, mut min, mut max) = (0i64, 0i64, 0i64);
        for _ in 0..steps {
            s += if rng.next_u64() & 1 == 0 { 1 } else { -1 };
            min = min.min(s);
            max = max.max(s);
        }
        let sample = (max - min) as f64 / (steps as f64).sqrt();
        assert!(sample > 0.0);
        sample
    })
}

/// Donsker proxy for the Lebesgue measure of the Brownian unit-time range:
/// ±1 walk, sample `(max - min)/√steps`.
pub fn brownian_range_reference(steps: usize, trials: usize, seed: u64) -> EmpiricalDistribution {
    EmpiricalDistribution::from_samples(
        brownian_range_samples(steps, trials, seed),
        fnv64(&format!("brownian_range steps={steps}")),
        seed,
    )
}

/// Zero mass used by the heavy-tailed reference walk.
pub const STABLE_REFERENCE_ZERO_MASS: f64 = 0.2;

/// Proxy samples of `Leb(B_α([0,1]))` for 1 < α < 2 from long heavy-tailed
/// walks: `#V_steps / a(steps)`. No independent oracle exists at desk scale,
/// so this reference is self-referential (same construction as the law under
/// test at a different size); consumers must flag it as such.
pub fn stable_range_reference(
    alpha: f64,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    Ok(EmpiricalDistribution::from_samples(
        stable_range_samples(alpha, steps, trials, seed)?,
        fnv64(&format!("stable_range alpha={alpha} steps={steps}")),
        seed,
    ))
}

/// Trial-ordered samples behind [`stable_range_reference`].
pub fn stable_range_samples(
    alpha: f64,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (1,2)")));
    }
    let law = JumpLaw::pareto(alpha, STABLE_REFERENCE_ZERO_MASS)?;
    let a = law.normalizing_constant(steps)?;
    Ok(run_trials(trials, |t| {
        let path = simulate_path(&law, steps, trial_seed(seed, t, Stream::Reference));
        occupation_field(&path).range_size() as f64 / a
    }))
}

/// Trial-ordered samples of `S_n / a(n)`.
pub fn normalized_endpoint_samples(config: &ExperimentConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let law = config.law.build()?;
    let n = config.n();
    let a = law.normalizing_constant(n)?;
    Ok(run_trials(config.trials, |t| {
        endpoint(&law, n, trial_seed(config.master_seed, t, Stream::Walk)) as f64 / a
    }))
}

/// Samples of `S_n / a(n)` (distributional check of the stable CLT itself).
pub fn normalized_endpoint_experiment(config: &ExperimentConfig) -> Result<EmpiricalDistribution> {
    Ok(EmpiricalDistribution::from_samples(
        normalized_endpoint_samples(config)?,
        config.digest(),
        config.master_seed,
    ))
}

// --- symmetric stable reference CDF --------------------------------------------

/// CDF of the standard symmetric α-stable law with characteristic function
/// `exp(-|t|^α/α)`, by numerical inversion:
/// `F(x) = 1/2 + (1/π) ∫₀^∞ sin(tx)/t · e^{-t^α/α} dt` (Simpson), with the
/// series tail `P(Y > x) ≈ Γ(α) sin(πα/2)/(π α) · x^{-α}` past the quadrature
/// window for α < 2.
pub struct SasCdf {
    alpha: f64,
    /// `(t, simpson_weight · e^{-t^α/α})`; the `sin(tx)/t` factor is applied
    /// per evaluation (as `x` when t = 0).
    nodes: Vec<(f64, f64)>,
    tail_coeff: f64,
    window: f64,
}

impl SasCdf {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!("alpha {alpha} outside (1,2]")));
        }
        let window = 12.0;
        let t_max = (45.0 * alpha).powf(1.0 / alpha);
        let h = 0.15 / window; // ≥ 50 nodes per oscillation at |x| = window
        let panels = {
            let p = (t_max / h).ceil() as usize;
            p + p % 2
        };
        let h = t_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels + 1);
        for i in 0..=panels {
            let t = i as f64 * h;
            let w = if i == 0 || i == panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            nodes.push((t, w * h / 3.0 * (-t.powf(alpha) / alpha).exp()));
        }
        let tail_coeff =
            gamma(alpha) * (std::f64::consts::PI * alpha / 2.0).sin() / (std::f64::consts::PI * alpha);
        Ok(SasCdf {
            alpha,
            nodes,
            tail_coeff,
            window,
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0 - self.cdf(-x);
        }
        if x > self.window {
            return if self.alpha >= 2.0 {
                1.0
            } else {
                (1.0 - self.tail_coeff * x.powf(-self.alpha)).clamp(0.0, 1.0)
            };
        }
        let mut integral = 0.0;
        for &(t, w) in &self.nodes {
            let osc = if t == 0.0 { x } else { (t * x).sin() / t };
            integral += w * osc;
        }
        (0.5 + integral / std::f64::consts::PI).clamp(0.0, 1.0)
    }
}

/// Standard normal CDF (closed-form reference for α = 2).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

// --- scaling exponent ----------------------------------------------------------

/// Least-squares slope of `log(summary)` against `log(n)`. Needs ≥ 4 points
/// spanning at least a factor 10 in n.
pub fn edim_slope(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 4 {
        return Err(Error::Domain("need at least 4 grid points".into()));
    }
    let n_min = points.iter().map(|p| p.0).min().unwrap();
    let n_max = points.iter().map(|p| p.0).max().unwrap();
    if (n_max as f64) < 10.0 * n_min as f64 {
        return Err(Error::Domain(
            "window grid must span at least a factor 10".into(),
        ));
    }
    if points.iter().any(|&(_, y)| !(y > 0.0)) {
        return Err(Error::Domain("summaries must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, y)| ((n as f64).ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::Domain("degenerate spread in log n".into()));
    }
    Ok((n * sxy - sx * sy) / denom)
}

#[derive(Clone, Debug)]
pub struct EdimResult {
    /// `(n, per-n median of the sandwich midpoints of log₂Φ)`.
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
}

/// Complexity growth exponent across the window grid: per n the median
/// sandwich midpoint, then the log-log slope.
pub fn run_edim_pipeline(config: &ExperimentConfig, epsilon: f64) -> Result<EdimResult> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let sub = ExperimentConfig {
            n_grid: vec![n],
            epsilons: vec![epsilon],
            ..config.clone()
        };
        let result = run_complexity_experiment(&sub)?;
        let mut mids = result.runs[0].midpoints.clone();
        mids.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.push((n, median_of_sorted(&mids)));
    }
    let slope = edim_slope(&points)?;
    Ok(EdimResult { points, slope })
}

// --- local time -----------------------------------------------------------------

/// Trial-ordered samples of `Y_{E,n} = (1/ōa(n)) min_{k ∈ a(n)E} N_{n,k}`.
pub fn local_time_samples(config: &ExperimentConfig, e: &HyperSet) -> Result<Vec<f64>> {
    config.validate()?;
    let law = config.law.build()?;
    let n = config.n();
    let a = law.normalizing_constant(n)?;
    let abar = law.integrated_normalizer(n)?;
    let samples: Vec<Result<f64>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let path = simulate_path(&law, n, trial_seed(config.master_seed, t, Stream::Walk));
            let field = occupation_field(&path);
            min_local_time_over(&field, e, a, abar)
        })
        .collect();
    samples.into_iter().collect()
}

/// Samples of `Y_{E,n}`, one per trial.
pub fn local_time_experiment(
    config: &ExperimentConfig,
    e: &HyperSet,
) -> Result<EmpiricalDistribution> {
    Ok(EmpiricalDistribution::from_samples(
        local_time_samples(config, e)?,
        config.digest(),
        config.master_seed,
    ))
}

// --- dyadic class diagnostics -----------------------------------------------------

/// The per-class share of the low quantile used to set the event threshold θ.
/// The covering lemma only asserts that some positive θ works; half the
/// lower decile of the observed minima keeps the event informative at finite
/// n without drifting into the noise floor at the inner set's edge.
const THETA_QUANTILE: f64 = 0.10;

#[derive(Clone, Debug)]
pub struct ClassDiagnostic {
    pub pair: crate::hyperspace::AdmissiblePair,
    pub trials: usize,
    pub theta: f64,
    /// Empirical frequency of `{min scaled local time over Γ > θ}` in the
    /// class (1 when Γ carries no lattice site).
    pub event_frequency: f64,
}

#[derive(Clone, Debug)]
pub struct Lemma4Report {
    pub kappa: u32,
    /// Fraction of trials lying in admissible classes.
    pub coverage: f64,
    pub classes: Vec<ClassDiagnostic>,
    pub total_trials: usize,
}

impl Lemma4Report {
    /// Fraction of classes whose conditional event frequency exceeds `level`.
    pub fn class_share_above(&self, level: f64) -> f64 {
        if self.classes.is_empty() {
            return 0.0;
        }
        self.classes
            .iter()
            .filter(|c| c.event_frequency > level)
            .count() as f64
            / self.classes.len() as f64
    }

    /// Fraction of all trials lying in classes whose conditional event
    /// frequency exceeds `level`.
    pub fn trial_share_above(&self, level: f64) -> f64 {
        self.classes
            .iter()
            .filter(|c| c.event_frequency > level)
            .map(|c| c.trials)
            .sum::<usize>() as f64
            / self.total_trials as f64
    }
}

/// Smallest κ (capped at 8) whose admissible signature classes carry at
/// least 90% of the samples; falls back to the cap.
pub fn select_kappa(
    samples: &[HyperSet],
    alphabet: usize,
    cal_e: f64,
) -> Result<(u32, crate::hyperspace::CoverReport)> {
    let mut last = None;
    for kappa in 1..=8 {
        let report = lemma4_cover(samples, kappa, alphabet, cal_e)?;
        if report.coverage >= 0.9 {
            return Ok((kappa, report));
        }
        last = Some((kappa, report));
    }
    Ok(last.unwrap())
}

/// Classify trials by the dyadic signature of their scaled range, then
/// estimate within each class the frequency of the event
/// `{min scaled local time over Γ > θ}` with a data-driven θ.
pub fn lemma4_diagnostic(config: &ExperimentConfig, cal_e: f64) -> Result<Lemma4Report> {
    config.validate()?;
    let law = config.law.build()?;
    let model = config.scenery()?;
    let n = config.n();
    let a = law.normalizing_constant(n)?;
    let abar = law.integrated_normalizer(n)?;

    let fields: Vec<OccupationField> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let path = simulate_path(&law, n, trial_seed(config.master_seed, t, Stream::Walk));
            occupation_field(&path)
        })
        .collect();
    let ranges: Vec<HyperSet> = fields.iter().map(|f| scaled_range(f, a)).collect();

    let (kappa, cover) = select_kappa(&ranges, model.alphabet_size(), cal_e)?;
    let mut classes = Vec::with_capacity(cover.classes.len());
    for class in &cover.classes {
        let gamma_set = class.pair.gamma.as_hyperset();
        let (theta, freq) = match gamma_set {
            None => (0.0, 1.0),
            Some(gs) => {
                let ys: Vec<f64> = class
                    .members
                    .iter()
                    .map(|&i| match min_local_time_over(&fields[i], &gs, a, abar) {
                        Ok(y) => y,
                        Err(_) => f64::INFINITY, // no lattice site: vacuous event
                    })
                    .collect();
                let mut sorted = ys.clone();
                sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let idx = (THETA_QUANTILE * (sorted.len() as f64 - 1.0)).floor() as usize;
                let theta = 0.5 * sorted[idx];
                let freq = ys.iter().filter(|&&y| y > theta).count() as f64 / ys.len() as f64;
                (theta, freq)
            }
        };
        classes.push(ClassDiagnostic {
            pair: class.pair.clone(),
            trials: class.members.len(),
            theta,
            event_frequency: freq,
        });
    }
    Ok(Lemma4Report {
        kappa,
        coverage: cover.coverage,
        classes,
        total_trials: config.trials,
    })
}

// --- sandwich width on covering events ---------------------------------------------

#[derive(Clone, Debug)]
pub struct WidthReport {
    pub n: usize,
    pub epsilon: f64,
    /// Best event-based width `q_rwrs_bound/a(n)` per applicable trial.
    pub widths: Vec<f64>,
    pub median_width: f64,
    /// Fraction of trials with at least one applicable admissible pair.
    pub applicable_fraction: f64,
}

/// Per trial, the tightest `log₂𝒬`-bound over dyadic orders κ = 4..=10 whose
/// admissible pair's event holds with `θ = Y/2` (the trial's own minimum) and
/// whose implied ball radius `μ/θ` dominates `epsilon`, normalized by `a(n)`.
pub fn sandwich_width_experiment(
    config: &ExperimentConfig,
    epsilon: f64,
    cal_e: f64,
) -> Result<WidthReport> {
    config.validate()?;
    let law = config.law.build()?;
    let model = config.scenery()?;
    let n = config.n();
    let a = law.normalizing_constant(n)?;
    let abar = law.integrated_normalizer(n)?;
    let alphabet = model.alphabet_size();

    let per_trial: Vec<Option<f64>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let path = simulate_path(&law, n, trial_seed(config.master_seed, t, Stream::Walk));
            let field = occupation_field(&path);
            let range = scaled_range(&field, a);
            let filled = match range.min_positive_gap() {
                Some(g) => range.fill_gaps(2.0 * g),
                None => range.clone(),
            };
            let mut best: Option<f64> = None;
            for kappa in 4..=10 {
                let gamma = dyadic_inner(&filled, kappa);
                let upsilon = dyadic_outer(&filled, kappa);
                let pair = match is_admissible(&gamma, &upsilon, alphabet, cal_e) {
                    Ok(p) if p.admissible => p,
                    _ => continue,
                };
                let y = match gamma.as_hyperset() {
                    Some(gs) => match min_local_time_over(&field, &gs, a, abar) {
                        Ok(y) => y,
                        Err(_) => continue,
                    },
                    None => continue,
                };
                if y <= 0.0 {
                    continue;
                }
                let theta = 0.5 * y;
                if pair.mu / theta < epsilon {
                    continue; // bound's ball radius would not reach ε
                }
                if let Ok(bits) = q_rwrs_bound(&field, &pair, a, abar, theta, alphabet) {
                    let w = bits / a;
                    best = Some(best.map_or(w, |b: f64| b.min(w)));
                }
            }
            best
        })
        .collect();

    let widths: Vec<f64> = per_trial.iter().filter_map(|&w| w).collect();
    let applicable_fraction = widths.len() as f64 / config.trials as f64;
    if widths.is_empty() {
        return Err(Error::NotApplicable(
            "no trial admitted an event-based ball bound".into(),
        ));
    }
    let mut sorted = widths.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(WidthReport {
        n,
        epsilon,
        median_width: median_of_sorted(&sorted),
        widths,
        applicable_fraction,
    })
}
