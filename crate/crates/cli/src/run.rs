use crate::config::{parse_config_str, ConfigError};
use crate::intervals::parse_interval_set;
use crate::manifest::RunManifest;
use crate::{Cli, Command, RunArgs};
use rwrs_core::experiments::{
    brownian_range_samples, ks_statistic, lemma4_diagnostic, local_time_samples,
    run_complexity_experiment, run_edim_pipeline, run_range_samples, stable_range_samples,
    EmpiricalDistribution, ExperimentConfig, LawSpec,
};
use rwrs_core::oracle_suite;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or infeasible configuration → exit 2.
    Usage(String),
    /// Filesystem failure → exit 3.
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Flag > config file > default resolution for one run.
struct Resolver {
    flags: RunArgs,
    file: BTreeMap<String, String>,
    /// Resolved values actually used, recorded for the manifest.
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    fn new(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
                parse_config_str(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Resolver {
            flags: args.clone(),
            file,
            resolved: BTreeMap::new(),
        })
    }

    fn record(&mut self, key: &str, value: String) -> String {
        self.resolved.insert(key.to_string(), value.clone());
        value
    }

    fn string(&mut self, key: &str, flag: Option<String>, default: &str) -> String {
        let v = flag
            .or_else(|| self.file.get(key).cloned())
            .unwrap_or_else(|| default.to_string());
        self.record(key, v)
    }

    fn parse<T: std::str::FromStr + std::fmt::Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            self.record(key, v.to_string());
            return Ok(v);
        }
        if let Some(raw) = self.file.get(key).cloned() {
            let v = raw
                .parse::<T>()
                .map_err(|_| usage(format!("config key {key}: cannot parse {raw:?}")))?;
            self.record(key, v.to_string());
            return Ok(v);
        }
        self.record(key, default.to_string());
        Ok(default)
    }

    fn flag_bool(&mut self, key: &str, flag: bool, default: bool) -> Result<bool, CliError> {
        let v = if flag {
            true
        } else if let Some(raw) = self.file.get(key) {
            match raw.as_str() {
                "true" => true,
                "false" => false,
                other => return Err(usage(format!("config key {key}: expected true/false, got {other:?}"))),
            }
        } else {
            default
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    fn law(&mut self) -> Result<LawSpec, CliError> {
        let unit = self.flag_bool("unit_step", self.flags.unit_step, false)?;
        if unit {
            return Ok(LawSpec::UnitStep);
        }
        let alpha = self.parse("alpha", self.flags.alpha, 2.0)?;
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(usage(format!(
                "alpha must lie in (1, 2], got {alpha} (the 1-stable and flatter cases need different scaling)"
            )));
        }
        if alpha == 2.0 {
            let laziness = self.parse("laziness", self.flags.laziness, 0.5)?;
            LawSpec::Lazy { laziness }
                .build()
                .map_err(usage)
                .map(|_| LawSpec::Lazy { laziness })
        } else {
            let zero_mass = self.parse("zero_mass", self.flags.zero_mass, 0.2)?;
            LawSpec::Pareto { alpha, zero_mass }
                .build()
                .map_err(usage)
                .map(|_| LawSpec::Pareto { alpha, zero_mass })
        }
    }

    fn probs(&mut self) -> Result<Vec<f64>, CliError> {
        let raw = self.string("probs", self.flags.probs.clone(), "0.5,0.5");
        raw.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("bad probability {p:?}")))
            })
            .collect()
    }

    fn experiment_config(&mut self, n_default: usize, trials_default: usize) -> Result<ExperimentConfig, CliError> {
        let law = self.law()?;
        let scenery_probs = self.probs()?;
        let n = self.parse("n", self.flags.n, n_default)?;
        let trials = self.parse("trials", self.flags.trials, trials_default)?;
        let seed = self.parse("seed", self.flags.seed, 0u64)?;
        let eps = self.parse("eps", self.flags.eps, 0.1)?;
        let cfg = ExperimentConfig {
            law,
            scenery_probs,
            n_grid: vec![n],
            trials,
            epsilons: vec![eps],
            master_seed: seed,
        };
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Summary {
    mean: f64,
    median: f64,
    sd: f64,
    n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ks_vs_reference: Option<f64>,
    config_digest: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_referential: Option<bool>,
}

impl Summary {
    fn from_samples(samples: &[f64], manifest: &RunManifest) -> Summary {
        let d = EmpiricalDistribution::from_samples(samples.to_vec(), 0, manifest.seed);
        Summary {
            mean: d.mean(),
            median: d.median(),
            sd: d.sd(),
            n_samples: d.len(),
            ks_vs_reference: None,
            config_digest: manifest.digest.clone(),
            seed: manifest.seed,
            slope: None,
            coverage: None,
            kappa: None,
            self_referential: None,
        }
    }
}

fn write_file(path: &Path, bytes: &str) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn emit(
    manifest: &RunManifest,
    columns: &str,
    rows: &[String],
    summary: &Summary,
    out: &Option<std::path::PathBuf>,
    json_out: &Option<std::path::PathBuf>,
) -> Result<(), CliError> {
    if let Some(path) = out {
        let mut csv = manifest.render_header();
        csv.push_str(columns);
        csv.push('\n');
        for row in rows {
            csv.push_str(row);
            csv.push('\n');
        }
        write_file(path, &csv)?;
    }
    if let Some(path) = json_out {
        let mut text = serde_json::to_string_pretty(summary)
            .map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        write_file(path, &text)?;
    }
    Ok(())
}

fn sample_rows(samples: &[f64]) -> Vec<String> {
    samples
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{i},{v}"))
        .collect()
}

/// Run one parsed invocation; returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32, CliError> {
    if let Ok(raw) = std::env::var("RWRS_THREADS") {
        if let Ok(k) = raw.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    match cli.command {
        Command::Range(args) => range_cmd(args),
        Command::Complexity(args) => complexity_cmd(args),
        Command::Localtime(args) => localtime_cmd(args),
        Command::Edim(args) => edim_cmd(args),
        Command::Reference(args) => reference_cmd(args),
        Command::Lemma4(args) => lemma4_cmd(args),
        Command::Smalltest(args) => smalltest_cmd(args),
    }
}

fn range_cmd(args: RunArgs) -> Result<i32, CliError> {
    let mut r = Resolver::new(&args)?;
    let cfg = r.experiment_config(100_000, 1000)?;
    let samples = run_range_samples(&cfg).map_err(usage)?;
    let manifest = RunManifest::new("range", cfg.master_seed, r.resolved.clone());
    let mut summary = Summary::from_samples(&samples, &manifest);
    if args.ks_reference {
        summary.ks_vs_reference = Some(ks_for_range(&cfg, &samples)?);
        if !matches!(cfg.law, LawSpec::Lazy { .. }) {
            summary.self_referential = Some(true);
        }
    }
    emit(&manifest, "trial,sample", &sample_rows(&samples), &summary, &args.out, &args.json_out)?;
    println!(
        "range: n={} trials={} mean={:.6} median={:.6}",
        cfg.n(),
        cfg.trials,
        summary.mean,
        summary.median
    );
    Ok(0)
}

fn ks_for_range(cfg: &ExperimentConfig, samples: &[f64]) -> Result<f64, CliError> {
    let d = EmpiricalDistribution::from_samples(samples.to_vec(), 0, cfg.master_seed);
    let reference = match cfg.law {
        LawSpec::Lazy { .. } | LawSpec::UnitStep => {
            brownian_range_samples(cfg.n(), cfg.trials, cfg.master_seed)
        }
        LawSpec::Pareto { alpha, .. } => {
            stable_range_samples(alpha, cfg.n(), cfg.trials, cfg.master_seed).map_err(usage)?
        }
    };
    let dr = EmpiricalDistribution::from_samples(reference, 0, cfg.master_seed);
    Ok(ks_statistic(&d, &dr))
}

fn complexity_cmd(args: RunArgs) -> Result<i32, CliError> {
    let mut r = Resolver::new(&args)?;
    let cfg = r.experiment_config(100_000, 1000)?;
    let result = run_complexity_experiment(&cfg).map_err(usage)?;
    let run = &result.runs[0];
    let samples: Vec<f64> = run.log2_phi.iter().map(|&v| v / result.a_n).collect();
    let manifest = RunManifest::new("complexity", cfg.master_seed, r.resolved.clone());
    let mut summary = Summary::from_samples(&samples, &manifest);
    if args.ks_reference {
        summary.ks_vs_reference = Some(ks_for_range(&cfg, &samples)?);
        if !matches!(cfg.law, LawSpec::Lazy { .. }) {
            summary.self_referential = Some(true);
        }
    }
    emit(&manifest, "trial,sample", &sample_rows(&samples), &summary, &args.out, &args.json_out)?;
    println!(
        "complexity: n={} eps={} trials={} mean={:.6} q_upper_bits={:.3}",
        result.n,
        run.epsilon,
        cfg.trials,
        summary.mean,
        run.log2_q_upper
    );
    Ok(0)
}

fn localtime_cmd(args: RunArgs) -> Result<i32, CliError> {
    let mut r = Resolver::new(&args)?;
    let cfg = r.experiment_config(100_000, 1000)?;
    let raw = r.string("interval", args.interval.clone(), "-0.5..0.5");
    let e = parse_interval_set(&raw).map_err(usage)?;
    let samples = local_time_samples(&cfg, &e).map_err(usage)?;
    let manifest = RunManifest::new("localtime", cfg.master_seed, r.resolved.clone());
    let summary = Summary::from_samples(&samples, &manifest);
    emit(&manifest, "trial,sample", &sample_rows(&samples), &summary, &args.out, &args.json_out)?;
    println!(
        "localtime: n={} interval={} trials={} mean={:.6}",
        cfg.n(),
        raw,
        cfg.trials,
        summary.mean
    );
    Ok(0)
}

fn edim_cmd(args: RunArgs) -> Result<i32, CliError> {
    let mut r = Resolver::new(&args)?;
    let law = r.law()?;
    let scenery_probs = r.probs()?;
    let grid_raw = r.string(
        "n_grid",
        args.n_grid.clone(),
        "4096,8192,16384,32768,65536,131072",
    );
    let n_grid: Vec<usize> = grid_raw
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| usage(format!("bad grid entry {p:?}"))))
        .collect::<Result<_, _>>()?;
    let trials = r.parse("trials", args.trials, 500)?;
    let seed = r.parse("seed", args.seed, 0u64)?;
    let eps = r.parse("eps", args.eps, 0.1)?;
    let cfg = ExperimentConfig {
        law,
        scenery_probs,
        n_grid,
        trials,
        epsilons: vec![eps],
        master_seed: seed,
    };
    cfg.validate().map_err(usage)?;
    let result = run_edim_pipeline(&cfg, eps).map_err(usage)?;
    let manifest = RunManifest::new("edim", seed, r.resolved.clone());
    let summaries: Vec<f64> = result.points.iter().map(|&(_, y)| y).collect();
    let mut summary = Summary::from_samples(&summaries, &manifest);
    summary.slope = Some(result.slope);
    let rows: Vec<String> = result
        .points
        .iter()
        .map(|&(n, y)| format!("{n},{y}"))
        .collect();
    emit(&manifest, "n,summary", &rows, &summary, &args.out, &args.json_out)?;
    println!("edim: grid={:?} slope={:.4}", cfg.n_grid, result.slope);
    Ok(0)
}

fn reference_cmd(args: RunArgs) -> Result<i32, CliError> {
    let mut r = Resolver::new(&args)?;
    let kind = r.string("kind", args.kind.clone(), "brownian");
    let steps = r.parse("steps", args.steps, 100_000)?;
    let trials = r.parse("trials", args.trials, 1000)?;
    let seed = r.parse("seed", args.seed, 0u64)?;
    let (samples, self_ref) = match kind.as_str() {
        "brownian" => (brownian_range_samples(steps, trials, seed), false),
        "stable" => {
            let alpha = r.parse("alpha", args.alpha, 1.5)?;
            if !(alpha > 1.0 && alpha < 2.0) {
                return Err(usage(format!("stable reference needs alpha in (1,2), got {alpha}")));
            }
            (
                stable_range_samples(alpha, steps, trials, seed).map_err(usage)?,
                true,
            )
        }
        other => return Err(usage(format!("unknown reference kind {other:?}"))),
    };
    let manifest = RunManifest::new("reference", seed, r.resolved.clone());
    let mut summary = Summary::from_samples(&samples, &manifest);
    if self_ref {
        // no independent oracle exists for the heavy-tailed range measure;
        // these samples come from the same construction they calibrate
        summary.self_referential = Some(true);
    }
    emit(&manifest, "trial,sample", &sample_rows(&samples), &summary, &args.out, &args.json_out)?;
    println!(
        "reference: kind={kind} steps={steps} trials={trials} mean={:.6}",
        summary.mean
    );
    Ok(0)
}

fn lemma4_cmd(args: RunArgs) -> Result<i32, CliError> {
    let mut r = Resolver::new(&args)?;
    let cfg = r.experiment_config(100_000, 500)?;
    let cal_e = r.parse("cal_e", args.cal_e, 0.5)?;
    if cal_e <= 0.0 {
        return Err(usage("cal_e must be positive"));
    }
    let report = lemma4_diagnostic(&cfg, cal_e).map_err(usage)?;
    let manifest = RunManifest::new("lemma4", cfg.master_seed, r.resolved.clone());
    let freqs: Vec<f64> = report.classes.iter().map(|c| c.event_frequency).collect();
    let mut summary = Summary::from_samples(&freqs, &manifest);
    summary.coverage = Some(report.coverage);
    summary.kappa = Some(report.kappa);
    let rows: Vec<String> = report
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            format!(
                "{i},{},{},{},{},{},{}",
                c.trials, c.theta, c.event_frequency, c.pair.mu, c.pair.leb_upsilon, c.pair.admissible
            )
        })
        .collect();
    emit(
        &manifest,
        "class,trials,theta,event_frequency,mu,leb_upsilon,admissible",
        &rows,
        &summary,
        &args.out,
        &args.json_out,
    )?;
    println!(
        "lemma4: kappa={} classes={} coverage={:.4} trial_share(freq>0.9)={:.4}",
        report.kappa,
        report.classes.len(),
        report.coverage,
        report.trial_share_above(0.9)
    );
    Ok(0)
}

fn smalltest_cmd(args: RunArgs) -> Result<i32, CliError> {
    let mut r = Resolver::new(&args)?;
    let instances = r.parse("instances", args.instances, 1000)?;
    let seed = r.parse("seed", args.seed, 0u64)?;
    let report = oracle_suite::run(instances, seed);
    let mut text = String::new();
    let _ = writeln!(text, "smalltest: {} randomized instances", report.instances);
    let _ = writeln!(text, "  phi enumeration agreement: {} checks", report.phi_agreement_checks);
    let _ = writeln!(text, "  exact sandwich:            {} checks", report.sandwich_checks);
    let _ = writeln!(text, "  alphabet-merge monotone:   {} checks", report.merge_monotonicity_checks);
    let _ = writeln!(text, "  window refinement:         {} checks", report.refinement_checks);
    let _ = writeln!(text, "  greedy cover optimality:   {} checks", report.greedy_cover_checks);
    print!("{text}");
    if report.passed() {
        println!("smalltest: PASS");
        Ok(0)
    } else {
        for f in &report.failures {
            eprintln!("smalltest failure: {f}");
        }
        println!("smalltest: FAIL ({} failures)", report.failures.len());
        Ok(1)
    }
}
