//! Command-line front end: simulation tables, design condition reports and
//! rejective-design calibration.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad arguments, missing or
//! malformed input files), 3 on runtime failures.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::designs::{calibrate_rejective_p, CalibrationOptions, Design};
use crate::error::Error;
use crate::estimation::{EstimatorKind, QuantileRule};
use crate::montecarlo::{run_scenario, Center, DesignKind, MonteCarloReport, Scenario};
use crate::oracle::{check_conditions, divergence_from_rejective, enumerate_design, rejective_expansion};
use crate::population::SuperPopulationLaw;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Replications per level under `--paper-scale`.
pub const PAPER_SCALE_REPLICATIONS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "survey-ecdf", version, about = "Poverty-rate estimation under unequal-probability sampling designs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation study and write the relative-bias, variance and coverage tables.
    Simulate {
        /// JSON simulation configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Use 1000 populations x 1000 samples per cell.
        #[arg(long)]
        paper_scale: bool,
        /// Worker threads (default: available parallelism).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        workers: Option<u32>,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Enumerate a small design and report its correlation and entropy conditions.
    #[command(visible_alias = "conditions")]
    Oracle {
        /// Design as a JSON literal or a path to a JSON file.
        #[arg(long)]
        design: String,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Sample size used in the scaled statistics (default: expected size).
        #[arg(long)]
        n: Option<f64>,
        /// Also report the divergence from the rejective design with the same
        /// first-order inclusion probabilities.
        #[arg(long)]
        rejective_reference: bool,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        workers: Option<u32>,
    },
    /// Find rejective working probabilities that reproduce target inclusion probabilities.
    Calibrate {
        /// Target inclusion probabilities: a JSON array or numbers separated by
        /// whitespace or commas.
        #[arg(long)]
        pi: PathBuf,
        /// Sample size; must equal the sum of the targets.
        #[arg(long)]
        n: usize,
        /// Output JSON file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = CalibrationOptions::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = CalibrationOptions::default().max_iter)]
        max_iter: usize,
    },
}

/// A population-size / sample-size pair of a simulation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizePair {
    #[serde(rename = "N")]
    pub population_size: usize,
    #[serde(rename = "n")]
    pub sample_size: usize,
}

impl SizePair {
    pub fn label(&self) -> String {
        format!("N={}/n={}", self.population_size, self.sample_size)
    }
}

fn default_designs() -> Vec<DesignKind> {
    vec![DesignKind::Si, DesignKind::Be, DesignKind::Po]
}
fn default_law() -> SuperPopulationLaw {
    SuperPopulationLaw::Exponential { rate: 1.0 }
}
fn default_alpha() -> f64 {
    0.5
}
fn default_beta() -> f64 {
    0.6
}
fn default_replications() -> usize {
    200
}

/// Simulation study: every design is run at every size pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_designs")]
    pub designs: Vec<DesignKind>,
    pub sizes: Vec<SizePair>,
    #[serde(default = "default_law")]
    pub law: SuperPopulationLaw,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_replications")]
    pub populations: usize,
    #[serde(default = "default_replications")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quantile_rule: QuantileRule,
}

impl SimulationConfig {
    pub fn scenarios(&self) -> Vec<Scenario> {
        let mut out = Vec::new();
        for &design in &self.designs {
            for size in &self.sizes {
                out.push(Scenario {
                    population_size: size.population_size,
                    sample_size: size.sample_size,
                    design,
                    law: self.law.clone(),
                    alpha: self.alpha,
                    beta: self.beta,
                    populations: self.populations,
                    samples: self.samples,
                    seed: self.seed,
                    quantile_rule: self.quantile_rule,
                });
            }
        }
        out
    }
}

/// Small design given in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignSpec {
    Srswor {
        #[serde(rename = "N")]
        population_size: usize,
        n: usize,
    },
    Bernoulli {
        #[serde(rename = "N")]
        population_size: usize,
        p: f64,
    },
    Poisson {
        pi: Vec<f64>,
    },
    Rejective {
        p: Vec<f64>,
        n: usize,
    },
}

impl DesignSpec {
    pub fn build(&self) -> crate::Result<Design> {
        match self {
            Self::Srswor { population_size, n } => Design::srswor(*population_size, *n),
            Self::Bernoulli { population_size, p } => Design::bernoulli(*population_size, *p),
            Self::Poisson { pi } => Design::poisson(pi.clone()),
            Self::Rejective { p, n } => Design::rejective(p.clone(), *n),
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

/// Formats a number with 6 significant digits; plain decimals for moderate
/// magnitudes, scientific notation otherwise.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let exponent: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).expect("formatted exponent");
    if (-4..15).contains(&exponent) {
        format!("{:.*}", (5 - exponent).max(0) as usize, x)
    } else {
        sci
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate { config, out, paper_scale, workers, seed } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", config.display())))?;
            let mut cfg: SimulationConfig = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("invalid config {}: {e}", config.display())))?;
            if paper_scale {
                cfg.populations = PAPER_SCALE_REPLICATIONS;
                cfg.samples = PAPER_SCALE_REPLICATIONS;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if cfg.sizes.is_empty() || cfg.designs.is_empty() {
                return Err(Failure::Usage("config needs at least one design and one size pair".into()));
            }
            let pool = thread_pool(workers)?;
            pool.install(|| simulate(&cfg, paper_scale, pool.current_num_threads(), &out))
        }
        Command::Oracle { design, out, n, rejective_reference, workers } => {
            let spec = parse_design_spec(&design)?;
            let pool = thread_pool(workers)?;
            pool.install(|| oracle(&spec, n, rejective_reference, &out))
        }
        Command::Calibrate { pi, n, out, tol, max_iter } => {
            calibrate(&pi, n, &out, CalibrationOptions { tol, max_iter })
        }
    }
}

fn thread_pool(workers: Option<u32>) -> Result<rayon::ThreadPool, Failure> {
    let threads = workers.map_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()), |w| w as usize);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Runtime(format!("cannot start worker threads: {e}")))
}

/// Writes every file or none: on a write error the files already written
/// are removed.
fn write_all(files: &[(PathBuf, String)]) -> Result<(), Failure> {
    let mut written: Vec<&Path> = Vec::new();
    for (path, contents) in files {
        if let Err(e) = fs::write(path, contents) {
            for p in written {
                let _ = fs::remove_file(p);
            }
            return Err(io_failure(path, e));
        }
        written.push(path);
    }
    Ok(())
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Runtime(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Runtime(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Runtime(e.to_string()))
}

/// Estimator rows of a design: SI has a single combined row.
fn estimator_rows(design: DesignKind) -> Vec<(&'static str, EstimatorKind)> {
    if design == DesignKind::Si {
        vec![("HT-HJ", EstimatorKind::Hajek)]
    } else {
        vec![("HT", EstimatorKind::HorvitzThompson), ("HJ", EstimatorKind::Hajek)]
    }
}

/// File name, header and rows of one output table.
pub type Table = (&'static str, Vec<String>, Vec<Vec<String>>);

/// The three result tables.
pub fn simulation_tables(cfg: &SimulationConfig, reports: &[MonteCarloReport]) -> Vec<Table> {
    let find = |d: DesignKind, s: &SizePair| {
        reports
            .iter()
            .find(|r| {
                r.scenario.design == d
                    && r.scenario.population_size == s.population_size
                    && r.scenario.sample_size == s.sample_size
            })
            .expect("one report per cell")
    };
    let columns: Vec<String> = cfg.sizes.iter().map(SizePair::label).collect();
    let header = |lead: &[&str]| lead.iter().map(|s| s.to_string()).chain(columns.iter().cloned()).collect::<Vec<_>>();

    let mut rb = Vec::new();
    let mut var = Vec::new();
    let mut cover = Vec::new();
    for &d in &cfg.designs {
        for (label, kind) in estimator_rows(d) {
            for center in [Center::FiniteN, Center::Model] {
                let lead = [d.label().to_string(), label.to_string(), center.label().to_string()];
                rb.push(
                    lead.iter()
                        .cloned()
                        .chain(cfg.sizes.iter().map(|s| format_number(find(d, s).estimator(kind).rb_phi(center).value)))
                        .collect(),
                );
                cover.push(
                    lead.iter()
                        .cloned()
                        .chain(
                            cfg.sizes.iter().map(|s| format_number(find(d, s).estimator(kind).coverage(center).value)),
                        )
                        .collect(),
                );
            }
            var.push(
                [d.label().to_string(), label.to_string()]
                    .into_iter()
                    .chain(cfg.sizes.iter().map(|s| format_number(find(d, s).estimator(kind).rb_av.value)))
                    .collect(),
            );
        }
    }
    vec![
        ("rb_estimators.csv", header(&["design", "estimator", "center"]), rb),
        ("rb_variance.csv", header(&["design", "estimator"]), var),
        ("coverage.csv", header(&["design", "estimator", "center"]), cover),
    ]
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    paper_scale: bool,
    config: &'a SimulationConfig,
    files: Vec<&'static str>,
    cells: &'a [MonteCarloReport],
}

#[derive(Serialize)]
struct CellTiming {
    design: DesignKind,
    #[serde(rename = "N")]
    population_size: usize,
    n: usize,
    seconds: f64,
}

#[derive(Serialize)]
struct Timings {
    workers: usize,
    total_seconds: f64,
    cells: Vec<CellTiming>,
}

fn simulate(cfg: &SimulationConfig, paper_scale: bool, workers: usize, out: &Path) -> Result<(), Failure> {
    let start = Instant::now();
    let mut reports = Vec::new();
    for sc in cfg.scenarios() {
        let report = run_scenario(&sc).map_err(|e| {
            Failure::Runtime(format!("{} N={} n={}: {e}", sc.design.label(), sc.population_size, sc.sample_size))
        })?;
        for w in &report.warnings {
            eprintln!("warning: {} N={} n={}: {w}", sc.design.label(), sc.population_size, sc.sample_size);
        }
        reports.push(report);
    }
    fs::create_dir_all(out).map_err(|e| io_failure(out, e))?;

    let mut files = Vec::new();
    let mut names = Vec::new();
    for (name, header, rows) in simulation_tables(cfg, &reports) {
        files.push((out.join(name), csv_string(&header, &rows)?));
        names.push(name);
    }
    names.push("manifest.json");
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        paper_scale,
        config: cfg,
        files: names,
        cells: &reports,
    };
    files.push((out.join("manifest.json"), pretty_json(&manifest)?));
    let timings = Timings {
        workers,
        total_seconds: start.elapsed().as_secs_f64(),
        cells: reports
            .iter()
            .map(|r| CellTiming {
                design: r.scenario.design,
                population_size: r.scenario.population_size,
                n: r.scenario.sample_size,
                seconds: r.elapsed_seconds,
            })
            .collect(),
    };
    files.push((out.join("timings.json"), pretty_json(&timings)?));
    write_all(&files)?;
    println!("wrote {} cells to {}", reports.len(), out.display());
    Ok(())
}

fn pretty_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure::Runtime(format!("json: {e}")))
}

fn parse_design_spec(arg: &str) -> Result<DesignSpec, Failure> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read design {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid design specification: {e}")))
}

fn oracle(spec: &DesignSpec, n: Option<f64>, reference: bool, out: &Path) -> Result<(), Failure> {
    let design = spec.build()?;
    let enumerated = enumerate_design(&design)?;
    let n = n.unwrap_or_else(|| design.expected_size());
    let report = check_conditions(&enumerated, n)?;

    let mut rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.condition.to_string(),
                r.statistic.to_string(),
                format_number(r.observed),
                r.bound.to_string(),
                format_number(r.implied_constant),
            ]
        })
        .collect();
    if let Design::Rejective(_) = design {
        let e = rejective_expansion(&enumerated);
        rows.push(vec![
            "expansion".into(),
            "max |pi_ij - pi_i pi_j + pi_i pi_j (1-pi_i)(1-pi_j)/d_N|".into(),
            format_number(e.max_abs_residual),
            "<= C / d_N^2".into(),
            format_number(e.fitted_constant),
        ]);
    }
    if reference {
        let divergence = if design.is_fixed_size() {
            let size = design.expected_size().round() as usize;
            let cal = calibrate_rejective_p(&design.first_order_pi(), size, CalibrationOptions::default())?;
            let rejective = enumerate_design(&Design::rejective(cal.p, size)?)?;
            divergence_from_rejective(&enumerated, &rejective)
        } else {
            // random sample sizes put mass outside any fixed-size support
            f64::INFINITY
        };
        rows.push(vec![
            "D(P||R)".into(),
            "sum_s P(s) ln(P(s) / R(s)), R rejective with the same pi".into(),
            format_number(divergence),
            "-> 0".into(),
            format_number(divergence),
        ]);
    }
    let header: Vec<String> =
        ["condition", "statistic", "observed", "bound", "implied_constant"].iter().map(|s| s.to_string()).collect();
    let table = csv_string(&header, &rows)?;
    fs::create_dir_all(out).map_err(|e| io_failure(out, e))?;
    write_all(&[(out.join("conditions.csv"), table.clone())])?;
    print!("{table}");
    Ok(())
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| e.to_string());
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

#[derive(Serialize)]
struct CalibrationOutput<'a> {
    p: &'a [f64],
    residual: f64,
    iterations: usize,
}

fn calibrate(pi: &Path, n: usize, out: &Path, options: CalibrationOptions) -> Result<(), Failure> {
    let text = fs::read_to_string(pi).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", pi.display())))?;
    let target =
        parse_numbers(&text).map_err(|e| Failure::Usage(format!("invalid targets in {}: {e}", pi.display())))?;
    let cal = calibrate_rejective_p(&target, n, options)?;
    let output = CalibrationOutput { p: &cal.p, residual: cal.residual, iterations: cal.iterations };
    write_all(&[(out.to_path_buf(), pretty_json(&output)?)])?;
    println!("residual {} after {} iterations", format_number(cal.residual), cal.iterations);
    Ok(())
}
