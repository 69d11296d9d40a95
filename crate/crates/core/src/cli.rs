//! Command-line front end: reads an experiment file, runs one command and
//! writes CSV/JSON artifacts plus a manifest into an output directory.
//!
//! Exit codes: 0 success, 1 failed checks, 2 invalid input, 3 budget
//! exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::convex::{ConvexSet, Norm};
use crate::entropy::{decay_analysis, entropy_table, split_seed, MonteCarloSpec};
use crate::error::Error;
use crate::grid::GridSpec;
use crate::legendre::rate_function;
use crate::measures::DistributionSpec;
use crate::verify::{check_sanov, relative_entropy, run_suite, type_grid, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateBlock {
    pub primal: GridSpec,
    pub dual: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayBlock {
    pub set: ConvexSet,
    #[serde(default = "default_decay_n")]
    pub n_max: usize,
}

fn default_decay_n() -> usize {
    200
}

/// Sample count and optional tilt; the seed comes from the experiment seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloBlock {
    pub samples: usize,
    #[serde(default)]
    pub tilt: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyBlock {
    pub points: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub n_max: usize,
    #[serde(default = "default_norm")]
    pub norm: Norm,
}

fn default_norm() -> Norm {
    Norm::L2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SanovBlock {
    #[serde(default = "default_denominator")]
    pub denominator: usize,
    #[serde(default = "default_sanov_n")]
    pub n_max: usize,
    #[serde(default = "default_sanov_radius")]
    pub radius: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for SanovBlock {
    fn default() -> Self {
        SanovBlock {
            denominator: default_denominator(),
            n_max: default_sanov_n(),
            radius: default_sanov_radius(),
            tolerance: default_tolerance(),
        }
    }
}

fn default_denominator() -> usize {
    10
}
fn default_sanov_n() -> usize {
    600
}
fn default_sanov_radius() -> f64 {
    0.02
}
fn default_tolerance() -> f64 {
    0.05
}

/// One experiment file: a law plus optional per-command blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub distribution: DistributionSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub rate: Option<RateBlock>,
    #[serde(default)]
    pub decay: Option<DecayBlock>,
    #[serde(default)]
    pub entropy: Option<EntropyBlock>,
    #[serde(default)]
    pub monte_carlo: Option<MonteCarloBlock>,
    #[serde(default)]
    pub verify: Option<SuiteConfig>,
    #[serde(default)]
    pub sanov: Option<SanovBlock>,
}

#[derive(Debug, Parser)]
#[command(name = "cramer", version, about = "Rate functions, decay sequences and theorem checks for empirical means")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Experiment file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate s = −p* on a primal lattice.
    Rate {
        #[command(flatten)]
        common: Common,
        /// Primal lattice, e.g. "[-3,3]x601".
        #[arg(long)]
        primal: Option<GridSpec>,
        /// Dual lattice for the pressure, e.g. "[-40,40]x2001".
        #[arg(long)]
        dual: Option<GridSpec>,
    },
    /// Exact decay sequence (1/n) log μ_n(C).
    Decay {
        #[command(flatten)]
        common: Common,
        /// Convex set file (JSON).
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Entropy estimates at points.
    Entropy {
        #[command(flatten)]
        common: Common,
        /// A point, coordinates separated by commas; repeatable.
        #[arg(long = "at", allow_hyphen_values = true)]
        at: Vec<String>,
        /// Decreasing radii separated by commas.
        #[arg(long)]
        radii: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Run the check suite; exit code 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_max: Option<usize>,
        /// Only these checks, separated by commas.
        #[arg(long)]
        checks: Option<String>,
    },
    /// Entropy on type classes against −D(ν‖μ) for a finite alphabet.
    Sanov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_max: Option<usize>,
    },
}

/// Failures mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl Failure {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure::Invalid(format!("{}: {e}", path.display()))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the program on `args` (including the program name) and returns the
/// exit code. Messages go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let budget = std::error::Error::source(&e)
                .and_then(|s| s.downcast_ref::<Error>())
                .is_some_and(|s| matches!(s, Error::BudgetExceeded { .. }));
            let code = match (e.use_stderr(), budget) {
                (false, _) => EXIT_OK,
                (true, true) => EXIT_BUDGET,
                (true, false) => EXIT_INVALID,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            EXIT_BUDGET
        }
    }
}

struct Loaded {
    spec: ExperimentSpec,
    hash: String,
    seed: u64,
    out: PathBuf,
}

fn load(common: &Common) -> CliResult<Loaded> {
    let bytes = std::fs::read(&common.spec).map_err(|e| Failure::io(&common.spec, e))?;
    let spec: ExperimentSpec = serde_json::from_slice(&bytes).map_err(|e| Failure::io(&common.spec, e))?;
    let hash = Sha256::digest(&bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    std::fs::create_dir_all(&common.out).map_err(|e| Failure::io(&common.out, e))?;
    Ok(Loaded {
        seed: common.seed.unwrap_or(spec.seed),
        spec,
        hash,
        out: common.out.clone(),
    })
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| Failure::io(&path, e))?;
    tmp.persist(&path).map_err(|e| Failure::io(&path, e.error))?;
    Ok(())
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn write_manifest(l: &Loaded, command: &str, files: &[&str], extra: serde_json::Value) -> CliResult<()> {
    let manifest = json!({
        "command": command,
        "spec_sha256": l.hash,
        "seed": l.seed,
        "versions": { "cramer": env!("CARGO_PKG_VERSION") },
        "files": files,
        "parameters": extra,
    });
    write_atomic(&l.out, "manifest.json", &to_json(&manifest))
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Invalid(format!("cannot parse number {t:?}")))
        })
        .collect()
}

fn monte_carlo(l: &Loaded, label: &str) -> Option<MonteCarloSpec> {
    l.spec.monte_carlo.as_ref().map(|m| MonteCarloSpec {
        samples: m.samples,
        seed: split_seed(l.seed, label),
        tilt: m.tilt.clone(),
    })
}

fn execute(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::Rate { common, primal, dual } => {
            let l = load(&common)?;
            let block = l.spec.rate.clone();
            let primal = primal
                .or_else(|| block.as_ref().map(|b| b.primal.clone()))
                .ok_or_else(|| Failure::Invalid("rate needs a primal lattice (--primal or rate.primal)".into()))?;
            let dual = dual
                .or_else(|| block.as_ref().map(|b| b.dual.clone()))
                .ok_or_else(|| Failure::Invalid("rate needs a dual lattice (--dual or rate.dual)".into()))?;
            let s = rate_function(&l.spec.distribution, &primal, &dual)?;
            write_atomic(&l.out, "rate.grid.json", &(s.header_json() + "\n"))?;
            write_atomic(&l.out, "rate.csv", &s.to_csv())?;
            write_manifest(
                &l,
                "rate",
                &["rate.grid.json", "rate.csv"],
                json!({ "primal": primal, "dual": dual }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Decay { common, set, n_max } => {
            let l = load(&common)?;
            let set = match set {
                Some(path) => {
                    let bytes = std::fs::read(&path).map_err(|e| Failure::io(&path, e))?;
                    serde_json::from_slice::<ConvexSet>(&bytes).map_err(|e| Failure::io(&path, e))?
                }
                None => l
                    .spec
                    .decay
                    .as_ref()
                    .map(|b| b.set.clone())
                    .ok_or_else(|| Failure::Invalid("decay needs a set (--set or decay.set)".into()))?,
            };
            set.validate()?;
            let n_max = n_max
                .or_else(|| l.spec.decay.as_ref().map(|b| b.n_max))
                .unwrap_or_else(default_decay_n);
            let report = decay_analysis(&l.spec.distribution, &set, n_max)?;
            write_atomic(&l.out, "decay.csv", &report.to_csv())?;
            write_atomic(&l.out, "decay.json", &to_json(&report.summary_json()))?;
            write_manifest(&l, "decay", &["decay.csv", "decay.json"], json!({ "set": set, "n_max": n_max }))?;
            Ok(EXIT_OK)
        }
        Command::Entropy {
            common,
            at,
            radii,
            n_max,
        } => {
            let l = load(&common)?;
            let block = l.spec.entropy.clone();
            let points = if at.is_empty() {
                block.as_ref().map(|b| b.points.clone()).unwrap_or_default()
            } else {
                at.iter().map(|p| parse_list(p)).collect::<CliResult<_>>()?
            };
            if points.is_empty() {
                return Err(Failure::Invalid("entropy needs points (--at or entropy.points)".into()));
            }
            let radii = match radii {
                Some(r) => parse_list(&r)?,
                None => block
                    .as_ref()
                    .map(|b| b.radii.clone())
                    .ok_or_else(|| Failure::Invalid("entropy needs radii (--radii or entropy.radii)".into()))?,
            };
            let n_max = n_max
                .or_else(|| block.as_ref().map(|b| b.n_max))
                .ok_or_else(|| Failure::Invalid("entropy needs n_max (--n-max or entropy.n_max)".into()))?;
            let norm = block.as_ref().map_or(Norm::L2, |b| b.norm);
            let mc = monte_carlo(&l, "entropy");
            let est = entropy_table(&l.spec.distribution, &points, &radii, n_max, norm, mc.as_ref())?;
            let d = l.spec.distribution.dim();
            let mut csv = String::new();
            for k in 0..d {
                let _ = write!(csv, "x{k},");
            }
            csv.push_str("radius,sup,argmax,censored\n");
            for e in &est {
                for row in &e.table {
                    for c in &e.point {
                        let _ = write!(csv, "{c},");
                    }
                    let argmax = row.argmax.map_or(String::new(), |n| n.to_string());
                    let _ = writeln!(csv, "{},{},{argmax},{}", row.radius, row.sup, row.censored);
                }
            }
            write_atomic(&l.out, "entropy.csv", &csv)?;
            write_atomic(&l.out, "entropy.json", &to_json(&est))?;
            write_manifest(
                &l,
                "entropy",
                &["entropy.csv", "entropy.json"],
                json!({ "radii": radii, "n_max": n_max, "norm": norm, "monte_carlo": mc }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify { common, n_max, checks } => {
            let l = load(&common)?;
            let mut cfg = l.spec.verify.clone().unwrap_or_default();
            if n_max.is_some() {
                cfg.n_max = n_max;
            }
            if let Some(c) = checks {
                cfg.checks = Some(c.split(',').map(|s| s.trim().to_string()).collect());
            }
            let reports = run_suite(&l.spec.distribution, &cfg)?;
            write_atomic(&l.out, "report.json", &to_json(&reports))?;
            write_manifest(&l, "verify", &["report.json"], serde_json::to_value(&cfg).expect("serialisable"))?;
            let mut all = true;
            for r in &reports {
                eprintln!(
                    "{:<24} {}  worst margin {} (tolerance {})",
                    r.check_name,
                    if r.passed { "pass" } else { "FAIL" },
                    r.worst_margin,
                    r.tolerance
                );
                all &= r.passed;
            }
            Ok(if all { EXIT_OK } else { EXIT_CHECKS_FAILED })
        }
        Command::Sanov { common, n_max } => {
            let l = load(&common)?;
            let DistributionSpec::FiniteAlphabet(a) = &l.spec.distribution else {
                return Err(Failure::Invalid("sanov needs an alphabet distribution".into()));
            };
            let mut block = l.spec.sanov.clone().unwrap_or_default();
            if let Some(n) = n_max {
                block.n_max = n;
            }
            let types = type_grid(a.letters(), block.denominator, true);
            let report = check_sanov(a.weights(), &types, block.n_max, block.radius, block.tolerance)?;
            let mut csv = String::new();
            for k in 0..a.letters() {
                let _ = write!(csv, "nu{k},");
            }
            csv.push_str("estimate,minus_kl,gap\n");
            for c in &report.details {
                for v in c.witness.as_array().expect("type vector") {
                    let _ = write!(csv, "{v},");
                }
                let _ = writeln!(csv, "{},{},{}", c.lhs, c.rhs, c.margin);
            }
            debug_assert!(types
                .iter()
                .zip(&report.details)
                .all(|(t, c)| (c.rhs.value() + relative_entropy(t, a.weights())).abs() < 1e-12));
            write_atomic(&l.out, "sanov.csv", &csv)?;
            write_atomic(&l.out, "report.json", &to_json(&[&report]))?;
            write_manifest(&l, "sanov", &["sanov.csv", "report.json"], serde_json::to_value(&block).expect("serialisable"))?;
            eprintln!(
                "sanov {}  worst margin {} (tolerance {})",
                if report.passed { "pass" } else { "FAIL" },
                report.worst_margin,
                report.tolerance
            );
            Ok(if report.passed { EXIT_OK } else { EXIT_CHECKS_FAILED })
        }
    }
}
