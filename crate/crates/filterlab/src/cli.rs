//! Command-line front end: reproducible JSON reports over the library.
//!
//! Every subcommand prints one JSON document to stdout (and optionally to
//! `--out`), with the full run configuration and library version embedded
//! so results are replayable from the output alone. A one-line summary
//! goes to stderr. Exit codes: 0 success, 2 usage/parse problems,
//! 3 numeric/cap problems.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::convergence::{
    f_limit_check, slln_experiment, ConvergenceError, LimitConfig, SeqParser,
};
use crate::density::{
    classify_in_ideal, density_estimate, parse_ideal_spec, usable_checkpoints, ClassifyConfig,
    DensityError, IdealSpec,
};
use crate::num::{parse_checkpoints, parse_natural_u128};
use crate::setexpr::{SetError, SetParser};
use crate::ultralab::sweeps::{run_sweeps, SweepSelect};
use crate::ultralab::{UltralabError, Universe};
use crate::weights::{parse_weight_seq, WeightError};
use crate::witness::{
    erdos_ulam_blocks, frechet_blocks, summable_blocks, verify_conglomeration, WitnessError,
};

/// Default ceiling for greedy cut searches; far beyond any enumeration
/// range, because the searches are logarithmic.
pub const DEFAULT_CUT_CAP: u128 = 10u128.pow(30);

#[derive(Parser, Debug)]
#[command(
    name = "filterlab",
    version,
    about = "Weighted densities, filter limits, conglomeration witnesses, and finite ultrafilter lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weighted density estimate of a set along checkpoints.
    Density(DensityArgs),
    /// Build a block-partition witness and verify it over an index set.
    Witness(WitnessArgs),
    /// Classify a set against a filter ideal/grill.
    Classify(ClassifyArgs),
    /// Check a sequence's filter limit against a candidate value.
    Limit(LimitArgs),
    /// Seeded coin-flip Cesàro-mean experiment.
    Slln(SllnArgs),
    /// Exhaustive theorem sweeps on a finite universe.
    Ultralab(UltralabArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    /// Set DSL expression, e.g. "arith(2,2)" or "diff(cofinite{},squares)".
    #[arg(long)]
    pub set: String,
    /// Weight spec: constant(c) | harmonic | powerlaw(p) | table(..;tail).
    #[arg(long, default_value = "constant(1)")]
    pub weights: String,
    /// Increasing checkpoint list, e.g. "1e2,1e4,1e6".
    #[arg(long, default_value = "1e2,1e4,1e6")]
    pub checkpoints: String,
    /// Named block partitions for blockunion(...), as name=path.json.
    #[arg(long = "blocks")]
    pub blocks: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    /// frechet | summable | erdos_ulam.
    #[arg(long)]
    pub kind: String,
    #[arg(long, default_value = "constant(1)")]
    pub weights: String,
    /// Number of blocks to construct.
    #[arg(long)]
    pub count: u32,
    /// Cut search ceiling (plain or scientific, e.g. 1e22).
    #[arg(long, default_value = "1e30")]
    pub cap: String,
    /// Index set over block numbers for the verification report.
    #[arg(long, default_value = "arith(1,1)")]
    pub index: String,
    /// Horizon for the empirical cross-check.
    #[arg(long, default_value = "1e6")]
    pub horizon: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    /// frechet | summable:<weights> | eu:<weights>.
    #[arg(long)]
    pub ideal: String,
    #[arg(long)]
    pub set: String,
    /// Scan budget for heuristic summable verdicts.
    #[arg(long, default_value = "1e6")]
    pub budget: String,
    #[arg(long, default_value = "1e2,1e4,1e6")]
    pub checkpoints: String,
    /// Density threshold for heuristic grill verdicts.
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    #[arg(long = "blocks")]
    pub blocks: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct LimitArgs {
    /// Sequence DSL, e.g. "piecewise(squares, const(1), const(0))".
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub candidate: f64,
    /// frechet | summable:<weights> | eu:<weights>.
    #[arg(long)]
    pub ideal: String,
    /// Decreasing positive epsilons.
    #[arg(long, default_value = "0.5,0.1")]
    pub epsilons: String,
    /// Scan horizon for table-backed exception sets.
    #[arg(long, default_value = "1e6")]
    pub horizon: String,
    #[arg(long, default_value = "1e6")]
    pub budget: String,
    #[arg(long, default_value = "1e2,1e4,1e6")]
    pub checkpoints: String,
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    #[arg(long = "blocks")]
    pub blocks: Vec<String>,
    /// Directory for table(file) sequence data.
    #[arg(long)]
    pub tables_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SllnArgs {
    /// Prefix length per trial.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 100)]
    pub trials: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct UltralabArgs {
    #[command(subcommand)]
    pub mode: UltralabMode,
}

#[derive(Subcommand, Debug)]
pub enum UltralabMode {
    /// Run exhaustive checks of the lattice facts on {1, …, n}.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    /// Universe size (2..=6 for exhaustive sweeps).
    #[arg(long)]
    pub n: u8,
    /// all | union | membership | uniqueness | partition | grill | convex | poorness.
    #[arg(long, default_value = "all")]
    pub theorem: String,
    /// Randomized cases for the counting-bound sweep.
    #[arg(long, default_value_t = 10_000)]
    pub poorness_cases: u64,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unparsable DSL/specs: exit 2.
    Usage(String),
    /// Caps hit, horizons exceeded, undefined ratios: exit 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<SetError> for CliError {
    fn from(e: SetError) -> Self {
        match e {
            SetError::BeyondHorizon { .. } | SetError::EnumerationCap { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<WeightError> for CliError {
    fn from(e: WeightError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::ZeroDenominator { .. } => CliError::Numeric(e.to_string()),
            DensityError::Set(inner) => inner.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::CapExceeded { .. } | WitnessError::ZeroFirstWeight => {
                CliError::Numeric(e.to_string())
            }
            WitnessError::Set(inner) => inner.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ConvergenceError> for CliError {
    fn from(e: ConvergenceError) -> Self {
        match e {
            ConvergenceError::TableHorizon { .. } => CliError::Numeric(e.to_string()),
            ConvergenceError::Set(inner) => inner.into(),
            ConvergenceError::Density(inner) => inner.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<UltralabError> for CliError {
    fn from(e: UltralabError) -> Self {
        match e {
            UltralabError::SweepTooLarge(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    config: RunConfig<'a, C>,
    library_version: &'static str,
    result: R,
}

#[derive(Serialize)]
struct RunConfig<'a, C: Serialize> {
    subcommand: &'a str,
    #[serde(flatten)]
    args: &'a C,
}

#[derive(Debug)]
pub struct RunOutput {
    pub json: String,
    pub summary: String,
}

fn envelope<C: Serialize, R: Serialize>(subcommand: &str, args: &C, result: R) -> String {
    let doc = Envelope {
        config: RunConfig { subcommand, args },
        library_version: env!("CARGO_PKG_VERSION"),
        result,
    };
    serde_json::to_string_pretty(&doc).expect("reports serialize")
}

fn nat64(text: &str, flag: &str) -> Result<u64, CliError> {
    crate::num::parse_natural_u64(text)
        .filter(|&v| v >= 1)
        .ok_or_else(|| CliError::Usage(format!("--{flag} needs a positive integer, got '{text}'")))
}

fn nat128(text: &str, flag: &str) -> Result<u128, CliError> {
    parse_natural_u128(text)
        .filter(|&v| v >= 1)
        .ok_or_else(|| CliError::Usage(format!("--{flag} needs a positive integer, got '{text}'")))
}

fn checkpoints_flag(text: &str) -> Result<Vec<u64>, CliError> {
    parse_checkpoints(text)
        .filter(|v| v.windows(2).all(|w| w[0] < w[1]) && v[0] >= 1)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--checkpoints needs an increasing list, got '{text}'"
            ))
        })
}

fn epsilons_flag(text: &str) -> Result<Vec<f64>, CliError> {
    let parsed: Result<Vec<f64>, _> = text.split(',').map(str::trim).map(str::parse).collect();
    match parsed {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Usage(format!(
            "--epsilons needs a list of reals, got '{text}'"
        ))),
    }
}

fn set_parser_with_blocks(specs: &[String]) -> Result<SetParser, CliError> {
    let mut blocks = BTreeMap::new();
    for spec in specs {
        let (name, path) = spec.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--blocks expects name=path.json, got '{spec}'"))
        })?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read '{path}': {e}")))?;
        // accept a bare partition or a full `witness --out` report
        let bp = crate::witness::BlockPartition::from_json(&text)
            .or_else(|_| {
                serde_json::from_str::<serde_json::Value>(&text).and_then(|doc| {
                    serde_json::from_value(doc["result"]["block_partition"].clone())
                })
            })
            .map_err(|e| CliError::Usage(format!("'{path}' is not a block partition: {e}")))?;
        blocks.insert(name.to_string(), bp);
    }
    Ok(SetParser::with_blocks(blocks))
}

fn ideal_flag(text: &str) -> Result<IdealSpec, CliError> {
    parse_ideal_spec(text).map_err(|e| CliError::Usage(e.to_string()))
}

/// Executes one parsed command and renders its JSON + summary.
pub fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    match &cli.command {
        Command::Density(args) => run_density(args),
        Command::Witness(args) => run_witness(args),
        Command::Classify(args) => run_classify(args),
        Command::Limit(args) => run_limit(args),
        Command::Slln(args) => run_slln(args),
        Command::Ultralab(args) => match &args.mode {
            UltralabMode::Sweep(sweep) => run_ultralab_sweep(sweep),
        },
    }
}

fn run_density(args: &DensityArgs) -> Result<RunOutput, CliError> {
    let parser = set_parser_with_blocks(&args.blocks)?;
    let set = parser
        .parse(&args.set)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let weights = parse_weight_seq(&args.weights)?;
    let requested = checkpoints_flag(&args.checkpoints)?;
    let checkpoints = usable_checkpoints(&set, &requested)?;
    let estimate = density_estimate(&weights, &set, &checkpoints)?;
    let summary = format!(
        "density of {} under {}: limsup~{:.6}, exact {}",
        args.set,
        weights,
        estimate.running_limsup_estimate,
        estimate
            .exact
            .map_or("unknown".to_string(), |e| format!("{e}")),
    );
    Ok(RunOutput {
        json: envelope("density", args, estimate),
        summary,
    })
}

#[derive(Serialize)]
struct WitnessResult {
    block_partition: crate::witness::BlockPartition,
    report: Option<crate::witness::WitnessReport>,
}

fn run_witness(args: &WitnessArgs) -> Result<RunOutput, CliError> {
    let weights = parse_weight_seq(&args.weights)?;
    let cap = nat128(&args.cap, "cap")?;
    let horizon = nat64(&args.horizon, "horizon")?;
    let (bp, ideal) = match args.kind.as_str() {
        "frechet" => (frechet_blocks(args.count)?, None),
        "summable" => (
            summable_blocks(&weights, args.count, cap)?,
            Some(IdealSpec::Summable(weights.clone())),
        ),
        "erdos_ulam" | "eu" => (
            erdos_ulam_blocks(&weights, args.count, cap)?,
            Some(IdealSpec::ErdosUlam(weights.clone())),
        ),
        other => {
            return Err(CliError::Usage(format!(
                "--kind must be frechet, summable, or erdos_ulam, got '{other}'"
            )))
        }
    };
    let report = match &ideal {
        Some(ideal) => {
            let index = SetParser::new()
                .parse(&args.index)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Some(verify_conglomeration(&bp, ideal, &index, horizon)?)
        }
        None => None,
    };
    let summary = match &report {
        Some(r) => format!(
            "{} witness, {} blocks (last cut {}): {:?} over index {}",
            args.kind,
            bp.block_count(),
            bp.last_cut(),
            r.conclusion,
            args.index
        ),
        None => format!("{} witness, {} blocks", args.kind, bp.block_count()),
    };
    Ok(RunOutput {
        json: envelope(
            "witness",
            args,
            WitnessResult {
                block_partition: bp,
                report,
            },
        ),
        summary,
    })
}

fn run_classify(args: &ClassifyArgs) -> Result<RunOutput, CliError> {
    let parser = set_parser_with_blocks(&args.blocks)?;
    let set = parser
        .parse(&args.set)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let ideal = ideal_flag(&args.ideal)?;
    let cfg = ClassifyConfig {
        budget: nat64(&args.budget, "budget")?,
        checkpoints: checkpoints_flag(&args.checkpoints)?,
        threshold: args.threshold,
    };
    let verdict = classify_in_ideal(&ideal, &set, &cfg)?;
    let summary = format!(
        "{} against {}: {:?} ({:?})",
        args.set, args.ideal, verdict.side, verdict.certainty
    );
    Ok(RunOutput {
        json: envelope("classify", args, verdict),
        summary,
    })
}

fn run_limit(args: &LimitArgs) -> Result<RunOutput, CliError> {
    let seq_parser = SeqParser {
        sets: set_parser_with_blocks(&args.blocks)?,
        table_dir: args.tables_dir.clone(),
    };
    let seq = seq_parser
        .parse(&args.seq)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let ideal = ideal_flag(&args.ideal)?;
    let epsilons = epsilons_flag(&args.epsilons)?;
    let cfg = LimitConfig {
        horizon: nat64(&args.horizon, "horizon")?,
        classify: ClassifyConfig {
            budget: nat64(&args.budget, "budget")?,
            checkpoints: checkpoints_flag(&args.checkpoints)?,
            threshold: args.threshold,
        },
    };
    let report = f_limit_check(&seq, args.candidate, &ideal, &epsilons, &cfg)?;
    let summary = format!(
        "limit of {} at {} along {}: {:?}",
        args.seq, args.candidate, args.ideal, report.verdict
    );
    Ok(RunOutput {
        json: envelope("limit", args, report),
        summary,
    })
}

fn run_slln(args: &SllnArgs) -> Result<RunOutput, CliError> {
    let n = nat64(&args.n, "n")?;
    let report = slln_experiment(n, args.trials, args.seed)?;
    let summary = format!(
        "slln: n={}, trials={}, seed={}: grand mean {:.6}",
        n, args.trials, args.seed, report.grand_mean
    );
    Ok(RunOutput {
        json: envelope("slln", args, report),
        summary,
    })
}

fn run_ultralab_sweep(args: &SweepArgs) -> Result<RunOutput, CliError> {
    let universe = Universe::new(args.n)?;
    let select = SweepSelect::parse(&args.theorem).ok_or_else(|| {
        CliError::Usage(format!("--theorem '{}' is not a known sweep", args.theorem))
    })?;
    let reports = run_sweeps(universe, select, args.poorness_cases, args.seed)?;
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let cases: u64 = reports.iter().map(|r| r.cases_checked).sum();
    let summary = format!(
        "ultralab sweep n={}: {} sweeps, {} cases, {} violations",
        args.n,
        reports.len(),
        cases,
        violations
    );
    Ok(RunOutput {
        json: envelope("ultralab_sweep", args, reports),
        summary,
    })
}

/// Full command entry point: prints the report, honours `--out`, and
/// returns the process exit code.
pub fn main_entry(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(output) => {
            println!("{}", output.json);
            eprintln!("{}", output.summary);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, format!("{}\n", output.json)) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return 3;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).expect("valid args")
    }

    #[test]
    fn density_run_produces_exact_half() {
        let cli = parse(&[
            "filterlab",
            "density",
            "--set",
            "arith(2,2)",
            "--checkpoints",
            "1e2,1e4",
        ]);
        let out = run(&cli).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&out.json).unwrap();
        assert_eq!(doc["result"]["exact"], 0.5);
        assert_eq!(doc["config"]["subcommand"], "density");
        assert_eq!(doc["library_version"], env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn witness_run_reports_cuts() {
        let cli = parse(&[
            "filterlab",
            "witness",
            "--kind",
            "erdos_ulam",
            "--count",
            "4",
        ]);
        let out = run(&cli).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&out.json).unwrap();
        let cuts: Vec<u64> = doc["result"]["block_partition"]["cuts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        assert_eq!(cuts, vec![0, 1, 3, 7, 15]);
        assert_eq!(doc["result"]["report"]["conclusion"], "in_grill_certified");
    }

    #[test]
    fn usage_errors_map_to_exit_2() {
        let cli = parse(&["filterlab", "density", "--set", "arith(0,2)"]);
        let err = run(&cli).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn numeric_errors_map_to_exit_3() {
        let cli = parse(&[
            "filterlab",
            "witness",
            "--kind",
            "summable",
            "--weights",
            "harmonic",
            "--count",
            "10",
            "--cap",
            "50",
        ]);
        let err = run(&cli).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn identical_configs_render_identical_bytes() {
        let argv = [
            "filterlab",
            "slln",
            "--n",
            "1e4",
            "--trials",
            "5",
            "--seed",
            "7",
        ];
        let a = run(&parse(&argv)).unwrap();
        let b = run(&parse(&argv)).unwrap();
        assert_eq!(a.json, b.json);
    }
}
