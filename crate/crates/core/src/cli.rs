//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or I/O error, 2 unestimable input,
//! 3 optimization finished without reaching the threshold.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::annealer::{anneal_restarts, suggest_changes, InitialTemperature, SaParams, Termination};
use crate::completion::complete_panel;
use crate::document::{generate_panel, write_atomic, GenerateSpec, PanelDocument};
use crate::error::Error;
use crate::fpr::{CompleteFpr, ExpertPanel, WeightConfig};
use crate::metrics::analyze_panel;
use crate::report::{summarize, AnalysisPayload, OptimizationInputs, OptimizationPayload};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNESTIMABLE: i32 = 2;
pub const EXIT_THRESHOLD_MISSED: i32 = 3;

/// Seed used when none is given on the command line or in the panel file.
pub const DEFAULT_SEED: u64 = 7;

/// Default minimum change reported as a suggestion.
pub const DEFAULT_REPORT_THRESHOLD: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(
    name = "fpr-consensus",
    version,
    about = "Consistency/consensus optimization for fuzzy preference relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate missing preference degrees and write the completed panel.
    Complete {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report consistency, consensus and CCL of a panel (completed first if needed).
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        /// Report path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Anneal the panel towards a CCL threshold and suggest modifications.
    Optimize(OptimizeArgs),
    /// Generate a synthetic panel.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        missing: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    restarts: u32,
    /// Smallest absolute change listed as a suggestion.
    #[arg(long, default_value_t = DEFAULT_REPORT_THRESHOLD)]
    report_threshold: f64,
    /// Include the annealing trace in the report.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    sa: SaOverrides,
}

#[derive(Debug, Args)]
struct SaOverrides {
    /// Initial temperature, or "adaptive".
    #[arg(long = "sa-temp0")]
    temp0: Option<InitialTemperature>,
    #[arg(long = "sa-fastfactor")]
    fastfactor: Option<f64>,
    #[arg(long = "sa-tempfactor")]
    tempfactor: Option<f64>,
    #[arg(long = "sa-frzlim")]
    frzlim: Option<u32>,
    #[arg(long = "sa-sizefactor")]
    sizefactor: Option<u32>,
    #[arg(long = "sa-minpercent")]
    minpercent: Option<f64>,
    #[arg(long = "sa-tcent")]
    tcent: Option<f64>,
    #[arg(long = "sa-move-width")]
    move_width: Option<f64>,
    #[arg(long = "sa-value-grid")]
    value_grid: Option<f64>,
    #[arg(long = "sa-max-trials")]
    max_trials: Option<u64>,
    #[arg(long = "sa-enforce-reciprocity")]
    enforce_reciprocity: bool,
}

impl SaOverrides {
    fn apply(&self, mut p: SaParams) -> SaParams {
        if let Some(v) = self.temp0 {
            p.temp0 = v;
        }
        macro_rules! overlay {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    p.$field = v;
                }
            )*};
        }
        overlay!(
            fastfactor, tempfactor, frzlim, sizefactor, minpercent, tcent, move_width, value_grid, max_trials
        );
        if self.enforce_reciprocity {
            p.enforce_reciprocity = true;
        }
        p
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Unestimable { .. }) => EXIT_UNESTIMABLE,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    write_atomic(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report payloads always serialize")
}

fn load_complete(path: &Path) -> CliResult<(PanelDocument, ExpertPanel<CompleteFpr>)> {
    let doc = PanelDocument::read(path)?;
    let panel = complete_panel(&doc.to_panel()?)?;
    Ok((doc, panel))
}

fn resolve_weights(doc: &PanelDocument, delta: Option<f64>, gamma: Option<f64>) -> CliResult<WeightConfig> {
    let base = doc.weights()?;
    Ok(WeightConfig::new(delta.unwrap_or(base.delta()), gamma.unwrap_or(base.gamma()))?)
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command) -> CliResult<i32> {
    let mut stderr = std::io::stderr().lock();
    match command {
        Command::Complete { input, out } => {
            let (doc, panel) = load_complete(&input)?;
            let mut completed = PanelDocument::from_complete_panel(&panel);
            completed.weights = doc.weights;
            completed.sa = doc.sa;
            write_output(&out, &completed.to_json())?;
            let _ = writeln!(stderr, "completed {} expert relation(s) -> {}", panel.m(), out.display());
            Ok(EXIT_OK)
        }
        Command::Analyze { input, delta, out } => {
            let (doc, panel) = load_complete(&input)?;
            let weights = resolve_weights(&doc, delta, None)?;
            let report = analyze_panel(&panel, &weights)?;
            let payload = to_json(&AnalysisPayload::new(&panel, &report));
            match out {
                Some(path) => write_output(&path, &payload)?,
                None => println!("{payload}"),
            }
            let _ = write!(stderr, "{}", summarize(&panel, &report));
            Ok(EXIT_OK)
        }
        Command::Optimize(args) => optimize(args, &mut stderr),
        Command::Gen { n, m, missing, noise, seed, out } => {
            let doc = generate_panel(&GenerateSpec { n, m, missing_fraction: missing, noise, seed })?;
            write_output(&out, &doc.to_json())?;
            Ok(EXIT_OK)
        }
    }
}

fn optimize(args: OptimizeArgs, stderr: &mut impl Write) -> CliResult<i32> {
    let (doc, panel) = load_complete(&args.input)?;
    let weights = resolve_weights(&doc, args.delta, args.gamma)?;
    let mut params = args.sa.apply(doc.sa.unwrap_or_default());
    params.seed = args.seed.or(doc.sa.map(|s| s.seed)).unwrap_or(DEFAULT_SEED);
    if args.report_threshold.is_nan() || args.report_threshold < 0.0 {
        return Err(Error::InvalidParams("report threshold must be non-negative".into()).into());
    }

    let initial_report = analyze_panel(&panel, &weights)?;
    let result = anneal_restarts(&panel, &weights, &params, args.restarts)?;
    let best = &result.best;
    let final_report = analyze_panel(&best.best_panel, &weights)?;
    let suggestions = suggest_changes(&panel, &best.best_panel, args.report_threshold)?;

    let payload = OptimizationPayload::new(OptimizationInputs {
        initial_report: &initial_report,
        result: &result,
        final_report: &final_report,
        suggestions: &suggestions,
        report_threshold: args.report_threshold,
        gamma: weights.gamma(),
        include_trace: args.trace,
    });
    write_output(&args.out, &to_json(&payload))?;

    let _ = writeln!(
        stderr,
        "initial CCL {:.4} -> best CCL {:.4} (gamma {}), {} after {} trials; {} suggested change(s)",
        initial_report.ccl,
        best.best_ccl,
        weights.gamma(),
        best.termination.as_str(),
        best.trials_used,
        suggestions.len()
    );
    Ok(match best.termination {
        Termination::ThresholdReached => EXIT_OK,
        Termination::Frozen | Termination::TrialCapHit => EXIT_THRESHOLD_MISSED,
    })
}
