//! `ofc`: benchmark, drift and inspection commands for the online fuzzy
//! classifiers.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use ofc::datastream::{fetch_manifest, load_csv, run_cv, CvOptions, ModelKind, ModelSpec};
use ofc::driftsim::{run_drift_experiment, DriftConfig};
use ofc::report;
use ofc::rulebase::{dc_limited_count, full_grid_count};
use ofc::tracker::{top_rules, Direction};
use ofc::{Error, MulticlassModel, RuleLayout, Scheme};

const DATA_DIR_ENV: &str = "OFC_DATA_DIR";

#[derive(Parser)]
#[command(
    name = "ofc",
    version,
    about = "Multi-class online fuzzy classifiers with Passive-Aggressive learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stratified k-fold cross-validation on a CSV dataset.
    Bench(BenchArgs),
    /// Rotating-Gaussian drift experiment.
    Drift(DriftArgs),
    /// Print the highest and lowest consequent rules of a saved model.
    Inspect(InspectArgs),
    /// Rule counts for n dimensions and m sets per axis.
    PartitionInfo(PartitionArgs),
    /// Download the URLs listed in a manifest into the data directory.
    Fetch(FetchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Fuzzy,
    PaLinear,
    Delta,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Ovr,
    Ovo,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ovr => Scheme::Ovr,
            SchemeArg::Ovo => Scheme::Ovo,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RulesArg {
    Auto,
    Full,
    Dc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LinearInputs {
    /// Map unit inputs to [-1, 1] before appending the bias.
    Centered,
    /// Use the unit inputs as they are.
    Unit,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// CSV file (header row, label in the last column). Relative paths that
    /// do not exist are also looked up in $OFC_DATA_DIR.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "fuzzy")]
    model: Vec<ModelArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ovr")]
    scheme: Vec<SchemeArg>,
    /// Fuzzy sets per axis.
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, value_enum, default_value = "auto")]
    rules: RulesArg,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Fit min-max bounds on each training fold only.
    #[arg(long)]
    fold_local_normalization: bool,
    /// Fold worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value = "centered")]
    linear_inputs: LinearInputs,
    /// Also write every fold's trained model as JSON.
    #[arg(long)]
    save_models: bool,
}

#[derive(clap::Args)]
struct DriftArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ovr,ovo")]
    scheme: Vec<SchemeArg>,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-axis spread (standard deviation unless --sigma-is-variance).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    sigma_is_variance: bool,
    /// Consequent decay factor per step, in (0, 1].
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    patterns_per_step: Option<usize>,
    #[arg(long)]
    step_degrees: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write the final models as JSON.
    #[arg(long)]
    save_models: bool,
}

#[derive(clap::Args)]
struct InspectArgs {
    /// Model JSON written by `bench --save-models` or `drift --save-models`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
}

#[derive(clap::Args)]
struct PartitionArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
}

#[derive(clap::Args)]
struct FetchArgs {
    /// Plain-text list of URLs, one per line.
    #[arg(long)]
    manifest: PathBuf,
    /// Target directory; defaults to $OFC_DATA_DIR, then ./data.
    #[arg(long)]
    dir: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::MissingFile { .. } | Error::Config(_) | Error::InvalidArgument(_) | Error::ResourceLimit { .. } => 2,
            e if e.is_data_error() => 3,
            _ => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => cmd_bench(a),
        Command::Drift(a) => cmd_drift(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::PartitionInfo(a) => cmd_partition_info(a),
        Command::Fetch(a) => cmd_fetch(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn resolve_data(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) if Path::new(&dir).join(path).exists() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn ensure_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| Failure {
        code: 4,
        message: format!("cannot create {}: {e}", dir.display()),
    })
}

fn cmd_bench(a: BenchArgs) -> CliResult {
    let path = resolve_data(&a.data);
    let ds: ofc::Dataset = load_csv(&path)?;
    let layout = match a.rules {
        RulesArg::Auto => None,
        RulesArg::Full => Some(RuleLayout::FullGrid),
        RulesArg::Dc => Some(RuleLayout::DcLimited),
    };
    let opts = CvOptions {
        folds: a.folds,
        seed: a.seed,
        fold_local_normalization: a.fold_local_normalization,
        threads: a.threads,
        keep_models: a.save_models,
        ..CvOptions::default()
    };
    ensure_dir(&a.out)?;

    let mut outcomes = Vec::new();
    for &model in &a.model {
        let kind = match model {
            ModelArg::Fuzzy => ModelKind::Fuzzy { m: a.m, layout },
            ModelArg::PaLinear => ModelKind::PaLinear,
            ModelArg::Delta => ModelKind::Delta,
        };
        for &scheme in &a.scheme {
            let spec =
                ModelSpec::new(scheme.into(), kind).with_centered_linear(a.linear_inputs == LinearInputs::Centered);
            let outcome = run_cv(&ds, &spec, &opts)?;
            println!(
                "{:<12} {:<16} accuracy {:6.2} ± {:5.2} %   time {:.3} s",
                spec.to_string(),
                ds.name,
                100.0 * outcome.mean_accuracy,
                100.0 * outcome.std_accuracy,
                outcome.wall_time_s
            );
            if a.save_models {
                let stem = spec.to_string().to_ascii_lowercase().replace(['(', ')'], "_");
                for (i, m) in outcome.models.iter().enumerate() {
                    let p = a.out.join(format!("model_{}fold{i}.json", stem));
                    std::fs::write(&p, m.to_json()? + "\n").map_err(|e| Error::Io {
                        path: p.clone(),
                        source: e,
                    })?;
                }
            }
            outcomes.push(outcome);
        }
    }
    report::write_results_csv(&a.out.join("results.csv"), &ds.name, &outcomes)?;
    report::write_json(&a.out.join("report.json"), &report::bench_report(&ds, &opts, &outcomes))?;
    Ok(())
}

fn cmd_drift(a: DriftArgs) -> CliResult {
    let mut cfg = DriftConfig::paper_preset().with_seed(a.seed);
    if let Some(s) = a.sigma {
        cfg.sigma = s;
    }
    cfg.sigma_is_variance = a.sigma_is_variance;
    if let Some(d) = a.decay {
        cfg.decay = d;
    }
    if let Some(s) = a.steps {
        cfg.total_steps = s;
    }
    if let Some(p) = a.patterns_per_step {
        cfg.patterns_per_step = p;
    }
    if let Some(d) = a.step_degrees {
        cfg.step_degrees = d;
    }
    cfg.validate()?;
    if a.scheme.is_empty() {
        return Err(usage("at least one scheme is required"));
    }
    ensure_dir(&a.out)?;

    let mut reports = Vec::new();
    let mut times = Vec::new();
    for &scheme in &a.scheme {
        let t0 = Instant::now();
        let r = run_drift_experiment::<f64>(scheme.into(), &cfg, a.m)?;
        times.push(t0.elapsed().as_secs_f64());
        println!(
            "{:<4} prequential accuracy {:6.2} % ({} / {})",
            r.scheme.name(),
            100.0 * r.accuracy(),
            r.correct,
            r.total
        );
        if a.save_models {
            let p = a
                .out
                .join(format!("model_{}.json", r.scheme.name().to_ascii_lowercase()));
            std::fs::write(&p, r.model.to_json()? + "\n").map_err(|e| Error::Io {
                path: p.clone(),
                source: e,
            })?;
        }
        reports.push(r);
    }
    report::write_drift_traces(&a.out, &reports)?;
    report::write_json(
        &a.out.join("report.json"),
        &report::drift_report(&cfg, &reports, &times)?,
    )?;
    Ok(())
}

fn cmd_inspect(a: InspectArgs) -> CliResult {
    if a.k == 0 {
        return Err(usage("invalid argument: k must be at least 1"));
    }
    if !a.model.exists() {
        return Err(Error::MissingFile { path: a.model }.into());
    }
    let text = std::fs::read_to_string(&a.model).map_err(|e| Error::Io {
        path: a.model.clone(),
        source: e,
    })?;
    let model = MulticlassModel::from_json(&text)?;
    let Some(rb) = model.rule_base() else {
        return Err(usage(format!(
            "{} is a {} model; only fuzzy models have rules to inspect",
            a.model.display(),
            model.representation()
        )));
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} model over {} classes, {} rules ({})",
        model.scheme(),
        model.num_classes(),
        rb.len(),
        model.representation()
    );
    for (i, member) in model.members().iter().enumerate() {
        let _ = writeln!(out, "\n== {} ==", model.member_name(i));
        for direction in [Direction::Largest, Direction::Smallest] {
            let ranking = top_rules(&member.classifier, rb, a.k, direction)?;
            let _ = writeln!(
                out,
                "  {}:",
                if direction == Direction::Largest {
                    "largest c"
                } else {
                    "smallest c"
                }
            );
            for (rank, e) in ranking.entries.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {:>3}. {:>+10.4}  [{:>4}]  {}",
                    rank + 1,
                    e.value,
                    e.index,
                    e.description
                );
            }
        }
    }
    emit(&out)
}

// Writes buffered output; a reader that closed the pipe early is not an error.
fn emit(text: &str) -> CliResult {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure {
            code: 4,
            message: format!("cannot write output: {e}"),
        }),
        _ => Ok(()),
    }
}

fn cmd_partition_info(a: PartitionArgs) -> CliResult {
    if a.n < 1 {
        return Err(usage("invalid argument: n must be at least 1"));
    }
    if a.m < 2 {
        return Err(usage("invalid argument: m must be at least 2"));
    }
    let full = full_grid_count(a.n, a.m).map_or_else(|| format!("{}^{} (overflow)", a.m, a.n), |c| c.to_string());
    println!("n = {}, m = {}", a.n, a.m);
    println!("full-grid rules:  {full}");
    println!("dc-limited rules: {}", dc_limited_count(a.n, a.m));
    Ok(())
}

fn cmd_fetch(a: FetchArgs) -> CliResult {
    let dir = a
        .dir
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"));
    let outcomes = fetch_manifest(&a.manifest, &dir)?;
    let mut failed = 0;
    for o in &outcomes {
        match (&o.path, &o.error) {
            (Some(p), _) => println!("ok      {} -> {}", o.url, p.display()),
            (None, Some(e)) => {
                failed += 1;
                println!("failed  {}: {e}", o.url);
            }
            _ => {}
        }
    }
    if failed > 0 {
        return Err(Failure {
            code: 4,
            message: format!("{failed} of {} downloads failed", outcomes.len()),
        });
    }
    Ok(())
}
