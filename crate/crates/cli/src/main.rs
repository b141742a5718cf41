//! Experiment driver for the butterfly-lab library.
//!
//! Every command is deterministic for a given config and seed, independent
//! of `--threads`; each CSV starts with a header comment that records the
//! tool version and the full replay command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 capacity error, 4 numerical
//! failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use butterfly_lab::butterfly::{
    apply_simple, apply_simple_subsampled, simple_apply_cost, subsampled_cost_bound,
};
use butterfly_lab::coherence::{coherence_experiment, histogram, TestMatrix};
use butterfly_lab::spectral::{
    clt_failure_statistic, moment_experiment, spectrum_cloud, Ensemble,
};
use butterfly_lab::{Error, OpCounter, Randomizer, RngState, SimpleButterfly, Variant};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "butterfly-lab", version, about = "Random butterfly matrix experiments")]
struct Cli {
    /// Worker thread count; results are independent of this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample eigen-phase clouds for an ensemble.
    Spectrum(SpectrumArgs),
    /// Monte Carlo trace-power moments.
    Moments(MomentsArgs),
    /// Per-trial values of the trace concentration statistic
    /// (1/n) log((tr Q^k)^2 / N).
    Clt(CltArgs),
    /// Randomized coherence-reduction experiment.
    Coherence(CoherenceArgs),
    /// Certified multiplication counts of the fast applies.
    Opcount(OpcountArgs),
    /// Dense materialization of a sampled operator.
    Materialize(MaterializeArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Ensemble: simple, nonsimple, iid or haar.
    #[arg(long)]
    ensemble: String,
    /// Level count; the matrix dimension is 2^n.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    /// Ensemble: simple or nonsimple.
    #[arg(long)]
    ensemble: String,
    #[arg(long)]
    n: usize,
    /// Trace power.
    #[arg(long)]
    k: u32,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct CltArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoherenceArgs {
    /// Test matrix: hilbert or randn.
    #[arg(long)]
    matrix: String,
    /// Randomizer: hbdct, rbdct, rdct or haar.
    #[arg(long)]
    randomizer: String,
    #[arg(long)]
    n: usize,
    /// Column count of the test matrix.
    #[arg(long = "M")]
    m: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep the randn base matrix fixed across trials.
    #[arg(long, default_value_t = false)]
    fix_base: bool,
    /// Histogram bin width.
    #[arg(long, default_value_t = 0.005)]
    bins: f64,
    /// Output prefix; writes <out>.csv, <out>.json and <out>_hist.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OpcountArgs {
    #[arg(long)]
    n: usize,
    /// Also report the subsampled apply at this depth.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MaterializeArgs {
    /// Butterfly ensemble: simple or nonsimple (exclusive with --randomizer).
    #[arg(long)]
    ensemble: Option<String>,
    /// Randomizer variant: hbdct, rbdct, rdct or haar.
    #[arg(long)]
    randomizer: Option<String>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // thread count only affects scheduling, never results
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::IndexOutOfRange { .. } => 2,
        Error::CapacityExceeded { .. } => 3,
        Error::RankDeficient { .. } => 4,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Moments(args) => run_moments(args),
        Command::Clt(args) => run_clt(args),
        Command::Coherence(args) => run_coherence(args),
        Command::Opcount(args) => run_opcount(args),
        Command::Materialize(args) => run_materialize(args),
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    match out {
        Some(path) => Ok(Box::new(BufWriter::new(open(path)?))),
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn open(path: &Path) -> Result<File, Error> {
    File::create(path).map_err(|e| Error::InvalidArgument(format!("cannot open {path:?}: {e}")))
}

fn io_err(e: io::Error) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

/// The replay header written at the top of every CSV.
fn header(replay: &str) -> String {
    format!("# butterfly-lab {VERSION} | {replay}\n")
}

fn run_spectrum(args: SpectrumArgs) -> Result<(), Error> {
    let ensemble: Ensemble = args.ensemble.parse()?;
    let rng = RngState::from_seed(args.seed);
    let samples = spectrum_cloud(ensemble, args.n, args.trials, &rng)?;
    let mut w = writer(&args.out)?;
    w.write_all(
        header(&format!(
            "spectrum --ensemble {ensemble} --n {} --trials {} --seed {}",
            args.n, args.trials, args.seed
        ))
        .as_bytes(),
    )
    .map_err(io_err)?;
    writeln!(w, "trial,ensemble,n,phase").map_err(io_err)?;
    for (trial, sample) in samples.iter().enumerate() {
        for phase in sample.phases() {
            writeln!(w, "{trial},{ensemble},{},{phase}", args.n).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

fn run_moments(args: MomentsArgs) -> Result<(), Error> {
    let ensemble: Ensemble = args.ensemble.parse()?;
    let rng = RngState::from_seed(args.seed);
    let report = moment_experiment(ensemble, args.n, args.k, args.trials, &rng)?;
    let mut w = writer(&args.out)?;
    match args.format.as_str() {
        "json" => {
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            writeln!(w, "{json}").map_err(io_err)?;
        }
        "csv" => {
            w.write_all(
                header(&format!(
                    "moments --ensemble {ensemble} --n {} --k {} --trials {} --seed {} --format csv",
                    args.n, args.k, args.trials, args.seed
                ))
                .as_bytes(),
            )
            .map_err(io_err)?;
            writeln!(w, "k,mean_normalized_trace,second_moment,trials,std_error")
                .map_err(io_err)?;
            writeln!(
                w,
                "{},{},{},{},{}",
                report.k,
                report.mean_normalized_trace,
                report.second_moment,
                report.trials,
                report.std_error
            )
            .map_err(io_err)?;
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown format '{other}' (expected json or csv)"
            )))
        }
    }
    w.flush().map_err(io_err)
}

fn run_clt(args: CltArgs) -> Result<(), Error> {
    if args.n == 0 {
        return Err(Error::InvalidArgument("clt needs --n >= 1".into()));
    }
    let rng = RngState::from_seed(args.seed);
    let values = clt_failure_statistic(args.n, args.k, args.trials, &rng);
    let mut w = writer(&args.out)?;
    w.write_all(
        header(&format!(
            "clt --n {} --k {} --trials {} --seed {}",
            args.n, args.k, args.trials, args.seed
        ))
        .as_bytes(),
    )
    .map_err(io_err)?;
    writeln!(w, "trial,value").map_err(io_err)?;
    for (trial, value) in values.iter().enumerate() {
        writeln!(w, "{trial},{value}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn run_coherence(args: CoherenceArgs) -> Result<(), Error> {
    let matrix: TestMatrix = args.matrix.parse()?;
    let variant: Variant = args.randomizer.parse()?;
    if !(args.bins > 0.0 && args.bins <= 1.0) {
        return Err(Error::InvalidArgument(
            "--bins must be in (0, 1]".into(),
        ));
    }
    let rng = RngState::from_seed(args.seed);
    let (summary, trials) = coherence_experiment(
        matrix,
        variant,
        args.n,
        args.m,
        args.trials,
        &rng,
        args.fix_base,
    )?;
    let summary_json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    if let Some(prefix) = &args.out {
        let replay = format!(
            "coherence --matrix {matrix} --randomizer {variant} --n {} --M {} --trials {} --seed {}{} --bins {}",
            args.n,
            args.m,
            args.trials,
            args.seed,
            if args.fix_base { " --fix-base" } else { "" },
            args.bins,
        );
        let mut csv = BufWriter::new(open(&with_suffix(prefix, ".csv"))?);
        csv.write_all(header(&replay).as_bytes()).map_err(io_err)?;
        writeln!(csv, "trial,matrix,randomizer,n,M,seed,coherence").map_err(io_err)?;
        for (trial, r) in trials.iter().enumerate() {
            writeln!(
                csv,
                "{trial},{matrix},{},{},{},{},{}",
                r.randomizer, r.n, r.m, r.seed, r.value
            )
            .map_err(io_err)?;
        }
        csv.flush().map_err(io_err)?;

        let mut json = BufWriter::new(open(&with_suffix(prefix, ".json"))?);
        writeln!(json, "{summary_json}").map_err(io_err)?;
        json.flush().map_err(io_err)?;

        let values: Vec<f64> = trials.iter().map(|r| r.value).collect();
        let mut hist = BufWriter::new(open(&with_suffix(prefix, "_hist.csv"))?);
        hist.write_all(header(&replay).as_bytes()).map_err(io_err)?;
        writeln!(hist, "bin_left,bin_right,count").map_err(io_err)?;
        for (left, right, count) in histogram(&values, args.bins) {
            writeln!(hist, "{left},{right},{count}").map_err(io_err)?;
        }
        hist.flush().map_err(io_err)?;
    }
    println!("{summary_json}");
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_opcount(args: OpcountArgs) -> Result<(), Error> {
    let mut rng = RngState::from_seed(args.seed);
    let b = SimpleButterfly::sample(args.n, &mut rng);
    let v = vec![1.0; 1 << args.n];
    let mut counter = OpCounter::new();
    apply_simple(&b, &v, &mut counter)?;
    let mut w = writer(&args.out)?;
    w.write_all(
        header(&format!(
            "opcount --n {}{} --seed {}",
            args.n,
            args.k.map(|k| format!(" --k {k}")).unwrap_or_default(),
            args.seed
        ))
        .as_bytes(),
    )
    .map_err(io_err)?;
    writeln!(w, "op,n,k,measured,closed_form_or_bound").map_err(io_err)?;
    writeln!(
        w,
        "apply_simple,{},0,{},{}",
        args.n,
        counter.multiplications(),
        simple_apply_cost(args.n)
    )
    .map_err(io_err)?;
    if let Some(k) = args.k {
        let mut sub_counter = OpCounter::new();
        apply_simple_subsampled(&b, &v, 1, k, &mut sub_counter)?;
        writeln!(
            w,
            "apply_simple_subsampled,{},{k},{},{}",
            args.n,
            sub_counter.multiplications(),
            subsampled_cost_bound(args.n, k)
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn run_materialize(args: MaterializeArgs) -> Result<(), Error> {
    let mut rng = RngState::from_seed(args.seed);
    let (tag, matrix) = match (&args.ensemble, &args.randomizer) {
        (Some(e), None) => match e.to_ascii_lowercase().as_str() {
            "simple" => (
                "simple".to_string(),
                SimpleButterfly::sample(args.n, &mut rng).materialize()?,
            ),
            "nonsimple" => (
                "nonsimple".to_string(),
                butterfly_lab::NonSimpleButterfly::sample(args.n, &mut rng).materialize()?,
            ),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown ensemble '{other}' for materialize (expected simple or nonsimple)"
                )))
            }
        },
        (None, Some(r)) => {
            let variant: Variant = r.parse()?;
            (
                variant.name().to_string(),
                Randomizer::sample(variant, args.n, &mut rng)?.materialize()?,
            )
        }
        _ => {
            return Err(Error::InvalidArgument(
                "materialize needs exactly one of --ensemble or --randomizer".into(),
            ))
        }
    };
    let mut w = writer(&args.out)?;
    let flag = if args.ensemble.is_some() {
        "--ensemble"
    } else {
        "--randomizer"
    };
    w.write_all(
        header(&format!(
            "materialize {flag} {tag} --n {} --seed {}",
            args.n, args.seed
        ))
        .as_bytes(),
    )
    .map_err(io_err)?;
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols())
            .map(|j| matrix[(i, j)].to_string())
            .collect();
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
