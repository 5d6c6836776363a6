//! Command-line front end: signal extension, boundary-free transforms, the
//! synthetic benchmark table, scaling-law verification and a simulated
//! real-time stream.
//!
//! Exit codes: 2 for configuration/input errors, 3 for numeric failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use boundeffred::error::Error;
use boundeffred::extend::{self, ExtenderKind, Solver};
use boundeffred::io;
use boundeffred::numerics::JitterPolicy;
use boundeffred::pipeline::{self, PipelineConfig};
use boundeffred::signal::{AhmParams, Signal};
use boundeffred::tfr::{self, TfrKind};
use boundeffred::verify;
use boundeffred::window::WindowSpec;

#[derive(Parser)]
#[command(name = "boundeffred", version, about = "Forecast-based signal extension and boundary-free time-frequency analysis")]
struct Cli {
    /// Print the manifest of benchmark defaults and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Extend a signal past its right edge and write the result as CSV.
    Extend(ExtendArgs),
    /// Compute a time-frequency representation, optionally boundary-free.
    Tfr(TfrArgs),
    /// Forecast-quality benchmark on the modulated two-component signal.
    BenchTable1(BenchArgs),
    /// Monte Carlo verification of the forecast-variance scaling laws.
    VerifyTheorem(VerifyArgs),
    /// Replay a file through the incremental pipeline and report timings.
    Stream(StreamArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sigext,
    Symmetric,
    Dmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Normal,
    Svd,
}

impl From<SolverArg> for Solver {
    fn from(v: SolverArg) -> Solver {
        match v {
            SolverArg::Normal => Solver::NormalEquations,
            SolverArg::Svd => Solver::Svd,
        }
    }
}

#[derive(Args)]
struct ExtenderOpts {
    /// Sampling rate override for headerless CSV inputs.
    #[arg(long)]
    fs: Option<f64>,
    /// Subsignal length; defaults to floor(1.5 * L).
    #[arg(long)]
    m: Option<usize>,
    /// Training size; defaults to floor(2.5 * M).
    #[arg(long)]
    k: Option<usize>,
    /// Truncation rank for the dmd method.
    #[arg(long, default_value_t = 20)]
    rank: usize,
    /// Least-squares route for the sigext method.
    #[arg(long, value_enum, default_value_t = SolverArg::Normal)]
    solver: SolverArg,
}

impl ExtenderOpts {
    fn kind(&self, method: MethodArg, l: usize) -> ExtenderKind {
        let m = self.m.unwrap_or_else(|| extend::default_m(l));
        let k = self.k.unwrap_or_else(|| extend::default_k(m));
        match method {
            MethodArg::Sigext => ExtenderKind::SigExt {
                m,
                k,
                solver: self.solver.into(),
            },
            MethodArg::Symmetric => ExtenderKind::Symmetric,
            MethodArg::Dmd => ExtenderKind::Dmd {
                m,
                k,
                rank: self.rank,
            },
        }
    }
}

#[derive(Args)]
struct ExtendArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Extension length in samples.
    #[arg(long)]
    l: usize,
    #[command(flatten)]
    ext: ExtenderOpts,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Stft,
    Sst,
    Rs,
    Conceft,
}

#[derive(Args)]
struct TfrGridArgs {
    #[arg(long = "window-halflen")]
    window_halflen: usize,
    /// Gaussian shape in samples; defaults to halflen / 3.
    #[arg(long)]
    shape: Option<f64>,
    #[arg(long)]
    nfft: usize,
    #[arg(long)]
    hop: usize,
    #[arg(long, default_value_t = tfr::GAMMA_REL_DEFAULT)]
    gamma_rel: f64,
    /// Clamp reassigned energy so none is sent forward in time (rs only).
    #[arg(long, default_value_t = false)]
    causal: bool,
    #[arg(long, default_value_t = tfr::CONCEFT_TAPERS_DEFAULT)]
    tapers: usize,
    #[arg(long, default_value_t = tfr::CONCEFT_PROJECTIONS_DEFAULT)]
    projections: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl TfrGridArgs {
    fn window(&self) -> Result<WindowSpec, Error> {
        let shape = self.shape.unwrap_or(self.window_halflen as f64 / 3.0);
        WindowSpec::gaussian(self.window_halflen, shape)
    }

    fn kind(&self, kind: KindArg) -> TfrKind {
        match kind {
            KindArg::Stft => TfrKind::Stft,
            KindArg::Sst => TfrKind::Sst {
                gamma_rel: self.gamma_rel,
            },
            KindArg::Rs => TfrKind::Rs {
                gamma_rel: self.gamma_rel,
                causal: self.causal,
            },
            KindArg::Conceft => TfrKind::Conceft {
                tapers: self.tapers,
                projections: self.projections,
                gamma_rel: self.gamma_rel,
                seed: self.seed,
            },
        }
    }
}

#[derive(Args)]
struct TfrArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[command(flatten)]
    grid: TfrGridArgs,
    /// Run the boundary-free pipeline with this extension method.
    #[arg(long = "extend", value_enum)]
    extend_method: Option<MethodArg>,
    /// Extension length; defaults to the window half-length.
    #[arg(long)]
    l: Option<usize>,
    #[command(flatten)]
    ext: ExtenderOpts,
    #[arg(long = "out-csv")]
    out_csv: PathBuf,
    #[arg(long = "out-pgm")]
    out_pgm: Option<PathBuf>,
    /// Log-compression floor for the PGM heatmap, in dB.
    #[arg(long, default_value_t = -80.0, allow_hyphen_values = true)]
    pgm_floor_db: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 50)]
    realizations: usize,
    #[arg(long, default_value_t = 0xB0EF)]
    seed: u64,
    /// Noise level added to the synthetic signal.
    #[arg(long, default_value_t = 1e-2)]
    sigma: f64,
    /// Skip the transport-index column (much faster).
    #[arg(long, default_value_t = false)]
    no_index: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Sigma,
    K,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    sweep: SweepArg,
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    #[arg(long, default_value_t = 0x7E07)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StreamArgs {
    #[arg(long)]
    input: PathBuf,
    /// Samples per push.
    #[arg(long)]
    chunk: usize,
    /// Samples used to initialize the stream; defaults to the extender's
    /// required history.
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long, value_enum, default_value_t = KindArg::Sst)]
    kind: KindArg,
    #[command(flatten)]
    grid: TfrGridArgs,
    #[arg(long = "extend", value_enum, default_value_t = MethodArg::Sigext)]
    extend_method: MethodArg,
    /// Extension length; defaults to the window half-length.
    #[arg(long)]
    l: Option<usize>,
    #[command(flatten)]
    ext: ExtenderOpts,
    /// Per-push timing CSV.
    #[arg(long = "timing-out")]
    timing_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.print_config {
        print_config();
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(2);
    };
    match run(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Numeric(_) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn print_config() {
    let jitter = JitterPolicy::default();
    let ahm = AhmParams::benchmark();
    println!("# defaults manifest");
    println!("parameter_policy.m_of_l = floor(1.5*L)");
    println!("parameter_policy.k_of_m = floor(2.5*M)");
    println!("solver.default = normal-equations");
    println!(
        "solver.jitter_ladder = {:e}..{:e} x{} (relative to trace/dim)",
        jitter.initial_rel, jitter.max_rel, jitter.factor
    );
    println!("solver.pinv_rtol = {:e}", boundeffred::numerics::PINV_DEFAULT_RTOL);
    println!("tfr.gamma_rel = {:e}", tfr::GAMMA_REL_DEFAULT);
    println!("tfr.conceft.tapers = {}", tfr::CONCEFT_TAPERS_DEFAULT);
    println!("tfr.conceft.projections = {}", tfr::CONCEFT_PROJECTIONS_DEFAULT);
    println!("pgm.floor_db = -80");
    println!(
        "bench.ahm = N={} P={} p1={} p2={} fs={}",
        ahm.n_formula, ahm.p_total, ahm.p1, ahm.p2, ahm.fs
    );
    println!("bench.ahm.sigma = 1e-2");
    println!("bench.ahm.l = 700");
    println!("bench.ahm.stft = n_fft=2048 hop=35 window_halflen=700 shape=halflen/3");
    println!("bench.methods = sigext(M=100), sigext(M=750), sigext(M=1500), symmetric, dmd(M=750,rank=20)");
    println!("verify.sigma_sweep = 15 points, sigma^2 in [1e-7, 1e-2], K=450, horizons 1/10/100");
    println!("verify.k_sweep = 12 points, K in [800, 2000], sigma=1e-2, horizons 1/10/100");
    println!("verify.two_tone = M=150 cycles p1=10 p2=33 amplitudes 1.0/1.4, N=10000");
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Extend(args) => cmd_extend(args),
        Command::Tfr(args) => cmd_tfr(args),
        Command::BenchTable1(args) => cmd_bench(args),
        Command::VerifyTheorem(args) => cmd_verify(args),
        Command::Stream(args) => cmd_stream(args),
    }
}

fn cmd_extend(args: ExtendArgs) -> Result<(), Error> {
    let x = io::read_signal(&args.input, args.ext.fs)?;
    let kind = args.ext.kind(args.method, args.l);
    let (ext, clamped) = extend::extend_with(&kind, &x, args.l)?;
    if clamped {
        eprintln!("warning: forecast exceeded the amplitude guard; extension held flat");
    }
    io::write_signal_csv(&ext, &args.output)?;
    println!(
        "extended {} samples by {} -> {}",
        x.len(),
        args.l,
        args.output.display()
    );
    Ok(())
}

fn cmd_tfr(args: TfrArgs) -> Result<(), Error> {
    let x = io::read_signal(&args.input, args.ext.fs)?;
    let window = args.grid.window()?;
    let kind = args.grid.kind(args.kind);
    let l = args.l.unwrap_or(args.grid.window_halflen);
    let extender = match args.extend_method {
        Some(method) => args.ext.kind(method, l),
        None => ExtenderKind::None,
    };
    let cfg = PipelineConfig {
        extender,
        tfr: kind,
        window,
        n_fft: args.grid.nfft,
        hop: args.grid.hop,
        ext_len: l,
    };
    let matrix = pipeline::bound_eff_red(&x, &cfg)?;
    io::write_tfr_csv(&matrix, &args.out_csv)?;
    if let Some(pgm) = &args.out_pgm {
        io::write_tfr_pgm(&matrix, pgm, args.pgm_floor_db)?;
    }
    println!(
        "{} columns x {} bins -> {}",
        matrix.n_cols(),
        matrix.n_freqs(),
        args.out_csv.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let mut cfg = verify::AhmBenchConfig::benchmark(args.realizations, args.seed);
    cfg.sigma = args.sigma;
    cfg.with_index = !args.no_index;
    let report = verify::ahm_benchmark(&cfg)?;
    std::fs::write(&args.out, report.to_csv())?;
    for row in &report.rows {
        println!(
            "{}: mse={:.3} +/- {:.3} d_stft={:.4} +/- {:.4} seconds={:.4}",
            row.method, row.mean_mse, row.sd_mse, row.mean_d, row.sd_d, row.mean_seconds
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Error> {
    let (cfg, expected, tolerance) = match args.sweep {
        SweepArg::Sigma => (
            verify::McConfig::sigma_sweep_benchmark(args.realizations, args.seed),
            1.0,
            0.15,
        ),
        SweepArg::K => (
            verify::McConfig::k_sweep_benchmark(args.realizations, args.seed),
            -1.0,
            0.25,
        ),
    };
    let report = verify::mc_moments(&cfg)?;
    std::fs::write(&args.out, report.to_csv())?;
    for horizon in &cfg.horizons {
        let fit = match args.sweep {
            SweepArg::Sigma => report.sigma_variance_slope(*horizon, 10.0)?,
            SweepArg::K => report.k_variance_slope(*horizon)?,
        };
        let pass = (fit.slope - expected).abs() <= tolerance;
        println!(
            "ell={horizon} slope={:.4} expected={expected} pass={pass}",
            fit.slope
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_stream(args: StreamArgs) -> Result<(), Error> {
    if args.chunk == 0 {
        return Err(Error::InvalidInput("chunk must be at least 1".into()));
    }
    let x = io::read_signal(&args.input, args.ext.fs)?;
    let window = args.grid.window()?;
    let l = args.l.unwrap_or(args.grid.window_halflen);
    let extender = args.ext.kind(args.extend_method, l);
    let cfg = PipelineConfig {
        extender,
        tfr: args.grid.kind(args.kind),
        window,
        n_fft: args.grid.nfft,
        hop: args.grid.hop,
        ext_len: l,
    };

    let warmup = args
        .warmup
        .unwrap_or_else(|| extender.required_history(l).max(1))
        .min(x.len());
    let init = Signal::new(x.samples()[..warmup].to_vec(), x.fs())?;
    let mut state = pipeline::stream_init(&init, cfg.clone())?;

    let mut rows = String::from("push,samples,forecast_seconds,transform_seconds,columns\n");
    let mut forecast_times = Vec::new();
    let mut per_col_times = Vec::new();
    for (i, chunk) in x.samples()[warmup..].chunks(args.chunk).enumerate() {
        state.push(chunk)?;
        let t = state.last_timings();
        rows.push_str(&format!(
            "{},{},{:.6e},{:.6e},{}\n",
            i,
            chunk.len(),
            t.forecast_seconds,
            t.transform_seconds,
            t.columns
        ));
        forecast_times.push(t.forecast_seconds);
        if t.columns > 0 {
            per_col_times.push(t.transform_seconds / t.columns as f64);
        }
    }

    // The stream must reproduce the batch computation exactly.
    let batch = pipeline::bound_eff_red(&x, &cfg)?;
    let diff = max_abs_diff(state.tfr(), &batch)
        .ok_or_else(|| Error::Numeric("stream/batch value kinds differ".into()))?;
    if diff > 1e-12 {
        return Err(Error::Numeric(format!(
            "stream deviates from batch recomputation by {diff:.3e}"
        )));
    }
    println!("stream == batch within 1e-12 (max deviation {diff:.3e})");

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let t_forecast = mean(&forecast_times);
    let t_col = mean(&per_col_times);
    let budget = pipeline::timing_budget(t_forecast, t_col, l, args.grid.hop, x.fs());
    println!(
        "t_forecast={:.4e}s t_column={:.4e}s min_H={} feasible_at_H{}={}",
        t_forecast, t_col, budget.min_h, args.grid.hop, budget.feasible
    );
    if let Some(path) = &args.timing_out {
        std::fs::write(path, rows)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn max_abs_diff(a: &boundeffred::TfrMatrix, b: &boundeffred::TfrMatrix) -> Option<f64> {
    use boundeffred::TfrValues;
    if a.n_cols() != b.n_cols() || a.n_freqs() != b.n_freqs() {
        return None;
    }
    match (a.values(), b.values()) {
        (TfrValues::Complex(x), TfrValues::Complex(y)) => Some(
            x.iter()
                .zip(y)
                .map(|(p, q)| (p - q).norm())
                .fold(0.0, f64::max),
        ),
        (TfrValues::Real(x), TfrValues::Real(y)) => Some(
            x.iter()
                .zip(y)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    }
}
