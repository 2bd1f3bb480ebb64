use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpdecode::codes::parse_alist;
use lpdecode::harness::{bench_inner_solvers, bench_to_csv, records_to_csv};
use lpdecode::polytope::decompose_checks;
use lpdecode::{
    simulate, transmit_and_llr, Algorithm, BinaryWord, ChannelSpec, Decoder, InnerSolverKind,
    LlrVector, RngSeed, SimOptions, SolverConfig, SparseBinaryMatrix,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "lpdecode",
    version,
    about = "LP decoding of binary linear codes with interior-point methods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode one LLR vector and print the result as JSON.
    Decode(DecodeArgs),
    /// Monte Carlo simulation of the all-zero codeword over a channel.
    Simulate(SimulateArgs),
    /// Run a grid of solver configurations on random channel outputs.
    Bench(BenchArgs),
    /// Validate an alist file and print polytope statistics.
    Check(CheckArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// affine-long, affine-short, pdip or pdip-infeasible.
    #[arg(long, default_value = "pdip")]
    solver: Algorithm,
    /// cg, dense, gabp or gabp-warm.
    #[arg(long, default_value = "cg")]
    inner: InnerSolverKind,
    /// Split checks into chains of degree at most this value (>= 3).
    #[arg(long)]
    decompose: Option<usize>,
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Round every N outer iterations and stop on a codeword; 0 disables.
    #[arg(long)]
    rounding_cadence: Option<usize>,
    #[arg(long)]
    tau_round: Option<f64>,
}

impl SolverArgs {
    fn config(
        &self,
        algorithm: Algorithm,
        inner: InnerSolverKind,
    ) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig::new(algorithm, inner);
        cfg.decompose = self.decompose;
        if let Some(v) = self.gap_tol {
            cfg.gap_tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_outer = v;
        }
        if let Some(v) = self.rounding_cadence {
            cfg.rounding_cadence = v;
        }
        if let Some(v) = self.tau_round {
            cfg.tau_round = v;
        }
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct DecodeArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    matrix: PathBuf,
    /// LLR file, or an inline comma/space separated list.
    #[arg(long, allow_hyphen_values = true)]
    llr: String,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the iterate trajectory as CSV to this path.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// bsc:P, awgn:SNR_DB or awgn:SNR_DB:RATE.
    #[arg(long)]
    channel: ChannelSpec,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Record per-trial wall time (makes the output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Also decode exhaustively and report ML statistics (small codes).
    #[arg(long)]
    compare_ml: bool,
    #[command(flatten)]
    solver: SolverArgs,
    /// csv: one trial record per line; json: the summary.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the JSON summary to this path.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Channel used to draw the benchmark LLR vectors.
    #[arg(long, default_value = "awgn:3:0.5")]
    channel: ChannelSpec,
    /// Number of LLR vectors.
    #[arg(long, default_value_t = 10)]
    fixtures: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Outer algorithms of the grid (comma separated); default all.
    #[arg(long, value_delimiter = ',')]
    solvers: Vec<Algorithm>,
    /// Inner solvers of the grid (comma separated); default all.
    #[arg(long, value_delimiter = ',')]
    inners: Vec<InnerSolverKind>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Maximum check degree of the decomposition preview.
    #[arg(long, default_value_t = 3)]
    decompose: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<lpdecode::Error> for CliError {
    fn from(e: lpdecode::Error) -> Self {
        use lpdecode::Error as E;
        match e {
            E::InvalidParameter(_) | E::GuardExceeded { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<SparseBinaryMatrix, CliError> {
    parse_alist(&read_input(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_llr(arg: &str) -> Result<LlrVector, CliError> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        read_input(path)?
    } else {
        arg.to_string()
    };
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Input(format!("bad LLR value `{t}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    LlrVector::new(values).map_err(|e| CliError::Input(e.to_string()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn run_decode(args: &DecodeArgs) -> Result<(), CliError> {
    let mut cfg = args.solver.config(args.solver.solver, args.solver.inner)?;
    cfg.record_trajectory = args.trace.is_some();
    let h = read_matrix(&args.matrix)?;
    let gamma = parse_llr(&args.llr)?;
    if gamma.len() != h.n() {
        return Err(CliError::Input(format!(
            "LLR vector has {} entries but the code length is {}",
            gamma.len(),
            h.n()
        )));
    }
    let result = Decoder::new(&h, &cfg)?.decode(&gamma)?;
    if let Some(path) = &args.trace {
        let csv = result.trajectory_csv().unwrap_or_default();
        fs::write(path, csv).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    emit(args.output.as_deref(), &with_newline(result.to_json()))
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = args.solver.config(args.solver.solver, args.solver.inner)?;
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be positive".into()));
    }
    let h = read_matrix(&args.matrix)?;
    let mut opts = SimOptions::new(args.trials, args.seed);
    opts.workers = args.workers;
    opts.timing = args.timing;
    opts.compare_ml = args.compare_ml;
    let (summary, records) = simulate(&h, &args.channel, &cfg, &opts)?;
    if let Some(path) = &args.summary {
        fs::write(path, with_newline(summary.to_json()))
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    let text = match args.format {
        Format::Csv => records_to_csv(&records)?,
        Format::Json => with_newline(summary.to_json()),
    };
    emit(args.output.as_deref(), &text)
}

fn run_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.fixtures == 0 {
        return Err(CliError::Usage("--fixtures must be positive".into()));
    }
    let solvers = if args.solvers.is_empty() {
        Algorithm::ALL.to_vec()
    } else {
        args.solvers.clone()
    };
    let inners = if args.inners.is_empty() {
        InnerSolverKind::ALL.to_vec()
    } else {
        args.inners.clone()
    };
    let mut grid = Vec::new();
    for &alg in &solvers {
        for &inner in &inners {
            grid.push(args.solver.config(alg, inner)?);
        }
    }
    let h = read_matrix(&args.matrix)?;
    let zero = BinaryWord::zeros(h.n());
    let base = RngSeed(args.seed);
    let fixtures = (0..args.fixtures as u64)
        .map(|i| transmit_and_llr(&zero, &args.channel, base.for_trial(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = bench_inner_solvers(&h, &fixtures, &grid)?;
    let text = match args.format {
        Format::Csv => bench_to_csv(&rows)?,
        Format::Json => with_newline(serde_json::to_string_pretty(&rows).expect("serializable")),
    };
    emit(args.output.as_deref(), &text)
}

#[derive(Serialize)]
struct CheckReport {
    n: usize,
    m: usize,
    rank: usize,
    edges: usize,
    max_check_degree: usize,
    max_variable_degree: usize,
    inequalities: u128,
    decomposition: DecompositionPreview,
}

#[derive(Serialize)]
struct DecompositionPreview {
    max_degree: usize,
    n: usize,
    m: usize,
    aux_variables: usize,
    inequalities: u128,
}

/// Odd-subset facet count: a check of degree d contributes 2^(d-1).
fn facet_count(h: &SparseBinaryMatrix) -> u128 {
    h.rows()
        .iter()
        .map(|r| 1u128.checked_shl(r.len() as u32 - 1).unwrap_or(u128::MAX))
        .fold(0u128, u128::saturating_add)
}

fn run_check(args: &CheckArgs) -> Result<(), CliError> {
    if args.decompose < 3 {
        return Err(CliError::Usage("--decompose must be at least 3".into()));
    }
    let h = read_matrix(&args.matrix)?;
    let (dh, map) = decompose_checks(&h, args.decompose)?;
    let report = CheckReport {
        n: h.n(),
        m: h.m(),
        rank: h.rank(),
        edges: h.edge_count(),
        max_check_degree: h.max_row_degree(),
        max_variable_degree: h.max_column_degree(),
        inequalities: facet_count(&h),
        decomposition: DecompositionPreview {
            max_degree: args.decompose,
            n: dh.n(),
            m: dh.m(),
            aux_variables: map.aux_count,
            inequalities: facet_count(&dh),
        },
    };
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    emit(args.output.as_deref(), &with_newline(text))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Decode(a) => run_decode(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench(a),
        Command::Check(a) => run_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Input(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
