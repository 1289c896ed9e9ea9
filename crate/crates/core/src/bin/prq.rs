use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prq::experiments::{
    cmd_chain_export, cmd_gap, decay_table, parse_ensemble, parse_grid, parse_topology, run_decay, run_tv, tv_table,
    write_atomic, DecayConfig, DecayMode, ExportConfig, GapConfig, Metric, RunManifest, Table, TvConfig,
};
use prq::markov::{GapMethod, Space};
use prq::Error;

/// Pseudo-random quantum states: circuit and cluster-state generation, and
/// Pauli-basis Markov-chain convergence analysis.
#[derive(Parser)]
#[command(name = "prq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo decay of the Porter-Thomas distance and of |<Q> - Q_R|.
    Decay(DecayArgs),
    /// Spectral gap of the reduced chain over a grid of c.
    Gap(GapArgs),
    /// Total-variation distance of the reduced chain to stationarity.
    Tv(TvArgs),
    /// Write a transition matrix in MatrixMarket coordinate format.
    Export(ExportArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "open")]
    topology: String,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecayArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "circuit")]
    mode: DecayMode,
    /// Circuit iterations.
    #[arg(long, conflicts_with = "columns")]
    iters: Option<usize>,
    /// Cluster columns (3l+1 for cluster-standard).
    #[arg(long)]
    columns: Option<usize>,
    #[arg(long, default_value = "haar")]
    ensemble: String,
    /// Mixture parameter for --ensemble mixture.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    ensemble_size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "q,pt")]
    metric: Vec<Metric>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Single value of c.
    #[arg(long, conflicts_with = "c_grid")]
    c: Option<f64>,
    /// start:stop:step
    #[arg(long, default_value = "0:1:0.005")]
    c_grid: String,
    #[arg(long, default_value = "auto")]
    method: GapMethod,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TvArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 30)]
    iters: usize,
    /// Add `q` for a companion Monte-Carlo 1 - Q column.
    #[arg(long, value_delimiter = ',', default_value = "tv")]
    metric: Vec<Metric>,
    #[arg(long, default_value_t = 1000)]
    ensemble_size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value = "reduced")]
    space: Space,
    /// Keep the identity string instead of removing it.
    #[arg(long)]
    keep_identity: bool,
    #[arg(long, default_value = "open")]
    topology: String,
    #[arg(long)]
    out: PathBuf,
}

fn emit(table: &Table, manifest: &RunManifest, out: &Option<PathBuf>) -> prq::Result<()> {
    let text = table.to_csv(manifest);
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> prq::Result<()> {
    match cli.command {
        Command::Decay(a) => {
            let steps = match (a.mode, a.iters, a.columns) {
                (DecayMode::Circuit, Some(i), None) => i,
                (DecayMode::Circuit, _, _) => return Err(Error::InvalidArgument("circuit mode takes --iters".into())),
                (_, None, Some(c)) => c,
                _ => return Err(Error::InvalidArgument("cluster modes take --columns".into())),
            };
            let mut cfg = DecayConfig::new(a.n, a.mode, steps, a.ensemble_size, a.seed);
            cfg.ensemble = parse_ensemble(&a.ensemble, a.c)?;
            cfg.metrics = a.metric;
            cfg.topology = parse_topology(&a.common.topology, a.n)?;
            let r = run_decay(&cfg)?;
            emit(&decay_table(&cfg, &r), &cfg.manifest(), &a.common.out)
        }
        Command::Gap(a) => {
            let grid = match a.c {
                Some(c) => vec![c],
                None => parse_grid(&a.c_grid)?,
            };
            let cfg = GapConfig { ns: a.n, grid, topology: a.common.topology, method: a.method };
            emit(&cmd_gap(&cfg)?, &cfg.manifest(), &a.common.out)
        }
        Command::Tv(a) => {
            let mut cfg = TvConfig::new(a.n, a.c, a.iters);
            cfg.topology = a.common.topology;
            if a.metric.contains(&Metric::Pt) {
                return Err(Error::InvalidArgument("tv supports the metrics tv and q".into()));
            }
            if a.metric.contains(&Metric::Q) {
                cfg.companion_q = Some((a.ensemble_size, a.seed));
            }
            let r = run_tv(&cfg)?;
            emit(&tv_table(&cfg, &r), &cfg.manifest(), &a.common.out)
        }
        Command::Export(a) => {
            let cfg = ExportConfig {
                n: a.n,
                c: a.c,
                space: a.space,
                topology: a.topology,
                remove_identity: !a.keep_identity,
            };
            let (dim, nnz) = cmd_chain_export(&cfg, &a.out)?;
            println!("wrote {} ({dim} x {dim}, {nnz} nonzeros)", a.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = std::env::var("PRQ_WORKERS").ok().and_then(|w| w.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("prq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
