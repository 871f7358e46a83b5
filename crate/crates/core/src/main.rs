use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ftn_nfdm::params::SignalPlan;
use ftn_nfdm::runner::{
    check_report, emit_figure_data, load_config, run_sweep_with_threads, write_results,
    ExperimentConfig, FigureKind,
};

#[derive(Parser)]
#[command(name = "ftn-nfdm", version, about = "FTN-NFDM fiber link simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Power sweep; writes results.csv
    Run(Common),
    /// CSV data for fig1, fig2a or fig4b
    Figures {
        kind: String,
        #[command(flatten)]
        common: Common,
    },
    /// Validate the configuration and print layout, SE and guard interval
    Check(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nfdm,
    Ftn,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Replace the subcarrier layout: 16 orthogonal subcarriers, or
    /// round(16/alpha) compressed ones
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Compression factor for --mode ftn
    #[arg(long, default_value_t = 0.8)]
    alpha: f64,
}

impl Common {
    fn config(&self) -> ftn_nfdm::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => ExperimentConfig::nfdm(),
        };
        if let Some(mode) = self.mode {
            let (n, alpha) = match mode {
                Mode::Nfdm => (16, 1.0),
                Mode::Ftn => ((16.0 / self.alpha).round() as usize, self.alpha),
            };
            let s = &cfg.signal;
            let mut plan = SignalPlan::from_layout(s.bandwidth, n, alpha, s.qam_order, s.block_time)?;
            plan.pdc_enabled = s.pdc_enabled;
            cfg.signal = plan;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        cfg.validate()?;
        for w in cfg.warnings() {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }

    fn threads(&self) -> usize {
        self.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

fn run(cli: Cli) -> ftn_nfdm::Result<()> {
    match cli.cmd {
        Cmd::Run(c) => {
            let cfg = c.config()?;
            let rows = run_sweep_with_threads(&cfg, c.threads())?;
            std::fs::create_dir_all(&cfg.out_dir)?;
            let path = cfg.out_dir.join("results.csv");
            write_results(&path, &rows)?;
            for r in &rows {
                let q = r.q_db.map_or("-".to_string(), |q| format!("{q:.2}"));
                println!(
                    "A={:<6} P={:>7.2} dBm  BER={:.3e}  Q={} dB  EVM={:.2}%",
                    r.amplitude, r.avg_power_dbm, r.ber, q, r.evm_pct
                );
            }
            println!("wrote {}", path.display());
        }
        Cmd::Figures { kind, common } => {
            let kind: FigureKind = kind.parse()?;
            let cfg = common.config()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(common.threads())
                .build()
                .map_err(|e| ftn_nfdm::Error::Domain(format!("thread pool: {e}")))?;
            let paths = pool.install(|| emit_figure_data(kind, &cfg, &cfg.out_dir))?;
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Cmd::Check(c) => {
            let cfg = c.config()?;
            print!("{}", check_report(&cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
