//! Experiment orchestration: configuration, seeded power sweeps, figure
//! data and CSV output.

mod config;
mod figures;
mod pipeline;

pub use config::{
    load_config, parse_config, DecoderConfig, DecoderMode, ExperimentConfig, SamplingConfig,
    DEFAULT_AMPLITUDES,
};
pub use figures::{emit_figure_data, fig1_data, fig2a_data, fig4b_rows, FigureKind, FIG4B_HEADER};
pub use pipeline::{block_symbols, BlockOutcome, Detector, Pipeline};

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rxdsp::{dbm, LinkMetrics};

/// Aggregated performance at one amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub config_digest: String,
    pub amplitude: f64,
    pub avg_power_dbm: f64,
    pub ber: f64,
    /// Empty when the BER is 0.
    pub q_db: Option<f64>,
    pub evm_pct: f64,
    pub se: f64,
    /// bit/s
    pub net_rate: f64,
    pub mode: DecoderMode,
    pub seed: u64,
    pub alpha: f64,
    pub n_subcarriers: usize,
    pub bit_errors: usize,
    pub n_bits: usize,
    pub symbol_errors: usize,
    /// Some sphere search hit its node budget.
    pub timed_out: bool,
}

pub const RESULT_HEADER: &str = "config_digest,amplitude,avg_power_dbm,ber,q_db,evm_pct,se,net_rate,mode,seed,alpha,n_subcarriers,bit_errors,n_bits,symbol_errors,timed_out";

impl ResultRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.config_digest,
            self.amplitude,
            self.avg_power_dbm,
            self.ber,
            self.q_db.map(|q| q.to_string()).unwrap_or_default(),
            self.evm_pct,
            self.se,
            self.net_rate,
            self.mode.as_str(),
            self.seed,
            self.alpha,
            self.n_subcarriers,
            self.bit_errors,
            self.n_bits,
            self.symbol_errors,
            self.timed_out
        )
    }
}

/// Writes `rows` with [`RESULT_HEADER`].
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{RESULT_HEADER}")?;
    for r in rows {
        writeln!(f, "{}", r.csv_line())?;
    }
    f.flush()?;
    Ok(())
}

/// Simulates every `(amplitude, block)` pair and aggregates one row per
/// amplitude, sorted by amplitude.
///
/// Blocks run in parallel on the current rayon pool; each draws from its
/// own noise substream and the sums are taken in block order, so the rows
/// do not depend on the number of workers.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let pipe = Pipeline::new(cfg)?;
    let jobs: Vec<(usize, u64)> = (0..cfg.amplitudes.len())
        .flat_map(|i| (0..cfg.n_blocks as u64).map(move |b| (i, b)))
        .collect();
    let outcomes: Vec<Result<BlockOutcome>> = jobs
        .par_iter()
        .map_init(
            || Detector::new(&pipe),
            |det, &(i, b)| {
                let det = match det {
                    Ok(d) => Some(d),
                    Err(e) => return Err(Error::Domain(format!("detector setup: {e}"))),
                };
                pipe.run_block(cfg.amplitudes[i], i as u64, b, det)
            },
        )
        .collect();

    let mut failures = Vec::new();
    let mut totals = vec![BlockOutcome::default(); cfg.amplitudes.len()];
    for ((i, b), o) in jobs.iter().zip(&outcomes) {
        match o {
            Ok(o) => totals[*i] = totals[*i].merge(o),
            Err(e) => failures.push(format!("A={} block {b}: {e}", cfg.amplitudes[*i])),
        }
    }
    if !failures.is_empty() {
        let count = failures.len();
        let mut summary = failures.into_iter().take(5).collect::<Vec<_>>().join("; ");
        if count > 5 {
            summary.push_str("; ...");
        }
        return Err(Error::BlockFailures { count, summary });
    }

    let digest = cfg.digest();
    let plan = &cfg.signal;
    cfg.amplitudes
        .iter()
        .zip(&totals)
        .map(|(&a, t)| {
            let power = t.energy / (cfg.n_blocks as f64 * plan.block_time);
            let evm = 100.0 * (t.err_energy / t.ref_energy).sqrt();
            let m = LinkMetrics::new(
                dbm(power),
                t.bit_errors,
                t.n_bits,
                evm,
                plan.layout_se(),
                plan.net_rate(),
            )?;
            Ok(ResultRow {
                config_digest: digest.clone(),
                amplitude: a,
                avg_power_dbm: m.avg_power_dbm,
                ber: m.ber,
                q_db: m.q_db,
                evm_pct: m.evm_pct,
                se: m.se,
                net_rate: m.net_rate,
                mode: cfg.decoder.mode,
                seed: cfg.seed,
                alpha: plan.compression_alpha,
                n_subcarriers: plan.n_subcarriers,
                bit_errors: t.bit_errors,
                n_bits: t.n_bits,
                symbol_errors: t.symbol_errors,
                timed_out: t.timed_out,
            })
        })
        .collect()
}

/// [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<ResultRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

/// Plain-text summary of layout, rates and guard interval.
pub fn check_report(cfg: &ExperimentConfig) -> Result<String> {
    use crate::params::{guard_interval, normalized_se};
    let s = &cfg.signal;
    let f = &cfg.fiber;
    let norm = crate::params::build_normalization(s, f)?;
    let gi = guard_interval(s.bandwidth, f.beta2(), f.total_length(), s.pdc_enabled);
    let bound = normalized_se(s.n_subcarriers, s.compression_alpha, s.bandwidth, f.beta2(), f.total_length(), s.pdc_enabled)?;
    let mut out = String::new();
    out.push_str(&format!("digest            {}\n", cfg.digest()));
    out.push_str(&format!("subcarriers       {} x {}QAM, alpha {}\n", s.n_subcarriers, s.qam_order, s.compression_alpha));
    out.push_str(&format!("burst T0          {:.4} ns\n", s.burst_time * 1e9));
    out.push_str(&format!("block T1          {:.4} ns\n", s.block_time * 1e9));
    out.push_str(&format!("guard (config)    {:.4} ns\n", s.guard_time() * 1e9));
    out.push_str(&format!("guard (required)  {:.4} ns\n", gi * 1e9));
    out.push_str(&format!("SE (layout)       {}\n", s.layout_se()));
    out.push_str(&format!("SE (bound)        {bound:.4}\n"));
    out.push_str(&format!("net rate          {} Gb/s\n", s.net_rate() / 1e9));
    out.push_str(&format!("Ts                {:.4} ps\n", norm.time_scale * 1e12));
    out.push_str(&format!("Z0                {:.4} km\n", norm.distance_scale / 1e3));
    out.push_str(&format!("P0                {:.4} mW\n", norm.power_scale * 1e3));
    for w in cfg.warnings() {
        out.push_str(&format!("warning: {w}\n"));
    }
    Ok(out)
}
