//! Data behind the subcarrier/spectrum plot, the SE-versus-N curves and the
//! Q-versus-power sweep.

use std::io::Write;
use std::path::{Path, PathBuf};

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::params::{normalized_se, SignalPlan};
use crate::scalar::{sinc_unnorm, Cplx};

use super::{run_sweep, ExperimentConfig, Pipeline, ResultRow};

pub const FIG4B_HEADER: &str = "power_dbm,q_db,mode,alpha";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    Fig1,
    Fig2a,
    Fig4b,
}

impl std::str::FromStr for FigureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FigureKind::Fig1),
            "fig2a" => Ok(FigureKind::Fig2a),
            "fig4b" => Ok(FigureKind::Fig4b),
            _ => Err(Error::Config(format!("unknown figure `{s}` (fig1, fig2a, fig4b)"))),
        }
    }
}

/// Subcarrier shapes, one burst in time and its mean power spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Data {
    pub lambda: Vec<f64>,
    /// `|A·sinc(λT0/Ts + kαπ)|` for each subcarrier, in carrier order.
    pub traces: Vec<Vec<f64>>,
    pub time_ns: Vec<f64>,
    pub abs_q: Vec<f64>,
    pub freq_ghz: Vec<f64>,
    /// Mean power spectrum in dB relative to its peak.
    pub spectrum_db: Vec<f64>,
}

/// Subcarrier, burst and spectrum data for `cfg` at its first sweep
/// amplitude, averaging the spectrum over `n_spectra` bursts.
pub fn fig1_data(cfg: &ExperimentConfig, n_spectra: usize) -> Result<Fig1Data> {
    let mut cfg = cfg.clone();
    cfg.noise = false;
    let pipe = Pipeline::new(&cfg)?;
    let a = cfg.amplitudes[0];
    let plan: SignalPlan = pipe.plan_at(a);
    let ratio = plan.burst_time / plan.norm_time;
    let span = 2.0 * plan.n_subcarriers as f64 * plan.lambda_spacing();
    let lambda: Vec<f64> = (-400..=400).map(|i| i as f64 / 400.0 * span).collect();
    let traces = (0..plan.n_subcarriers)
        .map(|p| {
            let k = plan.subcarrier_index(p) as f64;
            lambda
                .iter()
                .map(|&l| (a * sinc_unnorm(l * ratio + k * plan.compression_alpha * std::f64::consts::PI)).abs())
                .collect()
        })
        .collect();

    // No pre-compensation: the burst as modulated.
    let mut bare = pipe.clone();
    bare.signal.pdc_enabled = false;
    let (_, q) = bare.transmit(a, 0)?;
    let time_ns = (0..q.len()).map(|i| (q.t0 + i as f64 * q.dt) * 1e9).collect();
    let abs_q = q.samples.iter().map(|z| z.norm()).collect();

    let n = q.len();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut psd = vec![0.0; n];
    for blk in 0..n_spectra.max(1) as u64 {
        let (_, q) = bare.transmit(a, blk)?;
        let mut x: Vec<Cplx<f64>> = q.samples.clone();
        fft.process(&mut x);
        for (p, z) in psd.iter_mut().zip(&x) {
            *p += z.norm_sqr();
        }
    }
    let peak = psd.iter().cloned().fold(0.0, f64::max);
    let df = 1.0 / (n as f64 * q.dt);
    let mut bins: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let kk = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            (kk * df / 1e9, 10.0 * (psd[k] / peak).max(1e-30).log10())
        })
        .collect();
    bins.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Fig1Data {
        lambda,
        traces,
        time_ns,
        abs_q,
        freq_ghz: bins.iter().map(|b| b.0).collect(),
        spectrum_db: bins.iter().map(|b| b.1).collect(),
    })
}

/// `(N, α, SE)` upper-bound rows for `α ∈ {1, 0.8}`, B = 32 GHz, 1000 km.
pub fn fig2a_data(cfg: &ExperimentConfig, n_max: usize) -> Result<Vec<(usize, f64, f64)>> {
    let beta2 = cfg.fiber.beta2();
    let mut rows = Vec::new();
    for alpha in [1.0, 0.8] {
        for n in 1..=n_max {
            let se = normalized_se(n, alpha, 32e9, beta2, 1000e3, cfg.signal.pdc_enabled)?;
            rows.push((n, alpha, se));
        }
    }
    Ok(rows)
}

/// `(power_dbm, q_db, mode, alpha)` points of sweep rows; rows without a
/// defined Q are dropped.
pub fn fig4b_rows(rows: &[ResultRow]) -> Vec<(f64, f64, &'static str, f64)> {
    rows.iter()
        .filter_map(|r| {
            let mode = if r.alpha == 1.0 { "nfdm" } else { "ftn" };
            r.q_db.map(|q| (r.avg_power_dbm, q, mode, r.alpha))
        })
        .collect()
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, std::io::BufWriter<std::fs::File>)> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let f = std::fs::File::create(&path)?;
    Ok((path, std::io::BufWriter::new(f)))
}

/// Writes the CSV files of `kind` into `out_dir` and returns their paths.
///
/// `fig4b` sweeps the 16-, 18- and 20-subcarrier layouts
/// (α = 1, 0.89, 0.8) over the link, sweep and decoder settings of `cfg`.
pub fn emit_figure_data(kind: FigureKind, cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    match kind {
        FigureKind::Fig1 => {
            let d = fig1_data(cfg, 32)?;
            let (p1, mut f) = create(out_dir, "fig1_subcarriers.csv")?;
            let names: Vec<String> = (0..d.traces.len()).map(|i| format!("sc{i}")).collect();
            writeln!(f, "lambda,{}", names.join(","))?;
            for (i, l) in d.lambda.iter().enumerate() {
                let vals: Vec<String> = d.traces.iter().map(|t| t[i].to_string()).collect();
                writeln!(f, "{l},{}", vals.join(","))?;
            }
            f.flush()?;
            let (p2, mut f) = create(out_dir, "fig1_time.csv")?;
            writeln!(f, "time_ns,abs_q")?;
            for (t, q) in d.time_ns.iter().zip(&d.abs_q) {
                writeln!(f, "{t},{q}")?;
            }
            f.flush()?;
            let (p3, mut f) = create(out_dir, "fig1_spectrum.csv")?;
            writeln!(f, "freq_ghz,power_db")?;
            for (x, y) in d.freq_ghz.iter().zip(&d.spectrum_db) {
                writeln!(f, "{x},{y}")?;
            }
            f.flush()?;
            Ok(vec![p1, p2, p3])
        }
        FigureKind::Fig2a => {
            let (p, mut f) = create(out_dir, "fig2a.csv")?;
            writeln!(f, "n_subcarriers,alpha,se")?;
            for (n, a, se) in fig2a_data(cfg, 128)? {
                writeln!(f, "{n},{a},{se}")?;
            }
            f.flush()?;
            Ok(vec![p])
        }
        FigureKind::Fig4b => {
            let mut all = Vec::new();
            for (n, alpha) in [(16, 1.0), (18, 0.89), (20, 0.8)] {
                let mut c = cfg.clone();
                c.signal = SignalPlan::from_layout(cfg.signal.bandwidth, n, alpha, cfg.signal.qam_order, cfg.signal.block_time)?;
                c.signal.pdc_enabled = cfg.signal.pdc_enabled;
                all.extend(run_sweep(&c)?);
            }
            let (p1, mut f) = create(out_dir, "fig4b.csv")?;
            writeln!(f, "{FIG4B_HEADER}")?;
            for (p, q, m, a) in fig4b_rows(&all) {
                writeln!(f, "{p},{q},{m},{a}")?;
            }
            f.flush()?;
            let p2 = out_dir.join("fig4b_results.csv");
            super::write_results(&p2, &all)?;
            Ok(vec![p1, p2])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2a_scaling() {
        let cfg = ExperimentConfig::nfdm();
        let rows = fig2a_data(&cfg, 40).unwrap();
        let se = |n: usize, a: f64| rows.iter().find(|r| r.0 == n && r.1 == a).unwrap().2;
        for n in [4usize, 8, 16, 20, 32] {
            // N/α FTN subcarriers in the band of N orthogonal ones.
            let ftn = se(n * 5 / 4, 0.8);
            assert!((ftn - se(n, 1.0) / 0.8).abs() < 1e-12 * ftn);
            assert!(se(n, 1.0) <= ftn);
        }
        for n in 1..40 {
            assert!(se(n, 1.0) < se(n + 1, 1.0));
            assert!(se(n, 1.0) <= 1.0 && se(n, 0.8) <= 1.25);
        }
    }

    #[test]
    fn fig1_has_one_trace_per_subcarrier() {
        let mut cfg = ExperimentConfig::nfdm();
        cfg.amplitudes = vec![0.3];
        let d = fig1_data(&cfg, 2).unwrap();
        assert_eq!(d.traces.len(), 16);
        assert!(d.traces.iter().all(|t| t.len() == d.lambda.len()));
        let peak = d.traces[8].iter().cloned().fold(0.0, f64::max);
        assert!((peak - 0.3).abs() < 1e-3);
        assert_eq!(d.time_ns.len(), d.abs_q.len());
        assert!(d.spectrum_db.iter().cloned().fold(f64::MIN, f64::max).abs() < 1e-12);
        assert!(d.freq_ghz.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn figure_kind_parsing() {
        assert_eq!("fig4b".parse::<FigureKind>().unwrap(), FigureKind::Fig4b);
        assert!("fig3".parse::<FigureKind>().is_err());
    }
}
