//! Experiment configuration: TOML schema, SI-suffix quantities and
//! validation with line diagnostics.
//!
//! ```toml
//! [signal]
//! bandwidth = "32 GHz"        # required
//! n_subcarriers = 20
//! compression_alpha = 0.8
//! qam_order = 16
//! block_time = "2.5 ns"
//!
//! [fiber]
//! span_length = "80 km"
//! n_spans = 12
//!
//! [sweep]
//! amplitudes = [0.2, 0.3, 0.4]
//! n_blocks = 400
//! seed = 1
//! ```
//!
//! Quantities are either bare numbers in the field's customary unit or
//! strings `<decimal><space?><prefix?><unit>`. Prefixes are
//! `p n u µ m k M G T`; the decimal may carry its own exponent. The value
//! is produced by parsing one decimal literal with the combined exponent,
//! so `"2.5 ns"` is bit-identical to `2.5e-9`.

use std::path::PathBuf;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::params::{FiberPlan, SignalPlan, DEFAULT_GUARD_SLACK, DEFAULT_WAVELENGTH};

/// Detection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderMode {
    Slicing,
    Sphere,
    Iterative,
}

impl DecoderMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecoderMode::Slicing => "slicing",
            DecoderMode::Sphere => "sphere",
            DecoderMode::Iterative => "iterative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub mode: DecoderMode,
    pub band_width: usize,
    pub n_iter: usize,
    pub node_budget: u64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            mode: DecoderMode::Sphere,
            band_width: 6,
            n_iter: 8,
            node_budget: 2_000_000,
        }
    }
}

/// Time and λ discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    pub samples_per_block: usize,
    /// Minimum sample rate over the signal bandwidth.
    pub oversampling_headroom: f64,
    /// Simulation window in block periods (each burst is simulated alone).
    pub window_blocks: usize,
    /// Receiver NFT window in block periods, centered on the burst.
    pub rx_window_blocks: f64,
    /// Transmit λ-grid half-extent in units of the occupied half-band.
    pub lambda_extent: f64,
    /// Transmit λ-grid refinement beyond the `π/W` spacing.
    pub lambda_oversampling: f64,
    /// Project the received spectrum onto the subcarrier shapes instead of
    /// sampling it at the centers.
    pub rx_projection: bool,
    /// Receiver λ-grid half-extent for the projection, in occupied half-bands.
    pub rx_lambda_extent: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            samples_per_block: 512,
            oversampling_headroom: 6.0,
            window_blocks: 2,
            rx_window_blocks: 1.2,
            lambda_extent: 4.0,
            lambda_oversampling: 1.0,
            rx_projection: true,
            rx_lambda_extent: 1.25,
        }
    }
}

/// Fully validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub signal: SignalPlan,
    pub fiber: FiberPlan,
    /// b-modulation amplitudes, ascending.
    pub amplitudes: Vec<f64>,
    pub n_blocks: usize,
    pub seed: u64,
    pub noise: bool,
    pub sampling: SamplingConfig,
    pub decoder: DecoderConfig,
    pub out_dir: PathBuf,
}

/// Default amplitude sweep.
pub const DEFAULT_AMPLITUDES: [f64; 8] = [0.06, 0.1, 0.14, 0.18, 0.22, 0.26, 0.3, 0.36];

impl ExperimentConfig {
    /// 12 × 80 km link, B = 32 GHz, T1 = 2.5 ns, 16QAM, `N` subcarriers
    /// compressed by `alpha`.
    pub fn preset(n_subcarriers: usize, alpha: f64) -> Result<Self> {
        let signal = SignalPlan::from_layout(32e9, n_subcarriers, alpha, 16, 2.5e-9)?;
        let cfg = ExperimentConfig {
            signal,
            fiber: FiberPlan::default(),
            amplitudes: DEFAULT_AMPLITUDES.to_vec(),
            n_blocks: 400,
            seed: 1,
            noise: true,
            sampling: SamplingConfig::default(),
            decoder: DecoderConfig::default(),
            out_dir: PathBuf::from("out"),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// NFDM baseline: 16 orthogonal subcarriers.
    pub fn nfdm() -> Self {
        Self::preset(16, 1.0).expect("built-in preset is valid")
    }

    /// FTN layout packing `16/α` subcarriers into the same band.
    pub fn ftn(alpha: f64) -> Result<Self> {
        Self::preset((16.0 / alpha).round() as usize, alpha)
    }

    pub fn total_bits(&self) -> usize {
        self.n_blocks * self.signal.n_subcarriers * self.signal.bits_per_symbol()
    }

    /// Non-fatal remarks about statistical resolution.
    pub fn warnings(&self) -> Vec<String> {
        let bits = self.total_bits();
        if (bits as f64) < 1e4 {
            vec![format!(
                "{bits} bits per power point cannot resolve a BER of 1e-4 (one error is {:.1e})",
                1.0 / bits as f64
            )]
        } else {
            Vec::new()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        self.fiber.validate()?;
        self.signal.validate_guard(&self.fiber, DEFAULT_GUARD_SLACK)?;
        if self.amplitudes.is_empty() {
            return Err(Error::invalid("amplitudes", "sweep is empty"));
        }
        if self.amplitudes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("amplitudes", "must be positive"));
        }
        if self.amplitudes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("amplitudes", "must be strictly ascending"));
        }
        if self.n_blocks == 0 {
            return Err(Error::invalid("n_blocks", "must be at least 1"));
        }
        let s = &self.sampling;
        if s.samples_per_block < 8 {
            return Err(Error::invalid("samples_per_block", "must be at least 8"));
        }
        let rate = s.samples_per_block as f64 / self.signal.block_time;
        if rate < s.oversampling_headroom * self.signal.bandwidth {
            return Err(Error::invalid(
                "samples_per_block",
                format!(
                    "sample rate {:.4e} Hz is below {} × bandwidth",
                    rate, s.oversampling_headroom
                ),
            ));
        }
        if rate < self.fiber.obpf_bandwidth {
            return Err(Error::invalid("obpf_bandwidth", "wider than the simulation band"));
        }
        if s.window_blocks == 0 {
            return Err(Error::invalid("window_blocks", "must be at least 1"));
        }
        if !(s.rx_window_blocks > 0.0 && s.rx_window_blocks <= s.window_blocks as f64) {
            return Err(Error::invalid("rx_window_blocks", "must lie in (0, window_blocks]"));
        }
        if !(s.lambda_extent >= 1.0) {
            return Err(Error::invalid("lambda_extent", "must be at least 1"));
        }
        if !(s.lambda_oversampling >= 1.0) {
            return Err(Error::invalid("lambda_oversampling", "must be at least 1"));
        }
        if self.decoder.n_iter == 0 {
            return Err(Error::invalid("n_iter", "must be at least 1"));
        }
        if self.decoder.node_budget == 0 {
            return Err(Error::invalid("node_budget", "must be at least 1"));
        }
        Ok(())
    }

    /// Stable text form hashed into the result digest.
    pub fn canonical(&self) -> String {
        format!(
            "{:?}|{:?}|{:?}|{}|{}|{}|{:?}|{:?}",
            self.signal,
            self.fiber,
            self.amplitudes,
            self.n_blocks,
            self.seed,
            self.noise,
            self.sampling,
            self.decoder
        )
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(&Sha256::digest(self.canonical().as_bytes())[..8])
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Quantity {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Dim {
    Hertz,
    Second,
    Metre,
}

impl Dim {
    fn symbol(self) -> &'static str {
        match self {
            Dim::Hertz => "Hz",
            Dim::Second => "s",
            Dim::Metre => "m",
        }
    }
}

/// SI value of `text` in dimension `dim`.
fn parse_si(text: &str, dim: Dim) -> std::result::Result<f64, String> {
    let t = text.trim();
    let body = t
        .strip_suffix(dim.symbol())
        .ok_or_else(|| format!("`{t}` does not end in the unit `{}`", dim.symbol()))?;
    let (body, exp10) = match body.chars().last() {
        Some(c) if !c.is_ascii_digit() && c != '.' && c != ' ' => {
            let e = match c {
                'p' => -12,
                'n' => -9,
                'u' | 'µ' => -6,
                'm' => -3,
                'k' => 3,
                'M' => 6,
                'G' => 9,
                'T' => 12,
                _ => return Err(format!("unknown SI prefix `{c}` in `{t}`")),
            };
            (&body[..body.len() - c.len_utf8()], e)
        }
        _ => (body, 0),
    };
    let number = body.trim();
    if number.is_empty() {
        return Err(format!("`{t}` has no numeric value"));
    }
    let (mantissa, own_exp) = match number.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = number[i + 1..]
                .parse()
                .map_err(|_| format!("bad exponent in `{t}`"))?;
            (&number[..i], e)
        }
        None => (number, 0),
    };
    if mantissa.is_empty()
        || !mantissa
            .trim_start_matches(['+', '-'])
            .chars()
            .all(|c| c.is_ascii_digit() || c == '.')
    {
        return Err(format!("bad number `{number}` in `{t}`"));
    }
    format!("{mantissa}e{}", own_exp + exp10)
        .parse::<f64>()
        .map_err(|_| format!("bad number `{number}` in `{t}`"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    signal: RawSignal,
    #[serde(default)]
    fiber: RawFiber,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    decoder: RawDecoder,
    #[serde(default)]
    sampling: RawSampling,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    bandwidth: Spanned<Quantity>,
    n_subcarriers: Option<Spanned<usize>>,
    compression_alpha: Option<Spanned<f64>>,
    qam_order: Option<Spanned<usize>>,
    block_time: Option<Spanned<Quantity>>,
    burst_time: Option<Spanned<Quantity>>,
    norm_time: Option<Spanned<Quantity>>,
    pdc: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    /// Bare numbers in km.
    span_length: Option<Spanned<Quantity>>,
    n_spans: Option<usize>,
    /// dB/km
    loss: Option<Spanned<f64>>,
    /// ps/(nm·km)
    dispersion: Option<Spanned<f64>>,
    /// 1/(W·km)
    gamma: Option<Spanned<f64>>,
    /// dB
    noise_figure: Option<f64>,
    obpf_bandwidth: Option<Spanned<Quantity>>,
    wavelength: Option<Spanned<Quantity>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    amplitudes: Option<Spanned<Vec<f64>>>,
    n_blocks: Option<Spanned<usize>>,
    seed: Option<u64>,
    noise: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecoder {
    mode: Option<DecoderMode>,
    band_width: Option<usize>,
    n_iter: Option<Spanned<usize>>,
    node_budget: Option<Spanned<u64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    samples_per_block: Option<Spanned<usize>>,
    oversampling_headroom: Option<f64>,
    window_blocks: Option<usize>,
    rx_window_blocks: Option<Spanned<f64>>,
    lambda_extent: Option<Spanned<f64>>,
    lambda_oversampling: Option<Spanned<f64>>,
    rx_projection: Option<bool>,
    rx_lambda_extent: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    dir: Option<PathBuf>,
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: std::ops::Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn fail(&self, span: std::ops::Range<usize>, field: &str, msg: impl std::fmt::Display) -> Error {
        Error::Config(format!("line {}: {field}: {msg}", self.line(span)))
    }

    /// `q` in SI units; bare numbers are multiplied by `bare_scale`.
    fn quantity(&self, q: &Spanned<Quantity>, field: &str, dim: Dim, bare_scale: f64) -> Result<f64> {
        let v = match q.get_ref() {
            Quantity::Number(x) => x * bare_scale,
            Quantity::Text(s) => parse_si(s, dim).map_err(|m| self.fail(q.span(), field, m))?,
        };
        if !v.is_finite() {
            return Err(self.fail(q.span(), field, "must be finite"));
        }
        Ok(v)
    }
}

/// Parses and validates a TOML experiment description.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let ctx = Ctx { text };
    let d = ExperimentConfig::nfdm();

    let s = &raw.signal;
    let bandwidth = ctx.quantity(&s.bandwidth, "signal.bandwidth", Dim::Hertz, 1.0)?;
    if !(bandwidth > 0.0) {
        return Err(ctx.fail(s.bandwidth.span(), "signal.bandwidth", "must be positive"));
    }
    let n = s.n_subcarriers.as_ref().map_or(d.signal.n_subcarriers, |v| *v.get_ref());
    if n == 0 {
        let span = s.n_subcarriers.as_ref().unwrap().span();
        return Err(ctx.fail(span, "signal.n_subcarriers", "must be at least 1"));
    }
    let alpha = match &s.compression_alpha {
        Some(v) => {
            let a = *v.get_ref();
            if !(a > 0.0 && a <= 1.0) {
                return Err(ctx.fail(v.span(), "signal.compression_alpha", format!("must lie in (0, 1], got {a}")));
            }
            a
        }
        None => 1.0,
    };
    let qam_order = s.qam_order.as_ref().map_or(16, |v| *v.get_ref());
    let time = |f: &Option<Spanned<Quantity>>, name: &str| -> Result<Option<f64>> {
        f.as_ref()
            .map(|q| {
                let v = ctx.quantity(q, name, Dim::Second, 1.0)?;
                if v > 0.0 {
                    Ok(v)
                } else {
                    Err(ctx.fail(q.span(), name, "must be positive"))
                }
            })
            .transpose()
    };
    let block_time = time(&s.block_time, "signal.block_time")?.unwrap_or(d.signal.block_time);
    let mut signal = SignalPlan {
        bandwidth,
        n_subcarriers: n,
        compression_alpha: alpha,
        qam_order,
        burst_time: n as f64 * alpha / bandwidth,
        block_time,
        norm_time: 0.0,
        amplitude: d.signal.amplitude,
        pdc_enabled: s.pdc.unwrap_or(true),
    };
    if let Some(t0) = time(&s.burst_time, "signal.burst_time")? {
        signal.burst_time = t0;
    }
    signal.norm_time = time(&s.norm_time, "signal.norm_time")?
        .unwrap_or(signal.burst_time / (2.0 * std::f64::consts::PI));
    signal.validate().map_err(|e| Error::Config(format!("[signal] {e}")))?;

    let f = &raw.fiber;
    let mut fiber = d.fiber.clone();
    if let Some(q) = &f.span_length {
        fiber.span_length_km = ctx.quantity(q, "fiber.span_length", Dim::Metre, 1e3)? / 1e3;
    }
    if let Some(v) = f.n_spans {
        fiber.n_spans = v;
    }
    if let Some(v) = &f.loss {
        fiber.loss_db_per_km = *v.get_ref();
        if !(fiber.loss_db_per_km >= 0.0) {
            return Err(ctx.fail(v.span(), "fiber.loss", "must be non-negative"));
        }
    }
    if let Some(v) = &f.dispersion {
        fiber.dispersion_ps_nm_km = *v.get_ref();
    }
    if let Some(v) = &f.gamma {
        fiber.gamma_per_w_km = *v.get_ref();
        if !(fiber.gamma_per_w_km >= 0.0) {
            return Err(ctx.fail(v.span(), "fiber.gamma", "must be non-negative"));
        }
    }
    if let Some(v) = f.noise_figure {
        fiber.noise_figure_db = v;
    }
    if let Some(q) = &f.obpf_bandwidth {
        fiber.obpf_bandwidth = ctx.quantity(q, "fiber.obpf_bandwidth", Dim::Hertz, 1.0)?;
    }
    fiber.wavelength = match &f.wavelength {
        Some(q) => ctx.quantity(q, "fiber.wavelength", Dim::Metre, 1.0)?,
        None => DEFAULT_WAVELENGTH,
    };
    fiber.validate().map_err(|e| Error::Config(format!("[fiber] {e}")))?;

    let w = &raw.sweep;
    let amplitudes = w.amplitudes.as_ref().map_or(d.amplitudes.clone(), |v| v.get_ref().clone());
    let n_blocks = w.n_blocks.as_ref().map_or(d.n_blocks, |v| *v.get_ref());
    if let Some(v) = &w.n_blocks {
        if *v.get_ref() == 0 {
            return Err(ctx.fail(v.span(), "sweep.n_blocks", "must be at least 1"));
        }
    }
    if let Some(v) = &w.amplitudes {
        let a = v.get_ref();
        if a.is_empty() || a.iter().any(|x| !(*x > 0.0)) || a.windows(2).any(|p| p[0] >= p[1]) {
            return Err(ctx.fail(v.span(), "sweep.amplitudes", "must be positive and strictly ascending"));
        }
    }

    let dc = &raw.decoder;
    let decoder = DecoderConfig {
        mode: dc.mode.unwrap_or(d.decoder.mode),
        band_width: dc.band_width.unwrap_or(d.decoder.band_width),
        n_iter: match &dc.n_iter {
            Some(v) if *v.get_ref() == 0 => return Err(ctx.fail(v.span(), "decoder.n_iter", "must be at least 1")),
            Some(v) => *v.get_ref(),
            None => d.decoder.n_iter,
        },
        node_budget: match &dc.node_budget {
            Some(v) if *v.get_ref() == 0 => return Err(ctx.fail(v.span(), "decoder.node_budget", "must be at least 1")),
            Some(v) => *v.get_ref(),
            None => d.decoder.node_budget,
        },
    };

    let sm = &raw.sampling;
    let mut sampling = d.sampling.clone();
    if let Some(v) = &sm.samples_per_block {
        sampling.samples_per_block = *v.get_ref();
    }
    if let Some(v) = sm.oversampling_headroom {
        sampling.oversampling_headroom = v;
    }
    if let Some(v) = sm.window_blocks {
        sampling.window_blocks = v;
    }
    if let Some(v) = &sm.rx_window_blocks {
        sampling.rx_window_blocks = *v.get_ref();
    }
    if let Some(v) = &sm.lambda_extent {
        sampling.lambda_extent = *v.get_ref();
    }
    if let Some(v) = &sm.lambda_oversampling {
        sampling.lambda_oversampling = *v.get_ref();
    }
    if let Some(v) = sm.rx_projection {
        sampling.rx_projection = v;
    }
    if let Some(v) = &sm.rx_lambda_extent {
        sampling.rx_lambda_extent = *v.get_ref();
    }

    let cfg = ExperimentConfig {
        signal,
        fiber,
        amplitudes,
        n_blocks,
        seed: w.seed.unwrap_or(d.seed),
        noise: w.noise.unwrap_or(true),
        sampling,
        decoder,
        out_dir: raw.outputs.dir.unwrap_or(d.out_dir),
    };
    cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[signal]\nbandwidth = \"32 GHz\"\n";

    #[test]
    fn si_suffixes_are_bit_exact() {
        assert_eq!(parse_si("2.5 ns", Dim::Second).unwrap(), 2.5e-9);
        assert_eq!(parse_si("2.5ns", Dim::Second).unwrap(), 2.5e-9);
        assert_eq!(parse_si("32 GHz", Dim::Hertz).unwrap(), 32e9);
        assert_eq!(parse_si("0.1 THz", Dim::Hertz).unwrap(), 0.1e12);
        assert_eq!(parse_si("80 km", Dim::Metre).unwrap(), 80e3);
        assert_eq!(parse_si("1550 nm", Dim::Metre).unwrap(), 1550e-9);
        assert_eq!(parse_si("1.55e3 nm", Dim::Metre).unwrap(), 1.55e-6);
        assert_eq!(parse_si("3 m", Dim::Metre).unwrap(), 3.0);
        assert_eq!(parse_si("3 mm", Dim::Metre).unwrap(), 3e-3);
        assert_eq!(parse_si("7 µs", Dim::Second).unwrap(), 7e-6);
        assert_eq!(parse_si("-4 Hz", Dim::Hertz).unwrap(), -4.0);
        assert!(parse_si("32 GHz", Dim::Second).is_err());
        assert!(parse_si("32 XHz", Dim::Hertz).is_err());
        assert!(parse_si("GHz", Dim::Hertz).is_err());
        assert!(parse_si("1.2.3e GHz", Dim::Hertz).is_err());
    }

    #[test]
    fn minimal_file_loads_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.signal.n_subcarriers, 16);
        assert_eq!(cfg.signal.compression_alpha, 1.0);
        assert_eq!(cfg.signal.block_time, 2.5e-9);
        assert!((cfg.signal.guard_time() - 2e-9).abs() < 1e-21);
        assert_eq!(cfg.fiber, FiberPlan::default());
        assert_eq!(cfg.n_blocks, 400);
        assert_eq!(cfg, ExperimentConfig::nfdm());
    }

    #[test]
    fn full_file() {
        let text = r#"
[signal]
bandwidth = 32e9
n_subcarriers = 20
compression_alpha = 0.8
qam_order = 16
block_time = "2.5 ns"
pdc = true

[fiber]
span_length = "80 km"
n_spans = 12
loss = 0.2
dispersion = 16.8
gamma = 1.3
noise_figure = 5
obpf_bandwidth = "40 GHz"
wavelength = "1550 nm"

[sweep]
amplitudes = [0.1, 0.2]
n_blocks = 50
seed = 7
noise = false

[decoder]
mode = "iterative"
band_width = 5
n_iter = 3
node_budget = 1000

[sampling]
samples_per_block = 1024
rx_window_blocks = 1.5

[outputs]
dir = "results"
"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.signal.n_subcarriers, 20);
        assert_eq!(cfg.fiber, FiberPlan::default());
        assert_eq!(cfg.amplitudes, vec![0.1, 0.2]);
        assert_eq!(cfg.seed, 7);
        assert!(!cfg.noise);
        assert_eq!(cfg.decoder.mode, DecoderMode::Iterative);
        assert_eq!(cfg.decoder.band_width, 5);
        assert_eq!(cfg.sampling.samples_per_block, 1024);
        assert_eq!(cfg.out_dir, PathBuf::from("results"));
        assert_eq!(cfg.signal, ExperimentConfig::ftn(0.8).unwrap().signal);
    }

    #[test]
    fn alpha_out_of_range() {
        let e = parse_config("[signal]\nbandwidth = \"32 GHz\"\ncompression_alpha = 1.2\n").unwrap_err();
        let m = e.to_string();
        assert!(m.contains("line 3") && m.contains("compression_alpha"), "{m}");
    }

    #[test]
    fn missing_bandwidth_names_the_field() {
        let e = parse_config("[signal]\nn_subcarriers = 16\n").unwrap_err();
        assert!(e.to_string().contains("bandwidth"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse_config("[signal]\nbandwidth = 32e9\ncolour = 1\n").unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        assert!(parse_config("[signal]\nbandwidth = 32e9\n[extra]\nx = 1\n").is_err());
    }

    #[test]
    fn unit_mismatch_reports_line() {
        let e = parse_config("[signal]\nbandwidth = 32e9\nblock_time = \"2.5 GHz\"\n").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn layout_and_guard_checks() {
        // N·α must match T0·B and the guard must absorb the dispersion.
        assert!(parse_config("[signal]\nbandwidth = 32e9\nburst_time = \"1 ns\"\n").is_err());
        assert!(parse_config("[signal]\nbandwidth = 32e9\nblock_time = \"1 ns\"\n").is_err());
        assert!(parse_config("[signal]\nbandwidth = 32e9\n[sweep]\namplitudes = [0.3, 0.2]\n").is_err());
        assert!(parse_config("[signal]\nbandwidth = 32e9\n[sampling]\nsamples_per_block = 256\n").is_err());
    }

    #[test]
    fn presets() {
        for (n, a) in [(16, 1.0), (18, 0.89), (20, 0.8)] {
            let c = ExperimentConfig::preset(n, a).unwrap();
            assert_eq!(c.signal.n_subcarriers, n);
        }
        assert_eq!(ExperimentConfig::ftn(0.89).unwrap().signal.n_subcarriers, 18);
    }

    #[test]
    fn digest_tracks_content() {
        let a = ExperimentConfig::nfdm();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 16);
        b.seed = 2;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn low_statistics_warning() {
        let mut c = ExperimentConfig::nfdm();
        assert!(c.warnings().is_empty());
        c.n_blocks = 10;
        assert_eq!(c.warnings().len(), 1);
    }
}
