//! Fiber link: lossy NLSE spans, lumped amplifiers with ASE and optical
//! band-pass filtering.

mod ssfm;

pub use ssfm::{ssfm_propagate, FiberSegment, StepControl};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::Result;
use crate::nft::TimeSignal;
use crate::params::{FiberPlan, PLANCK};
use crate::scalar::{lit, Cplx, Real};

/// ASE spectral density `(G − 1)·n_sp·h·ν` (W/Hz, one polarization) with
/// `n_sp = 10^(NF/10)/2`.
pub fn ase_psd(gain_db: f64, nf_db: f64, frequency: f64) -> f64 {
    let g = 10f64.powf(gain_db / 10.0);
    let nsp = 10f64.powf(nf_db / 10.0) / 2.0;
    (g - 1.0) * nsp * PLANCK * frequency
}

/// Amplifies by `gain_db` and adds circular white Gaussian ASE over the
/// full simulation band (per-sample variance `S_ASE/dt`).
pub fn edfa<T: Real, R: Rng + ?Sized>(
    signal: &TimeSignal<T>,
    gain_db: f64,
    nf_db: f64,
    frequency: f64,
    rng: &mut R,
) -> TimeSignal<T> {
    let gain = 10f64.powf(gain_db / 10.0);
    let psd = ase_psd(gain_db, nf_db, frequency);
    // Work on normalized samples: scale the noise by 1/√P0.
    let sigma = (psd / signal.dt / 2.0 / signal.power_scale).sqrt();
    let amp: T = lit(gain.sqrt());
    let mut out = signal.clone();
    for x in out.samples.iter_mut() {
        *x = *x * amp;
        if psd > 0.0 {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *x = *x + Cplx::new(lit(sigma * re), lit(sigma * im));
        }
    }
    out
}

/// Ideal rectangular filter keeping `|f| ≤ bandwidth/2` (two-sided width
/// `bandwidth`); out-of-band bins are set to zero.
pub fn obpf<T: Real>(signal: &TimeSignal<T>, bandwidth: f64) -> TimeSignal<T> {
    let n = signal.len();
    let mut out = signal.clone();
    if n == 0 {
        return out;
    }
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(n).process(&mut out.samples);
    let df = 1.0 / (n as f64 * signal.dt);
    let scale: T = lit(1.0 / n as f64);
    for (k, x) in out.samples.iter_mut().enumerate() {
        let kk = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
        if (kk * df).abs() > 0.5 * bandwidth {
            *x = Cplx::new(T::zero(), T::zero());
        } else {
            *x = *x * scale;
        }
    }
    planner.plan_fft_inverse(n).process(&mut out.samples);
    out
}

/// Independent noise stream of one simulated burst.
///
/// Span `s` draws from a ChaCha8 generator keyed by `seed` on stream
/// `mix(power_index, block, s)`, so results do not depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseKey {
    pub seed: u64,
    pub power_index: u64,
    pub block: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl NoiseKey {
    pub fn span_rng(&self, span: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let stream = splitmix(splitmix(splitmix(self.power_index) ^ self.block) ^ span as u64);
        rng.set_stream(stream);
        rng
    }
}

/// Link switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkOptions {
    pub noise: bool,
    /// Filter after every amplifier (otherwise once, after the last span).
    pub obpf_every_span: bool,
    pub step: StepControl,
}

impl Default for LinkOptions {
    fn default() -> Self {
        LinkOptions {
            noise: true,
            obpf_every_span: true,
            step: StepControl::default(),
        }
    }
}

/// Output of [`run_link`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpanResult<T> {
    pub signal: TimeSignal<T>,
    /// Sum of the ASE densities added so far (W/Hz, referred to the output).
    pub accumulated_ase_psd: f64,
    pub spans_done: usize,
}

/// `n_spans × (SSFM span → EDFA restoring the span loss → OBPF)`.
pub fn run_link<T: Real>(
    signal: &TimeSignal<T>,
    fiber: &FiberPlan,
    key: &NoiseKey,
    opts: &LinkOptions,
) -> Result<SpanResult<T>> {
    let seg = FiberSegment::span(fiber);
    let gain_db = fiber.span_loss_db();
    let nf = if opts.noise { fiber.noise_figure_db } else { f64::NEG_INFINITY };
    let frequency = fiber.carrier_frequency();
    let mut sig = signal.clone();
    let mut accumulated = 0.0;
    for span in 0..fiber.n_spans {
        sig = ssfm_propagate(&sig, &seg, &opts.step)?;
        let mut rng = key.span_rng(span);
        sig = edfa(&sig, gain_db, nf, frequency, &mut rng);
        accumulated += ase_psd(gain_db, nf, frequency);
        if opts.obpf_every_span || span + 1 == fiber.n_spans {
            sig = obpf(&sig, fiber.obpf_bandwidth);
        }
    }
    Ok(SpanResult {
        signal: sig,
        accumulated_ase_psd: accumulated,
        spans_done: fiber.n_spans,
    })
}
