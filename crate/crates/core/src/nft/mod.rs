//! Nonlinear Fourier transform of the focusing NLSE.
//!
//! Normalized channel model:
//!
//! ```text
//! j ∂q/∂z + ∂²q/∂t² + 2|q|² q = 0
//! ```
//!
//! with the Zakharov–Shabat problem
//!
//! ```text
//! ∂v/∂t = [ −jλ    q ] v,      v(t → −∞) = (e^{−jλt}, 0)
//!         [ −q*   jλ ]
//! a(λ) = lim v₁(t)e^{jλt},  b(λ) = lim v₂(t)e^{−jλt}   (t → +∞)
//! ```
//!
//! Consequences of this convention:
//! * small signals: `b(λ) ≈ −∫ q*(t) e^{−2jλt} dt`;
//! * a delay `q(t − τ)` maps `b(λ) → b(λ) e^{−2jλτ}`;
//! * along the fiber `b(λ, z) = b(λ, 0) e^{4jλ² z}`;
//! * a baseband tone at frequency `f` (physical field `∝ e^{j2πft}`) sits at
//!   `λ = −π f T_s`.

mod forward;
mod inverse;

pub use forward::{edge_energy_fraction, nft_forward, nft_forward_with, scatter_at, NftOptions};
pub use inverse::{a_from_b_minphase, inft_b, inft_b_with, InftOptions, InftReport};

use crate::error::{Error, Result};
use crate::grid::{LambdaGrid, TimeGrid};
use crate::scalar::{cis, from_usize, lit, to_f64, Cplx, Real};

/// Sign `s` of the channel exponent `exp(−s·4jλ²z)`; the model above gives
/// `e^{+4jλ²z}`.
pub const DISPERSION_SIGN: f64 = -1.0;

/// Sampled complex field.
///
/// `samples` hold normalized amplitudes `q`; the physical field is
/// `√power_scale · q` and sample `i` sits at `t0 + i·dt` seconds, i.e. at
/// normalized time `(t0 + i·dt) / time_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal<T> {
    pub samples: Vec<Cplx<T>>,
    /// Sample spacing in seconds.
    pub dt: f64,
    /// Time of the first sample in seconds.
    pub t0: f64,
    /// W per normalized unit².
    pub power_scale: f64,
    /// Seconds per normalized time unit.
    pub time_scale: f64,
}

impl<T: Real> TimeSignal<T> {
    /// Signal in purely normalized units (unit scales).
    pub fn normalized(samples: Vec<Cplx<T>>, grid: &TimeGrid<T>) -> Result<Self> {
        if samples.len() != grid.len {
            return Err(Error::LengthMismatch {
                what: "samples vs time grid",
                left: samples.len(),
                right: grid.len,
            });
        }
        Ok(TimeSignal {
            samples,
            dt: to_f64(grid.dt),
            t0: to_f64(grid.t0),
            power_scale: 1.0,
            time_scale: 1.0,
        })
    }

    pub fn zeros(grid: &TimeGrid<T>) -> Self {
        TimeSignal {
            samples: vec![Cplx::new(T::zero(), T::zero()); grid.len],
            dt: to_f64(grid.dt),
            t0: to_f64(grid.t0),
            power_scale: 1.0,
            time_scale: 1.0,
        }
    }

    /// Re-expresses the same normalized samples with new physical scales.
    pub fn with_scales(mut self, time_scale: f64, power_scale: f64) -> Self {
        let r = time_scale / self.time_scale;
        self.dt *= r;
        self.t0 *= r;
        self.time_scale = time_scale;
        self.power_scale = power_scale;
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Normalized time grid.
    pub fn grid(&self) -> TimeGrid<T> {
        TimeGrid {
            t0: lit(self.t0 / self.time_scale),
            dt: lit(self.dt / self.time_scale),
            len: self.samples.len(),
        }
    }

    /// Window length in seconds.
    pub fn window(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }

    /// `∫|q|² dt` in normalized units.
    pub fn normalized_energy(&self) -> f64 {
        to_f64(crate::scalar::energy(&self.samples)) * self.dt / self.time_scale
    }

    /// Physical energy in joules.
    pub fn energy(&self) -> f64 {
        to_f64(crate::scalar::energy(&self.samples)) * self.dt * self.power_scale
    }

    /// Physical energy averaged over `period` seconds, in watts.
    pub fn average_power(&self, period: f64) -> f64 {
        self.energy() / period
    }

    /// Physical field samples `√P0 · q`.
    pub fn physical_field(&self) -> Vec<Cplx<T>> {
        let s: T = lit(self.power_scale.sqrt());
        self.samples.iter().map(|z| z * s).collect()
    }

    /// Replaces the samples from a physical field.
    pub fn set_physical_field(&mut self, field: &[Cplx<T>]) {
        let s: T = lit(1.0 / self.power_scale.sqrt());
        self.samples = field.iter().map(|z| z * s).collect();
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Continuous-spectrum scattering coefficients on a λ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData<T> {
    pub grid: LambdaGrid<T>,
    pub a: Vec<Cplx<T>>,
    pub b: Vec<Cplx<T>>,
}

impl<T: Real> ScatteringData<T> {
    /// `max_λ | |a|² + |b|² − 1 |`.
    pub fn unimodularity_error(&self) -> T {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - T::one()).abs())
            .fold(T::zero(), T::max)
    }
}

/// All-pass channel response `exp(−s·4jλ²𝓛)` over normalized distance 𝓛.
pub fn channel_response_nfd<T: Real>(grid: &LambdaGrid<T>, distance_norm: T) -> Vec<Cplx<T>> {
    let k: T = lit(-DISPERSION_SIGN * 4.0);
    grid.values()
        .into_iter()
        .map(|l| cis(k * l * l * distance_norm))
        .collect()
}

/// Continuous-spectrum energy `−(1/π)∫ log(1 − |b|²) dλ` by the trapezoid
/// rule on the grid.
pub fn spectral_energy<T: Real>(grid: &LambdaGrid<T>, b: &[Cplx<T>]) -> T {
    let n = b.len();
    let mut s = T::zero();
    for (i, z) in b.iter().enumerate() {
        let w = if i == 0 || i + 1 == n { lit(0.5) } else { T::one() };
        s = s + w * (T::one() - z.norm_sqr()).ln();
    }
    -s * grid.step() / T::PI()
}

pub(crate) fn cell_width<T: Real>(grid: &TimeGrid<T>) -> T {
    grid.span() / from_usize(grid.len)
}
