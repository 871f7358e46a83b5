//! Forward NFT by piecewise-constant transfer matrices.
//!
//! Sample `q_n` is held constant on its cell `[t_n − h/2, t_n + h/2]`, where
//! the Zakharov–Shabat matrix `M` satisfies `M² = −(λ² + |q_n|²)I` and so
//! `exp(hM) = cos(kh)·I + sin(kh)/k·M`. The scheme is exact for piecewise
//! constant signals and second order for smooth ones.

use super::{cell_width, ScatteringData, TimeSignal};
use crate::error::{Error, Result};
use crate::grid::{LambdaGrid, TimeGrid};
use crate::scalar::{cis, from_usize, lit, to_f64, Cplx, Real};

/// Forward-transform guards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NftOptions {
    /// Share of the window, at each end, checked for leaked energy.
    pub edge_fraction: f64,
    /// Largest allowed edge-to-total energy ratio; `None` disables the check.
    pub edge_threshold: Option<f64>,
}

impl Default for NftOptions {
    fn default() -> Self {
        NftOptions {
            edge_fraction: 0.05,
            edge_threshold: Some(1e-4),
        }
    }
}

/// Energy in the first and last `fraction` of the samples over the total.
pub fn edge_energy_fraction<T: Real>(samples: &[Cplx<T>], fraction: f64) -> f64 {
    let n = samples.len();
    let m = ((n as f64 * fraction).ceil() as usize).min(n / 2);
    let total: f64 = samples.iter().map(|z| to_f64(z.norm_sqr())).sum();
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = samples[..m]
        .iter()
        .chain(&samples[n - m..])
        .map(|z| to_f64(z.norm_sqr()))
        .sum();
    edge / total
}

/// Forward NFT with default guards.
pub fn nft_forward<T: Real>(
    signal: &TimeSignal<T>,
    grid: &LambdaGrid<T>,
) -> Result<ScatteringData<T>> {
    nft_forward_with(signal, grid, &NftOptions::default())
}

pub fn nft_forward_with<T: Real>(
    signal: &TimeSignal<T>,
    grid: &LambdaGrid<T>,
    opts: &NftOptions,
) -> Result<ScatteringData<T>> {
    if !signal.is_finite() {
        return Err(Error::Domain("signal contains non-finite samples".into()));
    }
    if let Some(threshold) = opts.edge_threshold {
        let fraction = edge_energy_fraction(&signal.samples, opts.edge_fraction);
        if fraction > threshold {
            return Err(Error::EdgeEnergy {
                fraction,
                threshold,
            });
        }
    }
    let (a, b) = scatter_at(&signal.samples, &signal.grid(), &grid.values());
    Ok(ScatteringData { grid: *grid, a, b })
}

/// Scattering coefficients `(a, b)` of `samples` on `time` at each `λ`.
pub fn scatter_at<T: Real>(
    samples: &[Cplx<T>],
    time: &TimeGrid<T>,
    lambdas: &[T],
) -> (Vec<Cplx<T>>, Vec<Cplx<T>>) {
    let h = cell_width(time);
    let half: T = lit(0.5);
    let t_left = time.t0 - half * h;
    let t_right = time.t0 + (from_usize::<T>(samples.len()) - half) * h;
    let q2: Vec<T> = samples.iter().map(|z| z.norm_sqr()).collect();
    let mut a_out = Vec::with_capacity(lambdas.len());
    let mut b_out = Vec::with_capacity(lambdas.len());
    let j = Cplx::new(T::zero(), T::one());
    for &lambda in lambdas {
        let l2 = lambda * lambda;
        let mut v1 = cis(-lambda * t_left);
        let mut v2 = Cplx::new(T::zero(), T::zero());
        for (q, &m2) in samples.iter().zip(&q2) {
            let k = (l2 + m2).sqrt();
            let (s, c) = (k * h).sin_cos();
            let sk = if k > T::zero() { s / k } else { h };
            let jls = j * (lambda * sk);
            let qs = q * sk;
            let n1 = v1 * (Cplx::from(c) - jls) + v2 * qs;
            let n2 = -(v1 * qs.conj()) + v2 * (Cplx::from(c) + jls);
            v1 = n1;
            v2 = n2;
        }
        a_out.push(v1 * cis(lambda * t_right));
        b_out.push(v2 * cis(-lambda * t_right));
    }
    (a_out, b_out)
}
