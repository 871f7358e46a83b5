//! Receiver DSP: NFD equalization, subcarrier demapping, ICI-aware
//! detection and link metrics.

mod detect;
mod ici;
mod metrics;
mod sphere;

pub use detect::{iterative_detect, IterativeConfig, IterativeDetection, WindowedDetector};
pub use ici::{ici_matrix, IciMatrix, Whitener};
pub use metrics::{ber, bit_errors, dbm, evm, q_from_ber, LinkMetrics};
pub use sphere::{decode_complex, sphere_decode, Detection, SphereConfig, SphereDecoder};

use crate::error::{Error, Result};
use crate::grid::LambdaGrid;
use crate::nft::{channel_response_nfd, ScatteringData};
use crate::params::SignalPlan;
use crate::scalar::{cis, from_usize, lit, sinc_norm, to_f64, Cplx, Real};
use crate::txdsp::NfdSpectrum;

/// Undoes the channel on `b`: the full response, or half of it when the
/// transmitter pre-compensated the other half.
pub fn equalize_nfd<T: Real>(
    received: &ScatteringData<T>,
    distance_norm: T,
    pdc: bool,
) -> NfdSpectrum<T> {
    let dist = if pdc { distance_norm / lit(2.0) } else { distance_norm };
    let h = channel_response_nfd(&received.grid, dist);
    NfdSpectrum {
        grid: received.grid,
        b: received.b.iter().zip(&h).map(|(b, h)| b * h.conj()).collect(),
        a: Some(received.a.clone()),
    }
}

/// Band-limited (Whittaker) interpolation of `values` on `grid` at `lambda`.
///
/// Exact grid points are returned verbatim; points outside the grid fail
/// with [`Error::GridMismatch`].
pub fn interpolate<T: Real>(grid: &LambdaGrid<T>, values: &[Cplx<T>], lambda: T) -> Result<Cplx<T>> {
    let tol: T = lit(1e-9);
    if let Some(i) = grid.index_of(lambda, tol) {
        return Ok(values[i]);
    }
    let pos = grid.position(lambda);
    if pos < T::zero() || pos > from_usize(grid.len() - 1) {
        return Err(Error::GridMismatch {
            lambda: to_f64(lambda),
            reason: format!(
                "outside the grid [{}, {}]",
                to_f64(grid.first()),
                to_f64(grid.last())
            ),
        });
    }
    Ok(values
        .iter()
        .enumerate()
        .fold(Cplx::new(T::zero(), T::zero()), |acc, (i, v)| {
            acc + v * sinc_norm(pos - from_usize(i))
        }))
}

/// Received symbol vector `r` of burst `m`: strips the block ramp, samples
/// `b` at the subcarrier centers and divides by `A`. Noise-free, `r = G·c`.
pub fn demap_subcarriers<T: Real>(
    spec: &NfdSpectrum<T>,
    plan: &SignalPlan,
    m: usize,
) -> Result<Vec<Cplx<T>>> {
    let ramp: T = lit(2.0 * m as f64 * plan.block_time / plan.norm_time);
    let derotated: Vec<Cplx<T>> = spec
        .grid
        .values()
        .into_iter()
        .zip(&spec.b)
        .map(|(l, b)| b * cis(ramp * l))
        .collect();
    let inv_amp: T = lit(1.0 / plan.amplitude);
    (0..plan.n_subcarriers)
        .map(|p| {
            let lambda: T = lit(plan.subcarrier_center(plan.subcarrier_index(p)));
            interpolate(&spec.grid, &derotated, lambda).map(|z| z * inv_amp)
        })
        .collect()
}

/// Received symbol vector of burst `m` by projecting `b` onto each
/// subcarrier shape.
///
/// Equivalent to gating the equalized burst to its `T0` support before
/// sampling, so noise outside the burst is rejected. Noise-free, `r = G·c`;
/// white noise on `b` becomes noise with covariance `∝ G`. `spec.grid` must
/// resolve the subcarrier band; the integral is a Riemann sum on it.
pub fn demap_projected<T: Real>(
    spec: &NfdSpectrum<T>,
    plan: &SignalPlan,
    m: usize,
) -> Result<Vec<Cplx<T>>> {
    let centers: Vec<f64> = (0..plan.n_subcarriers)
        .map(|p| plan.subcarrier_center(plan.subcarrier_index(p)))
        .collect();
    let half = 0.5 * plan.lambda_spacing();
    let (lo, hi) = (centers[centers.len() - 1] - half, centers[0] + half);
    if to_f64(spec.grid.first()) > lo || to_f64(spec.grid.last()) < hi {
        return Err(Error::GridMismatch {
            lambda: if to_f64(spec.grid.first()) > lo { lo } else { hi },
            reason: "grid does not cover the subcarrier band".into(),
        });
    }
    let ramp: T = lit(2.0 * m as f64 * plan.block_time / plan.norm_time);
    let t: T = lit(plan.burst_time / plan.norm_time);
    let weight: T = t * spec.grid.step() / T::PI() / lit(plan.amplitude);
    let lambdas = spec.grid.values();
    let derotated: Vec<Cplx<T>> = lambdas
        .iter()
        .zip(&spec.b)
        .map(|(&l, b)| b * cis(ramp * l))
        .collect();
    Ok(centers
        .iter()
        .map(|&c| {
            let c: T = lit(c);
            lambdas
                .iter()
                .zip(&derotated)
                .fold(Cplx::new(T::zero(), T::zero()), |acc, (&l, b)| {
                    acc + b * crate::scalar::sinc_unnorm(t * (l - c))
                })
                * weight
        })
        .collect())
}

/// Gram matrix of the subcarrier shapes restricted to `grid`: the
/// noise-free response of [`demap_projected`] to a spectrum synthesized on
/// the same extent. Tends to [`ici_matrix`] as the grid widens.
pub fn projected_gram<T: Real>(plan: &SignalPlan, grid: &LambdaGrid<T>) -> IciMatrix<T> {
    let n = plan.n_subcarriers;
    let t: T = lit(plan.burst_time / plan.norm_time);
    let weight: T = t * grid.step() / T::PI();
    let lambdas = grid.values();
    let shapes: Vec<Vec<T>> = (0..n)
        .map(|p| {
            let c: T = lit(plan.subcarrier_center(plan.subcarrier_index(p)));
            lambdas.iter().map(|&l| crate::scalar::sinc_unnorm(t * (l - c))).collect()
        })
        .collect();
    let mut entries = vec![T::zero(); n * n];
    for k in 0..n {
        for l in k..n {
            let s = shapes[k]
                .iter()
                .zip(&shapes[l])
                .fold(T::zero(), |acc, (&x, &y)| acc + x * y)
                * weight;
            entries[k * n + l] = s;
            entries[l * n + k] = s;
        }
    }
    IciMatrix {
        order: n,
        alpha: lit(plan.compression_alpha),
        entries,
    }
}

/// λ grid holding exactly the subcarrier centers (plus one symmetric
/// extra point for even `N`).
pub fn center_grid<T: Real>(plan: &SignalPlan) -> Result<LambdaGrid<T>> {
    let n = plan.n_subcarriers;
    LambdaGrid::symmetric(lit(plan.lambda_spacing()), 2 * (n / 2) + 1)
}
