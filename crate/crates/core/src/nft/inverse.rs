//! Inverse NFT for b-modulated continuous spectra.
//!
//! A discrete scattering model with point kicks at the sample times
//!
//! ```text
//! K_n = [  c_n                s_n e^{2jλt_n} ]    c_n = cos(|q_n|h)
//!       [ −s_n* e^{−2jλt_n}   c_n            ]    s_n = q_n/|q_n| · sin(|q_n|h)
//! ```
//!
//! turns `a` and `b` into trigonometric polynomials in `w = e^{−2jλh}`:
//! `a = Σ α_k w^{−k}`, `b = e^{−2jλt_0} Σ β_i w^i`. Given `β` from the target
//! spectrum and `α` from its minimum-phase factor, the kicks are peeled off
//! from the last sample backwards. The remaining mismatch between the kick
//! model and the cell-exact forward transform is removed by defect
//! correction on the target spectrum.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::forward::scatter_at;
use super::{cell_width, TimeSignal};
use crate::error::{Error, Result};
use crate::grid::{LambdaGrid, TimeGrid};
use crate::scalar::{cis, from_usize, lit, rel_l2, to_f64, Cplx, Real};
use crate::txdsp::NfdSpectrum;

/// Inverse-transform controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InftOptions {
    /// Target relative L2 mismatch between `nft_forward(q)` and `b`.
    pub tolerance: f64,
    /// Defect-correction passes before giving up.
    pub max_iter: usize,
    /// Oversampling of the λ period used for the cepstrum of `a`.
    pub oversampling: usize,
}

impl Default for InftOptions {
    fn default() -> Self {
        InftOptions {
            tolerance: 1e-5,
            max_iter: 12,
            oversampling: 4,
        }
    }
}

/// Outcome of [`inft_b_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InftReport {
    pub residual: f64,
    pub iterations: usize,
}

fn fft_pair<T: Real>(n: usize) -> (Arc<dyn Fft<T>>, Arc<dyn Fft<T>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

/// Minimum-phase cepstrum: maps `½ log(1 − |b|²)` samples on a periodic
/// grid to `log a`, analytic in the upper half plane.
fn minphase_log<T: Real>(half_log: &mut [Cplx<T>], fwd: &dyn Fft<T>, inv: &dyn Fft<T>) {
    let p = half_log.len();
    fwd.process(half_log);
    let scale = T::one() / from_usize(p);
    let two: T = lit(2.0);
    for (k, c) in half_log.iter_mut().enumerate() {
        *c = if k == 0 || 2 * k == p {
            *c * scale
        } else if 2 * k < p {
            *c * (two * scale)
        } else {
            Cplx::new(T::zero(), T::zero())
        };
    }
    inv.process(half_log);
}

fn half_log_modulus<T: Real>(b: Cplx<T>) -> Result<T> {
    let m = b.norm_sqr();
    if m >= T::one() {
        return Err(Error::BModAmplitude {
            max_abs: to_f64(m.sqrt()),
            limit: 1.0,
        });
    }
    Ok(lit::<T>(0.5) * (-m).ln_1p())
}

/// `a(λ)` of a b-modulated continuous spectrum: `|a|² = 1 − |b|²` with `a`
/// analytic and zero-free for `Im λ > 0`.
///
/// `b` is taken as zero outside the grid; the grid is zero-padded eightfold
/// before the Hilbert transform.
pub fn a_from_b_minphase<T: Real>(b: &[Cplx<T>], grid: &LambdaGrid<T>) -> Result<Vec<Cplx<T>>> {
    if b.len() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "b vs grid",
            left: b.len(),
            right: grid.len(),
        });
    }
    let n = b.len();
    let p = (8 * n).next_power_of_two();
    // Grid point i maps to periodic index (i − center) mod p.
    let center = n / 2;
    let mut buf = vec![Cplx::new(T::zero(), T::zero()); p];
    for (i, z) in b.iter().enumerate() {
        let idx = (i + p - center) % p;
        buf[idx] = Cplx::new(half_log_modulus(*z)?, T::zero());
    }
    let (fwd, inv) = fft_pair::<T>(p);
    minphase_log(&mut buf, fwd.as_ref(), inv.as_ref());
    // The Hilbert transform is shift invariant, so an even grid (which
    // straddles zero) is handled by the same index map.
    let a = (0..n).map(|i| buf[(i + p - center) % p].exp()).collect();
    Ok(a)
}

/// Inverse NFT with default options.
pub fn inft_b<T: Real>(spec: &NfdSpectrum<T>, time: &TimeGrid<T>) -> Result<TimeSignal<T>> {
    inft_b_with(spec, time, &InftOptions::default()).map(|(s, _)| s)
}

/// Inverse NFT of the continuous spectrum `b` onto `time`.
///
/// The λ grid must be no coarser than `π/W` (`W` the window length) and lie
/// inside the band `|λ| < π/(2h)` resolvable by the sampling.
pub fn inft_b_with<T: Real>(
    spec: &NfdSpectrum<T>,
    time: &TimeGrid<T>,
    opts: &InftOptions,
) -> Result<(TimeSignal<T>, InftReport)> {
    let grid = spec.grid;
    let peak = spec.max_abs_b();
    if peak >= T::one() {
        return Err(Error::BModAmplitude {
            max_abs: to_f64(peak),
            limit: 1.0,
        });
    }
    let h = cell_width(time);
    let window = time.span();
    let slack: T = lit(1.0 + 1e-9);
    if grid.step() > T::PI() / window * slack {
        return Err(Error::invalid(
            "lambda_grid",
            format!(
                "step {} is coarser than π/W = {}",
                grid.step(),
                T::PI() / window
            ),
        ));
    }
    let nyquist = T::PI() / (lit::<T>(2.0) * h);
    if grid.last() >= nyquist {
        return Err(Error::invalid(
            "lambda_grid",
            format!("extent {} exceeds the sampling band {}", grid.last(), nyquist),
        ));
    }
    if spec.b.iter().all(|z| z.norm_sqr() == T::zero()) {
        return Ok((
            TimeSignal::zeros(time),
            InftReport {
                residual: 0.0,
                iterations: 0,
            },
        ));
    }

    let peeler = Peeler::new(time, &grid, opts.oversampling.max(1));
    let lambdas = grid.values();
    let target = &spec.b;
    let mut drive = target.clone();
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let q = peeler.run(&drive)?;
        let (_, b) = scatter_at(&q, time, &lambdas);
        residual = to_f64(rel_l2(&b, target));
        if residual <= opts.tolerance {
            let signal = TimeSignal::normalized(q, time)?;
            return Ok((
                signal,
                InftReport {
                    residual,
                    iterations: iter,
                },
            ));
        }
        for ((d, t), got) in drive.iter_mut().zip(target).zip(&b) {
            *d = *d + (t - got);
        }
    }
    Err(Error::Convergence {
        residual,
        iterations: opts.max_iter,
        tolerance: opts.tolerance,
    })
}

/// Reusable state for one (time grid, λ grid) pair.
struct Peeler<T: Real> {
    time: TimeGrid<T>,
    h: T,
    /// Per grid point `e^{2jλ_j t_0}` and `e^{2jλ_j h}`.
    start: Vec<Cplx<T>>,
    step: Vec<Cplx<T>>,
    /// Quadrature weight `h·δλ/π`.
    weight: T,
    p: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> Peeler<T> {
    fn new(time: &TimeGrid<T>, grid: &LambdaGrid<T>, oversampling: usize) -> Self {
        let h = cell_width(time);
        let two: T = lit(2.0);
        let lambdas = grid.values();
        let p = (oversampling * time.len).next_power_of_two();
        let (fwd, inv) = fft_pair(p);
        Peeler {
            time: *time,
            h,
            start: lambdas.iter().map(|&l| cis(two * l * time.t0)).collect(),
            step: lambdas.iter().map(|&l| cis(two * l * h)).collect(),
            weight: h * grid.step() / T::PI(),
            p,
            fwd,
            inv,
        }
    }

    /// `β_i = (h δλ/π) Σ_j b_j e^{2jλ_j t_i}`.
    fn beta(&self, b: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let m = self.time.len;
        let mut beta = vec![Cplx::new(T::zero(), T::zero()); m];
        for ((bj, s0), ds) in b.iter().zip(&self.start).zip(&self.step) {
            if bj.norm_sqr() == T::zero() {
                continue;
            }
            let mut ph = bj * s0 * self.weight;
            for x in beta.iter_mut() {
                *x = *x + ph;
                ph = ph * ds;
            }
        }
        beta
    }

    fn run(&self, b: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
        let m = self.time.len;
        let p = self.p;
        let mut beta = self.beta(b);

        // |B| on the oversampled period, then the min-phase a and its
        // coefficients α_k (powers of w^{−1}).
        let mut buf = vec![Cplx::new(T::zero(), T::zero()); p];
        buf[..m].copy_from_slice(&beta);
        self.fwd.process(&mut buf);
        for z in buf.iter_mut() {
            *z = Cplx::new(half_log_modulus(*z)?, T::zero());
        }
        minphase_log(&mut buf, self.fwd.as_ref(), self.inv.as_ref());
        for z in buf.iter_mut() {
            *z = z.exp();
        }
        self.fwd.process(&mut buf);
        let scale = T::one() / from_usize(p);
        let mut alpha: Vec<Cplx<T>> = buf[..m].iter().map(|z| z * scale).collect();

        let mut q = vec![Cplx::new(T::zero(), T::zero()); m];
        let mut alpha_next = alpha.clone();
        let mut beta_next = beta.clone();
        for n in (0..m).rev() {
            let r = -beta[n] / alpha[0];
            let rn = r.norm();
            if !rn.is_finite() {
                return Err(Error::Convergence {
                    residual: f64::INFINITY,
                    iterations: 0,
                    tolerance: 0.0,
                });
            }
            if rn == T::zero() {
                continue;
            }
            let c = T::one() / (T::one() + rn * rn).sqrt();
            let s = r.conj() * c;
            q[n] = r.conj() / rn * (rn.atan() / self.h);
            for k in 0..=n {
                alpha_next[k] = alpha[k] * c - s * beta[n - k];
            }
            for i in 0..n {
                beta_next[i] = s.conj() * alpha[n - i] + beta[i] * c;
            }
            std::mem::swap(&mut alpha, &mut alpha_next);
            std::mem::swap(&mut beta, &mut beta_next);
        }
        Ok(q)
    }
}
