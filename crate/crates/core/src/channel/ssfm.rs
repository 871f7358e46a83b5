//! Symmetric split-step Fourier integration of
//! `∂A/∂z = −(α/2)A − j(β₂/2)∂²A/∂T² + jγ|A|²A` on a periodic grid.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::nft::TimeSignal;
use crate::params::FiberPlan;
use crate::scalar::{cis, lit, to_f64, Cplx, Real};

/// Homogeneous fiber piece in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSegment {
    /// m
    pub length: f64,
    /// Power attenuation (1/m).
    pub loss: f64,
    /// s²/m
    pub beta2: f64,
    /// 1/(W·m)
    pub gamma: f64,
}

impl FiberSegment {
    /// One span of `fiber`.
    pub fn span(fiber: &FiberPlan) -> Self {
        FiberSegment {
            length: fiber.span_length(),
            loss: fiber.loss_per_m(),
            beta2: fiber.beta2(),
            gamma: fiber.gamma(),
        }
    }
}

/// Fixed-step control with a nonlinear phase guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Longest step (m).
    pub max_step: f64,
    /// Largest tolerated `γ·max|A|²·dz` per step (rad).
    pub phase_cap: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            max_step: 100.0,
            phase_cap: 1e-3,
        }
    }
}

/// `e^{jφ}`, by its Taylor polynomial for the small phases of a Kerr step.
#[inline]
fn kerr_rotor<T: Real>(phi: T) -> Cplx<T> {
    if phi.abs() < lit(1e-2) {
        let p2 = phi * phi;
        let c = T::one() - p2 * (lit::<T>(0.5) - p2 * (lit::<T>(1.0 / 24.0) - p2 * lit::<T>(1.0 / 720.0)));
        let s = phi
            * (T::one()
                - p2 * (lit::<T>(1.0 / 6.0) - p2 * (lit::<T>(1.0 / 120.0) - p2 * lit::<T>(1.0 / 5040.0))));
        Cplx::new(c, s)
    } else {
        cis(phi)
    }
}

/// Angular frequencies of the FFT bins for spacing `dt`.
pub(crate) fn omega(n: usize, dt: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            2.0 * PI * k / (n as f64 * dt)
        })
        .collect()
}

/// Linear propagator `exp((−α/2 + jβ₂ω²/2)·dz)`, scaled by `1/N` for the
/// unnormalized inverse FFT.
fn linear_operator<T: Real>(w: &[f64], seg: &FiberSegment, dz: f64) -> Vec<Cplx<T>> {
    let scale = 1.0 / w.len() as f64;
    w.iter()
        .map(|&w| {
            let amp = (-0.5 * seg.loss * dz).exp() * scale;
            let ph = 0.5 * seg.beta2 * w * w * dz;
            Cplx::new(lit(amp * ph.cos()), lit(amp * ph.sin()))
        })
        .collect()
}

/// Propagates `signal` through `seg`.
///
/// The step is `min(max_step, phase_cap/(2·γ·P_peak))` for the launch peak
/// power, spread uniformly over the segment; if dispersion later raises the
/// per-step phase above the cap the call fails with [`Error::StepSize`].
pub fn ssfm_propagate<T: Real>(
    signal: &TimeSignal<T>,
    seg: &FiberSegment,
    ctrl: &StepControl,
) -> Result<TimeSignal<T>> {
    let n = signal.len();
    let mut out = signal.clone();
    if n == 0 || seg.length == 0.0 {
        return Ok(out);
    }
    let mut field = signal.physical_field();
    let peak = field.iter().map(|z| to_f64(z.norm_sqr())).fold(0.0, f64::max);
    let mut dz = ctrl.max_step.min(seg.length);
    if seg.gamma > 0.0 && peak > 0.0 {
        dz = dz.min(0.5 * ctrl.phase_cap / (seg.gamma * peak));
    }
    let steps = (seg.length / dz).ceil().max(1.0) as usize;
    let dz = seg.length / steps as f64;

    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut scratch = vec![Cplx::new(T::zero(), T::zero()); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
    let w = omega(n, signal.dt);
    let half = linear_operator::<T>(&w, seg, 0.5 * dz);
    let full = linear_operator::<T>(&w, seg, dz);
    let linear = |f: &mut [Cplx<T>], op: &[Cplx<T>], scratch: &mut [Cplx<T>]| {
        fwd.process_with_scratch(f, scratch);
        for (x, h) in f.iter_mut().zip(op) {
            *x = *x * h;
        }
        inv.process_with_scratch(f, scratch);
    };
    let g_dz: T = lit(seg.gamma * dz);
    let cap: T = lit(ctrl.phase_cap);

    linear(&mut field, &half, &mut scratch);
    for step in 0..steps {
        if seg.gamma != 0.0 {
            let mut max_phase = T::zero();
            for x in field.iter_mut() {
                let phi = g_dz * x.norm_sqr();
                max_phase = max_phase.max(phi);
                *x = *x * kerr_rotor(phi);
            }
            if max_phase > cap {
                return Err(Error::StepSize {
                    phase: to_f64(max_phase),
                    cap: ctrl.phase_cap,
                });
            }
        }
        let op = if step + 1 == steps { &half } else { &full };
        linear(&mut field, op, &mut scratch);
    }
    out.set_physical_field(&field);
    Ok(out)
}
