//! Transmitter DSP: QAM mapping and b-modulated nonlinear spectra.
//!
//! Burst `m` carries
//! `b_m(λ) = A Σ_k c_{m,k} · sinc(λT0/Ts + kαπ) · e^{−2jmλT1/Ts}`
//! with `sinc(x) = sin(x)/x`. Subcarrier `k` is centered at
//! `λ_k = −kαπTs/T0`; at `α = 1` the centers fall on the zeros of every
//! other subcarrier.

mod qam;

pub use qam::{map_qam, Constellation, SymbolBlock};

use crate::error::{Error, Result};
use crate::grid::LambdaGrid;
use crate::nft::channel_response_nfd;
use crate::params::SignalPlan;
use crate::scalar::{cis, lit, sinc_unnorm, to_f64, Cplx, Real};

/// Default b-modulation feasibility margin (`max|b| ≤ 0.99`).
pub const DEFAULT_FEASIBILITY_MARGIN: f64 = 0.01;

/// Continuous nonlinear spectrum sampled on a symmetric λ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NfdSpectrum<T> {
    pub grid: LambdaGrid<T>,
    pub b: Vec<Cplx<T>>,
    pub a: Option<Vec<Cplx<T>>>,
}

impl<T: Real> NfdSpectrum<T> {
    pub fn new(grid: LambdaGrid<T>, b: Vec<Cplx<T>>) -> Result<Self> {
        if b.len() != grid.len() {
            return Err(Error::LengthMismatch {
                what: "spectrum vs grid",
                left: b.len(),
                right: grid.len(),
            });
        }
        Ok(NfdSpectrum { grid, b, a: None })
    }

    pub fn zeros(grid: LambdaGrid<T>) -> Self {
        NfdSpectrum {
            b: vec![Cplx::new(T::zero(), T::zero()); grid.len()],
            grid,
            a: None,
        }
    }

    pub fn max_abs_b(&self) -> T {
        self.b.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// `max_λ | |a|² + |b|² − 1 |`, or `None` without `a`.
    pub fn unimodularity_error(&self) -> Option<T> {
        self.a.as_ref().map(|a| {
            a.iter()
                .zip(&self.b)
                .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - T::one()).abs())
                .fold(T::zero(), T::max)
        })
    }
}

/// b-spectrum of burst `m` of `block`.
pub fn synth_b_spectrum<T: Real>(
    block: &SymbolBlock<T>,
    m: usize,
    plan: &SignalPlan,
    grid: &LambdaGrid<T>,
) -> Result<NfdSpectrum<T>> {
    synth_from_symbols(block.block(m), m, plan, grid)
}

/// b-spectrum of one burst given its `N` subcarrier symbols.
///
/// Fails with [`Error::BModAmplitude`] when the result reaches `|b| = 1`.
pub fn synth_from_symbols<T: Real>(
    symbols: &[Cplx<T>],
    m: usize,
    plan: &SignalPlan,
    grid: &LambdaGrid<T>,
) -> Result<NfdSpectrum<T>> {
    if symbols.len() != plan.n_subcarriers {
        return Err(Error::LengthMismatch {
            what: "symbols vs subcarriers",
            left: symbols.len(),
            right: plan.n_subcarriers,
        });
    }
    let amp: T = lit(plan.amplitude);
    let t0_ts: T = lit(plan.burst_time / plan.norm_time);
    let ramp_rate: T = lit(-2.0 * m as f64 * plan.block_time / plan.norm_time);
    let offsets: Vec<T> = (0..symbols.len())
        .map(|p| lit(plan.subcarrier_index(p) as f64 * plan.compression_alpha * std::f64::consts::PI))
        .collect();
    let b: Vec<Cplx<T>> = grid
        .values()
        .into_iter()
        .map(|lambda| {
            let x = lambda * t0_ts;
            let sum = symbols
                .iter()
                .zip(&offsets)
                .fold(Cplx::new(T::zero(), T::zero()), |acc, (&c, &off)| {
                    acc + c * sinc_unnorm(x + off)
                });
            sum * amp * cis(ramp_rate * lambda)
        })
        .collect();
    let spec = NfdSpectrum::new(*grid, b)?;
    let peak = spec.max_abs_b();
    if peak >= T::one() {
        return Err(Error::BModAmplitude {
            max_abs: to_f64(peak),
            limit: 1.0,
        });
    }
    Ok(spec)
}

/// Returns `max|b|`, failing when it reaches `1 − margin`.
pub fn check_b_feasibility<T: Real>(spec: &NfdSpectrum<T>, margin: T) -> Result<T> {
    let peak = spec.max_abs_b();
    let limit = T::one() - margin;
    if peak >= limit {
        Err(Error::BModAmplitude {
            max_abs: to_f64(peak),
            limit: to_f64(limit),
        })
    } else {
        Ok(peak)
    }
}

/// Pre-dispersion compensation: multiplies `b` by the inverse of the
/// channel response over half of `total_distance_norm`.
pub fn apply_pdc<T: Real>(spec: &NfdSpectrum<T>, total_distance_norm: T) -> NfdSpectrum<T> {
    let h = channel_response_nfd(&spec.grid, total_distance_norm / lit(2.0));
    NfdSpectrum {
        grid: spec.grid,
        b: spec.b.iter().zip(&h).map(|(b, h)| b * h.conj()).collect(),
        a: spec.a.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rxdsp::ici_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plan(n: usize, alpha: f64, amp: f64) -> SignalPlan {
        SignalPlan::from_layout(32e9, n, alpha, 16, 2.5e-9)
            .unwrap()
            .with_amplitude(amp)
    }

    fn one(n: usize, p: usize) -> Vec<Cplx<f64>> {
        let mut c = vec![Cplx::new(0.0, 0.0); n];
        c[p] = Cplx::new(1.0, 0.0);
        c
    }

    fn at(spec: &NfdSpectrum<f64>, lambda: f64) -> Cplx<f64> {
        spec.b[spec.grid.index_of(lambda, 1e-6).unwrap()]
    }

    fn grid_for(plan: &SignalPlan) -> LambdaGrid<f64> {
        LambdaGrid::covering(16.0, plan.lambda_spacing() / 8.0).unwrap()
    }

    #[test]
    fn single_subcarrier_at_origin() {
        let p = plan(16, 1.0, 0.5);
        let g = grid_for(&p);
        let spec = synth_from_symbols(&one(16, 8), 0, &p, &g).unwrap();
        assert!((at(&spec, 0.0) - Cplx::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn orthogonal_centers_return_symbols() {
        let p = plan(16, 1.0, 0.4);
        let g = grid_for(&p);
        let c = Constellation::<f64>::new(16).unwrap();
        let blk = SymbolBlock::random(&mut ChaCha8Rng::seed_from_u64(1), &c, 16, 1);
        let spec = synth_b_spectrum(&blk, 0, &p, &g).unwrap();
        for (pos, sym) in blk.block(0).iter().enumerate() {
            let lam = p.subcarrier_center(p.subcarrier_index(pos));
            assert!((at(&spec, lam) - sym * 0.4).norm() < 1e-12);
        }
    }

    #[test]
    fn ftn_overlap_example() {
        // c_0 = c_1 = 1 at α = 0.8, evaluated at the k = 0 center:
        // A·(1 + sin(0.8π)/(0.8π)).
        let mut c = vec![Cplx::new(0.0, 0.0); 20];
        c[10] = Cplx::new(1.0, 0.0);
        c[11] = Cplx::new(1.0, 0.0);
        let p = plan(20, 0.8, 1.0);
        let g = grid_for(&p);
        match synth_from_symbols(&c, 0, &p, &g) {
            Err(Error::BModAmplitude { max_abs, .. }) => assert!(max_abs >= 1.2338),
            other => panic!("expected infeasible, got {other:?}"),
        }
        let p = plan(20, 0.8, 0.5);
        let spec = synth_from_symbols(&c, 0, &p, &g).unwrap();
        assert!((at(&spec, 0.0).re - 0.616_936_160_473_579_9).abs() < 1e-12);
    }

    #[test]
    fn feasibility_thresholds() {
        let g = LambdaGrid::symmetric(0.1, 11).unwrap();
        let zero = NfdSpectrum::<f64>::zeros(g);
        assert_eq!(check_b_feasibility(&zero, 0.01).unwrap(), 0.0);
        let flat = NfdSpectrum::new(g, vec![Cplx::new(0.95, 0.0); 11]).unwrap();
        assert_eq!(check_b_feasibility(&flat, 0.01).unwrap(), 0.95);
        let mut peak = vec![Cplx::new(0.1, 0.0); 11];
        peak[3] = Cplx::new(0.0, 0.999);
        let peaky = NfdSpectrum::new(g, peak).unwrap();
        assert!(matches!(
            check_b_feasibility(&peaky, 0.01),
            Err(Error::BModAmplitude { .. })
        ));
    }

    #[test]
    fn linearity_scaling_and_ramp() {
        let p = plan(16, 0.8, 0.2);
        let g = grid_for(&p);
        let c = Constellation::<f64>::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = SymbolBlock::random(&mut rng, &c, 16, 1);
        let y = SymbolBlock::random(&mut rng, &c, 16, 1);
        let sum: Vec<_> = x.block(0).iter().zip(y.block(0)).map(|(a, b)| a + b).collect();
        let sx = synth_from_symbols(x.block(0), 5, &p, &g).unwrap();
        let sy = synth_from_symbols(y.block(0), 5, &p, &g).unwrap();
        let ss = synth_from_symbols(&sum, 5, &p, &g).unwrap();
        for i in 0..g.len() {
            assert!((ss.b[i] - sx.b[i] - sy.b[i]).norm() < 1e-12);
        }
        let p2 = plan(16, 0.8, 0.4);
        let s2 = synth_from_symbols(x.block(0), 5, &p2, &g).unwrap();
        for i in 0..g.len() {
            assert!((s2.b[i] - sx.b[i] * 2.0).norm() < 1e-12);
        }
        let s0 = synth_from_symbols(x.block(0), 0, &p, &g).unwrap();
        for i in 0..g.len() {
            assert!((s0.b[i].norm() - sx.b[i].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn ftn_centers_see_ici_matrix() {
        for alpha in [0.89_f64, 0.8] {
            let n = (16.0 / alpha).round() as usize;
            let p = plan(n, alpha, 0.2);
            let g = grid_for(&p);
            let c = Constellation::<f64>::new(16).unwrap();
            let blk = SymbolBlock::random(&mut ChaCha8Rng::seed_from_u64(9), &c, n, 1);
            let gm = ici_matrix::<f64>(n, alpha);
            let expect = gm.apply(blk.block(0));
            let spec = synth_b_spectrum(&blk, 0, &p, &g).unwrap();
            for pos in 0..n {
                let lam = p.subcarrier_center(p.subcarrier_index(pos));
                // Evaluate directly at the center (may fall between grid points).
                let single = LambdaGrid::symmetric(1.0, 1).unwrap();
                let shifted = synth_at(&p, blk.block(0), lam, single);
                assert!((shifted / 0.2 - expect[pos]).norm() < 1e-12, "alpha {alpha} pos {pos}");
                if let Some(i) = g.index_of(lam, 1e-6) {
                    assert!((spec.b[i] / 0.2 - expect[pos]).norm() < 1e-12);
                }
            }
        }
    }

    fn synth_at(p: &SignalPlan, c: &[Cplx<f64>], lambda: f64, _g: LambdaGrid<f64>) -> Cplx<f64> {
        let x = lambda * p.burst_time / p.norm_time;
        c.iter().enumerate().fold(Cplx::new(0.0, 0.0), |acc, (pos, &s)| {
            let off = p.subcarrier_index(pos) as f64 * p.compression_alpha * std::f64::consts::PI;
            acc + s * sinc_unnorm(x + off)
        }) * p.amplitude
    }

    /// 98 % energy width of the mean power spectrum over random bursts.
    fn occupied_width(alpha: f64) -> f64 {
        let p = plan(16, 1.0, 0.05);
        let mut p = p;
        p.compression_alpha = alpha;
        let g = LambdaGrid::covering(16.0, 0.01).unwrap();
        let c = Constellation::<f64>::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut psd = vec![0.0; g.len()];
        for _ in 0..64 {
            let blk = SymbolBlock::random(&mut rng, &c, 16, 1);
            let s = synth_from_symbols(blk.block(0), 0, &p, &g).unwrap();
            for (acc, b) in psd.iter_mut().zip(&s.b) {
                *acc += b.norm_sqr();
            }
        }
        // 1 %..99 % energy quantiles.
        let total: f64 = psd.iter().sum();
        let lam = g.values();
        let mut acc = 0.0;
        let (mut lo, mut hi) = (None, None);
        for (l, v) in lam.iter().zip(&psd) {
            acc += v;
            if lo.is_none() && acc >= 0.01 * total {
                lo = Some(*l);
            }
            if hi.is_none() && acc >= 0.99 * total {
                hi = Some(*l);
            }
        }
        hi.unwrap() - lo.unwrap()
    }

    #[test]
    fn compression_shrinks_occupied_band() {
        let ratio = occupied_width(0.8) / occupied_width(1.0);
        assert!((ratio - 0.8).abs() < 0.08, "ratio {ratio}");
    }

    #[test]
    fn pdc_is_unimodular_and_identity_at_zero() {
        let p = plan(16, 1.0, 0.3);
        let g = grid_for(&p);
        let c = Constellation::<f64>::new(16).unwrap();
        let blk = SymbolBlock::random(&mut ChaCha8Rng::seed_from_u64(5), &c, 16, 1);
        let spec = synth_b_spectrum(&blk, 0, &p, &g).unwrap();
        assert_eq!(apply_pdc(&spec, 0.0).b, spec.b);
        let pre = apply_pdc(&spec, 1.7);
        for (x, y) in pre.b.iter().zip(&spec.b) {
            assert!((x.norm() - y.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn pdc_composes_with_channel() {
        // Pre-compensating twice over L (i.e. the whole channel) and then
        // propagating L is the identity.
        let g = LambdaGrid::covering(6.0, 0.05).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        use rand::Rng;
        let b: Vec<_> = (0..g.len())
            .map(|_| Cplx::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)))
            .collect();
        let spec = NfdSpectrum::new(g, b).unwrap();
        let dist = 1.63;
        let twice = apply_pdc(&apply_pdc(&spec, dist), dist);
        let h = channel_response_nfd(&g, dist);
        for i in 0..g.len() {
            assert!((twice.b[i] * h[i] - spec.b[i]).norm() < 1e-12);
        }
    }
}
