//! Banded sphere decoding with decision-feedback iterations.
//!
//! Subcarrier `k` is decided by an exact search over the window
//! `[k − w, k + w]` of `G`; interference from outside the window is
//! subtracted using the previous pass's decisions (the first pass starts
//! from successive interference cancellation on the full matrix).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::txdsp::Constellation;

use super::sphere::{decode_complex, Detection, SphereConfig, SphereDecoder};
use super::IciMatrix;

/// Iterative detector settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeConfig {
    pub n_iter: usize,
    /// Half-width `w` of the decoding window in taps.
    pub band_width: usize,
    pub sphere: SphereConfig,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        IterativeConfig {
            n_iter: 8,
            band_width: 6,
            sphere: SphereConfig::default(),
        }
    }
}

/// Result of [`iterative_detect`].
#[derive(Debug, Clone, PartialEq)]
pub struct IterativeDetection {
    pub indices: Vec<usize>,
    pub iterations: usize,
    pub timed_out: bool,
}

/// Decoders for every window size of one Toeplitz `G`, built on demand.
pub struct WindowedDetector<T: Real> {
    g: IciMatrix<T>,
    constellation: Constellation<T>,
    cfg: IterativeConfig,
    cache: HashMap<usize, SphereDecoder<T>>,
}

impl<T: Real> WindowedDetector<T> {
    pub fn new(g: &IciMatrix<T>, constellation: &Constellation<T>, cfg: &IterativeConfig) -> Result<Self> {
        if cfg.n_iter == 0 {
            return Err(Error::invalid("n_iter", "must be at least 1"));
        }
        g.check_condition(cfg.sphere.cond_cap)?;
        Ok(WindowedDetector {
            g: g.clone(),
            constellation: constellation.clone(),
            cfg: *cfg,
            cache: HashMap::new(),
        })
    }

    fn decoder(&mut self, size: usize) -> &SphereDecoder<T> {
        let g = &self.g;
        let levels = self.constellation.levels();
        let sphere = self.cfg.sphere;
        self.cache.entry(size).or_insert_with(|| {
            SphereDecoder::new(&g.submatrix(0, size), size, levels, sphere)
        })
    }

    fn full(&mut self, r: &[Cplx<T>], noise_var: T) -> Result<Detection> {
        let n = self.g.order;
        let cfg = self.cfg.sphere;
        let constellation = self.constellation.clone();
        let dec = self.decoder(n);
        decode_complex(dec, r, &constellation, noise_var, &cfg)
    }

    /// Successive interference cancellation on the full matrix.
    fn initial(&mut self, r: &[Cplx<T>]) -> Vec<usize> {
        let n = self.g.order;
        let constellation = self.constellation.clone();
        let dec = self.decoder(n);
        let re: Vec<T> = r.iter().map(|z| z.re).collect();
        let im: Vec<T> = r.iter().map(|z| z.im).collect();
        dec.babai_point(&re)
            .into_iter()
            .zip(dec.babai_point(&im))
            .map(|(i, q)| constellation.compose(i, q))
            .collect()
    }

    pub fn detect(&mut self, r: &[Cplx<T>], noise_var: T) -> Result<IterativeDetection> {
        let n = self.g.order;
        if r.len() != n {
            return Err(Error::LengthMismatch {
                what: "observation vs ICI order",
                left: r.len(),
                right: n,
            });
        }
        let w = self.cfg.band_width;
        if w + 1 >= n {
            let d = self.full(r, noise_var)?;
            return Ok(IterativeDetection {
                indices: d.indices,
                iterations: 1,
                timed_out: d.timed_out,
            });
        }
        let mut decisions = self.initial(r);
        let mut timed_out = false;
        let mut iterations = 0;
        let sphere = self.cfg.sphere;
        let constellation = self.constellation.clone();
        for _ in 0..self.cfg.n_iter {
            iterations += 1;
            let points: Vec<Cplx<T>> = decisions.iter().map(|&i| constellation.point(i)).collect();
            let mut next = decisions.clone();
            for k in 0..n {
                let lo = k.saturating_sub(w);
                let hi = (k + w + 1).min(n);
                let sub: Vec<Cplx<T>> = (lo..hi)
                    .map(|row| {
                        let mut z = r[row];
                        for (col, p) in points.iter().enumerate() {
                            if col < lo || col >= hi {
                                z = z - p * self.g.get(row, col);
                            }
                        }
                        z
                    })
                    .collect();
                let dec = self.decoder(hi - lo);
                let d = decode_complex(dec, &sub, &constellation, noise_var, &sphere)?;
                timed_out |= d.timed_out;
                next[k] = d.indices[k - lo];
            }
            let fixed = next == decisions;
            decisions = next;
            if fixed {
                break;
            }
        }
        Ok(IterativeDetection {
            indices: decisions,
            iterations,
            timed_out,
        })
    }
}

/// One-shot banded iterative detection.
pub fn iterative_detect<T: Real>(
    r: &[Cplx<T>],
    g: &IciMatrix<T>,
    constellation: &Constellation<T>,
    noise_var: T,
    cfg: &IterativeConfig,
) -> Result<IterativeDetection> {
    WindowedDetector::new(g, constellation, cfg)?.detect(r, noise_var)
}
