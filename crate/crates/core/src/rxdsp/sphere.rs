//! Exact ML detection for `r = G·c + n` with real `G` and square QAM `c`.
//!
//! A real `G` couples in-phase and quadrature components only with
//! themselves, so the complex problem splits into two independent PAM
//! lattice searches that share one QR factorization. Each search is a
//! Schnorr–Euchner depth-first enumeration started from the Babai point.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Cplx, Real};
use crate::txdsp::Constellation;

use super::IciMatrix;

/// Sphere-decoder limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereConfig {
    /// Enumerated nodes per real search before falling back to the best
    /// point found.
    pub node_budget: u64,
    /// Return [`Error::Timeout`] instead of a flagged fallback.
    pub fail_on_timeout: bool,
    /// Largest accepted condition number of `G`.
    pub cond_cap: f64,
}

impl Default for SphereConfig {
    fn default() -> Self {
        SphereConfig {
            node_budget: 2_000_000,
            fail_on_timeout: false,
            cond_cap: 1e8,
        }
    }
}

/// Detected symbols with search statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Constellation indices per subcarrier.
    pub indices: Vec<usize>,
    /// `‖r − G·ĉ‖²`.
    pub metric: f64,
    pub nodes: u64,
    /// Node budget ran out; `indices` is the best point found.
    pub timed_out: bool,
}

/// Real lattice searcher for one square matrix.
#[derive(Debug, Clone)]
pub struct SphereDecoder<T> {
    n: usize,
    /// Upper-triangular factor, row-major.
    r: Vec<T>,
    /// Transposed orthogonal factor, row-major.
    qt: Vec<T>,
    levels: Vec<T>,
    cfg: SphereConfig,
}

struct Search<'a, T> {
    dec: &'a SphereDecoder<T>,
    y: &'a [T],
    x: Vec<usize>,
    best: Option<Vec<usize>>,
    best_metric: T,
    nodes: u64,
    aborted: bool,
}

impl<T: Real> SphereDecoder<T> {
    /// Factorizes the row-major `n × n` matrix `g`.
    pub fn new(g: &[T], n: usize, levels: &[T], cfg: SphereConfig) -> Self {
        let (qt, r) = householder_qr(g, n);
        SphereDecoder {
            n,
            r,
            qt,
            levels: levels.to_vec(),
            cfg,
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn rr(&self, i: usize, j: usize) -> T {
        self.r[i * self.n + j]
    }

    /// `‖y − R·x‖²` with `y = Qᵀ·r`.
    fn rotate(&self, r: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                self.qt[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(r)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn center(&self, y: &[T], x: &[usize], k: usize) -> T {
        let mut s = y[k];
        for j in k + 1..self.n {
            s = s - self.rr(k, j) * self.levels[x[j]];
        }
        s / self.rr(k, k)
    }

    fn nearest(&self, z: T) -> usize {
        let mut best = 0;
        for i in 1..self.levels.len() {
            if (z - self.levels[i]).abs() < (z - self.levels[best]).abs() {
                best = i;
            }
        }
        best
    }

    fn metric(&self, y: &[T], x: &[usize]) -> T {
        (0..self.n)
            .map(|i| {
                let mut s = y[i];
                for j in i..self.n {
                    s = s - self.rr(i, j) * self.levels[x[j]];
                }
                s * s
            })
            .sum()
    }

    /// Successive interference cancellation from the last row up.
    fn babai(&self, y: &[T]) -> Vec<usize> {
        let mut x = vec![0; self.n];
        for k in (0..self.n).rev() {
            x[k] = self.nearest(self.center(y, &x, k));
        }
        x
    }

    /// Successive-cancellation estimate for the real observation `r`.
    pub(crate) fn babai_point(&self, r: &[T]) -> Vec<usize> {
        self.babai(&self.rotate(r))
    }

    /// ML level indices for the real observation `r`. `radius_sq` is an
    /// optional first search radius; the Babai radius is the fallback.
    pub fn decode(&self, r: &[T], radius_sq: Option<T>) -> (Vec<usize>, T, u64, bool) {
        let y = self.rotate(r);
        let babai = self.babai(&y);
        let babai_metric = self.metric(&y, &babai);
        let mut total_nodes = 0;
        if let Some(r0) = radius_sq.filter(|&r0| r0 < babai_metric) {
            let s = self.search(&y, r0, None);
            total_nodes += s.nodes;
            if s.aborted {
                return (babai, babai_metric, total_nodes, true);
            }
            if let Some(x) = s.best {
                return (x, s.best_metric, total_nodes, false);
            }
        }
        let s = self.search(&y, babai_metric, Some(babai));
        total_nodes += s.nodes;
        let x = s.best.expect("Babai point lies inside its own radius");
        (x, s.best_metric, total_nodes, s.aborted)
    }

    fn search<'a>(&'a self, y: &'a [T], radius_sq: T, seed: Option<Vec<usize>>) -> Search<'a, T> {
        let mut s = Search {
            dec: self,
            y,
            x: vec![0; self.n],
            best: seed,
            best_metric: radius_sq,
            nodes: 0,
            aborted: false,
        };
        if self.n > 0 {
            s.visit(self.n - 1, T::zero());
        }
        s
    }
}

impl<T: Real> Search<'_, T> {
    fn visit(&mut self, k: usize, partial: T) {
        let dec = self.dec;
        let z = dec.center(self.y, &self.x, k);
        let rkk = dec.rr(k, k);
        let mut order: Vec<(T, usize)> = dec
            .levels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let d = rkk * (z - l);
                (d * d, i)
            })
            .collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for (d2, i) in order {
            if self.aborted {
                return;
            }
            self.nodes += 1;
            if self.nodes > dec.cfg.node_budget {
                self.aborted = true;
                return;
            }
            let m = partial + d2;
            if m > self.best_metric {
                break;
            }
            self.x[k] = i;
            if k == 0 {
                let better = m < self.best_metric
                    || self.best.as_ref().is_none_or(|b| self.x < *b);
                if better {
                    self.best_metric = m;
                    self.best = Some(self.x.clone());
                }
            } else {
                self.visit(k - 1, m);
            }
        }
    }
}

/// `G = Q·R` by Householder reflections; returns `(Qᵀ, R)` row-major.
fn householder_qr<T: Real>(g: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut r = g.to_vec();
    let mut qt = vec![T::zero(); n * n];
    for i in 0..n {
        qt[i * n + i] = T::one();
    }
    for k in 0..n {
        let norm: T = (k..n).map(|i| r[i * n + k] * r[i * n + k]).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r[k * n + k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..n).map(|i| r[i * n + k]).collect();
        v[0] = v[0] - alpha;
        let vv: T = v.iter().map(|&x| x * x).sum();
        if vv == T::zero() {
            continue;
        }
        let two: T = lit(2.0);
        for m in [&mut r, &mut qt] {
            for col in 0..n {
                let dot: T = (k..n).map(|i| v[i - k] * m[i * n + col]).sum();
                let f = two * dot / vv;
                for i in k..n {
                    m[i * n + col] = m[i * n + col] - f * v[i - k];
                }
            }
        }
    }
    (qt, r)
}

/// Exact ML detection of `r` under `G` over `constellation`.
///
/// `noise_var` is the per-symbol complex noise variance `E|n|²`; it sets a
/// first search radius a few standard deviations above the expected noise
/// energy (zero disables it).
pub fn sphere_decode<T: Real>(
    r: &[Cplx<T>],
    g: &IciMatrix<T>,
    constellation: &Constellation<T>,
    noise_var: T,
    cfg: &SphereConfig,
) -> Result<Detection> {
    if r.len() != g.order {
        return Err(Error::LengthMismatch {
            what: "observation vs ICI order",
            left: r.len(),
            right: g.order,
        });
    }
    g.check_condition(cfg.cond_cap)?;
    let dec = SphereDecoder::new(&g.entries, g.order, constellation.levels(), *cfg);
    decode_complex(&dec, r, constellation, noise_var, cfg)
}

/// First search radius for `n` real dimensions with per-axis variance
/// `noise_var/2`.
pub(crate) fn noise_radius<T: Real>(n: usize, noise_var: T) -> Option<T> {
    if noise_var > T::zero() {
        let nn: T = from_usize(n);
        let half: T = lit(0.5);
        Some(half * noise_var * (nn + lit::<T>(4.0) * (lit::<T>(2.0) * nn).sqrt()))
    } else {
        None
    }
}

/// Decodes a complex observation as independent I and Q searches on a
/// prepared decoder.
pub fn decode_complex<T: Real>(
    dec: &SphereDecoder<T>,
    r: &[Cplx<T>],
    constellation: &Constellation<T>,
    noise_var: T,
    cfg: &SphereConfig,
) -> Result<Detection> {
    let radius = noise_radius(dec.order(), noise_var);
    let re: Vec<T> = r.iter().map(|z| z.re).collect();
    let im: Vec<T> = r.iter().map(|z| z.im).collect();
    let (xi, mi, ni, ti) = dec.decode(&re, radius);
    let (xq, mq, nq, tq) = dec.decode(&im, radius);
    let timed_out = ti || tq;
    if timed_out && cfg.fail_on_timeout {
        return Err(Error::Timeout {
            budget: cfg.node_budget,
        });
    }
    Ok(Detection {
        indices: xi
            .iter()
            .zip(&xq)
            .map(|(&i, &q)| constellation.compose(i, q))
            .collect(),
        metric: crate::scalar::to_f64(mi + mq),
        nodes: ni + nq,
        timed_out,
    })
}
