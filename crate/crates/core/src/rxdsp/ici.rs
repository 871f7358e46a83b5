use crate::error::{Error, Result};
use crate::scalar::{from_usize, sinc_norm, Cplx, Real};

/// Inter-carrier interference matrix `G[k][l] = sinc((k − l)·α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IciMatrix<T> {
    pub order: usize,
    pub alpha: T,
    /// Row-major `order × order` entries.
    pub entries: Vec<T>,
}

/// Symmetric Toeplitz sinc matrix of order `n`; the identity at `α = 1`.
pub fn ici_matrix<T: Real>(n: usize, alpha: T) -> IciMatrix<T> {
    let taps: Vec<T> = (0..n).map(|d| sinc_norm(from_usize::<T>(d) * alpha)).collect();
    let mut entries = vec![T::zero(); n * n];
    for k in 0..n {
        for l in 0..n {
            entries[k * n + l] = taps[k.abs_diff(l)];
        }
    }
    IciMatrix {
        order: n,
        alpha,
        entries,
    }
}

impl<T: Real> IciMatrix<T> {
    pub fn get(&self, k: usize, l: usize) -> T {
        self.entries[k * self.order + l]
    }

    /// `G·c`.
    pub fn apply(&self, c: &[Cplx<T>]) -> Vec<Cplx<T>> {
        (0..self.order)
            .map(|k| {
                let row = &self.entries[k * self.order..(k + 1) * self.order];
                row.iter()
                    .zip(c)
                    .fold(Cplx::new(T::zero(), T::zero()), |acc, (&g, &x)| acc + x * g)
            })
            .collect()
    }

    /// Square block `rows/cols lo..hi`.
    pub fn submatrix(&self, lo: usize, hi: usize) -> Vec<T> {
        let m = hi - lo;
        let mut out = Vec::with_capacity(m * m);
        for k in lo..hi {
            out.extend_from_slice(&self.entries[k * self.order + lo..k * self.order + hi]);
        }
        out
    }

    /// Eigenvalues (ascending) by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Vec<T> {
        symmetric_eigenvalues(self.entries.clone(), self.order)
    }

    /// 2-norm condition number `max|μ| / min|μ|`.
    pub fn condition_number(&self) -> T {
        let ev = self.eigenvalues();
        let (lo, hi) = ev.iter().fold((T::infinity(), T::zero()), |(lo, hi), &e| {
            (lo.min(e.abs()), hi.max(e.abs()))
        });
        if lo == T::zero() {
            T::infinity()
        } else {
            hi / lo
        }
    }

    /// Fails with [`Error::IllConditioned`] above `cap`.
    pub fn check_condition(&self, cap: f64) -> Result<f64> {
        let cond = crate::scalar::to_f64(self.condition_number());
        if cond > cap || !cond.is_finite() {
            Err(Error::IllConditioned { cond, cap })
        } else {
            Ok(cond)
        }
    }
}

/// Noise whitening for observations `r = G·c + n` with `Cov(n) ∝ G`.
///
/// With `G = L·Lᵀ`, `L⁻¹·r = Lᵀ·c + w` has white `w`, so Euclidean search
/// against `Lᵀ` is maximum likelihood for the coloured model.
#[derive(Debug, Clone, PartialEq)]
pub struct Whitener<T> {
    pub order: usize,
    /// Row-major lower Cholesky factor.
    pub lower: Vec<T>,
}

impl<T: Real> Whitener<T> {
    pub fn new(g: &IciMatrix<T>) -> Result<Self> {
        let n = g.order;
        let mut l = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = g.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= T::zero() {
                        return Err(Error::IllConditioned {
                            cond: f64::INFINITY,
                            cap: 0.0,
                        });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Whitener { order: n, lower: l })
    }

    /// `Lᵀ`, row-major.
    pub fn upper(&self) -> Vec<T> {
        let n = self.order;
        let mut u = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                u[j * n + i] = self.lower[i * n + j];
            }
        }
        u
    }

    /// `L⁻¹·r` by forward substitution.
    pub fn whiten(&self, r: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.order;
        let mut y: Vec<Cplx<T>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = r[i];
            for (k, yk) in y.iter().enumerate() {
                s = s - yk * self.lower[i * n + k];
            }
            y.push(s / self.lower[i * n + i]);
        }
        y
    }
}

fn symmetric_eigenvalues<T: Real>(mut a: Vec<T>, n: usize) -> Vec<T> {
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag = diag + a[i * n + i] * a[i * n + i];
            for j in 0..n {
                if i != j {
                    off = off + a[i * n + j] * a[i * n + j];
                }
            }
        }
        if off <= eps * eps * diag {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let two = T::one() + T::one();
                let theta = (a[q * n + q] - a[p * n + p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}
