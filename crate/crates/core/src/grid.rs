//! Uniform sampling grids in normalized time and in the nonlinear spectral
//! parameter λ.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Uniform λ grid, symmetric about zero: `λ_i = (i − (len−1)/2)·step`.
///
/// An odd `len` places a sample at λ = 0; an even `len` straddles it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGrid<T> {
    step: T,
    len: usize,
}

impl<T: Real> LambdaGrid<T> {
    pub fn symmetric(step: T, len: usize) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::invalid("lambda_grid", "step must be positive"));
        }
        if len == 0 {
            return Err(Error::invalid("lambda_grid", "needs at least one point"));
        }
        Ok(LambdaGrid { step, len })
    }

    /// Odd-length grid of spacing `step` reaching at least `half_span`.
    pub fn covering(half_span: T, step: T) -> Result<Self> {
        let half = (half_span / step).ceil().to_usize().unwrap_or(0);
        Self::symmetric(step, 2 * half + 1)
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_odd(&self) -> bool {
        self.len % 2 == 1
    }

    /// Offset of index 0 from the center, in steps.
    fn half(&self) -> T {
        from_usize::<T>(self.len - 1) / lit(2.0)
    }

    pub fn lambda(&self, i: usize) -> T {
        (from_usize::<T>(i) - self.half()) * self.step
    }

    pub fn first(&self) -> T {
        self.lambda(0)
    }

    pub fn last(&self) -> T {
        self.lambda(self.len - 1)
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.len).map(|i| self.lambda(i)).collect()
    }

    /// Fractional index of `lambda` (may lie outside `[0, len−1]`).
    pub fn position(&self, lambda: T) -> T {
        lambda / self.step + self.half()
    }

    /// Index of the grid point equal to `lambda` within `tol` steps.
    pub fn index_of(&self, lambda: T, tol: T) -> Option<usize> {
        let pos = self.position(lambda);
        let r = pos.round();
        if (pos - r).abs() <= tol && r >= T::zero() && r <= from_usize(self.len - 1) {
            r.to_usize()
        } else {
            None
        }
    }
}

/// Uniform grid in normalized time, `t_i = t0 + i·dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    pub t0: T,
    pub dt: T,
    pub len: usize,
}

impl<T: Real> TimeGrid<T> {
    /// `len` cell-centered samples of width `dt` symmetric about `center`.
    pub fn centered(center: T, dt: T, len: usize) -> Self {
        let half = from_usize::<T>(len) * dt / lit(2.0);
        TimeGrid {
            t0: center - half + dt / lit(2.0),
            dt,
            len,
        }
    }

    pub fn t(&self, i: usize) -> T {
        self.t0 + from_usize::<T>(i) * self.dt
    }

    /// Window length `len·dt`.
    pub fn span(&self) -> T {
        from_usize::<T>(self.len) * self.dt
    }

    pub fn center(&self) -> T {
        self.t0 + from_usize::<T>(self.len - 1) * self.dt / lit(2.0)
    }
}
