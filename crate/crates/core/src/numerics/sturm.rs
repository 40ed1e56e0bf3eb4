//! Symmetric-definite tridiagonal pencils and Sturm-sequence bisection.

use crate::error::{Error, Result};
use crate::parallel::Execution;

/// The pencil `(A, W)` with `A` symmetric tridiagonal and `W` a positive
/// diagonal weight. Eigenvalues solve `A x = λ W x`; they coincide with the
/// eigenvalues of `W^{-1/2} A W^{-1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    diag: Vec<f64>,
    off: Vec<f64>,
    weight: Vec<f64>,
}

impl Pencil {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, weight: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off.len() + 1 != n || weight.len() != n {
            return Err(Error::InvalidGrid(format!(
                "pencil sizes diag={n} off={} weight={}",
                off.len(),
                weight.len()
            )));
        }
        if weight.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidGrid("pencil weight must be positive".into()));
        }
        Ok(Self { diag, off, weight })
    }

    /// Standard eigenproblem (unit weight).
    pub fn standard(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        Self::new(diag, off, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    fn pivot_floor(&self) -> f64 {
        let max_off2 = self.off.iter().fold(1.0f64, |acc, b| acc.max(b * b));
        f64::MIN_POSITIVE * max_off2
    }

    /// Number of eigenvalues strictly below `sigma`: the count of negative
    /// pivots in the `LDLᵀ` factorization of `A − σW`.
    pub fn sturm_count(&self, sigma: f64) -> usize {
        let floor = self.pivot_floor();
        let guard = |d: f64| if d.abs() <= floor { -floor } else { d };
        let mut d = guard(self.diag[0] - sigma * self.weight[0]);
        let mut count = usize::from(d <= 0.0);
        for i in 1..self.diag.len() {
            let b = self.off[i - 1];
            d = guard(self.diag[i] - sigma * self.weight[i] - b * b / d);
            count += usize::from(d <= 0.0);
        }
        count
    }

    /// Gershgorin interval of `W^{-1/2} A W^{-1/2}`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let w = self.weight[i];
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs() / (w * self.weight[i - 1]).sqrt();
            }
            if i + 1 < n {
                radius += self.off[i].abs() / (w * self.weight[i + 1]).sqrt();
            }
            let center = self.diag[i] / w;
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        let pad = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        (lo - pad, hi + pad)
    }

    /// `A x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// `xᵀAx / xᵀWx`
    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        let num: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().zip(&self.weight).map(|(a, w)| w * a * a).sum();
        num / den
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectionOptions {
    /// Relative tolerance, applied as `rel_tol·max(1, |E|)`.
    pub rel_tol: f64,
    /// Absolute floor on the tolerance.
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_iter: 400 }
    }
}

impl BisectionOptions {
    pub fn tolerance_at(&self, e: f64) -> f64 {
        (self.rel_tol * e.abs().max(1.0)).max(self.abs_tol)
    }
}

/// Bisects for eigenvalue number `index` (0-based, ascending).
pub fn bisect_eigenvalue(pencil: &Pencil, index: usize, opts: &BisectionOptions) -> Result<f64> {
    let (mut lo, mut hi) = pencil.gershgorin();
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= opts.tolerance_at(mid) {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            // interval is down to adjacent floats
            return Ok(mid);
        }
        if pencil.sturm_count(mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::ToleranceNotReached { index, width: hi - lo })
}

/// The `k` smallest eigenvalues, ascending. Each index is an independent
/// bisection, so the result does not depend on `exec`.
pub fn eigenvalues(pencil: &Pencil, k: usize, opts: &BisectionOptions, exec: Execution) -> Result<Vec<f64>> {
    if k > pencil.len() {
        return Err(Error::TooManyLevels { requested: k, size: pencil.len() });
    }
    exec.map_indices(k, |i| bisect_eigenvalue(pencil, i, opts)).into_iter().collect()
}
