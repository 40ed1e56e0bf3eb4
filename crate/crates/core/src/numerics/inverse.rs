//! Inverse iteration on a tridiagonal pencil.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sturm::Pencil;
use crate::error::{Error, Result};

/// Relative re-shift applied when `A − σW` is exactly singular.
const RESHIFT: f64 = 1e-8;
const MAX_RESHIFTS: usize = 3;
const MAX_ITERATIONS: usize = 8;

/// LU factorization with partial pivoting of a general tridiagonal matrix
/// (row interchanges create one extra super-diagonal).
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// Returns `None` when a pivot is exactly zero.
    fn factor(mut dl: Vec<f64>, mut d: Vec<f64>, mut du: Vec<f64>) -> Option<Self> {
        let n = d.len();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return None;
                }
                let l = dl[i] / d[i];
                dl[i] = l;
                d[i + 1] -= l * du[i];
            } else {
                let l = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = l;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - l * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -l;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            return None;
        }
        Some(Self { dl, d, du, du2, swapped })
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

fn factor_shifted(pencil: &Pencil, sigma: f64) -> Option<TridiagonalLu> {
    let d = pencil.diag().iter().zip(pencil.weight()).map(|(a, w)| a - sigma * w).collect();
    TridiagonalLu::factor(pencil.off().to_vec(), d, pencil.off().to_vec())
}

/// `(Σ wᵢxᵢ²·dx)^{1/2}`
pub(crate) fn weighted_norm(x: &[f64], weight: &[f64], dx: f64) -> f64 {
    (x.iter().zip(weight).map(|(v, w)| w * v * v).sum::<f64>() * dx).sqrt()
}

/// Eigenvector for an eigenvalue estimate `sigma`, normalized so that
/// `Σ wᵢxᵢ²·dx = 1` and with its first significant component positive.
pub fn inverse_iteration(pencil: &Pencil, sigma: f64, dx: f64, seed: u64) -> Result<Vec<f64>> {
    let mut shift = sigma;
    let mut lu = factor_shifted(pencil, shift);
    let mut attempts = 0;
    while lu.is_none() {
        if attempts == MAX_RESHIFTS {
            return Err(Error::SingularShift { shift: sigma, attempts });
        }
        attempts += 1;
        shift += RESHIFT * shift.abs().max(1.0);
        lu = factor_shifted(pencil, shift);
    }
    let lu = lu.expect("factorization succeeded");

    let w = pencil.weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..pencil.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = weighted_norm(&x, w, dx);
    x.iter_mut().for_each(|v| *v /= norm);

    for _ in 0..MAX_ITERATIONS {
        let mut y: Vec<f64> = x.iter().zip(w).map(|(v, w)| v * w).collect();
        lu.solve(&mut y);
        let norm = weighted_norm(&y, w, dx);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::SingularShift { shift, attempts });
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let overlap: f64 = x.iter().zip(&y).zip(w).map(|((a, b), w)| a * b * w).sum::<f64>() * dx;
        if overlap < 0.0 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
        let converged = 1.0 - overlap.abs() < 1e-14;
        x = y;
        if converged {
            break;
        }
    }
    fix_sign(&mut x);
    Ok(x)
}

/// Makes the first component above `1e-8·max|x|` positive.
fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * max) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}
