//! Supersymmetric factorization for the exponential-mass system.
//!
//! With `g(x) = ħ/√(2m(x))` the operators
//!
//! ```text
//! A ψ  =  g ψ' + W ψ
//! A†ψ  = −(g ψ)' + W ψ
//! ```
//!
//! give `A†A = −(g² ψ')' + V₁ ψ` and `AA† = −(g² ψ')' + V₂ ψ` with
//! `V₁ = W² − (gW)'` and `V₂ = W² + gW' − g'W − gg''`. Both kinetic terms
//! are the BenDaniel–Duke operator. The two-exponential superpotential
//! `W = w₊e^{cx/2} + w₋e^{−cx/2}` makes `A†A + E0` the `ν = 0` Hamiltonian
//! and `AA†` the BenDaniel–Duke Hamiltonian with the bare potential.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::massmodel::{GridFunction, MIN_GRID_POINTS};
use crate::params::SystemConfig;

/// `g = ħ/√(2m)` for `m = m0·e^{cx}`: `g' = −(c/2)g`, `g'' = (c²/4)g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticWeight {
    prefactor: f64,
    c: f64,
}

impl KineticWeight {
    pub fn new(system: &SystemConfig) -> Self {
        Self { prefactor: system.hbar() / (2.0 * system.m0()).sqrt(), c: system.c() }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.prefactor * (-0.5 * self.c * x).exp()
    }

    pub fn d1(&self, x: f64) -> f64 {
        -0.5 * self.c * self.value(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        0.25 * self.c * self.c * self.value(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Superpotential {
    /// Coefficient of `e^{cx/2}`.
    pub w_plus: f64,
    /// Coefficient of `e^{−cx/2}`.
    pub w_minus: f64,
    /// Factorization energy.
    #[serde(rename = "E0")]
    pub e0: f64,
}

/// Solves `W² − (gW)' = V + U_{ν=0} − E0` for the two-exponential `W`.
///
/// Matching the `e^{cx}`, constant and `e^{−cx}` terms gives
/// `w₊² = V0`, `2w₊w₋ = −E0` and
/// `w₋² + (cħ/√(2m0))·w₋ + ħ²c²/(8m0) = 0`, whose discriminant vanishes.
/// The sign of `w₊` follows `c` so that `E0 > 0` and `ψ₀ ∝ exp(−∫W/g)` is
/// normalizable; for `c > 0` this is `w₊ = √V0`, `w₋ = −ħc/(2√(2m0))`.
pub fn solve_superpotential(system: &SystemConfig) -> Result<Superpotential> {
    system.require_bound_states()?;
    let (hbar, m0, c) = (system.hbar(), system.m0(), system.c());
    let w_plus = c.signum() * system.v0().sqrt();
    // b² − 4·ħ²c²/(8m0) = 0 identically: take the double root directly
    // rather than amplifying the rounding of the discriminant through √.
    let b = c * hbar / (2.0 * m0).sqrt();
    let w_minus = -0.5 * b;
    Ok(Superpotential { w_plus, w_minus, e0: -2.0 * w_plus * w_minus })
}

impl Superpotential {
    /// `W(x) = w₊e^{cx/2} + w₋e^{−cx/2}`.
    pub fn value(&self, system: &SystemConfig, x: f64) -> f64 {
        let t = (0.5 * system.c() * x).exp();
        self.w_plus * t + self.w_minus / t
    }

    pub fn d1(&self, system: &SystemConfig, x: f64) -> f64 {
        let t = (0.5 * system.c() * x).exp();
        0.5 * system.c() * (self.w_plus * t - self.w_minus / t)
    }

    /// The single zero of `W`: `e^{cx} = −w₋/w₊`.
    pub fn node(&self, system: &SystemConfig) -> f64 {
        (-self.w_minus / self.w_plus).ln() / system.c()
    }
}

pub fn superpotential_value(sp: &Superpotential, system: &SystemConfig, x: f64) -> f64 {
    sp.value(system, x)
}

/// `U_{ν=0}(x) = −(ħ²c²/(8m0))·e^{−cx}`, the ambiguity potential shared by
/// every `ν = 0` ordering on the exponential profile.
pub fn nu0_ambiguity_potential(system: &SystemConfig, x: f64) -> f64 {
    let (hbar, m0, c) = (system.hbar(), system.m0(), system.c());
    -hbar * hbar * c * c / (8.0 * m0) * (-c * x).exp()
}

/// `V₁ = W² − (gW)'`.
pub fn partner_potential_1(sp: &Superpotential, system: &SystemConfig, x: f64) -> f64 {
    let g = KineticWeight::new(system);
    let w = sp.value(system, x);
    w * w - (g.d1(x) * w + g.value(x) * sp.d1(system, x))
}

/// `V₂ = W² + gW' − g'W − gg''`.
pub fn partner_potential_2(sp: &Superpotential, system: &SystemConfig, x: f64) -> f64 {
    let g = KineticWeight::new(system);
    let w = sp.value(system, x);
    let gv = g.value(x);
    w * w + gv * sp.d1(system, x) - g.d1(x) * w - gv * g.d2(x)
}

/// First derivative with central differences inside and second-order
/// one-sided differences at the two ends.
fn derivative(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dx);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * dx);
    }
    out
}

fn check_grid(f: &GridFunction) -> Result<()> {
    let n = f.grid.n();
    if n < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse { n, min: MIN_GRID_POINTS });
    }
    Ok(())
}

/// `A f = g f' + W f` on the grid.
pub fn apply_a(f: &GridFunction, sp: &Superpotential, system: &SystemConfig) -> Result<GridFunction> {
    check_grid(f)?;
    let grid = f.grid;
    let g = KineticWeight::new(system);
    let df = derivative(f.values(), grid.spacing());
    let values = grid
        .points()
        .zip(f.values().iter().zip(&df))
        .map(|(x, (v, dv))| g.value(x) * dv + sp.value(system, x) * v)
        .collect();
    Ok(GridFunction::from_parts(grid, values))
}

/// `A† f = −(g f)' + W f` on the grid.
pub fn apply_adag(f: &GridFunction, sp: &Superpotential, system: &SystemConfig) -> Result<GridFunction> {
    check_grid(f)?;
    let grid = f.grid;
    let g = KineticWeight::new(system);
    let product: Vec<f64> = grid.points().zip(f.values()).map(|(x, v)| g.value(x) * v).collect();
    let dp = derivative(&product, grid.spacing());
    let values = grid
        .points()
        .zip(f.values().iter().zip(&dp))
        .map(|(x, (v, dp))| -dp + sp.value(system, x) * v)
        .collect();
    Ok(GridFunction::from_parts(grid, values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Partner {
    /// `H₁ = A†A`
    First,
    /// `H₂ = AA†`
    Second,
}

/// `H f = −(g² f')' + V_partner f` with the conservative three-point stencil
/// and zero values outside the grid.
pub fn apply_partner_hamiltonian(
    partner: Partner,
    f: &GridFunction,
    sp: &Superpotential,
    system: &SystemConfig,
) -> Result<GridFunction> {
    check_grid(f)?;
    let grid = f.grid;
    let dx = grid.spacing();
    let g = KineticWeight::new(system);
    let g2 = |x: f64| {
        let v = g.value(x);
        v * v
    };
    let v = f.values();
    let n = v.len();
    let values = (0..n)
        .map(|i| {
            let x = grid.x(i);
            let left = if i > 0 { v[i - 1] } else { 0.0 };
            let right = if i + 1 < n { v[i + 1] } else { 0.0 };
            let flux_r = g2(x + 0.5 * dx) * (right - v[i]);
            let flux_l = g2(x - 0.5 * dx) * (v[i] - left);
            let potential = match partner {
                Partner::First => partner_potential_1(sp, system, x),
                Partner::Second => partner_potential_2(sp, system, x),
            };
            -(flux_r - flux_l) / (dx * dx) + potential * v[i]
        })
        .collect();
    Ok(GridFunction::from_parts(grid, values))
}
