//! Exact spectra of the exponential-mass system.
//!
//! Two independent routes start from the same constant-mass equation
//!
//! ```text
//! −ħ²/(2m0)·φ'' + (V0·e^{2cx} − E·e^{cx})·φ = ε·φ,   ε = (ħ²/m0)(q − c²/8)
//! ```
//!
//! - Morse: the equation is a Morse problem whose depth is the energy `E`
//!   itself. The Morse quantization condition is solved for `E`.
//! - Oscillator: `y = e^{cx/2}` maps it onto a radial oscillator with a
//!   centripetal barrier whose angular momentum is fixed by `ε`; the
//!   oscillator levels are mapped back to `E`.
//!
//! Both give `E_n = κ(2n + 1 + ν)` with `κ = ħ|c|√(V0/(2m0))`.

use serde::Serialize;

use crate::ambiguity::nu_value;
use crate::error::{Error, Result};
use crate::massmodel::{Grid, GridFunction};
use crate::params::{OrderingParams, SystemConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Morse,
    Oscillator,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub n: usize,
    pub energy: f64,
    /// Value of the Morse normalizability bracket `λ(E) − n − ½` on the
    /// accepted branch (`ν/2`). Zero marks a marginal Morse state.
    pub bracket: f64,
}

impl Level {
    pub fn is_marginal(&self) -> bool {
        self.bracket == 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub levels: Vec<Level>,
    pub nu: f64,
    pub kappa: f64,
    pub route: Route,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

/// Coefficients of the constant-mass Morse-form equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MorseReduction {
    /// `ε = (ħ²/m0)(q − c²/8) = −ħ²c²ν²/(8m0)`
    pub epsilon: f64,
    /// Coefficient of `e^{2cx}` (`V0`).
    pub morse_quadratic_strength: f64,
    /// Exponent rate of the `E·e^{cx}` term (`c`).
    pub weight_exponent: f64,
}

pub fn morse_reduction(system: &SystemConfig, ordering: &OrderingParams) -> Result<MorseReduction> {
    let report = nu_value(ordering);
    if !report.is_real() {
        return Err(Error::ComplexOrdering { nu_squared: report.nu_squared });
    }
    let (hbar, m0, c) = (system.hbar(), system.m0(), system.c());
    let q = c * c * report.q_over_c2;
    Ok(MorseReduction {
        epsilon: hbar * hbar / m0 * (q - c * c / 8.0),
        morse_quadratic_strength: system.v0(),
        weight_exponent: c,
    })
}

/// Levels `n = 0..=n_max` from the Morse quantization condition.
///
/// For `A·e^{2cx} − B·e^{cx}` the Morse levels are
/// `ε_n = −(ħ²c²/2m0)·(λ − n − ½)²` with `λ = B/(2√A)·√(2m0)/(ħ|c|)`.
/// Here `B = E`, so `(λ(E) − n − ½)² = −2m0ε/(ħ²c²)`; the root with a
/// non-negative bracket is kept.
pub fn morse_spectrum(system: &SystemConfig, ordering: &OrderingParams, n_max: usize) -> Result<Spectrum> {
    let reduction = morse_reduction(system, ordering)?;
    system.require_bound_states()?;
    let (hbar, m0) = (system.hbar(), system.m0());
    let c = reduction.weight_exponent.abs();
    let a = reduction.morse_quadratic_strength;

    // λ(E) = E·scale
    let scale = (2.0 * m0).sqrt() / (2.0 * a.sqrt() * hbar * c);
    let bracket_sq = (-2.0 * m0 * reduction.epsilon / (hbar * hbar * c * c)).max(0.0);
    let bracket = bracket_sq.sqrt();

    let levels = (0..=n_max)
        .map(|n| Level {
            n,
            energy: (n as f64 + 0.5 + bracket) / scale,
            bracket,
        })
        .collect();
    Ok(Spectrum { levels, nu: 2.0 * bracket, kappa: system.kappa(), route: Route::Morse })
}

/// Radial oscillator `−ħ²/(2m0)F'' + [ħ²l(l+1)/(2m0y²) + ½m0ω²y²]F = Ẽ·F`
/// obtained from `y = e^{cx/2}`, with `Ẽ = 4E/c²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscillatorMap {
    pub omega: f64,
    pub l_effective: f64,
    pub energy_rescale: f64,
}

pub fn oscillator_map(system: &SystemConfig, ordering: &OrderingParams) -> Result<OscillatorMap> {
    let reduction = morse_reduction(system, ordering)?;
    system.require_bound_states()?;
    let (hbar, m0, c) = (system.hbar(), system.m0(), system.c());
    let c2 = c * c;
    // ½m0ω² = 4V0/c²
    let omega = (8.0 * system.v0() / (m0 * c2)).sqrt();
    // ħ²l(l+1)/(2m0) = −(ħ²c² + 32m0ε)/(8m0c²)
    let centripetal = -(hbar * hbar * c2 + 32.0 * m0 * reduction.epsilon) / (4.0 * hbar * hbar * c2);
    // regular root of l² + l − centripetal = 0
    let l_effective = -0.5 + (0.25 + centripetal).max(0.0).sqrt();
    Ok(OscillatorMap { omega, l_effective, energy_rescale: 4.0 / c2 })
}

/// Levels from the oscillator mapping: `Ẽ_n = ħω(2n + l + 3/2)`, `E_n = Ẽ_n/rescale`.
pub fn oscillator_spectrum(system: &SystemConfig, ordering: &OrderingParams, n_max: usize) -> Result<Spectrum> {
    let map = oscillator_map(system, ordering)?;
    let hbar = system.hbar();
    let levels = (0..=n_max)
        .map(|n| Level {
            n,
            energy: hbar * map.omega * (2.0 * n as f64 + map.l_effective + 1.5) / map.energy_rescale,
            bracket: (map.l_effective + 0.5) / 2.0,
        })
        .collect();
    Ok(Spectrum { levels, nu: map.l_effective + 0.5, kappa: system.kappa(), route: Route::Oscillator })
}

/// Position of the ground-state maximum: `e^{cx*} = ħ|c|/(2√(2m0V0))`.
pub fn ground_state_peak(system: &SystemConfig) -> f64 {
    let (hbar, m0, c, v0) = (system.hbar(), system.m0(), system.c(), system.v0());
    (hbar * c.abs() / (2.0 * (2.0 * m0 * v0).sqrt())).ln() / c
}

/// Exponent of the unnormalized ground state
/// `ψ₀ = exp[(c/2)x − √(2m0V0)/(ħ|c|)·e^{cx}]`.
pub fn ground_state_exponent(system: &SystemConfig, x: f64) -> f64 {
    let (hbar, m0, c, v0) = (system.hbar(), system.m0(), system.c(), system.v0());
    0.5 * c * x - (2.0 * m0 * v0).sqrt() / (hbar * c.abs()) * (c * x).exp()
}

/// Largest `|ψ₀|` allowed at either grid end, relative to the peak.
pub const GROUND_STATE_EDGE_LIMIT: f64 = 1e-6;

/// Original-space ground state of the `ν = 0` family on `grid`, normalized
/// to unit discrete `∫|ψ|²dx`.
pub fn ground_state_closed_form(system: &SystemConfig, grid: &Grid) -> Result<GridFunction> {
    system.require_bound_states()?;
    let exponents: Vec<f64> = grid.points().map(|x| ground_state_exponent(system, x)).collect();
    let peak = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let values: Vec<f64> = exponents.iter().map(|e| (e - peak).exp()).collect();
    let edge = values[0].max(values[values.len() - 1]);
    if edge > GROUND_STATE_EDGE_LIMIT {
        return Err(Error::DomainTooSmall { ratio: edge });
    }
    Ok(GridFunction::new(*grid, values)?.normalized())
}
