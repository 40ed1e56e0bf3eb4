//! Ordering-ambiguity potential, the effective potential of the `ψ = √m·φ`
//! equation, and the `ν` classification of orderings.

use serde::Serialize;

use crate::massmodel::{ExponentialProfile, MassTriple};
use crate::params::{exact_is_negative, exact_is_zero, format_exact, to_f64, Exact, OrderingParams, SystemConfig};

/// Float `ν²` values closer to zero than this are treated as exactly zero.
pub const NU_SQUARED_SNAP: f64 = 1e-12;

/// The two bracket coefficients of the ambiguity potential,
/// `(α + γ − a)` multiplying `m·m''` and `(a − αγ − α − γ)` multiplying `m'²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbiguityCoefficients {
    pub curvature: f64,
    pub gradient: f64,
}

impl AmbiguityCoefficients {
    pub fn of(o: &OrderingParams) -> Self {
        let (a, al, g) = (o.a(), o.alpha(), o.gamma());
        Self { curvature: al + g - a, gradient: a - al * g - al - g }
    }

    /// Both coefficients vanish: the ordering adds no potential for any mass.
    pub fn is_ambiguity_free(&self) -> bool {
        self.curvature == 0.0 && self.gradient == 0.0
    }
}

/// `U_{αγa} = −ħ²/(4m³(a+1))·[(α+γ−a)·m·m'' + 2(a−αγ−α−γ)·m'²]`.
///
/// Evaluated through `m'/m` and `m''/m` so that it stays finite for masses
/// far from unity.
pub fn ambiguity_potential(ordering: &OrderingParams, hbar: f64, mass: MassTriple) -> f64 {
    -hbar * hbar * bracket_over_m2(ordering, mass) / (4.0 * mass.m * (ordering.a() + 1.0))
}

/// `(α+γ−a)·m''/m + 2(a−αγ−α−γ)·(m'/m)²`
fn bracket_over_m2(ordering: &OrderingParams, mass: MassTriple) -> f64 {
    let k = AmbiguityCoefficients::of(ordering);
    let s = mass.log_slope();
    k.curvature * mass.curvature_ratio() + 2.0 * k.gradient * s * s
}

/// Extra potential generated by `ψ = √m·φ`: `(ħ²/4m)·[(3/2)(m'/m)² − m''/m]`.
pub fn kinetic_correction(hbar: f64, mass: MassTriple) -> f64 {
    hbar * hbar * kinetic_bracket(mass) / (4.0 * mass.m)
}

fn kinetic_bracket(mass: MassTriple) -> f64 {
    let s = mass.log_slope();
    1.5 * s * s - mass.curvature_ratio()
}

/// `U_eff = V + U_{αγa} + (ħ²/4m)·[(3/2)(m'/m)² − m''/m]`.
pub fn effective_potential(ordering: &OrderingParams, profile: &ExponentialProfile, x: f64) -> f64 {
    let hbar = profile.system.hbar();
    let mass = profile.mass_triple(x);
    profile.bare_potential(x) + ambiguity_potential(ordering, hbar, mass) + kinetic_correction(hbar, mass)
}

/// `m(x)·U_eff(x)`, the potential row of the mass-weighted eigenproblem.
///
/// The ordering terms are `O(ħ²c²)` here regardless of `x`; computing them
/// without the `1/m` factor avoids cancelling two huge numbers where the
/// mass is tiny.
pub fn weighted_effective_potential(ordering: &OrderingParams, profile: &ExponentialProfile, x: f64) -> f64 {
    let hbar = profile.system.hbar();
    let mass = profile.mass_triple(x);
    let ordering_terms = -bracket_over_m2(ordering, mass) / (4.0 * (ordering.a() + 1.0)) + kinetic_bracket(mass) / 4.0;
    mass.m * profile.bare_potential(x) + hbar * hbar * ordering_terms
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbiguityReport {
    /// `q/c² = (a − 2αγ − α − γ)/(4(a+1))`
    pub q_over_c2: f64,
    pub q_over_c2_exact: Option<Exact>,
    /// `ν² = 1 − 2(a − 2αγ − α − γ)/(a+1)`
    pub nu_squared: f64,
    pub nu_squared_exact: Option<Exact>,
    /// `+√ν²` when real.
    pub nu: Option<f64>,
    pub classification: Classification,
}

impl AmbiguityReport {
    pub fn is_real(&self) -> bool {
        self.classification == Classification::Real
    }

    /// `ν²` as `p/q` when exact, otherwise the float.
    pub fn nu_squared_label(&self) -> String {
        match &self.nu_squared_exact {
            Some(e) => format_exact(e),
            None => self.nu_squared.to_string(),
        }
    }

    pub fn q_over_c2_label(&self) -> String {
        match &self.q_over_c2_exact {
            Some(e) => format_exact(e),
            None => self.q_over_c2.to_string(),
        }
    }
}

/// `q = c²(a − 2αγ − α − γ)/(4(a+1))`.
pub fn q_value(ordering: &OrderingParams, system: &SystemConfig) -> f64 {
    let c = system.c();
    c * c * nu_value(ordering).q_over_c2
}

/// Classifies an ordering by its spectral shift `ν`.
pub fn nu_value(ordering: &OrderingParams) -> AmbiguityReport {
    if let Some(e) = ordering.exact_values() {
        let one = Exact::from_integer(1);
        let two = Exact::from_integer(2);
        let num = e.a - two * e.alpha * e.gamma - e.alpha - e.gamma;
        let q_over_c2 = num / (Exact::from_integer(4) * (e.a + one));
        let nu2 = one - two * num / (e.a + one);
        let (nu, classification) = if exact_is_negative(&nu2) {
            (None, Classification::Complex)
        } else if exact_is_zero(&nu2) {
            (Some(0.0), Classification::Real)
        } else {
            (Some(to_f64(nu2).sqrt()), Classification::Real)
        };
        return AmbiguityReport {
            q_over_c2: to_f64(q_over_c2),
            q_over_c2_exact: Some(q_over_c2),
            nu_squared: to_f64(nu2),
            nu_squared_exact: Some(nu2),
            nu,
            classification,
        };
    }

    let (a, al, g) = (ordering.a(), ordering.alpha(), ordering.gamma());
    let num = a - 2.0 * al * g - al - g;
    let mut nu2 = 1.0 - 2.0 * num / (a + 1.0);
    if nu2.abs() < NU_SQUARED_SNAP {
        nu2 = 0.0;
    }
    let (nu, classification) = if nu2 < 0.0 {
        (None, Classification::Complex)
    } else {
        (Some(nu2.sqrt()), Classification::Real)
    };
    AmbiguityReport {
        q_over_c2: num / (4.0 * (a + 1.0)),
        q_over_c2_exact: None,
        nu_squared: nu2,
        nu_squared_exact: None,
        nu,
        classification,
    }
}
