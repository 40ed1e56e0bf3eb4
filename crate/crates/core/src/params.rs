//! Ordering parameters, literature presets and the physical configuration.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact rational used for preset parameters and classification arithmetic.
pub type Exact = Ratio<i128>;

/// Float tolerance on `α + β + γ = −1`.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

/// The four parameters of the four-term effective-mass Hamiltonian
///
/// ```text
/// H = 1/(4(a+1)) { a [m⁻¹p² + p²m⁻¹] + m^α p m^β p m^γ + m^γ p m^β p m^α }
/// ```
///
/// constrained by `α + β + γ = −1` and `a ≠ −1`. When the parameters were
/// given as rationals the exact values are kept alongside the floats so that
/// classification never depends on rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderingParams {
    a: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    exact: Option<ExactOrdering>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExactOrdering {
    pub a: Exact,
    pub alpha: Exact,
    pub beta: Exact,
    pub gamma: Exact,
}

impl OrderingParams {
    /// Validates float parameters.
    pub fn new(a: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if ![a, alpha, beta, gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSystem("ordering parameters must be finite".into()));
        }
        let sum = alpha + beta + gamma;
        if (sum + 1.0).abs() > CONSTRAINT_TOLERANCE {
            return Err(Error::ConstraintViolation { sum });
        }
        if (a + 1.0).abs() <= CONSTRAINT_TOLERANCE {
            return Err(Error::DegenerateOrdering);
        }
        Ok(Self { a, alpha, beta, gamma, exact: None })
    }

    /// Validates rational parameters; the constraint is checked exactly.
    pub fn exact(a: Exact, alpha: Exact, beta: Exact, gamma: Exact) -> Result<Self> {
        let sum = alpha + beta + gamma;
        if sum != -Exact::one() {
            return Err(Error::ConstraintViolation { sum: to_f64(sum) });
        }
        if a == -Exact::one() {
            return Err(Error::DegenerateOrdering);
        }
        Ok(Self {
            a: to_f64(a),
            alpha: to_f64(alpha),
            beta: to_f64(beta),
            gamma: to_f64(gamma),
            exact: Some(ExactOrdering { a, alpha, beta, gamma }),
        })
    }

    /// Builds an ordering from `(a, α, γ)` with `β = −1 − α − γ`.
    pub fn from_a_alpha_gamma(a: f64, alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(a, alpha, -1.0 - alpha - gamma, gamma)
    }

    pub fn exact_from_a_alpha_gamma(a: Exact, alpha: Exact, gamma: Exact) -> Result<Self> {
        Self::exact(a, alpha, -Exact::one() - alpha - gamma, gamma)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn exact_values(&self) -> Option<&ExactOrdering> {
        self.exact.as_ref()
    }

    /// The same ordering with `α` and `γ` exchanged.
    pub fn swap_alpha_gamma(&self) -> Self {
        Self {
            a: self.a,
            alpha: self.gamma,
            beta: self.beta,
            gamma: self.alpha,
            exact: self.exact.map(|e| ExactOrdering { alpha: e.gamma, gamma: e.alpha, ..e }),
        }
    }
}

impl fmt::Display for OrderingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{},{},{},{}", e.a, e.alpha, e.beta, e.gamma),
            None => write!(f, "{},{},{},{}", self.a, self.alpha, self.beta, self.gamma),
        }
    }
}

/// Orderings proposed in the literature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    BenDanielDuke,
    GoraWilliams,
    ZhuKroemer,
    LiKuhn,
    Weyl,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::BenDanielDuke,
        Preset::GoraWilliams,
        Preset::ZhuKroemer,
        Preset::LiKuhn,
        Preset::Weyl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::BenDanielDuke => "bendaniel-duke",
            Preset::GoraWilliams => "gora-williams",
            Preset::ZhuKroemer => "zhu-kroemer",
            Preset::LiKuhn => "li-kuhn",
            Preset::Weyl => "weyl",
        }
    }

    /// `(a, α, β, γ)` as `(numerator, denominator)` pairs.
    fn table_row(self) -> [(i128, i128); 4] {
        match self {
            Preset::BenDanielDuke => [(0, 1), (0, 1), (-1, 1), (0, 1)],
            Preset::GoraWilliams => [(0, 1), (-1, 1), (0, 1), (0, 1)],
            Preset::ZhuKroemer => [(0, 1), (-1, 2), (0, 1), (-1, 2)],
            Preset::LiKuhn => [(0, 1), (0, 1), (-1, 2), (-1, 2)],
            // β = −1: the symmetrized ¼(m⁻¹p² + 2pm⁻¹p + p²m⁻¹) form.
            Preset::Weyl => [(1, 1), (0, 1), (-1, 1), (0, 1)],
        }
    }

    pub fn params(self) -> OrderingParams {
        let [a, alpha, beta, gamma] = self.table_row().map(|(n, d)| Exact::new(n, d));
        OrderingParams::exact(a, alpha, beta, gamma).expect("preset rows satisfy the ordering constraint")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderingPreset {
    pub name: Preset,
    pub params: OrderingParams,
}

/// Looks up a preset by its CLI name.
pub fn preset(name: &str) -> Result<OrderingPreset> {
    let name: Preset = name.parse()?;
    Ok(OrderingPreset { name, params: name.params() })
}

/// Physical constants and the exponential-profile parameters.
///
/// `V0 ≤ 0` is representable (sweeps cross it); the spectral operations
/// reject it with [`Error::NoBoundStates`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemConfig {
    hbar: f64,
    m0: f64,
    c: f64,
    #[serde(rename = "V0")]
    v0: f64,
}

impl SystemConfig {
    pub fn new(hbar: f64, m0: f64, c: f64, v0: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidSystem(format!("hbar must be positive, got {hbar}")));
        }
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::InvalidSystem(format!("m0 must be positive, got {m0}")));
        }
        if !c.is_finite() || c == 0.0 {
            return Err(Error::InvalidSystem(format!("c must be finite and nonzero, got {c}")));
        }
        if !v0.is_finite() {
            return Err(Error::InvalidSystem(format!("V0 must be finite, got {v0}")));
        }
        Ok(Self { hbar, m0, c, v0 })
    }

    /// ħ = m0 = c = 1, V0 = 2, so that the level spacing scale κ is 1.
    pub fn reference() -> Self {
        Self { hbar: 1.0, m0: 1.0, c: 1.0, v0: 2.0 }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(hbar, self.m0, self.c, self.v0)
    }

    pub fn with_m0(self, m0: f64) -> Result<Self> {
        Self::new(self.hbar, m0, self.c, self.v0)
    }

    pub fn with_c(self, c: f64) -> Result<Self> {
        Self::new(self.hbar, self.m0, c, self.v0)
    }

    pub fn with_v0(self, v0: f64) -> Result<Self> {
        Self::new(self.hbar, self.m0, self.c, v0)
    }

    pub fn require_bound_states(&self) -> Result<()> {
        if self.v0 > 0.0 {
            Ok(())
        } else {
            Err(Error::NoBoundStates { v0: self.v0 })
        }
    }

    /// Level-spacing scale `κ = ħ|c|·√(V0/(2m0))`.
    pub fn kappa(&self) -> f64 {
        self.hbar * self.c.abs() * (self.v0 / (2.0 * self.m0)).sqrt()
    }
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::reference()
    }
}

pub(crate) fn to_f64(r: Exact) -> f64 {
    r.to_f64().unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}

/// Largest denominator accepted by [`parse_exact`]; longer decimals stay
/// floats so that products of four parameters cannot overflow `i128`.
const MAX_EXACT_DENOMINATOR: i128 = 1_000_000_000;

/// Parses `"3"`, `"-1/2"` or a plain decimal such as `"-0.25"` exactly.
/// Returns `None` for anything else (exponents, very long decimals).
pub fn parse_exact(s: &str) -> Option<Exact> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 || d.abs() > MAX_EXACT_DENOMINATOR || n.abs() > MAX_EXACT_DENOMINATOR {
            return None;
        }
        return Some(Exact::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if int_part.len() > 9 || frac_part.len() > 9 {
        return None;
    }
    let denom = 10i128.pow(frac_part.len() as u32);
    let int: i128 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    let frac: i128 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let value = Exact::new(int * denom + frac, denom);
    Some(if negative { -value } else { value })
}

/// Formats an exact rational as `p` or `p/q`.
pub fn format_exact(r: &Exact) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn exact_is_negative(r: &Exact) -> bool {
    r.is_negative()
}

pub(crate) fn exact_is_zero(r: &Exact) -> bool {
    r.is_zero()
}
