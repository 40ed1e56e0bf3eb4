//! Position-dependent-mass Schrödinger Hamiltonians in the four-parameter
//! ordering family.
//!
//! The crate covers the exponentially graded model `m(x) = m0·e^{cx}`,
//! `V(x) = V0·e^{cx}`:
//!
//! - [`params`]: ordering parameters `(a, α, β, γ)`, literature presets and
//!   the physical configuration.
//! - [`massmodel`]: the exponential profile, uniform grids and sampled
//!   functions.
//! - [`ambiguity`]: the ordering-dependent potential, the effective potential
//!   and the `ν` classification.
//! - [`analytic`]: exact spectra through the Morse reduction and through the
//!   radial-oscillator mapping, plus the closed-form ground state.
//! - [`susy`]: superpotential, the operators `A`/`A†` and the partner
//!   potentials.
//! - [`numerics`]: a mass-weighted finite-difference eigensolver (Sturm
//!   bisection + inverse iteration) used to cross-check every closed form.
//! - [`verify`]: the invariant suite behind `pdm verify`.
//! - [`cli`]: the `pdm` command-line front end.

pub mod ambiguity;
pub mod analytic;
pub mod cli;
pub mod error;
pub mod massmodel;
pub mod numerics;
pub mod parallel;
pub mod params;
pub mod susy;
pub mod verify;

pub use error::{Error, Result};
pub use parallel::Execution;
pub use params::{OrderingParams, OrderingPreset, Preset, SystemConfig};
