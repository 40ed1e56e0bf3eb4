//! Finite-difference cross-check of the closed forms.
//!
//! With `ψ = √m·φ` the effective-mass equation becomes
//! `−(ħ²/2m)φ'' + U_eff·φ = E·φ`. Multiplying by `m` gives the symmetric
//! definite problem
//!
//! ```text
//! −(ħ²/2)·φ'' + m·U_eff·φ = E·m·φ
//! ```
//!
//! discretized with central differences into a tridiagonal pencil
//! `A φ = E·diag(m)·φ`. Eigenvalues come from Sturm bisection on the pencil,
//! eigenvectors from inverse iteration.
//!
//! The heavy-mass end is closed with a Dirichlet wall. At the light-mass end
//! the solutions behave like `e^{±|c|ν x/2}` (or `1` and `x` when `ν = 0`),
//! so a hard wall there converges only logarithmically in the domain size.
//! [`BoundaryCondition::Asymptotic`] instead imposes the logarithmic
//! derivative `|c|ν/2` of the decaying solution on the boundary face.

pub mod inverse;
pub mod sturm;

use serde::Serialize;

use crate::ambiguity::{nu_value, weighted_effective_potential};
use crate::error::{Error, Result};
use crate::massmodel::{ExponentialProfile, Grid, GridFunction};
use crate::parallel::Execution;
use crate::params::{OrderingParams, SystemConfig};

pub use inverse::inverse_iteration;
pub use sturm::{bisect_eigenvalue, BisectionOptions, Pencil};

/// Condition at the light-mass end of the domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    #[default]
    Asymptotic,
    Dirichlet,
}

/// Closure of one end of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndCondition {
    /// `φ = 0` one spacing beyond the last node.
    Dirichlet,
    /// Outward derivative `∂φ/∂n = −s·φ` on the face half a spacing beyond
    /// the last node.
    Robin(f64),
}

/// The discretized problem: the pencil plus its congruent symmetric matrix
/// `T = D^{-1/2} A D^{-1/2}`, `D = diag(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSystem {
    pub grid: Grid,
    /// `T` diagonal: `ħ²/(mᵢΔ²) + U_eff(xᵢ)` away from a Robin end.
    pub diag: Vec<f64>,
    /// `T` off-diagonal: `−ħ²/(2Δ²√(mᵢmᵢ₊₁))`.
    pub offdiag: Vec<f64>,
    /// Mass samples `mᵢ`.
    pub weight: Vec<f64>,
    pencil: Pencil,
}

impl TridiagonalSystem {
    /// Assembles `−(ħ²/2)φ'' + P·φ = E·w·φ` from the weight `w` and the
    /// weighted potential `P = w·U` at the grid nodes.
    pub fn assemble(
        grid: Grid,
        hbar: f64,
        weight: Vec<f64>,
        weighted_potential: &[f64],
        left: EndCondition,
        right: EndCondition,
    ) -> Result<Self> {
        let n = grid.n();
        let dx = grid.spacing();
        let kinetic = hbar * hbar / (dx * dx);
        let mut stiffness: Vec<f64> = weighted_potential.iter().map(|p| kinetic + p).collect();
        let off = vec![-0.5 * kinetic; n - 1];
        let close = |s: &mut f64, end: EndCondition| {
            if let EndCondition::Robin(rate) = end {
                *s += -0.5 * kinetic + 0.5 * hbar * hbar * rate / (dx * (1.0 + 0.5 * rate * dx));
            }
        };
        close(&mut stiffness[0], left);
        close(&mut stiffness[n - 1], right);

        let diag = stiffness.iter().zip(&weight).map(|(a, m)| a / m).collect();
        let offdiag = off
            .iter()
            .enumerate()
            .map(|(i, b)| b / (weight[i] * weight[i + 1]).sqrt())
            .collect();
        let pencil = Pencil::new(stiffness, off, weight.clone())?;
        Ok(Self { grid, diag, offdiag, weight, pencil })
    }

    pub fn pencil(&self) -> &Pencil {
        &self.pencil
    }

    /// `φᵀAφ / φᵀDφ`
    pub fn rayleigh_quotient(&self, phi: &GridFunction) -> f64 {
        self.pencil.rayleigh_quotient(phi.values())
    }

    /// `Σ mᵢ·fᵢ·gᵢ·Δ`
    pub fn weighted_inner(&self, f: &GridFunction, g: &GridFunction) -> f64 {
        let sum: f64 = f.values().iter().zip(g.values()).zip(&self.weight).map(|((a, b), m)| a * b * m).sum();
        sum * self.grid.spacing()
    }
}

/// Discretizes with the asymptotic light-end condition.
pub fn discretize(system: &SystemConfig, ordering: &OrderingParams, grid: &Grid) -> Result<TridiagonalSystem> {
    discretize_with(system, ordering, grid, BoundaryCondition::Asymptotic)
}

pub fn discretize_with(
    system: &SystemConfig,
    ordering: &OrderingParams,
    grid: &Grid,
    boundary: BoundaryCondition,
) -> Result<TridiagonalSystem> {
    let report = nu_value(ordering);
    let nu = report.nu.ok_or(Error::ComplexOrdering { nu_squared: report.nu_squared })?;
    let profile = ExponentialProfile::new(*system);
    let weight: Vec<f64> = grid.points().map(|x| profile.mass(x)).collect();
    let potential: Vec<f64> = grid.points().map(|x| weighted_effective_potential(ordering, &profile, x)).collect();

    let light = match boundary {
        BoundaryCondition::Asymptotic => EndCondition::Robin(0.5 * system.c().abs() * nu),
        BoundaryCondition::Dirichlet => EndCondition::Dirichlet,
    };
    let (left, right) = if system.c() > 0.0 { (light, EndCondition::Dirichlet) } else { (EndCondition::Dirichlet, light) };
    TridiagonalSystem::assemble(*grid, system.hbar(), weight, &potential, left, right)
}

/// Constant-mass, zero-potential box with hard walls at `x_min`, `x_max`.
/// Its levels tend to `ħ²π²k²/(2m0L²)`.
pub fn box_system(hbar: f64, m0: f64, grid: &Grid) -> Result<TridiagonalSystem> {
    let n = grid.n();
    TridiagonalSystem::assemble(*grid, hbar, vec![m0; n], &vec![0.0; n], EndCondition::Dirichlet, EndCondition::Dirichlet)
}

/// The `k` smallest eigenvalues of a discretized system.
pub fn eigenvalues(system: &TridiagonalSystem, k: usize, opts: &BisectionOptions, exec: Execution) -> Result<Vec<f64>> {
    sturm::eigenvalues(&system.pencil, k, opts, exec)
}

/// `φ` for the eigenvalue `energy`, normalized to `Σ mᵢφᵢ²Δ = 1`.
pub fn eigenvector(system: &TridiagonalSystem, energy: f64, seed: u64) -> Result<GridFunction> {
    let phi = inverse_iteration(&system.pencil, energy, system.grid.spacing(), seed)?;
    GridFunction::new(system.grid, phi)
}

/// `ψ = √m·φ`
pub fn to_psi(system: &TridiagonalSystem, phi: &GridFunction) -> GridFunction {
    let values = phi.values().iter().zip(&system.weight).map(|(f, m)| m.sqrt() * f).collect();
    GridFunction::new(system.grid, values).expect("same grid")
}

pub const DEFAULT_SEED: u64 = 0x5eed_2005;

/// Boundary shifts above this (relative to `max(1, |E|)`) are flagged.
pub const BOUNDARY_SENSITIVITY_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub boundary: BoundaryCondition,
    pub bisection: BisectionOptions,
    pub seed: u64,
    pub execution: Execution,
    pub vectors: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            boundary: BoundaryCondition::Asymptotic,
            bisection: BisectionOptions::default(),
            seed: DEFAULT_SEED,
            execution: Execution::Parallel,
            vectors: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericLevel {
    pub n: usize,
    /// Richardson-extrapolated eigenvalue.
    pub energy: f64,
    /// `|E_{Δ/2} − E_Δ|/3` + boundary shift + bisection tolerance.
    pub error_estimate: f64,
    /// Eigenvalue on the base grid.
    pub coarse: f64,
    /// Eigenvalue on the refined grid.
    pub fine: f64,
    /// Change when the light-mass end is moved inward.
    pub boundary_shift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub base: Grid,
    pub refined: Grid,
    pub truncated: Grid,
    pub boundary_shift: f64,
    pub boundary_sensitive: bool,
    /// Level indices `i` whose gap to level `i + 1` is not resolved.
    pub clustered: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericSpectrum {
    pub levels: Vec<NumericLevel>,
    pub wavefunctions_phi: Vec<GridFunction>,
    pub wavefunctions_psi: Vec<GridFunction>,
    pub grid_report: GridReport,
    pub seed: u64,
    /// The base-grid system the eigenvectors belong to.
    pub system: TridiagonalSystem,
}

impl NumericSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn to_spectrum(&self, system: &SystemConfig, nu: f64) -> crate::analytic::Spectrum {
        crate::analytic::Spectrum {
            levels: self
                .levels
                .iter()
                .map(|l| crate::analytic::Level { n: l.n, energy: l.energy, bracket: 0.5 * nu })
                .collect(),
            nu,
            kappa: system.kappa(),
            route: crate::analytic::Route::Numeric,
        }
    }
}

/// Richardson extrapolation for a second-order scheme.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Same spacing with the light-mass end moved 10% of the span inward.
fn truncated_grid(system: &SystemConfig, grid: &Grid) -> Result<Grid> {
    let dx = grid.spacing();
    let drop = ((grid.n() + 1) as f64 * 0.1).round() as usize;
    let n = grid.n() - drop;
    if system.c() > 0.0 {
        Grid::new(grid.x_min() + drop as f64 * dx, grid.x_max(), n)
    } else {
        Grid::new(grid.x_min(), grid.x_max() - drop as f64 * dx, n)
    }
}

/// Re-bisects unresolved neighbours at 1e-12 absolute; returns indices of
/// pairs that still coincide.
fn resolve_clusters(system: &TridiagonalSystem, values: &mut [f64], opts: &BisectionOptions) -> Result<Vec<usize>> {
    let tight = BisectionOptions { rel_tol: 0.0, abs_tol: 1e-12, ..*opts };
    let mut clustered = Vec::new();
    for i in 0..values.len().saturating_sub(1) {
        if values[i + 1] - values[i] <= 10.0 * opts.tolerance_at(values[i]) {
            values[i] = bisect_eigenvalue(&system.pencil, i, &tight)?;
            values[i + 1] = bisect_eigenvalue(&system.pencil, i + 1, &tight)?;
            if values[i + 1] - values[i] <= 1e-12 {
                clustered.push(i);
            }
        }
    }
    Ok(clustered)
}

pub fn solve_spectrum(system: &SystemConfig, ordering: &OrderingParams, grid: &Grid, k: usize) -> Result<NumericSpectrum> {
    solve_spectrum_with(system, ordering, grid, k, &SolveOptions::default())
}

/// Full pipeline: base, refined and truncated grids, Richardson
/// extrapolation, eigenvectors on the base grid.
pub fn solve_spectrum_with(
    system: &SystemConfig,
    ordering: &OrderingParams,
    grid: &Grid,
    k: usize,
    opts: &SolveOptions,
) -> Result<NumericSpectrum> {
    let exec = opts.execution;
    let refined = grid.refined();
    let truncated = truncated_grid(system, grid)?;
    let solve = |g: &Grid| -> Result<(TridiagonalSystem, Vec<f64>)> {
        let t = discretize_with(system, ordering, g, opts.boundary)?;
        let e = eigenvalues(&t, k, &opts.bisection, exec)?;
        Ok((t, e))
    };
    let (base, (fine, short)) = exec.join(|| solve(grid), || exec.join(|| solve(&refined), || solve(&truncated)));
    let (base_system, mut coarse) = base?;
    let (fine_system, mut fine) = fine?;
    let (_, short) = short?;

    let clustered = resolve_clusters(&base_system, &mut coarse, &opts.bisection)?;
    resolve_clusters(&fine_system, &mut fine, &opts.bisection)?;

    let levels: Vec<NumericLevel> = (0..k)
        .map(|i| {
            let energy = richardson(coarse[i], fine[i]);
            let boundary_shift = (short[i] - coarse[i]).abs();
            NumericLevel {
                n: i,
                energy,
                error_estimate: (fine[i] - coarse[i]).abs() / 3.0 + boundary_shift + opts.bisection.tolerance_at(energy),
                coarse: coarse[i],
                fine: fine[i],
                boundary_shift,
            }
        })
        .collect();
    let boundary_shift = levels.iter().map(|l| l.boundary_shift).fold(0.0, f64::max);
    let boundary_sensitive = levels
        .iter()
        .any(|l| l.boundary_shift > BOUNDARY_SENSITIVITY_LIMIT * l.energy.abs().max(1.0));

    let (wavefunctions_phi, wavefunctions_psi) = if opts.vectors {
        let phis: Vec<GridFunction> = exec
            .map_indices(k, |i| eigenvector(&base_system, coarse[i], opts.seed.wrapping_add(i as u64)))
            .into_iter()
            .collect::<Result<_>>()?;
        let psis = phis.iter().map(|p| to_psi(&base_system, p)).collect();
        (phis, psis)
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(NumericSpectrum {
        levels,
        wavefunctions_phi,
        wavefunctions_psi,
        grid_report: GridReport {
            base: *grid,
            refined,
            truncated,
            boundary_shift,
            boundary_sensitive,
            clustered,
        },
        seed: opts.seed,
        system: base_system,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Eigenvalues at `Δ`, `Δ/2`, `Δ/4`.
    pub values: [f64; 3],
    /// `log₂((E_Δ − E_{Δ/2}) / (E_{Δ/2} − E_{Δ/4}))`
    pub observed_order: f64,
    /// Richardson value from `Δ/2` and `Δ/4`.
    pub extrapolated: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub grids: [Grid; 3],
    pub rows: Vec<ConvergenceRow>,
}

/// Refinement study for any grid-to-system builder.
pub fn convergence_study_of<F>(build: F, base_grid: &Grid, k: usize, exec: Execution) -> Result<ConvergenceTable>
where
    F: Fn(&Grid) -> Result<TridiagonalSystem> + Sync + Send,
{
    let g1 = *base_grid;
    let g2 = g1.refined();
    let g4 = g2.refined();
    let grids = [g1, g2, g4];
    let opts = BisectionOptions { rel_tol: 1e-13, ..Default::default() };
    let values: Vec<Vec<f64>> = grids
        .iter()
        .map(|g| build(g).and_then(|t| eigenvalues(&t, k, &opts, exec)))
        .collect::<Result<_>>()?;
    let rows = (0..k)
        .map(|i| {
            let v = [values[0][i], values[1][i], values[2][i]];
            ConvergenceRow {
                n: i,
                values: v,
                observed_order: ((v[0] - v[1]) / (v[1] - v[2])).abs().log2(),
                extrapolated: richardson(v[1], v[2]),
            }
        })
        .collect();
    Ok(ConvergenceTable { grids, rows })
}

pub fn convergence_study(
    system: &SystemConfig,
    ordering: &OrderingParams,
    base_grid: &Grid,
    k: usize,
) -> Result<ConvergenceTable> {
    convergence_study_of(|g| discretize(system, ordering, g), base_grid, k, Execution::Parallel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;
    use approx::assert_relative_eq;

    fn reference_grid(n: usize) -> Grid {
        Grid::new(-40.0, 8.0, n).unwrap()
    }

    #[test]
    fn matrix_entries() {
        let s = SystemConfig::reference();
        let grid = Grid::new(-2.0, 2.0, 7).unwrap();
        let o = Preset::BenDanielDuke.params();
        let t = discretize_with(&s, &o, &grid, BoundaryCondition::Dirichlet).unwrap();
        let dx = grid.spacing();
        let p = ExponentialProfile::new(s);
        for i in 0..7 {
            let x = grid.x(i);
            let expect = 1.0 / (p.mass(x) * dx * dx) + crate::ambiguity::effective_potential(&o, &p, x);
            assert_relative_eq!(t.diag[i], expect, max_relative = 1e-13);
        }
        for i in 0..6 {
            let expect = -1.0 / (2.0 * dx * dx * (p.mass(grid.x(i)) * p.mass(grid.x(i + 1))).sqrt());
            assert_relative_eq!(t.offdiag[i], expect, max_relative = 1e-13);
            assert!(t.offdiag[i] < 0.0);
        }
        assert!(t.weight.iter().all(|&m| m > 0.0));
        assert!(matches!(
            discretize(&s, &Preset::GoraWilliams.params(), &grid),
            Err(Error::ComplexOrdering { .. })
        ));
    }

    #[test]
    fn congruent_matrix_has_the_pencil_spectrum() {
        let s = SystemConfig::reference();
        let grid = Grid::new(-3.0, 3.0, 60).unwrap();
        let t = discretize(&s, &Preset::Weyl.params(), &grid).unwrap();
        let standard = Pencil::standard(t.diag.clone(), t.offdiag.clone()).unwrap();
        let opts = BisectionOptions::default();
        let a = sturm::eigenvalues(&standard, 5, &opts, Execution::Sequential).unwrap();
        let b = eigenvalues(&t, 5, &opts, Execution::Sequential).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, max_relative = 1e-9);
        }
    }

    #[test]
    fn particle_in_a_box() {
        let grid = Grid::new(0.0, 2.0, 4096).unwrap();
        let t = box_system(1.0, 1.0, &grid).unwrap();
        let e = eigenvalues(&t, 4, &BisectionOptions::default(), Execution::Parallel).unwrap();
        for (k, v) in e.iter().enumerate() {
            let kk = (k + 1) as f64;
            let exact = std::f64::consts::PI.powi(2) * kk * kk / (2.0 * 4.0);
            assert_relative_eq!(*v, exact, max_relative = 1e-4);
        }
    }

    #[test]
    fn dirichlet_light_end_converges_slowly_for_nu_zero() {
        let s = SystemConfig::reference();
        let o = Preset::Weyl.params();
        let grid = reference_grid(2047);
        let opts = BisectionOptions::default();
        let hard = discretize_with(&s, &o, &grid, BoundaryCondition::Dirichlet).unwrap();
        let soft = discretize(&s, &o, &grid).unwrap();
        let e_hard = eigenvalues(&hard, 1, &opts, Execution::Sequential).unwrap()[0];
        let e_soft = eigenvalues(&soft, 1, &opts, Execution::Sequential).unwrap()[0];
        assert!(e_hard - 1.0 > 1e-2, "{e_hard}");
        assert!((e_soft - 1.0).abs() < 1e-3, "{e_soft}");
    }

    #[test]
    fn reference_spectra_after_refinement() {
        let s = SystemConfig::reference();
        let grid = reference_grid(2047);
        for (preset, expect) in [(Preset::Weyl, [1.0, 3.0, 5.0, 7.0]), (Preset::BenDanielDuke, [2.0, 4.0, 6.0, 8.0])] {
            let spec = solve_spectrum(&s, &preset.params(), &grid, 4).unwrap();
            for (l, e) in spec.levels.iter().zip(expect) {
                assert!((l.energy - e).abs() < 1e-3 * e, "{preset} {}: {} vs {e}", l.n, l.energy);
                assert!((l.energy - e).abs() <= l.error_estimate, "{preset} {}: estimate {}", l.n, l.error_estimate);
            }
            assert!(!spec.grid_report.boundary_sensitive, "{:?}", spec.grid_report);
            assert!(spec.grid_report.clustered.is_empty());
        }
    }

    #[test]
    fn eigenvector_structure() {
        let s = SystemConfig::reference();
        let grid = reference_grid(2047);
        let spec = solve_spectrum(&s, &Preset::BenDanielDuke.params(), &grid, 4).unwrap();
        for (k, phi) in spec.wavefunctions_phi.iter().enumerate() {
            assert_eq!(phi.sign_changes(1e-9), k);
            assert_relative_eq!(spec.system.weighted_inner(phi, phi), 1.0, max_relative = 1e-12);
            assert_relative_eq!(spec.wavefunctions_psi[k].l2_norm(), 1.0, max_relative = 1e-12);
            let rq = spec.system.rayleigh_quotient(phi);
            let e = spec.levels[k].coarse;
            assert!((rq - e).abs() < 1e-8 * e.abs().max(1.0), "{rq} vs {e}");
            for other in &spec.wavefunctions_phi[..k] {
                assert!(spec.system.weighted_inner(phi, other).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn solver_is_deterministic_across_strategies() {
        let s = SystemConfig::reference();
        let grid = reference_grid(1023);
        let o = Preset::ZhuKroemer.params();
        let run = |execution| {
            let opts = SolveOptions { execution, ..Default::default() };
            solve_spectrum_with(&s, &o, &grid, 4, &opts).unwrap()
        };
        let a = run(Execution::Sequential);
        let b = run(Execution::Parallel);
        assert_eq!(a.levels, b.levels);
        assert_eq!(a.wavefunctions_phi, b.wavefunctions_phi);
    }

    #[test]
    fn negative_grading_rate_mirrors() {
        let s = SystemConfig::new(1.0, 1.0, -1.0, 2.0).unwrap();
        let grid = Grid::default_for(&s, 2047).unwrap();
        let spec = solve_spectrum(&s, &Preset::LiKuhn.params(), &grid, 3).unwrap();
        for (l, e) in spec.levels.iter().zip([1.0, 3.0, 5.0]) {
            assert!((l.energy - e).abs() < 1e-3 * e);
        }
    }

    #[test]
    fn enlarging_the_domain_does_not_raise_levels() {
        let s = SystemConfig::reference();
        let small = Grid::new(-40.0, 8.0, 2047).unwrap();
        // same spacing, 12 units more on each side
        let extra = (12.0 / small.spacing()).round() as usize;
        let dx = small.spacing();
        let large = Grid::new(-40.0 - extra as f64 * dx, 8.0 + extra as f64 * dx, 2047 + 2 * extra).unwrap();
        for p in [Preset::Weyl, Preset::BenDanielDuke] {
            let a = solve_spectrum(&s, &p.params(), &small, 4).unwrap();
            let b = solve_spectrum(&s, &p.params(), &large, 4).unwrap();
            for (x, y) in a.levels.iter().zip(&b.levels) {
                assert!(y.energy <= x.energy + x.error_estimate, "{p}: {} -> {}", x.energy, y.energy);
            }
        }
    }

    #[test]
    fn box_convergence_order() {
        let grid = Grid::new(0.0, 1.0, 127).unwrap();
        let table = convergence_study_of(|g| box_system(1.0, 1.0, g), &grid, 3, Execution::Parallel).unwrap();
        for row in &table.rows {
            assert!((1.9..=2.1).contains(&row.observed_order), "{row:?}");
        }
    }
}
