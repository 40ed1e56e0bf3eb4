//! The invariant suite run by `pdm verify`.
//!
//! Every check is independent and reports a name, pass/fail and a one-line
//! detail. Numeric checks need a resolved grid; below
//! [`MIN_VERIFY_POINTS`] they are reported as failed with a
//! `GridTooCoarse` diagnostic and the report is marked degraded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambiguity::{effective_potential, nu_value, q_value, ambiguity_potential, Classification};
use crate::analytic::{ground_state_closed_form, morse_reduction, morse_spectrum, oscillator_spectrum};
use crate::error::{Error, Result};
use crate::massmodel::{sample, ExponentialProfile, Grid, MassTriple};
use crate::numerics::{self, box_system, convergence_study_of, discretize, SolveOptions};
use crate::parallel::Execution;
use crate::params::{Exact, OrderingParams, OrderingPreset, Preset, SystemConfig};
use crate::susy::{apply_a, nu0_ambiguity_potential, partner_potential_1, partner_potential_2, solve_superpotential};

/// Smallest grid on which the numeric checks are meaningful.
pub const MIN_VERIFY_POINTS: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub degraded: bool,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub system: SystemConfig,
    pub grid: Grid,
    pub presets: Vec<OrderingPreset>,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let system = SystemConfig::reference();
        Self {
            system,
            grid: Grid::default_for(&system, 8192).expect("valid default grid"),
            presets: Preset::ALL.iter().map(|p| OrderingPreset { name: *p, params: p.params() }).collect(),
            seed: numerics::DEFAULT_SEED,
            execution: Execution::Parallel,
        }
    }
}

/// Expected exact `ν²` per preset.
pub fn expected_nu_squared(p: Preset) -> Exact {
    match p {
        Preset::ZhuKroemer | Preset::LiKuhn | Preset::Weyl => Exact::from_integer(0),
        Preset::BenDanielDuke => Exact::from_integer(1),
        Preset::GoraWilliams => Exact::from_integer(-1),
    }
}

type Outcome = Result<(bool, String)>;

fn run_check(name: &'static str, f: impl FnOnce() -> Outcome) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
    }
}

/// Random valid ordering; `β` is fixed by the constraint.
pub fn random_ordering(rng: &mut impl Rng) -> OrderingParams {
    let a = rng.gen_range(-0.9..3.0);
    let alpha = rng.gen_range(-2.0..2.0);
    let gamma = rng.gen_range(-2.0..2.0);
    OrderingParams::from_a_alpha_gamma(a, alpha, gamma).expect("constraint holds by construction")
}

/// Random Real ordering (rejection sampling).
pub fn random_real_ordering(rng: &mut impl Rng) -> OrderingParams {
    loop {
        let o = random_ordering(rng);
        if nu_value(&o).is_real() {
            return o;
        }
    }
}

/// `ħ, m0, c, V0` log-uniform in `[0.1, 10]`, random sign of `c`.
pub fn random_system(rng: &mut impl Rng) -> SystemConfig {
    let mut draw = || 10f64.powf(rng.gen_range(-1.0..1.0));
    let (hbar, m0, c, v0) = (draw(), draw(), draw(), draw());
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    SystemConfig::new(hbar, m0, sign * c, v0).expect("positive draws")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// 1000-point grid on `(−8, 8)/|c|` for pointwise identities.
pub fn identity_grid(system: &SystemConfig) -> Grid {
    let s = 8.0 / system.c().abs();
    Grid::new(-s, s, 1000).expect("valid identity grid")
}

pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let mut checks = Vec::new();
    let sys = cfg.system;
    let real_presets: Vec<OrderingPreset> =
        cfg.presets.iter().copied().filter(|p| nu_value(&p.params).is_real()).collect();

    checks.push(run_check("presets_valid", || {
        let bad: Vec<&str> = cfg
            .presets
            .iter()
            .filter(|p| {
                let o = p.params;
                OrderingParams::new(o.a(), o.alpha(), o.beta(), o.gamma()).is_err()
            })
            .map(|p| p.name.name())
            .collect();
        Ok((bad.is_empty(), if bad.is_empty() { "all presets satisfy α+β+γ=−1, a≠−1".into() } else { format!("invalid: {bad:?}") }))
    }));

    checks.push(run_check("nu_classification_exact", || {
        let mut wrong = Vec::new();
        for p in &cfg.presets {
            let r = nu_value(&p.params);
            let expect = expected_nu_squared(p.name);
            let class_ok = (r.classification == Classification::Complex) == (expect < Exact::from_integer(0));
            if r.nu_squared_exact != Some(expect) || !class_ok {
                wrong.push(format!("{}: ν²={}", p.name, r.nu_squared_label()));
            }
        }
        Ok((wrong.is_empty(), if wrong.is_empty() { "ν=0 zk/lk/weyl, ν=1 bdd, ν²=−1 gw".into() } else { wrong.join("; ") }))
    }));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let orderings: Vec<OrderingParams> = (0..200).map(|_| random_ordering(&mut rng)).collect();
    let systems: Vec<SystemConfig> = (0..100).map(|_| random_system(&mut rng)).collect();
    let real_orderings: Vec<OrderingParams> = (0..100).map(|_| random_real_ordering(&mut rng)).collect();

    checks.push(run_check("nu_q_consistency", || {
        let worst = orderings
            .iter()
            .zip(systems.iter().cycle())
            .map(|(o, s)| {
                let lhs = nu_value(o).nu_squared;
                let rhs = 1.0 - 8.0 * q_value(o, s) / (s.c() * s.c());
                (lhs - rhs).abs() / rhs.abs().max(1.0)
            })
            .fold(0.0, f64::max);
        Ok((worst <= 1e-12, format!("max |ν² − (1 − 8q/c²)| = {worst:e}")))
    }));

    checks.push(run_check("mass_log_linearity", || {
        let p = ExponentialProfile::new(sys);
        let worst = cfg
            .grid
            .points()
            .map(|x| {
                let (m, d1, d2) = (p.mass(x), p.mass_d1(x), p.mass_d2(x));
                (d1 * d1 - m * d2).abs() / (d1 * d1)
            })
            .fold(0.0, f64::max);
        Ok((worst <= 1e-12, format!("max rel |m'² − m·m''| = {worst:e}")))
    }));

    checks.push(run_check("nu0_effective_potential_is_bare", || {
        let p = ExponentialProfile::new(sys);
        let grid = Grid::new(-8.0 / sys.c().abs(), 8.0 / sys.c().abs(), 1000)?;
        let v = sample(|x| p.bare_potential(x), &grid);
        let vmax = v.max_abs();
        let mut ok = true;
        let mut parts = Vec::new();
        for preset in &real_presets {
            let u = sample(|x| effective_potential(&preset.params, &p, x), &grid);
            let dev = u.values().iter().zip(v.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / vmax;
            let is_nu0 = nu_value(&preset.params).nu == Some(0.0);
            ok &= is_nu0 == (dev < 1e-10);
            parts.push(format!("{}={dev:.1e}", preset.name));
        }
        Ok((ok, format!("max|U_eff−V|/max|V|: {}", parts.join(" "))))
    }));

    checks.push(run_check("ambiguity_alpha_gamma_symmetry", || {
        let p = ExponentialProfile::new(sys);
        let worst = orderings
            .iter()
            .map(|o| {
                let m = p.mass_triple(0.3 / sys.c());
                let u = ambiguity_potential(o, sys.hbar(), m);
                let w = ambiguity_potential(&o.swap_alpha_gamma(), sys.hbar(), m);
                (u - w).abs() / u.abs().max(1.0)
            })
            .fold(0.0, f64::max);
        Ok((worst <= 1e-13, format!("max |U(α,γ) − U(γ,α)| = {worst:e}")))
    }));

    checks.push(run_check("ambiguity_free_constraints", || {
        let masses = [MassTriple { m: 2.0, d1: -3.0, d2: 7.0 }, MassTriple { m: 0.3, d1: 0.5, d2: -1.1 }];
        let mut worst: f64 = 0.0;
        for t in [-0.5, 0.0, 0.7, 2.0] {
            for o in [OrderingParams::from_a_alpha_gamma(t, 0.0, t)?, OrderingParams::from_a_alpha_gamma(t, t, 0.0)?] {
                for m in masses {
                    worst = worst.max(ambiguity_potential(&o, sys.hbar(), m).abs());
                }
            }
        }
        Ok((worst == 0.0, format!("max |U| over (α=0,a=γ) and (a=α,γ=0) = {worst:e}")))
    }));

    checks.push(run_check("route_equivalence", || {
        let mut worst: f64 = 0.0;
        for (s, o) in systems.iter().zip(&real_orderings) {
            let m = morse_spectrum(s, o, 9)?;
            let h = oscillator_spectrum(s, o, 9)?;
            for (a, b) in m.levels.iter().zip(&h.levels) {
                worst = worst.max(rel(a.energy, b.energy));
            }
        }
        Ok((worst <= 1e-12, format!("100 configs, n=0..9: max rel diff {worst:e}")))
    }));

    checks.push(run_check("epsilon_nu_link", || {
        let mut worst: f64 = 0.0;
        for (s, o) in systems.iter().zip(&real_orderings) {
            let eps = morse_reduction(s, o)?.epsilon;
            let nu2 = nu_value(o).nu_squared;
            let expect = -s.hbar() * s.hbar() * s.c() * s.c() * nu2 / (8.0 * s.m0());
            let scale = s.hbar() * s.hbar() * s.c() * s.c() / s.m0();
            worst = worst.max((eps - expect).abs() / scale);
        }
        Ok((worst <= 1e-12, format!("max |ε + ħ²c²ν²/8m0| (scaled) = {worst:e}")))
    }));

    let identity = || -> Result<(f64, f64, f64)> {
        let sp = solve_superpotential(&sys)?;
        let p = ExponentialProfile::new(sys);
        let grid = identity_grid(&sys);
        let vmax = grid.points().map(|x| p.bare_potential(x).abs()).fold(0.0, f64::max);
        let mut r1: f64 = 0.0;
        let mut r2: f64 = 0.0;
        for x in grid.points() {
            let v = p.bare_potential(x);
            let u = nu0_ambiguity_potential(&sys, x);
            r1 = r1.max((partner_potential_1(&sp, &sys, x) + sp.e0 - v - u).abs());
            r2 = r2.max((partner_potential_2(&sp, &sys, x) - v).abs());
        }
        Ok((r1 / vmax, r2 / vmax, sp.e0))
    };

    checks.push(run_check("susy_factorization_identity", || {
        let (r1, _, _) = identity()?;
        Ok((r1 < 1e-12, format!("max|V1 + E0 − V − U_nu0|/max|V| = {r1:e}")))
    }));

    checks.push(run_check("susy_partner_identity", || {
        let (_, r2, _) = identity()?;
        Ok((r2 < 1e-12, format!("max|V2 − V|/max|V| = {r2:e}")))
    }));

    checks.push(run_check("factorization_energy_is_ground_level", || {
        let sp = solve_superpotential(&sys)?;
        let e0 = morse_spectrum(&sys, &Preset::Weyl.params(), 0)?.levels[0].energy;
        let d = rel(sp.e0, e0);
        Ok((d <= 1e-12, format!("E0 = {}, κ = {}, rel diff {d:e}", sp.e0, e0)))
    }));

    // numeric checks
    if cfg.grid.n() < MIN_VERIFY_POINTS {
        let reason = Error::GridTooCoarse { n: cfg.grid.n(), min: MIN_VERIFY_POINTS };
        for name in NUMERIC_CHECKS {
            checks.push(CheckResult { name, passed: false, detail: format!("GridTooCoarse: {reason}") });
        }
        return VerifyReport { checks, degraded: true };
    }

    checks.extend(numeric_checks(cfg, &real_presets));
    VerifyReport { checks, degraded: false }
}

const NUMERIC_CHECKS: [&str; 9] = [
    "numeric_matches_analytic",
    "nu0_presets_agree",
    "susy_spectral_shift",
    "eigenpair_consistency",
    "ground_state_matches_closed_form",
    "annihilation_second_order",
    "box_self_test",
    "convergence_order",
    "solver_determinism",
];

fn numeric_checks(cfg: &VerifyConfig, real_presets: &[OrderingPreset]) -> Vec<CheckResult> {
    let sys = cfg.system;
    let grid = cfg.grid;
    let k = 5;
    let opts = SolveOptions { seed: cfg.seed, execution: cfg.execution, ..Default::default() };
    let solved: Vec<(OrderingPreset, Result<numerics::NumericSpectrum>)> = real_presets
        .iter()
        .map(|p| (*p, numerics::solve_spectrum_with(&sys, &p.params, &grid, k, &opts)))
        .collect();
    let find = |preset: Preset| solved.iter().find(|(p, _)| p.name == preset).map(|(_, s)| s);
    let mut checks = Vec::new();

    checks.push(run_check(NUMERIC_CHECKS[0], || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (p, spec) in &solved {
            let spec = spec.as_ref().map_err(clone_err)?;
            let morse = morse_spectrum(&sys, &p.params, k - 1)?;
            let osc = oscillator_spectrum(&sys, &p.params, k - 1)?;
            let mut worst: f64 = 0.0;
            for ((l, m), o) in spec.levels.iter().zip(&morse.levels).zip(&osc.levels) {
                let d = (l.energy - m.energy).abs();
                ok &= d <= l.error_estimate && d <= 1e-3 * m.energy.abs() && (l.energy - o.energy).abs() <= l.error_estimate;
                worst = worst.max(d / m.energy.abs());
            }
            parts.push(format!("{}={worst:.1e}", p.name));
        }
        Ok((ok, format!("max rel deviation: {}", parts.join(" "))))
    }));

    checks.push(run_check(NUMERIC_CHECKS[1], || {
        let nu0: Vec<&numerics::NumericSpectrum> = solved
            .iter()
            .filter(|(p, _)| nu_value(&p.params).nu == Some(0.0))
            .filter_map(|(_, s)| s.as_ref().ok())
            .collect();
        let mut worst: f64 = 0.0;
        for a in &nu0 {
            for b in &nu0 {
                for (x, y) in a.levels.iter().zip(&b.levels) {
                    worst = worst.max(rel(x.energy, y.energy));
                }
            }
        }
        Ok((nu0.len() >= 2 && worst <= 1e-10, format!("{} ν=0 presets, max pairwise rel diff {worst:e}", nu0.len())))
    }));

    checks.push(run_check(NUMERIC_CHECKS[2], || {
        let nu0 = find(Preset::Weyl).or_else(|| find(Preset::ZhuKroemer)).ok_or(Error::UnknownPreset("weyl".into()))?;
        let nu0 = nu0.as_ref().map_err(clone_err)?;
        let bdd = find(Preset::BenDanielDuke).ok_or(Error::UnknownPreset("bendaniel-duke".into()))?;
        let bdd = bdd.as_ref().map_err(clone_err)?;
        let e0 = solve_superpotential(&sys)?.e0;
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for n in 1..k {
            let d = (nu0.levels[n].energy - e0 - bdd.levels[n - 1].energy).abs();
            ok &= d <= nu0.levels[n].error_estimate + bdd.levels[n - 1].error_estimate;
            worst = worst.max(d);
        }
        Ok((ok, format!("max |E_n(ν=0) − E0 − E_(n−1)(bdd)| = {worst:e}")))
    }));

    checks.push(run_check(NUMERIC_CHECKS[3], || {
        let mut ok = true;
        let mut worst_rq: f64 = 0.0;
        let mut worst_orth: f64 = 0.0;
        for (_, spec) in &solved {
            let spec = spec.as_ref().map_err(clone_err)?;
            for (i, phi) in spec.wavefunctions_phi.iter().enumerate() {
                let e = spec.levels[i].coarse;
                let rq = (spec.system.rayleigh_quotient(phi) - e).abs() / e.abs().max(1.0);
                worst_rq = worst_rq.max(rq);
                ok &= rq < 1e-8 && phi.sign_changes(1e-9) == i;
                for other in &spec.wavefunctions_phi[..i] {
                    worst_orth = worst_orth.max(spec.system.weighted_inner(phi, other).abs());
                }
            }
        }
        ok &= worst_orth < 1e-8;
        Ok((ok, format!("Rayleigh {worst_rq:e}, orthogonality {worst_orth:e}, nodes = index")))
    }));

    checks.push(run_check(NUMERIC_CHECKS[4], || {
        let nu0 = find(Preset::Weyl).or_else(|| find(Preset::ZhuKroemer)).ok_or(Error::UnknownPreset("weyl".into()))?;
        let nu0 = nu0.as_ref().map_err(clone_err)?;
        let psi0 = ground_state_closed_form(&sys, &grid)?;
        let d = nu0.wavefunctions_psi[0].l2_distance(&psi0);
        Ok((d < 1e-3, format!("‖ψ_numeric − ψ0‖ = {d:e}")))
    }));

    checks.push(run_check(NUMERIC_CHECKS[5], || {
        let sp = solve_superpotential(&sys)?;
        let coarse = Grid::new(grid.x_min(), grid.x_max(), grid.n() / 4)?;
        let residual = |g: &Grid| -> Result<f64> {
            let psi = ground_state_closed_form(&sys, g)?;
            Ok(apply_a(&psi, &sp, &sys)?.max_abs() / psi.max_abs())
        };
        let (r1, r2) = (residual(&coarse)?, residual(&coarse.refined())?);
        let ratio = r1 / r2;
        Ok(((3.3..=4.8).contains(&ratio), format!("max|Aψ0| {r1:.2e} → {r2:.2e}, ratio {ratio:.3}")))
    }));

    checks.push(run_check(NUMERIC_CHECKS[6], || {
        let (hbar, m0, length) = (sys.hbar(), sys.m0(), 2.0);
        let g = Grid::new(0.0, length, 4096)?;
        let e = numerics::eigenvalues(&box_system(hbar, m0, &g)?, 4, &Default::default(), cfg.execution)?;
        let worst = e
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let k = (i + 1) as f64;
                rel(*v, (hbar * std::f64::consts::PI * k / length).powi(2) / (2.0 * m0))
            })
            .fold(0.0, f64::max);
        let table = convergence_study_of(|g| box_system(hbar, m0, g), &Grid::new(0.0, length, 255)?, 3, cfg.execution)?;
        let orders_ok = table.rows.iter().all(|r| (1.9..=2.1).contains(&r.observed_order));
        Ok((worst <= 1e-4 && orders_ok, format!("max rel error {worst:e} at n=4096, orders ≈ 2: {orders_ok}")))
    }));

    checks.push(run_check(NUMERIC_CHECKS[7], || {
        let o = real_presets
            .iter()
            .find(|p| nu_value(&p.params).nu == Some(0.0))
            .ok_or(Error::UnknownPreset("ν=0 preset".into()))?;
        let base = Grid::new(grid.x_min(), grid.x_max(), grid.n() / 4)?;
        let table = convergence_study_of(|g| discretize(&sys, &o.params, g), &base, 1, cfg.execution)?;
        let row = &table.rows[0];
        let exact = sys.kappa();
        let gain = (row.values[2] - exact).abs() / (row.extrapolated - exact).abs().max(f64::MIN_POSITIVE);
        let ok = (1.7..=2.3).contains(&row.observed_order) && gain >= 4.0;
        Ok((ok, format!("observed order {:.3}, Richardson gain {gain:.1}", row.observed_order)))
    }));

    checks.push(run_check(NUMERIC_CHECKS[8], || {
        let o = real_presets.first().ok_or(Error::UnknownPreset("any real preset".into()))?;
        let t = discretize(&sys, &o.params, &grid)?;
        let a = numerics::eigenvalues(&t, k, &Default::default(), Execution::Sequential)?;
        let b = numerics::eigenvalues(&t, k, &Default::default(), Execution::Parallel)?;
        let same = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
        Ok((same, "sequential and parallel bisection are bit-identical".into()))
    }));

    checks
}

fn clone_err(e: &Error) -> Error {
    Error::Parse(e.to_string())
}
