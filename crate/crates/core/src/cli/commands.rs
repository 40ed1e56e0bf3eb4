//! Subcommand bodies. Each returns the exit code on success.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::RunConfig;
use super::output::{json_document, num, Format, Table};
use super::{SweepParam, EXIT_OK, EXIT_VERIFY};
use crate::ambiguity::{nu_value, AmbiguityReport};
use crate::analytic::{ground_state_exponent, ground_state_peak, morse_spectrum, oscillator_spectrum};
use crate::error::{Error, Result};
use crate::massmodel::ExponentialProfile;
use crate::numerics::{solve_spectrum_with, SolveOptions};
use crate::params::{format_exact, parse_exact, Exact, OrderingParams, Preset, SystemConfig};
use crate::susy::{nu0_ambiguity_potential, partner_potential_1, partner_potential_2, solve_superpotential};
use crate::verify::{self, identity_grid, VerifyConfig};

/// Grid size used when `--numeric` or `verify` runs without `--grid`.
pub const DEFAULT_GRID_POINTS: usize = 8192;

fn write_to(path: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::io("<stdout>", e)),
            _ => Ok(()),
        },
    }
}

fn system_json(s: &SystemConfig) -> Value {
    json!({"hbar": s.hbar(), "m0": s.m0(), "c": s.c(), "V0": s.v0()})
}

fn ordering_json(label: &str, o: &OrderingParams) -> Value {
    let mut v = json!({"label": label, "a": o.a(), "alpha": o.alpha(), "beta": o.beta(), "gamma": o.gamma()});
    if let Some(e) = o.exact_values() {
        v["exact"] = json!({
            "a": format_exact(&e.a), "alpha": format_exact(&e.alpha),
            "beta": format_exact(&e.beta), "gamma": format_exact(&e.gamma),
        });
    }
    v
}

fn param_label(exact: Option<Exact>, float: f64) -> String {
    exact.map(|e| format_exact(&e)).unwrap_or_else(|| num(float))
}

fn nu_cell(r: &AmbiguityReport) -> String {
    r.nu.map(num).unwrap_or_else(|| "COMPLEX".into())
}

fn require_real(o: &OrderingParams) -> Result<AmbiguityReport> {
    let r = nu_value(o);
    if !r.is_real() {
        return Err(Error::ComplexOrdering { nu_squared: r.nu_squared });
    }
    Ok(r)
}

pub fn orderings(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let mut entries: Vec<(String, OrderingParams)> =
        Preset::ALL.iter().map(|p| (p.name().to_string(), p.params())).collect();
    if cfg.ordering.preset.is_none() {
        entries.push(("custom".into(), cfg.ordering.params));
    }
    let reports: Vec<AmbiguityReport> = entries.iter().map(|(_, o)| nu_value(o)).collect();
    let text = match cfg.format.unwrap_or(Format::Table) {
        Format::Json => {
            let rows: Vec<Value> = entries
                .iter()
                .zip(&reports)
                .map(|((name, o), r)| {
                    let mut v = ordering_json(name, o);
                    v["q_over_c2"] = json!(r.q_over_c2_label());
                    v["nu_squared"] = json!(r.nu_squared_label());
                    v["nu"] = json!(r.nu);
                    v["classification"] = json!(if r.is_real() { "real" } else { "complex" });
                    v
                })
                .collect();
            json_document("orderings", json!({"orderings": rows}))
        }
        format => {
            let mut t = Table::new(&["name", "a", "alpha", "beta", "gamma", "q_over_c2", "nu_squared", "nu"]);
            for ((name, o), r) in entries.iter().zip(&reports) {
                let cells = match o.exact_values() {
                    Some(e) => [e.a, e.alpha, e.beta, e.gamma].iter().map(format_exact).collect::<Vec<_>>(),
                    None => [o.a(), o.alpha(), o.beta(), o.gamma()].into_iter().map(num).collect(),
                };
                let mut row = vec![name.clone()];
                row.extend(cells);
                row.extend([r.q_over_c2_label(), r.nu_squared_label(), nu_cell(r)]);
                t.push(row);
            }
            if format == Format::Csv { t.csv(cfg.separator) } else { t.pretty() }
        }
    };
    write_to(cfg.out.as_deref(), stdout, &text)?;
    Ok(EXIT_OK)
}

pub fn spectrum(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let (sys, o) = (cfg.system, cfg.ordering.params);
    let report = require_real(&o)?;
    sys.require_bound_states()?;
    let morse = morse_spectrum(&sys, &o, cfg.levels - 1)?;
    let osc = oscillator_spectrum(&sys, &o, cfg.levels - 1)?;
    let numeric = if cfg.numeric {
        let grid = cfg.grid_or_default(DEFAULT_GRID_POINTS)?;
        let opts = SolveOptions { seed: cfg.seed, execution: cfg.execution, vectors: false, ..Default::default() };
        Some(solve_spectrum_with(&sys, &o, &grid, cfg.levels, &opts)?)
    } else {
        None
    };

    let text = match cfg.format.unwrap_or(Format::Table) {
        Format::Json => {
            let levels: Vec<Value> = (0..cfg.levels)
                .map(|n| {
                    let m = morse.levels[n].energy;
                    let mut v = json!({"n": n, "morse": m, "oscillator": osc.levels[n].energy});
                    if let Some(s) = &numeric {
                        let l = &s.levels[n];
                        v["numeric"] = json!(l.energy);
                        v["error_estimate"] = json!(l.error_estimate);
                        v["rel_deviation"] = json!((l.energy - m).abs() / m.abs());
                    }
                    v
                })
                .collect();
            let mut body = json!({
                "seed": cfg.seed,
                "system": system_json(&sys),
                "ordering": ordering_json(&cfg.ordering.label, &o),
                "nu_squared": report.nu_squared_label(),
                "nu": morse.nu,
                "kappa": morse.kappa,
                "levels": levels,
            });
            if let Some(s) = &numeric {
                body["numeric"] = json!({"grid": s.grid_report});
            }
            json_document("spectrum", body)
        }
        format => {
            let mut header = vec!["n", "morse", "oscillator"];
            if numeric.is_some() {
                header.extend(["numeric", "error_estimate", "rel_deviation"]);
            }
            let mut t = Table::new(&header)
                .meta("pdm spectrum")
                .meta(format!(
                    "ordering={} a={} alpha={} beta={} gamma={}",
                    cfg.ordering.label,
                    o.a(),
                    o.alpha(),
                    o.beta(),
                    o.gamma()
                ))
                .meta(format!("hbar={} m0={} c={} V0={}", sys.hbar(), sys.m0(), sys.c(), sys.v0()))
                .meta(format!("nu_squared={} nu={} kappa={}", report.nu_squared_label(), num(morse.nu), num(morse.kappa)));
            if let Some(s) = &numeric {
                let g = s.grid_report.base;
                t = t.meta(format!(
                    "grid={}:{}:{} seed={} boundary_sensitive={}",
                    g.x_min(),
                    g.x_max(),
                    g.n(),
                    cfg.seed,
                    s.grid_report.boundary_sensitive
                ));
            }
            for n in 0..cfg.levels {
                let m = morse.levels[n].energy;
                let mut row = vec![n.to_string(), num(m), num(osc.levels[n].energy)];
                if let Some(s) = &numeric {
                    let l = &s.levels[n];
                    row.extend([num(l.energy), num(l.error_estimate), num((l.energy - m).abs() / m.abs())]);
                }
                t.push(row);
            }
            if format == Format::Csv { t.csv(cfg.separator) } else { t.pretty() }
        }
    };
    write_to(cfg.out.as_deref(), stdout, &text)?;
    Ok(EXIT_OK)
}

#[derive(Clone, Copy, Debug, Default)]
struct Residual {
    abs: f64,
    pointwise: f64,
}

impl Residual {
    fn add(&mut self, diff: f64, scale: f64) {
        self.abs = self.abs.max(diff.abs());
        self.pointwise = self.pointwise.max(diff.abs() / scale);
    }
}

pub fn susy(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let sys = cfg.system;
    let sp = solve_superpotential(&sys)?;
    let grid = cfg.grid.unwrap_or_else(|| identity_grid(&sys));
    let profile = ExponentialProfile::new(sys);
    let peak = ground_state_exponent(&sys, ground_state_peak(&sys));

    let mut t = Table::new(&["x", "m", "V", "U_nu0", "W", "V1", "V2", "psi0"])
        .meta("pdm susy")
        .meta(format!("hbar={} m0={} c={} V0={}", sys.hbar(), sys.m0(), sys.c(), sys.v0()))
        .meta(format!("w_plus={} w_minus={} E0={}", num(sp.w_plus), num(sp.w_minus), num(sp.e0)))
        .meta("psi0 is scaled to 1 at its maximum");
    let (mut r1, mut r2, mut vmax) = (Residual::default(), Residual::default(), 0.0f64);
    for x in grid.points() {
        let (v, u) = (profile.bare_potential(x), nu0_ambiguity_potential(&sys, x));
        let (v1, v2) = (partner_potential_1(&sp, &sys, x), partner_potential_2(&sp, &sys, x));
        let scale = v.abs() + u.abs() + sp.e0.abs();
        r1.add(v1 + sp.e0 - v - u, scale);
        r2.add(v2 - v, scale);
        vmax = vmax.max(v.abs());
        let psi0 = (ground_state_exponent(&sys, x) - peak).exp();
        t.push([x, profile.mass(x), v, u, sp.value(&sys, x), v1, v2, psi0].into_iter().map(num).collect());
    }
    let ground = morse_spectrum(&sys, &Preset::Weyl.params(), 0)?.levels[0].energy;

    let csv_path = cfg.out.as_ref().map(|p| if p.extension().is_some_and(|e| e == "json") { p.with_extension("csv") } else { p.clone() });
    let json_path: Option<PathBuf> = csv_path.as_ref().map(|p| p.with_extension("json"));
    let summary = json_document(
        "susy",
        json!({
            "seed": cfg.seed,
            "system": system_json(&sys),
            "grid": grid,
            "w_plus": sp.w_plus,
            "w_minus": sp.w_minus,
            "E0": sp.e0,
            "analytic_ground_level": ground,
            "superpotential_node": sp.node(&sys),
            "identity_residuals": {
                "v2_minus_v": r2.abs / vmax,
                "v1_plus_e0_minus_v_minus_u_nu0": r1.abs / vmax,
                "scale": "max|V| on grid",
                "pointwise_relative": {
                    "v2_minus_v": r2.pointwise,
                    "v1_plus_e0_minus_v_minus_u_nu0": r1.pointwise,
                    "scale": "|V| + |U_nu0| + E0 at each point",
                },
            },
            "csv": csv_path,
        }),
    );
    let csv = t.csv(cfg.separator);
    let format = cfg.format.unwrap_or(Format::Csv);
    match (&csv_path, &json_path) {
        (Some(c), Some(j)) => {
            write_to(Some(c), stdout, &csv)?;
            write_to(Some(j), stdout, &summary)?;
            let note = match format {
                Format::Json => summary,
                _ => format!("wrote {} and {}\nE0={} max|V2-V|/max|V|={:e} max|V1+E0-V-U_nu0|/max|V|={:e}\n",
                    c.display(), j.display(), num(sp.e0), r2.abs / vmax, r1.abs / vmax),
            };
            write_to(None, stdout, &note)?;
        }
        _ => {
            let text = match format {
                Format::Json => summary,
                _ => csv,
            };
            write_to(None, stdout, &text)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn verify(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let vcfg = VerifyConfig {
        system: cfg.system,
        grid: cfg.grid_or_default(DEFAULT_GRID_POINTS)?,
        seed: cfg.seed,
        execution: cfg.execution,
        ..Default::default()
    };
    let report = verify::run(&vcfg);
    let status = if report.all_passed() {
        "ok"
    } else if report.degraded {
        "degraded"
    } else {
        "failed"
    };
    let text = match cfg.format.unwrap_or(Format::Table) {
        Format::Json => json_document(
            "verify",
            json!({
                "seed": cfg.seed,
                "system": system_json(&cfg.system),
                "grid": vcfg.grid,
                "status": status,
                "degraded": report.degraded,
                "checks": report.checks,
            }),
        ),
        format => {
            let g = vcfg.grid;
            let mut t = Table::new(&["check", "result", "detail"])
                .meta(format!("pdm verify status={status}"))
                .meta(format!("grid={}:{}:{} seed={}", g.x_min(), g.x_max(), g.n(), cfg.seed));
            for c in &report.checks {
                t.push(vec![c.name.into(), if c.passed { "pass" } else { "FAIL" }.into(), c.detail.clone()]);
            }
            if format == Format::Csv { t.csv(cfg.separator) } else { t.pretty() }
        }
    };
    write_to(cfg.out.as_deref(), stdout, &text)?;
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_VERIFY })
}

/// One sweep value: the float used for computation and, when the range
/// bounds were exact, the exact rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepValue {
    pub value: f64,
    pub exact: Option<Exact>,
}

/// `start:end:count`, evenly spaced and inclusive of both ends.
pub fn parse_range(s: &str) -> Result<Vec<SweepValue>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let bad = || Error::Parse(format!("range must be start:end:count, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(Error::Parse("range count must be at least 1".into()));
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let end: f64 = parts[1].parse().map_err(|_| bad())?;
    if !(start.is_finite() && end.is_finite()) {
        return Err(bad());
    }
    let exact = parse_exact(parts[0]).zip(parse_exact(parts[1]));
    let steps = (count.max(2) - 1) as i128;
    Ok((0..count)
        .map(|i| match exact {
            Some((a, b)) => {
                let q = a + (b - a) * Exact::new(i as i128, steps);
                SweepValue { value: crate::params::to_f64(q), exact: Some(q) }
            }
            None => SweepValue { value: start + (end - start) * i as f64 / steps as f64, exact: None },
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
struct SweepRow {
    value: SweepValue,
    report: Option<AmbiguityReport>,
    kappa: Option<f64>,
    levels: Vec<f64>,
    status: &'static str,
}

fn sweep_ordering(base: &OrderingParams, param: SweepParam, v: SweepValue) -> Result<OrderingParams> {
    if let (Some(e), Some(q)) = (base.exact_values(), v.exact) {
        let (a, alpha, gamma) = match param {
            SweepParam::A => (q, e.alpha, e.gamma),
            SweepParam::Alpha => (e.a, q, e.gamma),
            _ => (e.a, e.alpha, q),
        };
        return OrderingParams::exact_from_a_alpha_gamma(a, alpha, gamma);
    }
    let (a, alpha, gamma) = match param {
        SweepParam::A => (v.value, base.alpha(), base.gamma()),
        SweepParam::Alpha => (base.a(), v.value, base.gamma()),
        _ => (base.a(), base.alpha(), v.value),
    };
    OrderingParams::from_a_alpha_gamma(a, alpha, gamma)
}

fn sweep_row(cfg: &RunConfig, param: SweepParam, v: SweepValue) -> Result<SweepRow> {
    let base = cfg.system;
    let (system, ordering) = match param {
        SweepParam::V0 => (base.with_v0(v.value)?, cfg.ordering.params),
        SweepParam::C => (base.with_c(v.value)?, cfg.ordering.params),
        SweepParam::M0 => (base.with_m0(v.value)?, cfg.ordering.params),
        _ => match sweep_ordering(&cfg.ordering.params, param, v) {
            Ok(o) => (base, o),
            Err(Error::DegenerateOrdering) => {
                return Ok(SweepRow { value: v, report: None, kappa: None, levels: vec![], status: "DEGENERATE" })
            }
            Err(e) => return Err(e),
        },
    };
    let report = nu_value(&ordering);
    let kappa = (system.v0() > 0.0).then(|| system.kappa());
    let (levels, status) = if !report.is_real() {
        (vec![], "COMPLEX")
    } else if kappa.is_none() {
        (vec![], "NO_BOUND_STATES")
    } else {
        (morse_spectrum(&system, &ordering, cfg.levels - 1)?.energies(), "ok")
    };
    Ok(SweepRow { value: v, report: Some(report), kappa, levels, status })
}

pub fn sweep(cfg: &RunConfig, param: SweepParam, range: &str, stdout: &mut dyn Write) -> Result<i32> {
    let values = parse_range(range)?;
    let rows: Vec<SweepRow> =
        cfg.execution.map_slice(&values, |v| sweep_row(cfg, param, *v)).into_iter().collect::<Result<_>>()?;
    let name = param.name();
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "value": r.value.value,
                        "value_exact": r.value.exact.map(|e| format_exact(&e)),
                        "nu_squared": r.report.as_ref().map(|x| x.nu_squared_label()),
                        "nu": r.report.as_ref().and_then(|x| x.nu),
                        "kappa": r.kappa,
                        "status": r.status,
                        "levels": r.levels,
                    })
                })
                .collect();
            json_document(
                "sweep",
                json!({
                    "seed": cfg.seed,
                    "param": name,
                    "range": range,
                    "system": system_json(&cfg.system),
                    "ordering": ordering_json(&cfg.ordering.label, &cfg.ordering.params),
                    "rows": rows,
                }),
            )
        }
        format => {
            let exact_col = format!("{name}_exact");
            let level_cols: Vec<String> = (0..cfg.levels).map(|n| format!("E_{n}")).collect();
            let mut header = vec![name, exact_col.as_str(), "nu_squared", "nu", "status", "kappa"];
            header.extend(level_cols.iter().map(String::as_str));
            let mut t = Table::new(&header)
                .meta(format!("pdm sweep param={name} range={range}"))
                .meta(format!("ordering={} hbar={} m0={} c={} V0={}", cfg.ordering.label, cfg.system.hbar(), cfg.system.m0(), cfg.system.c(), cfg.system.v0()));
            for r in &rows {
                let mut row = vec![
                    num(r.value.value),
                    param_label(r.value.exact, r.value.value),
                    r.report.as_ref().map(|x| x.nu_squared_label()).unwrap_or_default(),
                    r.report.as_ref().and_then(|x| x.nu).map(num).unwrap_or_default(),
                    r.status.to_string(),
                    r.kappa.map(num).unwrap_or_default(),
                ];
                row.extend((0..cfg.levels).map(|n| r.levels.get(n).copied().map(num).unwrap_or_default()));
                t.push(row);
            }
            if format == Format::Csv { t.csv(cfg.separator) } else { t.pretty() }
        }
    };
    write_to(cfg.out.as_deref(), stdout, &text)?;
    Ok(EXIT_OK)
}
