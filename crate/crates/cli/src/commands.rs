//! The four subcommands: identity verification over a sampled grid, grid
//! export for plotting, the scalar summary report, and the two-charge
//! energy check.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use phlo_core::coulomb;
use phlo_core::eed;
use phlo_core::fields::{Event, QuadratureSpec, Region, Rule};
use phlo_core::frobenius;
use phlo_core::phlo::{self, PhLOSolution, TransversePhase};
use phlo_core::strain;

use crate::config::RunConfig;
use crate::Format;

/// One verification entry: the largest violation found, where, and the
/// allowed tolerance.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub max: f64,
    pub at: Option<Event>,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max <= self.tol
    }

    pub fn machine_line(&self) -> String {
        let at = match self.at {
            Some(p) => format!("({:.6},{:.6},{:.6},{:.6})", p.x, p.y, p.z, p.xi),
            None => "(-)".to_string(),
        };
        format!(
            "CHECK name={} max={:.6e} at={} tol={:.3e} status={}",
            self.name,
            self.max,
            at,
            self.tol,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

struct Tracker {
    name: &'static str,
    max: f64,
    at: Option<Event>,
    tol: f64,
}

impl Tracker {
    fn new(name: &'static str, tol: f64) -> Tracker {
        Tracker {
            name,
            max: 0.0,
            at: None,
            tol,
        }
    }

    fn update(&mut self, value: f64, at: Event) {
        if value.abs() > self.max || self.at.is_none() {
            self.max = value.abs();
            self.at = Some(at);
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            max: self.max,
            at: self.at,
            tol: self.tol,
        }
    }
}

fn build_from_config(cfg: &RunConfig) -> Result<PhLOSolution> {
    let phase_l0 = cfg.psi_l0.unwrap_or(cfg.solution.l0);
    phlo::build_solution_with(&cfg.solution, &TransversePhase::zero(), phase_l0)
        .context("cannot build the solution")
}

/// Every sampled point of the grid, with a coarser deterministic subsample
/// of the solution's support for the heavier identity batteries.
fn samples(cfg: &RunConfig, sol: &PhLOSolution) -> (Vec<Event>, Vec<Event>) {
    let all = cfg.grid.events();
    let phi = sol.phi();
    let support: Vec<Event> = all
        .iter()
        .copied()
        .filter(|&p| phi.value(p) > 1e-3 * cfg.solution.amplitude)
        .collect();
    let stride = (support.len() / 24).max(1);
    let heavy: Vec<Event> = support.iter().copied().step_by(stride).collect();
    (all, heavy)
}

/// Run the verification suites; returns the checks in a fixed order.
pub fn run_verify(cfg: &RunConfig, tol_scale: f64) -> Result<Vec<Check>> {
    let sol = build_from_config(cfg)?;
    let spec = &cfg.solution;
    let scale = spec.amplitude.max(1.0);
    let tol = |base: f64| base * scale * cfg.tolerance_scale * tol_scale;

    let (all, heavy) = samples(cfg, &sol);
    if heavy.is_empty() {
        bail!("the sampling grid misses the solution support entirely");
    }
    let frame = sol.frame();
    let state = sol.to_eb_state();
    let set = frobenius::build_projections(&sol.u, &sol.p, sol.epsilon());

    let mut checks = Vec::new();

    // equations of motion, scalar residuals over the full grid
    let mut t = Tracker::new("motion-residual-scalar", tol(1e-10));
    for &p in &all {
        let (ru, rp) = phlo::motion_residual_scalar(&sol, p);
        t.update(ru.max(rp), p);
    }
    checks.push(t.finish());

    // form residuals and the dual equation on the support subsample
    let mut t = Tracker::new("motion-residual-form", tol(1e-10));
    for &p in &heavy {
        t.update(phlo::motion_residual_form(&sol, p)?.max_abs(), p);
        t.update(phlo::dual_motion_residual_form(&sol, p)?.max_abs(), p);
    }
    checks.push(t.finish());

    // three-vector balance residuals over the full grid
    let mut t = Tracker::new("balance-residuals", tol(1e-10));
    for &p in &all {
        t.update(eed::residual_report(&state, p).max_abs, p);
    }
    checks.push(t.finish());

    // structural properties of nonlinear solutions
    let report = eed::property_suite(&state, &heavy, 2.0, -1.0);
    checks.push(Check {
        name: "solution-properties",
        max: report.max_violation(),
        at: None,
        tol: tol(1e-10),
    });

    // phase rate and scale recovery on the support
    let want_rate = sol.kappa() / spec.l0;
    let mut t = Tracker::new("phase-rate", tol(1e-10) * (1.0 / spec.l0).max(1.0));
    let mut s = Tracker::new("scale-recovery", 1e-8 * cfg.tolerance_scale * tol_scale);
    for &p in &heavy {
        t.update(frobenius::phase_rate(&frame, p)? - want_rate, p);
        let l0sq = frobenius::l0_squared(&frame, p)?;
        s.update((l0sq - spec.l0 * spec.l0) / (spec.l0 * spec.l0), p);
    }
    checks.push(t.finish());
    checks.push(s.finish());

    // curvature, strain and exchange identity batteries
    let mut curop = Tracker::new("curvature-energy-relations", tol(1e-9));
    let mut contr = Tracker::new("strain-contractions", tol(1e-9));
    let mut flux = Tracker::new("strain-flux", tol(1e-8));
    for &p in &heavy {
        for c in frobenius::curvature_energy_relations(&frame, p)? {
            curop.update(c.mismatch, p);
        }
        for c in strain::strain_contractions(&frame, p) {
            contr.update(c.mismatch, p);
        }
        flux.update(strain::strain_flux(&frame, p)?.max_mismatch(), p);
    }
    checks.push(curop.finish());
    checks.push(contr.finish());
    checks.push(flux.finish());

    // null structure and projection annihilation
    let mut nulls = Tracker::new("null-structure", tol(1e-13) * scale);
    let mut annihilation = Tracker::new("projection-annihilation", tol(1e-12));
    let mut idem = Tracker::new("projection-idempotency", tol(1e-12));
    for &p in &heavy {
        let fv = frame.g_form().value(p);
        let dual = fv.hodge();
        nulls.update(fv.wedge(&fv)?.max_abs(), p);
        nulls.update(fv.wedge(&dual)?.max_abs(), p);
        nulls.update(dual.wedge(&dual)?.max_abs(), p);
        for proj in [&set.v, &set.h, &set.v_tilde, &set.h_tilde] {
            let m = proj.value(p);
            idem.update(proj.idempotency_residual(p), p);
            for w in [&fv, &dual] {
                annihilation.update(frobenius::project_form2(m, w).max_abs(), p);
            }
        }
    }
    checks.push(nulls.finish());
    checks.push(annihilation.finish());
    checks.push(idem.finish());

    // energy tensor divergence routes on a handful of interior points
    let mut routes = Tracker::new("energy-divergence-routes", tol(1e-9));
    let f = frame.g_form();
    for &p in heavy.iter().take(8) {
        let d = phlo_core::stress::energy_divergence(&f, p, 1e-3)?;
        for mu in 0..4 {
            routes.update(d.contraction[mu] - d.codifferential[mu], p);
        }
    }
    checks.push(routes.finish());

    Ok(checks)
}

pub fn render_verify(checks: &[Check]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<30} {:>12} {:>10}  {:<6}",
        "identity", "max", "tol", "status"
    );
    for c in checks {
        let _ = writeln!(
            out,
            "{:<30} {:>12.3e} {:>10.1e}  {}",
            c.name,
            c.max,
            c.tol,
            if c.passed() { "PASS" } else { "FAIL" }
        );
    }
    for c in checks {
        let _ = writeln!(out, "{}", c.machine_line());
    }
    out
}

pub fn verify_to_json(checks: &[Check]) -> serde_json::Value {
    serde_json::Value::Array(
        checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "max_violation": c.max,
                    "tolerance": c.tol,
                    "status": if c.passed() { "PASS" } else { "FAIL" },
                    "location": c.at.map(|p| vec![p.x, p.y, p.z, p.xi]),
                })
            })
            .collect(),
    )
}

/// Grid export: one row per event with the transverse pair, energy density,
/// phase and curvature factor.
pub fn run_export(cfg: &RunConfig, format: Format, out: &Path) -> Result<()> {
    let sol = build_from_config(cfg)?;
    let frame = sol.frame();
    let events = cfg.grid.events();
    let row = |p: Event| -> [f64; 9] {
        let u = sol.u.value(p);
        let v = sol.p.value(p);
        let (phi, psi) = phlo::amplitude_phase(u, v);
        let r = frobenius::curvature_factor(&frame, p);
        [
            p.x,
            p.y,
            p.z,
            p.xi,
            u,
            v,
            phi * phi,
            psi.unwrap_or(f64::NAN),
            r,
        ]
    };
    match format {
        Format::Csv => {
            let mut text = String::from("x,y,z,xi,u,p,phi2,psi,R\n");
            for &p in &events {
                let r = row(p);
                let mut first = true;
                for v in r {
                    if !first {
                        text.push(',');
                    }
                    let _ = write!(text, "{v}");
                    first = false;
                }
                text.push('\n');
            }
            std::fs::write(out, text)
                .with_context(|| format!("cannot write {}", out.display()))?;
        }
        Format::Vtk => {
            write_vtk_slices(cfg, &sol, out)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = events
                .iter()
                .map(|&p| {
                    let r = row(p);
                    serde_json::json!({
                        "x": r[0], "y": r[1], "z": r[2], "xi": r[3],
                        "u": r[4], "p": r[5], "phi2": r[6],
                        "psi": if r[7].is_nan() { None } else { Some(r[7]) },
                        "R": r[8],
                    })
                })
                .collect();
            std::fs::write(out, serde_json::to_string_pretty(&rows)?)
                .with_context(|| format!("cannot write {}", out.display()))?;
        }
    }
    Ok(())
}

/// Legacy structured-points files, one per time slice.
fn write_vtk_slices(cfg: &RunConfig, sol: &PhLOSolution, out: &Path) -> Result<()> {
    let frame = sol.frame();
    let g = &cfg.grid;
    let slices: Vec<f64> = g.xi.points().collect();
    for (index, &xi) in slices.iter().enumerate() {
        let path = if slices.len() == 1 {
            out.to_path_buf()
        } else {
            let stem = out
                .file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "export".to_string());
            let ext = out
                .extension()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "vtk".to_string());
            out.with_file_name(format!("{stem}_{index:03}.{ext}"))
        };
        let mut text = String::new();
        let _ = writeln!(text, "# vtk DataFile Version 3.0");
        let _ = writeln!(text, "helical field slice xi={xi}");
        let _ = writeln!(text, "ASCII");
        let _ = writeln!(text, "DATASET STRUCTURED_POINTS");
        let _ = writeln!(text, "DIMENSIONS {} {} {}", g.x.count, g.y.count, g.z.count);
        let _ = writeln!(text, "ORIGIN {} {} {}", g.x.min, g.y.min, g.z.min);
        let _ = writeln!(text, "SPACING {} {} {}", g.x.step(), g.y.step(), g.z.step());
        let _ = writeln!(text, "POINT_DATA {}", g.x.count * g.y.count * g.z.count);
        for (name, pick) in [
            ("u", 0usize),
            ("p", 1),
            ("phi2", 2),
            ("psi", 3),
            ("R", 4),
        ] {
            let _ = writeln!(text, "SCALARS {name} double 1");
            let _ = writeln!(text, "LOOKUP_TABLE default");
            for z in g.z.points() {
                for y in g.y.points() {
                    for x in g.x.points() {
                        let p = Event::new(x, y, z, xi);
                        let u = sol.u.value(p);
                        let v = sol.p.value(p);
                        let value = match pick {
                            0 => u,
                            1 => v,
                            2 => u * u + v * v,
                            3 => phlo::amplitude_phase(u, v).1.unwrap_or(f64::NAN),
                            _ => frobenius::curvature_factor(&frame, p),
                        };
                        let _ = writeln!(text, "{value}");
                    }
                }
            }
        }
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

/// The scalar summary: energy, period, action (three routes), recovered
/// scale, helicity and orientation.
pub fn run_report(cfg: &RunConfig) -> Result<(String, serde_json::Value)> {
    let sol = build_from_config(cfg)?;
    let spec = &cfg.solution;
    let quad = cfg.quad;
    let pa = phlo::planck_action(&sol, &quad).context("energy quadrature failed")?;
    let four = phlo::action_four_volume(&sol, &quad, 21)?;
    let four_vs_et = (four - pa.orientation * pa.action).abs() / pa.action;

    // recovered scale: mean over a support sample
    let frame = sol.frame();
    let sample = phlo::interior_sample(&sol, 5, 0.0);
    let mut acc = 0.0;
    for &p in &sample {
        acc += frobenius::l0_squared(&frame, p)?.sqrt();
    }
    let recovered_l0 = acc / sample.len() as f64;

    // helicity of the electric component with the canonical scale
    let hel_quad = QuadratureSpec {
        region: Region::Box(sol.support_box(0.0)),
        rule: Rule::Simpson,
        resolution: quad.resolution,
    };
    let state = sol.to_eb_state();
    let helicity =
        phlo::action_from_helicity(&state, spec.l0, spec.light_speed, &hel_quad, 0.0)?;

    let mut out = String::new();
    let _ = writeln!(out, "energy                E  = {:.9}", pa.energy);
    let _ = writeln!(out, "period                T  = {:.9}", pa.period);
    let _ = writeln!(out, "action                ET = {:.9}", pa.action);
    let _ = writeln!(out, "four-volume action       = {:.9}", four);
    let _ = writeln!(out, "  relative difference    = {:.3e}", four_vs_et);
    let _ = writeln!(out, "recovered length scale   = {:.9}", recovered_l0);
    let _ = writeln!(
        out,
        "  configured value       = {:.9} (relative difference {:.3e})",
        spec.l0,
        (recovered_l0 - spec.l0).abs() / spec.l0
    );
    let _ = writeln!(out, "integral helicity        = {:.9}", helicity);
    let _ = writeln!(out, "orientation (eps kappa)  = {:+.0}", pa.orientation);
    let _ = writeln!(out, "VALUE energy={:.12e}", pa.energy);
    let _ = writeln!(out, "VALUE period={:.12e}", pa.period);
    let _ = writeln!(out, "VALUE action={:.12e}", pa.action);
    let _ = writeln!(out, "VALUE action_four_volume={:.12e}", four);
    let _ = writeln!(out, "VALUE recovered_l0={:.12e}", recovered_l0);
    let _ = writeln!(out, "VALUE helicity={:.12e}", helicity);
    let _ = writeln!(out, "VALUE orientation={:+.0}", pa.orientation);

    let json = serde_json::json!({
        "energy": pa.energy,
        "period": pa.period,
        "action": pa.action,
        "action_four_volume": four,
        "recovered_l0": recovered_l0,
        "helicity": helicity,
        "orientation": pa.orientation,
    });
    Ok((out, json))
}

/// The two-charge energy summary.
pub fn run_coulomb(cfg: &RunConfig) -> Result<(String, serde_json::Value)> {
    let quad = cfg.coulomb_quadrature();
    let e = coulomb::interaction_energy(&cfg.coulomb.charges, &quad)?;
    let mut out = String::new();
    let _ = writeln!(out, "box integral             = {:.9}", e.boxed);
    let _ = writeln!(out, "truncation estimate      = {:.9}", e.exterior);
    let _ = writeln!(out, "U numeric                = {:.9}", e.total());
    let _ = writeln!(out, "U closed form            = {:.9}", e.closed_form);
    let _ = writeln!(out, "relative error           = {:.3e}", e.relative_error());
    let _ = writeln!(
        out,
        "box-only relative error  = {:.3e}",
        e.box_relative_error()
    );
    let _ = writeln!(out, "VALUE u_box={:.12e}", e.boxed);
    let _ = writeln!(out, "VALUE truncation_estimate={:.12e}", e.exterior);
    let _ = writeln!(out, "VALUE u_numeric={:.12e}", e.total());
    let _ = writeln!(out, "VALUE u_closed={:.12e}", e.closed_form);
    let _ = writeln!(out, "VALUE relative_error={:.12e}", e.relative_error());
    let json = serde_json::json!({
        "u_box": e.boxed,
        "truncation_estimate": e.exterior,
        "u_numeric": e.total(),
        "u_closed": e.closed_form,
        "relative_error": e.relative_error(),
        "box_relative_error": e.box_relative_error(),
    });
    Ok((out, json))
}
