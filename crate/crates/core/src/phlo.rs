//! Construction of spatially finite helical solutions: compactly supported
//! amplitude on a disk times a longitudinal window, a linearly advancing
//! phase, the equations of motion and their residuals, the amplitude-phase
//! reduction, integral energy, the action of one rotation period, and the
//! screwline geometry.

use std::collections::HashMap;
use std::sync::Arc;

use crate::eed::EBState;
use crate::error::{Error, Result};
use crate::fields::{
    integrate3, rule_nodes, Axis, Box3, Event, QuadratureSpec, Region, Rule, ScalarField,
    VectorField, DEFAULT_LIGHT_SPEED,
};
use crate::frobenius::PhLOFrame;
use crate::geometry::{self, ext_d, wedge, FormValue, KForm};

/// Which of the two phase families the builder uses: a longitudinal phase
/// advancing in `z`, or a temporal phase advancing in `xi`. Both satisfy the
/// same phase-rate equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseFamily {
    Psi1,
    Psi2,
}

/// Full parameterization of a helical solution.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolutionSpec {
    /// Direction sign of the null propagation axis.
    pub epsilon: i8,
    /// Orientation of the rotational component.
    pub kappa: i8,
    /// Intrinsic length scale; the longitudinal window is four times it.
    pub l0: f64,
    /// Peak amplitude.
    pub amplitude: f64,
    /// Disk center in the transverse plane.
    pub center: [f64; 2],
    /// Disk radius.
    pub disk_radius: f64,
    /// Start of the longitudinal window in the running-wave argument
    /// `xi + eps z`.
    pub window_start: f64,
    #[serde(default = "default_family")]
    pub phase_family: PhaseFamily,
    /// Constant phase offset.
    #[serde(default)]
    pub phase_offset: f64,
    #[serde(default = "default_light_speed")]
    pub light_speed: f64,
}

fn default_family() -> PhaseFamily {
    PhaseFamily::Psi1
}

fn default_light_speed() -> f64 {
    DEFAULT_LIGHT_SPEED
}

impl Default for SolutionSpec {
    fn default() -> Self {
        SolutionSpec {
            epsilon: 1,
            kappa: 1,
            l0: 1.0,
            amplitude: 1.0,
            center: [0.0, 0.0],
            disk_radius: 1.0,
            window_start: 0.0,
            phase_family: PhaseFamily::Psi1,
            phase_offset: 0.0,
            light_speed: DEFAULT_LIGHT_SPEED,
        }
    }
}

impl SolutionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon != 1 && self.epsilon != -1 {
            return Err(Error::BadConfig(format!(
                "direction sign must be +-1, got {}",
                self.epsilon
            )));
        }
        if self.kappa != 1 && self.kappa != -1 {
            return Err(Error::BadConfig(format!(
                "rotation sign must be +-1, got {}",
                self.kappa
            )));
        }
        for (name, v) in [
            ("l0", self.l0),
            ("amplitude", self.amplitude),
            ("disk_radius", self.disk_radius),
            ("light_speed", self.light_speed),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::BadConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.window_start.is_finite()
            || !self.center.iter().all(|c| c.is_finite())
            || !self.phase_offset.is_finite()
        {
            return Err(Error::BadConfig("non-finite solution parameter".into()));
        }
        Ok(())
    }

    /// Longitudinal window length, four length scales.
    pub fn window_length(&self) -> f64 {
        4.0 * self.l0
    }

    /// Rotation period, the window length over the propagation speed.
    pub fn period(&self) -> f64 {
        4.0 * self.l0 / self.light_speed
    }

    /// Flat key-value serialization.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        vec![
            ("epsilon".into(), self.epsilon.to_string()),
            ("kappa".into(), self.kappa.to_string()),
            ("l0".into(), self.l0.to_string()),
            ("amplitude".into(), self.amplitude.to_string()),
            ("center_x".into(), self.center[0].to_string()),
            ("center_y".into(), self.center[1].to_string()),
            ("disk_radius".into(), self.disk_radius.to_string()),
            ("window_start".into(), self.window_start.to_string()),
            (
                "phase_family".into(),
                match self.phase_family {
                    PhaseFamily::Psi1 => "psi1".into(),
                    PhaseFamily::Psi2 => "psi2".into(),
                },
            ),
            ("phase_offset".into(), self.phase_offset.to_string()),
            ("light_speed".into(), self.light_speed.to_string()),
        ]
    }

    /// Parse from flat key-value pairs; missing keys fall back to defaults.
    pub fn from_pairs(pairs: &HashMap<String, String>) -> Result<SolutionSpec> {
        let mut spec = SolutionSpec::default();
        let num = |key: &str, target: &mut f64| -> Result<()> {
            if let Some(v) = pairs.get(key) {
                *target = v
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::BadConfig(format!("bad number for {key}: {v}")))?;
            }
            Ok(())
        };
        let sign = |key: &str, target: &mut i8| -> Result<()> {
            if let Some(v) = pairs.get(key) {
                *target = v
                    .trim()
                    .parse::<i8>()
                    .map_err(|_| Error::BadConfig(format!("bad sign for {key}: {v}")))?;
            }
            Ok(())
        };
        sign("epsilon", &mut spec.epsilon)?;
        sign("kappa", &mut spec.kappa)?;
        num("l0", &mut spec.l0)?;
        num("amplitude", &mut spec.amplitude)?;
        num("center_x", &mut spec.center[0])?;
        num("center_y", &mut spec.center[1])?;
        num("disk_radius", &mut spec.disk_radius)?;
        num("window_start", &mut spec.window_start)?;
        num("phase_offset", &mut spec.phase_offset)?;
        num("light_speed", &mut spec.light_speed)?;
        if let Some(v) = pairs.get("phase_family") {
            spec.phase_family = match v.trim() {
                "psi1" => PhaseFamily::Psi1,
                "psi2" => PhaseFamily::Psi2,
                other => return Err(Error::BadConfig(format!("unknown phase family {other}"))),
            };
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Smooth compactly supported bump of the unit interval argument,
/// `exp(1 - 1/(1 - s^2))` inside `|s| < 1`, zero outside, peak one at zero.
fn unit_bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

fn unit_bump_deriv(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let one_minus = 1.0 - s * s;
        unit_bump(s) * (-2.0 * s / (one_minus * one_minus))
    } else {
        0.0
    }
}

/// Radially symmetric bump on the disk of radius `r0` around `(a, b)`,
/// normalized to peak one at the center.
pub fn bump_disk(x: f64, y: f64, a: f64, b: f64, r0: f64) -> f64 {
    let s2 = ((x - a) * (x - a) + (y - b) * (y - b)) / (r0 * r0);
    if s2 < 1.0 {
        (1.0 - 1.0 / (1.0 - s2)).exp()
    } else {
        0.0
    }
}

/// Transverse gradient of `bump_disk`, smooth through the center.
pub fn bump_disk_grad(x: f64, y: f64, a: f64, b: f64, r0: f64) -> [f64; 2] {
    let dx = x - a;
    let dy = y - b;
    let s2 = (dx * dx + dy * dy) / (r0 * r0);
    if s2 < 1.0 {
        let one_minus = 1.0 - s2;
        let factor = -2.0 * bump_disk(x, y, a, b, r0) / (r0 * r0 * one_minus * one_minus);
        [factor * dx, factor * dy]
    } else {
        [0.0, 0.0]
    }
}

/// Bump of the interval `(start, start + length)` in a scalar argument,
/// peak one at the midpoint.
pub fn bump_interval(w: f64, start: f64, length: f64) -> f64 {
    unit_bump(2.0 * (w - start) / length - 1.0)
}

/// Derivative of `bump_interval` in its argument.
pub fn bump_interval_deriv(w: f64, start: f64, length: f64) -> f64 {
    unit_bump_deriv(2.0 * (w - start) / length - 1.0) * 2.0 / length
}

type Phase3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type Phase3Grad = Arc<dyn Fn(f64, f64, f64) -> [f64; 3] + Send + Sync>;

/// A smooth phase offset depending on the transverse coordinates and the
/// running-wave argument, with its analytic gradient in those three slots.
#[derive(Clone)]
pub struct TransversePhase {
    eval: Phase3,
    grad: Phase3Grad,
}

impl TransversePhase {
    pub fn new<F, G>(eval: F, grad: G) -> TransversePhase
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64, f64) -> [f64; 3] + Send + Sync + 'static,
    {
        TransversePhase {
            eval: Arc::new(eval),
            grad: Arc::new(grad),
        }
    }

    pub fn zero() -> TransversePhase {
        TransversePhase::new(|_, _, _| 0.0, |_, _, _| [0.0; 3])
    }
}

/// A built helical solution: the transverse pair with analytic gradients and
/// the generating parameters.
#[derive(Clone)]
pub struct PhLOSolution {
    pub u: ScalarField,
    pub p: ScalarField,
    spec: SolutionSpec,
}

impl std::fmt::Debug for PhLOSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhLOSolution").field("spec", &self.spec).finish()
    }
}

/// Build the solution for a parameter set.
pub fn build_solution(spec: &SolutionSpec) -> Result<PhLOSolution> {
    build_solution_with(spec, &TransversePhase::zero(), spec.l0)
}

/// Build with a custom transverse phase offset and an independent length
/// scale for the phase advance. A mismatched phase scale yields a field that
/// is not a solution; the residual evaluators quantify by how much.
pub fn build_solution_with(
    spec: &SolutionSpec,
    offset: &TransversePhase,
    phase_l0: f64,
) -> Result<PhLOSolution> {
    spec.validate()?;
    if !(phase_l0 > 0.0) {
        return Err(Error::BadConfig(format!(
            "phase length scale must be positive, got {phase_l0}"
        )));
    }
    let eps = spec.epsilon as f64;
    let kappa = spec.kappa as f64;

    let amplitude = amplitude_field(spec);
    let family = spec.phase_family;
    let off_eval = offset.eval.clone();
    let off_grad = offset.grad.clone();
    let const_offset = spec.phase_offset;
    let phase = ScalarField::from_fn_with_grad(
        move |q| {
            let w = q.xi + eps * q.z;
            let linear = match family {
                PhaseFamily::Psi1 => -(eps * kappa / phase_l0) * q.z,
                PhaseFamily::Psi2 => (kappa / phase_l0) * q.xi,
            };
            linear + const_offset + off_eval(q.x, q.y, w)
        },
        move |q| {
            let w = q.xi + eps * q.z;
            let g = off_grad(q.x, q.y, w);
            match family {
                PhaseFamily::Psi1 => [g[0], g[1], -(eps * kappa / phase_l0) + eps * g[2], g[2]],
                PhaseFamily::Psi2 => [g[0], g[1], eps * g[2], kappa / phase_l0 + g[2]],
            }
        },
    );

    let u = &amplitude * &phase.cos();
    let p = &amplitude * &phase.sin();
    Ok(PhLOSolution {
        u,
        p,
        spec: spec.clone(),
    })
}

/// The compactly supported amplitude `gamma f(x, y) theta(xi + eps z)` with
/// its analytic gradient.
fn amplitude_field(spec: &SolutionSpec) -> ScalarField {
    let eps = spec.epsilon as f64;
    let s = spec.clone();
    let sg = spec.clone();
    ScalarField::from_fn_with_grad(
        move |q| {
            let w = q.xi + eps * q.z;
            s.amplitude
                * bump_disk(q.x, q.y, s.center[0], s.center[1], s.disk_radius)
                * bump_interval(w, s.window_start, s.window_length())
        },
        move |q| {
            let w = q.xi + eps * q.z;
            let f = bump_disk(q.x, q.y, sg.center[0], sg.center[1], sg.disk_radius);
            let fg = bump_disk_grad(q.x, q.y, sg.center[0], sg.center[1], sg.disk_radius);
            let th = bump_interval(w, sg.window_start, sg.window_length());
            let thd = bump_interval_deriv(w, sg.window_start, sg.window_length());
            [
                sg.amplitude * fg[0] * th,
                sg.amplitude * fg[1] * th,
                sg.amplitude * f * thd * eps,
                sg.amplitude * f * thd,
            ]
        },
    )
}

impl PhLOSolution {
    pub fn spec(&self) -> &SolutionSpec {
        &self.spec
    }

    pub fn epsilon(&self) -> f64 {
        self.spec.epsilon as f64
    }

    pub fn kappa(&self) -> f64 {
        self.spec.kappa as f64
    }

    /// The frame carrying the derived forms and vectors.
    pub fn frame(&self) -> PhLOFrame {
        PhLOFrame::new(self.u.clone(), self.p.clone(), self.epsilon())
    }

    /// The non-negative amplitude profile.
    pub fn phi(&self) -> ScalarField {
        amplitude_field(&self.spec)
    }

    /// Squared amplitude (the energy density), carrying its support box for
    /// the given time slice.
    pub fn phi_squared_at(&self, xi: f64) -> ScalarField {
        let phi = self.phi();
        (&phi * &phi).with_support(self.support_box(xi))
    }

    /// Spatial bounding box of the support at fixed `xi`.
    pub fn support_box(&self, xi: f64) -> Box3 {
        support_box_of(&self.spec, xi)
    }

    /// The field strength `F = A ^ zeta`.
    pub fn field_strength(&self) -> KForm {
        self.frame().g_form()
    }

    /// The state `(E, B) = ((u, p, 0), eps (p, -u, 0))`.
    pub fn to_eb_state(&self) -> EBState {
        let eps = self.epsilon();
        EBState::new(
            VectorField::spatial(self.u.clone(), self.p.clone(), ScalarField::zero()),
            VectorField::spatial(self.p.scale(eps), self.u.scale(-eps), ScalarField::zero()),
        )
    }
}

/// Spatial bounding box of the bump support at fixed `xi`.
pub fn support_box_of(spec: &SolutionSpec, xi: f64) -> Box3 {
    let eps = spec.epsilon as f64;
    let w0 = spec.window_start;
    let w1 = spec.window_start + spec.window_length();
    // z = eps (w - xi) over w in (w0, w1)
    let (z_lo, z_hi) = if eps > 0.0 {
        (w0 - xi, w1 - xi)
    } else {
        (xi - w1, xi - w0)
    };
    Box3::new(
        [
            spec.center[0] - spec.disk_radius,
            spec.center[1] - spec.disk_radius,
            z_lo,
        ],
        [
            spec.center[0] + spec.disk_radius,
            spec.center[1] + spec.disk_radius,
            z_hi,
        ],
    )
}

/// Scalar residuals of the equations of motion,
/// `(kappa l0 (u_xi - eps u_z) + p, kappa l0 (p_xi - eps p_z) - u)`.
pub fn motion_residual_scalar(sol: &PhLOSolution, p: Event) -> (f64, f64) {
    let frame = sol.frame();
    let kl = sol.kappa() * sol.spec.l0;
    let ru = kl * frame.rate(&sol.u, p) + sol.p.value(p);
    let rp = kl * frame.rate(&sol.p, p) - sol.u.value(p);
    (ru, rp)
}

/// Form residual `kappa l0 L_zeta-bar(F) - eps *F` at a point, evaluated
/// through the homotopy-identity Lie derivative.
pub fn motion_residual_form(sol: &PhLOSolution, p: Event) -> Result<FormValue> {
    let frame = sol.frame();
    let f = frame.g_form();
    let lie = geometry::lie_derivative_form(&frame.zeta_bar(), &f)?;
    let dual = geometry::hodge(&f);
    Ok(lie
        .scale(sol.kappa() * sol.spec.l0)
        .sub(&dual.scale(sol.epsilon()))
        .value(p))
}

/// Residual of the dual equation `kappa l0 L_zeta-bar(*F) + eps F`.
pub fn dual_motion_residual_form(sol: &PhLOSolution, p: Event) -> Result<FormValue> {
    let frame = sol.frame();
    let f = frame.g_form();
    let dual = geometry::hodge(&f);
    let lie = geometry::lie_derivative_form(&frame.zeta_bar(), &dual)?;
    Ok(lie
        .scale(sol.kappa() * sol.spec.l0)
        .add(&f.scale(sol.epsilon()))
        .value(p))
}

/// Residual of the projection form of the equations,
/// `kappa l0 L_zeta-bar(V - V0) - eps (V~ - V0)`, as a matrix value.
pub fn motion_residual_projection(sol: &PhLOSolution, at: Event) -> geometry::Mat4 {
    let eps = sol.epsilon();
    let kl = sol.kappa() * sol.spec.l0;
    let frame = sol.frame();
    let lu = frame.rate(&sol.u, at);
    let lp = frame.rate(&sol.p, at);
    let u = sol.u.value(at);
    let p = sol.p.value(at);
    // entries of kl L(V1) and of V1~, both supported on the first two rows
    let lie_v1 = [
        [0.0, 0.0, -eps * lu, -lu],
        [0.0, 0.0, -eps * lp, -lp],
        [0.0; 4],
        [0.0; 4],
    ];
    let v1_tilde = [
        [0.0, 0.0, p, eps * p],
        [0.0, 0.0, -u, -eps * u],
        [0.0; 4],
        [0.0; 4],
    ];
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = kl * lie_v1[i][j] - eps * v1_tilde[i][j];
        }
    }
    out
}

/// Quadratic density of the variational functional for an arbitrary pair of
/// 2-form fields advanced along a null direction; zero exactly when the pair
/// satisfies the equations of motion.
pub fn lagrangian_density_pair(
    f: &KForm,
    g: &KForm,
    epsilon: f64,
    kappa: f64,
    l0: f64,
    zeta_bar: &VectorField,
    at: Event,
) -> f64 {
    let rate = |w: &KForm, pos: usize| -> f64 {
        let mut acc = 0.0;
        for nu in 0..4 {
            acc += zeta_bar.component(nu).value(at)
                * w.component(pos).partial_value(Axis::from_index(nu), at);
        }
        acc
    };
    let f_v = f.value(at);
    let g_v = g.value(at);
    let f_up = f_v.raise_all();
    let g_up = g_v.raise_all();
    let mut term1 = 0.0;
    let mut term2 = 0.0;
    for pos in 0..6 {
        term1 += (epsilon * kappa * l0 * rate(f, pos) - g_v.comp(pos)) * g_up.comp(pos);
        term2 += (epsilon * kappa * l0 * rate(g, pos) + f_v.comp(pos)) * f_up.comp(pos);
    }
    // full index sums are twice the ordered ones
    0.5 * (term1 - term2)
}

/// Lagrangian density of a built solution, with its own field strength and
/// dual as the pair.
pub fn lagrangian_density(sol: &PhLOSolution, at: Event) -> f64 {
    let frame = sol.frame();
    let f = frame.g_form();
    let dual = geometry::hodge(&f);
    lagrangian_density_pair(
        &f,
        &dual,
        sol.epsilon(),
        sol.kappa(),
        sol.spec.l0,
        &frame.zeta_bar(),
        at,
    )
}

/// Amplitude and phase of a transverse pair; the phase is reported on
/// `(-pi, pi]` and absent at zero amplitude.
pub fn amplitude_phase(u: f64, p: f64) -> (f64, Option<f64>) {
    let phi = (u * u + p * p).sqrt();
    if phi == 0.0 {
        (0.0, None)
    } else {
        (phi, Some(p.atan2(u)))
    }
}

/// Inverse of `amplitude_phase`.
pub fn from_amplitude_phase(phi: f64, psi: f64) -> (f64, f64) {
    (phi * psi.cos(), phi * psi.sin())
}

/// Integral energy of the squared amplitude at fixed `xi`. The quadrature
/// region comes from the solution's own support when asked to.
pub fn integral_energy(sol: &PhLOSolution, quad: &QuadratureSpec, xi: f64) -> Result<f64> {
    let density = sol.phi_squared_at(xi);
    let quad = match quad.region {
        Region::CompactSupport => QuadratureSpec {
            region: Region::Box(sol.support_box(xi)),
            ..*quad
        },
        _ => *quad,
    };
    integrate3(&density, &quad, xi)
}

/// Energy, period and action of one rotation, with the orientation label.
#[derive(Debug, Clone, Copy)]
pub struct PlanckAction {
    pub energy: f64,
    pub period: f64,
    pub action: f64,
    /// The product of the two signs, the handedness of the propagation.
    pub orientation: f64,
}

/// Action of one rotation period: energy from quadrature, period from the
/// window length over the speed.
pub fn planck_action(sol: &PhLOSolution, quad: &QuadratureSpec) -> Result<PlanckAction> {
    let energy = integral_energy(sol, quad, 0.0)?;
    let period = sol.spec.period();
    Ok(PlanckAction {
        energy,
        period,
        action: energy * period,
        orientation: sol.epsilon() * sol.kappa(),
    })
}

/// The four-volume route to the action: the integral of
/// `(l0 / c) dA ^ A ^ zeta` over space times one window of the fourth
/// coordinate, which carries the orientation sign.
pub fn action_four_volume(
    sol: &PhLOSolution,
    quad: &QuadratureSpec,
    time_points: usize,
) -> Result<f64> {
    let frame = sol.frame();
    let four_form = wedge(&wedge(&ext_d(&frame.a())?, &frame.a())?, &frame.zeta())?;
    let density = four_form
        .component(0)
        .scale(sol.spec.l0 / sol.spec.light_speed);
    let (nodes, weights) = rule_nodes(Rule::Simpson, 0.0, sol.spec.window_length(), time_points);
    let mut total = 0.0;
    for (xi, w) in nodes.iter().zip(&weights) {
        let slice = density.clone().with_support(sol.support_box(*xi));
        let quad = QuadratureSpec {
            region: Region::Box(sol.support_box(*xi)),
            ..*quad
        };
        total += w * integrate3(&slice, &quad, *xi)?;
    }
    Ok(total)
}

/// The helicity route to the action for the transverse example state: the
/// spatial integral of `(4 l0^2 / c) E . rot E`, which carries the rotation
/// sign for the longitudinal phase.
pub fn action_from_helicity(
    state: &EBState,
    l0: f64,
    light_speed: f64,
    quad: &QuadratureSpec,
    xi: f64,
) -> Result<f64> {
    let h = crate::eed::integral_helicity(&state.e, quad, xi)?;
    Ok(4.0 * l0 * l0 / light_speed * h)
}

/// Curvature and torsion of the screwline through a point: with amplitude
/// `phi` there and pitch radius `b = 2 l0 / pi`, the curvature is
/// `phi / (phi^2 + b^2)` and the torsion `kappa b / (phi^2 + b^2)`.
pub fn screwline(sol: &PhLOSolution, at: Event) -> (f64, f64) {
    let phi = sol.phi().value(at);
    let b = 2.0 * sol.spec.l0 / std::f64::consts::PI;
    let denom = phi * phi + b * b;
    (phi / denom, sol.kappa() * b / denom)
}

/// The transverse example state: the parameter set's bump amplitude with a purely
/// longitudinal phase `-kappa z / l0 + offset`, wired as
/// `E = (phi cos, phi sin, 0)`, `B = eps (phi sin, -phi cos, 0)`.
pub fn example_solution_2_4(spec: &SolutionSpec) -> Result<EBState> {
    spec.validate()?;
    let eps = spec.epsilon as f64;
    let kappa = spec.kappa as f64;
    let phi = amplitude_field(spec);
    let l0 = spec.l0;
    let offset = spec.phase_offset;
    let chi = ScalarField::from_fn_with_grad(
        move |q| -kappa * q.z / l0 + offset,
        move |_| [0.0, 0.0, -kappa / l0, 0.0],
    );
    let u = &phi * &chi.cos();
    let p = &phi * &chi.sin();
    Ok(EBState::new(
        VectorField::spatial(u.clone(), p.clone(), ScalarField::zero()),
        VectorField::spatial(p.scale(eps), u.scale(-eps), ScalarField::zero()),
    ))
}

/// Sample of events inside the support of a solution at fixed `xi`, on a
/// regular grid shrunk into the interior where the bumps are visibly
/// nonzero.
pub fn interior_sample(sol: &PhLOSolution, per_axis: usize, xi: f64) -> Vec<Event> {
    let b = sol.support_box(xi);
    let shrink = 0.8;
    let phi = sol.phi();
    let mut out = Vec::new();
    let lerp = |lo: f64, hi: f64, t: f64| {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo) * shrink;
        mid - half + 2.0 * half * t
    };
    let t = |n: usize| n as f64 / (per_axis - 1).max(1) as f64;
    for i in 0..per_axis {
        for j in 0..per_axis {
            for k in 0..per_axis {
                let e = Event::new(
                    lerp(b.min[0], b.max[0], t(i)),
                    lerp(b.min[1], b.max[1], t(j)),
                    lerp(b.min[2], b.max[2], t(k)),
                    xi,
                );
                if phi.value(e) > 1e-8 * sol.spec.amplitude {
                    out.push(e);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eed;
    use crate::frobenius::{self, curvature_factor};
    use crate::stress;

    fn spec() -> SolutionSpec {
        SolutionSpec::default()
    }

    fn sample_inside(sol: &PhLOSolution) -> Vec<Event> {
        let pts = interior_sample(sol, 4, 0.3);
        assert!(!pts.is_empty());
        pts
    }

    #[test]
    fn bump_normalization_and_support() {
        assert_eq!(bump_disk(0.3, -0.2, 0.3, -0.2, 0.7), 1.0);
        assert_eq!(bump_disk(1.1, 0.0, 0.0, 0.0, 1.0), 0.0);
        assert_eq!(bump_disk(0.0, 2.0, 0.0, 0.0, 2.0), 0.0);
        assert_eq!(bump_interval(0.5, 0.0, 1.0), 1.0);
        assert_eq!(bump_interval(-0.01, 0.0, 1.0), 0.0);
        assert_eq!(bump_interval(1.01, 0.0, 1.0), 0.0);
    }

    #[test]
    fn bump_is_smooth_at_the_boundary() {
        // one-sided slope just inside the edge tends to zero with the step
        let h = 1e-3;
        let slope =
            (bump_disk(1.0 - h, 0.0, 0.0, 0.0, 1.0) - bump_disk(1.0, 0.0, 0.0, 0.0, 1.0)) / h;
        assert!(slope.abs() < h, "slope {slope}");
        // gradient matches finite differences inside
        let g = bump_disk_grad(0.4, -0.3, 0.0, 0.0, 1.0);
        let fd = (bump_disk(0.4 + 1e-6, -0.3, 0.0, 0.0, 1.0)
            - bump_disk(0.4 - 1e-6, -0.3, 0.0, 0.0, 1.0))
            / 2e-6;
        assert!((g[0] - fd).abs() < 1e-8);
        let gd = bump_interval_deriv(0.3, 0.0, 1.0);
        let fd = (bump_interval(0.3 + 1e-6, 0.0, 1.0) - bump_interval(0.3 - 1e-6, 0.0, 1.0)) / 2e-6;
        assert!((gd - fd).abs() < 1e-7);
    }

    #[test]
    fn amplitude_is_a_running_wave() {
        let sol = build_solution(&spec()).unwrap();
        let frame = sol.frame();
        let phi = sol.phi();
        let phi2 = frame.phi_squared();
        for &p in &sample_inside(&sol) {
            // the profile itself cancels exactly along the null direction
            assert_eq!(frame.rate(&phi, p), 0.0, "amplitude drifts at {p:?}");
            // the squared amplitude through the product tree cancels to
            // rounding
            assert!(frame.rate(&phi2, p).abs() < 1e-15);
        }
    }

    #[test]
    fn phase_rate_is_exact() {
        for family in [PhaseFamily::Psi1, PhaseFamily::Psi2] {
            for (eps, kappa) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let s = SolutionSpec {
                    epsilon: eps,
                    kappa,
                    phase_family: family,
                    l0: 0.7,
                    ..spec()
                };
                let sol = build_solution(&s).unwrap();
                let frame = sol.frame();
                for &p in &sample_inside(&sol) {
                    let rate = frobenius::phase_rate(&frame, p).unwrap();
                    let want = kappa as f64 / s.l0;
                    assert!(
                        (rate - want).abs() < 1e-12 * want.abs().max(1.0),
                        "family {family:?} eps {eps} kappa {kappa}: {rate} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn support_is_contained_in_disk_and_window() {
        let sol = build_solution(&spec()).unwrap();
        assert_eq!(sol.u.value(Event::new(1.2, 0.0, 0.5, 0.0)), 0.0);
        assert_eq!(sol.u.value(Event::new(0.0, 0.0, 4.4, 0.0)), 0.0);
        assert!(sol.phi().value(Event::new(0.2, 0.1, 1.9, 0.0)) > 0.0);
    }

    #[test]
    fn motion_residuals_vanish_on_solutions() {
        for family in [PhaseFamily::Psi1, PhaseFamily::Psi2] {
            let s = SolutionSpec {
                phase_family: family,
                epsilon: -1,
                kappa: 1,
                l0: 1.3,
                ..spec()
            };
            let sol = build_solution(&s).unwrap();
            for &p in &sample_inside(&sol) {
                let (ru, rp) = motion_residual_scalar(&sol, p);
                assert!(ru.abs() < 1e-12 && rp.abs() < 1e-12, "{family:?}: {ru}, {rp}");
                let form = motion_residual_form(&sol, p).unwrap();
                assert!(form.max_abs() < 1e-10, "{family:?}: form {}", form.max_abs());
                let dual = dual_motion_residual_form(&sol, p).unwrap();
                assert!(dual.max_abs() < 1e-10, "{family:?}: dual {}", dual.max_abs());
                let proj = motion_residual_projection(&sol, p);
                for row in proj {
                    for v in row {
                        assert!(v.abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn custom_phase_offset_still_solves() {
        let s = spec();
        let offset = TransversePhase::new(
            |x, y, w| 0.3 * x * y + 0.2 * (w).sin(),
            |x, y, w| [0.3 * y, 0.3 * x, 0.2 * w.cos()],
        );
        let sol = build_solution_with(&s, &offset, s.l0).unwrap();
        for &p in &sample_inside(&sol) {
            let (ru, rp) = motion_residual_scalar(&sol, p);
            assert!(ru.abs() < 1e-12 && rp.abs() < 1e-12);
        }
    }

    #[test]
    fn energy_momentum_form_of_the_equations() {
        // the curvature factor carries kappa / l0 times the energy density
        let sol = build_solution(&spec()).unwrap();
        let frame = sol.frame();
        for &p in &sample_inside(&sol) {
            let r = curvature_factor(&frame, p);
            let phi2 = frame.phi_squared().value(p);
            assert!((r - sol.kappa() / sol.spec().l0 * phi2).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_phase_scale_leaves_half_residual() {
        let s = spec();
        let sol = build_solution_with(&s, &TransversePhase::zero(), 2.0 * s.l0).unwrap();
        for &p in &sample_inside(&sol) {
            let (ru, rp) = motion_residual_scalar(&sol, p);
            assert!((ru - 0.5 * sol.p.value(p)).abs() < 1e-12);
            assert!((rp + 0.5 * sol.u.value(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn running_wave_without_rotation_fails_by_the_dual_term() {
        // freeze the phase: the advance term dies and the form residual
        // collapses to minus the direction sign times the dual strength
        let s = spec();
        let eps = s.epsilon as f64;
        let sol = build_solution(&s).unwrap();
        let frozen = PhLOFrame::new(sol.phi(), ScalarField::zero(), eps);
        let f = frozen.g_form();
        let lie = geometry::lie_derivative_form(&frozen.zeta_bar(), &f).unwrap();
        let dual = geometry::hodge(&f);
        let p = Event::new(0.2, 0.1, 1.9, 0.3);
        let residual = lie
            .scale(s.kappa as f64 * s.l0)
            .sub(&dual.scale(eps))
            .value(p);
        let want = dual.value(p).scale(-eps);
        for k in 0..6 {
            assert!((residual.comp(k) - want.comp(k)).abs() < 1e-9);
        }
        assert!(want.max_abs() > 0.1, "dual term should be visible");
    }

    #[test]
    fn lagrangian_vanishes_on_solutions_and_family() {
        let sol = build_solution(&spec()).unwrap();
        for &p in &sample_inside(&sol) {
            assert!(lagrangian_density(&sol, p).abs() < 1e-12);
        }
        // even off the solution set, the null structure keeps the density zero
        let s = spec();
        let off = build_solution_with(&s, &TransversePhase::zero(), 2.0 * s.l0).unwrap();
        let p = Event::new(0.2, 0.1, 1.9, 0.3);
        assert!(lagrangian_density(&off, p).abs() < 1e-12);
    }

    #[test]
    fn lagrangian_pair_nonzero_for_generic_forms() {
        let comp = |c0: f64, c1: f64| {
            ScalarField::from_fn_with_grad(
                move |q| c0 * q.z + c1 * q.xi * q.x,
                move |q| [c1 * q.xi, 0.0, c0, c1 * q.x],
            )
        };
        let f = KForm::new(
            2,
            vec![
                comp(0.3, -0.1),
                comp(-0.2, 0.4),
                comp(0.5, 0.2),
                comp(-0.4, 0.3),
                comp(0.1, -0.5),
                comp(0.2, 0.1),
            ],
        );
        let g = KForm::new(
            2,
            vec![
                comp(-0.5, 0.2),
                comp(0.3, 0.1),
                comp(0.2, -0.4),
                comp(0.1, 0.5),
                comp(-0.3, 0.2),
                comp(0.4, -0.1),
            ],
        );
        let zeta_bar = VectorField::constant([0.0, 0.0, -1.0, 1.0]);
        let at = Event::new(0.4, -0.2, 0.7, 0.9);
        let got = lagrangian_density_pair(&f, &g, 1.0, 1.0, 1.0, &zeta_bar, at);

        // oracle: explicit ordered-pair sums, half weight per term
        let rate_of = |w: &KForm, pos: usize| {
            -w.component(pos).partial_value(Axis::Z, at)
                + w.component(pos).partial_value(Axis::Xi, at)
        };
        let f_v = f.value(at);
        let g_v = g.value(at);
        let f_up = f_v.raise_all();
        let g_up = g_v.raise_all();
        let mut want = 0.0;
        for pos in 0..6 {
            want += 0.5 * (rate_of(&f, pos) - g_v.comp(pos)) * g_up.comp(pos);
            want -= 0.5 * (rate_of(&g, pos) + f_v.comp(pos)) * f_up.comp(pos);
        }
        assert!(got.abs() > 1e-3, "density should be visible, got {got}");
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn null_family_orthogonality() {
        // the advance of F along the null direction is orthogonal to both
        // F and its dual
        let sol = build_solution(&spec()).unwrap();
        let frame = sol.frame();
        let f = frame.g_form();
        let dual = geometry::hodge(&f);
        let at = Event::new(0.2, 0.1, 1.9, 0.3);
        let dual_up = dual.value(at).raise_all();
        let f_up = f.value(at).raise_all();
        let mut cross = 0.0;
        let mut auto = 0.0;
        for pos in 0..6 {
            let rate = -f.component(pos).partial_value(Axis::Z, at)
                + f.component(pos).partial_value(Axis::Xi, at);
            cross += rate * dual_up.comp(pos);
            auto += rate * f_up.comp(pos);
        }
        assert!(cross.abs() < 1e-12);
        assert!(auto.abs() < 1e-12);
    }

    #[test]
    fn amplitude_phase_round_trip() {
        assert_eq!(amplitude_phase(1.0, 0.0), (1.0, Some(0.0)));
        let (phi, psi) = amplitude_phase(0.0, -2.0);
        assert_eq!(phi, 2.0);
        assert!((psi.unwrap() + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(amplitude_phase(0.0, 0.0).1, None);
        for k in 0..50 {
            let u = (k as f64 * 0.37).sin();
            let p = (k as f64 * 0.91).cos();
            let (phi, psi) = amplitude_phase(u, p);
            let (u2, p2) = from_amplitude_phase(phi, psi.unwrap());
            assert!((u - u2).abs() < 1e-14 && (p - p2).abs() < 1e-14);
        }
    }

    #[test]
    fn integral_energy_is_time_invariant_and_quadratic() {
        let s = spec();
        let sol = build_solution(&s).unwrap();
        let quad = QuadratureSpec::simpson_support(41);
        let e0 = integral_energy(&sol, &quad, 0.0).unwrap();
        let e1 = integral_energy(&sol, &quad, 0.7).unwrap();
        assert!((e0 - e1).abs() < 1e-10 * e0, "{e0} vs {e1}");
        let doubled = SolutionSpec {
            amplitude: 2.0,
            ..s
        };
        let sol2 = build_solution(&doubled).unwrap();
        let e2 = integral_energy(&sol2, &quad, 0.0).unwrap();
        assert!((e2 - 4.0 * e0).abs() < 1e-9 * e2.abs(), "{e2} vs 4 x {e0}");
    }

    #[test]
    fn integral_energy_converges_with_refinement() {
        let sol = build_solution(&spec()).unwrap();
        let coarse = integral_energy(&sol, &QuadratureSpec::simpson_support(31), 0.0).unwrap();
        let fine = integral_energy(&sol, &QuadratureSpec::simpson_support(61), 0.0).unwrap();
        let finer = integral_energy(&sol, &QuadratureSpec::simpson_support(121), 0.0).unwrap();
        assert!((fine - finer).abs() <= (coarse - finer).abs());
        assert!((fine - finer).abs() < 1e-4 * finer.abs());
    }

    #[test]
    fn action_routes_agree() {
        let s = spec();
        let sol = build_solution(&s).unwrap();
        let quad = QuadratureSpec::simpson_support(41);
        let pa = planck_action(&sol, &quad).unwrap();
        assert_eq!(pa.period, 4.0 * s.l0 / s.light_speed);
        assert_eq!(pa.orientation, (s.epsilon * s.kappa) as f64);
        let four = action_four_volume(&sol, &quad, 21).unwrap();
        let want = pa.orientation * pa.action;
        assert!(
            (four - want).abs() < 5e-3 * pa.action,
            "four-volume {four} vs oriented action {want}"
        );
    }

    #[test]
    fn helicity_route_recovers_the_action() {
        let s = spec();
        let state = example_solution_2_4(&s).unwrap();
        let sol = build_solution(&s).unwrap();
        let quad = QuadratureSpec {
            region: Region::Box(support_box_of(&s, 0.0)),
            rule: Rule::Simpson,
            resolution: [41; 3],
        };
        let h = action_from_helicity(&state, s.l0, s.light_speed, &quad, 0.0).unwrap();
        let energy = integral_energy(&sol, &QuadratureSpec::simpson_support(41), 0.0).unwrap();
        let want = s.kappa as f64 * s.period() * energy;
        assert!(
            (h - want).abs() < 5e-3 * want.abs(),
            "helicity action {h} vs {want}"
        );
    }

    #[test]
    fn example_state_solves_the_balance_equations() {
        for (eps, kappa) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
            let s = SolutionSpec {
                epsilon: eps,
                kappa,
                l0: 0.8,
                phase_offset: 0.4,
                ..spec()
            };
            let state = example_solution_2_4(&s).unwrap();
            for &p in &[
                Event::new(0.2, 0.1, 0.9, 0.3),
                Event::new(-0.4, 0.3, -1.2, 0.8),
            ] {
                let rep = eed::residual_report(&state, p);
                assert!(rep.max_abs < 1e-12, "residual {}", rep.max_abs);
                // null structure is exact by the trig identity
                let e = state.e.value3(p);
                let b = state.b.value3(p);
                assert!(stress::dot3(e, b).abs() < 1e-14);
                assert!((stress::dot3(e, e) - stress::dot3(b, b)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn relativistic_residuals_vanish_on_solutions() {
        let sol = build_solution(&spec()).unwrap();
        let f = sol.field_strength();
        // the state dictionary reproduces the same field strength
        let via_state = eed::form_from_eb(&sol.to_eb_state());
        for &p in &sample_inside(&sol) {
            let a = f.value(p);
            let b = via_state.value(p);
            for k in 0..6 {
                assert!((a.comp(k) - b.comp(k)).abs() < 1e-15);
            }
            let [r1, r2, r3] = eed::relativistic_residuals(&f, p).unwrap();
            for v in r1.iter().chain(r2.iter()).chain(r3.iter()) {
                assert!(v.abs() < 1e-12, "residual {v} at {p:?}");
            }
        }
    }

    #[test]
    fn energy_tensor_divergence_vanishes_on_solutions() {
        let sol = build_solution(&spec()).unwrap();
        let f = sol.field_strength();
        let frame = sol.frame();
        let p = Event::new(0.2, 0.1, 1.9, 0.3);
        let d = stress::energy_divergence(&f, p, 1e-3).unwrap();
        for mu in 0..4 {
            assert!(d.contraction[mu].abs() < 1e-12);
            assert!(d.codifferential[mu].abs() < 1e-12);
            // the finite-difference route carries the stencil truncation
            assert!(d.finite_difference[mu].abs() < 1e-3);
        }
        // the energy density slot of the tensor is the squared amplitude
        let t = stress::energy_tensor(&f.value(p));
        let phi2 = frame.phi_squared().value(p);
        assert!((t.energy_density() - phi2).abs() < 1e-14);
    }

    #[test]
    fn screwline_examples() {
        let s = spec();
        let sol = build_solution(&s).unwrap();
        let b = 2.0 * s.l0 / std::f64::consts::PI;
        // outside the support the curvature dies and the torsion saturates
        let (k, tau) = screwline(&sol, Event::new(5.0, 5.0, 0.0, 0.0));
        assert_eq!(k, 0.0);
        assert!((tau - s.kappa as f64 / b).abs() < 1e-14);
        // interior: the curvature-to-torsion ratio follows the amplitude
        let at = Event::new(0.2, 0.1, 1.9, 0.0);
        let phi = sol.phi().value(at);
        let (k, tau) = screwline(&sol, at);
        assert!((k / tau - phi / (s.kappa as f64 * b)).abs() < 1e-12);
        assert!((k * (phi * phi + b * b) - phi).abs() < 1e-14);
    }

    #[test]
    fn field_strength_is_null_and_annihilated_by_projections() {
        let sol = build_solution(&spec()).unwrap();
        let frame = sol.frame();
        let f = frame.g_form();
        let at = Event::new(0.2, 0.1, 1.9, 0.3);
        let fv = f.value(at);
        let dual = fv.hodge();
        let scale = fv.max_abs().max(1.0);
        assert!(fv.wedge(&fv).unwrap().max_abs() < 1e-14 * scale * scale);
        assert!(fv.wedge(&dual).unwrap().max_abs() < 1e-14 * scale * scale);
        assert!(dual.wedge(&dual).unwrap().max_abs() < 1e-14 * scale * scale);

        let set = frobenius::build_projections(&sol.u, &sol.p, sol.epsilon());
        for proj in [&set.v, &set.h, &set.v_tilde, &set.h_tilde] {
            let m = proj.value(at);
            for w in [&fv, &dual] {
                let projected = frobenius::project_form2(m, w);
                assert!(projected.max_abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn exchange_identities_on_generic_pairs() {
        // i(Z1) F = i(Z2) *F and i(Z1) *F = -i(Z2) F for arbitrary (u, p)
        let u = ScalarField::from_fn_with_grad(
            |q| (0.5 * q.x + 0.8 * q.z).sin() + 0.2 * q.y * q.xi,
            |q| {
                let c = (0.5 * q.x + 0.8 * q.z).cos();
                [0.5 * c, 0.2 * q.xi, 0.8 * c, 0.2 * q.y]
            },
        );
        let p = ScalarField::from_fn_with_grad(
            |q| 1.0 + 0.3 * (q.y - q.xi).cos() + 0.1 * q.z,
            |q| [0.0, -0.3 * (q.y - q.xi).sin(), 0.1, 0.3 * (q.y - q.xi).sin()],
        );
        for eps in [1.0, -1.0] {
            let frame = PhLOFrame::new(u.clone(), p.clone(), eps);
            let set = frobenius::build_projections(&frame.u, &frame.p, eps);
            let dz = VectorField::constant([0.0, 0.0, 1.0, 0.0]);
            let dxi = VectorField::constant([0.0, 0.0, 0.0, 1.0]);
            let at = Event::new(0.3, -0.5, 0.9, 0.4);
            let (z1, _) = frobenius::connection_curvature(&set.v, &dz, &dxi, at);
            let (z2, _) = frobenius::connection_curvature(&set.v_tilde, &dz, &dxi, at);
            let fv = frame.g_form().value(at);
            let dual = fv.hodge();
            let i_z1_f = fv.interior(z1).unwrap();
            let i_z2_dual = dual.interior(z2).unwrap();
            let i_z1_dual = dual.interior(z1).unwrap();
            let i_z2_f = fv.interior(z2).unwrap();
            for k in 0..4 {
                assert!((i_z1_f.comp(k) - i_z2_dual.comp(k)).abs() < 1e-12);
                assert!((i_z1_dual.comp(k) + i_z2_f.comp(k)).abs() < 1e-12);
            }
            // values against the rate expressions
            let l_phi2 = frame.rate(&frame.phi_squared(), at);
            let r = curvature_factor(&frame, at);
            let zeta = frame.zeta().value(at);
            for k in 0..4 {
                assert!(
                    (i_z1_f.comp(k) + eps * 0.5 * l_phi2 * zeta.comp(k)).abs() < 1e-12,
                    "energy slot {k}"
                );
                assert!(
                    (i_z1_dual.comp(k) + r * zeta.comp(k)).abs() < 1e-12,
                    "curvature slot {k}"
                );
            }
        }
    }

    #[test]
    fn codifferential_flux_is_closed_on_solutions() {
        let sol = build_solution(&spec()).unwrap();
        let f = sol.field_strength();
        let co = geometry::codifferential(&f).unwrap();
        let flux = wedge(&co, &f).unwrap();
        let d_flux = ext_d(&flux).unwrap();
        // second derivatives run through finite differences of the analytic
        // gradients; interior point
        let at = Event::new(0.2, 0.1, 1.9, 0.3);
        assert!(
            d_flux.value(at).max_abs() < 1e-4,
            "{}",
            d_flux.value(at).max_abs()
        );
    }

    #[test]
    fn spec_round_trip_through_pairs() {
        let s = SolutionSpec {
            epsilon: -1,
            kappa: 1,
            l0: 2.5,
            amplitude: 0.7,
            center: [0.4, -0.2],
            disk_radius: 1.2,
            window_start: -3.0,
            phase_family: PhaseFamily::Psi2,
            phase_offset: 0.3,
            light_speed: 1.0,
        };
        let pairs: HashMap<String, String> = s.to_pairs().into_iter().collect();
        let back = SolutionSpec::from_pairs(&pairs).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn spec_validation_rejects_bad_values() {
        let mut s = spec();
        s.epsilon = 2;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.l0 = 0.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.disk_radius = -1.0;
        assert!(s.validate().is_err());
    }
}
