//! Distributions and Pfaff systems with their integrability tests, the
//! curvature factor of the two transverse subdistributions, curvature
//! 2-forms with chosen dual bases, nonlinear-connection projections and
//! their curvatures, the intrinsic length scale, and the phase rate.

use crate::error::{Error, Result};
use crate::fields::{Event, ScalarField, VectorField};
use crate::geometry::{self, ext_d, lie_bracket, pair, wedge, FormValue, KForm, Mat4, Vec4};
use crate::linalg::{least_squares, singular_values};

/// Relative singular-value margin below which a set of vector fields stops
/// counting as pointwise independent.
pub const INDEPENDENCE_MARGIN: f64 = 1e-8;

/// An ordered set of vector fields spanning a tangent subspace pointwise.
#[derive(Debug, Clone)]
pub struct Distribution {
    fields: Vec<VectorField>,
}

impl Distribution {
    pub fn new(fields: Vec<VectorField>) -> Distribution {
        assert!(
            (1..=4).contains(&fields.len()),
            "a distribution carries one to four fields"
        );
        Distribution { fields }
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn field(&self, i: usize) -> &VectorField {
        &self.fields[i]
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    /// Worst ratio of smallest to largest singular value of the component
    /// matrix over the sample.
    pub fn independence_margin(&self, points: &[Event]) -> f64 {
        let mut worst = f64::INFINITY;
        for &p in points {
            let mut rows = Vec::with_capacity(4);
            for i in 0..4 {
                let mut row = [0.0; 4];
                for (j, f) in self.fields.iter().enumerate() {
                    row[j] = f.value(p)[i];
                }
                rows.push(row);
            }
            let sv = singular_values(&rows, self.dim());
            let largest = sv.last().copied().unwrap_or(0.0);
            let smallest = sv.first().copied().unwrap_or(0.0);
            let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
            worst = worst.min(ratio);
        }
        worst
    }

    pub fn is_independent(&self, points: &[Event]) -> bool {
        self.independence_margin(points) > INDEPENDENCE_MARGIN
    }
}

/// An ordered set of 1-forms.
#[derive(Debug, Clone)]
pub struct PfaffSystem {
    forms: Vec<KForm>,
}

impl PfaffSystem {
    pub fn new(forms: Vec<KForm>) -> PfaffSystem {
        assert!(!forms.is_empty());
        for f in &forms {
            assert_eq!(f.degree(), 1, "Pfaff systems are made of 1-forms");
        }
        PfaffSystem { forms }
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn form(&self, m: usize) -> &KForm {
        &self.forms[m]
    }
}

/// Outcome of an integrability test: the verdict and the largest witness
/// coefficient found on the sample.
#[derive(Debug, Clone, Copy)]
pub struct IntegrabilityVerdict {
    pub integrable: bool,
    pub witness: f64,
}

/// Bracket test: all `[X_i, X_j] ^ X_1 ^ ... ^ X_p` vanish on the sample.
pub fn integrability_vec(d: &Distribution, points: &[Event], tol: f64) -> IntegrabilityVerdict {
    let mut witness = 0.0f64;
    for i in 0..d.dim() {
        for j in (i + 1)..d.dim() {
            let bracket = lie_bracket(d.field(i), d.field(j));
            for &p in points {
                let mut vectors: Vec<Vec4> = vec![bracket.value(p)];
                vectors.extend(d.fields.iter().map(|f| f.value(p)));
                if vectors.len() > 4 {
                    continue; // a wedge of more than four vectors vanishes
                }
                let w = FormValue::from_wedge_of_vectors(&vectors);
                witness = witness.max(w.max_abs());
            }
        }
    }
    IntegrabilityVerdict {
        integrable: witness <= tol,
        witness,
    }
}

/// Dual test: all `d alpha^m ^ alpha^1 ^ ... ^ alpha^q` vanish on the sample.
pub fn integrability_pfaff(
    s: &PfaffSystem,
    points: &[Event],
    tol: f64,
) -> Result<IntegrabilityVerdict> {
    if 2 + s.len() > 4 {
        // criterion forms exceed the space dimension and vanish identically
        return Ok(IntegrabilityVerdict {
            integrable: true,
            witness: 0.0,
        });
    }
    let mut witness = 0.0f64;
    for m in 0..s.len() {
        let mut w = ext_d(s.form(m))?;
        for k in 0..s.len() {
            w = wedge(&w, s.form(k))?;
        }
        for &p in points {
            witness = witness.max(w.value(p).max_abs());
        }
    }
    Ok(IntegrabilityVerdict {
        integrable: witness <= tol,
        witness,
    })
}

/// The transverse frame of an electromagnetic photon-like configuration:
/// two smooth functions `(u, p)` and the direction sign, with the derived
/// 1-forms and vector fields.
#[derive(Debug, Clone)]
pub struct PhLOFrame {
    pub u: ScalarField,
    pub p: ScalarField,
    pub epsilon: f64,
}

impl PhLOFrame {
    pub fn new(u: ScalarField, p: ScalarField, epsilon: f64) -> PhLOFrame {
        assert!(epsilon == 1.0 || epsilon == -1.0, "direction sign is +-1");
        PhLOFrame { u, p, epsilon }
    }

    /// `A = u dx + p dy`
    pub fn a(&self) -> KForm {
        KForm::new(
            1,
            vec![
                self.u.clone(),
                self.p.clone(),
                ScalarField::zero(),
                ScalarField::zero(),
            ],
        )
    }

    /// `A* = -eps p dx + eps u dy`
    pub fn a_star(&self) -> KForm {
        KForm::new(
            1,
            vec![
                self.p.scale(-self.epsilon),
                self.u.scale(self.epsilon),
                ScalarField::zero(),
                ScalarField::zero(),
            ],
        )
    }

    /// `zeta = eps dz + dxi`, the closed null 1-form.
    pub fn zeta(&self) -> KForm {
        KForm::constant(1, &[0.0, 0.0, self.epsilon, 1.0])
    }

    /// `A-bar = -u d/dx - p d/dy`
    pub fn a_bar(&self) -> VectorField {
        VectorField::from_components([
            self.u.scale(-1.0),
            self.p.scale(-1.0),
            ScalarField::zero(),
            ScalarField::zero(),
        ])
    }

    /// `A*-bar = eps p d/dx - eps u d/dy`
    pub fn a_star_bar(&self) -> VectorField {
        VectorField::from_components([
            self.p.scale(self.epsilon),
            self.u.scale(-self.epsilon),
            ScalarField::zero(),
            ScalarField::zero(),
        ])
    }

    /// `zeta-bar = -eps d/dz + d/dxi`, the null propagation direction.
    pub fn zeta_bar(&self) -> VectorField {
        VectorField::constant([0.0, 0.0, -self.epsilon, 1.0])
    }

    /// Squared amplitude `u^2 + p^2`.
    pub fn phi_squared(&self) -> ScalarField {
        &(&self.u * &self.u) + &(&self.p * &self.p)
    }

    /// The volume 2-form `G = A ^ zeta` of the first subdistribution; this
    /// is also the field strength of the configuration.
    pub fn g_form(&self) -> KForm {
        wedge(&self.a(), &self.zeta()).expect("degree 2")
    }

    /// `G* = A* ^ zeta`, which coincides with the Hodge dual of `G`.
    pub fn g_star_form(&self) -> KForm {
        wedge(&self.a_star(), &self.zeta()).expect("degree 2")
    }

    /// Directional rate along the propagation direction: `f_xi - eps f_z`.
    pub fn rate(&self, f: &ScalarField, p: Event) -> f64 {
        f.partial_value(crate::fields::Axis::Xi, p)
            - self.epsilon * f.partial_value(crate::fields::Axis::Z, p)
    }
}

/// The curvature factor `u (p_xi - eps p_z) - p (u_xi - eps u_z)` shared by
/// the two transverse subdistributions.
pub fn curvature_factor(frame: &PhLOFrame, p: Event) -> f64 {
    let u = frame.u.value(p);
    let pv = frame.p.value(p);
    u * frame.rate(&frame.p, p) - pv * frame.rate(&frame.u, p)
}

/// Squared magnitude of the transverse rates,
/// `(u_xi - eps u_z)^2 + (p_xi - eps p_z)^2`.
pub fn rate_squared(frame: &PhLOFrame, p: Event) -> f64 {
    let lu = frame.rate(&frame.u, p);
    let lp = frame.rate(&frame.p, p);
    lu * lu + lp * lp
}

/// Rate of the phase `arctan(p/u)` along the propagation direction, equal to
/// the curvature factor over the squared amplitude.
pub fn phase_rate(frame: &PhLOFrame, p: Event) -> Result<f64> {
    let phi2 = frame.phi_squared().value(p);
    if !(phi2 > 0.0) {
        return Err(Error::SingularAmplitude { point: p });
    }
    Ok(curvature_factor(frame, p) / phi2)
}

/// Curvature 2-form of a distribution with caller-chosen dual bases:
/// evaluates `Omega(X, Y) = <alpha^m, [X, Y]> Y_m` into the complement.
#[derive(Debug, Clone)]
pub struct CurvatureForm {
    distribution: Distribution,
    dual: PfaffSystem,
    complement: Distribution,
}

/// Build the curvature form, checking the duality pairing
/// `<alpha^m, X_i> = 0`, `<alpha^m, Y_n> = delta^m_n` over the sample.
pub fn curvature_form(
    distribution: Distribution,
    dual: PfaffSystem,
    complement: Distribution,
    sample: &[Event],
    tol: f64,
) -> Result<CurvatureForm> {
    if dual.len() != complement.dim() {
        return Err(Error::DualityMismatch(format!(
            "{} dual forms against {} complement fields",
            dual.len(),
            complement.dim()
        )));
    }
    for &p in sample {
        for m in 0..dual.len() {
            let alpha = dual.form(m).value(p);
            for i in 0..distribution.dim() {
                let v = pair(&alpha, distribution.field(i).value(p));
                if v.abs() > tol {
                    return Err(Error::DualityMismatch(format!(
                        "dual form {m} pairs to {v} with member {i} at {p:?}"
                    )));
                }
            }
            for n in 0..complement.dim() {
                let v = pair(&alpha, complement.field(n).value(p));
                let want = if m == n { 1.0 } else { 0.0 };
                if (v - want).abs() > tol {
                    return Err(Error::DualityMismatch(format!(
                        "dual form {m} pairs to {v} with complement {n} at {p:?}"
                    )));
                }
            }
        }
    }
    Ok(CurvatureForm {
        distribution,
        dual,
        complement,
    })
}

impl CurvatureForm {
    pub fn distribution(&self) -> &Distribution {
        &self.distribution
    }

    /// Value on a pair of vector fields at a point, expanded in the
    /// complement basis.
    pub fn eval(&self, x: &VectorField, y: &VectorField, p: Event) -> Vec4 {
        let bracket = lie_bracket(x, y).value(p);
        let mut out = [0.0; 4];
        for m in 0..self.dual.len() {
            let alpha = self.dual.form(m).value(p);
            let coeff: f64 = (0..4).map(|k| alpha.comp(k) * bracket[k]).sum();
            let ym = self.complement.field(m).value(p);
            for k in 0..4 {
                out[k] += coeff * ym[k];
            }
        }
        out
    }
}

/// One compared identity: a label, both sides, and their distance.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub label: &'static str,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub mismatch: f64,
}

pub(crate) fn check(label: &'static str, lhs: &[f64], rhs: &[f64]) -> IdentityCheck {
    let mismatch = lhs
        .iter()
        .zip(rhs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    IdentityCheck {
        label,
        lhs: lhs.to_vec(),
        rhs: rhs.to_vec(),
        mismatch,
    }
}

/// The curvature-to-energy-exchange relations at a point: the four curvature
/// values of the two transverse subdistributions, their insertions into the
/// volume 2-forms, the bivector contractions of the exterior derivatives,
/// and the codifferential fluxes. Every entry compares two independently
/// computed sides.
pub fn curvature_energy_relations(frame: &PhLOFrame, p: Event) -> Result<Vec<IdentityCheck>> {
    let phi2 = frame.phi_squared().value(p);
    if !(phi2 > 0.0) {
        return Err(Error::SingularAmplitude { point: p });
    }
    let eps = frame.epsilon;
    let r = curvature_factor(frame, p);
    let l_phi2 = frame.rate(&frame.phi_squared(), p);

    let a_bar = frame.a_bar();
    let a_star_bar = frame.a_star_bar();
    let zeta_bar = frame.zeta_bar();
    let g = frame.g_form();
    let g_star = frame.g_star_form();
    let zeta_v = frame.zeta().value(p);
    let g_v = g.value(p);
    let g_star_v = g_star.value(p);

    // dual 1-forms -A*/phi^2 and -A/phi^2 normalize the bracket pairings
    let inv_phi2 = frame
        .phi_squared()
        .map_smooth(|v| 1.0 / v, |v| -1.0 / (v * v));
    let dual_of = |form: &KForm| {
        KForm::new(
            1,
            (0..4)
                .map(|k| &form.component(k).scale(-1.0) * &inv_phi2)
                .collect(),
        )
    };
    let omega = curvature_form(
        Distribution::new(vec![a_bar.clone(), zeta_bar.clone()]),
        PfaffSystem::new(vec![dual_of(&frame.a_star())]),
        Distribution::new(vec![a_star_bar.clone()]),
        &[p],
        1e-9,
    )?;
    let omega_star = curvature_form(
        Distribution::new(vec![a_star_bar.clone(), zeta_bar.clone()]),
        PfaffSystem::new(vec![dual_of(&frame.a())]),
        Distribution::new(vec![a_bar.clone()]),
        &[p],
        1e-9,
    )?;

    let z_omega = omega.eval(&a_bar, &zeta_bar, p);
    let z_star_omega = omega.eval(&a_star_bar, &zeta_bar, p);
    let z_omega_star = omega_star.eval(&a_bar, &zeta_bar, p);
    let z_star_omega_star = omega_star.eval(&a_star_bar, &zeta_bar, p);

    let scale_vec = |v: Vec4, c: f64| [c * v[0], c * v[1], c * v[2], c * v[3]];
    let a_star_bar_v = a_star_bar.value(p);
    let a_bar_v = a_bar.value(p);

    let mut checks = vec![
        check(
            "curvature of the first subdistribution",
            &z_omega,
            &scale_vec(a_star_bar_v, -eps * r / phi2),
        ),
        check(
            "first curvature form off the distribution",
            &z_star_omega,
            &scale_vec(a_star_bar_v, -0.5 * l_phi2 / phi2),
        ),
        check(
            "second curvature form off the distribution",
            &z_omega_star,
            &scale_vec(a_bar_v, -0.5 * l_phi2 / phi2),
        ),
        check(
            "curvature of the second subdistribution",
            &z_star_omega_star,
            &scale_vec(a_bar_v, eps * r / phi2),
        ),
    ];

    let zeta_scaled = |c: f64| -> Vec<f64> { zeta_v.comps().iter().map(|v| c * v).collect() };
    let ins = |z: Vec4, w: &FormValue| -> Vec<f64> { w.interior(z).unwrap().comps().to_vec() };
    checks.push(check(
        "first curvature inserts to zero in its own plane",
        &ins(z_omega, &g_v),
        &[0.0; 4],
    ));
    checks.push(check(
        "first curvature inserted in the dual plane",
        &ins(z_omega, &g_star_v),
        &zeta_scaled(eps * r),
    ));
    checks.push(check(
        "second curvature inserts to zero in its own plane",
        &ins(z_star_omega_star, &g_star_v),
        &[0.0; 4],
    ));
    checks.push(check(
        "second curvature inserted in the dual plane",
        &ins(z_star_omega_star, &g_v),
        &zeta_scaled(-eps * r),
    ));
    checks.push(check(
        "first off-plane value inserts to zero",
        &ins(z_star_omega, &g_v),
        &[0.0; 4],
    ));
    checks.push(check(
        "first off-plane value carries the energy rate",
        &ins(z_star_omega, &g_star_v),
        &zeta_scaled(0.5 * l_phi2),
    ));
    checks.push(check(
        "second off-plane value inserts to zero",
        &ins(z_omega_star, &g_star_v),
        &[0.0; 4],
    ));
    checks.push(check(
        "second off-plane value carries the energy rate",
        &ins(z_omega_star, &g_v),
        &zeta_scaled(0.5 * l_phi2),
    ));

    // bivector contractions of the exterior derivatives
    let zb = zeta_bar.value(p);
    let d_g = ext_d(&g)?.value(p);
    let d_g_star = ext_d(&g_star)?.value(p);
    let i_g_dg = d_g.interior2(a_bar_v, zb)?;
    let i_gstar_dgstar = d_g_star.interior2(a_star_bar_v, zb)?;
    let i_gstar_dg = d_g.interior2(a_star_bar_v, zb)?;
    let i_g_dgstar = d_g_star.interior2(a_bar_v, zb)?;
    checks.push(check(
        "first bivector contraction carries the energy rate",
        i_g_dg.comps(),
        &zeta_scaled(0.5 * l_phi2),
    ));
    checks.push(check(
        "second bivector contraction carries the energy rate",
        i_gstar_dgstar.comps(),
        &zeta_scaled(0.5 * l_phi2),
    ));
    checks.push(check(
        "cross contraction carries the curvature flux",
        i_gstar_dg.comps(),
        &zeta_scaled(eps * r),
    ));
    checks.push(check(
        "reverse cross contraction carries the opposite flux",
        i_g_dgstar.comps(),
        &zeta_scaled(-eps * r),
    ));

    // codifferential fluxes; with the convention used here the common value
    // is minus the dual of the curvature flux, consistent with the cross
    // contractions through i(F-bar)H = *(F ^ *H)
    let co_g = geometry::codifferential(&g)?.value(p);
    let co_g_star = geometry::codifferential(&g_star)?.value(p);
    let co_lhs = co_g.wedge(&g_v)?;
    let co_lhs_star = co_g_star.wedge(&g_star_v)?;
    let want = zeta_v.hodge().scale(-eps * r);
    checks.push(check(
        "codifferential flux of the first volume form",
        co_lhs.comps(),
        want.comps(),
    ));
    checks.push(check(
        "codifferential flux of the second volume form",
        co_lhs_star.comps(),
        want.comps(),
    ));

    Ok(checks)
}

/// A (1,1)-tensor field of scalar entries, used for the vertical and
/// horizontal projections.
#[derive(Debug, Clone)]
pub struct ProjectionTensor {
    entries: Vec<ScalarField>, // row-major 4x4
}

impl ProjectionTensor {
    pub fn new(entries: [[ScalarField; 4]; 4]) -> ProjectionTensor {
        ProjectionTensor {
            entries: entries.into_iter().flatten().collect(),
        }
    }

    pub fn identity() -> ProjectionTensor {
        let mut entries = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                entries.push(ScalarField::constant(if i == j { 1.0 } else { 0.0 }));
            }
        }
        ProjectionTensor { entries }
    }

    pub fn entry(&self, row: usize, col: usize) -> &ScalarField {
        &self.entries[4 * row + col]
    }

    pub fn value(&self, p: Event) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entry(i, j).value(p);
            }
        }
        m
    }

    /// Complementary projection `id - P`.
    pub fn complement(&self) -> ProjectionTensor {
        let mut entries = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                let delta = ScalarField::constant(if i == j { 1.0 } else { 0.0 });
                entries.push(&delta - self.entry(i, j));
            }
        }
        ProjectionTensor { entries }
    }

    /// Transpose, the action on the cotangent side.
    pub fn transpose(&self) -> ProjectionTensor {
        let mut entries = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                entries.push(self.entry(j, i).clone());
            }
        }
        ProjectionTensor { entries }
    }

    /// `P X` as a vector field.
    pub fn apply(&self, x: &VectorField) -> VectorField {
        let comp = |i: usize| {
            let mut acc = ScalarField::zero();
            for j in 0..4 {
                acc = &acc + &(self.entry(i, j) * x.component(j));
            }
            acc
        };
        VectorField::from_components([comp(0), comp(1), comp(2), comp(3)])
    }

    /// Worst entry of `P o P - P` at a point.
    pub fn idempotency_residual(&self, p: Event) -> f64 {
        let m = self.value(p);
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for (k, row) in m.iter().enumerate() {
                    acc += m[i][k] * row[j];
                    let _ = k;
                }
                worst = worst.max((acc - m[i][j]).abs());
            }
        }
        worst
    }
}

/// Apply a projection value to a degree-2 value slotwise:
/// `(P w)(X, Y) = w(P X, P Y)`.
pub fn project_form2(p_val: Mat4, w: &FormValue) -> FormValue {
    assert_eq!(w.degree(), 2);
    let full = geometry::two_form_matrix(w);
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = 0.0;
            for s in 0..4 {
                for r in 0..4 {
                    acc += p_val[s][mu] * p_val[r][nu] * full[s][r];
                }
            }
            out[mu][nu] = acc;
        }
    }
    geometry::two_form_from_matrix(out)
}

/// The two vertical and two horizontal projections of a transverse pair,
/// with their cotangent counterparts.
#[derive(Debug, Clone)]
pub struct ProjectionSet {
    pub v: ProjectionTensor,
    pub v_tilde: ProjectionTensor,
    pub h: ProjectionTensor,
    pub h_tilde: ProjectionTensor,
    pub v_star: ProjectionTensor,
    pub v_tilde_star: ProjectionTensor,
    pub h_star: ProjectionTensor,
    pub h_tilde_star: ProjectionTensor,
}

/// Build the projection family from the transverse pair `(u, p)`.
pub fn build_projections(u: &ScalarField, p: &ScalarField, epsilon: f64) -> ProjectionSet {
    assert!(epsilon == 1.0 || epsilon == -1.0);
    let zero = ScalarField::zero;
    let one = || ScalarField::constant(1.0);
    let v = ProjectionTensor::new([
        [one(), zero(), u.scale(-epsilon), u.scale(-1.0)],
        [zero(), one(), p.scale(-epsilon), p.scale(-1.0)],
        [zero(), zero(), zero(), zero()],
        [zero(), zero(), zero(), zero()],
    ]);
    let v_tilde = ProjectionTensor::new([
        [one(), zero(), p.clone(), p.scale(epsilon)],
        [zero(), one(), u.scale(-1.0), u.scale(-epsilon)],
        [zero(), zero(), zero(), zero()],
        [zero(), zero(), zero(), zero()],
    ]);
    let h = v.complement();
    let h_tilde = v_tilde.complement();
    ProjectionSet {
        v_star: v.transpose(),
        v_tilde_star: v_tilde.transpose(),
        h_star: h.transpose(),
        h_tilde_star: h_tilde.transpose(),
        v,
        v_tilde,
        h,
        h_tilde,
    }
}

/// Mixed projections sharing the image plane: the pair built from the
/// substitutions `u -> a u + eps b p, p -> a p - eps b u` and
/// `u -> b u - eps a p, p -> b p + eps a u`, which are the matrix
/// combinations `V0 + a V1 - b V1~` and `V0 + b V1 + a V1~`.
pub fn mixed_projections(
    u: &ScalarField,
    p: &ScalarField,
    epsilon: f64,
    a: f64,
    b: f64,
) -> (ProjectionTensor, ProjectionTensor) {
    let u1 = &u.scale(a) + &p.scale(epsilon * b);
    let p1 = &p.scale(a) - &u.scale(epsilon * b);
    let u2 = &u.scale(b) - &p.scale(epsilon * a);
    let p2 = &p.scale(b) + &u.scale(epsilon * a);
    (
        build_projections(&u1, &p1, epsilon).v,
        build_projections(&u2, &p2, epsilon).v,
    )
}

/// Curvature and cocurvature of a nonlinear connection at a point:
/// `R(X, Y) = P([H X, H Y])` and `R~(X, Y) = H([P X, P Y])` with
/// `H = id - P`.
pub fn connection_curvature(
    projection: &ProjectionTensor,
    x: &VectorField,
    y: &VectorField,
    at: Event,
) -> (Vec4, Vec4) {
    let h = projection.complement();
    let apply_val = |m: &Mat4, v: Vec4| {
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += m[i][j] * v[j];
            }
        }
        out
    };

    let bracket_h = lie_bracket(&h.apply(x), &h.apply(y)).value(at);
    let curv = apply_val(&projection.value(at), bracket_h);

    let bracket_v = lie_bracket(&projection.apply(x), &projection.apply(y)).value(at);
    let cocurv = apply_val(&h.value(at), bracket_v);
    (curv, cocurv)
}

/// `-1/2 tr(P o Q)` of two projection values.
pub fn half_trace_product(p_val: Mat4, q_val: Mat4) -> f64 {
    let mut tr = 0.0;
    for i in 0..4 {
        for k in 0..4 {
            tr += p_val[i][k] * q_val[k][i];
        }
    }
    -0.5 * tr
}

/// Squared length scale
/// `(u^2 + p^2) / [(u_xi - eps u_z)^2 + (p_xi - eps p_z)^2]`.
pub fn l0_squared(frame: &PhLOFrame, p: Event) -> Result<f64> {
    let k2 = rate_squared(frame, p);
    if !(k2 > 1e-30) {
        return Err(Error::UndefinedScale { point: p });
    }
    Ok(frame.phi_squared().value(p) / k2)
}

/// The same scale recovered through the connection machinery: the amplitude
/// from `-1/2 tr(V o H*)`, the rate from the curvature pairing
/// `[V*(dx) ^ V*(dy)](Z1 ^ Z2)` scaled by the direction sign.
pub fn l0_squared_from_connection(
    v: &ProjectionTensor,
    v_tilde: &ProjectionTensor,
    epsilon: f64,
    at: Event,
) -> Result<f64> {
    let v_val = v.value(at);
    let h_star_val = v.complement().transpose().value(at);
    let phi2 = half_trace_product(v_val, h_star_val);

    let dz = VectorField::constant([0.0, 0.0, 1.0, 0.0]);
    let dxi = VectorField::constant([0.0, 0.0, 0.0, 1.0]);
    let (z1, _) = connection_curvature(v, &dz, &dxi, at);
    let (z2, _) = connection_curvature(v_tilde, &dz, &dxi, at);
    // cotangent projections of dx, dy are the first two rows of V
    let vdx = FormValue::new(1, v_val[0].to_vec());
    let vdy = FormValue::new(1, v_val[1].to_vec());
    let det = pair(&vdx, z1) * pair(&vdy, z2) - pair(&vdx, z2) * pair(&vdy, z1);
    let k2 = epsilon * det;
    if !(k2 > 1e-30) {
        return Err(Error::UndefinedScale { point: at });
    }
    Ok(phi2 / k2)
}

/// Whether `Y` is a shuffling symmetry of the distribution: every bracket
/// `[X_i, Y]` stays inside the distribution while `Y` itself stays outside,
/// over the whole sample.
pub fn shuffling_symmetry_check(
    d: &Distribution,
    y: &VectorField,
    points: &[Event],
    tol: f64,
) -> bool {
    for &p in points {
        let basis: Vec<Vec4> = d.fields.iter().map(|f| f.value(p)).collect();
        let scale = basis
            .iter()
            .flat_map(|v| v.iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        let (_, y_resid) = least_squares(&basis, y.value(p));
        if y_resid <= tol * scale {
            return false; // internal, not shuffling
        }
        for xi in &d.fields {
            let bracket = lie_bracket(xi, y).value(p);
            let (_, resid) = least_squares(&basis, bracket);
            if resid > tol * scale {
                return false; // bracket leaves the distribution
            }
        }
    }
    true
}

/// The 2x2 matrix expressing the brackets of the frame fields with the null
/// direction in the `(A-bar, A*-bar)` basis, together with the worst
/// reconstruction residual against the actual brackets.
pub fn frame_transition(frame: &PhLOFrame, p: Event) -> Result<([[f64; 2]; 2], f64)> {
    let phi2 = frame.phi_squared().value(p);
    if !(phi2 > 0.0) {
        return Err(Error::SingularAmplitude { point: p });
    }
    let l_phi2 = frame.rate(&frame.phi_squared(), p);
    let lpsi = phase_rate(frame, p)?;
    let eps = frame.epsilon;
    let diag = -0.5 * l_phi2 / phi2;
    let m = [[diag, eps * lpsi], [-eps * lpsi, diag]];

    let a_bar = frame.a_bar().value(p);
    let a_star_bar = frame.a_star_bar().value(p);
    let b1 = lie_bracket(&frame.a_bar(), &frame.zeta_bar()).value(p);
    let b2 = lie_bracket(&frame.a_star_bar(), &frame.zeta_bar()).value(p);
    let mut worst = 0.0f64;
    for k in 0..4 {
        let r1 = m[0][0] * a_bar[k] + m[1][0] * a_star_bar[k] - b1[k];
        let r2 = m[0][1] * a_bar[k] + m[1][1] * a_star_bar[k] - b2[k];
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    Ok((m, worst))
}
