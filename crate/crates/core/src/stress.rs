//! Maxwell stress tensor on space and the relativistic energy tensor:
//! construction, eigenstructure, invariants, divergence identities, boosts
//! and duality rotations.
//!
//! The energy tensor is stored with one index up and one down; raising and
//! lowering always go through the metric helpers in `geometry`, so there is
//! a single sign authority.

use crate::error::{Error, Result};
use crate::fields::{Axis, Event, VectorField, DEFAULT_LIGHT_SPEED};
use crate::geometry::{self, FormValue, Mat4, Vec4};
use crate::linalg::jacobi_eigen;

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

/// Relative threshold below which the field pair counts as degenerate for
/// the eigenvector classification: `|E x B| < threshold * (E^2 + B^2)`.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

fn scale3(a: Vec3, c: f64) -> Vec3 {
    [c * a[0], c * a[1], c * a[2]]
}

fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Symmetric spatial stress tensor of a field pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressTensor3(pub Mat3);

impl StressTensor3 {
    pub fn matrix(&self) -> Mat3 {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = &self.0;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((m[i][j] - m[j][i]).abs());
            }
        }
        worst
    }
}

/// `M^{ij} = E^i E^j + B^i B^j - delta^{ij} (E^2 + B^2) / 2`.
pub fn maxwell_stress(e: Vec3, b: Vec3) -> StressTensor3 {
    let half_energy = 0.5 * (dot3(e, e) + dot3(b, b));
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = e[i] * e[j] + b[i] * b[j];
            if i == j {
                m[i][j] -= half_energy;
            }
        }
    }
    StressTensor3(m)
}

/// Field invariants `I1 = B^2 - E^2` and `I2 = 2 E.B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldInvariants {
    pub i1: f64,
    pub i2: f64,
}

pub fn invariants(e: Vec3, b: Vec3) -> FieldInvariants {
    FieldInvariants {
        i1: dot3(b, b) - dot3(e, e),
        i2: 2.0 * dot3(e, b),
    }
}

/// Residual of the algebraic identity tying the invariants to the energy
/// density and the momentum magnitude:
/// `(I1^2 + I2^2) / 4 - [((E^2+B^2)/2)^2 - |E x B|^2]`.
pub fn invariants_identity_residual(e: Vec3, b: Vec3) -> f64 {
    let inv = invariants(e, b);
    let w = 0.5 * (dot3(e, e) + dot3(b, b));
    let s = cross3(e, b);
    0.25 * (inv.i1 * inv.i1 + inv.i2 * inv.i2) - (w * w - dot3(s, s))
}

/// Eigenstructure of the Maxwell stress tensor.
#[derive(Debug, Clone)]
pub enum StressEigen {
    /// Generic case `E x B != 0`: the closed-form eigenvalues with the
    /// transversal eigenvector aligned with `E x B` and the remaining two
    /// eigenvectors inside the plane spanned by `E` and `B`.
    Classified {
        lambda1: f64,
        lambda2: f64,
        lambda3: f64,
        /// Unit eigenvector for `lambda1`, collinear with `E x B`.
        transversal: Vec3,
        /// Unit eigenvectors for `lambda2` and `lambda3`, in span(E, B).
        plane: [Vec3; 2],
    },
    /// `E x B ~ 0`: classification skipped, raw symmetric eigensolve.
    Degenerate {
        eigenvalues: [f64; 3],
        eigenvectors: [Vec3; 3],
    },
}

impl StressEigen {
    pub fn eigenvalues(&self) -> [f64; 3] {
        match self {
            StressEigen::Classified {
                lambda1,
                lambda2,
                lambda3,
                ..
            } => [*lambda1, *lambda2, *lambda3],
            StressEigen::Degenerate { eigenvalues, .. } => *eigenvalues,
        }
    }
}

/// Closed-form eigenvalues `(-(E^2+B^2)/2, +sqrt(I1^2+I2^2)/2, -sqrt(...)/2)`
/// with the eigenvector classification, falling back to a plain symmetric
/// solve in the degenerate case.
pub fn stress_eigen(e: Vec3, b: Vec3) -> StressEigen {
    let s = cross3(e, b);
    let energy2 = dot3(e, e) + dot3(b, b);
    if norm3(s) < DEGENERACY_THRESHOLD * energy2 || energy2 == 0.0 {
        let (vals, vecs) = jacobi_eigen::<3>(maxwell_stress(e, b).0);
        let col = |j: usize| [vecs[0][j], vecs[1][j], vecs[2][j]];
        return StressEigen::Degenerate {
            eigenvalues: vals,
            eigenvectors: [col(0), col(1), col(2)],
        };
    }
    let inv = invariants(e, b);
    let lambda1 = -0.5 * energy2;
    let root = 0.5 * (inv.i1 * inv.i1 + inv.i2 * inv.i2).sqrt();
    let transversal = scale3(s, 1.0 / norm3(s));

    // The two in-plane eigenvectors come from the symmetric 2x2 block of the
    // stress tensor in an orthonormal basis of span(E, B).
    let e1 = if norm3(e) > 0.0 {
        scale3(e, 1.0 / norm3(e))
    } else {
        scale3(b, 1.0 / norm3(b))
    };
    let mut e2 = add3(b, scale3(e1, -dot3(b, e1)));
    if norm3(e2) < 1e-300 {
        e2 = cross3(transversal, e1);
    }
    let e2 = scale3(e2, 1.0 / norm3(e2));
    let m = maxwell_stress(e, b).0;
    let apply = |v: Vec3| -> Vec3 {
        [
            dot3(m[0], v),
            dot3(m[1], v),
            dot3(m[2], v),
        ]
    };
    let m11 = dot3(e1, apply(e1));
    let m12 = dot3(e1, apply(e2));
    let m22 = dot3(e2, apply(e2));
    let angle = 0.5 * (2.0 * m12).atan2(m11 - m22);
    let (c, sn) = (angle.cos(), angle.sin());
    let v_plus = add3(scale3(e1, c), scale3(e2, sn));
    let v_minus = add3(scale3(e1, -sn), scale3(e2, c));
    let lam_plus = dot3(v_plus, apply(v_plus));
    // order the pair as (+root, -root)
    let (p, q) = if lam_plus >= 0.0 {
        (v_plus, v_minus)
    } else {
        (v_minus, v_plus)
    };
    StressEigen::Classified {
        lambda1,
        lambda2: root,
        lambda3: -root,
        transversal,
        plane: [p, q],
    }
}

/// Both sides of the divergence identity
/// `div_i M^{ij} = [(rot E) x E + E div E + (rot B) x B + B div B]^j`,
/// the left side assembled by central differences of the stress tensor with
/// step `h`, the right side from the fields' own derivative paths.
pub fn stress_divergence_identity(
    e: &VectorField,
    b: &VectorField,
    p: Event,
    h: f64,
) -> Result<(Vec3, Vec3)> {
    if !(h > 0.0) {
        return Err(Error::BadConfig(format!("fd step {h} must be positive")));
    }
    let stress_at = |q: Event| maxwell_stress(e.value3(q), b.value3(q)).0;
    let mut lhs = [0.0; 3];
    for i in 0..3 {
        let axis = Axis::from_index(i);
        let plus = stress_at(p.offset(axis, h));
        let minus = stress_at(p.offset(axis, -h));
        for j in 0..3 {
            lhs[j] += (plus[i][j] - minus[i][j]) / (2.0 * h);
        }
    }
    let rot_e = e.rot(p);
    let rot_b = b.rot(p);
    let ev = e.value3(p);
    let bv = b.value3(p);
    let rhs = add3(
        add3(cross3(rot_e, ev), scale3(ev, e.div(p))),
        add3(cross3(rot_b, bv), scale3(bv, b.div(p))),
    );
    for v in lhs.iter().chain(rhs.iter()) {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "stress divergence",
                point: p,
            });
        }
    }
    Ok((lhs, rhs))
}

/// Field vectors in a frame moving with velocity `v` (light speed `c`).
pub fn lorentz_boost(e: Vec3, b: Vec3, v: Vec3, c: f64) -> Result<(Vec3, Vec3)> {
    let speed = norm3(v);
    if !(speed < c) {
        return Err(Error::Superluminal { speed, c });
    }
    if speed == 0.0 {
        return Ok((e, b));
    }
    let beta = speed / c;
    let gamma = 1.0 / (1.0 - beta * beta).sqrt();
    let v2 = speed * speed;
    let boost = |f: Vec3, g: Vec3, sign: f64| -> Vec3 {
        add3(
            add3(scale3(f, gamma), scale3(v, (1.0 - gamma) / v2 * dot3(f, v))),
            scale3(cross3(v, g), sign * gamma / c),
        )
    };
    Ok((boost(e, b, 1.0), boost(b, e, -1.0)))
}

/// Convenience wrapper with the default light speed.
pub fn lorentz_boost_unit_c(e: Vec3, b: Vec3, v: Vec3) -> Result<(Vec3, Vec3)> {
    lorentz_boost(e, b, v, DEFAULT_LIGHT_SPEED)
}

/// The rotated pair `(E cos a - B sin a, E sin a + B cos a)`, which leaves
/// the Maxwell stress tensor unchanged.
pub fn duality_rotation(e: Vec3, b: Vec3, alpha: f64) -> (Vec3, Vec3) {
    let (c, s) = (alpha.cos(), alpha.sin());
    (
        add3(scale3(e, c), scale3(b, -s)),
        add3(scale3(e, s), scale3(b, c)),
    )
}

/// The affine mix `(a E - b B, b E + a B)`, which scales the stress tensor
/// by `a^2 + b^2`.
pub fn affine_mix(e: Vec3, b: Vec3, a: f64, bb: f64) -> (Vec3, Vec3) {
    (
        add3(scale3(e, a), scale3(b, -bb)),
        add3(scale3(e, bb), scale3(b, a)),
    )
}

/// Duality rotation by a point-dependent angle field; the rotated pair still
/// generates the same stress tensor at every point, and the components keep
/// their analytic gradients when the inputs carry them.
pub fn duality_rotation_fields(
    e: &VectorField,
    b: &VectorField,
    alpha: &crate::fields::ScalarField,
) -> (VectorField, VectorField) {
    assert!(e.is_spatial() && b.is_spatial());
    let cos = alpha.cos();
    let sin = alpha.sin();
    let rotated_e = |i: usize| &(e.component(i) * &cos) - &(b.component(i) * &sin);
    let rotated_b = |i: usize| &(e.component(i) * &sin) + &(b.component(i) * &cos);
    (
        VectorField::spatial(rotated_e(0), rotated_e(1), rotated_e(2)),
        VectorField::spatial(rotated_b(0), rotated_b(1), rotated_b(2)),
    )
}

/// Relativistic energy tensor, one index up and one down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTensor4(pub Mat4);

impl EnergyTensor4 {
    pub fn matrix(&self) -> Mat4 {
        self.0
    }

    /// The `(xi, xi)` component, the energy density.
    pub fn energy_density(&self) -> f64 {
        self.0[3][3]
    }
}

/// `T_mu^nu = -1/2 [F_{mu sigma} F^{nu sigma} + (*F)_{mu sigma} (*F)^{nu sigma}]`
/// from a degree-2 value; invariant under `F -> *F`.
pub fn energy_tensor(f: &FormValue) -> EnergyTensor4 {
    assert_eq!(f.degree(), 2);
    let dual = f.hodge();
    let mut t = [[0.0; 4]; 4];
    for g in [f, &dual] {
        let lowered = geometry::two_form_matrix(g);
        let raised = geometry::two_form_matrix(&g.raise_all());
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for sigma in 0..4 {
                    acc += lowered[mu][sigma] * raised[nu][sigma];
                }
                t[mu][nu] -= 0.5 * acc;
            }
        }
    }
    EnergyTensor4(t)
}

/// Invariants from the relativistic field value: `I1 = F_{ab} F^{ab} / 2`,
/// `I2 = F_{ab} (*F)^{ab} / 2`.
pub fn invariants_from_form(f: &FormValue) -> FieldInvariants {
    let up = f.raise_all();
    let dual_up = f.hodge().raise_all();
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    for k in 0..6 {
        i1 += f.comp(k) * up.comp(k);
        i2 += f.comp(k) * dual_up.comp(k);
    }
    FieldInvariants { i1, i2 }
}

/// `T_{mu sigma} T^{nu sigma} - 1/4 (I1^2 + I2^2) delta_mu^nu`, which
/// vanishes for every field value.
pub fn rainich_residual(f: &FormValue) -> Mat4 {
    let t = energy_tensor(f).0;
    let inv = invariants_from_form(f);
    let quarter = 0.25 * (inv.i1 * inv.i1 + inv.i2 * inv.i2);
    // T_{mu sigma} T^{nu sigma} as a (1,1) matrix
    let mut r = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = 0.0;
            for sigma in 0..4 {
                let t_lower = t[mu][sigma] * geometry::METRIC_DIAG[sigma];
                let mut t_upper = 0.0;
                for beta in 0..4 {
                    if beta == nu {
                        t_upper = geometry::METRIC_DIAG[nu] * t[beta][sigma];
                    }
                }
                acc += t_lower * t_upper;
            }
            r[mu][nu] = acc;
            if mu == nu {
                r[mu][nu] -= quarter;
            }
        }
    }
    r
}

/// The divergence of the energy tensor along three independent routes.
#[derive(Debug, Clone, Copy)]
pub struct EnergyDivergence {
    /// Central differences of the tensor field itself.
    pub finite_difference: Vec4,
    /// Restricted-sum contraction with the exterior derivatives:
    /// `sum_{a<b} [F^{ab} (dF)_{ab mu} + (*F)^{ab} (d*F)_{ab mu}]`.
    pub contraction: Vec4,
    /// Codifferential form `F_{mu nu} (dF-co)^nu + (*F)_{mu nu} (d*F-co)^nu`.
    pub codifferential: Vec4,
}

/// Contraction `sum_{a<b} F^{ab} H_{ab mu}` of a degree-2 value with a
/// degree-3 value.
pub fn contract_2_3(f: &FormValue, h: &FormValue) -> Vec4 {
    assert_eq!(f.degree(), 2);
    assert_eq!(h.degree(), 3);
    let up = f.raise_all();
    let mut out = [0.0; 4];
    for mu in 0..4 {
        let mut acc = 0.0;
        for (pos, idx) in geometry::basis_indices(2).iter().enumerate() {
            if idx.contains(&mu) {
                continue;
            }
            acc += up.comp(pos) * h.comp_at(&[idx[0], idx[1], mu]);
        }
        out[mu] = acc;
    }
    out
}

/// Evaluate the three divergence routes of the energy tensor of a form
/// field at a point; `h` is the step for the finite-difference route.
pub fn energy_divergence(f: &crate::geometry::KForm, p: Event, h: f64) -> Result<EnergyDivergence> {
    if f.degree() != 2 {
        return Err(Error::BadDegree {
            context: "energy divergence",
            degree: f.degree(),
        });
    }
    let mut fd = [0.0; 4];
    for nu in 0..4 {
        let axis = Axis::from_index(nu);
        let plus = energy_tensor(&f.value(p.offset(axis, h))).0;
        let minus = energy_tensor(&f.value(p.offset(axis, -h))).0;
        for mu in 0..4 {
            fd[mu] += (plus[mu][nu] - minus[mu][nu]) / (2.0 * h);
        }
    }

    let d_f = geometry::ext_d(f)?.value(p);
    let dual = geometry::hodge(f);
    let d_dual = geometry::ext_d(&dual)?.value(p);
    let fv = f.value(p);
    let dual_v = fv.hodge();
    let a = contract_2_3(&fv, &d_f);
    let b = contract_2_3(&dual_v, &d_dual);
    let contraction = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];

    let co_f = geometry::codifferential(f)?.value(p);
    let co_dual = geometry::codifferential(&dual)?.value(p);
    let f_mat = geometry::two_form_matrix(&fv);
    let dual_mat = geometry::two_form_matrix(&dual_v);
    let co_f_up = raise1(&co_f);
    let co_dual_up = raise1(&co_dual);
    let mut codiff = [0.0; 4];
    for mu in 0..4 {
        let mut acc = 0.0;
        for nu in 0..4 {
            acc += f_mat[mu][nu] * co_f_up[nu] + dual_mat[mu][nu] * co_dual_up[nu];
        }
        codiff[mu] = acc;
    }

    for v in fd.iter().chain(contraction.iter()).chain(codiff.iter()) {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "energy divergence",
                point: p,
            });
        }
    }
    Ok(EnergyDivergence {
        finite_difference: fd,
        contraction,
        codifferential: codiff,
    })
}

fn raise1(alpha: &FormValue) -> Vec4 {
    assert_eq!(alpha.degree(), 1);
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = geometry::METRIC_DIAG[i] * alpha.comp(i);
    }
    out
}
