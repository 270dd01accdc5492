//! Residual evaluators for the nonlinear field equations in three-vector and
//! relativistic form, the property suite for nonlinear solutions, and
//! helicity functionals.
//!
//! The three-vector residuals measure the momentum balance of the two
//! partner fields `(E, B)` and `(-B, E)`; the relativistic residuals are the
//! corresponding contractions of the field strength with its exterior
//! derivative. Both pipelines are implemented independently and tied
//! together by a fixed component dictionary, which the tests verify.

use crate::error::Result;
use crate::fields::{Axis, Event, QuadratureSpec, ScalarField, VectorField};
use crate::geometry::{self, FormValue, KForm, Vec4};
use crate::stress::{cross3, dot3, Vec3};

/// An electromagnetic state: two spatial vector fields, generally dependent
/// on the fourth coordinate.
#[derive(Debug, Clone)]
pub struct EBState {
    pub e: VectorField,
    pub b: VectorField,
}

impl EBState {
    pub fn new(e: VectorField, b: VectorField) -> EBState {
        assert!(e.is_spatial() && b.is_spatial(), "state fields must be spatial");
        EBState { e, b }
    }

    /// `rot E + dB/dxi`
    pub fn faraday_vector(&self, p: Event) -> Vec3 {
        let r = self.e.rot(p);
        let dt = self.b.dt3(p);
        [r[0] + dt[0], r[1] + dt[1], r[2] + dt[2]]
    }

    /// `rot B - dE/dxi`
    pub fn ampere_vector(&self, p: Event) -> Vec3 {
        let r = self.b.rot(p);
        let dt = self.e.dt3(p);
        [r[0] - dt[0], r[1] - dt[1], r[2] - dt[2]]
    }

    /// The partner state `(a E - b B, b E + a B)`.
    pub fn mixed(&self, a: f64, b: f64) -> EBState {
        let comp = |i: usize, ca: f64, cb: f64| {
            &self.e.component(i).scale(ca) + &self.b.component(i).scale(cb)
        };
        EBState::new(
            VectorField::spatial(comp(0, a, -b), comp(1, a, -b), comp(2, a, -b)),
            VectorField::spatial(comp(0, b, a), comp(1, b, a), comp(2, b, a)),
        )
    }
}

/// Momentum-balance residual of the first partner field:
/// `(rot E + dB/dxi) x E + B div B`.
pub fn delta11(s: &EBState, p: Event) -> Vec3 {
    let f = s.faraday_vector(p);
    let e = s.e.value3(p);
    let b = s.b.value3(p);
    let div_b = s.b.div(p);
    let c = cross3(f, e);
    [c[0] + b[0] * div_b, c[1] + b[1] * div_b, c[2] + b[2] * div_b]
}

/// Momentum-balance residual of the second partner field:
/// `(rot B - dE/dxi) x B + E div E`.
pub fn delta22(s: &EBState, p: Event) -> Vec3 {
    let a = s.ampere_vector(p);
    let e = s.e.value3(p);
    let b = s.b.value3(p);
    let div_e = s.e.div(p);
    let c = cross3(a, b);
    [c[0] + e[0] * div_e, c[1] + e[1] * div_e, c[2] + e[2] * div_e]
}

/// Mutual-exchange residual:
/// `(rot E + dB/dxi) x B - E div B + (rot B - dE/dxi) x E - B div E`.
pub fn delta_exchange(s: &EBState, p: Event) -> Vec3 {
    let f = s.faraday_vector(p);
    let a = s.ampere_vector(p);
    let e = s.e.value3(p);
    let b = s.b.value3(p);
    let div_e = s.e.div(p);
    let div_b = s.b.div(p);
    let c1 = cross3(f, b);
    let c2 = cross3(a, e);
    [
        c1[0] - e[0] * div_b + c2[0] - b[0] * div_e,
        c1[1] - e[1] * div_b + c2[1] - b[1] * div_e,
        c1[2] - e[2] * div_b + c2[2] - b[2] * div_e,
    ]
}

/// The full force balance, assembled term by term. Algebraically identical
/// to `delta11 + delta22`, evaluated through its own expression tree.
pub fn full_balance(s: &EBState, p: Event) -> Vec3 {
    let f = s.faraday_vector(p);
    let a = s.ampere_vector(p);
    let e = s.e.value3(p);
    let b = s.b.value3(p);
    let div_e = s.e.div(p);
    let div_b = s.b.div(p);
    let c1 = cross3(f, e);
    let c2 = cross3(a, b);
    [
        c1[0] + e[0] * div_e + c2[0] + b[0] * div_b,
        c1[1] + e[1] * div_e + c2[1] + b[1] * div_b,
        c1[2] + e[2] * div_e + c2[2] + b[2] * div_b,
    ]
}

/// Energy-flux balance `d/dxi (E^2 + B^2)/2 + div(E x B)`.
pub fn poynting_residual(s: &EBState, p: Event) -> f64 {
    let mut energy = ScalarField::zero();
    for i in 0..3 {
        energy = &energy + &(s.e.component(i) * s.e.component(i));
        energy = &energy + &(s.b.component(i) * s.b.component(i));
    }
    let d_energy = 0.5 * energy.partial_value(Axis::Xi, p);

    let poynting = |j: usize, k: usize| {
        &(s.e.component(j) * s.b.component(k)) - &(s.e.component(k) * s.b.component(j))
    };
    let sx = poynting(1, 2);
    let sy = poynting(2, 0);
    let sz = poynting(0, 1);
    let div_s = sx.partial_value(Axis::X, p)
        + sy.partial_value(Axis::Y, p)
        + sz.partial_value(Axis::Z, p);
    d_energy + div_s
}

/// Point residuals of the three balance equations.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    pub delta11: Vec3,
    pub delta22: Vec3,
    pub exchange: Vec3,
    pub max_abs: f64,
}

pub fn residual_report(s: &EBState, p: Event) -> ResidualReport {
    let d11 = delta11(s, p);
    let d22 = delta22(s, p);
    let ex = delta_exchange(s, p);
    let max_abs = d11
        .iter()
        .chain(d22.iter())
        .chain(ex.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    ResidualReport {
        delta11: d11,
        delta22: d22,
        exchange: ex,
        max_abs,
    }
}

/// Maximum violations of the structural properties of nonlinear solutions
/// over a sample of events. Reports magnitudes, never fails.
#[derive(Debug, Clone, Copy, Default)]
pub struct PropertyReport {
    /// `E . B`
    pub orthogonality: f64,
    /// `(rot E + dB/dxi) . B`
    pub faraday_transversality: f64,
    /// `(rot B - dE/dxi) . E`
    pub ampere_transversality: f64,
    /// residual of the mixed partner state `(aE - bB, bE + aB)`
    pub closure: f64,
    /// `E^2 - B^2`
    pub energy_parity: f64,
    /// `B . rot B - E . rot E`
    pub helicity_parity: f64,
}

impl PropertyReport {
    pub fn max_violation(&self) -> f64 {
        [
            self.orthogonality,
            self.faraday_transversality,
            self.ampere_transversality,
            self.closure,
            self.energy_parity,
            self.helicity_parity,
        ]
        .into_iter()
        .fold(0.0f64, f64::max)
    }
}

/// Evaluate the five properties over a sample; the closure property uses the
/// fixed real pair `(a, b)`.
pub fn property_suite(s: &EBState, points: &[Event], a: f64, b: f64) -> PropertyReport {
    let mixed = s.mixed(a, b);
    let mut report = PropertyReport::default();
    for &p in points {
        let e = s.e.value3(p);
        let bv = s.b.value3(p);
        let f = s.faraday_vector(p);
        let am = s.ampere_vector(p);
        report.orthogonality = report.orthogonality.max(dot3(e, bv).abs());
        report.faraday_transversality = report.faraday_transversality.max(dot3(f, bv).abs());
        report.ampere_transversality = report.ampere_transversality.max(dot3(am, e).abs());
        report.closure = report.closure.max(residual_report(&mixed, p).max_abs);
        report.energy_parity = report
            .energy_parity
            .max((dot3(e, e) - dot3(bv, bv)).abs());
        report.helicity_parity = report
            .helicity_parity
            .max((dot3(bv, s.b.rot(p)) - dot3(e, s.e.rot(p))).abs());
    }
    report
}

/// Local helicity `V . rot V`.
pub fn helicity_density(v: &VectorField, p: Event) -> f64 {
    dot3(v.value3(p), v.rot(p))
}

/// Spatial integral of the local helicity at fixed `xi`.
pub fn integral_helicity(v: &VectorField, quad: &QuadratureSpec, xi: f64) -> Result<f64> {
    let field = v.clone();
    let mut density = ScalarField::from_fn(move |p| helicity_density(&field, p));
    if let Some(support) = v.component(0).support() {
        density = density.with_support(support);
    }
    crate::fields::integrate3(&density, quad, xi)
}

/// The field strength of a state in the fixed component dictionary:
/// electric components fill the mixed space-time slots, magnetic components
/// the purely spatial ones.
pub fn form_from_eb(s: &EBState) -> KForm {
    let e = |i: usize| s.e.component(i).clone();
    let b = |i: usize| s.b.component(i).clone();
    // component order (01, 02, 03, 12, 13, 23)
    KForm::new(
        2,
        vec![
            b(2),
            b(1).scale(-1.0),
            e(0),
            b(0),
            e(1),
            e(2),
        ],
    )
}

/// Inverse of `form_from_eb`.
pub fn eb_from_form(f: &KForm) -> EBState {
    assert_eq!(f.degree(), 2);
    EBState::new(
        VectorField::spatial(
            f.component(2).clone(),
            f.component(4).clone(),
            f.component(5).clone(),
        ),
        VectorField::spatial(
            f.component(3).clone(),
            f.component(1).scale(-1.0),
            f.component(0).clone(),
        ),
    )
}

/// Relativistic residual triple at a point:
/// `r1 = F^{ab} (dF)_{ab .}`, `r2 = (*F)^{ab} (d*F)_{ab .}`,
/// `r3 = (*F)^{ab} (dF)_{ab .} + F^{ab} (d*F)_{ab .}` (sums over a < b).
pub fn relativistic_residuals(f: &KForm, p: Event) -> Result<[Vec4; 3]> {
    let fv = f.value(p);
    let dual_v = fv.hodge();
    let d_f = geometry::ext_d(f)?.value(p);
    let d_dual = geometry::ext_d(&geometry::hodge(f))?.value(p);
    let r1 = crate::stress::contract_2_3(&fv, &d_f);
    let r2 = crate::stress::contract_2_3(&dual_v, &d_dual);
    let a = crate::stress::contract_2_3(&dual_v, &d_f);
    let b = crate::stress::contract_2_3(&fv, &d_dual);
    let r3 = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
    Ok([r1, r2, r3])
}

/// Component dictionary tying the relativistic residuals to the
/// three-vector ones, evaluated at a point. Returns the maximum mismatch of
/// `r1 <-> delta11`, `r2 <-> delta22`, `r3 <-> -exchange` on the spatial
/// slots, and of the time slots against the transversality dot products.
pub fn residual_dictionary_mismatch(s: &EBState, p: Event) -> Result<f64> {
    let f = form_from_eb(s);
    let [r1, r2, r3] = relativistic_residuals(&f, p)?;
    let d11 = delta11(s, p);
    let d22 = delta22(s, p);
    let ex = delta_exchange(s, p);
    let mut worst = 0.0f64;
    for k in 0..3 {
        worst = worst.max((r1[k] - d11[k]).abs());
        worst = worst.max((r2[k] - d22[k]).abs());
        worst = worst.max((r3[k] + ex[k]).abs());
    }
    let e = s.e.value3(p);
    let b = s.b.value3(p);
    let fvec = s.faraday_vector(p);
    let avec = s.ampere_vector(p);
    worst = worst.max((r1[3] - dot3(b, fvec)).abs());
    worst = worst.max((r2[3] + dot3(e, avec)).abs());
    worst = worst.max((r3[3] - (dot3(e, fvec) - dot3(b, avec))).abs());
    Ok(worst)
}

/// Null-structure check of the field strength value: both invariants.
pub fn null_invariants(f: &FormValue) -> (f64, f64) {
    let inv = crate::stress::invariants_from_form(f);
    (inv.i1, inv.i2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Box3, QuadratureSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max3(v: Vec3) -> f64 {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Transverse two-component state `E = (u, p, 0)`, `B = eps (p, -u, 0)`.
    fn transverse_state(u: ScalarField, p: ScalarField, eps: f64) -> EBState {
        EBState::new(
            VectorField::spatial(u.clone(), p.clone(), ScalarField::zero()),
            VectorField::spatial(p.scale(eps), u.scale(-eps), ScalarField::zero()),
        )
    }

    /// Polynomial scalar field with analytic gradient, for oracle work.
    fn poly(c: [f64; 5]) -> ScalarField {
        ScalarField::from_fn_with_grad(
            move |q| {
                c[0] * q.x + c[1] * q.y * q.y + c[2] * q.z + c[3] * q.xi * q.x + c[4] * q.y * q.z
            },
            move |q| {
                [
                    c[0] + c[3] * q.xi,
                    2.0 * c[1] * q.y + c[4] * q.z,
                    c[2] + c[4] * q.y,
                    c[3] * q.x,
                ]
            },
        )
    }

    fn random_state(rng: &mut ChaCha8Rng) -> EBState {
        let mut f = || {
            poly([
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            ])
        };
        EBState::new(
            VectorField::spatial(f(), f(), f()),
            VectorField::spatial(f(), f(), f()),
        )
    }

    #[test]
    fn delta11_of_shear_field_matches_hand_value() {
        // E = (y, 0, 0), B = 0: rot E = (0,0,-1), residual = (0, -y, 0)
        let s = EBState::new(
            VectorField::spatial(
                ScalarField::coordinate(Axis::Y),
                ScalarField::zero(),
                ScalarField::zero(),
            ),
            VectorField::spatial(ScalarField::zero(), ScalarField::zero(), ScalarField::zero()),
        );
        let p = Event::new(0.3, 1.7, -0.2, 0.5);
        let d = delta11(&s, p);
        assert!((d[0]).abs() < 1e-14);
        assert!((d[1] + 1.7).abs() < 1e-12, "got {}", d[1]);
        assert!((d[2]).abs() < 1e-14);
    }

    #[test]
    fn static_radial_field_solves_all_residuals() {
        let radial = |i: usize| {
            ScalarField::from_fn(move |p| {
                let r2 = p.x * p.x + p.y * p.y + p.z * p.z;
                [p.x, p.y, p.z][i] / (r2 * r2.sqrt())
            })
        };
        let s = EBState::new(
            VectorField::spatial(radial(0), radial(1), radial(2)),
            VectorField::spatial(ScalarField::zero(), ScalarField::zero(), ScalarField::zero()),
        );
        let p = Event::new(0.9, -0.4, 0.6, 0.0);
        let r = residual_report(&s, p);
        assert!(r.max_abs < 1e-6, "got {}", r.max_abs);
        assert!(max3(full_balance(&s, p)) < 1e-6);
    }

    #[test]
    fn delta22_mirrors_delta11_under_partner_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = random_state(&mut rng);
            // (E, B) -> (-B, E)
            let swapped = EBState::new(
                VectorField::spatial(
                    s.b.component(0).scale(-1.0),
                    s.b.component(1).scale(-1.0),
                    s.b.component(2).scale(-1.0),
                ),
                VectorField::spatial(
                    s.e.component(0).clone(),
                    s.e.component(1).clone(),
                    s.e.component(2).clone(),
                ),
            );
            let p = Event::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let d22 = delta22(&s, p);
            let d11_swapped = delta11(&swapped, p);
            for k in 0..3 {
                assert!((d22[k] - d11_swapped[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_balance_equals_sum_of_partner_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let s = random_state(&mut rng);
            let p = Event::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let fb = full_balance(&s, p);
            let d11 = delta11(&s, p);
            let d22 = delta22(&s, p);
            for k in 0..3 {
                assert!((fb[k] - d11[k] - d22[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exchange_residual_matches_term_oracle() {
        // independent reassembly of the exchange expression at a point
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_state(&mut rng);
        let p = Event::new(0.4, -0.7, 0.2, 1.1);
        let f = s.faraday_vector(p);
        let a = s.ampere_vector(p);
        let e = s.e.value3(p);
        let b = s.b.value3(p);
        let oracle = [
            f[1] * b[2] - f[2] * b[1] - e[0] * s.b.div(p) + a[1] * e[2] - a[2] * e[1]
                - b[0] * s.e.div(p),
            f[2] * b[0] - f[0] * b[2] - e[1] * s.b.div(p) + a[2] * e[0] - a[0] * e[2]
                - b[1] * s.e.div(p),
            f[0] * b[1] - f[1] * b[0] - e[2] * s.b.div(p) + a[0] * e[1] - a[1] * e[0]
                - b[2] * s.e.div(p),
        ];
        let got = delta_exchange(&s, p);
        for k in 0..3 {
            assert!((got[k] - oracle[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn running_wave_pair_balances_poynting() {
        // u, p arbitrary smooth functions of (x, y, xi + eps z)
        for eps in [1.0f64, -1.0] {
            let wave = move |a: f64, b: f64| {
                ScalarField::from_fn_with_grad(
                    move |q| (a * q.x + b * (q.xi + eps * q.z)).sin() * (0.5 * q.y).cos(),
                    move |q| {
                        let arg = a * q.x + b * (q.xi + eps * q.z);
                        let c = arg.cos() * (0.5 * q.y).cos();
                        [
                            a * c,
                            -0.5 * arg.sin() * (0.5 * q.y).sin(),
                            eps * b * c,
                            b * c,
                        ]
                    },
                )
            };
            let s = transverse_state(wave(0.7, 1.3), wave(-0.4, 0.9), eps);
            let p = Event::new(0.3, 0.8, -0.5, 0.2);
            assert!(poynting_residual(&s, p).abs() < 1e-10);
            assert!(max3(full_balance(&s, p)) < 1e-10);
        }
    }

    #[test]
    fn poynting_residual_zero_for_constants() {
        let s = EBState::new(
            VectorField::spatial(
                ScalarField::constant(1.0),
                ScalarField::constant(-2.0),
                ScalarField::constant(0.5),
            ),
            VectorField::spatial(
                ScalarField::constant(0.3),
                ScalarField::constant(0.0),
                ScalarField::constant(2.0),
            ),
        );
        assert_eq!(poynting_residual(&s, Event::origin()), 0.0);
    }

    #[test]
    fn plane_wave_properties() {
        // E = (cos(xi - z), 0, 0), B = (0, cos(xi - z), 0)
        let c = ScalarField::from_fn_with_grad(
            |p| (p.xi - p.z).cos(),
            |p| [0.0, 0.0, (p.xi - p.z).sin(), -(p.xi - p.z).sin()],
        );
        let s = EBState::new(
            VectorField::spatial(c.clone(), ScalarField::zero(), ScalarField::zero()),
            VectorField::spatial(ScalarField::zero(), c.clone(), ScalarField::zero()),
        );
        let points: Vec<Event> = (0..20)
            .map(|i| Event::new(0.1 * i as f64, -0.2, 0.3 * i as f64, 0.05 * i as f64))
            .collect();
        let r = property_suite(&s, &points, 2.0, -1.0);
        assert!(r.orthogonality < 1e-14);
        assert!(r.faraday_transversality < 1e-10);
        assert!(r.ampere_transversality < 1e-10);
        assert!(r.energy_parity < 1e-14);
        assert!(r.helicity_parity < 1e-10);
    }

    #[test]
    fn scaled_field_breaks_energy_parity() {
        let c = ScalarField::from_fn_with_grad(
            |p| (p.xi - p.z).cos(),
            |p| [0.0, 0.0, (p.xi - p.z).sin(), -(p.xi - p.z).sin()],
        );
        let s = EBState::new(
            VectorField::spatial(c.scale(2.0), ScalarField::zero(), ScalarField::zero()),
            VectorField::spatial(ScalarField::zero(), c.clone(), ScalarField::zero()),
        );
        let p = Event::new(0.0, 0.0, 0.4, 0.9);
        let r = property_suite(&s, &[p], 1.0, 0.0);
        let expect = 3.0 * (p.xi - p.z).cos().powi(2);
        assert!((r.energy_parity - expect).abs() < 1e-12, "got {}", r.energy_parity);
    }

    #[test]
    fn helicity_of_gradient_field_vanishes() {
        // V = grad(f) for f = x y + z^2: rot V = 0 everywhere
        let v = VectorField::spatial(
            ScalarField::coordinate(Axis::Y),
            ScalarField::coordinate(Axis::X),
            ScalarField::coordinate(Axis::Z).scale(2.0),
        );
        for &p in &[Event::new(0.4, -0.2, 0.9, 0.0), Event::new(-1.0, 2.0, 0.1, 0.5)] {
            assert!(helicity_density(&v, p).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_helicity_of_beltrami_block() {
        // V = (sin z, cos z, 0) has V . rot V = 1; integrate over a unit box
        let v = VectorField::spatial(
            ScalarField::from_fn_with_grad(|p| p.z.sin(), |p| [0.0, 0.0, p.z.cos(), 0.0]),
            ScalarField::from_fn_with_grad(|p| p.z.cos(), |p| [0.0, 0.0, -p.z.sin(), 0.0]),
            ScalarField::zero(),
        );
        let quad = QuadratureSpec::simpson_box(Box3::new([0.0; 3], [1.0; 3]), 21);
        let h = integral_helicity(&v, &quad, 0.0).unwrap();
        assert!((h - 1.0).abs() < 1e-10, "got {h}");
    }

    #[test]
    fn form_dictionary_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = random_state(&mut rng);
        let f = form_from_eb(&s);
        let back = eb_from_form(&f);
        let p = Event::new(0.2, 0.4, -0.6, 0.8);
        assert_eq!(s.e.value3(p), back.e.value3(p));
        assert_eq!(s.b.value3(p), back.b.value3(p));
    }

    #[test]
    fn relativistic_residuals_vanish_for_closed_forms() {
        // constant F has dF = 0 and d*F = 0
        let f = KForm::constant(2, &[0.4, -0.2, 0.9, 0.3, -0.7, 0.1]);
        let [r1, r2, r3] = relativistic_residuals(&f, Event::origin()).unwrap();
        for v in r1.iter().chain(r2.iter()).chain(r3.iter()) {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn residual_dictionary_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let s = random_state(&mut rng);
            let p = Event::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let mismatch = residual_dictionary_mismatch(&s, p).unwrap();
            assert!(mismatch < 1e-10, "dictionary mismatch {mismatch}");
        }
    }

    #[test]
    fn mixing_law_of_partner_residuals() {
        // under (E, B) -> (aE - bB, bE + aB) the first partner residual
        // transforms as a^2 d11 + b^2 d22 - ab exchange; in particular the
        // residuals of a solution stay zero up to the a^2 + b^2 scale
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let s = random_state(&mut rng);
            let p = Event::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let (a, b) = (3.0, 4.0);
            let d11 = delta11(&s, p);
            let d22 = delta22(&s, p);
            let ex = delta_exchange(&s, p);
            let mixed = delta11(&s.mixed(a, b), p);
            for k in 0..3 {
                let want = a * a * d11[k] + b * b * d22[k] - a * b * ex[k];
                assert!((mixed[k] - want).abs() < 1e-9, "slot {k}");
            }
        }
    }
}
