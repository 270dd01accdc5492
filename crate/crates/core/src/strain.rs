//! Strain tensors of the flat metric along the frame fields: the Lie
//! derivative of the metric (without the conventional one-half factor),
//! its contractions with the frame, and the strain-flux identities that tie
//! deformation to the energy-momentum exchange.

use crate::error::Result;
use crate::fields::{Axis, Event, ScalarField, VectorField};
use crate::frobenius::{check, curvature_factor, rate_squared, IdentityCheck, PhLOFrame};
use crate::geometry::{ext_d, lie_bracket, FormValue, Mat4, Vec4, METRIC_DIAG};

/// Symmetric strain tensor `(L_X eta)_{mu nu}`, stored as scalar entries.
#[derive(Debug, Clone)]
pub struct StrainTensor {
    entries: Vec<ScalarField>, // row-major upper triangle mirrored
}

impl StrainTensor {
    pub fn entry(&self, mu: usize, nu: usize) -> &ScalarField {
        &self.entries[4 * mu + nu]
    }

    pub fn value(&self, p: Event) -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (mu, row) in m.iter_mut().enumerate() {
            for (nu, v) in row.iter_mut().enumerate() {
                *v = self.entry(mu, nu).value(p);
            }
        }
        m
    }

    /// Largest asymmetry of the value; zero by construction.
    pub fn asymmetry(&self, p: Event) -> f64 {
        let m = self.value(p);
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for nu in 0..4 {
                worst = worst.max((m[mu][nu] - m[nu][mu]).abs());
            }
        }
        worst
    }

    /// Contraction with a vector on the second slot, `D_{mu nu} X^nu`,
    /// returned as a covariant value.
    pub fn contract(&self, x: Vec4, p: Event) -> Vec4 {
        let m = self.value(p);
        let mut out = [0.0; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu] += m[mu][nu] * x[nu];
            }
        }
        out
    }

    /// Full contraction `D_{mu nu} X^mu Y^nu`.
    pub fn contract2(&self, x: Vec4, y: Vec4, p: Event) -> f64 {
        let c = self.contract(y, p);
        (0..4).map(|mu| c[mu] * x[mu]).sum()
    }
}

/// The strain of the flat metric along a vector field,
/// `(L_X eta)_{mu nu} = eta_{mu sigma} d_nu X^sigma + eta_{nu sigma} d_mu X^sigma`.
pub fn strain(x: &VectorField) -> StrainTensor {
    let mut entries = Vec::with_capacity(16);
    for mu in 0..4 {
        for nu in 0..4 {
            let a = x
                .component(mu)
                .partial_field(Axis::from_index(nu))
                .scale(METRIC_DIAG[mu]);
            let b = x
                .component(nu)
                .partial_field(Axis::from_index(mu))
                .scale(METRIC_DIAG[nu]);
            entries.push(&a + &b);
        }
    }
    StrainTensor { entries }
}

/// Independent oracle: the strain through the flow definition. Pulls the
/// metric back along the approximate flow `x + t X(x)` with numeric
/// Jacobians and differences in `t`.
pub fn strain_by_flow(x: &VectorField, p: Event, t: f64, h: f64) -> Mat4 {
    let pullback = |t: f64| -> Mat4 {
        // J^sigma_mu = d(phi_t^sigma)/dx^mu by central differences
        let mut j = [[0.0; 4]; 4];
        for mu in 0..4 {
            let axis = Axis::from_index(mu);
            let plus = p.offset(axis, h);
            let minus = p.offset(axis, -h);
            for sigma in 0..4 {
                let fp = plus.coords()[sigma] + t * x.component(sigma).value(plus);
                let fm = minus.coords()[sigma] + t * x.component(sigma).value(minus);
                j[sigma][mu] = (fp - fm) / (2.0 * h);
            }
        }
        let mut g = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                for (sigma, eta) in METRIC_DIAG.iter().enumerate() {
                    g[mu][nu] += eta * j[sigma][mu] * j[sigma][nu];
                }
            }
        }
        g
    };
    let plus = pullback(t);
    let minus = pullback(-t);
    let mut out = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            out[mu][nu] = (plus[mu][nu] - minus[mu][nu]) / (2.0 * t);
        }
    }
    out
}

/// Strain contractions of the frame at a point, every identity compared
/// against its independently assembled counterpart.
pub fn strain_contractions(frame: &PhLOFrame, p: Event) -> Vec<IdentityCheck> {
    let eps = frame.epsilon;
    let d = strain(&frame.a_bar());
    let d_star = strain(&frame.a_star_bar());
    let zeta_bar = frame.zeta_bar().value(p);
    let a_bar = frame.a_bar().value(p);
    let a_star_bar = frame.a_star_bar().value(p);
    let lu = frame.rate(&frame.u, p);
    let lp = frame.rate(&frame.p, p);
    let l_phi2 = frame.rate(&frame.phi_squared(), p);
    let r = curvature_factor(frame, p);

    let mut checks = Vec::new();
    checks.push(check(
        "strain of the first frame field annihilates the null pair",
        &[d.contract2(zeta_bar, zeta_bar, p)],
        &[0.0],
    ));
    checks.push(check(
        "strain of the second frame field annihilates the null pair",
        &[d_star.contract2(zeta_bar, zeta_bar, p)],
        &[0.0],
    ));
    checks.push(check(
        "null contraction of the first strain",
        &d.contract(zeta_bar, p),
        &[lu, lp, 0.0, 0.0],
    ));
    checks.push(check(
        "null contraction of the second strain",
        &d_star.contract(zeta_bar, p),
        &[-eps * lp, eps * lu, 0.0, 0.0],
    ));

    // raised contraction equals minus the bracket with the null direction
    let raise = |v: Vec4| {
        [
            METRIC_DIAG[0] * v[0],
            METRIC_DIAG[1] * v[1],
            METRIC_DIAG[2] * v[2],
            METRIC_DIAG[3] * v[3],
        ]
    };
    let b_a = lie_bracket(&frame.a_bar(), &frame.zeta_bar()).value(p);
    let b_a_star = lie_bracket(&frame.a_star_bar(), &frame.zeta_bar()).value(p);
    let neg = |v: Vec4| [-v[0], -v[1], -v[2], -v[3]];
    checks.push(check(
        "raised null contraction of the first strain is minus the bracket",
        &raise(d.contract(zeta_bar, p)),
        &neg(b_a),
    ));
    checks.push(check(
        "raised null contraction of the second strain is minus the bracket",
        &raise(d_star.contract(zeta_bar, p)),
        &neg(b_a_star),
    ));

    checks.push(check(
        "first strain against the frame field gives minus the energy rate",
        &[d.contract2(a_bar, zeta_bar, p)],
        &[-0.5 * l_phi2],
    ));
    checks.push(check(
        "first strain against the dual frame field gives the curvature",
        &[d.contract2(a_star_bar, zeta_bar, p)],
        &[-eps * r],
    ));
    checks.push(check(
        "second strain against its frame field gives minus the energy rate",
        &[d_star.contract2(a_star_bar, zeta_bar, p)],
        &[-0.5 * l_phi2],
    ));
    checks.push(check(
        "second strain against the plain frame field gives the curvature",
        &[d_star.contract2(a_bar, zeta_bar, p)],
        &[eps * r],
    ));

    // the two null contractions are independent and span the transverse area
    let d_zeta = FormValue::new(1, d.contract(zeta_bar, p).to_vec());
    let d_star_zeta = FormValue::new(1, d_star.contract(zeta_bar, p).to_vec());
    let area = d_zeta.wedge(&d_star_zeta).expect("degree 2");
    let mut want = vec![0.0; 6];
    want[0] = eps * rate_squared(frame, p);
    checks.push(check(
        "transverse area of the null contractions",
        area.comps(),
        &want,
    ));
    checks
}

/// Both pipelines of the strain-flux identities at a point: the strained
/// volume forms against the curvature-side contractions.
#[derive(Debug, Clone)]
pub struct StrainFlux {
    /// `*[D(zeta-bar) ^ A ^ zeta]`, the rotational flux of the first plane.
    pub rotational_strain: Vec4,
    /// `*[D*(zeta-bar) ^ A* ^ zeta]`, the same flux from the second plane.
    pub rotational_strain_dual: Vec4,
    /// `-i(G*-bar) dG`, the rotational flux through the curvature pipeline.
    pub rotational_curvature: Vec4,
    /// `*[D(zeta-bar) ^ A* ^ zeta]`, the translational flux.
    pub translational_strain: Vec4,
    /// `-*[D*(zeta-bar) ^ A ^ zeta]`, the same from the second plane.
    pub translational_strain_dual: Vec4,
    /// `i(G-bar) dG`, the translational flux through the curvature pipeline.
    pub translational_curvature: Vec4,
}

impl StrainFlux {
    /// Worst disagreement between the pipelines.
    pub fn max_mismatch(&self) -> f64 {
        let pairs = [
            (&self.rotational_strain, &self.rotational_curvature),
            (&self.rotational_strain_dual, &self.rotational_curvature),
            (&self.translational_strain, &self.translational_curvature),
            (&self.translational_strain_dual, &self.translational_curvature),
        ];
        let mut worst = 0.0f64;
        for (a, b) in pairs {
            for k in 0..4 {
                worst = worst.max((a[k] - b[k]).abs());
            }
        }
        worst
    }
}

/// Evaluate the strain-flux identities. The rotational flux equals minus the
/// curvature factor times the null form; the translational flux equals half
/// the energy rate times the null form; both sides of each equality run
/// through independent pipelines.
pub fn strain_flux(frame: &PhLOFrame, p: Event) -> Result<StrainFlux> {
    let d = strain(&frame.a_bar());
    let d_star = strain(&frame.a_star_bar());
    let zeta_bar_v = frame.zeta_bar().value(p);
    let a = frame.a().value(p);
    let a_star = frame.a_star().value(p);
    let zeta = frame.zeta().value(p);

    let d_zeta = FormValue::new(1, d.contract(zeta_bar_v, p).to_vec());
    let d_star_zeta = FormValue::new(1, d_star.contract(zeta_bar_v, p).to_vec());

    let flux = |lead: &FormValue, mid: &FormValue| -> Result<Vec4> {
        let three = lead.wedge(mid)?.wedge(&zeta)?;
        let one = three.hodge();
        Ok([one.comp(0), one.comp(1), one.comp(2), one.comp(3)])
    };
    let rotational_strain = flux(&d_zeta, &a)?;
    let rotational_strain_dual = flux(&d_star_zeta, &a_star)?;
    let translational_strain = flux(&d_zeta, &a_star)?;
    let t_dual = flux(&d_star_zeta, &a)?;
    let translational_strain_dual = [-t_dual[0], -t_dual[1], -t_dual[2], -t_dual[3]];

    // curvature pipeline
    let g = frame.g_form();
    let g_star = frame.g_star_form();
    let d_g = ext_d(&g)?.value(p);
    let d_g_star = ext_d(&g_star)?.value(p);
    let a_bar_v = frame.a_bar().value(p);
    let a_star_bar_v = frame.a_star_bar().value(p);
    let i_gstar_dg = d_g.interior2(a_star_bar_v, zeta_bar_v)?;
    let i_g_dg = d_g.interior2(a_bar_v, zeta_bar_v)?;
    let _ = d_g_star;
    let rotational_curvature = [
        -i_gstar_dg.comp(0),
        -i_gstar_dg.comp(1),
        -i_gstar_dg.comp(2),
        -i_gstar_dg.comp(3),
    ];
    let translational_curvature = [
        i_g_dg.comp(0),
        i_g_dg.comp(1),
        i_g_dg.comp(2),
        i_g_dg.comp(3),
    ];

    Ok(StrainFlux {
        rotational_strain,
        rotational_strain_dual,
        rotational_curvature,
        translational_strain,
        translational_strain_dual,
        translational_curvature,
    })
}

/// Expected strain matrix of the first frame field, assembled from the
/// analytic partial derivatives of `(u, p)`.
pub fn expected_first_strain(frame: &PhLOFrame, p: Event) -> Mat4 {
    let du = frame.u.gradient(p);
    let dp = frame.p.gradient(p);
    [
        [2.0 * du[0], du[1] + dp[0], du[2], du[3]],
        [du[1] + dp[0], 2.0 * dp[1], dp[2], dp[3]],
        [du[2], dp[2], 0.0, 0.0],
        [du[3], dp[3], 0.0, 0.0],
    ]
}

/// Expected strain matrix of the second frame field. The mixed entry is
/// `eps (u_x - p_y)`, the image of the unstarred mixed entry under the
/// substitution `u -> -eps p, p -> eps u`.
pub fn expected_second_strain(frame: &PhLOFrame, p: Event) -> Mat4 {
    let eps = frame.epsilon;
    let du = frame.u.gradient(p);
    let dp = frame.p.gradient(p);
    [
        [
            -2.0 * eps * dp[0],
            eps * (du[0] - dp[1]),
            -eps * dp[2],
            -eps * dp[3],
        ],
        [
            eps * (du[0] - dp[1]),
            2.0 * eps * du[1],
            eps * du[2],
            eps * du[3],
        ],
        [-eps * dp[2], eps * du[2], 0.0, 0.0],
        [-eps * dp[3], eps * du[3], 0.0, 0.0],
    ]
}
