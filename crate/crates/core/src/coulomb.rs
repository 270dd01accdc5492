//! Numerical verification of the two-charge interaction energy: the
//! interaction stress tensor, the interaction energy density, and its
//! integral over space outside the two charge balls, which converges to the
//! product of the charges over their separation.
//!
//! The integral is organized so that every piece has a smooth integrand:
//! spherical shells around each charge capture the near fields (the grids
//! start at the ball surfaces, so the excluded interiors never appear), a
//! smooth partition of unity blends the shells into a Cartesian sweep of an
//! inner cube, the rest of the truncated box is covered by six face panels
//! with a reciprocal radial coordinate, and the same panels extended to
//! infinity give the truncation tail beyond the box.

use crate::error::{Error, Result};
use crate::fields::rule_nodes;
use crate::fields::Rule;
use crate::stress::{dot3, Mat3, Vec3};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Two charges with their excluded balls.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChargeConfig {
    pub charge_1: f64,
    pub charge_2: f64,
    pub center_1: [f64; 3],
    pub center_2: [f64; 3],
    pub radius_1: f64,
    pub radius_2: f64,
}

impl ChargeConfig {
    /// Charges `q`, `Q` at `(0, 0, -R/2)` and `(0, 0, R/2)` with equal
    /// ball radii.
    pub fn on_axis(q: f64, big_q: f64, separation: f64, ball_radius: f64) -> ChargeConfig {
        ChargeConfig {
            charge_1: q,
            charge_2: big_q,
            center_1: [0.0, 0.0, -0.5 * separation],
            center_2: [0.0, 0.0, 0.5 * separation],
            radius_1: ball_radius,
            radius_2: ball_radius,
        }
    }

    pub fn separation(&self) -> f64 {
        let d = [
            self.center_2[0] - self.center_1[0],
            self.center_2[1] - self.center_1[1],
            self.center_2[2] - self.center_1[2],
        ];
        dot3(d, d).sqrt()
    }

    pub fn midpoint(&self) -> [f64; 3] {
        [
            0.5 * (self.center_1[0] + self.center_2[0]),
            0.5 * (self.center_1[1] + self.center_2[1]),
            0.5 * (self.center_1[2] + self.center_2[2]),
        ]
    }

    /// Closed-form interaction energy, the oracle for the quadrature.
    pub fn closed_form(&self) -> f64 {
        self.charge_1 * self.charge_2 / self.separation()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_1 > 0.0) || !(self.radius_2 > 0.0) {
            return Err(Error::BadConfig("ball radii must be positive".into()));
        }
        if self.separation() <= self.radius_1 + self.radius_2 {
            return Err(Error::BadConfig(format!(
                "balls overlap: separation {} vs radii {} + {}",
                self.separation(),
                self.radius_1,
                self.radius_2
            )));
        }
        Ok(())
    }

    /// Radial field of one charge at a point.
    fn field(&self, which: usize, p: Vec3) -> Vec3 {
        let (q, c) = if which == 0 {
            (self.charge_1, self.center_1)
        } else {
            (self.charge_2, self.center_2)
        };
        let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
        let r2 = dot3(d, d);
        let r3 = r2 * r2.sqrt();
        [q * d[0] / r3, q * d[1] / r3, q * d[2] / r3]
    }

    fn inside_ball(&self, p: Vec3) -> bool {
        let d1 = [
            p[0] - self.center_1[0],
            p[1] - self.center_1[1],
            p[2] - self.center_1[2],
        ];
        let d2 = [
            p[0] - self.center_2[0],
            p[1] - self.center_2[1],
            p[2] - self.center_2[2],
        ];
        dot3(d1, d1) < self.radius_1 * self.radius_1
            || dot3(d2, d2) < self.radius_2 * self.radius_2
    }
}

/// The interaction stress tensor
/// `E1 (x) E2 + E2 (x) E1 - (E1 . E2) id` at a point outside both balls.
pub fn interaction_stress(cfg: &ChargeConfig, p: Vec3) -> Result<Mat3> {
    if cfg.inside_ball(p) {
        return Err(Error::InsideBall { point: p });
    }
    let e1 = cfg.field(0, p);
    let e2 = cfg.field(1, p);
    let dot = dot3(e1, e2);
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = e1[i] * e2[j] + e2[i] * e1[j];
            if i == j {
                t[i][j] -= dot;
            }
        }
    }
    Ok(t)
}

/// Interaction energy density `(E1 . E2) / 4 pi`.
pub fn interaction_energy_density(cfg: &ChargeConfig, p: Vec3) -> Result<f64> {
    if cfg.inside_ball(p) {
        return Err(Error::InsideBall { point: p });
    }
    Ok(raw_density(cfg, p))
}

fn raw_density(cfg: &ChargeConfig, p: Vec3) -> f64 {
    dot3(cfg.field(0, p), cfg.field(1, p)) / FOUR_PI
}

/// Quadrature layout for the interaction energy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CoulombQuadrature {
    /// Half-width of the truncated integration cube around the midpoint.
    pub box_half_width: f64,
    /// Half-width of the finely swept inner cube (must contain both blend
    /// shells).
    pub inner_half_width: f64,
    /// Simpson points per axis on the inner cube (odd).
    pub inner_points: usize,
    /// Simpson points of the shell grids: radial, polar, azimuthal.
    pub shell_points: [usize; 3],
    /// Simpson points per direction of the face panels (odd).
    pub panel_points: usize,
}

impl CoulombQuadrature {
    /// Defaults scaled to the configuration: blend radii proportional to the
    /// separation, shell grids starting at the ball surfaces.
    pub fn default_for(cfg: &ChargeConfig, box_half_width: f64) -> CoulombQuadrature {
        CoulombQuadrature {
            box_half_width,
            inner_half_width: 1.2 * cfg.separation(),
            inner_points: 81,
            shell_points: [41, 33, 65],
            panel_points: 33,
        }
    }

    fn validate(&self, cfg: &ChargeConfig) -> Result<()> {
        if self.box_half_width < self.inner_half_width {
            return Err(Error::BadConfig(format!(
                "box half-width {} smaller than the inner cube {}",
                self.box_half_width, self.inner_half_width
            )));
        }
        let r = cfg.separation();
        let blend_outer = blend_radii(cfg).1;
        if 0.5 * r + blend_outer > self.inner_half_width {
            return Err(Error::BadConfig(
                "inner cube does not contain the blend shells".into(),
            ));
        }
        for n in [self.inner_points, self.panel_points]
            .into_iter()
            .chain(self.shell_points)
        {
            if n < 3 || n % 2 == 0 {
                return Err(Error::BadResolution(format!(
                    "Simpson point counts must be odd and at least 3, got {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Inner and outer radii of the blend shells around each charge.
fn blend_radii(cfg: &ChargeConfig) -> (f64, f64) {
    let r = cfg.separation();
    let inner = (0.05 * r).max(cfg.radius_1.max(cfg.radius_2));
    let outer = 0.45 * r;
    (inner, outer)
}

/// Smooth transition that is zero up to the inner radius and one beyond the
/// outer radius.
fn blend(r: f64, inner: f64, outer: f64) -> f64 {
    if r <= inner {
        return 0.0;
    }
    if r >= outer {
        return 1.0;
    }
    let t = (r - inner) / (outer - inner);
    let ramp = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    ramp(t) / (ramp(t) + ramp(1.0 - t))
}

/// The pieces of the interaction energy integral.
#[derive(Debug, Clone, Copy)]
pub struct CoulombEnergy {
    /// Integral over the truncated box minus the two balls.
    pub boxed: f64,
    /// Tail beyond the box, out to infinity.
    pub exterior: f64,
    /// The closed-form value, charges over separation.
    pub closed_form: f64,
}

impl CoulombEnergy {
    /// Box integral plus the truncation tail.
    pub fn total(&self) -> f64 {
        self.boxed + self.exterior
    }

    /// Relative error of the tail-corrected value against the closed form.
    pub fn relative_error(&self) -> f64 {
        (self.total() - self.closed_form).abs() / self.closed_form.abs()
    }

    /// Relative truncation error of the raw box integral.
    pub fn box_relative_error(&self) -> f64 {
        (self.boxed - self.closed_form).abs() / self.closed_form.abs()
    }
}

/// Integrate the interaction energy density over the truncated cube minus
/// the charge balls, and separately over the cube's complement.
pub fn interaction_energy(cfg: &ChargeConfig, quad: &CoulombQuadrature) -> Result<CoulombEnergy> {
    cfg.validate()?;
    quad.validate(cfg)?;
    let (blend_in, blend_out) = blend_radii(cfg);

    // blended density: zero inside the shells, the full density outside
    let blended = |p: Vec3| -> f64 {
        let d1 = [
            p[0] - cfg.center_1[0],
            p[1] - cfg.center_1[1],
            p[2] - cfg.center_1[2],
        ];
        let d2 = [
            p[0] - cfg.center_2[0],
            p[1] - cfg.center_2[1],
            p[2] - cfg.center_2[2],
        ];
        let chi1 = blend(dot3(d1, d1).sqrt(), blend_in, blend_out);
        let chi2 = blend(dot3(d2, d2).sqrt(), blend_in, blend_out);
        if chi1 == 0.0 || chi2 == 0.0 {
            0.0
        } else {
            raw_density(cfg, p) * chi1 * chi2
        }
    };

    // shells: the complementary weight around each charge, from the ball
    // surface out to the blend boundary, in spherical coordinates
    let mut shells = 0.0;
    for (which, ball_radius) in [(0usize, cfg.radius_1), (1usize, cfg.radius_2)] {
        let center = if which == 0 { cfg.center_1 } else { cfg.center_2 };
        let (rs, wr) = rule_nodes(Rule::Simpson, ball_radius, blend_out, quad.shell_points[0]);
        let (ths, wth) = rule_nodes(Rule::Simpson, 0.0, std::f64::consts::PI, quad.shell_points[1]);
        let (phs, wph) = rule_nodes(
            Rule::Simpson,
            0.0,
            2.0 * std::f64::consts::PI,
            quad.shell_points[2],
        );
        let mut acc = 0.0;
        for (r, wr) in rs.iter().zip(&wr) {
            let weight_r = 1.0 - blend(*r, blend_in, blend_out);
            if weight_r == 0.0 {
                continue;
            }
            for (th, wth) in ths.iter().zip(&wth) {
                for (ph, wph) in phs.iter().zip(&wph) {
                    let p = [
                        center[0] + r * th.sin() * ph.cos(),
                        center[1] + r * th.sin() * ph.sin(),
                        center[2] + r * th.cos(),
                    ];
                    acc += wr * wth * wph * r * r * th.sin() * raw_density(cfg, p) * weight_r;
                }
            }
        }
        shells += acc;
    }

    // inner cube around the midpoint, fully blended
    let m = cfg.midpoint();
    let l0 = quad.inner_half_width;
    let (xs, wx) = rule_nodes(Rule::Simpson, m[0] - l0, m[0] + l0, quad.inner_points);
    let (ys, wy) = rule_nodes(Rule::Simpson, m[1] - l0, m[1] + l0, quad.inner_points);
    let (zs, wz) = rule_nodes(Rule::Simpson, m[2] - l0, m[2] + l0, quad.inner_points);
    let mut inner = 0.0;
    for (z, wz) in zs.iter().zip(&wz) {
        let mut plane = 0.0;
        for (y, wy) in ys.iter().zip(&wy) {
            let mut line = 0.0;
            for (x, wx) in xs.iter().zip(&wx) {
                line += wx * blended([*x, *y, *z]);
            }
            plane += wy * line;
        }
        inner += wz * plane;
    }

    // face panels from the inner cube to the box, and on to infinity
    let mid_ring = panel_sweep(cfg, m, quad, l0, Radial::Between(quad.box_half_width))?;
    let exterior = panel_sweep(cfg, m, quad, quad.box_half_width, Radial::Tail)?;

    let boxed = shells + inner + mid_ring;
    for v in [boxed, exterior] {
        if !v.is_finite() {
            return Err(Error::BadConfig("quadrature produced a non-finite value".into()));
        }
    }
    Ok(CoulombEnergy {
        boxed,
        exterior,
        closed_form: cfg.closed_form(),
    })
}

enum Radial {
    /// From the inner cube surface to the outer cube surface.
    Between(f64),
    /// From the cube surface to infinity through the reciprocal coordinate.
    Tail,
}

/// Sweep the six cube-face panels around `m`: directions are parameterized
/// by the face points, the radial integral runs in the reciprocal coordinate
/// so the unbounded case stays smooth.
fn panel_sweep(
    cfg: &ChargeConfig,
    m: [f64; 3],
    quad: &CoulombQuadrature,
    from_half_width: f64,
    radial: Radial,
) -> Result<f64> {
    let n = quad.panel_points;
    let (us, wu) = rule_nodes(Rule::Simpson, -1.0, 1.0, n);
    let limit_value = cfg.charge_1 * cfg.charge_2 / FOUR_PI;
    let mut total = 0.0;
    // axis of the face and its sign
    for axis in 0..3 {
        for sign in [1.0f64, -1.0] {
            let mut face = 0.0;
            for (u, weight_u) in us.iter().zip(&wu) {
                for (v, weight_v) in us.iter().zip(&wu) {
                    let mut d = [0.0; 3];
                    d[axis] = sign;
                    d[(axis + 1) % 3] = *u;
                    d[(axis + 2) % 3] = *v;
                    let s2 = 1.0 + u * u + v * v;
                    let s = s2.sqrt();
                    // distance to the cube surface along this direction
                    let rho_in = from_half_width * s;
                    let (t_lo, t_hi) = match radial {
                        Radial::Between(outer) => (1.0 / (outer * s), 1.0 / rho_in),
                        Radial::Tail => (0.0, 1.0 / rho_in),
                    };
                    let (ts, wt) = rule_nodes(Rule::Simpson, t_lo, t_hi, n);
                    let mut ray = 0.0;
                    for (t, wt) in ts.iter().zip(&wt) {
                        let g = if *t == 0.0 {
                            limit_value
                        } else {
                            let r = 1.0 / t;
                            let p = [
                                m[0] + r * d[0] / s,
                                m[1] + r * d[1] / s,
                                m[2] + r * d[2] / s,
                            ];
                            raw_density(cfg, p) / (t * t * t * t)
                        };
                        ray += wt * g;
                    }
                    // solid-angle weight of the face parameterization
                    face += weight_u * weight_v * ray / (s2 * s);
                }
            }
            total += face;
        }
    }
    Ok(total)
}
