//! Scalar and vector fields over events of flat space-time, with analytic or
//! finite-difference derivatives, structured grids and fixed-time quadrature.
//!
//! Every other module evaluates on this substrate. Fields are immutable after
//! construction and their evaluators are pure, so concurrent evaluation at
//! distinct points needs no coordination.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default central-difference step, in coordinate units. Balances truncation
/// against roundoff for fields scaled to O(1).
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Propagation speed used to relate the fourth coordinate to laboratory time.
/// With the default value the fourth coordinate is plain time.
pub const DEFAULT_LIGHT_SPEED: f64 = 1.0;

/// Coordinate axes of the canonical chart `(x, y, z, xi)`, `xi = c t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    Xi,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::X, Axis::Y, Axis::Z, Axis::Xi];

    /// Zero-based index into coordinate arrays.
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
            Axis::Xi => 3,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }
}

/// A point of the four-dimensional configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Event {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub xi: f64,
}

impl Event {
    pub fn new(x: f64, y: f64, z: f64, xi: f64) -> Event {
        Event { x, y, z, xi }
    }

    pub fn origin() -> Event {
        Event::default()
    }

    pub fn coord(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
            Axis::Xi => self.xi,
        }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.xi]
    }

    pub fn from_coords(c: [f64; 4]) -> Event {
        Event::new(c[0], c[1], c[2], c[3])
    }

    /// The same event shifted by `h` along one axis.
    pub fn offset(&self, axis: Axis, h: f64) -> Event {
        let mut c = self.coords();
        c[axis.index()] += h;
        Event::from_coords(c)
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }
}

/// Axis-aligned spatial box, used as quadrature region and support hint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Box3 {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Box3 {
        Box3 { min, max }
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            if !(self.max[i] > self.min[i]) {
                return Err(Error::BadConfig(format!(
                    "box axis {i} has max {} <= min {}",
                    self.max[i], self.min[i]
                )));
            }
        }
        Ok(())
    }
}

type EvalFn = Arc<dyn Fn(Event) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(Event) -> [f64; 4] + Send + Sync>;

/// A real-valued field over events.
///
/// Carries an optional analytic gradient; when absent, partial derivatives
/// fall back to second-order central differences with step `fd_step`.
/// An optional support box marks compactly supported fields so that
/// whole-space quadrature can pick its bounds.
#[derive(Clone)]
pub struct ScalarField {
    eval: EvalFn,
    grad: Option<GradFn>,
    fd_step: f64,
    support: Option<Box3>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.grad.is_some())
            .field("fd_step", &self.fd_step)
            .field("support", &self.support)
            .finish()
    }
}

impl ScalarField {
    pub fn from_fn<F>(eval: F) -> ScalarField
    where
        F: Fn(Event) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            eval: Arc::new(eval),
            grad: None,
            fd_step: DEFAULT_FD_STEP,
            support: None,
        }
    }

    pub fn from_fn_with_grad<F, G>(eval: F, grad: G) -> ScalarField
    where
        F: Fn(Event) -> f64 + Send + Sync + 'static,
        G: Fn(Event) -> [f64; 4] + Send + Sync + 'static,
    {
        ScalarField {
            eval: Arc::new(eval),
            grad: Some(Arc::new(grad)),
            fd_step: DEFAULT_FD_STEP,
            support: None,
        }
    }

    pub fn constant(c: f64) -> ScalarField {
        ScalarField::from_fn_with_grad(move |_| c, |_| [0.0; 4])
    }

    pub fn zero() -> ScalarField {
        ScalarField::constant(0.0)
    }

    /// The coordinate function of one axis.
    pub fn coordinate(axis: Axis) -> ScalarField {
        let mut g = [0.0; 4];
        g[axis.index()] = 1.0;
        ScalarField::from_fn_with_grad(move |p| p.coord(axis), move |_| g)
    }

    pub fn with_fd_step(mut self, h: f64) -> ScalarField {
        assert!(h > 0.0, "fd step must be positive");
        self.fd_step = h;
        self
    }

    pub fn with_support(mut self, support: Box3) -> ScalarField {
        self.support = Some(support);
        self
    }

    /// Drops the analytic gradient so derivatives go through finite
    /// differences. Used to compare the two derivative paths.
    pub fn without_gradient(mut self) -> ScalarField {
        self.grad = None;
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn support(&self) -> Option<Box3> {
        self.support
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn value(&self, p: Event) -> f64 {
        (self.eval)(p)
    }

    /// Full gradient, analytic when available.
    pub fn gradient(&self, p: Event) -> [f64; 4] {
        match &self.grad {
            Some(g) => g(p),
            None => {
                let mut out = [0.0; 4];
                for axis in Axis::ALL {
                    out[axis.index()] = central_difference(self, axis, p, self.fd_step);
                }
                out
            }
        }
    }

    /// Partial derivative along one axis; analytic path when a gradient is
    /// attached, central finite difference otherwise. No finiteness checks;
    /// non-finite inputs propagate as NaN.
    pub fn partial_value(&self, axis: Axis, p: Event) -> f64 {
        match &self.grad {
            Some(g) => g(p)[axis.index()],
            None => central_difference(self, axis, p, self.fd_step),
        }
    }

    /// Checked partial derivative.
    pub fn partial(&self, axis: Axis, p: Event) -> Result<f64> {
        match &self.grad {
            Some(g) => {
                let v = g(p)[axis.index()];
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite {
                        context: "analytic partial derivative",
                        point: p,
                    })
                }
            }
            None => fd_partial(self, axis, p, self.fd_step),
        }
    }

    /// The partial derivative as a field in its own right. The result carries
    /// no analytic gradient: its derivatives (second derivatives of `self`)
    /// go through finite differences.
    pub fn partial_field(&self, axis: Axis) -> ScalarField {
        let base = self.clone();
        ScalarField {
            eval: Arc::new(move |p| base.partial_value(axis, p)),
            grad: None,
            fd_step: self.fd_step,
            support: self.support,
        }
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let base = self.clone();
        let gbase = self.clone();
        ScalarField {
            eval: Arc::new(move |p| c * base.value(p)),
            grad: self.grad.as_ref().map(|_| -> GradFn {
                Arc::new(move |p| {
                    let g = gbase.gradient(p);
                    [c * g[0], c * g[1], c * g[2], c * g[3]]
                })
            }),
            fd_step: self.fd_step,
            support: self.support,
        }
    }

    /// Post-composition with a smooth function of one variable; the chain
    /// rule keeps the analytic gradient alive.
    pub fn map_smooth<F, D>(&self, f: F, df: D) -> ScalarField
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static + Copy,
        D: Fn(f64) -> f64 + Send + Sync + 'static + Copy,
    {
        let base = self.clone();
        let gbase = self.clone();
        ScalarField {
            eval: Arc::new(move |p| f(base.value(p))),
            grad: self.grad.as_ref().map(|_| -> GradFn {
                Arc::new(move |p| {
                    let v = gbase.value(p);
                    let g = gbase.gradient(p);
                    let d = df(v);
                    [d * g[0], d * g[1], d * g[2], d * g[3]]
                })
            }),
            fd_step: self.fd_step,
            support: None,
        }
    }

    pub fn sin(&self) -> ScalarField {
        self.map_smooth(f64::sin, f64::cos)
    }

    pub fn cos(&self) -> ScalarField {
        self.map_smooth(f64::cos, |v| -v.sin())
    }

    pub fn squared(&self) -> ScalarField {
        self.map_smooth(|v| v * v, |v| 2.0 * v)
    }
}

fn central_difference(f: &ScalarField, axis: Axis, p: Event, h: f64) -> f64 {
    (f.value(p.offset(axis, h)) - f.value(p.offset(axis, -h))) / (2.0 * h)
}

/// Second-order central difference `(f(p + h e) - f(p - h e)) / 2h`.
pub fn fd_partial(f: &ScalarField, axis: Axis, p: Event, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadConfig(format!("fd step {h} must be positive and finite")));
    }
    let v = central_difference(f, axis, p, h);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            context: "central difference stencil",
            point: p,
        })
    }
}

fn binary_op(
    a: &ScalarField,
    b: &ScalarField,
    eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static + Copy,
    grad: Option<GradFn>,
) -> ScalarField {
    let (fa, fb) = (a.clone(), b.clone());
    ScalarField {
        eval: Arc::new(move |p| eval(fa.value(p), fb.value(p))),
        grad,
        fd_step: a.fd_step.min(b.fd_step),
        support: None,
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        let grad = if self.has_gradient() && rhs.has_gradient() {
            let (ga, gb) = (self.clone(), rhs.clone());
            Some(Arc::new(move |p| {
                let (u, v) = (ga.gradient(p), gb.gradient(p));
                [u[0] + v[0], u[1] + v[1], u[2] + v[2], u[3] + v[3]]
            }) as GradFn)
        } else {
            None
        };
        binary_op(self, rhs, |u, v| u + v, grad)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        let grad = if self.has_gradient() && rhs.has_gradient() {
            let (ga, gb) = (self.clone(), rhs.clone());
            Some(Arc::new(move |p| {
                let (u, v) = (ga.gradient(p), gb.gradient(p));
                [u[0] - v[0], u[1] - v[1], u[2] - v[2], u[3] - v[3]]
            }) as GradFn)
        } else {
            None
        };
        binary_op(self, rhs, |u, v| u - v, grad)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        let grad = if self.has_gradient() && rhs.has_gradient() {
            let (ga, gb) = (self.clone(), rhs.clone());
            Some(Arc::new(move |p| {
                let (a, b) = (ga.value(p), gb.value(p));
                let (u, v) = (ga.gradient(p), gb.gradient(p));
                [
                    a * v[0] + b * u[0],
                    a * v[1] + b * u[1],
                    a * v[2] + b * u[2],
                    a * v[3] + b * u[3],
                ]
            }) as GradFn)
        } else {
            None
        };
        // Support of a product: either factor's box bounds it.
        let support = self.support.or(rhs.support);
        binary_op(self, rhs, |u, v| u * v, grad).with_support_opt(support)
    }
}

impl ScalarField {
    fn with_support_opt(mut self, support: Option<Box3>) -> ScalarField {
        self.support = support;
        self
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// Whether a vector field has three spatial components (fourth identically
/// zero) or all four.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Spatial3,
    Full4,
}

/// A contravariant vector field.
#[derive(Debug, Clone)]
pub struct VectorField {
    comps: [ScalarField; 4],
    arity: Arity,
}

impl VectorField {
    /// Spatial field: three components, zero fourth.
    pub fn spatial(ex: ScalarField, ey: ScalarField, ez: ScalarField) -> VectorField {
        VectorField {
            comps: [ex, ey, ez, ScalarField::zero()],
            arity: Arity::Spatial3,
        }
    }

    pub fn from_components(comps: [ScalarField; 4]) -> VectorField {
        VectorField {
            comps,
            arity: Arity::Full4,
        }
    }

    pub fn constant(c: [f64; 4]) -> VectorField {
        VectorField::from_components([
            ScalarField::constant(c[0]),
            ScalarField::constant(c[1]),
            ScalarField::constant(c[2]),
            ScalarField::constant(c[3]),
        ])
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn is_spatial(&self) -> bool {
        self.arity == Arity::Spatial3
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn value(&self, p: Event) -> [f64; 4] {
        [
            self.comps[0].value(p),
            self.comps[1].value(p),
            self.comps[2].value(p),
            self.comps[3].value(p),
        ]
    }

    pub fn value3(&self, p: Event) -> [f64; 3] {
        [
            self.comps[0].value(p),
            self.comps[1].value(p),
            self.comps[2].value(p),
        ]
    }

    /// Curl of the spatial components.
    pub fn rot(&self, p: Event) -> [f64; 3] {
        assert!(self.is_spatial(), "rot is defined for spatial fields");
        let d = |i: usize, axis: Axis| self.comps[i].partial_value(axis, p);
        [
            d(2, Axis::Y) - d(1, Axis::Z),
            d(0, Axis::Z) - d(2, Axis::X),
            d(1, Axis::X) - d(0, Axis::Y),
        ]
    }

    /// Divergence of the spatial components.
    pub fn div(&self, p: Event) -> f64 {
        assert!(self.is_spatial(), "div is defined for spatial fields");
        self.comps[0].partial_value(Axis::X, p)
            + self.comps[1].partial_value(Axis::Y, p)
            + self.comps[2].partial_value(Axis::Z, p)
    }

    /// Partial of the field along the fourth coordinate, spatial components.
    pub fn dt3(&self, p: Event) -> [f64; 3] {
        [
            self.comps[0].partial_value(Axis::Xi, p),
            self.comps[1].partial_value(Axis::Xi, p),
            self.comps[2].partial_value(Axis::Xi, p),
        ]
    }
}

/// One axis of a structured grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(min: f64, max: f64, count: usize) -> AxisSpec {
        AxisSpec { min, max, count }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::BadResolution(format!(
                "axis needs at least 2 points, got {}",
                self.count
            )));
        }
        if !(self.max > self.min) {
            return Err(Error::BadConfig(format!(
                "axis max {} must exceed min {}",
                self.max, self.min
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.step();
        (0..self.count).map(move |i| self.min + h * i as f64)
    }
}

/// Uniform structured grid over all four coordinates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub z: AxisSpec,
    pub xi: AxisSpec,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        self.z.validate()?;
        self.xi.validate()
    }

    pub fn point_count(&self) -> usize {
        self.x.count * self.y.count * self.z.count * self.xi.count
    }

    /// Events in deterministic order: xi outermost, then z, y, x innermost.
    pub fn events(&self) -> Vec<Event> {
        let mut out = Vec::with_capacity(self.point_count());
        for xi in self.xi.points() {
            for z in self.z.points() {
                for y in self.y.points() {
                    for x in self.x.points() {
                        out.push(Event::new(x, y, z, xi));
                    }
                }
            }
        }
        out
    }
}

/// Quadrature rule for fixed-time spatial integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Rule {
    Midpoint,
    Simpson,
}

/// Integration region: an explicit box, or the support box carried by a
/// compactly supported integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Box(Box3),
    CompactSupport,
}

/// Spatial quadrature specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub region: Region,
    pub rule: Rule,
    pub resolution: [usize; 3],
}

impl QuadratureSpec {
    /// Composite Simpson over an explicit box with the same odd point count
    /// on every axis.
    pub fn simpson_box(b: Box3, points_per_axis: usize) -> QuadratureSpec {
        QuadratureSpec {
            region: Region::Box(b),
            rule: Rule::Simpson,
            resolution: [points_per_axis; 3],
        }
    }

    /// Simpson quadrature that takes its bounds from the integrand's
    /// support box.
    pub fn simpson_support(points_per_axis: usize) -> QuadratureSpec {
        QuadratureSpec {
            region: Region::CompactSupport,
            rule: Rule::Simpson,
            resolution: [points_per_axis; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &n) in self.resolution.iter().enumerate() {
            if n < 2 {
                return Err(Error::BadResolution(format!(
                    "quadrature axis {i} needs at least 2 points, got {n}"
                )));
            }
            if self.rule == Rule::Simpson && n % 2 == 0 {
                return Err(Error::BadResolution(format!(
                    "Simpson rule needs an odd point count per axis, got {n}"
                )));
            }
        }
        if let Region::Box(b) = self.region {
            b.validate()?;
        }
        Ok(())
    }
}

/// Nodes and weights of a one-dimensional composite rule on `[a, b]`.
pub fn rule_nodes(rule: Rule, a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    match rule {
        Rule::Midpoint => {
            let h = (b - a) / n as f64;
            let nodes = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
            let weights = vec![h; n];
            (nodes, weights)
        }
        Rule::Simpson => {
            assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd point count >= 3");
            let h = (b - a) / (n - 1) as f64;
            let nodes = (0..n).map(|i| a + h * i as f64).collect();
            let weights = (0..n)
                .map(|i| {
                    let w = if i == 0 || i == n - 1 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    w * h / 3.0
                })
                .collect();
            (nodes, weights)
        }
    }
}

/// Integral of `f` over a spatial region at fixed `xi`.
pub fn integrate3(f: &ScalarField, quad: &QuadratureSpec, xi: f64) -> Result<f64> {
    quad.validate()?;
    let b = match quad.region {
        Region::Box(b) => b,
        Region::CompactSupport => f.support().ok_or(Error::UnboundedRegion)?,
    };
    b.validate()?;
    let (xs, wx) = rule_nodes(quad.rule, b.min[0], b.max[0], quad.resolution[0]);
    let (ys, wy) = rule_nodes(quad.rule, b.min[1], b.max[1], quad.resolution[1]);
    let (zs, wz) = rule_nodes(quad.rule, b.min[2], b.max[2], quad.resolution[2]);
    let mut total = 0.0;
    for (z, wz) in zs.iter().zip(&wz) {
        let mut plane = 0.0;
        for (y, wy) in ys.iter().zip(&wy) {
            let mut line = 0.0;
            for (x, wx) in xs.iter().zip(&wx) {
                line += wx * f.value(Event::new(*x, *y, *z, xi));
            }
            plane += wy * line;
        }
        total += wz * plane;
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::NonFinite {
            context: "spatial quadrature",
            point: Event::new(0.0, 0.0, 0.0, xi),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn fd_partial_exact_for_quadratics() {
        let f = ScalarField::from_fn(|p| p.x * p.x);
        let d = fd_partial(&f, Axis::X, Event::new(1.0, 0.0, 0.0, 0.0), 1e-3).unwrap();
        assert!(close(d, 2.0, 1e-6), "got {d}");
    }

    #[test]
    fn fd_partial_of_constant_is_zero() {
        let f = ScalarField::constant(5.0);
        for axis in Axis::ALL {
            let d = fd_partial(&f, axis, Event::new(0.3, -2.0, 7.0, 0.1), 1e-3).unwrap();
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn fd_partial_trig_matches_analytic_derivative() {
        // d/dy sin(x)cos(y) = -sin(x)sin(y) = 0 at the origin
        let f = ScalarField::from_fn(|p| p.x.sin() * p.y.cos());
        let h = 1e-3;
        let d = fd_partial(&f, Axis::Y, Event::origin(), h).unwrap();
        assert!(close(d, 0.0, h * h), "got {d}");
    }

    #[test]
    fn partial_prefers_analytic_gradient() {
        let f = ScalarField::from_fn_with_grad(
            |p| p.z.powi(3),
            |p| [0.0, 0.0, 3.0 * p.z * p.z, 0.0],
        );
        let p = Event::new(0.0, 0.0, 2.0, 0.0);
        assert_eq!(f.partial(Axis::Z, p).unwrap(), 12.0);
        // independent coordinate
        assert_eq!(f.partial(Axis::X, p).unwrap(), 0.0);
        // same field through the finite-difference path; bound h^2 |f'''|
        let fd = f.clone().without_gradient().with_fd_step(1e-3);
        let d = fd.partial(Axis::Z, p).unwrap();
        assert!(close(d, 12.0, 4e-6), "got {d}");
    }

    #[test]
    fn richardson_ratio_is_second_order() {
        // halving h shrinks the error by about 4 on fields with nonzero f'''
        let battery: Vec<ScalarField> = vec![
            ScalarField::from_fn(|p| p.x.sin() * (0.5 * p.y).cos()),
            ScalarField::from_fn(|p| (p.x + 0.3 * p.z).exp().sin()),
            ScalarField::from_fn(|p| (p.x * p.x * p.x) + p.xi * p.x),
        ];
        let exact: Vec<Box<dyn Fn(Event) -> f64>> = vec![
            Box::new(|p: Event| p.x.cos() * (0.5 * p.y).cos()),
            Box::new(|p: Event| (p.x + 0.3 * p.z).exp() * (p.x + 0.3 * p.z).exp().cos()),
            Box::new(|p: Event| 3.0 * p.x * p.x + p.xi),
        ];
        let p = Event::new(0.4, 0.2, -0.1, 0.7);
        for (f, df) in battery.iter().zip(&exact) {
            let h = 1e-2;
            let e1 = (fd_partial(f, Axis::X, p, h).unwrap() - df(p)).abs();
            let e2 = (fd_partial(f, Axis::X, p, h / 2.0).unwrap() - df(p)).abs();
            let ratio = e1 / e2;
            assert!(
                (3.5..=4.5).contains(&ratio),
                "second-order ratio off: {ratio}"
            );
        }
    }

    #[test]
    fn analytic_and_fd_paths_agree_on_smooth_battery() {
        // |analytic - fd| <= 10 h^2 * (third-derivative scale)
        let f = ScalarField::from_fn_with_grad(
            |p| p.x.sin() * p.y.cos() + p.z * p.xi,
            |p| {
                [
                    p.x.cos() * p.y.cos(),
                    -p.x.sin() * p.y.sin(),
                    p.xi,
                    p.z,
                ]
            },
        );
        let h = 1e-3;
        let fd = f.clone().without_gradient().with_fd_step(h);
        for &p in &[
            Event::new(0.3, 0.5, 1.0, -0.4),
            Event::new(-1.2, 0.0, 0.3, 2.0),
        ] {
            for axis in Axis::ALL {
                let a = f.partial(axis, p).unwrap();
                let d = fd.partial(axis, p).unwrap();
                assert!(close(a, d, 10.0 * h * h), "axis {axis:?}: {a} vs {d}");
            }
        }
    }

    #[test]
    fn product_rule_gradient() {
        let f = ScalarField::coordinate(Axis::X);
        let g = ScalarField::coordinate(Axis::Y);
        let prod = &f * &g;
        assert!(prod.has_gradient());
        let p = Event::new(2.0, 3.0, 0.0, 0.0);
        assert_eq!(prod.gradient(p), [3.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn chain_rule_gradient() {
        let f = ScalarField::coordinate(Axis::Z).scale(2.0).sin();
        let p = Event::new(0.0, 0.0, 0.4, 0.0);
        let g = f.gradient(p);
        assert!(close(g[2], 2.0 * (0.8f64).cos(), 1e-15));
    }

    #[test]
    fn integrate3_constant_on_unit_box() {
        let f = ScalarField::constant(1.0);
        let quad = QuadratureSpec::simpson_box(Box3::new([0.0; 3], [1.0; 3]), 5);
        let v = integrate3(&f, &quad, 0.0).unwrap();
        assert!(close(v, 1.0, 1e-12), "got {v}");
    }

    #[test]
    fn integrate3_separable_polynomial() {
        let f = ScalarField::from_fn(|p| p.x * p.y * p.z);
        let quad = QuadratureSpec::simpson_box(Box3::new([0.0; 3], [1.0; 3]), 5);
        let v = integrate3(&f, &quad, 0.0).unwrap();
        assert!(close(v, 0.125, 1e-10), "got {v}");
    }

    #[test]
    fn integrate3_gaussian_matches_closed_form() {
        let f = ScalarField::from_fn(|p| (-p.x * p.x - p.y * p.y - p.z * p.z).exp());
        let quad = QuadratureSpec::simpson_box(Box3::new([-6.0; 3], [6.0; 3]), 61);
        let v = integrate3(&f, &quad, 0.0).unwrap();
        let exact = std::f64::consts::PI.powf(1.5);
        assert!(close(v, exact, 1e-6), "got {v}, want {exact}");
    }

    #[test]
    fn integrate3_is_linear() {
        let f = ScalarField::from_fn(|p| p.x.sin() + p.y);
        let g = ScalarField::from_fn(|p| p.z * p.z - p.x);
        let sum = &f + &g;
        let quad = QuadratureSpec::simpson_box(Box3::new([-1.0; 3], [1.0; 3]), 21);
        let a = integrate3(&f, &quad, 0.0).unwrap();
        let b = integrate3(&g, &quad, 0.0).unwrap();
        let c = integrate3(&sum, &quad, 0.0).unwrap();
        assert!(close(a + b, c, 1e-13));
    }

    #[test]
    fn compact_support_region_requires_hint() {
        let bare = ScalarField::from_fn(|_| 1.0);
        let quad = QuadratureSpec::simpson_support(5);
        assert!(matches!(
            integrate3(&bare, &quad, 0.0),
            Err(Error::UnboundedRegion)
        ));
        let hinted = bare.with_support(Box3::new([0.0; 3], [1.0; 3]));
        assert!(close(integrate3(&hinted, &quad, 0.0).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn midpoint_rule_integrates_linear_fields_exactly() {
        let f = ScalarField::from_fn(|p| 2.0 * p.x - p.y + 0.5 * p.z + 3.0);
        let quad = QuadratureSpec {
            region: Region::Box(Box3::new([0.0; 3], [1.0; 3])),
            rule: Rule::Midpoint,
            resolution: [8, 8, 8],
        };
        let v = integrate3(&f, &quad, 0.0).unwrap();
        assert!(close(v, 1.0 - 0.5 + 0.25 + 3.0, 1e-12), "got {v}");
        // and converges at second order on a smooth integrand
        let g = ScalarField::from_fn(|p| (p.x * p.y).sin() + p.z * p.z);
        let value = |n: usize| {
            let quad = QuadratureSpec {
                region: Region::Box(Box3::new([0.0; 3], [1.0; 3])),
                rule: Rule::Midpoint,
                resolution: [n; 3],
            };
            integrate3(&g, &quad, 0.0).unwrap()
        };
        let reference = value(64);
        let e1 = (value(8) - reference).abs();
        let e2 = (value(16) - reference).abs();
        assert!(e2 < 0.3 * e1, "midpoint convergence {e1} -> {e2}");
    }

    #[test]
    fn simpson_rejects_even_point_count() {
        let quad = QuadratureSpec {
            region: Region::Box(Box3::new([0.0; 3], [1.0; 3])),
            rule: Rule::Simpson,
            resolution: [4, 5, 5],
        };
        assert!(quad.validate().is_err());
    }

    #[test]
    fn grid_events_count_and_order() {
        let g = GridSpec {
            x: AxisSpec::new(0.0, 1.0, 3),
            y: AxisSpec::new(0.0, 1.0, 2),
            z: AxisSpec::new(0.0, 1.0, 2),
            xi: AxisSpec::new(0.0, 1.0, 2),
        };
        let pts = g.events();
        assert_eq!(pts.len(), 24);
        assert_eq!(pts[0], Event::new(0.0, 0.0, 0.0, 0.0));
        assert_eq!(pts[1], Event::new(0.5, 0.0, 0.0, 0.0));
        assert_eq!(pts.last().copied().unwrap(), Event::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn fields_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ScalarField>();
        assert_send_sync::<VectorField>();
    }

    #[test]
    fn vector_field_rot_and_div() {
        // V = (y, -x, z): rot = (0, 0, -2), div = 1
        let v = VectorField::spatial(
            ScalarField::coordinate(Axis::Y),
            -&ScalarField::coordinate(Axis::X),
            ScalarField::coordinate(Axis::Z),
        );
        let p = Event::new(0.2, -0.7, 1.1, 0.0);
        let r = v.rot(p);
        assert!(close(r[0], 0.0, 1e-12) && close(r[1], 0.0, 1e-12) && close(r[2], -2.0, 1e-12));
        assert!(close(v.div(p), 1.0, 1e-12));
    }
}
