//! Shared fixtures for the benchmark targets.

use phlo_core::fields::{Event, QuadratureSpec, ScalarField};
use phlo_core::phlo::{build_solution, PhLOSolution, SolutionSpec};

pub fn default_solution() -> PhLOSolution {
    build_solution(&SolutionSpec::default()).expect("default spec builds")
}

pub fn default_quadrature(points: usize) -> QuadratureSpec {
    QuadratureSpec::simpson_support(points)
}

/// A dense sample of interior events for residual sweeps.
pub fn sweep_points(n: usize) -> Vec<Event> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / n as f64;
        out.push(Event::new(
            0.6 * (2.0 * t - 1.0),
            0.6 * (1.0 - 2.0 * t),
            0.5 + 3.0 * t,
            0.3 * t,
        ));
    }
    out
}

/// A smooth transverse pair with analytic gradients.
pub fn smooth_pair() -> (ScalarField, ScalarField) {
    let u = ScalarField::from_fn_with_grad(
        |q| (0.4 * q.x + 0.9 * q.z).sin() * (0.3 * q.xi).cos() + 0.2 * q.y,
        |q| {
            let s = (0.4 * q.x + 0.9 * q.z).cos() * (0.3 * q.xi).cos();
            [
                0.4 * s,
                0.2,
                0.9 * s,
                -0.3 * (0.4 * q.x + 0.9 * q.z).sin() * (0.3 * q.xi).sin(),
            ]
        },
    );
    let p = ScalarField::from_fn_with_grad(
        |q| 1.5 + 0.5 * (q.y - 0.2 * q.xi).cos() + 0.1 * q.x * q.z,
        |q| {
            [
                0.1 * q.z,
                -0.5 * (q.y - 0.2 * q.xi).sin(),
                0.1 * q.x,
                0.1 * (q.y - 0.2 * q.xi).sin(),
            ]
        },
    );
    (u, p)
}
