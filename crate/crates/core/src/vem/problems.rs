//! Built-in manufactured solutions with `f = −Δu` and `g = u` on ∂Ω.

use crate::geometry::Point;

#[derive(Debug, Clone, Copy)]
pub struct Problem {
    pub name: &'static str,
    pub dim: usize,
    /// Polynomial degree of the exact solution.
    pub degree: usize,
    pub u: fn(&Point) -> f64,
    pub grad: fn(&Point) -> Point,
    pub f: fn(&Point) -> f64,
}

pub const PROBLEM_NAMES: [&str; 4] = ["cubic", "quadratic", "linear", "constant"];

/// Looks up a built-in problem; `cubic` is the default benchmark
/// (`u = x³ + y²` in 2D, `u = x³ + y² + 3z³` in 3D).
pub fn builtin(name: &str, dim: usize) -> Option<Problem> {
    let p = match (name, dim) {
        ("cubic", 2) => Problem {
            name: "cubic",
            dim,
            degree: 3,
            u: |x| x[0].powi(3) + x[1] * x[1],
            grad: |x| [3.0 * x[0] * x[0], 2.0 * x[1], 0.0],
            f: |x| -6.0 * x[0] - 2.0,
        },
        ("cubic", 3) => Problem {
            name: "cubic",
            dim,
            degree: 3,
            u: |x| x[0].powi(3) + x[1] * x[1] + 3.0 * x[2].powi(3),
            grad: |x| [3.0 * x[0] * x[0], 2.0 * x[1], 9.0 * x[2] * x[2]],
            f: |x| -6.0 * x[0] - 2.0 - 18.0 * x[2],
        },
        ("quadratic", 2) => Problem {
            name: "quadratic",
            dim,
            degree: 2,
            u: |x| x[0] * x[0] + x[0] * x[1] + 2.0 * x[1] * x[1] - x[0],
            grad: |x| [2.0 * x[0] + x[1] - 1.0, x[0] + 4.0 * x[1], 0.0],
            f: |_| -6.0,
        },
        ("quadratic", 3) => Problem {
            name: "quadratic",
            dim,
            degree: 2,
            u: |x| x[0] * x[0] + x[0] * x[1] + 2.0 * x[1] * x[1] + x[1] * x[2] - x[2] * x[2],
            grad: |x| [2.0 * x[0] + x[1], x[0] + 4.0 * x[1] + x[2], x[1] - 2.0 * x[2]],
            f: |_| -4.0,
        },
        ("linear", 2) => Problem {
            name: "linear",
            dim,
            degree: 1,
            u: |x| 1.0 + 2.0 * x[0] - 3.0 * x[1],
            grad: |_| [2.0, -3.0, 0.0],
            f: |_| 0.0,
        },
        ("linear", 3) => Problem {
            name: "linear",
            dim,
            degree: 1,
            u: |x| 1.0 + 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2],
            grad: |_| [2.0, -3.0, 0.5],
            f: |_| 0.0,
        },
        ("constant", 2 | 3) => Problem { name: "constant", dim, degree: 0, u: |_| 1.0, grad: |_| [0.0; 3], f: |_| 0.0 },
        _ => return None,
    };
    Some(p)
}
