//! Gauss rules on the unit interval, reference triangle and reference tetrahedron.
//!
//! Simplex rules are collapsed (Duffy) tensor products of Gauss-Legendre rules.
//! They carry more points than optimal symmetric rules but exist for every
//! degree and are exact for polynomials up to the requested degree.

use std::sync::OnceLock;

use crate::geometry::Point;

/// Highest polynomial degree for which simplex rules are cached.
pub const MAX_DEGREE: usize = 12;

/// Gauss-Legendre nodes and weights on `[0, 1]` with `n` points.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// A rule on a reference domain. Weights sum to the reference measure.
#[derive(Debug, Clone)]
pub struct Rule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
}

impl<const D: usize> Rule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn build_triangle(degree: usize) -> Rule<2> {
    let n = (degree + 2).div_ceil(2);
    let g = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            points.push([u, v * (1.0 - u)]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    Rule { points, weights }
}

fn build_tetrahedron(degree: usize) -> Rule<3> {
    let n = (degree + 3).div_ceil(2);
    let g = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            for &(w, ww) in &g {
                let x = u;
                let y = v * (1.0 - u);
                let z = w * (1.0 - u) * (1.0 - v);
                points.push([x, y, z]);
                weights.push(wu * wv * ww * (1.0 - u) * (1.0 - u) * (1.0 - v));
            }
        }
    }
    Rule { points, weights }
}

/// Rule on the triangle (0,0),(1,0),(0,1) exact up to `degree`.
pub fn triangle(degree: usize) -> &'static Rule<2> {
    static CACHE: OnceLock<Vec<Rule<2>>> = OnceLock::new();
    let rules = CACHE.get_or_init(|| (0..=MAX_DEGREE).map(build_triangle).collect());
    &rules[degree.min(MAX_DEGREE)]
}

/// Rule on the tetrahedron (0,0,0),(1,0,0),(0,1,0),(0,0,1) exact up to `degree`.
pub fn tetrahedron(degree: usize) -> &'static Rule<3> {
    static CACHE: OnceLock<Vec<Rule<3>>> = OnceLock::new();
    let rules = CACHE.get_or_init(|| (0..=MAX_DEGREE).map(build_tetrahedron).collect());
    &rules[degree.min(MAX_DEGREE)]
}

/// Rule on `[0, 1]` exact up to `degree`.
pub fn line(degree: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    let rules = CACHE.get_or_init(|| (0..=MAX_DEGREE).map(|d| gauss_legendre(d / 2 + 1)).collect());
    &rules[degree.min(MAX_DEGREE)]
}

/// Calls `f(x, w)` for each quadrature point of the physical triangle (a, b, c).
pub fn for_each_triangle_point(a: &Point, b: &Point, c: &Point, degree: usize, mut f: impl FnMut(Point, f64)) {
    let ab = crate::geometry::sub(b, a);
    let ac = crate::geometry::sub(c, a);
    let area2 = crate::geometry::norm(&crate::geometry::cross(&ab, &ac));
    let rule = triangle(degree);
    for (p, &w) in rule.points.iter().zip(&rule.weights) {
        let x = [
            a[0] + p[0] * ab[0] + p[1] * ac[0],
            a[1] + p[0] * ab[1] + p[1] * ac[1],
            a[2] + p[0] * ab[2] + p[1] * ac[2],
        ];
        f(x, w * area2);
    }
}

/// Calls `f(x, w)` for each quadrature point of the tetrahedron (a, b, c, d),
/// weighting by the absolute volume.
pub fn for_each_tet_point(a: &Point, b: &Point, c: &Point, d: &Point, degree: usize, mut f: impl FnMut(Point, f64)) {
    let vol6 = (6.0 * crate::geometry::tet_volume(a, b, c, d)).abs();
    let rule = tetrahedron(degree);
    for (p, &w) in rule.points.iter().zip(&rule.weights) {
        let mut x = [0.0; 3];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = a[i] + p[0] * (b[i] - a[i]) + p[1] * (c[i] - a[i]) + p[2] * (d[i] - a[i]);
        }
        f(x, w * vol6);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..8 {
            let g = gauss_legendre(n);
            for p in 0..(2 * n) {
                let s: f64 = g.iter().map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rule_exactness() {
        // int_T x^a y^b = a! b! / (a+b+2)!
        for degree in 0..=8 {
            let r = triangle(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let s: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!((s - exact).abs() < 1e-14, "deg={degree} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn tetrahedron_rule_exactness() {
        // int_T x^a y^b z^c = a! b! c! / (a+b+c+3)!
        for degree in 0..=7 {
            let r = tetrahedron(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    for c in 0..=(degree as u32 - a - b) {
                        let s: f64 = r
                            .points
                            .iter()
                            .zip(&r.weights)
                            .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                            .sum();
                        let exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
                        assert!((s - exact).abs() < 1e-14, "deg={degree} {a} {b} {c}");
                    }
                }
            }
        }
    }
}
