use crate::geometry::Point;

/// Scaled monomials `((x - c) / h)^α` of total degree ≤ k, ordered by degree
/// and then lexicographically with the x exponent descending.
#[derive(Debug, Clone)]
pub struct Monomials {
    pub dim: usize,
    pub k: usize,
    pub center: Point,
    pub h: f64,
    exps: Vec<[usize; 3]>,
}

/// Dimension of P_k in `dim` variables (0 when `k < 0`).
pub fn polynomial_dim(dim: usize, k: isize) -> usize {
    if k < 0 {
        return 0;
    }
    let k = k as usize;
    match dim {
        1 => k + 1,
        2 => (k + 1) * (k + 2) / 2,
        _ => (k + 1) * (k + 2) * (k + 3) / 6,
    }
}

impl Monomials {
    pub fn new(dim: usize, k: usize, center: Point, h: f64) -> Self {
        let mut exps = Vec::new();
        for deg in 0..=k {
            if dim == 2 {
                for a in (0..=deg).rev() {
                    exps.push([a, deg - a, 0]);
                }
            } else {
                for a in (0..=deg).rev() {
                    for b in (0..=deg - a).rev() {
                        exps.push([a, b, deg - a - b]);
                    }
                }
            }
        }
        Monomials { dim, k, center, h, exps }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[[usize; 3]] {
        &self.exps
    }

    pub fn degree(&self, alpha: usize) -> usize {
        self.exps[alpha].iter().sum()
    }

    pub fn index_of(&self, e: [usize; 3]) -> Option<usize> {
        self.exps.iter().position(|&x| x == e)
    }

    fn scaled(&self, p: &Point) -> [f64; 3] {
        let mut s = [0.0; 3];
        for d in 0..self.dim {
            s[d] = (p[d] - self.center[d]) / self.h;
        }
        s
    }

    pub fn eval(&self, p: &Point) -> Vec<f64> {
        let s = self.scaled(p);
        self.exps.iter().map(|e| (0..self.dim).map(|d| s[d].powi(e[d] as i32)).product()).collect()
    }

    pub fn grad(&self, p: &Point) -> Vec<Point> {
        let s = self.scaled(p);
        self.exps
            .iter()
            .map(|e| {
                let mut g = [0.0; 3];
                for d in 0..self.dim {
                    if e[d] == 0 {
                        continue;
                    }
                    let mut v = e[d] as f64 / self.h;
                    for dd in 0..self.dim {
                        let pw = if dd == d { e[dd] - 1 } else { e[dd] };
                        v *= s[dd].powi(pw as i32);
                    }
                    g[d] = v;
                }
                g
            })
            .collect()
    }

    /// Δm_α as coefficients in the same basis.
    pub fn laplacian(&self, alpha: usize) -> Vec<(usize, f64)> {
        let e = self.exps[alpha];
        let mut out = Vec::new();
        for d in 0..self.dim {
            if e[d] >= 2 {
                let mut lower = e;
                lower[d] -= 2;
                let idx = self.index_of(lower).expect("lower-degree monomial present");
                out.push((idx, (e[d] * (e[d] - 1)) as f64 / (self.h * self.h)));
            }
        }
        out
    }

    /// Evaluates `Σ_α c_α m_α(p)`.
    pub fn eval_poly(&self, coeffs: &[f64], p: &Point) -> f64 {
        self.eval(p).iter().zip(coeffs).map(|(m, c)| m * c).sum()
    }

    pub fn grad_poly(&self, coeffs: &[f64], p: &Point) -> Point {
        let mut g = [0.0; 3];
        for (gm, c) in self.grad(p).iter().zip(coeffs) {
            for d in 0..3 {
                g[d] += c * gm[d];
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_polynomial_dimension() {
        for dim in [2, 3] {
            for k in 0..4 {
                assert_eq!(Monomials::new(dim, k, [0.0; 3], 1.0).len(), polynomial_dim(dim, k as isize));
            }
        }
        assert_eq!(polynomial_dim(2, -1), 0);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let m = Monomials::new(3, 2, [0.1, 0.2, 0.3], 0.7);
        let p = [0.4, -0.3, 0.9];
        let g = m.grad(&p);
        let eps = 1e-6;
        for d in 0..3 {
            let mut pp = p;
            let mut pm = p;
            pp[d] += eps;
            pm[d] -= eps;
            let (vp, vm) = (m.eval(&pp), m.eval(&pm));
            for a in 0..m.len() {
                assert!(((vp[a] - vm[a]) / (2.0 * eps) - g[a][d]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn laplacian_of_square() {
        let m = Monomials::new(2, 2, [0.0; 3], 0.5);
        let a = m.index_of([2, 0, 0]).unwrap();
        assert_eq!(m.laplacian(a), vec![(0, 8.0)]);
    }
}
