use nalgebra::DVector;
use rayon::prelude::*;

use super::element::{cell_quadrature, compute_projectors};
use super::{DofMap, VemError};
use crate::geometry::{self, Point};
use crate::mesh::PolyMesh;

const ERROR_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// `‖u − Π⁰u_h‖_{L²}`.
    pub l2: f64,
    /// `‖∇u − ∇Π∇u_h‖_{L²}`, summed elementwise.
    pub h1: f64,
}

/// Discretization errors of the full DOF vector `uh` against the exact field.
pub fn compute_errors(
    mesh: &PolyMesh,
    dm: &DofMap,
    uh: &[f64],
    u: &(dyn Fn(&Point) -> f64 + Sync),
    grad_u: &(dyn Fn(&Point) -> Point + Sync),
) -> Result<ErrorNorms, VemError> {
    let k = dm.order();
    let parts: Vec<(f64, f64)> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let p = compute_projectors(mesh, c, k)?;
            let loc = DVector::from_iterator(p.n_dofs(), dm.cell_dofs(mesh, c).iter().map(|&g| uh[g]));
            let c0 = &p.pi_zero * &loc;
            let cn = &p.pi_nabla * &loc;
            let (mut l2, mut h1) = (0.0, 0.0);
            cell_quadrature(mesh, c, ERROR_DEGREE, |x, w| {
                let e0 = u(&x) - p.monomials.eval_poly(c0.as_slice(), &x);
                let ge = geometry::sub(&grad_u(&x), &p.monomials.grad_poly(cn.as_slice(), &x));
                l2 += w * e0 * e0;
                h1 += w * geometry::dot(&ge, &ge);
            });
            Ok((l2, h1))
        })
        .collect::<Result<_, VemError>>()?;
    let (l2, h1) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    Ok(ErrorNorms { l2: l2.max(0.0).sqrt(), h1: h1.max(0.0).sqrt() })
}
