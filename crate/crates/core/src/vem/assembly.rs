use rayon::prelude::*;

use super::element::{cell_quadrature, element_operators, face_quadrature};
use super::{DofMap, Entity, Stabilization, VemError};
use crate::geometry::{self, Point};
use crate::linalg::CsrMatrix;
use crate::mesh::PolyMesh;
use crate::quadrature;

/// Quadrature degree for interpolating data onto moment DOFs.
const DATA_DEGREE: usize = 8;

pub type ScalarField<'a> = &'a (dyn Fn(&Point) -> f64 + Sync);

/// Global system on the free DOFs after symmetric Dirichlet elimination.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub k: usize,
    pub stabilization: Stabilization,
    pub dof_map: DofMap,
    pub stiffness: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Full-length DOF vector holding `g` on Dirichlet DOFs and 0 elsewhere.
    pub dirichlet_values: Vec<f64>,
}

impl AssembledSystem {
    pub fn n_free(&self) -> usize {
        self.dof_map.n_free()
    }

    /// Full DOF vector from a free-DOF solution.
    pub fn expand(&self, x_free: &[f64]) -> Vec<f64> {
        let mut full = self.dirichlet_values.clone();
        for (i, &g) in self.dof_map.free_dofs().iter().enumerate() {
            full[g] = x_free[i];
        }
        full
    }

    /// Restriction of a full DOF vector to the free DOFs.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.dof_map.free_dofs().iter().map(|&g| full[g]).collect()
    }
}

/// Value of the DOF functional `dof` applied to `u`.
pub fn dof_functional(mesh: &PolyMesh, dm: &DofMap, dof: usize, u: &dyn Fn(&Point) -> f64) -> f64 {
    match dm.entity(dof) {
        Entity::Vertex(v) => u(&mesh.vertex(v)),
        Entity::Edge(e) => {
            let [a, b] = mesh.edges()[e];
            let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
            quadrature::line(DATA_DEGREE)
                .iter()
                .map(|&(t, w)| w * u(&geometry::add(&pa, &geometry::scale(&geometry::sub(&pb, &pa), t))))
                .sum()
        }
        Entity::Face(f) => {
            let pts = mesh.loop_points(&mesh.faces()[f]);
            let fg = mesh.face_geometry(f);
            let mut s = 0.0;
            face_quadrature(&pts, &fg, DATA_DEGREE, |x, w| s += w * u(&x));
            s / fg.area
        }
        Entity::Cell(c) => {
            let mut s = 0.0;
            cell_quadrature(mesh, c, DATA_DEGREE, |x, w| s += w * u(&x));
            s / mesh.cell_measure(c)
        }
    }
}

/// DOF interpolant of `u` (vertex values and entity means).
pub fn interpolate(mesh: &PolyMesh, dm: &DofMap, u: &dyn Fn(&Point) -> f64) -> Vec<f64> {
    (0..dm.n_dofs()).map(|i| dof_functional(mesh, dm, i, u)).collect()
}

/// Assembles `K` and `b` over the free DOFs. Element work runs in parallel;
/// contributions are summed in cell order, so the result does not depend on
/// the thread count.
pub fn assemble(mesh: &PolyMesh, k: usize, f: ScalarField, g: ScalarField, stabilization: Stabilization) -> Result<AssembledSystem, VemError> {
    let dof_map = DofMap::new(mesh, k)?;
    let mut dirichlet_values = vec![0.0; dof_map.n_dofs()];
    for (i, v) in dirichlet_values.iter_mut().enumerate() {
        if dof_map.is_dirichlet(i) {
            *v = dof_functional(mesh, &dof_map, i, g);
        }
    }
    let elements: Vec<_> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| element_operators(mesh, c, k, stabilization, f).map(|op| (dof_map.cell_dofs(mesh, c), op)))
        .collect::<Result<_, _>>()?;

    let n = dof_map.n_free();
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n];
    for (dofs, op) in &elements {
        for (il, &gi) in dofs.iter().enumerate() {
            let Some(fi) = dof_map.free_index(gi) else { continue };
            rhs[fi] += op.load[il];
            for (jl, &gj) in dofs.iter().enumerate() {
                let kij = op.stiffness[(il, jl)];
                match dof_map.free_index(gj) {
                    Some(fj) => triplets.push((fi, fj, kij)),
                    None => rhs[fi] -= kij * dirichlet_values[gj],
                }
            }
        }
    }
    let stiffness = CsrMatrix::from_triplets(n, n, &triplets);
    Ok(AssembledSystem { k, stabilization, dof_map, stiffness, rhs, dirichlet_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Factorization;
    use crate::mesh::{generate_structured_box, generate_voronoi_2d};

    #[test]
    fn constant_data_gives_constant_solution() {
        let mesh = generate_voronoi_2d(40, 2).unwrap();
        for k in [1, 2] {
            let sys = assemble(&mesh, k, &|_| 0.0, &|_| 1.0, Stabilization::DRecipe).unwrap();
            let x = Factorization::new(&sys.stiffness).unwrap().solve(&sys.rhs);
            assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn global_matrix_is_symmetric() {
        let mesh = generate_structured_box(3, 3).unwrap();
        let sys = assemble(&mesh, 2, &|_| 1.0, &|_| 0.0, Stabilization::DRecipe).unwrap();
        assert!(sys.stiffness.symmetry_defect() < 1e-12);
        assert_eq!(sys.n_free(), sys.dof_map.n_free());
    }

    #[test]
    fn quadratic_moments_are_exact() {
        let mesh = generate_structured_box(2, 2).unwrap();
        let dm = DofMap::new(&mesh, 2).unwrap();
        let vals = interpolate(&mesh, &dm, &|x: &Point| x[0] * x[0]);
        // mean of x² over [0, 1/2]² is 1/12
        assert!((vals[dm.cell_dof(0).unwrap()] - 1.0 / 12.0).abs() < 1e-15);
    }
}
