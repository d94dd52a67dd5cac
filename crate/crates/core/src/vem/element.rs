//! Element projectors and matrices for the enhanced VEM spaces, k ∈ {1, 2}.
//!
//! Local DOF order follows [`DofMap::cell_dofs`](super::DofMap::cell_dofs).
//! `D` maps polynomial coefficients to DOF values, `B` holds the right-hand
//! side of the Π∇ system and `G = B D`, whose first row is the constant
//! fixing functional (vertex average for k = 1, cell mean for k = 2).

use nalgebra::DMatrix;

use super::monomials::Monomials;
use super::{Stabilization, VemError};
use crate::geometry::{self, Point};
use crate::mesh::{FaceGeometry, PolyMesh};
use crate::quadrature;

/// Projectors of one element in polynomial-coefficient form.
#[derive(Debug, Clone)]
pub struct Projectors {
    pub cell: usize,
    pub k: usize,
    pub monomials: Monomials,
    pub measure: f64,
    /// DOF values of each monomial (`ndof × nk`).
    pub dof_values: DMatrix<f64>,
    /// Π∇ coefficients of each local basis function (`nk × ndof`).
    pub pi_nabla: DMatrix<f64>,
    /// Π⁰ coefficients of each local basis function (`nk × ndof`).
    pub pi_zero: DMatrix<f64>,
    /// `(∇m_α, ∇m_β)` over the element.
    pub monomial_stiffness: DMatrix<f64>,
    /// `(m_α, m_β)` over the element.
    pub monomial_mass: DMatrix<f64>,
}

impl Projectors {
    pub fn n_dofs(&self) -> usize {
        self.dof_values.nrows()
    }

    /// Π∇ in DOF form: DOF values of the projection of each basis function.
    pub fn pi_nabla_dof(&self) -> DMatrix<f64> {
        &self.dof_values * &self.pi_nabla
    }
}

/// Element matrices and load vector.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub projectors: Projectors,
    pub consistency: DMatrix<f64>,
    pub stabilization: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub load: Vec<f64>,
}

/// Calls `f(x, w)` on a quadrature rule exact to `degree` over cell `c`
/// (triangles from the centroid in 2D, tetrahedra through the cell center and
/// face centroids in 3D).
pub fn cell_quadrature(mesh: &PolyMesh, c: usize, degree: usize, mut f: impl FnMut(Point, f64)) {
    if mesh.dim() == 2 {
        let pts = mesh.loop_points(mesh.cell_vertices(c));
        let center = mesh.cell_centroid(c);
        let n = pts.len();
        for j in 0..n {
            quadrature::for_each_triangle_point(&center, &pts[j], &pts[(j + 1) % n], degree, &mut f);
        }
    } else {
        let apex = mesh.cell_center(c);
        for &fc in mesh.cell_faces(c) {
            let lp = &mesh.faces()[fc];
            let fg = mesh.face_geometry(fc);
            let n = lp.len();
            for j in 0..n {
                let a = mesh.vertex(lp[j]);
                let b = mesh.vertex(lp[(j + 1) % n]);
                quadrature::for_each_tet_point(&apex, &fg.centroid, &a, &b, degree, &mut f);
            }
        }
    }
}

/// Quadrature over a planar polygon by triangles from its centroid.
pub fn face_quadrature(pts: &[Point], fg: &FaceGeometry, degree: usize, mut f: impl FnMut(Point, f64)) {
    let n = pts.len();
    for j in 0..n {
        quadrature::for_each_triangle_point(&fg.centroid, &pts[j], &pts[(j + 1) % n], degree, &mut f);
    }
}

/// Trace basis on an edge parametrized by `t ∈ [0, 1]`: values of the start
/// vertex, end vertex and (k = 2) edge-mean basis functions.
fn edge_basis(k: usize, t: f64) -> [f64; 3] {
    if k == 1 {
        [1.0 - t, t, 0.0]
    } else {
        [1.0 - 4.0 * t + 3.0 * t * t, -2.0 * t + 3.0 * t * t, 6.0 * t - 6.0 * t * t]
    }
}

/// Solves for Π∇ and Π⁰ once `D`, `B` and the mass matrix are known.
fn finish(cell: usize, k: usize, monomials: Monomials, measure: f64, d: DMatrix<f64>, b: DMatrix<f64>, mass: DMatrix<f64>) -> Result<Projectors, VemError> {
    let ndof = d.nrows();
    let g = &b * &d;
    let pi_nabla = g.clone().lu().solve(&b).ok_or(VemError::NumericalDegeneracy { cell })?;
    let mut stiff = g;
    stiff.row_mut(0).fill(0.0);
    stiff = (&stiff + stiff.transpose()) * 0.5;
    let nk = monomials.len();
    if stiff.view((1, 1), (nk - 1, nk - 1)).clone_owned().cholesky().is_none() {
        return Err(VemError::NumericalDegeneracy { cell });
    }
    let mut c = &mass * &pi_nabla;
    if k == 2 {
        // ∫ m_0 φ_i is |E| times the cell-mean DOF
        c.row_mut(0).fill(0.0);
        c[(0, ndof - 1)] = measure;
    }
    let pi_zero = mass.clone().cholesky().ok_or(VemError::NumericalDegeneracy { cell })?.solve(&c);
    Ok(Projectors { cell, k, monomials, measure, dof_values: d, pi_nabla, pi_zero, monomial_stiffness: stiff, monomial_mass: mass })
}

/// Projectors of a polygon given by counter-clockwise points in the plane
/// `z = 0`. DOFs: vertices, then (k = 2) edges in loop order and the mean.
pub fn polygon_projectors(pts: &[Point], k: usize, cell: usize) -> Result<Projectors, VemError> {
    let n = pts.len();
    let p2: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let area = geometry::signed_area_2d(&p2);
    let h = geometry::diameter(pts);
    if !(area > 1e-14 * h * h) {
        return Err(VemError::DegenerateElement { cell, measure: area });
    }
    let c2 = geometry::centroid_2d(&p2);
    let center = [c2[0], c2[1], 0.0];
    let mono = Monomials::new(2, k, center, h);
    let nk = mono.len();
    let ndof = if k == 1 { n } else { 2 * n + 1 };

    let mut mass = DMatrix::zeros(nk, nk);
    let mut integral = vec![0.0; nk];
    for j in 0..n {
        quadrature::for_each_triangle_point(&center, &pts[j], &pts[(j + 1) % n], 2 * k, |x, w| {
            let m = mono.eval(&x);
            for a in 0..nk {
                integral[a] += w * m[a];
                for bb in 0..nk {
                    mass[(a, bb)] += w * m[a] * m[bb];
                }
            }
        });
    }

    let mut d = DMatrix::zeros(ndof, nk);
    for (i, p) in pts.iter().enumerate() {
        for (a, v) in mono.eval(p).into_iter().enumerate() {
            d[(i, a)] = v;
        }
    }
    let mut b = DMatrix::zeros(nk, ndof);
    if k == 1 {
        b.row_mut(0).fill(1.0 / n as f64);
    } else {
        for a in 0..nk {
            d[(2 * n, a)] = integral[a] / area;
        }
        b[(0, 2 * n)] = 1.0;
        for alpha in 1..nk {
            for (beta, coef) in mono.laplacian(alpha) {
                debug_assert_eq!(beta, 0);
                b[(alpha, 2 * n)] -= coef * area;
            }
        }
    }
    let rule = quadrature::line(2 * k);
    for j in 0..n {
        let (pa, pb) = (pts[j], pts[(j + 1) % n]);
        let t = geometry::sub(&pb, &pa);
        let len = geometry::norm(&t);
        let normal = [t[1] / len, -t[0] / len, 0.0];
        let idx = [j, (j + 1) % n, n + j];
        for &(s, w) in rule {
            let x = geometry::add(&pa, &geometry::scale(&t, s));
            let phi = edge_basis(k, s);
            let grads = mono.grad(&x);
            if k == 2 {
                for (a, m) in mono.eval(&x).into_iter().enumerate() {
                    d[(n + j, a)] += w * m;
                }
            }
            for alpha in 1..nk {
                let gn = geometry::dot(&grads[alpha], &normal);
                for l in 0..k + 1 {
                    b[(alpha, idx[l])] += w * len * gn * phi[l];
                }
            }
        }
    }
    finish(cell, k, mono, area, d, b, mass)
}

/// Projectors of a polyhedral cell. Face integrals of VEM functions go through
/// the face-local Π⁰ projectors.
pub fn polyhedron_projectors(mesh: &PolyMesh, c: usize, k: usize) -> Result<Projectors, VemError> {
    let verts = mesh.cell_vertices(c);
    let edges = mesh.cell_edges(c);
    let faces = mesh.cell_faces(c);
    let (nv, ne, nf) = (verts.len(), edges.len(), faces.len());
    let ndof = if k == 1 { nv } else { nv + ne + nf + 1 };
    let (vol, centroid) = mesh.cell_geometry(c);
    let h = mesh.cell_diameter(c);
    if !(vol > 1e-14 * h * h * h) {
        return Err(VemError::DegenerateElement { cell: c, measure: vol });
    }
    let apex = mesh.cell_center(c);
    let mono = Monomials::new(3, k, centroid, h);
    let nk = mono.len();

    let mut mass = DMatrix::zeros(nk, nk);
    let mut integral = vec![0.0; nk];
    cell_quadrature(mesh, c, 2 * k, |x, w| {
        let m = mono.eval(&x);
        for a in 0..nk {
            integral[a] += w * m[a];
            for bb in 0..nk {
                mass[(a, bb)] += w * m[a] * m[bb];
            }
        }
    });

    let mut d = DMatrix::zeros(ndof, nk);
    for (i, &v) in verts.iter().enumerate() {
        for (a, val) in mono.eval(&mesh.vertex(v)).into_iter().enumerate() {
            d[(i, a)] = val;
        }
    }
    let mut b = DMatrix::zeros(nk, ndof);
    if k == 1 {
        b.row_mut(0).fill(1.0 / nv as f64);
    } else {
        let rule = quadrature::line(2 * k);
        for (le, &e) in edges.iter().enumerate() {
            let [va, vb] = mesh.edges()[e];
            let (pa, pb) = (mesh.vertex(va), mesh.vertex(vb));
            for &(s, w) in rule {
                let x = geometry::add(&pa, &geometry::scale(&geometry::sub(&pb, &pa), s));
                for (a, m) in mono.eval(&x).into_iter().enumerate() {
                    d[(nv + le, a)] += w * m;
                }
            }
        }
        for a in 0..nk {
            d[(ndof - 1, a)] = integral[a] / vol;
        }
        b[(0, ndof - 1)] = 1.0;
        for alpha in 1..nk {
            for (beta, coef) in mono.laplacian(alpha) {
                debug_assert_eq!(beta, 0);
                b[(alpha, ndof - 1)] -= coef * vol;
            }
        }
    }

    for (lf, &f) in faces.iter().enumerate() {
        let mut lp = mesh.faces()[f].clone();
        let mut fedges = mesh.face_edges(f).to_vec();
        let pts = mesh.loop_points(&lp);
        let fg = FaceGeometry::new(&pts);
        let normal = geometry::scale(&fg.normal, PolyMesh::face_sign(&apex, &fg));
        let mut local: Vec<Point> = pts
            .iter()
            .map(|p| {
                let l = fg.local(p);
                [l[0], l[1], 0.0]
            })
            .collect();
        let m = lp.len();
        let l2: Vec<[f64; 2]> = local.iter().map(|p| [p[0], p[1]]).collect();
        if geometry::signed_area_2d(&l2) < 0.0 {
            lp.reverse();
            local.reverse();
            // reversed edge j joins lp[m-1-j] and lp[m-2-j]
            let orig = fedges.clone();
            fedges = (0..m).map(|j| orig[(2 * m - 2 - j) % m]).collect();
        }
        let fp = polygon_projectors(&local, k, c)?;
        let mut map: Vec<usize> = lp.iter().map(|v| verts.binary_search(v).expect("face vertex in cell")).collect();
        if k == 2 {
            map.extend(fedges.iter().map(|e| nv + edges.binary_search(e).expect("face edge in cell")));
            map.push(nv + ne + lf);
        }
        let fk = fp.monomials.len();
        // q[α][β] = ∫_F (∇m_α·n) m^F_β
        let mut q = DMatrix::zeros(nk, fk);
        let mut face_integral = vec![0.0; nk];
        face_quadrature(&pts, &fg, 2 * k, |x, w| {
            let l = fg.local(&x);
            let mf = fp.monomials.eval(&[l[0], l[1], 0.0]);
            let grads = mono.grad(&x);
            let vals = mono.eval(&x);
            for alpha in 0..nk {
                face_integral[alpha] += w * vals[alpha];
                let gn = geometry::dot(&grads[alpha], &normal);
                for beta in 0..fk {
                    q[(alpha, beta)] += w * gn * mf[beta];
                }
            }
        });
        if k == 2 {
            for a in 0..nk {
                d[(nv + ne + lf, a)] = face_integral[a] / fg.area;
            }
        }
        let contrib = &q * &fp.pi_zero;
        for alpha in 1..nk {
            for (il, &ic) in map.iter().enumerate() {
                b[(alpha, ic)] += contrib[(alpha, il)];
            }
        }
    }
    finish(c, k, mono, vol, d, b, mass)
}

pub fn compute_projectors(mesh: &PolyMesh, c: usize, k: usize) -> Result<Projectors, VemError> {
    super::dofs::check_order(k)?;
    if mesh.dim() == 2 {
        polygon_projectors(&mesh.loop_points(mesh.cell_vertices(c)), k, c)
    } else {
        polyhedron_projectors(mesh, c, k)
    }
}

/// `(consistency, stabilization, stiffness)` of an element.
pub fn element_stiffness(p: &Projectors, dim: usize, stabilization: Stabilization) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = p.n_dofs();
    let kc = p.pi_nabla.transpose() * &p.monomial_stiffness * &p.pi_nabla;
    let kc = (&kc + kc.transpose()) * 0.5;
    let scale = p.monomials.h.powi(dim as i32 - 2);
    let s_diag: Vec<f64> = match stabilization {
        Stabilization::DRecipe => (0..n).map(|i| kc[(i, i)].max(scale)).collect(),
        Stabilization::DofiDofi => vec![scale; n],
    };
    let proj = DMatrix::identity(n, n) - p.pi_nabla_dof();
    let mut s_proj = proj.clone();
    for (i, s) in s_diag.iter().enumerate() {
        s_proj.row_mut(i).scale_mut(*s);
    }
    let stab = proj.transpose() * s_proj;
    let stab = (&stab + stab.transpose()) * 0.5;
    let k = &kc + &stab;
    (kc, stab, k)
}

/// `b_i = ∫ f Π⁰φ_i`.
pub fn element_load(mesh: &PolyMesh, p: &Projectors, f: &dyn Fn(&Point) -> f64, degree: usize) -> Vec<f64> {
    let nk = p.monomials.len();
    let mut moments = vec![0.0; nk];
    cell_quadrature(mesh, p.cell, degree, |x, w| {
        let fx = f(&x);
        for (a, m) in p.monomials.eval(&x).into_iter().enumerate() {
            moments[a] += w * fx * m;
        }
    });
    (0..p.n_dofs()).map(|i| (0..nk).map(|a| moments[a] * p.pi_zero[(a, i)]).sum()).collect()
}

pub fn element_operators(mesh: &PolyMesh, c: usize, k: usize, stabilization: Stabilization, f: &dyn Fn(&Point) -> f64) -> Result<ElementOperators, VemError> {
    let projectors = compute_projectors(mesh, c, k)?;
    let (consistency, stab, stiffness) = element_stiffness(&projectors, mesh.dim(), stabilization);
    let load = element_load(mesh, &projectors, f, 2 * k + 2);
    Ok(ElementOperators { projectors, consistency, stabilization: stab, stiffness, load })
}
