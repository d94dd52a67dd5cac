//! GDSW-type coarse spaces: interface values per component kind, discrete
//! harmonic extension into subdomain interiors and the Galerkin coarse
//! operator `K₀ = Φᵀ K Φ`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::decomposition::{ComponentKind, InterfaceClassification, Partition};
use crate::linalg::{CsrMatrix, Factorization, LinalgError};
use crate::mesh::PolyMesh;
use crate::vem::DofMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoarseKind {
    Gdsw,
    GdswStar,
    Rgdsw,
}

impl CoarseKind {
    pub const ALL: [CoarseKind; 3] = [CoarseKind::Gdsw, CoarseKind::GdswStar, CoarseKind::Rgdsw];
}

impl FromStr for CoarseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gdsw" => Ok(CoarseKind::Gdsw),
            "gdsw*" | "gdswstar" | "gdsw-star" | "gdsw_star" => Ok(CoarseKind::GdswStar),
            "rgdsw" => Ok(CoarseKind::Rgdsw),
            other => Err(format!("unknown coarse space '{other}' (expected gdsw, gdsw*, rgdsw)")),
        }
    }
}

impl fmt::Display for CoarseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoarseKind::Gdsw => "GDSW",
            CoarseKind::GdswStar => "GDSW*",
            CoarseKind::Rgdsw => "RGDSW",
        })
    }
}

/// Treatment of edge/face components with no adjacent vertex component under
/// the vertex-based spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrphanPolicy {
    /// Give the component its own GDSW-style column.
    #[default]
    Promote,
    Reject,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoarseError {
    #[error("interface component {0} has no adjacent vertex component")]
    OrphanComponent(usize),
    #[error("interior block of subdomain {subdomain} is singular: {source}")]
    SingularInterior { subdomain: usize, source: LinalgError },
    #[error("coarse operator is rank deficient near column {column}: {source}")]
    RankDeficient { column: usize, source: LinalgError },
}

/// Component(s) that generated a coarse column.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnSource {
    Component(usize),
    Vertex { vertex: usize, edges: Vec<usize>, faces: Vec<usize> },
    Orphan(usize),
}

#[derive(Debug, Clone)]
pub struct CoarseBasis {
    pub kind: CoarseKind,
    /// Free DOFs × coarse columns.
    pub phi: CsrMatrix,
    pub sources: Vec<ColumnSource>,
}

impl CoarseBasis {
    pub fn dim(&self) -> usize {
        self.phi.ncols()
    }

    pub fn n_orphans(&self) -> usize {
        self.sources.iter().filter(|s| matches!(s, ColumnSource::Orphan(_))).count()
    }
}

/// Vertex components adjacent to each component: a vertex `V` is adjacent to
/// an edge/face `P` if its sharing set strictly contains that of `P` and some
/// DOFs of both lie in one cell closure. Vertex entries are empty.
pub fn vertex_adjacency(mesh: &PolyMesh, dm: &DofMap, cls: &InterfaceClassification) -> Vec<Vec<usize>> {
    let comps = &cls.components;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    let mut present: Vec<usize> = Vec::new();
    for c in 0..mesh.n_cells() {
        present.clear();
        for g in dm.cell_dofs(mesh, c) {
            if let Some(ci) = dm.free_index(g).and_then(|i| cls.dof_component[i]) {
                if !present.contains(&ci) {
                    present.push(ci);
                }
            }
        }
        for &v in &present {
            if comps[v].kind != ComponentKind::Vertex {
                continue;
            }
            for &p in &present {
                let (sv, sp) = (&comps[v].sharing, &comps[p].sharing);
                if comps[p].kind != ComponentKind::Vertex && sv.len() > sp.len() && sp.iter().all(|s| sv.contains(s)) {
                    adj[p].push(v);
                }
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// Interface rows of Φ (zero on interior rows). `ones` holds the DOF values of
/// the constant function 1 on the free DOFs.
pub fn interface_values(
    kind: CoarseKind,
    mesh: &PolyMesh,
    dm: &DofMap,
    cls: &InterfaceClassification,
    ones: &[f64],
    policy: OrphanPolicy,
) -> Result<(CsrMatrix, Vec<ColumnSource>), CoarseError> {
    let comps = &cls.components;
    let mut triplets = Vec::new();
    let mut sources = Vec::new();
    let push_component = |triplets: &mut Vec<(usize, usize, f64)>, col: usize, p: usize, w: f64| {
        for &d in &comps[p].dofs {
            triplets.push((d, col, w * ones[d]));
        }
    };
    match kind {
        CoarseKind::Gdsw => {
            for p in 0..comps.len() {
                push_component(&mut triplets, sources.len(), p, 1.0);
                sources.push(ColumnSource::Component(p));
            }
        }
        CoarseKind::Rgdsw | CoarseKind::GdswStar => {
            let adj = vertex_adjacency(mesh, dm, cls);
            // faces get their own columns under GDSW* in 3D
            let separate_faces = kind == CoarseKind::GdswStar;
            let mut spread: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
            for (p, vs) in adj.iter().enumerate() {
                if comps[p].kind == ComponentKind::Face && separate_faces {
                    continue;
                }
                for &v in vs {
                    spread[v].push(p);
                }
            }
            for v in 0..comps.len() {
                if comps[v].kind != ComponentKind::Vertex {
                    continue;
                }
                let col = sources.len();
                push_component(&mut triplets, col, v, 1.0);
                let (mut edges, mut faces) = (Vec::new(), Vec::new());
                for &p in &spread[v] {
                    push_component(&mut triplets, col, p, 1.0 / adj[p].len() as f64);
                    if comps[p].kind == ComponentKind::Edge {
                        edges.push(p);
                    } else {
                        faces.push(p);
                    }
                }
                sources.push(ColumnSource::Vertex { vertex: v, edges, faces });
            }
            if separate_faces {
                for p in 0..comps.len() {
                    if comps[p].kind == ComponentKind::Face {
                        push_component(&mut triplets, sources.len(), p, 1.0);
                        sources.push(ColumnSource::Component(p));
                    }
                }
            }
            for p in 0..comps.len() {
                let covered = comps[p].kind == ComponentKind::Vertex || (separate_faces && comps[p].kind == ComponentKind::Face);
                if covered || !adj[p].is_empty() {
                    continue;
                }
                if policy == OrphanPolicy::Reject {
                    return Err(CoarseError::OrphanComponent(p));
                }
                push_component(&mut triplets, sources.len(), p, 1.0);
                sources.push(ColumnSource::Orphan(p));
            }
        }
    }
    Ok((CsrMatrix::from_triplets(ones.len(), sources.len(), &triplets), sources))
}

/// Fills interior rows with `Φ_I = −K_II⁻¹ K_IΓ Φ_Γ`, one factorization per
/// subdomain interior.
pub fn harmonic_extension(k: &CsrMatrix, partition: &Partition, phi_gamma: &CsrMatrix) -> Result<CsrMatrix, CoarseError> {
    let ncols = phi_gamma.ncols();
    let all_cols: Vec<usize> = (0..ncols).collect();
    let blocks: Vec<Vec<(usize, usize, f64)>> = (0..partition.n_subdomains())
        .into_par_iter()
        .map(|s| {
            let interior = partition.interior_dofs(s);
            if interior.is_empty() {
                return Ok(Vec::new());
            }
            let gamma: Vec<usize> = partition.nonoverlapping_dofs(s).iter().copied().filter(|&i| partition.is_interface(i)).collect();
            let kii = k.submatrix(&interior, &interior);
            let factor = Factorization::new(&kii).map_err(|source| CoarseError::SingularInterior { subdomain: s, source })?;
            let kig = k.submatrix(&interior, &gamma);
            let phig = phi_gamma.submatrix(&gamma, &all_cols);
            let rhs = kig.spgemm(&phig).expect("conforming shapes").transpose();
            let mut out = Vec::new();
            for col in 0..ncols {
                let (rows, vals) = rhs.row(col);
                if rows.is_empty() {
                    continue;
                }
                let mut b = vec![0.0; interior.len()];
                for (&r, &v) in rows.iter().zip(vals) {
                    b[r] = -v;
                }
                for (i, x) in factor.solve(&b).into_iter().enumerate() {
                    if x != 0.0 {
                        out.push((interior[i], col, x));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, CoarseError>>()?;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..phi_gamma.nrows() {
        let (cols, vals) = phi_gamma.row(i);
        triplets.extend(cols.iter().zip(vals).map(|(&j, &v)| (i, j, v)));
    }
    for b in blocks {
        triplets.extend(b);
    }
    Ok(CsrMatrix::from_triplets(phi_gamma.nrows(), ncols, &triplets))
}

pub fn build_coarse_basis(
    kind: CoarseKind,
    k: &CsrMatrix,
    mesh: &PolyMesh,
    dm: &DofMap,
    partition: &Partition,
    cls: &InterfaceClassification,
    policy: OrphanPolicy,
) -> Result<CoarseBasis, CoarseError> {
    let ones: Vec<f64> = {
        let full = dm.constant_one();
        dm.free_dofs().iter().map(|&g| full[g]).collect()
    };
    let (phi_gamma, sources) = interface_values(kind, mesh, dm, cls, &ones, policy)?;
    let phi = harmonic_extension(k, partition, &phi_gamma)?;
    Ok(CoarseBasis { kind, phi, sources })
}

/// Factorized Galerkin coarse operator.
#[derive(Debug, Clone)]
pub struct CoarseOperator {
    pub k0: CsrMatrix,
    pub factor: Factorization,
}

pub fn build_coarse_operator(k: &CsrMatrix, phi: &CsrMatrix) -> Result<CoarseOperator, CoarseError> {
    let k0 = k.ptap(phi).expect("conforming shapes");
    let k0 = k0.add(&k0.transpose(), 0.5, 0.5).expect("square");
    let factor = Factorization::new(&k0).map_err(|source| {
        let column = match &source {
            LinalgError::NotPositiveDefinite { pivot, .. } => *pivot,
            _ => 0,
        };
        CoarseError::RankDeficient { column, source }
    })?;
    Ok(CoarseOperator { k0, factor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{classify_interface, partition_geometric};
    use crate::mesh::generate_structured_box;
    use crate::vem::{assemble, Stabilization};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Case {
        mesh: PolyMesh,
        dm: DofMap,
        k: CsrMatrix,
        part: Partition,
        cls: InterfaceClassification,
    }

    fn case(dim: usize, n: usize, order: usize, grid: &[usize]) -> Case {
        let mesh = generate_structured_box(dim, n).unwrap();
        let sys = assemble(&mesh, order, &|_| 1.0, &|_| 0.0, Stabilization::DRecipe).unwrap();
        let part = partition_geometric(&mesh, &sys.dof_map, grid).unwrap();
        let cls = classify_interface(&mesh, &sys.dof_map, &part).unwrap();
        Case { mesh, dm: sys.dof_map, k: sys.stiffness, part, cls }
    }

    fn basis(c: &Case, kind: CoarseKind) -> CoarseBasis {
        build_coarse_basis(kind, &c.k, &c.mesh, &c.dm, &c.part, &c.cls, OrphanPolicy::Promote).unwrap()
    }

    #[test]
    fn strip_has_single_gdsw_column() {
        let c = case(2, 4, 1, &[2, 1]);
        let b = basis(&c, CoarseKind::Gdsw);
        assert_eq!(b.dim(), 1);
        let iface = c.part.interface_dofs();
        assert!(iface.iter().all(|&i| b.phi.get(i, 0) == 1.0));
        // no vertices: the vertex-based spaces promote the edge
        let r = basis(&c, CoarseKind::Rgdsw);
        assert_eq!((r.dim(), r.n_orphans()), (1, 1));
        assert!(matches!(
            interface_values(CoarseKind::Rgdsw, &c.mesh, &c.dm, &c.cls, &vec![1.0; c.dm.n_free()], OrphanPolicy::Reject),
            Err(CoarseError::OrphanComponent(0))
        ));
    }

    #[test]
    fn strip_extension_matches_dense_solve() {
        let c = case(2, 4, 1, &[2, 1]);
        let b = basis(&c, CoarseKind::Gdsw);
        let kd = c.k.to_dense();
        let iface = c.part.interface_dofs();
        for s in 0..2 {
            let interior = c.part.interior_dofs(s);
            let kii = DMatrix::from_fn(interior.len(), interior.len(), |i, j| kd[(interior[i], interior[j])]);
            let kig = DMatrix::from_fn(interior.len(), iface.len(), |i, j| kd[(interior[i], iface[j])]);
            let phig = nalgebra::DVector::from_element(iface.len(), 1.0);
            let expected = -(kii.lu().solve(&(kig * phig)).unwrap());
            for (i, &d) in interior.iter().enumerate() {
                assert!((b.phi.get(d, 0) - expected[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hex_dimensions_and_identities() {
        let c = case(3, 10, 1, &[2, 2, 2]);
        let dims: Vec<usize> = CoarseKind::ALL.iter().map(|&k| basis(&c, k).dim()).collect();
        assert_eq!(dims, vec![19, 13, 1]);
        let (_, e, f) = c.cls.counts();
        assert_eq!(dims[0], dims[1] + e);
        assert_eq!(dims[0], dims[2] + e + f);
    }

    #[test]
    fn interface_partition_of_unity_and_interior_constants() {
        let c = case(3, 9, 2, &[3, 3, 3]);
        let iface = c.part.interface_dofs();
        for kind in CoarseKind::ALL {
            let b = basis(&c, kind);
            let sums = b.phi.spmv(&vec![1.0; b.dim()]);
            assert!(iface.iter().all(|&i| (sums[i] - 1.0).abs() < 1e-12), "{kind}");
            // the central subdomain does not touch the boundary
            for &i in &c.part.interior_dofs(13) {
                assert!((sums[i] - 1.0).abs() < 1e-10, "{kind}");
            }
        }
    }

    #[test]
    fn rgdsw_face_weights_are_quarters() {
        let c = case(3, 9, 1, &[3, 3, 3]);
        let b = basis(&c, CoarseKind::Rgdsw);
        let adj = vertex_adjacency(&c.mesh, &c.dm, &c.cls);
        // a face between the central subdomain and its neighbour has 4 corner vertices
        let interior_face = (0..c.cls.components.len())
            .find(|&p| c.cls.components[p].kind == ComponentKind::Face && adj[p].len() == 4)
            .unwrap();
        let d = c.cls.components[interior_face].dofs[0];
        let (cols, vals) = b.phi.row(d);
        assert_eq!(cols.len(), 4);
        assert!(vals.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn extension_is_energy_minimal() {
        let c = case(2, 8, 2, &[2, 2]);
        let b = basis(&c, CoarseKind::Gdsw);
        let phi_t = b.phi.transpose();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let interior: Vec<usize> = (0..c.part.n_dofs()).filter(|&i| !c.part.is_interface(i)).collect();
        for col in 0..b.dim() {
            let mut phi = vec![0.0; c.part.n_dofs()];
            let (rows, vals) = phi_t.row(col);
            for (&r, &v) in rows.iter().zip(vals) {
                phi[r] = v;
            }
            let energy = |x: &[f64]| crate::linalg::dot(x, &c.k.spmv(x));
            let base = energy(&phi);
            for _ in 0..10 {
                let mut psi = phi.clone();
                for &i in &interior {
                    psi[i] += rng.gen_range(-0.1..0.1);
                }
                assert!(base <= energy(&psi));
            }
        }
    }

    #[test]
    fn coarse_operator_matches_dense_product() {
        let c = case(2, 8, 1, &[4, 4]);
        for kind in CoarseKind::ALL {
            let b = basis(&c, kind);
            let op = build_coarse_operator(&c.k, &b.phi).unwrap();
            let phi = b.phi.to_dense();
            let dense = phi.transpose() * c.k.to_dense() * &phi;
            assert!((op.k0.to_dense() - dense).amax() < 1e-12);
            assert!(op.k0.symmetry_defect() < 1e-12);
        }
    }
}
