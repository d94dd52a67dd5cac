use std::fmt;

use super::{FaceGeometry, PolyMesh};
use crate::geometry;

/// Relative planarity tolerance for 3D faces (times the face diameter).
pub const PLANARITY_TOL: f64 = 1e-9;
/// Absolute tolerance on the total measure against the bounding box.
pub const MEASURE_TOL: f64 = 1e-10;

/// A single invariant violation with the offending entity indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Cell with non-positive signed area (clockwise loop) or volume.
    Orientation { cell: usize, measure: f64 },
    SelfIntersection { cell: usize, edges: (usize, usize) },
    /// A face whose sub-tetrahedra towards the cell center change sign.
    NotStarShaped { cell: usize, face: usize },
    MeasureSum { total: f64, expected: f64 },
    EdgeSharing { edge: usize, cells: usize },
    FaceSharing { face: usize, cells: usize },
    NonPlanarFace { face: usize, deviation: f64 },
    OpenCell { cell: usize, edge: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Orientation { cell, measure } => write!(f, "cell {cell} has non-positive measure {measure:e}"),
            Violation::SelfIntersection { cell, edges } => {
                write!(f, "cell {cell} self-intersects (loop edges {} and {})", edges.0, edges.1)
            }
            Violation::NotStarShaped { cell, face } => write!(f, "cell {cell} is not star-shaped with respect to its center at face {face}"),
            Violation::MeasureSum { total, expected } => write!(f, "cell measures sum to {total} instead of {expected}"),
            Violation::EdgeSharing { edge, cells } => write!(f, "edge {edge} is shared by {cells} cells"),
            Violation::FaceSharing { face, cells } => write!(f, "face {face} is shared by {cells} cells"),
            Violation::NonPlanarFace { face, deviation } => write!(f, "face {face} deviates {deviation:e} from its plane"),
            Violation::OpenCell { cell, edge } => write!(f, "cell {cell} is not closed along edge {edge}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "mesh is valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural and geometric invariant of a [`PolyMesh`].
pub fn validate_mesh(mesh: &PolyMesh) -> ValidationReport {
    let mut violations = Vec::new();
    let mut total = 0.0;
    for c in 0..mesh.n_cells() {
        let m = mesh.cell_measure(c);
        total += m;
        if m <= 0.0 {
            violations.push(Violation::Orientation { cell: c, measure: m });
        }
        if mesh.dim() == 2 {
            check_simple_polygon(mesh, c, &mut violations);
        } else {
            check_polyhedron(mesh, c, &mut violations);
        }
    }
    let (lo, hi) = mesh.bounding_box();
    let expected: f64 = (0..mesh.dim()).map(|i| hi[i] - lo[i]).product();
    if mesh.n_cells() > 0 && (total - expected).abs() > MEASURE_TOL {
        violations.push(Violation::MeasureSum { total, expected });
    }
    for (i, cells) in mesh.facet_cells().iter().enumerate() {
        if cells.is_empty() || cells.len() > 2 {
            violations.push(if mesh.dim() == 2 {
                Violation::EdgeSharing { edge: i, cells: cells.len() }
            } else {
                Violation::FaceSharing { face: i, cells: cells.len() }
            });
        }
    }
    if mesh.dim() == 3 {
        for f in 0..mesh.n_faces() {
            let pts = mesh.loop_points(&mesh.faces()[f]);
            let fg = FaceGeometry::new(&pts);
            let deviation = pts
                .iter()
                .map(|p| geometry::dot(&geometry::sub(p, &fg.centroid), &fg.normal).abs())
                .fold(0.0, f64::max);
            if deviation > PLANARITY_TOL * geometry::diameter(&pts) {
                violations.push(Violation::NonPlanarFace { face: f, deviation });
            }
        }
    }
    ValidationReport { violations }
}

fn check_simple_polygon(mesh: &PolyMesh, c: usize, out: &mut Vec<Violation>) {
    let lp = mesh.cell_vertices(c);
    let n = lp.len();
    let p = |i: usize| {
        let v = mesh.vertex(lp[i % n]);
        [v[0], v[1]]
    };
    for i in 0..n {
        for j in i + 1..n {
            // skip adjacent edges
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if geometry::segments_intersect(p(i), p(i + 1), p(j), p(j + 1)) {
                out.push(Violation::SelfIntersection { cell: c, edges: (i, j) });
                return;
            }
        }
    }
}

fn check_polyhedron(mesh: &PolyMesh, c: usize, out: &mut Vec<Violation>) {
    // closedness: every edge of the cell belongs to exactly two of its faces
    let faces = mesh.cell_faces(c);
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &f in faces {
        for &e in mesh.face_edges(f) {
            match counts.iter_mut().find(|(ee, _)| *ee == e) {
                Some(entry) => entry.1 += 1,
                None => counts.push((e, 1)),
            }
        }
    }
    if let Some(&(edge, _)) = counts.iter().find(|(_, k)| *k != 2) {
        out.push(Violation::OpenCell { cell: c, edge });
    }
    let center = mesh.cell_center(c);
    for &f in faces {
        let lp = &mesh.faces()[f];
        let fg = mesh.face_geometry(f);
        let n = lp.len();
        let vols: Vec<f64> = (0..n)
            .map(|j| geometry::tet_volume(&center, &fg.centroid, &mesh.vertex(lp[j]), &mesh.vertex(lp[(j + 1) % n])))
            .collect();
        let pos = vols.iter().any(|&v| v > 0.0);
        let neg = vols.iter().any(|&v| v < 0.0);
        if (pos && neg) || (!pos && !neg) {
            out.push(Violation::NotStarShaped { cell: c, face: f });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_box, PolyMesh};

    #[test]
    fn structured_meshes_are_valid() {
        assert!(validate_mesh(&generate_structured_box(2, 4).unwrap()).is_valid());
        assert!(validate_mesh(&generate_structured_box(3, 3).unwrap()).is_valid());
    }

    #[test]
    fn inverted_cell_is_flagged() {
        let verts = vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 1.0], [1.0, 1.0]];
        // second cell traversed clockwise
        let mesh = PolyMesh::from_polygons(verts, vec![vec![0, 1, 4, 3], vec![1, 4, 5, 2]]).unwrap();
        let report = validate_mesh(&mesh);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::Orientation { cell: 1, .. })));
        assert!(!report.violations.iter().any(|v| matches!(v, Violation::Orientation { cell: 0, .. })));
    }

    #[test]
    fn bow_tie_is_self_intersecting() {
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let mesh = PolyMesh::from_polygons(verts, vec![vec![0, 1, 2, 3]]).unwrap();
        let report = validate_mesh(&mesh);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::SelfIntersection { cell: 0, .. })));
    }

    #[test]
    fn warped_face_is_flagged() {
        let mut verts: Vec<[f64; 3]> = Vec::new();
        for k in 0..2 {
            for j in 0..2 {
                for i in 0..2 {
                    verts.push([i as f64, j as f64, k as f64]);
                }
            }
        }
        verts[7][2] = 1.001;
        let faces = vec![
            vec![0, 2, 6, 4],
            vec![1, 3, 7, 5],
            vec![0, 4, 5, 1],
            vec![2, 6, 7, 3],
            vec![0, 1, 3, 2],
            vec![4, 5, 7, 6],
        ];
        let mesh = PolyMesh::from_polyhedra(verts, faces, vec![vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let report = validate_mesh(&mesh);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::NonPlanarFace { .. })));
    }
}
