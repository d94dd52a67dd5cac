//! Polygonal and polyhedral meshes of the unit square / unit cube.
//!
//! A [`PolyMesh`] is built from primitive connectivity (vertex loops per cell in
//! 2D, vertex loops per face plus face lists per cell in 3D); edges, incidence
//! lists and boundary flags are derived once at construction.

mod io;
mod structured;
mod validate;
mod voronoi;

use std::collections::HashMap;

use thiserror::Error;

use crate::geometry::{self, Point};

pub use io::{export_mesh, import_mesh, read_native, read_vtk, write_native, write_vtk, MeshFormat, VtkFields};
pub use structured::generate_structured_box;
pub use validate::{validate_mesh, ValidationReport, Violation};
pub use voronoi::{generate_voronoi_2d, random_seeds, voronoi_2d_from_seeds};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("seeds {first} and {second} coincide within 1e-12")]
    DuplicateSeed { first: usize, second: usize },
    #[error("face {face} references missing vertex {vertex}")]
    FaceMissingVertex { face: usize, vertex: usize },
    #[error("cell {cell} references missing {entity} {index}")]
    CellMissingEntity { cell: usize, entity: &'static str, index: usize },
    #[error("{entity} {index} has fewer than 3 distinct vertices")]
    DegenerateLoop { entity: &'static str, index: usize },
    #[error("{entity} {index} is shared by {count} cells (non-manifold)")]
    NonManifold { entity: &'static str, index: usize, count: usize },
    #[error("face {face} is not planar: deviation {deviation:e} exceeds tolerance")]
    NonPlanarFace { face: usize, deviation: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported VTK cell type {0}")]
    UnsupportedCellType(i64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Arbitrary polygonal (2D) or polyhedral (3D) mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh {
    dim: usize,
    vertices: Vec<Point>,
    edges: Vec<[usize; 2]>,
    faces: Vec<Vec<usize>>,
    face_edges: Vec<Vec<usize>>,
    cell_faces: Vec<Vec<usize>>,
    cell_vertices: Vec<Vec<usize>>,
    cell_edges: Vec<Vec<usize>>,
    facet_cells: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
    boundary_face: Vec<bool>,
}

fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Registers the edges of a closed loop, returning the edge ids aligned with
/// the loop (edge `j` joins `loop[j]` and `loop[j + 1]`).
fn loop_edges(lp: &[usize], edges: &mut Vec<[usize; 2]>, lookup: &mut HashMap<[usize; 2], usize>) -> Vec<usize> {
    let n = lp.len();
    (0..n)
        .map(|j| {
            let key = edge_key(lp[j], lp[(j + 1) % n]);
            *lookup.entry(key).or_insert_with(|| {
                edges.push(key);
                edges.len() - 1
            })
        })
        .collect()
}

fn check_loop(lp: &[usize], n_vertices: usize, entity: &'static str, index: usize) -> Result<(), MeshError> {
    for &v in lp {
        if v >= n_vertices {
            return Err(match entity {
                "face" => MeshError::FaceMissingVertex { face: index, vertex: v },
                _ => MeshError::CellMissingEntity { cell: index, entity: "vertex", index: v },
            });
        }
    }
    let mut distinct = lp.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 || distinct.len() != lp.len() {
        return Err(MeshError::DegenerateLoop { entity, index });
    }
    Ok(())
}

impl PolyMesh {
    /// Builds a 2D mesh from counter-clockwise vertex loops.
    pub fn from_polygons(vertices: Vec<[f64; 2]>, loops: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        let mut edges = Vec::new();
        let mut lookup = HashMap::new();
        let mut cell_edges = Vec::with_capacity(loops.len());
        for (c, lp) in loops.iter().enumerate() {
            check_loop(lp, nv, "cell", c)?;
            cell_edges.push(loop_edges(lp, &mut edges, &mut lookup));
        }
        let mut facet_cells = vec![Vec::new(); edges.len()];
        for (c, ce) in cell_edges.iter().enumerate() {
            for &e in ce {
                facet_cells[e].push(c);
            }
        }
        let boundary_edge: Vec<bool> = facet_cells.iter().map(|cs| cs.len() == 1).collect();
        let mut boundary_vertex = vec![false; nv];
        for (e, &b) in boundary_edge.iter().enumerate() {
            if b {
                boundary_vertex[edges[e][0]] = true;
                boundary_vertex[edges[e][1]] = true;
            }
        }
        Ok(PolyMesh {
            dim: 2,
            vertices: vertices.into_iter().map(|p| [p[0], p[1], 0.0]).collect(),
            edges,
            faces: Vec::new(),
            face_edges: Vec::new(),
            cell_faces: Vec::new(),
            cell_vertices: loops,
            cell_edges,
            facet_cells,
            boundary_vertex,
            boundary_edge,
            boundary_face: Vec::new(),
        })
    }

    /// Builds a 3D mesh from face vertex loops and per-cell face lists.
    pub fn from_polyhedra(vertices: Vec<Point>, faces: Vec<Vec<usize>>, cells: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        let mut edges = Vec::new();
        let mut lookup = HashMap::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        for (f, lp) in faces.iter().enumerate() {
            check_loop(lp, nv, "face", f)?;
            face_edges.push(loop_edges(lp, &mut edges, &mut lookup));
        }
        let mut facet_cells = vec![Vec::new(); faces.len()];
        let mut cell_vertices = Vec::with_capacity(cells.len());
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cf) in cells.iter().enumerate() {
            if cf.len() < 4 {
                return Err(MeshError::DegenerateLoop { entity: "cell", index: c });
            }
            let mut vs = Vec::new();
            let mut es = Vec::new();
            for &f in cf {
                if f >= faces.len() {
                    return Err(MeshError::CellMissingEntity { cell: c, entity: "face", index: f });
                }
                facet_cells[f].push(c);
                vs.extend_from_slice(&faces[f]);
                es.extend_from_slice(&face_edges[f]);
            }
            vs.sort_unstable();
            vs.dedup();
            es.sort_unstable();
            es.dedup();
            cell_vertices.push(vs);
            cell_edges.push(es);
        }
        let boundary_face: Vec<bool> = facet_cells.iter().map(|cs| cs.len() == 1).collect();
        let mut boundary_vertex = vec![false; nv];
        let mut boundary_edge = vec![false; edges.len()];
        for (f, &b) in boundary_face.iter().enumerate() {
            if b {
                for &v in &faces[f] {
                    boundary_vertex[v] = true;
                }
                for &e in &face_edges[f] {
                    boundary_edge[e] = true;
                }
            }
        }
        Ok(PolyMesh {
            dim: 3,
            vertices,
            edges,
            faces,
            face_edges,
            cell_faces: cells,
            cell_vertices,
            cell_edges,
            facet_cells,
            boundary_vertex,
            boundary_edge,
            boundary_face,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Face vertex loops (empty in 2D).
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Edges of each face, aligned with its vertex loop.
    pub fn face_edges(&self, f: usize) -> &[usize] {
        &self.face_edges[f]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cell_vertices.len()
    }

    /// 2D: the counter-clockwise loop. 3D: sorted distinct vertices.
    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        &self.cell_vertices[c]
    }

    /// 2D: edges aligned with the loop. 3D: sorted distinct edges.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    /// Faces of a 3D cell (empty in 2D).
    pub fn cell_faces(&self, c: usize) -> &[usize] {
        if self.dim == 3 {
            &self.cell_faces[c]
        } else {
            &[]
        }
    }

    /// Cells incident to each codimension-one entity (edges in 2D, faces in 3D).
    pub fn facet_cells(&self) -> &[Vec<usize>] {
        &self.facet_cells
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary_face[f]
    }

    /// Cells sharing a codimension-one entity with `c`, in ascending order.
    pub fn cell_neighbors(&self, c: usize) -> Vec<usize> {
        let facets: &[usize] = if self.dim == 2 { &self.cell_edges[c] } else { &self.cell_faces[c] };
        let mut out: Vec<usize> = facets
            .iter()
            .flat_map(|&f| self.facet_cells[f].iter().copied())
            .filter(|&o| o != c)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Codimension-one adjacency lists for all cells.
    pub fn cell_adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n_cells()).map(|c| self.cell_neighbors(c)).collect()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        geometry::distance(&self.vertices[a], &self.vertices[b])
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        geometry::scale(&geometry::add(&self.vertices[a], &self.vertices[b]), 0.5)
    }

    pub fn loop_points(&self, lp: &[usize]) -> Vec<Point> {
        lp.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Area, area centroid and unit normal (orientation of the stored loop).
    pub fn face_geometry(&self, f: usize) -> FaceGeometry {
        let pts = self.loop_points(&self.faces[f]);
        FaceGeometry::new(&pts)
    }

    /// Signed area (2D, counter-clockwise positive) or volume (3D, always
    /// computed with outward-oriented faces) of a cell.
    pub fn cell_measure(&self, c: usize) -> f64 {
        self.cell_geometry(c).0
    }

    pub fn cell_centroid(&self, c: usize) -> Point {
        self.cell_geometry(c).1
    }

    /// (measure, centroid) of a cell.
    pub fn cell_geometry(&self, c: usize) -> (f64, Point) {
        if self.dim == 2 {
            let pts: Vec<[f64; 2]> = self.cell_vertices[c].iter().map(|&v| [self.vertices[v][0], self.vertices[v][1]]).collect();
            let a = geometry::signed_area_2d(&pts);
            let ct = geometry::centroid_2d(&pts);
            (a, [ct[0], ct[1], 0.0])
        } else {
            let center = geometry::mean(self.cell_vertices[c].iter().map(|&v| self.vertices[v]));
            let mut vol = 0.0;
            let mut moment = [0.0; 3];
            for &f in &self.cell_faces[c] {
                let lp = &self.faces[f];
                let fg = self.face_geometry(f);
                let sign = Self::face_sign(&center, &fg);
                let n = lp.len();
                for j in 0..n {
                    let a = self.vertices[lp[j]];
                    let b = self.vertices[lp[(j + 1) % n]];
                    let tv = sign * geometry::tet_volume(&center, &fg.centroid, &a, &b);
                    vol += tv;
                    let tc = geometry::scale(&geometry::add(&geometry::add(&center, &fg.centroid), &geometry::add(&a, &b)), 0.25);
                    moment = geometry::add(&moment, &geometry::scale(&tc, tv));
                }
            }
            let centroid = if vol.abs() > 0.0 { geometry::scale(&moment, 1.0 / vol) } else { center };
            (vol, centroid)
        }
    }

    /// +1 if a face loop with geometry `fg` is outward as seen from `center`, else -1.
    pub fn face_sign(center: &Point, fg: &FaceGeometry) -> f64 {
        if geometry::dot(&fg.normal, &geometry::sub(&fg.centroid, center)) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Vertex-average of a cell (the apex used for sub-tetrahedralization).
    pub fn cell_center(&self, c: usize) -> Point {
        geometry::mean(self.cell_vertices[c].iter().map(|&v| self.vertices[v]))
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        geometry::diameter(&self.loop_points(&self.cell_vertices[c]))
    }

    /// Axis-aligned bounding box of all vertices.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.vertices {
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }

    /// Maximum cell diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_diameter(c)).fold(0.0, f64::max)
    }
}

/// Geometry of a planar polygon embedded in 3D.
#[derive(Debug, Clone, Copy)]
pub struct FaceGeometry {
    pub area: f64,
    pub centroid: Point,
    pub normal: Point,
    pub e1: Point,
    pub e2: Point,
}

impl FaceGeometry {
    pub fn new(pts: &[Point]) -> Self {
        let nw = geometry::newell_normal(pts);
        let len = geometry::norm(&nw);
        let normal = if len > 0.0 { geometry::scale(&nw, 1.0 / len) } else { [0.0, 0.0, 1.0] };
        let (e1, e2) = geometry::plane_frame(&normal, &geometry::sub(&pts[1], &pts[0]));
        let o = pts[0];
        let local: Vec<[f64; 2]> = pts
            .iter()
            .map(|p| {
                let d = geometry::sub(p, &o);
                [geometry::dot(&d, &e1), geometry::dot(&d, &e2)]
            })
            .collect();
        let c2 = geometry::centroid_2d(&local);
        let centroid = geometry::add(&o, &geometry::add(&geometry::scale(&e1, c2[0]), &geometry::scale(&e2, c2[1])));
        FaceGeometry { area: 0.5 * len, centroid, normal, e1, e2 }
    }

    /// In-plane coordinates relative to the centroid.
    pub fn local(&self, p: &Point) -> [f64; 2] {
        let d = geometry::sub(p, &self.centroid);
        [geometry::dot(&d, &self.e1), geometry::dot(&d, &self.e2)]
    }
}
