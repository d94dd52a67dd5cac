//! Mesh import/export.
//!
//! Native format (ASCII, newline-delimited, `#` starts a comment):
//!
//! ```text
//! POLYMESH 1
//! DIM <2|3>
//! VERTICES <n>
//! <x> <y> [<z>]            one line per vertex
//! FACES <nf>               3D only
//! <k> <v0> ... <vk-1>      one vertex loop per line
//! CELLS <nc>
//! <k> <i0> ... <ik-1>      2D: counter-clockwise vertex loop, 3D: face indices
//! END
//! ```
//!
//! Coordinates are written in shortest round-trip form, so `import(export(m))`
//! reproduces them bit for bit.
//!
//! Legacy VTK output is an `UNSTRUCTURED_GRID` with polygon (7) or
//! polyhedron (42) cells plus optional point/cell scalar fields. The reader
//! also accepts triangles, quads, hexahedra and `POLYDATA` polygons.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::validate::PLANARITY_TOL;
use super::{FaceGeometry, MeshError, PolyMesh};
use crate::geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Vtk,
    Native,
}

impl MeshFormat {
    /// `.vtk` selects VTK, anything else the native format.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("vtk") => MeshFormat::Vtk,
            _ => MeshFormat::Native,
        }
    }
}

impl FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vtk" => Ok(MeshFormat::Vtk),
            "native" | "pmesh" => Ok(MeshFormat::Native),
            other => Err(format!("unknown mesh format '{other}'")),
        }
    }
}

/// Scalar fields attached to a VTK export.
#[derive(Debug, Clone, Default)]
pub struct VtkFields {
    pub point_data: Vec<(String, Vec<f64>)>,
    pub cell_data: Vec<(String, Vec<f64>)>,
}

pub fn import_mesh(path: &Path, format: MeshFormat) -> Result<PolyMesh, MeshError> {
    let text = fs::read_to_string(path)?;
    let mesh = match format {
        MeshFormat::Native => read_native(&text)?,
        MeshFormat::Vtk => read_vtk(&text)?,
    };
    check_imported(&mesh)?;
    Ok(mesh)
}

pub fn export_mesh(mesh: &PolyMesh, path: &Path, format: MeshFormat) -> Result<(), MeshError> {
    let text = match format {
        MeshFormat::Native => write_native(mesh),
        MeshFormat::Vtk => write_vtk(mesh, &VtkFields::default()),
    };
    fs::write(path, text)?;
    Ok(())
}

/// Connectivity and planarity checks applied to every imported mesh.
fn check_imported(mesh: &PolyMesh) -> Result<(), MeshError> {
    let entity = if mesh.dim() == 2 { "edge" } else { "face" };
    for (i, cells) in mesh.facet_cells().iter().enumerate() {
        if cells.len() > 2 {
            return Err(MeshError::NonManifold { entity, index: i, count: cells.len() });
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
                return Err(MeshError::NonPlanarFace { face: f, deviation });
            }
        }
    }
    Ok(())
}

pub fn write_native(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "POLYMESH 1");
    let _ = writeln!(s, "DIM {}", mesh.dim());
    let _ = writeln!(s, "VERTICES {}", mesh.n_vertices());
    for p in mesh.vertices() {
        if mesh.dim() == 2 {
            let _ = writeln!(s, "{:?} {:?}", p[0], p[1]);
        } else {
            let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
        }
    }
    let write_list = |s: &mut String, items: &[usize]| {
        let _ = write!(s, "{}", items.len());
        for i in items {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    };
    if mesh.dim() == 3 {
        let _ = writeln!(s, "FACES {}", mesh.n_faces());
        for f in mesh.faces() {
            write_list(&mut s, f);
        }
        let _ = writeln!(s, "CELLS {}", mesh.n_cells());
        for c in 0..mesh.n_cells() {
            write_list(&mut s, mesh.cell_faces(c));
        }
    } else {
        let _ = writeln!(s, "CELLS {}", mesh.n_cells());
        for c in 0..mesh.n_cells() {
            write_list(&mut s, mesh.cell_vertices(c));
        }
    }
    s.push_str("END\n");
    s
}

/// Whitespace tokens tagged with their 1-based line numbers.
struct Tokens<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut toks = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for t in line.split_whitespace() {
                toks.push((ln + 1, t));
            }
        }
        Tokens { toks, pos: 0 }
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |t| t.0)
    }

    fn next(&mut self) -> Result<&'a str, MeshError> {
        let t = self.toks.get(self.pos).ok_or(MeshError::Parse { line: self.line(), message: "unexpected end of file".into() })?;
        self.pos += 1;
        Ok(t.1)
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn err(&self, message: impl Into<String>) -> MeshError {
        MeshError::Parse { line: self.toks.get(self.pos.saturating_sub(1)).map_or(0, |t| t.0), message: message.into() }
    }

    fn expect(&mut self, word: &str) -> Result<(), MeshError> {
        let t = self.next()?;
        if t.eq_ignore_ascii_case(word) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{word}', found '{t}'")))
        }
    }

    fn parse<T: FromStr>(&mut self, what: &str) -> Result<T, MeshError> {
        let t = self.next()?;
        t.parse().map_err(|_| self.err(format!("invalid {what} '{t}'")))
    }

    fn list(&mut self) -> Result<Vec<usize>, MeshError> {
        let k: usize = self.parse("list length")?;
        (0..k).map(|_| self.parse("index")).collect()
    }
}

pub fn read_native(text: &str) -> Result<PolyMesh, MeshError> {
    let mut t = Tokens::new(text);
    t.expect("POLYMESH")?;
    let version: u32 = t.parse("version")?;
    if version != 1 {
        return Err(t.err(format!("unsupported version {version}")));
    }
    t.expect("DIM")?;
    let dim: usize = t.parse("dimension")?;
    if dim != 2 && dim != 3 {
        return Err(t.err(format!("dimension must be 2 or 3, got {dim}")));
    }
    t.expect("VERTICES")?;
    let nv: usize = t.parse("vertex count")?;
    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut p = [0.0; 3];
        for x in p.iter_mut().take(dim) {
            *x = t.parse("coordinate")?;
        }
        coords.push(p);
    }
    let mesh = if dim == 3 {
        t.expect("FACES")?;
        let nf: usize = t.parse("face count")?;
        let faces = (0..nf).map(|_| t.list()).collect::<Result<Vec<_>, _>>()?;
        t.expect("CELLS")?;
        let nc: usize = t.parse("cell count")?;
        let cells = (0..nc).map(|_| t.list()).collect::<Result<Vec<_>, _>>()?;
        PolyMesh::from_polyhedra(coords, faces, cells)?
    } else {
        t.expect("CELLS")?;
        let nc: usize = t.parse("cell count")?;
        let loops = (0..nc).map(|_| t.list()).collect::<Result<Vec<_>, _>>()?;
        PolyMesh::from_polygons(coords.iter().map(|p| [p[0], p[1]]).collect(), loops)?
    };
    t.expect("END")?;
    Ok(mesh)
}

pub fn write_vtk(mesh: &PolyMesh, fields: &VtkFields) -> String {
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\npolyschwarz mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.n_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    let mut conn: Vec<Vec<usize>> = Vec::with_capacity(mesh.n_cells());
    for c in 0..mesh.n_cells() {
        if mesh.dim() == 2 {
            let lp = mesh.cell_vertices(c);
            let mut row = vec![lp.len()];
            row.extend_from_slice(lp);
            conn.push(row);
        } else {
            let faces = mesh.cell_faces(c);
            let mut stream = vec![faces.len()];
            for &f in faces {
                let lp = &mesh.faces()[f];
                stream.push(lp.len());
                stream.extend_from_slice(lp);
            }
            let mut row = vec![stream.len()];
            row.extend(stream);
            conn.push(row);
        }
    }
    let size: usize = conn.iter().map(|r| r.len()).sum();
    let _ = writeln!(s, "CELLS {} {}", mesh.n_cells(), size);
    for row in &conn {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.n_cells());
    let ty = if mesh.dim() == 2 { 7 } else { 42 };
    for _ in 0..mesh.n_cells() {
        let _ = writeln!(s, "{ty}");
    }
    if !fields.cell_data.is_empty() {
        let _ = writeln!(s, "CELL_DATA {}", mesh.n_cells());
        for (name, vals) in &fields.cell_data {
            write_scalars(&mut s, name, vals);
        }
    }
    if !fields.point_data.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.n_vertices());
        for (name, vals) in &fields.point_data {
            write_scalars(&mut s, name, vals);
        }
    }
    s
}

fn write_scalars(s: &mut String, name: &str, vals: &[f64]) {
    let _ = writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", name.replace(' ', "_"));
    for v in vals {
        let _ = writeln!(s, "{v:?}");
    }
}

const HEX_FACES: [[usize; 4]; 6] = [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]];

pub fn read_vtk(text: &str) -> Result<PolyMesh, MeshError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if !header.starts_with("# vtk DataFile") {
        return Err(MeshError::Parse { line: 1, message: "missing '# vtk DataFile' header".into() });
    }
    // skip title line
    let body: String = text.lines().skip(2).collect::<Vec<_>>().join("\n");
    let mut t = Tokens::new(&body);
    for tok in t.toks.iter_mut() {
        tok.0 += 2;
    }
    t.expect("ASCII")?;
    t.expect("DATASET")?;
    let kind = t.next()?.to_ascii_uppercase();
    let mut points: Vec<[f64; 3]> = Vec::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut types: Vec<i64> = Vec::new();
    let mut polygons: Vec<Vec<usize>> = Vec::new();
    while let Some(word) = t.peek() {
        match word.to_ascii_uppercase().as_str() {
            "POINTS" => {
                t.next()?;
                let n: usize = t.parse("point count")?;
                t.next()?; // data type
                points = (0..n)
                    .map(|_| Ok([t.parse("coordinate")?, t.parse("coordinate")?, t.parse("coordinate")?]))
                    .collect::<Result<_, MeshError>>()?;
            }
            "CELLS" => {
                t.next()?;
                let n: usize = t.parse("cell count")?;
                let _size: usize = t.parse("cell list size")?;
                cells = (0..n).map(|_| t.list()).collect::<Result<_, _>>()?;
            }
            "POLYGONS" => {
                t.next()?;
                let n: usize = t.parse("polygon count")?;
                let _size: usize = t.parse("polygon list size")?;
                polygons = (0..n).map(|_| t.list()).collect::<Result<_, _>>()?;
            }
            "CELL_TYPES" => {
                t.next()?;
                let n: usize = t.parse("cell type count")?;
                types = (0..n).map(|_| t.parse("cell type")).collect::<Result<_, _>>()?;
            }
            "CELL_DATA" | "POINT_DATA" => break,
            other => return Err(t.err(format!("unexpected section '{other}'"))),
        }
    }
    if kind == "POLYDATA" {
        return PolyMesh::from_polygons(points.iter().map(|p| [p[0], p[1]]).collect(), polygons);
    }
    if kind != "UNSTRUCTURED_GRID" {
        return Err(MeshError::Parse { line: 3, message: format!("unsupported dataset '{kind}'") });
    }
    if types.len() != cells.len() {
        return Err(MeshError::Parse { line: t.line(), message: "CELL_TYPES count differs from CELLS count".into() });
    }
    let planar = types.iter().all(|&ty| matches!(ty, 5 | 7 | 9));
    if planar {
        return PolyMesh::from_polygons(points.iter().map(|p| [p[0], p[1]]).collect(), cells);
    }
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut face_ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cell_faces = Vec::with_capacity(cells.len());
    for (c, (row, &ty)) in cells.iter().zip(&types).enumerate() {
        let loops: Vec<Vec<usize>> = match ty {
            12 => {
                if row.len() != 8 {
                    return Err(MeshError::Parse { line: t.line(), message: format!("hexahedron {c} needs 8 points") });
                }
                HEX_FACES.iter().map(|f| f.iter().map(|&i| row[i]).collect()).collect()
            }
            42 => {
                let mut it = row.iter().copied();
                let nf = it.next().unwrap_or(0);
                let mut out = Vec::with_capacity(nf);
                for _ in 0..nf {
                    let k = it.next().ok_or(MeshError::Parse { line: t.line(), message: format!("truncated face stream in cell {c}") })?;
                    let lp: Vec<usize> = it.by_ref().take(k).collect();
                    if lp.len() != k {
                        return Err(MeshError::Parse { line: t.line(), message: format!("truncated face stream in cell {c}") });
                    }
                    out.push(lp);
                }
                out
            }
            other => return Err(MeshError::UnsupportedCellType(other)),
        };
        let ids = loops
            .into_iter()
            .map(|lp| {
                let mut key = lp.clone();
                key.sort_unstable();
                *face_ids.entry(key).or_insert_with(|| {
                    faces.push(lp);
                    faces.len() - 1
                })
            })
            .collect();
        cell_faces.push(ids);
    }
    PolyMesh::from_polyhedra(points, faces, cell_faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_box, generate_voronoi_2d};

    #[test]
    fn native_round_trip_is_exact() {
        for mesh in [generate_structured_box(3, 2).unwrap(), generate_voronoi_2d(50, 3).unwrap()] {
            let back = read_native(&write_native(&mesh)).unwrap();
            assert_eq!(back, mesh);
        }
    }

    #[test]
    fn vtk_round_trip_keeps_counts_and_coordinates() {
        let mesh = generate_structured_box(3, 2).unwrap();
        let back = read_vtk(&write_vtk(&mesh, &VtkFields::default())).unwrap();
        assert_eq!(back.n_cells(), mesh.n_cells());
        assert_eq!(back.n_faces(), mesh.n_faces());
        assert_eq!(back.n_edges(), mesh.n_edges());
        assert_eq!(back.vertices(), mesh.vertices());
    }

    #[test]
    fn voronoi_vtk_round_trip_keeps_cell_areas() {
        let mesh = generate_voronoi_2d(100, 11).unwrap();
        let back = read_vtk(&write_vtk(&mesh, &VtkFields::default())).unwrap();
        let areas = |m: &PolyMesh| (0..m.n_cells()).map(|c| m.cell_measure(c)).collect::<Vec<_>>();
        assert_eq!(areas(&back), areas(&mesh));
    }

    #[test]
    fn file_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = generate_structured_box(3, 2).unwrap();
        for (name, fmt) in [("m.vtk", MeshFormat::Vtk), ("m.pmesh", MeshFormat::Native)] {
            let path = dir.path().join(name);
            assert_eq!(MeshFormat::from_path(&path), fmt);
            export_mesh(&mesh, &path, fmt).unwrap();
            let back = import_mesh(&path, fmt).unwrap();
            assert_eq!((back.n_cells(), back.n_faces(), back.n_edges(), back.n_vertices()), (8, 36, 54, 27));
        }
    }

    #[test]
    fn non_manifold_face_is_rejected() {
        // three tetrahedra glued on one triangle
        let text = "POLYMESH 1\nDIM 3\nVERTICES 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 0 -1\n1 1 1\n\
                    FACES 10\n3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n3 0 1 4\n3 0 2 4\n3 1 2 4\n3 0 1 5\n3 0 2 5\n3 1 2 5\n\
                    CELLS 3\n4 0 1 2 3\n4 0 4 5 6\n4 0 7 8 9\nEND\n";
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pmesh");
        std::fs::write(&path, text).unwrap();
        match import_mesh(&path, MeshFormat::Native) {
            Err(MeshError::NonManifold { index: 0, count: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_vertex_in_face_names_the_face() {
        let text = "POLYMESH 1\nDIM 3\nVERTICES 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\nFACES 4\n3 0 1 2\n3 0 1 3\n3 0 2 9\n3 1 2 3\nCELLS 1\n4 0 1 2 3\nEND\n";
        match read_native(text) {
            Err(MeshError::FaceMissingVertex { face: 2, vertex: 9 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_file_reports_line() {
        let text = "POLYMESH 1\nDIM 2\nVERTICES 2\n0 0\n1 oops\n";
        match read_native(text) {
            Err(MeshError::Parse { line: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hexahedron_cells_are_accepted() {
        let text = "# vtk DataFile Version 3.0\nhex\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS 8 double\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\nCELLS 1 9\n8 0 1 2 3 4 5 6 7\nCELL_TYPES 1\n12\n";
        let m = read_vtk(text).unwrap();
        assert_eq!(m.n_faces(), 6);
        assert!((m.cell_measure(0) - 1.0).abs() < 1e-14);
    }
}
