use super::VemError;
use crate::mesh::PolyMesh;

/// Mesh entity supporting a degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
    Face(usize),
    Cell(usize),
}

/// Global numbering of VEM degrees of freedom.
///
/// Layout: vertex values, then (k = 2) edge means, face means (3D) and cell
/// means. Every DOF functional maps the constant function 1 to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    k: usize,
    dim: usize,
    n_vertices: usize,
    n_edges: usize,
    n_faces: usize,
    n_cells: usize,
    dirichlet: Vec<bool>,
    free_index: Vec<Option<usize>>,
    free_dofs: Vec<usize>,
}

pub fn check_order(k: usize) -> Result<(), VemError> {
    if k == 1 || k == 2 {
        Ok(())
    } else {
        Err(VemError::UnsupportedOrder(k))
    }
}

impl DofMap {
    pub fn new(mesh: &PolyMesh, k: usize) -> Result<Self, VemError> {
        check_order(k)?;
        let dim = mesh.dim();
        let n_vertices = mesh.n_vertices();
        let (n_edges, n_faces, n_cells) = if k == 2 {
            (mesh.n_edges(), if dim == 3 { mesh.n_faces() } else { 0 }, mesh.n_cells())
        } else {
            (0, 0, 0)
        };
        let mut dirichlet = Vec::with_capacity(n_vertices + n_edges + n_faces + n_cells);
        dirichlet.extend((0..n_vertices).map(|v| mesh.is_boundary_vertex(v)));
        dirichlet.extend((0..n_edges).map(|e| mesh.is_boundary_edge(e)));
        dirichlet.extend((0..n_faces).map(|f| mesh.is_boundary_face(f)));
        dirichlet.extend(std::iter::repeat_n(false, n_cells));
        let mut free_index = vec![None; dirichlet.len()];
        let mut free_dofs = Vec::new();
        for (i, &d) in dirichlet.iter().enumerate() {
            if !d {
                free_index[i] = Some(free_dofs.len());
                free_dofs.push(i);
            }
        }
        Ok(DofMap { k, dim, n_vertices, n_edges, n_faces, n_cells, dirichlet, free_index, free_dofs })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_dofs(&self) -> usize {
        self.dirichlet.len()
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn is_dirichlet(&self, dof: usize) -> bool {
        self.dirichlet[dof]
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    /// Free-numbering index of a global DOF (`None` for Dirichlet DOFs).
    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free_index[dof]
    }

    /// Global DOF of each free index.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn vertex_dof(&self, v: usize) -> usize {
        v
    }

    pub fn edge_dof(&self, e: usize) -> Option<usize> {
        (e < self.n_edges).then_some(self.n_vertices + e)
    }

    pub fn face_dof(&self, f: usize) -> Option<usize> {
        (f < self.n_faces).then_some(self.n_vertices + self.n_edges + f)
    }

    pub fn cell_dof(&self, c: usize) -> Option<usize> {
        (c < self.n_cells).then_some(self.n_vertices + self.n_edges + self.n_faces + c)
    }

    pub fn entity(&self, dof: usize) -> Entity {
        let mut d = dof;
        if d < self.n_vertices {
            return Entity::Vertex(d);
        }
        d -= self.n_vertices;
        if d < self.n_edges {
            return Entity::Edge(d);
        }
        d -= self.n_edges;
        if d < self.n_faces {
            return Entity::Face(d);
        }
        Entity::Cell(d - self.n_faces)
    }

    pub fn entity_dofs(&self, entity: Entity) -> Option<usize> {
        match entity {
            Entity::Vertex(v) => Some(self.vertex_dof(v)),
            Entity::Edge(e) => self.edge_dof(e),
            Entity::Face(f) => self.face_dof(f),
            Entity::Cell(c) => self.cell_dof(c),
        }
    }

    /// Element-local DOF list in the order used by the element operators:
    /// 2D loop vertices, loop edges, cell; 3D sorted vertices, sorted edges,
    /// cell faces in stored order, cell.
    pub fn cell_dofs(&self, mesh: &PolyMesh, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> = mesh.cell_vertices(c).iter().map(|&v| self.vertex_dof(v)).collect();
        if self.k == 2 {
            out.extend(mesh.cell_edges(c).iter().map(|&e| self.n_vertices + e));
            if self.dim == 3 {
                out.extend(mesh.cell_faces(c).iter().map(|&f| self.n_vertices + self.n_edges + f));
            }
            out.push(self.n_vertices + self.n_edges + self.n_faces + c);
        }
        out
    }

    /// DOF values of the constant function 1.
    pub fn constant_one(&self) -> Vec<f64> {
        vec![1.0; self.n_dofs()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_structured_box;

    #[test]
    fn hex_counts() {
        for n in 1..=4 {
            let m = generate_structured_box(3, n).unwrap();
            assert_eq!(DofMap::new(&m, 1).unwrap().n_dofs(), (n + 1).pow(3));
            let expected = (n + 1).pow(3) + 3 * n * (n + 1) * (n + 1) + 3 * n * n * (n + 1) + n.pow(3);
            assert_eq!(DofMap::new(&m, 2).unwrap().n_dofs(), expected);
        }
    }

    #[test]
    fn free_numbering_excludes_boundary() {
        let m = generate_structured_box(2, 3).unwrap();
        let d = DofMap::new(&m, 2).unwrap();
        // interior: 4 vertices, 12 interior edges, 9 cells
        assert_eq!(d.n_free(), 4 + 12 + 9);
        for (i, &g) in d.free_dofs().iter().enumerate() {
            assert_eq!(d.free_index(g), Some(i));
            assert!(!d.is_dirichlet(g));
        }
    }

    #[test]
    fn order_three_rejected() {
        let m = generate_structured_box(2, 1).unwrap();
        assert!(matches!(DofMap::new(&m, 3), Err(VemError::UnsupportedOrder(3))));
    }

    #[test]
    fn entity_lookup_round_trips() {
        let m = generate_structured_box(3, 2).unwrap();
        let d = DofMap::new(&m, 2).unwrap();
        for dof in 0..d.n_dofs() {
            assert_eq!(d.entity_dofs(d.entity(dof)), Some(dof));
        }
    }
}
