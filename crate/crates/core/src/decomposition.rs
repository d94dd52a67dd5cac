//! Nonoverlapping cell partitions, overlap growth and classification of the
//! interface DOFs into vertex, edge and face components.
//!
//! All DOF indices here are free-DOF indices (Dirichlet DOFs never enter the
//! decomposition).

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::mesh::PolyMesh;
use crate::vem::DofMap;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("subdomain grid {0:?} does not match the mesh dimension or has a zero entry")]
    BadGrid(Vec<usize>),
    #[error("geometric partition leaves subdomains {0:?} empty")]
    EmptySubdomains(Vec<usize>),
    #[error("cannot split {cells} cells into {parts} subdomains")]
    TooManyParts { cells: usize, parts: usize },
    #[error("interface DOF {0} has multiplicity below 2")]
    InvalidInterface(usize),
}

/// Cell partition with its DOF-level data.
#[derive(Debug, Clone)]
pub struct Partition {
    n_subdomains: usize,
    cell_owner: Vec<usize>,
    subdomain_cells: Vec<Vec<usize>>,
    /// Sorted set of subdomains whose closed cells contain each free DOF.
    sharing: Vec<Vec<usize>>,
    nonoverlapping: Vec<Vec<usize>>,
    overlapping_cells: Vec<Vec<usize>>,
    overlapping: Vec<Vec<usize>>,
    overlap_levels: usize,
}

/// Box index of a coordinate in `[0, 1]`; points on a box boundary go to the
/// lower box.
fn box_index(t: f64, n: usize) -> usize {
    let i = (t * n as f64).ceil() as isize - 1;
    i.clamp(0, n as isize - 1) as usize
}

/// Cell owners from a structured grid of boxes over the mesh bounding box.
pub fn geometric_owners(mesh: &PolyMesh, grid: &[usize]) -> Result<Vec<usize>, DecompositionError> {
    let dim = mesh.dim();
    if grid.len() != dim || grid.contains(&0) {
        return Err(DecompositionError::BadGrid(grid.to_vec()));
    }
    let (lo, hi) = mesh.bounding_box();
    let owners: Vec<usize> = (0..mesh.n_cells())
        .map(|c| {
            let x = mesh.cell_centroid(c);
            let mut idx = 0;
            for d in (0..dim).rev() {
                let t = (x[d] - lo[d]) / (hi[d] - lo[d]);
                idx = idx * grid[d] + box_index(t, grid[d]);
            }
            idx
        })
        .collect();
    let n: usize = grid.iter().product();
    let mut count = vec![0usize; n];
    for &o in &owners {
        count[o] += 1;
    }
    let empty: Vec<usize> = (0..n).filter(|&s| count[s] == 0).collect();
    if !empty.is_empty() {
        return Err(DecompositionError::EmptySubdomains(empty));
    }
    Ok(owners)
}

/// Greedy breadth-first growth of `parts` connected subdomains of nearly
/// equal size, seeded from the lowest unassigned cell index.
pub fn graph_growing_owners(mesh: &PolyMesh, parts: usize) -> Result<Vec<usize>, DecompositionError> {
    let n = mesh.n_cells();
    if parts == 0 || parts > n {
        return Err(DecompositionError::TooManyParts { cells: n, parts });
    }
    let adj = mesh.cell_adjacency();
    let mut owner = vec![usize::MAX; n];
    let mut assigned = 0;
    let mut next_seed = 0;
    for s in 0..parts {
        let target = (n - assigned).div_ceil(parts - s);
        let mut size = 0;
        while size < target {
            while next_seed < n && owner[next_seed] != usize::MAX {
                next_seed += 1;
            }
            if next_seed == n {
                break;
            }
            let mut queue = VecDeque::from([next_seed]);
            owner[next_seed] = s;
            size += 1;
            while let Some(c) = queue.pop_front() {
                if size == target {
                    break;
                }
                for &nb in &adj[c] {
                    if owner[nb] == usize::MAX && size < target {
                        owner[nb] = s;
                        size += 1;
                        queue.push_back(nb);
                    }
                }
            }
        }
        assigned += size;
    }
    Ok(owner)
}

impl Partition {
    /// Builds the DOF data of a cell partition (overlap 0).
    pub fn from_owners(mesh: &PolyMesh, dm: &DofMap, cell_owner: Vec<usize>) -> Self {
        let n_subdomains = cell_owner.iter().max().map_or(0, |m| m + 1);
        let mut subdomain_cells = vec![Vec::new(); n_subdomains];
        for (c, &s) in cell_owner.iter().enumerate() {
            subdomain_cells[s].push(c);
        }
        let mut sharing: Vec<Vec<usize>> = vec![Vec::new(); dm.n_free()];
        for (c, &s) in cell_owner.iter().enumerate() {
            for g in dm.cell_dofs(mesh, c) {
                if let Some(i) = dm.free_index(g) {
                    if !sharing[i].contains(&s) {
                        sharing[i].push(s);
                    }
                }
            }
        }
        for s in sharing.iter_mut() {
            s.sort_unstable();
        }
        let nonoverlapping = closure_dofs(mesh, dm, &subdomain_cells);
        Partition {
            n_subdomains,
            cell_owner,
            overlapping_cells: subdomain_cells.clone(),
            overlapping: nonoverlapping.clone(),
            subdomain_cells,
            sharing,
            nonoverlapping,
            overlap_levels: 0,
        }
    }

    pub fn n_subdomains(&self) -> usize {
        self.n_subdomains
    }

    pub fn cell_owner(&self) -> &[usize] {
        &self.cell_owner
    }

    pub fn subdomain_cells(&self, s: usize) -> &[usize] {
        &self.subdomain_cells[s]
    }

    pub fn sharing(&self, dof: usize) -> &[usize] {
        &self.sharing[dof]
    }

    pub fn n_dofs(&self) -> usize {
        self.sharing.len()
    }

    /// Free DOFs in the closure of the subdomain's own cells (sorted).
    pub fn nonoverlapping_dofs(&self, s: usize) -> &[usize] {
        &self.nonoverlapping[s]
    }

    /// Free DOFs of the overlapping subdomain (sorted).
    pub fn overlapping_dofs(&self, s: usize) -> &[usize] {
        &self.overlapping[s]
    }

    pub fn overlapping_cells(&self, s: usize) -> &[usize] {
        &self.overlapping_cells[s]
    }

    pub fn overlap_levels(&self) -> usize {
        self.overlap_levels
    }

    pub fn is_interface(&self, dof: usize) -> bool {
        self.sharing[dof].len() >= 2
    }

    pub fn interface_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs()).filter(|&i| self.is_interface(i)).collect()
    }

    /// Free DOFs in exactly one subdomain closure, grouped by subdomain.
    pub fn interior_dofs(&self, s: usize) -> Vec<usize> {
        self.nonoverlapping[s].iter().copied().filter(|&i| self.sharing[i].len() == 1).collect()
    }

    /// Unique RAS owner of every free DOF: the lowest subdomain sharing it.
    pub fn owner(&self, dof: usize) -> usize {
        self.sharing[dof][0]
    }

    /// Adds `levels` layers of cells sharing at least one vertex, which for
    /// these DOF layouts is one layer of the matrix graph.
    pub fn grow_overlap(&self, mesh: &PolyMesh, dm: &DofMap, levels: usize) -> Partition {
        let mut vertex_cells: Vec<Vec<usize>> = vec![Vec::new(); mesh.n_vertices()];
        for c in 0..mesh.n_cells() {
            for &v in mesh.cell_vertices(c) {
                vertex_cells[v].push(c);
            }
        }
        let mut in_set = vec![usize::MAX; mesh.n_cells()];
        let overlapping_cells: Vec<Vec<usize>> = (0..self.n_subdomains)
            .map(|s| {
                let mut cells = self.subdomain_cells[s].clone();
                for &c in &cells {
                    in_set[c] = s;
                }
                let mut frontier = cells.clone();
                for _ in 0..levels {
                    let mut next = Vec::new();
                    for &c in &frontier {
                        for &nb in mesh.cell_vertices(c).iter().flat_map(|&v| &vertex_cells[v]) {
                            if in_set[nb] != s {
                                in_set[nb] = s;
                                next.push(nb);
                            }
                        }
                    }
                    cells.extend_from_slice(&next);
                    frontier = next;
                }
                cells.sort_unstable();
                cells
            })
            .collect();
        let overlapping = closure_dofs(mesh, dm, &overlapping_cells);
        Partition { overlapping_cells, overlapping, overlap_levels: levels, ..self.clone() }
    }
}

fn closure_dofs(mesh: &PolyMesh, dm: &DofMap, cell_sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut mark = vec![usize::MAX; dm.n_free()];
    cell_sets
        .iter()
        .enumerate()
        .map(|(s, cells)| {
            let mut dofs = Vec::new();
            for &c in cells {
                for g in dm.cell_dofs(mesh, c) {
                    if let Some(i) = dm.free_index(g) {
                        if mark[i] != s {
                            mark[i] = s;
                            dofs.push(i);
                        }
                    }
                }
            }
            dofs.sort_unstable();
            dofs
        })
        .collect()
}

pub fn partition_geometric(mesh: &PolyMesh, dm: &DofMap, grid: &[usize]) -> Result<Partition, DecompositionError> {
    Ok(Partition::from_owners(mesh, dm, geometric_owners(mesh, grid)?))
}

pub fn partition_graph_growing(mesh: &PolyMesh, dm: &DofMap, parts: usize) -> Result<Partition, DecompositionError> {
    Ok(Partition::from_owners(mesh, dm, graph_growing_owners(mesh, parts)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentKind {
    Vertex,
    Edge,
    Face,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    /// Sorted free DOF indices.
    pub dofs: Vec<usize>,
    pub sharing: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct InterfaceClassification {
    pub dim: usize,
    pub components: Vec<Component>,
    /// Component of each free DOF (`None` for interior DOFs).
    pub dof_component: Vec<Option<usize>>,
}

impl InterfaceClassification {
    pub fn count(&self, kind: ComponentKind) -> usize {
        self.components.iter().filter(|c| c.kind == kind).count()
    }

    /// `(|V|, |E|, |F|)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.count(ComponentKind::Vertex), self.count(ComponentKind::Edge), self.count(ComponentKind::Face))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Free DOFs in the closure of each connector entity (mesh edges, plus faces
/// in 3D), paired with the sorted set of subdomains containing the entity.
fn connectors(mesh: &PolyMesh, dm: &DofMap, owner: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut edge_cells: Vec<Vec<usize>> = vec![Vec::new(); mesh.n_edges()];
    for c in 0..mesh.n_cells() {
        for &e in mesh.cell_edges(c) {
            edge_cells[e].push(c);
        }
    }
    let subs = |cells: &[usize]| {
        let mut s: Vec<usize> = cells.iter().map(|&c| owner[c]).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let free = |g: Option<usize>| g.and_then(|g| dm.free_index(g));
    let mut out = Vec::new();
    for (e, [a, b]) in mesh.edges().iter().enumerate() {
        let s = subs(&edge_cells[e]);
        if s.len() < 2 {
            continue;
        }
        let dofs = [free(Some(dm.vertex_dof(*a))), free(Some(dm.vertex_dof(*b))), free(dm.edge_dof(e))];
        out.push((dofs.into_iter().flatten().collect(), s));
    }
    if mesh.dim() == 3 {
        for f in 0..mesh.n_faces() {
            let s = subs(&mesh.facet_cells()[f]);
            if s.len() < 2 {
                continue;
            }
            let mut dofs: Vec<usize> = mesh.faces()[f].iter().filter_map(|&v| free(Some(dm.vertex_dof(v)))).collect();
            dofs.extend(mesh.face_edges(f).iter().filter_map(|&e| free(dm.edge_dof(e))));
            dofs.extend(free(dm.face_dof(f)));
            out.push((dofs, s));
        }
    }
    out
}

/// Splits the interface into connected components of DOFs with identical
/// sharing sets. Two such DOFs are connected when they lie in the closure of
/// a mesh edge or face shared by exactly the same subdomains.
pub fn classify_interface(mesh: &PolyMesh, dm: &DofMap, partition: &Partition) -> Result<InterfaceClassification, DecompositionError> {
    let n = partition.n_dofs();
    let mut uf = UnionFind((0..n).collect());
    for (dofs, s) in connectors(mesh, dm, partition.cell_owner()) {
        let members: Vec<usize> = dofs.into_iter().filter(|&i| partition.sharing(i) == s.as_slice()).collect();
        for w in members.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        match partition.sharing(i).len() {
            0 | 1 => {}
            _ => groups.entry(uf.find(i)).or_default().push(i),
        }
    }
    let dim = mesh.dim();
    let mut components: Vec<Component> = groups
        .into_values()
        .map(|dofs| {
            let sharing = partition.sharing(dofs[0]).to_vec();
            let m = sharing.len();
            let kind = match (dim, m) {
                (2, 2) => ComponentKind::Edge,
                (2, _) => ComponentKind::Vertex,
                (_, 2) => ComponentKind::Face,
                _ if dofs.len() == 1 => ComponentKind::Vertex,
                _ => ComponentKind::Edge,
            };
            Component { kind, dofs, sharing }
        })
        .collect();
    components.sort_by(|a, b| (a.kind, a.dofs[0]).cmp(&(b.kind, b.dofs[0])));
    let mut dof_component = vec![None; n];
    for (ci, comp) in components.iter().enumerate() {
        for &d in &comp.dofs {
            if partition.sharing(d).len() < 2 {
                return Err(DecompositionError::InvalidInterface(d));
            }
            dof_component[d] = Some(ci);
        }
    }
    Ok(InterfaceClassification { dim, components, dof_component })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_box, PolyMesh};
    use proptest::prelude::*;

    fn setup(dim: usize, n: usize, k: usize, grid: &[usize]) -> (PolyMesh, DofMap, Partition) {
        let mesh = generate_structured_box(dim, n).unwrap();
        let dm = DofMap::new(&mesh, k).unwrap();
        let p = partition_geometric(&mesh, &dm, grid).unwrap();
        (mesh, dm, p)
    }

    #[test]
    fn single_box_has_no_interface() {
        let (mesh, dm, p) = setup(2, 4, 2, &[1, 1]);
        assert_eq!(p.n_subdomains(), 1);
        assert!(p.interface_dofs().is_empty());
        assert!(classify_interface(&mesh, &dm, &p).unwrap().components.is_empty());
    }

    #[test]
    fn boundary_centroids_go_to_lower_box() {
        assert_eq!(box_index(0.5, 2), 0);
        assert_eq!(box_index(0.5000001, 2), 1);
        assert_eq!(box_index(0.0, 3), 0);
        assert_eq!(box_index(1.0, 3), 2);
    }

    #[test]
    fn hex_20_boxes_hold_125_cells() {
        let mesh = generate_structured_box(3, 20).unwrap();
        let owners = geometric_owners(&mesh, &[4, 4, 4]).unwrap();
        let mut count = [0usize; 64];
        for o in owners {
            count[o] += 1;
        }
        assert!(count.iter().all(|&c| c == 125));
    }

    #[test]
    fn empty_boxes_are_listed() {
        let mesh = generate_structured_box(2, 2).unwrap();
        assert!(matches!(geometric_owners(&mesh, &[3, 1]), Err(DecompositionError::EmptySubdomains(v)) if v == vec![1]));
    }

    #[test]
    fn strip_interface_is_one_edge() {
        let (mesh, dm, p) = setup(2, 4, 1, &[2, 1]);
        let cls = classify_interface(&mesh, &dm, &p).unwrap();
        assert_eq!(cls.counts(), (0, 1, 0));
        assert_eq!(cls.components[0].dofs.len(), 3);
    }

    #[test]
    fn chain_overlap_adds_one_layer() {
        // 4x1 chain of unit cells split 2|2
        let verts: Vec<[f64; 2]> = (0..2).flat_map(|j| (0..5).map(move |i| [i as f64 / 4.0, j as f64])).collect();
        let loops = (0..4).map(|i| vec![i, i + 1, i + 6, i + 5]).collect();
        let mesh = PolyMesh::from_polygons(verts, loops).unwrap();
        let dm = DofMap::new(&mesh, 1).unwrap();
        let p = Partition::from_owners(&mesh, &dm, vec![0, 0, 1, 1]).grow_overlap(&mesh, &dm, 1);
        assert_eq!(p.overlapping_cells(0), &[0, 1, 2]);
        assert_eq!(p.overlapping_cells(1), &[1, 2, 3]);
        let p0 = p.grow_overlap(&mesh, &dm, 0);
        assert_eq!(p0.overlapping_dofs(0), p0.nonoverlapping_dofs(0));
    }

    #[test]
    fn hex_overlap_matches_brute_force() {
        let (mesh, dm, p) = setup(3, 20, 1, &[4, 4, 4]);
        let p1 = p.grow_overlap(&mesh, &dm, 1);
        for s in 0..64 {
            // oracle: cells whose index box touches the closed block
            let (bi, bj, bk) = (s % 4, (s / 4) % 4, s / 16);
            let lo = [bi, bj, bk].map(|b| 5 * b);
            let expected: Vec<usize> = (0..8000)
                .filter(|&c| {
                    let ijk = [c % 20, (c / 20) % 20, c / 400];
                    (0..3).all(|d| ijk[d] + 1 >= lo[d] && ijk[d] <= lo[d] + 5)
                })
                .collect();
            assert_eq!(p1.overlapping_cells(s), expected.as_slice(), "subdomain {s}");
        }
        let interior = 1 + 4 + 16;
        assert_eq!(p1.overlapping_cells(interior).len(), 7 * 7 * 7);
    }

    #[test]
    fn hex_component_counts() {
        for (n, ns) in [(10, 2), (20, 4), (30, 6)] {
            let (mesh, dm, p) = setup(3, n, 1, &[ns, ns, ns]);
            let cls = classify_interface(&mesh, &dm, &p).unwrap();
            let m = ns - 1;
            assert_eq!(cls.counts(), (m * m * m, 3 * ns * m * m, 3 * ns * ns * m), "n_s = {ns}");
        }
    }

    #[test]
    fn k2_components_match_k1() {
        let (mesh, dm, p) = setup(3, 8, 2, &[2, 2, 2]);
        let cls = classify_interface(&mesh, &dm, &p).unwrap();
        assert_eq!(cls.counts(), (1, 6, 12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn components_partition_interface(nx in 1usize..4, ny in 1usize..4, k in 1usize..3, perm_seed in 0u64..50) {
            let mesh = generate_structured_box(2, 6).unwrap();
            let dm = DofMap::new(&mesh, k).unwrap();
            let owners = geometric_owners(&mesh, &[nx, ny]).unwrap();
            let p = Partition::from_owners(&mesh, &dm, owners.clone());
            let cls = classify_interface(&mesh, &dm, &p).unwrap();
            let mut all: Vec<usize> = cls.components.iter().flat_map(|c| c.dofs.clone()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, p.interface_dofs());
            for c in &cls.components {
                prop_assert!(c.dofs.iter().all(|&d| p.sharing(d) == c.sharing.as_slice()));
            }
            // renumbering subdomains keeps the type multiset
            let n = nx * ny;
            let shift = (perm_seed as usize) % n;
            let renumbered: Vec<usize> = owners.iter().map(|&o| (o + shift) % n).collect();
            let q = Partition::from_owners(&mesh, &dm, renumbered);
            prop_assert_eq!(classify_interface(&mesh, &dm, &q).unwrap().counts(), cls.counts());
        }
    }

    #[test]
    fn graph_growing_covers_all_cells() {
        let mesh = generate_structured_box(2, 10).unwrap();
        let owners = graph_growing_owners(&mesh, 7).unwrap();
        let mut count = [0usize; 7];
        for o in owners {
            count[o] += 1;
        }
        assert_eq!(count.iter().sum::<usize>(), 100);
        assert!(count.iter().all(|&c| (14..=15).contains(&c)));
    }
}
