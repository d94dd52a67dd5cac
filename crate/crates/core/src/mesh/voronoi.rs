//! 2D Voronoi meshes of the unit square by half-plane clipping.
//!
//! Each cell starts as the unit square and is clipped by the bisectors of
//! nearby seeds, found through a uniform bucket grid and visited in rings
//! until the next ring lies beyond twice the current cell radius.
//!
//! Every polygon vertex is labelled by the three constraints meeting there
//! (its own seed plus two neighbouring seeds or box sides). Coordinates are
//! recomputed from that label, so a vertex shared by several cells gets
//! bitwise-identical coordinates in all of them. Vertices closer than
//! [`MERGE_TOL`] (co-circular seeds) are merged afterwards.
//!
//! Seeds are drawn with `ChaCha8Rng::seed_from_u64(rng_seed)`, x then y per seed.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MeshError, PolyMesh};

const DUPLICATE_TOL: f64 = 1e-12;
const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Constraint {
    /// 0: y = 0, 1: x = 1, 2: y = 1, 3: x = 0
    Side(u8),
    Seed(u32),
}

/// `n` seeds drawn uniformly in the unit square.
pub fn random_seeds(n: usize, rng_seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..n)
        .map(|_| {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen();
            [x, y]
        })
        .collect()
}

/// Voronoi mesh of `n_seeds` random seeds, one cell per seed.
pub fn generate_voronoi_2d(n_seeds: usize, rng_seed: u64) -> Result<PolyMesh, MeshError> {
    if n_seeds == 0 {
        return Err(MeshError::InvalidParameter("n_seeds must be at least 1".into()));
    }
    voronoi_2d_from_seeds(&random_seeds(n_seeds, rng_seed))
}

fn check_seeds(seeds: &[[f64; 2]]) -> Result<(), MeshError> {
    if seeds.is_empty() {
        return Err(MeshError::InvalidParameter("at least one seed is required".into()));
    }
    for (i, s) in seeds.iter().enumerate() {
        if !(0.0..=1.0).contains(&s[0]) || !(0.0..=1.0).contains(&s[1]) {
            return Err(MeshError::InvalidParameter(format!("seed {i} lies outside the unit square")));
        }
    }
    let mut order: Vec<usize> = (0..seeds.len()).collect();
    order.sort_by(|&a, &b| seeds[a][0].total_cmp(&seeds[b][0]).then(seeds[a][1].total_cmp(&seeds[b][1])));
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if seeds[b][0] - seeds[a][0] > DUPLICATE_TOL {
                break;
            }
            let d = ((seeds[a][0] - seeds[b][0]).powi(2) + (seeds[a][1] - seeds[b][1]).powi(2)).sqrt();
            if d <= DUPLICATE_TOL {
                return Err(MeshError::DuplicateSeed { first: a.min(b), second: a.max(b) });
            }
        }
    }
    Ok(())
}

struct BucketGrid {
    size: usize,
    buckets: Vec<Vec<u32>>,
}

impl BucketGrid {
    fn new(seeds: &[[f64; 2]]) -> Self {
        let size = ((seeds.len() as f64).sqrt().floor() as usize).max(1);
        let mut buckets = vec![Vec::new(); size * size];
        for (i, s) in seeds.iter().enumerate() {
            let (bx, by) = Self::locate(size, s);
            buckets[bx + size * by].push(i as u32);
        }
        BucketGrid { size, buckets }
    }

    fn locate(size: usize, s: &[f64; 2]) -> (usize, usize) {
        let f = |x: f64| ((x * size as f64) as usize).min(size - 1);
        (f(s[0]), f(s[1]))
    }
}

/// Polygon with per-edge constraint labels: `labels[j]` belongs to the edge
/// from `pts[j]` to `pts[j + 1]`.
struct LabelledPolygon {
    pts: Vec<[f64; 2]>,
    labels: Vec<Constraint>,
}

impl LabelledPolygon {
    fn unit_square() -> Self {
        LabelledPolygon {
            pts: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            labels: vec![Constraint::Side(0), Constraint::Side(1), Constraint::Side(2), Constraint::Side(3)],
        }
    }

    fn radius_from(&self, s: &[f64; 2]) -> f64 {
        self.pts
            .iter()
            .map(|p| ((p[0] - s[0]).powi(2) + (p[1] - s[1]).powi(2)).sqrt())
            .fold(0.0, f64::max)
    }

    /// Keeps the half-plane closer to `own` than to `other`.
    fn clip(&mut self, own: &[f64; 2], other: &[f64; 2], label: Constraint) {
        let nrm = [other[0] - own[0], other[1] - own[1]];
        let mid = [0.5 * (own[0] + other[0]), 0.5 * (own[1] + other[1])];
        let d: Vec<f64> = self.pts.iter().map(|p| (p[0] - mid[0]) * nrm[0] + (p[1] - mid[1]) * nrm[1]).collect();
        if d.iter().all(|&v| v <= 0.0) {
            return;
        }
        let n = self.pts.len();
        let mut pts = Vec::with_capacity(n + 1);
        let mut labels = Vec::with_capacity(n + 1);
        for j in 0..n {
            let k = (j + 1) % n;
            let (p, q, dp, dq) = (self.pts[j], self.pts[k], d[j], d[k]);
            let lab = self.labels[j];
            let cut = |dp: f64, dq: f64| {
                let t = dp / (dp - dq);
                [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
            };
            if dp <= 0.0 && dq <= 0.0 {
                pts.push(p);
                labels.push(lab);
            } else if dp <= 0.0 {
                if dp == 0.0 {
                    pts.push(p);
                    labels.push(label);
                } else {
                    pts.push(p);
                    labels.push(lab);
                    pts.push(cut(dp, dq));
                    labels.push(label);
                }
            } else if dq <= 0.0 {
                if dq < 0.0 {
                    pts.push(cut(dp, dq));
                    labels.push(lab);
                }
            }
        }
        self.pts = pts;
        self.labels = labels;
    }
}

type VertexKey = [Constraint; 3];

fn canonical_point(key: &VertexKey, seeds: &[[f64; 2]]) -> [f64; 2] {
    let mut seed_ids: Vec<usize> = Vec::new();
    let mut sides: Vec<u8> = Vec::new();
    for c in key {
        match *c {
            Constraint::Seed(s) => seed_ids.push(s as usize),
            Constraint::Side(s) => sides.push(s),
        }
    }
    seed_ids.sort_unstable();
    sides.sort_unstable();
    match (seed_ids.len(), sides.len()) {
        (3, 0) => circumcenter(seeds[seed_ids[0]], seeds[seed_ids[1]], seeds[seed_ids[2]]),
        (2, 1) => bisector_on_side(seeds[seed_ids[0]], seeds[seed_ids[1]], sides[0]),
        (1, 2) => corner(sides[0], sides[1]),
        _ => unreachable!("vertex key must combine its own seed with two other constraints"),
    }
}

fn circumcenter(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    [a[0] + (cy * b2 - by * c2) / d, a[1] + (bx * c2 - cx * b2) / d]
}

fn bisector_on_side(a: [f64; 2], b: [f64; 2], side: u8) -> [f64; 2] {
    // points p with 2 p.(b - a) = |b|^2 - |a|^2
    let rhs = (b[0] * b[0] + b[1] * b[1]) - (a[0] * a[0] + a[1] * a[1]);
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    match side {
        0 | 2 => {
            let y = if side == 0 { 0.0 } else { 1.0 };
            [(rhs - 2.0 * y * dy) / (2.0 * dx), y]
        }
        _ => {
            let x = if side == 1 { 1.0 } else { 0.0 };
            [x, (rhs - 2.0 * x * dx) / (2.0 * dy)]
        }
    }
}

fn corner(s1: u8, s2: u8) -> [f64; 2] {
    match (s1, s2) {
        (0, 1) => [1.0, 0.0],
        (1, 2) => [1.0, 1.0],
        (2, 3) => [0.0, 1.0],
        (0, 3) => [0.0, 0.0],
        _ => unreachable!("sides {s1} and {s2} do not meet"),
    }
}

fn clip_cell(i: usize, seeds: &[[f64; 2]], grid: &BucketGrid) -> LabelledPolygon {
    let own = seeds[i];
    let mut poly = LabelledPolygon::unit_square();
    let g = grid.size as isize;
    let (bx, by) = BucketGrid::locate(grid.size, &own);
    let (bx, by) = (bx as isize, by as isize);
    let mut r: isize = 0;
    loop {
        for y in (by - r)..=(by + r) {
            for x in (bx - r)..=(bx + r) {
                if (x - bx).abs() != r && (y - by).abs() != r {
                    continue;
                }
                if x < 0 || y < 0 || x >= g || y >= g {
                    continue;
                }
                for &j in &grid.buckets[(x + g * y) as usize] {
                    let j = j as usize;
                    if j != i {
                        poly.clip(&own, &seeds[j], Constraint::Seed(j as u32));
                    }
                }
            }
        }
        // seeds in ring r + 1 are at least r / size away
        let radius = poly.radius_from(&own);
        if r as f64 / grid.size as f64 > 2.0 * radius || r > g {
            break;
        }
        r += 1;
    }
    poly
}

/// Voronoi mesh of explicitly given seeds (clipped to the unit square).
pub fn voronoi_2d_from_seeds(seeds: &[[f64; 2]]) -> Result<PolyMesh, MeshError> {
    check_seeds(seeds)?;
    let grid = BucketGrid::new(seeds);
    let polys: Vec<LabelledPolygon> = (0..seeds.len()).map(|i| clip_cell(i, seeds, &grid)).collect();

    let mut key_ids: HashMap<VertexKey, usize> = HashMap::new();
    let mut points: Vec<[f64; 2]> = Vec::new();
    let mut raw_loops: Vec<Vec<usize>> = Vec::with_capacity(seeds.len());
    for (i, poly) in polys.iter().enumerate() {
        let n = poly.pts.len();
        let mut lp = Vec::with_capacity(n);
        for j in 0..n {
            let incoming = poly.labels[(j + n - 1) % n];
            let outgoing = poly.labels[j];
            let mut key = [Constraint::Seed(i as u32), incoming, outgoing];
            key.sort_unstable();
            let id = *key_ids.entry(key).or_insert_with(|| {
                points.push(canonical_point(&key, seeds));
                points.len() - 1
            });
            lp.push(id);
        }
        raw_loops.push(lp);
    }

    // merge coincident vertices
    let cell = 1e-9;
    let bucket = |p: &[f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut spatial: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut remap = vec![0usize; points.len()];
    let mut merged: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    for (pid, p) in points.iter().enumerate() {
        let (bx, by) = bucket(p);
        let mut found = None;
        'search: for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(list) = spatial.get(&(bx + dx, by + dy)) {
                    for &m in list {
                        let q = merged[m];
                        if ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() <= MERGE_TOL {
                            found = Some(m);
                            break 'search;
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            merged.push(*p);
            spatial.entry((bx, by)).or_default().push(merged.len() - 1);
            merged.len() - 1
        });
        remap[pid] = id;
    }

    let mut loops = Vec::with_capacity(raw_loops.len());
    for (c, raw) in raw_loops.into_iter().enumerate() {
        let mut lp: Vec<usize> = Vec::with_capacity(raw.len());
        for v in raw.into_iter().map(|v| remap[v]) {
            if lp.last() != Some(&v) {
                lp.push(v);
            }
        }
        while lp.len() > 1 && lp.first() == lp.last() {
            lp.pop();
        }
        if lp.len() < 3 {
            return Err(MeshError::DegenerateLoop { entity: "cell", index: c });
        }
        loops.push(lp);
    }
    PolyMesh::from_polygons(merged, loops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_seed_owns_the_box() {
        let m = generate_voronoi_2d(1, 7).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.cell_measure(0), 1.0);
    }

    #[test]
    fn four_symmetric_seeds_give_quarter_squares() {
        let seeds = [[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]];
        let m = voronoi_2d_from_seeds(&seeds).unwrap();
        assert_eq!(m.n_cells(), 4);
        assert_eq!(m.n_vertices(), 9);
        for c in 0..4 {
            assert_eq!(m.cell_vertices(c).len(), 4);
            assert!((m.cell_measure(c) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn duplicate_seeds_rejected() {
        let seeds = [[0.1, 0.2], [0.5, 0.5], [0.1, 0.2 + 1e-13]];
        match voronoi_2d_from_seeds(&seeds) {
            Err(MeshError::DuplicateSeed { first: 0, second: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = generate_voronoi_2d(200, 42).unwrap();
        let b = generate_voronoi_2d(200, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_voronoi_2d(200, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn clipping_matches_brute_force_nearest_seed() {
        // every cell centroid must be closer to its own seed than to any other
        let seeds = random_seeds(300, 5);
        let m = voronoi_2d_from_seeds(&seeds).unwrap();
        for c in 0..m.n_cells() {
            let p = m.cell_centroid(c);
            let d = |s: &[f64; 2]| (p[0] - s[0]).powi(2) + (p[1] - s[1]).powi(2);
            let best = (0..seeds.len()).min_by(|&a, &b| d(&seeds[a]).total_cmp(&d(&seeds[b]))).unwrap();
            assert_eq!(best, c);
        }
    }
}
