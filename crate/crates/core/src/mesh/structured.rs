use super::{MeshError, PolyMesh};

/// Uniform quadrilateral (2D) or hexahedral (3D) grid on the unit box with
/// `n` cells per axis. Vertex `(i, j[, k])` has index `i + (n+1) j [+ (n+1)^2 k]`.
pub fn generate_structured_box(dim: usize, n: usize) -> Result<PolyMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidParameter("n_per_axis must be at least 1".into()));
    }
    let np = n + 1;
    let coord = |i: usize| i as f64 / n as f64;
    match dim {
        2 => {
            let mut vertices = Vec::with_capacity(np * np);
            for j in 0..np {
                for i in 0..np {
                    vertices.push([coord(i), coord(j)]);
                }
            }
            let v = |i: usize, j: usize| i + np * j;
            let mut loops = Vec::with_capacity(n * n);
            for j in 0..n {
                for i in 0..n {
                    loops.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)]);
                }
            }
            PolyMesh::from_polygons(vertices, loops)
        }
        3 => {
            let mut vertices = Vec::with_capacity(np * np * np);
            for k in 0..np {
                for j in 0..np {
                    for i in 0..np {
                        vertices.push([coord(i), coord(j), coord(k)]);
                    }
                }
            }
            let v = |i: usize, j: usize, k: usize| i + np * (j + np * k);
            let mut faces = Vec::with_capacity(3 * n * n * np);
            // x-normal faces at i = 0..=n
            let xf0 = faces.len();
            for k in 0..n {
                for j in 0..n {
                    for i in 0..np {
                        faces.push(vec![v(i, j, k), v(i, j + 1, k), v(i, j + 1, k + 1), v(i, j, k + 1)]);
                    }
                }
            }
            let xf = |i: usize, j: usize, k: usize| xf0 + i + np * (j + n * k);
            let yf0 = faces.len();
            for k in 0..n {
                for j in 0..np {
                    for i in 0..n {
                        faces.push(vec![v(i, j, k), v(i, j, k + 1), v(i + 1, j, k + 1), v(i + 1, j, k)]);
                    }
                }
            }
            let yf = |i: usize, j: usize, k: usize| yf0 + i + n * (j + np * k);
            let zf0 = faces.len();
            for k in 0..np {
                for j in 0..n {
                    for i in 0..n {
                        faces.push(vec![v(i, j, k), v(i + 1, j, k), v(i + 1, j + 1, k), v(i, j + 1, k)]);
                    }
                }
            }
            let zf = |i: usize, j: usize, k: usize| zf0 + i + n * (j + n * k);
            let mut cells = Vec::with_capacity(n * n * n);
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        cells.push(vec![xf(i, j, k), xf(i + 1, j, k), yf(i, j, k), yf(i, j + 1, k), zf(i, j, k), zf(i, j, k + 1)]);
                    }
                }
            }
            PolyMesh::from_polyhedra(vertices, faces, cells)
        }
        d => Err(MeshError::BadDimension(d)),
    }
}
