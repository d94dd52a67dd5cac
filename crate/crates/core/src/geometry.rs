//! Small fixed-size vector helpers and polygon/polyhedron measures.
//!
//! Points are stored as `[f64; 3]` in both dimensions; 2D meshes keep `z = 0`.

pub type Point = [f64; 3];

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn distance(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

pub fn mean(points: impl IntoIterator<Item = Point>) -> Point {
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for p in points {
        acc = add(&acc, &p);
        n += 1;
    }
    if n == 0 {
        acc
    } else {
        scale(&acc, 1.0 / n as f64)
    }
}

/// Largest pairwise distance of a point set.
pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(distance(&points[i], &points[j]));
        }
    }
    d
}

/// Signed area of a planar polygon given in the xy-plane (counter-clockwise positive).
pub fn signed_area_2d(loop_pts: &[[f64; 2]]) -> f64 {
    let n = loop_pts.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = loop_pts[i];
        let q = loop_pts[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Area centroid of a simple polygon in the plane. Falls back to the vertex
/// average when the area vanishes.
pub fn centroid_2d(loop_pts: &[[f64; 2]]) -> [f64; 2] {
    let n = loop_pts.len();
    let area = signed_area_2d(loop_pts);
    if area.abs() < f64::MIN_POSITIVE {
        let mut c = [0.0; 2];
        for p in loop_pts {
            c[0] += p[0];
            c[1] += p[1];
        }
        return [c[0] / n as f64, c[1] / n as f64];
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = loop_pts[i];
        let q = loop_pts[(i + 1) % n];
        let w = p[0] * q[1] - q[0] * p[1];
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    [cx / (6.0 * area), cy / (6.0 * area)]
}

/// Newell normal of a (possibly slightly non-planar) 3D polygon; its length is
/// twice the polygon area.
pub fn newell_normal(loop_pts: &[Point]) -> Point {
    let n = loop_pts.len();
    let mut nrm = [0.0; 3];
    for i in 0..n {
        let p = &loop_pts[i];
        let q = &loop_pts[(i + 1) % n];
        nrm[0] += (p[1] - q[1]) * (p[2] + q[2]);
        nrm[1] += (p[2] - q[2]) * (p[0] + q[0]);
        nrm[2] += (p[0] - q[0]) * (p[1] + q[1]);
    }
    nrm
}

/// Orthonormal in-plane frame for a 3D polygon with unit normal `n`.
pub fn plane_frame(n: &Point, first_edge: &Point) -> (Point, Point) {
    let proj = sub(first_edge, &scale(n, dot(first_edge, n)));
    let len = norm(&proj);
    let e1 = if len > 0.0 {
        scale(&proj, 1.0 / len)
    } else {
        // any vector orthogonal to n
        let trial = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let t = sub(&trial, &scale(n, dot(&trial, n)));
        scale(&t, 1.0 / norm(&t))
    };
    let e2 = cross(n, &e1);
    (e1, e2)
}

/// Signed volume of the tetrahedron (a, b, c, d).
#[inline]
pub fn tet_volume(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    dot(&sub(b, a), &cross(&sub(c, a), &sub(d, a))) / 6.0
}

/// Do the closed segments p1-p2 and q1-q2 intersect? Collinear overlaps count.
pub fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    }
    fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
        p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_area_and_centroid() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert_eq!(signed_area_2d(&sq), 1.0);
        assert_eq!(centroid_2d(&sq), [0.5, 0.5]);
        let rev: Vec<_> = sq.iter().rev().copied().collect();
        assert_eq!(signed_area_2d(&rev), -1.0);
    }

    #[test]
    fn newell_normal_of_unit_square_in_xz() {
        let sq = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 1.0], [0.0, 0.0, 1.0]];
        let n = newell_normal(&sq);
        assert!((norm(&n) - 2.0).abs() < 1e-15);
        assert!((n[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn crossing_segments() {
        assert!(segments_intersect([0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]));
        assert!(!segments_intersect([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]));
    }
}
