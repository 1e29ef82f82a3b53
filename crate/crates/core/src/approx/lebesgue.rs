use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::geom::{width, GeoComplex};
use crate::metric;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let len = dot(&ab, &ab);
    let t = if len > 0.0 { (dot(&sub(p, a), &ab) / len).clamp(0.0, 1.0) } else { 0.0 };
    let q: Vec<f64> = a.iter().zip(&ab).map(|(x, d)| x + t * d).collect();
    metric::dist(p, &q)
}

/// Closest point on a triangle through its Voronoi regions, using dot products only.
fn triangle_distance(p: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let (ab, ac, ap) = (sub(b, a), sub(c, a), sub(p, a));
    let (d1, d2) = (dot(&ab, &ap), dot(&ac, &ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return metric::dist(p, a);
    }
    let bp = sub(p, b);
    let (d3, d4) = (dot(&ab, &bp), dot(&ac, &bp));
    if d3 >= 0.0 && d4 <= d3 {
        return metric::dist(p, b);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return segment_distance(p, a, b);
    }
    let cp = sub(p, c);
    let (d5, d6) = (dot(&ab, &cp), dot(&ac, &cp));
    if d6 >= 0.0 && d5 <= d6 {
        return metric::dist(p, c);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return segment_distance(p, a, c);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        return segment_distance(p, b, c);
    }
    let denom = 1.0 / (va + vb + vc);
    let (v, w) = (vb * denom, vc * denom);
    let q: Vec<f64> = (0..p.len()).map(|i| a[i] + ab[i] * v + ac[i] * w).collect();
    metric::dist(p, &q)
}

/// Euclidean distance from `p` to the convex hull of `pts` (affinely independent).
pub fn point_simplex_distance(p: &[f64], pts: &[&Vec<f64>]) -> f64 {
    match pts.len() {
        1 => return metric::dist(p, pts[0]),
        2 => return segment_distance(p, pts[0], pts[1]),
        3 => return triangle_distance(p, pts[0], pts[1], pts[2]),
        _ => {}
    }
    let n = pts.len() - 1;
    let rows = p.len();
    let e = DMatrix::from_fn(rows, n, |r, k| pts[k + 1][r] - pts[0][r]);
    let q = DVector::from_fn(rows, |r, _| p[r] - pts[0][r]);
    if let Some(chol) = (e.transpose() * &e).cholesky() {
        let mu = chol.solve(&(e.transpose() * &q));
        if mu.iter().all(|m| *m >= 0.0) && mu.sum() <= 1.0 {
            return (&e * &mu - &q).norm();
        }
    }
    (0..pts.len())
        .map(|skip| {
            let face: Vec<&Vec<f64>> = pts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
            point_simplex_distance(p, &face)
        })
        .fold(f64::INFINITY, f64::min)
}

struct Piece {
    pts: Vec<Vec<f64>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Piece {
    fn new(pts: Vec<Vec<f64>>) -> Self {
        let d = pts[0].len();
        let lo = (0..d).map(|k| pts.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min)).collect();
        let hi = (0..d).map(|k| pts.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
        Piece { pts, lo, hi }
    }

    fn box_distance(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| if x < l { l - x } else if x > h { x - h } else { 0.0 })
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt()
    }

    fn distance(&self, p: &[f64]) -> f64 {
        point_simplex_distance(p, &self.pts.iter().collect::<Vec<_>>())
    }
}

/// For each vertex `v`, the closed complement of its open star as a union of
/// simplices: maximal simplices missing `v` and the faces opposite `v`.
fn complements(c: &GeoComplex, pts: &[Vec<f64>]) -> Vec<Vec<Piece>> {
    let mut out: Vec<Vec<Piece>> = (0..pts.len()).map(|_| Vec::new()).collect();
    for (v, pieces) in out.iter_mut().enumerate() {
        for s in c.maximal_simplices() {
            let ids: Vec<usize> = s.vertex_ids().iter().copied().filter(|&u| u != v).collect();
            if !ids.is_empty() {
                pieces.push(Piece::new(ids.iter().map(|&u| pts[u].clone()).collect()));
            }
        }
    }
    out
}

/// `max_v dist(p, complement of St(v))` over the vertices `v` of a simplex containing `p`.
fn star_radius(p: &[f64], verts: &[usize], comp: &[Vec<Piece>]) -> f64 {
    let mut best = 0.0f64;
    for &v in verts {
        let mut d = f64::INFINITY;
        for piece in &comp[v] {
            if piece.box_distance(p) < d {
                d = d.min(piece.distance(p));
            }
        }
        best = best.max(d);
    }
    best
}

/// Distances to the complements of open vertex stars, restricted to the
/// pieces that can come within `reach` of the star.
pub(crate) struct Clearance {
    pieces: Vec<Vec<Piece>>,
}

impl Clearance {
    pub(crate) fn new(c: &GeoComplex, reach: f64) -> Self {
        let pts: Vec<Vec<f64>> = c.vertices().iter().map(|p| p.to_f64()).collect();
        let star = super::StarTable::new(c);
        let pieces = complements(c, &pts)
            .into_iter()
            .enumerate()
            .map(|(w, all)| {
                let limit = star.diameter(w) + reach;
                all.into_iter().filter(|p| p.box_distance(&pts[w]) <= limit).collect()
            })
            .collect();
        Clearance { pieces }
    }

    /// Whether the ball `B(y, delta)` misses the complement of `St(w)`, for
    /// `y` in the open star of `w`.
    pub(crate) fn exceeds(&self, w: usize, y: &[f64], delta: f64) -> bool {
        self.pieces[w].iter().all(|p| p.box_distance(y) >= delta || p.distance(y) >= delta)
    }
}

struct Cell {
    lower: f64,
    verts: Vec<Vec<f64>>,
    owner: usize,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.lower == o.lower
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        o.lower.total_cmp(&self.lower)
    }
}

/// Lower bound for the Lebesgue number of the open vertex star cover, within
/// relative tolerance `1e-3` of its value.
pub fn star_cover_lebesgue(c: &GeoComplex) -> Result<f64> {
    star_cover_lebesgue_with(c, 1e-3)
}

/// Branch and bound over longest-edge bisections of the maximal simplices.
/// `star_radius` is 1-Lipschitz, so a cell's value at its centroid minus its
/// radius bounds it from below; the returned value is such a bound.
pub fn star_cover_lebesgue_with(c: &GeoComplex, rel_tol: f64) -> Result<f64> {
    let maximal = c.maximal_simplices();
    for s in maximal {
        if s.dim() > 0 {
            width(s, c)?;
        }
    }
    let pts: Vec<Vec<f64>> = c.vertices().iter().map(|p| p.to_f64()).collect();
    let comp = complements(c, &pts);
    let owners: Vec<Vec<usize>> = maximal.iter().map(|s| s.vertex_ids().to_vec()).collect();
    let mut upper = f64::INFINITY;
    let mut heap = BinaryHeap::new();
    let push = |verts: Vec<Vec<f64>>, owner: usize, upper: &mut f64, heap: &mut BinaryHeap<Cell>| {
        let k = verts.len() as f64;
        let centroid: Vec<f64> = (0..verts[0].len()).map(|i| verts.iter().map(|v| v[i]).sum::<f64>() / k).collect();
        let radius = verts.iter().map(|v| metric::dist(v, &centroid)).fold(0.0, f64::max);
        let value = star_radius(&centroid, &owners[owner], &comp);
        *upper = upper.min(value);
        heap.push(Cell { lower: value - radius, verts, owner });
    };
    for (i, s) in maximal.iter().enumerate() {
        let verts: Vec<Vec<f64>> = s.vertex_ids().iter().map(|&v| pts[v].clone()).collect();
        for v in &verts {
            upper = upper.min(star_radius(v, &owners[i], &comp));
        }
        push(verts, i, &mut upper, &mut heap);
    }
    let mut steps = 0usize;
    while let Some(cell) = heap.pop() {
        steps += 1;
        if upper - cell.lower <= rel_tol * upper || cell.verts.len() == 1 || steps > 2_000_000 {
            return Ok(cell.lower.max(0.0));
        }
        let n = cell.verts.len();
        let (mut a, mut b, mut best) = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let d = metric::dist(&cell.verts[i], &cell.verts[j]);
                if d > best {
                    (a, b, best) = (i, j, d);
                }
            }
        }
        let mid = metric::lerp(&cell.verts[a], &cell.verts[b], 0.5);
        upper = upper.min(star_radius(&mid, &owners[cell.owner], &comp));
        for drop in [a, b] {
            let mut verts = cell.verts.clone();
            verts[drop] = mid.clone();
            push(verts, cell.owner, &mut upper, &mut heap);
        }
    }
    Ok(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::subdivide::standard_subdivision;

    #[test]
    fn distance_to_simplices() {
        let a = vec![0.0, 0.0];
        let b = vec![1.0, 0.0];
        let c = vec![0.0, 1.0];
        assert!((point_simplex_distance(&[2.0, 0.0], &[&a, &b]) - 1.0).abs() < 1e-12);
        assert!((point_simplex_distance(&[0.5, 1.0], &[&a, &b]) - 1.0).abs() < 1e-12);
        assert!(point_simplex_distance(&[0.2, 0.2], &[&a, &b, &c]) < 1e-12);
        assert!((point_simplex_distance(&[1.0, 1.0], &[&a, &b, &c]) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((point_simplex_distance(&[-1.0, -1.0], &[&a, &b, &c]) - 2f64.sqrt()).abs() < 1e-12);
        // The closed forms agree with the projection route in ℝ³.
        let (a3, b3, c3, d3) = (vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]);
        for p in [[0.3, 0.3, 1.0], [-1.0, 0.5, 0.2], [2.0, 2.0, -1.0], [0.1, -0.4, 0.0]] {
            let tet = point_simplex_distance(&p, &[&a3, &b3, &c3, &d3]);
            let faces = [[&a3, &b3, &c3], [&a3, &b3, &d3], [&a3, &c3, &d3], [&b3, &c3, &d3]];
            let via: f64 = faces.iter().map(|f| point_simplex_distance(&p, f)).fold(f64::INFINITY, f64::min);
            let inside = p.iter().all(|x| *x >= 0.0) && p.iter().sum::<f64>() <= 1.0;
            assert!(inside || (tet - via).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn half_segment() {
        let c = standard_subdivision(&GeoComplex::unit_simplex(1)).unwrap();
        let r = star_cover_lebesgue(&c).unwrap();
        assert!((r - 0.25).abs() <= 0.025 && r <= 0.25 + 1e-12, "{r}");
    }

    #[test]
    fn single_simplices() {
        for n in 1..=3 {
            let c = GeoComplex::unit_simplex(n);
            let s = &c.maximal_simplices()[0];
            let w = width(s, &c).unwrap();
            let r = star_cover_lebesgue(&c).unwrap();
            assert!(r > 0.0 && r >= w / (n as f64 + 1.0) * (1.0 - 1e-3), "n={n} r={r}");
        }
    }

    #[test]
    fn scaling_doubles() {
        let c = standard_subdivision(&GeoComplex::unit_simplex(2)).unwrap();
        let r = star_cover_lebesgue(&c).unwrap();
        let r2 = star_cover_lebesgue(&c.scaled(&Dyadic::from_int(2))).unwrap();
        assert!((r2 / r - 2.0).abs() <= 1e-6, "{r} {r2}");
        let t = GeoComplex::triangle_boundary();
        let s = star_cover_lebesgue(&t).unwrap();
        assert!((star_cover_lebesgue(&t.scaled(&Dyadic::from_int(2))).unwrap() / s - 2.0).abs() <= 1e-6);
    }
}
