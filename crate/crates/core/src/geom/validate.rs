use std::collections::{HashMap, HashSet};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{GeoComplex, Simplex};
use crate::error::Error;
use crate::exact::{self, point_to_rationals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    FaceClosure,
    OrderCycle,
    OrderNotTotal,
    Degenerate,
    DuplicateVertex,
    InteriorOverlap,
}

impl ViolationKind {
    fn label(self) -> &'static str {
        match self {
            ViolationKind::FaceClosure => "face-closure violated",
            ViolationKind::OrderCycle => "order has a cycle",
            ViolationKind::OrderNotTotal => "order not total on simplex",
            ViolationKind::Degenerate => "degenerate simplex",
            ViolationKind::DuplicateVertex => "duplicate vertex",
            ViolationKind::InteriorOverlap => "interior overlap",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub simplices: Vec<Vec<usize>>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.kind.label(), self.simplices)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }
}

/// Checks face closure, the local order, affine independence, distinct
/// vertex positions and disjointness of top-dimensional interiors.
///
/// Overlap is detected by locating the barycenter of every face of one top
/// simplex in the relative interior of another.
pub fn validate(c: &GeoComplex) -> ValidationReport {
    let mut out = Vec::new();
    for s in c.simplices() {
        for f in s.facets() {
            if !c.contains(&f) {
                out.push(Violation {
                    kind: ViolationKind::FaceClosure,
                    simplices: vec![f.vertex_ids().to_vec(), s.vertex_ids().to_vec()],
                });
            }
        }
    }
    match c.check_local_order() {
        Err(Error::OrderCycle(v)) => out.push(Violation { kind: ViolationKind::OrderCycle, simplices: vec![vec![v]] }),
        Err(Error::OrderNotTotal(s)) => out.push(Violation { kind: ViolationKind::OrderNotTotal, simplices: vec![s] }),
        _ => {}
    }
    let mut seen = HashMap::new();
    for (i, v) in c.vertices().iter().enumerate() {
        if let Some(j) = seen.insert(v, i) {
            out.push(Violation { kind: ViolationKind::DuplicateVertex, simplices: vec![vec![j], vec![i]] });
        }
    }
    let mut degenerate = HashSet::new();
    for s in c.maximal_simplices() {
        if s.dim() > c.ambient_dim() || !exact::affinely_independent(&c.points(s)) {
            degenerate.insert(s.clone());
            out.push(Violation { kind: ViolationKind::Degenerate, simplices: vec![s.vertex_ids().to_vec()] });
        }
    }
    let top: Vec<&Simplex> = c.top_simplices().into_iter().filter(|s| !degenerate.contains(*s)).collect();
    for (a, b) in overlap_candidates(c, &top) {
        if interiors_meet(c, top[a], top[b]) {
            out.push(Violation {
                kind: ViolationKind::InteriorOverlap,
                simplices: vec![top[a].vertex_ids().to_vec(), top[b].vertex_ids().to_vec()],
            });
        }
    }
    ValidationReport { violations: out }
}

struct Bbox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn bbox(pts: &[Vec<f64>]) -> Bbox {
    let n = pts[0].len();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in pts {
        for k in 0..n {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    Bbox { lo, hi }
}

/// Pairs of top simplices whose bounding boxes intersect, found with a uniform grid.
fn overlap_candidates(c: &GeoComplex, top: &[&Simplex]) -> Vec<(usize, usize)> {
    if top.len() < 2 {
        return Vec::new();
    }
    let boxes: Vec<Bbox> = top.iter().map(|s| bbox(&c.points_f64(s))).collect();
    let cell = boxes
        .iter()
        .map(|b| b.lo.iter().zip(&b.hi).map(|(l, h)| h - l).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        .max(1e-12);
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, b) in boxes.iter().enumerate() {
        let lo: Vec<i64> = b.lo.iter().map(|x| (x / cell).floor() as i64).collect();
        let hi: Vec<i64> = b.hi.iter().map(|x| (x / cell).floor() as i64).collect();
        let mut key = lo.clone();
        loop {
            grid.entry(key.clone()).or_default().push(i);
            let mut k = 0;
            while k < key.len() {
                if key[k] < hi[k] {
                    key[k] += 1;
                    break;
                }
                key[k] = lo[k];
                k += 1;
            }
            if k == key.len() {
                break;
            }
        }
    }
    let mut pairs = HashSet::new();
    for members in grid.values() {
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let (a, b) = (i.min(j), i.max(j));
                let overlap = boxes[a].lo.iter().zip(&boxes[a].hi).zip(boxes[b].lo.iter().zip(&boxes[b].hi))
                    .all(|((l1, h1), (l2, h2))| l1 <= h2 && l2 <= h1);
                if overlap {
                    pairs.insert((a, b));
                }
            }
        }
    }
    let mut v: Vec<_> = pairs.into_iter().collect();
    v.sort_unstable();
    v
}

fn interiors_meet(c: &GeoComplex, s: &Simplex, t: &Simplex) -> bool {
    if s == t {
        return false;
    }
    probe(c, s, t) || probe(c, t, s)
}

/// Whether the barycenter of some face of `s` lies in the relative interior of `t`.
fn probe(c: &GeoComplex, s: &Simplex, t: &Simplex) -> bool {
    let t_pts = c.points_f64(t);
    let t_exact: Vec<Vec<BigRational>> = c.points(t).iter().map(point_to_rationals).collect();
    for face in s.faces() {
        if face.is_face_of(t) {
            continue;
        }
        let pts = c.points_f64(&face);
        let k = pts.len() as f64;
        let bary: Vec<f64> = (0..pts[0].len()).map(|r| pts.iter().map(|p| p[r]).sum::<f64>() / k).collect();
        match float_location(&t_pts, &bary) {
            Location::Outside => continue,
            Location::Inside | Location::Unsure => {
                let inv = BigRational::new(1.into(), (pts.len() as i64).into());
                let exact_pts: Vec<Vec<BigRational>> = c.points(&face).iter().map(point_to_rationals).collect();
                let b: Vec<BigRational> = (0..exact_pts[0].len())
                    .map(|r| exact_pts.iter().fold(BigRational::zero(), |a, p| a + &p[r]) * &inv)
                    .collect();
                if let Some(l) = exact::barycentric_rational(&t_exact, &b) {
                    if l.iter().all(Signed::is_positive) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

enum Location {
    Inside,
    Outside,
    Unsure,
}

fn float_location(t: &[Vec<f64>], p: &[f64]) -> Location {
    let n = t.len() - 1;
    let rows = p.len();
    let e = DMatrix::from_fn(rows, n, |r, k| t[k + 1][r] - t[0][r]);
    let q = DVector::from_fn(rows, |r, _| p[r] - t[0][r]);
    let g = e.transpose() * &e;
    let Some(chol) = g.cholesky() else { return Location::Unsure };
    let mu = chol.solve(&(e.transpose() * &q));
    let scale = e.abs().max().max(1.0);
    let resid = (&e * &mu - &q).norm();
    let eps = 1e-9;
    if resid > eps * scale * 10.0 {
        return Location::Outside;
    }
    let l0 = 1.0 - mu.sum();
    let lam: Vec<f64> = std::iter::once(l0).chain(mu.iter().copied()).collect();
    if lam.iter().any(|&x| x < -eps) {
        Location::Outside
    } else if lam.iter().all(|&x| x > eps) && resid < eps * scale * 1e-3 {
        Location::Inside
    } else {
        Location::Unsure
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicPoint;
    use crate::geom::{close_faces, LocalOrder};

    fn v(c: &[[i64; 2]]) -> Vec<DyadicPoint> {
        c.iter().map(|p| DyadicPoint::from_ints(p)).collect()
    }

    #[test]
    fn triangle_is_valid() {
        assert!(validate(&GeoComplex::unit_simplex(2)).is_valid());
        assert!(validate(&GeoComplex::triangle_boundary()).is_valid());
    }

    #[test]
    fn missing_edge_is_reported() {
        let mut s = close_faces([Simplex::new(vec![0, 1, 2])]);
        s.retain(|x| x.vertex_ids() != [0, 2]);
        let c = GeoComplex::new(2, v(&[[0, 0], [1, 0], [0, 1]]), s, LocalOrder::Numeric).unwrap();
        let r = validate(&c);
        assert!(r.has(ViolationKind::FaceClosure));
        assert!(r.messages()[0].starts_with("face-closure violated"));
    }

    #[test]
    fn overlapping_triangles_are_reported() {
        let c = GeoComplex::from_maximal(v(&[[0, 0], [4, 0], [0, 4], [1, 1], [5, 1], [1, 5]]), vec![vec![0, 1, 2], vec![3, 4, 5]])
            .unwrap();
        let r = validate(&c);
        assert!(r.has(ViolationKind::InteriorOverlap));
        assert!(r.messages().iter().any(|m| m.starts_with("interior overlap")));
    }

    #[test]
    fn adjacent_triangles_do_not_overlap() {
        let c = GeoComplex::from_maximal(v(&[[0, 0], [1, 0], [0, 1], [1, 1]]), vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert!(validate(&c).is_valid());
    }

    #[test]
    fn degenerate_and_duplicate_reported() {
        let c = GeoComplex::from_maximal(v(&[[0, 0], [1, 1], [2, 2], [0, 0]]), vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        let r = validate(&c);
        assert!(r.has(ViolationKind::Degenerate));
        assert!(r.has(ViolationKind::DuplicateVertex));
    }
}
