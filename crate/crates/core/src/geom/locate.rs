use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::{GeoComplex, Simplex};

/// Floating-point point location among the maximal simplices of a complex.
///
/// Simplices are bucketed by bounding box on a uniform grid whose cell size
/// is the largest bounding-box extent.
#[derive(Clone, Debug)]
pub struct PointLocator {
    simplices: Vec<Simplex>,
    points: Vec<Vec<Vec<f64>>>,
    cell: f64,
    grid: HashMap<Vec<i64>, Vec<usize>>,
    tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Location {
    pub simplex: Simplex,
    /// Barycentric coordinates in the order of `simplex.vertex_ids()`.
    pub weights: Vec<f64>,
}

impl Location {
    /// Vertices with positive weight, i.e. the carrier of the point.
    pub fn carrier(&self, eps: f64) -> Vec<usize> {
        self.simplex.vertex_ids().iter().zip(&self.weights).filter(|(_, w)| **w > eps).map(|(v, _)| *v).collect()
    }
}

impl PointLocator {
    pub fn new(c: &GeoComplex) -> Self {
        PointLocator::with_tolerance(c, 1e-9)
    }

    pub fn with_tolerance(c: &GeoComplex, tol: f64) -> Self {
        let simplices: Vec<Simplex> = c.maximal_simplices().to_vec();
        let points: Vec<Vec<Vec<f64>>> = simplices.iter().map(|s| c.points_f64(s)).collect();
        let boxes: Vec<(Vec<f64>, Vec<f64>)> = points.iter().map(|p| bbox(p)).collect();
        let cell = boxes
            .iter()
            .map(|(lo, hi)| lo.iter().zip(hi).map(|(l, h)| h - l).fold(0.0, f64::max))
            .fold(0.0, f64::max)
            .max(1e-9);
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, (lo, hi)) in boxes.iter().enumerate() {
            for key in cells(lo, hi, cell, tol) {
                grid.entry(key).or_default().push(i);
            }
        }
        PointLocator { simplices, points, cell, grid, tol }
    }

    /// A maximal simplex containing `p` (within tolerance) with the largest
    /// minimal weight; `None` outside the complex.
    pub fn locate(&self, p: &[f64]) -> Option<Location> {
        let key: Vec<i64> = p.iter().map(|x| (x / self.cell).floor() as i64).collect();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for &i in self.grid.get(&key).map(Vec::as_slice).unwrap_or(&[]) {
            if let Some(w) = barycentric_f64(&self.points[i], p, self.tol) {
                let m = w.iter().copied().fold(f64::INFINITY, f64::min);
                if m >= -self.tol && best.as_ref().is_none_or(|(bm, _, _)| m > *bm) {
                    best = Some((m, i, w));
                }
            }
        }
        best.map(|(_, i, w)| Location { simplex: self.simplices[i].clone(), weights: w })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }
}

fn bbox(p: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = p[0].len();
    let lo = (0..n).map(|k| p.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi = (0..n).map(|k| p.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    (lo, hi)
}

fn cells(lo: &[f64], hi: &[f64], cell: f64, tol: f64) -> Vec<Vec<i64>> {
    let a: Vec<i64> = lo.iter().map(|x| ((x - tol) / cell).floor() as i64).collect();
    let b: Vec<i64> = hi.iter().map(|x| ((x + tol) / cell).floor() as i64).collect();
    let mut out = Vec::new();
    let mut key = a.clone();
    loop {
        out.push(key.clone());
        let mut k = 0;
        while k < key.len() {
            if key[k] < b[k] {
                key[k] += 1;
                break;
            }
            key[k] = a[k];
            k += 1;
        }
        if k == key.len() {
            return out;
        }
    }
}

/// Barycentric coordinates of `p` in the simplex `pts`, or `None` if `p` is
/// farther than `tol` (relative to the simplex size) from its affine hull.
pub fn barycentric_f64(pts: &[Vec<f64>], p: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = pts.len() - 1;
    if n == 0 {
        let d: f64 = pts[0].iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        return (d <= tol).then(|| vec![1.0]);
    }
    let rows = p.len();
    let e = DMatrix::from_fn(rows, n, |r, k| pts[k + 1][r] - pts[0][r]);
    let q = DVector::from_fn(rows, |r, _| p[r] - pts[0][r]);
    let chol = (e.transpose() * &e).cholesky()?;
    let mu = chol.solve(&(e.transpose() * &q));
    let scale = e.abs().max().max(1.0);
    if (&e * &mu - &q).norm() > tol * scale {
        return None;
    }
    let mut w = vec![1.0 - mu.sum()];
    w.extend(mu.iter());
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicPoint;

    #[test]
    fn locates_in_square() {
        let v = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|p| DyadicPoint::from_ints(p)).collect();
        let c = GeoComplex::from_maximal(v, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let loc = PointLocator::new(&c);
        let l = loc.locate(&[0.8, 0.7]).unwrap();
        assert_eq!(l.simplex.vertex_ids(), &[1, 2, 3]);
        assert!((l.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(loc.locate(&[1.5, 0.5]).is_none());
        assert_eq!(loc.locate(&[0.0, 0.0]).unwrap().carrier(1e-12), vec![0]);
    }

    #[test]
    fn locates_on_embedded_edges() {
        let c = GeoComplex::triangle_boundary();
        let loc = PointLocator::new(&c);
        let l = loc.locate(&[0.5, 0.5]).unwrap();
        assert_eq!(l.simplex.vertex_ids(), &[1, 2]);
        assert!(loc.locate(&[0.2, 0.2]).is_none());
    }
}
