use std::collections::BTreeSet;

use super::barycentric_grid;
use crate::error::{Error, Result};
use crate::geom::{GeoComplex, PointLocator};
use crate::metric;

/// A point of `σ ∪ (τ × [0,1])`, glued along `τ × {1} = τ ⊂ σ`.
#[derive(Clone, Debug, PartialEq)]
pub enum StretchPoint {
    Collar { point: Vec<f64>, layer: f64 },
    Simplex(Vec<f64>),
}

impl StretchPoint {
    /// Coordinates in `ℝ^(d+1)`: `σ` at last coordinate 0, the collar point
    /// `(a, r)` at `(a, 1 − r)`.
    pub fn realize(&self) -> Vec<f64> {
        match self {
            StretchPoint::Collar { point, layer } => metric::cone_point(point, 1.0 - layer),
            StretchPoint::Simplex(x) => metric::cone_point(x, 0.0),
        }
    }
}

fn weighted(pts: &[Vec<f64>], w: &[f64], keep: impl Fn(usize) -> bool) -> (f64, Vec<f64>) {
    let mut total = 0.0;
    let mut y = vec![0.0; pts[0].len()];
    for (i, (p, &a)) in pts.iter().zip(w).enumerate() {
        if keep(i) {
            total += a;
            for (yi, pi) in y.iter_mut().zip(p) {
                *yi += a * pi;
            }
        }
    }
    (total, y)
}

/// `R_σ` at the point with barycentric weights `w` in `σ`. Writing
/// `p = (1−s)·a + s·b` with `a ∈ τ`, `b` in the opposite face: `(a, 2s)` in
/// the collar for `s ≤ 1/2`, `(2−2s)·a + (2s−1)·b` in `σ` after.
pub fn stretch_map(sigma: &[Vec<f64>], tau: &[usize], w: &[f64]) -> Result<StretchPoint> {
    let ids: Vec<usize> = (0..sigma.len()).collect();
    let face: BTreeSet<usize> = tau.iter().copied().collect();
    if face.is_empty() || face.len() >= sigma.len() || face.iter().any(|&i| i >= sigma.len()) {
        return Err(Error::NotAFace(tau.to_vec(), ids));
    }
    if w.len() != sigma.len() {
        return Err(Error::DimensionMismatch { expected: sigma.len(), found: w.len() });
    }
    let (t, at) = weighted(sigma, w, |i| face.contains(&i));
    let (s, bt) = weighted(sigma, w, |i| !face.contains(&i));
    let s = s.clamp(0.0, 1.0);
    if s <= 0.5 {
        // t ≥ 1/2 here, so the division is safe.
        return Ok(StretchPoint::Collar { point: metric::scale(&at, 1.0 / t), layer: 2.0 * s });
    }
    let a = if t > 0.0 { metric::scale(&at, 1.0 / t) } else { vec![0.0; at.len()] };
    let b = metric::scale(&bt, 1.0 / s);
    Ok(StretchPoint::Simplex(metric::add(&metric::scale(&a, 2.0 - 2.0 * s), &metric::scale(&b, 2.0 * s - 1.0))))
}

/// `R_σ` on every simplex of a complex, for the full subcomplex spanned by
/// `sub`. Simplices missing `sub` are left alone.
#[derive(Clone, Debug)]
pub struct StretchMap {
    sub: BTreeSet<usize>,
    points: Vec<Vec<f64>>,
    locator: PointLocator,
}

impl StretchMap {
    pub fn new(c: &GeoComplex, sub: impl IntoIterator<Item = usize>) -> Self {
        StretchMap {
            sub: sub.into_iter().collect(),
            points: c.vertices().iter().map(|p| p.to_f64()).collect(),
            locator: PointLocator::new(c),
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<StretchPoint> {
        let loc = self.locator.locate(p).ok_or_else(|| Error::OutsideDomain(p.to_vec()))?;
        let ids = loc.simplex.vertex_ids();
        let tau: Vec<usize> = (0..ids.len()).filter(|&i| self.sub.contains(&ids[i])).collect();
        if tau.is_empty() {
            return Ok(StretchPoint::Simplex(p.to_vec()));
        }
        if tau.len() == ids.len() {
            return Ok(StretchPoint::Collar { point: p.to_vec(), layer: 0.0 });
        }
        let sigma: Vec<Vec<f64>> = ids.iter().map(|&v| self.points[v].clone()).collect();
        stretch_map(&sigma, &tau, &loc.weights)
    }
}

/// Largest ratio `|R(p) − R(q)| / |p − q|` over a barycentric grid of `σ`.
pub fn stretch_lipschitz(sigma: &[Vec<f64>], tau: &[usize], density: usize) -> Result<f64> {
    let grid = barycentric_grid(sigma.len() - 1, density);
    let xs: Vec<Vec<f64>> = grid.iter().map(|w| weighted(sigma, w, |_| true).1).collect();
    let ys: Vec<Vec<f64>> = grid.iter().map(|w| stretch_map(sigma, tau, w).map(|p| p.realize())).collect::<Result<_>>()?;
    Ok(metric::max_ratio(&xs, &ys, metric::all_pairs(xs.len())).ratio)
}
