use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{GeoComplex, Simplex};
use crate::dyadic::DyadicPoint;
use crate::error::{Error, Result};
use crate::exact::{self, determinant, edge_vectors, gram};

fn gram_det(points: &[DyadicPoint]) -> BigRational {
    if points.len() <= 1 {
        return BigRational::one();
    }
    determinant(&gram(&edge_vectors(points)))
}

/// Squared width of a simplex given by its vertices.
pub fn width_squared_of(points: &[DyadicPoint]) -> Result<BigRational> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("width needs at least one edge".into()));
    }
    let full = gram_det(points);
    if full.is_zero() {
        return Err(Error::DegenerateSimplex(Vec::new()));
    }
    let mut best: Option<BigRational> = None;
    for skip in 0..points.len() {
        let face: Vec<DyadicPoint> =
            points.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| p.clone()).collect();
        let h2 = &full / gram_det(&face);
        if best.as_ref().is_none_or(|b| h2 < *b) {
            best = Some(h2);
        }
    }
    Ok(best.expect("at least two vertices"))
}

/// Exact squared width: the minimum squared distance from a vertex to the
/// affine hull of the opposite face.
pub fn width_squared(s: &Simplex, c: &GeoComplex) -> Result<BigRational> {
    width_squared_of(&c.points(s)).map_err(|e| match e {
        Error::DegenerateSimplex(_) => Error::DegenerateSimplex(s.vertex_ids().to_vec()),
        other => other,
    })
}

pub fn width(s: &Simplex, c: &GeoComplex) -> Result<f64> {
    Ok(exact::to_f64(&width_squared(s, c)?).sqrt())
}

/// Exact squared maximum pairwise vertex distance.
pub fn diameter_squared(s: &Simplex, c: &GeoComplex) -> BigRational {
    let pts = c.points(s);
    let mut best = BigRational::zero();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = pts[i].dist_squared(&pts[j]).to_rational();
            if d > best {
                best = d;
            }
        }
    }
    best
}

pub fn diameter(s: &Simplex, c: &GeoComplex) -> f64 {
    exact::to_f64(&diameter_squared(s, c)).sqrt()
}

/// Exact squared volume (Cayley–Menger).
pub fn volume_squared(s: &Simplex, c: &GeoComplex) -> BigRational {
    exact::cayley_menger_volume_squared(&c.points(s))
}

pub fn volume(s: &Simplex, c: &GeoComplex) -> f64 {
    exact::to_f64(&volume_squared(s, c)).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineLipschitz {
    /// Operator norm of the linear part.
    pub norm: f64,
    /// Constant `C` with `norm ≤ C · spread`; here `dim / width`.
    pub bound_constant: f64,
    /// Largest distance between two images.
    pub spread: f64,
}

impl AffineLipschitz {
    pub fn bound(&self) -> f64 {
        self.bound_constant * self.spread
    }
}

/// Operator norm of the affine map sending the vertices of `s` to `images`.
pub fn affine_lipschitz(s: &Simplex, c: &GeoComplex, images: &[DyadicPoint]) -> Result<AffineLipschitz> {
    let pts = c.points(s);
    if images.len() != pts.len() {
        return Err(Error::DimensionMismatch { expected: pts.len(), found: images.len() });
    }
    if !exact::affinely_independent(&pts) {
        return Err(Error::DegenerateSimplex(s.vertex_ids().to_vec()));
    }
    let dom: Vec<Vec<f64>> = pts.iter().map(DyadicPoint::to_f64).collect();
    let img: Vec<Vec<f64>> = images.iter().map(DyadicPoint::to_f64).collect();
    let w = exact::to_f64(&width_squared(s, c)?).sqrt();
    let mut out = affine_lipschitz_f64(&dom, &img)?;
    out.bound_constant = s.dim() as f64 / w;
    Ok(out)
}

/// Floating-point variant for sampled domains and images.
///
/// The norm is the largest generalized eigenvalue of `WᵀW` against `EᵀE`,
/// where `E` and `W` hold the domain and image edge vectors.
pub fn affine_lipschitz_f64(domain: &[Vec<f64>], images: &[Vec<f64>]) -> Result<AffineLipschitz> {
    if domain.len() != images.len() || domain.is_empty() {
        return Err(Error::DimensionMismatch { expected: domain.len(), found: images.len() });
    }
    let mut spread: f64 = 0.0;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            spread = spread.max(dist(&images[i], &images[j]));
        }
    }
    let n = domain.len() - 1;
    if n == 0 {
        return Ok(AffineLipschitz { norm: 0.0, bound_constant: 0.0, spread });
    }
    let edges = |pts: &[Vec<f64>]| {
        let rows = pts[0].len();
        DMatrix::from_fn(rows, n, |r, k| pts[k + 1][r] - pts[0][r])
    };
    let e = edges(domain);
    let wm = edges(images);
    let g = e.transpose() * &e;
    let m = wm.transpose() * &wm;
    let chol = g.clone().cholesky().ok_or_else(|| Error::DegenerateSimplex(Vec::new()))?;
    let l_inv = chol.l().try_inverse().ok_or_else(|| Error::DegenerateSimplex(Vec::new()))?;
    let c = &l_inv * m * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let lambda = c.symmetric_eigenvalues().iter().copied().fold(0.0f64, f64::max);
    // Width from the inverse Gram matrix: the height over vertex i is 1/|∇λ_i|.
    let g_inv = g.try_inverse().ok_or_else(|| Error::DegenerateSimplex(Vec::new()))?;
    let mut min_h = f64::INFINITY;
    for i in 0..n {
        min_h = min_h.min(1.0 / g_inv[(i, i)].sqrt());
    }
    let s = DMatrix::from_element(n, 1, 1.0);
    let grad0 = (s.transpose() * &g_inv * &s)[(0, 0)];
    min_h = min_h.min(1.0 / grad0.sqrt());
    Ok(AffineLipschitz { norm: lambda.max(0.0).sqrt(), bound_constant: n as f64 / min_h, spread })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
