use std::sync::Arc;

use rand::Rng;

use super::ConePoint;
use crate::error::{Error, Result};
use crate::geom::{GeoComplex, PointLocator};
use crate::metric;

/// A map defined on (part of) the base of a cone.
pub trait BaseMap: Send + Sync {
    /// Dimension of the target space.
    fn target_dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Piecewise-affine extension of vertex images over a complex.
#[derive(Clone, Debug)]
pub struct PlMap {
    domain: GeoComplex,
    images: Vec<Vec<f64>>,
    locator: PointLocator,
    target_dim: usize,
}

impl PlMap {
    pub fn new(domain: GeoComplex, images: Vec<Vec<f64>>) -> Result<Self> {
        if images.len() != domain.vertices().len() {
            return Err(Error::DimensionMismatch { expected: domain.vertices().len(), found: images.len() });
        }
        let target_dim = images.first().map_or(0, Vec::len);
        if let Some(bad) = images.iter().find(|y| y.len() != target_dim) {
            return Err(Error::DimensionMismatch { expected: target_dim, found: bad.len() });
        }
        let locator = PointLocator::new(&domain);
        Ok(PlMap { domain, images, locator, target_dim })
    }

    pub fn domain(&self) -> &GeoComplex {
        &self.domain
    }

    pub fn vertex_images(&self) -> &[Vec<f64>] {
        &self.images
    }
}

impl BaseMap for PlMap {
    fn target_dim(&self) -> usize {
        self.target_dim
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let loc = self.locator.locate(x).ok_or_else(|| Error::OutsideDomain(x.to_vec()))?;
        let mut y = vec![0.0; self.target_dim];
        for (&v, w) in loc.simplex.vertex_ids().iter().zip(&loc.weights) {
            for (yi, fi) in y.iter_mut().zip(&self.images[v]) {
                *yi += w * fi;
            }
        }
        Ok(y)
    }
}

type PointFn = dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync;

/// A base map given by a closure.
#[derive(Clone)]
pub struct FnMap {
    target_dim: usize,
    f: Arc<PointFn>,
}

impl FnMap {
    pub fn new(target_dim: usize, f: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static) -> Self {
        FnMap { target_dim, f: Arc::new(f) }
    }

    pub fn identity(dim: usize) -> Self {
        FnMap::new(dim, |x| Ok(x.to_vec()))
    }

    pub fn constant(y: Vec<f64>) -> Self {
        FnMap::new(y.len(), move |_| Ok(y.clone()))
    }
}

impl BaseMap for FnMap {
    fn target_dim(&self) -> usize {
        self.target_dim
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.f)(x)
    }
}

/// `x ↦ x/|x|` onto the unit sphere.
#[derive(Clone, Copy, Debug)]
pub struct RadialProjection {
    pub dim: usize,
}

impl BaseMap for RadialProjection {
    fn target_dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = metric::norm(x);
        if r < 1e-12 {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        Ok(metric::scale(x, 1.0 / r))
    }
}

/// `c(f)(h·x, h) = (h·f(x), h)`.
#[derive(Clone)]
pub struct RadialMap<M> {
    pub f: M,
}

impl<M: BaseMap> RadialMap<M> {
    pub fn new(f: M) -> Self {
        RadialMap { f }
    }

    pub fn eval(&self, p: &ConePoint) -> Result<ConePoint> {
        if p.height == 0.0 {
            return Ok(ConePoint::tip(self.f.target_dim()));
        }
        Ok(ConePoint { base: self.f.eval(&p.base)?, height: p.height })
    }

    pub fn eval_ambient(&self, v: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval(&ConePoint::from_ambient(v))?.ambient())
    }
}

/// `(h·f(x), h) ↦ h·g(x)`, sending the flat cone to the spherical one.
pub fn flat_to_spherical(p: &ConePoint, g: &dyn BaseMap) -> Result<Vec<f64>> {
    if p.height == 0.0 {
        return Ok(vec![0.0; g.target_dim()]);
    }
    Ok(metric::scale(&g.eval(&p.base)?, p.height))
}

/// `(inf, sup)` of `|Ψp − Ψq| / |p − q|` over the given pairs.
pub fn sampled_bilipschitz(points: &[ConePoint], g: &dyn BaseMap, pairs: &[(usize, usize)]) -> Result<(f64, f64)> {
    let flat: Vec<Vec<f64>> = points.iter().map(ConePoint::ambient).collect();
    let round: Vec<Vec<f64>> = points.iter().map(|p| flat_to_spherical(p, g)).collect::<Result<_>>()?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &(i, j) in pairs {
        let d = metric::dist(&flat[i], &flat[j]);
        if d > 1e-12 {
            let r = metric::dist(&round[i], &round[j]) / d;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok((lo, hi))
}

/// `2(L+1)(D+1)`.
pub fn cone_lipschitz_bound(l: f64, d: f64) -> f64 {
    2.0 * (l + 1.0) * (d + 1.0)
}

/// Sampled Lipschitz data of a radial map.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialLipschitz {
    /// Measured constant of `f` on the base.
    pub base_lipschitz: f64,
    /// `D ≥ |x|, |f(x)|` on the sampled base points.
    pub norm_bound: f64,
    /// Measured constant of `c(f)`.
    pub measured: f64,
    pub bound: f64,
    pub pairs: usize,
}

/// Measures `Lip(f)`, `D` and `Lip(c(f))` on random samples of the base and of
/// the cone between the given heights.
pub fn measure_radial_lipschitz(
    f: &dyn BaseMap,
    base: &GeoComplex,
    heights: (f64, f64),
    pairs: usize,
    rng: &mut impl Rng,
) -> Result<RadialLipschitz> {
    let mut xs: Vec<Vec<f64>> = base.vertices().iter().map(|p| p.to_f64()).collect();
    xs.extend((0..600).map(|_| metric::random_point(base, rng)));
    let fx: Vec<Vec<f64>> = xs.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
    let base_lipschitz = metric::max_ratio(&xs, &fx, metric::all_pairs(xs.len())).ratio;
    let norm_bound = xs.iter().chain(&fx).map(|v| metric::norm(v)).fold(0.0, f64::max);
    let cone: Vec<ConePoint> = (0..pairs.clamp(2, 4000))
        .map(|_| ConePoint::new(metric::random_point(base, rng), rng.random_range(heights.0..=heights.1)))
        .collect();
    let radial = RadialMap::new(FnRef(f));
    let ambient: Vec<Vec<f64>> = cone.iter().map(ConePoint::ambient).collect();
    let images: Vec<Vec<f64>> = cone.iter().map(|p| radial.eval(p).map(|q| q.ambient())).collect::<Result<_>>()?;
    let est = metric::max_ratio(&ambient, &images, metric::random_pairs(cone.len(), pairs, rng));
    Ok(RadialLipschitz {
        base_lipschitz,
        norm_bound,
        measured: est.ratio,
        bound: cone_lipschitz_bound(base_lipschitz, norm_bound),
        pairs: est.pairs,
    })
}

struct FnRef<'a>(&'a dyn BaseMap);

impl BaseMap for FnRef<'_> {
    fn target_dim(&self) -> usize {
        self.0.target_dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.eval(x)
    }
}
