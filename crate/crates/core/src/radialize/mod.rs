//! Explicit proper Lipschitz homotopies from a cone map to a radial one, and
//! the tools used to check them.

mod cube;
mod slice;

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::cone::{BaseMap, ConeModel, ConePoint, FnMap};
use crate::coarse::{properness_profile, ControlModulus};
use crate::error::{Error, Result};
use crate::metric;

pub use cube::{cube_concat, pad_basepoint, psi_map, unit_map, CubeMap, Padding};
pub use slice::{cone_metric_estimate, slice_lipschitz_check, MetricEstimate, SliceDomain, SliceVerdict};

type ConeFn = dyn Fn(&ConePoint) -> Result<Vec<f64>> + Send + Sync;
type HomotopyFn = dyn Fn(&ConePoint, f64) -> Result<Vec<f64>> + Send + Sync;
type EndFn = dyn Fn(&ConePoint) -> f64 + Send + Sync;

/// A map from a cone into `ℝ^(M+1)`, returning ambient coordinates.
#[derive(Clone)]
pub struct ConeMap {
    target_dim: usize,
    f: Arc<ConeFn>,
}

impl fmt::Debug for ConeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConeMap").field("target_dim", &self.target_dim).finish_non_exhaustive()
    }
}

impl ConeMap {
    pub fn new(target_dim: usize, f: impl Fn(&ConePoint) -> Result<Vec<f64>> + Send + Sync + 'static) -> Self {
        ConeMap { target_dim, f: Arc::new(f) }
    }

    /// `c(f)(hx, h) = (h·f(x), h)`.
    pub fn radial(f: impl BaseMap + 'static) -> Self {
        let dim = f.target_dim() + 1;
        ConeMap::new(dim, move |p| {
            if p.height == 0.0 {
                return Ok(vec![0.0; dim]);
            }
            Ok(metric::cone_point(&f.eval(&p.base)?, p.height))
        })
    }

    /// `(hx, h) ↦ (h·R(ε·log(1+h))·u(x), h)` for a planar `u`.
    pub fn twisted(u: impl BaseMap + 'static, twist: f64) -> Result<Self> {
        if u.target_dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: u.target_dim() });
        }
        Ok(ConeMap::new(3, move |p| {
            let y = u.eval(&p.base)?;
            let (s, c) = (twist * (1.0 + p.height).ln()).sin_cos();
            let h = p.height;
            Ok(vec![h * (c * y[0] - s * y[1]), h * (s * y[0] + c * y[1]), h])
        }))
    }

    /// The spiral `h ↦ (h·cos log(1+h), h·sin log(1+h), h)` on the cone over a point.
    pub fn spiral() -> Self {
        ConeMap::new(3, |p| {
            let h = p.height;
            let a = (1.0 + h).ln();
            Ok(vec![h * a.cos(), h * a.sin(), h])
        })
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn eval(&self, p: &ConePoint) -> Result<Vec<f64>> {
        (self.f)(p)
    }

    pub fn eval_at(&self, x: &[f64], h: f64) -> Result<Vec<f64>> {
        self.eval(&ConePoint::new(x.to_vec(), h))
    }

    /// The same map read on ambient coordinates `(hx, h)`.
    pub fn on_ambient(&self) -> FnMap {
        let f = self.f.clone();
        FnMap::new(self.target_dim, move |v| f(&ConePoint::from_ambient(v)))
    }

    /// `(hx, h) ↦ f(L·hx, L·h)`, moving a map on `c_L` onto `c_1`.
    pub fn rescaled(&self, l: f64) -> ConeMap {
        let f = self.f.clone();
        ConeMap::new(self.target_dim, move |p| f(&ConePoint::new(p.base.clone(), l * p.height)))
    }
}

/// A homotopy on `{(p, t) | 0 ≤ t ≤ end(p)}`.
#[derive(Clone)]
pub struct ConeHomotopy {
    f: Arc<HomotopyFn>,
    end: Arc<EndFn>,
    end_value: Option<Arc<ConeFn>>,
}

impl fmt::Debug for ConeHomotopy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConeHomotopy").finish_non_exhaustive()
    }
}

impl ConeHomotopy {
    pub fn new(
        end: impl Fn(&ConePoint) -> f64 + Send + Sync + 'static,
        f: impl Fn(&ConePoint, f64) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        ConeHomotopy { f: Arc::new(f), end: Arc::new(end), end_value: None }
    }

    /// Evaluates `t = end(p)` through `value` instead of substituting a rounded time.
    pub fn with_end_value(mut self, value: &ConeMap) -> Self {
        self.end_value = Some(value.f.clone());
        self
    }

    pub fn end(&self, p: &ConePoint) -> f64 {
        (self.end)(p)
    }

    pub fn eval(&self, p: &ConePoint, t: f64) -> Result<Vec<f64>> {
        let end = self.end(p);
        if !(0.0..=end).contains(&t) {
            return Err(Error::TimeOutOfDomain { time: t, end });
        }
        match &self.end_value {
            Some(v) if t == end && t > 0.0 => v(p),
            _ => (self.f)(p, t),
        }
    }

    /// The displayed formula at a float time, never the symbolic endpoint.
    pub fn eval_formula(&self, p: &ConePoint, t: f64) -> Result<Vec<f64>> {
        let end = self.end(p);
        if !(0.0..=end).contains(&t) {
            return Err(Error::TimeOutOfDomain { time: t, end });
        }
        (self.f)(p, t)
    }

    pub fn at_start(&self, p: &ConePoint) -> Result<Vec<f64>> {
        self.eval(p, 0.0)
    }

    pub fn at_end(&self, p: &ConePoint) -> Result<Vec<f64>> {
        self.eval(p, self.end(p))
    }

    /// `(p, t) ↦ H(p, end(p) − t)`.
    pub fn reversed(&self) -> ConeHomotopy {
        let (f, end, ev) = (self.f.clone(), self.end.clone(), self.end_value.clone());
        let f: Arc<HomotopyFn> = Arc::new(move |p, t| match &ev {
            Some(v) if t == 0.0 && end(p) > 0.0 => v(p),
            _ => f(p, end(p) - t),
        });
        ConeHomotopy { f, end: self.end.clone(), end_value: None }
    }
}

/// `p′(hx, h) = h − √h`.
pub fn time_profile(h: f64) -> f64 {
    h - h.sqrt()
}

fn at_least_one(p: &ConePoint) -> Result<f64> {
    if p.height >= 1.0 {
        Ok(p.height)
    } else {
        Err(Error::HeightOutOfRange(p.height))
    }
}

fn profile_end(p: &ConePoint) -> f64 {
    time_profile(p.height)
}

/// `g(hx,h) = f(√h x, √h)`, `u(hx,h) = √h·f(x,1)`, `v(hx,h) = h·f(x,1)`.
pub fn stage_maps(f: &ConeMap) -> (ConeMap, ConeMap, ConeMap) {
    let d = f.target_dim;
    let (f1, f2, f3) = (f.f.clone(), f.f.clone(), f.f.clone());
    let g = ConeMap::new(d, move |p| {
        let h = at_least_one(p)?;
        f1(&ConePoint::new(p.base.clone(), h.sqrt()))
    });
    let u = ConeMap::new(d, move |p| {
        let h = at_least_one(p)?;
        Ok(metric::scale(&f2(&ConePoint::new(p.base.clone(), 1.0))?, h.sqrt()))
    });
    let v = ConeMap::new(d, move |p| {
        let h = at_least_one(p)?;
        Ok(metric::scale(&f3(&ConePoint::new(p.base.clone(), 1.0))?, h))
    });
    (g, u, v)
}

/// `F(hx,h,t) = f((h−t)x, h−t)`, from `f` to `g`.
pub fn homotopy_f(f: &ConeMap) -> ConeHomotopy {
    let f = f.f.clone();
    ConeHomotopy::new(profile_end, move |p, t| {
        let h = at_least_one(p)?;
        f(&ConePoint::new(p.base.clone(), h - t))
    })
}

/// `G(hx,h,t) = (√h/a)·f(a·x, a)` with `a = t/√h + 1`, from `u` to `g`.
pub fn homotopy_g(f: &ConeMap) -> ConeHomotopy {
    let f = f.f.clone();
    ConeHomotopy::new(profile_end, move |p, t| {
        let r = at_least_one(p)?.sqrt();
        let a = t / r + 1.0;
        Ok(metric::scale(&f(&ConePoint::new(p.base.clone(), a))?, r / a))
    })
}

/// `H(hx,h,t) = (t + √h)·f(x,1)`, from `u` to `v`.
pub fn homotopy_h(f: &ConeMap) -> ConeHomotopy {
    let f = f.f.clone();
    ConeHomotopy::new(profile_end, move |p, t| {
        let r = at_least_one(p)?.sqrt();
        Ok(metric::scale(&f(&ConePoint::new(p.base.clone(), 1.0))?, t + r))
    })
}

/// The three stages and homotopies for one input map.
#[derive(Clone, Debug)]
pub struct RadializationBundle {
    pub f: ConeMap,
    /// Height scaling applied to reach `c_1`; 1 when the input already lives there.
    pub height_scale: f64,
    pub g: ConeMap,
    pub u: ConeMap,
    pub v: ConeMap,
    pub homotopy_f: ConeHomotopy,
    pub homotopy_g: ConeHomotopy,
    pub homotopy_h: ConeHomotopy,
}

impl RadializationBundle {
    /// For a map given on `c_L`, with `L = height_scale ≥ 1`.
    pub fn new(f: &ConeMap, height_scale: f64) -> Result<Self> {
        if height_scale.is_nan() || height_scale < 1.0 {
            return Err(Error::HeightOutOfRange(height_scale));
        }
        let f = if height_scale == 1.0 { f.clone() } else { f.rescaled(height_scale) };
        let (g, u, v) = stage_maps(&f);
        Ok(RadializationBundle {
            homotopy_f: homotopy_f(&f).with_end_value(&g),
            homotopy_g: homotopy_g(&f).with_end_value(&g),
            homotopy_h: homotopy_h(&f).with_end_value(&v),
            f,
            height_scale,
            g,
            u,
            v,
        })
    }

    /// `F`, then `G` reversed, then `H`, each on a third of `τ ∈ [0, 1]`:
    /// a homotopy from `f` to the radial map `v`.
    pub fn composite(&self) -> ConeHomotopy {
        let (a, b, c) = (self.homotopy_f.clone(), self.homotopy_g.reversed(), self.homotopy_h.clone());
        ConeHomotopy::new(
            |_| 1.0,
            move |p, tau| {
                let e = time_profile(at_least_one(p)?);
                if tau <= 1.0 / 3.0 {
                    a.eval(p, (3.0 * tau * e).min(e))
                } else if tau <= 2.0 / 3.0 {
                    b.eval(p, ((3.0 * tau - 1.0) * e).clamp(0.0, e))
                } else {
                    c.eval(p, ((3.0 * tau - 2.0) * e).clamp(0.0, e))
                }
            },
        )
    }

    /// Largest absolute residual of the endpoint chain, with the formulas
    /// evaluated at float times
    /// `F(·,0)=f, F(·,end)=g=G(·,end), G(·,0)=u=H(·,0), H(·,end)=v`.
    pub fn endpoint_residual(&self, points: &[ConePoint]) -> Result<f64> {
        let mut worst = 0.0f64;
        for p in points {
            let e = time_profile(p.height);
            let pairs = [
                (self.homotopy_f.eval_formula(p, 0.0)?, self.f.eval(p)?),
                (self.homotopy_f.eval_formula(p, e)?, self.g.eval(p)?),
                (self.homotopy_g.eval_formula(p, e)?, self.g.eval(p)?),
                (self.homotopy_g.eval_formula(p, 0.0)?, self.u.eval(p)?),
                (self.homotopy_h.eval_formula(p, 0.0)?, self.u.eval(p)?),
                (self.homotopy_h.eval_formula(p, e)?, self.v.eval(p)?),
            ];
            for (a, b) in &pairs {
                worst = worst.max(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
            }
        }
        Ok(worst)
    }
}

/// A cone map measured on a sample of its domain.
#[derive(Clone, Debug)]
pub struct ConeMapSample {
    pub domain: ConeModel,
    pub values: Vec<Vec<f64>>,
    /// Measured Lipschitz constant.
    pub lip: f64,
    /// `sup |f(q)| / |q|` on the sample.
    pub growth: f64,
    /// `sup |(x, 1)|` over the sampled base points.
    pub base_bound: f64,
    pub proper: ControlModulus,
}

impl ConeMapSample {
    /// Pairs are each point with its nearest sampled neighbour plus `pairs`
    /// random ones.
    pub fn measure(map: &ConeMap, domain: ConeModel, pairs: usize, rng: &mut impl Rng) -> Result<Self> {
        let pts = domain.ambient_points();
        let values: Vec<Vec<f64>> = domain.points.iter().map(|p| map.eval(p)).collect::<Result<_>>()?;
        let mut idx = metric::random_pairs(pts.len(), pairs, rng);
        idx.extend(nearest_pairs(&pts));
        let lip = metric::max_ratio(&pts, &values, idx).ratio;
        let growth = pts.iter().zip(&values).map(|(p, v)| metric::norm(v) / metric::norm(p)).fold(0.0, f64::max);
        let base_bound = domain.points.iter().map(|p| metric::norm(&metric::cone_point(&p.base, 1.0))).fold(0.0, f64::max);
        let net = domain.net();
        let top = domain.ceiling * (1.0 + growth);
        let radii: Vec<f64> = (1..=8).map(|k| top * k as f64 / 8.0).collect();
        let proper = properness_profile(&net, &values, &vec![0.0; map.target_dim()], &radii)?;
        Ok(ConeMapSample { domain, values, lip, growth, base_bound, proper })
    }

    /// `max(Lip f, sup |f(q)|/|q|, sup |(x,1)|)`, the constant in the slice estimates.
    pub fn effective_lipschitz(&self) -> f64 {
        self.lip.max(self.growth).max(self.base_bound)
    }
}

fn nearest_pairs(pts: &[Vec<f64>]) -> Vec<(usize, usize)> {
    (0..pts.len())
        .filter_map(|i| {
            (0..pts.len())
                .filter(|&j| j != i)
                .map(|j| (metric::dist(&pts[i], &pts[j]), j))
                .filter(|(d, _)| *d > 1e-12)
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, j)| (i, j))
        })
        .collect()
}

/// `max |G(p,t) − G(p,s)| / |t − s|` over random sample points and times.
pub fn g_slice_ratio(g: &ConeHomotopy, points: &[ConePoint], triples: usize, rng: &mut impl Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..triples {
        let p = &points[rng.random_range(0..points.len())];
        let e = g.end(p);
        if e <= 0.0 {
            continue;
        }
        let t = rng.random_range(0.0..=e);
        let s = if rng.random_bool(0.5) { rng.random_range(0.0..=e) } else { (t + rng.random_range(-1e-3..1e-3)).clamp(0.0, e) };
        if (t - s).abs() < 1e-12 {
            continue;
        }
        worst = worst.max(metric::dist(&g.eval(p, t)?, &g.eval(p, s)?) / (t - s).abs());
    }
    Ok(worst)
}
