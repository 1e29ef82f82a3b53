use rand::Rng;

use crate::cone::ConePoint;
use crate::error::{Error, Result};
use crate::metric;

/// Sample points of `X` with the time extent `[0, end]` over each.
#[derive(Clone, Debug)]
pub struct SliceDomain {
    pub points: Vec<Vec<f64>>,
    pub ends: Vec<f64>,
}

impl SliceDomain {
    pub fn new(points: Vec<Vec<f64>>, ends: Vec<f64>) -> Result<Self> {
        if points.len() != ends.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: ends.len() });
        }
        if let Some(i) = ends.iter().position(|e| e.is_nan() || *e < 0.0) {
            return Err(Error::NegativeProfile { point: i, value: ends[i] });
        }
        Ok(SliceDomain { points, ends })
    }

    /// The cone points at their ambient coordinates with `end = h − √h`.
    pub fn from_cone(points: &[ConePoint]) -> Result<Self> {
        SliceDomain::new(points.iter().map(ConePoint::ambient).collect(), points.iter().map(|p| super::time_profile(p.height)).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceVerdict {
    /// Largest ratio seen on a time slice `X × {t}`.
    pub time_slice: f64,
    /// Largest ratio seen on a point line `{x} × [0, end]`.
    pub point_line: f64,
    pub global: f64,
    pub bound: f64,
    /// The worst global pair `((i, t), (j, s))` when it exceeds `bound`.
    pub witness: Option<((usize, f64), (usize, f64))>,
}

impl SliceVerdict {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

const SLACK: f64 = 1e-6;

/// Measures `H` on `samples` pairs of each kind. Slices above `c` are an
/// error; the global constant is compared with `2c`.
pub fn slice_lipschitz_check(
    h: &dyn Fn(usize, f64) -> Result<Vec<f64>>,
    dom: &SliceDomain,
    c: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<SliceVerdict> {
    let n = dom.points.len();
    if n < 2 {
        return Err(Error::InvalidInput("slice check needs at least two points".into()));
    }
    let limit = c * (1.0 + SLACK) + 1e-12;
    let top = dom.ends.iter().cloned().fold(0.0, f64::max);

    let mut time_slice = 0.0f64;
    for _ in 0..samples {
        let t = rng.random_range(0.0..=top);
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i == j || dom.ends[i] < t || dom.ends[j] < t {
            continue;
        }
        let d = metric::dist(&dom.points[i], &dom.points[j]);
        if d == 0.0 {
            continue;
        }
        let r = metric::dist(&h(i, t)?, &h(j, t)?) / d;
        if r > limit {
            return Err(Error::SlicePrecondition { slice: format!("time {t}"), measured: r, bound: c });
        }
        time_slice = time_slice.max(r);
    }

    let mut point_line = 0.0f64;
    for _ in 0..samples {
        let i = rng.random_range(0..n);
        let e = dom.ends[i];
        let (t, s) = (rng.random_range(0.0..=e), rng.random_range(0.0..=e));
        if t == s {
            continue;
        }
        let r = metric::dist(&h(i, t)?, &h(i, s)?) / (t - s).abs();
        if r > limit {
            return Err(Error::SlicePrecondition { slice: format!("point {i}"), measured: r, bound: c });
        }
        point_line = point_line.max(r);
    }

    let mut global = 0.0f64;
    let mut worst = None;
    for _ in 0..samples {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        let t = rng.random_range(0.0..=dom.ends[i]);
        let s = if rng.random_bool(0.5) { rng.random_range(0.0..=dom.ends[j]) } else { t.min(dom.ends[j]) };
        let dx = metric::dist(&dom.points[i], &dom.points[j]);
        let d = (dx * dx + (t - s) * (t - s)).sqrt();
        if d == 0.0 {
            continue;
        }
        let r = metric::dist(&h(i, t)?, &h(j, s)?) / d;
        if r > global {
            global = r;
            worst = Some(((i, t), (j, s)));
        }
    }
    let bound = 2.0 * c;
    let witness = if global > bound * (1.0 + SLACK) + 1e-12 { worst } else { None };
    Ok(SliceVerdict { time_slice, point_line, global, bound, witness })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricEstimate {
    /// `d((tx,t), (ty,t)) = t·|x − y|`.
    pub lhs: f64,
    /// `(2 + C)·d((hx,h), (ry,r))`.
    pub rhs: f64,
}

impl MetricEstimate {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + SLACK) + 1e-12
    }
}

/// Compares cone distances at a lower height `t ≤ min(h, r)`, for a base
/// bounded by `c`.
pub fn cone_metric_estimate(p: &ConePoint, q: &ConePoint, t: f64, c: f64) -> Result<MetricEstimate> {
    if !(t >= 0.0 && t <= p.height.min(q.height)) {
        return Err(Error::HeightOutOfRange(t));
    }
    if p.base.len() != q.base.len() {
        return Err(Error::DimensionMismatch { expected: p.base.len(), found: q.base.len() });
    }
    Ok(MetricEstimate { lhs: t * metric::dist(&p.base, &q.base), rhs: (2.0 + c) * metric::dist(&p.ambient(), &q.ambient()) })
}
