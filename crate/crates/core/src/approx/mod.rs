//! Simplicial approximation between triangulated cones.

mod lebesgue;
mod stretch;

use rand::Rng;

use crate::cone::BaseMap;
use crate::error::{Error, Result};
use crate::geom::{affine_lipschitz_f64, diameter, GeoComplex, PointLocator, Simplex};
use crate::metric;

use lebesgue::Clearance;
pub use lebesgue::{point_simplex_distance, star_cover_lebesgue, star_cover_lebesgue_with};
pub use stretch::{stretch_lipschitz, stretch_map, StretchMap, StretchPoint};

/// Closed vertex stars of a complex, by maximal simplex.
#[derive(Clone, Debug)]
pub struct StarTable {
    stars: Vec<Vec<usize>>,
    diameters: Vec<f64>,
    maximal: Vec<Simplex>,
}

impl StarTable {
    pub fn new(c: &GeoComplex) -> Self {
        let maximal = c.maximal_simplices().to_vec();
        let mut stars = vec![Vec::new(); c.vertices().len()];
        for (i, s) in maximal.iter().enumerate() {
            for &v in s.vertex_ids() {
                stars[v].push(i);
            }
        }
        let pts: Vec<Vec<f64>> = c.vertices().iter().map(|p| p.to_f64()).collect();
        let diameters = stars
            .iter()
            .map(|star| {
                let mut vs: Vec<usize> = star.iter().flat_map(|&i| maximal[i].vertex_ids().iter().copied()).collect();
                vs.sort_unstable();
                vs.dedup();
                let mut d = 0.0f64;
                for (k, &a) in vs.iter().enumerate() {
                    for &b in &vs[k + 1..] {
                        d = d.max(metric::dist(&pts[a], &pts[b]));
                    }
                }
                d
            })
            .collect();
        StarTable { stars, diameters, maximal }
    }

    /// Maximal simplices having `v` as a vertex.
    pub fn star(&self, v: usize) -> impl Iterator<Item = &Simplex> {
        self.stars[v].iter().map(|&i| &self.maximal[i])
    }

    pub fn diameter(&self, v: usize) -> f64 {
        self.diameters[v]
    }

    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    /// Whether a point with the given carrier lies in the open star of `v`.
    pub fn in_open_star(carrier: &[usize], v: usize) -> bool {
        carrier.contains(&v)
    }
}

/// All barycentric weight vectors of `k + 1` entries with denominator `m`.
pub(crate) fn barycentric_grid(k: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(left - a, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k + 1, &mut Vec::new(), &mut out);
    out.into_iter().map(|w| w.into_iter().map(|a| a as f64 / m as f64).collect()).collect()
}

fn combine(pts: &[&Vec<f64>], w: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; pts[0].len()];
    for (p, &a) in pts.iter().zip(w) {
        for (yi, pi) in y.iter_mut().zip(p.iter()) {
            *yi += a * pi;
        }
    }
    y
}

/// The vertex map `v ↦ w_v` and the codomain vertices allowed at each `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexAssignment {
    pub images: Vec<usize>,
    /// Codomain vertices whose open star contains every sampled `φ(p)`, `p ∈ St(v)`.
    pub candidates: Vec<Vec<usize>>,
    pub samples: usize,
    /// Largest ball radius required around a sampled image, `Lip·diam(σ)/m`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationReport {
    /// `sup |f − φ|` on the star samples.
    pub sup_distance: f64,
    /// Largest maximal simplex diameter of the codomain.
    pub codomain_diameter: f64,
    /// Largest diameter of a domain vertex star.
    pub domain_star_diameter: f64,
    /// Largest operator norm of `f` on a domain simplex.
    pub lipschitz: f64,
}

/// A simplicial map `f` built from a vertex assignment.
#[derive(Clone, Debug)]
pub struct SimplicialApproximation {
    domain: GeoComplex,
    codomain: GeoComplex,
    locator: PointLocator,
    codomain_points: Vec<Vec<f64>>,
    samples: Vec<Vec<f64>>,
    pub assignment: VertexAssignment,
    pub report: ApproximationReport,
}

/// Builds `f` with `φ(St(v)) ⊆ St(w_v)` certified on a barycentric grid of
/// denominator `density` in every maximal simplex. Among admissible `w`,
/// the one closest to `φ(v)` wins, then the lowest index.
pub fn simplicial_approximation(
    phi: &dyn BaseMap,
    domain: &GeoComplex,
    codomain: &GeoComplex,
    density: usize,
) -> Result<SimplicialApproximation> {
    simplicial_approximation_with_margin(phi, domain, codomain, density, 0.0)
}

/// Vertex ids, weights, φ(x), carrier and margin of one grid point.
type GridRow = (Vec<usize>, Vec<f64>, Vec<f64>, Vec<usize>, f64);

/// As [`simplicial_approximation`], but each sampled image must also keep a
/// ball of radius `scale·K_σ·diam(σ)/density` inside `St(w_v)`, with `K_σ`
/// measured on the grid of `σ`. With `scale = 1` this covers the unsampled
/// points too, as far as `K_σ` is the true constant.
pub fn simplicial_approximation_with_margin(
    phi: &dyn BaseMap,
    domain: &GeoComplex,
    codomain: &GeoComplex,
    density: usize,
    scale: f64,
) -> Result<SimplicialApproximation> {
    if density == 0 {
        return Err(Error::InvalidInput("sampling density must be positive".into()));
    }
    if phi.target_dim() != codomain.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: codomain.ambient_dim(), found: phi.target_dim() });
    }
    let dom_pts: Vec<Vec<f64>> = domain.vertices().iter().map(|p| p.to_f64()).collect();
    let cod_pts: Vec<Vec<f64>> = codomain.vertices().iter().map(|p| p.to_f64()).collect();
    let cod_locator = PointLocator::new(codomain);
    let mut table: Vec<GridRow> = Vec::new();
    for s in domain.maximal_simplices() {
        let ids = s.vertex_ids();
        let corners: Vec<&Vec<f64>> = ids.iter().map(|&v| &dom_pts[v]).collect();
        let grid = barycentric_grid(s.dim(), density);
        let xs: Vec<Vec<f64>> = grid.iter().map(|w| combine(&corners, w)).collect();
        let ys: Vec<Vec<f64>> = xs.iter().map(|x| phi.eval(x)).collect::<Result<_>>()?;
        // Every point of σ is within diam(σ)/m of a grid point.
        let k = metric::max_ratio(&xs, &ys, metric::all_pairs(xs.len())).ratio;
        let margin = scale * k * diameter(s, domain) / density as f64;
        for (w, y) in grid.into_iter().zip(ys) {
            let carrier = cod_locator.locate(&y).ok_or_else(|| Error::OutsideDomain(y.clone()))?.carrier(1e-9);
            table.push((ids.to_vec(), w, y, carrier, margin));
        }
    }
    let reach = table.iter().map(|e| e.4).fold(0.0, f64::max);
    let clearance = Clearance::new(codomain, if reach > 0.0 { reach } else { 0.0 });
    let mut candidates: Vec<Option<Vec<usize>>> = vec![None; dom_pts.len()];
    for (ids, w, y, carrier, margin) in &table {
        for (&v, &a) in ids.iter().zip(w) {
            if a > 0.0 {
                let c = candidates[v].get_or_insert_with(|| carrier.clone());
                c.retain(|u| carrier.contains(u) && (*margin == 0.0 || clearance.exceeds(*u, y, *margin)));
            }
        }
    }

    let mut images = Vec::with_capacity(dom_pts.len());
    let mut allowed = Vec::with_capacity(dom_pts.len());
    for (v, c) in candidates.into_iter().enumerate() {
        let c = c.unwrap_or_default();
        let target = phi.eval(&dom_pts[v])?;
        let best = c
            .iter()
            .copied()
            .min_by(|&a, &b| metric::dist(&cod_pts[a], &target).total_cmp(&metric::dist(&cod_pts[b], &target)).then(a.cmp(&b)))
            .ok_or(Error::StarCondition(v))?;
        images.push(best);
        allowed.push(c);
    }

    for s in domain.maximal_simplices() {
        let img = Simplex::new(s.vertex_ids().iter().map(|&v| images[v]).collect());
        if !codomain.contains(&img) {
            return Err(Error::InvalidInput(format!("vertex images of {:?} span no codomain simplex", s.vertex_ids())));
        }
    }

    let samples: Vec<Vec<f64>> = table
        .iter()
        .map(|(ids, w, ..)| combine(&ids.iter().map(|&v| &dom_pts[v]).collect::<Vec<_>>(), w))
        .collect();
    let mut sup_distance = 0.0f64;
    for (ids, w, y, _, _) in &table {
        let corners: Vec<&Vec<f64>> = ids.iter().map(|&v| &cod_pts[images[v]]).collect();
        sup_distance = sup_distance.max(metric::dist(&combine(&corners, w), y));
    }
    let mut lipschitz = 0.0f64;
    for s in domain.maximal_simplices() {
        let d: Vec<Vec<f64>> = s.vertex_ids().iter().map(|&v| dom_pts[v].clone()).collect();
        let i: Vec<Vec<f64>> = s.vertex_ids().iter().map(|&v| cod_pts[images[v]].clone()).collect();
        lipschitz = lipschitz.max(affine_lipschitz_f64(&d, &i)?.norm);
    }
    let codomain_diameter = codomain.maximal_simplices().iter().map(|s| diameter(s, codomain)).fold(0.0, f64::max);
    let report = ApproximationReport {
        sup_distance,
        codomain_diameter,
        domain_star_diameter: StarTable::new(domain).max_diameter(),
        lipschitz,
    };
    Ok(SimplicialApproximation {
        domain: domain.clone(),
        codomain: codomain.clone(),
        locator: PointLocator::new(domain),
        codomain_points: cod_pts,
        samples,
        assignment: VertexAssignment { images, candidates: allowed, samples: table.len(), margin: reach },
        report,
    })
}

impl SimplicialApproximation {
    pub fn domain(&self) -> &GeoComplex {
        &self.domain
    }

    pub fn codomain(&self) -> &GeoComplex {
        &self.codomain
    }

    /// The grid points on which the star condition was certified.
    pub fn sample_points(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// `f(x)` with the codomain vertices of its support.
    fn eval_with_support(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
        let loc = self.locator.locate(x).ok_or_else(|| Error::OutsideDomain(x.to_vec()))?;
        let ids = loc.simplex.vertex_ids();
        let corners: Vec<&Vec<f64>> = ids.iter().map(|&v| &self.codomain_points[self.assignment.images[v]]).collect();
        let support =
            ids.iter().zip(&loc.weights).filter(|(_, w)| **w > 1e-9).map(|(&v, _)| self.assignment.images[v]).collect();
        Ok((combine(&corners, &loc.weights), support))
    }
}

impl BaseMap for SimplicialApproximation {
    fn target_dim(&self) -> usize {
        self.codomain.ambient_dim()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.eval_with_support(x).map(|(y, _)| y)
    }
}

/// `H(x,t) = (1−t)·φ(x) + t·f(x)`.
pub struct StraightLineHomotopy<'a> {
    phi: &'a dyn BaseMap,
    f: &'a SimplicialApproximation,
    locator: PointLocator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyLipschitz {
    /// Measured constant of `φ` on the sampled pairs.
    pub phi_lipschitz: f64,
    /// `K = max(Lip φ, Lip f)`.
    pub k: f64,
    /// Measured constant of `H` for the product metric on `X × [0,1]`.
    pub measured: f64,
    /// `K + D`.
    pub bound: f64,
}

impl<'a> StraightLineHomotopy<'a> {
    /// Checks that `φ(x)` and `f(x)` share a codomain simplex at every sample.
    pub fn new(phi: &'a dyn BaseMap, f: &'a SimplicialApproximation, samples: &[Vec<f64>]) -> Result<Self> {
        let h = StraightLineHomotopy { phi, f, locator: PointLocator::new(&f.codomain) };
        for (i, x) in samples.iter().enumerate() {
            h.check_common_simplex(x).map_err(|_| Error::NoCommonSimplex(i))?;
        }
        Ok(h)
    }

    fn check_common_simplex(&self, x: &[f64]) -> Result<()> {
        let y = self.phi.eval(x)?;
        let mut both = self.locator.locate(&y).ok_or_else(|| Error::OutsideDomain(y.clone()))?.carrier(1e-9);
        both.extend(self.f.eval_with_support(x)?.1);
        if self.f.codomain.contains(&Simplex::new(both)) {
            Ok(())
        } else {
            Err(Error::NoCommonSimplex(0))
        }
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfDomain { time: t, end: 1.0 });
        }
        let (a, b) = (self.phi.eval(x)?, self.f.eval(x)?);
        if t == 0.0 {
            return Ok(a);
        }
        if t == 1.0 {
            return Ok(b);
        }
        Ok(metric::lerp(&a, &b, t))
    }

    /// Random pairs `(x,t), (y,s)` with `x, y` in a common domain simplex,
    /// half of them sharing a time.
    pub fn measure(&self, pairs: usize, rng: &mut impl Rng) -> Result<HomotopyLipschitz> {
        let tops = self.f.domain.maximal_simplices();
        let pts: Vec<Vec<f64>> = self.f.domain.vertices().iter().map(|p| p.to_f64()).collect();
        let (mut phi_lipschitz, mut measured) = (0.0f64, 0.0f64);
        let mut samples = Vec::with_capacity(pairs);
        for _ in 0..pairs {
            let s = &tops[rng.random_range(0..tops.len())];
            let corners: Vec<&Vec<f64>> = s.vertex_ids().iter().map(|&v| &pts[v]).collect();
            let x = combine(&corners, &random_weights(corners.len(), rng));
            let y = combine(&corners, &random_weights(corners.len(), rng));
            let t = rng.random_range(0.0..=1.0);
            let s = if rng.random_bool(0.5) { t } else { rng.random_range(0.0..=1.0) };
            samples.push((x, y, t, s));
        }
        for (x, y, t, s) in &samples {
            let dx = metric::dist(x, y);
            let (px, py) = (self.phi.eval(x)?, self.phi.eval(y)?);
            if dx > 1e-12 {
                phi_lipschitz = phi_lipschitz.max(metric::dist(&px, &py) / dx);
            }
            let d = (dx * dx + (t - s) * (t - s)).sqrt();
            if d > 1e-12 {
                let a = metric::lerp(&px, &self.f.eval(x)?, *t);
                let b = metric::lerp(&py, &self.f.eval(y)?, *s);
                measured = measured.max(metric::dist(&a, &b) / d);
            }
        }
        let k = phi_lipschitz.max(self.f.report.lipschitz);
        Ok(HomotopyLipschitz { phi_lipschitz, k, measured, bound: k + self.f.report.codomain_diameter })
    }
}

/// Uniform barycentric weights.
fn random_weights(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}
