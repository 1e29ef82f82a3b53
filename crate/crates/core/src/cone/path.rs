use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::Rng;

use super::{ConePoint, ConeTriangulation};
use crate::coarse::FiniteNet;
use crate::error::{Error, Result};
use crate::geom::{GeoComplex, Location, PointLocator};
use crate::metric;
use crate::subdivide::standard_subdivision;

/// A sampled piece of the cone between heights `floor` and `ceiling`.
#[derive(Clone, Debug)]
pub struct ConeModel {
    pub base: GeoComplex,
    pub floor: f64,
    pub ceiling: f64,
    pub triangulation: Option<ConeTriangulation>,
    pub points: Vec<ConePoint>,
}

impl ConeModel {
    /// `count` random points with heights uniform in `[floor, ceiling]`.
    pub fn sample(base: GeoComplex, floor: f64, ceiling: f64, count: usize, rng: &mut impl Rng) -> Result<Self> {
        if !(0.0 <= floor && floor <= ceiling) {
            return Err(Error::HeightOutOfRange(floor));
        }
        let points = (0..count)
            .map(|_| ConePoint::new(metric::random_point(&base, rng), rng.random_range(floor..=ceiling)))
            .collect();
        Ok(ConeModel { base, floor, ceiling, triangulation: None, points })
    }

    /// Samples the triangulated region: heights in `[1, K]`, or `[0, K]` with a tip.
    pub fn triangulated(t: ConeTriangulation, count: usize, rng: &mut impl Rng) -> Result<Self> {
        let floor = if t.tip.is_some() { 0.0 } else { 1.0 };
        let mut m = ConeModel::sample(t.base.clone(), floor, t.height as f64, count, rng)?;
        m.triangulation = Some(t);
        Ok(m)
    }

    pub fn contains_height(&self, h: f64) -> bool {
        self.floor <= h && h <= self.ceiling
    }

    pub fn ambient_points(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(ConePoint::ambient).collect()
    }

    pub fn net(&self) -> FiniteNet {
        FiniteNet::euclidean(self.ambient_points())
    }
}

/// Shortest paths in the 1-skeleton of one more standard subdivision of a
/// triangulated cone. An upper bound for the induced path metric.
#[derive(Clone, Debug)]
pub struct PathMetric {
    graph: UnGraph<(), f64>,
    points: Vec<Vec<f64>>,
    locator: PointLocator,
}

impl PathMetric {
    pub fn new(t: &ConeTriangulation) -> Result<Self> {
        let refined = standard_subdivision(&t.complex)?;
        let points: Vec<Vec<f64>> = refined.vertices().iter().map(|p| p.to_f64()).collect();
        let mut graph = UnGraph::with_capacity(points.len(), 0);
        for _ in &points {
            graph.add_node(());
        }
        for (a, b) in refined.edges() {
            graph.add_edge(NodeIndex::new(a), NodeIndex::new(b), metric::dist(&points[a], &points[b]));
        }
        let locator = PointLocator::new(&refined);
        Ok(PathMetric { graph, points, locator })
    }

    fn locate(&self, p: &[f64]) -> Result<Location> {
        self.locator.locate(p).ok_or_else(|| Error::OutsideDomain(p.to_vec()))
    }

    /// Path length between two ambient points of the triangulated region.
    pub fn distance(&mut self, p: &[f64], q: &[f64]) -> Result<f64> {
        let (lp, lq) = (self.locate(p)?, self.locate(q)?);
        let direct = metric::dist(p, q);
        if lq.carrier(1e-12).iter().all(|v| lp.simplex.contains(*v)) || lp.carrier(1e-12).iter().all(|v| lq.simplex.contains(*v)) {
            return Ok(direct);
        }
        let sp = self.attach(p, &lp);
        let sq = self.attach(q, &lq);
        let d = dijkstra(&self.graph, sp, Some(sq), |e| *e.weight()).get(&sq).copied();
        self.graph.remove_node(sq);
        self.graph.remove_node(sp);
        d.ok_or_else(|| Error::InvalidInput("endpoints lie in different components".into()))
    }

    fn attach(&mut self, p: &[f64], loc: &Location) -> NodeIndex {
        let n = self.graph.add_node(());
        for &v in loc.simplex.vertex_ids() {
            self.graph.add_edge(n, NodeIndex::new(v), metric::dist(p, &self.points[v]));
        }
        n
    }
}
