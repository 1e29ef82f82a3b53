//! Geometric simplicial complexes with exact dyadic vertex coordinates.
//!
//! Simplices are stored as sorted vertex-index sets. The local order that
//! the subdivision machinery needs is carried separately in [`LocalOrder`];
//! complexes produced by this crate use [`LocalOrder::Numeric`], where the
//! vertex numbering itself is a linear extension of the local order.

mod io;
mod locate;
mod measure;
pub(crate) mod similarity;
mod validate;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use crate::dyadic::{Dyadic, DyadicPoint};
use crate::error::{Error, Result};

pub use io::{read_complex_json, to_off, ComplexJson};
pub use locate::{barycentric_f64, Location, PointLocator};
pub use measure::{
    affine_lipschitz, affine_lipschitz_f64, diameter, diameter_squared, volume, volume_squared, width,
    width_squared, AffineLipschitz,
};
pub use similarity::{similarity_classes, similarity_key, SimilarityKey};
pub use validate::{validate, ValidationReport, Violation, ViolationKind};

/// A simplex as a strictly increasing list of vertex indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Simplex(ids)
    }

    pub fn vertex_ids(&self) -> &[usize] {
        &self.0
    }

    /// Dimension; a vertex has dimension 0.
    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// Codimension-one faces.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.0.len()).filter(|_| self.0.len() > 1).map(move |skip| {
            Simplex(self.0.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect())
        })
    }

    /// All non-empty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u64..(1u64 << n))
            .map(|mask| Simplex((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
            .collect()
    }
}

/// Partial order on vertices that must be total on each simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalOrder {
    /// Vertex `a` precedes `b` iff `a < b`.
    Numeric,
    /// Generating relations `a < b`; the order is their transitive closure.
    Pairs(Vec<(usize, usize)>),
}

#[derive(Clone, Debug)]
pub struct GeoComplex {
    ambient_dim: usize,
    vertices: Vec<DyadicPoint>,
    simplices: Vec<Simplex>,
    order: LocalOrder,
    index: OnceLock<HashSet<Simplex>>,
    maximal: OnceLock<Vec<Simplex>>,
}

impl PartialEq for GeoComplex {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.vertices == other.vertices
            && self.simplices == other.simplices
            && self.order == other.order
    }
}

/// Every non-empty face of every listed simplex, sorted by dimension then ids.
pub fn close_faces(simplices: impl IntoIterator<Item = Simplex>) -> Vec<Simplex> {
    let mut set: HashSet<Simplex> = HashSet::new();
    for s in simplices {
        if set.contains(&s) {
            continue;
        }
        for f in s.faces() {
            set.insert(f);
        }
    }
    sort_simplices(set.into_iter().collect())
}

fn sort_simplices(mut v: Vec<Simplex>) -> Vec<Simplex> {
    v.sort_unstable_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    v
}

impl GeoComplex {
    /// Builds a complex from an explicit simplex list without closing it under faces.
    pub fn new(
        ambient_dim: usize,
        vertices: Vec<DyadicPoint>,
        simplices: Vec<Simplex>,
        order: LocalOrder,
    ) -> Result<Self> {
        for v in &vertices {
            if v.dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.dim() });
            }
        }
        for s in &simplices {
            if s.0.is_empty() {
                return Err(Error::InvalidInput("empty simplex".into()));
            }
            if let Some(&bad) = s.0.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidInput(format!("vertex index {bad} out of range")));
            }
        }
        if let LocalOrder::Pairs(p) = &order {
            if let Some(&(a, b)) = p.iter().find(|(a, b)| *a >= vertices.len() || *b >= vertices.len()) {
                return Err(Error::InvalidInput(format!("order pair ({a}, {b}) out of range")));
            }
        }
        let mut simplices = sort_simplices(simplices);
        simplices.dedup();
        Ok(GeoComplex {
            ambient_dim,
            vertices,
            simplices,
            order,
            index: OnceLock::new(),
            maximal: OnceLock::new(),
        })
    }

    /// Closes the given simplices under faces; vertex numbering is the local order.
    pub fn from_maximal(vertices: Vec<DyadicPoint>, maximal: Vec<Vec<usize>>) -> Result<Self> {
        let ambient_dim = vertices.first().map_or(0, DyadicPoint::dim);
        let closed = close_faces(maximal.into_iter().map(Simplex::new));
        GeoComplex::new(ambient_dim, vertices, closed, LocalOrder::Numeric)
    }

    /// The standard `n`-simplex spanned by the origin and the unit vectors of `ℝ^n`.
    pub fn unit_simplex(n: usize) -> Self {
        let mut vertices = vec![DyadicPoint::from_ints(&vec![0; n])];
        for i in 0..n {
            let mut c = vec![0; n];
            c[i] = 1;
            vertices.push(DyadicPoint::from_ints(&c));
        }
        GeoComplex::from_maximal(vertices, vec![(0..=n).collect()]).expect("unit simplex is valid")
    }

    /// Boundary of the unit right triangle, a PL circle in `ℝ²`.
    pub fn triangle_boundary() -> Self {
        let vertices = vec![
            DyadicPoint::from_ints(&[0, 0]),
            DyadicPoint::from_ints(&[1, 0]),
            DyadicPoint::from_ints(&[0, 1]),
        ];
        GeoComplex::from_maximal(vertices, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[DyadicPoint] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &DyadicPoint {
        &self.vertices[i]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn order(&self) -> &LocalOrder {
        &self.order
    }

    /// Largest simplex dimension, or `None` for an empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.last().map(Simplex::dim)
    }

    pub fn simplices_of_dim(&self, d: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dim() == d)
    }

    /// Simplices of the top dimension.
    pub fn top_simplices(&self) -> Vec<&Simplex> {
        match self.dim() {
            Some(d) => self.simplices_of_dim(d).collect(),
            None => Vec::new(),
        }
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.get_or_init(|| self.simplices.iter().cloned().collect()).contains(s)
    }

    /// Simplices that are not a proper face of another listed simplex.
    pub fn maximal_simplices(&self) -> &[Simplex] {
        self.maximal.get_or_init(|| {
            let mut covered: HashSet<&[usize]> = HashSet::new();
            let mut facets: Vec<Simplex> = Vec::new();
            for s in &self.simplices {
                facets.extend(s.facets());
            }
            for f in &facets {
                covered.insert(f.vertex_ids());
            }
            self.simplices.iter().filter(|s| !covered.contains(s.vertex_ids())).cloned().collect()
        })
    }

    pub fn points(&self, s: &Simplex) -> Vec<DyadicPoint> {
        s.0.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn points_f64(&self, s: &Simplex) -> Vec<Vec<f64>> {
        s.0.iter().map(|&i| self.vertices[i].to_f64()).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.simplices_of_dim(1).map(|s| (s.0[0], s.0[1]))
    }

    /// Restriction to the simplices spanned by vertices satisfying `keep`,
    /// with vertices renumbered in their original relative order.
    pub fn restrict(&self, keep: impl Fn(&DyadicPoint) -> bool) -> GeoComplex {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut verts = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep(v) {
                map[i] = verts.len();
                verts.push(v.clone());
            }
        }
        let simplices = self
            .simplices
            .iter()
            .filter(|s| s.0.iter().all(|&i| map[i] != usize::MAX))
            .map(|s| Simplex(s.0.iter().map(|&i| map[i]).collect()))
            .collect();
        let order = match &self.order {
            LocalOrder::Numeric => LocalOrder::Numeric,
            LocalOrder::Pairs(p) => LocalOrder::Pairs(
                p.iter()
                    .filter(|(a, b)| map[*a] != usize::MAX && map[*b] != usize::MAX)
                    .map(|(a, b)| (map[*a], map[*b]))
                    .collect(),
            ),
        };
        GeoComplex::new(self.ambient_dim, verts, simplices, order).expect("restriction of a valid complex")
    }

    /// Applies a coordinate map to every vertex, keeping the combinatorics.
    pub fn map_vertices(&self, f: impl Fn(&DyadicPoint) -> DyadicPoint) -> GeoComplex {
        let vertices: Vec<DyadicPoint> = self.vertices.iter().map(f).collect();
        let ambient_dim = vertices.first().map_or(self.ambient_dim, DyadicPoint::dim);
        GeoComplex::new(ambient_dim, vertices, self.simplices.clone(), self.order.clone())
            .expect("vertex map preserves validity of indices")
    }

    pub fn scaled(&self, s: &Dyadic) -> GeoComplex {
        self.map_vertices(|p| p.scale(s))
    }

    pub fn translated(&self, t: &DyadicPoint) -> GeoComplex {
        self.map_vertices(|p| p.add(t))
    }

    /// Generating pairs of the order; for numeric order, the oriented edges.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        match &self.order {
            LocalOrder::Numeric => self.edges().collect(),
            LocalOrder::Pairs(p) => p.clone(),
        }
    }

    /// Topological ranks of the order; fails on cycles.
    fn order_ranks(&self) -> Result<Vec<usize>> {
        let pairs = match &self.order {
            LocalOrder::Numeric => return Ok((0..self.vertices.len()).collect()),
            LocalOrder::Pairs(p) => p,
        };
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in pairs {
            if a == b {
                return Err(Error::OrderCycle(a));
            }
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut rank = vec![usize::MAX; n];
        let mut next = 0;
        while let Some(v) = ready.pop_first() {
            rank[v] = next;
            next += 1;
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if let Some(v) = rank.iter().position(|&r| r == usize::MAX) {
            return Err(Error::OrderCycle(v));
        }
        Ok(rank)
    }

    fn precedes_fn(&self) -> impl Fn(usize, usize) -> bool + '_ {
        let succ: HashMap<usize, Vec<usize>> = match &self.order {
            LocalOrder::Numeric => HashMap::new(),
            LocalOrder::Pairs(p) => {
                let mut m: HashMap<usize, Vec<usize>> = HashMap::new();
                for &(a, b) in p {
                    m.entry(a).or_default().push(b);
                }
                m
            }
        };
        let direct: HashSet<(usize, usize)> = match &self.order {
            LocalOrder::Numeric => HashSet::new(),
            LocalOrder::Pairs(p) => p.iter().copied().collect(),
        };
        let numeric = matches!(self.order, LocalOrder::Numeric);
        move |a: usize, b: usize| {
            if numeric {
                return a < b;
            }
            if direct.contains(&(a, b)) {
                return true;
            }
            let mut seen = HashSet::new();
            let mut queue = VecDeque::from([a]);
            while let Some(v) = queue.pop_front() {
                for &w in succ.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                    if w == b {
                        return true;
                    }
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            false
        }
    }

    /// Checks that the order is a partial order that is total on every simplex.
    pub fn check_local_order(&self) -> Result<()> {
        let rank = self.order_ranks()?;
        if matches!(self.order, LocalOrder::Numeric) {
            return Ok(());
        }
        let precedes = self.precedes_fn();
        for s in self.maximal_simplices() {
            let mut v = s.0.clone();
            v.sort_by_key(|&i| rank[i]);
            for w in v.windows(2) {
                if !precedes(w[0], w[1]) {
                    return Err(Error::OrderNotTotal(s.0.clone()));
                }
            }
        }
        Ok(())
    }

    /// Renumbers vertices along a linear extension of the local order, so that
    /// numeric order on each simplex is the local order.
    pub fn to_numeric_order(&self) -> Result<GeoComplex> {
        if matches!(self.order, LocalOrder::Numeric) {
            return Ok(self.clone());
        }
        self.check_local_order()?;
        let rank = self.order_ranks()?;
        let mut vertices = vec![DyadicPoint(Vec::new()); self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            vertices[rank[i]] = v.clone();
        }
        let simplices = self.simplices.iter().map(|s| Simplex::new(s.0.iter().map(|&i| rank[i]).collect())).collect();
        GeoComplex::new(self.ambient_dim, vertices, simplices, LocalOrder::Numeric)
    }
}
