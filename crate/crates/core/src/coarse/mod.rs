//! Entourage algebra on finite nets standing in for proper metric spaces.

mod cylinder;
mod grid;
mod profile;

use std::collections::{BTreeSet, HashMap};
use std::hash::{DefaultHasher, Hash, Hasher};

use crate::error::{Error, Result};
use crate::metric;

pub use cylinder::{
    check_split_containment, concat_homotopies, flip_containment, normalize_homotopy, ContainmentCheck, CylinderNet,
    NetHomotopy, NormalizedHomotopy,
};
pub use grid::{image_entourage, minus, plus, translate, z_operator, Clipped};
pub use profile::{
    control_profile, excisive_divergence, excisive_profile, fit_linear_control, modulus_at, properness_profile,
    ControlModulus, ExcisiveProfile,
};

#[derive(Clone, Debug, PartialEq)]
enum Metric {
    Euclidean,
    Matrix(Vec<Vec<f64>>),
}

/// Identifies a net so that entourages of different nets are not mixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetTag {
    len: usize,
    fingerprint: u64,
}

/// A finite sampled metric space.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteNet {
    points: Vec<Vec<f64>>,
    metric: Metric,
    grid_step: Option<f64>,
    tag: NetTag,
}

fn fingerprint(points: &[Vec<f64>], extra: &[Vec<f64>]) -> u64 {
    let mut h = DefaultHasher::new();
    for p in points.iter().chain(extra) {
        for x in p {
            x.to_bits().hash(&mut h);
        }
        u64::MAX.hash(&mut h);
    }
    h.finish()
}

impl FiniteNet {
    pub fn euclidean(points: Vec<Vec<f64>>) -> Self {
        let tag = NetTag { len: points.len(), fingerprint: fingerprint(&points, &[]) };
        FiniteNet { points, metric: Metric::Euclidean, grid_step: None, tag }
    }

    /// A net given by a symmetric distance matrix with zero diagonal.
    pub fn from_matrix(d: Vec<Vec<f64>>) -> Result<Self> {
        let n = d.len();
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidInput(format!("dist({i},{i}) is not zero")));
            }
        }
        for (i, row) in d.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != d[j][i] || v < 0.0 {
                    return Err(Error::InvalidInput(format!("distance ({i},{j}) not symmetric and nonnegative")));
                }
            }
        }
        let points: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let tag = NetTag { len: n, fingerprint: fingerprint(&points, &d) };
        Ok(FiniteNet { points, metric: Metric::Matrix(d), grid_step: None, tag })
    }

    /// The grid `{0, step, …, n·step}` on `ℝ₊`.
    pub fn real_grid(n: usize, step: f64) -> Self {
        let mut net = FiniteNet::euclidean((0..=n).map(|i| vec![i as f64 * step]).collect());
        net.grid_step = Some(step);
        net
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn tag(&self) -> NetTag {
        self.tag
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Euclidean => metric::dist(&self.points[i], &self.points[j]),
            Metric::Matrix(d) => d[i][j],
        }
    }

    pub fn grid_step(&self) -> Result<f64> {
        self.grid_step.ok_or(Error::NotRealGrid)
    }

    pub fn diameter(&self) -> f64 {
        metric::all_pairs(self.len()).map(|(i, j)| self.dist(i, j)).fold(0.0, f64::max)
    }

    /// Triangle-inequality violations among the given triples.
    pub fn triangle_violations(&self, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> usize {
        triples
            .into_iter()
            .filter(|&(a, b, c)| self.dist(a, c) > self.dist(a, b) + self.dist(b, c) + 1e-12)
            .count()
    }

    /// `{(x, y) | d(x, y) ≤ r}`; with `strict`, `d(x, y) < r`.
    pub fn r_entourage(&self, r: f64, strict: bool) -> Entourage {
        let mut pairs = BTreeSet::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                let d = self.dist(i, j);
                if d < r || (!strict && d == r) {
                    pairs.insert((i, j));
                }
            }
        }
        Entourage { tag: self.tag, pairs }
    }

    pub fn diagonal(&self) -> Entourage {
        Entourage { tag: self.tag, pairs: (0..self.len()).map(|i| (i, i)).collect() }
    }
}

/// A finite set of ordered index pairs over one net.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entourage {
    tag: NetTag,
    pairs: BTreeSet<(usize, usize)>,
}

impl Entourage {
    pub fn new(net: &FiniteNet, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= net.len() || *b >= net.len()) {
            return Err(Error::InvalidInput(format!("pair ({a}, {b}) out of range")));
        }
        Ok(Entourage { tag: net.tag, pairs })
    }

    pub fn empty(net: &FiniteNet) -> Self {
        Entourage { tag: net.tag, pairs: BTreeSet::new() }
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn tag(&self) -> NetTag {
        self.tag
    }

    fn same_net(&self, other: &Entourage) -> Result<()> {
        if self.tag == other.tag {
            Ok(())
        } else {
            Err(Error::NetMismatch)
        }
    }

    fn check_net(&self, net: &FiniteNet) -> Result<()> {
        if self.tag == net.tag {
            Ok(())
        } else {
            Err(Error::NetMismatch)
        }
    }

    /// `{(x, z) | ∃y: (x, y) ∈ self, (y, z) ∈ other}`.
    pub fn compose(&self, other: &Entourage) -> Result<Entourage> {
        self.same_net(other)?;
        let mut by_first: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(y, z) in &other.pairs {
            by_first.entry(y).or_default().push(z);
        }
        let mut pairs = BTreeSet::new();
        for &(x, y) in &self.pairs {
            if let Some(zs) = by_first.get(&y) {
                pairs.extend(zs.iter().map(|&z| (x, z)));
            }
        }
        Ok(Entourage { tag: self.tag, pairs })
    }

    pub fn inverse(&self) -> Entourage {
        Entourage { tag: self.tag, pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect() }
    }

    pub fn union(&self, other: &Entourage) -> Result<Entourage> {
        self.same_net(other)?;
        Ok(Entourage { tag: self.tag, pairs: self.pairs.union(&other.pairs).copied().collect() })
    }

    /// `M ∪ M⁻¹`.
    pub fn symmetric(&self) -> Entourage {
        self.union(&self.inverse()).expect("same net")
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| self.pairs.contains(&(b, a)))
    }

    pub fn is_subset(&self, other: &Entourage) -> bool {
        self.tag == other.tag && self.pairs.is_subset(&other.pairs)
    }

    /// Largest distance between paired points; 0 when empty.
    pub fn magnitude(&self, net: &FiniteNet) -> Result<f64> {
        self.check_net(net)?;
        Ok(self.pairs.iter().map(|&(a, b)| net.dist(a, b)).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_net(n: usize, rng: &mut impl Rng) -> FiniteNet {
        FiniteNet::euclidean((0..n).map(|_| vec![rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)]).collect())
    }

    fn random_entourage(net: &FiniteNet, k: usize, rng: &mut impl Rng) -> Entourage {
        let n = net.len();
        Entourage::new(net, (0..k).map(|_| (rng.random_range(0..n), rng.random_range(0..n)))).unwrap()
    }

    fn brute_compose(a: &Entourage, b: &Entourage, n: usize) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if a.contains(x, y) && b.contains(y, z) {
                        out.insert((x, z));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn compose_examples() {
        let net = FiniteNet::real_grid(3, 1.0);
        let a = Entourage::new(&net, [(0, 1)]).unwrap();
        let b = Entourage::new(&net, [(1, 2)]).unwrap();
        assert_eq!(a.compose(&b).unwrap().pairs().iter().copied().collect::<Vec<_>>(), vec![(0, 2)]);
        let m = Entourage::new(&net, [(0, 3), (2, 1)]).unwrap();
        assert_eq!(net.diagonal().compose(&m).unwrap(), m);
        assert_eq!(m.compose(&net.diagonal()).unwrap(), m);
    }

    #[test]
    fn mismatched_nets_are_rejected() {
        let a = FiniteNet::real_grid(3, 1.0);
        let b = FiniteNet::real_grid(4, 1.0);
        assert_eq!(a.diagonal().compose(&b.diagonal()), Err(Error::NetMismatch));
        assert_eq!(a.diagonal().union(&b.diagonal()), Err(Error::NetMismatch));
    }

    #[test]
    fn compose_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let net = random_net(20, &mut rng);
            let a = random_entourage(&net, 20, &mut rng);
            let b = random_entourage(&net, 20, &mut rng);
            assert_eq!(a.compose(&b).unwrap().pairs(), &brute_compose(&a, &b, 20));
        }
    }

    #[test]
    fn inverse_union_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let net = random_net(15, &mut rng);
        let m = random_entourage(&net, 30, &mut rng);
        assert_eq!(m.inverse().inverse(), m);
        assert_eq!(m.union(&Entourage::empty(&net)).unwrap(), m);
        let s = m.symmetric();
        assert_eq!(s.inverse(), s);
        assert!(s.is_symmetric());
    }

    #[test]
    fn r_entourages() {
        let net = FiniteNet::real_grid(4, 1.0);
        assert_eq!(net.r_entourage(1.0, true), net.diagonal());
        assert_eq!(net.r_entourage(1.0, false).len(), 5 + 8);
        assert_eq!(net.r_entourage(2.5, false).magnitude(&net).unwrap(), 2.0);
        let m = FiniteNet::from_matrix(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(m.diameter(), 2.0);
        assert!(FiniteNet::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    }

    proptest! {
        #[test]
        fn algebra_laws(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..=30);
            let net = random_net(n, &mut rng);
            let a = random_entourage(&net, 15, &mut rng);
            let b = random_entourage(&net, 15, &mut rng);
            let c = random_entourage(&net, 15, &mut rng);
            let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
            let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(a.compose(&b).unwrap().inverse(), b.inverse().compose(&a.inverse()).unwrap());
            let mag = a.compose(&b).unwrap().magnitude(&net).unwrap();
            prop_assert!(mag <= a.magnitude(&net).unwrap() + b.magnitude(&net).unwrap() + 1e-12);
            let triples: Vec<_> = (0..50).map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))).collect();
            prop_assert_eq!(net.triangle_violations(triples), 0);
        }
    }
}
