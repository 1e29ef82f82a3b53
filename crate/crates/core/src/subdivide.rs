//! Whitney standard subdivision, products with the unit interval, and the
//! standard product subdivision joining `X×{0}` to `S(X)×{1}`.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::{Dyadic, DyadicPoint};
use crate::error::Result;
use crate::exact::{self, point_to_rationals};
use crate::geom::{close_faces, GeoComplex, Simplex};

/// Vertex of a standard subdivision: the midpoint of original vertices `lo ≤ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MidpointLabel {
    pub lo: usize,
    pub hi: usize,
}

impl MidpointLabel {
    /// The sandwich order: `(i,j) ≤ (k,l)` iff `k ≤ i ≤ j ≤ l`.
    pub fn le(&self, other: &MidpointLabel) -> bool {
        other.lo <= self.lo && self.lo <= self.hi && self.hi <= other.hi
    }

    fn rank_key(&self) -> (usize, usize) {
        (self.hi - self.lo, self.lo)
    }
}

/// A standard subdivision together with the label of each new vertex.
///
/// Labels refer to the vertex numbering of `base`, the input renumbered along
/// its local order.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub base: GeoComplex,
    pub complex: GeoComplex,
    pub labels: Vec<MidpointLabel>,
}

/// Maximal chains of intervals from `[a, b]` to `[0, n]`, each growing by one step.
fn interval_chains(a: usize, b: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut cur = vec![(a, b)];
    fn rec(n: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let (lo, hi) = *cur.last().unwrap();
        if lo == 0 && hi == n {
            out.push(cur.clone());
            return;
        }
        if lo > 0 {
            cur.push((lo - 1, hi));
            rec(n, cur, out);
            cur.pop();
        }
        if hi < n {
            cur.push((lo, hi + 1));
            rec(n, cur, out);
            cur.pop();
        }
    }
    rec(n, &mut cur, &mut out);
    out
}

/// Numbering of midpoint labels along a linear extension of the sandwich order.
struct LabelTable {
    ids: HashMap<MidpointLabel, usize>,
    labels: Vec<MidpointLabel>,
    points: Vec<DyadicPoint>,
}

fn label_table(base: &GeoComplex) -> LabelTable {
    let mut set: BTreeMap<(usize, usize), MidpointLabel> = BTreeMap::new();
    for s in base.maximal_simplices() {
        let v = s.vertex_ids();
        for i in 0..v.len() {
            for j in i..v.len() {
                let l = MidpointLabel { lo: v[i], hi: v[j] };
                set.insert(l.rank_key(), l);
            }
        }
    }
    let labels: Vec<MidpointLabel> = set.into_values().collect();
    let ids = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let points = labels.iter().map(|l| base.vertex(l.lo).midpoint(base.vertex(l.hi))).collect();
    LabelTable { ids, labels, points }
}

/// One step of the standard subdivision, keeping vertex labels.
pub fn standard_subdivision_labeled(c: &GeoComplex) -> Result<Subdivision> {
    let base = c.to_numeric_order()?;
    let table = label_table(&base);
    // Coordinates must be distinct; shared faces produce the same labels.
    debug_assert_eq!(
        table.points.iter().collect::<std::collections::HashSet<_>>().len(),
        table.points.len()
    );
    let mut maximal = Vec::new();
    for s in base.maximal_simplices() {
        let v = s.vertex_ids();
        let n = v.len() - 1;
        for start in 0..=n {
            for chain in interval_chains(start, start, n) {
                let ids = chain.iter().map(|&(i, j)| table.ids[&MidpointLabel { lo: v[i], hi: v[j] }]).collect();
                maximal.push(Simplex::new(ids));
            }
        }
    }
    let complex = GeoComplex::new(
        base.ambient_dim(),
        table.points,
        close_faces(maximal),
        crate::geom::LocalOrder::Numeric,
    )?;
    Ok(Subdivision { base, complex, labels: table.labels })
}

pub fn standard_subdivision(c: &GeoComplex) -> Result<GeoComplex> {
    Ok(standard_subdivision_labeled(c)?.complex)
}

pub fn iterate_subdivision(c: &GeoComplex, k: usize) -> Result<GeoComplex> {
    let mut cur = c.clone();
    for _ in 0..k {
        cur = standard_subdivision(&cur)?;
    }
    Ok(cur)
}

fn lift(p: &DyadicPoint, h: i64) -> DyadicPoint {
    p.extended(Dyadic::from_int(h))
}

/// Canonical triangulation of `X×[0,1]` in `ℝ^(N+1)`.
///
/// Vertex `(v, layer)` gets index `layer · |V| + v` in the numeric order of `X`.
pub fn canonical_product(c: &GeoComplex) -> Result<GeoComplex> {
    let base = c.to_numeric_order()?;
    let m = base.vertices().len();
    let mut vertices: Vec<DyadicPoint> = base.vertices().iter().map(|p| lift(p, 0)).collect();
    vertices.extend(base.vertices().iter().map(|p| lift(p, 1)));
    let mut maximal = Vec::new();
    for s in base.maximal_simplices() {
        let v = s.vertex_ids();
        for j in 0..v.len() {
            let ids = v[..=j].iter().copied().chain(v[j..].iter().map(|&x| x + m)).collect();
            maximal.push(Simplex::new(ids));
        }
    }
    GeoComplex::new(base.ambient_dim() + 1, vertices, close_faces(maximal), crate::geom::LocalOrder::Numeric)
}

/// A cell of the standard product subdivision of one simplex, in local positions:
/// bottom vertices `v` and the nested interval chain on the top layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProductCell {
    pub bottom: Vec<usize>,
    pub top: Vec<(usize, usize)>,
}

impl ProductCell {
    pub fn dim(&self) -> usize {
        self.bottom.len() + self.top.len() - 1
    }

    /// `u_l ≤ … ≤ u_0 ≤ v_0 < … < v_k ≤ w_0 ≤ … ≤ w_l` with strictly nested intervals.
    pub fn admissible(&self) -> bool {
        let strictly_increasing = self.bottom.windows(2).all(|w| w[0] < w[1]);
        let nested = self.top.windows(2).all(|w| w[1].0 <= w[0].0 && w[0].1 <= w[1].1 && w[0] != w[1]);
        let wraps = match (self.bottom.first(), self.bottom.last(), self.top.first()) {
            (Some(&v0), Some(&vk), Some(&(u0, w0))) => u0 <= v0 && vk <= w0,
            _ => true,
        };
        strictly_increasing && nested && wraps && self.top.iter().all(|(u, w)| u <= w)
    }
}

/// Top-dimensional cells over an `n`-simplex: the bottom is a consecutive
/// block `a..=a+k` and the top a maximal interval chain from `[a, a+k]`.
pub fn product_cells(n: usize) -> Vec<ProductCell> {
    let mut out = Vec::new();
    for k in 0..=n {
        for a in 0..=n - k {
            for chain in interval_chains(a, a + k, n) {
                out.push(ProductCell { bottom: (a..=a + k).collect(), top: chain });
            }
        }
    }
    out
}

/// Triangulation of `X×[0,1]` restricting to `X` at the bottom and to `S(X)` at the top.
///
/// Bottom vertices keep the numbering of `X`; top vertices follow, numbered as in `S(X)`.
pub fn standard_product_subdivision(c: &GeoComplex) -> Result<GeoComplex> {
    let sub = standard_subdivision_labeled(c)?;
    let base = &sub.base;
    let m = base.vertices().len();
    let mut vertices: Vec<DyadicPoint> = base.vertices().iter().map(|p| lift(p, 0)).collect();
    vertices.extend(sub.complex.vertices().iter().map(|p| lift(p, 1)));
    let ids: HashMap<MidpointLabel, usize> = sub.labels.iter().enumerate().map(|(i, l)| (*l, i + m)).collect();
    let mut maximal = Vec::new();
    for s in base.maximal_simplices() {
        let v = s.vertex_ids();
        for cell in product_cells(v.len() - 1) {
            let bottom = cell.bottom.iter().map(|&i| v[i]);
            let top = cell.top.iter().map(|&(i, j)| ids[&MidpointLabel { lo: v[i], hi: v[j] }]);
            maximal.push(Simplex::new(bottom.chain(top).collect()));
        }
    }
    GeoComplex::new(base.ambient_dim() + 1, vertices, close_faces(maximal), crate::geom::LocalOrder::Numeric)
}

/// `vol(child) / vol(parent)` for a child simplex inside the affine hull of
/// its parent. The ratio is rational; floats are used only if it is not a
/// perfect square of the Gram quotient, which cannot happen for nested cells.
pub fn volume_ratio(child: &[DyadicPoint], parent: &[DyadicPoint]) -> Option<BigRational> {
    let g = |p: &[DyadicPoint]| exact::determinant(&exact::gram(&exact::edge_vectors(p)));
    let gp = g(parent);
    if gp.is_zero() {
        return None;
    }
    let q = g(child) / gp;
    if let Some(r) = exact::rational_sqrt(&q) {
        return Some(r);
    }
    let f = exact::to_f64(&q).sqrt();
    Dyadic::from_f64(f).map(|d| d.to_rational())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementCheck {
    /// Fine top cells not contained in any coarse top cell.
    pub unassigned: usize,
    /// Fine top cells contained in more than one coarse cell.
    pub ambiguous: usize,
    /// Coarse cells whose children's volumes do not sum to their own volume.
    pub volume_mismatches: usize,
    /// Largest relative float error of the volume sums.
    pub max_relative_error: f64,
    pub coarse_cells: usize,
    pub fine_cells: usize,
}

impl RefinementCheck {
    pub fn holds(&self) -> bool {
        self.unassigned == 0 && self.ambiguous == 0 && self.volume_mismatches == 0
    }
}

/// Checks that every top cell of `fine` lies in exactly one top cell of
/// `coarse` and that the children of each coarse cell fill its volume exactly.
pub fn check_refinement(coarse: &GeoComplex, fine: &GeoComplex) -> RefinementCheck {
    let coarse_top = coarse.top_simplices();
    let fine_top = fine.top_simplices();
    let parents: Vec<Vec<DyadicPoint>> = coarse_top.iter().map(|s| coarse.points(s)).collect();
    let parent_rat: Vec<Vec<Vec<BigRational>>> =
        parents.iter().map(|p| p.iter().map(point_to_rationals).collect()).collect();
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = parents
        .iter()
        .map(|p| {
            let f: Vec<Vec<f64>> = p.iter().map(DyadicPoint::to_f64).collect();
            let lo = (0..f[0].len()).map(|k| f.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min)).collect();
            let hi = (0..f[0].len()).map(|k| f.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
            (lo, hi)
        })
        .collect();
    let mut sums = vec![BigRational::zero(); parents.len()];
    let mut fsums = vec![0.0f64; parents.len()];
    let (mut unassigned, mut ambiguous) = (0, 0);
    for s in &fine_top {
        let pts = fine.points(s);
        let pf: Vec<Vec<f64>> = pts.iter().map(DyadicPoint::to_f64).collect();
        let mut owners = Vec::new();
        for (ci, (lo, hi)) in boxes.iter().enumerate() {
            let in_box = pf.iter().all(|p| p.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| *x >= l - 1e-12 && *x <= h + 1e-12));
            if !in_box {
                continue;
            }
            let inside = pts.iter().all(|p| {
                exact::barycentric_rational(&parent_rat[ci], &point_to_rationals(p))
                    .is_some_and(|l| l.iter().all(|x| *x >= BigRational::zero()))
            });
            if inside {
                owners.push(ci);
            }
        }
        match owners.as_slice() {
            [] => unassigned += 1,
            [ci] => {
                if let Some(r) = volume_ratio(&pts, &parents[*ci]) {
                    fsums[*ci] += exact::to_f64(&r);
                    sums[*ci] += r;
                }
            }
            _ => ambiguous += 1,
        }
    }
    let one = BigRational::one();
    let volume_mismatches = sums.iter().filter(|s| **s != one).count();
    let max_relative_error = fsums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    RefinementCheck {
        unassigned,
        ambiguous,
        volume_mismatches,
        max_relative_error,
        coarse_cells: parents.len(),
        fine_cells: fine_top.len(),
    }
}

/// Exact squared extreme edge lengths `(min, max)`.
pub fn edge_length_range(c: &GeoComplex) -> Option<(BigRational, BigRational)> {
    let mut it = c.edges().map(|(a, b)| c.vertex(a).dist_squared(c.vertex(b)).to_rational());
    let first = it.next()?;
    Some(it.fold((first.clone(), first), |(lo, hi), d| {
        let lo = if d < lo { d.clone() } else { lo };
        let hi = if d > hi { d } else { hi };
        (lo, hi)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{similarity_classes, validate, volume_squared};
    use proptest::prelude::*;

    fn top_count(c: &GeoComplex) -> usize {
        c.top_simplices().len()
    }

    // Oracle: all maximal chains in the label poset of one n-simplex, by brute force.
    fn chain_oracle(n: usize) -> (usize, usize) {
        let labels: Vec<MidpointLabel> =
            (0..=n).flat_map(|i| (i..=n).map(move |j| MidpointLabel { lo: i, hi: j })).collect();
        fn extend(labels: &[MidpointLabel], chain: &mut Vec<MidpointLabel>, out: &mut usize) {
            let last = *chain.last().unwrap();
            let mut grew = false;
            for l in labels {
                // Cover relation: strictly above with nothing in between.
                if last.le(l) && *l != last && labels.iter().all(|m| !(last.le(m) && m.le(l) && *m != last && m != l)) {
                    grew = true;
                    chain.push(*l);
                    extend(labels, chain, out);
                    chain.pop();
                }
            }
            if !grew {
                *out += 1;
            }
        }
        let mut count = 0;
        for l in labels.iter().filter(|l| labels.iter().all(|m| !(m.le(l) && m != *l))) {
            extend(&labels, &mut vec![*l], &mut count);
        }
        (labels.len(), count)
    }

    #[test]
    fn counts_match_chain_oracle() {
        for n in 1..=4 {
            let s = standard_subdivision(&GeoComplex::unit_simplex(n)).unwrap();
            let (v, t) = chain_oracle(n);
            assert_eq!(s.vertices().len(), v);
            assert_eq!(top_count(&s), t);
            assert_eq!(v, (n + 1) * (n + 2) / 2);
            assert_eq!(t, 1 << n);
        }
    }

    #[test]
    fn segment_and_triangle_examples() {
        let s = standard_subdivision(&GeoComplex::unit_simplex(1)).unwrap();
        assert_eq!(s.vertices().len(), 3);
        assert_eq!(s.simplices_of_dim(1).count(), 2);
        assert_eq!(s.vertex(2), &DyadicPoint::new(vec![Dyadic::new(1, 1)]));
        let t = standard_subdivision(&GeoComplex::unit_simplex(2)).unwrap();
        assert_eq!((t.vertices().len(), top_count(&t)), (6, 4));
        assert!(validate(&t).is_valid());
    }

    #[test]
    fn iterate_counts() {
        let c = GeoComplex::unit_simplex(2);
        assert_eq!(iterate_subdivision(&c, 0).unwrap(), c);
        assert_eq!(top_count(&iterate_subdivision(&c, 2).unwrap()), 16);
    }

    // Oracle: greedy grouping of top simplices by the brute-force matching test.
    fn class_count_oracle(c: &GeoComplex) -> usize {
        let mut reps: Vec<Vec<DyadicPoint>> = Vec::new();
        for s in c.top_simplices() {
            let p = c.points(s);
            if !reps.iter().any(|r| crate::geom::similarity::oracle::strongly_similar(r, &p)) {
                reps.push(p);
            }
        }
        reps.len()
    }

    #[test]
    fn right_triangle_class_counts() {
        let mut cur = GeoComplex::unit_simplex(2);
        let mut counts = vec![similarity_classes(&cur, 2).len()];
        for depth in 1..=4 {
            cur = standard_subdivision(&cur).unwrap();
            counts.push(similarity_classes(&cur, 2).len());
            if depth <= 2 {
                assert_eq!(counts[depth], class_count_oracle(&cur));
            }
        }
        // The two middle triangles of the first step are point reflections of
        // each other, so they are not strongly similar.
        assert_eq!(counts, vec![1, 3, 4, 4, 4]);
    }

    #[test]
    fn subdivision_is_a_refinement_with_exact_volume() {
        for n in 1..=3 {
            let c = GeoComplex::unit_simplex(n);
            let s = standard_subdivision(&c).unwrap();
            let r = check_refinement(&c, &s);
            assert!(r.holds(), "{r:?}");
            let total: BigRational = s.top_simplices().iter().map(|t| volume_squared(t, &s)).fold(BigRational::zero(), |a, b| a + b);
            // Equal-volume children: each has squared volume parent/4^n.
            let parent = volume_squared(c.top_simplices()[0], &c);
            assert_eq!(total, parent / BigRational::from_integer((1u64 << n).into()));
        }
    }

    #[test]
    fn shared_faces_are_subdivided_once() {
        let v = vec![
            DyadicPoint::from_ints(&[0, 0]),
            DyadicPoint::from_ints(&[1, 0]),
            DyadicPoint::from_ints(&[0, 1]),
            DyadicPoint::from_ints(&[1, 1]),
        ];
        let c = GeoComplex::from_maximal(v, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let s = standard_subdivision(&c).unwrap();
        assert_eq!(s.vertices().len(), 9);
        assert_eq!(top_count(&s), 8);
        assert!(validate(&s).is_valid());
        assert!(check_refinement(&c, &s).holds());
    }

    #[test]
    fn canonical_product_examples() {
        let point = GeoComplex::from_maximal(vec![DyadicPoint::from_ints(&[0])], vec![vec![0]]).unwrap();
        let p = canonical_product(&point).unwrap();
        assert_eq!(p.top_simplices().len(), 1);
        assert_eq!(p.dim(), Some(1));
        let seg = GeoComplex::unit_simplex(1);
        let q = canonical_product(&seg).unwrap();
        assert_eq!(top_count(&q), 2);
        let area: f64 = q.top_simplices().iter().map(|t| crate::geom::volume(t, &q)).sum();
        assert!((area - 1.0).abs() < 1e-12);
        let bottom = q.restrict(|p| p.coords()[1].is_zero()).map_vertices(|p| DyadicPoint::new(p.coords()[..1].to_vec()));
        assert_eq!(bottom, seg);
        assert!(validate(&q).is_valid());
    }

    // Oracle: every admissible (u, v, w) tuple of top dimension over an n-simplex.
    fn admissible_oracle(n: usize) -> Vec<ProductCell> {
        let intervals: Vec<(usize, usize)> = (0..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect();
        let mut out = Vec::new();
        for bmask in 1u32..(1 << (n + 1)) {
            let bottom: Vec<usize> = (0..=n).filter(|i| bmask >> i & 1 == 1).collect();
            for tmask in 1u64..(1 << intervals.len()) {
                let mut top: Vec<(usize, usize)> =
                    (0..intervals.len()).filter(|i| tmask >> i & 1 == 1).map(|i| intervals[i]).collect();
                if bottom.len() + top.len() != n + 2 {
                    continue;
                }
                top.sort_by_key(|(u, w)| w - u);
                let cell = ProductCell { bottom: bottom.clone(), top };
                if cell.admissible() {
                    out.push(cell);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn product_cells_match_admissible_tuples() {
        for n in 0..=3 {
            let mut cells = product_cells(n);
            cells.sort();
            assert_eq!(cells, admissible_oracle(n), "n = {n}");
            assert_eq!(cells.len(), (1 << (n + 1)) - 1);
        }
    }

    #[test]
    fn standard_product_examples() {
        let point = GeoComplex::from_maximal(vec![DyadicPoint::from_ints(&[0])], vec![vec![0]]).unwrap();
        assert_eq!(top_count(&standard_product_subdivision(&point).unwrap()), 1);
        let seg = GeoComplex::unit_simplex(1);
        let p = standard_product_subdivision(&seg).unwrap();
        assert_eq!(p.vertices().len(), 5);
        assert_eq!(top_count(&p), 3);
        let top = p.restrict(|q| q.coords()[1] == Dyadic::one());
        assert_eq!(top.simplices_of_dim(1).count(), 2);
        let bottom = p.restrict(|q| q.coords()[1].is_zero());
        assert_eq!(bottom.simplices_of_dim(1).count(), 1);
        assert!(validate(&p).is_valid());
    }

    #[test]
    fn standard_product_is_refined_by_canonical_product_of_subdivision() {
        for n in 1..=3 {
            let c = GeoComplex::unit_simplex(n);
            let coarse = standard_product_subdivision(&c).unwrap();
            let fine = canonical_product(&standard_subdivision(&c).unwrap()).unwrap();
            let r = check_refinement(&coarse, &fine);
            assert!(r.holds(), "n = {n}: {r:?}");
            assert!(validate(&coarse).is_valid());
        }
    }

    fn small_triangle() -> impl Strategy<Value = GeoComplex> {
        prop::collection::vec((-6i64..7, -6i64..7), 3).prop_filter_map("degenerate", |v| {
            let pts: Vec<DyadicPoint> = v.iter().map(|(x, y)| DyadicPoint::from_ints(&[*x, *y])).collect();
            exact::affinely_independent(&pts).then(|| GeoComplex::from_maximal(pts, vec![vec![0, 1, 2]]).unwrap())
        })
    }

    #[test]
    fn edge_lower_bound_on_fixtures() {
        for n in 1..=3 {
            let mut cur = GeoComplex::unit_simplex(n);
            for _ in 0..3 {
                let (lo, _) = edge_length_range(&cur).unwrap();
                let next = standard_subdivision(&cur).unwrap();
                let (slo, _) = edge_length_range(&next).unwrap();
                assert!(slo >= lo / BigRational::from_integer(4.into()));
                cur = next;
            }
        }
    }

    #[test]
    fn edge_lower_bound_fails_for_flat_triangles() {
        // The edge from the middle vertex to the midpoint of the long side has
        // length 1/8 while the shortest original edge is longer than 2.
        let v = vec![DyadicPoint::from_ints(&[0, 0]), DyadicPoint::new(vec![Dyadic::from_int(2), Dyadic::new(1, 3)]), DyadicPoint::from_ints(&[4, 0])];
        let c = GeoComplex::from_maximal(v, vec![vec![0, 1, 2]]).unwrap();
        let (lo, _) = edge_length_range(&c).unwrap();
        let (slo, _) = edge_length_range(&standard_subdivision(&c).unwrap()).unwrap();
        assert_eq!(slo, BigRational::new(1.into(), 64.into()));
        assert!(slo < lo / BigRational::from_integer(4.into()));
    }

    proptest! {
        #[test]
        fn edge_lengths_bounded_above(c in small_triangle()) {
            let (_, hi) = edge_length_range(&c).unwrap();
            let s = standard_subdivision(&c).unwrap();
            let (_, shi) = edge_length_range(&s).unwrap();
            prop_assert!(shi <= hi);
        }

        #[test]
        fn volume_is_conserved(c in small_triangle()) {
            let s = standard_subdivision(&c).unwrap();
            prop_assert!(check_refinement(&c, &s).holds());
        }
    }
}
