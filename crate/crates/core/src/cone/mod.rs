//! Metric cones over embedded complexes and their scheduled triangulation.

mod maps;
mod path;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::dyadic::{Dyadic, DyadicPoint};
use crate::error::{Error, Result};
use crate::geom::{close_faces, similarity_key, GeoComplex, LocalOrder, Simplex, SimilarityKey};
use crate::metric;
use crate::subdivide::{canonical_product, iterate_subdivision, standard_product_subdivision, standard_subdivision};

pub use maps::{
    cone_lipschitz_bound, flat_to_spherical, measure_radial_lipschitz, sampled_bilipschitz, BaseMap, FnMap,
    PlMap, RadialLipschitz, RadialMap, RadialProjection,
};
pub use path::{ConeModel, PathMetric};

/// A point `(h·x, h)` of the cone over `X ⊂ ℝ^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint {
    pub base: Vec<f64>,
    pub height: f64,
}

impl ConePoint {
    pub fn new(base: Vec<f64>, height: f64) -> Self {
        ConePoint { base, height }
    }

    pub fn tip(dim: usize) -> Self {
        ConePoint { base: vec![0.0; dim], height: 0.0 }
    }

    pub fn ambient(&self) -> Vec<f64> {
        metric::cone_point(&self.base, self.height)
    }

    /// Inverts [`ConePoint::ambient`]; the base of the tip is the origin.
    pub fn from_ambient(v: &[f64]) -> Self {
        let (h, rest) = v.split_last().expect("non-empty");
        let base = if *h == 0.0 { vec![0.0; rest.len()] } else { rest.iter().map(|x| x / h).collect() };
        ConePoint { base, height: *h }
    }
}

/// Subdivision level of the cross-section at height `k ≥ 1`: `2ⁿ ≤ k < 2ⁿ⁺¹`.
pub fn level(k: u64) -> usize {
    (63 - k.leading_zeros()) as usize
}

/// The slab between heights `lower` and `lower + 1`.
#[derive(Clone, Debug)]
pub struct Slab {
    pub lower: u64,
    pub level: usize,
    /// Standard product subdivision (level jump) rather than the canonical product.
    pub level_change: bool,
    pub complex: GeoComplex,
}

/// Triangulation of the cone between heights 1 and `K`, with an optional tip fan.
///
/// Cross-sections at height `k` are `k·Sⁿ(X)` with `n` = [`level`]`(k)`. Global
/// vertices are numbered by height, then by index in the cross-section, with
/// the tip (if any) first.
#[derive(Clone, Debug)]
pub struct ConeTriangulation {
    pub base: GeoComplex,
    pub height: u64,
    pub complex: GeoComplex,
    /// `Sⁿ(X)` for `n = 0..=level(K)`.
    pub cross_sections: Vec<GeoComplex>,
    pub slabs: Vec<Slab>,
    pub tip: Option<usize>,
    offsets: Vec<usize>,
}

fn scale_to_height(p: &DyadicPoint, k: u64) -> DyadicPoint {
    p.scale(&Dyadic::from_int(k as i64)).extended(Dyadic::from_int(k as i64))
}

/// `(x, s) ↦ ((k+s)·x, k+s)` on the vertices of a product over `[0, 1]`.
fn place_slab(product: &GeoComplex, k: u64) -> GeoComplex {
    product.map_vertices(|v| {
        let (s, x) = v.0.split_last().expect("product vertex");
        let h = &Dyadic::from_int(k as i64) + s;
        DyadicPoint(x.to_vec()).scale(&h).extended(h)
    })
}

impl ConeTriangulation {
    pub fn build(c: &GeoComplex, height: i64, with_tip: bool) -> Result<Self> {
        if height < 1 {
            return Err(Error::BadConeHeight(height));
        }
        let k_max = height as u64;
        let base = c.to_numeric_order()?;
        let dim = base.dim().ok_or_else(|| Error::InvalidInput("empty base complex".into()))?;
        let with_tip = with_tip && dim <= 2;
        let mut cross_sections = vec![base.clone()];
        for _ in 0..level(k_max) {
            cross_sections.push(standard_subdivision(cross_sections.last().unwrap())?);
        }
        let mut vertices = Vec::new();
        if with_tip {
            vertices.push(DyadicPoint(vec![Dyadic::zero(); base.ambient_dim() + 1]));
        }
        let mut offsets = Vec::with_capacity(k_max as usize);
        for k in 1..=k_max {
            offsets.push(vertices.len());
            vertices.extend(cross_sections[level(k)].vertices().iter().map(|p| scale_to_height(p, k)));
        }
        let mut maximal: Vec<Simplex> = Vec::new();
        if with_tip {
            maximal.extend(base.maximal_simplices().iter().map(|s| {
                Simplex::new(std::iter::once(0).chain(s.vertex_ids().iter().map(|&v| v + offsets[0])).collect())
            }));
        } else {
            maximal.extend(
                base.maximal_simplices().iter().map(|s| Simplex::new(s.vertex_ids().iter().map(|&v| v + offsets[0]).collect())),
            );
        }
        let mut slabs = Vec::new();
        for k in 1..k_max {
            let n = level(k);
            let level_change = level(k + 1) > n;
            let x = &cross_sections[n];
            let product = if level_change { standard_product_subdivision(x)? } else { canonical_product(x)? };
            let m = x.vertices().len();
            let (lo, hi) = (offsets[k as usize - 1], offsets[k as usize]);
            for s in product.maximal_simplices() {
                let ids = s.vertex_ids().iter().map(|&v| if v < m { lo + v } else { hi + v - m }).collect();
                maximal.push(Simplex::new(ids));
            }
            slabs.push(Slab { lower: k, level: n, level_change, complex: place_slab(&product, k) });
        }
        let complex = GeoComplex::new(base.ambient_dim() + 1, vertices, close_faces(maximal), LocalOrder::Numeric)?;
        Ok(ConeTriangulation {
            base,
            height: k_max,
            complex,
            cross_sections,
            slabs,
            tip: with_tip.then_some(0),
            offsets,
        })
    }

    /// Global index of vertex `v` of the cross-section at height `k`.
    pub fn vertex_at(&self, k: u64, v: usize) -> usize {
        self.offsets[k as usize - 1] + v
    }

    /// Vertices of the cross-section at height `k`, as an exact point set.
    pub fn cross_section_points(&self, k: u64) -> BTreeSet<DyadicPoint> {
        let n = self.cross_sections[level(k)].vertices().len();
        (0..n).map(|v| self.complex.vertex(self.vertex_at(k, v)).clone()).collect()
    }

    /// Each slab's top and the next slab's bottom carry the same exact points,
    /// and both match the cross-section at that height.
    pub fn check_cross_sections(&self) -> bool {
        let layer = |c: &GeoComplex, h: u64| -> BTreeSet<DyadicPoint> {
            let h = Dyadic::from_int(h as i64);
            c.vertices().iter().filter(|p| p.0.last() == Some(&h)).cloned().collect()
        };
        self.slabs.windows(2).all(|w| layer(&w[0].complex, w[0].lower + 1) == layer(&w[1].complex, w[1].lower))
            && self.slabs.iter().all(|s| {
                layer(&s.complex, s.lower) == self.cross_section_points(s.lower)
                    && layer(&s.complex, s.lower + 1) == self.cross_section_points(s.lower + 1)
            })
    }
}

/// Edge data of one slab.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabStatistics {
    pub lower: u64,
    pub level: usize,
    pub min_sq: BigRational,
    pub max_sq: BigRational,
    pub classes: usize,
}

impl SlabStatistics {
    pub fn min_edge(&self) -> f64 {
        self.min_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn max_edge(&self) -> f64 {
        self.max_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeStatistics {
    /// Squared edge lengths, exact.
    pub min_sq: BigRational,
    pub max_sq: BigRational,
    pub min: f64,
    pub max: f64,
    /// Distinct similarity keys over all simplices of dimension ≥ 1.
    pub classes: usize,
    pub top_classes: usize,
    pub cross_section_classes: usize,
    pub per_slab: Vec<SlabStatistics>,
}

fn squared_range(c: &GeoComplex) -> Option<(BigRational, BigRational)> {
    c.edges()
        .map(|(a, b)| c.vertex(a).dist_squared(c.vertex(b)).to_rational())
        .fold(None, |acc, d| match acc {
            None => Some((d.clone(), d)),
            Some((lo, hi)) => Some((lo.min(d.clone()), hi.max(d))),
        })
}

/// Similarity keys of all simplices of dimension ≥ 1.
pub fn similarity_pool(c: &GeoComplex) -> BTreeSet<SimilarityKey> {
    c.simplices().iter().filter(|s| s.dim() >= 1).map(|s| similarity_key(s, c)).collect()
}

/// Pool of the cross-sections `Sⁿ(X)`, which does not depend on the height.
pub fn cross_section_pool(t: &ConeTriangulation) -> BTreeSet<SimilarityKey> {
    t.cross_sections.iter().flat_map(similarity_pool).collect()
}

pub fn edge_statistics(t: &ConeTriangulation) -> Result<EdgeStatistics> {
    let c = &t.complex;
    let Some((min_sq, max_sq)) = squared_range(c) else {
        return Err(Error::InvalidInput("cone has no edges".into()));
    };
    let top_dim = c.dim().unwrap_or(0);
    let per_slab = t
        .slabs
        .iter()
        .map(|s| {
            let (lo, hi) = squared_range(&s.complex).expect("slabs have edges");
            SlabStatistics { lower: s.lower, level: s.level, min_sq: lo, max_sq: hi, classes: similarity_pool(&s.complex).len() }
        })
        .collect();
    let sqrt = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(EdgeStatistics {
        min: sqrt(&min_sq),
        max: sqrt(&max_sq),
        min_sq,
        max_sq,
        classes: similarity_pool(c).len(),
        top_classes: c.simplices_of_dim(top_dim).map(|s| similarity_key(s, c)).collect::<BTreeSet<_>>().len(),
        cross_section_classes: cross_section_pool(t).len(),
        per_slab,
    })
}

/// A-priori edge interval `[a², b²]` for cones over 1-dimensional bases:
/// `a = min(e_min, 1)` and `b² = (2·e_max + R)² + 1` with `R = max |x|`.
///
/// Cross-section edges at height `k` are `k/2ⁿ ∈ [1, 2)` times base edges,
/// and every edge between heights has vertical extent 1.
pub fn edge_interval_1d(base: &GeoComplex) -> Result<(BigRational, f64)> {
    if base.dim() != Some(1) {
        return Err(Error::InvalidInput("edge interval needs a 1-dimensional base".into()));
    }
    let (lo, hi) = squared_range(base).expect("1-dimensional complex has edges");
    let one = BigRational::from_integer(1.into());
    let r = base.vertices().iter().map(|p| metric::norm(&p.to_f64())).fold(0.0, f64::max);
    let e_max = hi.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok((lo.min(one), (2.0 * e_max + r).powi(2) + 1.0))
}

/// The iterate `S^k` of `X` at the level of height `k`.
pub fn cross_section(c: &GeoComplex, k: u64) -> Result<GeoComplex> {
    iterate_subdivision(c, level(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::validate;

    fn vertex_base() -> GeoComplex {
        GeoComplex::from_maximal(vec![DyadicPoint::from_ints(&[0])], vec![vec![0]]).unwrap()
    }

    #[test]
    fn levels() {
        assert_eq!([1, 2, 3, 4, 7, 8, 63, 64].map(level), [0, 1, 1, 2, 2, 3, 5, 6]);
    }

    #[test]
    fn vertex_cone_is_a_path() {
        let t = ConeTriangulation::build(&vertex_base(), 4, false).unwrap();
        assert_eq!(t.complex.vertices().len(), 4);
        assert_eq!(t.complex.simplices_of_dim(1).count(), 3);
        assert_eq!(t.complex.dim(), Some(1));
        let s = edge_statistics(&t).unwrap();
        assert_eq!((s.min, s.max), (1.0, 1.0));
        let tipped = ConeTriangulation::build(&vertex_base(), 4, true).unwrap();
        assert_eq!(tipped.complex.simplices_of_dim(1).count(), 4);
    }

    #[test]
    fn segment_cone_at_height_two() {
        let t = ConeTriangulation::build(&GeoComplex::unit_simplex(1), 2, false).unwrap();
        assert_eq!(t.slabs.len(), 1);
        assert!(t.slabs[0].level_change);
        let h = |k: i64| t.complex.vertices().iter().filter(|p| p.0[1] == Dyadic::from_int(k)).count();
        assert_eq!((h(1), h(2)), (2, 3));
        assert_eq!(t.complex.vertices().len(), 5);
        assert_eq!(t.complex.top_simplices().len(), 3);
        let at = |k: i64| {
            t.complex
                .edges()
                .filter(|&(a, b)| t.complex.vertex(a).0[1] == Dyadic::from_int(k) && t.complex.vertex(b).0[1] == Dyadic::from_int(k))
                .count()
        };
        assert_eq!((at(1), at(2)), (1, 2));
        assert!(validate(&t.complex).is_valid());
    }

    #[test]
    fn bad_height() {
        assert_eq!(ConeTriangulation::build(&vertex_base(), 0, false).unwrap_err(), Error::BadConeHeight(0));
    }

    #[test]
    fn cones_validate_and_cross_sections_agree() {
        for (c, k, tip) in [
            (GeoComplex::triangle_boundary(), 9, true),
            (GeoComplex::unit_simplex(2), 5, true),
            (GeoComplex::unit_simplex(1), 17, false),
        ] {
            let t = ConeTriangulation::build(&c, k, tip).unwrap();
            let report = validate(&t.complex);
            assert!(report.is_valid(), "{:?}", report.messages());
            assert!(t.check_cross_sections());
            for (k, s) in t.slabs.iter().map(|s| (s.lower, s)) {
                assert_eq!(s.level_change, (k + 1).is_power_of_two());
            }
        }
    }

    #[test]
    fn triangle_boundary_edges_stay_in_the_interval() {
        let base = GeoComplex::triangle_boundary();
        let (a_sq, b_sq) = edge_interval_1d(&base).unwrap();
        for k in [8, 32] {
            let s = edge_statistics(&ConeTriangulation::build(&base, k, false).unwrap()).unwrap();
            assert!(s.min_sq >= a_sq);
            assert!(s.max <= b_sq.sqrt());
        }
    }

    #[test]
    fn cross_section_pool_is_stable_but_slab_shapes_keep_changing() {
        let base = GeoComplex::triangle_boundary();
        let t16 = ConeTriangulation::build(&base, 16, false).unwrap();
        let t32 = ConeTriangulation::build(&base, 32, false).unwrap();
        assert_eq!(cross_section_pool(&t16), cross_section_pool(&t32));
        let (p16, p32) = (similarity_pool(&t16.complex), similarity_pool(&t32.complex));
        assert!(p16.is_subset(&p32));
        assert!(p32.len() > p16.len());
        // Two consecutive canonical slabs already differ in shape.
        let a = similarity_pool(&t32.slabs[20].complex);
        let b = similarity_pool(&t32.slabs[21].complex);
        assert_ne!(a, b);
    }
}
