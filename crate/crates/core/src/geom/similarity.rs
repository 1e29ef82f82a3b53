use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{GeoComplex, Simplex};
use crate::dyadic::DyadicPoint;
use crate::exact::point_to_rationals;

/// Exact class label for simplices up to translation and positive scaling.
///
/// The empty key is the single class of 0-simplices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimilarityKey(Vec<Vec<BigRational>>);

impl SimilarityKey {
    pub fn edge_vectors(&self) -> &[Vec<BigRational>] {
        &self.0
    }

    pub fn is_vertex(&self) -> bool {
        self.0.is_empty()
    }
}

/// Key of the simplex spanned by `points`, independent of their order.
///
/// Edge vectors are taken from the lexicographically smallest vertex, sorted,
/// and divided by the largest absolute coordinate of the first one. Positive
/// scaling and translation preserve both the base vertex and the sort order.
pub fn similarity_key_of(points: &[DyadicPoint]) -> SimilarityKey {
    if points.len() <= 1 {
        return SimilarityKey(Vec::new());
    }
    let base = points.iter().min().expect("non-empty");
    let b = point_to_rationals(base);
    let mut edges: Vec<Vec<BigRational>> = points
        .iter()
        .filter(|p| *p != base)
        .map(|p| point_to_rationals(p).iter().zip(&b).map(|(x, y)| x - y).collect())
        .collect();
    edges.sort();
    let scale = edges[0].iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero);
    if scale.is_zero() {
        return SimilarityKey(edges);
    }
    SimilarityKey(edges.into_iter().map(|e| e.into_iter().map(|x| x / &scale).collect()).collect())
}

pub fn similarity_key(s: &Simplex, c: &GeoComplex) -> SimilarityKey {
    similarity_key_of(&c.points(s))
}

/// Distinct keys among the simplices of dimension `dim`.
pub fn similarity_classes(c: &GeoComplex, dim: usize) -> BTreeSet<SimilarityKey> {
    c.simplices_of_dim(dim).map(|s| similarity_key(s, c)).collect()
}

/// Brute-force test oracle for strong similarity.
#[cfg(test)]
pub(crate) mod oracle {
    use super::*;

    /// Some vertex bijection and positive factor make the edge vectors agree.
    pub(crate) fn strongly_similar(a: &[DyadicPoint], b: &[DyadicPoint]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let ea: Vec<Vec<BigRational>> =
                (1..n).map(|i| point_to_rationals(&a[i].sub(&a[0]))).collect();
            let eb: Vec<Vec<BigRational>> =
                (1..n).map(|i| point_to_rationals(&b[perm[i]].sub(&b[perm[0]]))).collect();
            let ratio = ea.iter().zip(&eb).flat_map(|(u, v)| u.iter().zip(v)).find_map(|(x, y)| {
                (!x.is_zero()).then(|| y / x)
            });
            if let Some(r) = ratio {
                if r.is_positive()
                    && ea.iter().zip(&eb).all(|(u, v)| u.iter().zip(v).all(|(x, y)| &(x * &r) == y))
                {
                    return true;
                }
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }

    fn next_permutation(p: &mut [usize]) -> bool {
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return false;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::strongly_similar;
    use super::*;
    use crate::dyadic::Dyadic;
    use proptest::prelude::*;

    fn pts(v: &[[i64; 2]]) -> Vec<DyadicPoint> {
        v.iter().map(|c| DyadicPoint::from_ints(c)).collect()
    }

    #[test]
    fn translation_and_scaling_invariance() {
        let s = pts(&[[0, 0], [1, 0], [0, 1]]);
        let k = similarity_key_of(&s);
        let t: Vec<_> = s.iter().map(|p| p.add(&DyadicPoint::from_ints(&[5, 7]))).collect();
        let d: Vec<_> = s.iter().map(|p| p.scale(&Dyadic::from_int(2))).collect();
        assert_eq!(similarity_key_of(&t), k);
        assert_eq!(similarity_key_of(&d), k);
    }

    #[test]
    fn point_reflection_is_a_different_class() {
        let s = pts(&[[0, 0], [1, 0], [0, 1]]);
        let r = pts(&[[1, 1], [0, 1], [1, 0]]);
        assert_ne!(similarity_key_of(&s), similarity_key_of(&r));
        assert!(!strongly_similar(&s, &r));
    }

    #[test]
    fn vertices_share_one_class() {
        assert!(similarity_key_of(&pts(&[[3, 4]])).is_vertex());
        assert_eq!(similarity_key_of(&pts(&[[3, 4]])), similarity_key_of(&pts(&[[-1, 0]])));
    }

    fn small_triangle() -> impl Strategy<Value = Vec<DyadicPoint>> {
        prop::collection::vec((-4i64..5, -4i64..5), 3)
            .prop_map(|v| v.iter().map(|(x, y)| DyadicPoint::from_ints(&[*x, *y])).collect())
    }

    proptest! {
        #[test]
        fn key_equality_matches_matching_oracle(a in small_triangle(), b in small_triangle()) {
            prop_assume!(crate::exact::affinely_independent(&a) && crate::exact::affinely_independent(&b));
            prop_assert_eq!(similarity_key_of(&a) == similarity_key_of(&b), strongly_similar(&a, &b));
        }

        #[test]
        fn key_is_a_congruence(a in small_triangle(), tx in -9i64..9, ty in -9i64..9, num in 1i64..40, e in 0u32..6) {
            let s = Dyadic::new(num, e);
            let t = DyadicPoint::from_ints(&[tx, ty]);
            let moved: Vec<_> = a.iter().rev().map(|p| p.scale(&s).add(&t)).collect();
            prop_assert_eq!(similarity_key_of(&moved), similarity_key_of(&a));
        }
    }
}
