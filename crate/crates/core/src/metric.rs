//! Euclidean helpers and sampled Lipschitz measurements.

use rand::Rng;

use crate::geom::GeoComplex;

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

/// `(h·x, h)`.
pub fn cone_point(x: &[f64], h: f64) -> Vec<f64> {
    let mut v = scale(x, h);
    v.push(h);
    v
}

/// A point of a random maximal simplex with Dirichlet(1, …, 1) weights.
pub fn random_point(c: &GeoComplex, rng: &mut impl Rng) -> Vec<f64> {
    let maximal = c.maximal_simplices();
    let s = &maximal[rng.random_range(0..maximal.len())];
    let pts = c.points_f64(s);
    let w: Vec<f64> = pts.iter().map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    (0..pts[0].len()).map(|r| pts.iter().zip(&w).map(|(p, wi)| p[r] * wi).sum::<f64>() / total).collect()
}

/// Largest ratio `|f(p)−f(q)| / |p−q|` over the given index pairs, with its witness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub witness: (usize, usize),
    pub pairs: usize,
}

pub fn max_ratio(
    points: &[Vec<f64>],
    images: &[Vec<f64>],
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> RatioEstimate {
    let mut best = RatioEstimate { ratio: 0.0, witness: (0, 0), pairs: 0 };
    for (i, j) in pairs {
        best.pairs += 1;
        let d = dist(&points[i], &points[j]);
        if d <= 1e-12 {
            continue;
        }
        let r = dist(&images[i], &images[j]) / d;
        if r > best.ratio {
            best.ratio = r;
            best.witness = (i, j);
        }
    }
    best
}

/// `count` random index pairs with distinct members.
pub fn random_pairs(n: usize, count: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    (0..count)
        .map(|_| {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect()
}

pub fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_points_lie_in_the_complex() {
        let c = GeoComplex::triangle_boundary();
        let loc = crate::geom::PointLocator::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(loc.locate(&random_point(&c, &mut rng)).is_some());
        }
    }

    #[test]
    fn ratio_of_scaling() {
        let p = vec![vec![0.0], vec![1.0], vec![3.0]];
        let q: Vec<Vec<f64>> = p.iter().map(|x| scale(x, 2.5)).collect();
        let r = max_ratio(&p, &q, all_pairs(3));
        assert!((r.ratio - 2.5).abs() < 1e-12);
        assert_eq!(r.pairs, 3);
    }
}
