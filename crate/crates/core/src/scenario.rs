//! Seeded fixture maps shared by the command line and the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coarse::FiniteNet;
use crate::cone::{FnMap, PlMap};
use crate::dyadic::DyadicPoint;
use crate::error::{Error, Result};
use crate::geom::GeoComplex;
use crate::metric;
use crate::radialize::ConeMap;

const CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// The triangle boundary traversed once per unit of `s`-length 3, starting at
/// the origin.
pub fn loop_point(s: f64) -> Vec<f64> {
    let s = s.rem_euclid(3.0);
    let k = (s.floor() as usize).min(2);
    metric::lerp(&CORNERS[k], &CORNERS[(k + 1) % 3], s - k as f64)
}

/// Inverse of [`loop_point`] on the triangle boundary.
pub fn loop_parameter(x: &[f64]) -> Result<f64> {
    let tol = 1e-9;
    if x.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: x.len() });
    }
    if x[1].abs() <= tol && (-tol..=1.0 + tol).contains(&x[0]) {
        Ok(x[0].clamp(0.0, 1.0))
    } else if (x[0] + x[1] - 1.0).abs() <= tol && (-tol..=1.0 + tol).contains(&x[1]) {
        Ok(1.0 + x[1].clamp(0.0, 1.0))
    } else if x[0].abs() <= tol && (-tol..=1.0 + tol).contains(&x[1]) {
        Ok(2.0 + (1.0 - x[1]).clamp(0.0, 1.0))
    } else {
        Err(Error::OutsideDomain(x.to_vec()))
    }
}

/// A degree one loop `([0,1], ∂) → (triangle boundary, 0)`.
pub fn triangle_loop() -> FnMap {
    FnMap::new(2, |x| Ok(loop_point(3.0 * x[0])))
}

/// The one-point base complex `{0} ⊂ ℝ`, whose cone is a ray.
pub fn point_base() -> GeoComplex {
    GeoComplex::from_maximal(vec![DyadicPoint::from_ints(&[0])], vec![vec![0]]).expect("a point is a complex")
}

/// The square `[-1,1]²` boundary.
pub fn square_boundary() -> GeoComplex {
    let v = [[-1, -1], [1, -1], [1, 1], [-1, 1]].iter().map(|p| DyadicPoint::from_ints(p)).collect();
    GeoComplex::from_maximal(v, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).expect("square boundary is valid")
}

/// `(h·γ(s), h) ↦ (h·γ(s + ε·log(1+h)), h)` on the cone over the triangle
/// boundary: a radial map spun along the loop, landing in the same cone.
pub fn spun_loop_map(eps: f64) -> ConeMap {
    ConeMap::new(3, move |p| {
        let s = loop_parameter(&p.base)?;
        Ok(metric::cone_point(&loop_point(s + eps * (1.0 + p.height).ln()), p.height))
    })
}

/// `count` piecewise-affine maps from the triangle boundary into `[-2,2]²`.
pub fn seeded_base_maps(seed: u64, count: usize) -> Vec<PlMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let images = (0..3).map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
            PlMap::new(GeoComplex::triangle_boundary(), images).expect("three images for three vertices")
        })
        .collect()
}

/// A twisted radial map over the triangle boundary with a seeded base map and
/// twist in `[0.2, 1]`.
pub fn seeded_twisted_map(seed: u64) -> ConeMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let twist = rng.random_range(0.2..=1.0);
    let u = seeded_base_maps(rng.random(), 1).pop().expect("one map");
    ConeMap::twisted(u, twist).expect("planar base map")
}

/// The grid `{-n..n}²` split into the closed upper and lower half planes.
pub fn half_plane_grid(n: i64) -> (FiniteNet, Vec<usize>, Vec<usize>) {
    let mut pts = Vec::new();
    for x in -n..=n {
        for y in -n..=n {
            pts.push(vec![x as f64, y as f64]);
        }
    }
    let a = (0..pts.len()).filter(|&i| pts[i][1] >= 0.0).collect();
    let b = (0..pts.len()).filter(|&i| pts[i][1] <= 0.0).collect();
    (FiniteNet::euclidean(pts), a, b)
}

/// Two parallel rays at distance 1 joined at the origin end: `A` is the lower
/// ray, `B` the upper ray plus the joining point, and `A ∩ B` is the corner.
pub fn parallel_rays(n: usize) -> (FiniteNet, Vec<usize>, Vec<usize>) {
    let mut pts = Vec::new();
    for x in 0..=n {
        pts.push(vec![x as f64, 0.0]);
    }
    for x in 0..=n {
        pts.push(vec![x as f64, 1.0]);
    }
    pts.push(vec![0.0, 0.5]);
    let a = (0..=n).collect();
    let mut b: Vec<usize> = (n + 1..pts.len()).collect();
    b.push(0);
    (FiniteNet::euclidean(pts), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{BaseMap, ConePoint};

    #[test]
    fn loop_round_trip() {
        for k in 0..30 {
            let s = k as f64 * 0.1;
            let x = loop_point(s);
            assert!((loop_parameter(&x).unwrap() - s).abs() < 1e-12 || s == 0.0);
        }
        assert_eq!(loop_point(3.0), vec![0.0, 0.0]);
        assert!(loop_parameter(&[0.5, 0.5 + 1e-3]).is_err());
        let l = triangle_loop();
        assert_eq!(l.eval(&[0.0]).unwrap(), l.eval(&[1.0]).unwrap());
    }

    #[test]
    fn spun_map_stays_on_the_cone() {
        let f = spun_loop_map(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = GeoComplex::triangle_boundary();
        for _ in 0..200 {
            let p = ConePoint::new(metric::random_point(&c, &mut rng), rng.random_range(0.0..20.0));
            let y = ConePoint::from_ambient(&f.eval(&p).unwrap());
            assert!((y.height - p.height).abs() < 1e-12);
            if p.height > 0.0 {
                assert!(loop_parameter(&y.base).is_ok());
            }
        }
    }

    #[test]
    fn seeded_maps_are_deterministic() {
        let a = seeded_base_maps(7, 3);
        let b = seeded_base_maps(7, 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.vertex_images(), y.vertex_images());
        }
        let p = ConePoint::new(vec![0.5, 0.0], 3.0);
        assert_eq!(seeded_twisted_map(1).eval(&p).unwrap(), seeded_twisted_map(1).eval(&p).unwrap());
    }
}
