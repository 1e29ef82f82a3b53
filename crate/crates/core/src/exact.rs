//! Exact rational linear algebra on small dense matrices.

#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::DyadicPoint;

pub type Matrix = Vec<Vec<BigRational>>;

pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn point_to_rationals(p: &DyadicPoint) -> Vec<BigRational> {
    p.coords().iter().map(|c| c.to_rational()).collect()
}

/// Row-reduces a copy of `m` and returns its rank.
pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in c..cols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn determinant(m: &Matrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Solves the square system `a x = b`; `None` if singular.
pub fn solve(a: &Matrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(p, c);
        let pivot = m[c][c].clone();
        for j in c..=n {
            m[c][j] = &m[c][j] / &pivot;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn gram(vectors: &[Vec<BigRational>]) -> Matrix {
    vectors
        .iter()
        .map(|u| vectors.iter().map(|v| dot(u, v)).collect())
        .collect()
}

/// Edge vectors `p_i - p_0` of a point list.
pub fn edge_vectors(points: &[DyadicPoint]) -> Vec<Vec<BigRational>> {
    let base = point_to_rationals(&points[0]);
    points[1..]
        .iter()
        .map(|p| point_to_rationals(p).iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect()
}

pub fn affinely_independent(points: &[DyadicPoint]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let e = edge_vectors(points);
    rank(&e) == e.len()
}

/// Barycentric coordinates of `p` with respect to an affinely independent point list.
///
/// Returns `None` if `p` is not in the affine hull or the points are dependent.
pub fn barycentric(points: &[DyadicPoint], p: &DyadicPoint) -> Option<Vec<BigRational>> {
    let pts: Vec<Vec<BigRational>> = points.iter().map(point_to_rationals).collect();
    barycentric_rational(&pts, &point_to_rationals(p))
}

/// [`barycentric`] for rational coordinates.
pub fn barycentric_rational(points: &[Vec<BigRational>], p: &[BigRational]) -> Option<Vec<BigRational>> {
    if points.len() == 1 {
        return (points[0].as_slice() == p).then(|| vec![BigRational::one()]);
    }
    let base = &points[0];
    let e: Vec<Vec<BigRational>> =
        points[1..].iter().map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let g = gram(&e);
    let q: Vec<BigRational> = p.iter().zip(base).map(|(a, b)| a - b).collect();
    let rhs: Vec<BigRational> = e.iter().map(|v| dot(v, &q)).collect();
    let mu = solve(&g, &rhs)?;
    // Residual must vanish for p to lie in the affine hull.
    for (k, qk) in q.iter().enumerate() {
        let mut s = BigRational::zero();
        for (i, m) in mu.iter().enumerate() {
            s += m * &e[i][k];
        }
        if &s != qk {
            return None;
        }
    }
    let total = mu.iter().fold(BigRational::zero(), |a, b| a + b);
    let mut out = vec![BigRational::one() - total];
    out.extend(mu);
    Some(out)
}

/// Squared `n`-volume of a simplex via the Cayley–Menger determinant.
pub fn cayley_menger_volume_squared(points: &[DyadicPoint]) -> BigRational {
    let n = points.len() - 1;
    if n == 0 {
        return BigRational::one();
    }
    let size = n + 2;
    let mut m = vec![vec![BigRational::zero(); size]; size];
    for i in 1..size {
        m[0][i] = BigRational::one();
        m[i][0] = BigRational::one();
    }
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                m[i + 1][j + 1] = points[i].dist_squared(&points[j]).to_rational();
            }
        }
    }
    let det = determinant(&m);
    let mut fact = BigInt::one();
    for k in 2..=n {
        fact *= k;
    }
    let denom = BigRational::from_integer((BigInt::one() << n) * &fact * &fact);
    let sign = if (n + 1).is_multiple_of(2) { BigRational::one() } else { -BigRational::one() };
    sign * det / denom
}

/// Exact square root of a nonnegative rational, when it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

pub fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
