use super::{time_profile, ConeHomotopy, ConeMap, RadializationBundle};
use crate::cone::{BaseMap, ConePoint};
use crate::error::{Error, Result};
use crate::metric;

/// A cone map over `c([0,1]ⁿ)`.
#[derive(Clone, Debug)]
pub struct CubeMap {
    pub dim: usize,
    pub map: ConeMap,
}

impl CubeMap {
    pub fn new(dim: usize, map: ConeMap) -> Self {
        CubeMap { dim, map }
    }

    pub fn eval(&self, p: &ConePoint) -> Result<Vec<f64>> {
        if p.base.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.base.len() });
        }
        if p.base.iter().any(|x| !(-1e-12..=1.0 + 1e-12).contains(x)) {
            return Err(Error::OutsideDomain(p.base.clone()));
        }
        self.map.eval(p)
    }
}

/// `i₀∘p : (hx, h) ↦ (h·x₀, h)`.
pub fn unit_map(dim: usize, x0: Vec<f64>) -> CubeMap {
    let d = x0.len() + 1;
    CubeMap::new(dim, ConeMap::new(d, move |p| Ok(metric::cone_point(&x0, p.height))))
}

const HEIGHTS: [f64; 6] = [0.0, 0.5, 1.0, 3.0, 10.0, 40.0];

/// Points of `{0, 1/m, …, 1}ⁿ` with at least one coordinate 0 or 1.
pub(crate) fn boundary_lattice(n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let total = (m + 1).pow(n as u32);
    for k in 0..total {
        let mut r = k;
        let x: Vec<usize> = (0..n)
            .map(|_| {
                let c = r % (m + 1);
                r /= m + 1;
                c
            })
            .collect();
        if x.iter().any(|&c| c == 0 || c == m) {
            out.push(x.iter().map(|&c| c as f64 / m as f64).collect());
        }
    }
    out
}

fn boundary_residual(f: &CubeMap, x0: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in boundary_lattice(f.dim, 8) {
        for &h in &HEIGHTS {
            let y = f.eval(&ConePoint::new(x.clone(), h))?;
            worst = worst.max(metric::dist(&y, &metric::cone_point(x0, h)));
        }
    }
    Ok(worst)
}

fn check_boundary(f: &CubeMap, x0: &[f64]) -> Result<()> {
    let r = boundary_residual(f, x0)?;
    if r > 1e-9 {
        return Err(Error::BoundaryViolation(r));
    }
    Ok(())
}

/// `F∗G(y₁, …, yₙ, h)`: `F(2y₁, …)` for `y₁ ≤ h/2`, `G(2y₁ − h, …)` after,
/// in ambient cone coordinates.
pub fn cube_concat(f: &CubeMap, g: &CubeMap, x0: &[f64]) -> Result<CubeMap> {
    if f.dim != g.dim || f.dim == 0 {
        return Err(Error::DimensionMismatch { expected: f.dim, found: g.dim });
    }
    check_boundary(f, x0)?;
    check_boundary(g, x0)?;
    let (a, b) = (f.clone(), g.clone());
    let map = ConeMap::new(f.map.target_dim(), move |p| {
        let mut x = p.base.clone();
        if x[0] <= 0.5 {
            x[0] = (2.0 * x[0]).min(1.0);
            a.eval(&ConePoint::new(x, p.height))
        } else {
            x[0] = (2.0 * x[0] - 1.0).max(0.0);
            b.eval(&ConePoint::new(x, p.height))
        }
    });
    Ok(CubeMap::new(f.dim, map))
}

/// `Ψ([f]) = [c(f)]` for `f : ([0,1]ⁿ, ∂) → (X, x₀)`.
pub fn psi_map<M: BaseMap + 'static>(f: M, dim: usize, x0: &[f64]) -> Result<CubeMap> {
    let mut worst = 0.0f64;
    for x in boundary_lattice(dim, 8) {
        worst = worst.max(metric::dist(&f.eval(&x)?, x0));
    }
    if worst > 1e-9 {
        return Err(Error::BoundaryViolation(worst));
    }
    Ok(CubeMap::new(dim, ConeMap::radial(f)))
}

/// Output of [`pad_basepoint`]. Homotopies run over `τ ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct Padding {
    pub padded: CubeMap,
    /// From `f` to the padded map, fixing `c(D)`.
    pub padding: ConeHomotopy,
    /// From the padded map to a radial one, fixing `c(D)`; heights `≥ 1`.
    pub radialization: ConeHomotopy,
}

/// `ρ(h, τ)` of the radialization of a radial map: `h → √h → h`.
fn rho(h: f64, tau: f64) -> f64 {
    let e = time_profile(h);
    if tau <= 1.0 / 3.0 {
        h - 3.0 * tau * e
    } else if tau <= 2.0 / 3.0 {
        h.sqrt()
    } else {
        h.sqrt() + (3.0 * tau - 2.0) * e
    }
}

/// Squeezes `f` into the lower half `xₙ ≤ 1/2` and extends it constantly in
/// `xₙ`. `f` must be radial on `c(D)`, `D = [0,1]ⁿ⁻¹ × {1}`.
pub fn pad_basepoint(f: &CubeMap) -> Result<Padding> {
    let n = f.dim;
    if n == 0 {
        return Err(Error::InvalidInput("padding needs a cube of dimension at least 1".into()));
    }
    let mut worst = 0.0f64;
    for x in face_lattice(n, 8) {
        let unit = f.eval(&ConePoint::new(x.clone(), 1.0))?;
        for &h in &HEIGHTS {
            let y = f.eval(&ConePoint::new(x.clone(), h))?;
            worst = worst.max(metric::dist(&y, &metric::scale(&unit, h)) / h.max(1.0));
        }
    }
    if worst > 1e-9 {
        return Err(Error::NotRadial(worst));
    }

    let squeeze = move |x: &[f64], s: f64| {
        let mut y = x.to_vec();
        y[n - 1] = (s * y[n - 1]).min(1.0);
        y
    };
    let pf = f.clone();
    let padded = CubeMap::new(n, ConeMap::new(f.map.target_dim(), move |p| pf.eval(&ConePoint::new(squeeze(&p.base, 2.0), p.height))));
    let hf = f.clone();
    let padding = ConeHomotopy::new(|_| 1.0, move |p, t| hf.eval(&ConePoint::new(squeeze(&p.base, 1.0 + t), p.height)));

    let bundle = RadializationBundle::new(&padded.map, 1.0)?;
    let lower = bundle.composite();
    let uf = f.clone();
    let radialization = ConeHomotopy::new(
        |_| 1.0,
        move |p, t| {
            let xn = p.base[n - 1];
            if xn <= 0.5 {
                return lower.eval(p, t);
            }
            if p.height < 1.0 {
                return Err(Error::HeightOutOfRange(p.height));
            }
            // Measured from the seam xₙ = 1/2, where it equals the lower half.
            let s = 1.0 - 2.0 * (xn - 0.5);
            let r = if t <= 0.5 { rho(p.height, t * s) } else { rho(p.height, (1.0 - t) * s) };
            let mut top = p.base.clone();
            top[n - 1] = 1.0;
            Ok(metric::scale(&uf.eval(&ConePoint::new(top, 1.0))?, r))
        },
    );
    Ok(Padding { padded, padding, radialization })
}

fn face_lattice(n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..n - 1 {
        out = out.into_iter().flat_map(|x| (0..=m).map(move |c| [x.clone(), vec![c as f64 / m as f64]].concat())).collect();
    }
    out.into_iter().map(|mut x| {
        x.push(1.0);
        x
    }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{control_profile, FiniteNet};
    use crate::cone::{cone_lipschitz_bound, measure_radial_lipschitz, FnMap, PlMap};
    use crate::dyadic::DyadicPoint;
    use crate::geom::GeoComplex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const X0: [f64; 2] = [0.0, 0.0];

    /// The triangle boundary loop parametrized by `[0, 3]`.
    fn loop_map() -> PlMap {
        let seg = GeoComplex::from_maximal(
            (0..4).map(|k| DyadicPoint::from_ints(&[k])).collect(),
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
        )
        .unwrap();
        PlMap::new(seg, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    fn degree_one_loop() -> FnMap {
        let g = loop_map();
        FnMap::new(2, move |x| g.eval(&[3.0 * x[0]]))
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
    }

    #[test]
    fn boundary_lattice_counts() {
        assert_eq!(boundary_lattice(1, 8).len(), 2);
        assert_eq!(boundary_lattice(2, 4).len(), 25 - 9);
        assert_eq!(face_lattice(2, 4).len(), 5);
    }

    #[test]
    fn psi_of_constant_and_loop() {
        let c = psi_map(FnMap::constant(X0.to_vec()), 2, &X0).unwrap();
        let p = ConePoint::new(vec![0.3, 0.6], 7.0);
        assert_eq!(c.eval(&p).unwrap(), vec![0.0, 0.0, 7.0]);
        let l = psi_map(degree_one_loop(), 1, &X0).unwrap();
        assert!(close(&l.eval(&ConePoint::new(vec![1.0 / 3.0], 6.0)).unwrap(), &[6.0, 0.0, 6.0]));
        assert!(close(&l.eval(&ConePoint::new(vec![1.0], 6.0)).unwrap(), &[0.0, 0.0, 6.0]));
        assert!(matches!(psi_map(FnMap::identity(1), 1, &[0.0]), Err(Error::BoundaryViolation(_))));
    }

    #[test]
    fn psi_lipschitz_bound() {
        let seg = GeoComplex::from_maximal(vec![DyadicPoint::from_ints(&[0]), DyadicPoint::from_ints(&[1])], vec![vec![0, 1]]).unwrap();
        let f = degree_one_loop();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = measure_radial_lipschitz(&f, &seg, (0.0, 30.0), 4000, &mut rng).unwrap();
        // Base sup |x| = 1 and sup |f(x)| = 1, base Lipschitz 3·√2.
        assert!(m.measured <= cone_lipschitz_bound(3.0 * 2f64.sqrt(), 1.0) * (1.0 + 1e-6));
    }

    #[test]
    fn concat_with_unit() {
        let f = psi_map(degree_one_loop(), 1, &X0).unwrap();
        let e = unit_map(1, X0.to_vec());
        let fe = cube_concat(&f, &e, &X0).unwrap();
        for k in 0..=16 {
            let x = k as f64 / 16.0;
            let h = 5.0;
            let got = fe.eval(&ConePoint::new(vec![x], h)).unwrap();
            let want = if x <= 0.5 { f.eval(&ConePoint::new(vec![2.0 * x], h)).unwrap() } else { vec![0.0, 0.0, h] };
            assert!(close(&got, &want));
        }
        // Seam: both branches give the basepoint ray.
        let seam = fe.eval(&ConePoint::new(vec![0.5], 3.0)).unwrap();
        assert!(close(&seam, &[0.0, 0.0, 3.0]));
        assert_eq!(boundary_residual(&fe, &X0).unwrap(), 0.0);
        let bad = CubeMap::new(1, ConeMap::radial(FnMap::identity(2)));
        assert!(matches!(cube_concat(&bad, &e, &X0), Err(Error::BoundaryViolation(_))));
    }

    #[test]
    fn associativity_seams() {
        let f = psi_map(degree_one_loop(), 1, &X0).unwrap();
        let g = unit_map(1, X0.to_vec());
        let h = psi_map(FnMap::new(2, |x| Ok(vec![(std::f64::consts::PI * x[0]).sin() * 0.5, 0.0])), 1, &X0).unwrap();
        let left = cube_concat(&cube_concat(&f, &g, &X0).unwrap(), &h, &X0).unwrap();
        let right = cube_concat(&f, &cube_concat(&g, &h, &X0).unwrap(), &X0).unwrap();
        // Left runs f on [0, 1/4]; right on [0, 1/2].
        let p = ConePoint::new(vec![0.125], 8.0);
        assert!(close(&left.eval(&p).unwrap(), &f.eval(&ConePoint::new(vec![0.5], 8.0)).unwrap()));
        let q = ConePoint::new(vec![0.25], 8.0);
        assert!(close(&right.eval(&q).unwrap(), &f.eval(&ConePoint::new(vec![0.5], 8.0)).unwrap()));
        let pts: Vec<ConePoint> = (0..=32).flat_map(|i| (1..=8).map(move |j| ConePoint::new(vec![i as f64 / 32.0], 4.0 * j as f64))).collect();
        let net = FiniteNet::euclidean(pts.iter().map(ConePoint::ambient).collect());
        for m in [&left, &right] {
            let imgs: Vec<Vec<f64>> = pts.iter().map(|p| m.eval(p).unwrap()).collect();
            let prof = control_profile(&net, &imgs, &[1.0, 4.0, 16.0]).unwrap();
            assert!(prof.is_finite());
        }
    }

    #[test]
    fn padding_a_radial_map() {
        let f = CubeMap::new(2, ConeMap::radial(FnMap::new(2, |x| Ok(vec![x[0] * x[1], x[1] - x[0]]))));
        let pad = pad_basepoint(&f).unwrap();
        // Lower half pulls back through the doubling, upper half is constant in xₙ.
        let a = pad.padded.eval(&ConePoint::new(vec![0.3, 0.25], 6.0)).unwrap();
        assert!(close(&a, &f.eval(&ConePoint::new(vec![0.3, 0.5], 6.0)).unwrap()));
        let b = pad.padded.eval(&ConePoint::new(vec![0.3, 0.75], 6.0)).unwrap();
        let c = pad.padded.eval(&ConePoint::new(vec![0.3, 1.0], 6.0)).unwrap();
        assert!(close(&b, &c));
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            for x in [0.0, 0.4, 1.0] {
                let p = ConePoint::new(vec![x, 1.0], 9.0);
                let fd = f.eval(&p).unwrap();
                assert!(close(&pad.padding.eval(&p, t).unwrap(), &fd));
                assert!(close(&pad.radialization.eval(&p, t).unwrap(), &fd));
            }
        }
        let p = ConePoint::new(vec![0.2, 0.4], 4.0);
        assert!(close(&pad.padding.at_start(&p).unwrap(), &f.eval(&p).unwrap()));
        assert!(close(&pad.padding.at_end(&p).unwrap(), &pad.padded.eval(&p).unwrap()));
    }

    #[test]
    fn padding_radialization_is_continuous_at_the_seam() {
        let u = FnMap::new(2, |x| Ok(vec![x[0], x[0] * x[0]]));
        let f = CubeMap::new(
            1,
            ConeMap::new(3, move |p| {
                // Radial near xₙ = 1, twisted elsewhere.
                let y = metric::cone_point(&u.eval(&p.base)?, p.height);
                let w = (1.0 - p.base[0]) * (1.0 + p.height).ln().sin();
                Ok(vec![y[0] + w, y[1], y[2]])
            }),
        );
        let pad = pad_basepoint(&f).unwrap();
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            for h in [1.0, 4.0, 25.0] {
                let lo = pad.radialization.eval(&ConePoint::new(vec![0.5], h), t).unwrap();
                let hi = pad.radialization.eval(&ConePoint::new(vec![0.5 + 1e-9], h), t).unwrap();
                assert!(metric::dist(&lo, &hi) < 1e-6, "t={t} h={h}");
            }
        }
        let p = ConePoint::new(vec![0.2], 16.0);
        let end = pad.radialization.at_end(&p).unwrap();
        let unit = pad.radialization.at_end(&ConePoint::new(vec![0.2], 1.0)).unwrap();
        assert!(close(&end, &metric::scale(&unit, 16.0)));
    }

    #[test]
    fn padding_rejects_non_radial_face() {
        let f = CubeMap::new(1, ConeMap::spiral());
        assert!(matches!(pad_basepoint(&f), Err(Error::NotRadial(_))));
    }
}
