use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::{Entourage, FiniteNet};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::metric;

/// Grid points `(i, t)` with `0 ≤ t ≤ p(i) + 1` over a finite net.
///
/// Each fibre holds the times `j·step` and `p(i) + 1 − j·step`, so the flip
/// permutes the grid exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderNet {
    base: FiniteNet,
    profile: Vec<Dyadic>,
    step: Dyadic,
    times: Vec<Vec<Dyadic>>,
}

/// Result of an exhaustive containment check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentCheck {
    pub checked: usize,
    pub violations: usize,
}

impl ContainmentCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

impl CylinderNet {
    /// Time step 1/4.
    pub fn new(base: FiniteNet, profile: &[f64]) -> Result<Self> {
        CylinderNet::with_step(base, profile, Dyadic::new(1, 2))
    }

    pub fn with_step(base: FiniteNet, profile: &[f64], step: Dyadic) -> Result<Self> {
        if profile.len() != base.len() {
            return Err(Error::DimensionMismatch { expected: base.len(), found: profile.len() });
        }
        if step <= Dyadic::zero() {
            return Err(Error::InvalidInput("time step must be positive".into()));
        }
        let mut exact = Vec::with_capacity(profile.len());
        for (i, &v) in profile.iter().enumerate() {
            match Dyadic::from_f64(v) {
                Some(d) if !d.is_negative() => exact.push(d),
                _ => return Err(Error::NegativeProfile { point: i, value: v }),
            }
        }
        let times = exact
            .iter()
            .map(|p| {
                let end = p + &Dyadic::one();
                let mut ts = Vec::new();
                let mut t = Dyadic::zero();
                while t <= end {
                    ts.push(t.clone());
                    ts.push(&end - &t);
                    t = &t + &step;
                }
                ts.sort();
                ts.dedup();
                ts
            })
            .collect();
        Ok(CylinderNet { base, profile: exact, step, times })
    }

    pub fn base(&self) -> &FiniteNet {
        &self.base
    }

    pub fn step(&self) -> &Dyadic {
        &self.step
    }

    pub fn profile(&self, i: usize) -> &Dyadic {
        &self.profile[i]
    }

    /// `p(i) + 1`.
    pub fn end(&self, i: usize) -> Dyadic {
        &self.profile[i] + &Dyadic::one()
    }

    pub fn times(&self, i: usize) -> &[Dyadic] {
        &self.times[i]
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, &Dyadic)> {
        self.times.iter().enumerate().flat_map(|(i, ts)| ts.iter().map(move |t| (i, t)))
    }

    pub fn len(&self) -> usize {
        self.times.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize, t: &Dyadic) -> bool {
        i < self.base.len() && !t.is_negative() && *t <= self.end(i)
    }

    fn check(&self, i: usize, t: &Dyadic) -> Result<()> {
        if self.contains(i, t) {
            Ok(())
        } else {
            Err(Error::OutsideCylinder { point: i, time: t.to_f64() })
        }
    }

    pub fn i0(&self, i: usize) -> (usize, Dyadic) {
        (i, Dyadic::zero())
    }

    pub fn i1(&self, i: usize) -> (usize, Dyadic) {
        (i, self.end(i))
    }

    pub fn q(&self, point: &(usize, Dyadic)) -> Result<usize> {
        self.check(point.0, &point.1)?;
        Ok(point.0)
    }

    /// `F(x, t) = (x, p(x) + 1 − t)`.
    pub fn flip(&self, i: usize, t: &Dyadic) -> Result<(usize, Dyadic)> {
        self.check(i, t)?;
        Ok((i, &self.end(i) - t))
    }

    /// The grid as a Euclidean net on `(coordinates, t)`.
    pub fn to_net(&self) -> FiniteNet {
        let pts = self.points().map(|(i, t)| metric::cone_point(self.base.point(i), t.to_f64())).collect();
        FiniteNet::euclidean(pts)
    }
}

/// Checks `F(M×N) ⊆ M×(p[M]+1−N)` over every grid pair with `(x, y) ∈ M` and
/// `(t, s) ∈ N`.
pub fn flip_containment(cyl: &CylinderNet, m: &Entourage, n: &[(Dyadic, Dyadic)]) -> Result<ContainmentCheck> {
    m.check_net(&cyl.base)?;
    let n_set: HashSet<&(Dyadic, Dyadic)> = n.iter().collect();
    let one = Dyadic::one();
    // p[M] + 1 − N as an explicit set of time pairs.
    let mut target = HashSet::new();
    for &(x, y) in m.pairs() {
        for (t, s) in n {
            target.insert((&(&cyl.profile[x] + &one) - t, &(&cyl.profile[y] + &one) - s));
        }
    }
    let mut out = ContainmentCheck { checked: 0, violations: 0 };
    for &(x, y) in m.pairs() {
        for t in cyl.times(x) {
            for s in cyl.times(y) {
                if !n_set.contains(&(t.clone(), s.clone())) {
                    continue;
                }
                let (fx, ft) = cyl.flip(x, t)?;
                let (fy, fs) = cyl.flip(y, s)?;
                out.checked += 1;
                if !(m.contains(fx, fy) && target.contains(&(ft, fs))) {
                    out.violations += 1;
                }
            }
        }
    }
    Ok(out)
}

type HomotopyFn = dyn Fn(usize, f64) -> Vec<f64> + Send + Sync;

/// A map on `I_p X` for a finite net `X`, evaluated at `(point index, time)`.
#[derive(Clone)]
pub struct NetHomotopy {
    profile: Vec<f64>,
    f: Arc<HomotopyFn>,
}

impl fmt::Debug for NetHomotopy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NetHomotopy").field("profile", &self.profile).finish_non_exhaustive()
    }
}

impl NetHomotopy {
    pub fn new(profile: Vec<f64>, f: impl Fn(usize, f64) -> Vec<f64> + Send + Sync + 'static) -> Result<Self> {
        if let Some((i, &v)) = profile.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::NegativeProfile { point: i, value: v });
        }
        Ok(NetHomotopy { profile, f: Arc::new(f) })
    }

    /// `H(x, t) = f₀(x)` for `t < 1` and `f₁(x)` afterwards, with `p ≡ 0`.
    pub fn from_close_maps(f0: Vec<Vec<f64>>, f1: Vec<Vec<f64>>) -> Result<Self> {
        if f0.len() != f1.len() {
            return Err(Error::DimensionMismatch { expected: f0.len(), found: f1.len() });
        }
        let n = f0.len();
        NetHomotopy::new(vec![0.0; n], move |i, t| if t < 1.0 { f0[i].clone() } else { f1[i].clone() })
    }

    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    pub fn end(&self, i: usize) -> f64 {
        self.profile[i] + 1.0
    }

    pub fn eval(&self, i: usize, t: f64) -> Result<Vec<f64>> {
        let end = self.end(i);
        if !(0.0..=end).contains(&t) {
            return Err(Error::TimeOutOfDomain { time: t, end });
        }
        Ok((self.f)(i, t))
    }

    pub fn start_map(&self, i: usize) -> Vec<f64> {
        (self.f)(i, 0.0)
    }

    pub fn end_map(&self, i: usize) -> Vec<f64> {
        (self.f)(i, self.end(i))
    }

    /// `H̄(x, t) = H(x, p(x) + 1 − t)`.
    pub fn reversed(&self) -> NetHomotopy {
        let (f, p) = (self.f.clone(), self.profile.clone());
        NetHomotopy { profile: self.profile.clone(), f: Arc::new(move |i, t| f(i, p[i] + 1.0 - t)) }
    }
}

/// `H + H′` on `I_{p+p′+1} X`: `H` up to `p(x) + 1`, then `H′` shifted.
pub fn concat_homotopies(h: &NetHomotopy, h2: &NetHomotopy, tol: f64) -> Result<NetHomotopy> {
    if h.len() != h2.len() {
        return Err(Error::DimensionMismatch { expected: h.len(), found: h2.len() });
    }
    let mut worst: Option<(usize, f64)> = None;
    for i in 0..h.len() {
        let d = metric::dist(&h.end_map(i), &h2.start_map(i));
        if d > tol && worst.is_none_or(|(_, w)| d > w) {
            worst = Some((i, d));
        }
    }
    if let Some((point, max_discrepancy)) = worst {
        return Err(Error::EndpointMismatch { point, max_discrepancy });
    }
    let profile = h.profile.iter().zip(&h2.profile).map(|(p, q)| p + q + 1.0).collect();
    let (a, b, p) = (h.f.clone(), h2.f.clone(), h.profile.clone());
    NetHomotopy::new(profile, move |i, t| if t <= p[i] + 1.0 { a(i, t) } else { b(i, t - (p[i] + 1.0)) })
}

/// Checks the two memberships behind gluing a map along `t = split(x)` on
/// `I_{p+q} X = A ∪ B`.
///
/// For `(x, s) ∈ A`, `(y, t) ∈ B` with `(x, y) ∈ M₁` and `|s − t| ≤ r`, both
/// `(split(y), t)` and `(split(y), s)` must lie in `Z(split[M₁]) ∘ M₂`, where
/// `M₂ = {|s − t| ≤ r}`. `M₁` should be symmetric and contain the diagonal.
pub fn check_split_containment(
    cyl: &CylinderNet,
    split: &[f64],
    m1: &Entourage,
    r: &Dyadic,
) -> Result<ContainmentCheck> {
    m1.check_net(&cyl.base)?;
    if split.len() != cyl.base.len() {
        return Err(Error::DimensionMismatch { expected: cyl.base.len(), found: split.len() });
    }
    let mut p = Vec::with_capacity(split.len());
    for (i, &v) in split.iter().enumerate() {
        match Dyadic::from_f64(v) {
            Some(d) if !d.is_negative() && d <= cyl.end(i) => p.push(d),
            _ => return Err(Error::OutsideCylinder { point: i, time: v }),
        }
    }
    // Intervals [a, b] spanned by the pairs of split[M₁].
    let intervals: Vec<(Dyadic, Dyadic)> = m1
        .pairs()
        .iter()
        .map(|&(x, y)| (p[x].clone().min(p[y].clone()), p[x].clone().max(p[y].clone())))
        .collect();
    let member = |u: &Dyadic, w: &Dyadic| {
        intervals.iter().any(|(a, b)| {
            let gap = if w < a { a - w } else if w > b { w - b } else { Dyadic::zero() };
            a <= u && u <= b && gap <= *r
        })
    };
    let mut out = ContainmentCheck { checked: 0, violations: 0 };
    for &(x, y) in m1.pairs() {
        for s in cyl.times(x).iter().filter(|s| **s <= p[x]) {
            for t in cyl.times(y).iter().filter(|t| **t >= p[y]) {
                if (s - t).abs() > *r {
                    continue;
                }
                out.checked += 1;
                if !(member(&p[y], t) && member(&p[y], s)) {
                    out.violations += 1;
                }
            }
        }
    }
    Ok(out)
}

/// A homotopy reparametrized onto `I_{p₀} X` with `p₀ = d(·, x₀)`.
#[derive(Clone, Debug)]
pub struct NormalizedHomotopy {
    pub homotopy: NetHomotopy,
    pub lipschitz: f64,
    /// `C = L + q(x₀)`.
    pub offset: f64,
    /// `q′ = C + L·p₀ ≥ q`.
    pub extended_profile: Vec<f64>,
}

impl NormalizedHomotopy {
    /// `Ψ(x, t)`: `(C+1)t` up to 1, then `C + 1 + L(t − 1)`.
    pub fn psi(&self, t: f64) -> f64 {
        psi(self.offset, self.lipschitz, t)
    }
}

fn psi(c: f64, l: f64, t: f64) -> f64 {
    if t <= 1.0 {
        (c + 1.0) * t
    } else {
        c + 1.0 + l * (t - 1.0)
    }
}

/// Moves `H` over `I_q X` onto the standard cylinder of `x₀`.
///
/// With `l = None` the smallest `L` with `|q(x) − q(y)| ≤ L·d(x, y) + L` on
/// the net is used; a given `L` is checked against every pair.
pub fn normalize_homotopy(
    h: &NetHomotopy,
    net: &FiniteNet,
    x0: usize,
    l: Option<f64>,
) -> Result<NormalizedHomotopy> {
    if h.len() != net.len() {
        return Err(Error::DimensionMismatch { expected: net.len(), found: h.len() });
    }
    if x0 >= net.len() {
        return Err(Error::InvalidInput(format!("base point {x0} out of range")));
    }
    let q = h.profile();
    let fit = |i: usize, j: usize| (q[i] - q[j]).abs() / (net.dist(i, j) + 1.0);
    let l = match l {
        Some(l) => {
            if let Some((i, j)) = metric::all_pairs(net.len()).find(|&(i, j)| fit(i, j) > l) {
                return Err(Error::LipschitzFit(i, j));
            }
            l
        }
        None => metric::all_pairs(net.len()).map(|(i, j)| fit(i, j)).fold(f64::MIN_POSITIVE, f64::max),
    };
    let c = l + q[x0];
    let p0: Vec<f64> = (0..net.len()).map(|i| net.dist(i, x0)).collect();
    let extended_profile: Vec<f64> = p0.iter().map(|d| c + l * d).collect();
    let inner = h.clone();
    let homotopy = NetHomotopy::new(p0, move |i, t| {
        let tau = psi(c, l, t).min(inner.end(i));
        (inner.f)(i, tau)
    })?;
    Ok(NormalizedHomotopy { homotopy, lipschitz: l, offset: c, extended_profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quarter(k: i64) -> Dyadic {
        Dyadic::new(k, 2)
    }

    fn net_and_profile(n: usize, rng: &mut impl Rng) -> (FiniteNet, Vec<f64>) {
        let net = FiniteNet::euclidean((0..n).map(|_| vec![rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)]).collect());
        let p = (0..n).map(|_| rng.random_range(0..16) as f64 / 8.0).collect();
        (net, p)
    }

    #[test]
    fn zero_profile_is_unit_interval_grid() {
        let net = FiniteNet::real_grid(3, 1.0);
        let cyl = CylinderNet::new(net, &[0.0; 4]).unwrap();
        assert!(cyl.points().all(|(_, t)| *t <= Dyadic::one()));
        assert_eq!(cyl.times(0), &[quarter(0), quarter(1), quarter(2), quarter(3), quarter(4)]);
        assert_eq!(cyl.len(), 20);
    }

    #[test]
    fn inclusions_and_projection() {
        let net = FiniteNet::real_grid(4, 0.5);
        let cyl = CylinderNet::new(net, &[0.0, 0.5, 1.25, 3.0, 0.3]).unwrap();
        for i in 0..5 {
            assert_eq!(cyl.q(&cyl.i0(i)).unwrap(), i);
            assert_eq!(cyl.q(&cyl.i1(i)).unwrap(), i);
            assert_eq!(cyl.flip(i, &Dyadic::zero()).unwrap(), cyl.i1(i));
        }
        let past = &cyl.end(2) + &Dyadic::new(1, 20);
        assert!(matches!(cyl.q(&(2, past)), Err(Error::OutsideCylinder { point: 2, .. })));
        assert!(matches!(
            CylinderNet::new(FiniteNet::real_grid(1, 1.0), &[0.0, -0.5]),
            Err(Error::NegativeProfile { point: 1, .. })
        ));
    }

    #[test]
    fn flip_is_an_involution_on_the_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (net, p) = net_and_profile(50, &mut rng);
        let cyl = CylinderNet::new(net, &p).unwrap();
        for (i, t) in cyl.points() {
            let (j, s) = cyl.flip(i, t).unwrap();
            assert!(cyl.times(j).contains(&s));
            assert_eq!(cyl.flip(j, &s).unwrap(), (i, t.clone()));
        }
    }

    #[test]
    fn flip_containment_on_fifty_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (net, p) = net_and_profile(50, &mut rng);
        let m = net.r_entourage(1.0, false);
        let cyl = CylinderNet::new(net, &p).unwrap();
        let n: Vec<(Dyadic, Dyadic)> = (0..40).map(|_| (quarter(rng.random_range(0..12)), quarter(rng.random_range(0..12)))).collect();
        let check = flip_containment(&cyl, &m, &n).unwrap();
        assert!(check.checked > 0 && check.holds());
    }

    fn line_homotopy(n: usize, p: Vec<f64>) -> NetHomotopy {
        NetHomotopy::new(p, move |i, t| vec![i as f64, t * (n as f64)]).unwrap()
    }

    #[test]
    fn concat_endpoints() {
        let p = vec![0.0, 0.5, 2.0];
        let h = line_homotopy(1, p.clone());
        let top: Vec<Vec<f64>> = (0..3).map(|i| h.end_map(i)).collect();
        let constant = NetHomotopy::new(vec![1.0, 0.0, 0.25], move |i, _| top[i].clone()).unwrap();
        let hh = concat_homotopies(&h, &constant, 0.0).unwrap();
        assert_eq!(hh.profile(), &[2.0, 1.5, 3.25]);
        for i in 0..3 {
            assert_eq!(hh.start_map(i), h.start_map(i));
            assert_eq!(hh.end_map(i), constant.end_map(i));
            assert_eq!(hh.eval(i, hh.end(i) - 0.25).unwrap(), h.end_map(i));
        }
        assert!(hh.eval(0, 3.5).is_err());
        let other = line_homotopy(1, vec![0.0; 3]);
        match concat_homotopies(&h, &other, 0.0) {
            Err(Error::EndpointMismatch { point, max_discrepancy }) => {
                assert_eq!(point, 2);
                assert_eq!(max_discrepancy, 3.0);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn reversal_swaps_endpoints() {
        let h = line_homotopy(2, vec![0.5, 1.0]);
        let r = h.reversed();
        for i in 0..2 {
            assert_eq!(r.start_map(i), h.end_map(i));
            assert_eq!(r.end_map(i), h.start_map(i));
        }
        let c = NetHomotopy::from_close_maps(vec![vec![0.0]], vec![vec![1.0]]).unwrap();
        assert_eq!((c.eval(0, 0.75).unwrap(), c.end_map(0)), (vec![0.0], vec![1.0]));
    }

    #[test]
    fn split_containment_for_concatenation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let net = FiniteNet::real_grid(12, 0.5);
            let p: Vec<f64> = (0..13).map(|i| 0.5 * i as f64 + rng.random_range(0..3) as f64 * 0.25).collect();
            let p2: Vec<f64> = (0..13).map(|_| rng.random_range(0..8) as f64 * 0.25).collect();
            let total: Vec<f64> = p.iter().zip(&p2).map(|(a, b)| a + b + 1.0).collect();
            let split: Vec<f64> = p.iter().map(|a| a + 1.0).collect();
            let m1 = net.r_entourage(1.0, false);
            let cyl = CylinderNet::new(net, &total).unwrap();
            let check = check_split_containment(&cyl, &split, &m1, &Dyadic::from_int(1)).unwrap();
            assert!(check.checked > 100 && check.holds(), "{check:?}");
        }
    }

    #[test]
    fn normalization_endpoints_and_psi() {
        let net = FiniteNet::real_grid(10, 1.0);
        let q: Vec<f64> = (0..11).map(|i| 0.5 * i as f64 + 1.0).collect();
        let h = NetHomotopy::new(q.clone(), |i, t| vec![i as f64 + t]).unwrap();
        let n = normalize_homotopy(&h, &net, 0, None).unwrap();
        assert!(n.lipschitz <= 0.5 + 1e-12);
        assert_eq!(n.psi(0.0), 0.0);
        assert_eq!(n.psi(1.0), n.offset + 1.0);
        for (i, &qi) in q.iter().enumerate() {
            let top = n.homotopy.end(i);
            assert_eq!(n.psi(top), n.extended_profile[i] + 1.0);
            assert!(qi <= n.extended_profile[i]);
            assert_eq!(n.homotopy.start_map(i), h.start_map(i));
            assert!((n.homotopy.end_map(i)[0] - h.end_map(i)[0]).abs() < 1e-12);
        }
        assert_eq!(normalize_homotopy(&h, &net, 0, Some(0.1)).unwrap_err(), Error::LipschitzFit(0, 1));
    }

    proptest! {
        #[test]
        fn flip_containment_random(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (net, p) = net_and_profile(12, &mut rng);
            let m = Entourage::new(&net, (0..20).map(|_| (rng.random_range(0..12), rng.random_range(0..12)))).unwrap();
            let cyl = CylinderNet::new(net, &p).unwrap();
            let n: Vec<(Dyadic, Dyadic)> = (0..20).map(|_| (quarter(rng.random_range(0..14)), quarter(rng.random_range(0..14)))).collect();
            prop_assert!(flip_containment(&cyl, &m, &n).unwrap().holds());
        }
    }
}
