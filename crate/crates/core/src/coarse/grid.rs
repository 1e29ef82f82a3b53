use std::collections::BTreeSet;

use super::{Entourage, FiniteNet};
use crate::error::{Error, Result};

/// An entourage produced on a finite grid, with the number of result pairs
/// that fell outside the grid and were dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Clipped {
    pub entourage: Entourage,
    pub dropped: usize,
}

fn grid_len(net: &FiniteNet, ms: &[&Entourage]) -> Result<usize> {
    net.grid_step()?;
    for m in ms {
        m.check_net(net)?;
    }
    Ok(net.len())
}

/// All grid pairs `(u, v)` with `x ≤ u, v ≤ y` for some `(x, y) ∈ M`.
///
/// Grid values increase with the index, so comparisons use indices. Pairs
/// with `x > y` sandwich nothing.
pub fn z_operator(m: &Entourage, net: &FiniteNet) -> Result<Entourage> {
    let n = grid_len(net, &[m])?;
    // reach[x]: largest y paired with x (as an interval start).
    let mut reach: Vec<Option<usize>> = vec![None; n];
    for &(x, y) in m.pairs() {
        if x <= y {
            reach[x] = Some(reach[x].map_or(y, |r| r.max(y)));
        }
    }
    let mut pairs = BTreeSet::new();
    for u in 0..n {
        // Intervals containing u are those [x, reach[x]] with x ≤ u ≤ reach[x].
        let starts = (0..=u).filter(|&x| reach[x].is_some_and(|r| r >= u));
        let Some(lo) = starts.clone().next() else { continue };
        let hi = starts.filter_map(|x| reach[x]).max().expect("non-empty");
        pairs.extend((lo..=hi).map(|v| (u, v)));
    }
    Ok(Entourage { tag: m.tag, pairs })
}

/// `M + N = {(u+x, v+y)}`, clipped to the grid.
pub fn plus(m: &Entourage, other: &Entourage, net: &FiniteNet) -> Result<Clipped> {
    let n = grid_len(net, &[m, other])?;
    let mut pairs = BTreeSet::new();
    let mut dropped = BTreeSet::new();
    for &(u, v) in m.pairs() {
        for &(x, y) in other.pairs() {
            let p = (u + x, v + y);
            if p.0 < n && p.1 < n {
                pairs.insert(p);
            } else {
                dropped.insert(p);
            }
        }
    }
    Ok(Clipped { entourage: Entourage { tag: m.tag, pairs }, dropped: dropped.len() })
}

/// `M − N = {(u−x, v−y) | u ≥ x, v ≥ y}`; never leaves the grid.
pub fn minus(m: &Entourage, other: &Entourage, net: &FiniteNet) -> Result<Clipped> {
    grid_len(net, &[m, other])?;
    let mut pairs = BTreeSet::new();
    for &(u, v) in m.pairs() {
        for &(x, y) in other.pairs() {
            if u >= x && v >= y {
                pairs.insert((u - x, v - y));
            }
        }
    }
    Ok(Clipped { entourage: Entourage { tag: m.tag, pairs }, dropped: 0 })
}

/// `{(x+a, y+a) | a ≥ 0}` over grid offsets `a`, clipped to the grid.
pub fn translate(m: &Entourage, net: &FiniteNet) -> Result<Clipped> {
    let n = grid_len(net, &[m])?;
    let mut pairs = BTreeSet::new();
    let mut dropped = BTreeSet::new();
    for &(x, y) in m.pairs() {
        for a in 0..n {
            let p = (x + a, y + a);
            if p.0 < n && p.1 < n {
                pairs.insert(p);
            } else {
                dropped.insert(p);
            }
        }
    }
    Ok(Clipped { entourage: Entourage { tag: m.tag, pairs }, dropped: dropped.len() })
}

/// `f[M]` for a map sending point `i` of the source net to grid index `f[i]`.
pub fn image_entourage(m: &Entourage, f: &[usize], grid: &FiniteNet) -> Result<Entourage> {
    grid.grid_step()?;
    if let Some(bad) = f.iter().find(|&&i| i >= grid.len()) {
        return Err(Error::InvalidInput(format!("grid index {bad} out of range")));
    }
    let pairs = m.pairs().iter().map(|&(a, b)| (f[a], f[b])).collect();
    Ok(Entourage { tag: grid.tag, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_z(m: &Entourage, n: usize) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for u in 0..n {
            for v in 0..n {
                if m.pairs().iter().any(|&(x, y)| x <= u && u <= y && x <= v && v <= y) {
                    out.insert((u, v));
                }
            }
        }
        out
    }

    #[test]
    fn z_examples() {
        let net = FiniteNet::real_grid(5, 1.0);
        let m = Entourage::new(&net, [(1, 4)]).unwrap();
        let z = z_operator(&m, &net).unwrap();
        assert_eq!(z.len(), 16);
        assert!(z.pairs().iter().all(|&(u, v)| (1..=4).contains(&u) && (1..=4).contains(&v)));
        assert_eq!(z_operator(&net.diagonal(), &net).unwrap(), net.diagonal());
        assert_eq!(z_operator(&z, &net).unwrap(), z);
        let plain = FiniteNet::euclidean(vec![vec![0.0], vec![1.0]]);
        assert_eq!(z_operator(&plain.diagonal(), &plain), Err(Error::NotRealGrid));
    }

    #[test]
    fn plus_minus_translate_examples() {
        let net = FiniteNet::real_grid(9, 0.5);
        let m = Entourage::new(&net, [(1, 3), (2, 2), (4, 0)]).unwrap();
        let zero = Entourage::new(&net, [(0, 0)]).unwrap();
        assert_eq!(plus(&m, &zero, &net).unwrap().entourage, m);
        let mm = minus(&m, &m, &net).unwrap().entourage;
        assert!(m.pairs().iter().all(|&(u, v)| mm.contains(u - u, v - v)));
        assert!(mm.contains(0, 0));
        let t = translate(&m, &net).unwrap();
        assert!(t.entourage.contains(7, 9) && t.entourage.contains(9, 5) && t.dropped > 0);
    }

    proptest! {
        #[test]
        fn z_matches_brute_force_and_is_idempotent(seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..40);
            let net = FiniteNet::real_grid(n - 1, 0.25);
            let k = rng.random_range(0..8);
            let m = Entourage::new(&net, (0..k).map(|_| (rng.random_range(0..n), rng.random_range(0..n)))).unwrap();
            let z = z_operator(&m, &net).unwrap();
            prop_assert_eq!(z.pairs(), &brute_z(&m, n));
            prop_assert_eq!(z_operator(&z, &net).unwrap(), z);
        }

        #[test]
        fn plus_magnitude_is_subadditive(seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let net = FiniteNet::real_grid(60, 1.0);
            let mk = |rng: &mut ChaCha8Rng| Entourage::new(&net, (0..6).map(|_| (rng.random_range(0..30), rng.random_range(0..30)))).unwrap();
            let (m, n2) = (mk(&mut rng), mk(&mut rng));
            let s = plus(&m, &n2, &net).unwrap();
            prop_assert_eq!(s.dropped, 0);
            prop_assert!(s.entourage.magnitude(&net).unwrap() <= m.magnitude(&net).unwrap() + n2.magnitude(&net).unwrap());
        }
    }
}
