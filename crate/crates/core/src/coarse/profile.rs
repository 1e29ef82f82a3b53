use std::collections::BTreeSet;

use super::FiniteNet;
use crate::error::{Error, Result};
use crate::metric;

/// A staircase `R ↦ S(R)` sampled at a list of radii.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlModulus {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl ControlModulus {
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

fn check_images(net: &FiniteNet, images: &[Vec<f64>]) -> Result<()> {
    if images.len() != net.len() {
        return Err(Error::DimensionMismatch { expected: net.len(), found: images.len() });
    }
    Ok(())
}

/// `max |f(x) − f(y)|` over net pairs with `d(x, y) ≤ r`.
///
/// Closed balls make `S_{g∘f}(R) ≤ S_g(S_f(R))` hold exactly on samples.
pub fn modulus_at(net: &FiniteNet, images: &[Vec<f64>], r: f64) -> Result<f64> {
    check_images(net, images)?;
    Ok(metric::all_pairs(net.len())
        .filter(|&(i, j)| net.dist(i, j) <= r)
        .map(|(i, j)| metric::dist(&images[i], &images[j]))
        .fold(0.0, f64::max))
}

/// The magnitude of `f[D_R]` for each radius, where `images[i] = f(x_i)`.
pub fn control_profile(net: &FiniteNet, images: &[Vec<f64>], radii: &[f64]) -> Result<ControlModulus> {
    check_images(net, images)?;
    let pairs: Vec<(f64, f64)> = metric::all_pairs(net.len())
        .map(|(i, j)| (net.dist(i, j), metric::dist(&images[i], &images[j])))
        .collect();
    let values = radii
        .iter()
        .map(|&r| pairs.iter().filter(|(d, _)| *d <= r).map(|(_, e)| *e).fold(0.0, f64::max))
        .collect();
    Ok(ControlModulus { radii: radii.to_vec(), values })
}

/// Smallest `c` with `S(R) ≤ c·R + c` on the sampled radii.
pub fn fit_linear_control(m: &ControlModulus) -> f64 {
    m.radii.iter().zip(&m.values).map(|(r, s)| s / (r + 1.0)).fold(0.0, f64::max)
}

/// Diameter of `f⁻¹(B(center, r))` for each `r`.
pub fn properness_profile(
    net: &FiniteNet,
    images: &[Vec<f64>],
    center: &[f64],
    radii: &[f64],
) -> Result<ControlModulus> {
    check_images(net, images)?;
    let reach: Vec<f64> = images.iter().map(|y| metric::dist(y, center)).collect();
    let pairs: Vec<(f64, f64)> = metric::all_pairs(net.len())
        .map(|(i, j)| (reach[i].max(reach[j]), net.dist(i, j)))
        .collect();
    let values = radii
        .iter()
        .map(|&r| pairs.iter().filter(|(h, _)| *h <= r).map(|(_, d)| *d).fold(0.0, f64::max))
        .collect();
    Ok(ControlModulus { radii: radii.to_vec(), values })
}

/// `S(R) = max dist(x, A∩B)` over `x ∈ U_R(A) ∩ U_R(B)`; infinite when the
/// intersection is empty but the neighbourhoods meet.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcisiveProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

fn dist_to(net: &FiniteNet, set: &[usize]) -> Vec<f64> {
    (0..net.len()).map(|x| set.iter().map(|&a| net.dist(x, a)).fold(f64::INFINITY, f64::min)).collect()
}

pub fn excisive_profile(net: &FiniteNet, a: &[usize], b: &[usize], radii: &[f64]) -> Result<ExcisiveProfile> {
    let sa: BTreeSet<usize> = a.iter().copied().collect();
    let sb: BTreeSet<usize> = b.iter().copied().collect();
    if let Some(&bad) = sa.union(&sb).find(|&&i| i >= net.len()) {
        return Err(Error::InvalidInput(format!("index {bad} out of range")));
    }
    if sa.union(&sb).count() != net.len() {
        return Err(Error::InvalidInput("A ∪ B does not cover the net".into()));
    }
    let both: Vec<usize> = sa.intersection(&sb).copied().collect();
    let (da, db, dab) = (dist_to(net, a), dist_to(net, b), dist_to(net, &both));
    let values = radii
        .iter()
        .map(|&r| (0..net.len()).filter(|&x| da[x] <= r && db[x] <= r).map(|x| dab[x]).fold(0.0, f64::max))
        .collect();
    Ok(ExcisiveProfile { radii: radii.to_vec(), values })
}

/// Per radius: does `S` grow by more than 25% from the smaller net to the
/// larger one? Infinite values always count as divergent.
pub fn excisive_divergence(small: &ExcisiveProfile, large: &ExcisiveProfile) -> Result<Vec<bool>> {
    if small.radii != large.radii {
        return Err(Error::InvalidInput("profiles use different radii".into()));
    }
    Ok(small
        .values
        .iter()
        .zip(&large.values)
        .map(|(&s, &l)| !s.is_finite() || !l.is_finite() || l > 1.25 * s + 1e-12)
        .collect())
}
