use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::Serialize;

/// Validated settings for one scenario run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub scenario: String,
    pub inputs: Vec<PathBuf>,
    pub height: i64,
    pub density: usize,
    pub samples: usize,
    pub radii: Vec<f64>,
    /// Relative slack on measured ratios.
    pub tol: f64,
    /// Absolute tolerance on identities between maps.
    pub residual_tol: f64,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: String::new(),
            inputs: Vec::new(),
            height: 1,
            density: 4,
            samples: 10_000,
            radii: Vec::new(),
            tol: 1e-6,
            residual_tol: 1e-9,
            seed: None,
            outputs: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn validate(self) -> Result<Self> {
        if [self.tol, self.residual_tol].iter().any(|t| t.is_nan() || *t <= 0.0) {
            bail!("tolerances must be positive, got {} and {}", self.tol, self.residual_tol);
        }
        if self.height < 1 {
            bail!("height must be at least 1, got {}", self.height);
        }
        if self.density == 0 || self.samples == 0 {
            bail!("grid density and sample counts must be positive");
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) || self.radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
            bail!("radii must be finite, non-negative and strictly increasing: {:?}", self.radii);
        }
        Ok(self)
    }

    /// The seed, which every sampled scenario has to be given.
    pub fn seed(&self) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("scenario `{}` samples randomly and needs --seed", self.scenario),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_settings() {
        assert!(RunConfig { radii: vec![1.0, 2.0, 4.0], ..Default::default() }.validate().is_ok());
        assert!(RunConfig { radii: vec![1.0, 1.0], ..Default::default() }.validate().is_err());
        assert!(RunConfig { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(RunConfig { height: 0, ..Default::default() }.validate().is_err());
        assert!(RunConfig::default().seed().is_err());
    }
}
