use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floodsim::Connectivity;

/// Tunables for preprocessing and the level search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Candidate levels sampled per iteration.
    pub sample_num: usize,
    /// Search stops once the candidate spacing is at or below this (m).
    pub tolerance: f64,
    /// Focal median radius in pixels.
    pub speckle_radius: usize,
    pub gaussian_sigma: f64,
    /// AOI expansion in map units (m).
    pub buffer_distance: f64,
    pub connectivity: Connectivity,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            sample_num: 9,
            tolerance: 1.0,
            speckle_radius: 3,
            gaussian_sigma: 1.0,
            buffer_distance: 500.0,
            connectivity: Connectivity::Eight,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        // with 3 samples the refined bracket is as wide as the old one and
        // the search never converges
        if self.sample_num < 4 {
            return Err(Error::param(format!(
                "sample_num must be at least 4, got {}",
                self.sample_num
            )));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::param(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if !(self.gaussian_sigma > 0.0) || !self.gaussian_sigma.is_finite() {
            return Err(Error::param(format!(
                "gaussian sigma must be > 0, got {}",
                self.gaussian_sigma
            )));
        }
        if !(self.buffer_distance >= 0.0) || !self.buffer_distance.is_finite() {
            return Err(Error::param(format!(
                "buffer distance must be >= 0, got {}",
                self.buffer_distance
            )));
        }
        Ok(())
    }
}
