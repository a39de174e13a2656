use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grid::{Raster, RegionMask};

/// Summary of the valid samples under a mask. `stddev` is the population
/// standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

pub fn clip_stats(raster: &Raster, mask: &RegionMask) -> Result<RegionStats> {
    raster.grid().ensure_same(&mask.grid(), "clip_stats")?;
    let mut count = 0usize;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let samples = || {
        raster
            .values()
            .iter()
            .zip(mask.bits())
            .filter(|&(&v, &m)| m && raster.is_valid(v))
            .map(|(&v, _)| v)
    };
    for v in samples() {
        count += 1;
        sum += v;
        min = min.min(v);
        max = max.max(v);
    }
    if count == 0 {
        return Err(Error::EmptyRegion("no valid samples under the mask".into()));
    }
    let mean = (sum / count as f64).clamp(min, max);
    let var = samples().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    Ok(RegionStats {
        min,
        max,
        mean,
        stddev: var.sqrt(),
        count,
    })
}
