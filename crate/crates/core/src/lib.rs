//! Reservoir water level estimation from a SAR scene and a DEM.
//!
//! The estimator floods the DEM at candidate levels, takes the shoreline of
//! the largest flooded component and scores it by the summed Canny gradient
//! magnitude of the (fused, despeckled) SAR image along that shoreline. A
//! coarse-to-fine sampling search picks the best-scoring level.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod error;
pub mod estimator;
pub mod floodsim;
pub mod metrics;
pub mod par;
pub mod preprocess;
pub mod raster;
pub mod scene;
pub mod synth;

pub use error::{Error, Result};
pub use estimator::{estimate_level, EstimateResult, EstimatorConfig};
pub use scene::Scene;
