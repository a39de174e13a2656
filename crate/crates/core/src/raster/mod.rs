//! Raster and vector primitives: grids, georeferencing, file I/O, polygon
//! rasterization, mask dilation, region statistics and grid alignment.
//!
//! All inputs are expected in one projected CRS with meter units; nothing
//! here reprojects.

mod align;
mod dilate;
mod geojson;
mod geotiff;
mod grid;
mod polygon;
mod stats;
mod transform;

pub use align::{align_to, Resampling};
pub use dilate::dilate_mask;
pub use geojson::{load_polygon, polygon_from_value, polygon_to_value, write_polygon};
pub use geotiff::{load_raster, write_raster};
pub use grid::{Raster, RegionMask};
pub use polygon::{rasterize_polygon, Polygon};
pub use stats::{clip_stats, RegionStats};
pub use transform::{GeoTransform, Grid};
