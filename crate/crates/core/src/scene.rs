use std::path::Path;

use crate::error::Result;
use crate::raster::{load_polygon, load_raster, Polygon, Raster};

/// One dated observation: both SAR polarizations, the DEM on the same grid
/// and the reservoir outline.
#[derive(Clone, Debug)]
pub struct Scene {
    pub id: String,
    pub vv: Raster,
    pub vh: Raster,
    pub dem: Raster,
    pub aoi: Polygon,
    /// Known water level (m) for calibration or evaluation.
    pub reference_level: Option<f64>,
}

impl Scene {
    /// Loads the four inputs as-is; the DEM must already share the SAR grid.
    pub fn load(
        id: impl Into<String>,
        vv: impl AsRef<Path>,
        vh: impl AsRef<Path>,
        dem: impl AsRef<Path>,
        aoi: impl AsRef<Path>,
    ) -> Result<Scene> {
        Ok(Scene {
            id: id.into(),
            vv: load_raster(vv)?,
            vh: load_raster(vh)?,
            dem: load_raster(dem)?,
            aoi: load_polygon(aoi)?,
            reference_level: None,
        })
    }
}
