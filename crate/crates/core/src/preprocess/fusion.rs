use crate::error::{Error, Result};
use crate::raster::Raster;

/// Fuses the co- and cross-polarized bands by elementwise product.
///
/// Samples are multiplied as stored (typically dB). A pixel that is nodata
/// in either band is nodata in the output; the output sentinel is the VV
/// sentinel, or the VH one when VV has none.
pub fn combine_bands(vv: &Raster, vh: &Raster) -> Result<Raster> {
    vv.grid().ensure_same(&vh.grid(), "combine_bands")?;
    if vv.crs() != vh.crs() {
        return Err(Error::CrsMismatch {
            source_crs: vv.crs().to_string(),
            target_crs: vh.crs().to_string(),
        });
    }
    let nodata = vv.nodata().or(vh.nodata());
    let values = vv
        .values()
        .iter()
        .zip(vh.values())
        .map(|(&a, &b)| {
            if vv.is_valid(a) && vh.is_valid(b) {
                a * b
            } else {
                nodata.expect("an invalid sample implies a nodata sentinel")
            }
        })
        .collect();
    Ok(vv.with_values(values, nodata))
}
