use crate::error::{Error, Result};

use super::grid::Raster;
use super::transform::Grid;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Resampling {
    #[default]
    Nearest,
    Bilinear,
}

/// Resamples `source` onto `target`. Both must share a CRS string.
///
/// Target pixels whose center falls outside the source extent (or that would
/// read a nodata sample) become nodata; the source sentinel is kept, and NaN
/// is used when the source has none.
pub fn align_to(
    source: &Raster,
    target: Grid,
    target_crs: &str,
    method: Resampling,
) -> Result<Raster> {
    if source.crs() != target_crs {
        return Err(Error::CrsMismatch {
            source_crs: source.crs().to_string(),
            target_crs: target_crs.to_string(),
        });
    }
    target.transform.validate()?;
    if source.grid() == target {
        return Ok(source.clone());
    }
    let st = source.transform();
    let (sw, sh) = (source.width() as f64, source.height() as f64);
    let mut values = Vec::with_capacity(target.len());
    let mut missing = false;
    for row in 0..target.height {
        for col in 0..target.width {
            let (x, y) = target.transform.pixel_center(row, col);
            let (fr, fc) = st.map_to_pixel(x, y);
            let v = if fr < 0.0 || fc < 0.0 || fr >= sh || fc >= sw {
                None
            } else {
                match method {
                    Resampling::Nearest => {
                        let v = source.get(fr as usize, fc as usize);
                        source.is_valid(v).then_some(v)
                    }
                    Resampling::Bilinear => bilinear(source, fr - 0.5, fc - 0.5),
                }
            };
            values.push(v.unwrap_or_else(|| {
                missing = true;
                f64::NAN
            }));
        }
    }
    let nodata = match (source.nodata(), missing) {
        (Some(nd), true) => {
            for v in values.iter_mut().filter(|v| v.is_nan()) {
                *v = nd;
            }
            Some(nd)
        }
        (None, true) => Some(f64::NAN),
        (nd, false) => nd,
    };
    Ok(Raster::from_parts(
        target,
        values,
        nodata,
        source.crs().to_string(),
    ))
}

/// Bilinear interpolation at center-relative pixel coordinates, clamped to
/// the grid of centers.
fn bilinear(source: &Raster, r: f64, c: f64) -> Option<f64> {
    let max_r = (source.height() - 1) as f64;
    let max_c = (source.width() - 1) as f64;
    let r = r.clamp(0.0, max_r);
    let c = c.clamp(0.0, max_c);
    let (r0, c0) = (r.floor() as usize, c.floor() as usize);
    let (r1, c1) = (
        (r0 + 1).min(source.height() - 1),
        (c0 + 1).min(source.width() - 1),
    );
    let (fr, fc) = (r - r0 as f64, c - c0 as f64);
    let q = [
        source.get(r0, c0),
        source.get(r0, c1),
        source.get(r1, c0),
        source.get(r1, c1),
    ];
    if q.iter().any(|&v| !source.is_valid(v)) {
        return None;
    }
    let top = q[0] + (q[1] - q[0]) * fc;
    let bottom = q[2] + (q[3] - q[2]) * fc;
    Some(top + (bottom - top) * fr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GeoTransform;

    fn ramp(w: usize, h: usize) -> Raster {
        let t = GeoTransform::north_up(0.0, h as f64, 1.0).unwrap();
        let values = (0..h)
            .flat_map(|r| (0..w).map(move |c| 3.0 * c as f64 - 2.0 * r as f64 + 1.0))
            .collect();
        Raster::new(w, h, values, t, None, "EPSG:32633").unwrap()
    }

    #[test]
    fn identity_when_grids_match() {
        let r = ramp(5, 4);
        assert!(align_to(&r, r.grid(), "EPSG:32633", Resampling::Nearest)
            .unwrap()
            .bit_eq(&r));
    }

    #[test]
    fn crs_mismatch_rejected() {
        let r = ramp(2, 2);
        assert!(matches!(
            align_to(&r, r.grid(), "EPSG:4326", Resampling::Nearest),
            Err(Error::CrsMismatch { .. })
        ));
    }

    #[test]
    fn nearest_downsample_by_two() {
        let r = ramp(4, 4);
        let target = Grid::new(GeoTransform::north_up(0.0, 4.0, 2.0).unwrap(), 2, 2);
        let out = align_to(&r, target, "EPSG:32633", Resampling::Nearest).unwrap();
        // target centers land on source pixel corners; the containing pixel
        // is the one below-right
        for row in 0..2 {
            for col in 0..2 {
                assert_eq!(out.get(row, col), r.get(2 * row + 1, 2 * col + 1));
            }
        }
    }

    #[test]
    fn bilinear_reproduces_ramp() {
        let r = ramp(8, 8);
        let target = Grid::new(GeoTransform::north_up(1.25, 6.75, 0.5).unwrap(), 10, 10);
        let out = align_to(&r, target, "EPSG:32633", Resampling::Bilinear).unwrap();
        for row in 0..10 {
            for col in 0..10 {
                let (x, y) = target.transform.pixel_center(row, col);
                // source pixel (r, c) center is at (c + 0.5, 8 - r - 0.5)
                let (sc, sr) = (x - 0.5, 8.0 - y - 0.5);
                let expect = 3.0 * sc - 2.0 * sr + 1.0;
                assert!((out.get(row, col) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn outside_extent_is_nodata() {
        let r = ramp(2, 2);
        let target = Grid::new(GeoTransform::north_up(-1.0, 2.0, 1.0).unwrap(), 3, 2);
        let out = align_to(&r, target, "EPSG:32633", Resampling::Nearest).unwrap();
        assert!(out.get(0, 0).is_nan());
        assert!(out.nodata().unwrap().is_nan());
        assert_eq!(out.get(0, 1), r.get(0, 0));
    }
}
