//! Single-threshold Canny edge detection.
//!
//! Gaussian smoothing (separable, half-width `ceil(3 sigma)`), central
//! difference gradients, four-sector non-maximum suppression, then every
//! magnitude below half the region's standard deviation is dropped. There
//! is no hysteresis stage.

use crate::error::{Error, Result};
use crate::par;
use crate::raster::{clip_stats, Raster, RegionMask};

/// Canny output: surviving gradient magnitudes at edge pixels, 0 elsewhere.
#[derive(Clone, Debug)]
pub struct EdgeRaster {
    raster: Raster,
    threshold: f64,
}

impl EdgeRaster {
    pub fn raster(&self) -> &Raster {
        &self.raster
    }

    pub fn values(&self) -> &[f64] {
        self.raster.values()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Edge magnitudes multiplied by `factor`; the threshold scales along.
    pub fn scaled(&self, factor: f64) -> EdgeRaster {
        let values = self.raster.values().iter().map(|v| v * factor).collect();
        EdgeRaster {
            raster: self.raster.with_values(values, None),
            threshold: self.threshold * factor,
        }
    }

    /// Wraps precomputed magnitudes (all finite and >= 0).
    pub fn from_raster(raster: Raster, threshold: f64) -> Result<EdgeRaster> {
        if raster
            .values()
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::InvalidRaster(
                "edge magnitudes must be finite and non-negative".into(),
            ));
        }
        Ok(EdgeRaster { raster, threshold })
    }
}

/// Gradient components and magnitude of a smoothed image, per pixel.
#[derive(Clone, Debug)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub magnitude: Vec<f64>,
}

pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let half = (3.0 * sigma).ceil() as isize;
    (-half..=half)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect()
}

/// Separable Gaussian blur. Invalid and out-of-bounds samples are left out
/// and the remaining weights renormalized; a pixel with no valid sample in
/// its window becomes NaN.
pub fn gaussian_smooth(input: &Raster, sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma);
    let (w, h) = (input.width(), input.height());
    let src: Vec<f64> = input
        .values()
        .iter()
        .map(|&v| if input.is_valid(v) { v } else { f64::NAN })
        .collect();

    let mut horizontal = vec![0.0; src.len()];
    par::for_each_row(&mut horizontal, w, |r, row| {
        let line = &src[r * w..(r + 1) * w];
        convolve_line(|i| line[i], w, &kernel, row);
    });
    let columns: Vec<Vec<f64>> = par::map_range(w, |c| {
        let mut out = vec![0.0; h];
        convolve_line(|i| horizontal[i * w + c], h, &kernel, &mut out);
        out
    });
    let mut out = vec![0.0; src.len()];
    for (c, col) in columns.into_iter().enumerate() {
        for (r, v) in col.into_iter().enumerate() {
            out[r * w + c] = v;
        }
    }
    out
}

fn convolve_line(sample: impl Fn(usize) -> f64, n: usize, kernel: &[f64], out: &mut [f64]) {
    let half = (kernel.len() / 2) as isize;
    for (i, o) in out.iter_mut().enumerate() {
        // deviations from the first valid sample keep flat runs exactly flat
        let mut reference = None;
        let mut acc = 0.0;
        let mut norm = 0.0;
        for (k, &wk) in kernel.iter().enumerate() {
            let j = i as isize + k as isize - half;
            if j < 0 || j >= n as isize {
                continue;
            }
            let v = sample(j as usize);
            if v.is_nan() {
                continue;
            }
            let base = *reference.get_or_insert(v);
            acc += wk * (v - base);
            norm += wk;
        }
        *o = match reference {
            Some(base) => base + acc / norm,
            None => f64::NAN,
        };
    }
}

/// Central-difference gradients (`gx` along columns, `gy` along rows,
/// pixel units). One-sided differences where a neighbor is missing; zero
/// when both are.
pub fn gradients(smoothed: &[f64], width: usize, height: usize) -> GradientField {
    let at = |r: isize, c: isize| -> Option<f64> {
        if r < 0 || c < 0 || r >= height as isize || c >= width as isize {
            return None;
        }
        let v = smoothed[r as usize * width + c as usize];
        (!v.is_nan()).then_some(v)
    };
    let diff =
        |center: Option<f64>, prev: Option<f64>, next: Option<f64>| match (prev, next, center) {
            (Some(p), Some(n), _) => 0.5 * (n - p),
            (Some(p), None, Some(c)) => c - p,
            (None, Some(n), Some(c)) => n - c,
            _ => 0.0,
        };
    let n = width * height;
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    for r in 0..height as isize {
        for c in 0..width as isize {
            let i = r as usize * width + c as usize;
            let center = at(r, c);
            gx[i] = diff(center, at(r, c - 1), at(r, c + 1));
            gy[i] = diff(center, at(r - 1, c), at(r + 1, c));
        }
    }
    let magnitude = gx.iter().zip(&gy).map(|(x, y)| x.hypot(*y)).collect();
    GradientField {
        width,
        height,
        gx,
        gy,
        magnitude,
    }
}

/// Step `(dr, dc)` along the gradient direction quantized to 0/45/90/135°.
#[inline]
pub fn quantized_direction(gx: f64, gy: f64) -> (isize, isize) {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        (0, 1)
    } else if angle < 67.5 {
        (1, 1)
    } else if angle < 112.5 {
        (1, 0)
    } else {
        (1, -1)
    }
}

/// Keeps a magnitude when it is strictly above its neighbor behind it and
/// not below its neighbor ahead of it along the quantized direction. The
/// asymmetry keeps exactly one pixel of a symmetric plateau pair.
pub fn non_maximum_suppression(field: &GradientField) -> Vec<f64> {
    let (w, h) = (field.width as isize, field.height as isize);
    let mag = |r: isize, c: isize| -> f64 {
        if r < 0 || c < 0 || r >= h || c >= w {
            0.0
        } else {
            field.magnitude[(r * w + c) as usize]
        }
    };
    let mut out = vec![0.0; field.magnitude.len()];
    par::for_each_row(&mut out, field.width, |row, dst| {
        let r = row as isize;
        for (c, o) in dst.iter_mut().enumerate() {
            let i = row * field.width + c;
            let m = field.magnitude[i];
            if m == 0.0 {
                continue;
            }
            let c = c as isize;
            let (dr, dc) = quantized_direction(field.gx[i], field.gy[i]);
            if m > mag(r - dr, c - dc) && m >= mag(r + dr, c + dc) {
                *o = m;
            }
        }
    });
    out
}

/// Half the population standard deviation of `input` over `region`.
pub fn canny_threshold(input: &Raster, region: &RegionMask) -> Result<f64> {
    Ok(0.5 * clip_stats(input, region)?.stddev)
}

pub fn canny_edges(input: &Raster, region: &RegionMask, sigma: f64) -> Result<EdgeRaster> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::param(format!(
            "gaussian sigma must be > 0, got {sigma}"
        )));
    }
    input.grid().ensure_same(&region.grid(), "canny_edges")?;
    let threshold = canny_threshold(input, region)?;
    let smoothed = gaussian_smooth(input, sigma);
    let field = gradients(&smoothed, input.width(), input.height());
    let mut edges = non_maximum_suppression(&field);
    for ((e, &inside), &v) in edges.iter_mut().zip(region.bits()).zip(input.values()) {
        if !inside || !input.is_valid(v) || *e < threshold {
            *e = 0.0;
        }
    }
    Ok(EdgeRaster {
        raster: input.with_values(edges, None),
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GeoTransform;

    fn raster(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> Raster {
        let values = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Raster::new(
            w,
            h,
            values,
            GeoTransform::north_up(0.0, 0.0, 10.0).unwrap(),
            None,
            "",
        )
        .unwrap()
    }

    #[test]
    fn kernel_half_width() {
        assert_eq!(gaussian_kernel(1.0).len(), 7);
        assert_eq!(gaussian_kernel(0.5).len(), 5);
        assert_eq!(gaussian_kernel(1.2).len(), 9);
    }

    #[test]
    fn constant_image_has_no_edges() {
        let r = raster(12, 9, |_, _| 42.0);
        let e = canny_edges(&r, &RegionMask::full(r.grid()), 1.0).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vertical_step_gives_single_column() {
        let r = raster(16, 16, |_, c| if c < 8 { 0.0 } else { 10.0 });
        let e = canny_edges(&r, &RegionMask::full(r.grid()), 1.0).unwrap();
        let cols: std::collections::BTreeSet<usize> = (0..16 * 16)
            .filter(|&i| e.values()[i] > 0.0)
            .map(|i| i % 16)
            .collect();
        assert_eq!(cols.len(), 1, "edge columns {cols:?}");
        let col = *cols.iter().next().unwrap();
        assert!(col == 7 || col == 8);
        // every row carries the edge
        assert_eq!(e.values().iter().filter(|&&v| v > 0.0).count(), 16);
    }

    #[test]
    fn threshold_is_half_region_stddev() {
        // values {0, 20} in equal numbers: population stddev 10
        let r = raster(4, 4, |_, c| if c % 2 == 0 { 0.0 } else { 20.0 });
        assert_eq!(
            canny_threshold(&r, &RegionMask::full(r.grid())).unwrap(),
            5.0
        );
    }

    #[test]
    fn zero_outside_region() {
        let r = raster(16, 16, |_, c| if c < 8 { 0.0 } else { 10.0 });
        let mut region = RegionMask::full(r.grid());
        for row in 0..8 {
            for c in 0..16 {
                region.set(row, c, false);
            }
        }
        let e = canny_edges(&r, &region, 1.0).unwrap();
        assert!((0..8 * 16).all(|i| e.values()[i] == 0.0));
        assert!(e.values().iter().any(|&v| v > 0.0));
    }

    #[test]
    fn empty_region_or_bad_sigma() {
        let r = raster(4, 4, |r, c| (r + c) as f64);
        assert!(canny_edges(&r, &RegionMask::empty(r.grid()), 1.0).is_err());
        assert!(canny_edges(&r, &RegionMask::full(r.grid()), 0.0).is_err());
    }

    #[test]
    fn direction_sectors() {
        assert_eq!(quantized_direction(1.0, 0.0), (0, 1));
        assert_eq!(quantized_direction(-1.0, 0.0), (0, 1));
        assert_eq!(quantized_direction(1.0, 1.0), (1, 1));
        assert_eq!(quantized_direction(0.0, -1.0), (1, 0));
        assert_eq!(quantized_direction(-1.0, 1.0), (1, -1));
    }
}
