use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Affine north-up georeferencing: map = origin + (index) * pixel size.
///
/// `(origin_x, origin_y)` is the outer corner of pixel `(0, 0)`; pixel
/// centers sit half a pixel inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoTransform {
    pub origin_x: f64,
    pub origin_y: f64,
    pub pixel_width: f64,
    pub pixel_height: f64,
}

impl GeoTransform {
    pub fn new(origin_x: f64, origin_y: f64, pixel_width: f64, pixel_height: f64) -> Result<Self> {
        let t = GeoTransform {
            origin_x,
            origin_y,
            pixel_width,
            pixel_height,
        };
        t.validate()?;
        Ok(t)
    }

    /// North-up transform with square pixels of `size` map units.
    pub fn north_up(origin_x: f64, origin_y: f64, size: f64) -> Result<Self> {
        Self::new(origin_x, origin_y, size, -size)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pixel_width > 0.0) || !self.pixel_width.is_finite() {
            return Err(Error::param(format!(
                "pixel width must be positive, got {}",
                self.pixel_width
            )));
        }
        if self.pixel_height == 0.0 || !self.pixel_height.is_finite() {
            return Err(Error::param("pixel height must be non-zero"));
        }
        if !self.origin_x.is_finite() || !self.origin_y.is_finite() {
            return Err(Error::param("origin must be finite"));
        }
        Ok(())
    }

    /// Map coordinates of the center of pixel `(row, col)`.
    pub fn pixel_center(&self, row: usize, col: usize) -> (f64, f64) {
        self.pixel_to_map(row as f64 + 0.5, col as f64 + 0.5)
    }

    /// Fractional pixel coordinates to map coordinates.
    pub fn pixel_to_map(&self, row: f64, col: f64) -> (f64, f64) {
        (
            self.origin_x + col * self.pixel_width,
            self.origin_y + row * self.pixel_height,
        )
    }

    /// Map coordinates to fractional `(row, col)`; integer parts index the
    /// containing pixel.
    pub fn map_to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (y - self.origin_y) / self.pixel_height,
            (x - self.origin_x) / self.pixel_width,
        )
    }
}

/// A transform together with the grid dimensions it spans.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub transform: GeoTransform,
    pub width: usize,
    pub height: usize,
}

impl Grid {
    pub fn new(transform: GeoTransform, width: usize, height: usize) -> Self {
        Grid {
            transform,
            width,
            height,
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    /// Sub-grid of `height` x `width` pixels starting at `(row, col)`.
    pub fn window(&self, row: usize, col: usize, width: usize, height: usize) -> Grid {
        debug_assert!(row + height <= self.height && col + width <= self.width);
        let t = self.transform;
        Grid {
            transform: GeoTransform {
                origin_x: t.origin_x + col as f64 * t.pixel_width,
                origin_y: t.origin_y + row as f64 * t.pixel_height,
                ..t
            },
            width,
            height,
        }
    }

    pub(crate) fn ensure_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "{what}: {}x{} {:?} vs {}x{} {:?}",
                self.width, self.height, self.transform, other.width, other.height, other.transform
            )));
        }
        Ok(())
    }
}
