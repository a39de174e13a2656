use crate::error::{Error, Result};

use super::transform::{GeoTransform, Grid};

/// Single-band georeferenced grid of `f64` samples in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    grid: Grid,
    values: Vec<f64>,
    nodata: Option<f64>,
    crs: String,
}

impl Raster {
    /// Builds a raster, checking the sample count and that every sample is
    /// finite or equal to the nodata sentinel.
    pub fn new(
        width: usize,
        height: usize,
        values: Vec<f64>,
        transform: GeoTransform,
        nodata: Option<f64>,
        crs: impl Into<String>,
    ) -> Result<Self> {
        transform.validate()?;
        if values.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "{} samples for a {width}x{height} grid",
                values.len()
            )));
        }
        if let Some(nd) = nodata {
            if nd.is_infinite() {
                return Err(Error::InvalidRaster("infinite nodata sentinel".into()));
            }
        }
        let raster = Raster {
            grid: Grid::new(transform, width, height),
            values,
            nodata,
            crs: crs.into(),
        };
        if let Some(i) = raster
            .values
            .iter()
            .position(|&v| !v.is_finite() && !raster.is_nodata(v))
        {
            return Err(Error::InvalidRaster(format!(
                "non-finite sample {} at index {i} is not the nodata value",
                raster.values[i]
            )));
        }
        Ok(raster)
    }

    /// Raster over `grid` with every sample set to `value`.
    pub fn filled(
        grid: Grid,
        value: f64,
        nodata: Option<f64>,
        crs: impl Into<String>,
    ) -> Result<Self> {
        Self::new(
            grid.width,
            grid.height,
            vec![value; grid.len()],
            grid.transform,
            nodata,
            crs,
        )
    }

    /// Same georeferencing as `self`, new samples. Skips validation; callers
    /// inside the crate guarantee the sample invariant.
    pub(crate) fn with_values(&self, values: Vec<f64>, nodata: Option<f64>) -> Self {
        debug_assert_eq!(values.len(), self.grid.len());
        Raster {
            grid: self.grid,
            values,
            nodata,
            crs: self.crs.clone(),
        }
    }

    pub(crate) fn from_parts(
        grid: Grid,
        values: Vec<f64>,
        nodata: Option<f64>,
        crs: String,
    ) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Raster {
            grid,
            values,
            nodata,
            crs,
        }
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn transform(&self) -> GeoTransform {
        self.grid.transform
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn nodata(&self) -> Option<f64> {
        self.nodata
    }

    pub fn crs(&self) -> &str {
        &self.crs
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.grid.index(row, col)]
    }

    #[inline]
    pub fn is_nodata(&self, v: f64) -> bool {
        match self.nodata {
            Some(nd) if nd.is_nan() => v.is_nan(),
            Some(nd) => v == nd,
            None => false,
        }
    }

    /// True when `v` is a usable sample (finite and not the sentinel).
    #[inline]
    pub fn is_valid(&self, v: f64) -> bool {
        v.is_finite() && !self.is_nodata(v)
    }

    /// Copy of the pixels inside `window` (a sub-grid of this raster).
    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> Raster {
        let grid = self.grid.window(row, col, width, height);
        let values = (row..row + height)
            .flat_map(|r| {
                let start = self.grid.index(r, col);
                self.values[start..start + width].iter().copied()
            })
            .collect();
        Raster::from_parts(grid, values, self.nodata, self.crs.clone())
    }

    /// Bit-for-bit equality of samples, transform, nodata and CRS.
    pub fn bit_eq(&self, other: &Raster) -> bool {
        self.grid == other.grid
            && self.crs == other.crs
            && self.nodata.map(f64::to_bits) == other.nodata.map(f64::to_bits)
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Boolean grid aligned to a raster.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionMask {
    grid: Grid,
    bits: Vec<bool>,
}

impl RegionMask {
    pub fn new(grid: Grid, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != grid.len() {
            return Err(Error::InvalidRaster(format!(
                "{} mask bits for a {}x{} grid",
                bits.len(),
                grid.width,
                grid.height
            )));
        }
        Ok(RegionMask { grid, bits })
    }

    pub fn empty(grid: Grid) -> Self {
        RegionMask {
            grid,
            bits: vec![false; grid.len()],
        }
    }

    pub fn full(grid: Grid) -> Self {
        RegionMask {
            grid,
            bits: vec![true; grid.len()],
        }
    }

    pub(crate) fn from_bits(grid: Grid, bits: Vec<bool>) -> Self {
        debug_assert_eq!(bits.len(), grid.len());
        RegionMask { grid, bits }
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[self.grid.index(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let i = self.grid.index(row, col);
        self.bits[i] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Smallest `(row, col, width, height)` window holding every true bit.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let (mut r0, mut c0, mut r1, mut c1) = (usize::MAX, usize::MAX, 0, 0);
        for (r, c) in self.true_pixels() {
            r0 = r0.min(r);
            c0 = c0.min(c);
            r1 = r1.max(r);
            c1 = c1.max(c);
        }
        (r0 != usize::MAX).then(|| (r0, c0, c1 - c0 + 1, r1 - r0 + 1))
    }

    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> RegionMask {
        let grid = self.grid.window(row, col, width, height);
        let bits = (row..row + height)
            .flat_map(|r| {
                let start = self.grid.index(r, col);
                self.bits[start..start + width].iter().copied()
            })
            .collect();
        RegionMask { grid, bits }
    }

    /// `self ⊆ other`, bitwise.
    pub fn is_subset_of(&self, other: &RegionMask) -> bool {
        self.grid == other.grid && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Row-major `(row, col)` indices of true bits.
    pub fn true_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.grid.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / w, i % w))
    }
}
