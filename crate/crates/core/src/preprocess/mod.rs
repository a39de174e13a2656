//! SAR preprocessing: VV×VH band fusion, circular focal-median speckle
//! filtering and single-threshold Canny edges. Otsu thresholding is kept as
//! the comparison baseline.

mod canny;
mod fusion;
mod otsu;
mod speckle;

pub use canny::{
    canny_edges, canny_threshold, gaussian_kernel, gaussian_smooth, gradients,
    non_maximum_suppression, quantized_direction, EdgeRaster, GradientField,
};
pub use fusion::combine_bands;
pub use otsu::{
    classify_below, otsu_split, otsu_threshold, region_histogram, Histogram, OtsuSplit,
};
pub use speckle::{circle_offsets, speckle_filter};
