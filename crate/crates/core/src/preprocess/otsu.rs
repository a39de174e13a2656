use crate::error::{Error, Result};
use crate::raster::{Raster, RegionMask};

/// Best histogram split found by Otsu's method.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtsuSplit {
    /// Boundary value: samples below it form the lower class.
    pub threshold: f64,
    /// Index of the first bin of the upper class.
    pub split_bin: usize,
    pub between_class_variance: f64,
}

/// Equal-width histogram of the valid region samples over `[min, max]`.
#[derive(Clone, Debug)]
pub struct Histogram {
    pub min: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_center(&self, i: usize) -> f64 {
        self.min + (i as f64 + 0.5) * self.bin_width
    }
}

pub fn region_histogram(input: &Raster, region: &RegionMask, bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::param(format!("need at least 2 bins, got {bins}")));
    }
    input.grid().ensure_same(&region.grid(), "otsu_threshold")?;
    let samples: Vec<f64> = input
        .values()
        .iter()
        .zip(region.bits())
        .filter(|&(&v, &m)| m && input.is_valid(v))
        .map(|(&v, _)| v)
        .collect();
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if samples.is_empty() || !(max > min) {
        return Err(Error::EmptyRegion(
            "region needs at least two distinct values for a threshold".into(),
        ));
    }
    let bin_width = (max - min) / bins as f64;
    let mut counts = vec![0u64; bins];
    for v in samples {
        let i = (((v - min) / bin_width).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    Ok(Histogram {
        min,
        bin_width,
        counts,
    })
}

/// Split maximizing the between-class variance `w0 w1 (mu0 - mu1)^2`, with
/// class means taken at bin centers. The first maximal split wins.
pub fn otsu_split(hist: &Histogram) -> OtsuSplit {
    let bins = hist.counts.len();
    let total: f64 = hist.counts.iter().map(|&n| n as f64).sum();
    let total_sum: f64 = (0..bins)
        .map(|i| hist.counts[i] as f64 * hist.bin_center(i))
        .sum();
    let mut best = OtsuSplit {
        threshold: hist.min + hist.bin_width,
        split_bin: 1,
        between_class_variance: f64::NEG_INFINITY,
    };
    let (mut n0, mut sum0) = (0.0, 0.0);
    for k in 1..bins {
        n0 += hist.counts[k - 1] as f64;
        sum0 += hist.counts[k - 1] as f64 * hist.bin_center(k - 1);
        let n1 = total - n0;
        let var = if n0 == 0.0 || n1 == 0.0 {
            0.0
        } else {
            let (mu0, mu1) = (sum0 / n0, (total_sum - sum0) / n1);
            (n0 / total) * (n1 / total) * (mu0 - mu1) * (mu0 - mu1)
        };
        if var > best.between_class_variance {
            best = OtsuSplit {
                threshold: hist.min + k as f64 * hist.bin_width,
                split_bin: k,
                between_class_variance: var,
            };
        }
    }
    best
}

/// Otsu threshold of the valid samples of `input` inside `region`.
pub fn otsu_threshold(input: &Raster, region: &RegionMask, bins: usize) -> Result<f64> {
    Ok(otsu_split(&region_histogram(input, region, bins)?).threshold)
}

/// Baseline water classifier: region pixels with a valid sample strictly
/// below `threshold`.
pub fn classify_below(input: &Raster, region: &RegionMask, threshold: f64) -> Result<RegionMask> {
    input.grid().ensure_same(&region.grid(), "classify_below")?;
    let bits = input
        .values()
        .iter()
        .zip(region.bits())
        .map(|(&v, &m)| m && input.is_valid(v) && v < threshold)
        .collect();
    RegionMask::new(region.grid(), bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::GeoTransform;

    fn raster(values: Vec<f64>) -> Raster {
        let n = values.len();
        Raster::new(
            n,
            1,
            values,
            GeoTransform::north_up(0.0, 0.0, 1.0).unwrap(),
            None,
            "",
        )
        .unwrap()
    }

    #[test]
    fn symmetric_bimodal() {
        let r = raster([0.0; 8].into_iter().chain([100.0; 8]).collect());
        let t = otsu_threshold(&r, &RegionMask::full(r.grid()), 256).unwrap();
        assert!(t > 0.0 && t < 100.0);
    }

    #[test]
    fn four_cluster_histogram_splits_between_one_and_nine() {
        let values: Vec<f64> = [0.0, 1.0, 9.0, 10.0]
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, 4))
            .collect();
        let r = raster(values);
        for bins in [10, 11, 64, 256] {
            let t = otsu_threshold(&r, &RegionMask::full(r.grid()), bins).unwrap();
            assert!(t > 1.0 && t <= 9.0, "bins {bins}: threshold {t}");
        }
    }

    #[test]
    fn constant_region_is_an_error() {
        let r = raster(vec![3.0; 5]);
        assert!(otsu_threshold(&r, &RegionMask::full(r.grid()), 256).is_err());
        assert!(otsu_threshold(&raster(vec![0.0, 1.0]), &RegionMask::full(r.grid()), 1).is_err());
    }

    #[test]
    fn classifier_marks_dark_pixels() {
        let r = raster(vec![-20.0, -19.0, -6.0, -5.0]);
        let region = RegionMask::full(r.grid());
        let t = otsu_threshold(&r, &region, 256).unwrap();
        let m = classify_below(&r, &region, t).unwrap();
        assert_eq!(m.bits(), &[true, true, false, false]);
    }
}
