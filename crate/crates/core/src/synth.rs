//! Synthetic scenes with a known water level, and the dense-sweep oracle
//! used to check the level search against them.
//!
//! Backscatter is modelled additively: each pixel draws from the water or
//! land normal distribution depending on whether its elevation is at or
//! below the true level, then a fraction of pixels is overwritten with
//! extreme "salt" values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{prepare, EstimatorConfig, PreparedScene};
use crate::floodsim::Connectivity;
use crate::par;
use crate::raster::{GeoTransform, Polygon, Raster};
use crate::scene::Scene;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemShape {
    /// Elevation grows with distance from the grid center.
    #[default]
    Bowl,
    /// Elevation grows with distance from the central column.
    Valley,
}

impl std::str::FromStr for DemShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bowl" => Ok(DemShape::Bowl),
            "valley" => Ok(DemShape::Valley),
            other => Err(format!(
                "unknown DEM shape '{other}' (expected bowl or valley)"
            )),
        }
    }
}

impl std::fmt::Display for DemShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DemShape::Bowl => "bowl",
            DemShape::Valley => "valley",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub width: usize,
    pub height: usize,
    /// Ground size of a pixel (m).
    pub pixel_size: f64,
    pub shape: DemShape,
    pub base: f64,
    /// Elevation gain per pixel of distance (m/px).
    pub slope: f64,
    /// Vertical resolution of the DEM (m); elevations are rounded to
    /// multiples of it above `base`. 0 keeps them continuous.
    pub dem_quantum: f64,
    pub true_level: f64,
    pub water_mean: f64,
    pub water_std: f64,
    pub land_mean: f64,
    pub land_std: f64,
    pub salt_prob: f64,
    pub seed: u64,
    /// Distance (m) between the wet area's bounding box and the AOI edge.
    pub aoi_margin: f64,
    pub crs: String,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            width: 256,
            height: 256,
            pixel_size: 10.0,
            shape: DemShape::Bowl,
            base: 10.0,
            slope: 0.04,
            dem_quantum: 1.0,
            true_level: 12.0,
            water_mean: -20.0,
            water_std: 0.0,
            land_mean: -6.0,
            land_std: 0.0,
            salt_prob: 0.0,
            seed: 0,
            aoi_margin: 200.0,
            crs: "EPSG:32755".into(),
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::param("synthetic grid must be at least 1x1"));
        }
        if !(self.pixel_size > 0.0 && self.pixel_size.is_finite()) {
            return Err(Error::param(format!(
                "pixel size must be positive, got {}",
                self.pixel_size
            )));
        }
        if !(self.slope > 0.0 && self.slope.is_finite()) {
            return Err(Error::param(format!(
                "slope must be positive, got {}",
                self.slope
            )));
        }
        if !(self.dem_quantum >= 0.0 && self.dem_quantum.is_finite()) {
            return Err(Error::param(format!(
                "DEM quantum must be >= 0, got {}",
                self.dem_quantum
            )));
        }
        if !(self.water_mean < self.land_mean) {
            return Err(Error::param(format!(
                "water mean ({}) must be below land mean ({})",
                self.water_mean, self.land_mean
            )));
        }
        if !(self.water_std >= 0.0 && self.land_std >= 0.0) {
            return Err(Error::param("backscatter standard deviations must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.salt_prob) {
            return Err(Error::param(format!(
                "salt probability must be in [0, 1], got {}",
                self.salt_prob
            )));
        }
        if !(self.aoi_margin >= 0.0) {
            return Err(Error::param("AOI margin must be >= 0"));
        }
        Ok(())
    }

    fn transform(&self) -> GeoTransform {
        GeoTransform::north_up(0.0, self.height as f64 * self.pixel_size, self.pixel_size)
            .expect("validated pixel size")
    }

    /// Parameters of scene `index` in the standard recovery battery: a
    /// 256x256 bowl on 10 m pixels with a 1 m DEM quantum, with base and
    /// true level drawn from the index. `noisy` adds backscatter spread
    /// and 2% salt noise.
    pub fn battery(index: u64, noisy: bool) -> SynthParams {
        let mut rng = ChaCha8Rng::seed_from_u64(0xba77_e000 + index);
        let base = rng.random_range(90..110) as f64;
        let true_level = base + rng.random_range(1.0..3.9);
        let (std, salt) = if noisy { (2.0, 0.02) } else { (0.0, 0.0) };
        SynthParams {
            base,
            true_level,
            water_std: std,
            land_std: std,
            salt_prob: salt,
            seed: index,
            ..SynthParams::default()
        }
    }
}

pub fn make_dem(params: &SynthParams) -> Result<Raster> {
    params.validate()?;
    let cx = (params.width as f64 - 1.0) / 2.0;
    let cy = (params.height as f64 - 1.0) / 2.0;
    let values = (0..params.width * params.height)
        .map(|i| {
            let (r, c) = ((i / params.width) as f64, (i % params.width) as f64);
            let d = match params.shape {
                DemShape::Bowl => (r - cy).hypot(c - cx),
                DemShape::Valley => (c - cx).abs(),
            };
            let rise = params.slope * d;
            let rise = if params.dem_quantum > 0.0 {
                (rise / params.dem_quantum).round() * params.dem_quantum
            } else {
                rise
            };
            params.base + rise
        })
        .collect();
    Raster::new(
        params.width,
        params.height,
        values,
        params.transform(),
        None,
        params.crs.clone(),
    )
}

/// Draws VV and VH over `dem` and wraps them in a [`Scene`] whose AOI is the
/// wet area's bounding box grown by the AOI margin.
pub fn make_sar_scene(dem: &Raster, params: &SynthParams) -> Result<Scene> {
    params.validate()?;
    let (lo, hi) = dem
        .values()
        .iter()
        .filter(|&&v| dem.is_valid(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(lo <= params.true_level && params.true_level <= hi) {
        return Err(Error::param(format!(
            "true level {} outside the DEM range [{lo}, {hi}]",
            params.true_level
        )));
    }
    let wet: Vec<bool> = dem
        .values()
        .iter()
        .map(|&v| dem.is_valid(v) && v <= params.true_level)
        .collect();

    let vv = draw_band(dem, &wet, params, 0)?;
    let vh = draw_band(dem, &wet, params, 1)?;

    let w = dem.width();
    let (mut r0, mut c0, mut r1, mut c1) = (usize::MAX, usize::MAX, 0, 0);
    for (i, _) in wet.iter().enumerate().filter(|(_, &b)| b) {
        let (r, c) = (i / w, i % w);
        r0 = r0.min(r);
        c0 = c0.min(c);
        r1 = r1.max(r);
        c1 = c1.max(c);
    }
    let t = dem.transform();
    let (xa, ya) = t.pixel_to_map(r0 as f64, c0 as f64);
    let (xb, yb) = t.pixel_to_map(r1 as f64 + 1.0, c1 as f64 + 1.0);
    let m = params.aoi_margin;
    let aoi = Polygon::rectangle(
        xa.min(xb) - m,
        ya.min(yb) - m,
        xa.max(xb) + m,
        ya.max(yb) + m,
    )?;

    Ok(Scene {
        id: format!("synth-{}", params.seed),
        vv,
        vh,
        dem: dem.clone(),
        aoi,
        reference_level: Some(params.true_level),
    })
}

fn draw_band(dem: &Raster, wet: &[bool], params: &SynthParams, stream: u64) -> Result<Raster> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(stream);
    let water = Normal::new(params.water_mean, params.water_std)
        .map_err(|e| Error::param(e.to_string()))?;
    let land =
        Normal::new(params.land_mean, params.land_std).map_err(|e| Error::param(e.to_string()))?;
    let contrast = params.land_mean - params.water_mean;
    let salt_lo = params.water_mean - 2.0 * contrast;
    let salt_hi = params.land_mean + 2.0 * contrast;
    let values = wet
        .iter()
        .map(|&is_wet| {
            let v = if is_wet {
                water.sample(&mut rng)
            } else {
                land.sample(&mut rng)
            };
            let u: f64 = rng.random();
            if u < params.salt_prob {
                if rng.random::<bool>() {
                    salt_hi
                } else {
                    salt_lo
                }
            } else {
                v
            }
        })
        .collect();
    Ok(dem.with_values(values, None))
}

/// Generates the DEM and the SAR scene in one go.
pub fn make_scene(params: &SynthParams) -> Result<Scene> {
    let dem = make_dem(params)?;
    make_sar_scene(&dem, params)
}

/// Levels `min, min + g, min + 2g, ...` up to `max` (inclusive within a
/// rounding slack).
pub fn sweep_levels(min: f64, max: f64, granularity: f64) -> Result<Vec<f64>> {
    if !(granularity > 0.0 && granularity.is_finite()) {
        return Err(Error::param(format!(
            "granularity must be positive, got {granularity}"
        )));
    }
    if !(min <= max) {
        return Err(Error::param(format!("empty sweep range [{min}, {max}]")));
    }
    let n = ((max - min) / granularity + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * granularity).collect())
}

/// Dense-sweep argmax of the fitness over `[min DEM, max DEM]` (lowest
/// level on ties), using the same preprocessing as the estimator.
pub fn brute_force_level(scene: &Scene, config: &EstimatorConfig, granularity: f64) -> Result<f64> {
    let prepared = prepare(scene, config)?;
    brute_force_prepared(&prepared, config.connectivity, granularity)
}

/// [`brute_force_level`] on an already prepared scene.
///
/// Fitness only depends on which pixels lie at or below the level, so
/// levels between two consecutive DEM values share one evaluation.
pub fn brute_force_prepared(
    prepared: &PreparedScene,
    connectivity: Connectivity,
    granularity: f64,
) -> Result<f64> {
    let (best, _) = sweep_prepared(prepared, connectivity, granularity)?
        .into_iter()
        .fold((f64::NAN, f64::NEG_INFINITY), |(bl, bf), (l, f)| {
            if f > bf {
                (l, f)
            } else {
                (bl, bf)
            }
        });
    if best.is_nan() {
        return Err(Error::EmptyRegion("no finite fitness in sweep".into()));
    }
    Ok(best)
}

/// `(level, fitness)` for every level of the dense sweep.
pub fn sweep_prepared(
    prepared: &PreparedScene,
    connectivity: Connectivity,
    granularity: f64,
) -> Result<Vec<(f64, f64)>> {
    let stats = prepared.dem_stats;
    let levels = sweep_levels(stats.min, stats.max, granularity)?;

    let dem = &prepared.dem;
    let mut elevations: Vec<f64> = dem
        .values()
        .iter()
        .zip(prepared.region.bits())
        .filter(|&(&v, &inside)| inside && dem.is_valid(v))
        .map(|(&v, _)| v)
        .collect();
    elevations.sort_by(f64::total_cmp);
    elevations.dedup();

    // class = number of distinct elevations at or below the level
    let classes: Vec<usize> = levels
        .iter()
        .map(|&l| elevations.partition_point(|&e| e <= l))
        .collect();
    let mut representatives: Vec<(usize, f64)> = Vec::new();
    for (&class, &level) in classes.iter().zip(&levels) {
        if representatives.last().is_none_or(|&(c, _)| c != class) {
            representatives.push((class, level));
        }
    }
    let scores = par::map_slice(&representatives, |&(_, level)| {
        prepared.fitness(level, connectivity)
    });
    let mut out = Vec::with_capacity(levels.len());
    let mut k = 0;
    for (&class, &level) in classes.iter().zip(&levels) {
        while representatives[k].0 != class {
            k += 1;
        }
        out.push((level, scores[k]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(shape: DemShape) -> SynthParams {
        SynthParams {
            width: 33,
            height: 33,
            shape,
            base: 10.0,
            slope: 1.0,
            dem_quantum: 0.0,
            true_level: 15.0,
            ..SynthParams::default()
        }
    }

    #[test]
    fn bowl_center_and_corner() {
        let dem = make_dem(&small(DemShape::Bowl)).unwrap();
        assert_eq!(dem.get(16, 16), 10.0);
        let corner = 10.0 + (16.0f64 * 16.0 * 2.0).sqrt();
        assert!((dem.get(0, 0) - corner).abs() < 1e-12);
        assert!((dem.get(0, 0) - 32.63).abs() < 0.01);
    }

    #[test]
    fn valley_profile() {
        let dem = make_dem(&small(DemShape::Valley)).unwrap();
        assert_eq!(dem.get(0, 16), 10.0);
        assert_eq!(dem.get(5, 20), 14.0);
    }

    #[test]
    fn quantized_dem() {
        let p = SynthParams {
            dem_quantum: 1.0,
            slope: 0.3,
            ..small(DemShape::Valley)
        };
        let dem = make_dem(&p).unwrap();
        assert!(dem.values().iter().all(|v| v.fract() == 0.0));
        assert_eq!(dem.get(0, 16 + 5), 12.0); // 1.5 rounds away from zero
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = small(DemShape::Bowl);
        p.slope = 0.0;
        assert!(make_dem(&p).is_err());
        let mut p = small(DemShape::Bowl);
        p.water_mean = 0.0;
        assert!(make_dem(&p).is_err());
        let p = SynthParams {
            true_level: 100.0,
            ..small(DemShape::Bowl)
        };
        let dem = make_dem(&p).unwrap();
        assert!(make_sar_scene(&dem, &p).is_err());
    }

    #[test]
    fn noiseless_scene_is_two_valued() {
        let p = small(DemShape::Bowl);
        let scene = make_scene(&p).unwrap();
        for (v, d) in scene.vv.values().iter().zip(scene.dem.values()) {
            let expect = if *d <= p.true_level {
                p.water_mean
            } else {
                p.land_mean
            };
            assert_eq!(*v, expect);
        }
        assert_eq!(scene.vv.values(), scene.vh.values());
        assert_eq!(scene.reference_level, Some(15.0));
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let p = SynthParams {
            water_std: 1.0,
            land_std: 1.0,
            salt_prob: 0.05,
            seed: 42,
            ..small(DemShape::Bowl)
        };
        let a = make_scene(&p).unwrap();
        let b = make_scene(&p).unwrap();
        assert!(a.vv.bit_eq(&b.vv) && a.vh.bit_eq(&b.vh) && a.dem.bit_eq(&b.dem));
        assert_ne!(a.vv.values(), a.vh.values());
        let c = make_scene(&SynthParams { seed: 43, ..p }).unwrap();
        assert_ne!(a.vv.values(), c.vv.values());
    }

    #[test]
    fn sweep_levels_inclusive() {
        assert_eq!(sweep_levels(0.0, 1.0, 0.5).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(sweep_levels(2.0, 2.0, 0.1).unwrap(), vec![2.0]);
        assert_eq!(sweep_levels(0.0, 0.3, 0.1).unwrap().len(), 4);
        assert!(sweep_levels(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn flat_sar_brute_force_returns_min() {
        let p = small(DemShape::Bowl);
        let mut scene = make_scene(&p).unwrap();
        scene.vh = scene.vv.with_values(vec![-6.0; 33 * 33], None);
        scene.vv = scene.vh.clone();
        let cfg = EstimatorConfig {
            buffer_distance: 0.0,
            ..Default::default()
        };
        assert_eq!(brute_force_level(&scene, &cfg, 0.1).unwrap(), 10.0);
    }
}
