//! Shoreline fitness and the coarse-to-fine level search.
//!
//! The fitness of a level is the sum of Canny edge magnitudes over the
//! shoreline of the largest flooded DEM component at that level. The
//! estimate is the level the sampling search converges to inside
//! `[min DEM, max DEM]` over the buffered AOI.

mod config;
mod search;

use serde::{Deserialize, Serialize};

pub use config::EstimatorConfig;
pub use search::{iteration_bound, linspace, search, Evaluation, FitnessTrace, Iteration};

use crate::error::{Error, Result};
use crate::floodsim::{self, Connectivity};
use crate::preprocess::{canny_edges, combine_bands, speckle_filter, EdgeRaster};
use crate::raster::{clip_stats, dilate_mask, rasterize_polygon, Raster, RegionMask, RegionStats};
use crate::scene::Scene;

/// Fitness and shoreline size at `level`.
pub fn evaluate(
    level: f64,
    dem: &Raster,
    edges: &EdgeRaster,
    region: &RegionMask,
    connectivity: Connectivity,
) -> Result<Evaluation> {
    dem.grid()
        .ensure_same(&edges.raster().grid(), "fitness: dem vs edges")?;
    let flood = floodsim::simulate(dem, level, region, connectivity)?;
    let w = dem.width();
    let values = edges.values();
    let fitness = flood
        .shoreline
        .iter()
        .map(|&(r, c)| values[r * w + c])
        .sum();
    Ok(Evaluation {
        fitness,
        shoreline_pixels: flood.shoreline.len(),
    })
}

/// Summed edge magnitude along the simulated shoreline at `level`.
pub fn fitness(
    level: f64,
    dem: &Raster,
    edges: &EdgeRaster,
    region: &RegionMask,
    connectivity: Connectivity,
) -> Result<f64> {
    Ok(evaluate(level, dem, edges, region, connectivity)?.fitness)
}

/// Per-scene state reused by every fitness evaluation: the DEM, edges and
/// analysis region, cropped to the region's bounding box.
#[derive(Clone, Debug)]
pub struct PreparedScene {
    pub dem: Raster,
    pub edges: EdgeRaster,
    pub region: RegionMask,
    pub dem_stats: RegionStats,
}

impl PreparedScene {
    pub fn evaluate(&self, level: f64, connectivity: Connectivity) -> Evaluation {
        evaluate(level, &self.dem, &self.edges, &self.region, connectivity)
            .expect("prepared rasters share one grid")
    }

    pub fn fitness(&self, level: f64, connectivity: Connectivity) -> f64 {
        self.evaluate(level, connectivity).fitness
    }
}

/// Buffers the AOI, fuses and filters the SAR bands, runs Canny and
/// measures the DEM range over the region.
pub fn prepare(scene: &Scene, config: &EstimatorConfig) -> Result<PreparedScene> {
    config.validate()?;
    let grid = scene.vv.grid();
    grid.ensure_same(&scene.vh.grid(), "VV vs VH")?;
    grid.ensure_same(&scene.dem.grid(), "SAR vs DEM")?;

    let aoi = rasterize_polygon(&scene.aoi, grid)?;
    let region = dilate_mask(&aoi, config.buffer_distance)?;
    let Some((row, col, width, height)) = region.bounding_box() else {
        return Err(Error::EmptyRegion(
            "AOI does not intersect the raster grid".into(),
        ));
    };

    let combined = combine_bands(&scene.vv, &scene.vh)?;
    let filtered = speckle_filter(&combined, config.speckle_radius);
    let edges = canny_edges(&filtered, &region, config.gaussian_sigma)?;

    let dem = scene.dem.crop(row, col, width, height);
    let region = region.crop(row, col, width, height);
    let edges = EdgeRaster::from_raster(
        edges.raster().crop(row, col, width, height),
        edges.threshold(),
    )?;
    let dem_stats = clip_stats(&dem, &region)?;
    Ok(PreparedScene {
        dem,
        edges,
        region,
        dem_stats,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub scene_id: String,
    /// Last iteration's best level, clamped to the DEM range of the region.
    pub level: f64,
    pub trace: FitnessTrace,
    pub config: EstimatorConfig,
}

/// Runs the level search on an already prepared scene.
pub fn estimate_prepared(
    scene_id: &str,
    prepared: &PreparedScene,
    config: &EstimatorConfig,
) -> Result<EstimateResult> {
    config.validate()?;
    let stats = prepared.dem_stats;
    let trace = search(
        stats.min,
        stats.max,
        config.sample_num,
        config.tolerance,
        |level| prepared.evaluate(level, config.connectivity),
    )?;
    // The bracket may drift outside the DEM range. Above max DEM the flood
    // is the same as at max DEM; below min DEM nothing floods and the best
    // fitness was 0. Either way the range endpoint is the same answer.
    let best = trace.best_level().expect("search runs at least once");
    Ok(EstimateResult {
        scene_id: scene_id.to_string(),
        level: best.clamp(stats.min, stats.max),
        trace,
        config: config.clone(),
    })
}

pub fn estimate_level(scene: &Scene, config: &EstimatorConfig) -> Result<EstimateResult> {
    let prepared = prepare(scene, config)?;
    estimate_prepared(&scene.id, &prepared, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{GeoTransform, Polygon};

    fn ring_dem() -> Raster {
        #[rustfmt::skip]
        let v = vec![
            1.0, 1.0, 1.0, 1.0,
            1.0, 0.0, 0.0, 1.0,
            1.0, 0.0, 0.0, 1.0,
            1.0, 1.0, 1.0, 1.0,
        ];
        Raster::new(
            4,
            4,
            v,
            GeoTransform::north_up(0.0, 4.0, 1.0).unwrap(),
            None,
            "",
        )
        .unwrap()
    }

    fn center_edges(dem: &Raster, value: f64) -> EdgeRaster {
        let v = (0..16)
            .map(|i| {
                let (r, c) = (i / 4, i % 4);
                if (1..3).contains(&r) && (1..3).contains(&c) {
                    value
                } else {
                    0.0
                }
            })
            .collect();
        EdgeRaster::from_raster(dem.with_values(v, None), 0.0).unwrap()
    }

    #[test]
    fn ring_fixture_fitness() {
        let dem = ring_dem();
        let region = RegionMask::full(dem.grid());
        let edges = center_edges(&dem, 2.0);
        assert_eq!(
            fitness(0.0, &dem, &edges, &region, Connectivity::Eight).unwrap(),
            8.0
        );
        assert_eq!(
            fitness(-1.0, &dem, &edges, &region, Connectivity::Eight).unwrap(),
            0.0
        );
        // everything flooded: the shoreline is the outer ring, no edges there
        assert_eq!(
            fitness(1.0, &dem, &edges, &region, Connectivity::Eight).unwrap(),
            0.0
        );
        let zero = center_edges(&dem, 0.0);
        for level in [-1.0, 0.0, 0.5, 1.0] {
            assert_eq!(
                fitness(level, &dem, &zero, &region, Connectivity::Four).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn constant_dem_gives_single_iteration() {
        let t = GeoTransform::north_up(0.0, 20.0, 1.0).unwrap();
        let flat = Raster::new(20, 20, vec![50.0; 400], t, None, "").unwrap();
        let sar = Raster::new(
            20,
            20,
            (0..400).map(|i| -10.0 - (i % 7) as f64).collect(),
            t,
            None,
            "",
        )
        .unwrap();
        let scene = Scene {
            id: "flat".into(),
            vv: sar.clone(),
            vh: sar,
            dem: flat,
            aoi: Polygon::rectangle(5.0, 5.0, 15.0, 15.0).unwrap(),
            reference_level: None,
        };
        let cfg = EstimatorConfig {
            buffer_distance: 2.0,
            ..Default::default()
        };
        let res = estimate_level(&scene, &cfg).unwrap();
        assert_eq!(res.level, 50.0);
        assert_eq!(res.trace.len(), 1);
    }

    #[test]
    fn aoi_outside_grid_is_empty_region() {
        let t = GeoTransform::north_up(0.0, 10.0, 1.0).unwrap();
        let r = Raster::new(10, 10, vec![1.0; 100], t, None, "").unwrap();
        let scene = Scene {
            id: "x".into(),
            vv: r.clone(),
            vh: r.clone(),
            dem: r,
            aoi: Polygon::rectangle(100.0, 100.0, 110.0, 110.0).unwrap(),
            reference_level: None,
        };
        let cfg = EstimatorConfig {
            buffer_distance: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            estimate_level(&scene, &cfg),
            Err(Error::EmptyRegion(_))
        ));
    }
}
