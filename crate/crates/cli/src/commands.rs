use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use shorefit::estimator::{estimate_prepared, prepare};
use shorefit::metrics::{calibrate_kernel, evaluate_series, is_iso_date, TimeSeries};
use shorefit::raster::{
    align_to, load_polygon, load_raster, write_polygon, write_raster, Raster, Resampling,
};
use shorefit::synth::{make_scene, SynthParams};
use shorefit::{EstimateResult, EstimatorConfig, Scene};

use crate::error::{at, CliError, CliResult};
use crate::manifest::{append_row, read_manifest, ManifestRow};
use crate::plot;
use crate::{BatchArgs, CalibrateArgs, EstimateArgs, EvaluateArgs, PlotArgs, SynthArgs};

fn load(path: &Path) -> CliResult<Raster> {
    load_raster(path).map_err(at("load"))
}

/// Puts `raster` on the VV grid, resampling if the grids differ.
fn align(raster: Raster, target: &Raster, method: Resampling) -> CliResult<Raster> {
    if raster.grid() == target.grid() && raster.crs() == target.crs() {
        return Ok(raster);
    }
    align_to(&raster, target.grid(), target.crs(), method).map_err(at("align"))
}

pub fn load_scene(id: &str, vv: &Path, vh: &Path, dem: &Path, aoi: &Path) -> CliResult<Scene> {
    let vv = load(vv)?;
    let vh = align(load(vh)?, &vv, Resampling::Nearest)?;
    let dem = align(load(dem)?, &vv, Resampling::Bilinear)?;
    let aoi = load_polygon(aoi).map_err(at("load"))?;
    Ok(Scene {
        id: id.to_string(),
        vv,
        vh,
        dem,
        aoi,
        reference_level: None,
    })
}

fn run_scene(scene: &Scene, config: &EstimatorConfig) -> CliResult<EstimateResult> {
    let prepared = prepare(scene, config).map_err(at("preprocess"))?;
    estimate_prepared(&scene.id, &prepared, config).map_err(at("search"))
}

fn write_trace(result: &EstimateResult, path: &Path) -> CliResult<()> {
    let json = serde_json::to_string_pretty(result).map_err(at("trace"))?;
    fs::write(path, json + "\n")
        .map_err(|e| CliError::runtime("trace", format!("{}: {e}", path.display())))
}

fn record(date: &str, level: f64) -> String {
    format!("{date},{level:.4}")
}

pub fn estimate(args: &EstimateArgs) -> CliResult<()> {
    let config = args.config.config()?;
    let date = match &args.date {
        Some(d) => d.clone(),
        None => args
            .vv
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scene".into()),
    };
    let scene = load_scene(&date, &args.vv, &args.vh, &args.dem, &args.aoi)?;
    let result = run_scene(&scene, &config)?;
    if let Some(path) = &args.trace {
        write_trace(&result, path)?;
    }
    println!("date,level_m\n{}", record(&date, result.level));
    Ok(())
}

fn thread_pool(jobs: u16) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .map_err(at("thread pool"))
}

fn output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::runtime("output", format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(at("output")),
    }
}

pub fn batch(args: &BatchArgs) -> CliResult<()> {
    let config = args.config.config()?;
    let mut rows = read_manifest(&args.manifest)?;
    rows.sort_by(|a, b| a.date.cmp(&b.date));
    if let Some(dir) = &args.trace_dir {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime("trace", format!("{}: {e}", dir.display())))?;
    }

    let run = |row: &ManifestRow| -> CliResult<f64> {
        let scene = load_scene(
            &row.date,
            &row.vv_path,
            &row.vh_path,
            &row.dem_path,
            &row.aoi_path,
        )?;
        let result = run_scene(&scene, &config)?;
        if let Some(dir) = &args.trace_dir {
            write_trace(&result, &dir.join(format!("{}.json", row.date)))?;
        }
        Ok(result.level)
    };
    let results: Vec<CliResult<f64>> =
        thread_pool(args.jobs)?.install(|| rows.par_iter().map(run).collect());

    let mut csv = String::from("date,level_m\n");
    let mut failed = 0;
    for (row, result) in rows.iter().zip(results) {
        match result {
            Ok(level) => {
                csv.push_str(&record(&row.date, level));
                csv.push('\n');
            }
            Err(e) => {
                failed += 1;
                eprintln!("shorefit: warning: skipping {}: {e}", row.date);
            }
        }
    }
    output(args.out.as_deref(), &csv)?;
    if !rows.is_empty() && failed == rows.len() {
        return Err(CliError::runtime(
            "batch",
            format!("all {failed} scenes failed"),
        ));
    }
    Ok(())
}

fn read_series(path: &Path) -> CliResult<TimeSeries> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::runtime("load", format!("{}: {e}", path.display())))?;
    TimeSeries::read_csv(BufReader::new(file), &path.display().to_string()).map_err(at("load"))
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<()> {
    if args.dem_floor.is_nan() {
        return Err(CliError::validation(
            "config",
            "--dem-floor must be a number",
        ));
    }
    let estimates = read_series(&args.estimates)?;
    let reference = read_series(&args.reference)?;
    let report = evaluate_series(&estimates, &reference, args.dem_floor).map_err(at("evaluate"))?;
    let r2 = report.r2.map_or("n/a".to_string(), |r| format!("{r:.4}"));
    println!("R2                    {r2}");
    println!("RMSE (m)              {:.4}", report.rmse);
    println!("MAE (m)               {:.4}", report.mae);
    println!("dates                 {}", report.n_dates);
    println!("excluded below floor  {}", report.excluded_below_floor);
    println!("{}", serde_json::to_string(&report).map_err(at("output"))?);
    Ok(())
}

pub fn plot(args: &PlotArgs) -> CliResult<()> {
    let estimates = read_series(&args.estimates)?;
    let reference = args.reference.as_deref().map(read_series).transpose()?;
    let svg = plot::render(&estimates, reference.as_ref()).map_err(at("plot"))?;
    output(Some(&args.out), &svg)
}

pub fn calibrate(args: &CalibrateArgs) -> CliResult<()> {
    let config = args.config.config()?;
    if args.radii.is_empty() {
        return Err(CliError::validation(
            "config",
            "--radii needs at least one radius",
        ));
    }
    let rows = read_manifest(&args.manifest)?;
    let reference = read_series(&args.reference)?;
    let pool = thread_pool(args.jobs)?;
    let scenes: Vec<Scene> = pool.install(|| {
        rows.par_iter()
            .filter_map(|row| {
                let level = reference.entries().iter().find(|(d, _)| *d == row.date)?.1;
                Some(
                    load_scene(
                        &row.date,
                        &row.vv_path,
                        &row.vh_path,
                        &row.dem_path,
                        &row.aoi_path,
                    )
                    .map(|mut s| {
                        s.reference_level = Some(level);
                        s
                    }),
                )
            })
            .collect::<CliResult<Vec<Scene>>>()
    })?;
    if scenes.is_empty() {
        return Err(CliError::runtime(
            "calibrate",
            "no manifest date has a reference level",
        ));
    }
    let calibration = pool
        .install(|| calibrate_kernel(&scenes, &args.radii, &config))
        .map_err(at("calibrate"))?;
    println!("radius,mae_m,selected");
    for (radius, mae) in &calibration.mae_by_radius {
        println!("{radius},{mae:.4},{}", *radius == calibration.radius);
    }
    Ok(())
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    if !is_iso_date(&args.date) {
        return Err(CliError::validation(
            "config",
            format!("'{}' is not an ISO-8601 date", args.date),
        ));
    }
    let params = SynthParams {
        width: args.size,
        height: args.size,
        pixel_size: args.pixel_size,
        shape: args.shape,
        base: args.base,
        slope: args.slope,
        dem_quantum: args.dem_quantum,
        true_level: args.true_level,
        water_mean: args.water_mean,
        water_std: args.water_std,
        land_mean: args.land_mean,
        land_std: args.land_std,
        salt_prob: args.salt_prob,
        seed: args.seed,
        aoi_margin: args.aoi_margin,
        crs: args.crs.clone(),
    };
    params
        .validate()
        .map_err(|e| CliError::validation("config", e))?;
    let scene = make_scene(&params).map_err(at("synth"))?;

    let dir = &args.out_dir;
    fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime("write", format!("{}: {e}", dir.display())))?;
    let name = |suffix: &str| PathBuf::from(format!("{}_{suffix}", args.date));
    let row = ManifestRow {
        date: args.date.clone(),
        vv_path: name("vv.tif"),
        vh_path: name("vh.tif"),
        dem_path: name("dem.tif"),
        aoi_path: name("aoi.geojson"),
    };
    let manifest = dir.join("manifest.csv");
    if manifest.exists() && read_manifest(&manifest)?.iter().any(|r| r.date == row.date) {
        return Err(CliError::runtime(
            "manifest",
            format!(
                "date {} is already listed in {}",
                row.date,
                manifest.display()
            ),
        ));
    }
    write_raster(&scene.vv, dir.join(&row.vv_path)).map_err(at("write"))?;
    write_raster(&scene.vh, dir.join(&row.vh_path)).map_err(at("write"))?;
    write_raster(&scene.dem, dir.join(&row.dem_path)).map_err(at("write"))?;
    write_polygon(&scene.aoi, dir.join(&row.aoi_path)).map_err(at("write"))?;
    append_row(&manifest, &row)?;

    let reference_path = dir.join("reference.csv");
    let mut reference = if reference_path.exists() {
        read_series(&reference_path)?.entries().to_vec()
    } else {
        Vec::new()
    };
    reference.push((args.date.clone(), params.true_level));
    let reference = TimeSeries::new(reference).map_err(at("reference"))?;
    let mut buf = Vec::new();
    reference.write_csv(&mut buf).map_err(at("reference"))?;
    fs::write(&reference_path, buf).map_err(|e| {
        CliError::runtime("reference", format!("{}: {e}", reference_path.display()))
    })?;
    println!("{}", dir.join("manifest.csv").display());
    Ok(())
}
