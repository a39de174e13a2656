mod commands;
mod error;
mod manifest;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shorefit::floodsim::Connectivity;
use shorefit::synth::DemShape;
use shorefit::EstimatorConfig;

use crate::error::CliError;

/// Reservoir water level estimation from SAR backscatter and a DEM.
#[derive(Parser, Debug)]
#[command(name = "shorefit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the water level of one scene.
    Estimate(EstimateArgs),
    /// Estimate every scene of a manifest into a `date,level_m` CSV.
    Batch(BatchArgs),
    /// Compare an estimate series against a reference series.
    Evaluate(EvaluateArgs),
    /// Draw estimate (and reference) series as an SVG chart.
    Plot(PlotArgs),
    /// Pick the speckle kernel radius with the lowest MAE.
    Calibrate(CalibrateArgs),
    /// Write a synthetic scene and append it to a manifest.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Candidate levels per search iteration.
    #[arg(long, default_value_t = 9)]
    pub sample_num: usize,
    /// Stop once the candidate spacing is at or below this (m).
    #[arg(long, default_value_t = 1.0)]
    pub tolerance: f64,
    /// Focal median radius (px).
    #[arg(long, default_value_t = 3)]
    pub kernel_radius: usize,
    /// AOI expansion (m).
    #[arg(long, default_value_t = 500.0)]
    pub buffer_meters: f64,
    /// Canny Gaussian sigma (px).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Flood connectivity, 4 or 8.
    #[arg(long, default_value_t = Connectivity::Eight)]
    pub connectivity: Connectivity,
}

impl ConfigArgs {
    pub fn config(&self) -> Result<EstimatorConfig, CliError> {
        let config = EstimatorConfig {
            sample_num: self.sample_num,
            tolerance: self.tolerance,
            speckle_radius: self.kernel_radius,
            gaussian_sigma: self.sigma,
            buffer_distance: self.buffer_meters,
            connectivity: self.connectivity,
        };
        config
            .validate()
            .map_err(|e| CliError::validation("config", e))?;
        Ok(config)
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub vv: PathBuf,
    #[arg(long)]
    pub vh: PathBuf,
    #[arg(long)]
    pub dem: PathBuf,
    /// AOI polygon (GeoJSON).
    #[arg(long)]
    pub aoi: PathBuf,
    /// Date written in the output record [default: VV file stem].
    #[arg(long)]
    pub date: Option<String>,
    /// Write the search trace as JSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    /// CSV with header date,vv_path,vh_path,dem_path,aoi_path.
    pub manifest: PathBuf,
    /// Output CSV [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scenes processed concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Directory for per-scene JSON traces (`<date>.json`).
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub estimates: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    /// Dates whose reference level is at or below this are skipped (m).
    #[arg(long, default_value_t = f64::NEG_INFINITY, allow_negative_numbers = true)]
    pub dem_floor: f64,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long)]
    pub estimates: PathBuf,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Scene manifest; dates are matched against the reference CSV.
    pub manifest: PathBuf,
    /// Reference levels, `date,level_m`.
    #[arg(long)]
    pub reference: PathBuf,
    /// Candidate kernel radii (px).
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3, 4, 5])]
    pub radii: Vec<usize>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "2020-01-01")]
    pub date: String,
    /// Grid width and height (px).
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    #[arg(long, default_value_t = 10.0)]
    pub pixel_size: f64,
    #[arg(long, default_value_t = DemShape::Bowl, value_parser = parse_shape)]
    pub shape: DemShape,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub base: f64,
    /// Elevation gain per pixel (m/px).
    #[arg(long, default_value_t = 0.04)]
    pub slope: f64,
    /// DEM vertical resolution (m); 0 for continuous elevations.
    #[arg(long, default_value_t = 1.0)]
    pub dem_quantum: f64,
    #[arg(long, default_value_t = 12.0, allow_negative_numbers = true)]
    pub true_level: f64,
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    pub water_mean: f64,
    #[arg(long, default_value_t = 0.0)]
    pub water_std: f64,
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    pub land_mean: f64,
    #[arg(long, default_value_t = 0.0)]
    pub land_std: f64,
    #[arg(long, default_value_t = 0.0)]
    pub salt_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gap between the wet area and the AOI edge (m).
    #[arg(long, default_value_t = 200.0)]
    pub aoi_margin: f64,
    #[arg(long, default_value = "EPSG:32755")]
    pub crs: String,
}

fn parse_shape(s: &str) -> Result<DemShape, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Estimate(args) => commands::estimate(&args),
        Command::Batch(args) => commands::batch(&args),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Plot(args) => commands::plot(&args),
        Command::Calibrate(args) => commands::calibrate(&args),
        Command::Synth(args) => commands::synth(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shorefit: {e}");
            ExitCode::from(e.kind.exit_code())
        }
    }
}
