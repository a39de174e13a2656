use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Fitness at one candidate level, with the shoreline size it was summed
/// over (0 when unknown).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub fitness: f64,
    pub shoreline_pixels: usize,
}

impl From<f64> for Evaluation {
    fn from(fitness: f64) -> Self {
        Evaluation {
            fitness,
            shoreline_pixels: 0,
        }
    }
}

/// One pass of the sampling search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iteration {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
    pub candidates: Vec<f64>,
    pub values: Vec<f64>,
    pub shoreline_pixels: Vec<usize>,
    pub best_level: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitnessTrace {
    pub iterations: Vec<Iteration>,
}

impl FitnessTrace {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn best_level(&self) -> Option<f64> {
        self.iterations.last().map(|it| it.best_level)
    }
}

/// `n` evenly spaced values from `lower` to `upper`, both included.
///
/// Value `i` is `lower + i * step` with `step = (upper - lower) / (n - 1)`,
/// so dyadic brackets produce exact candidates; the last value is pinned to
/// `upper`.
pub fn linspace(lower: f64, upper: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::param(format!("linspace needs n >= 2, got {n}")));
    }
    if !(lower <= upper) {
        return Err(Error::param(format!(
            "linspace bounds out of order: {lower} > {upper}"
        )));
    }
    let step = (upper - lower) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| lower + i as f64 * step).collect();
    out[n - 1] = upper;
    Ok(out)
}

/// Coarse-to-fine sampling search for the level maximizing `fitness`.
///
/// Each iteration samples `sample_num` levels across `[lower, upper]`,
/// keeps the best (lowest level on ties), then re-centers the bracket on
/// it with half-width equal to the candidate spacing. Stops after the
/// first iteration whose spacing is at most `tolerance`. The bracket is
/// never clamped back to the initial range.
pub fn search<F>(
    lower: f64,
    upper: f64,
    sample_num: usize,
    tolerance: f64,
    fitness: F,
) -> Result<FitnessTrace>
where
    F: Fn(f64) -> Evaluation + Sync + Send,
{
    if sample_num < 4 {
        return Err(Error::param(format!(
            "sample_num must be at least 4, got {sample_num}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::param(format!(
            "tolerance must be > 0, got {tolerance}"
        )));
    }
    let (mut lower, mut upper) = (lower, upper);
    let mut trace = FitnessTrace::default();
    loop {
        let candidates = linspace(lower, upper, sample_num)?;
        let evals = par::map_slice(&candidates, |&level| fitness(level));
        let mut best = 0;
        for (i, e) in evals.iter().enumerate() {
            // strict comparison keeps the lowest level on ties; NaN never wins
            if e.fitness > evals[best].fitness
                || evals[best].fitness.is_nan() && !e.fitness.is_nan()
            {
                best = i;
            }
        }
        let best_level = candidates[best];
        let step = (upper - lower) / (sample_num - 1) as f64;
        trace.iterations.push(Iteration {
            lower,
            upper,
            step,
            values: evals.iter().map(|e| e.fitness).collect(),
            shoreline_pixels: evals.iter().map(|e| e.shoreline_pixels).collect(),
            candidates,
            best_level,
        });
        if step <= tolerance {
            return Ok(trace);
        }
        lower = best_level - step;
        upper = best_level + step;
    }
}

/// Upper bound on search iterations:
/// `ceil(log_{(n-1)/2}(range / ((n-1) tol))) + 1`, at least 1.
pub fn iteration_bound(range: f64, sample_num: usize, tolerance: f64) -> Result<usize> {
    if sample_num <= 3 {
        return Err(Error::param(format!(
            "iteration bound needs sample_num > 3 (log base (n-1)/2 > 1), got {sample_num}"
        )));
    }
    if !(range > 0.0) || !(tolerance > 0.0) {
        return Err(Error::param("range and tolerance must be positive"));
    }
    let base = (sample_num - 1) as f64 / 2.0;
    let ratio = range / ((sample_num - 1) as f64 * tolerance);
    let k = (ratio.ln() / base.ln()).ceil() + 1.0;
    Ok(if k < 1.0 { 1 } else { k as usize })
}
