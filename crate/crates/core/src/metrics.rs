//! Agreement between estimated and reference level series, and the speckle
//! kernel calibration search.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_level, EstimatorConfig};
use crate::par;
use crate::scene::Scene;

/// Dated level values with unique, ascending dates (ISO-8601 days compare
/// correctly as strings).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    entries: Vec<(String, f64)>,
}

impl TimeSeries {
    /// Sorts by date; duplicate dates are rejected.
    pub fn new(mut entries: Vec<(String, f64)>) -> Result<TimeSeries> {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::param(format!("duplicate date {}", w[0].0)));
        }
        Ok(TimeSeries { entries })
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `date,level_m` CSV (header required).
    pub fn read_csv(reader: impl BufRead, source: &str) -> Result<TimeSeries> {
        let mut lines = reader.lines().enumerate();
        let header = match lines.next() {
            Some((_, line)) => line.map_err(|e| Error::format(source, e.to_string()))?,
            None => {
                return Err(Error::format(
                    source,
                    "empty file, expected header date,level_m",
                ))
            }
        };
        if header.trim().trim_start_matches('\u{feff}') != "date,level_m" {
            return Err(Error::format(
                source,
                format!("expected header date,level_m, found '{}'", header.trim()),
            ));
        }
        let mut entries = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::format(source, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::format(source, format!("line {}: {msg}", i + 1));
            let (date, value) = line
                .split_once(',')
                .ok_or_else(|| bad(format!("expected 2 fields in '{line}'")))?;
            let date = date.trim();
            if !is_iso_date(date) {
                return Err(bad(format!("'{date}' is not an ISO-8601 date")));
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("'{}' is not a number", value.trim())))?;
            if !value.is_finite() {
                return Err(bad(format!("non-finite level {value}")));
            }
            entries.push((date.to_string(), value));
        }
        TimeSeries::new(entries).map_err(|e| Error::format(source, e.to_string()))
    }

    /// Writes `date,level_m` CSV with 4 decimals.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "date,level_m")?;
        for (date, value) in &self.entries {
            writeln!(out, "{date},{value:.4}")?;
        }
        Ok(())
    }
}

/// Calendar date in `YYYY-MM-DD` form.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    (s.len() == 10)
        .then(|| s.parse::<NaiveDate>().ok())
        .flatten()
}

pub fn is_iso_date(s: &str) -> bool {
    parse_date(s).is_some()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub date: String,
    pub estimate: f64,
    pub reference: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Joined {
    pub pairs: Vec<Pair>,
    pub excluded_below_floor: usize,
}

/// Inner join on date, dropping dates whose reference is at or below the
/// DEM floor.
pub fn join_series(
    estimates: &TimeSeries,
    reference: &TimeSeries,
    dem_floor: f64,
) -> Result<Joined> {
    let refs: BTreeMap<&str, f64> = reference
        .entries
        .iter()
        .map(|(d, v)| (d.as_str(), *v))
        .collect();
    let mut pairs = Vec::new();
    let mut excluded = 0;
    for (date, est) in &estimates.entries {
        if let Some(&r) = refs.get(date.as_str()) {
            if r <= dem_floor {
                excluded += 1;
            } else {
                pairs.push(Pair {
                    date: date.clone(),
                    estimate: *est,
                    reference: r,
                });
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::NoEvaluableDates(if excluded > 0 {
            format!("all {excluded} common dates have reference at or below the DEM floor")
        } else {
            "estimates and reference share no date".into()
        }));
    }
    Ok(Joined {
        pairs,
        excluded_below_floor: excluded,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Absent when the reference is constant.
    pub r2: Option<f64>,
    pub rmse: f64,
    pub mae: f64,
    pub n_dates: usize,
    pub excluded_below_floor: usize,
}

pub fn evaluate(pairs: &[Pair]) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(Error::NoEvaluableDates("no pairs to evaluate".into()));
    }
    let n = pairs.len() as f64;
    let mae = pairs
        .iter()
        .map(|p| (p.estimate - p.reference).abs())
        .sum::<f64>()
        / n;
    let ss_res: f64 = pairs
        .iter()
        .map(|p| (p.estimate - p.reference).powi(2))
        .sum();
    let rmse = (ss_res / n).sqrt();
    let mean = pairs.iter().map(|p| p.reference).sum::<f64>() / n;
    let ss_tot: f64 = pairs.iter().map(|p| (p.reference - mean).powi(2)).sum();
    let r2 = (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
    Ok(EvalReport {
        r2,
        rmse,
        mae,
        n_dates: pairs.len(),
        excluded_below_floor: 0,
    })
}

/// Join plus evaluate, carrying the exclusion count into the report.
pub fn evaluate_series(
    estimates: &TimeSeries,
    reference: &TimeSeries,
    dem_floor: f64,
) -> Result<EvalReport> {
    let joined = join_series(estimates, reference, dem_floor)?;
    let mut report = evaluate(&joined.pairs)?;
    report.excluded_below_floor = joined.excluded_below_floor;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub radius: usize,
    /// `(radius, MAE)` in the order the radii were given.
    pub mae_by_radius: Vec<(usize, f64)>,
}

/// Speckle radius with the lowest MAE against the scenes' reference levels
/// (smallest radius on ties). Scenes without a reference are ignored; a
/// scene that fails to estimate fails the calibration.
pub fn calibrate_kernel(
    scenes: &[Scene],
    radii: &[usize],
    config: &EstimatorConfig,
) -> Result<Calibration> {
    if radii.is_empty() {
        return Err(Error::param("no candidate kernel radii"));
    }
    let scored: Vec<(&Scene, f64)> = scenes
        .iter()
        .filter_map(|s| s.reference_level.map(|r| (s, r)))
        .collect();
    if scored.is_empty() {
        return Err(Error::param("no scene has a reference level"));
    }
    let jobs: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|ri| (0..scored.len()).map(move |si| (ri, si)))
        .collect();
    let errors = par::map_slice(&jobs, |&(ri, si)| {
        let cfg = EstimatorConfig {
            speckle_radius: radii[ri],
            ..config.clone()
        };
        let (scene, reference) = scored[si];
        estimate_level(scene, &cfg).map(|r| (r.level - reference).abs())
    });
    let errors = errors.into_iter().collect::<Result<Vec<f64>>>()?;
    let mae_by_radius: Vec<(usize, f64)> = radii
        .iter()
        .enumerate()
        .map(|(ri, &r)| {
            let row = &errors[ri * scored.len()..(ri + 1) * scored.len()];
            (r, row.iter().sum::<f64>() / row.len() as f64)
        })
        .collect();
    let (radius, _) = mae_by_radius
        .iter()
        .copied()
        .fold(None::<(usize, f64)>, |best, (r, m)| match best {
            Some((br, bm)) if bm < m || (bm == m && br <= r) => Some((br, bm)),
            _ => Some((r, m)),
        })
        .expect("radii is non-empty");
    Ok(Calibration {
        radius,
        mae_by_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(est: &[f64], reference: &[f64]) -> Vec<Pair> {
        est.iter()
            .zip(reference)
            .enumerate()
            .map(|(i, (&e, &r))| Pair {
                date: format!("2020-01-{:02}", i + 1),
                estimate: e,
                reference: r,
            })
            .collect()
    }

    fn series(rows: &[(&str, f64)]) -> TimeSeries {
        TimeSeries::new(rows.iter().map(|(d, v)| (d.to_string(), *v)).collect()).unwrap()
    }

    #[test]
    fn worked_example() {
        let r = evaluate(&pairs(&[1.5, 2.0, 2.5], &[1.0, 2.0, 3.0])).unwrap();
        assert!((r.mae - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.rmse - (0.5f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((r.r2.unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(r.n_dates, 3);
    }

    #[test]
    fn perfect_and_constant() {
        let r = evaluate(&pairs(&[1.0, 2.0], &[1.0, 2.0])).unwrap();
        assert_eq!((r.r2, r.rmse, r.mae), (Some(1.0), 0.0, 0.0));
        let r = evaluate(&pairs(&[1.0, 1.0], &[0.0, 0.0])).unwrap();
        assert_eq!((r.r2, r.rmse, r.mae), (None, 1.0, 1.0));
    }

    #[test]
    fn join_excludes_below_floor() {
        let est = series(&[
            ("2020-01-01", 1.0),
            ("2020-01-02", 2.0),
            ("2020-01-03", 3.0),
            ("2020-01-09", 9.0),
        ]);
        let reference = series(&[
            ("2020-01-01", 5.0),
            ("2020-01-02", 0.5),
            ("2020-01-03", 7.0),
            ("2020-01-04", 1.0),
        ]);
        let j = join_series(&est, &reference, 1.0).unwrap();
        assert_eq!(j.pairs.len(), 2);
        assert_eq!(j.excluded_below_floor, 1);
        let j = join_series(&est, &reference, f64::NEG_INFINITY).unwrap();
        assert_eq!(j.pairs.len(), 3);
        let other = series(&[("2021-01-01", 1.0)]);
        assert!(join_series(&est, &other, 0.0).is_err());
        assert!(join_series(&est, &reference, 100.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = series(&[("2020-02-01", 191.3359375), ("2020-01-01", 12.0)]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "date,level_m\n2020-01-01,12.0000\n2020-02-01,191.3359\n"
        );
        let back = TimeSeries::read_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(back.entries()[1], ("2020-02-01".to_string(), 191.3359));
    }

    #[test]
    fn csv_errors() {
        assert!(TimeSeries::read_csv("".as_bytes(), "x").is_err());
        assert!(TimeSeries::read_csv("day,level\n".as_bytes(), "x").is_err());
        assert!(TimeSeries::read_csv("date,level_m\n2020-13-01,1\n".as_bytes(), "x").is_err());
        assert!(TimeSeries::read_csv("date,level_m\n2020-01-01,abc\n".as_bytes(), "x").is_err());
        assert!(
            TimeSeries::read_csv("date,level_m\n2020-01-01,1\n2020-01-01,2\n".as_bytes(), "x")
                .is_err()
        );
        assert!(TimeSeries::read_csv("date,level_m\n".as_bytes(), "x")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn iso_dates() {
        assert!(is_iso_date("2019-06-30"));
        assert!(!is_iso_date("2019-6-30"));
        assert!(!is_iso_date("2019-00-10"));
        assert!(!is_iso_date("20190630xx"));
        assert!(!is_iso_date("2019-02-30"));
    }
}
