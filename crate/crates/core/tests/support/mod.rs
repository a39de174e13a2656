//! Slow, obviously-correct reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::VecDeque;

use shorefit::floodsim::Connectivity;
use shorefit::raster::{GeoTransform, Raster};

pub fn raster(w: usize, h: usize, values: Vec<f64>) -> Raster {
    Raster::new(
        w,
        h,
        values,
        GeoTransform::north_up(0.0, h as f64, 1.0).unwrap(),
        None,
        "",
    )
    .unwrap()
}

fn neighbors(connectivity: Connectivity) -> &'static [(isize, isize)] {
    match connectivity {
        Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
        Connectivity::Eight => &[
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ],
    }
}

/// BFS flood fill, components numbered from 1 in order of their first
/// pixel in row-major order.
pub fn bfs_labels(bits: &[bool], w: usize, h: usize, connectivity: Connectivity) -> Vec<u32> {
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    for start in 0..w * h {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (r, c) = ((i / w) as isize, (i % w) as isize);
            for &(dr, dc) in neighbors(connectivity) {
                let (rr, cc) = (r + dr, c + dc);
                if rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                    continue;
                }
                let j = rr as usize * w + cc as usize;
                if bits[j] && labels[j] == 0 {
                    labels[j] = next;
                    queue.push_back(j);
                }
            }
        }
    }
    labels
}

/// Windowed median by full sort over the circular window, NaN for an
/// empty window.
pub fn sort_median(
    values: &[f64],
    w: usize,
    h: usize,
    radius: usize,
    valid: impl Fn(f64) -> bool,
) -> Vec<f64> {
    let r = radius as isize;
    let mut out = Vec::with_capacity(values.len());
    for row in 0..h as isize {
        for col in 0..w as isize {
            let mut window = Vec::new();
            for rr in row - r..=row + r {
                for cc in col - r..=col + r {
                    let inside = rr >= 0 && cc >= 0 && rr < h as isize && cc < w as isize;
                    if inside && (rr - row).pow(2) + (cc - col).pow(2) <= r * r {
                        let v = values[rr as usize * w + cc as usize];
                        if valid(v) {
                            window.push(v);
                        }
                    }
                }
            }
            window.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = window.len();
            out.push(match n {
                0 => f64::NAN,
                _ if n % 2 == 1 => window[n / 2],
                _ => (window[n / 2 - 1] + window[n / 2]) / 2.0,
            });
        }
    }
    out
}

/// Set pixels with a 4-neighbor that is unset or off the raster.
pub fn brute_shoreline(bits: &[bool], w: usize, h: usize) -> Vec<(usize, usize)> {
    let at = |r: isize, c: isize| {
        r >= 0 && c >= 0 && r < h as isize && c < w as isize && bits[r as usize * w + c as usize]
    };
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let (ri, ci) = (r as isize, c as isize);
            if at(ri, ci)
                && [(-1, 0), (1, 0), (0, -1), (0, 1)]
                    .iter()
                    .any(|&(dr, dc)| !at(ri + dr, ci + dc))
            {
                out.push((r, c));
            }
        }
    }
    out
}

/// Scores every split of `bins` equal-width bins over the sample range by
/// the between-class variance of bin-center values, computed straight from
/// the samples. Returns `(boundary, variance)` per split, lowest first.
pub fn otsu_splits(samples: &[f64], bins: usize) -> Vec<(f64, f64)> {
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let bin_of = |v: f64| (((v - min) / width).floor() as usize).min(bins - 1);
    let center = |v: f64| min + (bin_of(v) as f64 + 0.5) * width;
    let n = samples.len() as f64;
    (1..bins)
        .map(|k| {
            let lower: Vec<f64> = samples
                .iter()
                .filter(|&&v| bin_of(v) < k)
                .map(|&v| center(v))
                .collect();
            let upper: Vec<f64> = samples
                .iter()
                .filter(|&&v| bin_of(v) >= k)
                .map(|&v| center(v))
                .collect();
            let var = if lower.is_empty() || upper.is_empty() {
                0.0
            } else {
                let m0 = lower.iter().sum::<f64>() / lower.len() as f64;
                let m1 = upper.iter().sum::<f64>() / upper.len() as f64;
                (lower.len() as f64 / n) * (upper.len() as f64 / n) * (m0 - m1).powi(2)
            };
            (min + k as f64 * width, var)
        })
        .collect()
}

/// First split whose variance is maximal up to relative rounding `rel`.
pub fn exhaustive_otsu(samples: &[f64], bins: usize, rel: f64) -> f64 {
    let splits = otsu_splits(samples, bins);
    let best = splits.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    splits
        .iter()
        .find(|s| s.1 >= best - rel * best.abs())
        .unwrap()
        .0
}

/// Every pixel within `distance` (map units) of a set pixel, checked pairwise.
pub fn brute_dilate(
    bits: &[bool],
    w: usize,
    h: usize,
    sx: f64,
    sy: f64,
    distance: f64,
) -> Vec<bool> {
    let set: Vec<(f64, f64)> = (0..w * h)
        .filter(|&i| bits[i])
        .map(|i| ((i % w) as f64 * sx, (i / w) as f64 * sy))
        .collect();
    (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64 * sx, (i / w) as f64 * sy);
            set.iter()
                .any(|&(px, py)| (x - px).powi(2) + (y - py).powi(2) <= distance * distance)
        })
        .collect()
}
