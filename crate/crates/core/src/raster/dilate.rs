use crate::error::{Error, Result};
use crate::par;

use super::grid::RegionMask;

/// Grows `mask` by `distance` map units.
///
/// A pixel is set when the Euclidean distance between its center and the
/// center of some originally set pixel is at most `distance`, measured with
/// the grid's (possibly anisotropic) pixel size. Runs an exact separable
/// squared distance transform, so cost is linear in the grid size and
/// independent of `distance`.
pub fn dilate_mask(mask: &RegionMask, distance: f64) -> Result<RegionMask> {
    if !(distance >= 0.0) || !distance.is_finite() {
        return Err(Error::param(format!(
            "dilation distance must be a finite value >= 0, got {distance}"
        )));
    }
    if distance == 0.0 || mask.is_empty() {
        return Ok(mask.clone());
    }
    let grid = mask.grid();
    let (w, h) = (grid.width, grid.height);
    let sx2 = grid.transform.pixel_width * grid.transform.pixel_width;
    let sy2 = grid.transform.pixel_height * grid.transform.pixel_height;

    // vertical pass, one column at a time
    let columns: Vec<Vec<f64>> = par::map_range(w, |c| {
        let f: Vec<f64> = (0..h)
            .map(|r| if mask.get(r, c) { 0.0 } else { f64::INFINITY })
            .collect();
        let mut out = vec![0.0; h];
        lower_envelope(&f, sy2, &mut out);
        out
    });
    let mut d2 = vec![0.0; w * h];
    for (c, col) in columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            d2[r * w + c] = v;
        }
    }

    // horizontal pass in place
    par::for_each_row(&mut d2, w, |_, row| {
        let f = row.to_vec();
        lower_envelope(&f, sx2, row);
    });

    let limit = distance * distance;
    Ok(RegionMask::from_bits(
        grid,
        d2.into_iter().map(|d| d <= limit).collect(),
    ))
}

/// `out[q] = min_p scale2 * (q - p)^2 + f[p]` over finite `f[p]`
/// (lower envelope of parabolas).
fn lower_envelope(f: &[f64], scale2: f64, out: &mut [f64]) {
    let n = f.len();
    let mut sites: Vec<usize> = Vec::with_capacity(n);
    let mut bounds: Vec<f64> = Vec::with_capacity(n + 1);
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        let fq = f[q] + scale2 * (q * q) as f64;
        let mut s = f64::NEG_INFINITY;
        while let Some(&v) = sites.last() {
            let fv = f[v] + scale2 * (v * v) as f64;
            s = (fq - fv) / (2.0 * scale2 * (q - v) as f64);
            if s <= *bounds.last().unwrap() {
                sites.pop();
                bounds.pop();
                s = f64::NEG_INFINITY;
            } else {
                break;
            }
        }
        sites.push(q);
        bounds.push(s);
    }
    if sites.is_empty() {
        out.fill(f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while k + 1 < sites.len() && bounds[k + 1] < q as f64 {
            k += 1;
        }
        let p = sites[k];
        let d = q as f64 - p as f64;
        *o = scale2 * d * d + f[p];
    }
}
