use crate::par;
use crate::raster::Raster;

/// Offsets `(dr, dc)` of the circular kernel: `dr² + dc² <= radius²`.
pub fn circle_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut out = Vec::new();
    for dr in -r..=r {
        for dc in -r..=r {
            if dr * dr + dc * dc <= r * r {
                out.push((dr, dc));
            }
        }
    }
    out
}

/// Focal median over a circular window of `radius` pixels.
///
/// Only in-bounds, valid samples take part; the window shrinks at borders
/// instead of padding. An even count takes the mean of the two middle
/// values. Pixels whose window holds no valid sample stay nodata.
pub fn speckle_filter(input: &Raster, radius: usize) -> Raster {
    if radius == 0 {
        return input.clone();
    }
    let offsets = circle_offsets(radius);
    let (w, h) = (input.width() as isize, input.height() as isize);
    let src = input.values();
    let fill = input.nodata().unwrap_or(f64::NAN);
    let mut out = vec![0.0; src.len()];
    par::for_each_row(&mut out, input.width(), |row, dst| {
        let r = row as isize;
        let mut window = Vec::with_capacity(offsets.len());
        for (c, o) in dst.iter_mut().enumerate() {
            let c = c as isize;
            window.clear();
            for &(dr, dc) in &offsets {
                let (rr, cc) = (r + dr, c + dc);
                if rr < 0 || cc < 0 || rr >= h || cc >= w {
                    continue;
                }
                let v = src[(rr * w + cc) as usize];
                if input.is_valid(v) {
                    window.push(v);
                }
            }
            *o = median_in_place(&mut window).unwrap_or(fill);
        }
    });
    let nodata = if out.iter().any(|v| v.is_nan()) {
        Some(fill)
    } else {
        input.nodata()
    };
    input.with_values(out, nodata)
}

/// Median by selection; reorders `values`.
pub(crate) fn median_in_place(values: &mut [f64]) -> Option<f64> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let cmp = |a: &f64, b: &f64| a.total_cmp(b);
    let (_, &mut upper, _) = values.select_nth_unstable_by(n / 2, cmp);
    if n % 2 == 1 {
        return Some(upper);
    }
    let lower = values[..n / 2]
        .iter()
        .copied()
        .max_by(cmp)
        .expect("non-empty lower half");
    Some(0.5 * (lower + upper))
}
