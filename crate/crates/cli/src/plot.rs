//! Static SVG time-series chart.

use std::fmt::Write;

use chrono::Datelike;
use shorefit::metrics::{parse_date, TimeSeries};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64) -> Axis {
        if hi > lo {
            Axis { lo, hi }
        } else {
            Axis {
                lo: lo - 1.0,
                hi: hi + 1.0,
            }
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn day_number(date: &str) -> f64 {
    parse_date(date)
        .map(|d| d.num_days_from_ce() as f64)
        .unwrap_or(0.0)
}

fn nice_step(range: f64, target: usize) -> f64 {
    let raw = range / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn decimals(step: f64) -> usize {
    if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    }
}

/// Renders the estimate series and, if given, the reference series.
/// Output depends only on the inputs.
pub fn render(estimates: &TimeSeries, reference: Option<&TimeSeries>) -> Result<String, String> {
    if estimates.is_empty() {
        return Err("estimate series is empty".into());
    }
    let mut series = vec![("estimate", "#1f77b4", estimates)];
    if let Some(r) = reference.filter(|r| !r.is_empty()) {
        series.push(("reference", "#d62728", r));
    }
    let all = || series.iter().flat_map(|(_, _, s)| s.entries().iter());
    let days = Axis::new(
        all()
            .map(|(d, _)| day_number(d))
            .fold(f64::INFINITY, f64::min),
        all()
            .map(|(d, _)| day_number(d))
            .fold(f64::NEG_INFINITY, f64::max),
    );
    let (vmin, vmax) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| {
        (lo.min(*v), hi.max(*v))
    });
    let pad = (vmax - vmin) * 0.05;
    let levels = Axis::new(vmin - pad, vmax + pad);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |day: f64| LEFT + days.frac(day) * plot_w;
    let y = |v: f64| TOP + (1.0 - levels.frac(v)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    // level axis
    let step = nice_step(levels.hi - levels.lo, 6);
    let prec = decimals(step);
    let mut tick = (levels.lo / step).ceil() * step;
    while tick <= levels.hi {
        let ty = y(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{tick:.prec$}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            ty + 4.0
        );
        tick += step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {:.2})" text-anchor="middle">level (m)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    // date axis: evenly spaced labels between the first and last date
    let ticks = 6;
    for i in 0..=ticks {
        let day = days.lo + (days.hi - days.lo) * i as f64 / ticks as f64;
        let label = chrono::NaiveDate::from_num_days_from_ce_opt(day.round() as i32)
            .map(|d| d.format("%Y-%m-%d").to_string())
            .unwrap_or_default();
        let tx = x(day);
        let _ = writeln!(
            svg,
            r#"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">date</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );

    for (k, (label, color, s)) in series.iter().enumerate() {
        let points: Vec<(f64, f64)> = s
            .entries()
            .iter()
            .map(|(d, v)| (x(day_number(d)), y(*v)))
            .collect();
        let path: Vec<String> = points
            .iter()
            .map(|(px, py)| format!("{px:.2},{py:.2}"))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series {label}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for (px, py) in &points {
            if k == 0 {
                let _ = writeln!(
                    svg,
                    r#"<circle class="marker {label}" cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#
                );
            } else {
                let _ = writeln!(
                    svg,
                    r#"<rect class="marker {label}" x="{:.2}" y="{:.2}" width="6" height="6" fill="{color}"/>"#,
                    px - 3.0,
                    py - 3.0
                );
            }
        }
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = LEFT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text class="legend" x="{}" y="{}">{label}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
