use crate::error::{Error, Result};

use super::grid::RegionMask;
use super::transform::Grid;

/// Polygon in map coordinates. The first ring is the outer boundary, any
/// further rings are holes. Rings are closed: first vertex equals last.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    rings: Vec<Vec<(f64, f64)>>,
}

impl Polygon {
    pub fn new(rings: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::InvalidPolygon("polygon has no rings".into()));
        }
        for (i, ring) in rings.iter().enumerate() {
            if ring.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(Error::InvalidPolygon(format!(
                    "ring {i} has non-finite vertices"
                )));
            }
            if ring.len() < 4 || ring.first() != ring.last() {
                return Err(Error::InvalidPolygon(format!(
                    "ring {i} must be closed with at least 3 distinct vertices"
                )));
            }
            let mut distinct: Vec<(f64, f64)> = ring[..ring.len() - 1].to_vec();
            distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
            distinct.dedup();
            if distinct.len() < 3 {
                return Err(Error::InvalidPolygon(format!(
                    "ring {i} has fewer than 3 distinct vertices"
                )));
            }
        }
        Ok(Polygon { rings })
    }

    /// Closed axis-aligned rectangle.
    pub fn rectangle(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self> {
        Self::new(vec![vec![
            (min_x, min_y),
            (max_x, min_y),
            (max_x, max_y),
            (min_x, max_y),
            (min_x, min_y),
        ]])
    }

    pub fn rings(&self) -> &[Vec<(f64, f64)>] {
        &self.rings
    }

    /// Shoelace area of a ring (signed).
    fn ring_area(ring: &[(f64, f64)]) -> f64 {
        ring.windows(2)
            .map(|w| w[0].0 * w[1].1 - w[1].0 * w[0].1)
            .sum::<f64>()
            * 0.5
    }

    /// Even-odd point containment over all rings. A crossing counts when
    /// the edge straddles `y` (half-open in y) and lies strictly right of `x`.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let mut inside = false;
        for ring in &self.rings {
            for w in ring.windows(2) {
                let ((xi, yi), (xj, yj)) = (w[0], w[1]);
                if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Marks every pixel whose center lies inside `poly` (even-odd rule).
///
/// Scanline form of [`Polygon::contains`]: each row collects its edge
/// crossings once, then a column is inside when an odd number of crossings
/// lie strictly to the right of its center.
pub fn rasterize_polygon(poly: &Polygon, grid: Grid) -> Result<RegionMask> {
    for (i, ring) in poly.rings().iter().enumerate() {
        if Polygon::ring_area(ring) == 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "ring {i} is degenerate (zero area)"
            )));
        }
    }
    let t = grid.transform;
    let mut bits = vec![false; grid.len()];
    let mut crossings = Vec::new();
    for row in 0..grid.height {
        let (_, y) = t.pixel_center(row, 0);
        crossings.clear();
        for ring in poly.rings() {
            for w in ring.windows(2) {
                let ((xi, yi), (xj, yj)) = (w[0], w[1]);
                if (yi > y) != (yj > y) {
                    crossings.push((xj - xi) * (y - yi) / (yj - yi) + xi);
                }
            }
        }
        if crossings.is_empty() {
            continue;
        }
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let row_bits = &mut bits[row * grid.width..(row + 1) * grid.width];
        for (col, bit) in row_bits.iter_mut().enumerate() {
            let (x, _) = t.pixel_center(row, col);
            // crossings strictly greater than x
            let right = crossings.len() - crossings.partition_point(|&c| c <= x);
            *bit = right % 2 == 1;
        }
    }
    Ok(RegionMask::from_bits(grid, bits))
}
