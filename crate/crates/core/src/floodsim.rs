//! Bathtub flood simulation on a DEM.
//!
//! Thresholds the DEM at a level, labels the flooded pixels into connected
//! components, keeps the largest one and extracts its shoreline: the
//! component pixels with a 4-neighbor outside the component.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Grid, Raster, RegionMask};

/// Pixel adjacency used when grouping flooded pixels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl TryFrom<u8> for Connectivity {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            _ => Err(Error::param(format!(
                "connectivity must be 4 or 8, got {n}"
            ))),
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<u8>()
            .map_err(|_| Error::param(format!("connectivity must be 4 or 8, got `{s}`")))?
            .try_into()
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Component labels: 0 is background, components are numbered `1..=count`
/// in row-major order of their first pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelGrid {
    grid: Grid,
    labels: Vec<u32>,
    count: u32,
}

impl LabelGrid {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.labels[self.grid.index(row, col)]
    }

    /// Number of components.
    pub fn count(&self) -> u32 {
        self.count
    }

    /// Pixel count per label, indexed by label (entry 0 is background).
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.count as usize + 1];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

/// Row-major `(row, col)` pixel indices.
pub type PixelSet = Vec<(usize, usize)>;

/// Flooded pixels: inside `region`, valid in `dem` and at or below `level`.
/// Nodata DEM pixels count as dry land.
pub fn water_mask(dem: &Raster, level: f64, region: &RegionMask) -> Result<RegionMask> {
    dem.grid().ensure_same(&region.grid(), "water_mask")?;
    let bits = dem
        .values()
        .iter()
        .zip(region.bits())
        .map(|(&z, &inside)| inside && dem.is_valid(z) && z <= level)
        .collect();
    RegionMask::new(region.grid(), bits)
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let next = parent[x as usize];
        parent[x as usize] = parent[next as usize];
        x = next;
    }
    x
}

/// Two-pass union-find labeling with canonical (first-encounter) numbering.
pub fn connected_components(mask: &RegionMask, connectivity: Connectivity) -> LabelGrid {
    let (w, h) = (mask.width(), mask.height());
    let bits = mask.bits();
    let mut labels = vec![0u32; w * h];
    let mut parent: Vec<u32> = vec![0];

    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if !bits[i] {
                continue;
            }
            let mut neighbors = [0u32; 4];
            let mut n = 0;
            let mut push = |l: u32| {
                if l != 0 {
                    neighbors[n] = l;
                    n += 1;
                }
            };
            if c > 0 {
                push(labels[i - 1]);
            }
            if r > 0 {
                push(labels[i - w]);
                if connectivity == Connectivity::Eight {
                    if c > 0 {
                        push(labels[i - w - 1]);
                    }
                    if c + 1 < w {
                        push(labels[i - w + 1]);
                    }
                }
            }
            if n == 0 {
                let l = parent.len() as u32;
                parent.push(l);
                labels[i] = l;
                continue;
            }
            let mut root = find(&mut parent, neighbors[0]);
            for &l in &neighbors[1..n] {
                let other = find(&mut parent, l);
                if other != root {
                    let (lo, hi) = (root.min(other), root.max(other));
                    parent[hi as usize] = lo;
                    root = lo;
                }
            }
            labels[i] = root;
        }
    }

    let mut canonical = vec![0u32; parent.len()];
    let mut count = 0u32;
    for l in labels.iter_mut().filter(|l| **l != 0) {
        let root = find(&mut parent, *l) as usize;
        if canonical[root] == 0 {
            count += 1;
            canonical[root] = count;
        }
        *l = canonical[root];
    }
    LabelGrid {
        grid: mask.grid(),
        labels,
        count,
    }
}

/// Mask of the component with the most pixels; the smallest label wins a
/// tie. No components gives an empty mask.
pub fn largest_component(labels: &LabelGrid) -> RegionMask {
    let sizes = labels.sizes();
    let best = (1..sizes.len()).fold(None, |best: Option<usize>, l| match best {
        Some(b) if sizes[b] >= sizes[l] => Some(b),
        _ => Some(l),
    });
    let bits = match best {
        Some(b) => labels.labels.iter().map(|&l| l as usize == b).collect(),
        None => vec![false; labels.grid.len()],
    };
    RegionMask::from_bits(labels.grid, bits)
}

/// Component pixels with at least one 4-neighbor outside the component
/// (off-raster counts as outside).
pub fn shoreline(component: &RegionMask) -> PixelSet {
    let (w, h) = (component.width(), component.height());
    let bits = component.bits();
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if !bits[i] {
                continue;
            }
            let exposed = c == 0
                || c + 1 == w
                || r == 0
                || r + 1 == h
                || !bits[i - 1]
                || !bits[i + 1]
                || !bits[i - w]
                || !bits[i + w];
            if exposed {
                out.push((r, c));
            }
        }
    }
    out
}

/// Flood result at one level: the largest component and its shoreline.
#[derive(Clone, Debug)]
pub struct Flood {
    pub component: RegionMask,
    pub shoreline: PixelSet,
}

pub fn simulate(
    dem: &Raster,
    level: f64,
    region: &RegionMask,
    connectivity: Connectivity,
) -> Result<Flood> {
    let wet = water_mask(dem, level, region)?;
    let labels = connected_components(&wet, connectivity);
    let component = largest_component(&labels);
    let shoreline = shoreline(&component);
    Ok(Flood {
        component,
        shoreline,
    })
}
