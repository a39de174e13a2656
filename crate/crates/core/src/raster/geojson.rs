use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::polygon::Polygon;

/// Reads the AOI polygon from a GeoJSON file. Accepts a bare Polygon, a
/// Feature, or a FeatureCollection (first polygon feature wins). A
/// MultiPolygon is accepted only when it holds exactly one polygon.
pub fn load_polygon(path: impl AsRef<Path>) -> Result<Polygon> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    polygon_from_value(&doc).map_err(|m| Error::format(path, m))
}

pub fn write_polygon(poly: &Polygon, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&polygon_to_value(poly)).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn polygon_to_value(poly: &Polygon) -> Value {
    let rings: Vec<Vec<[f64; 2]>> = poly
        .rings()
        .iter()
        .map(|r| r.iter().map(|&(x, y)| [x, y]).collect())
        .collect();
    json!({
        "type": "Feature",
        "properties": {},
        "geometry": { "type": "Polygon", "coordinates": rings },
    })
}

pub fn polygon_from_value(v: &Value) -> std::result::Result<Polygon, String> {
    match v.get("type").and_then(Value::as_str) {
        Some("Polygon") => parse_rings(v.get("coordinates").ok_or("Polygon without coordinates")?),
        Some("MultiPolygon") => {
            let polys = v
                .get("coordinates")
                .and_then(Value::as_array)
                .ok_or("MultiPolygon without coordinates")?;
            match polys.as_slice() {
                [one] => parse_rings(one),
                _ => Err(format!(
                    "expected one polygon, MultiPolygon holds {}",
                    polys.len()
                )),
            }
        }
        Some("Feature") => polygon_from_value(v.get("geometry").ok_or("Feature without geometry")?),
        Some("FeatureCollection") => v
            .get("features")
            .and_then(Value::as_array)
            .ok_or("FeatureCollection without features")?
            .iter()
            .find_map(|f| polygon_from_value(f).ok())
            .ok_or_else(|| "no polygon feature in collection".to_string()),
        Some(other) => Err(format!("unsupported GeoJSON type `{other}`")),
        None => Err("missing GeoJSON type".into()),
    }
}

fn parse_rings(coords: &Value) -> std::result::Result<Polygon, String> {
    let rings = coords.as_array().ok_or("coordinates must be an array")?;
    let mut out = Vec::with_capacity(rings.len());
    for ring in rings {
        let pts = ring.as_array().ok_or("ring must be an array")?;
        let mut r = Vec::with_capacity(pts.len());
        for p in pts {
            let xy = p.as_array().ok_or("position must be an array")?;
            match (
                xy.first().and_then(Value::as_f64),
                xy.get(1).and_then(Value::as_f64),
            ) {
                (Some(x), Some(y)) => r.push((x, y)),
                _ => return Err("position needs two numbers".into()),
            }
        }
        out.push(r);
    }
    Polygon::new(out).map_err(|e| e.to_string())
}
