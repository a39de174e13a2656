//! Single-band GeoTIFF reading and writing on top of the `tiff` crate.
//!
//! Georeferencing is carried by ModelPixelScale + ModelTiepoint for north-up
//! grids and by ModelTransformation otherwise. Nodata uses the GDAL ASCII tag.
//! The CRS string round-trips as `EPSG:<code>` through the GeoKey directory,
//! or as a citation key for anything else.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use tiff::decoder::{Decoder, DecodingResult, Limits};
use tiff::encoder::{colortype::Gray64Float, TiffEncoder};
use tiff::tags::Tag;
use tiff::ColorType;

use crate::error::{Error, Result};

use super::grid::Raster;
use super::transform::GeoTransform;

const KEY_MODEL_TYPE: u16 = 1024;
const KEY_RASTER_TYPE: u16 = 1025;
const KEY_CITATION: u16 = 1026;
const KEY_GEOGRAPHIC_TYPE: u16 = 2048;
const KEY_PROJECTED_CS_TYPE: u16 = 3072;
const KEY_PCS_CITATION: u16 = 3073;
const GEO_ASCII_PARAMS: u16 = 34737;
const USER_DEFINED: u16 = 32767;

pub fn load_raster(path: impl AsRef<Path>) -> Result<Raster> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let tiff_err = |e: tiff::TiffError| Error::format(path, e.to_string());
    let mut dec = Decoder::new(BufReader::new(file))
        .map_err(tiff_err)?
        .with_limits(Limits::unlimited());

    match dec.colortype().map_err(tiff_err)? {
        ColorType::Gray(_) => {}
        other => {
            return Err(Error::format(
                path,
                format!("expected a single-band raster, found {other:?}"),
            ))
        }
    }
    let (width, height) = dec.dimensions().map_err(tiff_err)?;
    let transform = read_transform(&mut dec).map_err(|m| Error::format(path, m))?;
    let nodata = match dec.find_tag(Tag::GdalNodata).map_err(tiff_err)? {
        Some(v) => {
            let s = v.into_string().map_err(tiff_err)?;
            Some(
                parse_nodata(&s)
                    .ok_or_else(|| Error::format(path, format!("bad nodata tag `{s}`")))?,
            )
        }
        None => None,
    };
    let crs = read_crs(&mut dec).map_err(tiff_err)?;

    let values: Vec<f64> = match dec.read_image().map_err(tiff_err)? {
        DecodingResult::U8(v) => v.into_iter().map(f64::from).collect(),
        DecodingResult::U16(v) => v.into_iter().map(f64::from).collect(),
        DecodingResult::U32(v) => v.into_iter().map(f64::from).collect(),
        DecodingResult::U64(v) => v.into_iter().map(|x| x as f64).collect(),
        DecodingResult::I8(v) => v.into_iter().map(f64::from).collect(),
        DecodingResult::I16(v) => v.into_iter().map(f64::from).collect(),
        DecodingResult::I32(v) => v.into_iter().map(f64::from).collect(),
        DecodingResult::I64(v) => v.into_iter().map(|x| x as f64).collect(),
        DecodingResult::F32(v) => v.into_iter().map(f64::from).collect(),
        DecodingResult::F64(v) => v,
        DecodingResult::F16(v) => v.into_iter().map(f64::from).collect(),
    };
    // f32 sentinels widen exactly, so an f64 comparison still matches.
    Raster::new(
        width as usize,
        height as usize,
        values,
        transform,
        nodata,
        crs,
    )
    .map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_raster(raster: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if raster.width() == 0 || raster.height() == 0 {
        return Err(Error::InvalidRaster(format!(
            "cannot write an empty {}x{} raster",
            raster.width(),
            raster.height()
        )));
    }
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let tiff_err = |e: tiff::TiffError| Error::format(path, e.to_string());
    let mut enc = TiffEncoder::new(BufWriter::new(file)).map_err(tiff_err)?;
    let mut image = enc
        .new_image::<Gray64Float>(raster.width() as u32, raster.height() as u32)
        .map_err(tiff_err)?;
    {
        let dir = image.encoder();
        let t = raster.transform();
        if t.pixel_height < 0.0 {
            dir.write_tag(
                Tag::ModelPixelScaleTag,
                &[t.pixel_width, -t.pixel_height, 0.0][..],
            )
            .map_err(tiff_err)?;
            dir.write_tag(
                Tag::ModelTiepointTag,
                &[0.0, 0.0, 0.0, t.origin_x, t.origin_y, 0.0][..],
            )
            .map_err(tiff_err)?;
        } else {
            #[rustfmt::skip]
            let m = [
                t.pixel_width, 0.0, 0.0, t.origin_x,
                0.0, t.pixel_height, 0.0, t.origin_y,
                0.0, 0.0, 1.0, 0.0,
                0.0, 0.0, 0.0, 1.0,
            ];
            dir.write_tag(Tag::ModelTransformationTag, &m[..])
                .map_err(tiff_err)?;
        }
        if let Some(nd) = raster.nodata() {
            dir.write_tag(Tag::GdalNodata, format_nodata(nd).as_str())
                .map_err(tiff_err)?;
        }
        let (keys, ascii) = geo_keys(raster.crs());
        dir.write_tag(Tag::GeoKeyDirectoryTag, &keys[..])
            .map_err(tiff_err)?;
        if let Some(ascii) = ascii {
            dir.write_tag(Tag::GeoAsciiParamsTag, ascii.as_str())
                .map_err(tiff_err)?;
        }
    }
    image.write_data(raster.values()).map_err(tiff_err)?;
    Ok(())
}

fn format_nodata(nd: f64) -> String {
    if nd.is_nan() {
        "nan".to_string()
    } else {
        format!("{nd}")
    }
}

fn parse_nodata(s: &str) -> Option<f64> {
    let s = s.trim().trim_end_matches('\0');
    if s.eq_ignore_ascii_case("nan") {
        return Some(f64::NAN);
    }
    s.parse().ok()
}

fn read_transform<R: std::io::Read + std::io::Seek>(
    dec: &mut Decoder<R>,
) -> std::result::Result<GeoTransform, String> {
    let get = |dec: &mut Decoder<R>, tag| -> std::result::Result<Option<Vec<f64>>, String> {
        dec.find_tag(tag)
            .map_err(|e| e.to_string())?
            .map(|v| v.into_f64_vec().map_err(|e| e.to_string()))
            .transpose()
    };
    if let Some(m) = get(dec, Tag::ModelTransformationTag)? {
        if m.len() < 8 {
            return Err("short ModelTransformation tag".into());
        }
        if m[1] != 0.0 || m[4] != 0.0 {
            return Err("rotated geotransforms are not supported".into());
        }
        return GeoTransform::new(m[3], m[7], m[0], m[5]).map_err(|e| e.to_string());
    }
    let scale = get(dec, Tag::ModelPixelScaleTag)?;
    let tie = get(dec, Tag::ModelTiepointTag)?;
    match (scale, tie) {
        (Some(s), Some(t)) if s.len() >= 2 && t.len() >= 6 => {
            // tiepoint maps raster (i, j) to model (x, y)
            let (i, j, x, y) = (t[0], t[1], t[3], t[4]);
            GeoTransform::new(x - i * s[0], y + j * s[1], s[0], -s[1]).map_err(|e| e.to_string())
        }
        _ => {
            Err("missing geotransform (no ModelTransformation or PixelScale/Tiepoint tags)".into())
        }
    }
}

fn read_crs<R: std::io::Read + std::io::Seek>(dec: &mut Decoder<R>) -> tiff::TiffResult<String> {
    let Some(keys) = dec.find_tag_unsigned_vec::<u16>(Tag::GeoKeyDirectoryTag)? else {
        return Ok(String::new());
    };
    let ascii = match dec.find_tag(Tag::GeoAsciiParamsTag)? {
        Some(v) => v.into_string()?,
        None => String::new(),
    };
    let mut citation = None;
    for entry in keys.get(4..).unwrap_or(&[]).chunks_exact(4) {
        let (key, location, count, value) = (entry[0], entry[1], entry[2], entry[3]);
        match key {
            KEY_PROJECTED_CS_TYPE | KEY_GEOGRAPHIC_TYPE
                if location == 0 && value != 0 && value != USER_DEFINED =>
            {
                return Ok(format!("EPSG:{value}"));
            }
            KEY_CITATION | KEY_PCS_CITATION if location == GEO_ASCII_PARAMS => {
                let start = value as usize;
                let end = (start + count as usize).min(ascii.len());
                if start < end {
                    citation = Some(ascii[start..end].trim_end_matches(['|', '\0']).to_string());
                }
            }
            _ => {}
        }
    }
    Ok(citation.unwrap_or_default())
}

/// GeoKey directory entries for `crs`, plus the ASCII params blob if needed.
fn geo_keys(crs: &str) -> (Vec<u16>, Option<String>) {
    let mut entries: Vec<[u16; 4]> = vec![[KEY_RASTER_TYPE, 0, 1, 1]];
    let mut ascii = None;
    let epsg = crs
        .strip_prefix("EPSG:")
        .and_then(|c| c.parse::<u16>().ok())
        .filter(|&c| c != 0 && c != USER_DEFINED);
    if let Some(code) = epsg {
        let geographic = (4000..5000).contains(&code);
        entries.push([KEY_MODEL_TYPE, 0, 1, if geographic { 2 } else { 1 }]);
        entries.push([
            if geographic {
                KEY_GEOGRAPHIC_TYPE
            } else {
                KEY_PROJECTED_CS_TYPE
            },
            0,
            1,
            code,
        ]);
    } else if !crs.is_empty() {
        let text = format!("{crs}|");
        entries.push([KEY_CITATION, GEO_ASCII_PARAMS, text.len() as u16, 0]);
        ascii = Some(text);
    }
    entries.sort_by_key(|e| e[0]);
    let mut keys = vec![1, 1, 0, entries.len() as u16];
    keys.extend(entries.iter().flatten());
    (keys, ascii)
}
