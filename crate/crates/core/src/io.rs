//! File formats: CSV matrices, the `PHM1` binary phase format, point-cloud
//! CSV and height grids with a JSON sidecar.
//!
//! `PHM1` layout (little endian): bytes 0..4 magic `PHM1`, 4..8 `u32` rows,
//! 8..12 `u32` cols, 12..16 `u32` flags (bit 0 set when the phase is
//! wrapped, other bits zero), then `rows × cols` `f32` values in row-major
//! order, radians.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpp::{GridSpec, HeightGrid, PointCloud};
use crate::shearography::PhaseMap;

pub const PHM_MAGIC: &[u8; 4] = b"PHM1";
const PHM_WRAPPED: u32 = 1;

/// Header of point-cloud CSV files.
pub const CLOUD_HEADER: [&str; 3] = ["x_mm", "y_mm", "z_mm"];

/// Reads a headerless numeric CSV matrix. Empty fields become NaN.
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<Array2<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Parse(format!(
                    "row {} has {} columns, expected {c}",
                    line + 1,
                    record.len()
                )))
            }
            _ => {}
        }
        for field in record.iter() {
            data.push(if field.is_empty() {
                f64::NAN
            } else {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad number `{field}`", line + 1)))?
            });
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, cols.unwrap_or(0)), data).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes a matrix as CSV; NaN is written as an empty field.
pub fn write_matrix_csv<W: Write>(writer: W, m: &Array2<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for row in m.rows() {
        w.write_record(row.iter().map(|v| {
            if v.is_nan() {
                String::new()
            } else {
                v.to_string()
            }
        }))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_phm<W: Write>(mut writer: W, p: &PhaseMap) -> Result<()> {
    let (rows, cols) = p.dim();
    let to_u32 =
        |n: usize| u32::try_from(n).map_err(|_| Error::Config("phase map too large".into()));
    writer.write_all(PHM_MAGIC)?;
    writer.write_all(&to_u32(rows)?.to_le_bytes())?;
    writer.write_all(&to_u32(cols)?.to_le_bytes())?;
    let flags = if p.wrapped { PHM_WRAPPED } else { 0 };
    writer.write_all(&flags.to_le_bytes())?;
    let mut buf = Vec::with_capacity(rows * cols * 4);
    for &v in p.data.iter() {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    writer.write_all(&buf)?;
    Ok(())
}

/// Reads a `PHM1` stream. The format carries no pixel pitch; it is supplied
/// by the caller.
pub fn read_phm<R: Read>(mut reader: R, pixel_pitch: f64) -> Result<PhaseMap> {
    let mut header = [0u8; 16];
    reader.read_exact(&mut header)?;
    if &header[..4] != PHM_MAGIC {
        return Err(Error::Parse("missing PHM1 magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().expect("4 bytes"));
    let (rows, cols, flags) = (word(4) as usize, word(8) as usize, word(12));
    let mut body = Vec::new();
    reader.read_to_end(&mut body)?;
    if body.len() != rows * cols * 4 {
        return Err(Error::Parse(format!(
            "PHM1 body has {} bytes, expected {} for {rows}×{cols}",
            body.len(),
            rows * cols * 4
        )));
    }
    let data: Vec<f64> = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    let mut data =
        Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Parse(e.to_string()))?;
    let wrapped = flags & PHM_WRAPPED != 0;
    if wrapped {
        // f32 rounding can push values a hair past ±π.
        data.mapv_inplace(crate::shearography::wrap);
    }
    PhaseMap::new(data, pixel_pitch, wrapped)
}

/// Reads a phase map from `.phm` (binary) or any other extension (CSV).
pub fn load_phase_map(path: &Path, pixel_pitch: f64, wrapped: bool) -> Result<PhaseMap> {
    let file = BufReader::new(File::open(path)?);
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("phm"))
    {
        let mut p = read_phm(file, pixel_pitch)?;
        p.wrapped |= wrapped;
        Ok(p)
    } else {
        PhaseMap::new(read_matrix_csv(file)?, pixel_pitch, wrapped)
    }
}

pub fn save_phase_map(path: &Path, p: &PhaseMap) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("phm"))
    {
        write_phm(file, p)
    } else {
        write_matrix_csv(file, &p.data)
    }
}

pub fn read_point_cloud<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != CLOUD_HEADER {
        return Err(Error::Parse(format!(
            "point cloud header must be `x_mm,y_mm,z_mm`, got `{}`",
            header.join(",")
        )));
    }
    let mut points = Vec::new();
    for (line, rec) in rdr.deserialize::<[f64; 3]>().enumerate() {
        points.push(rec.map_err(|e| Error::Parse(format!("point cloud row {}: {e}", line + 2)))?);
    }
    PointCloud::new(points)
}

pub fn write_point_cloud<W: Write>(writer: W, cloud: &PointCloud) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CLOUD_HEADER)?;
    for p in &cloud.points {
        w.write_record(p.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_point_cloud(path: &Path) -> Result<PointCloud> {
    read_point_cloud(BufReader::new(File::open(path)?))
}

/// JSON companion of a grid CSV.
///
/// `mask_rle` lists alternating run lengths over the row-major cells,
/// starting with a run of masked cells (possibly zero long).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSidecar {
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub counts: [usize; 2],
    pub mask_rle: Vec<usize>,
}

pub fn encode_mask(valid: &Array2<bool>) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0;
    for &v in valid.iter() {
        if v == current {
            len += 1;
        } else {
            runs.push(len);
            current = v;
            len = 1;
        }
    }
    runs.push(len);
    runs
}

pub fn decode_mask(runs: &[usize], shape: (usize, usize)) -> Result<Array2<bool>> {
    let mut flat = Vec::with_capacity(shape.0 * shape.1);
    for (k, &n) in runs.iter().enumerate() {
        flat.extend(std::iter::repeat_n(k % 2 == 1, n));
    }
    Array2::from_shape_vec(shape, flat)
        .map_err(|_| Error::Parse("mask runs do not cover the grid".into()))
}

impl GridSidecar {
    pub fn of(grid: &HeightGrid) -> Self {
        GridSidecar {
            origin: grid.spec.origin,
            spacing: grid.spec.spacing,
            counts: grid.spec.counts,
            mask_rle: encode_mask(&grid.valid),
        }
    }
}

/// Sidecar path for a grid CSV: `foo.csv` → `foo.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn save_grid(csv_path: &Path, grid: &HeightGrid) -> Result<()> {
    write_matrix_csv(BufWriter::new(File::create(csv_path)?), &grid.values)?;
    let json = serde_json::to_string_pretty(&GridSidecar::of(grid))
        .map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(sidecar_path(csv_path), json + "\n")?;
    Ok(())
}

pub fn load_grid(csv_path: &Path) -> Result<HeightGrid> {
    let values = read_matrix_csv(BufReader::new(File::open(csv_path)?))?;
    let text = std::fs::read_to_string(sidecar_path(csv_path))?;
    let side: GridSidecar = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let spec = GridSpec::new(side.origin, side.spacing, side.counts)?;
    let valid = decode_mask(&side.mask_rle, spec.shape())?;
    HeightGrid::new(spec, values, valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn phm_header_layout() {
        let p = PhaseMap::new(array![[0.5, -1.0, 3.0], [0.0, 1.0, -3.0]], 0.1, true).unwrap();
        let mut buf = Vec::new();
        write_phm(&mut buf, &p).unwrap();
        assert_eq!(buf.len(), 16 + 6 * 4);
        assert_eq!(&buf[..4], b"PHM1");
        assert_eq!(&buf[4..8], &2u32.to_le_bytes());
        assert_eq!(&buf[8..12], &3u32.to_le_bytes());
        assert_eq!(&buf[12..16], &1u32.to_le_bytes());
        assert_eq!(&buf[16..20], &0.5f32.to_le_bytes());
        let back = read_phm(buf.as_slice(), 0.1).unwrap();
        assert!(back.wrapped);
        assert_eq!(back.data[(1, 1)], 1.0);
    }

    #[test]
    fn phm_rejects_bad_input() {
        assert!(read_phm(&b"PHM2\0\0\0\0\0\0\0\0\0\0\0\0"[..], 1.0).is_err());
        let mut buf = Vec::new();
        write_phm(
            &mut buf,
            &PhaseMap::unwrapped(Array2::zeros((2, 2)), 1.0).unwrap(),
        )
        .unwrap();
        buf.pop();
        assert!(read_phm(buf.as_slice(), 1.0).is_err());
    }

    #[test]
    fn matrix_csv_with_gaps() {
        let m = read_matrix_csv("1,2,3\n4,,6\n".as_bytes()).unwrap();
        assert_eq!(m.dim(), (2, 3));
        assert!(m[(1, 1)].is_nan());
        assert!(read_matrix_csv("1,2\n3\n".as_bytes()).is_err());
        let mut out = Vec::new();
        write_matrix_csv(&mut out, &m).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1,2,3\n4,,6\n");
    }

    #[test]
    fn cloud_header_is_checked() {
        let ok = read_point_cloud("x_mm,y_mm,z_mm\n1,2,3\n4,5,6\n".as_bytes()).unwrap();
        assert_eq!(ok.points, vec![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        assert!(read_point_cloud("x,y,z\n1,2,3\n".as_bytes()).is_err());
        assert!(read_point_cloud("x_mm,y_mm,z_mm\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn mask_runs() {
        let v = array![[false, true, true], [true, false, false]];
        let runs = encode_mask(&v);
        assert_eq!(runs, vec![1, 3, 2]);
        assert_eq!(decode_mask(&runs, (2, 3)).unwrap(), v);
        let all = Array2::from_elem((2, 2), true);
        assert_eq!(encode_mask(&all), vec![0, 4]);
        assert!(decode_mask(&[1, 2], (2, 2)).is_err());
    }
}
