//! Raw per-pixel patches and their reduction to [`BandSample`]s.
//!
//! Bands arrive on their native grids (10, 20 or 60 m). Every band is
//! brought onto the finest grid present by nearest-neighbour replication,
//! a single validity mask is formed (a cell is valid only if it is valid in
//! every band) and the valid cells are averaged.

use std::collections::HashMap;
use std::path::Path;

use chrono::{DateTime, Utc};

use crate::band::{BandId, BAND_COUNT};
use crate::csvio;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::sample::{format_datetime, parse_datetime, BandSample};
use crate::scalar::{parse_scalar, Scalar};

pub const PATCH_HEADER: [&str; 8] = ["record_id", "scene_id", "scene_datetime", "band", "row", "col", "value", "valid"];

/// One band on its native grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NativeGrid<T> {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<T>,
    pub valid: Vec<bool>,
}

/// All 12 bands on a common 10 m grid plus the shared validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGrid<T> {
    pub record_id: String,
    pub scene_id: String,
    pub scene_datetime: DateTime<Utc>,
    pub rows: usize,
    pub cols: usize,
    /// `bands[b][r * cols + c]`, canonical band order.
    pub bands: Vec<Vec<T>>,
    pub valid: Vec<bool>,
}

impl<T: Scalar> PatchGrid<T> {
    pub fn new(
        record_id: impl Into<String>,
        scene_id: impl Into<String>,
        scene_datetime: DateTime<Utc>,
        rows: usize,
        cols: usize,
        bands: Vec<Vec<T>>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        let grid = PatchGrid {
            record_id: record_id.into(),
            scene_id: scene_id.into(),
            scene_datetime,
            rows,
            cols,
            bands,
            valid,
        };
        let cells = rows * cols;
        let fail = |message: String| Error::InvalidPatch {
            record_id: grid.record_id.clone(),
            scene_id: grid.scene_id.clone(),
            message,
        };
        if cells == 0 {
            return Err(fail("grid has no pixels".into()));
        }
        if grid.bands.len() != BAND_COUNT {
            return Err(fail(format!("expected {BAND_COUNT} bands, found {}", grid.bands.len())));
        }
        if let Some(b) = grid.bands.iter().position(|v| v.len() != cells) {
            return Err(fail(format!("band {} does not cover {rows}x{cols} cells", BandId::ALL[b])));
        }
        if grid.valid.len() != cells {
            return Err(fail("mask size differs from grid".into()));
        }
        for (b, values) in grid.bands.iter().enumerate() {
            if values.iter().zip(&grid.valid).any(|(v, ok)| *ok && !v.is_finite()) {
                return Err(fail(format!("valid pixel of band {} is not finite", BandId::ALL[b])));
            }
        }
        Ok(grid)
    }

    /// Resamples native band grids onto the finest grid by nearest neighbour.
    pub fn from_native(
        record_id: impl Into<String>,
        scene_id: impl Into<String>,
        scene_datetime: DateTime<Utc>,
        native: Vec<NativeGrid<T>>,
    ) -> Result<Self> {
        let record_id = record_id.into();
        let scene_id = scene_id.into();
        if native.len() != BAND_COUNT {
            return Err(Error::InvalidPatch {
                record_id,
                scene_id,
                message: format!("expected {BAND_COUNT} bands, found {}", native.len()),
            });
        }
        let rows = native.iter().map(|g| g.rows).max().unwrap_or(0);
        let cols = native.iter().map(|g| g.cols).max().unwrap_or(0);
        for (b, g) in native.iter().enumerate() {
            if g.rows == 0 || g.cols == 0 || g.values.len() != g.rows * g.cols || g.valid.len() != g.values.len() {
                return Err(Error::InvalidPatch {
                    record_id,
                    scene_id,
                    message: format!("band {} has an inconsistent grid", BandId::ALL[b]),
                });
            }
        }

        let mut bands = Vec::with_capacity(BAND_COUNT);
        let mut valid = vec![true; rows * cols];
        for g in &native {
            let mut out = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                let sr = nearest(r, g.rows, rows);
                for c in 0..cols {
                    let src = sr * g.cols + nearest(c, g.cols, cols);
                    out.push(g.values[src]);
                    if !g.valid[src] {
                        valid[r * cols + c] = false;
                    }
                }
            }
            bands.push(out);
        }
        PatchGrid::new(record_id, scene_id, scene_datetime, rows, cols, bands, valid)
    }
}

/// Source index of target cell `i` when `src_len` cells span `dst_len`
/// cells: the source cell containing the target cell's centre.
fn nearest(i: usize, src_len: usize, dst_len: usize) -> usize {
    (((2 * i + 1) * src_len) / (2 * dst_len)).min(src_len - 1)
}

/// Averages every band over the valid cells of the patch.
pub fn aggregate_patch<T: Scalar>(patch: &PatchGrid<T>) -> Result<BandSample<T>> {
    let total = patch.rows * patch.cols;
    let n_valid = patch.valid.iter().filter(|v| **v).count();
    if total == 0 || n_valid == 0 {
        return Err(Error::EmptyPatch {
            record_id: patch.record_id.clone(),
            scene_id: patch.scene_id.clone(),
        });
    }
    let count = T::from_count(n_valid);
    let mut bands = [T::zero(); BAND_COUNT];
    for (b, values) in patch.bands.iter().enumerate() {
        let (mut lo, mut hi, mut sum) = (T::infinity(), T::neg_infinity(), T::zero());
        for (v, _) in values.iter().zip(&patch.valid).filter(|(_, ok)| **ok) {
            lo = lo.min(*v);
            hi = hi.max(*v);
            sum += *v;
        }
        // Rounding in the sum can push the quotient just past the extremes.
        bands[b] = (sum / count).max(lo).min(hi);
    }
    Ok(BandSample {
        record_id: patch.record_id.clone(),
        scene_id: patch.scene_id.clone(),
        scene_datetime: patch.scene_datetime,
        valid_fraction: n_valid as f64 / total as f64,
        bands,
    })
}

pub fn read_patches<T: Scalar>(path: &Path) -> Result<Vec<PatchGrid<T>>> {
    parse_patches(&fsutil::read_to_string(path)?)
}

struct PendingPatch<T> {
    scene_datetime: DateTime<Utc>,
    first_line: u64,
    cells: Vec<HashMap<(usize, usize), (T, bool)>>,
}

/// Parses a patch CSV into one [`PatchGrid`] per (record_id, scene_id), in
/// order of first appearance. Each band must cover a full rectangle.
pub fn parse_patches<T: Scalar>(text: &str) -> Result<Vec<PatchGrid<T>>> {
    let mut rdr = csvio::reader(text, true);
    csvio::expect_header(&mut rdr, &PATCH_HEADER)?;

    let mut order: Vec<(String, String)> = Vec::new();
    let mut pending: HashMap<(String, String), PendingPatch<T>> = HashMap::new();
    for row in rdr.records() {
        let row = row.map_err(csvio::csv_error)?;
        let line = csvio::line_of(&row);
        if row.len() != PATCH_HEADER.len() {
            return Err(Error::parse(
                line,
                "<row>",
                format!("expected {} fields, found {}", PATCH_HEADER.len(), row.len()),
            ));
        }
        let record_id = csvio::field(&row, 0, "record_id")?.to_string();
        let scene_id = csvio::field(&row, 1, "scene_id")?.to_string();
        let dt = parse_datetime(csvio::field(&row, 2, "scene_datetime")?)
            .map_err(|m| Error::parse(line, "scene_datetime", m))?;
        let band_text = csvio::field(&row, 3, "band")?;
        let band: BandId = band_text.parse().map_err(|e| Error::parse(line, "band", format!("{e}")))?;
        let r: usize = parse_index(&row, 4, "row")?;
        let c: usize = parse_index(&row, 5, "col")?;
        let value_text = csvio::field(&row, 6, "value")?;
        let value: T = parse_scalar(value_text)
            .ok_or_else(|| Error::parse(line, "value", format!("`{value_text}` is not a number")))?;
        let valid = match csvio::field(&row, 7, "valid")? {
            "1" => true,
            "0" => false,
            other => return Err(Error::parse(line, "valid", format!("`{other}` is not 0 or 1"))),
        };
        if valid && !value.is_finite() {
            return Err(Error::range(line, "value", "valid pixel is not finite"));
        }

        let key = (record_id, scene_id);
        let entry = pending.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            PendingPatch {
                scene_datetime: dt,
                first_line: line,
                cells: (0..BAND_COUNT).map(|_| HashMap::new()).collect(),
            }
        });
        if entry.scene_datetime != dt {
            return Err(Error::parse(
                line,
                "scene_datetime",
                format!("differs from line {} for the same scene", entry.first_line),
            ));
        }
        if entry.cells[band.index()].insert((r, c), (value, valid)).is_some() {
            return Err(Error::parse(line, "row", format!("duplicate pixel ({r}, {c}) for band {band}")));
        }
    }

    let mut out = Vec::with_capacity(order.len());
    for key in order {
        let p = pending.remove(&key).expect("pending patch present");
        let (record_id, scene_id) = key;
        let mut native = Vec::with_capacity(BAND_COUNT);
        for (b, cells) in p.cells.into_iter().enumerate() {
            let invalid = |message: String| Error::InvalidPatch {
                record_id: record_id.clone(),
                scene_id: scene_id.clone(),
                message,
            };
            if cells.is_empty() {
                return Err(invalid(format!("band {} has no pixels", BandId::ALL[b])));
            }
            let rows = cells.keys().map(|k| k.0).max().unwrap_or(0) + 1;
            let cols = cells.keys().map(|k| k.1).max().unwrap_or(0) + 1;
            if cells.len() != rows * cols {
                return Err(invalid(format!(
                    "band {} covers {} of {rows}x{cols} cells",
                    BandId::ALL[b],
                    cells.len()
                )));
            }
            let mut values = Vec::with_capacity(rows * cols);
            let mut valid = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    let (v, ok) = cells[&(r, c)];
                    values.push(v);
                    valid.push(ok);
                }
            }
            native.push(NativeGrid { rows, cols, values, valid });
        }
        out.push(PatchGrid::from_native(record_id, scene_id, p.scene_datetime, native)?);
    }
    Ok(out)
}

fn parse_index(row: &csv::StringRecord, index: usize, name: &str) -> Result<usize> {
    let text = csvio::field(row, index, name)?;
    text.trim()
        .parse()
        .map_err(|_| Error::parse(csvio::line_of(row), name, format!("`{text}` is not a nonnegative integer")))
}

/// Serializes patches already on a common grid (every band written at the
/// grid resolution, with the shared mask).
pub fn write_patches<T: Scalar>(patches: &[PatchGrid<T>]) -> Result<Vec<u8>> {
    let mut w = csvio::writer();
    csvio::write_row(&mut w, PATCH_HEADER)?;
    for p in patches {
        let dt = format_datetime(&p.scene_datetime);
        for (b, band) in BandId::ALL.iter().enumerate() {
            for r in 0..p.rows {
                for c in 0..p.cols {
                    let i = r * p.cols + c;
                    csvio::write_row(
                        &mut w,
                        [
                            p.record_id.clone(),
                            p.scene_id.clone(),
                            dt.clone(),
                            band.name().to_string(),
                            r.to_string(),
                            c.to_string(),
                            p.bands[b][i].to_string(),
                            if p.valid[i] { "1" } else { "0" }.to_string(),
                        ],
                    )?;
                }
            }
        }
    }
    csvio::finish(w)
}
