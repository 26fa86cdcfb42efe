//! Georeferenced grids: ESRI ASCII I/O, point sampling, height-above-ground
//! differencing, and integer-factor resampling.
//!
//! Cells are square in degree space. Values are stored row-major with the
//! northernmost row first, matching the ASCII grid body order.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geodesy::GeoPoint;

/// Sentinel used when a grid header omits `NODATA_value`.
pub const DEFAULT_NODATA: f64 = -9999.0;

const GEOMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterKind {
    /// Heights above sea level (DTM, DSM).
    ElevationM,
    /// Heights above ground (HAG, canopy, clutter heights).
    HeightM,
    /// Integer land-cover class codes.
    ClassCode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub ncols: usize,
    pub nrows: usize,
    pub xll_deg: f64,
    pub yll_deg: f64,
    pub cellsize_deg: f64,
}

impl Geometry {
    pub fn west(&self) -> f64 {
        self.xll_deg
    }

    pub fn south(&self) -> f64 {
        self.yll_deg
    }

    pub fn east(&self) -> f64 {
        self.xll_deg + self.ncols as f64 * self.cellsize_deg
    }

    pub fn north(&self) -> f64 {
        self.yll_deg + self.nrows as f64 * self.cellsize_deg
    }

    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Center of the cell at `row` (0 = north) and `col` (0 = west).
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        let lat = self.north() - (row as f64 + 0.5) * self.cellsize_deg;
        let lon = self.west() + (col as f64 + 0.5) * self.cellsize_deg;
        (lat, lon)
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        let (lat, lon) = (p.lat_deg(), p.lon_deg());
        lat >= self.south() && lat <= self.north() && lon >= self.west() && lon <= self.east()
    }

    pub fn approx_eq(&self, other: &Geometry) -> bool {
        self.ncols == other.ncols
            && self.nrows == other.nrows
            && (self.xll_deg - other.xll_deg).abs() <= GEOMETRY_TOLERANCE
            && (self.yll_deg - other.yll_deg).abs() <= GEOMETRY_TOLERANCE
            && (self.cellsize_deg - other.cellsize_deg).abs() <= GEOMETRY_TOLERANCE
    }

    /// Fractional (column, row) position measured between cell centers.
    fn fractional(&self, p: GeoPoint) -> (f64, f64) {
        let u = (p.lon_deg() - self.west()) / self.cellsize_deg - 0.5;
        let v = (self.north() - p.lat_deg()) / self.cellsize_deg - 0.5;
        (u, v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    geometry: Geometry,
    nodata: f64,
    values: Vec<f64>,
    kind: RasterKind,
}

impl Raster {
    pub fn new(geometry: Geometry, nodata: f64, values: Vec<f64>, kind: RasterKind) -> Result<Self> {
        let invalid = |msg: String| Error::Parse { line: 0, msg };
        if geometry.ncols == 0 || geometry.nrows == 0 {
            return Err(invalid("raster must have at least one row and column".into()));
        }
        if !(geometry.cellsize_deg > 0.0 && geometry.cellsize_deg.is_finite()) {
            return Err(invalid(format!(
                "cellsize must be positive, got {}",
                geometry.cellsize_deg
            )));
        }
        if values.len() != geometry.len() {
            return Err(invalid(format!(
                "expected {} values, found {}",
                geometry.len(),
                values.len()
            )));
        }
        let raster = Self {
            geometry,
            nodata,
            values,
            kind,
        };
        if kind == RasterKind::ClassCode {
            if let Some(v) = raster
                .values
                .iter()
                .find(|&&v| !raster.is_nodata(v) && v.fract() != 0.0)
            {
                return Err(invalid(format!("class code {v} is not an integer")));
            }
        }
        Ok(raster)
    }

    /// Builds a raster by evaluating `f(row, col)` for every cell.
    pub fn from_fn(geometry: Geometry, nodata: f64, kind: RasterKind, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let values = (0..geometry.nrows)
            .flat_map(|r| (0..geometry.ncols).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self::new(geometry, nodata, values, kind)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    pub fn kind(&self) -> RasterKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_nodata(&self, v: f64) -> bool {
        v == self.nodata || (self.nodata.is_nan() && v.is_nan())
    }

    /// Raw cell value, sentinel included.
    pub fn raw(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.geometry.ncols + col]
    }

    /// Cell value, `None` for nodata.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let v = self.raw(row, col);
        (!self.is_nodata(v)).then_some(v)
    }

    fn check_bounds(&self, p: GeoPoint) -> Result<()> {
        if self.geometry.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                lat: p.lat_deg(),
                lon: p.lon_deg(),
            })
        }
    }

    /// Value of the cell whose center is nearest to `p`; ties go to the
    /// lower row and column index.
    pub fn sample_nearest(&self, p: GeoPoint) -> Result<f64> {
        self.check_bounds(p)?;
        let (u, v) = self.geometry.fractional(p);
        // ceil(x - 0.5) rounds half-way cases down.
        let col = ((u - 0.5).ceil().max(0.0) as usize).min(self.geometry.ncols - 1);
        let row = ((v - 0.5).ceil().max(0.0) as usize).min(self.geometry.nrows - 1);
        self.get(row, col).ok_or(Error::NoData)
    }

    /// Bilinear blend of the four surrounding cell centers. Falls back to
    /// nearest-cell lookup in the half-cell border and next to nodata.
    pub fn sample_bilinear(&self, p: GeoPoint) -> Result<f64> {
        if self.kind == RasterKind::ClassCode {
            return Err(Error::Kind {
                op: "bilinear sampling",
                kind: self.kind,
            });
        }
        self.check_bounds(p)?;
        let g = &self.geometry;
        let (u, v) = g.fractional(p);
        let (Some((c0, c1, fx)), Some((r0, r1, fy))) = (axis_span(u, g.ncols), axis_span(v, g.nrows)) else {
            return self.sample_nearest(p);
        };
        let corners = [self.get(r0, c0), self.get(r0, c1), self.get(r1, c0), self.get(r1, c1)];
        match corners {
            [Some(a), Some(b), Some(c), Some(d)] => {
                let top = lerp(a, b, fx);
                let bottom = lerp(c, d, fx);
                Ok(lerp(top, bottom, fy))
            }
            _ => self.sample_nearest(p),
        }
    }
}

/// Neighbouring cell indices and blend weight along one axis; `None` in the
/// half-cell border. A single-cell axis never interpolates.
fn axis_span(u: f64, n: usize) -> Option<(usize, usize, f64)> {
    if n == 1 {
        return Some((0, 0, 0.0));
    }
    if u < 0.0 || u > (n - 1) as f64 {
        return None;
    }
    let i0 = (u.floor() as usize).min(n - 2);
    Some((i0, i0 + 1, u - i0 as f64))
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// Height above ground: per-cell `max(0, dsm - dtm)`.
pub fn hag(dsm: &Raster, dtm: &Raster) -> Result<Raster> {
    for r in [dsm, dtm] {
        if r.kind == RasterKind::ClassCode {
            return Err(Error::Kind {
                op: "height above ground",
                kind: r.kind,
            });
        }
    }
    if !dsm.geometry.approx_eq(&dtm.geometry) {
        return Err(Error::GeometryMismatch);
    }
    let nodata = dsm.nodata;
    let values = dsm
        .values
        .iter()
        .zip(&dtm.values)
        .map(|(&s, &t)| {
            if dsm.is_nodata(s) || dtm.is_nodata(t) {
                nodata
            } else {
                (s - t).max(0.0)
            }
        })
        .collect();
    Raster::new(dsm.geometry, nodata, values, RasterKind::HeightM)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMethod {
    Bilinear,
    Mean,
    Max,
}

impl std::str::FromStr for ResampleMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bilinear" => Ok(Self::Bilinear),
            "mean" => Ok(Self::Mean),
            "max" => Ok(Self::Max),
            other => Err(format!("unknown resample method `{other}` (bilinear|mean|max)")),
        }
    }
}

/// Coarsens `r` by an integer `factor`. Blocks are aligned to the lower-left
/// corner; partial blocks on the north and east edges aggregate over the
/// cells present.
pub fn resample(r: &Raster, factor: usize, method: ResampleMethod, exec: Execution) -> Result<Raster> {
    let g = r.geometry;
    if factor < 2 {
        return Err(Error::InvalidFactor(factor));
    }
    if factor > g.ncols || factor > g.nrows {
        return Err(Error::FactorTooLarge {
            factor,
            ncols: g.ncols,
            nrows: g.nrows,
        });
    }
    if r.kind == RasterKind::ClassCode && method != ResampleMethod::Max {
        return Err(Error::Kind {
            op: "bilinear/mean resampling",
            kind: r.kind,
        });
    }

    let out = Geometry {
        ncols: g.ncols.div_ceil(factor),
        nrows: g.nrows.div_ceil(factor),
        xll_deg: g.xll_deg,
        yll_deg: g.yll_deg,
        cellsize_deg: g.cellsize_deg * factor as f64,
    };

    let rows = exec.map_range(out.nrows, |out_row| {
        let south_block = out.nrows - 1 - out_row;
        let s_lo = south_block * factor;
        let s_hi = (s_lo + factor).min(g.nrows);
        (0..out.ncols)
            .map(|out_col| match method {
                ResampleMethod::Bilinear => {
                    let (lat, lon) = out.cell_center(out_row, out_col);
                    let p = GeoPoint::new(lat.clamp(g.south(), g.north()), lon.clamp(g.west(), g.east()))
                        .expect("clamped into a valid raster extent");
                    r.sample_bilinear(p).unwrap_or(r.nodata)
                }
                ResampleMethod::Mean | ResampleMethod::Max => {
                    let c_lo = out_col * factor;
                    let c_hi = (c_lo + factor).min(g.ncols);
                    let block = (s_lo..s_hi)
                        .map(|s| g.nrows - 1 - s)
                        .flat_map(|row| (c_lo..c_hi).filter_map(move |col| r.get(row, col)));
                    aggregate(block, method).unwrap_or(r.nodata)
                }
            })
            .collect::<Vec<_>>()
    });

    Raster::new(out, r.nodata, rows.concat(), r.kind)
}

fn aggregate(values: impl Iterator<Item = f64>, method: ResampleMethod) -> Option<f64> {
    match method {
        ResampleMethod::Max => values.fold(None, |acc, v| Some(acc.map_or(v, |m: f64| m.max(v)))),
        _ => {
            // Summing offsets from the first value keeps constant blocks exact.
            let mut values = values.peekable();
            let first = *values.peek()?;
            let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + (v - first), n + 1));
            Some(first + sum / n as f64)
        }
    }
}

/// Parses an ESRI ASCII grid. Header keys are case-insensitive;
/// `NODATA_value` is optional.
pub fn load_ascii_grid<R: Read>(mut source: R, kind: RasterKind) -> Result<Raster> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;

    let mut ncols = None;
    let mut nrows = None;
    let mut xll = None;
    let mut yll = None;
    let mut cellsize = None;
    let mut nodata = None;

    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(idx, line)) = lines.peek() {
        let line_no = idx + 1;
        let mut tokens = line.split_whitespace();
        let Some(key) = tokens.next() else {
            lines.next();
            continue;
        };
        if !key.starts_with(|c: char| c.is_ascii_alphabetic()) || key.parse::<f64>().is_ok() {
            break;
        }
        let value = tokens.next().ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("header key `{key}` has no value"),
        })?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("trailing tokens after `{key}`"),
            });
        }
        let bad = |what: &str| Error::Parse {
            line: line_no,
            msg: format!("invalid {what} `{value}`"),
        };
        let slot_dup = |set: bool| {
            if set {
                Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate header key `{key}`"),
                })
            } else {
                Ok(())
            }
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => {
                slot_dup(ncols.is_some())?;
                ncols = Some(value.parse::<usize>().map_err(|_| bad("ncols"))?);
            }
            "nrows" => {
                slot_dup(nrows.is_some())?;
                nrows = Some(value.parse::<usize>().map_err(|_| bad("nrows"))?);
            }
            "xllcorner" => {
                slot_dup(xll.is_some())?;
                xll = Some(value.parse::<f64>().map_err(|_| bad("xllcorner"))?);
            }
            "yllcorner" => {
                slot_dup(yll.is_some())?;
                yll = Some(value.parse::<f64>().map_err(|_| bad("yllcorner"))?);
            }
            "cellsize" => {
                slot_dup(cellsize.is_some())?;
                cellsize = Some(value.parse::<f64>().map_err(|_| bad("cellsize"))?);
            }
            "nodata_value" => {
                slot_dup(nodata.is_some())?;
                nodata = Some(value.parse::<f64>().map_err(|_| bad("NODATA_value"))?);
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown header key `{key}`"),
                })
            }
        }
        lines.next();
    }

    let header_line = lines.peek().map_or(text.lines().count() + 1, |(i, _)| i + 1);
    let missing = |name: &str| Error::Parse {
        line: header_line,
        msg: format!("missing header key `{name}`"),
    };
    let geometry = Geometry {
        ncols: ncols.ok_or_else(|| missing("ncols"))?,
        nrows: nrows.ok_or_else(|| missing("nrows"))?,
        xll_deg: xll.ok_or_else(|| missing("xllcorner"))?,
        yll_deg: yll.ok_or_else(|| missing("yllcorner"))?,
        cellsize_deg: cellsize.ok_or_else(|| missing("cellsize"))?,
    };
    let nodata = nodata.unwrap_or(DEFAULT_NODATA);

    let mut values = Vec::with_capacity(geometry.len());
    for (idx, line) in lines {
        for tok in line.split_whitespace() {
            let v = tok.parse::<f64>().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("non-numeric cell `{tok}`"),
            })?;
            values.push(v);
        }
    }
    if values.len() != geometry.len() {
        return Err(Error::Parse {
            line: header_line,
            msg: format!(
                "header declares {}x{} = {} cells, found {}",
                geometry.ncols,
                geometry.nrows,
                geometry.len(),
                values.len()
            ),
        });
    }
    Raster::new(geometry, nodata, values, kind).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse { line: header_line, msg },
        other => other,
    })
}

/// Formats a cell value with at most six decimals, trailing zeros trimmed.
pub fn format_cell(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let mut s = format!("{v:.6}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    s
}

/// Serializes `r` as an ESRI ASCII grid, north row first.
pub fn write_ascii_grid<W: Write>(r: &Raster, mut out: W) -> std::io::Result<()> {
    let g = &r.geometry;
    let mut buf = String::new();
    let _ = writeln!(buf, "ncols {}", g.ncols);
    let _ = writeln!(buf, "nrows {}", g.nrows);
    let _ = writeln!(buf, "xllcorner {}", g.xll_deg);
    let _ = writeln!(buf, "yllcorner {}", g.yll_deg);
    let _ = writeln!(buf, "cellsize {}", g.cellsize_deg);
    let _ = writeln!(buf, "NODATA_value {}", format_cell(r.nodata));
    for row in r.values.chunks(g.ncols) {
        let line: Vec<String> = row
            .iter()
            .map(|&v| format_cell(if r.is_nodata(v) { r.nodata } else { v }))
            .collect();
        buf.push_str(&line.join(" "));
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())
}
