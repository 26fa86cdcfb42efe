//! Point-to-area prediction: one median loss per output cell center.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geodesy::{GeoPoint, EARTH_RADIUS_M};
use crate::kernel::{predict, LinkSpec};
use crate::profile::{extract_profile, ClutterSampling, ClutterSource};
use crate::raster::{Geometry, Raster, RasterKind, DEFAULT_NODATA};

/// Meters per degree of arc on the model sphere.
pub const METERS_PER_DEGREE: f64 = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;

/// Output grid covering the box `[min_lat, max_lat] x [min_lon, max_lon]`
/// with square cells of roughly `cell_m` meters (measured along a meridian).
pub fn grid_for_bbox(min_lat: f64, min_lon: f64, max_lat: f64, max_lon: f64, cell_m: f64) -> Result<Geometry> {
    if !(cell_m > 0.0 && cell_m.is_finite()) {
        return Err(Error::InvalidSpacing(cell_m));
    }
    if !(max_lat > min_lat && max_lon > min_lon) {
        return Err(Error::InvalidValue(format!(
            "empty bounding box {min_lat},{min_lon},{max_lat},{max_lon}"
        )));
    }
    let cell_deg = cell_m / METERS_PER_DEGREE;
    let count = |span: f64| ((span / cell_deg) * (1.0 - 1e-9)).ceil().max(1.0) as usize;
    Ok(Geometry {
        ncols: count(max_lon - min_lon),
        nrows: count(max_lat - min_lat),
        xll_deg: min_lon,
        yll_deg: min_lat,
        cellsize_deg: cell_deg,
    })
}

/// Fixed parameters shared by every cell of a coverage run.
#[derive(Debug, Clone, Copy)]
pub struct CoverageParams {
    pub tx: GeoPoint,
    pub tx_height_agl_m: f64,
    pub rx_height_agl_m: f64,
    pub freq_mhz: f64,
    pub spacing_m: f64,
    pub clutter_sampling: ClutterSampling,
}

/// Median loss from the transmitter to each cell center of `grid`. Cells
/// whose path cannot be evaluated (outside terrain, zero length) are nodata.
pub fn predict_area(
    terrain: &Raster,
    clutter: ClutterSource<'_>,
    params: &CoverageParams,
    grid: Geometry,
    exec: Execution,
) -> Result<Raster> {
    // Reject bad link parameters up front instead of returning an all-nodata grid.
    LinkSpec::new(
        params.tx,
        params.tx,
        params.tx_height_agl_m,
        params.rx_height_agl_m,
        params.freq_mhz,
    )?;
    let rows = exec.map_range(grid.nrows, |row| {
        (0..grid.ncols)
            .map(|col| {
                let (lat, lon) = grid.cell_center(row, col);
                cell_loss(terrain, clutter, params, lat, lon).unwrap_or(DEFAULT_NODATA)
            })
            .collect::<Vec<_>>()
    });
    Raster::new(grid, DEFAULT_NODATA, rows.concat(), RasterKind::HeightM)
}

fn cell_loss(terrain: &Raster, clutter: ClutterSource<'_>, params: &CoverageParams, lat: f64, lon: f64) -> Result<f64> {
    let rx = GeoPoint::new(lat, lon)?;
    let link = LinkSpec::new(
        params.tx,
        rx,
        params.tx_height_agl_m,
        params.rx_height_agl_m,
        params.freq_mhz,
    )?;
    let profile = extract_profile(
        terrain,
        clutter,
        params.tx,
        rx,
        params.spacing_m,
        params.clutter_sampling,
    )?;
    Ok(predict(&profile, &link)?.loss_db)
}
