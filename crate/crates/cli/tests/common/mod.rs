//! Fixtures shared by the CLI test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clutterloss::geodesy::GeoPoint;
use clutterloss::raster::{write_ascii_grid, Geometry, Raster, RasterKind, DEFAULT_NODATA};

pub const ORIGIN_LAT: f64 = 45.0;
pub const ORIGIN_LON: f64 = -75.0;
pub const TERRAIN_CELL_DEG: f64 = 0.0005;
pub const TERRAIN_CELLS: usize = 120;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clutterloss"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn clutterloss")
}

pub fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "clutterloss failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn write_raster(dir: &Path, name: &str, r: &Raster) -> PathBuf {
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_ascii_grid(r, &mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

pub fn geometry(cell_deg: f64, cells: usize) -> Geometry {
    Geometry {
        ncols: cells,
        nrows: cells,
        xll_deg: ORIGIN_LON,
        yll_deg: ORIGIN_LAT,
        cellsize_deg: cell_deg,
    }
}

/// 100 m elevation everywhere.
pub fn flat_terrain() -> Raster {
    let g = geometry(TERRAIN_CELL_DEG, TERRAIN_CELLS);
    Raster::from_fn(g, DEFAULT_NODATA, RasterKind::ElevationM, |_, _| 100.0).unwrap()
}

/// Gentle hills, so profiles and losses are not trivial.
pub fn hilly_terrain() -> Raster {
    let g = geometry(TERRAIN_CELL_DEG, TERRAIN_CELLS);
    Raster::from_fn(g, DEFAULT_NODATA, RasterKind::ElevationM, |r, c| {
        120.0 + 25.0 * (r as f64 * 0.11).sin() * (c as f64 * 0.07).cos()
    })
    .unwrap()
}

/// ESA-style land cover: trees, built-up and water patches plus grass.
pub fn landcover() -> Raster {
    let g = geometry(TERRAIN_CELL_DEG / 2.0, TERRAIN_CELLS * 2);
    Raster::from_fn(g, DEFAULT_NODATA, RasterKind::ClassCode, |r, c| {
        match (r / 20 + c / 30) % 4 {
            0 => 10.0,
            1 => 50.0,
            2 => 80.0,
            _ => 30.0,
        }
    })
    .unwrap()
}

/// Height above ground matching [`landcover`]: varied canopy and roofs.
pub fn hag_for_landcover() -> Raster {
    let lc = landcover();
    Raster::from_fn(*lc.geometry(), DEFAULT_NODATA, RasterKind::HeightM, |r, c| {
        match lc.raw(r, c) as i64 {
            10 => 8.25 + ((r * 7 + c * 3) % 17) as f64,
            50 => 5.0 + ((r + c) % 9) as f64 * 1.5,
            _ => ((r + 2 * c) % 3) as f64 * 0.3,
        }
    })
    .unwrap()
}

/// Point `north_m` meters north and `east_m` meters east of the raster
/// origin plus a small inset.
pub fn point(north_m: f64, east_m: f64) -> GeoPoint {
    let m_per_deg = clutterloss::coverage::METERS_PER_DEGREE;
    let lat = ORIGIN_LAT + 0.004 + north_m / m_per_deg;
    let lon = ORIGIN_LON + 0.004 + east_m / (m_per_deg * lat.to_radians().cos());
    GeoPoint::new(lat, lon).unwrap()
}

pub fn coord(p: GeoPoint) -> String {
    format!("{},{}", p.lat_deg(), p.lon_deg())
}
