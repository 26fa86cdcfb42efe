//! Path-loss prediction over terrain and clutter.
//!
//! The crate builds transmitter-to-receiver path profiles from elevation and
//! land-cover rasters, predicts median basic transmission loss over them, and
//! scores predictions against measured path loss.
//!
//! - [`geodesy`]: great-circle distance and evenly spaced path samples.
//! - [`raster`]: ESRI ASCII grids, sampling, height above ground, resampling.
//! - [`clutter`]: land-cover schemes and representative clutter heights.
//! - [`profile`]: (distance, terrain, clutter) path profiles.
//! - [`kernel`]: free-space loss plus Bullington diffraction.
//! - [`eval`]: RMSE, median error, group averages and error histograms.
//! - [`coverage`]: per-cell prediction over an area.
//!
//! ```
//! use clutterloss::geodesy::GeoPoint;
//! use clutterloss::kernel::{predict, LinkSpec};
//! use clutterloss::profile::{extract_profile, ClutterSampling, ClutterSource};
//! use clutterloss::raster::{Geometry, Raster, RasterKind, DEFAULT_NODATA};
//!
//! let grid = Geometry { ncols: 10, nrows: 10, xll_deg: 0.0, yll_deg: 0.0, cellsize_deg: 0.001 };
//! let terrain = Raster::from_fn(grid, DEFAULT_NODATA, RasterKind::ElevationM, |_, _| 100.0)?;
//! let tx = GeoPoint::new(0.0005, 0.0005)?;
//! let rx = GeoPoint::new(0.0085, 0.0085)?;
//! let profile = extract_profile(&terrain, ClutterSource::None, tx, rx, 30.0, ClutterSampling::Nearest)?;
//! let loss = predict(&profile, &LinkSpec::new(tx, rx, 30.0, 2.0, 900.0)?)?;
//! assert_eq!(loss.loss_db, loss.fspl_db);
//! # Ok::<(), clutterloss::Error>(())
//! ```

pub mod clutter;
pub mod coverage;
pub mod error;
pub mod eval;
pub mod exec;
pub mod geodesy;
pub mod kernel;
pub mod keyvalue;
pub mod profile;
pub mod raster;

pub use error::{Error, Result};
pub use exec::Execution;
