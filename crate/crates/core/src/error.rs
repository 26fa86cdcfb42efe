use thiserror::Error;

use crate::clutter::ClutterCategory;

#[derive(Debug, Error)]
pub enum Error {
    #[error("latitude {0} is outside [-90, 90]")]
    LatitudeOutOfRange(f64),

    #[error("non-finite coordinate")]
    NonFiniteCoordinate,

    #[error("interpolation between antipodal points is undefined")]
    AntipodalPoints,

    #[error("transmitter and receiver coincide")]
    DegenerateLink,

    #[error("spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("point ({lat}, {lon}) is outside the raster")]
    OutOfBounds { lat: f64, lon: f64 },

    #[error("cell holds nodata")]
    NoData,

    #[error("{op} is not defined for {kind:?} rasters")]
    Kind {
        op: &'static str,
        kind: crate::raster::RasterKind,
    },

    #[error("raster geometries differ")]
    GeometryMismatch,

    #[error("rasters do not overlap")]
    GeometryDisjoint,

    #[error("resample factor must be at least 2, got {0}")]
    InvalidFactor(usize),

    #[error("resample factor {factor} exceeds raster size {ncols}x{nrows}")]
    FactorTooLarge { factor: usize, ncols: usize, nrows: usize },

    #[error("land-cover code {0} is not mapped by the scheme")]
    UnmappedCode(i64),

    #[error("no cells contribute to category {0}")]
    EmptyClass(ClutterCategory),

    #[error("profile length {profile_m} m does not match link distance {link_m} m")]
    ProfileMismatch { profile_m: f64, link_m: f64 },

    #[error("invalid link: {0}")]
    InvalidLink(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("statistics need at least one sample")]
    EmptyInput,

    #[error("record {index} (dataset {dataset}): {source}")]
    Record {
        index: usize,
        dataset: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
