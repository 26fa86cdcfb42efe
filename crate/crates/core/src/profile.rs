//! Path profiles: evenly spaced (distance, terrain height, clutter height)
//! samples between a transmitter and a receiver.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geodesy::{sample_path, GeoPoint};
use crate::raster::{Raster, RasterKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClutterSampling {
    #[default]
    Nearest,
    Bilinear,
}

impl FromStr for ClutterSampling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nearest" => Ok(Self::Nearest),
            "bilinear" => Ok(Self::Bilinear),
            other => Err(format!("unknown clutter sampling `{other}` (nearest|bilinear)")),
        }
    }
}

/// Where representative clutter heights come from. Canopy height maps,
/// height-above-ground maps and heights built from land cover are all
/// `Heights` rasters.
#[derive(Debug, Clone, Copy)]
pub enum ClutterSource<'a> {
    None,
    Heights(&'a Raster),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub d_m: f64,
    pub terrain_m: f64,
    pub clutter_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathProfile {
    spacing_m: f64,
    points: Vec<ProfilePoint>,
}

impl PathProfile {
    /// Validates and wraps a list of points: at least three, starting at
    /// distance 0, strictly increasing, clutter non-negative.
    pub fn from_points(points: Vec<ProfilePoint>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidProfile(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if points[0].d_m != 0.0 {
            return Err(Error::InvalidProfile("first point must be at distance 0".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            let increasing = w[1].d_m > w[0].d_m;
            if !increasing {
                return Err(Error::InvalidProfile(format!(
                    "distance not increasing at point {}",
                    i + 1
                )));
            }
        }
        if let Some(p) = points
            .iter()
            .find(|p| p.clutter_m < 0.0 || !p.clutter_m.is_finite() || !p.terrain_m.is_finite())
        {
            return Err(Error::InvalidProfile(format!("invalid point at d={} m", p.d_m)));
        }
        let spacing_m = points.last().unwrap().d_m / (points.len() - 1) as f64;
        Ok(Self { spacing_m, points })
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_distance_m(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.d_m)
    }

    /// Three-column text table, meters to 3 decimals.
    pub fn to_table(&self) -> String {
        let mut out = String::from("d_m terrain_m clutter_m\n");
        for p in &self.points {
            let _ = writeln!(out, "{:.3} {:.3} {:.3}", p.d_m, p.terrain_m, p.clutter_m);
        }
        out
    }

    /// Parses the output of [`PathProfile::to_table`]. Lines starting with
    /// `#` and the column header are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("d_m") {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("not a number: `{s}`"),
                })
            };
            if cols.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected 3 columns, found {}", cols.len()),
                });
            }
            points.push(ProfilePoint {
                d_m: parse(cols[0])?,
                terrain_m: parse(cols[1])?,
                clutter_m: parse(cols[2])?,
            });
        }
        Self::from_points(points)
    }
}

/// Combined terrain-plus-clutter surface heights.
pub fn profile_surface(profile: &PathProfile) -> Vec<f64> {
    profile.points.iter().map(|p| p.terrain_m + p.clutter_m).collect()
}

/// Builds the profile from `tx` to `rx` at no more than `max_spacing_m`.
///
/// Terrain is interpolated bilinearly and must cover every sample. Clutter
/// nodata reads as 0 m, and clutter at the two terminals is always 0.
pub fn extract_profile(
    terrain: &Raster,
    clutter: ClutterSource<'_>,
    tx: GeoPoint,
    rx: GeoPoint,
    max_spacing_m: f64,
    sampling: ClutterSampling,
) -> Result<PathProfile> {
    if let ClutterSource::Heights(r) = clutter {
        if r.kind() != RasterKind::HeightM {
            return Err(Error::Kind {
                op: "clutter source",
                kind: r.kind(),
            });
        }
    }
    let samples = sample_path(tx, rx, max_spacing_m)?;
    let last = samples.points.len() - 1;
    let points = samples
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let terrain_m = terrain.sample_bilinear(p)?;
            let clutter_m = match clutter {
                _ if i == 0 || i == last => 0.0,
                ClutterSource::None => 0.0,
                ClutterSource::Heights(r) => {
                    let v = match sampling {
                        ClutterSampling::Nearest => r.sample_nearest(p),
                        ClutterSampling::Bilinear => r.sample_bilinear(p),
                    };
                    match v {
                        Ok(h) => h.max(0.0),
                        Err(Error::NoData) => 0.0,
                        Err(e) => return Err(e),
                    }
                }
            };
            Ok(ProfilePoint {
                d_m: if i == last {
                    samples.distance_m
                } else {
                    i as f64 * samples.spacing_m
                },
                terrain_m,
                clutter_m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathProfile {
        spacing_m: samples.spacing_m,
        points,
    })
}
