//! Turning command-line flags into rasters and clutter strategies.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;

use clutterloss::clutter::{build_height_raster, derive_height_table, ClutterScheme, HeightStat, HeightTable};
use clutterloss::keyvalue;
use clutterloss::profile::ClutterSampling;
use clutterloss::raster::{load_ascii_grid, resample, Raster, RasterKind, ResampleMethod};
use clutterloss::Execution;

pub fn read_raster(path: &Path, kind: RasterKind, what: &str) -> Result<Raster> {
    let file = File::open(path).with_context(|| format!("opening {what} `{}`", path.display()))?;
    load_ascii_grid(BufReader::new(file), kind).with_context(|| format!("reading {what} `{}`", path.display()))
}

pub fn read_text(path: &Path, what: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {what} `{}`", path.display()))
}

/// `esa`, `nrcan`, `osm`, or a path to a scheme file.
pub fn load_scheme(spec: &str) -> Result<ClutterScheme> {
    if let Some(s) = ClutterScheme::builtin(spec) {
        return Ok(s);
    }
    let text = read_text(Path::new(spec), "scheme")?;
    ClutterScheme::parse(&text).with_context(|| format!("parsing scheme `{spec}`"))
}

pub fn load_heights(path: Option<&Path>) -> Result<HeightTable> {
    match path {
        None => Ok(HeightTable::default()),
        Some(p) => {
            let text = read_text(p, "height table")?;
            HeightTable::parse(&text).with_context(|| format!("parsing height table `{}`", p.display()))
        }
    }
}

/// Where category heights come from when clutter is land cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightSource {
    Defaults,
    Stat(HeightStat),
}

impl std::fmt::Display for HeightSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeightSource::Defaults => f.write_str("defaults"),
            HeightSource::Stat(s) => write!(f, "{s}"),
        }
    }
}

impl std::str::FromStr for HeightSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "defaults" => Ok(Self::Defaults),
            other => other.parse().map(Self::Stat),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ClutterArgs {
    /// Clutter raster: heights in meters, or land-cover codes when --scheme is given
    #[arg(long)]
    pub clutter: Option<PathBuf>,

    /// Land-cover scheme: esa, nrcan, osm, or a scheme file
    #[arg(long, requires = "clutter")]
    pub scheme: Option<String>,

    /// Height table file overriding the default category heights
    #[arg(long, requires = "scheme")]
    pub heights: Option<PathBuf>,

    /// Height-above-ground raster used for --stat category heights
    #[arg(long)]
    pub hag: Option<PathBuf>,

    /// Category heights from HAG statistics instead of the table
    #[arg(long, value_parser = parse_stat, requires_all = ["hag", "scheme"])]
    pub stat: Option<HeightStat>,

    /// How clutter heights are read along the path
    #[arg(long, default_value = "nearest", value_parser = parse_sampling)]
    pub clutter_sampling: ClutterSampling,

    /// Coarsen the clutter height map by this integer factor before use
    #[arg(long, requires = "resample_method")]
    pub resample_factor: Option<usize>,

    #[arg(long, value_parser = parse_method, requires = "resample_factor")]
    pub resample_method: Option<ResampleMethod>,
}

pub fn parse_stat(s: &str) -> Result<HeightStat, String> {
    s.parse()
}

pub fn parse_sampling(s: &str) -> Result<ClutterSampling, String> {
    s.parse()
}

pub fn parse_method(s: &str) -> Result<ResampleMethod, String> {
    s.parse()
}

impl ClutterArgs {
    pub fn default_source(&self) -> HeightSource {
        self.stat.map_or(HeightSource::Defaults, HeightSource::Stat)
    }

    pub fn is_landcover(&self) -> bool {
        self.scheme.is_some()
    }

    /// Loads the inputs once so sweeps can build several height maps.
    pub fn load(&self) -> Result<LoadedClutter> {
        let Some(path) = &self.clutter else {
            if self.hag.is_some() {
                bail!("--hag needs --clutter and --scheme");
            }
            return Ok(LoadedClutter::None);
        };
        match &self.scheme {
            None => Ok(LoadedClutter::Surface(read_raster(
                path,
                RasterKind::HeightM,
                "clutter heights",
            )?)),
            Some(scheme) => {
                let landcover = read_raster(path, RasterKind::ClassCode, "land cover")?;
                let hag = match &self.hag {
                    Some(p) => Some(read_raster(p, RasterKind::HeightM, "height above ground")?),
                    None => None,
                };
                Ok(LoadedClutter::LandCover {
                    landcover,
                    scheme: load_scheme(scheme)?,
                    base: load_heights(self.heights.as_deref())?,
                    hag,
                })
            }
        }
    }
}

pub enum LoadedClutter {
    None,
    Surface(Raster),
    LandCover {
        landcover: Raster,
        scheme: ClutterScheme,
        base: HeightTable,
        hag: Option<Raster>,
    },
}

impl LoadedClutter {
    /// Clutter height raster for `source`, resampled if requested.
    pub fn height_map(
        &self,
        source: HeightSource,
        resampling: Option<(usize, ResampleMethod)>,
        exec: Execution,
    ) -> Result<Option<Raster>> {
        let map = match self {
            LoadedClutter::None => return Ok(None),
            LoadedClutter::Surface(r) => r.clone(),
            LoadedClutter::LandCover {
                landcover,
                scheme,
                base,
                hag,
            } => {
                let table = match source {
                    HeightSource::Defaults => base.clone(),
                    HeightSource::Stat(stat) => {
                        let hag = hag.as_ref().context("statistic height source needs --hag")?;
                        derive_height_table(base, hag, landcover, scheme, stat)?
                    }
                };
                build_height_raster(landcover, scheme, &table)?
            }
        };
        match resampling {
            Some((factor, method)) => Ok(Some(resample(&map, factor, method, exec)?)),
            None => Ok(Some(map)),
        }
    }
}

/// Sweep axes read from a manifest (`stats=` and `spacings=` keys).
pub struct SweepAxes {
    pub sources: Vec<HeightSource>,
    pub spacings: Vec<f64>,
}

impl Default for SweepAxes {
    fn default() -> Self {
        Self {
            sources: vec![
                HeightSource::Defaults,
                HeightSource::Stat(HeightStat::Mean),
                HeightSource::Stat(HeightStat::P75),
            ],
            spacings: vec![10.0, 30.0, 100.0],
        }
    }
}

impl SweepAxes {
    pub fn parse(text: &str) -> Result<Self> {
        let mut axes = Self::default();
        for e in keyvalue::parse(text)? {
            let items = e.value.split(',').map(str::trim).filter(|s| !s.is_empty());
            match e.key.as_str() {
                "stats" => {
                    axes.sources = items
                        .map(|s| s.parse::<HeightSource>().map_err(|m| e.error(m)))
                        .collect::<Result<_, _>>()?;
                }
                "spacings" => {
                    axes.spacings = items
                        .map(|s| {
                            s.parse::<f64>()
                                .ok()
                                .filter(|v| *v > 0.0)
                                .ok_or_else(|| e.error(format!("invalid spacing `{s}`")))
                        })
                        .collect::<Result<_, _>>()?;
                }
                _ => return Err(e.error("unknown key").into()),
            }
        }
        if axes.sources.is_empty() || axes.spacings.is_empty() {
            bail!("sweep manifest leaves an axis empty");
        }
        Ok(axes)
    }
}
