//! Land-cover classes to clutter categories, and representative clutter
//! heights per category.
//!
//! A [`ClutterScheme`] maps raw land-cover codes onto the four
//! [`ClutterCategory`] values. A [`HeightTable`] then assigns each category a
//! representative height, either the recommended defaults or statistics of
//! height above ground taken over cells of that category.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geodesy::GeoPoint;
use crate::keyvalue;
use crate::raster::{Raster, RasterKind};

/// Cells below this height above ground are treated as bare ground when
/// computing category statistics.
pub const HAG_FLOOR_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClutterCategory {
    WaterOpenRural,
    Suburban,
    UrbanTreesForest,
    DenseUrban,
}

impl ClutterCategory {
    pub const ALL: [ClutterCategory; 4] = [
        ClutterCategory::WaterOpenRural,
        ClutterCategory::Suburban,
        ClutterCategory::UrbanTreesForest,
        ClutterCategory::DenseUrban,
    ];

    /// Short name used in scheme and height files.
    pub fn name(self) -> &'static str {
        match self {
            ClutterCategory::WaterOpenRural => "open",
            ClutterCategory::Suburban => "suburban",
            ClutterCategory::UrbanTreesForest => "trees",
            ClutterCategory::DenseUrban => "dense",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ClutterCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClutterCategory {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ClutterCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown clutter category `{s}` (open|suburban|trees|dense)"))
    }
}

/// Representative clutter heights in meters, per category, with optional
/// per-code overrides for schemes that split a category into several classes.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightTable {
    by_category: [f64; 4],
    by_code: BTreeMap<i64, f64>,
}

impl Default for HeightTable {
    fn default() -> Self {
        Self {
            by_category: [0.0, 10.0, 15.0, 20.0],
            by_code: BTreeMap::new(),
        }
    }
}

fn check_height(h: f64) -> Result<f64> {
    if h.is_finite() && h >= 0.0 {
        Ok(h)
    } else {
        Err(Error::InvalidValue(format!(
            "clutter height {h} must be finite and >= 0"
        )))
    }
}

impl HeightTable {
    pub fn height(&self, c: ClutterCategory) -> f64 {
        self.by_category[c.index()]
    }

    pub fn set_height(&mut self, c: ClutterCategory, h: f64) -> Result<()> {
        self.by_category[c.index()] = check_height(h)?;
        Ok(())
    }

    pub fn code_override(&self, code: i64) -> Option<f64> {
        self.by_code.get(&code).copied()
    }

    pub fn set_code_override(&mut self, code: i64, h: f64) -> Result<()> {
        self.by_code.insert(code, check_height(h)?);
        Ok(())
    }

    /// Height for a raw land-cover code: the per-code override if present,
    /// otherwise the height of the code's category.
    pub fn height_for_code(&self, scheme: &ClutterScheme, code: i64) -> Result<f64> {
        match self.code_override(code) {
            Some(h) => Ok(h),
            None => Ok(self.height(scheme.map_code(code)?)),
        }
    }

    /// Parses `height.<category>=<m>` and `height.code.<code>=<m>` lines on
    /// top of the default table.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self::default();
        for e in keyvalue::parse(text)? {
            let h: f64 = e.value.parse().map_err(|_| e.error("height is not a number"))?;
            if let Some(code) = e.key.strip_prefix("height.code.") {
                let code: i64 = code.parse().map_err(|_| e.error("code is not an integer"))?;
                table
                    .set_code_override(code, h)
                    .map_err(|err| e.error(err.to_string()))?;
            } else if let Some(cat) = e.key.strip_prefix("height.") {
                let cat: ClutterCategory = cat.parse().map_err(|m: String| e.error(m))?;
                table.set_height(cat, h).map_err(|err| e.error(err.to_string()))?;
            } else {
                return Err(e.error("unknown key"));
            }
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in ClutterCategory::ALL {
            out.push_str(&format!("height.{}={}\n", c.name(), self.height(c)));
        }
        for (code, h) in &self.by_code {
            out.push_str(&format!("height.code.{code}={h}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnmappedPolicy {
    Error,
    TreatAsOpen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClutterScheme {
    name: String,
    code_map: BTreeMap<i64, ClutterCategory>,
    unmapped: UnmappedPolicy,
}

impl ClutterScheme {
    pub fn new(
        name: impl Into<String>,
        code_map: BTreeMap<i64, ClutterCategory>,
        unmapped: UnmappedPolicy,
    ) -> Result<Self> {
        if code_map.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "scheme maps no codes".into(),
            });
        }
        Ok(Self {
            name: name.into(),
            code_map,
            unmapped,
        })
    }

    fn from_pairs(name: &str, pairs: &[(i64, ClutterCategory)], unmapped: UnmappedPolicy) -> Self {
        Self::new(name, pairs.iter().copied().collect(), unmapped).expect("non-empty builtin scheme")
    }

    /// ESA WorldCover: tree cover and mangroves are trees, built-up is
    /// suburban, everything else is open.
    pub fn esa_worldcover() -> Self {
        use ClutterCategory::*;
        Self::from_pairs(
            "esa",
            &[
                (10, UrbanTreesForest),
                (20, WaterOpenRural),
                (30, WaterOpenRural),
                (40, WaterOpenRural),
                (50, Suburban),
                (60, WaterOpenRural),
                (70, WaterOpenRural),
                (80, WaterOpenRural),
                (90, WaterOpenRural),
                (95, UrbanTreesForest),
                (100, WaterOpenRural),
            ],
            UnmappedPolicy::Error,
        )
    }

    /// NRCan Land Cover 2020 (30 m). The forest classes (1, 2 needleleaf;
    /// 5 broadleaf; 6 mixed) are trees and can be given distinct heights
    /// with per-code overrides; urban (17) is suburban.
    pub fn nrcan_landcover() -> Self {
        use ClutterCategory::*;
        let mut pairs: Vec<(i64, ClutterCategory)> = vec![
            (1, UrbanTreesForest),
            (2, UrbanTreesForest),
            (5, UrbanTreesForest),
            (6, UrbanTreesForest),
            (17, Suburban),
        ];
        pairs.extend([8, 10, 11, 12, 13, 14, 15, 16, 18, 19].map(|c| (c, WaterOpenRural)));
        Self::from_pairs("nrcan", &pairs, UnmappedPolicy::Error)
    }

    /// Pre-rasterized OpenStreetMap `landuse=wood` mask: 1 = wood, 0 = other.
    pub fn osm_wood() -> Self {
        use ClutterCategory::*;
        Self::from_pairs(
            "osm",
            &[(0, WaterOpenRural), (1, UrbanTreesForest)],
            UnmappedPolicy::Error,
        )
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "esa" => Some(Self::esa_worldcover()),
            "nrcan" => Some(Self::nrcan_landcover()),
            "osm" => Some(Self::osm_wood()),
            _ => None,
        }
    }

    /// Parses `name=`, `unmapped=error|open` and `code.<n>=<category>` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = String::from("custom");
        let mut unmapped = UnmappedPolicy::Error;
        let mut code_map = BTreeMap::new();
        for e in keyvalue::parse(text)? {
            if let Some(code) = e.key.strip_prefix("code.") {
                let code: i64 = code.parse().map_err(|_| e.error("code is not an integer"))?;
                let cat: ClutterCategory = e.value.parse().map_err(|m: String| e.error(m))?;
                if code_map.insert(code, cat).is_some() {
                    return Err(e.error("duplicate code"));
                }
            } else {
                match e.key.as_str() {
                    "name" => name = e.value.clone(),
                    "unmapped" => {
                        unmapped = match e.value.as_str() {
                            "error" => UnmappedPolicy::Error,
                            "open" => UnmappedPolicy::TreatAsOpen,
                            _ => return Err(e.error("expected `error` or `open`")),
                        }
                    }
                    _ => return Err(e.error("unknown key")),
                }
            }
        }
        Self::new(name, code_map, unmapped)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("name={}\n", self.name);
        let policy = match self.unmapped {
            UnmappedPolicy::Error => "error",
            UnmappedPolicy::TreatAsOpen => "open",
        };
        out.push_str(&format!("unmapped={policy}\n"));
        for (code, cat) in &self.code_map {
            out.push_str(&format!("code.{code}={cat}\n"));
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn codes(&self) -> impl Iterator<Item = (i64, ClutterCategory)> + '_ {
        self.code_map.iter().map(|(&k, &v)| (k, v))
    }

    pub fn map_code(&self, code: i64) -> Result<ClutterCategory> {
        match (self.code_map.get(&code), self.unmapped) {
            (Some(&c), _) => Ok(c),
            (None, UnmappedPolicy::TreatAsOpen) => Ok(ClutterCategory::WaterOpenRural),
            (None, UnmappedPolicy::Error) => Err(Error::UnmappedCode(code)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightStat {
    Mean,
    Median,
    P75,
}

impl FromStr for HeightStat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            "p75" => Ok(Self::P75),
            other => Err(format!("unknown statistic `{other}` (mean|median|p75)")),
        }
    }
}

impl fmt::Display for HeightStat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeightStat::Mean => "mean",
            HeightStat::Median => "median",
            HeightStat::P75 => "p75",
        })
    }
}

/// Nearest-rank percentile of `values` (`fraction` in (0, 1]). Sorts in place.
pub fn nearest_rank(values: &mut [f64], fraction: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let rank = ((fraction * n as f64).ceil() as usize).clamp(1, n);
    Some(values[rank - 1])
}

fn apply_stat(mut values: Vec<f64>, stat: HeightStat) -> Option<f64> {
    match stat {
        HeightStat::Mean => (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64),
        HeightStat::Median => nearest_rank(&mut values, 0.5),
        HeightStat::P75 => nearest_rank(&mut values, 0.75),
    }
}

/// HAG samples (at land-cover cell centers, nearest neighbour) for cells
/// whose code satisfies `keep`, above [`HAG_FLOOR_M`].
fn hag_samples(
    hag: &Raster,
    landcover: &Raster,
    scheme: &ClutterScheme,
    keep: impl Fn(i64, ClutterCategory) -> bool,
) -> Result<Vec<f64>> {
    if landcover.kind() != RasterKind::ClassCode {
        return Err(Error::Kind {
            op: "class statistics (land cover input)",
            kind: landcover.kind(),
        });
    }
    if hag.kind() == RasterKind::ClassCode {
        return Err(Error::Kind {
            op: "class statistics (height input)",
            kind: hag.kind(),
        });
    }
    let (h, l) = (hag.geometry(), landcover.geometry());
    if h.west() > l.east() || l.west() > h.east() || h.south() > l.north() || l.south() > h.north() {
        return Err(Error::GeometryDisjoint);
    }
    let mut out = Vec::new();
    for row in 0..l.nrows {
        for col in 0..l.ncols {
            let Some(code) = landcover.get(row, col) else {
                continue;
            };
            let code = code as i64;
            if !keep(code, scheme.map_code(code)?) {
                continue;
            }
            let (lat, lon) = l.cell_center(row, col);
            let Ok(p) = GeoPoint::new(lat, lon) else {
                continue;
            };
            match hag.sample_nearest(p) {
                Ok(v) if v >= HAG_FLOOR_M => out.push(v),
                Ok(_) | Err(Error::OutOfBounds { .. }) | Err(Error::NoData) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Statistic of height above ground over land-cover cells of `category`.
pub fn class_stat(
    hag: &Raster,
    landcover: &Raster,
    scheme: &ClutterScheme,
    category: ClutterCategory,
    stat: HeightStat,
) -> Result<f64> {
    let samples = hag_samples(hag, landcover, scheme, |_, c| c == category)?;
    apply_stat(samples, stat).ok_or(Error::EmptyClass(category))
}

/// Statistic of height above ground over cells carrying exactly `code`.
pub fn code_stat(hag: &Raster, landcover: &Raster, scheme: &ClutterScheme, code: i64, stat: HeightStat) -> Result<f64> {
    let category = scheme.map_code(code)?;
    let samples = hag_samples(hag, landcover, scheme, |c, _| c == code)?;
    apply_stat(samples, stat).ok_or(Error::EmptyClass(category))
}

/// Replaces the height of every obstructing category present in `scheme`
/// with `stat` of the HAG over that category. Categories without
/// contributing cells keep their `base` height; open ground stays as is.
pub fn derive_height_table(
    base: &HeightTable,
    hag: &Raster,
    landcover: &Raster,
    scheme: &ClutterScheme,
    stat: HeightStat,
) -> Result<HeightTable> {
    let mut table = base.clone();
    let mut categories: Vec<ClutterCategory> = scheme.codes().map(|(_, c)| c).collect();
    categories.sort();
    categories.dedup();
    for cat in categories {
        if cat == ClutterCategory::WaterOpenRural {
            continue;
        }
        match class_stat(hag, landcover, scheme, cat, stat) {
            Ok(h) => table.set_height(cat, h)?,
            Err(Error::EmptyClass(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(table)
}

/// Per-cell representative clutter height for a land-cover raster.
pub fn build_height_raster(landcover: &Raster, scheme: &ClutterScheme, table: &HeightTable) -> Result<Raster> {
    if landcover.kind() != RasterKind::ClassCode {
        return Err(Error::Kind {
            op: "clutter height mapping",
            kind: landcover.kind(),
        });
    }
    let values = landcover
        .values()
        .iter()
        .map(|&v| {
            if landcover.is_nodata(v) {
                Ok(landcover.nodata())
            } else {
                table.height_for_code(scheme, v as i64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Raster::new(*landcover.geometry(), landcover.nodata(), values, RasterKind::HeightM)
}
