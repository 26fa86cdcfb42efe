//! Median path loss: free-space loss plus Bullington diffraction over the
//! combined terrain and clutter surface.
//!
//! Only the median regime is modelled (time and location percentages both
//! 50%), so there are no ducting, troposcatter or location-variability terms.
//! The smooth-earth correction of the delta-Bullington method is also absent.

use std::fmt;

use crate::error::{Error, Result};
use crate::geodesy::{great_circle_distance, GeoPoint, EARTH_RADIUS_M};
use crate::profile::PathProfile;

/// Time percentage the kernel predicts for.
pub const TIME_PERCENT: f64 = 50.0;
/// Location percentage the kernel predicts for.
pub const LOCATION_PERCENT: f64 = 50.0;

/// Median effective earth radius factor.
pub const K_FACTOR: f64 = 4.0 / 3.0;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

pub const MIN_FREQ_MHZ: f64 = 30.0;
pub const MAX_FREQ_MHZ: f64 = 6000.0;

/// Below this the knife-edge loss is zero.
pub const KNIFE_EDGE_THRESHOLD: f64 = -0.78;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub tx: GeoPoint,
    pub rx: GeoPoint,
    pub tx_height_agl_m: f64,
    pub rx_height_agl_m: f64,
    pub freq_mhz: f64,
}

impl LinkSpec {
    pub fn new(tx: GeoPoint, rx: GeoPoint, tx_height_agl_m: f64, rx_height_agl_m: f64, freq_mhz: f64) -> Result<Self> {
        let link = Self {
            tx,
            rx,
            tx_height_agl_m,
            rx_height_agl_m,
            freq_mhz,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_FREQ_MHZ..=MAX_FREQ_MHZ).contains(&self.freq_mhz) {
            return Err(Error::InvalidLink(format!(
                "frequency {} MHz outside [{MIN_FREQ_MHZ}, {MAX_FREQ_MHZ}]",
                self.freq_mhz
            )));
        }
        for (name, h) in [("tx", self.tx_height_agl_m), ("rx", self.rx_height_agl_m)] {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidLink(format!("{name} height {h} m must be positive")));
            }
        }
        Ok(())
    }

    pub fn distance_m(&self) -> f64 {
        great_circle_distance(self.tx, self.rx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    LineOfSight,
    TransHorizon,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::LineOfSight => "line_of_sight",
            Regime::TransHorizon => "trans_horizon",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionResult {
    pub loss_db: f64,
    pub fspl_db: f64,
    pub diffraction_db: f64,
    pub regime: Regime,
}

/// Free-space basic transmission loss in dB.
pub fn fspl(freq_mhz: f64, distance_m: f64) -> f64 {
    32.44 + 20.0 * freq_mhz.log10() + 20.0 * (distance_m / 1000.0).log10()
}

/// Single knife-edge diffraction loss J(nu) in dB.
pub fn knife_edge_loss(nu: f64) -> f64 {
    if nu > KNIFE_EDGE_THRESHOLD {
        let x = nu - 0.1;
        6.9 + 20.0 * ((x * x + 1.0).sqrt() + x).log10()
    } else {
        0.0
    }
}

fn effective_radius_m() -> f64 {
    K_FACTOR * EARTH_RADIUS_M
}

/// Value of `f` at its first maximum over interior points.
fn interior_max(profile: &PathProfile, f: impl Fn(f64, f64) -> f64) -> f64 {
    let d = profile.total_distance_m();
    let ae = effective_radius_m();
    let pts = profile.points();
    let mut best = f64::NEG_INFINITY;
    for p in &pts[1..pts.len() - 1] {
        let bulge = p.d_m * (d - p.d_m) / (2.0 * ae);
        let v = f(p.d_m, p.terrain_m + p.clutter_m + bulge);
        if v > best {
            best = v;
        }
    }
    best
}

/// Bullington diffraction loss over the profile surface, with both antenna
/// heights given above sea level.
pub fn bullington_loss(profile: &PathProfile, h_ts: f64, h_rs: f64, freq_mhz: f64) -> (f64, Regime) {
    let d = profile.total_distance_m();
    let wavelength = SPEED_OF_LIGHT_M_S / (freq_mhz * 1e6);
    let geometry = |di: f64| (2.0 * d / (wavelength * di * (d - di))).sqrt();

    let s_tim = interior_max(profile, |di, h| (h - h_ts) / di);
    let s_tr = (h_rs - h_ts) / d;

    let (l_uc, regime) = if s_tim < s_tr {
        let nu_max = interior_max(profile, |di, h| (h - (h_ts * (d - di) + h_rs * di) / d) * geometry(di));
        (knife_edge_loss(nu_max), Regime::LineOfSight)
    } else {
        let s_rim = interior_max(profile, |di, h| (h - h_rs) / (d - di));
        let denom = s_tim + s_rim;
        if denom > 0.0 {
            let d_bp = (h_rs - h_ts + s_rim * d) / denom;
            let nu_b = (h_ts + s_tim * d_bp - (h_ts * (d - d_bp) + h_rs * d_bp) / d) * geometry(d_bp);
            (knife_edge_loss(nu_b), Regime::TransHorizon)
        } else {
            // The horizon point sits exactly on the Tx-Rx chord.
            (knife_edge_loss(0.0), Regime::TransHorizon)
        }
    };

    let loss = l_uc + (1.0 - (-l_uc / 6.0).exp()) * (10.0 + 0.02 * d / 1000.0);
    (loss, regime)
}

/// Median basic transmission loss for `link` over `profile`.
pub fn predict(profile: &PathProfile, link: &LinkSpec) -> Result<PredictionResult> {
    link.validate()?;
    let link_m = link.distance_m();
    let profile_m = profile.total_distance_m();
    let consistent = (profile_m - link_m).abs() <= 1e-3 * link_m;
    if !consistent {
        return Err(Error::ProfileMismatch { profile_m, link_m });
    }
    let pts = profile.points();
    let h_ts = pts[0].terrain_m + link.tx_height_agl_m;
    let h_rs = pts[pts.len() - 1].terrain_m + link.rx_height_agl_m;
    let fspl_db = fspl(link.freq_mhz, profile_m);
    let (diffraction_db, regime) = bullington_loss(profile, h_ts, h_rs, link.freq_mhz);
    Ok(PredictionResult {
        loss_db: fspl_db + diffraction_db,
        fspl_db,
        diffraction_db,
        regime,
    })
}
