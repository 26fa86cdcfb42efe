//! Great-circle geometry on a spherical earth.
//!
//! Distances use the haversine formula on a sphere of radius
//! [`EARTH_RADIUS_M`]. Intermediate points are spherical linear
//! interpolations along the great circle, so equal fractions of the path
//! map to equal arc lengths.

use std::fmt;

use crate::error::{Error, Result};

/// Mean earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A position in geographic degrees.
///
/// Latitude is validated to [-90, 90]; longitude is wrapped into [-180, 180).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat_deg: f64,
    lon_deg: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self> {
        if !lat_deg.is_finite() || !lon_deg.is_finite() {
            return Err(Error::NonFiniteCoordinate);
        }
        if !(-90.0..=90.0).contains(&lat_deg) {
            return Err(Error::LatitudeOutOfRange(lat_deg));
        }
        Ok(Self {
            lat_deg,
            lon_deg: normalize_lon(lon_deg),
        })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }

    fn to_unit_vector(self) -> [f64; 3] {
        let (lat, lon) = (self.lat_deg.to_radians(), self.lon_deg.to_radians());
        [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lat_deg, self.lon_deg)
    }
}

fn normalize_lon(lon: f64) -> f64 {
    if (-180.0..180.0).contains(&lon) {
        return lon;
    }
    let wrapped = (lon + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

/// Central angle between two points in radians (haversine).
fn central_angle(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat_deg.to_radians(), b.lat_deg.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon_deg - a.lon_deg).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * h.sqrt().min(1.0).asin()
}

/// Haversine distance in meters.
pub fn great_circle_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    // Fix the argument order so that d(a, b) and d(b, a) run identical arithmetic.
    let (p, q) = if (a.lat_deg, a.lon_deg) <= (b.lat_deg, b.lon_deg) {
        (a, b)
    } else {
        (b, a)
    };
    EARTH_RADIUS_M * central_angle(p, q)
}

/// Point at fraction `f` of the way from `a` to `b` along the great circle.
pub fn intermediate_point(a: GeoPoint, b: GeoPoint, f: f64) -> Result<GeoPoint> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidLink(format!("fraction {f} outside [0, 1]")));
    }
    if f == 0.0 {
        return Ok(a);
    }
    if f == 1.0 {
        return Ok(b);
    }
    let delta = central_angle(a, b);
    if delta == 0.0 {
        return Ok(a);
    }
    let sin_delta = delta.sin();
    if sin_delta.abs() < 1e-12 {
        return Err(Error::AntipodalPoints);
    }
    let wa = ((1.0 - f) * delta).sin() / sin_delta;
    let wb = (f * delta).sin() / sin_delta;
    let (va, vb) = (a.to_unit_vector(), b.to_unit_vector());
    let v = [
        wa * va[0] + wb * vb[0],
        wa * va[1] + wb * vb[1],
        wa * va[2] + wb * vb[2],
    ];
    let lat = v[2].atan2((v[0] * v[0] + v[1] * v[1]).sqrt());
    let lon = v[1].atan2(v[0]);
    GeoPoint::new(lat.to_degrees(), lon.to_degrees())
}

/// Evenly spaced samples along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSamples {
    pub spacing_m: f64,
    pub distance_m: f64,
    pub points: Vec<GeoPoint>,
}

/// Number of samples for a path of `distance_m` at no more than
/// `max_spacing_m` apart: `ceil(d / s) + 1`, never fewer than 3.
pub fn sample_count(distance_m: f64, max_spacing_m: f64) -> usize {
    // Absorb rounding so that a 300.0000000001 m path at 30 m gives 11 points.
    let ratio = distance_m / max_spacing_m;
    let n = (ratio * (1.0 - 1e-9)).ceil() as usize + 1;
    n.max(3)
}

/// Samples the great circle from `a` to `b` at uniform spacing no larger
/// than `max_spacing_m`. The first point is `a` and the last is `b`.
pub fn sample_path(a: GeoPoint, b: GeoPoint, max_spacing_m: f64) -> Result<PathSamples> {
    if !(max_spacing_m > 0.0 && max_spacing_m.is_finite()) {
        return Err(Error::InvalidSpacing(max_spacing_m));
    }
    let distance_m = great_circle_distance(a, b);
    if distance_m <= 0.0 {
        return Err(Error::DegenerateLink);
    }
    let n = sample_count(distance_m, max_spacing_m);
    let last = (n - 1) as f64;
    let points = (0..n)
        .map(|i| match i {
            0 => Ok(a),
            i if i == n - 1 => Ok(b),
            i => intermediate_point(a, b, i as f64 / last),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathSamples {
        spacing_m: distance_m / last,
        distance_m,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pt(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    // Spherical law of cosines, kept apart from the haversine path.
    fn cosine_law_distance(a: GeoPoint, b: GeoPoint) -> f64 {
        let (p1, p2) = (a.lat_deg().to_radians(), b.lat_deg().to_radians());
        let dl = (b.lon_deg() - a.lon_deg()).to_radians();
        let c = p1.sin() * p2.sin() + p1.cos() * p2.cos() * dl.cos();
        EARTH_RADIUS_M * c.clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn longitude_wraps_into_half_open_range() {
        assert_eq!(pt(0.0, 180.0).lon_deg(), -180.0);
        assert_eq!(pt(0.0, 190.0).lon_deg(), -170.0);
        assert_eq!(pt(0.0, -190.0).lon_deg(), 170.0);
        assert_eq!(pt(0.0, 540.0).lon_deg(), -180.0);
        assert!(GeoPoint::new(90.5, 0.0).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(great_circle_distance(pt(0.0, 0.0), pt(0.0, 0.0)), 0.0);

        let oracle = cosine_law_distance(pt(0.0, 0.0), pt(0.0, 1.0));
        assert_abs_diff_eq!(oracle, 111_195.0, epsilon = 1.0);
        assert_abs_diff_eq!(
            great_circle_distance(pt(0.0, 0.0), pt(0.0, 1.0)),
            oracle,
            epsilon = 1e-3
        );

        // quarter meridian = pi/2 * R
        let quarter = std::f64::consts::FRAC_PI_2 * EARTH_RADIUS_M;
        assert_abs_diff_eq!(quarter, 10_007_543.0, epsilon = 1.0);
        assert_abs_diff_eq!(
            great_circle_distance(pt(0.0, 0.0), pt(90.0, 0.0)),
            quarter,
            epsilon = 1e-6
        );
    }

    #[test]
    fn intermediate_endpoints_and_midpoint() {
        let (a, b) = (pt(45.1, -75.7), pt(45.3, -75.2));
        assert_eq!(intermediate_point(a, b, 0.0).unwrap(), a);
        assert_eq!(intermediate_point(a, b, 1.0).unwrap(), b);

        let m = intermediate_point(pt(0.0, 0.0), pt(0.0, 90.0), 0.5).unwrap();
        assert_abs_diff_eq!(m.lat_deg(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.lon_deg(), 45.0, epsilon = 1e-12);
    }

    #[test]
    fn antipodes_are_rejected() {
        let r = intermediate_point(pt(0.0, 0.0), pt(0.0, -180.0), 0.5);
        assert!(matches!(r, Err(Error::AntipodalPoints)));
    }

    #[test]
    fn sample_count_examples() {
        assert_eq!(sample_count(90.0, 30.0), 4);
        assert_eq!(sample_count(95.0, 30.0), 5);
        assert_eq!(95.0 / (5 - 1) as f64, 23.75);
        assert_eq!(sample_count(20.0, 30.0), 3);
    }

    #[test]
    fn sample_path_short_link_forces_three_points() {
        // ~20 m east along the equator
        let b = pt(0.0, 20.0 / (EARTH_RADIUS_M * 1f64.to_radians()));
        let s = sample_path(pt(0.0, 0.0), b, 30.0).unwrap();
        assert_eq!(s.points.len(), 3);
        assert_abs_diff_eq!(s.spacing_m, 10.0, epsilon = 1e-6);
    }

    #[test]
    fn sample_path_errors() {
        let a = pt(10.0, 10.0);
        assert!(matches!(sample_path(a, a, 30.0), Err(Error::DegenerateLink)));
        assert!(matches!(
            sample_path(a, pt(10.0, 10.1), 0.0),
            Err(Error::InvalidSpacing(_))
        ));
    }

    fn arb_point() -> impl Strategy<Value = GeoPoint> {
        (-80.0..80.0f64, -179.0..179.0f64).prop_map(|(la, lo)| pt(la, lo))
    }

    proptest! {
        #[test]
        fn distance_is_symmetric(a in arb_point(), b in arb_point()) {
            let (d1, d2) = (great_circle_distance(a, b), great_circle_distance(b, a));
            prop_assert!(d1 >= 0.0);
            prop_assert!((d1 - d2).abs() <= 1e-9 * d1.max(1.0));
        }

        #[test]
        fn intermediate_distance_is_monotone(
            a in arb_point(),
            dlat in -0.5..0.5f64,
            dlon in -0.5..0.5f64,
            f1 in 0.0..1.0f64,
            f2 in 0.0..1.0f64,
        ) {
            let b = pt(a.lat_deg() + dlat, a.lon_deg() + dlon);
            prop_assume!(great_circle_distance(a, b) > 1.0);
            let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
            prop_assume!(hi - lo > 1e-6);
            let p1 = intermediate_point(a, b, lo).unwrap();
            let p2 = intermediate_point(a, b, hi).unwrap();
            prop_assert!(great_circle_distance(a, p1) < great_circle_distance(a, p2));
        }

        #[test]
        fn sample_spacing_is_uniform(
            a in arb_point(),
            dlat in -0.2..0.2f64,
            dlon in -0.2..0.2f64,
            spacing in 10.0..500.0f64,
        ) {
            let b = pt(a.lat_deg() + dlat, a.lon_deg() + dlon);
            prop_assume!(great_circle_distance(a, b) > 1.0);
            let s = sample_path(a, b, spacing).unwrap();
            prop_assert!(s.points.len() >= 3);
            prop_assert!(s.spacing_m <= spacing * (1.0 + 1e-9));
            prop_assert_eq!(s.points[0], a);
            prop_assert_eq!(*s.points.last().unwrap(), b);
            for w in s.points.windows(2) {
                let step = great_circle_distance(w[0], w[1]);
                prop_assert!((step - s.spacing_m).abs() <= 1e-6 * s.spacing_m);
            }
        }
    }
}
