//! Slant-range geometry between platforms on a spherical Earth.
//!
//! All platforms in a relay chain are assumed to sit on the same line of
//! sight from the ground observer, so every hop shares one elevation angle
//! and the range of a hop depends only on its two endpoint altitudes.

use thiserror::Error;

/// Mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Upper sanity bound on platform altitude (km), a little above GEO.
pub const MAX_ALTITUDE_KM: f64 = 40_000.0;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("elevation angle must be in (0, 90] degrees, got {0}")]
    InvalidElevation(f64),
    #[error("altitude must be in [0, {MAX_ALTITUDE_KM}] km, got {0}")]
    InvalidAltitude(f64),
    #[error("upper altitude ({high} km) must exceed lower altitude ({low} km)")]
    AltitudeOrder { low: f64, high: f64 },
}

/// Elevation angle between the local horizontal plane and the line of sight,
/// in degrees. Valid range is (0, 90].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElevationAngle {
    degrees: f64,
}

impl ElevationAngle {
    pub fn new(degrees: f64) -> Result<Self, GeometryError> {
        if !degrees.is_finite() || degrees <= 0.0 || degrees > 90.0 {
            return Err(GeometryError::InvalidElevation(degrees));
        }
        Ok(Self { degrees })
    }

    pub fn degrees(&self) -> f64 {
        self.degrees
    }

    pub fn radians(&self) -> f64 {
        self.degrees.to_radians()
    }

    /// sin(alpha); the cosecant path factor used by atmospheric models is
    /// the reciprocal of this.
    pub fn sin(&self) -> f64 {
        if self.degrees == 90.0 {
            1.0
        } else {
            self.radians().sin()
        }
    }
}

/// Platform altitude above mean sea level, in km.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Altitude {
    km: f64,
}

impl Altitude {
    pub fn new(km: f64) -> Result<Self, GeometryError> {
        if !km.is_finite() || !(0.0..=MAX_ALTITUDE_KM).contains(&km) {
            return Err(GeometryError::InvalidAltitude(km));
        }
        Ok(Self { km })
    }

    pub fn km(&self) -> f64 {
        self.km
    }
}

/// Line-of-sight distance in km from the lower platform to the higher one,
/// both observed at elevation `alpha` on a spherical Earth:
///
/// ```text
/// d = sqrt((R+h_lo)^2 sin^2(a) + (h_hi-h_lo)(h_hi+h_lo+2R)) - (R+h_lo) sin(a)
/// ```
///
/// At `alpha` = 90 degrees this reduces to `h_hi - h_lo` exactly; the range
/// is strictly decreasing in `alpha` and never below the altitude difference.
pub fn slant_range(
    h_low: Altitude,
    h_high: Altitude,
    alpha: ElevationAngle,
) -> Result<f64, GeometryError> {
    if h_high.km() <= h_low.km() {
        return Err(GeometryError::AltitudeOrder {
            low: h_low.km(),
            high: h_high.km(),
        });
    }
    let r_low = EARTH_RADIUS_KM + h_low.km();
    let sin_a = alpha.sin();
    let dh = h_high.km() - h_low.km();
    let disc =
        r_low * r_low * sin_a * sin_a + dh * (h_high.km() + h_low.km() + 2.0 * EARTH_RADIUS_KM);
    Ok(disc.sqrt() - r_low * sin_a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alt(km: f64) -> Altitude {
        Altitude::new(km).unwrap()
    }

    fn el(deg: f64) -> ElevationAngle {
        ElevationAngle::new(deg).unwrap()
    }

    #[test]
    fn zenith_range_is_altitude_difference() {
        let d = slant_range(alt(0.0), alt(35_786.0), el(90.0)).unwrap();
        assert!((d - 35_786.0).abs() / 35_786.0 < 1e-9, "got {d}");

        let d = slant_range(alt(0.0), alt(20.0), el(90.0)).unwrap();
        assert!((d - 20.0).abs() / 20.0 < 1e-9, "got {d}");
    }

    #[test]
    fn leo_range_at_30_degrees() {
        // Hand evaluation of the closed form:
        // sqrt((6371*0.5)^2 + 600*(600+12742)) - 6371*0.5 = 1075.0880169...
        let d = slant_range(alt(0.0), alt(600.0), el(30.0)).unwrap();
        assert!((d - 1075.0880169291187).abs() < 1e-6, "got {d}");
    }

    #[test]
    fn range_decreases_with_elevation() {
        let mut prev = f64::INFINITY;
        for deg in [10.0, 20.0, 30.0, 45.0, 60.0, 75.0, 90.0] {
            let d = slant_range(alt(0.03), alt(600.0), el(deg)).unwrap();
            assert!(d < prev, "range not decreasing at {deg} deg: {d} >= {prev}");
            prev = d;
        }
    }

    #[test]
    fn range_never_below_altitude_difference() {
        for deg in [10.0, 37.0, 53.0, 90.0] {
            for (lo, hi) in [(0.03, 20.0), (20.0, 600.0), (600.0, 35_786.0)] {
                let d = slant_range(alt(lo), alt(hi), el(deg)).unwrap();
                assert!(d >= hi - lo - 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ElevationAngle::new(0.0).is_err());
        assert!(ElevationAngle::new(-5.0).is_err());
        assert!(ElevationAngle::new(90.5).is_err());
        assert!(Altitude::new(-1.0).is_err());
        assert!(Altitude::new(50_000.0).is_err());
        assert_eq!(
            slant_range(alt(600.0), alt(600.0), el(45.0)),
            Err(GeometryError::AltitudeOrder {
                low: 600.0,
                high: 600.0
            })
        );
        assert!(slant_range(alt(600.0), alt(20.0), el(45.0)).is_err());
    }
}
