use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Magnitude/angle pair. The angle is stored in degrees, normalized to
/// (-180, 180], so that scenario files round-trip bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phasor {
    magnitude: f64,
    degrees: f64,
}

impl Phasor {
    /// Builds a phasor from an angle in radians, folding a negative magnitude
    /// into a half-turn rotation.
    pub fn new(magnitude: f64, angle: f64) -> Self {
        Self::from_degrees(magnitude, angle.to_degrees())
    }

    pub fn from_degrees(magnitude: f64, degrees: f64) -> Self {
        let (magnitude, degrees) = if magnitude < 0.0 {
            (-magnitude, degrees + 180.0)
        } else {
            (magnitude, degrees)
        };
        Self { magnitude, degrees: normalize_degrees(degrees) }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.norm(), z.arg())
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Angle in radians.
    pub fn angle(&self) -> f64 {
        self.degrees.to_radians()
    }

    pub fn degrees(&self) -> f64 {
        self.degrees
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.angle())
    }
}

/// Angles already inside (-180, 180] come back unchanged.
fn normalize_degrees(deg: f64) -> f64 {
    if deg > -180.0 && deg <= 180.0 {
        return deg;
    }
    let mut a = deg % 360.0;
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

/// Maps any finite angle into (-pi, pi].
pub fn normalize_angle(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut a = angle % two_pi;
    if a <= -PI {
        a += two_pi;
    } else if a > PI {
        a -= two_pi;
    }
    a
}
