//! Typed quantities shared across the models.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Liters per US liquid gallon.
pub const LITERS_PER_US_GALLON: f64 = 3.785411784;

/// A non-negative, finite volume of water in liters.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WaterVolume(f64);

impl WaterVolume {
    pub const ZERO: WaterVolume = WaterVolume(0.0);

    pub fn from_liters(liters: f64) -> Result<Self> {
        if !liters.is_finite() || liters < 0.0 {
            return Err(Error::Validation(format!(
                "water volume must be finite and >= 0 L, got {liters}"
            )));
        }
        Ok(WaterVolume(liters))
    }

    pub fn from_gallons(gallons: f64) -> Result<Self> {
        Self::from_liters(gallons * LITERS_PER_US_GALLON)
    }

    pub fn liters(self) -> f64 {
        self.0
    }

    pub fn gallons(self) -> f64 {
        self.0 / LITERS_PER_US_GALLON
    }

    /// Scales by a non-negative factor.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::from_liters(self.0 * factor)
    }

    /// Subtraction that fails instead of going negative.
    pub(crate) fn checked_sub(self, other: WaterVolume) -> Result<Self> {
        Self::from_liters(self.0 - other.0)
    }
}

impl TryFrom<f64> for WaterVolume {
    type Error = Error;

    fn try_from(liters: f64) -> Result<Self> {
        WaterVolume::from_liters(liters)
    }
}

impl From<WaterVolume> for f64 {
    fn from(v: WaterVolume) -> f64 {
        v.0
    }
}

impl Add for WaterVolume {
    type Output = WaterVolume;

    fn add(self, rhs: WaterVolume) -> WaterVolume {
        WaterVolume(self.0 + rhs.0)
    }
}

impl AddAssign for WaterVolume {
    fn add_assign(&mut self, rhs: WaterVolume) {
        self.0 += rhs.0;
    }
}

impl Mul<f64> for WaterVolume {
    type Output = WaterVolume;

    /// Panics on a negative or non-finite factor; use [`WaterVolume::scaled`] for untrusted input.
    fn mul(self, rhs: f64) -> WaterVolume {
        WaterVolume::from_liters(self.0 * rhs).expect("scaling produced an invalid volume")
    }
}

impl Sum for WaterVolume {
    fn sum<I: Iterator<Item = WaterVolume>>(iter: I) -> WaterVolume {
        iter.fold(WaterVolume::ZERO, Add::add)
    }
}

impl fmt::Display for WaterVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} L", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nan() {
        assert!(WaterVolume::from_liters(-1e-9).is_err());
        assert!(WaterVolume::from_liters(f64::NAN).is_err());
        assert!(WaterVolume::from_liters(f64::INFINITY).is_err());
        assert!(WaterVolume::from_liters(0.0).is_ok());
    }

    #[test]
    fn gallon_conversion_uses_exact_factor() {
        let v = WaterVolume::from_liters(3.785411784).unwrap();
        assert_eq!(v.gallons(), 1.0);
        let g = WaterVolume::from_gallons(1.0).unwrap();
        assert_eq!(g.liters(), 3.785411784);
    }

    #[test]
    fn addition_commutes() {
        let a = WaterVolume::from_liters(1.25).unwrap();
        let b = WaterVolume::from_liters(7.5).unwrap();
        assert_eq!(a + b, b + a);
        assert_eq!([a, b].into_iter().sum::<WaterVolume>().liters(), 8.75);
    }

    #[test]
    fn deserialize_validates() {
        assert!(serde_json::from_str::<WaterVolume>("-3.0").is_err());
        let v: WaterVolume = serde_json::from_str("2.5").unwrap();
        assert_eq!(v.liters(), 2.5);
    }
}
