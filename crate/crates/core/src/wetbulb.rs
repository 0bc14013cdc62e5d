//! Wet-bulb temperature from air temperature and relative humidity.
//!
//! Uses the Stull (2011) empirical regression, which is fitted for relative
//! humidity between 5 % and 99 % and air temperature between -20 °C and 50 °C
//! at standard sea-level pressure.

use crate::error::{Error, Result};

pub const MIN_RH_PCT: f64 = 5.0;
pub const MAX_RH_PCT: f64 = 99.0;
pub const MIN_AIR_TEMP_C: f64 = -20.0;
pub const MAX_AIR_TEMP_C: f64 = 50.0;

/// Wet-bulb temperature in °C.
///
/// Inputs outside the regression window are rejected; use [`clamp_to_window`]
/// first if clamping is acceptable.
pub fn wet_bulb_temperature(air_temp_c: f64, rel_humidity_pct: f64) -> Result<f64> {
    if !(MIN_AIR_TEMP_C..=MAX_AIR_TEMP_C).contains(&air_temp_c) {
        return Err(Error::Domain(format!(
            "air temperature {air_temp_c} °C outside wet-bulb regression window [{MIN_AIR_TEMP_C}, {MAX_AIR_TEMP_C}] °C"
        )));
    }
    if !(MIN_RH_PCT..=MAX_RH_PCT).contains(&rel_humidity_pct) {
        return Err(Error::Domain(format!(
            "relative humidity {rel_humidity_pct} % outside wet-bulb regression window [{MIN_RH_PCT}, {MAX_RH_PCT}] %"
        )));
    }
    let t = air_temp_c;
    let rh = rel_humidity_pct;
    Ok(t * (0.151977 * (rh + 8.313659).sqrt()).atan() + (t + rh).atan()
        - (rh - 1.676331).atan()
        + 0.00391838 * rh.powf(1.5) * (0.023101 * rh).atan()
        - 4.686035)
}

/// Clamps (air temperature, relative humidity) into the regression window.
pub fn clamp_to_window(air_temp_c: f64, rel_humidity_pct: f64) -> (f64, f64) {
    (
        air_temp_c.clamp(MIN_AIR_TEMP_C, MAX_AIR_TEMP_C),
        rel_humidity_pct.clamp(MIN_RH_PCT, MAX_RH_PCT),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mid_latitude_reference_point() {
        // evaluated independently: 13.699341968988136
        let tw = wet_bulb_temperature(20.0, 50.0).unwrap();
        assert!((tw - 13.699341968988136).abs() < 1e-12);
        assert!((tw - 13.7).abs() < 0.05);
    }

    #[test]
    fn near_saturation_approaches_air_temperature() {
        let tw = wet_bulb_temperature(30.0, 99.0).unwrap();
        assert!((tw - 30.0).abs() < 0.5);
    }

    #[test]
    fn outside_window_is_domain_error() {
        assert!(matches!(wet_bulb_temperature(20.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(wet_bulb_temperature(20.0, 99.5), Err(Error::Domain(_))));
        assert!(matches!(wet_bulb_temperature(55.0, 50.0), Err(Error::Domain(_))));
        assert!(wet_bulb_temperature(-20.0, 5.0).is_ok());
    }

    #[test]
    fn clamping_brings_inputs_into_window() {
        let (t, rh) = clamp_to_window(-35.0, 100.0);
        assert_eq!((t, rh), (-20.0, 99.0));
        assert!(wet_bulb_temperature(t, rh).is_ok());
    }
}
