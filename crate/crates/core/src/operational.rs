//! Operational water: WUE from weather, EWF and carbon intensity from the grid
//! mix, water intensity, and direct/indirect integration against a power trace.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{common_grid, TimeSeries};
use crate::units::WaterVolume;
use crate::wetbulb::{clamp_to_window, wet_bulb_temperature};

/// Tolerance on the sum of energy-mix shares.
pub const SHARE_SUM_TOLERANCE: f64 = 1e-6;

/// Smallest WUE a curve knot may carry, in L/kWh.
pub const MIN_WUE: f64 = 0.05;

/// Admissible EWF for any generation source, in L/kWh.
pub const EWF_RANGE: (f64, f64) = (0.0, 20.0);
/// EWF of nuclear generation with wet cooling towers, in L/kWh.
pub const NUCLEAR_WET_TOWER_EWF: (f64, f64) = (2.2, 3.2);
/// EWF of nuclear generation with once-through cooling, in L/kWh.
pub const NUCLEAR_ONCE_THROUGH_EWF: (f64, f64) = (0.5, 1.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherSample {
    pub air_temp_c: f64,
    pub rel_humidity_pct: f64,
}

impl WeatherSample {
    pub fn new(air_temp_c: f64, rel_humidity_pct: f64) -> Result<Self> {
        if !(-60.0..=60.0).contains(&air_temp_c) {
            return Err(Error::Validation(format!(
                "air temperature {air_temp_c} °C outside [-60, 60] °C"
            )));
        }
        if !(0.0..=100.0).contains(&rel_humidity_pct) {
            return Err(Error::Validation(format!(
                "relative humidity {rel_humidity_pct} % outside [0, 100] %"
            )));
        }
        Ok(WeatherSample {
            air_temp_c,
            rel_humidity_pct,
        })
    }

    pub fn wet_bulb(&self) -> Result<f64> {
        wet_bulb_temperature(self.air_temp_c, self.rel_humidity_pct)
    }

    /// Copy with temperature and humidity clamped into the wet-bulb regression window.
    pub fn clamped_to_regression_window(&self) -> WeatherSample {
        let (air_temp_c, rel_humidity_pct) = clamp_to_window(self.air_temp_c, self.rel_humidity_pct);
        WeatherSample {
            air_temp_c,
            rel_humidity_pct,
        }
    }
}

/// Piecewise-linear WUE (L/kWh) as a function of wet-bulb temperature (°C),
/// held constant beyond the first and last knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct WueCurve {
    knots: Vec<(f64, f64)>,
}

impl WueCurve {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Validation("WUE curve has no knots".into()));
        }
        for &(t, w) in &knots {
            if !t.is_finite() || !w.is_finite() {
                return Err(Error::Validation("WUE curve knots must be finite".into()));
            }
            if w < MIN_WUE {
                return Err(Error::Validation(format!(
                    "WUE {w} L/kWh at {t} °C below minimum {MIN_WUE} L/kWh"
                )));
            }
        }
        for pair in knots.windows(2) {
            let ((t0, w0), (t1, w1)) = (pair[0], pair[1]);
            if t1 <= t0 {
                return Err(Error::Validation(format!(
                    "WUE curve temperatures must be strictly increasing ({t0} then {t1})"
                )));
            }
            if w1 < w0 {
                return Err(Error::Validation(format!(
                    "WUE curve must be non-decreasing in temperature ({w0} at {t0} °C, {w1} at {t1} °C)"
                )));
            }
        }
        Ok(WueCurve { knots })
    }

    pub fn constant(wue: f64) -> Result<Self> {
        WueCurve::new(vec![(0.0, wue)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// WUE at wet-bulb temperature `t_wb`.
    pub fn at_wet_bulb(&self, t_wb: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if t_wb <= first.0 {
            return first.1;
        }
        if t_wb >= last.0 {
            return last.1;
        }
        let i = self.knots.partition_point(|k| k.0 <= t_wb);
        let (t0, w0) = self.knots[i - 1];
        let (t1, w1) = self.knots[i];
        w0 + (w1 - w0) * (t_wb - t0) / (t1 - t0)
    }
}

impl TryFrom<Vec<(f64, f64)>> for WueCurve {
    type Error = Error;

    fn try_from(knots: Vec<(f64, f64)>) -> Result<Self> {
        WueCurve::new(knots)
    }
}

impl From<WueCurve> for Vec<(f64, f64)> {
    fn from(c: WueCurve) -> Self {
        c.knots
    }
}

/// WUE for the given weather.
pub fn wue_at(curve: &WueCurve, weather: &WeatherSample) -> Result<f64> {
    Ok(curve.at_wet_bulb(weather.wet_bulb()?))
}

/// Shares of each generation source in one interval of the grid mix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyMixSample {
    shares: BTreeMap<String, f64>,
}

impl EnergyMixSample {
    pub fn new(shares: BTreeMap<String, f64>) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::Validation("energy mix has no shares".into()));
        }
        for (s, v) in &shares {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::Validation(format!(
                    "share of '{s}' must lie in [0, 1], got {v}"
                )));
            }
        }
        let sum: f64 = shares.values().sum();
        if (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
            return Err(Error::Validation(format!(
                "energy mix shares sum to {sum}, expected 1 within {SHARE_SUM_TOLERANCE}"
            )));
        }
        Ok(EnergyMixSample { shares })
    }

    pub fn single(source: impl Into<String>) -> Self {
        EnergyMixSample {
            shares: BTreeMap::from([(source.into(), 1.0)]),
        }
    }

    pub fn shares(&self) -> &BTreeMap<String, f64> {
        &self.shares
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Coal,
    Gas,
    Oil,
    Nuclear,
    Hydro,
    Solar,
    Wind,
    Geothermal,
    Biomass,
    #[serde(other)]
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoolingType {
    WetTower,
    OnceThrough,
    Dry,
}

/// Water and carbon factors of one generation source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceFactors {
    pub source: String,
    /// L/kWh generated.
    pub ewf: f64,
    /// gCO2-eq/kWh generated.
    pub carbon_intensity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub technology: Option<Technology>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooling: Option<CoolingType>,
}

impl SourceFactors {
    pub fn new(source: impl Into<String>, ewf: f64, carbon_intensity: f64) -> Self {
        SourceFactors {
            source: source.into(),
            ewf,
            carbon_intensity,
            technology: None,
            cooling: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = EWF_RANGE;
        if !(lo..=hi).contains(&self.ewf) {
            return Err(Error::Validation(format!(
                "source '{}': ewf {} L/kWh outside [{lo}, {hi}] L/kWh",
                self.source, self.ewf
            )));
        }
        if !(self.carbon_intensity.is_finite() && self.carbon_intensity >= 0.0) {
            return Err(Error::Validation(format!(
                "source '{}': carbon_intensity must be finite and >= 0 gCO2-eq/kWh, got {}",
                self.source, self.carbon_intensity
            )));
        }
        if self.technology == Some(Technology::Nuclear) {
            let range = match self.cooling {
                Some(CoolingType::WetTower) => Some(("wet-tower", NUCLEAR_WET_TOWER_EWF)),
                Some(CoolingType::OnceThrough) => Some(("once-through", NUCLEAR_ONCE_THROUGH_EWF)),
                _ => None,
            };
            if let Some((label, (lo, hi))) = range {
                if !(lo..=hi).contains(&self.ewf) {
                    return Err(Error::Validation(format!(
                        "source '{}': nuclear {label} ewf {} L/kWh outside [{lo}, {hi}] L/kWh",
                        self.source, self.ewf
                    )));
                }
            }
        }
        Ok(())
    }
}

pub type FactorTable = BTreeMap<String, SourceFactors>;

fn weighted<F: Fn(&SourceFactors) -> f64>(
    mix: &EnergyMixSample,
    factors: &FactorTable,
    pick: F,
) -> Result<f64> {
    mix.shares
        .iter()
        .map(|(source, share)| {
            factors
                .get(source)
                .map(|f| share * pick(f))
                .ok_or_else(|| Error::ParamResolution(format!("unknown energy source '{source}'")))
        })
        .sum()
}

/// Mix-weighted energy water factor, L/kWh.
pub fn ewf_of_mix(mix: &EnergyMixSample, factors: &FactorTable) -> Result<f64> {
    weighted(mix, factors, |f| f.ewf)
}

/// Mix-weighted carbon intensity, gCO2-eq/kWh.
pub fn carbon_intensity_of_mix(mix: &EnergyMixSample, factors: &FactorTable) -> Result<f64> {
    weighted(mix, factors, |f| f.carbon_intensity)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaterIntensity {
    pub wi: f64,
    pub wi_direct: f64,
    pub wi_indirect: f64,
}

/// WI = WUE + PUE × EWF, split into its direct (WUE) and indirect (PUE × EWF) parts.
pub fn water_intensity(wue: f64, pue: f64, ewf: f64) -> Result<WaterIntensity> {
    if !(pue >= 1.0 && pue.is_finite()) {
        return Err(Error::Validation(format!("PUE must be >= 1, got {pue}")));
    }
    let wi_direct = wue;
    let wi_indirect = pue * ewf;
    Ok(WaterIntensity {
        wi: wi_direct + wi_indirect,
        wi_direct,
        wi_indirect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensitySample {
    pub wue: f64,
    pub ewf: f64,
    pub pue: f64,
    pub wi_direct: f64,
    pub wi_indirect: f64,
    pub wi: f64,
    pub ci: f64,
}

impl IntensitySample {
    pub fn new(wue: f64, ewf: f64, pue: f64, ci: f64) -> Result<Self> {
        let w = water_intensity(wue, pue, ewf)?;
        Ok(IntensitySample {
            wue,
            ewf,
            pue,
            wi_direct: w.wi_direct,
            wi_indirect: w.wi_indirect,
            wi: w.wi,
            ci,
        })
    }
}

pub type IntensitySeries = TimeSeries<IntensitySample>;

#[derive(Debug, Clone, PartialEq)]
pub enum PueProfile {
    Constant(f64),
    Series(TimeSeries<f64>),
}

/// Inputs to [`build_intensity_series`].
#[derive(Debug, Clone, Copy)]
pub struct IntensityInputs<'a> {
    pub weather: &'a TimeSeries<WeatherSample>,
    pub mix: &'a TimeSeries<EnergyMixSample>,
    pub pue: &'a PueProfile,
    pub curve: &'a WueCurve,
    pub factors: &'a FactorTable,
    /// Clamp weather into the wet-bulb regression window instead of failing.
    pub clamp_weather: bool,
}

/// Per-step WUE, EWF, WI and CI on the finest grid shared by the inputs.
pub fn build_intensity_series(inputs: &IntensityInputs<'_>) -> Result<IntensitySeries> {
    let wue = inputs.weather.try_map(|w| {
        let w = if inputs.clamp_weather {
            w.clamped_to_regression_window()
        } else {
            *w
        };
        wue_at(inputs.curve, &w)
    })?;
    let grid_mix = inputs.mix.try_map(|m| {
        Ok((
            ewf_of_mix(m, inputs.factors)?,
            carbon_intensity_of_mix(m, inputs.factors)?,
        ))
    })?;

    let mut grids = vec![wue.grid(), grid_mix.grid()];
    if let PueProfile::Series(p) = inputs.pue {
        grids.push(p.grid());
    }
    let grid = common_grid(&grids)?;
    let wue = wue.resample(&grid)?;
    let grid_mix = grid_mix.resample(&grid)?;
    let pue: Vec<f64> = match inputs.pue {
        PueProfile::Constant(p) => vec![*p; grid.len],
        PueProfile::Series(s) => s.resample(&grid)?.into_values(),
    };

    let samples = wue
        .values()
        .iter()
        .zip(grid_mix.values())
        .zip(&pue)
        .map(|((&wue, &(ewf, ci)), &pue)| IntensitySample::new(wue, ewf, pue, ci))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(grid.start, grid.step, samples)
}

/// IT power draw in kW at a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace(TimeSeries<f64>);

impl PowerTrace {
    pub fn new(series: TimeSeries<f64>) -> Result<Self> {
        if let Some((t, p)) = series.iter().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Validation(format!(
                "power at {t} must be finite and >= 0 kW, got {p}"
            )));
        }
        Ok(PowerTrace(series))
    }

    pub fn series(&self) -> &TimeSeries<f64> {
        &self.0
    }

    /// Energy per step, kWh.
    pub fn energy_kwh(&self) -> Vec<f64> {
        let h = self.0.step_hours();
        self.0.values().iter().map(|p| p * h).collect()
    }

    pub fn total_energy_kwh(&self) -> f64 {
        self.energy_kwh().iter().sum()
    }

    /// Trace with every sample multiplied by `k >= 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        PowerTrace::new(self.0.map(|p| p * k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperationalStep {
    pub timestamp: DateTime<Utc>,
    pub energy_kwh: f64,
    pub direct_l: f64,
    pub indirect_l: f64,
    pub carbon_g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationalFootprint {
    pub energy_kwh: f64,
    pub direct: WaterVolume,
    pub indirect: WaterVolume,
    pub total: WaterVolume,
    /// Grid emissions of facility energy (IT energy × PUE × CI), gCO2-eq.
    pub carbon_g: f64,
    pub series: Vec<OperationalStep>,
}

impl OperationalFootprint {
    /// Indirect share of the operational total, in [0, 1].
    pub fn indirect_share(&self) -> f64 {
        if self.total.liters() == 0.0 {
            0.0
        } else {
            self.indirect.liters() / self.total.liters()
        }
    }

    pub fn direct_share(&self) -> f64 {
        if self.total.liters() == 0.0 {
            0.0
        } else {
            self.direct.liters() / self.total.liters()
        }
    }
}

/// Integrates a power trace against an intensity series using a left-step rule.
///
/// Both series must share a step; only the overlapping window contributes.
pub fn operational_footprint(
    power: &PowerTrace,
    intensity: &IntensitySeries,
) -> Result<OperationalFootprint> {
    let p = power.series();
    if p.step() != intensity.step() {
        return Err(Error::Alignment(format!(
            "power step {} differs from intensity step {}",
            p.step(),
            intensity.step()
        )));
    }
    let grid = common_grid(&[p.grid(), intensity.grid()])?;
    if grid.step != p.step() {
        return Err(Error::Alignment(
            "power and intensity sample boundaries are offset from each other".into(),
        ));
    }
    let p_off = p.index_at(grid.start).expect("grid inside power span");
    let i_off = intensity.index_at(grid.start).expect("grid inside intensity span");
    let h = p.step_hours();

    let mut direct = 0.0;
    let mut indirect = 0.0;
    let mut carbon = 0.0;
    let mut energy = 0.0;
    let mut series = Vec::with_capacity(grid.len);
    for k in 0..grid.len {
        let e = p.values()[p_off + k] * h;
        let s = &intensity.values()[i_off + k];
        let d = e * s.wi_direct;
        let ind = e * s.wi_indirect;
        let c = e * s.pue * s.ci;
        direct += d;
        indirect += ind;
        carbon += c;
        energy += e;
        series.push(OperationalStep {
            timestamp: grid.timestamp(k),
            energy_kwh: e,
            direct_l: d,
            indirect_l: ind,
            carbon_g: c,
        });
    }
    let direct = WaterVolume::from_liters(direct)?;
    let indirect = WaterVolume::from_liters(indirect)?;
    Ok(OperationalFootprint {
        energy_kwh: energy,
        direct,
        indirect,
        total: direct + indirect,
        carbon_g: carbon,
        series,
    })
}

/// Aligns power and intensity onto their finest common grid before integrating.
pub fn operational_footprint_aligned(
    power: &PowerTrace,
    intensity: &IntensitySeries,
) -> Result<OperationalFootprint> {
    if power.series().step() == intensity.step()
        && power.series().grid().start == intensity.grid().start
    {
        return operational_footprint(power, intensity);
    }
    let grid = common_grid(&[power.series().grid(), intensity.grid()])?;
    let power = PowerTrace::new(power.series().resample(&grid)?)?;
    let intensity = intensity.resample(&grid)?;
    operational_footprint(&power, &intensity)
}
