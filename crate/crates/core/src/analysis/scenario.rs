//! What-if grid mixes: replace the energy mix and recompute water and carbon
//! against the same power trace and weather.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operational::{
    build_intensity_series, operational_footprint_aligned, EnergyMixSample, FactorTable,
    IntensityInputs, OperationalFootprint, PowerTrace, PueProfile, WeatherSample, WueCurve,
};
use crate::series::TimeSeries;

/// Either keep the recorded mix or replace every interval with fixed shares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOverride", into = "RawOverride")]
pub enum MixOverride {
    Unchanged,
    Fixed(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawOverride {
    Keyword(String),
    Shares(BTreeMap<String, f64>),
}

impl TryFrom<RawOverride> for MixOverride {
    type Error = String;

    fn try_from(raw: RawOverride) -> std::result::Result<Self, String> {
        match raw {
            RawOverride::Keyword(k) if k == "unchanged" => Ok(MixOverride::Unchanged),
            RawOverride::Keyword(k) => Err(format!(
                "mix override must be \"unchanged\" or a table of shares, got \"{k}\""
            )),
            RawOverride::Shares(s) => Ok(MixOverride::Fixed(s)),
        }
    }
}

impl From<MixOverride> for RawOverride {
    fn from(m: MixOverride) -> Self {
        match m {
            MixOverride::Unchanged => RawOverride::Keyword("unchanged".into()),
            MixOverride::Fixed(s) => RawOverride::Shares(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub mix: MixOverride,
}

impl Scenario {
    pub fn unchanged(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            mix: MixOverride::Unchanged,
        }
    }

    pub fn fixed<'a>(name: impl Into<String>, shares: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        Scenario {
            name: name.into(),
            mix: MixOverride::Fixed(shares.into_iter().map(|(k, v)| (k.to_string(), v)).collect()),
        }
    }

    /// Checks share sums and that every source has factors.
    pub fn validate(&self, factors: &FactorTable) -> Result<()> {
        if let MixOverride::Fixed(shares) = &self.mix {
            EnergyMixSample::new(shares.clone())
                .map_err(|e| Error::Validation(format!("scenario '{}': {e}", self.name)))?;
            if let Some(unknown) = shares.keys().find(|s| !factors.contains_key(*s)) {
                return Err(Error::ParamResolution(format!(
                    "scenario '{}' uses unknown energy source '{unknown}'",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Everything a scenario run holds fixed.
#[derive(Debug, Clone, Copy)]
pub struct Baseline<'a> {
    pub weather: &'a TimeSeries<WeatherSample>,
    pub mix: &'a TimeSeries<EnergyMixSample>,
    pub pue: &'a PueProfile,
    pub curve: &'a WueCurve,
    pub factors: &'a FactorTable,
    pub power: &'a PowerTrace,
    pub clamp_weather: bool,
}

impl Baseline<'_> {
    fn footprint(&self, mix: &TimeSeries<EnergyMixSample>) -> Result<OperationalFootprint> {
        let intensity = build_intensity_series(&IntensityInputs {
            weather: self.weather,
            mix,
            pue: self.pue,
            curve: self.curve,
            factors: self.factors,
            clamp_weather: self.clamp_weather,
        })?;
        operational_footprint_aligned(self.power, &intensity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioTotals {
    pub energy_kwh: f64,
    pub direct_l: f64,
    pub indirect_l: f64,
    pub water_l: f64,
    pub carbon_g: f64,
}

impl From<&OperationalFootprint> for ScenarioTotals {
    fn from(op: &OperationalFootprint) -> Self {
        ScenarioTotals {
            energy_kwh: op.energy_kwh,
            direct_l: op.direct.liters(),
            indirect_l: op.indirect.liters(),
            water_l: op.total.liters(),
            carbon_g: op.carbon_g,
        }
    }
}

/// Percent changes relative to the baseline; `None` where the baseline is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioDeltas {
    pub water_pct: Option<f64>,
    pub direct_pct: Option<f64>,
    pub indirect_pct: Option<f64>,
    pub carbon_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub totals: ScenarioTotals,
    pub deltas: ScenarioDeltas,
}

fn pct_change(new: f64, base: f64) -> Option<f64> {
    if base == 0.0 {
        (new == 0.0).then_some(0.0)
    } else {
        Some((new - base) / base * 100.0)
    }
}

fn deltas(s: &ScenarioTotals, b: &ScenarioTotals) -> ScenarioDeltas {
    ScenarioDeltas {
        water_pct: pct_change(s.water_l, b.water_l),
        direct_pct: pct_change(s.direct_l, b.direct_l),
        indirect_pct: pct_change(s.indirect_l, b.indirect_l),
        carbon_pct: pct_change(s.carbon_g, b.carbon_g),
    }
}

fn apply_override(
    mix: &TimeSeries<EnergyMixSample>,
    scenario: &Scenario,
    factors: &FactorTable,
) -> Result<Option<TimeSeries<EnergyMixSample>>> {
    scenario.validate(factors)?;
    match &scenario.mix {
        MixOverride::Unchanged => Ok(None),
        MixOverride::Fixed(shares) => {
            let fixed = EnergyMixSample::new(shares.clone())?;
            Ok(Some(mix.map(|_| fixed.clone())))
        }
    }
}

/// Totals of the baseline bundle as recorded.
pub fn baseline_totals(baseline: &Baseline<'_>) -> Result<ScenarioTotals> {
    Ok(ScenarioTotals::from(&baseline.footprint(baseline.mix)?))
}

pub fn run_scenario(baseline: &Baseline<'_>, scenario: &Scenario) -> Result<ScenarioOutcome> {
    let base = baseline_totals(baseline)?;
    run_against(baseline, &base, scenario)
}

fn run_against(baseline: &Baseline<'_>, base: &ScenarioTotals, scenario: &Scenario) -> Result<ScenarioOutcome> {
    let totals = match apply_override(baseline.mix, scenario, baseline.factors)? {
        None => ScenarioTotals::from(&baseline.footprint(baseline.mix)?),
        Some(mix) => ScenarioTotals::from(&baseline.footprint(&mix)?),
    };
    Ok(ScenarioOutcome {
        name: scenario.name.clone(),
        deltas: deltas(&totals, base),
        totals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioComparison {
    pub baseline: ScenarioTotals,
    pub outcomes: Vec<ScenarioOutcome>,
}

pub fn run_scenarios(baseline: &Baseline<'_>, scenarios: &[Scenario]) -> Result<ScenarioComparison> {
    let base = baseline_totals(baseline)?;
    let outcomes = scenarios
        .iter()
        .map(|s| run_against(baseline, &base, s))
        .collect::<Result<_>>()?;
    Ok(ScenarioComparison {
        baseline: base,
        outcomes,
    })
}
