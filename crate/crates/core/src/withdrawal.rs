//! Water withdrawal from consumption, weighted discharge and reuse, split by
//! potable and non-potable sources.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::WaterVolume;

const SPLIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WithdrawalParams {
    /// Reported discharge, liters.
    pub discharge_actual: WaterVolume,
    /// Outfall location factor.
    pub outfall_factor: f64,
    /// Pollutant hazard factor.
    pub pollutant_factor: f64,
    pub reuse_rate: f64,
    pub beta_potable: f64,
    pub beta_nonpotable: f64,
    pub scarcity_potable: f64,
    pub scarcity_nonpotable: f64,
}

impl Default for WithdrawalParams {
    /// Neutral factors, no discharge, no reuse, all potable with unit scarcity.
    fn default() -> Self {
        WithdrawalParams {
            discharge_actual: WaterVolume::ZERO,
            outfall_factor: 1.0,
            pollutant_factor: 1.0,
            reuse_rate: 0.0,
            beta_potable: 1.0,
            beta_nonpotable: 0.0,
            scarcity_potable: 1.0,
            scarcity_nonpotable: 1.0,
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} must lie in [0, 1], got {v}")))
    }
}

impl WithdrawalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("outfall_factor", self.outfall_factor),
            ("pollutant_factor", self.pollutant_factor),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        unit_interval("reuse_rate", self.reuse_rate)?;
        unit_interval("beta_potable", self.beta_potable)?;
        unit_interval("beta_nonpotable", self.beta_nonpotable)?;
        unit_interval("scarcity_potable", self.scarcity_potable)?;
        unit_interval("scarcity_nonpotable", self.scarcity_nonpotable)?;
        let split = self.beta_potable + self.beta_nonpotable;
        if (split - 1.0).abs() > SPLIT_TOLERANCE {
            return Err(Error::Validation(format!(
                "beta_potable + beta_nonpotable = {split}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Discharge scaled by outfall and pollutant factors.
pub fn adjusted_discharge(params: &WithdrawalParams) -> Result<WaterVolume> {
    for (name, v) in [
        ("outfall_factor", params.outfall_factor),
        ("pollutant_factor", params.pollutant_factor),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Validation(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    params
        .discharge_actual
        .scaled(params.outfall_factor * params.pollutant_factor)
}

pub fn water_reuse(discharge: WaterVolume, reuse_rate: f64) -> Result<WaterVolume> {
    unit_interval("reuse_rate", reuse_rate)?;
    discharge.scaled(reuse_rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Withdrawal {
    pub gross: WaterVolume,
    pub net: WaterVolume,
    pub potable: WaterVolume,
    pub nonpotable: WaterVolume,
    pub potable_weighted: WaterVolume,
    pub nonpotable_weighted: WaterVolume,
}

/// Gross withdrawal is consumption plus adjusted discharge; reuse is then
/// subtracted to give net withdrawal, which is split by source type.
pub fn withdrawal(consumption: WaterVolume, params: &WithdrawalParams) -> Result<Withdrawal> {
    params.validate()?;
    let discharge = adjusted_discharge(params)?;
    let reuse = water_reuse(discharge, params.reuse_rate)?;
    let gross = consumption + discharge;
    let net = gross.checked_sub(reuse).map_err(|_| {
        Error::Validation("net withdrawal would be negative".into())
    })?;
    let potable = net.scaled(params.beta_potable)?;
    let nonpotable = net.scaled(params.beta_nonpotable)?;
    Ok(Withdrawal {
        gross,
        net,
        potable,
        nonpotable,
        potable_weighted: potable.scaled(params.scarcity_potable)?,
        nonpotable_weighted: nonpotable.scaled(params.scarcity_nonpotable)?,
    })
}
