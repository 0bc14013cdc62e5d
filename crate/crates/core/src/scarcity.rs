//! Water-scarcity weighting of intensities and footprints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embodied::{device_water, HardwareInventory};
use crate::error::{Error, Result};
use crate::operational::SHARE_SUM_TOLERANCE;
use crate::units::WaterVolume;

pub const WSI_RANGE: (f64, f64) = (0.1, 100.0);

/// Scarcity index of a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScarcityIndex {
    pub region: String,
    pub wsi: f64,
}

impl ScarcityIndex {
    pub fn new(region: impl Into<String>, wsi: f64) -> Result<Self> {
        let idx = ScarcityIndex {
            region: region.into(),
            wsi,
        };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        check_wsi(self.wsi).map_err(|_| {
            Error::Validation(format!(
                "region '{}': wsi {} outside [{}, {}]",
                self.region, self.wsi, WSI_RANGE.0, WSI_RANGE.1
            ))
        })?;
        Ok(())
    }
}

fn check_wsi(wsi: f64) -> Result<f64> {
    if (WSI_RANGE.0..=WSI_RANGE.1).contains(&wsi) {
        Ok(wsi)
    } else {
        Err(Error::Validation(format!(
            "wsi {wsi} outside [{}, {}]",
            WSI_RANGE.0, WSI_RANGE.1
        )))
    }
}

pub type WsiTable = BTreeMap<String, f64>;

pub fn lookup_wsi(table: &WsiTable, region: &str) -> Result<f64> {
    table
        .get(region)
        .copied()
        .ok_or_else(|| Error::ParamResolution(format!("no water scarcity index for region '{region}'")))
}

/// One grid feeding a facility, with its share of delivered energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSupplyShare {
    pub grid_region: String,
    pub share: f64,
    pub wsi: f64,
}

/// Scarcity-weighted intensity with a single index, WI × WSI.
pub fn adjust_intensity_uniform(wi: f64, wsi: f64) -> Result<f64> {
    Ok(wi * check_wsi(wsi)?)
}

/// Direct and indirect parts weighted by their own indices.
pub fn adjust_intensity_split(
    wi_direct: f64,
    wi_indirect: f64,
    wsi_direct: f64,
    wsi_indirect: f64,
) -> Result<f64> {
    let wsi_direct = check_wsi(wsi_direct)?;
    let wsi_indirect = check_wsi(wsi_indirect)?;
    if wsi_direct == wsi_indirect {
        // factor out so the result matches the uniform form bit for bit
        return Ok((wi_direct + wi_indirect) * wsi_direct);
    }
    Ok(wi_direct * wsi_direct + wi_indirect * wsi_indirect)
}

/// Share-weighted mean WSI over the grids supplying a facility.
pub fn effective_indirect_wsi(supplies: &[GridSupplyShare]) -> Result<f64> {
    if supplies.is_empty() {
        return Err(Error::Validation("no grid supplies given".into()));
    }
    let mut sum_share = 0.0;
    let mut acc = 0.0;
    for s in supplies {
        if !(0.0..=1.0).contains(&s.share) {
            return Err(Error::Validation(format!(
                "grid '{}' share {} outside [0, 1]",
                s.grid_region, s.share
            )));
        }
        check_wsi(s.wsi)?;
        sum_share += s.share;
        acc += s.share * s.wsi;
    }
    if (sum_share - 1.0).abs() > SHARE_SUM_TOLERANCE {
        return Err(Error::Validation(format!(
            "grid supply shares sum to {sum_share}, expected 1 within {SHARE_SUM_TOLERANCE}"
        )));
    }
    Ok(acc)
}

/// Embodied water with each device weighted by the WSI of its fab site.
pub fn scarcity_weighted_embodied(inventory: &HardwareInventory, table: &WsiTable) -> Result<WaterVolume> {
    let mut total = WaterVolume::ZERO;
    for d in inventory.devices() {
        let wsi = check_wsi(lookup_wsi(table, &d.fab_site)?)?;
        total += device_water(d, inventory.resolve(d)?)?.total().scaled(wsi)?;
    }
    Ok(total)
}
