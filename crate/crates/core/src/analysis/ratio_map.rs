//! Embodied-to-operational footprint ratio over a grid of manufacturing and
//! operating scarcity values.

use serde::Serialize;

use crate::embodied::{embodied_footprint, HardwareInventory};
use crate::error::{Error, Result};
use crate::operational::water_intensity;

/// Operating conditions held fixed across the map.
#[derive(Debug, Clone)]
pub struct FixedTerms {
    pub ewf: f64,
    pub wue: f64,
    pub pue: f64,
    pub energy_kwh: f64,
    pub inventory: HardwareInventory,
}

#[derive(Debug, Clone)]
pub struct RatioMapSpec {
    /// Scarcity at the fab, one map row per value.
    pub mfg_wsi_axis: Vec<f64>,
    /// Scarcity at the operating site, one map column per value.
    pub op_wsi_axis: Vec<f64>,
    pub fixed: FixedTerms,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioMap {
    pub mfg_wsi_axis: Vec<f64>,
    pub op_wsi_axis: Vec<f64>,
    pub embodied_l: f64,
    pub operational_l: f64,
    /// `ratios[i][j]` pairs `mfg_wsi_axis[i]` with `op_wsi_axis[j]`.
    pub ratios: Vec<Vec<f64>>,
    /// `(mfg_wsi, op_wsi)` points where the ratio is exactly one, sorted by `mfg_wsi`.
    pub unit_contour: Vec<(f64, f64)>,
}

impl RatioMap {
    pub fn cells_at_or_above_one(&self) -> usize {
        self.ratios.iter().flatten().filter(|&&r| r >= 1.0).count()
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Validation(format!("{name} is empty")));
    }
    if axis.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::Validation(format!("{name} values must be positive")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

pub fn ratio_map_from_totals(
    embodied_l: f64,
    operational_l: f64,
    mfg_wsi_axis: &[f64],
    op_wsi_axis: &[f64],
) -> Result<RatioMap> {
    check_axis("manufacturing scarcity axis", mfg_wsi_axis)?;
    check_axis("operating scarcity axis", op_wsi_axis)?;
    if !embodied_l.is_finite() || embodied_l < 0.0 {
        return Err(Error::Validation(format!(
            "embodied footprint must be non-negative, got {embodied_l}"
        )));
    }
    if !operational_l.is_finite() || operational_l < 0.0 {
        return Err(Error::Validation(format!(
            "operational footprint must be non-negative, got {operational_l}"
        )));
    }
    if operational_l == 0.0 {
        return Err(Error::Singularity(
            "operational footprint is zero, the ratio is undefined".into(),
        ));
    }
    let ratios = mfg_wsi_axis
        .iter()
        .map(|&m| {
            op_wsi_axis
                .iter()
                .map(|&o| (embodied_l * m) / (operational_l * o))
                .collect()
        })
        .collect();

    let k = embodied_l / operational_l;
    let (o_lo, o_hi) = (op_wsi_axis[0], op_wsi_axis[op_wsi_axis.len() - 1]);
    let (m_lo, m_hi) = (mfg_wsi_axis[0], mfg_wsi_axis[mfg_wsi_axis.len() - 1]);
    let mut contour = Vec::new();
    if k > 0.0 {
        for &m in mfg_wsi_axis {
            let o = m * k;
            if (o_lo..=o_hi).contains(&o) {
                contour.push((m, o));
            }
        }
        for &o in op_wsi_axis {
            let m = o / k;
            if (m_lo..=m_hi).contains(&m) {
                contour.push((m, o));
            }
        }
    }
    contour.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    contour.dedup();

    Ok(RatioMap {
        mfg_wsi_axis: mfg_wsi_axis.to_vec(),
        op_wsi_axis: op_wsi_axis.to_vec(),
        embodied_l,
        operational_l,
        ratios,
        unit_contour: contour,
    })
}

pub fn embodied_operational_ratio_map(spec: &RatioMapSpec) -> Result<RatioMap> {
    let f = &spec.fixed;
    if !f.energy_kwh.is_finite() || f.energy_kwh < 0.0 {
        return Err(Error::Validation(format!(
            "energy must be non-negative, got {}",
            f.energy_kwh
        )));
    }
    let wi = water_intensity(f.wue, f.pue, f.ewf)?;
    let embodied = embodied_footprint(&f.inventory)?.total;
    ratio_map_from_totals(
        embodied.liters(),
        f.energy_kwh * wi.wi,
        &spec.mfg_wsi_axis,
        &spec.op_wsi_axis,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_totals_put_contour_on_the_diagonal() {
        let axis = [0.5, 1.0, 2.0, 4.0, 8.0];
        let map = ratio_map_from_totals(1234.5, 1234.5, &axis, &axis).unwrap();
        for (i, row) in map.ratios.iter().enumerate() {
            assert_eq!(row[i], 1.0);
        }
        assert_eq!(map.unit_contour.len(), axis.len());
        assert!(map.unit_contour.iter().all(|(m, o)| m == o));
    }

    #[test]
    fn ratio_grows_with_fab_scarcity_and_falls_with_site_scarcity() {
        let map = ratio_map_from_totals(10.0, 40.0, &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert!(map.ratios[i][j + 1] < map.ratios[i][j]);
                assert!(map.ratios[j + 1][i] > map.ratios[j][i]);
            }
        }
    }

    #[test]
    fn zero_operational_is_singular() {
        let err = ratio_map_from_totals(1.0, 0.0, &[1.0], &[1.0]).unwrap_err();
        assert!(matches!(err, Error::Singularity(_)));
    }

    #[test]
    fn axes_must_increase() {
        assert!(ratio_map_from_totals(1.0, 1.0, &[2.0, 1.0], &[1.0]).is_err());
        assert!(ratio_map_from_totals(1.0, 1.0, &[1.0], &[0.0, 1.0]).is_err());
    }
}
