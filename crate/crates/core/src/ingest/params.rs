//! The parameter database: process factors, generation sources, scarcity
//! indices, WUE curves, withdrawal parameters, facility profiles and scenarios.
//!
//! The human-edited form is TOML; JSON with the same tree is the canonical
//! machine form. Both go through the same validation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::scenario::Scenario;
use crate::embodied::ProcessParams;
use crate::error::{Error, Result};
use crate::operational::{FactorTable, PueProfile, SourceFactors, WueCurve};
use crate::scarcity::{self, GridSupplyShare, WsiTable, WSI_RANGE};
use crate::withdrawal::WithdrawalParams;

/// Text of the parameter database compiled into the engine.
pub const DEFAULT_DB: &str = include_str!("../../data/default_params.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AreaBasis {
    #[default]
    #[serde(rename = "L/cm2")]
    PerCm2,
    #[serde(rename = "L/mm2")]
    PerMm2,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbMeta {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub area_basis: AreaBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplyRef {
    pub region: String,
    pub share: f64,
}

/// A facility: PUE, WUE curve, scarcity regions and node power figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteProfile {
    pub pue: f64,
    pub wue_curve: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wsi_region: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indirect_supply: Vec<SupplyRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub withdrawal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tdp_per_node_kw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idle_fraction: Option<f64>,
}

impl SiteProfile {
    pub fn pue_profile(&self) -> PueProfile {
        PueProfile::Constant(self.pue)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDb {
    #[serde(default)]
    pub meta: DbMeta,
    #[serde(default)]
    pub process_params: Vec<ProcessParams>,
    #[serde(default)]
    pub source_factors: BTreeMap<String, SourceFactorsEntry>,
    #[serde(default)]
    pub wsi: WsiTable,
    #[serde(default)]
    pub wue_curves: BTreeMap<String, WueCurve>,
    #[serde(default)]
    pub withdrawal: BTreeMap<String, WithdrawalParams>,
    #[serde(default)]
    pub sites: BTreeMap<String, SiteProfile>,
    #[serde(default)]
    pub scenarios: Vec<Scenario>,
}

/// [`SourceFactors`] as stored under its source key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceFactorsEntry {
    pub ewf: f64,
    pub carbon_intensity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub technology: Option<crate::operational::Technology>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooling: Option<crate::operational::CoolingType>,
}

/// Sections of a [`ParamDb`] used by the scenario loader.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
struct ScenarioFile {
    #[serde(default)]
    scenarios: Vec<Scenario>,
}

fn range_error(field: &str, value: f64, range: &str) -> Error {
    Error::Validation(format!("{field} = {value} is outside the valid range ({range})"))
}

impl ParamDb {
    /// The database shipped with the crate.
    pub fn shipped() -> ParamDb {
        ParamDb::from_toml_str(DEFAULT_DB, "default_params.toml")
            .expect("shipped parameter database is valid")
    }

    pub fn from_toml_str(text: &str, source_name: &str) -> Result<ParamDb> {
        if text.trim().is_empty() {
            return Err(Error::parse(source_name, "parameter database is empty"));
        }
        let mut db: ParamDb =
            toml::from_str(text).map_err(|e| Error::parse(source_name, e.to_string()))?;
        db.normalize();
        db.validate()?;
        Ok(db)
    }

    pub fn from_json_str(text: &str, source_name: &str) -> Result<ParamDb> {
        if text.trim().is_empty() {
            return Err(Error::parse(source_name, "parameter database is empty"));
        }
        let mut db: ParamDb =
            serde_json::from_str(text).map_err(|e| Error::parse(source_name, e.to_string()))?;
        db.normalize();
        db.validate()?;
        Ok(db)
    }

    /// Canonical JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameter database serializes")
    }

    fn normalize(&mut self) {
        if self.meta.area_basis == AreaBasis::PerMm2 {
            for p in &mut self.process_params {
                p.upw *= 100.0;
                p.pcw *= 100.0;
                p.wpa *= 100.0;
            }
            self.meta.area_basis = AreaBasis::PerCm2;
        }
    }

    /// Checks every value range and every cross-reference between sections.
    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.process_params.iter().enumerate() {
            p.validate()
                .map_err(|e| Error::Validation(format!("process_params[{i}]: {e}")))?;
        }
        for (i, a) in self.process_params.iter().enumerate() {
            if self.process_params[..i]
                .iter()
                .any(|b| a.site == b.site && a.node_nm == b.node_nm)
            {
                return Err(Error::Validation(format!(
                    "process_params[{i}]: duplicate entry for {}",
                    a.label()
                )));
            }
        }
        for f in self.factor_table().values() {
            f.validate()
                .map_err(|e| Error::Validation(format!("source_factors.{}: {e}", f.source)))?;
        }
        for (region, wsi) in &self.wsi {
            if !(WSI_RANGE.0..=WSI_RANGE.1).contains(wsi) {
                return Err(range_error(
                    &format!("wsi.{region}"),
                    *wsi,
                    &format!("{} to {}", WSI_RANGE.0, WSI_RANGE.1),
                ));
            }
        }
        for (name, w) in &self.withdrawal {
            w.validate()
                .map_err(|e| Error::Validation(format!("withdrawal.{name}: {e}")))?;
        }
        for (name, site) in &self.sites {
            self.validate_site(name, site)?;
        }
        let factors = self.factor_table();
        for s in &self.scenarios {
            s.validate(&factors)?;
        }
        Ok(())
    }

    fn validate_site(&self, name: &str, site: &SiteProfile) -> Result<()> {
        let field = |f: &str| format!("sites.{name}.{f}");
        if !(site.pue.is_finite() && site.pue >= 1.0) {
            return Err(range_error(&field("pue"), site.pue, ">= 1"));
        }
        if !self.wue_curves.contains_key(&site.wue_curve) {
            return Err(Error::ParamResolution(format!(
                "{} references unknown WUE curve '{}'",
                field("wue_curve"),
                site.wue_curve
            )));
        }
        if let Some(r) = &site.wsi_region {
            scarcity::lookup_wsi(&self.wsi, r)
                .map_err(|e| Error::ParamResolution(format!("{}: {e}", field("wsi_region"))))?;
        }
        if !site.indirect_supply.is_empty() {
            self.grid_supplies(site)
                .and_then(|s| scarcity::effective_indirect_wsi(&s))
                .map_err(|e| match e {
                    Error::ParamResolution(m) => {
                        Error::ParamResolution(format!("{}: {m}", field("indirect_supply")))
                    }
                    other => Error::Validation(format!("{}: {other}", field("indirect_supply"))),
                })?;
        }
        if let Some(w) = &site.withdrawal {
            if !self.withdrawal.contains_key(w) {
                return Err(Error::ParamResolution(format!(
                    "{} references unknown withdrawal parameters '{w}'",
                    field("withdrawal")
                )));
            }
        }
        if let Some(t) = site.tdp_per_node_kw {
            if !(t.is_finite() && t > 0.0) {
                return Err(range_error(&field("tdp_per_node_kw"), t, "> 0 kW"));
            }
        }
        if let Some(f) = site.idle_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(range_error(&field("idle_fraction"), f, "0 to 1"));
            }
        }
        if site.nodes == Some(0) {
            return Err(range_error(&field("nodes"), 0.0, ">= 1"));
        }
        Ok(())
    }

    pub fn factor_table(&self) -> FactorTable {
        self.source_factors
            .iter()
            .map(|(k, e)| {
                (
                    k.clone(),
                    SourceFactors {
                        source: k.clone(),
                        ewf: e.ewf,
                        carbon_intensity: e.carbon_intensity,
                        technology: e.technology,
                        cooling: e.cooling,
                    },
                )
            })
            .collect()
    }

    pub fn site(&self, name: &str) -> Result<&SiteProfile> {
        self.sites
            .get(name)
            .ok_or_else(|| Error::ParamResolution(format!("unknown site '{name}'")))
    }

    pub fn wue_curve(&self, name: &str) -> Result<&WueCurve> {
        self.wue_curves
            .get(name)
            .ok_or_else(|| Error::ParamResolution(format!("unknown WUE curve '{name}'")))
    }

    pub fn withdrawal_params(&self, name: &str) -> Result<&WithdrawalParams> {
        self.withdrawal
            .get(name)
            .ok_or_else(|| Error::ParamResolution(format!("unknown withdrawal parameters '{name}'")))
    }

    /// WSI of the facility's own region.
    pub fn direct_wsi(&self, site: &SiteProfile) -> Result<f64> {
        let region = site
            .wsi_region
            .as_deref()
            .ok_or_else(|| Error::ParamResolution("site has no wsi_region".into()))?;
        scarcity::lookup_wsi(&self.wsi, region)
    }

    pub fn grid_supplies(&self, site: &SiteProfile) -> Result<Vec<GridSupplyShare>> {
        site.indirect_supply
            .iter()
            .map(|s| {
                Ok(GridSupplyShare {
                    grid_region: s.region.clone(),
                    share: s.share,
                    wsi: scarcity::lookup_wsi(&self.wsi, &s.region)?,
                })
            })
            .collect()
    }

    /// Share-weighted WSI of the grids feeding the facility, falling back to the
    /// direct WSI when no supply is listed.
    pub fn indirect_wsi(&self, site: &SiteProfile) -> Result<f64> {
        if site.indirect_supply.is_empty() {
            return self.direct_wsi(site);
        }
        scarcity::effective_indirect_wsi(&self.grid_supplies(site)?)
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Loads and validates a parameter database; `.json` files are read as JSON, anything else as TOML.
pub fn load_parameter_db(path: &Path) -> Result<ParamDb> {
    let text = read_text(path)?;
    let name = path.display().to_string();
    if is_json(path) {
        ParamDb::from_json_str(&text, &name)
    } else {
        ParamDb::from_toml_str(&text, &name)
    }
}

/// Loads the `scenarios` section of a TOML or JSON file and checks it against `db`.
pub fn load_scenarios(path: &Path, db: &ParamDb) -> Result<Vec<Scenario>> {
    let text = read_text(path)?;
    let name = path.display().to_string();
    let file: ScenarioFile = if is_json(path) {
        serde_json::from_str(&text).map_err(|e| Error::parse(&name, e.to_string()))?
    } else {
        toml::from_str(&text).map_err(|e| Error::parse(&name, e.to_string()))?
    };
    if file.scenarios.is_empty() {
        return Err(Error::parse(&name, "no [[scenarios]] entries"));
    }
    let factors = db.factor_table();
    for s in &file.scenarios {
        s.validate(&factors)?;
    }
    Ok(file.scenarios)
}
