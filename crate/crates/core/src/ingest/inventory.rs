//! Hardware inventory files: a system name and a list of device rows, in TOML
//! or JSON. Process parameters come from the parameter database.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embodied::{DeviceSpec, HardwareInventory};
use crate::error::{Error, Result};
use crate::ingest::params::ParamDb;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InventoryFile {
    pub system_name: String,
    pub devices: Vec<DeviceSpec>,
}

impl InventoryFile {
    pub fn from_toml_str(text: &str, name: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse(name, e.to_string()))
    }

    pub fn from_json_str(text: &str, name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(name, e.to_string()))
    }

    /// Resolves every device against the database's process parameters.
    pub fn resolve(self, db: &ParamDb) -> Result<HardwareInventory> {
        HardwareInventory::new(self.system_name, self.devices, db.process_params.clone())
    }
}

pub fn load_inventory(path: &Path, db: &ParamDb) -> Result<HardwareInventory> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let file = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        InventoryFile::from_json_str(&text, &name)?
    } else {
        InventoryFile::from_toml_str(&text, &name)?
    };
    file.resolve(db)
}
