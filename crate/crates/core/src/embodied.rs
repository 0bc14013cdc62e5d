//! Embodied water: packaging plus manufacturing of processors, memory and storage.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::WaterVolume;

/// Fab yield used when an inventory row leaves it out.
pub const DEFAULT_YIELD: f64 = 0.875;

const MM2_PER_CM2: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceKind {
    Cpu,
    Gpu,
    Dram,
    Ssd,
    Hdd,
}

impl DeviceKind {
    pub const ALL: [DeviceKind; 5] = [
        DeviceKind::Cpu,
        DeviceKind::Gpu,
        DeviceKind::Dram,
        DeviceKind::Ssd,
        DeviceKind::Hdd,
    ];

    pub fn is_processor(self) -> bool {
        matches!(self, DeviceKind::Cpu | DeviceKind::Gpu)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DeviceKind::Cpu => "cpu",
            DeviceKind::Gpu => "gpu",
            DeviceKind::Dram => "dram",
            DeviceKind::Ssd => "ssd",
            DeviceKind::Hdd => "hdd",
        }
    }
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_yield() -> f64 {
    DEFAULT_YIELD
}

/// One row of a bill of materials. `count` identical devices share the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub name: String,
    pub kind: DeviceKind,
    pub count: u64,
    pub n_ic: u32,
    #[serde(default, rename = "die_area_mm2")]
    pub die_area_mm2: f64,
    #[serde(default, rename = "process_node_nm")]
    pub process_node_nm: Option<f64>,
    #[serde(default)]
    pub capacity_gb: f64,
    #[serde(default = "default_yield")]
    pub yield_rate: f64,
    pub fab_site: String,
    /// Flat transport and disposal water per device, in liters.
    #[serde(default)]
    pub transport_disposal_l: f64,
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<()> {
        let ctx = |msg: String| Error::InvalidSpec(format!("device '{}': {msg}", self.name));
        if self.count == 0 {
            return Err(ctx("count must be a positive integer".into()));
        }
        if self.n_ic == 0 {
            return Err(ctx("n_ic must be a positive integer".into()));
        }
        if !(self.yield_rate > 0.0 && self.yield_rate <= 1.0) {
            return Err(ctx(format!(
                "yield_rate must lie in (0, 1], got {}",
                self.yield_rate
            )));
        }
        if !(self.transport_disposal_l.is_finite() && self.transport_disposal_l >= 0.0) {
            return Err(ctx("transport_disposal_l must be finite and >= 0".into()));
        }
        if self.kind.is_processor() {
            if !(self.die_area_mm2.is_finite() && self.die_area_mm2 > 0.0) {
                return Err(ctx(format!(
                    "{} requires die_area_mm2 > 0, got {}",
                    self.kind, self.die_area_mm2
                )));
            }
            match self.process_node_nm {
                Some(n) if n.is_finite() && n > 0.0 => {}
                _ => return Err(ctx(format!("{} requires process_node_nm > 0", self.kind))),
            }
        } else if !(self.capacity_gb.is_finite() && self.capacity_gb > 0.0) {
            return Err(ctx(format!(
                "{} requires capacity_gb > 0, got {}",
                self.kind, self.capacity_gb
            )));
        }
        Ok(())
    }
}

/// Manufacturing water factors for one (process node, fab site) pair.
///
/// Die-area factors (`upw`, `pcw`, `wpa`) are liters per cm² of die. Memory and
/// storage factors are liters per GB. Entries describing memory or storage fabs
/// may leave `node_nm` unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessParams {
    #[serde(default)]
    pub node_nm: Option<f64>,
    pub site: String,
    #[serde(default)]
    pub w_ic: f64,
    #[serde(default)]
    pub upw: f64,
    #[serde(default)]
    pub pcw: f64,
    #[serde(default)]
    pub wpa: f64,
    #[serde(default)]
    pub wpc_dram: f64,
    #[serde(default)]
    pub wpc_ssd: f64,
    #[serde(default)]
    pub wpc_hdd: f64,
}

impl ProcessParams {
    pub fn validate(&self) -> Result<()> {
        let label = self.label();
        if let Some(n) = self.node_nm {
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::Validation(format!(
                    "process params {label}: node_nm must be > 0, got {n}"
                )));
            }
        }
        for (field, v) in [
            ("w_ic", self.w_ic),
            ("upw", self.upw),
            ("pcw", self.pcw),
            ("wpa", self.wpa),
            ("wpc_dram", self.wpc_dram),
            ("wpc_ssd", self.wpc_ssd),
            ("wpc_hdd", self.wpc_hdd),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!(
                    "process params {label}: {field} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self.node_nm {
            Some(n) => format!("({n} nm, {})", self.site),
            None => format!("(any node, {})", self.site),
        }
    }

    /// Per-cm² die factor, UPW + PCW + WPA.
    pub fn area_factor(&self) -> f64 {
        self.upw + self.pcw + self.wpa
    }

    pub fn wpc(&self, kind: DeviceKind) -> Option<f64> {
        match kind {
            DeviceKind::Dram => Some(self.wpc_dram),
            DeviceKind::Ssd => Some(self.wpc_ssd),
            DeviceKind::Hdd => Some(self.wpc_hdd),
            DeviceKind::Cpu | DeviceKind::Gpu => None,
        }
    }

    fn matches(&self, node_nm: Option<f64>, site: &str) -> bool {
        self.site == site && self.node_nm == node_nm
    }
}

/// A machine's bill of materials together with the process parameters it resolves against.
#[derive(Debug, Clone)]
pub struct HardwareInventory {
    system_name: String,
    devices: Vec<DeviceSpec>,
    params: Vec<ProcessParams>,
}

impl HardwareInventory {
    /// Validates every device and checks that each resolves to exactly one parameter entry.
    pub fn new(
        system_name: impl Into<String>,
        devices: Vec<DeviceSpec>,
        params: Vec<ProcessParams>,
    ) -> Result<Self> {
        for p in &params {
            p.validate()?;
        }
        let inventory = HardwareInventory {
            system_name: system_name.into(),
            devices,
            params,
        };
        for d in &inventory.devices {
            d.validate()?;
            inventory.resolve(d)?;
        }
        Ok(inventory)
    }

    pub fn system_name(&self) -> &str {
        &self.system_name
    }

    pub fn devices(&self) -> &[DeviceSpec] {
        &self.devices
    }

    pub fn params(&self) -> &[ProcessParams] {
        &self.params
    }

    /// Finds the parameter entry for `device`.
    ///
    /// Processors match on (node, site). Memory and storage match on their
    /// node when one is given, otherwise on the node-less entry for their site.
    pub fn resolve(&self, device: &DeviceSpec) -> Result<&ProcessParams> {
        let node = device.process_node_nm;
        let mut hits = self.params.iter().filter(|p| p.matches(node, &device.fab_site));
        let first = hits.next();
        let extra = hits.next();
        match (first, extra) {
            (Some(p), None) => Ok(p),
            (None, _) => Err(Error::ParamResolution(format!(
                "device '{}' ({}) has no process parameters for node {} at site '{}'",
                device.name,
                device.kind,
                node.map_or("<unset>".to_string(), |n| format!("{n} nm")),
                device.fab_site
            ))),
            (Some(_), Some(_)) => Err(Error::ParamResolution(format!(
                "device '{}' ({}) matches more than one process parameter entry at site '{}'",
                device.name, device.kind, device.fab_site
            ))),
        }
    }

    /// Same inventory with every device count multiplied by `factor`.
    pub fn with_scaled_counts(&self, factor: u64) -> Self {
        let mut out = self.clone();
        for d in &mut out.devices {
            d.count *= factor;
        }
        out
    }
}

/// Packaging water of a single inventory row: W_IC × N_IC × count.
pub fn packaging_water_device(spec: &DeviceSpec, params: &ProcessParams) -> Result<WaterVolume> {
    WaterVolume::from_liters(params.w_ic * f64::from(spec.n_ic) * spec.count as f64)
}

/// Total packaging water over all devices.
pub fn packaging_water(inventory: &HardwareInventory) -> Result<WaterVolume> {
    let mut total = WaterVolume::ZERO;
    for d in inventory.devices() {
        total += packaging_water_device(d, inventory.resolve(d)?)?;
    }
    Ok(total)
}

/// Manufacturing water of processors: (1/yield) × die area × (UPW + PCW + WPA) × count.
///
/// Die area is taken in mm² and converted to cm² before the per-area factors apply.
pub fn manufacturing_water_processor(spec: &DeviceSpec, params: &ProcessParams) -> Result<WaterVolume> {
    if !spec.kind.is_processor() {
        return Err(Error::InvalidSpec(format!(
            "device '{}' is {}, not a processor",
            spec.name, spec.kind
        )));
    }
    if !(spec.yield_rate > 0.0 && spec.yield_rate <= 1.0) {
        return Err(Error::Validation(format!(
            "device '{}': yield_rate must lie in (0, 1], got {}",
            spec.name, spec.yield_rate
        )));
    }
    if !(spec.die_area_mm2 > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "device '{}': die_area_mm2 must be > 0, got {}",
            spec.name, spec.die_area_mm2
        )));
    }
    let area_cm2 = spec.die_area_mm2 / MM2_PER_CM2;
    WaterVolume::from_liters(area_cm2 * params.area_factor() * spec.count as f64 / spec.yield_rate)
}

/// Manufacturing water of memory and storage: WPC × capacity × count.
pub fn manufacturing_water_storage(spec: &DeviceSpec, params: &ProcessParams) -> Result<WaterVolume> {
    let Some(wpc) = params.wpc(spec.kind) else {
        return Err(Error::InvalidSpec(format!(
            "device '{}' is {}, not memory or storage",
            spec.name, spec.kind
        )));
    };
    if !(spec.capacity_gb >= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "device '{}': capacity_gb must be >= 0, got {}",
            spec.name, spec.capacity_gb
        )));
    }
    WaterVolume::from_liters(wpc * spec.capacity_gb * spec.count as f64)
}

pub fn manufacturing_water(spec: &DeviceSpec, params: &ProcessParams) -> Result<WaterVolume> {
    if spec.kind.is_processor() {
        manufacturing_water_processor(spec, params)
    } else {
        manufacturing_water_storage(spec, params)
    }
}

/// Embodied water of one inventory row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ComponentWater {
    pub packaging: WaterVolume,
    pub manufacturing: WaterVolume,
    pub transport_disposal: WaterVolume,
}

impl ComponentWater {
    pub fn total(&self) -> WaterVolume {
        self.packaging + self.manufacturing + self.transport_disposal
    }

    fn accumulate(&mut self, other: &ComponentWater) {
        self.packaging += other.packaging;
        self.manufacturing += other.manufacturing;
        self.transport_disposal += other.transport_disposal;
    }
}

pub fn device_water(spec: &DeviceSpec, params: &ProcessParams) -> Result<ComponentWater> {
    Ok(ComponentWater {
        packaging: packaging_water_device(spec, params)?,
        manufacturing: manufacturing_water(spec, params)?,
        transport_disposal: WaterVolume::from_liters(spec.transport_disposal_l * spec.count as f64)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbodiedBreakdown {
    pub per_kind: BTreeMap<DeviceKind, ComponentWater>,
    pub total: WaterVolume,
}

impl EmbodiedBreakdown {
    /// Fraction of the total contributed by `kind`, in [0, 1]. Zero when the total is zero.
    pub fn share(&self, kind: DeviceKind) -> f64 {
        let total = self.total.liters();
        if total == 0.0 {
            return 0.0;
        }
        self.per_kind
            .get(&kind)
            .map_or(0.0, |c| c.total().liters() / total)
    }

    pub fn packaging(&self) -> WaterVolume {
        self.per_kind.values().map(|c| c.packaging).sum()
    }

    pub fn manufacturing(&self) -> WaterVolume {
        self.per_kind.values().map(|c| c.manufacturing).sum()
    }

    /// Kind with the largest share, if any device is present.
    pub fn dominant_kind(&self) -> Option<DeviceKind> {
        self.per_kind
            .iter()
            .max_by(|a, b| a.1.total().liters().total_cmp(&b.1.total().liters()))
            .map(|(k, _)| *k)
    }
}

/// Embodied water of an inventory, broken down per device kind.
pub fn embodied_footprint(inventory: &HardwareInventory) -> Result<EmbodiedBreakdown> {
    let mut per_kind: BTreeMap<DeviceKind, ComponentWater> = BTreeMap::new();
    for d in inventory.devices() {
        let w = device_water(d, inventory.resolve(d)?)?;
        per_kind.entry(d.kind).or_default().accumulate(&w);
    }
    let total = per_kind.values().map(ComponentWater::total).sum();
    Ok(EmbodiedBreakdown { per_kind, total })
}
