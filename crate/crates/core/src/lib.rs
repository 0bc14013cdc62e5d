//! Water footprint accounting for HPC systems: embodied water from
//! manufacturing, operational water from cooling and electricity, scarcity
//! weighting, withdrawal accounting, and the analyses built on them.

/// Version of the modeling engine, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod analysis;
pub mod embodied;
pub mod error;
pub mod ingest;
pub mod operational;
pub mod scarcity;
pub mod series;
pub mod units;
pub mod wetbulb;
pub mod withdrawal;

pub use embodied::{embodied_footprint, DeviceKind, DeviceSpec, HardwareInventory, ProcessParams};
pub use error::{Error, ErrorCategory, Result};
pub use operational::{
    build_intensity_series, operational_footprint, operational_footprint_aligned,
    EnergyMixSample, IntensitySeries, OperationalFootprint, PowerTrace, PueProfile,
    WeatherSample, WueCurve,
};
pub use series::{common_grid, Grid, TimeSeries};
pub use units::WaterVolume;
pub use wetbulb::wet_bulb_temperature;
