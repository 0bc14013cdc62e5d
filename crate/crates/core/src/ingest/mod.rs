//! Loading external data into validated model inputs.

pub mod inventory;
pub mod jobs;
pub mod params;
pub mod series_csv;

pub use inventory::{load_inventory, InventoryFile};
pub use jobs::{job_window, load_jobs, read_jobs, utilization_to_power, JobRecord, NodePowerModel};
pub use params::{load_parameter_db, load_scenarios, ParamDb, SiteProfile, DEFAULT_DB};
pub use series_csv::{load_series, LoadedSeries, SeriesKind};
