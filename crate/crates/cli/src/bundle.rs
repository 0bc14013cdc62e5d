//! Loading a site's weather, mix and power inputs.

use std::path::PathBuf;

use chrono::TimeDelta;
use clap::Args;
use hpcwater_core::ingest::series_csv::{load_mix, load_power, load_weather};
use hpcwater_core::ingest::{job_window, load_jobs, utilization_to_power, NodePowerModel, ParamDb, SiteProfile};
use hpcwater_core::operational::{
    build_intensity_series, EnergyMixSample, FactorTable, IntensityInputs, IntensitySeries,
    PowerTrace, PueProfile, WeatherSample, WueCurve,
};
use hpcwater_core::{Error, TimeSeries};

use crate::report::{CliError, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct SiteInputs {
    /// Site name in the parameter database.
    #[arg(long)]
    pub site: String,
    /// Weather CSV: timestamp,air_temp_c,rel_humidity_pct
    #[arg(long)]
    pub weather: PathBuf,
    /// Energy mix CSV: timestamp,source,share
    #[arg(long)]
    pub mix: PathBuf,
    /// Clamp weather into the wet-bulb regression window instead of failing.
    #[arg(long)]
    pub clamp_weather: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PowerSource {
    /// Measured IT power CSV: timestamp,power_kw
    #[arg(long)]
    pub power: Option<PathBuf>,
    /// Job log CSV (job_id,start,end,nodes); power is estimated from node TDP.
    #[arg(long)]
    pub jobs: Option<PathBuf>,
}

pub struct SiteBundle {
    pub db: ParamDb,
    pub site_name: String,
    pub site: SiteProfile,
    pub weather: TimeSeries<WeatherSample>,
    pub mix: TimeSeries<EnergyMixSample>,
    pub curve: WueCurve,
    pub factors: FactorTable,
    pub pue: PueProfile,
    pub clamp_weather: bool,
}

impl SiteBundle {
    pub fn load(ctx: &mut Ctx, inputs: &SiteInputs) -> CliResult<Self> {
        let db = ctx.load_params()?;
        let site = db.site(&inputs.site)?.clone();
        let curve = db.wue_curve(&site.wue_curve)?.clone();
        ctx.track("weather", &inputs.weather)?;
        ctx.track("mix", &inputs.mix)?;
        let weather = load_weather(&inputs.weather)?;
        let mix = load_mix(&inputs.mix)?;
        Ok(SiteBundle {
            factors: db.factor_table(),
            pue: site.pue_profile(),
            site_name: inputs.site.clone(),
            site,
            db,
            weather,
            mix,
            curve,
            clamp_weather: inputs.clamp_weather,
        })
    }

    pub fn intensity(&self) -> CliResult<IntensitySeries> {
        Ok(build_intensity_series(&IntensityInputs {
            weather: &self.weather,
            mix: &self.mix,
            pue: &self.pue,
            curve: &self.curve,
            factors: &self.factors,
            clamp_weather: self.clamp_weather,
        })?)
    }

    /// Power from a measured trace or from the job log and the site's node figures.
    pub fn power(&self, ctx: &mut Ctx, source: &PowerSource, step_minutes: i64) -> CliResult<(PowerTrace, &'static str)> {
        if let Some(path) = &source.power {
            ctx.track("power", path)?;
            return Ok((load_power(path)?, "power_trace"));
        }
        let path = source
            .jobs
            .as_ref()
            .ok_or_else(|| CliError::usage("one of --power or --jobs is required"))?;
        if step_minutes <= 0 {
            return Err(CliError::usage("--step-minutes must be positive"));
        }
        ctx.track("jobs", path)?;
        let jobs = load_jobs(path)?;
        let missing = |what: &str| {
            Error::ParamResolution(format!("site '{}' has no {what}; needed to estimate power from jobs", self.site_name))
        };
        let nodes = self.site.nodes.ok_or_else(|| missing("nodes"))?;
        let tdp = self.site.tdp_per_node_kw.ok_or_else(|| missing("tdp_per_node_kw"))?;
        let model = NodePowerModel::new(tdp, self.site.idle_fraction.unwrap_or(0.0))?;
        let grid = job_window(&jobs, TimeDelta::minutes(step_minutes))
            .ok_or_else(|| CliError::usage(format!("{}: job log is empty", path.display())))?;
        Ok((utilization_to_power(&jobs, nodes, &model, &grid)?, "job_log"))
    }
}
