use std::path::PathBuf;

use clap::Args;
use hpcwater_core::ingest::series_csv::{load_intensity, load_mix, load_power, load_weather};
use hpcwater_core::ingest::{load_inventory, load_jobs, load_scenarios};
use serde_json::{json, Value};

use crate::report::{count, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub inventory: Option<PathBuf>,
    #[arg(long)]
    pub weather: Option<PathBuf>,
    #[arg(long)]
    pub mix: Option<PathBuf>,
    #[arg(long)]
    pub power: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<PathBuf>,
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    #[arg(long)]
    pub intensity: Option<PathBuf>,
}

/// Loads the parameter database and every given input; the first failure aborts.
pub fn run(ctx: &mut Ctx, args: &ValidateArgs) -> CliResult {
    let db = ctx.load_params()?;
    let mut checked: Vec<Value> = Vec::new();
    let mut ok = |role: &str, detail: Value| checked.push(json!({"role": role, "detail": detail}));
    ok(
        "params",
        json!({
            "sites": count(db.sites.len()),
            "source_factors": count(db.source_factors.len()),
            "scenarios": count(db.scenarios.len()),
        }),
    );
    if let Some(p) = &args.inventory {
        ctx.track("inventory", p)?;
        let inv = load_inventory(p, &db)?;
        ok("inventory", json!({"devices": count(inv.devices().len())}));
    }
    if let Some(p) = &args.weather {
        ctx.track("weather", p)?;
        ok("weather", json!({"samples": count(load_weather(p)?.len())}));
    }
    if let Some(p) = &args.mix {
        ctx.track("mix", p)?;
        ok("mix", json!({"samples": count(load_mix(p)?.len())}));
    }
    if let Some(p) = &args.power {
        ctx.track("power", p)?;
        ok("power", json!({"samples": count(load_power(p)?.series().len())}));
    }
    if let Some(p) = &args.jobs {
        ctx.track("jobs", p)?;
        ok("jobs", json!({"jobs": count(load_jobs(p)?.len())}));
    }
    if let Some(p) = &args.scenarios {
        ctx.track("scenarios", p)?;
        ok("scenarios", json!({"scenarios": count(load_scenarios(p, &db)?.len())}));
    }
    if let Some(p) = &args.intensity {
        ctx.track("intensity", p)?;
        ok("intensity", json!({"samples": count(load_intensity(p)?.len())}));
    }
    ctx.emit(json!({"valid": true, "checked": checked}), Vec::new())
}
