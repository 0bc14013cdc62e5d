use std::path::{Path, PathBuf};

use clap::Args;
use hpcwater_core::withdrawal::{adjusted_discharge, water_reuse, withdrawal, WithdrawalParams};
use hpcwater_core::{Error, WaterVolume};
use serde_json::{json, Value};

use crate::report::{quantity, CliError, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct WithdrawArgs {
    /// Report from `operate` whose total water is the consumption.
    #[arg(long, required_unless_present = "consumption_l", conflicts_with = "consumption_l")]
    pub consumption_report: Option<PathBuf>,
    /// Consumption in liters.
    #[arg(long)]
    pub consumption_l: Option<f64>,
    /// Named withdrawal parameter set in the database.
    #[arg(long, conflicts_with = "withdrawal_file")]
    pub withdrawal: Option<String>,
    /// Use the withdrawal parameter set of this site.
    #[arg(long, conflicts_with_all = ["withdrawal", "withdrawal_file"])]
    pub site: Option<String>,
    /// Withdrawal parameters in a TOML or JSON file.
    #[arg(long)]
    pub withdrawal_file: Option<PathBuf>,
}

fn consumption_from_report(path: &Path) -> CliResult<f64> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |m: &str| -> CliError {
        Error::Parse {
            source_name: path.display().to_string(),
            message: m.into(),
        }
        .into()
    };
    let report: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    if report["kind"] != "operate" {
        return Err(bad("not an operate report"));
    }
    let total = &report["results"]["water"]["total"];
    if total["unit"] != "L" {
        return Err(bad("results.water.total is not in liters"));
    }
    total["value"].as_f64().ok_or_else(|| bad("results.water.total.value is missing"))
}

fn params_from_file(path: &Path) -> CliResult<WithdrawalParams> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let name = path.display().to_string();
    let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| Error::Parse { source_name: name, message }.into())
}

pub fn run(ctx: &mut Ctx, args: &WithdrawArgs) -> CliResult {
    let db = ctx.load_params()?;
    let consumption = match (&args.consumption_report, args.consumption_l) {
        (Some(path), _) => {
            ctx.track("consumption_report", path)?;
            consumption_from_report(path)?
        }
        (None, Some(l)) => l,
        (None, None) => return Err(CliError::usage("give --consumption-report or --consumption-l")),
    };
    let consumption = WaterVolume::from_liters(consumption)?;
    let (label, params) = if let Some(path) = &args.withdrawal_file {
        ctx.track("withdrawal", path)?;
        (path.display().to_string(), params_from_file(path)?)
    } else {
        let name = match (&args.withdrawal, &args.site) {
            (Some(n), _) => n.clone(),
            (None, Some(site)) => db
                .site(site)?
                .withdrawal
                .clone()
                .ok_or_else(|| Error::ParamResolution(format!("site '{site}' has no withdrawal parameters")))?,
            (None, None) => "neutral".to_string(),
        };
        (name.clone(), db.withdrawal_params(&name)?.clone())
    };
    let w = withdrawal(consumption, &params)?;
    let discharge = adjusted_discharge(&params)?;
    let reuse = water_reuse(discharge, params.reuse_rate)?;
    let dimless = |v: f64| quantity(v, "dimensionless");

    let results = json!({
        "consumption": ctx.water_volume(consumption),
        "parameters": {
            "source": label,
            "discharge_actual": ctx.water_volume(params.discharge_actual),
            "outfall_factor": dimless(params.outfall_factor),
            "pollutant_factor": dimless(params.pollutant_factor),
            "reuse_rate": dimless(params.reuse_rate),
            "beta_potable": dimless(params.beta_potable),
            "beta_nonpotable": dimless(params.beta_nonpotable),
            "scarcity_potable": dimless(params.scarcity_potable),
            "scarcity_nonpotable": dimless(params.scarcity_nonpotable),
        },
        "adjusted_discharge": ctx.water_volume(discharge),
        "reuse": ctx.water_volume(reuse),
        "gross": ctx.water_volume(w.gross),
        "net": ctx.water_volume(w.net),
        "potable": ctx.water_volume(w.potable),
        "nonpotable": ctx.water_volume(w.nonpotable),
        "potable_weighted": ctx.water_volume(w.potable_weighted),
        "nonpotable_weighted": ctx.water_volume(w.nonpotable_weighted),
    });
    ctx.emit(results, Vec::new())
}
