use std::path::{Path, PathBuf};

use chrono::{DateTime, TimeDelta, Utc};
use clap::Args;
use hpcwater_core::analysis::rank_start_times;
use hpcwater_core::ingest::series_csv::{format_timestamp, load_intensity, load_power, parse_timestamp};
use hpcwater_core::Error;
use serde_json::{json, Value};

use crate::bundle::{SiteBundle, SiteInputs};
use crate::report::{csv_bytes, quantity, CliError, CliResult, Ctx, Sidecar};

#[derive(Debug, Args)]
pub struct RankArgs {
    /// CSV with a `start` column of candidate start times.
    #[arg(long)]
    pub candidates: PathBuf,
    /// Job duration in hours.
    #[arg(long)]
    pub duration_hours: f64,
    /// Job power profile CSV (timestamp,power_kw), indexed from the job start.
    /// Without it the job draws a constant 1 kW.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Precomputed intensity CSV, as written by `operate`.
    #[arg(long, conflicts_with_all = ["site", "weather", "mix"])]
    pub intensity: Option<PathBuf>,
    #[arg(long, requires_all = ["weather", "mix"])]
    pub site: Option<String>,
    #[arg(long)]
    pub weather: Option<PathBuf>,
    #[arg(long)]
    pub mix: Option<PathBuf>,
    #[arg(long)]
    pub clamp_weather: bool,
}

fn read_candidates(path: &Path) -> CliResult<Vec<DateTime<Utc>>> {
    let name = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::usage(format!("{name}: {other:?}")),
    })?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::usage(format!("{name}: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["start"] {
        return Err(Error::Parse {
            source_name: name,
            message: "expected header 'start'".into(),
        }
        .into());
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::usage(format!("{name}: {e}")))?;
        let t = parse_timestamp(&rec[0]).map_err(|m| Error::Parse {
            source_name: name.clone(),
            message: format!("line {}: {m}", i + 2),
        })?;
        out.push(t);
    }
    Ok(out)
}

pub fn run(ctx: &mut Ctx, args: &RankArgs) -> CliResult {
    let secs = args.duration_hours * 3600.0;
    if !(secs.is_finite() && secs > 0.0 && secs.fract() == 0.0) {
        return Err(CliError::usage("--duration-hours must be a positive whole number of seconds"));
    }
    let duration = TimeDelta::seconds(secs as i64);

    let intensity = match (&args.intensity, &args.site, &args.weather, &args.mix) {
        (Some(path), _, _, _) => {
            ctx.load_params()?;
            ctx.track("intensity", path)?;
            load_intensity(path)?
        }
        (None, Some(site), Some(weather), Some(mix)) => {
            let inputs = SiteInputs {
                site: site.clone(),
                weather: weather.clone(),
                mix: mix.clone(),
                clamp_weather: args.clamp_weather,
            };
            SiteBundle::load(ctx, &inputs)?.intensity()?
        }
        _ => return Err(CliError::usage("give --intensity, or --site with --weather and --mix")),
    };
    ctx.track("candidates", &args.candidates)?;
    let candidates = read_candidates(&args.candidates)?;
    let profile = match &args.profile {
        Some(p) => {
            ctx.track("profile", p)?;
            Some(load_power(p)?)
        }
        None => None,
    };
    let ranking = rank_start_times(&candidates, duration, profile.as_ref(), &intensity)?;

    let scores: Vec<Value> = ranking
        .candidates
        .iter()
        .map(|c| {
            json!({
                "start": format_timestamp(c.start),
                "energy": quantity(c.energy_kwh, "kWh"),
                "water": ctx.water(c.water_l),
                "carbon": quantity(c.carbon_g, "gCO2-eq"),
            })
        })
        .collect();
    let order = |idx: &[usize]| -> Vec<String> {
        idx.iter().map(|&i| format_timestamp(ranking.candidates[i].start)).collect()
    };
    let results = json!({
        "duration": quantity(ranking.duration_h, "h"),
        "profile": if profile.is_some() { "file" } else { "constant_1kw" },
        "candidates": scores,
        "water_ranking": order(&ranking.by_water),
        "carbon_ranking": order(&ranking.by_carbon),
        "optima_diverge": ranking.optima_diverge(),
    });
    let rank_of = |idx: &[usize], i: usize| idx.iter().position(|&j| j == i).unwrap() + 1;
    let csv = csv_bytes(
        &["start", "energy_kwh", "water_l", "carbon_g", "water_rank", "carbon_rank"],
        ranking.candidates.iter().enumerate().map(|(i, c)| {
            vec![
                format_timestamp(c.start),
                c.energy_kwh.to_string(),
                c.water_l.to_string(),
                c.carbon_g.to_string(),
                rank_of(&ranking.by_water, i).to_string(),
                rank_of(&ranking.by_carbon, i).to_string(),
            ]
        }),
    );
    ctx.emit(
        results,
        vec![Sidecar {
            name: "rank.csv".into(),
            contents: csv,
        }],
    )
}
