use std::path::PathBuf;

use clap::Args;
use hpcwater_core::analysis::{run_scenarios, Baseline, MixOverride, ScenarioTotals};
use hpcwater_core::ingest::load_scenarios;
use serde_json::{json, Map, Value};

use crate::bundle::{PowerSource, SiteBundle, SiteInputs};
use crate::report::{csv_bytes, optional_percent, percent, quantity, CliError, CliResult, Ctx, Sidecar};

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub site: SiteInputs,
    #[command(flatten)]
    pub power: PowerSource,
    #[arg(long, default_value_t = 60)]
    pub step_minutes: i64,
    /// Scenario file with a `scenarios` list; defaults to the database's scenarios.
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
}

fn totals(ctx: &Ctx, t: &ScenarioTotals) -> Value {
    json!({
        "energy": quantity(t.energy_kwh, "kWh"),
        "direct": ctx.water(t.direct_l),
        "indirect": ctx.water(t.indirect_l),
        "water": ctx.water(t.water_l),
        "carbon": quantity(t.carbon_g, "gCO2-eq"),
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

pub fn run(ctx: &mut Ctx, args: &ScenarioArgs) -> CliResult {
    let bundle = SiteBundle::load(ctx, &args.site)?;
    let scenarios = match &args.scenarios {
        Some(path) => {
            ctx.track("scenarios", path)?;
            load_scenarios(path, &bundle.db)?
        }
        None => bundle.db.scenarios.clone(),
    };
    if scenarios.is_empty() {
        return Err(CliError::usage("no scenarios defined"));
    }
    let (power, _) = bundle.power(ctx, &args.power, args.step_minutes)?;
    let baseline = Baseline {
        weather: &bundle.weather,
        mix: &bundle.mix,
        pue: &bundle.pue,
        curve: &bundle.curve,
        factors: &bundle.factors,
        power: &power,
        clamp_weather: bundle.clamp_weather,
    };
    let cmp = run_scenarios(&baseline, &scenarios)?;

    let rows: Vec<Value> = cmp
        .outcomes
        .iter()
        .zip(&scenarios)
        .map(|(o, s)| {
            let mix = match &s.mix {
                MixOverride::Unchanged => Value::String("unchanged".into()),
                MixOverride::Fixed(shares) => Value::Object(
                    shares
                        .iter()
                        .map(|(k, v)| (k.clone(), percent(*v)))
                        .collect::<Map<_, _>>(),
                ),
            };
            json!({
                "name": o.name,
                "mix": mix,
                "totals": totals(ctx, &o.totals),
                "deltas": {
                    "water": optional_percent(o.deltas.water_pct),
                    "direct": optional_percent(o.deltas.direct_pct),
                    "indirect": optional_percent(o.deltas.indirect_pct),
                    "carbon": optional_percent(o.deltas.carbon_pct),
                },
            })
        })
        .collect();
    let results = json!({
        "site": bundle.site_name,
        "baseline": totals(ctx, &cmp.baseline),
        "scenarios": rows,
    });
    let csv = csv_bytes(
        &["name", "water_l", "direct_l", "indirect_l", "carbon_g", "delta_water_pct", "delta_direct_pct", "delta_indirect_pct", "delta_carbon_pct"],
        cmp.outcomes.iter().map(|o| {
            vec![
                o.name.clone(),
                o.totals.water_l.to_string(),
                o.totals.direct_l.to_string(),
                o.totals.indirect_l.to_string(),
                o.totals.carbon_g.to_string(),
                fmt_opt(o.deltas.water_pct),
                fmt_opt(o.deltas.direct_pct),
                fmt_opt(o.deltas.indirect_pct),
                fmt_opt(o.deltas.carbon_pct),
            ]
        }),
    );
    ctx.emit(
        results,
        vec![Sidecar {
            name: "scenario.csv".into(),
            contents: csv,
        }],
    )
}
