use clap::Args;
use hpcwater_core::analysis::compare_series;
use hpcwater_core::ingest::series_csv::{format_timestamp, write_intensity};
use hpcwater_core::operational::{operational_footprint_aligned, OperationalFootprint};
use hpcwater_core::scarcity::{adjust_intensity_split, adjust_intensity_uniform};
use serde_json::{json, Value};

use crate::bundle::{PowerSource, SiteBundle, SiteInputs};
use crate::report::{count, csv_bytes, percent, quantity, CliResult, Ctx, Sidecar, WsiMode};

#[derive(Debug, Args)]
pub struct OperateArgs {
    #[command(flatten)]
    pub site: SiteInputs,
    #[command(flatten)]
    pub power: PowerSource,
    /// Step of the power trace estimated from a job log, in minutes.
    #[arg(long, default_value_t = 60)]
    pub step_minutes: i64,
}

fn scarcity(ctx: &Ctx, bundle: &SiteBundle, op: &OperationalFootprint) -> CliResult<Option<Value>> {
    let db = &bundle.db;
    let (wsi_direct, wsi_indirect, adjusted) = match ctx.wsi {
        WsiMode::None => return Ok(None),
        WsiMode::Uniform => {
            let w = db.direct_wsi(&bundle.site)?;
            (w, w, adjust_intensity_uniform(op.total.liters(), w)?)
        }
        WsiMode::Split => {
            let wd = db.direct_wsi(&bundle.site)?;
            let wi = db.indirect_wsi(&bundle.site)?;
            (wd, wi, adjust_intensity_split(op.direct.liters(), op.indirect.liters(), wd, wi)?)
        }
    };
    Ok(Some(json!({
        "mode": ctx.wsi.as_str(),
        "wsi_direct": quantity(wsi_direct, "dimensionless"),
        "wsi_indirect": quantity(wsi_indirect, "dimensionless"),
        "adjusted_total": ctx.water(adjusted),
    })))
}

pub fn run(ctx: &mut Ctx, args: &OperateArgs) -> CliResult {
    let bundle = SiteBundle::load(ctx, &args.site)?;
    let intensity = bundle.intensity()?;
    let (power, power_source) = bundle.power(ctx, &args.power, args.step_minutes)?;
    let op = operational_footprint_aligned(&power, &intensity)?;

    let cmp = compare_series(&intensity.map(|s| s.wi), &intensity.map(|s| s.ci))?;
    let monthly: Vec<Value> = cmp
        .monthly
        .iter()
        .zip(cmp.wi_normalized.iter().zip(&cmp.ci_normalized))
        .map(|(m, (wn, cn))| {
            json!({
                "month": format!("{:04}-{:02}", m.year, m.month),
                "samples": count(m.samples),
                "wi": quantity(m.wi, "L/kWh"),
                "ci": quantity(m.ci, "gCO2-eq/kWh"),
                "wi_normalized": quantity(*wn, "dimensionless"),
                "ci_normalized": quantity(*cn, "dimensionless"),
            })
        })
        .collect();

    let window = match (op.series.first(), op.series.last()) {
        (Some(first), Some(last)) => {
            let step = power.series().step().min(intensity.step());
            json!({
                "start": format_timestamp(first.timestamp),
                "end": format_timestamp(last.timestamp + step),
                "step": quantity(step.num_seconds() as f64, "s"),
                "steps": count(op.series.len()),
            })
        }
        _ => Value::Null,
    };
    let per_kwh = |x: f64| if op.energy_kwh > 0.0 { x / op.energy_kwh } else { f64::NAN };

    let mut results = json!({
        "site": bundle.site_name,
        "power_source": power_source,
        "window": window,
        "energy": quantity(op.energy_kwh, "kWh"),
        "water": {
            "direct": ctx.water_volume(op.direct),
            "indirect": ctx.water_volume(op.indirect),
            "total": ctx.water_volume(op.total),
        },
        "shares": {
            "direct": percent(op.direct_share()),
            "indirect": percent(op.indirect_share()),
        },
        "carbon": quantity(op.carbon_g, "gCO2-eq"),
        "effective_intensity": {
            "wi": quantity(per_kwh(op.total.liters()), "L/kWh"),
            "carbon": quantity(per_kwh(op.carbon_g), "gCO2-eq/kWh"),
        },
        "comparison": {
            "method": cmp.method,
            "correlation": quantity(cmp.correlation.unwrap_or(f64::NAN), "dimensionless"),
            "monthly": monthly,
        },
    });
    if let Some(s) = scarcity(ctx, &bundle, &op)? {
        results["scarcity"] = s;
    }

    let mut intensity_csv = Vec::new();
    write_intensity(&mut intensity_csv, &intensity)?;
    let steps_csv = csv_bytes(
        &["timestamp", "energy_kwh", "direct_l", "indirect_l", "total_l", "carbon_g"],
        op.series.iter().map(|s| {
            vec![
                format_timestamp(s.timestamp),
                s.energy_kwh.to_string(),
                s.direct_l.to_string(),
                s.indirect_l.to_string(),
                (s.direct_l + s.indirect_l).to_string(),
                s.carbon_g.to_string(),
            ]
        }),
    );
    ctx.emit(
        results,
        vec![
            Sidecar {
                name: "operate_intensity.csv".into(),
                contents: intensity_csv,
            },
            Sidecar {
                name: "operate_steps.csv".into(),
                contents: steps_csv,
            },
        ],
    )
}
