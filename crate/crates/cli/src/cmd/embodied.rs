use std::path::PathBuf;

use clap::Args;
use hpcwater_core::embodied::{device_water, embodied_footprint};
use hpcwater_core::ingest::load_inventory;
use hpcwater_core::scarcity::scarcity_weighted_embodied;
use serde_json::{json, Value};

use crate::report::{count, csv_bytes, percent, CliResult, Ctx, Sidecar, WsiMode};

#[derive(Debug, Args)]
pub struct EmbodiedArgs {
    /// Inventory file (TOML or JSON) with system_name and devices.
    #[arg(long)]
    pub inventory: PathBuf,
}

pub fn run(ctx: &mut Ctx, args: &EmbodiedArgs) -> CliResult {
    let db = ctx.load_params()?;
    ctx.track("inventory", &args.inventory)?;
    let inv = load_inventory(&args.inventory, &db)?;
    let breakdown = embodied_footprint(&inv)?;

    let per_kind: Vec<Value> = breakdown
        .per_kind
        .iter()
        .map(|(kind, c)| {
            json!({
                "kind": kind.as_str(),
                "packaging": ctx.water_volume(c.packaging),
                "manufacturing": ctx.water_volume(c.manufacturing),
                "transport_disposal": ctx.water_volume(c.transport_disposal),
                "total": ctx.water_volume(c.total()),
                "share": percent(breakdown.share(*kind)),
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut devices = Vec::new();
    for d in inv.devices() {
        let params = inv.resolve(d)?;
        let w = device_water(d, params)?;
        devices.push(json!({
            "name": d.name,
            "kind": d.kind.as_str(),
            "count": count(d.count as usize),
            "process_params": params.label(),
            "total": ctx.water_volume(w.total()),
        }));
        rows.push(vec![
            d.name.clone(),
            d.kind.as_str().to_string(),
            d.count.to_string(),
            w.packaging.liters().to_string(),
            w.manufacturing.liters().to_string(),
            w.transport_disposal.liters().to_string(),
            w.total().liters().to_string(),
        ]);
    }

    let mut results = json!({
        "system_name": inv.system_name(),
        "total": ctx.water_volume(breakdown.total),
        "packaging": ctx.water_volume(breakdown.packaging()),
        "manufacturing": ctx.water_volume(breakdown.manufacturing()),
        "per_kind": per_kind,
        "devices": devices,
    });
    if ctx.wsi != WsiMode::None {
        let weighted = scarcity_weighted_embodied(&inv, &db.wsi)?;
        results["scarcity"] = json!({
            "mode": "fab_site",
            "adjusted_total": ctx.water_volume(weighted),
        });
    }
    let sidecar = Sidecar {
        name: "embodied_devices.csv".into(),
        contents: csv_bytes(
            &["name", "kind", "count", "packaging_l", "manufacturing_l", "transport_disposal_l", "total_l"],
            rows,
        ),
    };
    ctx.emit(results, vec![sidecar])
}
