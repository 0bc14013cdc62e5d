use std::path::PathBuf;

use clap::Args;
use hpcwater_core::analysis::{embodied_operational_ratio_map, FixedTerms, RatioMapSpec};
use hpcwater_core::ingest::load_inventory;
use serde_json::{json, Value};

use crate::report::{count, csv_bytes, quantity, CliResult, Ctx, Sidecar};

#[derive(Debug, Args)]
pub struct RatioMapArgs {
    #[arg(long)]
    pub inventory: PathBuf,
    /// Operational energy, kWh.
    #[arg(long)]
    pub energy_kwh: f64,
    #[arg(long)]
    pub ewf: f64,
    #[arg(long)]
    pub wue: f64,
    #[arg(long)]
    pub pue: f64,
    /// Manufacturing scarcity values, comma separated, increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub mfg_wsi: Vec<f64>,
    /// Operating-site scarcity values, comma separated, increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub op_wsi: Vec<f64>,
}

pub fn run(ctx: &mut Ctx, args: &RatioMapArgs) -> CliResult {
    let db = ctx.load_params()?;
    ctx.track("inventory", &args.inventory)?;
    let inventory = load_inventory(&args.inventory, &db)?;
    let map = embodied_operational_ratio_map(&RatioMapSpec {
        mfg_wsi_axis: args.mfg_wsi.clone(),
        op_wsi_axis: args.op_wsi.clone(),
        fixed: FixedTerms {
            ewf: args.ewf,
            wue: args.wue,
            pue: args.pue,
            energy_kwh: args.energy_kwh,
            inventory,
        },
    })?;
    let axis = |v: &[f64]| -> Vec<Value> { v.iter().map(|&x| quantity(x, "dimensionless")).collect() };
    let contour: Vec<Value> = map
        .unit_contour
        .iter()
        .map(|&(m, o)| json!({"mfg_wsi": quantity(m, "dimensionless"), "op_wsi": quantity(o, "dimensionless")}))
        .collect();
    let results = json!({
        "embodied": ctx.water(map.embodied_l),
        "operational": ctx.water(map.operational_l),
        "axes": {"mfg_wsi": axis(&map.mfg_wsi_axis), "op_wsi": axis(&map.op_wsi_axis)},
        "cells": count(map.mfg_wsi_axis.len() * map.op_wsi_axis.len()),
        "cells_at_or_above_one": count(map.cells_at_or_above_one()),
        "unit_contour": contour,
    });
    let mut rows = Vec::new();
    for (i, m) in map.mfg_wsi_axis.iter().enumerate() {
        for (j, o) in map.op_wsi_axis.iter().enumerate() {
            rows.push(vec![m.to_string(), o.to_string(), map.ratios[i][j].to_string()]);
        }
    }
    ctx.emit(
        results,
        vec![Sidecar {
            name: "ratio_map.csv".into(),
            contents: csv_bytes(&["mfg_wsi", "op_wsi", "ratio"], rows),
        }],
    )
}
