//! Run context, manifest and report output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hpcwater_core::ingest::{ParamDb, DEFAULT_DB};
use hpcwater_core::{ErrorCategory, WaterVolume};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T = ()> = Result<T, CliError>;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            code: 4,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<hpcwater_core::Error> for CliError {
    fn from(e: hpcwater_core::Error) -> Self {
        let code = match e.category() {
            ErrorCategory::InputValidation => 2,
            ErrorCategory::ParameterResolution => 3,
            ErrorCategory::Io => 4,
            ErrorCategory::Alignment => 5,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WsiMode {
    None,
    Uniform,
    Split,
}

impl WsiMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WsiMode::None => "none",
            WsiMode::Uniform => "uniform",
            WsiMode::Split => "split",
        }
    }
}

pub struct Sidecar {
    pub name: String,
    pub contents: Vec<u8>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Ctx {
    pub command: &'static str,
    pub args: Vec<String>,
    pub params_path: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub gallons: bool,
    pub wsi: WsiMode,
    pub reproducible: bool,
    params_digest: Option<String>,
    inputs: Vec<Value>,
}

impl Ctx {
    pub fn new(
        command: &'static str,
        args: Vec<String>,
        params_path: Option<PathBuf>,
        out: Option<PathBuf>,
        gallons: bool,
        wsi: WsiMode,
        reproducible: bool,
    ) -> Self {
        Ctx {
            command,
            args,
            params_path,
            out,
            gallons,
            wsi,
            reproducible,
            params_digest: None,
            inputs: Vec::new(),
        }
    }

    /// Loads the parameter database, from `--params` or the compiled-in default.
    pub fn load_params(&mut self) -> CliResult<ParamDb> {
        let db = match &self.params_path {
            Some(path) => {
                let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
                self.params_digest = Some(sha256_hex(&bytes));
                hpcwater_core::ingest::load_parameter_db(path)?
            }
            None => {
                self.params_digest = Some(sha256_hex(DEFAULT_DB.as_bytes()));
                ParamDb::shipped()
            }
        };
        Ok(db)
    }

    /// Records an input file and its digest in the manifest.
    pub fn track(&mut self, role: &str, path: &Path) -> CliResult<()> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(json!({
            "role": role,
            "path": path.display().to_string(),
            "sha256": sha256_hex(&bytes),
        }));
        Ok(())
    }

    fn manifest(&self) -> Value {
        let params = match (&self.params_path, &self.params_digest) {
            (_, None) => Value::Null,
            (Some(p), Some(d)) => json!({"source": p.display().to_string(), "sha256": d}),
            (None, Some(d)) => json!({"source": "builtin", "sha256": d}),
        };
        let generated_at = if self.reproducible {
            Value::Null
        } else {
            Value::String(chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string())
        };
        json!({
            "engine": {
                "name": env!("CARGO_PKG_NAME"),
                "version": env!("CARGO_PKG_VERSION"),
                "core_version": hpcwater_core::VERSION,
            },
            "command": self.command,
            "args": self.args,
            "flags": {
                "gallons": self.gallons,
                "wsi": self.wsi.as_str(),
                "reproducible": self.reproducible,
                "out": self.out.as_ref().map(|p| p.display().to_string()),
            },
            "params": params,
            "inputs": self.inputs,
            "generated_at": generated_at,
        })
    }

    /// Water quantity in liters, with a gallon rendering under `--gallons`.
    pub fn water(&self, liters: f64) -> Value {
        let mut v = quantity(liters, "L");
        if self.gallons {
            let gal = WaterVolume::from_liters(liters).map(|w| w.gallons()).unwrap_or(f64::NAN);
            v["gallons"] = quantity(gal, "gal");
        }
        v
    }

    pub fn water_volume(&self, w: WaterVolume) -> Value {
        self.water(w.liters())
    }

    /// Prints the report and, with `--out`, writes it and its sidecars to disk.
    pub fn emit(&self, results: Value, sidecars: Vec<Sidecar>) -> CliResult<()> {
        let mut report = Map::new();
        report.insert("schema_version".into(), SCHEMA_VERSION.into());
        report.insert("kind".into(), self.command.into());
        report.insert("manifest".into(), self.manifest());
        report.insert("results".into(), results);
        report.insert(
            "sidecars".into(),
            sidecars.iter().map(|s| Value::String(s.name.clone())).collect(),
        );
        let mut text = serde_json::to_string_pretty(&Value::Object(report)).expect("report serializes");
        text.push('\n');
        if let Some(dir) = &self.out {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let path = dir.join(format!("{}.json", self.command));
            fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
            for s in &sidecars {
                let path = dir.join(&s.name);
                fs::write(&path, &s.contents).map_err(|e| CliError::io(&path, e))?;
            }
        }
        print!("{text}");
        Ok(())
    }
}

/// `{"value": v, "unit": u}`; non-finite values become null.
pub fn quantity(value: f64, unit: &str) -> Value {
    let v = if value.is_finite() { json!(value) } else { Value::Null };
    json!({"value": v, "unit": unit})
}

pub fn count(n: usize) -> Value {
    json!({"value": n, "unit": "count"})
}

pub fn percent(fraction: f64) -> Value {
    quantity(fraction * 100.0, "%")
}

pub fn optional_percent(pct: Option<f64>) -> Value {
    quantity(pct.unwrap_or(f64::NAN), "%")
}

pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
