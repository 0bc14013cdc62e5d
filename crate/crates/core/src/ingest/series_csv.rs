//! CSV readers and writers for weather, grid-mix, power, intensity and WSI data.
//!
//! Timestamps are ISO 8601 in UTC. Writers emit the canonical form
//! `YYYY-MM-DDTHH:MM:SSZ` and shortest round-trip float text, so a written
//! series parses back bit for bit.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, TimeDelta, Utc};

use crate::error::{Error, Result};
use crate::operational::{
    EnergyMixSample, IntensitySample, IntensitySeries, PowerTrace, WeatherSample,
};
use crate::scarcity::{ScarcityIndex, WsiTable};
use crate::series::TimeSeries;

pub const WEATHER_HEADER: [&str; 3] = ["timestamp", "air_temp_c", "rel_humidity_pct"];
pub const MIX_HEADER: [&str; 3] = ["timestamp", "source", "share"];
pub const POWER_HEADER: [&str; 2] = ["timestamp", "power_kw"];
pub const WSI_HEADER: [&str; 2] = ["region", "wsi"];
pub const INTENSITY_HEADER: [&str; 8] = [
    "timestamp",
    "wue_l_per_kwh",
    "ewf_l_per_kwh",
    "pue",
    "wi_direct_l_per_kwh",
    "wi_indirect_l_per_kwh",
    "wi_l_per_kwh",
    "ci_g_per_kwh",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    EnergyMix,
    Weather,
    Power,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSeries {
    EnergyMix(TimeSeries<EnergyMixSample>),
    Weather(TimeSeries<WeatherSample>),
    Power(PowerTrace),
}

pub fn format_timestamp(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn parse_timestamp(text: &str) -> std::result::Result<DateTime<Utc>, String> {
    let text = text.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(text) {
        return Ok(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(text, fmt) {
            return Ok(t.and_utc());
        }
    }
    Err(format!("invalid ISO 8601 timestamp '{text}'"))
}

/// Row-level reader that tags every error with the source name and line.
struct Rows<R: Read> {
    name: String,
    reader: csv::Reader<R>,
}

impl<R: Read> Rows<R> {
    fn new(reader: R, name: &str, header: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let found = reader
            .headers()
            .map_err(|e| Error::parse(name, e.to_string()))?
            .clone();
        let found: Vec<&str> = found.iter().collect();
        if found != header {
            return Err(Error::parse(
                name,
                format!("expected header '{}', found '{}'", header.join(","), found.join(",")),
            ));
        }
        Ok(Rows {
            name: name.to_string(),
            reader,
        })
    }

    fn for_each(mut self, mut f: impl FnMut(&Row<'_>) -> Result<()>) -> Result<()> {
        let mut record = csv::StringRecord::new();
        loop {
            match self.reader.read_record(&mut record) {
                Ok(false) => return Ok(()),
                Ok(true) => {
                    let line = record.position().map_or(0, |p| p.line());
                    let row = Row {
                        name: &self.name,
                        line,
                        record: &record,
                    };
                    f(&row)?;
                }
                Err(e) => return Err(Error::parse(&self.name, e.to_string())),
            }
        }
    }
}

struct Row<'a> {
    name: &'a str,
    line: u64,
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn err(&self, msg: impl std::fmt::Display) -> Error {
        Error::parse(self.name, format!("line {}: {msg}", self.line))
    }

    fn str(&self, idx: usize, field: &str) -> Result<&str> {
        self.record
            .get(idx)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| self.err(format!("missing field '{field}'")))
    }

    fn f64(&self, idx: usize, field: &str) -> Result<f64> {
        let s = self.str(idx, field)?;
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(format!("field '{field}': '{s}' is not a finite number")))
    }

    fn time(&self, idx: usize, field: &str) -> Result<DateTime<Utc>> {
        parse_timestamp(self.str(idx, field)?).map_err(|m| self.err(format!("field '{field}': {m}")))
    }

    /// Re-labels a validation failure with this row's location.
    fn wrap(&self, e: Error) -> Error {
        match e {
            Error::Validation(m) | Error::InvalidSpec(m) => self.err(m),
            other => other,
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn series_error(name: &str, e: Error) -> Error {
    match e {
        Error::Validation(m) => Error::parse(name, m),
        other => other,
    }
}

pub fn read_weather<R: Read>(reader: R, name: &str, step: Option<TimeDelta>) -> Result<TimeSeries<WeatherSample>> {
    let mut points = Vec::new();
    Rows::new(reader, name, &WEATHER_HEADER)?.for_each(|row| {
        let t = row.time(0, "timestamp")?;
        let w = WeatherSample::new(row.f64(1, "air_temp_c")?, row.f64(2, "rel_humidity_pct")?)
            .map_err(|e| row.wrap(e))?;
        points.push((t, w));
        Ok(())
    })?;
    TimeSeries::from_points(points, step).map_err(|e| series_error(name, e))
}

pub fn read_power<R: Read>(reader: R, name: &str, step: Option<TimeDelta>) -> Result<PowerTrace> {
    let mut points = Vec::new();
    Rows::new(reader, name, &POWER_HEADER)?.for_each(|row| {
        let t = row.time(0, "timestamp")?;
        let p = row.f64(1, "power_kw")?;
        if p < 0.0 {
            return Err(row.err(format!("power_kw must be >= 0, got {p}")));
        }
        points.push((t, p));
        Ok(())
    })?;
    let series = TimeSeries::from_points(points, step).map_err(|e| series_error(name, e))?;
    PowerTrace::new(series)
}

/// Long-format mix: one row per (timestamp, source). Rows of one timestamp must be contiguous.
pub fn read_mix<R: Read>(reader: R, name: &str, step: Option<TimeDelta>) -> Result<TimeSeries<EnergyMixSample>> {
    let mut groups: Vec<(DateTime<Utc>, u64, BTreeMap<String, f64>)> = Vec::new();
    Rows::new(reader, name, &MIX_HEADER)?.for_each(|row| {
        let t = row.time(0, "timestamp")?;
        let source = row.str(1, "source")?.to_string();
        let share = row.f64(2, "share")?;
        match groups.last_mut() {
            Some((gt, _, shares)) if *gt == t => {
                if shares.insert(source.clone(), share).is_some() {
                    return Err(row.err(format!("duplicate source '{source}' at {}", format_timestamp(t))));
                }
            }
            Some((gt, _, _)) if *gt > t => {
                return Err(row.err(format!(
                    "timestamp {} is not after {}",
                    format_timestamp(t),
                    format_timestamp(*gt)
                )));
            }
            _ => groups.push((t, row.line, BTreeMap::from([(source, share)]))),
        }
        Ok(())
    })?;
    let points = groups
        .into_iter()
        .map(|(t, line, shares)| {
            EnergyMixSample::new(shares)
                .map(|m| (t, m))
                .map_err(|e| Error::parse(name, format!("line {line}: at {}: {e}", format_timestamp(t))))
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::from_points(points, step).map_err(|e| series_error(name, e))
}

pub fn read_intensity<R: Read>(reader: R, name: &str) -> Result<IntensitySeries> {
    let mut points = Vec::new();
    Rows::new(reader, name, &INTENSITY_HEADER)?.for_each(|row| {
        let t = row.time(0, "timestamp")?;
        let s = IntensitySample::new(
            row.f64(1, "wue_l_per_kwh")?,
            row.f64(2, "ewf_l_per_kwh")?,
            row.f64(3, "pue")?,
            row.f64(7, "ci_g_per_kwh")?,
        )
        .map_err(|e| row.wrap(e))?;
        points.push((t, s));
        Ok(())
    })?;
    TimeSeries::from_points(points, None).map_err(|e| series_error(name, e))
}

pub fn read_wsi_table<R: Read>(reader: R, name: &str) -> Result<WsiTable> {
    let mut table = WsiTable::new();
    Rows::new(reader, name, &WSI_HEADER)?.for_each(|row| {
        let region = row.str(0, "region")?.to_string();
        let idx = ScarcityIndex::new(region, row.f64(1, "wsi")?).map_err(|e| row.wrap(e))?;
        if table.insert(idx.region.clone(), idx.wsi).is_some() {
            return Err(row.err(format!("duplicate region '{}'", idx.region)));
        }
        Ok(())
    })?;
    Ok(table)
}

/// Reads a series file of the given kind.
pub fn load_series(path: &Path, kind: SeriesKind) -> Result<LoadedSeries> {
    let name = path.display().to_string();
    let file = open(path)?;
    Ok(match kind {
        SeriesKind::EnergyMix => LoadedSeries::EnergyMix(read_mix(file, &name, None)?),
        SeriesKind::Weather => LoadedSeries::Weather(read_weather(file, &name, None)?),
        SeriesKind::Power => LoadedSeries::Power(read_power(file, &name, None)?),
    })
}

pub fn load_weather(path: &Path) -> Result<TimeSeries<WeatherSample>> {
    read_weather(open(path)?, &path.display().to_string(), None)
}

pub fn load_mix(path: &Path) -> Result<TimeSeries<EnergyMixSample>> {
    read_mix(open(path)?, &path.display().to_string(), None)
}

pub fn load_power(path: &Path) -> Result<PowerTrace> {
    read_power(open(path)?, &path.display().to_string(), None)
}

pub fn load_intensity(path: &Path) -> Result<IntensitySeries> {
    read_intensity(open(path)?, &path.display().to_string())
}

pub fn load_wsi_table(path: &Path) -> Result<WsiTable> {
    read_wsi_table(open(path)?, &path.display().to_string())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io {
        path: "<csv writer>".into(),
        source: std::io::Error::other(e),
    }
}

fn write_rows<W: Write>(writer: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

pub fn write_weather<W: Write>(writer: W, series: &TimeSeries<WeatherSample>) -> Result<()> {
    write_rows(
        writer,
        &WEATHER_HEADER,
        series.iter().map(|(t, w)| {
            vec![
                format_timestamp(t),
                w.air_temp_c.to_string(),
                w.rel_humidity_pct.to_string(),
            ]
        }),
    )
}

pub fn write_power<W: Write>(writer: W, trace: &PowerTrace) -> Result<()> {
    write_rows(
        writer,
        &POWER_HEADER,
        trace
            .series()
            .iter()
            .map(|(t, p)| vec![format_timestamp(t), p.to_string()]),
    )
}

pub fn write_mix<W: Write>(writer: W, series: &TimeSeries<EnergyMixSample>) -> Result<()> {
    write_rows(
        writer,
        &MIX_HEADER,
        series.iter().flat_map(|(t, m)| {
            m.shares()
                .iter()
                .map(move |(s, v)| vec![format_timestamp(t), s.clone(), v.to_string()])
                .collect::<Vec<_>>()
        }),
    )
}

pub fn write_intensity<W: Write>(writer: W, series: &IntensitySeries) -> Result<()> {
    write_rows(
        writer,
        &INTENSITY_HEADER,
        series.iter().map(|(t, s)| {
            vec![
                format_timestamp(t),
                s.wue.to_string(),
                s.ewf.to_string(),
                s.pue.to_string(),
                s.wi_direct.to_string(),
                s.wi_indirect.to_string(),
                s.wi.to_string(),
                s.ci.to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mix_rows(rows: &[(&str, &str, &str)]) -> String {
        let mut s = String::from("timestamp,source,share\n");
        for (t, src, v) in rows {
            s.push_str(&format!("{t},{src},{v}\n"));
        }
        s
    }

    #[test]
    fn hourly_mix_day() {
        let mut text = String::from("timestamp,source,share\n");
        for h in 0..24 {
            text.push_str(&format!("2023-01-01T{h:02}:00:00Z,gas,0.4\n2023-01-01T{h:02}:00:00Z,hydro,0.6\n"));
        }
        let s = read_mix(text.as_bytes(), "mix", None).unwrap();
        assert_eq!(s.len(), 24);
        assert_eq!(s.step(), TimeDelta::hours(1));
    }

    #[test]
    fn duplicated_timestamp_rejected() {
        let text = "timestamp,power_kw\n2023-01-01T00:00:00Z,1\n2023-01-01T00:00:00Z,2\n";
        assert!(matches!(read_power(text.as_bytes(), "p", None), Err(Error::Parse { .. })));
        let text = mix_rows(&[
            ("2023-01-01T00:00:00Z", "gas", "1"),
            ("2023-01-01T00:00:00Z", "gas", "1"),
        ]);
        assert!(read_mix(text.as_bytes(), "m", None).is_err());
    }

    #[test]
    fn share_sum_violation_rejected() {
        let text = mix_rows(&[
            ("2023-01-01T00:00:00Z", "gas", "0.5"),
            ("2023-01-01T00:00:00Z", "coal", "0.52"),
        ]);
        let err = read_mix(text.as_bytes(), "m", None).unwrap_err();
        assert!(err.to_string().contains("1.02"), "{err}");
        let ok = mix_rows(&[
            ("2023-01-01T00:00:00Z", "gas", "0.5"),
            ("2023-01-01T00:00:00Z", "coal", "0.5000005"),
        ]);
        assert!(read_mix(ok.as_bytes(), "m", None).is_ok());
    }

    #[test]
    fn mix_out_of_order_rejected() {
        let text = mix_rows(&[
            ("2023-01-01T01:00:00Z", "gas", "1"),
            ("2023-01-01T00:00:00Z", "gas", "1"),
        ]);
        assert!(read_mix(text.as_bytes(), "m", None).is_err());
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "timestamp,air_temp_c,rel_humidity_pct\n2023-01-01T00:00:00Z,20,50\n2023-01-01T01:00:00Z,abc,50\n";
        let err = read_weather(text.as_bytes(), "w.csv", None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains("air_temp_c"), "{msg}");
    }

    #[test]
    fn wrong_header_rejected() {
        let text = "time,power\n2023-01-01T00:00:00Z,1\n";
        assert!(read_power(text.as_bytes(), "p", None).is_err());
    }

    #[test]
    fn humidity_out_of_range_rejected() {
        let text = "timestamp,air_temp_c,rel_humidity_pct\n2023-01-01T00:00:00Z,20,101\n";
        assert!(read_weather(text.as_bytes(), "w", None).is_err());
    }

    #[test]
    fn wsi_table() {
        let t = read_wsi_table("region,wsi\nus-il,40\nus-tn,1.5\n".as_bytes(), "wsi").unwrap();
        assert_eq!(t["us-il"], 40.0);
        assert!(read_wsi_table("region,wsi\nx,0.01\n".as_bytes(), "wsi").is_err());
    }

    #[test]
    fn naive_timestamps_are_utc() {
        let a = parse_timestamp("2023-05-01T12:00:00Z").unwrap();
        let b = parse_timestamp("2023-05-01 12:00:00").unwrap();
        let c = parse_timestamp("2023-05-01T14:00:00+02:00").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}
