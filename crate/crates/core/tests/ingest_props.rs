use std::collections::BTreeMap;

use chrono::{DateTime, TimeDelta, TimeZone, Utc};
use hpcwater_core::ingest::jobs::{busy_nodes, utilization_to_power, JobRecord, NodePowerModel};
use hpcwater_core::ingest::series_csv::{
    load_series, read_intensity, read_mix, read_power, read_weather, write_intensity, write_mix,
    write_power, write_weather, LoadedSeries, SeriesKind,
};
use hpcwater_core::ingest::{load_parameter_db, ParamDb};
use hpcwater_core::operational::{EnergyMixSample, IntensitySample, PowerTrace, WeatherSample};
use hpcwater_core::series::{Grid, TimeSeries};
use hpcwater_core::{Error, ErrorCategory};
use proptest::prelude::*;

fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2022, 12, 31, 18, 0, 0).unwrap()
}

fn step() -> impl Strategy<Value = TimeDelta> {
    prop_oneof![
        Just(TimeDelta::minutes(5)),
        Just(TimeDelta::minutes(15)),
        Just(TimeDelta::hours(1)),
        Just(TimeDelta::days(1)),
    ]
}

fn mix_sample() -> impl Strategy<Value = EnergyMixSample> {
    prop::collection::btree_map("[a-z]{1,8}", 0.01f64..1.0, 1..5).prop_map(|raw| {
        let sum: f64 = raw.values().sum();
        let mut shares: BTreeMap<String, f64> = raw.into_iter().map(|(k, v)| (k, v / sum)).collect();
        let drift = 1.0 - shares.values().sum::<f64>();
        *shares.values_mut().next().unwrap() += drift;
        EnergyMixSample::new(shares).unwrap()
    })
}

proptest! {
    #[test]
    fn weather_round_trips(step in step(), rows in prop::collection::vec((-60.0f64..60.0, 0.0f64..=100.0), 1..50)) {
        let values: Vec<WeatherSample> = rows.iter().map(|&(t, rh)| WeatherSample::new(t, rh).unwrap()).collect();
        let s = TimeSeries::new(t0(), step, values).unwrap();
        let mut buf = Vec::new();
        write_weather(&mut buf, &s).unwrap();
        let back = read_weather(buf.as_slice(), "mem", Some(step)).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn power_round_trips(step in step(), rows in prop::collection::vec(0.0f64..1e7, 2..50)) {
        let p = PowerTrace::new(TimeSeries::new(t0(), step, rows).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_power(&mut buf, &p).unwrap();
        let back = read_power(buf.as_slice(), "mem", None).unwrap();
        for (a, b) in back.series().values().iter().zip(p.series().values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back, p);
    }

    #[test]
    fn mix_round_trips(step in step(), rows in prop::collection::vec(mix_sample(), 2..30)) {
        let s = TimeSeries::new(t0(), step, rows).unwrap();
        let mut buf = Vec::new();
        write_mix(&mut buf, &s).unwrap();
        let back = read_mix(buf.as_slice(), "mem", None).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn intensity_round_trips(step in step(), rows in prop::collection::vec((0.05f64..3.0, 0.0f64..20.0, 1.0f64..2.0, 0.0f64..900.0), 2..40)) {
        let values = rows.iter().map(|&(a, b, c, d)| IntensitySample::new(a, b, c, d).unwrap()).collect();
        let s = TimeSeries::new(t0(), step, values).unwrap();
        let mut buf = Vec::new();
        write_intensity(&mut buf, &s).unwrap();
        let back = read_intensity(buf.as_slice(), "mem").unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn occupancy_never_exceeds_the_machine(
        jobs in prop::collection::vec((0i64..2880, 1i64..600, 1u32..40), 0..20),
        tdp in 0.1f64..5.0,
        idle in 0.0f64..=1.0,
    ) {
        let total = 800;
        let jobs: Vec<JobRecord> = jobs.iter().enumerate().map(|(i, &(s, d, n))| JobRecord {
            job_id: format!("{i}"),
            start: t0() + TimeDelta::minutes(s),
            end: t0() + TimeDelta::minutes(s + d),
            nodes_used: n,
        }).collect();
        let grid = Grid { start: t0(), step: TimeDelta::minutes(30), len: 2 * 60 };
        let busy = busy_nodes(&jobs, total, &grid).unwrap();
        prop_assert!(busy.iter().all(|&b| (0.0..=f64::from(total)).contains(&b)));
        let model = NodePowerModel::new(tdp, idle).unwrap();
        let p = utilization_to_power(&jobs, total, &model, &grid).unwrap();
        let max_kw = f64::from(total) * tdp * (1.0 + 1e-12);
        prop_assert!(p.series().values().iter().all(|&kw| kw <= max_kw && kw >= 0.0));
    }
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn hourly_mix_file_loads_as_hourly_series() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("timestamp,source,share\n");
    for h in 0..24 {
        body += &format!("2023-05-01T{h:02}:00:00Z,hydro,0.4\n2023-05-01T{h:02}:00:00Z,gas,0.6\n");
    }
    let path = write(&dir, "mix.csv", &body);
    match load_series(&path, SeriesKind::EnergyMix).unwrap() {
        LoadedSeries::EnergyMix(s) => {
            assert_eq!(s.len(), 24);
            assert_eq!(s.step(), TimeDelta::hours(1));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_series_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let dup = write(
        &dir,
        "dup.csv",
        "timestamp,power_kw\n2023-05-01T00:00:00Z,1\n2023-05-01T00:00:00Z,2\n",
    );
    assert!(load_series(&dup, SeriesKind::Power).is_err());
    let backwards = write(
        &dir,
        "back.csv",
        "timestamp,power_kw\n2023-05-01T01:00:00Z,1\n2023-05-01T00:00:00Z,2\n",
    );
    assert!(load_series(&backwards, SeriesKind::Power).is_err());
    let share = write(
        &dir,
        "share.csv",
        "timestamp,source,share\n2023-05-01T00:00:00Z,a,0.52\n2023-05-01T00:00:00Z,b,0.5\n",
    );
    let err = load_series(&share, SeriesKind::EnergyMix).unwrap_err();
    assert!(err.to_string().contains("1.02"), "{err}");
    let header = write(&dir, "hdr.csv", "time,temp,rh\n2023-05-01T00:00:00Z,1,50\n");
    assert!(load_series(&header, SeriesKind::Weather).is_err());
    let bad = write(&dir, "bad.csv", "timestamp,power_kw\n2023-05-01T00:00:00Z,lots\n");
    let err = load_series(&bad, SeriesKind::Power).unwrap_err();
    assert_eq!(err.category(), ErrorCategory::InputValidation);
    assert!(err.to_string().contains("line"), "{err}");
}

#[test]
fn missing_file_is_io() {
    let err = load_parameter_db(std::path::Path::new("/nonexistent/params.toml")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert_eq!(err.category(), ErrorCategory::Io);
}

#[test]
fn parameter_db_json_rendering_is_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let shipped = ParamDb::shipped();
    let path = write(&dir, "params.json", &shipped.to_json());
    assert_eq!(load_parameter_db(&path).unwrap(), shipped);
}
