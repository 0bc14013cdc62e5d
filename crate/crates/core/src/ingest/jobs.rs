//! Job logs and the TDP occupancy model that turns them into a power trace.

use std::io::Read;
use std::path::Path;

use chrono::{DateTime, TimeDelta, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operational::PowerTrace;
use crate::series::{Grid, TimeSeries};

pub const JOB_HEADER: [&str; 4] = ["job_id", "start", "end", "nodes"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: String,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub nodes_used: u32,
}

/// Per-node TDP in kW; idle nodes draw `idle_fraction` of it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodePowerModel {
    pub tdp_per_node_kw: f64,
    pub idle_fraction: f64,
}

impl NodePowerModel {
    pub fn new(tdp_per_node_kw: f64, idle_fraction: f64) -> Result<Self> {
        if !(tdp_per_node_kw.is_finite() && tdp_per_node_kw > 0.0) {
            return Err(Error::Validation(format!(
                "tdp_per_node must be > 0 kW, got {tdp_per_node_kw}"
            )));
        }
        if !(0.0..=1.0).contains(&idle_fraction) {
            return Err(Error::Validation(format!(
                "idle_fraction must lie in [0, 1], got {idle_fraction}"
            )));
        }
        Ok(NodePowerModel {
            tdp_per_node_kw,
            idle_fraction,
        })
    }
}

pub fn read_jobs<R: Read>(reader: R, name: &str) -> Result<Vec<JobRecord>> {
    #[derive(Deserialize)]
    struct Raw {
        job_id: String,
        start: String,
        end: String,
        nodes: u32,
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::parse(name, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != JOB_HEADER {
        return Err(Error::parse(
            name,
            format!("expected header '{}', found '{}'", JOB_HEADER.join(","), header.join(",")),
        ));
    }
    let mut jobs = Vec::new();
    for rec in rdr.deserialize::<Raw>() {
        let raw = rec.map_err(|e| Error::parse(name, e.to_string()))?;
        let at = |field: &str, text: &str| {
            super::series_csv::parse_timestamp(text)
                .map_err(|m| Error::parse(name, format!("job '{}' field '{field}': {m}", raw.job_id)))
        };
        let start = at("start", &raw.start)?;
        let end = at("end", &raw.end)?;
        if end <= start {
            return Err(Error::parse(
                name,
                format!("job '{}' ends before it starts", raw.job_id),
            ));
        }
        if raw.nodes == 0 {
            return Err(Error::parse(name, format!("job '{}' uses zero nodes", raw.job_id)));
        }
        jobs.push(JobRecord {
            job_id: raw.job_id,
            start,
            end,
            nodes_used: raw.nodes,
        });
    }
    Ok(jobs)
}

pub fn load_jobs(path: &Path) -> Result<Vec<JobRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_jobs(f, &path.display().to_string())
}

fn floor_to(t: DateTime<Utc>, step_s: i64) -> DateTime<Utc> {
    let s = t.timestamp().div_euclid(step_s) * step_s;
    DateTime::from_timestamp(s, 0).expect("in range")
}

/// Smallest epoch-aligned grid of `step` covering every job.
pub fn job_window(jobs: &[JobRecord], step: TimeDelta) -> Option<Grid> {
    let step_s = step.num_seconds();
    if step_s <= 0 {
        return None;
    }
    let start = floor_to(jobs.iter().map(|j| j.start).min()?, step_s);
    let end = jobs.iter().map(|j| j.end).max()?;
    let span = (end - start).num_seconds();
    let len = (span + step_s - 1) / step_s;
    Some(Grid {
        start,
        step,
        len: len as usize,
    })
}

/// Time-weighted busy node count per step of `grid`. Jobs are clipped to the grid.
pub fn busy_nodes(jobs: &[JobRecord], total_nodes: u32, grid: &Grid) -> Result<Vec<f64>> {
    let step_s = grid.step.num_seconds();
    if step_s <= 0 {
        return Err(Error::Validation("step must be positive".into()));
    }
    let mut busy = vec![0.0; grid.len];
    let grid_start = grid.start.timestamp();
    let grid_end = grid.end().timestamp();
    for j in jobs {
        if j.nodes_used > total_nodes {
            return Err(Error::Validation(format!(
                "job '{}' uses {} nodes but the system has {total_nodes}",
                j.job_id, j.nodes_used
            )));
        }
        let s = j.start.timestamp().max(grid_start);
        let e = j.end.timestamp().min(grid_end);
        if e <= s {
            continue;
        }
        let first = ((s - grid_start) / step_s) as usize;
        let last = ((e - 1 - grid_start) / step_s) as usize;
        for (k, slot) in busy.iter_mut().enumerate().take(last + 1).skip(first) {
            let ks = grid_start + k as i64 * step_s;
            let overlap = e.min(ks + step_s) - s.max(ks);
            *slot += f64::from(j.nodes_used) * overlap as f64 / step_s as f64;
        }
    }
    let limit = f64::from(total_nodes) * (1.0 + 1e-12);
    if let Some((k, b)) = busy.iter().enumerate().find(|(_, b)| **b > limit) {
        return Err(Error::Validation(format!(
            "{b} nodes busy on average in the step starting {}, more than the {total_nodes} available",
            grid.timestamp(k)
        )));
    }
    Ok(busy)
}

/// IT power from node occupancy: busy nodes draw full TDP, idle nodes draw
/// `idle_fraction` of it.
pub fn utilization_to_power(
    jobs: &[JobRecord],
    total_nodes: u32,
    model: &NodePowerModel,
    grid: &Grid,
) -> Result<PowerTrace> {
    let busy = busy_nodes(jobs, total_nodes, grid)?;
    let total = f64::from(total_nodes);
    let tdp = model.tdp_per_node_kw;
    let power = busy
        .into_iter()
        .map(|b| b * tdp + (total - b) * model.idle_fraction * tdp)
        .collect();
    PowerTrace::new(TimeSeries::new(grid.start, grid.step, power)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn t(m: i64) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2023, 3, 1, 0, 0, 0).unwrap() + TimeDelta::minutes(m)
    }

    fn job(id: &str, s: i64, e: i64, n: u32) -> JobRecord {
        JobRecord {
            job_id: id.into(),
            start: t(s),
            end: t(e),
            nodes_used: n,
        }
    }

    fn hourly(len: usize) -> Grid {
        Grid {
            start: t(0),
            step: TimeDelta::hours(1),
            len,
        }
    }

    #[test]
    fn no_jobs_no_idle_power() {
        let m = NodePowerModel::new(2.0, 0.0).unwrap();
        let p = utilization_to_power(&[], 100, &m, &hourly(4)).unwrap();
        assert!(p.series().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn full_machine_for_one_step() {
        let m = NodePowerModel::new(2.0, 0.0).unwrap();
        let p = utilization_to_power(&[job("a", 60, 120, 100)], 100, &m, &hourly(3)).unwrap();
        assert_eq!(p.series().values(), &[0.0, 200.0, 0.0]);
    }

    #[test]
    fn half_step_job_is_half_weighted() {
        let m = NodePowerModel::new(2.0, 0.0).unwrap();
        let p = utilization_to_power(&[job("a", 15, 45, 10)], 100, &m, &hourly(1)).unwrap();
        assert_eq!(p.series().values(), &[10.0]);
    }

    #[test]
    fn idle_fraction_applies_to_free_nodes() {
        let m = NodePowerModel::new(1.0, 0.25).unwrap();
        let p = utilization_to_power(&[job("a", 0, 60, 60)], 100, &m, &hourly(1)).unwrap();
        assert_eq!(p.series().values(), &[60.0 + 40.0 * 0.25]);
    }

    #[test]
    fn oversize_job_rejected() {
        let m = NodePowerModel::new(1.0, 0.0).unwrap();
        assert!(matches!(
            utilization_to_power(&[job("a", 0, 60, 101)], 100, &m, &hourly(1)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn overcommitted_log_rejected() {
        let m = NodePowerModel::new(1.0, 0.0).unwrap();
        let jobs = [job("a", 0, 60, 80), job("b", 0, 60, 30)];
        assert!(utilization_to_power(&jobs, 100, &m, &hourly(1)).is_err());
    }

    #[test]
    fn window_covers_jobs() {
        let g = job_window(&[job("a", 30, 95, 1), job("b", 200, 201, 1)], TimeDelta::hours(1)).unwrap();
        assert_eq!(g.start, t(0));
        assert_eq!(g.len, 4);
        assert!(job_window(&[], TimeDelta::hours(1)).is_none());
    }

    #[test]
    fn job_csv() {
        let text = "job_id,start,end,nodes\nj1,2023-03-01T00:00:00Z,2023-03-01T02:00:00Z,4\n";
        let jobs = read_jobs(text.as_bytes(), "jobs").unwrap();
        assert_eq!(jobs[0].nodes_used, 4);
        let bad = "job_id,start,end,nodes\nj1,2023-03-01T02:00:00Z,2023-03-01T01:00:00Z,4\n";
        assert!(read_jobs(bad.as_bytes(), "jobs").is_err());
    }
}
