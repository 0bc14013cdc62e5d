//! Ranking candidate job start times by water and by carbon.

use std::cmp::Ordering;

use chrono::{DateTime, TimeDelta, Utc};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operational::{IntensitySeries, PowerTrace};

/// Relative resolution below which two window totals count as a tie.
pub const TIE_RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateScore {
    pub start: DateTime<Utc>,
    pub energy_kwh: f64,
    pub water_l: f64,
    pub carbon_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartTimeRanking {
    pub duration_h: f64,
    /// Scores in the order the candidates were given.
    pub candidates: Vec<CandidateScore>,
    /// Indices into `candidates`, best first.
    pub by_water: Vec<usize>,
    pub by_carbon: Vec<usize>,
}

impl StartTimeRanking {
    pub fn best_for_water(&self) -> Option<&CandidateScore> {
        self.by_water.first().map(|&i| &self.candidates[i])
    }

    pub fn best_for_carbon(&self) -> Option<&CandidateScore> {
        self.by_carbon.first().map(|&i| &self.candidates[i])
    }

    /// True when the water-optimal and carbon-optimal starts differ.
    pub fn optima_diverge(&self) -> bool {
        match (self.best_for_water(), self.best_for_carbon()) {
            (Some(w), Some(c)) => w.start != c.start,
            _ => false,
        }
    }
}

fn secs(d: TimeDelta) -> i64 {
    d.num_seconds()
}

/// Exact integral of power × intensity over `[start, start + duration)`.
///
/// The power profile is indexed from the job start; the intensity series
/// from its own grid. Both are piecewise constant, so the window splits into
/// segments at every boundary of either.
fn score_window(
    start: DateTime<Utc>,
    duration: TimeDelta,
    profile: Option<&PowerTrace>,
    intensity: &IntensitySeries,
) -> Result<CandidateScore> {
    let end = start + duration;
    if start < intensity.start() || end > intensity.end() {
        return Err(Error::Coverage(format!(
            "window {} .. {} is not covered by the intensity series ({} .. {})",
            start,
            end,
            intensity.start(),
            intensity.end()
        )));
    }
    let i_step = secs(intensity.step());
    let i_origin = intensity.start().timestamp();
    let p_step = profile.map(|p| secs(p.series().step()));
    let a = start.timestamp();
    let b = end.timestamp();

    let (mut energy, mut water, mut carbon) = (0.0, 0.0, 0.0);
    let mut cursor = a;
    while cursor < b {
        let ii = ((cursor - i_origin) / i_step) as usize;
        let mut next = (i_origin + (ii as i64 + 1) * i_step).min(b);
        let kw = match (profile, p_step) {
            (Some(p), Some(ps)) => {
                let pi = ((cursor - a) / ps) as usize;
                next = next.min(a + (pi as i64 + 1) * ps);
                p.series().values()[pi]
            }
            _ => 1.0,
        };
        let s = &intensity.values()[ii];
        let e = kw * (next - cursor) as f64 / 3600.0;
        energy += e;
        water += e * s.wi;
        carbon += e * s.pue * s.ci;
        cursor = next;
    }
    Ok(CandidateScore {
        start,
        energy_kwh: energy,
        water_l: water,
        carbon_g: carbon,
    })
}

fn order_by(scores: &[CandidateScore], key: impl Fn(&CandidateScore) -> f64) -> Vec<usize> {
    let scale = scores.iter().map(|s| key(s).abs()).fold(0.0_f64, f64::max);
    let quantum = if scale > 0.0 {
        scale * TIE_RELATIVE_TOLERANCE
    } else {
        1.0
    };
    let q = |s: &CandidateScore| (key(s) / quantum).round();
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&x, &y| {
        q(&scores[x])
            .partial_cmp(&q(&scores[y]))
            .unwrap_or(Ordering::Equal)
            .then(scores[x].start.cmp(&scores[y].start))
    });
    idx
}

/// Scores each candidate start over a window of `duration`.
///
/// `profile` gives the job's power draw from its start; without one the job
/// draws a constant 1 kW. Ties are broken by the earlier start.
pub fn rank_start_times(
    candidates: &[DateTime<Utc>],
    duration: TimeDelta,
    profile: Option<&PowerTrace>,
    intensity: &IntensitySeries,
) -> Result<StartTimeRanking> {
    if duration <= TimeDelta::zero() || duration.subsec_nanos() != 0 {
        return Err(Error::Validation(format!(
            "job duration must be a positive whole number of seconds, got {duration}"
        )));
    }
    if candidates.is_empty() {
        return Err(Error::Validation("no candidate start times given".into()));
    }
    if let Some(p) = profile {
        let covered = p.series().step() * p.series().len() as i32;
        if covered < duration {
            return Err(Error::Validation(format!(
                "power profile covers {covered} but the job runs for {duration}"
            )));
        }
    }
    if let Some(c) = candidates.iter().find(|c| c.timestamp_subsec_nanos() != 0) {
        return Err(Error::Validation(format!(
            "candidate start {c} is not on a whole second"
        )));
    }
    let scores = candidates
        .iter()
        .map(|&c| score_window(c, duration, profile, intensity))
        .collect::<Result<Vec<_>>>()?;
    Ok(StartTimeRanking {
        duration_h: duration.num_seconds() as f64 / 3600.0,
        by_water: order_by(&scores, |s| s.water_l),
        by_carbon: order_by(&scores, |s| s.carbon_g),
        candidates: scores,
    })
}
