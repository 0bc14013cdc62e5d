//! Side-by-side view of water and carbon intensity series.

use chrono::Datelike;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{common_grid, TimeSeries};

pub const CORRELATION_METHOD: &str = "spearman";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonthlyMean {
    pub year: i32,
    pub month: u32,
    pub samples: usize,
    pub wi: f64,
    pub ci: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesComparison {
    pub monthly: Vec<MonthlyMean>,
    /// Monthly means rescaled to [0, 1]; all zeros for a flat series.
    pub wi_normalized: Vec<f64>,
    pub ci_normalized: Vec<f64>,
    /// Rank correlation of the aligned samples; `None` when either series is flat.
    pub correlation: Option<f64>,
    pub method: &'static str,
}

pub fn min_max_normalize(xs: &[f64]) -> Vec<f64> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.0; xs.len()];
    }
    xs.iter().map(|&x| (x - lo) / (hi - lo)).collect()
}

/// Ranks starting at 1; tied values share their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

pub fn compare_series(wi: &TimeSeries<f64>, ci: &TimeSeries<f64>) -> Result<SeriesComparison> {
    let grid = common_grid(&[wi.grid(), ci.grid()])?;
    let wi = wi.resample(&grid)?;
    let ci = ci.resample(&grid)?;
    if wi.is_empty() {
        return Err(Error::Alignment("series do not overlap".into()));
    }

    let mut monthly: Vec<MonthlyMean> = Vec::new();
    for ((t, &w), &c) in wi.iter().zip(ci.values()) {
        let (year, month) = (t.year(), t.month());
        match monthly.last_mut() {
            Some(m) if m.year == year && m.month == month => {
                m.samples += 1;
                m.wi += w;
                m.ci += c;
            }
            _ => monthly.push(MonthlyMean {
                year,
                month,
                samples: 1,
                wi: w,
                ci: c,
            }),
        }
    }
    for m in &mut monthly {
        m.wi /= m.samples as f64;
        m.ci /= m.samples as f64;
    }
    let wi_m: Vec<f64> = monthly.iter().map(|m| m.wi).collect();
    let ci_m: Vec<f64> = monthly.iter().map(|m| m.ci).collect();

    Ok(SeriesComparison {
        wi_normalized: min_max_normalize(&wi_m),
        ci_normalized: min_max_normalize(&ci_m),
        correlation: spearman(wi.values(), ci.values()),
        method: CORRELATION_METHOD,
        monthly,
    })
}
