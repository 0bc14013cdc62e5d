//! Fixed-step time series and grid alignment.
//!
//! A sample at index `i` covers the half-open interval
//! `[start + i*step, start + (i+1)*step)` and holds the interval's average.
//! Resampling to a finer grid is a forward fill.

use chrono::{DateTime, TimeDelta, Utc};

use crate::error::{Error, Result};

/// Longest run of missing samples a loader will forward-fill.
pub const MAX_GAP_STEPS: i64 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    start: DateTime<Utc>,
    step: TimeDelta,
    values: Vec<T>,
}

/// Start, step and length of a regular grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub start: DateTime<Utc>,
    pub step: TimeDelta,
    pub len: usize,
}

impl Grid {
    pub fn end(&self) -> DateTime<Utc> {
        self.timestamp(self.len)
    }

    pub fn timestamp(&self, i: usize) -> DateTime<Utc> {
        self.start + TimeDelta::seconds(self.step.num_seconds() * i as i64)
    }
}

fn step_seconds(step: TimeDelta) -> Result<i64> {
    if step <= TimeDelta::zero() || step.subsec_nanos() != 0 {
        return Err(Error::Validation(format!(
            "series step must be a positive whole number of seconds, got {step}"
        )));
    }
    Ok(step.num_seconds())
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl<T> TimeSeries<T> {
    pub fn new(start: DateTime<Utc>, step: TimeDelta, values: Vec<T>) -> Result<Self> {
        step_seconds(step)?;
        if start.timestamp_subsec_nanos() != 0 {
            return Err(Error::Validation(format!(
                "series start {start} must fall on a whole second"
            )));
        }
        Ok(TimeSeries { start, step, values })
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn step(&self) -> TimeDelta {
        self.step
    }

    /// Step length in hours.
    pub fn step_hours(&self) -> f64 {
        self.step.num_seconds() as f64 / 3600.0
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn grid(&self) -> Grid {
        Grid {
            start: self.start,
            step: self.step,
            len: self.values.len(),
        }
    }

    /// Exclusive end of the covered interval.
    pub fn end(&self) -> DateTime<Utc> {
        self.grid().end()
    }

    pub fn timestamp(&self, i: usize) -> DateTime<Utc> {
        self.grid().timestamp(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (DateTime<Utc>, &T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.timestamp(i), v))
    }

    /// Index of the sample covering `t`, if any.
    pub fn index_at(&self, t: DateTime<Utc>) -> Option<usize> {
        if t < self.start {
            return None;
        }
        let i = ((t - self.start).num_seconds() / self.step.num_seconds()) as usize;
        (i < self.values.len()).then_some(i)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> TimeSeries<U> {
        TimeSeries {
            start: self.start,
            step: self.step,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<TimeSeries<U>> {
        Ok(TimeSeries {
            start: self.start,
            step: self.step,
            values: self.values.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

impl<T: Clone> TimeSeries<T> {
    /// Builds a regular series from strictly increasing timestamped points.
    ///
    /// The step is `step` when given, otherwise the smallest spacing between
    /// points. Every spacing must be a whole multiple of the step; runs of up
    /// to [`MAX_GAP_STEPS`] missing samples are forward-filled.
    pub fn from_points(points: Vec<(DateTime<Utc>, T)>, step: Option<TimeDelta>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Validation("series has no samples".into()));
        };
        let start = first.0;
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Validation(format!(
                    "timestamps must be strictly increasing: {} follows {}",
                    w[1].0, w[0].0
                )));
            }
        }
        let step = match step {
            Some(s) => s,
            None => points
                .windows(2)
                .map(|w| w[1].0 - w[0].0)
                .min()
                .unwrap_or(TimeDelta::hours(1)),
        };
        let step_s = step_seconds(step)?;
        let mut values = Vec::with_capacity(points.len());
        let mut prev: Option<(DateTime<Utc>, T)> = None;
        for (t, v) in points {
            if let Some((pt, pv)) = prev.take() {
                let diff = (t - pt).num_seconds();
                if (t - pt).subsec_nanos() != 0 || diff % step_s != 0 {
                    return Err(Error::Validation(format!(
                        "timestamp {t} is not on the {step_s} s grid started at {start}"
                    )));
                }
                let missing = diff / step_s - 1;
                if missing > MAX_GAP_STEPS {
                    return Err(Error::Validation(format!(
                        "gap of {missing} missing steps before {t} exceeds the {MAX_GAP_STEPS}-step fill limit"
                    )));
                }
                for _ in 0..missing {
                    values.push(pv.clone());
                }
            }
            values.push(v.clone());
            prev = Some((t, v));
        }
        TimeSeries::new(start, step, values)
    }

    /// Forward-fills this series onto `grid`.
    ///
    /// The grid must lie inside this series' span, and its step and offset must
    /// both divide evenly into this series' step.
    pub fn resample(&self, grid: &Grid) -> Result<TimeSeries<T>> {
        let own = step_seconds(self.step)?;
        let target = step_seconds(grid.step)?;
        if own % target != 0 || (grid.start - self.start).num_seconds() % target != 0 {
            return Err(Error::Alignment(format!(
                "cannot resample a {own} s series starting {} onto a {target} s grid starting {}",
                self.start, grid.start
            )));
        }
        if grid.start < self.start || grid.end() > self.end() {
            return Err(Error::Alignment(format!(
                "grid [{}, {}) is not inside series span [{}, {})",
                grid.start,
                grid.end(),
                self.start,
                self.end()
            )));
        }
        let offset = (grid.start - self.start).num_seconds();
        let values = (0..grid.len as i64)
            .map(|i| self.values[((offset + i * target) / own) as usize].clone())
            .collect();
        TimeSeries::new(grid.start, grid.step, values)
    }
}

/// The finest grid on which every input can be represented without interpolation,
/// restricted to the window all inputs cover.
pub fn common_grid(grids: &[Grid]) -> Result<Grid> {
    let Some(first) = grids.first() else {
        return Err(Error::Alignment("no series to align".into()));
    };
    let mut step = 0;
    for g in grids {
        step = gcd(step, step_seconds(g.step)?);
        step = gcd(step, (g.start - first.start).num_seconds());
    }
    let start = grids.iter().map(|g| g.start).max().expect("non-empty");
    let end = grids.iter().map(Grid::end).min().expect("non-empty");
    if end <= start {
        return Err(Error::Alignment(format!(
            "series do not overlap (latest start {start}, earliest end {end})"
        )));
    }
    let len = ((end - start).num_seconds() / step) as usize;
    Ok(Grid {
        start,
        step: TimeDelta::seconds(step),
        len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn t(h: i64) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap() + TimeDelta::hours(h)
    }

    #[test]
    fn from_points_infers_step_and_fills_short_gaps() {
        let s = TimeSeries::from_points(vec![(t(0), 1.0), (t(1), 2.0), (t(4), 3.0)], None).unwrap();
        assert_eq!(s.step(), TimeDelta::hours(1));
        assert_eq!(s.values(), &[1.0, 2.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn long_gap_is_rejected() {
        assert!(TimeSeries::from_points(vec![(t(0), 1.0), (t(7), 2.0)], Some(TimeDelta::hours(1))).is_ok());
        assert!(TimeSeries::from_points(vec![(t(0), 1.0), (t(8), 2.0)], Some(TimeDelta::hours(1))).is_err());
    }

    #[test]
    fn duplicate_or_decreasing_timestamps_rejected() {
        assert!(TimeSeries::from_points(vec![(t(0), 1.0), (t(0), 2.0)], None).is_err());
        assert!(TimeSeries::from_points(vec![(t(1), 1.0), (t(0), 2.0)], None).is_err());
    }

    #[test]
    fn off_grid_timestamp_rejected() {
        let half = t(1) + TimeDelta::minutes(30);
        assert!(TimeSeries::from_points(vec![(t(0), 1.0), (t(1), 1.0), (half, 2.0)], Some(TimeDelta::hours(1))).is_err());
    }

    #[test]
    fn common_grid_uses_gcd_and_overlap() {
        let a = TimeSeries::new(t(0), TimeDelta::hours(1), vec![0; 24]).unwrap();
        let b = TimeSeries::new(t(2) + TimeDelta::minutes(30), TimeDelta::minutes(90), vec![0; 4]).unwrap();
        let g = common_grid(&[a.grid(), b.grid()]).unwrap();
        assert_eq!(g.step, TimeDelta::minutes(30));
        assert_eq!(g.start, b.start());
        assert_eq!(g.end(), b.end());
    }

    #[test]
    fn disjoint_series_fail_alignment() {
        let a = TimeSeries::new(t(0), TimeDelta::hours(1), vec![0; 2]).unwrap();
        let b = TimeSeries::new(t(5), TimeDelta::hours(1), vec![0; 2]).unwrap();
        assert!(matches!(common_grid(&[a.grid(), b.grid()]), Err(Error::Alignment(_))));
    }

    #[test]
    fn resample_forward_fills() {
        let a = TimeSeries::new(t(0), TimeDelta::hours(1), vec![1, 2, 3]).unwrap();
        let g = Grid {
            start: t(1),
            step: TimeDelta::minutes(30),
            len: 4,
        };
        assert_eq!(a.resample(&g).unwrap().values(), &[2, 2, 3, 3]);
    }
}
