//! Scenario, scheduling and trade-off analyses built on the footprint models.

pub mod compare;
pub mod ranking;
pub mod ratio_map;
pub mod scenario;

pub use compare::{compare_series, spearman, MonthlyMean, SeriesComparison};
pub use ranking::{rank_start_times, CandidateScore, StartTimeRanking};
pub use ratio_map::{
    embodied_operational_ratio_map, ratio_map_from_totals, FixedTerms, RatioMap, RatioMapSpec,
};
pub use scenario::{
    baseline_totals, run_scenario, run_scenarios, Baseline, MixOverride, Scenario,
    ScenarioComparison, ScenarioDeltas, ScenarioOutcome, ScenarioTotals,
};
