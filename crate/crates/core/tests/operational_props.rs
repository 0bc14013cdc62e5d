use std::collections::BTreeMap;

use chrono::{TimeDelta, TimeZone, Utc};
use hpcwater_core::operational::{
    build_intensity_series, ewf_of_mix, operational_footprint, operational_footprint_aligned,
    wue_at, EnergyMixSample, FactorTable, IntensityInputs, IntensitySample, PowerTrace,
    PueProfile, SourceFactors, WeatherSample, WueCurve,
};
use hpcwater_core::scarcity::{adjust_intensity_split, adjust_intensity_uniform};
use hpcwater_core::series::TimeSeries;
use hpcwater_core::units::WaterVolume;
use hpcwater_core::withdrawal::{withdrawal, WithdrawalParams};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn series<T>(step_min: i64, values: Vec<T>) -> TimeSeries<T> {
    let t0 = Utc.with_ymd_and_hms(2024, 6, 1, 0, 0, 0).unwrap();
    TimeSeries::new(t0, TimeDelta::minutes(step_min), values).unwrap()
}

fn intensity_sample() -> impl Strategy<Value = IntensitySample> {
    (0.05f64..3.0, 0.0f64..20.0, 1.0f64..2.0, 0.0f64..900.0)
        .prop_map(|(wue, ewf, pue, ci)| IntensitySample::new(wue, ewf, pue, ci).unwrap())
}

fn factors(ewfs: &[f64]) -> FactorTable {
    ewfs.iter()
        .enumerate()
        .map(|(i, &e)| {
            let f = SourceFactors::new(format!("s{i}"), e, 100.0 * i as f64);
            (f.source.clone(), f)
        })
        .collect()
}

proptest! {
    #[test]
    fn totals_are_additive_and_linear(
        rows in prop::collection::vec((0.0f64..5000.0, intensity_sample()), 1..100),
        k in 0.01f64..100.0,
        pow2 in -8i32..8,
    ) {
        let (power, samples): (Vec<f64>, Vec<IntensitySample>) = rows.into_iter().unzip();
        let p = PowerTrace::new(series(60, power)).unwrap();
        let s = series(60, samples);
        let op = operational_footprint(&p, &s).unwrap();
        prop_assert!(rel(op.total.liters(), op.direct.liters() + op.indirect.liters()) <= 1e-9);
        let by_wi: f64 = op.series.iter().zip(s.values()).map(|(st, x)| st.energy_kwh * x.wi).sum();
        prop_assert!(rel(op.total.liters(), by_wi) <= 1e-9);
        let direct: f64 = op.series.iter().map(|st| st.direct_l).sum();
        let indirect: f64 = op.series.iter().map(|st| st.indirect_l).sum();
        prop_assert!(rel(op.direct.liters(), direct) <= 1e-9);
        prop_assert!(rel(op.indirect.liters(), indirect) <= 1e-9);

        let exact = 2f64.powi(pow2);
        let scaled = operational_footprint(&p.scaled(exact).unwrap(), &s).unwrap();
        prop_assert_eq!(scaled.direct.liters(), exact * op.direct.liters());
        prop_assert_eq!(scaled.indirect.liters(), exact * op.indirect.liters());
        let scaled = operational_footprint(&p.scaled(k).unwrap(), &s).unwrap();
        prop_assert!(rel(scaled.total.liters(), k * op.total.liters()) <= 1e-12);
    }

    #[test]
    fn mix_ewf_is_convex(
        ewfs in prop::collection::vec(0.0f64..20.0, 1..6),
        weights in prop::collection::vec(0.001f64..1.0, 6),
    ) {
        let table = factors(&ewfs);
        let n = ewfs.len();
        let sum: f64 = weights[..n].iter().sum();
        let mut shares: BTreeMap<String, f64> =
            (0..n).map(|i| (format!("s{i}"), weights[i] / sum)).collect();
        // absorb rounding into the first share so the sum is within tolerance
        let drift: f64 = 1.0 - shares.values().sum::<f64>();
        *shares.get_mut("s0").unwrap() += drift;
        let mix = EnergyMixSample::new(shares).unwrap();
        let e = ewf_of_mix(&mix, &table).unwrap();
        let lo = ewfs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ewfs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(e >= lo - 1e-12 && e <= hi + 1e-12);
    }

    #[test]
    fn wue_never_drops_with_warmer_wet_bulb(
        steps in prop::collection::vec((0.5f64..8.0, 0.0f64..0.7), 1..8),
        t1 in 0.0f64..40.0, t2 in 0.0f64..40.0, rh in 10.0f64..95.0,
    ) {
        let mut x = -5.0;
        let mut y = 0.05;
        let knots: Vec<(f64, f64)> = steps.iter().map(|&(dx, dy)| { x += dx; y += dy; (x, y) }).collect();
        let curve = WueCurve::new(knots).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = wue_at(&curve, &WeatherSample::new(lo, rh).unwrap()).unwrap();
        let b = wue_at(&curve, &WeatherSample::new(hi, rh).unwrap()).unwrap();
        prop_assert!(b >= a);
    }

    #[test]
    fn scarcity_is_homogeneous_and_reduces(
        d in 0.0f64..5.0, i in 0.0f64..40.0, w in 0.1f64..100.0, k in 0.0f64..50.0,
    ) {
        let a = adjust_intensity_uniform(k * (d + i), w).unwrap();
        let b = k * adjust_intensity_uniform(d + i, w).unwrap();
        prop_assert!(rel(a, b) <= 1e-12);
        prop_assert_eq!(adjust_intensity_split(d, i, w, w).unwrap(), adjust_intensity_uniform(d + i, w).unwrap());
    }

    #[test]
    fn withdrawal_properties(
        consumption in 0.0f64..1e6,
        discharge in 0.0f64..1e6,
        lk in 0.0f64..3.0, pj in 0.0f64..3.0,
        rho1 in 0.0f64..=1.0, rho2 in 0.0f64..=1.0,
        beta in 0.0f64..=1.0, sp in 0.0f64..=1.0, sn in 0.0f64..=1.0,
        more in 0.0f64..1e5,
    ) {
        let c = WaterVolume::from_liters(consumption).unwrap();
        let neutral = WithdrawalParams {
            discharge_actual: WaterVolume::from_liters(discharge).unwrap(),
            ..WithdrawalParams::default()
        };
        let w = withdrawal(c, &neutral).unwrap();
        prop_assert!((w.gross.liters() - discharge - consumption).abs() <= 1e-9 * (1.0 + consumption + discharge));
        prop_assert_eq!(w.net, w.gross);

        let params = |rho: f64| WithdrawalParams {
            discharge_actual: WaterVolume::from_liters(discharge).unwrap(),
            outfall_factor: lk,
            pollutant_factor: pj,
            reuse_rate: rho,
            beta_potable: beta,
            beta_nonpotable: 1.0 - beta,
            scarcity_potable: sp,
            scarcity_nonpotable: sn,
        };
        let (lo, hi) = if rho1 <= rho2 { (rho1, rho2) } else { (rho2, rho1) };
        let a = withdrawal(c, &params(lo)).unwrap();
        let b = withdrawal(c, &params(hi)).unwrap();
        prop_assert!(b.net.liters() <= a.net.liters());
        let bigger = withdrawal(WaterVolume::from_liters(consumption + more).unwrap(), &params(lo)).unwrap();
        prop_assert!(bigger.net.liters() >= a.net.liters());
        prop_assert!(rel(a.potable.liters() + a.nonpotable.liters(), a.net.liters()) <= 1e-12
            || a.net.liters() == 0.0);
    }
}

#[test]
fn diurnal_weather_gives_diurnal_wue() {
    let n = 24 * 4;
    let weather = series(
        60,
        (0..n)
            .map(|h| {
                let phase = 2.0 * std::f64::consts::PI * h as f64 / 24.0;
                WeatherSample::new(20.0 + 8.0 * phase.sin(), 60.0).unwrap()
            })
            .collect(),
    );
    let mix = series(60, vec![EnergyMixSample::single("s0"); n]);
    let curve = WueCurve::new(vec![(5.0, 0.1), (25.0, 2.1)]).unwrap();
    let s = build_intensity_series(&IntensityInputs {
        weather: &weather,
        mix: &mix,
        pue: &PueProfile::Constant(1.1),
        curve: &curve,
        factors: &factors(&[1.5]),
        clamp_weather: false,
    })
    .unwrap();
    for h in 0..n - 24 {
        assert!((s.values()[h].wue - s.values()[h + 24].wue).abs() < 1e-12);
    }
    assert!(s.values()[6].wue > s.values()[18].wue);
}

#[test]
fn mixed_steps_are_aligned_before_integrating() {
    // 30-minute power against hourly intensity
    let power = PowerTrace::new(series(30, vec![100.0, 300.0, 200.0, 200.0])).unwrap();
    let s = series(
        60,
        vec![
            IntensitySample::new(1.0, 0.0, 1.0, 10.0).unwrap(),
            IntensitySample::new(2.0, 0.0, 1.0, 10.0).unwrap(),
        ],
    );
    assert!(operational_footprint(&power, &s).is_err());
    let op = operational_footprint_aligned(&power, &s).unwrap();
    assert!((op.energy_kwh - 400.0).abs() < 1e-12);
    assert!((op.direct.liters() - (200.0 + 400.0)).abs() < 1e-12);
}
