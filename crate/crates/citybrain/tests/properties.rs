mod common;

use citybrain::report::{bundle, emit_report, parse_structured, ReportFormat};
use citybrain::scenario_file::{parse_scenario, serialize_scenario};
use citybrain_core::{run, EventLog};
use common::{random_scenario, GenOptions};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scenario_documents_round_trip(seed in any::<u64>()) {
        let s = random_scenario(seed, GenOptions::FULL);
        let text = serialize_scenario(&s);
        prop_assert_eq!(parse_scenario(&text).unwrap(), s);
    }

    #[test]
    fn log_text_round_trips(seed in any::<u64>()) {
        let s = random_scenario(seed, GenOptions::FULL);
        let log = run(&s, seed).unwrap();
        prop_assert_eq!(EventLog::parse_text(&log.to_text()).unwrap(), log);
    }

    #[test]
    fn structured_reports_round_trip(seed in any::<u64>()) {
        let s = random_scenario(seed, GenOptions::FULL);
        let log = run(&s, seed).unwrap();
        let b = bundle(&s, &log, &s.scale, Some(seed)).unwrap();
        prop_assert_eq!(parse_structured(&emit_report(&b, ReportFormat::Structured)).unwrap(), b);
    }

    /// Scoring depends on the multiset of records, not their order.
    #[test]
    fn report_ignores_record_order(seed in any::<u64>(), rot in 0usize..1000) {
        let s = random_scenario(seed, GenOptions::FULL);
        let log = run(&s, seed).unwrap();
        let mut records = log.records().to_vec();
        if !records.is_empty() {
            let k = rot % records.len();
            records.rotate_left(k);
            records.reverse();
        }
        let shuffled = EventLog::from_records(records);
        let a = bundle(&s, &log, &s.scale, None).unwrap().city_iq_report;
        let b = bundle(&s, &shuffled, &s.scale, None).unwrap().city_iq_report;
        prop_assert_eq!(a, b);
    }

    /// Scaling every reference latency by one factor keeps the ranking of
    /// categories by response speed.
    #[test]
    fn response_speed_ranking_is_scale_free(seed in any::<u64>(), factor in 0.1f64..10.0) {
        let mut s = random_scenario(seed, GenOptions::FULL);
        s.scale.reference_latency.clear();
        let log = run(&s, seed).unwrap();
        let speeds = |f: f64| {
            let mut p = s.scale.clone();
            for cat in s.scale.registry.members() {
                p.reference_latency.insert(cat, f);
            }
            bundle(&s, &log, &p, None).unwrap().city_iq_report.arc_indexes
                .iter().map(|a| a.response_speed.value).collect::<Vec<f64>>()
        };
        let base = speeds(1.0);
        let scaled = speeds(factor);
        for i in 0..base.len() {
            for j in 0..base.len() {
                if base[i] < base[j] {
                    prop_assert!(scaled[i] <= scaled[j]);
                }
            }
        }
    }
}
