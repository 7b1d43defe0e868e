use std::collections::BTreeSet;

use citybrain_core::reflex::classify_arc;
use citybrain_core::{
    ArcCategory, BigSnsGraph, CenterPolicy, Channel, ChannelId, DelayModel, EventKind, EventLog, FailureTarget, Neuron,
    NeuronId, NeuronKind, Outcome, ReflexArcSpec, SimKernel, SimTime, Stimulus, Window,
};
use proptest::prelude::*;

#[derive(Clone, Debug)]
struct Plan {
    receptors: Vec<NeuronKind>,
    effectors: Vec<NeuronKind>,
    delays: [DelayModel; 3],
    loss: [f64; 2],
    threshold: f64,
    stimuli: Vec<(u32, f64)>,
    center_down: Option<(u32, u32)>,
    horizon: u32,
}

fn delay() -> impl Strategy<Value = DelayModel> {
    prop_oneof![
        (0.0f64..3.0).prop_map(DelayModel::Constant),
        (0.0f64..2.0, 0.0f64..2.0).prop_map(|(lo, w)| DelayModel::Uniform { lo, hi: lo + w }),
        (0.0f64..2.0).prop_map(|mean| DelayModel::Exponential { mean }),
    ]
}

fn plan() -> impl Strategy<Value = Plan> {
    let receptor = prop::sample::select(vec![NeuronKind::Sensor, NeuronKind::Human]);
    let effector = prop::sample::select(vec![NeuronKind::SmartDevice, NeuronKind::Human, NeuronKind::SmartProgram]);
    (
        receptor,
        effector,
        1usize..4,
        1usize..4,
        [delay(), delay(), delay()],
        [0.0f64..0.6, 0.0f64..0.6],
        0.0f64..1.0,
        prop::collection::vec((0u32..50_000, 0.0f64..1.0), 0..25),
        prop::option::of((0u32..60_000, 0u32..20_000)),
        50_000u32..100_000,
    )
        .prop_map(|(rk, ek, nr, ne, delays, loss, threshold, stimuli, center_down, horizon)| Plan {
            receptors: vec![rk; nr],
            effectors: vec![ek; ne],
            delays,
            loss,
            threshold,
            stimuli,
            center_down,
            horizon,
        })
}

fn ms(t: u32) -> SimTime {
    SimTime::from_ticks(u64::from(t) * 1_000_000)
}

fn simulate(p: &Plan, seed: u64) -> EventLog {
    let mut g = BigSnsGraph::new();
    let mut rx = BTreeSet::new();
    let mut tx = BTreeSet::new();
    for (i, k) in p.receptors.iter().enumerate() {
        rx.insert(g.register_neuron(Neuron::new(format!("r{i}"), *k)).unwrap());
    }
    for (i, k) in p.effectors.iter().enumerate() {
        tx.insert(g.register_neuron(Neuron::new(format!("e{i}"), *k)).unwrap());
    }
    let horizon = ms(p.horizon);
    let mut k = SimKernel::new(g, seed, horizon);
    k.add_channel(Channel::new("up", p.delays[0]).with_failure_probability(p.loss[0])).unwrap();
    k.add_channel(Channel::new("down", p.delays[1]).with_failure_probability(p.loss[1])).unwrap();
    k.add_arc(ReflexArcSpec {
        arc_id: "arc".into(),
        category: ArcCategory::new("Security"),
        receptors: rx,
        afferent: ChannelId::new("up"),
        center_policy: CenterPolicy::new(p.threshold, p.delays[2]),
        efferent: ChannelId::new("down"),
        effectors: tx,
    })
    .unwrap();
    if let Some((start, len)) = p.center_down {
        let start = ms(start).min(horizon);
        let end = (start + ms(len)).min(horizon);
        k.inject_failure(FailureTarget::Center, Window::new(start, end)).unwrap();
    }
    for (i, (t, x)) in p.stimuli.iter().enumerate() {
        k.fire(Stimulus::new(format!("s{i:02}"), "arc", ms(*t), *x)).unwrap();
    }
    k.run();
    k.into_parts().1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn every_message_resolves_once(p in plan(), seed in any::<u64>()) {
        prop_assert!(simulate(&p, seed).messages_balanced());
    }

    #[test]
    fn one_trace_per_firing(p in plan(), seed in any::<u64>()) {
        let log = simulate(&p, seed);
        let traces = log.traces();
        prop_assert_eq!(traces.len(), p.stimuli.len());
        for t in &traces {
            prop_assert!(t.is_well_formed(), "{:?}", t);
        }
    }

    #[test]
    fn log_time_never_decreases(p in plan(), seed in any::<u64>()) {
        let log = simulate(&p, seed);
        for w in log.records().windows(2) {
            prop_assert!(w[0].time <= w[1].time);
            prop_assert!(w[0].seq < w[1].seq);
        }
    }

    #[test]
    fn same_seed_same_log(p in plan(), seed in any::<u64>()) {
        prop_assert_eq!(simulate(&p, seed), simulate(&p, seed));
    }

    #[test]
    fn weak_stimuli_never_reach_effectors(p in plan(), seed in any::<u64>()) {
        let log = simulate(&p, seed);
        for (i, (_, x)) in p.stimuli.iter().enumerate() {
            if *x >= p.threshold {
                continue;
            }
            let id = format!("s{i:02}");
            let efferent = format!("{id}/efferent");
            prop_assert!(!log.records().iter().any(|r| r.detail("msg") == Some(efferent.as_str())));
            prop_assert!(!log.records().iter().any(|r| r.kind == EventKind::ActuationDone && r.subjects[1] == id));
        }
        for t in log.traces() {
            if t.outcome == Outcome::Suppressed {
                let x = p.stimuli[t.stimulus_id[1..].parse::<usize>().unwrap()].1;
                prop_assert!(x < p.threshold);
            }
        }
    }

    /// With lossless channels, no outages and room to finish, every strong
    /// stimulus completes.
    #[test]
    fn lossless_strong_stimuli_complete(mut p in plan(), seed in any::<u64>()) {
        p.loss = [0.0, 0.0];
        p.center_down = None;
        p.horizon = u32::MAX / 2;
        let log = simulate(&p, seed);
        for t in log.traces() {
            let x = p.stimuli[t.stimulus_id[1..].parse::<usize>().unwrap()].1;
            let expected = if x >= p.threshold { Outcome::Completed } else { Outcome::Suppressed };
            prop_assert_eq!(t.outcome, expected);
        }
        prop_assert_eq!(log.count(EventKind::MessageDropped), 0);
    }

    #[test]
    fn arc_type_ignores_identifiers(
        rk in prop::sample::select(NeuronKind::ALL.to_vec()),
        ek in prop::sample::select(NeuronKind::ALL.to_vec()),
        prefix in "[a-z]{1,6}",
    ) {
        let build = |tag: &str| {
            let mut g = BigSnsGraph::new();
            let r = g.register_neuron(Neuron::new(format!("{tag}-r"), rk)).unwrap();
            let e = g.register_neuron(Neuron::new(format!("{tag}-e"), ek)).unwrap();
            let spec = ReflexArcSpec {
                arc_id: format!("{tag}-arc"),
                category: ArcCategory::new("Traffic"),
                receptors: BTreeSet::from([r]),
                afferent: ChannelId::new("a"),
                center_policy: CenterPolicy::new(0.5, DelayModel::Constant(0.0)),
                efferent: ChannelId::new("b"),
                effectors: BTreeSet::from([e]),
            };
            classify_arc(&spec, &g).ok()
        };
        prop_assert_eq!(build("x"), build(&prefix));
    }
}

#[test]
fn neuron_ids_are_opaque() {
    let id = NeuronId::new("Ünïcode / id");
    assert_eq!(id.as_str(), "Ünïcode / id");
}
