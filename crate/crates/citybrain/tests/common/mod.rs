//! Seeded random scenario generator shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use citybrain_core::iq::STANDARD_CATEGORIES;
use citybrain_core::reflex::{EffectorKind, ReceptorKind};
use citybrain_core::rng::DrawStream;
use citybrain_core::scenario::{FailureSpec, PostSpec};
use citybrain_core::{
    ArcCategory, CenterAction, CenterPolicy, Channel, ChannelId, DelayModel, FailureTarget, FollowEdge, Neuron,
    NeuronId, NeuronKind, NoDataPolicy, PayloadKind, ReflexArcSpec, Scenario, SimTime, Stimulus, Window,
};
use citybrain_core::graph::CensusCategory;

pub struct Gen(DrawStream);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(DrawStream::from_seed(seed))
    }

    pub fn unit(&mut self) -> f64 {
        self.0.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// A time with millisecond resolution.
    pub fn time(&mut self, hi: f64) -> SimTime {
        SimTime::from_units((self.range(0.0, hi) * 1000.0).floor() / 1000.0).unwrap()
    }

    pub fn delay(&mut self, max: f64) -> DelayModel {
        match self.below(3) {
            0 => DelayModel::Constant(self.range(0.0, max)),
            1 => {
                let a = self.range(0.0, max);
                let b = self.range(0.0, max);
                DelayModel::Uniform { lo: a.min(b), hi: a.max(b) }
            }
            _ => DelayModel::Exponential { mean: self.range(0.0, max) },
        }
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GenOptions {
    /// Scheduled failure windows on the center, channels and neurons.
    pub failures: bool,
    /// Static outage windows on channels.
    pub outages: bool,
    /// Horizon far beyond every stimulus, so nothing is cut off.
    pub generous_horizon: bool,
}

impl GenOptions {
    pub const FULL: GenOptions = GenOptions { failures: true, outages: true, generous_horizon: false };
    pub const TIMING_FREE: GenOptions = GenOptions { failures: false, outages: false, generous_horizon: true };
}

fn receptor_ok(kind: NeuronKind) -> bool {
    ReceptorKind::of(kind).is_some()
}

fn effector_ok(kind: NeuronKind) -> bool {
    EffectorKind::of(kind).is_some()
}

/// A valid random scenario.
pub fn random_scenario(seed: u64, opts: GenOptions) -> Scenario {
    let mut g = Gen::new(seed);
    let active_span: f64 = 100.0;
    let horizon = if opts.generous_horizon { 1.0e6 } else { g.range(20.0, 200.0) };
    let mut s = Scenario::new(format!("fuzz-{seed}"), SimTime::from_units(horizon).unwrap());

    let n = 2 + g.below(18);
    for i in 0..n {
        let kind = *g.pick(&NeuronKind::ALL);
        let mut neuron = Neuron::new(format!("n{i:02}"), kind);
        if kind == NeuronKind::Human && g.chance(0.5) {
            neuron = neuron.with_reaction(g.delay(5.0));
        }
        if g.chance(0.3) {
            neuron = neuron.with_census(*g.pick(&CensusCategory::ALL));
        }
        s.neurons.push(neuron);
    }
    // guarantee at least one buildable arc
    s.neurons.push(Neuron::new("anchor-sensor", NeuronKind::Sensor));
    s.neurons.push(Neuron::new("anchor-device", NeuronKind::SmartDevice));

    let ids: Vec<NeuronId> = s.neurons.iter().map(|n| n.id.clone()).collect();
    for _ in 0..g.below(2 * ids.len()) {
        let from = g.pick(&ids).clone();
        let to = g.pick(&ids).clone();
        if from != to {
            s.edges.push(FollowEdge { from, to });
        }
    }

    let channels = 1 + g.below(3);
    for c in 0..channels {
        let mut ch = Channel::new(format!("ch{c}"), g.delay(5.0));
        if g.chance(0.5) {
            ch = ch.with_failure_probability(g.range(0.0, 0.5));
        }
        if opts.outages && g.chance(0.5) {
            let a = g.time(horizon);
            let b = g.time(horizon);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            ch = ch.with_outage(Window::new(lo, hi));
        }
        s.channels.push(ch);
    }
    let channel_ids: Vec<ChannelId> = s.channels.iter().map(|c| c.id.clone()).collect();

    let receptors: Vec<&Neuron> = s.neurons.iter().filter(|n| receptor_ok(n.kind)).collect();
    let effectors: Vec<&Neuron> = s.neurons.iter().filter(|n| effector_ok(n.kind)).collect();
    let mut arcs = Vec::new();
    for a in 0..1 + g.below(5) {
        let rk = g.pick(&receptors).kind;
        let ek = g.pick(&effectors).kind;
        let mut rx: BTreeSet<NeuronId> = BTreeSet::new();
        let mut tx: BTreeSet<NeuronId> = BTreeSet::new();
        let same_r: Vec<&&Neuron> = receptors.iter().filter(|n| n.kind == rk).collect();
        let same_e: Vec<&&Neuron> = effectors.iter().filter(|n| n.kind == ek).collect();
        for _ in 0..1 + g.below(same_r.len()) {
            rx.insert(g.pick(&same_r).id.clone());
        }
        for _ in 0..1 + g.below(same_e.len()) {
            tx.insert(g.pick(&same_e).id.clone());
        }
        let mut policy = CenterPolicy::new(g.unit(), g.delay(2.0));
        policy.action = *g.pick(&[CenterAction::Actuate, CenterAction::Notify, CenterAction::Escalate]);
        arcs.push(ReflexArcSpec {
            arc_id: format!("arc{a}"),
            category: ArcCategory::new(*g.pick(&STANDARD_CATEGORIES)),
            receptors: rx,
            afferent: g.pick(&channel_ids).clone(),
            center_policy: policy,
            efferent: g.pick(&channel_ids).clone(),
            effectors: tx,
        });
    }
    s.arcs = arcs;

    for i in 0..g.below(31) {
        let arc = g.pick(&s.arcs).arc_id.clone();
        let time = g.time(active_span.min(horizon));
        let intensity = g.unit();
        s.stimuli.push(Stimulus::new(format!("st{i:03}"), arc, time, intensity));
    }

    if opts.failures {
        for _ in 0..g.below(4) {
            let target = match g.below(3) {
                0 => FailureTarget::Center,
                1 => FailureTarget::Channel(g.pick(&channel_ids).clone()),
                _ => FailureTarget::Neuron(g.pick(&ids).clone()),
            };
            let start = g.time(horizon);
            let end = start + g.time((horizon - start.as_units()).max(0.0));
            let end = end.min(s.metadata.horizon);
            s.failures.push(FailureSpec { target, start, end });
        }
    }

    for _ in 0..g.below(21) {
        s.posts.push(PostSpec {
            author: g.pick(&ids).clone(),
            time: g.time(horizon),
            payload_kind: *g.pick(&[PayloadKind::Status, PayloadKind::Alarm, PayloadKind::Command, PayloadKind::Chat]),
            body: String::from("status"),
        });
    }

    for cat in CensusCategory::ALL {
        if g.chance(0.7) {
            s.census.set(cat, 1 + g.below(10) as u64);
        }
    }

    let w = g.unit();
    s.scale.weight_network = w;
    s.scale.weight_arcs = 1.0 - w;
    s.scale.nodata_policy = if g.chance(0.5) { NoDataPolicy::ScoreZero } else { NoDataPolicy::Exclude };
    s.scale.activeness_half_rate = g.range(0.001, 2.0);
    for _ in 0..g.below(3) {
        let cat = ArcCategory::new(*g.pick(&STANDARD_CATEGORIES));
        s.scale.reference_latency.insert(cat, g.range(0.1, 10.0));
    }
    s
}

/// Every delay in the scenario multiplied by `k`, including the default
/// human reaction.
pub fn scale_delays(s: &Scenario, k: f64) -> Scenario {
    let mut out = s.clone();
    for n in &mut out.neurons {
        if n.kind == NeuronKind::Human {
            let base = n.reaction.unwrap_or(DelayModel::DEFAULT_HUMAN_REACTION);
            n.reaction = Some(base.scaled(k));
        }
    }
    for c in &mut out.channels {
        c.delay = c.delay.scaled(k);
    }
    for a in &mut out.arcs {
        a.center_policy.processing_delay = a.center_policy.processing_delay.scaled(k);
    }
    out
}
