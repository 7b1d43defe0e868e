//! Deterministic discrete-event kernel.
//!
//! Events dispatch in `(time, seq)` order where `seq` is assigned when the
//! event is scheduled. Each firing walks the five arc stages; every message
//! it sends is logged as sent and later as delivered or dropped. Events still
//! queued past the horizon are flushed at the horizon: in-flight messages
//! become `Horizon` drops and unfinished firings fail at their pending stage.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::channel::{Channel, ChannelError, ChannelId, Delivery, DropReason};
use crate::delay::human_reaction_delay;
use crate::event::{keys, Details, EventKind, EventLog, SNS_CHANNEL};
use crate::graph::{BigSnsGraph, GraphError, NeuronId, NeuronKind, PayloadKind};
use crate::reflex::{classify_arc, validate_arc, ArcType, ArcViolation, Outcome, ReflexArcSpec, Stage};
use crate::rng::DrawStream;
use crate::scenario::{Scenario, ScenarioIssue};
use crate::time::{SimTime, Window};

/// Pseudo-neuron name the center uses in message subjects.
pub const CENTER: &str = "center";

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Stimulus {
    pub id: String,
    #[cfg_attr(feature = "serde", serde(rename = "arc"))]
    pub target_arc: String,
    pub time: SimTime,
    pub intensity: f64,
}

impl Stimulus {
    pub fn new(id: impl Into<String>, arc: impl Into<String>, time: SimTime, intensity: f64) -> Self {
        Stimulus { id: id.into(), target_arc: arc.into(), time, intensity }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FailureTarget {
    Channel(ChannelId),
    Neuron(NeuronId),
    Center,
}

impl FailureTarget {
    /// Subject string used in failure records, e.g. `channel:net`.
    pub fn subject(&self) -> String {
        match self {
            FailureTarget::Channel(c) => format!("channel:{c}"),
            FailureTarget::Neuron(n) => format!("neuron:{n}"),
            FailureTarget::Center => String::from(CENTER),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("arc `{arc}` is invalid: {violations:?}")]
    InvalidArc { arc: String, violations: Vec<ArcViolation> },
    #[error("arc `{0}` is not registered")]
    UnknownArc(String),
    #[error("duplicate arc `{0}`")]
    DuplicateArc(String),
    #[error("stimulus at {at} precedes the clock at {now}")]
    ClockRegression { at: SimTime, now: SimTime },
    #[error("time {0} lies beyond the horizon")]
    BeyondHorizon(SimTime),
    #[error("duplicate stimulus id `{0}`")]
    DuplicateStimulus(String),
    #[error("stimulus intensity {0} outside [0, 1]")]
    IntensityOutOfRange(f64),
    #[error("unknown failure target `{0}`")]
    UnknownTarget(String),
    #[error("bad failure window [{}, {})", .0.start, .0.end)]
    BadWindow(Window),
    #[error("channel `{id}`: {source}")]
    InvalidChannel { id: ChannelId, source: ChannelError },
    #[error("duplicate channel `{0}`")]
    DuplicateChannel(ChannelId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("scenario failed validation with {} issue(s)", .0.len())]
    InvalidScenario(Vec<ScenarioIssue>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Event {
    Stimulus(usize),
    AfferentSend(usize),
    AfferentArrive(usize),
    CenterDecide(usize),
    EfferentArrive(usize),
    Actuate { firing: usize, effector: NeuronId, traced: bool },
    Post(usize),
    FailureStart(usize),
    FailureEnd(usize),
}

#[derive(Debug)]
struct Scheduled {
    time: SimTime,
    seq: u64,
    event: Event,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.seq) == (other.time, other.seq)
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

struct ArcEntry {
    spec: ReflexArcSpec,
    arc_type: ArcType,
}

struct Firing {
    arc: usize,
    stimulus: Stimulus,
    receptor: Option<NeuronId>,
    reaction_in: SimTime,
    transit_in: SimTime,
    finished: bool,
}

struct PendingPost {
    author: NeuronId,
    kind: PayloadKind,
    body: String,
}

struct Injection {
    target: FailureTarget,
    window: Window,
}

pub struct SimKernel {
    seed: u64,
    horizon: SimTime,
    clock: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Reverse<Scheduled>>,
    graph: BigSnsGraph,
    channels: Vec<Channel>,
    channel_index: BTreeMap<ChannelId, usize>,
    arcs: Vec<ArcEntry>,
    arc_index: BTreeMap<String, usize>,
    firings: Vec<Firing>,
    stimulus_ids: BTreeSet<String>,
    posts: Vec<PendingPost>,
    injections: Vec<Injection>,
    channel_down: BTreeMap<ChannelId, Vec<Window>>,
    neuron_down: BTreeMap<NeuronId, Vec<Window>>,
    center_down: Vec<Window>,
    dispatched: u64,
    log: EventLog,
}

impl SimKernel {
    pub fn new(graph: BigSnsGraph, seed: u64, horizon: SimTime) -> Self {
        SimKernel {
            seed,
            horizon,
            clock: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            graph,
            channels: Vec::new(),
            channel_index: BTreeMap::new(),
            arcs: Vec::new(),
            arc_index: BTreeMap::new(),
            firings: Vec::new(),
            stimulus_ids: BTreeSet::new(),
            posts: Vec::new(),
            injections: Vec::new(),
            channel_down: BTreeMap::new(),
            neuron_down: BTreeMap::new(),
            center_down: Vec::new(),
            dispatched: 0,
            log: EventLog::new(),
        }
    }

    /// Builds a kernel with everything the scenario declares scheduled.
    pub fn from_scenario(scenario: &Scenario, seed: u64) -> Result<Self, KernelError> {
        scenario.validate().map_err(KernelError::InvalidScenario)?;
        let mut k = SimKernel::new(scenario.build_graph()?, seed, scenario.metadata.horizon);
        for ch in &scenario.channels {
            k.add_channel(ch.clone())?;
        }
        for arc in &scenario.arcs {
            k.add_arc(arc.clone())?;
        }
        for f in &scenario.failures {
            k.inject_failure(f.target.clone(), f.window())?;
        }
        for p in &scenario.posts {
            k.schedule_post(p.author.clone(), p.time, p.payload_kind, p.body.clone())?;
        }
        for s in &scenario.stimuli {
            k.fire(s.clone())?;
        }
        Ok(k)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn now(&self) -> SimTime {
        self.clock
    }

    pub fn horizon(&self) -> SimTime {
        self.horizon
    }

    pub fn graph(&self) -> &BigSnsGraph {
        &self.graph
    }

    /// Number of queued events handled so far, including horizon flushes.
    pub fn dispatched(&self) -> u64 {
        self.dispatched
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn into_parts(self) -> (BigSnsGraph, EventLog) {
        (self.graph, self.log)
    }

    pub fn add_channel(&mut self, channel: Channel) -> Result<(), KernelError> {
        channel
            .validate()
            .map_err(|source| KernelError::InvalidChannel { id: channel.id.clone(), source })?;
        if self.channel_index.contains_key(&channel.id) {
            return Err(KernelError::DuplicateChannel(channel.id));
        }
        self.channel_index.insert(channel.id.clone(), self.channels.len());
        self.channels.push(channel);
        Ok(())
    }

    /// Validates and registers an arc.
    pub fn add_arc(&mut self, spec: ReflexArcSpec) -> Result<ArcType, KernelError> {
        if self.arc_index.contains_key(&spec.arc_id) {
            return Err(KernelError::DuplicateArc(spec.arc_id));
        }
        let violations = validate_arc(&spec, &self.graph, &self.channels);
        if !violations.is_empty() {
            return Err(KernelError::InvalidArc { arc: spec.arc_id, violations });
        }
        let arc_type = classify_arc(&spec, &self.graph)
            .map_err(|v| KernelError::InvalidArc { arc: spec.arc_id.clone(), violations: vec![v] })?;
        self.arc_index.insert(spec.arc_id.clone(), self.arcs.len());
        self.arcs.push(ArcEntry { spec, arc_type });
        Ok(arc_type)
    }

    pub fn arc_type(&self, arc_id: &str) -> Option<ArcType> {
        self.arc_index.get(arc_id).map(|&i| self.arcs[i].arc_type)
    }

    fn schedule(&mut self, time: SimTime, event: Event) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(Scheduled { time, seq, event }));
    }

    /// Schedules one firing of `stimulus.target_arc`; returns the stimulus id.
    pub fn fire(&mut self, stimulus: Stimulus) -> Result<String, KernelError> {
        let &arc = self
            .arc_index
            .get(&stimulus.target_arc)
            .ok_or_else(|| KernelError::UnknownArc(stimulus.target_arc.clone()))?;
        if stimulus.time < self.clock {
            return Err(KernelError::ClockRegression { at: stimulus.time, now: self.clock });
        }
        if stimulus.time > self.horizon {
            return Err(KernelError::BeyondHorizon(stimulus.time));
        }
        if !(0.0..=1.0).contains(&stimulus.intensity) {
            return Err(KernelError::IntensityOutOfRange(stimulus.intensity));
        }
        if !self.stimulus_ids.insert(stimulus.id.clone()) {
            return Err(KernelError::DuplicateStimulus(stimulus.id));
        }
        let id = stimulus.id.clone();
        let time = stimulus.time;
        self.firings.push(Firing {
            arc,
            stimulus,
            receptor: None,
            reaction_in: SimTime::ZERO,
            transit_in: SimTime::ZERO,
            finished: false,
        });
        self.schedule(time, Event::Stimulus(self.firings.len() - 1));
        Ok(id)
    }

    /// Takes `target` down for `window`. Must be called before the run
    /// passes `window.start`.
    pub fn inject_failure(&mut self, target: FailureTarget, window: Window) -> Result<(), KernelError> {
        let known = match &target {
            FailureTarget::Channel(c) => self.channel_index.contains_key(c),
            FailureTarget::Neuron(n) => self.graph.contains(n),
            FailureTarget::Center => true,
        };
        if !known {
            return Err(KernelError::UnknownTarget(target.subject()));
        }
        if window.end < window.start || window.end > self.horizon || window.start < self.clock {
            return Err(KernelError::BadWindow(window));
        }
        match &target {
            FailureTarget::Channel(c) => self.channel_down.entry(c.clone()).or_default().push(window),
            FailureTarget::Neuron(n) => self.neuron_down.entry(n.clone()).or_default().push(window),
            FailureTarget::Center => self.center_down.push(window),
        }
        self.injections.push(Injection { target, window });
        let i = self.injections.len() - 1;
        self.schedule(window.start, Event::FailureStart(i));
        self.schedule(window.end, Event::FailureEnd(i));
        Ok(())
    }

    pub fn schedule_post(
        &mut self,
        author: NeuronId,
        time: SimTime,
        kind: PayloadKind,
        body: String,
    ) -> Result<(), KernelError> {
        if !self.graph.contains(&author) {
            return Err(GraphError::UnknownNeuron(author).into());
        }
        if time < self.clock {
            return Err(KernelError::ClockRegression { at: time, now: self.clock });
        }
        if time > self.horizon {
            return Err(KernelError::BeyondHorizon(time));
        }
        self.posts.push(PendingPost { author, kind, body });
        self.schedule(time, Event::Post(self.posts.len() - 1));
        Ok(())
    }

    fn neuron_is_down(&self, id: &NeuronId, t: SimTime) -> bool {
        self.neuron_down.get(id).is_some_and(|ws| ws.iter().any(|w| w.contains(t)))
    }

    fn center_is_down(&self, t: SimTime) -> bool {
        self.center_down.iter().any(|w| w.contains(t))
    }

    fn channel_is_down(&self, id: &ChannelId, t: SimTime) -> bool {
        self.channel_down.get(id).is_some_and(|ws| ws.iter().any(|w| w.contains(t)))
    }

    /// Runs to quiescence or the horizon, whichever comes first, then
    /// flushes whatever is still queued.
    pub fn run(&mut self) {
        while let Some(Reverse(next)) = self.queue.peek() {
            if next.time > self.horizon {
                break;
            }
            let Reverse(item) = self.queue.pop().expect("peeked");
            self.clock = item.time;
            self.dispatched += 1;
            self.dispatch(item.event);
        }
        if !self.queue.is_empty() {
            self.clock = self.horizon;
            while let Some(Reverse(item)) = self.queue.pop() {
                self.dispatched += 1;
                self.flush(item.event);
            }
        }
    }

    fn record(&mut self, kind: EventKind, subjects: Vec<String>, details: Details) {
        self.log.append(self.clock, kind, subjects, details.build());
    }

    fn firing_subjects(&self, f: usize) -> Vec<String> {
        let firing = &self.firings[f];
        vec![self.arcs[firing.arc].spec.arc_id.clone(), firing.stimulus.id.clone()]
    }

    fn stage(&mut self, f: usize, stage: Stage, extra: Option<&NeuronId>, details: Details) {
        let mut subjects = self.firing_subjects(f);
        if let Some(n) = extra {
            subjects.push(n.to_string());
        }
        self.record(EventKind::StageTransition, subjects, details.with(keys::STAGE, stage));
    }

    fn finish(&mut self, f: usize, outcome: Outcome) {
        if self.firings[f].finished {
            return;
        }
        self.firings[f].finished = true;
        let category = self.arcs[self.firings[f].arc].spec.category.to_string();
        let subjects = self.firing_subjects(f);
        self.record(
            EventKind::StageTransition,
            subjects,
            Details::new().with(keys::OUTCOME, outcome).with(keys::CATEGORY, category),
        );
    }

    fn msg_id(&self, f: usize, leg: &str) -> String {
        format!("{}/{leg}", self.firings[f].stimulus.id)
    }

    /// Sends one message on `channel` at the current time.
    fn transmit(&self, channel: &ChannelId, msg: &str) -> Delivery {
        if self.channel_is_down(channel, self.clock) {
            return Delivery::Dropped(DropReason::Outage);
        }
        let ch = &self.channels[self.channel_index[channel]];
        let mut rng = DrawStream::new(self.seed, &format!("channel:{channel}"), msg);
        ch.deliver(self.clock, &mut rng)
    }

    fn reaction(&self, neuron: &NeuronId, stimulus: &str) -> SimTime {
        match self.graph.neuron(neuron) {
            Some(n) if n.kind == NeuronKind::Human => {
                let mut rng = DrawStream::new(self.seed, &format!("neuron:{neuron}"), stimulus);
                human_reaction_delay(n.reaction.as_ref(), &mut rng)
            }
            _ => SimTime::ZERO,
        }
    }

    fn dispatch(&mut self, event: Event) {
        match event {
            Event::Stimulus(f) => self.on_stimulus(f),
            Event::AfferentSend(f) => self.on_afferent_send(f),
            Event::AfferentArrive(f) => self.on_afferent_arrive(f),
            Event::CenterDecide(f) => self.on_center_decide(f),
            Event::EfferentArrive(f) => self.on_efferent_arrive(f),
            Event::Actuate { firing, effector, traced } => self.on_actuate(firing, effector, traced),
            Event::Post(p) => self.on_post(p),
            Event::FailureStart(i) | Event::FailureEnd(i) => {
                let inj = &self.injections[i];
                let kind = if matches!(event, Event::FailureStart(_)) {
                    EventKind::FailureInjected
                } else {
                    EventKind::FailureCleared
                };
                let subjects = vec![inj.target.subject()];
                let details = Details::new().with(keys::START, inj.window.start).with(keys::END, inj.window.end);
                self.record(kind, subjects, details);
            }
        }
    }

    fn on_stimulus(&mut self, f: usize) {
        let arc = self.firings[f].arc;
        // any receptor of the arc can trigger; the first one up does
        let receptor = self.arcs[arc].spec.receptors.iter().find(|r| !self.neuron_is_down(r, self.clock)).cloned();
        let Some(receptor) = receptor else {
            self.finish(f, Outcome::FailedAtStage(Stage::StimulusReceived));
            return;
        };
        let intensity = self.firings[f].stimulus.intensity;
        self.stage(f, Stage::StimulusReceived, Some(&receptor), Details::new().with(keys::INTENSITY, intensity));
        let reaction = self.reaction(&receptor, &self.firings[f].stimulus.id);
        self.firings[f].receptor = Some(receptor);
        self.firings[f].reaction_in = reaction;
        self.schedule(self.clock + reaction, Event::AfferentSend(f));
    }

    fn on_afferent_send(&mut self, f: usize) {
        let channel = self.arcs[self.firings[f].arc].spec.afferent.clone();
        let msg = self.msg_id(f, "afferent");
        let receptor = self.firings[f].receptor.clone().expect("set at stimulus").to_string();
        let subjects = vec![receptor, CENTER.to_string()];
        let base = || Details::new().with(keys::MSG, &msg).with(keys::CHANNEL, &channel);
        self.record(EventKind::MessageSent, subjects.clone(), base());
        match self.transmit(&channel, &msg) {
            Delivery::Delivered { after } => {
                self.firings[f].transit_in = after;
                self.schedule(self.clock + after, Event::AfferentArrive(f));
            }
            Delivery::Dropped(reason) => {
                self.record(EventKind::MessageDropped, subjects, base().with(keys::REASON, reason.as_str()));
                self.finish(f, Outcome::FailedAtStage(Stage::AfferentDelivered));
            }
        }
    }

    fn on_afferent_arrive(&mut self, f: usize) {
        let channel = self.arcs[self.firings[f].arc].spec.afferent.clone();
        let msg = self.msg_id(f, "afferent");
        let receptor = self.firings[f].receptor.clone().expect("set at stimulus").to_string();
        let transit = self.firings[f].transit_in;
        self.record(
            EventKind::MessageDelivered,
            vec![receptor, CENTER.to_string()],
            Details::new().with(keys::MSG, &msg).with(keys::CHANNEL, &channel).with(keys::TRANSIT, transit),
        );
        let reaction = self.firings[f].reaction_in;
        self.stage(
            f,
            Stage::AfferentDelivered,
            None,
            Details::new().with(keys::REACTION, reaction).with(keys::TRANSIT, transit),
        );
        if self.center_is_down(self.clock) {
            self.finish(f, Outcome::FailedAtStage(Stage::CenterDecided));
            return;
        }
        let policy = &self.arcs[self.firings[f].arc].spec.center_policy;
        let mut rng = DrawStream::new(self.seed, CENTER, &self.firings[f].stimulus.id);
        let processing = policy.processing_delay.sample(&mut rng);
        self.firings[f].transit_in = processing;
        self.schedule(self.clock + processing, Event::CenterDecide(f));
    }

    fn on_center_decide(&mut self, f: usize) {
        if self.center_is_down(self.clock) {
            self.finish(f, Outcome::FailedAtStage(Stage::CenterDecided));
            return;
        }
        let arc = self.firings[f].arc;
        let policy = self.arcs[arc].spec.center_policy.clone();
        let intensity = self.firings[f].stimulus.intensity;
        let act = policy.decide(intensity);
        self.stage(
            f,
            Stage::CenterDecided,
            None,
            Details::new()
                .with(keys::PROCESSING, self.firings[f].transit_in)
                .with(keys::THRESHOLD, policy.decision_threshold)
                .with(keys::DECISION, if act { policy.action.as_str() } else { "Suppress" }),
        );
        if !act {
            self.finish(f, Outcome::Suppressed);
            return;
        }
        let channel = self.arcs[arc].spec.efferent.clone();
        let msg = self.msg_id(f, "efferent");
        let mut subjects = vec![CENTER.to_string()];
        subjects.extend(self.arcs[arc].spec.effectors.iter().map(ToString::to_string));
        let base = || Details::new().with(keys::MSG, &msg).with(keys::CHANNEL, &channel);
        self.record(EventKind::MessageSent, subjects.clone(), base());
        match self.transmit(&channel, &msg) {
            Delivery::Delivered { after } => {
                self.firings[f].transit_in = after;
                self.schedule(self.clock + after, Event::EfferentArrive(f));
            }
            Delivery::Dropped(reason) => {
                self.record(EventKind::MessageDropped, subjects, base().with(keys::REASON, reason.as_str()));
                self.finish(f, Outcome::FailedAtStage(Stage::EfferentDelivered));
            }
        }
    }

    fn on_efferent_arrive(&mut self, f: usize) {
        let arc = self.firings[f].arc;
        let channel = self.arcs[arc].spec.efferent.clone();
        let msg = self.msg_id(f, "efferent");
        let mut subjects = vec![CENTER.to_string()];
        subjects.extend(self.arcs[arc].spec.effectors.iter().map(ToString::to_string));
        let up: Vec<NeuronId> = self.arcs[arc]
            .spec
            .effectors
            .iter()
            .filter(|e| !self.neuron_is_down(e, self.clock))
            .cloned()
            .collect();
        let base = Details::new().with(keys::MSG, &msg).with(keys::CHANNEL, &channel);
        if up.is_empty() {
            self.record(EventKind::MessageDropped, subjects, base.with(keys::REASON, DropReason::NeuronDown.as_str()));
            self.finish(f, Outcome::FailedAtStage(Stage::EfferentDelivered));
            return;
        }
        let transit = self.firings[f].transit_in;
        self.record(EventKind::MessageDelivered, subjects, base.with(keys::TRANSIT, transit));
        self.stage(f, Stage::EfferentDelivered, None, Details::new().with(keys::TRANSIT, transit));

        let stim = self.firings[f].stimulus.id.clone();
        let reactions: Vec<(NeuronId, SimTime)> = up.into_iter().map(|e| {
            let r = self.reaction(&e, &stim);
            (e, r)
        }).collect();
        // the trace follows the first effector to act; ties go to id order
        let winner = reactions.iter().enumerate().min_by_key(|(i, (_, r))| (*r, *i)).map(|(i, _)| i).expect("nonempty");
        for (i, (effector, r)) in reactions.into_iter().enumerate() {
            self.schedule(self.clock + r, Event::Actuate { firing: f, effector, traced: i == winner });
        }
        self.firings[f].transit_in = SimTime::ZERO;
    }

    fn on_actuate(&mut self, f: usize, effector: NeuronId, traced: bool) {
        let arc = self.firings[f].arc;
        let action = self.arcs[arc].spec.center_policy.action;
        let stim = self.firings[f].stimulus.id.clone();
        let arc_id = self.arcs[arc].spec.arc_id.clone();
        self.record(
            EventKind::ActuationDone,
            vec![effector.to_string(), stim.clone()],
            Details::new().with(keys::ARC, arc_id).with(keys::ACTION, action.as_str()),
        );
        if traced {
            let reaction = self.reaction(&effector, &stim);
            self.stage(f, Stage::EffectorActuated, Some(&effector), Details::new().with(keys::REACTION, reaction));
            self.finish(f, Outcome::Completed);
        }
    }

    fn on_post(&mut self, p: usize) {
        let post = &self.posts[p];
        let author = post.author.clone();
        let kind = post.kind;
        let body = post.body.clone();
        let msg = format!("post/{p}");
        let details = || {
            Details::new()
                .with(keys::MSG, &msg)
                .with(keys::CHANNEL, SNS_CHANNEL)
                .with(keys::PAYLOAD, kind.as_str())
                .with(keys::BODY, &body)
        };
        let subjects = vec![author.to_string()];
        self.record(EventKind::MessageSent, subjects.clone(), details());
        if self.neuron_is_down(&author, self.clock) {
            self.record(EventKind::MessageDropped, subjects, details().with(keys::REASON, DropReason::NeuronDown.as_str()));
            return;
        }
        match self.graph.post_status(&author, self.clock, kind, body.clone()) {
            Ok(_) => self.record(EventKind::MessageDelivered, subjects, details()),
            // cannot happen: posts dispatch in time order
            Err(_) => self.record(EventKind::MessageDropped, subjects, details().with(keys::REASON, "Rejected")),
        }
    }

    /// Resolves an event that was still queued at the horizon.
    fn flush(&mut self, event: Event) {
        match event {
            Event::Stimulus(f) => self.finish(f, Outcome::FailedAtStage(Stage::StimulusReceived)),
            Event::AfferentSend(f) => self.finish(f, Outcome::FailedAtStage(Stage::AfferentDelivered)),
            Event::AfferentArrive(f) => {
                let channel = self.arcs[self.firings[f].arc].spec.afferent.clone();
                let msg = self.msg_id(f, "afferent");
                let receptor = self.firings[f].receptor.clone().expect("set at stimulus").to_string();
                self.record(
                    EventKind::MessageDropped,
                    vec![receptor, CENTER.to_string()],
                    Details::new().with(keys::MSG, msg).with(keys::CHANNEL, channel).with(keys::REASON, DropReason::Horizon.as_str()),
                );
                self.finish(f, Outcome::FailedAtStage(Stage::AfferentDelivered));
            }
            Event::CenterDecide(f) => self.finish(f, Outcome::FailedAtStage(Stage::CenterDecided)),
            Event::EfferentArrive(f) => {
                let arc = self.firings[f].arc;
                let channel = self.arcs[arc].spec.efferent.clone();
                let msg = self.msg_id(f, "efferent");
                let mut subjects = vec![CENTER.to_string()];
                subjects.extend(self.arcs[arc].spec.effectors.iter().map(ToString::to_string));
                self.record(
                    EventKind::MessageDropped,
                    subjects,
                    Details::new().with(keys::MSG, msg).with(keys::CHANNEL, channel).with(keys::REASON, DropReason::Horizon.as_str()),
                );
                self.finish(f, Outcome::FailedAtStage(Stage::EfferentDelivered));
            }
            Event::Actuate { firing, traced, .. } => {
                if traced {
                    self.finish(firing, Outcome::FailedAtStage(Stage::EffectorActuated));
                }
            }
            // validated to lie within the horizon
            Event::Post(_) | Event::FailureStart(_) | Event::FailureEnd(_) => {}
        }
    }
}

/// Runs `scenario` under `seed` and returns the complete event log.
pub fn run(scenario: &Scenario, seed: u64) -> Result<EventLog, KernelError> {
    let mut kernel = SimKernel::from_scenario(scenario, seed)?;
    kernel.run();
    Ok(kernel.into_parts().1)
}

/// Counts used by run summaries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub completed: usize,
    pub suppressed: usize,
    pub failed: usize,
    pub sent: usize,
    pub delivered: usize,
    pub dropped: usize,
    pub dropped_at_horizon: usize,
    pub actuations: usize,
}

impl RunSummary {
    pub fn from_log(log: &EventLog) -> Self {
        let mut s = RunSummary::default();
        for t in log.traces() {
            match t.outcome {
                Outcome::Completed => s.completed += 1,
                Outcome::Suppressed => s.suppressed += 1,
                Outcome::FailedAtStage(_) => s.failed += 1,
            }
        }
        for r in log.records() {
            match r.kind {
                EventKind::MessageSent => s.sent += 1,
                EventKind::MessageDelivered => s.delivered += 1,
                EventKind::MessageDropped => {
                    s.dropped += 1;
                    if r.detail(keys::REASON) == Some(DropReason::Horizon.as_str()) {
                        s.dropped_at_horizon += 1;
                    }
                }
                EventKind::ActuationDone => s.actuations += 1,
                _ => {}
            }
        }
        s
    }

    pub fn traces(&self) -> usize {
        self.completed + self.suppressed + self.failed
    }
}
