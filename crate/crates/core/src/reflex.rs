//! Cloud reflex arcs: declaration, classification into the nine arc types,
//! and the execution trace of one firing.
//!
//! An arc is receptor → afferent channel → nerve center → efferent channel →
//! effector. Its type is fixed by the receptor kind (sensor, human, program)
//! and the effector kind (device, human, program), giving a 3×3 product.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channel::{Channel, ChannelId};
use crate::delay::DelayModel;
use crate::graph::{BigSnsGraph, NeuronId, NeuronKind};
use crate::iq::ArcCategory;
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReceptorKind {
    Sensor,
    Human,
    Program,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EffectorKind {
    Device,
    Human,
    Program,
}

impl ReceptorKind {
    pub fn of(kind: NeuronKind) -> Option<Self> {
        match kind {
            NeuronKind::Sensor => Some(ReceptorKind::Sensor),
            NeuronKind::Human => Some(ReceptorKind::Human),
            NeuronKind::SmartProgram => Some(ReceptorKind::Program),
            NeuronKind::Organization | NeuronKind::SmartDevice => None,
        }
    }

    pub fn role(self) -> NodeRole {
        match self {
            ReceptorKind::Sensor => NodeRole::A,
            ReceptorKind::Human => NodeRole::B,
            ReceptorKind::Program => NodeRole::C,
        }
    }
}

impl EffectorKind {
    pub fn of(kind: NeuronKind) -> Option<Self> {
        match kind {
            NeuronKind::SmartDevice => Some(EffectorKind::Device),
            NeuronKind::Human => Some(EffectorKind::Human),
            NeuronKind::SmartProgram => Some(EffectorKind::Program),
            NeuronKind::Organization | NeuronKind::Sensor => None,
        }
    }

    pub fn role(self) -> NodeRole {
        match self {
            EffectorKind::Program => NodeRole::D,
            EffectorKind::Human => NodeRole::E,
            EffectorKind::Device => NodeRole::F,
        }
    }
}

/// Display letters of the reflex-arc diagram. A–C sit on the receptor side,
/// D–F on the effector side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeRole {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl NodeRole {
    pub fn is_receptor(self) -> bool {
        matches!(self, NodeRole::A | NodeRole::B | NodeRole::C)
    }

    pub fn letter(self) -> char {
        match self {
            NodeRole::A => 'A',
            NodeRole::B => 'B',
            NodeRole::C => 'C',
            NodeRole::D => 'D',
            NodeRole::E => 'E',
            NodeRole::F => 'F',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcType {
    pub receptor: ReceptorKind,
    pub effector: EffectorKind,
}

impl ArcType {
    /// All nine types in ordinal order.
    pub const ALL: [ArcType; 9] = [
        ArcType { receptor: ReceptorKind::Sensor, effector: EffectorKind::Device },
        ArcType { receptor: ReceptorKind::Sensor, effector: EffectorKind::Human },
        ArcType { receptor: ReceptorKind::Sensor, effector: EffectorKind::Program },
        ArcType { receptor: ReceptorKind::Program, effector: EffectorKind::Device },
        ArcType { receptor: ReceptorKind::Program, effector: EffectorKind::Human },
        ArcType { receptor: ReceptorKind::Program, effector: EffectorKind::Program },
        ArcType { receptor: ReceptorKind::Human, effector: EffectorKind::Device },
        ArcType { receptor: ReceptorKind::Human, effector: EffectorKind::Human },
        ArcType { receptor: ReceptorKind::Human, effector: EffectorKind::Program },
    ];

    pub fn new(receptor: ReceptorKind, effector: EffectorKind) -> Self {
        ArcType { receptor, effector }
    }

    /// 1-based ordinal.
    pub fn ordinal(self) -> u8 {
        let pos = ArcType::ALL.iter().position(|t| *t == self).expect("ALL covers the product");
        pos as u8 + 1
    }

    pub fn from_ordinal(ordinal: u8) -> Option<ArcType> {
        ArcType::ALL.get(usize::from(ordinal).checked_sub(1)?).copied()
    }

    /// Diagram label such as `A->F`. Letters are cosmetic.
    pub fn label(self) -> String {
        let mut s = String::new();
        s.push(self.receptor.role().letter());
        s.push_str("->");
        s.push(self.effector.role().letter());
        s
    }

    pub fn description(self) -> &'static str {
        match (self.receptor, self.effector) {
            (ReceptorKind::Sensor, EffectorKind::Device) => "sensors to smart devices",
            (ReceptorKind::Sensor, EffectorKind::Human) => "sensors to humans",
            (ReceptorKind::Sensor, EffectorKind::Program) => "sensors to smart programs",
            (ReceptorKind::Program, EffectorKind::Device) => "smart programs to smart devices",
            (ReceptorKind::Program, EffectorKind::Human) => "smart programs to humans",
            (ReceptorKind::Program, EffectorKind::Program) => "smart programs to smart programs",
            (ReceptorKind::Human, EffectorKind::Device) => "humans to smart devices",
            (ReceptorKind::Human, EffectorKind::Human) => "humans to humans",
            (ReceptorKind::Human, EffectorKind::Program) => "humans to smart programs",
        }
    }

    /// A representative city scenario for the type.
    pub fn example(self) -> &'static str {
        match (self.receptor, self.effector) {
            (ReceptorKind::Sensor, EffectorKind::Device) => {
                "temperature and gas sensors trip; center commands the fire-extinguishing robot"
            }
            (ReceptorKind::Sensor, EffectorKind::Human) => {
                "temperature and gas sensors trip; center alerts the nearby fire brigade"
            }
            (ReceptorKind::Sensor, EffectorKind::Program) => {
                "temperature and gas sensors trip; an AI program rates the danger level"
            }
            (ReceptorKind::Program, EffectorKind::Device) => {
                "storage monitor sees a full disk; center starts a spare storage unit"
            }
            (ReceptorKind::Program, EffectorKind::Human) => {
                "storage monitor sees a full disk; center messages the on-duty operator"
            }
            (ReceptorKind::Program, EffectorKind::Program) => {
                "storage monitor sees a full disk; center tells the maintenance program to stop writes"
            }
            (ReceptorKind::Human, EffectorKind::Device) => {
                "watchman presses the alarm; center commands the fire-extinguishing robot"
            }
            (ReceptorKind::Human, EffectorKind::Human) => {
                "watchman presses the alarm; center alerts the nearby fire brigade"
            }
            (ReceptorKind::Human, EffectorKind::Program) => {
                "watchman presses the alarm; an AI program rates the danger level"
            }
        }
    }
}

impl fmt::Display for ArcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type {} ({})", self.ordinal(), self.description())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CenterAction {
    #[default]
    Actuate,
    Notify,
    Escalate,
}

impl CenterAction {
    pub fn as_str(self) -> &'static str {
        match self {
            CenterAction::Actuate => "Actuate",
            CenterAction::Notify => "Notify",
            CenterAction::Escalate => "Escalate",
        }
    }
}

/// Threshold decision made by the nerve center.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CenterPolicy {
    pub decision_threshold: f64,
    pub processing_delay: DelayModel,
    #[cfg_attr(feature = "serde", serde(default))]
    pub action: CenterAction,
}

impl CenterPolicy {
    pub fn new(decision_threshold: f64, processing_delay: DelayModel) -> Self {
        CenterPolicy { decision_threshold, processing_delay, action: CenterAction::Actuate }
    }

    /// Acts iff intensity ≥ threshold.
    pub fn decide(&self, intensity: f64) -> bool {
        intensity >= self.decision_threshold
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ReflexArcSpec {
    #[cfg_attr(feature = "serde", serde(rename = "id"))]
    pub arc_id: String,
    pub category: ArcCategory,
    pub receptors: BTreeSet<NeuronId>,
    pub afferent: ChannelId,
    pub center_policy: CenterPolicy,
    pub efferent: ChannelId,
    pub effectors: BTreeSet<NeuronId>,
}

/// Which end of an arc a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcSide {
    Receptor,
    Effector,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ArcViolation {
    #[error("arc has no receptor")]
    MissingReceptor,
    #[error("arc has no effector")]
    MissingEffector,
    #[error("neuron `{0}` is not registered")]
    UnknownNeuron(NeuronId),
    #[error("neuron `{id}` of kind {kind:?} cannot serve as {side:?}")]
    IneligibleKind { id: NeuronId, kind: NeuronKind, side: ArcSide },
    #[error("{0:?} set mixes neuron kinds")]
    MixedKinds(ArcSide),
    #[error("channel `{0}` is not declared")]
    UnknownChannel(ChannelId),
    #[error("decision threshold {0} outside [0, 1]")]
    ThresholdOutOfRange(f64),
    #[error("invalid center processing delay")]
    InvalidProcessingDelay,
}

fn homogeneous<'a, T: PartialEq + Copy>(
    members: impl IntoIterator<Item = (&'a NeuronId, NeuronKind)>,
    map: fn(NeuronKind) -> Option<T>,
    side: ArcSide,
) -> Result<T, ArcViolation> {
    let mut found: Option<T> = None;
    for (id, kind) in members {
        let role = map(kind).ok_or_else(|| ArcViolation::IneligibleKind { id: id.clone(), kind, side })?;
        match found {
            None => found = Some(role),
            Some(prev) if prev != role => return Err(ArcViolation::MixedKinds(side)),
            Some(_) => {}
        }
    }
    found.ok_or(match side {
        ArcSide::Receptor => ArcViolation::MissingReceptor,
        ArcSide::Effector => ArcViolation::MissingEffector,
    })
}

/// Returns the unique type of a valid arc. The result depends only on the
/// kinds of the member neurons.
pub fn classify_arc(spec: &ReflexArcSpec, graph: &BigSnsGraph) -> Result<ArcType, ArcViolation> {
    let members = |ids: &'_ BTreeSet<NeuronId>| -> Result<Vec<(NeuronId, NeuronKind)>, ArcViolation> {
        ids.iter()
            .map(|id| {
                graph
                    .neuron(id)
                    .map(|n| (id.clone(), n.kind))
                    .ok_or_else(|| ArcViolation::UnknownNeuron(id.clone()))
            })
            .collect()
    };
    let receptors = members(&spec.receptors)?;
    let effectors = members(&spec.effectors)?;
    let r = homogeneous(receptors.iter().map(|(i, k)| (i, *k)), ReceptorKind::of, ArcSide::Receptor)?;
    let e = homogeneous(effectors.iter().map(|(i, k)| (i, *k)), EffectorKind::of, ArcSide::Effector)?;
    Ok(ArcType::new(r, e))
}

/// Every structural problem with `spec`; empty iff the arc is well formed.
pub fn validate_arc(spec: &ReflexArcSpec, graph: &BigSnsGraph, channels: &[Channel]) -> Vec<ArcViolation> {
    let mut out = Vec::new();
    for (ids, side) in [(&spec.receptors, ArcSide::Receptor), (&spec.effectors, ArcSide::Effector)] {
        if ids.is_empty() {
            out.push(match side {
                ArcSide::Receptor => ArcViolation::MissingReceptor,
                ArcSide::Effector => ArcViolation::MissingEffector,
            });
            continue;
        }
        let mut kinds = BTreeSet::new();
        for id in ids {
            let Some(n) = graph.neuron(id) else {
                out.push(ArcViolation::UnknownNeuron(id.clone()));
                continue;
            };
            let eligible = match side {
                ArcSide::Receptor => ReceptorKind::of(n.kind).is_some(),
                ArcSide::Effector => EffectorKind::of(n.kind).is_some(),
            };
            if eligible {
                kinds.insert(n.kind);
            } else {
                out.push(ArcViolation::IneligibleKind { id: id.clone(), kind: n.kind, side });
            }
        }
        if kinds.len() > 1 {
            out.push(ArcViolation::MixedKinds(side));
        }
    }
    for ch in [&spec.afferent, &spec.efferent] {
        if !channels.iter().any(|c| &c.id == ch) {
            out.push(ArcViolation::UnknownChannel(ch.clone()));
        }
    }
    let threshold = spec.center_policy.decision_threshold;
    if !(0.0..=1.0).contains(&threshold) {
        out.push(ArcViolation::ThresholdOutOfRange(threshold));
    }
    if spec.center_policy.processing_delay.validate().is_err() {
        out.push(ArcViolation::InvalidProcessingDelay);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    StimulusReceived,
    AfferentDelivered,
    CenterDecided,
    EfferentDelivered,
    EffectorActuated,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::StimulusReceived,
        Stage::AfferentDelivered,
        Stage::CenterDecided,
        Stage::EfferentDelivered,
        Stage::EffectorActuated,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::StimulusReceived => "StimulusReceived",
            Stage::AfferentDelivered => "AfferentDelivered",
            Stage::CenterDecided => "CenterDecided",
            Stage::EfferentDelivered => "EfferentDelivered",
            Stage::EffectorActuated => "EffectorActuated",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Stage::ALL.into_iter().find(|st| st.as_str() == s).ok_or(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Completed,
    Suppressed,
    FailedAtStage(Stage),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Completed => f.write_str("Completed"),
            Outcome::Suppressed => f.write_str("Suppressed"),
            Outcome::FailedAtStage(s) => write!(f, "FailedAtStage({s})"),
        }
    }
}

impl FromStr for Outcome {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "Completed" => Ok(Outcome::Completed),
            "Suppressed" => Ok(Outcome::Suppressed),
            _ => {
                let inner = s.strip_prefix("FailedAtStage(").and_then(|r| r.strip_suffix(')')).ok_or(())?;
                Ok(Outcome::FailedAtStage(inner.parse()?))
            }
        }
    }
}

/// What happened to one stimulus on one arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcExecutionTrace {
    pub arc_id: String,
    pub stimulus_id: String,
    pub category: ArcCategory,
    /// Indexed by [`Stage::index`].
    pub stage_times: [Option<SimTime>; 5],
    pub outcome: Outcome,
}

impl ArcExecutionTrace {
    pub fn stage_time(&self, stage: Stage) -> Option<SimTime> {
        self.stage_times[stage.index()]
    }

    /// Effector actuation minus stimulus reception, for completed traces.
    pub fn end_to_end_latency(&self) -> Option<SimTime> {
        if self.outcome != Outcome::Completed {
            return None;
        }
        let start = self.stage_time(Stage::StimulusReceived)?;
        let end = self.stage_time(Stage::EffectorActuated)?;
        Some(end - start)
    }

    /// Checks the trace shape: present stages form a prefix, times are
    /// nondecreasing in stage order, and the outcome matches the prefix.
    ///
    /// Zero-delay stages share a timestamp, so times are only required to be
    /// nondecreasing here; [`ArcExecutionTrace::strictly_ordered`] is the
    /// stronger check.
    pub fn is_well_formed(&self) -> bool {
        let present = self.stage_times.iter().take_while(|t| t.is_some()).count();
        if self.stage_times[present..].iter().any(Option::is_some) {
            return false;
        }
        let times: Vec<SimTime> = self.stage_times[..present].iter().flatten().copied().collect();
        if times.windows(2).any(|w| w[0] > w[1]) {
            return false;
        }
        match self.outcome {
            Outcome::Completed => present == 5,
            Outcome::Suppressed => present == 3,
            Outcome::FailedAtStage(stage) => present == stage.index(),
        }
    }

    pub fn strictly_ordered(&self) -> bool {
        let times: Vec<SimTime> = self.stage_times.iter().flatten().copied().collect();
        times.windows(2).all(|w| w[0] < w[1])
    }
}
