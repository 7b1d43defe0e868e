//! In-memory scenario description and its structural checks.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::channel::{Channel, ChannelId};
use crate::graph::{BigSnsGraph, Census, FollowEdge, GraphError, Neuron, NeuronId, PayloadKind};
use crate::iq::ScaleParams;
use crate::kernel::{FailureTarget, Stimulus};
use crate::reflex::validate_arc;
use crate::reflex::ReflexArcSpec;
use crate::time::{SimTime, Window};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Metadata {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(default = "default_time_unit"))]
    pub time_unit: String,
    pub horizon: SimTime,
}

#[cfg(feature = "serde")]
fn default_time_unit() -> String {
    String::from("second")
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct FailureSpec {
    pub target: FailureTarget,
    pub start: SimTime,
    pub end: SimTime,
}

impl FailureSpec {
    pub fn window(&self) -> Window {
        Window::new(self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PostSpec {
    pub author: NeuronId,
    pub time: SimTime,
    #[cfg_attr(feature = "serde", serde(default))]
    pub payload_kind: PayloadKind,
    #[cfg_attr(feature = "serde", serde(default))]
    pub body: String,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Scenario {
    pub metadata: Metadata,
    pub neurons: Vec<Neuron>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub edges: Vec<FollowEdge>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub channels: Vec<Channel>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub arcs: Vec<ReflexArcSpec>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub stimuli: Vec<Stimulus>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub failures: Vec<FailureSpec>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub posts: Vec<PostSpec>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub census: Census,
    #[cfg_attr(feature = "serde", serde(default))]
    pub scale: ScaleParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IssueKind {
    DanglingReference,
    InvariantViolation,
}

/// One validation finding, located by a path like `arcs[0].afferent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioIssue {
    pub path: String,
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for ScenarioIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            IssueKind::DanglingReference => "dangling reference",
            IssueKind::InvariantViolation => "invariant violation",
        };
        write!(f, "{}: {kind}: {}", self.path, self.message)
    }
}

struct Issues(Vec<ScenarioIssue>);

impl Issues {
    fn dangling(&mut self, path: String, message: String) {
        self.0.push(ScenarioIssue { path, kind: IssueKind::DanglingReference, message });
    }

    fn invariant(&mut self, path: String, message: String) {
        self.0.push(ScenarioIssue { path, kind: IssueKind::InvariantViolation, message });
    }
}

impl Scenario {
    pub fn new(name: impl Into<String>, horizon: SimTime) -> Self {
        Scenario {
            metadata: Metadata { name: name.into(), time_unit: String::from("second"), horizon },
            neurons: Vec::new(),
            edges: Vec::new(),
            channels: Vec::new(),
            arcs: Vec::new(),
            stimuli: Vec::new(),
            failures: Vec::new(),
            posts: Vec::new(),
            census: Census::default(),
            scale: ScaleParams::default(),
        }
    }

    /// Registers neurons and follow edges, in declaration order.
    pub fn build_graph(&self) -> Result<BigSnsGraph, GraphError> {
        let mut g = BigSnsGraph::new();
        for n in &self.neurons {
            g.register_neuron(n.clone())?;
        }
        for e in &self.edges {
            g.connect(&e.from, &e.to)?;
        }
        Ok(g)
    }

    /// Reports every reference and invariant problem found.
    pub fn validate(&self) -> Result<(), Vec<ScenarioIssue>> {
        let mut out = Issues(Vec::new());
        let horizon = self.metadata.horizon;
        if horizon == SimTime::ZERO {
            out.invariant(String::from("metadata.horizon"), String::from("horizon must be positive"));
        }

        let mut neuron_ids = BTreeSet::new();
        for (i, n) in self.neurons.iter().enumerate() {
            if !neuron_ids.insert(&n.id) {
                out.invariant(format!("neurons[{i}].id"), format!("duplicate neuron `{}`", n.id));
            }
            if let Some(Err(e)) = n.reaction.as_ref().map(|r| r.validate()) {
                out.invariant(format!("neurons[{i}].reaction"), format!("{e}"));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for (field, id) in [("from", &e.from), ("to", &e.to)] {
                if !neuron_ids.contains(id) {
                    out.dangling(format!("edges[{i}].{field}"), format!("unknown neuron `{id}`"));
                }
            }
            if e.from == e.to {
                out.invariant(format!("edges[{i}]"), format!("neuron `{}` cannot follow itself", e.from));
            }
        }

        let mut channel_ids: BTreeSet<&ChannelId> = BTreeSet::new();
        for (i, c) in self.channels.iter().enumerate() {
            if !channel_ids.insert(&c.id) {
                out.invariant(format!("channels[{i}].id"), format!("duplicate channel `{}`", c.id));
            }
            if let Err(e) = c.validate() {
                out.invariant(format!("channels[{i}]"), format!("{e}"));
            }
        }

        let graph = self.build_graph().ok();
        let mut arc_ids = BTreeSet::new();
        for (i, a) in self.arcs.iter().enumerate() {
            if !arc_ids.insert(a.arc_id.as_str()) {
                out.invariant(format!("arcs[{i}].id"), format!("duplicate arc `{}`", a.arc_id));
            }
            let mut dangling = false;
            for (field, ids) in [("receptors", &a.receptors), ("effectors", &a.effectors)] {
                for id in ids.iter().filter(|id| !neuron_ids.contains(id)) {
                    out.dangling(format!("arcs[{i}].{field}"), format!("unknown neuron `{id}`"));
                    dangling = true;
                }
            }
            for (field, id) in [("afferent", &a.afferent), ("efferent", &a.efferent)] {
                if !channel_ids.contains(id) {
                    out.dangling(format!("arcs[{i}].{field}"), format!("unknown channel `{id}`"));
                    dangling = true;
                }
            }
            if !self.scale.registry.contains(&a.category) {
                out.dangling(format!("arcs[{i}].category"), format!("category `{}` is not registered", a.category));
            }
            if let (false, Some(g)) = (dangling, &graph) {
                for v in validate_arc(a, g, &self.channels) {
                    out.invariant(format!("arcs[{i}]"), format!("{v}"));
                }
            }
        }

        let mut stimulus_ids = BTreeSet::new();
        for (i, s) in self.stimuli.iter().enumerate() {
            if !arc_ids.contains(s.target_arc.as_str()) {
                out.dangling(format!("stimuli[{i}].arc"), format!("unknown arc `{}`", s.target_arc));
            }
            if !stimulus_ids.insert(s.id.as_str()) {
                out.invariant(format!("stimuli[{i}].id"), format!("duplicate stimulus `{}`", s.id));
            }
            if !(0.0..=1.0).contains(&s.intensity) {
                out.invariant(format!("stimuli[{i}].intensity"), format!("{} outside [0, 1]", s.intensity));
            }
            if s.time > horizon {
                out.invariant(format!("stimuli[{i}].time"), format!("{} beyond horizon {horizon}", s.time));
            }
        }

        for (i, f) in self.failures.iter().enumerate() {
            let known = match &f.target {
                FailureTarget::Channel(c) => channel_ids.contains(c),
                FailureTarget::Neuron(n) => neuron_ids.contains(n),
                FailureTarget::Center => true,
            };
            if !known {
                out.dangling(format!("failures[{i}].target"), format!("unknown target `{}`", f.target.subject()));
            }
            if f.end < f.start {
                out.invariant(format!("failures[{i}]"), format!("window ends at {} before it starts at {}", f.end, f.start));
            }
            if f.end > horizon {
                out.invariant(format!("failures[{i}].end"), format!("{} beyond horizon {horizon}", f.end));
            }
        }

        for (i, p) in self.posts.iter().enumerate() {
            if !neuron_ids.contains(&p.author) {
                out.dangling(format!("posts[{i}].author"), format!("unknown neuron `{}`", p.author));
            }
            if p.time > horizon {
                out.invariant(format!("posts[{i}].time"), format!("{} beyond horizon {horizon}", p.time));
            }
        }

        if let Err(e) = self.scale.validate() {
            out.invariant(String::from("scale"), format!("{e}"));
        }

        if out.0.is_empty() {
            Ok(())
        } else {
            Err(out.0)
        }
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use crate::delay::DelayModel;
    use crate::graph::{CensusCategory, NeuronKind};
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct NeuronRepr {
        id: NeuronId,
        kind: NeuronKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        census_category: Option<CensusCategory>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        system: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reaction: Option<DelayModel>,
    }

    impl Serialize for Neuron {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            NeuronRepr {
                id: self.id.clone(),
                kind: self.kind,
                census_category: Some(self.census_category),
                system: self.system_label.clone(),
                name: (self.display_name != self.id.as_str()).then(|| self.display_name.clone()),
                reaction: self.reaction,
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Neuron {
        fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let r = NeuronRepr::deserialize(d)?;
            let mut n = Neuron::new(r.id.0, r.kind).with_system(r.system);
            if let Some(c) = r.census_category {
                n = n.with_census(c);
            }
            if let Some(name) = r.name {
                n = n.with_name(name);
            }
            n.reaction = r.reaction;
            Ok(n)
        }
    }
}
