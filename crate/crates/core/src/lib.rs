//! Simulation core for a city-scale reflex-arc model: a follow graph of
//! people, organizations and devices, nine kinds of reflex arc, a
//! deterministic event kernel and the City IQ scoring built on its logs.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod delay;
pub mod event;
pub mod graph;
pub mod iq;
pub mod kernel;
pub mod reflex;
pub mod rng;
pub mod scenario;
pub mod time;

pub use channel::{Channel, ChannelId, Delivery, DropReason};
pub use delay::DelayModel;
pub use event::{EventKind, EventLog, EventRecord};
pub use graph::{BigSnsGraph, Census, CensusCategory, FollowEdge, Neuron, NeuronId, NeuronKind, PayloadKind};
pub use iq::{compute_city_iq, ArcCategory, CategoryRegistry, CityIqReport, NoDataPolicy, ScaleParams};
pub use kernel::{run, FailureTarget, KernelError, RunSummary, SimKernel, Stimulus};
pub use reflex::{ArcExecutionTrace, ArcType, CenterAction, CenterPolicy, Outcome, ReflexArcSpec, Stage};
pub use scenario::{IssueKind, Scenario, ScenarioIssue};
pub use time::{SimTime, Window};
