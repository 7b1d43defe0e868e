//! Nerve fibers: the afferent and efferent channels arcs send through.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::delay::{DelayError, DelayModel};
use crate::rng::DrawStream;
use crate::time::{SimTime, Window};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ChannelId(pub String);

impl ChannelId {
    pub fn new(id: impl Into<String>) -> Self {
        ChannelId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Channel {
    pub id: ChannelId,
    pub delay: DelayModel,
    #[cfg_attr(feature = "serde", serde(default))]
    pub failure_probability: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub outages: Vec<Window>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("failure probability {0} outside [0, 1]")]
    Probability(f64),
    #[error(transparent)]
    Delay(#[from] DelayError),
    #[error("outage windows must be well-formed, sorted and non-overlapping")]
    Outages,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropReason {
    /// Channel (or injected channel failure) outage covered the send time.
    Outage,
    /// Lost to the channel's failure probability.
    Random,
    /// Sender or every receiver was down.
    NeuronDown,
    /// Still in flight when the horizon was reached.
    Horizon,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::Outage => "Outage",
            DropReason::Random => "Random",
            DropReason::NeuronDown => "NeuronDown",
            DropReason::Horizon => "Horizon",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delivery {
    Delivered { after: SimTime },
    Dropped(DropReason),
}

impl Channel {
    pub fn new(id: impl Into<String>, delay: DelayModel) -> Self {
        Channel { id: ChannelId::new(id), delay, failure_probability: 0.0, outages: Vec::new() }
    }

    pub fn with_failure_probability(mut self, p: f64) -> Self {
        self.failure_probability = p;
        self
    }

    pub fn with_outage(mut self, window: Window) -> Self {
        self.outages.push(window);
        self
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(0.0..=1.0).contains(&self.failure_probability) {
            return Err(ChannelError::Probability(self.failure_probability));
        }
        self.delay.validate()?;
        let ordered = self.outages.iter().all(|w| w.start <= w.end)
            && self.outages.windows(2).all(|p| p[0].end <= p[1].start);
        if !ordered {
            return Err(ChannelError::Outages);
        }
        Ok(())
    }

    pub fn in_outage(&self, at: SimTime) -> bool {
        self.outages.iter().any(|w| w.contains(at))
    }

    /// Decides the fate of one message sent at `at`.
    ///
    /// Outside an outage this always consumes one uniform draw for the loss
    /// decision followed by the delay draw, whether or not the message is
    /// lost, so raising the failure probability only ever turns deliveries
    /// into drops.
    pub fn deliver(&self, at: SimTime, rng: &mut DrawStream) -> Delivery {
        if self.in_outage(at) {
            return Delivery::Dropped(DropReason::Outage);
        }
        let loss = rng.unit();
        let after = self.delay.sample(rng);
        if loss < self.failure_probability {
            Delivery::Dropped(DropReason::Random)
        } else {
            Delivery::Delivered { after }
        }
    }
}
