//! City IQ scoring.
//!
//! Two level-1 branches: the city neural network (robustness, uniformity,
//! coverage, activeness) and the cloud reflex arcs (response speed and
//! robustness for every category in the arc registry). Level-3 scores are
//! averaged into level-2, level-2 into level-1, and the two level-1 scores
//! are combined with configurable weights onto a 0–100 scale.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::event::{keys, EventKind, EventLog, SNS_CHANNEL};
use crate::graph::{census_coverage, BigSnsGraph, Census};
use crate::reflex::{ArcExecutionTrace, Outcome};
use crate::time::{SimTime, Window};

/// The twelve categories of the 2017 scale, in table order.
pub const STANDARD_CATEGORIES: [&str; 12] = [
    "Security",
    "Finance",
    "Traffic",
    "Logistics",
    "Energy",
    "Education",
    "Community",
    "MedicalService",
    "Tourism",
    "Retail",
    "AgriculturalTrade",
    "EnvironmentalProtection",
];

pub const BASE_SCALE_VERSION: &str = "2017";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ArcCategory(pub String);

impl ArcCategory {
    pub fn new(name: impl Into<String>) -> Self {
        ArcCategory(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_standard(&self) -> bool {
        STANDARD_CATEGORIES.contains(&self.0.as_str())
    }
}

impl fmt::Display for ArcCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("category `{0}` already exists")]
    DuplicateCategory(ArcCategory),
    #[error("category `{0}` belongs to the standard library and cannot be removed")]
    ProtectedCategory(ArcCategory),
    #[error("category `{0}` is not registered")]
    UnknownCategory(ArcCategory),
}

/// The arc-category standard library plus versioned extensions. Every edit
/// bumps the revision, and with it the scale version string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryRegistry {
    extensions: Vec<ArcCategory>,
    revision: u32,
}

impl Default for CategoryRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl CategoryRegistry {
    pub fn standard() -> Self {
        CategoryRegistry { extensions: Vec::new(), revision: 0 }
    }

    /// Standard members first, then extensions in the order added.
    pub fn members(&self) -> impl Iterator<Item = ArcCategory> + '_ {
        STANDARD_CATEGORIES.iter().map(|s| ArcCategory::new(*s)).chain(self.extensions.iter().cloned())
    }

    pub fn len(&self) -> usize {
        STANDARD_CATEGORIES.len() + self.extensions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, category: &ArcCategory) -> bool {
        category.is_standard() || self.extensions.contains(category)
    }

    pub fn extensions(&self) -> &[ArcCategory] {
        &self.extensions
    }

    pub fn revision(&self) -> u32 {
        self.revision
    }

    pub fn version(&self) -> String {
        if self.revision == 0 {
            String::from(BASE_SCALE_VERSION)
        } else {
            format!("{BASE_SCALE_VERSION}-r{}", self.revision)
        }
    }

    pub fn extend(&mut self, name: impl Into<String>) -> Result<(), RegistryError> {
        let cat = ArcCategory::new(name);
        if self.contains(&cat) {
            return Err(RegistryError::DuplicateCategory(cat));
        }
        self.extensions.push(cat);
        self.revision += 1;
        Ok(())
    }

    pub fn remove(&mut self, name: &str) -> Result<(), RegistryError> {
        let cat = ArcCategory::new(name);
        if cat.is_standard() {
            return Err(RegistryError::ProtectedCategory(cat));
        }
        let pos = self
            .extensions
            .iter()
            .position(|c| *c == cat)
            .ok_or(RegistryError::UnknownCategory(cat))?;
        self.extensions.remove(pos);
        self.revision += 1;
        Ok(())
    }

    /// Rebuilds a registry from its persisted parts.
    pub fn from_parts(extensions: Vec<ArcCategory>, revision: u32) -> Result<Self, RegistryError> {
        let mut reg = CategoryRegistry::standard();
        for e in extensions {
            reg.extend(e.0)?;
        }
        reg.revision = revision;
        Ok(reg)
    }
}

/// One index value in [0, 1] and the number of observations behind it.
/// A zero sample count means no data.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct IndexScore {
    pub value: f64,
    pub sample_count: u64,
}

impl IndexScore {
    pub const NO_DATA: IndexScore = IndexScore { value: 0.0, sample_count: 0 };

    pub fn new(value: f64, sample_count: u64) -> Self {
        IndexScore { value, sample_count }
    }

    pub fn is_no_data(&self) -> bool {
        self.sample_count == 0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NoDataPolicy {
    /// Missing measurements count as zero.
    #[default]
    ScoreZero,
    /// Missing measurements are left out of their average.
    Exclude,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleParams {
    /// Per-category reference latency; categories not listed use
    /// [`ScaleParams::DEFAULT_REFERENCE_LATENCY`].
    pub reference_latency: BTreeMap<ArcCategory, f64>,
    pub activeness_half_rate: f64,
    pub weight_network: f64,
    pub weight_arcs: f64,
    pub nodata_policy: NoDataPolicy,
    pub registry: CategoryRegistry,
}

impl Default for ScaleParams {
    fn default() -> Self {
        ScaleParams {
            reference_latency: BTreeMap::new(),
            activeness_half_rate: 1.0,
            weight_network: 0.5,
            weight_arcs: 0.5,
            nodata_policy: NoDataPolicy::ScoreZero,
            registry: CategoryRegistry::standard(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IqError {
    #[error("invalid scale parameters: {0}")]
    InvalidParams(String),
}

impl ScaleParams {
    pub const DEFAULT_REFERENCE_LATENCY: f64 = 1.0;
    const WEIGHT_TOLERANCE: f64 = 1e-9;

    pub fn reference_latency_for(&self, category: &ArcCategory) -> f64 {
        self.reference_latency.get(category).copied().unwrap_or(Self::DEFAULT_REFERENCE_LATENCY)
    }

    pub fn validate(&self) -> Result<(), IqError> {
        let bad = |m: String| Err(IqError::InvalidParams(m));
        if !(self.weight_network >= 0.0 && self.weight_arcs >= 0.0) {
            return bad(format!("weights must be nonnegative (network={}, arcs={})", self.weight_network, self.weight_arcs));
        }
        if (self.weight_network + self.weight_arcs - 1.0).abs() > Self::WEIGHT_TOLERANCE {
            return bad(format!("weights must sum to 1 (got {})", self.weight_network + self.weight_arcs));
        }
        if !(self.activeness_half_rate > 0.0 && self.activeness_half_rate.is_finite()) {
            return bad(format!("activeness_half_rate must be positive (got {})", self.activeness_half_rate));
        }
        for (cat, &l) in &self.reference_latency {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("reference latency for {cat} must be positive (got {l})"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct NetworkIndexes {
    /// Displayed as "completeness" in the 2017 table.
    pub robustness: IndexScore,
    pub uniformity: IndexScore,
    pub coverage: IndexScore,
    pub activeness: IndexScore,
}

impl NetworkIndexes {
    pub fn as_array(&self) -> [IndexScore; 4] {
        [self.robustness, self.uniformity, self.coverage, self.activeness]
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ArcCategoryScores {
    pub category: ArcCategory,
    pub response_speed: IndexScore,
    pub robustness: IndexScore,
    /// Level-2 score; `None` when excluded for lack of data.
    pub score: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Level1 {
    pub network_score: f64,
    pub arc_score: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CityIqReport {
    pub network_indexes: NetworkIndexes,
    pub arc_indexes: Vec<ArcCategoryScores>,
    pub level1: Level1,
    pub city_iq: f64,
    pub scale_version: String,
}

impl CityIqReport {
    /// Every index and level score in [0, 1] and the IQ in [0, 100].
    pub fn within_bounds(&self) -> bool {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        self.network_indexes.as_array().iter().all(|s| unit(s.value))
            && self.arc_indexes.iter().all(|a| {
                unit(a.response_speed.value) && unit(a.robustness.value) && a.score.is_none_or(unit)
            })
            && unit(self.level1.network_score)
            && unit(self.level1.arc_score)
            && (0.0..=100.0).contains(&self.city_iq)
    }
}

/// 1 − dropped / sent over every message in the log.
pub fn network_robustness(log: &EventLog) -> IndexScore {
    let sent = log.count(EventKind::MessageSent);
    if sent == 0 {
        return IndexScore::NO_DATA;
    }
    let dropped = log.count(EventKind::MessageDropped);
    IndexScore::new(1.0 - dropped as f64 / sent as f64, sent as u64)
}

/// Largest-component fraction of the Big SNS.
pub fn network_uniformity(graph: &BigSnsGraph) -> IndexScore {
    match graph.largest_component_fraction() {
        Ok(f) => IndexScore::new(f, graph.neuron_count() as u64),
        Err(_) => IndexScore::NO_DATA,
    }
}

/// Mean census coverage.
pub fn network_coverage(graph: &BigSnsGraph, census: &Census) -> IndexScore {
    match census_coverage(graph, census) {
        Ok(c) => IndexScore::new(c.mean, c.ratios.iter().flatten().count() as u64),
        Err(_) => IndexScore::NO_DATA,
    }
}

/// Number of published Big SNS posts with `start <= t <= end`.
pub fn published_posts(log: &EventLog, window: Window) -> usize {
    log.records()
        .iter()
        .filter(|r| {
            r.kind == EventKind::MessageDelivered
                && r.detail(keys::CHANNEL) == Some(SNS_CHANNEL)
                && window.start <= r.time
                && r.time <= window.end
        })
        .count()
}

/// Saturating post rate: r / (r + half_rate) with r in posts per neuron per
/// time unit.
pub fn network_activeness(log: &EventLog, graph: &BigSnsGraph, window: Window, half_rate: f64) -> IndexScore {
    let neurons = graph.neuron_count();
    let length = window.length();
    if neurons == 0 || length == SimTime::ZERO {
        return IndexScore::NO_DATA;
    }
    let posts = published_posts(log, window);
    let rate = posts as f64 / (neurons as f64 * length.as_units());
    IndexScore::new(rate / (rate + half_rate), neurons as u64)
}

fn median_units(mut ticks: Vec<u64>) -> Option<f64> {
    if ticks.is_empty() {
        return None;
    }
    ticks.sort_unstable();
    let n = ticks.len();
    let mid = |i: usize| SimTime::from_ticks(ticks[i]).as_units();
    Some(if n % 2 == 1 { mid(n / 2) } else { 0.5 * (mid(n / 2 - 1) + mid(n / 2)) })
}

/// Response speed over completed traces of `category`: 1 / (1 + median / ref).
pub fn response_speed_of(traces: &[ArcExecutionTrace], category: &ArcCategory, reference_latency: f64) -> IndexScore {
    let latencies: Vec<u64> = traces
        .iter()
        .filter(|t| &t.category == category)
        .filter_map(|t| t.end_to_end_latency())
        .map(SimTime::ticks)
        .collect();
    let count = latencies.len() as u64;
    match median_units(latencies) {
        Some(median) => IndexScore::new(1.0 / (1.0 + median / reference_latency), count),
        None => IndexScore::NO_DATA,
    }
}

/// Completed / (completed + failed) for `category`; suppressed firings are
/// not attempts.
pub fn robustness_of(traces: &[ArcExecutionTrace], category: &ArcCategory) -> IndexScore {
    let mut completed = 0u64;
    let mut attempts = 0u64;
    for t in traces.iter().filter(|t| &t.category == category) {
        match t.outcome {
            Outcome::Completed => {
                completed += 1;
                attempts += 1;
            }
            Outcome::FailedAtStage(_) => attempts += 1,
            Outcome::Suppressed => {}
        }
    }
    if attempts == 0 {
        return IndexScore::NO_DATA;
    }
    IndexScore::new(completed as f64 / attempts as f64, attempts)
}

pub fn arc_response_speed(log: &EventLog, category: &ArcCategory, params: &ScaleParams) -> IndexScore {
    response_speed_of(&log.traces(), category, params.reference_latency_for(category))
}

pub fn arc_robustness(log: &EventLog, category: &ArcCategory) -> IndexScore {
    robustness_of(&log.traces(), category)
}

/// Mean of the scores under the no-data policy; `None` when every score is
/// excluded.
fn policy_mean(scores: &[IndexScore], policy: NoDataPolicy) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for s in scores {
        match (s.is_no_data(), policy) {
            (false, _) => {
                sum += s.value;
                n += 1;
            }
            (true, NoDataPolicy::ScoreZero) => n += 1,
            (true, NoDataPolicy::Exclude) => {}
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Scores one registry category from its level-3 indexes.
pub fn score_category(
    category: ArcCategory,
    response_speed: IndexScore,
    robustness: IndexScore,
    policy: NoDataPolicy,
) -> ArcCategoryScores {
    let score = policy_mean(&[response_speed, robustness], policy);
    ArcCategoryScores { category, response_speed, robustness, score }
}

/// Combines already computed indexes into a report.
///
/// `arc_rows` must hold one row per registry member; categories absent from
/// the rows are treated as having no data.
pub fn aggregate(
    network: NetworkIndexes,
    arc_rows: Vec<ArcCategoryScores>,
    params: &ScaleParams,
) -> Result<CityIqReport, IqError> {
    params.validate()?;
    let policy = params.nodata_policy;
    let network_score = policy_mean(&network.as_array(), policy).unwrap_or(0.0);

    let mut rows: BTreeMap<ArcCategory, ArcCategoryScores> =
        arc_rows.into_iter().map(|r| (r.category.clone(), r)).collect();
    let arc_indexes: Vec<ArcCategoryScores> = params
        .registry
        .members()
        .map(|cat| {
            rows.remove(&cat)
                .unwrap_or_else(|| score_category(cat, IndexScore::NO_DATA, IndexScore::NO_DATA, policy))
        })
        .collect();
    let included: Vec<f64> = arc_indexes.iter().filter_map(|r| r.score).collect();
    let arc_score = if included.is_empty() { 0.0 } else { included.iter().sum::<f64>() / included.len() as f64 };

    let city_iq = 100.0 * (params.weight_network * network_score + params.weight_arcs * arc_score);
    Ok(CityIqReport {
        network_indexes: network,
        arc_indexes,
        level1: Level1 { network_score, arc_score },
        city_iq,
        scale_version: params.registry.version(),
    })
}

/// Full City IQ evaluation of one run. `window` is the measurement period
/// for activeness, normally `[0, horizon]`.
pub fn compute_city_iq(
    graph: &BigSnsGraph,
    log: &EventLog,
    census: &Census,
    params: &ScaleParams,
    window: Window,
) -> Result<CityIqReport, IqError> {
    params.validate()?;
    let network = NetworkIndexes {
        robustness: network_robustness(log),
        uniformity: network_uniformity(graph),
        coverage: network_coverage(graph, census),
        activeness: network_activeness(log, graph, window, params.activeness_half_rate),
    };
    let traces = log.traces();
    let rows = params
        .registry
        .members()
        .map(|cat| {
            let speed = response_speed_of(&traces, &cat, params.reference_latency_for(&cat));
            let robust = robustness_of(&traces, &cat);
            score_category(cat, speed, robust, params.nodata_policy)
        })
        .collect();
    aggregate(network, rows, params)
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RegistryRepr {
        #[serde(default)]
        extensions: Vec<ArcCategory>,
        #[serde(default)]
        revision: u32,
    }

    impl Serialize for CategoryRegistry {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            RegistryRepr { extensions: self.extensions.clone(), revision: self.revision }.serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for CategoryRegistry {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let r = RegistryRepr::deserialize(d)?;
            CategoryRegistry::from_parts(r.extensions, r.revision).map_err(serde::de::Error::custom)
        }
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct ScaleRepr {
        #[serde(default)]
        reference_latency: BTreeMap<ArcCategory, f64>,
        #[serde(default = "one")]
        activeness_half_rate: f64,
        #[serde(default = "half")]
        weight_network: f64,
        #[serde(default = "half")]
        weight_arcs: f64,
        #[serde(default)]
        nodata_policy: NoDataPolicy,
        #[serde(default)]
        registry: CategoryRegistry,
    }

    fn one() -> f64 {
        1.0
    }

    fn half() -> f64 {
        0.5
    }

    impl Serialize for ScaleParams {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            ScaleRepr {
                reference_latency: self.reference_latency.clone(),
                activeness_half_rate: self.activeness_half_rate,
                weight_network: self.weight_network,
                weight_arcs: self.weight_arcs,
                nodata_policy: self.nodata_policy,
                registry: self.registry.clone(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for ScaleParams {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let r = ScaleRepr::deserialize(d)?;
            Ok(ScaleParams {
                reference_latency: r.reference_latency,
                activeness_half_rate: r.activeness_half_rate,
                weight_network: r.weight_network,
                weight_arcs: r.weight_arcs,
                nodata_policy: r.nodata_policy,
                registry: r.registry,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Details;
    use crate::graph::{Neuron, NeuronKind};
    use crate::reflex::Stage;
    use alloc::string::ToString;
    use alloc::vec;

    fn secs(u: f64) -> SimTime {
        SimTime::from_units(u).unwrap()
    }

    fn messages(sent: usize, dropped: usize) -> EventLog {
        let mut log = EventLog::new();
        for i in 0..sent {
            let msg = format!("m{i}");
            log.append(SimTime::ZERO, EventKind::MessageSent, vec![], Details::new().with(keys::MSG, &msg).build());
            let kind = if i < dropped { EventKind::MessageDropped } else { EventKind::MessageDelivered };
            log.append(SimTime::ZERO, kind, vec![], Details::new().with(keys::MSG, &msg).build());
        }
        log
    }

    #[test]
    fn robustness_examples() {
        assert_eq!(network_robustness(&messages(100, 0)).value, 1.0);
        assert_eq!(network_robustness(&messages(100, 25)).value, 0.75);
        assert!(network_robustness(&EventLog::new()).is_no_data());
    }

    fn posts_log(count: usize) -> EventLog {
        let mut log = EventLog::new();
        for i in 0..count {
            let d = Details::new().with(keys::MSG, format!("post/{i}")).with(keys::CHANNEL, SNS_CHANNEL).build();
            log.append(secs(i as f64 * 0.5), EventKind::MessageSent, vec!["n".into()], d.clone());
            log.append(secs(i as f64 * 0.5), EventKind::MessageDelivered, vec!["n".into()], d);
        }
        log
    }

    fn humans(n: usize) -> BigSnsGraph {
        let mut g = BigSnsGraph::new();
        for i in 0..n {
            g.register_neuron(Neuron::new(format!("h{i}"), NeuronKind::Human)).unwrap();
        }
        g
    }

    #[test]
    fn activeness_examples() {
        let w = Window::new(SimTime::ZERO, secs(10.0));
        assert_eq!(network_activeness(&EventLog::new(), &humans(3), w, 1.0).value, 0.0);
        // 12 posts / (3 neurons * 10) = 0.4; 0.4 / 1.4
        let a = network_activeness(&posts_log(12), &humans(3), w, 1.0);
        assert!((a.value - 0.4 / 1.4).abs() < 1e-15);
        assert!((a.value - 0.2857).abs() < 1e-4);
        // rate equal to the half rate
        let half = network_activeness(&posts_log(12), &humans(3), w, 0.4);
        assert!((half.value - 0.5).abs() < 1e-15);
    }

    fn trace(cat: &str, outcome: Outcome, latency: Option<f64>, id: usize) -> ArcExecutionTrace {
        let mut times = [None; 5];
        match outcome {
            Outcome::Completed => {
                let l = latency.unwrap();
                times = [Some(secs(0.0)), Some(secs(0.0)), Some(secs(0.0)), Some(secs(0.0)), Some(secs(l))];
            }
            Outcome::Suppressed => times[..3].copy_from_slice(&[Some(secs(0.0)); 3]),
            Outcome::FailedAtStage(s) => {
                for t in times.iter_mut().take(s.index()) {
                    *t = Some(secs(0.0));
                }
            }
        }
        ArcExecutionTrace {
            arc_id: "arc".into(),
            stimulus_id: id.to_string(),
            category: ArcCategory::new(cat),
            stage_times: times,
            outcome,
        }
    }

    #[test]
    fn response_speed_examples() {
        let sec = ArcCategory::new("Security");
        let zero = [trace("Security", Outcome::Completed, Some(0.0), 0)];
        assert_eq!(response_speed_of(&zero, &sec, 1.0).value, 1.0);
        let at_ref = [trace("Security", Outcome::Completed, Some(2.0), 0)];
        assert_eq!(response_speed_of(&at_ref, &sec, 2.0).value, 0.5);
        let three: Vec<_> = [2.0, 4.0, 6.0].iter().enumerate().map(|(i, &l)| trace("Security", Outcome::Completed, Some(l), i)).collect();
        let s = response_speed_of(&three, &sec, 2.0);
        assert!((s.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.sample_count, 3);
        assert!(response_speed_of(&[], &sec, 1.0).is_no_data());
    }

    #[test]
    fn robustness_excludes_suppressed() {
        let sec = ArcCategory::new("Security");
        let mut ts: Vec<_> = (0..10).map(|i| trace("Security", Outcome::Completed, Some(1.0), i)).collect();
        assert_eq!(robustness_of(&ts, &sec).value, 1.0);
        ts.clear();
        for i in 0..3 {
            ts.push(trace("Security", Outcome::Completed, Some(1.0), i));
        }
        ts.push(trace("Security", Outcome::FailedAtStage(Stage::AfferentDelivered), None, 3));
        for i in 4..10 {
            ts.push(trace("Security", Outcome::Suppressed, None, i));
        }
        assert_eq!(robustness_of(&ts, &sec).value, 0.75);
        let all_suppressed: Vec<_> = (0..4).map(|i| trace("Security", Outcome::Suppressed, None, i)).collect();
        assert!(robustness_of(&all_suppressed, &sec).is_no_data());
    }

    fn perfect_network() -> NetworkIndexes {
        let one = IndexScore::new(1.0, 1);
        NetworkIndexes { robustness: one, uniformity: one, coverage: one, activeness: one }
    }

    #[test]
    fn perfect_city_scores_100() {
        let params = ScaleParams::default();
        let rows = params
            .registry
            .members()
            .map(|c| score_category(c, IndexScore::new(1.0, 1), IndexScore::new(1.0, 1), params.nodata_policy))
            .collect();
        let r = aggregate(perfect_network(), rows, &params).unwrap();
        assert_eq!(r.city_iq, 100.0);
        assert_eq!(r.arc_indexes.len(), 12);
        assert_eq!(r.scale_version, "2017");
    }

    #[test]
    fn single_security_arc_aggregation() {
        let params = ScaleParams::default();
        let rows = vec![score_category(
            ArcCategory::new("Security"),
            IndexScore::new(0.5, 4),
            IndexScore::new(1.0, 4),
            params.nodata_policy,
        )];
        let r = aggregate(perfect_network(), rows, &params).unwrap();
        assert_eq!(r.level1.arc_score, 0.0625);
        assert_eq!(r.city_iq, 53.125);
        assert_eq!(r.arc_indexes.iter().filter(|a| a.score == Some(0.0)).count(), 11);
    }

    #[test]
    fn exclude_policy_drops_missing() {
        let params = ScaleParams { nodata_policy: NoDataPolicy::Exclude, ..ScaleParams::default() };
        let rows = vec![score_category(ArcCategory::new("Traffic"), IndexScore::new(0.5, 1), IndexScore::NO_DATA, NoDataPolicy::Exclude)];
        let mut net = perfect_network();
        net.activeness = IndexScore::NO_DATA;
        let r = aggregate(net, rows, &params).unwrap();
        assert_eq!(r.level1.network_score, 1.0);
        assert_eq!(r.level1.arc_score, 0.5);
        assert_eq!(r.arc_indexes.iter().filter(|a| a.score.is_none()).count(), 11);
    }

    #[test]
    fn lone_neuron_empty_log() {
        let mut g = BigSnsGraph::new();
        g.register_neuron(Neuron::new("solo", NeuronKind::Human)).unwrap();
        let census = Census { resident: 4, ..Census::default() };
        let r = compute_city_iq(&g, &EventLog::new(), &census, &ScaleParams::default(), Window::new(SimTime::ZERO, secs(10.0))).unwrap();
        // robustness NoData -> 0, uniformity 1, coverage 1/4, activeness 0
        assert_eq!(r.level1.network_score, 0.3125);
        assert_eq!(r.level1.arc_score, 0.0);
        assert_eq!(r.city_iq, 15.625);
    }

    #[test]
    fn registry_edits() {
        let mut reg = CategoryRegistry::standard();
        assert_eq!(reg.len(), 12);
        reg.extend("Waste").unwrap();
        assert_eq!(reg.len(), 13);
        assert_eq!(reg.version(), "2017-r1");
        assert_eq!(reg.extend("Security"), Err(RegistryError::DuplicateCategory(ArcCategory::new("Security"))));
        assert_eq!(reg.remove("Finance"), Err(RegistryError::ProtectedCategory(ArcCategory::new("Finance"))));
        reg.remove("Waste").unwrap();
        assert_eq!(reg.len(), 12);
        assert_eq!(reg.version(), "2017-r2");
    }

    #[test]
    fn invalid_params_rejected() {
        let p = ScaleParams { weight_network: 0.7, ..ScaleParams::default() };
        assert!(matches!(p.validate(), Err(IqError::InvalidParams(_))));
        let mut p = ScaleParams::default();
        p.reference_latency.insert(ArcCategory::new("Security"), 0.0);
        assert!(p.validate().is_err());
        let p = ScaleParams { activeness_half_rate: 0.0, ..ScaleParams::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn adding_positive_category_never_lowers_arc_score() {
        // with ScoreZero every registry member is in the denominator already
        let params = ScaleParams::default();
        let base = vec![score_category(ArcCategory::new("Security"), IndexScore::new(0.4, 1), IndexScore::new(0.9, 1), params.nodata_policy)];
        let mut more = base.clone();
        more.push(score_category(ArcCategory::new("Energy"), IndexScore::new(0.1, 1), IndexScore::new(0.2, 1), params.nodata_policy));
        let a = aggregate(perfect_network(), base, &params).unwrap().level1.arc_score;
        let b = aggregate(perfect_network(), more, &params).unwrap().level1.arc_score;
        assert!(b >= a);
    }
}
