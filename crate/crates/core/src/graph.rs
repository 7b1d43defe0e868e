//! The Big SNS: every resident, organization, device and program in the city
//! holds an account, posts status and follows other accounts.
//!
//! Edges are directed for delivery but treated as undirected by the network
//! metrics.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::delay::DelayModel;
use crate::time::SimTime;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct NeuronId(pub String);

impl NeuronId {
    pub fn new(id: impl Into<String>) -> Self {
        NeuronId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NeuronKind {
    Human,
    Organization,
    Sensor,
    SmartDevice,
    SmartProgram,
}

impl NeuronKind {
    pub const ALL: [NeuronKind; 5] = [
        NeuronKind::Human,
        NeuronKind::Organization,
        NeuronKind::Sensor,
        NeuronKind::SmartDevice,
        NeuronKind::SmartProgram,
    ];

    /// Census bucket a neuron of this kind falls into unless the scenario
    /// says otherwise.
    pub fn default_census_category(self) -> CensusCategory {
        match self {
            NeuronKind::Human => CensusCategory::Resident,
            NeuronKind::Organization => CensusCategory::BusinessOrg,
            NeuronKind::Sensor | NeuronKind::SmartDevice | NeuronKind::SmartProgram => {
                CensusCategory::CityEquipment
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CensusCategory {
    Resident,
    BusinessOrg,
    GovernmentAgency,
    CityEquipment,
}

impl CensusCategory {
    pub const ALL: [CensusCategory; 4] = [
        CensusCategory::Resident,
        CensusCategory::BusinessOrg,
        CensusCategory::GovernmentAgency,
        CensusCategory::CityEquipment,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Neuron {
    pub id: NeuronId,
    pub kind: NeuronKind,
    pub census_category: CensusCategory,
    pub system_label: String,
    pub display_name: String,
    /// Reaction profile for human neurons; `None` means the default.
    pub reaction: Option<DelayModel>,
}

impl Neuron {
    pub fn new(id: impl Into<String>, kind: NeuronKind) -> Self {
        let id = id.into();
        Neuron {
            display_name: id.clone(),
            id: NeuronId(id),
            kind,
            census_category: kind.default_census_category(),
            system_label: String::new(),
            reaction: None,
        }
    }

    pub fn with_census(mut self, category: CensusCategory) -> Self {
        self.census_category = category;
        self
    }

    pub fn with_system(mut self, label: impl Into<String>) -> Self {
        self.system_label = label.into();
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.display_name = name.into();
        self
    }

    pub fn with_reaction(mut self, profile: DelayModel) -> Self {
        self.reaction = Some(profile);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct FollowEdge {
    pub from: NeuronId,
    pub to: NeuronId,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PayloadKind {
    #[default]
    Status,
    Alarm,
    Command,
    Chat,
}

impl PayloadKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PayloadKind::Status => "Status",
            PayloadKind::Alarm => "Alarm",
            PayloadKind::Command => "Command",
            PayloadKind::Chat => "Chat",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Post {
    pub author: NeuronId,
    pub timestamp: SimTime,
    pub payload_kind: PayloadKind,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("neuron `{0}` is already registered")]
    DuplicateId(NeuronId),
    #[error("unknown neuron `{0}`")]
    UnknownNeuron(NeuronId),
    #[error("neuron `{0}` cannot follow itself")]
    SelfLoop(NeuronId),
    #[error("graph has no neurons")]
    EmptyGraph,
    #[error("every census count is zero")]
    AllCensusZero,
    #[error("post at {at} precedes the last post of `{author}`")]
    TimelineRegression { author: NeuronId, at: SimTime },
}

#[derive(Clone, Debug, Default)]
pub struct BigSnsGraph {
    neurons: Vec<Neuron>,
    index: BTreeMap<NeuronId, usize>,
    edges: BTreeSet<(usize, usize)>,
    timelines: Vec<Vec<Post>>,
}

impl BigSnsGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_neuron(&mut self, neuron: Neuron) -> Result<NeuronId, GraphError> {
        if self.index.contains_key(&neuron.id) {
            return Err(GraphError::DuplicateId(neuron.id));
        }
        let id = neuron.id.clone();
        self.index.insert(id.clone(), self.neurons.len());
        self.neurons.push(neuron);
        self.timelines.push(Vec::new());
        Ok(id)
    }

    /// Adds a follow edge; repeating an existing edge is a no-op.
    pub fn connect(&mut self, from: &NeuronId, to: &NeuronId) -> Result<FollowEdge, GraphError> {
        let a = self.slot(from)?;
        let b = self.slot(to)?;
        if a == b {
            return Err(GraphError::SelfLoop(from.clone()));
        }
        self.edges.insert((a, b));
        Ok(FollowEdge { from: from.clone(), to: to.clone() })
    }

    pub fn post_status(
        &mut self,
        author: &NeuronId,
        time: SimTime,
        payload_kind: PayloadKind,
        body: impl Into<String>,
    ) -> Result<Post, GraphError> {
        let slot = self.slot(author)?;
        let timeline = &mut self.timelines[slot];
        if timeline.last().is_some_and(|p| p.timestamp > time) {
            return Err(GraphError::TimelineRegression { author: author.clone(), at: time });
        }
        let post = Post { author: author.clone(), timestamp: time, payload_kind, body: body.into() };
        timeline.push(post.clone());
        Ok(post)
    }

    fn slot(&self, id: &NeuronId) -> Result<usize, GraphError> {
        self.index.get(id).copied().ok_or_else(|| GraphError::UnknownNeuron(id.clone()))
    }

    pub fn neuron(&self, id: &NeuronId) -> Option<&Neuron> {
        self.index.get(id).map(|&i| &self.neurons[i])
    }

    pub fn contains(&self, id: &NeuronId) -> bool {
        self.index.contains_key(id)
    }

    pub fn neurons(&self) -> impl Iterator<Item = &Neuron> {
        self.neurons.iter()
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: &NeuronId, to: &NeuronId) -> bool {
        match (self.index.get(from), self.index.get(to)) {
            (Some(&a), Some(&b)) => self.edges.contains(&(a, b)),
            _ => false,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = FollowEdge> + '_ {
        self.edges.iter().map(|&(a, b)| FollowEdge {
            from: self.neurons[a].id.clone(),
            to: self.neurons[b].id.clone(),
        })
    }

    pub fn timeline(&self, id: &NeuronId) -> Option<&[Post]> {
        self.index.get(id).map(|&i| self.timelines[i].as_slice())
    }

    pub fn post_count(&self) -> usize {
        self.timelines.iter().map(Vec::len).sum()
    }

    /// Neurons reachable from `start` following edge direction, `start`
    /// excluded.
    pub fn reachable_from(&self, start: &NeuronId) -> Result<BTreeSet<NeuronId>, GraphError> {
        let s = self.slot(start)?;
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.neurons.len()];
        for &(a, b) in &self.edges {
            out[a].push(b);
        }
        let mut seen = vec![false; self.neurons.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut found = BTreeSet::new();
        while let Some(n) = queue.pop_front() {
            for &m in &out[n] {
                if !seen[m] {
                    seen[m] = true;
                    found.insert(self.neurons[m].id.clone());
                    queue.push_back(m);
                }
            }
        }
        Ok(found)
    }

    /// Sizes of the undirected connected components, largest first.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.neurons.len());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..self.neurons.len() {
            *sizes.entry(uf.find(i)).or_default() += 1;
        }
        let mut sizes: Vec<usize> = sizes.into_values().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// |largest undirected component| / |neurons|.
    pub fn largest_component_fraction(&self) -> Result<f64, GraphError> {
        if self.neurons.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let largest = self.component_sizes().first().copied().unwrap_or(0);
        Ok(largest as f64 / self.neurons.len() as f64)
    }

    /// Number of distinct subsystem labels. Diagnostic only; not scored.
    pub fn system_count(&self) -> usize {
        self.neurons.iter().map(|n| n.system_label.as_str()).collect::<BTreeSet<_>>().len()
    }

    pub fn registered_counts(&self) -> [u64; 4] {
        let mut counts = [0u64; 4];
        for n in &self.neurons {
            counts[n.census_category.index()] += 1;
        }
        counts
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Population counts per census category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct Census {
    pub resident: u64,
    pub business_org: u64,
    pub government_agency: u64,
    pub city_equipment: u64,
}

impl Census {
    pub fn get(&self, category: CensusCategory) -> u64 {
        match category {
            CensusCategory::Resident => self.resident,
            CensusCategory::BusinessOrg => self.business_org,
            CensusCategory::GovernmentAgency => self.government_agency,
            CensusCategory::CityEquipment => self.city_equipment,
        }
    }

    pub fn set(&mut self, category: CensusCategory, count: u64) {
        match category {
            CensusCategory::Resident => self.resident = count,
            CensusCategory::BusinessOrg => self.business_org = count,
            CensusCategory::GovernmentAgency => self.government_agency = count,
            CensusCategory::CityEquipment => self.city_equipment = count,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageBreakdown {
    /// `None` for categories with a zero census (not scored).
    pub ratios: [Option<f64>; 4],
    pub mean: f64,
}

/// Per-category min(1, registered / census) and their mean over categories
/// with a nonzero census.
pub fn census_coverage(graph: &BigSnsGraph, census: &Census) -> Result<CoverageBreakdown, GraphError> {
    let registered = graph.registered_counts();
    let mut ratios = [None; 4];
    let mut sum = 0.0;
    let mut scored = 0usize;
    for cat in CensusCategory::ALL {
        let total = census.get(cat);
        if total == 0 {
            continue;
        }
        let ratio = (registered[cat.index()] as f64 / total as f64).min(1.0);
        ratios[cat.index()] = Some(ratio);
        sum += ratio;
        scored += 1;
    }
    if scored == 0 {
        return Err(GraphError::AllCensusZero);
    }
    Ok(CoverageBreakdown { ratios, mean: sum / scored as f64 })
}
