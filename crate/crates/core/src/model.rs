//! Finite reduction systems, encodings between them, and the combined
//! source-plus-target domain the lemma relations live on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predicate::{is_token, Predicate};
use crate::rel::{Carrier, Rel};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(String);

impl StateId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if !is_token(&name) {
            return Err(Error::Parse(format!(
                "invalid state id {name:?}: must be non-empty without whitespace or commas"
            )));
        }
        Ok(StateId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for StateId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Unvalidated description of one language, as it appears in instance files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub states: Vec<String>,
    #[serde(default)]
    pub steps: Vec<(String, String)>,
    #[serde(default)]
    pub barbs: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub success: Vec<String>,
}

/// Unvalidated description of an encoding instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub source: SystemSpec,
    pub target: SystemSpec,
    pub encoding: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Source,
    Target,
}

impl Side {
    pub fn carrier(self) -> Carrier {
        match self {
            Side::Source => Carrier::Source,
            Side::Target => Carrier::Target,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

/// A finite language: states, an unlabelled step relation, barbs and a
/// success set. Weak derivatives and divergence are precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionSystem {
    names: Vec<StateId>,
    index: BTreeMap<StateId, usize>,
    successors: Vec<Vec<usize>>,
    barbs: Vec<BTreeSet<String>>,
    success: Vec<bool>,
    derivatives: Vec<FixedBitSet>,
    divergent: Vec<bool>,
}

impl ReductionSystem {
    /// Validates `spec` and orders its states lexicographically. `label`
    /// names the section in error messages.
    pub fn from_spec(spec: &SystemSpec, label: &str) -> Result<Self> {
        let mut names = Vec::with_capacity(spec.states.len());
        let mut seen = BTreeSet::new();
        for raw in &spec.states {
            let id = StateId::new(raw.clone()).map_err(|e| Error::Parse(format!("{label}.states: {e}")))?;
            if !seen.insert(id.clone()) {
                return Err(Error::Parse(format!("{label}.states: duplicate state `{raw}`")));
            }
            names.push(id);
        }
        names.sort();
        let index: BTreeMap<StateId, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let lookup =
            |name: &str, context: String| index.get(name).copied().ok_or_else(|| Error::unknown_state(name, context));

        let mut steps = Vec::with_capacity(spec.steps.len());
        for (k, (from, to)) in spec.steps.iter().enumerate() {
            let a = lookup(from, format!("{label}.steps[{k}]"))?;
            let b = lookup(to, format!("{label}.steps[{k}]"))?;
            steps.push((a, b));
        }
        let mut barbs = vec![BTreeSet::new(); names.len()];
        for (state, list) in &spec.barbs {
            let i = lookup(state, format!("{label}.barbs"))?;
            for barb in list {
                if !is_token(barb) {
                    return Err(Error::Parse(format!("{label}.barbs.{state}: invalid barb name {barb:?}")));
                }
                barbs[i].insert(barb.clone());
            }
        }
        let mut success = vec![false; names.len()];
        for state in &spec.success {
            success[lookup(state, format!("{label}.success"))?] = true;
        }
        Ok(Self::assemble(names, steps, barbs, success))
    }

    /// Builds a system whose state order is exactly `names`.
    pub(crate) fn assemble(
        names: Vec<StateId>,
        steps: Vec<(usize, usize)>,
        barbs: Vec<BTreeSet<String>>,
        success: Vec<bool>,
    ) -> Self {
        let n = names.len();
        let index = names.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut successors = vec![Vec::new(); n];
        for (a, b) in steps {
            successors[a].push(b);
        }
        for succ in &mut successors {
            succ.sort_unstable();
            succ.dedup();
        }
        let derivatives: Vec<FixedBitSet> = (0..n).map(|s| reachable(&successors, s)).collect();
        // A state lies on a cycle iff it is a weak derivative of one of its successors.
        let on_cycle: Vec<bool> = (0..n).map(|u| successors[u].iter().any(|&v| derivatives[v].contains(u))).collect();
        let divergent = derivatives.iter().map(|d| d.ones().any(|u| on_cycle[u])).collect();
        ReductionSystem { names, index, successors, barbs, success, derivatives, divergent }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[StateId] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &StateId {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::unknown_state(name, "query"))
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// All states reachable in zero or more steps, including `i` itself.
    pub fn derivatives(&self, i: usize) -> &FixedBitSet {
        &self.derivatives[i]
    }

    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
    }

    pub fn step_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn divergent_at(&self, i: usize) -> bool {
        self.divergent[i]
    }

    pub fn barbs_at(&self, i: usize) -> &BTreeSet<String> {
        &self.barbs[i]
    }

    pub fn success_at(&self, i: usize) -> bool {
        self.success[i]
    }

    pub fn barb_alphabet(&self) -> BTreeSet<String> {
        self.barbs.iter().flatten().cloned().collect()
    }

    pub fn holds(&self, i: usize, pred: &Predicate) -> bool {
        match pred {
            Predicate::HasBarb(a) => self.barbs[i].contains(a),
            Predicate::ReachesBarb(a) => self.derivatives[i].ones().any(|j| self.barbs[j].contains(a)),
            Predicate::HasSuccess => self.success[i],
            Predicate::ReachesSuccess => self.derivatives[i].ones().any(|j| self.success[j]),
            Predicate::Divergent => self.divergent[i],
        }
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            states: self.names.iter().map(ToString::to_string).collect(),
            steps: self.steps().map(|(a, b)| (self.names[a].to_string(), self.names[b].to_string())).collect(),
            barbs: self
                .barbs
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_empty())
                .map(|(i, b)| (self.names[i].to_string(), b.iter().cloned().collect()))
                .collect(),
            success: (0..self.len()).filter(|&i| self.success[i]).map(|i| self.names[i].to_string()).collect(),
        }
    }
}

fn reachable(successors: &[Vec<usize>], start: usize) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(successors.len());
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(s) = queue.pop_front() {
        for &t in &successors[s] {
            if !seen.put(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// The disjoint union of source and target. Source states come first, each
/// side in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinedDomain {
    system: ReductionSystem,
    source_len: usize,
}

impl CombinedDomain {
    pub fn system(&self) -> &ReductionSystem {
        &self.system
    }

    pub fn len(&self) -> usize {
        self.system.len()
    }

    pub fn is_empty(&self) -> bool {
        self.system.is_empty()
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn origin(&self, i: usize) -> Side {
        if i < self.source_len {
            Side::Source
        } else {
            Side::Target
        }
    }

    pub fn is_source(&self, i: usize) -> bool {
        i < self.source_len
    }

    pub fn is_target(&self, i: usize) -> bool {
        i >= self.source_len && i < self.len()
    }

    pub fn source_indices(&self) -> std::ops::Range<usize> {
        0..self.source_len
    }

    pub fn target_indices(&self) -> std::ops::Range<usize> {
        self.source_len..self.len()
    }

    /// Combined index of a side-local index.
    pub fn embed(&self, side: Side, i: usize) -> usize {
        match side {
            Side::Source => i,
            Side::Target => self.source_len + i,
        }
    }

    /// Moves a source- or target-carried relation onto the combined carrier.
    pub fn lift(&self, rel: &Rel) -> Rel {
        let offset = match rel.carrier() {
            Carrier::Combined => return rel.clone(),
            Carrier::Source => 0,
            Carrier::Target => self.source_len,
        };
        Rel::from_pairs(Carrier::Combined, self.len(), rel.pairs().map(|(a, b)| (a + offset, b + offset)))
    }

    /// Restricts a combined relation to one side and re-indexes it onto that
    /// side's carrier.
    pub fn project(&self, rel: &Rel, side: Side) -> Rel {
        assert_eq!(rel.carrier(), Carrier::Combined);
        let (range, offset) = match side {
            Side::Source => (self.source_indices(), 0),
            Side::Target => (self.target_indices(), self.source_len),
        };
        Rel::from_pairs(
            side.carrier(),
            range.len(),
            rel.pairs().filter(|(a, b)| range.contains(a) && range.contains(b)).map(|(a, b)| (a - offset, b - offset)),
        )
    }
}

/// A checked encoding: two disjoint languages and a total translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingInstance {
    source: ReductionSystem,
    target: ReductionSystem,
    mapping: Vec<usize>,
    combined: CombinedDomain,
}

impl EncodingInstance {
    pub fn source(&self) -> &ReductionSystem {
        &self.source
    }

    pub fn target(&self) -> &ReductionSystem {
        &self.target
    }

    pub fn combined(&self) -> &CombinedDomain {
        &self.combined
    }

    /// Target index of the translation of source state `s`.
    pub fn translate(&self, s: usize) -> usize {
        self.mapping[s]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    /// Combined index of the translation of source state `s`.
    pub fn translate_combined(&self, s: usize) -> usize {
        self.combined.embed(Side::Target, self.mapping[s])
    }

    pub fn system(&self, side: Side) -> &ReductionSystem {
        match side {
            Side::Source => &self.source,
            Side::Target => &self.target,
        }
    }

    pub fn carrier_size(&self, carrier: Carrier) -> usize {
        match carrier {
            Carrier::Source => self.source.len(),
            Carrier::Target => self.target.len(),
            Carrier::Combined => self.combined.len(),
        }
    }

    pub fn carrier_names(&self, carrier: Carrier) -> &[StateId] {
        match carrier {
            Carrier::Source => self.source.names(),
            Carrier::Target => self.target.names(),
            Carrier::Combined => self.combined.system().names(),
        }
    }

    pub fn carrier_system(&self, carrier: Carrier) -> &ReductionSystem {
        match carrier {
            Carrier::Source => &self.source,
            Carrier::Target => &self.target,
            Carrier::Combined => self.combined.system(),
        }
    }

    /// Barb names occurring anywhere in the instance.
    pub fn barb_alphabet(&self) -> BTreeSet<String> {
        self.combined.system().barb_alphabet()
    }

    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec {
            source: self.source.to_spec(),
            target: self.target.to_spec(),
            encoding: (0..self.source.len())
                .map(|s| (self.source.name(s).to_string(), self.target.name(self.mapping[s]).to_string()))
                .collect(),
        }
    }
}

/// Checks every instance invariant and returns the validated instance.
pub fn validate_instance(spec: &InstanceSpec) -> Result<EncodingInstance> {
    let source = ReductionSystem::from_spec(&spec.source, "source")?;
    let target = ReductionSystem::from_spec(&spec.target, "target")?;
    if let Some(shared) = source.names().iter().find(|n| target.index_of(n.as_str()).is_some()) {
        return Err(Error::Disjoint(shared.to_string()));
    }
    let mut mapping = vec![None; source.len()];
    for (from, to) in &spec.encoding {
        let s = source.index_of(from).ok_or_else(|| Error::unknown_state(from.as_str(), "encoding (key)"))?;
        let t = target.index_of(to).ok_or_else(|| Error::unknown_state(to.as_str(), format!("encoding.{from}")))?;
        mapping[s] = Some(t);
    }
    let mapping = mapping
        .into_iter()
        .enumerate()
        .map(|(s, t)| t.ok_or_else(|| Error::PartialEncoding(source.name(s).to_string())))
        .collect::<Result<Vec<_>>>()?;
    let combined = combine_systems(&source, &target);
    Ok(EncodingInstance { source, target, mapping, combined })
}

/// The tagged union of both languages of `enc`.
pub fn combine(enc: &EncodingInstance) -> CombinedDomain {
    combine_systems(&enc.source, &enc.target)
}

fn combine_systems(source: &ReductionSystem, target: &ReductionSystem) -> CombinedDomain {
    let offset = source.len();
    let names = source.names().iter().chain(target.names()).cloned().collect();
    let steps = source.steps().chain(target.steps().map(|(a, b)| (a + offset, b + offset))).collect();
    let barbs = source.barbs.iter().chain(&target.barbs).cloned().collect();
    let success = source.success.iter().chain(&target.success).copied().collect();
    CombinedDomain { system: ReductionSystem::assemble(names, steps, barbs, success), source_len: offset }
}

/// Names of the states reachable from `s` in zero or more steps, in state order.
pub fn weak_derivatives(sys: &ReductionSystem, s: &str) -> Result<Vec<StateId>> {
    let i = sys.require(s)?;
    Ok(sys.derivatives(i).ones().map(|j| sys.name(j).clone()).collect())
}

pub fn is_divergent(sys: &ReductionSystem, s: &str) -> Result<bool> {
    Ok(sys.divergent_at(sys.require(s)?))
}

pub fn holds_predicate(sys: &ReductionSystem, s: &str, pred: &Predicate) -> Result<bool> {
    Ok(sys.holds(sys.require(s)?, pred))
}
