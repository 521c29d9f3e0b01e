//! Labeled pair sampling and stratified dataset splits.
//!
//! Every sampler is a pure function of the graph, its parameters and a
//! 64-bit seed. Each operation draws from its own ChaCha stream so that
//! reusing one seed across operations does not correlate their draws.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::CoreError;
use crate::graph::{ConceptGraph, SchemaDialect};
use crate::jsonl;
use crate::label::RelationLabel;

const STREAM_HIERARCHY: u64 = 1;
const STREAM_OTHER: u64 = 2;
const STREAM_SPLIT: u64 = 3;
const STREAM_SUBSAMPLE: u64 = 4;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    HierarchyEdge,
    AdjudicatedCandidate,
    RelatedEdge,
    RandomNegative,
}

/// The dataset atom: an ordered topic pair and its relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub pair_id: String,
    pub topic_a: String,
    pub topic_b: String,
    pub label: RelationLabel,
    pub source: String,
    pub provenance: Provenance,
}

/// A same-as candidate awaiting human review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub pair_id: String,
    pub topic_a: String,
    pub topic_b: String,
    pub source: String,
    pub context: String,
}

impl CandidatePair {
    pub fn into_same_as(self, provenance: Provenance) -> LabeledPair {
        LabeledPair {
            pair_id: self.pair_id,
            topic_a: self.topic_a,
            topic_b: self.topic_b,
            label: RelationLabel::SameAs,
            source: self.source,
            provenance,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("need {needed} usable hierarchy edges, graph has {available}")]
    InsufficientEdges { needed: usize, available: usize },
    #[error("gave up after {attempts} draws with {accepted} unlinked pairs found")]
    ExhaustedCandidates { attempts: usize, accepted: usize },
    #[error("asked for {needed} pairs but only {available} are available")]
    InsufficientPairs { needed: usize, available: usize },
    #[error("split ratios must be non-negative and sum to 1, got {0}")]
    InvalidRatios(String),
    #[error("cannot split an empty pair list")]
    EmptyInput,
    #[error("pair id {0} appears more than once")]
    DuplicatePairId(String),
    #[error("pair ({topic_a:?}, {topic_b:?}, {label}) appears more than once")]
    DuplicateTuple {
        topic_a: String,
        topic_b: String,
        label: RelationLabel,
    },
}

fn pair_id(source: &str, code: &str, index: usize) -> String {
    format!("{source}:{code}:{index:05}")
}

/// Draws `n_per_label` broader and `n_per_label` narrower pairs from
/// disjoint hierarchy edges.
pub fn sample_hierarchical(
    graph: &ConceptGraph,
    n_per_label: usize,
    seed: u64,
    source: &str,
) -> Result<Vec<LabeledPair>, DatasetError> {
    // (child label, parent label), one edge per unordered label pair
    let mut seen = HashSet::new();
    let mut edges: Vec<(&str, &str)> = Vec::new();
    for (child, parent) in graph.hierarchy_edges() {
        let c = graph.concept(child).expect("edge endpoint").pref_label.as_str();
        let p = graph.concept(parent).expect("edge endpoint").pref_label.as_str();
        if c == p {
            continue;
        }
        let key = if c < p { (c, p) } else { (p, c) };
        if seen.insert(key) {
            edges.push((c, p));
        }
    }
    let needed = 2 * n_per_label;
    if edges.len() < needed {
        return Err(DatasetError::InsufficientEdges {
            needed,
            available: edges.len(),
        });
    }
    let mut rng = rng_for(seed, STREAM_HIERARCHY);
    let (picked, _) = edges.partial_shuffle(&mut rng, needed);
    let (broader, narrower) = picked.split_at(n_per_label);

    let mut out = Vec::with_capacity(needed);
    for (i, (child, parent)) in broader.iter().enumerate() {
        out.push(LabeledPair {
            pair_id: pair_id(source, "br", i),
            topic_a: parent.to_string(),
            topic_b: child.to_string(),
            label: RelationLabel::Broader,
            source: source.to_string(),
            provenance: Provenance::HierarchyEdge,
        });
    }
    for (i, (child, parent)) in narrower.iter().enumerate() {
        out.push(LabeledPair {
            pair_id: pair_id(source, "nr", i),
            topic_a: child.to_string(),
            topic_b: parent.to_string(),
            label: RelationLabel::Narrower,
            source: source.to_string(),
            provenance: Provenance::HierarchyEdge,
        });
    }
    Ok(out)
}

/// Same-as material harvested from a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SameAsHarvest {
    /// Candidates that need human review.
    pub pending: Vec<CandidatePair>,
    /// Related-edge pairs taken directly (MeSH with auto-accept).
    pub accepted: Vec<LabeledPair>,
}

/// Enumerates same-as candidates: `(pref_label, alt_label)` for SKOS
/// sources, one pair per related edge for MeSH.
pub fn extract_sameas_candidates(graph: &ConceptGraph, source: &str) -> Vec<CandidatePair> {
    let mut out = Vec::new();
    match graph.dialect() {
        SchemaDialect::SkosCore => {
            for concept in graph.concepts().values() {
                for alt in &concept.alt_labels {
                    out.push(CandidatePair {
                        pair_id: pair_id(source, "alt", out.len()),
                        topic_a: concept.pref_label.clone(),
                        topic_b: alt.clone(),
                        source: source.to_string(),
                        context: format!("altLabel of {}", concept.id),
                    });
                }
            }
        }
        SchemaDialect::Mesh => {
            for (a, b) in graph.related_edges() {
                let ca = graph.concept(a).expect("edge endpoint");
                let cb = graph.concept(b).expect("edge endpoint");
                if ca.pref_label == cb.pref_label {
                    continue;
                }
                out.push(CandidatePair {
                    pair_id: pair_id(source, "rel", out.len()),
                    topic_a: ca.pref_label.clone(),
                    topic_b: cb.pref_label.clone(),
                    source: source.to_string(),
                    context: format!("relatedConcept {a} ~ {b}"),
                });
            }
        }
    }
    out
}

/// Splits candidates into those needing review and those accepted by
/// configuration. Only MeSH related-edge candidates may be auto-accepted.
pub fn harvest_sameas(graph: &ConceptGraph, source: &str, auto_accept_related: bool) -> SameAsHarvest {
    let candidates = extract_sameas_candidates(graph, source);
    if graph.dialect() == SchemaDialect::Mesh && auto_accept_related {
        SameAsHarvest {
            pending: Vec::new(),
            accepted: candidates
                .into_iter()
                .map(|c| c.into_same_as(Provenance::RelatedEdge))
                .collect(),
        }
    } else {
        SameAsHarvest {
            pending: candidates,
            accepted: Vec::new(),
        }
    }
}

/// Seeded uniform subsample of `n` pairs, in draw order.
pub fn subsample(pairs: &[LabeledPair], n: usize, seed: u64) -> Result<Vec<LabeledPair>, DatasetError> {
    if n > pairs.len() {
        return Err(DatasetError::InsufficientPairs {
            needed: n,
            available: pairs.len(),
        });
    }
    let mut rng = rng_for(seed, STREAM_SUBSAMPLE);
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    let (picked, _) = idx.partial_shuffle(&mut rng, n);
    Ok(picked.iter().map(|&i| pairs[i].clone()).collect())
}

/// Which concept pairs count as semantically linked and therefore may not
/// be labeled `other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExclusionPolicy {
    /// Also exclude ancestor/descendant pairs under the transitive closure
    /// of the hierarchy. When false only direct edges are excluded.
    pub transitive: bool,
    /// Draw budget; defaults to `100 * n`.
    pub max_attempts: Option<usize>,
}

impl Default for ExclusionPolicy {
    fn default() -> Self {
        ExclusionPolicy {
            transitive: true,
            max_attempts: None,
        }
    }
}

/// Precomputed view of a graph used to test whether two concepts are linked.
pub struct LinkIndex<'g> {
    graph: &'g ConceptGraph,
    ids: Vec<&'g str>,
    labels: Vec<HashSet<String>>,
    parents: Vec<Vec<usize>>,
    transitive: bool,
    ancestors: HashMap<usize, HashSet<usize>>,
}

impl<'g> LinkIndex<'g> {
    pub fn new(graph: &'g ConceptGraph, transitive: bool) -> Self {
        let ids: Vec<&str> = graph.concepts().keys().map(String::as_str).collect();
        let pos: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let labels = graph
            .concepts()
            .values()
            .map(|c| {
                std::iter::once(&c.pref_label)
                    .chain(c.alt_labels.iter())
                    .map(|l| l.to_lowercase())
                    .collect()
            })
            .collect();
        let mut parents = vec![Vec::new(); ids.len()];
        for (child, parent) in graph.hierarchy_edges() {
            parents[pos[child.as_str()]].push(pos[parent.as_str()]);
        }
        LinkIndex {
            graph,
            ids,
            labels,
            parents,
            transitive,
            ancestors: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &'g str {
        self.ids[i]
    }

    fn ancestors_of(&mut self, i: usize) -> &HashSet<usize> {
        if !self.ancestors.contains_key(&i) {
            let mut seen = HashSet::new();
            let mut stack = self.parents[i].clone();
            while let Some(n) = stack.pop() {
                if seen.insert(n) {
                    stack.extend(self.parents[n].iter().copied());
                }
            }
            self.ancestors.insert(i, seen);
        }
        &self.ancestors[&i]
    }

    /// True when the policy forbids labeling `(i, j)` as `other`.
    pub fn linked(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        if self.parents[i].contains(&j) || self.parents[j].contains(&i) {
            return true;
        }
        if self.graph.is_related(self.ids[i], self.ids[j]) {
            return true;
        }
        if !self.labels[i].is_disjoint(&self.labels[j]) {
            return true;
        }
        self.transitive && (self.ancestors_of(i).contains(&j) || self.ancestors_of(j).contains(&i))
    }
}

/// Draws `n` unlinked ordered concept pairs labeled `other`. A pair and its
/// mirror are never both emitted.
pub fn sample_other(
    graph: &ConceptGraph,
    n: usize,
    seed: u64,
    source: &str,
    policy: ExclusionPolicy,
) -> Result<Vec<LabeledPair>, DatasetError> {
    let max_attempts = policy.max_attempts.unwrap_or(100 * n);
    let mut index = LinkIndex::new(graph, policy.transitive);
    let mut rng = rng_for(seed, STREAM_OTHER);
    let mut used: HashSet<(String, String)> = HashSet::new();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    let count = index.len();

    while out.len() < n {
        if attempts >= max_attempts || count < 2 {
            return Err(DatasetError::ExhaustedCandidates {
                attempts,
                accepted: out.len(),
            });
        }
        attempts += 1;
        let i = rng.random_range(0..count);
        let mut j = rng.random_range(0..count - 1);
        if j >= i {
            j += 1;
        }
        if index.linked(i, j) {
            continue;
        }
        let a = &graph.concept(index.id(i)).expect("indexed").pref_label;
        let b = &graph.concept(index.id(j)).expect("indexed").pref_label;
        let (la, lb) = (a.to_lowercase(), b.to_lowercase());
        let key = if la <= lb { (la, lb) } else { (lb, la) };
        if !used.insert(key) {
            continue;
        }
        out.push(LabeledPair {
            pair_id: pair_id(source, "ot", out.len()),
            topic_a: a.clone(),
            topic_b: b.clone(),
            label: RelationLabel::Other,
            source: source.to_string(),
            provenance: Provenance::RandomNegative,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    #[serde(rename = "val", alias = "validation")]
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    /// File-name component: `train`, `val` or `test`.
    pub fn file_tag(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_tag())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" | "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split {s:?}")),
        }
    }
}

/// Train/validation/test proportions (exact rationals) and shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    ratios: [Ratio<u64>; 3],
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: Ratio<u64>, validation: Ratio<u64>, test: Ratio<u64>, seed: u64) -> Result<Self, DatasetError> {
        if train + validation + test != Ratio::from_integer(1) {
            return Err(DatasetError::InvalidRatios(format!("{train} + {validation} + {test}")));
        }
        Ok(SplitSpec {
            ratios: [train, validation, test],
            seed,
        })
    }

    /// Parses ratios written as `"7/10"` or `"0"`.
    pub fn parse(train: &str, validation: &str, test: &str, seed: u64) -> Result<Self, DatasetError> {
        let p = |s: &str| {
            s.trim()
                .parse::<Ratio<u64>>()
                .map_err(|_| DatasetError::InvalidRatios(format!("cannot parse {s:?}")))
        };
        SplitSpec::new(p(train)?, p(validation)?, p(test)?, seed)
    }

    /// The 7:1:2 proportions.
    pub fn default_with_seed(seed: u64) -> Self {
        SplitSpec::new(Ratio::new(7, 10), Ratio::new(1, 10), Ratio::new(2, 10), seed).expect("sums to 1")
    }

    pub fn ratios(&self) -> [Ratio<u64>; 3] {
        self.ratios
    }

    /// Largest-remainder allocation of `count` items; ties in the
    /// fractional remainder go to train, then validation, then test.
    pub fn allocate(&self, count: usize) -> [usize; 3] {
        let count = count as u64;
        let mut alloc = [0usize; 3];
        let mut remainders = [Ratio::from_integer(0u64); 3];
        for (k, r) in self.ratios.iter().enumerate() {
            let exact = r * count;
            alloc[k] = exact.to_integer() as usize;
            remainders[k] = exact.fract();
        }
        let assigned: usize = alloc.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| remainders[b].cmp(&remainders[a]).then(a.cmp(&b)));
        for &k in order.iter().take(count as usize - assigned) {
            alloc[k] += 1;
        }
        alloc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetBundle {
    pub name: String,
    pub train: Vec<LabeledPair>,
    pub validation: Vec<LabeledPair>,
    pub test: Vec<LabeledPair>,
}

impl DatasetBundle {
    pub fn split(&self, split: Split) -> &[LabeledPair] {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    fn split_mut(&mut self, split: Split) -> &mut Vec<LabeledPair> {
        match split {
            Split::Train => &mut self.train,
            Split::Validation => &mut self.validation,
            Split::Test => &mut self.test,
        }
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.train.len(), self.validation.len(), self.test.len()]
    }

    pub fn len(&self) -> usize {
        self.sizes().iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &LabeledPair> {
        self.train.iter().chain(&self.validation).chain(&self.test)
    }

    /// Checks pair-id uniqueness and tuple uniqueness across all splits.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let mut ids = HashSet::new();
        let mut tuples = HashSet::new();
        for p in self.iter() {
            if !ids.insert(p.pair_id.as_str()) {
                return Err(DatasetError::DuplicatePairId(p.pair_id.clone()));
            }
            if !tuples.insert((p.topic_a.as_str(), p.topic_b.as_str(), p.label)) {
                return Err(DatasetError::DuplicateTuple {
                    topic_a: p.topic_a.clone(),
                    topic_b: p.topic_b.clone(),
                    label: p.label,
                });
            }
        }
        Ok(())
    }

    pub fn split_path(dir: &Path, name: &str, split: Split) -> PathBuf {
        dir.join(format!("{name}.{}.jsonl", split.file_tag()))
    }

    /// Writes `<name>.train.jsonl`, `<name>.val.jsonl` and `<name>.test.jsonl`.
    pub fn write_files(&self, dir: &Path) -> Result<(), CoreError> {
        for split in Split::ALL {
            jsonl::write_jsonl(&Self::split_path(dir, &self.name, split), self.split(split))?;
        }
        Ok(())
    }

    pub fn read_files(dir: &Path, name: &str) -> Result<DatasetBundle, CoreError> {
        let mut bundle = DatasetBundle {
            name: name.to_string(),
            ..Default::default()
        };
        for split in Split::ALL {
            *bundle.split_mut(split) = jsonl::read_jsonl(&Self::split_path(dir, name, split))?;
        }
        Ok(bundle)
    }
}

/// Stratified split: each label block is shuffled and allocated by
/// largest remainder, then each split is reshuffled.
pub fn make_splits(name: &str, pairs: &[LabeledPair], spec: &SplitSpec) -> Result<DatasetBundle, DatasetError> {
    if pairs.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    let mut rng = rng_for(spec.seed, STREAM_SPLIT);
    let mut blocks: BTreeMap<RelationLabel, Vec<&LabeledPair>> = BTreeMap::new();
    for p in pairs {
        blocks.entry(p.label).or_default().push(p);
    }
    let mut bundle = DatasetBundle {
        name: name.to_string(),
        ..Default::default()
    };
    for block in blocks.values_mut() {
        block.shuffle(&mut rng);
        let [train, val, _] = spec.allocate(block.len());
        bundle.train.extend(block[..train].iter().map(|p| (*p).clone()));
        bundle.validation.extend(block[train..train + val].iter().map(|p| (*p).clone()));
        bundle.test.extend(block[train + val..].iter().map(|p| (*p).clone()));
    }
    for split in Split::ALL {
        bundle.split_mut(split).shuffle(&mut rng);
    }
    Ok(bundle)
}

/// Split-wise concatenation of bundles.
pub fn merge_bundles(bundles: &[DatasetBundle], name: &str) -> Result<DatasetBundle, DatasetError> {
    let mut merged = DatasetBundle {
        name: name.to_string(),
        ..Default::default()
    };
    let mut ids = HashSet::new();
    for b in bundles {
        for split in Split::ALL {
            for p in b.split(split) {
                if !ids.insert(p.pair_id.clone()) {
                    return Err(DatasetError::DuplicatePairId(p.pair_id.clone()));
                }
                merged.split_mut(split).push(p.clone());
            }
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Concept;
    use proptest::prelude::*;

    fn c(id: &str, label: &str) -> Concept {
        Concept::new(id, label, Vec::<String>::new()).unwrap()
    }

    fn graph(concepts: Vec<Concept>, edges: &[(&str, &str)]) -> ConceptGraph {
        ConceptGraph::from_parts(
            SchemaDialect::SkosCore,
            concepts,
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())),
            [],
        )
        .unwrap()
    }

    fn chain(n: usize) -> ConceptGraph {
        let concepts = (0..n).map(|i| c(&format!("c{i:03}"), &format!("topic {i}"))).collect();
        let ids: Vec<String> = (0..n).map(|i| format!("c{i:03}")).collect();
        let edges: Vec<(&str, &str)> = (1..n).map(|i| (ids[i].as_str(), ids[(i - 1) / 2].as_str())).collect();
        graph(concepts, &edges)
    }

    #[test]
    fn broader_draw_puts_the_subsuming_topic_first() {
        let g = graph(
            vec![
                c("dist-db", "distributed databases"),
                c("db", "databases"),
                c("asp", "adaptive signal processing"),
                c("sp", "signal processing"),
            ],
            &[("dist-db", "db"), ("asp", "sp")],
        );
        let pairs = sample_hierarchical(&g, 1, 7, "ieee").unwrap();
        assert_eq!(pairs.len(), 2);
        let broader = pairs.iter().find(|p| p.label == RelationLabel::Broader).unwrap();
        let narrower = pairs.iter().find(|p| p.label == RelationLabel::Narrower).unwrap();
        let expected_b = [
            ("databases", "distributed databases"),
            ("signal processing", "adaptive signal processing"),
        ];
        assert!(expected_b.contains(&(broader.topic_a.as_str(), broader.topic_b.as_str())));
        // narrower uses the other edge, child first
        let (pa, ch) = if broader.topic_a == "databases" {
            ("signal processing", "adaptive signal processing")
        } else {
            ("databases", "distributed databases")
        };
        assert_eq!((narrower.topic_a.as_str(), narrower.topic_b.as_str()), (ch, pa));
    }

    #[test]
    fn hierarchical_sampling_is_deterministic_and_disjoint() {
        let g = chain(200);
        let a = sample_hierarchical(&g, 50, 11, "s").unwrap();
        let b = sample_hierarchical(&g, 50, 11, "s").unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_hierarchical(&g, 50, 12, "s").unwrap());
        let broader: HashSet<(&str, &str)> = a
            .iter()
            .filter(|p| p.label == RelationLabel::Broader)
            .map(|p| (p.topic_b.as_str(), p.topic_a.as_str()))
            .collect();
        let narrower: HashSet<(&str, &str)> = a
            .iter()
            .filter(|p| p.label == RelationLabel::Narrower)
            .map(|p| (p.topic_a.as_str(), p.topic_b.as_str()))
            .collect();
        assert_eq!(broader.len(), 50);
        assert_eq!(narrower.len(), 50);
        assert!(broader.is_disjoint(&narrower));
    }

    #[test]
    fn insufficient_edges() {
        let g = chain(5);
        assert_eq!(
            sample_hierarchical(&g, 3, 0, "s").unwrap_err(),
            DatasetError::InsufficientEdges { needed: 6, available: 4 }
        );
    }

    #[test]
    fn direction_duality_holds_against_the_graph() {
        let g = chain(64);
        let by_label: HashMap<&str, &str> = g
            .concepts()
            .values()
            .map(|c| (c.pref_label.as_str(), c.id.as_str()))
            .collect();
        for p in sample_hierarchical(&g, 20, 3, "s").unwrap() {
            let (a, b) = (by_label[p.topic_a.as_str()], by_label[p.topic_b.as_str()]);
            // flip the pair and the label: still consistent with the graph
            let (fa, fb, fl) = (b, a, p.label.invert());
            let edge = match fl {
                RelationLabel::Broader => (fb.to_string(), fa.to_string()),
                RelationLabel::Narrower => (fa.to_string(), fb.to_string()),
                _ => unreachable!(),
            };
            assert!(g.hierarchy_edges().contains(&edge));
        }
    }

    #[test]
    fn skos_candidates_come_from_alt_labels() {
        let g = ConceptGraph::from_parts(
            SchemaDialect::SkosCore,
            [
                Concept::new("5g", "5G mobile communication", ["4G mobile communication"]).unwrap(),
                Concept::new("aa", "abstract algebra", ["algebraic structure"]).unwrap(),
            ],
            [],
            [],
        )
        .unwrap();
        let h = harvest_sameas(&g, "ieee", true);
        assert!(h.accepted.is_empty());
        assert_eq!(h.pending.len(), 2);
        let five_g = h.pending.iter().find(|c| c.topic_a == "5G mobile communication").unwrap();
        assert_eq!(five_g.topic_b, "4G mobile communication");
        assert_eq!(five_g.context, "altLabel of 5g");
        let alg = h.pending.iter().find(|c| c.topic_a == "abstract algebra").unwrap();
        assert_eq!(alg.topic_b, "algebraic structure");
    }

    #[test]
    fn mesh_related_edges_auto_accept() {
        let g = ConceptGraph::from_parts(
            SchemaDialect::Mesh,
            [c("d1", "Neoplasms"), c("d2", "Tumors")],
            [],
            [("d2".into(), "d1".into())],
        )
        .unwrap();
        let h = harvest_sameas(&g, "mesh", true);
        assert!(h.pending.is_empty());
        assert_eq!(h.accepted.len(), 1);
        let p = &h.accepted[0];
        assert_eq!(p.label, RelationLabel::SameAs);
        assert_eq!(p.provenance, Provenance::RelatedEdge);
        assert_eq!((p.topic_a.as_str(), p.topic_b.as_str()), ("Neoplasms", "Tumors"));
        assert_eq!(harvest_sameas(&g, "mesh", false).pending.len(), 1);
    }

    #[test]
    fn other_from_three_isolated_concepts() {
        let g = graph(vec![c("a", "alpha"), c("b", "beta"), c("g", "gamma")], &[]);
        // the six ordered pairs, enumerated independently
        let labels = ["alpha", "beta", "gamma"];
        let mut all = HashSet::new();
        for x in labels {
            for y in labels {
                if x != y {
                    all.insert((x.to_string(), y.to_string()));
                }
            }
        }
        assert_eq!(all.len(), 6);
        let mut seen = HashSet::new();
        for seed in 0..200 {
            let first = sample_other(&g, 1, seed, "s", ExclusionPolicy::default()).unwrap();
            let again = sample_other(&g, 1, seed, "s", ExclusionPolicy::default()).unwrap();
            assert_eq!(first, again);
            let key = (first[0].topic_a.clone(), first[0].topic_b.clone());
            assert!(all.contains(&key));
            seen.insert(key);
        }
        assert_eq!(seen, all, "every ordered pair is reachable");
    }

    #[test]
    fn other_exhausts_when_everything_is_linked() {
        let g = graph(vec![c("a", "alpha"), c("b", "beta")], &[("a", "b")]);
        assert!(matches!(
            sample_other(&g, 1, 0, "s", ExclusionPolicy::default()),
            Err(DatasetError::ExhaustedCandidates { attempts: 100, accepted: 0 })
        ));
    }

    #[test]
    fn transitive_exclusion() {
        let g = graph(
            vec![c("a", "alpha"), c("b", "beta"), c("c", "gamma")],
            &[("a", "b"), ("b", "c")],
        );
        for seed in 0..50 {
            assert!(sample_other(&g, 1, seed, "s", ExclusionPolicy::default()).is_err());
        }
        let direct_only = ExclusionPolicy {
            transitive: false,
            max_attempts: None,
        };
        let got = sample_other(&g, 1, 0, "s", direct_only).unwrap();
        let pair = (got[0].topic_a.as_str(), got[0].topic_b.as_str());
        assert!(pair == ("alpha", "gamma") || pair == ("gamma", "alpha"));
    }

    #[test]
    fn shared_labels_and_related_edges_are_excluded() {
        let g = ConceptGraph::from_parts(
            SchemaDialect::SkosCore,
            [
                Concept::new("a", "alpha", ["common"]).unwrap(),
                Concept::new("b", "beta", ["Common"]).unwrap(),
                c("x", "xi"),
                c("y", "upsilon"),
            ],
            [],
            [("x".into(), "y".into())],
        )
        .unwrap();
        let mut idx = LinkIndex::new(&g, true);
        let pos = |id: &str| g.concepts().keys().position(|k| k == id).unwrap();
        assert!(idx.linked(pos("a"), pos("b")));
        assert!(idx.linked(pos("y"), pos("x")));
        assert!(!idx.linked(pos("a"), pos("x")));
    }

    fn brute_force_linked(g: &ConceptGraph, a: &str, b: &str) -> bool {
        // closure by repeated expansion
        let mut reach: HashSet<(String, String)> = g.hierarchy_edges().iter().cloned().collect();
        loop {
            let mut added = false;
            let snapshot: Vec<_> = reach.iter().cloned().collect();
            for (x, y) in &snapshot {
                for (y2, z) in &snapshot {
                    if y == y2 && reach.insert((x.clone(), z.clone())) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let la = &g.concept(a).unwrap().pref_label;
        let lb = &g.concept(b).unwrap().pref_label;
        reach.contains(&(a.to_string(), b.to_string()))
            || reach.contains(&(b.to_string(), a.to_string()))
            || la.to_lowercase() == lb.to_lowercase()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn other_pairs_are_never_linked(edges in proptest::collection::vec((0usize..10, 0usize..10), 0..14), seed in any::<u64>()) {
            let concepts: Vec<Concept> = (0..10).map(|i| c(&format!("n{i}"), &format!("label {i}"))).collect();
            let es: Vec<(String, String)> = edges.iter().filter(|(a, b)| a != b).map(|(a, b)| (format!("n{a}"), format!("n{b}"))).collect();
            let g = ConceptGraph::from_parts(SchemaDialect::SkosCore, concepts, es, []).unwrap();
            let by_label: HashMap<String, String> = g.concepts().values().map(|c| (c.pref_label.clone(), c.id.clone())).collect();
            if let Ok(pairs) = sample_other(&g, 3, seed, "s", ExclusionPolicy::default()) {
                for p in pairs {
                    prop_assert!(!brute_force_linked(&g, &by_label[&p.topic_a], &by_label[&p.topic_b]));
                }
            }
        }

        #[test]
        fn split_sizes_are_conserved_and_close_to_exact(counts in proptest::collection::vec(0usize..300, 4), seed in any::<u64>(), t in 0u64..=10, v in 0u64..=10) {
            prop_assume!(t + v <= 10);
            let spec = SplitSpec::new(Ratio::new(t, 10), Ratio::new(v, 10), Ratio::new(10 - t - v, 10), seed).unwrap();
            let mut pairs = Vec::new();
            for (li, &n) in counts.iter().enumerate() {
                for k in 0..n {
                    pairs.push(LabeledPair {
                        pair_id: format!("p{li}-{k}"),
                        topic_a: format!("a{li}-{k}"),
                        topic_b: format!("b{li}-{k}"),
                        label: RelationLabel::ALL[li],
                        source: "s".into(),
                        provenance: Provenance::HierarchyEdge,
                    });
                }
            }
            prop_assume!(!pairs.is_empty());
            let bundle = make_splits("b", &pairs, &spec).unwrap();
            prop_assert_eq!(bundle.len(), pairs.len());
            bundle.validate().unwrap();
            for (li, &n) in counts.iter().enumerate() {
                let label = RelationLabel::ALL[li];
                for (k, split) in Split::ALL.iter().enumerate() {
                    let got = bundle.split(*split).iter().filter(|p| p.label == label).count() as f64;
                    let exact = n as f64 * (*spec.ratios()[k].numer() as f64 / *spec.ratios()[k].denom() as f64);
                    prop_assert!((got - exact).abs() < 1.0);
                }
            }
        }
    }

    fn pairs_with_profile(source: &str, profile: [usize; 4]) -> Vec<LabeledPair> {
        let mut out = Vec::new();
        for (li, &n) in profile.iter().enumerate() {
            for k in 0..n {
                out.push(LabeledPair {
                    pair_id: format!("{source}:{li}:{k}"),
                    topic_a: format!("{source} a{li}-{k}"),
                    topic_b: format!("{source} b{li}-{k}"),
                    label: RelationLabel::ALL[li],
                    source: source.into(),
                    provenance: Provenance::HierarchyEdge,
                });
            }
        }
        out
    }

    #[test]
    fn physh_profile_split_totals() {
        let pairs = pairs_with_profile("physh", [250, 250, 125, 250]);
        let b = make_splits("physh", &pairs, &SplitSpec::default_with_seed(1)).unwrap();
        assert_eq!(b.sizes(), [613, 87, 175]);
    }

    #[test]
    fn mesh_profile_split_totals() {
        let pairs = pairs_with_profile("mesh", [1000; 4]);
        let b = make_splits("mesh", &pairs, &SplitSpec::default_with_seed(1)).unwrap();
        assert_eq!(b.sizes(), [2800, 400, 800]);
    }

    #[test]
    fn degenerate_ratio_puts_everything_in_train() {
        let pairs = pairs_with_profile("s", [10, 0, 0, 0]);
        let spec = SplitSpec::parse("1", "0", "0", 3).unwrap();
        let b = make_splits("s", &pairs, &spec).unwrap();
        assert_eq!(b.sizes(), [10, 0, 0]);
    }

    #[test]
    fn allocation_tie_break_prefers_train() {
        let spec = SplitSpec::default_with_seed(0);
        assert_eq!(spec.allocate(125), [88, 12, 25]);
        assert_eq!(spec.allocate(250), [175, 25, 50]);
        assert_eq!(spec.allocate(1), [1, 0, 0]);
        assert_eq!(spec.allocate(5), [4, 0, 1]);
    }

    #[test]
    fn ratios_must_sum_to_one() {
        assert!(matches!(SplitSpec::parse("7/10", "1/10", "1/10", 0), Err(DatasetError::InvalidRatios(_))));
        assert!(matches!(SplitSpec::parse("x", "1/10", "1/10", 0), Err(DatasetError::InvalidRatios(_))));
    }

    #[test]
    fn splits_are_deterministic() {
        let pairs = pairs_with_profile("s", [30, 30, 30, 30]);
        let spec = SplitSpec::default_with_seed(9);
        assert_eq!(make_splits("s", &pairs, &spec).unwrap(), make_splits("s", &pairs, &spec).unwrap());
        assert_eq!(make_splits("s", &[], &spec).unwrap_err(), DatasetError::EmptyInput);
    }

    #[test]
    fn merge_examples() {
        let spec = SplitSpec::default_with_seed(5);
        let ieee = make_splits("ieee", &pairs_with_profile("ieee", [800; 4]), &spec).unwrap();
        let physh = make_splits("physh", &pairs_with_profile("physh", [250, 250, 125, 250]), &spec).unwrap();
        let mesh = make_splits("mesh", &pairs_with_profile("mesh", [1000; 4]), &spec).unwrap();
        assert_eq!(ieee.sizes(), [2240, 320, 640]);
        let merged = merge_bundles(&[ieee.clone(), physh, mesh], "pem").unwrap();
        assert_eq!(merged.sizes(), [5653, 807, 1615]);

        let single = merge_bundles(std::slice::from_ref(&ieee), "ieee").unwrap();
        assert_eq!(single, ieee);

        assert!(matches!(
            merge_bundles(&[ieee.clone(), ieee], "dup"),
            Err(DatasetError::DuplicatePairId(_))
        ));
    }

    #[test]
    fn subsample_is_seeded() {
        let pairs = pairs_with_profile("s", [0, 0, 20, 0]);
        let a = subsample(&pairs, 5, 1).unwrap();
        assert_eq!(a, subsample(&pairs, 5, 1).unwrap());
        assert_eq!(a.len(), 5);
        assert!(subsample(&pairs, 21, 1).is_err());
    }

    #[test]
    fn bundle_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let pairs = pairs_with_profile("s", [7, 3, 2, 9]);
        let b = make_splits("demo", &pairs, &SplitSpec::default_with_seed(2)).unwrap();
        b.write_files(dir.path()).unwrap();
        assert!(dir.path().join("demo.val.jsonl").exists());
        let back = DatasetBundle::read_files(dir.path(), "demo").unwrap();
        assert_eq!(back, b);
        let line = std::fs::read_to_string(dir.path().join("demo.train.jsonl")).unwrap();
        let first: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
        let keys: Vec<&String> = first.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 6);
    }
}
