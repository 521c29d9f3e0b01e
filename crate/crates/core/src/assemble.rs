//! Builds an acyclic taxonomy with synonym classes from labeled relations
//! and writes it out as SKOS N-Triples.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabeledPair;
use crate::graph::count_cycles;
use crate::label::RelationLabel;
use crate::ntriples::{format_statement, Term};
use crate::prompt::ClassificationOutcome;
use crate::vocab;

/// A relation to be placed into the ontology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationInput {
    pub pair_id: String,
    pub topic_a: String,
    pub topic_b: String,
    pub label: RelationLabel,
}

impl From<&LabeledPair> for RelationInput {
    fn from(p: &LabeledPair) -> Self {
        RelationInput {
            pair_id: p.pair_id.clone(),
            topic_a: p.topic_a.clone(),
            topic_b: p.topic_b.clone(),
            label: p.label,
        }
    }
}

impl RelationInput {
    /// None when the outcome's final label is a parse failure.
    pub fn from_outcome(o: &ClassificationOutcome) -> Option<Self> {
        Some(RelationInput {
            pair_id: o.pair_id.clone(),
            topic_a: o.topic_a.clone(),
            topic_b: o.topic_b.clone(),
            label: o.final_label.label()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    SelfLoop,
    IntraClass,
    Duplicate,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedPair {
    pub pair_id: String,
    pub topic_a: String,
    pub topic_b: String,
    pub label: RelationLabel,
    pub reason: RejectReason,
}

/// Trims and collapses internal whitespace; case is kept.
pub fn canonical_form(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AssembledOntology {
    concepts: BTreeSet<String>,
    /// representative -> all members (representative included)
    classes: BTreeMap<String, BTreeSet<String>>,
    member_of: BTreeMap<String, String>,
    /// (child, parent) over representatives
    hierarchy: BTreeSet<(String, String)>,
    rejected: Vec<RejectedPair>,
    hierarchy_inputs: usize,
}

impl AssembledOntology {
    pub fn concepts(&self) -> &BTreeSet<String> {
        &self.concepts
    }

    pub fn classes(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.classes
    }

    pub fn hierarchy(&self) -> &BTreeSet<(String, String)> {
        &self.hierarchy
    }

    pub fn rejected(&self) -> &[RejectedPair] {
        &self.rejected
    }

    /// Number of broader/narrower inputs seen by `assemble`.
    pub fn hierarchy_inputs(&self) -> usize {
        self.hierarchy_inputs
    }

    pub fn representative<'a>(&'a self, concept: &'a str) -> &'a str {
        self.member_of.get(concept).map(String::as_str).unwrap_or(concept)
    }

    /// Concepts that stand for themselves or for their class.
    pub fn representatives(&self) -> impl Iterator<Item = &String> {
        self.concepts.iter().filter(|c| self.representative(c) == c.as_str())
    }

    pub fn cycle_count(&self) -> usize {
        count_cycles(
            self.concepts.iter().map(String::as_str),
            self.hierarchy.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )
    }

    fn parents(&self) -> HashMap<&str, Vec<&str>> {
        let mut map: HashMap<&str, Vec<&str>> = HashMap::new();
        for (c, p) in &self.hierarchy {
            map.entry(c).or_default().push(p);
        }
        map
    }
}

fn reaches(parents: &HashMap<&str, Vec<&str>>, from: &str, to: &str, skip_edge: Option<(&str, &str)>) -> bool {
    let mut stack = vec![from];
    let mut seen = BTreeSet::new();
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if !seen.insert(n) {
            continue;
        }
        for &p in parents.get(n).into_iter().flatten() {
            if skip_edge != Some((n, p)) {
                stack.push(p);
            }
        }
    }
    false
}

fn reaches_owned(parents: &HashMap<String, Vec<String>>, from: &str, to: &str) -> bool {
    let mut stack = vec![from];
    let mut seen = BTreeSet::new();
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if seen.insert(n) {
            stack.extend(parents.get(n).into_iter().flatten().map(String::as_str));
        }
    }
    false
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Same-as relations are merged first; hierarchy relations follow in
/// ascending pair id order, first come first served. `other` is ignored.
pub fn assemble(inputs: &[RelationInput]) -> AssembledOntology {
    let mut ont = AssembledOntology::default();

    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut same_as = Vec::new();
    for r in inputs {
        if r.label == RelationLabel::Other {
            continue;
        }
        let (a, b) = (canonical_form(&r.topic_a), canonical_form(&r.topic_b));
        ont.concepts.insert(a.clone());
        ont.concepts.insert(b.clone());
        if r.label == RelationLabel::SameAs {
            for x in [&a, &b] {
                let next = index.len();
                index.entry(x.clone()).or_insert(next);
            }
            same_as.push((index[&a], index[&b]));
        }
    }
    let names: Vec<&String> = {
        let mut v = vec![None; index.len()];
        for (name, &i) in &index {
            v[i] = Some(name);
        }
        v.into_iter().map(|n| n.expect("dense")).collect()
    };
    let mut uf = UnionFind {
        parent: (0..index.len()).collect(),
    };
    for (a, b) in same_as {
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().insert((*name).clone());
    }
    for members in groups.into_values() {
        let rep = members.iter().next().expect("non-empty").clone();
        for m in &members {
            ont.member_of.insert(m.clone(), rep.clone());
        }
        ont.classes.insert(rep, members);
    }

    let mut hierarchy: Vec<&RelationInput> = inputs.iter().filter(|r| r.label.is_hierarchical()).collect();
    hierarchy.sort_by(|x, y| x.pair_id.cmp(&y.pair_id));
    ont.hierarchy_inputs = hierarchy.len();
    let mut parents: HashMap<String, Vec<String>> = HashMap::new();
    for r in hierarchy {
        let (a, b) = (canonical_form(&r.topic_a), canonical_form(&r.topic_b));
        let (child, parent) = match r.label {
            RelationLabel::Broader => (b, a),
            _ => (a, b),
        };
        let (cr, pr) = (ont.representative(&child).to_string(), ont.representative(&parent).to_string());
        let reason = if child == parent {
            Some(RejectReason::SelfLoop)
        } else if cr == pr {
            Some(RejectReason::IntraClass)
        } else if ont.hierarchy.contains(&(cr.clone(), pr.clone())) {
            Some(RejectReason::Duplicate)
        } else if reaches_owned(&parents, &pr, &cr) {
            Some(RejectReason::Cycle)
        } else {
            None
        };
        match reason {
            Some(reason) => ont.rejected.push(RejectedPair {
                pair_id: r.pair_id.clone(),
                topic_a: r.topic_a.clone(),
                topic_b: r.topic_b.clone(),
                label: r.label,
                reason,
            }),
            None => {
                parents.entry(cr.clone()).or_default().push(pr.clone());
                ont.hierarchy.insert((cr, pr));
            }
        }
    }
    ont
}

/// Drops every edge implied by a longer path.
pub fn transitive_reduction(ont: &AssembledOntology) -> AssembledOntology {
    let parents = ont.parents();
    let implied: BTreeSet<(String, String)> = ont
        .hierarchy
        .iter()
        .filter(|(c, p)| reaches(&parents, c, p, Some((c.as_str(), p.as_str()))))
        .cloned()
        .collect();
    let mut reduced = ont.clone();
    reduced.hierarchy = ont.hierarchy.difference(&implied).cloned().collect();
    reduced
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceMode {
    /// One concept per class; other members become alternative labels.
    #[default]
    AltLabels,
    /// One concept per member, linked to its representative by exactMatch.
    ExactMatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EmitOptions {
    pub equivalence: EquivalenceMode,
    /// Language tag for label literals; untagged when None.
    pub language: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmitError {
    #[error("labels {first:?} and {second:?} both map to slug {slug:?}")]
    SlugCollision { slug: String, first: String, second: String },
}

/// Lowercase ASCII alphanumerics, other runs collapsed to `-`. Labels with
/// no ASCII alphanumerics fall back to a hex encoding.
pub fn slugify(label: &str) -> String {
    let mut slug = String::new();
    let mut gap = false;
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            if gap && !slug.is_empty() {
                slug.push('-');
            }
            gap = false;
            slug.push(c.to_ascii_lowercase());
        } else {
            gap = true;
        }
    }
    if slug.is_empty() {
        slug.push('x');
        for b in label.as_bytes() {
            slug.push_str(&format!("{b:02x}"));
        }
    }
    slug
}

/// Sorted, newline-terminated N-Triples.
pub fn emit_skos(ont: &AssembledOntology, base_iri: &str, options: &EmitOptions) -> Result<String, EmitError> {
    let mut iris: BTreeMap<String, String> = BTreeMap::new();
    let mut slug_owner: HashMap<String, String> = HashMap::new();
    let emitted: Vec<&String> = match options.equivalence {
        EquivalenceMode::AltLabels => ont.representatives().collect(),
        EquivalenceMode::ExactMatch => ont.concepts.iter().collect(),
    };
    for label in emitted {
        let slug = slugify(label);
        if let Some(first) = slug_owner.insert(slug.clone(), label.clone()) {
            return Err(EmitError::SlugCollision {
                slug,
                first,
                second: label.clone(),
            });
        }
        iris.insert(label.clone(), format!("{base_iri}{slug}"));
    }

    let literal = |value: &str| Term::Literal {
        value: value.to_string(),
        lang: options.language.clone(),
        datatype: None,
    };
    let mut lines = Vec::new();
    for (label, iri) in &iris {
        lines.push(format_statement(iri, vocab::RDF_TYPE, &Term::Iri(vocab::SKOS_CONCEPT.into())));
        lines.push(format_statement(iri, vocab::SKOS_PREF_LABEL, &literal(label)));
        let Some(members) = ont.classes.get(label) else { continue };
        for m in members.iter().filter(|m| *m != label) {
            match options.equivalence {
                EquivalenceMode::AltLabels => {
                    if m.to_lowercase() != label.to_lowercase() {
                        lines.push(format_statement(iri, vocab::SKOS_ALT_LABEL, &literal(m)));
                    }
                }
                EquivalenceMode::ExactMatch => {
                    lines.push(format_statement(&iris[m], vocab::SKOS_EXACT_MATCH, &Term::Iri(iri.clone())));
                }
            }
        }
    }
    for (child, parent) in &ont.hierarchy {
        lines.push(format_statement(&iris[child], vocab::SKOS_BROADER, &Term::Iri(iris[parent].clone())));
    }
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    Ok(out)
}
