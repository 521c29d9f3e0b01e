//! Normalized taxonomy graph built from SKOS or MeSH triples.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ntriples::{Term, Triple};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemaDialect {
    #[serde(rename = "skos-core")]
    SkosCore,
    #[serde(rename = "mesh")]
    Mesh,
}

impl SchemaDialect {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemaDialect::SkosCore => "skos-core",
            SchemaDialect::Mesh => "mesh",
        }
    }
}

impl fmt::Display for SchemaDialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemaDialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skos-core" => Ok(SchemaDialect::SkosCore),
            "mesh" => Ok(SchemaDialect::Mesh),
            _ => Err(format!("unknown schema dialect {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub pref_label: String,
    pub alt_labels: BTreeSet<String>,
}

impl Concept {
    /// Builds a concept, trimming labels and dropping alternatives that
    /// repeat the preferred label (case-insensitively). Returns `None` when
    /// the preferred label is blank.
    pub fn new<I>(id: impl Into<String>, pref_label: &str, alt_labels: I) -> Option<Concept>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let pref_label = pref_label.trim();
        if pref_label.is_empty() {
            return None;
        }
        let pref_lower = pref_label.to_lowercase();
        let alt_labels = alt_labels
            .into_iter()
            .map(|a| a.as_ref().trim().to_string())
            .filter(|a| !a.is_empty() && a.to_lowercase() != pref_lower)
            .collect();
        Some(Concept {
            id: id.into(),
            pref_label: pref_label.to_string(),
            alt_labels,
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("concept {id} has two preferred labels: {first:?} and {second:?}")]
    DuplicatePrefLabelForId {
        id: String,
        first: String,
        second: String,
    },
    #[error("no labeled concepts recognized")]
    EmptyGraph,
    #[error("invalid graph: {0}")]
    Invalid(String),
}

/// Predicate configuration for ingestion. MeSH label predicates are
/// configurable because releases differ in which ones carry surface forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    /// Literals tagged with another language are ignored; untagged literals
    /// are always accepted. `None` accepts every language.
    pub language: Option<String>,
    pub mesh_label_predicates: Vec<String>,
    pub mesh_alt_label_predicates: Vec<String>,
    /// Subjects typed with none of these classes are ignored. Subjects
    /// without any `rdf:type` statement are kept.
    pub mesh_subject_types: Vec<String>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            language: Some("en".into()),
            mesh_label_predicates: vec![vocab::RDFS_LABEL.into()],
            mesh_alt_label_predicates: Vec::new(),
            mesh_subject_types: vec![
                vocab::MESH_TOPICAL_DESCRIPTOR.into(),
                vocab::MESH_CONCEPT.into(),
            ],
        }
    }
}

/// Counters for material skipped while building a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestWarnings {
    pub dropped_unlabeled_concepts: usize,
    pub dropped_hierarchy_edges: usize,
    pub dropped_related_edges: usize,
    pub self_edges: usize,
    pub ignored_subjects: usize,
}

impl IngestWarnings {
    pub fn is_empty(&self) -> bool {
        *self == IngestWarnings::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptGraph {
    dialect: SchemaDialect,
    concepts: BTreeMap<String, Concept>,
    hierarchy_edges: BTreeSet<(String, String)>,
    related_edges: BTreeSet<(String, String)>,
}

impl ConceptGraph {
    /// Assembles a graph from parts, checking every structural invariant.
    pub fn from_parts(
        dialect: SchemaDialect,
        concepts: impl IntoIterator<Item = Concept>,
        hierarchy_edges: impl IntoIterator<Item = (String, String)>,
        related_edges: impl IntoIterator<Item = (String, String)>,
    ) -> Result<ConceptGraph, GraphError> {
        let mut map = BTreeMap::new();
        for c in concepts {
            let id = c.id.clone();
            let normalized = Concept::new(id.clone(), &c.pref_label, &c.alt_labels)
                .ok_or_else(|| GraphError::Invalid(format!("concept {id} has a blank preferred label")))?;
            if normalized != c {
                return Err(GraphError::Invalid(format!("concept {id} labels are not normalized")));
            }
            if map.insert(id.clone(), c).is_some() {
                return Err(GraphError::Invalid(format!("concept {id} listed twice")));
            }
        }
        let check = |a: &str, b: &str| -> Result<(), GraphError> {
            if a == b {
                return Err(GraphError::Invalid(format!("self edge on {a}")));
            }
            for end in [a, b] {
                if !map.contains_key(end) {
                    return Err(GraphError::Invalid(format!("edge endpoint {end} is not a concept")));
                }
            }
            Ok(())
        };
        let mut hierarchy = BTreeSet::new();
        for (n, b) in hierarchy_edges {
            check(&n, &b)?;
            hierarchy.insert((n, b));
        }
        let mut related = BTreeSet::new();
        for (a, b) in related_edges {
            check(&a, &b)?;
            related.insert(canonical_pair(a, b));
        }
        Ok(ConceptGraph {
            dialect,
            concepts: map,
            hierarchy_edges: hierarchy,
            related_edges: related,
        })
    }

    pub fn dialect(&self) -> SchemaDialect {
        self.dialect
    }

    pub fn concepts(&self) -> &BTreeMap<String, Concept> {
        &self.concepts
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    /// Ordered `(narrower_id, broader_id)` pairs.
    pub fn hierarchy_edges(&self) -> &BTreeSet<(String, String)> {
        &self.hierarchy_edges
    }

    /// Unordered pairs stored as `(min, max)`.
    pub fn related_edges(&self) -> &BTreeSet<(String, String)> {
        &self.related_edges
    }

    pub fn is_related(&self, a: &str, b: &str) -> bool {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.related_edges.contains(&(x.to_string(), y.to_string()))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            dialect: self.dialect,
            concepts: self
                .concepts
                .values()
                .map(|c| ConceptJson {
                    id: c.id.clone(),
                    pref_label: c.pref_label.clone(),
                    alt_labels: c.alt_labels.iter().cloned().collect(),
                })
                .collect(),
            hierarchy_edges: self
                .hierarchy_edges
                .iter()
                .map(|(a, b)| [a.clone(), b.clone()])
                .collect(),
            related_edges: self
                .related_edges
                .iter()
                .map(|(a, b)| [a.clone(), b.clone()])
                .collect(),
        }
    }

    /// Pretty-printed interchange document with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<ConceptGraph, GraphError> {
        let doc: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Invalid(e.to_string()))?;
        doc.try_into()
    }
}

fn canonical_pair(a: String, b: String) -> (String, String) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// JSON interchange shape; every array is sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub dialect: SchemaDialect,
    pub concepts: Vec<ConceptJson>,
    pub hierarchy_edges: Vec<[String; 2]>,
    pub related_edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptJson {
    pub id: String,
    pub pref_label: String,
    pub alt_labels: Vec<String>,
}

impl TryFrom<GraphJson> for ConceptGraph {
    type Error = GraphError;

    fn try_from(doc: GraphJson) -> Result<Self, Self::Error> {
        ConceptGraph::from_parts(
            doc.dialect,
            doc.concepts.into_iter().map(|c| Concept {
                id: c.id,
                pref_label: c.pref_label,
                alt_labels: c.alt_labels.into_iter().collect(),
            }),
            doc.hierarchy_edges.into_iter().map(|[a, b]| (a, b)),
            doc.related_edges.into_iter().map(|[a, b]| (a, b)),
        )
    }
}

fn language_ok(lang: Option<&str>, wanted: Option<&str>) -> bool {
    match (lang, wanted) {
        (None, _) | (_, None) => true,
        (Some(tag), Some(want)) => {
            let primary = tag.split('-').next().unwrap_or(tag);
            tag.eq_ignore_ascii_case(want) || primary.eq_ignore_ascii_case(want)
        }
    }
}

/// Builds a graph from parsed triples under one schema dialect.
pub fn build_graph(
    triples: &[Triple],
    dialect: SchemaDialect,
    config: &IngestConfig,
) -> Result<(ConceptGraph, IngestWarnings), GraphError> {
    let mut warnings = IngestWarnings::default();

    type Predicates<'a> = Vec<&'a str>;
    let (pref_preds, alt_preds, broader_preds, narrower_preds, related_preds): (
        Predicates,
        Predicates,
        Predicates,
        Predicates,
        Predicates,
    ) = match dialect {
        SchemaDialect::SkosCore => (
            vec![vocab::SKOS_PREF_LABEL],
            vec![vocab::SKOS_ALT_LABEL],
            vec![vocab::SKOS_BROADER],
            vec![vocab::SKOS_NARROWER],
            vec![vocab::SKOS_RELATED],
        ),
        SchemaDialect::Mesh => (
            config.mesh_label_predicates.iter().map(String::as_str).collect(),
            config.mesh_alt_label_predicates.iter().map(String::as_str).collect(),
            vec![vocab::MESH_BROADER_DESCRIPTOR],
            Vec::new(),
            vec![vocab::MESH_RELATED_CONCEPT],
        ),
    };

    // MeSH: only descriptor/concept subjects take part.
    let excluded: HashSet<&str> = if dialect == SchemaDialect::Mesh {
        let allowed: HashSet<&str> = config.mesh_subject_types.iter().map(String::as_str).collect();
        let mut typed: HashMap<&str, bool> = HashMap::new();
        for t in triples {
            if let (Some(s), true, Some(class)) =
                (t.subject_iri(), t.predicate == vocab::RDF_TYPE, t.object.as_iri())
            {
                *typed.entry(s).or_insert(false) |= allowed.contains(class);
            }
        }
        typed.into_iter().filter(|(_, ok)| !ok).map(|(s, _)| s).collect()
    } else {
        HashSet::new()
    };
    warnings.ignored_subjects = excluded.len();

    let mut prefs: BTreeMap<&str, &str> = BTreeMap::new();
    let mut alts: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut hierarchy: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut related: BTreeSet<(&str, &str)> = BTreeSet::new();

    for t in triples {
        let Some(subject) = t.subject_iri() else { continue };
        if excluded.contains(subject) {
            continue;
        }
        let p = t.predicate.as_str();
        if pref_preds.contains(&p) || alt_preds.contains(&p) {
            let Term::Literal { value, lang, .. } = &t.object else { continue };
            if !language_ok(lang.as_deref(), config.language.as_deref()) {
                continue;
            }
            if pref_preds.contains(&p) {
                let value = value.trim();
                if value.is_empty() {
                    continue;
                }
                // Sorted input order makes the error independent of triple order.
                match prefs.get(subject) {
                    Some(existing) if *existing != value => {
                        let (first, second) = if *existing < value {
                            (*existing, value)
                        } else {
                            (value, *existing)
                        };
                        return Err(GraphError::DuplicatePrefLabelForId {
                            id: subject.to_string(),
                            first: first.to_string(),
                            second: second.to_string(),
                        });
                    }
                    _ => {
                        prefs.insert(subject, value);
                    }
                }
            } else {
                alts.entry(subject).or_default().push(value);
            }
            continue;
        }
        let Some(object) = t.object.as_iri() else { continue };
        if excluded.contains(object) {
            continue;
        }
        let edge = if broader_preds.contains(&p) {
            Some((subject, object, false))
        } else if narrower_preds.contains(&p) {
            Some((object, subject, false))
        } else if related_preds.contains(&p) {
            Some((subject, object, true))
        } else {
            None
        };
        if let Some((a, b, is_related)) = edge {
            if a == b {
                warnings.self_edges += 1;
            } else if is_related {
                related.insert(if a <= b { (a, b) } else { (b, a) });
            } else {
                hierarchy.insert((a, b));
            }
        }
    }

    let mut mentioned: BTreeSet<&str> = BTreeSet::new();
    mentioned.extend(alts.keys().copied());
    for (a, b) in hierarchy.iter().chain(related.iter()) {
        mentioned.insert(a);
        mentioned.insert(b);
    }
    warnings.dropped_unlabeled_concepts = mentioned.iter().filter(|id| !prefs.contains_key(*id)).count();

    let concepts: Vec<Concept> = prefs
        .iter()
        .filter_map(|(id, pref)| {
            let alt = alts.get(id).map(Vec::as_slice).unwrap_or(&[]);
            Concept::new(*id, pref, alt)
        })
        .collect();
    if concepts.is_empty() {
        return Err(GraphError::EmptyGraph);
    }

    let keep = |(a, b): &(&str, &str)| prefs.contains_key(a) && prefs.contains_key(b);
    let hierarchy_kept: Vec<(String, String)> = hierarchy
        .iter()
        .filter(|e| keep(e))
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let related_kept: Vec<(String, String)> = related
        .iter()
        .filter(|e| keep(e))
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    warnings.dropped_hierarchy_edges = hierarchy.len() - hierarchy_kept.len();
    warnings.dropped_related_edges = related.len() - related_kept.len();

    if !warnings.is_empty() {
        log::warn!(
            "{dialect} ingest skipped material: {} unlabeled concepts, {} hierarchy edges, {} related edges, {} self edges, {} ignored subjects",
            warnings.dropped_unlabeled_concepts,
            warnings.dropped_hierarchy_edges,
            warnings.dropped_related_edges,
            warnings.self_edges,
            warnings.ignored_subjects
        );
    }

    let graph = ConceptGraph::from_parts(dialect, concepts, hierarchy_kept, related_kept)?;
    Ok((graph, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub concepts: usize,
    pub hierarchy_edges: usize,
    pub related_edges: usize,
    pub alt_labels: usize,
    pub hierarchy_cycles: usize,
}

/// Exact counts; cycles are the non-trivial strongly connected components
/// of the hierarchy.
pub fn graph_stats(graph: &ConceptGraph) -> GraphStats {
    let cycles = count_cycles(
        graph.concepts.keys().map(String::as_str),
        graph.hierarchy_edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    );
    if cycles > 0 {
        log::warn!("hierarchy contains {cycles} cycle(s)");
    }
    GraphStats {
        concepts: graph.concepts.len(),
        hierarchy_edges: graph.hierarchy_edges.len(),
        related_edges: graph.related_edges.len(),
        alt_labels: graph.concepts.values().map(|c| c.alt_labels.len()).sum(),
        hierarchy_cycles: cycles,
    }
}

pub(crate) fn count_cycles<'a>(
    nodes: impl Iterator<Item = &'a str>,
    edges: impl Iterator<Item = (&'a str, &'a str)>,
) -> usize {
    let mut g = petgraph::graphmap::DiGraphMap::<&str, ()>::new();
    for n in nodes {
        g.add_node(n);
    }
    for (a, b) in edges {
        g.add_edge(a, b, ());
    }
    petgraph::algo::tarjan_scc(&g)
        .into_iter()
        .filter(|scc| scc.len() > 1 || scc.iter().any(|n| g.contains_edge(n, n)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntriples::parse_ntriples;

    const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";

    fn skos_doc(lines: &[(&str, &str, &str)]) -> String {
        lines
            .iter()
            .map(|(s, p, o)| format!("<urn:{s}> <{SKOS}{p}> {o} .\n"))
            .collect()
    }

    fn build(doc: &str, dialect: SchemaDialect) -> Result<(ConceptGraph, IngestWarnings), GraphError> {
        build_graph(&parse_ntriples(doc).unwrap(), dialect, &IngestConfig::default())
    }

    #[test]
    fn skos_broader_points_at_the_subsuming_concept() {
        let doc = skos_doc(&[
            ("dist-db", "broader", "<urn:databases>"),
            ("dist-db", "prefLabel", "\"distributed databases\"@en"),
            ("databases", "prefLabel", "\"databases\"@en"),
        ]);
        let (g, w) = build(&doc, SchemaDialect::SkosCore).unwrap();
        assert!(w.is_empty());
        assert_eq!(
            g.hierarchy_edges().iter().collect::<Vec<_>>(),
            vec![&("urn:dist-db".to_string(), "urn:databases".to_string())]
        );
    }

    #[test]
    fn skos_narrower_is_mirrored() {
        let doc = skos_doc(&[
            ("databases", "narrower", "<urn:dist-db>"),
            ("dist-db", "prefLabel", "\"distributed databases\""),
            ("databases", "prefLabel", "\"databases\""),
        ]);
        let (g, _) = build(&doc, SchemaDialect::SkosCore).unwrap();
        assert!(g
            .hierarchy_edges()
            .contains(&("urn:dist-db".to_string(), "urn:databases".to_string())));
    }

    #[test]
    fn mesh_broader_descriptor_and_related_concept() {
        let doc = "<urn:d1> <http://id.nlm.nih.gov/mesh/vocab#broaderDescriptor> <urn:d2> .\n\
                   <urn:d1> <http://www.w3.org/2000/01/rdf-schema#label> \"Neoplasms, Germ Cell\"@en .\n\
                   <urn:d2> <http://www.w3.org/2000/01/rdf-schema#label> \"Neoplasms\"@en .\n\
                   <urn:d2> <http://id.nlm.nih.gov/mesh/vocab#relatedConcept> <urn:d1> .\n";
        let (g, _) = build(doc, SchemaDialect::Mesh).unwrap();
        assert!(g.hierarchy_edges().contains(&("urn:d1".into(), "urn:d2".into())));
        assert!(g.related_edges().contains(&("urn:d1".into(), "urn:d2".into())));
        assert!(g.is_related("urn:d2", "urn:d1"));
    }

    #[test]
    fn mesh_ignores_qualifiers() {
        let doc = "<urn:q1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://id.nlm.nih.gov/mesh/vocab#Qualifier> .\n\
                   <urn:q1> <http://www.w3.org/2000/01/rdf-schema#label> \"adverse effects\"@en .\n\
                   <urn:d1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://id.nlm.nih.gov/mesh/vocab#TopicalDescriptor> .\n\
                   <urn:d1> <http://www.w3.org/2000/01/rdf-schema#label> \"Aspirin\"@en .\n";
        let (g, w) = build(doc, SchemaDialect::Mesh).unwrap();
        assert_eq!(g.concepts().len(), 1);
        assert_eq!(w.ignored_subjects, 1);
    }

    #[test]
    fn alt_labels_populate_and_exclude_pref() {
        let doc = skos_doc(&[
            ("t", "altLabel", "\"ontology matching\"@en"),
            ("t", "prefLabel", "\"ontology alignment\"@en"),
            ("t", "altLabel", "\"Ontology Alignment\"@en"),
            ("t", "altLabel", "\"alignement\"@fr"),
        ]);
        let (g, _) = build(&doc, SchemaDialect::SkosCore).unwrap();
        let c = g.concept("urn:t").unwrap();
        assert_eq!(c.alt_labels, BTreeSet::from(["ontology matching".to_string()]));
    }

    #[test]
    fn unlabeled_endpoints_are_dropped_with_their_edges() {
        let doc = skos_doc(&[
            ("a", "broader", "<urn:ghost>"),
            ("a", "prefLabel", "\"a\""),
            ("b", "prefLabel", "\"b\""),
            ("b", "broader", "<urn:b>"),
        ]);
        let (g, w) = build(&doc, SchemaDialect::SkosCore).unwrap();
        assert_eq!(g.concepts().len(), 2);
        assert!(g.hierarchy_edges().is_empty());
        assert_eq!(w.dropped_unlabeled_concepts, 1);
        assert_eq!(w.dropped_hierarchy_edges, 1);
        assert_eq!(w.self_edges, 1);
    }

    #[test]
    fn duplicate_pref_label_is_an_error() {
        let doc = skos_doc(&[("a", "prefLabel", "\"x\""), ("a", "prefLabel", "\"y\"")]);
        assert!(matches!(
            build(&doc, SchemaDialect::SkosCore),
            Err(GraphError::DuplicatePrefLabelForId { .. })
        ));
        let same = skos_doc(&[("a", "prefLabel", "\"x\""), ("a", "prefLabel", "\"x\"")]);
        assert!(build(&same, SchemaDialect::SkosCore).is_ok());
    }

    #[test]
    fn empty_graph_is_an_error() {
        assert_eq!(build("", SchemaDialect::SkosCore).unwrap_err(), GraphError::EmptyGraph);
        let doc = skos_doc(&[("a", "broader", "<urn:b>")]);
        assert_eq!(build(&doc, SchemaDialect::SkosCore).unwrap_err(), GraphError::EmptyGraph);
    }

    #[test]
    fn build_is_order_independent() {
        let doc = skos_doc(&[
            ("a", "prefLabel", "\"a\""),
            ("b", "prefLabel", "\"b\""),
            ("c", "prefLabel", "\"c\""),
            ("a", "broader", "<urn:b>"),
            ("c", "related", "<urn:a>"),
            ("a", "related", "<urn:c>"),
            ("c", "altLabel", "\"see\""),
        ]);
        let mut triples = parse_ntriples(&doc).unwrap();
        let (g1, _) = build_graph(&triples, SchemaDialect::SkosCore, &IngestConfig::default()).unwrap();
        triples.reverse();
        let (g2, _) = build_graph(&triples, SchemaDialect::SkosCore, &IngestConfig::default()).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.related_edges().len(), 1);
    }

    fn concept(id: &str) -> Concept {
        Concept::new(id, id, Vec::<String>::new()).unwrap()
    }

    #[test]
    fn stats_examples() {
        let g = ConceptGraph::from_parts(
            SchemaDialect::SkosCore,
            [concept("a"), concept("b")],
            [("a".into(), "b".into())],
            [],
        )
        .unwrap();
        assert_eq!(
            graph_stats(&g),
            GraphStats {
                concepts: 2,
                hierarchy_edges: 1,
                related_edges: 0,
                alt_labels: 0,
                hierarchy_cycles: 0
            }
        );
        let cyclic = ConceptGraph::from_parts(
            SchemaDialect::SkosCore,
            [concept("a"), concept("b")],
            [("a".into(), "b".into()), ("b".into(), "a".into())],
            [],
        )
        .unwrap();
        assert_eq!(graph_stats(&cyclic).hierarchy_cycles, 1);
    }

    #[test]
    fn stats_of_empty_graph_are_zero() {
        let g = ConceptGraph::from_parts(SchemaDialect::Mesh, [], [], []).unwrap();
        assert_eq!(
            graph_stats(&g),
            GraphStats {
                concepts: 0,
                hierarchy_edges: 0,
                related_edges: 0,
                alt_labels: 0,
                hierarchy_cycles: 0
            }
        );
    }

    #[test]
    fn json_interchange_is_sorted_and_round_trips() {
        let g = ConceptGraph::from_parts(
            SchemaDialect::SkosCore,
            [
                Concept::new("z", "zeta", ["zz", "aa"]).unwrap(),
                concept("a"),
            ],
            [("z".into(), "a".into())],
            [("z".into(), "a".into())],
        )
        .unwrap();
        let text = g.to_json_string();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dialect"], "skos-core");
        assert_eq!(v["concepts"][0]["id"], "a");
        assert_eq!(v["concepts"][1]["alt_labels"], serde_json::json!(["aa", "zz"]));
        assert_eq!(v["related_edges"], serde_json::json!([["a", "z"]]));
        assert_eq!(ConceptGraph::from_json_str(&text).unwrap(), g);
    }

    #[test]
    fn from_parts_rejects_dangling_edges() {
        let err = ConceptGraph::from_parts(
            SchemaDialect::SkosCore,
            [concept("a")],
            [("a".into(), "b".into())],
            [],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::Invalid(_)));
    }
}
