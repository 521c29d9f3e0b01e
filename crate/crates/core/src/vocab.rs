//! Well-known predicate IRIs.

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

pub const SKOS_CONCEPT: &str = "http://www.w3.org/2004/02/skos/core#Concept";
pub const SKOS_BROADER: &str = "http://www.w3.org/2004/02/skos/core#broader";
pub const SKOS_NARROWER: &str = "http://www.w3.org/2004/02/skos/core#narrower";
pub const SKOS_RELATED: &str = "http://www.w3.org/2004/02/skos/core#related";
pub const SKOS_PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";
pub const SKOS_ALT_LABEL: &str = "http://www.w3.org/2004/02/skos/core#altLabel";
pub const SKOS_EXACT_MATCH: &str = "http://www.w3.org/2004/02/skos/core#exactMatch";

pub const MESH_BROADER_DESCRIPTOR: &str = "http://id.nlm.nih.gov/mesh/vocab#broaderDescriptor";
pub const MESH_RELATED_CONCEPT: &str = "http://id.nlm.nih.gov/mesh/vocab#relatedConcept";
pub const MESH_PREF_LABEL: &str = "http://id.nlm.nih.gov/mesh/vocab#prefLabel";
pub const MESH_ALT_LABEL: &str = "http://id.nlm.nih.gov/mesh/vocab#altLabel";
pub const MESH_TOPICAL_DESCRIPTOR: &str = "http://id.nlm.nih.gov/mesh/vocab#TopicalDescriptor";
pub const MESH_CONCEPT: &str = "http://id.nlm.nih.gov/mesh/vocab#Concept";
