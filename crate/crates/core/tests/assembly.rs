use std::collections::{BTreeMap, BTreeSet};

use ontorel_core::assemble::{assemble, emit_skos, transitive_reduction, EmitOptions, RelationInput};
use ontorel_core::{build_graph, parse_ntriples, IngestConfig, RelationLabel, SchemaDialect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_stream(rng: &mut ChaCha8Rng) -> Vec<RelationInput> {
    let n_concepts = rng.random_range(2..=12);
    let n = rng.random_range(0..30);
    (0..n)
        .map(|i| RelationInput {
            pair_id: format!("p{:03}", rng.random_range(0..1000) * 100 + i),
            topic_a: format!("topic {}", rng.random_range(0..n_concepts)),
            topic_b: format!("topic {}", rng.random_range(0..n_concepts)),
            label: RelationLabel::ALL[rng.random_range(0..4)],
        })
        .collect()
}

/// Kahn's algorithm: true when every node can be ordered.
fn topo_sortable(nodes: &BTreeSet<String>, edges: &BTreeSet<(String, String)>) -> bool {
    let mut indegree: BTreeMap<&str, usize> = nodes.iter().map(|n| (n.as_str(), 0)).collect();
    for (_, p) in edges {
        *indegree.get_mut(p.as_str()).unwrap() += 1;
    }
    let mut ready: Vec<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    let mut done = 0;
    while let Some(n) = ready.pop() {
        done += 1;
        for (c, p) in edges {
            if c == n {
                let d = indegree.get_mut(p.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(p);
                }
            }
        }
    }
    done == nodes.len()
}

fn closure(nodes: &BTreeSet<String>, edges: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    let ids: Vec<&String> = nodes.iter().collect();
    let pos: BTreeMap<&String, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let k = ids.len();
    let mut m = vec![vec![false; k]; k];
    for (c, p) in edges {
        m[pos[c]][pos[p]] = true;
    }
    for via in 0..k {
        for i in 0..k {
            for j in 0..k {
                if m[i][via] && m[via][j] {
                    m[i][j] = true;
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for i in 0..k {
        for j in 0..k {
            if m[i][j] {
                out.insert((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    out
}

#[test]
fn random_streams_stay_acyclic_and_conserve_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..300 {
        let stream = random_stream(&mut rng);
        let o = assemble(&stream);
        assert!(topo_sortable(o.concepts(), o.hierarchy()));
        let hierarchical = stream.iter().filter(|r| r.label.is_hierarchical()).count();
        assert_eq!(o.hierarchy().len() + o.rejected().len(), hierarchical);
        for (c, p) in o.hierarchy() {
            assert_ne!(o.representative(c), o.representative(p));
        }
        let red = transitive_reduction(&o);
        assert!(red.hierarchy().is_subset(o.hierarchy()));
        assert_eq!(closure(o.concepts(), o.hierarchy()), closure(red.concepts(), red.hierarchy()));
        assert_eq!(transitive_reduction(&red).hierarchy(), red.hierarchy());
    }
}

#[test]
fn sorted_input_makes_assembly_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let stream = random_stream(&mut rng);
        let mut shuffled = stream.clone();
        shuffled.reverse();
        let a = assemble(&stream);
        let b = assemble(&shuffled);
        assert_eq!(a.hierarchy(), b.hierarchy());
        assert_eq!(a.classes(), b.classes());
    }
}

#[test]
fn emitted_ontologies_reingest_isomorphically() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let o = assemble(&random_stream(&mut rng));
        let nt = emit_skos(&o, "http://example.org/onto/", &EmitOptions::default()).unwrap();
        if o.concepts().is_empty() {
            assert!(nt.is_empty());
            continue;
        }
        let (g, _) = build_graph(&parse_ntriples(&nt).unwrap(), SchemaDialect::SkosCore, &IngestConfig::default()).unwrap();
        let label = |id: &String| g.concept(id).unwrap().pref_label.clone();
        let edges: BTreeSet<_> = g.hierarchy_edges().iter().map(|(c, p)| (label(c), label(p))).collect();
        assert_eq!(&edges, o.hierarchy());
        let prefs: BTreeSet<String> = g.concepts().values().map(|c| c.pref_label.clone()).collect();
        assert_eq!(prefs, o.representatives().cloned().collect());
        for c in g.concepts().values() {
            let expected: BTreeSet<String> = o
                .classes()
                .get(&c.pref_label)
                .map(|m| m.iter().filter(|x| **x != c.pref_label).cloned().collect())
                .unwrap_or_default();
            assert_eq!(c.alt_labels, expected);
        }
    }
}
