//! Property tests for the store, Turtle, property paths and the class
//! hierarchy.

use std::collections::BTreeSet;

use extrucat_core::ontology::{Direction, Ontology, OntologyConfig};
use extrucat_core::rdf::iso::isomorphic;
use extrucat_core::rdf::turtle::{parse_turtle, serialize_turtle, BlankLabels};
use extrucat_core::rdf::{iri, Batch, Literal, PrefixMap, Store, Term, Triple};
use extrucat_core::sparql::{evaluate, parse_query, Row};
use proptest::prelude::*;

const NS: &str = "http://example.org/p/";

fn node(i: u8) -> Term {
    iri(format!("{NS}n{i}"))
}

fn pred(i: u8) -> Term {
    iri(format!("{NS}p{i}"))
}

fn literal() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[a-zA-Z0-9 \"\\\\\n\t'éü€]{0,12}".prop_map(|s| Term::literal(Literal::string(s))),
        ("[a-z]{0,6}", "[a-z]{2}(-[A-Z]{2})?").prop_map(|(s, l)| Term::literal(Literal::lang(s, l))),
        any::<i32>().prop_map(|n| Term::literal(Literal::integer(n.into()))),
        (-1.0e6f64..1.0e6).prop_map(|v| Term::literal(Literal::double(v))),
        any::<bool>().prop_map(|b| Term::literal(Literal::boolean(b))),
        "[0-9]{1,3}-[0-9]{2}".prop_map(|s| Term::literal(Literal::typed(s, "http://example.org/dt"))),
    ]
}

fn small_triple() -> impl Strategy<Value = Triple> {
    (0u8..6, 0u8..3, prop_oneof![(0u8..6).prop_map(node), literal()])
        .prop_map(|(s, p, o)| Triple::new(node(s), pred(p), o))
}

fn rich_triple() -> impl Strategy<Value = Triple> {
    let subject = prop_oneof![
        (0u8..6).prop_map(node),
        (0u8..4).prop_map(|b| Term::blank(format!("x{b}")))
    ];
    let object = prop_oneof![
        (0u8..6).prop_map(node),
        (0u8..4).prop_map(|b| Term::blank(format!("x{b}"))),
        literal()
    ];
    (subject, 0u8..3, object).prop_map(|(s, p, o)| Triple::new(s, pred(p), o))
}

fn rows(store: &Store, query: &str) -> Vec<Row> {
    let q = parse_query(query).unwrap();
    let mut rows = evaluate(&store.snapshot(), &q).rows;
    rows.sort();
    rows
}

fn store_of(triples: &[Triple]) -> Store {
    let store = Store::new();
    store.insert(triples.iter().cloned()).unwrap();
    store
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    /// Every bound/unbound combination of a pattern returns exactly the
    /// triples a linear scan finds, after arbitrary inserts and removes.
    #[test]
    fn index_lookups_match_a_scan(
        first in prop::collection::vec(small_triple(), 0..40),
        removed in prop::collection::vec(small_triple(), 0..20),
        probe in small_triple(),
    ) {
        let store = store_of(&first);
        store.apply(Batch { remove: removed.clone(), insert: vec![] }).unwrap();
        let g = store.snapshot();
        let expected: BTreeSet<Triple> = first.iter().filter(|t| !removed.contains(t)).cloned().collect();
        prop_assert_eq!(g.iter().collect::<BTreeSet<_>>(), expected.clone());
        for mask in 0..8u8 {
            let s = (mask & 1 != 0).then_some(&probe.subject);
            let p = (mask & 2 != 0).then_some(&probe.predicate);
            let o = (mask & 4 != 0).then_some(&probe.object);
            let got: BTreeSet<Triple> = g.triples_matching(s, p, o).collect();
            let scan: BTreeSet<Triple> = expected
                .iter()
                .filter(|t| s.is_none_or(|s| *s == t.subject))
                .filter(|t| p.is_none_or(|p| *p == t.predicate))
                .filter(|t| o.is_none_or(|o| *o == t.object))
                .cloned()
                .collect();
            prop_assert_eq!(got, scan, "mask {}", mask);
        }
    }

    /// Serialize then parse yields an isomorphic graph.
    #[test]
    fn turtle_round_trip(triples in prop::collection::vec(rich_triple(), 0..30)) {
        let unique: Vec<Triple> = triples.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut prefixes = PrefixMap::default();
        prefixes.insert("ex", NS);
        let text = serialize_turtle(&unique, &prefixes, BlankLabels::Rename);
        let back = parse_turtle(&text, None).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(isomorphic(&unique, &back.triples), "{}", text);
    }

    /// `^^p = p`, `(p/q)/r = p/(q/r)`, `^(p/q) = ^q/^p` and `(p*)* = p*`.
    #[test]
    fn path_algebra(triples in prop::collection::vec(small_triple(), 0..40)) {
        let store = store_of(&triples);
        let (p, q, r) = (format!("<{NS}p0>"), format!("<{NS}p1>"), format!("<{NS}p2>"));
        let same = |a: String, b: String| {
            let qa = format!("SELECT ?x ?y WHERE {{ ?x {a} ?y }}");
            let qb = format!("SELECT ?x ?y WHERE {{ ?x {b} ?y }}");
            (rows(&store, &qa), rows(&store, &qb))
        };
        let (a, b) = same(format!("^(^{p})"), p.clone());
        prop_assert_eq!(a, b);
        let (a, b) = same(format!("({p}/{q})/{r}"), format!("{p}/({q}/{r})"));
        prop_assert_eq!(a, b);
        let (a, b) = same(format!("^({p}/{q})"), format!("^{q}/^{p}"));
        prop_assert_eq!(a, b);
        let (a, b) = same(format!("({p}*)*"), format!("{p}*"));
        prop_assert_eq!(a, b);
    }

    /// Without filters, adding triples never removes a solution.
    #[test]
    fn solutions_grow_with_the_graph(
        base in prop::collection::vec(small_triple(), 0..30),
        extra in prop::collection::vec(small_triple(), 0..15),
    ) {
        let small = store_of(&base);
        let big = store_of(&base);
        big.insert(extra).unwrap();
        let query = format!("SELECT * WHERE {{ ?a <{NS}p0> ?b . ?b <{NS}p1>* ?c . ?c ?p ?d }}");
        let before: BTreeSet<Row> = rows(&small, &query).into_iter().collect();
        let after: BTreeSet<Row> = rows(&big, &query).into_iter().collect();
        prop_assert!(before.is_subset(&after));
    }

    /// Subclass closure over a random 50-class DAG equals the transitive
    /// closure of its adjacency matrix.
    #[test]
    fn subclass_closure_matches_matrix(edges in prop::collection::vec((1usize..50, 0usize..49), 0..120)) {
        const N: usize = 50;
        let class = |i: usize| format!("{NS}C{i}");
        let mut reach = [[false; N]; N];
        let mut ttl = String::new();
        for i in 0..N {
            reach[i][i] = true;
            ttl.push_str(&format!("<{}> a <http://www.w3.org/2002/07/owl#Class> .\n", class(i)));
        }
        for &(sub, sup) in &edges {
            // Only point downwards in index so the graph stays acyclic.
            let sup = sup % sub;
            reach[sub][sup] = true;
            ttl.push_str(&format!(
                "<{}> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <{}> .\n",
                class(sub),
                class(sup)
            ));
        }
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let store = Store::new();
        store.load_turtle(&ttl, None).unwrap();
        let o = Ontology::new(store.snapshot(), OntologyConfig::default());
        for i in 0..N {
            // Every class also sits under owl:Thing.
            let up: BTreeSet<String> = o
                .subclass_closure(&class(i), Direction::Up)
                .unwrap()
                .into_iter()
                .filter(|c| c != "http://www.w3.org/2002/07/owl#Thing")
                .collect();
            let down: BTreeSet<String> = o.subclass_closure(&class(i), Direction::Down).unwrap().into_iter().collect();
            let want_up: BTreeSet<String> = (0..N).filter(|&j| reach[i][j]).map(class).collect();
            let want_down: BTreeSet<String> = (0..N).filter(|&j| reach[j][i]).map(class).collect();
            prop_assert_eq!(up, want_up);
            prop_assert_eq!(down, want_down);
        }
    }
}
