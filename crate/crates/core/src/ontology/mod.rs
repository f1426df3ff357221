//! OWL-aware traversals over the loaded ontology.
//!
//! Nothing here is inferred into the store: the class hierarchy, the
//! restriction index and everything derived from them are computed from
//! asserted triples of one snapshot. [`OntologyCache`] rebuilds the index
//! when the store revision moves.

mod config;
mod schema;
mod tree;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::{Arc, Mutex};

use serde::Serialize;

pub use config::{resolve_iri, ConfigError, OntologyConfig};
pub use schema::{
    Candidate, FixedProperty, FormSchema, MeasureType, RefinementProperty, UnitOption, ValueOption, BASIC_FIELDS,
};
pub use tree::{ClassRef, PartNode, PartTree};

use crate::rdf::vocab::{om, owl, rdf, rdfs};
use crate::rdf::{Graph, Snapshot, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OntologyError {
    #[error("unknown class {0}")]
    UnknownClass(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Towards superclasses.
    Up,
    /// Towards subclasses.
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassNode {
    pub iri: String,
    pub label: String,
    pub direct_superclasses: Vec<String>,
    pub direct_subclasses: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum RestrictionKind {
    AllValuesFrom,
    HasValue,
    SomeValuesFrom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionInfo {
    pub on_class: String,
    pub property: String,
    pub kind: RestrictionKind,
    /// A value (hasValue) or a class expression (the other kinds).
    pub filler: Term,
    pub via_intersection: bool,
}

/// Index over one snapshot's class axioms.
#[derive(Debug)]
pub struct Ontology {
    graph: Snapshot,
    config: OntologyConfig,
    classes: BTreeMap<String, ClassNode>,
    restrictions: BTreeMap<String, Vec<RestrictionInfo>>,
    measure_properties: BTreeSet<String>,
    warnings: Vec<String>,
}

impl Ontology {
    pub fn new(graph: Snapshot, config: OntologyConfig) -> Self {
        let mut supers: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let declare = |iri: &str, supers: &mut BTreeMap<String, BTreeSet<String>>| {
            supers.entry(iri.to_owned()).or_default();
        };
        for class_type in [owl::CLASS, rdfs::CLASS] {
            for s in graph.subjects(rdf::TYPE, &Term::iri(class_type)) {
                if let Some(iri) = s.as_iri() {
                    declare(iri, &mut supers);
                }
            }
        }
        let sub_class_of = Term::iri(rdfs::SUB_CLASS_OF);
        for t in graph.triples_matching(None, Some(&sub_class_of), None) {
            let Some(sub) = t.subject.as_iri() else { continue };
            declare(sub, &mut supers);
            if let Some(sup) = t.object.as_iri() {
                declare(sup, &mut supers);
                if sub != sup {
                    supers.get_mut(sub).expect("declared").insert(sup.to_owned());
                }
            }
        }
        if !supers.is_empty() {
            declare(owl::THING, &mut supers);
            for (iri, s) in supers.iter_mut() {
                if s.is_empty() && iri != owl::THING {
                    s.insert(owl::THING.to_owned());
                }
            }
        }
        let mut subs: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (iri, s) in &supers {
            for sup in s {
                subs.entry(sup.as_str()).or_default().insert(iri.as_str());
            }
        }
        let classes = supers
            .iter()
            .map(|(iri, s)| {
                let node = ClassNode {
                    iri: iri.clone(),
                    label: label_of(&graph, iri),
                    direct_superclasses: s.iter().cloned().collect(),
                    direct_subclasses: subs
                        .get(iri.as_str())
                        .map(|c| c.iter().map(|x| x.to_string()).collect())
                        .unwrap_or_default(),
                };
                (iri.clone(), node)
            })
            .collect();

        let mut warnings = Vec::new();
        let restrictions = index_restrictions(&graph, &mut warnings);

        let mut measure_properties = BTreeSet::from([config.measure_property.clone()]);
        let mut queue: VecDeque<String> = VecDeque::from([config.measure_property.clone()]);
        while let Some(p) = queue.pop_front() {
            for sub in graph.subjects(rdfs::SUB_PROPERTY_OF, &Term::iri(&p)) {
                if let Some(iri) = sub.as_iri() {
                    if measure_properties.insert(iri.to_owned()) {
                        queue.push_back(iri.to_owned());
                    }
                }
            }
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ontology {
            graph,
            config,
            classes,
            restrictions,
            measure_properties,
            warnings,
        }
    }

    pub fn revision(&self) -> u64 {
        self.graph.revision()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.graph
    }

    pub fn config(&self) -> &OntologyConfig {
        &self.config
    }

    /// Structural oddities met while indexing (deep intersection nesting).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn class(&self, iri: &str) -> Option<&ClassNode> {
        self.classes.get(iri)
    }

    pub fn contains_class(&self, iri: &str) -> bool {
        self.classes.contains_key(iri)
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassNode> {
        self.classes.values()
    }

    fn require(&self, iri: &str) -> Result<&ClassNode, OntologyError> {
        self.classes
            .get(iri)
            .ok_or_else(|| OntologyError::UnknownClass(iri.to_owned()))
    }

    pub fn label(&self, iri: &str) -> String {
        label_of(&self.graph, iri)
    }

    /// Reflexive-transitive closure in BFS order; each node's neighbours
    /// are visited in IRI order.
    pub fn subclass_closure(&self, iri: &str, direction: Direction) -> Result<Vec<String>, OntologyError> {
        self.require(iri)?;
        let mut seen = BTreeSet::from([iri.to_owned()]);
        let mut order = vec![iri.to_owned()];
        let mut queue = VecDeque::from([iri.to_owned()]);
        while let Some(current) = queue.pop_front() {
            let node = &self.classes[&current];
            let next = match direction {
                Direction::Up => &node.direct_superclasses,
                Direction::Down => &node.direct_subclasses,
            };
            for n in next {
                if seen.insert(n.clone()) {
                    order.push(n.clone());
                    queue.push_back(n.clone());
                }
            }
        }
        Ok(order)
    }

    pub fn is_subclass_of(&self, sub: &str, sup: &str) -> bool {
        self.subclass_closure(sub, Direction::Up)
            .map(|up| up.iter().any(|c| c == sup))
            .unwrap_or(false)
    }

    /// Restrictions whose `on_class` is exactly `class`.
    pub fn restrictions_on(&self, class: &str) -> &[RestrictionInfo] {
        self.restrictions.get(class).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Restrictions on `class` and all its superclasses, nearest first.
    pub fn inherited_restrictions(&self, class: &str) -> Result<Vec<&RestrictionInfo>, OntologyError> {
        Ok(self
            .subclass_closure(class, Direction::Up)?
            .iter()
            .flat_map(|c| self.restrictions_on(c))
            .collect())
    }

    /// The configured measure property or any of its sub-properties.
    pub fn is_measure_property(&self, property: &str) -> bool {
        self.measure_properties.contains(property)
    }

    pub fn measure_properties(&self) -> &BTreeSet<String> {
        &self.measure_properties
    }

    pub fn is_parthood_property(&self, property: &str) -> bool {
        self.config.parthood_properties.iter().any(|p| p == property)
    }

    /// Properties whose restrictions describe values a component carries,
    /// as opposed to measures, units and parthood.
    fn is_descriptive_property(&self, property: &str) -> bool {
        !self.is_measure_property(property) && !self.is_parthood_property(property) && property != om::HAS_UNIT
    }

    /// Asserted `rdf:type`s of `instance` that are known classes, by IRI.
    pub fn types_of(&self, instance: &Term) -> Vec<String> {
        let mut types: Vec<String> = self
            .graph
            .objects(instance, rdf::TYPE)
            .iter()
            .filter_map(Term::as_iri)
            .filter(|c| self.contains_class(c))
            .map(str::to_owned)
            .collect();
        types.sort();
        types
    }

    /// Solutions related to `class` or any of its superclasses, by IRI.
    pub fn applicable_solutions(&self, class: &str) -> Result<Vec<String>, OntologyError> {
        let mut found = BTreeSet::new();
        for c in self.subclass_closure(class, Direction::Up)? {
            for s in self.graph.subjects(&self.config.related_to_property, &Term::iri(c)) {
                if let Some(iri) = s.as_iri() {
                    found.insert(iri.to_owned());
                }
            }
        }
        Ok(found.into_iter().collect())
    }

    /// IRIs named by a class expression: the IRI itself or the members of
    /// an `owl:unionOf` list.
    fn named_classes(&self, expr: &Term) -> Vec<String> {
        match expr {
            Term::Iri(iri) => vec![iri.clone()],
            _ => match self.graph.object(expr, owl::UNION_OF) {
                Some(list) => self
                    .graph
                    .list_items(&list)
                    .iter()
                    .filter_map(Term::as_iri)
                    .map(str::to_owned)
                    .collect(),
                None => Vec::new(),
            },
        }
    }
}

fn restriction_at(graph: &Graph, on_class: &str, node: &Term, via_intersection: bool) -> Option<RestrictionInfo> {
    let property = graph.object(node, owl::ON_PROPERTY)?.as_iri()?.to_owned();
    [
        (owl::HAS_VALUE, RestrictionKind::HasValue),
        (owl::ALL_VALUES_FROM, RestrictionKind::AllValuesFrom),
        (owl::SOME_VALUES_FROM, RestrictionKind::SomeValuesFrom),
    ]
    .into_iter()
    .find_map(|(p, kind)| {
        graph.object(node, p).map(|filler| RestrictionInfo {
            on_class: on_class.to_owned(),
            property: property.clone(),
            kind,
            filler,
            via_intersection,
        })
    })
}

fn index_restrictions(graph: &Graph, warnings: &mut Vec<String>) -> BTreeMap<String, Vec<RestrictionInfo>> {
    let mut out: BTreeMap<String, Vec<RestrictionInfo>> = BTreeMap::new();
    for axiom in [rdfs::SUB_CLASS_OF, owl::EQUIVALENT_CLASS] {
        let p = Term::iri(axiom);
        for t in graph.triples_matching(None, Some(&p), None) {
            let Some(class) = t.subject.as_iri() else { continue };
            if let Some(r) = restriction_at(graph, class, &t.object, false) {
                out.entry(class.to_owned()).or_default().push(r);
                continue;
            }
            let Some(list) = graph.object(&t.object, owl::INTERSECTION_OF) else {
                continue;
            };
            for member in graph.list_items(&list) {
                if let Some(r) = restriction_at(graph, class, &member, true) {
                    out.entry(class.to_owned()).or_default().push(r);
                } else if graph.object(&member, owl::INTERSECTION_OF).is_some() {
                    warnings.push(format!(
                        "{class}: nested owl:intersectionOf below the first level is not extracted"
                    ));
                }
            }
        }
    }
    out
}

/// Local name of an IRI: the part after the last `#`, `/` or `:`.
pub fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/', ':']).find(|s| !s.is_empty()).unwrap_or(iri)
}

/// `rdfs:label` with English preferred, then an untagged label, then any;
/// falls back to the local name.
pub fn label_of(graph: &Graph, iri: &str) -> String {
    let mut best: Option<(u8, String)> = None;
    for term in graph.objects(&Term::iri(iri), rdfs::LABEL) {
        let Some(lit) = term.as_literal() else { continue };
        let rank = match lit.language() {
            Some("en") => 0,
            Some(l) if l.starts_with("en-") => 1,
            None => 2,
            Some(_) => 3,
        };
        let candidate = (rank, lit.lexical().to_owned());
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    best.map(|(_, l)| l).unwrap_or_else(|| local_name(iri).to_owned())
}

/// Keeps one [`Ontology`] per store revision.
#[derive(Debug)]
pub struct OntologyCache {
    config: OntologyConfig,
    current: Mutex<Option<Arc<Ontology>>>,
}

impl OntologyCache {
    pub fn new(config: OntologyConfig) -> Self {
        OntologyCache {
            config,
            current: Mutex::new(None),
        }
    }

    pub fn config(&self) -> &OntologyConfig {
        &self.config
    }

    pub fn get(&self, snapshot: &Snapshot) -> Arc<Ontology> {
        let mut current = self.current.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(o) = current.as_ref() {
            if o.revision() == snapshot.revision() {
                return o.clone();
            }
        }
        let fresh = Arc::new(Ontology::new(snapshot.clone(), self.config.clone()));
        *current = Some(fresh.clone());
        fresh
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rdf::vocab::extruont;
    use crate::rdf::Store;

    pub(crate) const EO: &str = extruont::NS;

    pub(crate) fn eo(local: &str) -> String {
        format!("{EO}{local}")
    }

    pub(crate) fn mini() -> Ontology {
        let store = Store::new();
        store.load_turtle(crate::MINI_EXTRUONT, None).unwrap();
        Ontology::new(store.snapshot(), OntologyConfig::default())
    }

    #[test]
    fn profile_heads_below_profiles() {
        let o = mini();
        let down = o
            .subclass_closure(&eo("ExtrusionHeadForProfiles"), Direction::Down)
            .unwrap();
        assert_eq!(
            down,
            [
                eo("ExtrusionHeadForProfiles"),
                eo("ExtrusionHeadForCircularProfiles"),
                eo("ExtrusionHeadForNonCircularProfiles")
            ]
        );
        let up = o.subclass_closure(&eo("ACMotor"), Direction::Up).unwrap();
        assert_eq!(
            up,
            [
                eo("ACMotor"),
                eo("Motor"),
                eo("ExtruderComponent"),
                owl::THING.to_owned()
            ]
        );
    }

    #[test]
    fn thing_reaches_every_class() {
        let o = mini();
        let all = o.subclass_closure(owl::THING, Direction::Down).unwrap();
        assert_eq!(all.len(), o.classes().count());
    }

    #[test]
    fn unknown_class() {
        let o = mini();
        assert_eq!(
            o.subclass_closure("http://example.org/Nope", Direction::Up),
            Err(OntologyError::UnknownClass("http://example.org/Nope".into()))
        );
    }

    #[test]
    fn restrictions_are_indexed() {
        let o = mini();
        let r = o.restrictions_on(&eo("ExtrusionHeadForProfiles"));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].kind, RestrictionKind::HasValue);
        assert_eq!(r[0].property, eo("hasTypeOfExtrudate"));
        assert_eq!(r[0].filler, Term::iri(eo("Profile")));
        assert!(!r[0].via_intersection);
        assert_eq!(o.restrictions_on(&eo("Extruder")).len(), 7);
    }

    #[test]
    fn intersection_members_and_deep_nesting() {
        let store = Store::new();
        store
            .load_turtle(
                r#"@prefix owl: <http://www.w3.org/2002/07/owl#> .
                @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
                @prefix ex: <http://example.org/> .
                ex:A rdfs:subClassOf [ owl:intersectionOf (
                    ex:B
                    [ owl:onProperty ex:p ; owl:hasValue ex:v ]
                    [ owl:intersectionOf ( [ owl:onProperty ex:q ; owl:hasValue ex:w ] ) ]
                ) ] ."#,
                None,
            )
            .unwrap();
        let o = Ontology::new(store.snapshot(), OntologyConfig::default());
        let r = o.restrictions_on("http://example.org/A");
        assert_eq!(r.len(), 1);
        assert!(r[0].via_intersection);
        assert_eq!(r[0].property, "http://example.org/p");
        assert_eq!(o.warnings().len(), 1);
    }

    #[test]
    fn labels_fall_back() {
        let store = Store::new();
        store
            .load_turtle(
                r#"@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
                <http://e/a> rdfs:label "Etiqueta"@es , "Label"@en , "plain" .
                <http://e/b> rdfs:label "Etiqueta"@es , "plain" .
                <http://e/c> rdfs:label "Etiqueta"@es ."#,
                None,
            )
            .unwrap();
        let g = store.snapshot();
        assert_eq!(label_of(&g, "http://e/a"), "Label");
        assert_eq!(label_of(&g, "http://e/b"), "plain");
        assert_eq!(label_of(&g, "http://e/c"), "Etiqueta");
        assert_eq!(label_of(&g, "http://e/x#Local"), "Local");
        assert_eq!(local_name("http://e/path/Name"), "Name");
    }

    #[test]
    fn measure_properties_include_qualifiers() {
        let o = mini();
        assert_eq!(o.measure_properties().len(), 4);
        assert!(o.is_measure_property(crate::rdf::vocab::app::HAS_MINIMUM_QUANTITY));
    }

    #[test]
    fn cache_rebuilds_on_new_revision() {
        let store = Store::new();
        store.load_turtle(crate::MINI_EXTRUONT, None).unwrap();
        let cache = OntologyCache::new(OntologyConfig::default());
        let a = cache.get(&store.snapshot());
        let b = cache.get(&store.snapshot());
        assert!(Arc::ptr_eq(&a, &b));
        store
            .insert([crate::rdf::Triple::new(
                Term::iri("http://e/X"),
                Term::iri(rdfs::SUB_CLASS_OF),
                Term::iri(eo("Motor")),
            )])
            .unwrap();
        let c = cache.get(&store.snapshot());
        assert!(!Arc::ptr_eq(&a, &c));
        assert!(c.contains_class("http://e/X"));
    }
}
