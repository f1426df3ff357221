//! Component trees from parthood restrictions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Direction, Ontology, OntologyError, RestrictionKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRef {
    pub iri: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartNode {
    pub class: String,
    pub label: String,
    /// Strict subclasses, for picking a more specific component.
    pub specializations: Vec<ClassRef>,
    pub children: Vec<PartNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartTree {
    pub root: PartNode,
    pub warnings: Vec<String>,
}

impl PartTree {
    /// Pre-order listing of `(depth, class)`.
    pub fn depth_first(&self) -> Vec<(usize, &str)> {
        fn walk<'a>(node: &'a PartNode, depth: usize, out: &mut Vec<(usize, &'a str)>) {
            out.push((depth, &node.class));
            for c in &node.children {
                walk(c, depth + 1, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, 0, &mut out);
        out
    }

    pub fn find(&self, class: &str) -> Option<&PartNode> {
        fn search<'a>(node: &'a PartNode, class: &str) -> Option<&'a PartNode> {
            if node.class == class {
                return Some(node);
            }
            node.children.iter().find_map(|c| search(c, class))
        }
        search(&self.root, class)
    }
}

impl Ontology {
    /// Tree over the configured parthood properties. Restrictions are
    /// inherited from superclasses; children are ordered by IRI. A child
    /// already on the path from the root is skipped with a warning.
    pub fn part_tree(&self, root: &str) -> Result<PartTree, OntologyError> {
        self.subclass_closure(root, Direction::Up)?;
        let mut warnings = Vec::new();
        let mut path = Vec::new();
        let root = self.part_node(root, &mut path, &mut warnings);
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(PartTree { root, warnings })
    }

    fn part_node(&self, class: &str, path: &mut Vec<String>, warnings: &mut Vec<String>) -> PartNode {
        path.push(class.to_owned());
        let mut child_classes = BTreeSet::new();
        for c in self
            .subclass_closure(class, Direction::Up)
            .unwrap_or_else(|_| vec![class.to_owned()])
        {
            for r in self.restrictions_on(&c) {
                if self.is_parthood_property(&r.property) && r.kind != RestrictionKind::HasValue {
                    child_classes.extend(self.named_classes(&r.filler));
                }
            }
        }
        let mut children = Vec::new();
        for child in child_classes {
            if path.contains(&child) {
                warnings.push(format!("parthood cycle: {} -> {child} not expanded", path.join(" -> ")));
                continue;
            }
            children.push(self.part_node(&child, path, warnings));
        }
        path.pop();
        let specializations = self
            .subclass_closure(class, Direction::Down)
            .map(|d| {
                d.into_iter()
                    .skip(1)
                    .map(|iri| ClassRef {
                        label: self.label(&iri),
                        iri,
                    })
                    .collect()
            })
            .unwrap_or_default();
        PartNode {
            class: class.to_owned(),
            label: self.label(class),
            specializations,
            children,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{eo, mini};
    use super::super::{Ontology, OntologyConfig};
    use crate::rdf::Store;

    #[test]
    fn extruder_tree_has_head_with_specializations() {
        let tree = mini().part_tree(&eo("Extruder")).unwrap();
        assert!(tree.warnings.is_empty());
        let head = tree.find(&eo("ExtrusionHead")).unwrap();
        let specs: Vec<_> = head.specializations.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(
            specs,
            [
                "Extrusion head for profiles",
                "Extrusion head for sheets",
                "Extrusion head for circular profiles",
                "Extrusion head for non-circular profiles",
                "Extrusion head for sheets with one plate",
                "Extrusion head for sheets with two plates",
            ]
        );
        assert_eq!(tree.root.children.len(), 7);
        assert!(tree.find(&eo("Motor")).is_some());
        assert!(tree.find(&eo("CoolingFan")).is_some());
    }

    const THREE_LEVELS: &str = r#"
        @prefix owl: <http://www.w3.org/2002/07/owl#> .
        @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
        @prefix eo: <http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#> .
        @prefix ex: <http://example.org/> .
        ex:M rdfs:subClassOf [ owl:onProperty eo:hasComponent ; owl:someValuesFrom ex:B ] ,
                             [ owl:onProperty eo:hasComponent ; owl:someValuesFrom ex:A ] .
        ex:A rdfs:subClassOf [ owl:onProperty eo:hasSubcomponent ; owl:someValuesFrom ex:A2 ] ,
                             [ owl:onProperty eo:hasSubcomponent ; owl:someValuesFrom ex:A1 ] .
        ex:A1 rdfs:subClassOf [ owl:onProperty eo:hasSubcomponent ; owl:someValuesFrom ex:Leaf ] .
        ex:B rdfs:subClassOf ex:Base .
        ex:Base rdfs:subClassOf [ owl:onProperty eo:hasSubcomponent ; owl:someValuesFrom ex:Inherited ] .
        ex:Loop rdfs:subClassOf [ owl:onProperty eo:hasComponent ; owl:someValuesFrom ex:Loop2 ] .
        ex:Loop2 rdfs:subClassOf [ owl:onProperty eo:hasComponent ; owl:someValuesFrom ex:Loop ] .
        ex:Alone a owl:Class .
    "#;

    fn synthetic() -> Ontology {
        let store = Store::new();
        store.load_turtle(THREE_LEVELS, None).unwrap();
        Ontology::new(store.snapshot(), OntologyConfig::default())
    }

    #[test]
    fn three_level_listing() {
        let o = synthetic();
        let tree = o.part_tree("http://example.org/M").unwrap();
        let listing: Vec<_> = tree
            .depth_first()
            .into_iter()
            .map(|(d, c)| (d, c.trim_start_matches("http://example.org/")))
            .collect();
        assert_eq!(
            listing,
            [
                (0, "M"),
                (1, "A"),
                (2, "A1"),
                (3, "Leaf"),
                (2, "A2"),
                (1, "B"),
                (2, "Inherited")
            ]
        );
    }

    #[test]
    fn cycles_are_cut_and_reported() {
        let o = synthetic();
        let tree = o.part_tree("http://example.org/Loop").unwrap();
        assert_eq!(tree.depth_first().len(), 2);
        assert_eq!(tree.warnings.len(), 1);
    }

    #[test]
    fn no_parthood_single_node() {
        let o = synthetic();
        let tree = o.part_tree("http://example.org/Alone").unwrap();
        assert_eq!(tree.depth_first(), [(0, "http://example.org/Alone")]);
        assert!(o.part_tree("http://example.org/Unknown").is_err());
    }
}
