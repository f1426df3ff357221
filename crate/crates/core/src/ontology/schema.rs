//! Form schemas derived from class restrictions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{label_of, local_name, Direction, Ontology, OntologyError, RestrictionKind};
use crate::rdf::vocab::{om, owl, rdf};
use crate::rdf::{Literal, Term};

pub const BASIC_FIELDS: [&str; 3] = ["name", "manufacturer", "description"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormSchema {
    pub component_class: String,
    pub label: String,
    pub basic_fields: Vec<String>,
    pub allowed_measure_types: Vec<MeasureType>,
    /// Values fixed by the class or its superclasses; shown for information.
    pub fixed_properties: Vec<FixedProperty>,
    /// Values that distinguish subclasses; the user may constrain them.
    pub refinement_properties: Vec<RefinementProperty>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureType {
    pub iri: String,
    pub label: String,
    pub allowed_units: Vec<UnitOption>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitOption {
    pub iri: String,
    pub symbol: String,
    pub label: String,
}

/// An RDF value in a JSON-friendly shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValueOption {
    /// IRI or literal lexical form.
    pub value: String,
    pub is_iri: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    pub label: String,
}

impl ValueOption {
    pub fn from_term(ontology: &Ontology, term: &Term) -> Self {
        match term {
            Term::Iri(iri) => ValueOption {
                value: iri.clone(),
                is_iri: true,
                datatype: None,
                label: ontology.label(iri),
            },
            Term::Literal(lit) => ValueOption {
                value: lit.lexical().to_owned(),
                is_iri: false,
                datatype: Some(lit.datatype().to_owned()),
                label: lit.lexical().to_owned(),
            },
            Term::BlankNode(id) => ValueOption {
                value: id.clone(),
                is_iri: false,
                datatype: None,
                label: id.clone(),
            },
        }
    }

    pub fn to_term(&self) -> Term {
        if self.is_iri {
            Term::iri(&self.value)
        } else {
            match &self.datatype {
                Some(dt) => Term::literal(Literal::typed(&self.value, dt)),
                None => Term::string(&self.value),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedProperty {
    pub property: String,
    pub label: String,
    pub value: ValueOption,
    pub declared_on: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementProperty {
    pub property: String,
    pub label: String,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    #[serde(flatten)]
    pub value: ValueOption,
    /// Subclasses whose restriction yields this value.
    pub classes: Vec<String>,
}

impl Ontology {
    pub fn derive_form_schema(&self, class: &str) -> Result<FormSchema, OntologyError> {
        let up = self.subclass_closure(class, Direction::Up)?;
        let down = self.subclass_closure(class, Direction::Down)?;

        let mut measure_iris: Vec<String> = Vec::new();
        let mut fixed: Vec<FixedProperty> = Vec::new();
        for c in &up {
            for r in self.restrictions_on(c) {
                if self.is_measure_property(&r.property) {
                    if r.kind != RestrictionKind::HasValue {
                        for m in self.named_classes(&r.filler) {
                            if !measure_iris.contains(&m) {
                                measure_iris.push(m);
                            }
                        }
                    }
                } else if self.is_descriptive_property(&r.property) {
                    let value = ValueOption::from_term(self, &r.filler);
                    if !fixed.iter().any(|f| f.property == r.property && f.value == value) {
                        fixed.push(FixedProperty {
                            property: r.property.clone(),
                            label: self.label(&r.property),
                            value,
                            declared_on: c.clone(),
                        });
                    }
                }
            }
        }

        let mut refinement: Vec<RefinementProperty> = Vec::new();
        for sub in down.iter().skip(1) {
            for r in self.restrictions_on(sub) {
                if r.kind != RestrictionKind::HasValue || !self.is_descriptive_property(&r.property) {
                    continue;
                }
                let idx = match refinement.iter().position(|p| p.property == r.property) {
                    Some(i) => i,
                    None => {
                        refinement.push(RefinementProperty {
                            property: r.property.clone(),
                            label: self.label(&r.property),
                            candidates: Vec::new(),
                        });
                        refinement.len() - 1
                    }
                };
                let value = ValueOption::from_term(self, &r.filler);
                let candidates = &mut refinement[idx].candidates;
                match candidates.iter_mut().find(|c| c.value == value) {
                    Some(c) => c.classes.push(sub.clone()),
                    None => candidates.push(Candidate {
                        value,
                        classes: vec![sub.clone()],
                    }),
                }
            }
        }

        Ok(FormSchema {
            component_class: class.to_owned(),
            label: self.label(class),
            basic_fields: BASIC_FIELDS.iter().map(|s| s.to_string()).collect(),
            allowed_measure_types: measure_iris
                .into_iter()
                .map(|iri| MeasureType {
                    label: self.label(&iri),
                    allowed_units: self.units_for(&iri),
                    iri,
                })
                .collect(),
            fixed_properties: fixed,
            refinement_properties: refinement,
        })
    }

    /// Units admitted by `om:hasUnit` restrictions on a measure type (or
    /// its superclasses), ordered by IRI. No axiom, no units.
    pub fn units_for(&self, measure_type: &str) -> Vec<UnitOption> {
        let mut units = BTreeSet::new();
        let up = if self.contains_class(measure_type) {
            self.subclass_closure(measure_type, Direction::Up).unwrap_or_default()
        } else {
            vec![measure_type.to_owned()]
        };
        for c in &up {
            for r in self.restrictions_on(c) {
                if r.property != om::HAS_UNIT {
                    continue;
                }
                match (&r.kind, &r.filler) {
                    (RestrictionKind::HasValue, Term::Iri(u)) => {
                        units.insert(u.clone());
                    }
                    (_, filler) => units.extend(self.unit_members(filler)),
                }
            }
        }
        units
            .into_iter()
            .map(|iri| UnitOption {
                symbol: self
                    .graph
                    .object(&Term::iri(&iri), om::SYMBOL)
                    .map(|s| s.value_str().to_owned())
                    .unwrap_or_else(|| local_name(&iri).to_owned()),
                label: label_of(&self.graph, &iri),
                iri,
            })
            .collect()
    }

    /// Individuals of a unit class (and its subclasses), or the members of
    /// an `owl:oneOf` enumeration.
    fn unit_members(&self, filler: &Term) -> Vec<String> {
        if let Some(list) = self.graph.object(filler, owl::ONE_OF) {
            return self
                .graph
                .list_items(&list)
                .iter()
                .filter_map(Term::as_iri)
                .map(str::to_owned)
                .collect();
        }
        let mut out = Vec::new();
        for class in self.named_classes(filler) {
            let classes = if self.contains_class(&class) {
                self.subclass_closure(&class, Direction::Down).unwrap_or_default()
            } else {
                vec![class]
            };
            for c in classes {
                for s in self.graph.subjects(rdf::TYPE, &Term::iri(c)) {
                    if let Some(iri) = s.as_iri() {
                        out.push(iri.to_owned());
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{eo, mini};
    use super::*;
    use crate::rdf::vocab::om;
    use crate::rdf::Store;

    fn om_iri(local: &str) -> String {
        format!("{}{local}", om::NS)
    }

    #[test]
    fn motor_measure_types() {
        let s = mini().derive_form_schema(&eo("Motor")).unwrap();
        let labels: Vec<_> = s.allowed_measure_types.iter().map(|m| m.label.as_str()).collect();
        assert_eq!(labels, ["Electric potential", "Frequency"]);
        let ep = &s.allowed_measure_types[0];
        assert_eq!(ep.iri, om_iri("ElectricPotential"));
        assert_eq!(
            ep.allowed_units,
            [
                UnitOption {
                    iri: om_iri("kilovolt"),
                    symbol: "kV".into(),
                    label: "kilovolt".into()
                },
                UnitOption {
                    iri: om_iri("volt"),
                    symbol: "V".into(),
                    label: "volt".into()
                },
            ]
        );
        let hz: Vec<_> = s.allowed_measure_types[1]
            .allowed_units
            .iter()
            .map(|u| u.symbol.as_str())
            .collect();
        assert_eq!(hz, ["Hz", "kHz"]);
        assert!(s.fixed_properties.is_empty());
        assert!(s.refinement_properties.is_empty());
        assert_eq!(s.basic_fields, ["name", "manufacturer", "description"]);
    }

    #[test]
    fn subclass_inherits_measures() {
        let s = mini().derive_form_schema(&eo("ACMotor")).unwrap();
        assert_eq!(s.allowed_measure_types.len(), 2);
    }

    #[test]
    fn profile_head_fixed_and_refinement() {
        let s = mini().derive_form_schema(&eo("ExtrusionHeadForProfiles")).unwrap();
        assert_eq!(s.fixed_properties.len(), 1);
        let f = &s.fixed_properties[0];
        assert_eq!(
            (f.label.as_str(), f.value.label.as_str()),
            ("has type of extrudate", "Profile")
        );
        assert_eq!(f.value.value, eo("Profile"));
        assert_eq!(s.refinement_properties.len(), 1);
        let r = &s.refinement_properties[0];
        assert_eq!(r.label, "has shape of profile");
        let candidates: Vec<_> = r.candidates.iter().map(|c| c.value.label.as_str()).collect();
        assert_eq!(candidates, ["Circular", "Non-circular"]);
        assert_eq!(r.candidates[0].classes, [eo("ExtrusionHeadForCircularProfiles")]);
        // Temperature is inherited from ExtrusionHead.
        assert_eq!(s.allowed_measure_types.len(), 1);
    }

    #[test]
    fn head_refinements_cover_every_subclass_restriction() {
        let s = mini().derive_form_schema(&eo("ExtrusionHead")).unwrap();
        let props: Vec<_> = s.refinement_properties.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(
            props,
            [
                "has type of extrudate",
                "has shape of profile",
                "has quantity of plates"
            ]
        );
        let plates: Vec<_> = s.refinement_properties[2]
            .candidates
            .iter()
            .map(|c| c.value.value.as_str())
            .collect();
        assert_eq!(plates, ["1", "2"]);
    }

    #[test]
    fn bare_class_has_basic_fields_only() {
        let store = Store::new();
        store
            .load_turtle(
                "@prefix owl: <http://www.w3.org/2002/07/owl#> . <http://e/Lonely> a owl:Class .",
                None,
            )
            .unwrap();
        let o = super::super::Ontology::new(store.snapshot(), Default::default());
        let s = o.derive_form_schema("http://e/Lonely").unwrap();
        assert_eq!(s.basic_fields.len(), 3);
        assert!(s.allowed_measure_types.is_empty() && s.fixed_properties.is_empty());
        assert!(s.refinement_properties.is_empty());
        assert!(o.derive_form_schema("http://e/Missing").is_err());
    }

    #[test]
    fn schema_is_stable() {
        let o = mini();
        for c in ["Motor", "ExtrusionHead", "Extruder", "FeedHopper"] {
            assert_eq!(
                o.derive_form_schema(&eo(c)).unwrap(),
                o.derive_form_schema(&eo(c)).unwrap()
            );
        }
    }

    #[test]
    fn value_option_round_trip() {
        let o = mini();
        for t in [
            Term::iri(eo("Circular")),
            Term::literal(Literal::integer(2)),
            Term::string("x"),
        ] {
            assert_eq!(ValueOption::from_term(&o, &t).to_term(), t);
        }
    }
}
