//! Filtered search: production and dimension filters become FILTER
//! expressions on the basic search template, advanced component conditions
//! are checked against the ontology afterwards.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Catalogue, CatalogueError, ExtruderView};
use crate::annotation::litres_per;
use crate::ontology::{resolve_iri, Direction, Ontology, OntologyError, RestrictionKind};
use crate::rdf::vocab::{extruont, om};
use crate::rdf::{format_double, iri, PrefixMap, Term};
use crate::sparql::{Substitution, TemplateError};

/// A single-volume extruder accepts bottles within these fractions of its
/// volume.
pub const VOLUME_TOLERANCE_LOW: f64 = 0.9;
pub const VOLUME_TOLERANCE_HIGH: f64 = 1.1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchParams {
    #[serde(default)]
    pub bottle_volume: Option<Volume>,
    #[serde(default)]
    pub bottle_size: Option<BottleSize>,
    #[serde(default)]
    pub bottles_per_day: Option<f64>,
    #[serde(default)]
    pub hours_per_day: Option<f64>,
    #[serde(default)]
    pub extruder_space: Option<Space>,
    #[serde(default)]
    pub advanced: Vec<AdvancedCondition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub value: f64,
    #[serde(default = "default_volume_unit")]
    pub unit: String,
}

fn default_volume_unit() -> String {
    om::LITRE.to_owned()
}

/// Bottle width and height in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BottleSize {
    pub width: f64,
    pub height: f64,
}

/// Available floor space in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub width: f64,
    pub height: f64,
    pub length: f64,
}

/// Require a component of `class` (or a subclass) whose refinement
/// properties take the given values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvancedCondition {
    pub class: String,
    #[serde(default)]
    pub constraints: Vec<PropertyConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyConstraint {
    pub property: String,
    /// An IRI (or CURIE) for object values, the lexical form otherwise.
    pub value: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("{field} must be a positive number")]
    NotPositive { field: &'static str },
    #[error("hours_per_day must be in (0, 24]")]
    HoursOutOfRange,
    #[error("bottles_per_day needs hours_per_day")]
    RateWithoutHours,
    #[error("unsupported volume unit {0}")]
    VolumeUnit(String),
    #[error("{0}")]
    Unresolved(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("{property} is not a refinement property of {class}")]
    NotRefinement { class: String, property: String },
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Catalogue(#[from] CatalogueError),
}

impl SearchError {
    /// The request field the error refers to.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            SearchError::NotPositive { field } => Some(field),
            SearchError::HoursOutOfRange => Some("hours_per_day"),
            SearchError::RateWithoutHours => Some("bottles_per_day"),
            SearchError::VolumeUnit(_) => Some("bottle_volume"),
            SearchError::Unresolved(_) | SearchError::Ontology(_) | SearchError::NotRefinement { .. } => {
                Some("advanced")
            }
            _ => None,
        }
    }
}

fn positive(value: f64, field: &'static str) -> Result<String, SearchError> {
    if value.is_finite() && value > 0.0 {
        Ok(format_double(value))
    } else {
        Err(SearchError::NotPositive { field })
    }
}

/// Builds the filter expression for the basic search template. An empty
/// string means no constraint.
pub fn validate_filters(params: &SearchParams) -> Result<String, SearchError> {
    let mut parts = Vec::new();
    match (params.bottles_per_day, params.hours_per_day) {
        (Some(_), None) => return Err(SearchError::RateWithoutHours),
        (Some(per_day), Some(hours)) => {
            positive(per_day, "bottles_per_day")?;
            positive(hours, "hours_per_day")?;
            if hours > 24.0 {
                return Err(SearchError::HoursOutOfRange);
            }
            parts.push(format!("?bph >= {}", format_double(per_day / hours)));
        }
        (None, Some(hours)) => {
            positive(hours, "hours_per_day")?;
            if hours > 24.0 {
                return Err(SearchError::HoursOutOfRange);
            }
        }
        (None, None) => {}
    }
    if let Some(v) = &params.bottle_volume {
        let factor = resolve_iri(&PrefixMap::catalogue_defaults(), &v.unit)
            .ok()
            .and_then(|u| litres_per(&u))
            .ok_or_else(|| SearchError::VolumeUnit(v.unit.clone()))?;
        positive(v.value, "bottle_volume")?;
        let litres = v.value * factor;
        let (lit, lo, hi) = (
            format_double(litres),
            format_double(litres / VOLUME_TOLERANCE_HIGH),
            format_double(litres / VOLUME_TOLERANCE_LOW),
        );
        parts.push(format!(
            "(?vmin <= {lit} && ?vmax >= {lit}) || (?vmin = ?vmax && ?vmin >= {lo} && ?vmin <= {hi})"
        ));
    }
    if let Some(b) = &params.bottle_size {
        let (w, h) = (positive(b.width, "bottle_size")?, positive(b.height, "bottle_size")?);
        parts.push(format!("?bw >= {w} && ?bh >= {h}"));
    }
    if let Some(s) = &params.extruder_space {
        let w = positive(s.width, "extruder_space")?;
        let h = positive(s.height, "extruder_space")?;
        let l = positive(s.length, "extruder_space")?;
        parts.push(format!("?width <= {w} && ?height <= {h} && ?length <= {l}"));
    }
    Ok(parts.iter().map(|p| format!("({p})")).collect::<Vec<_>>().join(" && "))
}

/// An advanced condition with IRIs resolved and its class down-closure.
struct ResolvedCondition {
    classes: BTreeSet<String>,
    constraints: Vec<(String, String)>,
}

fn resolve_conditions(ontology: &Ontology, params: &SearchParams) -> Result<Vec<ResolvedCondition>, SearchError> {
    let prefixes = &ontology.config().prefixes;
    let resolve = |v: &str| resolve_iri(prefixes, v).map_err(|e| SearchError::Unresolved(e.to_string()));
    params
        .advanced
        .iter()
        .map(|cond| {
            let class = resolve(&cond.class)?;
            let classes: BTreeSet<String> = ontology
                .subclass_closure(&class, Direction::Down)?
                .into_iter()
                .collect();
            let schema = ontology.derive_form_schema(&class)?;
            let constraints = cond
                .constraints
                .iter()
                .map(|c| {
                    let property = resolve(&c.property)?;
                    if !schema.refinement_properties.iter().any(|r| r.property == property) {
                        return Err(SearchError::NotRefinement {
                            class: class.clone(),
                            property,
                        });
                    }
                    let value = resolve_iri(prefixes, &c.value).unwrap_or_else(|_| c.value.clone());
                    Ok((property, value))
                })
                .collect::<Result<_, SearchError>>()?;
            Ok(ResolvedCondition { classes, constraints })
        })
        .collect()
}

/// Values of `property` on a component: asserted ones plus `hasValue`
/// restrictions on its types and their superclasses.
pub(crate) fn component_values(ontology: &Ontology, component: &Term, property: &str) -> Vec<Term> {
    let mut out = ontology.graph().objects(component, property);
    for t in ontology.types_of(component) {
        for r in ontology.inherited_restrictions(&t).unwrap_or_default() {
            if r.kind == RestrictionKind::HasValue && r.property == property && !out.contains(&r.filler) {
                out.push(r.filler.clone());
            }
        }
    }
    out
}

pub(crate) fn value_matches(term: &Term, wanted: &str) -> bool {
    match term {
        Term::Iri(i) => i == wanted,
        Term::Literal(l) => {
            l.lexical() == wanted || matches!((l.as_f64(), wanted.trim().parse::<f64>()), (Some(a), Ok(b)) if a == b)
        }
        Term::BlankNode(_) => false,
    }
}

fn satisfies(ontology: &Ontology, extruder: &str, cond: &ResolvedCondition) -> bool {
    let graph = ontology.graph();
    graph.objects(&iri(extruder), extruont::HAS_COMPONENT).iter().any(|c| {
        ontology.types_of(c).iter().any(|t| cond.classes.contains(t))
            && cond
                .constraints
                .iter()
                .all(|(p, v)| component_values(ontology, c, p).iter().any(|t| value_matches(t, v)))
    })
}

impl Catalogue {
    /// Visible extruders passing every filter, ordered by IRI.
    pub fn search(&self, ontology: &Ontology, params: &SearchParams) -> Result<Vec<ExtruderView>, SearchError> {
        let fragment = validate_filters(params)?;
        let conditions = resolve_conditions(ontology, params)?;
        let graph = ontology.graph();
        let rows = self.run(
            graph,
            "BasicSearchQuery",
            &[("FILTERS", Substitution::Filter(fragment))],
        )?;
        let ids: BTreeSet<String> = rows
            .iter()
            .filter(|r| super::row_visible(r))
            .filter_map(|r| r.get("extruder").and_then(Term::as_iri).map(str::to_owned))
            .collect();
        let mut out = Vec::new();
        for id in ids {
            if conditions.iter().all(|c| satisfies(ontology, &id, c)) {
                out.push(self.extruder_view(graph, &id)?);
            }
        }
        Ok(out)
    }
}
