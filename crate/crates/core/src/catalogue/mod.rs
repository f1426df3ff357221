//! Customer-facing catalogue: extruder listing, detail views, search and
//! information requests.
//!
//! Everything is read through the query templates, so an operator who edits
//! a template changes what the catalogue shows.

mod leads;
mod search;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use leads::{is_valid_email, InfoRequest, LeadError, LeadOrigin, LeadRecord, LeadStore};
pub use search::{
    validate_filters, AdvancedCondition, BottleSize, PropertyConstraint, SearchError, SearchParams, Space, Volume,
    VOLUME_TOLERANCE_HIGH, VOLUME_TOLERANCE_LOW,
};

use crate::annotation::{local_id_of, Qualifier};
use crate::annotation::{ModelFormat, Point};
use crate::ontology::label_of;
use crate::rdf::vocab::{app, dcterms, om, owl, rdf, rdfs, s4inma};
use crate::rdf::{iri, Graph, Term};
use crate::sparql::{evaluate, Row, Substitution, TemplateError, TemplateRegistry};

#[derive(Debug, thiserror::Error)]
pub enum CatalogueError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("unknown extruder {0}")]
    UnknownExtruder(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtruderView {
    pub id: String,
    pub local_id: Option<String>,
    pub name: String,
    pub manufacturer: String,
    pub description: String,
    pub visible: bool,
    pub production: Production,
    pub parts: Vec<ComponentView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Production {
    /// Human-readable batch line, e.g. "500 x 1 l bottle".
    pub batch: Option<String>,
    pub batch_item: Option<String>,
    pub batch_size: Option<f64>,
    pub bottles_per_hour: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentView {
    pub id: String,
    pub type_class: String,
    pub type_label: String,
    pub label: String,
    pub part_code: Option<String>,
    pub irdi: Option<String>,
    pub properties: Vec<PropertyView>,
    pub model: Option<ModelView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyView {
    pub quantity: String,
    /// Measure type label, e.g. "Frequency".
    pub label: String,
    pub measure_type: String,
    pub qualifier: Qualifier,
    pub value: f64,
    pub unit: String,
    pub unit_symbol: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelView {
    pub id: String,
    pub file_path: String,
    pub format: String,
    pub checksum: String,
    pub position: Point,
    /// Whether the browser viewer can load the file.
    pub viewable: bool,
}

/// Read side of the catalogue over a template registry.
#[derive(Debug, Clone)]
pub struct Catalogue {
    templates: TemplateRegistry,
}

impl Default for Catalogue {
    fn default() -> Self {
        Catalogue::new(TemplateRegistry::builtin())
    }
}

impl Catalogue {
    pub fn new(templates: TemplateRegistry) -> Self {
        Catalogue { templates }
    }

    pub fn templates(&self) -> &TemplateRegistry {
        &self.templates
    }

    fn run(&self, graph: &Graph, id: &str, subs: &[(&str, Substitution)]) -> Result<Vec<Row>, TemplateError> {
        let subs: BTreeMap<String, Substitution> = subs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let query = self.templates.bind(id, &subs)?;
        Ok(evaluate(graph, &query).rows)
    }

    /// Visible extruders with their parts, ordered by IRI.
    pub fn get_all_extruders(&self, graph: &Graph) -> Result<Vec<ExtruderView>, CatalogueError> {
        let mut out = Vec::new();
        for (id, row) in self.extruder_rows(graph)? {
            if row_visible(&row) {
                out.push(self.view_from_row(graph, &id, &row)?);
            }
        }
        Ok(out)
    }

    /// One extruder regardless of visibility.
    pub fn extruder_view(&self, graph: &Graph, extruder: &str) -> Result<ExtruderView, CatalogueError> {
        let rows = self.extruder_rows(graph)?;
        let row = rows
            .get(extruder)
            .ok_or_else(|| CatalogueError::UnknownExtruder(extruder.to_owned()))?;
        self.view_from_row(graph, extruder, row)
    }

    /// First listing row per extruder, keyed (and so ordered) by IRI.
    fn extruder_rows(&self, graph: &Graph) -> Result<BTreeMap<String, Row>, CatalogueError> {
        let mut rows = self.run(graph, "allExtrudersList", &[])?;
        rows.sort();
        let mut by_id = BTreeMap::new();
        for row in rows {
            if let Some(Term::Iri(id)) = row.get("extruder") {
                by_id.entry(id.clone()).or_insert(row);
            }
        }
        Ok(by_id)
    }

    fn view_from_row(&self, graph: &Graph, id: &str, row: &Row) -> Result<ExtruderView, CatalogueError> {
        let text = |var: &str| row.get(var).map(|t| t.value_str().to_owned()).unwrap_or_default();
        let batch = batch_info(graph, id);
        Ok(ExtruderView {
            id: id.to_owned(),
            local_id: local_id_of(id).map(str::to_owned),
            name: text("name"),
            manufacturer: text("manufacturer"),
            description: text("description"),
            visible: row_visible(row),
            production: Production {
                batch: batch.as_ref().map(|b| b.summary()),
                batch_item: batch.as_ref().map(|b| b.item.clone()),
                batch_size: batch.as_ref().map(|b| b.size),
                bottles_per_hour: row.get("throughput").and_then(Term::as_f64).unwrap_or(0.0),
            },
            parts: self.parts_by_id(graph, id)?,
        })
    }

    /// Components of an extruder with their properties and model, ordered
    /// by IRI.
    pub fn parts_by_id(&self, graph: &Graph, extruder: &str) -> Result<Vec<ComponentView>, CatalogueError> {
        let rows = self.run(
            graph,
            "partsByExtruderId",
            &[("EXTRUDER", Substitution::Term(iri(extruder)))],
        )?;
        let mut grouped: BTreeMap<String, (BTreeSet<String>, String)> = BTreeMap::new();
        for row in rows {
            let (Some(Term::Iri(c)), Some(Term::Iri(t))) = (row.get("component"), row.get("type")) else {
                continue;
            };
            let entry = grouped.entry(c.clone()).or_default();
            entry.0.insert(t.clone());
            let label = row.get("label").map(|l| l.value_str().to_owned()).unwrap_or_default();
            if entry.1.is_empty() || label < entry.1 {
                entry.1 = label;
            }
        }
        grouped
            .into_iter()
            .map(|(c, (types, label))| {
                let type_class = most_specific(graph, &types);
                Ok(ComponentView {
                    type_label: label_of(graph, &type_class),
                    label,
                    part_code: graph.object(&iri(&c), app::PART_CODE).map(|t| t.value_str().to_owned()),
                    irdi: graph.object(&iri(&c), app::IRDI).map(|t| t.value_str().to_owned()),
                    properties: self.properties_by_id(graph, &c)?,
                    model: self.model_by_id(graph, &c)?,
                    type_class,
                    id: c,
                })
            })
            .collect()
    }

    pub fn properties_by_id(&self, graph: &Graph, component: &str) -> Result<Vec<PropertyView>, CatalogueError> {
        let rows = self.run(
            graph,
            "propertiesById",
            &[("COMPONENT", Substitution::Term(iri(component)))],
        )?;
        let mut by_q: BTreeMap<(usize, String), PropertyView> = BTreeMap::new();
        for row in rows {
            let get = |v: &str| row.get(v).map(|t| t.value_str().to_owned()).unwrap_or_default();
            let Some(qualifier) = row
                .get("qualifier")
                .and_then(Term::as_iri)
                .and_then(Qualifier::from_property)
            else {
                continue;
            };
            let Some(value) = row.get("value").and_then(Term::as_f64) else {
                continue;
            };
            let quantity = get("quantity");
            let measure_type = get("measureType");
            // Quantities may carry extra types; keep a measure class label.
            if measure_type == owl::NAMED_INDIVIDUAL {
                continue;
            }
            by_q.entry((quantity.len(), quantity.clone()))
                .or_insert_with(|| PropertyView {
                    label: label_of(graph, &measure_type),
                    quantity,
                    measure_type,
                    qualifier,
                    value,
                    unit: get("unit"),
                    unit_symbol: get("symbol"),
                    description: get("description"),
                });
        }
        Ok(by_q.into_values().collect())
    }

    /// The component's first model by IRI, if any.
    pub fn model_by_id(&self, graph: &Graph, component: &str) -> Result<Option<ModelView>, CatalogueError> {
        let mut rows = self.run(
            graph,
            "modelsById",
            &[("COMPONENT", Substitution::Term(iri(component)))],
        )?;
        rows.sort();
        Ok(rows.into_iter().next().map(|row| {
            let get = |v: &str| row.get(v).map(|t| t.value_str().to_owned()).unwrap_or_default();
            let num = |v: &str| row.get(v).and_then(Term::as_f64).unwrap_or(0.0);
            let format = get("format");
            ModelView {
                id: get("model"),
                file_path: get("filePath"),
                viewable: format.parse::<ModelFormat>().is_ok_and(ModelFormat::viewable),
                format,
                checksum: get("checksum"),
                position: Point {
                    x: num("x"),
                    y: num("y"),
                    z: num("z"),
                },
            }
        }))
    }
}

fn row_visible(row: &Row) -> bool {
    row.get("visible").and_then(Term::as_bool) == Some(true)
}

/// Drops `owl:NamedIndividual` and any type that is a superclass of another
/// asserted type; ties go to the smallest IRI.
fn most_specific(graph: &Graph, types: &BTreeSet<String>) -> String {
    let candidates: Vec<&String> = types.iter().filter(|t| t.as_str() != owl::NAMED_INDIVIDUAL).collect();
    candidates
        .iter()
        .find(|t| !candidates.iter().any(|o| o != *t && is_ancestor(graph, o, t)))
        .or(candidates.first())
        .map(|t| (*t).clone())
        .unwrap_or_else(|| types.iter().next().cloned().unwrap_or_default())
}

fn is_ancestor(graph: &Graph, sub: &str, sup: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([iri(sub)]);
    while let Some(c) = queue.pop_front() {
        for parent in graph.objects(&c, rdfs::SUB_CLASS_OF) {
            if parent.as_iri() == Some(sup) {
                return true;
            }
            if seen.insert(parent.clone()) {
                queue.push_back(parent);
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq)]
struct BatchInfo {
    item: String,
    size: f64,
    unit_symbol: Option<String>,
}

impl BatchInfo {
    fn summary(&self) -> String {
        let size = crate::rdf::format_double(self.size);
        match &self.unit_symbol {
            Some(sym) if sym != "1" => format!("{size} {sym} of {}", self.item),
            _ => format!("{size} x {}", self.item),
        }
    }
}

/// Follows `E a [onProperty P; allValuesFrom [intersectionOf (Batch
/// [onProperty hasBatchSize; hasValue S])]]` where P is inverse of
/// `needsEquipment`.
fn batch_info(graph: &Graph, extruder: &str) -> Option<BatchInfo> {
    let inverse_of_needs = |p: &Term| {
        graph
            .objects(p, owl::INVERSE_OF)
            .iter()
            .any(|o| o.as_iri() == Some(s4inma::NEEDS_EQUIPMENT))
    };
    for r in graph.objects(&iri(extruder), rdf::TYPE) {
        let Some(p) = graph.object(&r, owl::ON_PROPERTY) else {
            continue;
        };
        if !inverse_of_needs(&p) {
            continue;
        }
        let Some(expr) = graph.object(&r, owl::ALL_VALUES_FROM) else {
            continue;
        };
        let Some(list) = graph.object(&expr, owl::INTERSECTION_OF) else {
            continue;
        };
        let members = graph.list_items(&list);
        let item = members.iter().find(|m| {
            graph
                .objects(m, rdfs::SUB_CLASS_OF)
                .iter()
                .any(|s| s.as_iri() == Some(s4inma::ITEM_BATCH))
        })?;
        let size_node = members.iter().find_map(|m| {
            (graph.object(m, owl::ON_PROPERTY)?.as_iri() == Some(app::HAS_BATCH_SIZE))
                .then(|| graph.object(m, owl::HAS_VALUE))
                .flatten()
        })?;
        let measure = graph.object(&size_node, om::HAS_PHENOMENON)?;
        let size = graph.object(&measure, om::HAS_NUMERICAL_VALUE)?.as_f64()?;
        let unit_symbol = graph
            .object(&measure, om::HAS_UNIT)
            .and_then(|u| graph.object(&u, om::SYMBOL))
            .map(|s| s.value_str().to_owned());
        let item = graph
            .object(item, rdfs::LABEL)
            .map(|l| l.value_str().to_owned())
            .or_else(|| {
                graph
                    .object(&measure, dcterms::DESCRIPTION)
                    .map(|d| d.value_str().to_owned())
            })
            .unwrap_or_default();
        return Some(BatchInfo {
            item,
            size,
            unit_symbol,
        });
    }
    None
}

#[cfg(test)]
pub(crate) mod tests;
