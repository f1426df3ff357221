//! Admin submissions to RDF.
//!
//! Instance IRIs live in the `Extruder01#` namespace. An extruder `E01`
//! owns every node whose IRI starts with `E01.` (components, quantity
//! nodes, the batch restriction, CAD models), which is what deletion
//! removes. Builders are pure; the `save`/`delete`/`set_visible` helpers
//! apply their batches through the store's serialized writer.

mod cad;
mod irdi;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub(crate) use cad::parse_timestamp;
pub use cad::{build_cad_triples, model_iri, model_triples, replace_cad_model, CadModelRef, ModelFormat, Point};
pub use irdi::{IrdiError, IrdiMapping, IrdiMatch, BUNDLED_IRDI};

use crate::assets::{AssetError, AssetStore};
use crate::ontology::{resolve_iri, Direction, Ontology};
use crate::rdf::vocab::{app, dcterms, extruont, om, owl, rdf, rdfs, s4inma};
use crate::rdf::{iri, Batch, Graph, Literal, Store, StoreError, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum AnnotationError {
    #[error("invalid submission: {}", summarize(.0))]
    Invalid(Vec<FieldError>),
    #[error("extruder {0} already exists")]
    AlreadyExists(String),
    #[error("unknown extruder {0}")]
    UnknownExtruder(String),
    #[error("unknown component {0}")]
    UnknownComponent(String),
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn summarize(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(|e| format!("{}: {}", e.field, e.message))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qualifier {
    #[default]
    Exact,
    Minimum,
    Maximum,
}

impl Qualifier {
    pub fn property(self) -> &'static str {
        match self {
            Qualifier::Exact => app::HAS_EXACT_QUANTITY,
            Qualifier::Minimum => app::HAS_MINIMUM_QUANTITY,
            Qualifier::Maximum => app::HAS_MAXIMUM_QUANTITY,
        }
    }

    pub fn from_property(iri: &str) -> Option<Self> {
        [Qualifier::Exact, Qualifier::Minimum, Qualifier::Maximum]
            .into_iter()
            .find(|q| q.property() == iri)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtruderSubmission {
    pub local_id: String,
    pub name: String,
    pub manufacturer: String,
    #[serde(default)]
    pub description: String,
    #[serde(default = "default_true")]
    pub visible: bool,
    pub batch: BatchSpec,
    pub dimensions: Dimensions,
    /// Rated throughput in bottles per hour.
    pub throughput: f64,
    pub product: ProductSpec,
    #[serde(default)]
    pub components: Vec<ComponentSubmission>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub item_label: String,
    pub size: f64,
    #[serde(default = "default_batch_unit")]
    pub unit: String,
    #[serde(default)]
    pub description: String,
}

fn default_batch_unit() -> String {
    om::ONE.to_owned()
}

/// Machine footprint in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub width: f64,
    pub height: f64,
    pub length: f64,
}

/// The bottles an extruder can blow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub min_volume: f64,
    pub max_volume: f64,
    #[serde(default = "default_volume_unit")]
    pub volume_unit: String,
    /// Metres.
    pub max_width: f64,
    /// Metres.
    pub max_height: f64,
}

fn default_volume_unit() -> String {
    om::LITRE.to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSubmission {
    pub local_id: String,
    pub component_type: String,
    pub label: String,
    #[serde(default)]
    pub part_code: Option<String>,
    #[serde(default)]
    pub features: Vec<FeatureSubmission>,
    #[serde(default)]
    pub cad: Option<CadModelRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSubmission {
    pub measure_type: String,
    pub unit: String,
    pub value: f64,
    #[serde(default)]
    pub qualifier: Qualifier,
    #[serde(default)]
    pub description: String,
}

/// Litres per unit for the accepted volume units.
pub fn litres_per(unit: &str) -> Option<f64> {
    match unit {
        om::LITRE => Some(1.0),
        om::MILLILITRE => Some(0.001),
        om::CUBIC_METRE => Some(1000.0),
        _ => None,
    }
}

pub fn is_valid_local_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn extruder_iri(local_id: &str) -> String {
    format!("{}{local_id}", extruont::INSTANCES)
}

pub fn component_iri(extruder_local: &str, component_local: &str) -> String {
    format!("{}{extruder_local}.{component_local}", extruont::INSTANCES)
}

/// `E01` for `…/Extruder01#E01`; `None` outside the instance namespace.
pub fn local_id_of(iri: &str) -> Option<&str> {
    iri.strip_prefix(extruont::INSTANCES)
}

/// Builds triples from submissions, checking them against the ontology.
pub struct Annotator<'a> {
    ontology: &'a Ontology,
    irdi: Option<&'a IrdiMapping>,
    assets: Option<&'a AssetStore>,
}

struct Errors(Vec<FieldError>);

impl Errors {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            field: field.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, field: &str, value: f64) {
        if !(value.is_finite() && value > 0.0) {
            self.push(field, "must be a positive number");
        }
    }

    fn non_empty(&mut self, field: &str, value: &str) {
        if value.trim().is_empty() {
            self.push(field, "must not be empty");
        }
    }
}

impl<'a> Annotator<'a> {
    pub fn new(ontology: &'a Ontology) -> Self {
        Annotator {
            ontology,
            irdi: None,
            assets: None,
        }
    }

    pub fn with_irdi(mut self, irdi: &'a IrdiMapping) -> Self {
        self.irdi = Some(irdi);
        self
    }

    pub fn with_assets(mut self, assets: &'a AssetStore) -> Self {
        self.assets = Some(assets);
        self
    }

    pub fn ontology(&self) -> &Ontology {
        self.ontology
    }

    fn resolve(&self, errors: &mut Errors, field: &str, value: &str) -> Option<String> {
        match resolve_iri(&self.ontology.config().prefixes, value) {
            Ok(iri) => Some(iri),
            Err(e) => {
                errors.push(field, e.to_string());
                None
            }
        }
    }

    /// Checks every field and returns a copy with IRIs expanded. All
    /// problems are reported together.
    pub fn validate(&self, submission: &ExtruderSubmission) -> Result<ExtruderSubmission, AnnotationError> {
        let mut out = submission.clone();
        let mut errors = Errors(Vec::new());
        if !is_valid_local_id(&submission.local_id) {
            errors.push("local_id", "must match [A-Za-z0-9_-]+");
        }
        errors.non_empty("name", &submission.name);
        errors.non_empty("manufacturer", &submission.manufacturer);
        errors.non_empty("batch.item_label", &submission.batch.item_label);
        errors.positive("batch.size", submission.batch.size);
        if let Some(u) = self.resolve(&mut errors, "batch.unit", &submission.batch.unit) {
            out.batch.unit = u;
        }
        errors.positive("dimensions.width", submission.dimensions.width);
        errors.positive("dimensions.height", submission.dimensions.height);
        errors.positive("dimensions.length", submission.dimensions.length);
        errors.positive("throughput", submission.throughput);
        let p = &submission.product;
        errors.positive("product.min_volume", p.min_volume);
        errors.positive("product.max_volume", p.max_volume);
        if p.max_volume < p.min_volume {
            errors.push("product.max_volume", "must not be below product.min_volume");
        }
        errors.positive("product.max_width", p.max_width);
        errors.positive("product.max_height", p.max_height);
        if let Some(u) = self.resolve(&mut errors, "product.volume_unit", &p.volume_unit) {
            if litres_per(&u).is_none() {
                errors.push("product.volume_unit", "must be litre, millilitre or cubic metre");
            }
            out.product.volume_unit = u;
        }

        let mut seen = BTreeSet::new();
        for (i, c) in submission.components.iter().enumerate() {
            let field = |f: &str| format!("components[{i}].{f}");
            if !is_valid_local_id(&c.local_id) {
                errors.push(field("local_id"), "must match [A-Za-z0-9_-]+");
            } else if !seen.insert(c.local_id.as_str()) {
                errors.push(field("local_id"), "duplicate component id");
            }
            errors.non_empty(&field("label"), &c.label);
            if c.part_code.as_deref().is_some_and(|s| s.trim().is_empty()) {
                errors.push(field("part_code"), "must not be blank when present");
            }
            let schema = match self.resolve(&mut errors, &field("component_type"), &c.component_type) {
                Some(ty) => {
                    out.components[i].component_type = ty.clone();
                    if !self.ontology.contains_class(&ty) {
                        errors.push(field("component_type"), format!("unknown class {ty}"));
                        None
                    } else if self.ontology.contains_class(extruont::EXTRUDER_COMPONENT)
                        && !self.ontology.is_subclass_of(&ty, extruont::EXTRUDER_COMPONENT)
                    {
                        errors.push(field("component_type"), "is not an extruder component class");
                        None
                    } else {
                        self.ontology.derive_form_schema(&ty).ok()
                    }
                }
                None => None,
            };
            for (j, f) in c.features.iter().enumerate() {
                let ff = |x: &str| format!("components[{i}].features[{j}].{x}");
                if !f.value.is_finite() {
                    errors.push(ff("value"), "must be a finite number");
                }
                let measure = self.resolve(&mut errors, &ff("measure_type"), &f.measure_type);
                let unit = self.resolve(&mut errors, &ff("unit"), &f.unit);
                let (Some(measure), Some(unit)) = (measure, unit) else {
                    continue;
                };
                out.components[i].features[j].measure_type = measure.clone();
                out.components[i].features[j].unit = unit.clone();
                let Some(schema) = &schema else { continue };
                match schema.allowed_measure_types.iter().find(|m| m.iri == measure) {
                    None => errors.push(
                        ff("measure_type"),
                        format!("{measure} is not applicable to {}", schema.component_class),
                    ),
                    Some(m) => {
                        if !m.allowed_units.iter().any(|u| u.iri == unit) {
                            errors.push(ff("unit"), format!("{unit} is not a unit of {}", m.label));
                        }
                    }
                }
            }
            if let Some(cad) = &c.cad {
                match self.assets {
                    None => errors.push(field("cad"), "no asset directory configured"),
                    Some(assets) => {
                        if let Err(e) = assets.verify(&cad.path, &cad.checksum) {
                            errors.push(field("cad.path"), e.to_string());
                        }
                    }
                }
                for (v, name) in [(cad.position.x, "x"), (cad.position.y, "y"), (cad.position.z, "z")] {
                    if !v.is_finite() {
                        errors.push(field(&format!("cad.position.{name}")), "must be a finite number");
                    }
                }
            }
        }
        if errors.0.is_empty() {
            Ok(out)
        } else {
            Err(AnnotationError::Invalid(errors.0))
        }
    }

    /// Validates, then emits the deterministic triple set for a submission.
    pub fn build_extruder_triples(&self, submission: &ExtruderSubmission) -> Result<Vec<Triple>, AnnotationError> {
        let s = self.validate(submission)?;
        let e_iri = extruder_iri(&s.local_id);
        let e = iri(&e_iri);
        let node = |suffix: &str| iri(format!("{e_iri}.{suffix}"));
        let mut out = Vec::new();
        let mut add = |s: &Term, p: &str, o: Term| out.push(Triple::new(s.clone(), iri(p), o));

        add(&e, rdf::TYPE, iri(extruont::EXTRUDER));
        add(&e, rdfs::LABEL, Term::string(&s.name));
        add(&e, app::MANUFACTURER, Term::string(&s.manufacturer));
        add(&e, dcterms::DESCRIPTION, Term::string(&s.description));
        add(&e, &self.ontology.config().visible_property, Term::boolean(s.visible));
        add(&e, app::RATED_THROUGHPUT, Term::double(s.throughput));
        add(&e, app::WIDTH, Term::double(s.dimensions.width));
        add(&e, app::HEIGHT, Term::double(s.dimensions.height));
        add(&e, app::LENGTH, Term::double(s.dimensions.length));
        let factor = litres_per(&s.product.volume_unit).expect("validated");
        add(&e, app::MIN_BOTTLE_VOLUME, Term::double(s.product.min_volume * factor));
        add(&e, app::MAX_BOTTLE_VOLUME, Term::double(s.product.max_volume * factor));
        add(&e, app::MAX_BOTTLE_WIDTH, Term::double(s.product.max_width));
        add(&e, app::MAX_BOTTLE_HEIGHT, Term::double(s.product.max_height));

        // Batch: E a [owl:onProperty producesBatch; owl:allValuesFrom
        // (Batch and [owl:onProperty hasBatchSize; owl:hasValue size])].
        let restriction = node("batchRestriction");
        let class_expr = node("batchClassExpr");
        let (cell0, cell1) = (node("batchList0"), node("batchList1"));
        let batch_class = node("Batch");
        let size_restriction = node("batchSizeRestriction");
        let size = node("batchSize");
        let measure = node("batchSizeMeasure");
        add(&e, rdf::TYPE, restriction.clone());
        add(&restriction, rdf::TYPE, iri(owl::RESTRICTION));
        add(&restriction, owl::ON_PROPERTY, iri(app::PRODUCES_BATCH));
        add(&restriction, owl::ALL_VALUES_FROM, class_expr.clone());
        add(&class_expr, owl::INTERSECTION_OF, cell0.clone());
        add(&cell0, rdf::FIRST, batch_class.clone());
        add(&cell0, rdf::REST, cell1.clone());
        add(&cell1, rdf::FIRST, size_restriction.clone());
        add(&cell1, rdf::REST, iri(rdf::NIL));
        add(&batch_class, rdfs::SUB_CLASS_OF, iri(s4inma::ITEM_BATCH));
        add(&batch_class, rdfs::LABEL, Term::string(&s.batch.item_label));
        add(&size_restriction, rdf::TYPE, iri(owl::RESTRICTION));
        add(&size_restriction, owl::ON_PROPERTY, iri(app::HAS_BATCH_SIZE));
        add(&size_restriction, owl::HAS_VALUE, size.clone());
        add(&size, om::HAS_PHENOMENON, measure.clone());
        let batch_description = if s.batch.description.trim().is_empty() {
            "Batch size"
        } else {
            s.batch.description.as_str()
        };
        add(&measure, dcterms::DESCRIPTION, Term::string(batch_description));
        add(&measure, om::HAS_NUMERICAL_VALUE, Term::double(s.batch.size));
        add(&measure, om::HAS_UNIT, iri(&s.batch.unit));

        for c in &s.components {
            let c_iri = component_iri(&s.local_id, &c.local_id);
            let ct = iri(&c_iri);
            add(&e, extruont::HAS_COMPONENT, ct.clone());
            add(&ct, rdf::TYPE, iri(&c.component_type));
            add(&ct, rdfs::LABEL, Term::string(&c.label));
            if let Some(code) = &c.part_code {
                add(&ct, app::PART_CODE, Term::string(code.trim()));
            }
            for (i, f) in c.features.iter().enumerate() {
                let q = iri(format!("{c_iri}.q{i}"));
                add(&ct, f.qualifier.property(), q.clone());
                add(&q, rdf::TYPE, iri(&f.measure_type));
                add(&q, om::HAS_PHENOMENON, ct.clone());
                add(&q, om::HAS_NUMERICAL_VALUE, Term::double(f.value));
                add(&q, om::HAS_UNIT, iri(&f.unit));
                add(&q, dcterms::DESCRIPTION, Term::string(&f.description));
            }
            if let Some(mapping) = self.irdi {
                let (triples, _) = mapping.enrich_with_irdi(self.ontology, &c.component_type, &ct);
                for t in triples {
                    add(&t.subject, t.predicate.as_iri().expect("iri predicate"), t.object);
                }
            }
            if let (Some(cad), Some(assets)) = (&c.cad, self.assets) {
                for t in build_cad_triples(&ct, cad, assets)? {
                    add(&t.subject, t.predicate.as_iri().expect("iri predicate"), t.object);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteMode {
    /// Fails if the extruder exists.
    Create,
    /// Replaces the extruder's owned triples, creating it if absent.
    Replace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaveOutcome {
    pub iri: String,
    pub revision: u64,
    pub triples: usize,
}

pub fn extruder_exists(graph: &Graph, extruder: &str) -> bool {
    graph.contains(&Triple::new(iri(extruder), iri(rdf::TYPE), iri(extruont::EXTRUDER)))
}

/// Validates and writes a submission as one batch.
pub fn save_extruder(
    store: &Store,
    annotator: &Annotator<'_>,
    submission: &ExtruderSubmission,
    mode: WriteMode,
) -> Result<SaveOutcome, AnnotationError> {
    let triples = annotator.build_extruder_triples(submission)?;
    let e_iri = extruder_iri(&submission.local_id);
    let count = triples.len();
    let (revision, ()) = store.update(|g| {
        let existing = if extruder_exists(g, &e_iri) {
            if mode == WriteMode::Create {
                return Err(AnnotationError::AlreadyExists(e_iri.clone()));
            }
            owned_triples(g, &e_iri).0
        } else {
            Vec::new()
        };
        let new: BTreeSet<&Triple> = triples.iter().collect();
        let old: BTreeSet<&Triple> = existing.iter().collect();
        let batch = Batch {
            remove: old.difference(&new).map(|t| (*t).clone()).collect(),
            insert: new.difference(&old).map(|t| (*t).clone()).collect(),
        };
        Ok((batch, ()))
    })?;
    Ok(SaveOutcome {
        iri: e_iri,
        revision,
        triples: count,
    })
}

/// Nodes owned by `root` (IRIs prefixed `root.` and blank nodes reached
/// from it), and the triples whose subject is owned. Also returns triples
/// outside the closure that point into it.
pub fn owned_triples(graph: &Graph, root: &str) -> (Vec<Triple>, Vec<Triple>) {
    let prefix = format!("{root}.");
    let owns = |t: &Term| match t {
        Term::Iri(i) => i.starts_with(&prefix),
        Term::BlankNode(_) => true,
        Term::Literal(_) => false,
    };
    let mut nodes = BTreeSet::from([iri(root)]);
    let mut queue = VecDeque::from([iri(root)]);
    let mut triples = Vec::new();
    while let Some(n) = queue.pop_front() {
        for t in graph.triples_matching(Some(&n), None, None) {
            if owns(&t.object) && nodes.insert(t.object.clone()) {
                queue.push_back(t.object.clone());
            }
            triples.push(t);
        }
    }
    let mut dangling = Vec::new();
    for n in &nodes {
        for t in graph.triples_matching(None, None, Some(n)) {
            if !nodes.contains(&t.subject) {
                dangling.push(t);
            }
        }
    }
    (triples, dangling)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeleteReport {
    pub revision: u64,
    pub removed: usize,
    /// Triples outside the extruder that referenced it; removed as well.
    pub dangling: Vec<String>,
}

pub fn delete_extruder(store: &Store, extruder: &str) -> Result<DeleteReport, AnnotationError> {
    let (revision, (removed, dangling)) = store.update(|g| {
        if !extruder_exists(g, extruder) {
            return Err(AnnotationError::UnknownExtruder(extruder.to_owned()));
        }
        let (mut owned, dangling) = owned_triples(g, extruder);
        for t in &dangling {
            log::warn!("deleting dangling reference {t}");
        }
        let report: Vec<String> = dangling.iter().map(Triple::to_string).collect();
        owned.extend(dangling);
        let removed = owned.len();
        Ok((Batch::remove(owned), (removed, report)))
    })?;
    Ok(DeleteReport {
        revision,
        removed,
        dangling,
    })
}

/// Rewrites only the visibility triple.
pub fn set_visible(
    store: &Store,
    extruder: &str,
    visible: bool,
    visible_property: &str,
) -> Result<u64, AnnotationError> {
    let (revision, ()) = store.update(|g| {
        if !extruder_exists(g, extruder) {
            return Err(AnnotationError::UnknownExtruder(extruder.to_owned()));
        }
        let e = iri(extruder);
        let old: Vec<Triple> = g
            .triples_matching(Some(&e), Some(&iri(visible_property)), None)
            .filter(|t| t.object != Term::boolean(visible))
            .collect();
        let insert = vec![Triple::new(e, iri(visible_property), Literal::boolean(visible))];
        Ok((Batch { remove: old, insert }, ()))
    })?;
    Ok(revision)
}

/// Component classes of `instance` that are known to the ontology, most
/// specific first (a class is dropped if another asserted type is below
/// it).
pub fn most_specific_types(ontology: &Ontology, instance: &Term) -> Vec<String> {
    let types = ontology.types_of(instance);
    types
        .iter()
        .filter(|t| {
            !types.iter().any(|other| {
                other != *t
                    && ontology
                        .subclass_closure(other, Direction::Up)
                        .is_ok_and(|up| up.contains(t))
            })
        })
        .cloned()
        .collect()
}
