//! 3D model metadata triples.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::AnnotationError;
use crate::assets::AssetStore;
use crate::rdf::vocab::{app, rdf, xsd};
use crate::rdf::{iri, Batch, Graph, Literal, Store, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFormat {
    Gltf,
    Obj,
    Stl,
    X3d,
}

impl ModelFormat {
    pub const ALL: [ModelFormat; 4] = [ModelFormat::Gltf, ModelFormat::Obj, ModelFormat::Stl, ModelFormat::X3d];

    pub fn extension(self) -> &'static str {
        match self {
            ModelFormat::Gltf => "gltf",
            ModelFormat::Obj => "obj",
            ModelFormat::Stl => "stl",
            ModelFormat::X3d => "x3d",
        }
    }

    /// Only glTF is served to the browser viewer.
    pub fn viewable(self) -> bool {
        self == ModelFormat::Gltf
    }
}

impl fmt::Display for ModelFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for ModelFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelFormat::ALL
            .into_iter()
            .find(|f| f.extension().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unsupported model format '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CadModelRef {
    pub document: String,
    pub element: String,
    /// Relative to the asset directory.
    pub path: String,
    pub format: ModelFormat,
    pub position: Point,
    pub checksum: String,
    /// Platform modification time of the exported element.
    #[serde(default)]
    pub modified_at: Option<DateTime<Utc>>,
}

pub fn model_iri(component: &str) -> String {
    format!("{component}.model")
}

/// Checks the asset on disk, then describes it: path, format, checksum,
/// source element and the position point.
pub fn build_cad_triples(
    component: &Term,
    cad: &CadModelRef,
    assets: &AssetStore,
) -> Result<Vec<Triple>, AnnotationError> {
    assets.verify(&cad.path, &cad.checksum)?;
    let Some(c_iri) = component.as_iri() else {
        return Err(AnnotationError::UnknownComponent(component.to_string()));
    };
    let m_iri = model_iri(c_iri);
    let m = iri(&m_iri);
    let p = iri(format!("{m_iri}.position"));
    let mut out = vec![
        Triple::new(component.clone(), iri(app::HAS_MODEL), m.clone()),
        Triple::new(m.clone(), iri(rdf::TYPE), iri(app::CAD_MODEL)),
        Triple::new(m.clone(), iri(app::FILE_PATH), Literal::string(&cad.path)),
        Triple::new(m.clone(), iri(app::FORMAT), Literal::string(cad.format.extension())),
        Triple::new(
            m.clone(),
            iri(app::CHECKSUM),
            Literal::string(cad.checksum.to_ascii_lowercase()),
        ),
        Triple::new(m.clone(), iri(app::SOURCE_DOCUMENT), Literal::string(&cad.document)),
        Triple::new(m.clone(), iri(app::SOURCE_ELEMENT), Literal::string(&cad.element)),
        Triple::new(m.clone(), iri(app::HAS_POSITION), p.clone()),
        Triple::new(p.clone(), iri(rdf::TYPE), iri(app::POINT)),
        Triple::new(p.clone(), iri(app::X), Literal::double(cad.position.x)),
        Triple::new(p.clone(), iri(app::Y), Literal::double(cad.position.y)),
        Triple::new(p, iri(app::Z), Literal::double(cad.position.z)),
    ];
    if let Some(at) = cad.modified_at {
        out.push(Triple::new(
            m,
            iri(app::SOURCE_MODIFIED_AT),
            Literal::typed(at.to_rfc3339_opts(SecondsFormat::Millis, true), xsd::DATE_TIME),
        ));
    }
    Ok(out)
}

/// The component's current model triples (link, model node, point).
pub fn model_triples(graph: &Graph, component: &str) -> Vec<Triple> {
    let c = iri(component);
    let mut out = Vec::new();
    for link in graph.triples_matching(Some(&c), Some(&iri(app::HAS_MODEL)), None) {
        let model = link.object.clone();
        out.push(link);
        for t in graph.triples_matching(Some(&model), None, None) {
            if t.predicate.as_iri() == Some(app::HAS_POSITION) {
                out.extend(graph.triples_matching(Some(&t.object), None, None));
            }
            out.push(t);
        }
    }
    out
}

/// Replaces a component's model description in one batch. An unchanged
/// model leaves the revision alone.
pub fn replace_cad_model(
    store: &Store,
    component: &str,
    cad: &CadModelRef,
    assets: &AssetStore,
) -> Result<u64, AnnotationError> {
    let new = build_cad_triples(&iri(component), cad, assets)?;
    let (revision, ()) = store.update(|g| {
        if g.object(&iri(component), rdf::TYPE).is_none() {
            return Err(AnnotationError::UnknownComponent(component.to_owned()));
        }
        let old = model_triples(g, component);
        let new_set: BTreeSet<&Triple> = new.iter().collect();
        let old_set: BTreeSet<&Triple> = old.iter().collect();
        Ok((
            Batch {
                remove: old_set.difference(&new_set).map(|t| (*t).clone()).collect(),
                insert: new_set.difference(&old_set).map(|t| (*t).clone()).collect(),
            },
            (),
        ))
    })?;
    Ok(revision)
}

/// Parses an `app:sourceModifiedAt` literal.
pub(crate) fn parse_timestamp(term: &Term) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(term.as_literal()?.lexical())
        .ok()
        .map(|d| d.with_timezone(&Utc))
}
