//! CAD platform fixture: `GET /documents`, `GET /documents/{id}/elements`,
//! `GET /export/{doc}/{elem}?format=..`.

use std::collections::BTreeMap;
use std::io;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::{DateTime, Duration, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::FixtureServer;

/// Bearer token accepted by [`CadFixture::demo`].
pub const DEMO_TOKEN: &str = "fixture-token";

const CUBE_GLTF: &[u8] = include_bytes!("../data/cube.gltf");
const CUBE_OBJ: &str = "\
o cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 2 3 4
f 5 8 7 6
f 1 5 6 2
f 2 6 7 3
f 3 7 8 4
f 4 8 5 1
";

#[derive(Debug, Clone)]
struct Element {
    id: String,
    name: String,
    kind: String,
    modified_at: DateTime<Utc>,
    /// Export bytes keyed by format extension.
    formats: BTreeMap<String, Vec<u8>>,
}

#[derive(Debug, Clone)]
struct Document {
    id: String,
    name: String,
    elements: Vec<Element>,
}

impl Document {
    fn modified_at(&self) -> DateTime<Utc> {
        self.elements.iter().map(|e| e.modified_at).max().unwrap_or_else(epoch)
    }
}

#[derive(Debug, Default)]
struct CadState {
    token: Option<String>,
    documents: Vec<Document>,
    corrupt_next: usize,
    exports: usize,
}

fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

/// Shared, mutable CAD inventory.
#[derive(Debug, Clone, Default)]
pub struct CadFixture {
    state: Arc<Mutex<CadState>>,
}

#[derive(Serialize)]
struct DocumentJson<'a> {
    id: &'a str,
    name: &'a str,
    modified_at: DateTime<Utc>,
}

#[derive(Serialize)]
struct ElementJson<'a> {
    id: &'a str,
    name: &'a str,
    kind: &'a str,
    modified_at: DateTime<Utc>,
}

#[derive(Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

impl CadFixture {
    /// No documents; `token` is required when set.
    pub fn empty(token: Option<&str>) -> Self {
        let f = CadFixture::default();
        f.lock().token = token.map(str::to_owned);
        f
    }

    /// Two documents: `urola-e01` (hopper and motor) and `urola-e02` (head).
    /// Every element offers glTF; the hopper also offers OBJ; nothing offers
    /// STL.
    pub fn demo() -> Self {
        let f = Self::empty(Some(DEMO_TOKEN));
        let gltf = |extra: &[(&str, &[u8])]| {
            let mut m: BTreeMap<String, Vec<u8>> = BTreeMap::from([("gltf".to_owned(), CUBE_GLTF.to_vec())]);
            m.extend(extra.iter().map(|(k, v)| ((*k).to_owned(), v.to_vec())));
            m
        };
        f.add_element(
            "urola-e01",
            "Blowmatic 1300 assembly",
            "hopper",
            "Feed hopper",
            gltf(&[("obj", CUBE_OBJ.as_bytes())]),
        );
        f.add_element(
            "urola-e01",
            "Blowmatic 1300 assembly",
            "motor",
            "Drive motor",
            gltf(&[]),
        );
        f.add_element(
            "urola-e02",
            "Profiler 1000 assembly",
            "head",
            "Extrusion head",
            gltf(&[]),
        );
        f
    }

    fn lock(&self) -> MutexGuard<'_, CadState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn add_element(&self, doc: &str, doc_name: &str, elem: &str, name: &str, formats: BTreeMap<String, Vec<u8>>) {
        let mut s = self.lock();
        let element = Element {
            id: elem.to_owned(),
            name: name.to_owned(),
            kind: "PARTSTUDIO".to_owned(),
            modified_at: epoch(),
            formats,
        };
        match s.documents.iter_mut().find(|d| d.id == doc) {
            Some(d) => {
                d.elements.retain(|e| e.id != elem);
                d.elements.push(element);
            }
            None => s.documents.push(Document {
                id: doc.to_owned(),
                name: doc_name.to_owned(),
                elements: vec![element],
            }),
        }
    }

    fn with_element<R>(&self, doc: &str, elem: &str, f: impl FnOnce(&mut Element) -> R) -> Option<R> {
        let mut s = self.lock();
        let d = s.documents.iter_mut().find(|d| d.id == doc)?;
        d.elements.iter_mut().find(|e| e.id == elem).map(f)
    }

    /// Advances an element's modification time by one minute and returns it.
    pub fn touch(&self, doc: &str, elem: &str) -> Option<DateTime<Utc>> {
        self.with_element(doc, elem, |e| {
            e.modified_at += Duration::minutes(1);
            e.modified_at
        })
    }

    /// Replaces an element's export in one format and touches it.
    pub fn set_model(&self, doc: &str, elem: &str, format: &str, bytes: &[u8]) -> Option<DateTime<Utc>> {
        self.with_element(doc, elem, |e| {
            e.formats.insert(format.to_owned(), bytes.to_vec());
            e.modified_at += Duration::minutes(1);
            e.modified_at
        })
    }

    pub fn remove_element(&self, doc: &str, elem: &str) {
        let mut s = self.lock();
        for d in &mut s.documents {
            if d.id == doc {
                d.elements.retain(|e| e.id != elem);
            }
        }
    }

    pub fn modified_at(&self, doc: &str, elem: &str) -> Option<DateTime<Utc>> {
        self.with_element(doc, elem, |e| e.modified_at)
    }

    /// The next `n` exports announce a wrong checksum.
    pub fn corrupt_next(&self, n: usize) {
        self.lock().corrupt_next = n;
    }

    pub fn export_count(&self) -> usize {
        self.lock().exports
    }

    pub fn router(&self) -> Router {
        Router::new()
            .route("/documents", get(list_documents))
            .route("/documents/{id}/elements", get(list_elements))
            .route("/export/{doc}/{elem}", get(export))
            .with_state(self.clone())
    }

    pub fn serve(&self) -> io::Result<FixtureServer> {
        FixtureServer::start(self.router())
    }

    fn authorized(&self, headers: &HeaderMap) -> bool {
        let Some(token) = self.lock().token.clone() else {
            return true;
        };
        headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            == Some(token.as_str())
    }
}

fn status(code: StatusCode, message: &str) -> Response {
    (code, Json(serde_json::json!({ "error": message }))).into_response()
}

async fn list_documents(State(f): State<CadFixture>, headers: HeaderMap) -> Response {
    if !f.authorized(&headers) {
        return status(StatusCode::UNAUTHORIZED, "missing or wrong token");
    }
    let s = f.lock();
    let docs: Vec<_> = s
        .documents
        .iter()
        .map(|d| DocumentJson {
            id: &d.id,
            name: &d.name,
            modified_at: d.modified_at(),
        })
        .collect();
    Json(docs).into_response()
}

async fn list_elements(State(f): State<CadFixture>, Path(id): Path<String>, headers: HeaderMap) -> Response {
    if !f.authorized(&headers) {
        return status(StatusCode::UNAUTHORIZED, "missing or wrong token");
    }
    let s = f.lock();
    let Some(doc) = s.documents.iter().find(|d| d.id == id) else {
        return status(StatusCode::NOT_FOUND, "no such document");
    };
    let elements: Vec<_> = doc
        .elements
        .iter()
        .map(|e| ElementJson {
            id: &e.id,
            name: &e.name,
            kind: &e.kind,
            modified_at: e.modified_at,
        })
        .collect();
    Json(elements).into_response()
}

async fn export(
    State(f): State<CadFixture>,
    Path((doc, elem)): Path<(String, String)>,
    Query(q): Query<ExportQuery>,
    headers: HeaderMap,
) -> Response {
    if !f.authorized(&headers) {
        return status(StatusCode::UNAUTHORIZED, "missing or wrong token");
    }
    let format = q.format.unwrap_or_else(|| "gltf".to_owned());
    if !matches!(format.as_str(), "gltf" | "obj" | "stl" | "x3d") {
        return status(StatusCode::BAD_REQUEST, "unknown format");
    }
    let mut s = f.lock();
    s.exports += 1;
    let found = s
        .documents
        .iter()
        .find(|d| d.id == doc)
        .and_then(|d| d.elements.iter().find(|e| e.id == elem))
        .map(|e| e.formats.get(&format).cloned());
    let bytes = match found {
        None => return status(StatusCode::NOT_FOUND, "no such element"),
        Some(None) => return status(StatusCode::UNSUPPORTED_MEDIA_TYPE, "format not offered"),
        Some(Some(b)) => b,
    };
    let digest = if s.corrupt_next > 0 {
        s.corrupt_next -= 1;
        "0".repeat(64)
    } else {
        hex::encode(Sha256::digest(&bytes))
    };
    let content_type = match format.as_str() {
        "gltf" => "model/gltf+json",
        _ => "application/octet-stream",
    };
    (
        [
            (header::CONTENT_TYPE, content_type.to_owned()),
            (header::HeaderName::from_static("x-content-sha256"), digest),
        ],
        bytes,
    )
        .into_response()
}
