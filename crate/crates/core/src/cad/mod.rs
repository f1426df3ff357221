//! CAD platform export and model synchronization.
//!
//! Models are exported into the asset store and described in the graph by
//! [`crate::annotation::build_cad_triples`]. Each model node records its
//! source document/element and the platform timestamp it was exported at,
//! which is the last-sync marker the sync compares against.

mod http;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use http::HttpCadClient;

use crate::annotation::{parse_timestamp, replace_cad_model, AnnotationError, CadModelRef, ModelFormat, Point};
use crate::assets::{sha256_hex, AssetError, AssetStore};
use crate::rdf::vocab::app;
use crate::rdf::{iri, Graph, Store};

#[derive(Debug, thiserror::Error)]
pub enum CadError {
    #[error("CAD platform rejected the credentials")]
    Auth,
    #[error("CAD platform unreachable: {0}")]
    Network(String),
    #[error("not found on the CAD platform: {0}")]
    NotFound(String),
    #[error("format {0} is not offered for this element")]
    UnsupportedFormat(String),
    #[error("download corrupted: expected sha256 {expected}, got {actual}")]
    Corrupt { expected: String, actual: String },
    #[error("CAD platform protocol error: {0}")]
    Protocol(String),
    #[error("sync in progress")]
    InProgress,
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CadElement {
    pub id: String,
    pub name: String,
    pub kind: String,
    pub modified_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CadDocument {
    pub id: String,
    pub name: String,
    pub modified_at: DateTime<Utc>,
    pub elements: Vec<CadElement>,
}

impl CadDocument {
    pub fn element(&self, id: &str) -> Option<&CadElement> {
        self.elements.iter().find(|e| e.id == id)
    }
}

/// Downloaded model bytes and the checksum the platform announced, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedBytes {
    pub bytes: Vec<u8>,
    pub announced_sha256: Option<String>,
}

pub trait CadClient: Send + Sync {
    /// Documents with their elements.
    fn list_documents(&self) -> Result<Vec<CadDocument>, CadError>;
    fn export(&self, document: &str, element: &str, format: ModelFormat) -> Result<ExportedBytes, CadError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportResult {
    pub path: String,
    pub checksum: String,
    /// The asset on disk already had this content.
    pub cached: bool,
}

fn download(client: &dyn CadClient, document: &str, element: &str, format: ModelFormat) -> Result<Vec<u8>, CadError> {
    let mut last = None;
    for attempt in 0..2 {
        let got = client.export(document, element, format)?;
        let actual = sha256_hex(&got.bytes);
        match got.announced_sha256 {
            Some(expected) if !expected.eq_ignore_ascii_case(&actual) => {
                log::warn!("{document}/{element}: checksum mismatch on attempt {}", attempt + 1);
                last = Some(CadError::Corrupt { expected, actual });
            }
            _ => return Ok(got.bytes),
        }
    }
    Err(last.expect("two failed attempts"))
}

/// Downloads an element into `assets/{doc}/{elem}.{ext}`. Unchanged content
/// is left untouched.
pub fn export_model(
    client: &dyn CadClient,
    assets: &AssetStore,
    document: &str,
    element: &str,
    format: ModelFormat,
) -> Result<ExportResult, CadError> {
    let path = AssetStore::relative_path(document, element, format.extension())?;
    let bytes = download(client, document, element, format)?;
    let checksum = sha256_hex(&bytes);
    let cached = assets.exists(&path) && assets.actual_checksum(&path).is_ok_and(|c| c == checksum);
    if !cached {
        assets.write(&path, &bytes)?;
    }
    Ok(ExportResult { path, checksum, cached })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportRequest {
    pub component: String,
    pub document: String,
    pub element: String,
    #[serde(default = "default_format")]
    pub format: ModelFormat,
    #[serde(default = "origin")]
    pub position: Point,
}

fn default_format() -> ModelFormat {
    ModelFormat::Gltf
}

fn origin() -> Point {
    Point { x: 0.0, y: 0.0, z: 0.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportOutcome {
    pub revision: u64,
    pub model: CadModelRef,
    pub cached: bool,
}

/// Exports an element and attaches it to a component.
pub fn import_model(
    client: &dyn CadClient,
    assets: &AssetStore,
    store: &Store,
    req: &ImportRequest,
) -> Result<ImportOutcome, CadError> {
    let docs = client.list_documents()?;
    let element = docs
        .iter()
        .find(|d| d.id == req.document)
        .and_then(|d| d.element(&req.element))
        .ok_or_else(|| CadError::NotFound(format!("{}/{}", req.document, req.element)))?;
    let exported = export_model(client, assets, &req.document, &req.element, req.format)?;
    let model = CadModelRef {
        document: req.document.clone(),
        element: req.element.clone(),
        path: exported.path,
        format: req.format,
        position: req.position,
        checksum: exported.checksum,
        modified_at: Some(element.modified_at),
    };
    let revision = replace_cad_model(store, &req.component, &model, assets)?;
    Ok(ImportOutcome {
        revision,
        model,
        cached: exported.cached,
    })
}

/// A model node in the graph that came from the CAD platform.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedModel {
    pub component: String,
    pub model: CadModelRef,
}

/// Every component model that names its source document and element.
pub fn tracked_models(graph: &Graph) -> Vec<TrackedModel> {
    let mut out = Vec::new();
    for link in graph.triples_matching(None, Some(&iri(app::HAS_MODEL)), None) {
        let (Some(component), m) = (link.subject.as_iri(), &link.object) else {
            continue;
        };
        let text = |p: &str| graph.object(m, p).map(|t| t.value_str().to_owned());
        let (Some(document), Some(element), Some(path), Some(format), Some(checksum)) = (
            text(app::SOURCE_DOCUMENT),
            text(app::SOURCE_ELEMENT),
            text(app::FILE_PATH),
            text(app::FORMAT),
            text(app::CHECKSUM),
        ) else {
            continue;
        };
        let Ok(format) = format.parse::<ModelFormat>() else {
            continue;
        };
        let point = graph.object(m, app::HAS_POSITION);
        let coord = |p: &str| {
            point
                .as_ref()
                .and_then(|pt| graph.object(pt, p))
                .and_then(|t| t.as_f64())
                .unwrap_or(0.0)
        };
        out.push(TrackedModel {
            component: component.to_owned(),
            model: CadModelRef {
                document,
                element,
                path,
                format,
                position: Point {
                    x: coord(app::X),
                    y: coord(app::Y),
                    z: coord(app::Z),
                },
                checksum,
                modified_at: graph
                    .object(m, app::SOURCE_MODIFIED_AT)
                    .as_ref()
                    .and_then(parse_timestamp),
            },
        });
    }
    out.sort_by(|a, b| a.component.cmp(&b.component));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SyncMode {
    Manual,
    Scheduled { interval_secs: u64 },
    OnView,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncPolicy {
    #[serde(flatten)]
    pub mode: SyncMode,
    /// On-view syncs run only when the last sync is older than this.
    #[serde(default = "default_staleness")]
    pub staleness_secs: u64,
}

fn default_staleness() -> u64 {
    300
}

impl Default for SyncPolicy {
    fn default() -> Self {
        SyncPolicy {
            mode: SyncMode::Manual,
            staleness_secs: default_staleness(),
        }
    }
}

impl SyncPolicy {
    pub fn validate(&self) -> Result<(), String> {
        match self.mode {
            SyncMode::Scheduled { interval_secs: 0 } => Err("scheduled sync interval must be > 0".into()),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyncStatus {
    Updated,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementOutcome {
    pub component: String,
    pub document: String,
    pub element: String,
    pub status: SyncStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncReport {
    pub updated: usize,
    pub skipped: usize,
    pub failed: usize,
    pub elements: Vec<ElementOutcome>,
}

impl SyncReport {
    fn push(&mut self, tracked: &TrackedModel, status: SyncStatus, error: Option<String>) {
        match status {
            SyncStatus::Updated => self.updated += 1,
            SyncStatus::Skipped => self.skipped += 1,
            SyncStatus::Failed => self.failed += 1,
        }
        self.elements.push(ElementOutcome {
            component: tracked.component.clone(),
            document: tracked.model.document.clone(),
            element: tracked.model.element.clone(),
            status,
            error,
        });
    }
}

/// Runs syncs one at a time; an overlapping call gets
/// [`CadError::InProgress`].
pub struct CadSync {
    client: Arc<dyn CadClient>,
    assets: AssetStore,
    policy: SyncPolicy,
    running: AtomicBool,
    last_run: Mutex<Option<Instant>>,
}

struct RunGuard<'a>(&'a AtomicBool);

impl Drop for RunGuard<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}

impl CadSync {
    pub fn new(client: Arc<dyn CadClient>, assets: AssetStore, policy: SyncPolicy) -> Self {
        CadSync {
            client,
            assets,
            policy,
            running: AtomicBool::new(false),
            last_run: Mutex::new(None),
        }
    }

    pub fn client(&self) -> &dyn CadClient {
        self.client.as_ref()
    }

    pub fn assets(&self) -> &AssetStore {
        &self.assets
    }

    pub fn policy(&self) -> SyncPolicy {
        self.policy
    }

    pub fn is_running(&self) -> bool {
        self.running.load(Ordering::Acquire)
    }

    fn acquire(&self) -> Result<RunGuard<'_>, CadError> {
        self.running
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .map_err(|_| CadError::InProgress)?;
        Ok(RunGuard(&self.running))
    }

    pub fn import(&self, store: &Store, req: &ImportRequest) -> Result<ImportOutcome, CadError> {
        let _guard = self.acquire()?;
        import_model(self.client.as_ref(), &self.assets, store, req)
    }

    /// Re-exports every tracked model whose element changed on the platform
    /// after its recorded export time.
    pub fn sync(&self, store: &Store) -> Result<SyncReport, CadError> {
        let _guard = self.acquire()?;
        let report = self.sync_tracked(store, tracked_models(&store.snapshot()));
        *self.last_run.lock().expect("sync clock") = Some(Instant::now());
        Ok(report)
    }

    /// On-view trigger: syncs the given component's models when the policy
    /// is on-view and the last sync is stale. Returns `None` when skipped.
    pub fn sync_on_view(&self, store: &Store, component: Option<&str>) -> Option<SyncReport> {
        if self.policy.mode != SyncMode::OnView {
            return None;
        }
        let stale = self
            .last_run
            .lock()
            .expect("sync clock")
            .is_none_or(|t| t.elapsed() >= Duration::from_secs(self.policy.staleness_secs));
        if !stale {
            return None;
        }
        let _guard = self.acquire().ok()?;
        let tracked = tracked_models(&store.snapshot())
            .into_iter()
            .filter(|t| component.is_none_or(|c| t.component == c))
            .collect();
        let report = self.sync_tracked(store, tracked);
        *self.last_run.lock().expect("sync clock") = Some(Instant::now());
        Some(report)
    }

    fn sync_tracked(&self, store: &Store, tracked: Vec<TrackedModel>) -> SyncReport {
        let mut report = SyncReport::default();
        let docs = match self.client.list_documents() {
            Ok(d) => d,
            Err(e) => {
                let msg = e.to_string();
                for t in &tracked {
                    report.push(t, SyncStatus::Failed, Some(msg.clone()));
                }
                return report;
            }
        };
        for t in &tracked {
            let element = docs
                .iter()
                .find(|d| d.id == t.model.document)
                .and_then(|d| d.element(&t.model.element));
            let Some(element) = element else {
                report.push(t, SyncStatus::Failed, Some("element no longer on the platform".into()));
                continue;
            };
            let stale = t.model.modified_at.is_none_or(|last| element.modified_at > last);
            // A missing or altered asset is repaired even when the platform
            // did not change.
            let intact = self.assets.verify(&t.model.path, &t.model.checksum).is_ok();
            if !stale && intact {
                report.push(t, SyncStatus::Skipped, None);
                continue;
            }
            match self.refresh(store, t, element.modified_at) {
                Ok(()) => report.push(t, SyncStatus::Updated, None),
                Err(e) => {
                    log::warn!("sync of {}/{} failed: {e}", t.model.document, t.model.element);
                    report.push(t, SyncStatus::Failed, Some(e.to_string()));
                }
            }
        }
        report
    }

    fn refresh(&self, store: &Store, t: &TrackedModel, modified_at: DateTime<Utc>) -> Result<(), CadError> {
        let exported = export_model(
            self.client.as_ref(),
            &self.assets,
            &t.model.document,
            &t.model.element,
            t.model.format,
        )?;
        let model = CadModelRef {
            path: exported.path,
            checksum: exported.checksum,
            modified_at: Some(modified_at),
            ..t.model.clone()
        };
        replace_cad_model(store, &t.component, &model, &self.assets)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests;
