use std::collections::BTreeMap;
use std::sync::atomic::AtomicUsize;

use chrono::TimeZone;

use super::*;
use crate::annotation::component_iri;
use crate::catalogue::tests::demo;
use crate::seed::{DEMO_CAD_DOCUMENT, DEMO_CAD_ELEMENT, DEMO_CUBE_GLTF};

fn at(secs: i64) -> DateTime<Utc> {
    Utc.timestamp_opt(1_700_000_000 + secs, 0).unwrap()
}

#[derive(Default)]
struct FakeState {
    elements: BTreeMap<(String, String), (DateTime<Utc>, Vec<u8>)>,
    down: bool,
    corrupt_next: usize,
}

#[derive(Default)]
struct FakeCad {
    state: Mutex<FakeState>,
    exports: AtomicUsize,
}

impl FakeCad {
    fn with_demo() -> Self {
        let fake = FakeCad::default();
        fake.put(DEMO_CAD_DOCUMENT, DEMO_CAD_ELEMENT, at(0), DEMO_CUBE_GLTF);
        fake.put(DEMO_CAD_DOCUMENT, "motor", at(0), b"motor v1");
        fake
    }

    fn put(&self, doc: &str, elem: &str, modified: DateTime<Utc>, bytes: &[u8]) {
        let mut s = self.state.lock().unwrap();
        s.elements.insert((doc.into(), elem.into()), (modified, bytes.to_vec()));
    }

    fn touch(&self, doc: &str, elem: &str, modified: DateTime<Utc>) {
        let mut s = self.state.lock().unwrap();
        s.elements.get_mut(&(doc.into(), elem.into())).unwrap().0 = modified;
    }

    fn exports(&self) -> usize {
        self.exports.load(Ordering::SeqCst)
    }
}

impl CadClient for FakeCad {
    fn list_documents(&self) -> Result<Vec<CadDocument>, CadError> {
        let s = self.state.lock().unwrap();
        if s.down {
            return Err(CadError::Network("connection refused".into()));
        }
        let mut docs: BTreeMap<&str, CadDocument> = BTreeMap::new();
        for ((d, e), (m, _)) in &s.elements {
            let doc = docs.entry(d).or_insert_with(|| CadDocument {
                id: d.clone(),
                name: d.clone(),
                modified_at: *m,
                elements: vec![],
            });
            doc.modified_at = doc.modified_at.max(*m);
            doc.elements.push(CadElement {
                id: e.clone(),
                name: e.clone(),
                kind: "PARTSTUDIO".into(),
                modified_at: *m,
            });
        }
        Ok(docs.into_values().collect())
    }

    fn export(&self, document: &str, element: &str, format: ModelFormat) -> Result<ExportedBytes, CadError> {
        self.exports.fetch_add(1, Ordering::SeqCst);
        let mut s = self.state.lock().unwrap();
        if s.down {
            return Err(CadError::Network("connection refused".into()));
        }
        if format == ModelFormat::Stl {
            return Err(CadError::UnsupportedFormat(format.to_string()));
        }
        let (_, bytes) = s
            .elements
            .get(&(document.into(), element.into()))
            .cloned()
            .ok_or_else(|| CadError::NotFound(format!("{document}/{element}")))?;
        let announced = if s.corrupt_next > 0 {
            s.corrupt_next -= 1;
            "0".repeat(64)
        } else {
            sha256_hex(&bytes)
        };
        Ok(ExportedBytes {
            bytes,
            announced_sha256: Some(announced),
        })
    }
}

fn sync_for(fake: &Arc<FakeCad>, assets: &AssetStore) -> CadSync {
    CadSync::new(fake.clone(), assets.clone(), SyncPolicy::default())
}

#[test]
fn export_writes_once_then_reports_cached() {
    let dir = tempfile::tempdir().unwrap();
    let assets = AssetStore::new(dir.path());
    let fake = FakeCad::with_demo();
    let first = export_model(&fake, &assets, DEMO_CAD_DOCUMENT, "motor", ModelFormat::Gltf).unwrap();
    assert!(!first.cached);
    assert_eq!(first.path, "urola-e01/motor.gltf");
    assert_eq!(assets.read(&first.path).unwrap(), b"motor v1");
    let second = export_model(&fake, &assets, DEMO_CAD_DOCUMENT, "motor", ModelFormat::Gltf).unwrap();
    assert!(second.cached);
    assert_eq!(second.checksum, first.checksum);
}

#[test]
fn unsupported_format_and_missing_element() {
    let dir = tempfile::tempdir().unwrap();
    let assets = AssetStore::new(dir.path());
    let fake = FakeCad::with_demo();
    assert!(matches!(
        export_model(&fake, &assets, DEMO_CAD_DOCUMENT, "motor", ModelFormat::Stl),
        Err(CadError::UnsupportedFormat(_))
    ));
    assert!(matches!(
        export_model(&fake, &assets, DEMO_CAD_DOCUMENT, "nope", ModelFormat::Gltf),
        Err(CadError::NotFound(_))
    ));
    assert!(!assets.exists("urola-e01/motor.stl"));
}

#[test]
fn corrupt_download_is_retried_once() {
    let dir = tempfile::tempdir().unwrap();
    let assets = AssetStore::new(dir.path());
    let fake = FakeCad::with_demo();
    fake.state.lock().unwrap().corrupt_next = 1;
    assert!(export_model(&fake, &assets, DEMO_CAD_DOCUMENT, "motor", ModelFormat::Gltf).is_ok());
    assert_eq!(fake.exports(), 2);

    fake.state.lock().unwrap().corrupt_next = 2;
    let err = export_model(&fake, &assets, DEMO_CAD_DOCUMENT, "motor", ModelFormat::Obj).unwrap_err();
    assert!(matches!(err, CadError::Corrupt { .. }), "{err}");
    assert_eq!(fake.exports(), 4);
    assert!(!assets.exists("urola-e01/motor.obj"));
}

#[test]
fn import_attaches_model_to_component() {
    let (store, dir) = demo();
    let assets = AssetStore::new(dir.path());
    let fake = Arc::new(FakeCad::with_demo());
    let sync = sync_for(&fake, &assets);
    let motor = component_iri("E01", "M1");
    let req = ImportRequest {
        component: motor.clone(),
        document: DEMO_CAD_DOCUMENT.into(),
        element: "motor".into(),
        format: ModelFormat::Gltf,
        position: Point { x: 1.0, y: 2.0, z: 3.0 },
    };
    let out = sync.import(&store, &req).unwrap();
    assert_eq!(out.model.modified_at, Some(at(0)));
    let tracked = tracked_models(&store.snapshot());
    let m = tracked.iter().find(|t| t.component == motor).unwrap();
    assert_eq!(m.model, out.model);

    // Same import again changes nothing.
    let again = sync.import(&store, &req).unwrap();
    assert!(again.cached);
    assert_eq!(again.revision, out.revision);

    let missing = ImportRequest {
        element: "ghost".into(),
        ..req.clone()
    };
    assert!(matches!(sync.import(&store, &missing), Err(CadError::NotFound(_))));
    let not_a_component = ImportRequest {
        component: "http://x/none".into(),
        ..req
    };
    assert!(matches!(
        sync.import(&store, &not_a_component),
        Err(CadError::Annotation(_))
    ));
}

#[test]
fn sync_is_idempotent_and_picks_up_changes() {
    let (store, dir) = demo();
    let assets = AssetStore::new(dir.path());
    let fake = Arc::new(FakeCad::with_demo());
    let sync = sync_for(&fake, &assets);
    let hopper = component_iri("E01", "H1");
    assert_eq!(tracked_models(&store.snapshot()).len(), 1);

    // The seeded model carries no platform timestamp yet.
    let first = sync.sync(&store).unwrap();
    assert_eq!((first.updated, first.skipped, first.failed), (1, 0, 0));
    let revision = store.revision();

    let second = sync.sync(&store).unwrap();
    assert_eq!((second.updated, second.skipped, second.failed), (0, 1, 0));
    assert_eq!(store.revision(), revision);

    fake.put(DEMO_CAD_DOCUMENT, DEMO_CAD_ELEMENT, at(60), b"hopper v2");
    let third = sync.sync(&store).unwrap();
    assert_eq!(third.updated, 1);
    let m = &tracked_models(&store.snapshot())[0];
    assert_eq!(m.component, hopper);
    assert_eq!(m.model.modified_at, Some(at(60)));
    assert_eq!(m.model.checksum, sha256_hex(b"hopper v2"));
    assert_eq!(
        m.model.position,
        Point {
            x: 0.0,
            y: 0.0,
            z: -1.0
        }
    );

    // A newer timestamp with identical bytes still counts as an update but
    // only the recorded timestamp moves.
    fake.touch(DEMO_CAD_DOCUMENT, DEMO_CAD_ELEMENT, at(120));
    assert_eq!(sync.sync(&store).unwrap().updated, 1);
    assert_eq!(sync.sync(&store).unwrap().updated, 0);
}

#[test]
fn broken_asset_is_repaired() {
    let (store, dir) = demo();
    let assets = AssetStore::new(dir.path());
    let fake = Arc::new(FakeCad::with_demo());
    let sync = sync_for(&fake, &assets);
    sync.sync(&store).unwrap();
    let path = tracked_models(&store.snapshot())[0].model.path.clone();
    std::fs::write(dir.path().join(&path), b"tampered").unwrap();
    let report = sync.sync(&store).unwrap();
    assert_eq!(report.updated, 1);
    assert_eq!(assets.read(&path).unwrap(), DEMO_CUBE_GLTF);
}

#[test]
fn network_failure_leaves_store_untouched() {
    let (store, dir) = demo();
    let assets = AssetStore::new(dir.path());
    let fake = Arc::new(FakeCad::with_demo());
    fake.state.lock().unwrap().down = true;
    let sync = sync_for(&fake, &assets);
    let revision = store.revision();
    let report = sync.sync(&store).unwrap();
    assert_eq!((report.updated, report.failed), (0, 1));
    assert!(report.elements[0].error.as_deref().unwrap().contains("unreachable"));
    assert_eq!(store.revision(), revision);
    assert!(!sync.is_running());
}

#[test]
fn failures_are_isolated_per_element() {
    let (store, dir) = demo();
    let assets = AssetStore::new(dir.path());
    let fake = Arc::new(FakeCad::with_demo());
    let sync = sync_for(&fake, &assets);
    let req = ImportRequest {
        component: component_iri("E01", "M1"),
        document: DEMO_CAD_DOCUMENT.into(),
        element: "motor".into(),
        format: ModelFormat::Gltf,
        position: origin(),
    };
    sync.import(&store, &req).unwrap();
    fake.state
        .lock()
        .unwrap()
        .elements
        .remove(&(DEMO_CAD_DOCUMENT.to_string(), "motor".to_string()));
    let report = sync.sync(&store).unwrap();
    assert_eq!((report.updated, report.failed), (1, 1));
    let failed = report.elements.iter().find(|e| e.status == SyncStatus::Failed).unwrap();
    assert_eq!(failed.element, "motor");
}

#[test]
fn overlapping_runs_are_rejected() {
    let (store, dir) = demo();
    let assets = AssetStore::new(dir.path());
    let sync = sync_for(&Arc::new(FakeCad::with_demo()), &assets);
    let guard = sync.acquire().unwrap();
    assert!(sync.is_running());
    assert!(matches!(sync.sync(&store), Err(CadError::InProgress)));
    drop(guard);
    assert!(sync.sync(&store).is_ok());
}

#[test]
fn on_view_respects_mode_and_staleness() {
    let (store, dir) = demo();
    let assets = AssetStore::new(dir.path());
    let fake = Arc::new(FakeCad::with_demo());
    let manual = sync_for(&fake, &assets);
    assert!(manual.sync_on_view(&store, None).is_none());

    let policy = SyncPolicy {
        mode: SyncMode::OnView,
        staleness_secs: 3600,
    };
    let on_view = CadSync::new(fake.clone(), assets, policy);
    let hopper = component_iri("E01", "H1");
    let first = on_view.sync_on_view(&store, Some(&hopper)).unwrap();
    assert_eq!(first.updated, 1);
    assert!(on_view.sync_on_view(&store, Some(&hopper)).is_none());
}

#[test]
fn policy_json_and_validation() {
    let p: SyncPolicy = serde_json::from_str(r#"{"mode": "scheduled", "interval_secs": 60}"#).unwrap();
    assert_eq!(p.mode, SyncMode::Scheduled { interval_secs: 60 });
    assert_eq!(p.staleness_secs, 300);
    assert!(p.validate().is_ok());
    let zero = SyncPolicy {
        mode: SyncMode::Scheduled { interval_secs: 0 },
        ..p
    };
    assert!(zero.validate().is_err());
    let v: SyncPolicy = serde_json::from_str(r#"{"mode": "on-view", "staleness_secs": 5}"#).unwrap();
    assert_eq!(v.mode, SyncMode::OnView);
    assert!(serde_json::from_str::<SyncPolicy>(r#"{"mode": "hourly"}"#).is_err());
}
