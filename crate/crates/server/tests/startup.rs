//! Startup checks and persistence across restarts.

mod common;

use extrucat_server::{AppState, ServerHandle};

#[test]
fn writes_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let revision = {
        let handle = ServerHandle::spawn(common::config(dir.path())).unwrap();
        let state = handle.state();
        state.store.remove(state.store.snapshot().iter().take(1)).unwrap();
        state.store.revision()
    };
    let mut config = common::config(dir.path());
    config.seed_demo = false;
    let state = AppState::open(config).unwrap();
    assert_eq!(state.store.revision(), revision);
    assert!(state.asset_problems.is_empty());
}

#[test]
fn broken_ontology_refuses_to_start() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.ttl");
    std::fs::write(&path, "@prefix eo: <http://x#> .\neo:A a ").unwrap();
    let mut config = common::config(&dir.path().join("data"));
    config.ontology.path = Some(path);
    let err = AppState::open(config).err().expect("startup must fail");
    assert!(err.to_string().contains("broken.ttl"), "{err}");
}

#[test]
fn tampered_assets_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    drop(AppState::open(common::config(dir.path())).unwrap());
    // Without seeding, so the demo asset is not rewritten.
    std::fs::write(dir.path().join("assets/urola-e01/hopper.gltf"), b"{}").unwrap();
    let mut config = common::config(dir.path());
    config.seed_demo = false;
    let state = AppState::open(config).unwrap();
    assert_eq!(state.asset_problems.len(), 1, "{:?}", state.asset_problems);
}
