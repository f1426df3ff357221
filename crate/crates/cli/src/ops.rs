//! Store commands: load, seed, export.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use extrucat_core::assets::AssetStore;
use extrucat_core::ontology::OntologyConfig;
use extrucat_core::rdf::{Batch, Snapshot, Store, StoreError, Triple};
use extrucat_core::seed::{ensure_ontology, seed_bench, seed_demo, SeedError, SeedReport};

use crate::CliError;

pub fn store_paths(data_dir: &Path) -> (PathBuf, PathBuf) {
    (data_dir.join("store.ttl"), data_dir.join("journal.log"))
}

/// Opens (or creates) the persistent store under `data_dir`.
pub fn open_store(data_dir: &Path) -> Result<Store, CliError> {
    std::fs::create_dir_all(data_dir).map_err(|source| CliError::Io {
        path: data_dir.to_owned(),
        source,
    })?;
    let (snapshot, journal) = store_paths(data_dir);
    Ok(Store::open(&snapshot, &journal)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub added: usize,
    pub total: usize,
    pub revision: u64,
}

/// Loads Turtle files in order; each file is one batch.
pub fn load(store: &Store, files: &[PathBuf]) -> Result<LoadReport, CliError> {
    let before = store.snapshot().len();
    for file in files {
        let text = std::fs::read_to_string(file).map_err(|source| CliError::Io {
            path: file.clone(),
            source,
        })?;
        store
            .load_turtle(&text, None)
            .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    }
    let total = store.snapshot().len();
    Ok(LoadReport {
        added: total - before,
        total,
        revision: store.revision(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dataset {
    /// Three annotated extruders, solutions, suppliers and the hopper model.
    Demo,
    /// `count` generated extruders from `seed`.
    Bench { count: usize, seed: u64 },
}

/// Seeds the store. A failure part-way restores the graph as it was.
pub fn seed(
    store: &Store,
    dataset: Dataset,
    config: &OntologyConfig,
    assets: &AssetStore,
) -> Result<SeedReport, CliError> {
    let before = store.snapshot();
    let result = match dataset {
        Dataset::Demo => seed_demo(store, config, assets),
        Dataset::Bench { count, seed } => ensure_ontology(store)
            .map_err(SeedError::from)
            .and_then(|_| seed_bench(store, config, count, seed)),
    };
    result.or_else(|e| {
        restore(store, &before)?;
        Err(CliError::Seed(e))
    })
}

/// Applies the batch that turns the current graph back into `snapshot`.
pub fn restore(store: &Store, snapshot: &Snapshot) -> Result<(), StoreError> {
    let now: BTreeSet<Triple> = store.snapshot().iter().collect();
    let then: BTreeSet<Triple> = snapshot.iter().collect();
    let batch = Batch {
        remove: now.difference(&then).cloned().collect(),
        insert: then.difference(&now).cloned().collect(),
    };
    if !batch.is_empty() {
        store.apply(batch)?;
    }
    Ok(())
}

/// Writes a snapshot to `out`, or to the store's own snapshot file (which
/// also compacts the journal).
pub fn export_snapshot(store: &Store, data_dir: &Path, out: Option<&Path>) -> Result<(PathBuf, u64), CliError> {
    let target = out.map(Path::to_owned).unwrap_or_else(|| store_paths(data_dir).0);
    let revision = store.export_snapshot(&target)?;
    Ok((target, revision))
}

/// An in-memory store with the ontology (bundled or from `ontology`) and
/// the demo data; assets go to a temporary directory kept alive by the
/// returned guard.
pub fn demo_graph(ontology: Option<&Path>) -> Result<(Snapshot, tempfile::TempDir), CliError> {
    let store = Store::new();
    if let Some(path) = ontology {
        load(&store, &[path.to_owned()])?;
    }
    let dir = tempfile::tempdir().map_err(|source| CliError::Io {
        path: std::env::temp_dir(),
        source,
    })?;
    seed(
        &store,
        Dataset::Demo,
        &OntologyConfig::default(),
        &AssetStore::new(dir.path()),
    )?;
    Ok((store.snapshot(), dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeding_is_idempotent_and_persists() {
        let dir = tempfile::tempdir().unwrap();
        let assets = AssetStore::new(dir.path().join("assets"));
        let config = OntologyConfig::default();
        let first = {
            let store = open_store(dir.path()).unwrap();
            seed(&store, Dataset::Demo, &config, &assets).unwrap();
            seed(&store, Dataset::Bench { count: 5, seed: 1 }, &config, &assets).unwrap();
            let len = store.snapshot().len();
            seed(&store, Dataset::Demo, &config, &assets).unwrap();
            assert_eq!(store.snapshot().len(), len);
            len
        };
        let store = open_store(dir.path()).unwrap();
        assert_eq!(store.snapshot().len(), first);
        let (path, _) = export_snapshot(&store, dir.path(), None).unwrap();
        assert!(path.exists());
        assert_eq!(open_store(dir.path()).unwrap().snapshot().len(), first);
    }

    #[test]
    fn failed_seed_rolls_back() {
        let dir = tempfile::tempdir().unwrap();
        // A file where the asset directory should be makes the hopper
        // model write fail after the ontology and support data are in.
        std::fs::write(dir.path().join("assets"), b"").unwrap();
        let store = Store::new();
        let before = store.snapshot().len();
        let err = seed(
            &store,
            Dataset::Demo,
            &OntologyConfig::default(),
            &AssetStore::new(dir.path().join("assets")),
        );
        assert!(matches!(err, Err(CliError::Seed(_))));
        assert_eq!(store.snapshot().len(), before);
    }

    #[test]
    fn restore_reverts_inserts_and_removals() {
        let store = Store::new();
        store
            .load_turtle("<http://x/a> <http://x/p> 1 . <http://x/b> <http://x/p> 2 .", None)
            .unwrap();
        let saved = store.snapshot();
        store.remove(saved.iter().take(1)).unwrap();
        store.load_turtle("<http://x/c> <http://x/p> 3 .", None).unwrap();
        restore(&store, &saved).unwrap();
        let now: BTreeSet<Triple> = store.snapshot().iter().collect();
        assert_eq!(now, saved.iter().collect());
    }
}
