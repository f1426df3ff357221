//! Everything a request handler needs, opened once at startup.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use extrucat_core::annotation::{IrdiMapping, BUNDLED_IRDI};
use extrucat_core::assets::AssetStore;
use extrucat_core::cad::{tracked_models, CadSync, HttpCadClient};
use extrucat_core::catalogue::{Catalogue, LeadStore};
use extrucat_core::ontology::{Ontology, OntologyCache, OntologyConfig};
use extrucat_core::rdf::turtle::parse_turtle;
use extrucat_core::rdf::Store;
use extrucat_core::seed::{ensure_ontology, seed_demo};
use extrucat_core::technician::{
    CustomerDirectory, HttpStockService, MockStockService, StockFixture, StockService, Technician, TicketLog,
};

use crate::auth::TokenTable;
use crate::config::ServerConfig;

pub type SharedState = Arc<AppState>;

#[derive(Debug, thiserror::Error)]
#[error("startup failed: {0}")]
pub struct StartupError(pub String);

fn fail(context: &str) -> impl FnOnce(Box<dyn std::error::Error>) -> StartupError + '_ {
    move |e| StartupError(format!("{context}: {e}"))
}

pub struct AppState {
    pub config: ServerConfig,
    pub store: Store,
    pub ontologies: OntologyCache,
    pub catalogue: Catalogue,
    pub assets: AssetStore,
    pub leads: LeadStore,
    pub technician: Technician,
    pub irdi: IrdiMapping,
    pub cad: Option<CadSync>,
    pub tokens: TokenTable,
    /// Asset files that failed verification at startup.
    pub asset_problems: Vec<String>,
}

impl AppState {
    pub fn open(config: ServerConfig) -> Result<SharedState, StartupError> {
        let dir = config.data_dir.clone();
        std::fs::create_dir_all(&dir).map_err(|e| fail("data directory")(e.into()))?;

        let ontology_config = match &config.ontology.config {
            Some(path) => OntologyConfig::load(path).map_err(|e| fail("ontology config")(e.into()))?,
            None => OntologyConfig::default(),
        };

        let store =
            Store::open(&dir.join("store.ttl"), &dir.join("journal.log")).map_err(|e| fail("store")(e.into()))?;
        load_ontology(&store, config.ontology.path.as_deref())?;

        let assets = AssetStore::new(dir.join("assets"));
        if config.seed_demo {
            let report = seed_demo(&store, &ontology_config, &assets).map_err(|e| fail("demo seed")(e.into()))?;
            log::info!(
                "demo seeded: {} extruders at revision {}",
                report.extruders.len(),
                report.revision
            );
        }

        let customers = customer_directory(&dir, config.seed_demo)?;
        let asset_problems = verify_assets(&store, &assets);
        for p in &asset_problems {
            log::warn!("{p}");
        }

        let stock: Arc<dyn StockService> = match (&config.stock.url, &config.stock.fixture) {
            (Some(url), _) => Arc::new(HttpStockService::new(url).map_err(|e| fail("stock service")(e.into()))?),
            (None, Some(path)) => {
                let fixture = StockFixture::load(path).map_err(|e| fail("stock fixture")(e.into()))?;
                Arc::new(MockStockService::new(fixture))
            }
            (None, None) => Arc::new(MockStockService::demo()),
        };

        let cad = match &config.cad {
            Some(section) => {
                let client = HttpCadClient::new(&section.url, section.token.clone())
                    .map_err(|e| fail("CAD client")(e.into()))?;
                Some(CadSync::new(Arc::new(client), assets.clone(), section.policy))
            }
            None => None,
        };

        let irdi = IrdiMapping::from_csv(BUNDLED_IRDI).map_err(|e| fail("IRDI mapping")(e.into()))?;
        let tickets = TicketLog::open(&dir.join("tickets.jsonl")).map_err(|e| fail("ticket log")(e.into()))?;
        let technician = Technician::new(customers, tickets, stock, irdi.clone());
        let leads = LeadStore::open(&dir.join("leads.jsonl")).map_err(|e| fail("lead store")(e.into()))?;
        let tokens = TokenTable::new(&config.tokens);

        Ok(Arc::new(AppState {
            config,
            store,
            ontologies: OntologyCache::new(ontology_config),
            catalogue: Catalogue::default(),
            assets,
            leads,
            technician,
            irdi,
            cad,
            tokens,
            asset_problems,
        }))
    }

    /// The ontology view of the current revision.
    pub fn ontology(&self) -> Arc<Ontology> {
        self.ontologies.get(&self.store.snapshot())
    }

    pub fn data_dir(&self) -> &Path {
        &self.config.data_dir
    }
}

/// A configured ontology file is always parsed, so a broken file stops
/// startup even when the persisted store already holds an ontology. It is
/// loaded only into an empty store.
fn load_ontology(store: &Store, path: Option<&Path>) -> Result<(), StartupError> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| fail("ontology")(e.into()))?;
            parse_turtle(&text, None).map_err(|e| StartupError(format!("ontology {}: {e}", path.display())))?;
            if store.snapshot().is_empty() {
                store.load_turtle(&text, None).map_err(|e| fail("ontology")(e.into()))?;
            }
        }
        None => {
            ensure_ontology(store).map_err(|e| fail("ontology")(e.into()))?;
        }
    }
    Ok(())
}

fn customer_directory(dir: &Path, demo: bool) -> Result<CustomerDirectory, StartupError> {
    let path: PathBuf = dir.join("customers.json");
    if path.exists() {
        return CustomerDirectory::load(&path).map_err(|e| fail("customers")(e.into()));
    }
    Ok(if demo {
        CustomerDirectory::demo()
    } else {
        CustomerDirectory::default()
    })
}

fn verify_assets(store: &Store, assets: &AssetStore) -> Vec<String> {
    tracked_models(&store.snapshot())
        .into_iter()
        .filter_map(|t| {
            assets
                .verify(&t.model.path, &t.model.checksum)
                .err()
                .map(|e| format!("model of {}: {e}", t.component))
        })
        .collect()
}
