//! HTTP API for the extruder catalogue: public browsing and search,
//! customer support, and the admin annotation and CAD endpoints.
//!
//! [`serve`] runs until Ctrl-C; [`ServerHandle::spawn`] runs on a
//! background thread and stops when dropped.

mod auth;
mod config;
mod error;
mod routes;
mod state;

use std::net::SocketAddr;
use std::time::Duration;

use extrucat_core::cad::SyncMode;
use tokio::net::TcpListener;
use tokio::sync::oneshot;

pub use auth::{required_role, Principal, Role, TokenTable};
pub use config::{CadSection, ConfigError, OntologySection, ServerConfig, StockSection, TokenEntry};
pub use error::ApiError;
pub use routes::{router, ROUTES};
pub use state::{AppState, SharedState, StartupError};

/// Runs the scheduled CAD sync, if configured, until the runtime stops.
fn spawn_scheduler(state: &SharedState) {
    let Some(cad) = &state.cad else { return };
    let SyncMode::Scheduled { interval_secs } = cad.policy().mode else {
        return;
    };
    let state = state.clone();
    tokio::spawn(async move {
        let mut ticker = tokio::time::interval(Duration::from_secs(interval_secs));
        ticker.tick().await;
        loop {
            ticker.tick().await;
            let s = state.clone();
            let run = tokio::task::spawn_blocking(move || s.cad.as_ref().map(|c| c.sync(&s.store))).await;
            match run {
                Ok(Some(Ok(report))) => {
                    log::info!(
                        "scheduled sync: {} updated, {} skipped, {} failed",
                        report.updated,
                        report.skipped,
                        report.failed
                    )
                }
                Ok(Some(Err(e))) => log::warn!("scheduled sync: {e}"),
                Ok(None) => {}
                Err(e) => log::error!("scheduled sync panicked: {e}"),
            }
        }
    });
}

async fn bind(config: &ServerConfig) -> std::io::Result<TcpListener> {
    TcpListener::bind((config.bind.as_str(), config.port)).await
}

/// Serves until Ctrl-C, then writes a store snapshot.
pub async fn serve(config: ServerConfig) -> Result<(), StartupError> {
    let state = AppState::open(config)?;
    let listener = bind(&state.config)
        .await
        .map_err(|e| StartupError(format!("bind {}:{}: {e}", state.config.bind, state.config.port)))?;
    log::info!(
        "listening on http://{}",
        listener.local_addr().map_err(|e| StartupError(e.to_string()))?
    );
    spawn_scheduler(&state);
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| StartupError(e.to_string()))?;
    let snapshot = state.data_dir().join("store.ttl");
    state
        .store
        .export_snapshot(&snapshot)
        .map_err(|e| StartupError(format!("snapshot: {e}")))?;
    Ok(())
}

/// A server on its own thread and runtime.
pub struct ServerHandle {
    addr: SocketAddr,
    state: SharedState,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl ServerHandle {
    /// Opens the state and binds `config.bind:config.port` (port 0 picks a
    /// free one) before returning.
    pub fn spawn(config: ServerConfig) -> Result<Self, StartupError> {
        let state = AppState::open(config)?;
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .map_err(|e| StartupError(e.to_string()))?;
        let listener = runtime
            .block_on(bind(&state.config))
            .map_err(|e| StartupError(format!("bind: {e}")))?;
        let addr = listener.local_addr().map_err(|e| StartupError(e.to_string()))?;
        let (tx, rx) = oneshot::channel::<()>();
        let served = state.clone();
        let thread = std::thread::spawn(move || {
            runtime.block_on(async move {
                spawn_scheduler(&served);
                let shutdown = async {
                    let _ = rx.await;
                };
                if let Err(e) = axum::serve(listener, router(served))
                    .with_graceful_shutdown(shutdown)
                    .await
                {
                    log::error!("server stopped: {e}");
                }
            });
        });
        Ok(ServerHandle {
            addr,
            state,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn state(&self) -> &SharedState {
        &self.state
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}
