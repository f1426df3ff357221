//! Stock service fixture: `GET /stock/{code}`, `GET /providers?code=|irdi=`,
//! `POST /orders`.

use std::collections::BTreeMap;
use std::io;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::FixtureServer;

/// Stock tables, in the same JSON shape the catalogue's stock fixture uses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StockTables {
    #[serde(default)]
    pub warehouse: BTreeMap<String, u32>,
    /// Part code to IRDI.
    #[serde(default)]
    pub parts: BTreeMap<String, String>,
    #[serde(default)]
    pub providers: Vec<ProviderTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderTable {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub stock: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedOrder {
    pub order_id: String,
    pub code: String,
    pub source: String,
    pub quantity: u32,
}

#[derive(Debug, Default)]
struct StockState {
    tables: StockTables,
    orders: Vec<PlacedOrder>,
    warehouse_seq: u64,
    provider_seq: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Default)]
pub struct StockServer {
    state: Arc<Mutex<StockState>>,
}

#[derive(Deserialize)]
struct ProviderParams {
    code: Option<String>,
    irdi: Option<String>,
}

#[derive(Deserialize)]
struct OrderBody {
    code: String,
    source: String,
    #[serde(default = "one")]
    quantity: u32,
    #[serde(default)]
    irdi: Option<String>,
}

fn one() -> u32 {
    1
}

impl StockServer {
    pub fn new(tables: StockTables) -> Self {
        StockServer {
            state: Arc::new(Mutex::new(StockState {
                tables,
                ..Default::default()
            })),
        }
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        Ok(Self::new(serde_json::from_str(text)?))
    }

    fn lock(&self) -> MutexGuard<'_, StockState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn orders(&self) -> Vec<PlacedOrder> {
        self.lock().orders.clone()
    }

    pub fn set_warehouse(&self, code: &str, count: u32) {
        self.lock().tables.warehouse.insert(code.to_owned(), count);
    }

    pub fn router(&self) -> Router {
        Router::new()
            .route("/stock/{code}", get(stock))
            .route("/providers", get(providers))
            .route("/orders", post(order))
            .with_state(self.clone())
    }

    pub fn serve(&self) -> io::Result<FixtureServer> {
        FixtureServer::start(self.router())
    }
}

fn error(code: StatusCode, message: String) -> Response {
    (code, Json(serde_json::json!({ "error": message }))).into_response()
}

async fn stock(State(s): State<StockServer>, Path(code): Path<String>) -> Response {
    let count = s.lock().tables.warehouse.get(&code).copied().unwrap_or(0);
    Json(serde_json::json!({ "available": count > 0, "count": count })).into_response()
}

async fn providers(State(s): State<StockServer>, Query(q): Query<ProviderParams>) -> Response {
    let state = s.lock();
    let t = &state.tables;
    let count: Box<dyn Fn(&ProviderTable) -> u32> = match (q.code, q.irdi) {
        (Some(code), None) => Box::new(move |p| p.stock.get(&code).copied().unwrap_or(0)),
        (None, Some(irdi)) => Box::new(move |p| {
            p.stock
                .iter()
                .filter(|(c, _)| t.parts.get(*c) == Some(&irdi))
                .map(|(_, n)| n)
                .sum()
        }),
        _ => {
            return error(
                StatusCode::BAD_REQUEST,
                "exactly one of code or irdi is required".into(),
            )
        }
    };
    let mut out: Vec<_> = t
        .providers
        .iter()
        .map(|p| serde_json::json!({ "id": p.id, "name": p.name, "stock": count(p) }))
        .filter(|v| v["stock"].as_u64() > Some(0))
        .collect();
    out.sort_by(|a, b| a["id"].as_str().cmp(&b["id"].as_str()));
    Json(out).into_response()
}

async fn order(State(s): State<StockServer>, Json(body): Json<OrderBody>) -> Response {
    let mut guard = s.lock();
    let state = &mut *guard;
    let qty = body.quantity.max(1);
    let order_id = if body.source == "warehouse" {
        let have = state.tables.warehouse.entry(body.code.clone()).or_insert(0);
        if *have < qty {
            return error(StatusCode::CONFLICT, format!("warehouse has {have} of {}", body.code));
        }
        *have -= qty;
        state.warehouse_seq += 1;
        format!("WH-{:06}", state.warehouse_seq)
    } else {
        let parts = &state.tables.parts;
        let Some(provider) = state.tables.providers.iter_mut().find(|p| p.id == body.source) else {
            return error(StatusCode::NOT_FOUND, format!("unknown provider {}", body.source));
        };
        let code = if provider.stock.get(&body.code).copied().unwrap_or(0) >= qty {
            Some(body.code.clone())
        } else {
            provider
                .stock
                .iter()
                .find(|(c, n)| **n >= qty && body.irdi.is_some() && parts.get(*c) == body.irdi.as_ref())
                .map(|(c, _)| c.clone())
        };
        let Some(code) = code else {
            return error(StatusCode::CONFLICT, format!("{} has no {}", body.source, body.code));
        };
        *provider.stock.get_mut(&code).expect("stocked code") -= qty;
        let n = state.provider_seq.entry(body.source.clone()).or_insert(0);
        *n += 1;
        format!("PRV-{}-{:06}", body.source, n)
    };
    state.orders.push(PlacedOrder {
        order_id: order_id.clone(),
        code: body.code,
        source: body.source,
        quantity: qty,
    });
    (
        StatusCode::CREATED,
        Json(serde_json::json!({ "order_id": order_id, "status": "reserved" })),
    )
        .into_response()
}
