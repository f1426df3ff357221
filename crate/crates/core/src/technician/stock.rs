//! The company's stock service: warehouse levels, alternative providers and
//! order placement.
//!
//! JSON protocol: `GET /stock/{code}` -> `{available, count}`,
//! `GET /providers?code=..|irdi=..` -> `[{id, name, stock}]`,
//! `POST /orders` `{code, source, quantity}` -> `{order_id, status}`;
//! 409 means the stock was taken in the meantime.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use url::Url;

use crate::persist::{read_json, PersistError};

/// Order source for the company warehouse.
pub const WAREHOUSE: &str = "warehouse";

#[derive(Debug, thiserror::Error)]
pub enum StockError {
    #[error("stock service unreachable: {0}")]
    Unreachable(String),
    #[error("stock changed, retry: {0}")]
    Conflict(String),
    #[error("unknown provider {0}")]
    UnknownProvider(String),
    #[error("stock service protocol error: {0}")]
    Protocol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StockLevel {
    pub available: bool,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provider {
    pub id: String,
    pub name: String,
    pub stock: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderQuery {
    Code(String),
    Irdi(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRequest {
    pub code: String,
    /// `warehouse` or a provider id.
    pub source: String,
    pub quantity: u32,
    /// Lets a provider found by IRDI ship its own equivalent part.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irdi: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderReceipt {
    pub order_id: String,
    pub status: String,
}

pub trait StockService: Send + Sync {
    fn stock(&self, code: &str) -> Result<StockLevel, StockError>;
    fn providers(&self, query: &ProviderQuery) -> Result<Vec<Provider>, StockError>;
    fn place_order(&self, order: &OrderRequest) -> Result<OrderReceipt, StockError>;
}

/// Stock tables for the in-process service.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StockFixture {
    /// Warehouse units per part code.
    #[serde(default)]
    pub warehouse: BTreeMap<String, u32>,
    /// IRDI of each known part code.
    #[serde(default)]
    pub parts: BTreeMap<String, String>,
    #[serde(default)]
    pub providers: Vec<ProviderStock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderStock {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub stock: BTreeMap<String, u32>,
}

impl StockFixture {
    pub fn load(path: &Path) -> Result<Self, PersistError> {
        read_json(path)
    }
}

/// The demo stock tables.
pub const DEMO_STOCK: &str = include_str!("../../data/demo-stock.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reservation {
    pub order_id: String,
    pub code: String,
    pub source: String,
}

#[derive(Debug, Default)]
struct MockState {
    fixture: StockFixture,
    reservations: Vec<Reservation>,
    warehouse_orders: u64,
    provider_orders: BTreeMap<String, u64>,
}

/// Deterministic in-process stock service. Orders check and decrement
/// stock under one lock.
#[derive(Debug, Default)]
pub struct MockStockService {
    state: Mutex<MockState>,
}

impl MockStockService {
    pub fn new(fixture: StockFixture) -> Self {
        MockStockService {
            state: Mutex::new(MockState {
                fixture,
                ..Default::default()
            }),
        }
    }

    pub fn demo() -> Self {
        Self::new(serde_json::from_str(DEMO_STOCK).expect("bundled stock fixture parses"))
    }

    pub fn reservations(&self) -> Vec<Reservation> {
        self.state.lock().expect("stock state").reservations.clone()
    }

    pub fn set_warehouse(&self, code: &str, count: u32) {
        self.state
            .lock()
            .expect("stock state")
            .fixture
            .warehouse
            .insert(code.to_owned(), count);
    }
}

impl StockService for MockStockService {
    fn stock(&self, code: &str) -> Result<StockLevel, StockError> {
        let count = self
            .state
            .lock()
            .expect("stock state")
            .fixture
            .warehouse
            .get(code)
            .copied()
            .unwrap_or(0);
        Ok(StockLevel {
            available: count > 0,
            count,
        })
    }

    fn providers(&self, query: &ProviderQuery) -> Result<Vec<Provider>, StockError> {
        let state = self.state.lock().expect("stock state");
        let f = &state.fixture;
        let stocked = |p: &ProviderStock| -> u32 {
            match query {
                ProviderQuery::Code(code) => p.stock.get(code).copied().unwrap_or(0),
                ProviderQuery::Irdi(irdi) => p
                    .stock
                    .iter()
                    .filter(|(code, _)| f.parts.get(*code) == Some(irdi))
                    .map(|(_, n)| n)
                    .sum(),
            }
        };
        let mut out: Vec<Provider> = f
            .providers
            .iter()
            .map(|p| Provider {
                id: p.id.clone(),
                name: p.name.clone(),
                stock: stocked(p),
            })
            .filter(|p| p.stock > 0)
            .collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }

    fn place_order(&self, order: &OrderRequest) -> Result<OrderReceipt, StockError> {
        let mut guard = self.state.lock().expect("stock state");
        let state = &mut *guard;
        let qty = order.quantity.max(1);
        let order_id = if order.source == WAREHOUSE {
            let have = state.fixture.warehouse.entry(order.code.clone()).or_insert(0);
            if *have < qty {
                return Err(StockError::Conflict(format!("warehouse has {have} of {}", order.code)));
            }
            *have -= qty;
            state.warehouse_orders += 1;
            format!("WH-{:06}", state.warehouse_orders)
        } else {
            let provider = state
                .fixture
                .providers
                .iter_mut()
                .find(|p| p.id == order.source)
                .ok_or_else(|| StockError::UnknownProvider(order.source.clone()))?;
            let code = if provider.stock.get(&order.code).copied().unwrap_or(0) >= qty {
                order.code.clone()
            } else {
                let parts = &state.fixture.parts;
                provider
                    .stock
                    .iter()
                    .find(|(c, n)| **n >= qty && order.irdi.is_some() && parts.get(*c) == order.irdi.as_ref())
                    .map(|(c, _)| c.clone())
                    .ok_or_else(|| StockError::Conflict(format!("{} has no {}", order.source, order.code)))?
            };
            *provider.stock.get_mut(&code).expect("stocked code") -= qty;
            let n = state.provider_orders.entry(order.source.clone()).or_insert(0);
            *n += 1;
            format!("PRV-{}-{:06}", order.source, n)
        };
        state.reservations.push(Reservation {
            order_id: order_id.clone(),
            code: order.code.clone(),
            source: order.source.clone(),
        });
        Ok(OrderReceipt {
            order_id,
            status: "reserved".into(),
        })
    }
}

/// Stock service client over HTTP.
#[derive(Debug, Clone)]
pub struct HttpStockService {
    base: Url,
    agent: ureq::Agent,
}

impl HttpStockService {
    pub fn new(base_url: &str) -> Result<Self, StockError> {
        let mut base = Url::parse(base_url).map_err(|e| StockError::Protocol(format!("bad base URL: {e}")))?;
        if !base.path().ends_with('/') {
            base.set_path(&format!("{}/", base.path()));
        }
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(10)))
            .build();
        Ok(HttpStockService {
            base,
            agent: ureq::Agent::new_with_config(config),
        })
    }

    fn url(&self, segments: &[&str]) -> Url {
        let mut url = self.base.clone();
        url.path_segments_mut()
            .expect("http base")
            .pop_if_empty()
            .extend(segments);
        url
    }

    fn check(resp: ureq::http::Response<ureq::Body>) -> Result<ureq::http::Response<ureq::Body>, StockError> {
        match resp.status().as_u16() {
            200..=299 => Ok(resp),
            409 => Err(StockError::Conflict("409 from stock service".into())),
            s => Err(StockError::Protocol(format!("HTTP {s}"))),
        }
    }

    fn transport(e: ureq::Error) -> StockError {
        match e {
            ureq::Error::Io(_)
            | ureq::Error::Timeout(_)
            | ureq::Error::HostNotFound
            | ureq::Error::ConnectionFailed => StockError::Unreachable(e.to_string()),
            other => StockError::Protocol(other.to_string()),
        }
    }

    fn json<T: serde::de::DeserializeOwned>(resp: ureq::http::Response<ureq::Body>) -> Result<T, StockError> {
        resp.into_body()
            .read_json()
            .map_err(|e| StockError::Protocol(e.to_string()))
    }
}

impl StockService for HttpStockService {
    fn stock(&self, code: &str) -> Result<StockLevel, StockError> {
        let resp = self
            .agent
            .get(self.url(&["stock", code]).as_str())
            .call()
            .map_err(Self::transport)?;
        if resp.status().as_u16() == 404 {
            return Ok(StockLevel {
                available: false,
                count: 0,
            });
        }
        Self::json(Self::check(resp)?)
    }

    fn providers(&self, query: &ProviderQuery) -> Result<Vec<Provider>, StockError> {
        let mut url = self.url(&["providers"]);
        match query {
            ProviderQuery::Code(c) => url.query_pairs_mut().append_pair("code", c),
            ProviderQuery::Irdi(i) => url.query_pairs_mut().append_pair("irdi", i),
        };
        let resp = self.agent.get(url.as_str()).call().map_err(Self::transport)?;
        Self::json(Self::check(resp)?)
    }

    fn place_order(&self, order: &OrderRequest) -> Result<OrderReceipt, StockError> {
        let resp = self
            .agent
            .post(self.url(&["orders"]).as_str())
            .send_json(order)
            .map_err(Self::transport)?;
        if resp.status().as_u16() == 404 {
            return Err(StockError::UnknownProvider(order.source.clone()));
        }
        Self::json(Self::check(resp)?)
    }
}
