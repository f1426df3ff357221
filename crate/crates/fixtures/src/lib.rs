//! Local stand-ins for the CAD platform and the stock service.
//!
//! Each server runs on its own runtime thread, bound to an ephemeral port on
//! the loopback interface, and stops when its [`FixtureServer`] handle is
//! dropped. The fixture handles stay usable while a server runs, so tests can
//! bump timestamps or change stock between requests.

mod cad;
pub mod random;
mod server;
mod stock;

pub use cad::{CadFixture, DEMO_TOKEN};
pub use server::FixtureServer;
pub use stock::{PlacedOrder, ProviderTable, StockServer, StockTables};
