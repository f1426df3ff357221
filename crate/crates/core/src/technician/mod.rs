//! Virtual technician: owned machines, the solution library, support
//! tickets and spare-part requests.

pub mod stock;
mod tickets;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use stock::{
    HttpStockService, MockStockService, OrderReceipt, OrderRequest, Provider, ProviderQuery, Reservation, StockError,
    StockFixture, StockLevel, StockService, DEMO_STOCK, WAREHOUSE,
};
pub use tickets::{HistoryEntry, Ticket, TicketAction, TicketError, TicketLog, TicketStatus};

use crate::annotation::{extruder_exists, extruder_iri, IrdiMapping};
use crate::catalogue::{Catalogue, CatalogueError, ExtruderView};
use crate::ontology::{label_of, Ontology, OntologyError};
use crate::persist::{read_json, PersistError};
use crate::rdf::vocab::{app, dcterms, extruont, rdf, rdfs};
use crate::rdf::{iri, Graph, Term};

/// Demo customer directory.
pub const DEMO_CUSTOMERS: &str = include_str!("../../data/demo-customers.json");

#[derive(Debug, thiserror::Error)]
pub enum TechnicianError {
    #[error("unknown customer {0}")]
    UnknownCustomer(String),
    #[error("unknown component {0}")]
    UnknownComponent(String),
    #[error("customer {customer} does not own {extruder}")]
    NotOwner { customer: String, extruder: String },
    #[error("{component} is not a component of {extruder}")]
    NotAComponentOf { component: String, extruder: String },
    #[error("component {0} has no part code")]
    MissingPartCode(String),
    #[error(transparent)]
    Stock(#[from] StockError),
    #[error(transparent)]
    Ticket(#[from] TicketError),
    #[error(transparent)]
    Catalogue(#[from] CatalogueError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Acquisition {
    Bought,
    Rented,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ownership {
    /// Extruder IRI or local id.
    pub extruder: String,
    pub acquisition: Acquisition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Customer {
    pub name: String,
    #[serde(default)]
    pub extruders: Vec<Ownership>,
}

/// Customer id -> customer, as stored in `customers.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CustomerDirectory {
    pub customers: BTreeMap<String, Customer>,
}

impl CustomerDirectory {
    pub fn load(path: &Path) -> Result<Self, PersistError> {
        read_json(path)
    }

    pub fn demo() -> Self {
        serde_json::from_str(DEMO_CUSTOMERS).expect("bundled customers parse")
    }

    pub fn get(&self, id: &str) -> Option<&Customer> {
        self.customers.get(id)
    }

    /// Owned extruder IRIs with how they were acquired.
    pub fn owned(&self, customer: &str) -> Result<Vec<(String, Acquisition)>, TechnicianError> {
        let c = self
            .get(customer)
            .ok_or_else(|| TechnicianError::UnknownCustomer(customer.to_owned()))?;
        let mut out: Vec<_> = c
            .extruders
            .iter()
            .map(|o| (normalize_extruder(&o.extruder), o.acquisition))
            .collect();
        out.sort();
        Ok(out)
    }
}

fn normalize_extruder(id: &str) -> String {
    if id.contains(':') {
        id.to_owned()
    } else {
        extruder_iri(id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnedExtruder {
    pub acquisition: Acquisition,
    #[serde(flatten)]
    pub extruder: ExtruderView,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionEntry {
    pub id: String,
    pub title: String,
    pub description: String,
    pub steps: Vec<String>,
    pub related_to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub order_id: String,
    /// The component IRI.
    pub part_id: String,
    pub part_code: String,
    /// `warehouse` or the provider id.
    pub source: String,
    pub status: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchKind {
    Code,
    IrdiMatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderOption {
    pub provider_id: String,
    pub name: String,
    pub stock: u32,
    #[serde(rename = "match")]
    pub matched_by: MatchKind,
}

/// Outcome of a spare-part request: exactly one of an order or the
/// providers to choose from (possibly none).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result")]
pub enum SparePartResult {
    Order { order: Order },
    Providers { providers: Vec<ProviderOption> },
}

pub struct Technician {
    customers: CustomerDirectory,
    tickets: TicketLog,
    stock: Arc<dyn StockService>,
    irdi: IrdiMapping,
}

/// The extruder that lists `component` under `eo:hasComponent`.
pub fn extruder_of(graph: &Graph, component: &str) -> Option<String> {
    graph
        .subjects(extruont::HAS_COMPONENT, &iri(component))
        .into_iter()
        .find_map(|s| s.as_iri().filter(|e| extruder_exists(graph, e)).map(str::to_owned))
}

fn require_component(graph: &Graph, component: &str) -> Result<String, TechnicianError> {
    if graph.object(&iri(component), rdf::TYPE).is_none() {
        return Err(TechnicianError::UnknownComponent(component.to_owned()));
    }
    extruder_of(graph, component).ok_or_else(|| TechnicianError::UnknownComponent(component.to_owned()))
}

impl Technician {
    pub fn new(
        customers: CustomerDirectory,
        tickets: TicketLog,
        stock: Arc<dyn StockService>,
        irdi: IrdiMapping,
    ) -> Self {
        Technician {
            customers,
            tickets,
            stock,
            irdi,
        }
    }

    pub fn customers(&self) -> &CustomerDirectory {
        &self.customers
    }

    pub fn tickets(&self) -> &TicketLog {
        &self.tickets
    }

    /// Owned and rented extruders, visible in the catalogue or not.
    pub fn list_owned(
        &self,
        graph: &Graph,
        catalogue: &Catalogue,
        customer: &str,
    ) -> Result<Vec<OwnedExtruder>, TechnicianError> {
        let mut out = Vec::new();
        for (extruder, acquisition) in self.customers.owned(customer)? {
            match catalogue.extruder_view(graph, &extruder) {
                Ok(view) => out.push(OwnedExtruder {
                    acquisition,
                    extruder: view,
                }),
                Err(CatalogueError::UnknownExtruder(e)) => log::warn!("customer {customer} owns missing extruder {e}"),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(out)
    }

    pub fn owns(&self, customer: &str, extruder: &str) -> bool {
        self.customers
            .owned(customer)
            .is_ok_and(|owned| owned.iter().any(|(e, _)| e == extruder))
    }

    /// True when `component` belongs to one of the customer's extruders.
    pub fn owns_component(&self, graph: &Graph, customer: &str, component: &str) -> bool {
        extruder_of(graph, component).is_some_and(|e| self.owns(customer, &e))
    }

    /// Solutions related to the component's class or a superclass, by
    /// title.
    pub fn solutions_for(&self, ontology: &Ontology, component: &str) -> Result<Vec<SolutionEntry>, TechnicianError> {
        let graph = ontology.graph();
        require_component(graph, component)?;
        let mut ids = Vec::new();
        for class in ontology.types_of(&iri(component)) {
            for s in ontology.applicable_solutions(&class)? {
                if !ids.contains(&s) {
                    ids.push(s);
                }
            }
        }
        let mut out: Vec<SolutionEntry> = ids
            .into_iter()
            .filter_map(|id| {
                let node = iri(&id);
                let steps: Vec<String> = graph
                    .object(&node, app::STEPS)
                    .map(|list| {
                        graph
                            .list_items(&list)
                            .iter()
                            .map(|s| s.value_str().to_owned())
                            .collect()
                    })
                    .unwrap_or_default();
                if steps.is_empty() {
                    log::warn!("solution {id} has no steps; skipped");
                    return None;
                }
                Some(SolutionEntry {
                    title: graph
                        .object(&node, rdfs::LABEL)
                        .map(|l| l.value_str().to_owned())
                        .unwrap_or_else(|| label_of(graph, &id)),
                    description: graph
                        .object(&node, dcterms::DESCRIPTION)
                        .map(|d| d.value_str().to_owned())
                        .unwrap_or_default(),
                    steps,
                    related_to: graph
                        .object(&node, &ontology.config().related_to_property)
                        .and_then(|t| t.as_iri().map(str::to_owned))
                        .unwrap_or_default(),
                    id,
                })
            })
            .collect();
        out.sort_by(|a, b| a.title.cmp(&b.title).then_with(|| a.id.cmp(&b.id)));
        Ok(out)
    }

    /// Opens a ticket carrying the customer's prior actions.
    pub fn open_ticket(
        &self,
        graph: &Graph,
        customer: &str,
        extruder: &str,
        component: &str,
        history: Vec<HistoryEntry>,
    ) -> Result<Ticket, TechnicianError> {
        self.customers
            .get(customer)
            .ok_or_else(|| TechnicianError::UnknownCustomer(customer.to_owned()))?;
        let extruder = normalize_extruder(extruder);
        if !self.owns(customer, &extruder) {
            return Err(TechnicianError::NotOwner {
                customer: customer.to_owned(),
                extruder,
            });
        }
        if require_component(graph, component)? != extruder {
            return Err(TechnicianError::NotAComponentOf {
                component: component.to_owned(),
                extruder,
            });
        }
        Ok(self.tickets.create(customer, &extruder, component, history)?)
    }

    fn part_code(graph: &Graph, component: &str) -> Result<String, TechnicianError> {
        graph
            .object(&iri(component), app::PART_CODE)
            .map(|c| c.value_str().trim().to_owned())
            .filter(|c| !c.is_empty())
            .ok_or_else(|| TechnicianError::MissingPartCode(component.to_owned()))
    }

    /// The component's own IRDI, else the mapping's code for its class.
    fn irdi_of(&self, ontology: &Ontology, component: &str) -> Option<String> {
        let c = iri(component);
        if let Some(Term::Literal(l)) = ontology.graph().object(&c, app::IRDI) {
            return Some(l.lexical().to_owned());
        }
        ontology
            .types_of(&c)
            .iter()
            .find_map(|t| self.irdi.lookup(ontology, t))
            .map(|m| m.irdi)
    }

    /// Providers stocking the component's part code; when none do, those
    /// stocking any part under the same IRDI.
    pub fn get_providers_by_part_id(
        &self,
        ontology: &Ontology,
        component: &str,
    ) -> Result<Vec<ProviderOption>, TechnicianError> {
        require_component(ontology.graph(), component)?;
        let code = Self::part_code(ontology.graph(), component)?;
        let direct = self.stock.providers(&ProviderQuery::Code(code))?;
        if !direct.is_empty() {
            return Ok(options(direct, MatchKind::Code));
        }
        match self.irdi_of(ontology, component) {
            Some(irdi) => Ok(options(
                self.stock.providers(&ProviderQuery::Irdi(irdi))?,
                MatchKind::IrdiMatch,
            )),
            None => Ok(Vec::new()),
        }
    }

    /// Warehouse first; otherwise order from the requested provider when
    /// it stocks the part, else return the providers.
    pub fn request_spare_part(
        &self,
        ontology: &Ontology,
        component: &str,
        provider: Option<&str>,
    ) -> Result<SparePartResult, TechnicianError> {
        let graph = ontology.graph();
        require_component(graph, component)?;
        let code = Self::part_code(graph, component)?;
        let order = |source: &str, irdi: Option<String>| -> Result<SparePartResult, TechnicianError> {
            let receipt = self.stock.place_order(&OrderRequest {
                code: code.clone(),
                source: source.to_owned(),
                quantity: 1,
                irdi,
            })?;
            Ok(SparePartResult::Order {
                order: Order {
                    order_id: receipt.order_id,
                    part_id: component.to_owned(),
                    part_code: code.clone(),
                    source: source.to_owned(),
                    status: receipt.status,
                },
            })
        };
        if self.stock.stock(&code)?.available {
            return order(WAREHOUSE, None);
        }
        let providers = self.get_providers_by_part_id(ontology, component)?;
        match provider {
            Some(p) => match providers.iter().find(|o| o.provider_id == p) {
                Some(chosen) => {
                    let irdi = (chosen.matched_by == MatchKind::IrdiMatch)
                        .then(|| self.irdi_of(ontology, component))
                        .flatten();
                    order(p, irdi)
                }
                None => Ok(SparePartResult::Providers { providers }),
            },
            None => Ok(SparePartResult::Providers { providers }),
        }
    }
}

fn options(providers: Vec<Provider>, matched_by: MatchKind) -> Vec<ProviderOption> {
    providers
        .into_iter()
        .map(|p| ProviderOption {
            provider_id: p.id,
            name: p.name,
            stock: p.stock,
            matched_by,
        })
        .collect()
}

#[cfg(test)]
mod tests;
