//! Information requests ("leads") from prospective customers.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::search::SearchParams;
use crate::annotation::{extruder_exists, extruder_iri};
use crate::ontology::label_of;
use crate::persist::{append_line, read_lines, PersistError};
use crate::rdf::Graph;

#[derive(Debug, thiserror::Error)]
pub enum LeadError {
    #[error("{field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("unknown extruder {0}")]
    UnknownExtruder(String),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoRequest {
    pub name: String,
    pub email: String,
    #[serde(default)]
    pub message: String,
    /// Extruder IRI or local id.
    pub extruder: String,
    /// Present when the request was made from a search result.
    #[serde(default)]
    pub search_params: Option<SearchParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeadOrigin {
    Catalogue,
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub name: String,
    pub email: String,
    pub message: String,
    pub extruder: String,
    pub extruder_name: String,
    pub origin: LeadOrigin,
    pub search_params: Option<SearchParams>,
}

/// Pragmatic address check: one `@`, a non-empty local part and a dotted
/// domain without spaces.
pub fn is_valid_email(email: &str) -> bool {
    let Some((local, domain)) = email.split_once('@') else {
        return false;
    };
    !local.is_empty()
        && !domain.contains('@')
        && !email.chars().any(char::is_whitespace)
        && domain.split('.').count() >= 2
        && domain.split('.').all(|label| !label.is_empty())
}

/// Append-only lead log.
#[derive(Debug)]
pub struct LeadStore {
    path: PathBuf,
    next: Mutex<u64>,
}

impl LeadStore {
    pub fn open(path: &Path) -> Result<Self, LeadError> {
        let existing: Vec<LeadRecord> = read_lines(path)?;
        let next = existing
            .iter()
            .filter_map(|r| r.id.strip_prefix("LEAD-")?.parse::<u64>().ok())
            .max()
            .unwrap_or(0)
            + 1;
        Ok(LeadStore {
            path: path.to_owned(),
            next: Mutex::new(next),
        })
    }

    pub fn submit(&self, graph: &Graph, request: &InfoRequest) -> Result<LeadRecord, LeadError> {
        let invalid = |field, message: &str| LeadError::Invalid {
            field,
            message: message.to_owned(),
        };
        if request.name.trim().is_empty() {
            return Err(invalid("name", "required"));
        }
        if !is_valid_email(request.email.trim()) {
            return Err(invalid("email", "not a valid address"));
        }
        let extruder = if request.extruder.contains(':') {
            request.extruder.clone()
        } else {
            extruder_iri(&request.extruder)
        };
        if !extruder_exists(graph, &extruder) {
            return Err(LeadError::UnknownExtruder(request.extruder.clone()));
        }
        let mut next = self.next.lock().expect("lead counter");
        let record = LeadRecord {
            id: format!("LEAD-{:06}", *next),
            created_at: Utc::now(),
            name: request.name.trim().to_owned(),
            email: request.email.trim().to_owned(),
            message: request.message.clone(),
            extruder_name: label_of(graph, &extruder),
            extruder,
            origin: if request.search_params.is_some() {
                LeadOrigin::Search
            } else {
                LeadOrigin::Catalogue
            },
            search_params: request.search_params.clone(),
        };
        append_line(&self.path, &record)?;
        *next += 1;
        log::info!("lead {} for {}", record.id, record.extruder);
        Ok(record)
    }

    pub fn list(&self) -> Result<Vec<LeadRecord>, LeadError> {
        Ok(read_lines(&self.path)?)
    }
}
