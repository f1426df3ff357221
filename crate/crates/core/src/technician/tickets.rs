//! Support tickets as an append-only event log.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::persist::{append_line, read_lines, PersistError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TicketAction {
    ViewedSolution,
    StepCompleted,
    Escalated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    #[serde(default = "Utc::now")]
    pub timestamp: DateTime<Utc>,
    pub action: TicketAction,
    #[serde(default)]
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TicketStatus {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ticket {
    pub id: String,
    pub customer: String,
    pub extruder: String,
    pub component: String,
    pub opened_at: DateTime<Utc>,
    pub history: Vec<HistoryEntry>,
    pub status: TicketStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
enum TicketEvent {
    Opened {
        ticket: String,
        at: DateTime<Utc>,
        customer: String,
        extruder: String,
        component: String,
        history: Vec<HistoryEntry>,
    },
    Appended {
        ticket: String,
        entry: HistoryEntry,
    },
    Closed {
        ticket: String,
        at: DateTime<Utc>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum TicketError {
    #[error("unknown ticket {0}")]
    Unknown(String),
    #[error("ticket {0} is closed")]
    Closed(String),
    #[error("corrupt ticket log: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

#[derive(Debug, Default)]
struct LogState {
    tickets: BTreeMap<String, Ticket>,
    next: u64,
}

/// Tickets are rebuilt from the log on open; every change is one appended
/// event, so history is never rewritten.
#[derive(Debug)]
pub struct TicketLog {
    path: PathBuf,
    state: Mutex<LogState>,
}

impl TicketLog {
    pub fn open(path: &Path) -> Result<Self, TicketError> {
        let mut state = LogState {
            next: 1,
            ..Default::default()
        };
        for event in read_lines::<TicketEvent>(path)? {
            apply(&mut state, event)?;
        }
        Ok(TicketLog {
            path: path.to_owned(),
            state: Mutex::new(state),
        })
    }

    fn record(&self, state: &mut LogState, event: TicketEvent) -> Result<Ticket, TicketError> {
        append_line(&self.path, &event)?;
        apply(state, event)
    }

    pub fn create(
        &self,
        customer: &str,
        extruder: &str,
        component: &str,
        history: Vec<HistoryEntry>,
    ) -> Result<Ticket, TicketError> {
        let mut state = self.state.lock().expect("ticket log");
        let event = TicketEvent::Opened {
            ticket: format!("TCK-{:06}", state.next),
            at: Utc::now(),
            customer: customer.to_owned(),
            extruder: extruder.to_owned(),
            component: component.to_owned(),
            history,
        };
        self.record(&mut state, event)
    }

    pub fn append(&self, ticket: &str, entry: HistoryEntry) -> Result<Ticket, TicketError> {
        let mut state = self.state.lock().expect("ticket log");
        match state.tickets.get(ticket) {
            None => return Err(TicketError::Unknown(ticket.to_owned())),
            Some(t) if t.status == TicketStatus::Closed => return Err(TicketError::Closed(ticket.to_owned())),
            Some(_) => {}
        }
        let event = TicketEvent::Appended {
            ticket: ticket.to_owned(),
            entry,
        };
        self.record(&mut state, event)
    }

    pub fn close(&self, ticket: &str) -> Result<Ticket, TicketError> {
        let mut state = self.state.lock().expect("ticket log");
        if !state.tickets.contains_key(ticket) {
            return Err(TicketError::Unknown(ticket.to_owned()));
        }
        let event = TicketEvent::Closed {
            ticket: ticket.to_owned(),
            at: Utc::now(),
        };
        self.record(&mut state, event)
    }

    pub fn get(&self, ticket: &str) -> Option<Ticket> {
        self.state.lock().expect("ticket log").tickets.get(ticket).cloned()
    }

    pub fn for_customer(&self, customer: &str) -> Vec<Ticket> {
        let state = self.state.lock().expect("ticket log");
        state
            .tickets
            .values()
            .filter(|t| t.customer == customer)
            .cloned()
            .collect()
    }
}

fn apply(state: &mut LogState, event: TicketEvent) -> Result<Ticket, TicketError> {
    let ticket = match event {
        TicketEvent::Opened {
            ticket,
            at,
            customer,
            extruder,
            component,
            history,
        } => {
            if let Some(n) = ticket.strip_prefix("TCK-").and_then(|n| n.parse::<u64>().ok()) {
                state.next = state.next.max(n + 1);
            }
            let t = Ticket {
                id: ticket.clone(),
                customer,
                extruder,
                component,
                opened_at: at,
                history,
                status: TicketStatus::Open,
            };
            state.tickets.insert(ticket.clone(), t);
            ticket
        }
        TicketEvent::Appended { ticket, entry } => {
            let t = state
                .tickets
                .get_mut(&ticket)
                .ok_or_else(|| TicketError::Corrupt(format!("append to unknown {ticket}")))?;
            t.history.push(entry);
            ticket
        }
        TicketEvent::Closed { ticket, .. } => {
            let t = state
                .tickets
                .get_mut(&ticket)
                .ok_or_else(|| TicketError::Corrupt(format!("close of unknown {ticket}")))?;
            t.status = TicketStatus::Closed;
            ticket
        }
    };
    Ok(state.tickets[&ticket].clone())
}
