//! Bearer-token principals and the route gate.
//!
//! Tokens come from a static table in the config; there is no login flow.
//! The gate runs before routing, so an unknown path under a protected
//! prefix answers 401/403 exactly like a known one.

use std::collections::HashMap;

use axum::extract::{Request, State};
use axum::http::header::AUTHORIZATION;
use axum::middleware::Next;
use axum::response::Response;
use serde::{Deserialize, Serialize};

use crate::config::TokenEntry;
use crate::error::ApiError;
use crate::state::SharedState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Anonymous,
    Customer,
    Admin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Principal {
    pub user: Option<String>,
    pub role: Role,
    /// Set for customers.
    pub customer: Option<String>,
}

impl Principal {
    pub fn anonymous() -> Self {
        Principal {
            user: None,
            role: Role::Anonymous,
            customer: None,
        }
    }

    /// Admins hold every customer capability.
    pub fn can(&self, required: Role) -> bool {
        self.role >= required
    }
}

#[derive(Debug, Clone, Default)]
pub struct TokenTable {
    tokens: HashMap<String, Principal>,
}

impl TokenTable {
    pub fn new(entries: &[TokenEntry]) -> Self {
        let tokens = entries
            .iter()
            .map(|e| {
                let principal = Principal {
                    user: Some(e.user.clone()),
                    role: e.role,
                    customer: e.customer.clone(),
                };
                (e.token.clone(), principal)
            })
            .collect();
        TokenTable { tokens }
    }

    /// `None` header means anonymous; an unknown token is an error.
    pub fn authenticate(&self, header: Option<&str>) -> Result<Principal, ApiError> {
        let Some(value) = header else {
            return Ok(Principal::anonymous());
        };
        let token = value
            .strip_prefix("Bearer ")
            .ok_or_else(|| ApiError::unauthorized("expected a bearer token"))?;
        self.tokens
            .get(token.trim())
            .cloned()
            .ok_or_else(|| ApiError::unauthorized("unknown token"))
    }
}

/// Minimum role for a path.
pub fn required_role(path: &str) -> Role {
    let under = |prefix: &str| path == prefix || path.starts_with(&format!("{prefix}/"));
    if under("/api/admin") || under("/sparql") {
        Role::Admin
    } else if under("/api/my") || under("/api/solutions") || under("/api/tickets") || under("/api/spare-parts") {
        Role::Customer
    } else {
        Role::Anonymous
    }
}

pub async fn gate(State(state): State<SharedState>, mut req: Request, next: Next) -> Result<Response, ApiError> {
    let header = req.headers().get(AUTHORIZATION).map(|v| v.to_str().unwrap_or(""));
    let principal = state.tokens.authenticate(header)?;
    let required = required_role(req.uri().path());
    if !principal.can(required) {
        return Err(if principal.role == Role::Anonymous {
            ApiError::unauthorized("authentication required")
        } else {
            ApiError::forbidden(format!("{:?} role required", required).to_lowercase())
        });
    }
    req.extensions_mut().insert(principal);
    Ok(next.run(req).await)
}
