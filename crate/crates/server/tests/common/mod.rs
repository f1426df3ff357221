//! A demo server on an ephemeral port plus a small JSON client.

#![allow(dead_code)]

use std::time::Duration;

use extrucat_core::cad::{SyncMode, SyncPolicy};
use extrucat_fixtures::{CadFixture, FixtureServer, DEMO_TOKEN};
use extrucat_server::{CadSection, Role, ServerConfig, ServerHandle, TokenEntry};
use serde_json::Value;

pub const ADMIN: &str = "admin-token";
/// Customer C001, owner of E01 and E03.
pub const CUSTOMER: &str = "c001-token";
/// Customer C002, owner of E02 only.
pub const OTHER_CUSTOMER: &str = "c002-token";
pub const ORIGIN: &str = "http://localhost:5173";

pub struct TestServer {
    pub handle: ServerHandle,
    pub cad: Option<(CadFixture, FixtureServer)>,
    agent: ureq::Agent,
    _dir: tempfile::TempDir,
}

fn token(token: &str, role: Role, user: &str, customer: Option<&str>) -> TokenEntry {
    TokenEntry {
        token: token.into(),
        role,
        user: user.into(),
        customer: customer.map(str::to_owned),
    }
}

pub fn config(dir: &std::path::Path) -> ServerConfig {
    ServerConfig {
        port: 0,
        data_dir: dir.to_owned(),
        seed_demo: true,
        allowed_origins: vec![ORIGIN.into()],
        tokens: vec![
            token(ADMIN, Role::Admin, "alice", None),
            token(CUSTOMER, Role::Customer, "bob", Some("C001")),
            token(OTHER_CUSTOMER, Role::Customer, "carol", Some("C002")),
        ],
        ..ServerConfig::default()
    }
}

impl TestServer {
    pub fn start() -> Self {
        Self::start_with(None)
    }

    /// With `mode`, a demo CAD fixture server is attached under that mode.
    pub fn start_with(mode: Option<SyncMode>) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let mut config = config(dir.path());
        let cad = mode.map(|mode| {
            let fixture = CadFixture::demo();
            let server = fixture.serve().unwrap();
            config.cad = Some(CadSection {
                url: server.base_url(),
                token: Some(DEMO_TOKEN.into()),
                policy: SyncPolicy {
                    mode,
                    staleness_secs: 0,
                },
            });
            (fixture, server)
        });
        let handle = ServerHandle::spawn(config).unwrap();
        let agent = ureq::Agent::new_with_config(
            ureq::Agent::config_builder()
                .http_status_as_error(false)
                .timeout_global(Some(Duration::from_secs(30)))
                .build(),
        );
        TestServer {
            handle,
            cad,
            agent,
            _dir: dir,
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.handle.base_url())
    }

    /// Sends a request and returns the status and the JSON body (`Null`
    /// when empty or not JSON).
    pub fn call(&self, method: &str, path: &str, token: Option<&str>, body: Option<&Value>) -> (u16, Value) {
        self.call_with(method, path, token, body, &[])
    }

    pub fn call_with(
        &self,
        method: &str,
        path: &str,
        token: Option<&str>,
        body: Option<&Value>,
        headers: &[(&str, &str)],
    ) -> (u16, Value) {
        let (status, _, text) = self.raw(
            method,
            path,
            token,
            body.map(|b| ("application/json", b.to_string())),
            headers,
        );
        (status, serde_json::from_str(&text).unwrap_or(Value::Null))
    }

    /// Returns status, response headers and body text.
    pub fn raw(
        &self,
        method: &str,
        path: &str,
        token: Option<&str>,
        body: Option<(&str, String)>,
        headers: &[(&str, &str)],
    ) -> (u16, ureq::http::HeaderMap, String) {
        let mut req = ureq::http::Request::builder().method(method).uri(self.url(path));
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        for (k, v) in headers {
            req = req.header(*k, *v);
        }
        let bytes = match body {
            Some((ct, text)) => {
                req = req.header("content-type", ct);
                text.into_bytes()
            }
            None => Vec::new(),
        };
        let resp = self.agent.run(req.body(bytes).unwrap()).unwrap();
        let status = resp.status().as_u16();
        let headers = resp.headers().clone();
        let text = resp.into_body().read_to_string().unwrap_or_default();
        (status, headers, text)
    }
}
