//! CAD platform client over HTTP.
//!
//! `GET /documents`, `GET /documents/{id}/elements`,
//! `GET /export/{doc}/{elem}?format=..`; exports announce their digest in
//! `X-Content-SHA256`.

use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::Deserialize;
use url::Url;

use super::{CadClient, CadDocument, CadElement, CadError, ExportedBytes};
use crate::annotation::ModelFormat;

pub struct HttpCadClient {
    base: Url,
    token: Option<String>,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct DocumentJson {
    id: String,
    name: String,
    modified_at: DateTime<Utc>,
}

type Response = ureq::http::Response<ureq::Body>;

impl HttpCadClient {
    pub fn new(base_url: &str, token: Option<String>) -> Result<Self, CadError> {
        let mut base = Url::parse(base_url).map_err(|e| CadError::Protocol(format!("bad base URL: {e}")))?;
        if !base.path().ends_with('/') {
            base.set_path(&format!("{}/", base.path()));
        }
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(30)))
            .build();
        Ok(HttpCadClient {
            base,
            token,
            agent: ureq::Agent::new_with_config(config),
        })
    }

    fn get(&self, segments: &[&str], query: Option<(&str, &str)>) -> Result<Response, CadError> {
        let mut url = self.base.clone();
        url.path_segments_mut()
            .expect("http base")
            .pop_if_empty()
            .extend(segments);
        if let Some((k, v)) = query {
            url.query_pairs_mut().append_pair(k, v);
        }
        let mut req = self.agent.get(url.as_str());
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let resp = req.call().map_err(|e| match e {
            ureq::Error::Io(_)
            | ureq::Error::Timeout(_)
            | ureq::Error::HostNotFound
            | ureq::Error::ConnectionFailed => CadError::Network(e.to_string()),
            other => CadError::Protocol(other.to_string()),
        })?;
        match resp.status().as_u16() {
            200..=299 => Ok(resp),
            401 | 403 => Err(CadError::Auth),
            404 => Err(CadError::NotFound(segments.join("/"))),
            s => Err(CadError::Protocol(format!("HTTP {s} for {}", segments.join("/")))),
        }
    }

    fn json<T: serde::de::DeserializeOwned>(resp: Response) -> Result<T, CadError> {
        resp.into_body()
            .read_json()
            .map_err(|e| CadError::Protocol(e.to_string()))
    }
}

impl CadClient for HttpCadClient {
    fn list_documents(&self) -> Result<Vec<CadDocument>, CadError> {
        let docs: Vec<DocumentJson> = Self::json(self.get(&["documents"], None)?)?;
        docs.into_iter()
            .map(|d| {
                let elements: Vec<CadElement> = Self::json(self.get(&["documents", &d.id, "elements"], None)?)?;
                Ok(CadDocument {
                    id: d.id,
                    name: d.name,
                    modified_at: d.modified_at,
                    elements,
                })
            })
            .collect()
    }

    fn export(&self, document: &str, element: &str, format: ModelFormat) -> Result<ExportedBytes, CadError> {
        let resp = match self.get(&["export", document, element], Some(("format", format.extension()))) {
            Err(CadError::Protocol(msg)) if msg.starts_with("HTTP 415") => {
                return Err(CadError::UnsupportedFormat(format.to_string()))
            }
            other => other?,
        };
        let announced_sha256 = resp
            .headers()
            .get("x-content-sha256")
            .and_then(|v| v.to_str().ok())
            .map(str::to_owned);
        let bytes = resp
            .into_body()
            .with_config()
            .limit(64 * 1024 * 1024)
            .read_to_vec()
            .map_err(|e| CadError::Network(e.to_string()))?;
        Ok(ExportedBytes {
            bytes,
            announced_sha256,
        })
    }
}
