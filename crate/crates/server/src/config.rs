//! Server configuration.
//!
//! ```toml
//! port = 8080
//! data_dir = "var"
//! allowed_origins = ["http://localhost:5173"]
//! seed_demo = false
//!
//! [ontology]
//! path = "ontology.ttl"          # bundled mini-ExtruOnt when absent
//! config = "ontology.toml"
//!
//! [stock]
//! url = "http://localhost:9100"  # in-process mock when absent
//!
//! [cad]
//! url = "http://localhost:9200"
//! token = "secret"
//! mode = "scheduled"
//! interval_secs = 600
//!
//! [[tokens]]
//! token = "admin-secret"
//! role = "admin"
//! user = "alice"
//!
//! [[tokens]]
//! token = "customer-secret"
//! role = "customer"
//! user = "bob"
//! customer = "C001"
//! ```
//!
//! `EXTRUCAT_PORT`, `EXTRUCAT_DATA_DIR` and `EXTRUCAT_ADMIN_TOKEN` override
//! the file; the admin token is added to the table as user `admin`.

use std::path::{Path, PathBuf};

use extrucat_core::cad::SyncPolicy;
use serde::{Deserialize, Serialize};

use crate::auth::Role;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid server config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid server config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    #[serde(default = "default_bind")]
    pub bind: String,
    #[serde(default = "default_port")]
    pub port: u16,
    #[serde(default = "default_data_dir")]
    pub data_dir: PathBuf,
    /// Browser origins allowed to call the API. Requests carrying any
    /// other `Origin` header are rejected.
    #[serde(default)]
    pub allowed_origins: Vec<String>,
    /// Seed the demo extruders, solutions and customers at startup.
    #[serde(default)]
    pub seed_demo: bool,
    #[serde(default)]
    pub ontology: OntologySection,
    #[serde(default)]
    pub stock: StockSection,
    #[serde(default)]
    pub cad: Option<CadSection>,
    #[serde(default)]
    pub tokens: Vec<TokenEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologySection {
    pub path: Option<PathBuf>,
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StockSection {
    pub url: Option<String>,
    /// Stock tables for the in-process mock.
    pub fixture: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CadSection {
    pub url: String,
    #[serde(default)]
    pub token: Option<String>,
    #[serde(flatten)]
    pub policy: SyncPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenEntry {
    pub token: String,
    pub role: Role,
    pub user: String,
    #[serde(default)]
    pub customer: Option<String>,
}

fn default_bind() -> String {
    "127.0.0.1".into()
}

fn default_port() -> u16 {
    8080
}

fn default_data_dir() -> PathBuf {
    PathBuf::from("var")
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind: default_bind(),
            port: default_port(),
            data_dir: default_data_dir(),
            allowed_origins: Vec::new(),
            seed_demo: false,
            ontology: OntologySection::default(),
            stock: StockSection::default(),
            cad: None,
            tokens: Vec::new(),
        }
    }
}

impl ServerConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ServerConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Applies `EXTRUCAT_PORT`, `EXTRUCAT_DATA_DIR` and
    /// `EXTRUCAT_ADMIN_TOKEN` from `vars`.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        for (key, value) in vars {
            let value = value.into();
            match key.as_ref() {
                "EXTRUCAT_PORT" => {
                    self.port = value
                        .parse()
                        .map_err(|_| ConfigError::Invalid(format!("EXTRUCAT_PORT={value} is not a port")))?;
                }
                "EXTRUCAT_DATA_DIR" => self.data_dir = PathBuf::from(value),
                "EXTRUCAT_ADMIN_TOKEN" => {
                    self.tokens.retain(|t| t.user != "admin");
                    self.tokens.push(TokenEntry {
                        token: value,
                        role: Role::Admin,
                        user: "admin".into(),
                        customer: None,
                    });
                }
                _ => {}
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for t in &self.tokens {
            if t.token.is_empty() {
                return Err(ConfigError::Invalid(format!("empty token for user {}", t.user)));
            }
            if t.role == Role::Customer && t.customer.is_none() {
                return Err(ConfigError::Invalid(format!(
                    "customer token for {} names no customer",
                    t.user
                )));
            }
            if t.role == Role::Anonymous {
                return Err(ConfigError::Invalid(format!(
                    "token for {} cannot be anonymous",
                    t.user
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = self.tokens.iter().find(|t| !seen.insert(&t.token)) {
            return Err(ConfigError::Invalid(format!("token of {} is listed twice", dup.user)));
        }
        if let Some(cad) = &self.cad {
            cad.policy.validate().map_err(ConfigError::Invalid)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use extrucat_core::cad::SyncMode;

    const SAMPLE: &str = r#"
        port = 9000
        data_dir = "/tmp/x"
        allowed_origins = ["http://localhost:5173"]

        [cad]
        url = "http://localhost:9200"
        token = "t"
        mode = "scheduled"
        interval_secs = 60

        [[tokens]]
        token = "a"
        role = "admin"
        user = "alice"

        [[tokens]]
        token = "c"
        role = "customer"
        user = "bob"
        customer = "C001"
    "#;

    #[test]
    fn parses_the_sample() {
        let c = ServerConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.port, 9000);
        assert_eq!(c.cad.unwrap().policy.mode, SyncMode::Scheduled { interval_secs: 60 });
        assert_eq!(c.tokens.len(), 2);
    }

    #[test]
    fn env_overrides() {
        let mut c = ServerConfig::from_toml(SAMPLE).unwrap();
        c.apply_env([
            ("EXTRUCAT_PORT", "7000"),
            ("EXTRUCAT_DATA_DIR", "/data"),
            ("EXTRUCAT_ADMIN_TOKEN", "root"),
            ("HOME", "/x"),
        ])
        .unwrap();
        assert_eq!(c.port, 7000);
        assert_eq!(c.data_dir, PathBuf::from("/data"));
        assert!(c.tokens.iter().any(|t| t.token == "root" && t.role == Role::Admin));
        assert!(c.apply_env([("EXTRUCAT_PORT", "http")]).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let no_customer = "[[tokens]]\ntoken = \"c\"\nrole = \"customer\"\nuser = \"bob\"\n";
        assert!(ServerConfig::from_toml(no_customer).is_err());
        let zero = "[cad]\nurl = \"http://x\"\nmode = \"scheduled\"\ninterval_secs = 0\n";
        assert!(ServerConfig::from_toml(zero).is_err());
        assert!(ServerConfig::from_toml("prot = 1").is_err());
    }
}
