//! Ontology-model configuration.
//!
//! A TOML file with the vocabulary knobs the ontology never states
//! explicitly:
//!
//! ```toml
//! parthood_properties = ["eo:hasComponent", "eo:hasSubcomponent"]
//! visible_property = "app:visible"
//! related_to_property = "app:relatedTo"
//! measure_property = "eo:hasQuantity"
//!
//! [prefixes]
//! ex = "http://example.org/"
//! ```
//!
//! Values may be absolute IRIs or prefixed names; prefixed names resolve
//! against the catalogue defaults plus the `[prefixes]` table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::rdf::vocab::{app, extruont};
use crate::rdf::PrefixMap;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid ontology config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("'{0}' is neither an absolute IRI nor a known prefixed name")]
    Unresolved(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyConfig {
    pub parthood_properties: Vec<String>,
    pub visible_property: String,
    pub related_to_property: String,
    pub measure_property: String,
    pub prefixes: PrefixMap,
}

impl Default for OntologyConfig {
    fn default() -> Self {
        OntologyConfig {
            parthood_properties: vec![
                extruont::HAS_COMPONENT.to_owned(),
                extruont::HAS_SUBCOMPONENT.to_owned(),
            ],
            visible_property: app::VISIBLE.to_owned(),
            related_to_property: app::RELATED_TO.to_owned(),
            measure_property: extruont::HAS_QUANTITY.to_owned(),
            prefixes: PrefixMap::catalogue_defaults(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    parthood_properties: Option<Vec<String>>,
    visible_property: Option<String>,
    related_to_property: Option<String>,
    measure_property: Option<String>,
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
}

impl OntologyConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let mut config = OntologyConfig::default();
        for (prefix, ns) in raw.prefixes {
            config.prefixes.insert(prefix, ns);
        }
        let resolve = |value: String| resolve_iri(&config.prefixes, &value);
        if let Some(props) = raw.parthood_properties {
            config.parthood_properties = props.into_iter().map(resolve).collect::<Result<_, _>>()?;
        }
        if let Some(v) = raw.visible_property {
            config.visible_property = resolve(v)?;
        }
        if let Some(v) = raw.related_to_property {
            config.related_to_property = resolve(v)?;
        }
        if let Some(v) = raw.measure_property {
            config.measure_property = resolve(v)?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Expands a prefixed name with the configured prefixes; absolute IRIs
    /// pass through.
    pub fn resolve(&self, value: &str) -> Result<String, ConfigError> {
        resolve_iri(&self.prefixes, value)
    }
}

/// Accepts `scheme:...` absolute IRIs (optionally in angle brackets) and
/// prefixed names known to `prefixes`. A prefix binding wins over a scheme
/// reading, so `eo:Motor` expands even though `eo` looks like a scheme.
pub fn resolve_iri(prefixes: &PrefixMap, value: &str) -> Result<String, ConfigError> {
    let value = value.trim();
    if let Some(inner) = value.strip_prefix('<').and_then(|v| v.strip_suffix('>')) {
        return Ok(inner.to_owned());
    }
    if let Some(expanded) = prefixes.expand_curie(value) {
        return Ok(expanded);
    }
    if crate::rdf::turtle::has_scheme(value) && (value.contains("://") || value.starts_with("urn:")) {
        return Ok(value.to_owned());
    }
    Err(ConfigError::Unresolved(value.to_owned()))
}
