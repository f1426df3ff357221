use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::vocab;

/// Prefix to namespace IRI map.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrefixMap {
    map: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// rdf, rdfs, owl and xsd.
    pub fn well_known() -> Self {
        let mut map = PrefixMap::new();
        map.insert("rdf", vocab::rdf::NS);
        map.insert("rdfs", vocab::rdfs::NS);
        map.insert("owl", vocab::owl::NS);
        map.insert("xsd", vocab::xsd::NS);
        map
    }

    /// Well-known prefixes plus the catalogue's domain vocabularies.
    pub fn catalogue_defaults() -> Self {
        let mut map = PrefixMap::well_known();
        map.insert("dcterms", vocab::dcterms::NS);
        map.insert("om", vocab::om::NS);
        map.insert("s4inma", vocab::s4inma::NS);
        map.insert("eo", vocab::extruont::NS);
        map.insert("app", vocab::app::NS);
        map.insert("", vocab::extruont::INSTANCES);
        map
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(prefix.into(), namespace.into());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// Expands `prefix:local`; returns `None` when the prefix is unknown or
    /// the text has no colon.
    pub fn expand_curie(&self, curie: &str) -> Option<String> {
        let (prefix, local) = curie.split_once(':')?;
        self.expand(prefix, local)
    }

    /// Longest-namespace match whose remainder is a safe local name.
    pub fn shrink(&self, iri: &str) -> Option<(&str, String)> {
        self.map
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && iri.starts_with(ns.as_str()))
            .filter(|(_, ns)| is_safe_local(&iri[ns.len()..]))
            .max_by_key(|(_, ns)| ns.len())
            .map(|(prefix, ns)| (prefix.as_str(), iri[ns.len()..].to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Adds every entry of `other` whose prefix is not yet bound.
    pub fn merge_missing(&mut self, other: &PrefixMap) {
        for (k, v) in other.iter() {
            self.map.entry(k.to_owned()).or_insert_with(|| v.to_owned());
        }
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for PrefixMap {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        PrefixMap {
            map: iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

/// Conservative subset of Turtle's PN_LOCAL that never needs escaping.
fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            local
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !local.ends_with('.')
        }
        _ => false,
    }
}
