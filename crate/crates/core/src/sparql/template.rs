//! Named query templates with `{{NAME}}` placeholders.
//!
//! `{{FILTERS}}` is the filter slot: its substitution is parsed with the
//! expression grammar and appended to the query's filters. Every other
//! placeholder is a term slot, replaced in the parsed AST. Substituted text
//! never reaches the query parser as raw query text.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use super::ast::{Query, Var};
use super::parser::{parse_expression, parse_query_with_prefixes, QueryError};
use crate::rdf::{PrefixMap, Term};

pub const FILTERS: &str = "FILTERS";

const BUILTIN: &[(&str, &str)] = &[
    ("allExtrudersList", include_str!("../../queries/allExtrudersList.rq")),
    ("partsByExtruderId", include_str!("../../queries/partsByExtruderId.rq")),
    ("propertiesById", include_str!("../../queries/propertiesById.rq")),
    ("modelsById", include_str!("../../queries/modelsById.rq")),
    ("BasicSearchQuery", include_str!("../../queries/BasicSearchQuery.rq")),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Substitution {
    Term(Term),
    /// A filter expression; empty or blank means no constraint.
    Filter(String),
}

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("unknown query template '{0}'")]
    UnknownTemplate(String),
    #[error("template '{template}' has no placeholder '{placeholder}'")]
    UnknownPlaceholder { template: String, placeholder: String },
    #[error("template '{template}' needs a substitution for '{placeholder}'")]
    MissingSubstitution { template: String, placeholder: String },
    #[error("placeholder '{placeholder}' expects a {expected}")]
    WrongKind {
        placeholder: String,
        expected: &'static str,
    },
    #[error("rejected filter fragment: {0}")]
    Fragment(#[source] QueryError),
    #[error("template '{template}' does not parse: {source}")]
    Invalid {
        template: String,
        #[source]
        source: QueryError,
    },
    #[error("cannot read templates from {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct Template {
    pub id: String,
    pub text: String,
    pub placeholders: BTreeSet<String>,
}

fn placeholder_var(name: &str) -> Var {
    Var(format!("__tpl_{name}"))
}

impl Template {
    fn new(id: &str, text: &str, defaults: &PrefixMap) -> Result<Self, TemplateError> {
        let mut placeholders = BTreeSet::new();
        let mut rest = text;
        while let Some(start) = rest.find("{{") {
            let after = &rest[start + 2..];
            let Some(end) = after.find("}}") else { break };
            placeholders.insert(after[..end].trim().to_owned());
            rest = &after[end + 2..];
        }
        let template = Template {
            id: id.to_owned(),
            text: text.to_owned(),
            placeholders,
        };
        template.parse_skeleton(defaults)?;
        Ok(template)
    }

    /// Parses the template with term slots as variables and the filter slot
    /// removed.
    fn parse_skeleton(&self, defaults: &PrefixMap) -> Result<Query, TemplateError> {
        let mut text = self.text.clone();
        for name in &self.placeholders {
            let replacement = if name == FILTERS {
                String::new()
            } else {
                placeholder_var(name).to_string()
            };
            text = text.replace(&format!("{{{{{name}}}}}"), &replacement);
        }
        parse_query_with_prefixes(&text, defaults).map_err(|source| TemplateError::Invalid {
            template: self.id.clone(),
            source,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TemplateRegistry {
    templates: BTreeMap<String, Template>,
    defaults: PrefixMap,
}

impl TemplateRegistry {
    pub fn empty() -> Self {
        TemplateRegistry {
            templates: BTreeMap::new(),
            defaults: PrefixMap::well_known(),
        }
    }

    /// The templates bundled with the crate.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        for (id, text) in BUILTIN {
            reg.insert(id, text).expect("bundled templates parse");
        }
        reg
    }

    /// Loads every `*.rq` file in `dir`; the file stem is the template id.
    pub fn from_dir(dir: &Path) -> Result<Self, TemplateError> {
        let io = |source| TemplateError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut reg = Self::empty();
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .collect::<Result<_, _>>()
            .map_err(io)?;
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("rq") {
                continue;
            }
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
            let text = std::fs::read_to_string(&path).map_err(io)?;
            reg.insert(&id, &text)?;
        }
        Ok(reg)
    }

    pub fn insert(&mut self, id: &str, text: &str) -> Result<(), TemplateError> {
        let template = Template::new(id, text, &self.defaults)?;
        self.templates.insert(id.to_owned(), template);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.templates.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    pub fn bind(&self, id: &str, substitutions: &BTreeMap<String, Substitution>) -> Result<Query, TemplateError> {
        let template = self
            .templates
            .get(id)
            .ok_or_else(|| TemplateError::UnknownTemplate(id.to_owned()))?;
        for name in substitutions.keys() {
            if !template.placeholders.contains(name) {
                return Err(TemplateError::UnknownPlaceholder {
                    template: id.to_owned(),
                    placeholder: name.clone(),
                });
            }
        }
        let mut query = template.parse_skeleton(&self.defaults)?;
        for name in &template.placeholders {
            let sub = substitutions
                .get(name)
                .ok_or_else(|| TemplateError::MissingSubstitution {
                    template: id.to_owned(),
                    placeholder: name.clone(),
                })?;
            match (name.as_str(), sub) {
                (FILTERS, Substitution::Filter(fragment)) => {
                    if !fragment.trim().is_empty() {
                        let expr = parse_expression(fragment, &query.prefixes).map_err(TemplateError::Fragment)?;
                        query.filters.push(expr);
                    }
                }
                (FILTERS, Substitution::Term(_)) => {
                    return Err(TemplateError::WrongKind {
                        placeholder: name.clone(),
                        expected: "filter expression",
                    })
                }
                (_, Substitution::Term(term)) => query.substitute(&placeholder_var(name), term),
                (_, Substitution::Filter(_)) => {
                    return Err(TemplateError::WrongKind {
                        placeholder: name.clone(),
                        expected: "term",
                    })
                }
            }
        }
        Ok(query)
    }
}

/// Binds a bundled template.
pub fn bind_template(id: &str, substitutions: &BTreeMap<String, Substitution>) -> Result<Query, TemplateError> {
    static REGISTRY: OnceLock<TemplateRegistry> = OnceLock::new();
    REGISTRY.get_or_init(TemplateRegistry::builtin).bind(id, substitutions)
}

/// Convenience for a single term placeholder.
pub fn bind_term(id: &str, placeholder: &str, term: Term) -> Result<Query, TemplateError> {
    bind_template(
        id,
        &BTreeMap::from([(placeholder.to_owned(), Substitution::Term(term))]),
    )
}

/// Convenience for the filter slot.
pub fn bind_filters(id: &str, fragment: &str) -> Result<Query, TemplateError> {
    bind_template(
        id,
        &BTreeMap::from([(FILTERS.to_owned(), Substitution::Filter(fragment.to_owned()))]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparql::{parse_query, Selection};

    #[test]
    fn builtin_templates_load() {
        let reg = TemplateRegistry::builtin();
        assert_eq!(
            reg.ids().collect::<Vec<_>>(),
            [
                "BasicSearchQuery",
                "allExtrudersList",
                "modelsById",
                "partsByExtruderId",
                "propertiesById"
            ]
        );
        assert!(reg.get("allExtrudersList").unwrap().placeholders.is_empty());
        assert!(reg.get("BasicSearchQuery").unwrap().placeholders.contains(FILTERS));
    }

    #[test]
    fn catalogue_template_without_placeholders() {
        let q = bind_template("allExtrudersList", &BTreeMap::new()).unwrap();
        assert_eq!(q.patterns.len(), 6);
        assert!(matches!(q.selection, Selection::Vars(ref v) if v.len() == 6));
    }

    #[test]
    fn empty_filter_adds_nothing() {
        let q = bind_filters("BasicSearchQuery", "").unwrap();
        assert!(q.filters.is_empty());
        let q = bind_filters("BasicSearchQuery", "?bph >= 1250").unwrap();
        assert_eq!(q.filters.len(), 1);
    }

    #[test]
    fn term_substitution_happens_in_ast() {
        let e = Term::iri("http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/Extruder01#E01");
        let q = bind_term("partsByExtruderId", "EXTRUDER", e.clone()).unwrap();
        assert_eq!(q.patterns[0].subject, crate::sparql::TermPattern::Term(e));
        // A term whose text looks like query syntax stays a single term.
        let odd = Term::string("x } ?s ?p ?o {");
        let q = bind_term("partsByExtruderId", "EXTRUDER", odd.clone()).unwrap();
        assert_eq!(q.patterns[0].subject, crate::sparql::TermPattern::Term(odd));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            bind_template("nope", &BTreeMap::new()),
            Err(TemplateError::UnknownTemplate(_))
        ));
        let bogus = BTreeMap::from([("BOGUS".to_owned(), Substitution::Filter(String::new()))]);
        assert!(matches!(
            bind_template("allExtrudersList", &bogus),
            Err(TemplateError::UnknownPlaceholder { .. })
        ));
        assert!(matches!(
            bind_template("partsByExtruderId", &BTreeMap::new()),
            Err(TemplateError::MissingSubstitution { .. })
        ));
        for bad in [
            "?bph >= 1 } ?s ?p ?o {",
            "?a > ",
            "1) || (1",
            "?x = <http://a> . ?s ?p ?o",
        ] {
            assert!(
                matches!(bind_filters("BasicSearchQuery", bad), Err(TemplateError::Fragment(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn bound_queries_reparse() {
        for fragment in ["", "?bph >= 1250 && ?width <= 3", "!(?vmin > 2) || ?vmax < 0.5"] {
            let q = bind_filters("BasicSearchQuery", fragment).unwrap();
            let again = parse_query(&q.to_string()).unwrap();
            assert_eq!(q.patterns, again.patterns);
            assert_eq!(q.filters, again.filters);
        }
    }

    #[test]
    fn directory_registry() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("one.rq"), "SELECT ?s WHERE { ?s ?p {{O}} }").unwrap();
        std::fs::write(dir.path().join("ignored.txt"), "nope").unwrap();
        let reg = TemplateRegistry::from_dir(dir.path()).unwrap();
        assert_eq!(reg.ids().collect::<Vec<_>>(), ["one"]);
        std::fs::write(dir.path().join("broken.rq"), "SELECT WHERE").unwrap();
        assert!(matches!(
            TemplateRegistry::from_dir(dir.path()),
            Err(TemplateError::Invalid { .. })
        ));
    }
}
