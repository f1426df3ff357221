//! IRDI (eCl@ss-style classification code) mapping.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ontology::{resolve_iri, Direction, Ontology};
use crate::rdf::vocab::app;
use crate::rdf::{iri, Literal, PrefixMap, Term, Triple};

#[derive(Debug, thiserror::Error)]
pub enum IrdiError {
    #[error("cannot read IRDI mapping {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed IRDI mapping at line {line}: {message}")]
    Malformed { line: u64, message: String },
}

/// Which class supplied the code for a lookup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrdiMatch {
    pub irdi: String,
    pub class: String,
    /// The code came from a superclass rather than the class itself.
    pub inherited: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IrdiMapping {
    by_class: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Row {
    class_iri: String,
    irdi: String,
}

impl IrdiMapping {
    /// Parses CSV with a `class_iri,irdi` header. Class IRIs may use the
    /// catalogue prefixes.
    pub fn from_csv(text: &str) -> Result<Self, IrdiError> {
        let prefixes = PrefixMap::catalogue_defaults();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| malformed(1, e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["class_iri", "irdi"] {
            return Err(IrdiError::Malformed {
                line: 1,
                message: format!(
                    "expected header 'class_iri,irdi', got '{}'",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let mut by_class = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| malformed(e.position().map_or(0, |p| p.line()), e))?;
            let line = record.position().map_or(0, |p| p.line());
            let row: Row = record.deserialize(Some(&headers)).map_err(|e| malformed(line, e))?;
            if row.irdi.is_empty() {
                return Err(IrdiError::Malformed {
                    line,
                    message: "empty irdi".into(),
                });
            }
            let class = resolve_iri(&prefixes, &row.class_iri).map_err(|e| malformed(line, e))?;
            if by_class.insert(class.clone(), row.irdi).is_some() {
                return Err(IrdiError::Malformed {
                    line,
                    message: format!("duplicate class {class}"),
                });
            }
        }
        Ok(IrdiMapping { by_class })
    }

    pub fn load(path: &Path) -> Result<Self, IrdiError> {
        let text = std::fs::read_to_string(path).map_err(|source| IrdiError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv(&text)
    }

    pub fn len(&self) -> usize {
        self.by_class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_class.is_empty()
    }

    pub fn get(&self, class: &str) -> Option<&str> {
        self.by_class.get(class).map(String::as_str)
    }

    /// The class's own code, else the nearest mapped superclass in BFS
    /// order.
    pub fn lookup(&self, ontology: &Ontology, class: &str) -> Option<IrdiMatch> {
        let up = ontology
            .subclass_closure(class, Direction::Up)
            .unwrap_or_else(|_| vec![class.to_owned()]);
        up.into_iter().enumerate().find_map(|(i, c)| {
            self.get(&c).map(|code| IrdiMatch {
                irdi: code.to_owned(),
                inherited: i > 0,
                class: c,
            })
        })
    }

    /// One `app:irdi` triple on `instance` when the class or a superclass
    /// is mapped; none otherwise.
    pub fn enrich_with_irdi(
        &self,
        ontology: &Ontology,
        class: &str,
        instance: &Term,
    ) -> (Vec<Triple>, Option<IrdiMatch>) {
        match self.lookup(ontology, class) {
            Some(m) => {
                if m.inherited {
                    log::info!("{class}: using IRDI {} inherited from {}", m.irdi, m.class);
                }
                let t = Triple::new(instance.clone(), iri(app::IRDI), Literal::string(&m.irdi));
                (vec![t], Some(m))
            }
            None => {
                log::info!("{class}: no IRDI mapping for the class or its superclasses");
                (Vec::new(), None)
            }
        }
    }
}

fn malformed(line: u64, e: impl std::fmt::Display) -> IrdiError {
    IrdiError::Malformed {
        line,
        message: e.to_string(),
    }
}

/// The bundled mapping file.
pub const BUNDLED_IRDI: &str = include_str!("../../data/irdi.csv");
