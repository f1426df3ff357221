use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::rdf::term::escape_string;
use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{PrefixMap, Term, Triple};

/// How blank node labels are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlankLabels {
    /// `_:b0`, `_:b1`, ... in order of first appearance.
    #[default]
    Rename,
    /// Keep the labels used by the store. Only valid for labels that are
    /// legal Turtle, which store-minted labels always are.
    Preserve,
}

/// Serializes triples as Turtle, grouping by subject and predicate.
/// Output is deterministic for a given triple set.
pub fn serialize_turtle<'a>(
    triples: impl IntoIterator<Item = &'a Triple>,
    prefixes: &PrefixMap,
    labels: BlankLabels,
) -> String {
    let mut by_subject: BTreeMap<&Term, BTreeMap<&Term, Vec<&Term>>> = BTreeMap::new();
    for t in triples {
        by_subject
            .entry(&t.subject)
            .or_default()
            .entry(&t.predicate)
            .or_default()
            .push(&t.object);
    }

    let mut out = String::new();
    for (prefix, ns) in prefixes.iter() {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    if !by_subject.is_empty() && !prefixes.is_empty() {
        out.push('\n');
    }

    let mut writer = TermWriter {
        prefixes,
        labels,
        renamed: HashMap::new(),
    };
    for (subject, predicates) in by_subject {
        writer.write(&mut out, subject);
        let mut first_predicate = true;
        for (predicate, mut objects) in predicates {
            objects.sort();
            objects.dedup();
            if first_predicate {
                out.push(' ');
                first_predicate = false;
            } else {
                out.push_str(" ;\n    ");
            }
            if predicate.as_iri() == Some(rdf::TYPE) {
                out.push('a');
            } else {
                writer.write(&mut out, predicate);
            }
            for (i, object) in objects.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { ", " });
                writer.write(&mut out, object);
            }
        }
        out.push_str(" .\n");
    }
    out
}

struct TermWriter<'p> {
    prefixes: &'p PrefixMap,
    labels: BlankLabels,
    renamed: HashMap<String, String>,
}

impl TermWriter<'_> {
    fn write(&mut self, out: &mut String, term: &Term) {
        match term {
            Term::Iri(iri) => self.write_iri(out, iri),
            Term::BlankNode(id) => {
                let label = match self.labels {
                    BlankLabels::Preserve => id.clone(),
                    BlankLabels::Rename => {
                        let next = self.renamed.len();
                        self.renamed
                            .entry(id.clone())
                            .or_insert_with(|| format!("b{next}"))
                            .clone()
                    }
                };
                let _ = write!(out, "_:{label}");
            }
            Term::Literal(lit) => {
                out.push('"');
                let _ = escape_string(lit.lexical(), out);
                out.push('"');
                if let Some(lang) = lit.language() {
                    let _ = write!(out, "@{lang}");
                } else if lit.datatype() != xsd::STRING {
                    out.push_str("^^");
                    self.write_iri(out, lit.datatype());
                }
            }
        }
    }

    fn write_iri(&self, out: &mut String, iri: &str) {
        match self.prefixes.shrink(iri) {
            Some((prefix, local)) => {
                let _ = write!(out, "{prefix}:{local}");
            }
            None => {
                out.push('<');
                for c in iri.chars() {
                    match c {
                        '>' | '\\' | '"' | '{' | '}' | '|' | '^' | '`' | '<' => {
                            let _ = write!(out, "\\u{:04X}", c as u32);
                        }
                        c if (c as u32) <= 0x20 => {
                            let _ = write!(out, "\\u{:04X}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('>');
            }
        }
    }
}
