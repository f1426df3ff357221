//! SPARQL 1.1 query results JSON format.

use serde_json::{json, Map, Value};

use super::eval::Solution;
use crate::rdf::vocab::xsd;
use crate::rdf::Term;

pub fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({"type": "uri", "value": iri}),
        Term::BlankNode(id) => json!({"type": "bnode", "value": id}),
        Term::Literal(lit) => {
            let mut obj = Map::new();
            obj.insert("type".into(), "literal".into());
            obj.insert("value".into(), lit.lexical().into());
            if let Some(lang) = lit.language() {
                obj.insert("xml:lang".into(), lang.into());
            } else if lit.datatype() != xsd::STRING {
                obj.insert("datatype".into(), lit.datatype().into());
            }
            Value::Object(obj)
        }
    }
}

impl Solution {
    pub fn to_sparql_json(&self) -> Value {
        let bindings: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(row.iter().map(|(k, v)| (k.clone(), term_json(v))).collect()))
            .collect();
        json!({
            "head": {"vars": self.vars},
            "results": {"bindings": bindings},
        })
    }
}
