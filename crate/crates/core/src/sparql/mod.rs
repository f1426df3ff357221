//! SPARQL subset: parsing, evaluation, a brute-force oracle, and query
//! templates.

mod ast;
mod eval;
mod filter;
mod oracle;
mod parser;
mod results;
pub mod template;

pub use ast::{CompareOp, Expr, Path, PredicatePattern, Query, Selection, TermPattern, TriplePattern, Var};
pub use eval::{evaluate, Row, Solution};
pub use oracle::{evaluate_oracle, OracleError, ORACLE_MAX_TRIPLES};
pub use parser::{parse_expression, parse_query, parse_query_with_prefixes, QueryError, QueryErrorKind};
pub use results::term_json;
pub use template::{bind_template, Substitution, TemplateError, TemplateRegistry};

/// The batch-size competency query, verbatim. It relies on the default
/// `rdfs:` prefix.
pub const BATCH_SIZE_QUERY: &str = include_str!("../../data/batch-size.rq");
