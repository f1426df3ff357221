//! RDF data model, Turtle syntax and the indexed triple store.

pub mod iso;
mod prefixes;
mod store;
mod term;
pub mod turtle;
pub mod vocab;

pub use prefixes::PrefixMap;
pub use store::{Batch, Graph, Snapshot, Store, StoreError, TermId};
pub use term::{format_double, iri, Literal, Term, Triple, TripleError};
