//! Knowledge store, query engine and product services for a semantic
//! extruder catalogue.

pub mod annotation;
pub mod assets;
pub mod cad;
pub mod catalogue;
pub mod ontology;
pub mod persist;
pub mod rdf;
pub mod seed;
pub mod sparql;
pub mod technician;

/// The bundled mini-ExtruOnt ontology (Turtle).
pub const MINI_EXTRUONT: &str = include_str!("../data/mini-extruont.ttl");
