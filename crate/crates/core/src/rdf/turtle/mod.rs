mod parser;
mod serializer;

pub(crate) use parser::has_scheme;
pub use parser::{parse_turtle, parse_turtle_with_prefixes, TurtleDocument, TurtleError, TurtleErrorKind};
pub use serializer::{serialize_turtle, BlankLabels};
