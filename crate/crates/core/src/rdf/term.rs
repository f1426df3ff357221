//! RDF terms and triples.

use std::fmt;

use super::vocab::{rdf, xsd};

/// An RDF term: IRI, blank node or literal.
///
/// Equality is structural. Blank node identifiers are only meaningful inside
/// the store (or document) that minted them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: String,
    language: Option<String>,
}

impl Literal {
    /// Plain `xsd:string` literal.
    pub fn string(value: impl Into<String>) -> Self {
        Literal {
            lexical: value.into(),
            datatype: xsd::STRING.to_owned(),
            language: None,
        }
    }

    /// Language-tagged string. The datatype is always `rdf:langString`.
    pub fn lang(value: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: value.into(),
            datatype: rdf::LANG_STRING.to_owned(),
            language: Some(language.into().to_ascii_lowercase()),
        }
    }

    /// Typed literal. Passing `rdf:langString` without a tag is rejected by
    /// falling back to `xsd:string`, since a lang string without a tag is
    /// not a valid literal.
    pub fn typed(value: impl Into<String>, datatype: impl Into<String>) -> Self {
        let mut datatype = datatype.into();
        if datatype == rdf::LANG_STRING {
            datatype = xsd::STRING.to_owned();
        }
        Literal {
            lexical: value.into(),
            datatype,
            language: None,
        }
    }

    pub fn double(value: f64) -> Self {
        Literal::typed(format_double(value), xsd::DOUBLE)
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), xsd::INTEGER)
    }

    pub fn boolean(value: bool) -> Self {
        Literal::typed(value.to_string(), xsd::BOOLEAN)
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &str {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Numeric value for literals of an XSD numeric datatype.
    pub fn as_f64(&self) -> Option<f64> {
        if !xsd::is_numeric(&self.datatype) {
            return None;
        }
        let lexical = self.lexical.trim();
        match lexical {
            "INF" | "+INF" => Some(f64::INFINITY),
            "-INF" => Some(f64::NEG_INFINITY),
            _ => lexical.parse::<f64>().ok().filter(|v| !v.is_nan()),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        if self.datatype != xsd::BOOLEAN {
            return None;
        }
        match self.lexical.as_str() {
            "true" | "1" => Some(true),
            "false" | "0" => Some(false),
            _ => None,
        }
    }

    /// True for `xsd:string` and language-tagged strings.
    pub fn is_string(&self) -> bool {
        self.datatype == xsd::STRING || self.datatype == rdf::LANG_STRING
    }
}

/// Formats a double so that it re-parses to the same value and never uses
/// an exponent for ordinary magnitudes.
pub fn format_double(value: f64) -> String {
    if value.is_nan() {
        "NaN".to_owned()
    } else if value.is_infinite() {
        if value > 0.0 { "INF" } else { "-INF" }.to_owned()
    } else {
        format!("{value}")
    }
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn blank(id: impl Into<String>) -> Self {
        Term::BlankNode(id.into())
    }

    pub fn literal(literal: Literal) -> Self {
        Term::Literal(literal)
    }

    pub fn string(value: impl Into<String>) -> Self {
        Term::Literal(Literal::string(value))
    }

    pub fn double(value: f64) -> Self {
        Term::Literal(Literal::double(value))
    }

    pub fn boolean(value: bool) -> Self {
        Term::Literal(Literal::boolean(value))
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.as_literal().and_then(Literal::as_f64)
    }

    pub fn as_bool(&self) -> Option<bool> {
        self.as_literal().and_then(Literal::as_bool)
    }

    /// Lexical form of a literal, or the IRI / blank id otherwise.
    pub fn value_str(&self) -> &str {
        match self {
            Term::Iri(iri) => iri,
            Term::BlankNode(id) => id,
            Term::Literal(lit) => lit.lexical(),
        }
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl From<&Term> for Term {
    fn from(term: &Term) -> Self {
        term.clone()
    }
}

/// Escapes a string for a double-quoted Turtle / N-Triples literal.
pub(crate) fn escape_string(value: &str, out: &mut impl fmt::Write) -> fmt::Result {
    for c in value.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            '\u{8}' => out.write_str("\\b")?,
            '\u{c}' => out.write_str("\\f")?,
            c if (c as u32) < 0x20 || c == '\u{7f}' => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

/// N-Triples style rendering.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::BlankNode(id) => write!(f, "_:{id}"),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        escape_string(&self.lexical, f)?;
        f.write_str("\"")?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if self.datatype != xsd::STRING {
            write!(f, "^^<{}>", self.datatype)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TripleError {
    #[error("triple subject must be an IRI or blank node, got {0}")]
    LiteralSubject(Term),
    #[error("triple predicate must be an IRI, got {0}")]
    NonIriPredicate(Term),
}

impl Triple {
    /// Builds a triple, panicking on a literal subject or non-IRI predicate.
    /// Use [`Triple::try_new`] for untrusted input.
    pub fn new(subject: impl Into<Term>, predicate: impl Into<Term>, object: impl Into<Term>) -> Self {
        match Triple::try_new(subject, predicate, object) {
            Ok(t) => t,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(
        subject: impl Into<Term>,
        predicate: impl Into<Term>,
        object: impl Into<Term>,
    ) -> Result<Self, TripleError> {
        let subject = subject.into();
        let predicate = predicate.into();
        if subject.is_literal() {
            return Err(TripleError::LiteralSubject(subject));
        }
        if !predicate.is_iri() {
            return Err(TripleError::NonIriPredicate(predicate));
        }
        Ok(Triple {
            subject,
            predicate,
            object: object.into(),
        })
    }

    pub fn validate(&self) -> Result<(), TripleError> {
        if self.subject.is_literal() {
            return Err(TripleError::LiteralSubject(self.subject.clone()));
        }
        if !self.predicate.is_iri() {
            return Err(TripleError::NonIriPredicate(self.predicate.clone()));
        }
        Ok(())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Shorthand for an IRI term.
pub fn iri(value: impl Into<String>) -> Term {
    Term::Iri(value.into())
}
