//! Turtle parser.
//!
//! Supports prefix/base directives in both `@prefix` and SPARQL style,
//! predicate-object and object lists, `a`, blank node property lists,
//! collections, and string/numeric/boolean literals.

use std::fmt;

use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{Literal, PrefixMap, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TurtleErrorKind {
    Syntax(String),
    UndefinedPrefix(String),
    InvalidIri(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct TurtleError {
    pub line: usize,
    pub column: usize,
    pub kind: TurtleErrorKind,
}

impl fmt::Display for TurtleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TurtleErrorKind::Syntax(msg) => {
                write!(f, "syntax error at {}:{}: {msg}", self.line, self.column)
            }
            TurtleErrorKind::UndefinedPrefix(p) => {
                write!(f, "undefined prefix '{p}:' at {}:{}", self.line, self.column)
            }
            TurtleErrorKind::InvalidIri(iri) => {
                write!(f, "invalid IRI <{iri}> at {}:{}", self.line, self.column)
            }
        }
    }
}

/// Result of parsing a Turtle document.
#[derive(Debug, Clone, Default)]
pub struct TurtleDocument {
    pub triples: Vec<Triple>,
    pub prefixes: PrefixMap,
    pub base: Option<String>,
}

/// Parses a Turtle document.
///
/// Labelled blank nodes keep their label; anonymous nodes (`[]`, collection
/// cells) get labels containing `#`, which cannot clash with a label written
/// in the document.
pub fn parse_turtle(input: &str, base: Option<&str>) -> Result<TurtleDocument, TurtleError> {
    parse_turtle_with_prefixes(input, base, &PrefixMap::new())
}

/// Like [`parse_turtle`], with prefixes that are in scope before the first
/// directive.
pub fn parse_turtle_with_prefixes(
    input: &str,
    base: Option<&str>,
    prefixes: &PrefixMap,
) -> Result<TurtleDocument, TurtleError> {
    let mut parser = Parser {
        src: input.chars().collect(),
        pos: 0,
        prefixes: prefixes.clone(),
        declared: PrefixMap::new(),
        base: base.map(str::to_owned),
        triples: Vec::new(),
        anon: 0,
    };
    parser.document()?;
    Ok(TurtleDocument {
        triples: parser.triples,
        prefixes: parser.declared,
        base: parser.base,
    })
}

struct Parser {
    src: Vec<char>,
    pos: usize,
    prefixes: PrefixMap,
    declared: PrefixMap,
    base: Option<String>,
    triples: Vec<Triple>,
    anon: usize,
}

type PResult<T> = Result<T, TurtleError>;

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_'
}

fn is_pn_chars(c: char) -> bool {
    is_pn_chars_u(c) || c == '-' || c.is_numeric() || c == '\u{B7}'
}

pub(crate) fn has_scheme(iri: &str) -> bool {
    let mut chars = iri.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    for c in chars {
        if c == ':' {
            return true;
        }
        if !(c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
            return false;
        }
    }
    false
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn error_at(&self, pos: usize, kind: TurtleErrorKind) -> TurtleError {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.src[..pos.min(self.src.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        TurtleError { line, column, kind }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(self.error_at(self.pos, TurtleErrorKind::Syntax(msg.into())))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, expected: char) -> PResult<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.syntax(format!("expected '{expected}', found '{c}'")),
            None => self.syntax(format!("expected '{expected}', found end of input")),
        }
    }

    /// Case-insensitive keyword followed by a non-name character.
    fn at_keyword(&self, kw: &str) -> bool {
        let n = kw.len();
        if self.pos + n > self.src.len() {
            return false;
        }
        let word: String = self.src[self.pos..self.pos + n].iter().collect();
        if !word.eq_ignore_ascii_case(kw) {
            return false;
        }
        !matches!(self.peek_at(n), Some(c) if is_pn_chars(c) || c == ':')
    }

    fn fresh_blank(&mut self) -> Term {
        self.anon += 1;
        Term::BlankNode(format!("anon#{}", self.anon))
    }

    fn emit(&mut self, s: Term, p: Term, o: Term) {
        self.triples.push(Triple {
            subject: s,
            predicate: p,
            object: o,
        });
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> PResult<()> {
        if self.peek() == Some('@') {
            self.pos += 1;
            if self.at_keyword("prefix") {
                self.pos += 6;
                self.prefix_body()?;
            } else if self.at_keyword("base") {
                self.pos += 4;
                self.base_body()?;
            } else {
                return self.syntax("unknown directive");
            }
            return self.expect('.');
        }
        if self.at_keyword("PREFIX") {
            self.pos += 6;
            return self.prefix_body();
        }
        if self.at_keyword("BASE") {
            self.pos += 4;
            return self.base_body();
        }
        self.triples_statement()?;
        self.expect('.')
    }

    fn prefix_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let start = self.pos;
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_pn_chars(c) || c == '.' {
                prefix.push(c);
                self.pos += 1;
            } else {
                return self.syntax(format!("invalid character '{c}' in prefix name"));
            }
        }
        if self.peek() != Some(':') {
            return Err(self.error_at(start, TurtleErrorKind::Syntax("expected prefix name".into())));
        }
        self.pos += 1;
        self.skip_ws();
        let namespace = self.iri_ref()?;
        self.prefixes.insert(prefix.clone(), namespace.clone());
        self.declared.insert(prefix, namespace);
        Ok(())
    }

    fn base_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn triples_statement(&mut self) -> PResult<()> {
        self.skip_ws();
        if self.peek() == Some('[') {
            let subject = self.blank_node_property_list()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            Ok(())
        } else {
            let subject = self.subject()?;
            self.predicate_object_list(&subject)
        }
    }

    fn subject(&mut self) -> PResult<Term> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('(') => self.collection(),
            Some('"') | Some('\'') => self.syntax("a literal cannot be a subject"),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => self.syntax("a literal cannot be a subject"),
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => self.syntax("expected subject, found end of input"),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> PResult<()> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.pos += 1;
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Term> {
        self.skip_ws();
        if self.peek() == Some('a') && !matches!(self.peek_at(1), Some(c) if is_pn_chars(c) || c == ':' || c == '.') {
            self.pos += 1;
            return Ok(Term::iri(rdf::TYPE));
        }
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some(c) if c == ':' || is_pn_chars_base(c) => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => self.syntax(format!("expected predicate, found '{c}'")),
            None => self.syntax("expected predicate, found end of input"),
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Term) -> PResult<()> {
        loop {
            let object = self.object()?;
            self.emit(subject.clone(), predicate.clone(), object);
            self.skip_ws();
            if self.peek() == Some(',') {
                self.pos += 1;
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> PResult<Term> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('(') => self.collection(),
            Some('[') => self.blank_node_property_list(),
            Some('"') | Some('\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => self.numeric(),
            Some(_) if self.at_keyword("true") => {
                self.pos += 4;
                Ok(Term::Literal(Literal::boolean(true)))
            }
            Some(_) if self.at_keyword("false") => {
                self.pos += 5;
                Ok(Term::Literal(Literal::boolean(false)))
            }
            Some(c) if c == ':' || is_pn_chars_base(c) => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => self.syntax(format!("expected object, found '{c}'")),
            None => self.syntax("expected object, found end of input"),
        }
    }

    fn blank_label(&mut self) -> PResult<Term> {
        self.pos += 2;
        let mut label = String::new();
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {}
            _ => return self.syntax("invalid blank node label"),
        }
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || c == '.' {
                label.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        while label.ends_with('.') {
            label.pop();
            self.pos -= 1;
        }
        Ok(Term::BlankNode(label))
    }

    fn blank_node_property_list(&mut self) -> PResult<Term> {
        self.expect('[')?;
        let node = self.fresh_blank();
        self.skip_ws();
        if self.peek() != Some(']') {
            self.predicate_object_list(&node)?;
        }
        self.expect(']')?;
        Ok(node)
    }

    fn collection(&mut self) -> PResult<Term> {
        self.expect('(')?;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                None => return self.syntax("unterminated collection"),
                _ => items.push(self.object()?),
            }
        }
        if items.is_empty() {
            return Ok(Term::iri(rdf::NIL));
        }
        let cells: Vec<Term> = (0..items.len()).map(|_| self.fresh_blank()).collect();
        for (i, item) in items.into_iter().enumerate() {
            self.emit(cells[i].clone(), Term::iri(rdf::FIRST), item);
            let rest = cells.get(i + 1).cloned().unwrap_or_else(|| Term::iri(rdf::NIL));
            self.emit(cells[i].clone(), Term::iri(rdf::REST), rest);
        }
        Ok(cells[0].clone())
    }

    fn iri_ref(&mut self) -> PResult<String> {
        let start = self.pos;
        if self.bump() != Some('<') {
            return Err(self.error_at(start, TurtleErrorKind::Syntax("expected '<'".into())));
        }
        let mut raw = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => raw.push(self.hex_escape(4)?),
                    Some('U') => raw.push(self.hex_escape(8)?),
                    _ => return self.syntax("invalid escape in IRI"),
                },
                Some(c)
                    if c.is_whitespace()
                        || (c as u32) < 0x20
                        || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    return Err(self.error_at(self.pos - 1, TurtleErrorKind::InvalidIri(raw)));
                }
                Some(c) => raw.push(c),
                None => return self.syntax("unterminated IRI"),
            }
        }
        self.resolve(&raw, start)
    }

    fn resolve(&self, raw: &str, at: usize) -> PResult<String> {
        if has_scheme(raw) {
            return Ok(raw.to_owned());
        }
        let Some(base) = &self.base else {
            return Err(self.error_at(at, TurtleErrorKind::InvalidIri(raw.to_owned())));
        };
        url::Url::parse(base)
            .and_then(|b| b.join(raw))
            .map(|u| u.to_string())
            .map_err(|_| self.error_at(at, TurtleErrorKind::InvalidIri(raw.to_owned())))
    }

    fn hex_escape(&mut self, len: usize) -> PResult<char> {
        let mut value = 0u32;
        for _ in 0..len {
            let digit = self.bump().and_then(|c| c.to_digit(16));
            match digit {
                Some(d) => value = value * 16 + d,
                None => return self.syntax("invalid hex escape"),
            }
        }
        char::from_u32(value).map_or_else(|| self.syntax("invalid code point"), Ok)
    }

    fn prefixed_name(&mut self) -> PResult<String> {
        let start = self.pos;
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_pn_chars(c) || c == '.' {
                prefix.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.peek() != Some(':') {
            self.pos = start;
            return self.syntax(format!("unexpected token '{prefix}'"));
        }
        self.pos += 1;
        let mut local = String::new();
        let mut first = true;
        while let Some(c) = self.peek() {
            let ok = if first {
                is_pn_chars_u(c) || c == ':' || c.is_ascii_digit() || c == '%' || c == '\\'
            } else {
                is_pn_chars(c) || matches!(c, '.' | ':' | '%' | '\\')
            };
            if !ok {
                break;
            }
            first = false;
            self.pos += 1;
            if c == '\\' {
                match self.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return self.syntax("invalid local name escape"),
                }
            } else {
                local.push(c);
            }
        }
        while local.ends_with('.') && self.src[self.pos - 1] == '.' {
            local.pop();
            self.pos -= 1;
        }
        match self.prefixes.expand(&prefix, &local) {
            Some(iri) => Ok(iri),
            None => Err(self.error_at(start, TurtleErrorKind::UndefinedPrefix(prefix))),
        }
    }

    fn rdf_literal(&mut self) -> PResult<Term> {
        let lexical = self.string()?;
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || (c == '-' && !tag.is_empty()) {
                        tag.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return self.syntax("invalid language tag");
                }
                Ok(Term::Literal(Literal::lang(lexical, tag)))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.pos += 2;
                let datatype = match self.peek() {
                    Some('<') => self.iri_ref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Term::Literal(Literal::typed(lexical, datatype)))
            }
            _ => Ok(Term::Literal(Literal::string(lexical))),
        }
    }

    fn string(&mut self) -> PResult<String> {
        let quote = self.bump().expect("caller checked quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.pos += 2;
        } else if self.peek() == Some(quote) {
            self.pos += 1;
            return Ok(String::new());
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.syntax("unterminated string"),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.pos += 2;
                        // Quotes directly before the closing delimiter belong
                        // to the content.
                        while self.peek() == Some(quote) {
                            out.push(quote);
                            self.pos += 1;
                        }
                        return Ok(out);
                    }
                    out.push(c);
                }
                Some('\\') => out.push(self.string_escape()?),
                Some('\n') | Some('\r') if !long => {
                    return self.syntax("line break in short string");
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn string_escape(&mut self) -> PResult<char> {
        match self.bump() {
            Some('t') => Ok('\t'),
            Some('b') => Ok('\u{8}'),
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('f') => Ok('\u{c}'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some('\\') => Ok('\\'),
            Some('u') => self.hex_escape(4),
            Some('U') => self.hex_escape(8),
            _ => self.syntax("invalid string escape"),
        }
    }

    fn numeric(&mut self) -> PResult<Term> {
        let start = self.pos;
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.pos += 1;
        }
        let mut int_digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.pos += 1;
            int_digits += 1;
        }
        let mut frac_digits = 0;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.pos += 1;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.pos += 1;
                frac_digits += 1;
            }
        }
        if int_digits == 0 && frac_digits == 0 {
            self.pos = start;
            return self.syntax("invalid numeric literal");
        }
        let mut exponent = false;
        if let Some('e' | 'E') = self.peek() {
            let save = self.pos;
            let mut exp = String::from("e");
            self.pos += 1;
            if let Some(c @ ('+' | '-')) = self.peek() {
                exp.push(c);
                self.pos += 1;
            }
            let mut digits = 0;
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                exp.push(c);
                self.pos += 1;
                digits += 1;
            }
            if digits == 0 {
                self.pos = save;
                return self.syntax("invalid exponent");
            }
            text.push_str(&exp);
            exponent = true;
        }
        let datatype = if exponent {
            xsd::DOUBLE
        } else if frac_digits > 0 {
            xsd::DECIMAL
        } else {
            xsd::INTEGER
        };
        Ok(Term::Literal(Literal::typed(text, datatype)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::vocab::rdfs;

    const HEADER: &str = "@prefix : <http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/Extruder01#> .\n\
        @prefix s4inma: <https://w3id.org/def/saref4inma#> .\n\
        @prefix om: <http://www.ontology-of-units-of-measure.org/resource/om-2/> .\n\
        @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n";

    fn parse(body: &str) -> TurtleDocument {
        parse_turtle(&format!("{HEADER}{body}"), None).unwrap()
    }

    #[test]
    fn a_keyword_expands_to_rdf_type() {
        let doc = parse(":E01 a s4inma:Equipment .");
        assert_eq!(doc.triples.len(), 1);
        let t = &doc.triples[0];
        assert_eq!(t.predicate, Term::iri(rdf::TYPE));
        assert_eq!(t.object, Term::iri("https://w3id.org/def/saref4inma#Equipment"));
        assert_eq!(
            t.subject,
            Term::iri("http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/Extruder01#E01")
        );
    }

    #[test]
    fn typed_double_literal() {
        let doc = parse(":m om:hasNumericalValue \"40.5\"^^xsd:double .");
        let lit = doc.triples[0].object.as_literal().unwrap();
        assert_eq!(lit.lexical(), "40.5");
        assert_eq!(lit.datatype(), xsd::DOUBLE);
    }

    #[test]
    fn collection_expands_to_first_rest_chain() {
        let doc = parse(":c :list ( :x :y ) .");
        assert_eq!(doc.triples.len(), 5);
        let ns = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/Extruder01#";
        // Hand expansion: c list b1 . b1 first x . b1 rest b2 . b2 first y . b2 rest nil .
        let head = doc
            .triples
            .iter()
            .find(|t| t.predicate == Term::iri(format!("{ns}list")))
            .unwrap();
        let b1 = head.object.clone();
        assert!(b1.is_blank());
        let obj = |s: &Term, p: &str| {
            doc.triples
                .iter()
                .find(|t| &t.subject == s && t.predicate == Term::iri(p))
                .map(|t| t.object.clone())
                .unwrap()
        };
        assert_eq!(obj(&b1, rdf::FIRST), Term::iri(format!("{ns}x")));
        let b2 = obj(&b1, rdf::REST);
        assert!(b2.is_blank() && b2 != b1);
        assert_eq!(obj(&b2, rdf::FIRST), Term::iri(format!("{ns}y")));
        assert_eq!(obj(&b2, rdf::REST), Term::iri(rdf::NIL));
    }

    #[test]
    fn numeric_and_boolean_shorthands() {
        let doc = parse(":s :i 5 ; :d -1.5 ; :e 1e3 ; :b true ; :z 0 .");
        let dts: Vec<_> = doc
            .triples
            .iter()
            .map(|t| t.object.as_literal().unwrap().datatype().to_owned())
            .collect();
        assert_eq!(
            dts,
            vec![xsd::INTEGER, xsd::DECIMAL, xsd::DOUBLE, xsd::BOOLEAN, xsd::INTEGER]
        );
        assert_eq!(doc.triples[1].object.as_literal().unwrap().lexical(), "-1.5");
    }

    #[test]
    fn object_lists_and_blank_property_lists() {
        let doc = parse(":s :p :a, :b ; :q [ :r \"x\"@en ] .\n[ :t 1 ] .");
        assert_eq!(doc.triples.len(), 5);
        let lang = doc
            .triples
            .iter()
            .find_map(|t| t.object.as_literal().filter(|l| l.language().is_some()));
        assert_eq!(lang.unwrap().language(), Some("en"));
    }

    #[test]
    fn sparql_style_directives_and_base() {
        let doc = parse_turtle(
            "BASE <http://example.org/base/>\nPREFIX ex: <http://example.org/>\n<a> ex:p <../b#c> .",
            None,
        )
        .unwrap();
        assert_eq!(doc.triples[0].subject, Term::iri("http://example.org/base/a"));
        assert_eq!(doc.triples[0].object, Term::iri("http://example.org/b#c"));
    }

    #[test]
    fn local_names_with_dots() {
        let doc = parse(":E01.M1.q0 :p :E01.Batch .");
        let ns = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/Extruder01#";
        assert_eq!(doc.triples[0].subject, Term::iri(format!("{ns}E01.M1.q0")));
        assert_eq!(doc.triples[0].object, Term::iri(format!("{ns}E01.Batch")));
    }

    #[test]
    fn strings_and_escapes() {
        let doc = parse(":s :p \"a\\tb\\u0041\" , 'single' , \"\"\"multi\nline \"q\" \"\"\" , \"\" .");
        let values: Vec<_> = doc.triples.iter().map(|t| t.object.value_str().to_owned()).collect();
        assert_eq!(values, vec!["a\tbA", "single", "multi\nline \"q\" ", ""]);
    }

    #[test]
    fn undefined_prefix_reports_position() {
        let err = parse_turtle("@prefix ex: <http://e/> .\nex:a nope:b ex:c .", None).unwrap_err();
        assert_eq!(err.kind, TurtleErrorKind::UndefinedPrefix("nope".into()));
        assert_eq!((err.line, err.column), (2, 6));
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "<http://a> <http://b> .",
            "<http://a> <http://b> <http://c>",
            "\"lit\" <http://b> <http://c> .",
            "<http://a> <http://b> \"open .",
            "<http://a> <http://b> ( <http://c> .",
        ] {
            let err = parse_turtle(bad, None).unwrap_err();
            assert!(matches!(err.kind, TurtleErrorKind::Syntax(_)), "{bad}: {err}");
        }
    }

    #[test]
    fn invalid_and_relative_iris() {
        let err = parse_turtle("<http://a b> <http://p> <http://o> .", None).unwrap_err();
        assert!(matches!(err.kind, TurtleErrorKind::InvalidIri(_)));
        let err = parse_turtle("<rel> <http://p> <http://o> .", None).unwrap_err();
        assert!(matches!(err.kind, TurtleErrorKind::InvalidIri(_)));
        let doc = parse_turtle("<rel> <http://p> <http://o> .", Some("http://base/x/")).unwrap();
        assert_eq!(doc.triples[0].subject, Term::iri("http://base/x/rel"));
    }

    #[test]
    fn comments_and_initial_prefixes() {
        let doc = parse_turtle_with_prefixes(
            "# leading\nrdfs:Class a rdfs:Class . # trailing",
            None,
            &PrefixMap::well_known(),
        )
        .unwrap();
        assert_eq!(doc.triples[0].subject, Term::iri(rdfs::CLASS));
        assert!(doc.prefixes.is_empty());
    }
}
