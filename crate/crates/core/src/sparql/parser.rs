//! Recursive-descent parser for the supported SELECT subset.
//!
//! Grammar: `PREFIX*` / `BASE`, `SELECT (vars | *) WHERE? { block }`, where
//! a block holds triple patterns with `;` and `,` lists and `FILTER`
//! clauses. Property paths: IRI, `a`, `^`, `/`, `*` and parentheses.

use std::fmt;

use super::ast::*;
use crate::rdf::turtle::has_scheme;
use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{Literal, PrefixMap, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryErrorKind {
    Syntax(String),
    UnknownPrefix(String),
    /// A SPARQL feature outside the supported subset, named by keyword.
    Unsupported(String),
    UnboundSelectVar(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct QueryError {
    pub line: usize,
    pub column: usize,
    pub kind: QueryErrorKind,
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, c) = (self.line, self.column);
        match &self.kind {
            QueryErrorKind::Syntax(msg) => write!(f, "syntax error at {l}:{c}: {msg}"),
            QueryErrorKind::UnknownPrefix(p) => write!(f, "unknown prefix '{p}:' at {l}:{c}"),
            QueryErrorKind::Unsupported(k) => write!(f, "unsupported SPARQL feature {k} at {l}:{c}"),
            QueryErrorKind::UnboundSelectVar(v) => {
                write!(f, "selected variable ?{v} does not occur in any pattern")
            }
        }
    }
}

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "OPTIONAL",
    "UNION",
    "MINUS",
    "ORDER",
    "LIMIT",
    "OFFSET",
    "DISTINCT",
    "REDUCED",
    "GROUP",
    "HAVING",
    "VALUES",
    "BIND",
    "SERVICE",
    "GRAPH",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "FROM",
    "INSERT",
    "DELETE",
    "LOAD",
    "CLEAR",
    "DROP",
    "CREATE",
    "EXISTS",
    "NOT",
];

/// Parses query text. `defaults` are in scope before the first `PREFIX`
/// and may be overridden by it.
pub fn parse_query_with_prefixes(text: &str, defaults: &PrefixMap) -> Result<Query, QueryError> {
    let mut p = Parser::new(text, defaults.clone());
    let query = p.query()?;
    Ok(query)
}

/// Parses query text with the well-known prefixes (rdf, rdfs, owl, xsd) in
/// scope.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    parse_query_with_prefixes(text, &PrefixMap::well_known())
}

/// Parses a standalone filter expression (the template fragment grammar).
pub fn parse_expression(text: &str, prefixes: &PrefixMap) -> Result<Expr, QueryError> {
    let mut p = Parser::new(text, prefixes.clone());
    p.ws();
    let e = p.expression()?;
    p.ws();
    if !p.at_end() {
        return Err(p.err("unexpected input after expression"));
    }
    Ok(e)
}

pub(crate) struct Parser {
    src: Vec<char>,
    pos: usize,
    prefixes: PrefixMap,
    base: Option<String>,
}

type PResult<T> = Result<T, QueryError>;

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{B7}'
}

impl Parser {
    fn new(text: &str, prefixes: PrefixMap) -> Self {
        Parser {
            src: text.chars().collect(),
            pos: 0,
            prefixes,
            base: None,
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.src[..pos.min(self.src.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn err_kind_at(&self, pos: usize, kind: QueryErrorKind) -> QueryError {
        let (line, column) = self.location(pos);
        QueryError { line, column, kind }
    }

    fn err(&self, msg: impl Into<String>) -> QueryError {
        self.err_kind_at(self.pos, QueryErrorKind::Syntax(msg.into()))
    }

    fn unsupported(&self, what: impl Into<String>) -> QueryError {
        self.err_kind_at(self.pos, QueryErrorKind::Unsupported(what.into()))
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src.get(self.pos + offset).copied()
    }

    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.src.len() >= self.pos + n && self.src[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        self.ws();
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{s}'")))
        }
    }

    /// The bare word at the cursor, without consuming it.
    fn peek_word(&self) -> String {
        self.src[self.pos..]
            .iter()
            .take_while(|c| c.is_alphanumeric() || **c == '_')
            .collect()
    }

    /// Consumes `kw` (case-insensitive) when it is the next whole word.
    fn keyword(&mut self, kw: &str) -> bool {
        self.ws();
        let word = self.peek_word();
        if word.eq_ignore_ascii_case(kw) && self.peek_at(word.chars().count()) != Some(':') {
            self.pos += word.chars().count();
            true
        } else {
            false
        }
    }

    fn reject_unsupported_keyword(&self) -> PResult<()> {
        let word = self.peek_word();
        if self.peek_at(word.chars().count()) == Some(':') {
            return Ok(());
        }
        let upper = word.to_ascii_uppercase();
        if UNSUPPORTED_KEYWORDS.contains(&upper.as_str()) {
            return Err(self.unsupported(upper));
        }
        Ok(())
    }

    fn query(&mut self) -> PResult<Query> {
        loop {
            self.ws();
            if self.keyword("PREFIX") {
                self.ws();
                let prefix = self.prefix_name()?;
                self.expect(":")?;
                self.ws();
                let iri = self.iri_ref()?;
                self.prefixes.insert(prefix, iri);
            } else if self.keyword("BASE") {
                self.ws();
                let iri = self.iri_ref()?;
                self.base = Some(iri);
            } else {
                break;
            }
        }
        self.ws();
        self.reject_unsupported_keyword()?;
        if !self.keyword("SELECT") {
            return Err(self.err("expected SELECT"));
        }
        self.ws();
        self.reject_unsupported_keyword()?;
        let selection = if self.eat("*") {
            Selection::All
        } else {
            let mut vars = Vec::new();
            loop {
                self.ws();
                match self.peek() {
                    Some('?') | Some('$') => vars.push(self.var()?),
                    Some('(') => return Err(self.unsupported("projection expression")),
                    _ => break,
                }
            }
            if vars.is_empty() {
                return Err(self.err("expected variables or '*' after SELECT"));
            }
            Selection::Vars(vars)
        };
        self.ws();
        self.reject_unsupported_keyword()?;
        self.keyword("WHERE");
        self.expect("{")?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        self.group(&mut patterns, &mut filters)?;
        self.ws();
        self.reject_unsupported_keyword()?;
        if !self.at_end() {
            return Err(self.err("unexpected input after query"));
        }

        if let Selection::Vars(vars) = &selection {
            for v in vars {
                if !patterns.iter().any(|p| p.vars().any(|pv| pv == v)) {
                    return Err(self.err_kind_at(0, QueryErrorKind::UnboundSelectVar(v.0.clone())));
                }
            }
        }
        Ok(Query {
            prefixes: self.prefixes.clone(),
            selection,
            patterns,
            filters,
        })
    }

    /// Group body after `{` up to and including `}`.
    fn group(&mut self, patterns: &mut Vec<TriplePattern>, filters: &mut Vec<Expr>) -> PResult<()> {
        loop {
            self.ws();
            match self.peek() {
                None => return Err(self.err("unterminated group, expected '}'")),
                Some('}') => {
                    self.pos += 1;
                    return Ok(());
                }
                Some('{') => return Err(self.unsupported("nested group")),
                Some('.') => {
                    self.pos += 1;
                }
                _ => {
                    self.reject_unsupported_keyword()?;
                    if self.keyword("FILTER") {
                        self.ws();
                        if self.peek() != Some('(') {
                            self.reject_unsupported_keyword()?;
                            return Err(self.unsupported("FILTER without parentheses"));
                        }
                        filters.push(self.bracketed()?);
                    } else {
                        self.triples_block(patterns)?;
                        self.ws();
                        match self.peek() {
                            Some('.') => self.pos += 1,
                            Some('}') => {}
                            _ => {
                                self.reject_unsupported_keyword()?;
                                if self.peek_word().eq_ignore_ascii_case("FILTER") {
                                    continue;
                                }
                                return Err(self.err("expected '.' or '}' after triple pattern"));
                            }
                        }
                    }
                }
            }
        }
    }

    fn triples_block(&mut self, out: &mut Vec<TriplePattern>) -> PResult<()> {
        let subject = self.term_pattern(false)?;
        loop {
            self.ws();
            let predicate = self.verb()?;
            loop {
                self.ws();
                let object = self.term_pattern(true)?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                self.ws();
                if !self.eat(",") {
                    break;
                }
            }
            self.ws();
            if !self.eat(";") {
                return Ok(());
            }
            // Trailing or repeated ';'.
            loop {
                self.ws();
                if !self.eat(";") {
                    break;
                }
            }
            self.ws();
            if matches!(self.peek(), Some('.') | Some('}')) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<PredicatePattern> {
        match self.peek() {
            Some('?') | Some('$') if self.peek_at(1).is_some_and(is_name_start_or_digit) => {
                Ok(PredicatePattern::Var(self.var()?))
            }
            _ => Ok(PredicatePattern::Path(self.path()?)),
        }
    }

    fn path(&mut self) -> PResult<Path> {
        let mut left = self.path_elt_or_inverse()?;
        loop {
            self.ws();
            match self.peek() {
                Some('/') => {
                    self.pos += 1;
                    self.ws();
                    let right = self.path_elt_or_inverse()?;
                    left = left.then(right);
                }
                Some('|') => return Err(self.unsupported("alternative path '|'")),
                _ => return Ok(left),
            }
        }
    }

    fn path_elt_or_inverse(&mut self) -> PResult<Path> {
        self.ws();
        if self.eat("^") {
            self.ws();
            Ok(self.path_elt()?.inverse())
        } else {
            self.path_elt()
        }
    }

    fn path_elt(&mut self) -> PResult<Path> {
        let primary = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.path()?;
                self.expect(")")?;
                p
            }
            Some('!') => return Err(self.unsupported("negated property set '!'")),
            Some('a') if !self.peek_at(1).is_some_and(|c| is_name_char(c) || c == ':') => {
                self.pos += 1;
                Path::Iri(rdf::TYPE.to_owned())
            }
            Some('<') => Path::Iri(self.iri_ref()?),
            Some(c) if is_name_start(c) || c == ':' => Path::Iri(self.prefixed_name()?),
            _ => return Err(self.err("expected predicate or property path")),
        };
        // Path modifiers bind tightly: no whitespace before them.
        match self.peek() {
            Some('*') => {
                self.pos += 1;
                Ok(primary.star())
            }
            Some('+') => Err(self.unsupported("one-or-more path '+'")),
            Some('?') if !self.peek_at(1).is_some_and(is_name_start_or_digit) => {
                Err(self.unsupported("zero-or-one path '?'"))
            }
            Some('{') => Err(self.unsupported("path length range")),
            _ => Ok(primary),
        }
    }

    fn term_pattern(&mut self, object: bool) -> PResult<TermPattern> {
        self.ws();
        match self.peek() {
            Some('?') | Some('$') => Ok(TermPattern::Var(self.var()?)),
            Some('_') if self.peek_at(1) == Some(':') => {
                self.pos += 2;
                let label = self.name();
                if label.is_empty() {
                    return Err(self.err("empty blank node label"));
                }
                Ok(TermPattern::Var(Var(format!("_:{label}"))))
            }
            Some('[') => Err(self.unsupported("blank node property list '[ ]'")),
            Some('(') => Err(self.unsupported("collection syntax in patterns")),
            Some('"') | Some('\'') | Some('0'..='9') | Some('+') | Some('-') | Some('.') if object => {
                Ok(TermPattern::Term(self.literal()?))
            }
            Some('"') | Some('\'') | Some('0'..='9') => Err(self.err("literal not allowed as subject")),
            _ => {
                let word = self.peek_word();
                if object && (word == "true" || word == "false") && !self.peek_at(word.len()).is_some_and(|c| c == ':')
                {
                    self.pos += word.len();
                    return Ok(TermPattern::Term(Term::Literal(Literal::boolean(word == "true"))));
                }
                self.reject_unsupported_keyword()?;
                Ok(TermPattern::Term(Term::iri(self.iri()?)))
            }
        }
    }

    fn var(&mut self) -> PResult<Var> {
        self.pos += 1; // '?' or '$'
        let name = self.name();
        if name.is_empty() {
            return Err(self.err("expected variable name"));
        }
        Ok(Var(name))
    }

    fn name(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn prefix_name(&mut self) -> PResult<String> {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) || (c == '.' && !s.is_empty() && self.peek_at(1).is_some_and(is_name_char)) {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(s)
    }

    fn iri(&mut self) -> PResult<String> {
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some(c) if is_name_start(c) || c == ':' => self.prefixed_name(),
            _ => Err(self.err("expected IRI, prefixed name or variable")),
        }
    }

    fn iri_ref(&mut self) -> PResult<String> {
        let start = self.pos;
        if !self.eat("<") {
            return Err(self.err("expected '<'"));
        }
        let mut s = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err_kind_at(start, QueryErrorKind::Syntax("unterminated IRI".into()))),
                Some('>') => {
                    self.pos += 1;
                    break;
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.err(format!("illegal character {c:?} in IRI")));
                }
                Some('\\') => {
                    let c = self.unicode_escape()?;
                    s.push(c);
                }
                Some(c) => {
                    s.push(c);
                    self.pos += 1;
                }
            }
        }
        self.resolve(s, start)
    }

    fn unicode_escape(&mut self) -> PResult<char> {
        self.pos += 1;
        let len = match self.peek() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.err("expected \\u or \\U escape")),
        };
        self.pos += 1;
        let hex: String = self.src[self.pos..].iter().take(len).collect();
        if hex.len() != len {
            return Err(self.err("truncated escape"));
        }
        self.pos += len;
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.err("invalid unicode escape"))
    }

    fn resolve(&self, iri: String, at: usize) -> PResult<String> {
        if has_scheme(&iri) {
            return Ok(iri);
        }
        let base = self.base.as_deref().ok_or_else(|| {
            self.err_kind_at(at, QueryErrorKind::Syntax(format!("relative IRI <{iri}> without BASE")))
        })?;
        url::Url::parse(base)
            .and_then(|b| b.join(&iri))
            .map(|u| u.to_string())
            .map_err(|e| self.err_kind_at(at, QueryErrorKind::Syntax(format!("cannot resolve <{iri}>: {e}"))))
    }

    fn prefixed_name(&mut self) -> PResult<String> {
        let start = self.pos;
        let prefix = self.prefix_name()?;
        if !self.eat(":") {
            return Err(self.err_kind_at(
                start,
                QueryErrorKind::Syntax(format!("expected prefixed name, found '{prefix}'")),
            ));
        }
        let mut local = String::new();
        while let Some(c) = self.peek() {
            let inner_dot =
                c == '.' && !local.is_empty() && self.peek_at(1).is_some_and(|n| is_name_char(n) || n == ':');
            if is_name_char(c) || c == ':' || inner_dot {
                local.push(c);
                self.pos += 1;
            } else if c == '\\' && self.peek_at(1).is_some() {
                local.push(self.src[self.pos + 1]);
                self.pos += 2;
            } else {
                break;
            }
        }
        self.prefixes
            .expand(&prefix, &local)
            .ok_or_else(|| self.err_kind_at(start, QueryErrorKind::UnknownPrefix(prefix)))
    }

    fn literal(&mut self) -> PResult<Term> {
        match self.peek() {
            Some('"') | Some('\'') => {
                let value = self.string()?;
                if self.eat("@") {
                    let tag: String = self.src[self.pos..]
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric() || **c == '-')
                        .collect();
                    if tag.is_empty() {
                        return Err(self.err("empty language tag"));
                    }
                    self.pos += tag.len();
                    Ok(Term::Literal(Literal::lang(value, tag)))
                } else if self.eat("^^") {
                    let dt = self.iri()?;
                    Ok(Term::Literal(Literal::typed(value, dt)))
                } else {
                    Ok(Term::Literal(Literal::string(value)))
                }
            }
            _ => self.number(),
        }
    }

    fn string(&mut self) -> PResult<String> {
        let quote = self.peek().unwrap_or('"');
        let long = self.src[self.pos..].iter().take(3).all(|&c| c == quote) && self.src.len() >= self.pos + 3;
        self.pos += if long { 3 } else { 1 };
        let mut s = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated string")),
                Some(c) if c == quote => {
                    if !long {
                        self.pos += 1;
                        return Ok(s);
                    }
                    if self.src[self.pos..].iter().take(3).filter(|&&x| x == quote).count() == 3 {
                        self.pos += 3;
                        return Ok(s);
                    }
                    s.push(c);
                    self.pos += 1;
                }
                Some('\n') | Some('\r') if !long => return Err(self.err("newline in string")),
                Some('\\') => match self.peek_at(1) {
                    Some('u') | Some('U') => s.push(self.unicode_escape()?),
                    Some(e) => {
                        s.push(match e {
                            't' => '\t',
                            'n' => '\n',
                            'r' => '\r',
                            'b' => '\u{8}',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            _ => return Err(self.err(format!("invalid escape \\{e}"))),
                        });
                        self.pos += 2;
                    }
                    None => return Err(self.err("unterminated string")),
                },
                Some(c) => {
                    s.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn number(&mut self) -> PResult<Term> {
        let start = self.pos;
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.pos += 1;
        }
        let digits = |p: &mut Parser, s: &mut String| {
            let mut n = 0;
            while let Some(c) = p.peek().filter(char::is_ascii_digit) {
                s.push(c);
                p.pos += 1;
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut s);
        let mut datatype = xsd::INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            s.push('.');
            self.pos += 1;
            digits(self, &mut s);
            datatype = xsd::DECIMAL;
        } else if int_digits == 0 {
            return Err(self.err_kind_at(start, QueryErrorKind::Syntax("expected number".into())));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            let mut exp = String::from(e);
            let save = self.pos;
            self.pos += 1;
            if let Some(c @ ('+' | '-')) = self.peek() {
                exp.push(c);
                self.pos += 1;
            }
            if digits(self, &mut exp) == 0 {
                self.pos = save;
            } else {
                s.push_str(&exp);
                datatype = xsd::DOUBLE;
            }
        }
        Ok(Term::Literal(Literal::typed(s, datatype)))
    }

    fn bracketed(&mut self) -> PResult<Expr> {
        self.expect("(")?;
        let e = self.expression()?;
        self.expect(")")?;
        Ok(e)
    }

    pub(crate) fn expression(&mut self) -> PResult<Expr> {
        let mut left = self.and_expr()?;
        loop {
            self.ws();
            if self.eat("||") {
                let right = self.and_expr()?;
                left = left.or(right);
            } else {
                return Ok(left);
            }
        }
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut left = self.relational()?;
        loop {
            self.ws();
            if self.eat("&&") {
                let right = self.relational()?;
                left = left.and(right);
            } else {
                return Ok(left);
            }
        }
    }

    fn relational(&mut self) -> PResult<Expr> {
        let left = self.unary()?;
        self.ws();
        let op = if self.eat("!=") {
            CompareOp::Ne
        } else if self.eat("<=") {
            CompareOp::Le
        } else if self.eat(">=") {
            CompareOp::Ge
        } else if self.eat("=") {
            CompareOp::Eq
        } else if self.eat(">") {
            CompareOp::Gt
        } else if self.peek() == Some('<') && !self.looks_like_iri() {
            self.pos += 1;
            CompareOp::Lt
        } else {
            if matches!(self.peek(), Some('+' | '-' | '*' | '/')) {
                return Err(self.unsupported("arithmetic"));
            }
            return Ok(left);
        };
        let right = self.unary()?;
        self.ws();
        if matches!(self.peek(), Some('+' | '-' | '*' | '/')) {
            return Err(self.unsupported("arithmetic"));
        }
        Ok(Expr::compare(op, left, right))
    }

    /// In expressions `<` is an IRI only when an absolute IRI with no
    /// whitespace follows up to `>`.
    fn looks_like_iri(&self) -> bool {
        let rest: String = self.src[self.pos + 1..]
            .iter()
            .take_while(|c| !c.is_whitespace() && !matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`'))
            .collect();
        self.src.get(self.pos + 1 + rest.chars().count()) == Some(&'>') && has_scheme(&rest)
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.ws();
        if self.peek() == Some('!') && self.peek_at(1) != Some('=') {
            self.pos += 1;
            return Ok(self.unary()?.negate());
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        self.ws();
        match self.peek() {
            Some('(') => self.bracketed(),
            Some('?') | Some('$') => Ok(Expr::Var(self.var()?)),
            Some('"') | Some('\'') | Some('0'..='9') | Some('.') => Ok(Expr::Const(self.literal()?)),
            Some('+') | Some('-') if self.peek_at(1).is_some_and(|c| c.is_ascii_digit() || c == '.') => {
                Ok(Expr::Const(self.literal()?))
            }
            Some('<') => Ok(Expr::Const(Term::iri(self.iri_ref()?))),
            Some(c) if is_name_start(c) || c == ':' => {
                let word = self.peek_word();
                let after = self.peek_at(word.chars().count());
                if (word == "true" || word == "false") && after != Some(':') {
                    self.pos += word.len();
                    return Ok(Expr::Const(Term::Literal(Literal::boolean(word == "true"))));
                }
                self.reject_unsupported_keyword()?;
                let save = self.pos;
                self.pos += word.chars().count();
                self.ws();
                if after != Some(':') && self.peek() == Some('(') {
                    self.pos = save;
                    return Err(self.unsupported(format!("function {}()", word.to_ascii_uppercase())));
                }
                self.pos = save;
                Ok(Expr::Const(Term::iri(self.prefixed_name()?)))
            }
            _ => Err(self.err("expected expression")),
        }
    }
}

fn is_name_start_or_digit(c: char) -> bool {
    is_name_start(c) || c.is_ascii_digit()
}
