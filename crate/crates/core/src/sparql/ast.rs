use std::collections::BTreeSet;
use std::fmt;

use crate::rdf::{PrefixMap, Term};

/// A subject or object position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermPattern {
    Var(Var),
    Term(Term),
}

/// A variable. Names starting with `_:` come from blank nodes in the query
/// text; they join like variables but are never projected by `SELECT *`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_hidden(&self) -> bool {
        self.0.starts_with("_:")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Path {
    Iri(String),
    Inverse(Box<Path>),
    Sequence(Box<Path>, Box<Path>),
    ZeroOrMore(Box<Path>),
}

impl Path {
    pub fn iri(iri: impl Into<String>) -> Self {
        Path::Iri(iri.into())
    }

    pub fn inverse(self) -> Self {
        Path::Inverse(Box::new(self))
    }

    pub fn then(self, next: Path) -> Self {
        Path::Sequence(Box::new(self), Box::new(next))
    }

    pub fn star(self) -> Self {
        Path::ZeroOrMore(Box::new(self))
    }

    pub fn contains_star(&self) -> bool {
        match self {
            Path::Iri(_) => false,
            Path::Inverse(p) => p.contains_star(),
            Path::Sequence(a, b) => a.contains_star() || b.contains_star(),
            Path::ZeroOrMore(_) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredicatePattern {
    Var(Var),
    Path(Path),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: PredicatePattern,
    pub object: TermPattern,
}

impl TriplePattern {
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        let s = match &self.subject {
            TermPattern::Var(v) => Some(v),
            TermPattern::Term(_) => None,
        };
        let p = match &self.predicate {
            PredicatePattern::Var(v) => Some(v),
            PredicatePattern::Path(_) => None,
        };
        let o = match &self.object {
            TermPattern::Var(v) => Some(v),
            TermPattern::Term(_) => None,
        };
        s.into_iter().chain(p).chain(o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(Var),
    Const(Term),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn compare(op: CompareOp, left: Expr, right: Expr) -> Self {
        Expr::Compare(op, Box::new(left), Box::new(right))
    }

    pub fn and(self, other: Expr) -> Self {
        Expr::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Expr) -> Self {
        Expr::Or(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> Self {
        Expr::Not(Box::new(self))
    }

    pub fn vars(&self) -> BTreeSet<&Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a Var>) {
        match self {
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Const(_) => {}
            Expr::Compare(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(e) => e.collect_vars(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Vars(Vec<Var>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub prefixes: PrefixMap,
    pub selection: Selection,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Expr>,
}

impl Query {
    /// Projected variables: the explicit list, or every visible variable in
    /// order of first appearance.
    pub fn projection(&self) -> Vec<Var> {
        match &self.selection {
            Selection::Vars(vars) => vars.clone(),
            Selection::All => {
                let mut seen = BTreeSet::new();
                self.patterns
                    .iter()
                    .flat_map(|p| p.vars())
                    .filter(|v| !v.is_hidden() && seen.insert((*v).clone()))
                    .cloned()
                    .collect()
            }
        }
    }

    /// Replaces every occurrence of `var` in patterns and filters by `term`.
    pub fn substitute(&mut self, var: &Var, term: &Term) {
        let sub = |tp: &mut TermPattern| {
            if matches!(tp, TermPattern::Var(v) if v == var) {
                *tp = TermPattern::Term(term.clone());
            }
        };
        for p in &mut self.patterns {
            sub(&mut p.subject);
            sub(&mut p.object);
            if let (PredicatePattern::Var(v), Term::Iri(iri)) = (&p.predicate, term) {
                if v == var {
                    p.predicate = PredicatePattern::Path(Path::Iri(iri.clone()));
                }
            }
        }
        for f in &mut self.filters {
            substitute_expr(f, var, term);
        }
        if let Selection::Vars(vars) = &mut self.selection {
            vars.retain(|v| v != var);
        }
    }
}

fn substitute_expr(expr: &mut Expr, var: &Var, term: &Term) {
    match expr {
        Expr::Var(v) if v == var => *expr = Expr::Const(term.clone()),
        Expr::Var(_) | Expr::Const(_) => {}
        Expr::Compare(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
            substitute_expr(a, var, term);
            substitute_expr(b, var, term);
        }
        Expr::Not(e) => substitute_expr(e, var, term),
    }
}

// Display renders re-parseable query text with full IRIs.

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_hidden() {
            f.write_str(&self.0)
        } else {
            write!(f, "?{}", self.0)
        }
    }
}

impl fmt::Display for TermPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermPattern::Var(v) => v.fmt(f),
            TermPattern::Term(t) => t.fmt(f),
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Path::Iri(iri) => write!(f, "<{iri}>"),
            Path::Inverse(p) => write!(f, "^({p})"),
            Path::Sequence(a, b) => write!(f, "({a})/({b})"),
            Path::ZeroOrMore(p) => write!(f, "({p})*"),
        }
    }
}

impl fmt::Display for PredicatePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicatePattern::Var(v) => v.fmt(f),
            PredicatePattern::Path(p) => p.fmt(f),
        }
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => v.fmt(f),
            Expr::Const(t) => t.fmt(f),
            Expr::Compare(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::And(a, b) => write!(f, "({a} && {b})"),
            Expr::Or(a, b) => write!(f, "({a} || {b})"),
            Expr::Not(e) => write!(f, "!({e})"),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT")?;
        match &self.selection {
            Selection::All => f.write_str(" *")?,
            Selection::Vars(vars) => {
                for v in vars {
                    write!(f, " {v}")?;
                }
            }
        }
        f.write_str(" WHERE {\n")?;
        for p in &self.patterns {
            writeln!(f, "  {p}")?;
        }
        for e in &self.filters {
            writeln!(f, "  FILTER({e})")?;
        }
        f.write_str("}\n")
    }
}
