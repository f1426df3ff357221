//! Exhaustive reference evaluator.
//!
//! Every variable ranges over all terms of the graph plus the query's
//! subject/object constants; an assignment is a row when every pattern holds
//! and every filter is true. Paths are materialized as pair relations, with
//! `p*` computed by composing to a fixpoint from the identity on nodes.
//! Shares no code with [`evaluate`](super::evaluate) beyond the AST.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::ast::*;
use super::eval::{Row, Solution};
use crate::rdf::vocab::xsd;
use crate::rdf::{Graph, Term};

pub const ORACLE_MAX_TRIPLES: usize = 300;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("store holds {0} triples; the oracle accepts at most {ORACLE_MAX_TRIPLES}")]
    TooLarge(usize),
}

type Relation = HashSet<(Term, Term)>;

pub fn evaluate_oracle(graph: &Graph, query: &Query) -> Result<Solution, OracleError> {
    if graph.len() > ORACLE_MAX_TRIPLES {
        return Err(OracleError::TooLarge(graph.len()));
    }
    let triples: Vec<(Term, Term, Term)> = graph.iter().map(|t| (t.subject, t.predicate, t.object)).collect();

    let mut constants: Vec<Term> = Vec::new();
    for p in &query.patterns {
        for tp in [&p.subject, &p.object] {
            if let TermPattern::Term(t) = tp {
                constants.push(t.clone());
            }
        }
    }
    let mut nodes: BTreeSet<Term> = constants.iter().cloned().collect();
    let mut domain: BTreeSet<Term> = constants.iter().cloned().collect();
    for (s, p, o) in &triples {
        nodes.insert(s.clone());
        nodes.insert(o.clone());
        domain.insert(s.clone());
        domain.insert(p.clone());
        domain.insert(o.clone());
    }

    let mut relations = Relations {
        triples: &triples,
        nodes: &nodes,
        memo: HashMap::new(),
    };
    let checks: Vec<Check> = query
        .patterns
        .iter()
        .map(|p| match &p.predicate {
            PredicatePattern::Path(path) => Check::Path(relations.of(path)),
            PredicatePattern::Var(_) => Check::Triples,
        })
        .collect();
    let triple_set: HashSet<(Term, Term, Term)> = triples.iter().cloned().collect();

    let mut vars: Vec<Var> = Vec::new();
    for p in &query.patterns {
        for v in p.vars() {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
    }
    let domain: Vec<Term> = domain.into_iter().collect();
    let mut search = Search {
        query,
        checks: &checks,
        triple_set: &triple_set,
        vars: &vars,
        domain: &domain,
        assignment: HashMap::new(),
        rows: Vec::new(),
    };
    search.run(0);

    let projection = query.projection();
    let rows = search
        .rows
        .into_iter()
        .map(|full| {
            projection
                .iter()
                .filter_map(|v| full.get(v).map(|t| (v.0.clone(), t.clone())))
                .collect::<Row>()
        })
        .collect();
    Ok(Solution {
        vars: projection.into_iter().map(|v| v.0).collect(),
        rows,
    })
}

struct Relations<'a> {
    triples: &'a [(Term, Term, Term)],
    nodes: &'a BTreeSet<Term>,
    memo: HashMap<Path, Relation>,
}

impl Relations<'_> {
    fn of(&mut self, path: &Path) -> Relation {
        if let Some(r) = self.memo.get(path) {
            return r.clone();
        }
        let r = match path {
            Path::Iri(iri) => self
                .triples
                .iter()
                .filter(|(_, p, _)| p.as_iri() == Some(iri.as_str()))
                .map(|(s, _, o)| (s.clone(), o.clone()))
                .collect(),
            Path::Inverse(inner) => self.of(inner).into_iter().map(|(a, b)| (b, a)).collect(),
            Path::Sequence(a, b) => compose(&self.of(a), &self.of(b)),
            Path::ZeroOrMore(inner) => {
                let step = self.of(inner);
                let mut closure: Relation = self.nodes.iter().map(|n| (n.clone(), n.clone())).collect();
                loop {
                    let next: Relation = closure.union(&compose(&closure, &step)).cloned().collect();
                    if next.len() == closure.len() {
                        break closure;
                    }
                    closure = next;
                }
            }
        };
        self.memo.insert(path.clone(), r.clone());
        r
    }
}

fn compose(a: &Relation, b: &Relation) -> Relation {
    let mut out = Relation::new();
    for (x, y) in a {
        for (y2, z) in b {
            if y == y2 {
                out.insert((x.clone(), z.clone()));
            }
        }
    }
    out
}

enum Check {
    Path(Relation),
    Triples,
}

struct Search<'a> {
    query: &'a Query,
    checks: &'a [Check],
    triple_set: &'a HashSet<(Term, Term, Term)>,
    vars: &'a [Var],
    domain: &'a [Term],
    assignment: HashMap<Var, Term>,
    rows: Vec<HashMap<Var, Term>>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) {
        if !self.consistent() {
            return;
        }
        if depth == self.vars.len() {
            let all_pass = self
                .query
                .filters
                .iter()
                .all(|f| truth(f, &self.assignment) == Truth::True);
            if all_pass {
                self.rows.push(self.assignment.clone());
            }
            return;
        }
        let var = self.vars[depth].clone();
        for value in self.domain {
            self.assignment.insert(var.clone(), value.clone());
            self.run(depth + 1);
        }
        self.assignment.remove(&var);
    }

    fn value(&self, tp: &TermPattern) -> Option<Term> {
        match tp {
            TermPattern::Term(t) => Some(t.clone()),
            TermPattern::Var(v) => self.assignment.get(v).cloned(),
        }
    }

    /// Prunes on every pattern: fully bound patterns must hold, partially
    /// bound ones must have some witness.
    fn consistent(&self) -> bool {
        self.query.patterns.iter().zip(self.checks).all(|(p, check)| {
            let s = self.value(&p.subject);
            let o = self.value(&p.object);
            match check {
                Check::Path(rel) => match (&s, &o) {
                    (Some(s), Some(o)) => rel.contains(&(s.clone(), o.clone())),
                    (Some(s), None) => rel.iter().any(|(a, _)| a == s),
                    (None, Some(o)) => rel.iter().any(|(_, b)| b == o),
                    (None, None) => true,
                },
                Check::Triples => {
                    let PredicatePattern::Var(pv) = &p.predicate else {
                        unreachable!("triples check only for predicate variables")
                    };
                    let pred = self.assignment.get(pv);
                    match (&s, pred, &o) {
                        (Some(s), Some(pr), Some(o)) => self.triple_set.contains(&(s.clone(), pr.clone(), o.clone())),
                        _ => self.triple_set.iter().any(|(ts, tp, to)| {
                            s.as_ref().is_none_or(|s| s == ts)
                                && pred.is_none_or(|pr| pr == tp)
                                && o.as_ref().is_none_or(|o| o == to)
                        }),
                    }
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    True,
    False,
    Error,
}

enum Val {
    Term(Term),
    Truth(bool),
}

fn value(expr: &Expr, env: &HashMap<Var, Term>) -> Option<Val> {
    match expr {
        Expr::Var(v) => env.get(v).cloned().map(Val::Term),
        Expr::Const(t) => Some(Val::Term(t.clone())),
        other => match truth(other, env) {
            Truth::True => Some(Val::Truth(true)),
            Truth::False => Some(Val::Truth(false)),
            Truth::Error => None,
        },
    }
}

fn truth(expr: &Expr, env: &HashMap<Var, Term>) -> Truth {
    match expr {
        Expr::And(a, b) => match (truth(a, env), truth(b, env)) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Error,
        },
        Expr::Or(a, b) => match (truth(a, env), truth(b, env)) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Error,
        },
        Expr::Not(e) => match truth(e, env) {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Error => Truth::Error,
        },
        Expr::Compare(op, a, b) => match (value(a, env), value(b, env)) {
            (Some(x), Some(y)) => relate(*op, &to_term(x), &to_term(y)),
            _ => Truth::Error,
        },
        Expr::Var(_) | Expr::Const(_) => match value(expr, env) {
            Some(Val::Term(t)) => effective_boolean(&t),
            Some(Val::Truth(b)) => from_bool(b),
            None => Truth::Error,
        },
    }
}

fn to_term(v: Val) -> Term {
    match v {
        Val::Term(t) => t,
        Val::Truth(b) => Term::boolean(b),
    }
}

fn from_bool(b: bool) -> Truth {
    if b {
        Truth::True
    } else {
        Truth::False
    }
}

fn numeric(t: &Term) -> Option<f64> {
    let lit = t.as_literal()?;
    if !xsd::is_numeric(lit.datatype()) {
        return None;
    }
    let v = match lit.lexical().trim() {
        "INF" | "+INF" => f64::INFINITY,
        "-INF" => f64::NEG_INFINITY,
        s => s.parse::<f64>().ok()?,
    };
    (!v.is_nan()).then_some(v)
}

fn boolean(t: &Term) -> Option<bool> {
    let lit = t.as_literal()?;
    if lit.datatype() != xsd::BOOLEAN {
        return None;
    }
    match lit.lexical() {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

fn plain(t: &Term) -> Option<&str> {
    t.as_literal()
        .filter(|l| l.datatype() == xsd::STRING)
        .map(|l| l.lexical())
}

fn relate(op: CompareOp, a: &Term, b: &Term) -> Truth {
    let classify = |t: &Term| (numeric(t).is_some(), boolean(t).is_some(), plain(t).is_some());
    let (ka, kb) = (classify(a), classify(b));
    let comparable_kind = |k: (bool, bool, bool)| k.0 || k.1 || k.2;
    let ordering = if let (Some(x), Some(y)) = (numeric(a), numeric(b)) {
        x.partial_cmp(&y)
    } else if let (Some(x), Some(y)) = (boolean(a), boolean(b)) {
        Some(x.cmp(&y))
    } else if let (Some(x), Some(y)) = (plain(a), plain(b)) {
        Some(x.cmp(y))
    } else if comparable_kind(ka) && comparable_kind(kb) {
        return Truth::Error;
    } else {
        return match op {
            CompareOp::Eq => from_bool(a == b),
            CompareOp::Ne => from_bool(a != b),
            _ => Truth::Error,
        };
    };
    use std::cmp::Ordering::*;
    let holds = match (op, ordering) {
        (CompareOp::Ne, None) => true,
        (_, None) => false,
        (CompareOp::Eq, Some(o)) => o == Equal,
        (CompareOp::Ne, Some(o)) => o != Equal,
        (CompareOp::Lt, Some(o)) => o == Less,
        (CompareOp::Le, Some(o)) => o == Less || o == Equal,
        (CompareOp::Gt, Some(o)) => o == Greater,
        (CompareOp::Ge, Some(o)) => o == Greater || o == Equal,
    };
    from_bool(holds)
}

fn effective_boolean(t: &Term) -> Truth {
    if let Some(b) = boolean(t) {
        return from_bool(b);
    }
    if let Some(n) = numeric(t) {
        return from_bool(n != 0.0);
    }
    if let Some(s) = plain(t) {
        return from_bool(!s.is_empty());
    }
    match t.as_literal() {
        Some(l) if l.datatype() == xsd::BOOLEAN || xsd::is_numeric(l.datatype()) => Truth::False,
        _ => Truth::Error,
    }
}
