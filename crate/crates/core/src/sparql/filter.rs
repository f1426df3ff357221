//! FILTER expression evaluation.
//!
//! Comparison rules:
//! - numeric vs numeric (xsd integer/decimal/double/float and derived
//!   integer types) compares as `f64`;
//! - plain string vs plain string compares lexically;
//! - boolean vs boolean compares with `false < true`;
//! - any other mix of those three kinds is a type error;
//! - everything else supports only `=`/`!=` as term equality, and ordering
//!   is a type error.
//!
//! An unbound variable or a type error makes the filter fail, which drops
//! the row. `&&`, `||` and `!` follow the SPARQL error-propagation tables.

use std::cmp::Ordering;

use super::ast::{CompareOp, Expr, Var};
use crate::rdf::vocab::xsd;
use crate::rdf::{Literal, Term};

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Term(Term),
    Bool(bool),
}

struct TypeError;

type Eval<T> = Result<T, TypeError>;

/// True when the expression's effective boolean value is true for the
/// bindings given by `lookup`.
pub fn passes(expr: &Expr, lookup: &dyn Fn(&Var) -> Option<Term>) -> bool {
    matches!(eval(expr, lookup).and_then(ebv), Ok(true))
}

fn eval(expr: &Expr, lookup: &dyn Fn(&Var) -> Option<Term>) -> Eval<Value> {
    match expr {
        Expr::Var(v) => lookup(v).map(Value::Term).ok_or(TypeError),
        Expr::Const(t) => Ok(Value::Term(t.clone())),
        Expr::Compare(op, a, b) => {
            let a = eval(a, lookup)?;
            let b = eval(b, lookup)?;
            compare(*op, &as_term(a), &as_term(b)).map(Value::Bool)
        }
        Expr::And(a, b) => {
            let a = eval(a, lookup).and_then(ebv);
            let b = eval(b, lookup).and_then(ebv);
            match (a, b) {
                (Ok(false), _) | (_, Ok(false)) => Ok(Value::Bool(false)),
                (Ok(true), Ok(true)) => Ok(Value::Bool(true)),
                _ => Err(TypeError),
            }
        }
        Expr::Or(a, b) => {
            let a = eval(a, lookup).and_then(ebv);
            let b = eval(b, lookup).and_then(ebv);
            match (a, b) {
                (Ok(true), _) | (_, Ok(true)) => Ok(Value::Bool(true)),
                (Ok(false), Ok(false)) => Ok(Value::Bool(false)),
                _ => Err(TypeError),
            }
        }
        Expr::Not(e) => eval(e, lookup).and_then(ebv).map(|b| Value::Bool(!b)),
    }
}

fn as_term(v: Value) -> Term {
    match v {
        Value::Term(t) => t,
        Value::Bool(b) => Term::Literal(Literal::boolean(b)),
    }
}

enum Kind<'a> {
    Number(f64),
    Str(&'a str),
    Boolean(bool),
    Other,
}

fn kind(t: &Term) -> Kind<'_> {
    let Term::Literal(lit) = t else {
        return Kind::Other;
    };
    if let Some(n) = lit.as_f64() {
        Kind::Number(n)
    } else if let Some(b) = lit.as_bool() {
        Kind::Boolean(b)
    } else if lit.datatype() == xsd::STRING {
        Kind::Str(lit.lexical())
    } else {
        Kind::Other
    }
}

fn compare(op: CompareOp, a: &Term, b: &Term) -> Eval<bool> {
    let ord = match (kind(a), kind(b)) {
        (Kind::Number(x), Kind::Number(y)) => x.partial_cmp(&y),
        (Kind::Str(x), Kind::Str(y)) => Some(x.cmp(y)),
        (Kind::Boolean(x), Kind::Boolean(y)) => Some(x.cmp(&y)),
        (Kind::Other, _) | (_, Kind::Other) => {
            return match op {
                CompareOp::Eq => Ok(a == b),
                CompareOp::Ne => Ok(a != b),
                _ => Err(TypeError),
            }
        }
        _ => return Err(TypeError),
    };
    Ok(match ord {
        None => op == CompareOp::Ne,
        Some(ord) => match op {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ne => ord != Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        },
    })
}

fn ebv(v: Value) -> Eval<bool> {
    match v {
        Value::Bool(b) => Ok(b),
        Value::Term(Term::Literal(lit)) => {
            if let Some(b) = lit.as_bool() {
                Ok(b)
            } else if let Some(n) = lit.as_f64() {
                Ok(n != 0.0 && !n.is_nan())
            } else if lit.datatype() == xsd::STRING {
                Ok(!lit.lexical().is_empty())
            } else if lit.datatype() == xsd::BOOLEAN || xsd::is_numeric(lit.datatype()) {
                // Ill-formed lexical form.
                Ok(false)
            } else {
                Err(TypeError)
            }
        }
        Value::Term(_) => Err(TypeError),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::PrefixMap;
    use crate::sparql::parse_expression;

    fn check(expr: &str, bindings: &[(&str, Term)]) -> bool {
        let e = parse_expression(expr, &PrefixMap::well_known()).unwrap();
        let lookup = |v: &Var| bindings.iter().find(|(n, _)| *n == v.name()).map(|(_, t)| t.clone());
        passes(&e, &lookup)
    }

    #[test]
    fn numeric_coercion() {
        let v = Term::Literal(Literal::typed("230", xsd::INTEGER));
        assert!(check("?v >= 230.0 && ?v <= 460", &[("v", v.clone())]));
        assert!(check("?v = 2.3e2", &[("v", v.clone())]));
        assert!(!check("?v > 230", &[("v", v)]));
    }

    #[test]
    fn unbound_drops_row() {
        assert!(!check("?missing > 1", &[]));
        assert!(!check("!(?missing > 1)", &[]));
        assert!(check("?missing > 1 || true", &[]));
        assert!(!check("?missing > 1 && true", &[]));
        assert!(!check("?missing > 1 && false", &[]));
    }

    #[test]
    fn string_number_mix_is_error() {
        let s = Term::string("10");
        assert!(!check("?s < 20", &[("s", s.clone())]));
        assert!(!check("!(?s < 20)", &[("s", s.clone())]));
        assert!(check("?s < \"2\"", &[("s", s)]));
    }

    #[test]
    fn iri_equality_only() {
        let i = Term::iri("http://x/a");
        assert!(check("?i = <http://x/a>", &[("i", i.clone())]));
        assert!(check("?i != <http://x/b>", &[("i", i.clone())]));
        assert!(!check("?i < <http://x/b>", &[("i", i.clone())]));
        assert!(!check("!(?i < <http://x/b>)", &[("i", i.clone())]));
        assert!(!check("?i", &[("i", i)]));
    }

    #[test]
    fn effective_boolean_values() {
        assert!(check("?b", &[("b", Term::boolean(true))]));
        assert!(!check("?b", &[("b", Term::string(""))]));
        assert!(check("?b", &[("b", Term::double(0.5))]));
        assert!(check("(?b = 1) = true", &[("b", Term::double(1.0))]));
    }
}
