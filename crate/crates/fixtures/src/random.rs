//! Seeded random graphs and queries for evaluator cross-checks.
//!
//! Cases are plain text (N-Triples-style Turtle and SPARQL) so they exercise
//! the parsers too. Graphs use a small vocabulary to force joins.

use std::fmt::Write;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const NS: &str = "http://example.org/r/";
const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
const NODES: usize = 10;
const PREDICATES: usize = 4;
const VARS: [&str; 4] = ["a", "b", "c", "d"];

/// Size limits for generated cases.
#[derive(Debug, Clone, Copy)]
pub struct CaseLimits {
    pub max_triples: usize,
    pub max_patterns: usize,
    pub max_star_paths: usize,
    pub max_filters: usize,
}

impl Default for CaseLimits {
    fn default() -> Self {
        CaseLimits {
            max_triples: 200,
            max_patterns: 5,
            max_star_paths: 1,
            max_filters: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomCase {
    pub seed: u64,
    pub turtle: String,
    pub query: String,
    pub triples: usize,
    pub patterns: usize,
    pub star_paths: usize,
    pub filters: usize,
}

fn node(i: usize) -> String {
    format!("<{NS}n{i}>")
}

fn predicate(i: usize) -> String {
    format!("<{NS}p{i}>")
}

fn literal(rng: &mut StdRng) -> String {
    match rng.gen_range(0..4) {
        0 => format!("\"{}\"^^<{XSD_INTEGER}>", rng.gen_range(0..5)),
        1 => format!("\"{}.5\"^^<{XSD_DECIMAL}>", rng.gen_range(0..4)),
        2 => format!("\"{}\"", ["a", "b", "c"].choose(rng).unwrap()),
        _ => format!("\"{}\"@en", ["a", "b"].choose(rng).unwrap()),
    }
}

fn object(rng: &mut StdRng) -> String {
    if rng.gen_bool(0.7) {
        node(rng.gen_range(0..NODES))
    } else {
        literal(rng)
    }
}

fn graph(rng: &mut StdRng, max: usize) -> (String, usize) {
    let n = rng.gen_range(0..=max);
    let mut out = String::new();
    for _ in 0..n {
        let s = node(rng.gen_range(0..NODES));
        let p = predicate(rng.gen_range(0..PREDICATES));
        let o = object(rng);
        writeln!(out, "{s} {p} {o} .").unwrap();
    }
    (out, n)
}

fn var(rng: &mut StdRng, used: &mut Vec<&'static str>) -> String {
    let v = *VARS.choose(rng).unwrap();
    if !used.contains(&v) {
        used.push(v);
    }
    format!("?{v}")
}

fn simple_path(rng: &mut StdRng) -> String {
    let p = predicate(rng.gen_range(0..PREDICATES));
    match rng.gen_range(0..5) {
        0 => format!("^{p}"),
        1 => format!("{p}/{}", predicate(rng.gen_range(0..PREDICATES))),
        _ => p,
    }
}

fn star_path(rng: &mut StdRng) -> String {
    let p = predicate(rng.gen_range(0..PREDICATES));
    let q = predicate(rng.gen_range(0..PREDICATES));
    match rng.gen_range(0..4) {
        0 => format!("{p}*"),
        1 => format!("{p}*/{q}"),
        2 => format!("^{p}*"),
        _ => format!("({p}/{q})*"),
    }
}

fn filter(rng: &mut StdRng, used: &[&'static str]) -> String {
    let v = format!("?{}", used.choose(rng).unwrap());
    let w = format!("?{}", used.choose(rng).unwrap());
    let op = ["=", "!=", "<", "<=", ">", ">="].choose(rng).unwrap();
    let rhs = match rng.gen_range(0..4) {
        0 => format!("{}", rng.gen_range(0..5)),
        1 => node(rng.gen_range(0..NODES)),
        2 => "\"b\"".to_owned(),
        _ => w.clone(),
    };
    match rng.gen_range(0..4) {
        0 => format!("!({v} {op} {rhs})"),
        1 => format!("{v} {op} {rhs} || {w} = {}", node(rng.gen_range(0..NODES))),
        2 => format!("{v} {op} {rhs} && {w} != \"a\""),
        _ => format!("{v} {op} {rhs}"),
    }
}

/// One case, fully determined by `seed`.
pub fn random_case(seed: u64, limits: CaseLimits) -> RandomCase {
    let mut rng = StdRng::seed_from_u64(seed);
    let (turtle, triples) = graph(&mut rng, limits.max_triples);
    let patterns = rng.gen_range(1..=limits.max_patterns.max(1));
    let star_at = (limits.max_star_paths > 0 && rng.gen_bool(0.5)).then(|| rng.gen_range(0..patterns));
    let mut used = Vec::new();
    let mut body = String::new();
    for i in 0..patterns {
        let s = if rng.gen_bool(0.85) {
            var(&mut rng, &mut used)
        } else {
            node(rng.gen_range(0..NODES))
        };
        let p = if star_at == Some(i) {
            star_path(&mut rng)
        } else if rng.gen_bool(0.1) {
            var(&mut rng, &mut used)
        } else {
            simple_path(&mut rng)
        };
        let o = match rng.gen_range(0..10) {
            0..=6 => var(&mut rng, &mut used),
            7 | 8 => node(rng.gen_range(0..NODES)),
            _ => literal(&mut rng),
        };
        writeln!(body, "  {s} {p} {o} .").unwrap();
    }
    let filters = usize::from(limits.max_filters > 0 && !used.is_empty() && rng.gen_bool(0.5));
    if filters == 1 {
        writeln!(body, "  FILTER({})", filter(&mut rng, &used)).unwrap();
    }
    let selection = if used.is_empty() || rng.gen_bool(0.5) {
        "*".to_owned()
    } else {
        let mut chosen: Vec<_> = used
            .iter()
            .filter(|_| rng.gen_bool(0.6))
            .map(|v| format!("?{v}"))
            .collect();
        if chosen.is_empty() {
            chosen.push(format!("?{}", used[0]));
        }
        chosen.join(" ")
    };
    RandomCase {
        seed,
        turtle,
        query: format!("SELECT {selection} WHERE {{\n{body}}}\n"),
        triples,
        patterns,
        star_paths: usize::from(star_at.is_some()),
        filters,
    }
}

/// `count` cases from consecutive seeds starting at `first_seed`.
pub fn random_cases(first_seed: u64, count: usize, limits: CaseLimits) -> impl Iterator<Item = RandomCase> {
    (0..count as u64).map(move |i| random_case(first_seed + i, limits))
}
