//! Basic graph pattern evaluation over a store snapshot.
//!
//! Patterns are joined in a greedy most-bound-first order. Each filter runs
//! as soon as all of its variables are bound; filters mentioning a variable
//! that no pattern binds drop every row.
//!
//! Zero-step matches of `p*` range over the graph's nodes (subjects and
//! objects) plus the terms written in subject or object position of the
//! query.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use super::ast::*;
use super::filter;
use crate::rdf::{Graph, Term, TermId};

pub type Row = BTreeMap<String, Term>;

/// Query result: projected variable names and rows in evaluation order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    pub vars: Vec<String>,
    pub rows: Vec<Row>,
}

impl Solution {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows sorted, for multiset comparison.
    pub fn sorted_rows(&self) -> Vec<Row> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    /// Values bound to `var`, row by row.
    pub fn column<'a>(&'a self, var: &'a str) -> impl Iterator<Item = &'a Term> + 'a {
        self.rows.iter().filter_map(move |r| r.get(var))
    }
}

pub fn evaluate(graph: &Graph, query: &Query) -> Solution {
    let mut ctx = Ctx::new(graph, query);
    let slots: Vec<Var> = {
        let mut seen = BTreeSet::new();
        query
            .patterns
            .iter()
            .flat_map(|p| p.vars())
            .filter(|v| seen.insert((*v).clone()))
            .cloned()
            .collect()
    };
    let slot_of: HashMap<&Var, usize> = slots.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let compiled: Vec<Compiled> = query.patterns.iter().map(|p| ctx.compile(p, &slot_of)).collect();

    let order = join_order(&compiled);
    let mut bound: HashSet<usize> = HashSet::new();
    let mut pending: Vec<&Expr> = query.filters.iter().collect();
    let mut rows: Vec<Vec<Option<TermId>>> = vec![vec![None; slots.len()]];

    for &i in &order {
        if rows.is_empty() {
            break;
        }
        let pattern = &compiled[i];
        let mut next = Vec::new();
        for row in &rows {
            ctx.extend(pattern, row, &mut next);
        }
        rows = next;
        bound.extend(pattern.slots());
        let ready = take_ready(&mut pending, &bound, &slot_of, false);
        if !ready.is_empty() {
            rows.retain(|row| ready.iter().all(|f| ctx.filter(f, row, &slot_of)));
        }
    }
    let ready = take_ready(&mut pending, &bound, &slot_of, true);
    if !ready.is_empty() {
        rows.retain(|row| ready.iter().all(|f| ctx.filter(f, row, &slot_of)));
    }

    let projection = query.projection();
    let vars: Vec<String> = projection.iter().map(|v| v.0.clone()).collect();
    let rows = rows
        .into_iter()
        .map(|row| {
            projection
                .iter()
                .filter_map(|v| {
                    let id = row[*slot_of.get(v)?]?;
                    Some((v.0.clone(), ctx.term(id).clone()))
                })
                .collect()
        })
        .collect();
    Solution { vars, rows }
}

/// Removes and returns the filters whose variables are all bound.
fn take_ready<'q>(
    pending: &mut Vec<&'q Expr>,
    bound: &HashSet<usize>,
    slot_of: &HashMap<&Var, usize>,
    final_pass: bool,
) -> Vec<&'q Expr> {
    let mut ready = Vec::new();
    pending.retain(|f| {
        let all_bound = f
            .vars()
            .iter()
            .all(|v| slot_of.get(v).is_some_and(|s| bound.contains(s)));
        if all_bound || final_pass {
            ready.push(*f);
            false
        } else {
            true
        }
    });
    ready
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(TermId),
}

enum Pred<'q> {
    Var(usize),
    Path(&'q Path),
}

struct Compiled<'q> {
    subject: Slot,
    predicate: Pred<'q>,
    object: Slot,
}

impl Compiled<'_> {
    fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        let s = match self.subject {
            Slot::Var(i) => Some(i),
            Slot::Const(_) => None,
        };
        let p = match self.predicate {
            Pred::Var(i) => Some(i),
            Pred::Path(_) => None,
        };
        let o = match self.object {
            Slot::Var(i) => Some(i),
            Slot::Const(_) => None,
        };
        s.into_iter().chain(p).chain(o)
    }
}

/// Greedy order: at each step pick the pattern with the most positions that
/// are constants or already-bound variables; ties keep textual order.
fn join_order(patterns: &[Compiled]) -> Vec<usize> {
    let mut bound: HashSet<usize> = HashSet::new();
    let mut remaining: Vec<usize> = (0..patterns.len()).collect();
    let mut order = Vec::with_capacity(patterns.len());
    while !remaining.is_empty() {
        let score = |p: &Compiled| {
            let slot = |s: Slot| match s {
                Slot::Const(_) => 1,
                Slot::Var(i) => bound.contains(&i) as usize,
            };
            let pred = match p.predicate {
                Pred::Path(Path::Iri(_)) => 1,
                Pred::Path(_) => 0,
                Pred::Var(i) => bound.contains(&i) as usize,
            };
            // Subject/object bindings narrow far more than the predicate.
            2 * slot(p.subject) + 2 * slot(p.object) + pred
        };
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .max_by_key(|(pos, &i)| (score(&patterns[i]), std::cmp::Reverse(*pos)))
            .expect("non-empty");
        let i = remaining.remove(pos);
        bound.extend(patterns[i].slots());
        order.push(i);
    }
    order
}

struct Ctx<'g> {
    graph: &'g Graph,
    extra: Vec<Term>,
    extra_ids: HashMap<Term, TermId>,
    constants: Vec<TermId>,
    universe: Option<HashSet<TermId>>,
    pairs_cache: HashMap<Path, Vec<(TermId, TermId)>>,
}

impl<'g> Ctx<'g> {
    fn new(graph: &'g Graph, query: &Query) -> Self {
        let mut ctx = Ctx {
            graph,
            extra: Vec::new(),
            extra_ids: HashMap::new(),
            constants: Vec::new(),
            universe: None,
            pairs_cache: HashMap::new(),
        };
        for p in &query.patterns {
            for tp in [&p.subject, &p.object] {
                if let TermPattern::Term(t) = tp {
                    let id = ctx.resolve(t);
                    ctx.constants.push(id);
                }
            }
        }
        ctx
    }

    fn resolve(&mut self, term: &Term) -> TermId {
        if let Some(id) = self.graph.lookup(term) {
            return id;
        }
        if let Some(&id) = self.extra_ids.get(term) {
            return id;
        }
        let id = self.graph.id_bound() + self.extra.len() as TermId;
        self.extra.push(term.clone());
        self.extra_ids.insert(term.clone(), id);
        id
    }

    fn term(&self, id: TermId) -> &Term {
        if id < self.graph.id_bound() {
            self.graph.term(id)
        } else {
            &self.extra[(id - self.graph.id_bound()) as usize]
        }
    }

    fn compile<'q>(&mut self, p: &'q TriplePattern, slot_of: &HashMap<&Var, usize>) -> Compiled<'q> {
        let mut slot = |tp: &TermPattern| match tp {
            TermPattern::Var(v) => Slot::Var(slot_of[v]),
            TermPattern::Term(t) => Slot::Const(self.resolve(t)),
        };
        let subject = slot(&p.subject);
        let object = slot(&p.object);
        let predicate = match &p.predicate {
            PredicatePattern::Var(v) => Pred::Var(slot_of[v]),
            PredicatePattern::Path(path) => Pred::Path(path),
        };
        Compiled {
            subject,
            predicate,
            object,
        }
    }

    fn filter(&self, expr: &Expr, row: &[Option<TermId>], slot_of: &HashMap<&Var, usize>) -> bool {
        let lookup = |v: &Var| {
            let id = row[*slot_of.get(v)?]?;
            Some(self.term(id).clone())
        };
        filter::passes(expr, &lookup)
    }

    fn extend(&mut self, p: &Compiled, row: &[Option<TermId>], out: &mut Vec<Vec<Option<TermId>>>) {
        let value = |s: Slot| match s {
            Slot::Const(id) => Some(id),
            Slot::Var(i) => row[i],
        };
        let s = value(p.subject);
        let o = value(p.object);
        let mut emit = |bindings: &[(Slot, TermId)]| {
            let mut next = row.to_vec();
            for &(slot, id) in bindings {
                if let Slot::Var(i) = slot {
                    match next[i] {
                        Some(existing) if existing != id => return,
                        _ => next[i] = Some(id),
                    }
                }
            }
            out.push(next);
        };
        match p.predicate {
            Pred::Var(pi) => {
                let pred = row[pi];
                for [ts, tp, to] in self.graph.match_ids(s, pred, o) {
                    emit(&[(p.subject, ts), (Slot::Var(pi), tp), (p.object, to)]);
                }
            }
            Pred::Path(path) => match (s, o) {
                (Some(s), Some(o)) => {
                    if self.step(path, s, true).contains(&o) {
                        emit(&[]);
                    }
                }
                (Some(s), None) => {
                    for y in self.step(path, s, true) {
                        emit(&[(p.object, y)]);
                    }
                }
                (None, Some(o)) => {
                    for x in self.step(path, o, false) {
                        emit(&[(p.subject, x)]);
                    }
                }
                (None, None) => {
                    for (x, y) in self.pairs(path) {
                        emit(&[(p.subject, x), (p.object, y)]);
                    }
                }
            },
        }
    }

    fn in_universe(&mut self, id: TermId) -> bool {
        self.universe().contains(&id)
    }

    fn universe(&mut self) -> &HashSet<TermId> {
        if self.universe.is_none() {
            let mut u: HashSet<TermId> = self.constants.iter().copied().collect();
            for [s, _, o] in self.graph.match_ids(None, None, None) {
                u.insert(s);
                u.insert(o);
            }
            self.universe = Some(u);
        }
        self.universe.as_ref().expect("initialized above")
    }

    /// Nodes reachable from `from` along `path` (forward) or reaching it
    /// (backward).
    fn step(&mut self, path: &Path, from: TermId, forward: bool) -> BTreeSet<TermId> {
        match path {
            Path::Iri(iri) => {
                let Some(p) = self.graph.lookup(&Term::iri(iri.as_str())) else {
                    return BTreeSet::new();
                };
                if forward {
                    self.graph
                        .match_ids(Some(from), Some(p), None)
                        .map(|[_, _, o]| o)
                        .collect()
                } else {
                    self.graph
                        .match_ids(None, Some(p), Some(from))
                        .map(|[s, _, _]| s)
                        .collect()
                }
            }
            Path::Inverse(inner) => self.step(inner, from, !forward),
            Path::Sequence(a, b) => {
                let (first, second) = if forward { (a, b) } else { (b, a) };
                let mut out = BTreeSet::new();
                for mid in self.step(first, from, forward) {
                    out.extend(self.step(second, mid, forward));
                }
                out
            }
            Path::ZeroOrMore(inner) => {
                if !self.in_universe(from) {
                    return BTreeSet::new();
                }
                let mut visited = BTreeSet::from([from]);
                let mut queue = VecDeque::from([from]);
                while let Some(node) = queue.pop_front() {
                    for next in self.step(inner, node, forward) {
                        if visited.insert(next) {
                            queue.push_back(next);
                        }
                    }
                }
                visited
            }
        }
    }

    /// All `(subject, object)` pairs connected by `path`.
    fn pairs(&mut self, path: &Path) -> Vec<(TermId, TermId)> {
        if let Some(cached) = self.pairs_cache.get(path) {
            return cached.clone();
        }
        let result: Vec<(TermId, TermId)> = match path {
            Path::Iri(iri) => match self.graph.lookup(&Term::iri(iri.as_str())) {
                Some(p) => self
                    .graph
                    .match_ids(None, Some(p), None)
                    .map(|[s, _, o]| (s, o))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
                None => Vec::new(),
            },
            Path::Inverse(inner) => {
                let mut swapped: Vec<_> = self.pairs(inner).into_iter().map(|(s, o)| (o, s)).collect();
                swapped.sort_unstable();
                swapped
            }
            Path::Sequence(a, b) => {
                let mut out = BTreeSet::new();
                let mut memo: HashMap<TermId, BTreeSet<TermId>> = HashMap::new();
                for (x, mid) in self.pairs(a) {
                    let reached = memo.entry(mid).or_insert_with(|| self.step(b, mid, true));
                    for &y in reached.iter() {
                        out.insert((x, y));
                    }
                }
                out.into_iter().collect()
            }
            Path::ZeroOrMore(_) => {
                let mut nodes: Vec<TermId> = self.universe().iter().copied().collect();
                nodes.sort_unstable();
                let mut out = Vec::new();
                for x in nodes {
                    for y in self.step(path, x, true) {
                        out.push((x, y));
                    }
                }
                out
            }
        };
        self.pairs_cache.insert(path.clone(), result.clone());
        result
    }
}
