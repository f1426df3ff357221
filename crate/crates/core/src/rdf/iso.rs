//! Graph isomorphism up to blank node renaming, by signature-pruned
//! backtracking. Intended for the small graphs used in tests and snapshot
//! checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Term, Triple};

type Signature = BTreeMap<(u8, Option<Term>, Option<Term>), usize>;

pub fn isomorphic(a: &[Triple], b: &[Triple]) -> bool {
    let a: BTreeSet<&Triple> = a.iter().collect();
    let b: BTreeSet<&Triple> = b.iter().collect();
    if a.len() != b.len() {
        return false;
    }
    let has_blank = |t: &&Triple| t.subject.is_blank() || t.object.is_blank();
    let (a_blank, a_ground): (Vec<&Triple>, Vec<&Triple>) = a.iter().copied().partition(has_blank);
    let (b_blank, b_ground): (Vec<&Triple>, Vec<&Triple>) = b.iter().copied().partition(has_blank);
    if a_ground != b_ground || a_blank.len() != b_blank.len() {
        return false;
    }

    let a_sigs = signatures(&a_blank);
    let b_sigs = signatures(&b_blank);
    if a_sigs.len() != b_sigs.len() {
        return false;
    }
    let mut a_nodes: Vec<&Term> = a_sigs.keys().copied().collect();
    // Most constrained first: rarest signature.
    let sig_count = |sig: &Signature| b_sigs.values().filter(|s| *s == sig).count();
    a_nodes.sort_by_key(|n| sig_count(&a_sigs[n]));

    let b_set: BTreeSet<&Triple> = b_blank.iter().copied().collect();
    let mut mapping: HashMap<&Term, &Term> = HashMap::new();
    let mut used: BTreeSet<&Term> = BTreeSet::new();
    search(&a_nodes, 0, &a_sigs, &b_sigs, &a_blank, &b_set, &mut mapping, &mut used)
}

fn signatures<'t>(triples: &[&'t Triple]) -> HashMap<&'t Term, Signature> {
    let mut sigs: HashMap<&Term, Signature> = HashMap::new();
    for t in triples {
        let ground = |x: &Term| (!x.is_blank()).then(|| x.clone());
        if t.subject.is_blank() {
            *sigs
                .entry(&t.subject)
                .or_default()
                .entry((0, Some(t.predicate.clone()), ground(&t.object)))
                .or_default() += 1;
        }
        if t.object.is_blank() {
            *sigs
                .entry(&t.object)
                .or_default()
                .entry((1, Some(t.predicate.clone()), ground(&t.subject)))
                .or_default() += 1;
        }
    }
    sigs
}

#[allow(clippy::too_many_arguments)]
fn search<'a, 'b>(
    order: &[&'a Term],
    depth: usize,
    a_sigs: &HashMap<&'a Term, Signature>,
    b_sigs: &HashMap<&'b Term, Signature>,
    a_triples: &[&'a Triple],
    b_set: &BTreeSet<&'b Triple>,
    mapping: &mut HashMap<&'a Term, &'b Term>,
    used: &mut BTreeSet<&'b Term>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let node = order[depth];
    let mut candidates: Vec<&'b Term> = b_sigs
        .iter()
        .filter(|(b, sig)| *sig == &a_sigs[node] && !used.contains(*b))
        .map(|(b, _)| *b)
        .collect();
    candidates.sort();
    for candidate in candidates {
        mapping.insert(node, candidate);
        used.insert(candidate);
        if consistent(a_triples, b_set, mapping)
            && search(order, depth + 1, a_sigs, b_sigs, a_triples, b_set, mapping, used)
        {
            return true;
        }
        mapping.remove(node);
        used.remove(candidate);
    }
    false
}

fn consistent(a_triples: &[&Triple], b_set: &BTreeSet<&Triple>, mapping: &HashMap<&Term, &Term>) -> bool {
    let map = |t: &Term| -> Option<Term> {
        if t.is_blank() {
            mapping.get(t).map(|m| (*m).clone())
        } else {
            Some(t.clone())
        }
    };
    a_triples.iter().all(|t| match (map(&t.subject), map(&t.object)) {
        (Some(s), Some(o)) => b_set.contains(&Triple {
            subject: s,
            predicate: t.predicate.clone(),
            object: o,
        }),
        _ => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: Term, p: &str, o: Term) -> Triple {
        Triple::new(s, Term::iri(p), o)
    }

    #[test]
    fn renaming_is_isomorphic() {
        let a = vec![
            t(Term::blank("x"), "http://p", Term::blank("y")),
            t(Term::blank("y"), "http://p", Term::iri("http://o")),
        ];
        let b = vec![
            t(Term::blank("1"), "http://p", Term::iri("http://o")),
            t(Term::blank("2"), "http://p", Term::blank("1")),
        ];
        assert!(isomorphic(&a, &b));
    }

    #[test]
    fn structure_matters() {
        // A 2-cycle versus two self loops.
        let a = vec![
            t(Term::blank("x"), "http://p", Term::blank("y")),
            t(Term::blank("y"), "http://p", Term::blank("x")),
        ];
        let b = vec![
            t(Term::blank("x"), "http://p", Term::blank("x")),
            t(Term::blank("y"), "http://p", Term::blank("y")),
        ];
        assert!(!isomorphic(&a, &b));
        assert!(isomorphic(&a, &a));
    }

    #[test]
    fn ground_difference() {
        let a = vec![t(Term::iri("http://s"), "http://p", Term::string("1"))];
        let b = vec![t(Term::iri("http://s"), "http://p", Term::string("2"))];
        assert!(!isomorphic(&a, &b));
    }
}
