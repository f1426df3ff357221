//! In-memory triple store with SPO/POS/OSP indexes and snapshot reads.
//!
//! Readers take an immutable [`Snapshot`]; writers go through a single
//! mutation lock, build the next graph and publish it atomically.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::ops::Bound;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use super::turtle::{self, BlankLabels, TurtleError};
use super::{PrefixMap, Term, Triple, TripleError};

pub type TermId = u32;

/// An immutable view of the store at one revision.
pub type Snapshot = Arc<Graph>;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    InvalidTriple(#[from] TripleError),
    #[error(transparent)]
    Turtle(#[from] TurtleError),
    #[error("journal {path}: {message}")]
    Journal { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Triple set with three orderings over interned term ids.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: BTreeSet<[TermId; 3]>,
    pos: BTreeSet<[TermId; 3]>,
    osp: BTreeSet<[TermId; 3]>,
    prefixes: PrefixMap,
    revision: u64,
    next_blank: u64,
}

fn range(
    set: &BTreeSet<[TermId; 3]>,
    a: TermId,
    b: Option<TermId>,
) -> std::collections::btree_set::Range<'_, [TermId; 3]> {
    match b {
        Some(b) => set.range([a, b, 0]..=[a, b, TermId::MAX]),
        None => set.range((
            Bound::Included([a, 0, 0]),
            Bound::Included([a, TermId::MAX, TermId::MAX]),
        )),
    }
}

impl Graph {
    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    /// Number of interned ids. Ids at or above this bound are never stored.
    pub fn id_bound(&self) -> TermId {
        self.terms.len() as TermId
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    /// Triples matching the bound positions, as `[s, p, o]` ids. The index is
    /// picked from the bound-position pattern.
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> Box<dyn Iterator<Item = [TermId; 3]> + '_> {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => Box::new(self.spo.contains(&[s, p, o]).then_some([s, p, o]).into_iter()),
            (Some(s), p, None) => Box::new(range(&self.spo, s, p).copied()),
            (Some(s), None, Some(o)) => Box::new(range(&self.osp, o, Some(s)).map(|&[o, s, p]| [s, p, o])),
            (None, Some(p), o) => Box::new(range(&self.pos, p, o).map(|&[p, o, s]| [s, p, o])),
            (None, None, Some(o)) => Box::new(range(&self.osp, o, None).map(|&[o, s, p]| [s, p, o])),
            (None, None, None) => Box::new(self.spo.iter().copied()),
        }
    }

    /// Triples matching every bound position.
    pub fn triples_matching<'a>(
        &'a self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Box<dyn Iterator<Item = Triple> + 'a> {
        let resolve = |t: Option<&Term>| match t {
            None => Ok(None),
            Some(t) => self.lookup(t).map(Some).ok_or(()),
        };
        match (resolve(s), resolve(p), resolve(o)) {
            (Ok(s), Ok(p), Ok(o)) => Box::new(self.match_ids(s, p, o).map(|ids| self.decode(ids))),
            _ => Box::new(std::iter::empty()),
        }
    }

    pub fn decode(&self, [s, p, o]: [TermId; 3]) -> Triple {
        Triple {
            subject: self.term(s).clone(),
            predicate: self.term(p).clone(),
            object: self.term(o).clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&ids| self.decode(ids))
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        match (
            self.lookup(&triple.subject),
            self.lookup(&triple.predicate),
            self.lookup(&triple.object),
        ) {
            (Some(s), Some(p), Some(o)) => self.spo.contains(&[s, p, o]),
            _ => false,
        }
    }

    pub fn objects(&self, s: &Term, p: &str) -> Vec<Term> {
        self.triples_matching(Some(s), Some(&Term::iri(p)), None)
            .map(|t| t.object)
            .collect()
    }

    /// First object in index order, if any.
    pub fn object(&self, s: &Term, p: &str) -> Option<Term> {
        self.triples_matching(Some(s), Some(&Term::iri(p)), None)
            .next()
            .map(|t| t.object)
    }

    pub fn subjects(&self, p: &str, o: &Term) -> Vec<Term> {
        self.triples_matching(None, Some(&Term::iri(p)), Some(o))
            .map(|t| t.subject)
            .collect()
    }

    /// Ids of every term occurring in some triple, in any position.
    pub fn ids_in_use(&self) -> BTreeSet<TermId> {
        let mut ids = BTreeSet::new();
        for &[s, p, o] in &self.spo {
            ids.insert(s);
            ids.insert(p);
            ids.insert(o);
        }
        ids
    }

    /// Items of an RDF collection starting at `head`, stopping at `rdf:nil`
    /// or at the first malformed or cyclic cell.
    pub fn list_items(&self, head: &Term) -> Vec<Term> {
        use super::vocab::rdf;
        let mut items = Vec::new();
        let mut seen = BTreeSet::new();
        let mut cell = head.clone();
        while cell.as_iri() != Some(rdf::NIL) && seen.insert(cell.clone()) {
            match self.object(&cell, rdf::FIRST) {
                Some(item) => items.push(item),
                None => break,
            }
            match self.object(&cell, rdf::REST) {
                Some(next) => cell = next,
                None => break,
            }
        }
        items
    }

    fn intern(&mut self, term: &Term) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as TermId;
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        if let Term::BlankNode(label) = term {
            self.bump_blank_counter(label);
        }
        id
    }

    fn bump_blank_counter(&mut self, label: &str) {
        if let Some(n) = label.strip_prefix('b').and_then(|n| n.parse::<u64>().ok()) {
            self.next_blank = self.next_blank.max(n + 1);
        }
    }

    fn insert_triple(&mut self, t: &Triple) -> bool {
        let s = self.intern(&t.subject);
        let p = self.intern(&t.predicate);
        let o = self.intern(&t.object);
        if self.spo.insert([s, p, o]) {
            self.pos.insert([p, o, s]);
            self.osp.insert([o, s, p]);
            true
        } else {
            false
        }
    }

    fn remove_triple(&mut self, t: &Triple) -> bool {
        let (Some(s), Some(p), Some(o)) = (
            self.lookup(&t.subject),
            self.lookup(&t.predicate),
            self.lookup(&t.object),
        ) else {
            return false;
        };
        if self.spo.remove(&[s, p, o]) {
            self.pos.remove(&[p, o, s]);
            self.osp.remove(&[o, s, p]);
            true
        } else {
            false
        }
    }

    /// Serializes the whole graph as Turtle with the graph's prefixes.
    pub fn to_turtle(&self, labels: BlankLabels) -> String {
        let triples: Vec<Triple> = self.iter().collect();
        turtle::serialize_turtle(&triples, &self.prefixes, labels)
    }

    #[cfg(test)]
    pub(crate) fn indexes_agree(&self) -> bool {
        let from_pos: BTreeSet<_> = self.pos.iter().map(|&[p, o, s]| [s, p, o]).collect();
        let from_osp: BTreeSet<_> = self.osp.iter().map(|&[o, s, p]| [s, p, o]).collect();
        from_pos == self.spo && from_osp == self.spo
    }
}

/// A set of removals followed by insertions, applied atomically.
#[derive(Debug, Clone, Default)]
pub struct Batch {
    pub remove: Vec<Triple>,
    pub insert: Vec<Triple>,
}

impl Batch {
    pub fn insert(triples: Vec<Triple>) -> Self {
        Batch {
            remove: Vec::new(),
            insert: triples,
        }
    }

    pub fn remove(triples: Vec<Triple>) -> Self {
        Batch {
            remove: triples,
            insert: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.remove.is_empty() && self.insert.is_empty()
    }
}

struct Writer {
    journal: Option<Journal>,
    /// Snapshot file the store was opened from; exporting there compacts
    /// the journal.
    snapshot: Option<PathBuf>,
}

/// The triple store. Cheap to share behind an `Arc`.
pub struct Store {
    current: RwLock<Snapshot>,
    writer: Mutex<Writer>,
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Self {
        Store {
            current: RwLock::new(Arc::new(Graph::default())),
            writer: Mutex::new(Writer {
                journal: None,
                snapshot: None,
            }),
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        self.current.read().expect("store lock poisoned").clone()
    }

    pub fn revision(&self) -> u64 {
        self.snapshot().revision()
    }

    pub fn insert(&self, triples: impl IntoIterator<Item = Triple>) -> Result<u64, StoreError> {
        self.apply(Batch::insert(triples.into_iter().collect()))
    }

    pub fn remove(&self, triples: impl IntoIterator<Item = Triple>) -> Result<u64, StoreError> {
        self.apply(Batch::remove(triples.into_iter().collect()))
    }

    /// Applies a batch and returns the resulting revision. A batch that
    /// changes nothing leaves the revision untouched.
    pub fn apply(&self, batch: Batch) -> Result<u64, StoreError> {
        self.update(|_| Ok::<_, StoreError>((batch, ()))).map(|(rev, ())| rev)
    }

    /// Read-modify-write under the mutation lock: `f` sees the latest graph
    /// and returns the batch to apply.
    pub fn update<R, E>(&self, f: impl FnOnce(&Graph) -> Result<(Batch, R), E>) -> Result<(u64, R), E>
    where
        E: From<StoreError>,
    {
        let mut writer = self.writer.lock().expect("store writer poisoned");
        let current = self.snapshot();
        let (batch, result) = f(&current)?;
        for t in batch.remove.iter().chain(&batch.insert) {
            t.validate().map_err(StoreError::from)?;
        }
        let mut next = (*current).clone();
        let removed: Vec<&Triple> = batch.remove.iter().filter(|t| next.remove_triple(t)).collect();
        let inserted: Vec<&Triple> = batch.insert.iter().filter(|t| next.insert_triple(t)).collect();
        if removed.is_empty() && inserted.is_empty() {
            return Ok((current.revision, result));
        }
        next.revision = current.revision + 1;
        if let Some(journal) = writer.journal.as_mut() {
            journal.append(next.revision, &removed, &inserted)?;
        }
        *self.current.write().expect("store lock poisoned") = Arc::new(next);
        Ok((current.revision + 1, result))
    }

    /// Binds prefixes for serialization and query defaults. Does not change
    /// the revision.
    pub fn add_prefixes(&self, prefixes: &PrefixMap) -> Result<(), StoreError> {
        let mut writer = self.writer.lock().expect("store writer poisoned");
        let mut next = (*self.snapshot()).clone();
        for (p, ns) in prefixes.iter() {
            next.prefixes.insert(p, ns);
        }
        if let Some(journal) = writer.journal.as_mut() {
            journal.append_prefixes(prefixes)?;
        }
        *self.current.write().expect("store lock poisoned") = Arc::new(next);
        Ok(())
    }

    /// Parses a Turtle document and inserts it as one batch. Blank nodes are
    /// relabelled with fresh store-scoped ids, so loading the same document
    /// twice yields two copies of its blank structure.
    pub fn load_turtle(&self, text: &str, base: Option<&str>) -> Result<u64, StoreError> {
        let doc = turtle::parse_turtle_with_prefixes(text, base, &self.snapshot().prefixes)?;
        self.add_prefixes(&doc.prefixes)?;
        let (rev, ()) = self.update(|graph| {
            let mut next_blank = graph.next_blank;
            let mut labels: HashMap<String, Term> = HashMap::new();
            let mut relabel = |t: Term| match t {
                Term::BlankNode(label) => labels
                    .entry(label)
                    .or_insert_with(|| {
                        next_blank += 1;
                        Term::BlankNode(format!("b{}", next_blank - 1))
                    })
                    .clone(),
                other => other,
            };
            let triples = doc
                .triples
                .into_iter()
                .map(|t| Triple {
                    subject: relabel(t.subject),
                    predicate: t.predicate,
                    object: relabel(t.object),
                })
                .collect();
            Ok::<_, StoreError>((Batch::insert(triples), ()))
        })?;
        Ok(rev)
    }

    /// Mints a blank node that no current triple uses.
    pub fn fresh_blank(&self) -> Term {
        let _writer = self.writer.lock().expect("store writer poisoned");
        let mut next = (*self.snapshot()).clone();
        let label = format!("b{}", next.next_blank);
        next.next_blank += 1;
        *self.current.write().expect("store lock poisoned") = Arc::new(next);
        Term::BlankNode(label)
    }

    /// Opens a persistent store: loads `snapshot` when present (keeping its
    /// blank labels), replays the journal, then journals every later batch.
    pub fn open(snapshot: &Path, journal: &Path) -> Result<Self, StoreError> {
        let store = Store::new();
        if snapshot.exists() {
            let text = fs::read_to_string(snapshot).map_err(io_err(snapshot))?;
            store.load_preserving_labels(&text)?;
        }
        if journal.exists() {
            Journal::replay(journal, &store)?;
        }
        store.attach_journal(journal)?;
        store.writer.lock().expect("store writer poisoned").snapshot = Some(snapshot.to_owned());
        Ok(store)
    }

    /// Whether a store was previously persisted at these paths.
    pub fn persisted(snapshot: &Path, journal: &Path) -> bool {
        snapshot.exists() || journal.metadata().map(|m| m.len() > 0).unwrap_or(false)
    }

    fn load_preserving_labels(&self, text: &str) -> Result<u64, StoreError> {
        let revision = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("#@revision "))
            .and_then(|r| r.trim().parse::<u64>().ok());
        let doc = turtle::parse_turtle(text, None)?;
        self.add_prefixes(&doc.prefixes)?;
        self.insert(doc.triples)?;
        if let Some(revision) = revision {
            let mut next = (*self.snapshot()).clone();
            next.revision = revision;
            *self.current.write().expect("store lock poisoned") = Arc::new(next);
        }
        Ok(self.revision())
    }

    pub fn attach_journal(&self, path: &Path) -> Result<(), StoreError> {
        let mut writer = self.writer.lock().expect("store writer poisoned");
        writer.journal = Some(Journal::open(path)?);
        Ok(())
    }

    /// Writes the full graph to `path` (temp file + rename). When `path` is
    /// the snapshot the store was opened from, the journal is truncated
    /// since the snapshot now subsumes it; any other path is a plain copy.
    pub fn export_snapshot(&self, path: &Path) -> Result<u64, StoreError> {
        let mut writer = self.writer.lock().expect("store writer poisoned");
        let graph = self.snapshot();
        let text = format!(
            "#@revision {}\n{}",
            graph.revision,
            graph.to_turtle(BlankLabels::Preserve)
        );
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let tmp = path.with_extension("ttl.tmp");
        fs::write(&tmp, text).map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))?;
        if writer.snapshot.as_deref() == Some(path) {
            if let Some(journal) = writer.journal.as_mut() {
                journal.truncate()?;
            }
        }
        Ok(graph.revision)
    }
}

/// Write-ahead log of committed batches in N-Triples lines.
///
/// ```text
/// #@batch 12
/// -<s> <p> <o> .
/// +<s> <p> "o" .
/// #@commit 12
/// ```
///
/// A batch without its commit marker (torn write) is ignored on replay.
struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    fn open(path: &Path) -> Result<Self, StoreError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        Ok(Journal {
            path: path.to_owned(),
            file,
        })
    }

    fn append(&mut self, revision: u64, removed: &[&Triple], inserted: &[&Triple]) -> Result<(), StoreError> {
        let mut text = format!("#@batch {revision}\n");
        for t in removed {
            text.push('-');
            text.push_str(&t.to_string());
            text.push('\n');
        }
        for t in inserted {
            text.push('+');
            text.push_str(&t.to_string());
            text.push('\n');
        }
        text.push_str(&format!("#@commit {revision}\n"));
        self.file.write_all(text.as_bytes()).map_err(io_err(&self.path))?;
        self.file.flush().map_err(io_err(&self.path))
    }

    fn append_prefixes(&mut self, prefixes: &PrefixMap) -> Result<(), StoreError> {
        let mut text = String::new();
        for (p, ns) in prefixes.iter() {
            text.push_str(&format!("#@prefix {p} {ns}\n"));
        }
        self.file.write_all(text.as_bytes()).map_err(io_err(&self.path))
    }

    fn truncate(&mut self) -> Result<(), StoreError> {
        self.file.set_len(0).map_err(io_err(&self.path))
    }

    fn replay(path: &Path, store: &Store) -> Result<(), StoreError> {
        let file = File::open(path).map_err(io_err(path))?;
        let corrupt = |line: usize, msg: &str| StoreError::Journal {
            path: path.to_owned(),
            message: format!("line {line}: {msg}"),
        };
        let mut pending: Option<Batch> = None;
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_err(path))?;
            if let Some(rest) = line.strip_prefix("#@prefix ") {
                let (p, ns) = rest.split_once(' ').ok_or_else(|| corrupt(n + 1, "bad prefix"))?;
                let prefixes: PrefixMap = [(p, ns)].into_iter().collect();
                store.add_prefixes(&prefixes)?;
            } else if line.starts_with("#@batch ") {
                pending = Some(Batch::default());
            } else if line.starts_with("#@commit ") {
                let batch = pending.take().ok_or_else(|| corrupt(n + 1, "commit without batch"))?;
                store.apply(batch)?;
            } else if let Some(batch) = pending.as_mut() {
                let (sign, body) = line.split_at(line.len().min(1));
                let doc = turtle::parse_turtle(body, None)?;
                let [triple] =
                    <[Triple; 1]>::try_from(doc.triples).map_err(|_| corrupt(n + 1, "expected exactly one triple"))?;
                match sign {
                    "+" => batch.insert.push(triple),
                    "-" => batch.remove.push(triple),
                    _ => return Err(corrupt(n + 1, "expected '+' or '-'")),
                }
            } else if !line.trim().is_empty() {
                return Err(corrupt(n + 1, "triple outside batch"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::vocab::rdf;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(Term::iri(s), Term::iri(p), Term::iri(o))
    }

    #[test]
    fn empty_batch_keeps_revision() {
        let store = Store::new();
        assert_eq!(store.insert(vec![]).unwrap(), 0);
        assert_eq!(store.insert(vec![t("http://s", "http://p", "http://o")]).unwrap(), 1);
        assert_eq!(store.insert(vec![]).unwrap(), 1);
    }

    #[test]
    fn duplicate_insert_is_idempotent() {
        let store = Store::new();
        let triple = t("http://s", "http://p", "http://o");
        store.insert(vec![triple.clone(), triple.clone()]).unwrap();
        assert_eq!(store.snapshot().len(), 1);
        assert_eq!(
            store.insert(vec![triple]).unwrap(),
            1,
            "no-op batch must not bump revision"
        );
    }

    #[test]
    fn thousand_generated_triples() {
        let store = Store::new();
        let mut oracle = std::collections::HashSet::new();
        let mut triples = Vec::new();
        for i in 0..1000 {
            let tr = t(
                &format!("http://s/{}", i % 37),
                &format!("http://p/{}", i % 5),
                &format!("http://o/{i}"),
            );
            oracle.insert(tr.clone());
            triples.push(tr);
        }
        store.insert(triples).unwrap();
        let snap = store.snapshot();
        assert_eq!(snap.triples_matching(None, None, None).count(), oracle.len());
        assert_eq!(oracle.len(), 1000);
        assert!(snap.indexes_agree());
    }

    #[test]
    fn match_by_type() {
        let store = Store::new();
        store
            .insert(vec![
                t("http://a", rdf::TYPE, "http://C"),
                t("http://b", rdf::TYPE, "http://D"),
                t("http://a", "http://p", "http://b"),
            ])
            .unwrap();
        let snap = store.snapshot();
        assert_eq!(
            snap.triples_matching(None, Some(&Term::iri(rdf::TYPE)), None).count(),
            2
        );
        let a_types: Vec<_> = snap
            .triples_matching(Some(&Term::iri("http://a")), Some(&Term::iri(rdf::TYPE)), None)
            .map(|t| t.object)
            .collect();
        assert_eq!(a_types, vec![Term::iri("http://C")]);
        assert_eq!(
            snap.triples_matching(Some(&Term::iri("http://zzz")), None, None)
                .count(),
            0
        );
    }

    #[test]
    fn snapshot_isolation() {
        let store = Store::new();
        store.insert(vec![t("http://s", "http://p", "http://o1")]).unwrap();
        let before = store.snapshot();
        store.insert(vec![t("http://s", "http://p", "http://o2")]).unwrap();
        store.remove(vec![t("http://s", "http://p", "http://o1")]).unwrap();
        assert_eq!(before.len(), 1);
        assert!(before.contains(&t("http://s", "http://p", "http://o1")));
        assert_eq!(before.revision(), 1);
        assert_eq!(store.revision(), 3);
    }

    #[test]
    fn concurrent_readers_see_constant_snapshots() {
        let store = Arc::new(Store::new());
        let writer = {
            let store = store.clone();
            std::thread::spawn(move || {
                for i in 0..200 {
                    store
                        .insert(vec![t("http://s", "http://p", &format!("http://o/{i}"))])
                        .unwrap();
                }
            })
        };
        let readers: Vec<_> = (0..4)
            .map(|_| {
                let store = store.clone();
                std::thread::spawn(move || {
                    for _ in 0..50 {
                        let snap = store.snapshot();
                        let n = snap.len();
                        let rev = snap.revision();
                        std::thread::yield_now();
                        assert_eq!(snap.iter().count(), n);
                        assert_eq!(n as u64, rev);
                    }
                })
            })
            .collect();
        writer.join().unwrap();
        for r in readers {
            r.join().unwrap();
        }
        assert_eq!(store.snapshot().len(), 200);
    }

    #[test]
    fn load_turtle_relabels_blank_nodes() {
        let store = Store::new();
        let doc = "<http://s> <http://p> _:x . _:x <http://q> [ <http://r> 1 ] .";
        store.load_turtle(doc, None).unwrap();
        store.load_turtle(doc, None).unwrap();
        let snap = store.snapshot();
        assert_eq!(snap.len(), 6);
        for triple in snap.iter() {
            if let Term::BlankNode(label) = &triple.subject {
                assert!(label.starts_with('b'), "{label}");
            }
        }
        assert_ne!(store.fresh_blank(), store.fresh_blank());
    }

    #[test]
    fn rejects_literal_subject() {
        let store = Store::new();
        let bad = Triple {
            subject: Term::string("x"),
            predicate: Term::iri("http://p"),
            object: Term::iri("http://o"),
        };
        assert!(matches!(store.insert(vec![bad]), Err(StoreError::InvalidTriple(_))));
        assert_eq!(store.revision(), 0);
    }

    #[test]
    fn exporting_elsewhere_keeps_the_journal() {
        let dir = tempfile::tempdir().unwrap();
        let (snap_path, journal_path) = (dir.path().join("store.ttl"), dir.path().join("journal.log"));
        {
            let store = Store::open(&snap_path, &journal_path).unwrap();
            store
                .insert(vec![t("http://ex/a", "http://ex/p", "http://ex/b")])
                .unwrap();
            store.export_snapshot(&dir.path().join("copy.ttl")).unwrap();
        }
        assert!(fs::metadata(&journal_path).unwrap().len() > 0);
        assert_eq!(Store::open(&snap_path, &journal_path).unwrap().snapshot().len(), 1);
    }

    #[test]
    fn journal_and_snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let snap_path = dir.path().join("store.ttl");
        let journal_path = dir.path().join("journal.log");
        {
            let store = Store::open(&snap_path, &journal_path).unwrap();
            store
                .load_turtle("@prefix ex: <http://ex/> . ex:a ex:p [ ex:q 1 ] .", None)
                .unwrap();
            store
                .insert(vec![t("http://ex/a", "http://ex/p", "http://ex/b")])
                .unwrap();
            store
                .remove(vec![t("http://ex/a", "http://ex/p", "http://ex/b")])
                .unwrap();
            store
                .insert(vec![t("http://ex/c", "http://ex/p", "http://ex/d")])
                .unwrap();
        }
        let reopened = Store::open(&snap_path, &journal_path).unwrap();
        let snap = reopened.snapshot();
        assert_eq!(snap.len(), 3);
        assert_eq!(snap.prefixes().get("ex"), Some("http://ex/"));
        assert!(!snap.contains(&t("http://ex/a", "http://ex/p", "http://ex/b")));

        reopened.export_snapshot(&snap_path).unwrap();
        assert_eq!(fs::metadata(&journal_path).unwrap().len(), 0);
        // Removal of a blank-node triple after compaction must still match.
        let blank_triple = snap.iter().find(|t| t.subject.is_blank()).unwrap();
        reopened.remove(vec![blank_triple.clone()]).unwrap();
        drop(reopened);
        let again = Store::open(&snap_path, &journal_path).unwrap();
        assert_eq!(again.snapshot().len(), 2);
        assert!(!again.snapshot().contains(&blank_triple));
    }

    #[test]
    fn torn_journal_batch_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let journal = dir.path().join("journal.log");
        fs::write(
            &journal,
            "#@batch 1\n+<http://a> <http://p> <http://b> .\n#@commit 1\n#@batch 2\n+<http://c> <http://p> <http://d> .\n",
        )
        .unwrap();
        let store = Store::open(&dir.path().join("none.ttl"), &journal).unwrap();
        assert_eq!(store.snapshot().len(), 1);
    }

    #[test]
    fn list_items_follows_rest_chain() {
        let store = Store::new();
        store
            .load_turtle("<http://c> <http://l> ( <http://x> <http://y> ) .", None)
            .unwrap();
        let snap = store.snapshot();
        let head = snap.object(&Term::iri("http://c"), "http://l").unwrap();
        assert_eq!(
            snap.list_items(&head),
            vec![Term::iri("http://x"), Term::iri("http://y")]
        );
    }
}
