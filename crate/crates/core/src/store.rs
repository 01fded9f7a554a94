//! In-memory named-graph quad store.
//!
//! Terms are interned into a dictionary and quads are kept as id tuples in a
//! primary set plus one posting index per position. [`QuadStore`] is the
//! single writer; [`Snapshot`] is a cheap, immutable view of one revision.
//! Both dereference to [`Dataset`], which carries every read operation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::term::{Iri, Term, TermError};

/// A statement in a named graph.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    subject: Term,
    predicate: Iri,
    object: Term,
    graph: Iri,
}

impl Quad {
    pub fn new(
        subject: impl Into<Term>,
        predicate: Iri,
        object: impl Into<Term>,
        graph: Iri,
    ) -> Result<Self, TermError> {
        let subject = subject.into();
        if subject.is_literal() {
            return Err(TermError::LiteralSubject);
        }
        Ok(Quad {
            subject,
            predicate,
            object: object.into(),
            graph,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn graph(&self) -> &Iri {
        &self.graph
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {} .", self.subject, self.predicate, self.object, self.graph)
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A quad pattern; `None` positions are wildcards.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuadPattern {
    pub subject: Option<Term>,
    pub predicate: Option<Iri>,
    pub object: Option<Term>,
    pub graph: Option<Iri>,
}

impl QuadPattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn subject(mut self, subject: impl Into<Term>) -> Self {
        self.subject = Some(subject.into());
        self
    }

    pub fn predicate(mut self, predicate: Iri) -> Self {
        self.predicate = Some(predicate);
        self
    }

    pub fn object(mut self, object: impl Into<Term>) -> Self {
        self.object = Some(object.into());
        self
    }

    pub fn graph(mut self, graph: Iri) -> Self {
        self.graph = Some(graph);
        self
    }

    pub fn matches(&self, quad: &Quad) -> bool {
        self.subject.as_ref().is_none_or(|s| s == quad.subject())
            && self.predicate.as_ref().is_none_or(|p| p == quad.predicate())
            && self.object.as_ref().is_none_or(|o| o == quad.object())
            && self.graph.as_ref().is_none_or(|g| g == quad.graph())
    }
}

type TermId = u32;
/// Subject, predicate, object, graph.
type Key = [TermId; 4];

const SUBJECT: usize = 0;
const PREDICATE: usize = 1;
const OBJECT: usize = 2;
const GRAPH: usize = 3;

/// Read side of the store.
#[derive(Clone, Default)]
pub struct Dataset {
    terms: Vec<Term>,
    ids: BTreeMap<Term, TermId>,
    quads: BTreeSet<Key>,
    index: [BTreeMap<TermId, BTreeSet<Key>>; 4],
    revision: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    /// Number of successful mutations so far.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        self.encode(quad).is_some_and(|key| self.quads.contains(&key))
    }

    /// Every quad, in storage order.
    pub fn iter(&self) -> impl Iterator<Item = Quad> + '_ {
        self.quads.iter().map(|key| self.decode(key))
    }

    /// Quads matching every bound position of `pattern`.
    pub fn quads_matching(&self, pattern: &QuadPattern) -> Vec<Quad> {
        let mut bound: [Option<TermId>; 4] = [None; 4];
        let terms: [Option<Term>; 4] = [
            pattern.subject.clone(),
            pattern.predicate.clone().map(Term::Iri),
            pattern.object.clone(),
            pattern.graph.clone().map(Term::Iri),
        ];
        for (slot, term) in bound.iter_mut().zip(terms.iter()) {
            if let Some(term) = term {
                match self.ids.get(term) {
                    Some(&id) => *slot = Some(id),
                    None => return Vec::new(),
                }
            }
        }
        let keep = |key: &&Key| bound.iter().zip(key.iter()).all(|(b, k)| b.is_none_or(|b| b == *k));

        // Scan the shortest posting list among bound positions.
        let smallest = bound
            .iter()
            .enumerate()
            .filter_map(|(pos, id)| id.map(|id| self.index[pos].get(&id)))
            .min_by_key(|postings| postings.map_or(0, BTreeSet::len));
        match smallest {
            Some(None) => Vec::new(),
            Some(Some(postings)) => postings.iter().filter(keep).map(|k| self.decode(k)).collect(),
            None => self.quads.iter().map(|k| self.decode(k)).collect(),
        }
    }

    /// Objects of `(subject, predicate, ?, graph)`.
    pub fn objects(&self, subject: &Term, predicate: &Iri, graph: &Iri) -> Vec<Term> {
        let pattern = QuadPattern::any()
            .subject(subject.clone())
            .predicate(predicate.clone())
            .graph(graph.clone());
        self.quads_matching(&pattern).into_iter().map(|q| q.object).collect()
    }

    /// Subjects of `(?, predicate, object, graph)`.
    pub fn subjects(&self, predicate: &Iri, object: &Term, graph: &Iri) -> Vec<Term> {
        let pattern = QuadPattern::any()
            .predicate(predicate.clone())
            .object(object.clone())
            .graph(graph.clone());
        self.quads_matching(&pattern).into_iter().map(|q| q.subject).collect()
    }

    /// Distinct graph names, in IRI order.
    pub fn graph_names(&self) -> Vec<Iri> {
        let mut names: Vec<Iri> = self.index[GRAPH]
            .keys()
            .filter_map(|&id| self.terms[id as usize].as_iri().cloned())
            .collect();
        names.sort();
        names
    }

    pub fn has_subject(&self, subject: &Term) -> bool {
        self.ids
            .get(subject)
            .and_then(|id| self.index[SUBJECT].get(id))
            .is_some_and(|postings| !postings.is_empty())
    }

    pub fn has_graph(&self, graph: &Iri) -> bool {
        self.ids
            .get(&Term::Iri(graph.clone()))
            .and_then(|id| self.index[GRAPH].get(id))
            .is_some_and(|postings| !postings.is_empty())
    }

    fn encode(&self, quad: &Quad) -> Option<Key> {
        Some([
            *self.ids.get(&quad.subject)?,
            *self.ids.get(&Term::Iri(quad.predicate.clone()))?,
            *self.ids.get(&quad.object)?,
            *self.ids.get(&Term::Iri(quad.graph.clone()))?,
        ])
    }

    fn decode(&self, key: &Key) -> Quad {
        let term = |id: TermId| self.terms[id as usize].clone();
        let iri = |id: TermId| match term(id) {
            Term::Iri(iri) => iri,
            other => unreachable!("non-IRI {other} stored in IRI position"),
        };
        Quad {
            subject: term(key[SUBJECT]),
            predicate: iri(key[PREDICATE]),
            object: term(key[OBJECT]),
            graph: iri(key[GRAPH]),
        }
    }

    fn intern(&mut self, term: &Term) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term dictionary overflow");
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }

    fn insert(&mut self, quad: &Quad) -> bool {
        let key = [
            self.intern(&quad.subject),
            self.intern(&Term::Iri(quad.predicate.clone())),
            self.intern(&quad.object),
            self.intern(&Term::Iri(quad.graph.clone())),
        ];
        if !self.quads.insert(key) {
            return false;
        }
        for (pos, index) in self.index.iter_mut().enumerate() {
            index.entry(key[pos]).or_default().insert(key);
        }
        self.revision += 1;
        true
    }

    fn remove(&mut self, quad: &Quad) -> bool {
        let Some(key) = self.encode(quad) else {
            return false;
        };
        if !self.quads.remove(&key) {
            return false;
        }
        for (pos, index) in self.index.iter_mut().enumerate() {
            if let Some(postings) = index.get_mut(&key[pos]) {
                postings.remove(&key);
                if postings.is_empty() {
                    index.remove(&key[pos]);
                }
            }
        }
        self.revision += 1;
        true
    }
}

impl fmt::Debug for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dataset")
            .field("len", &self.len())
            .field("revision", &self.revision)
            .finish()
    }
}

/// The writable store. Cloning shares data until the next write.
#[derive(Clone, Default, Debug)]
pub struct QuadStore {
    data: Arc<Dataset>,
}

impl QuadStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `quad`; returns `false` if it was already present.
    pub fn insert(&mut self, quad: &Quad) -> bool {
        if self.data.contains(quad) {
            return false;
        }
        Arc::make_mut(&mut self.data).insert(quad)
    }

    /// Removes `quad`; returns `false` if it was absent.
    pub fn remove(&mut self, quad: &Quad) -> bool {
        if !self.data.contains(quad) {
            return false;
        }
        Arc::make_mut(&mut self.data).remove(quad)
    }

    /// Inserts every quad and returns how many were new.
    pub fn extend<'a>(&mut self, quads: impl IntoIterator<Item = &'a Quad>) -> usize {
        quads.into_iter().filter(|q| self.insert(q)).count()
    }

    /// A consistent read-only view of the current revision.
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            data: Arc::clone(&self.data),
        }
    }
}

impl Deref for QuadStore {
    type Target = Dataset;
    fn deref(&self) -> &Dataset {
        &self.data
    }
}

impl FromIterator<Quad> for QuadStore {
    fn from_iter<T: IntoIterator<Item = Quad>>(iter: T) -> Self {
        let mut store = QuadStore::new();
        for quad in iter {
            store.insert(&quad);
        }
        store
    }
}

/// Immutable view of one store revision.
#[derive(Clone, Debug)]
pub struct Snapshot {
    data: Arc<Dataset>,
}

impl Deref for Snapshot {
    type Target = Dataset;
    fn deref(&self) -> &Dataset {
        &self.data
    }
}
