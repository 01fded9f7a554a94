use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::envelope::{EnvelopeError, MessageEnvelope};
use crate::store::QuadStore;
use crate::term::Iri;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("document store: {0}")]
pub struct DocumentError(pub String);

/// Raw payloads keyed by the named-graph IRI of their document.
pub trait DocumentStore {
    fn contains(&self, key: &Iri) -> bool;
    fn put(&mut self, key: &Iri, payload: &[u8]) -> Result<(), DocumentError>;
    fn get(&self, key: &Iri) -> Result<Option<Vec<u8>>, DocumentError>;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MemoryDocuments {
    payloads: BTreeMap<Iri, Vec<u8>>,
}

impl MemoryDocuments {
    pub fn len(&self) -> usize {
        self.payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payloads.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Iri, &[u8])> {
        self.payloads.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

impl DocumentStore for MemoryDocuments {
    fn contains(&self, key: &Iri) -> bool {
        self.payloads.contains_key(key)
    }

    fn put(&mut self, key: &Iri, payload: &[u8]) -> Result<(), DocumentError> {
        self.payloads.insert(key.clone(), payload.to_vec());
        Ok(())
    }

    fn get(&self, key: &Iri) -> Result<Option<Vec<u8>>, DocumentError> {
        Ok(self.payloads.get(key).cloned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PublishError {
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error("named graph {0:?} already published")]
    DuplicateGraph(Iri),
    #[error(transparent)]
    Document(#[from] DocumentError),
}

/// What subscribers receive.
#[derive(Debug, Clone, Copy)]
pub struct Publication<'a> {
    /// 1-based publication number.
    pub sequence: u64,
    pub envelope: &'a MessageEnvelope,
    pub payload: &'a str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubscriptionId(u64);

/// Subscribing to this topic receives every publication.
pub const ALL_TOPICS: &str = "*";

type Callback = Box<dyn FnMut(&Publication<'_>)>;

/// In-process, synchronous publish/subscribe broker over a quad store and a
/// raw document store.
pub struct Broker<D = MemoryDocuments> {
    store: QuadStore,
    documents: D,
    subscribers: Vec<(SubscriptionId, String, Callback)>,
    next_subscription: u64,
    published: u64,
}

impl Default for Broker<MemoryDocuments> {
    fn default() -> Self {
        Broker::new(QuadStore::new(), MemoryDocuments::default())
    }
}

impl<D: DocumentStore> Broker<D> {
    pub fn new(store: QuadStore, documents: D) -> Self {
        Broker {
            store,
            documents,
            subscribers: Vec::new(),
            next_subscription: 0,
            published: 0,
        }
    }

    /// Registers `callback` for publications on `topic` (or [`ALL_TOPICS`]).
    pub fn subscribe(&mut self, topic: impl Into<String>, callback: impl FnMut(&Publication<'_>) + 'static) -> SubscriptionId {
        self.next_subscription += 1;
        let id = SubscriptionId(self.next_subscription);
        self.subscribers.push((id, topic.into(), Box::new(callback)));
        id
    }

    pub fn unsubscribe(&mut self, id: SubscriptionId) -> bool {
        let before = self.subscribers.len();
        self.subscribers.retain(|(sid, _, _)| *sid != id);
        before != self.subscribers.len()
    }

    /// Stores the payload, indexes the envelope as a named graph and notifies
    /// matching subscribers in registration order.
    pub fn publish(&mut self, envelope: &MessageEnvelope, payload: &str) -> Result<Iri, PublishError> {
        envelope.validate()?;
        let graph = &envelope.named_graph_uri;
        if self.store.has_graph(graph) || self.documents.contains(graph) {
            return Err(PublishError::DuplicateGraph(graph.clone()));
        }
        self.documents.put(graph, payload.as_bytes())?;
        self.store.extend(&envelope.to_quads());
        self.published += 1;

        let publication = Publication {
            sequence: self.published,
            envelope,
            payload,
        };
        for (_, topic, callback) in &mut self.subscribers {
            if topic == ALL_TOPICS || *topic == envelope.message_topic {
                callback(&publication);
            }
        }
        Ok(graph.clone())
    }

    pub fn published(&self) -> u64 {
        self.published
    }

    pub fn store(&self) -> &QuadStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut QuadStore {
        &mut self.store
    }

    pub fn documents(&self) -> &D {
        &self.documents
    }

    pub fn into_parts(self) -> (QuadStore, D) {
        (self.store, self.documents)
    }
}
