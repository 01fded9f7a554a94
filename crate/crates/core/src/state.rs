//! Continuant state as specialization events.
//!
//! Each observation mints an event entity that specializes the stable
//! identity; the identity's own quads are never rewritten. Events live in
//! `urn:dq:state`:
//!
//! ```text
//! event  prov:specializationOf  identity
//! event  prov:generatedAtTime   "..."^^xsd:dateTime
//! event  <predicate>            <object>            one per assertion
//! ```

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use thiserror::Error;

use crate::store::{Dataset, Quad, QuadPattern, QuadStore};
use crate::term::{Iri, Literal, Term};
use crate::time::Timestamp;
use crate::vocab::{self, graphs, prov};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("identity {0:?} is not a subject in the store")]
    UnknownIdentity(Iri),
    #[error("event {0:?} already recorded")]
    DuplicateEvent(Iri),
    #[error("event IRI must differ from its identity {0:?}")]
    EventIsIdentity(Iri),
    #[error("state event needs at least one assertion")]
    NoAssertions,
    #[error("event {0:?} has no usable prov:generatedAtTime")]
    MissingTime(Term),
}

/// One observation of a continuant's state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEvent {
    pub event: Iri,
    pub identity: Iri,
    pub observed_at: Timestamp,
    pub assertions: BTreeSet<(Iri, Term)>,
}

fn state_graph() -> Iri {
    vocab::iri(graphs::STATE)
}

/// Records `event` as a specialization of its identity. Returns the event IRI.
pub fn record_state(store: &mut QuadStore, event: &StateEvent) -> Result<Iri, StateError> {
    if event.event == event.identity {
        return Err(StateError::EventIsIdentity(event.identity.clone()));
    }
    if event.assertions.is_empty() {
        return Err(StateError::NoAssertions);
    }
    if !store.has_subject(&Term::Iri(event.identity.clone())) {
        return Err(StateError::UnknownIdentity(event.identity.clone()));
    }
    if store.has_subject(&Term::Iri(event.event.clone())) {
        return Err(StateError::DuplicateEvent(event.event.clone()));
    }

    let graph = state_graph();
    let quad = |predicate: Iri, object: Term| {
        Quad::new(event.event.clone(), predicate, object, graph.clone()).expect("IRI subject")
    };
    let mut quads = Vec::with_capacity(2 + event.assertions.len());
    quads.push(quad(vocab::iri(prov::SPECIALIZATION_OF), Term::Iri(event.identity.clone())));
    quads.push(quad(
        vocab::iri(prov::GENERATED_AT_TIME),
        Term::Literal(Literal::date_time(event.observed_at)),
    ));
    for (predicate, object) in &event.assertions {
        quads.push(quad(predicate.clone(), object.clone()));
    }
    store.extend(&quads);
    Ok(event.event.clone())
}

fn read_event(dataset: &Dataset, identity: &Iri, event: &Term) -> Result<StateEvent, StateError> {
    let graph = state_graph();
    let mut observed_at = None;
    let mut assertions = BTreeSet::new();
    for quad in dataset.quads_matching(&QuadPattern::any().subject(event.clone()).graph(graph)) {
        match quad.predicate().as_str() {
            prov::SPECIALIZATION_OF => {}
            prov::GENERATED_AT_TIME => {
                let ts = quad.object().as_literal().and_then(Literal::timestamp_value);
                if ts.is_none() || observed_at.is_some() {
                    return Err(StateError::MissingTime(event.clone()));
                }
                observed_at = ts;
            }
            _ => {
                assertions.insert((quad.predicate().clone(), quad.object().clone()));
            }
        }
    }
    let observed_at = observed_at.ok_or_else(|| StateError::MissingTime(event.clone()))?;
    let event = event.as_iri().cloned().ok_or_else(|| StateError::MissingTime(event.clone()))?;
    Ok(StateEvent {
        event,
        identity: identity.clone(),
        observed_at,
        assertions,
    })
}

/// Every recorded state of `identity`, oldest first; simultaneous events are
/// ordered by event IRI.
pub fn state_history(dataset: &Dataset, identity: &Iri) -> Result<Vec<StateEvent>, StateError> {
    let events = dataset.subjects(
        &vocab::iri(prov::SPECIALIZATION_OF),
        &Term::Iri(identity.clone()),
        &state_graph(),
    );
    let mut history = events
        .iter()
        .map(|event| read_event(dataset, identity, event))
        .collect::<Result<Vec<_>, _>>()?;
    history.sort_by(|a, b| (a.observed_at, &a.event).cmp(&(b.observed_at, &b.event)));
    Ok(history)
}

/// The newest recorded state of `identity`.
pub fn latest_state(dataset: &Dataset, identity: &Iri) -> Result<Option<StateEvent>, StateError> {
    Ok(state_history(dataset, identity)?.pop())
}
