//! Embedded named-graph quad store with link analytics whose results are
//! written back as direct-qualification provenance.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, persistence
//! and the command-line tool live in the `dq` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analytics;
pub mod ingest;
pub mod qualify;
pub mod query;
pub mod state;
pub mod store;
pub mod term;
pub mod time;
pub mod vocab;

pub use crate::store::{Dataset, Quad, QuadPattern, QuadStore, Snapshot};
pub use crate::term::{BlankNode, Iri, Literal, Term, TermError};
pub use crate::time::Timestamp;
