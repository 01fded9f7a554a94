//! Publish/subscribe ingest and scenario replay.
//!
//! Published envelopes become named graphs in the quad store and their raw
//! payloads go to a [`DocumentStore`]. [`replay`] drives a generated scenario
//! through a [`Broker`], resampling the analytics on a fixed cadence and
//! collecting per-document score trajectories.

mod broker;
mod envelope;
mod replay;
mod report;
mod scenario;

pub use broker::{
    Broker, DocumentError, DocumentStore, MemoryDocuments, Publication, PublishError, SubscriptionId, ALL_TOPICS,
};
pub use envelope::{EnvelopeError, MessageEnvelope};
pub use replay::{
    replay, replay_messages, state_event_for, AnalyticParams, ReplayError, ReplayOutcome, ResamplePoint,
    ResampleView,
};
pub use report::{algorithm_label, Trajectory, TrajectoryReport};
pub use scenario::{
    generate_scenario, graph_iri, information_iri, phone_iri, ConfigError, ScenarioConfig, ScenarioMessage,
    BASE_TIME_MILLIS, MAX_CITATIONS, STATUSES, STATUS_KEYWORD_PREFIX, STEP_MILLIS,
};
