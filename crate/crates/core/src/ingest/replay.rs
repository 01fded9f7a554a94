use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::broker::{Broker, DocumentStore, MemoryDocuments, PublishError};
use super::envelope::MessageEnvelope;
use super::report::TrajectoryReport;
use super::scenario::{generate_scenario, ConfigError, ScenarioConfig, ScenarioMessage, STATUS_KEYWORD_PREFIX};
use crate::analytics::{
    betweenness, hits, pagerank, project, term_vector, vsm_similarity, AnalyticsError, AnalyticsGraph,
    HitsParams, PageRankParams, ScoreMap,
};
use crate::qualify::{emit_dq, mint_run_id, AnalyticExecution, DqError, ScoreRecord};
use crate::state::{record_state, StateError, StateEvent};
use crate::store::{Dataset, QuadPattern};
use crate::term::{Iri, Literal, Term};
use crate::vocab::{self, decide_strategy, msg, rel, AnalyticDescriptor, Normalization, RelationshipKind, StateKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("message {index} ({graph:?}): {source}")]
    Publish { index: usize, graph: Iri, source: PublishError },
    #[error("message {index}: state event: {source}")]
    State { index: usize, source: StateError },
    #[error("resample {resample}, {algorithm:?}: {source}")]
    Analytics { resample: usize, algorithm: Iri, source: AnalyticsError },
    #[error("resample {resample}, {algorithm:?}: {source}")]
    Dq { resample: usize, algorithm: Iri, source: DqError },
    #[error("no implementation for algorithm {0:?}")]
    UnsupportedAlgorithm(Iri),
    #[error("resampleEvery must be at least 1")]
    ZeroCadence,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalyticParams {
    pub pagerank: PageRankParams,
    pub hits: HitsParams,
}

/// One analytics pass over a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ResamplePoint {
    /// Messages published when the snapshot was taken.
    pub published: usize,
    pub store_revision: u64,
    pub executions: Vec<AnalyticExecution>,
    /// Records per execution, parallel to `executions`.
    pub records: Vec<Vec<ScoreRecord>>,
    /// Quads written per record, parallel to `records`.
    pub record_quads: Vec<Vec<usize>>,
    /// Algorithms that had nothing to score, e.g. HITS before any citation.
    pub skipped: Vec<(Iri, AnalyticsError)>,
}

/// Passed to the resample observer after the DQ quads of a resample are in.
pub struct ResampleView<'a> {
    pub index: usize,
    pub point: &'a ResamplePoint,
    pub dataset: &'a Dataset,
}

pub struct ReplayOutcome<D = MemoryDocuments> {
    pub broker: Broker<D>,
    pub report: TrajectoryReport,
    pub resamples: Vec<ResamplePoint>,
    pub state_events: Vec<StateEvent>,
}

/// Identity, time and assertions of the phone a message reports on, if any.
///
/// The identity is the first involved resource; assertions are latitude,
/// longitude and the `status:` keyword.
pub fn state_event_for(envelope: &MessageEnvelope) -> Option<StateEvent> {
    let identity = envelope.resource_involvement.first()?.clone();
    let mut assertions = BTreeSet::new();
    if let Some(lat) = envelope.latitude {
        assertions.insert((vocab::iri(msg::LATITUDE), Term::Literal(Literal::double(lat))));
    }
    if let Some(lon) = envelope.longitude {
        assertions.insert((vocab::iri(msg::LONGITUDE), Term::Literal(Literal::double(lon))));
    }
    for keyword in &envelope.keywords {
        if let Some(status) = keyword.strip_prefix(STATUS_KEYWORD_PREFIX) {
            assertions.insert((vocab::iri(msg::STATUS), Term::Literal(Literal::string(status))));
        }
    }
    if assertions.is_empty() {
        return None;
    }
    let event = Iri::new(format!("{}/state", envelope.named_graph_uri.as_str())).ok()?;
    Some(StateEvent {
        event,
        identity,
        observed_at: envelope.time_published,
        assertions,
    })
}

/// Generates the scenario for `cfg` and replays it into a fresh broker.
pub fn replay(cfg: &ScenarioConfig, algorithms: &[AnalyticDescriptor]) -> Result<ReplayOutcome, ReplayError> {
    let messages = generate_scenario(cfg)?;
    let every = usize::try_from(cfg.resample_every).unwrap_or(usize::MAX);
    replay_messages(
        Broker::default(),
        &messages,
        every,
        algorithms,
        &AnalyticParams::default(),
        |_| {},
    )
}

/// Publishes `messages` in order, recording a state event for each, and
/// resamples every analytic after each `resample_every` publications and once
/// more after the last message if the count is not a multiple.
pub fn replay_messages<D: DocumentStore>(
    mut broker: Broker<D>,
    messages: &[ScenarioMessage],
    resample_every: usize,
    algorithms: &[AnalyticDescriptor],
    params: &AnalyticParams,
    mut observer: impl FnMut(&ResampleView<'_>),
) -> Result<ReplayOutcome<D>, ReplayError> {
    if resample_every == 0 {
        return Err(ReplayError::ZeroCadence);
    }
    for descriptor in algorithms {
        let known = [rel::PAGE_RANK, rel::HITS, rel::BETWEENNESS, rel::VSM];
        if !known.contains(&descriptor.algorithm().as_str()) {
            return Err(ReplayError::UnsupportedAlgorithm(descriptor.algorithm().clone()));
        }
    }

    let mut report = TrajectoryReport::new(algorithms.iter().map(|d| d.algorithm().clone()).collect());
    let mut resamples = Vec::new();
    let mut state_events = Vec::new();
    let mut pending: Vec<Iri> = Vec::new();

    for (index, message) in messages.iter().enumerate() {
        let envelope = &message.envelope;
        let graph = broker
            .publish(envelope, &message.payload)
            .map_err(|source| ReplayError::Publish {
                index,
                graph: envelope.named_graph_uri.clone(),
                source,
            })?;
        pending.push(graph);
        if let Some(event) = state_event_for(envelope) {
            record_state(broker.store_mut(), &event).map_err(|source| ReplayError::State { index, source })?;
            state_events.push(event);
        }

        let published = index + 1;
        if published % resample_every != 0 && published != messages.len() {
            continue;
        }
        let resample = resamples.len();
        let point = resample_once(&mut broker, resample, published, envelope, algorithms, params, &pending, &mut report)?;
        pending.clear();
        observer(&ResampleView {
            index: resample,
            point: &point,
            dataset: broker.store(),
        });
        resamples.push(point);
    }

    Ok(ReplayOutcome {
        broker,
        report,
        resamples,
        state_events,
    })
}

#[allow(clippy::too_many_arguments)]
fn resample_once<D: DocumentStore>(
    broker: &mut Broker<D>,
    resample: usize,
    published: usize,
    last: &MessageEnvelope,
    algorithms: &[AnalyticDescriptor],
    params: &AnalyticParams,
    fresh: &[Iri],
    report: &mut TrajectoryReport,
) -> Result<ResamplePoint, ReplayError> {
    let snapshot = broker.store().snapshot();
    let graph = project(&snapshot);
    let mut point = ResamplePoint {
        published,
        store_revision: snapshot.revision(),
        executions: Vec::new(),
        records: Vec::new(),
        record_quads: Vec::new(),
        skipped: Vec::new(),
    };

    for descriptor in algorithms {
        let algorithm = descriptor.algorithm();
        let analytics_err = |source| ReplayError::Analytics {
            resample,
            algorithm: algorithm.clone(),
            source,
        };
        let run_id = mint_run_id(broker.store(), algorithm);
        let scored = match score(descriptor, &graph, &snapshot, fresh, params) {
            Ok(scored) => scored,
            Err(AnalyticsError::NoEdges) => {
                point.skipped.push((algorithm.clone(), AnalyticsError::NoEdges));
                continue;
            }
            Err(e) => return Err(analytics_err(e)),
        };
        if scored.is_empty() {
            continue;
        }
        let inputs: BTreeSet<Iri> = if descriptor.is_monotonic() {
            graph.vertices().iter().cloned().collect()
        } else {
            scored.iter().flat_map(|s| s.sources.iter().chain([&s.target])).cloned().collect()
        };
        let execution = AnalyticExecution {
            run_id: run_id.clone(),
            descriptor: descriptor.clone(),
            inputs,
            executed_at: last.time_published,
            store_revision: snapshot.revision(),
        };
        let records: Vec<ScoreRecord> = scored
            .into_iter()
            .map(|s| ScoreRecord {
                target: s.target,
                execution: run_id.clone(),
                raw_score: s.raw,
                normalized_score: s.normalized,
                above_threshold: descriptor.threshold().map(|t| s.normalized >= t),
                sources: s.sources,
            })
            .collect();

        let state = if descriptor.is_monotonic() {
            StateKind::Continuant
        } else {
            StateKind::Occurrent
        };
        let strategy = decide_strategy(RelationshipKind::Relationship, state);
        let summary = emit_dq(broker.store_mut(), &execution, &records, strategy).map_err(|source| ReplayError::Dq {
            resample,
            algorithm: algorithm.clone(),
            source,
        })?;
        for record in &records {
            report.push(resample, algorithm, &record.target, record.raw_score);
        }
        point.executions.push(execution);
        point.records.push(records);
        point.record_quads.push(summary.record_quads);
    }
    Ok(point)
}

struct Scored {
    target: Iri,
    raw: f64,
    normalized: f64,
    sources: BTreeSet<Iri>,
}

fn from_map(map: &ScoreMap, normalization: Normalization) -> Vec<Scored> {
    let n = map.len() as f64;
    map.iter()
        .map(|(v, s)| Scored {
            target: v.clone(),
            raw: if normalization == Normalization::Probability { s * n } else { s },
            normalized: s,
            sources: BTreeSet::new(),
        })
        .collect()
}

fn score(
    descriptor: &AnalyticDescriptor,
    graph: &AnalyticsGraph,
    dataset: &Dataset,
    fresh: &[Iri],
    params: &AnalyticParams,
) -> Result<Vec<Scored>, AnalyticsError> {
    let normalization = descriptor.normalization();
    match descriptor.algorithm().as_str() {
        rel::PAGE_RANK => Ok(from_map(&pagerank(graph, &params.pagerank)?, normalization)),
        rel::HITS => Ok(from_map(&hits(graph, &params.hits)?.authorities, normalization)),
        rel::BETWEENNESS => Ok(from_map(&betweenness(graph), normalization)),
        rel::VSM => vsm_scores(dataset, fresh),
        _ => unreachable!("algorithms are checked before replay"),
    }
}

fn keywords(dataset: &Dataset, graph: &Iri) -> Vec<String> {
    dataset
        .objects(&Term::Iri(graph.clone()), &vocab::iri(msg::KEYWORD), graph)
        .into_iter()
        .filter_map(|t| t.as_literal().map(|l| String::from(l.lexical())))
        .collect()
}

/// Cosine of each freshly published document's keywords against the pooled
/// keywords of the documents it cites.
fn vsm_scores(dataset: &Dataset, fresh: &[Iri]) -> Result<Vec<Scored>, AnalyticsError> {
    let mut out = Vec::new();
    for target in fresh {
        let references = dataset.objects(&Term::Iri(target.clone()), &vocab::iri(msg::REFERENCES), target);
        let mut sources = BTreeSet::new();
        for reference in &references {
            let declared = QuadPattern::any()
                .predicate(vocab::iri(msg::INFORMATION_URI))
                .object(reference.clone());
            for quad in dataset.quads_matching(&declared) {
                if quad.graph() != target {
                    sources.insert(quad.graph().clone());
                }
            }
        }
        if sources.is_empty() {
            continue;
        }
        let own = keywords(dataset, target);
        let pooled: Vec<String> = sources.iter().flat_map(|s| keywords(dataset, s)).collect();
        match vsm_similarity(
            &term_vector(own.iter().map(String::as_str)),
            &term_vector(pooled.iter().map(String::as_str)),
        ) {
            Ok(s) => out.push(Scored {
                target: target.clone(),
                raw: s.dot,
                normalized: s.cosine,
                sources,
            }),
            Err(AnalyticsError::UndefinedCosine) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
