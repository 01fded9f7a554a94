//! Direct qualification: analytic executions and their scores as provenance
//! quads in the `urn:dq:analytics` graph.
//!
//! Per execution (activity):
//!
//! ```text
//! run  rdf:type               rel:AnalyticExecution
//! run  rdf:type               <class>            e.g. rel:StochasticAnalytic
//! run  rel:algorithm          <algorithm>
//! run  prov:generatedAtTime   "..."^^xsd:dateTime
//! run  prov:used              <input graph>      one per input
//! ```
//!
//! Per score record (entity), a fixed pattern regardless of store size:
//!
//! ```text
//! score   rdf:type               rel:ScoreEntity
//! score   prov:wasGeneratedBy    run
//! score   rel:rawScore           "..."^^xsd:double
//! score   rel:normalizedScore    "..."^^xsd:double
//! target  rel:hasRelevanceScore  score
//! score   prov:used              <source>           non-monotonic only, one per source
//! score   rel:aboveThreshold     "..."^^xsd:boolean boolean analytics only
//! ```

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use thiserror::Error;

use crate::store::{Dataset, Quad, QuadPattern, QuadStore};
use crate::term::{Iri, Literal, Term};
use crate::time::Timestamp;
use crate::vocab::{self, graphs, prov, rdf, rel, AnalyticClass, AnalyticDescriptor, ModelingStrategy, Normalization};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DqError {
    #[error("direct qualification not applicable under strategy {0:?}")]
    NotApplicable(ModelingStrategy),
    #[error("run {0:?} already exists")]
    DuplicateRun(Iri),
    #[error("an execution needs at least one input")]
    NoInputs,
    #[error("record for {target:?} belongs to run {found:?}, not {expected:?}")]
    ExecutionMismatch { target: Iri, expected: Iri, found: Iri },
    #[error("record for {0:?} appears twice in one execution")]
    DuplicateTarget(Iri),
    #[error("score for {0:?} is not finite")]
    NonFiniteScore(Iri),
    #[error("normalized score {score} for {target:?} is outside [0, 1]")]
    OutOfRange { target: Iri, score: f64 },
    #[error("record for {0:?}: sources must be empty exactly when the analytic is monotonic")]
    SourcesMismatch(Iri),
    #[error("record for {0:?}: aboveThreshold must be set exactly for boolean analytics")]
    ThresholdMismatch(Iri),
    #[error("score entity {entity:?} is malformed: {problem}")]
    Malformed { entity: Term, problem: &'static str },
}

/// One run of an analytic.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticExecution {
    pub run_id: Iri,
    pub descriptor: AnalyticDescriptor,
    /// Named graphs the run consumed.
    pub inputs: BTreeSet<Iri>,
    pub executed_at: Timestamp,
    /// Revision of the snapshot that was analyzed.
    pub store_revision: u64,
}

/// One target's score from one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub target: Iri,
    pub execution: Iri,
    pub raw_score: f64,
    pub normalized_score: f64,
    pub above_threshold: Option<bool>,
    /// Co-input documents; empty for monotonic analytics.
    pub sources: BTreeSet<Iri>,
}

impl ScoreRecord {
    pub fn monotonic(target: Iri, execution: Iri, raw_score: f64, normalized_score: f64) -> Self {
        ScoreRecord {
            target,
            execution,
            raw_score,
            normalized_score,
            above_threshold: None,
            sources: BTreeSet::new(),
        }
    }
}

/// Quads written by one [`emit_dq`] call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmitSummary {
    pub execution_quads: usize,
    /// Quads per record, in record order.
    pub record_quads: Vec<usize>,
}

impl EmitSummary {
    pub fn total(&self) -> usize {
        self.execution_quads + self.record_quads.iter().sum::<usize>()
    }
}

/// Number of quads that describe one score record.
pub fn record_quad_count(descriptor: &AnalyticDescriptor, record: &ScoreRecord) -> usize {
    5 + record.sources.len() + usize::from(descriptor.class() == AnalyticClass::Boolean)
}

/// Mints the next run id for `algorithm`: `urn:dq:run/<local-name>/<seq>`.
pub fn mint_run_id(dataset: &Dataset, algorithm: &Iri) -> Iri {
    let runs = dataset.subjects(&vocab::iri(rel::ALGORITHM), &Term::Iri(algorithm.clone()), &analytics_graph());
    let mut seq = runs.len() + 1;
    loop {
        let candidate = Iri::new(format!("urn:dq:run/{}/{seq:06}", algorithm.local_name()))
            .expect("run ids are absolute IRIs");
        if !run_exists(dataset, &candidate) {
            return candidate;
        }
        seq += 1;
    }
}

fn analytics_graph() -> Iri {
    vocab::iri(graphs::ANALYTICS)
}

fn run_exists(dataset: &Dataset, run: &Iri) -> bool {
    !dataset
        .quads_matching(&QuadPattern::any().subject(run.clone()).graph(analytics_graph()))
        .is_empty()
}

fn dq_quad(subject: impl Into<Term>, predicate: &'static str, object: impl Into<Term>) -> Quad {
    Quad::new(subject, vocab::iri(predicate), object, analytics_graph()).expect("IRI subjects")
}

/// Writes an execution and its score records into the analytics graph.
///
/// Everything is validated before the first insert, so a rejected call leaves
/// the store untouched.
pub fn emit_dq(
    store: &mut QuadStore,
    execution: &AnalyticExecution,
    records: &[ScoreRecord],
    strategy: ModelingStrategy,
) -> Result<EmitSummary, DqError> {
    if !strategy.uses_dq() {
        return Err(DqError::NotApplicable(strategy));
    }
    if execution.inputs.is_empty() {
        return Err(DqError::NoInputs);
    }
    if run_exists(store, &execution.run_id) {
        return Err(DqError::DuplicateRun(execution.run_id.clone()));
    }
    let descriptor = &execution.descriptor;
    let mut targets = BTreeSet::new();
    for record in records {
        validate_record(descriptor, &execution.run_id, record)?;
        if !targets.insert(&record.target) {
            return Err(DqError::DuplicateTarget(record.target.clone()));
        }
    }

    let run = &execution.run_id;
    let mut summary = EmitSummary::default();
    let mut activity = Vec::with_capacity(4 + execution.inputs.len());
    activity.push(dq_quad(run, rdf::TYPE, vocab::iri(rel::ANALYTIC_EXECUTION)));
    activity.push(dq_quad(run, rdf::TYPE, vocab::iri(descriptor.class().class_iri())));
    activity.push(dq_quad(run, rel::ALGORITHM, descriptor.algorithm()));
    activity.push(dq_quad(run, prov::GENERATED_AT_TIME, Literal::date_time(execution.executed_at)));
    for input in &execution.inputs {
        activity.push(dq_quad(run, prov::USED, input));
    }
    summary.execution_quads = store.extend(&activity);

    for (i, record) in records.iter().enumerate() {
        let entity = Iri::new(format!("{}/score/{:06}", run.as_str(), i + 1)).expect("absolute");
        let mut quads = Vec::with_capacity(record_quad_count(descriptor, record));
        quads.push(dq_quad(&entity, rdf::TYPE, vocab::iri(rel::SCORE_ENTITY)));
        quads.push(dq_quad(&entity, prov::WAS_GENERATED_BY, run));
        quads.push(dq_quad(&entity, rel::RAW_SCORE, Literal::double(record.raw_score)));
        quads.push(dq_quad(&entity, rel::NORMALIZED_SCORE, Literal::double(record.normalized_score)));
        quads.push(dq_quad(&record.target, rel::HAS_RELEVANCE_SCORE, &entity));
        for source in &record.sources {
            quads.push(dq_quad(&entity, prov::USED, source));
        }
        if let Some(flag) = record.above_threshold {
            quads.push(dq_quad(&entity, rel::ABOVE_THRESHOLD, Literal::boolean(flag)));
        }
        let inserted = store.extend(&quads);
        assert!(
            inserted <= record_quad_count(descriptor, record),
            "score record pattern exceeded its fixed size"
        );
        summary.record_quads.push(inserted);
    }
    Ok(summary)
}

fn validate_record(descriptor: &AnalyticDescriptor, run: &Iri, record: &ScoreRecord) -> Result<(), DqError> {
    if &record.execution != run {
        return Err(DqError::ExecutionMismatch {
            target: record.target.clone(),
            expected: run.clone(),
            found: record.execution.clone(),
        });
    }
    if !record.raw_score.is_finite() || !record.normalized_score.is_finite() {
        return Err(DqError::NonFiniteScore(record.target.clone()));
    }
    if descriptor.normalization() != Normalization::None && !(0.0..=1.0).contains(&record.normalized_score) {
        return Err(DqError::OutOfRange {
            target: record.target.clone(),
            score: record.normalized_score,
        });
    }
    if record.sources.is_empty() != descriptor.is_monotonic() {
        return Err(DqError::SourcesMismatch(record.target.clone()));
    }
    if record.above_threshold.is_some() != (descriptor.class() == AnalyticClass::Boolean) {
        return Err(DqError::ThresholdMismatch(record.target.clone()));
    }
    Ok(())
}

struct StoredScore {
    executed_at: Timestamp,
    record: ScoreRecord,
}

fn single<'a>(values: &'a [Term], entity: &Term, what: &'static str) -> Result<&'a Term, DqError> {
    match values {
        [one] => Ok(one),
        [] => Err(DqError::Malformed { entity: entity.clone(), problem: what }),
        _ => Err(DqError::Malformed { entity: entity.clone(), problem: "duplicated pattern member" }),
    }
}

fn read_score(dataset: &Dataset, target: &Iri, entity: &Term, algorithm: &Iri) -> Result<Option<StoredScore>, DqError> {
    let graph = analytics_graph();
    let get = |subject: &Term, predicate: &'static str| dataset.objects(subject, &vocab::iri(predicate), &graph);
    let malformed = |problem| DqError::Malformed { entity: entity.clone(), problem };

    let generated_by = get(entity, prov::WAS_GENERATED_BY);
    let run = single(&generated_by, entity, "missing prov:wasGeneratedBy")?
        .as_iri()
        .ok_or_else(|| malformed("prov:wasGeneratedBy is not an IRI"))?
        .clone();
    let run_term = Term::Iri(run.clone());
    let algorithms = get(&run_term, rel::ALGORITHM);
    let run_algorithm = single(&algorithms, entity, "execution has no rel:algorithm")?;
    if run_algorithm.as_iri() != Some(algorithm) {
        return Ok(None);
    }
    let times = get(&run_term, prov::GENERATED_AT_TIME);
    let executed_at = single(&times, entity, "execution has no prov:generatedAtTime")?
        .as_literal()
        .and_then(Literal::timestamp_value)
        .ok_or_else(|| malformed("execution time is not an xsd:dateTime"))?;

    let number = |predicate, problem| -> Result<f64, DqError> {
        let values = get(entity, predicate);
        single(&values, entity, problem)?.numeric_value().ok_or_else(|| malformed(problem))
    };
    let raw_score = number(rel::RAW_SCORE, "missing numeric rel:rawScore")?;
    let normalized_score = number(rel::NORMALIZED_SCORE, "missing numeric rel:normalizedScore")?;

    let flags = get(entity, rel::ABOVE_THRESHOLD);
    let above_threshold = match flags.as_slice() {
        [] => None,
        [flag] => Some(
            flag.as_literal()
                .and_then(Literal::boolean_value)
                .ok_or_else(|| malformed("rel:aboveThreshold is not a boolean"))?,
        ),
        _ => return Err(malformed("duplicated pattern member")),
    };
    let sources = get(entity, prov::USED)
        .into_iter()
        .map(|t| t.as_iri().cloned().ok_or_else(|| malformed("prov:used source is not an IRI")))
        .collect::<Result<BTreeSet<_>, _>>()?;

    Ok(Some(StoredScore {
        executed_at,
        record: ScoreRecord {
            target: target.clone(),
            execution: run,
            raw_score,
            normalized_score,
            above_threshold,
            sources,
        },
    }))
}

/// Every score of `target` produced by `algorithm`, oldest first. Runs with
/// equal timestamps are ordered by run id.
pub fn score_history(dataset: &Dataset, target: &Iri, algorithm: &Iri) -> Result<Vec<ScoreRecord>, DqError> {
    let entities = dataset.objects(
        &Term::Iri(target.clone()),
        &vocab::iri(rel::HAS_RELEVANCE_SCORE),
        &analytics_graph(),
    );
    let mut scores = Vec::with_capacity(entities.len());
    for entity in &entities {
        if let Some(score) = read_score(dataset, target, entity, algorithm)? {
            scores.push(score);
        }
    }
    scores.sort_by(|a, b| {
        (a.executed_at, &a.record.execution).cmp(&(b.executed_at, &b.record.execution))
    });
    Ok(scores.into_iter().map(|s| s.record).collect())
}

/// The most recent score of `target` produced by `algorithm`.
pub fn latest_score(dataset: &Dataset, target: &Iri, algorithm: &Iri) -> Result<Option<ScoreRecord>, DqError> {
    Ok(score_history(dataset, target, algorithm)?.pop())
}
