//! Vocabulary: the Prov-O subset, the relevancy extension, the message
//! ontology used for published envelopes, and the strategy decision matrix.

use thiserror::Error;

use crate::term::Iri;

pub mod rdf {
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod xsd {
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
}

pub mod prov {
    pub const NS: &str = "http://www.w3.org/ns/prov#";
    pub const WAS_ATTRIBUTED_TO: &str = "http://www.w3.org/ns/prov#wasAttributedTo";
    pub const WAS_ASSOCIATED_WITH: &str = "http://www.w3.org/ns/prov#wasAssociatedWith";
    pub const USED: &str = "http://www.w3.org/ns/prov#used";
    pub const WAS_GENERATED_BY: &str = "http://www.w3.org/ns/prov#wasGeneratedBy";
    pub const WAS_INFORMED_BY: &str = "http://www.w3.org/ns/prov#wasInformedBy";
    pub const ACTED_ON_BEHALF_OF: &str = "http://www.w3.org/ns/prov#actedOnBehalfOf";
    pub const WAS_DERIVED_FROM: &str = "http://www.w3.org/ns/prov#wasDerivedFrom";
    pub const SPECIALIZATION_OF: &str = "http://www.w3.org/ns/prov#specializationOf";
    pub const ENTITY: &str = "http://www.w3.org/ns/prov#Entity";
    pub const ACTIVITY: &str = "http://www.w3.org/ns/prov#Activity";
    pub const AGENT: &str = "http://www.w3.org/ns/prov#Agent";
    pub const GENERATED_AT_TIME: &str = "http://www.w3.org/ns/prov#generatedAtTime";
}

/// Relevancy extension of Prov-O.
pub mod rel {
    pub const NS: &str = "urn:dq:relevancy#";
    pub const IDEMPOTENT_ANALYTIC: &str = "urn:dq:relevancy#IdempotentAnalytic";
    pub const STOCHASTIC_ANALYTIC: &str = "urn:dq:relevancy#StochasticAnalytic";
    pub const BOOLEAN_ANALYTIC: &str = "urn:dq:relevancy#BooleanAnalytic";
    pub const ANALYTIC_EXECUTION: &str = "urn:dq:relevancy#AnalyticExecution";
    pub const SCORE_ENTITY: &str = "urn:dq:relevancy#ScoreEntity";
    pub const RAW_SCORE: &str = "urn:dq:relevancy#rawScore";
    pub const NORMALIZED_SCORE: &str = "urn:dq:relevancy#normalizedScore";
    pub const ALGORITHM: &str = "urn:dq:relevancy#algorithm";
    pub const RUN_ID: &str = "urn:dq:relevancy#runId";
    pub const SCORES: &str = "urn:dq:relevancy#scores";
    pub const HAS_RELEVANCE_SCORE: &str = "urn:dq:relevancy#hasRelevanceScore";
    pub const ABOVE_THRESHOLD: &str = "urn:dq:relevancy#aboveThreshold";

    // Algorithm identifiers.
    pub const PAGE_RANK: &str = "urn:dq:relevancy#PageRank";
    pub const HITS: &str = "urn:dq:relevancy#HITS";
    pub const BETWEENNESS: &str = "urn:dq:relevancy#Betweenness";
    pub const VSM: &str = "urn:dq:relevancy#VSM";
}

/// Predicates for the fields of a published message envelope.
pub mod msg {
    pub const NS: &str = "urn:dq:message#";
    pub const NAMED_GRAPH_URI: &str = "urn:dq:message#namedGraphUri";
    pub const INFORMATION_URI: &str = "urn:dq:message#informationUri";
    pub const PUBLISHER_IDENTITY_URI: &str = "urn:dq:message#publisherIdentityUri";
    pub const PUBLISHER_ROLE: &str = "urn:dq:message#publisherRole";
    pub const MESSAGE_TOPIC: &str = "urn:dq:message#messageTopic";
    pub const MESSAGE_TYPE: &str = "urn:dq:message#messageType";
    pub const MESSAGE_FORMAT: &str = "urn:dq:message#messageFormat";
    pub const TIME_PUBLISHED: &str = "urn:dq:message#timePublished";
    pub const POC_INVOLVEMENT: &str = "urn:dq:message#pocInvolvement";
    pub const RESOURCE_INVOLVEMENT: &str = "urn:dq:message#resourceInvolvement";
    pub const LATITUDE: &str = "urn:dq:message#latitude";
    pub const LONGITUDE: &str = "urn:dq:message#longitude";
    pub const KEYWORD: &str = "urn:dq:message#keyword";
    pub const PUBLISHER_LATITUDE: &str = "urn:dq:message#publisherLatitude";
    pub const PUBLISHER_LONGITUDE: &str = "urn:dq:message#publisherLongitude";
    pub const REFERENCES: &str = "urn:dq:message#references";
    pub const STATUS: &str = "urn:dq:message#status";
}

/// Well-known named graphs.
pub mod graphs {
    /// Graph assigned to triple-form input.
    pub const DEFAULT: &str = "urn:dq:default-graph";
    /// Holds every direct-qualification quad.
    pub const ANALYTICS: &str = "urn:dq:analytics";
    /// Holds continuant state events.
    pub const STATE: &str = "urn:dq:state";
}

/// The closed Prov-O and relevancy term set.
pub const TERMS: &[&str] = &[
    prov::WAS_ATTRIBUTED_TO,
    prov::WAS_ASSOCIATED_WITH,
    prov::USED,
    prov::WAS_GENERATED_BY,
    prov::WAS_INFORMED_BY,
    prov::ACTED_ON_BEHALF_OF,
    prov::WAS_DERIVED_FROM,
    prov::SPECIALIZATION_OF,
    prov::ENTITY,
    prov::ACTIVITY,
    prov::AGENT,
    prov::GENERATED_AT_TIME,
    rel::IDEMPOTENT_ANALYTIC,
    rel::STOCHASTIC_ANALYTIC,
    rel::BOOLEAN_ANALYTIC,
    rel::ANALYTIC_EXECUTION,
    rel::SCORE_ENTITY,
    rel::RAW_SCORE,
    rel::NORMALIZED_SCORE,
    rel::ALGORITHM,
    rel::RUN_ID,
    rel::SCORES,
    rel::HAS_RELEVANCE_SCORE,
    rel::ABOVE_THRESHOLD,
];

/// IRI for one of the constants in this module.
pub fn iri(constant: &'static str) -> Iri {
    Iri::from_static(constant)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationshipKind {
    Relationship,
    Attribute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateKind {
    Continuant,
    Occurrent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelingStrategy {
    SpecializationAndDQ,
    DirectQualification,
    Specialization,
    BasicInference,
}

impl ModelingStrategy {
    /// Whether direct-qualification quads are written for this strategy.
    pub fn uses_dq(self) -> bool {
        matches!(
            self,
            ModelingStrategy::SpecializationAndDQ | ModelingStrategy::DirectQualification
        )
    }
}

/// The modeling decision matrix.
pub fn decide_strategy(relationship: RelationshipKind, state: StateKind) -> ModelingStrategy {
    use ModelingStrategy::*;
    match (relationship, state) {
        (RelationshipKind::Relationship, StateKind::Continuant) => SpecializationAndDQ,
        (RelationshipKind::Relationship, StateKind::Occurrent) => DirectQualification,
        (RelationshipKind::Attribute, StateKind::Continuant) => Specialization,
        (RelationshipKind::Attribute, StateKind::Occurrent) => BasicInference,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AnalyticClass {
    Idempotent,
    Stochastic,
    Boolean,
}

impl AnalyticClass {
    pub fn class_iri(self) -> &'static str {
        match self {
            AnalyticClass::Idempotent => rel::IDEMPOTENT_ANALYTIC,
            AnalyticClass::Stochastic => rel::STOCHASTIC_ANALYTIC,
            AnalyticClass::Boolean => rel::BOOLEAN_ANALYTIC,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Normalization {
    /// Scores sum to one.
    Probability,
    /// Score vector has unit Euclidean norm.
    L2,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error("boolean analytics require a threshold")]
    MissingThreshold,
    #[error("only boolean analytics take a threshold")]
    UnexpectedThreshold,
    #[error("threshold must be finite")]
    NonFiniteThreshold,
}

/// What an analytic is and how its results are qualified.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticDescriptor {
    algorithm: Iri,
    class: AnalyticClass,
    monotonic: bool,
    normalization: Normalization,
    threshold: Option<f64>,
}

impl AnalyticDescriptor {
    pub fn new(
        algorithm: Iri,
        class: AnalyticClass,
        monotonic: bool,
        normalization: Normalization,
        threshold: Option<f64>,
    ) -> Result<Self, DescriptorError> {
        match (class, threshold) {
            (AnalyticClass::Boolean, None) => return Err(DescriptorError::MissingThreshold),
            (AnalyticClass::Boolean, Some(t)) if !t.is_finite() => {
                return Err(DescriptorError::NonFiniteThreshold)
            }
            (AnalyticClass::Idempotent | AnalyticClass::Stochastic, Some(_)) => {
                return Err(DescriptorError::UnexpectedThreshold)
            }
            _ => {}
        }
        Ok(AnalyticDescriptor {
            algorithm,
            class,
            monotonic,
            normalization,
            threshold,
        })
    }

    pub fn pagerank() -> Self {
        Self::preset(rel::PAGE_RANK, true, Normalization::Probability)
    }

    /// HITS; records carry authority scores.
    pub fn hits() -> Self {
        Self::preset(rel::HITS, true, Normalization::L2)
    }

    pub fn betweenness() -> Self {
        Self::preset(rel::BETWEENNESS, true, Normalization::None)
    }

    /// Cosine similarity of a document against the documents it cites.
    pub fn vsm() -> Self {
        Self::preset(rel::VSM, false, Normalization::None)
    }

    fn preset(algorithm: &'static str, monotonic: bool, normalization: Normalization) -> Self {
        AnalyticDescriptor {
            algorithm: iri(algorithm),
            class: AnalyticClass::Stochastic,
            monotonic,
            normalization,
            threshold: None,
        }
    }

    pub fn algorithm(&self) -> &Iri {
        &self.algorithm
    }

    pub fn class(&self) -> AnalyticClass {
        self.class
    }

    pub fn is_monotonic(&self) -> bool {
        self.monotonic
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }
}
