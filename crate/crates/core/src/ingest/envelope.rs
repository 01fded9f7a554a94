use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::store::Quad;
use crate::term::{Iri, Literal, Term};
use crate::time::Timestamp;
use crate::vocab::{self, msg, prov, rdf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("required field {0} is empty")]
    MissingField(&'static str),
    #[error("{field} {value} is out of range")]
    OutOfRange { field: &'static str, value: String },
}

/// Metadata of one published document. Each envelope becomes one named graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MessageEnvelope {
    pub named_graph_uri: Iri,
    pub information_uri: Iri,
    pub publisher_identity_uri: Iri,
    pub publisher_role: String,
    pub message_topic: String,
    pub message_type: String,
    pub message_format: String,
    pub time_published: Timestamp,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poc_involvement: Vec<Iri>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resource_involvement: Vec<Iri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub longitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub keywords: Vec<String>,
    /// Latitude and longitude of the publisher.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publisher_geolocation: Option<(f64, f64)>,
    /// Documents this message cites.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<Iri>,
}

fn check_range(field: &'static str, value: f64, limit: f64) -> Result<(), EnvelopeError> {
    if value.is_finite() && (-limit..=limit).contains(&value) {
        Ok(())
    } else {
        Err(EnvelopeError::OutOfRange {
            field,
            value: alloc::format!("{value}"),
        })
    }
}

impl MessageEnvelope {
    /// An envelope with only the required fields set.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        named_graph_uri: Iri,
        information_uri: Iri,
        publisher_identity_uri: Iri,
        publisher_role: impl Into<String>,
        message_topic: impl Into<String>,
        message_type: impl Into<String>,
        message_format: impl Into<String>,
        time_published: Timestamp,
    ) -> Self {
        MessageEnvelope {
            named_graph_uri,
            information_uri,
            publisher_identity_uri,
            publisher_role: publisher_role.into(),
            message_topic: message_topic.into(),
            message_type: message_type.into(),
            message_format: message_format.into(),
            time_published,
            poc_involvement: Vec::new(),
            resource_involvement: Vec::new(),
            latitude: None,
            longitude: None,
            keywords: Vec::new(),
            publisher_geolocation: None,
            references: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), EnvelopeError> {
        let required = [
            ("publisherRole", &self.publisher_role),
            ("messageTopic", &self.message_topic),
            ("messageType", &self.message_type),
            ("messageFormat", &self.message_format),
        ];
        for (name, value) in required {
            if value.trim().is_empty() {
                return Err(EnvelopeError::MissingField(name));
            }
        }
        if let Some(lat) = self.latitude {
            check_range("latitude", lat, 90.0)?;
        }
        if let Some(lon) = self.longitude {
            check_range("longitude", lon, 180.0)?;
        }
        if let Some((lat, lon)) = self.publisher_geolocation {
            check_range("publisherGeolocation latitude", lat, 90.0)?;
            check_range("publisherGeolocation longitude", lon, 180.0)?;
        }
        Ok(())
    }

    /// The quads of this envelope's named graph: one per required field, one
    /// per optional value, and a type declaration for every POC (agent) and
    /// involved resource (entity).
    pub fn to_quads(&self) -> Vec<Quad> {
        let g = &self.named_graph_uri;
        let quad = |subject: &Iri, predicate: &'static str, object: Term| {
            Quad::new(subject, vocab::iri(predicate), object, g.clone()).expect("IRI subject")
        };
        let field = |predicate, object: Term| quad(g, predicate, object);
        let text = |s: &str| Term::Literal(Literal::string(s));

        let mut quads = Vec::with_capacity(8);
        quads.push(field(msg::NAMED_GRAPH_URI, Term::from(g)));
        quads.push(field(msg::INFORMATION_URI, Term::from(&self.information_uri)));
        quads.push(field(msg::PUBLISHER_IDENTITY_URI, Term::from(&self.publisher_identity_uri)));
        quads.push(field(msg::PUBLISHER_ROLE, text(&self.publisher_role)));
        quads.push(field(msg::MESSAGE_TOPIC, text(&self.message_topic)));
        quads.push(field(msg::MESSAGE_TYPE, text(&self.message_type)));
        quads.push(field(msg::MESSAGE_FORMAT, text(&self.message_format)));
        quads.push(field(msg::TIME_PUBLISHED, Term::Literal(Literal::date_time(self.time_published))));

        for poc in &self.poc_involvement {
            quads.push(field(msg::POC_INVOLVEMENT, Term::from(poc)));
            quads.push(quad(poc, rdf::TYPE, Term::Iri(vocab::iri(prov::AGENT))));
        }
        for resource in &self.resource_involvement {
            quads.push(field(msg::RESOURCE_INVOLVEMENT, Term::from(resource)));
            quads.push(quad(resource, rdf::TYPE, Term::Iri(vocab::iri(prov::ENTITY))));
        }
        if let Some(lat) = self.latitude {
            quads.push(field(msg::LATITUDE, Term::Literal(Literal::double(lat))));
        }
        if let Some(lon) = self.longitude {
            quads.push(field(msg::LONGITUDE, Term::Literal(Literal::double(lon))));
        }
        for keyword in &self.keywords {
            quads.push(field(msg::KEYWORD, text(keyword)));
        }
        if let Some((lat, lon)) = self.publisher_geolocation {
            quads.push(field(msg::PUBLISHER_LATITUDE, Term::Literal(Literal::double(lat))));
            quads.push(field(msg::PUBLISHER_LONGITUDE, Term::Literal(Literal::double(lon))));
        }
        for reference in &self.references {
            quads.push(field(msg::REFERENCES, Term::from(reference)));
        }
        quads
    }
}
