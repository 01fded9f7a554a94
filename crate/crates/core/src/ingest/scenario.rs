//! Synthetic geo-location status traffic.
//!
//! Two ChaCha8 streams are derived from `randomSeed`: stream 0 drives phone
//! attributes, stream 1 drives citations. For message `i` (0-based):
//!
//! 1. `k = gen_range(0..=3)` on the citation stream, capped at `i`.
//! 2. `k` earlier messages are drawn without replacement; each draw picks
//!    `x = gen_range(0..W)` where `W` is the summed weight of the remaining
//!    candidates and walks candidates in publication order until the running
//!    weight exceeds `x`. A candidate's weight is its in-degree before
//!    message `i` plus one.
//! 3. On the attribute stream: phone `gen_range(0..phoneCount)`, latitude and
//!    longitude steps `gen_range(-DRIFT..DRIFT)`, status index, topic index and
//!    POC index, in that order.
//!
//! Phone starting positions are drawn from the attribute stream before the
//! first message, latitude then longitude per phone.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::envelope::MessageEnvelope;
use crate::term::Iri;
use crate::time::Timestamp;

/// 2014-01-01T00:00:00Z.
pub const BASE_TIME_MILLIS: i64 = 1_388_534_400_000;
/// 230 messages over ten minutes.
pub const STEP_MILLIS: i64 = 600_000 / 230;
pub const MAX_CITATIONS: usize = 3;
pub const DRIFT_DEGREES: f64 = 0.01;
pub const STATUSES: [&str; 4] = ["moving", "stationary", "low-battery", "offline"];
const POC_COUNT: u64 = 4;
const ATTRIBUTE_STREAM: u64 = 0;
const CITATION_STREAM: u64 = 1;

/// Keyword prefix that marks a phone's status.
pub const STATUS_KEYWORD_PREFIX: &str = "status:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{0} must be at least 1")]
    TooSmall(&'static str),
    #[error("topicSet must not be empty")]
    NoTopics,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub message_count: u64,
    pub resample_every: u64,
    pub phone_count: u64,
    pub random_seed: u64,
    pub topic_set: Vec<String>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            message_count: 230,
            resample_every: 10,
            phone_count: 12,
            random_seed: 2014,
            topic_set: vec!["geolocation/status".to_string(), "geolocation/track".to_string()],
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.message_count < 1 {
            return Err(ConfigError::TooSmall("messageCount"));
        }
        if self.resample_every < 1 {
            return Err(ConfigError::TooSmall("resampleEvery"));
        }
        if self.phone_count < 1 {
            return Err(ConfigError::TooSmall("phoneCount"));
        }
        if self.topic_set.is_empty() {
            return Err(ConfigError::NoTopics);
        }
        Ok(())
    }
}

/// A message and its raw payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMessage {
    #[serde(flatten)]
    pub envelope: MessageEnvelope,
    pub payload: String,
}

fn numbered(kind: &str, n: usize) -> Iri {
    Iri::new(format!("urn:dq:scenario/{kind}/{n:04}")).expect("absolute IRI")
}

pub fn graph_iri(index: usize) -> Iri {
    numbered("graph", index + 1)
}

pub fn information_iri(index: usize) -> Iri {
    numbered("information", index + 1)
}

pub fn phone_iri(phone: u64) -> Iri {
    Iri::new(format!("urn:dq:scenario/phone/{phone:02}")).expect("absolute IRI")
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Picks `k` distinct indices below `in_degree.len()`, weighted by in-degree + 1.
fn cite(rng: &mut ChaCha8Rng, in_degree: &[u64], k: usize) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..in_degree.len()).collect();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let total: u64 = remaining.iter().map(|&j| in_degree[j] + 1).sum();
        let x = rng.gen_range(0..total);
        let mut acc = 0;
        let pos = remaining
            .iter()
            .position(|&j| {
                acc += in_degree[j] + 1;
                acc > x
            })
            .expect("x < total");
        chosen.push(remaining.remove(pos));
    }
    chosen
}

/// Deterministic message sequence for `cfg`.
pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<Vec<ScenarioMessage>, ConfigError> {
    cfg.validate()?;
    let n = usize::try_from(cfg.message_count).expect("message count fits in memory");
    let mut attributes = stream(cfg.random_seed, ATTRIBUTE_STREAM);
    let mut citations = stream(cfg.random_seed, CITATION_STREAM);

    let mut positions: Vec<(f64, f64)> = (0..cfg.phone_count)
        .map(|_| {
            let lat = attributes.gen_range(30.0..45.0);
            let lon = attributes.gen_range(-120.0..-75.0);
            (lat, lon)
        })
        .collect();
    let mut in_degree: Vec<u64> = Vec::with_capacity(n);
    let mut messages = Vec::with_capacity(n);

    for i in 0..n {
        let k = citations.gen_range(0..=MAX_CITATIONS).min(i);
        let cited = cite(&mut citations, &in_degree, k);

        let phone = attributes.gen_range(0..cfg.phone_count);
        let idx = usize::try_from(phone).expect("phone index");
        let (lat, lon) = &mut positions[idx];
        *lat = (*lat + attributes.gen_range(-DRIFT_DEGREES..DRIFT_DEGREES)).clamp(-90.0, 90.0);
        *lon = (*lon + attributes.gen_range(-DRIFT_DEGREES..DRIFT_DEGREES)).clamp(-180.0, 180.0);
        let (lat, lon) = (*lat, *lon);
        let status = STATUSES[attributes.gen_range(0..STATUSES.len())];
        let topic = &cfg.topic_set[attributes.gen_range(0..cfg.topic_set.len())];
        let poc = attributes.gen_range(0..POC_COUNT);

        let phone_id = phone_iri(phone);
        let time = Timestamp::from_millis(BASE_TIME_MILLIS + STEP_MILLIS * i as i64);
        let mut envelope = MessageEnvelope::new(
            graph_iri(i),
            information_iri(i),
            Iri::new(format!("urn:dq:scenario/publisher/{phone:02}")).expect("absolute IRI"),
            "mobile-device",
            topic.clone(),
            "geolocation-status",
            "text/plain",
            time,
        );
        envelope.poc_involvement = vec![Iri::new(format!("urn:dq:scenario/poc/{poc}")).expect("absolute IRI")];
        envelope.resource_involvement = vec![phone_id.clone()];
        envelope.latitude = Some(lat);
        envelope.longitude = Some(lon);
        envelope.keywords = vec![
            format!("{STATUS_KEYWORD_PREFIX}{status}"),
            status.to_string(),
            format!("phone-{phone:02}"),
            topic.clone(),
        ];
        envelope.references = cited.iter().map(|&j| information_iri(j)).collect();

        let payload = format!(
            "phone={} status={status} lat={lat:?} lon={lon:?} time={time}\n",
            phone_id.as_str()
        );
        for &j in &cited {
            in_degree[j] += 1;
        }
        in_degree.push(0);
        messages.push(ScenarioMessage { envelope, payload });
    }
    Ok(messages)
}
