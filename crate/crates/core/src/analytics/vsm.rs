use alloc::collections::BTreeMap;
use alloc::string::String;

use super::AnalyticsError;

/// Token counts for one document.
pub type TermVector = BTreeMap<String, f64>;

/// Raw dot product alongside the cosine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VsmScore {
    pub dot: f64,
    pub cosine: f64,
}

/// Counts occurrences of each token.
pub fn term_vector<'a>(tokens: impl IntoIterator<Item = &'a str>) -> TermVector {
    let mut vector = TermVector::new();
    for token in tokens {
        *vector.entry(String::from(token)).or_insert(0.0) += 1.0;
    }
    vector
}

/// Cosine similarity of two term-frequency vectors.
pub fn vsm_similarity(a: &TermVector, b: &TermVector) -> Result<VsmScore, AnalyticsError> {
    if a.values().chain(b.values()).any(|c| !c.is_finite() || *c < 0.0) {
        return Err(AnalyticsError::InvalidCount);
    }
    let norm = |v: &TermVector| libm::sqrt(v.values().map(|c| c * c).sum());
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(AnalyticsError::UndefinedCosine);
    }
    let dot: f64 = a.iter().filter_map(|(k, x)| b.get(k).map(|y| x * y)).sum();
    let cosine = (dot / (na * nb)).clamp(0.0, 1.0);
    Ok(VsmScore { dot, cosine })
}
