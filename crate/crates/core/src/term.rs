//! RDF terms: IRIs, blank nodes and literals.
//!
//! Terms are validated on construction, so anything that reaches the store is
//! well formed. `Display` renders the N-Quads form of each term.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::Timestamp;
use crate::vocab::{rdf, xsd};

/// Errors raised while building a term.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI is not absolute: {0:?}")]
    RelativeIri(String),
    #[error("IRI {0:?} contains forbidden character {1:?}")]
    IriCharacter(String, char),
    #[error("invalid blank node label {0:?}")]
    BlankLabel(String),
    #[error("invalid language tag {0:?}")]
    LanguageTag(String),
    #[error("{lexical:?} is not a valid <{datatype}> lexical form")]
    Lexical { lexical: String, datatype: String },
    #[error("literals cannot appear in subject position")]
    LiteralSubject,
}

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        validate_iri(&value)?;
        Ok(Iri(value))
    }

    /// Builds an IRI from a compile-time constant known to be valid.
    pub(crate) fn from_static(value: &'static str) -> Self {
        debug_assert!(validate_iri(value).is_ok(), "bad constant IRI {value}");
        Iri(value.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Text after the last `#`, `/` or `:`.
    pub fn local_name(&self) -> &str {
        let cut = self.0.rfind(['#', '/', ':']).map_or(0, |i| i + 1);
        &self.0[cut..]
    }
}

fn validate_iri(value: &str) -> Result<(), TermError> {
    let Some(colon) = value.find(':') else {
        return Err(TermError::RelativeIri(value.to_owned()));
    };
    let scheme = &value[..colon];
    let scheme_ok = scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !scheme_ok {
        return Err(TermError::RelativeIri(value.to_owned()));
    }
    if let Some(bad) = value
        .chars()
        .find(|&c| c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Err(TermError::IriCharacter(value.to_owned(), bad));
    }
    Ok(())
}

impl TryFrom<String> for Iri {
    type Error = TermError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// A blank node label (without the `_:` prefix).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        let ok = !label.is_empty()
            && !label.ends_with('.')
            && !label.starts_with(['-', '.'])
            && label
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if ok {
            Ok(BlankNode(label))
        } else {
            Err(TermError::BlankLabel(label))
        }
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

impl fmt::Debug for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A literal with its datatype and optional language tag.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(xsd::STRING),
            language: None,
        }
    }

    /// A language-tagged `rdf:langString` literal.
    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Result<Self, TermError> {
        let tag = tag.into();
        let mut parts = tag.split('-');
        let primary_ok = parts
            .next()
            .is_some_and(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphabetic()));
        let rest_ok = parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()));
        if !(primary_ok && rest_ok) {
            return Err(TermError::LanguageTag(tag));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(rdf::LANG_STRING),
            language: Some(tag),
        })
    }

    /// A typed literal. Numeric, boolean and dateTime lexical forms are checked.
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, TermError> {
        let lexical = lexical.into();
        if datatype.as_str() == rdf::LANG_STRING {
            return Err(TermError::LanguageTag(String::new()));
        }
        let valid = match datatype.as_str() {
            xsd::DOUBLE | xsd::FLOAT => parse_xsd_double(&lexical).is_some(),
            xsd::DECIMAL => is_decimal(&lexical),
            xsd::INTEGER => is_integer(&lexical),
            xsd::BOOLEAN => matches!(lexical.as_str(), "true" | "false" | "1" | "0"),
            xsd::DATE_TIME => Timestamp::parse(&lexical).is_some(),
            _ => true,
        };
        if !valid {
            return Err(TermError::Lexical {
                lexical,
                datatype: datatype.into_string(),
            });
        }
        Ok(Literal {
            lexical,
            datatype,
            language: None,
        })
    }

    /// An `xsd:double` literal using the shortest round-tripping decimal form.
    pub fn double(value: f64) -> Self {
        let lexical = if value.is_nan() {
            "NaN".to_string()
        } else if value.is_infinite() {
            if value > 0.0 { "INF" } else { "-INF" }.to_string()
        } else {
            format!("{value:?}")
        };
        Literal {
            lexical,
            datatype: Iri::from_static(xsd::DOUBLE),
            language: None,
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: Iri::from_static(xsd::INTEGER),
            language: None,
        }
    }

    pub fn boolean(value: bool) -> Self {
        Literal {
            lexical: if value { "true" } else { "false" }.to_string(),
            datatype: Iri::from_static(xsd::BOOLEAN),
            language: None,
        }
    }

    pub fn date_time(value: Timestamp) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: Iri::from_static(xsd::DATE_TIME),
            language: None,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Numeric value of double, float, decimal, integer and dateTime literals.
    /// dateTime values are seconds since the Unix epoch.
    pub fn numeric_value(&self) -> Option<f64> {
        match self.datatype.as_str() {
            xsd::DOUBLE | xsd::FLOAT => parse_xsd_double(&self.lexical),
            xsd::DECIMAL | xsd::INTEGER => self.lexical.parse::<f64>().ok(),
            xsd::DATE_TIME => {
                Timestamp::parse(&self.lexical).map(|t| t.as_millis() as f64 / 1000.0)
            }
            _ => None,
        }
    }

    pub fn boolean_value(&self) -> Option<bool> {
        if self.datatype.as_str() != xsd::BOOLEAN {
            return None;
        }
        match self.lexical.as_str() {
            "true" | "1" => Some(true),
            "false" | "0" => Some(false),
            _ => None,
        }
    }

    pub fn timestamp_value(&self) -> Option<Timestamp> {
        if self.datatype.as_str() == xsd::DATE_TIME {
            Timestamp::parse(&self.lexical)
        } else {
            None
        }
    }
}

fn parse_xsd_double(lexical: &str) -> Option<f64> {
    match lexical {
        "INF" | "+INF" => return Some(f64::INFINITY),
        "-INF" => return Some(f64::NEG_INFINITY),
        "NaN" => return Some(f64::NAN),
        _ => {}
    }
    // Rust also accepts "inf"/"infinity"; xsd does not.
    let body = lexical.trim_start_matches(['+', '-']);
    if body.is_empty() || !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    lexical.parse::<f64>().ok()
}

fn is_integer(lexical: &str) -> bool {
    let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal(lexical: &str) -> bool {
    let body = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    (!int.is_empty() || !frac.is_empty())
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit())
        && body != "."
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.lexical.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                c => fmt::Write::write_char(f, c)?,
            }
        }
        f.write_str("\"")?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if self.datatype.as_str() == xsd::STRING {
            Ok(())
        } else {
            write!(f, "^^{}", self.datatype)
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Any RDF term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn numeric_value(&self) -> Option<f64> {
        self.as_literal().and_then(Literal::numeric_value)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<&Iri> for Term {
    fn from(iri: &Iri) -> Self {
        Term::Iri(iri.clone())
    }
}

impl From<BlankNode> for Term {
    fn from(node: BlankNode) -> Self {
        Term::Blank(node)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Blank(node) => node.fmt(f),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
