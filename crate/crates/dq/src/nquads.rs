//! N-Quads reading and canonical writing.

use std::fmt;
use std::io::{self, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use dq_core::query::PatternTerm;
use dq_core::vocab::{self, graphs, rdf};
use dq_core::{BlankNode, Dataset, Iri, Literal, Quad, Term};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// Stop at the first malformed line.
    #[default]
    Strict,
    /// Skip malformed lines and report them.
    Lenient,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BlankScope {
    /// Prefix every label with a per-call tag so separate loads never share
    /// blank nodes.
    #[default]
    Fresh,
    /// Keep labels as written. Used when reloading a store's own export.
    Preserve,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub mode: ParseMode,
    pub blanks: BlankScope,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutput {
    pub quads: Vec<Quad>,
    /// Lines skipped in lenient mode.
    pub skipped: Vec<ParseError>,
}

static PARSE_CALLS: AtomicU64 = AtomicU64::new(0);

/// Parses UTF-8 N-Quads. Triples go to the default graph.
pub fn parse_nquads(input: &[u8], options: ParseOptions) -> Result<ParseOutput, ParseError> {
    let prefix = match options.blanks {
        BlankScope::Fresh => Some(format!("p{}x", PARSE_CALLS.fetch_add(1, Ordering::Relaxed) + 1)),
        BlankScope::Preserve => None,
    };
    let mut out = ParseOutput::default();
    for (index, raw) in input.split(|&b| b == b'\n').enumerate() {
        let line = index + 1;
        let result = std::str::from_utf8(raw)
            .map_err(|e| format!("invalid UTF-8 at byte {}", e.valid_up_to()))
            .and_then(|text| {
                let text = text.strip_suffix('\r').unwrap_or(text);
                LineParser::new(text, prefix.as_deref()).statement()
            });
        match result {
            Ok(Some(quad)) => out.quads.push(quad),
            Ok(None) => {}
            Err(reason) => {
                let error = ParseError { line, reason };
                match options.mode {
                    ParseMode::Strict => return Err(error),
                    ParseMode::Lenient => out.skipped.push(error),
                }
            }
        }
    }
    Ok(out)
}

struct LineParser<'a> {
    rest: &'a str,
    blank_prefix: Option<&'a str>,
}

impl<'a> LineParser<'a> {
    fn new(line: &'a str, blank_prefix: Option<&'a str>) -> Self {
        LineParser { rest: line, blank_prefix }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn statement(&mut self) -> Result<Option<Quad>, String> {
        self.skip_ws();
        if self.rest.is_empty() || self.rest.starts_with('#') {
            return Ok(None);
        }
        let subject = match self.term()? {
            Term::Literal(_) => return Err("subject must be an IRI or blank node".into()),
            t => t,
        };
        self.skip_ws();
        let predicate = match self.term()? {
            Term::Iri(iri) => iri,
            _ => return Err("predicate must be an IRI".into()),
        };
        self.skip_ws();
        let object = self.term()?;
        self.skip_ws();
        let graph = if self.peek() == Some('.') {
            vocab::iri(graphs::DEFAULT)
        } else {
            match self.term()? {
                Term::Iri(iri) => iri,
                _ => return Err("graph label must be an IRI".into()),
            }
        };
        self.skip_ws();
        if self.bump() != Some('.') {
            return Err("expected '.' at end of statement".into());
        }
        self.skip_ws();
        if !(self.rest.is_empty() || self.rest.starts_with('#')) {
            return Err(format!("unexpected text after '.': {:?}", self.rest));
        }
        Quad::new(subject, predicate, object, graph)
            .map(Some)
            .map_err(|e| e.to_string())
    }

    fn term(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.blank().map(Term::Blank),
            Some('"') => self.literal().map(Term::Literal),
            Some(c) => Err(format!("unexpected character {c:?}")),
            None => Err("unexpected end of line".into()),
        }
    }

    fn iri(&mut self) -> Result<Iri, String> {
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => value.push(self.hex(4)?),
                    Some('U') => value.push(self.hex(8)?),
                    _ => return Err("bad escape in IRI".into()),
                },
                Some(c) => value.push(c),
            }
        }
        Iri::new(value).map_err(|e| e.to_string())
    }

    fn blank(&mut self) -> Result<BlankNode, String> {
        if !self.rest.starts_with("_:") {
            return Err("expected '_:'".into());
        }
        self.rest = &self.rest[2..];
        let end = self
            .rest
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.')))
            .unwrap_or(self.rest.len());
        let mut label = &self.rest[..end];
        // A trailing '.' ends the statement, not the label.
        while label.ends_with('.') {
            label = &label[..label.len() - 1];
        }
        self.rest = &self.rest[label.len()..];
        let label = match self.blank_prefix {
            Some(prefix) => format!("{prefix}{label}"),
            None => label.to_string(),
        };
        BlankNode::new(label).map_err(|e| e.to_string())
    }

    fn literal(&mut self) -> Result<Literal, String> {
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated string literal".into()),
                Some('"') => break,
                Some('\\') => lexical.push(match self.bump() {
                    Some('t') => '\t',
                    Some('b') => '\u{8}',
                    Some('n') => '\n',
                    Some('r') => '\r',
                    Some('f') => '\u{c}',
                    Some('"') => '"',
                    Some('\'') => '\'',
                    Some('\\') => '\\',
                    Some('u') => self.hex(4)?,
                    Some('U') => self.hex(8)?,
                    _ => return Err("bad escape in string literal".into()),
                }),
                Some(c) => lexical.push(c),
            }
        }
        if self.rest.starts_with('@') {
            self.bump();
            let end = self
                .rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(self.rest.len());
            let tag = &self.rest[..end];
            self.rest = &self.rest[end..];
            Literal::lang(lexical, tag).map_err(|e| e.to_string())
        } else if self.rest.starts_with("^^") {
            self.rest = &self.rest[2..];
            if self.peek() != Some('<') {
                return Err("datatype must be an IRI".into());
            }
            let datatype = self.iri()?;
            if datatype.as_str() == rdf::LANG_STRING {
                return Err("rdf:langString literal without a language tag".into());
            }
            Literal::typed(lexical, datatype).map_err(|e| e.to_string())
        } else {
            Ok(Literal::string(lexical))
        }
    }

    fn hex(&mut self, digits: usize) -> Result<char, String> {
        if self.rest.len() < digits || !self.rest.is_char_boundary(digits) {
            return Err("truncated unicode escape".into());
        }
        let (code, rest) = self.rest.split_at(digits);
        let value = u32::from_str_radix(code, 16).map_err(|_| format!("bad unicode escape {code:?}"))?;
        self.rest = rest;
        char::from_u32(value).ok_or_else(|| format!("escape {code:?} is not a character"))
    }
}

/// Reads whitespace-separated query positions: `?name` variables or terms in
/// N-Quads syntax. Blank-node labels are kept as written.
pub fn parse_pattern_terms(text: &str) -> Result<Vec<PatternTerm>, String> {
    let mut parser = LineParser::new(text, None);
    let mut terms = Vec::new();
    loop {
        parser.skip_ws();
        match parser.peek() {
            None => return Ok(terms),
            Some('?') => {
                parser.bump();
                let end = parser
                    .rest
                    .find(|c: char| !(c.is_alphanumeric() || c == '_'))
                    .unwrap_or(parser.rest.len());
                if end == 0 {
                    return Err("empty variable name".into());
                }
                terms.push(PatternTerm::var(&parser.rest[..end]));
                parser.rest = &parser.rest[end..];
            }
            Some(_) => terms.push(PatternTerm::Term(parser.term()?)),
        }
    }
}

/// One line per quad, sorted by the serialized (graph, subject, predicate,
/// object).
pub fn serialize_nquads(dataset: &Dataset) -> String {
    let mut rows: Vec<[String; 4]> = dataset
        .iter()
        .map(|q| {
            [
                q.graph().to_string(),
                q.subject().to_string(),
                q.predicate().to_string(),
                q.object().to_string(),
            ]
        })
        .collect();
    rows.sort_unstable();
    let mut out = String::new();
    for [g, s, p, o] in rows {
        out.push_str(&format!("{s} {p} {o} {g} .\n"));
    }
    out
}

pub fn write_nquads(dataset: &Dataset, mut writer: impl Write) -> io::Result<()> {
    writer.write_all(serialize_nquads(dataset).as_bytes())
}

impl fmt::Display for ParseOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} quads", self.quads.len())
    }
}
