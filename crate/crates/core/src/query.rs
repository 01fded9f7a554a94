//! Conjunctive quad-pattern queries with numeric filters, ordering and limits.
//!
//! Clauses are joined in the order given; each one is answered from the store
//! indexes after substituting the bindings collected so far.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

use crate::store::{Dataset, QuadPattern};
use crate::term::{Iri, Term};
use crate::vocab::{self, graphs, prov, rel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("a query needs at least one clause")]
    NoClauses,
    #[error("variable ?{0} does not appear in any clause")]
    UnknownVariable(String),
    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),
}

/// A clause position: a variable or a fixed term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Var(String),
    Term(Term),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }
}

impl From<Term> for PatternTerm {
    fn from(term: Term) -> Self {
        PatternTerm::Term(term)
    }
}

impl From<Iri> for PatternTerm {
    fn from(iri: Iri) -> Self {
        PatternTerm::Term(Term::Iri(iri))
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(name) => write!(f, "?{name}"),
            PatternTerm::Term(term) => term.fmt(f),
        }
    }
}

/// Subject, predicate, object, graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause(pub [PatternTerm; 4]);

impl Clause {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
        graph: impl Into<PatternTerm>,
    ) -> Self {
        Clause([subject.into(), predicate.into(), object.into(), graph.into()])
    }

    fn variables(&self) -> impl Iterator<Item = &str> {
        self.0.iter().filter_map(|t| match t {
            PatternTerm::Var(v) => Some(v.as_str()),
            PatternTerm::Term(_) => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl Comparator {
    pub fn holds(self, left: f64, right: f64) -> bool {
        match self {
            Comparator::Lt => left < right,
            Comparator::Le => left <= right,
            Comparator::Eq => left == right,
            Comparator::Ge => left >= right,
            Comparator::Gt => left > right,
            Comparator::Ne => left != right,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ge => ">=",
            Comparator::Gt => ">",
            Comparator::Ne => "!=",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<Self> {
        Some(match symbol {
            "<" => Comparator::Lt,
            "<=" | "≤" => Comparator::Le,
            "=" | "==" => Comparator::Eq,
            ">=" | "≥" => Comparator::Ge,
            ">" => Comparator::Gt,
            "!=" | "≠" => Comparator::Ne,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    pub variable: String,
    pub comparator: Comparator,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortDirection {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderBy {
    pub variable: String,
    pub direction: SortDirection,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryPattern {
    pub clauses: Vec<Clause>,
    pub filters: Vec<Filter>,
    pub order_by: Option<OrderBy>,
    pub limit: Option<usize>,
}

impl QueryPattern {
    pub fn new(clauses: impl IntoIterator<Item = Clause>) -> Self {
        QueryPattern {
            clauses: clauses.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn filter(mut self, variable: impl Into<String>, comparator: Comparator, value: f64) -> Self {
        self.filters.push(Filter {
            variable: variable.into(),
            comparator,
            value,
        });
        self
    }

    pub fn order_by(mut self, variable: impl Into<String>, direction: SortDirection) -> Self {
        self.order_by = Some(OrderBy {
            variable: variable.into(),
            direction,
        });
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        for var in self.clauses.iter().flat_map(Clause::variables) {
            if !seen.iter().any(|s| s == var) {
                seen.push(var.to_string());
            }
        }
        seen
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        if self.clauses.is_empty() {
            return Err(QueryError::NoClauses);
        }
        let vars = self.variables();
        if let Some(bad) = vars.iter().find(|v| !is_variable_name(v)) {
            return Err(QueryError::InvalidVariable(bad.clone()));
        }
        let referenced = self
            .filters
            .iter()
            .map(|f| &f.variable)
            .chain(self.order_by.as_ref().map(|o| &o.variable));
        for var in referenced {
            if !vars.contains(var) {
                return Err(QueryError::UnknownVariable(var.clone()));
            }
        }
        Ok(())
    }
}

fn is_variable_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Variable bindings for one solution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct BindingRow(BTreeMap<String, Term>);

impl BindingRow {
    pub fn get(&self, variable: &str) -> Option<&Term> {
        self.0.get(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl FromIterator<(String, Term)> for BindingRow {
    fn from_iter<T: IntoIterator<Item = (String, Term)>>(iter: T) -> Self {
        BindingRow(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    /// Variables in order of first appearance.
    pub variables: Vec<String>,
    pub rows: Vec<BindingRow>,
    /// Rows dropped because a filtered variable was not numeric.
    pub non_numeric_dropped: usize,
}

/// Evaluates `query` against a dataset.
pub fn execute(dataset: &Dataset, query: &QueryPattern) -> Result<QueryResult, QueryError> {
    query.validate()?;

    let mut rows = alloc::vec![BindingRow::default()];
    for clause in &query.clauses {
        let mut next = Vec::new();
        for row in &rows {
            extend_row(dataset, clause, row, &mut next);
        }
        rows = next;
        if rows.is_empty() {
            break;
        }
    }

    let mut non_numeric_dropped = 0;
    if !query.filters.is_empty() {
        rows.retain(|row| {
            let mut numeric = true;
            let keep = query.filters.iter().all(|f| match row.get(&f.variable).and_then(Term::numeric_value) {
                Some(value) => f.comparator.holds(value, f.value),
                None => {
                    numeric = false;
                    false
                }
            });
            if !numeric {
                non_numeric_dropped += 1;
            }
            keep
        });
    }

    if let Some(order) = &query.order_by {
        let mut keyed: Vec<(SortKey, BindingRow)> = rows
            .into_iter()
            .map(|row| (SortKey::of(row.get(&order.variable)), row))
            .collect();
        keyed.sort_by(|(a, _), (b, _)| a.compare(b, order.direction));
        rows = keyed.into_iter().map(|(_, row)| row).collect();
    }

    if let Some(limit) = query.limit {
        rows.truncate(limit);
    }

    Ok(QueryResult {
        variables: query.variables(),
        rows,
        non_numeric_dropped,
    })
}

fn extend_row(dataset: &Dataset, clause: &Clause, row: &BindingRow, out: &mut Vec<BindingRow>) {
    let resolved: [Option<&Term>; 4] = core::array::from_fn(|i| match &clause.0[i] {
        PatternTerm::Term(term) => Some(term),
        PatternTerm::Var(var) => row.get(var),
    });
    let as_iri = |t: Option<&Term>| match t {
        None => Ok(None),
        Some(Term::Iri(iri)) => Ok(Some(iri.clone())),
        Some(_) => Err(()),
    };
    let (Ok(predicate), Ok(graph)) = (as_iri(resolved[1]), as_iri(resolved[3])) else {
        return;
    };
    let pattern = QuadPattern {
        subject: resolved[0].cloned(),
        predicate,
        object: resolved[2].cloned(),
        graph,
    };

    'quads: for quad in dataset.quads_matching(&pattern) {
        let values = [
            quad.subject().clone(),
            Term::Iri(quad.predicate().clone()),
            quad.object().clone(),
            Term::Iri(quad.graph().clone()),
        ];
        let mut extended = row.clone();
        for (slot, value) in clause.0.iter().zip(values) {
            if let PatternTerm::Var(var) = slot {
                match extended.0.get(var) {
                    Some(bound) if *bound != value => continue 'quads,
                    Some(_) => {}
                    None => {
                        extended.0.insert(var.clone(), value);
                    }
                }
            }
        }
        out.push(extended);
    }
}

/// Numbers sort before everything else; other terms by their N-Quads form.
enum SortKey {
    Number(f64),
    Other(String),
    Unbound,
}

impl SortKey {
    fn of(term: Option<&Term>) -> Self {
        match term {
            None => SortKey::Unbound,
            Some(term) => match term.numeric_value() {
                Some(v) => SortKey::Number(v),
                None => SortKey::Other(term.to_string()),
            },
        }
    }

    fn rank(&self) -> u8 {
        match self {
            SortKey::Number(_) => 0,
            SortKey::Other(_) => 1,
            SortKey::Unbound => 2,
        }
    }

    fn compare(&self, other: &Self, direction: SortDirection) -> Ordering {
        let within = match (self, other) {
            (SortKey::Number(a), SortKey::Number(b)) => a.total_cmp(b),
            (SortKey::Other(a), SortKey::Other(b)) => a.cmp(b),
            _ => return self.rank().cmp(&other.rank()),
        };
        match direction {
            SortDirection::Asc => within,
            SortDirection::Desc => within.reverse(),
        }
    }
}

/// The query pattern behind [`rank_documents`]: every score for `algorithm`
/// with its run time and normalized value.
pub fn score_pattern(algorithm: &Iri) -> QueryPattern {
    let g = || PatternTerm::from(vocab::iri(graphs::ANALYTICS));
    QueryPattern::new([
        Clause::new(PatternTerm::var("target"), vocab::iri(rel::HAS_RELEVANCE_SCORE), PatternTerm::var("score"), g()),
        Clause::new(PatternTerm::var("score"), vocab::iri(prov::WAS_GENERATED_BY), PatternTerm::var("run"), g()),
        Clause::new(PatternTerm::var("run"), vocab::iri(rel::ALGORITHM), algorithm.clone(), g()),
        Clause::new(PatternTerm::var("run"), vocab::iri(prov::GENERATED_AT_TIME), PatternTerm::var("time"), g()),
        Clause::new(PatternTerm::var("score"), vocab::iri(rel::NORMALIZED_SCORE), PatternTerm::var("value"), g()),
    ])
}

/// Documents ordered by their latest normalized score for `algorithm`.
/// Equal scores are ordered by document IRI.
pub fn rank_documents(dataset: &Dataset, algorithm: &Iri, descending: bool, limit: Option<usize>) -> Vec<(Iri, f64)> {
    let result = execute(dataset, &score_pattern(algorithm)).expect("fixed pattern is valid");

    // target -> (time, run, value) of the newest run
    let mut latest: BTreeMap<Iri, (f64, Iri, f64)> = BTreeMap::new();
    for row in &result.rows {
        let fields = (
            row.get("target").and_then(Term::as_iri),
            row.get("time").and_then(Term::numeric_value),
            row.get("run").and_then(Term::as_iri),
            row.get("value").and_then(Term::numeric_value),
        );
        let (Some(target), Some(time), Some(run), Some(value)) = fields else {
            continue;
        };
        let newer = latest
            .get(target)
            .is_none_or(|(t, r, _)| (time, run) > (*t, r));
        if newer {
            latest.insert(target.clone(), (time, run.clone(), value));
        }
    }

    let mut ranked: Vec<(Iri, f64)> = latest.into_iter().map(|(target, (_, _, v))| (target, v)).collect();
    ranked.sort_by(|(ta, a), (tb, b)| {
        let by_value = if descending { b.total_cmp(a) } else { a.total_cmp(b) };
        by_value.then_with(|| ta.cmp(tb))
    });
    if let Some(limit) = limit {
        ranked.truncate(limit);
    }
    ranked
}
