//! Link analytics over the document interlink graph.
//!
//! [`project`] turns a store snapshot into an [`AnalyticsGraph`] whose
//! vertices are document named graphs; the algorithms in the submodules score
//! those vertices.

mod betweenness;
mod hits;
mod pagerank;
mod vsm;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::store::{Dataset, QuadPattern};
use crate::term::{Iri, Term};
use crate::vocab::{self, graphs, msg};

pub use betweenness::betweenness;
pub use hits::{hits, HitsParams, HitsScores};
pub use pagerank::{pagerank, PageRankParams};
pub use vsm::{term_vector, vsm_similarity, TermVector, VsmScore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("empty analytics graph")]
    EmptyGraph,
    #[error("HITS undefined without edges")]
    NoEdges,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("undefined cosine: a term vector is all zero")]
    UndefinedCosine,
    #[error("term counts must be finite and non-negative")]
    InvalidCount,
    #[error("self-loop on {0:?}")]
    SelfLoop(Iri),
    #[error("edge endpoint {0:?} is not a vertex")]
    UnknownVertex(Iri),
}

/// Directed graph over named-graph IRIs.
///
/// Vertices are kept sorted by IRI and adjacency lists sorted by vertex index,
/// so every algorithm visits the graph in one fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnalyticsGraph {
    vertices: Vec<Iri>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    edge_count: usize,
}

impl AnalyticsGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = Iri>,
        edges: impl IntoIterator<Item = (Iri, Iri)>,
    ) -> Result<Self, AnalyticsError> {
        let vertices: Vec<Iri> = vertices.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let n = vertices.len();
        let mut pairs = BTreeSet::new();
        for (from, to) in edges {
            if from == to {
                return Err(AnalyticsError::SelfLoop(from));
            }
            let f = vertices.binary_search(&from).map_err(|_| AnalyticsError::UnknownVertex(from))?;
            let t = vertices.binary_search(&to).map_err(|_| AnalyticsError::UnknownVertex(to))?;
            pairs.insert((f, t));
        }
        let mut out = alloc::vec![Vec::new(); n];
        let mut inc = alloc::vec![Vec::new(); n];
        for &(f, t) in &pairs {
            out[f].push(t);
            inc[t].push(f);
        }
        for list in &mut inc {
            list.sort_unstable();
        }
        Ok(AnalyticsGraph {
            vertices,
            out,
            inc,
            edge_count: pairs.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> &[Iri] {
        &self.vertices
    }

    pub fn index_of(&self, vertex: &Iri) -> Option<usize> {
        self.vertices.binary_search(vertex).ok()
    }

    pub fn out_neighbors(&self, index: usize) -> &[usize] {
        &self.out[index]
    }

    pub fn in_neighbors(&self, index: usize) -> &[usize] {
        &self.inc[index]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Iri, &Iri)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(move |(f, ts)| ts.iter().map(move |&t| (&self.vertices[f], &self.vertices[t])))
    }

    /// The same graph with every edge reversed.
    pub fn reversed(&self) -> Self {
        AnalyticsGraph {
            vertices: self.vertices.clone(),
            out: self.inc.clone(),
            inc: self.out.clone(),
            edge_count: self.edge_count,
        }
    }
}

/// Per-vertex scores from one analytic run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    algorithm: Iri,
    vertices: Vec<Iri>,
    scores: Vec<f64>,
    iterations: usize,
    converged: bool,
}

impl ScoreMap {
    pub(crate) fn new(
        algorithm: &'static str,
        graph: &AnalyticsGraph,
        scores: Vec<f64>,
        iterations: usize,
        converged: bool,
    ) -> Self {
        debug_assert_eq!(scores.len(), graph.vertex_count());
        ScoreMap {
            algorithm: vocab::iri(algorithm),
            vertices: graph.vertices.clone(),
            scores,
            iterations,
            converged,
        }
    }

    pub fn algorithm(&self) -> &Iri {
        &self.algorithm
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, vertex: &Iri) -> Option<f64> {
        self.vertices.binary_search(vertex).ok().map(|i| self.scores[i])
    }

    /// Scores in vertex (IRI) order.
    pub fn values(&self) -> &[f64] {
        &self.scores
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Iri, f64)> + '_ {
        self.vertices.iter().zip(self.scores.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.scores.iter().map(|s| s * s).sum())
    }

    /// Scores multiplied by the vertex count; for probability-normalized maps
    /// this puts the average score at 1.
    pub fn scaled_by_vertex_count(&self) -> Vec<f64> {
        let n = self.scores.len() as f64;
        self.scores.iter().map(|s| s * n).collect()
    }
}

fn is_document_graph(graph: &Iri) -> bool {
    !matches!(graph.as_str(), graphs::DEFAULT | graphs::ANALYTICS | graphs::STATE)
}

/// Projects document named graphs and their citations onto a directed graph.
///
/// Every named graph other than the default, analytics and state graphs is a
/// vertex. There is an edge `g1 -> g2` when a quad in `g1` has as its object
/// either the IRI of `g2` or an information URI declared inside `g2`.
pub fn project(dataset: &Dataset) -> AnalyticsGraph {
    let vertices: Vec<Iri> = dataset.graph_names().into_iter().filter(is_document_graph).collect();

    let info_predicate = vocab::iri(msg::INFORMATION_URI);
    let mut targets: BTreeMap<Term, Vec<&Iri>> = BTreeMap::new();
    for graph in &vertices {
        targets.entry(Term::Iri(graph.clone())).or_default().push(graph);
        let declared = QuadPattern::any().predicate(info_predicate.clone()).graph(graph.clone());
        for quad in dataset.quads_matching(&declared) {
            targets.entry(quad.object().clone()).or_default().push(graph);
        }
    }

    let mut edges = BTreeSet::new();
    for source in &vertices {
        for quad in dataset.quads_matching(&QuadPattern::any().graph(source.clone())) {
            for &target in targets.get(quad.object()).into_iter().flatten() {
                if target != source {
                    edges.insert((source.clone(), target.clone()));
                }
            }
        }
    }
    AnalyticsGraph::new(vertices, edges).expect("projection only emits valid edges")
}
