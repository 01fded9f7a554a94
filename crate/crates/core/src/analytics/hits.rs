use alloc::vec;
use alloc::vec::Vec;

use super::{AnalyticsError, AnalyticsGraph, ScoreMap};
use crate::vocab::rel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsParams {
    /// Stop once the L1 change of both vectors drops below this.
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for HitsParams {
    fn default() -> Self {
        HitsParams {
            epsilon: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitsScores {
    pub hubs: ScoreMap,
    pub authorities: ScoreMap,
}

/// Hub and authority scores by mutual reinforcement.
///
/// Each round feeds authorities through the hubs that point at them
/// (`a <- A^T A a`) and hubs through the authorities they point at
/// (`h <- A A^T h`), then rescales both to unit L2 norm. Both vectors start
/// uniform, so running on the reversed graph swaps the two results exactly.
pub fn hits(graph: &AnalyticsGraph, params: &HitsParams) -> Result<HitsScores, AnalyticsError> {
    if params.epsilon.is_nan() || params.epsilon <= 0.0 {
        return Err(AnalyticsError::InvalidParameter("epsilon must be positive"));
    }
    if params.max_iter == 0 {
        return Err(AnalyticsError::InvalidParameter("max_iter must be at least 1"));
    }
    if graph.edge_count() == 0 {
        return Err(AnalyticsError::NoEdges);
    }

    let n = graph.vertex_count();
    let start = 1.0 / libm::sqrt(n as f64);
    let mut auth = vec![start; n];
    let mut hub = vec![start; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iter {
        iterations += 1;
        let next_auth = reinforce(graph, &auth, Direction::Authority);
        let next_hub = reinforce(graph, &hub, Direction::Hub);
        let change = l1_distance(&auth, &next_auth).max(l1_distance(&hub, &next_hub));
        auth = next_auth;
        hub = next_hub;
        if change < params.epsilon {
            converged = true;
            break;
        }
    }

    Ok(HitsScores {
        hubs: ScoreMap::new(rel::HITS, graph, hub, iterations, converged),
        authorities: ScoreMap::new(rel::HITS, graph, auth, iterations, converged),
    })
}

#[derive(Clone, Copy)]
enum Direction {
    Authority,
    Hub,
}

type Neighbors = fn(&AnalyticsGraph, usize) -> &[usize];

fn reinforce(graph: &AnalyticsGraph, scores: &[f64], direction: Direction) -> Vec<f64> {
    let n = graph.vertex_count();
    let (first, second): (Neighbors, Neighbors) =
        match direction {
            Direction::Authority => (AnalyticsGraph::out_neighbors, AnalyticsGraph::in_neighbors),
            Direction::Hub => (AnalyticsGraph::in_neighbors, AnalyticsGraph::out_neighbors),
        };
    // Folding from +0.0 keeps vertices without neighbors at 0 rather than -0.
    let partner: Vec<f64> = (0..n)
        .map(|i| first(graph, i).iter().fold(0.0, |acc, &j| acc + scores[j]))
        .collect();
    let mut next: Vec<f64> = (0..n)
        .map(|i| second(graph, i).iter().fold(0.0, |acc, &j| acc + partner[j]))
        .collect();
    let norm = libm::sqrt(next.iter().map(|x| x * x).sum());
    if norm > 0.0 {
        for x in &mut next {
            *x /= norm;
        }
    }
    next
}

fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum()
}
