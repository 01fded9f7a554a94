use alloc::vec;

use super::{AnalyticsError, AnalyticsGraph, ScoreMap};
use crate::vocab::rel;

/// Power-iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    /// Stop once the L1 change between iterations drops below this.
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            epsilon: 1e-10,
            max_iter: 200,
        }
    }
}

/// PageRank with uniform teleport. Rank held by vertices without out-edges is
/// spread uniformly over all vertices. The result sums to one.
pub fn pagerank(graph: &AnalyticsGraph, params: &PageRankParams) -> Result<ScoreMap, AnalyticsError> {
    if !(params.damping > 0.0 && params.damping < 1.0) {
        return Err(AnalyticsError::InvalidParameter("damping must be in (0, 1)"));
    }
    if params.epsilon.is_nan() || params.epsilon <= 0.0 {
        return Err(AnalyticsError::InvalidParameter("epsilon must be positive"));
    }
    if params.max_iter == 0 {
        return Err(AnalyticsError::InvalidParameter("max_iter must be at least 1"));
    }
    let n = graph.vertex_count();
    if n == 0 {
        return Err(AnalyticsError::EmptyGraph);
    }

    let d = params.damping;
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n)
            .filter(|&u| graph.out_neighbors(u).is_empty())
            .map(|u| rank[u])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.fill(base);
        for (u, &r) in rank.iter().enumerate() {
            let targets = graph.out_neighbors(u);
            if !targets.is_empty() {
                let share = d * r / targets.len() as f64;
                for &v in targets {
                    next[v] += share;
                }
            }
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| libm::fabs(a - b)).sum();
        core::mem::swap(&mut rank, &mut next);
        if change < params.epsilon {
            converged = true;
            break;
        }
    }

    let total: f64 = rank.iter().sum();
    for r in &mut rank {
        *r /= total;
    }
    Ok(ScoreMap::new(rel::PAGE_RANK, graph, rank, iterations, converged))
}
