use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{AnalyticsGraph, ScoreMap};
use crate::vocab::rel;

/// Directed, unweighted, unnormalized betweenness centrality (Brandes).
/// Path endpoints do not count toward their own score.
pub fn betweenness(graph: &AnalyticsGraph) -> ScoreMap {
    let n = graph.vertex_count();
    let mut centrality = vec![0.0; n];

    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];

    for source in 0..n {
        stack.clear();
        predecessors.iter_mut().for_each(Vec::clear);
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        sigma[source] = 1.0;
        dist[source] = 0;
        queue.push_back(source);

        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in graph.out_neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    predecessors[w].push(v);
                }
            }
        }

        delta.fill(0.0);
        while let Some(w) = stack.pop() {
            for &v in &predecessors[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != source {
                centrality[w] += delta[w];
            }
        }
    }

    ScoreMap::new(rel::BETWEENNESS, graph, centrality, 1, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::test_graphs::{from_mask, graph};
    use proptest::prelude::*;

    /// For every ordered pair (s, t) with a path, each intermediate v gets
    /// sigma(s,v) * sigma(v,t) / sigma(s,t) when v lies on a shortest path.
    fn enumeration_oracle(g: &AnalyticsGraph) -> Vec<f64> {
        let n = g.vertex_count();
        let bfs = |s: usize| {
            let mut dist = vec![usize::MAX; n];
            let mut count = vec![0.0f64; n];
            dist[s] = 0;
            count[s] = 1.0;
            let mut frontier = vec![s];
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &u in &frontier {
                    for &w in g.out_neighbors(u) {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[u] + 1;
                            next.push(w);
                        }
                        if dist[w] == dist[u] + 1 {
                            count[w] += count[u];
                        }
                    }
                }
                next.sort_unstable();
                next.dedup();
                frontier = next;
            }
            (dist, count)
        };
        let all: Vec<_> = (0..n).map(bfs).collect();
        let mut score = vec![0.0; n];
        for s in 0..n {
            for t in 0..n {
                let (ds, cs) = &all[s];
                if s == t || ds[t] == usize::MAX {
                    continue;
                }
                for v in 0..n {
                    if v == s || v == t {
                        continue;
                    }
                    let (dv, cv) = &all[v];
                    if ds[v] != usize::MAX && dv[t] != usize::MAX && ds[v] + dv[t] == ds[t] {
                        score[v] += cs[v] * cv[t] / cs[t];
                    }
                }
            }
        }
        score
    }

    #[test]
    fn path_has_one_transit_vertex() {
        let s = betweenness(&graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]));
        assert_eq!(s.values(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn complete_graph_is_all_zero() {
        let names = ["a", "b", "c"];
        let edges: Vec<_> = names
            .iter()
            .flat_map(|a| names.iter().filter(move |b| *b != a).map(move |b| (*a, *b)))
            .collect();
        let s = betweenness(&graph(&names, &edges));
        assert_eq!(s.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn diamond_splits_paths() {
        let s = betweenness(&graph(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]));
        assert_eq!(s.values(), &[0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn empty_graph_gives_empty_map() {
        assert!(betweenness(&AnalyticsGraph::default()).is_empty());
    }

    proptest! {
        #[test]
        fn matches_path_enumeration(n in 1usize..=8, mask in proptest::collection::vec(any::<bool>(), 1..60)) {
            let g = from_mask(n, &mask);
            let s = betweenness(&g);
            for (a, b) in s.values().iter().zip(enumeration_oracle(&g)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
