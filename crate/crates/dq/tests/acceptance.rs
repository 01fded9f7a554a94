//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::cell::OnceCell;
use std::time::{Duration, Instant};

use dq::nquads::{parse_nquads, serialize_nquads, BlankScope, ParseOptions};
use dq::report_csv::{write_series_csv, write_summary_csv};
use dq::store_dir::FileDocuments;
use dq_core::analytics::{betweenness, hits, pagerank, project, AnalyticsError, AnalyticsGraph, HitsParams, PageRankParams};
use dq_core::ingest::{
    generate_scenario, replay_messages, state_event_for, AnalyticParams, Broker, DocumentStore, MemoryDocuments,
    ReplayOutcome, ScenarioConfig,
};
use dq_core::qualify::{score_history, ScoreRecord};
use dq_core::query::{execute, rank_documents, Clause, Comparator, PatternTerm, QueryPattern, SortDirection};
use dq_core::state::{latest_state, state_history};
use dq_core::vocab::{decide_strategy, graphs, iri, rdf, rel, AnalyticDescriptor, ModelingStrategy, RelationshipKind, StateKind};
use dq_core::{Dataset, Iri, Literal, Quad, QuadPattern, QuadStore, Term};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Check = fn(&Context) -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn link_analytics() -> Vec<AnalyticDescriptor> {
    vec![AnalyticDescriptor::pagerank(), AnalyticDescriptor::hits(), AnalyticDescriptor::betweenness()]
}

fn run_replay<D: DocumentStore>(
    cfg: &ScenarioConfig,
    algorithms: &[AnalyticDescriptor],
    broker: Broker<D>,
) -> ReplayOutcome<D> {
    let messages = generate_scenario(cfg).expect("valid config");
    replay_messages(broker, &messages, cfg.resample_every as usize, algorithms, &AnalyticParams::default(), |_| {})
        .expect("replay")
}

/// Shared between criteria.
#[derive(Default)]
struct Context {
    default_replay: OnceCell<(ReplayOutcome, Duration)>,
}

impl Context {
    /// Default scenario with the three link analytics.
    fn default_replay(&self) -> &(ReplayOutcome, Duration) {
        self.default_replay.get_or_init(|| {
            let start = Instant::now();
            let out = run_replay(&ScenarioConfig::default(), &link_analytics(), Broker::default());
            (out, start.elapsed())
        })
    }
}

// ---------------------------------------------------------------- oracles

fn random_graph(rng: &mut StdRng) -> AnalyticsGraph {
    let n = rng.gen_range(1..=10usize);
    let p: f64 = rng.gen_range(0.0..0.6);
    let names: Vec<Iri> = (0..n).map(|i| Iri::new(format!("urn:v:{i:02}")).unwrap()).collect();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                edges.insert((names[i].clone(), names[j].clone()));
            }
        }
    }
    AnalyticsGraph::new(names, edges).unwrap()
}

fn adjacency(g: &AnalyticsGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut a = vec![vec![0.0; n]; n];
    for (s, t) in g.edges() {
        a[g.index_of(s).unwrap()][g.index_of(t).unwrap()] = 1.0;
    }
    a
}

/// Dense Google-matrix power iteration; dangling rows spread uniformly.
fn pagerank_oracle(g: &AnalyticsGraph, d: f64) -> Vec<f64> {
    let n = g.vertex_count();
    let a = adjacency(g);
    let mut google = vec![vec![0.0; n]; n];
    for i in 0..n {
        let out: f64 = a[i].iter().sum();
        for j in 0..n {
            let follow = if out == 0.0 { 1.0 / n as f64 } else { a[i][j] / out };
            google[i][j] = d * follow + (1.0 - d) / n as f64;
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n).map(|j| (0..n).map(|i| x[i] * google[i][j]).sum()).collect();
        let change: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < 1e-15 {
            break;
        }
    }
    let total: f64 = x.iter().sum();
    x.iter().map(|v| v / total).collect()
}

/// Power iteration on a dense symmetric matrix from the uniform unit vector.
fn dominant(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..200_000 {
        let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * x[j]).sum()).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let change: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        x = y;
        if change < 1e-15 {
            break;
        }
    }
    x
}

fn hits_oracle(g: &AnalyticsGraph) -> (Vec<f64>, Vec<f64>) {
    let a = adjacency(g);
    let n = a.len();
    let ata: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[k][i] * a[k][j]).sum()).collect()).collect();
    let aat: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * a[j][k]).sum()).collect()).collect();
    (dominant(&aat), dominant(&ata))
}

/// Counts every shortest path explicitly by walking the BFS layers.
fn betweenness_oracle(g: &AnalyticsGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let a = adjacency(g);
    let mut score = vec![0.0; n];
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut frontier = vec![s];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for v in 0..n {
                    if a[u][v] > 0.0 && dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        for t in 0..n {
            if t == s || dist[t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let u = *path.last().unwrap();
                if u == t {
                    paths.push(path);
                    continue;
                }
                for v in 0..n {
                    if a[u][v] > 0.0 && dist[v] == dist[u] + 1 && dist[v] <= dist[t] {
                        let mut p = path.clone();
                        p.push(v);
                        stack.push(p);
                    }
                }
            }
            let total = paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    score[v] += 1.0 / total;
                }
            }
        }
    }
    score
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// --------------------------------------------------------------- criteria

fn criterion_1(_ctx: &Context) -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let (mut worst_pr, mut worst_hits, mut worst_bc) = (0.0f64, 0.0f64, 0.0f64);
    let mut hits_checked = 0;
    for case in 0..200 {
        let g = random_graph(&mut rng);
        let pr = pagerank(&g, &PageRankParams::default()).map_err(|e| e.to_string())?;
        worst_pr = worst_pr.max(max_diff(pr.values(), &pagerank_oracle(&g, 0.85)));

        match hits(&g, &HitsParams::default()) {
            Ok(h) => {
                let (hub, auth) = hits_oracle(&g);
                worst_hits = worst_hits
                    .max(max_diff(h.hubs.values(), &hub))
                    .max(max_diff(h.authorities.values(), &auth));
                hits_checked += 1;
            }
            Err(AnalyticsError::NoEdges) => ensure!(g.edge_count() == 0, "case {case}: NoEdges on a graph with edges"),
            Err(e) => return Err(format!("case {case}: {e}")),
        }
        worst_bc = worst_bc.max(max_diff(betweenness(&g).values(), &betweenness_oracle(&g)));
    }
    let elapsed = start.elapsed();
    ensure!(worst_pr <= 1e-9, "PageRank deviates by {worst_pr:e}");
    ensure!(worst_hits <= 1e-9, "HITS deviates by {worst_hits:e}");
    ensure!(worst_bc <= 1e-9, "betweenness deviates by {worst_bc:e}");
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!(
        "200 graphs ({hits_checked} with edges); max deviation PageRank {worst_pr:.1e}, HITS {worst_hits:.1e}, betweenness {worst_bc:.1e}; {elapsed:.2?}"
    ))
}

fn criterion_2(ctx: &Context) -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut runs = 0;
    let mut worst_sum = 0.0f64;
    let mut worst_norm = 0.0f64;
    for case in 0..200 {
        let g = random_graph(&mut rng);
        let pr = pagerank(&g, &PageRankParams::default()).map_err(|e| e.to_string())?;
        worst_sum = worst_sum.max((pr.sum() - 1.0).abs());
        runs += 1;
        if g.edge_count() == 0 {
            continue;
        }
        let h = hits(&g, &HitsParams::default()).map_err(|e| e.to_string())?;
        worst_norm = worst_norm.max((h.hubs.l2_norm() - 1.0).abs()).max((h.authorities.l2_norm() - 1.0).abs());
        let r = hits(&g.reversed(), &HitsParams::default()).map_err(|e| e.to_string())?;
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        ensure!(bits(r.hubs.values()) == bits(h.authorities.values()), "case {case}: reversed hubs differ");
        ensure!(bits(r.authorities.values()) == bits(h.hubs.values()), "case {case}: reversed authorities differ");
    }
    // Every PageRank and HITS execution of the default replay.
    let (out, _) = ctx.default_replay();
    for point in &out.resamples {
        for (execution, records) in point.executions.iter().zip(&point.records) {
            let values = records.iter().map(|r| r.normalized_score);
            match execution.descriptor.algorithm().as_str() {
                rel::PAGE_RANK => worst_sum = worst_sum.max((values.sum::<f64>() - 1.0).abs()),
                rel::HITS => worst_norm = worst_norm.max((values.map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs()),
                _ => continue,
            }
            runs += 1;
        }
    }
    ensure!(worst_sum <= 1e-9, "PageRank sum off by {worst_sum:e}");
    ensure!(worst_norm <= 1e-9, "HITS norm off by {worst_norm:e}");
    Ok(format!(
        "{runs} runs; max |sum-1| {worst_sum:.1e}, max |norm-1| {worst_norm:.1e}; reversal swap bitwise exact"
    ))
}

fn criterion_3(_ctx: &Context) -> Outcome {
    use ModelingStrategy::*;
    use RelationshipKind::*;
    use StateKind::*;
    let cells = [
        (Relationship, Continuant, SpecializationAndDQ),
        (Relationship, Occurrent, DirectQualification),
        (Attribute, Continuant, Specialization),
        (Attribute, Occurrent, BasicInference),
    ];
    for (relationship, state, expected) in cells {
        let got = decide_strategy(relationship, state);
        ensure!(got == expected, "{relationship:?}/{state:?} gave {got:?}");
    }
    Ok("4/4 cells".into())
}

fn all_analytics() -> Vec<AnalyticDescriptor> {
    let mut all = link_analytics();
    all.push(AnalyticDescriptor::vsm());
    all
}

/// Largest `quads - |sources|` over every record of a replay.
fn record_overhead(messages: u64) -> Result<(usize, usize, usize), String> {
    let cfg = ScenarioConfig {
        message_count: messages,
        ..ScenarioConfig::default()
    };
    let out = run_replay(&cfg, &all_analytics(), Broker::default());
    let mut worst = 0;
    let mut count = 0;
    for point in &out.resamples {
        for (records, quads) in point.records.iter().zip(&point.record_quads) {
            for (record, &q) in records.iter().zip(quads) {
                ensure!(q <= 5 + record.sources.len(), "{:?}: {q} quads with {} sources", record.target, record.sources.len());
                worst = worst.max(q - record.sources.len());
                count += 1;
            }
        }
    }
    Ok((worst, count, out.broker.store().len()))
}

fn criterion_4(_ctx: &Context) -> Outcome {
    let (small, small_n, small_store) = record_overhead(50)?;
    let (large, large_n, large_store) = record_overhead(230)?;
    ensure!(small == large, "bound differs: {small} vs {large}");
    Ok(format!(
        "max quads-|sources| = {small} over {small_n} records (store {small_store} quads) and {large} over {large_n} records (store {large_store} quads)"
    ))
}

fn criterion_5(ctx: &Context) -> Outcome {
    let (out, elapsed) = ctx.default_replay();
    let store = out.broker.store();
    ensure!(out.resamples.len() == 23, "{} resamples", out.resamples.len());
    let executions = store.subjects(&iri(rdf::TYPE), &Term::Iri(iri(rel::ANALYTIC_EXECUTION)), &iri(graphs::ANALYTICS));
    ensure!(executions.len() == 23 * 3, "{} executions", executions.len());
    for point in &out.resamples {
        ensure!(point.executions.len() == 3, "resample at {} has {} executions", point.published, point.executions.len());
    }
    for descriptor in link_analytics() {
        let table = out.report.render_table(descriptor.algorithm(), 5);
        let name = descriptor.algorithm().local_name();
        let header = format!("Impact Information\t{name} Initial Score\t{name} Final Score\tIncrease %\tTotal Increase");
        let lines: Vec<&str> = table.lines().collect();
        ensure!(lines[0] == header, "header {:?}", lines[0]);
        ensure!(lines.len() == 7, "{name} table has {} lines", lines.len());
        ensure!(lines[6] == format!("{name} Results"), "caption {:?}", lines[6]);
    }
    let mut csv_bytes = Vec::new();
    write_summary_csv(&out.report, &mut csv_bytes).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(csv_bytes.as_slice());
    let mut rows = 0;
    for row in reader.records() {
        let row = row.map_err(|e| e.to_string())?;
        let f = |i: usize| row[i].parse::<f64>().map_err(|e| format!("{e}: {:?}", &row[i]));
        let (initial, last, total) = (f(2)?, f(3)?, f(5)?);
        ensure!((total - (last - initial)).abs() <= 1e-12, "row {rows}: total {total} vs {last} - {initial}");
        if initial > 0.0 {
            let pct = f(4)?;
            ensure!((pct - 100.0 * total / initial).abs() <= 1e-9 * pct.abs().max(1.0), "row {rows}: percent {pct}");
        }
        rows += 1;
    }
    ensure!(*elapsed < Duration::from_secs(60), "replay took {elapsed:?}");
    Ok(format!("23 resamples, 69 executions, {rows} report rows consistent; replay {elapsed:.2?}"))
}

fn criterion_6(ctx: &Context) -> Outcome {
    let (out, _) = ctx.default_replay();
    let graph = project(out.broker.store());
    let (doc, in_degree) = graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v, graph.in_neighbors(i).len()))
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
        .ok_or("empty projection")?;
    let pr = out.report.trajectory(doc, &iri(rel::PAGE_RANK)).ok_or("no PageRank trajectory")?;
    let last: Vec<f64> = pr.points.iter().rev().take(5).rev().map(|p| p.1).collect();
    ensure!(last.len() == 5, "only {} points", last.len());
    ensure!(last.windows(2).all(|w| w[1] >= w[0]), "{doc:?} PageRank over last 5 resamples: {last:?}");
    let rising = |alg: &str| -> BTreeSet<Iri> {
        out.report
            .trajectories()
            .iter()
            .filter(|t| t.algorithm.as_str() == alg && t.total_increase() > 0.0)
            .map(|t| t.document.clone())
            .collect()
    };
    let both: Vec<Iri> = rising(rel::PAGE_RANK).intersection(&rising(rel::HITS)).cloned().collect();
    ensure!(!both.is_empty(), "no document rises under both PageRank and HITS");
    Ok(format!(
        "{} (in-degree {in_degree}) PageRank last 5 = {:?}; {} documents rise under both PageRank and HITS",
        doc.as_str(),
        last.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
        both.len()
    ))
}

// Criterion 7: query oracle.

fn random_store(rng: &mut StdRng) -> QuadStore {
    let node = |rng: &mut StdRng| Term::Iri(Iri::new(format!("urn:n:{}", rng.gen_range(0..5))).unwrap());
    let size = rng.gen_range(0..=200);
    let mut store = QuadStore::new();
    for _ in 0..size {
        let s = node(rng);
        let p = Iri::new(format!("urn:p:{}", rng.gen_range(0..3))).unwrap();
        let o = match rng.gen_range(0..4) {
            0 => Term::Literal(Literal::double(rng.gen_range(0..6) as f64 / 2.0)),
            1 => Term::Literal(Literal::string(format!("w{}", rng.gen_range(0..3)))),
            _ => node(rng),
        };
        let g = Iri::new(format!("urn:g:{}", rng.gen_range(0..3))).unwrap();
        store.insert(&Quad::new(s, p, o, g).unwrap());
    }
    store
}

fn random_query(rng: &mut StdRng) -> QueryPattern {
    // Subjects and objects share one variable pool so clauses join.
    let pools: [&[&str]; 4] = [&["a", "b", "c"], &["p", "q"], &["a", "b", "c", "v"], &["g", "h"]];
    let clauses = rng.gen_range(1..=3);
    let mut out = Vec::new();
    for _ in 0..clauses {
        let fixed = [
            format!("urn:n:{}", rng.gen_range(0..5)),
            format!("urn:p:{}", rng.gen_range(0..3)),
            format!("urn:n:{}", rng.gen_range(0..5)),
            format!("urn:g:{}", rng.gen_range(0..3)),
        ];
        let positions: Vec<PatternTerm> = (0..4)
            .map(|i| {
                if rng.gen_bool(0.8) {
                    PatternTerm::var(pools[i][rng.gen_range(0..pools[i].len())])
                } else {
                    PatternTerm::Term(Term::Iri(Iri::new(fixed[i].clone()).unwrap()))
                }
            })
            .collect();
        out.push(Clause(positions.try_into().unwrap()));
    }
    let mut query = QueryPattern::new(out);
    let present = query.variables();
    if !present.is_empty() && rng.gen_bool(0.4) {
        let var = present[rng.gen_range(0..present.len())].clone();
        let op = [Comparator::Lt, Comparator::Le, Comparator::Eq, Comparator::Ge, Comparator::Gt, Comparator::Ne][rng.gen_range(0..6)];
        query = query.filter(var, op, rng.gen_range(0..6) as f64 / 2.0);
    }
    if !present.is_empty() && rng.gen_bool(0.5) {
        let var = present[rng.gen_range(0..present.len())].clone();
        let dir = if rng.gen_bool(0.5) { SortDirection::Asc } else { SortDirection::Desc };
        query = query.order_by(var, dir);
        if rng.gen_bool(0.5) {
            query = query.limit(rng.gen_range(0..10));
        }
    }
    query
}

type Row = BTreeMap<String, Term>;

/// Nested loops over the full quad list, one loop per clause.
fn brute_force(dataset: &Dataset, query: &QueryPattern) -> Vec<Row> {
    let quads: Vec<Quad> = dataset.iter().collect();
    let mut rows: Vec<Row> = vec![Row::new()];
    for Clause(positions) in &query.clauses {
        let mut next = Vec::new();
        for row in &rows {
            'quads: for quad in &quads {
                let values = [
                    quad.subject().clone(),
                    Term::Iri(quad.predicate().clone()),
                    quad.object().clone(),
                    Term::Iri(quad.graph().clone()),
                ];
                let mut extended = row.clone();
                for (position, value) in positions.iter().zip(values) {
                    match position {
                        PatternTerm::Term(t) if *t != value => continue 'quads,
                        PatternTerm::Term(_) => {}
                        PatternTerm::Var(v) => match extended.get(v) {
                            Some(bound) if *bound != value => continue 'quads,
                            Some(_) => {}
                            None => {
                                extended.insert(v.clone(), value);
                            }
                        },
                    }
                }
                next.push(extended);
            }
        }
        rows = next;
    }
    rows.retain(|row| {
        query.filters.iter().all(|f| {
            row.get(&f.variable)
                .and_then(Term::numeric_value)
                .is_some_and(|x| f.comparator.holds(x, f.value))
        })
    });
    rows
}

/// Sort key: numbers, then other terms by their N-Quads form.
fn order_key(term: Option<&Term>) -> (u8, f64, String) {
    match term {
        Some(t) => match t.numeric_value() {
            Some(x) => (0, x, String::new()),
            None => (1, 0.0, t.to_string()),
        },
        None => (2, 0.0, String::new()),
    }
}

fn check_query(dataset: &Dataset, query: &QueryPattern) -> Result<(), String> {
    let result = execute(dataset, query).map_err(|e| e.to_string())?;
    let got: Vec<Row> = result
        .rows
        .iter()
        .map(|r| r.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
        .collect();
    let mut expected = brute_force(dataset, query);
    if let Some(order) = &query.order_by {
        let key = |r: &Row| order_key(r.get(&order.variable));
        let cmp = |a: &Row, b: &Row| {
            let (ka, kb) = (key(a), key(b));
            let within = ka.1.total_cmp(&kb.1).then_with(|| ka.2.cmp(&kb.2));
            ka.0.cmp(&kb.0).then(if order.direction == SortDirection::Desc { within.reverse() } else { within })
        };
        ensure!(got.windows(2).all(|w| cmp(&w[0], &w[1]).is_le()), "rows out of order");
        expected.sort_by(cmp);
        let keys = |rows: &[Row]| rows.iter().map(key).map(|k| (k.0, k.1.to_bits(), k.2)).collect::<Vec<_>>();
        let take = query.limit.unwrap_or(usize::MAX).min(expected.len());
        ensure!(got.len() == take, "{} rows, expected {take}", got.len());
        ensure!(keys(&got) == keys(&expected[..take]), "order keys differ");
        if query.limit.is_some() {
            let all: BTreeSet<&Row> = expected.iter().collect();
            ensure!(got.iter().all(|r| all.contains(r)), "limited rows not in oracle result");
            return Ok(());
        }
    }
    let mut got_sorted = got;
    got_sorted.sort();
    expected.sort();
    ensure!(got_sorted == expected, "{} rows vs oracle {}", got_sorted.len(), expected.len());
    Ok(())
}

fn criterion_7(_ctx: &Context) -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut total_rows = 0;
    for case in 0..100 {
        let store = random_store(&mut rng);
        for _ in 0..5 {
            let query = random_query(&mut rng);
            check_query(&store, &query).map_err(|e| format!("store {case}: {e}"))?;
            total_rows += brute_force(&store, &query).len();
        }
    }

    // rank_documents after every resample against the replay's own ledger.
    let cfg = ScenarioConfig::default();
    let messages = generate_scenario(&cfg).unwrap();
    let mut ledger: BTreeMap<Iri, f64> = BTreeMap::new();
    let mut failure = None;
    let mut resamples = 0;
    replay_messages(Broker::default(), &messages, 10, &link_analytics(), &AnalyticParams::default(), |view| {
        resamples += 1;
        for (execution, records) in view.point.executions.iter().zip(&view.point.records) {
            if execution.descriptor.algorithm().as_str() != rel::PAGE_RANK {
                continue;
            }
            for r in records {
                ledger.insert(r.target.clone(), r.normalized_score);
            }
        }
        let mut expected: Vec<(Iri, f64)> = ledger.iter().map(|(k, v)| (k.clone(), *v)).collect();
        expected.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let got = rank_documents(view.dataset, &iri(rel::PAGE_RANK), true, None);
        if got != expected && failure.is_none() {
            failure = Some(format!("resample {}: rank_documents differs from ledger", view.index));
        }
    })
    .map_err(|e| e.to_string())?;
    if let Some(f) = failure {
        return Err(f);
    }
    Ok(format!("500 queries over 100 stores ({total_rows} oracle rows) match; rank_documents matches after {resamples} resamples"))
}

fn criterion_8(_ctx: &Context) -> Outcome {
    let cfg = ScenarioConfig {
        message_count: 20,
        phone_count: 1,
        ..ScenarioConfig::default()
    };
    let messages = generate_scenario(&cfg).unwrap();
    let phone = messages[0].envelope.resource_involvement[0].clone();
    ensure!(
        messages.iter().all(|m| m.envelope.resource_involvement[0] == phone),
        "more than one phone"
    );
    let identity_quads = |d: &Dataset| -> BTreeSet<Quad> {
        d.quads_matching(&QuadPattern::any().subject(phone.clone())).into_iter().collect()
    };

    // Step by step: each state event leaves the identity's quads untouched.
    let mut broker = Broker::default();
    for m in &messages {
        broker.publish(&m.envelope, &m.payload).map_err(|e| e.to_string())?;
        let event = state_event_for(&m.envelope).ok_or("no state event")?;
        let before = identity_quads(broker.store());
        let len = broker.store().len();
        dq_core::state::record_state(broker.store_mut(), &event).map_err(|e| e.to_string())?;
        ensure!(identity_quads(broker.store()) == before, "identity quads changed");
        ensure!(broker.store().len() - len == 2 + event.assertions.len(), "event wrote {} quads", broker.store().len() - len);
    }

    let out = run_replay(&cfg, &link_analytics(), Broker::default());
    let store = out.broker.store();
    ensure!(out.state_events.len() == 20, "{} events", out.state_events.len());
    let history = state_history(store, &phone).map_err(|e| e.to_string())?;
    ensure!(history == out.state_events, "history differs from the published sequence");
    ensure!(
        history.windows(2).all(|w| w[0].observed_at < w[1].observed_at),
        "history not ordered"
    );
    let latest = latest_state(store, &phone).map_err(|e| e.to_string())?;
    ensure!(latest.as_ref() == out.state_events.last(), "latest is not the 20th event");

    let envelope_quads: BTreeSet<Quad> = messages
        .iter()
        .flat_map(|m| m.envelope.to_quads())
        .filter(|q| q.subject() == &Term::Iri(phone.clone()))
        .collect();
    ensure!(identity_quads(store) == envelope_quads, "replay added quads to the identity");
    let state_graph = iri(graphs::STATE);
    for event in &out.state_events {
        let n = store
            .quads_matching(&QuadPattern::any().subject(event.event.clone()).graph(state_graph.clone()))
            .len();
        ensure!(n == 2 + event.assertions.len(), "{:?}: {n} quads", event.event);
    }
    Ok(format!(
        "20 events, latest {}, {} quads per event, identity quads unchanged",
        latest.unwrap().event.as_str(),
        2 + out.state_events[0].assertions.len()
    ))
}

fn criterion_9(_ctx: &Context) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = ScenarioConfig::default();
    let messages = generate_scenario(&cfg).unwrap();
    let broker = Broker::new(QuadStore::new(), FileDocuments::new(dir.path()));
    let out = replay_messages(broker, &messages, 10, &all_analytics(), &AnalyticParams::default(), |_| {})
        .map_err(|e| e.to_string())?;
    let store = out.broker.store();

    let export = serialize_nquads(store);
    let options = ParseOptions {
        blanks: BlankScope::Preserve,
        ..ParseOptions::default()
    };
    let parsed = parse_nquads(export.as_bytes(), options).map_err(|e| e.to_string())?.quads;
    let before: BTreeSet<Quad> = store.iter().collect();
    let after: BTreeSet<Quad> = parsed.iter().cloned().collect();
    ensure!(before == after && parsed.len() == store.len(), "N-Quads round trip changed the quad set");
    let reloaded: QuadStore = parsed.into_iter().collect();
    ensure!(serialize_nquads(&reloaded) == export, "re-export is not byte-identical");

    for m in &messages {
        let stored = out.broker.documents().get(&m.envelope.named_graph_uri).map_err(|e| e.to_string())?;
        ensure!(
            stored.as_deref() == Some(m.payload.as_bytes()),
            "payload of {:?} differs",
            m.envelope.named_graph_uri
        );
    }

    let mut ledger: BTreeMap<(Iri, Iri), Vec<ScoreRecord>> = BTreeMap::new();
    for point in &out.resamples {
        for (execution, records) in point.executions.iter().zip(&point.records) {
            for r in records {
                ledger
                    .entry((r.target.clone(), execution.descriptor.algorithm().clone()))
                    .or_default()
                    .push(r.clone());
            }
        }
    }
    let mut records = 0;
    for ((target, algorithm), expected) in &ledger {
        let history = score_history(&reloaded, target, algorithm).map_err(|e| e.to_string())?;
        ensure!(&history == expected, "history of {target:?} under {algorithm:?} differs");
        let latest = dq_core::qualify::latest_score(&reloaded, target, algorithm).map_err(|e| e.to_string())?;
        ensure!(latest.as_ref() == expected.last(), "latest score of {target:?} differs");
        records += expected.len();
    }
    Ok(format!(
        "{} quads round-trip, {} payloads byte-identical, {records} score records reconstructed field-exact",
        store.len(),
        messages.len()
    ))
}

fn criterion_10(_ctx: &Context) -> Outcome {
    let artifacts = || -> Result<(Vec<u8>, Vec<u8>, String), String> {
        let out = run_replay(&ScenarioConfig::default(), &all_analytics(), Broker::<MemoryDocuments>::default());
        let (mut summary, mut series) = (Vec::new(), Vec::new());
        write_summary_csv(&out.report, &mut summary).map_err(|e| e.to_string())?;
        write_series_csv(&out.report, &mut series).map_err(|e| e.to_string())?;
        Ok((summary, series, serialize_nquads(out.broker.store())))
    };
    let first = artifacts()?;
    let second = artifacts()?;
    ensure!(first.0 == second.0, "report CSV differs");
    ensure!(first.1 == second.1, "series CSV differs");
    ensure!(first.2 == second.2, "N-Quads export differs");
    Ok(format!(
        "report {} bytes, series {} bytes, export {} bytes identical across runs",
        first.0.len(),
        first.1.len(),
        first.2.len()
    ))
}

fn main() {
    let criteria: [(u32, &str, Check); 10] = [
        (1, "analytics oracle equivalence", criterion_1),
        (2, "analytic invariants", criterion_2),
        (3, "decision matrix", criterion_3),
        (4, "reification avoidance", criterion_4),
        (5, "replay experiment shape", criterion_5),
        (6, "popularity trend", criterion_6),
        (7, "query correctness", criterion_7),
        (8, "state management", criterion_8),
        (9, "round trips", criterion_9),
        (10, "determinism", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let ctx = Context::default();
    let mut failed = 0;
    for (n, name, check) in criteria {
        let result = panic::catch_unwind(AssertUnwindSafe(|| check(&ctx))).unwrap_or_else(|p| {
            let message = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {message}"))
        });
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
