use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::term::Iri;

/// Scores of one document under one algorithm, one point per resample at
/// which it was scored.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub document: Iri,
    pub algorithm: Iri,
    /// `(resample index, raw score)`, in resample order.
    pub points: Vec<(usize, f64)>,
}

impl Trajectory {
    /// Score at the first resample after publication.
    pub fn initial(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.1)
    }

    pub fn final_score(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }

    pub fn total_increase(&self) -> f64 {
        self.final_score() - self.initial()
    }

    /// `None` when the initial score is not positive.
    pub fn increase_percent(&self) -> Option<f64> {
        let initial = self.initial();
        (initial > 0.0).then(|| 100.0 * self.total_increase() / initial)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryReport {
    algorithms: Vec<Iri>,
    resample_count: usize,
    trajectories: Vec<Trajectory>,
}

/// Display name of an algorithm IRI, e.g. `HITS`.
pub fn algorithm_label(algorithm: &Iri) -> &str {
    algorithm.local_name()
}

impl TrajectoryReport {
    pub fn new(algorithms: Vec<Iri>) -> Self {
        TrajectoryReport {
            algorithms,
            resample_count: 0,
            trajectories: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, resample: usize, algorithm: &Iri, document: &Iri, score: f64) {
        self.resample_count = self.resample_count.max(resample + 1);
        let rank = |t: &Trajectory| {
            let a = self.algorithms.iter().position(|x| *x == t.algorithm).unwrap_or(usize::MAX);
            (a, t.document.clone())
        };
        let key = (
            self.algorithms.iter().position(|x| x == algorithm).unwrap_or(usize::MAX),
            document.clone(),
        );
        match self.trajectories.binary_search_by(|t| rank(t).cmp(&key)) {
            Ok(i) => self.trajectories[i].points.push((resample, score)),
            Err(i) => self.trajectories.insert(
                i,
                Trajectory {
                    document: document.clone(),
                    algorithm: algorithm.clone(),
                    points: alloc::vec![(resample, score)],
                },
            ),
        }
    }

    pub fn algorithms(&self) -> &[Iri] {
        &self.algorithms
    }

    pub fn resample_count(&self) -> usize {
        self.resample_count
    }

    /// All trajectories, grouped by algorithm (in configured order) and sorted
    /// by document within each group.
    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn trajectory(&self, document: &Iri, algorithm: &Iri) -> Option<&Trajectory> {
        self.trajectories
            .iter()
            .find(|t| &t.document == document && &t.algorithm == algorithm)
    }

    /// The `n` largest total increases for `algorithm`; ties go to the smaller
    /// document IRI.
    pub fn top_by_increase(&self, algorithm: &Iri, n: usize) -> Vec<&Trajectory> {
        let mut rows: Vec<&Trajectory> = self.trajectories.iter().filter(|t| &t.algorithm == algorithm).collect();
        rows.sort_by(|a, b| {
            b.total_increase()
                .total_cmp(&a.total_increase())
                .then_with(|| a.document.cmp(&b.document))
        });
        rows.truncate(n);
        rows
    }

    /// Tab-separated table of the top `n` documents followed by its caption.
    /// Columns are `Impact Information`, `<Name> Initial Score`,
    /// `<Name> Final Score`, `Increase %` and `Total Increase`; the last line
    /// reads `<Name> Results`.
    pub fn render_table(&self, algorithm: &Iri, n: usize) -> String {
        let name = algorithm_label(algorithm);
        let mut out = format!(
            "Impact Information\t{name} Initial Score\t{name} Final Score\tIncrease %\tTotal Increase\n"
        );
        for t in self.top_by_increase(algorithm, n) {
            let pct = t.increase_percent().map_or_else(|| String::from("n/a"), |p| format!("{p:.2}%"));
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{pct}\t{}",
                t.document.as_str(),
                t.initial(),
                t.final_score(),
                t.total_increase()
            );
        }
        let _ = writeln!(out, "{name} Results");
        out
    }
}
