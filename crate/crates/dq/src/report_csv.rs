//! Trajectory reports as CSV.

use std::io::Write;

use dq_core::ingest::{algorithm_label, TrajectoryReport};

/// `document,algorithm,initial,final,increase_pct,total_increase`; the
/// percentage is empty when the initial score is zero.
pub fn write_summary_csv(report: &TrajectoryReport, writer: impl Write) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["document", "algorithm", "initial", "final", "increase_pct", "total_increase"])?;
    for t in report.trajectories() {
        out.write_record([
            t.document.as_str().to_string(),
            algorithm_label(&t.algorithm).to_string(),
            t.initial().to_string(),
            t.final_score().to_string(),
            t.increase_percent().map(|p| p.to_string()).unwrap_or_default(),
            t.total_increase().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `document,algorithm,t0,t1,...`: one column per resample, empty before the
/// document was first scored.
pub fn write_series_csv(report: &TrajectoryReport, writer: impl Write) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let n = report.resample_count();
    let mut header = vec!["document".to_string(), "algorithm".to_string()];
    header.extend((0..n).map(|i| format!("t{i}")));
    out.write_record(&header)?;
    for t in report.trajectories() {
        let mut row = vec![String::new(); n + 2];
        row[0] = t.document.as_str().to_string();
        row[1] = algorithm_label(&t.algorithm).to_string();
        for &(resample, score) in &t.points {
            row[resample + 2] = score.to_string();
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
