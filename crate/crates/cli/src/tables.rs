use std::path::Path;

use cel::gof::ComparisonEntry;
use cel::sampling::SimSummary;

use crate::error::CliError;

/// Same shortest round-trip text the JSON report uses; non-finite values
/// become an empty cell.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        serde_json::to_string(&v).expect("finite floats serialize")
    } else {
        String::new()
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io { path: path.into(), source },
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    })
}

pub const COMPARISON_HEADER: [&str; 13] = [
    "rank", "family", "status", "k", "n", "neg2ll", "aic", "bic", "aicc", "ks_stat", "ks_pvalue", "param1", "param2",
];

pub fn write_comparison_csv(path: &Path, entries: &[ComparisonEntry]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(COMPARISON_HEADER)?;
    for (i, e) in entries.iter().enumerate() {
        let rank = (i + 1).to_string();
        let family = e.family().to_string();
        match e.report() {
            Some(r) => {
                let p = |j: usize| r.fit.estimates.get(j).map(|&v| fmt_float(v)).unwrap_or_default();
                w.write_record([
                    rank,
                    family,
                    "fitted".into(),
                    r.k.to_string(),
                    r.n.to_string(),
                    fmt_float(r.neg2ll),
                    fmt_float(r.aic),
                    fmt_float(r.bic),
                    fmt_float(r.aicc),
                    fmt_float(r.ks_stat),
                    fmt_float(r.ks_pvalue),
                    p(0),
                    p(1),
                ])?;
            }
            None => {
                let mut row = vec![rank, family, "failed".into()];
                row.resize(COMPARISON_HEADER.len(), String::new());
                w.write_record(row)?;
            }
        }
    }
    w.flush().map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(())
}

pub fn write_simulation_csv(path: &Path, rows: &[SimSummary]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["n", "replications", "bias", "mse", "variance", "mean_estimate", "std_error", "failures"])?;
    for s in rows {
        w.write_record([
            s.n.to_string(),
            s.replications.to_string(),
            fmt_float(s.bias),
            fmt_float(s.mse),
            fmt_float(s.variance),
            fmt_float(s.mean_estimate),
            fmt_float(s.std_error),
            s.failures.to_string(),
        ])?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(())
}
