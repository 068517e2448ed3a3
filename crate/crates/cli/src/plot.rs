use std::path::Path;

use cel::gof::{ecdf, GofReport};
use cel::Sample;

use crate::error::CliError;
use crate::tables::fmt_float;

pub const GRID_POINTS: usize = 200;

fn write_xy(path: &Path, header: [&str; 2], rows: impl IntoIterator<Item = (f64, f64)>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for (a, b) in rows {
        w.write_record([fmt_float(a), fmt_float(b)])?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(())
}

/// Evenly spaced points on (0, 1.1·max], avoiding the origin.
fn grid(s: &Sample) -> Vec<f64> {
    let hi = 1.1 * s.values()[s.len() - 1];
    (1..=GRID_POINTS).map(|i| hi * i as f64 / GRID_POINTS as f64).collect()
}

/// Writes `ecdf.csv` and, per fitted family, `pdf_`, `cdf_`, `pp_` and `qq_`
/// files. Every file has a header row and two columns.
pub fn write_plot_data(dir: &Path, s: &Sample, reports: &[&GofReport]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
    let xs = s.values();
    let n = xs.len() as f64;
    write_xy(&dir.join("ecdf.csv"), ["x", "ecdf"], xs.iter().map(|&x| (x, ecdf(s, x))))?;
    let g = grid(s);
    for r in reports {
        let m = r.fit.model()?;
        let name = r.family.to_string();
        let pdf: Vec<_> = g.iter().map(|&x| Ok((x, m.pdf(x)?))).collect::<cel::Result<_>>()?;
        write_xy(&dir.join(format!("pdf_{name}.csv")), ["x", "pdf"], pdf)?;
        let cdf: Vec<_> = g.iter().map(|&x| Ok((x, m.cdf(x)?))).collect::<cel::Result<_>>()?;
        write_xy(&dir.join(format!("cdf_{name}.csv")), ["x", "cdf"], cdf)?;
        // Plotting positions (i − ½)/n.
        let pp: Vec<_> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Ok(((i as f64 + 0.5) / n, m.cdf(x)?)))
            .collect::<cel::Result<_>>()?;
        write_xy(&dir.join(format!("pp_{name}.csv")), ["empirical", "model"], pp)?;
        let qq: Vec<_> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Ok((m.quantile((i as f64 + 0.5) / n)?, x)))
            .collect::<cel::Result<_>>()?;
        write_xy(&dir.join(format!("qq_{name}.csv")), ["theoretical", "sample"], qq)?;
    }
    Ok(())
}
