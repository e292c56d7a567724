//! CSV and JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{ErrorKind, PipelineError, Result, Stage};
use crate::report::{PlotData, RunReport, Series};

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::io(Stage::Export, path, e)
}

fn csv_error(path: &Path, e: csv::Error) -> PipelineError {
    PipelineError::new(Stage::Export, ErrorKind::Invalid(format!("{}: {e}", path.display())))
}

fn write_columns(path: &Path, first: (&str, &[f64]), columns: &[(String, &[f64])]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<&str> = std::iter::once(first.0).chain(columns.iter().map(|c| c.0.as_str())).collect();
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (i, x) in first.1.iter().enumerate() {
        // `Display` gives the shortest representation that parses back exactly.
        let row: Vec<String> = std::iter::once(x.to_string())
            .chain(columns.iter().map(|c| c.1[i].to_string()))
            .collect();
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(io_at(path))
}

fn named<'a>(series: &'a [Series], suffix: &str) -> Vec<(String, &'a [f64])> {
    series
        .iter()
        .map(|s| (format!("{}{suffix}", s.name), s.values.as_slice()))
        .collect()
}

/// Writes `pdf_<tag>.csv`, `logcdf_<tag>.csv` and `perf_<tag>.csv`.
pub fn export_plot_data(plots: &PlotData, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(io_at(out_dir))?;
    let tag = &plots.tag;
    let pdf = out_dir.join(format!("pdf_{tag}.csv"));
    write_columns(&pdf, ("r", &plots.pdf_r), &named(&plots.pdf, ""))?;
    let logcdf = out_dir.join(format!("logcdf_{tag}.csv"));
    write_columns(&logcdf, ("r_dB", &plots.logcdf_r_db), &named(&plots.logcdf, ""))?;
    let perf = out_dir.join(format!("perf_{tag}.csv"));
    let mut columns = Vec::new();
    for (ec, op) in plots.ec.iter().zip(&plots.op) {
        columns.push((format!("ec_{}", ec.name), ec.values.as_slice()));
        columns.push((format!("op_{}", op.name), op.values.as_slice()));
    }
    write_columns(&perf, ("gamma_bar_db", &plots.gamma_bar_db), &columns)?;
    Ok(vec![pdf, logcdf, perf])
}

/// Writes `report_<tag>.json`, `gof_<tag>.csv` (when fits were run) and the
/// plot CSVs.
pub fn write_report(report: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(io_at(out_dir))?;
    let tag = &report.config.tag;
    let json = out_dir.join(format!("report_{tag}.json"));
    fs::write(&json, report.to_json()).map_err(io_at(&json))?;
    let mut written = vec![json];
    if let Some(table) = &report.gof_table {
        let gof = out_dir.join(format!("gof_{tag}.csv"));
        fs::write(&gof, table.to_csv()).map_err(io_at(&gof))?;
        written.push(gof);
    }
    written.extend(export_plot_data(&report.plots, out_dir)?);
    Ok(written)
}

/// Reads the plot data back from a report file.
pub fn read_plot_data(report_json: &Path) -> Result<PlotData> {
    #[derive(serde::Deserialize)]
    struct View {
        plots: PlotData,
    }
    let text = fs::read_to_string(report_json).map_err(io_at(report_json))?;
    let view: View = serde_json::from_str(&text).map_err(|e| {
        PipelineError::new(
            Stage::Export,
            ErrorKind::Parse {
                path: report_json.to_path_buf(),
                line: e.line() as u64,
                message: e.to_string(),
            },
        )
    })?;
    Ok(view.plots)
}
