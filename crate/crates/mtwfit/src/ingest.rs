//! Sample files: comma-separated, UTF-8, header row required.
//!
//! Leading `# key: value` lines carry provenance (`source`, `seed`) so that a
//! written sample set reads back identically.

use std::fs;
use std::io::Write;
use std::path::Path;

use mtwfit_core::empirical::normalize;
use mtwfit_core::SampleSet;

use crate::config::InputFormat;
use crate::error::{ErrorKind, PipelineError, Result, Stage};

/// Fewest data rows accepted.
pub const MIN_ROWS: usize = 10;

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> PipelineError {
    PipelineError::new(
        Stage::Ingest,
        ErrorKind::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        },
    )
}

/// Reads raw amplitudes (moduli for complex rows) without normalizing.
pub fn read_amplitudes(path: &Path, format: InputFormat) -> Result<SampleSet> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::io(Stage::Ingest, path, e))?;
    let mut source = None;
    let mut seed = None;
    for (i, line) in text.lines().enumerate() {
        let Some(meta) = line.strip_prefix('#') else { break };
        if let Some((key, value)) = meta.split_once(':') {
            match key.trim() {
                "source" => source = Some(value.trim().to_string()),
                "seed" => {
                    let v = value.trim();
                    seed = Some(v.parse::<u64>().map_err(|_| parse_error(path, i as u64 + 1, format!("bad seed {v:?}")))?);
                }
                _ => {}
            }
        }
    }

    let columns = match format {
        InputFormat::ComplexCsv => 2,
        InputFormat::AmplitudeCsv => 1,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_error(path, e.position().map_or(0, |p| p.line()), e.to_string()))?
        .clone();
    if header.len() != columns || header.iter().any(|h| h.parse::<f64>().is_ok()) {
        return Err(parse_error(
            path,
            header.position().map_or(1, |p| p.line()),
            format!("expected a header row with {columns} column(s)"),
        ));
    }

    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != columns {
            return Err(parse_error(path, line, format!("expected {columns} field(s), found {}", record.len())));
        }
        let mut fields = [0.0; 2];
        for (slot, field) in fields.iter_mut().zip(record.iter()) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_error(path, line, format!("not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_error(path, line, format!("non-finite value {field:?}")));
            }
            *slot = v;
        }
        let amplitude = match format {
            InputFormat::ComplexCsv => fields[0].hypot(fields[1]),
            InputFormat::AmplitudeCsv => {
                if fields[0] < 0.0 {
                    return Err(parse_error(path, line, "negative amplitude"));
                }
                fields[0]
            }
        };
        values.push(amplitude);
    }
    if values.len() < MIN_ROWS {
        return Err(PipelineError::new(
            Stage::Ingest,
            ErrorKind::Invalid(format!("{}: {} data rows, need at least {MIN_ROWS}", path.display(), values.len())),
        ));
    }
    let source = source.unwrap_or_else(|| format!("file:{}", path.display()));
    SampleSet::new(values, source, seed).map_err(|e| PipelineError::core(Stage::Ingest, e))
}

/// Reads a sample file and normalizes it to unit mean square.
pub fn ingest(path: &Path, format: InputFormat) -> Result<SampleSet> {
    let raw = read_amplitudes(path, format)?;
    normalize(&raw).map_err(|e| PipelineError::core(Stage::Normalize, e))
}

/// Writes amplitudes in the format read by [`ingest`], with provenance.
pub fn write_amplitudes(samples: &SampleSet, path: &Path) -> Result<()> {
    let io = |e| PipelineError::io(Stage::Export, path, e);
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
    writeln!(out, "# source: {}", samples.source).map_err(io)?;
    if let Some(seed) = samples.seed {
        writeln!(out, "# seed: {seed}").map_err(io)?;
    }
    writeln!(out, "amplitude").map_err(io)?;
    for v in &samples.values {
        // `Display` for f64 prints the shortest string that parses back exactly.
        writeln!(out, "{v}").map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn rows(body: &str, n: usize) -> String {
        (0..n).map(|_| body).collect::<Vec<_>>().join("\n")
    }

    #[test]
    fn complex_rows_give_moduli() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("re,im\n3,4\n0,1\n{}\n", rows("1,0", 8));
        let p = write(&dir, "c.csv", &body);
        let raw = read_amplitudes(&p, InputFormat::ComplexCsv).unwrap();
        assert_eq!(&raw.values[..2], &[5.0, 1.0]);
        let s = ingest(&p, InputFormat::ComplexCsv).unwrap();
        assert!((s.mean_square() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplitudes_are_normalized() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("r\n{}\n", rows("1\n2\n3", 4));
        let s = ingest(&write(&dir, "a.csv", &body), InputFormat::AmplitudeCsv).unwrap();
        assert!((s.mean_square() - 1.0).abs() < 1e-12);
        assert!(s.normalized);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("r\n{}\n-1\n", rows("1", 12));
        let e = ingest(&write(&dir, "neg.csv", &body), InputFormat::AmplitudeCsv).unwrap_err();
        assert!(e.to_string().contains("line 14"), "{e}");
        assert_eq!(e.stage, Stage::Ingest);

        let body = format!("r\n{}\nNaN\n", rows("1", 12));
        let e = ingest(&write(&dir, "nan.csv", &body), InputFormat::AmplitudeCsv).unwrap_err();
        assert!(e.to_string().contains("line 14"), "{e}");

        let body = format!("r\n{}\nabc\n", rows("1", 3));
        let e = ingest(&write(&dir, "bad.csv", &body), InputFormat::AmplitudeCsv).unwrap_err();
        assert!(e.to_string().contains("line 5"), "{e}");
    }

    #[test]
    fn header_and_row_count_required() {
        let dir = tempfile::tempdir().unwrap();
        let e = ingest(&write(&dir, "nohdr.csv", &rows("1", 20)), InputFormat::AmplitudeCsv).unwrap_err();
        assert!(e.to_string().contains("header"), "{e}");
        let e = ingest(&write(&dir, "short.csv", "r\n1\n2\n"), InputFormat::AmplitudeCsv).unwrap_err();
        assert!(e.to_string().contains("at least 10"), "{e}");
    }

    #[test]
    fn written_samples_read_back_identically() {
        let dir = tempfile::tempdir().unwrap();
        let values: Vec<f64> = (1..50).map(|i| (i as f64 * 0.37).sin().abs() + 1e-3 / i as f64).collect();
        let s = normalize(&SampleSet::new(values, "mtw:test", Some(77)).unwrap()).unwrap();
        let p = dir.path().join("s.csv");
        write_amplitudes(&s, &p).unwrap();
        assert_eq!(ingest(&p, InputFormat::AmplitudeCsv).unwrap(), s);
    }
}
