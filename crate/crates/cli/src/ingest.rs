//! File ingestion.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use ringcpd::rank_graph::{DistanceMatrix, ObservationSeq};
use ringcpd::Error as CoreError;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum InputFormat {
    /// One observation per row, comma separated.
    CsvVectors,
    /// Header `n rows cols`, then `n` blocks of `rows` lines with `cols` entries.
    TensorStack,
    /// A symmetric `n × n` distance matrix.
    DistanceCsv,
}

impl InputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            InputFormat::CsvVectors => "csv_vectors",
            InputFormat::TensorStack => "tensor_stack",
            InputFormat::DistanceCsv => "distance_csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ingested {
    Observations(ObservationSeq),
    Distances(DistanceMatrix),
}

impl Ingested {
    pub fn len(&self) -> usize {
        match self {
            Ingested::Observations(s) => s.len(),
            Ingested::Distances(d) => d.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn ingest(path: &Path, format: InputFormat) -> CliResult<Ingested> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: name.clone(), source })?;
    ingest_str(&text, &name, format)
}

/// Parses `text` as if read from the file `name`.
pub fn ingest_str(text: &str, name: &str, format: InputFormat) -> CliResult<Ingested> {
    match format {
        InputFormat::CsvVectors => {
            let (width, rows) = parse_csv(text, name)?;
            let data = rows.into_iter().flatten().collect();
            Ok(Ingested::Observations(ObservationSeq::vectors(width, data)?))
        }
        InputFormat::DistanceCsv => {
            let (width, rows) = parse_csv(text, name)?;
            if rows.len() != width {
                return Err(CliError::Parse {
                    path: name.into(),
                    line: rows.len() + 1,
                    column: 1,
                    msg: format!("distance matrix has {} rows but {} columns", rows.len(), width),
                });
            }
            let data = rows.into_iter().flatten().collect();
            DistanceMatrix::from_dense(width, data).map(Ingested::Distances).map_err(|e| match e {
                CoreError::AsymmetricInput { i, j, diff } => {
                    CliError::Asymmetric { path: name.into(), row: i + 1, col: j + 1, diff }
                }
                e => e.into(),
            })
        }
        InputFormat::TensorStack => parse_tensor_stack(text, name),
    }
}

fn parse_error(name: &str, line: usize, column: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { path: name.into(), line, column, msg: msg.into() }
}

fn parse_field(name: &str, line: usize, column: usize, field: &str) -> CliResult<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_error(name, line, column, format!("not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(parse_error(name, line, column, format!("non-finite value: {field:?}")));
    }
    Ok(v)
}

/// Rows of a headerless numeric CSV; `#` starts a comment line.
fn parse_csv(text: &str, name: &str) -> CliResult<(usize, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(name, line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if rows.is_empty() {
            width = rec.len();
        } else if rec.len() != width {
            return Err(CliError::RaggedRows { path: name.into(), line, expected: width, found: rec.len() });
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, f)| parse_field(name, line, c + 1, f))
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(name, 1, 1, "empty input"));
    }
    Ok((width, rows))
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect()
}

fn parse_tensor_stack(text: &str, name: &str) -> CliResult<Ingested> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_error(name, 1, 1, "empty input"))?;
    let dims = split_fields(header);
    if dims.len() != 3 {
        return Err(parse_error(name, hline, 1, "header must be `n rows cols`"));
    }
    let mut hdr = [0usize; 3];
    for (c, (slot, f)) in hdr.iter_mut().zip(&dims).enumerate() {
        *slot = f
            .parse()
            .ok()
            .filter(|&v: &usize| v > 0)
            .ok_or_else(|| parse_error(name, hline, c + 1, format!("not a positive integer: {f:?}")))?;
    }
    let [n, rows, cols] = hdr;
    let mut data = Vec::with_capacity(n * rows * cols);
    for _ in 0..n * rows {
        let (lno, l) = lines.next().ok_or_else(|| {
            parse_error(name, text.lines().count() + 1, 1, format!("expected {} matrix rows after the header", n * rows))
        })?;
        let fields = split_fields(l);
        if fields.len() != cols {
            return Err(CliError::RaggedRows { path: name.into(), line: lno, expected: cols, found: fields.len() });
        }
        for (c, f) in fields.iter().enumerate() {
            data.push(parse_field(name, lno, c + 1, f)?);
        }
    }
    if let Some((lno, _)) = lines.next() {
        return Err(parse_error(name, lno, 1, "trailing data after the last matrix"));
    }
    Ok(Ingested::Observations(ObservationSeq::matrices(rows, cols, data)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_two_vectors() {
        let got = ingest_str("1,2\n3,4\n5,6\n", "x.csv", InputFormat::CsvVectors).unwrap();
        match got {
            Ingested::Observations(s) => {
                assert_eq!(s.len(), 3);
                assert_eq!(s.item_size(), 2);
                assert_eq!(s.item(2), &[5.0, 6.0]);
            }
            _ => panic!("expected observations"),
        }
    }

    #[test]
    fn empty_file_is_parse_error() {
        for f in [InputFormat::CsvVectors, InputFormat::TensorStack, InputFormat::DistanceCsv] {
            let err = ingest_str("", "e.csv", f).unwrap_err();
            assert!(matches!(err, CliError::Parse { .. }), "{err}");
            assert_eq!(err.exit_code(), 1);
        }
    }

    #[test]
    fn bad_cell_reports_position() {
        let err = ingest_str("1,2\n3,x\n", "b.csv", InputFormat::CsvVectors).unwrap_err();
        match err {
            CliError::Parse { line, column, .. } => assert_eq!((line, column), (2, 2)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn ragged_rows() {
        let err = ingest_str("1,2\n3\n", "r.csv", InputFormat::CsvVectors).unwrap_err();
        assert!(matches!(err, CliError::RaggedRows { line: 2, expected: 2, found: 1, .. }));
    }

    #[test]
    fn asymmetric_distance_names_cell() {
        let n = 6;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = (i as f64 - j as f64).abs();
            }
        }
        // row 2, column 5 (1-based)
        d[n + 4] += 1.0;
        let text: String = d
            .chunks(n)
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",") + "\n")
            .collect();
        let err = ingest_str(&text, "d.csv", InputFormat::DistanceCsv).unwrap_err();
        assert!(matches!(err, CliError::Asymmetric { row: 2, col: 5, .. }), "{err}");
        assert!(err.to_string().contains("row 2, column 5"));
    }

    #[test]
    fn tensor_stack_blocks() {
        let text = "2 2 3\n1 2 3\n4 5 6\n7,8,9\n10,11,12\n";
        match ingest_str(text, "t.txt", InputFormat::TensorStack).unwrap() {
            Ingested::Observations(s) => {
                assert_eq!(s.len(), 2);
                assert_eq!(s.item(1), &[7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
            }
            _ => panic!(),
        }
        let err = ingest_str("2 2 3\n1 2 3\n", "t.txt", InputFormat::TensorStack).unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
    }
}
