//! MatrixMarket and headerless CSV input, MatrixMarket output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use matdec::Matrix;

use crate::error::CliError;

/// A dense matrix read from disk. `missing` marks cells that were NaN,
/// empty, or absent from a coordinate file.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub values: Matrix,
    pub missing: Vec<(usize, usize)>,
}

impl Loaded {
    /// 0/1 observation mask, `None` when every cell is present.
    pub fn mask(&self) -> Option<Matrix> {
        if self.missing.is_empty() {
            return None;
        }
        let mut m = Matrix::from_fn(self.values.rows(), self.values.cols(), |_, _| 1.0);
        for &(i, j) in &self.missing {
            m[(i, j)] = 0.0;
        }
        Some(m)
    }

    /// The values, rejecting missing cells.
    pub fn dense(self, path: &Path) -> Result<Matrix, CliError> {
        match self.missing.first() {
            None => Ok(self.values),
            Some(&(i, j)) => Err(CliError::Parse(format!(
                "{}: missing or non-finite entry at ({}, {})",
                path.display(),
                i + 1,
                j + 1
            ))),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_matrix(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let parsed = if text.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket") {
        parse_matrix_market(&text)
    } else {
        parse_csv(&text)
    };
    parsed.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_dense(path: &Path) -> Result<Matrix, CliError> {
    read_matrix(path)?.dense(path)
}

fn parse_value(tok: &str) -> Result<f64, String> {
    tok.parse::<f64>().map_err(|_| format!("invalid number {tok:?}"))
}

fn collect_missing(values: &Matrix, absent: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..values.cols() {
        for i in 0..values.rows() {
            if absent[i][j] || !values[(i, j)].is_finite() {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Loaded, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let row = record
            .iter()
            .map(|f| if f.is_empty() { Ok(f64::NAN) } else { parse_value(f) })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.first().map_or(0, Vec::len);
    let values = Matrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let absent = vec![vec![false; values.cols()]; values.rows()];
    let missing = collect_missing(&values, &absent);
    Ok(Loaded { values, missing })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

pub fn parse_matrix_market(text: &str) -> Result<Loaded, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?.to_ascii_lowercase();
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return Err(format!("unsupported header {header:?}"));
    }
    let coordinate = match h[2] {
        "array" => false,
        "coordinate" => true,
        f => return Err(format!("unsupported format {f:?}")),
    };
    if !matches!(h[3], "real" | "integer" | "double") {
        return Err(format!("unsupported field {:?}", h[3]));
    }
    let sym = match h[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        s => return Err(format!("unsupported symmetry {s:?}")),
    };
    let data: Vec<&str> = lines.filter(|l| !l.trim_start().starts_with('%') && !l.trim().is_empty()).collect();
    let size: Vec<&str> = data.first().ok_or("missing size line")?.split_whitespace().collect();
    let dim = |k: usize| -> Result<usize, String> {
        let t = size.get(k).ok_or("short size line")?;
        t.parse::<usize>().map_err(|_| format!("invalid size {t:?}"))
    };
    let (m, n) = (dim(0)?, dim(1)?);
    if sym != Symmetry::General && m != n {
        return Err("symmetric storage needs a square matrix".into());
    }
    if coordinate {
        return parse_coordinate(&data[1..], m, n, dim(2)?, sym);
    }
    let stored: Vec<(usize, usize)> = match sym {
        Symmetry::General => (0..n).flat_map(|j| (0..m).map(move |i| (i, j))).collect(),
        Symmetry::Symmetric => (0..n).flat_map(|j| (j..m).map(move |i| (i, j))).collect(),
        Symmetry::Skew => (0..n).flat_map(|j| (j + 1..m).map(move |i| (i, j))).collect(),
    };
    let tokens: Vec<&str> = data[1..].iter().flat_map(|l| l.split_whitespace()).collect();
    if tokens.len() != stored.len() {
        return Err(format!("expected {} values, found {}", stored.len(), tokens.len()));
    }
    let mut values = Matrix::zeros(m, n);
    for (&(i, j), tok) in stored.iter().zip(tokens) {
        set_mirrored(&mut values, i, j, parse_value(tok)?, sym);
    }
    let missing = collect_missing(&values, &vec![vec![false; n]; m]);
    Ok(Loaded { values, missing })
}

fn set_mirrored(values: &mut Matrix, i: usize, j: usize, v: f64, sym: Symmetry) {
    values[(i, j)] = v;
    match sym {
        Symmetry::General => {}
        Symmetry::Symmetric => values[(j, i)] = v,
        Symmetry::Skew => values[(j, i)] = -v,
    }
}

fn parse_coordinate(body: &[&str], m: usize, n: usize, nnz: usize, sym: Symmetry) -> Result<Loaded, String> {
    if body.len() != nnz {
        return Err(format!("expected {nnz} entries, found {}", body.len()));
    }
    let mut values = Matrix::zeros(m, n);
    let mut absent = vec![vec![true; n]; m];
    for line in body {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(format!("malformed entry {line:?}"));
        }
        let idx = |s: &str, len: usize| -> Result<usize, String> {
            match s.parse::<usize>() {
                Ok(k) if (1..=len).contains(&k) => Ok(k - 1),
                _ => Err(format!("index {s:?} out of range 1..={len}")),
            }
        };
        let (i, j) = (idx(t[0], m)?, idx(t[1], n)?);
        if !absent[i][j] {
            return Err(format!("duplicate entry ({}, {})", i + 1, j + 1));
        }
        let v = parse_value(t[2])?;
        set_mirrored(&mut values, i, j, v, sym);
        absent[i][j] = false;
        if sym != Symmetry::General {
            absent[j][i] = false;
        }
    }
    let missing = collect_missing(&values, &absent);
    Ok(Loaded { values, missing })
}

/// MatrixMarket array text, column-major.
pub fn matrix_market(m: &Matrix) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} {}", m.rows(), m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let _ = writeln!(s, "{}", fmt(m[(i, j)]));
        }
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<(), CliError> {
    write_file(path, &matrix_market(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_round_trip() {
        let a = Matrix::from_rows(&[[1.0, -2.5, 1.0 / 3.0], [4e-300, 5.0, f64::MAX]]);
        let back = parse_matrix_market(&matrix_market(&a)).unwrap();
        assert_eq!(back.values, a);
        assert!(back.missing.is_empty());
    }

    #[test]
    fn array_symmetric_storage() {
        let text = "%%MatrixMarket matrix array real symmetric\n% comment\n2 2\n1\n2\n3\n";
        let l = parse_matrix_market(text).unwrap();
        assert_eq!(l.values, Matrix::from_rows(&[[1.0, 2.0], [2.0, 3.0]]));
    }

    #[test]
    fn coordinate_absent_cells_are_missing() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 3 3\n1 1 1.5\n2 3 -2\n1 2 4\n";
        let l = parse_matrix_market(text).unwrap();
        assert_eq!(l.values, Matrix::from_rows(&[[1.5, 4.0, 0.0], [0.0, 0.0, -2.0]]));
        assert_eq!(l.missing, vec![(1, 0), (1, 1), (0, 2)]);
        let mask = l.mask().unwrap();
        assert_eq!(mask, Matrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    }

    #[test]
    fn coordinate_errors() {
        let dup = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n";
        assert!(parse_matrix_market(dup).unwrap_err().contains("duplicate"));
        let oob = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n";
        assert!(parse_matrix_market(oob).unwrap_err().contains("out of range"));
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n";
        assert!(parse_matrix_market(short).is_err());
    }

    #[test]
    fn csv_nan_and_empty_are_missing() {
        let l = parse_csv("1, 2, NaN\n4,,6\n").unwrap();
        assert_eq!(l.missing, vec![(1, 1), (0, 2)]);
        assert_eq!(l.values[(1, 2)], 6.0);
        assert!(parse_csv("1,2\n3\n").is_err());
        assert!(parse_csv("1,x\n").is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
