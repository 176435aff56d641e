//! Plain-text matrix files: first line `n m`, then n rows of m space
//! separated decimal values. Entries must be finite and nonnegative.

use std::path::Path;

use crate::error::CliError;
use permcast_core::DenseMatrix;

pub fn parse_matrix(text: &str) -> Result<DenseMatrix, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::validation("matrix file is empty"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(CliError::validation(format!(
            "matrix header must be 'n m', got '{header}'"
        )));
    }
    let n: usize = dims[0]
        .parse()
        .map_err(|_| CliError::validation(format!("bad row count '{}'", dims[0])))?;
    let m: usize = dims[1]
        .parse()
        .map_err(|_| CliError::validation(format!("bad column count '{}'", dims[1])))?;
    let mut data = Vec::with_capacity(n * m);
    for _ in 0..n {
        let (lineno, row) = lines
            .next()
            .ok_or_else(|| CliError::validation(format!("expected {n} rows, file ended early")))?;
        let values: Vec<&str> = row.split_whitespace().collect();
        if values.len() != m {
            return Err(CliError::validation(format!(
                "line {}: expected {m} values, got {}",
                lineno + 1,
                values.len()
            )));
        }
        for v in values {
            let x: f64 = v.parse().map_err(|_| {
                CliError::validation(format!("line {}: bad value '{v}'", lineno + 1))
            })?;
            if !x.is_finite() || x < 0.0 {
                return Err(CliError::validation(format!(
                    "line {}: entries must be finite and nonnegative, got {v}",
                    lineno + 1
                )));
            }
            data.push(x);
        }
    }
    DenseMatrix::from_rows(n, m, data)
        .map_err(|e| CliError::validation(format!("matrix file: {e}")))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read matrix {}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn format_matrix(a: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", a.n(), a.m());
    for i in 0..a.n() {
        let row: Vec<String> = (0..a.m())
            .map(|j| format!("{:.17e}", a.get(i, j)))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
