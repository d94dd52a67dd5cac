//! MatrixMarket exchange format (coordinate matrices, array vectors).

use std::fmt::Write as _;

use super::{CsrMatrix, LinalgError};

pub fn write_matrix_market(a: &CsrMatrix) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let _ = writeln!(s, "{} {} {:?}", i + 1, j + 1, v);
        }
    }
    s
}

pub fn write_vector_market(x: &[f64]) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} 1", x.len());
    for v in x {
        let _ = writeln!(s, "{v:?}");
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> LinalgError {
    LinalgError::Parse { line, message: message.into() }
}

/// Data lines with their 1-based line numbers, after the banner and comments.
fn data_lines(text: &str) -> Result<(String, Vec<(usize, Vec<&str>)>), LinalgError> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if !banner.starts_with("%%MatrixMarket") {
        return Err(parse_err(1, "missing %%MatrixMarket banner"));
    }
    let rest = lines
        .filter(|(_, l)| !l.trim_start().starts_with('%') && !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split_whitespace().collect()))
        .collect();
    Ok((banner.to_ascii_lowercase(), rest))
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&&str>) -> Result<T, LinalgError> {
    let t = tok.ok_or_else(|| parse_err(line, "missing field"))?;
    t.parse().map_err(|_| parse_err(line, format!("invalid number '{t}'")))
}

pub fn read_matrix_market(text: &str) -> Result<CsrMatrix, LinalgError> {
    let (banner, lines) = data_lines(text)?;
    if !banner.contains("coordinate") || !banner.contains("real") {
        return Err(parse_err(1, "only 'coordinate real' matrices are supported"));
    }
    let symmetric = banner.contains("symmetric");
    let mut it = lines.into_iter();
    let (hl, header) = it.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let nrows: usize = num(hl, header.first())?;
    let ncols: usize = num(hl, header.get(1))?;
    let nnz: usize = num(hl, header.get(2))?;
    let mut t = Vec::with_capacity(nnz);
    for (ln, toks) in it.take(nnz) {
        let i: usize = num(ln, toks.first())?;
        let j: usize = num(ln, toks.get(1))?;
        let v: f64 = num(ln, toks.get(2))?;
        if i == 0 || j == 0 || i > nrows || j > ncols {
            return Err(parse_err(ln, format!("entry ({i}, {j}) out of range")));
        }
        t.push((i - 1, j - 1, v));
        if symmetric && i != j {
            t.push((j - 1, i - 1, v));
        }
    }
    if t.len() < nnz {
        return Err(parse_err(0, format!("expected {nnz} entries")));
    }
    Ok(CsrMatrix::from_triplets(nrows, ncols, &t))
}

pub fn read_vector_market(text: &str) -> Result<Vec<f64>, LinalgError> {
    let (banner, lines) = data_lines(text)?;
    if !banner.contains("array") {
        return Err(parse_err(1, "only 'array' vectors are supported"));
    }
    let mut it = lines.into_iter();
    let (hl, header) = it.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let n: usize = num(hl, header.first())?;
    let x: Vec<f64> = it.take(n).map(|(ln, toks)| num(ln, toks.first())).collect::<Result<_, _>>()?;
    if x.len() != n {
        return Err(parse_err(0, format!("expected {n} values, found {}", x.len())));
    }
    Ok(x)
}
