//! Matrix Market coordinate files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{SparseMatrix, TripletBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

/// Whether a Matrix Market file declares complex values.
pub fn is_complex_file(path: impl AsRef<Path>) -> Result<bool> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (field, _) = parse_header(text.lines().next().unwrap_or(""), path)?;
    Ok(field == Field::Complex)
}

fn parse_header(line: &str, path: &Path) -> Result<(Field, bool)> {
    let err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg,
    };
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(format!("malformed Matrix Market header `{line}`")));
    }
    if tokens[2] != "coordinate" {
        return Err(err(format!(
            "unsupported format `{}`; only coordinate is read",
            tokens[2]
        )));
    }
    let field = match tokens[3].as_str() {
        "real" | "integer" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(err(format!("unsupported field `{other}`"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(err(format!("unsupported symmetry `{other}`"))),
    };
    Ok((field, symmetric))
}

/// Parses Matrix Market text. `origin` is used in error messages only.
///
/// Symmetric files are expanded to both triangles; a complex file read into
/// a real matrix is an error unless every imaginary part is zero.
pub fn parse_matrix_market<T: Scalar>(text: &str, origin: &Path) -> Result<SparseMatrix<T>> {
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let Some((_, header)) = lines.next() else {
        return Err(err(1, "empty file".into()));
    };
    let (field, symmetric) = parse_header(header, origin)?;
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));

    let Some((lno, size)) = body.next() else {
        return Err(err(1, "missing size line".into()));
    };
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(lno, format!("bad size line `{size}`: {e}")))?;
    let [nrows, ncols, nnz] = dims[..] else {
        return Err(err(
            lno,
            format!("size line needs 3 integers, got `{size}`"),
        ));
    };
    if symmetric && nrows != ncols {
        return Err(err(lno, "symmetric matrix must be square".into()));
    }

    let mut t = TripletBuffer::with_capacity(nrows, ncols, if symmetric { 2 * nnz } else { nnz });
    let mut seen = 0;
    for (lno, line) in body {
        if seen == nnz {
            return Err(err(lno, format!("more than the declared {nnz} entries")));
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let want = if field == Field::Complex { 4 } else { 3 };
        if tok.len() != want {
            return Err(err(
                lno,
                format!("expected {want} fields, found {}", tok.len()),
            ));
        }
        let index = |s: &str, bound: usize| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|e| err(lno, format!("bad index `{s}`: {e}")))?;
            if v == 0 || v > bound {
                return Err(err(lno, format!("index {v} outside 1..={bound}")));
            }
            Ok(v - 1)
        };
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| err(lno, format!("bad value `{s}`: {e}")))
        };
        let (i, j) = (index(tok[0], nrows)?, index(tok[1], ncols)?);
        let re = num(tok[2])?;
        let im = if field == Field::Complex {
            num(tok[3])?
        } else {
            0.0
        };
        let v = T::from_parts(re, im)
            .ok_or_else(|| err(lno, "complex value in a real matrix".into()))?;
        t.push(i, j, v);
        if symmetric && i != j {
            t.push(j, i, v);
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(err(
            text.lines().count(),
            format!("declared {nnz} entries, found {seen}"),
        ));
    }
    SparseMatrix::from_triplets(&t)
}

pub fn matrix_market_read<T: Scalar>(path: impl AsRef<Path>) -> Result<SparseMatrix<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, path)
}

/// Renders a general coordinate file with 17 significant digits per value.
pub fn to_matrix_market<T: Scalar>(a: &SparseMatrix<T>) -> String {
    let field = if T::IS_COMPLEX { "complex" } else { "real" };
    let mut out = String::with_capacity(32 * (a.nnz() + 2));
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate {field} general");
    let _ = writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for j in 0..a.ncols() {
        for (i, v) in a.col_iter(j) {
            if T::IS_COMPLEX {
                let _ = writeln!(out, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re(), v.im());
            } else {
                let _ = writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v.re());
            }
        }
    }
    out
}

pub fn matrix_market_write<T: Scalar>(a: &SparseMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_matrix_market(a)).map_err(|e| Error::io(path, e))
}

/// Writes a vector as an `n × 1` coordinate matrix (zeros omitted).
pub fn vector_write<T: Scalar>(v: &[T], path: impl AsRef<Path>) -> Result<()> {
    let mut t = TripletBuffer::new(v.len(), 1);
    for (i, &x) in v.iter().enumerate() {
        if x != T::zero() {
            t.push(i, 0, x);
        }
    }
    matrix_market_write(&SparseMatrix::from_triplets(&t)?, path)
}

/// Reads an `n × 1` coordinate matrix as a dense vector.
pub fn vector_read<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let m = matrix_market_read::<T>(path)?;
    if m.ncols() != 1 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 2,
            msg: format!("expected a single column, found {}", m.ncols()),
        });
    }
    let mut v = vec![T::zero(); m.nrows()];
    for (i, x) in m.col_iter(0) {
        v[i] = x;
    }
    Ok(v)
}
