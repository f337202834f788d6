//! Matrix Market coordinate files (`real`/`integer`, `general`/`symmetric`).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

const BANNER: &str = "%%MatrixMarket";

/// Writes `m` as a general real coordinate file, values with 17 significant
/// digits.
pub fn mm_write(m: &SparseMatrix, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "{BANNER} matrix coordinate real general")?;
        writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
        for (i, j, v) in m.triplets() {
            writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

/// Reads a coordinate file; symmetric files get their mirror entries added.
pub fn mm_read(path: &Path) -> Result<SparseMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = reader.lines().enumerate();
    let (first_no, header) = match lines.next() {
        Some((k, l)) => (k + 1, l.map_err(|e| Error::io(path, e))?),
        None => return Err(parse_err(1, "empty file".into())),
    };
    let symmetry = parse_banner(&header).map_err(|e| match e {
        Error::InvalidConfig(msg) => parse_err(first_no, msg),
        other => other,
    })?;

    let mut dims: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut entries = 0usize;
    for (k, line) in lines {
        let line_no = k + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match dims {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(
                        line_no,
                        format!("size line needs 3 integers, found '{trimmed}'"),
                    ));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(line_no, format!("bad integer '{s}'")))
                };
                let d = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                if symmetry == Symmetry::Symmetric && d.0 != d.1 {
                    return Err(parse_err(
                        line_no,
                        format!("symmetric matrix must be square, got {}x{}", d.0, d.1),
                    ));
                }
                triplets.reserve(d.2);
                dims = Some(d);
            }
            Some((nrows, ncols, nnz)) => {
                if fields.len() != 3 {
                    return Err(parse_err(
                        line_no,
                        format!("entry needs 'row col value', found '{trimmed}'"),
                    ));
                }
                let idx = |s: &str, bound: usize, what: &str| -> Result<usize> {
                    let v = s
                        .parse::<usize>()
                        .map_err(|_| parse_err(line_no, format!("bad {what} index '{s}'")))?;
                    if v == 0 || v > bound {
                        return Err(parse_err(
                            line_no,
                            format!("{what} index {v} outside 1..={bound}"),
                        ));
                    }
                    Ok(v - 1)
                };
                let i = idx(fields[0], nrows, "row")?;
                let j = idx(fields[1], ncols, "column")?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad value '{}'", fields[2])))?;
                entries += 1;
                if entries > nnz {
                    return Err(parse_err(
                        line_no,
                        format!("more entries than the {nnz} declared"),
                    ));
                }
                triplets.push((i, j, v));
                if symmetry == Symmetry::Symmetric && i != j {
                    triplets.push((j, i, v));
                }
            }
        }
    }
    let Some((nrows, ncols, nnz)) = dims else {
        return Err(parse_err(first_no, "missing size line".into()));
    };
    if entries != nnz {
        return Err(parse_err(
            first_no,
            format!("declared {nnz} entries, found {entries}"),
        ));
    }
    SparseMatrix::from_triplets(nrows, ncols, &triplets)
}

fn parse_banner(line: &str) -> Result<Symmetry> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != BANNER.to_lowercase() {
        return Err(Error::InvalidConfig(format!(
            "expected '{BANNER} matrix coordinate <field> <symmetry>', found '{line}'"
        )));
    }
    if tokens[1] != "matrix" {
        return Err(Error::UnsupportedField(format!("object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedField(format!("format '{}'", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(Error::UnsupportedField(format!("field '{other}'"))),
    }
    match tokens[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        other => Err(Error::UnsupportedField(format!("symmetry '{other}'"))),
    }
}
