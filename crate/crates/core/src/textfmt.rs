//! Plain-text file formats.
//!
//! - Matrix: a `rows cols` header line, then `rows` lines of `cols`
//!   whitespace-separated integers.
//! - Moves (a lattice basis): one move per line, entries separated by
//!   whitespace, no header. An empty file is an empty basis.
//! - Table: the matrix format; the counts are read row-major.
//! - Design: one design point per line, its covariate levels (each >= 1).
//! - Fiber dump: one table per line, flattened, followed by its probability.
//!
//! Blank lines and lines starting with `#` are ignored on input.

use std::fmt::Write as _;

use crate::configurations::Design;
use crate::intkernel::{IntMatrix, LatticeBasis, Move};
use crate::oracle::Fiber;
use crate::sampler::Table;
use crate::{Error, Result};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_ints(line: usize, s: &str) -> Result<Vec<i64>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<i64>()
                .map_err(|_| parse_error(line, format!("`{tok}` is not an integer")))
        })
        .collect()
}

fn join(v: &[i64]) -> String {
    let mut s = String::new();
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_error(1, "missing `rows cols` header"))?;
    let dims = parse_ints(hline, header)?;
    let [rows, cols] = dims[..] else {
        return Err(parse_error(hline, "header must be `rows cols`"));
    };
    if rows < 0 || cols < 0 {
        return Err(parse_error(hline, "negative dimension"));
    }
    let (rows, cols) = (rows as usize, cols as usize);
    let mut data = Vec::with_capacity(rows * cols);
    let mut last = hline;
    for (n, l) in lines {
        last = n;
        if data.len() == rows * cols {
            return Err(parse_error(n, format!("more than {rows} rows")));
        }
        let row = parse_ints(n, l)?;
        if row.len() != cols {
            return Err(parse_error(n, format!("expected {cols} entries, found {}", row.len())));
        }
        data.extend(row);
    }
    if data.len() != rows * cols {
        return Err(parse_error(
            last + 1,
            format!("expected {rows} rows, found {}", data.len() / cols.max(1)),
        ));
    }
    IntMatrix::new(rows, cols, data)
}

pub fn write_matrix(m: &IntMatrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        s.push_str(&join(m.row(i)));
        s.push('\n');
    }
    s
}

/// Parses a moves file. `cells` fixes the move length (needed for an empty
/// file); otherwise it is taken from the first line.
pub fn parse_moves(text: &str, cells: Option<usize>) -> Result<LatticeBasis> {
    let mut moves = Vec::new();
    let mut width = cells;
    for (n, l) in content_lines(text) {
        let v = parse_ints(n, l)?;
        let w = *width.get_or_insert(v.len());
        if v.len() != w {
            return Err(parse_error(n, format!("expected {w} entries, found {}", v.len())));
        }
        moves.push(Move::new(v));
    }
    LatticeBasis::new(width.unwrap_or(0), moves)
}

pub fn write_moves(basis: &LatticeBasis) -> String {
    let mut s = String::new();
    for m in basis.moves() {
        s.push_str(&join(m.as_slice()));
        s.push('\n');
    }
    s
}

pub fn parse_table(text: &str) -> Result<Table> {
    let m = parse_matrix(text)?;
    if let Some(k) = m.as_slice().iter().position(|&v| v < 0) {
        return Err(Error::invalid(format!(
            "negative count in table row {}, column {}",
            k / m.cols() + 1,
            k % m.cols() + 1
        )));
    }
    Table::new(m.as_slice().to_vec())
}

/// Writes a table as a single row.
pub fn write_table(x: &Table) -> String {
    format!("1 {}\n{}\n", x.len(), join(x.counts()))
}

pub fn parse_design(text: &str) -> Result<Design> {
    let mut points = Vec::new();
    for (n, l) in content_lines(text) {
        let v = parse_ints(n, l)?;
        if v.is_empty() || v.iter().any(|&x| x < 1) {
            return Err(parse_error(n, "design levels must be integers >= 1"));
        }
        if points.first().is_some_and(|p: &Vec<usize>| p.len() != v.len()) {
            return Err(parse_error(n, "design points must all have the same number of covariates"));
        }
        points.push(v.into_iter().map(|x| x as usize).collect());
    }
    if points.is_empty() {
        return Err(parse_error(1, "design has no points"));
    }
    Design::from_points(points)
}

pub fn write_design(design: &Design) -> String {
    let mut s = String::new();
    for p in design.points() {
        let v: Vec<i64> = p.iter().map(|&x| x as i64).collect();
        s.push_str(&join(&v));
        s.push('\n');
    }
    s
}

pub fn write_fiber(fiber: &Fiber) -> String {
    let mut s = String::new();
    for (x, p) in fiber.elements.iter().zip(&fiber.probabilities) {
        let _ = writeln!(s, "{} {p}", join(x.counts()));
    }
    s
}

pub fn parse_fiber(text: &str) -> Result<Fiber> {
    let mut elements = Vec::new();
    let mut probabilities = Vec::new();
    for (n, l) in content_lines(text) {
        let mut toks: Vec<&str> = l.split_whitespace().collect();
        let p = toks
            .pop()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| parse_error(n, "missing probability"))?;
        let counts = parse_ints(n, &toks.join(" "))?;
        elements.push(Table::new(counts).map_err(|e| parse_error(n, e.to_string()))?);
        probabilities.push(p);
    }
    Ok(Fiber {
        elements,
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configurations::checkered_design;

    #[test]
    fn matrix_round_trip() {
        let m = IntMatrix::from_rows(&[vec![1, 2, -3], vec![0, 4, 5]]).unwrap();
        let text = write_matrix(&m);
        assert_eq!(text, "2 3\n1 2 -3\n0 4 5\n");
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert_eq!(parse_matrix("# comment\n1 2\n\n1 1\n").unwrap().cols(), 2);
    }

    #[test]
    fn matrix_errors_carry_lines() {
        let err = |t: &str| match parse_matrix(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(err("2 2\n1 1\n1 x\n"), 3);
        assert_eq!(err("2 2\n1 1 1\n"), 2);
        assert_eq!(err("2 2\n1 1\n"), 3);
        assert_eq!(err("2\n"), 1);
        assert_eq!(err(""), 1);
    }

    #[test]
    fn moves_round_trip() {
        let b = LatticeBasis::new(3, vec![Move::new(vec![1, -1, 0]), Move::new(vec![0, 2, -2])]).unwrap();
        let text = write_moves(&b);
        assert_eq!(text, "1 -1 0\n0 2 -2\n");
        assert_eq!(parse_moves(&text, None).unwrap(), b);
        let empty = parse_moves("", Some(4)).unwrap();
        assert_eq!((empty.len(), empty.cells()), (0, 4));
        assert!(parse_moves("1 -1\n1 0 -1\n", None).is_err());
    }

    #[test]
    fn tables_and_designs() {
        let x = Table::new(vec![3, 0, 2]).unwrap();
        assert_eq!(parse_table(&write_table(&x)).unwrap(), x);
        assert_eq!(parse_table("2 2\n1 2\n3 4\n").unwrap().counts(), &[1, 2, 3, 4]);
        assert!(parse_table("1 2\n1 -1\n").is_err());

        let d = checkered_design(4, 4, Some(5)).unwrap();
        let back = parse_design(&write_design(&d)).unwrap();
        assert_eq!(back.points(), d.points());
        assert!(parse_design("1 2\n0 1\n").is_err());
    }
}
