//! Line-oriented text formats for instances and update streams.
//!
//! ```text
//! covering m n lambda | packing m n lambda | positive mp mc n | general m n
//! C i j v
//! P i j v
//! a j v
//! b i v
//! ```
//!
//! Update streams hold `set C i j v`, `set P i j v`, `set a j v` and
//! `set b i v` lines. Indexes are 0-based; `#` starts a comment.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::scalar::Scalar;
use crate::whack::{RowSource, StreamedRow};

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceFile<F> {
    Covering { c: SparseMatrix<F>, lambda: F },
    Packing { p: SparseMatrix<F>, lambda: F },
    Positive { p: SparseMatrix<F>, c: SparseMatrix<F> },
    General { c: SparseMatrix<F>, a: Vec<F>, b: Vec<F> },
}

/// One line of an update stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SetLine<F> {
    C { row: usize, col: usize, value: F },
    P { row: usize, col: usize, value: F },
    A { index: usize, value: F },
    B { index: usize, value: F },
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| perr(line, format!("bad {what} `{tok}`")))
}

fn value<F: Scalar>(tok: Option<&str>, line: usize) -> Result<F> {
    let v: f64 = num(tok, line, "value")?;
    if !v.is_finite() || v < 0.0 {
        return Err(perr(line, format!("value {v} must be finite and nonnegative")));
    }
    Ok(F::c(v))
}

fn no_more<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match toks.next() {
        Some(t) => Err(perr(line, format!("unexpected token `{t}`"))),
        None => Ok(()),
    }
}

fn put<F: Scalar>(m: &mut SparseMatrix<F>, i: usize, j: usize, v: F, line: usize) -> Result<()> {
    m.check_index(i, j).map_err(|e| perr(line, e.to_string()))?;
    m.set(i, j, v);
    Ok(())
}

pub fn parse_instance<F: Scalar>(text: &str) -> Result<InstanceFile<F>> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, content(l))).filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty instance"))?;
    let mut h = header.split_whitespace();
    let kind = h.next().unwrap_or("");
    let mut out = match kind {
        "covering" | "packing" => {
            let m = num(h.next(), hl, "m")?;
            let n = num(h.next(), hl, "n")?;
            let lambda = value(h.next(), hl)?;
            let mat = SparseMatrix::new(m, n);
            if kind == "covering" {
                InstanceFile::Covering { c: mat, lambda }
            } else {
                InstanceFile::Packing { p: mat, lambda }
            }
        }
        "positive" => {
            let mp = num(h.next(), hl, "mp")?;
            let mc = num(h.next(), hl, "mc")?;
            let n = num(h.next(), hl, "n")?;
            InstanceFile::Positive { p: SparseMatrix::new(mp, n), c: SparseMatrix::new(mc, n) }
        }
        "general" => {
            let m = num(h.next(), hl, "m")?;
            let n = num(h.next(), hl, "n")?;
            InstanceFile::General { c: SparseMatrix::new(m, n), a: vec![F::zero(); n], b: vec![F::zero(); m] }
        }
        other => return Err(perr(hl, format!("unknown header `{other}`"))),
    };
    no_more(h, hl)?;
    for (ln, l) in lines {
        let mut t = l.split_whitespace();
        let tag = t.next().unwrap_or("");
        match (tag, &mut out) {
            ("C", InstanceFile::Covering { c, .. })
            | ("C", InstanceFile::Positive { c, .. })
            | ("C", InstanceFile::General { c, .. })
            | ("P", InstanceFile::Packing { p: c, .. })
            | ("P", InstanceFile::Positive { p: c, .. }) => {
                let i = num(t.next(), ln, "row")?;
                let j = num(t.next(), ln, "col")?;
                let v = value(t.next(), ln)?;
                put(c, i, j, v, ln)?;
            }
            ("a", InstanceFile::General { a: vals, .. }) | ("b", InstanceFile::General { b: vals, .. }) => {
                let k: usize = num(t.next(), ln, "index")?;
                let v = value(t.next(), ln)?;
                let len = vals.len();
                *vals.get_mut(k).ok_or_else(|| perr(ln, format!("index {k} out of range {len}")))? = v;
            }
            _ => return Err(perr(ln, format!("line `{l}` not valid for a {kind} instance"))),
        }
        no_more(t, ln)?;
    }
    Ok(out)
}

fn emit_matrix<F: Scalar>(out: &mut String, tag: &str, m: &SparseMatrix<F>) {
    for (i, j, v) in m.triplets() {
        out.push_str(&format!("{tag} {i} {j} {}\n", v.f64()));
    }
}

pub fn emit_instance<F: Scalar>(inst: &InstanceFile<F>) -> String {
    let mut s = String::new();
    match inst {
        InstanceFile::Covering { c, lambda } => {
            s.push_str(&format!("covering {} {} {}\n", c.rows(), c.cols(), lambda.f64()));
            emit_matrix(&mut s, "C", c);
        }
        InstanceFile::Packing { p, lambda } => {
            s.push_str(&format!("packing {} {} {}\n", p.rows(), p.cols(), lambda.f64()));
            emit_matrix(&mut s, "P", p);
        }
        InstanceFile::Positive { p, c } => {
            s.push_str(&format!("positive {} {} {}\n", p.rows(), c.rows(), p.cols()));
            emit_matrix(&mut s, "P", p);
            emit_matrix(&mut s, "C", c);
        }
        InstanceFile::General { c, a, b } => {
            s.push_str(&format!("general {} {}\n", c.rows(), c.cols()));
            emit_matrix(&mut s, "C", c);
            for (j, v) in a.iter().enumerate() {
                s.push_str(&format!("a {j} {}\n", v.f64()));
            }
            for (i, v) in b.iter().enumerate() {
                s.push_str(&format!("b {i} {}\n", v.f64()));
            }
        }
    }
    s
}

pub fn parse_updates<F: Scalar>(text: &str) -> Result<Vec<SetLine<F>>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let l = content(raw);
        if l.is_empty() {
            continue;
        }
        let mut t = l.split_whitespace();
        if t.next() != Some("set") {
            return Err(perr(ln, format!("expected `set`, got `{l}`")));
        }
        let ev = match t.next() {
            Some(tag @ ("C" | "P")) => {
                let row = num(t.next(), ln, "row")?;
                let col = num(t.next(), ln, "col")?;
                let value = value(t.next(), ln)?;
                if tag == "C" {
                    SetLine::C { row, col, value }
                } else {
                    SetLine::P { row, col, value }
                }
            }
            Some(tag @ ("a" | "b")) => {
                let index = num(t.next(), ln, "index")?;
                let value = value(t.next(), ln)?;
                if tag == "a" {
                    SetLine::A { index, value }
                } else {
                    SetLine::B { index, value }
                }
            }
            other => return Err(perr(ln, format!("unknown update target {other:?}"))),
        };
        no_more(t, ln)?;
        out.push(ev);
    }
    Ok(out)
}

pub fn emit_updates<F: Scalar>(events: &[SetLine<F>]) -> String {
    let mut s = String::new();
    for e in events {
        let line = match *e {
            SetLine::C { row, col, value } => format!("set C {row} {col} {}", value.f64()),
            SetLine::P { row, col, value } => format!("set P {row} {col} {}", value.f64()),
            SetLine::A { index, value } => format!("set a {index} {}", value.f64()),
            SetLine::B { index, value } => format!("set b {index} {}", value.f64()),
        };
        s.push_str(&line);
        s.push('\n');
    }
    s
}

/// Streams the `C` rows of an instance file, re-reading it on every pass.
///
/// Entries of one row must be contiguous. A final line cut off before its
/// newline that does not parse is reported as [`Error::StreamExhaustedMidRow`].
#[derive(Debug, Clone)]
pub struct FileRows {
    path: PathBuf,
    n: usize,
    lambda: f64,
}

impl FileRows {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut r = BufReader::new(File::open(&path)?);
        let mut first = String::new();
        while content(&first).is_empty() {
            first.clear();
            if r.read_line(&mut first)? == 0 {
                return Err(perr(1, "empty instance"));
            }
        }
        let toks: Vec<&str> = content(&first).split_whitespace().collect();
        if toks.first() != Some(&"covering") || toks.len() != 4 {
            return Err(perr(1, "streaming needs a `covering m n lambda` header"));
        }
        let n = num(Some(toks[2]), 1, "n")?;
        let lambda = num(Some(toks[3]), 1, "lambda")?;
        Ok(Self { path, n, lambda })
    }

    /// Entry bound from the header.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

struct FileRowIter<F> {
    reader: BufReader<File>,
    line: usize,
    pending: Option<(usize, usize, F)>,
    done: bool,
    n: usize,
}

impl<F: Scalar> FileRowIter<F> {
    /// Next `C i j v` entry, skipping the header and blank lines.
    fn next_entry(&mut self) -> Result<Option<(usize, usize, F)>> {
        loop {
            let mut buf = String::new();
            if self.reader.read_line(&mut buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let complete = buf.ends_with('\n');
            let l = content(&buf);
            if l.is_empty() || l.starts_with("covering") {
                continue;
            }
            let parsed = (|| {
                let mut t = l.split_whitespace();
                if t.next() != Some("C") {
                    return Err(perr(self.line, format!("expected a `C` entry, got `{l}`")));
                }
                let i: usize = num(t.next(), self.line, "row")?;
                let j: usize = num(t.next(), self.line, "col")?;
                let v: F = value(t.next(), self.line)?;
                no_more(t, self.line)?;
                if j >= self.n {
                    return Err(perr(self.line, format!("column {j} out of range {}", self.n)));
                }
                Ok((i, j, v))
            })();
            return match parsed {
                Ok(e) => Ok(Some(e)),
                Err(_) if !complete => {
                    let row = self.pending.map_or(0, |p| p.0);
                    Err(Error::StreamExhaustedMidRow { row })
                }
                Err(e) => Err(e),
            };
        }
    }
}

impl<F: Scalar> Iterator for FileRowIter<F> {
    type Item = StreamedRow<F>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let first = match self.pending.take() {
            Some(e) => e,
            None => match self.next_entry() {
                Ok(Some(e)) => e,
                Ok(None) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            },
        };
        let row = first.0;
        let mut entries = vec![(first.1, first.2)];
        self.pending = Some(first);
        loop {
            match self.next_entry() {
                Ok(Some(e)) if e.0 == row => entries.push((e.1, e.2)),
                Ok(Some(e)) => {
                    self.pending = Some(e);
                    return Some(Ok((row, entries)));
                }
                Ok(None) => {
                    self.pending = None;
                    self.done = true;
                    return Some(Ok((row, entries)));
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

impl<F: Scalar> RowSource<F> for FileRows {
    fn cols(&self) -> usize {
        self.n
    }

    fn pass(&mut self) -> Box<dyn Iterator<Item = StreamedRow<F>> + '_> {
        match File::open(&self.path) {
            Ok(f) => Box::new(FileRowIter { reader: BufReader::new(f), line: 0, pending: None, done: false, n: self.n }),
            Err(e) => Box::new(std::iter::once(Err(e.into()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_covering() {
        let f: InstanceFile<f64> = parse_instance("covering 2 2 1\nC 0 0 1\nC 1 1 0.5 # note\n").unwrap();
        let InstanceFile::Covering { c, lambda } = f else { panic!() };
        assert_eq!(lambda, 1.0);
        assert_eq!(c.get(1, 1), 0.5);
    }

    #[test]
    fn rejects_wrong_tag() {
        let e = parse_instance::<f64>("covering 1 1 1\nP 0 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_instance::<f64>("covering 1 1 1\nC 0 3 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn parses_updates() {
        let u: Vec<SetLine<f64>> = parse_updates("set C 0 1 0.5\n\nset a 2 3\nset b 0 1.5\n").unwrap();
        assert_eq!(u.len(), 3);
        assert_eq!(u[0], SetLine::C { row: 0, col: 1, value: 0.5 });
        assert!(parse_updates::<f64>("set Q 0 0 1\n").is_err());
    }

    fn write_tmp(name: &str, text: &str) -> PathBuf {
        let p = std::env::temp_dir().join(format!("mwu-lp-{}-{name}", std::process::id()));
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn file_rows_group_entries() {
        let p = write_tmp("rows", "covering 2 3 1\nC 0 0 1\nC 0 2 0.5\nC 1 1 1\n");
        let mut src = FileRows::open(&p).unwrap();
        let rows: Vec<_> = RowSource::<f64>::pass(&mut src).collect::<Result<_>>().unwrap();
        assert_eq!(rows, vec![(0, vec![(0, 1.0), (2, 0.5)]), (1, vec![(1, 1.0)])]);
    }

    #[test]
    fn truncated_final_line() {
        let p = write_tmp("trunc", "covering 2 3 1\nC 0 0 1\nC 1 1");
        let mut src = FileRows::open(&p).unwrap();
        let rows: Vec<StreamedRow<f64>> = src.pass().collect();
        assert!(matches!(rows.last(), Some(Err(Error::StreamExhaustedMidRow { row: 0 }))));
    }

    fn arb_matrix() -> impl Strategy<Value = SparseMatrix<f64>> {
        (1usize..6, 1usize..6).prop_flat_map(|(m, n)| {
            prop::collection::vec((0..m, 0..n, 0.001f64..100.0), 0..20)
                .prop_map(move |t| SparseMatrix::from_triplets(m, n, &t).unwrap())
        })
    }

    proptest! {
        #[test]
        fn instance_round_trip(c in arb_matrix(), p in arb_matrix(), lambda in 0.1f64..10.0) {
            let insts = vec![
                InstanceFile::Covering { c: c.clone(), lambda },
                InstanceFile::Packing { p: p.clone(), lambda },
                InstanceFile::General { a: vec![1.5; c.cols()], b: vec![0.25; c.rows()], c: c.clone() },
            ];
            for i in insts {
                prop_assert_eq!(parse_instance::<f64>(&emit_instance(&i)).unwrap(), i);
            }
            if p.cols() == c.cols() {
                let i = InstanceFile::Positive { p, c };
                prop_assert_eq!(parse_instance::<f64>(&emit_instance(&i)).unwrap(), i);
            }
        }

        #[test]
        fn update_round_trip(vals in prop::collection::vec((0usize..9, 0usize..9, 0.0f64..1e6), 0..30)) {
            let ev: Vec<SetLine<f64>> = vals
                .iter()
                .enumerate()
                .map(|(k, &(i, j, v))| match k % 4 {
                    0 => SetLine::C { row: i, col: j, value: v },
                    1 => SetLine::P { row: i, col: j, value: v },
                    2 => SetLine::A { index: i, value: v },
                    _ => SetLine::B { index: j, value: v },
                })
                .collect();
            prop_assert_eq!(parse_updates::<f64>(&emit_updates(&ev)).unwrap(), ev);
        }
    }
}
