//! Plain-text readers and writers for the on-disk formats: joint
//! distributions, sample sets, tree decompositions, and tabulated set
//! functions. Lines starting with `#` and blank lines are ignored
//! everywhere; parse errors carry 1-based line numbers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::discrete::{JointTable, SubsetV, VarSet};
use crate::error::{Error, Result};
use crate::estimation::SampleSet;
use crate::treedecomp::TreeDecomposition;

/// Tabulated set function over ground set `0..n`: one value per subset,
/// indexed by bitmask.
#[derive(Debug, Clone)]
pub struct TabulatedSetFunction {
    pub n: usize,
    pub values: Vec<f64>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::File { path: path.display().to_string(), source })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::File { path: path.display().to_string(), source })
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_string()));
    }
    Ok(out)
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected {what}, got {tok:?}")))
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a number, got {tok:?}")))
}

fn expect_header<'a>(
    lines: &'a [(usize, String)],
    keyword: &str,
) -> Result<(usize, Vec<&'a str>)> {
    let (ln, first) = lines
        .first()
        .ok_or_else(|| parse_err(1, format!("empty file, expected {keyword:?} header")))?;
    let mut toks = first.split_whitespace();
    match toks.next() {
        Some(k) if k == keyword => Ok((*ln, toks.collect())),
        other => Err(parse_err(
            *ln,
            format!("expected {keyword:?} header, got {:?}", other.unwrap_or("")),
        )),
    }
}

fn parse_cards(lines: &[(usize, String)], n: usize) -> Result<Vec<usize>> {
    let (ln, line) = lines
        .get(1)
        .ok_or_else(|| parse_err(2, "missing `cards` line"))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some("cards") {
        return Err(parse_err(*ln, "expected `cards` line"));
    }
    let cards: Vec<usize> = toks
        .map(|t| parse_usize(*ln, t, "a cardinality"))
        .collect::<Result<_>>()?;
    if cards.len() != n {
        return Err(parse_err(
            *ln,
            format!("expected {n} cardinalities, got {}", cards.len()),
        ));
    }
    Ok(cards)
}

/// Reads `vars n` / `cards c0 .. c{n-1}` / one probability per line in
/// row-major order (last variable fastest). The table is validated.
pub fn read_dist(path: &Path) -> Result<JointTable> {
    let lines = content_lines(path)?;
    let (hln, toks) = expect_header(&lines, "vars")?;
    if toks.len() != 1 {
        return Err(parse_err(hln, "expected `vars n`"));
    }
    let n = parse_usize(hln, toks[0], "a variable count")?;
    let cards = parse_cards(&lines, n)?;
    let vars = VarSet::new(cards)?;
    let cells = vars.cell_count()?;
    let body = &lines[2..];
    if body.len() != cells {
        let at = body.last().or_else(|| lines.last()).map_or(1, |(l, _)| *l);
        return Err(parse_err(
            at,
            format!("expected {cells} probabilities, got {}", body.len()),
        ));
    }
    let mut probs = Vec::with_capacity(cells);
    for (ln, line) in body {
        if line.split_whitespace().count() != 1 {
            return Err(parse_err(*ln, "expected one probability per line"));
        }
        probs.push(parse_f64(*ln, line)?);
    }
    let table = JointTable::new(vars, probs)?;
    table.validate()?;
    Ok(table)
}

/// Writes the distribution with 17 significant digits so a read-back is
/// bit-identical.
pub fn write_dist(path: &Path, p: &JointTable) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    writeln!(w, "vars {}", p.n())?;
    write!(w, "cards")?;
    for c in p.vars().cards() {
        write!(w, " {c}")?;
    }
    writeln!(w)?;
    for q in p.probs() {
        writeln!(w, "{q:.17e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `samples n m` / `cards ...` / `m` rows of `n` values each.
pub fn read_samples(path: &Path) -> Result<SampleSet> {
    let lines = content_lines(path)?;
    let (hln, toks) = expect_header(&lines, "samples")?;
    if toks.len() != 2 {
        return Err(parse_err(hln, "expected `samples n m`"));
    }
    let n = parse_usize(hln, toks[0], "a variable count")?;
    let m = parse_usize(hln, toks[1], "a sample count")?;
    let cards = parse_cards(&lines, n)?;
    let vars = VarSet::new(cards)?;
    let body = &lines[2..];
    if body.len() != m {
        let at = body.last().or_else(|| lines.last()).map_or(1, |(l, _)| *l);
        return Err(parse_err(at, format!("expected {m} rows, got {}", body.len())));
    }
    let mut rows = Vec::with_capacity(m);
    for (ln, line) in body {
        let row: Vec<usize> = line
            .split_whitespace()
            .map(|t| parse_usize(*ln, t, "a value"))
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(parse_err(
                *ln,
                format!("expected {n} values per row, got {}", row.len()),
            ));
        }
        rows.push(row);
    }
    SampleSet::new(vars, rows)
}

pub fn write_samples(path: &Path, s: &SampleSet) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    writeln!(w, "samples {} {}", s.vars().n(), s.rows().len())?;
    write!(w, "cards")?;
    for c in s.vars().cards() {
        write!(w, " {c}")?;
    }
    writeln!(w)?;
    for row in s.rows() {
        let toks: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", toks.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `td n_bags` / `bag i: v ...` / `edge i j`. Bags must appear for
/// every index `0..n_bags`; edges reference bag indices. The decomposition
/// is returned unvalidated so defective inputs can be inspected.
pub fn read_td(path: &Path) -> Result<TreeDecomposition> {
    let lines = content_lines(path)?;
    let (hln, toks) = expect_header(&lines, "td")?;
    if toks.len() != 1 {
        return Err(parse_err(hln, "expected `td n_bags`"));
    }
    let n_bags = parse_usize(hln, toks[0], "a bag count")?;
    let mut bags: Vec<Option<SubsetV>> = vec![None; n_bags];
    let mut edges = Vec::new();
    for (ln, line) in &lines[1..] {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("bag") => {
                let idx_tok = toks
                    .next()
                    .ok_or_else(|| parse_err(*ln, "expected `bag i: v ...`"))?;
                let idx_tok = idx_tok
                    .strip_suffix(':')
                    .ok_or_else(|| parse_err(*ln, "expected `:` after bag index"))?;
                let idx = parse_usize(*ln, idx_tok, "a bag index")?;
                if idx >= n_bags {
                    return Err(parse_err(*ln, format!("bag index {idx} out of range")));
                }
                if bags[idx].is_some() {
                    return Err(parse_err(*ln, format!("bag {idx} given twice")));
                }
                let ids: Vec<usize> = toks
                    .map(|t| parse_usize(*ln, t, "a variable id"))
                    .collect::<Result<_>>()?;
                bags[idx] = Some(SubsetV::from_ids(ids));
            }
            Some("edge") => {
                let i = parse_usize(*ln, toks.next().unwrap_or(""), "a bag index")?;
                let j = parse_usize(*ln, toks.next().unwrap_or(""), "a bag index")?;
                if toks.next().is_some() {
                    return Err(parse_err(*ln, "expected `edge i j`"));
                }
                if i >= n_bags || j >= n_bags {
                    return Err(parse_err(*ln, format!("edge ({i}, {j}) out of range")));
                }
                edges.push((i, j));
            }
            other => {
                return Err(parse_err(
                    *ln,
                    format!("expected `bag` or `edge`, got {:?}", other.unwrap_or("")),
                ));
            }
        }
    }
    let bags: Vec<SubsetV> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| parse_err(hln, format!("bag {i} never defined"))))
        .collect::<Result<_>>()?;
    Ok(TreeDecomposition { bags, edges })
}

pub fn write_td(path: &Path, td: &TreeDecomposition) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    writeln!(w, "td {}", td.bags.len())?;
    for (i, bag) in td.bags.iter().enumerate() {
        let toks: Vec<String> = bag.iter().map(|v| v.to_string()).collect();
        writeln!(w, "bag {i}: {}", toks.join(" "))?;
    }
    for &(i, j) in &td.edges {
        writeln!(w, "edge {i} {j}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `ground n` followed by one `mask value` line per subset of
/// `0..n`, in any order; every mask must appear exactly once. Ground sets
/// above 20 variables are refused (the table would exceed a million rows).
pub fn read_set_function(path: &Path) -> Result<TabulatedSetFunction> {
    let lines = content_lines(path)?;
    let (hln, toks) = expect_header(&lines, "ground")?;
    if toks.len() != 1 {
        return Err(parse_err(hln, "expected `ground n`"));
    }
    let n = parse_usize(hln, toks[0], "a ground set size")?;
    if n == 0 {
        return Err(Error::GroundTooSmall);
    }
    if n > 20 {
        return Err(Error::GroundTooLarge(n));
    }
    let total = 1usize << n;
    let mut values = vec![f64::NAN; total];
    let mut seen = vec![false; total];
    let body = &lines[1..];
    for (ln, line) in body {
        let mut toks = line.split_whitespace();
        let mask = parse_usize(*ln, toks.next().unwrap_or(""), "a subset mask")?;
        let val = parse_f64(*ln, toks.next().unwrap_or(""))?;
        if toks.next().is_some() {
            return Err(parse_err(*ln, "expected `mask value`"));
        }
        if mask >= total {
            return Err(parse_err(*ln, format!("mask {mask} out of range for n = {n}")));
        }
        if seen[mask] {
            return Err(parse_err(*ln, format!("mask {mask} given twice")));
        }
        seen[mask] = true;
        values[mask] = val;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        let at = lines.last().map_or(1, |(l, _)| *l);
        return Err(parse_err(at, format!("mask {missing} missing")));
    }
    Ok(TabulatedSetFunction { n, values })
}

pub fn write_set_function(path: &Path, f: &TabulatedSetFunction) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    writeln!(w, "ground {}", f.n)?;
    for (mask, v) in f.values.iter().enumerate() {
        writeln!(w, "{mask} {v:.17e}")?;
    }
    w.flush()?;
    Ok(())
}
