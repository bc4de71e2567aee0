//! Operator files and CSV artifacts.
//!
//! Operator files hold the dimension N on the first non-blank line, then N
//! rows of N whitespace-separated entries. An entry is `re,im` or a bare
//! real number. Lines starting with `#` are ignored.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nhpt_core::operators::GeneralOperator;
use nhpt_core::Complex64;

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn parse_entry(tok: &str) -> Result<Complex64> {
    let (re, im) = match tok.split_once(',') {
        Some((re, im)) => (re, im),
        None => (tok, "0"),
    };
    let re: f64 = re.trim().parse().with_context(|| format!("bad real part in entry {tok:?}"))?;
    let im: f64 = im.trim().parse().with_context(|| format!("bad imaginary part in entry {tok:?}"))?;
    if !re.is_finite() || !im.is_finite() {
        bail!("entry {tok:?} is not finite");
    }
    Ok(Complex64::new(re, im))
}

pub fn parse_operator(text: &str) -> Result<GeneralOperator> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, first) = lines.next().context("operator file is empty")?;
    let n: usize = first.parse().with_context(|| format!("first line must be the dimension, got {first:?}"))?;
    if n < 2 {
        bail!("operator dimension must be at least 2, got {n}");
    }
    let mut entries = Vec::with_capacity(n * n);
    for row in 0..n {
        let (lineno, line) = lines
            .next()
            .with_context(|| format!("expected {n} rows, found {row}"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != n {
            bail!("line {}: expected {n} entries, found {}", lineno + 1, toks.len());
        }
        for tok in toks {
            entries.push(parse_entry(tok).with_context(|| format!("line {}", lineno + 1))?);
        }
    }
    if let Some((lineno, _)) = lines.next() {
        bail!("line {}: unexpected content after {n} rows", lineno + 1);
    }
    Ok(GeneralOperator::new(n, entries)?)
}

pub fn read_operator(path: &Path) -> Result<GeneralOperator> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_operator(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn format_operator(op: &GeneralOperator) -> String {
    let n = op.dim();
    let mut s = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = op.row(i).iter().map(|v| format!("{},{}", num(v.re), num(v.im))).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Writes a header row and then every record.
pub fn write_csv<I, R>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// `prefix_1 .. prefix_n`.
pub fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |k| format!("{prefix}_{k}"))
}

pub fn header<'a>(fixed: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    fixed.into_iter().map(String::from).collect()
}
