//! The published reference tables, embedded verbatim, and their
//! recomputation.
//!
//! - `table1.txt`: `I_n(t)` and `J_n(t)` for `n <= 6`,
//! - `table2.txt`: `a_{n,k}` for `n <= 16`,
//! - `table3.txt`: `b_{n,k}` for even `n <= 24`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyseq::{BigCoeff, DescentRow};
use crate::recurrences::{TriangleCache, TriangleKind};

pub const TABLE1: &str = include_str!("../data/table1.txt");
pub const TABLE2: &str = include_str!("../data/table2.txt");
pub const TABLE3: &str = include_str!("../data/table3.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub table: u8,
    pub kind: TriangleKind,
    pub n: usize,
    pub k: usize,
    pub value: BigCoeff,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_value(table: u8, line: usize, tok: &str) -> Result<BigCoeff> {
    tok.parse::<BigInt>()
        .map_err(|_| Error::MalformedRow(format!("table {table}, line {line}: bad value {tok:?}")))
}

/// `family n c_0 c_1 ...` per line.
pub fn parse_row_table(table: u8, text: &str) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for (line, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        let bad = || Error::MalformedRow(format!("table {table}, line {line}: {l:?}"));
        let kind = match toks.next() {
            Some("I") => TriangleKind::I,
            Some("J") => TriangleKind::J,
            _ => return Err(bad()),
        };
        let n: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        for (k, tok) in toks.enumerate() {
            cells.push(Cell { table, kind, n, k, value: parse_value(table, line, tok)? });
        }
    }
    Ok(cells)
}

/// Header `label n_1 n_2 ...`, then `k v_1 v_2 ...` with `.` for empty cells.
pub fn parse_grid_table(table: u8, kind: TriangleKind, text: &str) -> Result<Vec<Cell>> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::MalformedRow(format!("table {table}: missing header")))?;
    let columns: Vec<usize> = header
        .split_whitespace()
        .skip(1)
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::MalformedRow(format!("table {table}, line {hline}: bad header")))?;
    let mut cells = Vec::new();
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let k: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedRow(format!("table {table}, line {line}: bad k")))?;
        let toks: Vec<&str> = toks.collect();
        if toks.len() != columns.len() {
            return Err(Error::MalformedRow(format!(
                "table {table}, line {line}: {} cells for {} columns",
                toks.len(),
                columns.len()
            )));
        }
        for (&n, tok) in columns.iter().zip(toks) {
            if tok != "." {
                cells.push(Cell { table, kind, n, k, value: parse_value(table, line, tok)? });
            }
        }
    }
    Ok(cells)
}

/// All cells of the three tables.
#[derive(Debug, Clone)]
pub struct Golden {
    pub cells: Vec<Cell>,
}

impl Golden {
    pub fn embedded() -> Result<Self> {
        Self::parse(TABLE1, TABLE2, TABLE3)
    }

    pub fn parse(table1: &str, table2: &str, table3: &str) -> Result<Self> {
        let mut cells = parse_row_table(1, table1)?;
        cells.extend(parse_grid_table(2, TriangleKind::A, table2)?);
        cells.extend(parse_grid_table(3, TriangleKind::B, table3)?);
        Ok(Golden { cells })
    }

    pub fn table(&self, table: u8) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.table == table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellDiff {
    pub table: u8,
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub embedded: Option<String>,
    pub computed: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReproduceReport {
    pub cells_checked: usize,
    pub diffs: Vec<CellDiff>,
}

impl ReproduceReport {
    pub fn identical(&self) -> bool {
        self.diffs.is_empty()
    }
}

/// The cells each table is expected to contain, computed from the recurrences.
pub fn computed_cells() -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    let mut i = TriangleCache::new(TriangleKind::I);
    let mut j = TriangleCache::new(TriangleKind::J);
    for n in 1..=6 {
        for (k, v) in i.row(n)?.iter().enumerate() {
            cells.push(Cell { table: 1, kind: TriangleKind::I, n, k, value: v.clone() });
        }
        let jrow = if n % 2 == 0 {
            j.row(n)?.to_vec()
        } else {
            DescentRow::zero_fixed_point_free(n).into_coeffs()
        };
        for (k, v) in jrow.into_iter().enumerate() {
            cells.push(Cell { table: 1, kind: TriangleKind::J, n, k, value: v });
        }
    }
    let mut a = TriangleCache::new(TriangleKind::A);
    for n in 1..=16 {
        for (k, v) in a.row(n)?.iter().enumerate() {
            cells.push(Cell { table: 2, kind: TriangleKind::A, n, k, value: v.clone() });
        }
    }
    let mut b = TriangleCache::new(TriangleKind::B);
    for n in (2..=24).step_by(2) {
        for (i, v) in b.row(n)?.iter().enumerate() {
            cells.push(Cell { table: 3, kind: TriangleKind::B, n, k: i + 1, value: v.clone() });
        }
    }
    Ok(cells)
}

/// Recomputes every cell and diffs against `golden`, in both directions.
pub fn reproduce(golden: &Golden) -> Result<ReproduceReport> {
    let computed = computed_cells()?;
    let key = |c: &Cell| (c.table, c.kind, c.n, c.k);
    let mut diffs = Vec::new();
    for c in &computed {
        let embedded = golden.cells.iter().find(|g| key(g) == key(c));
        if embedded.map(|g| &g.value) != Some(&c.value) {
            diffs.push(CellDiff {
                table: c.table,
                family: c.kind.symbol().into(),
                n: c.n,
                k: c.k,
                embedded: embedded.map(|g| g.value.to_string()),
                computed: Some(c.value.to_string()),
            });
        }
    }
    for g in &golden.cells {
        if !computed.iter().any(|c| key(c) == key(g)) {
            diffs.push(CellDiff {
                table: g.table,
                family: g.kind.symbol().into(),
                n: g.n,
                k: g.k,
                embedded: Some(g.value.to_string()),
                computed: None,
            });
        }
    }
    Ok(ReproduceReport { cells_checked: computed.len(), diffs })
}

fn latex_poly(coeffs: &[BigCoeff]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(k, c)| {
            let one = num_traits::One::is_one(c);
            match k {
                0 => c.to_string(),
                1 if one => "t".into(),
                1 => format!("{c}t"),
                _ if one => format!("t^{k}"),
                _ => format!("{c}t^{k}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else if terms.len() == 1 && !terms[0].contains('t') {
        terms[0].clone()
    } else {
        format!("${}$", terms.join("+"))
    }
}

fn latex_grid(cells: &[&Cell], columns: &[usize], rows: std::ops::RangeInclusive<usize>, corner: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "\\begin{{tabular}}{{|l|{}}}", "c|".repeat(columns.len()));
    s.push_str("\\hline\n");
    let head: Vec<String> = columns.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(s, "{corner}&{}\\\\\\hline", head.join("&"));
    for k in rows {
        let vals: Vec<String> = columns
            .iter()
            .map(|&n| {
                cells
                    .iter()
                    .find(|c| c.n == n && c.k == k)
                    .map(|c| {
                        if c.value < BigInt::from(0) {
                            format!("${}$", c.value)
                        } else {
                            c.value.to_string()
                        }
                    })
                    .unwrap_or_default()
            })
            .collect();
        let _ = writeln!(s, "{k}&{}\\\\\\hline", vals.join("&"));
    }
    s.push_str("\\end{tabular}\n");
    s
}

/// The three tables as LaTeX `tabular` environments in the original layout.
pub fn render_latex(cells: &[Cell]) -> String {
    let mut out = String::new();
    out.push_str("\\begin{tabular}{|l|l|l|}\n\\hline\n$n$ & $I_n(t)$ & $J_{n}(t)$ \\\\\\hline\n");
    for n in 1..=6 {
        let row = |kind| -> Vec<BigCoeff> {
            cells
                .iter()
                .filter(|c| c.table == 1 && c.kind == kind && c.n == n)
                .map(|c| c.value.clone())
                .collect()
        };
        let _ = writeln!(
            out,
            "{n} & {} & {} \\\\\\hline",
            latex_poly(&row(TriangleKind::I)),
            latex_poly(&row(TriangleKind::J))
        );
    }
    out.push_str("\\end{tabular}\n\n");

    let t2: Vec<&Cell> = cells.iter().filter(|c| c.table == 2).collect();
    out.push_str(&latex_grid(&t2, &(1..=16).collect::<Vec<_>>(), 0..=7, "$k\\setminus n$"));
    out.push('\n');
    let t3: Vec<&Cell> = cells.iter().filter(|c| c.table == 3).collect();
    out.push_str(&latex_grid(&t3, &(2..=24).step_by(2).collect::<Vec<_>>(), 1..=12, "$k\\setminus 2n$"));
    out
}
