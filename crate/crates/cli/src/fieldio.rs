//! Field CSV: header `x[,y[,z]],u1[,u2[,u3]]`, one row per node, row-major
//! with the last axis fastest.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use sdnse_core::field::{Grid, SampledField};

const AXES: [&str; 3] = ["x", "y", "z"];

/// Parsed table: named columns of equal length. Empty cells read as NaN.
pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut text = String::new();
    File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .read_to_string(&mut text)?;
    parse_table(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_table(text: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        ensure!(
            rec.len() == header.len(),
            "row {} has {} fields, expected {}",
            row + 1,
            rec.len(),
            header.len()
        );
        for (col, v) in columns.iter_mut().zip(rec.iter()) {
            let x = if v.is_empty() {
                f64::NAN
            } else {
                v.parse::<f64>()
                    .with_context(|| format!("row {}: bad number {v:?}", row + 1))?
            };
            col.push(x);
        }
    }
    Ok(Table { header, columns })
}

/// Recovers the uniform grid behind the coordinate columns and checks the
/// row order.
pub fn infer_grid(coords: &[&[f64]]) -> Result<Grid> {
    let dim = coords.len();
    ensure!((1..=3).contains(&dim), "need 1 to 3 coordinate columns");
    let rows = coords[0].len();
    ensure!(rows >= 2, "a field needs at least two rows");
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    let mut shape = vec![0usize; dim];
    for a in 0..dim {
        let mut vals: Vec<f64> = coords[a].to_vec();
        vals.sort_by(f64::total_cmp);
        let span = vals[vals.len() - 1] - vals[0];
        let tol = 1e-9 * span.abs().max(1.0);
        vals.dedup_by(|b, a| (*b - *a).abs() <= tol);
        ensure!(vals.len() >= 2, "axis {} has a single coordinate", AXES[a]);
        lo[a] = vals[0];
        hi[a] = vals[vals.len() - 1];
        shape[a] = vals.len();
    }
    let grid = Grid::new(&lo, &hi, &shape)?;
    ensure!(
        grid.len() == rows,
        "{rows} rows do not form a full {} grid",
        shape
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("x")
    );
    for r in 0..rows {
        let idx = grid.multi_index(r);
        for a in 0..dim {
            let expect = grid.coord(a, idx[a]);
            let tol = 1e-9 * (grid.hi(a) - grid.lo(a));
            if (coords[a][r] - expect).abs() > tol {
                bail!(
                    "row {} is not on a row-major uniform grid (axis {})",
                    r + 1,
                    AXES[a]
                );
            }
        }
    }
    Ok(grid)
}

pub fn read_field(path: &Path) -> Result<SampledField> {
    let table = read_table(path)?;
    field_from_table(&table).with_context(|| format!("in {}", path.display()))
}

pub fn field_from_table(table: &Table) -> Result<SampledField> {
    let dim = table
        .header
        .iter()
        .take_while(|h| AXES.contains(&h.as_str()))
        .count();
    ensure!(dim >= 1, "header must start with x");
    for (a, h) in table.header.iter().take(dim).enumerate() {
        ensure!(
            h == AXES[a],
            "coordinate columns must be named x, y, z in order"
        );
    }
    let comps = &table.header[dim..];
    ensure!(
        comps.len() == dim,
        "a {dim}-dimensional field needs {dim} components u1..u{dim}, found {}",
        comps.len()
    );
    for (j, h) in comps.iter().enumerate() {
        ensure!(
            *h == format!("u{}", j + 1),
            "component column {} must be named u{}",
            dim + j + 1,
            j + 1
        );
    }
    let coords: Vec<&[f64]> = table.columns[..dim].iter().map(Vec::as_slice).collect();
    let grid = infer_grid(&coords)?;
    Ok(SampledField::new(grid, table.columns[dim..].to_vec())?)
}

pub fn write_field(path: &Path, field: &SampledField) -> Result<()> {
    let dim = field.dim();
    let mut header: Vec<String> = AXES[..dim].iter().map(|s| s.to_string()).collect();
    header.extend((1..=dim).map(|j| format!("u{j}")));
    let comps: Vec<&[f64]> = field.components.iter().map(Vec::as_slice).collect();
    write_grid_table(path, &field.grid, &header, &comps)
}

/// Writes `values` on the nodes of `grid` with coordinate columns first.
pub fn write_grid_table(
    path: &Path,
    grid: &Grid,
    header: &[String],
    values: &[&[f64]],
) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for r in 0..grid.len() {
        line.clear();
        let idx = grid.multi_index(r);
        for a in 0..grid.dim() {
            push_num(&mut line, grid.coord(a, idx[a]));
        }
        for v in values {
            push_num(&mut line, v[r]);
        }
        line.pop();
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal; exponent form for very small or large
/// magnitudes.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:?}")
    }
}

fn push_num(line: &mut String, v: f64) {
    line.push_str(&fmt_num(v));
    line.push(',');
}
