//! CSV and plain-column file formats.
//!
//! Reals are written as `{:.16e}` (17 significant digits), which round-trips every `f64`.

use crate::error::{domain, Error, Result};
use crate::innovation::NystromSolution;
use crate::simulate::SamplePath;
use crate::spectral::Periodogram;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

/// Relative tolerance for grid checks on time stamps read back from a file.
pub const GRID_TOL: f64 = 1e-9;

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    } else {
        Error::Parse(e.to_string())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes rows of reals under a header.
pub fn write_table<W: Write>(
    out: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Shape(format!(
                "row of {} values under {} columns",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.into_iter().map(fmt))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the named columns of a headed CSV table.
pub fn read_columns<R: Read>(input: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = r.headers().map_err(csv_error)?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Parse(format!("missing column `{n}`")))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        for (c, &i) in idx.iter().enumerate() {
            let field = rec
                .get(i)
                .ok_or_else(|| Error::Parse(format!("row {}: missing field", line + 2)))?;
            let v: f64 = field.parse().map_err(|_| {
                Error::Parse(format!("row {}: `{field}` is not a number", line + 2))
            })?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}

/// `t,x` table of a path.
pub fn write_path<W: Write>(out: W, path: &SamplePath) -> Result<()> {
    let d = path.delta;
    write_table(
        out,
        &["t", "x"],
        path.values
            .iter()
            .enumerate()
            .map(|(k, &x)| vec![k as f64 * d, x]),
    )
}

/// Reads a `t,x` table and checks that the stamps form a uniform grid.
///
/// With `delta = Some(Δ)` the grid step must equal Δ to [`GRID_TOL`] relative; otherwise it is
/// inferred from the first step.
pub fn read_path<R: Read>(input: R, delta: Option<f64>) -> Result<SamplePath> {
    let cols = read_columns(input, &["t", "x"])?;
    let (t, x) = (&cols[0], &cols[1]);
    if t.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: t.len(),
        });
    }
    let step = delta.unwrap_or(t[1] - t[0]);
    if !(step > 0.0) {
        return Err(domain("delta", format!("{step} must be positive")));
    }
    for (k, &tk) in t.iter().enumerate() {
        let expect = t[0] + k as f64 * step;
        if (tk - expect).abs() > GRID_TOL * expect.abs().max(step) {
            return Err(domain(
                "delta",
                format!(
                    "time stamp {tk} at row {} is off the grid t0 + k·{step}",
                    k + 2
                ),
            ));
        }
    }
    SamplePath::new(step, x.clone())
}

pub fn write_path_file(file: &Path, path: &SamplePath) -> Result<()> {
    write_path(BufWriter::new(File::create(file)?), path)
}

pub fn read_path_file(file: &Path, delta: Option<f64>) -> Result<SamplePath> {
    read_path(File::open(file)?, delta)
}

/// `lambda,I` table of the periodogram ordinates `j = 1..⌊(n−1)/2⌋`.
pub fn write_periodogram<W: Write>(out: W, pg: &Periodogram) -> Result<()> {
    write_table(out, &["lambda", "I"], pg.pairs().map(|(l, i)| vec![l, i]))
}

/// `s,g,dg_dH` table of a Fredholm solution at its nodes.
pub fn write_g_grid<W: Write>(out: W, sol: &NystromSolution) -> Result<()> {
    write_table(
        out,
        &["s", "g", "dg_dH"],
        sol.nodes
            .iter()
            .zip(&sol.g_values)
            .zip(&sol.dh_values)
            .map(|((&s, &g), &d)| vec![s, g, d]),
    )
}

/// Whitespace-separated columns with a `#` header line, as gnuplot reads them by default.
pub fn write_plot_columns<W: Write>(out: W, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let len = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != len) || columns.len() != header.len() {
        return Err(Error::Shape("plot columns differ in length".into()));
    }
    let mut w = BufWriter::new(out);
    writeln!(w, "# {}", header.join(" "))?;
    for i in 0..len {
        let line: Vec<String> = columns.iter().map(|c| fmt(c[i])).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    Ok(())
}
