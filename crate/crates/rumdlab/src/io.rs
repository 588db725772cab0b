//! File formats: martingale tables and operator matrices as CSV, and the
//! output sink shared by the subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, ensure, Context};
use rumdlab_core::{DenseOperator, Exponent, NormedSpace, Table, WalshPaleyMartingale};

fn reader(path: &Path) -> anyhow::Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(file))
}

fn floats(record: &csv::StringRecord, path: &Path) -> anyhow::Result<Vec<f64>> {
    record
        .iter()
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .with_context(|| format!("{}: bad number '{f}'", path.display()))
        })
        .collect()
}

fn exponent(s: &str, path: &Path) -> anyhow::Result<Exponent> {
    s.trim()
        .parse()
        .map_err(|e| anyhow::anyhow!("{}: bad exponent '{s}': {e}", path.display()))
}

/// Header `n,m,p`, one line of values, then `2^n` rows of `m` values in
/// index order.
pub fn martingale_csv(m: &WalshPaleyMartingale) -> String {
    use rumdlab_core::MartingaleView;
    let t = m.terminal();
    let mut out = format!("n,m,p\n{},{},{}\n", t.depth(), t.dim(), m.space().p());
    for r in 0..t.rows() {
        let row: Vec<String> = t.row(r).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_martingale(path: &Path, m: &WalshPaleyMartingale) -> anyhow::Result<()> {
    fs::write(path, martingale_csv(m)).with_context(|| format!("cannot write {}", path.display()))
}

pub fn read_martingale(path: &Path) -> anyhow::Result<WalshPaleyMartingale> {
    let mut rdr = reader(path)?;
    let mut records = rdr.records();
    let head = records
        .next()
        .with_context(|| format!("{}: missing n,m,p line", path.display()))??;
    ensure!(head.len() == 3, "{}: expected n,m,p", path.display());
    let n: usize = head[0]
        .trim()
        .parse()
        .with_context(|| format!("{}: bad n", path.display()))?;
    let m: usize = head[1]
        .trim()
        .parse()
        .with_context(|| format!("{}: bad m", path.display()))?;
    let p = exponent(&head[2], path)?;
    let mut data = Vec::with_capacity(m << n.min(24));
    for rec in records {
        let row = floats(&rec?, path)?;
        ensure!(
            row.len() == m,
            "{}: row of length {} but m = {m}",
            path.display(),
            row.len()
        );
        data.extend(row);
    }
    let table = Table::new(n, m, data).with_context(|| format!("{}", path.display()))?;
    Ok(WalshPaleyMartingale::new(NormedSpace::new(p, m)?, table)?)
}

/// Header `rows,cols,p_domain,p_codomain`, one line of values, then the
/// matrix row by row.
pub fn operator_csv(t: &DenseOperator) -> String {
    let mut out = format!(
        "rows,cols,p_domain,p_codomain\n{},{},{},{}\n",
        t.rows(),
        t.cols(),
        t.domain().p(),
        t.codomain().p()
    );
    let a = t.matrix();
    for r in 0..t.rows() {
        let row: Vec<String> = a[r * t.cols()..(r + 1) * t.cols()]
            .iter()
            .map(|x| x.to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_operator(path: &Path) -> anyhow::Result<DenseOperator> {
    let mut rdr = reader(path)?;
    let mut records = rdr.records();
    let head = records
        .next()
        .with_context(|| format!("{}: missing header values", path.display()))??;
    ensure!(
        head.len() == 4,
        "{}: expected rows,cols,p_domain,p_codomain",
        path.display()
    );
    let rows: usize = head[0]
        .trim()
        .parse()
        .with_context(|| format!("{}: bad rows", path.display()))?;
    let cols: usize = head[1]
        .trim()
        .parse()
        .with_context(|| format!("{}: bad cols", path.display()))?;
    let pd = exponent(&head[2], path)?;
    let pc = exponent(&head[3], path)?;
    let mut data = Vec::with_capacity(rows * cols);
    for rec in records {
        let row = floats(&rec?, path)?;
        ensure!(
            row.len() == cols,
            "{}: row of length {} but cols = {cols}",
            path.display(),
            row.len()
        );
        data.extend(row);
    }
    if data.len() != rows * cols {
        bail!(
            "{}: expected {rows} rows, found {}",
            path.display(),
            data.len() / cols.max(1)
        );
    }
    Ok(DenseOperator::new(
        NormedSpace::new(pd, cols)?,
        NormedSpace::new(pc, rows)?,
        data,
    )?)
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .context("cannot write to stdout")?;
            out.flush().context("cannot write to stdout")
        }
    }
}
