//! Plain-text file formats used by the CLI.
//!
//! All writers emit 17 significant digits (`{:.16e}`), which round-trips f64
//! exactly. Headers start with `#`; parsers accept and ignore unknown
//! `key=value` pairs in headers so writers may add annotations (achieved
//! residuals, provenance) without breaking readers.
//!
//! Formats:
//!
//! - point set: `# points N=<N> [t=<t>] [...]` then one `<theta> <phi>` per line;
//! - coefficients: `# shc t=<t>` then one `<l> <m> <re> <im>` per line in index order;
//! - field: `# field N=<N>` then one real value per line;
//! - grid: `# grid m=<m> n=<n>` then `m·n` row-major values, whitespace separated;
//! - pyramid: a manifest line, a chain line, then one section per coefficient
//!   vector (`# coarse ...`, `# band j=<j> s=<s> ...`) with `<re> <im>` lines.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::framelet::FrameletPyramid;
use crate::index::coeff_len;
use crate::sht::{HarmonicCoeffs, PointSet};

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Split a header line like `# points N=12 t=5 extra=1` into (tag, key-values).
fn parse_header(line: &str) -> Option<(String, Vec<(String, String)>)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut parts = rest.split_whitespace();
    let tag = parts.next()?.to_string();
    let mut kv = Vec::new();
    for p in parts {
        if let Some((k, v)) = p.split_once('=') {
            kv.push((k.to_string(), v.to_string()));
        }
    }
    Some((tag, kv))
}

fn lookup(kv: &[(String, String)], key: &str) -> Option<String> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

/// Metadata carried in a point-set header.
#[derive(Debug, Clone, Default)]
pub struct PointSetMeta {
    pub degree: Option<usize>,
    pub sqrt_a: Option<f64>,
    pub grad_inf: Option<f64>,
}

pub fn write_points(
    path: &Path,
    points: &PointSet,
    degree: Option<usize>,
    annotations: &[(&str, f64)],
) -> Result<()> {
    let mut s = String::new();
    write!(s, "# points N={}", points.len()).unwrap();
    if let Some(t) = degree {
        write!(s, " t={t}").unwrap();
    }
    for (k, v) in annotations {
        write!(s, " {k}={v:.16e}").unwrap();
    }
    s.push('\n');
    for i in 0..points.len() {
        writeln!(s, "{:.16e} {:.16e}", points.theta()[i], points.phi()[i]).unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_points(path: &Path) -> Result<(PointSet, PointSetMeta)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "empty file"))?;
    let (tag, kv) =
        parse_header(header).ok_or_else(|| parse_err(path, ln + 1, "missing header"))?;
    if tag != "points" {
        return Err(parse_err(
            path,
            ln + 1,
            format!("expected points header, got {tag}"),
        ));
    }
    let n: usize = lookup(&kv, "N")
        .ok_or_else(|| parse_err(path, ln + 1, "missing N"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad N"))?;
    let meta = PointSetMeta {
        degree: lookup(&kv, "t").and_then(|v| v.parse().ok()),
        sqrt_a: lookup(&kv, "sqrtA").and_then(|v| v.parse().ok()),
        grad_inf: lookup(&kv, "gradinf").and_then(|v| v.parse().ok()),
    };
    let mut theta = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let th: f64 = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| parse_err(path, ln + 1, "bad theta"))?;
        let ph: f64 = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| parse_err(path, ln + 1, "bad phi"))?;
        theta.push(th);
        phi.push(ph);
    }
    if theta.len() != n {
        return Err(parse_err(
            path,
            0,
            format!("header says N={n}, found {} points", theta.len()),
        ));
    }
    let points = PointSet::from_angles(theta, phi)
        .map_err(|e| parse_err(path, 0, format!("invalid points: {e}")))?;
    Ok((points, meta))
}

pub fn write_coeffs(path: &Path, coeffs: &HarmonicCoeffs) -> Result<()> {
    let t = coeffs.degree();
    let mut s = format!("# shc t={t}\n");
    for l in 0..=t {
        for m in -(l as i64)..=(l as i64) {
            let c = coeffs.get(l, m);
            writeln!(s, "{l} {m} {:.16e} {:.16e}", c.re, c.im).unwrap();
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_coeffs(path: &Path) -> Result<HarmonicCoeffs> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "empty file"))?;
    let (tag, kv) =
        parse_header(header).ok_or_else(|| parse_err(path, ln + 1, "missing header"))?;
    if tag != "shc" {
        return Err(parse_err(
            path,
            ln + 1,
            format!("expected shc header, got {tag}"),
        ));
    }
    let t: usize = lookup(&kv, "t")
        .ok_or_else(|| parse_err(path, ln + 1, "missing t"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad t"))?;
    let mut coeffs = HarmonicCoeffs::zeros(t);
    let mut count = 0usize;
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(path, ln + 1, "expected `l m re im`"));
        }
        let l: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, ln + 1, "bad l"))?;
        let m: i64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, ln + 1, "bad m"))?;
        let re: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(path, ln + 1, "bad re"))?;
        let im: f64 = fields[3]
            .parse()
            .map_err(|_| parse_err(path, ln + 1, "bad im"))?;
        if l > t || m.unsigned_abs() as usize > l {
            return Err(parse_err(
                path,
                ln + 1,
                format!("index ({l},{m}) out of range"),
            ));
        }
        coeffs.set(l, m, Complex64::new(re, im));
        count += 1;
    }
    if count != coeff_len(t) {
        return Err(parse_err(
            path,
            0,
            format!("expected {} coefficient lines, found {count}", coeff_len(t)),
        ));
    }
    Ok(coeffs)
}

pub fn write_field(path: &Path, values: &[f64]) -> Result<()> {
    let mut s = format!("# field N={}\n", values.len());
    for v in values {
        writeln!(s, "{v:.16e}").unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "empty file"))?;
    let (tag, kv) =
        parse_header(header).ok_or_else(|| parse_err(path, ln + 1, "missing header"))?;
    if tag != "field" {
        return Err(parse_err(
            path,
            ln + 1,
            format!("expected field header, got {tag}"),
        ));
    }
    let n: usize = lookup(&kv, "N")
        .ok_or_else(|| parse_err(path, ln + 1, "missing N"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad N"))?;
    let mut values = Vec::with_capacity(n);
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        values.push(
            line.parse::<f64>()
                .map_err(|_| parse_err(path, ln + 1, "bad value"))?,
        );
    }
    if values.len() != n {
        return Err(parse_err(
            path,
            0,
            format!("header says N={n}, found {}", values.len()),
        ));
    }
    Ok(values)
}

/// Row-major grid of real values over the equiangular lattice
/// `θ_i = (i-1)π/m`, `φ_j = (j-1)2π/n`.
#[derive(Debug, Clone)]
pub struct GridData {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl GridData {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "grid {rows}x{cols} with {} values",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid values".into()));
        }
        Ok(Self { rows, cols, values })
    }

    /// 1-based access matching the index formulas.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols);
        self.values[(i - 1) * self.cols + (j - 1)]
    }
}

pub fn write_grid(path: &Path, grid: &GridData) -> Result<()> {
    let mut s = format!("# grid m={} n={}\n", grid.rows, grid.cols);
    for row in grid.values.chunks(grid.cols) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(s, "{}", line.join(" ")).unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<GridData> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "empty file"))?;
    let (tag, kv) =
        parse_header(header).ok_or_else(|| parse_err(path, ln + 1, "missing header"))?;
    if tag != "grid" {
        return Err(parse_err(
            path,
            ln + 1,
            format!("expected grid header, got {tag}"),
        ));
    }
    let m: usize = lookup(&kv, "m")
        .ok_or_else(|| parse_err(path, ln + 1, "missing m"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad m"))?;
    let n: usize = lookup(&kv, "n")
        .ok_or_else(|| parse_err(path, ln + 1, "missing n"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad n"))?;
    let mut values = Vec::with_capacity(m * n);
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            values.push(
                tok.parse::<f64>()
                    .map_err(|_| parse_err(path, ln + 1, "bad value"))?,
            );
        }
    }
    GridData::new(m, n, values)
}

pub fn write_pyramid(path: &Path, pyramid: &FrameletPyramid) -> Result<()> {
    let mut s = String::new();
    writeln!(
        s,
        "# pyramid J0={} J={} n={}",
        pyramid.coarsest_level(),
        pyramid.finest_level(),
        pyramid.band_count()
    )
    .unwrap();
    let chain: Vec<String> = pyramid
        .chain_shape()
        .iter()
        .map(|(t, n)| format!("{t}:{n}"))
        .collect();
    writeln!(s, "# chain {}", chain.join(" ")).unwrap();
    writeln!(s, "# coarse N={}", pyramid.coarse().len()).unwrap();
    for c in pyramid.coarse() {
        writeln!(s, "{:.16e} {:.16e}", c.re, c.im).unwrap();
    }
    for j in pyramid.coarsest_level()..=pyramid.finest_level() {
        for band in 1..=pyramid.band_count() {
            let w = pyramid.band(j, band);
            writeln!(s, "# band j={j} s={band} N={}", w.len()).unwrap();
            for c in w {
                writeln!(s, "{:.16e} {:.16e}", c.re, c.im).unwrap();
            }
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_pyramid(path: &Path) -> Result<FrameletPyramid> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().peekable();

    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "empty file"))?;
    let (tag, kv) =
        parse_header(header).ok_or_else(|| parse_err(path, ln + 1, "missing header"))?;
    if tag != "pyramid" {
        return Err(parse_err(
            path,
            ln + 1,
            format!("expected pyramid header, got {tag}"),
        ));
    }
    let j0: usize = lookup(&kv, "J0")
        .ok_or_else(|| parse_err(path, ln + 1, "missing J0"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad J0"))?;
    let j1: usize = lookup(&kv, "J")
        .ok_or_else(|| parse_err(path, ln + 1, "missing J"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad J"))?;
    let nbands: usize = lookup(&kv, "n")
        .ok_or_else(|| parse_err(path, ln + 1, "missing n"))?
        .parse()
        .map_err(|_| parse_err(path, ln + 1, "bad n"))?;

    let (ln, chain_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 0, "missing chain line"))?;
    let chain_str = chain_line
        .strip_prefix("# chain")
        .ok_or_else(|| parse_err(path, ln + 1, "missing chain line"))?;
    let mut chain_shape = Vec::new();
    for tok in chain_str.split_whitespace() {
        let (ts, ns) = tok
            .split_once(':')
            .ok_or_else(|| parse_err(path, ln + 1, "bad chain entry"))?;
        let t: usize = ts
            .parse()
            .map_err(|_| parse_err(path, ln + 1, "bad chain degree"))?;
        let n: usize = ns
            .parse()
            .map_err(|_| parse_err(path, ln + 1, "bad chain size"))?;
        chain_shape.push((t, n));
    }

    let mut read_section = |expect: &str| -> Result<Vec<Complex64>> {
        let (ln, header) = lines
            .next()
            .ok_or_else(|| parse_err(path, 0, format!("missing section {expect}")))?;
        let (tag, kv) = parse_header(header)
            .ok_or_else(|| parse_err(path, ln + 1, format!("missing section {expect}")))?;
        if tag != expect.split_whitespace().next().unwrap() {
            return Err(parse_err(
                path,
                ln + 1,
                format!("expected section {expect}, got {tag}"),
            ));
        }
        let n: usize = lookup(&kv, "N")
            .ok_or_else(|| parse_err(path, ln + 1, "missing N"))?
            .parse()
            .map_err(|_| parse_err(path, ln + 1, "bad N"))?;
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| parse_err(path, 0, "truncated section"))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let re: f64 = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse_err(path, ln + 1, "bad re"))?;
            let im: f64 = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse_err(path, ln + 1, "bad im"))?;
            out.push(Complex64::new(re, im));
        }
        Ok(out)
    };

    let coarse = read_section("coarse")?;
    let mut bands = Vec::new();
    for _j in j0..=j1 {
        let mut level = Vec::new();
        for _s in 1..=nbands {
            level.push(read_section("band")?);
        }
        bands.push(level);
    }
    FrameletPyramid::from_parts(j0, chain_shape, coarse, bands)
}

/// Key-value report file (`key value` per line), used by the denoise command.
pub fn write_report(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut s = String::new();
    for (k, v) in entries {
        writeln!(s, "{k} {v}").unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}
