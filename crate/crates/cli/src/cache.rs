//! Text, CSV and JSON serialization of count tables.
//!
//! The text format is
//!
//! ```text
//! # target=p2
//! # genus=0
//! # dmax=3
//! # version=1
//! 1\t1/2
//! 2\t1/120
//! 3\t1/3360
//! ```
//!
//! where `\t` is a tab, with rows `d\tp\tnum/den` for P³. The CSV variant appends the
//! integer count N = n·k! as a third (P²) or fourth (P³) column. All three
//! formats parse back to the same table.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use gwasym::numerics::{ExactRational, Factorials};
use gwasym::recursions::{CountTable, Target};
use rug::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CACHE_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "GWASYM_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".gwasym";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing header field `{0}`")]
    MissingHeader(&'static str),
    #[error("unsupported cache version {0}")]
    Version(u32),
    #[error("invalid table: {0}")]
    Table(String),
    #[error("malformed JSON cache: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Header plus exact rows.
    Cache,
    /// Exact rows with an extra integer count column.
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Cache => "txt",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `$GWASYM_CACHE_DIR` or `./.gwasym`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
}

pub fn default_path(target: Target, genus: u32, d_max: usize, format: Format) -> PathBuf {
    cache_dir().join(format!("{}-g{genus}-d{d_max}.{}", target.as_str(), format.extension()))
}

fn rational(q: &ExactRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rational(s: &str) -> Option<ExactRational> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: Integer = num.trim().parse().ok()?;
    let den: Integer = den.trim().parse().ok()?;
    if den == 0 {
        return None;
    }
    Some(ExactRational::from((num, den)))
}

fn counts(table: &CountTable) -> (Factorials, impl Fn(&Factorials, usize, usize) -> String + '_) {
    let f = Factorials::up_to(table.max_factorial_index());
    let render = move |f: &Factorials, d: usize, p: usize| {
        let value = match table.target() {
            Target::P2 => table.n(d),
            Target::P3 => table.n_p(d, p),
        }
        .expect("listed entry");
        let scaled = ExactRational::from(value * f.get(table.factorial_index(d, p)));
        if *scaled.denom() == 1 {
            scaled.numer().to_string()
        } else {
            rational(&scaled)
        }
    };
    (f, render)
}

pub fn serialize(table: &CountTable, format: Format) -> String {
    match format {
        Format::Cache | Format::Csv => text(table, format == Format::Csv),
        Format::Json => {
            let doc = json_doc(table);
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn text(table: &CountTable, with_counts: bool) -> String {
    let mut out = String::new();
    writeln!(out, "# target={}", table.target()).unwrap();
    writeln!(out, "# genus={}", table.genus()).unwrap();
    writeln!(out, "# dmax={}", table.d_max()).unwrap();
    writeln!(out, "# version={CACHE_VERSION}").unwrap();
    let p3 = table.target() == Target::P3;
    if with_counts {
        writeln!(out, "# columns={}", if p3 { "d,p,n,N" } else { "d,n,N" }).unwrap();
    }
    let (f, render) = counts(table);
    for (d, p, v) in table.entries() {
        if p3 {
            write!(out, "{d}\t{p}\t{}", rational(v)).unwrap();
        } else {
            write!(out, "{d}\t{}", rational(v)).unwrap();
        }
        if with_counts {
            write!(out, "\t{}", render(&f, d, p)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    p: Option<usize>,
    n: String,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none", default)]
    count: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonCache {
    target: String,
    genus: u32,
    dmax: usize,
    version: u32,
    rows: Vec<JsonRow>,
}

fn json_doc(table: &CountTable) -> JsonCache {
    let p3 = table.target() == Target::P3;
    let (f, render) = counts(table);
    let rows = table
        .entries()
        .map(|(d, p, v)| JsonRow { d, p: p3.then_some(p), n: rational(v), count: Some(render(&f, d, p)) })
        .collect();
    JsonCache {
        target: table.target().to_string(),
        genus: table.genus(),
        dmax: table.d_max(),
        version: CACHE_VERSION,
        rows,
    }
}

struct Header {
    target: Target,
    genus: u32,
    d_max: usize,
}

fn check_header(
    target: Option<Target>,
    genus: Option<u32>,
    d_max: Option<usize>,
    version: Option<u32>,
) -> Result<Header, CacheError> {
    let version = version.ok_or(CacheError::MissingHeader("version"))?;
    if version != CACHE_VERSION {
        return Err(CacheError::Version(version));
    }
    Ok(Header {
        target: target.ok_or(CacheError::MissingHeader("target"))?,
        genus: genus.ok_or(CacheError::MissingHeader("genus"))?,
        d_max: d_max.ok_or(CacheError::MissingHeader("dmax"))?,
    })
}

/// Parses any of the three formats.
pub fn parse(input: &str) -> Result<CountTable, CacheError> {
    if input.trim_start().starts_with('{') {
        return parse_json(input);
    }
    let (mut target, mut genus, mut d_max, mut version) = (None, None, None, None);
    let mut rows: Vec<(usize, usize, usize, ExactRational)> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| CacheError::Parse { line, message };
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        if let Some(h) = raw.strip_prefix('#') {
            if let Some((k, v)) = h.trim().split_once('=') {
                let v = v.trim();
                match k.trim() {
                    "target" => target = Some(Target::parse(v).ok_or_else(|| err(format!("unknown target `{v}`")))?),
                    "genus" => genus = Some(v.parse().map_err(|_| err(format!("bad genus `{v}`")))?),
                    "dmax" => d_max = Some(v.parse().map_err(|_| err(format!("bad dmax `{v}`")))?),
                    "version" => version = Some(v.parse().map_err(|_| err(format!("bad version `{v}`")))?),
                    _ => {}
                }
            }
            continue;
        }
        let t = target.ok_or(CacheError::MissingHeader("target"))?;
        let fields: Vec<&str> = raw.split('\t').collect();
        let (d, p, n) = match (t, fields.as_slice()) {
            (Target::P2, [d, n] | [d, n, _]) => (*d, "0", *n),
            (Target::P3, [d, p, n] | [d, p, n, _]) => (*d, *p, *n),
            _ => return Err(err(format!("expected tab-separated {} row", t))),
        };
        let d = d.trim().parse().map_err(|_| err(format!("bad degree `{d}`")))?;
        let p = p.trim().parse().map_err(|_| err(format!("bad point count `{p}`")))?;
        let n = parse_rational(n).ok_or_else(|| err(format!("bad rational `{n}`")))?;
        rows.push((line, d, p, n));
    }
    let header = check_header(target, genus, d_max, version)?;
    assemble(&header, rows)
}

fn parse_json(input: &str) -> Result<CountTable, CacheError> {
    let doc: JsonCache = serde_json::from_str(input)?;
    let target =
        Target::parse(&doc.target).ok_or_else(|| CacheError::Table(format!("unknown target `{}`", doc.target)))?;
    let header = check_header(Some(target), Some(doc.genus), Some(doc.dmax), Some(doc.version))?;
    let rows = doc
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let n = parse_rational(&r.n)
                .ok_or_else(|| CacheError::Parse { line: i + 1, message: format!("bad rational `{}`", r.n) })?;
            Ok((i + 1, r.d, r.p.unwrap_or(0), n))
        })
        .collect::<Result<Vec<_>, CacheError>>()?;
    assemble(&header, rows)
}

/// Checks row order and coverage, then builds the table.
fn assemble(header: &Header, rows: Vec<(usize, usize, usize, ExactRational)>) -> Result<CountTable, CacheError> {
    let mut expected = (1usize, 0usize);
    let mut p2 = Vec::new();
    let mut p3: Vec<Vec<ExactRational>> = Vec::new();
    for (line, d, p, n) in rows {
        if (d, p) != expected {
            return Err(CacheError::Parse {
                line,
                message: format!("expected entry d={} p={}, found d={d} p={p}", expected.0, expected.1),
            });
        }
        match header.target {
            Target::P2 => {
                p2.push(n);
                expected = (d + 1, 0);
            }
            Target::P3 => {
                if p == 0 {
                    p3.push(Vec::with_capacity(2 * d + 1));
                }
                p3.last_mut().expect("row started").push(n);
                expected = if p == 2 * d { (d + 1, 0) } else { (d, p + 1) };
            }
        }
    }
    if expected != (header.d_max + 1, 0) {
        return Err(CacheError::Table(format!(
            "header says dmax={} but rows stop before d={} p={}",
            header.d_max, expected.0, expected.1
        )));
    }
    let table = match header.target {
        Target::P2 => CountTable::from_p2_values(header.genus, p2),
        Target::P3 if header.genus == 0 => CountTable::from_p3_rows(p3),
        Target::P3 => return Err(CacheError::Table("P3 tables exist for genus 0 only".into())),
    };
    table.map_err(|e| CacheError::Table(e.to_string()))
}

pub fn read(path: &Path) -> Result<CountTable, CacheError> {
    let text = fs::read_to_string(path).map_err(|source| CacheError::Io { path: path.to_path_buf(), source })?;
    parse(&text)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CacheError> {
    let io = |source| CacheError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644)).map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
