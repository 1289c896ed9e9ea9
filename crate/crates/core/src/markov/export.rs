//! MatrixMarket coordinate export of transition matrices.
//!
//! ```text
//! %%MatrixMarket matrix coordinate real general
//! % n 1
//! % c 0.5
//! % space reduced
//! % topology open
//! % identity kept
//! % order local-then-cz
//! 3 3 5
//! 1 1 1.0
//! ...
//! ```
//!
//! Indices are 1-based; values are written in shortest round-trip form, so a
//! file reads back to the identical matrix.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::chain::{CscMatrix, TransitionMatrix};
use super::rotation::Space;
use crate::circuit::LayerOrder;
use crate::{Error, Result};

const BANNER: &str = "%%MatrixMarket matrix coordinate real general";

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixHeader {
    pub n: usize,
    pub c: f64,
    pub space: Space,
    pub topology: String,
    pub identity_removed: bool,
    pub order: LayerOrder,
}

impl MatrixHeader {
    pub fn of(m: &TransitionMatrix) -> Self {
        MatrixHeader {
            n: m.n(),
            c: m.c(),
            space: m.space(),
            topology: m.topology().kind().to_string(),
            identity_removed: m.identity_removed(),
            order: m.order(),
        }
    }
}

fn order_name(o: LayerOrder) -> &'static str {
    match o {
        LayerOrder::LocalThenCz => "local-then-cz",
        LayerOrder::CzThenLocal => "cz-then-local",
    }
}

/// Writes through a temporary file in the same directory and renames it, so
/// a failed write leaves nothing at `path`.
pub fn write_matrix_market(m: &TransitionMatrix, path: impl AsRef<Path>) -> Result<CscMatrix> {
    let path = path.as_ref();
    let csc = m.to_csc()?;
    let header = MatrixHeader::of(m);
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a file path")))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));

    let result = (|| -> std::io::Result<()> {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        writeln!(w, "{BANNER}")?;
        writeln!(w, "% n {}", header.n)?;
        writeln!(w, "% c {:?}", header.c)?;
        writeln!(w, "% space {}", header.space)?;
        writeln!(w, "% topology {}", header.topology)?;
        writeln!(w, "% identity {}", if header.identity_removed { "removed" } else { "kept" })?;
        writeln!(w, "% order {}", order_name(header.order))?;
        writeln!(w, "{} {} {}", csc.rows, csc.cols, csc.nnz())?;
        for (r, c, v) in csc.triplets() {
            writeln!(w, "{} {} {:?}", r + 1, c + 1, v)?;
        }
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(csc)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<(MatrixHeader, CscMatrix)> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

    let mut n = None;
    let mut c = None;
    let mut space = None;
    let mut topology = None;
    let mut identity_removed = None;
    let mut order = LayerOrder::default();
    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();

    for (i, line) in BufReader::new(file).lines().enumerate() {
        let ln = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if ln == 1 {
            if line.trim() != BANNER {
                return Err(err(1, "not a MatrixMarket coordinate file"));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix('%') {
            let mut words = rest.split_whitespace();
            match (words.next(), words.next()) {
                (Some("n"), Some(v)) => n = Some(v.parse().map_err(|_| err(ln, "bad n"))?),
                (Some("c"), Some(v)) => c = Some(v.parse().map_err(|_| err(ln, "bad c"))?),
                (Some("space"), Some(v)) => space = Some(v.parse().map_err(|_| err(ln, "bad space"))?),
                (Some("topology"), Some(v)) => topology = Some(v.to_string()),
                (Some("identity"), Some(v)) => identity_removed = Some(v == "removed"),
                (Some("order"), Some("cz-then-local")) => order = LayerOrder::CzThenLocal,
                _ => {}
            }
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        if words.len() != 3 {
            return Err(err(ln, "expected three fields"));
        }
        if size.is_none() {
            let p = |w: &str| w.parse::<usize>().map_err(|_| err(ln, "bad size line"));
            size = Some((p(words[0])?, p(words[1])?, p(words[2])?));
            continue;
        }
        let r: usize = words[0].parse().map_err(|_| err(ln, "bad row"))?;
        let col: usize = words[1].parse().map_err(|_| err(ln, "bad column"))?;
        let v: f64 = words[2].parse().map_err(|_| err(ln, "bad value"))?;
        if r == 0 || col == 0 {
            return Err(err(ln, "indices are 1-based"));
        }
        triplets.push((r - 1, col - 1, v));
    }
    let (rows, cols, nnz) = size.ok_or_else(|| err(0, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(err(0, "entry count does not match the size line"));
    }
    let header = MatrixHeader {
        n: n.ok_or_else(|| err(0, "missing n"))?,
        c: c.ok_or_else(|| err(0, "missing c"))?,
        space: space.ok_or_else(|| err(0, "missing space"))?,
        topology: topology.ok_or_else(|| err(0, "missing topology"))?,
        identity_removed: identity_removed.unwrap_or(false),
        order,
    };
    Ok((header, CscMatrix::from_triplets(rows, cols, triplets)?))
}
