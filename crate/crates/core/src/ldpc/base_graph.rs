//! Base graphs and lifting sizes.
//!
//! Base-graph file format (one header line, then one line per nonzero entry):
//!
//! ```text
//! BG1,46,68,316
//! row,col,shift_set0,shift_set1,...,shift_set7
//! ```
//!
//! Lifting-size file format: one line per set index, `set_index,Z1,Z2,...`.
//! Lines starting with `#` and blank lines are ignored in both.

use crate::{Error, Result};
use sha2::{Digest, Sha256};

pub const SHIFT_SETS: usize = 8;

const BG1_CSV: &str = include_str!("../../data/bg1.csv");
const BG2_CSV: &str = include_str!("../../data/bg2.csv");
const LIFTING_CSV: &str = include_str!("../../data/lifting_sizes.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseGraphKind {
    Bg1,
    Bg2,
    /// A non-standard graph, used for small test codes.
    Custom,
}

impl BaseGraphKind {
    fn tag(self) -> &'static str {
        match self {
            BaseGraphKind::Bg1 => "BG1",
            BaseGraphKind::Bg2 => "BG2",
            BaseGraphKind::Custom => "CUSTOM",
        }
    }

    /// `(rows, cols, systematic columns, nonzero entries)` of the standard graphs.
    fn expected_shape(self) -> Option<(usize, usize, usize, usize)> {
        match self {
            BaseGraphKind::Bg1 => Some((46, 68, 22, 316)),
            BaseGraphKind::Bg2 => Some((42, 52, 10, 197)),
            BaseGraphKind::Custom => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseEntry {
    pub row: usize,
    pub col: usize,
    pub shifts: [u32; SHIFT_SETS],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    kind: BaseGraphKind,
    rows: usize,
    cols: usize,
    systematic_cols: usize,
    entries: Vec<BaseEntry>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split(',')
        .map(|f| {
            f.trim()
                .parse::<usize>()
                .map_err(|_| Error::Load(format!("line {lineno}: bad integer {f:?}")))
        })
        .collect()
}

impl BaseGraph {
    /// One of the two standard graphs, from the data files shipped with the crate.
    pub fn standard(kind: BaseGraphKind) -> Result<Self> {
        match kind {
            BaseGraphKind::Bg1 => Self::parse(BG1_CSV),
            BaseGraphKind::Bg2 => Self::parse(BG2_CSV),
            BaseGraphKind::Custom => {
                Err(Error::Config("no standard data for a custom graph".into()))
            }
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = data_lines(text);
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Load("empty base-graph file".into()))?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Load(format!(
                "header must be kind,rows,cols,nnz: {header:?}"
            )));
        }
        let kind = match fields[0] {
            "BG1" => BaseGraphKind::Bg1,
            "BG2" => BaseGraphKind::Bg2,
            other => return Err(Error::Load(format!("unknown base graph {other:?}"))),
        };
        let dims = parse_fields(&fields[1..].join(","), 1)?;
        let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
        let (want_rows, want_cols, sys, want_nnz) = kind.expected_shape().expect("standard kind");
        if (rows, cols, nnz) != (want_rows, want_cols, want_nnz) {
            return Err(Error::Load(format!(
                "{} must be {want_rows}x{want_cols} with {want_nnz} entries, header says {rows}x{cols} with {nnz}",
                kind.tag()
            )));
        }
        let mut entries = Vec::with_capacity(nnz);
        for (lineno, line) in lines {
            let v = parse_fields(line, lineno)?;
            if v.len() != 2 + SHIFT_SETS {
                return Err(Error::Load(format!(
                    "line {lineno}: expected {} fields, found {}",
                    2 + SHIFT_SETS,
                    v.len()
                )));
            }
            let mut shifts = [0u32; SHIFT_SETS];
            for (s, &x) in shifts.iter_mut().zip(&v[2..]) {
                *s = x as u32;
            }
            entries.push(BaseEntry {
                row: v[0],
                col: v[1],
                shifts,
            });
        }
        if entries.len() != nnz {
            return Err(Error::Load(format!(
                "header announces {nnz} entries but {} were read",
                entries.len()
            )));
        }
        Self::build(kind, rows, cols, sys, entries).map_err(|e| match e {
            Error::Config(msg) => Error::Load(msg),
            other => other,
        })
    }

    /// A graph from explicit entries; `systematic_cols` leading columns carry
    /// information bits.
    pub fn custom(
        rows: usize,
        cols: usize,
        systematic_cols: usize,
        entries: Vec<BaseEntry>,
    ) -> Result<Self> {
        Self::build(BaseGraphKind::Custom, rows, cols, systematic_cols, entries)
    }

    fn build(
        kind: BaseGraphKind,
        rows: usize,
        cols: usize,
        systematic_cols: usize,
        mut entries: Vec<BaseEntry>,
    ) -> Result<Self> {
        if systematic_cols >= cols || cols - systematic_cols < rows {
            return Err(Error::Config(format!(
                "{rows}x{cols} graph with {systematic_cols} systematic columns has too few parity columns"
            )));
        }
        entries.sort_by_key(|e| (e.row, e.col));
        for pair in entries.windows(2) {
            if (pair[0].row, pair[0].col) == (pair[1].row, pair[1].col) {
                return Err(Error::Config(format!(
                    "duplicate entry at ({}, {})",
                    pair[0].row, pair[0].col
                )));
            }
        }
        if let Some(e) = entries.iter().find(|e| e.row >= rows || e.col >= cols) {
            return Err(Error::Config(format!(
                "entry ({}, {}) outside the graph",
                e.row, e.col
            )));
        }
        Ok(Self {
            kind,
            rows,
            cols,
            systematic_cols,
            entries,
        })
    }

    pub fn kind(&self) -> BaseGraphKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn systematic_cols(&self) -> usize {
        self.systematic_cols
    }

    pub fn entries(&self) -> &[BaseEntry] {
        &self.entries
    }

    pub fn row_weight(&self, row: usize) -> usize {
        self.entries.iter().filter(|e| e.row == row).count()
    }
}

/// Lifting-size table indexed by shift-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingSizes {
    sets: Vec<Vec<usize>>,
}

impl LiftingSizes {
    pub fn standard() -> Self {
        Self::parse(LIFTING_CSV).expect("shipped lifting-size table is well formed")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sets = vec![Vec::new(); SHIFT_SETS];
        for (lineno, line) in data_lines(text) {
            let v = parse_fields(line, lineno)?;
            let (&index, sizes) = v
                .split_first()
                .ok_or_else(|| Error::Load(format!("line {lineno}: empty")))?;
            if index >= SHIFT_SETS {
                return Err(Error::Load(format!(
                    "line {lineno}: unknown lifting set {index}"
                )));
            }
            sets[index] = sizes.to_vec();
        }
        if sets.iter().any(Vec::is_empty) {
            return Err(Error::Load("lifting-size table misses a set".into()));
        }
        Ok(Self { sets })
    }

    /// Shift-set index that contains `z`.
    pub fn set_index(&self, z: usize) -> Option<usize> {
        self.sets.iter().position(|s| s.contains(&z))
    }

    pub fn all(&self) -> impl Iterator<Item = usize> + '_ {
        self.sets.iter().flatten().copied()
    }
}

/// SHA-256 digests of the shipped data files, as `(name, hex digest)`.
pub fn data_checksums() -> Vec<(&'static str, String)> {
    [
        ("bg1.csv", BG1_CSV),
        ("bg2.csv", BG2_CSV),
        ("lifting_sizes.csv", LIFTING_CSV),
    ]
    .into_iter()
    .map(|(name, text)| {
        let digest = Sha256::digest(text.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        (name, hex)
    })
    .collect()
}
