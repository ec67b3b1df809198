//! Lifted quasi-cyclic codes and systematic encoding.
//!
//! Block `(r, c)` with shift `s` connects check `r·Z + i` to variable
//! `c·Z + (i + s) mod Z`. Encoding exploits the usual 5G NR layout: a small
//! core of `g` rows touches only the systematic columns and the first `g`
//! parity columns, and every later row adds exactly one new parity column.
//! The lifted core parity block is inverted once over GF(2) when the code is
//! built; the remaining parity columns follow by forward substitution.

use super::base_graph::{BaseGraph, BaseGraphKind, LiftingSizes};
use crate::{Bit, Error, Result};
use std::sync::Arc;

/// A circulant block of the lifted matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub row: usize,
    pub col: usize,
    pub shift: usize,
}

#[derive(Debug, Clone)]
pub struct LiftedCode {
    kind: BaseGraphKind,
    z: usize,
    base_rows: usize,
    base_cols: usize,
    systematic_cols: usize,
    blocks: Vec<Block>,
    check_ptr: Vec<usize>,
    check_vars: Vec<u32>,
    core_rows: usize,
    core_inverse: Arc<BitMatrix>,
}

impl LiftedCode {
    /// Lifts the whole base graph.
    pub fn lift(bg: &BaseGraph, z: usize) -> Result<Self> {
        Self::lift_rows(bg, z, bg.rows())
    }

    /// Lifts the first `base_rows` rows, keeping the systematic columns and
    /// the first `base_rows` parity columns.
    pub fn lift_rows(bg: &BaseGraph, z: usize, base_rows: usize) -> Result<Self> {
        let set = LiftingSizes::standard().set_index(z).ok_or_else(|| {
            Error::Config(format!("lifting size {z} is not in the standard table"))
        })?;
        if base_rows == 0 || base_rows > bg.rows() {
            return Err(Error::Config(format!(
                "cannot keep {base_rows} of {} base rows",
                bg.rows()
            )));
        }
        let sys = bg.systematic_cols();
        let base_cols = sys + base_rows;
        let mut blocks = Vec::new();
        for e in bg.entries().iter().filter(|e| e.row < base_rows) {
            if e.col >= base_cols {
                return Err(Error::Config(format!(
                    "row {} references column {} beyond the kept {base_cols} columns",
                    e.row, e.col
                )));
            }
            blocks.push(Block {
                row: e.row,
                col: e.col,
                shift: e.shifts[set] as usize % z,
            });
        }
        let core_rows = find_core(&blocks, sys, base_rows)?;

        let checks = base_rows * z;
        let mut check_ptr = Vec::with_capacity(checks + 1);
        let mut check_vars = Vec::new();
        check_ptr.push(0);
        for r in 0..base_rows {
            let row_blocks: Vec<&Block> = blocks.iter().filter(|b| b.row == r).collect();
            for i in 0..z {
                for b in &row_blocks {
                    check_vars.push((b.col * z + (i + b.shift) % z) as u32);
                }
                check_ptr.push(check_vars.len());
            }
        }

        let mut code = Self {
            kind: bg.kind(),
            z,
            base_rows,
            base_cols,
            systematic_cols: sys,
            blocks,
            check_ptr,
            check_vars,
            core_rows,
            core_inverse: Arc::new(BitMatrix::zeros(0)),
        };
        code.core_inverse = Arc::new(code.invert_core()?);
        Ok(code)
    }

    /// Smallest truncation of `bg` lifted by `z` that yields at least
    /// `parity_bits` parity bits.
    pub fn for_parity_bits(bg: &BaseGraph, z: usize, parity_bits: usize) -> Result<Self> {
        let needed = parity_bits.div_ceil(z);
        if needed > bg.cols() - bg.systematic_cols() {
            return Err(Error::Config(format!(
                "{parity_bits} parity bits exceed the mother code"
            )));
        }
        let blocks: Vec<Block> = bg
            .entries()
            .iter()
            .map(|e| Block {
                row: e.row,
                col: e.col,
                shift: 0,
            })
            .collect();
        let core = find_core(&blocks, bg.systematic_cols(), bg.rows())?;
        Self::lift_rows(bg, z, needed.max(core))
    }

    pub fn kind(&self) -> BaseGraphKind {
        self.kind
    }

    pub fn lifting_size(&self) -> usize {
        self.z
    }

    /// Code length (all kept columns, including punctured and unsent ones).
    pub fn len(&self) -> usize {
        self.base_cols * self.z
    }

    pub fn is_empty(&self) -> bool {
        self.base_cols == 0
    }

    /// Systematic bit count `systematic_cols · Z`.
    pub fn k_sys(&self) -> usize {
        self.systematic_cols * self.z
    }

    pub fn parity_len(&self) -> usize {
        self.len() - self.k_sys()
    }

    pub fn checks(&self) -> usize {
        self.base_rows * self.z
    }

    pub fn base_rows(&self) -> usize {
        self.base_rows
    }

    pub fn core_rows(&self) -> usize {
        self.core_rows
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Variable indices of check `c`.
    pub fn check(&self, c: usize) -> &[u32] {
        &self.check_vars[self.check_ptr[c]..self.check_ptr[c + 1]]
    }

    pub fn edges(&self) -> usize {
        self.check_vars.len()
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.len()];
        for &v in &self.check_vars {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Dense parity-check matrix, one `Vec` per check. Meant for small codes.
    pub fn to_dense(&self) -> Vec<Vec<Bit>> {
        (0..self.checks())
            .map(|c| {
                let mut row = vec![0; self.len()];
                for &v in self.check(c) {
                    row[v as usize] ^= 1;
                }
                row
            })
            .collect()
    }

    /// `H · cᵀ = 0`.
    pub fn is_codeword(&self, word: &[Bit]) -> bool {
        word.len() == self.len()
            && (0..self.checks()).all(|c| {
                self.check(c)
                    .iter()
                    .fold(0, |acc, &v| acc ^ word[v as usize])
                    == 0
            })
    }

    /// Systematic encoding: returns `[info | parity]`.
    pub fn encode(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        if info.len() != self.k_sys() {
            return Err(Error::Config(format!(
                "encoder expects {} systematic bits, got {}",
                self.k_sys(),
                info.len()
            )));
        }
        let z = self.z;
        let sys = self.systematic_cols;
        let g = self.core_rows;
        let mut word = vec![0 as Bit; self.len()];
        word[..info.len()].copy_from_slice(info);

        let mut syndrome = vec![0 as Bit; g * z];
        for b in self.blocks.iter().filter(|b| b.row < g && b.col < sys) {
            accumulate(
                &mut syndrome[b.row * z..(b.row + 1) * z],
                &word[b.col * z..(b.col + 1) * z],
                b.shift,
            );
        }
        let core = self.core_inverse.mul_vec(&syndrome);
        word[sys * z..(sys + g) * z].copy_from_slice(&core);

        for r in g..self.base_rows {
            let target = sys + r;
            let mut acc = vec![0 as Bit; z];
            let mut diag = None;
            for b in self.blocks.iter().filter(|b| b.row == r) {
                if b.col == target {
                    diag = Some(b.shift);
                } else {
                    accumulate(&mut acc, &word[b.col * z..(b.col + 1) * z], b.shift);
                }
            }
            let shift = diag.expect("extension row has its own parity column");
            let out = &mut word[target * z..(target + 1) * z];
            for (i, &a) in acc.iter().enumerate() {
                out[(i + shift) % z] = a;
            }
        }
        Ok(word)
    }

    fn invert_core(&self) -> Result<BitMatrix> {
        let z = self.z;
        let g = self.core_rows;
        let sys = self.systematic_cols;
        let n = g * z;
        let mut core = BitMatrix::zeros(n);
        for b in self.blocks.iter().filter(|b| b.row < g && b.col >= sys) {
            let pc = b.col - sys;
            for i in 0..z {
                core.flip(b.row * z + i, pc * z + (i + b.shift) % z);
            }
        }
        core.inverse()
            .ok_or_else(|| Error::Config(format!("core parity block is singular for Z = {z}")))
    }
}

/// `acc[i] ^= src[(i + shift) mod Z]`.
fn accumulate(acc: &mut [Bit], src: &[Bit], shift: usize) {
    let z = acc.len();
    let (head, tail) = src.split_at(shift);
    for (a, &s) in acc[..z - shift].iter_mut().zip(tail) {
        *a ^= s;
    }
    for (a, &s) in acc[z - shift..].iter_mut().zip(head) {
        *a ^= s;
    }
}

/// Number of leading rows that must be solved jointly.
fn find_core(blocks: &[Block], sys: usize, rows: usize) -> Result<usize> {
    let max_col = |r: usize| blocks.iter().filter(|b| b.row == r).map(|b| b.col).max();
    'outer: for g in 1..=rows {
        if blocks.iter().any(|b| b.row < g && b.col >= sys + g) {
            continue;
        }
        for r in g..rows {
            if max_col(r) != Some(sys + r) {
                continue 'outer;
            }
        }
        return Ok(g);
    }
    Err(Error::Config(
        "base graph has no encodable parity structure".into(),
    ))
}

/// Square bit matrix, rows packed into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    fn zeros(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            words,
            data: vec![0; n * words],
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&lo[src * w..(src + 1) * w], &mut hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&hi[..w] as &[u64], &mut lo[dst * w..(dst + 1) * w])
        };
        for (d, s) in b.iter_mut().zip(a) {
            *d ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words {
            self.data.swap(a * self.words + k, b * self.words + k);
        }
    }

    /// Gauss-Jordan inverse over GF(2).
    fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::zeros(n);
        for i in 0..n {
            inv.flip(i, i);
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col))?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            for r in 0..n {
                if r != col && a.get(r, col) {
                    a.xor_row_into(col, r);
                    inv.xor_row_into(col, r);
                }
            }
        }
        Some(inv)
    }

    fn mul_vec(&self, v: &[Bit]) -> Vec<Bit> {
        let mut packed = vec![0u64; self.words];
        for (i, &b) in v.iter().enumerate() {
            packed[i / 64] |= u64::from(b & 1) << (i % 64);
        }
        (0..self.n)
            .map(|r| {
                let ones: u32 = self
                    .row(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as Bit
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::base_graph::{BaseEntry, SHIFT_SETS};

    fn entry(row: usize, col: usize, shift: u32) -> BaseEntry {
        BaseEntry {
            row,
            col,
            shifts: [shift; SHIFT_SETS],
        }
    }

    #[test]
    fn accumulate_rotates() {
        let mut acc = vec![0; 4];
        accumulate(&mut acc, &[1, 0, 0, 0], 1);
        assert_eq!(acc, vec![0, 0, 0, 1]);
        let mut acc = vec![0; 4];
        accumulate(&mut acc, &[1, 1, 0, 0], 0);
        assert_eq!(acc, vec![1, 1, 0, 0]);
    }

    #[test]
    fn bit_matrix_inverse() {
        let mut m = BitMatrix::zeros(3);
        for (r, c) in [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)] {
            m.flip(r, c);
        }
        let inv = m.inverse().unwrap();
        for e in 0..3 {
            let mut v = vec![0; 3];
            v[e] = 1;
            let x = inv.mul_vec(&v);
            assert_eq!(m.mul_vec(&x), v);
        }
        let singular = BitMatrix::zeros(2);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn shifts_are_reduced_modulo_z() {
        let bg = BaseGraph::custom(1, 2, 1, vec![entry(0, 0, 385), entry(0, 1, 0)]).unwrap();
        let code = LiftedCode::lift(&bg, 384).unwrap();
        assert_eq!(code.blocks()[0].shift, 1);
    }

    #[test]
    fn unsupported_lifting_size() {
        let bg = BaseGraph::standard(BaseGraphKind::Bg2).unwrap();
        assert!(matches!(LiftedCode::lift(&bg, 17), Err(Error::Config(_))));
    }

    #[test]
    fn core_of_standard_graphs_has_four_rows() {
        for kind in [BaseGraphKind::Bg1, BaseGraphKind::Bg2] {
            let bg = BaseGraph::standard(kind).unwrap();
            let code = LiftedCode::lift(&bg, 8).unwrap();
            assert_eq!(code.core_rows(), 4);
        }
    }

    #[test]
    fn truncation_keeps_leading_columns() {
        let bg = BaseGraph::standard(BaseGraphKind::Bg1).unwrap();
        let code = LiftedCode::for_parity_bits(&bg, 384, 2737).unwrap();
        assert_eq!(code.base_rows(), 8);
        assert_eq!(code.len(), 30 * 384);
        assert_eq!(code.k_sys(), 8448);
        let small = LiftedCode::for_parity_bits(&bg, 384, 10).unwrap();
        assert_eq!(small.base_rows(), 4);
    }

    #[test]
    fn lifting_preserves_row_weights() {
        let bg = BaseGraph::standard(BaseGraphKind::Bg1).unwrap();
        let code = LiftedCode::lift(&bg, 13).unwrap();
        for c in 0..code.checks() {
            assert_eq!(code.check(c).len(), bg.row_weight(c / 13));
        }
        let deg = code.column_degrees();
        for col in 0..bg.cols() {
            let base = bg.entries().iter().filter(|e| e.col == col).count();
            assert!(deg[col * 13..(col + 1) * 13].iter().all(|&d| d == base));
        }
    }
}
