//! Normalized min-sum decoding with a flooding schedule.
//!
//! LLR convention: positive means bit 0 is more likely. Channel values and
//! variable-to-check messages are saturated at [`LLR_CLIP`]. Inputs of
//! infinite magnitude mark known bits (shortened fillers); their hard
//! decisions are pinned to the input sign. A total of exactly zero decides 1.

use super::code::LiftedCode;
use crate::Bit;

pub const LLR_CLIP: f32 = 30.0;
pub const DEFAULT_NORMALIZATION: f32 = 0.75;
pub const DEFAULT_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutput {
    /// Hard decisions on every column of the code, punctured ones included.
    pub bits: Vec<Bit>,
    pub converged: bool,
    pub iterations: usize,
}

/// Decoder scratch space bound to one code; keep one per worker.
///
/// Messages are stored per circulant block, so every check-node update runs
/// over `Z` contiguous lanes.
#[derive(Debug, Clone)]
pub struct MinSumDecoder<'a> {
    code: &'a LiftedCode,
    normalization: f32,
    /// `(first block, end block)` of every base row.
    rows: Vec<(usize, usize)>,
    channel: Vec<f32>,
    pinned: Vec<Option<Bit>>,
    total: Vec<f32>,
    check_to_var: Vec<f32>,
    q: Vec<f32>,
    min1: Vec<f32>,
    min2: Vec<f32>,
    negative: Vec<u32>,
    parity: Vec<u8>,
    hard: Vec<Bit>,
}

/// The `Z` lanes of a circulant as two contiguous runs
/// `(first lane, first variable, length)`; lane `i` touches variable
/// `col·Z + (i + shift) mod Z`.
#[inline(always)]
fn lanes(z: usize, col: usize, shift: usize) -> [(usize, usize, usize); 2] {
    [(0, col * z + shift, z - shift), (z - shift, col * z, shift)]
}

impl<'a> MinSumDecoder<'a> {
    pub fn new(code: &'a LiftedCode) -> Self {
        Self::with_normalization(code, DEFAULT_NORMALIZATION)
    }

    pub fn with_normalization(code: &'a LiftedCode, normalization: f32) -> Self {
        let n = code.len();
        let z = code.lifting_size();
        let blocks = code.blocks();
        debug_assert!(blocks.windows(2).all(|w| w[0].row <= w[1].row));
        let mut rows = Vec::with_capacity(code.base_rows());
        let mut start = 0;
        while start < blocks.len() {
            let row = blocks[start].row;
            let end = start + blocks[start..].iter().take_while(|b| b.row == row).count();
            rows.push((start, end));
            start = end;
        }
        let widest = rows.iter().map(|(s, e)| e - s).max().unwrap_or(0);
        Self {
            code,
            normalization,
            rows,
            channel: vec![0.0; n],
            pinned: vec![None; n],
            total: vec![0.0; n],
            check_to_var: vec![0.0; blocks.len() * z],
            q: vec![0.0; widest * z],
            min1: vec![0.0; z],
            min2: vec![0.0; z],
            negative: vec![0; z],
            parity: vec![0; z],
            hard: vec![0; n],
        }
    }

    pub fn decode(&mut self, llr: &[f64], max_iterations: usize) -> DecodeOutput {
        assert_eq!(
            llr.len(),
            self.code.len(),
            "LLR length must match the code length"
        );
        assert!(max_iterations >= 1);
        for (i, &l) in llr.iter().enumerate() {
            self.pinned[i] = if l.is_infinite() {
                Some(if l > 0.0 { 0 } else { 1 })
            } else {
                None
            };
            self.channel[i] = (l as f32).clamp(-LLR_CLIP, LLR_CLIP);
        }
        self.total.copy_from_slice(&self.channel);
        self.check_to_var.fill(0.0);

        for iteration in 1..=max_iterations {
            self.update_checks();
            self.update_totals();
            if self.hard_decide_and_check() {
                return DecodeOutput {
                    bits: self.hard.clone(),
                    converged: true,
                    iterations: iteration,
                };
            }
        }
        DecodeOutput {
            bits: self.hard.clone(),
            converged: false,
            iterations: max_iterations,
        }
    }

    fn update_checks(&mut self) {
        const SIGN: u32 = 0x8000_0000;
        let z = self.code.lifting_size();
        let blocks = self.code.blocks();
        let alpha = self.normalization;
        for &(start, end) in &self.rows {
            self.min1.fill(f32::INFINITY);
            self.min2.fill(f32::INFINITY);
            self.negative.fill(0);
            for (j, b) in blocks[start..end].iter().enumerate() {
                let msgs = &self.check_to_var[(start + j) * z..(start + j + 1) * z];
                let q = &mut self.q[j * z..(j + 1) * z];
                for (lane, var, len) in lanes(z, b.col, b.shift) {
                    let total = &self.total[var..var + len];
                    for ((q, &t), &m) in q[lane..lane + len]
                        .iter_mut()
                        .zip(total)
                        .zip(&msgs[lane..lane + len])
                    {
                        *q = (t - m).clamp(-LLR_CLIP, LLR_CLIP);
                    }
                }
                let lanes = self
                    .min1
                    .iter_mut()
                    .zip(self.min2.iter_mut())
                    .zip(self.negative.iter_mut());
                for (((min1, min2), negative), &v) in lanes.zip(q.iter()) {
                    let a = v.abs();
                    *negative ^= v.to_bits() & SIGN;
                    *min2 = min2.min(a.max(*min1));
                    *min1 = min1.min(a);
                }
            }
            for j in 0..end - start {
                let msgs = &mut self.check_to_var[(start + j) * z..(start + j + 1) * z];
                let q = &self.q[j * z..(j + 1) * z];
                let lanes = self.min1.iter().zip(&self.min2).zip(&self.negative);
                for ((((&min1, &min2), &negative), &v), m) in lanes.zip(q).zip(msgs.iter_mut()) {
                    // The lane holding the minimum gets the second minimum.
                    let magnitude = if v.abs() == min1 { min2 } else { min1 } * alpha;
                    *m = f32::from_bits(magnitude.to_bits() | ((negative ^ v.to_bits()) & SIGN));
                }
            }
        }
    }

    fn update_totals(&mut self) {
        let z = self.code.lifting_size();
        self.total.copy_from_slice(&self.channel);
        for (j, b) in self.code.blocks().iter().enumerate() {
            let msgs = &self.check_to_var[j * z..(j + 1) * z];
            for (lane, var, len) in lanes(z, b.col, b.shift) {
                for (t, &m) in self.total[var..var + len]
                    .iter_mut()
                    .zip(&msgs[lane..lane + len])
                {
                    *t += m;
                }
            }
        }
    }

    fn hard_decide_and_check(&mut self) -> bool {
        for ((h, &t), p) in self.hard.iter_mut().zip(&self.total).zip(&self.pinned) {
            *h = p.unwrap_or(u8::from(t <= 0.0));
        }
        let z = self.code.lifting_size();
        let blocks = self.code.blocks();
        for &(start, end) in &self.rows {
            self.parity.fill(0);
            for b in &blocks[start..end] {
                for (lane, var, len) in lanes(z, b.col, b.shift) {
                    for (p, &h) in self.parity[lane..lane + len]
                        .iter_mut()
                        .zip(&self.hard[var..var + len])
                    {
                        *p ^= h;
                    }
                }
            }
            if self.parity.iter().any(|&p| p != 0) {
                return false;
            }
        }
        true
    }
}
