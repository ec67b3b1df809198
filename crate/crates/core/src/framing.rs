//! Frame assembly for the modified PAS transmitter.
//!
//! Per frame of `k` symbols of `2^m`-ASK with one quantification bit:
//!
//! * `b_1` of every symbol is a parity bit of the LDPC code;
//! * `b_2 .. b_(m-2)` are uniform info bits (the matcher context);
//! * `b_(m-1)` is the matcher output;
//! * `c'` sign bits `b_m` are info bits fed to the encoder as systematic
//!   bits. The first `c` of them fill the always-punctured systematic
//!   prefix, so the `b_m` positions they would have occupied carry
//!   parity instead.
//!
//! The systematic input is ordered
//! `[c sign bits | b_2 block | .. | b_(m-1) block | c' - c sign bits | fillers]`
//! and the retained parity is `[k bits for b_1 | k - c' + c bits for b_m]`.

use crate::channel::LlrFrame;
use crate::constellation::SubConstellation;
use crate::ldpc::LiftedCode;
use crate::shaping::{induce_distribution, ShapingParams, SignBitMatcher, TargetDistribution};
use crate::{Bit, Error, Result};
use num_rational::Ratio;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

/// Geometry of a shaped frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FrameConfig {
    /// Bits per symbol.
    pub m: u32,
    /// Symbols per frame.
    pub k: usize,
    /// Quantification bits per symbol.
    pub q: usize,
    /// Punctured systematic sign bits.
    pub c: usize,
    /// Sign bits used as systematic input, `c <= c' <= k`.
    pub c_prime: usize,
}

impl FrameConfig {
    /// `k = 1969` 16-ASK symbols with the `2Z = 768` punctured prefix of a
    /// `Z = 384` BG1 code: 7876 transmitted bits.
    pub fn flagship() -> Self {
        Self {
            m: 4,
            k: 1969,
            q: 1,
            c: 2 * 384,
            c_prime: 1969,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::Config("frames need at least 8-ASK".into()));
        }
        if self.q != 1 {
            return Err(Error::Config(format!(
                "exactly one quantification bit is supported, got q = {}",
                self.q
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("a frame needs at least one symbol".into()));
        }
        if !(self.c <= self.c_prime && self.c_prime <= self.k) {
            return Err(Error::Config(format!(
                "need c <= c' <= k, got c = {}, c' = {}, k = {}",
                self.c, self.c_prime, self.k
            )));
        }
        Ok(())
    }

    /// Systematic payload `(m - 1 - q)k + c'`.
    pub fn systematic_payload(&self) -> usize {
        (self.m as usize - 1 - self.q) * self.k + self.c_prime
    }

    /// Retained parity `qk + k - c' + c`.
    pub fn parity_retained(&self) -> usize {
        self.q * self.k + self.k - self.c_prime + self.c
    }

    pub fn transmitted_bits(&self) -> usize {
        self.m as usize * self.k
    }

    /// Positions of `b_m` that carry parity.
    pub fn sign_parity_positions(&self) -> usize {
        self.k - self.c_prime + self.c
    }
}

/// Code rate `((m - 1 - q)k + c') / (mk + c)`: systematic payload over
/// transmitted plus punctured bits.
pub fn code_rate(cfg: &FrameConfig) -> Ratio<usize> {
    Ratio::new(cfg.systematic_payload(), cfg.transmitted_bits() + cfg.c)
}

/// Information rate in bits per channel use given the mean matcher payload
/// per frame.
pub fn info_rate(cfg: &FrameConfig, payload_consumed_avg: f64) -> f64 {
    let uniform_levels = (cfg.m as usize - 3) * cfg.k;
    (uniform_levels as f64 + cfg.c_prime as f64 + payload_consumed_avg) / cfg.k as f64
}

/// Source of a transmitted label bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Code column `i` (systematic part).
    Systematic(usize),
    /// Retained parity bit `j`, code column `k_sys + j`.
    Parity(usize),
}

/// Routing between transmitted label bits and code columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMap {
    bits_per_symbol: usize,
    symbols: usize,
    payload: usize,
    k_sys: usize,
    punctured: usize,
    parity: usize,
    code_len: usize,
    slots: Vec<Slot>,
    segments: Vec<(String, Range<usize>)>,
}

impl CodeMap {
    fn check_code(
        code: &LiftedCode,
        payload: usize,
        punctured: usize,
        parity: usize,
    ) -> Result<()> {
        if payload > code.k_sys() {
            return Err(Error::Config(format!(
                "systematic payload {payload} overflows the {} systematic bits of the code",
                code.k_sys()
            )));
        }
        if punctured > payload {
            return Err(Error::Config(
                "punctured prefix longer than the payload".into(),
            ));
        }
        if parity > code.parity_len() {
            return Err(Error::Config(format!(
                "{parity} retained parity bits exceed the {} available",
                code.parity_len()
            )));
        }
        Ok(())
    }

    /// Shaped layout for `cfg`.
    pub fn shaped(cfg: &FrameConfig, code: &LiftedCode) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.m as usize;
        let k = cfg.k;
        let payload = cfg.systematic_payload();
        let parity = cfg.parity_retained();
        Self::check_code(code, payload, cfg.c, parity)?;
        let sign_parity = cfg.sign_parity_positions();
        let sign_tail = cfg.c + (m - 2) * k;
        let mut slots = Vec::with_capacity(m * k);
        for s in 0..k {
            slots.push(Slot::Parity(s));
            for level in 2..m {
                slots.push(Slot::Systematic(cfg.c + (level - 2) * k + s));
            }
            slots.push(if s < sign_parity {
                Slot::Parity(k + s)
            } else {
                Slot::Systematic(sign_tail + s - sign_parity)
            });
        }
        let mut segments = vec![("sign_punctured".to_string(), 0..cfg.c)];
        for level in 2..m {
            let start = cfg.c + (level - 2) * k;
            segments.push((format!("b{level}"), start..start + k));
        }
        segments.push(("sign_transmitted".into(), sign_tail..payload));
        segments.push(("filler".into(), payload..code.k_sys()));
        Ok(Self {
            bits_per_symbol: m,
            symbols: k,
            payload,
            k_sys: code.k_sys(),
            punctured: cfg.c,
            parity,
            code_len: code.len(),
            slots,
            segments,
        })
    }

    /// Conventional BICM layout: `info_bits` systematic bits, the first
    /// `punctured` of them not sent, and a row-column interleaver with one
    /// row per bit level. Row 0 feeds the sign level `b_m`, the last row `b_1`.
    pub fn interleaved(
        bits_per_symbol: usize,
        symbols: usize,
        info_bits: usize,
        punctured: usize,
        code: &LiftedCode,
    ) -> Result<Self> {
        let transmitted = bits_per_symbol * symbols;
        if info_bits < punctured || info_bits - punctured > transmitted {
            return Err(Error::Config(format!(
                "{info_bits} info bits do not fit {transmitted} transmitted bits"
            )));
        }
        let parity = transmitted - (info_bits - punctured);
        Self::check_code(code, info_bits, punctured, parity)?;
        let stream: Vec<Slot> = (punctured..info_bits)
            .map(Slot::Systematic)
            .chain((0..parity).map(Slot::Parity))
            .collect();
        let mut slots = vec![Slot::Parity(0); transmitted];
        for (row, chunk) in stream.chunks(symbols).enumerate() {
            let level = bits_per_symbol - row;
            for (s, &slot) in chunk.iter().enumerate() {
                slots[s * bits_per_symbol + level - 1] = slot;
            }
        }
        Ok(Self {
            bits_per_symbol,
            symbols,
            payload: info_bits,
            k_sys: code.k_sys(),
            punctured,
            parity,
            code_len: code.len(),
            slots,
            segments: vec![
                ("info_punctured".into(), 0..punctured),
                ("info".into(), punctured..info_bits),
                ("filler".into(), info_bits..code.k_sys()),
            ],
        })
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    /// Non-filler systematic bits.
    pub fn payload(&self) -> usize {
        self.payload
    }

    pub fn punctured(&self) -> usize {
        self.punctured
    }

    pub fn parity_retained(&self) -> usize {
        self.parity
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Code column of a slot.
    pub fn column(&self, slot: Slot) -> usize {
        match slot {
            Slot::Systematic(i) => i,
            Slot::Parity(j) => self.k_sys + j,
        }
    }

    /// Zero-padded encoder input for a payload.
    pub fn systematic_input(&self, payload: &[Bit]) -> Vec<Bit> {
        debug_assert_eq!(payload.len(), self.payload);
        let mut input = vec![0; self.k_sys];
        input[..payload.len()].copy_from_slice(payload);
        input
    }

    /// Transmitted label bits, symbol-major, `b_1` first.
    pub fn gather(&self, codeword: &[Bit]) -> Vec<Bit> {
        self.slots
            .iter()
            .map(|&s| codeword[self.column(s)])
            .collect()
    }

    /// Decoder input from demapper output: label LLRs routed to their code
    /// columns and saturated, zero on the punctured prefix and on unsent
    /// parity, `+∞` on fillers.
    pub fn route_llrs(&self, llr: &LlrFrame) -> Result<Vec<f64>> {
        if llr.bits_per_symbol != self.bits_per_symbol || llr.values.len() != self.slots.len() {
            return Err(Error::Config(format!(
                "LLR frame of {} values does not match a layout of {} slots",
                llr.values.len(),
                self.slots.len()
            )));
        }
        let clip = f64::from(crate::ldpc::LLR_CLIP);
        let mut out = vec![0.0; self.code_len];
        out[self.payload..self.k_sys].fill(f64::INFINITY);
        for (&slot, &v) in self.slots.iter().zip(&llr.values) {
            out[self.column(slot)] = v.clamp(-clip, clip);
        }
        Ok(out)
    }

    /// Checks that every sent code bit appears exactly once and nothing else does.
    pub fn audit(&self) -> Result<()> {
        let mut seen = vec![false; self.code_len];
        for &slot in &self.slots {
            let ok = match slot {
                Slot::Systematic(i) => (self.punctured..self.payload).contains(&i),
                Slot::Parity(j) => j < self.parity,
            };
            let col = self.column(slot);
            if !ok || seen[col] {
                return Err(Error::Config(format!(
                    "slot {slot:?} duplicated or out of range"
                )));
            }
            seen[col] = true;
        }
        let expected = self.payload - self.punctured + self.parity;
        if self.slots.len() != expected {
            return Err(Error::Config(format!(
                "{} slots for {expected} sent code bits",
                self.slots.len()
            )));
        }
        Ok(())
    }

    /// Text descriptor of the layout.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bits_per_symbol={}", self.bits_per_symbol);
        let _ = writeln!(out, "symbols={}", self.symbols);
        let _ = writeln!(out, "payload={}", self.payload);
        let _ = writeln!(out, "k_sys={}", self.k_sys);
        let _ = writeln!(out, "punctured={}", self.punctured);
        let _ = writeln!(out, "parity_retained={}", self.parity);
        let _ = writeln!(out, "code_len={}", self.code_len);
        for (name, r) in &self.segments {
            let _ = writeln!(out, "segment={name},{},{}", r.start, r.end);
        }
        out.push_str("symbol,level,source,index,column\n");
        for (i, &slot) in self.slots.iter().enumerate() {
            let (source, index) = match slot {
                Slot::Systematic(i) => ("systematic", i),
                Slot::Parity(j) => ("parity", j),
            };
            let _ = writeln!(
                out,
                "{},{},{source},{index},{}",
                i / self.bits_per_symbol,
                i % self.bits_per_symbol + 1,
                self.column(slot)
            );
        }
        out
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.describe()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    InfoUniform,
    DmOutput,
    Parity,
    SystematicPunctured,
}

/// Transmitted label bits per level, `levels[0]` being `b_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPlanes {
    pub levels: Vec<Vec<Bit>>,
    pub provenance: Vec<Vec<Provenance>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssembledFrame {
    pub symbols: Vec<i32>,
    pub planes: BitPlanes,
    pub codeword: Vec<Bit>,
    /// Info bits read from the input stream.
    pub consumed: usize,
    /// Of which carried by the matcher.
    pub dm_consumed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disassembled {
    /// Recovered info stream, in the order it was consumed.
    pub info: Vec<Bit>,
    pub dm_payload: Vec<Bit>,
    pub ok: bool,
}

/// Transmitter and receiver framing for one configuration and code.
#[derive(Debug, Clone)]
pub struct ShapedFramer {
    cfg: FrameConfig,
    sub: SubConstellation,
    target: TargetDistribution,
    matcher: SignBitMatcher,
    map: CodeMap,
}

impl ShapedFramer {
    pub fn new(cfg: FrameConfig, params: &ShapingParams, code: &LiftedCode) -> Result<Self> {
        cfg.validate()?;
        let sub = SubConstellation::gray(cfg.m)?;
        let target = induce_distribution(params, &sub)?;
        let matcher = SignBitMatcher::new(&target, &sub)?;
        let map = CodeMap::shaped(&cfg, code)?;
        Ok(Self {
            cfg,
            sub,
            target,
            matcher,
            map,
        })
    }

    pub fn config(&self) -> &FrameConfig {
        &self.cfg
    }

    pub fn map(&self) -> &CodeMap {
        &self.map
    }

    pub fn matcher(&self) -> &SignBitMatcher {
        &self.matcher
    }

    pub fn target(&self) -> &TargetDistribution {
        &self.target
    }

    pub fn sub_constellation(&self) -> &SubConstellation {
        &self.sub
    }

    /// Info bits needed in the worst case for one frame.
    pub fn max_info_bits(&self) -> usize {
        let k = self.cfg.k;
        (self.cfg.m as usize - 3) * k + self.cfg.c_prime + k
    }

    fn contexts(&self, levels: &[&[Bit]]) -> Vec<u32> {
        (0..self.cfg.k)
            .map(|s| {
                levels
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, plane)| acc | (u32::from(plane[s]) << j))
            })
            .collect()
    }

    pub fn assemble(&self, code: &LiftedCode, info: &[Bit]) -> Result<AssembledFrame> {
        let m = self.cfg.m as usize;
        let k = self.cfg.k;
        let c = self.cfg.c;
        let uniform_levels = m - 3;
        let fixed = uniform_levels * k + self.cfg.c_prime;
        if info.len() < fixed {
            return Err(Error::Underflow {
                needed: fixed,
                available: info.len(),
            });
        }
        let (context_bits, rest) = info.split_at(uniform_levels * k);
        let (sign_bits, dm_input) = rest.split_at(self.cfg.c_prime);
        let context_planes: Vec<&[Bit]> = context_bits.chunks(k).collect();
        let contexts = self.contexts(&context_planes);
        let (biased, dm_consumed) = self.matcher.encode(dm_input, &contexts)?;

        let mut payload = Vec::with_capacity(self.map.payload());
        payload.extend_from_slice(&sign_bits[..c]);
        payload.extend_from_slice(context_bits);
        payload.extend_from_slice(&biased);
        payload.extend_from_slice(&sign_bits[c..]);
        let codeword = code.encode(&self.map.systematic_input(&payload))?;

        let label_bits = self.map.gather(&codeword);
        let mut levels = vec![Vec::with_capacity(k); m];
        let mut provenance = vec![Vec::with_capacity(k); m];
        let mut symbols = Vec::with_capacity(k);
        for (s, label) in label_bits.chunks(m).enumerate() {
            for (level, &b) in label.iter().enumerate() {
                levels[level].push(b);
                let p = match (level + 1, self.map.slots[s * m + level]) {
                    (_, Slot::Parity(_)) => Provenance::Parity,
                    (l, _) if l == m - 1 => Provenance::DmOutput,
                    _ => Provenance::InfoUniform,
                };
                provenance[level].push(p);
            }
            symbols.push(self.sub.map_full(label[0], &label[1..]));
        }
        Ok(AssembledFrame {
            symbols,
            planes: BitPlanes { levels, provenance },
            codeword,
            consumed: fixed + dm_consumed,
            dm_consumed,
        })
    }

    /// Receiver inverse of [`assemble`](Self::assemble) on decoded code bits.
    pub fn disassemble(&self, decoded: &[Bit]) -> Disassembled {
        let m = self.cfg.m as usize;
        let k = self.cfg.k;
        let c = self.cfg.c;
        let payload = &decoded[..self.map.payload()];
        let context_bits = &payload[c..c + (m - 3) * k];
        let biased = &payload[c + (m - 3) * k..c + (m - 2) * k];
        let context_planes: Vec<&[Bit]> = context_bits.chunks(k).collect();
        let contexts = self.contexts(&context_planes);
        let mut info = Vec::with_capacity(self.max_info_bits());
        info.extend_from_slice(context_bits);
        info.extend_from_slice(&payload[..c]);
        info.extend_from_slice(&payload[c + (m - 2) * k..]);
        match self.matcher.decode(biased, &contexts) {
            Ok(dm_payload) => {
                info.extend_from_slice(&dm_payload);
                Disassembled {
                    info,
                    dm_payload,
                    ok: true,
                }
            }
            Err(_) => Disassembled {
                info,
                dm_payload: Vec::new(),
                ok: false,
            },
        }
    }

    /// Systematic payload part of a codeword.
    pub fn payload<'b>(&self, codeword: &'b [Bit]) -> &'b [Bit] {
        &codeword[..self.map.payload()]
    }
}
