//! Sign-bit-like shaping with a Gray-labelled sub-constellation.
//!
//! With the reduced labels `(b_2, .., b_m)` of `X_r`, a symmetric target
//! factorises into uniform context bits `b_2 .. b_(m-2)`, a uniform sign bit
//! `b_m`, and a biased bit `b_(m-1)` whose zero-probability depends only on
//! the context. For 16-ASK the context is `b_2` and the biased bit is `b_3`
//! with `p(b_3 = 0 | b_2 = 0) = p_1`, `p(b_3 = 0 | b_2 = 1) = p_2`.
//!
//! Each context owns one biased source, realised per frame as a
//! constant-composition codeword over the positions carrying that context.

use super::ccdm::ConstantComposition;
use super::TargetDistribution;
use crate::constellation::SubConstellation;
use crate::{Bit, Error, Result};

const FACTORIZATION_TOLERANCE: f64 = 1e-9;

/// Number of zeros in a length-`n` sub-block with zero-probability `p`,
/// rounded half up.
pub fn composition(n: usize, p: f64) -> usize {
    ((n as f64) * p + 0.5 + 1e-9).floor().min(n as f64) as usize
}

/// Per-frame sub-block plan: which positions each biased source fills and
/// with how many zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmBlock {
    pub positions: Vec<Vec<usize>>,
    pub codes: Vec<ConstantComposition>,
}

impl DmBlock {
    pub fn payload_bits(&self) -> usize {
        self.codes
            .iter()
            .map(ConstantComposition::payload_bits)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignBitMatcher {
    m: u32,
    zero_prob: Vec<f64>,
}

impl SignBitMatcher {
    /// Derives the biased sources from a target over `X_r`, rejecting
    /// targets that do not factorise as described in the module docs.
    pub fn new(target: &TargetDistribution, sub: &SubConstellation) -> Result<Self> {
        let m = sub.base().bits();
        if m < 3 {
            return Err(Error::Config("shaping needs at least 8-ASK".into()));
        }
        let context_bits = m - 3;
        let contexts = 1usize << context_bits;
        let mut mass = vec![[[0.0f64; 2]; 2]; contexts];
        for (j, &p) in target.prob().iter().enumerate() {
            let r = sub.reduced_label(j);
            let ctx = (r as usize) & (contexts - 1);
            let shaped = ((r >> context_bits) & 1) as usize;
            let sign = ((r >> (context_bits + 1)) & 1) as usize;
            mass[ctx][sign][shaped] += p;
        }
        let ctx_mass = 1.0 / contexts as f64;
        let mut zero_prob = Vec::with_capacity(contexts);
        for (ctx, by_sign) in mass.iter().enumerate() {
            let total: f64 = by_sign.iter().flatten().sum();
            if (total - ctx_mass).abs() > FACTORIZATION_TOLERANCE {
                return Err(Error::Config(format!(
                    "context {ctx} has mass {total}, expected {ctx_mass}: target is not realisable by sign-bit-like shaping"
                )));
            }
            let conditional: Vec<f64> = by_sign
                .iter()
                .map(|[zero, one]| zero / (zero + one))
                .collect();
            if (by_sign[0].iter().sum::<f64>() - by_sign[1].iter().sum::<f64>()).abs()
                > FACTORIZATION_TOLERANCE
                || (conditional[0] - conditional[1]).abs() > FACTORIZATION_TOLERANCE
            {
                return Err(Error::Config(format!(
                    "sign bit is not independent in context {ctx}: target must be symmetric"
                )));
            }
            zero_prob.push(conditional[0]);
        }
        Ok(Self { m, zero_prob })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.m
    }

    /// `p(b_(m-1) = 0 | context)` for each context value.
    pub fn zero_probabilities(&self) -> &[f64] {
        &self.zero_prob
    }

    pub fn contexts(&self) -> usize {
        self.zero_prob.len()
    }

    /// Conditional entropy `H(b_(m-1) | context)` in bits per symbol.
    pub fn entropy_per_symbol(&self) -> f64 {
        self.zero_prob
            .iter()
            .map(|&p| crate::analysis::binary_entropy(p))
            .sum::<f64>()
            / self.contexts() as f64
    }

    pub fn plan(&self, contexts: &[u32]) -> DmBlock {
        let mut positions = vec![Vec::new(); self.contexts()];
        for (i, &c) in contexts.iter().enumerate() {
            positions[c as usize].push(i);
        }
        let codes = positions
            .iter()
            .zip(&self.zero_prob)
            .map(|(pos, &p)| ConstantComposition::new(pos.len(), composition(pos.len(), p)))
            .collect();
        DmBlock { positions, codes }
    }

    /// Produces the biased bits for a frame whose per-symbol context values
    /// are `contexts`, reading info bits from the front of `info`. Returns
    /// the biased bits and the number of info bits consumed.
    pub fn encode(&self, info: &[Bit], contexts: &[u32]) -> Result<(Vec<Bit>, usize)> {
        let block = self.plan(contexts);
        let needed = block.payload_bits();
        if info.len() < needed {
            return Err(Error::Underflow {
                needed,
                available: info.len(),
            });
        }
        let mut out = vec![0; contexts.len()];
        let mut cursor = 0;
        for (pos, code) in block.positions.iter().zip(&block.codes) {
            let word = code.encode(&info[cursor..cursor + code.payload_bits()]);
            cursor += code.payload_bits();
            for (&i, b) in pos.iter().zip(word) {
                out[i] = b;
            }
        }
        Ok((out, cursor))
    }

    /// Inverse of [`encode`](Self::encode).
    pub fn decode(&self, biased: &[Bit], contexts: &[u32]) -> Result<Vec<Bit>> {
        if biased.len() != contexts.len() {
            return Err(Error::Decode(
                "biased bits and contexts differ in length".into(),
            ));
        }
        let block = self.plan(contexts);
        let mut info = Vec::with_capacity(block.payload_bits());
        for (pos, code) in block.positions.iter().zip(&block.codes) {
            let word: Vec<Bit> = pos.iter().map(|&i| biased[i]).collect();
            info.extend(code.decode(&word)?);
        }
        Ok(info)
    }

    /// Expected info bits consumed per frame of `k` symbols when the
    /// context bits are i.i.d. uniform.
    pub fn expected_payload_bits(&self, k: usize) -> f64 {
        let contexts = self.contexts();
        if contexts == 1 {
            return payload_bits_for(k, self.zero_prob[0]) as f64;
        }
        let q = 1.0 / contexts as f64;
        let mut ln_fact = vec![0.0f64; k + 1];
        for i in 1..=k {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        let mean = k as f64 * q;
        let spread = 10.0 * (k as f64 * q * (1.0 - q)).sqrt() + 10.0;
        let lo = (mean - spread).max(0.0) as usize;
        let hi = ((mean + spread) as usize).min(k);
        let mut expected = 0.0;
        for n in lo..=hi {
            let ln_pmf = ln_fact[k] - ln_fact[n] - ln_fact[k - n]
                + n as f64 * q.ln()
                + (k - n) as f64 * (1.0 - q).ln();
            let weight = ln_pmf.exp();
            let bits: usize = self.zero_prob.iter().map(|&p| payload_bits_for(n, p)).sum();
            expected += weight * bits as f64;
        }
        expected
    }
}

fn payload_bits_for(n: usize, p: f64) -> usize {
    ConstantComposition::new(n, composition(n, p)).payload_bits()
}
