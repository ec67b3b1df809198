//! Constant-composition distribution matcher.
//!
//! Maps `⌊log2 C(n, w)⌋` uniform bits onto a length-`n` binary word with
//! exactly `w` zeros. The coder is an exact-precision interval coder: every
//! prefix owns the integer interval of lexicographic ranks of its
//! completions, whose width is a binomial coefficient. Encoding narrows the
//! interval around the rank spelled by the input bits; decoding recomputes the
//! rank. All arithmetic is on unbounded integers, so the map is bit-exact.

use crate::{Bit, Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantComposition {
    n: usize,
    zeros: usize,
    count: BigUint,
    payload_bits: usize,
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

impl ConstantComposition {
    pub fn new(n: usize, zeros: usize) -> Self {
        assert!(zeros <= n, "composition {zeros} exceeds length {n}");
        let count = binomial(n, zeros);
        let payload_bits = (count.bits() - 1) as usize;
        Self {
            n,
            zeros,
            count,
            payload_bits,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn zeros(&self) -> usize {
        self.zeros
    }

    /// Number of input bits consumed per codeword, `⌊log2 C(n, w)⌋`.
    pub fn payload_bits(&self) -> usize {
        self.payload_bits
    }

    /// Number of codewords `C(n, w)`.
    pub fn codeword_count(&self) -> &BigUint {
        &self.count
    }

    /// Encodes exactly [`payload_bits`](Self::payload_bits) bits, most
    /// significant first.
    pub fn encode(&self, bits: &[Bit]) -> Vec<Bit> {
        assert_eq!(bits.len(), self.payload_bits, "payload length mismatch");
        let mut rank = BigUint::zero();
        for &b in bits {
            rank <<= 1u8;
            if b & 1 == 1 {
                rank += 1u8;
            }
        }
        let mut out = Vec::with_capacity(self.n);
        let mut width = self.count.clone();
        let mut zeros = self.zeros;
        for remaining in (1..=self.n).rev() {
            // Completions starting with 0: C(remaining - 1, zeros - 1).
            let zero_branch = &width * zeros / remaining;
            if rank < zero_branch {
                out.push(0);
                width = zero_branch;
                zeros -= 1;
            } else {
                out.push(1);
                rank -= &zero_branch;
                width -= zero_branch;
            }
        }
        out
    }

    /// Recovers the payload, rejecting words of the wrong composition or
    /// outside the encoder's image.
    pub fn decode(&self, word: &[Bit]) -> Result<Vec<Bit>> {
        if word.len() != self.n {
            return Err(Error::Decode(format!(
                "codeword length {} does not match {}",
                word.len(),
                self.n
            )));
        }
        let zeros = word.iter().filter(|&&b| b == 0).count();
        if zeros != self.zeros {
            return Err(Error::Decode(format!(
                "composition violated: {zeros} zeros, expected {}",
                self.zeros
            )));
        }
        let mut rank = BigUint::zero();
        let mut width = self.count.clone();
        let mut zeros = self.zeros;
        for (i, &b) in word.iter().enumerate() {
            let remaining = self.n - i;
            let zero_branch = &width * zeros / remaining;
            if b == 0 {
                width = zero_branch;
                zeros -= 1;
            } else {
                rank += &zero_branch;
                width -= zero_branch;
            }
        }
        if rank.bits() as usize > self.payload_bits {
            return Err(Error::Decode("codeword outside the matcher image".into()));
        }
        Ok((0..self.payload_bits)
            .rev()
            .map(|i| Bit::from(rank.bit(i as u64)))
            .collect())
    }
}
