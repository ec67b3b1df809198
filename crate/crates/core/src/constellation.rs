//! M-ASK alphabets, bit labellings and the sub-constellation decomposition.
//!
//! Symbols are odd integers with unit half-spacing. Bit level `b_j`
//! (1-based, as in the usual tables) is stored as bit `j - 1` of a packed
//! label, so `b_1` is the least significant bit and `b_m` is the sign bit.
//!
//! The Gray labelling is the binary-reflected Gray code of the symbol index.
//! For 16-ASK it reproduces the standard table row for row; for other orders
//! it is an extrapolation of the same construction.

use crate::{Bit, Error, Result};
use num_rational::Ratio;

pub const MIN_BITS: u32 = 2;
pub const MAX_BITS: u32 = 8;

/// An `M = 2^m` point amplitude-shift keying alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AskConstellation {
    m: u32,
    symbols: Vec<i32>,
}

impl AskConstellation {
    pub fn new(m: u32) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&m) {
            return Err(Error::Config(format!(
                "bits per symbol must be in {MIN_BITS}..={MAX_BITS}, got {m}"
            )));
        }
        let order = 1i32 << m;
        let symbols = (0..order).map(|i| 2 * i - order + 1).collect();
        Ok(Self { m, symbols })
    }

    /// Bits per symbol.
    pub fn bits(&self) -> u32 {
        self.m
    }

    /// Number of points `M`.
    pub fn order(&self) -> usize {
        self.symbols.len()
    }

    /// Symbols in increasing order.
    pub fn symbols(&self) -> &[i32] {
        &self.symbols
    }

    pub fn index_of(&self, x: i32) -> Option<usize> {
        let order = self.order() as i32;
        if x % 2 == 0 || x.abs() >= order {
            return None;
        }
        Some(((x + order - 1) / 2) as usize)
    }

    /// Average energy `(M^2 - 1) / 3` under the uniform distribution.
    pub fn uniform_energy(&self) -> Ratio<i64> {
        let order = self.order() as i64;
        Ratio::new(order * order - 1, 3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabellingKind {
    Gray,
    Natural,
}

/// A bijection between the symbols of an [`AskConstellation`] and `m`-bit labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labelling {
    kind: LabellingKind,
    constellation: AskConstellation,
    labels: Vec<u32>,
    by_label: Vec<usize>,
}

impl Labelling {
    pub fn new(constellation: &AskConstellation, kind: LabellingKind) -> Self {
        let labels: Vec<u32> = (0..constellation.order() as u32)
            .map(|i| match kind {
                LabellingKind::Gray => i ^ (i >> 1),
                LabellingKind::Natural => i,
            })
            .collect();
        let mut by_label = vec![0; labels.len()];
        for (index, &label) in labels.iter().enumerate() {
            by_label[label as usize] = index;
        }
        Self {
            kind,
            constellation: constellation.clone(),
            labels,
            by_label,
        }
    }

    pub fn kind(&self) -> LabellingKind {
        self.kind
    }

    pub fn constellation(&self) -> &AskConstellation {
        &self.constellation
    }

    pub fn bits(&self) -> u32 {
        self.constellation.bits()
    }

    /// Packed label of the symbol with the given index.
    pub fn label_of_index(&self, index: usize) -> u32 {
        self.labels[index]
    }

    /// Bit level `level` (1-based) of the symbol with the given index.
    pub fn bit_of_index(&self, index: usize, level: u32) -> Bit {
        ((self.labels[index] >> (level - 1)) & 1) as Bit
    }

    pub fn symbol_for_label(&self, label: u32) -> i32 {
        self.constellation.symbols[self.by_label[label as usize]]
    }

    /// Symbol whose label is `(b_1, .., b_m)`.
    pub fn map_bits(&self, bits: &[Bit]) -> i32 {
        debug_assert_eq!(bits.len(), self.bits() as usize);
        self.symbol_for_label(pack(bits))
    }

    /// Label bits `(b_1, .., b_m)` of `x`.
    pub fn demap_symbol(&self, x: i32) -> Result<Vec<Bit>> {
        let index = self.constellation.index_of(x).ok_or_else(|| {
            Error::Domain(format!(
                "{x} is not a {}-ASK symbol",
                self.constellation.order()
            ))
        })?;
        Ok(unpack(self.labels[index], self.bits()))
    }
}

/// The reference sub-constellation `X_r` (every second symbol of `X`,
/// starting from the leftmost) with its reduced labelling `(b_2, .., b_m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubConstellation {
    labelling: Labelling,
    members: Vec<i32>,
    reduced: Vec<u32>,
    by_reduced: Vec<usize>,
}

impl SubConstellation {
    /// Builds `X_r` from a Gray labelling of the base alphabet.
    pub fn new(labelling: &Labelling) -> Result<Self> {
        if labelling.kind() != LabellingKind::Gray {
            return Err(Error::Config(
                "the sub-constellation split requires Gray labelling".into(),
            ));
        }
        let symbols = labelling.constellation().symbols();
        let members: Vec<i32> = symbols.iter().copied().step_by(2).collect();
        let reduced: Vec<u32> = (0..members.len())
            .map(|j| labelling.label_of_index(2 * j) >> 1)
            .collect();
        let mut by_reduced = vec![usize::MAX; members.len()];
        for (j, &r) in reduced.iter().enumerate() {
            by_reduced[r as usize] = j;
        }
        debug_assert!(by_reduced.iter().all(|&j| j != usize::MAX));
        Ok(Self {
            labelling: labelling.clone(),
            members,
            reduced,
            by_reduced,
        })
    }

    /// Convenience constructor for the Gray-labelled `2^m`-ASK split.
    pub fn gray(m: u32) -> Result<Self> {
        let c = AskConstellation::new(m)?;
        Self::new(&Labelling::new(&c, LabellingKind::Gray))
    }

    pub fn labelling(&self) -> &Labelling {
        &self.labelling
    }

    pub fn base(&self) -> &AskConstellation {
        self.labelling.constellation()
    }

    /// Members of `X_r` in increasing order.
    pub fn members(&self) -> &[i32] {
        &self.members
    }

    /// `M' = M / 2`.
    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Packed reduced label (`b_2` in bit 0) of the member with the given index.
    pub fn reduced_label(&self, member_index: usize) -> u32 {
        self.reduced[member_index]
    }

    pub fn member_for_reduced(&self, reduced: u32) -> usize {
        self.by_reduced[reduced as usize]
    }

    /// Member of `X_r` whose Gray label restricted to levels `2..=m` is `bits`.
    pub fn map_reduced(&self, bits: &[Bit]) -> i32 {
        debug_assert_eq!(bits.len() + 1, self.labelling.bits() as usize);
        self.members[self.by_reduced[pack(bits) as usize]]
    }

    /// Applies the quantification-bit rule: transmit `x` when
    /// `b_1 ⊕ b_2 ⊕ .. ⊕ b_m = 0`, and `x + 2` otherwise.
    pub fn apply_shift(&self, x: i32, b1: Bit, bits: &[Bit]) -> i32 {
        let parity = bits.iter().fold(b1 & 1, |acc, &b| acc ^ (b & 1));
        if parity == 0 {
            x
        } else {
            x + 2
        }
    }

    /// Transmitted symbol for the full label `(b_1, b_2, .., b_m)`.
    pub fn map_full(&self, b1: Bit, bits: &[Bit]) -> i32 {
        self.apply_shift(self.map_reduced(bits), b1, bits)
    }
}

/// Packs `(b_1, .., b_n)` with `b_1` in bit 0.
pub fn pack(bits: &[Bit]) -> u32 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | (u32::from(b & 1) << j))
}

pub fn unpack(label: u32, n: u32) -> Vec<Bit> {
    (0..n).map(|j| ((label >> j) & 1) as Bit).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Standard 16-ASK table, columns -15..15, rows b1..b4.
    const GRAY_16: [[Bit; 16]; 4] = [
        [0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0],
        [0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0],
        [0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1],
    ];
    const NATURAL_16: [[Bit; 16]; 4] = [
        [0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1],
        [0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1],
        [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1],
    ];

    fn table_column(table: &[[Bit; 16]; 4], x: i32) -> Vec<Bit> {
        let col = ((x + 15) / 2) as usize;
        (0..4).map(|row| table[row][col]).collect()
    }

    #[test]
    fn sixteen_ask_alphabet() {
        let c = AskConstellation::new(4).unwrap();
        assert_eq!(c.order(), 16);
        assert_eq!(c.symbols().first(), Some(&-15));
        assert_eq!(c.symbols().last(), Some(&15));
        assert!(c.symbols().windows(2).all(|w| w[1] - w[0] == 2));
        assert!(c.symbols().iter().all(|x| x % 2 != 0));
        assert_eq!(c.uniform_energy(), Ratio::from_integer(85));
    }

    #[test]
    fn smallest_alphabet() {
        let c = AskConstellation::new(2).unwrap();
        assert_eq!(c.symbols(), &[-3, -1, 1, 3]);
        assert_eq!(c.uniform_energy(), Ratio::from_integer(5));
    }

    #[test]
    fn out_of_range_orders_rejected() {
        assert!(matches!(AskConstellation::new(1), Err(Error::Config(_))));
        assert!(matches!(AskConstellation::new(9), Err(Error::Config(_))));
    }

    #[test]
    fn uniform_energy_matches_direct_sum() {
        for m in MIN_BITS..=MAX_BITS {
            let c = AskConstellation::new(m).unwrap();
            let sum: i64 = c
                .symbols()
                .iter()
                .map(|&x| i64::from(x) * i64::from(x))
                .sum();
            assert_eq!(c.uniform_energy(), Ratio::new(sum, c.order() as i64));
        }
    }

    #[test]
    fn labellings_reproduce_the_16_ask_tables() {
        let c = AskConstellation::new(4).unwrap();
        let gray = Labelling::new(&c, LabellingKind::Gray);
        let natural = Labelling::new(&c, LabellingKind::Natural);
        for &x in c.symbols() {
            assert_eq!(
                gray.demap_symbol(x).unwrap(),
                table_column(&GRAY_16, x),
                "gray {x}"
            );
            assert_eq!(
                natural.demap_symbol(x).unwrap(),
                table_column(&NATURAL_16, x),
                "natural {x}"
            );
        }
        assert_eq!(gray.demap_symbol(-15).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(gray.demap_symbol(-13).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(gray.demap_symbol(15).unwrap(), vec![0, 0, 0, 1]);
        assert_eq!(gray.demap_symbol(5).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(natural.demap_symbol(1).unwrap(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn demap_rejects_foreign_symbols() {
        let c = AskConstellation::new(4).unwrap();
        let gray = Labelling::new(&c, LabellingKind::Gray);
        assert!(matches!(gray.demap_symbol(17), Err(Error::Domain(_))));
        assert!(matches!(gray.demap_symbol(2), Err(Error::Domain(_))));
    }

    #[test]
    fn labelling_is_a_bijection_for_all_orders() {
        for m in MIN_BITS..=MAX_BITS {
            let c = AskConstellation::new(m).unwrap();
            for kind in [LabellingKind::Gray, LabellingKind::Natural] {
                let lab = Labelling::new(&c, kind);
                for &x in c.symbols() {
                    let bits = lab.demap_symbol(x).unwrap();
                    assert_eq!(lab.map_bits(&bits), x);
                }
                let mut seen = vec![false; c.order()];
                for i in 0..c.order() {
                    let l = lab.label_of_index(i) as usize;
                    assert!(!seen[l]);
                    seen[l] = true;
                }
            }
        }
    }

    #[test]
    fn gray_adjacent_symbols_differ_in_one_level() {
        for m in MIN_BITS..=MAX_BITS {
            let c = AskConstellation::new(m).unwrap();
            let lab = Labelling::new(&c, LabellingKind::Gray);
            for i in 1..c.order() {
                let d = lab.label_of_index(i) ^ lab.label_of_index(i - 1);
                assert_eq!(d.count_ones(), 1);
            }
        }
    }

    #[test]
    fn sign_level_marks_positive_symbols() {
        for m in MIN_BITS..=MAX_BITS {
            let c = AskConstellation::new(m).unwrap();
            for kind in [LabellingKind::Gray, LabellingKind::Natural] {
                let lab = Labelling::new(&c, kind);
                for (i, &x) in c.symbols().iter().enumerate() {
                    assert_eq!(lab.bit_of_index(i, m) == 1, x > 0);
                }
            }
        }
    }

    #[test]
    fn sub_constellation_of_16_ask() {
        let sub = SubConstellation::gray(4).unwrap();
        assert_eq!(sub.members(), &[-15, -11, -7, -3, 1, 5, 9, 13]);
        assert_eq!(sub.map_reduced(&[0, 0, 0]), -15);
        assert_eq!(sub.map_reduced(&[0, 1, 1]), 1);
        assert_eq!(sub.map_reduced(&[1, 0, 1]), 9);
    }

    #[test]
    fn sub_constellation_split_is_a_disjoint_union() {
        for m in MIN_BITS..=MAX_BITS {
            let sub = SubConstellation::gray(m).unwrap();
            assert_eq!(sub.order(), 1 << (m - 1));
            let mut all: Vec<i32> = sub.members().to_vec();
            all.extend(sub.members().iter().map(|x| x + 2));
            all.sort_unstable();
            assert_eq!(all, sub.base().symbols());
        }
    }

    #[test]
    fn natural_labelling_cannot_be_split() {
        let c = AskConstellation::new(4).unwrap();
        let lab = Labelling::new(&c, LabellingKind::Natural);
        assert!(SubConstellation::new(&lab).is_err());
    }

    #[test]
    fn shift_rule_examples() {
        let sub = SubConstellation::gray(4).unwrap();
        assert_eq!(sub.apply_shift(-15, 0, &[0, 0, 0]), -15);
        assert_eq!(sub.apply_shift(-15, 1, &[0, 0, 0]), -13);
        assert_eq!(sub.apply_shift(-3, 0, &[0, 1, 0]), -1);
        let lab = sub.labelling();
        assert_eq!(lab.demap_symbol(-1).unwrap(), vec![0, 0, 1, 0]);
    }

    #[test]
    fn shifted_symbol_carries_the_full_label() {
        for m in MIN_BITS..=6 {
            let sub = SubConstellation::gray(m).unwrap();
            let lab = sub.labelling();
            for label in 0..(1u32 << m) {
                let bits = unpack(label, m);
                let x = sub.map_full(bits[0], &bits[1..]);
                assert_eq!(lab.demap_symbol(x).unwrap(), bits, "m={m} label={label:b}");
            }
        }
    }

    #[test]
    fn equal_reduced_labels_are_adjacent() {
        for m in MIN_BITS..=6 {
            let sub = SubConstellation::gray(m).unwrap();
            let lab = sub.labelling();
            for (j, &x) in sub.members().iter().enumerate() {
                let partner = lab.demap_symbol(x + 2).unwrap();
                assert_eq!(pack(&partner[1..]), sub.reduced_label(j));
            }
        }
    }
}
