//! Sign-bit-like probabilistic amplitude shaping for bit-interleaved coded
//! modulation.
//!
//! The crate is organised bottom-up:
//!
//! * [`constellation`]: M-ASK alphabets, Gray/natural labellings and the
//!   sub-constellation split `X = X_r ∪ (X_r + 2)`.
//! * [`analysis`]: entropy, energy, AWGN mutual information and
//!   required-SNR computations, including the Maxwell-Boltzmann reference.
//! * [`shaping`]: the shaping parameters, the induced target distribution,
//!   its optimiser and the constant-composition distribution matcher.
//! * [`ldpc`]: 5G NR quasi-cyclic LDPC base graphs, lifting, encoding and
//!   normalized min-sum decoding.
//! * [`framing`]: frame assembly with the quantification bit carrying
//!   parity, systematic-prefix puncturing and parity placement.
//! * [`channel`]: real AWGN channel and prior-aware bit demapper.
//! * [`sim`]: Monte Carlo orchestration, run configuration and CSV output.

pub mod analysis;
pub mod channel;
pub mod constellation;
mod error;
pub mod framing;
pub mod ldpc;
pub mod shaping;
pub mod sim;

pub use error::{Error, Result};

/// A single bit stored as `0` or `1`.
pub type Bit = u8;
