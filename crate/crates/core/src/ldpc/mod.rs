//! 5G NR style quasi-cyclic LDPC codes.

mod base_graph;
mod code;
mod decoder;

pub use base_graph::{
    data_checksums, BaseEntry, BaseGraph, BaseGraphKind, LiftingSizes, SHIFT_SETS,
};
pub use code::{Block, LiftedCode};
pub use decoder::{
    DecodeOutput, MinSumDecoder, DEFAULT_MAX_ITERATIONS, DEFAULT_NORMALIZATION, LLR_CLIP,
};
