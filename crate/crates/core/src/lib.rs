//! Translation-based block ciphers over `F_q`: the S-box and mixing-layer
//! criteria for primitivity, and permutation-group computations that check
//! the group generated by the round functions directly.

pub mod algebra;
pub mod cipher;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod group_engine;
pub mod mixing_analysis;
pub mod report;
pub mod sbox_analysis;

pub use error::{Error, Result};
