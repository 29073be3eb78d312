//! ReLZ: an LZ77-like parser that runs in memory bounded by a prefix
//! reference.
//!
//! The text is first cut into phrases by relative Lempel-Ziv against its own
//! length-`ell` prefix (the prefix itself is parsed with exact LZ). The phrases
//! are then renamed to metasymbols, equal phrases sharing a name, and the
//! resulting much shorter string is parsed again with exact LZ. Mapping that
//! second parse back to the text gives an LZ-like parsing whose phrase count
//! stays close to the optimum on repetitive inputs.
//!
//! Besides the pipeline the crate provides the exact LZ parser it is measured
//! against, a bit-exact container with Elias codes and rightmost source
//! selection, empirical entropy measurements, and synthetic corpus generators.
//!
//! Positions in [`Phrase`] are 1-based; serialized formats use 0-based offsets.

pub mod bench;
pub mod coder;
pub mod corpus;
pub mod entropy;
mod error;
pub mod lz;
pub mod meta;
pub mod parsing;
pub mod relz;
pub mod rlz;
pub mod suffix_index;
mod text;

pub use coder::{
    decode, encode, encode_raw, encoded_size_bits, rightmost_reassign, EncodedBlob, Encoder,
};
pub use error::{Error, Result};
pub use lz::{lz_parse, naive_lz_parse};
pub use meta::{metasymbolize, remap_metaparse, MetaIdScheme, MetaText};
pub use parsing::{expand_parsing, verify_parsing, Parsing, Phrase, Violation};
pub use relz::{derive_ell, relz_parse, relz_recursive, PrefixSize, Relz, RelzConfig, RelzStats};
pub use rlz::{rlz_parse, rlz_pref_parse};
pub use suffix_index::SuffixIndex;
pub use text::{Symbol, Text};
