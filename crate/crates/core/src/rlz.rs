//! Relative Lempel-Ziv parsing against a reference, and the prefix variant
//! that forms the first stage of ReLZ.

use crate::error::{Error, Result};
use crate::lz::lz_phrases;
use crate::parsing::{Parsing, Phrase};
use crate::suffix_index::SuffixIndex;
use crate::text::{Symbol, Text};

/// Greedy RLZ parse of `text` against the indexed reference.
///
/// Copy sources are 1-based positions in the reference, so the result is not
/// an LZ-like parsing of `text` on its own.
pub fn rlz_parse(text: &Text, reference: &SuffixIndex<'_>) -> Parsing {
    Parsing::new(rlz_phrases(text.symbols(), reference))
}

pub(crate) fn rlz_phrases(text: &[Symbol], reference: &SuffixIndex<'_>) -> Vec<Phrase> {
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < text.len() {
        match reference.longest_match(&text[i..]) {
            (0, _) | (_, None) => {
                phrases.push(Phrase::Literal(text[i]));
                i += 1;
            }
            (len, Some(source)) => {
                phrases.push(Phrase::Copy { source, len });
                i += len;
            }
        }
    }
    phrases
}

/// `LZ(T[1,ell]) · RLZ(T[ell+1,n], T[1,ell])`, an LZ-like parsing of `text`.
pub fn rlz_pref_parse(text: &Text, ell: usize) -> Result<Parsing> {
    if ell > text.len() {
        return Err(Error::usage(format!(
            "prefix length {ell} exceeds text length {}",
            text.len()
        )));
    }
    Ok(Parsing::new(
        rlz_pref_phrases(text.symbols(), ell, 0).phrases,
    ))
}

pub(crate) struct PrefixParse {
    pub phrases: Vec<Phrase>,
    /// Number of leading phrases produced by the literal/LZ part, i.e. those
    /// covering `T[1, max(ell, skip)]`.
    pub prefix_phrases: usize,
}

/// Prefix parse where the first `skip` symbols are already final and are
/// emitted as literals. `T[skip+1, ell]` is LZ-parsed within the reference
/// and the rest is RLZ-parsed against `T[1, ell]`.
pub(crate) fn rlz_pref_phrases(text: &[Symbol], ell: usize, skip: usize) -> PrefixParse {
    let ell = ell.min(text.len());
    let skip = skip.min(text.len());
    let index = SuffixIndex::build(&text[..ell]);
    let mut phrases = lz_phrases(&index, skip.min(ell));
    let split = ell.max(skip);
    phrases.extend(text[ell..split].iter().map(|&c| Phrase::Literal(c)));
    let prefix_phrases = phrases.len();
    phrases.extend(rlz_phrases(&text[split..], &index));
    PrefixParse {
        phrases,
        prefix_phrases,
    }
}
