//! Exact greedy LZ77 parsing.
//!
//! [`lz_parse`] uses previous and next smaller values: for every text position the
//! lexicographically nearest suffixes that start earlier (the previous and
//! next smaller values around its rank in the suffix array) are the only
//! candidates for its longest previous factor. [`naive_lz_parse`] is the
//! quadratic definition, kept as an oracle.

use crate::error::{Error, Result};
use crate::parsing::{Parsing, Phrase};
use crate::suffix_index::SuffixIndex;
use crate::text::{Symbol, Text};

/// Default input cap for [`naive_lz_parse`].
pub const NAIVE_CAP: usize = 10_000;

const NONE: u32 = u32::MAX;

/// Greedy LZ parse: each phrase is the longest prefix of the remaining text
/// with an occurrence starting earlier, or a literal when that is empty.
pub fn lz_parse(text: &Text) -> Parsing {
    let index = SuffixIndex::build(text.symbols());
    Parsing::new(lz_phrases(&index, 0))
}

/// LZ phrases over the indexed text, with the first `skip` positions emitted
/// as literals and parsing resuming greedily after them.
pub(crate) fn lz_phrases(index: &SuffixIndex<'_>, skip: usize) -> Vec<Phrase> {
    let text = index.text();
    let n = text.len();
    let (psv, nsv) = smaller_neighbours(index.sa(), n);

    let mut phrases: Vec<Phrase> = text[..skip.min(n)]
        .iter()
        .map(|&c| Phrase::Literal(c))
        .collect();
    let mut i = skip.min(n);
    while i < n {
        let mut best = (0usize, 0usize);
        for cand in [psv[i], nsv[i]] {
            if cand == NONE {
                continue;
            }
            let j = cand as usize;
            let l = common_prefix(&text[j..], &text[i..]);
            if l > best.0 {
                best = (l, j);
            }
        }
        match best {
            (0, _) => {
                phrases.push(Phrase::Literal(text[i]));
                i += 1;
            }
            (len, j) => {
                phrases.push(Phrase::Copy { source: j + 1, len });
                i += len;
            }
        }
    }
    phrases
}

/// For each text position `x`, the nearest suffix-array neighbours on either
/// side of `x` whose start is smaller than `x`.
fn smaller_neighbours(sa: &[u32], n: usize) -> (Vec<u32>, Vec<u32>) {
    let mut psv = vec![NONE; n];
    let mut nsv = vec![NONE; n];
    let mut stack: Vec<u32> = Vec::new();
    for &x in sa {
        while let Some(&top) = stack.last() {
            if top > x {
                nsv[top as usize] = x;
                stack.pop();
            } else {
                break;
            }
        }
        psv[x as usize] = stack.last().copied().unwrap_or(NONE);
        stack.push(x);
    }
    (psv, nsv)
}

fn common_prefix(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Exhaustive LZ parse by the definition; picks the leftmost longest source.
/// Refuses inputs longer than [`NAIVE_CAP`].
pub fn naive_lz_parse(text: &Text) -> Result<Parsing> {
    naive_lz_parse_capped(text, NAIVE_CAP)
}

pub fn naive_lz_parse_capped(text: &Text, cap: usize) -> Result<Parsing> {
    let t = text.symbols();
    if t.len() > cap {
        return Err(Error::usage(format!(
            "naive LZ oracle limited to {cap} symbols, got {}",
            t.len()
        )));
    }
    let mut phrases = Vec::new();
    let mut i = 0;
    while i < t.len() {
        let mut best = (0usize, 0usize);
        for j in 0..i {
            let l = common_prefix(&t[j..], &t[i..]);
            if l > best.0 {
                best = (l, j);
            }
        }
        if best.0 == 0 {
            phrases.push(Phrase::Literal(t[i]));
            i += 1;
        } else {
            phrases.push(Phrase::Copy {
                source: best.1 + 1,
                len: best.0,
            });
            i += best.0;
        }
    }
    Ok(Parsing::new(phrases))
}
