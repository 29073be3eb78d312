//! Metasymbols: phrases renamed to integers so that equal phrases share a
//! name, and the mapping of a parse over those names back to the text.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::parsing::{Parsing, Phrase};
use crate::text::{Symbol, Text};

/// How phrases are turned into metasymbol ids.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MetaIdScheme {
    /// Dense ids `0..z'` in order of first occurrence; equal ids iff equal
    /// content.
    #[default]
    Dense,
    /// Ids computed arithmetically from the phrase itself with
    /// [`FlagBitCodec`], without a dictionary. Equal ids imply equal content;
    /// equal copies with different sources may get different ids.
    FlagBit,
}

/// The metasymbol string `T'` of a parsing.
#[derive(Clone, Debug)]
pub struct MetaText {
    /// One id per phrase.
    pub ids: Vec<Symbol>,
    /// Alphabet bound of `ids`.
    pub sigma: u64,
    /// For dense ids: `(start, len)` of the first phrase with each id, with a
    /// 1-based start. Empty for flag-bit ids.
    pub dictionary: Vec<(usize, usize)>,
    /// 1-based text start of every phrase, plus a final entry `n + 1`.
    pub boundaries: Vec<usize>,
    /// The phrases the ids stand for.
    pub phrases: Vec<Phrase>,
}

impl MetaText {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn to_text(&self) -> Text {
        Text::new(self.ids.clone(), self.sigma).expect("metasymbol ids within their alphabet")
    }
}

const HASH_MOD: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 0x1f3d_5b79_a3c4_e2d1 % HASH_MOD;

fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let lo = (p as u64) & HASH_MOD;
    let hi = (p >> 61) as u64;
    let s = lo + hi;
    if s >= HASH_MOD {
        s - HASH_MOD
    } else {
        s
    }
}

/// Polynomial fingerprint of a symbol run modulo 2^61 - 1.
pub(crate) fn fingerprint(content: &[Symbol]) -> u64 {
    content.iter().fold(0u64, |h, &c| {
        let h = mul_mod(h, HASH_BASE) + (c % HASH_MOD) + 1;
        if h >= HASH_MOD {
            h - HASH_MOD
        } else {
            h
        }
    })
}

/// Maps phrase content to a value, keyed by `(length, fingerprint)` with a
/// full comparison on every hit. Distinct contents sharing a key go to a
/// rarely used overflow list.
pub(crate) struct ContentTable<'t, V> {
    text: &'t [Symbol],
    primary: HashMap<(usize, u64), (usize, V)>,
    overflow: HashMap<(usize, u64), Vec<(usize, V)>>,
}

impl<'t, V: Copy> ContentTable<'t, V> {
    pub fn new(text: &'t [Symbol]) -> Self {
        ContentTable {
            text,
            primary: HashMap::new(),
            overflow: HashMap::new(),
        }
    }

    fn same(&self, a: usize, b: usize, len: usize) -> bool {
        self.text[a - 1..a - 1 + len] == self.text[b - 1..b - 1 + len]
    }

    /// Looks up the content `text[start-1 .. start-1+len]`; `start` is 1-based.
    pub fn get(&self, start: usize, len: usize, hash: u64) -> Option<V> {
        let &(s, v) = self.primary.get(&(len, hash))?;
        if self.same(s, start, len) {
            return Some(v);
        }
        self.overflow
            .get(&(len, hash))?
            .iter()
            .find(|(s, _)| self.same(*s, start, len))
            .map(|&(_, v)| v)
    }

    /// Inserts or overwrites the value for this content.
    pub fn set(&mut self, start: usize, len: usize, hash: u64, value: V) {
        let key = (len, hash);
        let Some(&(s, _)) = self.primary.get(&key) else {
            self.primary.insert(key, (start, value));
            return;
        };
        if self.same(s, start, len) {
            self.primary.insert(key, (start, value));
            return;
        }
        let text = self.text;
        let list = self.overflow.entry(key).or_default();
        match list
            .iter_mut()
            .find(|(s, _)| text[*s - 1..*s - 1 + len] == text[start - 1..start - 1 + len])
        {
            Some(slot) => *slot = (start, value),
            None => list.push((start, value)),
        }
    }
}

/// Renames every phrase to a metasymbol with the default dense scheme.
pub fn metasymbolize(parsing: &Parsing, text: &Text) -> MetaText {
    metasymbolize_with(parsing, text, MetaIdScheme::Dense, 0).expect("dense ids cannot overflow")
}

/// Renames phrases to metasymbols. `field_bound` is only used by the flag-bit
/// scheme and must exceed every copy source and length.
pub fn metasymbolize_with(
    parsing: &Parsing,
    text: &Text,
    scheme: MetaIdScheme,
    field_bound: u64,
) -> Result<MetaText> {
    metasymbolize_owned(parsing.clone(), text, scheme, field_bound)
}

pub(crate) fn metasymbolize_owned(
    parsing: Parsing,
    text: &Text,
    scheme: MetaIdScheme,
    field_bound: u64,
) -> Result<MetaText> {
    let t = text.symbols();
    let mut boundaries = parsing.starts();
    boundaries.push(parsing.text_len() + 1);
    let phrases = parsing.into_phrases();
    let (ids, sigma, dictionary) = match scheme {
        MetaIdScheme::Dense => {
            let mut table = ContentTable::new(t);
            let mut dictionary = Vec::new();
            let ids = phrases
                .iter()
                .zip(&boundaries)
                .map(|(p, &start)| {
                    let len = p.len();
                    let hash = fingerprint(&t[start - 1..start - 1 + len]);
                    table.get(start, len, hash).unwrap_or_else(|| {
                        let id = dictionary.len() as Symbol;
                        dictionary.push((start, len));
                        table.set(start, len, hash, id);
                        id
                    })
                })
                .collect();
            let sigma = (dictionary.len() as u64).max(1);
            (ids, sigma, dictionary)
        }
        MetaIdScheme::FlagBit => {
            let codec = FlagBitCodec::new(text.sigma(), field_bound)?;
            let ids = phrases
                .iter()
                .zip(&boundaries)
                .enumerate()
                .map(|(index, (p, &start))| {
                    let mp = match *p {
                        Phrase::Literal(c) => MetaPhrase::Literal(c),
                        // Length-1 copies share the literal's name.
                        Phrase::Copy { len: 1, .. } => MetaPhrase::Literal(t[start - 1]),
                        Phrase::Copy { source, len } => MetaPhrase::Copy {
                            source: source as u64,
                            len: len as u64,
                        },
                    };
                    codec.encode(mp).map_err(|e| match e {
                        Error::Structural { reason, .. } => Error::structural(index, reason),
                        other => other,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (ids, codec.next_sigma(), Vec::new())
        }
    };
    Ok(MetaText {
        ids,
        sigma,
        dictionary,
        boundaries,
        phrases,
    })
}

/// Rewrites a parse of `meta.ids` as a parse of the underlying text.
///
/// A literal metaphrase becomes the phrase it names. A copy of metasymbols
/// `p..=q` becomes one copy whose source spans the phrases `p..=q`.
pub fn remap_metaparse(meta_parsing: &Parsing, meta: &MetaText) -> Result<Parsing> {
    let b = &meta.boundaries;
    if b.len() != meta.phrases.len() + 1 || meta_parsing.text_len() != meta.ids.len() {
        return Err(Error::structural(
            0,
            "meta parsing does not cover the metasymbol string",
        ));
    }
    let mut out = Vec::with_capacity(meta_parsing.len());
    for (index, (start, phrase)) in meta_parsing.iter_with_starts().enumerate() {
        match *phrase {
            Phrase::Literal(id) => {
                if meta.ids[start - 1] != id {
                    return Err(Error::structural(
                        index,
                        "literal metasymbol disagrees with the metasymbol string",
                    ));
                }
                out.push(meta.phrases[start - 1]);
            }
            Phrase::Copy { source, len } => {
                if source == 0 || source >= start {
                    return Err(Error::structural(
                        index,
                        "meta source must start before its phrase",
                    ));
                }
                let src_len = b[source - 1 + len] - b[source - 1];
                let dst_len = b[start - 1 + len] - b[start - 1];
                if src_len != dst_len {
                    return Err(Error::structural(
                        index,
                        format!("source spans {src_len} symbols but target spans {dst_len}"),
                    ));
                }
                out.push(Phrase::Copy {
                    source: b[source - 1],
                    len: dst_len,
                });
            }
        }
    }
    Ok(Parsing::new(out))
}

/// A phrase as seen by the flag-bit metasymbol mapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaPhrase {
    Literal(Symbol),
    Copy { source: u64, len: u64 },
}

/// Injective phrase-to-integer mapping with a leading flag bit.
///
/// Literal `c` is `0` followed by `c` in `ceil(log2 sigma_i)` bits. A copy is
/// `1` followed by source and length in `ceil(log2 field_bound)` bits each.
/// Codes of one iteration all have `width()` bits, so the alphabet of the next
/// iteration is `2^width()`; with a fixed `field_bound` the width grows by one
/// bit per iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlagBitCodec {
    symbol_bits: u32,
    field_bits: u32,
}

fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

impl FlagBitCodec {
    pub fn new(sigma: u64, field_bound: u64) -> Result<Self> {
        let codec = FlagBitCodec {
            symbol_bits: ceil_log2(sigma),
            field_bits: ceil_log2(field_bound),
        };
        if codec.width() > 63 {
            return Err(Error::structural(
                0,
                format!("metasymbol width {} exceeds 63 bits", codec.width()),
            ));
        }
        Ok(codec)
    }

    /// Bits per code, flag included.
    pub fn width(&self) -> u32 {
        1 + self.symbol_bits.max(2 * self.field_bits)
    }

    /// Alphabet size of the produced codes.
    pub fn next_sigma(&self) -> u64 {
        1u64 << self.width()
    }

    pub fn encode(&self, phrase: MetaPhrase) -> Result<u64> {
        let flag = 1u64 << (self.width() - 1);
        let fits = |v: u64, bits: u32| bits >= 64 || v >> bits == 0;
        match phrase {
            MetaPhrase::Literal(c) if fits(c, self.symbol_bits) => Ok(c),
            MetaPhrase::Copy { source, len }
                if fits(source, self.field_bits) && fits(len, self.field_bits) =>
            {
                Ok(flag | (source << self.field_bits) | len)
            }
            _ => Err(Error::structural(
                0,
                format!("{phrase:?} overflows its metasymbol field"),
            )),
        }
    }

    pub fn decode(&self, code: u64) -> Result<MetaPhrase> {
        let flag = 1u64 << (self.width() - 1);
        if code >> self.width() != 0 {
            return Err(Error::structural(
                0,
                format!("code {code} wider than {} bits", self.width()),
            ));
        }
        if code & flag == 0 {
            if code >> self.symbol_bits != 0 {
                return Err(Error::structural(
                    0,
                    format!("literal code {code} overflows symbol field"),
                ));
            }
            return Ok(MetaPhrase::Literal(code));
        }
        let mask = (1u64 << self.field_bits) - 1;
        let body = code & !flag;
        if body >> (2 * self.field_bits) != 0 {
            return Err(Error::structural(
                0,
                format!("copy code {code} has stray high bits"),
            ));
        }
        Ok(MetaPhrase::Copy {
            source: (body >> self.field_bits) & mask,
            len: body & mask,
        })
    }
}
