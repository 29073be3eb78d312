//! Rightmost source reassignment and the on-disk container.
//!
//! Container layout, all integers little-endian:
//!
//! | bytes | field                                   |
//! |-------|-----------------------------------------|
//! | 0..5  | magic `"ReLZ"` followed by version `0x01` |
//! | 5..13 | `n`, text length (u64)                  |
//! | 13..17| `sigma`, alphabet size (u32)            |
//! | 17    | encoder id: 0 gamma, 1 delta, 2 fixed   |
//! | 18..  | phrase bitstream                        |
//!
//! The bitstream is MSB-first within each byte and zero-padded to a byte.
//! Each phrase starts with a flag bit. A literal (`0`) is followed by its
//! symbol in `ceil(log2 sigma)` bits. A copy (`1`) is followed by the
//! distance `d = start - source >= 1` and the length, each written with the
//! selected integer code. The fixed-width code spends `bits(n)` bits per
//! value, where `bits(n)` is the bit length of `n`.

mod bits;
pub mod codes;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use bits::{BitReader, BitWriter};
use codes::{delta_len, gamma_len, read_delta, read_gamma, write_delta, write_gamma};

use crate::error::{Error, Result};
use crate::meta::{fingerprint, ContentTable};
use crate::parsing::{expand_parsing, Parsing, Phrase};
use crate::text::{Symbol, Text};

pub const MAGIC: [u8; 5] = *b"ReLZ\x01";
pub const HEADER_LEN: usize = 18;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoder {
    #[default]
    Gamma,
    Delta,
    Fixed,
}

impl Encoder {
    pub const ALL: [Encoder; 3] = [Encoder::Gamma, Encoder::Delta, Encoder::Fixed];

    pub fn id(self) -> u8 {
        match self {
            Encoder::Gamma => 0,
            Encoder::Delta => 1,
            Encoder::Fixed => 2,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Encoder::ALL.into_iter().find(|e| e.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            Encoder::Gamma => "gamma",
            Encoder::Delta => "delta",
            Encoder::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Encoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Encoder::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                Error::usage(format!(
                    "unknown encoder {s:?}; expected gamma, delta or fixed"
                ))
            })
    }
}

/// Bits needed to write `x` in binary (`bits(0) = 0`).
fn bit_length(x: u64) -> u32 {
    64 - x.leading_zeros()
}

fn literal_bits(sigma: u64) -> u32 {
    if sigma <= 1 {
        0
    } else {
        bit_length(sigma - 1)
    }
}

/// Points every copy at the closest preceding phrase with identical content
/// when that is closer than its current source. Boundaries are untouched.
pub fn rightmost_reassign(parsing: &Parsing, text: &Text) -> Parsing {
    let t = text.symbols();
    let mut latest: ContentTable<'_, usize> = ContentTable::new(t);
    let mut out = Vec::with_capacity(parsing.len());
    for (start, phrase) in parsing.iter_with_starts() {
        let len = phrase.len();
        let hash = fingerprint(&t[start - 1..start - 1 + len]);
        out.push(match *phrase {
            Phrase::Copy { source, len } => match latest.get(start, len, hash) {
                Some(p) if p > source => Phrase::Copy { source: p, len },
                _ => Phrase::Copy { source, len },
            },
            lit => lit,
        });
        latest.set(start, len, hash, start);
    }
    Parsing::new(out)
}

/// A compressed text: header fields plus the phrase bitstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedBlob {
    pub n: u64,
    pub sigma: u32,
    pub encoder: Encoder,
    pub payload: Vec<u8>,
}

impl EncodedBlob {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.sigma.to_le_bytes());
        out.push(self.encoder.id());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() || bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::corrupt(0, "bad magic"));
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::corrupt(bytes.len() as u64 * 8, "truncated header"));
        }
        let n = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
        let sigma = u32::from_le_bytes(bytes[13..17].try_into().unwrap());
        let encoder = Encoder::from_id(bytes[17])
            .ok_or_else(|| Error::corrupt(17 * 8, "unknown encoder id"))?;
        if sigma == 0 {
            return Err(Error::corrupt(13 * 8, "alphabet size zero"));
        }
        Ok(EncodedBlob {
            n,
            sigma,
            encoder,
            payload: bytes[HEADER_LEN..].to_vec(),
        })
    }
}

fn check_sigma(sigma: u64) -> Result<u32> {
    if sigma == 0 {
        return Err(Error::structural(0, "alphabet size zero"));
    }
    u32::try_from(sigma)
        .map_err(|_| Error::structural(0, format!("alphabet size {sigma} does not fit the header")))
}

/// Exact payload size in bits of `parsing` as given (no reassignment).
pub fn encoded_size_bits(parsing: &Parsing, sigma: u64, encoder: Encoder) -> u64 {
    let lit = 1 + literal_bits(sigma) as u64;
    let fixed = bit_length(parsing.text_len() as u64) as u64;
    parsing
        .iter_with_starts()
        .map(|(start, phrase)| match *phrase {
            Phrase::Literal(_) => lit,
            Phrase::Copy { source, len } => {
                let d = (start - source) as u64;
                let len = len as u64;
                1 + match encoder {
                    Encoder::Gamma => gamma_len(d) + gamma_len(len),
                    Encoder::Delta => delta_len(d) + delta_len(len),
                    Encoder::Fixed => 2 * fixed,
                }
            }
        })
        .sum()
}

/// Encodes a parsing after rightmost reassignment.
pub fn encode(parsing: &Parsing, sigma: u64, encoder: Encoder) -> Result<EncodedBlob> {
    check_sigma(sigma)?;
    let text = expand_parsing(parsing, sigma)?;
    encode_raw(&rightmost_reassign(parsing, &text), sigma, encoder)
}

/// Encodes a parsing with its sources exactly as given.
pub fn encode_raw(parsing: &Parsing, sigma: u64, encoder: Encoder) -> Result<EncodedBlob> {
    let sigma32 = check_sigma(sigma)?;
    let lit_bits = literal_bits(sigma);
    let fixed = bit_length(parsing.text_len() as u64);
    let mut w = BitWriter::new();
    for (index, (start, phrase)) in parsing.iter_with_starts().enumerate() {
        match *phrase {
            Phrase::Literal(c) => {
                if c >= sigma {
                    return Err(Error::structural(
                        index,
                        format!("literal {c} outside alphabet of size {sigma}"),
                    ));
                }
                w.write_bit(false);
                w.write(c, lit_bits);
            }
            Phrase::Copy { source, len } => {
                if len == 0 || source == 0 || source >= start {
                    return Err(Error::structural(
                        index,
                        "copy must have a positive length and an earlier source",
                    ));
                }
                let d = (start - source) as u64;
                w.write_bit(true);
                match encoder {
                    Encoder::Gamma => {
                        write_gamma(&mut w, d)?;
                        write_gamma(&mut w, len as u64)?;
                    }
                    Encoder::Delta => {
                        write_delta(&mut w, d)?;
                        write_delta(&mut w, len as u64)?;
                    }
                    Encoder::Fixed => {
                        w.write(d, fixed);
                        w.write(len as u64, fixed);
                    }
                }
            }
        }
    }
    Ok(EncodedBlob {
        n: parsing.text_len() as u64,
        sigma: sigma32,
        encoder,
        payload: w.finish(),
    })
}

/// Decodes a blob in one left-to-right pass.
pub fn decode(blob: &EncodedBlob) -> Result<Text> {
    let n = usize::try_from(blob.n)
        .map_err(|_| Error::corrupt(5 * 8, "text length does not fit memory"))?;
    let sigma = blob.sigma as u64;
    let lit_bits = literal_bits(sigma);
    let fixed = bit_length(blob.n);
    let header_bits = HEADER_LEN as u64 * 8;
    let at = |r: &BitReader<'_>| header_bits + r.position();
    let shift = |e: Error| match e {
        Error::Corrupt { bit_offset, reason } => Error::Corrupt {
            bit_offset: bit_offset + header_bits,
            reason,
        },
        other => other,
    };

    // A phrase costs at least one bit, so a sane stream bounds the output.
    let mut out: Vec<Symbol> = Vec::with_capacity(n.min(blob.payload.len().saturating_mul(8 * 64)));
    let mut r = BitReader::new(&blob.payload);
    while out.len() < n {
        let pos = at(&r);
        if r.read_bit().map_err(shift)? {
            let (d, len) = match blob.encoder {
                Encoder::Gamma => (read_gamma(&mut r), read_gamma(&mut r)),
                Encoder::Delta => (read_delta(&mut r), read_delta(&mut r)),
                Encoder::Fixed => (r.read(fixed), r.read(fixed)),
            };
            let (d, len) = (d.map_err(shift)?, len.map_err(shift)?);
            if d == 0 || d > out.len() as u64 {
                return Err(Error::corrupt(
                    pos,
                    format!("copy distance {d} reaches before the text start"),
                ));
            }
            if len == 0 || len > (n - out.len()) as u64 {
                return Err(Error::corrupt(
                    pos,
                    format!("copy length {len} overruns the text"),
                ));
            }
            let from = out.len() - d as usize;
            let len = len as usize;
            if len <= d as usize {
                out.extend_from_within(from..from + len);
            } else {
                for k in 0..len {
                    let c = out[from + k];
                    out.push(c);
                }
            }
        } else {
            let c = r.read(lit_bits).map_err(shift)?;
            if c >= sigma {
                return Err(Error::corrupt(
                    pos,
                    format!("literal {c} outside alphabet of size {sigma}"),
                ));
            }
            out.push(c);
        }
    }
    let rest = r.remaining();
    if rest >= 8 {
        return Err(Error::corrupt(
            at(&r),
            "trailing bytes after the last phrase",
        ));
    }
    if r.read(rest as u32).map_err(shift)? != 0 {
        return Err(Error::corrupt(at(&r) - rest, "nonzero padding"));
    }
    Text::new(out, sigma)
}

/// Parses and decodes a serialized container.
pub fn decompress(bytes: &[u8]) -> Result<Text> {
    decode(&EncodedBlob::from_bytes(bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::lz_parse;
    use crate::parsing::verify_parsing;
    use crate::rlz::rlz_pref_parse;
    use proptest::prelude::*;

    fn lit(c: char) -> Phrase {
        Phrase::Literal(c as Symbol)
    }

    fn ababab() -> (Parsing, Text) {
        let p = Parsing::new(vec![
            lit('a'),
            lit('b'),
            Phrase::Copy { source: 1, len: 2 },
            Phrase::Copy { source: 1, len: 2 },
        ]);
        (p, Text::from_bytes(b"ababab"))
    }

    #[test]
    fn rightmost_picks_closest_equal_phrase() {
        let (p, text) = ababab();
        let r = rightmost_reassign(&p, &text);
        assert_eq!(r.phrases()[3], Phrase::Copy { source: 3, len: 2 });
        assert_eq!(r.phrases()[2], Phrase::Copy { source: 1, len: 2 });
        assert!(verify_parsing(&r, &text).is_ok());
        assert_eq!(rightmost_reassign(&r, &text), r);
        assert!(
            encoded_size_bits(&r, 256, Encoder::Gamma) < encoded_size_bits(&p, 256, Encoder::Gamma)
        );
    }

    #[test]
    fn rightmost_leaves_distinct_phrases() {
        let text = Text::from_bytes(b"abcabx");
        let p = lz_parse(&text);
        assert_eq!(rightmost_reassign(&p, &text), p);
    }

    #[test]
    fn rightmost_keeps_closer_parser_source() {
        // "ab" at 7 has an equal phrase at 1, but the parser source 5 is closer.
        let text = Text::from_bytes(b"abxyabab");
        let p = Parsing::new(vec![
            lit('a'),
            lit('b'),
            lit('x'),
            lit('y'),
            Phrase::Copy { source: 1, len: 1 },
            lit('b'),
            Phrase::Copy { source: 5, len: 2 },
        ]);
        assert!(verify_parsing(&p, &text).is_ok());
        let r = rightmost_reassign(&p, &text);
        assert_eq!(r.phrases()[6], Phrase::Copy { source: 5, len: 2 });
        assert_eq!(r.phrases()[4], Phrase::Copy { source: 1, len: 1 });
    }

    #[test]
    fn two_symbol_example_is_bit_exact() {
        // "aa" over {a=0, b=1}: literal 0, copy d=1 len=1 -> bits 0 0 1 1 1.
        let p = Parsing::new(vec![Phrase::Literal(0), Phrase::Copy { source: 1, len: 1 }]);
        assert_eq!(encoded_size_bits(&p, 2, Encoder::Gamma), 5);
        let blob = encode(&p, 2, Encoder::Gamma).unwrap();
        assert_eq!(blob.payload, [0b0011_1000]);
        let bytes = blob.to_bytes();
        assert_eq!(&bytes[..5], b"ReLZ\x01");
        assert_eq!(&bytes[5..13], &2u64.to_le_bytes());
        assert_eq!(&bytes[13..17], &2u32.to_le_bytes());
        assert_eq!(bytes[17], 0);
        assert_eq!(bytes.len(), HEADER_LEN + 1);
        assert_eq!(decompress(&bytes).unwrap().symbols(), [0, 0]);
    }

    #[test]
    fn empty_text_is_header_only() {
        let blob = encode(&Parsing::default(), 256, Encoder::Gamma).unwrap();
        assert!(blob.payload.is_empty());
        assert_eq!(blob.to_bytes().len(), HEADER_LEN);
        assert_eq!(
            encoded_size_bits(&Parsing::default(), 256, Encoder::Delta),
            0
        );
        assert!(decompress(&blob.to_bytes()).unwrap().is_empty());
    }

    #[test]
    fn encode_errors() {
        let p = Parsing::new(vec![Phrase::Literal(5)]);
        assert!(matches!(
            encode_raw(&p, 4, Encoder::Gamma),
            Err(Error::Structural { .. })
        ));
        assert!(matches!(
            encode_raw(&p, 0, Encoder::Gamma),
            Err(Error::Structural { .. })
        ));
        assert!(encode(&p, 1 << 40, Encoder::Gamma).is_err());
    }

    #[test]
    fn corrupt_inputs() {
        let text = Text::from_bytes(b"abracadabra abracadabra");
        let bytes = encode(&lz_parse(&text), 256, Encoder::Gamma)
            .unwrap()
            .to_bytes();

        let mut bad = bytes.clone();
        bad[..5].copy_from_slice(b"XXXXX");
        assert!(matches!(
            decompress(&bad),
            Err(Error::Corrupt { bit_offset: 0, .. })
        ));

        for cut in [3, HEADER_LEN - 1, HEADER_LEN, bytes.len() - 1] {
            assert!(
                matches!(decompress(&bytes[..cut]), Err(Error::Corrupt { .. })),
                "cut {cut}"
            );
        }

        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(decompress(&extra), Err(Error::Corrupt { .. })));

        let mut pad = bytes.clone();
        *pad.last_mut().unwrap() |= 1;
        // Either the padding or a decoded field changed; it must not decode silently.
        assert!(decompress(&pad).map(|t| t != text).unwrap_or(true));

        let mut enc = bytes.clone();
        enc[17] = 9;
        assert!(decompress(&enc).is_err());
    }

    #[test]
    fn copy_before_start_is_corrupt() {
        let p = Parsing::new(vec![Phrase::Literal(0)]);
        let mut blob = encode_raw(&p, 2, Encoder::Gamma).unwrap();
        // flag 1, d = 2 (010), len = 1 (1)
        blob.n = 2;
        blob.payload = vec![0b0010_1010];
        assert!(matches!(decode(&blob), Err(Error::Corrupt { .. })));
    }

    #[test]
    fn sigma_one_literals_take_one_bit() {
        let text = Text::new(vec![0; 5], 1).unwrap();
        let p = lz_parse(&text);
        let blob = encode(&p, 1, Encoder::Fixed).unwrap();
        assert_eq!(decode(&blob).unwrap(), text);
        assert_eq!(encoded_size_bits(&p, 1, Encoder::Fixed), 1 + 1 + 2 * 3);
    }

    proptest! {
        #[test]
        fn roundtrip_and_monotone(sigma in 1u64..=4, raw in proptest::collection::vec(any::<u64>(), 0..200), frac in 0.0f64..=1.0) {
            let text = Text::new(raw.into_iter().map(|s| s % sigma).collect(), sigma).unwrap();
            let ell = (frac * text.len() as f64) as usize;
            let p = rlz_pref_parse(&text, ell).unwrap();
            let r = rightmost_reassign(&p, &text);
            prop_assert_eq!(r.shape(), p.shape());
            prop_assert!(verify_parsing(&r, &text).is_ok());
            prop_assert_eq!(rightmost_reassign(&r, &text), r.clone());
            for enc in Encoder::ALL {
                let blob = encode(&p, sigma, enc).unwrap();
                prop_assert_eq!(decode(&blob).unwrap(), text.clone());
                let bits = encoded_size_bits(&r, sigma, enc);
                prop_assert_eq!(bits.div_ceil(8), blob.payload.len() as u64);
                prop_assert!(bits <= encoded_size_bits(&p, sigma, enc));
                prop_assert_eq!(encode(&p, sigma, enc).unwrap(), blob);
            }
        }

        #[test]
        fn size_is_additive(sigma in 2u64..=4, raw in proptest::collection::vec(any::<u64>(), 1..100), cut in 0usize..100) {
            let text = Text::new(raw.into_iter().map(|s| s % sigma).collect(), sigma).unwrap();
            let p = lz_parse(&text);
            let cut = cut % (p.len() + 1);
            let bits_of = |phrases: Vec<Phrase>| {
                // Sizes of a slice of phrases, using their original starts.
                let starts = p.starts();
                phrases.iter().zip(&starts).map(|(ph, &s)| match *ph {
                    Phrase::Literal(_) => 1 + literal_bits(sigma) as u64,
                    Phrase::Copy { source, len } => 1 + gamma_len((s - source) as u64) + gamma_len(len as u64),
                }).sum::<u64>()
            };
            let total = encoded_size_bits(&p, sigma, Encoder::Gamma);
            let head = bits_of(p.phrases()[..cut].to_vec());
            let starts = p.starts();
            let tail: u64 = p.phrases()[cut..].iter().zip(&starts[cut..]).map(|(ph, &s)| match *ph {
                Phrase::Literal(_) => 1 + literal_bits(sigma) as u64,
                Phrase::Copy { source, len } => 1 + gamma_len((s - source) as u64) + gamma_len(len as u64),
            }).sum();
            prop_assert_eq!(total, head + tail);
        }
    }
}
