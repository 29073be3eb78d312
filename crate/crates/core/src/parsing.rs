//! Phrases, parsings and their decoding semantics.
//!
//! A [`Parsing`] is an ordered list of phrases. Copy sources are 1-based text
//! positions and must start strictly before the phrase they feed, which makes
//! left-to-right decoding possible. Sources may overlap their own phrase.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::text::{Symbol, Text};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phrase {
    /// A single symbol emitted verbatim.
    Literal(Symbol),
    /// `len` symbols copied from the 1-based position `source`.
    Copy { source: usize, len: usize },
}

impl Phrase {
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        match *self {
            Phrase::Literal(_) => 1,
            Phrase::Copy { len, .. } => len,
        }
    }

    pub fn is_copy(&self) -> bool {
        matches!(self, Phrase::Copy { .. })
    }
}

/// An ordered phrase sequence covering `text_len` symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Parsing {
    phrases: Vec<Phrase>,
    text_len: usize,
}

impl Parsing {
    pub fn new(phrases: Vec<Phrase>) -> Self {
        let text_len = phrases.iter().map(Phrase::len).sum();
        Parsing { phrases, text_len }
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    pub fn into_phrases(self) -> Vec<Phrase> {
        self.phrases
    }

    /// Number of phrases (`z` for LZ, `ẑ` for ReLZ).
    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn text_len(&self) -> usize {
        self.text_len
    }

    /// 1-based start position of every phrase.
    pub fn starts(&self) -> Vec<usize> {
        let mut pos = 1;
        self.phrases
            .iter()
            .map(|p| {
                let start = pos;
                pos += p.len();
                start
            })
            .collect()
    }

    /// Phrases with their 1-based start positions.
    pub fn iter_with_starts(&self) -> impl Iterator<Item = (usize, &Phrase)> + '_ {
        let mut pos = 1;
        self.phrases.iter().map(move |p| {
            let start = pos;
            pos += p.len();
            (start, p)
        })
    }

    /// Phrase boundaries and literal/copy kinds, ignoring copy sources.
    pub fn shape(&self) -> Vec<(bool, usize)> {
        self.phrases
            .iter()
            .map(|p| (p.is_copy(), p.len()))
            .collect()
    }
}

impl FromIterator<Phrase> for Parsing {
    fn from_iter<I: IntoIterator<Item = Phrase>>(iter: I) -> Self {
        Parsing::new(iter.into_iter().collect())
    }
}

/// Decodes a parsing. Copies are resolved symbol by symbol, so a source may
/// overlap the phrase it produces.
pub fn expand_parsing(parsing: &Parsing, sigma: u64) -> Result<Text> {
    let mut out: Vec<Symbol> = Vec::with_capacity(parsing.text_len());
    for (index, phrase) in parsing.phrases().iter().enumerate() {
        match *phrase {
            Phrase::Literal(c) => {
                if c >= sigma {
                    return Err(Error::structural(
                        index,
                        format!("literal {c} outside alphabet of size {sigma}"),
                    ));
                }
                out.push(c);
            }
            Phrase::Copy { source, len } => {
                let start = out.len() + 1;
                if len == 0 {
                    return Err(Error::structural(index, "copy of length zero"));
                }
                if source == 0 || source >= start {
                    return Err(Error::structural(
                        index,
                        format!("source {source} must start before phrase at {start}"),
                    ));
                }
                let from = source - 1;
                if from + len <= out.len() {
                    out.extend_from_within(from..from + len);
                } else {
                    for k in 0..len {
                        let c = out[from + k];
                        out.push(c);
                    }
                }
            }
        }
    }
    Text::new(out, sigma)
}

/// First point where a parsing disagrees with a text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 0-based index of the offending phrase.
    pub phrase: usize,
    /// 1-based text position of the first offending symbol.
    pub position: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    ZeroLength,
    SourceNotBefore { source: usize },
    SymbolOutOfAlphabet { symbol: Symbol },
    Mismatch,
    LengthMismatch { parsed: usize, text: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::ZeroLength => write!(f, "phrase {} has length zero", self.phrase),
            ViolationKind::SourceNotBefore { source } => write!(
                f,
                "phrase {}: source must start before phrase (source {}, phrase at {})",
                self.phrase, source, self.position
            ),
            ViolationKind::SymbolOutOfAlphabet { symbol } => {
                write!(
                    f,
                    "phrase {}: symbol {} outside alphabet",
                    self.phrase, symbol
                )
            }
            ViolationKind::Mismatch => write!(
                f,
                "phrase {}: mismatch at position {}",
                self.phrase, self.position
            ),
            ViolationKind::LengthMismatch { parsed, text } => {
                write!(f, "parsing covers {parsed} symbols but text has {text}")
            }
        }
    }
}

/// Checks that `parsing` is an LZ-like parsing of `text`.
///
/// Every phrase is compared against the text itself, which is equivalent to
/// comparing against the expansion once all earlier phrases matched.
pub fn verify_parsing(parsing: &Parsing, text: &Text) -> std::result::Result<(), Violation> {
    let t = text.symbols();
    let mut pos = 0usize;
    for (index, phrase) in parsing.phrases().iter().enumerate() {
        let violation = |position: usize, kind| Violation {
            phrase: index,
            position,
            kind,
        };
        match *phrase {
            Phrase::Literal(c) => {
                if c >= text.sigma() {
                    return Err(violation(
                        pos + 1,
                        ViolationKind::SymbolOutOfAlphabet { symbol: c },
                    ));
                }
                if pos >= t.len() || t[pos] != c {
                    return Err(violation(pos + 1, ViolationKind::Mismatch));
                }
                pos += 1;
            }
            Phrase::Copy { source, len } => {
                if len == 0 {
                    return Err(violation(pos + 1, ViolationKind::ZeroLength));
                }
                if source == 0 || source > pos {
                    return Err(violation(
                        pos + 1,
                        ViolationKind::SourceNotBefore { source },
                    ));
                }
                for k in 0..len {
                    if pos + k >= t.len() || t[source - 1 + k] != t[pos + k] {
                        return Err(violation(pos + k + 1, ViolationKind::Mismatch));
                    }
                }
                pos += len;
            }
        }
    }
    if pos != t.len() {
        return Err(Violation {
            phrase: parsing.len(),
            position: pos + 1,
            kind: ViolationKind::LengthMismatch {
                parsed: pos,
                text: t.len(),
            },
        });
    }
    Ok(())
}

/// Writes the debug dump: one phrase per line, `L <symbol>` or
/// `C <source_offset> <length>` with a 0-based source offset.
pub fn write_dump<W: Write>(parsing: &Parsing, mut out: W) -> std::io::Result<()> {
    for phrase in parsing.phrases() {
        match *phrase {
            Phrase::Literal(c) => writeln!(out, "L {c}")?,
            Phrase::Copy { source, len } => writeln!(out, "C {} {}", source - 1, len)?,
        }
    }
    Ok(())
}

/// Reads a dump written by [`write_dump`]. Blank lines are skipped.
pub fn read_dump<R: BufRead>(input: R) -> Result<Parsing> {
    let mut phrases = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::usage(format!("dump line {}: cannot parse {:?}", lineno + 1, line));
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        match fields.as_slice() {
            [] => continue,
            ["L", c] => phrases.push(Phrase::Literal(num(c)?)),
            ["C", off, len] => phrases.push(Phrase::Copy {
                source: num(off)? as usize + 1,
                len: num(len)? as usize,
            }),
            _ => return Err(bad()),
        }
    }
    Ok(Parsing::new(phrases))
}
