use crate::error::{Error, Result};

/// One symbol of a text: a byte value or a metasymbol id.
pub type Symbol = u64;

/// An immutable symbol sequence over the integer alphabet `0..sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Text {
    symbols: Vec<Symbol>,
    sigma: u64,
}

impl Text {
    /// Builds a text, checking every symbol against the alphabet bound.
    pub fn new(symbols: Vec<Symbol>, sigma: u64) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::usage("alphabet size must be at least 1"));
        }
        if let Some(pos) = symbols.iter().position(|&s| s >= sigma) {
            return Err(Error::usage(format!(
                "symbol {} at position {} is outside alphabet of size {}",
                symbols[pos],
                pos + 1,
                sigma
            )));
        }
        Ok(Text { symbols, sigma })
    }

    /// A text over the byte alphabet (`sigma = 256`).
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Text {
            symbols: bytes.iter().map(|&b| b as Symbol).collect(),
            sigma: 256,
        }
    }

    /// The text with `sigma` lowered to `max symbol + 1` (at least 1).
    pub fn with_tight_sigma(symbols: Vec<Symbol>) -> Self {
        let sigma = symbols.iter().max().map_or(1, |&m| m + 1);
        Text { symbols, sigma }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of distinct symbols that actually occur.
    pub fn distinct_symbols(&self) -> usize {
        let mut seen = self.symbols.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Converts back to bytes; fails if any symbol exceeds 255.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                u8::try_from(s).map_err(|_| {
                    Error::usage(format!("symbol {s} at position {} is not a byte", i + 1))
                })
            })
            .collect()
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }
}

impl AsRef<[Symbol]> for Text {
    fn as_ref(&self) -> &[Symbol] {
        &self.symbols
    }
}
