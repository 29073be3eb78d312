//! Empirical entropy and encoded-size reports.

use std::fmt;

use serde::Serialize;

use crate::coder::{encoded_size_bits, rightmost_reassign, Encoder};
use crate::error::{Error, Result};
use crate::parsing::Parsing;
use crate::text::{Symbol, Text};

/// Zeroth-order empirical entropy in bits per character.
pub fn h0(text: &Text) -> Result<f64> {
    if text.is_empty() {
        return Err(Error::usage("entropy of an empty text is undefined"));
    }
    Ok(h0_of(text.symbols()))
}

fn h0_of(symbols: &[Symbol]) -> f64 {
    let mut sorted = symbols.to_vec();
    sorted.sort_unstable();
    h0_sorted(&sorted)
}

fn h0_sorted(sorted: &[Symbol]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .chunk_by(|a, b| a == b)
        .map(|run| {
            let c = run.len() as f64;
            c / n * (n / c).log2()
        })
        .sum()
}

/// Order-`k` empirical entropy: the `H_0` of the symbols following each
/// length-`k` context, weighted by context frequency and normalized by `n`.
/// Contexts are the k-grams starting at positions `1..=n-k`.
pub fn hk(text: &Text, k: usize) -> Result<f64> {
    let t = text.symbols();
    if t.is_empty() {
        return Err(Error::usage("entropy of an empty text is undefined"));
    }
    if k == 0 {
        return Ok(h0_of(t));
    }
    if k >= t.len() {
        return Err(Error::usage(format!(
            "context order {k} must be below the text length {}",
            t.len()
        )));
    }
    // Positions sorted by (context, following symbol).
    let mut pos: Vec<usize> = (0..t.len() - k).collect();
    pos.sort_unstable_by(|&a, &b| t[a..=a + k].cmp(&t[b..=b + k]));
    let n = t.len() as f64;
    let mut total = 0.0;
    let mut follow = Vec::new();
    for group in pos.chunk_by(|&a, &b| t[a..a + k] == t[b..b + k]) {
        follow.clear();
        follow.extend(group.iter().map(|&p| t[p + k]));
        total += follow.len() as f64 / n * h0_sorted(&follow);
    }
    Ok(total)
}

/// Encoded size of one parsing under one encoder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EncodedSize {
    pub encoder: Encoder,
    pub bits: u64,
    pub bpc: f64,
    pub rightmost_bits: u64,
    pub rightmost_bpc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub n: usize,
    pub sigma: u64,
    /// `H_0 ..= H_k` in bits per character.
    pub h: Vec<f64>,
    pub encoded: Vec<EncodedSize>,
    pub phrase_count: usize,
    pub phrase_bound: u64,
    /// Exact LZ phrase count, when computed.
    pub z: Option<usize>,
    pub ratio: Option<f64>,
}

impl EntropyReport {
    pub fn with_lz(mut self, z: usize) -> Self {
        self.z = Some(z);
        self.ratio = (z > 0).then(|| self.phrase_count as f64 / z as f64);
        self
    }

    pub fn within_bound(&self) -> bool {
        self.phrase_count as u64 <= self.phrase_bound
    }

    /// Whether `log2 sigma >= H_0 >= H_1 >= ...` holds within `tol`.
    pub fn monotone(&self, tol: f64) -> bool {
        let top = (self.sigma.max(1) as f64).log2();
        self.h.first().is_none_or(|&h| h <= top + tol)
            && self.h.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

impl fmt::Display for EntropyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n\t{}", self.n)?;
        writeln!(f, "sigma\t{}", self.sigma)?;
        for (k, h) in self.h.iter().enumerate() {
            writeln!(f, "H_{k}\t{h:.6}")?;
        }
        writeln!(f, "phrases\t{}", self.phrase_count)?;
        writeln!(f, "phrase_bound\t{}", self.phrase_bound)?;
        if let Some(z) = self.z {
            writeln!(f, "z\t{z}")?;
        }
        if let Some(r) = self.ratio {
            writeln!(f, "ratio\t{r:.6}")?;
        }
        for e in &self.encoded {
            writeln!(f, "bits_{}\t{}", e.encoder, e.bits)?;
            writeln!(f, "bpc_{}\t{:.6}", e.encoder, e.bpc)?;
            writeln!(f, "bits_{}_rightmost\t{}", e.encoder, e.rightmost_bits)?;
            writeln!(f, "bpc_{}_rightmost\t{:.6}", e.encoder, e.rightmost_bpc)?;
        }
        Ok(())
    }
}

/// `ceil(9 n / log_sigma n)` with `sigma` the number of distinct symbols
/// (at least 2). Texts shorter than 2 are bounded by their length.
pub fn phrase_bound(text: &Text) -> u64 {
    let n = text.len();
    if n < 2 {
        return n as u64;
    }
    let sigma = text.distinct_symbols().max(2) as f64;
    let n = n as f64;
    (9.0 * n * sigma.log2() / n.log2()).ceil() as u64
}

/// Entropy and encoded-size report for `parsing`, which must parse `text`.
/// Orders above `n - 1` are left out.
pub fn audit(
    text: &Text,
    parsing: &Parsing,
    encoders: &[Encoder],
    max_k: usize,
) -> Result<EntropyReport> {
    let n = text.len();
    let h = if n == 0 {
        Vec::new()
    } else {
        (0..=max_k.min(n - 1))
            .map(|k| hk(text, k))
            .collect::<Result<_>>()?
    };
    let rightmost = rightmost_reassign(parsing, text);
    let per_char = |bits: u64| if n == 0 { 0.0 } else { bits as f64 / n as f64 };
    let encoded = encoders
        .iter()
        .map(|&encoder| {
            let bits = encoded_size_bits(parsing, text.sigma(), encoder);
            let rightmost_bits = encoded_size_bits(&rightmost, text.sigma(), encoder);
            EncodedSize {
                encoder,
                bits,
                bpc: per_char(bits),
                rightmost_bits,
                rightmost_bpc: per_char(rightmost_bits),
            }
        })
        .collect();
    Ok(EntropyReport {
        n,
        sigma: text.sigma(),
        h,
        encoded,
        phrase_count: parsing.len(),
        phrase_bound: phrase_bound(text),
        z: None,
        ratio: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::lz_parse;
    use crate::rlz::rlz_pref_parse;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn t(s: &str) -> Text {
        Text::from_bytes(s.as_bytes())
    }

    /// Context dictionary: every context maps to the string of its followers.
    fn hk_oracle(text: &[Symbol], k: usize) -> f64 {
        let mut followers: HashMap<&[Symbol], Vec<Symbol>> = HashMap::new();
        for i in 0..text.len() - k {
            followers
                .entry(&text[i..i + k])
                .or_default()
                .push(text[i + k]);
        }
        let n = text.len() as f64;
        followers
            .values()
            .map(|f| {
                let mut counts: HashMap<Symbol, usize> = HashMap::new();
                for &c in f {
                    *counts.entry(c).or_default() += 1;
                }
                let m = f.len() as f64;
                let h: f64 = counts
                    .values()
                    .map(|&c| c as f64 / m * (m / c as f64).log2())
                    .sum();
                m / n * h
            })
            .sum()
    }

    #[test]
    fn h0_examples() {
        assert_eq!(h0(&t("aaaa")).unwrap(), 0.0);
        assert_eq!(h0(&t("ab")).unwrap(), 1.0);
        let expected = 2.0 / 3.0 * (1.5f64).log2() + 1.0 / 3.0 * 3f64.log2();
        assert!((h0(&t("aac")).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.918296).abs() < 1e-6);
        assert!(matches!(h0(&t("")), Err(Error::Usage(_))));
    }

    #[test]
    fn hk_examples() {
        assert_eq!(hk(&t("abab"), 1).unwrap(), 0.0);
        let text = t("abababc");
        assert_eq!(hk(&text, 0).unwrap(), h0(&text).unwrap());
        // Context "ab" is followed by a, a, c.
        let followers: Vec<u8> = (0..5)
            .filter(|&i| &b"abababc"[i..i + 2] == b"ab")
            .map(|i| b"abababc"[i + 2])
            .collect();
        assert_eq!(followers, b"aac");
        assert!((hk_oracle(text.symbols(), 2) - hk(&text, 2).unwrap()).abs() < 1e-12);
        assert!(hk(&text, 7).is_err());
    }

    #[test]
    fn report_contents() {
        let text = t("abababcabababc");
        let p = rlz_pref_parse(&text, 3).unwrap();
        let r = audit(&text, &p, &Encoder::ALL, 3)
            .unwrap()
            .with_lz(lz_parse(&text).len());
        assert_eq!(r.h.len(), 4);
        assert!(r.monotone(1e-9));
        assert!(r.within_bound());
        for e in &r.encoded {
            assert!(e.rightmost_bits <= e.bits);
        }
        let shown = r.to_string();
        assert!(
            shown.contains("H_0\t")
                && shown.contains("bpc_delta_rightmost\t")
                && shown.contains("ratio\t")
        );
    }

    proptest! {
        #[test]
        fn hk_matches_oracle(sigma in 1u64..=4, raw in proptest::collection::vec(any::<u64>(), 1..300), k in 0usize..=4) {
            let text = Text::new(raw.into_iter().map(|s| s % sigma).collect(), sigma).unwrap();
            prop_assume!(k < text.len());
            let fast = hk(&text, k).unwrap();
            prop_assert!((fast - hk_oracle(text.symbols(), k)).abs() < 1e-9);
        }

        #[test]
        fn chain_is_monotone(sigma in 1u64..=5, raw in proptest::collection::vec(any::<u64>(), 1..300)) {
            let text = Text::new(raw.into_iter().map(|s| s % sigma).collect(), sigma).unwrap();
            let r = audit(&text, &lz_parse(&text), &[Encoder::Gamma], 6).unwrap();
            prop_assert!(r.monotone(1e-9));
        }
    }
}
