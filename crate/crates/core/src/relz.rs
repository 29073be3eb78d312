//! The ReLZ pipeline and its memory-bounded recursive form.
//!
//! One pass: RLZ-prefix parse, metasymbolize, exact LZ over the metasymbols,
//! remap. The recursive form replaces the exact LZ step by another ReLZ pass
//! over the metastring whenever that string exceeds what the budget allows,
//! and rewrites phrases bottom-up once the deepest level is parsed.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lz::lz_parse;
use crate::meta::{metasymbolize_owned, remap_metaparse, MetaIdScheme};
use crate::parsing::Parsing;
use crate::rlz::rlz_pref_phrases;
use crate::text::Text;

/// Bytes per reference symbol assumed by [`derive_ell`]: one text byte plus
/// an 8-byte suffix array entry.
pub const BYTES_PER_SYMBOL: u64 = 9;

pub const DEFAULT_MAX_RECURSION: usize = 16;

/// How the reference length `ell` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixSize {
    /// Fixed prefix length, clamped to the text length.
    Explicit(usize),
    /// Memory budget in bytes; see [`derive_ell`].
    Budget(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelzConfig {
    pub prefix: PrefixSize,
    /// Recursive calls allowed by [`relz_recursive`]; 0 means a single pass.
    pub max_recursion: usize,
    pub meta_ids: MetaIdScheme,
}

impl RelzConfig {
    pub fn with_ell(ell: usize) -> Self {
        RelzConfig {
            prefix: PrefixSize::Explicit(ell),
            max_recursion: DEFAULT_MAX_RECURSION,
            meta_ids: MetaIdScheme::Dense,
        }
    }

    pub fn with_budget(bytes: u64) -> Self {
        RelzConfig {
            prefix: PrefixSize::Budget(bytes),
            ..Self::with_ell(0)
        }
    }

    pub fn max_recursion(mut self, levels: usize) -> Self {
        self.max_recursion = levels;
        self
    }

    pub fn meta_ids(mut self, scheme: MetaIdScheme) -> Self {
        self.meta_ids = scheme;
        self
    }
}

/// One pipeline level, outermost first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub input_len: usize,
    pub sigma: u64,
    pub ell: usize,
    /// Leading symbols taken as already parsed.
    pub skip: usize,
    /// Phrases of the RLZ-prefix stage (the metastring length).
    pub z_prime: usize,
    /// Whether the metastring was parsed with exact LZ.
    pub exact_lz: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelzStats {
    pub levels: Vec<LevelStats>,
    pub zhat: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Relz {
    pub parsing: Parsing,
    pub stats: RelzStats,
}

/// Largest reference length the budget allows: `min(n, budget / 9)`, raised
/// to `sigma` when smaller. A budget below `sigma` bytes is rejected.
pub fn derive_ell(budget: u64, n: usize, sigma: u64) -> Result<usize> {
    if budget < sigma {
        return Err(Error::usage(format!(
            "memory budget of {budget} bytes cannot hold {sigma} alphabet symbols"
        )));
    }
    let ell = (budget / BYTES_PER_SYMBOL).max(sigma);
    Ok(usize::try_from(ell).map_or(n, |ell| ell.min(n)))
}

fn top_ell(text: &Text, prefix: PrefixSize) -> Result<usize> {
    match prefix {
        PrefixSize::Explicit(ell) => Ok(ell.min(text.len())),
        PrefixSize::Budget(bytes) => derive_ell(bytes, text.len(), text.sigma()),
    }
}

/// Single-pass ReLZ.
pub fn relz_parse(text: &Text, config: &RelzConfig) -> Result<Relz> {
    let t0 = Instant::now();
    let ell = top_ell(text, config.prefix)?;
    let first = rlz_pref_phrases(text.symbols(), ell, 0);
    let first = Parsing::new(first.phrases);
    let meta = metasymbolize_owned(first, text, config.meta_ids, ell as u64 + 1)?;
    let parsing = remap_metaparse(&lz_parse(&meta.to_text()), &meta)?;
    let level = LevelStats {
        input_len: text.len(),
        sigma: text.sigma(),
        ell,
        skip: 0,
        z_prime: meta.len(),
        exact_lz: true,
    };
    let stats = RelzStats {
        levels: vec![level],
        zhat: parsing.len(),
        elapsed: t0.elapsed(),
    };
    Ok(Relz { parsing, stats })
}

/// Budget-driven ReLZ that recurses on the metastring.
///
/// The budget caps both the reference and the metastring length that is
/// parsed with exact LZ at `budget / 9` symbols. Deeper levels use
/// `ell = min(m, budget / 9)` for a metastring of length `m`, and take the
/// phrases of the previous level's LZ-parsed prefix as already final. When
/// `max_recursion` levels are used up, or a level fails to shorten its
/// input, the last metastring gets a capped RLZ-prefix parse instead of
/// exact LZ. With `max_recursion = 0` this is [`relz_parse`].
pub fn relz_recursive(text: &Text, config: &RelzConfig) -> Result<Relz> {
    let t0 = Instant::now();
    let cap = match config.prefix {
        PrefixSize::Budget(bytes) => {
            usize::try_from(bytes / BYTES_PER_SYMBOL).unwrap_or(usize::MAX)
        }
        PrefixSize::Explicit(_) => usize::MAX,
    };
    let ell = top_ell(text, config.prefix)?;
    let field_bound = ell.max(cap).min(text.len()) as u64 + 1;
    let mut run = Recursion {
        config,
        cap,
        field_bound,
        levels: Vec::new(),
    };
    let parsing = run.level(text, ell, 0, 0)?;
    let stats = RelzStats {
        levels: run.levels,
        zhat: parsing.len(),
        elapsed: t0.elapsed(),
    };
    Ok(Relz { parsing, stats })
}

struct Recursion<'c> {
    config: &'c RelzConfig,
    cap: usize,
    field_bound: u64,
    levels: Vec<LevelStats>,
}

impl Recursion<'_> {
    fn level(&mut self, text: &Text, ell: usize, skip: usize, depth: usize) -> Result<Parsing> {
        let stage = rlz_pref_phrases(text.symbols(), ell, skip);
        let prefix_phrases = stage.prefix_phrases;
        let first = Parsing::new(stage.phrases);
        let meta = metasymbolize_owned(first, text, self.config.meta_ids, self.field_bound)?;
        let m = meta.len();
        let exact = m <= self.cap || self.config.max_recursion == 0;
        self.levels.push(LevelStats {
            input_len: text.len(),
            sigma: text.sigma(),
            ell,
            skip,
            z_prime: m,
            exact_lz: exact,
        });
        let meta_text = meta.to_text();
        let meta_parse = if exact {
            lz_parse(&meta_text)
        } else if depth < self.config.max_recursion && m < text.len() {
            self.level(&meta_text, m.min(self.cap), prefix_phrases, depth + 1)?
        } else {
            Parsing::new(
                rlz_pref_phrases(meta_text.symbols(), m.min(self.cap), prefix_phrases).phrases,
            )
        };
        remap_metaparse(&meta_parse, &meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coder::{decode, encode, Encoder};
    use crate::meta::metasymbolize;
    use crate::parsing::{verify_parsing, Phrase};
    use crate::rlz::rlz_pref_parse;
    use crate::text::Symbol;
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> Text {
        Text::from_bytes(s.as_bytes())
    }

    fn random_text(seed: u64, n: usize, sigma: u64) -> Text {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Text::new((0..n).map(|_| rng.next_u64() % sigma).collect(), sigma).unwrap()
    }

    fn phrase_count_bound(text: &Text) -> f64 {
        let n = text.len() as f64;
        let sigma = text.distinct_symbols().max(2) as f64;
        (9.0 * n * sigma.log2() / n.log2()).ceil()
    }

    #[test]
    fn abababc_with_ell_2() {
        let text = t("abababc");
        let out = relz_parse(&text, &RelzConfig::with_ell(2)).unwrap();
        assert_eq!(
            out.parsing.phrases(),
            [
                Phrase::Literal(b'a' as Symbol),
                Phrase::Literal(b'b' as Symbol),
                Phrase::Copy { source: 1, len: 2 },
                Phrase::Copy { source: 3, len: 2 },
                Phrase::Literal(b'c' as Symbol),
            ]
        );
        assert_eq!(lz_parse(&text).len(), 4);
        assert_eq!(out.stats.zhat, 5);
        assert_eq!(out.stats.levels[0].z_prime, 5);
    }

    #[test]
    fn extreme_prefixes_give_lz() {
        for seed in 0..40 {
            let text = random_text(seed, 300, 2 + seed % 3);
            let z = lz_parse(&text).len();
            for ell in [0, text.len(), text.len() + 5] {
                assert_eq!(
                    relz_parse(&text, &RelzConfig::with_ell(ell))
                        .unwrap()
                        .parsing
                        .len(),
                    z,
                    "seed {seed} ell {ell}"
                );
            }
        }
    }

    #[test]
    fn square_of_random_word() {
        let w = random_text(7, 1000, 4);
        let mut sym = w.symbols().to_vec();
        sym.extend_from_slice(w.symbols());
        let text = Text::new(sym, 4).unwrap();
        let out = relz_parse(&text, &RelzConfig::with_ell(1000)).unwrap();
        assert!(verify_parsing(&out.parsing, &text).is_ok());
        assert!(out.parsing.len() <= 2 * lz_parse(&text).len());
        assert_eq!(out.parsing.len(), lz_parse(&w).len() + 1);
    }

    #[test]
    fn derive_ell_examples() {
        assert_eq!(derive_ell(u64::MAX, 12345, 256).unwrap(), 12345);
        assert_eq!(derive_ell(9_000_000, 10_000_000, 256).unwrap(), 1_000_000);
        assert_eq!(derive_ell(900, 10_000, 256).unwrap(), 256);
        assert_eq!(derive_ell(900, 50, 256).unwrap(), 50);
        assert!(matches!(derive_ell(100, 10_000, 256), Err(Error::Usage(_))));
    }

    #[test]
    fn non_binding_budget_matches_single_pass() {
        for seed in 0..20 {
            let text = random_text(seed, 500, 3);
            let cfg = RelzConfig::with_budget(1 << 20);
            let single = relz_parse(&text, &cfg).unwrap();
            let rec = relz_recursive(&text, &cfg).unwrap();
            assert_eq!(single.parsing, rec.parsing);
            assert_eq!(rec.stats.levels.len(), 1);
        }
    }

    fn short_reference_text() -> Text {
        // Short reference, then a tail built from shuffled repeats of it.
        let base = [0u64, 1, 2, 3, 1, 0, 2, 2, 3, 0];
        let mut s = base.to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        while s.len() < 50 {
            let a = (rng.next_u32() % 10) as usize;
            let l = 1 + (rng.next_u32() % 3) as usize;
            s.extend_from_slice(&base[a..(a + l).min(10)]);
        }
        s.truncate(50);
        Text::new(s, 4).unwrap()
    }

    #[test]
    fn tight_budget_forces_levels() {
        let text = short_reference_text();
        let cfg = RelzConfig::with_budget(45);
        let rec = relz_recursive(&text, &cfg).unwrap();
        assert!(rec.stats.levels.len() >= 2, "{:?}", rec.stats.levels);
        assert!(verify_parsing(&rec.parsing, &text).is_ok());
        let single = relz_parse(&text, &cfg).unwrap();
        assert!(rec.parsing.len() >= single.parsing.len());
        assert_eq!(
            decode(&encode(&rec.parsing, 4, Encoder::Gamma).unwrap()).unwrap(),
            text
        );
    }

    #[test]
    fn one_level_cap_is_valid() {
        let text = short_reference_text();
        let rec = relz_recursive(&text, &RelzConfig::with_budget(45).max_recursion(1)).unwrap();
        assert_eq!(rec.stats.levels.len(), 2);
        assert!(!rec.stats.levels[1].exact_lz);
        assert!(verify_parsing(&rec.parsing, &text).is_ok());
    }

    #[test]
    fn tiny_budget_rejected() {
        assert!(matches!(
            relz_recursive(&t("abc"), &RelzConfig::with_budget(10)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn flag_bit_ids_give_valid_parsings() {
        for seed in 0..20 {
            let text = random_text(seed, 2000, 4);
            for cfg in [RelzConfig::with_ell(100), RelzConfig::with_budget(9 * 40)] {
                let cfg = cfg.meta_ids(MetaIdScheme::FlagBit);
                let single = relz_parse(&text, &cfg).unwrap();
                assert!(verify_parsing(&single.parsing, &text).is_ok());
                let rec = relz_recursive(&text, &cfg).unwrap();
                assert!(verify_parsing(&rec.parsing, &text).is_ok());
            }
        }
    }

    /// Consecutive single-metasymbol phrases after the prefix must not form a
    /// metasymbol pair that already occurred earlier.
    fn unmerged_pairs(text: &Text, ell: usize) -> usize {
        let first = rlz_pref_parse(text, ell).unwrap();
        let meta = metasymbolize(&first, text);
        let out = relz_parse(text, &RelzConfig::with_ell(ell))
            .unwrap()
            .parsing;
        let b = &meta.boundaries;
        // Meta index of each final phrase, when it covers exactly one metasymbol.
        let single: Vec<Option<usize>> = out
            .iter_with_starts()
            .map(|(s, p)| {
                let i = b.binary_search(&s).ok()?;
                (b[i + 1] - b[i] == p.len()).then_some(i)
            })
            .collect();
        let mut bad = 0;
        for j in 0..single.len().saturating_sub(1) {
            let (Some(i), Some(i2)) = (single[j], single[j + 1]) else {
                continue;
            };
            if b[i] <= ell || i2 != i + 1 {
                continue;
            }
            let pair = (meta.ids[i], meta.ids[i + 1]);
            if (0..i).any(|k| (meta.ids[k], meta.ids[k + 1]) == pair) {
                bad += 1;
            }
        }
        bad
    }

    #[test]
    fn no_mergeable_pairs_exhaustive() {
        for len in 1..=11 {
            for mask in 0u32..(1 << len) {
                let sym: Vec<Symbol> = (0..len).map(|i| ((mask >> i) & 1) as Symbol).collect();
                let text = Text::new(sym, 2).unwrap();
                for ell in 0..=len {
                    assert_eq!(
                        unmerged_pairs(&text, ell),
                        0,
                        "{:?} ell {ell}",
                        text.symbols()
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn valid_and_bounded(sigma in 2u64..=6, raw in proptest::collection::vec(any::<u64>(), 2..400), frac in 0.0f64..=1.0) {
            let text = Text::new(raw.into_iter().map(|s| s % sigma).collect(), sigma).unwrap();
            let ell = (frac * text.len() as f64) as usize;
            let out = relz_parse(&text, &RelzConfig::with_ell(ell)).unwrap();
            prop_assert!(verify_parsing(&out.parsing, &text).is_ok());
            prop_assert!(out.parsing.len() as f64 <= phrase_count_bound(&text));
            prop_assert!(out.parsing.len() >= lz_parse(&text).len());
            prop_assert!(out.parsing.len() <= rlz_pref_parse(&text, ell).unwrap().len());
        }

        #[test]
        fn recursive_is_valid(sigma in 2u64..=4, raw in proptest::collection::vec(any::<u64>(), 0..400), cap in 4u64..60, levels in 0usize..4) {
            let text = Text::new(raw.into_iter().map(|s| s % sigma).collect(), sigma).unwrap();
            let cfg = RelzConfig::with_budget(cap * BYTES_PER_SYMBOL).max_recursion(levels);
            let out = relz_recursive(&text, &cfg).unwrap();
            prop_assert!(verify_parsing(&out.parsing, &text).is_ok());
            prop_assert!(out.stats.levels.len() <= levels + 1);
        }
    }
}
