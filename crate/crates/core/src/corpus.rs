//! File input/output and seeded synthetic texts.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::text::{Symbol, Text};

/// Largest `b` accepted by [`gen_lower_bound`]; the text grows as `b^2 2^b`.
pub const MAX_LOWER_BOUND_B: u32 = 20;

/// The adversarial family `T = A S_1 ... S_{b/2}` over `{0, 1, 2}`.
///
/// `A` lists every length-`b` binary string in lexicographic order, each
/// followed by the separator `2`. `S` is the same list without separators
/// and `S_i` is `S` rotated left by `i`. Returns the text and `|A|`, the
/// reference length under which ReLZ is forced into many phrases.
pub fn gen_lower_bound(b: u32) -> Result<(Text, usize)> {
    if b == 0 || b % 2 == 1 {
        return Err(Error::usage(format!(
            "b must be even and positive, got {b}"
        )));
    }
    if b > MAX_LOWER_BOUND_B {
        return Err(Error::usage(format!(
            "b = {b} exceeds the supported maximum {MAX_LOWER_BOUND_B}"
        )));
    }
    let words = 1usize << b;
    let b = b as usize;
    let mut s: Vec<Symbol> = Vec::with_capacity(b * words);
    for w in 0..words {
        s.extend((0..b).rev().map(|bit| ((w >> bit) & 1) as Symbol));
    }
    let mut t: Vec<Symbol> = Vec::with_capacity((b + 1) * words + b / 2 * s.len());
    for word in s.chunks(b) {
        t.extend_from_slice(word);
        t.push(2);
    }
    let ell = t.len();
    for i in 1..=b / 2 {
        t.extend_from_slice(&s[i..]);
        t.extend_from_slice(&s[..i]);
    }
    Ok((Text::new(t, 3)?, ell))
}

const ROW_CACHE_ENTRIES: usize = 1 << 22;

/// Seeded order-`order` Markov text over `0..sigma`.
///
/// The first `order` symbols are uniform. Each context's transition row is
/// drawn on first use from a generator seeded by `(seed, context)`: symbol
/// `c` gets weight `(r_c mod 256 + 1)^skew` for a fresh 32-bit `r_c`, so
/// `skew = 0` is uniform and larger values concentrate the rows. Sampling
/// takes a 64-bit draw modulo the row total. Only integer arithmetic is
/// involved, so the output is identical on every platform.
pub fn gen_markov(order: usize, sigma: u64, n: usize, seed: u64, skew: u32) -> Result<Text> {
    if sigma == 0 {
        return Err(Error::usage("alphabet size must be positive"));
    }
    if sigma > 1 << 16 {
        return Err(Error::usage(format!(
            "alphabet size {sigma} too large for explicit transition rows"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Rows depend only on (seed, context), so the cache can be dropped at will.
    let max_rows = (ROW_CACHE_ENTRIES / sigma as usize).max(1);
    let mut rows: HashMap<Vec<Symbol>, Vec<u64>> = HashMap::new();
    let mut out: Vec<Symbol> = Vec::with_capacity(n);
    while out.len() < n.min(order) {
        out.push(rng.next_u64() % sigma);
    }
    while out.len() < n {
        let ctx = &out[out.len() - order..];
        if rows.len() >= max_rows && !rows.contains_key(ctx) {
            rows.clear();
        }
        let row = match rows.get(ctx) {
            Some(row) => row,
            None => rows
                .entry(ctx.to_vec())
                .or_insert_with(|| transition_row(seed, ctx, sigma, skew)),
        };
        let x = rng.next_u64() % row[row.len() - 1];
        let c = row.partition_point(|&acc| acc <= x) as Symbol;
        out.push(c);
    }
    Text::new(out, sigma)
}

/// Cumulative weights of the row for `ctx`.
fn transition_row(seed: u64, ctx: &[Symbol], sigma: u64, skew: u32) -> Vec<u64> {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &c in ctx {
        h = (h ^ c).wrapping_mul(0x0100_0000_01b3);
    }
    key[8..16].copy_from_slice(&h.to_le_bytes());
    key[16..24].copy_from_slice(&(ctx.len() as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut acc = 0u64;
    (0..sigma)
        .map(|_| {
            let w = (rng.next_u32() as u64 % 256 + 1).pow(skew.min(7));
            acc += w;
            acc
        })
        .collect()
}

/// `copies` copies of a random byte block; every copy after the first has
/// each byte replaced by a different random byte with probability
/// `mutation_rate`.
pub fn gen_repetitive(
    block_len: usize,
    copies: usize,
    mutation_rate: f64,
    seed: u64,
) -> Result<Text> {
    if !(0.0..=1.0).contains(&mutation_rate) {
        return Err(Error::usage(format!(
            "mutation rate {mutation_rate} outside [0, 1]"
        )));
    }
    let threshold = (mutation_rate * (1u64 << 32) as f64) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block: Vec<u8> = (0..block_len).map(|_| rng.next_u32() as u8).collect();
    let mut out = Vec::with_capacity(block_len.saturating_mul(copies));
    for copy in 0..copies {
        if copy == 0 {
            out.extend_from_slice(&block);
            continue;
        }
        for &c in &block {
            if (rng.next_u32() as u64) < threshold {
                out.push(c.wrapping_add(1 + (rng.next_u32() % 255) as u8));
            } else {
                out.push(c);
            }
        }
    }
    Ok(Text::from_bytes(&out))
}

/// Reads a file as bytes over an alphabet of 256.
pub fn read_input(path: impl AsRef<Path>) -> Result<Text> {
    Ok(Text::from_bytes(&fs::read(path)?))
}

pub fn write_output(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    Ok(fs::write(path, bytes)?)
}
