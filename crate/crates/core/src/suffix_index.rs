//! Suffix arrays over integer alphabets and longest-match queries.
//!
//! Construction is SA-IS (induced sorting), linear in the text length once the
//! alphabet is reduced to `0..k` with `k <= n`. Large alphabets, such as
//! metasymbol ids or flag-bit codes, are rank-reduced first.

use std::cmp::Ordering;

use crate::text::Symbol;

/// A suffix array over a borrowed text.
///
/// `sa()` holds 0-based suffix starts in increasing lexicographic order; a
/// suffix that is a proper prefix of another sorts first.
#[derive(Clone, Debug)]
pub struct SuffixIndex<'a> {
    text: &'a [Symbol],
    sa: Vec<u32>,
}

impl<'a> SuffixIndex<'a> {
    pub fn build(text: &'a [Symbol]) -> Self {
        assert!(
            text.len() < u32::MAX as usize,
            "text too long for a 32-bit suffix array"
        );
        let (ranks, upper) = reduce_alphabet(text);
        let sa = sa_is(&ranks, upper);
        SuffixIndex { text, sa }
    }

    pub fn text(&self) -> &'a [Symbol] {
        self.text
    }

    /// 0-based suffix starts in lexicographic order.
    pub fn sa(&self) -> &[u32] {
        &self.sa
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// Longest prefix of `pattern` occurring in the indexed text.
    ///
    /// Returns the match length and, when it is positive, the 1-based start
    /// of one occurrence (the first suffix of the final search interval).
    pub fn longest_match(&self, pattern: &[Symbol]) -> (usize, Option<usize>) {
        let text = self.text;
        let sa = &self.sa;
        let (mut lo, mut hi) = (0usize, sa.len());
        let mut depth = 0usize;
        while depth < pattern.len() && lo < hi {
            if hi - lo == 1 {
                // Single candidate left: extend by direct comparison.
                let start = sa[lo] as usize;
                let tail = &text[start + depth..];
                let extra = tail
                    .iter()
                    .zip(&pattern[depth..])
                    .take_while(|(a, b)| a == b)
                    .count();
                depth += extra;
                return if depth == 0 {
                    (0, None)
                } else {
                    (depth, Some(start + 1))
                };
            }
            let c = pattern[depth];
            let key = |i: u32| text.get(i as usize + depth).copied();
            let window = &sa[lo..hi];
            let first = window.partition_point(|&i| key(i).is_none_or(|s| s < c));
            let last = first + window[first..].partition_point(|&i| key(i) == Some(c));
            if first == last {
                break;
            }
            hi = lo + last;
            lo += first;
            depth += 1;
        }
        if depth == 0 {
            (0, None)
        } else {
            (depth, Some(sa[lo] as usize + 1))
        }
    }
}

/// Maps the text onto ranks `0..=upper` preserving order.
fn reduce_alphabet(text: &[Symbol]) -> (Vec<u32>, usize) {
    let max = text.iter().copied().max().unwrap_or(0);
    if max <= text.len().max(256) as u64 {
        return (text.iter().map(|&s| s as u32).collect(), max as usize);
    }
    let mut distinct = text.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let ranks = text
        .iter()
        .map(|s| distinct.binary_search(s).unwrap() as u32)
        .collect();
    (ranks, distinct.len() - 1)
}

/// Induced-sorting suffix array construction over `s` with symbols in
/// `0..=upper`. Positions inside the working array use origin 1 so that 0
/// marks an empty slot.
fn sa_is(s: &[u32], upper: usize) -> Vec<u32> {
    let n = s.len();
    match n {
        0 => return vec![],
        1 => return vec![0],
        2 => return if s[0] < s[1] { vec![0, 1] } else { vec![1, 0] },
        _ => {}
    }
    if n < 16 {
        return sa_naive(s);
    }

    let mut sa = vec![0u32; n];
    let mut ls = vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if s[i] == s[i + 1] {
            ls[i + 1]
        } else {
            s[i] < s[i + 1]
        };
    }
    let mut sum_l = vec![0u32; upper + 2];
    let mut sum_s = vec![0u32; upper + 2];
    for i in 0..n {
        if !ls[i] {
            sum_s[s[i] as usize] += 1;
        } else {
            sum_l[s[i] as usize + 1] += 1;
        }
    }
    for i in 0..=upper {
        sum_s[i] += sum_l[i];
        if i < upper {
            sum_l[i + 1] += sum_s[i];
        }
    }

    let induce = |sa: &mut [u32], lms: &[u32]| {
        sa.fill(0);
        let mut buf = sum_s.clone();
        for &d in lms {
            let d = d as usize;
            if d == n {
                continue;
            }
            let c = s[d] as usize;
            sa[buf[c] as usize] = d as u32 + 1;
            buf[c] += 1;
        }
        buf.copy_from_slice(&sum_l);
        let c = s[n - 1] as usize;
        sa[buf[c] as usize] = n as u32;
        buf[c] += 1;
        for i in 0..n {
            let v = sa[i] as usize;
            if v >= 2 && !ls[v - 2] {
                let c = s[v - 2] as usize;
                sa[buf[c] as usize] = (v - 1) as u32;
                buf[c] += 1;
            }
        }
        buf.copy_from_slice(&sum_l);
        for i in (0..n).rev() {
            let v = sa[i] as usize;
            if v >= 2 && ls[v - 2] {
                let c = s[v - 2] as usize + 1;
                buf[c] -= 1;
                sa[buf[c] as usize] = (v - 1) as u32;
            }
        }
    };

    let mut lms_map = vec![0u32; n + 1];
    let mut lms = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms.push(i as u32);
            lms_map[i] = lms.len() as u32;
        }
    }
    let m = lms.len();
    induce(&mut sa, &lms);

    if m > 0 {
        let mut sorted_lms: Vec<u32> = Vec::with_capacity(m);
        for &v in &sa {
            if lms_map[v as usize - 1] != 0 {
                sorted_lms.push(v - 1);
            }
        }
        let mut rec_s = vec![0u32; m];
        let mut rec_upper = 0u32;
        rec_s[lms_map[sorted_lms[0] as usize] as usize - 1] = 0;
        for i in 1..m {
            let mut l = sorted_lms[i - 1] as usize;
            let mut r = sorted_lms[i] as usize;
            let end_l = if (lms_map[l] as usize) < m {
                lms[lms_map[l] as usize] as usize
            } else {
                n
            };
            let end_r = if (lms_map[r] as usize) < m {
                lms[lms_map[r] as usize] as usize
            } else {
                n
            };
            let same = if end_l - l != end_r - r {
                false
            } else {
                while l < end_l && s[l] == s[r] {
                    l += 1;
                    r += 1;
                }
                l != n && r != n && s[l] == s[r]
            };
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i] as usize] as usize - 1] = rec_upper;
        }
        let rec_sa = sa_is(&rec_s, rec_upper as usize);
        for (slot, &r) in sorted_lms.iter_mut().zip(&rec_sa) {
            *slot = lms[r as usize];
        }
        induce(&mut sa, &sorted_lms);
    }
    for v in sa.iter_mut() {
        *v -= 1;
    }
    sa
}

fn sa_naive(s: &[u32]) -> Vec<u32> {
    let mut sa: Vec<u32> = (0..s.len() as u32).collect();
    sa.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
    sa
}

/// Compares two suffixes of `text`; exposed for tests and debugging.
pub fn compare_suffixes(text: &[Symbol], a: usize, b: usize) -> Ordering {
    text[a..].cmp(&text[b..])
}
