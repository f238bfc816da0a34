//! Brute-force reference implementations. Nothing here touches fingerprints,
//! graphs or the decompression routines of [`crate::slp`]; grammars are read
//! only through their raw rule list.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::slp::{Rule, Slp};

pub type NaiveProfile = BTreeMap<Vec<u8>, u64>;

/// Default cap on the text length accepted by [`naive_relevant_check`].
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Counts every length-`q` window of `text`.
pub fn naive_profile(text: &[u8], q: usize) -> NaiveProfile {
    let mut counts = NaiveProfile::new();
    if q == 0 || text.len() < q {
        return counts;
    }
    for w in text.windows(q) {
        *counts.entry(w.to_vec()).or_insert(0) += 1;
    }
    counts
}

/// Text derived by the grammar, by plain recursive expansion with a work list.
pub fn naive_expand(rules: &[Rule]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut todo = vec![rules.len() - 1];
    while let Some(i) = todo.pop() {
        match rules[i] {
            Rule::Terminal(c) => out.push(c),
            Rule::Pair(l, r) => {
                todo.push(r.index());
                todo.push(l.index());
            }
        }
    }
    out
}

/// Checks that summing, over every rule `X` deriving at least `q`
/// characters, the windows of its relevant substring weighted by the number
/// of occurrences of `X` in the derivation tree gives exactly the q-gram
/// frequencies of the text.
///
/// Relevant substrings are cut out of the expanded text at an occurrence of
/// each rule. Refuses texts longer than `cap`.
pub fn naive_relevant_check(slp: &Slp, q: usize, cap: u64) -> Result<bool> {
    let rules = slp.rules();
    let n = rules.len();
    let mut len = vec![0u64; n];
    for (i, rule) in rules.iter().enumerate() {
        len[i] = match *rule {
            Rule::Terminal(_) => 1,
            Rule::Pair(l, r) => len[l.index()].saturating_add(len[r.index()]),
        };
    }
    if len[n - 1] > cap {
        return Err(Error::TooLarge {
            len: len[n - 1],
            cap,
        });
    }
    if q < 1 || len[n - 1] < q as u64 {
        return Ok(true);
    }
    let text = naive_expand(rules);

    // Occurrence counts and one text offset per rule, top-down.
    let mut occ = vec![0u64; n];
    let mut offset = vec![None::<u64>; n];
    occ[n - 1] = 1;
    offset[n - 1] = Some(0);
    for i in (0..n).rev() {
        if let Rule::Pair(l, r) = rules[i] {
            occ[l.index()] += occ[i];
            occ[r.index()] += occ[i];
            if let Some(o) = offset[i] {
                offset[l.index()].get_or_insert(o);
                offset[r.index()].get_or_insert(o + len[l.index()]);
            }
        }
    }

    let mut summed = NaiveProfile::new();
    for i in 0..n {
        let Rule::Pair(l, _) = rules[i] else { continue };
        if len[i] < q as u64 {
            continue;
        }
        let o = offset[i].expect("every rule is reachable") as i64;
        let left = len[l.index()] as i64;
        let lo = (left - q as i64 + 1).max(0);
        let hi = (left + q as i64 - 2).min(len[i] as i64 - 1);
        let r = &text[(o + lo) as usize..=(o + hi) as usize];
        for w in r.windows(q) {
            *summed.entry(w.to_vec()).or_insert(0) += occ[i];
        }
    }
    Ok(summed == naive_profile(&text, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::compress_text;
    use crate::testkit::{ababbbab_slp, random_slp};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn naive_examples() {
        let p = naive_profile(b"ababbbab", 3);
        let expected: NaiveProfile = [
            (b"aba".to_vec(), 1),
            (b"bab".to_vec(), 2),
            (b"abb".to_vec(), 1),
            (b"bbb".to_vec(), 1),
            (b"bba".to_vec(), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(p, expected);
        assert!(naive_profile(b"abc", 5).is_empty());
        assert_eq!(
            naive_profile(b"aaaa", 1),
            [(b"a".to_vec(), 4)].into_iter().collect()
        );
    }

    #[test]
    fn relevant_identity_ababbbab() {
        assert!(naive_relevant_check(&ababbbab_slp(), 3, DEFAULT_CAP).unwrap());
        assert!(naive_relevant_check(&ababbbab_slp(), 9, DEFAULT_CAP).unwrap());
        assert!(matches!(
            naive_relevant_check(&ababbbab_slp(), 3, 4),
            Err(Error::TooLarge { len: 8, cap: 4 })
        ));
    }

    #[test]
    fn relevant_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let pairs = rng.random_range(1..60);
            let slp = random_slp(&mut rng, 3, pairs, 600);
            assert!(slp.text_len() <= 5000);
            for q in [2, 3, 5, 8] {
                assert!(naive_relevant_check(&slp, q, DEFAULT_CAP).unwrap());
            }
        }
        let slp = compress_text(b"mississippi mississippi").unwrap();
        assert!(naive_relevant_check(&slp, 4, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn detects_wrong_weights() {
        // Sanity check that the identity is not vacuous: dropping one
        // rule's contribution breaks it.
        let slp = ababbbab_slp();
        let text = naive_expand(slp.rules());
        let mut summed = NaiveProfile::new();
        for r in [&b"abab"[..], b"bbab"] {
            for w in r.windows(3) {
                *summed.entry(w.to_vec()).or_insert(0) += 1;
            }
        }
        assert_ne!(summed, naive_profile(&text, 3));
    }
}
