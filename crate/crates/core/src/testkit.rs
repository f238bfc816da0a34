//! Grammar and text fixtures shared by tests, benchmarks and the acceptance
//! suite.

use rand::{Rng, RngExt};

use crate::slp::{Rule, RuleId, Slp};

/// The grammar `X1='a' X2='b' X3=X1X2 X4=X2X2 X5=X3X3 X6=X4X3 X7=X5X6`
/// deriving `ababbbab`.
pub fn ababbbab_slp() -> Slp {
    let x = RuleId::one_based;
    Slp::new(vec![
        Rule::Terminal(b'a'),
        Rule::Terminal(b'b'),
        Rule::Pair(x(1), x(2)),
        Rule::Pair(x(2), x(2)),
        Rule::Pair(x(3), x(3)),
        Rule::Pair(x(4), x(3)),
        Rule::Pair(x(5), x(6)),
    ])
    .expect("fixture is valid")
}

/// `X1 = 'b'`, `X2 = 'a'`, `X_k = X_{k-1} X_{k-2}`: `|X_k|` is the k-th
/// Fibonacci number. Needs `rules >= 2`.
pub fn fibonacci_slp(rules: usize) -> Slp {
    assert!(rules >= 2);
    let mut out = vec![Rule::Terminal(b'b'), Rule::Terminal(b'a')];
    for k in 2..rules as u32 {
        out.push(Rule::Pair(RuleId(k - 1), RuleId(k - 2)));
    }
    Slp::new(out).expect("fixture is valid")
}

/// Byte used for symbol `i` of an alphabet of `size` symbols: lowercase
/// letters for small alphabets, raw bytes otherwise.
pub fn alphabet_byte(i: usize, size: usize) -> u8 {
    if size <= 26 {
        b'a' + i as u8
    } else {
        i as u8
    }
}

pub fn random_text(rng: &mut impl Rng, alphabet: usize, len: usize) -> Vec<u8> {
    (0..len)
        .map(|_| alphabet_byte(rng.random_range(0..alphabet), alphabet))
        .collect()
}

/// A random valid grammar with up to `pairs` pair rules over up to
/// `alphabet` terminals, deriving at most `max_len` characters (`max_len >= 1`).
///
/// Children are drawn uniformly among earlier rules. Rules nothing refers to
/// are joined into a balanced tree under a fresh start symbol, after dropping
/// the longest of them until the joined text fits in `max_len`.
pub fn random_slp(rng: &mut impl Rng, alphabet: usize, pairs: usize, max_len: u64) -> Slp {
    let terminals = alphabet.clamp(1, 256).min(pairs + 1);
    let mut rules: Vec<Rule> = Vec::new();
    let mut lengths: Vec<u64> = Vec::new();
    let mut picked = vec![false; alphabet.clamp(1, 256)];
    while rules.len() < terminals {
        let i = rng.random_range(0..picked.len());
        if !picked[i] {
            picked[i] = true;
            rules.push(Rule::Terminal(alphabet_byte(i, alphabet)));
            lengths.push(1);
        }
    }
    for _ in 0..pairs {
        let n = rules.len();
        let choice = (0..20).find_map(|_| {
            let l = rng.random_range(0..n);
            let r = rng.random_range(0..n);
            (lengths[l] + lengths[r] <= max_len).then_some((l, r))
        });
        let Some((l, r)) = choice else { continue };
        rules.push(Rule::Pair(RuleId(l as u32), RuleId(r as u32)));
        lengths.push(lengths[l] + lengths[r]);
    }

    let mut keep = vec![true; rules.len()];
    let roots = loop {
        let mut referenced = vec![false; rules.len()];
        for (i, rule) in rules.iter().enumerate() {
            if let (true, Rule::Pair(l, r)) = (keep[i], *rule) {
                referenced[l.index()] = true;
                referenced[r.index()] = true;
            }
        }
        let roots: Vec<usize> = (0..rules.len())
            .filter(|&i| keep[i] && !referenced[i])
            .collect();
        let total: u64 = roots.iter().map(|&i| lengths[i]).sum();
        if total <= max_len || roots.len() == 1 {
            break roots;
        }
        let longest = *roots.iter().max_by_key(|&&i| (lengths[i], i)).unwrap();
        keep[longest] = false;
    };

    let mut new_id = vec![u32::MAX; rules.len()];
    let mut kept = Vec::new();
    for (i, rule) in rules.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        new_id[i] = kept.len() as u32;
        kept.push(match *rule {
            Rule::Terminal(c) => Rule::Terminal(c),
            Rule::Pair(l, r) => Rule::Pair(RuleId(new_id[l.index()]), RuleId(new_id[r.index()])),
        });
    }
    let mut roots: Vec<u32> = roots.iter().map(|&i| new_id[i]).collect();
    while roots.len() > 1 {
        let mut joined = Vec::new();
        for chunk in roots.chunks(2) {
            match *chunk {
                [a, b] => {
                    joined.push(kept.len() as u32);
                    kept.push(Rule::Pair(RuleId(a), RuleId(b)));
                }
                [a] => joined.push(a),
                _ => unreachable!(),
            }
        }
        roots = joined;
    }
    // Balanced joining leaves the root last only if it was created last or
    // was already the last rule.
    if roots[0] as usize != kept.len() - 1 {
        let root = roots[0];
        let pos = root as usize;
        // The single root is unreferenced, so moving it to the end keeps
        // every reference pointing backwards.
        let rule = kept.remove(pos);
        for r in kept.iter_mut() {
            if let Rule::Pair(l, rr) = r {
                if l.0 > root {
                    l.0 -= 1;
                }
                if rr.0 > root {
                    rr.0 -= 1;
                }
            }
        }
        kept.push(rule);
    }
    Slp::new(kept).expect("generated grammar is valid")
}
