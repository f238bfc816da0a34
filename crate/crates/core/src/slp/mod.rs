//! Straight-line programs: context-free grammars in Chomsky normal form that
//! derive exactly one string.

mod compress;
mod decompress;
mod text_format;

pub use compress::compress_text;
pub use decompress::{
    decompress_full, decompress_prefix, decompress_suffix, relevant_substring, CharCounter,
    Decompressor, RelevantSubstring,
};
pub use text_format::{parse_slp, write_slp};

use crate::error::{Error, Result};

/// Index of a rule, 0-based. Displayed 1-based (`X1`, `X2`, ...) as in the
/// text format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u32);

impl RuleId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Rule `X{n}` in 1-based notation.
    pub fn one_based(n: usize) -> Self {
        assert!(n >= 1, "rule ids are 1-based");
        RuleId((n - 1) as u32)
    }
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "X{}", self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Terminal(u8),
    Pair(RuleId, RuleId),
}

/// A validated straight-line program. The last rule is the start symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slp {
    rules: Vec<Rule>,
    lengths: Vec<u64>,
    occs: Vec<u64>,
    heights: Vec<u32>,
}

impl Slp {
    /// Validates `rules` and computes the per-rule tables.
    ///
    /// Rejects empty rule sets, references to the same or a later rule, and
    /// rules not reachable from the start symbol.
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::InvalidGrammar("empty rule set".into()));
        }
        if rules.len() > u32::MAX as usize {
            return Err(Error::InvalidGrammar("too many rules".into()));
        }
        for (i, rule) in rules.iter().enumerate() {
            if let Rule::Pair(l, r) = *rule {
                for child in [l, r] {
                    if child.index() >= i {
                        return Err(Error::InvalidGrammar(format!(
                            "{} references {child}, which is not defined before it",
                            RuleId(i as u32)
                        )));
                    }
                }
            }
        }
        let lengths = compute_lengths(&rules)?;
        let occs = compute_occurrences(&rules)?;
        if let Some(i) = occs.iter().position(|&o| o == 0) {
            return Err(Error::InvalidGrammar(format!(
                "{} is unreachable from the start symbol",
                RuleId(i as u32)
            )));
        }
        let heights = compute_heights(&rules);
        Ok(Slp {
            rules,
            lengths,
            occs,
            heights,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> Rule {
        self.rules[id.index()]
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn start(&self) -> RuleId {
        RuleId(self.rules.len() as u32 - 1)
    }

    /// Length of the derived text.
    pub fn text_len(&self) -> u64 {
        self.lengths[self.rules.len() - 1]
    }

    pub fn len_of(&self, id: RuleId) -> u64 {
        self.lengths[id.index()]
    }

    /// Number of occurrences of the rule in the derivation tree of the start
    /// symbol.
    pub fn occ(&self, id: RuleId) -> u64 {
        self.occs[id.index()]
    }

    pub fn height(&self, id: RuleId) -> u32 {
        self.heights[id.index()]
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn occurrences(&self) -> &[u64] {
        &self.occs
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = RuleId> + ExactSizeIterator {
        (0..self.rules.len() as u32).map(RuleId)
    }

    /// Rules deriving at least `q` characters, in ascending id order.
    pub fn relevant_rules(&self, q: usize) -> impl Iterator<Item = RuleId> + '_ {
        self.ids().filter(move |&id| {
            matches!(self.rule(id), Rule::Pair(..)) && self.len_of(id) >= q as u64
        })
    }

    /// `|r_X| = min(q-1, |X_l|) + min(q-1, |X_r|)` for pair rules.
    pub fn relevant_len(&self, id: RuleId, q: usize) -> Option<u64> {
        match self.rule(id) {
            Rule::Terminal(_) => None,
            Rule::Pair(l, r) => {
                let w = (q - 1) as u64;
                Some(self.len_of(l).min(w) + self.len_of(r).min(w))
            }
        }
    }

    /// The grammar for the reversed text. Rule ids are preserved, so the
    /// correspondence `X_i -> X_i'` is the identity returned alongside.
    pub fn reversed(&self) -> (Slp, Vec<RuleId>) {
        let rules = self
            .rules
            .iter()
            .map(|rule| match *rule {
                Rule::Terminal(c) => Rule::Terminal(c),
                Rule::Pair(l, r) => Rule::Pair(r, l),
            })
            .collect();
        let slp = Slp {
            rules,
            lengths: self.lengths.clone(),
            occs: self.occs.clone(),
            heights: self.heights.clone(),
        };
        (slp, self.ids().collect())
    }

    /// Decompresses the whole text. Materializes `text_len()` bytes.
    pub fn expand(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.text_len().min(1 << 30) as usize);
        decompress_full(self, self.start(), &mut |c| out.push(c));
        out
    }
}

/// `|X| = 1` for terminals, `|X_l| + |X_r|` for pairs, with checked arithmetic.
pub fn compute_lengths(rules: &[Rule]) -> Result<Vec<u64>> {
    let mut lengths: Vec<u64> = Vec::with_capacity(rules.len());
    for rule in rules {
        let len = match *rule {
            Rule::Terminal(_) => 1,
            Rule::Pair(l, r) => lengths[l.index()]
                .checked_add(lengths[r.index()])
                .ok_or(Error::Overflow("rule lengths"))?,
        };
        lengths.push(len);
    }
    Ok(lengths)
}

/// `occ(X_n) = 1`, every other rule starts at 0, and a single descending pass
/// adds `occ(X_i)` into both children of each pair rule.
pub fn compute_occurrences(rules: &[Rule]) -> Result<Vec<u64>> {
    let mut occs = vec![0u64; rules.len()];
    if let Some(last) = occs.last_mut() {
        *last = 1;
    }
    for i in (0..rules.len()).rev() {
        if let Rule::Pair(l, r) = rules[i] {
            let o = occs[i];
            for child in [l, r] {
                let slot = &mut occs[child.index()];
                *slot = slot
                    .checked_add(o)
                    .ok_or(Error::Overflow("occurrence counts"))?;
            }
        }
    }
    Ok(occs)
}

fn compute_heights(rules: &[Rule]) -> Vec<u32> {
    let mut heights: Vec<u32> = Vec::with_capacity(rules.len());
    for rule in rules {
        let h = match *rule {
            Rule::Terminal(_) => 0,
            Rule::Pair(l, r) => 1 + heights[l.index()].max(heights[r.index()]),
        };
        heights.push(h);
    }
    heights
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{ababbbab_slp, fibonacci_slp};

    fn x(n: usize) -> RuleId {
        RuleId::one_based(n)
    }

    #[test]
    fn ababbbab_lengths() {
        let slp = ababbbab_slp();
        assert_eq!(slp.num_rules(), 7);
        assert_eq!(slp.len_of(x(3)), 2);
        assert_eq!(slp.len_of(x(5)), 4);
        assert_eq!(slp.len_of(x(7)), 8);
        assert_eq!(slp.len_of(x(1)), 1);
        assert_eq!(slp.expand(), b"ababbbab");
    }

    #[test]
    fn ababbbab_occurrences() {
        let slp = ababbbab_slp();
        let expected = [3, 5, 3, 1, 1, 1, 1];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(slp.occ(x(i + 1)), e, "occ(X{})", i + 1);
        }
        let terminal_total: u64 = slp
            .ids()
            .filter(|&id| matches!(slp.rule(id), Rule::Terminal(_)))
            .map(|id| slp.occ(id))
            .sum();
        assert_eq!(terminal_total, 8);
    }

    #[test]
    fn chain_occurrences() {
        let slp = Slp::new(vec![Rule::Terminal(b'a'), Rule::Pair(x(1), x(1))]).unwrap();
        assert_eq!(slp.occ(x(1)), 2);
    }

    #[test]
    fn fibonacci_lengths_closed_form() {
        // Fib(1) = Fib(2) = 1.
        let mut fib = vec![0u64, 1, 1];
        for i in 3..=45 {
            fib.push(fib[i - 1] + fib[i - 2]);
        }
        let slp = fibonacci_slp(40);
        // X1 = b, X2 = a, X_k = X_{k-1} X_{k-2}: |X_k| = Fib(k).
        for (k, &f) in fib.iter().enumerate().take(41).skip(1) {
            assert_eq!(slp.len_of(x(k)), f);
        }
    }

    #[test]
    fn length_overflow_detected() {
        let mut rules = vec![Rule::Terminal(b'a')];
        for i in 0..70u32 {
            rules.push(Rule::Pair(RuleId(i), RuleId(i)));
        }
        assert!(matches!(Slp::new(rules), Err(Error::Overflow(_))));
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(Slp::new(vec![]).is_err());
        let self_ref = vec![Rule::Terminal(b'a'), Rule::Pair(x(2), x(1))];
        assert!(Slp::new(self_ref).is_err());
        let unreachable = vec![
            Rule::Terminal(b'a'),
            Rule::Terminal(b'b'),
            Rule::Pair(x(1), x(1)),
        ];
        assert!(matches!(
            Slp::new(unreachable),
            Err(Error::InvalidGrammar(_))
        ));
    }

    #[test]
    fn reversal() {
        let slp = ababbbab_slp();
        let (rev, map) = slp.reversed();
        assert_eq!(rev.expand(), b"babbbaba");
        assert_eq!(map.len(), 7);
        let (back, _) = rev.reversed();
        assert_eq!(back.expand(), b"ababbbab");

        let pal = Slp::new(vec![
            Rule::Terminal(b'a'),
            Rule::Pair(x(1), x(1)),
            Rule::Pair(x(2), x(1)),
        ])
        .unwrap();
        assert_eq!(pal.reversed().0.expand(), pal.expand());
    }

    #[test]
    fn heights() {
        let slp = ababbbab_slp();
        assert_eq!(slp.height(x(1)), 0);
        assert_eq!(slp.height(x(3)), 1);
        assert_eq!(slp.height(x(7)), 3);
    }
}
