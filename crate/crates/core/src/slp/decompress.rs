use std::sync::atomic::{AtomicU64, Ordering};

use super::{Rule, RuleId, Slp};
use crate::error::{Error, Result};

/// The window of `t_X` holding exactly the q-grams that cross the boundary
/// between `X`'s children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevantSubstring {
    pub rule: RuleId,
    pub text: Vec<u8>,
    /// Half-open byte range of `text` within `t_X`.
    pub span: (u64, u64),
}

/// Emits the first `j` characters of `t_x` by walking the left spine with an
/// explicit stack of pending right children. Visits O(j + height(x)) rules.
fn walk_prefix(slp: &Slp, x: RuleId, j: u64, sink: &mut impl FnMut(u8)) {
    if j == 0 {
        return;
    }
    let mut remaining = j;
    let mut stack = vec![x];
    while let Some(id) = stack.pop() {
        match slp.rule(id) {
            Rule::Terminal(c) => {
                sink(c);
                remaining -= 1;
                if remaining == 0 {
                    return;
                }
            }
            Rule::Pair(l, r) => {
                stack.push(r);
                stack.push(l);
            }
        }
    }
}

/// Streams `t_x` left to right. Iterative, so grammar height is not bounded by
/// the call stack.
pub fn decompress_full(slp: &Slp, x: RuleId, sink: &mut impl FnMut(u8)) {
    walk_prefix(slp, x, slp.len_of(x), sink);
}

pub fn decompress_prefix(slp: &Slp, x: RuleId, j: u64) -> Result<Vec<u8>> {
    Decompressor::new(slp).prefix_vec(x, j)
}

pub fn decompress_suffix(slp: &Slp, x: RuleId, j: u64) -> Result<Vec<u8>> {
    Decompressor::new(slp).suffix_vec(x, j)
}

pub fn relevant_substring(slp: &Slp, x: RuleId, q: usize) -> Result<RelevantSubstring> {
    Decompressor::new(slp).relevant(x, q)
}

/// Running total of characters emitted by a [`Decompressor`].
pub type CharCounter = AtomicU64;

/// Prefix, suffix and full decompression over one grammar, counting every
/// character it emits. Suffixes are served from the reversed grammar.
///
/// Safe to share between threads; the counter is atomic.
pub struct Decompressor<'a> {
    slp: &'a Slp,
    reversed: Slp,
    correspondence: Vec<RuleId>,
    emitted: CharCounter,
}

impl<'a> Decompressor<'a> {
    pub fn new(slp: &'a Slp) -> Self {
        let (reversed, correspondence) = slp.reversed();
        Decompressor {
            slp,
            reversed,
            correspondence,
            emitted: CharCounter::new(0),
        }
    }

    pub fn slp(&self) -> &'a Slp {
        self.slp
    }

    /// Characters emitted so far by all calls.
    pub fn emitted(&self) -> u64 {
        self.emitted.load(Ordering::Relaxed)
    }

    fn check_range(&self, x: RuleId, j: u64) -> Result<()> {
        let available = self.slp.len_of(x);
        if j > available {
            return Err(Error::OutOfRange {
                requested: j,
                available,
            });
        }
        Ok(())
    }

    pub fn prefix(&self, x: RuleId, j: u64, sink: &mut impl FnMut(u8)) -> Result<()> {
        self.check_range(x, j)?;
        walk_prefix(self.slp, x, j, sink);
        self.emitted.fetch_add(j, Ordering::Relaxed);
        Ok(())
    }

    pub fn prefix_vec(&self, x: RuleId, j: u64) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(j as usize);
        self.prefix(x, j, &mut |c| out.push(c))?;
        Ok(out)
    }

    /// Last `j` characters of `t_x`: the length-`j` prefix of the reversed
    /// rule, re-reversed.
    pub fn suffix_vec(&self, x: RuleId, j: u64) -> Result<Vec<u8>> {
        self.check_range(x, j)?;
        let mut out = Vec::with_capacity(j as usize);
        let rev = self.correspondence[x.index()];
        walk_prefix(&self.reversed, rev, j, &mut |c| out.push(c));
        out.reverse();
        self.emitted.fetch_add(j, Ordering::Relaxed);
        Ok(out)
    }

    pub fn full(&self, x: RuleId, sink: &mut impl FnMut(u8)) {
        let len = self.slp.len_of(x);
        walk_prefix(self.slp, x, len, sink);
        self.emitted.fetch_add(len, Ordering::Relaxed);
    }

    /// `r_X = suffix(X_l, min(q-1, |X_l|)) ++ prefix(X_r, min(q-1, |X_r|))`.
    pub fn relevant(&self, x: RuleId, q: usize) -> Result<RelevantSubstring> {
        if q < 2 {
            return Err(Error::invalid(format!("q must be at least 2, got {q}")));
        }
        let (l, r) = match self.slp.rule(x) {
            Rule::Terminal(_) => {
                return Err(Error::invalid(format!(
                    "{x} is a terminal and has no relevant substring"
                )))
            }
            Rule::Pair(l, r) => (l, r),
        };
        let len = self.slp.len_of(x);
        if len < q as u64 {
            return Err(Error::NotRelevant {
                rule: x.index() + 1,
                len,
                q,
            });
        }
        let w = (q - 1) as u64;
        let left_len = self.slp.len_of(l);
        let take_left = left_len.min(w);
        let take_right = self.slp.len_of(r).min(w);
        let mut text = self.suffix_vec(l, take_left)?;
        self.prefix(r, take_right, &mut |c| text.push(c))?;
        Ok(RelevantSubstring {
            rule: x,
            text,
            span: (left_len - take_left, left_len + take_right),
        })
    }
}
