//! Re-Pair: repeatedly replace the most frequent adjacent pair of symbols by a
//! fresh rule until no pair occurs twice, then join the leftover sequence
//! into a balanced binary tree.
//!
//! Ties between equally frequent pairs go to the smaller `(left, right)` rule
//! ids, so output is a deterministic function of the input.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use super::{Rule, RuleId, Slp};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

type Pair = (u32, u32);

struct PairRecord {
    count: u64,
    /// Head of the intrusive list of positions where this pair starts.
    head: usize,
    /// Count of this pair's one live heap entry, 0 if none. Heap entries with
    /// any other count are ghosts.
    queued: u64,
}

struct RePair {
    sym: Vec<u32>,
    prev: Vec<usize>,
    next: Vec<usize>,
    occ_prev: Vec<usize>,
    occ_next: Vec<usize>,
    registered: Vec<bool>,
    scanned: bool,
    pairs: FxHashMap<Pair, PairRecord>,
    heap: BinaryHeap<(u64, Reverse<Pair>)>,
}

impl RePair {
    fn new(sym: Vec<u32>) -> Self {
        let n = sym.len();
        let mut rp = RePair {
            prev: (0..n).map(|i| if i == 0 { NONE } else { i - 1 }).collect(),
            next: (0..n)
                .map(|i| if i + 1 == n { NONE } else { i + 1 })
                .collect(),
            occ_prev: vec![NONE; n],
            occ_next: vec![NONE; n],
            registered: vec![false; n],
            scanned: false,
            pairs: FxHashMap::default(),
            heap: BinaryHeap::new(),
            sym,
        };
        for i in 0..n {
            rp.register(i);
        }
        rp.scanned = true;
        for (&pair, rec) in rp.pairs.iter_mut() {
            if rec.count >= 2 {
                rec.queued = rec.count;
                rp.heap.push((rec.count, Reverse(pair)));
            }
        }
        rp
    }

    fn pair_at(&self, i: usize) -> Option<Pair> {
        let j = self.next[i];
        (j != NONE).then(|| (self.sym[i], self.sym[j]))
    }

    /// Adds the pair starting at `i`, unless `i` continues a run whose
    /// previous position already holds the same pair (`aaa` counts once).
    fn register(&mut self, i: usize) {
        let Some(pair) = self.pair_at(i) else { return };
        let h = self.prev[i];
        if h != NONE && self.registered[h] && self.pair_at(h) == Some(pair) {
            return;
        }
        let rec = self.pairs.entry(pair).or_insert(PairRecord {
            count: 0,
            head: NONE,
            queued: 0,
        });
        self.occ_prev[i] = NONE;
        self.occ_next[i] = rec.head;
        if rec.head != NONE {
            self.occ_prev[rec.head] = i;
        }
        rec.head = i;
        rec.count += 1;
        self.registered[i] = true;
        // Before the initial scan is over the heap is filled in bulk.
        if self.scanned && rec.count >= 2 && rec.count > rec.queued {
            rec.queued = rec.count;
            self.heap.push((rec.count, Reverse(pair)));
        }
    }

    fn unregister(&mut self, i: usize) {
        if i == NONE || !self.registered[i] {
            return;
        }
        let pair = self
            .pair_at(i)
            .expect("registered position has a successor");
        let rec = self
            .pairs
            .get_mut(&pair)
            .expect("registered pair has a record");
        let (p, n) = (self.occ_prev[i], self.occ_next[i]);
        if p == NONE {
            rec.head = n;
        } else {
            self.occ_next[p] = n;
        }
        if n != NONE {
            self.occ_prev[n] = p;
        }
        rec.count -= 1;
        if rec.count == 0 {
            self.pairs.remove(&pair);
        }
        self.registered[i] = false;
    }

    /// A live entry whose count has since dropped is pushed back with the
    /// current count when it surfaces.
    fn most_frequent(&mut self) -> Option<Pair> {
        while let Some((count, Reverse(pair))) = self.heap.pop() {
            let Some(rec) = self.pairs.get_mut(&pair) else {
                continue;
            };
            if rec.queued != count {
                continue;
            }
            if rec.count == count {
                rec.queued = 0;
                return Some(pair);
            }
            rec.queued = 0;
            if rec.count >= 2 {
                rec.queued = rec.count;
                self.heap.push((rec.count, Reverse(pair)));
            }
        }
        None
    }

    fn replace_all(&mut self, pair: Pair, fresh: u32) {
        // Replacing can expose new occurrences (the tail of a broken run), so
        // repeat until the pair is gone.
        while let Some(rec) = self.pairs.get(&pair) {
            let mut positions = Vec::new();
            let mut cur = rec.head;
            while cur != NONE {
                positions.push(cur);
                cur = self.occ_next[cur];
            }
            positions.sort_unstable();
            self.replace_at(&positions, pair, fresh);
        }
    }

    fn replace_at(&mut self, positions: &[usize], pair: Pair, fresh: u32) {
        for &i in positions {
            if !self.registered[i] || self.pair_at(i) != Some(pair) {
                continue;
            }
            let j = self.next[i];
            let h = self.prev[i];
            let k = self.next[j];
            self.unregister(h);
            self.unregister(j);
            self.unregister(i);
            self.sym[i] = fresh;
            self.next[i] = k;
            if k != NONE {
                self.prev[k] = i;
            }
            self.prev[j] = NONE;
            self.next[j] = NONE;
            if h != NONE {
                self.register(h);
            }
            self.register(i);
            // k may have been skipped as the tail of a run that no longer exists.
            if k != NONE && !self.registered[k] {
                self.register(k);
            }
        }
    }

    fn remaining(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut i = 0;
        while i != NONE {
            out.push(self.sym[i]);
            i = self.next[i];
        }
        out
    }
}

/// Builds a grammar for `text`: one terminal per distinct byte (ascending),
/// then Re-Pair rules in creation order, then the balanced join of whatever
/// sequence remains.
pub fn compress_text(text: &[u8]) -> Result<Slp> {
    if text.is_empty() {
        return Err(Error::invalid("cannot compress an empty text"));
    }
    let mut terminal_id = [u32::MAX; 256];
    let mut rules = Vec::new();
    let mut present = [false; 256];
    for &c in text {
        present[c as usize] = true;
    }
    for c in 0..256usize {
        if present[c] {
            terminal_id[c] = rules.len() as u32;
            rules.push(Rule::Terminal(c as u8));
        }
    }
    let sym = text.iter().map(|&c| terminal_id[c as usize]).collect();
    let mut rp = RePair::new(sym);
    while let Some(pair) = rp.most_frequent() {
        let fresh = rules.len() as u32;
        rules.push(Rule::Pair(RuleId(pair.0), RuleId(pair.1)));
        rp.replace_all(pair, fresh);
    }
    let mut seq = rp.remaining();
    while seq.len() > 1 {
        let mut joined = Vec::with_capacity(seq.len().div_ceil(2));
        for chunk in seq.chunks(2) {
            match *chunk {
                [a, b] => {
                    joined.push(rules.len() as u32);
                    rules.push(Rule::Pair(RuleId(a), RuleId(b)));
                }
                [a] => joined.push(a),
                _ => unreachable!(),
            }
        }
        seq = joined;
    }
    debug_assert_eq!(seq[0] as usize, rules.len() - 1);
    Slp::new(rules)
}
