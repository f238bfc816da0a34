//! Suffix tree of a CS-tree, truncated at depth q.
//!
//! Every CS-tree node contributes the string read from it towards the root,
//! cut to at most q characters and closed by its own terminator. Since no two
//! nodes at depth q or more share their first q characters (when the
//! fingerprints are collision free), everything below depth q is a leaf and
//! truncation loses nothing a q-gram lookup needs. A query walks the reversed
//! q-gram from the root.

use std::collections::HashMap;

use serde::Serialize;

use crate::cstree::CsTree;
use crate::error::{Error, Result};
use crate::fingerprint::{FingerprintParams, Fp};
use crate::table::ProfileTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Byte(u8),
    /// Terminator of one inserted string; never equal to a byte.
    End(u32),
}

#[derive(Clone, Debug)]
struct TrieNode {
    /// String depth, terminator excluded.
    depth: u32,
    /// Incoming edge label: `strings[src][start..end]` (plus the terminator
    /// for leaves).
    src: u32,
    start: u32,
    end: u32,
    children: Vec<(Key, u32)>,
    leaf: Option<Leaf>,
}

#[derive(Clone, Copy, Debug)]
struct Leaf {
    string: u32,
    fp: Option<Fp>,
    counter: Option<u64>,
}

/// The q-gram profile: answers frequency queries in O(q).
#[derive(Clone, Debug)]
pub struct Profile {
    q: usize,
    params: Option<FingerprintParams>,
    nodes: Vec<TrieNode>,
    strings: Vec<Vec<u8>>,
}

/// Two (q-1)-grams that received the same fingerprint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionWitness {
    pub fingerprint: u64,
    pub first: Vec<u8>,
    pub second: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionReport {
    pub witness: Option<CollisionWitness>,
}

impl CollisionReport {
    pub fn is_collision_free(&self) -> bool {
        self.witness.is_none()
    }
}

const ROOT: u32 = 0;

impl Profile {
    /// Profile of a text with no q-grams.
    pub fn empty(q: usize, params: Option<FingerprintParams>) -> Self {
        Profile {
            q,
            params,
            nodes: vec![TrieNode {
                depth: 0,
                src: 0,
                start: 0,
                end: 0,
                children: Vec::new(),
                leaf: None,
            }],
            strings: Vec::new(),
        }
    }

    /// Inserts the root-ward string of every CS-tree node except the root.
    pub fn build(cstree: &CsTree, params: FingerprintParams) -> Self {
        let q = cstree.q();
        let mut profile = Profile::empty(q, Some(params));
        for (i, node) in cstree.nodes().iter().enumerate().skip(1) {
            let s = cstree.rootward(i, q);
            profile.insert(s, node.fp, node.counter);
        }
        profile
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn params(&self) -> Option<&FingerprintParams> {
        self.params.as_ref()
    }

    fn label(&self, node: u32) -> &[u8] {
        let n = &self.nodes[node as usize];
        &self.strings[n.src as usize][n.start as usize..n.end as usize]
    }

    fn child(&self, node: u32, key: Key) -> Option<(usize, u32)> {
        let children = &self.nodes[node as usize].children;
        children
            .binary_search_by_key(&key, |&(k, _)| k)
            .ok()
            .map(|i| (i, children[i].1))
    }

    fn add_child(&mut self, parent: u32, key: Key, node: TrieNode) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        let children = &mut self.nodes[parent as usize].children;
        let at = children.partition_point(|&(k, _)| k < key);
        children.insert(at, (key, id));
        id
    }

    fn insert(&mut self, s: Vec<u8>, fp: Option<Fp>, counter: Option<u64>) {
        let sid = self.strings.len() as u32;
        let len = s.len() as u32;
        self.strings.push(s);
        let leaf = Some(Leaf {
            string: sid,
            fp,
            counter,
        });
        let mut node = ROOT;
        let mut pos = 0u32;
        loop {
            if pos == len {
                self.add_child(
                    node,
                    Key::End(sid),
                    TrieNode {
                        depth: pos,
                        src: sid,
                        start: pos,
                        end: pos,
                        children: Vec::new(),
                        leaf,
                    },
                );
                return;
            }
            let byte = self.strings[sid as usize][pos as usize];
            let Some((slot, c)) = self.child(node, Key::Byte(byte)) else {
                self.add_child(
                    node,
                    Key::Byte(byte),
                    TrieNode {
                        depth: len,
                        src: sid,
                        start: pos,
                        end: len,
                        children: Vec::new(),
                        leaf,
                    },
                );
                return;
            };
            let label = self.label(c);
            let rest = &self.strings[sid as usize][pos as usize..];
            let m = label.iter().zip(rest).take_while(|(a, b)| a == b).count() as u32;
            let label_len = label.len() as u32;
            let next_key = if m < label_len {
                Key::Byte(label[m as usize])
            } else {
                // Only reachable for a leaf whose bytes are all matched.
                match self.nodes[c as usize].leaf {
                    Some(l) => Key::End(l.string),
                    None => {
                        node = c;
                        pos += m;
                        continue;
                    }
                }
            };
            // Split the edge into `c` after `m` bytes.
            let cn = &self.nodes[c as usize];
            let mid = TrieNode {
                depth: pos + m,
                src: cn.src,
                start: cn.start,
                end: cn.start + m,
                children: vec![(next_key, c)],
                leaf: None,
            };
            let mid_id = self.nodes.len() as u32;
            self.nodes.push(mid);
            self.nodes[c as usize].start += m;
            self.nodes[node as usize].children[slot].1 = mid_id;
            node = mid_id;
            pos += m;
        }
    }

    /// Number of occurrences of `gram`, 0 if it does not occur. Errors if
    /// `gram` is not exactly q bytes long.
    pub fn query(&self, gram: &[u8]) -> Result<u64> {
        if gram.len() != self.q {
            return Err(Error::invalid(format!(
                "query has {} bytes, expected q = {}",
                gram.len(),
                self.q
            )));
        }
        let q = self.q;
        let mut node = ROOT;
        let mut pos = 0usize;
        while pos < q {
            let byte = gram[q - 1 - pos];
            let Some((_, c)) = self.child(node, Key::Byte(byte)) else {
                return Ok(0);
            };
            let label = self.label(c);
            let take = label.len().min(q - pos);
            let matches = (0..take).all(|i| label[i] == gram[q - 1 - pos - i]);
            if !matches {
                return Ok(0);
            }
            pos += take;
            node = c;
            if pos < q && self.nodes[c as usize].leaf.is_some() {
                return Ok(0);
            }
        }
        let n = &self.nodes[node as usize];
        if let Some(leaf) = n.leaf {
            return Ok(leaf.counter.unwrap_or(0));
        }
        // An internal node at depth q only exists if the fingerprints
        // collided; its children are all terminators.
        Ok(n.children
            .iter()
            .filter_map(|&(_, c)| self.nodes[c as usize].leaf)
            .filter_map(|l| l.counter)
            .sum())
    }

    /// All q-grams with their counts, sorted by q-gram.
    pub fn enumerate(&self) -> Vec<(Vec<u8>, u64)> {
        let mut out: Vec<(Vec<u8>, u64)> = self
            .nodes
            .iter()
            .filter_map(|n| n.leaf)
            .filter_map(|leaf| {
                let s = &self.strings[leaf.string as usize];
                match leaf.counter {
                    Some(count) if s.len() == self.q => {
                        Some((s.iter().rev().copied().collect(), count))
                    }
                    _ => None,
                }
            })
            .collect();
        out.sort();
        // Equal q-grams only appear together after a fingerprint collision.
        out.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        out
    }

    pub fn table(&self) -> ProfileTable {
        ProfileTable::from_counts(self.q, self.enumerate())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.leaf.is_some()).count()
    }

    /// Largest string depth of an internal node (root excluded), if any.
    pub fn deepest_internal_depth(&self) -> Option<usize> {
        self.nodes
            .iter()
            .skip(1)
            .filter(|n| n.leaf.is_none())
            .map(|n| n.depth as usize)
            .max()
    }

    /// Internal nodes other than the root have at least two children and
    /// every non-root edge label is nonempty (counting terminators).
    pub fn is_compact(&self) -> bool {
        self.nodes.iter().skip(1).all(|n| {
            let label_ok = n.end > n.start || n.leaf.is_some();
            let branching = n.leaf.is_some() || n.children.len() >= 2;
            label_ok && branching
        })
    }

    /// Checks that no two leaves carry the same fingerprint while their
    /// strings differ within the first q-1 characters.
    ///
    /// Pass one records, for every leaf, its shallowest ancestor of string
    /// depth at least q-1; two leaves share the first q-1 characters iff they
    /// share that ancestor. Pass two looks for a fingerprint seen under two
    /// different ancestors.
    pub fn verify_collision_free(&self) -> CollisionReport {
        let threshold = self.q as u32 - 1;
        let mut anchors: Vec<(u32, u32)> = Vec::new();
        let mut stack: Vec<(u32, Option<u32>)> = vec![(ROOT, None)];
        while let Some((node, anchor)) = stack.pop() {
            let n = &self.nodes[node as usize];
            let anchor = anchor.or((node != ROOT && n.depth >= threshold).then_some(node));
            if n.leaf.is_some() {
                if let Some(a) = anchor {
                    anchors.push((node, a));
                }
                continue;
            }
            for &(_, c) in &n.children {
                stack.push((c, anchor));
            }
        }

        let mut seen: HashMap<Fp, (u32, u32)> = HashMap::new();
        for (leaf_node, anchor) in anchors {
            let Some(leaf) = self.nodes[leaf_node as usize].leaf else {
                continue;
            };
            let Some(fp) = leaf.fp else { continue };
            match seen.get(&fp) {
                None => {
                    seen.insert(fp, (anchor, leaf.string));
                }
                Some(&(other_anchor, other_string)) if other_anchor != anchor => {
                    let gram = |sid: u32| -> Vec<u8> {
                        let s = &self.strings[sid as usize];
                        s[..threshold as usize].iter().rev().copied().collect()
                    };
                    return CollisionReport {
                        witness: Some(CollisionWitness {
                            fingerprint: fp.value(),
                            first: gram(other_string),
                            second: gram(leaf.string),
                        }),
                    };
                }
                Some(_) => {}
            }
        }
        CollisionReport { witness: None }
    }
}
