//! The q-gram graph: one node per distinct (q-1)-gram, keyed only by its
//! fingerprint, and one character-labeled edge per distinct q-gram carrying
//! its occurrence count.
//!
//! Construction is Monte Carlo: two (q-1)-grams with equal fingerprints share
//! a node. [`crate::profile::Profile::verify_collision_free`] detects this
//! after the fact.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fingerprint::{FingerprintParams, Fp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: NodeId,
    pub count: u64,
}

#[derive(Clone, Debug)]
pub struct QGramGraph {
    params: FingerprintParams,
    index: HashMap<Fp, NodeId>,
    labels: Vec<Fp>,
    /// Per node, outgoing edges sorted by character.
    edges: Vec<Vec<(u8, Edge)>>,
    start: Option<NodeId>,
    edge_count: usize,
    total: u64,
}

/// Position of an ongoing construction: the node for the last `q - 1`
/// characters consumed, their fingerprint, and the characters themselves so
/// the fingerprint can be rolled forward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cursor {
    node: NodeId,
    window_fp: Fp,
    window: VecDeque<u8>,
}

impl Cursor {
    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn fingerprint(&self) -> Fp {
        self.window_fp
    }

    pub fn window(&self) -> Vec<u8> {
        self.window.iter().copied().collect()
    }
}

impl QGramGraph {
    /// A graph with no nodes, for texts shorter than `q`.
    pub fn empty(params: FingerprintParams) -> Self {
        QGramGraph {
            params,
            index: HashMap::new(),
            labels: Vec::new(),
            edges: Vec::new(),
            start: None,
            edge_count: 0,
            total: 0,
        }
    }

    /// A graph holding just the start node for `seed_gram`, the first
    /// (q-1)-gram of the text.
    pub fn start(params: FingerprintParams, seed_gram: &[u8]) -> Result<(Self, Cursor)> {
        let mut graph = Self::empty(params);
        let cursor = graph.seek(seed_gram)?;
        graph.start = Some(cursor.node);
        Ok((graph, cursor))
    }

    /// Builds the graph of `text` in one left-to-right pass.
    pub fn from_text(params: FingerprintParams, text: &[u8]) -> Result<Self> {
        let q = params.q();
        if text.len() < q {
            return Err(Error::invalid(format!(
                "text of length {} has no {q}-grams",
                text.len()
            )));
        }
        let (mut graph, mut cursor) = Self::start(params, &text[..q - 1])?;
        for &c in &text[q - 1..] {
            graph.extend(&mut cursor, c, 1)?;
        }
        Ok(graph)
    }

    fn node_for(&mut self, fp: Fp) -> NodeId {
        if let Some(&id) = self.index.get(&fp) {
            return id;
        }
        let id = NodeId(self.labels.len() as u32);
        self.index.insert(fp, id);
        self.labels.push(fp);
        self.edges.push(Vec::new());
        id
    }

    /// Cursor at the node for `gram`, creating the node if needed. Edges are
    /// not touched.
    pub fn seek(&mut self, gram: &[u8]) -> Result<Cursor> {
        let fp = self.params.hash(gram)?;
        let node = self.node_for(fp);
        Ok(Cursor {
            node,
            window_fp: fp,
            window: gram.iter().copied().collect(),
        })
    }

    /// Cursor at an existing node whose (q-1)-gram is known to be `window`.
    pub(crate) fn cursor_at(&self, node: NodeId, window: &[u8]) -> Cursor {
        Cursor {
            node,
            window_fp: self.labels[node.index()],
            window: window.iter().copied().collect(),
        }
    }

    /// Consumes `ch`: the q-gram formed by the cursor's window and `ch` gains
    /// `weight` occurrences, and the cursor moves to the node of the shifted
    /// window.
    pub fn extend(&mut self, cursor: &mut Cursor, ch: u8, weight: u64) -> Result<()> {
        if weight == 0 {
            return Err(Error::invalid("edge weight must be positive"));
        }
        let out = cursor
            .window
            .pop_front()
            .expect("cursor window holds q-1 characters");
        cursor.window.push_back(ch);
        let fp = self.params.roll(cursor.window_fp, out, ch);
        let target = self.node_for(fp);
        let total = self
            .total
            .checked_add(weight)
            .ok_or(Error::Overflow("edge counters"))?;
        let list = &mut self.edges[cursor.node.index()];
        match list.binary_search_by_key(&ch, |&(c, _)| c) {
            Ok(i) => {
                // The targets can differ only after a fingerprint collision,
                // which verification reports later.
                let edge = &mut list[i].1;
                edge.count = edge
                    .count
                    .checked_add(weight)
                    .ok_or(Error::Overflow("edge counters"))?;
            }
            Err(i) => {
                list.insert(
                    i,
                    (
                        ch,
                        Edge {
                            target,
                            count: weight,
                        },
                    ),
                );
                self.edge_count += 1;
            }
        }
        self.total = total;
        cursor.node = target;
        cursor.window_fp = fp;
        Ok(())
    }

    /// Inserts every q-gram of `r`, each weighted by `weight`.
    pub fn insert_relevant_substring(&mut self, r: &[u8], weight: u64) -> Result<()> {
        let w = self.params.window();
        if r.len() <= w {
            return Err(Error::invalid(format!(
                "substring of length {} has no {}-grams",
                r.len(),
                w + 1
            )));
        }
        let mut cursor = self.seek(&r[..w])?;
        for &c in &r[w..] {
            self.extend(&mut cursor, c, weight)?;
        }
        Ok(())
    }

    pub fn params(&self) -> &FingerprintParams {
        &self.params
    }

    pub fn q(&self) -> usize {
        self.params.q()
    }

    pub fn start_node(&self) -> Option<NodeId> {
        self.start
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sum of all edge counters.
    pub fn total_count(&self) -> u64 {
        self.total
    }

    pub fn label(&self, node: NodeId) -> Fp {
        self.labels[node.index()]
    }

    pub fn find(&self, fp: Fp) -> Option<NodeId> {
        self.index.get(&fp).copied()
    }

    /// Outgoing edges of `node` in ascending character order.
    pub fn edges(&self, node: NodeId) -> &[(u8, Edge)] {
        &self.edges[node.index()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len() as u32).map(NodeId)
    }

    /// Graphviz rendering: nodes labeled with their fingerprint in hex, edges
    /// with `char/count`. The start node is drawn with a double border.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph qgram_graph {\n");
        for node in self.nodes() {
            let _ = write!(out, "  n{} [label=\"{:x}\"", node.0, self.label(node));
            if Some(node) == self.start {
                out.push_str(", peripheries=2");
            }
            out.push_str("];\n");
        }
        for node in self.nodes() {
            for &(c, edge) in self.edges(node) {
                let _ = writeln!(
                    out,
                    "  n{} -> n{} [label=\"{}/{}\"];",
                    node.0,
                    edge.target.0,
                    dot_char(c),
                    edge.count
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

fn dot_char(c: u8) -> String {
    match c {
        b'"' => "\\\"".into(),
        b'\\' => "\\\\".into(),
        0x20..=0x7e => (c as char).to_string(),
        _ => format!("\\\\x{c:02x}"),
    }
}
