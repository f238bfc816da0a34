//! Common-suffix tree of a q-gram graph.
//!
//! The tree is the depth-first tree of the graph from its start node, where
//! every graph edge that leads back to an already visited node becomes an
//! edge to a fresh leaf. Above the depth-first root hangs a path spelling the
//! first (q-1)-gram of the text, so reading characters from any node up to
//! the root spells a reversed substring of the text.

use crate::error::{Error, Result};
use crate::fingerprint::Fp;
use crate::graph::{NodeId, QGramGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsNode {
    pub parent: Option<usize>,
    /// Character on the edge to the parent.
    pub ch: Option<u8>,
    /// Counter of the graph edge this tree edge copies; `None` on the prefix
    /// path.
    pub counter: Option<u64>,
    /// Fingerprint label of the graph node this tree node copies.
    pub fp: Option<Fp>,
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct CsTree {
    nodes: Vec<CsNode>,
    df_root: usize,
    q: usize,
}

impl CsTree {
    /// Builds the tree from `graph`, whose start node must be labeled with the
    /// fingerprint of `first_gram`. Edges are followed in ascending character
    /// order.
    pub fn build(graph: &QGramGraph, first_gram: &[u8]) -> Result<Self> {
        let q = graph.q();
        let fp = graph.params().hash(first_gram)?;
        let start = graph
            .start_node()
            .ok_or_else(|| Error::invalid("graph has no start node"))?;
        if graph.label(start) != fp {
            return Err(Error::invalid(
                "first (q-1)-gram does not match the graph's start node",
            ));
        }

        let mut nodes = vec![CsNode {
            parent: None,
            ch: None,
            counter: None,
            fp: None,
            depth: 0,
        }];
        for (i, &c) in first_gram.iter().enumerate() {
            nodes.push(CsNode {
                parent: Some(i),
                ch: Some(c),
                counter: None,
                fp: None,
                depth: i + 1,
            });
        }
        let df_root = nodes.len() - 1;
        nodes[df_root].fp = Some(fp);

        let mut visited = vec![false; graph.node_count()];
        visited[start.index()] = true;
        // (graph node, tree node, next edge index)
        let mut stack: Vec<(NodeId, usize, usize)> = vec![(start, df_root, 0)];
        while let Some(top) = stack.last_mut() {
            let (gnode, tnode, next) = *top;
            let edges = graph.edges(gnode);
            if next == edges.len() {
                stack.pop();
                continue;
            }
            top.2 += 1;
            let (c, edge) = edges[next];
            let child = nodes.len();
            nodes.push(CsNode {
                parent: Some(tnode),
                ch: Some(c),
                counter: Some(edge.count),
                fp: Some(graph.label(edge.target)),
                depth: nodes[tnode].depth + 1,
            });
            if !visited[edge.target.index()] {
                visited[edge.target.index()] = true;
                stack.push((edge.target, child, 0));
            }
        }
        Ok(CsTree { nodes, df_root, q })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn nodes(&self) -> &[CsNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Top of the depth-first tree, the last node of the prefix path.
    pub fn df_root(&self) -> usize {
        self.df_root
    }

    /// Characters read from `node` towards the root, at most `limit` of them.
    pub fn rootward(&self, node: usize, limit: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(limit.min(self.nodes[node].depth));
        let mut cur = node;
        while out.len() < limit {
            let n = &self.nodes[cur];
            match (n.ch, n.parent) {
                (Some(c), Some(p)) => {
                    out.push(c);
                    cur = p;
                }
                _ => break,
            }
        }
        out
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        // Children always come after their parent.
        !self.nodes[node + 1..]
            .iter()
            .any(|n| n.parent == Some(node))
    }
}
