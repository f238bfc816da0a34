//! End-to-end profile construction.
//!
//! Two ways to fill the q-gram graph:
//!
//! * [`build_profile_basic`] decompresses the relevant substring of every rule
//!   deriving at least q characters and inserts it on its own, weighted by
//!   the rule's occurrence count. Rules are independent, so decompression
//!   runs in parallel.
//! * [`build_profile_improved`] walks the grammar depth-first, left to right,
//!   feeding characters to one running construction. A rule is expanded only
//!   the first time it is met; later visits decompress its first q-1
//!   characters and jump to the graph node recorded for its last q-1.
//!   Every q-gram is charged to the rule whose relevant substring it belongs
//!   to through a FIFO of pending rules, each holding the number of q-grams
//!   still owed to it.
//!
//! [`build_profile`] wraps either in a verify-and-retry loop.

use std::collections::VecDeque;
use std::str::FromStr;

use serde::Serialize;

use crate::cstree::CsTree;
use crate::error::{Error, Result};
use crate::fingerprint::FingerprintParams;
use crate::graph::{Cursor, NodeId, QGramGraph};
use crate::par::Exec;
use crate::profile::Profile;
use crate::slp::{Decompressor, Rule, RuleId, Slp};
use crate::table::{qgram_distance, ProfileTable};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Basic,
    #[default]
    Improved,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Algorithm::Basic),
            "improved" => Ok(Algorithm::Improved),
            _ => Err(Error::invalid(format!(
                "unknown algorithm {s:?} (expected basic or improved)"
            ))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Basic => "basic",
            Algorithm::Improved => "improved",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub algorithm: Algorithm,
    /// Number of grammar rules.
    pub n: usize,
    /// Length of the derived text.
    #[serde(rename = "N")]
    pub text_len: u64,
    pub q: usize,
    /// Rules deriving at least q characters.
    #[serde(rename = "size_Sq")]
    pub rules_in_sq: usize,
    pub chars_decompressed: u64,
    pub distinct_qgrams: usize,
    pub total_qgrams: u64,
    pub retries: usize,
}

/// Everything one construction produces.
#[derive(Clone, Debug)]
pub struct Build {
    pub profile: Profile,
    pub graph: QGramGraph,
    /// `None` when the text has no q-grams.
    pub cstree: Option<CsTree>,
    pub stats: BuildStats,
}

fn finish(
    slp: &Slp,
    params: FingerprintParams,
    graph: QGramGraph,
    first_gram: Option<&[u8]>,
    algorithm: Algorithm,
    chars_decompressed: u64,
) -> Result<Build> {
    let q = params.q();
    let (profile, cstree) = match first_gram {
        Some(first) => {
            let cstree = CsTree::build(&graph, first)?;
            (Profile::build(&cstree, params), Some(cstree))
        }
        None => (Profile::empty(q, Some(params)), None),
    };
    let stats = BuildStats {
        algorithm,
        n: slp.num_rules(),
        text_len: slp.text_len(),
        q,
        rules_in_sq: slp.relevant_rules(q).count(),
        chars_decompressed,
        distinct_qgrams: graph.edge_count(),
        total_qgrams: graph.total_count(),
        retries: 0,
    };
    Ok(Build {
        profile,
        graph,
        cstree,
        stats,
    })
}

/// One relevant substring per rule, inserted in ascending rule order.
pub fn build_profile_basic(slp: &Slp, params: FingerprintParams) -> Result<Build> {
    build_profile_basic_with(slp, params, Exec::default())
}

/// [`build_profile_basic`] with explicit control over how the relevant
/// substrings are decompressed.
pub fn build_profile_basic_with(slp: &Slp, params: FingerprintParams, exec: Exec) -> Result<Build> {
    let q = params.q();
    if slp.text_len() < q as u64 {
        return finish(
            slp,
            params.clone(),
            QGramGraph::empty(params),
            None,
            Algorithm::Basic,
            0,
        );
    }
    let dec = Decompressor::new(slp);
    let first = dec.prefix_vec(slp.start(), (q - 1) as u64)?;
    let rules: Vec<RuleId> = slp.relevant_rules(q).collect();
    let relevant = exec.map(&rules, |&x| dec.relevant(x, q));
    let (mut graph, _) = QGramGraph::start(params.clone(), &first)?;
    for r in relevant {
        let r = r?;
        graph.insert_relevant_substring(&r.text, slp.occ(r.rule))?;
    }
    finish(
        slp,
        params,
        graph,
        Some(&first),
        Algorithm::Basic,
        dec.emitted(),
    )
}

/// Graph node and characters for the last q-1 characters of a rule that has
/// been fully traversed once.
struct Anchor {
    node: NodeId,
    window: Vec<u8>,
}

/// The running construction of the improved traversal.
struct Stream<'a> {
    slp: &'a Slp,
    window: usize,
    graph: QGramGraph,
    cursor: Option<Cursor>,
    /// The first q-1 characters of the text, until the graph is started.
    first: Vec<u8>,
    /// Rules whose crossing q-grams are being read, with how many remain.
    pending: VecDeque<(RuleId, u64)>,
}

impl Stream<'_> {
    fn feed(&mut self, c: u8) -> Result<()> {
        let Some(cursor) = self.cursor.as_mut() else {
            self.first.push(c);
            if self.first.len() == self.window {
                let (graph, cursor) = QGramGraph::start(self.graph.params().clone(), &self.first)?;
                self.graph = graph;
                self.cursor = Some(cursor);
            }
            return Ok(());
        };
        let Some(head) = self.pending.front_mut() else {
            return Err(Error::Accounting(format!(
                "character {c:#04x} decompressed with no rule pending"
            )));
        };
        let weight = self.slp.occ(head.0);
        self.graph.extend(cursor, c, weight)?;
        head.1 -= 1;
        if head.1 == 0 {
            self.pending.pop_front();
        }
        Ok(())
    }

    fn feed_all(&mut self, chars: &[u8]) -> Result<()> {
        chars.iter().try_for_each(|&c| self.feed(c))
    }
}

enum Frame {
    Enter(RuleId),
    Right(RuleId),
    Leave(RuleId),
}

/// Depth-first traversal that decompresses `(q-1) + Σ (|r_X| - (q-1))`
/// characters over the rules `X` deriving at least q characters.
pub fn build_profile_improved(slp: &Slp, params: FingerprintParams) -> Result<Build> {
    let q = params.q();
    let window = q - 1;
    if slp.text_len() < q as u64 {
        return finish(
            slp,
            params.clone(),
            QGramGraph::empty(params),
            None,
            Algorithm::Improved,
            0,
        );
    }
    let dec = Decompressor::new(slp);
    let mut stream = Stream {
        slp,
        window,
        graph: QGramGraph::empty(params.clone()),
        cursor: None,
        first: Vec::with_capacity(window),
        pending: VecDeque::new(),
    };
    let mut anchors: Vec<Option<Anchor>> = (0..slp.num_rules()).map(|_| None).collect();
    let mut buf = Vec::with_capacity(window);
    let mut stack = vec![Frame::Enter(slp.start())];
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Enter(x) if slp.len_of(x) < q as u64 => {
                buf.clear();
                dec.full(x, &mut |c| buf.push(c));
                stream.feed_all(&buf)?;
            }
            Frame::Enter(x) => {
                if let Some(anchor) = &anchors[x.index()] {
                    buf.clear();
                    dec.prefix(x, window as u64, &mut |c| buf.push(c))?;
                    stream.feed_all(&buf)?;
                    stream.cursor = Some(stream.graph.cursor_at(anchor.node, &anchor.window));
                    continue;
                }
                let Rule::Pair(left, _) = slp.rule(x) else {
                    unreachable!("rules deriving q >= 2 characters are pairs")
                };
                stack.push(Frame::Leave(x));
                stack.push(Frame::Right(x));
                stack.push(Frame::Enter(left));
            }
            Frame::Right(x) => {
                let Rule::Pair(_, right) = slp.rule(x) else {
                    unreachable!()
                };
                let owed = slp.relevant_len(x, q).expect("pair rule") - window as u64;
                stream.pending.push_back((x, owed));
                stack.push(Frame::Enter(right));
            }
            Frame::Leave(x) => {
                let cursor = stream
                    .cursor
                    .as_ref()
                    .expect("a rule deriving q characters completes the first window");
                anchors[x.index()] = Some(Anchor {
                    node: cursor.node(),
                    window: cursor.window(),
                });
            }
        }
    }
    if let Some(&(rule, owed)) = stream.pending.front() {
        return Err(Error::Accounting(format!(
            "{rule} still owed {owed} q-grams at the end of the text"
        )));
    }
    let first = stream.first;
    finish(
        slp,
        params,
        stream.graph,
        Some(&first),
        Algorithm::Improved,
        dec.emitted(),
    )
}

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub algorithm: Algorithm,
    /// Rebuilds allowed after a detected collision.
    pub max_retries: usize,
    /// Used by the basic algorithm for relevant-substring decompression.
    pub exec: Exec,
    /// Forces a small modulus on the first attempt. Test hook.
    #[doc(hidden)]
    pub first_attempt_modulus: Option<u64>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            algorithm: Algorithm::Improved,
            max_retries: 8,
            exec: Exec::default(),
            first_attempt_modulus: None,
        }
    }
}

/// Builds a verified profile with the default configuration.
pub fn build_profile(slp: &Slp, q: usize, seed: u64) -> Result<Build> {
    build_profile_with(slp, q, seed, &BuildConfig::default())
}

/// Builds, verifies, and on a detected fingerprint collision rebuilds with
/// the base drawn from `seed + attempt`. Every returned profile has passed
/// [`Profile::verify_collision_free`].
pub fn build_profile_with(slp: &Slp, q: usize, seed: u64, config: &BuildConfig) -> Result<Build> {
    let mut witnesses = Vec::new();
    for attempt in 0..=config.max_retries {
        let params = match (attempt, config.first_attempt_modulus) {
            (0, Some(p)) => FingerprintParams::with_modulus(q, seed, p)?,
            _ => FingerprintParams::new(q, seed.wrapping_add(attempt as u64))?,
        };
        let mut build = match config.algorithm {
            Algorithm::Basic => build_profile_basic_with(slp, params, config.exec)?,
            Algorithm::Improved => build_profile_improved(slp, params)?,
        };
        match build.profile.verify_collision_free().witness {
            None => {
                build.stats.retries = attempt;
                return Ok(build);
            }
            Some(w) => witnesses.push(w),
        }
    }
    Err(Error::RetriesExhausted {
        attempts: config.max_retries + 1,
        witnesses,
    })
}

/// Verified profiles of many grammars, evaluated according to `config.exec`.
pub fn build_profiles(
    slps: &[Slp],
    q: usize,
    seed: u64,
    config: &BuildConfig,
) -> Vec<Result<Build>> {
    let inner = BuildConfig {
        exec: Exec::Sequential,
        ..config.clone()
    };
    config
        .exec
        .map(slps, |slp| build_profile_with(slp, q, seed, &inner))
}

/// All pairwise q-gram distances.
pub fn distance_matrix(tables: &[ProfileTable], exec: Exec) -> Result<Vec<Vec<u64>>> {
    exec.map(tables, |a| {
        tables
            .iter()
            .map(|b| qgram_distance(a, b))
            .collect::<Result<Vec<u64>>>()
    })
    .into_iter()
    .collect()
}

/// Character frequencies read off the terminal rules' occurrence counts.
pub fn count_unigrams(slp: &Slp) -> ProfileTable {
    ProfileTable::from_counts(
        1,
        slp.ids().filter_map(|id| match slp.rule(id) {
            Rule::Terminal(c) => Some((vec![c], slp.occ(id))),
            Rule::Pair(..) => None,
        }),
    )
}
