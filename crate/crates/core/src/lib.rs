//! q-gram profiles of strings given as straight-line programs (SLPs), built
//! without decompressing the text.
//!
//! The profile answers "how often does this length-q substring occur" in
//! O(q) time. Building it touches each grammar rule once: the q-grams that
//! cross the boundary between a rule's two children are inserted into a
//! graph of (q-1)-gram fingerprints, weighted by how often the rule occurs in
//! the derivation tree. The graph is unfolded into a tree of reversed
//! strings, and a suffix tree over that tree serves the queries. A final pass
//! over the suffix tree proves the fingerprints collision free, retrying with
//! a new random base otherwise, so a returned profile is always exact.
//!
//! ```
//! use gqprof::{build_profile, parse_slp};
//!
//! let slp = parse_slp("X1 = 'a'\nX2 = 'b'\nX3 = X1 X2\nX4 = X3 X3\n")?;
//! let build = build_profile(&slp, 2, 1)?;
//! assert_eq!(build.profile.query(b"ab")?, 2);
//! assert_eq!(build.profile.query(b"ba")?, 1);
//! # Ok::<(), gqprof::Error>(())
//! ```

pub mod cstree;
mod error;
pub mod fingerprint;
pub mod graph;
pub mod oracle;
pub mod par;
pub mod pipeline;
pub mod profile;
pub mod slp;
pub mod table;
pub mod testkit;

pub use cstree::CsTree;
pub use error::{Error, Result};
pub use fingerprint::{FingerprintParams, Fp};
pub use graph::{Cursor, QGramGraph};
pub use par::Exec;
pub use pipeline::{
    build_profile, build_profile_basic, build_profile_basic_with, build_profile_improved,
    build_profile_with, build_profiles, count_unigrams, distance_matrix, Algorithm, Build,
    BuildConfig, BuildStats,
};
pub use profile::{CollisionReport, CollisionWitness, Profile};
pub use slp::{compress_text, parse_slp, write_slp, Rule, RuleId, Slp};
pub use table::{qgram_distance, ProfileTable};
