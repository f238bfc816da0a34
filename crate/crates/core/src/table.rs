//! Flat q-gram frequency tables, their TSV form and the q-gram distance.
//!
//! ```text
//! # gqprof v1 q=3 total=6
//! aba    1
//! abb    1
//! bab    2
//! ```
//!
//! Gram and count are separated by a tab. Grams are sorted ascending by byte value. Bytes outside printable ASCII,
//! and the backslash itself, are written `\xHH`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProfileTable {
    q: usize,
    counts: BTreeMap<Vec<u8>, u64>,
}

impl ProfileTable {
    pub fn new(q: usize) -> Self {
        ProfileTable {
            q,
            counts: BTreeMap::new(),
        }
    }

    /// Collects `(gram, count)` pairs, summing repeats and dropping zeros.
    pub fn from_counts(q: usize, counts: impl IntoIterator<Item = (Vec<u8>, u64)>) -> Self {
        let mut table = ProfileTable::new(q);
        for (gram, count) in counts {
            if count > 0 {
                *table.counts.entry(gram).or_insert(0) += count;
            }
        }
        table
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn get(&self, gram: &[u8]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], u64)> {
        self.counts.iter().map(|(g, &c)| (g.as_slice(), c))
    }

    pub fn counts(&self) -> &BTreeMap<Vec<u8>, u64> {
        &self.counts
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# gqprof v1 q={} total={}\n", self.q, self.total());
        for (gram, count) in self.iter() {
            escape_gram(&mut out, gram);
            let _ = writeln!(out, "\t{count}");
        }
        out
    }

    pub fn from_tsv(input: &str) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (q, total) = parse_header(header)?;
        let mut table = ProfileTable::new(q);
        for (i, line) in lines {
            let lineno = i + 1;
            let perr = |msg: String| Error::Parse { line: lineno, msg };
            let (gram, count) = line
                .split_once('\t')
                .ok_or_else(|| perr("expected `<gram>\\t<count>`".into()))?;
            let gram = unescape_gram(gram).map_err(perr)?;
            if gram.len() != q {
                return Err(perr(format!("gram has {} bytes, expected {q}", gram.len())));
            }
            let count: u64 = count
                .parse()
                .map_err(|_| perr(format!("bad count {count:?}")))?;
            if table.counts.insert(gram, count).is_some() {
                return Err(perr("duplicate gram".into()));
            }
        }
        if table.total() != total {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header total {total} but counts sum to {}", table.total()),
            });
        }
        Ok(table)
    }
}

fn parse_header(line: &str) -> Result<(usize, u64)> {
    let bad = || Error::Parse {
        line: 1,
        msg: format!("expected `# gqprof v1 q=<q> total=<sum>`, found {line:?}"),
    };
    let rest = line.strip_prefix("# gqprof v1 ").ok_or_else(bad)?;
    let mut q = None;
    let mut total = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("q", v)) => q = v.parse().ok(),
            Some(("total", v)) => total = v.parse().ok(),
            _ => return Err(bad()),
        }
    }
    Ok((q.ok_or_else(bad)?, total.ok_or_else(bad)?))
}

pub fn escape_gram(out: &mut String, gram: &[u8]) {
    for &c in gram {
        match c {
            b'\\' => out.push_str("\\x5c"),
            0x20..=0x7e => out.push(c as char),
            _ => {
                let _ = write!(out, "\\x{c:02x}");
            }
        }
    }
}

/// Inverse of [`escape_gram`]; also accepts a literal backslash-free string.
pub fn unescape_gram(s: &str) -> std::result::Result<Vec<u8>, String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'\\' {
            let hex = bytes
                .get(i + 1..i + 4)
                .filter(|h| h[0] == b'x')
                .and_then(|h| std::str::from_utf8(&h[1..]).ok())
                .and_then(|h| u8::from_str_radix(h, 16).ok())
                .ok_or_else(|| format!("bad escape in {s:?}"))?;
            out.push(hex);
            i += 4;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    Ok(out)
}

/// L1 distance between two profiles over the union of their q-grams.
pub fn qgram_distance(a: &ProfileTable, b: &ProfileTable) -> Result<u64> {
    if a.q != b.q {
        return Err(Error::QMismatch(a.q, b.q));
    }
    // Merge of the two sorted key sequences.
    let mut dist = 0u64;
    let (mut xs, mut ys) = (a.counts.iter().peekable(), b.counts.iter().peekable());
    loop {
        match (xs.peek(), ys.peek()) {
            (Some((ga, &ca)), Some((gb, &cb))) => match ga.cmp(gb) {
                Ordering::Less => {
                    dist += ca;
                    xs.next();
                }
                Ordering::Greater => {
                    dist += cb;
                    ys.next();
                }
                Ordering::Equal => {
                    dist += ca.abs_diff(cb);
                    xs.next();
                    ys.next();
                }
            },
            (Some((_, &ca)), None) => {
                dist += ca;
                xs.next();
            }
            (None, Some((_, &cb))) => {
                dist += cb;
                ys.next();
            }
            (None, None) => return Ok(dist),
        }
    }
}
