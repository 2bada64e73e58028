//! Effort-To-Compress via Non-Sequential Recursive Pair Substitution.
//!
//! Each NSRPS pass finds the most frequent adjacent pair, counting
//! non-overlapping occurrences left to right (ties go to the pair seen
//! first), and replaces every non-overlapping occurrence with a fresh
//! symbol. ETC is the number of passes until the sequence is constant or
//! has a single symbol left.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    symbols: Vec<u32>,
    alphabet_size: u32,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<u32>, alphabet_size: u32) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(Error::Domain {
                value: f64::from(bad),
                domain: "[0, alphabet_size)",
            });
        }
        Ok(Self {
            symbols,
            alphabet_size,
        })
    }

    /// Alphabet size inferred as `max + 1`.
    pub fn from_symbols(symbols: Vec<u32>) -> Self {
        let alphabet_size = symbols.iter().max().map_or(0, |&m| m + 1);
        Self {
            symbols,
            alphabet_size,
        }
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `self` followed by `other`, over the larger alphabet.
    pub fn concat(&self, other: &SymbolSequence) -> SymbolSequence {
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.symbols);
        symbols.extend_from_slice(&other.symbols);
        SymbolSequence {
            symbols,
            alphabet_size: self.alphabet_size.max(other.alphabet_size),
        }
    }

    /// Window `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> SymbolSequence {
        SymbolSequence {
            symbols: self.symbols[start..end].to_vec(),
            alphabet_size: self.alphabet_size,
        }
    }
}

#[derive(Clone, Copy)]
struct PairStat {
    count: u32,
    first: u32,
    // start index of the most recent counted occurrence, offset by one
    last_plus_one: u32,
}

fn is_homogeneous(seq: &[u32]) -> bool {
    seq.windows(2).all(|w| w[0] == w[1])
}

/// Runs NSRPS on `seq` in place and returns the number of passes.
fn nsrps(mut seq: Vec<u32>, mut next_symbol: u32) -> usize {
    let mut passes = 0;
    let mut stats: FxHashMap<(u32, u32), PairStat> = FxHashMap::default();
    while seq.len() > 1 && !is_homogeneous(&seq) {
        stats.clear();
        for i in 0..seq.len() - 1 {
            let key = (seq[i], seq[i + 1]);
            let st = stats.entry(key).or_insert(PairStat {
                count: 0,
                first: i as u32,
                last_plus_one: 0,
            });
            // an occurrence starting right after the last counted one overlaps it
            if st.last_plus_one == 0 || i as u32 > st.last_plus_one {
                st.count += 1;
                st.last_plus_one = i as u32 + 1;
            }
        }
        let (&(a, b), _) = stats
            .iter()
            .max_by(|(_, x), (_, y)| x.count.cmp(&y.count).then(y.first.cmp(&x.first)))
            .expect("sequence has at least one pair");

        let mut out = Vec::with_capacity(seq.len());
        let mut i = 0;
        while i < seq.len() {
            if i + 1 < seq.len() && seq[i] == a && seq[i + 1] == b {
                out.push(next_symbol);
                i += 2;
            } else {
                out.push(seq[i]);
                i += 1;
            }
        }
        seq = out;
        next_symbol += 1;
        passes += 1;
    }
    passes
}

/// Number of NSRPS passes needed to make `seq` constant.
pub fn etc(seq: &SymbolSequence) -> Result<usize> {
    if seq.is_empty() {
        return Err(Error::Empty("symbol sequence"));
    }
    Ok(nsrps(seq.symbols.clone(), seq.alphabet_size))
}

/// `etc / (len - 1)`, and 0 for a single symbol.
pub fn etc_normalized(seq: &SymbolSequence) -> Result<f64> {
    let n = etc(seq)?;
    Ok(normalize(n, seq.len()))
}

fn normalize(count: usize, len: usize) -> f64 {
    if len <= 1 {
        0.0
    } else {
        count as f64 / (len - 1) as f64
    }
}

fn compound(a: &SymbolSequence, b: &SymbolSequence) -> Result<(Vec<u32>, u32)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Empty("symbol sequence"));
    }
    let width = b.alphabet_size.max(1);
    let joined = a
        .symbols
        .iter()
        .zip(&b.symbols)
        .map(|(&x, &y)| x * width + y)
        .collect();
    Ok((joined, a.alphabet_size.max(1) * width))
}

/// ETC of the pair sequence `(a(i), b(i))` over the product alphabet.
pub fn etc_joint(a: &SymbolSequence, b: &SymbolSequence) -> Result<usize> {
    let (joined, alphabet) = compound(a, b)?;
    Ok(nsrps(joined, alphabet))
}

pub fn etc_joint_normalized(a: &SymbolSequence, b: &SymbolSequence) -> Result<f64> {
    Ok(normalize(etc_joint(a, b)?, a.len()))
}
