//! Shortest zero products by layered breadth-first search.
//!
//! States are product VALUES (packed matrix codes), not words: the length of
//! the shortest zero word equals the BFS depth at which the zero code first
//! appears in the right-Cayley reachability graph seeded with the generators
//! at depth 1. Each state remembers its (predecessor, generator) discovery
//! edge; generators expand in ascending index order and the first discovery
//! wins, so the reconstructed witness is the lexicographically least among
//! the minimal zero words, and results are identical from run to run.

use serde::Serialize;
use std::collections::{HashMap, HashSet};

use crate::matrix::{MatError, MatSpace, Matrix, MatrixCode};

/// Direct-indexed seen-bits are used up to this cardinality; hash sets beyond.
const BIT_TABLE_LIMIT: u64 = 1 << 24;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("memory budget exceeded after discovering {discovered} states (budget {budget})")]
    BudgetExceeded { discovered: u64, budget: u64 },
    #[error("generator set is not mortal")]
    NotMortal,
    #[error("minimal word count exceeds u64")]
    CountOverflow,
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// A word over the generator alphabet: 0-based indices, length >= 1. The
/// denoted product is the left-to-right fold of matrix multiplication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn letters(&self) -> &[u32] {
        &self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The product a word denotes.
pub fn word_product(gens: &[Matrix], word: &Word) -> Result<Matrix, MatError> {
    assert!(!word.is_empty(), "words have length >= 1");
    let mut acc = gens[word.0[0] as usize].clone();
    for &i in &word.0[1..] {
        acc = acc.mul(&gens[i as usize])?;
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
#[derive(Default)]
pub struct SearchConfig {
    /// Bound on word length / BFS depth. Defaults to `q^(n^2)`, a trivial
    /// upper bound on the depth, so the default never truncates.
    pub max_len: Option<u64>,
    /// Also count the words of minimal length whose product is zero.
    pub count_minimal: bool,
    /// Cap on discovered states; exceeding it is an error, never a wrong
    /// answer.
    pub max_states: Option<u64>,
}


#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub mortal: bool,
    pub shortest_length: Option<u64>,
    pub witness: Option<Word>,
    /// Distinct product values reached. Exact when the closure completed
    /// (`truncated == false`); otherwise the count discovered within
    /// `max_len`.
    pub semigroup_size: u64,
    pub minimal_word_count: Option<u64>,
    /// True when `max_len` stopped the search before the semigroup closed;
    /// distinct from "not mortal".
    pub truncated: bool,
}

enum Seen {
    Bits(Vec<u64>),
    Hash(HashSet<u64>),
}

impl Seen {
    fn new(cardinality: u64) -> Seen {
        if cardinality <= BIT_TABLE_LIMIT {
            Seen::Bits(vec![0u64; cardinality.div_ceil(64) as usize])
        } else {
            Seen::Hash(HashSet::new())
        }
    }

    /// Marks `code`; returns true when it was new.
    fn insert(&mut self, code: u64) -> bool {
        match self {
            Seen::Bits(bits) => {
                let (w, b) = ((code / 64) as usize, code % 64);
                let fresh = bits[w] & (1 << b) == 0;
                bits[w] |= 1 << b;
                fresh
            }
            Seen::Hash(set) => set.insert(code),
        }
    }
}

struct Discovery {
    depth: u32,
    pred: u64,
    gen: u32,
}

struct Bfs {
    space: MatSpace,
    /// (depth, predecessor code, generator index) per discovered state.
    recon: HashMap<u64, Discovery>,
    zero_depth: Option<u64>,
    truncated: bool,
}

fn validate_generators(gens: &[Matrix]) -> Result<MatSpace, SearchError> {
    let first = gens.first().ok_or(SearchError::EmptyGenerators)?;
    for g in &gens[1..] {
        if g.n() != first.n() {
            return Err(MatError::ShapeMismatch(first.n(), g.n()).into());
        }
        if g.field().spec() != first.field().spec() {
            return Err(MatError::FieldMismatch.into());
        }
    }
    Ok(MatSpace::new(first.field().clone(), first.n())?)
}

fn run_bfs(gens: &[Matrix], cfg: &SearchConfig) -> Result<Bfs, SearchError> {
    let space = validate_generators(gens)?;
    let max_len = cfg.max_len.unwrap_or(space.cardinality()).max(1);

    let mut seen = Seen::new(space.cardinality());
    let mut recon: HashMap<u64, Discovery> = HashMap::new();
    let mut zero_depth: Option<u64> = None;

    // Layer 1: the generators themselves, ascending index, first wins.
    let mut frontier: Vec<(u64, Matrix)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let code = space.encode(g).0;
        if seen.insert(code) {
            recon.insert(code, Discovery { depth: 1, pred: code, gen: i as u32 });
            if code == 0 {
                zero_depth = Some(1);
            }
            frontier.push((code, g.clone()));
        }
    }

    let mut depth: u64 = 1;
    let mut truncated = false;
    while !frontier.is_empty() {
        if depth == max_len {
            truncated = true;
            break;
        }
        let mut next: Vec<(u64, Matrix)> = Vec::new();
        for (code, m) in &frontier {
            for (i, g) in gens.iter().enumerate() {
                let prod = m.mul(g)?;
                let prod_code = space.encode(&prod).0;
                if seen.insert(prod_code) {
                    recon.insert(
                        prod_code,
                        Discovery { depth: depth as u32 + 1, pred: *code, gen: i as u32 },
                    );
                    if prod_code == 0 {
                        zero_depth = Some(depth + 1);
                    }
                    next.push((prod_code, prod.clone()));
                }
            }
        }
        if let Some(budget) = cfg.max_states {
            if recon.len() as u64 > budget {
                return Err(SearchError::BudgetExceeded {
                    discovered: recon.len() as u64,
                    budget,
                });
            }
        }
        frontier = next;
        depth += 1;
    }

    Ok(Bfs { space, recon, zero_depth, truncated })
}

fn reconstruct_witness(bfs: &Bfs) -> Word {
    let mut letters: Vec<u32> = Vec::new();
    let mut cur = 0u64; // zero matrix code
    loop {
        let d = &bfs.recon[&cur];
        letters.push(d.gen);
        if d.depth == 1 {
            break;
        }
        cur = d.pred;
    }
    letters.reverse();
    Word(letters)
}

/// Counts distinct words of length exactly `len` whose product is zero, by
/// per-(state, depth) path counting. Generator indices with equal matrix
/// values count as distinct letters.
fn count_zero_words_of_length(
    gens: &[Matrix],
    space: &MatSpace,
    len: u64,
) -> Result<u64, SearchError> {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for g in gens {
        *counts.entry(space.encode(g).0).or_insert(0) += 1;
    }
    for _ in 1..len {
        let mut next: HashMap<u64, u64> = HashMap::new();
        for (&code, &c) in &counts {
            let m = space.decode(MatrixCode(code)).expect("state in range");
            for g in gens {
                let prod_code = space.encode(&m.mul(g)?).0;
                let slot = next.entry(prod_code).or_insert(0);
                *slot = slot.checked_add(c).ok_or(SearchError::CountOverflow)?;
            }
        }
        counts = next;
    }
    Ok(counts.get(&0).copied().unwrap_or(0))
}

/// Finds the shortest zero product of the semigroup generated by `gens`.
///
/// Runs the layered BFS to closure (or to `max_len`), so `semigroup_size`
/// comes along for free.
pub fn shortest_zero_product(
    gens: &[Matrix],
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    let bfs = run_bfs(gens, cfg)?;
    let (mortal, shortest_length, witness) = match bfs.zero_depth {
        Some(d) => (true, Some(d), Some(reconstruct_witness(&bfs))),
        None => (false, None, None),
    };
    let minimal_word_count = if cfg.count_minimal && mortal {
        Some(count_zero_words_of_length(gens, &bfs.space, shortest_length.unwrap())?)
    } else {
        None
    };
    Ok(SearchResult {
        mortal,
        shortest_length,
        witness,
        semigroup_size: bfs.recon.len() as u64,
        minimal_word_count,
        truncated: bfs.truncated,
    })
}

/// Number of distinct minimal-length zero words; errors when not mortal.
pub fn count_minimal_zero_words(gens: &[Matrix]) -> Result<u64, SearchError> {
    let cfg = SearchConfig::default();
    let bfs = run_bfs(gens, &cfg)?;
    let len = bfs.zero_depth.ok_or(SearchError::NotMortal)?;
    count_zero_words_of_length(gens, &bfs.space, len)
}

/// The full semigroup generated by `gens`, as sorted matrix codes.
pub fn enumerate_semigroup(
    gens: &[Matrix],
    max_states: Option<u64>,
) -> Result<Vec<MatrixCode>, SearchError> {
    let cfg = SearchConfig { max_len: None, count_minimal: false, max_states };
    let bfs = run_bfs(gens, &cfg)?;
    let mut codes: Vec<MatrixCode> = bfs.recon.keys().map(|&c| MatrixCode(c)).collect();
    codes.sort_unstable();
    Ok(codes)
}

/// For 2x2 generator sets: true iff the word's first and last letters denote
/// singular matrices and every interior letter denotes an invertible one —
/// the shape every minimal zero word reduces to.
pub fn check_minimal_word_shape_2x2(gens: &[Matrix], word: &Word) -> bool {
    assert_eq!(gens[0].n(), 2, "shape check is a 2x2 statement");
    assert!(!word.is_empty());
    let singular = |i: u32| !gens[i as usize].is_invertible();
    let letters = word.letters();
    let (first, last) = (letters[0], letters[letters.len() - 1]);
    let interior = if letters.len() >= 2 { &letters[1..letters.len() - 1] } else { &[][..] };
    singular(first) && singular(last) && interior.iter().all(|&i| !singular(i))
}
