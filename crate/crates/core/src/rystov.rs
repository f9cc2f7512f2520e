//! Rystov numbers: the maximum, over mortal generator sets of n x n matrices
//! over GF(q), of the shortest zero-product length.
//!
//! The enumeration walks unordered, duplicate-free generator SETS (duplicate
//! generators never shorten a zero word; permutations never change lengths).
//! Three pruning layers run cheapest-first: a set containing the zero matrix
//! scores 1 outright; a set with no singular nonzero member is immortal and
//! skipped; everything else gets a table-driven value BFS.
//!
//! With `use_orbits`, one representative is enumerated per orbit under
//! (simultaneous conjugation by GL_n) x (per-generator nonzero scaling) x
//! (relabeling) — all three leave mortality and shortest lengths unchanged
//! (see the invariance tests in `search`). The canonical representative of a
//! set is the orbit element whose sorted code tuple is lexicographically
//! least.
//!
//! Exactness is reported, never assumed: `mode = exact` when every nonempty
//! subset was enumerated (ALL), or when `k_max >= value` — a maximizing set
//! of minimal cardinality has cardinality at most its own shortest length,
//! because each letter of a minimal zero word must occur in it (a set of the
//! letters actually used attains the same value). Budget exhaustion always
//! downgrades to `lower_bound`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::field::{Field, FieldError, FieldSpec};
use crate::matrix::{MatError, MatSpace, Matrix};
use crate::search::{shortest_zero_product, SearchConfig, SearchError, Word};

/// Exhaustive enumeration needs the full multiplication table of the matrix
/// space; this caps its side length.
pub const MAX_ENUMERATION_SPACE: u64 = 4096;

/// Full-powerset (ALL) enumeration is permitted only up to this many
/// matrices.
pub const MAX_ALL_UNIVERSE: u64 = 16;

const CHECKPOINT_EVERY_SETS: u64 = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum RysError {
    #[error("k_max must be >= 1")]
    InvalidKMax,
    #[error("ALL mode requires q^(n^2) <= {MAX_ALL_UNIVERSE}, got {0}")]
    AllTooLarge(u64),
    #[error("matrix space has {card} codes; exhaustive enumeration is capped at {MAX_ENUMERATION_SPACE}")]
    SpaceTooLarge { card: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("checkpoint file does not match this query: {0}")]
    CheckpointMismatch(String),
    #[error("checkpoint i/o: {0}")]
    CheckpointIo(String),
}

/// Generator-set cardinality bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMax {
    /// Every nonempty subset of the whole matrix space.
    All,
    /// Sets of at most this many generators.
    AtMost(usize),
}

impl Serialize for KMax {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KMax::All => s.serialize_str("all"),
            KMax::AtMost(k) => s.serialize_u64(*k as u64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RysMode {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone)]
pub struct RysQuery {
    pub n: usize,
    pub field: FieldSpec,
    pub k_max: KMax,
    pub use_orbits: bool,
    /// Stop after roughly this many enumerated sets (deterministic prefix of
    /// the work plan); the result degrades to a lower bound.
    pub max_sets: Option<u64>,
    /// Resumable progress file.
    pub checkpoint: Option<PathBuf>,
}

impl RysQuery {
    pub fn new(n: usize, field: FieldSpec, k_max: KMax, use_orbits: bool) -> RysQuery {
        RysQuery { n, field, k_max, use_orbits, max_sets: None, checkpoint: None }
    }
}

/// A computed Rystov number with its witness and exactness mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RysRecord {
    pub n: usize,
    pub q: u64,
    pub value: u64,
    pub mode: RysMode,
    pub k_max: KMax,
    /// A mortal set attaining `value`, as nested element-code rows.
    pub witness_set: Vec<Vec<Vec<u64>>>,
    /// Lexicographically least minimal zero word of the witness set.
    pub witness_word: Word,
    /// `value_by_k[i]` = best value over sets of cardinality <= i+1
    /// (running max; records where the value stabilizes).
    pub value_by_k: Vec<u64>,
    /// Candidate sets enumerated, including pruned and non-canonical ones.
    pub sets_examined: u64,
    /// Canonical representatives evaluated (orbit mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits_examined: Option<u64>,
    pub elapsed_ms: u64,
    pub tool_version: String,
}

// --- table-driven value-only BFS over packed codes ---

struct Tables {
    card: usize,
    mul: Vec<u16>,
    singular_nonzero: Vec<bool>,
    /// Minimal code in the nonzero-scaling class of each code.
    class_min: Vec<u16>,
    /// Deduplicated conjugation maps code -> code, one per PGL element.
    conj: Vec<Vec<u16>>,
}

fn build_tables(space: &MatSpace, with_orbits: bool) -> Result<Tables, RysError> {
    let card = space.cardinality();
    if card > MAX_ENUMERATION_SPACE {
        return Err(RysError::SpaceTooLarge { card });
    }
    let card = card as usize;
    let mul = space.mul_table().expect("cardinality within table cap");
    let invertible = space.invertibility_table();
    let singular_nonzero: Vec<bool> =
        (0..card).map(|c| c != 0 && !invertible[c]).collect();

    let (class_min, conj) = if with_orbits {
        let field = space.field();
        let mats = (0..card)
            .map(|c| space.decode(crate::matrix::MatrixCode(c as u64)).expect("in range"))
            .collect::<Vec<_>>();
        let mut class_min = vec![0u16; card];
        for (c, m) in mats.iter().enumerate() {
            let mut best = c as u16;
            for lambda in field.elements().skip(1) {
                let scaled = space.encode(&m.scale(lambda)).0 as u16;
                best = best.min(scaled);
            }
            class_min[c] = best;
        }
        // One permutation per distinct conjugation map; P and its scalar
        // multiples induce the same map.
        let mut seen: BTreeSet<Vec<u16>> = BTreeSet::new();
        for (p_code, p) in mats.iter().enumerate() {
            if !invertible[p_code] {
                continue;
            }
            let p_inv = p.inverse().expect("invertible");
            let pinv_code = space.encode(&p_inv).0 as usize;
            let perm: Vec<u16> = (0..card)
                .map(|c| {
                    let left = mul[pinv_code * card + c] as usize;
                    mul[left * card + p_code]
                })
                .collect();
            seen.insert(perm);
        }
        (class_min, seen.into_iter().collect())
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(Tables { card, mul, singular_nonzero, class_min, conj })
}

struct Scratch {
    stamp: Vec<u32>,
    generation: u32,
    frontier: Vec<u16>,
    next: Vec<u16>,
}

impl Scratch {
    fn new(card: usize) -> Scratch {
        Scratch { stamp: vec![0; card], generation: 0, frontier: Vec::new(), next: Vec::new() }
    }
}

impl Tables {
    /// Depth of the zero code in the value BFS, or None when immortal.
    fn zero_depth(&self, gens: &[u16], scratch: &mut Scratch) -> Option<u32> {
        scratch.generation += 1;
        let generation = scratch.generation;
        scratch.frontier.clear();
        for &g in gens {
            if scratch.stamp[g as usize] != generation {
                scratch.stamp[g as usize] = generation;
                if g == 0 {
                    return Some(1);
                }
                scratch.frontier.push(g);
            }
        }
        let mut depth = 1u32;
        while !scratch.frontier.is_empty() {
            scratch.next.clear();
            for &s in &scratch.frontier {
                let row = s as usize * self.card;
                for &g in gens {
                    let t = self.mul[row + g as usize];
                    if scratch.stamp[t as usize] != generation {
                        scratch.stamp[t as usize] = generation;
                        if t == 0 {
                            return Some(depth + 1);
                        }
                        scratch.next.push(t);
                    }
                }
            }
            std::mem::swap(&mut scratch.frontier, &mut scratch.next);
            depth += 1;
        }
        None
    }

    /// Shortest zero length of a candidate set, with the cheap prunes first.
    fn evaluate(&self, set: &[u16], scratch: &mut Scratch) -> Option<u32> {
        if set.contains(&0) {
            return Some(1);
        }
        if !set.iter().any(|&c| self.singular_nonzero[c as usize]) {
            return None;
        }
        self.zero_depth(set, scratch)
    }

    /// Orbit-canonical form of a set: minimum over conjugation maps of the
    /// sorted per-element scaling-class minima.
    fn canonical_set(&self, set: &[u16]) -> Vec<u16> {
        let mut best: Option<Vec<u16>> = None;
        let mut buf: Vec<u16> = Vec::with_capacity(set.len());
        for perm in &self.conj {
            buf.clear();
            buf.extend(set.iter().map(|&c| self.class_min[perm[c as usize] as usize]));
            buf.sort_unstable();
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
        best.expect("GL_n contains the identity")
    }
}

// --- work plan: deterministic items, each a block of candidate sets ---

#[derive(Debug, Clone, PartialEq, Eq)]
enum Item {
    /// Combinations of size `c` from `universe[first..]` that include
    /// `universe[first]`.
    Combos { c: usize, first: usize },
    /// Subset bitmasks in `[start, end)`.
    Masks { start: u64, end: u64 },
}

impl Item {
    fn id(&self) -> String {
        match self {
            Item::Combos { c, first } => format!("c{c}:{first}"),
            Item::Masks { start, .. } => format!("m{start}"),
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn item_set_count(item: &Item, universe_len: u64) -> u64 {
    match item {
        Item::Combos { c, first } => {
            binomial(universe_len - 1 - *first as u64, *c as u64 - 1)
        }
        Item::Masks { start, end } => end - start,
    }
}

fn for_each_combination(
    universe: &[u16],
    need: usize,
    prefix: &mut Vec<u16>,
    f: &mut impl FnMut(&[u16]),
) {
    if need == 0 {
        f(prefix);
        return;
    }
    if universe.len() < need {
        return;
    }
    for i in 0..=universe.len() - need {
        prefix.push(universe[i]);
        for_each_combination(&universe[i + 1..], need - 1, prefix, f);
        prefix.pop();
    }
}

// --- merged scan state ---

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Candidate {
    value: u32,
    set: Vec<u16>,
}

impl Candidate {
    /// Higher value wins; ties break toward the lexicographically least
    /// sorted code tuple (the canonical witness).
    fn better_than(&self, other: &Candidate) -> bool {
        self.value > other.value || (self.value == other.value && self.set < other.set)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct ScanState {
    best: Option<Candidate>,
    /// Index c-1: best value among sets of cardinality exactly c.
    value_by_c: Vec<u64>,
    sets_examined: u64,
    orbits_examined: u64,
    done: BTreeSet<String>,
}

impl ScanState {
    fn merge_candidate(&mut self, cand: Candidate, cardinality: usize) {
        if self.value_by_c.len() < cardinality {
            self.value_by_c.resize(cardinality, 0);
        }
        let slot = &mut self.value_by_c[cardinality - 1];
        *slot = (*slot).max(cand.value as u64);
        if self.best.as_ref().is_none_or(|b| cand.better_than(b)) {
            self.best = Some(cand);
        }
    }

    fn absorb(&mut self, other: ScanState) {
        if let Some(c) = other.best {
            if self.best.as_ref().is_none_or(|b| c.better_than(b)) {
                self.best = Some(c);
            }
        }
        if self.value_by_c.len() < other.value_by_c.len() {
            self.value_by_c.resize(other.value_by_c.len(), 0);
        }
        for (i, v) in other.value_by_c.iter().enumerate() {
            self.value_by_c[i] = self.value_by_c[i].max(*v);
        }
        self.sets_examined += other.sets_examined;
        self.orbits_examined += other.orbits_examined;
        self.done.extend(other.done);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Fingerprint {
    n: usize,
    q: u64,
    k_max: String,
    use_orbits: bool,
    tool_version: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointFile {
    fingerprint: Fingerprint,
    state: ScanState,
}

fn fingerprint(query: &RysQuery) -> Fingerprint {
    Fingerprint {
        n: query.n,
        q: query.field.q,
        k_max: match query.k_max {
            KMax::All => "all".to_string(),
            KMax::AtMost(k) => k.to_string(),
        },
        use_orbits: query.use_orbits,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn load_checkpoint(path: &PathBuf, fp: &Fingerprint) -> Result<Option<ScanState>, RysError> {
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(path).map_err(|e| RysError::CheckpointIo(e.to_string()))?;
    let file: CheckpointFile =
        serde_json::from_str(&text).map_err(|e| RysError::CheckpointIo(e.to_string()))?;
    if file.fingerprint != *fp {
        return Err(RysError::CheckpointMismatch(format!(
            "found {:?}, expected {:?}",
            file.fingerprint, fp
        )));
    }
    Ok(Some(file.state))
}

fn write_checkpoint(path: &PathBuf, fp: &Fingerprint, state: &ScanState) -> Result<(), RysError> {
    let file = CheckpointFile { fingerprint: fp.clone(), state: state.clone() };
    let text = serde_json::to_string(&file).expect("plain data serializes");
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| RysError::CheckpointIo(e.to_string()))?;
    std::fs::rename(&tmp, path).map_err(|e| RysError::CheckpointIo(e.to_string()))?;
    Ok(())
}

/// Computes the Rystov number for a query; see the module docs for the
/// enumeration, orbit reduction, and exactness semantics. The returned
/// witness is re-verified with the full BFS before the record is built.
pub fn rys_number(query: &RysQuery) -> Result<RysRecord, RysError> {
    let started = Instant::now();
    let field = std::sync::Arc::new(Field::from_spec(&query.field)?);
    let space = MatSpace::new(field.clone(), query.n)?;
    let card = space.cardinality();

    match query.k_max {
        KMax::All if card > MAX_ALL_UNIVERSE => return Err(RysError::AllTooLarge(card)),
        KMax::AtMost(0) => return Err(RysError::InvalidKMax),
        _ => {}
    }

    let tables = build_tables(&space, query.use_orbits)?;

    // Enumeration universe and work items.
    let universe: Vec<u16> = if query.use_orbits {
        // Nonzero scaling-class representatives; the {O} singleton is scored
        // below without enumeration.
        let mut u: Vec<u16> = (1..tables.card as u16)
            .filter(|&c| tables.class_min[c as usize] == c)
            .collect();
        u.sort_unstable();
        u
    } else {
        (0..tables.card as u16).collect()
    };

    let mut items: Vec<Item> = Vec::new();
    match query.k_max {
        KMax::All => {
            let total = 1u64 << card;
            let chunk = 8192u64;
            let mut start = 1u64;
            while start < total {
                let end = (start + chunk).min(total);
                items.push(Item::Masks { start, end });
                start = end;
            }
        }
        KMax::AtMost(k) => {
            let k_eff = k.min(universe.len());
            for c in 1..=k_eff {
                for first in 0..universe.len() {
                    if universe.len() - first >= c {
                        items.push(Item::Combos { c, first });
                    }
                }
            }
        }
    }

    let fp = fingerprint(query);
    let mut initial = ScanState::default();
    if let Some(path) = &query.checkpoint {
        if let Some(saved) = load_checkpoint(path, &fp)? {
            initial = saved;
        }
    }
    // In orbit mode the universe holds only nonzero classes, so the
    // zero-matrix singleton (value 1) is scored here; mask enumeration
    // covers it on its own.
    if query.use_orbits
        && matches!(query.k_max, KMax::AtMost(_))
        && initial.done.is_empty()
    {
        initial.merge_candidate(Candidate { value: 1, set: vec![0] }, 1);
        initial.sets_examined += 1;
        initial.orbits_examined += 1;
    }

    // Deterministic budget: take the longest prefix of pending items whose
    // cumulative set count stays within max_sets.
    let pending: Vec<Item> =
        items.into_iter().filter(|it| !initial.done.contains(&it.id())).collect();
    let mut budget_left = query.max_sets.unwrap_or(u64::MAX);
    budget_left = budget_left.saturating_sub(initial.sets_examined);
    let mut take = 0usize;
    for it in &pending {
        let count = item_set_count(it, universe.len() as u64);
        if count > budget_left {
            break;
        }
        budget_left -= count;
        take += 1;
    }
    let (selected, skipped) = pending.split_at(take);
    let complete = skipped.is_empty();

    let state = Mutex::new(initial);
    let since_write = AtomicU64::new(0);

    let process_item = |item: &Item| -> ScanState {
        let mut local = ScanState::default();
        let mut scratch = Scratch::new(tables.card);
        let mut evaluate = |set: &[u16], local: &mut ScanState| {
            local.sets_examined += 1;
            if query.use_orbits {
                if tables.canonical_set(set) != set {
                    return;
                }
                local.orbits_examined += 1;
            }
            if let Some(v) = tables.evaluate(set, &mut scratch) {
                local.merge_candidate(Candidate { value: v, set: set.to_vec() }, set.len());
            }
        };
        match item {
            Item::Combos { c, first } => {
                let mut prefix = vec![universe[*first]];
                for_each_combination(
                    &universe[first + 1..],
                    c - 1,
                    &mut prefix,
                    &mut |set| evaluate(set, &mut local),
                );
            }
            Item::Masks { start, end } => {
                let mut set: Vec<u16> = Vec::with_capacity(card as usize);
                for mask in *start..*end {
                    set.clear();
                    let mut bits = mask;
                    while bits != 0 {
                        set.push(bits.trailing_zeros() as u16);
                        bits &= bits - 1;
                    }
                    evaluate(&set, &mut local);
                }
            }
        }
        local.done.insert(item.id());
        local
    };

    selected.par_iter().try_for_each(|item| -> Result<(), RysError> {
        let outcome = process_item(item);
        let examined = outcome.sets_examined;
        let mut guard = state.lock().expect("no poisoned lock");
        guard.absorb(outcome);
        if let Some(path) = &query.checkpoint {
            let acc = since_write.fetch_add(examined, Ordering::Relaxed) + examined;
            if acc >= CHECKPOINT_EVERY_SETS {
                since_write.store(0, Ordering::Relaxed);
                write_checkpoint(path, &fp, &guard)?;
            }
        }
        Ok(())
    })?;

    let final_state = state.into_inner().expect("no poisoned lock");
    if let Some(path) = &query.checkpoint {
        write_checkpoint(path, &fp, &final_state)?;
    }

    let best = final_state.best.clone().expect("the zero singleton is always mortal");

    // Re-verify the witness through the full search: its BFS must reproduce
    // the value exactly, and supplies the canonical witness word.
    let witness_mats: Vec<Matrix> = best
        .set
        .iter()
        .map(|&c| space.decode(crate::matrix::MatrixCode(c as u64)).expect("in range"))
        .collect();
    let verification = shortest_zero_product(&witness_mats, &SearchConfig::default())?;
    assert_eq!(
        verification.shortest_length,
        Some(best.value as u64),
        "witness must re-verify to the scanned value"
    );

    let mode = if !complete {
        RysMode::LowerBound
    } else {
        match query.k_max {
            KMax::All => RysMode::Exact,
            // Exact when the cardinality certificate applies (a maximizing
            // set needs at most `value` generators) or when every possible
            // set was enumerated anyway.
            KMax::AtMost(k) => {
                if k as u64 >= best.value as u64 || k >= universe.len() {
                    RysMode::Exact
                } else {
                    RysMode::LowerBound
                }
            }
        }
    };

    // Running max turns per-cardinality bests into "value with sets of
    // cardinality <= k".
    let mut value_by_k = final_state.value_by_c.clone();
    for i in 1..value_by_k.len() {
        value_by_k[i] = value_by_k[i].max(value_by_k[i - 1]);
    }

    Ok(RysRecord {
        n: query.n,
        q: query.field.q,
        value: best.value as u64,
        mode,
        k_max: query.k_max,
        witness_set: witness_mats.iter().map(Matrix::rows_codes).collect(),
        witness_word: verification.witness.expect("witness set is mortal"),
        value_by_k,
        sets_examined: final_state.sets_examined,
        orbits_examined: query.use_orbits.then_some(final_state.orbits_examined),
        elapsed_ms: started.elapsed().as_millis() as u64,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// The canonical representative of a generator tuple under (conjugation) x
/// (per-generator scaling) x (reordering): the tuple whose sorted code list
/// is lexicographically least over the whole orbit. Constant on orbits;
/// feasible only for small spaces.
pub fn canonical_tuple(gens: &[Matrix]) -> Result<Vec<Matrix>, RysError> {
    let space = MatSpace::new(gens[0].field().clone(), gens[0].n())?;
    let tables = build_tables(&space, true)?;
    let codes: Vec<u16> = gens.iter().map(|g| space.encode(g).0 as u16).collect();
    let canon = tables.canonical_set(&codes);
    canon
        .iter()
        .map(|&c| {
            space
                .decode(crate::matrix::MatrixCode(c as u64))
                .map_err(RysError::from)
        })
        .collect()
}
