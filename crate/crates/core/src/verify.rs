//! Exhaustive verifiers for the 2x2 structure results behind the search:
//! the ABC factorization statement, the unique-shortest-word corollary for
//! pairs, and the singular-edges/invertible-interior shape of minimal zero
//! words. Each verifier enumerates its whole premise domain and fails loudly
//! on any violation; nothing is sampled.
//!
//! Every reported counterexample is re-validated through plain matrix
//! arithmetic (no lookup tables) before it reaches the report, so a table or
//! harness bug cannot fabricate one silently.

use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use crate::field::{Field, FieldError};
use crate::matrix::{MatError, MatSpace, Matrix, MatrixCode};
use crate::search::{
    check_minimal_word_shape_2x2, count_minimal_zero_words, shortest_zero_product, word_product,
    SearchConfig, SearchError, Word,
};

/// Premise-domain size cap for the lemma scan (q = 5 is ~57M triples and
/// takes seconds; anything bigger is out of scope).
pub const MAX_LEMMA_ORDER: u64 = 5;
/// Pair-verifier cap.
pub const MAX_COROLLARY_ORDER: u64 = 5;
/// Set-enumeration cap for the shape verifier.
pub const MAX_SHAPE_SETS: u64 = 200_000;

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("field order {q} too large for exhaustive verification (limit {limit})")]
    OrderTooLarge { q: u64, limit: u64 },
    #[error("shape verification would enumerate {sets} sets (limit {MAX_SHAPE_SETS})")]
    TooManySets { sets: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// ABC = O with B singular, yet the claimed factorization fails.
    LemmaTriple { a: Vec<Vec<u64>>, b: Vec<Vec<u64>>, c: Vec<Vec<u64>> },
    /// A mortal pair (A, B) with B invertible whose minimal zero word is not
    /// the unique [0, 1 x m, 0].
    CorollaryPair {
        a: Vec<Vec<u64>>,
        b: Vec<Vec<u64>>,
        witness: Word,
        minimal_word_count: u64,
    },
    /// A mortal set whose BFS witness fails the singular-edges shape.
    ShapeViolation { generators: Vec<Vec<Vec<u64>>>, witness: Word },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub statement: String,
    pub q: u64,
    pub cases_checked: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Corollary verifier only: pairs with A = O, excluded from the premise
    /// domain (their minimal word is trivially [0]) and reported separately.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_cases: Option<u64>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

struct SmallSpace {
    space: MatSpace,
    card: usize,
    mul: Vec<u16>,
    invertible: Vec<bool>,
}

fn small_space(q: u64, limit: u64) -> Result<SmallSpace, VerifyError> {
    if q > limit {
        return Err(VerifyError::OrderTooLarge { q, limit });
    }
    let (p, e) = crate::primes::prime_power(q)
        .ok_or(FieldError::NotPrimePower { q })?;
    let field = Field::shared(p, e)?;
    let space = MatSpace::new(field, 2)?;
    let card = space.cardinality() as usize;
    let mul = space.mul_table().expect("q <= 5 keeps q^4 <= 625");
    let invertible = space.invertibility_table();
    Ok(SmallSpace { space, card, mul, invertible })
}

impl SmallSpace {
    fn decode(&self, code: usize) -> Matrix {
        self.space.decode(MatrixCode(code as u64)).expect("in range")
    }
}

/// Scans all (A, B singular, C) with the given factorization claim
/// `claim(ab_is_zero, bc_is_zero)`, collecting triples where ABC = O but the
/// claim fails. Counterexamples are re-validated with direct arithmetic.
fn scan_lemma(
    q: u64,
    claim: fn(bool, bool) -> bool,
) -> Result<(u64, Vec<Counterexample>, SmallSpace), VerifyError> {
    let s = small_space(q, MAX_LEMMA_ORDER)?;
    let singular: Vec<usize> = (0..s.card).filter(|&c| !s.invertible[c]).collect();
    let cases = (s.card as u64) * (singular.len() as u64) * (s.card as u64);

    let found: Vec<(usize, usize, usize)> = (0..s.card)
        .into_par_iter()
        .map(|a| {
            let mut local = Vec::new();
            for &b in &singular {
                let ab = s.mul[a * s.card + b] as usize;
                let ab_zero = ab == 0;
                for c in 0..s.card {
                    let abc = s.mul[ab * s.card + c];
                    if abc == 0 {
                        let bc_zero = s.mul[b * s.card + c] == 0;
                        if !claim(ab_zero, bc_zero) {
                            local.push((a, b, c));
                        }
                    }
                }
            }
            local
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut counterexamples = Vec::with_capacity(found.len());
    for (a, b, c) in found {
        let (ma, mb, mc) = (s.decode(a), s.decode(b), s.decode(c));
        // Independent re-validation, no tables.
        let ab = ma.mul(&mb)?;
        let bc = mb.mul(&mc)?;
        let abc = ab.mul(&mc)?;
        assert!(
            abc.is_zero() && !mb.is_invertible() && !claim(ab.is_zero(), bc.is_zero()),
            "scan reported a triple that direct arithmetic does not confirm"
        );
        counterexamples.push(Counterexample::LemmaTriple {
            a: ma.rows_codes(),
            b: mb.rows_codes(),
            c: mc.rows_codes(),
        });
    }
    Ok((cases, counterexamples, s))
}

/// Exhaustively checks that ABC = O with B singular forces AB = O or BC = O,
/// over all of Mat_2(GF(q))^3 with B singular.
pub fn verify_lemma_abc(q: u64) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let (cases_checked, counterexamples, _) = scan_lemma(q, |ab, bc| ab || bc)?;
    Ok(VerificationReport {
        statement: "lemma_abc".into(),
        q,
        cases_checked,
        counterexamples,
        degenerate_cases: None,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Exhaustively checks that every mortal pair (A, B) with B invertible and
/// A nonzero has a unique minimal zero word of shape [0, 1 x m, 0]. Pairs
/// with A = O go to the degenerate bucket (their minimal word is [0]).
pub fn verify_corollary(q: u64) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let s = small_space(q, MAX_COROLLARY_ORDER)?;
    let invertible_codes: Vec<usize> = (0..s.card).filter(|&c| s.invertible[c]).collect();

    struct PairOutcome {
        checked: u64,
        degenerate: u64,
        bad: Vec<(usize, usize, Word, u64)>,
    }

    let outcomes: Vec<PairOutcome> = (0..s.card)
        .into_par_iter()
        .map(|a_code| {
            let mut out = PairOutcome { checked: 0, degenerate: 0, bad: Vec::new() };
            let ma = s.decode(a_code);
            for &b_code in &invertible_codes {
                if a_code == 0 {
                    out.degenerate += 1;
                    continue;
                }
                let gens = [ma.clone(), s.decode(b_code)];
                let result = shortest_zero_product(&gens, &SearchConfig::default())
                    .expect("small space");
                if !result.mortal {
                    continue;
                }
                out.checked += 1;
                let witness = result.witness.expect("mortal");
                let count = count_minimal_zero_words(&gens).expect("mortal");
                let letters = witness.letters();
                let pattern_ok = letters.len() >= 2
                    && letters[0] == 0
                    && *letters.last().unwrap() == 0
                    && letters[1..letters.len() - 1].iter().all(|&l| l == 1);
                if !pattern_ok || count != 1 {
                    out.bad.push((a_code, b_code, witness, count));
                }
            }
            out
        })
        .collect();

    let mut cases_checked = 0;
    let mut degenerate = 0;
    let mut counterexamples = Vec::new();
    for o in outcomes {
        cases_checked += o.checked;
        degenerate += o.degenerate;
        for (a_code, b_code, witness, count) in o.bad {
            let (ma, mb) = (s.decode(a_code), s.decode(b_code));
            // Re-validate: the witness really is a zero word of the pair.
            let prod = word_product(&[ma.clone(), mb.clone()], &witness)?;
            assert!(prod.is_zero() && mb.is_invertible() && !ma.is_zero());
            counterexamples.push(Counterexample::CorollaryPair {
                a: ma.rows_codes(),
                b: mb.rows_codes(),
                witness,
                minimal_word_count: count,
            });
        }
    }

    Ok(VerificationReport {
        statement: "corollary_unique_shortest".into(),
        q,
        cases_checked,
        counterexamples,
        degenerate_cases: Some(degenerate),
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
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

/// Exhaustively checks that the BFS witness of every mortal set of at most
/// `k_max` matrices has singular first and last letters and invertible
/// interior letters.
pub fn verify_minimal_shape(q: u64, k_max: usize) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let s = small_space(q, MAX_COROLLARY_ORDER)?;
    let total: u64 = (1..=k_max as u64).map(|c| binomial(s.card as u64, c)).sum();
    if total > MAX_SHAPE_SETS {
        return Err(VerifyError::TooManySets { sets: total });
    }

    type BadSet = (Vec<usize>, Word);

    // Partition by leading code for the parallel walk.
    let leads: Vec<usize> = (0..s.card).collect();
    let results: Vec<(u64, Vec<BadSet>)> = leads
        .par_iter()
        .map(|&lead| {
            let mut checked = 0u64;
            let mut bad: Vec<BadSet> = Vec::new();
            let mut stack: Vec<Vec<usize>> = vec![vec![lead]];
            while let Some(set) = stack.pop() {
                let gens: Vec<Matrix> = set.iter().map(|&c| s.decode(c)).collect();
                let result = shortest_zero_product(&gens, &SearchConfig::default())
                    .expect("small space");
                if result.mortal {
                    checked += 1;
                    let witness = result.witness.expect("mortal");
                    if !check_minimal_word_shape_2x2(&gens, &witness) {
                        bad.push((set.clone(), witness));
                    }
                }
                if set.len() < k_max {
                    for next in (set[set.len() - 1] + 1)..s.card {
                        let mut bigger = set.clone();
                        bigger.push(next);
                        stack.push(bigger);
                    }
                }
            }
            (checked, bad)
        })
        .collect();

    let mut cases_checked = 0;
    let mut counterexamples = Vec::new();
    for (checked, bad) in results {
        cases_checked += checked;
        for (set, witness) in bad {
            let gens: Vec<Matrix> = set.iter().map(|&c| s.decode(c)).collect();
            let prod = word_product(&gens, &witness)?;
            assert!(prod.is_zero());
            counterexamples.push(Counterexample::ShapeViolation {
                generators: gens.iter().map(Matrix::rows_codes).collect(),
                witness,
            });
        }
    }

    Ok(VerificationReport {
        statement: "minimal_word_shape".into(),
        q,
        cases_checked,
        counterexamples,
        degenerate_cases: None,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_holds_q2() {
        let r = verify_lemma_abc(2).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases_checked, 2_560); // 16 * 10 * 16
    }

    #[test]
    fn lemma_holds_q3() {
        let r = verify_lemma_abc(3).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases_checked, 216_513); // 81 * 33 * 81
    }

    #[test]
    fn lemma_holds_q4() {
        // Extension field: exercises the table path through GF(4).
        let r = verify_lemma_abc(4).unwrap();
        assert!(r.passed());
        // |GL_2(4)| = (16-1)(16-4) = 180; singular = 256 - 180 = 76.
        assert_eq!(r.cases_checked, 256 * 76 * 256);
    }

    #[test]
    fn lemma_order_cap() {
        assert!(matches!(
            verify_lemma_abc(7),
            Err(VerifyError::OrderTooLarge { q: 7, .. })
        ));
    }

    #[test]
    fn mutated_claim_is_caught() {
        // Harness sanity: demanding AB = O AND BC = O must fail, e.g. at
        // A = [[0,1],[0,0]], B = [[1,0],[0,0]], C = I over GF(2), where
        // ABC = O and AB = O but BC != O.
        let (_cases, cxs, _s) = scan_lemma(2, |ab, bc| ab && bc).unwrap();
        assert!(!cxs.is_empty());
        let expected = Counterexample::LemmaTriple {
            a: vec![vec![0, 1], vec![0, 0]],
            b: vec![vec![1, 0], vec![0, 0]],
            c: vec![vec![1, 0], vec![0, 1]],
        };
        assert!(cxs.contains(&expected));
    }

    #[test]
    fn invertible_c_forces_ab_zero() {
        // Restricted sub-check: with C invertible, ABC = O already forces
        // AB = O (no factorization choice involved).
        for q in [2u64, 3] {
            let s = small_space(q, MAX_LEMMA_ORDER).unwrap();
            for a in 0..s.card {
                for b in (0..s.card).filter(|&b| !s.invertible[b]) {
                    let ab = s.mul[a * s.card + b] as usize;
                    for c in (0..s.card).filter(|&c| s.invertible[c]) {
                        if s.mul[ab * s.card + c] == 0 {
                            assert_eq!(ab, 0, "q={q} a={a} b={b} c={c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn corollary_q2() {
        let r = verify_corollary(2).unwrap();
        assert!(r.passed(), "{:?}", r.counterexamples);
        // Every invertible B pairs with A = O exactly once.
        assert_eq!(r.degenerate_cases, Some(6));
        // Regression: mortal (A, B) pairs with B in GL_2(2) and A != O.
        assert_eq!(r.cases_checked, 36);
    }

    #[test]
    fn corollary_q3() {
        let r = verify_corollary(3).unwrap();
        assert!(r.passed(), "{:?}", r.counterexamples);
        assert_eq!(r.degenerate_cases, Some(48));
        assert_eq!(r.cases_checked, 960);
    }

    #[test]
    fn corollary_nilpotent_identity_pair() {
        // A nilpotent nonzero with B = I: minimal word [0, 0], m = 0.
        let field = Field::shared(2, 1).unwrap();
        let a = Matrix::from_rows_codes(field.clone(), &[vec![0, 1], vec![0, 0]]).unwrap();
        let b = Matrix::identity(field, 2);
        let gens = [a, b];
        let r = shortest_zero_product(&gens, &SearchConfig::default()).unwrap();
        assert_eq!(r.witness, Some(Word(vec![0, 0])));
        assert_eq!(count_minimal_zero_words(&gens).unwrap(), 1);
    }

    #[test]
    fn shape_q2_pairs() {
        let r = verify_minimal_shape(2, 2).unwrap();
        assert!(r.passed(), "{:?}", r.counterexamples);
        // Regression: mortal sets of size <= 2 over Mat_2(GF(2)).
        assert_eq!(r.cases_checked, 85);
    }

    #[test]
    fn shape_q3_pairs() {
        let r = verify_minimal_shape(3, 2).unwrap();
        assert!(r.passed(), "{:?}", r.counterexamples);
        assert_eq!(r.cases_checked, 1389);
    }

    #[test]
    fn shape_budget() {
        assert!(matches!(
            verify_minimal_shape(3, 5),
            Err(VerifyError::TooManySets { .. })
        ));
    }

    #[test]
    fn reports_independent_of_worker_count() {
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let r1 = pool1.install(|| verify_lemma_abc(3)).unwrap();
        let r4 = pool4.install(|| verify_lemma_abc(3)).unwrap();
        assert_eq!(r1.cases_checked, r4.cases_checked);
        assert_eq!(r1.counterexamples, r4.counterexamples);
        let c1 = pool1.install(|| verify_corollary(3)).unwrap();
        let c4 = pool4.install(|| verify_corollary(3)).unwrap();
        assert_eq!(c1.cases_checked, c4.cases_checked);
        assert_eq!(c1.degenerate_cases, c4.degenerate_cases);
    }
}
