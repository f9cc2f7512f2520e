//! Invariance and oracle-agreement properties of the shortest-zero-product
//! search.

mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use mortal_core::field::Field;
use mortal_core::matrix::Matrix;
use mortal_core::search::{
    count_minimal_zero_words, shortest_zero_product, SearchConfig, SearchResult,
};

fn search(gens: &[Matrix]) -> SearchResult {
    shortest_zero_product(gens, &SearchConfig::default()).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, field: &Arc<Field>, n: usize) -> Matrix {
    let codes: Vec<u64> = (0..n * n).map(|_| rng.random_range(0..field.q())).collect();
    Matrix::from_codes(field.clone(), n, &codes).unwrap()
}

fn random_invertible(rng: &mut ChaCha8Rng, field: &Arc<Field>, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, field, n);
        if m.is_invertible() {
            return m;
        }
    }
}

#[test]
fn bfs_agrees_with_brute_force_on_random_sets() {
    // 50 random generator sets each over GF(2) and GF(3), words of length
    // <= 6 enumerated exhaustively.
    for p in [2u64, 3] {
        let field = gf(p);
        let mut rng = ChaCha8Rng::seed_from_u64(0xB1F5 + p);
        for _ in 0..50 {
            let count = rng.random_range(1..=3);
            let gens: Vec<Matrix> =
                (0..count).map(|_| random_matrix(&mut rng, &field, 2)).collect();
            let brute = brute_force_shortest_zero(&gens, 6);
            let bfs = search(&gens);
            match brute {
                Some(len) => assert_eq!(bfs.shortest_length, Some(len as u64), "gens {gens:?}"),
                None => assert!(
                    bfs.shortest_length.is_none_or(|l| l > 6),
                    "gens {gens:?}"
                ),
            }
        }
    }
}

#[test]
fn minimal_word_count_matches_brute_force() {
    for p in [2u64, 3] {
        let gens = fibonacci_pair(p);
        let len = search(&gens).shortest_length.unwrap();
        let brute = brute_force_zero_word_count(&gens, len as usize);
        assert_eq!(count_minimal_zero_words(&gens).unwrap(), brute);
        assert_eq!(brute, 1, "the pair has a unique shortest zero word");
        // No shorter zero word exists.
        assert_eq!(brute_force_zero_word_count(&gens, len as usize - 1), 0);
    }
}

#[test]
fn conjugation_invariance_gf5() {
    // Simultaneous conjugation preserves mortality and shortest length.
    let field = gf(5);
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0A7);
    let mut base_sets: Vec<Vec<Matrix>> = vec![fibonacci_pair(5)];
    for _ in 0..9 {
        let count = rng.random_range(1..=3);
        base_sets.push((0..count).map(|_| random_matrix(&mut rng, &field, 2)).collect());
    }
    let baselines: Vec<SearchResult> = base_sets.iter().map(|g| search(g)).collect();
    for i in 0..100 {
        let p = random_invertible(&mut rng, &field, 2);
        let set_idx = i % base_sets.len();
        let conjugated: Vec<Matrix> = base_sets[set_idx]
            .iter()
            .map(|m| m.conjugate(&p).unwrap())
            .collect();
        let result = search(&conjugated);
        assert_eq!(result.mortal, baselines[set_idx].mortal);
        assert_eq!(result.shortest_length, baselines[set_idx].shortest_length);
        assert_eq!(result.semigroup_size, baselines[set_idx].semigroup_size);
    }
}

#[test]
fn scaling_invariance_gf5() {
    // Multiplying any one generator by any nonzero scalar changes nothing.
    let field = gf(5);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5CA1E);
    let mut checks = 0;
    while checks < 100 {
        let count = rng.random_range(1..=3);
        let gens: Vec<Matrix> =
            (0..count).map(|_| random_matrix(&mut rng, &field, 2)).collect();
        let baseline = search(&gens);
        let which = rng.random_range(0..gens.len());
        let lambda = field.elem(rng.random_range(1..5)).unwrap();
        let mut scaled = gens.clone();
        scaled[which] = scaled[which].scale(lambda);
        let result = search(&scaled);
        assert_eq!(result.mortal, baseline.mortal);
        assert_eq!(result.shortest_length, baseline.shortest_length);
        checks += 1;
    }
}

#[test]
fn generator_permutation_invariance() {
    let gens = fibonacci_pair(3);
    let forward = search(&gens);
    let swapped = search(&[gens[1].clone(), gens[0].clone()]);
    assert_eq!(forward.shortest_length, swapped.shortest_length);
    assert_eq!(forward.semigroup_size, swapped.semigroup_size);
    // The witness differs (indices relabeled) but its product is still zero.
    assert_eq!(swapped.witness.as_ref().unwrap().letters(), &[1, 0, 0, 0, 1]);
}

#[test]
fn block_embedding_preserves_length_and_closure_gf11() {
    let gens = fibonacci_pair(11);
    let flat = search(&gens);
    assert_eq!(flat.shortest_length, Some(11));

    let embedded: Vec<Matrix> = gens.iter().map(|m| m.block_embed(3).unwrap()).collect();
    // 11^9 codes: this runs in the hash-set dedup regime.
    let lifted = search(&embedded);
    assert_eq!(lifted.shortest_length, Some(11));
    assert_eq!(lifted.semigroup_size, flat.semigroup_size);
    assert_eq!(lifted.witness, flat.witness);
}
