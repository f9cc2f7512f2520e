#![allow(dead_code)] // each test target uses its own subset

//! Shared oracles for the integration tests. Everything here recomputes
//! results along routes independent of the library implementation paths it
//! is used to check.

use std::sync::Arc;

use mortal_core::field::Field;
use mortal_core::matrix::Matrix;
use mortal_core::search::{word_product, Word};

pub fn gf(p: u64) -> Arc<Field> {
    Field::shared(p, 1).unwrap()
}

pub fn mat(field: &Arc<Field>, rows: &[&[u64]]) -> Matrix {
    let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
    Matrix::from_rows_codes(field.clone(), &rows).unwrap()
}

pub fn fibonacci_pair(p: u64) -> Vec<Matrix> {
    let f = gf(p);
    vec![mat(&f, &[&[1, 0], &[0, 0]]), mat(&f, &[&[1, 1], &[1, 0]])]
}

/// Brute-force oracle: the minimal zero-word length among all words of
/// length <= max_len, by direct enumeration and multiplication.
pub fn brute_force_shortest_zero(gens: &[Matrix], max_len: usize) -> Option<usize> {
    let k = gens.len() as u64;
    for len in 1..=max_len {
        let mut word = vec![0u32; len];
        loop {
            if word_product(gens, &Word(word.clone())).unwrap().is_zero() {
                return Some(len);
            }
            // Odometer increment over base-k words.
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                word[pos] += 1;
                if (word[pos] as u64) < k {
                    break;
                }
                word[pos] = 0;
            }
            if word.iter().all(|&l| l == 0) {
                break;
            }
        }
    }
    None
}

/// Brute-force count of zero words of exactly the given length.
pub fn brute_force_zero_word_count(gens: &[Matrix], len: usize) -> u64 {
    let k = gens.len() as u32;
    let mut count = 0u64;
    let mut word = vec![0u32; len];
    loop {
        if word_product(gens, &Word(word.clone())).unwrap().is_zero() {
            count += 1;
        }
        let mut pos = len;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            word[pos] += 1;
            if word[pos] < k {
                break;
            }
            word[pos] = 0;
        }
        if word.iter().all(|&l| l == 0) {
            break;
        }
    }
    count
}

/// Linear-scan oracle for the rank of apparition.
pub fn rank_of_apparition_scan(p: u64) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    let mut i = 0u64;
    loop {
        (a, b) = (b, (a + b) % p);
        i += 1;
        if a == 0 {
            return i;
        }
    }
}
