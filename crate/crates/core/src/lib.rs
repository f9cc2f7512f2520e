//! Shortest zero (mortal) products of matrix sets over finite fields.
//!
//! A set of n x n matrices over GF(q) is *mortal* when some product of its
//! members (repetition allowed) is the zero matrix; the semigroup it
//! generates is always finite over a finite field, so the shortest such
//! product is a well-defined length. This crate computes it exactly, along
//! with everything the question drags in:
//!
//! - [`field`] — exact GF(p) arithmetic for 64-bit primes and table-backed
//!   GF(p^e) for small orders;
//! - [`matrix`] — matrices as immutable values, plus packed integer codes;
//! - [`search`] — layered BFS over product values: shortest zero word,
//!   lexicographically least witness, minimal-word counting, semigroup
//!   enumeration;
//! - [`rystov`] — Rys(n, q), the maximum shortest-zero-product length over
//!   mortal sets, by exhaustive or orbit-reduced enumeration with honest
//!   exactness reporting;
//! - [`fibonacci`] — rank of apparition and the generator pairs whose
//!   shortest zero product exceeds any requested length (the reason
//!   Rys(2, q) is unbounded);
//! - [`verify`] — exhaustive verifiers for the structure results the search
//!   relies on.
//!
//! Everything is integer-exact and deterministic: reruns, thread counts, and
//! enumeration order never change a result.

pub mod field;
pub mod fibonacci;
pub mod genfile;
pub mod matrix;
mod primes;
pub mod rystov;
pub mod search;
pub mod verify;

pub use field::{Elem, Field, FieldError, FieldSpec};
pub use fibonacci::{construct_counterexample, rank_of_apparition, CxBundle};
pub use genfile::GeneratorFile;
pub use matrix::{MatError, MatSpace, Matrix, MatrixCode};
pub use rystov::{canonical_tuple, rys_number, KMax, RysMode, RysQuery, RysRecord};
pub use search::{
    count_minimal_zero_words, enumerate_semigroup, shortest_zero_product, SearchConfig,
    SearchResult, Word,
};
pub use verify::{verify_corollary, verify_lemma_abc, verify_minimal_shape, VerificationReport};

/// Crate version, embedded in records and the catalog.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the JSONL catalog record schema.
pub const CATALOG_SCHEMA_VERSION: u32 = 1;
