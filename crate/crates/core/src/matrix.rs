//! Square matrices over a finite field, and the packed integer codes that
//! make them cheap to hash, order, and tabulate.
//!
//! Matrices are immutable values: every operation returns a fresh matrix.
//! A [`MatSpace`] fixes a dimension and field and provides the bijective
//! code packing `code = sum entries[i] * q^i` over row-major index `i`
//! (little-endian; the zero matrix is code 0).

use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use crate::field::{Elem, Field, FieldError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MatError {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    ShapeMismatch(usize, usize),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("matrix must be square ({rows} rows, row {row} has {len} entries)")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("conjugating matrix is singular")]
    SingularConjugator,
    #[error("code {code} out of range for a space of {cardinality} matrices")]
    CodeOutOfRange { code: u64, cardinality: u64 },
    #[error("q^(n^2) does not fit in 64 bits (q = {q}, n = {n}); packed codes unavailable")]
    SpaceTooLarge { q: u64, n: usize },
    #[error("embedding dimension {target} is smaller than {n}")]
    EmbedDimension { target: usize, n: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Packed integer form of a matrix; bijective with `Matrix` given `(n, field)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MatrixCode(pub u64);

/// An `n x n` matrix over a finite field, entries in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    field: Arc<Field>,
    entries: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.n)
            .map(|r| r.iter().map(|e| e.code().to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

impl Matrix {
    pub fn new(field: Arc<Field>, n: usize, entries: Vec<Elem>) -> Result<Matrix, MatError> {
        if entries.len() != n * n {
            return Err(MatError::EntryCount { expected: n * n, got: entries.len() });
        }
        debug_assert!(entries.iter().all(|e| e.code() < field.q()));
        Ok(Matrix { n, field, entries })
    }

    pub fn from_codes(field: Arc<Field>, n: usize, codes: &[u64]) -> Result<Matrix, MatError> {
        let entries = codes
            .iter()
            .map(|&c| field.elem(c))
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::new(field, n, entries)
    }

    /// Builds from nested row lists of element codes (the JSON wire form).
    pub fn from_rows_codes(field: Arc<Field>, rows: &[Vec<u64>]) -> Result<Matrix, MatError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatError::NotSquare { rows: n, row: i, len: row.len() });
            }
        }
        let flat: Vec<u64> = rows.iter().flatten().copied().collect();
        Matrix::from_codes(field, n, &flat)
    }

    pub fn zero(field: Arc<Field>, n: usize) -> Matrix {
        let z = field.zero();
        Matrix { n, field, entries: vec![z; n * n] }
    }

    pub fn identity(field: Arc<Field>, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.entries[i * n + i] = m.field.one();
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Elem {
        self.entries[row * self.n + col]
    }
    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    /// Entry codes as nested rows (the JSON wire form).
    pub fn rows_codes(&self) -> Vec<Vec<u64>> {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(|e| e.code()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.code() == 0)
    }

    fn check_compatible(&self, other: &Matrix) -> Result<(), MatError> {
        if self.n != other.n {
            return Err(MatError::ShapeMismatch(self.n, other.n));
        }
        if !(Arc::ptr_eq(&self.field, &other.field) || self.field.spec() == other.field.spec()) {
            return Err(MatError::FieldMismatch);
        }
        Ok(())
    }

    /// Standard matrix product over the field.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatError> {
        self.check_compatible(other)?;
        let n = self.n;
        let f = &self.field;
        let mut out = vec![f.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.code() == 0 {
                    continue;
                }
                for j in 0..n {
                    let prod = f.mul(a, other.entries[k * n + j]);
                    out[i * n + j] = f.add(out[i * n + j], prod);
                }
            }
        }
        Ok(Matrix { n, field: self.field.clone(), entries: out })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatError> {
        self.check_compatible(other)?;
        let f = &self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Matrix { n: self.n, field: self.field.clone(), entries })
    }

    /// `self^k` by repeated squaring; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> Matrix {
        let mut acc = Matrix::identity(self.field.clone(), self.n);
        let mut base = self.clone();
        while k != 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same space");
            }
            base = base.mul(&base).expect("same space");
            k >>= 1;
        }
        acc
    }

    /// Determinant by Gaussian elimination with first-nonzero-pivot selection.
    pub fn det(&self) -> Elem {
        let n = self.n;
        let f = &self.field;
        let mut a: Vec<Elem> = self.entries.clone();
        let mut det = f.one();
        for col in 0..n {
            // First row at or below the diagonal with a nonzero entry.
            let Some(pivot_row) = (col..n).find(|&r| a[r * n + col].code() != 0) else {
                return f.zero();
            };
            if pivot_row != col {
                for j in 0..n {
                    a.swap(pivot_row * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let pivot = a[col * n + col];
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("pivot is nonzero");
            for r in (col + 1)..n {
                let factor = f.mul(a[r * n + col], inv);
                if factor.code() == 0 {
                    continue;
                }
                for j in col..n {
                    let sub = f.mul(factor, a[col * n + j]);
                    a[r * n + j] = f.sub(a[r * n + j], sub);
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.det().code() != 0
    }

    /// Row rank via elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let f = &self.field;
        let mut a = self.entries.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot_row) = (rank..n).find(|&r| a[r * n + col].code() != 0) else {
                continue;
            };
            for j in 0..n {
                a.swap(pivot_row * n + j, rank * n + j);
            }
            let inv = f.inv(a[rank * n + col]).expect("pivot is nonzero");
            for r in 0..n {
                if r == rank || a[r * n + col].code() == 0 {
                    continue;
                }
                let factor = f.mul(a[r * n + col], inv);
                for j in 0..n {
                    let sub = f.mul(factor, a[rank * n + j]);
                    a[r * n + j] = f.sub(a[r * n + j], sub);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse by Gauss-Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let f = &self.field;
        let mut a = self.entries.clone();
        let mut b = Matrix::identity(self.field.clone(), n).entries;
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| a[r * n + col].code() != 0)?;
            if pivot_row != col {
                for j in 0..n {
                    a.swap(pivot_row * n + j, col * n + j);
                    b.swap(pivot_row * n + j, col * n + j);
                }
            }
            let inv = f.inv(a[col * n + col]).expect("pivot is nonzero");
            for j in 0..n {
                a[col * n + j] = f.mul(a[col * n + j], inv);
                b[col * n + j] = f.mul(b[col * n + j], inv);
            }
            for r in 0..n {
                if r == col || a[r * n + col].code() == 0 {
                    continue;
                }
                let factor = a[r * n + col];
                for j in 0..n {
                    let s1 = f.mul(factor, a[col * n + j]);
                    a[r * n + j] = f.sub(a[r * n + j], s1);
                    let s2 = f.mul(factor, b[col * n + j]);
                    b[r * n + j] = f.sub(b[r * n + j], s2);
                }
            }
        }
        Some(Matrix { n, field: self.field.clone(), entries: b })
    }

    /// `P^-1 * self * P`; errors when `P` is singular.
    pub fn conjugate(&self, p: &Matrix) -> Result<Matrix, MatError> {
        self.check_compatible(p)?;
        let p_inv = p.inverse().ok_or(MatError::SingularConjugator)?;
        p_inv.mul(self)?.mul(p)
    }

    /// Entrywise scalar multiple.
    pub fn scale(&self, lambda: Elem) -> Matrix {
        let f = &self.field;
        let entries = self.entries.iter().map(|&e| f.mul(e, lambda)).collect();
        Matrix { n: self.n, field: self.field.clone(), entries }
    }

    /// Embeds into a larger dimension: `self` in the top-left block, zeros
    /// elsewhere. Multiplicative: embed(M) * embed(N) = embed(M * N).
    pub fn block_embed(&self, target: usize) -> Result<Matrix, MatError> {
        if target < self.n {
            return Err(MatError::EmbedDimension { target, n: self.n });
        }
        let mut out = Matrix::zero(self.field.clone(), target);
        for i in 0..self.n {
            for j in 0..self.n {
                out.entries[i * target + j] = self.entries[i * self.n + j];
            }
        }
        Ok(out)
    }
}

/// The space of all `n x n` matrices over a field, with packed-code
/// arithmetic. Construction fails when `q^(n^2)` does not fit in `u64`.
#[derive(Debug, Clone)]
pub struct MatSpace {
    field: Arc<Field>,
    n: usize,
    cardinality: u64,
}

impl MatSpace {
    pub fn new(field: Arc<Field>, n: usize) -> Result<MatSpace, MatError> {
        let q = field.q();
        let cells = (n * n) as u32;
        let cardinality = q
            .checked_pow(cells)
            .ok_or(MatError::SpaceTooLarge { q, n })?;
        Ok(MatSpace { field, n, cardinality })
    }

    #[inline]
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    /// Packs entries as base-q digits, row-major, entry 0 least significant.
    pub fn encode(&self, m: &Matrix) -> MatrixCode {
        debug_assert_eq!(m.n(), self.n);
        debug_assert_eq!(m.field().spec(), self.field.spec());
        let q = self.field.q();
        let mut code = 0u64;
        for e in m.entries.iter().rev() {
            code = code * q + e.code();
        }
        MatrixCode(code)
    }

    /// Inverse of [`encode`](Self::encode); rejects out-of-range codes.
    pub fn decode(&self, code: MatrixCode) -> Result<Matrix, MatError> {
        if code.0 >= self.cardinality {
            return Err(MatError::CodeOutOfRange { code: code.0, cardinality: self.cardinality });
        }
        let q = self.field.q();
        let mut c = code.0;
        let mut entries = Vec::with_capacity(self.n * self.n);
        for _ in 0..self.n * self.n {
            entries.push(self.field.elem(c % q).expect("digit < q"));
            c /= q;
        }
        Ok(Matrix { n: self.n, field: self.field.clone(), entries })
    }

    pub fn codes(&self) -> impl Iterator<Item = MatrixCode> {
        (0..self.cardinality).map(MatrixCode)
    }

    /// All matrices decoded, by ascending code. Intended for small spaces.
    pub(crate) fn all_matrices(&self) -> Vec<Matrix> {
        self.codes().map(|c| self.decode(c).expect("in range")).collect()
    }

    /// Per-code invertibility flags for small spaces.
    pub(crate) fn invertibility_table(&self) -> Vec<bool> {
        self.all_matrices().iter().map(Matrix::is_invertible).collect()
    }

    /// Full `code x code` multiplication table when the space is small enough
    /// (fits u16 codes and a square table).
    pub(crate) fn mul_table(&self) -> Option<Vec<u16>> {
        if self.cardinality > 4096 {
            return None;
        }
        let card = self.cardinality as usize;
        let mats = self.all_matrices();
        let mut table = vec![0u16; card * card];
        for (a, ma) in mats.iter().enumerate() {
            for (b, mb) in mats.iter().enumerate() {
                let prod = ma.mul(mb).expect("same space");
                table[a * card + b] = self.encode(&prod).0 as u16;
            }
        }
        Some(table)
    }
}

/// Parses the CLI matrix literal: rows separated by `;`, entries by `,`,
/// entries are integer element codes (e.g. `1,0;0,0`). The matrix must be
/// square. Errors name the offending token and its position.
pub fn parse_matrix_literal(text: &str, field: &Arc<Field>) -> Result<Matrix, String> {
    let rows: Vec<&str> = text.split(';').collect();
    let n = rows.len();
    let mut codes: Vec<u64> = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != n {
            return Err(format!(
                "row {} has {} entries, expected {} (matrix must be square)",
                i + 1,
                cells.len(),
                n
            ));
        }
        for (j, cell) in cells.iter().enumerate() {
            let tok = cell.trim();
            let code: u64 = tok.parse().map_err(|_| {
                format!("row {}, entry {}: invalid element code '{}'", i + 1, j + 1, tok)
            })?;
            if code >= field.q() {
                return Err(format!(
                    "row {}, entry {}: code {} out of range for GF({})",
                    i + 1,
                    j + 1,
                    code,
                    field.q()
                ));
            }
            codes.push(code);
        }
    }
    Matrix::from_codes(field.clone(), n, &codes).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn gf(p: u64) -> Arc<Field> {
        Field::shared(p, 1).unwrap()
    }

    fn mat(field: &Arc<Field>, rows: &[&[u64]]) -> Matrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        Matrix::from_rows_codes(field.clone(), &rows).unwrap()
    }

    #[test]
    fn idempotent_and_zero_products() {
        let f = gf(2);
        let a = mat(&f, &[&[1, 0], &[0, 0]]);
        assert_eq!(a.mul(&a).unwrap(), a);
        let o = Matrix::zero(f.clone(), 2);
        let b = mat(&f, &[&[1, 1], &[1, 0]]);
        assert_eq!(o.mul(&b).unwrap(), o);
        assert_eq!(o.mul(&a).unwrap(), o);
    }

    #[test]
    fn fibonacci_generator_square_gf2() {
        let f = gf(2);
        let b = mat(&f, &[&[1, 1], &[1, 0]]);
        assert_eq!(b.mul(&b).unwrap(), mat(&f, &[&[0, 1], &[1, 1]]));
    }

    #[test]
    fn determinant_values() {
        for p in [2u64, 3, 5, 7, 11] {
            let f = gf(p);
            let b = mat(&f, &[&[1, 1], &[1, 0]]);
            assert_eq!(b.det().code(), p - 1, "det = -1 over GF({p})");
            assert!(b.is_invertible());
        }
        let f = gf(5);
        assert_eq!(Matrix::identity(f.clone(), 3).det().code(), 1);
        let singular = mat(&f, &[&[1, 0], &[0, 0]]);
        assert_eq!(singular.det().code(), 0);
        assert!(!singular.is_invertible());
    }

    #[test]
    fn det_multiplicative_exhaustive() {
        for p in [2u64, 3] {
            let f = gf(p);
            let space = MatSpace::new(f.clone(), 2).unwrap();
            let mats = space.all_matrices();
            for a in &mats {
                for b in &mats {
                    let lhs = a.mul(b).unwrap().det();
                    let rhs = f.mul(a.det(), b.det());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn conjugation_fixed_points_and_errors() {
        let f = gf(3);
        let space = MatSpace::new(f.clone(), 2).unwrap();
        let id = Matrix::identity(f.clone(), 2);
        let zero = Matrix::zero(f.clone(), 2);
        for p in space.all_matrices().into_iter().filter(Matrix::is_invertible) {
            assert_eq!(id.conjugate(&p).unwrap(), id);
            assert_eq!(zero.conjugate(&p).unwrap(), zero);
        }
        let singular = mat(&f, &[&[1, 0], &[0, 0]]);
        assert_eq!(id.conjugate(&singular).unwrap_err(), MatError::SingularConjugator);
    }

    #[test]
    fn conjugation_preserves_det_rank_idempotence_gf2() {
        let f = gf(2);
        let space = MatSpace::new(f.clone(), 2).unwrap();
        let mats = space.all_matrices();
        for m in &mats {
            let idem = m.mul(m).unwrap() == *m;
            for p in mats.iter().filter(|p| p.is_invertible()) {
                let c = m.conjugate(p).unwrap();
                assert_eq!(c.det(), m.det());
                assert_eq!(c.rank(), m.rank());
                assert_eq!(c.mul(&c).unwrap() == c, idem);
            }
        }
    }

    #[test]
    fn scaling_entrywise() {
        let f = gf(3);
        let m = mat(&f, &[&[1, 1], &[1, 0]]);
        let two = f.elem(2).unwrap();
        assert_eq!(m.scale(two), mat(&f, &[&[2, 2], &[2, 0]]));
    }

    #[test]
    fn encode_examples_and_roundtrip() {
        let f = gf(2);
        let space = MatSpace::new(f.clone(), 2).unwrap();
        assert_eq!(space.encode(&Matrix::zero(f.clone(), 2)).0, 0);
        // 1 + 2*1 + 4*1 + 8*0 = 7
        assert_eq!(space.encode(&mat(&f, &[&[1, 1], &[1, 0]])).0, 7);
        for code in space.codes() {
            let m = space.decode(code).unwrap();
            assert_eq!(space.encode(&m), code);
        }
        assert!(matches!(
            space.decode(MatrixCode(16)),
            Err(MatError::CodeOutOfRange { .. })
        ));
    }

    #[test]
    fn encode_monotone_in_positional_entry_order() {
        // Code order equals lexicographic order of the reversed row-major
        // entry tuple (entry 0 is the least significant digit).
        let f = gf(3);
        let space = MatSpace::new(f.clone(), 2).unwrap();
        let mut prev: Option<Vec<u64>> = None;
        for code in space.codes() {
            let m = space.decode(code).unwrap();
            let mut key: Vec<u64> = m.entries().iter().map(|e| e.code()).collect();
            key.reverse();
            if let Some(p) = &prev {
                assert!(*p < key);
            }
            prev = Some(key);
        }
    }

    #[test]
    fn block_embed_properties() {
        let f = gf(2);
        let o2 = Matrix::zero(f.clone(), 2);
        assert_eq!(o2.block_embed(3).unwrap(), Matrix::zero(f.clone(), 3));
        let a = mat(&f, &[&[1, 0], &[0, 0]]);
        let a3 = a.block_embed(3).unwrap();
        assert_eq!(a3.mul(&a3).unwrap(), a3);
        assert!(matches!(a.block_embed(1), Err(MatError::EmbedDimension { .. })));

        // Multiplicative injection, exhaustive Mat2(GF(2)) -> Mat3(GF(2)).
        let space = MatSpace::new(f.clone(), 2).unwrap();
        let mats = space.all_matrices();
        let embedded: Vec<Matrix> =
            mats.iter().map(|m| m.block_embed(3).unwrap()).collect();
        for (i, x) in embedded.iter().enumerate() {
            for (j, y) in embedded.iter().enumerate() {
                if i != j {
                    assert_ne!(x, y);
                }
                let lhs = x.mul(y).unwrap();
                let rhs = mats[i].mul(&mats[j]).unwrap().block_embed(3).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn shape_and_field_mismatch_errors() {
        let f2 = gf(2);
        let f3 = gf(3);
        let a = Matrix::identity(f2.clone(), 2);
        let b = Matrix::identity(f2.clone(), 3);
        let c = Matrix::identity(f3.clone(), 2);
        assert_eq!(a.mul(&b).unwrap_err(), MatError::ShapeMismatch(2, 3));
        assert_eq!(a.mul(&c).unwrap_err(), MatError::FieldMismatch);
    }

    #[test]
    fn inverse_roundtrip_gf5() {
        let f = gf(5);
        let space = MatSpace::new(f.clone(), 2).unwrap();
        let id = Matrix::identity(f.clone(), 2);
        let mut invertible = 0;
        for m in space.all_matrices() {
            match m.inverse() {
                Some(inv) => {
                    invertible += 1;
                    assert_eq!(m.mul(&inv).unwrap(), id);
                    assert_eq!(inv.mul(&m).unwrap(), id);
                }
                None => assert!(!m.is_invertible()),
            }
        }
        assert_eq!(invertible, 480); // |GL_2(5)| = (25-1)(25-5)
    }

    #[test]
    fn space_too_large() {
        let f = gf(primes_next(1 << 32));
        assert!(matches!(
            MatSpace::new(f, 2),
            Err(MatError::SpaceTooLarge { .. })
        ));
    }

    fn primes_next(n: u64) -> u64 {
        crate::primes::next_prime(n)
    }

    #[test]
    fn parse_literal() {
        let f = gf(2);
        let m = parse_matrix_literal("1,0;0,0", &f).unwrap();
        assert_eq!(m.rows_codes(), vec![vec![1, 0], vec![0, 0]]);
        let m = parse_matrix_literal(" 1 , 1 ; 1 , 0 ", &f).unwrap();
        assert_eq!(m.rows_codes(), vec![vec![1, 1], vec![1, 0]]);

        let err = parse_matrix_literal("1,0;0,x", &f).unwrap_err();
        assert!(err.contains("row 2, entry 2") && err.contains("'x'"), "{err}");
        let err = parse_matrix_literal("1,0;0,5", &f).unwrap_err();
        assert!(err.contains("out of range"), "{err}");
        let err = parse_matrix_literal("1,0,1;0,1", &f).unwrap_err();
        assert!(err.contains("row 1"), "{err}");
    }

    #[test]
    fn matrix_pow() {
        let f = gf(5);
        let b = mat(&f, &[&[1, 1], &[1, 0]]);
        assert_eq!(b.pow(0), Matrix::identity(f.clone(), 2));
        let mut acc = Matrix::identity(f.clone(), 2);
        for k in 0..12u64 {
            assert_eq!(b.pow(k), acc);
            acc = acc.mul(&b).unwrap();
        }
    }
}
