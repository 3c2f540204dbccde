//! Exact linear algebra over GF(2).
//!
//! Vectors and matrices are bit-packed into `u64` words. Everything here is
//! deterministic: elimination always pivots on the lowest-index row with a 1
//! in the current column, and `solve` returns the solution with zeros in all
//! free columns, so downstream bases and coordinates are reproducible.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("quotient precondition violated: boundary vector {index} is not in the span of the cycles")]
    BoundaryOutsideCycles { index: usize },
    #[error("vector is not in the span of the given cycles and boundaries")]
    NotInSpan,
}

/// A vector over GF(2), bit-packed into 64-bit words.
///
/// Addition is XOR and every vector is its own inverse. Trailing bits of the
/// last word are kept zero so that `Eq` and `Hash` are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Vector with ones exactly at `indices`.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i);
        }
        v
    }

    /// Parses bits from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b % 2 == 1 {
                v.set(i);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn assign(&mut self, i: usize, value: bool) {
        if value {
            self.set(i);
        } else {
            self.clear(i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place addition (XOR). Lengths must agree.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor_assign length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Parity of the bitwise AND: the GF(2) inner product.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "dot length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }

    /// Compact 0/1 string, lowest index first.
    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({}; {{", self.len)?;
        for (n, i) in self.ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}})")
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bit_string())
    }
}

/// A dense matrix over GF(2), stored as a vector of row `BitVector`s.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

/// Result of reduction to reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: BitMatrix,
    /// Pivot column indices, strictly increasing.
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows).map(|_| BitVector::zeros(cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].assign(j, value);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.data[i].ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.data[i].dot(v) {
                out.set(i);
            }
        }
        out
    }

    /// Reduced row-echelon form.
    ///
    /// The pivot for each column is always the lowest-index remaining row
    /// with a 1 there, so the output is canonical for a given input.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| m.data[i].get(c)) else {
                continue;
            };
            m.data.swap(r, p);
            let pivot_row = m.data[r].clone();
            for (i, row) in m.data.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.rows {
                break;
            }
        }
        Rref {
            matrix: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Solves `A·x = b`, returning the solution with zeros in all free
    /// columns, or `None` when `b` is outside the column space.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>, Gf2Error> {
        if b.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                context: "solve right-hand side",
                expected: self.rows,
                actual: b.len(),
            });
        }
        // Eliminate on the augmented matrix [A | b].
        let mut m = self.clone();
        let mut rhs = b.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| m.data[i].get(c)) else {
                continue;
            };
            m.data.swap(r, p);
            let (br, bp) = (rhs.get(r), rhs.get(p));
            rhs.assign(r, bp);
            rhs.assign(p, br);
            let pivot_row = m.data[r].clone();
            let pivot_b = rhs.get(r);
            for i in 0..m.rows {
                if i != r && m.data[i].get(c) {
                    m.data[i].xor_assign(&pivot_row);
                    if pivot_b {
                        rhs.flip(i);
                    }
                }
            }
            pivots.push((r, c));
            r += 1;
            if r == m.rows {
                break;
            }
        }
        // Any zero row with a nonzero rhs bit means no solution.
        for i in r..m.rows {
            if rhs.get(i) {
                return Ok(None);
            }
        }
        let mut x = BitVector::zeros(self.cols);
        for &(row, col) in &pivots {
            if rhs.get(row) {
                x.set(col);
            }
        }
        Ok(Some(x))
    }

    /// Basis of the kernel `{x : A·x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let red = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &red.pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - red.rank);
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = BitVector::zeros(self.cols);
            v.set(f);
            for (r, &c) in red.pivots.iter().enumerate() {
                if red.matrix.get(r, f) {
                    v.set(c);
                }
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix({}x{})", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.data[i].to_bit_string())?;
        }
        Ok(())
    }
}

/// A quotient `span(cycles) / span(boundaries)` with a fixed basis and a
/// linear coordinate map.
///
/// The basis vectors are the first cycles (in input order) that are
/// independent modulo the boundaries, so coordinates are reproducible.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    ambient_len: usize,
    basis: Vec<BitVector>,
    // Echelon rows spanning boundaries + accepted cycles, each with the
    // quotient coordinates of what was accumulated into it.
    echelon: Vec<(BitVector, BitVector)>,
}

impl QuotientSpace {
    /// Builds the quotient. Fails if some boundary is not in the span of the
    /// cycles (the inclusion precondition).
    pub fn new(cycles: &[BitVector], boundaries: &[BitVector]) -> Result<Self, Gf2Error> {
        let ambient_len = cycles
            .first()
            .or(boundaries.first())
            .map_or(0, BitVector::len);
        for v in cycles.iter().chain(boundaries) {
            if v.len() != ambient_len {
                return Err(Gf2Error::DimensionMismatch {
                    context: "quotient input vector",
                    expected: ambient_len,
                    actual: v.len(),
                });
            }
        }

        // Check span(boundaries) ⊆ span(cycles).
        let mut cycle_ech: Vec<BitVector> = Vec::new();
        for z in cycles {
            let mut v = z.clone();
            for e in &cycle_ech {
                let p = e.first_one().unwrap();
                if v.get(p) {
                    v.xor_assign(e);
                }
            }
            if !v.is_zero() {
                cycle_ech.push(v);
            }
        }
        for (index, b) in boundaries.iter().enumerate() {
            let mut v = b.clone();
            for e in &cycle_ech {
                let p = e.first_one().unwrap();
                if v.get(p) {
                    v.xor_assign(e);
                }
            }
            if !v.is_zero() {
                return Err(Gf2Error::BoundaryOutsideCycles { index });
            }
        }

        // Seed the echelon with the boundaries (coordinates zero), then
        // accept cycles that add new directions.
        let coord_width = cycles.len();
        let mut echelon: Vec<(BitVector, BitVector)> = Vec::new();
        let reduce = |v: &mut BitVector, c: &mut BitVector, ech: &[(BitVector, BitVector)]| {
            for (e, ec) in ech {
                let p = e.first_one().unwrap();
                if v.get(p) {
                    v.xor_assign(e);
                    c.xor_assign(ec);
                }
            }
        };
        for b in boundaries {
            let mut v = b.clone();
            let mut c = BitVector::zeros(coord_width);
            reduce(&mut v, &mut c, &echelon);
            if !v.is_zero() {
                echelon.push((v, c));
            }
        }
        let mut basis = Vec::new();
        for z in cycles {
            let mut v = z.clone();
            let mut c = BitVector::zeros(coord_width);
            reduce(&mut v, &mut c, &echelon);
            if !v.is_zero() {
                c.flip(basis.len());
                basis.push(z.clone());
                echelon.push((v, c));
            }
        }
        Ok(Self {
            ambient_len,
            basis,
            echelon,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    pub fn ambient_len(&self) -> usize {
        self.ambient_len
    }

    /// Coordinates of `v` modulo the boundaries, in the quotient basis.
    /// Errors when `v` is outside span(cycles) + span(boundaries).
    pub fn coords(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.ambient_len {
            return Err(Gf2Error::DimensionMismatch {
                context: "quotient coords input",
                expected: self.ambient_len,
                actual: v.len(),
            });
        }
        let mut rem = v.clone();
        let mut coords = BitVector::zeros(self.basis.len());
        for (e, ec) in &self.echelon {
            let p = e.first_one().unwrap();
            if rem.get(p) {
                rem.xor_assign(e);
                for i in ec.ones().filter(|&i| i < self.basis.len()) {
                    coords.flip(i);
                }
            }
        }
        if !rem.is_zero() {
            return Err(Gf2Error::NotInSpan);
        }
        Ok(coords)
    }

    /// The representative cycle `Σ coords_i · basis_i`.
    pub fn representative(&self, coords: &BitVector) -> BitVector {
        assert_eq!(coords.len(), self.basis.len(), "coords length mismatch");
        let mut out = BitVector::zeros(self.ambient_len);
        for i in coords.ones() {
            out.xor_assign(&self.basis[i]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(cols: usize, rows: &[&[usize]]) -> BitMatrix {
        BitMatrix::from_rows(
            cols,
            rows.iter()
                .map(|r| BitVector::from_indices(cols, r))
                .collect(),
        )
    }

    #[test]
    fn rref_identity() {
        let m = BitMatrix::identity(2);
        let red = m.rref();
        assert_eq!(red.matrix, m);
        assert_eq!(red.pivots, vec![0, 1]);
        assert_eq!(red.rank, 2);
    }

    #[test]
    fn rref_zero() {
        let m = BitMatrix::zeros(3, 3);
        let red = m.rref();
        assert_eq!(red.matrix, m);
        assert!(red.pivots.is_empty());
        assert_eq!(red.rank, 0);
    }

    #[test]
    fn rref_rank_one() {
        // [[1,1],[1,1]] reduces to [[1,1],[0,0]].
        let m = mat(2, &[&[0, 1], &[0, 1]]);
        let red = m.rref();
        assert_eq!(red.matrix, mat(2, &[&[0, 1], &[]]));
        assert_eq!(red.pivots, vec![0]);
        assert_eq!(red.rank, 1);
    }

    #[test]
    fn solve_identity() {
        let m = BitMatrix::identity(4);
        let b = BitVector::from_indices(4, &[1, 3]);
        assert_eq!(m.solve(&b).unwrap(), Some(b));
    }

    #[test]
    fn solve_zero_matrix_no_solution() {
        let m = BitMatrix::zeros(2, 2);
        let b = BitVector::from_indices(2, &[0]);
        assert_eq!(m.solve(&b).unwrap(), None);
    }

    #[test]
    fn solve_free_column_convention() {
        // A = [[1,1]], b = [1]: the free column stays zero.
        let m = mat(2, &[&[0, 1]]);
        let b = BitVector::from_indices(1, &[0]);
        assert_eq!(m.solve(&b).unwrap(), Some(BitVector::from_indices(2, &[0])));
    }

    #[test]
    fn solve_dimension_mismatch() {
        let m = BitMatrix::identity(2);
        let b = BitVector::zeros(3);
        assert!(matches!(
            m.solve(&b),
            Err(Gf2Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_of_identity_empty() {
        assert!(BitMatrix::identity(3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_zero_is_standard_basis() {
        let basis = BitMatrix::zeros(3, 3).kernel_basis();
        assert_eq!(basis.len(), 3);
        for (i, v) in basis.iter().enumerate() {
            assert_eq!(v, &BitVector::from_indices(3, &[i]));
        }
    }

    #[test]
    fn kernel_hand_example() {
        let m = mat(3, &[&[0, 1], &[2]]);
        let basis = m.kernel_basis();
        assert_eq!(basis, vec![BitVector::from_indices(3, &[0, 1])]);
    }

    #[test]
    fn quotient_zero_when_cycles_equal_boundaries() {
        let vs = vec![
            BitVector::from_indices(3, &[0, 1]),
            BitVector::from_indices(3, &[1, 2]),
        ];
        let q = QuotientSpace::new(&vs, &vs).unwrap();
        assert_eq!(q.dim(), 0);
        assert!(q.coords(&vs[0]).unwrap().is_zero());
    }

    #[test]
    fn quotient_no_boundaries() {
        let vs = vec![
            BitVector::from_indices(3, &[0]),
            BitVector::from_indices(3, &[0]),
            BitVector::from_indices(3, &[1]),
        ];
        let q = QuotientSpace::new(&vs, &[]).unwrap();
        assert_eq!(q.dim(), 2);
    }

    #[test]
    fn quotient_rank_arithmetic() {
        // Cycles span GF(2)^3, boundaries span one dimension: quotient dim 2.
        let cycles = vec![
            BitVector::from_indices(3, &[0]),
            BitVector::from_indices(3, &[1]),
            BitVector::from_indices(3, &[2]),
        ];
        let boundaries = vec![BitVector::from_indices(3, &[0, 2])];
        let q = QuotientSpace::new(&cycles, &boundaries).unwrap();
        assert_eq!(q.dim(), 2);
        for b in &boundaries {
            assert!(q.coords(b).unwrap().is_zero());
        }
        // coords of each basis vector is the matching unit vector.
        for (i, z) in q.basis().to_vec().iter().enumerate() {
            let c = q.coords(z).unwrap();
            assert_eq!(c.ones().collect::<Vec<_>>(), vec![i]);
        }
    }

    #[test]
    fn quotient_precondition_reported() {
        let cycles = vec![BitVector::from_indices(3, &[0])];
        let boundaries = vec![BitVector::from_indices(3, &[1])];
        assert!(matches!(
            QuotientSpace::new(&cycles, &boundaries),
            Err(Gf2Error::BoundaryOutsideCycles { index: 0 })
        ));
    }

    prop_compose! {
        fn arb_matrix()(rows in 1usize..12, cols in 1usize..12)
            (entries in proptest::collection::vec(any::<bool>(), rows * cols),
             rows in Just(rows), cols in Just(cols))
            -> BitMatrix
        {
            let mut m = BitMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, entries[i * cols + j]);
                }
            }
            m
        }
    }

    proptest! {
        #[test]
        fn solve_satisfies_equation(m in arb_matrix(), bits in proptest::collection::vec(any::<bool>(), 12)) {
            let x0 = BitVector::from_bits(
                &bits.iter().take(m.cols()).map(|&b| b as u8).collect::<Vec<_>>(),
            );
            // Use A·x0 as rhs so a solution always exists.
            let b = m.mul_vec(&x0);
            let x = m.solve(&b).unwrap().expect("rhs is in the image");
            prop_assert_eq!(m.mul_vec(&x), b);
        }

        #[test]
        fn rref_idempotent_and_rank_stable(m in arb_matrix()) {
            let red = m.rref();
            let red2 = red.matrix.rref();
            prop_assert_eq!(&red2.matrix, &red.matrix);
            prop_assert_eq!(red2.rank, red.rank);
            // pivots strictly increasing
            prop_assert!(red.pivots.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn kernel_vectors_annihilated(m in arb_matrix()) {
            let basis = m.kernel_basis();
            prop_assert_eq!(basis.len(), m.cols() - m.rank());
            for v in &basis {
                prop_assert!(m.mul_vec(v).is_zero());
            }
        }

        #[test]
        fn quotient_coords_linear(m in arb_matrix(), sel in proptest::collection::vec(any::<bool>(), 24)) {
            let cycles = m.kernel_basis();
            prop_assume!(!cycles.is_empty());
            let q = QuotientSpace::new(&cycles, &[]).unwrap();
            let comb = |bits: &[bool]| {
                let mut v = BitVector::zeros(m.cols());
                for (i, z) in cycles.iter().enumerate() {
                    if bits[i % bits.len()] {
                        v.xor_assign(z);
                    }
                }
                v
            };
            let u = comb(&sel[..12]);
            let w = comb(&sel[12..]);
            let cu = q.coords(&u).unwrap();
            let cw = q.coords(&w).unwrap();
            let cuw = q.coords(&u.xor(&w)).unwrap();
            prop_assert_eq!(cu.xor(&cw), cuw);
        }
    }
}
