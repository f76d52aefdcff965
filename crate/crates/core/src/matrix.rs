//! Dense exact matrices over ℚ(i).

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

/// Operator selector for [`matrix_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Adjoint,
}

/// Result of [`ExactMatrix::classify`]. Both flags may hold at once
/// (the identity is a unitary projection).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub projection: bool,
    pub unitary: bool,
}

impl Classification {
    pub fn is_neither(&self) -> bool {
        !self.projection && !self.unitary
    }
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<GaussianRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, entries: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = GaussianRational::one();
        }
        m
    }

    pub fn diag(values: &[GaussianRational]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * n + i] = v.clone();
        }
        m
    }

    /// Diagonal 0/1 matrix from a boolean mask.
    pub fn diag_mask(mask: &[bool]) -> Self {
        let n = mask.len();
        let mut m = Self::zeros(n, n);
        for (i, &b) in mask.iter().enumerate() {
            if b {
                m.entries[i * n + i] = GaussianRational::one();
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Integer-entry convenience constructor, mainly for tests.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| GaussianRational::from_int(x)).collect()).collect(),
        )
        .expect("rectangular input")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussianRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussianRational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GaussianRational::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let v = self.get(r, c);
                    if r == c { v.is_one() } else { v.is_zero() }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<GaussianRational> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn trace(&self) -> GaussianRational {
        let mut t = GaussianRational::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "sub {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i * other.cols + j] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| !m[r * cols + col].is_zero()) else {
                continue;
            };
            for c in 0..cols {
                m.swap(pivot * cols + c, rank * cols + c);
            }
            let inv = m[rank * cols + col].inv().expect("nonzero pivot");
            for r in rank + 1..rows {
                let f = &m[r * cols + col] * &inv;
                if f.is_zero() {
                    continue;
                }
                for c in col..cols {
                    let d = &f * &m[rank * cols + c];
                    m[r * cols + c] -= &d;
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    pub fn classify(&self) -> Result<Classification> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let adj = self.adjoint();
        let projection = adj == *self && self.mul(self)? == *self;
        let unitary = self.mul(&adj)?.is_identity();
        Ok(Classification { projection, unitary })
    }

    pub fn is_projection(&self) -> bool {
        self.classify().map(|c| c.projection).unwrap_or(false)
    }

    pub fn is_unitary(&self) -> bool {
        self.classify().map(|c| c.unitary).unwrap_or(false)
    }

    /// Kronecker product; entry `(i·r + k, j·s + l)` is `a[i][j]·b[k][l]`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.entries[(i * other.rows + k) * cols + j * other.cols + l] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(at, at)`.
    pub(crate) fn place_diagonal_block(&mut self, block: &Self, at: usize) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.entries[(at + r) * self.cols + at + c] = block.get(r, c).clone();
            }
        }
    }

    /// Rows of the matrix as nested vectors (JSON form).
    pub fn to_rows(&self) -> Vec<Vec<GaussianRational>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(<[_]>::to_vec).collect()
    }

    /// Entry `(r, c)` as an integer, when it is one.
    pub fn integer_entry(&self, r: usize, c: usize) -> Option<BigInt> {
        self.get(r, c).as_integer()
    }
}

/// `add`, `mul` or `adjoint` (which ignores `b`).
pub fn matrix_arith(a: &ExactMatrix, b: &ExactMatrix, op: ArithOp) -> Result<ExactMatrix> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Adjoint => Ok(a.adjoint()),
    }
}

impl Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<Vec<GaussianRational>>::deserialize(d)?;
        ExactMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::ratio(n, d)
    }

    fn rotation() -> ExactMatrix {
        ExactMatrix::from_rows(vec![vec![q(3, 5), q(4, 5)], vec![q(-4, 5), q(3, 5)]]).unwrap()
    }

    #[test]
    fn arith_examples() {
        let i2 = ExactMatrix::identity(2);
        assert_eq!(matrix_arith(&i2, &ExactMatrix::zeros(2, 2), ArithOp::Add).unwrap(), i2);

        let i = ExactMatrix::from_rows(vec![vec![GaussianRational::i()]]).unwrap();
        let neg_i = ExactMatrix::from_rows(vec![vec![-GaussianRational::i()]]).unwrap();
        assert_eq!(matrix_arith(&i, &i, ArithOp::Adjoint).unwrap(), neg_i);

        let swap = ExactMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(matrix_arith(&swap, &swap, ArithOp::Mul).unwrap(), i2);
    }

    #[test]
    fn dimension_errors() {
        let a = ExactMatrix::zeros(2, 3);
        assert!(a.add(&ExactMatrix::zeros(3, 2)).is_err());
        assert!(a.mul(&ExactMatrix::zeros(2, 3)).is_err());
        assert!(ExactMatrix::new(2, 2, vec![GaussianRational::one()]).is_err());
        assert!(matches!(a.classify(), Err(Error::NotSquare { .. })));
    }

    // Independent oracle: rank of a 2×2 matrix is decided by the determinant
    // and whether any entry is nonzero.
    fn rank2x2_oracle(m: &ExactMatrix) -> usize {
        let det = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
        if !det.is_zero() {
            2
        } else if m.is_zero() {
            0
        } else {
            1
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(ExactMatrix::identity(3).rank(), 3);
        assert_eq!(ExactMatrix::zeros(2, 2).rank(), 0);
        let ones = ExactMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert_eq!(rank2x2_oracle(&ones), 1);
        assert_eq!(ones.rank(), 1);
    }

    #[test]
    fn classify_examples() {
        let p = ExactMatrix::from_ints(&[&[1, 0], &[0, 0]]);
        assert_eq!(p.classify().unwrap(), Classification { projection: true, unitary: false });
        assert_eq!(rotation().classify().unwrap(), Classification { projection: false, unitary: true });
        assert!(ExactMatrix::from_ints(&[&[1, 1], &[0, 1]]).classify().unwrap().is_neither());
        let id = ExactMatrix::identity(2).classify().unwrap();
        assert!(id.projection && id.unitary);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(ExactMatrix::identity(2).kron(&ExactMatrix::identity(3)), ExactMatrix::identity(6));
        let p = ExactMatrix::diag_mask(&[true, false]);
        assert_eq!(p.kron(&ExactMatrix::identity(2)), ExactMatrix::diag_mask(&[true, true, false, false]));
    }

    #[test]
    fn json_round_trip() {
        let mut m = rotation();
        m.set(0, 1, GaussianRational::new(q(1, 2).re, q(-7, 3).re));
        let s = serde_json::to_string(&m).unwrap();
        let back: ExactMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ExactMatrix> {
        prop::collection::vec((-3i64..=3, -2i64..=2), rows * cols).prop_map(move |v| {
            let entries = v
                .into_iter()
                .map(|(re, im)| {
                    GaussianRational::new(
                        GaussianRational::from_int(re).re,
                        GaussianRational::from_int(im).re,
                    )
                })
                .collect();
            ExactMatrix::new(rows, cols, entries).unwrap()
        })
    }

    proptest! {
        #[test]
        fn rank_matches_adjoint(m in (1usize..4, 1usize..4).prop_flat_map(|(r, c)| small_matrix(r, c))) {
            prop_assert_eq!(m.rank(), m.adjoint().rank());
        }

        #[test]
        fn kron_rank_multiplies(a in small_matrix(2, 2), b in small_matrix(2, 2)) {
            prop_assert_eq!(rank2x2_oracle(&a) * rank2x2_oracle(&b), a.kron(&b).rank());
        }

        #[test]
        fn kron_associative(a in small_matrix(2, 1), b in small_matrix(1, 2), c in small_matrix(2, 2)) {
            prop_assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
        }

        #[test]
        fn projection_rank_is_trace(mask in prop::collection::vec(any::<bool>(), 1..5), rot in any::<bool>()) {
            let mut p = ExactMatrix::diag_mask(&mask);
            if rot && mask.len() >= 2 {
                let n = mask.len();
                let mut u = ExactMatrix::identity(n);
                u.place_diagonal_block(&rotation(), 0);
                p = u.mul(&p).unwrap().mul(&u.adjoint()).unwrap();
            }
            prop_assert!(p.classify().unwrap().projection);
            prop_assert_eq!(GaussianRational::from_int(p.rank() as i64), p.trace());
        }
    }
}
