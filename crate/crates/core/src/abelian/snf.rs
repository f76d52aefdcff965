//! Dense integer matrices and Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged integer matrix".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Like [`IntMatrix::from_rows`] but with an explicit column count, so
    /// that matrices with zero rows keep their width.
    pub fn from_rows_with_cols(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch(format!("rows must have {cols} entries")));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("rectangular input")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
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
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = self.get(i, j);
                if !m.is_zero() {
                    *o += x * m;
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c).is_zero()))
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !m[r * n + k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for c in 0..n {
                    m.swap(k * n + c, p * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                    m[i * n + j] = v / &prev;
                }
            }
            prev = m[k * n + k].clone();
        }
        Ok(sign * &m[n * n - 1])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] += k · row[src]`
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * k;
            if !v.is_zero() {
                self.data[dst * self.cols + c] += v;
            }
        }
    }

    /// `col[dst] += k · col[src]`
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * k;
            if !v.is_zero() {
                self.data[r * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = v;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|r| {
                let cells: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|r| self.row(r).iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        parse_int_rows(&v).and_then(IntMatrix::from_rows).map_err(D::Error::custom)
    }
}

/// Integer entries may be JSON numbers or decimal strings.
pub(crate) fn parse_int(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) if n.is_i64() => Ok(BigInt::from(n.as_i64().unwrap())),
        serde_json::Value::String(s) => {
            s.trim().parse().map_err(|_| Error::Parse(format!("invalid integer '{s}'")))
        }
        other => Err(Error::Parse(format!("expected integer, found {other}"))),
    }
}

pub(crate) fn parse_int_rows(v: &serde_json::Value) -> Result<Vec<Vec<BigInt>>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("expected an array of rows".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("expected a row array".into()))?
                .iter()
                .map(parse_int)
                .collect()
        })
        .collect()
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` diagonal, nonnegative, with
/// `dᵢ | dᵢ₊₁`. The inverses of `U` and `V` are tracked alongside.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

/// Smith normal form. The pivot is always the entry of smallest nonzero
/// absolute value in the remaining submatrix, ties broken in row-major
/// order, so the result is deterministic.
pub fn snf(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Every operation on `a` is mirrored: row ops on `u` (and the inverse op
    // on the columns of `u_inv`), column ops on `v` (inverse on rows of `v_inv`).
    let swap_rows = |a: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, i: usize, j: usize| {
        a.swap_rows(i, j);
        u.swap_rows(i, j);
        u_inv.swap_cols(i, j);
    };
    let swap_cols = |a: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, i: usize, j: usize| {
        a.swap_cols(i, j);
        v.swap_cols(i, j);
        v_inv.swap_rows(i, j);
    };
    let add_row = |a: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, dst: usize, src: usize, k: &BigInt| {
        a.add_row(dst, src, k);
        u.add_row(dst, src, k);
        u_inv.add_col(src, dst, &-k);
    };
    let add_col = |a: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, dst: usize, src: usize, k: &BigInt| {
        a.add_col(dst, src, k);
        v.add_col(dst, src, k);
        v_inv.add_row(src, dst, &-k);
    };

    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    let x = a.get(r, c);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(br, bc)| x.abs() < a.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else {
                return finish(a, u, v, u_inv, v_inv);
            };
            swap_rows(&mut a, &mut u, &mut u_inv, t, pr);
            swap_cols(&mut a, &mut v, &mut v_inv, t, pc);

            let mut dirty = false;
            for r in t + 1..rows {
                if a.get(r, t).is_zero() {
                    continue;
                }
                let q = a.get(r, t).div_floor(a.get(t, t));
                add_row(&mut a, &mut u, &mut u_inv, r, t, &-q);
                dirty |= !a.get(r, t).is_zero();
            }
            for c in t + 1..cols {
                if a.get(t, c).is_zero() {
                    continue;
                }
                let q = a.get(t, c).div_floor(a.get(t, t));
                add_col(&mut a, &mut v, &mut v_inv, c, t, &-q);
                dirty |= !a.get(t, c).is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let pivot = a.get(t, t).clone();
            let offender = (t + 1..rows)
                .find(|&r| (t + 1..cols).any(|c| !a.get(r, c).is_multiple_of(&pivot)));
            match offender {
                Some(r) => add_row(&mut a, &mut u, &mut u_inv, t, r, &BigInt::one()),
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    finish(a, u, v, u_inv, v_inv)
}

impl IntMatrix {
    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = v;
        }
    }
}

fn finish(d: IntMatrix, u: IntMatrix, v: IntMatrix, u_inv: IntMatrix, v_inv: IntMatrix) -> SnfResult {
    SnfResult { u, d, v, u_inv, v_inv }
}

/// Integer solution `x` of `x·B = t`, if one exists.
pub fn solve_left(b: &IntMatrix, t: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if t.len() != b.cols {
        return Err(Error::DimensionMismatch(format!(
            "target of length {} for a matrix with {} columns",
            t.len(),
            b.cols
        )));
    }
    let s = snf(b);
    // x·U⁻¹·D = t·V
    let tv = s.v.left_apply(t);
    let diag = s.diagonal();
    let mut w = vec![BigInt::zero(); b.rows];
    for (j, target) in tv.iter().enumerate() {
        let dj = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        if dj.is_zero() {
            if !target.is_zero() {
                return Ok(None);
            }
        } else {
            let (q, r) = target.div_rem(&dj);
            if !r.is_zero() {
                return Ok(None);
            }
            w[j] = q;
        }
    }
    Ok(Some(s.u.left_apply(&w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_invariants(m: &IntMatrix, s: &SnfResult) {
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d);
        assert!(s.d.is_diagonal());
        assert_eq!(s.u.determinant().unwrap().abs(), BigInt::one());
        assert_eq!(s.v.determinant().unwrap().abs(), BigInt::one());
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(m.cols()));
        let diag = s.diagonal();
        assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn snf_examples() {
        let i2 = IntMatrix::identity(2);
        assert_eq!(snf(&i2).d, i2);
        assert_eq!(snf(&IntMatrix::from_i64(&[&[0]])).d, IntMatrix::from_i64(&[&[0]]));
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let s = snf(&m);
        check_invariants(&m, &s);
        assert_eq!(s.d, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn snf_degenerate_shapes() {
        for m in [IntMatrix::zeros(0, 3), IntMatrix::zeros(2, 0), IntMatrix::from_i64(&[&[0, 0, 6, 4]])] {
            check_invariants(&m, &snf(&m));
        }
    }

    #[test]
    fn determinant_oracle() {
        assert_eq!(IntMatrix::from_i64(&[&[2, 4], &[6, 8]]).determinant().unwrap(), BigInt::from(-8));
        assert_eq!(
            IntMatrix::from_i64(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]).determinant().unwrap(),
            BigInt::from(-2)
        );
    }

    #[test]
    fn solve_examples() {
        let b = IntMatrix::from_i64(&[&[1, -2]]);
        // (-1, 1) = λ(1, -2) has no integer solution
        assert_eq!(solve_left(&b, &[BigInt::from(-1), BigInt::from(1)]).unwrap(), None);
        let x = solve_left(&b, &[BigInt::from(3), BigInt::from(-6)]).unwrap().unwrap();
        assert_eq!(x, vec![BigInt::from(3)]);
    }

    proptest! {
        #[test]
        fn snf_invariants_hold(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(-10i64..=10, 16)) {
            let data: Vec<Vec<BigInt>> = (0..rows)
                .map(|r| (0..cols).map(|c| BigInt::from(seed[r * 4 + c])).collect())
                .collect();
            let m = IntMatrix::from_rows(data).unwrap();
            check_invariants(&m, &snf(&m));
        }
    }
}
