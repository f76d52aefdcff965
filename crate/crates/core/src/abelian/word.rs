use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// A sparse integer combination of generators: `(generator, coefficient)`
/// pairs sorted by generator, never holding a zero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<(usize, BigInt)>);

impl Word {
    pub fn zero() -> Self {
        Word(Vec::new())
    }

    pub fn generator(g: usize) -> Self {
        Word(vec![(g, BigInt::one())])
    }

    pub fn from_dense(v: &[BigInt]) -> Self {
        Word(v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect())
    }

    pub fn from_i64(v: &[i64]) -> Self {
        Word(v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, BigInt::from(c))).collect())
    }

    /// Collects arbitrary pairs, merging repeats and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, BigInt)>) -> Self {
        let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (g, c) in terms {
            *acc.entry(g).or_default() += c;
        }
        Word(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    pub fn to_dense(&self, n: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); n];
        for (g, c) in &self.0 {
            v[*g] = c.clone();
        }
        v
    }

    pub fn terms(&self) -> &[(usize, BigInt)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, g: usize) -> BigInt {
        self.0
            .binary_search_by_key(&g, |(i, _)| *i)
            .map(|i| self.0[i].1.clone())
            .unwrap_or_default()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.last().map(|(g, _)| *g)
    }

    pub fn add(&self, other: &Word) -> Word {
        self.add_scaled(other, &BigInt::one())
    }

    pub fn sub(&self, other: &Word) -> Word {
        self.add_scaled(other, &-BigInt::one())
    }

    /// `self + k·other`
    pub fn add_scaled(&self, other: &Word, k: &BigInt) -> Word {
        if k.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_left = j >= other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0);
            let take_right = i >= self.0.len() || (j < other.0.len() && other.0[j].0 < self.0[i].0);
            if take_left {
                out.push(self.0[i].clone());
                i += 1;
            } else if take_right {
                out.push((other.0[j].0, &other.0[j].1 * k));
                j += 1;
            } else {
                let c = &self.0[i].1 + &other.0[j].1 * k;
                if !c.is_zero() {
                    out.push((self.0[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Word(out)
    }

    pub fn scale(&self, k: &BigInt) -> Word {
        if k.is_zero() {
            return Word::zero();
        }
        Word(self.0.iter().map(|(g, c)| (*g, c * k)).collect())
    }

    pub fn neg(&self) -> Word {
        Word(self.0.iter().map(|(g, c)| (*g, -c)).collect())
    }

    /// Renumbers generators by adding `offset`.
    pub fn shift(&self, offset: usize) -> Word {
        Word(self.0.iter().map(|(g, c)| (g + offset, c.clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_arithmetic() {
        let a = Word::from_i64(&[1, 0, 2]);
        let b = Word::from_i64(&[-1, 3, 0, 4]);
        assert_eq!(a.add(&b), Word::from_i64(&[0, 3, 2, 4]));
        assert_eq!(a.sub(&a), Word::zero());
        assert_eq!(a.add_scaled(&b, &BigInt::from(2)).to_dense(4), Word::from_i64(&[-1, 6, 2, 8]).to_dense(4));
        assert_eq!(Word::from_terms([(2, BigInt::from(1)), (0, BigInt::from(3)), (2, BigInt::from(-1))]), Word::from_i64(&[3]));
        assert_eq!(a.shift(2), Word::from_i64(&[0, 0, 1, 0, 2]));
        assert_eq!(b.coefficient(1), BigInt::from(3));
        assert_eq!(b.coefficient(2), BigInt::zero());
    }
}
