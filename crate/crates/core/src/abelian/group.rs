//! Finitely presented abelian groups `⟨g₁..gₙ | relations⟩`.
//!
//! Decisions about a group (equality of elements, invariant factors) go
//! through a lazily built [`Normalizer`]: generators that appear with a unit
//! coefficient in some relation are eliminated by substitution first, then
//! the small remaining relation matrix is put in Smith normal form. Colimit
//! presentations have thousands of generators but almost all of them are
//! eliminated in the first phase.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::snf::{snf, IntMatrix};
use super::word::Word;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PresentedAbGroup {
    ngens: usize,
    relations: Vec<Word>,
    normal: OnceLock<Normalizer>,
}

/// `(free rank, torsion coefficients > 1 in divisibility order)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct InvariantFactors {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl InvariantFactors {
    pub fn free(rank: usize) -> Self {
        InvariantFactors { free_rank: rank, torsion: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for InvariantFactors {
    /// `Z^r ⊕ Z/d₁ ⊕ …`, `Z` for rank one, `0` for the trivial group.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

impl PresentedAbGroup {
    pub fn new(ngens: usize, relations: Vec<Word>) -> Result<Self> {
        if let Some(r) = relations.iter().position(|w| w.max_generator().is_some_and(|g| g >= ngens)) {
            return Err(Error::DimensionMismatch(format!(
                "relation {r} mentions a generator beyond {ngens}"
            )));
        }
        Ok(Self::new_unchecked(ngens, relations))
    }

    pub(crate) fn new_unchecked(ngens: usize, relations: Vec<Word>) -> Self {
        let relations = relations.into_iter().filter(|w| !w.is_zero()).collect();
        PresentedAbGroup { ngens, relations, normal: OnceLock::new() }
    }

    /// From a dense relation matrix (rows = relations).
    pub fn from_matrix(ngens: usize, relations: &IntMatrix) -> Result<Self> {
        if relations.rows() > 0 && relations.cols() != ngens {
            return Err(Error::DimensionMismatch(format!(
                "relation matrix has {} columns for {ngens} generators",
                relations.cols()
            )));
        }
        Ok(Self::new_unchecked(ngens, (0..relations.rows()).map(|r| Word::from_dense(relations.row(r))).collect()))
    }

    pub fn free(n: usize) -> Self {
        Self::new_unchecked(n, vec![])
    }

    /// `ℤ/d₁ ⊕ … ⊕ ℤ/d_k` (a zero modulus gives a free summand).
    pub fn cyclic_sum(moduli: &[i64]) -> Self {
        let rels = moduli
            .iter()
            .enumerate()
            .map(|(i, &d)| Word::from_terms([(i, BigInt::from(d))]))
            .collect();
        Self::new_unchecked(moduli.len(), rels)
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[Word] {
        &self.relations
    }

    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows_with_cols(self.relations.iter().map(|w| w.to_dense(self.ngens)).collect(), self.ngens)
            .expect("relations fit the generators")
    }

    pub fn normalizer(&self) -> &Normalizer {
        self.normal.get_or_init(|| Normalizer::build(self.ngens, &self.relations))
    }

    pub fn invariant_factors(&self) -> InvariantFactors {
        self.normalizer().invariant_factors()
    }

    pub fn canonical_string(&self) -> String {
        self.invariant_factors().to_string()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors().is_trivial()
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if w.max_generator().is_some_and(|g| g >= self.ngens) {
            return Err(Error::DimensionMismatch(format!("word mentions a generator beyond {}", self.ngens)));
        }
        Ok(())
    }

    /// Whether the word is zero in the group.
    pub fn is_zero(&self, w: &Word) -> Result<bool> {
        self.check_word(w)?;
        Ok(self.normalizer().is_zero(w))
    }

    pub fn words_equal(&self, x: &Word, y: &Word) -> Result<bool> {
        self.is_zero(&x.sub(y))
    }

    /// Canonical coordinates of an element: one entry per nontrivial cyclic
    /// summand, torsion summands first (reduced into `[0, d)`), then free.
    pub fn coordinates(&self, w: &Word) -> Result<Vec<BigInt>> {
        self.check_word(w)?;
        Ok(self.normalizer().coordinates(w))
    }
}

/// Decides `x = y` for dense integer words.
pub fn element_eq(g: &PresentedAbGroup, x: &[BigInt], y: &[BigInt]) -> Result<bool> {
    if x.len() != g.ngens() || y.len() != g.ngens() {
        return Err(Error::DimensionMismatch(format!(
            "words of length {} and {} for {} generators",
            x.len(),
            y.len(),
            g.ngens()
        )));
    }
    g.words_equal(&Word::from_dense(x), &Word::from_dense(y))
}

pub fn invariant_factors(g: &PresentedAbGroup) -> InvariantFactors {
    g.invariant_factors()
}

/// Simplified form of a presentation.
#[derive(Clone, Debug)]
pub struct Normalizer {
    /// Surviving generators in increasing order.
    survivors: Vec<usize>,
    /// For each generator: its position among survivors, or `None`.
    position: Vec<Option<usize>>,
    /// Eliminated generators written in survivor coordinates.
    substitution: BTreeMap<usize, Vec<(usize, BigInt)>>,
    /// Column transform from the Smith form of the residual relations.
    v: IntMatrix,
    v_inv: IntMatrix,
    /// Diagonal of the residual Smith form, padded with zeros (free summands).
    diag: Vec<BigInt>,
}

impl Normalizer {
    fn build(ngens: usize, relations: &[Word]) -> Self {
        let mut rows: Vec<Option<BTreeMap<usize, BigInt>>> = relations
            .iter()
            .map(|w| Some(w.terms().iter().cloned().collect::<BTreeMap<_, _>>()))
            .collect();
        let mut occurs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ngens];
        for (r, row) in rows.iter().enumerate() {
            for &g in row.as_ref().unwrap().keys() {
                occurs[g].insert(r);
            }
        }
        let mut eliminated: Vec<(usize, Vec<(usize, BigInt)>)> = Vec::new();
        let mut is_eliminated = vec![false; ngens];

        let mut progress = true;
        while progress {
            progress = false;
            for r in 0..rows.len() {
                let Some(row) = rows[r].as_ref() else { continue };
                // Unit entry whose generator occurs least often: keeps fill-in low.
                let pivot = row
                    .iter()
                    .filter(|(_, c)| c.abs().is_one())
                    .min_by_key(|(g, _)| (occurs[**g].len(), **g))
                    .map(|(g, c)| (*g, c.clone()));
                let Some((g, sign)) = pivot else { continue };
                let row = rows[r].take().unwrap();
                for h in row.keys() {
                    occurs[*h].remove(&r);
                }
                // sign·g + rest = 0  ⇒  g = −sign·rest
                let expr: Vec<(usize, BigInt)> =
                    row.iter().filter(|(h, _)| **h != g).map(|(h, c)| (*h, -(c * &sign))).collect();
                let others: Vec<usize> = occurs[g].iter().copied().collect();
                for r2 in others {
                    let target = rows[r2].as_mut().unwrap();
                    let c = target.remove(&g).unwrap();
                    occurs[g].remove(&r2);
                    for (h, e) in &expr {
                        let entry = target.entry(*h).or_default();
                        *entry += &c * e;
                        if entry.is_zero() {
                            target.remove(h);
                            occurs[*h].remove(&r2);
                        } else {
                            occurs[*h].insert(r2);
                        }
                    }
                    if target.is_empty() {
                        rows[r2] = None;
                    }
                }
                is_eliminated[g] = true;
                eliminated.push((g, expr));
                progress = true;
            }
        }

        let survivors: Vec<usize> = (0..ngens).filter(|&g| !is_eliminated[g]).collect();
        let mut position = vec![None; ngens];
        for (i, &g) in survivors.iter().enumerate() {
            position[g] = Some(i);
        }

        // Back-substitute so every eliminated generator is expressed in survivors.
        let mut substitution: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
        for (g, expr) in eliminated.iter().rev() {
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (h, c) in expr {
                match position[*h] {
                    Some(p) => *acc.entry(p).or_default() += c,
                    None => {
                        for (p, e) in &substitution[h] {
                            *acc.entry(*p).or_default() += c * e;
                        }
                    }
                }
            }
            substitution.insert(*g, acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        }

        let residual: Vec<Vec<BigInt>> = rows
            .into_iter()
            .flatten()
            .map(|row| {
                let mut dense = vec![BigInt::zero(); survivors.len()];
                for (g, c) in row {
                    dense[position[g].expect("residual rows only mention survivors")] = c;
                }
                dense
            })
            .collect();
        let n = survivors.len();
        let m = IntMatrix::from_rows_with_cols(residual, n).expect("rows sized to survivors");
        let s = snf(&m);
        let mut diag = s.diagonal();
        diag.resize(n, BigInt::zero());
        Normalizer { survivors, position, substitution, v: s.v, v_inv: s.v_inv, diag }
    }

    pub fn num_survivors(&self) -> usize {
        self.survivors.len()
    }

    /// Survivor coordinates of a word.
    fn survivor_vector(&self, w: &Word) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.survivors.len()];
        for (g, c) in w.terms() {
            match self.position[*g] {
                Some(p) => y[p] += c,
                None => {
                    for (p, e) in &self.substitution[g] {
                        y[*p] += c * e;
                    }
                }
            }
        }
        y
    }

    /// Smith coordinates, with torsion entries reduced.
    fn smith_vector(&self, w: &Word) -> Vec<BigInt> {
        let mut z = self.v.left_apply(&self.survivor_vector(w));
        for (zj, d) in z.iter_mut().zip(&self.diag) {
            if !d.is_zero() {
                *zj = zj.mod_floor(d);
            }
        }
        z
    }

    fn is_zero(&self, w: &Word) -> bool {
        self.smith_vector(w).iter().all(Zero::is_zero)
    }

    fn coordinates(&self, w: &Word) -> Vec<BigInt> {
        let z = self.smith_vector(w);
        z.into_iter().zip(&self.diag).filter(|(_, d)| !d.is_one()).map(|(x, _)| x).collect()
    }

    /// Moduli of the nontrivial cyclic summands, in coordinate order
    /// (`0` marks a free summand).
    pub fn moduli(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// Words for the canonical generators of the nontrivial summands,
    /// matching [`Normalizer::moduli`].
    pub fn canonical_generators(&self) -> Vec<Word> {
        (0..self.diag.len())
            .filter(|&j| !self.diag[j].is_one())
            .map(|j| {
                Word::from_terms(
                    self.v_inv.row(j).iter().enumerate().map(|(p, c)| (self.survivors[p], c.clone())),
                )
            })
            .collect()
    }

    fn invariant_factors(&self) -> InvariantFactors {
        let free_rank = self.diag.iter().filter(|d| d.is_zero()).count();
        let torsion = self.diag.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
        InvariantFactors { free_rank, torsion }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(ngens: usize, rels: &[&[i64]]) -> PresentedAbGroup {
        PresentedAbGroup::new(ngens, rels.iter().map(|r| Word::from_i64(r)).collect()).unwrap()
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(group(2, &[]).invariant_factors(), InvariantFactors::free(2));
        assert_eq!(
            group(1, &[&[2]]).invariant_factors(),
            InvariantFactors { free_rank: 0, torsion: vec![BigInt::from(2)] }
        );
        assert_eq!(group(2, &[&[1, -1]]).invariant_factors(), InvariantFactors::free(1));
        assert_eq!(group(2, &[&[2, 4], &[6, 8]]).canonical_string(), "Z/2 ⊕ Z/4");
        assert_eq!(group(3, &[&[2, 0, 0]]).canonical_string(), "Z^2 ⊕ Z/2");
        assert_eq!(group(1, &[&[1]]).canonical_string(), "0");
    }

    #[test]
    fn element_eq_examples() {
        let g = group(1, &[&[2]]);
        let w = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert!(element_eq(&g, &w(&[5]), &w(&[5])).unwrap());
        assert!(element_eq(&g, &w(&[3]), &w(&[1])).unwrap());
        let h = group(2, &[&[1, -2]]);
        assert!(!element_eq(&h, &w(&[1, 0]), &w(&[0, 1])).unwrap());
        assert!(element_eq(&h, &w(&[1, 0]), &w(&[0, 2])).unwrap());
        assert!(element_eq(&h, &w(&[1]), &w(&[1])).is_err());
    }

    #[test]
    fn relation_out_of_range() {
        assert!(PresentedAbGroup::new(1, vec![Word::from_i64(&[0, 1])]).is_err());
    }

    #[test]
    fn canonical_generators_span() {
        let g = group(3, &[&[2, 4, 0], &[0, 6, 3]]);
        let gens = g.normalizer().canonical_generators();
        let moduli = g.normalizer().moduli();
        assert_eq!(gens.len(), moduli.len());
        for (i, (w, d)) in gens.iter().zip(&moduli).enumerate() {
            let mut expect = vec![BigInt::zero(); gens.len()];
            expect[i] = BigInt::one();
            assert_eq!(g.coordinates(w).unwrap(), expect);
            assert!(g.is_zero(&w.scale(d)).unwrap());
        }
    }

    #[test]
    fn long_chain_reduces() {
        // g0 = 2 g1 = 4 g2 = ... : a chain of unit eliminations leaves Z.
        let n = 200;
        let rels: Vec<Word> = (0..n - 1)
            .map(|i| Word::from_terms([(i, BigInt::one()), (i + 1, BigInt::from(-2))]))
            .collect();
        let g = PresentedAbGroup::new(n, rels).unwrap();
        assert_eq!(g.canonical_string(), "Z");
        assert!(g.words_equal(&Word::generator(0), &Word::generator(n - 1).scale(&BigInt::from(2).pow(199u32))).unwrap());
    }
}
