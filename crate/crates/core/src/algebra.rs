//! Multi-matrix algebras `M_{n₁} ⊕ … ⊕ M_{n_k}`, their elements, unital and
//! non-unital *-homomorphisms, inner automorphisms, and matrix-tower
//! stabilization.
//!
//! A *-homomorphism between multi-matrix algebras is determined up to unitary
//! equivalence by its Bratteli multiplicity matrix. Here the coordinate
//! placement of every copy is stored explicitly, so applying a hom is
//! deterministic and diagonal matrices always go to diagonal matrices.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Classification, ExactMatrix};
use crate::scalar::GaussianRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiMatrixAlgebra {
    blocks: Arc<[usize]>,
}

impl MultiMatrixAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("at least one block is required".into()));
        }
        if let Some(i) = blocks.iter().position(|&n| n == 0) {
            return Err(Error::InvalidAlgebra(format!("block {i} has size 0")));
        }
        Ok(MultiMatrixAlgebra { blocks: blocks.into() })
    }

    /// `ℂⁿ`, the commutative algebra with `n` one-dimensional blocks.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Size of the faithful diagonal representation, `Σ nᵢ`.
    pub fn coordinates(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Complex dimension `Σ nᵢ²`.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&n| n == 1)
    }

    /// Global index of the first diagonal coordinate of each block.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.blocks
            .iter()
            .map(|n| {
                let o = acc;
                acc += n;
                o
            })
            .collect()
    }

    /// `(block, local index)` of every global diagonal coordinate.
    pub fn coordinate_blocks(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().enumerate().flat_map(|(b, &n)| (0..n).map(move |i| (b, i))).collect()
    }
}

impl fmt::Display for MultiMatrixAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|n| format!("M{n}")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl<'de> Deserialize<'de> for MultiMatrixAlgebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Spec {
            blocks: Vec<usize>,
        }
        let spec = Spec::deserialize(d)?;
        MultiMatrixAlgebra::new(spec.blocks).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    parent: MultiMatrixAlgebra,
    parts: Vec<ExactMatrix>,
}

impl AlgebraElement {
    pub fn new(parent: &MultiMatrixAlgebra, parts: Vec<ExactMatrix>) -> Result<Self> {
        if parts.len() != parent.num_blocks() {
            return Err(Error::DimensionMismatch(format!(
                "{} parts for {} blocks",
                parts.len(),
                parent.num_blocks()
            )));
        }
        for (i, (p, &n)) in parts.iter().zip(parent.blocks()).enumerate() {
            if p.rows() != n || p.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    p.rows(),
                    p.cols()
                )));
            }
        }
        Ok(AlgebraElement { parent: parent.clone(), parts })
    }

    pub fn zero(parent: &MultiMatrixAlgebra) -> Self {
        let parts = parent.blocks().iter().map(|&n| ExactMatrix::zeros(n, n)).collect();
        AlgebraElement { parent: parent.clone(), parts }
    }

    pub fn identity(parent: &MultiMatrixAlgebra) -> Self {
        let parts = parent.blocks().iter().map(|&n| ExactMatrix::identity(n)).collect();
        AlgebraElement { parent: parent.clone(), parts }
    }

    /// Diagonal 0/1 projection selecting the given global coordinates.
    pub fn diagonal_projection(parent: &MultiMatrixAlgebra, mask: &[bool]) -> Result<Self> {
        if mask.len() != parent.coordinates() {
            return Err(Error::DimensionMismatch(format!(
                "mask of length {} for {} coordinates",
                mask.len(),
                parent.coordinates()
            )));
        }
        let mut parts = Vec::with_capacity(parent.num_blocks());
        let mut at = 0;
        for &n in parent.blocks() {
            parts.push(ExactMatrix::diag_mask(&mask[at..at + n]));
            at += n;
        }
        Ok(AlgebraElement { parent: parent.clone(), parts })
    }

    /// The rank-one diagonal projection at a global coordinate.
    pub fn coordinate_projection(parent: &MultiMatrixAlgebra, coord: usize) -> Self {
        let mut mask = vec![false; parent.coordinates()];
        mask[coord] = true;
        Self::diagonal_projection(parent, &mask).expect("mask sized to the algebra")
    }

    /// The central projection onto a block.
    pub fn block_unit(parent: &MultiMatrixAlgebra, block: usize) -> Self {
        let mut e = Self::zero(parent);
        e.parts[block] = ExactMatrix::identity(parent.blocks()[block]);
        e
    }

    pub fn parent(&self) -> &MultiMatrixAlgebra {
        &self.parent
    }

    pub fn parts(&self) -> &[ExactMatrix] {
        &self.parts
    }

    pub fn part(&self, block: usize) -> &ExactMatrix {
        &self.parts[block]
    }

    fn check_parent(&self, other: &Self) -> Result<()> {
        if self.parent != other.parent {
            return Err(Error::ParentMismatch(format!("{} vs {}", self.parent, other.parent)));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&ExactMatrix, &ExactMatrix) -> Result<ExactMatrix>,
    ) -> Result<Self> {
        self.check_parent(other)?;
        let parts = self.parts.iter().zip(&other.parts).map(|(a, b)| f(a, b)).collect::<Result<_>>()?;
        Ok(AlgebraElement { parent: self.parent.clone(), parts })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, ExactMatrix::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, ExactMatrix::sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, ExactMatrix::mul)
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        AlgebraElement { parent: self.parent.clone(), parts: self.parts.iter().map(|p| p.scale(s)).collect() }
    }

    pub fn adjoint(&self) -> Self {
        AlgebraElement {
            parent: self.parent.clone(),
            parts: self.parts.iter().map(ExactMatrix::adjoint).collect(),
        }
    }

    /// `1 − self`.
    pub fn complement(&self) -> Self {
        AlgebraElement::identity(&self.parent).sub(self).expect("same parent")
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(ExactMatrix::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.parts.iter().all(ExactMatrix::is_identity)
    }

    pub fn is_diagonal(&self) -> bool {
        self.parts.iter().all(ExactMatrix::is_diagonal)
    }

    /// Blockwise classification; a flag holds only if it holds in every block.
    pub fn classify(&self) -> Classification {
        self.parts.iter().fold(Classification { projection: true, unitary: true }, |acc, p| {
            let c = p.classify().expect("blocks are square");
            Classification { projection: acc.projection && c.projection, unitary: acc.unitary && c.unitary }
        })
    }

    pub fn is_projection(&self) -> bool {
        self.classify().projection
    }

    pub fn is_unitary(&self) -> bool {
        self.classify().unitary
    }

    pub fn rank_vector(&self) -> Vec<usize> {
        self.parts.iter().map(ExactMatrix::rank).collect()
    }

    /// Indices of the blocks in which the element is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.parts.len()).filter(|&b| !self.parts[b].is_zero()).collect()
    }

    /// The diagonal of the faithful representation.
    pub fn diagonal(&self) -> Vec<GaussianRational> {
        self.parts.iter().flat_map(ExactMatrix::diagonal).collect()
    }

    /// For a diagonal 0/1 projection, its coordinate mask.
    pub fn diagonal_mask(&self) -> Option<Vec<bool>> {
        if !self.is_diagonal() {
            return None;
        }
        self.diagonal()
            .into_iter()
            .map(|v| if v.is_one() { Some(true) } else if v.is_zero() { Some(false) } else { None })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.parts).expect("matrices serialize")
    }

    pub fn from_json(parent: &MultiMatrixAlgebra, v: &serde_json::Value) -> Result<Self> {
        let parts: Vec<ExactMatrix> = serde_json::from_value(v.clone())?;
        Self::new(parent, parts)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// One copy of a domain block placed inside a codomain block, starting at
/// diagonal coordinate `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub block: usize,
    pub copy: usize,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StarHom {
    domain: MultiMatrixAlgebra,
    codomain: MultiMatrixAlgebra,
    multiplicity: Vec<Vec<usize>>,
    unital: bool,
    assignment: Vec<Vec<Slot>>,
}

impl StarHom {
    /// Builds a hom with the canonical lexicographic slot filling.
    pub fn new(
        domain: &MultiMatrixAlgebra,
        codomain: &MultiMatrixAlgebra,
        multiplicity: Vec<Vec<usize>>,
        unital: bool,
    ) -> Result<Self> {
        let assignment = multiplicity
            .iter()
            .map(|row| {
                let mut slots = Vec::new();
                let mut at = 0;
                for (j, &mult) in row.iter().enumerate() {
                    for copy in 0..mult {
                        slots.push(Slot { block: j, copy, offset: at });
                        at += domain.blocks().get(j).copied().unwrap_or(0);
                    }
                }
                slots
            })
            .collect();
        Self::with_assignment(domain, codomain, multiplicity, unital, assignment)
    }

    pub fn with_assignment(
        domain: &MultiMatrixAlgebra,
        codomain: &MultiMatrixAlgebra,
        multiplicity: Vec<Vec<usize>>,
        unital: bool,
        assignment: Vec<Vec<Slot>>,
    ) -> Result<Self> {
        let (kd, kc) = (domain.num_blocks(), codomain.num_blocks());
        if multiplicity.len() != kc || multiplicity.iter().any(|r| r.len() != kd) {
            return Err(Error::InvalidHom(format!("multiplicity matrix must be {kc}x{kd}")));
        }
        if assignment.len() != kc {
            return Err(Error::InvalidHom("one slot list per codomain block required".into()));
        }
        for (i, row) in multiplicity.iter().enumerate() {
            let used: usize = row.iter().zip(domain.blocks()).map(|(m, n)| m * n).sum();
            let size = codomain.blocks()[i];
            if used > size {
                return Err(Error::InvalidHom(format!(
                    "codomain block {i} needs {used} coordinates but has {size}"
                )));
            }
            if unital && used != size {
                return Err(Error::InvalidHom(format!(
                    "unital hom must fill codomain block {i} ({used} of {size} used)"
                )));
            }
            let slots = &assignment[i];
            let mut covered = vec![false; size];
            for (j, &m) in row.iter().enumerate().take(kd) {
                let mut copies: Vec<usize> =
                    slots.iter().filter(|s| s.block == j).map(|s| s.copy).collect();
                copies.sort_unstable();
                if copies != (0..m).collect::<Vec<_>>() {
                    return Err(Error::InvalidHom(format!(
                        "codomain block {i} must hold copies 0..{m} of domain block {j}"
                    )));
                }
            }
            for s in slots {
                if s.block >= kd {
                    return Err(Error::InvalidHom(format!("slot names domain block {}", s.block)));
                }
                let n = domain.blocks()[s.block];
                if s.offset + n > size {
                    return Err(Error::InvalidHom(format!("slot overruns codomain block {i}")));
                }
                for c in &mut covered[s.offset..s.offset + n] {
                    if *c {
                        return Err(Error::InvalidHom(format!("overlapping slots in codomain block {i}")));
                    }
                    *c = true;
                }
            }
        }
        Ok(StarHom {
            domain: domain.clone(),
            codomain: codomain.clone(),
            multiplicity,
            unital,
            assignment,
        })
    }

    /// Unital hom whose codomain blocks are exactly filled by `multiplicity`.
    pub fn unital_from_multiplicity(
        domain: &MultiMatrixAlgebra,
        multiplicity: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let blocks = multiplicity
            .iter()
            .map(|row| row.iter().zip(domain.blocks()).map(|(m, n)| m * n).sum())
            .collect();
        let codomain = MultiMatrixAlgebra::new(blocks)?;
        Self::new(domain, &codomain, multiplicity, true)
    }

    pub fn identity(a: &MultiMatrixAlgebra) -> Self {
        let k = a.num_blocks();
        let mult = (0..k).map(|i| (0..k).map(|j| usize::from(i == j)).collect()).collect();
        Self::new(a, a, mult, true).expect("identity is valid")
    }

    pub fn domain(&self) -> &MultiMatrixAlgebra {
        &self.domain
    }

    pub fn codomain(&self) -> &MultiMatrixAlgebra {
        &self.codomain
    }

    pub fn multiplicity(&self) -> &[Vec<usize>] {
        &self.multiplicity
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn assignment(&self) -> &[Vec<Slot>] {
        &self.assignment
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.parent() != &self.domain {
            return Err(Error::ParentMismatch(format!(
                "hom domain {} applied to element of {}",
                self.domain,
                a.parent()
            )));
        }
        let parts = self
            .assignment
            .iter()
            .zip(self.codomain.blocks())
            .map(|(slots, &size)| {
                let mut m = ExactMatrix::zeros(size, size);
                for s in slots {
                    m.place_diagonal_block(a.part(s.block), s.offset);
                }
                m
            })
            .collect();
        Ok(AlgebraElement { parent: self.codomain.clone(), parts })
    }

    /// Where each domain diagonal coordinate lands: the list of codomain
    /// global coordinates it is copied to.
    pub fn coordinate_images(&self) -> Vec<Vec<usize>> {
        let dom_offsets = self.domain.block_offsets();
        let cod_offsets = self.codomain.block_offsets();
        let mut images = vec![Vec::new(); self.domain.coordinates()];
        for (i, slots) in self.assignment.iter().enumerate() {
            for s in slots {
                for local in 0..self.domain.blocks()[s.block] {
                    images[dom_offsets[s.block] + local].push(cod_offsets[i] + s.offset + local);
                }
            }
        }
        for v in &mut images {
            v.sort_unstable();
        }
        images
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &StarHom) -> Result<StarHom> {
        if self.codomain != next.domain {
            return Err(Error::InvalidHom(format!(
                "cannot compose: {} is not {}",
                self.codomain, next.domain
            )));
        }
        let kd = self.domain.num_blocks();
        let mut multiplicity = vec![vec![0; kd]; next.codomain.num_blocks()];
        let mut assignment = Vec::with_capacity(next.codomain.num_blocks());
        for (i, outer) in next.assignment.iter().enumerate() {
            let mut slots = Vec::new();
            for o in outer {
                for inner in &self.assignment[o.block] {
                    let copy = multiplicity[i][inner.block];
                    multiplicity[i][inner.block] += 1;
                    slots.push(Slot { block: inner.block, copy, offset: o.offset + inner.offset });
                }
            }
            assignment.push(slots);
        }
        StarHom::with_assignment(
            &self.domain,
            &next.codomain,
            multiplicity,
            self.unital && next.unital,
            assignment,
        )
    }

    /// `φ ⊗ id_{M_m}`: same multiplicities on the enlarged blocks, with slot
    /// offsets scaled to match the Kronecker ordering `a ⊗ x`.
    pub fn stabilize(&self, m: usize) -> Result<StarHom> {
        let (dom, _) = stabilize(&self.domain, m, None)?;
        let (cod, _) = stabilize(&self.codomain, m, None)?;
        let assignment = self
            .assignment
            .iter()
            .map(|slots| slots.iter().map(|s| Slot { offset: s.offset * m, ..*s }).collect())
            .collect();
        StarHom::with_assignment(&dom, &cod, self.multiplicity.clone(), self.unital, assignment)
    }
}

/// Blocks `[n₁·m, …, n_k·m]`, and `φ ⊗ id` when a hom is given.
pub fn stabilize(
    a: &MultiMatrixAlgebra,
    m: usize,
    phi: Option<&StarHom>,
) -> Result<(MultiMatrixAlgebra, Option<StarHom>)> {
    if m == 0 {
        return Err(Error::InvalidAlgebra("stabilization level must be at least 1".into()));
    }
    let stab = MultiMatrixAlgebra::new(a.blocks().iter().map(|n| n * m).collect())?;
    let hom = phi.map(|p| p.stabilize(m)).transpose()?;
    Ok((stab, hom))
}

/// `a ⊗ x` for `a ∈ A`, `x ∈ M_m`, as an element of `A ⊗ M_m`.
pub fn tensor_element(a: &AlgebraElement, x: &ExactMatrix) -> Result<AlgebraElement> {
    let (stab, _) = stabilize(a.parent(), x.rows(), None)?;
    AlgebraElement::new(&stab, a.parts().iter().map(|p| p.kron(x)).collect())
}

/// `A⁺ ≅ A ⊕ ℂ` for unital `A`, with the projection `π` onto the adjoined
/// one-dimensional block.
pub fn unitalize(a: &MultiMatrixAlgebra) -> Result<(MultiMatrixAlgebra, StarHom)> {
    let mut blocks = a.blocks().to_vec();
    blocks.push(1);
    let plus = MultiMatrixAlgebra::new(blocks)?;
    let c = MultiMatrixAlgebra::new(vec![1])?;
    let mut row = vec![0; plus.num_blocks()];
    *row.last_mut().unwrap() = 1;
    let pi = StarHom::new(&plus, &c, vec![row], true)?;
    Ok((plus, pi))
}

/// Conjugation by a unitary `u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InnerAutomorphism {
    u: AlgebraElement,
}

impl InnerAutomorphism {
    pub fn new(u: AlgebraElement) -> Result<Self> {
        if !u.is_unitary() {
            return Err(Error::NotUnitary(u.to_string()));
        }
        Ok(InnerAutomorphism { u })
    }

    pub fn identity(a: &MultiMatrixAlgebra) -> Self {
        InnerAutomorphism { u: AlgebraElement::identity(a) }
    }

    /// Swaps two diagonal coordinates of one block.
    pub fn transposition(a: &MultiMatrixAlgebra, block: usize, i: usize, j: usize) -> Result<Self> {
        let n = *a
            .blocks()
            .get(block)
            .ok_or_else(|| Error::InvalidAlgebra(format!("no block {block}")))?;
        if i >= n || j >= n {
            return Err(Error::InvalidAlgebra(format!("coordinates {i},{j} outside M{n}")));
        }
        let mut u = AlgebraElement::identity(a);
        let mut m = ExactMatrix::identity(n);
        m.set(i, i, GaussianRational::zero());
        m.set(j, j, GaussianRational::zero());
        m.set(i, j, GaussianRational::one());
        m.set(j, i, GaussianRational::one());
        u.parts[block] = m;
        Self::new(u)
    }

    /// The rotation `[[3/5, 4/5], [−4/5, 3/5]]` on the first two coordinates
    /// of a block of size at least two.
    pub fn pythagorean(a: &MultiMatrixAlgebra, block: usize) -> Result<Self> {
        let n = *a
            .blocks()
            .get(block)
            .ok_or_else(|| Error::InvalidAlgebra(format!("no block {block}")))?;
        if n < 2 {
            return Err(Error::InvalidAlgebra(format!("block {block} is too small to rotate")));
        }
        let mut u = AlgebraElement::identity(a);
        let mut m = ExactMatrix::identity(n);
        m.set(0, 0, GaussianRational::ratio(3, 5));
        m.set(0, 1, GaussianRational::ratio(4, 5));
        m.set(1, 0, GaussianRational::ratio(-4, 5));
        m.set(1, 1, GaussianRational::ratio(3, 5));
        u.parts[block] = m;
        Self::new(u)
    }

    pub fn unitary(&self) -> &AlgebraElement {
        &self.u
    }

    pub fn parent(&self) -> &MultiMatrixAlgebra {
        self.u.parent()
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        if a.parent() != self.u.parent() {
            return Err(Error::ParentMismatch(format!(
                "unitary in {} applied to element of {}",
                self.u.parent(),
                a.parent()
            )));
        }
        let parts = self
            .u
            .parts()
            .iter()
            .zip(a.parts())
            .map(|(u, x)| {
                if u.is_identity() {
                    Ok(x.clone())
                } else {
                    u.mul(x)?.mul(&u.adjoint())
                }
            })
            .collect::<Result<_>>()?;
        Ok(AlgebraElement { parent: a.parent().clone(), parts })
    }

    /// When `u` is monomial (one nonzero entry per column), conjugation
    /// permutes diagonal matrix units: `u·e_c·u* = e_{σ(c)}`. Returns `σ` on
    /// global coordinates.
    pub fn coordinate_permutation(&self) -> Option<Vec<usize>> {
        let mut perm = Vec::with_capacity(self.parent().coordinates());
        let offsets = self.parent().block_offsets();
        for (b, part) in self.u.parts().iter().enumerate() {
            for c in 0..part.cols() {
                let mut rows = (0..part.rows()).filter(|&r| !part.get(r, c).is_zero());
                let r = rows.next()?;
                if rows.next().is_some() {
                    return None;
                }
                perm.push(offsets[b] + r);
            }
        }
        Some(perm)
    }

    /// The image of the inner automorphism under a unital hom: conjugation
    /// by `φ(u)`.
    pub fn push_forward(&self, phi: &StarHom) -> Result<InnerAutomorphism> {
        Self::new(phi.apply(&self.u)?)
    }
}

/// `u·a·u*`, blockwise.
pub fn conjugate(alpha: &InnerAutomorphism, a: &AlgebraElement) -> Result<AlgebraElement> {
    alpha.apply(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(blocks: &[usize]) -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::new(blocks.to_vec()).unwrap()
    }

    fn proj(a: &MultiMatrixAlgebra, mask: &[bool]) -> AlgebraElement {
        AlgebraElement::diagonal_projection(a, mask).unwrap()
    }

    #[test]
    fn algebra_validation() {
        assert!(MultiMatrixAlgebra::new(vec![]).is_err());
        assert!(MultiMatrixAlgebra::new(vec![2, 0]).is_err());
        let a: MultiMatrixAlgebra = serde_json::from_str(r#"{"blocks":[2,3]}"#).unwrap();
        assert_eq!(a.blocks(), &[2, 3]);
        assert_eq!(a.dimension(), 13);
        assert!(serde_json::from_str::<MultiMatrixAlgebra>(r#"{"blocks":[]}"#).is_err());
    }

    #[test]
    fn identity_hom_is_identity() {
        let a = alg(&[2]);
        let x = AlgebraElement::new(&a, vec![ExactMatrix::from_ints(&[&[1, 2], &[3, 4]])]).unwrap();
        assert_eq!(StarHom::identity(&a).apply(&x).unwrap(), x);
    }

    #[test]
    fn diagonal_embedding_of_scalars() {
        let c = alg(&[1]);
        let phi = StarHom::unital_from_multiplicity(&c, vec![vec![2]]).unwrap();
        assert_eq!(phi.codomain().blocks(), &[2]);
        let lambda = AlgebraElement::new(&c, vec![ExactMatrix::from_ints(&[&[7]])]).unwrap();
        let img = phi.apply(&lambda).unwrap();
        assert_eq!(img.part(0), &ExactMatrix::from_ints(&[&[7, 0], &[0, 7]]));
    }

    #[test]
    fn embedding_doubles_rank() {
        let m2 = alg(&[2]);
        let phi = StarHom::unital_from_multiplicity(&m2, vec![vec![2]]).unwrap();
        let p = proj(&m2, &[true, false]);
        let img = phi.apply(&p).unwrap();
        assert!(img.is_projection());
        assert_eq!(img.rank_vector(), vec![2]);
    }

    #[test]
    fn hom_validation() {
        let m2 = alg(&[2]);
        let m3 = alg(&[3]);
        assert!(StarHom::new(&m2, &m3, vec![vec![1]], true).is_err());
        assert!(StarHom::new(&m2, &m3, vec![vec![2]], false).is_err());
        assert!(StarHom::new(&m2, &m3, vec![vec![1]], false).is_ok());
        let overlapping = vec![vec![
            Slot { block: 0, copy: 0, offset: 0 },
            Slot { block: 0, copy: 1, offset: 1 },
        ]];
        assert!(StarHom::with_assignment(&m2, &alg(&[4]), vec![vec![2]], true, overlapping).is_err());
    }

    #[test]
    fn parent_mismatch() {
        let phi = StarHom::identity(&alg(&[2]));
        assert!(matches!(phi.apply(&AlgebraElement::zero(&alg(&[3]))), Err(Error::ParentMismatch(_))));
        let a = AlgebraElement::zero(&alg(&[2]));
        assert!(a.add(&AlgebraElement::zero(&alg(&[1, 1]))).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let m2 = alg(&[2]);
        let p = proj(&m2, &[true, false]);
        assert_eq!(conjugate(&InnerAutomorphism::identity(&m2), &p).unwrap(), p);
        let swap = InnerAutomorphism::transposition(&m2, 0, 0, 1).unwrap();
        assert_eq!(conjugate(&swap, &p).unwrap(), proj(&m2, &[false, true]));

        let rot = InnerAutomorphism::pythagorean(&m2, 0).unwrap();
        let q = conjugate(&rot, &p).unwrap();
        let r = GaussianRational::ratio;
        let expected = ExactMatrix::from_rows(vec![
            vec![r(9, 25), r(-12, 25)],
            vec![r(-12, 25), r(16, 25)],
        ])
        .unwrap();
        assert_eq!(q.part(0), &expected);
        assert!(q.is_projection());
        assert_eq!(q.rank_vector(), vec![1]);
    }

    #[test]
    fn non_unitary_rejected() {
        let m2 = alg(&[2]);
        let x = AlgebraElement::new(&m2, vec![ExactMatrix::from_ints(&[&[1, 1], &[0, 1]])]).unwrap();
        assert!(InnerAutomorphism::new(x).is_err());
    }

    #[test]
    fn stabilize_examples() {
        let m2 = alg(&[2]);
        assert_eq!(stabilize(&m2, 1, None).unwrap().0, m2);
        assert_eq!(stabilize(&alg(&[2, 3]), 2, None).unwrap().0, alg(&[4, 6]));
        let phi = StarHom::unital_from_multiplicity(&alg(&[1, 2]), vec![vec![1, 1], vec![0, 2]]).unwrap();
        let (_, stab) = stabilize(phi.domain(), 3, Some(&phi)).unwrap();
        let stab = stab.unwrap();
        assert_eq!(stab.multiplicity(), phi.multiplicity());
        assert_eq!(stab.codomain().blocks(), &[9, 12]);
        assert!(stabilize(&m2, 0, None).is_err());
    }

    #[test]
    fn stabilized_hom_matches_tensor() {
        // (φ ⊗ id)(a ⊗ x) = φ(a) ⊗ x
        let a = alg(&[1, 2]);
        let phi = StarHom::unital_from_multiplicity(&a, vec![vec![1, 1], vec![2, 0]]).unwrap();
        let el = AlgebraElement::new(
            &a,
            vec![ExactMatrix::from_ints(&[&[5]]), ExactMatrix::from_ints(&[&[1, 2], &[3, 4]])],
        )
        .unwrap();
        let x = ExactMatrix::from_ints(&[&[0, 1], &[2, 3]]);
        let lhs = phi.stabilize(2).unwrap().apply(&tensor_element(&el, &x).unwrap()).unwrap();
        let rhs = tensor_element(&phi.apply(&el).unwrap(), &x).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn unitalize_examples() {
        let m2 = alg(&[2]);
        let (plus, pi) = unitalize(&m2).unwrap();
        assert_eq!(plus.blocks(), &[2, 1]);
        let el = AlgebraElement::new(
            &plus,
            vec![ExactMatrix::from_ints(&[&[1, 2], &[3, 4]]), ExactMatrix::from_ints(&[&[9]])],
        )
        .unwrap();
        assert_eq!(pi.apply(&el).unwrap().part(0), &ExactMatrix::from_ints(&[&[9]]));
    }

    #[test]
    fn composition_multiplies_multiplicities() {
        let a = alg(&[1, 2]);
        let phi = StarHom::unital_from_multiplicity(&a, vec![vec![1, 1], vec![2, 1]]).unwrap();
        let psi = StarHom::unital_from_multiplicity(phi.codomain(), vec![vec![1, 2], vec![0, 1]]).unwrap();
        let comp = phi.then(&psi).unwrap();
        assert_eq!(comp.multiplicity(), &[vec![5, 3], vec![2, 1]]);
        let el = AlgebraElement::new(
            &a,
            vec![ExactMatrix::from_ints(&[&[5]]), ExactMatrix::from_ints(&[&[1, 2], &[3, 4]])],
        )
        .unwrap();
        assert_eq!(comp.apply(&el).unwrap(), psi.apply(&phi.apply(&el).unwrap()).unwrap());
    }

    #[test]
    fn permutation_detection() {
        let a = alg(&[1, 3]);
        let t = InnerAutomorphism::transposition(&a, 1, 0, 2).unwrap();
        assert_eq!(t.coordinate_permutation(), Some(vec![0, 3, 2, 1]));
        assert_eq!(InnerAutomorphism::pythagorean(&a, 1).unwrap().coordinate_permutation(), None);
    }
}
