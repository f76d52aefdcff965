//! Unital commutative subalgebras, their Gel'fand spectra and the spectra of
//! inclusions and rotations.
//!
//! A unital commutative subalgebra of a multi-matrix algebra is the span of
//! a partition of unity into projections, its atoms. The spectrum is a finite
//! discrete space with one point per atom; point `i` is atom `i` in the
//! canonical (sorted) atom order.

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::algebra::{AlgebraElement, InnerAutomorphism, MultiMatrixAlgebra};
use crate::diagram::Arrow;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CommSubalgebra {
    parent: MultiMatrixAlgebra,
    atoms: Vec<AlgebraElement>,
}

impl CommSubalgebra {
    /// From an explicit partition of unity; validates and sorts the atoms.
    pub fn from_atoms(parent: &MultiMatrixAlgebra, atoms: Vec<AlgebraElement>) -> Result<Self> {
        let mut sum = AlgebraElement::zero(parent);
        for (i, p) in atoms.iter().enumerate() {
            if p.parent() != parent {
                return Err(Error::ParentMismatch(format!("atom {i} lives in {}", p.parent())));
            }
            if !p.is_projection() {
                return Err(Error::NotProjection { index: i });
            }
            if p.is_zero() {
                return Err(Error::InvalidSubalgebra(format!("atom {i} is zero")));
            }
            sum = sum.add(p)?;
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if !atoms[i].mul(&atoms[j])?.is_zero() {
                    return Err(Error::InvalidSubalgebra(format!("atoms {i} and {j} are not orthogonal")));
                }
            }
        }
        if !sum.is_identity() {
            return Err(Error::InvalidSubalgebra("atoms do not sum to the identity".into()));
        }
        Ok(Self::from_atoms_unchecked(parent, atoms))
    }

    pub(crate) fn from_atoms_unchecked(parent: &MultiMatrixAlgebra, mut atoms: Vec<AlgebraElement>) -> Self {
        atoms.sort();
        CommSubalgebra { parent: parent.clone(), atoms }
    }

    /// `ℂ·1`.
    pub fn scalars(parent: &MultiMatrixAlgebra) -> Self {
        Self::from_atoms_unchecked(parent, vec![AlgebraElement::identity(parent)])
    }

    /// The diagonal subalgebra: one atom per diagonal coordinate.
    pub fn diagonal(parent: &MultiMatrixAlgebra) -> Self {
        let atoms = (0..parent.coordinates()).map(|c| AlgebraElement::coordinate_projection(parent, c)).collect();
        Self::from_atoms_unchecked(parent, atoms)
    }

    /// The diagonal subalgebra with one atom per part of a partition of the
    /// global coordinates.
    pub fn from_partition(parent: &MultiMatrixAlgebra, parts: &[Vec<usize>]) -> Result<Self> {
        let n = parent.coordinates();
        let mut seen = vec![false; n];
        let mut atoms = Vec::with_capacity(parts.len());
        for part in parts {
            if part.is_empty() {
                return Err(Error::InvalidSubalgebra("empty part".into()));
            }
            let mut mask = vec![false; n];
            for &c in part {
                if c >= n || seen[c] {
                    return Err(Error::InvalidSubalgebra(format!("coordinate {c} repeated or out of range")));
                }
                seen[c] = true;
                mask[c] = true;
            }
            atoms.push(AlgebraElement::diagonal_projection(parent, &mask)?);
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSubalgebra("partition does not cover every coordinate".into()));
        }
        Ok(Self::from_atoms_unchecked(parent, atoms))
    }

    pub fn parent(&self) -> &MultiMatrixAlgebra {
        &self.parent
    }

    pub fn atoms(&self) -> &[AlgebraElement] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &AlgebraElement {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Whether every atom is diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.atoms.iter().all(AlgebraElement::is_diagonal)
    }

    /// Indices of the atoms summing to `p`, if `p` lies in the subalgebra as
    /// a projection.
    pub fn decompose(&self, p: &AlgebraElement) -> Result<Option<Vec<usize>>> {
        if p.parent() != &self.parent {
            return Err(Error::ParentMismatch(format!("{} vs {}", p.parent(), self.parent)));
        }
        let mut chosen = Vec::new();
        let mut sum = AlgebraElement::zero(&self.parent);
        for (i, q) in self.atoms.iter().enumerate() {
            let qp = q.mul(p)?;
            if qp == *q {
                chosen.push(i);
                sum = sum.add(q)?;
            } else if !qp.is_zero() {
                return Ok(None);
            }
        }
        Ok((sum == *p).then_some(chosen))
    }

    pub fn contains(&self, p: &AlgebraElement) -> Result<bool> {
        Ok(self.decompose(p)?.is_some())
    }

    pub fn spectrum(&self) -> FiniteSpace {
        FiniteSpace::new(self.atoms.len())
    }

    /// Generators for serialization: the atoms themselves.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.atoms.iter().map(AlgebraElement::to_json).collect())
    }

    /// Reads a list of commuting projections and spans them.
    pub fn from_json(parent: &MultiMatrixAlgebra, v: &serde_json::Value) -> Result<Self> {
        let list = v.as_array().ok_or_else(|| Error::Parse("a subalgebra is a list of generators".into()))?;
        let gens = list.iter().map(|g| AlgebraElement::from_json(parent, g)).collect::<Result<Vec<_>>>()?;
        span_subalgebra(parent, &gens)
    }
}

impl fmt::Display for CommSubalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.atoms.iter().map(|a| format!("[{a}]")).collect();
        write!(f, "span{{{}}}", atoms.join(", "))
    }
}

/// Per-block ranks of a projection, read off the trace.
pub fn projection_ranks(p: &AlgebraElement) -> Vec<usize> {
    p.parts()
        .iter()
        .map(|m| {
            m.trace()
                .as_integer()
                .and_then(|t| t.to_usize())
                .unwrap_or_else(|| m.rank())
        })
        .collect()
}

/// The subalgebra generated by commuting projections: its atoms are the
/// nonzero products `Π gᵢ^{εᵢ}` over sign patterns.
pub fn span_subalgebra(parent: &MultiMatrixAlgebra, gens: &[AlgebraElement]) -> Result<CommSubalgebra> {
    for (i, g) in gens.iter().enumerate() {
        if g.parent() != parent {
            return Err(Error::ParentMismatch(format!("generator {i} lives in {}", g.parent())));
        }
        if !g.is_projection() {
            return Err(Error::NotProjection { index: i });
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if gens[i].mul(&gens[j])? != gens[j].mul(&gens[i])? {
                return Err(Error::NonCommuting(i, j));
            }
        }
    }
    let mut atoms = vec![AlgebraElement::identity(parent)];
    for g in gens {
        let co = g.complement();
        let mut next = Vec::with_capacity(atoms.len() * 2);
        for a in &atoms {
            for piece in [a.mul(g)?, a.mul(&co)?] {
                if !piece.is_zero() {
                    next.push(piece);
                }
            }
        }
        atoms = next;
    }
    Ok(CommSubalgebra::from_atoms_unchecked(parent, atoms))
}

/// A finite discrete space with points `0..size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    size: usize,
}

impl FiniteSpace {
    pub fn new(size: usize) -> Self {
        FiniteSpace { size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}

/// A function between finite spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceMap {
    source: FiniteSpace,
    target: FiniteSpace,
    assignment: Arc<[usize]>,
}

impl SpaceMap {
    pub fn new(source: FiniteSpace, target: FiniteSpace, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} points",
                assignment.len(),
                source.size()
            )));
        }
        if let Some(&p) = assignment.iter().find(|&&p| p >= target.size()) {
            return Err(Error::DimensionMismatch(format!("image point {p} outside a {}-point space", target.size())));
        }
        Ok(SpaceMap { source, target, assignment: assignment.into() })
    }

    pub fn identity(x: FiniteSpace) -> Self {
        SpaceMap { source: x, target: x, assignment: x.points().collect() }
    }

    pub fn source(&self) -> FiniteSpace {
        self.source
    }

    pub fn target(&self) -> FiniteSpace {
        self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn preimage(&self, p: usize) -> Vec<usize> {
        self.source.points().filter(|&x| self.assignment[x] == p).collect()
    }

    /// `next ∘ self`.
    pub fn compose(&self, next: &SpaceMap) -> Result<SpaceMap> {
        if self.target != next.source {
            return Err(Error::DimensionMismatch("space maps do not compose".into()));
        }
        Ok(SpaceMap {
            source: self.source,
            target: next.target,
            assignment: self.assignment.iter().map(|&x| next.assignment[x]).collect(),
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &p in self.assignment.iter() {
            hit[p] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.size() == self.target.size() && self.is_surjective()
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Option<SpaceMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.source.size()];
        for (x, &p) in self.assignment.iter().enumerate() {
            inv[p] = x;
        }
        Some(SpaceMap { source: self.target, target: self.source, assignment: inv.into() })
    }
}

impl Arrow for SpaceMap {
    type Object = FiniteSpace;

    fn identity(obj: &FiniteSpace) -> Self {
        SpaceMap::identity(*obj)
    }

    fn then(&self, next: &Self) -> Result<Self> {
        self.compose(next)
    }

    fn agrees(&self, other: &Self) -> bool {
        self == other
    }

    fn fits(&self, source: &FiniteSpace, target: &FiniteSpace) -> bool {
        self.source == *source && self.target == *target
    }
}

/// `Σ(i): Σ(V) → Σ(U)` for an inclusion `U ⊆ V`: the point of an atom `Q` of
/// `V` goes to the atom `P` of `U` with `Q·P = Q`.
pub fn spectrum_of_inclusion(u: &CommSubalgebra, v: &CommSubalgebra) -> Result<SpaceMap> {
    if u.parent != v.parent {
        return Err(Error::ParentMismatch(format!("{} vs {}", u.parent, v.parent)));
    }
    let mut assignment = vec![usize::MAX; v.len()];
    for (pi, p) in u.atoms.iter().enumerate() {
        let parts = v.decompose(p)?.ok_or(Error::NotContained { atom: pi })?;
        for q in parts {
            assignment[q] = pi;
        }
    }
    debug_assert!(assignment.iter().all(|&p| p != usize::MAX));
    SpaceMap::new(v.spectrum(), u.spectrum(), assignment)
}

/// `α(U)` together with the bijection `Σ(αU) → Σ(U)` pairing `u·P·u*` with
/// `P`.
pub fn rotate_subalgebra(alpha: &InnerAutomorphism, u: &CommSubalgebra) -> Result<(CommSubalgebra, SpaceMap)> {
    if alpha.parent() != &u.parent {
        return Err(Error::ParentMismatch(format!("{} vs {}", alpha.parent(), u.parent)));
    }
    let images = u.atoms.iter().map(|p| alpha.apply(p)).collect::<Result<Vec<_>>>()?;
    let rotated = CommSubalgebra::from_atoms_unchecked(&u.parent, images.clone());
    let assignment = rotated
        .atoms
        .iter()
        .map(|q| images.iter().position(|x| x == q).expect("rotated atom comes from an atom"))
        .collect();
    let map = SpaceMap::new(rotated.spectrum(), u.spectrum(), assignment)?;
    Ok((rotated, map))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismKind {
    Inclusion,
    /// Rotation by the spec rotation with this index.
    Rotation(usize),
    /// Restriction of a *-homomorphism between different algebras.
    Restriction,
    Composite,
}

/// A morphism `U → V` of commutative subalgebras. It is determined by its
/// spectrum, stored contravariantly as `Σ(V) → Σ(U)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubalgebraMorphism {
    pub kind: MorphismKind,
    pub spectrum: SpaceMap,
}

impl SubalgebraMorphism {
    pub fn inclusion(u: &CommSubalgebra, v: &CommSubalgebra) -> Result<Self> {
        Ok(SubalgebraMorphism { kind: MorphismKind::Inclusion, spectrum: spectrum_of_inclusion(u, v)? })
    }
}

impl Arrow for SubalgebraMorphism {
    type Object = Arc<CommSubalgebra>;

    fn identity(obj: &Self::Object) -> Self {
        SubalgebraMorphism { kind: MorphismKind::Inclusion, spectrum: SpaceMap::identity(obj.spectrum()) }
    }

    fn then(&self, next: &Self) -> Result<Self> {
        let kind = if self.kind == next.kind { self.kind } else { MorphismKind::Composite };
        Ok(SubalgebraMorphism { kind, spectrum: next.spectrum.compose(&self.spectrum)? })
    }

    fn agrees(&self, other: &Self) -> bool {
        self.spectrum == other.spectrum
    }

    fn fits(&self, source: &Self::Object, target: &Self::Object) -> bool {
        self.spectrum.source().size() == target.len() && self.spectrum.target().size() == source.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ExactMatrix;

    fn alg(blocks: &[usize]) -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::new(blocks.to_vec()).unwrap()
    }

    fn proj(a: &MultiMatrixAlgebra, mask: &[bool]) -> AlgebraElement {
        AlgebraElement::diagonal_projection(a, mask).unwrap()
    }

    #[test]
    fn span_examples() {
        let m2 = alg(&[2]);
        assert_eq!(span_subalgebra(&m2, &[]).unwrap(), CommSubalgebra::scalars(&m2));
        let s = span_subalgebra(&m2, &[proj(&m2, &[true, false])]).unwrap();
        assert_eq!(s, CommSubalgebra::diagonal(&m2));

        let m3 = alg(&[3]);
        let s = span_subalgebra(&m3, &[proj(&m3, &[true, true, false]), proj(&m3, &[true, false, false])]).unwrap();
        assert_eq!(s, CommSubalgebra::diagonal(&m3));
    }

    #[test]
    fn span_rejects_bad_generators() {
        let m2 = alg(&[2]);
        let not_proj = AlgebraElement::new(&m2, vec![ExactMatrix::from_ints(&[&[1, 1], &[0, 1]])]).unwrap();
        assert!(matches!(span_subalgebra(&m2, &[not_proj]), Err(Error::NotProjection { index: 0 })));
        let rot = InnerAutomorphism::pythagorean(&m2, 0).unwrap();
        let p = proj(&m2, &[true, false]);
        let q = rot.apply(&p).unwrap();
        assert!(matches!(span_subalgebra(&m2, &[p, q]), Err(Error::NonCommuting(0, 1))));
    }

    #[test]
    fn spectrum_examples() {
        let m2 = alg(&[2]);
        assert_eq!(CommSubalgebra::scalars(&m2).spectrum().size(), 1);
        assert_eq!(CommSubalgebra::diagonal(&alg(&[3])).spectrum().size(), 3);
        let a = alg(&[2, 3]);
        let e = proj(&a, &[true, false, false, false, false]);
        assert_eq!(span_subalgebra(&a, &[e]).unwrap().spectrum().size(), 2);
    }

    #[test]
    fn inclusion_examples() {
        let m2 = alg(&[2]);
        let q = spectrum_of_inclusion(&CommSubalgebra::scalars(&m2), &CommSubalgebra::diagonal(&m2)).unwrap();
        assert_eq!(q.assignment(), &[0, 0]);
        let d = CommSubalgebra::diagonal(&m2);
        assert_eq!(spectrum_of_inclusion(&d, &d).unwrap(), SpaceMap::identity(d.spectrum()));

        let m3 = alg(&[3]);
        let p = proj(&m3, &[true, true, false]);
        let u = span_subalgebra(&m3, std::slice::from_ref(&p)).unwrap();
        let v = CommSubalgebra::diagonal(&m3);
        let q = spectrum_of_inclusion(&u, &v).unwrap();
        let p_index = u.atoms().iter().position(|x| *x == p).unwrap();
        for (c, atom) in v.atoms().iter().enumerate() {
            let expected = if atom.mul(&p).unwrap() == *atom { p_index } else { 1 - p_index };
            assert_eq!(q.apply(c), expected);
        }
        assert!(q.is_surjective());
        assert!(matches!(spectrum_of_inclusion(&v, &u), Err(Error::NotContained { .. })));
    }

    #[test]
    fn rotation_examples() {
        let m2 = alg(&[2]);
        let d = CommSubalgebra::diagonal(&m2);
        let (same, map) = rotate_subalgebra(&InnerAutomorphism::identity(&m2), &d).unwrap();
        assert_eq!(same, d);
        assert_eq!(map, SpaceMap::identity(d.spectrum()));

        let swap = InnerAutomorphism::transposition(&m2, 0, 0, 1).unwrap();
        let (same, map) = rotate_subalgebra(&swap, &d).unwrap();
        assert_eq!(same, d);
        assert_eq!(map.assignment(), &[1, 0]);

        let rot = InnerAutomorphism::pythagorean(&m2, 0).unwrap();
        let (r, map) = rotate_subalgebra(&rot, &d).unwrap();
        assert_ne!(r, d);
        assert!(map.is_bijective());
        assert!(CommSubalgebra::from_atoms(&m2, r.atoms().to_vec()).is_ok());
        assert!(r.atoms().iter().all(|a| a.rank_vector() == vec![1]));
    }

    #[test]
    fn from_atoms_validation() {
        let m2 = alg(&[2]);
        let p = proj(&m2, &[true, false]);
        assert!(CommSubalgebra::from_atoms(&m2, vec![p.clone()]).is_err());
        assert!(CommSubalgebra::from_atoms(&m2, vec![p.clone(), p.clone()]).is_err());
        assert!(CommSubalgebra::from_atoms(&m2, vec![p.clone(), p.complement()]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let a = alg(&[1, 2]);
        let s = CommSubalgebra::from_partition(&a, &[vec![0, 1], vec![2]]).unwrap();
        assert_eq!(CommSubalgebra::from_json(&a, &s.to_json()).unwrap(), s);
    }
}
