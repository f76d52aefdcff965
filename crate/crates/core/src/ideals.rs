//! Total and partial ideals, rotation-fixedness, and the limit of closed-set
//! lattices over a subdiagram.
//!
//! An ideal of a commutative subalgebra is the span of a set of its atoms.
//! A closed set `C ⊆ Σ(U)` corresponds to the ideal spanned by the atoms not
//! in `C`, so the closed-set order is the reverse of the ideal order.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::MultiMatrixAlgebra;
use crate::diagram::DiagramFunctor;
use crate::error::{Error, Result};
use crate::ktheory::{build_subdiagram, Subdiagram, SubdiagramSpec};
use crate::lattice::{compatible_families, limit_semilattice, Constraint, LatticeMap, LimitLattice, MeetSemilattice};
use crate::subalgebra::{CommSubalgebra, FiniteSpace, MorphismKind, SpaceMap};

/// The two-sided ideal `⊕_{i ∈ blocks} M_{nᵢ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TotalIdeal {
    parent: MultiMatrixAlgebra,
    blocks: Vec<usize>,
}

impl TotalIdeal {
    pub fn new(parent: &MultiMatrixAlgebra, blocks: impl IntoIterator<Item = usize>) -> Result<Self> {
        let blocks: BTreeSet<usize> = blocks.into_iter().collect();
        if let Some(&b) = blocks.iter().find(|&&b| b >= parent.num_blocks()) {
            return Err(Error::DimensionMismatch(format!("block {b} of an algebra with {} blocks", parent.num_blocks())));
        }
        Ok(TotalIdeal { parent: parent.clone(), blocks: blocks.into_iter().collect() })
    }

    pub fn zero(parent: &MultiMatrixAlgebra) -> Self {
        TotalIdeal { parent: parent.clone(), blocks: vec![] }
    }

    pub fn whole(parent: &MultiMatrixAlgebra) -> Self {
        TotalIdeal { parent: parent.clone(), blocks: (0..parent.num_blocks()).collect() }
    }

    /// All `2^k` total ideals, ordered by the bitmask of their blocks.
    pub fn all(parent: &MultiMatrixAlgebra) -> Vec<Self> {
        let k = parent.num_blocks();
        (0..1usize << k)
            .map(|mask| TotalIdeal { parent: parent.clone(), blocks: (0..k).filter(|b| mask >> b & 1 == 1).collect() })
            .collect()
    }

    pub fn parent(&self) -> &MultiMatrixAlgebra {
        &self.parent
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn contains_block(&self, b: usize) -> bool {
        self.blocks.binary_search(&b).is_ok()
    }

    pub fn is_subset(&self, other: &TotalIdeal) -> bool {
        self.blocks.iter().all(|&b| other.contains_block(b))
    }
}

impl fmt::Display for TotalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `I ∩ U`: the atoms of `U` whose support lies inside `I`.
pub fn restrict_total(i: &TotalIdeal, u: &CommSubalgebra) -> Result<Vec<usize>> {
    if u.parent() != i.parent() {
        return Err(Error::ParentMismatch(format!("{} vs {}", u.parent(), i.parent())));
    }
    Ok(u.atoms()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.support().iter().all(|&b| i.contains_block(b)))
        .map(|(k, _)| k)
        .collect())
}

/// The choice at a source node forced by the choice at the target of an
/// edge whose spectrum is `q: Σ(target) → Σ(source)`.
fn pulled_back(q: &SpaceMap, chosen: &dyn Fn(usize) -> bool) -> Vec<usize> {
    q.target().points().filter(|&p| q.preimage(p).into_iter().all(chosen)).collect()
}

/// An edge on which a partial ideal breaks its defining condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeViolation {
    pub edge: usize,
    pub source: usize,
    pub target: usize,
    pub expected: Vec<usize>,
    pub found: Vec<usize>,
}

/// A choice of ideal, as a set of atoms, at every node of a subdiagram.
#[derive(Clone, Debug)]
pub struct PartialIdeal {
    subdiagram: Arc<Subdiagram>,
    choice: Vec<Vec<usize>>,
}

impl PartialIdeal {
    pub fn new(subdiagram: Arc<Subdiagram>, choice: Vec<Vec<usize>>) -> Result<Self> {
        if choice.len() != subdiagram.num_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "{} choices for {} nodes",
                choice.len(),
                subdiagram.num_nodes()
            )));
        }
        let mut normal = Vec::with_capacity(choice.len());
        for (n, c) in choice.into_iter().enumerate() {
            let set: BTreeSet<usize> = c.into_iter().collect();
            if set.iter().any(|&a| a >= subdiagram.node(n).len()) {
                return Err(Error::DimensionMismatch(format!("node {n} has {} atoms", subdiagram.node(n).len())));
            }
            normal.push(set.into_iter().collect());
        }
        Ok(PartialIdeal { subdiagram, choice: normal })
    }

    pub fn empty(subdiagram: Arc<Subdiagram>) -> Self {
        let choice = vec![vec![]; subdiagram.num_nodes()];
        PartialIdeal { subdiagram, choice }
    }

    /// `I_U = I ∩ U` at every node.
    pub fn from_total(subdiagram: Arc<Subdiagram>, i: &TotalIdeal) -> Result<Self> {
        let choice = (0..subdiagram.num_nodes())
            .map(|n| restrict_total(i, subdiagram.node(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PartialIdeal { subdiagram, choice })
    }

    /// Completes a partial choice by pulling back along inclusion edges
    /// into chosen nodes until nothing changes; remaining nodes get the
    /// zero ideal.
    pub fn derived(subdiagram: Arc<Subdiagram>, given: Vec<Option<Vec<usize>>>) -> Result<Self> {
        if given.len() != subdiagram.num_nodes() {
            return Err(Error::DimensionMismatch(format!("{} choices for {} nodes", given.len(), subdiagram.num_nodes())));
        }
        let mut given = given;
        let d = subdiagram.diagram();
        loop {
            let mut changed = false;
            for (i, e) in d.shape().edges().iter().enumerate() {
                let arrow = d.edge(i);
                if matches!(arrow.kind, MorphismKind::Rotation(_)) || given[e.source].is_some() {
                    continue;
                }
                if let Some(t) = &given[e.target] {
                    let pulled = pulled_back(&arrow.spectrum, &|x| t.binary_search(&x).is_ok());
                    given[e.source] = Some(pulled);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let choice = given
            .into_iter()
            .map(|c| {
                let mut c = c.unwrap_or_default();
                c.sort_unstable();
                c
            })
            .collect();
        Self::new(subdiagram, choice)
    }

    pub fn subdiagram(&self) -> &Arc<Subdiagram> {
        &self.subdiagram
    }

    pub fn choice(&self) -> &[Vec<usize>] {
        &self.choice
    }

    pub fn chosen(&self, node: usize, atom: usize) -> bool {
        self.choice[node].binary_search(&atom).is_ok()
    }

    fn first_violation(&self, rotations: bool) -> Option<EdgeViolation> {
        let d = self.subdiagram.diagram();
        d.shape().edges().iter().enumerate().find_map(|(i, e)| {
            let arrow = d.edge(i);
            if matches!(arrow.kind, MorphismKind::Rotation(_)) != rotations {
                return None;
            }
            let expected = pulled_back(&arrow.spectrum, &|x| self.chosen(e.target, x));
            (expected != self.choice[e.source]).then(|| EdgeViolation {
                edge: i,
                source: e.source,
                target: e.target,
                expected,
                found: self.choice[e.source].clone(),
            })
        })
    }

    /// First inclusion edge `U ⊆ V` on which `I_U ≠ I_V ∩ U`.
    pub fn compatibility_violation(&self) -> Option<EdgeViolation> {
        self.first_violation(false)
    }

    pub fn is_compatible(&self) -> bool {
        self.compatibility_violation().is_none()
    }

    /// First rotation edge `U → αU` on which `I_{αU} ≠ α(I_U)`.
    pub fn rotation_violation(&self) -> Option<EdgeViolation> {
        self.first_violation(true)
    }

    pub fn is_rotation_fixed(&self) -> bool {
        self.rotation_violation().is_none()
    }

    /// The closed set of atoms outside the chosen ideal at each node.
    pub fn closed_sets(&self) -> Vec<usize> {
        self.choice
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let all = (1usize << self.subdiagram.node(n).len()) - 1;
                all & !c.iter().fold(0usize, |m, &a| m | 1 << a)
            })
            .collect()
    }
}

/// Outcome of reconstructing a total ideal from a partial one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reconstruction {
    Total(TotalIdeal),
    /// The candidate spanned by the chosen atoms restricts differently at
    /// `node`.
    Failure { candidate: TotalIdeal, node: usize },
}

impl Reconstruction {
    pub fn total(&self) -> Option<&TotalIdeal> {
        match self {
            Reconstruction::Total(i) => Some(i),
            Reconstruction::Failure { .. } => None,
        }
    }
}

pub fn reconstruct_total(p: &PartialIdeal) -> Reconstruction {
    let sub = &p.subdiagram;
    let mut blocks = BTreeSet::new();
    for (n, c) in p.choice.iter().enumerate() {
        for &a in c {
            blocks.extend(sub.node(n).atom(a).support());
        }
    }
    let candidate = TotalIdeal { parent: sub.algebra().clone(), blocks: blocks.into_iter().collect() };
    for n in 0..sub.num_nodes() {
        let r = restrict_total(&candidate, sub.node(n)).expect("same parent");
        if r != p.choice[n] {
            return Reconstruction::Failure { candidate, node: n };
        }
    }
    Reconstruction::Total(candidate)
}

/// `𝒯(X)`: every subset of a finite discrete space, as a bitmask.
pub fn closed_set_lattice(x: FiniteSpace) -> Result<MeetSemilattice> {
    MeetSemilattice::powerset(x.size())
}

fn image_mask(q: &SpaceMap, s: usize) -> usize {
    q.source().points().filter(|x| s >> x & 1 == 1).fold(0, |m, x| m | 1 << q.apply(x))
}

/// `𝒯(q)`: a closed set goes to its image.
pub fn closed_set_map(q: &SpaceMap) -> Result<LatticeMap> {
    let source = closed_set_lattice(q.source())?;
    let target = closed_set_lattice(q.target())?;
    LatticeMap::new(&source, &target, (0..source.size()).map(|s| image_mask(q, s)).collect())
}

/// The closed-set functor, covariant on spaces.
pub struct ClosedSets;

impl DiagramFunctor<SpaceMap> for ClosedSets {
    type Target = LatticeMap;

    fn contravariant(&self) -> bool {
        false
    }

    fn object(&self, obj: &FiniteSpace) -> Result<MeetSemilattice> {
        closed_set_lattice(*obj)
    }

    fn arrow(&self, arrow: &SpaceMap, _: &FiniteSpace, _: &FiniteSpace) -> Result<LatticeMap> {
        closed_set_map(arrow)
    }
}

/// The limit of `𝒯 ∘ Σ` over a subdiagram.
#[derive(Clone, Debug)]
pub struct TTilde {
    pub subdiagram: Arc<Subdiagram>,
    pub limit: LimitLattice,
}

pub fn t_tilde(a: &MultiMatrixAlgebra, spec: &SubdiagramSpec) -> Result<TTilde> {
    t_tilde_over(Arc::new(build_subdiagram(a, spec)?))
}

pub fn t_tilde_over(subdiagram: Arc<Subdiagram>) -> Result<TTilde> {
    let (spaces, _) = crate::diagram::postcompose(&crate::ktheory::Spectrum, subdiagram.diagram(), None)?;
    let (lattices, _) = crate::diagram::postcompose(&ClosedSets, &spaces, None)?;
    let limit = limit_semilattice(&lattices)?;
    Ok(TTilde { subdiagram, limit })
}

/// Every partial ideal that is compatible and rotation-fixed, enumerated
/// directly on atom sets.
pub fn fixed_partial_ideals(subdiagram: &Arc<Subdiagram>) -> Result<Vec<PartialIdeal>> {
    let sizes: Vec<usize> = (0..subdiagram.num_nodes())
        .map(|n| {
            let atoms = subdiagram.node(n).len();
            if atoms > crate::lattice::MAX_POWERSET_BITS {
                return Err(Error::InvalidLattice(format!("node {n} has {atoms} atoms")));
            }
            Ok(1usize << atoms)
        })
        .collect::<Result<_>>()?;
    let d = subdiagram.diagram();
    let tables: Vec<Vec<usize>> = (0..d.shape().num_edges())
        .map(|i| {
            let q = &d.edge(i).spectrum;
            (0..1usize << q.source().size())
                .map(|s| pulled_back(q, &|x| s >> x & 1 == 1).into_iter().fold(0, |m, p| m | 1 << p))
                .collect()
        })
        .collect();
    let constraints: Vec<Constraint<'_>> = d
        .shape()
        .edges()
        .iter()
        .zip(&tables)
        .map(|(e, t)| Constraint { a: e.source, b: e.target, map: t })
        .collect();
    Ok(compatible_families(&sizes, &constraints)
        .into_iter()
        .map(|f| {
            let choice = f.iter().map(|&m| (0..usize::BITS as usize).filter(|a| m >> a & 1 == 1).collect()).collect();
            PartialIdeal { subdiagram: Arc::clone(subdiagram), choice }
        })
        .collect())
}

/// Outcome of the two desk-scale checks on one algebra and spec.
#[derive(Clone, Debug, Serialize)]
pub struct IdealsReport {
    pub blocks: Vec<usize>,
    pub spec: SubdiagramSpec,
    pub nodes: usize,
    pub edges: usize,
    pub total_ideals: Vec<String>,
    pub t_tilde_size: usize,
    /// `I ↦ (closed sets outside I ∩ U)` is a bijection onto the limit
    /// that reverses order.
    pub lattice_isomorphic: bool,
    pub lattice_witness: Option<String>,
    pub fixed_partial_ideals: usize,
    pub round_trip_bijection: bool,
    pub round_trip_witness: Option<String>,
    /// Rotation-fixed compatible partial ideals that come from no total
    /// ideal, each given as its choice of atoms per node.
    pub excess: Vec<Vec<Vec<usize>>>,
}

impl IdealsReport {
    pub fn holds(&self) -> bool {
        self.lattice_isomorphic && self.round_trip_bijection
    }
}

pub fn verify_conjecture1(a: &MultiMatrixAlgebra, spec: &SubdiagramSpec) -> Result<IdealsReport> {
    let sub = Arc::new(build_subdiagram(a, spec)?);
    let tt = t_tilde_over(Arc::clone(&sub))?;
    let totals = TotalIdeal::all(a);
    let restricted = totals
        .iter()
        .map(|i| PartialIdeal::from_total(Arc::clone(&sub), i))
        .collect::<Result<Vec<_>>>()?;

    let families = &tt.limit.families;
    let nodes: Vec<MeetSemilattice> =
        (0..sub.num_nodes()).map(|n| closed_set_lattice(sub.node(n).spectrum())).collect::<Result<_>>()?;
    let mut lattice_witness = None;
    let mut hit = vec![false; families.len()];
    let mut images = Vec::with_capacity(totals.len());
    for (i, p) in totals.iter().zip(&restricted) {
        let fam = p.closed_sets();
        match families.binary_search(&fam) {
            Ok(k) if !hit[k] => {
                hit[k] = true;
                images.push(fam);
            }
            _ => {
                lattice_witness.get_or_insert_with(|| format!("total ideal {i} has no distinct compatible family"));
                images.push(fam);
            }
        }
    }
    if lattice_witness.is_none() {
        if let Some(k) = hit.iter().position(|&h| !h) {
            lattice_witness = Some(format!("limit family {k} comes from no total ideal: {:?}", families[k]));
        }
    }
    if lattice_witness.is_none() {
        'outer: for (x, i) in totals.iter().enumerate() {
            for (y, j) in totals.iter().enumerate() {
                if i.is_subset(j) != LimitLattice::family_leq(&nodes, &images[y], &images[x]) {
                    lattice_witness = Some(format!("order is not reversed between {i} and {j}"));
                    break 'outer;
                }
            }
        }
    }

    let fixed = fixed_partial_ideals(&sub)?;
    let mut round_trip_witness = None;
    let mut excess = Vec::new();
    for p in &fixed {
        match reconstruct_total(p) {
            Reconstruction::Total(_) => {}
            Reconstruction::Failure { candidate, node } => {
                round_trip_witness.get_or_insert_with(|| {
                    format!("a fixed partial ideal over-covers at node {node} (candidate {candidate})")
                });
                excess.push(p.choice.clone());
            }
        }
    }
    for (i, p) in totals.iter().zip(&restricted) {
        if round_trip_witness.is_some() {
            break;
        }
        if let Some(v) = p.compatibility_violation().or_else(|| p.rotation_violation()) {
            round_trip_witness = Some(format!("restriction of {i} breaks edge {}", v.edge));
        } else if reconstruct_total(p).total() != Some(i) {
            round_trip_witness = Some(format!("restriction of {i} does not reconstruct to {i}"));
        }
    }
    if round_trip_witness.is_none() && fixed.len() != totals.len() {
        round_trip_witness = Some(format!("{} fixed partial ideals for {} total ideals", fixed.len(), totals.len()));
    }

    Ok(IdealsReport {
        blocks: a.blocks().to_vec(),
        spec: spec.clone(),
        nodes: sub.num_nodes(),
        edges: sub.diagram().shape().num_edges(),
        total_ideals: totals.iter().map(ToString::to_string).collect(),
        t_tilde_size: families.len(),
        lattice_isomorphic: lattice_witness.is_none(),
        lattice_witness,
        fixed_partial_ideals: fixed.len(),
        round_trip_bijection: round_trip_witness.is_none(),
        round_trip_witness,
        excess,
    })
}
