//! K-theory of finite discrete spaces and its extension to finite-dimensional
//! C*-algebras as a colimit over a subdiagram of commutative subalgebras,
//! checked against the rank-vector description of `K₀`.

mod subdiagram;

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

pub use subdiagram::{build_subdiagram, Subdiagram, SubdiagramSpec, MAX_NODES};

use crate::abelian::{colimit, colimit_induced, kernel, AbDiagram, AbHom, Colimit, PresentedAbGroup, Word};
use crate::algebra::{stabilize, unitalize, AlgebraElement, MultiMatrixAlgebra, StarHom};
use crate::diagram::{postcompose, DiagramFunctor, DiagramMorphism, ShapedDiagram};
use crate::error::{Error, Result};
use crate::par;
use crate::subalgebra::{projection_ranks, CommSubalgebra, FiniteSpace, MorphismKind, SpaceMap, SubalgebraMorphism};

/// `K(X) = ℤ^{|X|}`, one generator per point.
pub fn k_of_space(x: FiniteSpace) -> Result<PresentedAbGroup> {
    if x.size() == 0 {
        return Err(Error::InvalidSubalgebra("the spectrum of a unital algebra is nonempty".into()));
    }
    Ok(PresentedAbGroup::free(x.size()))
}

/// Pullback `K(Y) → K(X)` along `q: X → Y`: `e_p ↦ Σ_{q(x) = p} e_x`.
pub fn k_of_map(q: &SpaceMap) -> AbHom {
    let images = q.target().points().map(|p| Word::from_terms(q.preimage(p).into_iter().map(|x| (x, BigInt::from(1))))).collect();
    AbHom::new(
        Arc::new(PresentedAbGroup::free(q.target().size())),
        Arc::new(PresentedAbGroup::free(q.source().size())),
        images,
    )
    .expect("free groups have no relations")
}

/// The Gel'fand spectrum as a contravariant functor on subalgebras.
pub struct Spectrum;

impl DiagramFunctor<SubalgebraMorphism> for Spectrum {
    type Target = SpaceMap;

    fn contravariant(&self) -> bool {
        true
    }

    fn object(&self, obj: &Arc<CommSubalgebra>) -> Result<FiniteSpace> {
        Ok(obj.spectrum())
    }

    fn arrow(&self, arrow: &SubalgebraMorphism, _: &Arc<CommSubalgebra>, _: &Arc<CommSubalgebra>) -> Result<SpaceMap> {
        Ok(arrow.spectrum.clone())
    }
}

/// Topological K of finite discrete spaces, contravariant.
pub struct KFunctor;

impl DiagramFunctor<SpaceMap> for KFunctor {
    type Target = AbHom;

    fn contravariant(&self) -> bool {
        true
    }

    fn object(&self, obj: &FiniteSpace) -> Result<Arc<PresentedAbGroup>> {
        Ok(Arc::new(k_of_space(*obj)?))
    }

    fn arrow(&self, arrow: &SpaceMap, _: &FiniteSpace, _: &FiniteSpace) -> Result<AbHom> {
        Ok(k_of_map(arrow))
    }
}

/// A group together with the class of a rank-one projection in each block,
/// so that a rank vector `r` has class `Σ rᵢ·block_classes[i]`.
#[derive(Clone, Debug)]
pub struct K0Group {
    pub group: Arc<PresentedAbGroup>,
    pub block_classes: Vec<Word>,
}

impl K0Group {
    pub fn class_of_ranks(&self, ranks: &[usize]) -> Result<Word> {
        if ranks.len() != self.block_classes.len() {
            return Err(Error::DimensionMismatch(format!(
                "rank vector of length {} for {} blocks",
                ranks.len(),
                self.block_classes.len()
            )));
        }
        Ok(ranks
            .iter()
            .zip(&self.block_classes)
            .fold(Word::zero(), |acc, (&r, c)| acc.add_scaled(c, &BigInt::from(r))))
    }

    pub fn canonical_string(&self) -> String {
        self.group.canonical_string()
    }
}

/// `K₀(A) = ℤ^k` on the rank-one block classes.
pub fn k0_standard(a: &MultiMatrixAlgebra) -> K0Group {
    let k = a.num_blocks();
    K0Group { group: Arc::new(PresentedAbGroup::free(k)), block_classes: (0..k).map(Word::generator).collect() }
}

/// `K₀(φ)`: the multiplicity matrix acting on rank vectors.
pub fn k0_standard_hom(phi: &StarHom) -> AbHom {
    let dom = Arc::new(PresentedAbGroup::free(phi.domain().num_blocks()));
    let cod = Arc::new(PresentedAbGroup::free(phi.codomain().num_blocks()));
    let images = (0..phi.domain().num_blocks())
        .map(|j| {
            Word::from_terms(phi.multiplicity().iter().enumerate().map(|(i, row)| (i, BigInt::from(row[j]))))
        })
        .collect();
    AbHom::new(dom, cod, images).expect("free domain")
}

/// `K̃_f` of an algebra over a subdiagram, with every stage of the pipeline.
#[derive(Clone, Debug)]
pub struct KTildeF {
    pub subdiagram: Subdiagram,
    pub spaces: ShapedDiagram<SpaceMap>,
    pub groups: AbDiagram,
    pub colimit: Colimit,
    pub k0: K0Group,
}

impl KTildeF {
    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        self.subdiagram.algebra()
    }

    pub fn group(&self) -> &Arc<PresentedAbGroup> {
        &self.colimit.group
    }

    /// The colimit generator `(U, P)` for atom `atom` of node `node`.
    pub fn generator(&self, node: usize, atom: usize) -> Word {
        Word::generator(self.colimit.offsets[node] + atom)
    }

    /// The `(node, atom)` pair behind a colimit generator.
    pub fn generator_source(&self, g: usize) -> (usize, usize) {
        let node = self.colimit.offsets.partition_point(|&o| o <= g) - 1;
        (node, g - self.colimit.offsets[node])
    }

    /// Class of a projection, read off a node in which it is a sum of atoms.
    pub fn class_of(&self, p: &AlgebraElement) -> Result<Word> {
        if !p.is_projection() {
            return Err(Error::NotProjection { index: 0 });
        }
        if p.is_zero() {
            return Ok(Word::zero());
        }
        let (node, atoms) = self.subdiagram.locate(p)?.ok_or(Error::NotInDiagram)?;
        Ok(atoms.into_iter().fold(Word::zero(), |acc, a| acc.add(&self.generator(node, a))))
    }
}

fn k_pipeline(subdiagram: Subdiagram) -> Result<KTildeF> {
    let (spaces, _) = postcompose(&Spectrum, subdiagram.diagram(), None)?;
    let (groups, _) = postcompose(&KFunctor, &spaces, None)?;
    let colimit = colimit(&groups)?;
    let a = subdiagram.algebra();
    let offsets = a.block_offsets();
    let d = subdiagram.diagonal_node();
    let partition = subdiagram.partition(d).expect("the diagonal node is diagonal");
    let block_classes = offsets
        .iter()
        .map(|&c| {
            let atom = partition.iter().position(|p| p == &vec![c]).expect("diagonal atoms are single coordinates");
            Word::generator(colimit.offsets[d] + atom)
        })
        .collect();
    let k0 = K0Group { group: Arc::clone(&colimit.group), block_classes };
    Ok(KTildeF { subdiagram, spaces, groups, colimit, k0 })
}

/// `colim K ∘ Σ` over the subdiagram of `a` given by `spec`.
pub fn k_tilde_f(a: &MultiMatrixAlgebra, spec: &SubdiagramSpec) -> Result<KTildeF> {
    k_pipeline(build_subdiagram(a, spec)?)
}

/// `η_A: K₀(A) → K̃_f(A ⊗ M_m)` together with its certified inverse.
#[derive(Clone, Debug)]
pub struct Eta {
    pub m: usize,
    pub source: K0Group,
    pub target: KTildeF,
    pub hom: AbHom,
    pub inverse: AbHom,
}

/// Builds `η` and its inverse `(U, P) ↦ ranks(P)`, and checks both
/// composites on every generator. A failure means the subdiagram does not
/// identify enough projections.
pub fn eta(a: &MultiMatrixAlgebra, spec: &SubdiagramSpec, m: usize) -> Result<Eta> {
    let (stab, _) = stabilize(a, m, None)?;
    let target = k_tilde_f(&stab, &spec.stabilized(m))?;
    eta_into(a, m, target)
}

fn eta_into(a: &MultiMatrixAlgebra, m: usize, target: KTildeF) -> Result<Eta> {
    let source = k0_standard(a);
    let hom = AbHom::new(Arc::clone(&source.group), Arc::clone(target.group()), target.k0.block_classes.clone())?;
    let mut images = Vec::with_capacity(target.group().ngens());
    for n in 0..target.subdiagram.num_nodes() {
        for p in target.subdiagram.node(n).atoms() {
            images.push(Word::from_terms(
                projection_ranks(p).into_iter().enumerate().map(|(i, r)| (i, BigInt::from(r))),
            ));
        }
    }
    let inverse = AbHom::new(Arc::clone(target.group()), Arc::clone(&source.group), images).map_err(|e| match e {
        Error::NotWellDefined { relation } => Error::InverseCheck {
            generator: relation,
            detail: "rank vectors do not respect a colimit relation".into(),
        },
        e => e,
    })?;
    let there_and_back = hom.compose(&inverse)?;
    if let Some(g) = there_and_back.first_disagreement(&AbHom::identity(&source.group)) {
        return Err(Error::InverseCheck { generator: g, detail: "inverse ∘ η is not the identity on K₀".into() });
    }
    let back_and_there = inverse.compose(&hom)?;
    let identity = AbHom::identity(target.group());
    let gens: Vec<usize> = (0..target.group().ngens()).collect();
    let failures = par::map(&gens, |&g| {
        !target.group().words_equal(&back_and_there.images()[g], &identity.images()[g]).unwrap_or(false)
    });
    if let Some(g) = failures.iter().position(|&f| f) {
        let (node, atom) = target.generator_source(g);
        return Err(Error::InverseCheck {
            generator: g,
            detail: format!("η ∘ inverse differs from the identity on atom {atom} of node {node}"),
        });
    }
    Ok(Eta { m, source, target, hom, inverse })
}

/// Outcome of comparing the two legs of the naturality square.
#[derive(Clone, Debug, Serialize)]
pub struct NaturalityReport {
    pub holds: bool,
    /// First generator of `K₀(A)` on which the legs differ.
    pub witness: Option<usize>,
    /// Both legs in the canonical coordinates of `K̃_f(B ⊗ M_m)`.
    pub left: Vec<Vec<String>>,
    pub right: Vec<Vec<String>>,
}

/// The `K̃_f` side of `φ ⊗ id`: `B`'s subdiagram is extended by the images
/// of `A`'s nodes and edges, and the induced map of colimits is returned
/// together with `η_A` and `η_B`.
pub fn induced_on_colimits(phi: &StarHom, spec: &SubdiagramSpec, m: usize) -> Result<(Eta, Eta, AbHom)> {
    let (a_stab, phi_stab) = stabilize(phi.domain(), m, Some(phi))?;
    let phi_stab = phi_stab.expect("hom given");
    let (b_stab, _) = stabilize(phi.codomain(), m, None)?;
    let spec_m = spec.stabilized(m);
    let sub_a = build_subdiagram(&a_stab, &spec_m)?;
    let sub_b = build_subdiagram(&b_stab, &spec_m)?;
    let (extended, morphism) = sub_b.extend_with_image(&phi_stab, &sub_a)?;

    let (spaces_a, _) = postcompose(&Spectrum, sub_a.diagram(), None)?;
    let (spaces_b, sm) = postcompose(&Spectrum, sub_a.diagram(), Some((&morphism, extended.diagram())))?;
    let (spaces_ext, _) = postcompose(&Spectrum, extended.diagram(), None)?;
    drop(spaces_b);
    let (groups_a, _) = postcompose(&KFunctor, &spaces_a, None)?;
    let (groups_b, km) = postcompose(&KFunctor, &spaces_a, Some((&sm.expect("morphism given"), &spaces_ext)))?;
    drop(groups_b);
    let k_a = k_pipeline(sub_a)?;
    let k_b = k_pipeline(extended)?;
    let induced = colimit_induced(&km.expect("morphism given"), &groups_a, &k_a.colimit, &k_b.groups, &k_b.colimit)?;
    let eta_a = eta_into(phi.domain(), m, k_a)?;
    let eta_b = eta_into(phi.codomain(), m, k_b)?;
    Ok((eta_a, eta_b, induced))
}

/// Checks `η_B ∘ K₀(φ) = K̃_f(φ ⊗ id) ∘ η_A` on every generator.
pub fn verify_naturality_square(phi: &StarHom, spec: &SubdiagramSpec, m: usize) -> Result<NaturalityReport> {
    if !phi.is_unital() {
        return Err(Error::InvalidHom("the naturality square is stated for unital homs".into()));
    }
    let (eta_a, eta_b, induced) = induced_on_colimits(phi, spec, m)?;
    let left = k0_standard_hom(phi).compose(&eta_b.hom)?;
    let right = eta_a.hom.compose(&induced)?;
    let witness = left.first_disagreement(&right);
    let group = eta_b.target.group();
    let coords = |h: &AbHom| -> Vec<Vec<String>> {
        h.images()
            .iter()
            .map(|w| group.coordinates(w).expect("image fits").iter().map(ToString::to_string).collect())
            .collect()
    };
    Ok(NaturalityReport { holds: witness.is_none(), witness, left: coords(&left), right: coords(&right) })
}

/// `K̃_f` of `A` viewed as an ideal: `ker K̃_f(π)` for `π: (A ⊗ M_m)⁺ → ℂ`.
#[derive(Clone, Debug)]
pub struct NonUnitalK {
    pub unitalization: KTildeF,
    pub pi: AbHom,
    pub kernel: K0Group,
    pub inclusion: AbHom,
}

pub fn k_tilde_f_nonunital(a: &MultiMatrixAlgebra, spec: &SubdiagramSpec, m: usize) -> Result<NonUnitalK> {
    let (stab, _) = stabilize(a, m, None)?;
    let (plus, pi) = unitalize(&stab)?;
    // Custom rotations live in A; extend them by 1 on the adjoined block.
    let mut spec_plus = spec.stabilized(m);
    for u in &mut spec_plus.rotations {
        u.push(crate::matrix::ExactMatrix::identity(1));
    }
    let k_plus = k_tilde_f(&plus, &spec_plus)?;
    let c = pi.codomain().clone();
    let k_c = k_tilde_f(&c, &SubdiagramSpec::default())?;

    let point = k_c.subdiagram.scalars_node();
    let last = plus.num_blocks() - 1;
    let mut components = Vec::with_capacity(k_plus.subdiagram.num_nodes());
    for n in 0..k_plus.subdiagram.num_nodes() {
        let u = k_plus.subdiagram.node(n);
        let hit = u
            .atoms()
            .iter()
            .position(|p| !p.part(last).is_zero())
            .expect("atoms partition the unit");
        components.push(SubalgebraMorphism {
            kind: MorphismKind::Restriction,
            spectrum: SpaceMap::new(FiniteSpace::new(1), u.spectrum(), vec![hit])?,
        });
    }
    let morphism = DiagramMorphism {
        node_map: vec![point; k_plus.subdiagram.num_nodes()],
        edge_map: vec![vec![]; k_plus.subdiagram.diagram().shape().num_edges()],
        components,
    };
    let (_, sm) = postcompose(&Spectrum, k_plus.subdiagram.diagram(), Some((&morphism, k_c.subdiagram.diagram())))?;
    let (_, km) = postcompose(&KFunctor, &k_plus.spaces, Some((&sm.expect("morphism given"), &k_c.spaces)))?;
    let pi_k = colimit_induced(&km.expect("morphism given"), &k_plus.groups, &k_plus.colimit, &k_c.groups, &k_c.colimit)?;
    let (ker, inclusion) = kernel(&pi_k);
    let ker = Arc::new(ker);
    let inclusion = AbHom::new(Arc::clone(&ker), Arc::clone(k_plus.group()), inclusion.images().to_vec())?;
    let block_classes = k_plus.k0.block_classes[..a.num_blocks()]
        .iter()
        .map(|w| inclusion.preimage(w)?.ok_or(Error::NotInDiagram))
        .collect::<Result<Vec<_>>>()?;
    Ok(NonUnitalK { unitalization: k_plus, pi: pi_k, kernel: K0Group { group: ker, block_classes }, inclusion })
}

/// For a commutative algebra: whether the canonical injection from the
/// terminal node `A` itself into the colimit is an isomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct TerminalReport {
    pub terminal_node: usize,
    pub colimit: String,
    pub injection_is_isomorphism: bool,
}

pub fn terminal_injection(a: &MultiMatrixAlgebra, spec: &SubdiagramSpec) -> Result<TerminalReport> {
    if !a.is_commutative() {
        return Err(Error::InvalidAlgebra(format!("{a} is not commutative")));
    }
    let kt = k_tilde_f(a, spec)?;
    let whole = CommSubalgebra::diagonal(a);
    let node = kt.subdiagram.node_of(&whole).ok_or(Error::NotInDiagram)?;
    Ok(TerminalReport {
        terminal_node: node,
        colimit: kt.group().canonical_string(),
        injection_is_isomorphism: kt.colimit.injections[node].is_isomorphism(),
    })
}
