use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::group::PresentedAbGroup;
use super::snf::{snf, solve_left, IntMatrix};
use super::word::Word;
use crate::diagram::Arrow;
use crate::error::{Error, Result};

impl PartialEq for PresentedAbGroup {
    /// Equality of presentations, not isomorphism.
    fn eq(&self, other: &Self) -> bool {
        self.ngens() == other.ngens() && self.relations() == other.relations()
    }
}

impl Eq for PresentedAbGroup {}

/// A homomorphism of presented groups, given by the image word of every
/// domain generator.
#[derive(Clone, Debug)]
pub struct AbHom {
    domain: Arc<PresentedAbGroup>,
    codomain: Arc<PresentedAbGroup>,
    images: Vec<Word>,
}

impl AbHom {
    /// Certifies that every domain relation maps to zero.
    pub fn new(domain: Arc<PresentedAbGroup>, codomain: Arc<PresentedAbGroup>, images: Vec<Word>) -> Result<Self> {
        let h = Self::new_unchecked(domain, codomain, images)?;
        if let Some(r) = h.first_broken_relation() {
            return Err(Error::NotWellDefined { relation: r });
        }
        Ok(h)
    }

    /// Validates only the shape of the data.
    pub(crate) fn new_unchecked(
        domain: Arc<PresentedAbGroup>,
        codomain: Arc<PresentedAbGroup>,
        images: Vec<Word>,
    ) -> Result<Self> {
        if images.len() != domain.ngens() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} domain generators",
                images.len(),
                domain.ngens()
            )));
        }
        if images.iter().any(|w| w.max_generator().is_some_and(|g| g >= codomain.ngens())) {
            return Err(Error::DimensionMismatch(format!(
                "image word mentions a generator beyond {}",
                codomain.ngens()
            )));
        }
        Ok(AbHom { domain, codomain, images })
    }

    /// From a matrix whose row `g` is the image of domain generator `g`.
    pub fn from_matrix(domain: Arc<PresentedAbGroup>, codomain: Arc<PresentedAbGroup>, m: &IntMatrix) -> Result<Self> {
        if m.rows() != domain.ngens() || (m.rows() > 0 && m.cols() != codomain.ngens()) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} image matrix for {} -> {} generators",
                m.rows(),
                m.cols(),
                domain.ngens(),
                codomain.ngens()
            )));
        }
        let images = (0..m.rows()).map(|r| Word::from_dense(m.row(r))).collect();
        Self::new(domain, codomain, images)
    }

    pub fn identity(g: &Arc<PresentedAbGroup>) -> Self {
        AbHom { domain: Arc::clone(g), codomain: Arc::clone(g), images: (0..g.ngens()).map(Word::generator).collect() }
    }

    pub fn zero(domain: &Arc<PresentedAbGroup>, codomain: &Arc<PresentedAbGroup>) -> Self {
        AbHom { domain: Arc::clone(domain), codomain: Arc::clone(codomain), images: vec![Word::zero(); domain.ngens()] }
    }

    pub fn domain(&self) -> &Arc<PresentedAbGroup> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<PresentedAbGroup> {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows_with_cols(self.images.iter().map(|w| w.to_dense(self.codomain.ngens())).collect(), self.codomain.ngens())
            .expect("images fit the codomain")
    }

    pub fn first_broken_relation(&self) -> Option<usize> {
        self.domain.relations().iter().position(|r| !self.codomain.is_zero(&self.apply_unchecked(r)).unwrap_or(false))
    }

    fn apply_unchecked(&self, w: &Word) -> Word {
        w.terms().iter().fold(Word::zero(), |acc, (g, c)| acc.add_scaled(&self.images[*g], c))
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.max_generator().is_some_and(|g| g >= self.domain.ngens()) {
            return Err(Error::DimensionMismatch(format!("word mentions a generator beyond {}", self.domain.ngens())));
        }
        Ok(self.apply_unchecked(w))
    }

    /// `next ∘ self`.
    pub fn compose(&self, next: &AbHom) -> Result<AbHom> {
        if !same_group(&self.codomain, &next.domain) {
            return Err(Error::DimensionMismatch("homomorphisms do not compose".into()));
        }
        Ok(AbHom {
            domain: Arc::clone(&self.domain),
            codomain: Arc::clone(&next.codomain),
            images: self.images.iter().map(|w| next.apply_unchecked(w)).collect(),
        })
    }

    /// Equality as maps: same endpoints and equal images on every generator.
    pub fn equals(&self, other: &AbHom) -> bool {
        same_group(&self.domain, &other.domain)
            && same_group(&self.codomain, &other.codomain)
            && self.first_disagreement(other).is_none()
    }

    /// First domain generator on which the two maps differ.
    pub fn first_disagreement(&self, other: &AbHom) -> Option<usize> {
        (0..self.images.len()).find(|&g| !self.codomain.words_equal(&self.images[g], &other.images[g]).unwrap_or(false))
    }

    /// Some `x` with `h(x) = w`, if `w` lies in the image.
    pub fn preimage(&self, w: &Word) -> Result<Option<Word>> {
        let target = self.codomain.coordinates(w)?;
        let moduli = self.codomain.normalizer().moduli();
        let mut rows: Vec<Vec<BigInt>> = self
            .images
            .iter()
            .map(|c| self.codomain.coordinates(c))
            .collect::<Result<_>>()?;
        for (k, e) in moduli.iter().enumerate() {
            if !e.is_zero() {
                let mut r = vec![BigInt::zero(); moduli.len()];
                r[k] = e.clone();
                rows.push(r);
            }
        }
        let m = IntMatrix::from_rows_with_cols(rows, moduli.len())?;
        Ok(solve_left(&m, &target)?.map(|x| Word::from_dense(&x[..self.domain.ngens()])))
    }

    pub fn is_isomorphism(&self) -> bool {
        kernel(self).0.is_trivial() && cokernel(self).0.is_trivial()
    }
}

fn same_group(a: &Arc<PresentedAbGroup>, b: &Arc<PresentedAbGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Arrow for AbHom {
    type Object = Arc<PresentedAbGroup>;

    fn identity(obj: &Self::Object) -> Self {
        AbHom::identity(obj)
    }

    fn then(&self, next: &Self) -> Result<Self> {
        self.compose(next)
    }

    fn agrees(&self, other: &Self) -> bool {
        self.equals(other)
    }

    fn fits(&self, source: &Self::Object, target: &Self::Object) -> bool {
        same_group(&self.domain, source) && same_group(&self.codomain, target)
    }
}

/// `ker h` with its inclusion into the domain.
pub fn kernel(h: &AbHom) -> (PresentedAbGroup, AbHom) {
    let g = h.domain.normalizer();
    let gens = g.canonical_generators();
    let g_mod = g.moduli();
    let target = h.codomain.normalizer();
    let h_mod = target.moduli();
    let n = gens.len();

    // Rows: images of G's canonical generators in H's Smith coordinates,
    // then the torsion relations of H.
    let mut rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|c| h.codomain.coordinates(&h.apply_unchecked(c)).expect("image fits codomain"))
        .collect();
    for (k, e) in h_mod.iter().enumerate() {
        if !e.is_zero() {
            let mut r = vec![BigInt::zero(); h_mod.len()];
            r[k] = e.clone();
            rows.push(r);
        }
    }
    let stacked = IntMatrix::from_rows_with_cols(rows, h_mod.len()).expect("rows sized to codomain");
    let s = snf(&stacked);
    let rank = s.rank();
    let null: Vec<Vec<BigInt>> = (rank..stacked.rows()).map(|i| s.u.row(i)[..n].to_vec()).collect();

    // A basis of the projected null lattice L ⊆ ℤⁿ.
    let projected = IntMatrix::from_rows_with_cols(null, n).expect("rows sized to domain");
    let ps = snf(&projected);
    let basis: Vec<Vec<BigInt>> = ps
        .diagonal()
        .iter()
        .enumerate()
        .take_while(|(_, d)| !d.is_zero())
        .map(|(i, d)| ps.v_inv.row(i).iter().map(|x| x * d).collect())
        .collect();
    let r = basis.len();
    let basis_m = IntMatrix::from_rows_with_cols(basis.clone(), n).expect("basis rows");

    // G's own relations d_j·e_j lie in L; express them in the basis.
    let relations: Vec<Word> = g_mod
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(j, d)| {
            let mut t = vec![BigInt::zero(); n];
            t[j] = d.clone();
            let x = solve_left(&basis_m, &t).expect("sized").expect("relations of G lie in the kernel lattice");
            Word::from_dense(&x)
        })
        .collect();
    let ker = PresentedAbGroup::new_unchecked(r, relations);
    let images = basis
        .iter()
        .map(|b| b.iter().zip(&gens).fold(Word::zero(), |acc, (c, w)| acc.add_scaled(w, c)))
        .collect();
    let ker_arc = Arc::new(ker.clone());
    let inclusion = AbHom::new_unchecked(ker_arc, Arc::clone(&h.domain), images).expect("sized");
    (ker, inclusion)
}

/// `coker h` with the projection from the codomain.
pub fn cokernel(h: &AbHom) -> (PresentedAbGroup, AbHom) {
    let mut relations = h.codomain.relations().to_vec();
    relations.extend(h.images.iter().cloned());
    let c = PresentedAbGroup::new_unchecked(h.codomain.ngens(), relations);
    let proj = AbHom {
        domain: Arc::clone(&h.codomain),
        codomain: Arc::new(c.clone()),
        images: (0..h.codomain.ngens()).map(Word::generator).collect(),
    };
    (c, proj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(ngens: usize, rels: &[&[i64]]) -> Arc<PresentedAbGroup> {
        Arc::new(PresentedAbGroup::new(ngens, rels.iter().map(|r| Word::from_i64(r)).collect()).unwrap())
    }

    fn hom(d: &Arc<PresentedAbGroup>, c: &Arc<PresentedAbGroup>, rows: &[&[i64]]) -> Result<AbHom> {
        AbHom::new(Arc::clone(d), Arc::clone(c), rows.iter().map(|r| Word::from_i64(r)).collect())
    }

    #[test]
    fn well_definedness_is_certified() {
        let z2 = grp(1, &[&[2]]);
        let z = grp(1, &[]);
        assert!(hom(&z, &z2, &[&[1]]).is_ok());
        assert!(matches!(hom(&z2, &z, &[&[1]]), Err(Error::NotWellDefined { relation: 0 })));
        assert!(hom(&z2, &z, &[&[0]]).is_ok());
        let z4 = grp(1, &[&[4]]);
        assert!(hom(&z2, &z4, &[&[2]]).is_ok());
    }

    #[test]
    fn kernel_examples() {
        let z = grp(1, &[]);
        let (k, _) = kernel(&AbHom::identity(&z));
        assert!(k.is_trivial());

        let z2 = grp(2, &[]);
        let fold = hom(&z2, &z, &[&[1], &[1]]).unwrap();
        let (k, inc) = kernel(&fold);
        assert_eq!(k.canonical_string(), "Z");
        let w = &inc.images()[0];
        assert_eq!(w.coefficient(0), -w.coefficient(1));
        assert_eq!(w.coefficient(0).magnitude(), &num_bigint::BigUint::from(1u32));

        let mod2 = grp(1, &[&[2]]);
        let red = hom(&z, &mod2, &[&[1]]).unwrap();
        let (k, inc) = kernel(&red);
        assert_eq!(k.canonical_string(), "Z");
        assert_eq!(inc.images()[0].coefficient(0).magnitude(), &num_bigint::BigUint::from(2u32));
    }

    #[test]
    fn kernel_with_torsion_domain() {
        // ℤ/4 → ℤ/2, reduction: kernel is 2ℤ/4ℤ ≅ ℤ/2.
        let z4 = grp(1, &[&[4]]);
        let z2 = grp(1, &[&[2]]);
        let (k, inc) = kernel(&hom(&z4, &z2, &[&[1]]).unwrap());
        assert_eq!(k.canonical_string(), "Z/2");
        assert!(AbHom::new(Arc::new(k), z4, inc.images().to_vec()).is_ok());
    }

    #[test]
    fn cokernel_and_isomorphism() {
        let z = grp(1, &[]);
        let double = hom(&z, &z, &[&[2]]).unwrap();
        assert_eq!(cokernel(&double).0.canonical_string(), "Z/2");
        assert!(!double.is_isomorphism());
        let z2 = grp(2, &[]);
        let swap = hom(&z2, &z2, &[&[0, 1], &[1, 0]]).unwrap();
        assert!(swap.is_isomorphism());
        // ⟨a, b | a - b⟩ → ℤ, a, b ↦ 1 is an isomorphism.
        let q = grp(2, &[&[1, -1]]);
        assert!(hom(&q, &z, &[&[1], &[1]]).unwrap().is_isomorphism());
    }

    #[test]
    fn composition_and_equality() {
        let z = grp(1, &[]);
        let z2 = grp(1, &[&[2]]);
        let three = hom(&z, &z, &[&[3]]).unwrap();
        let red = hom(&z, &z2, &[&[1]]).unwrap();
        let comp = three.compose(&red).unwrap();
        assert!(comp.equals(&red));
        assert!(!three.equals(&AbHom::identity(&z)));
    }
}
