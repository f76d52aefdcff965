//! Colimits of covariant diagrams of abelian groups, presented as the direct
//! sum of the node groups modulo the identifications `(g)_a ~ (F(u) g)_b`
//! for every generating edge `u: a → b`.

use std::sync::Arc;

use super::group::PresentedAbGroup;
use super::hom::AbHom;
use super::word::Word;
use crate::diagram::{naturality_witness, DiagramMorphism, ShapedDiagram, Variance};
use crate::error::{Error, Result};
use crate::par;

pub type AbDiagram = ShapedDiagram<AbHom>;
pub type AbMorphism = DiagramMorphism<AbHom>;

#[derive(Clone, Debug)]
pub struct Colimit {
    pub group: Arc<PresentedAbGroup>,
    /// `κ_a`, one per node.
    pub injections: Vec<AbHom>,
    /// First generator of each node's summand.
    pub offsets: Vec<usize>,
}

impl Colimit {
    /// The class of `(w)_a`.
    pub fn inject(&self, node: usize, w: &Word) -> Word {
        w.shift(self.offsets[node])
    }
}

pub fn colimit(d: &AbDiagram) -> Result<Colimit> {
    if d.variance() != Variance::Covariant {
        return Err(Error::ShapeMismatch("colimits are taken over covariant diagrams".into()));
    }
    let mut offsets = Vec::with_capacity(d.nodes().len());
    let mut total = 0;
    for g in d.nodes() {
        offsets.push(total);
        total += g.ngens();
    }
    let mut relations: Vec<Word> = Vec::new();
    for (a, g) in d.nodes().iter().enumerate() {
        relations.extend(g.relations().iter().map(|r| r.shift(offsets[a])));
    }
    let edges: Vec<(usize, usize, usize)> =
        d.shape().edges().iter().enumerate().map(|(i, e)| (i, e.source, e.target)).collect();
    let per_edge = par::map(&edges, |&(i, a, b)| {
        let f = d.edge(i);
        f.images()
            .iter()
            .enumerate()
            .map(|(g, img)| Word::generator(g + offsets[a]).sub(&img.shift(offsets[b])))
            .collect::<Vec<_>>()
    });
    relations.extend(per_edge.into_iter().flatten());
    let group = Arc::new(PresentedAbGroup::new_unchecked(total, relations));
    let injections = d
        .nodes()
        .iter()
        .enumerate()
        .map(|(a, g)| {
            let images = (0..g.ngens()).map(|k| Word::generator(k + offsets[a])).collect();
            AbHom::new_unchecked(Arc::clone(g), Arc::clone(&group), images)
        })
        .collect::<Result<_>>()?;
    Ok(Colimit { group, injections, offsets })
}

/// `colim (f, η)`: sends `[(g)_a]` to `[(η_a g)_{f(a)}]`.
pub fn colimit_induced(
    m: &AbMorphism,
    over: &AbDiagram,
    source: &Colimit,
    onto: &AbDiagram,
    target: &Colimit,
) -> Result<AbHom> {
    if over.variance() != Variance::Covariant {
        return Err(Error::ShapeMismatch("colimits are taken over covariant diagrams".into()));
    }
    if let Some(edge) = naturality_witness(m, over, onto)? {
        return Err(Error::Naturality { edge });
    }
    let mut images = Vec::with_capacity(source.group.ngens());
    for (a, eta) in m.components.iter().enumerate() {
        let fa = m.node_map[a];
        images.extend(eta.images().iter().map(|w| target.inject(fa, w)));
    }
    AbHom::new(Arc::clone(&source.group), Arc::clone(&target.group), images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Shape;

    fn z() -> Arc<PresentedAbGroup> {
        Arc::new(PresentedAbGroup::free(1))
    }

    fn times(g: &Arc<PresentedAbGroup>, h: &Arc<PresentedAbGroup>, k: i64) -> AbHom {
        AbHom::new(Arc::clone(g), Arc::clone(h), vec![Word::from_i64(&[k])]).unwrap()
    }

    #[test]
    fn colimit_examples() {
        let g = z();
        let single = AbDiagram::new(Shape::point(), vec![Arc::clone(&g)], vec![], Variance::Covariant).unwrap();
        assert_eq!(colimit(&single).unwrap().group.canonical_string(), "Z");

        let (a, b) = (z(), z());
        let line = AbDiagram::new(
            Shape::from_pairs(2, &[(0, 1)]).unwrap(),
            vec![Arc::clone(&a), Arc::clone(&b)],
            vec![times(&a, &b, 2)],
            Variance::Covariant,
        )
        .unwrap();
        assert_eq!(colimit(&line).unwrap().group.canonical_string(), "Z");

        let (a, b, c) = (z(), z(), z());
        let span = AbDiagram::new(
            Shape::from_pairs(3, &[(0, 1), (0, 2)]).unwrap(),
            vec![Arc::clone(&a), Arc::clone(&b), Arc::clone(&c)],
            vec![times(&a, &b, 2), times(&a, &c, 2)],
            Variance::Covariant,
        )
        .unwrap();
        assert_eq!(colimit(&span).unwrap().group.canonical_string(), "Z ⊕ Z/2");
    }

    #[test]
    fn induced_examples() {
        let (a, b) = (z(), z());
        let discrete = AbDiagram::new(
            Shape::from_pairs(2, &[]).unwrap(),
            vec![Arc::clone(&a), Arc::clone(&b)],
            vec![],
            Variance::Covariant,
        )
        .unwrap();
        let c1 = colimit(&discrete).unwrap();
        let id = colimit_induced(&DiagramMorphism::identity(&discrete), &discrete, &c1, &discrete, &c1).unwrap();
        assert!(id.equals(&AbHom::identity(&c1.group)));

        let p = z();
        let point = AbDiagram::new(Shape::point(), vec![Arc::clone(&p)], vec![], Variance::Covariant).unwrap();
        let c2 = colimit(&point).unwrap();
        let collapse = DiagramMorphism {
            node_map: vec![0, 0],
            edge_map: vec![],
            components: vec![times(&a, &p, 1), times(&b, &p, 1)],
        };
        let fold = colimit_induced(&collapse, &discrete, &c1, &point, &c2).unwrap();
        assert_eq!(fold.images(), &[Word::from_i64(&[1]), Word::from_i64(&[1])]);
    }

    #[test]
    fn induced_rejects_unnatural() {
        let (a, b) = (z(), z());
        let line = |k| {
            AbDiagram::new(
                Shape::from_pairs(2, &[(0, 1)]).unwrap(),
                vec![Arc::clone(&a), Arc::clone(&b)],
                vec![times(&a, &b, k)],
                Variance::Covariant,
            )
            .unwrap()
        };
        let (d2, d3) = (line(2), line(3));
        let (c2, c3) = (colimit(&d2).unwrap(), colimit(&d3).unwrap());
        let m = DiagramMorphism::identity(&d2);
        assert!(matches!(colimit_induced(&m, &d2, &c2, &d3, &c3), Err(Error::Naturality { edge: 0 })));
    }
}
