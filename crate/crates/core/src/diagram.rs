//! Finite shaped diagrams and the morphisms `(f, η)` between diagrams of
//! different shapes.
//!
//! A [`Shape`] is a finite generating graph. A [`ShapedDiagram`] assigns an
//! object to every node and an arrow to every edge; in a covariant diagram
//! the arrow of `u: a → b` goes from the object at `a` to the object at `b`,
//! in a contravariant one it goes the other way.
//!
//! A [`DiagramMorphism`] carries a shape map `f` (nodes to nodes, edges to
//! paths) from the shape it is indexed over to another shape, plus one
//! component per indexing node. For covariant diagrams the component at `a`
//! goes `D₁(a) → D₂(f(a))`; for contravariant diagrams it goes
//! `D₂(f(a)) → D₁(a)`. This is the only representation used for both
//! diagram categories.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::par;

pub type NodeId = usize;
pub type EdgeId = usize;

/// An arrow in one of the target categories.
pub trait Arrow: Clone + Send + Sync {
    type Object: Clone + Send + Sync;

    fn identity(obj: &Self::Object) -> Self;

    /// `next ∘ self`.
    fn then(&self, next: &Self) -> Result<Self>;

    /// Equality as arrows (not necessarily structural).
    fn agrees(&self, other: &Self) -> bool;

    fn fits(&self, source: &Self::Object, target: &Self::Object) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeEdge {
    pub id: String,
    pub source: NodeId,
    pub target: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Shape {
    nodes: Vec<String>,
    edges: Vec<ShapeEdge>,
}

impl Shape {
    pub fn new(nodes: Vec<String>, edges: Vec<ShapeEdge>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for n in &nodes {
            if !seen.insert(n) {
                return Err(Error::ShapeMismatch(format!("duplicate node id '{n}'")));
            }
        }
        for e in &edges {
            if e.source >= nodes.len() || e.target >= nodes.len() {
                return Err(Error::ShapeMismatch(format!("edge '{}' has a missing endpoint", e.id)));
            }
        }
        Ok(Shape { nodes, edges })
    }

    /// Nodes named `0..n`, edges named by position.
    pub fn from_pairs(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::new(
            (0..n).map(|i| i.to_string()).collect(),
            edges
                .iter()
                .enumerate()
                .map(|(i, &(source, target))| ShapeEdge { id: format!("e{i}"), source, target })
                .collect(),
        )
    }

    pub fn point() -> Self {
        Shape { nodes: vec!["0".into()], edges: vec![] }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, id: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n == id)
    }

    pub fn edges(&self) -> &[ShapeEdge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &ShapeEdge {
        &self.edges[e]
    }

    /// Checks that `path` is a chain of edges from `from` to `to`.
    pub fn check_path(&self, path: &[EdgeId], from: NodeId, to: NodeId) -> Result<()> {
        let mut at = from;
        for &e in path {
            let edge = self
                .edges
                .get(e)
                .ok_or_else(|| Error::ShapeMismatch(format!("no edge {e}")))?;
            if edge.source != at {
                return Err(Error::ShapeMismatch(format!("path breaks at edge '{}'", edge.id)));
            }
            at = edge.target;
        }
        if at != to {
            return Err(Error::ShapeMismatch(format!("path ends at node {at}, expected {to}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ShapedDiagram<A: Arrow> {
    shape: Arc<Shape>,
    nodes: Vec<A::Object>,
    edges: Vec<A>,
    variance: Variance,
}

impl<A: Arrow> ShapedDiagram<A> {
    pub fn new(shape: Shape, nodes: Vec<A::Object>, edges: Vec<A>, variance: Variance) -> Result<Self> {
        Self::with_shared_shape(Arc::new(shape), nodes, edges, variance)
    }

    pub fn with_shared_shape(
        shape: Arc<Shape>,
        nodes: Vec<A::Object>,
        edges: Vec<A>,
        variance: Variance,
    ) -> Result<Self> {
        if nodes.len() != shape.num_nodes() || edges.len() != shape.num_edges() {
            return Err(Error::ShapeMismatch(format!(
                "{} node objects / {} edge arrows for a shape with {} nodes / {} edges",
                nodes.len(),
                edges.len(),
                shape.num_nodes(),
                shape.num_edges()
            )));
        }
        let d = ShapedDiagram { shape, nodes, edges, variance };
        for (i, e) in d.shape.edges().iter().enumerate() {
            let (s, t) = d.arrow_endpoints(e);
            if !d.edges[i].fits(&d.nodes[s], &d.nodes[t]) {
                return Err(Error::ShapeMismatch(format!("arrow on edge '{}' has wrong endpoints", e.id)));
            }
        }
        Ok(d)
    }

    /// Skips endpoint validation; callers construct arrows from the node
    /// objects themselves.
    pub(crate) fn from_parts_unchecked(
        shape: Arc<Shape>,
        nodes: Vec<A::Object>,
        edges: Vec<A>,
        variance: Variance,
    ) -> Self {
        debug_assert_eq!(nodes.len(), shape.num_nodes());
        debug_assert_eq!(edges.len(), shape.num_edges());
        ShapedDiagram { shape, nodes, edges, variance }
    }

    fn arrow_endpoints(&self, e: &ShapeEdge) -> (NodeId, NodeId) {
        match self.variance {
            Variance::Covariant => (e.source, e.target),
            Variance::Contravariant => (e.target, e.source),
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn shared_shape(&self) -> Arc<Shape> {
        Arc::clone(&self.shape)
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn node(&self, n: NodeId) -> &A::Object {
        &self.nodes[n]
    }

    pub fn nodes(&self) -> &[A::Object] {
        &self.nodes
    }

    pub fn edge(&self, e: EdgeId) -> &A {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[A] {
        &self.edges
    }

    /// The arrow along a path of edges starting at `from`; identity for the
    /// empty path. Contravariant diagrams compose in reverse.
    pub fn path_arrow(&self, path: &[EdgeId], from: NodeId) -> Result<A> {
        let Some((&first, rest)) = path.split_first() else {
            return Ok(A::identity(&self.nodes[from]));
        };
        let mut acc = self.edges[first].clone();
        for &e in rest {
            acc = match self.variance {
                Variance::Covariant => acc.then(&self.edges[e])?,
                Variance::Contravariant => self.edges[e].then(&acc)?,
            };
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug)]
pub struct DiagramMorphism<A: Arrow> {
    pub node_map: Vec<NodeId>,
    pub edge_map: Vec<Vec<EdgeId>>,
    pub components: Vec<A>,
}

impl<A: Arrow> DiagramMorphism<A> {
    pub fn identity(d: &ShapedDiagram<A>) -> Self {
        DiagramMorphism {
            node_map: (0..d.shape.num_nodes()).collect(),
            edge_map: (0..d.shape.num_edges()).map(|e| vec![e]).collect(),
            components: d.nodes.iter().map(A::identity).collect(),
        }
    }

    /// Checks that the shape map is a graph morphism into `onto`'s shape.
    pub fn check_shape(&self, over: &Shape, onto: &Shape) -> Result<()> {
        if self.node_map.len() != over.num_nodes()
            || self.edge_map.len() != over.num_edges()
            || self.components.len() != over.num_nodes()
        {
            return Err(Error::ShapeMismatch("morphism does not cover the indexing shape".into()));
        }
        if let Some(&n) = self.node_map.iter().find(|&&n| n >= onto.num_nodes()) {
            return Err(Error::ShapeMismatch(format!("node map hits missing node {n}")));
        }
        for (e, path) in over.edges().iter().zip(&self.edge_map) {
            onto.check_path(path, self.node_map[e.source], self.node_map[e.target])?;
        }
        Ok(())
    }
}

/// The first generating edge on which naturality fails, if any.
pub fn naturality_witness<A: Arrow>(
    m: &DiagramMorphism<A>,
    over: &ShapedDiagram<A>,
    onto: &ShapedDiagram<A>,
) -> Result<Option<EdgeId>> {
    m.check_shape(&over.shape, &onto.shape)?;
    if over.variance != onto.variance {
        return Err(Error::ShapeMismatch("diagrams have different variance".into()));
    }
    let failures = par::map(&over.shape.edges().iter().enumerate().collect::<Vec<_>>(), |&(i, e)| {
        let image = onto.path_arrow(&m.edge_map[i], m.node_map[e.source])?;
        let ok = match over.variance {
            Variance::Covariant => {
                let left = over.edges[i].then(&m.components[e.target])?;
                let right = m.components[e.source].then(&image)?;
                left.agrees(&right)
            }
            Variance::Contravariant => {
                let left = image.then(&m.components[e.source])?;
                let right = m.components[e.target].then(&over.edges[i])?;
                left.agrees(&right)
            }
        };
        Ok::<_, Error>((!ok).then_some(i))
    });
    for f in failures {
        if let Some(i) = f? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

pub fn check_naturality<A: Arrow>(
    m: &DiagramMorphism<A>,
    over: &ShapedDiagram<A>,
    onto: &ShapedDiagram<A>,
) -> Result<bool> {
    Ok(naturality_witness(m, over, onto)?.is_none())
}

/// `(g, μ) ∘ (f, η) = (g f, (μ f) η)`.
pub fn compose_morphisms<A: Arrow>(
    first: &DiagramMorphism<A>,
    second: &DiagramMorphism<A>,
    variance: Variance,
) -> Result<DiagramMorphism<A>> {
    if let Some(&n) = first.node_map.iter().find(|&&n| n >= second.node_map.len()) {
        return Err(Error::ShapeMismatch(format!("morphisms do not chain at node {n}")));
    }
    for path in &first.edge_map {
        if let Some(&e) = path.iter().find(|&&e| e >= second.edge_map.len()) {
            return Err(Error::ShapeMismatch(format!("morphisms do not chain at edge {e}")));
        }
    }
    let node_map = first.node_map.iter().map(|&n| second.node_map[n]).collect();
    let edge_map = first
        .edge_map
        .iter()
        .map(|path| path.iter().flat_map(|&e| second.edge_map[e].iter().copied()).collect())
        .collect();
    let components = first
        .components
        .iter()
        .zip(&first.node_map)
        .map(|(eta, &fa)| {
            let mu = &second.components[fa];
            match variance {
                Variance::Covariant => eta.then(mu),
                Variance::Contravariant => mu.then(eta),
            }
        })
        .collect::<Result<_>>()?;
    Ok(DiagramMorphism { node_map, edge_map, components })
}

/// A functor between the target categories of two kinds of diagram.
pub trait DiagramFunctor<A: Arrow>: Sync {
    type Target: Arrow;

    fn contravariant(&self) -> bool;

    fn object(&self, obj: &A::Object) -> Result<<Self::Target as Arrow>::Object>;

    fn arrow(
        &self,
        arrow: &A,
        source: &A::Object,
        target: &A::Object,
    ) -> Result<Self::Target>;
}

/// `F ∘ D`, and `(f, Fη)` for a morphism indexed over `D`'s shape whose
/// target diagram is `onto`.
#[allow(clippy::type_complexity)]
pub fn postcompose<A: Arrow, F: DiagramFunctor<A>>(
    functor: &F,
    d: &ShapedDiagram<A>,
    m: Option<(&DiagramMorphism<A>, &ShapedDiagram<A>)>,
) -> Result<(ShapedDiagram<F::Target>, Option<DiagramMorphism<F::Target>>)> {
    let nodes = par::try_map(&d.nodes, |o| functor.object(o))?;
    let edge_list: Vec<(usize, &ShapeEdge)> = d.shape.edges().iter().enumerate().collect();
    let edges = par::try_map(&edge_list, |&(i, e)| {
        let (s, t) = d.arrow_endpoints(e);
        functor.arrow(&d.edges[i], &d.nodes[s], &d.nodes[t])
    })?;
    let variance = if functor.contravariant() { d.variance.flip() } else { d.variance };
    let image = ShapedDiagram::from_parts_unchecked(d.shared_shape(), nodes, edges, variance);
    let morphism = match m {
        None => None,
        Some((m, onto)) => {
            m.check_shape(&d.shape, &onto.shape)?;
            let comps: Vec<(usize, &A)> = m.components.iter().enumerate().collect();
            let components = par::try_map(&comps, |&(a, eta)| {
                let (src, tgt) = match d.variance {
                    Variance::Covariant => (&d.nodes[a], &onto.nodes[m.node_map[a]]),
                    Variance::Contravariant => (&onto.nodes[m.node_map[a]], &d.nodes[a]),
                };
                functor.arrow(eta, src, tgt)
            })?;
            Some(DiagramMorphism {
                node_map: m.node_map.clone(),
                edge_map: m.edge_map.clone(),
                components,
            })
        }
    };
    Ok((image, morphism))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integer scalars as arrows of a one-object category: a compact test
    /// category where composition is multiplication.
    #[derive(Clone, Debug, PartialEq)]
    struct Scalar(i64);

    impl Arrow for Scalar {
        type Object = ();
        fn identity(_: &()) -> Self {
            Scalar(1)
        }
        fn then(&self, next: &Self) -> Result<Self> {
            Ok(Scalar(self.0 * next.0))
        }
        fn agrees(&self, other: &Self) -> bool {
            self.0 == other.0
        }
        fn fits(&self, _: &(), _: &()) -> bool {
            true
        }
    }

    fn line(mult: i64) -> ShapedDiagram<Scalar> {
        ShapedDiagram::new(Shape::from_pairs(2, &[(0, 1)]).unwrap(), vec![(), ()], vec![Scalar(mult)], Variance::Covariant)
            .unwrap()
    }

    #[test]
    fn identity_is_natural() {
        let d = line(2);
        assert!(check_naturality(&DiagramMorphism::identity(&d), &d, &d).unwrap());
    }

    #[test]
    fn zero_components_are_natural() {
        let (d1, d2) = (line(2), line(3));
        let m = DiagramMorphism { node_map: vec![0, 1], edge_map: vec![vec![0]], components: vec![Scalar(0), Scalar(0)] };
        assert!(check_naturality(&m, &d1, &d2).unwrap());
    }

    #[test]
    fn mismatched_multipliers_are_not_natural() {
        // ×2 then id = 2, id then ×3 = 3
        let (d1, d2) = (line(2), line(3));
        let m = DiagramMorphism { node_map: vec![0, 1], edge_map: vec![vec![0]], components: vec![Scalar(1), Scalar(1)] };
        assert_eq!(naturality_witness(&m, &d1, &d2).unwrap(), Some(0));
    }

    #[test]
    fn shape_errors() {
        assert!(Shape::from_pairs(2, &[(0, 2)]).is_err());
        assert!(Shape::new(vec!["a".into(), "a".into()], vec![]).is_err());
        let d = line(2);
        let bad = DiagramMorphism { node_map: vec![0, 5], edge_map: vec![vec![0]], components: vec![Scalar(1), Scalar(1)] };
        assert!(check_naturality(&bad, &d, &d).is_err());
        let broken_path = DiagramMorphism { node_map: vec![1, 0], edge_map: vec![vec![0]], components: vec![Scalar(1), Scalar(1)] };
        assert!(check_naturality(&broken_path, &d, &d).is_err());
    }

    #[test]
    fn compose_with_identity() {
        let d = line(4);
        let m = DiagramMorphism { node_map: vec![0, 1], edge_map: vec![vec![0]], components: vec![Scalar(5), Scalar(5)] };
        let id = DiagramMorphism::identity(&d);
        let left = compose_morphisms(&id, &m, Variance::Covariant).unwrap();
        let right = compose_morphisms(&m, &id, Variance::Covariant).unwrap();
        for c in [left, right] {
            assert_eq!(c.node_map, m.node_map);
            assert_eq!(c.edge_map, m.edge_map);
            assert_eq!(c.components, m.components);
        }
    }

    #[test]
    fn collapse_onto_point() {
        // Two collapses onto a one-node diagram compose to a collapse whose
        // components multiply.
        let point = ShapedDiagram::<Scalar>::new(Shape::point(), vec![()], vec![], Variance::Covariant).unwrap();
        let d = line(1);
        let m1 = DiagramMorphism { node_map: vec![0, 0], edge_map: vec![vec![]], components: vec![Scalar(2), Scalar(2)] };
        let m2 = DiagramMorphism { node_map: vec![0], edge_map: vec![], components: vec![Scalar(3)] };
        assert!(check_naturality(&m1, &d, &point).unwrap());
        let c = compose_morphisms(&m1, &m2, Variance::Covariant).unwrap();
        assert_eq!(c.node_map, vec![0, 0]);
        assert_eq!(c.components, vec![Scalar(6), Scalar(6)]);
    }

    #[test]
    fn path_arrow_composes() {
        let shape = Shape::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let d = ShapedDiagram::new(shape, vec![(); 3], vec![Scalar(2), Scalar(5)], Variance::Covariant).unwrap();
        assert_eq!(d.path_arrow(&[0, 1], 0).unwrap(), Scalar(10));
        assert_eq!(d.path_arrow(&[], 2).unwrap(), Scalar(1));
    }

    struct Square;
    impl DiagramFunctor<Scalar> for Square {
        type Target = Scalar;
        fn contravariant(&self) -> bool {
            false
        }
        fn object(&self, _: &()) -> Result<()> {
            Ok(())
        }
        fn arrow(&self, a: &Scalar, _: &(), _: &()) -> Result<Scalar> {
            Ok(Scalar(a.0 * a.0))
        }
    }

    #[test]
    fn postcompose_commutes_with_composition() {
        let d = line(2);
        let m1 = DiagramMorphism { node_map: vec![0, 1], edge_map: vec![vec![0]], components: vec![Scalar(3), Scalar(3)] };
        let m2 = DiagramMorphism { node_map: vec![0, 1], edge_map: vec![vec![0]], components: vec![Scalar(-2), Scalar(-2)] };
        let comp = compose_morphisms(&m1, &m2, Variance::Covariant).unwrap();
        let (_, f_comp) = postcompose(&Square, &d, Some((&comp, &d))).unwrap();
        let (_, f1) = postcompose(&Square, &d, Some((&m1, &d))).unwrap();
        let (_, f2) = postcompose(&Square, &d, Some((&m2, &d))).unwrap();
        let comp_f = compose_morphisms(&f1.unwrap(), &f2.unwrap(), Variance::Covariant).unwrap();
        assert_eq!(f_comp.unwrap().components, comp_f.components);
    }
}
