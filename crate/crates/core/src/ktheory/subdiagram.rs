//! Finite generated subdiagrams of the category of finite-dimensional
//! unital commutative subalgebras.
//!
//! Base nodes are the diagonal subalgebras of partitions of the diagonal
//! coordinates with at most `max_parts` parts, together with the full
//! diagonal. Base edges are the covering inclusions between them. Each
//! rotation of the spec is then applied `rotation_depth` times: every node
//! `U` of the current frontier gets a rotation edge `U → αU`, and every
//! inclusion edge inside the frontier gets a rotated copy.
//!
//! Permutation unitaries act on diagonal nodes by relabelling coordinates,
//! so only genuinely non-monomial rotations ever multiply matrices.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, InnerAutomorphism, MultiMatrixAlgebra, StarHom};
use crate::diagram::{DiagramMorphism, EdgeId, NodeId, Shape, ShapeEdge, ShapedDiagram, Variance};
use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::subalgebra::{rotate_subalgebra, CommSubalgebra, MorphismKind, SpaceMap, SubalgebraMorphism};

/// Upper bound on the number of nodes a subdiagram may have.
pub const MAX_NODES: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubdiagramSpec {
    /// Largest number of parts of a coarse diagonal partition.
    pub max_parts: usize,
    /// Include every transposition of two diagonal coordinates of a block.
    pub transpositions: bool,
    /// Include the rotation `[[3/5, 4/5], [−4/5, 3/5]]` on the first two
    /// coordinates of every block of size at least two.
    pub pythagorean: bool,
    /// Extra unitaries, each given blockwise.
    pub rotations: Vec<Vec<ExactMatrix>>,
    pub rotation_depth: usize,
}

impl Default for SubdiagramSpec {
    fn default() -> Self {
        SubdiagramSpec { max_parts: 2, transpositions: true, pythagorean: true, rotations: vec![], rotation_depth: 1 }
    }
}

impl SubdiagramSpec {
    pub fn transpositions_only() -> Self {
        SubdiagramSpec { pythagorean: false, ..Self::default() }
    }

    /// No rotations at all: only the diagonal partitions and inclusions.
    pub fn without_rotations() -> Self {
        SubdiagramSpec { pythagorean: false, transpositions: false, ..Self::default() }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let spec: SubdiagramSpec = serde_json::from_value(v.clone())?;
        if spec.max_parts == 0 {
            return Err(Error::Parse("max_parts must be at least 1".into()));
        }
        Ok(spec)
    }

    /// The spec for `A ⊗ M_m`: custom rotations become `u ⊗ 1`.
    pub fn stabilized(&self, m: usize) -> Self {
        let identity = ExactMatrix::identity(m);
        SubdiagramSpec {
            rotations: self.rotations.iter().map(|u| u.iter().map(|b| b.kron(&identity)).collect()).collect(),
            ..self.clone()
        }
    }

    /// The inner automorphisms this spec prescribes on `a`, in a fixed order:
    /// transpositions, Pythagorean rotations, custom rotations.
    pub fn rotations_for(&self, a: &MultiMatrixAlgebra) -> Result<Vec<InnerAutomorphism>> {
        let mut out = Vec::new();
        if self.transpositions {
            for (b, &n) in a.blocks().iter().enumerate() {
                for i in 0..n {
                    for j in i + 1..n {
                        out.push(InnerAutomorphism::transposition(a, b, i, j)?);
                    }
                }
            }
        }
        if self.pythagorean {
            for (b, &n) in a.blocks().iter().enumerate() {
                if n >= 2 {
                    out.push(InnerAutomorphism::pythagorean(a, b)?);
                }
            }
        }
        for parts in &self.rotations {
            out.push(InnerAutomorphism::new(AlgebraElement::new(a, parts.clone())?)?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
struct NodeInfo {
    sub: Arc<CommSubalgebra>,
    /// For diagonal 0/1 nodes: the coordinate set of each atom, and the
    /// atom containing each coordinate.
    partition: Option<Vec<Vec<usize>>>,
    coord_atom: Option<Vec<usize>>,
}

impl NodeInfo {
    fn from_partition(a: &MultiMatrixAlgebra, parts: Vec<Vec<usize>>) -> Self {
        let n = a.coordinates();
        let mut pairs: Vec<(AlgebraElement, Vec<usize>)> = parts
            .into_iter()
            .map(|p| {
                let mut mask = vec![false; n];
                for &c in &p {
                    mask[c] = true;
                }
                (AlgebraElement::diagonal_projection(a, &mask).expect("mask sized"), p)
            })
            .collect();
        pairs.sort();
        let mut coord_atom = vec![0; n];
        for (i, (_, p)) in pairs.iter().enumerate() {
            for &c in p {
                coord_atom[c] = i;
            }
        }
        let (atoms, parts): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        NodeInfo {
            sub: Arc::new(CommSubalgebra::from_atoms_unchecked(a, atoms)),
            partition: Some(parts),
            coord_atom: Some(coord_atom),
        }
    }

    fn from_subalgebra(sub: CommSubalgebra) -> Self {
        let masks: Option<Vec<Vec<bool>>> = sub.atoms().iter().map(AlgebraElement::diagonal_mask).collect();
        let (partition, coord_atom) = match masks {
            Some(masks) => {
                let n = sub.parent().coordinates();
                let mut coord_atom = vec![0; n];
                let parts: Vec<Vec<usize>> = masks
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let p: Vec<usize> = (0..n).filter(|&c| m[c]).collect();
                        for &c in &p {
                            coord_atom[c] = i;
                        }
                        p
                    })
                    .collect();
                (Some(parts), Some(coord_atom))
            }
            None => (None, None),
        };
        NodeInfo { sub: Arc::new(sub), partition, coord_atom }
    }
}

fn partition_key(parts: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut key: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.sort_unstable();
            p
        })
        .collect();
    key.sort();
    key
}

/// A built subdiagram together with lookup tables.
#[derive(Clone, Debug)]
pub struct Subdiagram {
    algebra: MultiMatrixAlgebra,
    diagram: ShapedDiagram<SubalgebraMorphism>,
    rotations: Vec<InnerAutomorphism>,
    info: Vec<NodeInfo>,
    atom_index: HashMap<Vec<AlgebraElement>, NodeId>,
    diagonal: NodeId,
    scalars: NodeId,
}

impl Subdiagram {
    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn diagram(&self) -> &ShapedDiagram<SubalgebraMorphism> {
        &self.diagram
    }

    pub fn rotations(&self) -> &[InnerAutomorphism] {
        &self.rotations
    }

    pub fn num_nodes(&self) -> usize {
        self.info.len()
    }

    pub fn node(&self, n: NodeId) -> &CommSubalgebra {
        &self.info[n].sub
    }

    /// The node of the full diagonal subalgebra.
    pub fn diagonal_node(&self) -> NodeId {
        self.diagonal
    }

    pub fn scalars_node(&self) -> NodeId {
        self.scalars
    }

    pub fn node_of(&self, u: &CommSubalgebra) -> Option<NodeId> {
        self.atom_index.get(u.atoms()).copied()
    }

    /// The coordinate set of each atom of a diagonal node.
    pub fn partition(&self, n: NodeId) -> Option<&[Vec<usize>]> {
        self.info[n].partition.as_deref()
    }

    /// A node in which `p` is a sum of atoms, preferring `span{p, 1 − p}`.
    pub fn locate(&self, p: &AlgebraElement) -> Result<Option<(NodeId, Vec<usize>)>> {
        if p.parent() != &self.algebra {
            return Err(Error::ParentMismatch(format!("{} vs {}", p.parent(), self.algebra)));
        }
        let mut key = vec![p.clone(), p.complement()];
        key.retain(|x| !x.is_zero());
        key.sort();
        if let Some(&n) = self.atom_index.get(&key) {
            if let Some(parts) = self.info[n].sub.decompose(p)? {
                return Ok(Some((n, parts)));
            }
        }
        let order = std::iter::once(self.diagonal).chain((0..self.info.len()).filter(|&n| n != self.diagonal));
        for n in order {
            if let Some(parts) = self.info[n].sub.decompose(p)? {
                return Ok(Some((n, parts)));
            }
        }
        Ok(None)
    }

    /// Extends this subdiagram (of `B`) by the images of the nodes and edges
    /// of `source` (of `A`) under a unital `φ: A → B`, returning the extended
    /// diagram and the diagram morphism `U ↦ φ(U)` whose components are the
    /// restrictions `φ|_U`.
    pub fn extend_with_image(
        &self,
        phi: &StarHom,
        source: &Subdiagram,
    ) -> Result<(Subdiagram, DiagramMorphism<SubalgebraMorphism>)> {
        if phi.codomain() != &self.algebra || phi.domain() != &source.algebra {
            return Err(Error::InvalidHom("hom does not connect the two subdiagrams".into()));
        }
        if !phi.is_unital() {
            return Err(Error::InvalidHom("images of subalgebras need a unital hom".into()));
        }
        let mut b = Builder::from_subdiagram(self);
        let mut node_map = Vec::with_capacity(source.num_nodes());
        let mut components = Vec::with_capacity(source.num_nodes());
        // Σ(φU) → Σ(U), kept as plain vectors for the edge images.
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(source.num_nodes());
        for info in &source.info {
            let images = info.sub.atoms().iter().map(|p| phi.apply(p)).collect::<Result<Vec<_>>>()?;
            let image = CommSubalgebra::from_atoms_unchecked(
                &self.algebra,
                images.iter().filter(|x| !x.is_zero()).cloned().collect(),
            );
            let assignment: Vec<usize> = image
                .atoms()
                .iter()
                .map(|q| images.iter().position(|x| x == q).expect("image atom"))
                .collect();
            let (id, fresh) = b.add_subalgebra(image)?;
            if fresh && b.info[id].partition.is_some() {
                let inc = SubalgebraMorphism::inclusion(&b.info[id].sub, &b.info[b.diagonal].sub)?;
                b.add_edge(id, b.diagonal, inc);
            }
            components.push(SubalgebraMorphism {
                kind: MorphismKind::Restriction,
                spectrum: SpaceMap::new(b.info[id].sub.spectrum(), info.sub.spectrum(), assignment.clone())?,
            });
            node_map.push(id);
            back.push(assignment);
        }
        let mut pushed: HashMap<usize, usize> = HashMap::new();
        let mut edge_map = Vec::with_capacity(source.diagram.shape().num_edges());
        for (i, e) in source.diagram.shape().edges().iter().enumerate() {
            let arrow = source.diagram.edge(i);
            let (s, t) = (node_map[e.source], node_map[e.target]);
            // Σ(φt) → Σ(t) → Σ(s), then back into Σ(φs).
            let mut into_s = vec![usize::MAX; source.info[e.source].sub.len()];
            for (j, &p) in back[e.source].iter().enumerate() {
                into_s[p] = j;
            }
            let assignment: Vec<usize> = back[e.target].iter().map(|&q| into_s[arrow.spectrum.apply(q)]).collect();
            debug_assert!(assignment.iter().all(|&x| x != usize::MAX));
            let spectrum = SpaceMap::new(b.info[t].sub.spectrum(), b.info[s].sub.spectrum(), assignment)?;
            if s == t && spectrum == SpaceMap::identity(spectrum.source()) {
                edge_map.push(vec![]);
                continue;
            }
            let kind = match arrow.kind {
                MorphismKind::Rotation(r) => {
                    let next = b.rotations.len();
                    let idx = *pushed.entry(r).or_insert(next);
                    if idx == next {
                        b.rotations.push(source.rotations[r].push_forward(phi)?);
                    }
                    MorphismKind::Rotation(idx)
                }
                k => k,
            };
            let id = b.add_edge_keep(s, t, SubalgebraMorphism { kind, spectrum });
            edge_map.push(vec![id]);
        }
        let extended = b.finish()?;
        Ok((extended, DiagramMorphism { node_map, edge_map, components }))
    }
}

struct Builder {
    algebra: MultiMatrixAlgebra,
    info: Vec<NodeInfo>,
    atom_index: HashMap<Vec<AlgebraElement>, NodeId>,
    part_index: HashMap<Vec<Vec<usize>>, NodeId>,
    edges: Vec<(NodeId, NodeId, SubalgebraMorphism)>,
    edge_keys: HashMap<(NodeId, NodeId, Arc<[usize]>), EdgeId>,
    rotations: Vec<InnerAutomorphism>,
    diagonal: NodeId,
    scalars: NodeId,
}

impl Builder {
    fn new(a: &MultiMatrixAlgebra) -> Self {
        Builder {
            algebra: a.clone(),
            info: vec![],
            atom_index: HashMap::new(),
            part_index: HashMap::new(),
            edges: vec![],
            edge_keys: HashMap::new(),
            rotations: vec![],
            diagonal: 0,
            scalars: 0,
        }
    }

    fn from_subdiagram(s: &Subdiagram) -> Self {
        let mut b = Builder::new(&s.algebra);
        b.info = s.info.clone();
        b.atom_index = s.atom_index.clone();
        for (i, info) in b.info.iter().enumerate() {
            if let Some(p) = &info.partition {
                b.part_index.insert(partition_key(p), i);
            }
        }
        for (i, e) in s.diagram.shape().edges().iter().enumerate() {
            b.add_edge_keep(e.source, e.target, s.diagram.edge(i).clone());
        }
        b.rotations = s.rotations.clone();
        b.diagonal = s.diagonal;
        b.scalars = s.scalars;
        b
    }

    fn push(&mut self, info: NodeInfo) -> Result<NodeId> {
        if self.info.len() >= MAX_NODES {
            return Err(Error::InvalidSubalgebra(format!("subdiagram exceeds {MAX_NODES} nodes")));
        }
        let id = self.info.len();
        self.atom_index.insert(info.sub.atoms().to_vec(), id);
        if let Some(p) = &info.partition {
            self.part_index.insert(partition_key(p), id);
        }
        self.info.push(info);
        Ok(id)
    }

    fn add_partition(&mut self, parts: Vec<Vec<usize>>) -> Result<(NodeId, bool)> {
        let key = partition_key(&parts);
        if let Some(&id) = self.part_index.get(&key) {
            return Ok((id, false));
        }
        let info = NodeInfo::from_partition(&self.algebra, key);
        Ok((self.push(info)?, true))
    }

    fn add_subalgebra(&mut self, sub: CommSubalgebra) -> Result<(NodeId, bool)> {
        if let Some(&id) = self.atom_index.get(sub.atoms()) {
            return Ok((id, false));
        }
        let info = NodeInfo::from_subalgebra(sub);
        Ok((self.push(info)?, true))
    }

    /// Adds an edge unless it is an identity loop or already present.
    fn add_edge(&mut self, s: NodeId, t: NodeId, m: SubalgebraMorphism) -> Option<EdgeId> {
        if s == t && m.spectrum == SpaceMap::identity(m.spectrum.source()) {
            return None;
        }
        Some(self.add_edge_keep(s, t, m))
    }

    fn add_edge_keep(&mut self, s: NodeId, t: NodeId, m: SubalgebraMorphism) -> EdgeId {
        let key = (s, t, Arc::from(m.spectrum.assignment()));
        if let Some(&id) = self.edge_keys.get(&key) {
            return id;
        }
        let id = self.edges.len();
        self.edge_keys.insert(key, id);
        self.edges.push((s, t, m));
        id
    }

    /// Image of node `x` under rotation `r`, with the map `Σ(αx) → Σ(x)`.
    fn rotate(&mut self, x: NodeId, r: usize, perm: Option<&[usize]>) -> Result<(NodeId, SpaceMap)> {
        if let (Some(sigma), Some(parts), Some(coord_atom)) =
            (perm, self.info[x].partition.clone(), self.info[x].coord_atom.clone())
        {
            let moved: Vec<Vec<usize>> = parts.iter().map(|p| p.iter().map(|&c| sigma[c]).collect()).collect();
            let (y, _) = self.add_partition(moved)?;
            let mut inverse = vec![0; sigma.len()];
            for (c, &s) in sigma.iter().enumerate() {
                inverse[s] = c;
            }
            let target_parts = self.info[y].partition.as_ref().expect("diagonal node");
            let assignment = target_parts.iter().map(|p| coord_atom[inverse[p[0]]]).collect();
            let map = SpaceMap::new(self.info[y].sub.spectrum(), self.info[x].sub.spectrum(), assignment)?;
            return Ok((y, map));
        }
        let (rotated, map) = rotate_subalgebra(&self.rotations[r], &self.info[x].sub)?;
        let (y, _) = self.add_subalgebra(rotated)?;
        Ok((y, map))
    }

    fn finish(self) -> Result<Subdiagram> {
        let nodes: Vec<String> = (0..self.info.len()).map(|i| format!("n{i}")).collect();
        let shape_edges: Vec<ShapeEdge> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, (s, t, _))| ShapeEdge { id: format!("e{i}"), source: *s, target: *t })
            .collect();
        let shape = Shape::new(nodes, shape_edges)?;
        let objects = self.info.iter().map(|i| Arc::clone(&i.sub)).collect();
        let arrows = self.edges.into_iter().map(|(_, _, m)| m).collect();
        let diagram = ShapedDiagram::new(shape, objects, arrows, Variance::Covariant)?;
        Ok(Subdiagram {
            algebra: self.algebra,
            diagram,
            rotations: self.rotations,
            info: self.info,
            atom_index: self.atom_index,
            diagonal: self.diagonal,
            scalars: self.scalars,
        })
    }
}

/// Set partitions of `0..n` into at most `k` parts, as restricted growth
/// strings.
fn partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, k: usize, rgs: &mut Vec<usize>, used: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            let mut parts = vec![Vec::new(); used];
            for (c, &p) in rgs.iter().enumerate() {
                parts[p].push(c);
            }
            out.push(parts);
            return;
        }
        for p in 0..(used + 1).min(k) {
            rgs.push(p);
            go(i + 1, n, k, rgs, used.max(p + 1), out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

/// Number of set partitions of `n` points into at most `k` parts, saturating.
fn partition_count(n: usize, k: usize) -> usize {
    // Stirling numbers of the second kind, row by row.
    let mut row = vec![1usize];
    for i in 1..=n {
        let mut next = vec![0usize; (i + 1).min(k + 1)];
        for (j, slot) in next.iter_mut().enumerate().skip(1) {
            let stay = row.get(j).copied().unwrap_or(0).saturating_mul(j);
            let fresh = row.get(j - 1).copied().unwrap_or(0);
            *slot = stay.saturating_add(fresh);
        }
        row = next;
    }
    row.iter().fold(0usize, |a, &b| a.saturating_add(b))
}

/// The subdiagram of `a` prescribed by `spec`.
pub fn build_subdiagram(a: &MultiMatrixAlgebra, spec: &SubdiagramSpec) -> Result<Subdiagram> {
    if spec.max_parts == 0 {
        return Err(Error::InvalidSubalgebra("max_parts must be at least 1".into()));
    }
    let n = a.coordinates();
    if partition_count(n, spec.max_parts) > MAX_NODES {
        return Err(Error::InvalidSubalgebra(format!(
            "{n} coordinates with up to {} parts exceed {MAX_NODES} nodes",
            spec.max_parts
        )));
    }
    let mut b = Builder::new(a);
    b.rotations = spec.rotations_for(a)?;

    for parts in partitions(n, spec.max_parts) {
        b.add_partition(parts)?;
    }
    let (d, _) = b.add_partition((0..n).map(|c| vec![c]).collect())?;
    let (u, _) = b.add_partition(vec![(0..n).collect()])?;
    b.diagonal = d;
    b.scalars = u;

    // Covering inclusions: split one part in two, or jump to the diagonal
    // when no coarse partition lies in between.
    let base = b.info.len();
    for x in 0..base {
        let parts = b.info[x].partition.clone().expect("base nodes are diagonal");
        if parts.len() == n {
            continue;
        }
        for (pi, part) in parts.iter().enumerate() {
            if part.len() < 2 {
                continue;
            }
            let rest = &part[1..];
            for mask in 0..(1usize << rest.len()) - 1 {
                let mut first = vec![part[0]];
                let mut second = Vec::new();
                for (j, &c) in rest.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        first.push(c);
                    } else {
                        second.push(c);
                    }
                }
                let mut refined = parts.clone();
                refined[pi] = first;
                refined.push(second);
                if refined.len() <= spec.max_parts || refined.len() == n {
                    let key = partition_key(&refined);
                    let y = b.part_index[&key];
                    let inc = inclusion_by_partition(&b, x, y)?;
                    b.add_edge(x, y, inc);
                }
            }
        }
        if parts.len() + 1 > spec.max_parts && parts.len() + 1 < n {
            let inc = inclusion_by_partition(&b, x, d)?;
            b.add_edge(x, d, inc);
        }
    }

    let perms: Vec<Option<Vec<usize>>> = b.rotations.iter().map(InnerAutomorphism::coordinate_permutation).collect();
    let mut frontier: Vec<NodeId> = (0..b.info.len()).collect();
    for _ in 0..spec.rotation_depth {
        let in_frontier: HashSet<NodeId> = frontier.iter().copied().collect();
        let inclusions: Vec<(NodeId, NodeId, SpaceMap)> = b
            .edges
            .iter()
            .filter(|(s, t, m)| {
                m.kind == MorphismKind::Inclusion && in_frontier.contains(s) && in_frontier.contains(t)
            })
            .map(|(s, t, m)| (*s, *t, m.spectrum.clone()))
            .collect();
        let mut next = Vec::new();
        for (r, perm) in perms.iter().enumerate() {
            let mut image: HashMap<NodeId, (NodeId, SpaceMap)> = HashMap::new();
            for &x in &frontier {
                let before = b.info.len();
                let (y, map) = b.rotate(x, r, perm.as_deref())?;
                if b.info.len() > before {
                    next.push(y);
                }
                b.add_edge(x, y, SubalgebraMorphism { kind: MorphismKind::Rotation(r), spectrum: map.clone() });
                image.insert(x, (y, map));
            }
            for (s, t, q) in &inclusions {
                let (ys, ms) = &image[s];
                let (yt, mt) = &image[t];
                let back = ms.inverse().expect("rotation maps are bijective");
                let spectrum = mt.compose(q)?.compose(&back)?;
                b.add_edge(*ys, *yt, SubalgebraMorphism { kind: MorphismKind::Inclusion, spectrum });
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    b.finish()
}

fn inclusion_by_partition(b: &Builder, x: NodeId, y: NodeId) -> Result<SubalgebraMorphism> {
    let coarse = b.info[x].coord_atom.as_ref().expect("diagonal node");
    let fine = b.info[y].partition.as_ref().expect("diagonal node");
    let assignment = fine.iter().map(|p| coarse[p[0]]).collect();
    Ok(SubalgebraMorphism {
        kind: MorphismKind::Inclusion,
        spectrum: SpaceMap::new(b.info[y].sub.spectrum(), b.info[x].sub.spectrum(), assignment)?,
    })
}
