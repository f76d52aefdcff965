//! Seeded random instances for the property suites.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abelian::{AbDiagram, AbHom, AbMorphism, IntMatrix, PresentedAbGroup, Word};
use crate::algebra::{MultiMatrixAlgebra, Slot, StarHom};
use crate::diagram::{DiagramMorphism, Shape, ShapeEdge, Variance};
use crate::error::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ nᵢ²`.
pub fn total_dimension(a: &MultiMatrixAlgebra) -> usize {
    a.blocks().iter().map(|n| n * n).sum()
}

/// Block sizes in `1..=2` with `Σ nᵢ² ≤ max_dim`, in random order.
pub fn random_algebra(rng: &mut impl Rng, max_dim: usize) -> MultiMatrixAlgebra {
    loop {
        let k = rng.gen_range(1..=max_dim.max(1));
        let blocks: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=2)).collect();
        let a = MultiMatrixAlgebra::new(blocks).expect("nonempty");
        if total_dimension(&a) <= max_dim {
            return a;
        }
    }
}

/// A unital hom between algebras of total dimension at most `max_dim`,
/// with the copies in every codomain block laid out in random order.
pub fn random_unital_hom(rng: &mut impl Rng, max_dim: usize) -> StarHom {
    loop {
        let a = random_algebra(rng, max_dim);
        let rows = rng.gen_range(1..=max_dim);
        let mult: Vec<Vec<usize>> =
            (0..rows).map(|_| a.blocks().iter().map(|_| rng.gen_range(0..=2)).collect()).collect();
        let sizes: Vec<usize> =
            mult.iter().map(|r| r.iter().zip(a.blocks()).map(|(m, n)| m * n).sum()).collect();
        if sizes.contains(&0) || sizes.iter().map(|n| n * n).sum::<usize>() > max_dim {
            continue;
        }
        // Unital homs need every domain block to land somewhere.
        if (0..a.num_blocks()).any(|j| mult.iter().all(|r| r[j] == 0)) {
            continue;
        }
        let b = MultiMatrixAlgebra::new(sizes).expect("positive sizes");
        let assignment = mult
            .iter()
            .map(|row| {
                let mut copies: Vec<(usize, usize)> =
                    row.iter().enumerate().flat_map(|(j, &m)| (0..m).map(move |c| (j, c))).collect();
                copies.shuffle(rng);
                let mut at = 0;
                copies
                    .into_iter()
                    .map(|(block, copy)| {
                        let s = Slot { block, copy, offset: at };
                        at += a.blocks()[block];
                        s
                    })
                    .collect()
            })
            .collect();
        return StarHom::with_assignment(&a, &b, mult, true, assignment).expect("valid by construction");
    }
}

/// Entries uniform in `[-bound, bound]`, shape up to `max × max`.
pub fn random_int_matrix(rng: &mut impl Rng, max: usize, bound: i64) -> IntMatrix {
    let (r, c) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
    IntMatrix::from_rows_with_cols(
        (0..r).map(|_| (0..c).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()).collect(),
        c,
    )
    .expect("rows sized")
}

/// `⊕ ℤ/dᵢ` with up to `max_rank` summands, `dᵢ ∈ {0 (free), 2, …, max_torsion}`.
pub fn random_group(rng: &mut impl Rng, max_rank: usize, max_torsion: i64) -> PresentedAbGroup {
    let n = rng.gen_range(1..=max_rank);
    let moduli: Vec<i64> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(2..=max_torsion) })
        .collect();
    PresentedAbGroup::cyclic_sum(&moduli)
}

fn moduli_of(g: &PresentedAbGroup) -> Vec<i64> {
    let mut m = vec![0i64; g.ngens()];
    for r in g.relations() {
        let (gen, c) = &r.terms()[0];
        m[*gen] = i64::try_from(c).expect("small modulus");
    }
    m
}

/// A random hom between cyclic sums: the image coordinate on a target
/// summand `ℤ/t` of a source generator of order `d` is a multiple of
/// `t / gcd(d, t)`, and is zero on free target summands when `d > 0`.
pub fn random_cyclic_hom(rng: &mut impl Rng, src: &Arc<PresentedAbGroup>, tgt: &Arc<PresentedAbGroup>) -> AbHom {
    let (sm, tm) = (moduli_of(src), moduli_of(tgt));
    let images = sm
        .iter()
        .map(|&d| {
            Word::from_terms(tm.iter().enumerate().map(|(k, &t)| {
                let step = match (d, t) {
                    (0, _) => 1,
                    (_, 0) => 0,
                    (d, t) => t / num_integer::gcd(d, t),
                };
                (k, BigInt::from(step * rng.gen_range(-2..=2)))
            }))
        })
        .collect();
    AbHom::new(Arc::clone(src), Arc::clone(tgt), images).expect("well defined by construction")
}

/// A covariant diagram on up to `max_nodes` nodes with edges `i → j` for
/// `i < j` only.
pub fn random_ab_diagram(rng: &mut impl Rng, max_nodes: usize, max_rank: usize, max_torsion: i64) -> AbDiagram {
    let n = rng.gen_range(1..=max_nodes);
    let groups: Vec<Arc<PresentedAbGroup>> =
        (0..n).map(|_| Arc::new(random_group(rng, max_rank, max_torsion))).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let extra = usize::from(rng.gen_bool(0.2));
            for _ in 0..rng.gen_range(0..=1 + extra) {
                pairs.push((i, j));
            }
        }
    }
    let homs = pairs.iter().map(|&(i, j)| random_cyclic_hom(rng, &groups[i], &groups[j])).collect();
    AbDiagram::new(Shape::from_pairs(n, &pairs).expect("valid pairs"), groups, homs, Variance::Covariant)
        .expect("arrows fit")
}

/// A random subdiagram `D'` of `d` on a subset of nodes and edges, with its
/// inclusion morphism `D' → D`.
pub fn random_subdiagram(rng: &mut impl Rng, d: &AbDiagram) -> Result<(AbDiagram, AbMorphism)> {
    let n = d.shape().num_nodes();
    let mut keep: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
    if keep.is_empty() {
        keep.push(rng.gen_range(0..n));
    }
    let index = |x: usize| keep.iter().position(|&k| k == x);
    let mut edges = Vec::new();
    let mut edge_map = Vec::new();
    let mut homs = Vec::new();
    for (i, e) in d.shape().edges().iter().enumerate() {
        if let (Some(s), Some(t)) = (index(e.source), index(e.target)) {
            if rng.gen_bool(0.8) {
                edges.push(ShapeEdge { id: e.id.clone(), source: s, target: t });
                edge_map.push(vec![i]);
                homs.push(d.edge(i).clone());
            }
        }
    }
    let shape = Shape::new(keep.iter().map(|k| d.shape().node_ids()[*k].clone()).collect(), edges)?;
    let nodes: Vec<_> = keep.iter().map(|&k| Arc::clone(d.node(k))).collect();
    let sub = AbDiagram::new(shape, nodes.clone(), homs, Variance::Covariant)?;
    let m = DiagramMorphism {
        node_map: keep.clone(),
        edge_map,
        components: nodes.iter().map(AbHom::identity).collect(),
    };
    Ok((sub, m))
}

/// The endomorphism of `d` multiplying every node by `c`.
pub fn scalar_morphism(d: &AbDiagram, c: i64) -> AbMorphism {
    let c = BigInt::from(c);
    DiagramMorphism {
        node_map: (0..d.shape().num_nodes()).collect(),
        edge_map: (0..d.shape().num_edges()).map(|e| vec![e]).collect(),
        components: d
            .nodes()
            .iter()
            .map(|g| {
                let images = (0..g.ngens()).map(|k| Word::generator(k).scale(&c)).collect();
                AbHom::new(Arc::clone(g), Arc::clone(g), images).expect("scalars are homs")
            })
            .collect(),
    }
}

/// A chain of partitions of `0..n`, finest first, each obtained from the
/// previous by merging random parts.
pub fn random_partition_chain(rng: &mut impl Rng, n: usize, len: usize) -> Vec<Vec<Vec<usize>>> {
    let mut current: Vec<Vec<usize>> = (0..n).map(|c| vec![c]).collect();
    current.shuffle(rng);
    let mut chain = vec![current.clone()];
    for _ in 1..len {
        if current.len() > 1 {
            let merges = rng.gen_range(1..current.len());
            for _ in 0..merges {
                if current.len() < 2 {
                    break;
                }
                let i = rng.gen_range(0..current.len());
                let part = current.swap_remove(i);
                let j = rng.gen_range(0..current.len());
                current[j].extend(part);
            }
        }
        for p in &mut current {
            p.sort_unstable();
        }
        chain.push(current.clone());
    }
    chain
}
