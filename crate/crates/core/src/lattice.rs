//! Finite meet-semilattices, maps between them, and limits of diagrams of
//! them computed as compatible families.

use std::sync::Arc;

use crate::diagram::{Arrow, ShapedDiagram, Variance};
use crate::error::{Error, Result};
use crate::par;

/// Elements are `0..size`. A powerset lattice on `bits` points encodes
/// subsets as bitmasks and meets by intersection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetSemilattice {
    kind: Kind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Powerset { bits: usize },
    Table { size: usize, meet: Arc<[usize]> },
}

/// Largest powerset lattice materialized.
pub const MAX_POWERSET_BITS: usize = 20;

impl MeetSemilattice {
    pub fn powerset(bits: usize) -> Result<Self> {
        if bits > MAX_POWERSET_BITS {
            return Err(Error::InvalidLattice(format!("powerset on {bits} points is too large")));
        }
        Ok(MeetSemilattice { kind: Kind::Powerset { bits } })
    }

    /// From a full meet table; checks the semilattice laws and a top.
    pub fn from_table(size: usize, meet: Vec<usize>) -> Result<Self> {
        if meet.len() != size * size {
            return Err(Error::InvalidLattice(format!("meet table has {} entries for {size} elements", meet.len())));
        }
        if size == 0 {
            return Err(Error::InvalidLattice("empty lattice".into()));
        }
        if meet.iter().any(|&m| m >= size) {
            return Err(Error::InvalidLattice("meet table entry out of range".into()));
        }
        let m = |a: usize, b: usize| meet[a * size + b];
        for a in 0..size {
            if m(a, a) != a {
                return Err(Error::InvalidLattice(format!("meet is not idempotent at {a}")));
            }
            for b in 0..size {
                if m(a, b) != m(b, a) {
                    return Err(Error::InvalidLattice(format!("meet is not commutative at ({a}, {b})")));
                }
                for c in 0..size {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::InvalidLattice(format!("meet is not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        if !(0..size).any(|t| (0..size).all(|a| m(a, t) == a)) {
            return Err(Error::InvalidLattice("no top element".into()));
        }
        Ok(MeetSemilattice { kind: Kind::Table { size, meet: meet.into() } })
    }

    pub fn size(&self) -> usize {
        match &self.kind {
            Kind::Powerset { bits } => 1 << bits,
            Kind::Table { size, .. } => *size,
        }
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        match &self.kind {
            Kind::Powerset { .. } => a & b,
            Kind::Table { size, meet } => meet[a * size + b],
        }
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    pub fn top(&self) -> usize {
        match &self.kind {
            Kind::Powerset { bits } => (1 << bits) - 1,
            Kind::Table { size, .. } => (0..*size).find(|&t| (0..*size).all(|a| self.leq(a, t))).expect("validated"),
        }
    }

    pub fn bottom(&self) -> Option<usize> {
        (0..self.size()).find(|&b| (0..self.size()).all(|a| self.leq(b, a)))
    }
}

/// A map of underlying sets `source → target`, given as an index table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    source_size: usize,
    target_size: usize,
    map: Arc<[usize]>,
}

impl LatticeMap {
    pub fn new(source: &MeetSemilattice, target: &MeetSemilattice, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.size() || map.iter().any(|&x| x >= target.size()) {
            return Err(Error::InvalidLattice("lattice map does not fit its endpoints".into()));
        }
        Ok(LatticeMap { source_size: source.size(), target_size: target.size(), map: map.into() })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.map
    }

    pub fn preserves_meets(&self, source: &MeetSemilattice, target: &MeetSemilattice) -> bool {
        (0..self.source_size)
            .all(|a| (0..self.source_size).all(|b| self.map[source.meet(a, b)] == target.meet(self.map[a], self.map[b])))
    }

    pub fn is_monotone(&self, source: &MeetSemilattice, target: &MeetSemilattice) -> bool {
        (0..self.source_size).all(|a| {
            (0..self.source_size).all(|b| !source.leq(a, b) || target.leq(self.map[a], self.map[b]))
        })
    }
}

impl Arrow for LatticeMap {
    type Object = MeetSemilattice;

    fn identity(obj: &MeetSemilattice) -> Self {
        LatticeMap { source_size: obj.size(), target_size: obj.size(), map: (0..obj.size()).collect() }
    }

    fn then(&self, next: &Self) -> Result<Self> {
        if self.target_size != next.source_size {
            return Err(Error::InvalidLattice("lattice maps do not compose".into()));
        }
        Ok(LatticeMap {
            source_size: self.source_size,
            target_size: next.target_size,
            map: self.map.iter().map(|&x| next.map[x]).collect(),
        })
    }

    fn agrees(&self, other: &Self) -> bool {
        self == other
    }

    fn fits(&self, source: &MeetSemilattice, target: &MeetSemilattice) -> bool {
        self.source_size == source.size() && self.target_size == target.size()
    }
}

/// One constraint `s[a] = map[s[b]]` of a family problem.
#[derive(Clone, Copy, Debug)]
pub struct Constraint<'a> {
    pub a: usize,
    pub b: usize,
    pub map: &'a [usize],
}

/// Every family `s` with `s[node] < sizes[node]` satisfying all constraints,
/// in lexicographic order. Backtracking with propagation: fixing `s[b]`
/// forces `s[a]`, and fixing `s[a]` forces `s[b]` when the map is injective.
pub fn compatible_families(sizes: &[usize], constraints: &[Constraint<'_>]) -> Vec<Vec<usize>> {
    let n = sizes.len();
    let inverses: Vec<Option<Vec<Option<usize>>>> = constraints
        .iter()
        .map(|c| {
            let mut inv = vec![None; sizes[c.a]];
            for (x, &y) in c.map.iter().enumerate() {
                if inv[y].is_some() {
                    return None;
                }
                inv[y] = Some(x);
            }
            Some(inv)
        })
        .collect();
    let mut by_node: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_degree = vec![0usize; n];
    for (i, c) in constraints.iter().enumerate() {
        by_node[c.a].push(i);
        if c.b != c.a {
            by_node[c.b].push(i);
        }
        in_degree[c.b] += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(in_degree[x]), x));

    let solver = Solver { sizes, constraints, inverses: &inverses, by_node: &by_node, order: &order };
    let mut out = Vec::new();
    solver.search(vec![None; n], &mut out);
    out.sort();
    out
}

struct Solver<'s, 'a> {
    sizes: &'s [usize],
    constraints: &'s [Constraint<'a>],
    inverses: &'s [Option<Vec<Option<usize>>>],
    by_node: &'s [Vec<usize>],
    order: &'s [usize],
}

impl Solver<'_, '_> {
    /// Assigns `value` to `node` and everything it forces; false on conflict.
    fn assign(&self, s: &mut [Option<usize>], node: usize, value: usize) -> bool {
        let mut queue = vec![(node, value)];
        while let Some((x, v)) = queue.pop() {
            match s[x] {
                Some(w) if w == v => continue,
                Some(_) => return false,
                None => s[x] = Some(v),
            }
            for &ci in &self.by_node[x] {
                let c = &self.constraints[ci];
                if c.b == x {
                    let forced = c.map[v];
                    match s[c.a] {
                        Some(w) if w != forced => return false,
                        Some(_) => {}
                        None => queue.push((c.a, forced)),
                    }
                }
                if c.a == x {
                    if let Some(sb) = s[c.b] {
                        if c.map[sb] != s[x].unwrap() {
                            return false;
                        }
                    } else if let Some(inv) = &self.inverses[ci] {
                        match inv[s[x].unwrap()] {
                            Some(pre) => queue.push((c.b, pre)),
                            None => return false,
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&self, s: Vec<Option<usize>>, out: &mut Vec<Vec<usize>>) {
        let Some(&node) = self.order.iter().find(|&&x| s[x].is_none()) else {
            out.push(s.into_iter().map(|x| x.unwrap()).collect());
            return;
        };
        for v in 0..self.sizes[node] {
            let ok = self.by_node[node].iter().all(|&ci| {
                let c = &self.constraints[ci];
                c.b != node || s[c.a].is_none_or(|sa| c.map[v] == sa)
            });
            if !ok {
                continue;
            }
            let mut next = s.clone();
            if self.assign(&mut next, node, v) {
                self.search(next, out);
            }
        }
    }
}

/// The limit of a diagram of finite meet-semilattices.
#[derive(Clone, Debug)]
pub struct LimitLattice {
    pub lattice: MeetSemilattice,
    /// Element `i` of the limit is the family `families[i]`.
    pub families: Vec<Vec<usize>>,
}

impl LimitLattice {
    /// Componentwise order.
    pub fn family_leq(nodes: &[MeetSemilattice], x: &[usize], y: &[usize]) -> bool {
        nodes.iter().zip(x.iter().zip(y)).all(|(l, (&a, &b))| l.leq(a, b))
    }
}

/// Families `(s_a)` with `s_a = L(u)(s_b)` for every edge `u: a → b` of a
/// contravariant diagram, ordered componentwise. The meet of two families
/// is their greatest lower bound among families; it is the componentwise
/// meet whenever that is again compatible.
pub fn limit_semilattice(d: &ShapedDiagram<LatticeMap>) -> Result<LimitLattice> {
    if d.variance() != Variance::Contravariant {
        return Err(Error::ShapeMismatch("limits are taken over contravariant lattice diagrams".into()));
    }
    let sizes: Vec<usize> = d.nodes().iter().map(MeetSemilattice::size).collect();
    let constraints: Vec<Constraint<'_>> = d
        .shape()
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| Constraint { a: e.source, b: e.target, map: d.edge(i).table() })
        .collect();
    let families = compatible_families(&sizes, &constraints);
    let nodes = d.nodes();
    let k = families.len();
    if k == 0 {
        return Err(Error::InvalidLattice("the diagram has no compatible families".into()));
    }
    let leq: Vec<Vec<bool>> =
        par::map_range(k, |i| (0..k).map(|j| LimitLattice::family_leq(nodes, &families[i], &families[j])).collect());
    let rows = par::map_range(k, |i| {
        (0..k)
            .map(|j| {
                let lower: Vec<usize> = (0..k).filter(|&x| leq[x][i] && leq[x][j]).collect();
                lower.iter().copied().find(|&x| lower.iter().all(|&y| leq[y][x]))
            })
            .collect::<Vec<_>>()
    });
    let mut meet = Vec::with_capacity(k * k);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, m) in row.into_iter().enumerate() {
            meet.push(m.ok_or_else(|| Error::InvalidLattice(format!("families {i} and {j} have no meet")))?);
        }
    }
    Ok(LimitLattice { lattice: MeetSemilattice::from_table(k, meet)?, families })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Shape;

    fn chain(n: usize) -> MeetSemilattice {
        let meet = (0..n * n).map(|i| (i / n).min(i % n)).collect();
        MeetSemilattice::from_table(n, meet).unwrap()
    }

    #[test]
    fn table_validation() {
        assert!(MeetSemilattice::from_table(2, vec![0, 0, 0, 1]).is_ok());
        assert!(MeetSemilattice::from_table(2, vec![0, 1, 0, 1]).is_err());
        assert!(MeetSemilattice::from_table(2, vec![0, 0, 0]).is_err());
    }

    #[test]
    fn powerset_basics() {
        let p = MeetSemilattice::powerset(2).unwrap();
        assert_eq!(p.size(), 4);
        assert_eq!(p.meet(0b01, 0b11), 0b01);
        assert_eq!(p.top(), 3);
        assert_eq!(p.bottom(), Some(0));
    }

    #[test]
    fn single_node_limit() {
        let l = chain(3);
        let d = ShapedDiagram::new(Shape::point(), vec![l.clone()], vec![], Variance::Contravariant).unwrap();
        let lim = limit_semilattice(&d).unwrap();
        assert_eq!(lim.lattice.size(), 3);
        assert_eq!(lim.families, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn discrete_limit_is_product() {
        let d = ShapedDiagram::new(
            Shape::from_pairs(2, &[]).unwrap(),
            vec![chain(2), chain(3)],
            vec![],
            Variance::Contravariant,
        )
        .unwrap();
        assert_eq!(limit_semilattice(&d).unwrap().lattice.size(), 6);
    }

    #[test]
    fn edge_constrains_families() {
        // s₀ = f(s₁) with f collapsing the 3-chain onto the 2-chain.
        let (a, b) = (chain(2), chain(3));
        let f = LatticeMap::new(&b, &a, vec![0, 1, 1]).unwrap();
        let d = ShapedDiagram::new(Shape::from_pairs(2, &[(0, 1)]).unwrap(), vec![a, b], vec![f], Variance::Contravariant)
            .unwrap();
        let lim = limit_semilattice(&d).unwrap();
        assert_eq!(lim.families, vec![vec![0, 0], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn bijection_propagates_backwards() {
        let p = MeetSemilattice::powerset(2).unwrap();
        let swap = LatticeMap::new(&p, &p, vec![0, 2, 1, 3]).unwrap();
        // A self-loop by the swap leaves the swap-fixed subsets.
        let d = ShapedDiagram::new(Shape::from_pairs(1, &[(0, 0)]).unwrap(), vec![p], vec![swap], Variance::Contravariant)
            .unwrap();
        assert_eq!(limit_semilattice(&d).unwrap().families, vec![vec![0], vec![3]]);
    }
}
