//! JSON file formats.
//!
//! * algebra: `{"blocks": [2, 3]}`
//! * hom: `{"multiplicity": [[1, 1]], "unital": true, "codomain": {...}, "assignment": [...]}`,
//!   where `codomain` may be omitted for unital homs and `assignment` lists
//!   the slots `{"block", "copy", "offset"}` of every codomain block
//! * abelian diagram: `{"nodes": [{"id", "generators", "relations"}], "edges": [{"id", "source", "target", "matrix"}]}`,
//!   where row `g` of `matrix` is the image of source generator `g`
//! * lattice diagram: `{"nodes": [{"id", "powerset"} | {"id", "meet"}], "edges": [{"id", "source", "target", "map"}]}`,
//!   where the map of an edge `a → b` goes from the lattice of `b` to the
//!   lattice of `a`
//! * partial ideal: `{"algebra", "spec", "choices": [{"generators", "atoms"}], "fill"}`
//!
//! Integers may be JSON numbers or decimal strings.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::Value;

use crate::abelian::{parse_int, parse_int_rows, AbDiagram, AbHom, IntMatrix, PresentedAbGroup, Word};
use crate::algebra::{AlgebraElement, MultiMatrixAlgebra, Slot, StarHom};
use crate::diagram::{Shape, ShapeEdge, ShapedDiagram, Variance};
use crate::error::{Error, Result};
use crate::ideals::PartialIdeal;
use crate::ktheory::{build_subdiagram, SubdiagramSpec};
use crate::lattice::{LatticeMap, MeetSemilattice};
use crate::subalgebra::span_subalgebra;

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

fn decode<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    blocks: Vec<usize>,
}

pub fn algebra_from_value(v: Value) -> Result<MultiMatrixAlgebra> {
    let f: AlgebraFile = decode(v, "algebra")?;
    MultiMatrixAlgebra::new(f.blocks)
}

pub fn parse_algebra(text: &str) -> Result<MultiMatrixAlgebra> {
    algebra_from_value(parse_value(text)?)
}

pub fn algebra_to_json(a: &MultiMatrixAlgebra) -> Value {
    serde_json::json!({ "blocks": a.blocks() })
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomFile {
    multiplicity: Vec<Vec<usize>>,
    #[serde(default = "yes")]
    unital: bool,
    codomain: Option<Value>,
    assignment: Option<Vec<Vec<Slot>>>,
}

/// A hom out of `domain`.
pub fn parse_hom(domain: &MultiMatrixAlgebra, text: &str) -> Result<StarHom> {
    let f: HomFile = decode(parse_value(text)?, "hom")?;
    let codomain = match f.codomain {
        Some(c) => algebra_from_value(c)?,
        None if f.unital => {
            let blocks = f
                .multiplicity
                .iter()
                .map(|row| row.iter().zip(domain.blocks()).map(|(m, n)| m * n).sum())
                .collect();
            MultiMatrixAlgebra::new(blocks)?
        }
        None => return Err(Error::Parse("hom: a non-unital hom needs an explicit codomain".into())),
    };
    match f.assignment {
        Some(slots) => StarHom::with_assignment(domain, &codomain, f.multiplicity, f.unital, slots),
        None => StarHom::new(domain, &codomain, f.multiplicity, f.unital),
    }
}

pub fn hom_to_json(phi: &StarHom) -> Value {
    serde_json::json!({
        "multiplicity": phi.multiplicity(),
        "unital": phi.is_unital(),
        "codomain": algebra_to_json(phi.codomain()),
        "assignment": phi.assignment(),
    })
}

pub fn parse_spec(text: &str) -> Result<SubdiagramSpec> {
    SubdiagramSpec::from_json(&parse_value(text)?)
}

/// An integer matrix, either a bare array of rows or `{"matrix": rows}`.
pub fn parse_int_matrix(text: &str) -> Result<IntMatrix> {
    let v = parse_value(text)?;
    let rows = match v {
        Value::Object(mut m) => m.remove("matrix").ok_or_else(|| Error::Parse("expected a 'matrix' field".into()))?,
        other => other,
    };
    IntMatrix::from_rows(parse_int_rows(&rows)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AbNodeFile {
    id: String,
    generators: usize,
    #[serde(default)]
    relations: Vec<Vec<Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile<T> {
    id: Option<String>,
    source: String,
    target: String,
    #[serde(flatten)]
    payload: T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AbEdgePayload {
    matrix: Vec<Vec<Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramFile<N, E> {
    nodes: Vec<N>,
    #[serde(default = "Vec::new")]
    edges: Vec<EdgeFile<E>>,
}

fn build_shape<E>(ids: Vec<String>, edges: &[EdgeFile<E>]) -> Result<Shape> {
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let lookup = |e: usize, id: &str| {
        index.get(id).copied().ok_or_else(|| Error::Parse(format!("edge {e}: unknown node '{id}'")))
    };
    let shape_edges = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Ok(ShapeEdge {
                id: e.id.clone().unwrap_or_else(|| format!("e{i}")),
                source: lookup(i, &e.source)?,
                target: lookup(i, &e.target)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Shape::new(ids, shape_edges)
}

fn int_row(row: &[Value], len: usize, what: &str) -> Result<Vec<BigInt>> {
    if row.len() != len {
        return Err(Error::Parse(format!("{what}: expected {len} entries, found {}", row.len())));
    }
    row.iter().map(parse_int).collect()
}

pub fn parse_ab_diagram(text: &str) -> Result<AbDiagram> {
    let f: DiagramFile<AbNodeFile, AbEdgePayload> = decode(parse_value(text)?, "abelian diagram")?;
    let mut groups = Vec::with_capacity(f.nodes.len());
    for n in &f.nodes {
        let relations = n
            .relations
            .iter()
            .enumerate()
            .map(|(r, row)| Ok(Word::from_dense(&int_row(row, n.generators, &format!("node '{}' relation {r}", n.id))?)))
            .collect::<Result<Vec<_>>>()?;
        groups.push(Arc::new(PresentedAbGroup::new(n.generators, relations)?));
    }
    let shape = build_shape(f.nodes.iter().map(|n| n.id.clone()).collect(), &f.edges)?;
    let homs = shape
        .edges()
        .iter()
        .zip(&f.edges)
        .map(|(e, file)| {
            let (src, tgt) = (&groups[e.source], &groups[e.target]);
            if file.payload.matrix.len() != src.ngens() {
                return Err(Error::Parse(format!(
                    "edge '{}': {} rows for {} source generators",
                    e.id,
                    file.payload.matrix.len(),
                    src.ngens()
                )));
            }
            let images = file
                .payload
                .matrix
                .iter()
                .map(|row| Ok(Word::from_dense(&int_row(row, tgt.ngens(), &format!("edge '{}'", e.id))?)))
                .collect::<Result<Vec<_>>>()?;
            AbHom::new(Arc::clone(src), Arc::clone(tgt), images).map_err(|err| match err {
                Error::NotWellDefined { relation } => Error::Parse(format!(
                    "edge '{}' sends relation {relation} of '{}' to a nonzero element",
                    e.id,
                    shape.node_ids()[e.source]
                )),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AbDiagram::new(shape, groups, homs, Variance::Covariant)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeNodeFile {
    id: String,
    powerset: Option<usize>,
    meet: Option<Vec<Vec<usize>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeEdgePayload {
    map: Vec<usize>,
}

pub fn parse_lattice_diagram(text: &str) -> Result<ShapedDiagram<LatticeMap>> {
    let f: DiagramFile<LatticeNodeFile, LatticeEdgePayload> = decode(parse_value(text)?, "lattice diagram")?;
    let lattices = f
        .nodes
        .iter()
        .map(|n| match (&n.powerset, &n.meet) {
            (Some(bits), None) => MeetSemilattice::powerset(*bits),
            (None, Some(rows)) => {
                if rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(Error::Parse(format!("node '{}': the meet table must be square", n.id)));
                }
                MeetSemilattice::from_table(rows.len(), rows.concat())
            }
            _ => Err(Error::Parse(format!("node '{}': give exactly one of 'powerset' and 'meet'", n.id))),
        })
        .collect::<Result<Vec<_>>>()?;
    let shape = build_shape(f.nodes.iter().map(|n| n.id.clone()).collect(), &f.edges)?;
    let maps = shape
        .edges()
        .iter()
        .zip(&f.edges)
        .map(|(e, file)| LatticeMap::new(&lattices[e.target], &lattices[e.source], file.payload.map.clone()))
        .collect::<Result<Vec<_>>>()?;
    ShapedDiagram::new(shape, lattices, maps, Variance::Contravariant)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiceFile {
    generators: Vec<Value>,
    atoms: Vec<Value>,
}

#[derive(Deserialize, Default, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "lowercase")]
pub enum Fill {
    /// Nodes without a choice get the zero ideal.
    #[default]
    Empty,
    /// Nodes without a choice get `I_V ∩ U` from an inclusion `U ⊆ V`
    /// into a node that has one.
    Derived,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialIdealFile {
    algebra: Value,
    #[serde(default)]
    spec: Option<Value>,
    choices: Vec<ChoiceFile>,
    #[serde(default)]
    fill: Fill,
}

pub fn parse_partial_ideal(text: &str) -> Result<PartialIdeal> {
    let f: PartialIdealFile = decode(parse_value(text)?, "partial ideal")?;
    let a = algebra_from_value(f.algebra)?;
    let spec = match f.spec {
        Some(v) => SubdiagramSpec::from_json(&v)?,
        None => SubdiagramSpec::default(),
    };
    let sub = Arc::new(build_subdiagram(&a, &spec)?);
    let mut given: Vec<Option<Vec<usize>>> = vec![None; sub.num_nodes()];
    for (c, choice) in f.choices.iter().enumerate() {
        let gens = choice
            .generators
            .iter()
            .map(|g| AlgebraElement::from_json(&a, g))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(format!("choice {c}: {e}")))?;
        let u = span_subalgebra(&a, &gens).map_err(|e| Error::Parse(format!("choice {c}: {e}")))?;
        let node = sub
            .node_of(&u)
            .ok_or_else(|| Error::Parse(format!("choice {c}: the subalgebra {u} is not a node of the subdiagram")))?;
        let atoms = choice
            .atoms
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let p = AlgebraElement::from_json(&a, v).map_err(|e| Error::Parse(format!("choice {c} atom {k}: {e}")))?;
                sub.node(node)
                    .atoms()
                    .iter()
                    .position(|q| q == &p)
                    .ok_or_else(|| Error::Parse(format!("choice {c} atom {k} is not an atom of its subalgebra")))
            })
            .collect::<Result<Vec<_>>>()?;
        if given[node].replace(atoms).is_some() {
            return Err(Error::Parse(format!("choice {c}: node {node} is chosen twice")));
        }
    }
    match f.fill {
        Fill::Empty => PartialIdeal::new(Arc::clone(&sub), given.into_iter().map(Option::unwrap_or_default).collect()),
        Fill::Derived => PartialIdeal::derived(sub, given),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::colimit;

    #[test]
    fn algebra_and_hom() {
        let a = parse_algebra(r#"{"blocks": [2, 3]}"#).unwrap();
        assert_eq!(a.blocks(), &[2, 3]);
        assert!(parse_algebra(r#"{"blocks": [0]}"#).is_err());
        assert!(parse_algebra(r#"{"blocks": [1], "extra": 1}"#).is_err());
        let phi = parse_hom(&a, r#"{"multiplicity": [[1, 1]]}"#).unwrap();
        assert_eq!(phi.codomain().blocks(), &[5]);
        let back = parse_hom(&a, &hom_to_json(&phi).to_string()).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn pushout_file() {
        let text = r#"{
            "nodes": [{"id": "a", "generators": 1}, {"id": "b", "generators": 1}, {"id": "c", "generators": 1}],
            "edges": [{"source": "a", "target": "b", "matrix": [[2]]}, {"source": "a", "target": "c", "matrix": [["2"]]}]
        }"#;
        let d = parse_ab_diagram(text).unwrap();
        assert_eq!(colimit(&d).unwrap().group.canonical_string(), "Z ⊕ Z/2");
    }

    #[test]
    fn ill_defined_edge_is_located() {
        let text = r#"{
            "nodes": [{"id": "a", "generators": 1, "relations": [[2]]}, {"id": "b", "generators": 1}],
            "edges": [{"id": "u", "source": "a", "target": "b", "matrix": [[1]]}]
        }"#;
        let err = parse_ab_diagram(text).unwrap_err().to_string();
        assert!(err.contains("edge 'u'"), "{err}");
    }

    #[test]
    fn lattice_file() {
        let text = r#"{"nodes": [{"id": "x", "powerset": 1}, {"id": "y", "meet": [[0, 0], [0, 1]]}],
                       "edges": [{"source": "x", "target": "y", "map": [0, 1]}]}"#;
        let d = parse_lattice_diagram(text).unwrap();
        assert_eq!(crate::lattice::limit_semilattice(&d).unwrap().lattice.size(), 2);
    }

    #[test]
    fn partial_ideal_file() {
        let text = r#"{"algebra": {"blocks": [2]}, "spec": {"pythagorean": false},
            "choices": [{"generators": [[[["1", "0"], ["0", "0"]]]], "atoms": [[[["1", "0"], ["0", "0"]]]]}]}"#;
        let p = parse_partial_ideal(text).unwrap();
        assert!(p.is_compatible());
        assert!(!p.is_rotation_fixed());
    }
}
