//! Acceptance criteria C1 to C8. Every check is exact; the only numeric
//! limits are the wall-clock budgets below.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use nc_spectrum::abelian::{colimit, colimit_induced, element_eq, snf, AbDiagram, AbHom, PresentedAbGroup};
use nc_spectrum::algebra::{AlgebraElement, InnerAutomorphism, MultiMatrixAlgebra};
use nc_spectrum::diagram::{compose_morphisms, Variance};
use nc_spectrum::gen;
use nc_spectrum::ideals::verify_conjecture1;
use nc_spectrum::ktheory::{
    eta, k0_standard, k_tilde_f_nonunital, terminal_injection, verify_naturality_square, SubdiagramSpec,
};
use nc_spectrum::subalgebra::{rotate_subalgebra, spectrum_of_inclusion, CommSubalgebra};

const SEED: u64 = 20_240_601;
const C1_CASE_LIMIT: Duration = Duration::from_secs(10);
const C2_SUITE_LIMIT: Duration = Duration::from_secs(60);
const C2_MORPHISMS: usize = 50;
const C2_MAX_DIMENSION: usize = 6;
const C2_STABILIZATION: usize = 2;
const C5_SUITE_LIMIT: Duration = Duration::from_secs(60);
const C5_DIAGRAMS: usize = 100;
const C5_TEST_MODULI: [i64; 2] = [2, 3];
const C6_MATRICES: usize = 100;
const C6_MAX_SIZE: usize = 6;
const C6_ENTRY_BOUND: i64 = 10;
const C7_CASE_LIMIT: Duration = Duration::from_secs(30);
const C8_CHAINS: usize = 100;

const C1_BLOCKS: [&[usize]; 7] = [&[1], &[2], &[3], &[1, 1], &[2, 3], &[1, 2, 2], &[1, 1, 1, 1]];
const C7_BLOCKS: [&[usize]; 4] = [&[2], &[1, 1], &[2, 3], &[1, 2, 2]];

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn alg(blocks: &[usize]) -> MultiMatrixAlgebra {
    MultiMatrixAlgebra::new(blocks.to_vec()).expect("valid blocks")
}

fn c1_unital() -> Outcome {
    let spec = SubdiagramSpec::default();
    let mut slowest = Duration::ZERO;
    for blocks in C1_BLOCKS {
        for m in [1, 2] {
            let a = alg(blocks);
            let start = Instant::now();
            let e = eta(&a, &spec, m).map_err(|err| format!("{blocks:?} m={m}: {err}"))?;
            let factors = e.target.group().invariant_factors();
            let standard = k0_standard(&a).group.invariant_factors();
            if factors != standard || !factors.torsion.is_empty() || factors.free_rank != a.num_blocks() {
                return Err(format!("{blocks:?} m={m}: K̃_f = {factors}, K₀ = {standard}"));
            }
            let t = start.elapsed();
            if t >= C1_CASE_LIMIT {
                return Err(format!("{blocks:?} m={m}: {t:?} exceeds {C1_CASE_LIMIT:?}"));
            }
            slowest = slowest.max(t);
        }
    }
    Ok(format!("14 cases, slowest {slowest:.2?}"))
}

fn c2_naturality() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(SEED);
    let spec = SubdiagramSpec::default();
    for k in 0..C2_MORPHISMS {
        let phi = gen::random_unital_hom(&mut rng, C2_MAX_DIMENSION);
        let r = verify_naturality_square(&phi, &spec, C2_STABILIZATION)
            .map_err(|e| format!("morphism {k} ({:?}): {e}", phi.multiplicity()))?;
        if !r.holds {
            return Err(format!("morphism {k}: legs differ on generator {:?}", r.witness));
        }
        // Both legs again, compared coordinatewise with element_eq.
        let (eta_a, eta_b, induced) =
            nc_spectrum::ktheory::induced_on_colimits(&phi, &spec, C2_STABILIZATION).map_err(|e| e.to_string())?;
        let left = nc_spectrum::ktheory::k0_standard_hom(&phi).compose(&eta_b.hom).map_err(|e| e.to_string())?;
        let right = eta_a.hom.compose(&induced).map_err(|e| e.to_string())?;
        let g = eta_b.target.group();
        for (i, (x, y)) in left.images().iter().zip(right.images()).enumerate() {
            let n = g.ngens();
            if !element_eq(g, &x.to_dense(n), &y.to_dense(n)).map_err(|e| e.to_string())? {
                return Err(format!("morphism {k}: element_eq fails on generator {i}"));
            }
        }
    }
    let t = start.elapsed();
    if t >= C2_SUITE_LIMIT {
        return Err(format!("suite took {t:?}, limit {C2_SUITE_LIMIT:?}"));
    }
    Ok(format!("{C2_MORPHISMS} morphisms, m={C2_STABILIZATION}, {t:.2?}"))
}

fn c3_nonunital() -> Outcome {
    let spec = SubdiagramSpec::default();
    for blocks in C1_BLOCKS {
        for m in [1, 2] {
            let a = alg(blocks);
            let k = k_tilde_f_nonunital(&a, &spec, m).map_err(|e| format!("{blocks:?} m={m}: {e}"))?;
            let factors = k.kernel.group.invariant_factors();
            if factors != k0_standard(&a).group.invariant_factors() {
                return Err(format!("{blocks:?} m={m}: kernel is {factors}"));
            }
            // The block classes must form a basis of the kernel.
            let standard = Arc::new(PresentedAbGroup::free(a.num_blocks()));
            let basis = AbHom::new(standard, Arc::clone(&k.kernel.group), k.kernel.block_classes.clone())
                .map_err(|e| e.to_string())?;
            if !basis.is_isomorphism() {
                return Err(format!("{blocks:?} m={m}: block classes do not form a basis"));
            }
        }
    }
    Ok("14 cases".into())
}

fn c4_commutative() -> Outcome {
    for n in 1..=6 {
        let r = terminal_injection(&alg(&vec![1; n]), &SubdiagramSpec::default()).map_err(|e| e.to_string())?;
        let expected = if n == 1 { "Z".to_string() } else { format!("Z^{n}") };
        if !r.injection_is_isomorphism || r.colimit != expected {
            return Err(format!("C^{n}: colimit {} injection iso {}", r.colimit, r.injection_is_isomorphism));
        }
    }
    Ok("n = 1..6".into())
}

/// Homs `G → ℤ/n` as value vectors on the generators.
fn homs_to_cyclic(g: &PresentedAbGroup, n: i64) -> Vec<Vec<i64>> {
    let k = g.ngens();
    let mut out = Vec::new();
    let total = (n as usize).pow(k as u32);
    for code in 0..total {
        let v: Vec<i64> = (0..k).map(|i| (code / (n as usize).pow(i as u32)) as i64 % n).collect();
        let ok = g.relations().iter().all(|r| {
            let s: BigInt = r.terms().iter().map(|(gen, c)| c * BigInt::from(v[*gen])).sum();
            s.mod_floor(&BigInt::from(n)).is_zero()
        });
        if ok {
            out.push(v);
        }
    }
    out
}

fn cocones(d: &AbDiagram, n: i64) -> Vec<Vec<Vec<i64>>> {
    let options: Vec<Vec<Vec<i64>>> = d.nodes().iter().map(|g| homs_to_cyclic(g, n)).collect();
    let mut out = Vec::new();
    let mut current: Vec<Vec<i64>> = Vec::new();
    fn go(d: &AbDiagram, n: i64, options: &[Vec<Vec<i64>>], current: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        let a = current.len();
        if a == options.len() {
            out.push(current.clone());
            return;
        }
        for v in &options[a] {
            current.push(v.clone());
            let consistent = d.shape().edges().iter().enumerate().all(|(i, e)| {
                if e.source.max(e.target) != a {
                    return true;
                }
                let (vs, vt) = (&current[e.source], &current[e.target]);
                d.edge(i).images().iter().enumerate().all(|(g, w)| {
                    let s: BigInt = w.terms().iter().map(|(k, c)| c * BigInt::from(vt[*k])).sum();
                    (s - vs[g]).mod_floor(&BigInt::from(n)).is_zero()
                })
            });
            if consistent {
                go(d, n, options, current, out);
            }
            current.pop();
        }
    }
    go(d, n, &options, &mut current, &mut out);
    out
}

fn hom_count(g: &PresentedAbGroup, n: i64) -> BigInt {
    let f = g.invariant_factors();
    let mut count = BigInt::from(n).pow(f.free_rank as u32);
    for d in &f.torsion {
        count *= d.gcd(&BigInt::from(n));
    }
    count
}

fn c5_colimits() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(SEED + 5);
    let mut cocone_total = 0usize;
    for k in 0..C5_DIAGRAMS {
        let d = gen::random_ab_diagram(&mut rng, 4, 3, 6);
        let c = colimit(&d).map_err(|e| e.to_string())?;
        for n in C5_TEST_MODULI {
            let target = Arc::new(PresentedAbGroup::cyclic_sum(&[n]));
            let all = cocones(&d, n);
            cocone_total += all.len();
            for cocone in &all {
                let images = cocone.iter().flatten().map(|&x| nc_spectrum::abelian::Word::from_i64(&[x])).collect();
                let h = AbHom::new(Arc::clone(&c.group), Arc::clone(&target), images)
                    .map_err(|e| format!("diagram {k}: cocone into Z/{n} does not factor: {e}"))?;
                for (a, kappa) in c.injections.iter().enumerate() {
                    let leg = kappa.compose(&h).map_err(|e| e.to_string())?;
                    for (g, w) in leg.images().iter().enumerate() {
                        let expected = vec![BigInt::from(cocone[a][g])];
                        if !element_eq(&target, &w.to_dense(1), &expected).map_err(|e| e.to_string())? {
                            return Err(format!("diagram {k}: factorization differs at node {a} generator {g}"));
                        }
                    }
                }
            }
            // Distinct cocones give distinct homs, and every hom restricts to
            // a cocone; equal counts make the factorization unique.
            let homs = hom_count(&c.group, n);
            if BigInt::from(all.len()) != homs {
                return Err(format!("diagram {k}: {} cocones into Z/{n} but {homs} homs from the colimit", all.len()));
            }
        }
        let (sub, inc) = gen::random_subdiagram(&mut rng, &d).map_err(|e| e.to_string())?;
        let scalar = gen::scalar_morphism(&d, rng.gen_range(-3..=3));
        let cs = colimit(&sub).map_err(|e| e.to_string())?;
        let first = colimit_induced(&inc, &sub, &cs, &d, &c).map_err(|e| e.to_string())?;
        let second = colimit_induced(&scalar, &d, &c, &d, &c).map_err(|e| e.to_string())?;
        let both = compose_morphisms(&inc, &scalar, Variance::Covariant).map_err(|e| e.to_string())?;
        let direct = colimit_induced(&both, &sub, &cs, &d, &c).map_err(|e| e.to_string())?;
        if !direct.equals(&first.compose(&second).map_err(|e| e.to_string())?) {
            return Err(format!("diagram {k}: colimit_induced is not functorial"));
        }
    }
    let t = start.elapsed();
    if t >= C5_SUITE_LIMIT {
        return Err(format!("suite took {t:?}, limit {C5_SUITE_LIMIT:?}"));
    }
    Ok(format!("{C5_DIAGRAMS} diagrams, {cocone_total} cocones, {t:.2?}"))
}

fn c6_snf() -> Outcome {
    let mut rng = gen::rng(SEED + 6);
    for k in 0..C6_MATRICES {
        let m = gen::random_int_matrix(&mut rng, C6_MAX_SIZE, C6_ENTRY_BOUND);
        let s = snf(&m);
        let product = s.u.mul(&m).and_then(|x| x.mul(&s.v)).map_err(|e| e.to_string())?;
        if product != s.d {
            return Err(format!("matrix {k}: U·M·V ≠ D"));
        }
        for (name, x) in [("U", &s.u), ("V", &s.v)] {
            if !x.determinant().map_err(|e| e.to_string())?.abs().is_one() {
                return Err(format!("matrix {k}: {name} is not unimodular"));
            }
        }
        for r in 0..s.d.rows() {
            for c in 0..s.d.cols() {
                if r != c && !s.d.get(r, c).is_zero() {
                    return Err(format!("matrix {k}: D has an off-diagonal entry at ({r}, {c})"));
                }
            }
        }
        let diag = s.diagonal();
        if diag.iter().any(|x| x.is_negative()) {
            return Err(format!("matrix {k}: negative diagonal entry"));
        }
        for w in diag.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            if !divides {
                return Err(format!("matrix {k}: {} does not divide {}", w[0], w[1]));
            }
        }
    }
    Ok(format!("{C6_MATRICES} matrices up to {C6_MAX_SIZE}x{C6_MAX_SIZE}, entries in [-{C6_ENTRY_BOUND}, {C6_ENTRY_BOUND}]"))
}

fn c7_ideals() -> Outcome {
    let spec = SubdiagramSpec::default();
    let mut slowest = Duration::ZERO;
    for blocks in C7_BLOCKS {
        let a = alg(blocks);
        let start = Instant::now();
        let r = verify_conjecture1(&a, &spec).map_err(|e| format!("{blocks:?}: {e}"))?;
        let expected = 1usize << a.num_blocks();
        if !r.lattice_isomorphic {
            return Err(format!("{blocks:?}: {}", r.lattice_witness.unwrap_or_default()));
        }
        if !r.round_trip_bijection {
            return Err(format!("{blocks:?}: {}", r.round_trip_witness.unwrap_or_default()));
        }
        if r.t_tilde_size != expected || r.fixed_partial_ideals != expected {
            return Err(format!("{blocks:?}: {} limit families, {} partial ideals", r.t_tilde_size, r.fixed_partial_ideals));
        }
        let t = start.elapsed();
        if t >= C7_CASE_LIMIT {
            return Err(format!("{blocks:?}: {t:?} exceeds {C7_CASE_LIMIT:?}"));
        }
        slowest = slowest.max(t);
    }
    Ok(format!("4 algebras, slowest {slowest:.2?}"))
}

fn random_rotation(a: &MultiMatrixAlgebra, rng: &mut impl Rng) -> InnerAutomorphism {
    let mut u = AlgebraElement::identity(a);
    for _ in 0..3 {
        let b = rng.gen_range(0..a.num_blocks());
        let n = a.blocks()[b];
        if n < 2 {
            continue;
        }
        let step = if rng.gen_bool(0.5) {
            InnerAutomorphism::pythagorean(a, b).expect("block of size two or more")
        } else {
            InnerAutomorphism::transposition(a, b, rng.gen_range(0..n), rng.gen_range(0..n)).expect("in range")
        };
        u = u.mul(step.unitary()).expect("same algebra");
    }
    InnerAutomorphism::new(u).expect("products of unitaries are unitary")
}

fn c8_spectrum() -> Outcome {
    let mut rng = gen::rng(SEED + 8);
    for k in 0..C8_CHAINS {
        let a = alg(C1_BLOCKS[k % C1_BLOCKS.len()]);
        let alpha = random_rotation(&a, &mut rng);
        let chain = gen::random_partition_chain(&mut rng, a.coordinates(), 3);
        let subs: Vec<CommSubalgebra> = chain
            .iter()
            .rev()
            .map(|p| {
                let u = CommSubalgebra::from_partition(&a, p)?;
                Ok(rotate_subalgebra(&alpha, &u)?.0)
            })
            .collect::<nc_spectrum::Result<_>>()
            .map_err(|e| e.to_string())?;
        for (i, u) in subs.iter().enumerate() {
            let mut sum = AlgebraElement::zero(&a);
            for (x, p) in u.atoms().iter().enumerate() {
                sum = sum.add(p).map_err(|e| e.to_string())?;
                for (y, q) in u.atoms().iter().enumerate() {
                    let pq = p.mul(q).map_err(|e| e.to_string())?;
                    let expected = if x == y { p.clone() } else { AlgebraElement::zero(&a) };
                    if pq != expected {
                        return Err(format!("chain {k} level {i}: atoms {x}, {y} are not orthogonal idempotents"));
                    }
                }
            }
            if !sum.is_identity() {
                return Err(format!("chain {k} level {i}: atoms do not sum to 1"));
            }
        }
        let (u, v, w) = (&subs[0], &subs[1], &subs[2]);
        let q = spectrum_of_inclusion(u, v).map_err(|e| e.to_string())?;
        for p in 0..u.len() {
            let total = q
                .preimage(p)
                .into_iter()
                .try_fold(AlgebraElement::zero(&a), |s, x| s.add(v.atom(x)))
                .map_err(|e| e.to_string())?;
            if &total != u.atom(p) {
                return Err(format!("chain {k}: preimage sum differs at point {p}"));
            }
        }
        let direct = spectrum_of_inclusion(u, w).map_err(|e| e.to_string())?;
        let composite = spectrum_of_inclusion(v, w).and_then(|r| r.compose(&q)).map_err(|e| e.to_string())?;
        if direct != composite {
            return Err(format!("chain {k}: Σ(U ⊆ W) differs from the composite"));
        }
    }
    Ok(format!("{C8_CHAINS} rotated chains of length 3"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("C1", "K̃_f agrees with K₀ and η inverts (unital)", c1_unital),
        ("C2", "naturality square", c2_naturality),
        ("C3", "non-unital kernel construction", c3_nonunital),
        ("C4", "commutative terminal case", c4_commutative),
        ("C5", "colimit universal property and functoriality", c5_colimits),
        ("C6", "Smith normal form", c6_snf),
        ("C7", "ideal lattice and partial ideals", c7_ideals),
        ("C8", "spectrum structural suite", c8_spectrum),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        match check() {
            Ok(detail) => println!("{id} PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
