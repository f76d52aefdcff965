use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nc_spectrum::abelian::{colimit, snf, PresentedAbGroup, Word};
use nc_spectrum::algebra::MultiMatrixAlgebra;
use nc_spectrum::ideals::{reconstruct_total, verify_conjecture1, Reconstruction};
use nc_spectrum::io;
use nc_spectrum::ktheory::{eta, k0_standard, verify_naturality_square, SubdiagramSpec};
use nc_spectrum::lattice::limit_semilattice;
use nc_spectrum::{gen, Error};

const SEED_ENV: &str = "NC_SPECTRUM_SEED";
const DEFAULT_SEED: u64 = 0;

/// Exact K-theory, colimits, limits and ideal lattices of finite-dimensional
/// C*-algebras.
///
/// Every input may be a path to a JSON file or the JSON text itself. Exit
/// status is 0 on success, 1 when an input fails to parse or validate, and 2
/// when a verification fails (a witness is printed).
#[derive(Parser, Debug)]
#[command(name = "nc-spectrum", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for randomized checks. The NC_SPECTRUM_SEED environment variable
    /// takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    /// Rank vectors: `ℤ^k` on the blocks.
    Standard,
    /// The colimit of K over the subdiagram of commutative subalgebras.
    Diagram,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// K₀ of an algebra, with the class of a rank-one projection per block.
    K0 {
        /// Algebra, e.g. '{"blocks": [2, 3]}'.
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum, default_value_t = Method::Standard)]
        method: Method,
        /// Matrix size m of the stabilization A ⊗ M_m.
        #[arg(long, default_value_t = 1)]
        stabilize: usize,
        /// Subdiagram spec (diagram method only).
        #[arg(long)]
        spec: Option<String>,
    },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Colimit of a diagram of finitely presented abelian groups.
    Colimit {
        #[arg(long)]
        diagram: String,
    },
    /// Limit of a contravariant diagram of finite meet-semilattices.
    Limit {
        #[arg(long)]
        diagram: String,
    },
    /// Total ideals, the limit of closed-set lattices, and partial ideals.
    Ideals {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        spec: Option<String>,
    },
    /// Partial ideal tools.
    PartialIdeal {
        #[command(subcommand)]
        what: PartialIdealCommand,
    },
    /// Smith normal form D = U·M·V of an integer matrix.
    Snf {
        /// Rows as a JSON array, or '{"matrix": rows}'.
        #[arg(long)]
        matrix: String,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// The naturality square η_B ∘ K₀(φ) = K̃_f(φ ⊗ id) ∘ η_A for a unital hom
    /// given by --algebra and --hom, or for --random seeded homs.
    Theorem1 {
        #[arg(long, requires = "hom")]
        algebra: Option<String>,
        /// Hom out of the algebra, e.g. '{"multiplicity": [[2]]}'.
        #[arg(long, requires = "algebra")]
        hom: Option<String>,
        /// Number of random unital homs between algebras with Σnᵢ² ≤ 6.
        #[arg(long, conflicts_with = "hom")]
        random: Option<usize>,
        #[arg(long, default_value_t = 2)]
        stabilize: usize,
        #[arg(long)]
        spec: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum PartialIdealCommand {
    /// Compatibility, rotation-fixedness and reconstruction of a total ideal.
    Check {
        #[arg(long)]
        file: String,
    },
}

/// A finished command: machine output, human output, verdict.
struct Report {
    json: Value,
    text: String,
    passed: bool,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, passed: true }
    }
}

fn load(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}"))
    }
}

fn load_spec(arg: &Option<String>) -> Result<SubdiagramSpec> {
    match arg {
        Some(s) => io::parse_spec(&load(s)?).with_context(|| format!("spec {s}")),
        None => Ok(SubdiagramSpec::default()),
    }
}

fn load_algebra(arg: &str) -> Result<MultiMatrixAlgebra> {
    io::parse_algebra(&load(arg)?).with_context(|| format!("algebra {arg}"))
}

fn seed(cli: &Cli) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{SEED_ENV}={v} is not an unsigned integer")),
        Err(_) => Ok(cli.seed.unwrap_or(DEFAULT_SEED)),
    }
}

fn coordinates(g: &PresentedAbGroup, w: &Word) -> Result<Vec<String>> {
    Ok(g.coordinates(w)?.iter().map(ToString::to_string).collect())
}

/// The cyclic summands behind the coordinates, e.g. `["Z/2", "Z"]`.
fn summands(g: &PresentedAbGroup) -> Vec<String> {
    g.normalizer()
        .moduli()
        .iter()
        .map(|d| if d == &0.into() { "Z".to_string() } else { format!("Z/{d}") })
        .collect()
}

fn tuple(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

fn k0(algebra: &str, method: Method, m: usize, spec: &Option<String>) -> Result<Report> {
    let a = load_algebra(algebra)?;
    let mut text = String::new();
    let json = match method {
        Method::Standard => {
            let k = k0_standard(&a);
            writeln!(text, "{}", k.canonical_string())?;
            let classes: Vec<Vec<String>> =
                k.block_classes.iter().map(|w| coordinates(&k.group, w)).collect::<Result<_>>()?;
            for (i, c) in classes.iter().enumerate() {
                writeln!(text, "block {i} (M{}): {}", a.blocks()[i], tuple(c))?;
            }
            json!({
                "method": "standard",
                "algebra": io::algebra_to_json(&a),
                "group": k.canonical_string(),
                "summands": summands(&k.group),
                "block_classes": classes,
            })
        }
        Method::Diagram => {
            let spec = load_spec(spec)?;
            let e = eta(&a, &spec, m)?;
            let g = e.target.group();
            writeln!(text, "{}", g.canonical_string())?;
            let classes: Vec<Vec<String>> =
                e.hom.images().iter().map(|w| coordinates(g, w)).collect::<Result<_>>()?;
            for (i, c) in classes.iter().enumerate() {
                writeln!(text, "block {i} (M{}): {}", a.blocks()[i], tuple(c))?;
            }
            writeln!(
                text,
                "subdiagram: {} nodes, {} edges, {} generators; η inverse check PASS",
                e.target.subdiagram.num_nodes(),
                e.target.subdiagram.diagram().shape().num_edges(),
                g.ngens()
            )?;
            json!({
                "method": "diagram",
                "algebra": io::algebra_to_json(&a),
                "stabilize": m,
                "spec": spec,
                "group": g.canonical_string(),
                "summands": summands(g),
                "block_classes": classes,
                "nodes": e.target.subdiagram.num_nodes(),
                "edges": e.target.subdiagram.diagram().shape().num_edges(),
                "generators": g.ngens(),
                "inverse_check": "pass",
            })
        }
    };
    Ok(Report::ok(json, text))
}

fn theorem1(
    algebra: &Option<String>,
    hom: &Option<String>,
    random: Option<usize>,
    m: usize,
    spec: &Option<String>,
    seed: u64,
) -> Result<Report> {
    let spec = load_spec(spec)?;
    let homs = match (algebra, hom, random) {
        (Some(a), Some(h), None) => {
            let a = load_algebra(a)?;
            vec![io::parse_hom(&a, &load(h)?).with_context(|| format!("hom {h}"))?]
        }
        (None, None, Some(n)) => {
            let mut rng = gen::rng(seed);
            (0..n).map(|_| gen::random_unital_hom(&mut rng, 6)).collect()
        }
        _ => anyhow::bail!(Error::Parse("give --algebra with --hom, or --random N".into())),
    };
    let mut text = String::new();
    let mut cases = Vec::new();
    let mut passed = true;
    for (k, phi) in homs.iter().enumerate() {
        let r = verify_naturality_square(phi, &spec, m)?;
        passed &= r.holds;
        let verdict = if r.holds { "PASS" } else { "FAIL" };
        write!(
            text,
            "hom {k}: {:?} -> {:?}, multiplicity {:?}: {verdict}",
            phi.domain().blocks(),
            phi.codomain().blocks(),
            phi.multiplicity()
        )?;
        if let Some(g) = r.witness {
            write!(text, " (generator {g}: {} vs {})", tuple(&r.left[g]), tuple(&r.right[g]))?;
        }
        writeln!(text)?;
        cases.push(json!({
            "hom": io::hom_to_json(phi),
            "domain": io::algebra_to_json(phi.domain()),
            "holds": r.holds,
            "witness": r.witness,
            "left": r.left,
            "right": r.right,
        }));
    }
    writeln!(text, "naturality square: {}", if passed { "PASS" } else { "FAIL" })?;
    let json = json!({
        "stabilize": m,
        "spec": spec,
        "seed": random.map(|_| seed),
        "passed": passed,
        "cases": cases,
    });
    Ok(Report { json, text, passed })
}

fn colimit_cmd(diagram: &str) -> Result<Report> {
    let d = io::parse_ab_diagram(&load(diagram)?).with_context(|| format!("diagram {diagram}"))?;
    let c = colimit(&d)?;
    let g = &c.group;
    let mut text = format!("{}\n", g.canonical_string());
    let mut injections = serde_json::Map::new();
    for (a, kappa) in c.injections.iter().enumerate() {
        let id = &d.shape().node_ids()[a];
        let rows: Vec<Vec<String>> = kappa.images().iter().map(|w| coordinates(g, w)).collect::<Result<_>>()?;
        for (k, r) in rows.iter().enumerate() {
            writeln!(text, "{id}.{k} -> {}", tuple(r))?;
        }
        injections.insert(id.clone(), json!(rows));
    }
    let f = g.invariant_factors();
    let json = json!({
        "group": g.canonical_string(),
        "invariant_factors": { "free_rank": f.free_rank, "torsion": f.torsion.iter().map(ToString::to_string).collect::<Vec<_>>() },
        "summands": summands(g),
        "generators": g.ngens(),
        "relations": g.relations().len(),
        "injections": injections,
    });
    Ok(Report::ok(json, text))
}

fn limit_cmd(diagram: &str) -> Result<Report> {
    let d = io::parse_lattice_diagram(&load(diagram)?).with_context(|| format!("diagram {diagram}"))?;
    let lim = limit_semilattice(&d)?;
    let ids = d.shape().node_ids();
    let l = &lim.lattice;
    let mut text = format!("{} elements\n", l.size());
    let families: Vec<Value> = lim
        .families
        .iter()
        .map(|f| Value::Object(ids.iter().cloned().zip(f.iter().map(|&x| json!(x))).collect()))
        .collect();
    for (i, f) in lim.families.iter().enumerate() {
        let parts: Vec<String> = ids.iter().zip(f).map(|(id, x)| format!("{id}={x}")).collect();
        writeln!(text, "{i}: {}", parts.join(" "))?;
    }
    writeln!(text, "top {}, bottom {}", l.top(), l.bottom().map_or("none".into(), |b| b.to_string()))?;
    let meet: Vec<Vec<usize>> = (0..l.size()).map(|i| (0..l.size()).map(|j| l.meet(i, j)).collect()).collect();
    let json = json!({
        "size": l.size(),
        "families": families,
        "top": l.top(),
        "bottom": l.bottom(),
        "meet": meet,
    });
    Ok(Report::ok(json, text))
}

fn ideals_cmd(algebra: &str, spec: &Option<String>) -> Result<Report> {
    let a = load_algebra(algebra)?;
    let spec = load_spec(spec)?;
    let r = verify_conjecture1(&a, &spec)?;
    let mut text = String::new();
    writeln!(text, "total ideals ({}): {}", r.total_ideals.len(), r.total_ideals.join(" "))?;
    writeln!(text, "subdiagram: {} nodes, {} edges", r.nodes, r.edges)?;
    writeln!(text, "closed-set limit: {} elements", r.t_tilde_size)?;
    let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
    write!(text, "limit ≅ ideal lattice (order-reversing): {}", verdict(r.lattice_isomorphic))?;
    if let Some(w) = &r.lattice_witness {
        write!(text, " ({w})")?;
    }
    writeln!(text)?;
    write!(
        text,
        "rotation-fixed partial ideals ({}) ↔ total ideals: {}",
        r.fixed_partial_ideals,
        verdict(r.round_trip_bijection)
    )?;
    if let Some(w) = &r.round_trip_witness {
        write!(text, " ({w})")?;
    }
    writeln!(text)?;
    if !r.excess.is_empty() {
        writeln!(text, "{} partial ideals come from no total ideal", r.excess.len())?;
    }
    let passed = r.holds();
    let mut json = serde_json::to_value(&r)?;
    json["passed"] = json!(passed);
    Ok(Report { json, text, passed })
}

fn partial_ideal_check(file: &str) -> Result<Report> {
    let p = io::parse_partial_ideal(&load(file)?).with_context(|| format!("partial ideal {file}"))?;
    let compat = p.compatibility_violation();
    let rotation = p.rotation_violation();
    let rec = reconstruct_total(&p);
    let mut text = String::new();
    let yes = |b: bool| if b { "yes" } else { "no" };
    write!(text, "compatible: {}", yes(compat.is_none()))?;
    if let Some(v) = &compat {
        write!(text, " (edge {}: node {} has {:?}, expected {:?})", v.edge, v.source, v.found, v.expected)?;
    }
    writeln!(text)?;
    write!(text, "rotation-fixed: {}", yes(rotation.is_none()))?;
    if let Some(v) = &rotation {
        write!(text, " (edge {}: node {} has {:?}, expected {:?})", v.edge, v.source, v.found, v.expected)?;
    }
    writeln!(text)?;
    let reconstruction = match &rec {
        Reconstruction::Total(i) => {
            writeln!(text, "total ideal: blocks {i}")?;
            json!({ "total_ideal": i.blocks() })
        }
        Reconstruction::Failure { candidate, node } => {
            writeln!(text, "no total ideal: candidate {candidate} restricts differently at node {node}")?;
            json!({ "candidate": candidate.blocks(), "node": node, "atoms": p.choice()[*node] })
        }
    };
    let passed = compat.is_none() && rotation.is_none() && matches!(rec, Reconstruction::Total(_));
    let json = json!({
        "nodes": p.subdiagram().num_nodes(),
        "compatible": compat.is_none(),
        "compatibility_witness": compat,
        "rotation_fixed": rotation.is_none(),
        "rotation_witness": rotation,
        "reconstruction": reconstruction,
        "passed": passed,
    });
    Ok(Report { json, text, passed })
}

fn snf_cmd(matrix: &str) -> Result<Report> {
    let m = io::parse_int_matrix(&load(matrix)?).with_context(|| format!("matrix {matrix}"))?;
    let s = snf(&m);
    let rows = |x: &nc_spectrum::abelian::IntMatrix| -> Vec<Vec<String>> {
        x.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    };
    let diagonal: Vec<String> = s.diagonal().iter().map(ToString::to_string).collect();
    let coker = PresentedAbGroup::from_matrix(m.cols(), &m)?;
    let mut text = format!("diagonal: {}\n", tuple(&diagonal));
    writeln!(text, "rank: {}", s.rank())?;
    writeln!(text, "cokernel: {}", coker.canonical_string())?;
    for (name, x) in [("U", &s.u), ("V", &s.v)] {
        let r: Vec<String> = rows(x).iter().map(|r| tuple(r)).collect();
        writeln!(text, "{name}: [{}]", r.join(", "))?;
    }
    let json = json!({
        "diagonal": diagonal,
        "rank": s.rank(),
        "cokernel": coker.canonical_string(),
        "u": rows(&s.u),
        "d": rows(&s.d),
        "v": rows(&s.v),
    });
    Ok(Report::ok(json, text))
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::K0 { algebra, method, stabilize, spec } => k0(algebra, *method, *stabilize, spec),
        Command::Verify { what: Verify::Theorem1 { algebra, hom, random, stabilize, spec } } => {
            theorem1(algebra, hom, *random, *stabilize, spec, seed(cli)?)
        }
        Command::Colimit { diagram } => colimit_cmd(diagram),
        Command::Limit { diagram } => limit_cmd(diagram),
        Command::Ideals { algebra, spec } => ideals_cmd(algebra, spec),
        Command::PartialIdeal { what: PartialIdealCommand::Check { file } } => partial_ideal_check(file),
        Command::Snf { matrix } => snf_cmd(matrix),
    }
}

/// Failures of a verification step, as opposed to bad input.
fn is_verification_failure(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(Error::InverseCheck { .. } | Error::Naturality { .. } | Error::NotInDiagram)
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("values serialize")),
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            let verification = is_verification_failure(&e);
            match cli.format {
                Format::Text => eprintln!("error: {e:#}"),
                Format::Json => {
                    let kind = if verification { "verification" } else { "validation" };
                    println!("{}", json!({ "error": format!("{e:#}"), "kind": kind, "passed": false }));
                }
            }
            ExitCode::from(if verification { 2 } else { 1 })
        }
    }
}
