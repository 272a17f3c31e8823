use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use raag_vcd::autos::{build_generator_set, GeneratorChoices, GeneratorSet};
use raag_vcd::bounds::{report_from_structure, BoundResult, Witness};
use raag_vcd::ideal::{
    build_complex, morse_collapse_certificate, reduced_homology, HalfEdgeSet, TieOrder,
};
use raag_vcd::psigma::{outer_rank, psigma_generators, psigma_vcd, PsigmaSpec};
use raag_vcd::verify::run_suite;
use raag_vcd::{parse_graph, DefiningGraph, Structure, VcdReport};

const EXIT_PARSE: u8 = 1;
const EXIT_INELIGIBLE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(name = "raag-vcd", version, about = "VCD bounds for Out(A_Γ) of triangle-free graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bounds, theorem tags and structure of a graph file
    Analyze {
        path: PathBuf,
        #[arg(long)]
        json: bool,
        /// Build the commuting generator set G(e0,T0) with certificates
        #[arg(long)]
        witness: bool,
        /// Base edge e0 as `A,B`
        #[arg(long, requires = "witness", value_name = "A,B")]
        e0: Option<String>,
        /// Maximum conjugator length in innerness searches
        #[arg(long, requires = "witness", default_value_t = 4)]
        bound: usize,
    },
    /// VCD, generators and outer rank for PΣ(n,k)
    Psigma {
        n: usize,
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Legal ideal edges at a vertex with r cycle pairs and s other half-edges
    IdealComplex {
        r: usize,
        s: usize,
        /// Use every ideal edge (B(v)) instead of the legal ones
        #[arg(long)]
        full: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant suite over the generated corpus
    Verify {
        #[arg(long, default_value_t = 9)]
        max_nodes: usize,
        #[arg(long)]
        json: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
    payload: Option<Value>,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            message: message.into(),
            payload: None,
        }
    }
}

type Outcome = Result<(String, Value, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    let json = match &cli.command {
        Command::Analyze { json, .. }
        | Command::Psigma { json, .. }
        | Command::IdealComplex { json, .. }
        | Command::Verify { json, .. } => *json,
    };
    let outcome = match cli.command {
        Command::Analyze {
            path,
            witness,
            e0,
            bound,
            ..
        } => analyze(&path, witness, e0.as_deref(), bound),
        Command::Psigma { n, k, .. } => psigma(n, k),
        Command::IdealComplex { r, s, full, .. } => ideal_complex(r, s, full),
        Command::Verify { max_nodes, .. } => verify(max_nodes),
    };
    match outcome {
        Ok((text, value, code)) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
            } else {
                print!("{text}");
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some(p) = f.payload {
                if json {
                    println!("{}", serde_json::to_string_pretty(&p).expect("serializable"));
                } else {
                    eprintln!("{}", serde_json::to_string_pretty(&p).expect("serializable"));
                }
            }
            ExitCode::from(f.code)
        }
    }
}

fn witness_text(w: &Option<Witness>) -> String {
    match w {
        Some(Witness::Node(v)) => format!(", witness {v}"),
        Some(Witness::Edge(a, b)) => format!(", witness {a}-{b}"),
        None => String::new(),
    }
}

fn bound_line(label: &str, b: &BoundResult) -> String {
    let case = serde_json::to_value(b.case).expect("serializable");
    format!(
        "{label}: {} [{}{}]\n",
        b.value,
        case.as_str().unwrap_or_default(),
        witness_text(&b.witness)
    )
}

fn report_text(r: &VcdReport) -> String {
    let c = &r.counts;
    let mut out = format!(
        "nodes {}, edges {}, leaves {}, pieces {}, chi {}\n",
        c.nodes, c.edges, c.leaves, c.pieces, c.euler_characteristic
    );
    out += &format!("gamma0: {}\n", r.gamma0.join(" "));
    out += &format!("hubs: {}\n", r.hubs.join(" "));
    out += &bound_line("lower bound", &r.lower);
    out += &bound_line("upper bound", &r.upper);
    if !r.upper.terms.is_empty() {
        let terms: Vec<String> = r.upper.terms.iter().map(|t| format!("{}:{}", t.node, t.term)).collect();
        out += &format!("  terms: {}\n", terms.join(" "));
    }
    match r.exact {
        Some(v) => out += &format!("vcd = {v}\n"),
        None => out += &format!("{} <= vcd <= {}\n", r.lower.value, r.upper.value),
    }
    let tags: Vec<String> = r.theorems.iter().map(ToString::to_string).collect();
    out += &format!("theorems: {}\n", if tags.is_empty() { "none".into() } else { tags.join(", ") });
    for a in &r.anomalies {
        out += &format!("anomaly: {}\n", serde_json::to_string(a).expect("serializable"));
    }
    out
}

fn witness_set(g: &DefiningGraph, s: &Structure, e0: Option<&str>, bound: usize) -> Result<GeneratorSet, Failure> {
    let choices = match e0 {
        Some(spec) => {
            let (a, b) = spec
                .split_once(',')
                .ok_or_else(|| Failure::parse(format!("--e0 expects A,B, got `{spec}`")))?;
            let node = |n: &str| {
                g.node(n.trim())
                    .ok_or_else(|| Failure::parse(format!("unknown node `{}` in --e0", n.trim())))
            };
            GeneratorChoices::new(g, s, (node(a)?, node(b)?), None)
        }
        None => GeneratorChoices::default_for(g, s),
    }
    .map_err(|e| Failure::parse(e.to_string()))?;
    let mut gs = build_generator_set(g, s, choices).map_err(|e| Failure {
        code: EXIT_INVARIANT,
        message: e.to_string(),
        payload: None,
    })?;
    gs.certify(bound, 1);
    Ok(gs)
}

fn generator_text(gs: &GeneratorSet) -> String {
    let g = gs.raag.graph();
    let (v0, w0) = gs.choices.e0;
    let mut out = format!("generators (e0 = {}-{}):\n", g.name(v0), g.name(w0));
    for (i, gen) in gs.generators.iter().enumerate() {
        out += &format!("  [{i}] {}\n", gen.kind.describe(g));
    }
    out += &format!(
        "commutators certified: {}/{}\n",
        gs.certificates.len() - gs.uncertified_pairs(),
        gs.certificates.len()
    );
    if let Some(l) = &gs.inner_lattice {
        out += &format!(
            "inner lattice rank {}{}, outer rank {}\n",
            l.rank,
            if l.partial { " (partial search)" } else { "" },
            gs.count() - l.rank
        );
    }
    out
}

fn analyze(path: &PathBuf, witness: bool, e0: Option<&str>, bound: usize) -> Outcome {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let g = parse_graph(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let s = Structure::analyze(&g).map_err(|e| Failure {
        code: EXIT_INELIGIBLE,
        message: "graph is not eligible (needs connected, triangle-free, not a star)".into(),
        payload: Some(json!({ "validation": e.0 })),
    })?;
    let report = report_from_structure(&g, &s);
    let mut value = serde_json::to_value(&report).expect("serializable");
    let mut out = report_text(&report);
    let mut code = if report.anomalies.is_empty() { 0 } else { EXIT_INVARIANT };
    if witness {
        let gs = witness_set(&g, &s, e0, bound)?;
        if gs.uncertified_pairs() > 0 {
            code = EXIT_INVARIANT;
        }
        out += &generator_text(&gs);
        value["generator_set"] = gs.to_json();
    }
    Ok((out, value, code))
}

fn psigma(n: usize, k: usize) -> Outcome {
    let spec = PsigmaSpec::new(n, k).map_err(|e| Failure::parse(e.to_string()))?;
    let vcd = psigma_vcd(n, k).map_err(|e| Failure::parse(e.to_string()))?;
    let mut out = format!("PSigma({n},{k}): vcd = {vcd}\n");
    let mut value = json!({ "n": n, "k": k, "vcd": vcd });
    if k == 0 {
        out += "no generator family for k = 0\n";
        value["generators"] = Value::Null;
        value["outer_rank"] = Value::Null;
        return Ok((out, value, 0));
    }
    let gens = psigma_generators(n, k).map_err(|e| Failure::parse(e.to_string()))?;
    let rank = outer_rank(&spec).map_err(|e| Failure::parse(e.to_string()))?;
    out += &format!("generators: {}\n", gens.len());
    let mut listed = Vec::new();
    for gen in &gens {
        let images = gen.auto.format_images();
        let moved: Vec<String> = images
            .iter()
            .filter(|(x, w)| x != w)
            .map(|(x, w)| format!("{x} -> {w}"))
            .collect();
        out += &format!("  {}: {}\n", gen.name, moved.join(", "));
        listed.push(json!({ "name": gen.name, "images": images }));
    }
    out += &format!("outer rank: {rank}\n");
    value["generators"] = Value::Array(listed);
    value["outer_rank"] = json!(rank);
    let code = if rank == vcd { 0 } else { EXIT_INVARIANT };
    Ok((out, value, code))
}

fn ideal_complex(r: usize, s: usize, full: bool) -> Outcome {
    let h = HalfEdgeSet::new(r, s).map_err(|e| Failure::parse(e.to_string()))?;
    let c = build_complex(&h, !full).map_err(|e| Failure::parse(e.to_string()))?;
    let label = if full { "B" } else { "L" };
    let mut out = format!(
        "{label}({r},{s}): {} vertices, f-vector {:?}\n",
        c.vertices.len(),
        c.f_vector()
    );
    let mut code = 0;
    let homology = match reduced_homology(&c) {
        Ok(hom) => {
            if hom.trivial {
                out += "homology-trivial\n";
            } else {
                out += &format!("reduced Betti {:?}, torsion {:?}\n", hom.reduced_betti, hom.torsion);
            }
            Some(hom)
        }
        Err(e) => {
            out += &format!("homology skipped: {e}\n");
            None
        }
    };
    let mut value = c.to_json(homology.as_ref());
    if !full && r >= 2 {
        let cert = morse_collapse_certificate(&c, TieOrder::Lexicographic)
            .map_err(|e| Failure::parse(e.to_string()))?;
        if cert.certified {
            out += "certified: collapses onto the base star\n";
        } else {
            out += &format!("not certified: {}\n", cert.failure.clone().unwrap_or_default());
            code = EXIT_INVARIANT;
        }
        if homology.as_ref().is_some_and(|h| !h.trivial) {
            code = EXIT_INVARIANT;
        }
        value["certificate"] = serde_json::to_value(&cert).expect("serializable");
    }
    Ok((out, value, code))
}

fn verify(max_nodes: usize) -> Outcome {
    let report = run_suite(max_nodes);
    let mut out = format!("corpus: {} graphs (trees up to {} nodes)\n", report.graphs, max_nodes);
    for c in &report.checks {
        out += &format!(
            "{} {} ({} cases)\n",
            if c.passed() { "ok  " } else { "FAIL" },
            c.name,
            c.cases
        );
        for f in c.failures.iter().take(5) {
            out += &format!("     {f}\n");
        }
    }
    let code = if report.passed() { 0 } else { EXIT_INVARIANT };
    Ok((out, serde_json::to_value(&report).expect("serializable"), code))
}
