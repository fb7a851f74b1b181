//! `tg`: command-line access to the term graph library.
//!
//! Exit codes: 0 success, 1 negative answer, 2 usage or input error,
//! 3 internal size limit.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tg_core::dot::{graph_to_dot, rule_to_dot};
use tg_core::hom::{find_delta_hom, is_rigid};
use tg_core::order::{enumerate_canonical, SequenceProvider};
use tg_core::{
    analyze_m_convergence, analyze_p_convergence, canonicalize, distance, glb, is_isomorphic, leq_rigid, leq_simple,
    liminf, lub_compatible, run, similarity, truncate, unravel_eq, unravel_to_depth, ApproxResult, Delta, Depth,
    Document, Error, Grs, Label, MetricLimit, Position, Signature, Strategy, TermGraph,
};

#[derive(Parser)]
#[command(name = "tg", version, about = "Term graphs: order, metric, limits and rewriting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Graph arguments are `FILE` (first graph in the file) or `FILE#NAME`.
#[derive(Subcommand)]
enum Command {
    /// Print a graph in canonical form
    Canon { graph: String },
    /// Are two graphs isomorphic?
    Iso { a: String, b: String },
    /// Find a Δ-homomorphism from A to B
    Hom {
        a: String,
        b: String,
        /// Comma-separated Δ labels (`_|_`, `$x`, symbols)
        #[arg(long, default_value = "")]
        delta: String,
    },
    /// Is the Δ-homomorphism from A to B rigid? (Δ defaults to ⊥)
    Rigid {
        a: String,
        b: String,
        #[arg(long, default_value = "_|_")]
        delta: String,
    },
    /// Is A below B in the rigid order?
    Leq {
        a: String,
        b: String,
        /// Use the simple order (any ⊥-homomorphism)
        #[arg(long)]
        simple: bool,
    },
    /// Greatest lower bound of one or more graphs
    Glb {
        #[arg(required = true)]
        graphs: Vec<String>,
    },
    /// Least upper bound of two compatible graphs
    Lub { a: String, b: String },
    /// Rigid truncation
    Trunc {
        graph: String,
        #[arg(short = 'd', long)]
        depth: usize,
    },
    /// Rigid distance, `0` or `2^-k`
    Dist { a: String, b: String },
    /// Rigid similarity, a number or `omega`
    Sim { a: String, b: String },
    /// Unravel to a term tree cut at depth D
    Unravel {
        graph: String,
        #[arg(short = 'd', long)]
        depth: usize,
    },
    /// Do two graphs unravel to the same term?
    Uneq { a: String, b: String },
    /// Limit inferior of a sequence of graphs
    Liminf {
        /// Graphs in order; a single file contributes all of its graphs
        #[arg(required = true)]
        graphs: Vec<String>,
        /// The last P graphs repeat forever
        #[arg(long)]
        period: Option<usize>,
        /// Treat the graphs as a closed sequence
        #[arg(long, conflicts_with = "period")]
        finite: bool,
        /// Depth to which the answer should be exact
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Rewrite a graph
    Rewrite {
        /// File with rules and systems, optionally `FILE#SYSTEM`
        system: String,
        graph: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
        strategy: StrategyArg,
        /// Script steps `POS:RULE`, with POS like `0.1` or `root`
        #[arg(long, value_delimiter = ',')]
        script: Vec<String>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Analyse convergence of the trace
        #[arg(long, value_enum)]
        analyze: Option<Mode>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Treat the last P graphs of the trace as repeating
        #[arg(long)]
        period: Option<usize>,
    },
    /// Enumerate canonical graphs up to a node count
    Enum {
        #[arg(long)]
        max_nodes: usize,
        /// Signature as `f/2,a/0`
        #[arg(long, default_value = "f/2,a/0")]
        sig: String,
        /// Include ⊥ nodes
        #[arg(long)]
        bot: bool,
    },
    /// Graphviz output for a graph, or a rule with `FILE#RULE`
    Dot { item: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Leftmost,
    Script,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    M,
    P,
}

enum Failure {
    Negative(String),
    Input(String),
    Limit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeLimit { .. } => Failure::Limit(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Out = Result<String, Failure>;

fn read_doc(path: &str) -> Result<Document, Failure> {
    let src = std::fs::read_to_string(PathBuf::from(path)).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Document::parse(&src).map_err(|e| Failure::Input(format!("{path}:{e}")))
}

fn split(arg: &str) -> (&str, Option<&str>) {
    match arg.rsplit_once('#') {
        Some((p, n)) => (p, Some(n)),
        None => (arg, None),
    }
}

struct Input {
    doc: Document,
    name: String,
    graph: TermGraph,
}

fn load(arg: &str) -> Result<Input, Failure> {
    let (path, name) = split(arg);
    let doc = read_doc(path)?;
    let (name, graph) = match name {
        Some(n) => doc.graph(n).map(|g| (n.to_string(), g.clone())),
        None => doc.graphs.first().cloned(),
    }
    .ok_or_else(|| Failure::Input(format!("{arg}: no such graph")))?;
    if let Err(v) = tg_core::validate(&graph, &doc.effective_signature()) {
        return Err(Failure::Input(format!("{arg}: invalid graph: {v:?}")));
    }
    Ok(Input { doc, name, graph })
}

fn merged_signature(inputs: &[&Input]) -> Signature {
    let mut sig = Signature::new();
    for i in inputs {
        for (s, a) in i.doc.effective_signature().symbols() {
            let _ = sig.declare(s, a);
        }
    }
    sig
}

fn show(name: &str, g: &TermGraph, inputs: &[&Input]) -> String {
    let doc = Document {
        signature: merged_signature(inputs),
        graphs: vec![(name.to_string(), canonicalize(g).into_graph())],
        ..Document::default()
    };
    doc.serialize()
}

fn verdict(yes: bool, what: &str) -> Out {
    if yes {
        Ok("true\n".into())
    } else {
        Err(Failure::Negative(format!("false: {what}")))
    }
}

fn parse_delta(spec: &str) -> Delta {
    Delta::from_labels(spec.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| match s {
        "_|_" => Label::Bot,
        v if v.starts_with('$') => Label::var(&v[1..]),
        sym => Label::sym(sym),
    }))
}

fn parse_sig(spec: &str) -> Result<Signature, Failure> {
    let mut sig = Signature::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, arity) = item.split_once('/').ok_or_else(|| Failure::Input(format!("bad symbol `{item}`")))?;
        let arity = arity.parse().map_err(|_| Failure::Input(format!("bad arity in `{item}`")))?;
        sig.declare(name, arity).map_err(Failure::Input)?;
    }
    Ok(sig)
}

fn parse_position(s: &str) -> Result<Position, Failure> {
    let s = s.trim().trim_start_matches('<').trim_end_matches('>');
    if s.is_empty() || s == "root" {
        return Ok(Position::root());
    }
    s.split(['.', ','])
        .map(|x| x.trim().parse().map_err(|_| Failure::Input(format!("bad position `{s}`"))))
        .collect::<Result<_, _>>()
        .map(Position)
}

fn approx(name: &str, r: &ApproxResult, inputs: &[&Input]) -> String {
    let mut out = format!("# {}: {}\n", r.exactness, r.evidence);
    out.push_str(&show(name, &r.graph, inputs));
    out
}

fn execute(cmd: Command) -> Out {
    match cmd {
        Command::Canon { graph } => {
            let g = load(&graph)?;
            Ok(show(&g.name, &g.graph, &[&g]))
        }
        Command::Iso { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            verdict(is_isomorphic(&a.graph, &b.graph), "not isomorphic")
        }
        Command::Hom { a, b, delta } => {
            let (a, b) = (load(&a)?, load(&b)?);
            match find_delta_hom(&a.graph, &b.graph, &parse_delta(&delta)) {
                Some(phi) => Ok(render_map(&a.graph, &b.graph, &phi)),
                None => Err(Failure::Negative("no homomorphism".into())),
            }
        }
        Command::Rigid { a, b, delta } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let phi = find_delta_hom(&a.graph, &b.graph, &parse_delta(&delta))
                .ok_or_else(|| Failure::Negative("no homomorphism".into()))?;
            verdict(is_rigid(&phi, &a.graph, &b.graph)?, "homomorphism is not rigid")
        }
        Command::Leq { a, b, simple } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let yes = if simple { leq_simple(&a.graph, &b.graph) } else { leq_rigid(&a.graph, &b.graph)? };
            verdict(yes, "not below")
        }
        Command::Glb { graphs } => {
            let inputs = graphs.iter().map(|g| load(g)).collect::<Result<Vec<_>, _>>()?;
            let m = glb(&inputs.iter().map(|i| &i.graph).collect::<Vec<_>>())?;
            Ok(show("glb", &m, &inputs.iter().collect::<Vec<_>>()))
        }
        Command::Lub { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            match lub_compatible(&a.graph, &b.graph) {
                Ok(l) => Ok(show("lub", &l, &[&a, &b])),
                Err(Error::Incompatible(why)) => Err(Failure::Negative(format!("incompatible: {why}"))),
                Err(e) => Err(e.into()),
            }
        }
        Command::Trunc { graph, depth } => {
            let g = load(&graph)?;
            let t = truncate(&g.graph, Depth::Finite(depth))?;
            Ok(show(&g.name, &t, &[&g]))
        }
        Command::Dist { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            Ok(format!("{}\n", distance(&a.graph, &b.graph)?))
        }
        Command::Sim { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            Ok(format!("{}\n", similarity(&a.graph, &b.graph)?))
        }
        Command::Unravel { graph, depth } => {
            let g = load(&graph)?;
            Ok(format!("{}\n", unravel_to_depth(&g.graph, depth)))
        }
        Command::Uneq { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            verdict(unravel_eq(&a.graph, &b.graph), "unravellings differ")
        }
        Command::Liminf { graphs, period, finite, depth } => {
            let mut inputs = Vec::new();
            let mut seq = Vec::new();
            if let [single] = graphs.as_slice() {
                if split(single).1.is_none() {
                    let doc = read_doc(single)?;
                    for (n, g) in &doc.graphs {
                        seq.push(g.clone());
                        inputs.push(Input { doc: doc.clone(), name: n.clone(), graph: g.clone() });
                    }
                }
            }
            if seq.is_empty() {
                for g in &graphs {
                    let i = load(g)?;
                    seq.push(i.graph.clone());
                    inputs.push(i);
                }
            }
            let provider = sequence(seq, period, finite)?;
            let r = liminf(&provider, depth)?;
            Ok(approx("liminf", &r, &inputs.iter().collect::<Vec<_>>()))
        }
        Command::Rewrite { system, graph, strategy, script, steps, analyze, depth, period } => {
            rewrite(&system, &graph, strategy, &script, steps, analyze, depth, period)
        }
        Command::Enum { max_nodes, sig, bot } => {
            let sig = parse_sig(&sig)?;
            let graphs = enumerate_canonical(&sig, max_nodes, bot)?;
            let doc = Document {
                signature: sig,
                graphs: graphs.into_iter().enumerate().map(|(i, g)| (format!("g{i}"), g.into_graph())).collect(),
                ..Document::default()
            };
            Ok(doc.serialize())
        }
        Command::Dot { item } => {
            let (path, name) = split(&item);
            let doc = read_doc(path)?;
            if let Some(r) = name.and_then(|n| doc.rule(n)) {
                return Ok(rule_to_dot(r));
            }
            let g = load(&item)?;
            Ok(graph_to_dot(&g.name, &g.graph))
        }
    }
}

fn sequence(seq: Vec<TermGraph>, period: Option<usize>, finite: bool) -> Result<SequenceProvider, Failure> {
    if seq.is_empty() {
        return Err(Failure::Input("empty sequence".into()));
    }
    Ok(match period {
        Some(p) if p == 0 || p > seq.len() => return Err(Failure::Input(format!("period {p} out of range"))),
        Some(p) => {
            let k = seq.len() - p;
            SequenceProvider::Periodic { prefix: seq[..k].to_vec(), period: seq[k..].to_vec() }
        }
        None if finite => SequenceProvider::Finite(seq),
        None => SequenceProvider::Window(seq),
    })
}

fn render_map(g: &TermGraph, h: &TermGraph, phi: &tg_core::NodeMap) -> String {
    let (pg, ph) = (g.min_positions(), h.min_positions());
    let mut out = String::new();
    for (n, m) in phi.entries() {
        let _ = writeln!(out, "{} -> {}", pg[n], ph[m]);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn rewrite(
    system: &str,
    graph: &str,
    strategy: StrategyArg,
    script: &[String],
    steps: usize,
    analyze: Option<Mode>,
    depth: usize,
    period: Option<usize>,
) -> Out {
    let (path, name) = split(system);
    let rules = read_doc(path)?;
    let grs = match name.or_else(|| rules.systems.first().map(|(n, _)| n.as_str())) {
        Some(n) => Grs::from_document(&rules, n)?,
        None => Grs::new(rules.effective_signature(), rules.rules.clone())?,
    };
    let g = load(graph)?;
    let strategy = match strategy {
        StrategyArg::Leftmost => Strategy::LeftmostOutermost,
        StrategyArg::Script => Strategy::Script(
            script
                .iter()
                .map(|s| {
                    let (pos, rule) = s.rsplit_once(':').ok_or_else(|| Failure::Input(format!("bad script step `{s}`")))?;
                    Ok((parse_position(pos)?, rule.trim().to_string()))
                })
                .collect::<Result<_, Failure>>()?,
        ),
    };
    let trace = run(&grs, &g.graph, &strategy, steps)?;
    let mut out = String::new();
    let inputs = [&g];
    for (i, s) in trace.steps.iter().enumerate() {
        let pos = s.source.min_positions()[s.redex].clone();
        let _ = writeln!(out, "# step {}: {} at {pos}", i + 1, s.rule);
    }
    let _ = writeln!(out, "# stopped: {} after {} steps", trace.termination, trace.steps.len());
    let seq = trace.sequence(period);
    match analyze {
        None => {
            let last = trace.steps.last().map_or(&trace.start, |s| &s.target);
            out.push_str(&show(&g.name, last, &inputs));
        }
        Some(Mode::P) => out.push_str(&approx("limit", &analyze_p_convergence(&seq, depth)?, &inputs)),
        Some(Mode::M) => match analyze_m_convergence(&seq, depth)? {
            MetricLimit::Limit(r) => out.push_str(&approx("limit", &r, &inputs)),
            MetricLimit::NotCauchy { witness, evidence } => {
                print!("{out}");
                return Err(Failure::Negative(format!("not Cauchy at {witness}: {evidence}")));
            }
        },
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
