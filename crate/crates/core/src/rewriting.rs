use std::collections::BTreeMap;
use std::fmt;

use crate::canon::{canonicalize, canonicalize_with_map, unravel_to_depth, CanonicalTermGraph, Term};
use crate::error::{Error, Result, RuleViolation};
use crate::graph::{node_at, Label, NodeId, Position, Signature, TermGraph};
use crate::hom::{find_delta_hom_at, Delta, NodeMap};
use crate::metric::{limit_of_sequence, MetricLimit};
use crate::order::{liminf, ApproxResult, SequenceProvider};
use crate::text::Document;

/// A term graph rule: one graph over symbols and variables with a left-hand
/// and a right-hand root. The stored graph's root is the left-hand root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    name: String,
    graph: TermGraph,
    lhs: NodeId,
    rhs: NodeId,
}

impl Rule {
    pub fn new(name: &str, graph: TermGraph, lhs: NodeId, rhs: NodeId) -> Self {
        let graph = TermGraph::new(graph.labels().to_vec(), graph.successors().to_vec(), lhs);
        Rule { name: name.to_string(), graph, lhs, rhs }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &TermGraph {
        &self.graph
    }

    pub fn lhs(&self) -> NodeId {
        self.lhs
    }

    pub fn rhs(&self) -> NodeId {
        self.rhs
    }

    /// Membership in the left-hand side (nodes reachable from its root).
    pub fn lhs_nodes(&self) -> Vec<bool> {
        self.graph.reachable_from(self.lhs)
    }

    pub fn lhs_graph(&self) -> TermGraph {
        self.graph.subgraph(self.lhs).0
    }

    pub fn rhs_graph(&self) -> TermGraph {
        self.graph.subgraph(self.rhs).0
    }
}

pub fn validate_rule(rule: &Rule, sig: &Signature) -> std::result::Result<(), Vec<RuleViolation>> {
    let g = rule.graph();
    let mut errs = Vec::new();
    for n in g.nodes() {
        for (i, &m) in g.succ(n).iter().enumerate() {
            if !g.contains(m) {
                errs.push(RuleViolation::DanglingSuccessor { node: n, index: i });
            }
        }
    }
    if !errs.is_empty() || !g.contains(rule.lhs) || !g.contains(rule.rhs) {
        return Err(errs);
    }
    let mut vars: BTreeMap<&str, usize> = BTreeMap::new();
    for n in g.nodes() {
        match g.label(n) {
            Label::Bot => errs.push(RuleViolation::BottomInRule(n)),
            Label::Var(v) => {
                *vars.entry(v).or_default() += 1;
                if !g.succ(n).is_empty() {
                    errs.push(RuleViolation::ArityMismatch(n));
                }
            }
            Label::Sym(s) => match sig.arity(g.label(n)) {
                None => {
                    let e = RuleViolation::UndeclaredSymbol(s.to_string());
                    if !errs.contains(&e) {
                        errs.push(e);
                    }
                }
                Some(k) if k != g.succ(n).len() => errs.push(RuleViolation::ArityMismatch(n)),
                Some(_) => {}
            },
        }
    }
    if g.label(rule.lhs).is_var() {
        errs.push(RuleViolation::VariableAtLhsRoot);
    }
    for (v, k) in &vars {
        if *k > 1 {
            errs.push(RuleViolation::DuplicateVariableNode(v.to_string()));
        }
    }
    let in_lhs = rule.lhs_nodes();
    let in_rhs = g.reachable_from(rule.rhs);
    for n in g.nodes() {
        if !in_lhs[n] && !in_rhs[n] {
            errs.push(RuleViolation::UnreachableNode(n));
        } else if let Label::Var(v) = g.label(n) {
            if !in_lhs[n] {
                errs.push(RuleViolation::VariableNotInLhs(v.to_string()));
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// A signature with an ordered list of validated rules.
#[derive(Clone, Debug)]
pub struct Grs {
    signature: Signature,
    rules: Vec<Rule>,
}

impl Grs {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Self> {
        for r in &rules {
            validate_rule(r, &signature)
                .map_err(|errors| Error::InvalidRule { rule: r.name().to_string(), errors })?;
        }
        Ok(Grs { signature, rules })
    }

    /// The named system of a document, over the document's signature.
    pub fn from_document(doc: &Document, system: &str) -> Result<Self> {
        let names = doc.system(system).ok_or_else(|| Error::UnknownSystem(system.to_string()))?;
        let rules = names
            .iter()
            .map(|n| doc.rule(n).cloned().ok_or_else(|| Error::UnknownRule(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        Grs::new(doc.effective_signature(), rules)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name() == name)
    }
}

/// The matching V-homomorphism from the rule's left-hand side into the
/// sub-term graph of `g` at `n`.
pub fn match_rule(rule: &Rule, g: &TermGraph, n: NodeId) -> Option<NodeMap> {
    if !g.contains(n) {
        return None;
    }
    find_delta_hom_at(rule.graph(), rule.lhs(), g, n, &Delta::variables())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub node: NodeId,
    pub position: Position,
    pub rule: usize,
}

/// Every applicable (node, rule) pair in leftmost-outermost order: nodes
/// by left-to-right depth-first preorder from the root, then rule order.
/// Each redex carries the path on which the traversal first reached it.
pub fn find_redexes(grs: &Grs, g: &TermGraph) -> Vec<Redex> {
    redexes(grs, g).collect()
}

fn preorder(g: &TermGraph) -> Vec<(NodeId, Position)> {
    let mut seen = vec![false; g.len()];
    let mut out = Vec::with_capacity(g.len());
    let mut stack = vec![(g.root(), Position::root())];
    while let Some((n, p)) = stack.pop() {
        if seen[n] {
            continue;
        }
        seen[n] = true;
        for (i, &m) in g.succ(n).iter().enumerate().rev() {
            if !seen[m] {
                stack.push((m, p.child(i)));
            }
        }
        out.push((n, p));
    }
    out
}

fn redexes<'a>(grs: &'a Grs, g: &'a TermGraph) -> impl Iterator<Item = Redex> + 'a {
    preorder(g).into_iter().flat_map(move |(n, p)| {
        grs.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| match_rule(r, g, n).is_some())
            .map(move |(k, _)| Redex { node: n, position: p.clone(), rule: k })
    })
}

/// The raw outcome of applying a rule: `result` is the graph `g₃` and
/// `result_node` the node `n'` inside it.
#[derive(Clone, Debug)]
pub struct PreReductionStep {
    pub source: TermGraph,
    pub redex: NodeId,
    pub rule: String,
    pub result_node: NodeId,
    pub result: TermGraph,
}

/// Applies `rule` at node `n` of `g`.
///
/// The rule nodes outside the left-hand side are copied in with fresh ids,
/// their edges into the left-hand side following the match; then every edge
/// into `n` is redirected to `n'` (the image or copy of the right-hand root),
/// the root moves to `n'` if it was `n`, and unreachable nodes are dropped.
pub fn apply_rule(g: &TermGraph, n: NodeId, rule: &Rule) -> Result<PreReductionStep> {
    let not_applicable = || Error::NotApplicable { rule: rule.name().to_string(), node: n };
    let phi = match_rule(rule, g, n).ok_or_else(not_applicable)?;
    let rg = rule.graph();
    let in_lhs = rule.lhs_nodes();
    let mut copy = vec![usize::MAX; rg.len()];
    let mut fresh = g.len();
    for m in rg.nodes().filter(|&m| !in_lhs[m]) {
        copy[m] = fresh;
        fresh += 1;
    }
    let target = |m: NodeId| if in_lhs[m] { phi.apply(m) } else { copy[m] };

    // g1
    let mut labels = g.labels().to_vec();
    let mut succ = g.successors().to_vec();
    for m in rg.nodes().filter(|&m| !in_lhs[m]) {
        labels.push(rg.label(m).clone());
        succ.push(rg.succ(m).iter().map(|&s| target(s)).collect());
    }
    // g2
    let n_prime = target(rule.rhs());
    for s in succ.iter_mut().flatten() {
        if *s == n {
            *s = n_prime;
        }
    }
    // g3
    let root = if n == g.root() { n_prime } else { g.root() };
    let (result, old) = TermGraph::new(labels, succ, root).subgraph(root);
    let result_node = old.iter().position(|&o| o == n_prime).expect("n' is reachable");
    Ok(PreReductionStep { source: g.clone(), redex: n, rule: rule.name().to_string(), result_node, result })
}

/// A canonicalised pre-reduction step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub source: CanonicalTermGraph,
    pub redex: NodeId,
    pub rule: String,
    pub result_node: NodeId,
    pub target: CanonicalTermGraph,
}

pub fn step(g: &TermGraph, n: NodeId, rule: &Rule) -> Result<ReductionStep> {
    let (source, smap) = canonicalize_with_map(g);
    let pre = apply_rule(g, n, rule)?;
    let (target, tmap) = canonicalize_with_map(&pre.result);
    Ok(ReductionStep {
        source,
        redex: smap[n],
        rule: pre.rule,
        result_node: tmap[pre.result_node],
        target,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// First redex in left-to-right depth-first preorder; first matching rule.
    LeftmostOutermost,
    /// Explicit (position, rule name) steps.
    Script(Vec<(Position, String)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    NormalForm,
    StepCap,
    ScriptEnd,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::NormalForm => "normal form",
            Termination::StepCap => "step cap",
            Termination::ScriptEnd => "end of script",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub start: CanonicalTermGraph,
    pub steps: Vec<ReductionStep>,
    pub strategy: Strategy,
    pub termination: Termination,
}

impl ReductionTrace {
    /// The start graph followed by every step's target.
    pub fn graphs(&self) -> Vec<CanonicalTermGraph> {
        std::iter::once(self.start.clone()).chain(self.steps.iter().map(|s| s.target.clone())).collect()
    }

    /// The graph sequence to analyse.
    ///
    /// A trace that ended in a normal form is a closed sequence. Otherwise it
    /// is periodic when `period` says so (the last `period` graphs repeat),
    /// or when a leftmost-outermost trace revisits a graph (the strategy is
    /// deterministic, so the trace cycles from there); else it is a window.
    pub fn sequence(&self, period: Option<usize>) -> SequenceProvider {
        let gs: Vec<TermGraph> = self.graphs().into_iter().map(CanonicalTermGraph::into_graph).collect();
        if self.termination == Termination::NormalForm {
            return SequenceProvider::Finite(gs);
        }
        if let Some(p) = period.filter(|&p| p >= 1 && p <= gs.len()) {
            let k = gs.len() - p;
            return SequenceProvider::Periodic { prefix: gs[..k].to_vec(), period: gs[k..].to_vec() };
        }
        if self.strategy == Strategy::LeftmostOutermost {
            for j in 1..gs.len() {
                if let Some(k) = (0..j).find(|&k| gs[k] == gs[j]) {
                    return SequenceProvider::Periodic { prefix: gs[..k].to_vec(), period: gs[k..j].to_vec() };
                }
            }
        }
        SequenceProvider::Window(gs)
    }
}

/// Runs up to `max_steps` steps from `g`.
pub fn run(grs: &Grs, g: &TermGraph, strategy: &Strategy, max_steps: usize) -> Result<ReductionTrace> {
    let start = canonicalize(g);
    let mut cur = start.clone();
    let mut steps = Vec::new();
    let termination = loop {
        let next = match strategy {
            Strategy::LeftmostOutermost => match redexes(grs, &cur).next() {
                None => break Termination::NormalForm,
                Some(r) => (r.node, &grs.rules[r.rule]),
            },
            Strategy::Script(script) => match script.get(steps.len()) {
                None => break Termination::ScriptEnd,
                Some((pos, name)) => {
                    let rule = grs.rule(name).ok_or_else(|| Error::UnknownRule(name.clone()))?;
                    let mismatch =
                        || Error::ScriptMismatch { step: steps.len(), rule: name.clone(), position: pos.clone() };
                    let n = node_at(&cur, pos).map_err(|_| mismatch())?;
                    if match_rule(rule, &cur, n).is_none() {
                        return Err(mismatch());
                    }
                    (n, rule)
                }
            },
        };
        if steps.len() >= max_steps {
            break Termination::StepCap;
        }
        let s = step(&cur, next.0, next.1)?;
        cur = s.target.clone();
        steps.push(s);
    };
    Ok(ReductionTrace { start, steps, strategy: strategy.clone(), termination })
}

/// Metric convergence of a reduction's graph sequence.
pub fn analyze_m_convergence(seq: &SequenceProvider, depth_goal: usize) -> Result<MetricLimit> {
    limit_of_sequence(seq, depth_goal)
}

/// Partial order convergence: the limit inferior of the graph sequence.
pub fn analyze_p_convergence(seq: &SequenceProvider, depth_goal: usize) -> Result<ApproxResult> {
    liminf(seq, depth_goal)
}

/// The unravelled term rule, cut at depth `d` on both sides.
pub fn unravel_rule(rule: &Rule, d: usize) -> (Term, Term) {
    (unravel_to_depth(&rule.lhs_graph(), d), unravel_to_depth(&rule.rhs_graph(), d))
}
