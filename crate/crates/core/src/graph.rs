use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result, Violation};

pub type NodeId = usize;

/// Default bound on the node count for operations that enumerate simple paths.
pub const DEFAULT_NODE_CAP: usize = 64;

/// Hard bound on the number of acyclic positions enumerated for one graph.
pub const PATH_CAP: usize = 1 << 20;

/// The node cap, overridable through `TG_NODE_CAP`.
pub fn node_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("TG_NODE_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_NODE_CAP)
    })
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Label {
    Sym(Arc<str>),
    Var(Arc<str>),
    Bot,
}

impl Label {
    pub fn sym(name: &str) -> Label {
        Label::Sym(Arc::from(name))
    }

    pub fn var(name: &str) -> Label {
        Label::Var(Arc::from(name))
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Label::Bot)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Label::Var(_))
    }

    pub fn is_sym(&self) -> bool {
        matches!(self, Label::Sym(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Sym(s) => f.write_str(s),
            Label::Var(v) => write!(f, "${v}"),
            Label::Bot => f.write_str("_|_"),
        }
    }
}

/// A ranked alphabet. `_|_` and variables are always available with arity 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder form of [`Signature::declare`]; panics on redeclaration.
    pub fn with(mut self, name: &str, arity: usize) -> Self {
        self.declare(name, arity).expect("conflicting declaration");
        self
    }

    /// Declares a symbol. Redeclaring with the same arity is a no-op.
    pub fn declare(&mut self, name: &str, arity: usize) -> std::result::Result<(), String> {
        if name == "_|_" || name.starts_with('$') || name.is_empty() {
            return Err(format!("`{name}` cannot be declared as a symbol"));
        }
        match self.symbols.get(name) {
            Some(&a) if a != arity => Err(format!("`{name}` already declared with arity {a}")),
            _ => {
                self.symbols.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, label: &Label) -> Option<usize> {
        match label {
            Label::Sym(s) => self.symbols.get(&**s).copied(),
            Label::Var(_) | Label::Bot => Some(0),
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A path from the root, as a sequence of successor indices.
///
/// Ordered shortest first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn parent(&self) -> Option<(Position, usize)> {
        let (&last, rest) = self.0.split_last()?;
        Some((Position(rest.to_vec()), last))
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl From<&[usize]> for Position {
    fn from(v: &[usize]) -> Self {
        Position(v.to_vec())
    }
}

impl Ord for Position {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Position {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(">")
    }
}

/// A natural number or omega; omega is the top element.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Depth {
    Finite(usize),
    Omega,
}

impl Depth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(d) => Some(d),
            Depth::Omega => None,
        }
    }
}

impl From<usize> for Depth {
    fn from(d: usize) -> Self {
        Depth::Finite(d)
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Omega => f.write_str("omega"),
        }
    }
}

/// A rooted graph with labelled nodes and ordered successors.
///
/// Node ids are dense indices. Construction does not validate; see
/// [`TermGraph::check`] and [`validate`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TermGraph {
    labels: Vec<Label>,
    succ: Vec<Vec<NodeId>>,
    root: NodeId,
}

impl TermGraph {
    pub fn new(labels: Vec<Label>, succ: Vec<Vec<NodeId>>, root: NodeId) -> Self {
        assert_eq!(labels.len(), succ.len(), "labels and successor lists differ in length");
        TermGraph { labels, succ, root }
    }

    /// Builds a graph and runs the signature-free [`TermGraph::check`].
    pub fn checked(labels: Vec<Label>, succ: Vec<Vec<NodeId>>, root: NodeId) -> Result<Self> {
        let g = TermGraph::new(labels, succ, root);
        g.check().map_err(Error::Invalid)?;
        Ok(g)
    }

    /// The single-node graph `_|_`.
    pub fn bottom() -> Self {
        TermGraph::new(vec![Label::Bot], vec![vec![]], 0)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.labels.len()
    }

    pub fn label(&self, n: NodeId) -> &Label {
        &self.labels[n]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn succ(&self, n: NodeId) -> &[NodeId] {
        &self.succ[n]
    }

    pub fn successors(&self) -> &[Vec<NodeId>] {
        &self.succ
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n < self.labels.len()
    }

    pub fn is_bot(&self, n: NodeId) -> bool {
        self.labels[n].is_bot()
    }

    pub fn has_bot(&self) -> bool {
        self.labels.iter().any(Label::is_bot)
    }

    /// True iff every node has exactly one position.
    pub fn is_tree(&self) -> bool {
        let mut indeg = vec![0usize; self.len()];
        for s in &self.succ {
            for &m in s {
                indeg[m] += 1;
            }
        }
        indeg[self.root] == 0 && self.nodes().all(|n| n == self.root || indeg[n] == 1)
    }

    /// Structural checks that need no signature: successors exist, every node
    /// is reachable, `_|_` and variables are leaves, and every symbol is used
    /// with a single arity.
    pub fn check(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut errs = Vec::new();
        if !self.contains(self.root) {
            return Err(vec![Violation::DanglingRoot(self.root)]);
        }
        for n in self.nodes() {
            for (i, &m) in self.succ[n].iter().enumerate() {
                if !self.contains(m) {
                    errs.push(Violation::DanglingSuccessor { node: n, index: i });
                }
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        let mut arity: BTreeMap<&Label, usize> = BTreeMap::new();
        for n in self.nodes() {
            let l = &self.labels[n];
            let k = self.succ[n].len();
            let bad = match l {
                Label::Bot | Label::Var(_) => k != 0,
                Label::Sym(_) => *arity.entry(l).or_insert(k) != k,
            };
            if bad {
                errs.push(Violation::ArityMismatch(n));
            }
        }
        let seen = self.reachable_from(self.root);
        for n in self.nodes() {
            if !seen[n] {
                errs.push(Violation::UnreachableNode(n));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    pub(crate) fn reachable_from(&self, start: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(n) = stack.pop() {
            for &m in &self.succ[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen
    }

    /// The sub-term graph rooted at `n`, with nodes renumbered densely.
    /// Also returns the map from new ids to old ids.
    pub fn subgraph(&self, n: NodeId) -> (TermGraph, Vec<NodeId>) {
        let seen = self.reachable_from(n);
        let old: Vec<NodeId> = self.nodes().filter(|&m| seen[m]).collect();
        let mut new_id = vec![usize::MAX; self.len()];
        for (k, &m) in old.iter().enumerate() {
            new_id[m] = k;
        }
        let labels = old.iter().map(|&m| self.labels[m].clone()).collect();
        let succ = old
            .iter()
            .map(|&m| self.succ[m].iter().map(|&s| new_id[s]).collect())
            .collect();
        (TermGraph::new(labels, succ, new_id[n]), old)
    }

    /// Removes nodes unreachable from the root, renumbering densely.
    pub fn garbage_collect(&self) -> TermGraph {
        self.subgraph(self.root).0
    }

    /// Minimal (shortest, then lexicographically least) position of each node.
    pub fn min_positions(&self) -> Vec<Position> {
        let mut pos: Vec<Option<Position>> = vec![None; self.len()];
        let mut queue = VecDeque::new();
        pos[self.root] = Some(Position::root());
        queue.push_back(self.root);
        while let Some(n) = queue.pop_front() {
            let p = pos[n].clone().unwrap();
            for (i, &m) in self.succ[n].iter().enumerate() {
                if pos[m].is_none() {
                    pos[m] = Some(p.child(i));
                    queue.push_back(m);
                }
            }
        }
        pos.into_iter().map(|p| p.expect("unreachable node")).collect()
    }
}

/// Checks the graph against a signature: all structural checks plus
/// declaredness and arity of every symbol.
pub fn validate(g: &TermGraph, sig: &Signature) -> std::result::Result<(), Vec<Violation>> {
    let mut errs = match g.check() {
        Ok(()) => Vec::new(),
        Err(e) => e,
    };
    if errs.iter().any(|e| matches!(e, Violation::DanglingRoot(_) | Violation::DanglingSuccessor { .. })) {
        return Err(errs);
    }
    let mut undeclared = BTreeSet::new();
    for n in g.nodes() {
        match sig.arity(g.label(n)) {
            None => {
                if let Label::Sym(s) = g.label(n) {
                    undeclared.insert(s.to_string());
                }
            }
            Some(k) if k != g.succ(n).len() => {
                if !errs.contains(&Violation::ArityMismatch(n)) {
                    errs.push(Violation::ArityMismatch(n));
                }
            }
            Some(_) => {}
        }
    }
    errs.extend(undeclared.into_iter().map(Violation::UndeclaredSymbol));
    if errs.is_empty() {
        Ok(())
    } else {
        errs.sort_by_key(|e| match e {
            Violation::ArityMismatch(n) => (0, *n),
            Violation::UnreachableNode(n) => (1, *n),
            _ => (2, 0),
        });
        Err(errs)
    }
}

/// The node reached by walking `pos` from the root.
pub fn node_at(g: &TermGraph, pos: &Position) -> Result<NodeId> {
    walk(g, g.root(), &pos.0).ok_or_else(|| Error::InvalidPosition(pos.clone()))
}

pub(crate) fn walk(g: &TermGraph, start: NodeId, path: &[usize]) -> Option<NodeId> {
    let mut n = start;
    for &i in path {
        n = *g.succ(n).get(i)?;
    }
    Some(n)
}

/// Whether two positions alias, i.e. reach the same node.
pub fn aliases(g: &TermGraph, p1: &Position, p2: &Position) -> Result<bool> {
    Ok(node_at(g, p1)? == node_at(g, p2)?)
}

fn check_cap(g: &TermGraph) -> Result<()> {
    let cap = node_cap();
    if g.len() > cap {
        return Err(Error::SizeLimit { what: "node count", size: g.len(), limit: cap });
    }
    Ok(())
}

/// The acyclic positions of `n`: root paths to `n` that visit no node twice.
pub fn acyclic_positions(g: &TermGraph, n: NodeId) -> Result<BTreeSet<Position>> {
    if !g.contains(n) {
        return Err(Error::UnknownNode(n));
    }
    let mut all = all_acyclic_positions(g)?;
    Ok(std::mem::take(&mut all[n]).into_iter().collect())
}

/// Acyclic positions of every node, by DFS over simple paths from the root.
/// Each list is in DFS order (lexicographic).
pub fn all_acyclic_positions(g: &TermGraph) -> Result<Vec<Vec<Position>>> {
    check_cap(g)?;
    let mut out = vec![Vec::new(); g.len()];
    let mut on_path = vec![false; g.len()];
    let mut path = Vec::new();
    let mut count = 0usize;
    fn dfs(
        g: &TermGraph,
        n: NodeId,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut [Vec<Position>],
        count: &mut usize,
    ) -> Result<()> {
        *count += 1;
        if *count > PATH_CAP {
            return Err(Error::SizeLimit { what: "acyclic positions", size: *count, limit: PATH_CAP });
        }
        out[n].push(Position(path.clone()));
        on_path[n] = true;
        for (i, &m) in g.succ(n).iter().enumerate() {
            if !on_path[m] {
                path.push(i);
                dfs(g, m, path, on_path, out, count)?;
                path.pop();
            }
        }
        on_path[n] = false;
        Ok(())
    }
    dfs(g, g.root(), &mut path, &mut on_path, &mut out, &mut count)?;
    Ok(out)
}

/// Shortest-position length of every node.
pub fn depths(g: &TermGraph) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.len()];
    let mut queue = VecDeque::new();
    d[g.root()] = 0;
    queue.push_back(g.root());
    while let Some(n) = queue.pop_front() {
        for &m in g.succ(n) {
            if d[m] == usize::MAX {
                d[m] = d[n] + 1;
                queue.push_back(m);
            }
        }
    }
    d
}

pub fn depth(g: &TermGraph, n: NodeId) -> Result<usize> {
    if !g.contains(n) {
        return Err(Error::UnknownNode(n));
    }
    Ok(depths(g)[n])
}

/// Maximum node depth.
pub fn graph_depth(g: &TermGraph) -> Depth {
    Depth::Finite(depths(g).into_iter().max().unwrap_or(0))
}

/// Minimum depth of a node whose label satisfies `in_delta`, or omega.
pub fn delta_depth(g: &TermGraph, in_delta: impl Fn(&Label) -> bool) -> Depth {
    let d = depths(g);
    g.nodes()
        .filter(|&n| in_delta(g.label(n)))
        .map(|n| d[n])
        .min()
        .map_or(Depth::Omega, Depth::Finite)
}

/// Minimum depth of a `_|_` node, or omega.
pub fn bot_depth(g: &TermGraph) -> Depth {
    delta_depth(g, Label::is_bot)
}
