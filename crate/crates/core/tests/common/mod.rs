//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's order, homomorphism or truncation code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use tg_core::{canonicalize, CanonicalTermGraph, Document, Label, NodeId, Term, TermGraph};

pub fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_doc(name: &str) -> Document {
    let src = std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    Document::parse(&src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture(name: &str) -> TermGraph {
    fixture_doc(name).graphs.into_iter().next().expect("fixture has a graph").1
}

// ---------------------------------------------------------------------------
// term trees

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OTerm {
    pub label: Option<String>,
    pub kids: Vec<OTerm>,
}

impl OTerm {
    pub fn bot() -> OTerm {
        OTerm { label: None, kids: vec![] }
    }

    pub fn sym(name: &str, kids: Vec<OTerm>) -> OTerm {
        OTerm { label: Some(name.to_string()), kids }
    }

    pub fn is_bot(&self) -> bool {
        self.label.is_none()
    }

    pub fn has_bot(&self) -> bool {
        self.is_bot() || self.kids.iter().any(OTerm::has_bot)
    }

    pub fn leq(&self, other: &OTerm) -> bool {
        self.is_bot()
            || (self.label == other.label
                && self.kids.len() == other.kids.len()
                && self.kids.iter().zip(&other.kids).all(|(a, b)| a.leq(b)))
    }

    pub fn glb(&self, other: &OTerm) -> OTerm {
        if self.label.is_some() && self.label == other.label && self.kids.len() == other.kids.len() {
            OTerm { label: self.label.clone(), kids: self.kids.iter().zip(&other.kids).map(|(a, b)| a.glb(b)).collect() }
        } else {
            OTerm::bot()
        }
    }

    pub fn truncate(&self, d: usize) -> OTerm {
        if d == 0 {
            return OTerm::bot();
        }
        OTerm { label: self.label.clone(), kids: self.kids.iter().map(|k| k.truncate(d - 1)).collect() }
    }

    /// Length of the shortest position where the two trees disagree.
    pub fn diff_depth(&self, other: &OTerm) -> Option<usize> {
        if self.label != other.label || self.kids.len() != other.kids.len() {
            return Some(0);
        }
        self.kids.iter().zip(&other.kids).filter_map(|(a, b)| a.diff_depth(b)).min().map(|d| d + 1)
    }

    pub fn bot_depth(&self) -> Option<usize> {
        if self.is_bot() {
            return Some(0);
        }
        self.kids.iter().filter_map(OTerm::bot_depth).min().map(|d| d + 1)
    }

    pub fn to_term(&self) -> Term {
        match &self.label {
            None => Term::bottom(),
            Some(s) => Term::node(Label::sym(s), self.kids.iter().map(OTerm::to_term).collect()),
        }
    }

    /// Unravels `g` from node `n` down to depth `d`, replacing depth-`d`
    /// subterms by bottom.
    pub fn unravel(g: &TermGraph, n: NodeId, d: usize) -> OTerm {
        if d == 0 {
            return OTerm::bot();
        }
        match g.label(n) {
            Label::Sym(s) => OTerm::sym(s, g.succ(n).iter().map(|&m| OTerm::unravel(g, m, d - 1)).collect()),
            Label::Var(v) => OTerm::sym(&format!("${v}"), vec![]),
            Label::Bot => OTerm::bot(),
        }
    }

    pub fn of_graph(g: &TermGraph, d: usize) -> OTerm {
        OTerm::unravel(g, g.root(), d)
    }
}

impl fmt::Display for OTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            None => write!(f, "_|_"),
            Some(s) => {
                write!(f, "{s}")?;
                if !self.kids.is_empty() {
                    write!(f, "(")?;
                    for (i, k) in self.kids.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{k}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

pub const TERM_SIG: &[(&str, usize)] = &[("f", 2), ("h", 1), ("a", 0), ("b", 0)];

pub fn random_term(rng: &mut impl Rng, depth: usize, bot_weight: f64) -> OTerm {
    if rng.gen_bool(bot_weight) {
        return OTerm::bot();
    }
    let choices: Vec<_> = TERM_SIG.iter().filter(|(_, k)| depth > 0 || *k == 0).collect();
    let (name, k) = choices[rng.gen_range(0..choices.len())];
    OTerm::sym(name, (0..*k).map(|_| random_term(rng, depth.saturating_sub(1), bot_weight)).collect())
}

/// Replaces random subterms of `t` by bottom.
pub fn random_below(rng: &mut impl Rng, t: &OTerm) -> OTerm {
    if rng.gen_bool(0.2) {
        return OTerm::bot();
    }
    OTerm { label: t.label.clone(), kids: t.kids.iter().map(|k| random_below(rng, k)).collect() }
}

// ---------------------------------------------------------------------------
// graphs

/// Random graph with up to `n` nodes over the given signature; node 0 is
/// the root and unreachable nodes are dropped.
pub fn random_graph(rng: &mut impl Rng, n: usize, sig: &[(&str, usize)], bot_weight: f64) -> TermGraph {
    let mut labels = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.gen_bool(bot_weight) {
            labels.push(Label::Bot);
            succ.push(vec![]);
        } else {
            let (name, k) = sig[rng.gen_range(0..sig.len())];
            labels.push(Label::sym(name));
            succ.push((0..k).map(|_| rng.gen_range(0..n)).collect());
        }
    }
    TermGraph::new(labels, succ, 0).garbage_collect()
}

fn walk(g: &TermGraph, path: &[usize]) -> Option<NodeId> {
    let mut n = g.root();
    for &i in path {
        n = *g.succ(n).get(i)?;
    }
    Some(n)
}

/// All simple root paths to each node, by exhaustive DFS.
pub fn simple_paths(g: &TermGraph) -> Vec<Vec<Vec<usize>>> {
    fn go(g: &TermGraph, n: NodeId, on: &mut Vec<bool>, path: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        out[n].push(path.clone());
        on[n] = true;
        for (i, &m) in g.succ(n).iter().enumerate() {
            if !on[m] {
                path.push(i);
                go(g, m, on, path, out);
                path.pop();
            }
        }
        on[n] = false;
    }
    let mut out = vec![vec![]; g.len()];
    go(g, g.root(), &mut vec![false; g.len()], &mut vec![], &mut out);
    out
}

/// Rigid order by backtracking over every node map, checking the
/// homomorphism conditions as nodes get assigned and rigidity at the end.
pub fn oracle_leq(g: &TermGraph, h: &TermGraph) -> bool {
    oracle_leq_with(g, h, &simple_paths(h))
}

pub fn oracle_leq_with(g: &TermGraph, h: &TermGraph, h_paths: &[Vec<Vec<usize>>]) -> bool {
    fn consistent(g: &TermGraph, h: &TermGraph, phi: &[Option<NodeId>], n: NodeId) -> bool {
        let ok = |a: NodeId| {
            if g.is_bot(a) {
                return true;
            }
            let m = phi[a].unwrap();
            g.label(a) == h.label(m)
                && g.succ(a).len() == h.succ(m).len()
                && g.succ(a).iter().zip(h.succ(m)).all(|(&s, &t)| phi[s].is_none_or(|x| x == t))
        };
        ok(n) && g.nodes().filter(|&a| phi[a].is_some() && g.succ(a).contains(&n)).all(ok)
    }
    fn go(g: &TermGraph, h: &TermGraph, paths: &[Vec<Vec<usize>>], phi: &mut Vec<Option<NodeId>>, n: NodeId) -> bool {
        if n == g.len() {
            return g.nodes().filter(|&a| !g.is_bot(a)).all(|a| paths[phi[a].unwrap()].iter().all(|p| walk(g, p) == Some(a)));
        }
        let range = if n == g.root() { h.root()..h.root() + 1 } else { 0..h.len() };
        for m in range {
            phi[n] = Some(m);
            if consistent(g, h, phi, n) && go(g, h, paths, phi, n + 1) {
                return true;
            }
        }
        phi[n] = None;
        false
    }
    go(g, h, h_paths, &mut vec![None; g.len()], 0)
}

fn set_partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let (first, rest) = (&items[0], &items[1..]);
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first.clone());
            out.push(q);
        }
        let mut q = p.clone();
        q.push(vec![first.clone()]);
        out.push(q);
    }
    out
}

fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![vec![]], |acc, l| {
        acc.into_iter().flat_map(|p| l.iter().map(move |x| [p.clone(), vec![x.clone()]].concat())).collect()
    })
}

/// Every rigid lower bound of `g` up to isomorphism. A rigid bottom
/// homomorphism is injective on non-bottom nodes, so a lower bound is a
/// choice of kept nodes, a choice per edge between keeping it and cutting
/// it to a bottom node, and a grouping of the cut edges that share a target.
pub fn lower_bounds(g: &TermGraph) -> BTreeSet<CanonicalTermGraph> {
    let mut out = BTreeSet::new();
    out.insert(CanonicalTermGraph::bottom());
    let cands: Vec<NodeId> = g.nodes().filter(|&n| !g.is_bot(n)).collect();
    for mask in 0u32..(1 << cands.len()) {
        let keep: Vec<NodeId> = (0..cands.len()).filter(|i| mask >> i & 1 == 1).map(|i| cands[i]).collect();
        if !keep.contains(&g.root()) {
            continue;
        }
        let slots: Vec<(NodeId, usize)> =
            keep.iter().flat_map(|&n| (0..g.succ(n).len()).map(move |i| (n, i))).collect();
        for cut_mask in 0u32..(1 << slots.len()) {
            let cut = |j: usize| cut_mask >> j & 1 == 1 || !keep.contains(&g.succ(slots[j].0)[slots[j].1]);
            if (0..slots.len()).any(|j| cut_mask >> j & 1 == 1 && !keep.contains(&g.succ(slots[j].0)[slots[j].1])) {
                continue; // count each forced cut once
            }
            let mut by_target: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
            for j in (0..slots.len()).filter(|&j| cut(j)) {
                by_target.entry(g.succ(slots[j].0)[slots[j].1]).or_default().push(j);
            }
            let groups: Vec<Vec<Vec<Vec<usize>>>> = by_target.values().map(|v| set_partitions(v)).collect();
            for choice in cartesian(&groups) {
                let mut id: HashMap<NodeId, NodeId> = HashMap::new();
                for (i, &n) in keep.iter().enumerate() {
                    id.insert(n, i);
                }
                let mut labels: Vec<Label> = keep.iter().map(|&n| g.label(n).clone()).collect();
                let mut succ: Vec<Vec<NodeId>> = keep.iter().map(|&n| g.succ(n).iter().map(|m| id.get(m).copied().unwrap_or(0)).collect()).collect();
                for classes in &choice {
                    for class in classes {
                        let b = labels.len();
                        labels.push(Label::Bot);
                        succ.push(vec![]);
                        for &j in class {
                            let (n, i) = slots[j];
                            succ[id[&n]][i] = b;
                        }
                    }
                }
                let l = TermGraph::new(labels, succ, id[&g.root()]).garbage_collect();
                if oracle_leq(&l, g) {
                    out.insert(canonicalize(&l));
                }
            }
        }
    }
    out
}

/// Truncation that keeps exactly the nodes above depth `d` and cuts every
/// other edge to a fresh bottom node.
pub fn simple_truncation(g: &TermGraph, d: usize) -> TermGraph {
    let depth = {
        let mut depth = vec![usize::MAX; g.len()];
        let mut queue = std::collections::VecDeque::from([g.root()]);
        depth[g.root()] = 0;
        while let Some(n) = queue.pop_front() {
            for &m in g.succ(n) {
                if depth[m] == usize::MAX {
                    depth[m] = depth[n] + 1;
                    queue.push_back(m);
                }
            }
        }
        depth
    };
    if d == 0 {
        return TermGraph::bottom();
    }
    let mut labels = g.labels().to_vec();
    let mut succ = g.successors().to_vec();
    for n in g.nodes().filter(|&n| depth[n] < d) {
        for i in 0..succ[n].len() {
            if depth[succ[n][i]] >= d {
                succ[n][i] = labels.len();
                labels.push(Label::Bot);
                succ.push(vec![]);
            }
        }
    }
    TermGraph::new(labels, succ, g.root()).garbage_collect()
}

/// Rigid truncation straight from its definition: acyclic predecessors
/// from the simple paths, retained nodes as a closure, fringe slots as
/// listed, then fresh bottom nodes for the fringe.
pub fn oracle_truncate(g: &TermGraph, d: usize) -> CanonicalTermGraph {
    if d == 0 {
        return CanonicalTermGraph::bottom();
    }
    let paths = simple_paths(g);
    let depth: Vec<usize> = paths.iter().map(|ps| ps.iter().map(Vec::len).min().unwrap()).collect();
    let mut pred: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); g.len()];
    for n in g.nodes() {
        for p in &paths[n] {
            if let Some((_, init)) = p.split_last() {
                pred[n].insert(walk(g, init).unwrap());
            }
        }
    }
    let mut retained: BTreeSet<NodeId> = g.nodes().filter(|&n| depth[n] < d).collect();
    loop {
        let more: BTreeSet<NodeId> = retained.iter().flat_map(|&n| pred[n].iter().copied()).collect();
        if more.is_subset(&retained) {
            break;
        }
        retained.extend(more);
    }
    let mut labels = g.labels().to_vec();
    let mut succ = g.successors().to_vec();
    for &n in &retained {
        for i in 0..g.succ(n).len() {
            let m = g.succ(n)[i];
            if !retained.contains(&m) || (depth[n] + 1 >= d && !pred[m].contains(&n)) {
                succ[n][i] = labels.len();
                labels.push(Label::Bot);
                succ.push(vec![]);
            }
        }
    }
    canonicalize(&TermGraph::new(labels, succ, g.root()).garbage_collect())
}

/// Similarity as the largest depth at which definitional truncations agree.
pub fn oracle_similarity(g: &TermGraph, h: &TermGraph) -> Option<usize> {
    if canonicalize(g) == canonicalize(h) {
        return None;
    }
    (0..).find(|&d| oracle_truncate(g, d + 1) != oracle_truncate(h, d + 1))
}
