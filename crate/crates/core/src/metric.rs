use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::canon::{canonicalize, CanonicalTermGraph};
use crate::error::{Error, Result};
use crate::graph::{all_acyclic_positions, depths, graph_depth, walk, Depth, Label, NodeId, Position, TermGraph};
use crate::order::{liminf, ApproxResult, Exactness, SequenceProvider};

/// Retained nodes and fringe slots `(n, i)` of a rigid truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationParts {
    pub retained: BTreeSet<NodeId>,
    pub fringe: BTreeSet<(NodeId, usize)>,
}

/// Per-graph data needed for truncations at any depth.
pub struct Truncator<'a> {
    g: &'a TermGraph,
    depth: Vec<usize>,
    pred: Vec<BTreeSet<NodeId>>,
}

impl<'a> Truncator<'a> {
    pub fn new(g: &'a TermGraph) -> Result<Self> {
        Ok(Truncator { g, depth: depths(g), pred: acyclic_predecessors(g)? })
    }

    pub fn parts(&self, d: usize) -> TruncationParts {
        let g = self.g;
        if d == 0 {
            return TruncationParts { retained: BTreeSet::new(), fringe: [(g.root(), usize::MAX)].into() };
        }
        let mut retained: BTreeSet<NodeId> = g.nodes().filter(|&n| self.depth[n] < d).collect();
        let mut stack: Vec<NodeId> = retained.iter().copied().collect();
        while let Some(n) = stack.pop() {
            for &m in &self.pred[n] {
                if retained.insert(m) {
                    stack.push(m);
                }
            }
        }
        let mut fringe = BTreeSet::new();
        for &n in &retained {
            for (i, &m) in g.succ(n).iter().enumerate() {
                let cut = !retained.contains(&m);
                let closes_cycle = self.depth[n] + 1 >= d && !self.pred[m].contains(&n);
                if cut || closes_cycle {
                    fringe.insert((n, i));
                }
            }
        }
        TruncationParts { retained, fringe }
    }

    /// The truncation before canonicalisation, with each node's image under
    /// the embedding into `g` (a fringe node `n^i` goes to `succ_i(n)`).
    pub fn truncate_raw(&self, d: usize) -> (TermGraph, Vec<NodeId>) {
        let g = self.g;
        if d == 0 {
            return (TermGraph::bottom(), vec![g.root()]);
        }
        let parts = self.parts(d);
        let mut id = vec![usize::MAX; g.len()];
        let mut image = Vec::new();
        for (k, &n) in parts.retained.iter().enumerate() {
            id[n] = k;
            image.push(n);
        }
        let mut labels: Vec<Label> = parts.retained.iter().map(|&n| g.label(n).clone()).collect();
        let mut succ: Vec<Vec<NodeId>> = Vec::with_capacity(labels.len() + parts.fringe.len());
        let mut fresh = labels.len();
        let mut fringe_nodes = Vec::new();
        for &n in &parts.retained {
            let s = g
                .succ(n)
                .iter()
                .enumerate()
                .map(|(i, &m)| {
                    if parts.fringe.contains(&(n, i)) {
                        fringe_nodes.push(m);
                        fresh += 1;
                        fresh - 1
                    } else {
                        id[m]
                    }
                })
                .collect();
            succ.push(s);
        }
        for m in fringe_nodes {
            labels.push(Label::Bot);
            succ.push(Vec::new());
            image.push(m);
        }
        (TermGraph::new(labels, succ, id[g.root()]), image)
    }

    pub fn truncate(&self, d: Depth) -> CanonicalTermGraph {
        match d {
            Depth::Omega => canonicalize(self.g),
            Depth::Finite(d) => canonicalize(&self.truncate_raw(d).0),
        }
    }
}

/// `m` is an acyclic predecessor of `n` iff `n` has an acyclic position
/// `π·i` with `π` reaching `m`.
pub fn acyclic_predecessors(g: &TermGraph) -> Result<Vec<BTreeSet<NodeId>>> {
    let acyc = all_acyclic_positions(g)?;
    Ok(acyc
        .iter()
        .map(|ps| {
            ps.iter()
                .filter_map(|p| p.0.split_last().map(|(_, pre)| walk(g, g.root(), pre).unwrap()))
                .collect()
        })
        .collect())
}

/// Retained nodes and fringe slots at depth `d`. At `d = 0` the fringe is
/// the root alone, reported as `(root, usize::MAX)`.
pub fn truncation_parts(g: &TermGraph, d: usize) -> Result<TruncationParts> {
    Ok(Truncator::new(g)?.parts(d))
}

/// The rigid truncation of `g` at depth `d`.
pub fn truncate(g: &TermGraph, d: Depth) -> Result<CanonicalTermGraph> {
    if d == Depth::Omega {
        return Ok(canonicalize(g));
    }
    Ok(Truncator::new(g)?.truncate(d))
}

/// Largest depth at which the rigid truncations agree; omega iff isomorphic.
pub fn similarity(g: &TermGraph, h: &TermGraph) -> Result<Depth> {
    let (cg, ch) = (canonicalize(g), canonicalize(h));
    if cg == ch {
        return Ok(Depth::Omega);
    }
    let (tg, th) = (Truncator::new(g)?, Truncator::new(h)?);
    let bound = graph_depth(g).max(graph_depth(h)).finite().unwrap() + 2;
    for d in 1..=bound {
        if tg.truncate(Depth::Finite(d)) != th.truncate(Depth::Finite(d)) {
            return Ok(Depth::Finite(d - 1));
        }
    }
    unreachable!("truncations beyond the depth bound are the graphs themselves")
}

/// An exact distance: zero or a power 2^-k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DyadicDistance {
    Zero,
    Exp(usize),
}

impl Ord for DyadicDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        use DyadicDistance::*;
        match (self, other) {
            (Zero, Zero) => Ordering::Equal,
            (Zero, Exp(_)) => Ordering::Less,
            (Exp(_), Zero) => Ordering::Greater,
            (Exp(a), Exp(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for DyadicDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Depth> for DyadicDistance {
    fn from(d: Depth) -> Self {
        match d {
            Depth::Omega => DyadicDistance::Zero,
            Depth::Finite(k) => DyadicDistance::Exp(k),
        }
    }
}

impl fmt::Display for DyadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DyadicDistance::Zero => f.write_str("0"),
            DyadicDistance::Exp(k) => write!(f, "2^-{k}"),
        }
    }
}

pub fn distance(g: &TermGraph, h: &TermGraph) -> Result<DyadicDistance> {
    similarity(g, h).map(DyadicDistance::from)
}

/// Outcome of a metric limit computation.
#[derive(Clone, Debug)]
pub enum MetricLimit {
    Limit(ApproxResult),
    NotCauchy { witness: Position, evidence: String },
}

/// How many trailing suffix glbs with the same shallow ⊥-depth count as a
/// stalled chain in a window.
pub const STALL_WINDOW: usize = 3;

/// Metric limit of a sequence of total graphs, via the limit inferior.
pub fn limit_of_sequence(seq: &SequenceProvider, depth_goal: usize) -> Result<MetricLimit> {
    if let Some(i) = seq.elements().position(TermGraph::has_bot) {
        return Err(Error::PartialInput(i));
    }
    let r = liminf(seq, depth_goal)?;
    match r.exactness {
        Exactness::Exact if r.graph.has_bot() => Ok(MetricLimit::NotCauchy {
            witness: shallowest_bot(&r.graph),
            evidence: format!("exact limit inferior contains ⊥ at depth {}", crate::graph::bot_depth(&r.graph)),
        }),
        Exactness::Exact => Ok(MetricLimit::Limit(r)),
        Exactness::DepthExact(k) if k >= depth_goal => Ok(MetricLimit::Limit(r)),
        _ => {
            let tail = &r.chain_bot_depths[r.chain_bot_depths.len().saturating_sub(STALL_WINDOW)..];
            let stalled = tail.len() == STALL_WINDOW && tail.iter().all(|&d| d == tail[0]);
            if stalled {
                Ok(MetricLimit::NotCauchy {
                    witness: shallowest_bot(&r.graph),
                    evidence: format!(
                        "⊥-depth of the last {STALL_WINDOW} suffix glbs stays at {} < {depth_goal}",
                        tail[0]
                    ),
                })
            } else {
                Ok(MetricLimit::Limit(r))
            }
        }
    }
}

/// Least position of a ⊥ node of minimal depth.
pub fn shallowest_bot(g: &TermGraph) -> Position {
    let pos = g.min_positions();
    g.nodes().filter(|&n| g.is_bot(n)).map(|n| pos[n].clone()).min().unwrap_or_default()
}
