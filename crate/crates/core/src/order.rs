use std::collections::HashMap;
use std::fmt;

use crate::canon::{canonicalize, CanonicalTermGraph};
use crate::error::{Error, Result};
use crate::graph::{all_acyclic_positions, bot_depth, node_cap, walk, Depth, Label, NodeId, Signature, TermGraph};
use crate::hom::{find_delta_hom, find_rigid_bot_hom, intersecting_pairs, Delta};

/// `g` is below `h` in the rigid order.
pub fn leq_rigid(g: &TermGraph, h: &TermGraph) -> Result<bool> {
    Ok(find_rigid_bot_hom(g, h)?.is_some())
}

/// `g` is below `h` in the simple order (any ⊥-homomorphism).
pub fn leq_simple(g: &TermGraph, h: &TermGraph) -> bool {
    find_delta_hom(g, h, &Delta::bot()).is_some()
}

/// `g` is below `h` in the injective order: a ⊥-homomorphism that is
/// injective on non-⊥ nodes.
pub fn leq_injective(g: &TermGraph, h: &TermGraph) -> bool {
    let Some(phi) = find_delta_hom(g, h, &Delta::bot()) else { return false };
    let mut hit = vec![false; h.len()];
    for n in g.nodes().filter(|&n| !g.is_bot(n)) {
        let m = phi.apply(n);
        if hit[m] {
            return false;
        }
        hit[m] = true;
    }
    true
}

/// Maximal elements of the rigid order are exactly the total graphs.
pub fn is_maximal_total(g: &TermGraph) -> bool {
    !g.has_bot()
}

/// Greatest lower bound of two graphs.
///
/// Lockstep product from the roots (a pair is expanded iff both sides carry
/// the same symbol, otherwise it is a ⊥ leaf), then ⊥-ify every product node
/// that does not keep all acyclic positions of either projection, until
/// nothing changes.
pub fn glb2(g: &TermGraph, h: &TermGraph) -> Result<CanonicalTermGraph> {
    // pairs of nodes from two graphs within the node cap
    let cap = node_cap() * node_cap();
    let mut index: HashMap<(NodeId, NodeId), NodeId> = HashMap::new();
    let mut pairs = vec![(g.root(), h.root())];
    index.insert(pairs[0], 0);
    let mut labels = Vec::new();
    let mut succ: Vec<Vec<NodeId>> = Vec::new();
    let mut head = 0;
    while head < pairs.len() {
        let (a, b) = pairs[head];
        head += 1;
        let la = g.label(a);
        if la.is_sym() && la == h.label(b) && g.succ(a).len() == h.succ(b).len() {
            let mut s = Vec::with_capacity(g.succ(a).len());
            for (&x, &y) in g.succ(a).iter().zip(h.succ(b)) {
                let id = *index.entry((x, y)).or_insert_with(|| {
                    pairs.push((x, y));
                    pairs.len() - 1
                });
                s.push(id);
            }
            if pairs.len() > cap {
                return Err(Error::SizeLimit { what: "glb product", size: pairs.len(), limit: cap });
            }
            labels.push(la.clone());
            succ.push(s);
        } else {
            labels.push(Label::Bot);
            succ.push(Vec::new());
        }
    }
    let acyc_g = all_acyclic_positions(g)?;
    let acyc_h = all_acyclic_positions(h)?;
    let mut cand = TermGraph::new(labels, succ, 0);
    loop {
        let cut: Vec<NodeId> = cand
            .nodes()
            .filter(|&p| !cand.is_bot(p))
            .filter(|&p| {
                let (n, m) = pairs[p];
                acyc_g[n].iter().chain(&acyc_h[m]).any(|pos| walk(&cand, 0, &pos.0) != Some(p))
            })
            .collect();
        if cut.is_empty() {
            break;
        }
        let (mut labels, mut succ): (Vec<_>, Vec<_>) =
            cand.nodes().map(|n| (cand.label(n).clone(), cand.succ(n).to_vec())).unzip();
        for p in cut {
            labels[p] = Label::Bot;
            succ[p].clear();
        }
        cand = TermGraph::new(labels, succ, 0);
    }
    let c = canonicalize(&cand);
    debug_assert!(leq_rigid(&c, g).unwrap_or(true) && leq_rigid(&c, h).unwrap_or(true));
    Ok(c)
}

/// Greatest lower bound of a non-empty list, folded left.
pub fn glb<G: AsRef<TermGraph>>(set: &[G]) -> Result<CanonicalTermGraph> {
    let (first, rest) = set.split_first().ok_or(Error::EmptySet)?;
    let mut acc = canonicalize(first.as_ref());
    for g in rest {
        acc = glb2(&acc, g.as_ref())?;
    }
    Ok(acc)
}

/// Least upper bound of a compatible pair, or [`Error::Incompatible`].
///
/// Nodes of the disjoint union that share a position are identified
/// (transitively); a class takes its unique symbol, or ⊥ if it has none,
/// and its successors from a member carrying that symbol.
pub fn lub_compatible(g: &TermGraph, h: &TermGraph) -> Result<CanonicalTermGraph> {
    let off = g.len();
    let mut uf = UnionFind::new(g.len() + h.len());
    for (a, b) in intersecting_pairs(g, h) {
        uf.union(a, b + off);
    }
    let node = |n: NodeId| if n < off { (g, n) } else { (h, n - off) };
    let mut class_of = vec![usize::MAX; off + h.len()];
    let mut reps: Vec<Option<NodeId>> = Vec::new();
    let mut roots: HashMap<NodeId, usize> = HashMap::new();
    for n in 0..off + h.len() {
        let k = roots.len();
        let c = *roots.entry(uf.find(n)).or_insert(k);
        if c == reps.len() {
            reps.push(None);
        }
        class_of[n] = c;
        let (x, v) = node(n);
        if x.is_bot(v) {
            continue;
        }
        match reps[c] {
            None => reps[c] = Some(n),
            Some(r) => {
                let (y, w) = node(r);
                if y.label(w) != x.label(v) {
                    return Err(Error::Incompatible(format!(
                        "label clash between {} and {}",
                        y.label(w),
                        x.label(v)
                    )));
                }
            }
        }
    }
    let mut labels = Vec::with_capacity(reps.len());
    let mut succ = Vec::with_capacity(reps.len());
    for r in &reps {
        match *r {
            None => {
                labels.push(Label::Bot);
                succ.push(Vec::new());
            }
            Some(r) => {
                let (x, v) = node(r);
                let base = if r < off { 0 } else { off };
                labels.push(x.label(v).clone());
                succ.push(x.succ(v).iter().map(|&m| class_of[m + base]).collect());
            }
        }
    }
    let lub = canonicalize(&TermGraph::new(labels, succ, class_of[g.root()]).garbage_collect());
    if leq_rigid(g, &lub)? && leq_rigid(h, &lub)? {
        Ok(lub)
    } else {
        Err(Error::Incompatible("quotient is not an upper bound".into()))
    }
}

/// The maximum of a finite directed set.
pub fn lub_directed_finite<G: AsRef<TermGraph>>(set: &[G]) -> Result<CanonicalTermGraph> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for m in set {
        let m = m.as_ref();
        let mut all = true;
        for x in set {
            if !leq_rigid(x.as_ref(), m)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(canonicalize(m));
        }
    }
    Err(Error::NotDirected)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// A sequence of graphs to take a limit of.
#[derive(Clone, Debug)]
pub enum SequenceProvider {
    /// A closed sequence; its limit inferior is its last element.
    Finite(Vec<TermGraph>),
    /// The ω-sequence `prefix · period · period · …`.
    Periodic { prefix: Vec<TermGraph>, period: Vec<TermGraph> },
    /// An observed prefix of a longer sequence whose continuation is unknown.
    Window(Vec<TermGraph>),
}

impl SequenceProvider {
    pub fn elements(&self) -> impl Iterator<Item = &TermGraph> {
        let (a, b): (&[TermGraph], &[TermGraph]) = match self {
            SequenceProvider::Finite(v) | SequenceProvider::Window(v) => (v, &[]),
            SequenceProvider::Periodic { prefix, period } => (prefix, period),
        };
        a.iter().chain(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// Truncations at this depth of the answer and the true value agree.
    DepthExact(usize),
    /// Only supported by the observed window of this many graphs.
    WindowStable(usize),
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exactness::Exact => f.write_str("exact"),
            Exactness::DepthExact(d) => write!(f, "depth-{d}-exact"),
            Exactness::WindowStable(w) => write!(f, "window-stable({w})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub graph: CanonicalTermGraph,
    pub exactness: Exactness,
    /// ⊥-depths of the suffix glbs h_0, h_1, … that were computed.
    pub chain_bot_depths: Vec<Depth>,
    pub evidence: String,
}

/// Limit inferior, exact where a certificate exists and depth-bounded
/// otherwise.
pub fn liminf(seq: &SequenceProvider, depth_goal: usize) -> Result<ApproxResult> {
    match seq {
        SequenceProvider::Finite(gs) => {
            let last = gs.last().ok_or(Error::EmptySequence)?;
            Ok(ApproxResult {
                graph: canonicalize(last),
                exactness: Exactness::Exact,
                chain_bot_depths: vec![bot_depth(last)],
                evidence: format!("closed sequence of length {}: the last element", gs.len()),
            })
        }
        SequenceProvider::Periodic { prefix, period } => {
            if period.is_empty() {
                return Err(Error::EmptySequence);
            }
            // h_β for β ≥ |prefix| is the glb of one full period
            let mut chain = vec![glb(period)?];
            for g in prefix.iter().rev() {
                let next = glb2(g, chain.last().unwrap())?;
                chain.push(next);
            }
            chain.reverse();
            let depths: Vec<Depth> = chain.iter().map(|c| bot_depth(c)).collect();
            Ok(ApproxResult {
                graph: chain.pop().unwrap(),
                exactness: Exactness::Exact,
                evidence: format!(
                    "suffix glbs stabilise at index {} (prefix {}, period {})",
                    prefix.len(),
                    prefix.len(),
                    period.len()
                ),
                chain_bot_depths: depths,
            })
        }
        SequenceProvider::Window(gs) => {
            match gs.len() {
                0 => return Err(Error::EmptySequence),
                1 => {
                    return Ok(ApproxResult {
                        graph: canonicalize(&gs[0]),
                        exactness: Exactness::WindowStable(1),
                        chain_bot_depths: vec![],
                        evidence: "window of a single graph".into(),
                    })
                }
                _ => {}
            }
            let n = gs.len();
            // h_β over the window, for suffixes of at least two graphs
            let mut chain = vec![glb2(&gs[n - 2], &gs[n - 1])?];
            for g in gs[..n - 2].iter().rev() {
                let next = glb2(g, chain.last().unwrap())?;
                chain.push(next);
            }
            chain.reverse();
            let depths: Vec<Depth> = chain.iter().map(|c| bot_depth(c)).collect();
            if let Some(b) = depths.iter().position(|&d| d >= Depth::Finite(depth_goal)) {
                return Ok(ApproxResult {
                    graph: chain.swap_remove(b),
                    exactness: Exactness::DepthExact(depth_goal),
                    evidence: format!("suffix glb h_{b} of the {n}-graph window has ⊥-depth ≥ {depth_goal}"),
                    chain_bot_depths: depths,
                });
            }
            let k = depths.last().unwrap().finite().unwrap();
            let exactness = if k > 0 { Exactness::DepthExact(k) } else { Exactness::WindowStable(n) };
            Ok(ApproxResult {
                graph: chain.pop().unwrap(),
                exactness,
                evidence: format!("depth goal {depth_goal} not reached in a {n}-graph window; last ⊥-depth {k}"),
                chain_bot_depths: depths,
            })
        }
    }
}

/// Default bound on the number of canonical graphs [`enumerate_canonical`]
/// may produce.
pub const ENUM_LIMIT: usize = 1_000_000;

/// Every canonical term graph over `sig` (plus ⊥ if requested) with at most
/// `max_nodes` nodes, each once: by node count, then by label choices in
/// signature order (⊥ last) and successor choices in id order.
pub fn enumerate_canonical(sig: &Signature, max_nodes: usize, include_bot: bool) -> Result<Vec<CanonicalTermGraph>> {
    enumerate_canonical_with_limit(sig, max_nodes, include_bot, ENUM_LIMIT)
}

pub fn enumerate_canonical_with_limit(
    sig: &Signature,
    max_nodes: usize,
    include_bot: bool,
    limit: usize,
) -> Result<Vec<CanonicalTermGraph>> {
    let mut alphabet: Vec<(Label, usize)> = sig.symbols().map(|(s, a)| (Label::sym(s), a)).collect();
    if include_bot {
        alphabet.push((Label::Bot, 0));
    }
    let mut out = Vec::new();
    for k in 1..=max_nodes {
        let mut st = EnumState {
            alphabet: &alphabet,
            k,
            labels: vec![Label::Bot; k],
            succ: vec![Vec::new(); k],
            out: &mut out,
            limit,
        };
        st.node(0, 1)?;
    }
    Ok(out)
}

// Nodes are filled in id order; a successor is either an already discovered
// node or the next fresh id, which makes ids coincide with breadth-first
// discovery order, i.e. the canonical numbering.
struct EnumState<'a> {
    alphabet: &'a [(Label, usize)],
    k: usize,
    labels: Vec<Label>,
    succ: Vec<Vec<NodeId>>,
    out: &'a mut Vec<CanonicalTermGraph>,
    limit: usize,
}

impl EnumState<'_> {
    fn node(&mut self, i: usize, next: usize) -> Result<()> {
        if i == self.k {
            if next == self.k {
                if self.out.len() >= self.limit {
                    return Err(Error::SizeLimit { what: "enumeration", size: self.out.len() + 1, limit: self.limit });
                }
                let g = TermGraph::new(self.labels.clone(), self.succ.clone(), 0);
                self.out.push(canonicalize(&g));
            }
            return Ok(());
        }
        if i >= next {
            return Ok(());
        }
        for a in 0..self.alphabet.len() {
            let (l, arity) = self.alphabet[a].clone();
            self.labels[i] = l;
            self.succ[i] = Vec::with_capacity(arity);
            self.succs(i, arity, next)?;
        }
        Ok(())
    }

    fn succs(&mut self, i: usize, left: usize, next: usize) -> Result<()> {
        if left == 0 {
            return self.node(i + 1, next);
        }
        for t in 0..=next.min(self.k - 1) {
            self.succ[i].push(t);
            let nn = if t == next { next + 1 } else { next };
            self.succs(i, left - 1, nn)?;
            self.succ[i].pop();
        }
        Ok(())
    }
}
