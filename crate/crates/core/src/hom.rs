use std::collections::{BTreeSet, HashMap};

use crate::canon::canonicalize;
use crate::error::{Error, Result};
use crate::graph::{all_acyclic_positions, walk, Label, NodeId, TermGraph};

/// The set of labels at which homomorphism conditions are suspended.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Delta {
    labels: BTreeSet<Label>,
    variables: bool,
}

impl Delta {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn bot() -> Self {
        Self::from_labels([Label::Bot])
    }

    /// All variables.
    pub fn variables() -> Self {
        Delta { labels: BTreeSet::new(), variables: true }
    }

    pub fn from_labels(labels: impl IntoIterator<Item = Label>) -> Self {
        Delta { labels: labels.into_iter().collect(), variables: false }
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.labels.contains(l) || (self.variables && l.is_var())
    }
}

/// A node map from a source graph into a target graph.
///
/// Entries are `None` for source nodes outside the mapped part (only
/// happens for rule matches, where just the left-hand side is mapped).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMap {
    map: Vec<Option<NodeId>>,
    delta: Delta,
}

impl NodeMap {
    pub fn get(&self, n: NodeId) -> Option<NodeId> {
        self.map.get(n).copied().flatten()
    }

    /// Panics if `n` is unmapped.
    pub fn apply(&self, n: NodeId) -> NodeId {
        self.get(n).expect("node outside the domain of the map")
    }

    pub fn delta(&self) -> &Delta {
        &self.delta
    }

    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.map.iter().enumerate().filter_map(|(n, m)| m.map(|m| (n, m)))
    }

    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    pub fn from_vec(map: Vec<NodeId>, delta: Delta) -> Self {
        NodeMap { map: map.into_iter().map(Some).collect(), delta }
    }
}

/// The unique Δ-homomorphism from `g` into `h`, if there is one.
pub fn find_delta_hom(g: &TermGraph, h: &TermGraph, delta: &Delta) -> Option<NodeMap> {
    find_delta_hom_at(g, g.root(), h, h.root(), delta)
}

/// Δ-homomorphism from the part of `g` reachable from `gs` into the part
/// of `h` reachable from `hs`, sending `gs` to `hs`.
pub fn find_delta_hom_at(g: &TermGraph, gs: NodeId, h: &TermGraph, hs: NodeId, delta: &Delta) -> Option<NodeMap> {
    let mut map = vec![None; g.len()];
    map[gs] = Some(hs);
    let mut stack = vec![gs];
    while let Some(n) = stack.pop() {
        let m = map[n].unwrap();
        if delta.contains(g.label(n)) {
            continue;
        }
        if g.label(n) != h.label(m) || g.succ(n).len() != h.succ(m).len() {
            return None;
        }
        for (&a, &b) in g.succ(n).iter().zip(h.succ(m)) {
            match map[a] {
                Some(x) if x != b => return None,
                Some(_) => {}
                None => {
                    map[a] = Some(b);
                    stack.push(a);
                }
            }
        }
    }
    Some(NodeMap { map, delta: delta.clone() })
}

/// Checks the root, labelling and successor conditions.
pub fn check_hom(map: &NodeMap, g: &TermGraph, h: &TermGraph) -> Result<()> {
    let bad = |s: String| Err(Error::NotAHomomorphism(s));
    if map.map.len() != g.len() || !map.is_total() {
        return bad("map is not total on the source".into());
    }
    if map.apply(g.root()) != h.root() {
        return bad("root is not mapped to root".into());
    }
    for n in g.nodes() {
        let m = map.apply(n);
        if !h.contains(m) {
            return bad(format!("node {n} is mapped outside the target"));
        }
        if map.delta.contains(g.label(n)) {
            continue;
        }
        if g.label(n) != h.label(m) {
            return bad(format!("labels of {n} and {m} differ"));
        }
        if g.succ(n).len() != h.succ(m).len()
            || g.succ(n).iter().zip(h.succ(m)).any(|(&a, &b)| map.apply(a) != b)
        {
            return bad(format!("successors of {n} are not preserved"));
        }
    }
    Ok(())
}

/// Rigidity via the one-sided criterion: every acyclic position of the image
/// of a non-Δ node must be a position of that node in the source.
pub fn is_rigid(map: &NodeMap, g: &TermGraph, h: &TermGraph) -> Result<bool> {
    check_hom(map, g, h)?;
    let acyc = all_acyclic_positions(h)?;
    Ok(rigid_against(map, g, &acyc))
}

fn rigid_against(map: &NodeMap, g: &TermGraph, acyc_h: &[Vec<crate::graph::Position>]) -> bool {
    g.nodes()
        .filter(|&n| !map.delta.contains(g.label(n)))
        .all(|n| acyc_h[map.apply(n)].iter().all(|p| walk(g, g.root(), &p.0) == Some(n)))
}

/// The rigid ⊥-homomorphism from `g` into `h`, if any.
pub fn find_rigid_bot_hom(g: &TermGraph, h: &TermGraph) -> Result<Option<NodeMap>> {
    let Some(map) = find_delta_hom(g, h, &Delta::bot()) else { return Ok(None) };
    let acyc = all_acyclic_positions(h)?;
    Ok(rigid_against(&map, g, &acyc).then_some(map))
}

pub fn is_isomorphic(g: &TermGraph, h: &TermGraph) -> bool {
    canonicalize(g) == canonicalize(h)
}

/// Whether both graphs unravel to the same (possibly infinite) term.
///
/// Coarsest partition of the disjoint union that is stable under labels and
/// indexed successors; the roots must end up in the same block.
pub fn unravel_eq(g: &TermGraph, h: &TermGraph) -> bool {
    let off = g.len();
    let total = g.len() + h.len();
    let label = |n: NodeId| if n < off { g.label(n) } else { h.label(n - off) };
    let succ = |n: NodeId| -> Vec<NodeId> {
        if n < off {
            g.succ(n).to_vec()
        } else {
            h.succ(n - off).iter().map(|&m| m + off).collect()
        }
    };
    let mut ids: HashMap<&Label, usize> = HashMap::new();
    let mut block: Vec<usize> = (0..total)
        .map(|n| {
            let k = ids.len();
            *ids.entry(label(n)).or_insert(k)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..total)
            .map(|n| {
                let key = (block[n], succ(n).iter().map(|&m| block[m]).collect());
                let k = sigs.len();
                *sigs.entry(key).or_insert(k)
            })
            .collect();
        let new_count = sigs.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    block[g.root()] == block[h.root() + off]
}

/// Pairs `(n, m)` that share a position, found by walking both graphs in
/// lockstep from the roots.
pub fn intersecting_pairs(g: &TermGraph, h: &TermGraph) -> Vec<(NodeId, NodeId)> {
    let mut seen = vec![false; g.len() * h.len()];
    let mut out = vec![(g.root(), h.root())];
    seen[g.root() * h.len() + h.root()] = true;
    let mut head = 0;
    while head < out.len() {
        let (a, b) = out[head];
        head += 1;
        for (&x, &y) in g.succ(a).iter().zip(h.succ(b)) {
            if !seen[x * h.len() + y] {
                seen[x * h.len() + y] = true;
                out.push((x, y));
            }
        }
    }
    out
}

/// Whether some position reaches `n` in `g` and `m` in `h`.
pub fn position_sets_intersect(g: &TermGraph, n: NodeId, h: &TermGraph, m: NodeId) -> Result<bool> {
    if !g.contains(n) {
        return Err(Error::UnknownNode(n));
    }
    if !h.contains(m) {
        return Err(Error::UnknownNode(m));
    }
    Ok(intersecting_pairs(g, h).contains(&(n, m)))
}
