use std::fmt;
use std::ops::Deref;

use crate::graph::{depths, Depth, Label, NodeId, TermGraph};

/// A term graph whose node ids follow the order of minimal positions.
///
/// Two canonical graphs are equal iff the underlying graphs are isomorphic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalTermGraph(TermGraph);

impl CanonicalTermGraph {
    pub fn bottom() -> Self {
        CanonicalTermGraph(TermGraph::bottom())
    }

    pub fn as_graph(&self) -> &TermGraph {
        &self.0
    }

    pub fn into_graph(self) -> TermGraph {
        self.0
    }
}

impl Deref for CanonicalTermGraph {
    type Target = TermGraph;

    fn deref(&self) -> &TermGraph {
        &self.0
    }
}

impl AsRef<TermGraph> for CanonicalTermGraph {
    fn as_ref(&self) -> &TermGraph {
        &self.0
    }
}

impl AsRef<TermGraph> for TermGraph {
    fn as_ref(&self) -> &TermGraph {
        self
    }
}

impl From<CanonicalTermGraph> for TermGraph {
    fn from(c: CanonicalTermGraph) -> Self {
        c.0
    }
}

/// Renumbers the nodes reachable from the root in breadth-first, child-order
/// discovery order, which is the order of minimal positions.
///
/// Returns the canonical graph and the map from old ids to new ids
/// (`usize::MAX` for unreachable nodes).
pub fn canonicalize_with_map(g: &TermGraph) -> (CanonicalTermGraph, Vec<NodeId>) {
    let mut new_id = vec![usize::MAX; g.len()];
    let mut order = Vec::with_capacity(g.len());
    new_id[g.root()] = 0;
    order.push(g.root());
    let mut head = 0;
    while head < order.len() {
        let n = order[head];
        head += 1;
        for &m in g.succ(n) {
            if new_id[m] == usize::MAX {
                new_id[m] = order.len();
                order.push(m);
            }
        }
    }
    let labels = order.iter().map(|&n| g.label(n).clone()).collect();
    let succ = order
        .iter()
        .map(|&n| g.succ(n).iter().map(|&m| new_id[m]).collect())
        .collect();
    (CanonicalTermGraph(TermGraph::new(labels, succ, 0)), new_id)
}

pub fn canonicalize(g: &TermGraph) -> CanonicalTermGraph {
    canonicalize_with_map(g).0
}

/// A term tree, kept in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Term(CanonicalTermGraph);

impl Term {
    /// Fails (returning the input) unless the graph is a tree.
    pub fn from_graph(g: &TermGraph) -> Result<Term, TermGraph> {
        if g.is_tree() {
            Ok(Term(canonicalize(g)))
        } else {
            Err(g.clone())
        }
    }

    pub fn leaf(label: Label) -> Term {
        Term(CanonicalTermGraph(TermGraph::new(vec![label], vec![vec![]], 0)))
    }

    pub fn bottom() -> Term {
        Term::leaf(Label::Bot)
    }

    /// Builds `label(children...)`.
    pub fn node(label: Label, children: Vec<Term>) -> Term {
        let mut labels = vec![label];
        let mut succ = vec![Vec::new()];
        for c in children {
            let off = labels.len();
            succ[0].push(off + c.root());
            for n in c.nodes() {
                labels.push(c.label(n).clone());
                succ.push(c.succ(n).iter().map(|&m| m + off).collect());
            }
        }
        Term(canonicalize(&TermGraph::new(labels, succ, 0)))
    }

    pub fn as_canonical(&self) -> &CanonicalTermGraph {
        &self.0
    }

    pub fn into_canonical(self) -> CanonicalTermGraph {
        self.0
    }

    pub fn children(&self) -> Vec<Term> {
        self.0
            .succ(self.0.root())
            .iter()
            .map(|&c| Term(canonicalize(&self.0.subgraph(c).0)))
            .collect()
    }
}

impl Deref for Term {
    type Target = TermGraph;

    fn deref(&self) -> &TermGraph {
        &self.0
    }
}

impl AsRef<TermGraph> for Term {
    fn as_ref(&self) -> &TermGraph {
        &self.0
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &TermGraph, n: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{}", t.label(n))?;
            let s = t.succ(n);
            if !s.is_empty() {
                f.write_str("(")?;
                for (i, &m) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    go(t, m, f)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
        go(&self.0, self.0.root(), f)
    }
}

/// Replaces every subterm at depth `d` by `_|_`.
pub fn term_truncate(t: &Term, d: Depth) -> Term {
    let Depth::Finite(d) = d else { return t.clone() };
    let dep = depths(t);
    let labels = t
        .nodes()
        .map(|n| if dep[n] >= d { Label::Bot } else { t.label(n).clone() })
        .collect();
    let succ = t
        .nodes()
        .map(|n| if dep[n] >= d { Vec::new() } else { t.succ(n).to_vec() })
        .collect();
    Term(canonicalize(&TermGraph::new(labels, succ, t.root())))
}

/// The unravelling of `g` cut off at depth `d`: positions shorter than `d`
/// keep their labels, positions of length `d` become `_|_`.
pub fn unravel_to_depth(g: &TermGraph, d: usize) -> Term {
    let mut labels = Vec::new();
    let mut succ: Vec<Vec<NodeId>> = Vec::new();
    // (graph node, tree node, depth)
    let mut stack = vec![(g.root(), 0usize, 0usize)];
    labels.push(Label::Bot);
    succ.push(Vec::new());
    while let Some((n, t, k)) = stack.pop() {
        if k >= d {
            continue;
        }
        labels[t] = g.label(n).clone();
        for &m in g.succ(n) {
            let c = labels.len();
            labels.push(Label::Bot);
            succ.push(Vec::new());
            succ[t].push(c);
            stack.push((m, c, k + 1));
        }
    }
    Term(canonicalize(&TermGraph::new(labels, succ, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_graph, parse_term};

    #[test]
    fn renumbering() {
        let g = parse_graph("root a; b: c; a: f(b, b);").unwrap();
        let c = canonicalize(&g);
        assert_eq!(c.as_graph(), &parse_graph("root n0; n0: f(n1, n1); n1: c;").unwrap());
        assert_eq!(c.root(), 0);
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn equivalent_presentations_agree() {
        // four nodes, with sharing and a cycle, under two different namings
        let g1 = parse_graph("root r; r: f(x, y); x: g(y); y: h(r, x); ").unwrap();
        let g2 = parse_graph("root q; y: g(x); x: h(q, y); q: f(y, x);").unwrap();
        assert_eq!(canonicalize(&g1), canonicalize(&g2));
    }

    #[test]
    fn truncation_of_terms() {
        let t = parse_term("f(a, h(a, b))").unwrap();
        assert_eq!(term_truncate(&t, Depth::Finite(1)), parse_term("f(_|_, _|_)").unwrap());
        assert_eq!(term_truncate(&t, Depth::Finite(0)), Term::bottom());
        assert_eq!(term_truncate(&t, Depth::Omega), t);
    }

    #[test]
    fn unravelling() {
        let g2 = parse_graph("root n0; n0: cons(n1, n0); n1: b;").unwrap();
        assert_eq!(unravel_to_depth(&g2, 2), parse_term("cons(b, cons(_|_, _|_))").unwrap());

        let shared = parse_graph("root r; r: f(a, a); a: a;").unwrap();
        let tree = parse_graph("root r; r: f(x, y); x: a; y: a;").unwrap();
        let t = parse_term("f(a, a)").unwrap();
        assert_eq!(unravel_to_depth(&shared, 2), t);
        assert_eq!(unravel_to_depth(&tree, 2), t);
    }

    #[test]
    fn term_construction_and_display() {
        let t = Term::node(Label::sym("f"), vec![Term::leaf(Label::sym("a")), Term::bottom()]);
        assert_eq!(t.to_string(), "f(a,_|_)");
        assert_eq!(t.children().len(), 2);
        assert!(Term::from_graph(&parse_graph("root r; r: f(a, a); a: a;").unwrap()).is_err());
    }
}
