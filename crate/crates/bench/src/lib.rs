//! Graph families used by the benchmarks.

use tg_core::{Label, TermGraph};

/// `f` chain of length `n` where every node points twice at the next one,
/// ending in `leaf`.
pub fn shared_chain(n: usize, leaf: Label) -> TermGraph {
    let mut labels = vec![Label::sym("f"); n];
    let mut succ: Vec<Vec<usize>> = (0..n).map(|i| vec![i + 1, i + 1]).collect();
    labels.push(leaf);
    succ.push(vec![]);
    TermGraph::new(labels, succ, 0)
}

/// `f` chain of length `n` whose last node loops back to node `back`.
pub fn lasso(n: usize, back: usize) -> TermGraph {
    let labels = vec![Label::sym("f"); n];
    let succ = (0..n)
        .map(|i| if i + 1 < n { vec![i + 1, i + 1] } else { vec![back, i] })
        .collect();
    TermGraph::new(labels, succ, 0)
}

/// Complete binary tree of the given depth with `a` leaves.
pub fn tree(depth: usize) -> TermGraph {
    let mut labels = Vec::new();
    let mut succ = Vec::new();
    fn build(d: usize, labels: &mut Vec<Label>, succ: &mut Vec<Vec<usize>>) -> usize {
        let id = labels.len();
        labels.push(if d == 0 { Label::sym("a") } else { Label::sym("f") });
        succ.push(vec![]);
        if d > 0 {
            let l = build(d - 1, labels, succ);
            let r = build(d - 1, labels, succ);
            succ[id] = vec![l, r];
        }
        id
    }
    build(depth, &mut labels, &mut succ);
    TermGraph::new(labels, succ, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tg_core::{graph_depth, Depth};

    #[test]
    fn families_are_well_formed() {
        for g in [shared_chain(5, Label::Bot), lasso(5, 2), tree(3)] {
            assert!(g.check().is_ok());
        }
        assert_eq!(graph_depth(&shared_chain(5, Label::sym("a"))), Depth::Finite(5));
        assert_eq!(tree(3).len(), 15);
    }
}
