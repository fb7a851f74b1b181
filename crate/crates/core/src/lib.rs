//! Infinitary term graph rewriting: canonical term graphs, the rigid partial
//! order and rigid metric on them, and rewriting with convergence analysis.

pub mod canon;
pub mod dot;
pub mod error;
pub mod graph;
pub mod hom;
pub mod metric;
pub mod order;
pub mod rewriting;
pub mod text;

pub use canon::{canonicalize, term_truncate, unravel_to_depth, CanonicalTermGraph, Term};
pub use error::{Error, Result, RuleViolation, Violation};
pub use graph::{
    acyclic_positions, aliases, bot_depth, delta_depth, depth, graph_depth, node_at, validate, Depth, Label, NodeId,
    Position, Signature, TermGraph,
};
pub use hom::{
    find_delta_hom, find_rigid_bot_hom, is_isomorphic, is_rigid, position_sets_intersect, unravel_eq, Delta, NodeMap,
};
pub use metric::{distance, limit_of_sequence, similarity, truncate, truncation_parts, DyadicDistance, MetricLimit};
pub use order::{
    enumerate_canonical, glb, glb2, is_maximal_total, leq_injective, leq_rigid, leq_simple, liminf, lub_compatible,
    lub_directed_finite, ApproxResult, Exactness, SequenceProvider,
};
pub use rewriting::{
    analyze_m_convergence, analyze_p_convergence, apply_rule, find_redexes, match_rule, run, step, unravel_rule,
    validate_rule, Grs, ReductionStep, ReductionTrace, Rule, Strategy, Termination,
};
pub use text::{parse_graph, parse_term, Document, ParseError};
