use thiserror::Error;

use crate::graph::{NodeId, Position};

/// A single structural problem found by validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("node {0}: number of successors does not match the arity of its label")]
    ArityMismatch(NodeId),
    #[error("node {0} is not reachable from the root")]
    UnreachableNode(NodeId),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("node {node}: successor {index} does not exist")]
    DanglingSuccessor { node: NodeId, index: usize },
    #[error("root node {0} does not exist")]
    DanglingRoot(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid term graph: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("position {0} is not a position of the graph")]
    InvalidPosition(Position),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("size limit exceeded: {what} ({size} > {limit})")]
    SizeLimit { what: &'static str, size: usize, limit: usize },
    #[error("map is not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("glb of an empty set")]
    EmptySet,
    #[error("incompatible: {0}")]
    Incompatible(String),
    #[error("set is not directed")]
    NotDirected,
    #[error("empty sequence")]
    EmptySequence,
    #[error("sequence element {0} is partial (contains _|_)")]
    PartialInput(usize),
    #[error("rule `{rule}` is not applicable at node {node}")]
    NotApplicable { rule: String, node: NodeId },
    #[error("script step {step}: rule `{rule}` does not match at {position}")]
    ScriptMismatch { step: usize, rule: String, position: Position },
    #[error("invalid rule `{rule}`: {}", join(.errors))]
    InvalidRule { rule: String, errors: Vec<RuleViolation> },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleViolation {
    #[error("variable `{0}` is not reachable from the left-hand side")]
    VariableNotInLhs(String),
    #[error("variable `{0}` labels more than one node")]
    DuplicateVariableNode(String),
    #[error("left-hand side root is a variable")]
    VariableAtLhsRoot,
    #[error("node {0}: number of successors does not match the arity of its label")]
    ArityMismatch(NodeId),
    #[error("node {0} is reachable from neither side")]
    UnreachableNode(NodeId),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("node {0} is labelled _|_")]
    BottomInRule(NodeId),
    #[error("node {node}: successor {index} does not exist")]
    DanglingSuccessor { node: NodeId, index: usize },
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
