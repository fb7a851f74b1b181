//! The `.tg` text format.
//!
//! ```text
//! sig { f/2; a/0; }
//! graph g { root n0; n0: f(n1, n1); n1: a; }
//! rule r { lhs l; rhs r; l: h(x); x: $x; r: f(l, l); }
//! system s { r; }
//! ```
//!
//! `_|_` is bottom, `$x` a variable, `#` starts a comment.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::canon::{canonicalize, Term};
use crate::graph::{Label, NodeId, Signature, TermGraph};
use crate::rewriting::Rule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub signature: Signature,
    pub graphs: Vec<(String, TermGraph)>,
    pub rules: Vec<Rule>,
    pub systems: Vec<(String, Vec<String>)>,
}

impl Document {
    pub fn parse(src: &str) -> Result<Document, ParseError> {
        Parser::new(src)?.document()
    }

    pub fn graph(&self, name: &str) -> Option<&TermGraph> {
        self.graphs.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name() == name)
    }

    pub fn system(&self, name: &str) -> Option<&[String]> {
        self.systems.iter().find(|(n, _)| n == name).map(|(_, r)| r.as_slice())
    }

    /// The declared signature, or the one implied by usage if nothing is
    /// declared.
    pub fn effective_signature(&self) -> Signature {
        if !self.signature.is_empty() {
            return self.signature.clone();
        }
        let mut sig = Signature::new();
        let graphs = self.graphs.iter().map(|(_, g)| g).chain(self.rules.iter().map(|r| r.graph()));
        for g in graphs {
            for n in g.nodes() {
                if let Label::Sym(s) = g.label(n) {
                    // conflicting arities are reported later by validation
                    let _ = sig.declare(s, g.succ(n).len());
                }
            }
        }
        sig
    }

    /// Serializes with every graph in canonical order, root first.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if !self.signature.is_empty() {
            out.push_str("sig {");
            for (s, a) in self.signature.symbols() {
                let _ = write!(out, " {s}/{a};");
            }
            out.push_str(" }\n");
        }
        for (name, g) in &self.graphs {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&serialize_graph(name, g));
        }
        for r in &self.rules {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&serialize_rule(r));
        }
        for (name, rules) in &self.systems {
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = write!(out, "system {name} {{");
            for r in rules {
                let _ = write!(out, " {r};");
            }
            out.push_str(" }\n");
        }
        out
    }
}

/// Parses a bare graph body: `root n; n: f(m, m); m: a;`.
pub fn parse_graph(src: &str) -> Result<TermGraph, ParseError> {
    let mut p = Parser::new(src)?;
    let g = p.graph_body(None)?;
    p.expect_eof()?;
    Ok(g)
}

/// Parses a term expression such as `f(a, h(_|_, $x))`.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

/// A single named graph in canonical form.
pub fn serialize_graph(name: &str, g: &TermGraph) -> String {
    let c = canonicalize(g);
    let mut out = format!("graph {name} {{\n  root n0;\n");
    for n in c.nodes() {
        let _ = writeln!(out, "  {};", node_def(&c, n, &|m| format!("n{m}")));
    }
    out.push_str("}\n");
    out
}

pub fn serialize_rule(r: &Rule) -> String {
    let g = r.graph();
    let order = rule_order(r);
    let mut id = vec![usize::MAX; g.len()];
    for (k, &n) in order.iter().enumerate() {
        id[n] = k;
    }
    let mut out = format!("rule {} {{\n  lhs n{};\n  rhs n{};\n", r.name(), id[r.lhs()], id[r.rhs()]);
    for &n in &order {
        let _ = writeln!(out, "  {};", node_def(g, n, &|m| format!("n{}", id[m])));
    }
    out.push_str("}\n");
    out
}

/// Breadth-first from the lhs root, then from the rhs root; leftovers last.
pub(crate) fn rule_order(r: &Rule) -> Vec<NodeId> {
    let g = r.graph();
    let mut seen = vec![false; g.len()];
    let mut order = Vec::new();
    for start in [r.lhs(), r.rhs()] {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let n = order[head];
            head += 1;
            for &m in g.succ(n) {
                if !seen[m] {
                    seen[m] = true;
                    order.push(m);
                }
            }
        }
    }
    order.extend(g.nodes().filter(|&n| !seen[n]));
    order
}

fn node_def(g: &TermGraph, n: NodeId, name: &dyn Fn(NodeId) -> String) -> String {
    let mut s = format!("{}: {}", name(n), g.label(n));
    let succ = g.succ(n);
    if !succ.is_empty() {
        let args: Vec<String> = succ.iter().map(|&m| name(m)).collect();
        let _ = write!(s, "({})", args.join(", "));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Bot,
    Dollar,
    Sym(char),
    Eof,
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if chars[i..].starts_with(&['_', '|', '_']) {
            out.push((Tok::Bot, l0, c0));
            i += 3;
            col += 3;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Word(chars[start..i].iter().collect()), l0, c0));
        } else if c == '$' {
            out.push((Tok::Dollar, l0, c0));
            i += 1;
            col += 1;
        } else if "{}();:,/".contains(c) {
            out.push((Tok::Sym(c), l0, c0));
            i += 1;
            col += 1;
        } else {
            return Err(ParseError { line, col, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

/// A node definition before ids are resolved.
struct RawNode {
    name: String,
    label: Label,
    args: Vec<(String, usize, usize)>,
    line: usize,
    col: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Bot => "`_|_`".into(),
            Tok::Dollar => "`$`".into(),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == &Tok::Sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`, found {}", self.describe()))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        if let Tok::Word(w) = self.peek() {
            let w = w.clone();
            self.pos += 1;
            Ok(w)
        } else {
            self.err(format!("expected {what}, found {}", self.describe()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Word(w) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`, found {}", self.describe())),
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.err(format!("expected end of input, found {}", self.describe()))
        }
    }

    fn document(&mut self) -> Result<Document, ParseError> {
        let mut doc = Document::default();
        loop {
            let (line, col) = self.here();
            let kw = match self.peek() {
                Tok::Eof => return Ok(doc),
                Tok::Word(w) => w.clone(),
                _ => return self.err(format!("expected an item, found {}", self.describe())),
            };
            self.pos += 1;
            let dup = |kind: &str, name: &str| ParseError { line, col, msg: format!("duplicate {kind} `{name}`") };
            match kw.as_str() {
                "sig" => self.sig(&mut doc.signature)?,
                "graph" => {
                    let name = self.word("a graph name")?;
                    self.expect_sym('{')?;
                    let g = self.graph_body(Some('}'))?;
                    self.expect_sym('}')?;
                    if doc.graph(&name).is_some() {
                        return Err(dup("graph", &name));
                    }
                    doc.graphs.push((name, g));
                }
                "rule" => {
                    let r = self.rule()?;
                    if doc.rule(r.name()).is_some() {
                        return Err(dup("rule", r.name()));
                    }
                    doc.rules.push(r);
                }
                "system" => {
                    let name = self.word("a system name")?;
                    self.expect_sym('{')?;
                    let mut rules = Vec::new();
                    while !self.eat_sym('}') {
                        rules.push(self.word("a rule name")?);
                        self.expect_sym(';')?;
                    }
                    if doc.system(&name).is_some() {
                        return Err(dup("system", &name));
                    }
                    doc.systems.push((name, rules));
                }
                other => {
                    return Err(ParseError { line, col, msg: format!("unknown item `{other}`") });
                }
            }
        }
    }

    fn sig(&mut self, sig: &mut Signature) -> Result<(), ParseError> {
        self.expect_sym('{')?;
        while !self.eat_sym('}') {
            let (line, col) = self.here();
            let name = self.word("a symbol")?;
            self.expect_sym('/')?;
            let (al, ac) = self.here();
            let arity = self.word("an arity")?;
            let arity: usize = arity
                .parse()
                .map_err(|_| ParseError { line: al, col: ac, msg: format!("`{arity}` is not an arity") })?;
            self.expect_sym(';')?;
            sig.declare(&name, arity).map_err(|msg| ParseError { line, col, msg })?;
        }
        Ok(())
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        match self.peek().clone() {
            Tok::Bot => {
                self.pos += 1;
                Ok(Label::Bot)
            }
            Tok::Dollar => {
                self.pos += 1;
                Ok(Label::var(&self.word("a variable name")?))
            }
            Tok::Word(w) => {
                self.pos += 1;
                Ok(Label::sym(&w))
            }
            _ => self.err(format!("expected a label, found {}", self.describe())),
        }
    }

    fn node_def(&mut self) -> Result<RawNode, ParseError> {
        let (line, col) = self.here();
        let name = self.word("a node name")?;
        self.expect_sym(':')?;
        let label = self.label()?;
        let mut args = Vec::new();
        if self.eat_sym('(') {
            loop {
                let (l, c) = self.here();
                args.push((self.word("a node name")?, l, c));
                if self.eat_sym(')') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        self.expect_sym(';')?;
        Ok(RawNode { name, label, args, line, col })
    }

    fn node_defs(&mut self, close: Option<char>) -> Result<Vec<RawNode>, ParseError> {
        let mut nodes = Vec::new();
        loop {
            match (self.peek(), close) {
                (Tok::Sym(c), Some(cl)) if *c == cl => return Ok(nodes),
                (Tok::Eof, _) => return Ok(nodes),
                _ => nodes.push(self.node_def()?),
            }
        }
    }

    fn graph_body(&mut self, close: Option<char>) -> Result<TermGraph, ParseError> {
        self.keyword("root")?;
        let (rl, rc) = self.here();
        let root = self.word("a node name")?;
        self.expect_sym(';')?;
        let nodes = self.node_defs(close)?;
        let (ids, labels, succ) = resolve(&nodes)?;
        let root = *ids.get(&root).ok_or(ParseError { line: rl, col: rc, msg: format!("undefined node `{root}`") })?;
        Ok(TermGraph::new(labels, succ, root))
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let name = self.word("a rule name")?;
        self.expect_sym('{')?;
        self.keyword("lhs")?;
        let (ll, lc) = self.here();
        let lhs = self.word("a node name")?;
        self.expect_sym(';')?;
        self.keyword("rhs")?;
        let (rl, rc) = self.here();
        let rhs = self.word("a node name")?;
        self.expect_sym(';')?;
        let nodes = self.node_defs(Some('}'))?;
        self.expect_sym('}')?;
        let (ids, labels, succ) = resolve(&nodes)?;
        let lhs = *ids.get(&lhs).ok_or(ParseError { line: ll, col: lc, msg: format!("undefined node `{lhs}`") })?;
        let rhs = *ids.get(&rhs).ok_or(ParseError { line: rl, col: rc, msg: format!("undefined node `{rhs}`") })?;
        Ok(Rule::new(&name, TermGraph::new(labels, succ, lhs), lhs, rhs))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let label = self.label()?;
        let mut children = Vec::new();
        if self.eat_sym('(') {
            loop {
                children.push(self.term()?);
                if self.eat_sym(')') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        Ok(Term::node(label, children))
    }
}

type Resolved = (BTreeMap<String, NodeId>, Vec<Label>, Vec<Vec<NodeId>>);

fn resolve(nodes: &[RawNode]) -> Result<Resolved, ParseError> {
    let mut ids: HashMap<&str, NodeId> = HashMap::new();
    for (k, n) in nodes.iter().enumerate() {
        if ids.insert(&n.name, k).is_some() {
            return Err(ParseError { line: n.line, col: n.col, msg: format!("node `{}` defined twice", n.name) });
        }
    }
    let mut succ = Vec::with_capacity(nodes.len());
    for n in nodes {
        let mut s = Vec::with_capacity(n.args.len());
        for (a, l, c) in &n.args {
            let id = *ids.get(a.as_str()).ok_or(ParseError { line: *l, col: *c, msg: format!("undefined node `{a}`") })?;
            s.push(id);
        }
        succ.push(s);
    }
    let labels = nodes.iter().map(|n| n.label.clone()).collect();
    let ids = ids.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Ok((ids, labels, succ))
}
