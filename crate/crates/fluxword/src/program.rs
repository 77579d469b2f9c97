//! Product-form programs as DAGs.

use std::collections::HashMap;
use std::fmt::Write as _;

use fluxgroup::{ElemId, FiniteGroup, Perm};

use crate::WordError;

/// A leaf of a product-form word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Const(Perm),
    Input(usize),
    InputInverse(usize),
}

impl Atom {
    pub fn inverse(&self) -> Atom {
        match self {
            Atom::Const(p) => Atom::Const(p.inverse()),
            Atom::Input(i) => Atom::InputInverse(*i),
            Atom::InputInverse(i) => Atom::Input(*i),
        }
    }
}

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// The empty product.
    Empty,
    Atom(Atom),
    Concat(NodeId, NodeId),
    Inverse(NodeId),
    /// `[x, y] = x y x^-1 y^-1`.
    Commutator(NodeId, NodeId),
}

/// A product-form function `G^arity -> G`.
///
/// Nodes are stored in topological order; the root is reachable from every
/// node after [`ProgramBuilder::finish`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    arity: usize,
    degree: usize,
    nodes: Vec<Node>,
    root: NodeId,
}

/// Hash-consing builder; identical sub-expressions share one node.
#[derive(Clone, Debug)]
pub struct ProgramBuilder {
    arity: usize,
    degree: usize,
    nodes: Vec<Node>,
    dedup: HashMap<Node, NodeId>,
}

impl ProgramBuilder {
    pub fn new(arity: usize, degree: usize) -> Self {
        let mut b = ProgramBuilder {
            arity,
            degree,
            nodes: Vec::new(),
            dedup: HashMap::new(),
        };
        b.intern(Node::Empty);
        b
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.dedup.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.dedup.insert(node, id);
        id
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn empty(&self) -> NodeId {
        0
    }

    pub fn is_empty(&self, id: NodeId) -> bool {
        id == 0
    }

    pub fn constant(&mut self, p: Perm) -> NodeId {
        assert_eq!(p.degree(), self.degree, "constant degree");
        if p.is_identity() {
            return self.empty();
        }
        self.intern(Node::Atom(Atom::Const(p)))
    }

    pub fn input(&mut self, slot: usize) -> NodeId {
        assert!(slot < self.arity, "slot out of range");
        self.intern(Node::Atom(Atom::Input(slot)))
    }

    pub fn input_inverse(&mut self, slot: usize) -> NodeId {
        assert!(slot < self.arity, "slot out of range");
        self.intern(Node::Atom(Atom::InputInverse(slot)))
    }

    pub fn atom(&mut self, a: Atom) -> NodeId {
        match a {
            Atom::Const(p) => self.constant(p),
            Atom::Input(i) => self.input(i),
            Atom::InputInverse(i) => self.input_inverse(i),
        }
    }

    pub fn concat(&mut self, x: NodeId, y: NodeId) -> NodeId {
        if self.is_empty(x) {
            return y;
        }
        if self.is_empty(y) {
            return x;
        }
        self.intern(Node::Concat(x, y))
    }

    pub fn product(&mut self, xs: &[NodeId]) -> NodeId {
        xs.iter().fold(self.empty(), |acc, &x| self.concat(acc, x))
    }

    pub fn inverse(&mut self, x: NodeId) -> NodeId {
        match self.nodes[x].clone() {
            Node::Empty => x,
            Node::Atom(a) => self.atom(a.inverse()),
            Node::Inverse(inner) => inner,
            _ => self.intern(Node::Inverse(x)),
        }
    }

    pub fn commutator(&mut self, x: NodeId, y: NodeId) -> NodeId {
        if self.is_empty(x) || self.is_empty(y) {
            return self.empty();
        }
        self.intern(Node::Commutator(x, y))
    }

    /// `c x c^-1` for a constant `c`.
    pub fn conjugate_by_const(&mut self, c: &Perm, x: NodeId) -> NodeId {
        if c.is_identity() {
            return x;
        }
        let l = self.constant(c.clone());
        let r = self.constant(c.inverse());
        let lx = self.concat(l, x);
        self.concat(lx, r)
    }

    /// Copies `p` into this builder with its input slots replaced by `args`.
    pub fn embed(&mut self, p: &Program, args: &[NodeId]) -> NodeId {
        assert_eq!(args.len(), p.arity, "embed arity");
        assert_eq!(p.degree, self.degree, "embed degree");
        let mut map = Vec::with_capacity(p.nodes.len());
        for node in &p.nodes {
            let id = match node {
                Node::Empty => self.empty(),
                Node::Atom(Atom::Const(c)) => self.constant(c.clone()),
                Node::Atom(Atom::Input(i)) => args[*i],
                Node::Atom(Atom::InputInverse(i)) => self.inverse(args[*i]),
                Node::Concat(x, y) => self.concat(map[*x], map[*y]),
                Node::Inverse(x) => self.inverse(map[*x]),
                Node::Commutator(x, y) => self.commutator(map[*x], map[*y]),
            };
            map.push(id);
        }
        map[p.root]
    }

    /// Extracts the sub-DAG reachable from `root`.
    pub fn finish(&self, root: NodeId) -> Program {
        let mut reach = vec![false; self.nodes.len()];
        reach[root] = true;
        for id in (0..self.nodes.len()).rev() {
            if !reach[id] {
                continue;
            }
            match self.nodes[id] {
                Node::Concat(x, y) | Node::Commutator(x, y) => {
                    reach[x] = true;
                    reach[y] = true;
                }
                Node::Inverse(x) => reach[x] = true,
                _ => {}
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if !reach[id] {
                continue;
            }
            remap[id] = nodes.len();
            nodes.push(match node {
                Node::Concat(x, y) => Node::Concat(remap[*x], remap[*y]),
                Node::Commutator(x, y) => Node::Commutator(remap[*x], remap[*y]),
                Node::Inverse(x) => Node::Inverse(remap[*x]),
                other => other.clone(),
            });
        }
        Program {
            arity: self.arity,
            degree: self.degree,
            root: remap[root],
            nodes,
        }
    }
}

impl Program {
    /// The constant-identity program.
    pub fn identity(arity: usize, degree: usize) -> Program {
        ProgramBuilder::new(arity, degree).finish(0)
    }

    /// A program whose flattened word is `word`.
    pub fn from_word(arity: usize, degree: usize, word: &[Atom]) -> Program {
        let mut b = ProgramBuilder::new(arity, degree);
        let ids: Vec<NodeId> = word.iter().map(|a| b.atom(a.clone())).collect();
        let root = b.product(&ids);
        b.finish(root)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Number of DAG nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.nodes[self.root], Node::Empty)
    }

    /// Evaluates on permutations directly, memoising each node once.
    pub fn evaluate(&self, env: &[Perm]) -> Result<Perm, WordError> {
        if env.len() != self.arity {
            return Err(WordError::ArityMismatch {
                expected: self.arity,
                got: env.len(),
            });
        }
        for p in env {
            if p.degree() != self.degree {
                return Err(WordError::DegreeMismatch);
            }
        }
        let mut vals: Vec<Perm> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Empty => Perm::identity(self.degree),
                Node::Atom(Atom::Const(c)) => c.clone(),
                Node::Atom(Atom::Input(i)) => env[*i].clone(),
                Node::Atom(Atom::InputInverse(i)) => env[*i].inverse(),
                Node::Concat(x, y) => vals[*x].mul(&vals[*y]),
                Node::Inverse(x) => vals[*x].inverse(),
                Node::Commutator(x, y) => {
                    let (a, b) = (&vals[*x], &vals[*y]);
                    a.mul(b).mul(&a.inverse()).mul(&b.inverse())
                }
            };
            vals.push(v);
        }
        Ok(vals.swap_remove(self.root))
    }

    /// Length of the flattened word, saturating at `u64::MAX`.
    pub fn flat_len(&self) -> u64 {
        let mut len: Vec<u64> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let l = match node {
                Node::Empty => 0,
                Node::Atom(_) => 1,
                Node::Concat(x, y) => len[*x].saturating_add(len[*y]),
                Node::Inverse(x) => len[*x],
                Node::Commutator(x, y) => len[*x].saturating_add(len[*y]).saturating_mul(2),
            };
            len.push(l);
        }
        len[self.root]
    }

    /// Expands the DAG into a word; refuses words longer than `max_len`.
    pub fn flatten(&self, max_len: u64) -> Result<Vec<Atom>, WordError> {
        let n = self.flat_len();
        if n > max_len {
            return Err(WordError::TooLong { len: n, max: max_len });
        }
        let mut out = Vec::with_capacity(n as usize);
        self.expand(self.root, false, &mut out);
        Ok(out)
    }

    fn expand(&self, id: NodeId, inverted: bool, out: &mut Vec<Atom>) {
        match &self.nodes[id] {
            Node::Empty => {}
            Node::Atom(a) => out.push(if inverted { a.inverse() } else { a.clone() }),
            Node::Concat(x, y) => {
                if inverted {
                    self.expand(*y, true, out);
                    self.expand(*x, true, out);
                } else {
                    self.expand(*x, false, out);
                    self.expand(*y, false, out);
                }
            }
            Node::Inverse(x) => self.expand(*x, !inverted, out),
            Node::Commutator(x, y) => {
                // [x,y]^-1 = [y,x]
                let (x, y) = if inverted { (*y, *x) } else { (*x, *y) };
                self.expand(x, false, out);
                self.expand(y, false, out);
                self.expand(x, true, out);
                self.expand(y, true, out);
            }
        }
    }

    /// Flattened word with adjacent constants merged, identity constants
    /// dropped and `g g^-1` pairs cancelled.
    pub fn flatten_simplified(&self, max_len: u64) -> Result<Vec<Atom>, WordError> {
        Ok(simplify_word(&self.flatten(max_len)?))
    }

    /// Numbered-definition text form.
    pub fn to_dag_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "arity {}", self.arity);
        let _ = writeln!(s, "degree {}", self.degree);
        for (i, node) in self.nodes.iter().enumerate() {
            let rhs = match node {
                Node::Empty => "empty".to_string(),
                Node::Atom(Atom::Const(c)) => format!("const {c}"),
                Node::Atom(Atom::Input(k)) => format!("in {k}"),
                Node::Atom(Atom::InputInverse(k)) => format!("inv {k}"),
                Node::Concat(x, y) => format!("n{x} n{y}"),
                Node::Inverse(x) => format!("inverse n{x}"),
                Node::Commutator(x, y) => format!("[n{x}, n{y}]"),
            };
            let _ = writeln!(s, "let n{i} = {rhs}");
        }
        let _ = writeln!(s, "root n{}", self.root);
        s
    }

    pub fn from_dag_text(text: &str) -> Result<Program, WordError> {
        let mut arity = None;
        let mut degree = None;
        let mut b: Option<ProgramBuilder> = None;
        let mut names: HashMap<String, NodeId> = HashMap::new();
        let mut root = None;
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| WordError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix("arity ") {
                arity = Some(rest.trim().parse().map_err(|_| bad("bad arity"))?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("degree ") {
                degree = Some(rest.trim().parse().map_err(|_| bad("bad degree"))?);
                continue;
            }
            if b.is_none() {
                let (a, d) = (
                    arity.ok_or_else(|| bad("missing arity header"))?,
                    degree.ok_or_else(|| bad("missing degree header"))?,
                );
                b = Some(ProgramBuilder::new(a, d));
            }
            let bld = b.as_mut().expect("builder");
            let lookup = |names: &HashMap<String, NodeId>, t: &str| {
                names
                    .get(t.trim())
                    .copied()
                    .ok_or_else(|| bad(&format!("unknown node '{}'", t.trim())))
            };
            if let Some(rest) = line.strip_prefix("root ") {
                root = Some(lookup(&names, rest)?);
                continue;
            }
            let rest = line.strip_prefix("let ").ok_or_else(|| bad("expected let/root"))?;
            let (name, rhs) = rest.split_once('=').ok_or_else(|| bad("expected '='"))?;
            let rhs = rhs.trim();
            let id = if rhs == "empty" {
                bld.empty()
            } else if let Some(c) = rhs.strip_prefix("const ") {
                let p = Perm::parse(c, bld.degree).map_err(|e| bad(&e.to_string()))?;
                bld.constant(p)
            } else if let Some(k) = rhs.strip_prefix("in ") {
                let k: usize = k.trim().parse().map_err(|_| bad("bad slot"))?;
                if k >= bld.arity {
                    return Err(bad("slot out of range"));
                }
                bld.input(k)
            } else if let Some(k) = rhs.strip_prefix("inv ") {
                let k: usize = k.trim().parse().map_err(|_| bad("bad slot"))?;
                if k >= bld.arity {
                    return Err(bad("slot out of range"));
                }
                bld.input_inverse(k)
            } else if let Some(x) = rhs.strip_prefix("inverse ") {
                let x = lookup(&names, x)?;
                bld.inverse(x)
            } else if rhs.starts_with('[') && rhs.ends_with(']') {
                let (x, y) = rhs[1..rhs.len() - 1]
                    .split_once(',')
                    .ok_or_else(|| bad("expected [x, y]"))?;
                let (x, y) = (lookup(&names, x)?, lookup(&names, y)?);
                bld.commutator(x, y)
            } else {
                let parts: Vec<&str> = rhs.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(bad("expected two node names"));
                }
                let (x, y) = (lookup(&names, parts[0])?, lookup(&names, parts[1])?);
                bld.concat(x, y)
            };
            names.insert(name.trim().to_string(), id);
        }
        let b = b.ok_or(WordError::Parse {
            line: 0,
            msg: "no definitions".into(),
        })?;
        let root = root.ok_or(WordError::Parse {
            line: 0,
            msg: "missing root".into(),
        })?;
        Ok(b.finish(root))
    }
}

/// Merges adjacent constants and cancels `g g^-1` pairs.
pub fn simplify_word(word: &[Atom]) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(word.len());
    for a in word {
        let mut cur = a.clone();
        loop {
            match (out.last(), &cur) {
                (Some(Atom::Const(p)), Atom::Const(q)) => {
                    let merged = p.mul(q);
                    out.pop();
                    if merged.is_identity() {
                        break;
                    }
                    cur = Atom::Const(merged);
                    continue;
                }
                (Some(Atom::Input(i)), Atom::InputInverse(j))
                | (Some(Atom::InputInverse(i)), Atom::Input(j))
                    if i == j =>
                {
                    out.pop();
                    break;
                }
                (_, Atom::Const(p)) if p.is_identity() => break,
                _ => {
                    out.push(cur);
                    break;
                }
            }
        }
    }
    out
}

/// Evaluates a flat word on permutations.
pub fn evaluate_word(word: &[Atom], degree: usize, env: &[Perm]) -> Perm {
    word.iter().fold(Perm::identity(degree), |acc, a| {
        let v = match a {
            Atom::Const(c) => c.clone(),
            Atom::Input(i) => env[*i].clone(),
            Atom::InputInverse(i) => env[*i].inverse(),
        };
        acc.mul(&v)
    })
}

/// Word file: one atom per line, `const <cycles>`, `in <i>` or `inv <i>`.
pub fn word_to_text(word: &[Atom]) -> String {
    let mut s = String::new();
    for a in word {
        let _ = match a {
            Atom::Const(c) => writeln!(s, "const {c}"),
            Atom::Input(i) => writeln!(s, "in {i}"),
            Atom::InputInverse(i) => writeln!(s, "inv {i}"),
        };
    }
    s
}

pub fn word_from_text(text: &str, degree: usize) -> Result<Vec<Atom>, WordError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| WordError::Parse { line: ln + 1, msg };
        let (op, arg) = line.split_once(' ').ok_or_else(|| bad("expected '<op> <arg>'".into()))?;
        let atom = match op {
            "const" => Atom::Const(Perm::parse(arg, degree).map_err(|e| bad(e.to_string()))?),
            "in" => Atom::Input(arg.trim().parse().map_err(|_| bad("bad slot".into()))?),
            "inv" => Atom::InputInverse(arg.trim().parse().map_err(|_| bad("bad slot".into()))?),
            other => return Err(bad(format!("unknown op '{other}'"))),
        };
        out.push(atom);
    }
    Ok(out)
}

/// Evaluates a program over element indices of a fixed group.
#[derive(Clone, Debug)]
pub struct Evaluator<'g> {
    group: &'g FiniteGroup,
    program: Program,
    consts: Vec<ElemId>,
}

impl<'g> Evaluator<'g> {
    pub fn new(program: &Program, group: &'g FiniteGroup) -> Result<Self, WordError> {
        if program.degree != group.degree() {
            return Err(WordError::DegreeMismatch);
        }
        let mut consts = vec![0; program.nodes.len()];
        for (i, node) in program.nodes.iter().enumerate() {
            if let Node::Atom(Atom::Const(c)) = node {
                consts[i] = group
                    .index_of(c)
                    .ok_or_else(|| WordError::ConstantOutsideGroup(c.to_string()))?;
            }
        }
        Ok(Evaluator {
            group,
            program: program.clone(),
            consts,
        })
    }

    pub fn eval(&self, env: &[ElemId]) -> ElemId {
        let mut scratch = Vec::with_capacity(self.program.nodes.len());
        self.eval_with(env, &mut scratch)
    }

    /// Evaluation reusing a caller-provided buffer.
    pub fn eval_with(&self, env: &[ElemId], vals: &mut Vec<ElemId>) -> ElemId {
        assert_eq!(env.len(), self.program.arity, "arity");
        let g = self.group;
        vals.clear();
        for (i, node) in self.program.nodes.iter().enumerate() {
            let v = match node {
                Node::Empty => g.identity(),
                Node::Atom(Atom::Const(_)) => self.consts[i],
                Node::Atom(Atom::Input(k)) => env[*k],
                Node::Atom(Atom::InputInverse(k)) => g.inv(env[*k]),
                Node::Concat(x, y) => g.mul(vals[*x], vals[*y]),
                Node::Inverse(x) => g.inv(vals[*x]),
                Node::Commutator(x, y) => g.commutator(vals[*x], vals[*y]),
            };
            vals.push(v);
        }
        vals[self.program.root]
    }

    /// Values on every element, for unary programs.
    pub fn unary_table(&self) -> Vec<ElemId> {
        assert_eq!(self.program.arity, 1, "unary table");
        let mut buf = Vec::new();
        self.group.ids().map(|x| self.eval_with(&[x], &mut buf)).collect()
    }
}
