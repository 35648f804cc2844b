//! Justification graphs for atoms of an answer set.
//!
//! Every true atom is justified by the rule that first derives it in the
//! least-model iteration of the reduct, so justifications only use atoms
//! from strictly earlier iterations and the graph is acyclic.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ground::{is_internal, AtomId, GroundHead, GroundProgram, GroundRule};
use crate::solve::{is_stable, translate_choice, Interpretation};
use crate::syntax::Atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("{0} is not in the answer set; ask for its absence instead")]
    NotInModel(String),
    #[error("{0} is in the answer set")]
    InModel(String),
    #[error("{0} is not in the Herbrand base")]
    NotInBase(String),
    #[error("the interpretation is not an answer set of the program")]
    NotStable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// A true atom derived by a rule.
    Atom(Atom),
    /// A true atom given as a fact.
    Fact(Atom),
    /// `not a` with `a` false in the answer set.
    Naf(Atom),
    /// A ground rule; `text` is the rule as written (for translated choice
    /// rules, the original choice rule).
    Rule {
        text: String,
        /// Other rules that would also derive the head.
        alternatives: Vec<String>,
        /// For absence graphs, why the rule does not fire.
        blocked_by: Option<String>,
    },
    /// A body literal that fails in the answer set.
    Failing(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
}

impl Node {
    pub fn label(&self) -> String {
        match &self.kind {
            NodeKind::Atom(a) | NodeKind::Fact(a) => a.to_string(),
            NodeKind::Naf(a) => format!("not {a}"),
            NodeKind::Rule { text, .. } => text.clone(),
            NodeKind::Failing(t) => t.clone(),
        }
    }

    pub fn is_rule(&self) -> bool {
        matches!(self.kind, NodeKind::Rule { .. })
    }
}

/// Nodes are numbered in creation order; edges point from supporting node
/// to supported node (body literal → rule → head).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplanationDag {
    pub nodes: Vec<Node>,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl ExplanationDag {
    fn add(&mut self, kind: NodeKind) -> usize {
        self.nodes.push(Node { kind });
        self.nodes.len() - 1
    }

    pub fn rule_texts(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter_map(|n| match &n.kind {
            NodeKind::Rule { text, .. } => Some(text.as_str()),
            _ => None,
        })
    }

    /// A topological order (sources first), or `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut out = vec![Vec::new(); n];
        for &(s, t) in &self.edges {
            indeg[t] += 1;
            out[s].push(t);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop() {
            order.push(i);
            for &t in &out[i] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.push(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExplainOptions {
    /// Record every applicable rule of an atom, not just the chosen one.
    pub all_supports: bool,
}

/// The translated program and the answer set extended to its internal atoms.
struct Prepared {
    program: GroundProgram,
    model: Vec<bool>,
}

fn prepare(ground: &GroundProgram, model: &Interpretation) -> Result<Prepared, ExplainError> {
    if !is_stable(ground, model) {
        return Err(ExplainError::NotStable);
    }
    let program = translate_choice(ground);
    let mut truth = model.mask(program.atoms.len());
    // complement rules mention only original atoms in their bodies
    for r in &program.rules {
        if let GroundHead::Atom(h) = r.head {
            if is_internal(program.atoms.atom(h)) && applies(r, &truth) {
                truth[h as usize] = true;
            }
        }
    }
    Ok(Prepared {
        program,
        model: truth,
    })
}

fn rule_text(p: &GroundProgram, r: &GroundRule) -> String {
    match &r.origin {
        Some(o) => o.to_string(),
        None => r.to_rule(&p.atoms).to_string(),
    }
}

fn applies(r: &GroundRule, model: &[bool]) -> bool {
    r.pos.iter().all(|&a| model[a as usize]) && r.neg.iter().all(|&a| !model[a as usize])
}

/// First iteration at which each atom enters the least model of the reduct.
fn derivation_levels(p: &Prepared) -> Vec<Option<usize>> {
    let n = p.program.atoms.len();
    let mut level: Vec<Option<usize>> = vec![None; n];
    let mut k = 0;
    loop {
        let mut fresh = Vec::new();
        for r in &p.program.rules {
            let GroundHead::Atom(h) = r.head else { continue };
            if level[h as usize].is_none()
                && r.neg.iter().all(|&a| !p.model[a as usize])
                && r.pos.iter().all(|&a| level[a as usize].is_some_and(|l| l < k))
            {
                fresh.push(h);
            }
        }
        if fresh.is_empty() {
            return level;
        }
        for h in fresh {
            level[h as usize] = Some(k);
        }
        k += 1;
    }
}

struct Builder<'p> {
    p: &'p Prepared,
    level: Vec<Option<usize>>,
    options: ExplainOptions,
    dag: ExplanationDag,
    atom_nodes: HashMap<AtomId, usize>,
    naf_nodes: HashMap<AtomId, usize>,
}

impl<'p> Builder<'p> {
    fn justification(&self, a: AtomId) -> Option<&'p GroundRule> {
        let p = self.p;
        let k = self.level[a as usize]?;
        p.program.rules.iter().find(|r| {
            r.head == GroundHead::Atom(a)
                && r.neg.iter().all(|&b| !p.model[b as usize])
                && r.pos.iter().all(|&b| self.level[b as usize].is_some_and(|l| l < k))
        })
    }

    fn naf(&mut self, a: AtomId) -> usize {
        if let Some(&n) = self.naf_nodes.get(&a) {
            return n;
        }
        let n = self
            .dag
            .add(NodeKind::Naf(self.p.program.atoms.atom(a).clone()));
        self.naf_nodes.insert(a, n);
        n
    }

    fn atom(&mut self, a: AtomId) -> usize {
        if let Some(&n) = self.atom_nodes.get(&a) {
            return n;
        }
        let p = self.p;
        let rule = self.justification(a).expect("true atom has a justification");
        let atom = p.program.atoms.atom(a).clone();
        if rule.pos.is_empty() && rule.neg.is_empty() && rule.origin.is_none() {
            let n = self.dag.add(NodeKind::Fact(atom));
            self.atom_nodes.insert(a, n);
            return n;
        }
        let n = self.dag.add(NodeKind::Atom(atom));
        self.atom_nodes.insert(a, n);
        let alternatives = if self.options.all_supports {
            p.program
                .rules
                .iter()
                .filter(|r| r.head == GroundHead::Atom(a) && !std::ptr::eq(*r, rule) && applies(r, &p.model))
                .map(|r| rule_text(&p.program, r))
                .collect()
        } else {
            Vec::new()
        };
        let rn = self.dag.add(NodeKind::Rule {
            text: rule_text(&p.program, rule),
            alternatives,
            blocked_by: None,
        });
        self.dag.edges.push((rn, n));
        for &b in &rule.pos {
            let bn = self.atom(b);
            self.dag.edges.push((bn, rn));
        }
        for &b in &rule.neg {
            if is_internal(p.program.atoms.atom(b)) {
                continue;
            }
            let bn = self.naf(b);
            self.dag.edges.push((bn, rn));
        }
        n
    }
}

pub fn explain_atom(
    ground: &GroundProgram,
    model: &Interpretation,
    target: &Atom,
) -> Result<ExplanationDag, ExplainError> {
    explain_atom_with(ground, model, target, ExplainOptions::default())
}

/// Graph rooted at `target` justifying its truth in `model`.
pub fn explain_atom_with(
    ground: &GroundProgram,
    model: &Interpretation,
    target: &Atom,
    options: ExplainOptions,
) -> Result<ExplanationDag, ExplainError> {
    let id = ground.atoms.get(target);
    let Some(id) = id.filter(|&i| model.contains(i)) else {
        return Err(ExplainError::NotInModel(target.to_string()));
    };
    let p = prepare(ground, model)?;
    let mut b = Builder {
        level: derivation_levels(&p),
        p: &p,
        options,
        dag: ExplanationDag::default(),
        atom_nodes: HashMap::new(),
        naf_nodes: HashMap::new(),
    };
    let root = b.atom(id);
    b.dag.root = root;
    Ok(b.dag)
}

/// Graph rooted at `not target` with one child per rule for `target`, each
/// annotated with its first failing body literal.
pub fn explain_absence(
    ground: &GroundProgram,
    model: &Interpretation,
    target: &Atom,
) -> Result<ExplanationDag, ExplainError> {
    let Some(id) = ground.atoms.get(target) else {
        return Err(ExplainError::NotInBase(target.to_string()));
    };
    if model.contains(id) {
        return Err(ExplainError::InModel(target.to_string()));
    }
    let p = prepare(ground, model)?;
    let mut dag = ExplanationDag::default();
    let root = dag.add(NodeKind::Naf(target.clone()));
    dag.root = root;
    let atoms = &p.program.atoms;
    for r in &p.program.rules {
        if !r.head_atoms().contains(&id) {
            continue;
        }
        let failing = r
            .pos
            .iter()
            .find(|&&a| !p.model[a as usize])
            .map(|&a| format!("{} false", atoms.atom(a)))
            .or_else(|| {
                r.neg.iter().find(|&&a| p.model[a as usize]).map(|&a| {
                    let a = atoms.atom(a);
                    if is_internal(a) {
                        "not chosen".to_string()
                    } else {
                        format!("not {a} fails ({a} true)")
                    }
                })
            });
        let Some(failing) = failing else { continue };
        let rn = dag.add(NodeKind::Rule {
            text: rule_text(&p.program, r),
            alternatives: Vec::new(),
            blocked_by: Some(failing.clone()),
        });
        let fnode = dag.add(NodeKind::Failing(failing));
        dag.edges.push((fnode, rn));
        dag.edges.push((rn, root));
    }
    Ok(dag)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the graph in DOT syntax. Output is a pure function of the graph.
pub fn to_graph_text(dag: &ExplanationDag) -> String {
    let mut out = String::from("digraph explanation {\n  rankdir=BT;\n");
    for (i, node) in dag.nodes.iter().enumerate() {
        let label = escape(&node.label());
        let attrs = match &node.kind {
            NodeKind::Atom(_) => "shape=box".to_string(),
            NodeKind::Fact(_) => "shape=box, peripheries=2".to_string(),
            NodeKind::Naf(_) => "shape=box, style=dashed".to_string(),
            NodeKind::Failing(_) => "shape=box, style=dotted".to_string(),
            NodeKind::Rule {
                alternatives,
                blocked_by,
                ..
            } => {
                let mut a = "shape=diamond".to_string();
                if !alternatives.is_empty() {
                    let alts = alternatives.iter().map(|t| escape(t)).collect::<Vec<_>>().join("\\n");
                    let _ = write!(a, ", tooltip=\"also: {alts}\"");
                }
                if let Some(b) = blocked_by {
                    let _ = write!(a, ", xlabel=\"blocked: {}\"", escape(b));
                }
                a
            }
        };
        let root = if i == dag.root { ", penwidth=2" } else { "" };
        let _ = writeln!(out, "  n{i} [label=\"{label}\", {attrs}{root}];");
    }
    for (s, t) in &dag.edges {
        let _ = writeln!(out, "  n{s} -> n{t};");
    }
    out.push_str("}\n");
    out
}
