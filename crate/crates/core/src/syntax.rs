//! Object model for the supported ASP subset.
//!
//! Everything here is immutable once built. `Display` on [`Rule`] and
//! [`Program`] produces the canonical text form, which the parser reads back
//! to a structurally equal value.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned-ish symbol text. Cloning is a reference-count bump.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// A term is an integer, a constant symbol or a variable.
///
/// The derived ordering puts integers first (numerically), then constants,
/// then variables, each lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i32),
    Const(Symbol),
    Var(Symbol),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(sym(name))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        !self.is_var()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(v) => write!(f, "{v}"),
            Term::Const(s) | Term::Var(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Atom {
        Atom {
            predicate: sym(predicate),
            args,
        }
    }

    /// A zero-arity atom.
    pub fn prop(predicate: &str) -> Atom {
        Atom::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            _ => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ne,
    Gt,
    Ge,
}

impl Comparator {
    pub const ALL: [Comparator; 6] = [
        Comparator::Lt,
        Comparator::Le,
        Comparator::Eq,
        Comparator::Ne,
        Comparator::Gt,
        Comparator::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }

    pub fn eval(self, lhs: i32, rhs: i32) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Eq => lhs == rhs,
            Comparator::Ne => lhs != rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Pos(Atom),
    Naf(Atom),
    Cmp(Term, Comparator, Term),
}

impl Literal {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Pos(a) | Literal::Naf(a) => Some(a),
            Literal::Cmp(..) => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Literal::Pos(_))
    }

    pub fn terms(&self) -> Box<dyn Iterator<Item = &Term> + '_> {
        match self {
            Literal::Pos(a) | Literal::Naf(a) => Box::new(a.args.iter()),
            Literal::Cmp(l, _, r) => Box::new([l, r].into_iter()),
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        self.terms().filter_map(|t| match t {
            Term::Var(v) => Some(v),
            _ => None,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Naf(a) => write!(f, "not {a}"),
            Literal::Cmp(l, op, r) => write!(f, "{l} {op} {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChoiceHead {
    pub lower: u32,
    pub upper: u32,
    pub atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Atom(Atom),
    Choice(ChoiceHead),
    /// Headless rule (constraint).
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn fact(atom: Atom) -> Rule {
        Rule {
            head: Head::Atom(atom),
            body: Vec::new(),
        }
    }

    pub fn normal(head: Atom, body: Vec<Literal>) -> Rule {
        Rule {
            head: Head::Atom(head),
            body,
        }
    }

    pub fn constraint(body: Vec<Literal>) -> Rule {
        Rule {
            head: Head::None,
            body,
        }
    }

    pub fn is_fact(&self) -> bool {
        matches!(self.head, Head::Atom(_)) && self.body.is_empty()
    }

    pub fn head_atoms(&self) -> &[Atom] {
        match &self.head {
            Head::Atom(a) => std::slice::from_ref(a),
            Head::Choice(c) => &c.atoms,
            Head::None => &[],
        }
    }

    /// Every atom of the rule, head first, in textual order.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head_atoms()
            .iter()
            .chain(self.body.iter().filter_map(Literal::atom))
    }

    pub fn is_ground(&self) -> bool {
        self.variables().is_empty()
    }

    /// Distinct variables in first-occurrence order (head, then body).
    pub fn variables(&self) -> Vec<Symbol> {
        let mut seen = Vec::<Symbol>::new();
        let head_vars = self.head_atoms().iter().flat_map(Atom::variables);
        let body_vars = self.body.iter().flat_map(Literal::variables);
        for v in head_vars.chain(body_vars) {
            if !seen.contains(v) {
                seen.push(v.clone());
            }
        }
        seen
    }

    /// Returns the first variable (in occurrence order) that is not bound by
    /// a positive body literal, if any.
    pub fn unsafe_variable(&self) -> Option<Symbol> {
        let bound: BTreeSet<&Symbol> = self
            .body
            .iter()
            .filter_map(|l| match l {
                Literal::Pos(a) => Some(a),
                _ => None,
            })
            .flat_map(Atom::variables)
            .collect();
        self.variables().into_iter().find(|v| !bound.contains(v))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Atom(a) => write!(f, "{a}")?,
            Head::Choice(c) => {
                write!(f, "{} {{ ", c.lower)?;
                for (i, a) in c.atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ; ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, " }} {}", c.upper)?;
            }
            Head::None => {}
        }
        if !self.body.is_empty() {
            if matches!(self.head, Head::None) {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Program {
        Program { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn extend(&mut self, other: &Program) {
        self.rules.extend(other.rules.iter().cloned());
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Deterministic serialization of a program; one statement per line.
pub fn canonical_text(program: &Program) -> String {
    program.to_string()
}
