//! Learning tasks: background knowledge, mode bias and weighted examples.

use std::collections::BTreeMap;
use std::fmt;

use crate::space::ModeDeclaration;
use crate::syntax::{Atom, Program, Symbol, Term};

/// Declared constants grouped by type. Each type's constants are kept sorted
/// and unique.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypedConstants {
    by_type: BTreeMap<Symbol, Vec<Term>>,
}

impl TypedConstants {
    pub fn new() -> TypedConstants {
        TypedConstants::default()
    }

    pub fn insert(&mut self, ty: Symbol, value: Term) {
        let values = self.by_type.entry(ty).or_default();
        if let Err(pos) = values.binary_search(&value) {
            values.insert(pos, value);
        }
    }

    pub fn of_type(&self, ty: &str) -> &[Term] {
        self.by_type.get(ty).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has(&self, ty: &str, value: &Term) -> bool {
        self.of_type(ty).binary_search(value).is_ok()
    }

    pub fn types(&self) -> impl Iterator<Item = &Symbol> {
        self.by_type.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.by_type
            .iter()
            .flat_map(|(ty, vs)| vs.iter().map(move |v| (ty, v)))
    }

    pub fn is_empty(&self) -> bool {
        self.by_type.is_empty()
    }
}

/// Size bounds on the hypothesis space and on hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_body: usize,
    pub max_vars: usize,
    pub max_rules: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_body: 3,
            max_vars: 3,
            max_rules: 3,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bias {
    pub modes: Vec<ModeDeclaration>,
    pub constants: TypedConstants,
    pub bounds: Bounds,
}

/// Inclusion and exclusion sets of ground atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialInterpretation {
    pub inclusions: Vec<Atom>,
    pub exclusions: Vec<Atom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

/// A weighted context-dependent partial interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub id: Symbol,
    pub penalty: u32,
    pub pi: PartialInterpretation,
    pub context: Program,
    pub polarity: Polarity,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LasTask {
    pub background: Program,
    pub bias: Bias,
    pub examples: Vec<Example>,
}

impl LasTask {
    pub fn example(&self, id: &str) -> Option<&Example> {
        self.examples.iter().find(|e| &*e.id == id)
    }
}

fn write_atom_set(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.polarity {
            Polarity::Positive => "#pos",
            Polarity::Negative => "#neg",
        };
        write!(f, "{tag}({}@{}, ", self.id, self.penalty)?;
        write_atom_set(f, &self.pi.inclusions)?;
        f.write_str(", ")?;
        write_atom_set(f, &self.pi.exclusions)?;
        f.write_str(", {")?;
        for (i, r) in self.context.rules.iter().enumerate() {
            f.write_str(if i == 0 { "" } else { " " })?;
            write!(f, "{r}")?;
        }
        f.write_str("}).")
    }
}

/// Task file text. Parsing it back yields an equal task.
impl fmt::Display for LasTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.background)?;
        for (ty, value) in self.bias.constants.iter() {
            writeln!(f, "#constant({ty}, {value}).")?;
        }
        for m in &self.bias.modes {
            writeln!(f, "{m}")?;
        }
        let b = self.bias.bounds;
        writeln!(f, "#maxb({}).", b.max_body)?;
        writeln!(f, "#maxv({}).", b.max_vars)?;
        writeln!(f, "#maxrules({}).", b.max_rules)?;
        for e in &self.examples {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}
