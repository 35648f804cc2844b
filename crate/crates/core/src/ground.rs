//! Herbrand instantiation of safe programs.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::par::{self, Execution};
use crate::space::VarTypes;
use crate::syntax::{Atom, ChoiceHead, Comparator, Head, Literal, Program, Rule, Symbol, Term};
use crate::task::TypedConstants;

pub type AtomId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("rule {rule} has variables but the Herbrand universe is empty")]
    EmptyUniverse { rule: usize },
    #[error("rule {rule}: comparison {literal} involves a non-integer constant")]
    NonIntegerComparison { rule: usize, literal: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HerbrandUniverse {
    /// Sorted: integers ascending, then constants lexicographically.
    pub constants: Vec<Term>,
    pub typed: TypedConstants,
}

impl HerbrandUniverse {
    fn domain(&self, ty: Option<&Symbol>) -> &[Term] {
        match ty {
            Some(t) => self.typed.of_type(t),
            None => &self.constants,
        }
    }
}

fn collect_constants(program: &Program, out: &mut BTreeSet<Term>) {
    for rule in &program.rules {
        for a in rule.atoms() {
            out.extend(a.args.iter().filter(|t| t.is_ground()).cloned());
        }
        for l in &rule.body {
            if let Literal::Cmp(x, _, y) = l {
                out.extend([x, y].into_iter().filter(|t| t.is_ground()).cloned());
            }
        }
    }
}

/// All constants of `program` plus the declared extras.
pub fn herbrand_universe(program: &Program, extra: &TypedConstants) -> HerbrandUniverse {
    herbrand_universe_of(std::iter::once(program), extra)
}

pub fn herbrand_universe_of<'a>(
    programs: impl IntoIterator<Item = &'a Program>,
    extra: &TypedConstants,
) -> HerbrandUniverse {
    let mut set = BTreeSet::new();
    for p in programs {
        collect_constants(p, &mut set);
    }
    set.extend(extra.iter().map(|(_, v)| v.clone()));
    HerbrandUniverse {
        constants: set.into_iter().collect(),
        typed: extra.clone(),
    }
}

pub fn eval_builtin(lhs: i32, op: Comparator, rhs: i32) -> bool {
    op.eval(lhs, rhs)
}

/// Dense interning of ground atoms, ids in first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    index: HashMap<Atom, AtomId>,
}

impl AtomTable {
    pub fn intern(&mut self, atom: Atom) -> AtomId {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = self.atoms.len() as AtomId;
        self.index.insert(atom.clone(), id);
        self.atoms.push(atom);
        id
    }

    pub fn get(&self, atom: &Atom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id as usize]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &Atom)> {
        self.atoms.iter().enumerate().map(|(i, a)| (i as AtomId, a))
    }
}

/// Atoms introduced by translations carry a predicate starting with `_`,
/// which the parser never produces.
pub fn is_internal(atom: &Atom) -> bool {
    atom.predicate.starts_with('_')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroundHead {
    Atom(AtomId),
    Choice {
        lower: u32,
        upper: u32,
        atoms: Vec<AtomId>,
    },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundRule {
    pub head: GroundHead,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
    /// Text of the source rule this one was derived from by a translation.
    pub origin: Option<Arc<str>>,
}

impl GroundRule {
    pub fn head_atoms(&self) -> &[AtomId] {
        match &self.head {
            GroundHead::Atom(a) => std::slice::from_ref(a),
            GroundHead::Choice { atoms, .. } => atoms,
            GroundHead::None => &[],
        }
    }

    pub fn is_constraint(&self) -> bool {
        matches!(self.head, GroundHead::None)
    }

    /// Back to the object model, positive literals before naf-literals.
    pub fn to_rule(&self, atoms: &AtomTable) -> Rule {
        let at = |id: &AtomId| atoms.atom(*id).clone();
        let head = match &self.head {
            GroundHead::Atom(a) => Head::Atom(at(a)),
            GroundHead::Choice {
                lower,
                upper,
                atoms: xs,
            } => Head::Choice(ChoiceHead {
                lower: *lower,
                upper: *upper,
                atoms: xs.iter().map(at).collect(),
            }),
            GroundHead::None => Head::None,
        };
        let body = self
            .pos
            .iter()
            .map(|a| Literal::Pos(at(a)))
            .chain(self.neg.iter().map(|a| Literal::Naf(at(a))))
            .collect();
        Rule { head, body }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub atoms: AtomTable,
}

impl GroundProgram {
    pub fn to_program(&self) -> Program {
        Program::new(self.rules.iter().map(|r| r.to_rule(&self.atoms)).collect())
    }

    pub fn has_choice(&self) -> bool {
        self.rules
            .iter()
            .any(|r| matches!(r.head, GroundHead::Choice { .. }))
    }

    /// Builds a ground program from variable-free rules. Builtins are
    /// evaluated away.
    pub fn from_ground_rules(program: &Program) -> Result<GroundProgram, GroundError> {
        ground(program, &HerbrandUniverse::default())
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_program())
    }
}

/// A rule together with optional variable typing for instantiation.
#[derive(Clone, Copy, Debug)]
pub struct TypedRule<'a> {
    pub rule: &'a Rule,
    pub var_types: Option<&'a VarTypes>,
}

impl<'a> TypedRule<'a> {
    pub fn untyped(rule: &'a Rule) -> TypedRule<'a> {
        TypedRule {
            rule,
            var_types: None,
        }
    }
}

type Binding = HashMap<Symbol, Term>;

fn subst(t: &Term, b: &Binding) -> Term {
    match t {
        Term::Var(v) => b[v].clone(),
        other => other.clone(),
    }
}

fn subst_atom(a: &Atom, b: &Binding) -> Atom {
    Atom {
        predicate: a.predicate.clone(),
        args: a.args.iter().map(|t| subst(t, b)).collect(),
    }
}

/// An instantiated rule before atom interning.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Instance {
    head: Vec<Atom>,
    pos: Vec<Atom>,
    neg: Vec<Atom>,
}

fn check_builtins(index: usize, rule: &Rule) -> Result<(), GroundError> {
    for l in &rule.body {
        if let Literal::Cmp(x, _, y) = l {
            if matches!(x, Term::Const(_)) || matches!(y, Term::Const(_)) {
                return Err(GroundError::NonIntegerComparison {
                    rule: index,
                    literal: l.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Builtins under `b`; a comparison with a symbolic value does not hold.
fn builtins_hold(rule: &Rule, b: &Binding) -> bool {
    rule.body.iter().all(|l| match l {
        Literal::Cmp(x, op, y) => match (subst(x, b), subst(y, b)) {
            (Term::Int(i), Term::Int(j)) => op.eval(i, j),
            _ => false,
        },
        _ => true,
    })
}

fn instance(rule: &Rule, b: &Binding) -> Instance {
    let mut inst = Instance {
        head: rule.head_atoms().iter().map(|a| subst_atom(a, b)).collect(),
        pos: Vec::new(),
        neg: Vec::new(),
    };
    for l in &rule.body {
        match l {
            Literal::Pos(a) => inst.pos.push(subst_atom(a, b)),
            Literal::Naf(a) => inst.neg.push(subst_atom(a, b)),
            Literal::Cmp(..) => {}
        }
    }
    inst
}

fn instantiate_naive(
    index: usize,
    tr: TypedRule<'_>,
    universe: &HerbrandUniverse,
) -> Result<Vec<Instance>, GroundError> {
    let rule = tr.rule;
    check_builtins(index, rule)?;
    let vars = rule.variables();
    if !vars.is_empty() && universe.constants.is_empty() {
        return Err(GroundError::EmptyUniverse { rule: index });
    }
    let domains: Vec<&[Term]> = vars
        .iter()
        .map(|v| universe.domain(tr.var_types.and_then(|m| m.get(v))))
        .collect();
    let mut out = Vec::new();
    let mut counters = vec![0usize; vars.len()];
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(out);
    }
    let mut binding = Binding::new();
    loop {
        for (i, v) in vars.iter().enumerate() {
            binding.insert(v.clone(), domains[i][counters[i]].clone());
        }
        if builtins_hold(rule, &binding) {
            out.push(instance(rule, &binding));
        }
        // odometer, last variable fastest
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            counters[k] += 1;
            if counters[k] < domains[k].len() {
                break;
            }
            counters[k] = 0;
        }
    }
}

/// An instance with its origin text, choice bounds and constraint flag.
type Pending = (Instance, Option<Arc<str>>, Option<(u32, u32)>, bool);

fn intern_all(rules: Vec<Pending>) -> GroundProgram {
    let mut atoms = AtomTable::default();
    let mut out = Vec::with_capacity(rules.len());
    for (inst, origin, choice, constraint) in rules {
        let head_ids: Vec<AtomId> = inst.head.into_iter().map(|a| atoms.intern(a)).collect();
        let pos = inst.pos.into_iter().map(|a| atoms.intern(a)).collect();
        let neg = inst.neg.into_iter().map(|a| atoms.intern(a)).collect();
        let head = match (choice, constraint) {
            (Some((lower, upper)), _) => GroundHead::Choice {
                lower,
                upper,
                atoms: head_ids,
            },
            (None, true) => GroundHead::None,
            (None, false) => GroundHead::Atom(head_ids[0]),
        };
        out.push(GroundRule {
            head,
            pos,
            neg,
            origin,
        });
    }
    GroundProgram { rules: out, atoms }
}

fn shape_of(rule: &Rule) -> (Option<(u32, u32)>, bool) {
    match &rule.head {
        Head::Choice(c) => (Some((c.lower, c.upper)), false),
        Head::None => (None, true),
        Head::Atom(_) => (None, false),
    }
}

/// Full instantiation: every substitution of the universe for the rule's
/// variables whose builtins hold.
pub fn ground(program: &Program, universe: &HerbrandUniverse) -> Result<GroundProgram, GroundError> {
    let typed: Vec<TypedRule> = program.rules.iter().map(TypedRule::untyped).collect();
    ground_typed(&typed, universe, Execution::Sequential)
}

/// Full instantiation with per-rule variable typing. Rules are instantiated
/// independently and merged in rule order.
pub fn ground_typed(
    rules: &[TypedRule<'_>],
    universe: &HerbrandUniverse,
    exec: Execution,
) -> Result<GroundProgram, GroundError> {
    let indexed: Vec<(usize, TypedRule)> = rules.iter().copied().enumerate().collect();
    let per_rule = par::map(exec, &indexed, |(i, tr)| instantiate_naive(*i, *tr, universe));
    let mut all = Vec::new();
    for (res, tr) in per_rule.into_iter().zip(rules) {
        let (choice, constraint) = shape_of(tr.rule);
        for inst in res? {
            all.push((inst, None, choice, constraint));
        }
    }
    Ok(intern_all(all))
}

/// Index of possibly-true atoms by predicate and arity.
#[derive(Default)]
struct Possible {
    by_pred: HashMap<(Symbol, usize), Vec<Atom>>,
    all: HashSet<Atom>,
}

impl Possible {
    fn insert(&mut self, a: Atom) -> bool {
        if self.all.contains(&a) {
            return false;
        }
        self.by_pred
            .entry((a.predicate.clone(), a.args.len()))
            .or_default()
            .push(a.clone());
        self.all.insert(a);
        true
    }

    fn candidates(&self, a: &Atom) -> &[Atom] {
        self.by_pred
            .get(&(a.predicate.clone(), a.args.len()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

fn unify(pattern: &Atom, ground: &Atom, b: &mut Binding, bound: &mut Vec<Symbol>) -> bool {
    for (p, g) in pattern.args.iter().zip(&ground.args) {
        match p {
            Term::Var(v) => match b.get(v) {
                Some(t) if t != g => return false,
                Some(_) => {}
                None => {
                    b.insert(v.clone(), g.clone());
                    bound.push(v.clone());
                }
            },
            t if t != g => return false,
            _ => {}
        }
    }
    true
}

fn join(
    positives: &[&Atom],
    possible: &Possible,
    b: &mut Binding,
    emit: &mut dyn FnMut(&Binding),
) {
    let Some((first, rest)) = positives.split_first() else {
        emit(b);
        return;
    };
    for cand in possible.candidates(first) {
        let mut bound = Vec::new();
        if unify(first, cand, b, &mut bound) {
            join(rest, possible, b, emit);
        }
        for v in bound {
            b.remove(&v);
        }
    }
}

/// A set of ground atoms indexed for matching rule bodies.
#[derive(Default)]
pub struct AtomIndex(Possible);

impl AtomIndex {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> AtomIndex {
        let mut p = Possible::default();
        for a in atoms {
            p.insert(a);
        }
        AtomIndex(p)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.all.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.0.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.all.is_empty()
    }
}

fn typed_ok(tr: &TypedRule<'_>, vars: &[Symbol], universe: &HerbrandUniverse, b: &Binding) -> bool {
    vars.iter().all(|v| match tr.var_types.and_then(|m| m.get(v)) {
        Some(t) => universe.typed.has(t, &b[v]),
        None => true,
    })
}

/// Whether some instance of `tr` has its positive body inside `index`, with
/// variable types and builtins satisfied.
pub fn has_instance(tr: TypedRule<'_>, index: &AtomIndex, universe: &HerbrandUniverse) -> bool {
    let positives: Vec<&Atom> = tr
        .rule
        .body
        .iter()
        .filter_map(|l| match l {
            Literal::Pos(a) => Some(a),
            _ => None,
        })
        .collect();
    let vars = tr.rule.variables();
    let mut found = false;
    join(&positives, &index.0, &mut Binding::new(), &mut |b| {
        found = found || (typed_ok(&tr, &vars, universe, b) && builtins_hold(tr.rule, b));
    });
    found
}

/// Instantiation restricted to substitutions whose positive body atoms are
/// all possibly derivable (least fixpoint of the program with naf-literals
/// ignored). Rules dropped this way can never fire, so the stable models
/// coincide with those of [`ground_typed`]; only the atom ids differ.
pub fn ground_relevant(
    rules: &[TypedRule<'_>],
    universe: &HerbrandUniverse,
) -> Result<GroundProgram, GroundError> {
    for (i, tr) in rules.iter().enumerate() {
        check_builtins(i, tr.rule)?;
    }
    let mut possible = Possible::default();
    let mut found: Vec<Vec<Vec<Term>>> = vec![Vec::new(); rules.len()];
    let mut seen: Vec<HashSet<Vec<Term>>> = vec![HashSet::new(); rules.len()];
    let vars: Vec<Vec<Symbol>> = rules.iter().map(|tr| tr.rule.variables()).collect();
    loop {
        let mut changed = false;
        for (i, tr) in rules.iter().enumerate() {
            let positives: Vec<&Atom> = tr
                .rule
                .body
                .iter()
                .filter_map(|l| match l {
                    Literal::Pos(a) => Some(a),
                    _ => None,
                })
                .collect();
            let mut fresh = Vec::new();
            join(&positives, &possible, &mut Binding::new(), &mut |b| {
                if !typed_ok(tr, &vars[i], universe, b) || !builtins_hold(tr.rule, b) {
                    return;
                }
                let key: Vec<Term> = vars[i].iter().map(|v| b[v].clone()).collect();
                if !seen[i].contains(&key) {
                    fresh.push((key, b.clone()));
                }
            });
            for (key, b) in fresh {
                if !seen[i].insert(key.clone()) {
                    continue;
                }
                for h in tr.rule.head_atoms() {
                    possible.insert(subst_atom(h, &b));
                }
                found[i].push(key);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut all = Vec::new();
    for (i, tr) in rules.iter().enumerate() {
        let (choice, constraint) = shape_of(tr.rule);
        let mut keys = std::mem::take(&mut found[i]);
        keys.sort();
        for key in keys {
            let b: Binding = vars[i].iter().cloned().zip(key).collect();
            all.push((instance(tr.rule, &b), None, choice, constraint));
        }
    }
    Ok(intern_all(all))
}
