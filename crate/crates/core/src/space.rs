//! Mode bias and hypothesis-space enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{sym, Atom, Comparator, Head, Literal, Rule, Symbol, Term};
use crate::task::{Bias, Bounds, TypedConstants};

pub const DEFAULT_SPACE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("mode bias has no head declaration")]
    NoHeadMode,
    #[error("type {0} is used in const({0}) but has no declared constants")]
    NoConstants(String),
    #[error("hypothesis space exceeds the cap of {cap} rules")]
    CapExceeded { cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Head,
    Body,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModeArg {
    Var(Symbol),
    Const(Symbol),
    /// A literal term written directly in the schema.
    Fixed(Term),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModeSchema {
    Atom { predicate: Symbol, args: Vec<ModeArg> },
    /// Builtin comparison between two typed variables.
    Compare { lhs: Symbol, op: Comparator, rhs: Symbol },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeDeclaration {
    pub kind: ModeKind,
    pub schema: ModeSchema,
    /// Body modes only: whether `not` instances are generated.
    pub naf_allowed: bool,
}

impl fmt::Display for ModeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeArg::Var(t) => write!(f, "var({t})"),
            ModeArg::Const(t) => write!(f, "const({t})"),
            ModeArg::Fixed(t) => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for ModeSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeSchema::Atom { predicate, args } => {
                f.write_str(predicate)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            ModeSchema::Compare { lhs, op, rhs } => write!(f, "var({lhs}) {op} var({rhs})"),
        }
    }
}

impl fmt::Display for ModeDeclaration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModeKind::Head => write!(f, "#modeh({}).", self.schema),
            ModeKind::Body if self.naf_allowed || matches!(self.schema, ModeSchema::Compare { .. }) => {
                write!(f, "#modeb({}).", self.schema)
            }
            ModeKind::Body => write!(f, "#modeb({}, (positive)).", self.schema),
        }
    }
}

/// Variable name to type.
pub type VarTypes = BTreeMap<Symbol, Symbol>;

fn arg_compatible(
    term: &Term,
    arg: &ModeArg,
    constants: &TypedConstants,
    var_types: Option<&VarTypes>,
) -> bool {
    match (arg, term) {
        (ModeArg::Var(ty), Term::Var(v)) => match var_types.and_then(|m| m.get(v)) {
            Some(t) => t == ty,
            None => var_types.is_none(),
        },
        (ModeArg::Const(ty), t) if t.is_ground() => constants.has(ty, t),
        (ModeArg::Fixed(f), t) => f == t,
        _ => false,
    }
}

/// Whether `literal` is an instance of `mode`.
///
/// With `var_types` given, each variable must carry the placeholder's type;
/// without it any variable fits a `var(t)` slot.
pub fn compatible(
    literal: &Literal,
    mode: &ModeDeclaration,
    constants: &TypedConstants,
    var_types: Option<&VarTypes>,
) -> bool {
    match (&mode.schema, literal) {
        (ModeSchema::Atom { predicate, args }, Literal::Pos(atom) | Literal::Naf(atom)) => {
            let polarity_ok = match literal {
                Literal::Pos(_) => true,
                _ => mode.kind == ModeKind::Body && mode.naf_allowed,
            };
            polarity_ok
                && atom.predicate == *predicate
                && atom.args.len() == args.len()
                && atom
                    .args
                    .iter()
                    .zip(args)
                    .all(|(t, a)| arg_compatible(t, a, constants, var_types))
        }
        (ModeSchema::Compare { lhs, op, rhs }, Literal::Cmp(l, o, r)) => {
            mode.kind == ModeKind::Body
                && o == op
                && arg_compatible(l, &ModeArg::Var(lhs.clone()), constants, var_types)
                && arg_compatible(r, &ModeArg::Var(rhs.clone()), constants, var_types)
        }
        _ => false,
    }
}

/// A rule of the hypothesis space with its typing information.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRule {
    pub rule: Rule,
    pub var_types: VarTypes,
    /// Distinct (term, type) pairs occurring at typed positions of the body.
    pub body_typed_terms: BTreeSet<(Term, Symbol)>,
    pub text: String,
}

impl CandidateRule {
    /// Wraps an untyped rule, e.g. one supplied directly rather than
    /// enumerated from a bias.
    pub fn untyped(rule: Rule) -> CandidateRule {
        let text = rule.to_string();
        CandidateRule {
            rule,
            var_types: VarTypes::new(),
            body_typed_terms: BTreeSet::new(),
            text,
        }
    }

    /// One for the head plus one per body literal.
    pub fn base_cost(&self) -> u32 {
        1 + self.rule.body.len() as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisSpace {
    pub rules: Vec<CandidateRule>,
    pub bounds: Bounds,
}

impl HypothesisSpace {
    /// Builds a space from explicit rules, ordered by canonical text.
    pub fn from_rules(rules: Vec<Rule>, bounds: Bounds) -> HypothesisSpace {
        let mut by_text = BTreeMap::new();
        for r in rules {
            let c = CandidateRule::untyped(r);
            by_text.entry(c.text.clone()).or_insert(c);
        }
        HypothesisSpace {
            rules: by_text.into_values().collect(),
            bounds,
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Clone, Debug)]
enum Slot {
    Var(Symbol),
    Term(Term),
}

#[derive(Clone, Debug)]
enum ShapeKind {
    Atom { predicate: Symbol, naf: bool },
    Compare(Comparator),
}

/// A mode instance whose constants are fixed and whose variable slots are
/// still open.
#[derive(Clone, Debug)]
struct Shape {
    kind: ShapeKind,
    slots: Vec<Slot>,
}

fn expand_shapes(
    mode: &ModeDeclaration,
    constants: &TypedConstants,
) -> Result<Vec<Shape>, SpaceError> {
    match &mode.schema {
        ModeSchema::Compare { lhs, op, rhs } => Ok(vec![Shape {
            kind: ShapeKind::Compare(*op),
            slots: vec![Slot::Var(lhs.clone()), Slot::Var(rhs.clone())],
        }]),
        ModeSchema::Atom { predicate, args } => {
            let mut partial: Vec<Vec<Slot>> = vec![Vec::new()];
            for a in args {
                let options: Vec<Slot> = match a {
                    ModeArg::Var(t) => vec![Slot::Var(t.clone())],
                    ModeArg::Fixed(t) => vec![Slot::Term(t.clone())],
                    ModeArg::Const(t) => {
                        let cs = constants.of_type(t);
                        if cs.is_empty() {
                            return Err(SpaceError::NoConstants(t.to_string()));
                        }
                        cs.iter().cloned().map(Slot::Term).collect()
                    }
                };
                partial = partial
                    .into_iter()
                    .flat_map(|p| {
                        options.iter().map(move |o| {
                            let mut q = p.clone();
                            q.push(o.clone());
                            q
                        })
                    })
                    .collect();
            }
            let mut shapes = Vec::new();
            let polarities: &[bool] = if mode.kind == ModeKind::Body && mode.naf_allowed {
                &[false, true]
            } else {
                &[false]
            };
            for slots in partial {
                for &naf in polarities {
                    shapes.push(Shape {
                        kind: ShapeKind::Atom {
                            predicate: predicate.clone(),
                            naf,
                        },
                        slots: slots.clone(),
                    });
                }
            }
            Ok(shapes)
        }
    }
}

fn var_name(i: usize) -> Symbol {
    sym(&format!("V{}", i + 1))
}

fn instantiate(shape: &Shape, vars: &[usize], next: &mut usize) -> Literal {
    let mut terms = Vec::with_capacity(shape.slots.len());
    for s in &shape.slots {
        terms.push(match s {
            Slot::Term(t) => t.clone(),
            Slot::Var(_) => {
                let v = vars[*next];
                *next += 1;
                Term::Var(var_name(v))
            }
        });
    }
    match &shape.kind {
        ShapeKind::Atom { predicate, naf } => {
            let atom = Atom {
                predicate: predicate.clone(),
                args: terms,
            };
            if *naf {
                Literal::Naf(atom)
            } else {
                Literal::Pos(atom)
            }
        }
        ShapeKind::Compare(op) => {
            let mut it = terms.into_iter();
            Literal::Cmp(it.next().unwrap(), *op, it.next().unwrap())
        }
    }
}

fn rename_term(t: &Term, perm: &BTreeMap<Symbol, Symbol>) -> Term {
    match t {
        Term::Var(v) => Term::Var(perm[v].clone()),
        other => other.clone(),
    }
}

fn rename_literal(l: &Literal, perm: &BTreeMap<Symbol, Symbol>) -> Literal {
    let ra = |a: &Atom| Atom {
        predicate: a.predicate.clone(),
        args: a.args.iter().map(|t| rename_term(t, perm)).collect(),
    };
    match l {
        Literal::Pos(a) => Literal::Pos(ra(a)),
        Literal::Naf(a) => Literal::Naf(ra(a)),
        Literal::Cmp(x, op, y) => Literal::Cmp(rename_term(x, perm), *op, rename_term(y, perm)),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Canonical representative modulo variable renaming: the variant with
/// sorted body whose text is lexicographically least over all renamings
/// onto `V1..Vk`.
fn canonicalize(head: &Atom, body: &[Literal], var_types: &VarTypes, perms: &[Vec<usize>]) -> (Rule, VarTypes, String) {
    let vars: Vec<Symbol> = var_types.keys().cloned().collect();
    let mut best: Option<(String, Rule, VarTypes)> = None;
    for perm in perms {
        let map: BTreeMap<Symbol, Symbol> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), var_name(perm[i])))
            .collect();
        let head = match rename_literal(&Literal::Pos(head.clone()), &map) {
            Literal::Pos(a) => a,
            _ => unreachable!(),
        };
        let mut lits: Vec<(String, Literal)> = body
            .iter()
            .map(|l| {
                let l = rename_literal(l, &map);
                (l.to_string(), l)
            })
            .collect();
        lits.sort_by(|a, b| a.0.cmp(&b.0));
        let rule = Rule::normal(head, lits.into_iter().map(|(_, l)| l).collect());
        let text = rule.to_string();
        if best.as_ref().is_none_or(|(b, _, _)| text < *b) {
            let types = var_types
                .iter()
                .map(|(v, t)| (map[v].clone(), t.clone()))
                .collect();
            best = Some((text, rule, types));
        }
    }
    let (text, rule, types) = best.expect("at least one permutation");
    (rule, types, text)
}

/// Canonical text of a rule modulo variable renaming and body order, as
/// used for the texts of enumerated rules.
pub fn canonical_form(rule: &Rule) -> String {
    let Head::Atom(head) = &rule.head else {
        return rule.to_string();
    };
    let types: VarTypes = rule.variables().into_iter().map(|v| (v, sym(""))).collect();
    let perms = permutations(types.len());
    canonicalize(head, &rule.body, &types, &perms).2
}

struct Enumerator<'a> {
    bounds: Bounds,
    cap: usize,
    body_shapes: Vec<Shape>,
    perms: Vec<Vec<Vec<usize>>>,
    out: BTreeMap<String, CandidateRule>,
    constants: &'a TypedConstants,
}

impl<'a> Enumerator<'a> {
    fn slot_types<'s>(shapes: impl Iterator<Item = &'s Shape>) -> Vec<Symbol> {
        shapes
            .flat_map(|s| s.slots.iter())
            .filter_map(|s| match s {
                Slot::Var(t) => Some(t.clone()),
                Slot::Term(_) => None,
            })
            .collect()
    }

    /// Restricted-growth assignment of typed variables to the open slots.
    fn assignments(&self, types: &[Symbol]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(types.len());
        let mut var_types: Vec<Symbol> = Vec::new();
        fn go(
            types: &[Symbol],
            max_vars: usize,
            current: &mut Vec<usize>,
            var_types: &mut Vec<Symbol>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let i = current.len();
            if i == types.len() {
                out.push(current.clone());
                return;
            }
            for v in 0..var_types.len() {
                if var_types[v] == types[i] {
                    current.push(v);
                    go(types, max_vars, current, var_types, out);
                    current.pop();
                }
            }
            if var_types.len() < max_vars {
                var_types.push(types[i].clone());
                current.push(var_types.len() - 1);
                go(types, max_vars, current, var_types, out);
                current.pop();
                var_types.pop();
            }
        }
        go(types, self.bounds.max_vars, &mut current, &mut var_types, &mut out);
        out
    }

    fn add(&mut self, head: &Shape, body: &[&Shape]) -> Result<(), SpaceError> {
        let types = Self::slot_types(std::iter::once(head).chain(body.iter().copied()));
        for assignment in self.assignments(&types) {
            let mut next = 0;
            let head_lit = instantiate(head, &assignment, &mut next);
            let head_atom = match head_lit {
                Literal::Pos(a) => a,
                _ => unreachable!("head shapes are positive atoms"),
            };
            let lits: Vec<Literal> = body
                .iter()
                .map(|s| instantiate(s, &assignment, &mut next))
                .collect();
            let distinct: BTreeSet<&Literal> = lits.iter().collect();
            if distinct.len() != lits.len() {
                continue;
            }
            let rule = Rule::normal(head_atom.clone(), lits.clone());
            if rule.unsafe_variable().is_some() {
                continue;
            }
            let mut var_types = VarTypes::new();
            for (slot_index, v) in assignment.iter().enumerate() {
                var_types.insert(var_name(*v), types[slot_index].clone());
            }
            let perms = &self.perms[var_types.len()];
            let (rule, var_types, text) = canonicalize(&head_atom, &lits, &var_types, perms);
            if self.out.contains_key(&text) {
                continue;
            }
            let body_typed_terms = typed_body_terms(&rule, &var_types, body, self.constants);
            self.out.insert(
                text.clone(),
                CandidateRule {
                    rule,
                    var_types,
                    body_typed_terms,
                    text,
                },
            );
            if self.out.len() > self.cap {
                return Err(SpaceError::CapExceeded { cap: self.cap });
            }
        }
        Ok(())
    }
}

/// Typed terms in the body. Variables take their declared type; constants
/// count for every type of a `const(t)` slot they could fill, which is
/// recovered from the shapes that produced the body.
fn typed_body_terms(
    rule: &Rule,
    var_types: &VarTypes,
    shapes: &[&Shape],
    constants: &TypedConstants,
) -> BTreeSet<(Term, Symbol)> {
    let mut out = BTreeSet::new();
    for lit in &rule.body {
        for t in lit.terms() {
            if let Term::Var(v) = t {
                if let Some(ty) = var_types.get(v) {
                    out.insert((t.clone(), ty.clone()));
                }
            }
        }
    }
    // constants at const(t) slots: any declared type of the constant counts
    for shape in shapes {
        for slot in &shape.slots {
            if let Slot::Term(t) = slot {
                for ty in constants.types() {
                    if constants.has(ty, t) {
                        out.insert((t.clone(), ty.clone()));
                    }
                }
            }
        }
    }
    out
}

fn multisets(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for i in start..n {
        current.push(i);
        multisets(n, k, i, current, out);
        current.pop();
    }
}

/// Enumerates every safe rule compatible with the bias within its bounds,
/// deduplicated modulo variable renaming and ordered by canonical text.
pub fn enumerate_space(bias: &Bias, cap: usize) -> Result<HypothesisSpace, SpaceError> {
    let bounds = bias.bounds;
    let mut head_shapes = Vec::new();
    let mut body_shapes = Vec::new();
    for m in &bias.modes {
        let shapes = expand_shapes(m, &bias.constants)?;
        match m.kind {
            ModeKind::Head => head_shapes.extend(shapes),
            ModeKind::Body => body_shapes.extend(shapes),
        }
    }
    if !bias.modes.iter().any(|m| m.kind == ModeKind::Head) {
        return Err(SpaceError::NoHeadMode);
    }
    let perms = (0..=bounds.max_vars).map(permutations).collect();
    let mut e = Enumerator {
        bounds,
        cap,
        body_shapes,
        perms,
        out: BTreeMap::new(),
        constants: &bias.constants,
    };
    let mut combos = Vec::new();
    for k in 0..=bounds.max_body {
        multisets(e.body_shapes.len(), k, 0, &mut Vec::new(), &mut combos);
    }
    let body_shapes = e.body_shapes.clone();
    for head in &head_shapes {
        for combo in &combos {
            let body: Vec<&Shape> = combo.iter().map(|&i| &body_shapes[i]).collect();
            e.add(head, &body)?;
        }
    }
    Ok(HypothesisSpace {
        rules: e.out.into_values().collect(),
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_task;

    fn space_of(text: &str) -> HypothesisSpace {
        let t = parse_task(text).unwrap();
        enumerate_space(&t.bias, DEFAULT_SPACE_CAP).unwrap()
    }

    fn texts(s: &HypothesisSpace) -> Vec<&str> {
        s.rules.iter().map(|r| r.text.as_str()).collect()
    }

    fn body_mode(schema: &str, naf: bool) -> ModeDeclaration {
        let t = parse_task(&format!("#modeb({schema}).")).unwrap();
        ModeDeclaration {
            naf_allowed: naf,
            ..t.bias.modes[0].clone()
        }
    }

    #[test]
    fn compatible_placeholders() {
        let mut consts = TypedConstants::new();
        consts.insert(sym("cell"), Term::constant("a"));
        let var_mode = body_mode("p(var(cell))", true);
        let const_mode = body_mode("p(const(cell))", true);
        let pv = Literal::Pos(Atom::new("p", vec![Term::var("V1")]));
        let pa = Literal::Pos(Atom::new("p", vec![Term::constant("a")]));
        assert!(compatible(&pv, &var_mode, &consts, None));
        assert!(!compatible(&pa, &var_mode, &consts, None));
        assert!(compatible(&pa, &const_mode, &consts, None));
        let pb = Literal::Pos(Atom::new("p", vec![Term::constant("b")]));
        assert!(!compatible(&pb, &const_mode, &consts, None));
    }

    #[test]
    fn compatible_respects_types_and_polarity() {
        let consts = TypedConstants::new();
        let m = body_mode("p(var(cell))", false);
        let naf = Literal::Naf(Atom::new("p", vec![Term::var("V1")]));
        assert!(!compatible(&naf, &m, &consts, None));
        let mut types = VarTypes::new();
        types.insert(sym("V1"), sym("time"));
        let pos = Literal::Pos(Atom::new("p", vec![Term::var("V1")]));
        assert!(!compatible(&pos, &m, &consts, Some(&types)));
    }

    #[test]
    fn propositional_space_with_naf() {
        let s = space_of("#modeh(h). #modeb(b). #maxb(1). #maxv(0).");
        assert_eq!(texts(&s), vec!["h :- b.", "h :- not b.", "h."]);
    }

    #[test]
    fn propositional_space_without_naf() {
        let s = space_of("#modeh(h). #modeb(b, (positive)). #maxb(1). #maxv(0).");
        assert_eq!(texts(&s), vec!["h :- b.", "h."]);
    }

    #[test]
    fn facts_only_when_body_bound_is_zero() {
        let s = space_of("#modeh(h). #modeh(g). #modeb(b). #maxb(0).");
        assert_eq!(texts(&s), vec!["g.", "h."]);
    }

    #[test]
    fn renaming_duplicates_collapse() {
        let s = space_of("#modeh(p(var(t))). #modeb(q(var(t)), (positive)). #maxb(2). #maxv(2).");
        // q(V1),q(V2) with head p(V1) appears once, not once per naming
        let two_var: Vec<_> = texts(&s)
            .into_iter()
            .filter(|t| t.contains("V2"))
            .collect();
        assert_eq!(two_var, vec!["p(V1) :- q(V1), q(V2)."]);
        assert!(texts(&s).contains(&"p(V1) :- q(V1)."));
        // p(V1). alone is unsafe
        assert!(!texts(&s).contains(&"p(V1)."));
    }

    #[test]
    fn variable_types_are_not_mixed() {
        let s = space_of(
            "#modeh(p(var(a))). #modeb(q(var(a)), (positive)). #modeb(r(var(b)), (positive)). #maxb(2). #maxv(2).",
        );
        for r in &s.rules {
            for (v, ty) in &r.var_types {
                for lit in &r.rule.body {
                    if let Literal::Pos(a) = lit {
                        if a.args.contains(&Term::Var(v.clone())) {
                            let expected = if &*a.predicate == "q" { "a" } else { "b" };
                            assert_eq!(&**ty, expected, "{}", r.text);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn missing_constants_reported() {
        let t = parse_task("#modeh(p(const(c))).").unwrap();
        assert_eq!(
            enumerate_space(&t.bias, 10).unwrap_err(),
            SpaceError::NoConstants("c".into())
        );
    }

    #[test]
    fn cap_enforced() {
        let t = parse_task("#modeh(h). #modeb(a). #modeb(b). #modeb(c). #maxb(3).").unwrap();
        assert_eq!(
            enumerate_space(&t.bias, 5).unwrap_err(),
            SpaceError::CapExceeded { cap: 5 }
        );
    }

    #[test]
    fn no_head_mode() {
        let t = parse_task("#modeb(a).").unwrap();
        assert_eq!(enumerate_space(&t.bias, 10).unwrap_err(), SpaceError::NoHeadMode);
    }

    #[test]
    fn canonical_form_ignores_names_and_order() {
        let r = crate::parse::parse_program("p(Y) :- q(X, Y), r(X).").unwrap();
        let s = crate::parse::parse_program("p(B) :- r(A), q(A, B).").unwrap();
        assert_eq!(canonical_form(&r.rules[0]), canonical_form(&s.rules[0]));
        assert_eq!(canonical_form(&r.rules[0]), "p(V1) :- q(V2,V1), r(V2).");
    }

    #[test]
    fn comparison_modes() {
        let s = space_of(
            "#modeh(p(var(n))). #modeb(q(var(n)), (positive)). #modeb(var(n) < var(n)). #maxb(3). #maxv(2).",
        );
        assert!(texts(&s).contains(&"p(V1) :- V1 < V2, q(V1), q(V2)."));
        assert!(texts(&s).contains(&"p(V1) :- V2 < V1, q(V1), q(V2)."));
    }
}
