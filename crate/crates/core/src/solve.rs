//! Stable-model enumeration for ground programs.
//!
//! Choice rules are compiled away by [`translate_choice`]; the search then
//! only branches on atoms that occur under default negation. Each branch
//! point is propagated with the alternating lower/upper least-model bounds
//! used for the well-founded model, so stratified programs are decided
//! without any branching.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ground::{is_internal, AtomId, AtomTable, GroundHead, GroundProgram, GroundRule};
use crate::syntax::{sym, Atom};

pub const DEFAULT_MAX_ATOMS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("search needs {actual} undecided atoms, above the limit of {limit}")]
    TooManyAtoms { limit: usize, actual: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Upper bound on the atoms left undecided after initial propagation,
    /// i.e. on the depth of the search tree.
    pub max_atoms: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_atoms: DEFAULT_MAX_ATOMS,
        }
    }
}

/// A set of ground atoms, as sorted dense ids of one program.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interpretation(Vec<AtomId>);

impl Interpretation {
    pub fn from_ids(ids: impl IntoIterator<Item = AtomId>) -> Interpretation {
        let set: BTreeSet<AtomId> = ids.into_iter().collect();
        Interpretation(set.into_iter().collect())
    }

    fn from_mask(mask: &[bool]) -> Interpretation {
        Interpretation(
            mask.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i as AtomId)
                .collect(),
        )
    }

    pub fn contains(&self, id: AtomId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn ids(&self) -> &[AtomId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.0 {
            m[i as usize] = true;
        }
        m
    }

    /// Looks up every atom of `atoms` in `table`; `None` if one is missing.
    pub fn from_atoms<'a>(
        table: &AtomTable,
        atoms: impl IntoIterator<Item = &'a Atom>,
    ) -> Option<Interpretation> {
        let ids: Option<Vec<AtomId>> = atoms.into_iter().map(|a| table.get(a)).collect();
        ids.map(Interpretation::from_ids)
    }

    /// Drops atoms introduced by translations.
    pub fn visible(&self, table: &AtomTable) -> Interpretation {
        Interpretation(
            self.0
                .iter()
                .copied()
                .filter(|&i| !is_internal(table.atom(i)))
                .collect(),
        )
    }

    pub fn atoms<'t>(&'t self, table: &'t AtomTable) -> impl Iterator<Item = &'t Atom> {
        self.0.iter().map(move |&i| table.atom(i))
    }

    /// Atoms as text, sorted, separated by single spaces.
    pub fn display(&self, table: &AtomTable) -> String {
        let mut texts: Vec<String> = self.atoms(table).map(|a| a.to_string()).collect();
        texts.sort();
        texts.join(" ")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerSetCollection {
    pub models: Vec<Interpretation>,
    /// False when enumeration stopped at the requested limit.
    pub complete: bool,
}

fn fresh_complement(atoms: &mut AtomTable, rule: usize, a: &Atom) -> AtomId {
    let name = format!("_c{rule}_{}", a.predicate);
    atoms.intern(Atom {
        predicate: sym(&name),
        args: a.args.clone(),
    })
}

fn subsets_of_size(items: &[AtomId], k: usize) -> Vec<Vec<AtomId>> {
    fn go(items: &[AtomId], k: usize, start: usize, cur: &mut Vec<AtomId>, out: &mut Vec<Vec<AtomId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Replaces every choice rule by normal rules over fresh complement atoms
/// plus constraints enforcing its cardinality bounds. Existing atom ids are
/// preserved; complement atoms are appended and marked internal.
pub fn translate_choice(ground: &GroundProgram) -> GroundProgram {
    if !ground.has_choice() {
        return ground.clone();
    }
    let mut atoms = ground.atoms.clone();
    let mut rules = Vec::new();
    for (ri, rule) in ground.rules.iter().enumerate() {
        let GroundHead::Choice {
            lower,
            upper,
            atoms: elems,
        } = &rule.head
        else {
            rules.push(rule.clone());
            continue;
        };
        let origin: Arc<str> = Arc::from(rule.to_rule(&ground.atoms).to_string());
        let mut elems: Vec<AtomId> = elems.clone();
        let mut seen = BTreeSet::new();
        elems.retain(|a| seen.insert(*a));
        let n = elems.len();
        let lower = (*lower as usize).min(n);
        let upper = (*upper as usize).min(n);
        let mk = |head, pos: Vec<AtomId>, neg: Vec<AtomId>| GroundRule {
            head,
            pos,
            neg,
            origin: Some(origin.clone()),
        };
        for &a in &elems {
            let atom = ground.atoms.atom(a).clone();
            let c = fresh_complement(&mut atoms, ri, &atom);
            let mut neg_a = rule.neg.clone();
            neg_a.push(c);
            rules.push(mk(GroundHead::Atom(a), rule.pos.clone(), neg_a));
            let mut neg_c = rule.neg.clone();
            neg_c.push(a);
            rules.push(mk(GroundHead::Atom(c), rule.pos.clone(), neg_c));
        }
        if lower > 0 {
            for s in subsets_of_size(&elems, n - lower + 1) {
                let mut neg = rule.neg.clone();
                neg.extend(s);
                rules.push(mk(GroundHead::None, rule.pos.clone(), neg));
            }
        }
        if upper < n {
            for s in subsets_of_size(&elems, upper + 1) {
                let mut pos = rule.pos.clone();
                pos.extend(s);
                rules.push(mk(GroundHead::None, pos, rule.neg.clone()));
            }
        }
    }
    GroundProgram { rules, atoms }
}

/// The reduct with respect to `candidate`: rules with a naf-literal
/// contradicted by the candidate are removed, naf-literals are dropped from
/// the rest. A choice rule contributes `a :- body+` for each of its atoms in
/// the candidate.
pub fn reduct(ground: &GroundProgram, candidate: &Interpretation) -> GroundProgram {
    let mut rules = Vec::new();
    for r in &ground.rules {
        if r.neg.iter().any(|&a| candidate.contains(a)) {
            continue;
        }
        match &r.head {
            GroundHead::Choice { atoms, .. } => {
                for &a in atoms.iter().filter(|&&a| candidate.contains(a)) {
                    rules.push(GroundRule {
                        head: GroundHead::Atom(a),
                        pos: r.pos.clone(),
                        neg: Vec::new(),
                        origin: r.origin.clone(),
                    });
                }
            }
            _ => rules.push(GroundRule {
                head: r.head.clone(),
                pos: r.pos.clone(),
                neg: Vec::new(),
                origin: r.origin.clone(),
            }),
        }
    }
    GroundProgram {
        rules,
        atoms: ground.atoms.clone(),
    }
}

/// Least fixpoint of the immediate-consequence operator. Naf-literals must
/// be absent; constraints are ignored.
pub fn least_model(definite: &GroundProgram) -> Interpretation {
    debug_assert!(definite.rules.iter().all(|r| r.neg.is_empty()));
    let n = definite.atoms.len();
    let mut truth = vec![false; n];
    loop {
        let mut changed = false;
        for r in &definite.rules {
            if let GroundHead::Atom(h) = r.head {
                if !truth[h as usize] && r.pos.iter().all(|&a| truth[a as usize]) {
                    truth[h as usize] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return Interpretation::from_mask(&truth);
        }
    }
}

fn body_holds(r: &GroundRule, s: &Interpretation) -> bool {
    r.pos.iter().all(|&a| s.contains(a)) && r.neg.iter().all(|&a| !s.contains(a))
}

/// Stability by definition: the candidate is the least model of its own
/// reduct, no constraint body holds, and every applicable choice rule's
/// bounds are respected.
pub fn is_stable(ground: &GroundProgram, candidate: &Interpretation) -> bool {
    if candidate.ids().iter().any(|&a| a as usize >= ground.atoms.len()) {
        return false;
    }
    for r in &ground.rules {
        match &r.head {
            GroundHead::None if body_holds(r, candidate) => return false,
            GroundHead::Choice {
                lower,
                upper,
                atoms,
            } if body_holds(r, candidate) => {
                let set: BTreeSet<AtomId> = atoms.iter().copied().collect();
                let count = set.iter().filter(|&&a| candidate.contains(a)).count() as u32;
                if count < *lower || count > *upper {
                    return false;
                }
            }
            _ => {}
        }
    }
    least_model(&reduct(ground, candidate)) == *candidate
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Unknown,
    True,
    False,
}

/// A normal program prepared for repeated least-model computations.
struct Normal {
    heads: Vec<Option<AtomId>>,
    pos: Vec<Vec<AtomId>>,
    neg: Vec<Vec<AtomId>>,
    pos_occ: Vec<Vec<usize>>,
    facts: Vec<usize>,
    n: usize,
}

impl Normal {
    fn new(g: &GroundProgram) -> Normal {
        let n = g.atoms.len();
        let mut pos_occ = vec![Vec::new(); n];
        let mut facts = Vec::new();
        let mut heads = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, r) in g.rules.iter().enumerate() {
            heads.push(match r.head {
                GroundHead::Atom(h) => Some(h),
                GroundHead::None => None,
                GroundHead::Choice { .. } => unreachable!("translate choice rules first"),
            });
            let mut p = r.pos.clone();
            p.sort_unstable();
            p.dedup();
            for &a in &p {
                pos_occ[a as usize].push(i);
            }
            if p.is_empty() {
                facts.push(i);
            }
            pos.push(p);
            neg.push(r.neg.clone());
        }
        Normal {
            heads,
            pos,
            neg,
            pos_occ,
            facts,
            n,
        }
    }

    /// Least model of the rules accepted by `active`, constraints ignored.
    fn least(&self, active: impl Fn(usize) -> bool, counts: &mut Vec<usize>) -> Vec<bool> {
        let mut truth = vec![false; self.n];
        counts.clear();
        counts.extend(self.pos.iter().map(Vec::len));
        let mut queue: Vec<AtomId> = Vec::new();
        for &r in &self.facts {
            if let Some(h) = self.heads[r] {
                if active(r) && !truth[h as usize] {
                    truth[h as usize] = true;
                    queue.push(h);
                }
            }
        }
        while let Some(a) = queue.pop() {
            for &r in &self.pos_occ[a as usize] {
                counts[r] -= 1;
                if counts[r] == 0 {
                    if let Some(h) = self.heads[r] {
                        if !truth[h as usize] && active(r) {
                            truth[h as usize] = true;
                            queue.push(h);
                        }
                    }
                }
            }
        }
        truth
    }

    /// Alternating fixpoint under a partial assignment. Returns the lower
    /// (certainly true) and upper (possibly true) bounds, or `None` on
    /// conflict.
    fn propagate(&self, assign: &[Val], counts: &mut Vec<usize>) -> Option<(Vec<bool>, Vec<bool>)> {
        let mut lower = vec![false; self.n];
        let mut upper;
        loop {
            // "not a" is false when a is certainly true or assumed true
            upper = self.least(
                |r| {
                    self.neg[r]
                        .iter()
                        .all(|&a| !lower[a as usize] && assign[a as usize] != Val::True)
                },
                counts,
            );
            let next_lower = self.least(
                |r| {
                    self.neg[r]
                        .iter()
                        .all(|&a| !upper[a as usize] || assign[a as usize] == Val::False)
                },
                counts,
            );
            if next_lower == lower {
                break;
            }
            lower = next_lower;
        }
        for a in 0..self.n {
            match assign[a] {
                Val::True if !upper[a] => return None,
                Val::False if lower[a] => return None,
                _ => {}
            }
        }
        for r in 0..self.heads.len() {
            if self.heads[r].is_none()
                && self.pos[r].iter().all(|&a| lower[a as usize])
                && self.neg[r]
                    .iter()
                    .all(|&a| !upper[a as usize] || assign[a as usize] == Val::False)
            {
                return None;
            }
        }
        Some((lower, upper))
    }

    fn violates_constraint(&self, model: &[bool]) -> bool {
        (0..self.heads.len()).any(|r| {
            self.heads[r].is_none()
                && self.pos[r].iter().all(|&a| model[a as usize])
                && self.neg[r].iter().all(|&a| !model[a as usize])
        })
    }
}

struct Search<'a> {
    prog: &'a Normal,
    branch_atoms: Vec<AtomId>,
    counts: Vec<usize>,
    models: BTreeSet<Vec<AtomId>>,
}

impl Search<'_> {
    fn run(&mut self, assign: &mut Vec<Val>) {
        let Some((lower, upper)) = self.prog.propagate(assign, &mut self.counts) else {
            return;
        };
        let open = self
            .branch_atoms
            .iter()
            .copied()
            .find(|&a| assign[a as usize] == Val::Unknown && upper[a as usize] && !lower[a as usize]);
        match open {
            Some(a) => {
                for v in [Val::True, Val::False] {
                    assign[a as usize] = v;
                    self.run(assign);
                }
                assign[a as usize] = Val::Unknown;
            }
            None => {
                // every naf-atom is decided, so lower == upper is the model
                if lower != upper || self.prog.violates_constraint(&lower) {
                    return;
                }
                let ids = lower
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i as AtomId)
                    .collect();
                self.models.insert(ids);
            }
        }
    }
}

fn enumerate_normal(
    ground: &GroundProgram,
    config: &SolverConfig,
) -> Result<Vec<Interpretation>, SolveError> {
    let prog = Normal::new(ground);
    let branch: BTreeSet<AtomId> = prog.neg.iter().flatten().copied().collect();
    let mut counts = Vec::new();
    let mut assign = vec![Val::Unknown; prog.n];
    let Some((lower, upper)) = prog.propagate(&assign, &mut counts) else {
        return Ok(Vec::new());
    };
    let branch_atoms: Vec<AtomId> = branch
        .into_iter()
        .filter(|&a| upper[a as usize] && !lower[a as usize])
        .collect();
    if branch_atoms.len() > config.max_atoms {
        return Err(SolveError::TooManyAtoms {
            limit: config.max_atoms,
            actual: branch_atoms.len(),
        });
    }
    let mut search = Search {
        prog: &prog,
        branch_atoms,
        counts,
        models: BTreeSet::new(),
    };
    search.run(&mut assign);
    Ok(search.models.into_iter().map(Interpretation).collect())
}

/// All stable models, ordered lexicographically by their sorted atom ids.
///
/// Choice rules are translated first and the models are projected back
/// onto the program's own atoms.
pub fn answer_sets(
    ground: &GroundProgram,
    limit: Option<usize>,
    config: &SolverConfig,
) -> Result<AnswerSetCollection, SolveError> {
    let translated;
    let (program, visible) = if ground.has_choice() {
        translated = translate_choice(ground);
        (&translated, Some(ground.atoms.len()))
    } else {
        (ground, None)
    };
    let mut models = enumerate_normal(program, config)?;
    if let Some(n) = visible {
        for m in &mut models {
            m.0.retain(|&a| (a as usize) < n);
        }
        models.sort();
    }
    let complete = limit.is_none_or(|l| models.len() <= l);
    if let Some(l) = limit {
        models.truncate(l);
    }
    Ok(AnswerSetCollection { models, complete })
}

/// Outcome of an entailment query. `has_models` separates a vacuous
/// cautious truth from a substantive one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entailment {
    pub holds: bool,
    pub has_models: bool,
}

impl fmt::Display for Entailment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.holds)
    }
}

/// True in at least one answer set.
pub fn brave_entails(
    ground: &GroundProgram,
    atom: &Atom,
    config: &SolverConfig,
) -> Result<Entailment, SolveError> {
    let sets = answer_sets(ground, None, config)?;
    let id = ground.atoms.get(atom);
    Ok(Entailment {
        holds: id.is_some_and(|id| sets.models.iter().any(|m| m.contains(id))),
        has_models: !sets.models.is_empty(),
    })
}

/// True in every answer set; vacuously true when there are none.
pub fn cautious_entails(
    ground: &GroundProgram,
    atom: &Atom,
    config: &SolverConfig,
) -> Result<Entailment, SolveError> {
    let sets = answer_sets(ground, None, config)?;
    let id = ground.atoms.get(atom);
    let holds = match id {
        Some(id) => sets.models.iter().all(|m| m.contains(id)),
        None => sets.models.is_empty(),
    };
    Ok(Entailment {
        holds,
        has_models: !sets.models.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_program;

    fn gp(text: &str) -> GroundProgram {
        GroundProgram::from_ground_rules(&parse_program(text).unwrap()).unwrap()
    }

    fn interp(g: &GroundProgram, atoms: &[&str]) -> Interpretation {
        Interpretation::from_atoms(&g.atoms, atoms.iter().map(|a| Atom::prop(a)).collect::<Vec<_>>().iter())
            .expect("atoms in program")
    }

    fn models(g: &GroundProgram) -> Vec<String> {
        answer_sets(g, None, &SolverConfig::default())
            .unwrap()
            .models
            .iter()
            .map(|m| m.display(&g.atoms))
            .collect()
    }

    #[test]
    fn reduct_keeps_rule_when_naf_atom_absent() {
        let g = gp("a :- not b.");
        let r = reduct(&g, &interp(&g, &["a"]));
        assert_eq!(r.to_string(), "a.\n");
    }

    #[test]
    fn reduct_removes_contradicted_rule() {
        let g = gp("a :- not b.");
        let r = reduct(&g, &interp(&g, &["b"]));
        assert!(r.rules.is_empty());
    }

    #[test]
    fn reduct_of_definite_program_is_identity() {
        let g = gp("a. b :- a.");
        assert_eq!(reduct(&g, &interp(&g, &["a"])).rules, g.rules);
    }

    #[test]
    fn least_model_cases() {
        let g = gp("a. b :- a.");
        assert_eq!(least_model(&g).display(&g.atoms), "a b");
        let g = gp("b :- a.");
        assert!(least_model(&g).is_empty());
        let g = gp("p :- p.");
        assert!(least_model(&g).is_empty());
    }

    #[test]
    fn stability_by_definition() {
        let g = gp("a :- not b. b :- not a.");
        assert!(is_stable(&g, &interp(&g, &["a"])));
        assert!(is_stable(&g, &interp(&g, &["b"])));
        assert!(!is_stable(&g, &interp(&g, &["a", "b"])));
        assert!(!is_stable(&g, &Interpretation::default()));
        let g = gp("a.");
        assert!(!is_stable(&g, &Interpretation::default()));
    }

    #[test]
    fn enumerate_even_loop() {
        let g = gp("a :- not b. b :- not a.");
        assert_eq!(models(&g), vec!["a", "b"]);
    }

    #[test]
    fn constraint_kills_only_model() {
        assert!(models(&gp("a. :- a.")).is_empty());
    }

    #[test]
    fn empty_program_has_empty_model() {
        assert_eq!(models(&gp("")), vec![""]);
    }

    #[test]
    fn odd_loop_has_no_model() {
        assert!(models(&gp("a :- not a.")).is_empty());
    }

    #[test]
    fn choice_translation_cases() {
        assert_eq!(models(&gp("0 { a } 1.")), vec!["", "a"]);
        assert_eq!(models(&gp("1 { a } 1.")), vec!["a"]);
        assert_eq!(models(&gp("1 { a ; b } 1.")), vec!["a", "b"]);
    }

    #[test]
    fn translation_is_identity_without_choice() {
        let g = gp("a :- not b. b.");
        assert_eq!(translate_choice(&g), g);
    }

    #[test]
    fn translated_atoms_are_internal() {
        let g = gp("{ a }.");
        let t = translate_choice(&g);
        assert_eq!(t.atoms.len(), 2);
        assert!(is_internal(t.atoms.atom(1)));
        assert_eq!(t.rules.len(), 2);
    }

    #[test]
    fn stability_with_choice_rules() {
        let g = gp("1 { a ; b } 1 :- c. c.");
        assert!(is_stable(&g, &interp(&g, &["a", "c"])));
        assert!(!is_stable(&g, &interp(&g, &["a", "b", "c"])));
        assert!(!is_stable(&g, &interp(&g, &["c"])));
    }

    #[test]
    fn entailment_cases() {
        let cfg = SolverConfig::default();
        let a = Atom::prop("a");
        let g = gp("a :- not b. b :- not a.");
        assert!(brave_entails(&g, &a, &cfg).unwrap().holds);
        assert!(!cautious_entails(&g, &a, &cfg).unwrap().holds);
        let g = gp("a.");
        assert!(brave_entails(&g, &a, &cfg).unwrap().holds);
        assert!(cautious_entails(&g, &a, &cfg).unwrap().holds);
        let g = gp("a. :- a.");
        assert!(!brave_entails(&g, &a, &cfg).unwrap().holds);
        let c = cautious_entails(&g, &a, &cfg).unwrap();
        assert!(c.holds && !c.has_models);
    }

    #[test]
    fn limit_truncates_and_flags() {
        let g = gp("a :- not b. b :- not a.");
        let s = answer_sets(&g, Some(1), &SolverConfig::default()).unwrap();
        assert_eq!(s.models.len(), 1);
        assert!(!s.complete);
        let s = answer_sets(&g, Some(2), &SolverConfig::default()).unwrap();
        assert!(s.complete);
    }

    #[test]
    fn atom_limit_reported() {
        let text: String = (0..5).map(|i| format!("a{i} :- not b{i}. b{i} :- not a{i}.\n")).collect();
        let g = gp(&text);
        let err = answer_sets(&g, None, &SolverConfig { max_atoms: 4 }).unwrap_err();
        assert_eq!(err, SolveError::TooManyAtoms { limit: 4, actual: 10 });
        assert_eq!(models(&g).len(), 32);
    }

    #[test]
    fn stratified_program_needs_no_branching() {
        let text: String = (0..40).map(|i| format!("p{} :- not q{i}.\n", i)).collect();
        let g = gp(&text);
        let s = answer_sets(&g, None, &SolverConfig { max_atoms: 0 }).unwrap();
        assert_eq!(s.models.len(), 1);
        assert_eq!(s.models[0].len(), 40);
    }
}
