//! Noisy learning from answer sets: example acceptance, scoring, and an
//! exact branch-and-bound search for the cost-minimal hypothesis.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ground::{
    ground_relevant, has_instance, herbrand_universe_of, AtomIndex, GroundError, GroundProgram,
    HerbrandUniverse, TypedRule,
};
use crate::par::{self, Execution};
use crate::solve::{answer_sets, Interpretation, SolveError, SolverConfig};
use crate::space::{enumerate_space, CandidateRule, HypothesisSpace, SpaceError, DEFAULT_SPACE_CAP};
use crate::syntax::{sym, Atom, Program, Rule, Symbol};
use crate::task::{Example, LasTask, PartialInterpretation, Polarity, TypedConstants};

/// Candidates evaluated per parallel batch. Fixed so that batching never
/// depends on the thread count.
const CHUNK: usize = 32;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("example {example}: {source}")]
    Ground { example: Symbol, source: GroundError },
    #[error("example {example}: {source}")]
    Solve { example: Symbol, source: SolveError },
    #[error("the task has no examples")]
    NoExamples,
    #[error("the hypothesis space is empty")]
    EmptySpace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ScoringKind {
    Default,
    MultiTimestamp { surcharge: u32, timestamp_type: Symbol },
}

/// Rule-wise scoring: each rule costs its literal count plus a surcharge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoringFunction {
    pub name: String,
    kind: ScoringKind,
}

pub fn default_scoring() -> ScoringFunction {
    ScoringFunction {
        name: "default".into(),
        kind: ScoringKind::Default,
    }
}

/// Surcharges rules whose body mentions fewer than two distinct terms of
/// type `time`.
pub fn multi_timestamp_scoring(surcharge: u32) -> ScoringFunction {
    multi_timestamp_scoring_for(surcharge, "time")
}

pub fn multi_timestamp_scoring_for(surcharge: u32, timestamp_type: &str) -> ScoringFunction {
    ScoringFunction {
        name: "multi-timestamp".into(),
        kind: ScoringKind::MultiTimestamp {
            surcharge,
            timestamp_type: sym(timestamp_type),
        },
    }
}

impl ScoringFunction {
    pub fn surcharge(&self, rule: &CandidateRule) -> u32 {
        match &self.kind {
            ScoringKind::Default => 0,
            ScoringKind::MultiTimestamp {
                surcharge,
                timestamp_type,
            } => {
                let distinct = rule
                    .body_typed_terms
                    .iter()
                    .filter(|(_, ty)| ty == timestamp_type)
                    .count();
                if distinct < 2 {
                    *surcharge
                } else {
                    0
                }
            }
        }
    }
}

pub fn rule_cost(rule: &CandidateRule, scoring: &ScoringFunction) -> u32 {
    rule.base_cost() + scoring.surcharge(rule)
}

/// Whether the interpretation contains every inclusion and no exclusion.
pub fn extends<'a>(
    interpretation: impl IntoIterator<Item = &'a Atom>,
    pi: &PartialInterpretation,
) -> bool {
    let set: std::collections::HashSet<&Atom> = interpretation.into_iter().collect();
    pi.inclusions.iter().all(|a| set.contains(a)) && !pi.exclusions.iter().any(|a| set.contains(a))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LearnConfig {
    /// Overrides the task's `#maxrules`.
    pub max_rules: Option<usize>,
    pub space_cap: Option<usize>,
    pub solver: SolverConfig,
    pub execution: Execution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    /// Sorted by canonical text.
    pub rules: Vec<CandidateRule>,
    pub cost: u64,
}

impl Hypothesis {
    pub fn program(&self) -> Program {
        Program::new(self.rules.iter().map(|r| r.rule.clone()).collect())
    }

    fn key(&self) -> (u64, usize, Vec<&str>) {
        (
            self.cost,
            self.rules.len(),
            self.rules.iter().map(|r| r.text.as_str()).collect(),
        )
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}", r.text)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleOutcome {
    pub id: Symbol,
    pub accepted: bool,
    /// The example's penalty if rejected, else zero.
    pub penalty_paid: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LearnReport {
    pub hypothesis: Hypothesis,
    pub rule_cost: u64,
    pub penalty_cost: u64,
    pub outcomes: Vec<ExampleOutcome>,
    /// Every example accepted.
    pub fully_covering: bool,
    pub space_size: usize,
    /// Candidate hypotheses scored during search.
    pub evaluated: usize,
}

/// Examples with identical context, partial interpretation and polarity
/// share one evaluation.
struct Group {
    id: Symbol,
    polarity: Polarity,
    pi: PartialInterpretation,
    penalty: u64,
    base: Vec<Rule>,
    universe: HerbrandUniverse,
    possible: AtomIndex,
    empty_accepts: bool,
}

/// The task prepared for repeated hypothesis evaluation.
pub struct Evaluator<'t> {
    groups: Vec<Group>,
    member_of: Vec<usize>,
    examples: &'t [Example],
    solver: SolverConfig,
}

fn accepted_by(program: &GroundProgram, pi: &PartialInterpretation, polarity: Polarity, models: &[Interpretation]) -> bool {
    let inc = Interpretation::from_atoms(&program.atoms, &pi.inclusions);
    let exists = match inc {
        None => false,
        Some(inc) => {
            let exc: Vec<_> = pi.exclusions.iter().filter_map(|a| program.atoms.get(a)).collect();
            models.iter().any(|m| {
                inc.ids().iter().all(|&a| m.contains(a)) && exc.iter().all(|&a| !m.contains(a))
            })
        }
    };
    match polarity {
        Polarity::Positive => exists,
        Polarity::Negative => !exists,
    }
}

impl Group {
    fn solve(&self, hypothesis: &[&CandidateRule], solver: &SolverConfig) -> Result<bool, LearnError> {
        let mut typed: Vec<TypedRule> = self.base.iter().map(TypedRule::untyped).collect();
        typed.extend(hypothesis.iter().map(|c| TypedRule {
            rule: &c.rule,
            var_types: Some(&c.var_types),
        }));
        let g = ground_relevant(&typed, &self.universe).map_err(|source| LearnError::Ground {
            example: self.id.clone(),
            source,
        })?;
        let sets = answer_sets(&g, None, solver).map_err(|source| LearnError::Solve {
            example: self.id.clone(),
            source,
        })?;
        Ok(accepted_by(&g, &self.pi, self.polarity, &sets.models))
    }

    fn accepts(&self, hypothesis: &[&CandidateRule], solver: &SolverConfig) -> Result<bool, LearnError> {
        // rules without a relevant instance leave the ground program unchanged
        let fires = hypothesis.iter().any(|c| {
            has_instance(
                TypedRule {
                    rule: &c.rule,
                    var_types: Some(&c.var_types),
                },
                &self.possible,
                &self.universe,
            )
        });
        if fires {
            self.solve(hypothesis, solver)
        } else {
            Ok(self.empty_accepts)
        }
    }
}

impl<'t> Evaluator<'t> {
    pub fn new(task: &'t LasTask, solver: SolverConfig) -> Result<Evaluator<'t>, LearnError> {
        Self::with_constants(&task.background, &task.examples, &task.bias.constants, solver)
    }

    pub fn with_constants(
        background: &Program,
        examples: &'t [Example],
        constants: &TypedConstants,
        solver: SolverConfig,
    ) -> Result<Evaluator<'t>, LearnError> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut groups: Vec<Group> = Vec::new();
        let mut member_of = Vec::with_capacity(examples.len());
        for e in examples {
            let key = format!(
                "{:?}|{:?}|{:?}|{}",
                e.polarity, e.pi.inclusions, e.pi.exclusions, e.context
            );
            if let Some(&g) = index.get(&key) {
                groups[g].penalty += u64::from(e.penalty);
                member_of.push(g);
                continue;
            }
            let mut base = background.rules.clone();
            base.extend(e.context.rules.iter().cloned());
            let universe = herbrand_universe_of([background, &e.context], constants);
            let mut group = Group {
                id: e.id.clone(),
                polarity: e.polarity,
                pi: e.pi.clone(),
                penalty: u64::from(e.penalty),
                base,
                universe,
                possible: AtomIndex::default(),
                empty_accepts: false,
            };
            let typed: Vec<TypedRule> = group.base.iter().map(TypedRule::untyped).collect();
            let g0 = ground_relevant(&typed, &group.universe).map_err(|source| LearnError::Ground {
                example: e.id.clone(),
                source,
            })?;
            group.possible = AtomIndex::new(
                g0.rules
                    .iter()
                    .flat_map(|r| r.head_atoms().iter().map(|&a| g0.atoms.atom(a).clone())),
            );
            group.empty_accepts = group.solve(&[], &solver)?;
            index.insert(key, groups.len());
            member_of.push(groups.len());
            groups.push(group);
        }
        Ok(Evaluator {
            groups,
            member_of,
            examples,
            solver,
        })
    }

    /// Number of distinct example evaluations.
    pub fn distinct_examples(&self) -> usize {
        self.groups.len()
    }

    /// Acceptance of every example, in task order.
    pub fn acceptance(&self, hypothesis: &[&CandidateRule]) -> Result<Vec<bool>, LearnError> {
        let per_group = self
            .groups
            .iter()
            .map(|g| g.accepts(hypothesis, &self.solver))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.member_of.iter().map(|&g| per_group[g]).collect())
    }

    /// Total penalty of rejected examples, or `None` once it exceeds `bound`.
    pub fn penalties(&self, hypothesis: &[&CandidateRule], bound: Option<u64>) -> Result<Option<u64>, LearnError> {
        let mut total = 0u64;
        for g in &self.groups {
            if !g.accepts(hypothesis, &self.solver)? {
                total += g.penalty;
                if bound.is_some_and(|b| total > b) {
                    return Ok(None);
                }
            }
        }
        Ok(Some(total))
    }

    pub fn report(
        &self,
        rules: Vec<CandidateRule>,
        scoring: &ScoringFunction,
        space_size: usize,
        evaluated: usize,
    ) -> Result<LearnReport, LearnError> {
        let refs: Vec<&CandidateRule> = rules.iter().collect();
        let acc = self.acceptance(&refs)?;
        let outcomes: Vec<ExampleOutcome> = self
            .examples
            .iter()
            .zip(acc)
            .map(|(e, accepted)| ExampleOutcome {
                id: e.id.clone(),
                accepted,
                penalty_paid: if accepted { 0 } else { u64::from(e.penalty) },
            })
            .collect();
        let rule_cost: u64 = rules.iter().map(|r| u64::from(rule_cost(r, scoring))).sum();
        let penalty_cost = outcomes.iter().map(|o| o.penalty_paid).sum();
        let mut rules = rules;
        rules.sort_by(|a, b| a.text.cmp(&b.text));
        Ok(LearnReport {
            fully_covering: outcomes.iter().all(|o| o.accepted),
            hypothesis: Hypothesis {
                rules,
                cost: rule_cost + penalty_cost,
            },
            rule_cost,
            penalty_cost,
            outcomes,
            space_size,
            evaluated,
        })
    }
}

/// Whether B ∪ H ∪ context accepts the example.
pub fn accepts(
    background: &Program,
    hypothesis: &[CandidateRule],
    example: &Example,
    constants: &TypedConstants,
    solver: &SolverConfig,
) -> Result<bool, LearnError> {
    let ex = std::slice::from_ref(example);
    let ev = Evaluator::with_constants(background, ex, constants, *solver)?;
    let refs: Vec<&CandidateRule> = hypothesis.iter().collect();
    ev.groups[0].solve(&refs, solver)
}

/// Rule costs plus penalties of rejected examples.
pub fn score(
    task: &LasTask,
    hypothesis: &[CandidateRule],
    scoring: &ScoringFunction,
    solver: &SolverConfig,
) -> Result<u64, LearnError> {
    let ev = Evaluator::new(task, *solver)?;
    let refs: Vec<&CandidateRule> = hypothesis.iter().collect();
    let pen = ev.penalties(&refs, None)?.expect("unbounded");
    let rules: u64 = hypothesis.iter().map(|r| u64::from(rule_cost(r, scoring))).sum();
    Ok(rules + pen)
}

fn compare(a: &Hypothesis, b: &Hypothesis) -> Ordering {
    a.key().cmp(&b.key())
}

struct Search<'a, 't> {
    ev: &'a Evaluator<'t>,
    order: Vec<(u64, &'a CandidateRule)>,
    max_rules: usize,
    best: Hypothesis,
    execution: Execution,
    evaluated: usize,
}

impl<'a> Search<'a, '_> {
    fn consider(&mut self, rules: &[&CandidateRule], rule_cost: u64, penalties: Option<u64>) {
        let Some(p) = penalties else { return };
        let mut sorted: Vec<CandidateRule> = rules.iter().map(|&r| r.clone()).collect();
        sorted.sort_by(|a, b| a.text.cmp(&b.text));
        let cand = Hypothesis {
            rules: sorted,
            cost: rule_cost + p,
        };
        if compare(&cand, &self.best) == Ordering::Less {
            self.best = cand;
        }
    }

    /// Extends `chosen` (indices into `order`, increasing) by one rule at a time.
    fn expand(&mut self, chosen: &mut Vec<usize>, cost: u64) -> Result<(), LearnError> {
        let start = chosen.last().map_or(0, |&i| i + 1);
        let mut next = start;
        let mut children = Vec::new();
        while next < self.order.len() {
            let end = (next + CHUNK).min(self.order.len());
            // costs are nondecreasing, so the first over-budget rule ends the level
            let batch: Vec<usize> = (next..end)
                .take_while(|&j| cost + self.order[j].0 <= self.best.cost)
                .collect();
            let cut = batch.len() < end - next;
            let bound = self.best.cost;
            let base: Vec<&CandidateRule> = chosen.iter().map(|&i| self.order[i].1).collect();
            let ev = self.ev;
            let order = &self.order;
            let results = par::map(self.execution, &batch, |&j| {
                let mut rules = base.clone();
                rules.push(order[j].1);
                let c = cost + order[j].0;
                ev.penalties(&rules, Some(bound - c))
            });
            for (&j, res) in batch.iter().zip(results) {
                self.evaluated += 1;
                let mut rules = base.clone();
                rules.push(self.order[j].1);
                self.consider(&rules, cost + self.order[j].0, res?);
                children.push(j);
            }
            if cut {
                break;
            }
            next = end;
        }
        if chosen.len() + 1 < self.max_rules {
            for j in children {
                let c = cost + self.order[j].0;
                if c > self.best.cost {
                    break;
                }
                chosen.push(j);
                self.expand(chosen, c)?;
                chosen.pop();
            }
        }
        Ok(())
    }
}

/// Cost-minimal hypothesis within `space`, found by branch and bound over
/// rule subsets in nondecreasing cost order.
pub fn learn_in_space(
    task: &LasTask,
    space: &HypothesisSpace,
    scoring: &ScoringFunction,
    config: &LearnConfig,
) -> Result<LearnReport, LearnError> {
    if task.examples.is_empty() {
        return Err(LearnError::NoExamples);
    }
    if space.is_empty() {
        return Err(LearnError::EmptySpace);
    }
    let max_rules = config.max_rules.unwrap_or(space.bounds.max_rules);
    let ev = Evaluator::new(task, config.solver)?;
    let mut order: Vec<(u64, &CandidateRule)> = space
        .rules
        .iter()
        .map(|r| (u64::from(rule_cost(r, scoring)), r))
        .collect();
    order.sort_by_key(|&(c, _)| c);
    let empty = ev.penalties(&[], None)?.expect("unbounded");
    let mut search = Search {
        ev: &ev,
        order,
        max_rules,
        best: Hypothesis {
            rules: Vec::new(),
            cost: empty,
        },
        execution: config.execution,
        evaluated: 1,
    };
    if max_rules > 0 {
        search.expand(&mut Vec::new(), 0)?;
    }
    let best = search.best.rules.clone();
    ev.report(best, scoring, space.len(), search.evaluated)
}

/// Enumerates the task's space and learns within it.
pub fn learn(task: &LasTask, scoring: &ScoringFunction, config: &LearnConfig) -> Result<LearnReport, LearnError> {
    let space = enumerate_space(&task.bias, config.space_cap.unwrap_or(DEFAULT_SPACE_CAP))?;
    learn_in_space(task, &space, scoring, config)
}

/// Reference optimum: scores every subset of at most `max_rules` rules in
/// full, without bounding.
pub fn exhaustive_optimum(
    task: &LasTask,
    space: &HypothesisSpace,
    scoring: &ScoringFunction,
    max_rules: usize,
    solver: &SolverConfig,
) -> Result<Hypothesis, LearnError> {
    let ev = Evaluator::new(task, *solver)?;
    let mut best: Option<Hypothesis> = None;
    let n = space.rules.len();
    let mut stack: Vec<usize> = Vec::new();
    loop {
        let rules: Vec<&CandidateRule> = stack.iter().map(|&i| &space.rules[i]).collect();
        let rc: u64 = rules.iter().map(|r| u64::from(rule_cost(r, scoring))).sum();
        let pen = ev.penalties(&rules, None)?.expect("unbounded");
        let mut sorted: Vec<CandidateRule> = rules.into_iter().cloned().collect();
        sorted.sort_by(|a, b| a.text.cmp(&b.text));
        let cand = Hypothesis {
            rules: sorted,
            cost: rc + pen,
        };
        if best.as_ref().is_none_or(|b| compare(&cand, b) == Ordering::Less) {
            best = Some(cand);
        }
        // next subset in lexicographic index order
        let last = stack.last().copied();
        if stack.len() < max_rules && last.map_or(0, |l| l + 1) < n {
            stack.push(last.map_or(0, |l| l + 1));
            continue;
        }
        loop {
            match stack.pop() {
                None => return Ok(best.expect("empty subset scored")),
                Some(i) if i + 1 < n => {
                    stack.push(i + 1);
                    break;
                }
                Some(_) => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_program, parse_task};
    use crate::task::Bounds;

    fn rules(text: &str) -> Vec<CandidateRule> {
        parse_program(text)
            .unwrap()
            .rules
            .into_iter()
            .map(CandidateRule::untyped)
            .collect()
    }

    fn example(text: &str) -> Example {
        parse_task(text).unwrap().examples.remove(0)
    }

    fn accept(b: &str, h: &str, e: &str) -> bool {
        accepts(
            &parse_program(b).unwrap(),
            &rules(h),
            &example(e),
            &TypedConstants::new(),
            &SolverConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn extends_cases() {
        let a = Atom::prop("a");
        let b = Atom::prop("b");
        let c = Atom::prop("c");
        let pi = PartialInterpretation {
            inclusions: vec![a.clone()],
            exclusions: vec![c.clone()],
        };
        assert!(extends([&a, &b], &pi));
        assert!(!extends([&a, &c], &pi));
        assert!(extends([], &PartialInterpretation::default()));
    }

    #[test]
    fn acceptance_cases() {
        assert!(accept("", "a.", "#pos(e@1, {a}, {})."));
        assert!(!accept("", "a.", "#neg(e@1, {a}, {})."));
        assert!(accept("b :- ctx.", "a :- b.", "#pos(e@1, {a}, {}, {ctx.})."));
        assert!(!accept("b :- ctx.", "a :- b.", "#pos(e@1, {a}, {})."));
    }

    #[test]
    fn inclusion_outside_base_is_never_extended() {
        assert!(!accept("", "", "#pos(e@1, {zzz}, {})."));
        assert!(accept("", "", "#neg(e@1, {zzz}, {})."));
    }

    #[test]
    fn surcharges() {
        let r = &rules("h.")[0];
        assert_eq!(rule_cost(r, &default_scoring()), 1);
        assert_eq!(rule_cost(r, &multi_timestamp_scoring(5)), 6);
        let r = &rules("h :- b1, b2.")[0];
        assert_eq!(rule_cost(r, &default_scoring()), 3);
    }

    #[test]
    fn timestamp_surcharge_counts_distinct_times() {
        let t = parse_task(
            "#modeh(rain(var(time))). #modeb(humid(var(time)), (positive)). #modeb(pressure(var(time)), (positive)).
             #constant(time, 1). #constant(time, 2). #maxb(2). #maxv(2).",
        )
        .unwrap();
        let space = enumerate_space(&t.bias, 1000).unwrap();
        let s = multi_timestamp_scoring(5);
        let one = space
            .rules
            .iter()
            .find(|r| r.text == "rain(V1) :- humid(V1), pressure(V1).")
            .unwrap();
        assert_eq!(s.surcharge(one), 5);
        let two = space
            .rules
            .iter()
            .find(|r| r.text == "rain(V1) :- humid(V1), pressure(V2).")
            .unwrap();
        assert_eq!(s.surcharge(two), 0);
    }

    #[test]
    fn score_decomposition_examples() {
        let t = parse_task("#pos(e@5, {a}, {}).").unwrap();
        let cfg = SolverConfig::default();
        assert_eq!(score(&t, &[], &default_scoring(), &cfg).unwrap(), 5);
        let h = rules("a.");
        assert_eq!(score(&t, &h, &default_scoring(), &cfg).unwrap(), 1);
        assert_eq!(score(&t, &h, &multi_timestamp_scoring(5), &cfg).unwrap(), 6);
    }

    fn learn_with(task: &str, space: &str) -> LearnReport {
        let t = parse_task(task).unwrap();
        let space = HypothesisSpace::from_rules(parse_program(space).unwrap().rules, Bounds::default());
        learn_in_space(&t, &space, &default_scoring(), &LearnConfig::default()).unwrap()
    }

    #[test]
    fn prefers_cheaper_rule() {
        let r = learn_with("b. #pos(e@10, {h}, {}).", "h. h :- b.");
        assert_eq!(r.hypothesis.to_string(), "h.\n");
        assert_eq!(r.hypothesis.cost, 1);
        assert!(r.fully_covering);
    }

    #[test]
    fn noise_leaves_examples_uncovered() {
        let r = learn_with("#pos(e1@1, {x}, {}). #pos(e2@1, {y}, {}).", "h :- b. g :- b.");
        assert!(r.hypothesis.rules.is_empty());
        assert_eq!(r.hypothesis.cost, 2);
        assert!(!r.fully_covering);
        assert_eq!(r.outcomes.iter().map(|o| o.penalty_paid).sum::<u64>(), 2);
    }

    #[test]
    fn ties_prefer_fewer_rules_then_text() {
        // {h.} and {g., h.} both cost 2
        let r = learn_with("#pos(e1@2, {h}, {}). #pos(e2@1, {g}, {}).", "h. g.");
        assert_eq!(r.hypothesis.cost, 2);
        assert_eq!(r.hypothesis.to_string(), "h.\n");
        let r = learn_with("b. c. #pos(e@5, {h}, {}).", "h :- c. h :- b.");
        assert_eq!(r.hypothesis.to_string(), "h :- b.\n");
    }

    #[test]
    fn branch_and_bound_matches_exhaustive() {
        let t = parse_task(
            "p :- not q. #pos(e1@3, {h}, {g}). #pos(e2@2, {g}, {}, {r.}). #neg(e3@4, {h, g}, {}).",
        )
        .unwrap();
        let space =
            HypothesisSpace::from_rules(parse_program("h. g :- r. h :- p. g. h :- not r. q :- h.").unwrap().rules, Bounds::default());
        let ex = exhaustive_optimum(&t, &space, &default_scoring(), 3, &SolverConfig::default()).unwrap();
        let bb = learn_in_space(&t, &space, &default_scoring(), &LearnConfig::default()).unwrap();
        assert_eq!(bb.hypothesis, ex);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let t = parse_task("b. #pos(e1@3, {h}, {}). #neg(e2@2, {g}, {}, {c.}). #pos(e3@1, {g}, {}).").unwrap();
        let space = HypothesisSpace::from_rules(
            parse_program("h. g. h :- b. g :- c. g :- not c. h :- not c.").unwrap().rules,
            Bounds::default(),
        );
        let mut cfg = LearnConfig::default();
        let a = learn_in_space(&t, &space, &default_scoring(), &cfg).unwrap();
        cfg.execution = Execution::Sequential;
        let b = learn_in_space(&t, &space, &default_scoring(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_examples_share_evaluation() {
        let t = parse_task("#pos(a@1, {h}, {}, {x.}). #pos(b@2, {h}, {}, {x.}). #pos(c@1, {h}, {}).").unwrap();
        let ev = Evaluator::new(&t, SolverConfig::default()).unwrap();
        assert_eq!(ev.distinct_examples(), 2);
        assert_eq!(ev.penalties(&[], None).unwrap(), Some(4));
    }

    #[test]
    fn no_examples_is_an_error() {
        let t = parse_task("#modeh(h).").unwrap();
        assert!(matches!(
            learn(&t, &default_scoring(), &LearnConfig::default()),
            Err(LearnError::NoExamples)
        ));
    }
}
