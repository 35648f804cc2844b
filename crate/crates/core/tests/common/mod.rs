//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use las_core::ground::{ground, herbrand_universe, GroundProgram};
use las_core::learn::extends;
use las_core::solve::{is_stable, Interpretation};
use las_core::space::HypothesisSpace;
use las_core::syntax::{Atom, ChoiceHead, Head, Literal, Program, Rule};
use las_core::task::{Bounds, Example, LasTask, PartialInterpretation, Polarity, TypedConstants};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn prop_atom(i: usize) -> Atom {
    Atom::prop(&format!("p{i}"))
}

/// A ground normal program over at most `max_atoms` atoms with at most
/// `max_rules` rules; each body literal is negated with probability
/// `naf_density`, and one rule in ten is a constraint.
pub fn random_normal_program(rng: &mut impl Rng, max_atoms: usize, max_rules: usize, naf_density: f64) -> Program {
    let n = rng.gen_range(1..=max_atoms);
    let rules = rng.gen_range(1..=max_rules);
    let mut out = Vec::with_capacity(rules);
    for _ in 0..rules {
        let len = rng.gen_range(0..=3);
        let body: Vec<Literal> = (0..len)
            .map(|_| {
                let a = prop_atom(rng.gen_range(0..n));
                if rng.gen_bool(naf_density) {
                    Literal::Naf(a)
                } else {
                    Literal::Pos(a)
                }
            })
            .collect();
        if !body.is_empty() && rng.gen_bool(0.1) {
            out.push(Rule::constraint(body));
        } else {
            out.push(Rule::normal(prop_atom(rng.gen_range(0..n)), body));
        }
    }
    Program::new(out)
}

/// Like [`random_normal_program`], plus at most one choice rule.
pub fn random_program_with_choice(rng: &mut impl Rng, max_atoms: usize, max_rules: usize) -> Program {
    let mut p = random_normal_program(rng, max_atoms, max_rules, 0.4);
    if rng.gen_bool(0.5) {
        let mut pool: Vec<usize> = (0..max_atoms).collect();
        pool.shuffle(rng);
        let k = rng.gen_range(1..=3.min(max_atoms));
        let atoms: Vec<Atom> = pool[..k].iter().map(|&i| prop_atom(i)).collect();
        let lower = rng.gen_range(0..=k as u32);
        let upper = rng.gen_range(lower..=k as u32);
        let body = if rng.gen_bool(0.5) {
            vec![Literal::Pos(prop_atom(rng.gen_range(0..max_atoms)))]
        } else {
            Vec::new()
        };
        p.rules.push(Rule {
            head: Head::Choice(ChoiceHead { lower, upper, atoms }),
            body,
        });
    }
    p
}

pub fn ground_plain(p: &Program) -> GroundProgram {
    ground(p, &herbrand_universe(p, &TypedConstants::new())).expect("groundable")
}

/// Every subset of the program's atoms that is stable, in id order.
pub fn brute_force(g: &GroundProgram) -> Vec<Interpretation> {
    let n = g.atoms.len();
    assert!(n <= 16, "brute force over {n} atoms");
    let mut out: Vec<Interpretation> = (0u32..1 << n)
        .map(|mask| Interpretation::from_ids((0..n as u32).filter(|i| mask >> i & 1 == 1)))
        .filter(|s| is_stable(g, s))
        .collect();
    out.sort();
    out
}

/// Sorted atom texts of each model, sorted.
pub fn model_texts(g: &GroundProgram, models: &[Interpretation]) -> Vec<String> {
    let mut v: Vec<String> = models.iter().map(|m| m.display(&g.atoms)).collect();
    v.sort();
    v
}

fn random_body(rng: &mut impl Rng, atoms: &[&str], max_len: usize) -> Vec<Literal> {
    let len = rng.gen_range(0..=max_len);
    let mut body: Vec<Literal> = Vec::new();
    for _ in 0..len {
        let a = Atom::prop(atoms.choose(rng).expect("atoms"));
        let l = if rng.gen_bool(0.3) { Literal::Naf(a) } else { Literal::Pos(a) };
        if !body.contains(&l) {
            body.push(l);
        }
    }
    body
}

/// A random propositional noisy task and an explicit space of at most
/// `max_space` rules.
pub fn random_task(rng: &mut impl Rng, max_space: usize, max_examples: usize) -> (LasTask, HypothesisSpace) {
    let heads = ["h", "g", "k"];
    let body_atoms = ["a", "b", "c", "h", "g"];
    let ctx_atoms = ["a", "b", "c"];
    let mut background = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let head = Atom::prop(["g", "c"].choose(rng).expect("atoms"));
        background.push(Rule::normal(head, random_body(rng, &body_atoms, 2)));
    }
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=max_space) {
        let head = Atom::prop(heads.choose(rng).expect("atoms"));
        rules.push(Rule::normal(head, random_body(rng, &body_atoms, 2)));
    }
    let space = HypothesisSpace::from_rules(
        rules,
        Bounds {
            max_body: 2,
            max_vars: 0,
            max_rules: 3,
        },
    );
    let all: Vec<&str> = ["a", "b", "c", "h", "g", "k"].to_vec();
    let mut examples = Vec::new();
    for i in 0..rng.gen_range(1..=max_examples) {
        let mut pi = PartialInterpretation::default();
        for a in &all {
            match rng.gen_range(0..6) {
                0 => pi.inclusions.push(Atom::prop(a)),
                1 => pi.exclusions.push(Atom::prop(a)),
                _ => {}
            }
        }
        let context = Program::new(
            ctx_atoms
                .iter()
                .filter(|_| rng.gen_bool(0.4))
                .map(|a| Rule::fact(Atom::prop(a)))
                .collect(),
        );
        examples.push(Example {
            id: las_core::syntax::sym(&format!("e{i}")),
            penalty: rng.gen_range(1..=10),
            pi,
            context,
            polarity: if rng.gen_bool(0.75) {
                Polarity::Positive
            } else {
                Polarity::Negative
            },
        });
    }
    let task = LasTask {
        background: Program::new(background),
        bias: Default::default(),
        examples,
    };
    (task, space)
}

/// Acceptance by naive grounding and brute-force stable models.
pub fn oracle_accepts(background: &Program, hypothesis: &[Rule], example: &Example) -> bool {
    let mut p = background.clone();
    p.rules.extend(hypothesis.iter().cloned());
    p.extend(&example.context);
    let g = ground_plain(&p);
    let models = brute_force(&g);
    let any = models.iter().any(|m| extends(m.atoms(&g.atoms), &example.pi));
    match example.polarity {
        Polarity::Positive => any,
        Polarity::Negative => !any,
    }
}

/// Rule cost plus paid penalties under the default scoring.
pub fn oracle_cost(task: &LasTask, hypothesis: &[Rule]) -> u64 {
    let rules: u64 = hypothesis.iter().map(|r| 1 + r.body.len() as u64).sum();
    let penalties: u64 = task
        .examples
        .iter()
        .filter(|e| !oracle_accepts(&task.background, hypothesis, e))
        .map(|e| u64::from(e.penalty))
        .sum();
    rules + penalties
}

/// Minimum cost over every subset of at most `max_rules` space rules.
pub fn oracle_optimum(task: &LasTask, space: &HypothesisSpace, max_rules: usize) -> u64 {
    let rules: Vec<Rule> = space.rules.iter().map(|c| c.rule.clone()).collect();
    let n = rules.len();
    let mut best = u64::MAX;
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize > max_rules {
            continue;
        }
        let h: Vec<Rule> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| rules[i].clone()).collect();
        best = best.min(oracle_cost(task, &h));
    }
    best
}

/// Predicates of the rich generator with their fixed arities.
const PREDICATES: [(&str, usize); 4] = [("p", 1), ("q", 2), ("r", 0), ("edge", 2)];

fn random_ground_term(rng: &mut impl Rng) -> las_core::syntax::Term {
    use las_core::syntax::Term;
    if rng.gen_bool(0.5) {
        Term::Int(rng.gen_range(-20..100))
    } else {
        Term::constant(["a", "b", "c", "node1"].choose(rng).expect("constants"))
    }
}

fn random_atom_over(rng: &mut impl Rng, vars: &[&str]) -> Atom {
    use las_core::syntax::Term;
    let (pred, arity) = *PREDICATES.choose(rng).expect("predicates");
    let args = (0..arity)
        .map(|_| {
            if !vars.is_empty() && rng.gen_bool(0.6) {
                Term::var(vars.choose(rng).expect("vars"))
            } else {
                random_ground_term(rng)
            }
        })
        .collect();
    Atom::new(pred, args)
}

/// A safe rule mixing facts, normal rules, constraints, choice rules,
/// negation and comparisons.
pub fn random_rich_rule(rng: &mut impl Rng) -> Rule {
    use las_core::syntax::{Comparator, Term};
    let free = ["X", "Y", "Z", "Node"];
    if rng.gen_bool(0.2) {
        return Rule::fact(random_atom_over(rng, &[]));
    }
    let mut body: Vec<Literal> = (0..rng.gen_range(1..=3))
        .map(|_| Literal::Pos(random_atom_over(rng, &free)))
        .collect();
    let mut bound: Vec<&str> = Vec::new();
    for l in &body {
        for v in l.variables() {
            let name = free.iter().find(|f| **f == v.as_ref()).expect("known variable");
            if !bound.contains(name) {
                bound.push(name);
            }
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        body.push(Literal::Naf(random_atom_over(rng, &bound)));
    }
    if !bound.is_empty() && rng.gen_bool(0.3) {
        let ops = [
            Comparator::Lt,
            Comparator::Le,
            Comparator::Eq,
            Comparator::Ne,
            Comparator::Gt,
            Comparator::Ge,
        ];
        let lhs = Term::var(bound.choose(rng).expect("bound"));
        let rhs = if rng.gen_bool(0.5) {
            Term::var(bound.choose(rng).expect("bound"))
        } else {
            Term::Int(rng.gen_range(-5..10))
        };
        body.push(Literal::Cmp(lhs, *ops.choose(rng).expect("ops"), rhs));
    }
    let head = match rng.gen_range(0..10) {
        0 => Head::None,
        1 => {
            let k = rng.gen_range(1..=3);
            let atoms: Vec<Atom> = (0..k).map(|_| random_atom_over(rng, &bound)).collect();
            let lower = rng.gen_range(0..=k as u32);
            let upper = rng.gen_range(lower..=k as u32);
            Head::Choice(ChoiceHead { lower, upper, atoms })
        }
        _ => Head::Atom(random_atom_over(rng, &bound)),
    };
    Rule { head, body }
}

pub fn random_rich_program(rng: &mut impl Rng, max_rules: usize) -> Program {
    Program::new((0..rng.gen_range(1..=max_rules)).map(|_| random_rich_rule(rng)).collect())
}
