mod common;

use common::{random_rich_program, random_task};
use las_core::ground::{ground, herbrand_universe};
use las_core::parse::{parse_program, parse_task};
use las_core::syntax::{Literal, Program};
use las_core::task::TypedConstants;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn programs_round_trip(seed in any::<u64>()) {
        let p = random_rich_program(&mut ChaCha8Rng::seed_from_u64(seed), 10);
        let text = p.to_string();
        let back = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn tasks_round_trip(seed in any::<u64>()) {
        let (task, _) = random_task(&mut ChaCha8Rng::seed_from_u64(seed), 6, 6);
        let text = task.to_string();
        let back = parse_task(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, task);
    }

    #[test]
    fn ground_programs_reparse_to_the_same_ground_program(seed in any::<u64>()) {
        let p = random_rich_program(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        let u = herbrand_universe(&p, &TypedConstants::new());
        prop_assume!(!u.constants.is_empty());
        let g = ground(&p, &u).unwrap();
        let text = g.to_string();
        let again = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let g2 = ground(&again, &herbrand_universe(&again, &TypedConstants::new())).unwrap();
        prop_assert_eq!(g2.to_string(), text);
    }

    /// Each rule with k variables over a universe of m constants has exactly
    /// the substitutions whose comparisons hold.
    #[test]
    fn instantiation_is_complete(seed in any::<u64>()) {
        let p = random_rich_program(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        let u = herbrand_universe(&p, &TypedConstants::new());
        let m = u.constants.len();
        prop_assume!(m > 0);
        prop_assume!(p.rules.iter().all(|r| m.pow(r.variables().len() as u32) <= 10_000));
        let g = ground(&p, &u).unwrap();
        let mut expected = 0usize;
        for r in &p.rules {
            let vars = r.variables();
            let k = vars.len() as u32;
            let cmps: Vec<&Literal> = r.body.iter().filter(|l| matches!(l, Literal::Cmp(..))).collect();
            // count substitutions by brute force
            let mut count = 0;
            for code in 0..m.pow(k) {
                let val = |v: &las_core::syntax::Term| match v {
                    las_core::syntax::Term::Var(s) => {
                        let i = vars.iter().position(|x| x == s).unwrap();
                        u.constants[(code / m.pow(i as u32)) % m].clone()
                    }
                    t => t.clone(),
                };
                let ok = cmps.iter().all(|l| match l {
                    Literal::Cmp(x, op, y) => match (val(x), val(y)) {
                        (las_core::syntax::Term::Int(a), las_core::syntax::Term::Int(b)) => op.eval(a, b),
                        _ => false,
                    },
                    _ => true,
                });
                if ok {
                    count += 1;
                }
            }
            expected += count;
        }
        prop_assert_eq!(g.rules.len(), expected);
    }
}

#[test]
fn variables_without_constants_are_an_error() {
    let p = parse_program("p(X) :- q(X).").unwrap();
    let err = ground(&p, &herbrand_universe(&p, &TypedConstants::new())).unwrap_err();
    assert!(err.to_string().contains("empty"), "{err}");
}

#[test]
fn comments_and_whitespace_do_not_matter() {
    let a = parse_program("% header\np(1).\n\n  q(X) :- p(X), not r. % trailing\n").unwrap();
    let b = parse_program("p(1). q(X):-p(X),not r.").unwrap();
    assert_eq!(a, b);
    assert_eq!(Program::new(a.rules.clone()), b);
}
