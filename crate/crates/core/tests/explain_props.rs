mod common;

use common::{ground_plain, random_normal_program, random_program_with_choice};
use las_core::explain::{explain_absence, explain_atom, explain_atom_with, ExplainOptions, ExplanationDag, NodeKind};
use las_core::ground::GroundProgram;
use las_core::solve::{answer_sets, Interpretation, SolverConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Acyclic, every node reaches the root, and every rule node's positive
/// supports are true and its naf supports false.
fn check_dag(dag: &ExplanationDag, g: &GroundProgram, m: &Interpretation) -> Result<(), String> {
    if dag.topological_order().is_none() {
        return Err("cycle".into());
    }
    let n = dag.nodes.len();
    let mut reaches = vec![false; n];
    reaches[dag.root] = true;
    // edges point towards the root; propagate backwards until stable
    loop {
        let mut changed = false;
        for &(s, t) in &dag.edges {
            if reaches[t] && !reaches[s] {
                reaches[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(i) = reaches.iter().position(|r| !r) {
        return Err(format!("node {i} is not connected to the root"));
    }
    let truth = |a: &las_core::syntax::Atom| g.atoms.get(a).is_some_and(|id| m.contains(id));
    for (i, node) in dag.nodes.iter().enumerate() {
        if !node.is_rule() {
            continue;
        }
        for &(s, t) in &dag.edges {
            if t != i {
                continue;
            }
            match &dag.nodes[s].kind {
                NodeKind::Atom(a) | NodeKind::Fact(a) if !truth(a) => {
                    return Err(format!("rule {} supported by false {a}", node.label()))
                }
                NodeKind::Naf(a) if truth(a) => return Err(format!("rule {} supported by not {a}", node.label())),
                _ => {}
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_true_atom_has_a_well_formed_explanation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_program_with_choice(&mut rng, 8, 12);
        let g = ground_plain(&p);
        for m in answer_sets(&g, None, &SolverConfig::default()).unwrap().models {
            for a in m.atoms(&g.atoms) {
                let dag = explain_atom(&g, &m, a).unwrap();
                prop_assert_eq!(dag.nodes[dag.root].label(), a.to_string());
                check_dag(&dag, &g, &m).map_err(TestCaseError::fail)?;
                let all = explain_atom_with(&g, &m, a, ExplainOptions { all_supports: true }).unwrap();
                prop_assert_eq!(all.edges, dag.edges);
            }
        }
    }

    #[test]
    fn every_false_atom_has_an_absence_explanation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_normal_program(&mut rng, 6, 8, 0.4);
        let g = ground_plain(&p);
        for m in answer_sets(&g, None, &SolverConfig::default()).unwrap().models {
            for (id, a) in g.atoms.iter() {
                if m.contains(id) {
                    prop_assert!(explain_absence(&g, &m, a).is_err());
                    continue;
                }
                let dag = explain_absence(&g, &m, a).unwrap();
                prop_assert!(dag.topological_order().is_some());
                let rules = g.rules.iter().filter(|r| r.head_atoms().contains(&id)).count();
                prop_assert_eq!(dag.nodes.iter().filter(|n| n.is_rule()).count(), rules);
            }
        }
    }
}

#[test]
fn explanations_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = random_program_with_choice(&mut rng, 8, 12);
    let g = ground_plain(&p);
    for m in answer_sets(&g, None, &SolverConfig::default()).unwrap().models {
        for a in m.atoms(&g.atoms) {
            let x = las_core::explain::to_graph_text(&explain_atom(&g, &m, a).unwrap());
            let y = las_core::explain::to_graph_text(&explain_atom(&g, &m, a).unwrap());
            assert_eq!(x, y);
        }
    }
}
