//! Bundled demonstrations.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use las_core::explain::{explain_atom, to_graph_text};
use las_core::learn::{default_scoring, learn, multi_timestamp_scoring, LearnConfig};
use las_core::parse::{parse_program, parse_task};
use las_core::solve::{answer_sets, SolverConfig};
use las_core::space::canonical_form;
use las_core::syntax::{Atom, Program, Term};
use las_core::weather::{
    build_task, crossval, discretize, synthesize, CrossvalConfig, DiscretizationSpec, SyntheticConfig, TaskTemplate,
    WindowSpec,
};

use crate::{ground_program, learn_report_text};

pub const LEGAL_CASE: &str = include_str!("../examples/legal_case.lp");
pub const LEGAL_TASK: &str = include_str!("../examples/legal.task");
pub const LEGAL_CASES: &str = include_str!("../examples/legal_cases.task");
pub const WEATHER_SPEC: &str = include_str!("../examples/weather.toml");
pub const PLANTED_RULE: &str = include_str!("../examples/planted_rule.lp");

const OPEN_NOTION: &str = "0 { violence_on_person } 1 :- snatching.";

fn verdicts(program: &Program, solver: &SolverConfig) -> Result<(Vec<String>, las_core::ground::GroundProgram)> {
    let g = ground_program(program)?;
    let sets = answer_sets(&g, None, solver)?;
    let out = sets
        .models
        .iter()
        .map(|m| {
            let v: Vec<String> = m
                .atoms(&g.atoms)
                .filter(|a| a.predicate.as_ref() == "verdict")
                .map(|a| a.args[0].to_string())
                .collect();
            if v.is_empty() {
                "(none)".to_string()
            } else {
                v.join("+")
            }
        })
        .collect();
    Ok((out, g))
}

/// Vague statute, learning from precedents, and classification of new cases.
pub fn legal(solver: SolverConfig) -> Result<String> {
    let mut out = String::new();
    let case = parse_program(LEGAL_CASE)?;
    let g = ground_program(&case)?;
    let sets = answer_sets(&g, None, &solver)?;
    let _ = writeln!(out, "== vague case: {} answer sets", sets.models.len());
    for m in &sets.models {
        let _ = writeln!(out, "  {}", m.display(&g.atoms));
    }

    let task = parse_task(LEGAL_TASK)?;
    let report = learn(&task, &default_scoring(), &LearnConfig { solver, ..LearnConfig::default() })?;
    let _ = writeln!(out, "== learned from {} precedents", task.examples.len());
    out.push_str(&learn_report_text(&report));
    if report.hypothesis.rules.is_empty() {
        bail!("no disambiguating rule was learned");
    }

    let open = parse_program(OPEN_NOTION)?;
    let cases = parse_task(LEGAL_CASES)?;
    let _ = writeln!(out, "== test cases (before learning -> after learning)");
    let mut first_after = None;
    for c in &cases.examples {
        let mut before = task.background.clone();
        before.extend(&open);
        before.extend(&c.context);
        let mut after = task.background.clone();
        after.extend(&report.hypothesis.program());
        after.extend(&c.context);
        let (vb, _) = verdicts(&before, &solver)?;
        let (va, ga) = verdicts(&after, &solver)?;
        let _ = writeln!(
            out,
            "  {}: {} outcomes [{}] -> {} outcome{} [{}]",
            c.id,
            vb.len(),
            vb.join(", "),
            va.len(),
            if va.len() == 1 { "" } else { "s" },
            va.join(", ")
        );
        if first_after.is_none() && va.len() == 1 {
            first_after = Some((c.id.to_string(), va[0].clone(), ga));
        }
    }

    if let Some((id, verdict, g)) = first_after {
        let sets = answer_sets(&g, Some(1), &solver)?;
        let target = Atom::new("verdict", vec![Term::constant(&verdict)]);
        let dag = explain_atom(&g, &sets.models[0], &target)?;
        let _ = writeln!(out, "== why verdict({verdict}) in {id}");
        out.push_str(&to_graph_text(&dag));
    }
    Ok(out)
}

/// Planted-rule recovery and cross-validation on seeded synthetic weather.
pub fn weather(seed: u64, learn_cfg: LearnConfig) -> Result<String> {
    let mut out = String::new();
    let spec = DiscretizationSpec::from_toml(WEATHER_SPEC)?;
    let planted = parse_program(PLANTED_RULE)?;
    let synth = SyntheticConfig {
        rows: 240,
        noise: 0.1,
        seed,
        target: "rain".into(),
    };
    let table = discretize(&synthesize(&spec, &planted, &synth)?, &spec)?;
    let wt = build_task(&table, &WindowSpec::default(), &TaskTemplate::default())?;
    let scoring = multi_timestamp_scoring(5);
    let _ = writeln!(
        out,
        "== {} rows, noise {}, seed {seed}, {} examples",
        synth.rows,
        synth.noise,
        wt.task.examples.len()
    );
    let report = learn(&wt.task, &scoring, &learn_cfg)?;
    let _ = writeln!(out, "== learned on all examples");
    let _ = writeln!(
        out,
        "{}% cost {} (rules {}, penalties {}), space {} rules",
        report.hypothesis, report.hypothesis.cost, report.rule_cost, report.penalty_cost, report.space_size
    );
    let want: Vec<String> = planted.rules.iter().map(canonical_form).collect();
    let mut got: Vec<String> = report.hypothesis.rules.iter().map(|r| canonical_form(&r.rule)).collect();
    got.sort();
    let _ = writeln!(
        out,
        "planted rule {}",
        if got == want { "recovered" } else { "not recovered" }
    );
    let cv = crossval(
        &wt,
        &CrossvalConfig {
            learn: learn_cfg,
            ..CrossvalConfig::new(scoring)
        },
    )?;
    let _ = writeln!(out, "== cross-validation against the one-feature baseline");
    out.push_str(&cv.table());
    Ok(out)
}
