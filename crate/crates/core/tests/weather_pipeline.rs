use las_core::learn::{learn, multi_timestamp_scoring, LearnConfig};
use las_core::par::Execution;
use las_core::parse::{parse_program, parse_task};
use las_core::space::canonical_form;
use las_core::syntax::{Head, Program, Term};
use las_core::weather::{
    build_task, crossval, day_blocks, discretize, fold_train_blocks, ingest, predict, synthesize, CrossvalConfig,
    DiscretizationSpec, SyntheticConfig, TaskTemplate, WindowSpec, WindowedTask,
};
use proptest::prelude::*;

const SPEC: &str = r#"
[columns.rain]
thresholds = [0.1, 5.0]
levels = ["none", "low", "high"]
min = 0.0
default = "none"

[columns.humidity]
thresholds = [40.0, 80.0]
levels = ["low", "mid", "high"]
min = 0.0
max = 100.0

[columns.pressure]
thresholds = [1000.0, 1020.0]
levels = ["low", "normal", "high"]
min = 950.0
max = 1060.0
"#;

const CONJUNCTION: &str = "level(rain,high,T2) :- next(T1,T2), level(humidity,high,T1), level(pressure,low,T1).";
const SINGLE: &str = "level(rain,high,T2) :- next(T1,T2), level(humidity,high,T1).";

fn windowed(planted: &str, rows: usize, noise: f64, seed: u64, history: usize) -> WindowedTask {
    let spec = DiscretizationSpec::from_toml(SPEC).unwrap();
    let cfg = SyntheticConfig {
        rows,
        noise,
        seed,
        target: "rain".into(),
    };
    let series = synthesize(&spec, &parse_program(planted).unwrap(), &cfg).unwrap();
    // go through the CSV text form, as the CLI does
    let table = discretize(&ingest(&series.to_csv()).unwrap(), &spec).unwrap();
    let template = TaskTemplate {
        penalty: 3,
        ..TaskTemplate::default()
    };
    build_task(
        &table,
        &WindowSpec {
            history,
            target: "rain".into(),
        },
        &template,
    )
    .unwrap()
}

fn cv_config() -> CrossvalConfig {
    CrossvalConfig {
        folds: 5,
        train_days: 2,
        day_length: 24,
        ..CrossvalConfig::new(multi_timestamp_scoring(5))
    }
}

#[test]
fn noiseless_series_yields_the_planted_rule() {
    let wt = windowed(CONJUNCTION, 150, 0.0, 4, 1);
    let report = learn(&wt.task, &multi_timestamp_scoring(5), &LearnConfig::default()).unwrap();
    let got: Vec<String> = report.hypothesis.rules.iter().map(|r| canonical_form(&r.rule)).collect();
    let want = canonical_form(&parse_program(CONJUNCTION).unwrap().rules[0]);
    assert_eq!(got, vec![want]);
    assert!(report.fully_covering);
}

#[test]
fn generated_task_text_parses_back() {
    let wt = windowed(CONJUNCTION, 30, 0.1, 2, 2);
    assert_eq!(parse_task(&wt.task.to_string()).unwrap(), wt.task);
}

#[test]
fn pipeline_is_deterministic() {
    let a = windowed(CONJUNCTION, 120, 0.1, 11, 1);
    let b = windowed(CONJUNCTION, 120, 0.1, 11, 1);
    assert_eq!(a, b);
    let ra = crossval(&a, &cv_config()).unwrap();
    let rb = crossval(&b, &cv_config()).unwrap();
    assert_eq!(ra, rb);
    let seq = crossval(
        &a,
        &CrossvalConfig {
            learn: LearnConfig {
                execution: Execution::Sequential,
                ..LearnConfig::default()
            },
            ..cv_config()
        },
    )
    .unwrap();
    assert_eq!(ra, seq);
}

#[test]
fn noiseless_crossval_is_perfect() {
    let wt = windowed(CONJUNCTION, 120, 0.0, 5, 1);
    let r = crossval(&wt, &cv_config()).unwrap();
    assert_eq!(r.mean_learner, 1.0, "{}", r.table());
}

#[test]
fn single_condition_rule_is_matched_by_the_stump() {
    let wt = windowed(SINGLE, 120, 0.0, 6, 1);
    let r = crossval(&wt, &cv_config()).unwrap();
    assert_eq!(r.mean_learner, 1.0);
    assert_eq!(r.mean_stump, r.mean_learner, "{}", r.table());
}

#[test]
fn conjunction_beats_the_stump() {
    let wt = windowed(CONJUNCTION, 120, 0.0, 8, 1);
    let r = crossval(&wt, &cv_config()).unwrap();
    assert!(r.mean_learner > r.mean_stump, "{}", r.table());
}

#[test]
fn constant_target_is_trivial_for_both() {
    let wt = windowed("", 120, 0.0, 3, 1);
    assert!(wt.observed.iter().all(|&l| l == 0));
    let r = crossval(&wt, &cv_config()).unwrap();
    assert_eq!((r.mean_learner, r.mean_stump), (1.0, 1.0));
}

#[test]
fn empty_hypothesis_without_default_predicts_the_majority() {
    let spec = DiscretizationSpec::from_toml(&SPEC.replace("default = \"none\"\n", "")).unwrap();
    let series = synthesize(&spec, &Program::default(), &SyntheticConfig { rows: 40, noise: 0.3, seed: 1, ..Default::default() })
        .unwrap();
    let wt = build_task(&discretize(&series, &spec).unwrap(), &WindowSpec::default(), &TaskTemplate::default()).unwrap();
    assert_eq!(wt.default_level, None);
    let mut counts = [0usize; 3];
    for &o in &wt.observed {
        counts[o] += 1;
    }
    let majority = (0..3).max_by_key(|&l| (counts[l], std::cmp::Reverse(l))).unwrap();
    let correct = (0..wt.observed.len())
        .filter(|&e| {
            let p = predict(&wt, &[], e, majority, &Default::default()).unwrap();
            assert_eq!(p, majority);
            p == wt.observed[e]
        })
        .count();
    assert_eq!(correct, counts[majority]);
}

#[test]
fn too_few_blocks_is_an_error() {
    let wt = windowed(CONJUNCTION, 9 * 24, 0.0, 1, 1);
    let cfg = CrossvalConfig::new(multi_timestamp_scoring(5));
    assert!(crossval(&wt, &cfg).unwrap_err().to_string().contains("9 day-blocks"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn windows_have_the_documented_shape(rows in 3usize..40, history in 1usize..4, seed in any::<u64>()) {
        prop_assume!(rows > history);
        let wt = windowed(CONJUNCTION, rows, 0.2, seed, history);
        prop_assert_eq!(wt.task.examples.len(), rows - history);
        let horizon = Term::Int(history as i32 + 1);
        for e in &wt.task.examples {
            for r in &e.context.rules {
                let Head::Atom(a) = &r.head else { panic!("context fact expected") };
                let Term::Int(t) = a.args[2] else { panic!("integer timestamp expected") };
                prop_assert!((1..=history as i32).contains(&t));
            }
            for a in e.pi.inclusions.iter().chain(&e.pi.exclusions) {
                prop_assert_eq!(&a.args[2], &horizon);
            }
            prop_assert_eq!(e.pi.inclusions.len(), 1);
            let mut levels: Vec<String> =
                e.pi.inclusions.iter().chain(&e.pi.exclusions).map(|a| a.args[1].to_string()).collect();
            levels.sort();
            prop_assert_eq!(levels, vec!["high", "low", "none"]);
        }
    }

    #[test]
    fn folds_partition_the_blocks(blocks in 2usize..40, folds in 1usize..12, train in 1usize..6) {
        prop_assume!(folds <= blocks && train < blocks);
        for f in 0..folds {
            let mut t = fold_train_blocks(f, folds, blocks, train);
            prop_assert!(t.iter().all(|&b| b < blocks));
            t.sort();
            t.dedup();
            prop_assert_eq!(t.len(), train);
        }
    }

    #[test]
    fn every_example_lies_in_one_block(rows in 48usize..120) {
        let wt = windowed(CONJUNCTION, rows, 0.0, 1, 1);
        let (blocks, of) = day_blocks(&wt, 24);
        prop_assert_eq!(blocks, rows / 24);
        prop_assert_eq!(of.len(), wt.task.examples.len());
        prop_assert!(of.iter().all(|&b| b < blocks));
    }
}
