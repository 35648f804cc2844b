//! Day-block cross-validation of the learner against a one-feature stump.

use std::fmt::Write as _;

use super::window::WindowedTask;
use super::WeatherError;
use crate::ground::{ground_relevant, herbrand_universe_of, TypedRule};
use crate::learn::{learn_in_space, LearnConfig, ScoringFunction};
use crate::par::{self, Execution};
use crate::solve::answer_sets;
use crate::space::{enumerate_space, CandidateRule, HypothesisSpace, DEFAULT_SPACE_CAP};
use crate::syntax::Head;
use crate::task::LasTask;

#[derive(Clone, Debug)]
pub struct CrossvalConfig {
    pub folds: usize,
    /// Day-blocks used for training in each fold.
    pub train_days: usize,
    /// Timestamps per day-block.
    pub day_length: usize,
    pub scoring: ScoringFunction,
    pub learn: LearnConfig,
}

impl CrossvalConfig {
    pub fn new(scoring: ScoringFunction) -> CrossvalConfig {
        CrossvalConfig {
            folds: 10,
            train_days: 4,
            day_length: 24,
            scoring,
            learn: LearnConfig::default(),
        }
    }
}

/// Predicts the target level from a single history feature: the majority
/// target level seen with each feature level in training.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stump {
    pub column: usize,
    /// Relative timestamp of the feature, `1..=W`.
    pub offset: usize,
    pub mapping: Vec<usize>,
    pub fallback: usize,
    pub description: String,
}

impl Stump {
    pub fn predict(&self, wt: &WindowedTask, example: usize) -> usize {
        let row = wt.target_rows[example] - wt.window.history + self.offset - 1;
        let v = wt.table.columns[self.column].values[row];
        self.mapping.get(v).copied().unwrap_or(self.fallback)
    }
}

fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

fn fit_stump(wt: &WindowedTask, train: &[usize], majority: usize) -> Stump {
    let w = wt.window.history;
    let nt = wt.target_levels.len();
    let mut best: Option<(usize, Stump)> = None;
    for (c, col) in wt.table.columns.iter().enumerate() {
        for offset in 1..=w {
            let mut counts = vec![vec![0usize; nt]; col.levels.len()];
            for &e in train {
                let row = wt.target_rows[e] - w + offset - 1;
                counts[col.values[row]][wt.observed[e]] += 1;
            }
            let mapping: Vec<usize> = counts
                .iter()
                .map(|cs| if cs.iter().all(|&x| x == 0) { majority } else { argmax_first(cs) })
                .collect();
            let correct: usize = counts
                .iter()
                .zip(&mapping)
                .map(|(cs, &m)| cs[m])
                .sum();
            if best.as_ref().is_none_or(|(b, _)| correct > *b) {
                let description = format!("{}@{offset}", col.name);
                best = Some((
                    correct,
                    Stump {
                        column: c,
                        offset,
                        mapping,
                        fallback: majority,
                        description,
                    },
                ));
            }
        }
    }
    best.expect("at least one feature").1
}

/// Predicted target level for one example: the level bravely entailed by
/// background, hypothesis and context. Several entailed levels are resolved
/// in favour of the longest learned rule deriving one of them; none falls
/// back to `majority`.
pub fn predict(
    wt: &WindowedTask,
    hypothesis: &[CandidateRule],
    example: usize,
    majority: usize,
    solver: &crate::solve::SolverConfig,
) -> Result<usize, WeatherError> {
    let task = &wt.task;
    let ex = &task.examples[example];
    let universe = herbrand_universe_of([&task.background, &ex.context], &task.bias.constants);
    let mut typed: Vec<TypedRule> = task
        .background
        .rules
        .iter()
        .chain(&ex.context.rules)
        .map(TypedRule::untyped)
        .collect();
    typed.extend(hypothesis.iter().map(|c| TypedRule {
        rule: &c.rule,
        var_types: Some(&c.var_types),
    }));
    let g = ground_relevant(&typed, &universe)?;
    let sets = answer_sets(&g, None, solver)?;
    let entailed: Vec<usize> = (0..wt.target_levels.len())
        .filter(|&l| {
            g.atoms
                .get(&wt.target_atom(l))
                .is_some_and(|id| sets.models.iter().any(|m| m.contains(id)))
        })
        .collect();
    Ok(match entailed.as_slice() {
        [] => majority,
        [l] => *l,
        many => {
            let specificity = |l: usize| {
                hypothesis
                    .iter()
                    .filter(|c| match &c.rule.head {
                        Head::Atom(a) => a.args.get(1).is_some_and(|t| t.to_string() == wt.target_levels[l]),
                        _ => false,
                    })
                    .map(|c| c.rule.body.len())
                    .max()
                    .unwrap_or(0)
            };
            let mut best = many[0];
            for &l in &many[1..] {
                if specificity(l) > specificity(best) {
                    best = l;
                }
            }
            best
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoldReport {
    pub fold: usize,
    pub train_blocks: Vec<usize>,
    pub train_examples: usize,
    pub validation_examples: usize,
    pub hypothesis: Vec<String>,
    pub learner_accuracy: f64,
    pub stump_accuracy: f64,
    pub stump_feature: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossvalReport {
    pub folds: Vec<FoldReport>,
    pub mean_learner: f64,
    pub mean_stump: f64,
}

impl CrossvalReport {
    /// Fixed-width comparison table, one line per fold.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "fold  train  valid  learner  stump  stump-feature  hypothesis");
        for f in &self.folds {
            let h = if f.hypothesis.is_empty() {
                "(empty)".to_string()
            } else {
                f.hypothesis.join(" ")
            };
            let _ = writeln!(
                out,
                "{:>4}  {:>5}  {:>5}  {:>7.3}  {:>5.3}  {:<13}  {}",
                f.fold, f.train_examples, f.validation_examples, f.learner_accuracy, f.stump_accuracy, f.stump_feature, h
            );
        }
        let _ = writeln!(out, "mean               {:>7.3}  {:>5.3}", self.mean_learner, self.mean_stump);
        out
    }
}

/// Day-block index of every example, from the row of its target.
pub fn day_blocks(wt: &WindowedTask, day_length: usize) -> (usize, Vec<usize>) {
    let blocks = wt.table.rows() / day_length.max(1);
    let of = wt
        .target_rows
        .iter()
        .map(|&r| (r / day_length.max(1)).min(blocks.saturating_sub(1)))
        .collect();
    (blocks, of)
}

/// Training blocks of fold `f`: `train_days` consecutive blocks (cyclic)
/// starting at an evenly spaced offset.
pub fn fold_train_blocks(fold: usize, folds: usize, blocks: usize, train_days: usize) -> Vec<usize> {
    let start = fold * blocks / folds;
    (0..train_days).map(|i| (start + i) % blocks).collect()
}

fn majority(wt: &WindowedTask, examples: &[usize]) -> usize {
    let mut counts = vec![0usize; wt.target_levels.len()];
    for &e in examples {
        counts[wt.observed[e]] += 1;
    }
    argmax_first(&counts)
}

fn run_fold(
    wt: &WindowedTask,
    space: &HypothesisSpace,
    cfg: &CrossvalConfig,
    fold: usize,
    blocks: usize,
    block_of: &[usize],
) -> Result<FoldReport, WeatherError> {
    let train_blocks = fold_train_blocks(fold, cfg.folds, blocks, cfg.train_days);
    let (train, valid): (Vec<usize>, Vec<usize>) =
        (0..wt.task.examples.len()).partition(|&e| train_blocks.contains(&block_of[e]));
    let sub = LasTask {
        background: wt.task.background.clone(),
        bias: wt.task.bias.clone(),
        examples: train.iter().map(|&e| wt.task.examples[e].clone()).collect(),
    };
    let report = learn_in_space(&sub, space, &cfg.scoring, &cfg.learn)?;
    let hyp = &report.hypothesis.rules;
    let maj = majority(wt, &train);
    let stump = fit_stump(wt, &train, maj);
    let mut learner_ok = 0usize;
    let mut stump_ok = 0usize;
    for &e in &valid {
        if predict(wt, hyp, e, maj, &cfg.learn.solver)? == wt.observed[e] {
            learner_ok += 1;
        }
        if stump.predict(wt, e) == wt.observed[e] {
            stump_ok += 1;
        }
    }
    let n = valid.len().max(1) as f64;
    Ok(FoldReport {
        fold,
        train_blocks,
        train_examples: train.len(),
        validation_examples: valid.len(),
        hypothesis: hyp.iter().map(|r| r.text.clone()).collect(),
        learner_accuracy: learner_ok as f64 / n,
        stump_accuracy: stump_ok as f64 / n,
        stump_feature: stump.description,
    })
}

/// Cross-validates over day-blocks: each fold learns from `train_days`
/// blocks and validates on all others, comparing against the stump.
pub fn crossval(wt: &WindowedTask, cfg: &CrossvalConfig) -> Result<CrossvalReport, WeatherError> {
    let (blocks, block_of) = day_blocks(wt, cfg.day_length);
    if cfg.folds == 0 || blocks < cfg.folds {
        return Err(WeatherError::InsufficientBlocks {
            blocks,
            folds: cfg.folds,
        });
    }
    if cfg.train_days == 0 || cfg.train_days >= blocks {
        return Err(WeatherError::Window(format!(
            "train-days must be between 1 and {} for {blocks} day-blocks",
            blocks - 1
        )));
    }
    let space = enumerate_space(&wt.task.bias, cfg.learn.space_cap.unwrap_or(DEFAULT_SPACE_CAP))
        .map_err(|e| WeatherError::Learn(e.into()))?;
    let folds: Vec<usize> = (0..cfg.folds).collect();
    let exec = cfg.learn.execution;
    let mut inner = cfg.clone();
    // folds already run concurrently; keep each fold's search sequential
    if exec == Execution::Parallel {
        inner.learn.execution = Execution::Sequential;
    }
    let reports = par::map(exec, &folds, |&f| {
        run_fold(wt, &space, &inner, f, blocks, &block_of)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let k = reports.len() as f64;
    Ok(CrossvalReport {
        mean_learner: reports.iter().map(|r| r.learner_accuracy).sum::<f64>() / k,
        mean_stump: reports.iter().map(|r| r.stump_accuracy).sum::<f64>() / k,
        folds: reports,
    })
}

/// Cross-validation rendered as the learner-versus-stump table.
pub fn baseline_compare(wt: &WindowedTask, cfg: &CrossvalConfig) -> Result<String, WeatherError> {
    Ok(crossval(wt, cfg)?.table())
}
