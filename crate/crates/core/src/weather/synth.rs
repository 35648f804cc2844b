//! Seeded synthetic series whose target follows a planted rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::series::{level_atom, DiscretizationSpec, SeriesTable};
use super::WeatherError;
use crate::ground::{ground_relevant, herbrand_universe, TypedRule};
use crate::solve::{answer_sets, SolverConfig};
use crate::syntax::{Atom, Program, Rule, Term};
use crate::task::TypedConstants;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub rows: usize,
    /// Probability of replacing the target level by a different one.
    pub noise: f64,
    pub seed: u64,
    pub target: String,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            rows: 240,
            noise: 0.0,
            seed: 0,
            target: "rain".into(),
        }
    }
}

/// Level of the target at relative time 2 derived by `planted` from the
/// row at relative time 1, if any.
fn planted_level(planted: &Program, row: &[(String, String)], target: &str, levels: &[String]) -> Result<Option<usize>, WeatherError> {
    let mut program = planted.clone();
    program
        .rules
        .push(Rule::fact(Atom::new("next", vec![Term::Int(1), Term::Int(2)])));
    for (c, l) in row {
        program.rules.push(Rule::fact(level_atom(c, l, Term::Int(1))));
    }
    let universe = herbrand_universe(&program, &TypedConstants::new());
    let typed: Vec<TypedRule> = program.rules.iter().map(TypedRule::untyped).collect();
    let g = ground_relevant(&typed, &universe)?;
    let sets = answer_sets(&g, Some(1), &SolverConfig::default())?;
    let Some(model) = sets.models.first() else {
        return Err(WeatherError::Planted("the planted program has no answer set".into()));
    };
    Ok(levels.iter().position(|l| {
        g.atoms
            .get(&level_atom(target, l, Term::Int(2)))
            .is_some_and(|id| model.contains(id))
    }))
}

fn sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64, spec: &super::series::ColumnSpec, level: usize) -> f64 {
    let x = rng.gen_range(lo..hi);
    let rounded = (x * 100.0).floor() / 100.0;
    if spec.level_of(rounded) == Some(level) {
        rounded
    } else {
        x
    }
}

/// Generates `rows` rows with timestamps `1..=rows`. Every non-target
/// column draws its level uniformly; the target level at `t+1` is the one
/// the planted program derives from row `t` (the column default, or its
/// first level, when nothing is derived), then replaced by a uniformly
/// chosen other level with probability `noise`. Numeric values are drawn
/// uniformly within each level's range.
pub fn synthesize(spec: &DiscretizationSpec, planted: &Program, cfg: &SyntheticConfig) -> Result<SeriesTable, WeatherError> {
    spec.validate()?;
    let target = spec
        .columns
        .get(&cfg.target)
        .ok_or_else(|| WeatherError::MissingColumn(cfg.target.clone()))?;
    if !(0.0..=1.0).contains(&cfg.noise) {
        return Err(WeatherError::Planted(format!("noise rate {} outside [0, 1]", cfg.noise)));
    }
    let fallback = target.default_index().unwrap_or(0);
    let names: Vec<&String> = spec.columns.keys().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut levels: Vec<Vec<usize>> = vec![Vec::with_capacity(cfg.rows); names.len()];
    for r in 0..cfg.rows {
        for (c, name) in names.iter().enumerate() {
            if **name == cfg.target {
                continue;
            }
            let n = spec.columns[*name].levels.len();
            levels[c].push(rng.gen_range(0..n));
        }
        let ti = names.iter().position(|n| **n == cfg.target).expect("target present");
        let mut level = if r == 0 {
            fallback
        } else {
            let row: Vec<(String, String)> = names
                .iter()
                .enumerate()
                .map(|(c, n)| ((*n).clone(), spec.columns[*n].levels[levels[c][r - 1]].clone()))
                .collect();
            planted_level(planted, &row, &cfg.target, &target.levels)?.unwrap_or(fallback)
        };
        if cfg.noise > 0.0 && rng.gen_bool(cfg.noise) && target.levels.len() > 1 {
            let other = rng.gen_range(0..target.levels.len() - 1);
            level = if other >= level { other + 1 } else { other };
        }
        levels[ti].push(level);
    }
    let mut values = Vec::with_capacity(names.len());
    for (c, name) in names.iter().enumerate() {
        let cs = &spec.columns[*name];
        let col = levels[c]
            .iter()
            .map(|&l| {
                let (lo, hi) = cs.range(l);
                sample(&mut rng, lo, hi, cs, l)
            })
            .collect();
        values.push(col);
    }
    Ok(SeriesTable {
        timestamp_column: "time".into(),
        timestamps: (1..=cfg.rows as i64).collect(),
        columns: names.into_iter().cloned().collect(),
        values,
    })
}
