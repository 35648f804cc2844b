//! Sliding windows over a discretized series, turned into a learning task.

use super::series::{level_atom, LevelTable};
use super::WeatherError;
use crate::space::{ModeArg, ModeDeclaration, ModeKind, ModeSchema};
use crate::syntax::{sym, Atom, Literal, Program, Rule, Term};
use crate::task::{Bias, Bounds, Example, LasTask, PartialInterpretation, Polarity, TypedConstants};

pub const TIME_TYPE: &str = "time";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    /// Number of history timestamps in each example's context.
    pub history: usize,
    pub target: String,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            history: 1,
            target: "rain".into(),
        }
    }
}

/// How the bias and examples of a generated task look.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskTemplate {
    pub bounds: Bounds,
    /// Penalty of every example.
    pub penalty: u32,
    /// Allow `not` on body literals.
    pub naf: bool,
}

impl Default for TaskTemplate {
    fn default() -> Self {
        TaskTemplate {
            bounds: Bounds {
                max_body: 3,
                max_vars: 2,
                max_rules: 1,
            },
            penalty: 1,
            naf: false,
        }
    }
}

/// A task built from windows, with the row and observed target level of
/// every example kept for evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedTask {
    pub task: LasTask,
    pub window: WindowSpec,
    /// Row index of each example's target observation.
    pub target_rows: Vec<usize>,
    /// Observed target level index of each example.
    pub observed: Vec<usize>,
    /// Target level names.
    pub target_levels: Vec<String>,
    /// Level index assumed when nothing else is derived.
    pub default_level: Option<usize>,
    /// The discretized series the windows were cut from.
    pub table: LevelTable,
}

impl WindowedTask {
    /// The atom a prediction of `level` refers to.
    pub fn target_atom(&self, level: usize) -> Atom {
        level_atom(
            &self.window.target,
            &self.target_levels[level],
            Term::Int(self.window.history as i32 + 1),
        )
    }
}

fn level_type(column: &str) -> String {
    format!("{column}_level")
}

fn fixed(c: &str) -> ModeArg {
    ModeArg::Fixed(Term::constant(c))
}

/// One example per window of `history` rows followed by a target row.
///
/// Context facts use relative timestamps `1..=W`; the target is at `W+1`.
/// The background links consecutive timestamps with `next/2` and, when the
/// target column has a default level, derives it whenever no other level is.
pub fn build_task(
    table: &LevelTable,
    window: &WindowSpec,
    template: &TaskTemplate,
) -> Result<WindowedTask, WeatherError> {
    let w = window.history;
    if w == 0 {
        return Err(WeatherError::Window("history length must be at least 1".into()));
    }
    let target = table
        .column(&window.target)
        .ok_or_else(|| WeatherError::MissingColumn(window.target.clone()))?;
    if table.rows() < w + 1 {
        return Err(WeatherError::TooFewRows {
            rows: table.rows(),
            needed: w + 1,
        });
    }
    let horizon = Term::Int(w as i32 + 1);

    let mut background = Vec::new();
    for t in 1..=w as i32 {
        background.push(Rule::fact(Atom::new("next", vec![Term::Int(t), Term::Int(t + 1)])));
    }
    if let Some(d) = target.default {
        let body = target
            .levels
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != d)
            .map(|(_, l)| Literal::Naf(level_atom(&target.name, l, horizon.clone())))
            .collect();
        background.push(Rule::normal(
            level_atom(&target.name, &target.levels[d], horizon.clone()),
            body,
        ));
    }

    let mut constants = TypedConstants::new();
    for t in 1..=w as i32 + 1 {
        constants.insert(sym(TIME_TYPE), Term::Int(t));
    }
    let head_type = format!("{}_head", target.name);
    for (i, l) in target.levels.iter().enumerate() {
        if Some(i) != target.default {
            constants.insert(sym(&head_type), Term::constant(l));
        }
    }
    for c in &table.columns {
        for l in &c.levels {
            constants.insert(sym(&level_type(&c.name)), Term::constant(l));
        }
    }
    let mut modes = vec![ModeDeclaration {
        kind: ModeKind::Head,
        schema: ModeSchema::Atom {
            predicate: sym("level"),
            args: vec![
                fixed(&target.name),
                ModeArg::Const(sym(&head_type)),
                ModeArg::Var(sym(TIME_TYPE)),
            ],
        },
        naf_allowed: false,
    }];
    for c in &table.columns {
        modes.push(ModeDeclaration {
            kind: ModeKind::Body,
            schema: ModeSchema::Atom {
                predicate: sym("level"),
                args: vec![
                    fixed(&c.name),
                    ModeArg::Const(sym(&level_type(&c.name))),
                    ModeArg::Var(sym(TIME_TYPE)),
                ],
            },
            naf_allowed: template.naf,
        });
    }
    modes.push(ModeDeclaration {
        kind: ModeKind::Body,
        schema: ModeSchema::Atom {
            predicate: sym("next"),
            args: vec![ModeArg::Var(sym(TIME_TYPE)), ModeArg::Var(sym(TIME_TYPE))],
        },
        naf_allowed: false,
    });

    let mut examples = Vec::new();
    let mut target_rows = Vec::new();
    let mut observed = Vec::new();
    for row in w..table.rows() {
        let mut ctx = Vec::new();
        for k in 0..w {
            let r = row - w + k;
            for c in &table.columns {
                ctx.push(Rule::fact(level_atom(
                    &c.name,
                    &c.levels[c.values[r]],
                    Term::Int(k as i32 + 1),
                )));
            }
        }
        let obs = target.values[row];
        let mut pi = PartialInterpretation::default();
        for (i, l) in target.levels.iter().enumerate() {
            let a = level_atom(&target.name, l, horizon.clone());
            if i == obs {
                pi.inclusions.push(a);
            } else {
                pi.exclusions.push(a);
            }
        }
        examples.push(Example {
            id: sym(&format!("w{}", table.timestamps[row])),
            penalty: template.penalty,
            pi,
            context: Program::new(ctx),
            polarity: Polarity::Positive,
        });
        target_rows.push(row);
        observed.push(obs);
    }
    Ok(WindowedTask {
        task: LasTask {
            background: Program::new(background),
            bias: Bias {
                modes,
                constants,
                bounds: template.bounds,
            },
            examples,
        },
        window: window.clone(),
        target_rows,
        observed,
        target_levels: target.levels.clone(),
        default_level: target.default,
        table: table.clone(),
    })
}
