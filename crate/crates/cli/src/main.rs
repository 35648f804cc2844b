//! `las`: ground, solve, learn and explain answer set programs, and build
//! and evaluate weather forecasting tasks.

mod demo;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use las_core::explain::{explain_absence, explain_atom_with, to_graph_text, ExplainOptions};
use las_core::ground::{ground, ground_relevant, herbrand_universe, GroundProgram, TypedRule};
use las_core::learn::{default_scoring, learn, multi_timestamp_scoring, LearnConfig, ScoringFunction};
use las_core::parse::{parse_program, parse_task};
use las_core::solve::{answer_sets, brave_entails, cautious_entails, is_stable, Interpretation, SolverConfig};
use las_core::space::enumerate_space;
use las_core::syntax::{Atom, Head, Program};
use las_core::task::{Bounds, LasTask, TypedConstants};
use las_core::weather::{
    build_task, crossval, discretize, ingest, synthesize, CrossvalConfig, DiscretizationSpec, SeriesTable,
    SyntheticConfig, TaskTemplate, WindowSpec,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO_MODEL: u8 = 10;

#[derive(Parser, Debug)]
#[command(name = "las", version, about = "Learning from answer sets", arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Most atoms left undecided after propagation that the solver will search over
    #[arg(long, global = true, default_value_t = las_core::solve::DEFAULT_MAX_ATOMS)]
    max_base_atoms: usize,
    /// Most rules enumerated into a hypothesis space
    #[arg(long, global = true, default_value_t = las_core::space::DEFAULT_SPACE_CAP)]
    space_cap: usize,
    /// Seed for synthetic data
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress notes on stderr
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Write the result to this file instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

impl Global {
    fn solver(&self) -> SolverConfig {
        SolverConfig {
            max_atoms: self.max_base_atoms,
        }
    }

    fn learn_config(&self, max_rules: Option<usize>) -> LearnConfig {
        LearnConfig {
            max_rules,
            space_cap: Some(self.space_cap),
            solver: self.solver(),
            ..LearnConfig::default()
        }
    }

    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("note: {msg}");
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the ground instantiation of a program
    Ground {
        file: PathBuf,
    },
    /// Enumerate answer sets, or answer a brave or cautious query
    Solve {
        file: PathBuf,
        /// Stop after this many answer sets
        #[arg(long)]
        limit: Option<usize>,
        /// Is the atom true in some answer set?
        #[arg(long, conflicts_with = "cautious")]
        brave: Option<String>,
        /// Is the atom true in every answer set?
        #[arg(long)]
        cautious: Option<String>,
    },
    /// List the hypothesis space of a task with base costs
    Space {
        file: PathBuf,
    },
    /// Learn a cost-minimal hypothesis for a task
    Learn {
        file: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
        /// Override the task's maximum number of rules
        #[arg(long)]
        max_rules: Option<usize>,
    },
    /// Explain why an atom is in (or absent from) an answer set, as a DOT graph
    Explain {
        file: PathBuf,
        /// Comma-separated atoms of the answer set; the first answer set if omitted
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        atom: String,
        /// Explain why the atom is not in the answer set
        #[arg(long)]
        absent: bool,
        /// List every applicable rule, not only the chosen justification
        #[arg(long)]
        all_supports: bool,
    },
    /// Turn a CSV series into a learning task
    Taskgen {
        data: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Cross-validate the learner against a one-feature baseline
    Evaluate {
        /// CSV series; omit when using --synthetic
        data: Option<PathBuf>,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 4)]
        train_days: usize,
        /// Timestamps per day-block
        #[arg(long, default_value_t = 24)]
        day_length: usize,
        /// Generate the series from this planted program instead of reading DATA
        #[arg(long, conflicts_with = "data")]
        synthetic: Option<PathBuf>,
        /// Rows of synthetic data
        #[arg(long, default_value_t = 240)]
        rows: usize,
        /// Share of synthetic target values replaced at random
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
    },
    /// Run a bundled demonstration
    Demo {
        which: DemoKind,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DemoKind {
    Legal,
    Weather,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ScoringKind {
    Default,
    MultiTimestamp,
}

#[derive(Args, Debug, Clone)]
struct ScoringArgs {
    #[arg(long, value_enum, default_value_t = ScoringKind::Default)]
    scoring: ScoringKind,
    /// Extra cost of a rule whose body refers to fewer than two timestamps
    #[arg(long, default_value_t = 5)]
    surcharge: u32,
}

impl ScoringArgs {
    fn function(&self) -> ScoringFunction {
        match self.scoring {
            ScoringKind::Default => default_scoring(),
            ScoringKind::MultiTimestamp => multi_timestamp_scoring(self.surcharge),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct WindowArgs {
    /// Discretization spec (TOML)
    #[arg(long)]
    spec: PathBuf,
    /// History timestamps per example
    #[arg(long, default_value_t = 1)]
    window: usize,
    /// Column to forecast
    #[arg(long, default_value = "rain")]
    target: String,
    /// Penalty of each example
    #[arg(long, default_value_t = 1)]
    penalty: u32,
    #[arg(long, default_value_t = 3)]
    max_body: usize,
    #[arg(long, default_value_t = 2)]
    max_vars: usize,
    #[arg(long, default_value_t = 1)]
    max_rules: usize,
    /// Allow negated body literals
    #[arg(long)]
    naf: bool,
}

impl WindowArgs {
    fn spec(&self) -> Result<DiscretizationSpec> {
        let text = read(&self.spec)?;
        DiscretizationSpec::from_toml(&text).with_context(|| self.spec.display().to_string())
    }

    fn window(&self) -> WindowSpec {
        WindowSpec {
            history: self.window,
            target: self.target.clone(),
        }
    }

    fn template(&self) -> TaskTemplate {
        TaskTemplate {
            bounds: Bounds {
                max_body: self.max_body,
                max_vars: self.max_vars,
                max_rules: self.max_rules,
            },
            penalty: self.penalty,
            naf: self.naf,
        }
    }
}

/// Command output plus the exit status it implies.
struct Outcome {
    text: String,
    status: u8,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, status: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_program(path: &Path) -> Result<Program> {
    parse_program(&read(path)?).with_context(|| path.display().to_string())
}

fn read_task(path: &Path) -> Result<LasTask> {
    parse_task(&read(path)?).with_context(|| path.display().to_string())
}

/// Grounds over the program's own constants, keeping only rules whose
/// positive body can be satisfied.
pub(crate) fn ground_program(program: &Program) -> Result<GroundProgram> {
    let universe = herbrand_universe(program, &TypedConstants::new());
    let typed: Vec<TypedRule> = program.rules.iter().map(TypedRule::untyped).collect();
    Ok(ground_relevant(&typed, &universe)?)
}

/// Parses one ground atom written on its own.
fn parse_atom(text: &str) -> Result<Atom> {
    let p = parse_program(&format!("{}.", text.trim())).with_context(|| format!("invalid atom {text:?}"))?;
    match p.rules.as_slice() {
        [r] if r.body.is_empty() => match &r.head {
            Head::Atom(a) if a.is_ground() => Ok(a.clone()),
            _ => bail!("{text:?} is not a ground atom"),
        },
        _ => bail!("{text:?} is not a single atom"),
    }
}

/// Splits on commas outside parentheses.
fn split_atoms(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out.into_iter().filter(|s| !s.trim().is_empty()).collect()
}

fn cmd_ground(g: &Global, file: &Path) -> Result<Outcome> {
    let program = read_program(file)?;
    let universe = herbrand_universe(&program, &TypedConstants::new());
    let gp = ground(&program, &universe)?;
    g.note(&format!("{} ground rules over {} atoms", gp.rules.len(), gp.atoms.len()));
    Ok(Outcome::ok(gp.to_string()))
}

fn cmd_solve(g: &Global, file: &Path, limit: Option<usize>, brave: Option<&str>, cautious: Option<&str>) -> Result<Outcome> {
    let gp = ground_program(&read_program(file)?)?;
    let solver = g.solver();
    if let Some(q) = brave.or(cautious) {
        let atom = parse_atom(q)?;
        let e = if brave.is_some() {
            brave_entails(&gp, &atom, &solver)?
        } else {
            cautious_entails(&gp, &atom, &solver)?
        };
        let status = if e.has_models { 0 } else { EXIT_NO_MODEL };
        if !e.has_models {
            g.note("no answer sets; cautious queries hold vacuously");
        }
        return Ok(Outcome {
            text: format!("{e}\n"),
            status,
        });
    }
    let sets = answer_sets(&gp, limit, &solver)?;
    let mut text = String::new();
    for m in &sets.models {
        let _ = writeln!(text, "{}", m.display(&gp.atoms));
    }
    if !sets.complete {
        g.note(&format!("stopped after {} answer sets", sets.models.len()));
    }
    if sets.models.is_empty() {
        g.note("no answer sets");
    }
    Ok(Outcome {
        text,
        status: if sets.models.is_empty() { EXIT_NO_MODEL } else { 0 },
    })
}

fn cmd_space(g: &Global, file: &Path) -> Result<Outcome> {
    let task = read_task(file)?;
    let space = enumerate_space(&task.bias, g.space_cap)?;
    let mut text = String::new();
    for (i, r) in space.rules.iter().enumerate() {
        let _ = writeln!(text, "{i}\t{}\t{}", r.base_cost(), r.text);
    }
    g.note(&format!("{} rules", space.len()));
    Ok(Outcome::ok(text))
}

pub(crate) fn learn_report_text(report: &las_core::learn::LearnReport) -> String {
    let mut text = report.hypothesis.to_string();
    let _ = writeln!(
        text,
        "% cost {} (rules {}, penalties {})",
        report.hypothesis.cost, report.rule_cost, report.penalty_cost
    );
    let _ = writeln!(text, "% example\taccepted\tpenalty paid");
    for o in &report.outcomes {
        let _ = writeln!(text, "% {}\t{}\t{}", o.id, if o.accepted { "yes" } else { "no" }, o.penalty_paid);
    }
    text
}

fn cmd_learn(g: &Global, file: &Path, scoring: &ScoringArgs, max_rules: Option<usize>) -> Result<Outcome> {
    let task = read_task(file)?;
    let report = learn(&task, &scoring.function(), &g.learn_config(max_rules))?;
    g.note(&format!(
        "space of {} rules, {} hypotheses scored",
        report.space_size, report.evaluated
    ));
    if !report.fully_covering {
        g.note("no hypothesis covers every example; some penalties were paid");
    }
    Ok(Outcome::ok(learn_report_text(&report)))
}

fn cmd_explain(g: &Global, file: &Path, model: Option<&str>, atom: &str, absent: bool, all_supports: bool) -> Result<Outcome> {
    let gp = ground_program(&read_program(file)?)?;
    let target = parse_atom(atom)?;
    let model = match model {
        Some(text) => {
            let atoms = split_atoms(text).into_iter().map(parse_atom).collect::<Result<Vec<_>>>()?;
            let m = Interpretation::from_atoms(&gp.atoms, &atoms)
                .ok_or_else(|| anyhow!("the model mentions an atom that cannot be derived"))?;
            if !is_stable(&gp, &m) {
                bail!("{{{}}} is not an answer set of {}", m.display(&gp.atoms), file.display());
            }
            m
        }
        None => {
            let sets = answer_sets(&gp, Some(1), &g.solver())?;
            let Some(m) = sets.models.into_iter().next() else {
                bail!("{} has no answer set to explain", file.display());
            };
            g.note(&format!("explaining in answer set {{{}}}", m.display(&gp.atoms)));
            m
        }
    };
    let dag = if absent {
        explain_absence(&gp, &model, &target)?
    } else {
        explain_atom_with(&gp, &model, &target, ExplainOptions { all_supports })?
    };
    Ok(Outcome::ok(to_graph_text(&dag)))
}

fn load_table(data: &Path) -> Result<SeriesTable> {
    ingest(&read(data)?).with_context(|| data.display().to_string())
}

fn cmd_taskgen(data: &Path, w: &WindowArgs) -> Result<Outcome> {
    let spec = w.spec()?;
    let table = discretize(&load_table(data)?, &spec).with_context(|| data.display().to_string())?;
    let wt = build_task(&table, &w.window(), &w.template())?;
    Ok(Outcome::ok(wt.task.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    g: &Global,
    data: Option<&Path>,
    w: &WindowArgs,
    scoring: &ScoringArgs,
    folds: usize,
    train_days: usize,
    day_length: usize,
    synthetic: Option<&Path>,
    rows: usize,
    noise: f64,
) -> Result<Outcome> {
    let spec = w.spec()?;
    let series = match (data, synthetic) {
        (Some(d), None) => load_table(d)?,
        (None, Some(p)) => {
            let planted = read_program(p)?;
            let cfg = SyntheticConfig {
                rows,
                noise,
                seed: g.seed,
                target: w.target.clone(),
            };
            synthesize(&spec, &planted, &cfg)?
        }
        _ => bail!("give either a CSV file or --synthetic PLANTED.lp"),
    };
    let table = discretize(&series, &spec)?;
    let wt = build_task(&table, &w.window(), &w.template())?;
    let cfg = CrossvalConfig {
        folds,
        train_days,
        day_length,
        scoring: scoring.function(),
        learn: g.learn_config(None),
    };
    let report = crossval(&wt, &cfg)?;
    Ok(Outcome::ok(report.table()))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Ground { file } => cmd_ground(g, file),
        Command::Solve {
            file,
            limit,
            brave,
            cautious,
        } => cmd_solve(g, file, *limit, brave.as_deref(), cautious.as_deref()),
        Command::Space { file } => cmd_space(g, file),
        Command::Learn {
            file,
            scoring,
            max_rules,
        } => cmd_learn(g, file, scoring, *max_rules),
        Command::Explain {
            file,
            model,
            atom,
            absent,
            all_supports,
        } => cmd_explain(g, file, model.as_deref(), atom, *absent, *all_supports),
        Command::Taskgen { data, window } => cmd_taskgen(data, window),
        Command::Evaluate {
            data,
            window,
            scoring,
            folds,
            train_days,
            day_length,
            synthetic,
            rows,
            noise,
        } => cmd_evaluate(
            g,
            data.as_deref(),
            window,
            scoring,
            *folds,
            *train_days,
            *day_length,
            synthetic.as_deref(),
            *rows,
            *noise,
        ),
        Command::Demo { which } => match which {
            DemoKind::Legal => demo::legal(g.solver()).map(Outcome::ok),
            DemoKind::Weather => demo::weather(g.seed, g.learn_config(None)).map(Outcome::ok),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.global.output {
                Some(path) => fs::write(path, &out.text).with_context(|| format!("cannot write {}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.status),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_INPUT)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
