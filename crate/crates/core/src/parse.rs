//! Lexer and recursive-descent parser for program (`.lp`) and task (`.task`)
//! files.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::space::{ModeArg, ModeDeclaration, ModeKind, ModeSchema};
use crate::syntax::{sym, Atom, ChoiceHead, Comparator, Head, Literal, Program, Rule, Term};
use crate::task::{Bias, Example, LasTask, PartialInterpretation, Polarity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{column}: integer literal {text} out of range")]
    IntRange {
        line: usize,
        column: usize,
        text: String,
    },
    #[error("line {line}: unsafe variable {variable} in rule {rule}")]
    Unsafe {
        rule: usize,
        line: usize,
        variable: String,
    },
    #[error("line {line}: choice bounds {lower}..{upper} invalid for {size} atoms")]
    ChoiceBounds {
        line: usize,
        lower: u32,
        upper: u32,
        size: usize,
    },
    #[error("predicate {predicate} used with arity {first} and {second}")]
    ArityClash {
        predicate: String,
        first: usize,
        second: usize,
    },
    #[error("line {line}: duplicate example identifier {id}")]
    DuplicateExample { id: String, line: usize },
    #[error("line {line}: penalty of example {id} must be positive")]
    NonPositivePenalty { id: String, line: usize },
    #[error("line {line}: example {id} has {atom} both included and excluded")]
    OverlappingExample {
        id: String,
        line: usize,
        atom: String,
    },
    #[error("line {line}: example {id}: {atom} is not ground")]
    NonGroundExample {
        id: String,
        line: usize,
        atom: String,
    },
    #[error("line {line}: invalid mode declaration: {reason}")]
    Mode { line: usize, reason: String },
    #[error("line {line}: {directive} expects a positive integer")]
    Bound { line: usize, directive: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i32),
    Directive(String),
    Dot,
    Comma,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    If,
    At,
    Cmp(Comparator),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("'{s}'"),
            Tok::Int(v) => format!("'{v}'"),
            Tok::Directive(d) => format!("'#{d}'"),
            Tok::Dot => "'.'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::If => "':-'".into(),
            Tok::At => "'@'".into(),
            Tok::Cmp(c) => format!("'{c}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let syntax = |line, column, found: String| ParseError::Syntax {
        line,
        column,
        expected: "token".into(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut col);
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let peek = chars.get(i + 1).copied();
        let tok = match c {
            '.' => {
                advance(1, &mut i, &mut col);
                Tok::Dot
            }
            ',' => {
                advance(1, &mut i, &mut col);
                Tok::Comma
            }
            ';' => {
                advance(1, &mut i, &mut col);
                Tok::Semi
            }
            '(' => {
                advance(1, &mut i, &mut col);
                Tok::LParen
            }
            ')' => {
                advance(1, &mut i, &mut col);
                Tok::RParen
            }
            '{' => {
                advance(1, &mut i, &mut col);
                Tok::LBrace
            }
            '}' => {
                advance(1, &mut i, &mut col);
                Tok::RBrace
            }
            '@' => {
                advance(1, &mut i, &mut col);
                Tok::At
            }
            ':' if peek == Some('-') => {
                advance(2, &mut i, &mut col);
                Tok::If
            }
            '<' | '>' | '!' | '=' => {
                let two = peek == Some('=');
                let op = match (c, two) {
                    ('<', true) => Comparator::Le,
                    ('<', false) => Comparator::Lt,
                    ('>', true) => Comparator::Ge,
                    ('>', false) => Comparator::Gt,
                    ('!', true) => Comparator::Ne,
                    ('=', false) => Comparator::Eq,
                    _ => return Err(syntax(line, col, format!("'{c}'"))),
                };
                advance(if two { 2 } else { 1 }, &mut i, &mut col);
                Tok::Cmp(op)
            }
            '#' => {
                let s = i + 1;
                let mut e = s;
                while e < chars.len() && chars[e].is_ascii_alphanumeric() {
                    e += 1;
                }
                if e == s {
                    return Err(syntax(line, col, "'#'".into()));
                }
                let name: String = chars[s..e].iter().collect();
                advance(e - i, &mut i, &mut col);
                Tok::Directive(name)
            }
            c if c.is_ascii_digit() || (c == '-' && peek.is_some_and(|p| p.is_ascii_digit())) => {
                let mut e = i + 1;
                while e < chars.len() && chars[e].is_ascii_digit() {
                    e += 1;
                }
                let text: String = chars[i..e].iter().collect();
                let value = text.parse::<i32>().map_err(|_| ParseError::IntRange {
                    line,
                    column: col,
                    text: text.clone(),
                })?;
                advance(e - i, &mut i, &mut col);
                Tok::Int(value)
            }
            c if c.is_ascii_alphabetic() => {
                let mut e = i + 1;
                while e < chars.len() && (chars[e].is_ascii_alphanumeric() || chars[e] == '_') {
                    e += 1;
                }
                let text: String = chars[i..e].iter().collect();
                advance(e - i, &mut i, &mut col);
                if c.is_ascii_uppercase() {
                    Tok::Var(text)
                } else {
                    Tok::Ident(text)
                }
            }
            other => return Err(syntax(line, col, format!("'{other}'"))),
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError::Syntax {
            line: s.line,
            column: s.column,
            expected: expected.into(),
            found: s.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "not" => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn int(&mut self) -> Result<i32, ParseError> {
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            _ => Err(self.error("integer")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "not" => {
                self.bump();
                Ok(Term::Const(sym(&s)))
            }
            Tok::Var(s) => {
                self.bump();
                Ok(Term::Var(sym(&s)))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Term::Int(v))
            }
            _ => Err(self.error("term")),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let predicate = self.ident()?;
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.bump() {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("',' or ')'"));
                    }
                }
            }
        }
        Ok(Atom {
            predicate: sym(&predicate),
            args,
        })
    }

    fn comparator(&mut self) -> Result<Comparator, ParseError> {
        match *self.peek() {
            Tok::Cmp(op) => {
                self.bump();
                Ok(op)
            }
            _ => Err(self.error("comparison operator")),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "not" => {
                self.bump();
                Ok(Literal::Naf(self.atom()?))
            }
            Tok::Var(_) | Tok::Int(_) => {
                let lhs = self.term()?;
                let op = self.comparator()?;
                let rhs = self.term()?;
                Ok(Literal::Cmp(lhs, op, rhs))
            }
            Tok::Ident(_) => {
                let atom = self.atom()?;
                if let Tok::Cmp(_) = self.peek() {
                    if atom.args.is_empty() {
                        let op = self.comparator()?;
                        let rhs = self.term()?;
                        return Ok(Literal::Cmp(Term::Const(atom.predicate), op, rhs));
                    }
                }
                Ok(Literal::Pos(atom))
            }
            _ => Err(self.error("literal")),
        }
    }

    fn body(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut body = vec![self.literal()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            body.push(self.literal()?);
        }
        Ok(body)
    }

    fn choice(&mut self, lower: Option<i32>) -> Result<Head, ParseError> {
        let line = self.line();
        self.expect(Tok::LBrace)?;
        let mut atoms = vec![self.atom()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            atoms.push(self.atom()?);
        }
        self.expect(Tok::RBrace)?;
        let upper = match self.peek() {
            Tok::Int(_) => Some(self.int()?),
            _ => None,
        };
        let n = atoms.len();
        let lower = lower.unwrap_or(0);
        let upper = upper.unwrap_or(n as i32);
        if lower < 0 || upper < lower || upper as usize > n {
            return Err(ParseError::ChoiceBounds {
                line,
                lower: lower.max(0) as u32,
                upper: upper.max(0) as u32,
                size: n,
            });
        }
        Ok(Head::Choice(ChoiceHead {
            lower: lower as u32,
            upper: upper as u32,
            atoms,
        }))
    }

    /// One rule statement including its terminating '.'.
    fn rule(&mut self) -> Result<Rule, ParseError> {
        let head = match self.peek().clone() {
            Tok::If => Head::None,
            Tok::LBrace => self.choice(None)?,
            Tok::Int(v) => {
                self.bump();
                self.choice(Some(v))?
            }
            Tok::Ident(_) => Head::Atom(self.atom()?),
            _ => return Err(self.error("rule")),
        };
        let body = if *self.peek() == Tok::If {
            self.bump();
            self.body()?
        } else if matches!(head, Head::None) {
            unreachable!()
        } else {
            Vec::new()
        };
        self.expect(Tok::Dot)?;
        Ok(Rule { head, body })
    }

    /// Rules up to (not including) `stop`.
    fn rules_until(&mut self, stop: &Tok) -> Result<Vec<(Rule, usize)>, ParseError> {
        let mut rules = Vec::new();
        while self.peek() != stop {
            if let Tok::Directive(_) = self.peek() {
                return Err(self.error("rule"));
            }
            let line = self.line();
            rules.push((self.rule()?, line));
        }
        Ok(rules)
    }
}

fn check_rules(rules: &[(Rule, usize)]) -> Result<(), ParseError> {
    for (i, (rule, line)) in rules.iter().enumerate() {
        if let Some(v) = rule.unsafe_variable() {
            return Err(ParseError::Unsafe {
                rule: i,
                line: *line,
                variable: v.to_string(),
            });
        }
    }
    Ok(())
}

#[derive(Default)]
struct ArityTable(BTreeMap<String, usize>);

impl ArityTable {
    fn check(&mut self, predicate: &str, arity: usize) -> Result<(), ParseError> {
        match self.0.get(predicate) {
            Some(&a) if a != arity => Err(ParseError::ArityClash {
                predicate: predicate.to_string(),
                first: a,
                second: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.0.insert(predicate.to_string(), arity);
                Ok(())
            }
        }
    }

    fn check_program(&mut self, program: &Program) -> Result<(), ParseError> {
        for rule in &program.rules {
            for atom in rule.atoms() {
                self.check(&atom.predicate, atom.arity())?;
            }
        }
        Ok(())
    }
}

/// Parses a program file. Safety and arity consistency are checked.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let rules = p.rules_until(&Tok::Eof)?;
    check_rules(&rules)?;
    let program = Program::new(rules.into_iter().map(|(r, _)| r).collect());
    ArityTable::default().check_program(&program)?;
    Ok(program)
}

fn mode_arg(p: &mut Parser) -> Result<ModeArg, ParseError> {
    if let (Tok::Ident(kw), Tok::LParen) = (p.peek().clone(), p.peek_at(1).clone()) {
        if kw == "var" || kw == "const" {
            p.bump();
            p.bump();
            let ty = sym(&p.ident()?);
            p.expect(Tok::RParen)?;
            return Ok(if kw == "var" {
                ModeArg::Var(ty)
            } else {
                ModeArg::Const(ty)
            });
        }
    }
    Ok(ModeArg::Fixed(p.term()?))
}

fn mode_schema(p: &mut Parser) -> Result<ModeSchema, ParseError> {
    let line = p.line();
    // `var(t) op var(t)` comparison schema
    if matches!(p.peek(), Tok::Ident(s) if s == "var") && *p.peek_at(1) == Tok::LParen {
        let lhs = mode_arg(p)?;
        let op = p.comparator()?;
        let rhs = mode_arg(p)?;
        return match (lhs, rhs) {
            (ModeArg::Var(l), ModeArg::Var(r)) => Ok(ModeSchema::Compare { lhs: l, op, rhs: r }),
            _ => Err(ParseError::Mode {
                line,
                reason: "comparison schemas take two var(t) placeholders".into(),
            }),
        };
    }
    let predicate = sym(&p.ident()?);
    let mut args = Vec::new();
    if *p.peek() == Tok::LParen {
        p.bump();
        loop {
            args.push(mode_arg(p)?);
            match p.peek() {
                Tok::Comma => {
                    p.bump();
                }
                Tok::RParen => {
                    p.bump();
                    break;
                }
                _ => return Err(p.error("',' or ')'")),
            }
        }
    }
    Ok(ModeSchema::Atom { predicate, args })
}

fn atom_set(p: &mut Parser) -> Result<Vec<Atom>, ParseError> {
    p.expect(Tok::LBrace)?;
    let mut atoms = Vec::new();
    if *p.peek() != Tok::RBrace {
        atoms.push(p.atom()?);
        while *p.peek() == Tok::Comma {
            p.bump();
            atoms.push(p.atom()?);
        }
    }
    p.expect(Tok::RBrace)?;
    Ok(atoms)
}

fn example(p: &mut Parser, polarity: Polarity, line: usize) -> Result<Example, ParseError> {
    p.expect(Tok::LParen)?;
    let id = match p.peek().clone() {
        Tok::Int(v) => {
            p.bump();
            v.to_string()
        }
        _ => p.ident()?,
    };
    p.expect(Tok::At)?;
    let penalty = p.int()?;
    if penalty <= 0 {
        return Err(ParseError::NonPositivePenalty { id, line });
    }
    p.expect(Tok::Comma)?;
    let inclusions = atom_set(p)?;
    p.expect(Tok::Comma)?;
    let exclusions = atom_set(p)?;
    let mut ctx_rules = Vec::new();
    if *p.peek() == Tok::Comma {
        p.bump();
        p.expect(Tok::LBrace)?;
        ctx_rules = p.rules_until(&Tok::RBrace)?;
        p.expect(Tok::RBrace)?;
    }
    p.expect(Tok::RParen)?;
    p.expect(Tok::Dot)?;
    check_rules(&ctx_rules)?;
    for a in inclusions.iter().chain(&exclusions) {
        if !a.is_ground() {
            return Err(ParseError::NonGroundExample {
                id,
                line,
                atom: a.to_string(),
            });
        }
    }
    if let Some(a) = inclusions.iter().find(|a| exclusions.contains(a)) {
        return Err(ParseError::OverlappingExample {
            id,
            line,
            atom: a.to_string(),
        });
    }
    Ok(Example {
        id: sym(&id),
        penalty: penalty as u32,
        pi: PartialInterpretation {
            inclusions,
            exclusions,
        },
        context: Program::new(ctx_rules.into_iter().map(|(r, _)| r).collect()),
        polarity,
    })
}

fn positive_bound(p: &mut Parser, directive: &str, line: usize) -> Result<usize, ParseError> {
    p.expect(Tok::LParen)?;
    let v = p.int()?;
    p.expect(Tok::RParen)?;
    p.expect(Tok::Dot)?;
    // max_vars and max_body may legitimately be zero
    let min = if directive == "maxrules" { 1 } else { 0 };
    if v < min {
        return Err(ParseError::Bound {
            line,
            directive: format!("#{directive}"),
        });
    }
    Ok(v as usize)
}

/// Parses a task file: background rules interleaved with directives.
pub fn parse_task(text: &str) -> Result<LasTask, ParseError> {
    let mut p = Parser::new(text)?;
    let mut background = Vec::new();
    let mut bias = Bias::default();
    let mut examples: Vec<Example> = Vec::new();
    let mut seen = HashSet::new();
    loop {
        let line = p.line();
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Directive(d) => {
                p.bump();
                match d.as_str() {
                    "modeh" | "modeb" => {
                        let kind = if d == "modeh" {
                            ModeKind::Head
                        } else {
                            ModeKind::Body
                        };
                        p.expect(Tok::LParen)?;
                        let schema = mode_schema(&mut p)?;
                        let mut naf_allowed = kind == ModeKind::Body;
                        if *p.peek() == Tok::Comma {
                            p.bump();
                            p.expect(Tok::LParen)?;
                            loop {
                                let opt = p.ident()?;
                                match opt.as_str() {
                                    "positive" => naf_allowed = false,
                                    _ => {
                                        return Err(ParseError::Mode {
                                            line,
                                            reason: format!("unknown option {opt}"),
                                        })
                                    }
                                }
                                if *p.peek() == Tok::Comma {
                                    p.bump();
                                } else {
                                    break;
                                }
                            }
                            p.expect(Tok::RParen)?;
                        }
                        p.expect(Tok::RParen)?;
                        p.expect(Tok::Dot)?;
                        if kind == ModeKind::Head && matches!(schema, ModeSchema::Compare { .. }) {
                            return Err(ParseError::Mode {
                                line,
                                reason: "head modes cannot be comparisons".into(),
                            });
                        }
                        bias.modes.push(ModeDeclaration {
                            kind,
                            schema,
                            naf_allowed: kind == ModeKind::Body && naf_allowed,
                        });
                    }
                    "constant" => {
                        p.expect(Tok::LParen)?;
                        let ty = sym(&p.ident()?);
                        p.expect(Tok::Comma)?;
                        let value = p.term()?;
                        if value.is_var() {
                            return Err(ParseError::Mode {
                                line,
                                reason: "#constant value must be a constant or integer".into(),
                            });
                        }
                        p.expect(Tok::RParen)?;
                        p.expect(Tok::Dot)?;
                        bias.constants.insert(ty, value);
                    }
                    "pos" | "neg" => {
                        let polarity = if d == "pos" {
                            Polarity::Positive
                        } else {
                            Polarity::Negative
                        };
                        let e = example(&mut p, polarity, line)?;
                        if !seen.insert(e.id.clone()) {
                            return Err(ParseError::DuplicateExample {
                                id: e.id.to_string(),
                                line,
                            });
                        }
                        examples.push(e);
                    }
                    "maxv" => bias.bounds.max_vars = positive_bound(&mut p, &d, line)?,
                    "maxb" => bias.bounds.max_body = positive_bound(&mut p, &d, line)?,
                    "maxrules" => bias.bounds.max_rules = positive_bound(&mut p, &d, line)?,
                    _ => {
                        p.pos -= 1;
                        return Err(p.error("known directive"));
                    }
                }
            }
            _ => {
                let rule = p.rule()?;
                background.push((rule, line));
            }
        }
    }
    check_rules(&background)?;
    let background = Program::new(background.into_iter().map(|(r, _)| r).collect());

    let mut arities = ArityTable::default();
    arities.check_program(&background)?;
    for m in &bias.modes {
        if let ModeSchema::Atom { predicate, args } = &m.schema {
            arities.check(predicate, args.len())?;
        }
    }
    for e in &examples {
        arities.check_program(&e.context)?;
        for a in e.pi.inclusions.iter().chain(&e.pi.exclusions) {
            arities.check(&a.predicate, a.arity())?;
        }
    }
    Ok(LasTask {
        background,
        bias,
        examples,
    })
}
