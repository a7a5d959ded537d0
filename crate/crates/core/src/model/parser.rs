//! Reader for the `.tsm` model language.
//!
//! ```text
//! # comment
//! var Pump : {off, on} init off;
//! event PumpF;
//! block start { guard: Pump = off & !PumpF; Pump := on; }
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{Block, Expr, Model, VarKind, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    DuplicateName,
    UnknownName,
    UnknownValue,
    FlagReset,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ModelError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos {
                line: lno + 1,
                col: i + 1,
            };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                continue;
            }
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let sym = match two.as_str() {
                ":=" => Some(":="),
                "!=" => Some("!="),
                _ => None,
            };
            if let Some(s) = sym {
                out.push((Tok::Sym(s), pos));
                i += 2;
                continue;
            }
            let s = match c {
                '{' => "{",
                '}' => "}",
                ',' => ",",
                ';' => ";",
                ':' => ":",
                '=' => "=",
                '&' => "&",
                '|' => "|",
                '!' => "!",
                '(' => "(",
                ')' => ")",
                _ => {
                    return Err(Diagnostic {
                        line: pos.line,
                        col: pos.col,
                        kind: DiagnosticKind::Syntax,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push((Tok::Sym(s), pos));
            i += 1;
        }
    }
    let end = Pos {
        line: text.lines().count().max(1),
        col: text.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    out.push((Tok::Eof, end));
    Ok(out)
}

type Name = (String, Pos);

enum RawExpr {
    Const(bool),
    Atom {
        var: Name,
        value: Option<Name>,
        negated: bool,
    },
    Not(Box<RawExpr>),
    And(Box<RawExpr>, Box<RawExpr>),
    Or(Box<RawExpr>, Box<RawExpr>),
}

enum Decl {
    Var {
        name: Name,
        domain: Vec<Name>,
        init: Name,
    },
    Event {
        name: Name,
    },
    Block {
        name: Name,
        guard: Option<RawExpr>,
        updates: Vec<(Name, Name)>,
    },
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn error(&self, message: String) -> Diagnostic {
        let p = self.pos();
        Diagnostic {
            line: p.line,
            col: p.col,
            kind: DiagnosticKind::Syntax,
            message,
        }
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), Diagnostic> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{sym}`, found {}", self.peek())))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<Name, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.pos();
                self.bump();
                Ok((s, p))
            }
            t => Err(self.error(format!("expected {what}, found {t}"))),
        }
    }

    fn decls(&mut self) -> Result<Vec<Decl>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(out),
                Tok::Ident(kw) if kw == "var" => {
                    self.bump();
                    let name = self.ident("variable name")?;
                    self.expect(":")?;
                    self.expect("{")?;
                    let mut domain = vec![self.ident("value")?];
                    while self.eat(",") {
                        domain.push(self.ident("value")?);
                    }
                    self.expect("}")?;
                    if !self.is_keyword("init") {
                        return Err(self.error(format!("expected `init`, found {}", self.peek())));
                    }
                    self.bump();
                    let init = self.ident("initial value")?;
                    self.expect(";")?;
                    out.push(Decl::Var { name, domain, init });
                }
                Tok::Ident(kw) if kw == "event" => {
                    self.bump();
                    let name = self.ident("event name")?;
                    self.expect(";")?;
                    out.push(Decl::Event { name });
                }
                Tok::Ident(kw) if kw == "block" => {
                    self.bump();
                    let name = self.ident("block name")?;
                    self.expect("{")?;
                    let mut guard = None;
                    if self.is_keyword("guard") {
                        self.bump();
                        self.eat(":");
                        guard = Some(self.expr()?);
                        self.expect(";")?;
                    }
                    let mut updates = Vec::new();
                    while !self.eat("}") {
                        let var = self.ident("assignment or `}`")?;
                        self.expect(":=")?;
                        let value = self.ident("value")?;
                        self.expect(";")?;
                        updates.push((var, value));
                    }
                    out.push(Decl::Block {
                        name,
                        guard,
                        updates,
                    });
                }
                t => {
                    return Err(self.error(format!("expected `var`, `event` or `block`, found {t}")))
                }
            }
        }
    }

    fn expr(&mut self) -> Result<RawExpr, Diagnostic> {
        let mut lhs = self.conj()?;
        while self.eat("|") {
            let rhs = self.conj()?;
            lhs = RawExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<RawExpr, Diagnostic> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            lhs = RawExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RawExpr, Diagnostic> {
        if self.eat("!") {
            return Ok(RawExpr::Not(Box::new(self.unary()?)));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let var = self.ident("expression")?;
        match var.0.as_str() {
            "true" => return Ok(RawExpr::Const(true)),
            "false" => return Ok(RawExpr::Const(false)),
            _ => {}
        }
        let negated = if self.eat("=") {
            false
        } else if self.eat("!=") {
            true
        } else {
            return Ok(RawExpr::Atom {
                var,
                value: None,
                negated: false,
            });
        };
        let value = self.ident("value")?;
        Ok(RawExpr::Atom {
            var,
            value: Some(value),
            negated,
        })
    }
}

struct Resolver<'a> {
    model: &'a Model,
    index: HashMap<&'a str, usize>,
    diags: Vec<Diagnostic>,
}

impl Resolver<'_> {
    fn report(&mut self, pos: Pos, kind: DiagnosticKind, message: String) {
        self.diags.push(Diagnostic {
            line: pos.line,
            col: pos.col,
            kind,
            message,
        });
    }

    fn var(&mut self, name: &Name) -> Option<usize> {
        let v = self.index.get(name.0.as_str()).copied();
        if v.is_none() {
            self.report(
                name.1,
                DiagnosticKind::UnknownName,
                format!("unknown variable `{}`", name.0),
            );
        }
        v
    }

    fn value(&mut self, var: usize, value: &Name) -> Option<usize> {
        let decl = &self.model.variables[var];
        let x = decl.value_index(&value.0);
        if x.is_none() {
            let msg = format!("`{}` is not a value of `{}`", value.0, decl.name);
            self.report(value.1, DiagnosticKind::UnknownValue, msg);
        }
        x
    }

    fn expr(&mut self, e: &RawExpr) -> Option<Expr> {
        Some(match e {
            RawExpr::Const(b) => Expr::Const(*b),
            RawExpr::Not(a) => Expr::not(self.expr(a)?),
            RawExpr::And(a, b) => {
                let (a, b) = (self.expr(a), self.expr(b));
                Expr::and(a?, b?)
            }
            RawExpr::Or(a, b) => {
                let (a, b) = (self.expr(a), self.expr(b));
                Expr::or(a?, b?)
            }
            RawExpr::Atom {
                var,
                value,
                negated,
            } => {
                let v = self.var(var)?;
                let x = match value {
                    Some(value) => self.value(v, value)?,
                    None if self.model.variables[v].is_event() => 1,
                    None => {
                        let msg =
                            format!("`{}` is not an event flag; compare it with a value", var.0);
                        self.report(var.1, DiagnosticKind::Invalid, msg);
                        return None;
                    }
                };
                if *negated {
                    Expr::not(Expr::Eq(v, x))
                } else {
                    Expr::Eq(v, x)
                }
            }
        })
    }
}

/// Parses a model, reporting every semantic problem found after a successful
/// syntactic pass (or the first syntax error).
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let fail = |d: Diagnostic| ModelError {
        diagnostics: vec![d],
    };
    let toks = lex(text).map_err(fail)?;
    let decls = Parser { toks, at: 0 }.decls().map_err(fail)?;

    let mut diags = Vec::new();
    let mut model = Model::default();
    let mut seen: HashMap<String, Pos> = HashMap::new();
    let mut dup = |name: &Name, diags: &mut Vec<Diagnostic>| -> bool {
        if let Some(first) = seen.get(&name.0) {
            diags.push(Diagnostic {
                line: name.1.line,
                col: name.1.col,
                kind: DiagnosticKind::DuplicateName,
                message: format!(
                    "duplicate name `{}` (first declared at {}:{})",
                    name.0, first.line, first.col
                ),
            });
            true
        } else {
            seen.insert(name.0.clone(), name.1);
            false
        }
    };

    for d in &decls {
        match d {
            Decl::Var { name, domain, init } => {
                if dup(name, &mut diags) {
                    continue;
                }
                let mut values: Vec<String> = Vec::new();
                for v in domain {
                    if values.contains(&v.0) {
                        diags.push(Diagnostic {
                            line: v.1.line,
                            col: v.1.col,
                            kind: DiagnosticKind::DuplicateName,
                            message: format!("duplicate value `{}` in domain of `{}`", v.0, name.0),
                        });
                    } else {
                        values.push(v.0.clone());
                    }
                }
                let initial = match values.iter().position(|v| *v == init.0) {
                    Some(i) => i,
                    None => {
                        diags.push(Diagnostic {
                            line: init.1.line,
                            col: init.1.col,
                            kind: DiagnosticKind::UnknownValue,
                            message: format!("`{}` is not a value of `{}`", init.0, name.0),
                        });
                        0
                    }
                };
                model.variables.push(Variable {
                    name: name.0.clone(),
                    domain: values,
                    initial,
                    kind: VarKind::State,
                });
            }
            Decl::Event { name } => {
                if !dup(name, &mut diags) {
                    model.variables.push(Variable::event(&name.0));
                }
            }
            Decl::Block { .. } => {}
        }
    }

    let mut block_names: HashMap<String, Pos> = HashMap::new();
    let mut blocks = Vec::new();
    {
        let index = model
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        let mut r = Resolver {
            model: &model,
            index,
            diags: Vec::new(),
        };
        for d in &decls {
            let Decl::Block {
                name,
                guard,
                updates,
            } = d
            else {
                continue;
            };
            if let Some(first) = block_names.get(&name.0) {
                let msg = format!(
                    "duplicate block `{}` (first declared at {}:{})",
                    name.0, first.line, first.col
                );
                r.report(name.1, DiagnosticKind::DuplicateName, msg);
                continue;
            }
            block_names.insert(name.0.clone(), name.1);
            let guard = match guard {
                Some(g) => r.expr(g),
                None => Some(Expr::Const(true)),
            };
            let mut ups = Vec::new();
            let mut ok = true;
            for (var, value) in updates {
                let Some(v) = r.var(var) else {
                    ok = false;
                    continue;
                };
                let Some(x) = r.value(v, value) else {
                    ok = false;
                    continue;
                };
                if model.variables[v].is_event() && x == 0 {
                    let msg = format!("basic event flag `{}` cannot be reset to false", var.0);
                    r.report(value.1, DiagnosticKind::FlagReset, msg);
                    ok = false;
                } else if ups.iter().any(|&(u, _)| u == v) {
                    let msg = format!("`{}` assigned twice in block `{}`", var.0, name.0);
                    r.report(var.1, DiagnosticKind::Invalid, msg);
                    ok = false;
                } else {
                    ups.push((v, x));
                }
            }
            if let (Some(guard), true) = (guard, ok) {
                blocks.push(Block {
                    name: name.0.clone(),
                    guard,
                    updates: ups,
                });
            }
        }
        diags.extend(r.diags);
    }
    model.blocks = blocks;

    if diags.is_empty() {
        Ok(model)
    } else {
        diags.sort_by_key(|d| (d.line, d.col));
        Err(ModelError { diagnostics: diags })
    }
}
