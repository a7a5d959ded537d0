//! LTL concrete syntax.
//!
//! Binding strength, tightest first: `!`, `X`, `G`, `F` (prefix); `U`, `R`
//! (right associative); `&`; `|`; `->` (right associative). The letters
//! `X U R G F` name operators unless followed by `=` or `!=`.

use super::{Ltl, LtlError};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

struct Lexed {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(text: &str) -> Result<Lexed, LtlError> {
    let mut toks = Vec::new();
    let mut last = (1, 1);
    for (lno, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (l, col) = (lno + 1, i + 1);
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
                toks.push((Tok::Ident(chars[start..i].iter().collect()), l, col));
                continue;
            }
            let next = chars.get(i + 1).copied();
            let (sym, width) = match (c, next) {
                ('-', Some('>')) => ("->", 2),
                ('!', Some('=')) => ("!=", 2),
                ('!', _) => ("!", 1),
                ('&', _) => ("&", 1),
                ('|', _) => ("|", 1),
                ('(', _) => ("(", 1),
                (')', _) => (")", 1),
                ('=', _) => ("=", 1),
                _ => {
                    return Err(LtlError::Syntax {
                        line: l,
                        col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            toks.push((Tok::Sym(sym), l, col));
            i += width;
        }
        last = (lno + 1, chars.len() + 1);
    }
    toks.push((Tok::Eof, last.0, last.1));
    Ok(Lexed { toks })
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn error(&self, message: String) -> LtlError {
        let (_, line, col) = self.toks[self.at];
        LtlError::Syntax { line, col, message }
    }

    fn found(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn bump(&mut self) {
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Whether the next token is the operator letter `op` (and not the
    /// variable of an atom).
    fn at_operator(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == op)
            && !matches!(self.peek2(), Tok::Sym("=") | Tok::Sym("!="))
    }

    fn implication(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication()?;
            return Ok(Ltl::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Ltl, LtlError> {
        let mut lhs = self.conjunction()?;
        while self.eat("|") {
            lhs = Ltl::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Ltl, LtlError> {
        let mut lhs = self.binary()?;
        while self.eat("&") {
            lhs = Ltl::and(lhs, self.binary()?);
        }
        Ok(lhs)
    }

    fn binary(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.unary()?;
        if self.at_operator("U") {
            self.bump();
            return Ok(Ltl::until(lhs, self.binary()?));
        }
        if self.at_operator("R") {
            self.bump();
            return Ok(Ltl::release(lhs, self.binary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ltl, LtlError> {
        if self.eat("!") {
            return Ok(Ltl::not(self.unary()?));
        }
        for (op, build) in [
            ("X", Ltl::next as fn(Ltl) -> Ltl),
            ("G", Ltl::globally),
            ("F", Ltl::finally),
        ] {
            if self.at_operator(op) {
                self.bump();
                return Ok(build(self.unary()?));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ltl, LtlError> {
        if self.eat("(") {
            let f = self.implication()?;
            if !self.eat(")") {
                return Err(self.error(format!("expected `)`, found {}", self.found())));
            }
            return Ok(f);
        }
        let Tok::Ident(name) = self.peek().clone() else {
            return Err(self.error(format!("expected a formula, found {}", self.found())));
        };
        if ["U", "R"].contains(&name.as_str())
            && !matches!(self.peek2(), Tok::Sym("=") | Tok::Sym("!="))
        {
            return Err(self.error(format!("expected a formula, found `{name}`")));
        }
        self.bump();
        match name.as_str() {
            "true" => return Ok(Ltl::True),
            "false" => return Ok(Ltl::False),
            _ => {}
        }
        let negated = if self.eat("=") {
            false
        } else if self.eat("!=") {
            true
        } else {
            return Ok(Ltl::atom(&name, "true"));
        };
        let Tok::Ident(value) = self.peek().clone() else {
            return Err(self.error(format!("expected a value, found {}", self.found())));
        };
        self.bump();
        let atom = Ltl::atom(&name, &value);
        Ok(if negated { Ltl::not(atom) } else { atom })
    }
}

pub fn parse_ltl(text: &str) -> Result<Ltl, LtlError> {
    let Lexed { toks } = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let f = p.implication()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.found())));
    }
    Ok(f)
}
