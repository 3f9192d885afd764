//! Recursive-descent parser for the scalar expression grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! primary := integer | symbol | 'exp' '(' expr ')'
//!          | 'diff' '(' symbol (',' direction)+ ')' | '(' expr ')'
//! ```
//!
//! Exponents must reduce to integer constants. Whitespace is ignored.

use num_bigint::BigInt;

use super::ast::Ast;
use super::expr::Expr;
use super::poly::Rational;
use super::spec::DerivationSpec;
use super::SymbolicError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, SymbolicError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    let mut col = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        let start_col = col;
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                s.push(chars[i].1);
                i += 1;
                col += 1;
            }
            out.push((Tok::Int(s.parse().expect("digits")), start_col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                s.push(chars[i].1);
                i += 1;
                col += 1;
            }
            out.push((Tok::Ident(s), start_col));
            continue;
        }
        if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), start_col));
            i += 1;
            col += 1;
            continue;
        }
        return Err(SymbolicError::Syntax {
            position: start_col,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    spec: Option<&'a DerivationSpec>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SymbolicError> {
        Err(SymbolicError::Syntax {
            position: self.here(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), SymbolicError> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Ast, SymbolicError> {
        let mut items = vec![self.term()?];
        loop {
            if self.eat('+') {
                items.push(self.term()?);
            } else if self.eat('-') {
                items.push(Ast::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one")
        } else {
            Ast::Add(items)
        })
    }

    fn term(&mut self) -> Result<Ast, SymbolicError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = match acc {
                    Ast::Mul(mut v) => {
                        v.push(rhs);
                        Ast::Mul(v)
                    }
                    other => Ast::Mul(vec![other, rhs]),
                };
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = Ast::Div(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Ast, SymbolicError> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, SymbolicError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.here();
        let exponent = self.unary()?;
        let value = exponent
            .to_expr_unchecked()
            .ok()
            .and_then(|e| e.as_rational())
            .filter(Rational::is_integer)
            .and_then(|q| i64::try_from(q.to_integer()).ok());
        match value {
            Some(k) => Ok(Ast::Pow(Box::new(base), k)),
            None => Err(SymbolicError::Syntax {
                position: at,
                message: "exponent must be an integer constant".into(),
            }),
        }
    }

    fn primary(&mut self) -> Result<Ast, SymbolicError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Ast::Num(Rational::from_integer(n)))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "exp" => {
                self.pos += 1;
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Ast::Exp(Box::new(arg)))
            }
            Tok::Ident(name) if name == "diff" => {
                self.pos += 1;
                self.diff_call()
            }
            Tok::Ident(name) => {
                if let Some(spec) = self.spec {
                    if spec.kind(&name).is_none() {
                        return self.err(format!("undeclared symbol `{name}`"));
                    }
                }
                self.pos += 1;
                Ok(Ast::Symbol(name))
            }
            Tok::Op(c) => self.err(format!("unexpected `{c}`")),
        }
    }

    fn diff_call(&mut self) -> Result<Ast, SymbolicError> {
        self.expect('(')?;
        let name = match self.peek().cloned() {
            Some(Tok::Ident(n)) => n,
            _ => return self.err("expected function symbol"),
        };
        self.pos += 1;
        let mut dirs = Vec::new();
        while self.eat(',') {
            let dir = match self.peek().cloned() {
                Some(Tok::Int(n)) => usize::try_from(n).ok(),
                Some(Tok::Ident(label)) => self.spec.and_then(|s| s.direction_index(&label)),
                _ => None,
            };
            match dir {
                Some(d) => {
                    self.pos += 1;
                    dirs.push(d);
                }
                None => return self.err("expected a direction label or index"),
            }
        }
        if dirs.is_empty() {
            return self.err("`diff` needs at least one direction");
        }
        self.expect(')')?;
        Ok(Ast::Partial(name, dirs))
    }
}

/// Parse into an unnormalized tree. With a table, undeclared symbols are
/// rejected at their position and direction labels are resolved.
pub fn parse_ast(text: &str, spec: Option<&DerivationSpec>) -> Result<Ast, SymbolicError> {
    let toks = tokenize(text)?;
    let end = text.chars().count();
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        spec,
    };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(ast)
}

/// Parse and normalize an expression against a symbol table.
pub fn parse_expr(text: &str, spec: &DerivationSpec) -> Result<Expr, SymbolicError> {
    parse_ast(text, Some(spec))?.to_expr(spec)
}

/// Identifiers in `text` that are neither declared nor direction labels,
/// in order of first appearance.
pub fn undeclared_symbols(text: &str, spec: &DerivationSpec) -> Result<Vec<String>, SymbolicError> {
    let mut out: Vec<String> = Vec::new();
    for (tok, _) in tokenize(text)? {
        if let Tok::Ident(name) = tok {
            let known =
                name == "exp" || name == "diff" || spec.kind(&name).is_some() || spec.direction_index(&name).is_some();
            if !known && !out.contains(&name) {
                out.push(name);
            }
        }
    }
    Ok(out)
}
