//! Unnormalized expression trees: what the parser produces, what the printer
//! consumes, and what the numeric oracles evaluate without going through the
//! normal form.

use num_traits::{One, Signed, Zero};

use super::expr::Expr;
use super::poly::{Atom, Monomial, Poly, Rational};
use super::spec::{DerivationSpec, SymbolKind};
use super::SymbolicError;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Rational),
    Symbol(String),
    /// Partial derivative of a free function; one direction index per order.
    Partial(String, Vec<usize>),
    Add(Vec<Ast>),
    Mul(Vec<Ast>),
    Neg(Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
    Exp(Box<Ast>),
}

impl Ast {
    pub fn int(n: i64) -> Ast {
        Ast::Num(Rational::from_integer(n.into()))
    }

    /// Normalize, checking every symbol against `spec`.
    pub fn to_expr(&self, spec: &DerivationSpec) -> Result<Expr, SymbolicError> {
        let e = self.build(Some(spec))?;
        spec.check(&e)?;
        Ok(e)
    }

    /// Normalize without a symbol table; partial atoms take their length
    /// from the largest direction index mentioned.
    pub fn to_expr_unchecked(&self) -> Result<Expr, SymbolicError> {
        self.build(None)
    }

    fn build(&self, spec: Option<&DerivationSpec>) -> Result<Expr, SymbolicError> {
        Ok(match self {
            Ast::Num(q) => Expr::rational(q.clone()),
            Ast::Symbol(s) => {
                if let Some(spec) = spec {
                    if spec.kind(s).is_none() {
                        return Err(SymbolicError::UndeclaredSymbol(s.clone()));
                    }
                }
                Expr::symbol(s)
            }
            Ast::Partial(name, dirs) => {
                let dim = match spec {
                    Some(spec) => {
                        match spec.kind(name) {
                            Some(SymbolKind::Function { .. }) => {}
                            Some(_) => {
                                return Err(SymbolicError::InvalidDeclaration(format!(
                                    "`{name}` is not a free function"
                                )))
                            }
                            None => return Err(SymbolicError::UndeclaredSymbol(name.clone())),
                        }
                        spec.dim()
                    }
                    None => dirs.iter().max().map_or(0, |m| m + 1),
                };
                let mut orders = vec![0u16; dim];
                for &d in dirs {
                    if d >= dim {
                        return Err(SymbolicError::DirectionOutOfRange(dim));
                    }
                    orders[d] += 1;
                }
                Expr::atom(Atom::partial(name, &orders))
            }
            Ast::Add(items) => {
                let mut acc = Expr::zero();
                for it in items {
                    acc = &acc + &it.build(spec)?;
                }
                acc
            }
            Ast::Mul(items) => {
                let mut acc = Expr::one();
                for it in items {
                    acc = &acc * &it.build(spec)?;
                }
                acc
            }
            Ast::Neg(a) => -a.build(spec)?,
            Ast::Div(a, b) => a.build(spec)?.checked_div(&b.build(spec)?)?,
            Ast::Pow(a, k) => a.build(spec)?.pow(*k)?,
            Ast::Exp(a) => Expr::exp(&a.build(spec)?)?,
        })
    }

    pub fn from_expr(e: &Expr) -> Ast {
        let num = poly_ast(e.numerator());
        if e.is_polynomial() {
            num
        } else {
            Ast::Div(Box::new(num), Box::new(poly_ast(e.denominator())))
        }
    }
}

fn poly_ast(p: &Poly) -> Ast {
    let mut terms: Vec<Ast> = p.terms().rev().map(|(m, c)| term_ast(m, c)).collect();
    match terms.len() {
        0 => Ast::int(0),
        1 => terms.pop().expect("one term"),
        _ => Ast::Add(terms),
    }
}

fn term_ast(m: &Monomial, c: &Rational) -> Ast {
    let mut factors = Vec::new();
    let magnitude = c.abs();
    if !magnitude.is_one() || m.is_one() {
        factors.push(Ast::Num(magnitude));
    }
    for (a, k) in m.vars() {
        let base = match a.orders() {
            None => Ast::Symbol(a.name().to_string()),
            Some(orders) => Ast::Partial(
                a.name().to_string(),
                orders
                    .iter()
                    .enumerate()
                    .flat_map(|(d, &n)| std::iter::repeat_n(d, n as usize))
                    .collect(),
            ),
        };
        factors.push(if *k == 1 {
            base
        } else {
            Ast::Pow(Box::new(base), *k as i64)
        });
    }
    if let Some(arg) = m.exp_arg() {
        factors.push(Ast::Exp(Box::new(poly_ast(arg))));
    }
    let body = if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        Ast::Mul(factors)
    };
    if c.is_negative() {
        Ast::Neg(Box::new(body))
    } else {
        body
    }
}

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

fn precedence(a: &Ast) -> u8 {
    match a {
        Ast::Num(q) if q.is_negative() || !q.is_integer() => PREC_MUL,
        Ast::Num(_) | Ast::Symbol(_) | Ast::Partial(..) | Ast::Exp(_) => PREC_ATOM,
        Ast::Add(v) if v.len() > 1 => PREC_ADD,
        Ast::Mul(v) if v.len() > 1 => PREC_MUL,
        Ast::Add(v) | Ast::Mul(v) => v.first().map_or(PREC_ATOM, precedence),
        Ast::Neg(_) | Ast::Div(..) => PREC_MUL,
        Ast::Pow(..) => PREC_POW,
    }
}

/// Render a tree in the input grammar. Partial derivatives use `labels`
/// for direction names when given, otherwise direction indices.
pub fn render(a: &Ast, labels: Option<&[String]>) -> String {
    let mut out = String::new();
    write_ast(a, labels, &mut out);
    out
}

fn write_wrapped(a: &Ast, min: u8, labels: Option<&[String]>, out: &mut String) {
    if precedence(a) < min {
        out.push('(');
        write_ast(a, labels, out);
        out.push(')');
    } else {
        write_ast(a, labels, out);
    }
}

fn write_ast(a: &Ast, labels: Option<&[String]>, out: &mut String) {
    match a {
        Ast::Num(q) => {
            if q.is_integer() {
                out.push_str(&q.numer().to_string());
            } else {
                out.push_str(&format!("{}/{}", q.numer(), q.denom()));
            }
        }
        Ast::Symbol(s) => out.push_str(s),
        Ast::Partial(name, dirs) => {
            out.push_str("diff(");
            out.push_str(name);
            for d in dirs {
                out.push(',');
                match labels.and_then(|l| l.get(*d)) {
                    Some(l) => out.push_str(l),
                    None => out.push_str(&d.to_string()),
                }
            }
            out.push(')');
        }
        Ast::Add(items) => {
            if items.is_empty() {
                out.push('0');
            }
            for (i, it) in items.iter().enumerate() {
                if i == 0 {
                    write_wrapped(it, PREC_ADD, labels, out);
                } else if let Ast::Neg(inner) = it {
                    out.push_str(" - ");
                    write_wrapped(inner, PREC_MUL, labels, out);
                } else {
                    out.push_str(" + ");
                    write_wrapped(it, PREC_MUL, labels, out);
                }
            }
        }
        Ast::Mul(items) => {
            if items.is_empty() {
                out.push('1');
            }
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                // A leading negative factor is fine; later ones need parens.
                let min = if i == 0 { PREC_MUL } else { PREC_POW };
                write_wrapped(it, min, labels, out);
            }
        }
        Ast::Neg(inner) => {
            // `-a*b` parses as `(-a)*b`, which has the same value.
            out.push('-');
            write_wrapped(inner, PREC_MUL, labels, out);
        }
        Ast::Div(n, d) => {
            write_wrapped(n, PREC_MUL, labels, out);
            out.push('/');
            write_wrapped(d, PREC_POW, labels, out);
        }
        Ast::Pow(base, k) => {
            write_wrapped(base, PREC_ATOM, labels, out);
            if *k < 0 {
                out.push_str(&format!("^({k})"));
            } else {
                out.push_str(&format!("^{k}"));
            }
        }
        Ast::Exp(arg) => {
            out.push_str("exp(");
            write_ast(arg, labels, out);
            out.push(')');
        }
    }
}

impl Ast {
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Ast::Num(q) if q.is_zero())
    }
}
