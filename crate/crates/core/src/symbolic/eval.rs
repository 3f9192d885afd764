//! Evaluation oracles. These never feed verdicts; they exist so tests can
//! confirm the exact machinery against independent arithmetic.

use std::collections::BTreeMap;
use std::str::FromStr;

use dashu_float::DBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::ast::Ast;
use super::expr::Expr;
use super::poly::{Atom, Monomial, Poly, Rational};
use super::SymbolicError;

/// Symbol values keyed by [`Atom::key`].
pub type Assignment = BTreeMap<String, Rational>;

pub const DEFAULT_DIGITS: usize = 50;
const GUARD_DIGITS: usize = 20;

#[derive(Clone, Debug)]
enum Value {
    Exact(Rational),
    Approx(DBig),
}

struct Numeric<'a> {
    assignment: &'a Assignment,
    precision: usize,
}

impl Numeric<'_> {
    fn float(&self, q: &Rational) -> DBig {
        let n = DBig::from(to_ibig(q.numer())).with_precision(self.precision).value();
        let d = DBig::from(to_ibig(q.denom())).with_precision(self.precision).value();
        n / d
    }

    fn approx(&self, v: Value) -> DBig {
        match v {
            Value::Exact(q) => self.float(&q),
            Value::Approx(f) => f,
        }
    }

    fn add(&self, a: Value, b: Value) -> Value {
        match (a, b) {
            (Value::Exact(x), Value::Exact(y)) => Value::Exact(x + y),
            (a, b) => Value::Approx(self.approx(a) + self.approx(b)),
        }
    }

    fn mul(&self, a: Value, b: Value) -> Value {
        match (a, b) {
            (Value::Exact(x), Value::Exact(y)) => Value::Exact(x * y),
            (a, b) => Value::Approx(self.approx(a) * self.approx(b)),
        }
    }

    fn div(&self, a: Value, b: Value) -> Result<Value, SymbolicError> {
        match (a, b) {
            (_, Value::Exact(y)) if y.is_zero() => Err(SymbolicError::DivisionByZero),
            (Value::Exact(x), Value::Exact(y)) => Ok(Value::Exact(x / y)),
            (a, b) => {
                let d = self.approx(b);
                if d == DBig::ZERO {
                    return Err(SymbolicError::DivisionByZero);
                }
                Ok(Value::Approx(self.approx(a) / d))
            }
        }
    }

    fn pow(&self, a: Value, k: i64) -> Result<Value, SymbolicError> {
        if k < 0 {
            let inv = self.div(Value::Exact(Rational::one()), a)?;
            return self.pow(inv, -k);
        }
        let mut acc = Value::Exact(Rational::one());
        for _ in 0..k {
            acc = self.mul(acc, a.clone());
        }
        Ok(acc)
    }

    fn exp(&self, a: Value) -> Value {
        match a {
            Value::Exact(q) if q.is_zero() => Value::Exact(Rational::one()),
            other => Value::Approx(self.approx(other).exp()),
        }
    }

    fn lookup(&self, key: &str) -> Result<Value, SymbolicError> {
        self.assignment
            .get(key)
            .cloned()
            .map(Value::Exact)
            .ok_or_else(|| SymbolicError::MissingAssignment(key.to_string()))
    }

    fn eval(&self, a: &Ast) -> Result<Value, SymbolicError> {
        Ok(match a {
            Ast::Num(q) => Value::Exact(q.clone()),
            Ast::Symbol(s) => self.lookup(s)?,
            Ast::Partial(name, dirs) => {
                let dim = dirs.iter().max().map_or(0, |m| m + 1);
                let mut orders = vec![0u16; dim];
                for &d in dirs {
                    orders[d] += 1;
                }
                self.lookup(&Atom::partial(name, &orders).key())?
            }
            Ast::Add(items) => {
                let mut acc = Value::Exact(Rational::zero());
                for it in items {
                    acc = self.add(acc, self.eval(it)?);
                }
                acc
            }
            Ast::Mul(items) => {
                let mut acc = Value::Exact(Rational::one());
                for it in items {
                    acc = self.mul(acc, self.eval(it)?);
                }
                acc
            }
            Ast::Neg(x) => self.mul(Value::Exact(-Rational::one()), self.eval(x)?),
            Ast::Div(x, y) => self.div(self.eval(x)?, self.eval(y)?)?,
            Ast::Pow(x, k) => self.pow(self.eval(x)?, *k)?,
            Ast::Exp(x) => self.exp(self.eval(x)?),
        })
    }
}

fn to_ibig(n: &BigInt) -> IBig {
    IBig::from_str(&n.to_string()).expect("decimal integer")
}

/// Evaluate a tree to `digits` significant digits. Rational subexpressions
/// are computed exactly; exponentials use a high-precision `exp`.
pub fn evaluate_ast(a: &Ast, assignment: &Assignment, digits: usize) -> Result<DBig, SymbolicError> {
    let n = Numeric {
        assignment,
        precision: digits + GUARD_DIGITS,
    };
    let v = n.eval(a)?;
    Ok(n.approx(v).with_precision(digits).value())
}

/// Numeric value of an expression in normal form.
pub fn evaluate_numeric(e: &Expr, assignment: &Assignment, digits: usize) -> Result<DBig, SymbolicError> {
    evaluate_ast(&Ast::from_expr(e), assignment, digits)
}

/// Exact value when the expression contains no exponential factor.
pub fn evaluate_exact(e: &Expr, assignment: &Assignment) -> Result<Option<Rational>, SymbolicError> {
    let n = Numeric {
        assignment,
        precision: DEFAULT_DIGITS,
    };
    Ok(match n.eval(&Ast::from_expr(e))? {
        Value::Exact(q) => Some(q),
        Value::Approx(_) => None,
    })
}

pub fn to_f64(x: &DBig) -> f64 {
    x.to_f64().value()
}

/// Exact evaluation at pseudo-random rational points where each monomial
/// `m` inside an exponential argument is sent to an independent integer
/// base `t_m`, so `exp(Σ c_m m) ↦ Π t_m^(L·c_m)` with `L` clearing every
/// coefficient denominator. This is a ring homomorphism on the expression
/// class and respects exactly the relations `exp(a)·exp(b) = exp(a+b)`.
pub struct SurrogateEvaluator {
    rng: StdRng,
    atoms: BTreeMap<Atom, Rational>,
    bases: BTreeMap<Monomial, BigInt>,
}

impl SurrogateEvaluator {
    pub fn new(seed: u64) -> Self {
        SurrogateEvaluator {
            rng: StdRng::seed_from_u64(seed),
            atoms: BTreeMap::new(),
            bases: BTreeMap::new(),
        }
    }

    /// Draw fresh values for every atom and exponential base.
    pub fn resample(&mut self) {
        self.atoms.clear();
        self.bases.clear();
    }

    fn atom_value(&mut self, a: &Atom) -> Rational {
        if let Some(v) = self.atoms.get(a) {
            return v.clone();
        }
        let n: i64 = self.rng.random_range(-60..=60);
        let d: i64 = self.rng.random_range(1..=17);
        let v = Rational::new(n.into(), d.into());
        self.atoms.insert(a.clone(), v.clone());
        v
    }

    fn base(&mut self, m: &Monomial) -> BigInt {
        if let Some(b) = self.bases.get(m) {
            return b.clone();
        }
        let b = BigInt::from(self.rng.random_range(2..=9i64));
        self.bases.insert(m.clone(), b.clone());
        b
    }

    fn exp_value(&mut self, arg: &Poly, scale: &BigInt) -> Rational {
        let mut acc = Rational::one();
        for (m, c) in arg.terms() {
            let e = (c * Rational::from_integer(scale.clone())).to_integer();
            let b = Rational::from_integer(self.base(m));
            let k = e.abs().to_u32().expect("small exponent");
            let p = num_traits::pow(b, k as usize);
            acc *= if e.is_negative() { p.recip() } else { p };
        }
        acc
    }

    fn poly_value(&mut self, p: &Poly, scale: &BigInt) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in p.terms() {
            let mut v = c.clone();
            for (a, k) in m.vars() {
                v *= num_traits::pow(self.atom_value(a), *k as usize);
            }
            if let Some(arg) = m.exp_arg() {
                v *= self.exp_value(arg, scale);
            }
            total += v;
        }
        total
    }

    /// `None` when the denominator vanishes at the sampled point.
    pub fn evaluate(&mut self, e: &Expr) -> Option<Rational> {
        let scale = exp_scale(e);
        let den = self.poly_value(e.denominator(), &scale);
        if den.is_zero() {
            return None;
        }
        Some(self.poly_value(e.numerator(), &scale) / den)
    }
}

fn exp_scale(e: &Expr) -> BigInt {
    let mut l = BigInt::one();
    for p in [e.numerator(), e.denominator()] {
        for (m, _) in p.terms() {
            if let Some(arg) = m.exp_arg() {
                for (_, c) in arg.terms() {
                    l = l.lcm(c.denom());
                }
            }
        }
    }
    l
}

/// Independent zero test: true iff `samples` surrogate evaluations all vanish.
pub fn cross_check_zero(e: &Expr, samples: usize, seed: u64) -> bool {
    let mut ev = SurrogateEvaluator::new(seed);
    let mut taken = 0;
    let mut attempts = 0;
    while taken < samples && attempts < samples * 10 {
        attempts += 1;
        ev.resample();
        if let Some(v) = ev.evaluate(e) {
            taken += 1;
            if !v.is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{parse_expr, DerivationSpec};

    fn spec() -> DerivationSpec {
        let mut s = DerivationSpec::chart(&["x", "y", "z"]);
        s.declare_constant("u").unwrap();
        s
    }

    fn at(pairs: &[(&str, i64)]) -> Assignment {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Rational::from_integer((*v).into())))
            .collect()
    }

    #[test]
    fn scalar_curvature_values() {
        let s = spec();
        let r2 = parse_expr("-18*z^4", &s).unwrap();
        let v = evaluate_numeric(&r2, &at(&[("z", 1)]), DEFAULT_DIGITS).unwrap();
        assert_eq!(v, DBig::from(-18));
        let r1 = parse_expr("-2*(2*u+1)", &s).unwrap();
        let v = evaluate_numeric(&r1, &at(&[("u", 0)]), DEFAULT_DIGITS).unwrap();
        assert_eq!(v, DBig::from(-2));
    }

    #[test]
    fn exponential_at_origin_is_one() {
        let e = parse_expr("exp(2*z^3)", &spec()).unwrap();
        let v = evaluate_numeric(&e, &at(&[("z", 0)]), DEFAULT_DIGITS).unwrap();
        assert_eq!(v, DBig::from(1));
    }

    #[test]
    fn exponential_matches_known_digits() {
        let e = parse_expr("exp(z)", &spec()).unwrap();
        let v = evaluate_numeric(&e, &at(&[("z", 1)]), 40).unwrap();
        assert!(v.to_string().starts_with("2.71828182845904523536028747135266249775"));
    }

    #[test]
    fn missing_assignment_and_division_by_zero() {
        let s = spec();
        let e = parse_expr("x + y", &s).unwrap();
        assert!(matches!(
            evaluate_numeric(&e, &at(&[("x", 1)]), 20),
            Err(SymbolicError::MissingAssignment(k)) if k == "y"
        ));
        let q = parse_expr("1/(x - 1)", &s).unwrap();
        assert!(matches!(
            evaluate_numeric(&q, &at(&[("x", 1)]), 20),
            Err(SymbolicError::DivisionByZero)
        ));
    }

    #[test]
    fn surrogate_respects_inverse_pairs_only() {
        let s = spec();
        let pair = parse_expr("exp(2*z^3)*exp(-2*z^3) - 1", &s).unwrap();
        assert!(cross_check_zero(&pair, 10, 7));
        let other = parse_expr("exp(2*z^3) - exp(z^3)^2", &s).unwrap();
        assert!(cross_check_zero(&other, 10, 7));
        let distinct = parse_expr("exp(2*z^3) - exp(3*z^3)", &s).unwrap();
        assert!(!cross_check_zero(&distinct, 10, 7));
    }
}
