use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::gcd::{cancel_common_factor, gcd};
use super::poly::{Atom, Poly, Rational};
use super::SymbolicError;

/// Exact scalar function in normal form: a reduced quotient of polynomials
/// whose denominator is monic with an exponential-free leading term.
/// Polynomial expressions carry the denominator `1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::from_poly(Poly::integer(n))
    }

    pub fn rational(q: Rational) -> Self {
        Expr::from_poly(Poly::constant(q))
    }

    /// `n / d` for small integers; `d` must be nonzero.
    pub fn ratio(n: i64, d: i64) -> Self {
        Expr::rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn symbol(name: &str) -> Self {
        Expr::from_poly(Poly::atom(Atom::symbol(name)))
    }

    pub fn atom(a: Atom) -> Self {
        Expr::from_poly(Poly::atom(a))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Build `num / den` and bring it to normal form.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, SymbolicError> {
        if den.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        Ok(normalize(num, den))
    }

    /// `exp(arg)`; the argument must be a polynomial without exponentials.
    pub fn exp(arg: &Expr) -> Result<Self, SymbolicError> {
        if !arg.is_polynomial() || arg.num.has_exp() {
            return Err(SymbolicError::NonPolynomialExponent(arg.to_string()));
        }
        Ok(Expr::from_poly(Poly::exp_of(&arg.num)))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    fn exp_free(&self) -> bool {
        !self.num.has_exp() && !self.den.has_exp()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.num.collect_atoms(&mut out);
        self.den.collect_atoms(&mut out);
        out
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, SymbolicError> {
        if other.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        if let Some(c) = other.as_rational() {
            return Ok(self.scale(&c.recip()));
        }
        Expr::from_parts(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn recip(&self) -> Result<Expr, SymbolicError> {
        Expr::one().checked_div(self)
    }

    pub fn pow(&self, k: i64) -> Result<Expr, SymbolicError> {
        if k >= 0 {
            let k = k as u32;
            return Ok(Expr {
                num: self.num.pow(k),
                den: self.den.pow(k),
            });
        }
        self.recip()?.pow(-k)
    }

    pub fn scale(&self, k: &Rational) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Rational multiple `self * n / d`.
    pub fn times(&self, n: i64, d: i64) -> Expr {
        self.scale(&Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Canonical text in the input grammar; `labels` names the directions
    /// of partial-derivative atoms.
    pub fn render(&self, labels: Option<&[String]>) -> String {
        super::ast::render(&super::ast::Ast::from_expr(self), labels)
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Expr>) -> Expr {
        items.into_iter().fold(Expr::zero(), |acc, e| &acc + e)
    }
}

fn normalize(mut num: Poly, mut den: Poly) -> Expr {
    if num.is_zero() {
        return Expr::zero();
    }
    if den.is_one() {
        return Expr { num, den };
    }
    if let Some(c) = den.as_constant() {
        return Expr {
            num: num.scale(&c.recip()),
            den: Poly::one(),
        };
    }
    for _ in 0..2 {
        strip_leading_exp(&mut num, &mut den);
        let common = num.monomial_content().gcd(&den.monomial_content());
        if !common.is_one() {
            num = num.div_monomial(&common);
            den = den.div_monomial(&common);
        }
        if den.len() <= 1 {
            break;
        }
        match cancel_common_factor(&num, &den) {
            Some((n, d)) => {
                num = n;
                den = d;
            }
            None => break,
        }
    }
    strip_leading_exp(&mut num, &mut den);
    let lc = den.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::one);
    if !lc.is_one() {
        let inv = lc.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    Expr { num, den }
}

fn quo(p: &Poly, g: &Poly) -> Poly {
    p.div_exact(g).expect("gcd divides")
}

/// Final scaling of an already reduced exponential-free quotient.
fn monic_den(num: Poly, den: Poly) -> Expr {
    let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
    if lc.is_one() {
        return Expr { num, den };
    }
    let inv = lc.recip();
    Expr {
        num: num.scale(&inv),
        den: den.scale(&inv),
    }
}

fn strip_leading_exp(num: &mut Poly, den: &mut Poly) {
    let shift = match den.leading().and_then(|(m, _)| m.exp_arg()) {
        Some(arg) => Poly::exp_of(&arg.neg()),
        None => return,
    };
    *num = num.mul(&shift);
    *den = den.mul(&shift);
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(self.num.add(&rhs.num));
        }
        if self.den == rhs.den {
            return normalize(self.num.add(&rhs.num), self.den.clone());
        }
        if self.exp_free() && rhs.exp_free() {
            // Only the common part of the denominators can cancel.
            let g = gcd(&self.den, &rhs.den);
            let (b, d) = (quo(&self.den, &g), quo(&rhs.den, &g));
            let t = self.num.mul(&d).add(&rhs.num.mul(&b));
            if t.is_zero() {
                return Expr::zero();
            }
            let g2 = gcd(&t, &g);
            return monic_den(quo(&t, &g2), b.mul(&quo(&rhs.den, &g2)));
        }
        normalize(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(self.num.mul(&rhs.num));
        }
        if self.exp_free() && rhs.exp_free() {
            let g1 = gcd(&self.num, &rhs.den);
            let g2 = gcd(&rhs.num, &self.den);
            return monic_den(
                quo(&self.num, &g1).mul(&quo(&rhs.num, &g2)),
                quo(&self.den, &g2).mul(&quo(&rhs.den, &g1)),
            );
        }
        normalize(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::rational(q)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// Sign of a constant expression, `None` when not a rational constant.
pub fn constant_sign(e: &Expr) -> Option<std::cmp::Ordering> {
    let q = e.as_rational()?;
    Some(if q.is_zero() {
        std::cmp::Ordering::Equal
    } else if q.is_positive() {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Less
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{parse_expr, DerivationSpec};

    fn x() -> Expr {
        Expr::symbol("x")
    }
    fn y() -> Expr {
        Expr::symbol("y")
    }

    #[test]
    fn quotient_cancels_common_factor() {
        let num = &(&x() * &x()) - &(&y() * &y());
        let q = num.checked_div(&(&x() - &y())).unwrap();
        assert_eq!(q, &x() + &y());
        assert!(q.is_polynomial());
    }

    #[test]
    fn monomial_denominator_is_reduced() {
        let q = (&x() * &y()).checked_div(&(&x() * &x()).times(2, 1)).unwrap();
        assert_eq!(q.denominator(), Expr::symbol("x").numerator());
        assert_eq!(q.numerator(), y().times(1, 2).numerator());
    }

    #[test]
    fn sums_of_fractions_reduce_to_unique_form() {
        // 1/(x-1) - 1/(x+1) == 2/(x^2-1)
        let one = Expr::one();
        let a = one.checked_div(&(&x() - &one)).unwrap();
        let b = one.checked_div(&(&x() + &one)).unwrap();
        let lhs = &a - &b;
        let rhs = Expr::int(2).checked_div(&(&(&x() * &x()) - &one)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(
            x().checked_div(&Expr::zero()),
            Err(SymbolicError::DivisionByZero)
        ));
    }

    #[test]
    fn exponential_unit_factor_is_canonical() {
        let s = DerivationSpec::chart(&["z"]);
        let a = parse_expr("exp(-1)/(exp(1) + exp(-1) - 2)", &s).unwrap();
        let b = parse_expr("1/(exp(2) - 2*exp(1) + 1)", &s).unwrap();
        assert_eq!(a, b);
        let c = parse_expr("exp(z)/(exp(2*z) + 1)", &s).unwrap();
        let d = parse_expr("1/(exp(z) + exp(-z))", &s).unwrap();
        assert_eq!(c, d);
        assert!(c.denominator().leading().unwrap().0.exp_arg().is_none());
    }

    #[test]
    fn exponential_denominators_are_inverted() {
        let arg = (&x() * &x()).times(2, 1);
        let e = Expr::exp(&arg).unwrap();
        let inv = e.recip().unwrap();
        assert!(inv.is_polynomial());
        assert_eq!(inv, Expr::exp(&-&arg).unwrap());
        assert!((&e * &inv).is_one());
    }
}
