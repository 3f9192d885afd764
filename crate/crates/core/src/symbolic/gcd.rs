//! Multivariate polynomial GCD over ℚ by recursive primitive remainder
//! sequences. Inputs must be exponential-free; [`cancel_common_factor`] handles the
//! general case by treating each distinct exponential factor as a fresh atom.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{Atom, Monomial, Poly, Rational};

/// Monic GCD of two exponential-free polynomials.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    let (atoms_a, atoms_b) = (a.atoms(), b.atoms());
    // A common factor only involves atoms present in both.
    let Some(var) = atoms_a.intersection(&atoms_b).next().cloned() else {
        return Poly::one();
    };
    if let Some(missing) = atoms_a.symmetric_difference(&atoms_b).next() {
        // Fold the polynomial lacking `missing` into each coefficient of the
        // other; the running gcd stays small.
        let (with, without) = if a.contains(missing) { (a, b) } else { (b, a) };
        let mut acc = without.clone();
        for coeff in with.coefficients_in(missing) {
            if coeff.is_zero() {
                continue;
            }
            acc = gcd(&acc, &coeff);
            if acc.as_constant().is_some() {
                return Poly::one();
            }
        }
        return acc.monic();
    }
    let ca = content(a, &var);
    let cb = content(b, &var);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = primitive_prs(&pa, &pb, &var);
    c.mul(&g).monic()
}

/// GCD of the coefficients of `p` viewed as a polynomial in `var`.
fn content(p: &Poly, var: &Atom) -> Poly {
    let mut acc = Poly::zero();
    for coeff in p.coefficients_in(var) {
        if coeff.is_zero() {
            continue;
        }
        acc = gcd(&acc, &coeff);
        if acc.as_constant().is_some() {
            return Poly::one();
        }
    }
    acc
}

fn primitive_part(p: &Poly, var: &Atom) -> Poly {
    let c = content(p, var);
    integer_primitive(&p.div_exact(&c).expect("content divides"))
}

/// `p` scaled to coprime integer coefficients; keeps remainder sequences
/// from growing their numbers exponentially.
fn integer_primitive(p: &Poly) -> Poly {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    if num.is_zero() {
        return p.clone();
    }
    p.scale(&Rational::new(den, num))
}

fn pseudo_remainder(f: &Poly, g: &Poly, var: &Atom) -> Poly {
    let n = g.degree_in(var);
    let g_coeffs = g.coefficients_in(var);
    let lc_g = g_coeffs[n as usize].clone();
    let mut r = f.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let d = r.degree_in(var);
        if d < n {
            return r;
        }
        let lc_r = r.coefficients_in(var)[d as usize].clone();
        let shift = Monomial::atom(var.clone(), d - n);
        r = r.mul(&lc_g).sub(&g.mul(&lc_r).mul_monomial(&shift, &Rational::one()));
    }
}

fn primitive_prs(a: &Poly, b: &Poly, var: &Atom) -> Poly {
    let (mut f, mut g) = if a.degree_in(var) >= b.degree_in(var) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    loop {
        let r = integer_primitive(&pseudo_remainder(&f, &g, var));
        if r.is_zero() {
            return primitive_part(&g, var);
        }
        if r.degree_in(var) == 0 {
            return Poly::one();
        }
        f = g;
        g = primitive_part(&r, var);
    }
}

/// Replaces each distinct exponential factor by a placeholder atom. The
/// substitution is a ring homomorphism onto the exponential ring, so exact
/// divisions found in the lifted ring remain exact after lowering.
#[derive(Default)]
struct ExpLift {
    table: BTreeMap<Poly, Atom>,
}

impl ExpLift {
    fn lift(&mut self, p: &Poly) -> Poly {
        p.map_exp(|arg| match arg {
            None => Poly::one(),
            Some(arg) => {
                let next = self.table.len();
                let atom = self
                    .table
                    .entry(arg.clone())
                    .or_insert_with(|| Atom::symbol(&format!("\u{1}exp{next}")))
                    .clone();
                Poly::atom(atom)
            }
        })
    }

    fn lower(&self, p: &Poly) -> Poly {
        let back: BTreeMap<&Atom, &Poly> = self.table.iter().map(|(arg, atom)| (atom, arg)).collect();
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let mut factor = Poly::term(Monomial::one(), c.clone());
            for (atom, k) in m.vars() {
                let base = match back.get(atom) {
                    Some(arg) => Poly::exp_of(&arg.scale(&Rational::from_integer((*k).into()))),
                    None => Poly::term(Monomial::atom(atom.clone(), *k), Rational::one()),
                };
                factor = factor.mul(&base);
            }
            out = out.add(&factor);
        }
        out
    }
}

/// Divide `num` and `den` by their common factor. Returns `None` when the
/// factor found is a constant.
pub fn cancel_common_factor(num: &Poly, den: &Poly) -> Option<(Poly, Poly)> {
    if !num.has_exp() && !den.has_exp() {
        let g = gcd(num, den);
        if g.as_constant().is_some() {
            return None;
        }
        return Some((num.div_exact(&g)?, den.div_exact(&g)?));
    }
    let mut lift = ExpLift::default();
    let ln = lift.lift(num);
    let ld = lift.lift(den);
    let g = gcd(&ln, &ld);
    if g.as_constant().is_some() {
        return None;
    }
    let qn = ln.div_exact(&g)?;
    let qd = ld.div_exact(&g)?;
    Some((lift.lower(&qn), lift.lower(&qd)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Poly {
        Poly::atom(Atom::symbol(name))
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        let (x, y) = (v("x"), v("y"));
        let a = x.pow(2).sub(&y.pow(2));
        let b = x
            .pow(2)
            .sub(&x.mul(&y).scale(&Rational::from_integer(2.into())))
            .add(&y.pow(2));
        assert_eq!(gcd(&a, &b), x.sub(&y).monic());
    }

    #[test]
    fn coprime_polynomials_have_unit_gcd() {
        let (x, y) = (v("x"), v("y"));
        assert!(gcd(&x.add(&Poly::one()), &y.add(&Poly::one())).is_one());
    }

    #[test]
    fn gcd_in_three_variables() {
        let (x, y, z) = (v("x"), v("y"), v("z"));
        let common = x.mul(&z).add(&y).add(&Poly::integer(3));
        let a = common.mul(&x.sub(&z));
        let b = common.mul(&y.add(&z.pow(2)));
        assert_eq!(gcd(&a, &b), common.monic());
    }
}
