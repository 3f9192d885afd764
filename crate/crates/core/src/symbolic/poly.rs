//! Sparse multivariate polynomials over ℚ whose monomials may carry a single
//! exponential factor `exp(P)` with `P` an exponential-free polynomial.
//!
//! Exponential factors multiply by adding their arguments, so `exp(P)·exp(-P)`
//! collapses to `1` during multiplication and never needs a rewrite rule.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// A polynomial variable: a declared symbol, or a partial derivative of a
/// free function symbol identified by its multi-index of derivative orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    name: Arc<str>,
    partial: Option<Arc<[u16]>>,
}

impl Atom {
    pub fn symbol(name: &str) -> Self {
        Atom {
            name: Arc::from(name),
            partial: None,
        }
    }

    /// Partial derivative atom. An all-zero multi-index is the bare symbol.
    pub fn partial(name: &str, orders: &[u16]) -> Self {
        if orders.iter().all(|&o| o == 0) {
            return Atom::symbol(name);
        }
        Atom {
            name: Arc::from(name),
            partial: Some(Arc::from(orders)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn orders(&self) -> Option<&[u16]> {
        self.partial.as_deref()
    }

    /// Key used by numeric assignments: the symbol name, or
    /// `diff(name,i,j,...)` with direction indices for partial atoms.
    pub fn key(&self) -> String {
        match &self.partial {
            None => self.name.to_string(),
            Some(orders) => {
                let mut s = format!("diff({}", self.name);
                for (dir, &k) in orders.iter().enumerate() {
                    for _ in 0..k {
                        s.push_str(&format!(",{dir}"));
                    }
                }
                s.push(')');
                s
            }
        }
    }
}

/// Product of atom powers times an optional `exp(P)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    vars: Vec<(Atom, u32)>,
    exp: Option<Arc<Poly>>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn atom(a: Atom, power: u32) -> Self {
        if power == 0 {
            return Monomial::one();
        }
        Monomial {
            vars: vec![(a, power)],
            exp: None,
        }
    }

    pub fn vars(&self) -> &[(Atom, u32)] {
        &self.vars
    }

    pub fn exp_arg(&self) -> Option<&Poly> {
        self.exp.as_deref()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.exp.is_none()
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|(_, k)| k).sum()
    }

    pub fn power_of(&self, a: &Atom) -> u32 {
        self.vars
            .binary_search_by(|(v, _)| v.cmp(a))
            .map(|i| self.vars[i].1)
            .unwrap_or(0)
    }

    pub fn without_exp(&self) -> Monomial {
        Monomial {
            vars: self.vars.clone(),
            exp: None,
        }
    }

    pub(crate) fn with_exp(mut self, arg: Option<Arc<Poly>>) -> Monomial {
        self.exp = arg.filter(|p| !p.is_zero());
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() && j < other.vars.len() {
            match self.vars[i].0.cmp(&other.vars[j].0) {
                Ordering::Less => {
                    vars.push(self.vars[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    vars.push(other.vars[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    vars.push((self.vars[i].0.clone(), self.vars[i].1 + other.vars[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        vars.extend_from_slice(&self.vars[i..]);
        vars.extend_from_slice(&other.vars[j..]);
        let exp = match (&self.exp, &other.exp) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => {
                let sum = a.add(b);
                (!sum.is_zero()).then(|| Arc::new(sum))
            }
        };
        Monomial { vars, exp }
    }

    /// Atom-part divisibility; exponential factors are units and ignored.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.vars.iter().all(|(a, k)| other.power_of(a) >= *k)
    }

    /// `other / self`, assuming `self.divides(other)`. Exponential arguments subtract.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        let vars = other
            .vars
            .iter()
            .filter_map(|(a, k)| {
                let r = k - self.power_of(a);
                (r > 0).then(|| (a.clone(), r))
            })
            .collect();
        let exp = match (&other.exp, &self.exp) {
            (e, None) => e.clone(),
            (None, Some(b)) => Some(Arc::new(b.neg())),
            (Some(a), Some(b)) => {
                let d = a.sub(b);
                (!d.is_zero()).then(|| Arc::new(d))
            }
        };
        Monomial { vars, exp }
    }

    /// Componentwise minimum of atom powers (no exponential part).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let vars = self
            .vars
            .iter()
            .filter_map(|(a, k)| {
                let m = (*k).min(other.power_of(a));
                (m > 0).then(|| (a.clone(), m))
            })
            .collect();
        Monomial { vars, exp: None }
    }
}

fn lex_cmp(a: &[(Atom, u32)], b: &[(Atom, u32)]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.0.cmp(&y.0) {
            // `a` has a positive power of an atom that `b` lacks.
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
            Ordering::Equal => match x.1.cmp(&y.1) {
                Ordering::Equal => {}
                other => return other,
            },
        }
    }
    a.len().cmp(&b.len())
}

/// Sign of `a − b` at the greatest monomial where the exponents differ, a
/// missing exponential counting as `exp(0)`. Unlike a lexicographic
/// comparison of the arguments this respects multiplication by `exp(p)`.
fn exp_cmp(a: Option<&Poly>, b: Option<&Poly>) -> Ordering {
    let empty = BTreeMap::new();
    let ta = a.map_or(&empty, |p| &p.terms);
    let tb = b.map_or(&empty, |p| &p.terms);
    let (mut ia, mut ib) = (ta.iter().rev().peekable(), tb.iter().rev().peekable());
    let zero = Rational::zero();
    loop {
        let (ma, mb) = (ia.peek().map(|t| t.0), ib.peek().map(|t| t.0));
        let (ca, cb) = match (ma, mb) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => (ia.next().unwrap().1, &zero),
            (None, Some(_)) => (&zero, ib.next().unwrap().1),
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Greater => (ia.next().unwrap().1, &zero),
                Ordering::Less => (&zero, ib.next().unwrap().1),
                Ordering::Equal => (ia.next().unwrap().1, ib.next().unwrap().1),
            },
        };
        match ca.cmp(cb) {
            Ordering::Equal => {}
            other => return other,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_cmp(&self.vars, &other.vars).then_with(|| exp_cmp(self.exp.as_deref(), other.exp.as_deref()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Terms are kept in ascending lexicographic monomial order with nonzero
/// coefficients; the leading term is the last entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn integer(n: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Monomial::atom(a, 1), Rational::one())
    }

    /// `exp(arg)`; the argument must itself be exponential-free.
    pub fn exp_of(arg: &Poly) -> Self {
        debug_assert!(!arg.has_exp());
        if arg.is_zero() {
            return Poly::one();
        }
        Poly::term(Monomial::one().with_exp(Some(Arc::new(arg.clone()))), Rational::one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    /// The value if this polynomial is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn has_exp(&self) -> bool {
        self.terms.keys().any(|m| m.exp.is_some())
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        for m in self.terms.keys() {
            out.extend(m.vars.iter().map(|(a, _)| a.clone()));
            if let Some(e) = &m.exp {
                e.collect_atoms(out);
            }
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, k: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (n, c) in &self.terms {
            out.add_term(n.mul(m), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// GCD of the atom parts of all monomials.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.without_exp();
        for m in it {
            if g.vars.is_empty() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Divide every monomial by `m` (atom part must divide each term).
    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(n, c)| (m.div_into(n), c.clone())).collect(),
        }
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.power_of(a)).max().unwrap_or(0)
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.terms.keys().any(|m| m.power_of(a) > 0)
    }

    /// View as a univariate polynomial in `a`: entry `k` holds the
    /// coefficient of `a^k`.
    pub fn coefficients_in(&self, a: &Atom) -> Vec<Poly> {
        let deg = self.degree_in(a) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.power_of(a);
            let rest = Monomial::atom(a.clone(), k).div_into(m);
            out[k as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coefficients(a: &Atom, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (k, p) in coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            out = out.add(&p.mul_monomial(&Monomial::atom(a.clone(), k as u32), &Rational::one()));
        }
        out
    }

    /// Exact division using lexicographic leading terms. `None` when
    /// `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.div_into(m);
            let qc = c / lc;
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Scale so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    /// Map every monomial's exponential factor through `f`, which returns a
    /// replacement polynomial factor.
    pub(crate) fn map_exp(&self, mut f: impl FnMut(Option<&Poly>) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let factor = f(m.exp_arg());
            out = out.add(&factor.mul_monomial(&m.without_exp(), c));
        }
        out
    }

    pub fn leading_sign_negative(&self) -> bool {
        self.leading().is_some_and(|(_, c)| c.is_negative())
    }
}
