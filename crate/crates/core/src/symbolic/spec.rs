use std::collections::BTreeMap;

use super::expr::Expr;
use super::poly::{Atom, Monomial, Poly, Rational};
use super::SymbolicError;

/// How a declared symbol varies along the base directions.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    /// Chart coordinate with the given direction index.
    Coordinate(usize),
    /// Zero derivative in every direction.
    Constant,
    /// Free function of the listed chart directions; its partial
    /// derivatives are fresh atoms `diff(name, ...)`.
    Function { depends_on: Vec<usize> },
    /// Explicit derivative along each base direction.
    Rule(Vec<Expr>),
}

/// Symbol table mapping each symbol to its directional derivatives.
///
/// Chart tables have commuting coordinate directions and may hold free
/// functions. Frame tables describe derivatives along a non-holonomic basis,
/// so only constants and explicit rules are accepted there.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationSpec {
    directions: Vec<String>,
    frame: bool,
    symbols: BTreeMap<String, SymbolKind>,
}

impl DerivationSpec {
    /// Chart table; every direction label is declared as a coordinate.
    pub fn chart(coordinates: &[&str]) -> Self {
        let mut symbols = BTreeMap::new();
        for (i, c) in coordinates.iter().enumerate() {
            symbols.insert(c.to_string(), SymbolKind::Coordinate(i));
        }
        DerivationSpec {
            directions: coordinates.iter().map(|s| s.to_string()).collect(),
            frame: false,
            symbols,
        }
    }

    pub fn frame(basis: &[&str]) -> Self {
        DerivationSpec {
            directions: basis.iter().map(|s| s.to_string()).collect(),
            frame: true,
            symbols: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn is_frame(&self) -> bool {
        self.frame
    }

    pub fn labels(&self) -> &[String] {
        &self.directions
    }

    pub fn direction_index(&self, label: &str) -> Option<usize> {
        self.directions.iter().position(|d| d == label)
    }

    pub fn kind(&self, name: &str) -> Option<&SymbolKind> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&String, &SymbolKind)> {
        self.symbols.iter()
    }

    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<(), SymbolicError> {
        if !is_identifier(name) || name == "exp" || name == "diff" {
            return Err(SymbolicError::InvalidDeclaration(format!(
                "`{name}` is not a valid symbol name"
            )));
        }
        if self.symbols.contains_key(name) {
            return Err(SymbolicError::InvalidDeclaration(format!("`{name}` declared twice")));
        }
        match &kind {
            SymbolKind::Coordinate(i) if self.frame || *i >= self.dim() => {
                return Err(SymbolicError::InvalidDeclaration(format!(
                    "`{name}`: coordinates exist only as chart directions"
                )))
            }
            SymbolKind::Function { depends_on } => {
                if self.frame {
                    return Err(SymbolicError::InvalidDeclaration(format!(
                        "`{name}`: free functions need commuting chart directions"
                    )));
                }
                if depends_on.iter().any(|&d| d >= self.dim()) {
                    return Err(SymbolicError::DirectionOutOfRange(self.dim()));
                }
            }
            SymbolKind::Rule(rules) if rules.len() != self.dim() => {
                return Err(SymbolicError::InvalidDeclaration(format!(
                    "`{name}`: expected {} derivative rules, got {}",
                    self.dim(),
                    rules.len()
                )));
            }
            _ => {}
        }
        self.symbols.insert(name.to_string(), kind);
        Ok(())
    }

    pub fn declare_constant(&mut self, name: &str) -> Result<(), SymbolicError> {
        self.declare(name, SymbolKind::Constant)
    }

    /// Free function of all chart directions.
    pub fn declare_function(&mut self, name: &str) -> Result<(), SymbolicError> {
        let all = (0..self.dim()).collect();
        self.declare(name, SymbolKind::Function { depends_on: all })
    }

    /// Every atom of `e` is declared here, and rule tables only mention
    /// declared symbols.
    pub fn check(&self, e: &Expr) -> Result<(), SymbolicError> {
        for atom in e.atoms() {
            self.check_atom(&atom)?;
        }
        Ok(())
    }

    fn check_atom(&self, atom: &Atom) -> Result<(), SymbolicError> {
        let kind = self
            .symbols
            .get(atom.name())
            .ok_or_else(|| SymbolicError::UndeclaredSymbol(atom.name().to_string()))?;
        if let Some(orders) = atom.orders() {
            match kind {
                SymbolKind::Function { depends_on }
                    if orders.len() == self.dim()
                        && orders
                            .iter()
                            .enumerate()
                            .all(|(d, &k)| k == 0 || depends_on.contains(&d)) => {}
                _ => {
                    return Err(SymbolicError::InvalidDeclaration(format!(
                        "`{}` has no free partial derivatives in those directions",
                        atom.key()
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn atom_derivative(&self, atom: &Atom, dir: usize) -> Result<Expr, SymbolicError> {
        if dir >= self.dim() {
            return Err(SymbolicError::DirectionOutOfRange(self.dim()));
        }
        let kind = self
            .symbols
            .get(atom.name())
            .ok_or_else(|| SymbolicError::UndeclaredSymbol(atom.name().to_string()))?;
        Ok(match kind {
            SymbolKind::Coordinate(i) => {
                if *i == dir {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            SymbolKind::Constant => Expr::zero(),
            SymbolKind::Function { depends_on } => {
                if !depends_on.contains(&dir) {
                    return Ok(Expr::zero());
                }
                let mut orders = atom.orders().map(|o| o.to_vec()).unwrap_or_else(|| vec![0; self.dim()]);
                orders[dir] += 1;
                Expr::atom(Atom::partial(atom.name(), &orders))
            }
            SymbolKind::Rule(rules) => rules[dir].clone(),
        })
    }

    /// Partial derivative of `e` along base direction `dir`.
    pub fn differentiate(&self, e: &Expr, dir: usize) -> Result<Expr, SymbolicError> {
        if dir >= self.dim() {
            return Err(SymbolicError::DirectionOutOfRange(self.dim()));
        }
        let dn = self.diff_poly(e.numerator(), dir)?;
        if e.is_polynomial() {
            return Ok(dn);
        }
        let den = Expr::from_poly(e.denominator().clone());
        let num = Expr::from_poly(e.numerator().clone());
        let dd = self.diff_poly(e.denominator(), dir)?;
        let top = &(&dn * &den) - &(&num * &dd);
        top.checked_div(&(&den * &den))
    }

    fn diff_poly(&self, p: &Poly, dir: usize) -> Result<Expr, SymbolicError> {
        let mut poly_part = Poly::zero();
        let mut rest = Expr::zero();
        let mut cache: BTreeMap<&Atom, Expr> = BTreeMap::new();
        for (m, c) in p.terms() {
            for (a, k) in m.vars() {
                let da = match cache.get(a) {
                    Some(d) => d.clone(),
                    None => {
                        let d = self.atom_derivative(a, dir)?;
                        cache.insert(a, d.clone());
                        d
                    }
                };
                if da.is_zero() {
                    continue;
                }
                let cofactor = Monomial::atom(a.clone(), 1).div_into(m);
                let coeff = c * Rational::from_integer((*k).into());
                if da.is_polynomial() {
                    poly_part = poly_part.add(&da.numerator().mul_monomial(&cofactor, &coeff));
                } else {
                    let term = Expr::from_poly(Poly::term(cofactor, coeff));
                    rest = &rest + &(&term * &da);
                }
            }
            if let Some(arg) = m.exp_arg() {
                let darg = self.diff_poly(arg, dir)?;
                if darg.is_zero() {
                    continue;
                }
                let term = Expr::from_poly(Poly::term(m.clone(), c.clone()));
                let prod = &term * &darg;
                if prod.is_polynomial() {
                    poly_part = poly_part.add(prod.numerator());
                } else {
                    rest = &rest + &prod;
                }
            }
        }
        Ok(&Expr::from_poly(poly_part) + &rest)
    }

    /// True when every directional derivative of `e` vanishes.
    pub fn is_constant(&self, e: &Expr) -> Result<bool, SymbolicError> {
        for d in 0..self.dim() {
            if !self.differentiate(e, d)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
