//! Sparse multivariate polynomials with exact complex-rational coefficients,
//! and dense matrices of them.
//!
//! The variable set is fixed: `E, px, py, pz, m, c, pt`. Monomials are
//! exponent tuples in that order and terms are kept in a `BTreeMap`, so the
//! canonical form (sorted, no zero coefficients) falls out of the container
//! and equality is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::QComplex;

pub const NUM_VARS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    E,
    Px,
    Py,
    Pz,
    M,
    C,
    Pt,
}

impl Var {
    pub const ALL: [Var; NUM_VARS] = [Var::E, Var::Px, Var::Py, Var::Pz, Var::M, Var::C, Var::Pt];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::E => "E",
            Var::Px => "px",
            Var::Py => "py",
            Var::Pz => "pz",
            Var::M => "m",
            Var::C => "c",
            Var::Pt => "pt",
        }
    }
}

/// Exponent tuple over [`Var::ALL`]. The derived ordering is lexicographic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub [u16; NUM_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NUM_VARS];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }
}

/// A point at which every variable takes an exact rational value.
pub type Point = [BigRational; NUM_VARS];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, QComplex>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(QComplex::one())
    }

    pub fn constant(c: QComplex) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(v: i64) -> Self {
        Self::constant(QComplex::from(v))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(v), QComplex::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, QComplex)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: QComplex) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QComplex)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> QComplex {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The constant term when the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<QComplex> {
        match self.terms.len() {
            0 => Some(QComplex::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.0[v.index()] > 0)
    }

    pub fn scale(&self, s: &QComplex) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    /// Complex conjugation with every variable treated as real.
    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, point: &Point) -> QComplex {
        let mut total = QComplex::zero();
        for (m, c) in &self.terms {
            let mut value = BigRational::one();
            for (x, &e) in point.iter().zip(m.0.iter()) {
                for _ in 0..e {
                    value *= x;
                }
            }
            total += &(c * &QComplex::real(value));
        }
        total
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = Var::ALL
                .iter()
                .zip(m.0.iter())
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        v.name().to_string()
                    } else {
                        format!("{}^{}", v.name(), e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", c, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Dense row-major matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Poly::one() } else { Poly::zero() })
    }

    pub fn scalar(n: usize, p: &Poly) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { p.clone() } else { Poly::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Constant matrix from Gaussian-integer entries `(re, im)`.
    pub fn from_gaussian(rows: &[&[(i64, i64)]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix literal");
        Self::from_fn(r, c, |i, j| {
            let (re, im) = rows[i][j];
            Poly::constant(QComplex::int(re, im))
        })
    }

    pub fn column(entries: &[Poly]) -> Self {
        Self::from_fn(entries.len(), 1, |i, _| entries[i].clone())
    }

    pub fn row(entries: &[Poly]) -> Self {
        Self::from_fn(1, entries.len(), |_, j| entries[j].clone())
    }

    /// Assembles `[[a, b], [c, d]]` from square blocks of equal size.
    pub fn block2(a: &PolyMatrix, b: &PolyMatrix, c: &PolyMatrix, d: &PolyMatrix) -> Self {
        let n = a.rows;
        for blk in [a, b, c, d] {
            assert!(blk.rows == n && blk.cols == n, "blocks must be square and equal size");
        }
        Self::from_fn(2 * n, 2 * n, |i, j| {
            let blk = match (i < n, j < n) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk.get(i % n, j % n).clone()
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn term_count(&self) -> usize {
        self.entries.iter().map(Poly::term_count).sum()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.entries.iter().any(|p| p.contains_var(v))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &Poly) -> Self {
        self.map(|p| p * s)
    }

    pub fn conj(&self) -> Self {
        self.map(Poly::conj)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn eval(&self, point: &Point) -> Vec<QComplex> {
        self.entries.iter().map(|p| p.eval(point)).collect()
    }

    fn zip_with(&self, rhs: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl<'a> Add<&'a PolyMatrix> for &'a PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a PolyMatrix> for &'a PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a PolyMatrix> for &'a PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        PolyMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = Poly::zero();
            for l in 0..self.cols {
                let a = self.get(i, l);
                let b = rhs.get(l, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }
}

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        self.map(|p| -p)
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn px() -> Poly {
        Poly::var(Var::Px)
    }
    fn py() -> Poly {
        Poly::var(Var::Py)
    }

    #[test]
    fn difference_of_squares() {
        let lhs = &(&px() + &py()) * &(&px() - &py());
        let rhs = &px().pow(2) - &py().pow(2);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.term_count(), 2);
    }

    #[test]
    fn expansion_cancels_to_zero() {
        // (E - c pz)(E + c pz) + c^2 pz^2 - E^2
        let e = Poly::var(Var::E);
        let cpz = &Poly::var(Var::C) * &Poly::var(Var::Pz);
        let expr = &(&(&(&e - &cpz) * &(&e + &cpz)) + &cpz.pow(2)) - &e.pow(2);
        assert!(expr.is_zero());
    }

    #[test]
    fn no_zero_coefficients_are_stored() {
        let p = &(&px() + &Poly::int(3)) - &px();
        assert_eq!(p.term_count(), 1);
        assert_eq!(p.as_constant(), Some(QComplex::from(3)));
    }

    #[test]
    fn identity_is_neutral() {
        let a = PolyMatrix::from_fn(3, 3, |i, j| {
            Poly::from_terms([(
                Monomial::var(Var::ALL[(i + j) % NUM_VARS]),
                QComplex::int(i as i64, j as i64 + 1),
            )])
        });
        let id = PolyMatrix::identity(3);
        assert!((&(&a * &id) - &a).is_zero());
        assert!((&(&id * &a) - &a).is_zero());
    }

    #[test]
    fn display_is_readable() {
        let p = &(&px().pow(2) - &Poly::var(Var::E)) + &Poly::constant(QComplex::i());
        assert_eq!(p.to_string(), "-1*E + px^2 + i");
    }
}
