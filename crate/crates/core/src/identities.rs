//! The decomposition identities, stated as exact polynomial-matrix equations.
//!
//! Each [`Identity`] is a list of equations `sum(lhs) = sum(rhs)` whose sides
//! are sums of matrix products. Verification expands `lhs - rhs` in the
//! polynomial ring and requires the zero matrix. A second route evaluates
//! every factor at rational points first and multiplies numbers, which must
//! agree with the symbolic result.
//!
//! Factors of `1/c` are cleared by multiplying an identity through by `c^2`,
//! and the Dirac massless system uses a separate variable `pt` standing for
//! `E/c`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::QComplex;
use crate::poly::{Point, Poly, PolyMatrix, Var};
use crate::spin::{check_spin_algebra, pauli_triple, spin1_cartesian, SpinTriple};

/// A scalar polynomial coefficient times an ordered product of matrices.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: Poly,
    pub factors: Vec<PolyMatrix>,
}

impl Term {
    pub fn product(factors: Vec<PolyMatrix>) -> Self {
        Self {
            coeff: Poly::one(),
            factors,
        }
    }

    pub fn scaled(coeff: Poly, factors: Vec<PolyMatrix>) -> Self {
        Self { coeff, factors }
    }

    pub fn single(m: PolyMatrix) -> Self {
        Self::product(vec![m])
    }

    fn expand(&self) -> PolyMatrix {
        let mut it = self.factors.iter();
        let first = it.next().expect("term has at least one factor").clone();
        it.fold(first, |acc, f| &acc * f).scale(&self.coeff)
    }

    fn evaluate(&self, point: &Point) -> NumMatrix {
        let mut it = self.factors.iter().map(|f| NumMatrix::eval(f, point));
        let first = it.next().expect("term has at least one factor");
        let coeff = self.coeff.eval(point);
        let prod = it.fold(first, |acc, f| acc.mul(&f));
        prod.scale(&coeff)
    }
}

#[derive(Clone, Debug)]
pub struct Equation {
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
}

impl Equation {
    pub fn new(lhs: Vec<Term>, rhs: Vec<Term>) -> Self {
        Self { lhs, rhs }
    }

    fn sum(terms: &[Term]) -> PolyMatrix {
        let mut it = terms.iter().map(Term::expand);
        let first = it.next().expect("side has at least one term");
        it.fold(first, |acc, t| &acc + &t)
    }

    pub fn lhs_expanded(&self) -> PolyMatrix {
        Self::sum(&self.lhs)
    }

    pub fn rhs_expanded(&self) -> PolyMatrix {
        Self::sum(&self.rhs)
    }

    pub fn residual(&self) -> PolyMatrix {
        &self.lhs_expanded() - &self.rhs_expanded()
    }

    /// Evaluate-then-multiply route at one point; true when both sides agree.
    pub fn holds_at(&self, point: &Point) -> bool {
        let side = |terms: &[Term]| {
            let mut it = terms.iter().map(|t| t.evaluate(point));
            let first = it.next().expect("side has at least one term");
            it.fold(first, |acc, t| acc.add(&t))
        };
        side(&self.lhs) == side(&self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct Identity {
    pub name: &'static str,
    pub summary: &'static str,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: &'static str,
    pub summary: &'static str,
    pub residual_is_zero: bool,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub residual_terms: usize,
}

impl Identity {
    pub fn verify(&self) -> IdentityReport {
        let mut lhs_terms = 0;
        let mut rhs_terms = 0;
        let mut residual_terms = 0;
        for eq in &self.equations {
            let l = eq.lhs_expanded();
            let r = eq.rhs_expanded();
            lhs_terms += l.term_count();
            rhs_terms += r.term_count();
            residual_terms += (&l - &r).term_count();
        }
        IdentityReport {
            name: self.name,
            summary: self.summary,
            residual_is_zero: residual_terms == 0,
            lhs_terms,
            rhs_terms,
            residual_terms,
        }
    }

    /// Checks every equation at `count` random rational points. Returns the
    /// index of the first failing point.
    pub fn check_numeric(&self, count: usize, seed: u64) -> std::result::Result<(), usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 0..count {
            let point = random_point(&mut rng);
            if !self.equations.iter().all(|eq| eq.holds_at(&point)) {
                return Err(n);
            }
        }
        Ok(())
    }
}

pub fn random_point(rng: &mut impl Rng) -> Point {
    std::array::from_fn(|_| {
        let num: i64 = rng.gen_range(-40..=40);
        let den: i64 = rng.gen_range(1..=17);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    })
}

/// Builds a point from `(variable, num, den)` assignments; unset variables
/// are zero.
pub fn point(values: &[(Var, i64, i64)]) -> Point {
    let mut p: Point = std::array::from_fn(|_| BigRational::zero());
    for &(v, num, den) in values {
        p[v.index()] = BigRational::new(BigInt::from(num), BigInt::from(den));
    }
    p
}

/// Dense exact numeric matrix used by the evaluate-first route.
#[derive(Clone, Debug, PartialEq, Eq)]
struct NumMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QComplex>,
}

impl NumMatrix {
    fn eval(m: &PolyMatrix, point: &Point) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.eval(point),
        }
    }

    fn mul(&self, rhs: &NumMatrix) -> NumMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut data = vec![QComplex::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = QComplex::zero();
                for l in 0..self.cols {
                    acc += &(&self.data[i * self.cols + l] * &rhs.data[l * rhs.cols + j]);
                }
                data[i * rhs.cols + j] = acc;
            }
        }
        NumMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        }
    }

    fn add(&self, rhs: &NumMatrix) -> NumMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        NumMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    fn scale(&self, s: &QComplex) -> NumMatrix {
        NumMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }
}

fn v(var: Var) -> Poly {
    Poly::var(var)
}

fn momentum() -> [Poly; 3] {
    [v(Var::Px), v(Var::Py), v(Var::Pz)]
}

/// `p . M` for a triple of constant matrices.
pub fn dot_momentum(mats: &[PolyMatrix; 3]) -> PolyMatrix {
    let p = momentum();
    let mut acc = mats[0].scale(&p[0]);
    acc = &acc + &mats[1].scale(&p[1]);
    &acc + &mats[2].scale(&p[2])
}

/// `px^2 + py^2 + pz^2`
pub fn momentum_squared() -> Poly {
    momentum().iter().fold(Poly::zero(), |acc, p| &acc + &p.pow(2))
}

/// The outer product `p p^T` written out entry by entry.
pub fn outer_product_matrix() -> PolyMatrix {
    let p = momentum();
    PolyMatrix::from_fn(3, 3, |i, j| &p[i] * &p[j])
}

fn exact_matrices(t: &SpinTriple) -> [PolyMatrix; 3] {
    t.exact_matrices().expect("hand-written triples are exact").clone()
}

fn c_poly() -> Poly {
    v(Var::C)
}

/// `(E I - c p.S)` and `(E I + c p.S)` for the Cartesian spin-1 matrices,
/// i.e. the photon factors multiplied by `c`.
fn photon_factors() -> (PolyMatrix, PolyMatrix) {
    let s = exact_matrices(&spin1_cartesian());
    let e_i = PolyMatrix::scalar(3, &v(Var::E));
    let cps = dot_momentum(&s).scale(&c_poly());
    (&e_i - &cps, &e_i + &cps)
}

fn massless_shell_3() -> PolyMatrix {
    let c2 = c_poly().pow(2);
    PolyMatrix::scalar(3, &(&v(Var::E).pow(2) - &(&c2 * &momentum_squared())))
}

pub fn dirac_decomposition() -> Identity {
    let sigma = exact_matrices(&pauli_triple());
    let c = c_poly();
    let mc2 = &v(Var::M) * &c.pow(2);
    let cps = dot_momentum(&sigma).scale(&c);
    let mass = PolyMatrix::scalar(2, &mc2);
    let block = PolyMatrix::block2(&mass, &cps, &cps, &(-&mass));
    let e_i = PolyMatrix::scalar(4, &v(Var::E));
    let shell = &(&v(Var::E).pow(2) - &(&c.pow(2) * &momentum_squared())) - &(&v(Var::M).pow(2) * &c.pow(4));
    Identity {
        name: "dirac-decomposition",
        summary: "[E I4 + H][E I4 - H] = (E^2 - c^2 p^2 - m^2 c^4) I4 with Pauli blocks",
        equations: vec![Equation::new(
            vec![Term::product(vec![&e_i + &block, &e_i - &block])],
            vec![Term::single(PolyMatrix::scalar(4, &shell))],
        )],
    }
}

pub fn neutrino_decomposition() -> Identity {
    let sigma = exact_matrices(&pauli_triple());
    let c = c_poly();
    let cps = dot_momentum(&sigma).scale(&c);
    let e_i = PolyMatrix::scalar(2, &v(Var::E));
    let shell = &v(Var::E).pow(2) - &(&c.pow(2) * &momentum_squared());
    Identity {
        name: "neutrino-decomposition",
        summary: "[E I2 - c p.sigma][E I2 + c p.sigma] = (E^2 - c^2 p^2) I2",
        equations: vec![Equation::new(
            vec![Term::product(vec![&e_i - &cps, &e_i + &cps])],
            vec![Term::single(PolyMatrix::scalar(2, &shell))],
        )],
    }
}

pub fn photon_decomposition() -> Identity {
    let (minus, plus) = photon_factors();
    let p = momentum();
    let neg_c2 = -&c_poly().pow(2);
    Identity {
        name: "photon-decomposition",
        summary: "(E I - c p.S)(E I + c p.S) - c^2 p p^T = (E^2 - c^2 p^2) I3, and p p^T = column(p) row(p)",
        equations: vec![
            Equation::new(
                vec![
                    Term::product(vec![minus, plus]),
                    Term::scaled(neg_c2, vec![outer_product_matrix()]),
                ],
                vec![Term::single(massless_shell_3())],
            ),
            Equation::new(
                vec![Term::single(outer_product_matrix())],
                vec![Term::product(vec![PolyMatrix::column(&p), PolyMatrix::row(&p)])],
            ),
        ],
    }
}

pub fn conjugate_decomposition() -> Identity {
    let (minus, plus) = photon_factors();
    let neg_c2 = -&c_poly().pow(2);
    Identity {
        name: "conjugate-decomposition",
        summary: "conjugation swaps the photon factors; (E I + c p.S)(E I - c p.S) - c^2 p p^T = (E^2 - c^2 p^2) I3",
        equations: vec![
            Equation::new(vec![Term::single(minus.conj())], vec![Term::single(plus.clone())]),
            Equation::new(vec![Term::single(plus.conj())], vec![Term::single(minus.clone())]),
            Equation::new(
                vec![
                    Term::product(vec![minus.conj(), plus.conj()]),
                    Term::scaled(neg_c2, vec![outer_product_matrix()]),
                ],
                vec![Term::single(massless_shell_3())],
            ),
        ],
    }
}

pub fn alternative_decomposition() -> Identity {
    let (minus, plus) = photon_factors();
    Identity {
        name: "alternative-decomposition",
        summary: "c^2 p p^T = (E I - c p.S)(E I + c p.S) - (E^2 - c^2 p^2) I3",
        equations: vec![Equation::new(
            vec![Term::scaled(c_poly().pow(2), vec![outer_product_matrix()])],
            vec![
                Term::product(vec![minus, plus]),
                Term::scaled(Poly::int(-1), vec![massless_shell_3()]),
            ],
        )],
    }
}

/// The operators of Dirac's massless spin-`k` system in polynomial form.
#[derive(Clone, Debug)]
pub struct DiracSystem {
    pub twice_k: u32,
    /// `k pt + S.p`, followed by the three spatial equations.
    pub equations: [PolyMatrix; 4],
    /// The spatial equations with `pt` eliminated using the first one:
    /// `k * A_j - S_j * A_t` for `j = x, y, z`.
    pub constraints: [PolyMatrix; 3],
}

impl DiracSystem {
    pub fn evolution(&self) -> &PolyMatrix {
        &self.equations[0]
    }
}

/// Builds the massless spin-`k` operators and eliminates `pt` from the
/// spatial equations by multiplying the evolution operator by `S_j` and the
/// `j`-th spatial equation by `k`, then subtracting.
pub fn dirac_constraint_matrices(t: &SpinTriple) -> Result<DiracSystem> {
    let report = check_spin_algebra(t);
    if let Some(bad) = report.first_failure() {
        return Err(Error::SpinAlgebraViolation(format!(
            "{} (residual {:e})",
            bad.name, bad.value
        )));
    }
    let s = t.exact_spin_operators().ok_or(Error::InexactSpinTriple)?;
    let n = t.dim();
    let k = Poly::constant(QComplex::ratio(i64::from(t.twice_k()), 2));
    let i = Poly::constant(QComplex::i());
    let p = momentum();
    let pt = v(Var::Pt);

    let evolution = &PolyMatrix::scalar(n, &(&k * &pt)) + &dot_momentum(&s);
    let spatial: [PolyMatrix; 3] = std::array::from_fn(|j| {
        let a = (j + 1) % 3;
        let b = (j + 2) % 3;
        let mut op = PolyMatrix::scalar(n, &(&k * &p[j]));
        op = &op + &s[j].scale(&pt);
        op = &op - &s[a].scale(&(&i * &p[b]));
        &op + &s[b].scale(&(&i * &p[a]))
    });
    let constraints: [PolyMatrix; 3] = std::array::from_fn(|j| &spatial[j].scale(&k) - &(&s[j] * &evolution));
    debug_assert!(constraints.iter().all(|m| !m.contains_var(Var::Pt)));
    Ok(DiracSystem {
        twice_k: t.twice_k(),
        equations: [evolution, spatial[0].clone(), spatial[1].clone(), spatial[2].clone()],
        constraints,
    })
}

/// `p` placed in row `j` of an otherwise zero 3x3 matrix.
pub fn momentum_row_matrix(j: usize) -> PolyMatrix {
    let p = momentum();
    PolyMatrix::from_fn(3, 3, |r, col| if r == j { p[col].clone() } else { Poly::zero() })
}

/// `p` placed in column `j` of an otherwise zero 3x3 matrix.
pub fn momentum_column_matrix(j: usize) -> PolyMatrix {
    let p = momentum();
    PolyMatrix::from_fn(3, 3, |r, col| if col == j { p[r].clone() } else { Poly::zero() })
}

fn constraint_reduction(j: usize) -> Identity {
    let sys = dirac_constraint_matrices(&spin1_cartesian()).expect("Cartesian spin-1 is exact and valid");
    let (name, summary) = match j {
        0 => (
            "constraint-x-reduction",
            "spin-1 x constraint (k^2 - Sx^2)px + (ikSz - SxSy)py - (ikSy + SxSz)pz = row 1 of p",
        ),
        1 => (
            "constraint-y-reduction",
            "spin-1 y constraint (k^2 - Sy^2)py + (ikSx - SySz)pz - (ikSz + SySx)px = row 2 of p",
        ),
        _ => (
            "constraint-z-reduction",
            "spin-1 z constraint (k^2 - Sz^2)pz + (ikSy - SzSx)px - (ikSx + SzSy)py = row 3 of p",
        ),
    };
    Identity {
        name,
        summary,
        equations: vec![Equation::new(
            vec![Term::single(sys.constraints[j].clone())],
            vec![Term::single(momentum_row_matrix(j))],
        )],
    }
}

fn rank1_factorization(j: usize) -> Identity {
    let name = ["rank1-first-column", "rank1-second-column", "rank1-third-column"][j];
    let summary = [
        "p p^T = [p in column 1][p in row 1]",
        "p p^T = [p in column 2][p in row 2]",
        "p p^T = [p in column 3][p in row 3]",
    ][j];
    Identity {
        name,
        summary,
        equations: vec![Equation::new(
            vec![Term::product(vec![momentum_column_matrix(j), momentum_row_matrix(j)])],
            vec![Term::single(outer_product_matrix())],
        )],
    }
}

pub fn constraint_x_reduction() -> Identity {
    constraint_reduction(0)
}
pub fn constraint_y_reduction() -> Identity {
    constraint_reduction(1)
}
pub fn constraint_z_reduction() -> Identity {
    constraint_reduction(2)
}
pub fn rank1_first_column() -> Identity {
    rank1_factorization(0)
}
pub fn rank1_second_column() -> Identity {
    rank1_factorization(1)
}
pub fn rank1_third_column() -> Identity {
    rank1_factorization(2)
}

pub fn verify_dirac_decomposition() -> IdentityReport {
    dirac_decomposition().verify()
}
pub fn verify_neutrino_decomposition() -> IdentityReport {
    neutrino_decomposition().verify()
}
pub fn verify_photon_decomposition() -> IdentityReport {
    photon_decomposition().verify()
}
pub fn verify_conjugate_decomposition() -> IdentityReport {
    conjugate_decomposition().verify()
}
pub fn verify_alternative_decomposition() -> IdentityReport {
    alternative_decomposition().verify()
}

pub fn verify_spin1_constraint_reduction() -> [IdentityReport; 3] {
    [0, 1, 2].map(|j| constraint_reduction(j).verify())
}

pub fn verify_rank1_factorizations() -> [IdentityReport; 3] {
    [0, 1, 2].map(|j| rank1_factorization(j).verify())
}

/// Every identity, in report order.
pub fn all_identities() -> Vec<Identity> {
    vec![
        dirac_decomposition(),
        neutrino_decomposition(),
        photon_decomposition(),
        conjugate_decomposition(),
        alternative_decomposition(),
        constraint_x_reduction(),
        constraint_y_reduction(),
        constraint_z_reduction(),
        rank1_first_column(),
        rank1_second_column(),
        rank1_third_column(),
    ]
}

pub fn identity_names() -> Vec<&'static str> {
    all_identities().iter().map(|i| i.name).collect()
}

pub fn find_identity(name: &str) -> Option<Identity> {
    all_identities().into_iter().find(|i| i.name == name)
}

pub fn format_human(reports: &[IdentityReport]) -> String {
    let mut out = String::new();
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in reports {
        let status = if r.residual_is_zero { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{status}  {:width$}  residual terms {:>3}  (lhs {} / rhs {} terms)  {}",
            r.name, r.residual_terms, r.lhs_terms, r.rhs_terms, r.summary
        );
    }
    let passed = reports.iter().filter(|r| r.residual_is_zero).count();
    let _ = writeln!(out, "{passed}/{} identities verified", reports.len());
    out
}

pub fn format_kv(reports: &[IdentityReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "identity={} residual_zero={} lhs_terms={} rhs_terms={} residual_terms={}",
            r.name, r.residual_is_zero, r.lhs_terms, r.rhs_terms, r.residual_terms
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::spin_triple;

    #[test]
    fn constraint_matrix_first_row_for_spin1() {
        let sys = dirac_constraint_matrices(&spin1_cartesian()).unwrap();
        assert_eq!(sys.constraints[0], momentum_row_matrix(0));
        assert_eq!(sys.constraints[1], momentum_row_matrix(1));
        assert_eq!(sys.constraints[2], momentum_row_matrix(2));
    }

    #[test]
    fn k_squared_minus_sz_squared_vanishes_where_sz_squared_is_one() {
        let s = spin1_cartesian();
        let sz = &s.exact_matrices().unwrap()[2];
        let diff = &PolyMatrix::identity(3) - &(sz * sz);
        // Sz^2 = diag(1, 1, 0)
        assert!(diff.get(0, 0).is_zero());
        assert!(diff.get(1, 1).is_zero());
        assert_eq!(diff.get(2, 2), &Poly::one());
    }

    #[test]
    fn pt_is_eliminated_and_bridges_to_photon_factor() {
        let sys = dirac_constraint_matrices(&spin1_cartesian()).unwrap();
        for m in &sys.constraints {
            assert!(!m.contains_var(Var::Pt));
        }
        // c * (pt I + S.p) - (E I + c p.S) = (c pt - E) I, zero on pt c = E.
        let (_, plus) = photon_factors();
        let lhs = &sys.evolution().scale(&c_poly()) - &plus;
        let expected = PolyMatrix::scalar(3, &(&(&c_poly() * &v(Var::Pt)) - &v(Var::E)));
        assert_eq!(lhs, expected);
    }

    #[test]
    fn spin_half_has_no_constraints() {
        let sys = dirac_constraint_matrices(&pauli_triple()).unwrap();
        for m in &sys.constraints {
            assert!(m.is_zero());
        }
    }

    #[test]
    fn inexact_triple_is_rejected() {
        let t = spin_triple(1.0).unwrap();
        assert!(matches!(dirac_constraint_matrices(&t), Err(Error::InexactSpinTriple)));
    }

    #[test]
    fn dirac_massless_specialisation() {
        let id = dirac_decomposition();
        let lhs = id.equations[0].lhs_expanded();
        let e2 = v(Var::E).pow(2);
        let c2p2 = &c_poly().pow(2) * &momentum_squared();
        // Dropping every monomial that contains m leaves (E^2 - c^2 p^2) I4.
        let massless = lhs.map(|p| {
            Poly::from_terms(
                p.terms()
                    .filter(|(m, _)| m.0[Var::M.index()] == 0)
                    .map(|(m, c)| (*m, c.clone())),
            )
        });
        assert_eq!(massless, PolyMatrix::scalar(4, &(&e2 - &c2p2)));
    }

    #[test]
    fn neutrino_diagonal_case() {
        let id = neutrino_decomposition();
        let lhs = id.equations[0].lhs_expanded();
        let at = point(&[(Var::E, 7, 3), (Var::Pz, 2, 5), (Var::C, 3, 1)]);
        let vals = lhs.eval(&at);
        // (E - c pz)(E + c pz) = (7/3)^2 - (6/5)^2
        let expected = QComplex::ratio(49 * 25 - 36 * 9, 9 * 25);
        assert_eq!(vals[0], expected);
        assert_eq!(vals[3], expected);
        assert!(vals[1].is_zero() && vals[2].is_zero());
    }

    #[test]
    fn every_identity_has_zero_residual() {
        for id in all_identities() {
            let r = id.verify();
            assert!(r.residual_is_zero, "{}", id.name);
            assert!(r.lhs_terms > 0);
        }
        assert_eq!(all_identities().len(), 11);
    }

    #[test]
    fn broken_identity_is_reported() {
        let mut id = photon_decomposition();
        id.equations[0].lhs.pop();
        let r = id.verify();
        assert!(!r.residual_is_zero);
        assert!(r.residual_terms > 0);
        assert!(id.check_numeric(5, 1).is_err());
    }

    #[test]
    fn formats_carry_names_and_flags() {
        let reports = vec![verify_neutrino_decomposition()];
        assert!(format_human(&reports).starts_with("PASS  neutrino-decomposition"));
        assert!(format_kv(&reports).contains("identity=neutrino-decomposition residual_zero=true"));
    }
}
