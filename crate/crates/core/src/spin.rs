//! Spin matrices for arbitrary spin `k`.
//!
//! Two hand-written representations are kept exact: the Pauli matrices
//! (stored unscaled, with `scale = 2` so that `S = sigma / 2`) and the
//! Cartesian spin-1 matrices `(S_j)_{lm} = -i eps_{jlm}`. Every other spin is
//! built in floating point from ladder operators in the `|k, m>` basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::QComplex;
use crate::poly::{Poly, PolyMatrix};

/// Frobenius tolerance applied to floating-point spin triples.
pub const FLOAT_TOLERANCE: f64 = 1e-13;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Three spin matrices for spin `k = twice_k / 2`, stored as `scale * S`.
#[derive(Clone, Debug)]
pub struct SpinTriple {
    twice_k: u32,
    scale: u32,
    mats: [CMatrix; 3],
    exact: Option<[PolyMatrix; 3]>,
}

impl SpinTriple {
    /// Wraps arbitrary matrices without validating them; use
    /// [`check_spin_algebra`] to test the result.
    pub fn from_matrices(twice_k: u32, scale: u32, sx: CMatrix, sy: CMatrix, sz: CMatrix) -> Self {
        Self {
            twice_k,
            scale,
            mats: [sx, sy, sz],
            exact: None,
        }
    }

    fn from_exact(twice_k: u32, scale: u32, exact: [PolyMatrix; 3]) -> Self {
        let mats = [to_cmatrix(&exact[0]), to_cmatrix(&exact[1]), to_cmatrix(&exact[2])];
        Self {
            twice_k,
            scale,
            mats,
            exact: Some(exact),
        }
    }

    pub fn k(&self) -> f64 {
        f64::from(self.twice_k) / 2.0
    }

    pub fn twice_k(&self) -> u32 {
        self.twice_k
    }

    pub fn dim(&self) -> usize {
        self.twice_k as usize + 1
    }

    /// Factor between the stored matrices and the spin operators.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn sx(&self) -> &CMatrix {
        &self.mats[0]
    }

    pub fn sy(&self) -> &CMatrix {
        &self.mats[1]
    }

    pub fn sz(&self) -> &CMatrix {
        &self.mats[2]
    }

    pub fn get(&self, axis: Axis) -> &CMatrix {
        &self.mats[axis as usize]
    }

    pub fn matrices(&self) -> &[CMatrix; 3] {
        &self.mats
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The stored matrices in exact form, if this triple has one.
    pub fn exact_matrices(&self) -> Option<&[PolyMatrix; 3]> {
        self.exact.as_ref()
    }

    /// Exact spin operators `S_j = stored_j / scale`.
    pub fn exact_spin_operators(&self) -> Option<[PolyMatrix; 3]> {
        let inv = Poly::constant(QComplex::ratio(1, i64::from(self.scale)));
        self.exact
            .as_ref()
            .map(|m| [m[0].scale(&inv), m[1].scale(&inv), m[2].scale(&inv)])
    }

    /// Spin operators `S_j` in floating point.
    pub fn spin_operators(&self) -> [CMatrix; 3] {
        let inv = Complex64::new(1.0 / f64::from(self.scale), 0.0);
        [&self.mats[0] * inv, &self.mats[1] * inv, &self.mats[2] * inv]
    }

    /// Mutable access to one stored matrix. Drops the exact form.
    pub fn matrix_mut(&mut self, axis: Axis) -> &mut CMatrix {
        self.exact = None;
        &mut self.mats[axis as usize]
    }
}

fn to_cmatrix(m: &PolyMatrix) -> CMatrix {
    CMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        m.get(i, j)
            .as_constant()
            .expect("spin matrix entries are constants")
            .to_complex64()
    })
}

/// The Pauli matrices exactly as printed: `sigma_x, sigma_y, sigma_z`, with
/// `k = 1/2` and scale 2.
pub fn pauli_triple() -> SpinTriple {
    let sx = PolyMatrix::from_gaussian(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]);
    let sy = PolyMatrix::from_gaussian(&[&[(0, 0), (0, -1)], &[(0, 1), (0, 0)]]);
    let sz = PolyMatrix::from_gaussian(&[&[(1, 0), (0, 0)], &[(0, 0), (-1, 0)]]);
    SpinTriple::from_exact(1, 2, [sx, sy, sz])
}

/// Cartesian spin-1 matrices `(S_j)_{lm} = -i eps_{jlm}`.
pub fn spin1_cartesian() -> SpinTriple {
    let exact = [0usize, 1, 2].map(|j| {
        PolyMatrix::from_fn(3, 3, |l, m| {
            let eps = levi_civita(j, l, m);
            Poly::constant(QComplex::int(0, -eps))
        })
    });
    SpinTriple::from_exact(2, 1, exact)
}

pub(crate) fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Ladder-operator construction in the `|k, m>` basis, `m = k, k-1, ..., -k`.
pub fn spin_triple(k: f64) -> Result<SpinTriple> {
    let twice = 2.0 * k;
    if !k.is_finite() || k < 0.0 || (twice - twice.round()).abs() > 1e-12 || twice > f64::from(u32::MAX) {
        return Err(Error::InvalidSpin(k));
    }
    Ok(spin_triple_twice(twice.round() as u32))
}

/// [`spin_triple`] indexed by `2k`.
pub fn spin_triple_twice(twice_k: u32) -> SpinTriple {
    let n = twice_k as usize + 1;
    let k = f64::from(twice_k) / 2.0;
    let m_of = |row: usize| k - row as f64;

    let mut raise = CMatrix::zeros(n, n);
    for col in 1..n {
        let m = m_of(col);
        let amp = (k * (k + 1.0) - m * (m + 1.0)).max(0.0).sqrt();
        raise[(col - 1, col)] = Complex64::new(amp, 0.0);
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower) * Complex64::new(0.5, 0.0);
    let sy = (&raise - &lower) * Complex64::new(0.0, -0.5);
    let sz = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(m_of(i), 0.0)
        } else {
            Complex64::zero()
        }
    });
    SpinTriple::from_matrices(twice_k, 1, sx, sy, sz)
}

/// Unitary `U` taking the Cartesian spin-1 matrices to the ladder basis:
/// `U S_j^cart U^dagger = spin_triple(1).S_j` for every axis.
///
/// Rows of `U` are the conjugated basis states `<1, m|`. The `m = +1` state
/// is the top eigenvector of `S_z` with its first nonzero component made
/// real and positive; lower states follow from `S_-` with positive ladder
/// coefficients.
pub fn cartesian_spherical_transform() -> CMatrix {
    standard_basis_transform(&spin1_cartesian())
}

/// Same construction as [`cartesian_spherical_transform`] for any triple.
pub fn standard_basis_transform(t: &SpinTriple) -> CMatrix {
    let [sx, sy, sz] = t.spin_operators();
    let n = t.dim();
    let k = t.k();

    // Highest weight: null vector of (Sz - k).
    let shifted = &sz - CMatrix::identity(n, n) * Complex64::new(k, 0.0);
    let herm = shifted.adjoint() * &shifted;
    let eig = nalgebra::SymmetricEigen::new(herm);
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let mut top: Vec<Complex64> = eig.eigenvectors.column(imin).iter().copied().collect();
    fix_phase(&mut top);

    let lowering = &sx - &sy * Complex64::new(0.0, 1.0);
    let mut states = vec![nalgebra::DVector::from_vec(top)];
    for _ in 1..n {
        let next = &lowering * states.last().expect("seeded");
        let norm = next.norm();
        states.push(next / Complex64::new(norm, 0.0));
    }
    CMatrix::from_fn(n, n, |i, j| states[i][j].conj())
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    /// Frobenius norm of the defect; exactly 0.0 when an exact check passes.
    pub value: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct SpinAlgebraReport {
    pub twice_k: u32,
    pub exact: bool,
    pub tolerance: f64,
    pub residuals: Vec<Residual>,
}

impl SpinAlgebraReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }

    pub fn first_failure(&self) -> Option<&Residual> {
        self.residuals.iter().find(|r| !r.passed)
    }
}

const COMMUTATORS: [(&str, usize, usize, usize); 3] = [
    ("[Sx,Sy]=iSz", 0, 1, 2),
    ("[Sz,Sx]=iSy", 2, 0, 1),
    ("[Sy,Sz]=iSx", 1, 2, 0),
];

/// Checks Hermiticity, the three cyclic commutators and the Casimir, with the
/// stored scale factored in: `[A, B] = i s C` and `sum A^2 = s^2 k(k+1) I`.
pub fn check_spin_algebra(t: &SpinTriple) -> SpinAlgebraReport {
    match &t.exact {
        Some(exact) => check_exact(t, exact),
        None => check_float(t),
    }
}

fn check_exact(t: &SpinTriple, m: &[PolyMatrix; 3]) -> SpinAlgebraReport {
    let n = t.dim();
    let s = i64::from(t.scale);
    let mut residuals = Vec::with_capacity(7);
    let mut push = |name, defect: PolyMatrix| {
        let value = if defect.is_zero() {
            0.0
        } else {
            to_cmatrix(&defect).norm()
        };
        residuals.push(Residual {
            name,
            value,
            passed: defect.is_zero(),
        });
    };

    for (name, idx) in [("Sx hermitian", 0), ("Sy hermitian", 1), ("Sz hermitian", 2)] {
        push(name, &m[idx] - &m[idx].adjoint());
    }
    let i_s = Poly::constant(QComplex::int(0, s));
    for (name, a, b, c) in COMMUTATORS {
        let comm = &(&m[a] * &m[b]) - &(&m[b] * &m[a]);
        push(name, &comm - &m[c].scale(&i_s));
    }
    let casimir = m.iter().fold(PolyMatrix::zeros(n, n), |acc, x| &acc + &(x * x));
    // s^2 k(k+1) = s^2 (2k)(2k+2) / 4
    let tk = i64::from(t.twice_k);
    let target = Poly::constant(QComplex::ratio(s * s * tk * (tk + 2), 4));
    push("S^2=k(k+1)I", &casimir - &PolyMatrix::scalar(n, &target));

    SpinAlgebraReport {
        twice_k: t.twice_k,
        exact: true,
        tolerance: 0.0,
        residuals,
    }
}

fn check_float(t: &SpinTriple) -> SpinAlgebraReport {
    let n = t.dim();
    let s = f64::from(t.scale);
    let k = t.k();
    let m = &t.mats;
    let mut residuals = Vec::with_capacity(7);
    let mut push = |name, value: f64| {
        residuals.push(Residual {
            name,
            value,
            passed: value.is_finite() && value <= FLOAT_TOLERANCE,
        });
    };
    for (name, idx) in [("Sx hermitian", 0), ("Sy hermitian", 1), ("Sz hermitian", 2)] {
        push(name, (&m[idx] - m[idx].adjoint()).norm());
    }
    let i_s = Complex64::new(0.0, s);
    for (name, a, b, c) in COMMUTATORS {
        let comm = &m[a] * &m[b] - &m[b] * &m[a];
        push(name, (comm - &m[c] * i_s).norm());
    }
    let casimir = m.iter().fold(CMatrix::zeros(n, n), |acc, x| acc + x * x);
    let target = CMatrix::identity(n, n) * Complex64::new(s * s * k * (k + 1.0), 0.0);
    push("S^2=k(k+1)I", (casimir - target).norm());

    SpinAlgebraReport {
        twice_k: t.twice_k,
        exact: false,
        tolerance: FLOAT_TOLERANCE,
        residuals,
    }
}
