//! Helicity eigenbasis of `k.S`, analytic plane waves, and helicity spectra.

use std::fmt::Write as _;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{CVec3, RSField};
use crate::grid::{Fft3, Grid3};
use crate::spin::spin1_cartesian;

/// Sign pairing between helicity and frequency: a helicity-`sigma` mode has
/// angular frequency `omega = HELICITY_FREQUENCY_SIGN * sigma * c|k|` in
/// `exp(i(k.x - omega t))`.
///
/// With `-1` the evolution `d/dt psi = i c curl psi` is satisfied, and the
/// positive-frequency modes are the `sigma = -1` ones, i.e. the solutions of
/// `(E/c + p.S) psi = 0`.
pub const HELICITY_FREQUENCY_SIGN: f64 = -1.0;

/// Above this `|k_hat . z|` the transverse pair is seeded from `x` instead of `z`.
const POLAR_THRESHOLD: f64 = 1.0 - 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveVector(pub [f64; 3]);

impl WaveVector {
    pub fn new(kx: f64, ky: f64, kz: f64) -> Self {
        Self([kx, ky, kz])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn unit(&self) -> Result<[f64; 3]> {
        let n = self.norm();
        if !self.is_finite() || n == 0.0 {
            return Err(Error::ZeroWaveVector);
        }
        Ok(self.0.map(|x| x / n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Helicity {
    Plus,
    Zero,
    Minus,
}

impl Helicity {
    pub const ALL: [Helicity; 3] = [Helicity::Plus, Helicity::Zero, Helicity::Minus];

    pub fn value(self) -> i32 {
        match self {
            Helicity::Plus => 1,
            Helicity::Zero => 0,
            Helicity::Minus => -1,
        }
    }

    pub fn from_value(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Helicity::Plus),
            0 => Ok(Helicity::Zero),
            -1 => Ok(Helicity::Minus),
            other => Err(Error::InvalidHelicity(other)),
        }
    }

    fn slot(self) -> usize {
        match self {
            Helicity::Plus => 0,
            Helicity::Zero => 1,
            Helicity::Minus => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelicityBasis {
    pub k: WaveVector,
    pub e_plus: CVec3,
    pub e_zero: CVec3,
    pub e_minus: CVec3,
}

impl HelicityBasis {
    pub fn get(&self, h: Helicity) -> CVec3 {
        match h {
            Helicity::Plus => self.e_plus,
            Helicity::Zero => self.e_zero,
            Helicity::Minus => self.e_minus,
        }
    }

    /// Hermitian projections `(e_+^dag v, e_0^dag v, e_-^dag v)`.
    pub fn decompose(&self, v: &CVec3) -> [Complex64; 3] {
        Helicity::ALL.map(|h| inner(&self.get(h), v))
    }

    pub fn compose(&self, a: &[Complex64; 3]) -> CVec3 {
        let mut out = [ZERO; 3];
        for h in Helicity::ALL {
            let e = self.get(h);
            for i in 0..3 {
                out[i] += a[h.slot()] * e[i];
            }
        }
        out
    }

    /// Largest of `||(k.S) e_s - s|k| e_s||` over the three states.
    pub fn eigen_residual(&self) -> f64 {
        let kn = self.k.norm();
        Helicity::ALL
            .iter()
            .map(|&h| {
                let e = self.get(h);
                let lhs = apply_k_dot_s(&self.k, &e);
                let s = h.value() as f64 * kn;
                norm(&sub(&lhs, &scale(&e, Complex64::new(s, 0.0))))
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in Helicity::ALL {
            for b in Helicity::ALL {
                let g = inner(&self.get(a), &self.get(b));
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// A transverse plane wave of definite helicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneWaveMode {
    pub k: WaveVector,
    pub helicity: Helicity,
    pub amplitude: Complex64,
}

impl PlaneWaveMode {
    pub fn new(k: WaveVector, helicity: Helicity, amplitude: Complex64) -> Result<Self> {
        if helicity == Helicity::Zero {
            return Err(Error::InvalidHelicity(0));
        }
        k.unit()?;
        Ok(Self { k, helicity, amplitude })
    }

    /// `omega` in `exp(i(k.x - omega t))`.
    pub fn angular_frequency(&self, c: f64) -> f64 {
        mode_frequency(self.helicity, self.k.norm(), c)
    }
}

pub fn mode_frequency(h: Helicity, k_norm: f64, c: f64) -> f64 {
    HELICITY_FREQUENCY_SIGN * h.value() as f64 * c * k_norm
}

fn spin1_table() -> &'static [[[Complex64; 3]; 3]; 3] {
    static TABLE: OnceLock<[[[Complex64; 3]; 3]; 3]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let t = spin1_cartesian();
        std::array::from_fn(|j| std::array::from_fn(|l| std::array::from_fn(|m| t.matrices()[j][(l, m)])))
    })
}

/// `(k.S) v` with the Cartesian spin-1 matrices, evaluated as a matrix product.
pub fn apply_k_dot_s(k: &WaveVector, v: &CVec3) -> CVec3 {
    let s = spin1_table();
    let mut out = [ZERO; 3];
    for (j, kj) in k.0.iter().enumerate() {
        if *kj == 0.0 {
            continue;
        }
        for l in 0..3 {
            for m in 0..3 {
                out[l] += s[j][l][m] * v[m] * *kj;
            }
        }
    }
    out
}

/// `i (k x v)`, the cross-product form of [`apply_k_dot_s`].
pub fn i_cross(k: &[f64; 3], v: &CVec3) -> CVec3 {
    let i = Complex64::new(0.0, 1.0);
    cross_real_complex(k, v).map(|z| z * i)
}

pub(crate) fn cross_real_complex(k: &[f64; 3], v: &CVec3) -> CVec3 {
    [
        v[2] * k[1] - v[1] * k[2],
        v[0] * k[2] - v[2] * k[0],
        v[1] * k[0] - v[0] * k[1],
    ]
}

pub(crate) fn inner(a: &CVec3, b: &CVec3) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &CVec3) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn sub(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: &CVec3, s: Complex64) -> CVec3 {
    a.map(|z| z * s)
}

fn real(v: [f64; 3]) -> CVec3 {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Eigenbasis of `k.S`: `e_0 = k_hat`, `e_+- = (t1 +- i t2)/sqrt 2` with
/// `t2 = k_hat x t1`.
///
/// `t1` is the normalised rejection of `z` from `k_hat` (of `x` when `k` is
/// within 1e-9 of the z axis), sign-flipped so its first nonzero component
/// is positive.
pub fn helicity_basis(k: &WaveVector) -> Result<HelicityBasis> {
    let kh = k.unit()?;
    let reference = if kh[2].abs() > POLAR_THRESHOLD {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let d: f64 = (0..3).map(|i| reference[i] * kh[i]).sum();
    let mut t1: [f64; 3] = std::array::from_fn(|i| reference[i] - d * kh[i]);
    let n1 = t1.iter().map(|x| x * x).sum::<f64>().sqrt();
    t1 = t1.map(|x| x / n1);
    if let Some(first) = t1.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            t1 = t1.map(|x| -x);
        }
    }
    let t2 = [
        kh[1] * t1[2] - kh[2] * t1[1],
        kh[2] * t1[0] - kh[0] * t1[2],
        kh[0] * t1[1] - kh[1] * t1[0],
    ];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e_plus = std::array::from_fn(|i| Complex64::new(t1[i] * r, t2[i] * r));
    let e_minus = std::array::from_fn(|i| Complex64::new(t1[i] * r, -t2[i] * r));
    Ok(HelicityBasis {
        k: *k,
        e_plus,
        e_zero: real(kh),
        e_minus,
    })
}

/// `amplitude * e_sigma(k) * exp(i(k.x - omega t))` with `omega` from
/// [`HELICITY_FREQUENCY_SIGN`].
pub fn plane_wave_rs(mode: &PlaneWaveMode, position: [f64; 3], time: f64, c: f64) -> Result<CVec3> {
    if mode.helicity == Helicity::Zero {
        return Err(Error::InvalidHelicity(0));
    }
    let basis = helicity_basis(&mode.k)?;
    let e = basis.get(mode.helicity);
    let kx: f64 = (0..3).map(|i| mode.k.0[i] * position[i]).sum();
    let phase = Complex64::from_polar(1.0, kx - mode.angular_frequency(c) * time);
    Ok(scale(&e, mode.amplitude * phase))
}

/// A plane-wave mode sampled on a grid. The mode need not be periodic on
/// the grid, but only lattice wavevectors give single-bin spectra.
pub fn sample_plane_wave(grid: Grid3, mode: &PlaneWaveMode, time: f64, c: f64) -> Result<RSField> {
    let basis = helicity_basis(&mode.k)?;
    let e = basis.get(mode.helicity);
    let omega = mode.angular_frequency(c);
    Ok(RSField::from_fn(grid, |x| {
        let kx: f64 = (0..3).map(|i| mode.k.0[i] * x[i]).sum();
        scale(&e, mode.amplitude * Complex64::from_polar(1.0, kx - omega * time))
    }))
}

/// Basis used for the `k = 0` bin of a spectrum, where helicity is undefined.
pub fn zero_mode_basis() -> HelicityBasis {
    helicity_basis(&WaveVector::new(0.0, 0.0, 1.0)).expect("unit z is nonzero")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub index: [i64; 3],
    pub k: WaveVector,
    /// `(a_+, a_0, a_-)`; a plane wave of amplitude `A` contributes `A`.
    pub amplitudes: [Complex64; 3],
}

impl SpectrumEntry {
    pub fn amplitude(&self, h: Helicity) -> Complex64 {
        self.amplitudes[h.slot()]
    }
}

#[derive(Clone, Debug)]
pub struct HelicitySpectrum {
    pub grid: Grid3,
    pub entries: Vec<SpectrumEntry>,
}

impl HelicitySpectrum {
    /// `sum |a_s(k)|^2` over every mode and helicity.
    pub fn total_power(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|e| e.amplitudes.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Entries with some `|a_s| > tol`, paired with the offending helicities.
    pub fn significant(&self, tol: f64) -> Vec<(&SpectrumEntry, Helicity)> {
        self.entries
            .iter()
            .flat_map(|e| {
                Helicity::ALL
                    .into_iter()
                    .filter(move |&h| e.amplitude(h).norm() > tol)
                    .map(move |h| (e, h))
            })
            .collect()
    }

    pub fn entry(&self, index: [i64; 3]) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.index == index)
    }

    /// CSV rows `jx,jy,jz,sigma,re,im` for amplitudes above `tol`.
    pub fn to_csv(&self, tol: f64) -> String {
        let mut out = String::from("jx,jy,jz,sigma,re,im\n");
        for (e, h) in self.significant(tol) {
            let a = e.amplitude(h);
            let _ = writeln!(
                out,
                "{},{},{},{},{:.16e},{:.16e}",
                e.index[0],
                e.index[1],
                e.index[2],
                h.value(),
                a.re,
                a.im
            );
        }
        out
    }
}

/// Projects every Fourier mode onto its helicity basis. Bins whose
/// derivative wavevector vanishes (`k = 0` and pure Nyquist corners) use
/// [`zero_mode_basis`]. Parseval: `total_power` equals the mean of `|psi|^2`
/// over grid points.
pub fn helicity_spectrum(field: &RSField) -> HelicitySpectrum {
    helicity_spectrum_with(&Fft3::new(field.grid), field)
}

pub fn helicity_spectrum_with(fft: &Fft3, field: &RSField) -> HelicitySpectrum {
    let grid = field.grid;
    let spec = crate::spectral::forward(fft, field);
    let inv_n = 1.0 / grid.len() as f64;
    let zero_basis = zero_mode_basis();
    let entries = (0..grid.len())
        .map(|idx| {
            let index = grid.lattice_index(idx);
            let k = WaveVector(grid.derivative_wavevector(idx));
            let v = spec.at(idx).map(|z| z * inv_n);
            let amplitudes = if k.norm() == 0.0 {
                zero_basis.decompose(&v)
            } else {
                helicity_basis(&k).expect("nonzero lattice vector").decompose(&v)
            };
            SpectrumEntry { index, k, amplitudes }
        })
        .collect();
    HelicitySpectrum { grid, entries }
}
