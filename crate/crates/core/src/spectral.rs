//! Fourier-space operators on Riemann-Silberstein fields: curl, transverse
//! projection, divergence diagnostics and the field energy.

use num_complex::Complex64;

use crate::field::{from_rs, CVec3, RSField};
use crate::grid::{Fft3, Grid3};
use crate::helicity::{apply_k_dot_s, i_cross, WaveVector};

/// Unnormalised Fourier coefficients of a vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: Grid3,
    pub comps: [Vec<Complex64>; 3],
}

impl Spectrum {
    pub fn at(&self, idx: usize) -> CVec3 {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn set(&mut self, idx: usize, v: CVec3) {
        for a in 0..3 {
            self.comps[a][idx] = v[a];
        }
    }

    /// Applies `f(k, v)` to every mode.
    pub fn map_modes(&mut self, wavevectors: &[[f64; 3]], mut f: impl FnMut(&[f64; 3], CVec3) -> CVec3) {
        for (idx, k) in wavevectors.iter().enumerate() {
            let v = self.at(idx);
            self.set(idx, f(k, v));
        }
    }
}

pub fn forward(fft: &Fft3, field: &RSField) -> Spectrum {
    let mut comps = field.comps.clone();
    for c in comps.iter_mut() {
        fft.forward(c);
    }
    Spectrum {
        grid: field.grid,
        comps,
    }
}

pub fn inverse(fft: &Fft3, spec: Spectrum) -> RSField {
    let mut comps = spec.comps;
    for c in comps.iter_mut() {
        fft.inverse(c);
    }
    RSField { grid: spec.grid, comps }
}

/// Planned transforms plus the derivative wavevector of every bin (see
/// [`Grid3::derivative_wavevector`]).
#[derive(Clone, Debug)]
pub struct SpectralOps {
    fft: Fft3,
    wavevectors: Vec<[f64; 3]>,
}

impl SpectralOps {
    pub fn new(grid: Grid3) -> Self {
        let wavevectors = (0..grid.len()).map(|i| grid.derivative_wavevector(i)).collect();
        Self {
            fft: Fft3::new(grid),
            wavevectors,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.fft.grid()
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    pub fn wavevectors(&self) -> &[[f64; 3]] {
        &self.wavevectors
    }

    pub fn forward(&self, field: &RSField) -> Spectrum {
        forward(&self.fft, field)
    }

    pub fn inverse(&self, spec: Spectrum) -> RSField {
        inverse(&self.fft, spec)
    }

    fn check(&self, field: &RSField) {
        assert!(
            self.grid().same_shape(&field.grid),
            "field grid does not match operator grid"
        );
    }

    /// `curl psi` through per-mode multiplication by `i k x`.
    pub fn curl(&self, field: &RSField) -> RSField {
        self.check(field);
        let mut spec = self.forward(field);
        spec.map_modes(&self.wavevectors, |k, v| i_cross(k, &v));
        self.inverse(spec)
    }

    /// `(k.S) psi_hat` per mode with the spin-1 matrices; equals the curl.
    pub fn curl_via_spin_matrices(&self, field: &RSField) -> RSField {
        self.check(field);
        let mut spec = self.forward(field);
        spec.map_modes(&self.wavevectors, |k, v| apply_k_dot_s(&WaveVector(*k), &v));
        self.inverse(spec)
    }

    /// Removes `k_hat (k_hat . psi_hat)` from every nonzero mode.
    pub fn project_transverse(&self, field: &RSField) -> RSField {
        self.check(field);
        let mut spec = self.forward(field);
        spec.map_modes(&self.wavevectors, transverse_part);
        self.inverse(spec)
    }

    /// Relative divergence of `E = Re psi` and `B = -Im psi`:
    /// `||k . F_hat|| / || |k| F_hat ||`, zero when the denominator vanishes.
    /// A longitudinal mode scores 1, a transverse one 0.
    pub fn gauss_residual(&self, field: &RSField) -> (f64, f64) {
        self.check(field);
        let em = from_rs(field);
        let res = |f: &[Vec<f64>; 3]| {
            let real = RSField {
                grid: field.grid,
                comps: std::array::from_fn(|a| f[a].iter().map(|&x| Complex64::new(x, 0.0)).collect()),
            };
            let spec = self.forward(&real);
            let mut num = 0.0;
            let mut den = 0.0;
            for (idx, k) in self.wavevectors.iter().enumerate() {
                let v = spec.at(idx);
                let div: Complex64 = (0..3).map(|a| v[a] * k[a]).sum();
                num += div.norm_sqr();
                let k2: f64 = k.iter().map(|x| x * x).sum();
                den += k2 * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
            if den > 0.0 {
                (num / den).sqrt()
            } else {
                0.0
            }
        };
        (res(&em.e), res(&em.b))
    }

    /// Spectral divergence `div psi` as a complex scalar field.
    pub fn divergence(&self, field: &RSField) -> Vec<Complex64> {
        self.check(field);
        let spec = self.forward(field);
        let mut out: Vec<Complex64> = self
            .wavevectors
            .iter()
            .enumerate()
            .map(|(idx, k)| {
                let v = spec.at(idx);
                Complex64::new(0.0, 1.0) * (0..3).map(|a| v[a] * k[a]).sum::<Complex64>()
            })
            .collect();
        self.fft.inverse(&mut out);
        out
    }
}

pub(crate) fn transverse_part(k: &[f64; 3], v: CVec3) -> CVec3 {
    let k2: f64 = k.iter().map(|x| x * x).sum();
    if k2 == 0.0 {
        return v;
    }
    let proj: Complex64 = (0..3).map(|a| v[a] * k[a]).sum::<Complex64>() / k2;
    std::array::from_fn(|a| v[a] - proj * k[a])
}

pub fn curl_spectral(field: &RSField) -> RSField {
    SpectralOps::new(field.grid).curl(field)
}

pub fn project_transverse(field: &RSField) -> RSField {
    SpectralOps::new(field.grid).project_transverse(field)
}

pub fn gauss_residual(field: &RSField) -> (f64, f64) {
    SpectralOps::new(field.grid).gauss_residual(field)
}

/// `1/2 sum |psi|^2 dV`, i.e. `1/2 int (|E|^2 + |B|^2)`.
pub fn energy(field: &RSField) -> f64 {
    0.5 * field.norm_sq() * field.grid.cell_volume()
}
