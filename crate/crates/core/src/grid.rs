//! Periodic 3-D grid, its wavevector lattice, and a planned 3-D FFT.
//!
//! Fields are stored flat in x-fastest order: `idx = ix + nx * (iy + ny * iz)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid3 {
    pub n: [usize; 3],
    pub l: [f64; 3],
}

impl Grid3 {
    pub fn new(n: [usize; 3], l: [f64; 3]) -> Result<Self> {
        if n.iter().any(|&c| c < 2) {
            return Err(Error::InvalidGrid(format!("point counts must be >= 2, got {n:?}")));
        }
        if l.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidGrid(format!("box lengths must be positive, got {l:?}")));
        }
        Ok(Self { n, l })
    }

    pub fn cubic(n: usize, l: f64) -> Result<Self> {
        Self::new([n; 3], [l; 3])
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.n[0] * (i[1] + self.n[1] * i[2])
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let ix = idx % self.n[0];
        let rest = idx / self.n[0];
        [ix, rest % self.n[1], rest / self.n[1]]
    }

    pub fn spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.l[a] / self.n[a] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.l.iter().product()
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        let h = self.spacing();
        [0, 1, 2].map(|a| c[a] as f64 * h[a])
    }

    /// Signed lattice index of FFT bin `i` along `axis`, in the symmetric
    /// range `[-n/2, n/2)`; the even-`n` Nyquist bin maps to `-n/2`.
    pub fn signed_index(&self, axis: usize, i: usize) -> i64 {
        let n = self.n[axis];
        if i < n.div_ceil(2) {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn lattice_index(&self, idx: usize) -> [i64; 3] {
        let c = self.coords(idx);
        [0, 1, 2].map(|a| self.signed_index(a, c[a]))
    }

    /// Flat FFT bin of a signed lattice index, if it lies in the symmetric range.
    pub fn mode_index(&self, j: [i64; 3]) -> Option<usize> {
        let mut c = [0usize; 3];
        for a in 0..3 {
            let n = self.n[a] as i64;
            let lo = -(n / 2);
            let hi = (n - 1) / 2;
            if j[a] < lo || j[a] > hi {
                return None;
            }
            c[a] = j[a].rem_euclid(n) as usize;
        }
        Some(self.index(c))
    }

    pub fn wavevector_of(&self, j: [i64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| 2.0 * PI * j[a] as f64 / self.l[a])
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.wavevector_of(self.lattice_index(idx))
    }

    /// Wavevector used by the spectral derivative operators. On even grids
    /// the Nyquist component is zero: the real Nyquist cosine has zero
    /// derivative at every grid point, and this keeps `k` and the wavevector
    /// of the conjugate partner bin equal up to sign, so real fields stay
    /// real under every operator.
    pub fn derivative_wavevector(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        let k = self.wavevector(idx);
        [0, 1, 2].map(|a| {
            if self.n[a].is_multiple_of(2) && c[a] == self.n[a] / 2 {
                0.0
            } else {
                k[a]
            }
        })
    }

    /// True when `|j_a| >= n_a / 2` on some axis, i.e. the mode sits on or
    /// beyond the Nyquist plane.
    pub fn is_aliased(&self, j: [i64; 3]) -> bool {
        (0..3).any(|a| 2 * j[a].unsigned_abs() >= self.n[a] as u64)
    }

    pub fn is_nyquist_bin(&self, idx: usize) -> bool {
        let c = self.coords(idx);
        (0..3).any(|a| self.n[a].is_multiple_of(2) && c[a] == self.n[a] / 2)
    }

    pub fn same_shape(&self, other: &Grid3) -> bool {
        self.n == other.n && self.l == other.l
    }
}

impl fmt::Display for Grid3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{}x{} over {}x{}x{}",
            self.n[0], self.n[1], self.n[2], self.l[0], self.l[1], self.l[2]
        )
    }
}

/// Planned forward/inverse 3-D transforms for one grid.
///
/// `forward` is unnormalised; `inverse` divides by the point count, so the
/// pair round-trips.
#[derive(Clone)]
pub struct Fft3 {
    grid: Grid3,
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft3").field("grid", &self.grid).finish()
    }
}

impl Fft3 {
    pub fn new(grid: Grid3) -> Self {
        let mut planner = FftPlanner::new();
        let forward = [0, 1, 2].map(|a| planner.plan_fft_forward(grid.n[a]));
        let inverse = [0, 1, 2].map(|a| planner.plan_fft_inverse(grid.n[a]));
        Self { grid, forward, inverse }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.grid.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.grid.len(), "buffer does not match grid");
        let [nx, ny, nz] = self.grid.n;
        let scratch_len = plans.iter().map(|p| p.get_inplace_scratch_len()).max().unwrap_or(0);
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];

        // x lines are contiguous
        plans[0].process_with_scratch(data, &mut scratch);

        let mut line = vec![Complex64::new(0.0, 0.0); ny.max(nz)];
        for iz in 0..nz {
            for ix in 0..nx {
                let base = ix + nx * ny * iz;
                for iy in 0..ny {
                    line[iy] = data[base + nx * iy];
                }
                plans[1].process_with_scratch(&mut line[..ny], &mut scratch);
                for iy in 0..ny {
                    data[base + nx * iy] = line[iy];
                }
            }
        }
        let plane = nx * ny;
        for base in 0..plane {
            for iz in 0..nz {
                line[iz] = data[base + plane * iz];
            }
            plans[2].process_with_scratch(&mut line[..nz], &mut scratch);
            for iz in 0..nz {
                data[base + plane * iz] = line[iz];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid3::new([1, 4, 4], [1.0; 3]).is_err());
        assert!(Grid3::new([4, 4, 4], [1.0, 0.0, 1.0]).is_err());
        assert!(Grid3::new([4, 4, 4], [1.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn signed_indices_follow_fftfreq() {
        let g = Grid3::new([4, 5, 2], [1.0; 3]).unwrap();
        let x: Vec<i64> = (0..4).map(|i| g.signed_index(0, i)).collect();
        let y: Vec<i64> = (0..5).map(|i| g.signed_index(1, i)).collect();
        assert_eq!(x, vec![0, 1, -2, -1]);
        assert_eq!(y, vec![0, 1, 2, -2, -1]);
        assert_eq!(g.mode_index([-1, -2, 0]), Some(g.index([3, 3, 0])));
        assert_eq!(g.mode_index([2, 0, 0]), None);
        assert!(g.is_aliased([-2, 0, 0]));
        assert!(!g.is_aliased([1, 2, 0]));
        let nyq = g.mode_index([-2, 1, -1]).unwrap();
        assert!(g.is_nyquist_bin(nyq));
        let k = g.derivative_wavevector(nyq);
        assert_eq!(k[0], 0.0);
        assert_eq!(k[1], g.wavevector(nyq)[1]);
        assert_eq!(k[2], 0.0);
    }

    #[test]
    fn coords_round_trip() {
        let g = Grid3::new([3, 4, 5], [1.0; 3]).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.index(g.coords(idx)), idx);
        }
    }

    #[test]
    fn single_mode_transforms_to_one_bin() {
        let g = Grid3::new([8, 6, 4], [2.0, 3.0, 1.0]).unwrap();
        let fft = Fft3::new(g);
        let j = [2i64, -1, 1];
        let k = g.wavevector_of(j);
        let mut data: Vec<Complex64> = (0..g.len())
            .map(|idx| {
                let x = g.position(idx);
                Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2])
            })
            .collect();
        let orig = data.clone();
        fft.forward(&mut data);
        let target = g.mode_index(j).unwrap();
        for (idx, z) in data.iter().enumerate() {
            let expected = if idx == target { g.len() as f64 } else { 0.0 };
            assert!((z - Complex64::new(expected, 0.0)).norm() < 1e-10, "bin {idx}: {z}");
        }
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
