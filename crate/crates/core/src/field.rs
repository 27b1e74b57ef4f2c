//! Riemann-Silberstein field `psi = E - iB` and the real `(E, B)` pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid3;

pub type CVec3 = [Complex64; 3];

/// Complex 3-vector field on a periodic grid, one buffer per component.
#[derive(Clone, Debug, PartialEq)]
pub struct RSField {
    pub grid: Grid3,
    pub comps: [Vec<Complex64>; 3],
}

/// Real electric and magnetic fields (Gaussian units).
#[derive(Clone, Debug, PartialEq)]
pub struct EMField {
    pub grid: Grid3,
    pub e: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

impl RSField {
    pub fn zeros(grid: Grid3) -> Self {
        let n = grid.len();
        Self {
            grid,
            comps: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
        }
    }

    /// Samples `f(position)` at every grid point.
    pub fn from_fn(grid: Grid3, mut f: impl FnMut([f64; 3]) -> CVec3) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.position(idx));
            for a in 0..3 {
                out.comps[a][idx] = v[a];
            }
        }
        out
    }

    pub fn uniform(grid: Grid3, v: CVec3) -> Self {
        Self::from_fn(grid, |_| v)
    }

    pub fn at(&self, idx: usize) -> CVec3 {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    /// `sum |psi|^2` over grid points.
    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| self.at(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj(&self) -> RSField {
        RSField {
            grid: self.grid,
            comps: self.comps.clone().map(|c| c.into_iter().map(|z| z.conj()).collect()),
        }
    }

    pub fn scaled(&self, s: Complex64) -> RSField {
        RSField {
            grid: self.grid,
            comps: self.comps.clone().map(|c| c.into_iter().map(|z| z * s).collect()),
        }
    }

    pub fn add(&self, other: &RSField) -> Result<RSField> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RSField) -> Result<RSField> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &RSField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<RSField> {
        if !self.grid.same_shape(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let comps = std::array::from_fn(|a| {
            self.comps[a]
                .iter()
                .zip(other.comps[a].iter())
                .map(|(&x, &y)| f(x, y))
                .collect()
        });
        Ok(RSField { grid: self.grid, comps })
    }

    /// `||self - other|| / ||other||`, or the absolute difference when
    /// `other` is zero.
    pub fn relative_difference(&self, other: &RSField) -> Result<f64> {
        let diff = self.sub(other)?.norm();
        let base = other.norm();
        Ok(if base > 0.0 { diff / base } else { diff })
    }
}

impl EMField {
    pub fn zeros(grid: Grid3) -> Self {
        let n = grid.len();
        Self {
            grid,
            e: std::array::from_fn(|_| vec![0.0; n]),
            b: std::array::from_fn(|_| vec![0.0; n]),
        }
    }

    pub fn uniform(grid: Grid3, e: [f64; 3], b: [f64; 3]) -> Self {
        let n = grid.len();
        Self {
            grid,
            e: e.map(|v| vec![v; n]),
            b: b.map(|v| vec![v; n]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().chain(self.b.iter()).flatten().all(|x| x.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.e.iter().chain(self.b.iter()).flatten().map(|x| x * x).sum()
    }
}

/// `psi = e - i b` pointwise.
pub fn to_rs(f: &EMField) -> RSField {
    let comps = std::array::from_fn(|a| {
        f.e[a]
            .iter()
            .zip(f.b[a].iter())
            .map(|(&e, &b)| Complex64::new(e, -b))
            .collect()
    });
    RSField { grid: f.grid, comps }
}

/// `e = Re psi`, `b = -Im psi`.
pub fn from_rs(psi: &RSField) -> EMField {
    EMField {
        grid: psi.grid,
        e: std::array::from_fn(|a| psi.comps[a].iter().map(|z| z.re).collect()),
        b: std::array::from_fn(|a| psi.comps[a].iter().map(|z| -z.im).collect()),
    }
}

/// [`to_rs`] with an explicit grid check against `grid`.
pub fn to_rs_on(grid: &Grid3, f: &EMField) -> Result<RSField> {
    if !grid.same_shape(&f.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(to_rs(f))
}
