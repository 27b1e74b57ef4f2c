//! Exact time stepping of `d/dt psi = i c curl psi` and the runtime checks
//! built on it.
//!
//! In Fourier space the evolution reads `d/dt psi_hat = -c k x psi_hat`, so a
//! step of length `dt` rotates each mode vector about `k_hat` by `-c|k| dt`.
//! The rotation matrix is real and is applied to the complex mode vector.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{from_rs, RSField};
use crate::grid::Grid3;
use crate::helicity::{
    helicity_basis, helicity_spectrum_with, i_cross, mode_frequency, Helicity, PlaneWaveMode, WaveVector,
};
use crate::spectral::{SpectralOps, Spectrum};

pub type Rotation = [[f64; 3]; 3];

/// Rodrigues rotation about unit `axis` by `angle`.
pub fn rodrigues(axis: &[f64; 3], angle: f64) -> Rotation {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = *axis;
    [
        [c + t * x * x, t * x * y - s * z, t * x * z + s * y],
        [t * y * x + s * z, c + t * y * y, t * y * z - s * x],
        [t * z * x - s * y, t * z * y + s * x, c + t * z * z],
    ]
}

/// Propagator for a fixed grid, step and light speed; rotations are cached
/// per mode.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    ops: SpectralOps,
    dt: f64,
    c: f64,
    rotations: Vec<Rotation>,
}

impl ExactPropagator {
    pub fn new(grid: Grid3, dt: f64, c: f64) -> Result<Self> {
        Self::with_ops(SpectralOps::new(grid), dt, c)
    }

    pub fn with_ops(ops: SpectralOps, dt: f64, c: f64) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be finite, got {dt}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "light speed must be positive, got {c}"
            )));
        }
        let rotations = ops
            .wavevectors()
            .iter()
            .map(|k| {
                let kn = k.iter().map(|x| x * x).sum::<f64>().sqrt();
                if kn == 0.0 {
                    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
                } else {
                    rodrigues(&k.map(|x| x / kn), -c * kn * dt)
                }
            })
            .collect();
        Ok(Self { ops, dt, c, rotations })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn ops(&self) -> &SpectralOps {
        &self.ops
    }

    pub fn step_spectrum(&self, spec: &mut Spectrum) {
        for (idx, r) in self.rotations.iter().enumerate() {
            let v = spec.at(idx);
            let out = std::array::from_fn(|i| v[0] * r[i][0] + v[1] * r[i][1] + v[2] * r[i][2]);
            spec.set(idx, out);
        }
    }

    pub fn step(&self, field: &RSField) -> Result<RSField> {
        if !self.ops.grid().same_shape(&field.grid) {
            return Err(Error::GridMismatch);
        }
        let mut spec = self.ops.forward(field);
        self.step_spectrum(&mut spec);
        Ok(self.ops.inverse(spec))
    }

    /// `n` consecutive steps.
    pub fn advance(&self, field: &RSField, n: usize) -> Result<RSField> {
        let mut f = field.clone();
        for _ in 0..n {
            f = self.step(&f)?;
        }
        Ok(f)
    }
}

/// One exact step of length `dt`.
pub fn step_exact(field: &RSField, dt: f64, c: f64) -> Result<RSField> {
    ExactPropagator::new(field.grid, dt, c)?.step(field)
}

/// Relative residuals of `curl E + (1/c) dB/dt = 0` and
/// `curl B - (1/c) dE/dt = 0`, with the time derivative taken as
/// `(f1 - f0)/dt` and the curls evaluated on the exact half-step field.
///
/// Each residual is normalised by the larger of `||(1/c) dF/dt||` and the
/// gradient norm of the curled field (which equals `||curl F||` for a
/// transverse field); a static field reports zero.
pub fn maxwell_residual(f0: &RSField, f1: &RSField, dt: f64, c: f64) -> Result<(f64, f64)> {
    maxwell_residual_with(&SpectralOps::new(f0.grid), f0, f1, dt, c)
}

pub fn maxwell_residual_with(ops: &SpectralOps, f0: &RSField, f1: &RSField, dt: f64, c: f64) -> Result<(f64, f64)> {
    if !f0.grid.same_shape(&f1.grid) || !ops.grid().same_shape(&f0.grid) {
        return Err(Error::GridMismatch);
    }
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time step must be finite and nonzero, got {dt}"
        )));
    }
    let half = ExactPropagator::with_ops(ops.clone(), 0.5 * dt, c)?.step(f0)?;
    let em_half = from_rs(&half);
    // curl of a real field, and its gradient norm sqrt(sum |grad f|^2)
    let curl_real = |f: &[Vec<f64>; 3]| {
        let as_complex = RSField {
            grid: half.grid,
            comps: std::array::from_fn(|a| f[a].iter().map(|&x| Complex64::new(x, 0.0)).collect()),
        };
        let mut spec = ops.forward(&as_complex);
        let mut grad2 = 0.0;
        for (idx, k) in ops.wavevectors().iter().enumerate() {
            let v = spec.at(idx);
            let k2: f64 = k.iter().map(|x| x * x).sum();
            grad2 += k2 * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            spec.set(idx, i_cross(k, &v));
        }
        let curl = ops.inverse(spec);
        let grad = (grad2 / half.grid.len() as f64).sqrt();
        (
            curl.comps.map(|c| c.into_iter().map(|z| z.re).collect::<Vec<f64>>()),
            grad,
        )
    };
    let (curl_e, grad_e) = curl_real(&em_half.e);
    let (curl_b, grad_b) = curl_real(&em_half.b);
    let em0 = from_rs(f0);
    let em1 = from_rs(f1);
    let rate = 1.0 / (c * dt);

    let residual = |curl: &[Vec<f64>; 3], grad: f64, x1: &[Vec<f64>; 3], x0: &[Vec<f64>; 3], sign: f64| {
        let mut diff = 0.0;
        let mut b2 = 0.0;
        for comp in 0..3 {
            for i in 0..curl[comp].len() {
                let a = curl[comp][i];
                let b = sign * (x1[comp][i] - x0[comp][i]) * rate;
                diff += (a + b) * (a + b);
                b2 += b * b;
            }
        }
        let scale = grad.max(b2.sqrt());
        if scale > 0.0 {
            diff.sqrt() / scale
        } else {
            0.0
        }
    };
    let res1 = residual(&curl_e, grad_e, &em1.b, &em0.b, 1.0);
    let res2 = residual(&curl_b, grad_b, &em1.e, &em0.e, -1.0);
    Ok((res1, res2))
}

/// `sum_{k != 0} (|a_+(k)|^2 - |a_-(k)|^2)`; bins whose derivative
/// wavevector vanishes carry no helicity.
pub fn helicity_invariant(field: &RSField) -> f64 {
    helicity_invariant_with(&SpectralOps::new(field.grid), field)
}

pub fn helicity_invariant_with(ops: &SpectralOps, field: &RSField) -> f64 {
    helicity_spectrum_with(ops.fft(), field)
        .entries
        .iter()
        .filter(|e| e.k.norm() > 0.0)
        .map(|e| e.amplitude(Helicity::Plus).norm_sqr() - e.amplitude(Helicity::Minus).norm_sqr())
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionResult {
    pub index: [i64; 3],
    pub k_norm: f64,
    pub omega_measured: f64,
    pub omega_expected: f64,
    pub relative_error: f64,
}

/// Evolves a single helicity mode with the exact propagator and fits the
/// phase advance of its amplitude, returning the measured `omega` against
/// `c|k|`.
pub fn dispersion_check(grid: Grid3, index: [i64; 3], steps: usize, dt: f64, c: f64) -> Result<DispersionResult> {
    if index == [0, 0, 0] {
        return Err(Error::ZeroWaveVector);
    }
    if grid.is_aliased(index) {
        return Err(Error::Aliased { index, dims: grid.n });
    }
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "dispersion check needs at least one step".into(),
        ));
    }
    let bin = grid.mode_index(index).ok_or(Error::Aliased { index, dims: grid.n })?;
    let k = WaveVector(grid.wavevector_of(index));
    let kn = k.norm();
    let per_step = c * kn * dt;
    if per_step.is_nan() || per_step.abs() >= PI {
        return Err(Error::TemporalAliasing(per_step));
    }

    let helicity = Helicity::Plus;
    let mode = PlaneWaveMode::new(k, helicity, Complex64::new(1.0, 0.0))?;
    let mut field = crate::helicity::sample_plane_wave(grid, &mode, 0.0, c)?;
    let prop = ExactPropagator::new(grid, dt, c)?;
    let e = helicity_basis(&k)?.get(helicity);
    let amplitude = |f: &RSField| {
        let v = prop.ops().forward(f).at(bin);
        (0..3).map(|a| e[a].conj() * v[a]).sum::<Complex64>()
    };

    let mut prev = amplitude(&field);
    let mut phase = 0.0;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((0.0, 0.0));
    for n in 1..=steps {
        field = prop.step(&field)?;
        let a = amplitude(&field);
        phase += (a / prev).arg();
        prev = a;
        samples.push((n as f64 * dt, phase));
    }
    // least-squares slope through all samples
    let m = samples.len() as f64;
    let mean_t = samples.iter().map(|s| s.0).sum::<f64>() / m;
    let mean_p = samples.iter().map(|s| s.1).sum::<f64>() / m;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_t).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mean_t) * (s.1 - mean_p)).sum();
    let slope = sxy / sxx;

    // amplitude ~ exp(-i omega_sigma t) with omega_sigma = sign * sigma * omega
    let omega_measured = -slope / (mode_frequency(helicity, 1.0, 1.0));
    let omega_expected = c * kn;
    Ok(DispersionResult {
        index,
        k_norm: kn,
        omega_measured,
        omega_expected,
        relative_error: (omega_measured - omega_expected).abs() / omega_expected,
    })
}

/// The `count` lowest non-aliased lattice modes, ordered by `|k|` and then
/// by index.
pub fn lowest_modes(grid: &Grid3, count: usize) -> Vec<[i64; 3]> {
    let mut modes: Vec<([i64; 3], f64)> = (0..grid.len())
        .map(|i| grid.lattice_index(i))
        .filter(|j| *j != [0, 0, 0] && !grid.is_aliased(*j))
        .map(|j| (j, WaveVector(grid.wavevector_of(j)).norm()))
        .collect();
    modes.sort_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
    modes.into_iter().take(count).map(|m| m.0).collect()
}

/// Relative residual of the negative-helicity operator `(E/c + p.S)` applied
/// to `psi`, with `E -> i d/dt` and `(p.S) psi -> curl psi`:
/// `||(i/c) dpsi/dt + curl psi|| / (||(1/c) dpsi/dt|| + ||curl psi||)`.
pub fn negative_helicity_residual(ops: &SpectralOps, psi: &RSField, dpsi_dt: &RSField, c: f64) -> Result<f64> {
    helicity_operator_residual(ops, psi, dpsi_dt, c, 1.0)
}

/// The same for the positive-helicity operator `(E/c - p.S)`.
pub fn positive_helicity_residual(ops: &SpectralOps, psi: &RSField, dpsi_dt: &RSField, c: f64) -> Result<f64> {
    helicity_operator_residual(ops, psi, dpsi_dt, c, -1.0)
}

fn helicity_operator_residual(ops: &SpectralOps, psi: &RSField, dpsi_dt: &RSField, c: f64, sign: f64) -> Result<f64> {
    if !psi.grid.same_shape(&dpsi_dt.grid) {
        return Err(Error::GridMismatch);
    }
    let energy_term = dpsi_dt.scaled(Complex64::new(0.0, 1.0 / c));
    let momentum_term = ops.curl(psi).scaled(Complex64::new(sign, 0.0));
    let residual = energy_term.add(&momentum_term)?.norm();
    let scale = energy_term.norm() + momentum_term.norm();
    Ok(if scale > 0.0 { residual / scale } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helicity::sample_plane_wave;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> Grid3 {
        Grid3::new([8, 8, 8], [1.0, 2.0, 1.5]).unwrap()
    }

    fn mode(j: [i64; 3], h: Helicity) -> RSField {
        let g = grid();
        let k = WaveVector(g.wavevector_of(j));
        sample_plane_wave(g, &PlaneWaveMode::new(k, h, c(0.8, -0.3)).unwrap(), 0.0, 1.0).unwrap()
    }

    #[test]
    fn rodrigues_is_orthogonal() {
        let axis = [0.48, 0.6, 0.64];
        let r = rodrigues(&axis, 0.77);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|l| r[l][i] * r[l][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot - target).abs() < 1e-15);
            }
        }
        // axis is fixed
        let fixed: Vec<f64> = (0..3).map(|i| (0..3).map(|j| r[i][j] * axis[j]).sum()).collect();
        for i in 0..3 {
            assert!((fixed[i] - axis[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let f = mode([1, 2, 0], Helicity::Plus);
        let g = step_exact(&f, 0.0, 1.0).unwrap();
        assert!(g.relative_difference(&f).unwrap() < 1e-15);
    }

    #[test]
    fn full_period_returns_to_start() {
        let f = mode([1, -1, 2], Helicity::Plus);
        let kn = WaveVector(grid().wavevector_of([1, -1, 2])).norm();
        let c_light = 1.7;
        let period = 2.0 * PI / (c_light * kn);
        let g = step_exact(&f, period, c_light).unwrap();
        assert!(g.relative_difference(&f).unwrap() < 1e-12);
    }

    #[test]
    fn uniform_field_is_static() {
        let f = RSField::uniform(grid(), [c(1., -1.), c(0.5, 0.), c(0., 2.)]);
        let g = step_exact(&f, 0.37, 1.0).unwrap();
        assert!(g.relative_difference(&f).unwrap() < 1e-15);
    }

    #[test]
    fn helicity_amplitudes_pick_up_expected_phase() {
        let j = [0, 1, 1];
        let k = WaveVector(grid().wavevector_of(j));
        let dt = 0.05;
        for h in [Helicity::Plus, Helicity::Minus] {
            let f = mode(j, h);
            let g = step_exact(&f, dt, 1.0).unwrap();
            let phase = Complex64::from_polar(1.0, h.value() as f64 * k.norm() * dt);
            assert!(g.relative_difference(&f.scaled(phase)).unwrap() < 1e-13);
        }
    }

    #[test]
    fn static_field_has_no_maxwell_residual() {
        let f = RSField::uniform(grid(), [c(1., 0.), c(0., 1.), c(0., 0.)]);
        let g = step_exact(&f, 0.1, 1.0).unwrap();
        assert_eq!(maxwell_residual(&f, &g, 0.1, 1.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn longitudinal_static_mode_has_no_maxwell_residual() {
        let g = grid();
        let k = g.wavevector_of([1, 0, 0]);
        let f = RSField::from_fn(g, |x| {
            let ph = Complex64::from_polar(1.0, k[0] * x[0]);
            [ph, c(0., 0.), c(0., 0.)]
        });
        let next = step_exact(&f, 0.1, 1.0).unwrap();
        let (r1, r2) = maxwell_residual(&f, &next, 0.1, 1.0).unwrap();
        assert!(r1 < 1e-14 && r2 < 1e-14, "{r1} {r2}");
    }

    #[test]
    fn maxwell_residual_rejects_mismatched_grids() {
        let f = RSField::zeros(grid());
        let g = RSField::zeros(Grid3::cubic(4, 1.0).unwrap());
        assert!(matches!(maxwell_residual(&f, &g, 0.1, 1.0), Err(Error::GridMismatch)));
    }

    #[test]
    fn helicity_invariant_signs() {
        let plus = mode([1, 0, 0], Helicity::Plus);
        let amp2 = c(0.8, -0.3).norm_sqr();
        assert!((helicity_invariant(&plus) - amp2).abs() < 1e-13);
        let minus = mode([1, 0, 0], Helicity::Minus);
        let mix = plus.add(&minus).unwrap();
        assert!(helicity_invariant(&mix).abs() < 1e-13);
    }

    #[test]
    fn dispersion_rejects_nyquist_and_zero() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        assert!(matches!(
            dispersion_check(g, [4, 0, 0], 4, 0.01, 1.0),
            Err(Error::Aliased { .. })
        ));
        assert!(matches!(
            dispersion_check(g, [0, 0, 0], 4, 0.01, 1.0),
            Err(Error::ZeroWaveVector)
        ));
        assert!(matches!(
            dispersion_check(g, [1, 0, 0], 4, 0.6, 1.0),
            Err(Error::TemporalAliasing(_))
        ));
    }

    #[test]
    fn lowest_modes_are_unit_lattice_vectors() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let modes = lowest_modes(&g, 6);
        for j in &modes {
            assert_eq!(j.iter().map(|x| x.abs()).sum::<i64>(), 1);
        }
        assert_eq!(modes[0], [1, 0, 0]);
    }
}
