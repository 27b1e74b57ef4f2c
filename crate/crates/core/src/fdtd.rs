//! Second-order Yee leapfrog, used as a reference solver for the spectral
//! propagator.
//!
//! An [`EMField`] passed to this module is read in the staggered layout:
//! `E` is the value at time `t` and `B` at `t - dt/2`, and on cell `(i,j,k)`
//!
//! ```text
//! Ex (i+1/2, j, k)      Bx (i, j+1/2, k+1/2)
//! Ey (i, j+1/2, k)      By (i+1/2, j, k+1/2)
//! Ez (i, j, k+1/2)      Bz (i+1/2, j+1/2, k)
//! ```
//!
//! in units of the grid spacing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{EMField, RSField};
use crate::grid::Grid3;
use crate::propagator::ExactPropagator;
use crate::spectral::SpectralOps;

/// Half-cell offsets of the three `E` components.
pub const E_OFFSETS: [[f64; 3]; 3] = [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]];
/// Half-cell offsets of the three `B` components.
pub const B_OFFSETS: [[f64; 3]; 3] = [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]];

/// Largest stable step, `1 / (c sqrt(sum 1/h_a^2))`.
pub fn courant_limit(grid: &Grid3, c: f64) -> f64 {
    let s: f64 = grid.spacing().iter().map(|h| 1.0 / (h * h)).sum();
    1.0 / (c * s.sqrt())
}

fn check_step(grid: &Grid3, dt: f64, c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "light speed must be positive, got {c}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let bound = courant_limit(grid, c);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::Unstable { dt, bound });
    }
    Ok(())
}

struct Stencil {
    n: [usize; 3],
}

impl Stencil {
    fn at(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    fn up(&self, axis: usize, c: usize) -> usize {
        (c + 1) % self.n[axis]
    }

    fn down(&self, axis: usize, c: usize) -> usize {
        (c + self.n[axis] - 1) % self.n[axis]
    }
}

/// Advances `(E^n, B^{n-1/2})` to `(E^{n+1}, B^{n+1/2})`.
pub fn fdtd_reference_step(state: &EMField, dt: f64, c: f64) -> Result<EMField> {
    let grid = state.grid;
    check_step(&grid, dt, c)?;
    let mut out = state.clone();
    leapfrog(&mut out, dt, c);
    Ok(out)
}

/// `steps` leapfrog steps.
pub fn fdtd_run(state: &EMField, dt: f64, c: f64, steps: usize) -> Result<EMField> {
    check_step(&state.grid, dt, c)?;
    let mut out = state.clone();
    for _ in 0..steps {
        leapfrog(&mut out, dt, c);
    }
    Ok(out)
}

fn leapfrog(f: &mut EMField, dt: f64, c: f64) {
    let st = Stencil { n: f.grid.n };
    let [nx, ny, nz] = f.grid.n;
    let h = f.grid.spacing();
    let [cx, cy, cz] = [0, 1, 2].map(|a| c * dt / h[a]);

    // B^{n+1/2} = B^{n-1/2} - c dt curl E^n, forward differences
    for k in 0..nz {
        let kp = st.up(2, k);
        for j in 0..ny {
            let jp = st.up(1, j);
            for i in 0..nx {
                let ip = st.up(0, i);
                let o = st.at(i, j, k);
                let (ex, ey, ez) = (&f.e[0], &f.e[1], &f.e[2]);
                let curl_x = cy * (ez[st.at(i, jp, k)] - ez[o]) - cz * (ey[st.at(i, j, kp)] - ey[o]);
                let curl_y = cz * (ex[st.at(i, j, kp)] - ex[o]) - cx * (ez[st.at(ip, j, k)] - ez[o]);
                let curl_z = cx * (ey[st.at(ip, j, k)] - ey[o]) - cy * (ex[st.at(i, jp, k)] - ex[o]);
                f.b[0][o] -= curl_x;
                f.b[1][o] -= curl_y;
                f.b[2][o] -= curl_z;
            }
        }
    }
    // E^{n+1} = E^n + c dt curl B^{n+1/2}, backward differences
    for k in 0..nz {
        let km = st.down(2, k);
        for j in 0..ny {
            let jm = st.down(1, j);
            for i in 0..nx {
                let im = st.down(0, i);
                let o = st.at(i, j, k);
                let (bx, by, bz) = (&f.b[0], &f.b[1], &f.b[2]);
                let curl_x = cy * (bz[o] - bz[st.at(i, jm, k)]) - cz * (by[o] - by[st.at(i, j, km)]);
                let curl_y = cz * (bx[o] - bx[st.at(i, j, km)]) - cx * (bz[o] - bz[st.at(im, j, k)]);
                let curl_z = cx * (by[o] - by[st.at(im, j, k)]) - cy * (bx[o] - bx[st.at(i, jm, k)]);
                f.e[0][o] += curl_x;
                f.e[1][o] += curl_y;
                f.e[2][o] += curl_z;
            }
        }
    }
}

/// Samples a collocated field `psi` (at time `t`) onto the Yee layout for a
/// leapfrog with step `dt`: `E` from `psi(t)`, `B` from the exact evolution
/// to `t - dt/2`, each component shifted to its staggered position by
/// Fourier interpolation.
pub fn sample_yee(psi: &RSField, dt: f64, c: f64) -> Result<EMField> {
    let ops = SpectralOps::new(psi.grid);
    let earlier = ExactPropagator::with_ops(ops.clone(), -0.5 * dt, c)?.step(psi)?;
    let h = psi.grid.spacing();
    let shifted = |f: &RSField, offsets: &[[f64; 3]; 3]| -> [Vec<Complex64>; 3] {
        let spec = ops.forward(f);
        std::array::from_fn(|a| {
            let delta: [f64; 3] = std::array::from_fn(|b| offsets[a][b] * h[b]);
            let mut comp: Vec<Complex64> = spec.comps[a]
                .iter()
                .zip(ops.wavevectors())
                .map(|(z, k)| z * Complex64::from_polar(1.0, k[0] * delta[0] + k[1] * delta[1] + k[2] * delta[2]))
                .collect();
            ops.fft().inverse(&mut comp);
            comp
        })
    };
    let e = shifted(psi, &E_OFFSETS);
    let b = shifted(&earlier, &B_OFFSETS);
    Ok(EMField {
        grid: psi.grid,
        e: e.map(|c| c.into_iter().map(|z| z.re).collect()),
        b: b.map(|c| c.into_iter().map(|z| -z.im).collect()),
    })
}

/// `sqrt(sum (a - b)^2 / sum b^2)` over all six components.
pub fn relative_l2(a: &EMField, b: &EMField) -> Result<f64> {
    if !a.grid.same_shape(&b.grid) {
        return Err(Error::GridMismatch);
    }
    let mut diff = 0.0;
    for (x, y) in a.e.iter().chain(a.b.iter()).zip(b.e.iter().chain(b.b.iter())) {
        for (p, q) in x.iter().zip(y.iter()) {
            diff += (p - q) * (p - q);
        }
    }
    let base = b.norm_sq();
    Ok(if base > 0.0 { (diff / base).sqrt() } else { diff.sqrt() })
}

/// Error of the leapfrog against the exact propagator after evolving `psi`
/// to time `t_end` in `steps` equal steps, measured on the Yee layout.
pub fn fdtd_error(psi: &RSField, t_end: f64, steps: usize, c: f64) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidParameter("need at least one step".into()));
    }
    let dt = t_end / steps as f64;
    let start = sample_yee(psi, dt, c)?;
    let end = fdtd_run(&start, dt, c, steps)?;
    let exact = ExactPropagator::new(psi.grid, t_end, c)?.step(psi)?;
    relative_l2(&end, &sample_yee(&exact, dt, c)?)
}
