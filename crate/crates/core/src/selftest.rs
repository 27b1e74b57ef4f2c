//! Desk-scale invariant suite behind the `selftest` command.
//!
//! The time stepper is a parameter so that a deliberately broken propagator
//! can be fed in and shown to be caught.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fdtd::fdtd_error;
use crate::field::RSField;
use crate::grid::Grid3;
use crate::helicity::{helicity_basis, helicity_spectrum, sample_plane_wave, Helicity, PlaneWaveMode, WaveVector};
use crate::identities::all_identities;
use crate::propagator::{dispersion_check, helicity_invariant, lowest_modes, maxwell_residual, step_exact};
use crate::snapshot::{read_snapshot, write_snapshot};
use crate::spectral::{energy, SpectralOps};
use crate::spin::{check_spin_algebra, spin_triple_twice};

/// `(field, dt, c) -> field after dt`.
pub type Stepper<'a> = &'a dyn Fn(&RSField, f64, f64) -> Result<RSField>;

#[derive(Clone, Debug)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub results: Vec<PropertyResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn first_failure(&self) -> Option<&PropertyResult> {
        self.results.iter().find(|r| !r.passed)
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&format!(
                "{}  {:<24} {:>7.3}s  {}\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.seconds,
                r.detail
            ));
        }
        match self.first_failure() {
            None => out.push_str(&format!("{} properties passed\n", self.results.len())),
            Some(r) => out.push_str(&format!("first failure: {}\n", r.name)),
        }
        out
    }
}

fn random_field(grid: Grid3, rng: &mut ChaCha8Rng) -> RSField {
    RSField::from_fn(grid, |_| {
        std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    })
}

fn mode(grid: Grid3, j: [i64; 3], h: Helicity, amp: Complex64) -> Result<RSField> {
    let k = WaveVector(grid.wavevector_of(j));
    sample_plane_wave(grid, &PlaneWaveMode::new(k, h, amp)?, 0.0, 1.0)
}

type Check<'a> = Box<dyn Fn() -> Result<(bool, String)> + 'a>;

/// Runs every property with `stepper` and the real propagator elsewhere.
/// `scratch` is used for the snapshot round trip; failing to write there is
/// an `Err` rather than a failed property.
pub fn run_selftest_with(stepper: Stepper<'_>, scratch: &Path) -> Result<SelftestReport> {
    let g8 = Grid3::new([8, 8, 8], [1.0, 1.25, 0.8])?;
    let checks: Vec<(&'static str, Check<'_>)> = vec![
        (
            "spin-algebra",
            Box::new(|| {
                let mut worst = 0.0f64;
                for twice_k in 1..=6 {
                    let report = check_spin_algebra(&spin_triple_twice(twice_k));
                    if !report.passed() {
                        return Ok((false, format!("2k = {twice_k}: {:?}", report.first_failure())));
                    }
                    worst = worst.max(report.max_residual());
                }
                Ok((true, format!("k = 1/2..3, max residual {worst:.1e}")))
            }),
        ),
        (
            "symbolic-identities",
            Box::new(|| {
                let ids = all_identities();
                for id in &ids {
                    let r = id.verify();
                    if !r.residual_is_zero {
                        return Ok((false, format!("{} has {} residual terms", r.name, r.residual_terms)));
                    }
                }
                Ok((true, format!("{} identities reduce to zero", ids.len())))
            }),
        ),
        (
            "helicity-basis",
            Box::new(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(11);
                let mut worst = 0.0f64;
                for _ in 0..200 {
                    let k = WaveVector(std::array::from_fn(|_| rng.gen_range(-3.0..3.0)));
                    let b = helicity_basis(&k)?;
                    worst = worst
                        .max(b.eigen_residual() / k.norm())
                        .max(b.orthonormality_residual());
                }
                Ok((worst < 1e-13, format!("max residual {worst:.1e}")))
            }),
        ),
        (
            "curl-equivalence",
            Box::new(|| {
                let ops = SpectralOps::new(g8);
                let f = random_field(g8, &mut ChaCha8Rng::seed_from_u64(12));
                let a = ops.curl(&f);
                let d = ops.curl_via_spin_matrices(&f).relative_difference(&a)?;
                Ok((d < 1e-13, format!("relative difference {d:.1e}")))
            }),
        ),
        (
            "transverse-projection",
            Box::new(|| {
                let ops = SpectralOps::new(g8);
                let f = ops.project_transverse(&random_field(g8, &mut ChaCha8Rng::seed_from_u64(13)));
                let (ge, gb) = ops.gauss_residual(&f);
                let again = ops.project_transverse(&f).relative_difference(&f)?;
                let ok = ge.max(gb) < 1e-12 && again < 1e-14;
                Ok((ok, format!("gauss {:.1e}, idempotence {again:.1e}", ge.max(gb))))
            }),
        ),
        (
            "unitarity",
            Box::new(|| {
                let f = random_field(g8, &mut ChaCha8Rng::seed_from_u64(14));
                let g = stepper(&f, 0.173, 1.3)?;
                let d = (g.norm() - f.norm()).abs() / f.norm();
                Ok((d < 1e-13, format!("norm change {d:.1e}")))
            }),
        ),
        (
            "helicity-phase-advance",
            Box::new(|| {
                let dt = 0.03;
                let mut worst = 0.0f64;
                for (j, h) in [
                    ([1, 0, 0], Helicity::Plus),
                    ([0, 1, -1], Helicity::Minus),
                    ([1, 2, 1], Helicity::Plus),
                ] {
                    let f = mode(g8, j, h, Complex64::new(0.6, -0.2))?;
                    let kn = WaveVector(g8.wavevector_of(j)).norm();
                    let expected = f.scaled(Complex64::from_polar(1.0, h.value() as f64 * kn * dt));
                    worst = worst.max(stepper(&f, dt, 1.0)?.relative_difference(&expected)?);
                }
                Ok((worst < 1e-12, format!("max phase mismatch {worst:.1e}")))
            }),
        ),
        (
            "invariant-drift",
            Box::new(|| {
                let ops = SpectralOps::new(g8);
                let f0 = ops.project_transverse(&random_field(g8, &mut ChaCha8Rng::seed_from_u64(15)));
                let (e0, h0) = (energy(&f0), helicity_invariant(&f0));
                let mut f = f0.clone();
                for _ in 0..200 {
                    f = stepper(&f, 0.01, 1.0)?;
                }
                let de = (energy(&f) - e0).abs() / e0;
                let dh = (helicity_invariant(&f) - h0).abs() / (2.0 * e0 / g8.volume());
                let (ge, gb) = ops.gauss_residual(&f);
                let ok = de < 1e-12 && dh < 1e-12 && ge.max(gb) < 1e-12;
                Ok((
                    ok,
                    format!("energy {de:.1e}, helicity {dh:.1e}, gauss {:.1e}", ge.max(gb)),
                ))
            }),
        ),
        (
            "maxwell-recovery",
            Box::new(|| {
                let f = mode(g8, [1, 1, 0], Helicity::Minus, Complex64::new(1.0, 0.0))?;
                let period = 2.0 * std::f64::consts::PI / WaveVector(g8.wavevector_of([1, 1, 0])).norm();
                let res = |dt: f64| -> Result<f64> {
                    let (a, b) = maxwell_residual(&f, &stepper(&f, dt, 1.0)?, dt, 1.0)?;
                    Ok(a.max(b))
                };
                let (r1, r2) = (res(period / 32.0)?, res(period / 64.0)?);
                let ratio = r1 / r2;
                Ok((
                    (ratio - 4.0).abs() < 0.3 && r1 < 1e-2,
                    format!("residual {r1:.2e} -> {r2:.2e}, ratio {ratio:.3}"),
                ))
            }),
        ),
        (
            "dispersion",
            Box::new(|| {
                let mut worst = 0.0f64;
                for j in lowest_modes(&g8, 3) {
                    worst = worst.max(dispersion_check(g8, j, 20, 0.01, 1.0)?.relative_error);
                }
                Ok((worst < 1e-10, format!("max relative error {worst:.1e}")))
            }),
        ),
        (
            "fdtd-agreement",
            Box::new(|| {
                let err = |n: usize, steps: usize| -> Result<f64> {
                    let g = Grid3::cubic(n, 1.0)?;
                    fdtd_error(
                        &mode(g, [1, 0, 1], Helicity::Plus, Complex64::new(1.0, 0.0))?,
                        0.25,
                        steps,
                        1.0,
                    )
                };
                let (a, b) = (err(8, 8)?, err(16, 16)?);
                let ratio = a / b;
                Ok((
                    (ratio - 4.0).abs() < 0.8,
                    format!("error {a:.2e} -> {b:.2e}, ratio {ratio:.3}"),
                ))
            }),
        ),
        (
            "helicity-spectrum",
            Box::new(|| {
                let f = mode(g8, [2, -1, 0], Helicity::Minus, Complex64::new(0.3, 0.4))?.add(&mode(
                    g8,
                    [0, 0, 1],
                    Helicity::Plus,
                    Complex64::new(-1.0, 0.0),
                )?)?;
                let s = helicity_spectrum(&f);
                let hits = s.significant(1e-12);
                let parseval = (s.total_power() - f.norm_sq() / g8.len() as f64).abs();
                Ok((
                    hits.len() == 2 && parseval < 1e-12,
                    format!("{} entries, parseval {parseval:.1e}", hits.len()),
                ))
            }),
        ),
    ];

    let mut results = Vec::new();
    for (name, check) in checks {
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        results.push(PropertyResult {
            name,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    let start = Instant::now();
    let f = random_field(g8, &mut ChaCha8Rng::seed_from_u64(16));
    std::fs::create_dir_all(scratch).map_err(|e| Error::io(scratch, e))?;
    let path = scratch.join("selftest_snapshot.rsf");
    write_snapshot(&path, &f, 1.5)?;
    let back = read_snapshot(&path);
    let _ = std::fs::remove_file(&path);
    let (g, t) = back?;
    results.push(PropertyResult {
        name: "snapshot-round-trip",
        passed: g == f && t == 1.5,
        detail: format!("{}", path.display()),
        seconds: start.elapsed().as_secs_f64(),
    });
    Ok(SelftestReport { results })
}

pub fn run_selftest(scratch: &Path) -> Result<SelftestReport> {
    run_selftest_with(&step_exact, scratch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_flip_is_caught() {
        let dir = tempfile::tempdir().unwrap();
        let flipped = |f: &RSField, dt: f64, c: f64| step_exact(f, -dt, c);
        let report = run_selftest_with(&flipped, dir.path()).unwrap();
        assert!(!report.passed());
        assert_eq!(report.first_failure().unwrap().name, "helicity-phase-advance");
    }
}
