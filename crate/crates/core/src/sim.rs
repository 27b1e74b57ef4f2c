//! Evolution runs driven by a [`SimConfig`]: initial data, the step loop,
//! per-step diagnostics and output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::config::{InitialCondition, ModeSpec, SimConfig};
use crate::error::{Error, Result};
use crate::field::RSField;
use crate::grid::Grid3;
use crate::helicity::{helicity_basis, Helicity, WaveVector};
use crate::propagator::{helicity_invariant_with, maxwell_residual_with, ExactPropagator};
use crate::snapshot::{read_snapshot, write_csv, write_snapshot};
use crate::spectral::{energy, SpectralOps};

/// Superposition of lattice plane waves at `t = 0`.
pub fn plane_wave_field(grid: Grid3, modes: &[ModeSpec]) -> Result<RSField> {
    let mut field = RSField::zeros(grid);
    for m in modes {
        if m.index == [0, 0, 0] {
            return Err(Error::ZeroWaveVector);
        }
        if grid.is_aliased(m.index) {
            return Err(Error::Aliased {
                index: m.index,
                dims: grid.n,
            });
        }
        let k = grid.wavevector_of(m.index);
        let e = helicity_basis(&WaveVector(k))?.get(Helicity::from_value(m.sigma)?);
        for idx in 0..grid.len() {
            let x = grid.position(idx);
            let ph = m.amplitude * Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            for a in 0..3 {
                field.comps[a][idx] += e[a] * ph;
            }
        }
    }
    Ok(field)
}

/// Helicity-polarised Gaussian packet with periodic minimum-image distance.
/// The polarisation is exact only for the carrier; project afterwards to
/// remove the longitudinal part of the envelope.
pub fn gaussian_packet(
    grid: Grid3,
    center: [f64; 3],
    width: f64,
    k: [f64; 3],
    sigma: i32,
    amplitude: Complex64,
) -> Result<RSField> {
    let helicity = Helicity::from_value(sigma)?;
    if helicity == Helicity::Zero {
        return Err(Error::InvalidHelicity(0));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "packet width must be positive, got {width}"
        )));
    }
    let e = helicity_basis(&WaveVector(k))?.get(helicity);
    Ok(RSField::from_fn(grid, |x| {
        let mut r2 = 0.0;
        for a in 0..3 {
            let l = grid.l[a];
            let d = (x[a] - center[a]).rem_euclid(l);
            let d = if d > 0.5 * l { d - l } else { d };
            r2 += d * d;
        }
        let envelope = (-r2 / (2.0 * width * width)).exp();
        let phase = Complex64::from_polar(envelope, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
        e.map(|z| z * amplitude * phase)
    }))
}

/// Initial field for `cfg`, transverse-projected when requested.
pub fn initial_field(cfg: &SimConfig) -> Result<RSField> {
    let field = match &cfg.init {
        InitialCondition::PlaneWaves(modes) => plane_wave_field(cfg.grid, modes)?,
        InitialCondition::Gaussian {
            center,
            width,
            k,
            sigma,
            amplitude,
        } => gaussian_packet(cfg.grid, *center, *width, *k, *sigma, *amplitude)?,
        InitialCondition::File(path) => {
            let (field, _) = read_snapshot(path)?;
            if !field.grid.same_shape(&cfg.grid) {
                return Err(Error::GridMismatch);
            }
            field
        }
    };
    Ok(if cfg.project_transverse {
        SpectralOps::new(cfg.grid).project_transverse(&field)
    } else {
        field
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRecord {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub helicity: f64,
    pub gauss_e: f64,
    pub gauss_b: f64,
    /// Relative residual of `curl E + (1/c) dB/dt` over the following step.
    pub res1: f64,
    /// Relative residual of `curl B - (1/c) dE/dt` over the following step.
    pub res2: f64,
    pub max_abs: f64,
}

pub const DIAGNOSTICS_HEADER: &str = "step,t,energy,helicity,gauss_e,gauss_b,res1,res2,max_abs";

pub fn diagnostics_csv(records: &[DiagnosticRecord]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.step, r.t, r.energy, r.helicity, r.gauss_e, r.gauss_b, r.res1, r.res2, r.max_abs
        );
    }
    out
}

/// Outcome of a run. Drifts are relative to the initial energy; the
/// helicity drift uses the same scale so that helicity-neutral fields are
/// measured meaningfully.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub records: Vec<DiagnosticRecord>,
    pub max_energy_drift: f64,
    pub max_helicity_drift: f64,
    pub max_gauss: f64,
    pub max_maxwell: f64,
    /// `||psi(T) - psi(0)|| / ||psi(0)||`.
    pub final_vs_initial: f64,
    pub violations: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs `cfg` from its initial condition. Files go to `cfg.output.dir`
/// unless `write_files` is false.
pub fn run(cfg: &SimConfig, write_files: bool) -> Result<RunSummary> {
    let initial = initial_field(cfg)?;
    run_from(cfg, initial, write_files)
}

pub fn run_from(cfg: &SimConfig, initial: RSField, write_files: bool) -> Result<RunSummary> {
    if !initial.grid.same_shape(&cfg.grid) {
        return Err(Error::GridMismatch);
    }
    let ops = SpectralOps::new(cfg.grid);
    let prop = ExactPropagator::with_ops(ops.clone(), cfg.dt, cfg.c)?;
    let dir = &cfg.output.dir;
    let mut files = Vec::new();
    if write_files {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let mut records = Vec::new();
    let mut field = initial.clone();
    let e0 = energy(&initial);
    let h0 = helicity_invariant_with(&ops, &initial);
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    // helicity is a sum of |a|^2 = mean |psi|^2, energy = 1/2 sum |psi|^2 dV
    let h_scale = 2.0 * scale / cfg.grid.volume();

    for n in 0..=cfg.steps {
        let next = if n < cfg.steps { Some(prop.step(&field)?) } else { None };
        if n % cfg.output.every == 0 || n == cfg.steps {
            let probe = match &next {
                Some(f) => f.clone(),
                None => prop.step(&field)?,
            };
            let (res1, res2) = maxwell_residual_with(&ops, &field, &probe, cfg.dt, cfg.c)?;
            let (gauss_e, gauss_b) = ops.gauss_residual(&field);
            records.push(DiagnosticRecord {
                step: n,
                t: n as f64 * cfg.dt,
                energy: energy(&field),
                helicity: helicity_invariant_with(&ops, &field),
                gauss_e,
                gauss_b,
                res1,
                res2,
                max_abs: field.max_abs(),
            });
            if write_files && cfg.output.snapshots {
                let p = dir.join(format!("snapshot_{n:06}.rsf"));
                write_snapshot(&p, &field, n as f64 * cfg.dt)?;
                files.push(p);
                if cfg.output.csv {
                    let p = dir.join(format!("snapshot_{n:06}.csv"));
                    write_csv(&p, &field)?;
                    files.push(p);
                }
            }
        }
        if let Some(f) = next {
            if !f.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "field became non-finite at step {}",
                    n + 1
                )));
            }
            field = f;
        }
    }

    if write_files {
        let p = dir.join(&cfg.output.diagnostics);
        std::fs::write(&p, diagnostics_csv(&records)).map_err(|e| Error::io(&p, e))?;
        files.push(p);
    }

    let fold = |f: &dyn Fn(&DiagnosticRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    let max_energy_drift = fold(&|r| (r.energy - e0).abs() / scale);
    let max_helicity_drift = fold(&|r| (r.helicity - h0).abs() / h_scale);
    let max_gauss = fold(&|r| r.gauss_e.max(r.gauss_b));
    let max_maxwell = fold(&|r| r.res1.max(r.res2));
    let final_vs_initial = field.relative_difference(&initial)?;

    let mut violations = Vec::new();
    let checks = &cfg.checks;
    if max_energy_drift > checks.energy_drift {
        violations.push(format!(
            "energy drift {max_energy_drift:.3e} exceeds {:.3e}",
            checks.energy_drift
        ));
    }
    if max_helicity_drift > checks.helicity_drift {
        violations.push(format!(
            "helicity drift {max_helicity_drift:.3e} exceeds {:.3e}",
            checks.helicity_drift
        ));
    }
    if max_gauss > checks.gauss {
        violations.push(format!("Gauss residual {max_gauss:.3e} exceeds {:.3e}", checks.gauss));
    }
    if let Some(limit) = checks.maxwell {
        if max_maxwell > limit {
            violations.push(format!("Maxwell residual {max_maxwell:.3e} exceeds {limit:.3e}"));
        }
    }

    Ok(RunSummary {
        records,
        max_energy_drift,
        max_helicity_drift,
        max_gauss,
        max_maxwell,
        final_vs_initial,
        violations,
        files,
    })
}

/// Human-readable summary lines.
pub fn format_summary(cfg: &SimConfig, s: &RunSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "grid            {}", cfg.grid);
    let _ = writeln!(out, "steps           {} x dt = {} (c = {})", cfg.steps, cfg.dt, cfg.c);
    let _ = writeln!(out, "energy drift    {:.3e}", s.max_energy_drift);
    let _ = writeln!(out, "helicity drift  {:.3e}", s.max_helicity_drift);
    let _ = writeln!(out, "gauss residual  {:.3e}", s.max_gauss);
    let _ = writeln!(out, "maxwell resid.  {:.3e}", s.max_maxwell);
    let _ = writeln!(out, "final/initial   {:.3e}", s.final_vs_initial);
    for v in &s.violations {
        let _ = writeln!(out, "VIOLATION       {v}");
    }
    let _ = writeln!(out, "{}", if s.passed() { "PASS" } else { "FAIL" });
    out
}

/// Path of the diagnostics file a run would write.
pub fn diagnostics_path(cfg: &SimConfig) -> PathBuf {
    Path::new(&cfg.output.dir).join(&cfg.output.diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimConfig;

    fn cfg(extra: &str) -> SimConfig {
        SimConfig::parse(&format!(
            "grid.nx = 8\ntime.dt = 0.05\ntime.steps = 20\noutput.every = 5\ninit.modes = 1,0,0,1,1,0; 0,1,1,-1,0.5,0.5\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn plane_wave_run_conserves_invariants() {
        let s = run(&cfg(""), false).unwrap();
        assert!(s.passed(), "{:?}", s.violations);
        assert_eq!(s.records.len(), 5);
        assert!(s.max_energy_drift < 1e-13);
        assert!(s.max_helicity_drift < 1e-13);
    }

    #[test]
    fn one_period_returns_to_start() {
        let c = SimConfig::parse(
            "grid.nx = 8\ntime.dt = 0.0625\ntime.steps = 16\ninit.modes = 1,0,0,1,1,0; -1,0,0,-1,0.3,0\n",
        )
        .unwrap();
        let s = run(&c, false).unwrap();
        assert!(s.final_vs_initial < 1e-12, "{}", s.final_vs_initial);
    }

    #[test]
    fn unprojected_longitudinal_mode_is_flagged() {
        let c = SimConfig::parse(
            "grid.nx = 8\ntime.dt = 0.05\ntime.steps = 2\ninit.project_transverse = false\ninit.modes = 1,0,0,0,1,0\n",
        )
        .unwrap();
        let s = run(&c, false).unwrap();
        assert!(!s.passed());
        assert!(s.max_gauss > 0.5);
    }

    #[test]
    fn zero_steps_emits_single_record() {
        let c = SimConfig::parse("grid.nx = 4\ntime.dt = 0.1\ntime.steps = 0\ninit.modes = 1,0,0,1,1,0\n").unwrap();
        let s = run(&c, false).unwrap();
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.final_vs_initial, 0.0);
    }

    #[test]
    fn gaussian_packet_is_made_transverse() {
        let c = SimConfig::parse(
            "grid.nx = 16\ntime.dt = 0.01\ntime.steps = 3\ninit.kind = gaussian\ninit.width = 0.15\ninit.k = 12.566370614359172,0,0\n",
        )
        .unwrap();
        let f = initial_field(&c).unwrap();
        let (ge, gb) = SpectralOps::new(c.grid).gauss_residual(&f);
        assert!(ge < 1e-12 && gb < 1e-12);
        assert!(run(&c, false).unwrap().passed());
    }

    #[test]
    fn rejects_aliased_modes() {
        let c = SimConfig::parse("grid.nx = 4\ntime.dt = 0.1\ntime.steps = 1\ninit.modes = 2,0,0,1,1,0\n").unwrap();
        assert!(matches!(initial_field(&c), Err(Error::Aliased { .. })));
    }
}
