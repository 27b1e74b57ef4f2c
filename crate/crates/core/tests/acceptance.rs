//! Acceptance criteria. Runs as a plain binary (no libtest harness) and
//! prints one PASS/FAIL line per criterion, followed by indented details.
//! Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsphoton::fdtd::fdtd_error;
use rsphoton::field::RSField;
use rsphoton::grid::Grid3;
use rsphoton::helicity::{helicity_basis, sample_plane_wave, Helicity, PlaneWaveMode, WaveVector};
use rsphoton::identities::all_identities;
use rsphoton::propagator::{
    dispersion_check, helicity_invariant_with, lowest_modes, maxwell_residual, negative_helicity_residual,
    positive_helicity_residual, step_exact, ExactPropagator,
};
use rsphoton::spectral::{energy, SpectralOps};
use rsphoton::spin::{check_spin_algebra, pauli_triple, spin1_cartesian, spin_triple_twice};

struct Outcome {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

fn outcome(passed: bool, summary: impl Into<String>, details: Vec<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
        details,
    }
}

fn mode_field(grid: Grid3, j: [i64; 3], h: Helicity, amp: Complex64, c: f64) -> RSField {
    let k = WaveVector(grid.wavevector_of(j));
    sample_plane_wave(grid, &PlaneWaveMode::new(k, h, amp).unwrap(), 0.0, c).unwrap()
}

fn symbolic_suite() -> Outcome {
    let start = Instant::now();
    let reports: Vec<_> = all_identities().iter().map(|i| i.verify()).collect();
    let secs = start.elapsed().as_secs_f64();
    let zero = reports.iter().filter(|r| r.residual_is_zero).count();
    let details = reports
        .iter()
        .map(|r| format!("{:<26} residual terms {}", r.name, r.residual_terms))
        .collect();
    outcome(
        reports.len() == 11 && zero == 11 && secs < 10.0,
        format!(
            "{zero}/{} identities with zero residual in {secs:.3} s (limit 10 s)",
            reports.len()
        ),
        details,
    )
}

fn spin_algebra() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for (label, t) in [("k=1/2 Pauli", pauli_triple()), ("k=1 Cartesian", spin1_cartesian())] {
        let r = check_spin_algebra(&t);
        ok &= r.exact && r.passed();
        details.push(format!("{label}: exact={} passed={}", r.exact, r.passed()));
    }
    for twice_k in 3..=6 {
        let r = check_spin_algebra(&spin_triple_twice(twice_k));
        let worst = r.max_residual();
        ok &= r.passed() && worst < 1e-13;
        details.push(format!("k={}/2: max Frobenius residual {worst:.2e}", twice_k));
    }
    outcome(
        ok,
        "commutators and Casimir exact for k=1/2,1; < 1e-13 for k=3/2..3",
        details,
    )
}

fn curl_identity() -> Outcome {
    let grid = Grid3::new([16, 16, 16], [1.0, 1.3, 0.7]).unwrap();
    let ops = SpectralOps::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = RSField::from_fn(grid, |_| {
            std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        });
        let a = ops.curl(&f);
        let b = ops.curl_via_spin_matrices(&f);
        worst = worst.max(b.relative_difference(&a).unwrap());
    }
    outcome(
        worst < 1e-13,
        format!("max relative difference {worst:.2e} over 20 random fields on 16^3 (limit 1e-13)"),
        vec![],
    )
}

fn conservation() -> Outcome {
    let start = Instant::now();
    let grid = Grid3::cubic(32, 1.0).unwrap();
    let c = 1.0;
    let modes = [
        ([1, 0, 0], Helicity::Plus, Complex64::new(1.0, 0.0)),
        ([0, 2, -1], Helicity::Minus, Complex64::new(0.4, 0.3)),
        ([3, -1, 2], Helicity::Plus, Complex64::new(-0.2, 0.5)),
        ([-2, 2, 2], Helicity::Minus, Complex64::new(0.1, -0.25)),
        ([5, 4, -6], Helicity::Plus, Complex64::new(0.05, 0.05)),
    ];
    let mut f0 = RSField::zeros(grid);
    for (j, h, a) in modes {
        f0 = f0.add(&mode_field(grid, j, h, a, c)).unwrap();
    }
    let ops = SpectralOps::new(grid);
    let dt = 1e-3;
    let prop = ExactPropagator::with_ops(ops.clone(), dt, c).unwrap();
    let e0 = energy(&f0);
    let h0 = helicity_invariant_with(&ops, &f0);
    let (ge0, gb0) = ops.gauss_residual(&f0);
    let mut max_de = 0.0f64;
    let mut max_dh = 0.0f64;
    let mut max_gauss = ge0.max(gb0);
    let mut f = f0;
    let steps = 10_000;
    for n in 1..=steps {
        f = prop.step(&f).unwrap();
        if n % 100 == 0 {
            max_de = max_de.max((energy(&f) - e0).abs() / e0);
            max_dh = max_dh.max((helicity_invariant_with(&ops, &f) - h0).abs() / h0.abs());
            let (ge, gb) = ops.gauss_residual(&f);
            max_gauss = max_gauss.max(ge).max(gb);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        max_de < 1e-11 && max_dh < 1e-11 && max_gauss < 1e-11 && secs < 60.0,
        format!("32^3, 10^4 steps of 5 modes in {secs:.1} s (limit 60 s)"),
        vec![
            format!("energy drift   {max_de:.2e} (limit 1e-11)"),
            format!("helicity drift {max_dh:.2e} relative to H0 = {h0:.6} (limit 1e-11)"),
            format!("gauss residual {max_gauss:.2e} (limit 1e-11)"),
        ],
    )
}

fn maxwell_recovery() -> Outcome {
    let grid = Grid3::cubic(32, 1.0).unwrap();
    let c = 1.0;
    let j = [1, 1, 0];
    let f0 = mode_field(grid, j, Helicity::Minus, Complex64::new(1.0, 0.0), c);
    let period = 2.0 * PI / (c * WaveVector(grid.wavevector_of(j)).norm());
    let levels = [64.0, 128.0, 256.0];
    let res: Vec<f64> = levels
        .iter()
        .map(|div| {
            let dt = period / div;
            let (a, b) = maxwell_residual(&f0, &step_exact(&f0, dt, c).unwrap(), dt, c).unwrap();
            a.max(b)
        })
        .collect();
    let ratios = [res[0] / res[1], res[1] / res[2]];
    let ratio_ok = ratios.iter().all(|r| (r - 4.0).abs() <= 0.3);
    let finest_ok = res[2] < 1e-6;
    let mut details: Vec<String> = levels
        .iter()
        .zip(&res)
        .map(|(d, r)| format!("dt = T/{d:<3}  residual {r:.4e}"))
        .collect();
    details.push(format!(
        "ratios {:.4}, {:.4} (required 4.0 +/- 0.3): {}",
        ratios[0],
        ratios[1],
        if ratio_ok { "ok" } else { "no" }
    ));
    details.push(format!(
        "finest level {:.3e} (required < 1e-6): {}; single-mode midpoint residual is 1 - sinc(omega dt / 2) = {:.3e}",
        res[2],
        if finest_ok { "ok" } else { "no" },
        1.0 - (PI / 256.0).sin() / (PI / 256.0)
    ));
    outcome(
        ratio_ok && finest_ok,
        "midpoint Maxwell residuals at T/64, T/128, T/256 on 32^3",
        details,
    )
}

fn dispersion() -> Outcome {
    let grid = Grid3::cubic(32, 1.0).unwrap();
    let c = 1.0;
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for j in lowest_modes(&grid, 5) {
        let r = dispersion_check(grid, j, 100, 2e-3, c).unwrap();
        worst = worst.max(r.relative_error);
        details.push(format!(
            "j = {:?}: omega {:.16e} vs c|k| {:.16e}, error {:.2e}",
            j, r.omega_measured, r.omega_expected, r.relative_error
        ));
    }
    outcome(
        worst < 1e-10,
        format!("5 lowest modes, max relative error {worst:.2e} (limit 1e-10)"),
        details,
    )
}

fn fdtd_oracle() -> Outcome {
    let start = Instant::now();
    let c = 1.0;
    let t_end = 0.5;
    let err = |n: usize, steps: usize| {
        let grid = Grid3::cubic(n, 1.0).unwrap();
        let f = mode_field(grid, [1, 1, 0], Helicity::Plus, Complex64::new(1.0, 0.0), c);
        fdtd_error(&f, t_end, steps, c).unwrap()
    };
    let e16 = err(16, 32);
    let e32 = err(32, 64);
    let ratio = e16 / e32;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        (ratio - 4.0).abs() <= 0.5 && secs < 120.0,
        format!("FDTD vs spectral, 16^3 -> 32^3: ratio {ratio:.4} (required 4.0 +/- 0.5) in {secs:.2} s"),
        vec![format!("L2 error 16^3/32 steps {e16:.4e}, 32^3/64 steps {e32:.4e}")],
    )
}

fn helicity_assignment() -> Outcome {
    let grid = Grid3::new([16, 16, 16], [1.0, 1.0, 2.0]).unwrap();
    let ops = SpectralOps::new(grid);
    let c = 1.5;
    let j = [1, -2, 3];
    let k = WaveVector(grid.wavevector_of(j));
    let amp = Complex64::new(0.8, -0.6);
    let i = Complex64::new(0.0, 1.0);

    // sigma = -1 wave from the propagator's convention; analytic time derivative
    let minus = PlaneWaveMode::new(k, Helicity::Minus, amp).unwrap();
    let omega = minus.angular_frequency(c);
    let psi = sample_plane_wave(grid, &minus, 0.0, c).unwrap();
    let dpsi = psi.scaled(-i * omega);
    let r_neg = negative_helicity_residual(&ops, &psi, &dpsi, c).unwrap();
    let r_pos = positive_helicity_residual(&ops, &psi.conj(), &dpsi.conj(), c).unwrap();
    // the same field solves d/dt psi = i c curl psi
    let evo = ops.curl(&psi).scaled(i * c).relative_difference(&dpsi).unwrap();

    // sigma = +1 solution: its conjugate is positive-frequency and solves (i/c) d/dt psi - curl psi = 0
    let plus = PlaneWaveMode::new(k, Helicity::Plus, amp).unwrap();
    let psi_p = sample_plane_wave(grid, &plus, 0.0, c).unwrap();
    let dpsi_p = psi_p.scaled(-i * plus.angular_frequency(c));
    let r_pos_plus = positive_helicity_residual(&ops, &psi_p.conj(), &dpsi_p.conj(), c).unwrap();

    // control: a positive-frequency sigma = +1 wave is not a negative-helicity solution
    let e_plus = helicity_basis(&k).unwrap().e_plus;
    let w = c * k.norm();
    let ctrl = RSField::from_fn(grid, |x| {
        let ph = amp * Complex64::from_polar(1.0, (0..3).map(|a| k.0[a] * x[a]).sum());
        e_plus.map(|z| z * ph)
    });
    let r_ctrl = negative_helicity_residual(&ops, &ctrl, &ctrl.scaled(-i * w), c).unwrap();

    let ok = omega > 0.0 && r_neg < 1e-12 && r_pos < 1e-12 && evo < 1e-12 && r_pos_plus < 1e-12 && r_ctrl > 0.5;
    outcome(
        ok,
        format!("sigma=-1 positive-frequency wave: (i/c) d/dt psi + curl psi residual {r_neg:.2e}, conjugate in (i/c) d/dt psi - curl psi residual {r_pos:.2e} (limit 1e-12)"),
        vec![
            format!("omega = {omega:.6} > 0 for sigma = -1"),
            format!("evolution equation residual {evo:.2e}"),
            format!("sigma=+1 solution, conjugate in the positive-helicity operator: {r_pos_plus:.2e}"),
            format!("control: positive-frequency sigma=+1 in the negative-helicity operator: {r_ctrl:.3} (expected O(1))"),
        ],
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 symbolic identities", symbolic_suite),
        ("2 spin algebra", spin_algebra),
        ("3 curl identity", curl_identity),
        ("4 conservation", conservation),
        ("5 maxwell recovery", maxwell_recovery),
        ("6 dispersion", dispersion),
        ("7 fdtd oracle", fdtd_oracle),
        ("8 helicity assignment", helicity_assignment),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let o = run();
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.summary
        );
        for d in &o.details {
            println!("      {d}");
        }
        if !o.passed {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 8 criteria passed");
    } else {
        println!(
            "acceptance: {} of 8 criteria failed: {}",
            failed.len(),
            failed.join(", ")
        );
        std::process::exit(1);
    }
}
