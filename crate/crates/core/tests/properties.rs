use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use rsphoton::exact::QComplex;
use rsphoton::field::{from_rs, to_rs, EMField, RSField};
use rsphoton::grid::Grid3;
use rsphoton::helicity::{apply_k_dot_s, helicity_basis, plane_wave_rs, Helicity, PlaneWaveMode, WaveVector};
use rsphoton::identities::all_identities;
use rsphoton::poly::{Poly, Var};
use rsphoton::propagator::{helicity_invariant, step_exact};
use rsphoton::spectral::{energy, SpectralOps};

fn small_poly() -> impl Strategy<Value = Poly> {
    let term = (-3i64..=3, -3i64..=3, 0usize..7, 0u32..3);
    prop::collection::vec(term, 0..5).prop_map(|terms| {
        let mut p = Poly::zero();
        for (re, im, v, e) in terms {
            let var = Var::ALL[v];
            p = &p + &Poly::var(var).pow(e).scale(&QComplex::int(re, im));
        }
        p
    })
}

fn cvec() -> impl Strategy<Value = [Complex64; 3]> {
    prop::array::uniform3((-10.0f64..10.0, -10.0f64..10.0)).prop_map(|a| a.map(|(r, i)| Complex64::new(r, i)))
}

fn kvec() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-20.0f64..20.0).prop_filter("nonzero", |k| k.iter().map(|x| x * x).sum::<f64>() > 1e-6)
}

fn cross(k: &[f64; 3], v: &[Complex64; 3]) -> [Complex64; 3] {
    [
        v[2] * k[1] - v[1] * k[2],
        v[0] * k[2] - v[2] * k[0],
        v[1] * k[0] - v[0] * k[1],
    ]
}

fn norm(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_laws(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(), a.clone());
    }

    #[test]
    fn polynomial_eval_is_homomorphism(a in small_poly(), b in small_poly(), vals in prop::array::uniform7(-5i64..=5)) {
        let pt: [BigRational; 7] = vals.map(|v| BigRational::from_integer(BigInt::from(v)));
        let prod = (&a * &b).eval(&pt);
        prop_assert_eq!(prod, a.eval(&pt) * b.eval(&pt));
        prop_assert_eq!((&a + &b).eval(&pt), a.eval(&pt) + b.eval(&pt));
    }

    #[test]
    fn k_dot_s_matches_cross_product(k in kvec(), v in cvec()) {
        let m = apply_k_dot_s(&WaveVector(k), &v);
        let x = cross(&k, &v).map(|z| z * Complex64::new(0.0, 1.0));
        let d: [Complex64; 3] = std::array::from_fn(|a| m[a] - x[a]);
        prop_assert!(norm(&d) <= 1e-14 * (1.0 + norm(&x)));
    }

    #[test]
    fn helicity_basis_properties(k in kvec()) {
        let kv = WaveVector(k);
        let b = helicity_basis(&kv).unwrap();
        prop_assert!(b.orthonormality_residual() < 1e-13);
        prop_assert!(b.eigen_residual() / kv.norm() < 1e-13);
        let kh = kv.unit().unwrap();
        // e_zero parallel to k, e_+- transverse
        let par: f64 = (0..3).map(|a| (b.e_zero[a] - Complex64::new(kh[a], 0.0)).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(par < 1e-13);
        for e in [b.e_plus, b.e_minus] {
            let dot: Complex64 = (0..3).map(|a| e[a] * kh[a]).sum();
            prop_assert!(dot.norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_is_periodic_in_time(j in prop::array::uniform3(-3i64..=3), minus in any::<bool>(), c in 0.5f64..3.0) {
        prop_assume!(j != [0, 0, 0]);
        let k = WaveVector(j.map(|x| 2.0 * std::f64::consts::PI * x as f64));
        let h = if minus { Helicity::Minus } else { Helicity::Plus };
        let mode = PlaneWaveMode::new(k, h, Complex64::new(0.3, 0.9)).unwrap();
        let period = 2.0 * std::f64::consts::PI / (c * k.norm());
        let x = [0.1, 0.7, 0.3];
        let a = plane_wave_rs(&mode, x, 0.2, c).unwrap();
        let b = plane_wave_rs(&mode, x, 0.2 + period, c).unwrap();
        let d: [Complex64; 3] = std::array::from_fn(|i| a[i] - b[i]);
        prop_assert!(norm(&d) < 1e-12 * norm(&a));
    }
}

fn random_field(grid: Grid3, seed: u64) -> RSField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    RSField::from_fn(grid, |_| {
        std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn step_is_unitary_and_keeps_invariants(seed in any::<u64>(), dt in -1.0f64..1.0, c in 0.2f64..4.0) {
        let grid = Grid3::new([6, 5, 4], [1.0, 0.8, 1.7]).unwrap();
        let ops = SpectralOps::new(grid);
        let f = ops.project_transverse(&random_field(grid, seed));
        let g = step_exact(&f, dt, c).unwrap();
        prop_assert!((g.norm() - f.norm()).abs() <= 1e-13 * f.norm());
        prop_assert!((energy(&g) - energy(&f)).abs() <= 1e-13 * energy(&f));
        prop_assert!((helicity_invariant(&g) - helicity_invariant(&f)).abs() <= 1e-12 * f.norm_sq() / grid.len() as f64);
        let (ge, gb) = ops.gauss_residual(&g);
        prop_assert!(ge < 1e-12 && gb < 1e-12);
    }

    #[test]
    fn step_composes(seed in any::<u64>(), a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let grid = Grid3::cubic(6, 1.0).unwrap();
        let f = random_field(grid, seed);
        let two = step_exact(&step_exact(&f, a, 1.0).unwrap(), b, 1.0).unwrap();
        let one = step_exact(&f, a + b, 1.0).unwrap();
        prop_assert!(two.relative_difference(&one).unwrap() < 1e-13);
    }

    #[test]
    fn projection_is_idempotent_and_transverse(seed in any::<u64>()) {
        let grid = Grid3::new([8, 6, 5], [1.0, 2.0, 0.5]).unwrap();
        let ops = SpectralOps::new(grid);
        let p = ops.project_transverse(&random_field(grid, seed));
        let (ge, gb) = ops.gauss_residual(&p);
        prop_assert!(ge < 1e-12 && gb < 1e-12);
        prop_assert!(ops.project_transverse(&p).relative_difference(&p).unwrap() < 1e-14);
    }

    #[test]
    fn rs_round_trip_is_exact(seed in any::<u64>()) {
        let grid = Grid3::cubic(4, 1.0).unwrap();
        let f = from_rs(&random_field(grid, seed));
        let back: EMField = from_rs(&to_rs(&f));
        prop_assert_eq!(back, f);
    }
}

#[test]
fn identities_hold_at_random_rational_points() {
    for (i, id) in all_identities().iter().enumerate() {
        assert_eq!(id.check_numeric(100, 1000 + i as u64), Ok(()), "{}", id.name);
    }
}
