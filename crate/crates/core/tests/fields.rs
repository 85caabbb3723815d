use dirac_l2::fields::{
    bump_field, dirac, gen_monogenic_poly, kelvin, random_polynomial, weight_builtin, Polynomial, WeightParams,
};
use dirac_l2::rng::{normal, trial_rng};
use dirac_l2::{CliffordField, Multivector, Weight};
use proptest::prelude::*;
use rand::Rng;

fn random_point_in_shell(n: usize, r0: f64, r1: f64, rng: &mut impl Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let s = rng.random_range(r0..r1);
    v.iter().map(|x| x * s / r).collect()
}

fn builtins(n: usize) -> Vec<Weight> {
    let mut a = vec![1.0; n];
    a[0] = 1.01;
    a[1] = 0.99;
    vec![
        Weight::log_radial(n).unwrap(),
        Weight::gaussian(n).unwrap(),
        Weight::radial_power(n, -1.0).unwrap(),
        Weight::single_quadratic(n).unwrap(),
        Weight::aniso_quadratic(a).unwrap(),
        Weight::linear((1..=n).map(|i| i as f64).collect()).unwrap(),
        weight_builtin("gauss", &WeightParams::default(), n).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dphi_norm_is_gradient_norm(n in 2usize..6, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let x = random_point_in_shell(n, 0.5, 3.0, &mut rng);
        for w in builtins(n) {
            let g: f64 = w.grad(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((w.dphi(&x).norm() - g).abs() <= 1e-13 * g.max(1.0));
        }
    }

    #[test]
    fn monogenic_polynomials_are_monogenic(n in 2usize..6, d in 0usize..3, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 1);
        let p = gen_monogenic_poly(n, d, &mut rng).unwrap();
        let f = p.to_field();
        for _ in 0..5 {
            let x = random_point_in_shell(n, 0.1, 2.0, &mut rng);
            prop_assert!(dirac(&f, &x).unwrap().norm() <= 1e-10);
        }
    }

    #[test]
    fn bumps_vanish_at_support_sphere(n in 2usize..5, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 2);
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u = bump_field(&c, 0.7, random_polynomial(n, 2, &mut rng)).unwrap();
        let dir = random_point_in_shell(n, 1.0, 1.0 + 1e-12, &mut rng);
        let x: Vec<f64> = c.iter().zip(&dir).map(|(c, d)| c + 0.7 * (1.0 - 1e-3) * d).collect();
        prop_assert!(u.eval(&x).norm() <= 1e-12);
        for p in u.partials(&x).unwrap() {
            prop_assert!(p.norm() <= 1e-12);
        }
    }
}

fn kelvin_residual(g: &CliffordField, x: &[f64]) -> f64 {
    let n = x.len();
    let lhs = dirac(&kelvin(g), x).unwrap();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let y: Vec<f64> = x.iter().map(|v| v / r2).collect();
    let j = Multivector::vector(x).scale(r2.powf(-(n as f64 + 2.0) / 2.0));
    let corr = &j * &dirac(g, &y).unwrap();
    (&lhs + &corr).norm()
}

#[test]
fn kelvin_identity_for_polynomials() {
    for n in [3usize, 4] {
        let mut rng = trial_rng(5, n as u64);
        for d in 0..=2 {
            let p = random_polynomial(n, d, &mut rng);
            let g = CliffordField::new(n, {
                let p = p.clone();
                move |x| p.eval(x)
            })
            .with_partials(move |x| p.partials(x));
            for _ in 0..50 {
                let x = random_point_in_shell(n, 1.0, 3.0, &mut rng);
                assert!(kelvin_residual(&g, &x) <= 1e-6);
            }
        }
        // finite-difference path
        let p = random_polynomial(n, 2, &mut rng);
        let g = CliffordField::new(n, move |x| p.eval(x));
        let x = random_point_in_shell(n, 1.0, 3.0, &mut rng);
        assert!(kelvin_residual(&g, &x) <= 1e-6);
    }
}

#[test]
fn kelvin_of_monogenic_is_monogenic() {
    for n in [3usize, 4] {
        let mut rng = trial_rng(6, n as u64);
        for d in 0..=2 {
            let g = gen_monogenic_poly(n, d, &mut rng).unwrap().to_field();
            let k = kelvin(&g);
            for _ in 0..50 {
                let x = random_point_in_shell(n, 1.0, 3.0, &mut rng);
                assert!(dirac(&k, &x).unwrap().norm() <= 1e-8);
            }
        }
    }
    let _ = Polynomial::constant(Multivector::one(3));
}
