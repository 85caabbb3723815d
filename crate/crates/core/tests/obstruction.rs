use dirac_l2::fields::{gen_monogenic_poly, kelvin, Polynomial};
use dirac_l2::obstruction::*;
use dirac_l2::rng::trial_rng;
use dirac_l2::special::sphere_area;
use dirac_l2::{CliffordField, Error, Multivector};
use std::f64::consts::PI;

#[test]
fn exact_norms() {
    let r = counterexample_norms(3, 10).unwrap();
    assert!((r.norm_u_sq - 20.0 * PI).abs() < 1e-12);
    assert!((r.norm_u_sq - 62.8319).abs() < 1e-4);
    assert!((r.weighted_f_integral - PI / 15.0).abs() < 1e-15);
    assert_eq!(r.ratio, 300.0);
    assert_eq!(counterexample_norms(4, 1).unwrap().ratio, 8.0);
    assert!(matches!(counterexample_norms(2, 1), Err(Error::Parameter(_))));
    for n in 3..=6 {
        for m in 1..20u32 {
            let a = counterexample_norms(n, m).unwrap();
            assert_eq!(a.ratio, (m * m) as f64 * (n * (n - 2)) as f64);
            assert!((a.norm_u_sq / a.weighted_f_integral / a.ratio - 1.0).abs() < 1e-14);
            assert!(counterexample_norms(n, m + 1).unwrap().ratio > a.ratio);
        }
    }
}

#[test]
fn crosscheck_grid() {
    for n in 3..=5 {
        for m in [1u32, 3, 10] {
            let r = counterexample_quadrature_crosscheck(n, m, 1e-10).unwrap();
            let c = r.quadrature_crosscheck.unwrap();
            assert!(c.rel_errors[0] <= 1e-7 && c.rel_errors[1] <= 1e-7, "n={n} m={m} {:?}", c);
            assert!(c.dirac_residual <= 1e-8, "n={n} m={m} {}", c.dirac_residual);
        }
    }
    let r = counterexample_quadrature_crosscheck(3, 100, 1e-10).unwrap();
    assert_eq!(r.ratio, 30000.0);
    assert!(r.quadrature_crosscheck.is_none() && r.note.is_some());
}

#[test]
fn dirac_of_u1_at_two() {
    let d = dirac_l2::fields::dirac(&u_m(3, 1), &[2.0, 0.0, 0.0]).unwrap();
    assert!((&d - &Multivector::vector(&[-0.25, 0.0, 0.0])).norm() < 1e-15);
}

#[test]
fn orthogonality_and_spherical_means() {
    let n = 3;
    let k1 = kelvin(&CliffordField::constant(Multivector::one(n)));
    assert_eq!(orthogonality_check(n, 2, &k1, 1e-10).unwrap(), 0.0);
    assert!(spherical_mean_zero(&k1, 2.0).unwrap() < 1e-15);

    let p = Polynomial::new(
        n,
        vec![(vec![1, 0, 0], Multivector::e(n, 2)), (vec![0, 1, 0], Multivector::e(n, 1))],
    )
    .unwrap();
    let pf = CliffordField::new(n, move |x| p.eval(x));
    let h = kelvin(&pf);
    let x = [0.4, 1.1, -0.3];
    let r2: f64 = x.iter().map(|v| v * v).sum();
    assert!((h.eval(&x).re() + 2.0 * x[0] * x[1] / r2.powf(2.5)).abs() < 1e-15);
    assert!(spherical_mean_zero(&h, 2.0).unwrap() <= 1e-10);
    assert!(orthogonality_check(n, 3, &h, 1e-10).unwrap() <= 1e-8);

    let mut rng = trial_rng(21, 0);
    for d in 0..=2 {
        let mp = gen_monogenic_poly(n, d, &mut rng).unwrap();
        let h = kelvin(&mp.to_field());
        assert!(orthogonality_check(n, 7, &h, 1e-10).unwrap() <= 1e-7);
    }

    let one = CliffordField::constant(Multivector::one(n));
    assert!((spherical_mean_zero(&one, 2.0).unwrap() - sphere_area(n)).abs() < 1e-12);
    assert!(matches!(orthogonality_check(n, 1, &one, 1e-10), Err(Error::Parameter(_))));
}
