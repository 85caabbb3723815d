use dirac_l2::fields::{bump_field, random_polynomial};
use dirac_l2::quadrature::rules::sphere_rule;
use dirac_l2::quadrature::{
    closed_form_radial, integrate, truncation_radius, weighted_inner, Domain, QuadratureSpec, RadialShape,
};
use dirac_l2::rng::trial_rng;
use dirac_l2::special::sphere_area;
use dirac_l2::Weight;
use proptest::prelude::*;
use rand::Rng;
use statrs::function::gamma::gamma;

/// `int_{S^{n-1}} x^alpha`
fn sphere_monomial(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let n = alpha.len() as f64;
    let s: f64 = alpha.iter().map(|&a| a as f64).sum();
    2.0 * alpha.iter().map(|&a| gamma((a as f64 + 1.0) / 2.0)).product::<f64>() / gamma((s + n) / 2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sphere_rule_exact_on_monomials(n in 2usize..6, level in 2usize..12, seed in any::<u64>()) {
        let rule = sphere_rule(n, level).unwrap();
        let mut rng = trial_rng(seed, 0);
        let mut alpha = vec![0u32; n];
        let deg = rng.random_range(0..=level);
        for _ in 0..deg {
            alpha[rng.random_range(0..n)] += 1;
        }
        let q: f64 = (0..rule.len())
            .map(|i| rule.weights()[i] * rule.node(i).iter().zip(&alpha).map(|(x, &a)| x.powi(a as i32)).product::<f64>())
            .sum();
        let exact = sphere_monomial(&alpha);
        prop_assert!((q - exact).abs() <= 1e-12 * sphere_area(n), "{alpha:?}: {q} vs {exact}");
    }

    #[test]
    fn inner_product_bilinear_and_symmetric(seed in any::<u64>()) {
        let n = 3;
        let dom = Domain::annulus(n, 1.0, 2.0).unwrap();
        let q = QuadratureSpec::new(24, 8);
        let mut rng = trial_rng(seed, 1);
        let w = Weight::gaussian(n).unwrap();
        let c = [1.5, 0.0, 0.0];
        let u = bump_field(&c, 0.4, random_polynomial(n, 1, &mut rng)).unwrap();
        let v = bump_field(&c, 0.4, random_polynomial(n, 1, &mut rng)).unwrap();
        let uv = weighted_inner(&u, &v, &w, &dom, &q).unwrap().value;
        let vu = weighted_inner(&v, &u, &w, &dom, &q).unwrap().value;
        prop_assert!((uv - vu).abs() <= 1e-14 * uv.abs().max(1e-300) + 1e-300);
        let s: f64 = rng.random_range(-2.0..2.0);
        let su = u.left_mul(&dirac_l2::Multivector::scalar(n, s));
        let suv = weighted_inner(&su, &v, &w, &dom, &q).unwrap().value;
        prop_assert!((suv - s * uv).abs() <= 1e-12 * uv.abs().max(1e-300));
    }
}

#[test]
fn refinement_stays_within_error_estimate() {
    let n = 3;
    let dom = Domain::annulus(n, 1.0, 2.0).unwrap();
    let w = Weight::gaussian(n).unwrap();
    let mut rng = trial_rng(9, 0);
    for _ in 0..5 {
        let u = dirac_l2::identity::random_bump(&dom, 2, &mut rng).unwrap();
        let ball = u.support().unwrap().clone();
        let region = Domain::ball(ball.center, ball.radius).unwrap();
        let q = QuadratureSpec::new(32, 12);
        let a = weighted_inner(&u, &u, &w, &region, &q).unwrap();
        let b = weighted_inner(&u, &u, &w, &region, &QuadratureSpec::new(64, 24)).unwrap();
        assert!((a.value - b.value).abs() <= 10.0 * a.est_error + 1e-14 * a.value, "{a:?} {b:?}");
    }
}

#[test]
fn gaussian_moments_after_truncation() {
    for n in [2usize, 3, 4] {
        let w = Weight::gaussian(n).unwrap();
        for p in [0.0, 2.0, 4.0] {
            let r = truncation_radius(&w, p, 1.0, 1e-12).unwrap();
            let dom = Domain::ball(vec![0.0; n], r).unwrap();
            let q = QuadratureSpec::new(64, 10);
            let v = integrate(&dom, &q, |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                r2.powf(p / 2.0) * (-r2).exp()
            })
            .unwrap();
            let exact = sphere_area(n)
                * closed_form_radial(RadialShape::PowerTimesGaussian(p + n as f64 - 1.0), 0.0, f64::INFINITY).unwrap();
            assert!((v.value - exact).abs() <= 1e-8 * exact, "n={n} p={p}: {} vs {exact}", v.value);
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dom = Domain::annulus(3, 1.0, 2.0).unwrap();
    let q = QuadratureSpec::default();
    let f = |x: &[f64]| (x[0] * x[1]).sin() + x[2];
    let a = integrate(&dom, &q, f).unwrap();
    let b = integrate(&dom, &q, f).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.est_error.to_bits(), b.est_error.to_bits());
}
