use dirac_l2::algebra::{basis_product, re_cyclic_check, MultiIndex};
use dirac_l2::rng::{normal, trial_rng};
use dirac_l2::Multivector;
use proptest::prelude::*;

fn random_mv(n: usize, seed: u64, k: u64) -> Multivector {
    let mut rng = trial_rng(seed, k);
    Multivector::from_coeffs(n, (0..1 << n).map(|_| normal(&mut rng)).collect()).unwrap()
}

fn random_paravector(n: usize, seed: u64) -> Multivector {
    let mut rng = trial_rng(seed, 99);
    let mut c = vec![0.0; 1 << n];
    c[0] = normal(&mut rng);
    for j in 0..n {
        c[1 << j] = normal(&mut rng);
    }
    Multivector::from_coeffs(n, c).unwrap()
}

#[test]
fn generator_relations() {
    for n in 2..=8 {
        for j in 1..=n {
            for k in 1..=n {
                let (a, b) = (Multivector::e(n, j), Multivector::e(n, k));
                let s = &(&a * &b) + &(&b * &a);
                let expect = if j == k { Multivector::scalar(n, -2.0) } else { Multivector::zero(n) };
                assert_eq!(s, expect);
            }
        }
    }
}

#[test]
fn conjugation_on_blades() {
    let n = 5;
    for a in 0u16..1 << n {
        for b in 0u16..1 << n {
            let (x, y) = (Multivector::basis(n, MultiIndex::from_bits(a)), Multivector::basis(n, MultiIndex::from_bits(b)));
            assert_eq!(x.conj().conj(), x);
            assert_eq!((&x * &y).conj(), &y.conj() * &x.conj());
        }
    }
    assert!(basis_product(MultiIndex::from_bits(1), MultiIndex::from_bits(1), 13).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn associativity(n in 2usize..9, seed in any::<u64>()) {
        let (f, g, h) = (random_mv(n, seed, 0), random_mv(n, seed, 1), random_mv(n, seed, 2));
        let l = &(&f * &g) * &h;
        let r = &f * &(&g * &h);
        let scale = f.norm() * g.norm() * h.norm();
        prop_assert!((&l - &r).norm() <= 1e-12 * scale);
    }

    #[test]
    fn product_norm_bound(n in 2usize..9, seed in any::<u64>()) {
        let (f, g) = (random_mv(n, seed, 0), random_mv(n, seed, 1));
        let p = &f * &g;
        prop_assert!(p.norm_sq() <= (1u64 << n) as f64 * f.norm_sq() * g.norm_sq());
    }

    #[test]
    fn paravector_multiplicative(n in 2usize..9, seed in any::<u64>()) {
        let f = random_paravector(n, seed);
        let g = random_mv(n, seed, 3);
        let want = f.norm() * g.norm();
        prop_assert!(((&f * &g).norm() - want).abs() <= 1e-12 * want);
        prop_assert!(((&g * &f).norm() - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn re_cyclic_and_anti_automorphism(n in 2usize..9, seed in any::<u64>()) {
        let (f, g) = (random_mv(n, seed, 4), random_mv(n, seed, 5));
        let scale = f.norm() * g.norm();
        prop_assert!(re_cyclic_check(&f, &g).unwrap() <= 1e-12 * scale);
        let lhs = (&f * &g).conj();
        let rhs = &g.conj() * &f.conj();
        prop_assert!((&lhs - &rhs).norm() <= 1e-12 * scale);
        prop_assert_eq!(f.conj().conj(), f.clone());
        // inner product is Re(f conj g)
        let ip = f.inner(&g).unwrap();
        prop_assert!((ip - (&f * &g.conj()).re()).abs() <= 1e-12 * scale);
    }
}

#[test]
fn ten_thousand_pairs_per_dimension() {
    for n in 2..=8 {
        let mut worst_bound: f64 = 0.0;
        let mut worst_assoc: f64 = 0.0;
        for t in 0..10_000u64 {
            let (f, g) = (random_mv(n, 1000 + n as u64, 2 * t), random_mv(n, 1000 + n as u64, 2 * t + 1));
            let p = &f * &g;
            worst_bound = worst_bound.max(p.norm_sq() / ((1u64 << n) as f64 * f.norm_sq() * g.norm_sq()));
            if t % 10 == 0 {
                let h = random_mv(n, 2000 + n as u64, t);
                let d = (&(&p * &h) - &(&f * &(&g * &h))).norm() / (f.norm() * g.norm() * h.norm());
                worst_assoc = worst_assoc.max(d);
            }
        }
        assert!(worst_bound <= 1.0, "n={n}: {worst_bound}");
        assert!(worst_assoc <= 1e-12, "n={n}: {worst_assoc}");
    }
}
