//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use dirac_l2::algebra::re_cyclic_check;
use dirac_l2::fields::{dirac, gen_monogenic_poly, kelvin, random_polynomial};
use dirac_l2::rng::{normal, trial_rng};
use dirac_l2::{CliffordField, Multivector};
use dirac_l2_cli::{run, Command, DomainConfig, IdentityKind, ReportFile, RunConfig, WeightConfig};
use rand::Rng;

const TRIALS: usize = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_mv(n: usize, rng: &mut impl Rng) -> Multivector {
    Multivector::from_coeffs(n, (0..1 << n).map(|_| normal(rng)).collect()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut relations = true;
    let (mut assoc, mut cyclic, mut anti, mut para, mut bound) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for n in 2..=8 {
        for j in 1..=n {
            for k in 1..=n {
                let (a, b) = (Multivector::e(n, j), Multivector::e(n, k));
                let s = &(&a * &b) + &(&b * &a);
                let want = if j == k { Multivector::scalar(n, -2.0) } else { Multivector::zero(n) };
                relations &= s == want;
            }
        }
        let mut rng = trial_rng(1, n as u64);
        for _ in 0..10_000 {
            let (f, g, h) = (random_mv(n, &mut rng), random_mv(n, &mut rng), random_mv(n, &mut rng));
            let fg = &f * &g;
            let scale = f.norm() * g.norm();
            assoc = assoc.max((&(&fg * &h) - &(&f * &(&g * &h))).norm() / (scale * h.norm()));
            cyclic = cyclic.max(re_cyclic_check(&f, &g).unwrap() / scale);
            anti = anti.max((&fg.conj() - &(&g.conj() * &f.conj())).norm() / scale);
            bound = bound.max(fg.norm_sq() / ((1u64 << n) as f64 * f.norm_sq() * g.norm_sq()));
            let mut c = vec![0.0; 1 << n];
            c[0] = normal(&mut rng);
            for j in 0..n {
                c[1 << j] = normal(&mut rng);
            }
            let p = Multivector::from_coeffs(n, c).unwrap();
            let want = p.norm() * g.norm();
            para = para.max(((&p * &g).norm() - want).abs() / want);
        }
    }
    let worst = assoc.max(cyclic).max(anti).max(para);
    outcome(
        relations && worst <= 1e-12 && bound <= 1.0,
        format!(
            "relations exact: {relations}; assoc {assoc:.1e}, re-cyclic {cyclic:.1e}, conj {anti:.1e}, \
             paravector {para:.1e}; max |fg|^2/(2^n|f|^2|g|^2) = {bound:.3}"
        ),
    )
}

fn verify(kind: IdentityKind, n: usize, weight: &str, m: &[f64]) -> ReportFile {
    let mut cfg = RunConfig::new(Command::Verify, n);
    cfg.identity = Some(kind);
    cfg.trials = TRIALS;
    cfg.seed = 2024;
    cfg.weight = WeightConfig::named(weight);
    cfg.m_list = m.to_vec();
    run(&cfg).unwrap_or_else(|e| panic!("{kind:?} n={n}: {e}"))
}

fn worst(reports: &[(String, ReportFile)], metric: &str) -> f64 {
    reports
        .iter()
        .flat_map(|(_, r)| r.entries.iter())
        .filter_map(|e| e.metrics.get(metric))
        .fold(0.0, |a, &b| a.max(b))
}

fn failures(reports: &[(String, ReportFile)]) -> Vec<String> {
    reports
        .iter()
        .filter(|(_, r)| !r.all_pass())
        .map(|(name, r)| format!("{name} ({} failed)", r.summary.failed))
        .collect()
}

fn criterion_2() -> (Outcome, Vec<(String, ReportFile)>) {
    use IdentityKind::*;
    let mut runs = Vec::new();
    for n in [2usize, 3, 4] {
        for kind in [Duality, Bochner, Weighted, General, Radial, SingleQuadratic, Application] {
            runs.push((kind, n, "gauss"));
        }
    }
    runs.push((Duality, 3, "zero"));
    runs.push((Bochner, 2, "x1sq"));
    runs.push((General, 3, "log"));
    runs.push((Apriori2d, 2, "gauss"));
    let reports: Vec<(String, ReportFile)> = runs
        .into_iter()
        .map(|(k, n, w)| (format!("{}/n={n}/{w}", k.name()), verify(k, n, w, &[])))
        .collect();
    let bad = failures(&reports);
    let rel = worst(&reports, "rel_residual");
    let kk = worst(&reports, "relation_residual");
    let count: usize = reports.iter().map(|(_, r)| r.entries.len()).sum();
    (
        outcome(
            bad.is_empty() && rel <= 1e-6 && kk <= 1e-12,
            format!(
                "{} configurations, {count} entries; worst rel_residual {rel:.1e}, kappa-k {kk:.1e}; failing: {bad:?}",
                reports.len()
            ),
        ),
        reports,
    )
}

fn criterion_3(c2: &[(String, ReportFile)]) -> Outcome {
    let mut reports: Vec<(String, ReportFile)> = c2
        .iter()
        .filter(|(name, _)| name.starts_with("radial/") || name.starts_with("single_quadratic/"))
        .cloned()
        .collect();
    for n in [2usize, 3, 4] {
        reports.push((format!("perturbed/n={n}"), verify(IdentityKind::Perturbed, n, "aniso", &[])));
    }
    reports.push(("radial m=3,-1/n=3".into(), verify(IdentityKind::Radial, 3, "gauss", &[3.0, -1.0])));
    let bad = failures(&reports);
    let margins: usize = reports
        .iter()
        .flat_map(|(_, r)| &r.entries)
        .filter(|e| e.metrics.contains_key("margin_slack"))
        .count();
    let min = reports
        .iter()
        .flat_map(|(_, r)| &r.entries)
        .filter_map(|e| Some(e.metrics.get("margin")? / e.metrics.get("lhs").or(e.metrics.get("adjoint_norm_sq"))?))
        .fold(f64::INFINITY, f64::min);
    outcome(
        bad.is_empty() && margins >= reports.len() * TRIALS,
        format!("{margins} margins checked against the estimate; smallest relative margin {min:.2e}; failing: {bad:?}"),
    )
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    let mut rows = Vec::new();
    for n in [3usize, 4, 5] {
        let mut cfg = RunConfig::new(Command::Obstruction, n);
        cfg.m_list = vec![1.0, 3.0, 10.0];
        let r = run(&cfg).expect("obstruction runs");
        for e in r.entries.iter().filter(|e| !e.pass) {
            bad.push(e.label.clone());
        }
        for row in &r.tables["obstruction"].rows {
            let (m, ratio) = (row[1].unwrap(), row[2].unwrap_or(f64::NAN));
            let exact = m * m * (n * (n - 2)) as f64;
            if (ratio - exact).abs() > 1e-12 * exact {
                bad.push(format!("ratio n={n} m={m}"));
            }
            rows.push(format!("({n},{m})={ratio}"));
        }
    }
    outcome(bad.is_empty() && rows.len() == 9, format!("ratios {}; failing: {bad:?}", rows.join(" ")))
}

fn criterion_5() -> Outcome {
    let cfg = RunConfig::new(Command::Sharpness, 3);
    let r = run(&cfg).expect("sharpness runs");
    let ratios: Vec<f64> = r.tables["sharpness"].rows.iter().map(|row| row[1].unwrap_or(f64::NAN)).collect();
    let monotone = ratios.windows(2).all(|w| w[1] >= w[0]);
    let last = *ratios.last().unwrap();
    let cf = r.entries.iter().find(|e| e.label == "closed_form").unwrap();
    let (x, u0) = (cf.metrics["x_rel_error"], cf.metrics["u0_rel_error"]);
    outcome(
        r.all_pass() && monotone && last >= 0.24 && x <= 1e-6 && u0 <= 1e-6,
        format!("ratios {ratios:.5?}; closed forms {x:.1e}, {u0:.1e}"),
    )
}

fn kelvin_residual(g: &CliffordField, x: &[f64]) -> f64 {
    let n = x.len();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let y: Vec<f64> = x.iter().map(|v| v / r2).collect();
    let j = Multivector::vector(x).scale(r2.powf(-(n as f64 + 2.0) / 2.0));
    (&dirac(&kelvin(g), x).unwrap() + &(&j * &dirac(g, &y).unwrap())).norm()
}

fn shell_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let s = rng.random_range(0.5..3.0);
    v.iter().map(|x| x * s / r).collect()
}

fn criterion_6() -> Outcome {
    let (mut ident, mut mono) = (0f64, 0f64);
    for n in [3usize, 4] {
        let mut rng = trial_rng(6, n as u64);
        for d in 0..=2 {
            let p = random_polynomial(n, d, &mut rng);
            let q = p.clone();
            let g = CliffordField::new(n, move |x| p.eval(x)).with_partials(move |x| q.partials(x));
            let h = gen_monogenic_poly(n, d, &mut rng).unwrap().to_field();
            let k = kelvin(&h);
            for _ in 0..50 {
                let x = shell_point(n, &mut rng);
                ident = ident.max(kelvin_residual(&g, &x));
                mono = mono.max(dirac(&k, &x).unwrap().norm());
            }
        }
    }
    outcome(ident <= 1e-6 && mono <= 1e-8, format!("identity residual {ident:.1e}; monogenic case {mono:.1e}"))
}

fn criterion_7() -> Outcome {
    let mut cfg = RunConfig::new(Command::Solve, 3);
    cfg.levels = 3;
    cfg.cells = 16;
    cfg.poisson = true;
    cfg.domain = Some(DomainConfig::Annulus { r0: 0.4, r1: 2.0 });
    let r = run(&cfg).expect("solve runs");
    let t = &r.tables["solve_levels"];
    let col = |name: &str| -> Vec<f64> {
        let i = t.columns.iter().position(|c| c == name).unwrap();
        t.rows.iter().map(|row| row[i].unwrap_or(f64::NAN)).collect()
    };
    let (delta, ratio, poisson) = (col("delta_h"), col("norm_ratio"), col("poisson_ratio"));
    let decreasing = delta.windows(2).all(|w| w[1] < w[0]);
    let within = delta
        .iter()
        .zip(&ratio)
        .zip(&poisson)
        .all(|((d, a), p)| *a <= 0.25 * (1.0 + d) && *p <= (1.0 + d) / 16.0);
    let order = r.entries.iter().find(|e| e.label == "convergence_order").unwrap().metrics["min_order"];
    let bad: Vec<&str> = r.entries.iter().filter(|e| !e.pass).map(|e| e.label.as_str()).collect();
    outcome(
        r.all_pass() && decreasing && within && order >= 1.9 && delta.len() == 3,
        format!("delta_h {delta:.3?}; ratio {ratio:.4?}; poisson {poisson:.5?}; order {order:.3}; failing: {bad:?}"),
    )
}

fn criterion_8() -> Outcome {
    let mut configs = Vec::new();
    let mut c = RunConfig::new(Command::Verify, 3);
    c.identity = Some(IdentityKind::Weighted);
    c.trials = 12;
    c.seed = 99;
    configs.push(c);
    let mut c = RunConfig::new(Command::Solve, 2);
    c.poisson = true;
    configs.push(c);
    let mut c = RunConfig::new(Command::Obstruction, 3);
    c.m_list = vec![2.0];
    configs.push(c);
    configs.push(RunConfig::new(Command::Sharpness, 2));
    let same = configs.iter().all(|c| {
        let a = run(c).unwrap().without_timing().to_json();
        let b = run(c).unwrap().without_timing().to_json();
        a == b
    });
    outcome(same, format!("{} configurations run twice", configs.len()))
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |i: usize, name: &str, start: Instant, o: Outcome| {
        all &= o.pass;
        println!(
            "criterion {i} {}: {name} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    };
    let t = Instant::now();
    report(1, "Clifford algebra", t, criterion_1());
    let t = Instant::now();
    let (o, c2) = criterion_2();
    report(2, "identity suite", t, o);
    let t = Instant::now();
    report(3, "coercivity margins", t, criterion_3(&c2));
    let t = Instant::now();
    report(4, "obstruction", t, criterion_4());
    let t = Instant::now();
    report(5, "sharpness", t, criterion_5());
    let t = Instant::now();
    report(6, "Kelvin identity", t, criterion_6());
    let t = Instant::now();
    report(7, "discrete solver", t, criterion_7());
    let t = Instant::now();
    report(8, "determinism", t, criterion_8());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
