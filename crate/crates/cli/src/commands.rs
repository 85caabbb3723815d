//! The four subcommands. Each returns a complete report; configuration
//! problems are raised as [`UsageError`] before any computation starts.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use dirac_l2::algebra::check_dim;
use dirac_l2::fields::{gen_monogenic_poly, kelvin, random_polynomial, Ball};
use dirac_l2::identity::{
    apriori_2d, check_adjoint_duality, check_bochner, check_general_application, check_general_identity,
    check_perturbed_coercivity, check_radial_identity, check_single_quadratic, check_trace_inequality,
    check_weighted_identity, random_bump, random_bump_pair, IdentityReport, KappaK,
};
use dirac_l2::obstruction::{
    counterexample_norms, counterexample_quadrature_crosscheck, orthogonality_check, spherical_mean_zero,
};
use dirac_l2::quadrature::Domain;
use dirac_l2::rng::{trial_rng, TrialRng};
use dirac_l2::solver::{
    bound_for_weight, convergence_orders, gaussian_packet, refinement_study, sharpness_sequence, Grid,
    SolveOptions,
};
use dirac_l2::{MultiplierChoice, Weight, WeightKind};
use rand::Rng;

use crate::config::{Command, DomainConfig, IdentityKind, RunConfig};
use crate::report::{Check, Entry, ReportFile, Table};
use crate::UsageError;

const IDENTITY_TOL: f64 = 1e-6;
const DUALITY_TOL: f64 = 1e-7;
const KAPPA_K_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const CROSSCHECK_TOL: f64 = 1e-7;
const CROSSCHECK_TRUNCATION: f64 = 1e-10;
const DIRAC_RESIDUAL_TOL: f64 = 1e-8;
const ORTHOGONALITY_TOL: f64 = 1e-7;
const SPHERICAL_MEAN_TOL: f64 = 1e-8;
const RATIO_TOL: f64 = 1e-12;
const SOLVER_RESIDUAL_TOL: f64 = 1e-8;
const ORDER_MIN: f64 = 1.9;
const CLOSED_FORM_TOL: f64 = 1e-6;
const SHARPNESS_FINAL_MIN: f64 = 0.24;
const DEFAULT_EPSILON: f64 = 0.01;

pub fn run(cfg: &RunConfig) -> Result<ReportFile, UsageError> {
    check_dim(cfg.n)?;
    let start = Instant::now();
    let (entries, tables) = match cfg.command {
        Command::Verify => verify(cfg)?,
        Command::Obstruction => obstruction(cfg)?,
        Command::Solve => solve(cfg)?,
        Command::Sharpness => sharpness(cfg)?,
    };
    Ok(ReportFile::new(cfg.clone(), entries, tables, ms(start)))
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

type Output = (Vec<Entry>, BTreeMap<String, Table>);

fn identity_entry(label: &str, trial: u64, r: &IdentityReport, tol: f64) -> Entry {
    let mut e = Entry::new(label)
        .trial(trial)
        .metric("lhs", r.lhs)
        .metric("rhs", r.rhs)
        .metric("abs_residual", r.abs_residual)
        .metric("rel_residual", r.rel_residual)
        .metric("est_error", r.est_error)
        .check(Check::le("rel_residual", tol));
    for t in r.lhs_terms.iter().chain(&r.terms).chain(&r.diagnostics) {
        e = e.metric(&format!("term.{}", t.label), t.value);
    }
    if let Some(m) = r.margin {
        e = e
            .metric("margin", m)
            .metric("margin_slack", m + r.est_error)
            .check(Check::ge("margin_slack", 0.0));
    }
    e
}

fn default_domain(kind: IdentityKind, w: &Weight) -> DomainConfig {
    match kind {
        IdentityKind::Perturbed => DomainConfig::Annulus { r0: 1.2, r1: 3.0 },
        IdentityKind::SingleQuadratic => DomainConfig::Cube { lo: -1.0, hi: 1.0 },
        IdentityKind::Application if matches!(w.kind(), WeightKind::LogRadial) => {
            DomainConfig::Annulus { r0: 1.5, r1: 3.0 }
        }
        _ => DomainConfig::Annulus { r0: 1.0, r1: 2.0 },
    }
}

fn multiplier_for(w: &Weight) -> Result<MultiplierChoice, UsageError> {
    let n = w.dim();
    Ok(match w.kind() {
        WeightKind::RadialPower { m } => MultiplierChoice::radial(n, *m)?,
        WeightKind::SingleQuadratic => MultiplierChoice::single_quadratic(n)?,
        WeightKind::AnisoQuadratic { .. } => MultiplierChoice::perturbed_gaussian(w)?,
        WeightKind::LogRadial => MultiplierChoice::canonical(w),
        WeightKind::Custom { name, .. } if name == "zero" => MultiplierChoice::zero(n)?,
        WeightKind::Custom { .. } => MultiplierChoice::canonical(w),
    })
}

fn perturbation(n: usize, eps: f64) -> Vec<f64> {
    let mut a = vec![1.0; n];
    a[0] = 1.0 + eps;
    if n > 1 {
        a[1] = 1.0 - eps;
    }
    a
}

/// Gradient of `w` vanishes somewhere on the closed domain.
fn gradient_vanishes(w: &Weight, d: &DomainConfig) -> bool {
    match w.kind() {
        WeightKind::RadialPower { .. } | WeightKind::AnisoQuadratic { .. } => d.contains_origin(),
        WeightKind::SingleQuadratic => match *d {
            DomainConfig::Annulus { .. } | DomainConfig::Ball { .. } => true,
            DomainConfig::Cube { lo, hi } => lo <= 0.0 && hi >= 0.0,
        },
        WeightKind::LogRadial => false,
        WeightKind::Custom { name, .. } => name == "zero",
    }
}

fn verify(cfg: &RunConfig) -> Result<Output, UsageError> {
    let kind = cfg
        .identity
        .ok_or_else(|| UsageError("verify needs --identity".into()))?;
    if cfg.trials == 0 {
        return Err(UsageError("trial count must be positive".into()));
    }
    let n = cfg.n;
    let weight = match kind {
        IdentityKind::SingleQuadratic => Weight::single_quadratic(n)?,
        IdentityKind::Perturbed => {
            let eps = cfg.epsilon.unwrap_or(DEFAULT_EPSILON);
            Weight::aniso_quadratic(cfg.weight.a.clone().unwrap_or_else(|| perturbation(n, eps)))?
        }
        _ => cfg.weight.build(n)?,
    };
    let dcfg = cfg.domain.clone().unwrap_or_else(|| default_domain(kind, &weight));
    let dom = dcfg.build(n)?;
    if dcfg.contains_origin() && weight.singular_at_origin() {
        return Err(UsageError(format!(
            "weight `{}` is singular at the origin, which lies in the domain",
            cfg.weight.kind
        )));
    }
    let q = cfg.quadrature.spec();
    let tol = cfg.tolerances.identity.unwrap_or(IDENTITY_TOL);
    let mut entries = Vec::new();
    let mut m_list = cfg.m_list.clone();

    match kind {
        IdentityKind::Weighted => {
            let kk = KappaK::new(n, cfg.kappa.unwrap_or(1.0))?;
            entries.push(
                Entry::new("kappa_k")
                    .metric("kappa", kk.kappa)
                    .metric("k", kk.k)
                    .metric("c_kappa", kk.c_kappa())
                    .metric("relation_residual", kk.relation_residual().abs() / (1.0 + kk.k * kk.k))
                    .check(Check::le("relation_residual", KAPPA_K_TOL))
                    .finish(0.0),
            );
        }
        IdentityKind::Radial => {
            if dcfg.contains_origin() {
                return Err(UsageError("the radial identity needs a domain avoiding the origin".into()));
            }
            if m_list.is_empty() {
                m_list.push(2.0);
            }
            if m_list.contains(&0.0) {
                return Err(UsageError("radial exponent m must be nonzero".into()));
            }
        }
        IdentityKind::Apriori2d if n != 2 => {
            return Err(UsageError(format!("the two-dimensional a priori identity needs n = 2, got {n}")));
        }
        IdentityKind::Perturbed => {
            if !matches!(dcfg, DomainConfig::Annulus { r0, .. } if r0 > 1.0) {
                return Err(UsageError("the perturbed Gaussian check needs an annulus with r0 > 1".into()));
            }
        }
        IdentityKind::Application => {
            if gradient_vanishes(&weight, &dcfg) {
                return Err(UsageError(format!(
                    "the gradient of `{}` vanishes on the domain; use the single_quadratic check for x1sq",
                    weight.name()
                )));
            }
            let (k, eps) = (cfg.k_aux.unwrap_or(1.0), cfg.epsilon.unwrap_or(DEFAULT_EPSILON));
            if !(k > 0.0 && eps > 0.0 && eps < 1.0) {
                return Err(UsageError(format!("need k > 0 and 0 < eps < 1, got ({k}, {eps})")));
            }
        }
        IdentityKind::General
            if gradient_vanishes(&weight, &dcfg) && !matches!(weight.kind(), WeightKind::Custom { .. }) => {
                return Err(UsageError(format!(
                    "the multiplier for `{}` is singular on the domain",
                    weight.name()
                )));
            }
        _ => {}
    }
    let mult = match kind {
        IdentityKind::General => Some(multiplier_for(&weight)?),
        _ => None,
    };

    let run_trial = |t: u64| -> Vec<Entry> {
        let start = Instant::now();
        let mut rng = trial_rng(cfg.seed, t);
        let label = kind.name();
        let res: Result<Vec<Entry>, dirac_l2::Error> = (|| {
            Ok(match kind {
                IdentityKind::Duality => {
                    let (u, v) = random_bump_pair(&dom, cfg.degree, &mut rng)?;
                    let dtol = cfg.tolerances.duality.unwrap_or(DUALITY_TOL);
                    vec![identity_entry(label, t, &check_adjoint_duality(&u, &v, &weight, &dom, &q)?, dtol)]
                }
                IdentityKind::Bochner => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    vec![identity_entry(label, t, &check_bochner(&u, &weight, &dom, &q)?, tol)]
                }
                IdentityKind::Weighted => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    let kk = KappaK::new(n, cfg.kappa.unwrap_or(1.0))?;
                    vec![identity_entry(label, t, &check_weighted_identity(&u, &weight, kk, &dom, &q)?, tol)]
                }
                IdentityKind::Trace => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    let b = u.support().cloned().expect("bump support");
                    let pts = sample_ball(&b, 20, &mut rng);
                    let (m, s) = check_trace_inequality(&u, &pts)?;
                    vec![Entry::new(label)
                        .trial(t)
                        .metric("min_margin", m)
                        .metric("scale", s)
                        .metric("scaled_margin", m / s.max(f64::MIN_POSITIVE))
                        .check(Check::ge("scaled_margin", -TRACE_TOL))]
                }
                IdentityKind::General => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    let m = mult.as_ref().expect("multiplier");
                    vec![identity_entry(label, t, &check_general_identity(&u, &weight, m, &dom, &q)?, tol)]
                }
                IdentityKind::Radial => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    let mut out = Vec::new();
                    for &m in &m_list {
                        let r = check_radial_identity(&u, m, &dom, &q)?;
                        out.push(identity_entry(&format!("radial(m={m})"), t, &r, tol).metric("m", m));
                    }
                    out
                }
                IdentityKind::SingleQuadratic => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    vec![identity_entry(label, t, &check_single_quadratic(&u, &dom, &q)?, tol)]
                }
                IdentityKind::Perturbed => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    let a = match weight.kind() {
                        WeightKind::AnisoQuadratic { a } => a.clone(),
                        _ => unreachable!(),
                    };
                    let r = check_perturbed_coercivity(&u, &a, &dom, &q)?;
                    vec![Entry::new(label)
                        .trial(t)
                        .metric("adjoint_norm_sq", r.adjoint_norm_sq)
                        .metric("mass", r.mass)
                        .metric("constant", r.constant)
                        .metric("margin", r.margin)
                        .metric("est_error", r.est_error)
                        .metric("margin_slack", r.margin + r.est_error)
                        .metric("max_deviation", r.max_deviation)
                        .check(Check::ge("margin_slack", 0.0))]
                }
                IdentityKind::Application => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    let aux = (cfg.k_aux.unwrap_or(1.0), cfg.epsilon.unwrap_or(DEFAULT_EPSILON));
                    let r = check_general_application(&u, &weight, &dom, &q, Some(aux))?;
                    let mut e = identity_entry(label, t, &r, tol);
                    if let Some(a) = r.diagnostics.iter().find(|d| d.label == "auxiliary_value") {
                        e = e
                            .metric("auxiliary_slack", a.value + a.est_error)
                            .check(Check::ge("auxiliary_slack", 0.0));
                    }
                    vec![e]
                }
                IdentityKind::Apriori2d => {
                    let u = random_bump(&dom, cfg.degree, &mut rng)?;
                    vec![identity_entry(label, t, &apriori_2d(&u, &weight, &dom, &q)?, tol)]
                }
            })
        })();
        let wall = ms(start);
        match res {
            Ok(v) => {
                let each = wall / v.len().max(1) as f64;
                v.into_iter().map(|e| e.finish(each)).collect()
            }
            Err(err) => vec![Entry::failed(label, err).trial(t).finish(wall)],
        }
    };

    let trials: Vec<Vec<Entry>> = (0..cfg.trials as u64).into_par_iter().map(run_trial).collect();
    let mut table = Table::new(&["trial", "rel_residual", "margin", "est_error", "pass"]);
    for e in trials.iter().flatten() {
        let get = |k: &str| e.metrics.get(k).copied().unwrap_or(f64::NAN);
        table.push(vec![
            e.trial.unwrap_or(0) as f64,
            get("rel_residual"),
            get("margin"),
            get("est_error"),
            if e.pass { 1.0 } else { 0.0 },
        ]);
    }
    entries.extend(trials.into_iter().flatten());
    let mut tables = BTreeMap::new();
    tables.insert(format!("verify_{}", kind.name()), table);
    Ok((entries, tables))
}

fn sample_ball(b: &Ball, count: usize, rng: &mut TrialRng) -> Vec<Vec<f64>> {
    let n = b.center.len();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() < 0.81 {
            out.push(b.center.iter().zip(&v).map(|(c, x)| c + b.radius * x).collect());
        }
    }
    out
}

fn positive_integers(list: &[f64], what: &str) -> Result<Vec<u32>, UsageError> {
    list.iter()
        .map(|&m| {
            if m >= 1.0 && m.fract() == 0.0 && m <= u32::MAX as f64 {
                Ok(m as u32)
            } else {
                Err(UsageError(format!("{what} must be positive integers, got {m}")))
            }
        })
        .collect()
}

fn obstruction(cfg: &RunConfig) -> Result<Output, UsageError> {
    let n = cfg.n;
    if n < 3 {
        return Err(UsageError(
            "the obstruction needs n >= 3: for n = 2 the weight 2 log|x| is harmonic (Laplace phi = 0)".into(),
        ));
    }
    let ms_list = if cfg.m_list.is_empty() {
        vec![1, 3, 10]
    } else {
        positive_integers(&cfg.m_list, "m values")?
    };
    let trunc = cfg.tolerances.crosscheck.unwrap_or(CROSSCHECK_TRUNCATION);
    let per_m: Vec<(Vec<Entry>, Vec<f64>)> = ms_list
        .par_iter()
        .map(|&m| {
            let mut out = Vec::new();
            let label = format!("obstruction(n={n},m={m})");
            let start = Instant::now();
            let exact = (m as f64) * (m as f64) * (n * (n - 2)) as f64;
            let mut row = vec![n as f64, m as f64, f64::NAN, exact, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN];
            match counterexample_norms(n, m) {
                Ok(r) => {
                    row[2] = r.ratio;
                    row[4] = r.norm_u_sq;
                    row[5] = r.weighted_f_integral;
                    out.push(
                        Entry::new(format!("{label}.ratio"))
                            .metric("ratio", r.ratio)
                            .metric("exact", exact)
                            .metric("norm_u_sq", r.norm_u_sq)
                            .metric("weighted_f_integral", r.weighted_f_integral)
                            .metric("ratio_rel_error", (r.ratio - exact).abs() / exact)
                            .check(Check::le("ratio_rel_error", RATIO_TOL))
                            .finish(ms(start)),
                    );
                }
                Err(e) => out.push(Entry::failed(format!("{label}.ratio"), e).finish(ms(start))),
            }
            let start = Instant::now();
            match counterexample_quadrature_crosscheck(n, m, trunc) {
                Ok(r) => match r.quadrature_crosscheck {
                    Some(c) => {
                        row[6] = c.rel_errors[0];
                        row[7] = c.rel_errors[1];
                        row[8] = c.dirac_residual;
                        out.push(
                            Entry::new(format!("{label}.crosscheck"))
                                .metric("norm_u_sq_rel_error", c.rel_errors[0])
                                .metric("weighted_f_rel_error", c.rel_errors[1])
                                .metric("dirac_residual", c.dirac_residual)
                                .metric("truncation_radius", c.truncation_radius)
                                .check(Check::le("norm_u_sq_rel_error", CROSSCHECK_TOL))
                                .check(Check::le("weighted_f_rel_error", CROSSCHECK_TOL))
                                .check(Check::le("dirac_residual", DIRAC_RESIDUAL_TOL))
                                .finish(ms(start)),
                        );
                    }
                    None => {
                        if let Some(first) = out.first_mut() {
                            first.note = r.note.clone().map(|s| format!("quadrature cross-check skipped: {s}"));
                        }
                    }
                },
                Err(e) => out.push(Entry::failed(format!("{label}.crosscheck"), e).finish(ms(start))),
            }
            for d in 0..=2usize {
                let start = Instant::now();
                let lbl = format!("{label}.outer_monogenic(d={d})");
                let mut rng = trial_rng(cfg.seed, 1000 + d as u64);
                let res = gen_monogenic_poly(n, d, &mut rng).and_then(|p| {
                    let h = kelvin(&p.to_field());
                    Ok((orthogonality_check(n, m, &h, trunc)?, spherical_mean_zero(&h, 2.0)?))
                });
                out.push(match res {
                    Ok((pairing, mean)) => Entry::new(lbl)
                        .metric("degree", d as f64)
                        .metric("pairing", pairing)
                        .metric("spherical_mean", mean)
                        .check(Check::le("pairing", ORTHOGONALITY_TOL))
                        .check(Check::le("spherical_mean", SPHERICAL_MEAN_TOL))
                        .finish(ms(start)),
                    Err(e) => Entry::failed(lbl, e).finish(ms(start)),
                });
            }
            (out, row)
        })
        .collect();
    let mut table = Table::new(&[
        "n",
        "m",
        "ratio",
        "exact",
        "norm_u_sq",
        "weighted_f_integral",
        "norm_u_sq_rel_error",
        "weighted_f_rel_error",
        "dirac_residual",
    ]);
    let mut entries = Vec::new();
    for (e, row) in per_m {
        entries.extend(e);
        table.push(row);
    }
    let mut tables = BTreeMap::new();
    tables.insert("obstruction".into(), table);
    Ok((entries, tables))
}

fn solve(cfg: &RunConfig) -> Result<Output, UsageError> {
    let n = cfg.n;
    let w = cfg.weight()?;
    let levels = if cfg.levels == 0 { 3 } else { cfg.levels };
    let cells = if cfg.cells == 0 { 16 } else { cfg.cells };
    let dcfg = cfg.domain.clone().unwrap_or(match w.kind() {
        WeightKind::SingleQuadratic => DomainConfig::Cube { lo: -1.5, hi: 1.5 },
        _ => DomainConfig::Annulus { r0: 0.4, r1: 2.0 },
    });
    let (grid, center, radius) = match dcfg {
        DomainConfig::Annulus { r0, r1 } => {
            let mut dir = vec![0.0; n];
            dir[0] = 1.0;
            if n > 1 {
                dir[1] = 0.2;
            }
            if n > 2 {
                dir[2] = -0.1;
            }
            let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let c: Vec<f64> = dir.iter().map(|x| 0.5 * (r0 + r1) * x / len).collect();
            (Grid::annulus(n, r0, r1, cells)?, c, 0.35 * (r1 - r0))
        }
        DomainConfig::Cube { lo, hi } => {
            let mid = 0.5 * (lo + hi);
            let mut c = vec![mid; n];
            c[0] += 0.1 * (hi - lo);
            (Grid::cube(vec![lo; n], vec![hi; n], cells)?, c, 0.3 * (hi - lo))
        }
        DomainConfig::Ball { radius } => {
            let mut c = vec![0.0; n];
            c[0] = 0.3 * radius;
            (Grid::annulus(n, 0.0, radius, cells)?, c, 0.4 * radius)
        }
    };
    let poly = random_polynomial(n, 1, &mut trial_rng(cfg.seed, 0));
    let g = dirac_l2::fields::bump_field(&center, radius, poly)?;
    let tol = cfg.tolerances.solver_residual.unwrap_or(SOLVER_RESIDUAL_TOL);
    let bound = bound_for_weight(&w);

    let start = Instant::now();
    let study = refinement_study(&grid, &w, &g, levels, cfg.poisson, SolveOptions::default());
    let study = match study {
        Ok(s) => s,
        Err(e) => {
            return Ok((vec![Entry::failed("solve", e).finish(ms(start))], BTreeMap::new()));
        }
    };
    let per_level = ms(start) / levels as f64;
    let mut entries = Vec::new();
    let mut table = Table::new(&[
        "level",
        "cells_per_axis",
        "active_cells",
        "h",
        "delta_h",
        "norm_ratio",
        "bound_expected",
        "residual",
        "iterations",
        "poisson_ratio",
        "laplacian_residual",
        "compact_laplacian_residual",
    ]);
    for (i, l) in study.iter().enumerate() {
        let s = &l.solve;
        let mut e = Entry::new(format!("solve(level={i})"))
            .metric("cells_per_axis", l.cells_per_axis as f64)
            .metric("active_cells", l.active_cells as f64)
            .metric("h", s.h)
            .metric("delta_h", l.delta_h)
            .metric("norm_ratio", s.norm_ratio)
            .metric("residual", s.residual)
            .metric("iterations", s.iterations as f64)
            .metric("converged", if s.converged { 1.0 } else { 0.0 })
            .metric("minimal", if l.minimal { 1.0 } else { 0.0 })
            .check(Check::le("residual", tol))
            .check(Check::ge("converged", 1.0))
            .check(Check::ge("minimal", 1.0));
        if let Some(b) = bound {
            e = e
                .metric("bound_expected", b)
                .metric("ratio_over_bound", s.norm_ratio / (b * (1.0 + l.delta_h)))
                .check(Check::le("ratio_over_bound", 1.0));
        } else {
            e = e.note("no continuous constant for this weight");
        }
        if let Some(d) = &s.diagnostic {
            e = e.note(d.clone());
        }
        entries.push(e.finish(per_level));
        let mut row = vec![
            i as f64,
            l.cells_per_axis as f64,
            l.active_cells as f64,
            s.h,
            l.delta_h,
            s.norm_ratio,
            bound.unwrap_or(f64::NAN),
            s.residual,
            s.iterations as f64,
            f64::NAN,
            f64::NAN,
            f64::NAN,
        ];
        if let Some(p) = &l.poisson {
            row[9] = p.norm_ratio;
            row[10] = p.laplacian_residual;
            row[11] = p.compact_laplacian_residual;
            let mut e = Entry::new(format!("poisson(level={i})"))
                .metric("norm_ratio", p.norm_ratio)
                .metric("bound_expected", p.bound_expected)
                .metric("delta_h", l.delta_h)
                .metric("ratio_over_bound", p.norm_ratio / (p.bound_expected * (1.0 + l.delta_h)))
                .metric("laplacian_residual", p.laplacian_residual)
                .metric("compact_laplacian_residual", p.compact_laplacian_residual)
                .metric("first_residual", p.first.residual)
                .metric("second_residual", p.second.residual)
                .check(Check::le("laplacian_residual", tol))
                .check(Check::le("first_residual", tol))
                .check(Check::le("second_residual", tol));
            if bound.is_some() {
                e = e.check(Check::le("ratio_over_bound", 1.0));
            }
            entries.push(e.finish(0.0));
        }
        table.push(row);
    }
    if study.len() >= 2 {
        let dec = study
            .windows(2)
            .map(|w| w[0].delta_h - w[1].delta_h)
            .fold(f64::INFINITY, f64::min);
        entries.push(
            Entry::new("delta_h_trend")
                .metric("min_decrease", dec)
                .check(Check::ge("min_decrease", f64::MIN_POSITIVE))
                .finish(0.0),
        );
    }
    let start = Instant::now();
    let order = gaussian_packet(&center).and_then(|p| convergence_orders(&grid, &p, levels.max(2)));
    entries.push(match order {
        Ok(o) => {
            let min = o.iter().copied().fold(f64::INFINITY, f64::min);
            Entry::new("convergence_order")
                .metric("min_order", min)
                .metric("last_order", *o.last().unwrap_or(&f64::NAN))
                .check(Check::ge("min_order", ORDER_MIN))
                .finish(ms(start))
        }
        Err(e) => Entry::failed("convergence_order", e).finish(ms(start)),
    });
    let mut tables = BTreeMap::new();
    tables.insert("solve_levels".into(), table);
    Ok((entries, tables))
}

fn sharpness(cfg: &RunConfig) -> Result<Output, UsageError> {
    let n = cfg.n;
    let w = cfg.weight.build(n)?;
    if !RunConfig::is_gaussian(&w) {
        return Err(UsageError("the sharpness sequence is defined for the Gaussian weight only".into()));
    }
    let m_list = if cfg.m_list.is_empty() {
        vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
    } else {
        cfg.m_list.clone()
    };
    if let Some(m) = m_list.iter().find(|&&m| !(m >= 2.0)) {
        return Err(UsageError(format!("cutoff indices must be >= 2, got {m}")));
    }
    let start = Instant::now();
    let r = match sharpness_sequence(n, &m_list) {
        Ok(r) => r,
        Err(e) => return Ok((vec![Entry::failed("sharpness", e).finish(ms(start))], BTreeMap::new())),
    };
    let wall = ms(start);
    let mut entries = vec![
        Entry::new("closed_form")
            .metric("x_norm_sq", r.x_norm_sq)
            .metric("x_norm_sq_quadrature", r.x_norm_sq_quadrature)
            .metric("u0_norm_sq_quadrature", r.u0_norm_sq_quadrature)
            .metric("x_rel_error", r.x_rel_error)
            .metric("x_radial_rel_error", r.x_radial_rel_error)
            .metric("u0_rel_error", r.u0_rel_error)
            .check(Check::le("x_rel_error", CLOSED_FORM_TOL))
            .check(Check::le("x_radial_rel_error", CLOSED_FORM_TOL))
            .check(Check::le("u0_rel_error", CLOSED_FORM_TOL))
            .finish(0.0),
        Entry::new("pointwise_adjoint")
            .metric("max_deviation", r.pointwise_deviation)
            .check(Check::le("max_deviation", 1e-12))
            .finish(0.0),
    ];
    let mut table = Table::new(&["m", "ratio", "est_error"]);
    for ((m, ratio), err) in r.m.iter().zip(&r.ratios).zip(&r.est_errors) {
        table.push(vec![*m, *ratio, *err]);
        entries.push(
            Entry::new(format!("ratio(m={m})"))
                .metric("m", *m)
                .metric("ratio", *ratio)
                .metric("est_error", *err)
                .metric("ratio_minus_err", ratio - err)
                .check(Check::le("ratio_minus_err", 0.25))
                .finish(wall / r.m.len() as f64),
        );
    }
    let last_m = *r.m.last().expect("nonempty");
    let mut trend = Entry::new("monotone")
        .metric("monotone", if r.monotone { 1.0 } else { 0.0 })
        .metric("final_ratio", *r.ratios.last().expect("nonempty"))
        .check(Check::ge("monotone", 1.0));
    if last_m >= 64.0 {
        trend = trend.check(Check::ge("final_ratio", SHARPNESS_FINAL_MIN));
    }
    entries.push(trend.finish(0.0));
    let mut tables = BTreeMap::new();
    tables.insert("sharpness".into(), table);
    Ok((entries, tables))
}

/// Domain used by `verify` for the given configuration.
pub fn verify_domain(cfg: &RunConfig) -> Result<Domain, UsageError> {
    let kind = cfg
        .identity
        .ok_or_else(|| UsageError("verify needs --identity".into()))?;
    let w = cfg.weight.build(cfg.n)?;
    cfg.domain.clone().unwrap_or_else(|| default_domain(kind, &w)).build(cfg.n)
}
