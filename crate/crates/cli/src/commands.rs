use std::path::Path;

use kirwanlab::adhm::{
    self, complex_moment, det_tr, group_act, kempf_ness_flow, krylov_rank, nakajima_form, pairing_check, ADHMData,
    AdhmJson, KNDirectionResult, KNOrbitProblem, KNOutcome, PointConfig, PointsJson,
};
use kirwanlab::cohomology::{kirwan_certificate, CertificateJson};
use kirwanlab::linalg::{self, random_complex, C64};
use kirwanlab::nahm::{
    complex_nahm_residual, kronheimer_h, max_nahm_residual, max_norm, mu_k, potential, run_trials, to_complex_pair,
    to_complex_pair_conj, write_trials_csv, AnalyticOptions, NahmQuadruple, NumericOptions, TrialRecord,
    CANONICAL_TAGS,
};
use kirwanlab::spectral::{eigenpaths as track, segment_breakpoints, FamilyJson, HermitianFamily};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::{read, Format, RunConfig};
use crate::report::{all_pass, emit, emit_json, say, verdict, Check};
use crate::CliError;

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid input: {e}"))
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Breach(e.to_string())
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::Usage(format!("{command} only writes json"))),
        _ => Ok(()),
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn certificate(cfg: &RunConfig) -> Result<(), CliError> {
    json_only(cfg, "certificate")?;
    let cert = kirwan_certificate(cfg.n).map_err(invalid)?;
    emit_json(cfg, &CertificateJson::from(&cert))?;
    let nontrivial = cert
        .character
        .coefficients
        .iter()
        .skip(1)
        .filter(|p| !p.is_zero())
        .count();
    let line = if cert.surjectivity_contradicted {
        format!(
            "n={}: surjectivity contradicted ({nontrivial} of {} nontrivial characters occur; regular representation present)",
            cfg.n,
            cfg.n - 1
        )
    } else {
        format!("n={}: no contradiction (no nontrivial character occurs)", cfg.n)
    };
    say(cfg, &line);
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GrowthReport<'a> {
    command: &'static str,
    n: usize,
    seed: u64,
    trials: usize,
    grid: usize,
    smax: f64,
    passing: usize,
    agree: usize,
    agreement: f64,
    records: &'a [TrialRecord],
}

pub fn growth(cfg: &RunConfig) -> Result<(), CliError> {
    if !(1..=3).contains(&cfg.n) {
        return Err(CliError::Usage(format!("growth supports n in 1..=3, got {}", cfg.n)));
    }
    let numeric = NumericOptions {
        s_max: cfg.s_max,
        ..NumericOptions::default()
    };
    let records = run_trials(
        cfg.n,
        cfg.trials,
        cfg.seed,
        cfg.grid,
        &numeric,
        &AnalyticOptions::default(),
    )
    .map_err(failed)?;
    let passing = records.iter().filter(|r| r.passes_margins()).count();
    let agree = records.iter().filter(|r| r.passes_margins() && r.agrees()).count();
    let agreement = if passing == 0 {
        1.0
    } else {
        agree as f64 / passing as f64
    };
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_trials_csv(&records, &mut buf).map_err(|e| CliError::Breach(format!("csv: {e}")))?;
            emit(cfg, &buf)?;
        }
        Format::Json => emit_json(
            cfg,
            &GrowthReport {
                command: "growth",
                n: cfg.n,
                seed: cfg.seed,
                trials: cfg.trials,
                grid: cfg.grid,
                smax: cfg.s_max,
                passing,
                agree,
                agreement,
                records: &records,
            },
        )?,
    }
    say(
        cfg,
        &format!(
            "agreement {agree}/{passing} = {agreement:.3} among margin-passing trials ({} excluded)",
            records.len() - passing
        ),
    );
    let canonical_ok = records
        .iter()
        .zip(CANONICAL_TAGS)
        .all(|(r, want)| r.agrees() && r.class_numeric == Some(want));
    verdict(&[Check::holds("canonical_trials_classified", canonical_ok)])
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NahmReport {
    command: &'static str,
    grid: usize,
    su2_residual: f64,
    su2_residual_refined: f64,
    residual_ratio: f64,
    complex_residual_ratio: f64,
    potential_identity_max: f64,
    potential_samples: usize,
    pass: bool,
    checks: Vec<Check>,
}

const POTENTIAL_SAMPLES: usize = 50;

pub fn nahm_check(cfg: &RunConfig) -> Result<(), CliError> {
    json_only(cfg, "nahm-check")?;
    let m = cfg.grid;
    let su2 = |m| NahmQuadruple::su2(m, 1.0).map_err(failed);
    let (coarse, fine) = (su2(m)?, su2(2 * m)?);
    let r = max_nahm_residual(&coarse);
    let r_fine = max_nahm_residual(&fine);
    let cr = max_norm(&complex_nahm_residual(&to_complex_pair_conj(&coarse)));
    let cr_fine = max_norm(&complex_nahm_residual(&to_complex_pair_conj(&fine)));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..POTENTIAL_SAMPLES {
        let t = NahmQuadruple::random(&mut rng, cfg.n, m).map_err(failed)?;
        let p = to_complex_pair(&t);
        worst = worst.max((potential(&p) - (mu_k(&t) + 2.0 * kronheimer_h(&p).re)).abs());
    }
    let checks = vec![
        Check::between("su2_residual_ratio", r / r_fine, 3.5, 4.5),
        Check::between("complex_residual_ratio", cr / cr_fine, 3.5, 4.5),
        Check::at_most("potential_identity", worst, cfg.tol_or(1e-10)),
    ];
    let report = NahmReport {
        command: "nahm-check",
        grid: m,
        su2_residual: r,
        su2_residual_refined: r_fine,
        residual_ratio: r / r_fine,
        complex_residual_ratio: cr / cr_fine,
        potential_identity_max: worst,
        potential_samples: POTENTIAL_SAMPLES,
        pass: all_pass(&checks),
        checks,
    };
    emit_json(cfg, &report)?;
    say(
        cfg,
        &format!(
            "M={m}: su(2) residual {r:.3e}, ratio to M={} is {:.4}",
            2 * m,
            r / r_fine
        ),
    );
    verdict(&report.checks)
}

/// Closed-form branches of the demo families.
fn demo_branches(name: &str, t: f64) -> Vec<f64> {
    match name {
        "constant" => vec![1.0, 2.0],
        "crossing" => vec![t, -t],
        _ => {
            let r = (t * t + 1.0).sqrt();
            vec![r, -r]
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EigenReport {
    command: &'static str,
    family: String,
    n: usize,
    interval: [f64; 2],
    samples: usize,
    refined_samples: usize,
    breakpoints: Vec<f64>,
    start_values: Vec<f64>,
    end_values: Vec<f64>,
    pass: bool,
    checks: Vec<Check>,
}

pub fn eigenpaths(cfg: &RunConfig, demo: Option<&str>, input: Option<&Path>, interval: &[f64]) -> Result<(), CliError> {
    let &[a, b] = interval else {
        return Err(CliError::Usage("--interval takes two values a,b".into()));
    };
    let (label, fam) = match (demo, input) {
        (Some(name), _) => (
            name.to_string(),
            HermitianFamily::demo(name).expect("clap restricts names"),
        ),
        (None, Some(path)) => {
            let j: FamilyJson = load(path)?;
            (
                path.display().to_string(),
                HermitianFamily::try_from(j).map_err(invalid)?,
            )
        }
        (None, None) => return Err(CliError::Usage("eigenpaths needs --demo or --input".into())),
    };
    let bundle = track(&fam, (a, b), cfg.grid + 1).map_err(|e| match e {
        kirwanlab::spectral::SpectralError::Interval(..) => invalid(e),
        e => failed(e),
    })?;
    let breakpoints = segment_breakpoints(&fam, (a, b)).map_err(failed)?;

    let mut trace = 0.0f64;
    let mut det = 0.0f64;
    for (k, &t) in bundle.grid.iter().enumerate() {
        let l = fam.eval(t);
        let v = &bundle.values[k];
        let tr = linalg::trace(&l).re;
        trace = trace.max((v.iter().sum::<f64>() - tr).abs() / (1.0 + tr.abs()));
        let d = linalg::det(&l).re;
        det = det.max((v.iter().product::<f64>() - d).abs() / (1.0 + d.abs()));
    }
    let tol = cfg.tol_or(1e-8);
    let mut checks = vec![
        Check::at_most("residual", bundle.max_residual(&fam), tol),
        Check::at_most("orthonormality", bundle.max_orthonormality_defect(), tol),
        Check::at_most("trace_invariant", trace, 1e-8),
        Check::at_most("det_invariant", det, 1e-6),
    ];
    if let Some(name) = demo {
        // path labels are arbitrary; compare against every ordering of the two branches
        let deviation = |swap: bool| {
            bundle
                .grid
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    let mut e = demo_branches(name, t);
                    if swap {
                        e.reverse();
                    }
                    e.iter()
                        .zip(&bundle.values[k])
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        };
        checks.push(Check::at_most(
            "branch_deviation",
            deviation(false).min(deviation(true)),
            1e-6,
        ));
    }
    let pass = all_pass(&checks);
    match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut buf = Vec::new();
            bundle
                .write_csv(&mut buf)
                .map_err(|e| CliError::Breach(format!("csv: {e}")))?;
            emit(cfg, &buf)?;
        }
        Format::Json => emit_json(
            cfg,
            &EigenReport {
                command: "eigenpaths",
                family: label.clone(),
                n: fam.dim(),
                interval: [a, b],
                samples: bundle.len(),
                refined_samples: bundle.len() - (cfg.grid + 1),
                breakpoints,
                start_values: bundle.values[0].clone(),
                end_values: bundle.values[bundle.len() - 1].clone(),
                pass,
                checks: checks.clone(),
            },
        )?,
    }
    say(
        cfg,
        &format!(
            "{label}: {} paths over {} samples, pass = {pass}",
            fam.dim(),
            bundle.len()
        ),
    );
    verdict(&checks)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct KempfNessReport {
    command: &'static str,
    problem: KNOrbitProblem,
    results: Vec<KNDirectionResult>,
    derivative_check_max: f64,
    pass: bool,
    checks: Vec<Check>,
}

pub fn kempf_ness(cfg: &RunConfig, toy: bool, random: bool, input: Option<&Path>) -> Result<(), CliError> {
    json_only(cfg, "kempf-ness")?;
    let problem = match input {
        Some(path) => load::<KNOrbitProblem>(path)?,
        None if random => KNOrbitProblem::random_flat(&mut ChaCha8Rng::seed_from_u64(cfg.seed)),
        None if toy => KNOrbitProblem::toy(),
        None => return Err(CliError::Usage("kempf-ness needs --toy, --random or --input".into())),
    };
    let results = kempf_ness_flow(&problem).map_err(invalid)?;
    let derivative_check_max = problem
        .directions
        .iter()
        .flat_map(|&c| [-1.0, -0.5, 0.0, 0.5, 1.0].map(|s| pairing_check(&problem, c, s, 1e-5)))
        .fold(0.0, f64::max);
    let mut checks = vec![Check::at_most("derivative_identity", derivative_check_max, 1e-4)];
    let grad_tol = cfg.tol_or(1e-6);
    for r in &results {
        if let KNOutcome::Minimum {
            gradient,
            moment_residual,
            ..
        } = r.outcome
        {
            checks.push(Check::at_most("gradient", gradient.abs(), grad_tol));
            checks.push(Check::at_most("moment_residual", moment_residual, 1e-4));
        }
    }
    if toy {
        let s = match results[0].outcome {
            KNOutcome::Minimum { s, .. } => s,
            KNOutcome::Destabilizing { .. } => f64::NAN,
        };
        checks.push(Check::at_most("toy_minimizer", (s + 1.0).abs(), 1e-6));
    }
    let summary: Vec<String> = results
        .iter()
        .map(|r| match r.outcome {
            KNOutcome::Minimum { s, value, .. } => format!("direction {}: s* = {s:.9}, F = {value:.9}", r.direction),
            KNOutcome::Destabilizing { sign } => format!("direction {}: destabilizing towards {sign}·∞", r.direction),
        })
        .collect();
    let report = KempfNessReport {
        command: "kempf-ness",
        problem,
        results,
        derivative_check_max,
        pass: all_pass(&checks),
        checks,
    };
    emit_json(cfg, &report)?;
    say(cfg, &summary.join("; "));
    verdict(&report.checks)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MomentReport {
    command: &'static str,
    n: usize,
    source: &'static str,
    mu_norm: f64,
    nakajima_residual: f64,
    cond: f64,
    det: [f64; 2],
    trace: [f64; 2],
    krylov_rank: usize,
    stable: bool,
    pass: bool,
    checks: Vec<Check>,
}

/// Two-sided bound between `‖μ‖` and `‖μX‖` plus equivariance under one
/// seeded group element.
fn moment_checks(d: &ADHMData, rng: &mut ChaCha8Rng, tol: f64) -> Result<(f64, f64, Vec<Check>), CliError> {
    let nf = nakajima_form(d).map_err(failed)?;
    let sv = linalg::singular_values(&d.x);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = tol * d.scale().powi(2);
    let upper = nf.nakajima_residual - smax * nf.moment_residual;
    let lower = smin * nf.moment_residual - nf.nakajima_residual;

    let n = d.dim();
    let g = random_complex(rng, n, n) + linalg::identity(n) * linalg::re(2.0);
    let gi = linalg::inverse_checked(&g, 1e8).map_err(failed)?;
    let mu = complex_moment(d).map_err(failed)?;
    let moved = complex_moment(&group_act(&g, d).map_err(failed)?).map_err(failed)?;
    let equi = (moved - &g * &mu * &gi).norm() / (g.norm() * gi.norm() * d.scale().powi(3));
    Ok((
        nf.moment_residual,
        nf.nakajima_residual,
        vec![
            Check::at_most("nakajima_upper", upper, slack),
            Check::at_most("nakajima_lower", lower, slack),
            Check::at_most("equivariance", equi, tol),
        ],
    ))
}

pub fn moment(cfg: &RunConfig, input: Option<&Path>) -> Result<(), CliError> {
    json_only(cfg, "moment")?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (d, source) = match input {
        Some(path) => (ADHMData::try_from(load::<AdhmJson>(path)?).map_err(invalid)?, "input"),
        None => (
            adhm::from_points(&PointConfig::random(&mut rng, cfg.n)).map_err(failed)?,
            "random-points",
        ),
    };
    let tol = cfg.tol_or(1e-10);
    let (mu_norm, nak, mut checks) = moment_checks(&d, &mut rng, tol)?;
    let rank = krylov_rank(&d).map_err(failed)?;
    if input.is_none() {
        checks.push(Check::at_most("complex_moment", mu_norm, 1e-12));
        checks.push(Check::holds("stable", rank == d.dim()));
    }
    let (det, tr) = det_tr(&d);
    let report = MomentReport {
        command: "moment",
        n: d.dim(),
        source,
        mu_norm,
        nakajima_residual: nak,
        cond: linalg::condition_number(&d.x),
        det: pair(det),
        trace: pair(tr),
        krylov_rank: rank,
        stable: rank == d.dim(),
        pass: all_pass(&checks),
        checks,
    };
    emit_json(cfg, &report)?;
    say(
        cfg,
        &format!("n={}: |mu_C| = {mu_norm:.3e}, stable = {}", report.n, report.stable),
    );
    verdict(&report.checks)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FromPointsReport {
    command: &'static str,
    points: PointsJson,
    data: AdhmJson,
    mu_norm: f64,
    stable: bool,
    det: [f64; 2],
    trace: [f64; 2],
    pass: bool,
    checks: Vec<Check>,
}

pub fn from_points(cfg: &RunConfig, input: Option<&Path>) -> Result<(), CliError> {
    json_only(cfg, "from-points")?;
    let pts = match input {
        Some(path) => PointConfig::from_json(&load::<PointsJson>(path)?).map_err(invalid)?,
        None => PointConfig::random(&mut ChaCha8Rng::seed_from_u64(cfg.seed), cfg.n),
    };
    let d = adhm::from_points(&pts).map_err(invalid)?;
    let mu_norm = complex_moment(&d).map_err(failed)?.norm();
    let stable = adhm::is_stable(&d);
    let (det, tr) = det_tr(&d);
    let (prod, sum) = pts.product_sum();
    let tol = cfg.tol_or(1e-10);
    let checks = vec![
        Check::at_most("complex_moment", mu_norm, 1e-12),
        Check::holds("stable", stable),
        Check::at_most("det_matches_product", (det - prod).norm() / (1.0 + prod.norm()), tol),
        Check::at_most("trace_matches_sum", (tr - sum).norm() / (1.0 + sum.norm()), tol),
    ];
    let report = FromPointsReport {
        command: "from-points",
        points: pts.to_json(),
        data: AdhmJson::from(&d),
        mu_norm,
        stable,
        det: pair(det),
        trace: pair(tr),
        pass: all_pass(&checks),
        checks,
    };
    emit_json(cfg, &report)?;
    say(
        cfg,
        &format!("{} points: |mu_C| = {mu_norm:.3e}, stable = {stable}", pts.len()),
    );
    verdict(&report.checks)
}
