//! One line per acceptance criterion; exits nonzero if any fails.

use std::time::{Duration, Instant};

use kirwanlab::adhm::{
    complex_moment, from_points, gamma_act_points, group_act, kempf_ness_flow, nakajima_form, pairing_check,
    KNOrbitProblem, KNOutcome, PointConfig,
};
use kirwanlab::cohomology::{
    fiber_fixed_character, fiber_fixed_components, hilb_total_betti, kirwan_certificate, oracle, partitions, Poly,
};
use kirwanlab::linalg::{self, c, random_complex, CMat, C64};
use kirwanlab::nahm::{
    self, canonical_trials, flow_classify_analytic, flow_classify_numeric, kronheimer_h, max_nahm_residual, mu_k,
    potential, run_trials, to_complex_pair, AnalyticOptions, NahmQuadruple, NumericOptions, CANONICAL_TAGS,
};
use kirwanlab::spectral::{eigenpaths, HermitianFamily};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

fn certificate_exactness() -> Outcome {
    let start = Instant::now();
    let c2 = fiber_fixed_character(2).unwrap().coefficients;
    let c3 = fiber_fixed_character(3).unwrap().coefficients;
    let small = c2 == [Poly::new(vec![2]), Poly::one()] && c3 == [Poly::new(vec![3, 1]), Poly::one(), Poly::one()];
    let mut bad = Vec::new();
    for n in 2..=12 {
        let cert = kirwan_certificate(n).unwrap();
        let witness = cert.regular_rep_witness.map(|k| &cert.per_partition[k]);
        let located = witness.is_some_and(|r| r.partition.parts() == [n] && r.d == n && r.free);
        if !(cert.regular_rep_present && located && cert.surjectivity_contradicted) {
            bad.push(n);
        }
    }
    let t = start.elapsed();
    check(
        small && bad.is_empty() && within(Duration::from_secs(5), t),
        format!("n=2,3 characters exact: {small}; failing n: {bad:?}; {t:.2?}"),
    )
}

fn component_oracle() -> Outcome {
    let start = Instant::now();
    let (mut checked, mut brute, mut bad) = (0, 0, Vec::new());
    for n in 1..=10 {
        for l in partitions(n) {
            let r = fiber_fixed_components(&l, n).unwrap();
            let sizes = l.distinct();
            let row: Vec<i64> = sizes.iter().map(|&s| s as i64).collect();
            let mut ok = oracle::torus_kernel_components(&[row]) as usize == r.num_components;
            if n <= 6 {
                ok &= oracle::brute_force_components(&sizes, n) == r.num_components;
                brute += 1;
            }
            checked += 1;
            if !ok {
                bad.push(l.parts().to_vec());
            }
        }
    }
    let t = start.elapsed();
    check(
        bad.is_empty() && within(Duration::from_secs(30), t),
        format!("{checked} partitions vs Smith form, {brute} vs brute force; mismatches {bad:?}; {t:.2?}"),
    )
}

/// Coefficient of `x^n` in `∏_k (1 + 2(x^k + x^{2k} + …))`.
fn betti_by_generating_function(n: usize) -> u64 {
    let mut g = vec![0u64; n + 1];
    g[0] = 1;
    for k in 1..=n {
        let mut next = g.clone();
        for (e, &a) in g.iter().enumerate() {
            let mut f = e + k;
            while f <= n {
                next[f] += 2 * a;
                f += k;
            }
        }
        g = next;
    }
    g[n]
}

fn betti_sums() -> Outcome {
    let bad: Vec<usize> = (1..=14)
        .filter(|&n| hilb_total_betti(n).eval(1) != betti_by_generating_function(n))
        .collect();
    let (b2, b3) = (hilb_total_betti(2).eval(1), hilb_total_betti(3).eval(1));
    check(
        bad.is_empty() && b2 == 4 && b3 == 8,
        format!("n=2 -> {b2}, n=3 -> {b3}; disagreements for n in {bad:?}"),
    )
}

fn moment_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut mu_max, mut equi_max, mut nak_max, mut misc_fail) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for k in 0..100 {
        let n = 1 + k % 6;
        let cfg = PointConfig::random(&mut rng, n);
        let d = from_points(&cfg).unwrap();
        mu_max = mu_max.max(complex_moment(&d).unwrap().norm());

        // generic j so that μ is not zero
        let mut dj = d.clone();
        dj.j = random_complex(&mut rng, 1, n).row(0).into_owned();
        let g = random_complex(&mut rng, n, n) + linalg::identity(n) * c(2.0, 0.0);
        let gi = linalg::inverse_checked(&g, 1e8).unwrap();
        let mu = complex_moment(&dj).unwrap();
        let moved = complex_moment(&group_act(&g, &dj).unwrap()).unwrap();
        let xi = linalg::inverse_checked(&dj.x, 1e12).unwrap();
        let size = (&dj.x * &dj.y * &xi).norm() + dj.y.norm() + (&dj.i * &dj.j).norm();
        equi_max = equi_max.max((moved - &g * &mu * &gi).norm() / (g.norm() * gi.norm() * size));

        // μX = [X, Y] + i(jX)
        let nf = nakajima_form(&dj).unwrap();
        let nak = linalg::commutator(&nf.x, &nf.y) + &nf.i * &nf.j_prime;
        let size = (&dj.x * &dj.y).norm() * 2.0 + (&dj.i * &nf.j_prime).norm();
        nak_max = nak_max.max((&mu * &dj.x - nak).norm() / size);

        // reordering the points is a permutation in the group orbit
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(k % n);
        let permuted = PointConfig::new(perm.iter().map(|&a| cfg.points()[a]).collect()).unwrap();
        let p = CMat::from_fn(n, n, |r, s| linalg::re(if perm[r] == s { 1.0 } else { 0.0 }));
        let acted = group_act(&p, &d).unwrap();
        let target = from_points(&permuted).unwrap();
        let same = (acted.x - target.x).norm() + (acted.y - target.y).norm() + (acted.i - target.i).norm();

        // the generator of μ_n preserves ∏x
        let zeta = C64::from_polar(1.0, std::f64::consts::TAU / n as f64);
        let rotated = gamma_act_points(zeta, &cfg).unwrap();
        let det_shift = (rotated.product_sum().0 - cfg.product_sum().0).norm() / cfg.product_sum().0.norm();
        if same > 1e-12 || det_shift > 1e-12 {
            misc_fail += 1;
        }
    }
    let t = start.elapsed();
    let ok = mu_max <= 1e-12 && equi_max <= 1e-10 && nak_max <= 1e-10 && misc_fail == 0;
    check(
        ok && within(Duration::from_secs(10), t),
        format!(
            "max |mu_C| {mu_max:.1e}, equivariance {equi_max:.1e}, Nakajima {nak_max:.1e}, \
             permutation/det failures {misc_fail}; {t:.2?}"
        ),
    )
}

fn nahm_convergence() -> Outcome {
    let r128 = max_nahm_residual(&NahmQuadruple::su2(128, 1.0).unwrap());
    let r256 = max_nahm_residual(&NahmQuadruple::su2(256, 1.0).unwrap());
    let ratio = r128 / r256;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let t = NahmQuadruple::random(&mut rng, 1 + k % 3, nahm::DEFAULT_GRID).unwrap();
        let p = to_complex_pair(&t);
        worst = worst.max((potential(&p) - (mu_k(&t) + 2.0 * kronheimer_h(&p).re)).abs());
    }
    check(
        (3.5..=4.5).contains(&ratio) && worst <= 1e-10,
        format!("residual ratio M=128/M=256 {ratio:.4}; worst potential identity gap {worst:.1e}"),
    )
}

fn growth_trichotomy() -> Outcome {
    let start = Instant::now();
    let opts = NumericOptions::default();
    let mut canonical_ok = true;
    for (spec, want) in canonical_trials(nahm::DEFAULT_GRID).iter().zip(CANONICAL_TAGS) {
        let num = flow_classify_numeric(&spec.y_l, &spec.y_r, &spec.pair, opts.s_max, opts.samples);
        let ana = flow_classify_analytic(&spec.y_l, &spec.y_r, &spec.pair);
        canonical_ok &= num.is_ok_and(|g| g.tag == want) && ana.is_ok_and(|g| g.tag == want);
    }
    let records = run_trials(2, 200, 0, nahm::DEFAULT_GRID, &opts, &AnalyticOptions::default()).unwrap();
    let random = &records[3..];
    let passing: Vec<_> = random.iter().filter(|r| r.passes_margins()).collect();
    let agree = passing.iter().filter(|r| r.agrees()).count();
    let rate = agree as f64 / passing.len().max(1) as f64;
    let t = start.elapsed();
    check(
        canonical_ok && !passing.is_empty() && rate >= 0.95 && within(Duration::from_secs(120), t),
        format!(
            "canonical trio correct: {canonical_ok}; agreement {agree}/{} = {rate:.3} ({} excluded); {t:.2?}",
            passing.len(),
            random.len() - passing.len()
        ),
    )
}

fn eigenpath_suite() -> Outcome {
    let mut worst_res = 0.0f64;
    let mut worst_orth = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut worst_det = 0.0f64;
    let mut worst_branch = 0.0f64;
    for name in HermitianFamily::DEMOS {
        let fam = HermitianFamily::demo(name).unwrap();
        let b = eigenpaths(&fam, (-1.0, 1.0), 201).unwrap();
        worst_res = worst_res.max(b.max_residual(&fam));
        worst_orth = worst_orth.max(b.max_orthonormality_defect());
        for (k, &t) in b.grid.iter().enumerate() {
            let l = fam.eval(t);
            let vals = &b.values[k];
            worst_trace = worst_trace.max((vals.iter().sum::<f64>() - linalg::trace(&l).re).abs());
            let det = linalg::det(&l).re;
            worst_det = worst_det.max((vals.iter().product::<f64>() - det).abs() / (1.0 + det.abs()));
        }
        let branch = |t: f64| -> [f64; 2] {
            match name {
                "constant" => [1.0, 2.0],
                "crossing" => [t, -t],
                _ => [(t * t + 1.0).sqrt(), -(t * t + 1.0).sqrt()],
            }
        };
        // paths may come out in either order
        let dev = |swap: bool| {
            b.grid
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    let e = branch(t);
                    let e = if swap { [e[1], e[0]] } else { e };
                    (b.values[k][0] - e[0]).abs().max((b.values[k][1] - e[1]).abs())
                })
                .fold(0.0, f64::max)
        };
        worst_branch = worst_branch.max(dev(false).min(dev(true)));
    }
    check(
        worst_res <= 1e-8 && worst_orth <= 1e-8 && worst_branch <= 1e-6 && worst_trace <= 1e-8 && worst_det <= 1e-6,
        format!(
            "residual {worst_res:.1e}, orthonormality {worst_orth:.1e}, branch deviation {worst_branch:.1e}, \
             trace {worst_trace:.1e}, det {worst_det:.1e}"
        ),
    )
}

fn kempf_ness() -> Outcome {
    let toy = kempf_ness_flow(&KNOrbitProblem::toy()).unwrap();
    let (toy_ok, s_star) = match toy[0].outcome {
        KNOutcome::Minimum { s, gradient, .. } => ((s + 1.0).abs() <= 1e-6 && gradient.abs() <= 1e-6, s),
        _ => (false, f64::NAN),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = KNOrbitProblem::random_flat(&mut rng);
        for &dir in &p.directions {
            for s in [-1.0, -0.3, 0.0, 0.4, 1.0] {
                worst = worst.max(pairing_check(&p, dir, s, 1e-5));
            }
        }
        for r in kempf_ness_flow(&p).unwrap() {
            if let KNOutcome::Minimum { moment_residual, .. } = r.outcome {
                worst = worst.max(moment_residual);
            }
        }
    }
    let unbounded = kempf_ness_flow(&KNOrbitProblem::unbounded()).unwrap();
    let destab = matches!(unbounded[0].outcome, KNOutcome::Destabilizing { sign } if sign < 0.0);
    check(
        toy_ok && worst <= 1e-4 && destab,
        format!("toy s* = {s_star:.9}; worst derivative check {worst:.1e}; unbounded case destabilizing: {destab}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("certificate exactness", certificate_exactness),
        ("component-count oracle", component_oracle),
        ("Betti sums", betti_sums),
        ("moment-map suite", moment_suite),
        ("Nahm convergence", nahm_convergence),
        ("growth trichotomy", growth_trichotomy),
        ("eigenpaths", eigenpath_suite),
        ("Kempf-Ness", kempf_ness),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.ok);
        println!(
            "[{}] {}. {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
