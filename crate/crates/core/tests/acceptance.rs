//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::Instant;

use hardy_sep::angular_ode::solve_k_gamma;
use hardy_sep::cli::interior_points;
use hardy_sep::exponents::{alpha_roots, classify_regime, derive_exponents, lambda_of, MinusBranch, ProblemParams};
use hardy_sep::nonlinear::{
    build_bracket, check_uniqueness_plus, integral_identity_check, integral_identity_defect, solve_profile, Branch, NonlinearProfile,
};
use hardy_sep::spectra::{eigenvalue, extrapolated_eigenvalues, harmonic, HarmonicExtra, HarmonicKind};
use hardy_sep::verify::{ko_bound_check, ko_supersolution_constant, norm, pde_residual_extrapolated, FieldSampler};
use hardy_sep::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 20240611;

fn params(n: u32, mu: f64, p: f64) -> ProblemParams {
    ProblemParams::nonlinear(n, mu, p).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn exponent_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = [0.0f64; 3];
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=8u32);
        let mu = rng.gen_range(-10.0..0.25);
        let t = derive_exponents(&ProblemParams::linear(n, mu).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for a in [t.alpha_plus, t.alpha_minus] {
            worst[0] = worst[0].max((a * (a - 1.0) + mu).abs());
        }
        worst[1] = worst[1].max((t.alpha_plus + t.alpha_minus - 1.0).abs());
        let g = rng.gen_range(-20.0..20.0);
        let d = (lambda_of(n, g) - lambda_of(n, -(g + n as f64 - 2.0))).abs() / (1.0 + g * g);
        worst[2] = worst[2].max(d);
    }
    ensure(worst.iter().all(|&w| w <= 1e-12), || format!("worst defects {worst:?}"))?;
    Ok(format!("10^4 samples, worst indicial {:.1e}, sum {:.1e}, reflection {:.1e}", worst[0], worst[1], worst[2]))
}

fn eigenvalue_oracles() -> Outcome {
    let err = |e: Error| e.to_string();
    let mut worst_lead = 0.0f64;
    for n in 2..=6 {
        for mu in [-5.0, -1.0, 0.0, 0.2] {
            let t = derive_exponents(&ProblemParams::linear(n, mu).map_err(err)?).map_err(err)?;
            let e = eigenvalue(n, mu, 1, 0, 1e-11).map_err(err)?;
            worst_lead = worst_lead.max(rel(e.lambda, t.lambda_alpha_plus));
        }
    }
    ensure(worst_lead <= 1e-8, || format!("Lambda_1,0 vs Lambda(alpha_+): {worst_lead:e}"))?;

    let mut worst_cheb = 0.0f64;
    for s in 1..=4usize {
        let e = eigenvalue(2, 0.0, s, 0, 1e-11).map_err(err)?;
        let exact = ((2 * s - 1) * (2 * s - 1)) as f64;
        worst_cheb = worst_cheb.max((e.lambda - exact).abs());
    }
    ensure(worst_cheb <= 1e-7, || format!("n=2 (2s-1)^2 oracle: {worst_cheb:e}"))?;

    let sph = eigenvalue(3, 0.0, 1, 1, 1e-11).map_err(err)?.lambda;
    ensure((sph - 6.0).abs() <= 1e-7, || format!("n=3 (1,1): {sph}"))?;

    let mut worst_dense = 0.0f64;
    for (n, mu, m) in [(2, 0.0, 0), (3, -1.0, 0), (4, 0.2, 0), (3, 0.0, 1), (5, -5.0, 2)] {
        let oracle = extrapolated_eigenvalues(n, mu, m, 2000, 3);
        for (s, &o) in oracle.iter().enumerate() {
            let e = eigenvalue(n, mu, s + 1, m, 1e-11).map_err(err)?;
            worst_dense = worst_dense.max((e.lambda - o).abs() / o.abs());
        }
    }
    ensure(worst_dense <= 1e-5, || format!("2000-point oracle mismatch {worst_dense:e}"))?;
    Ok(format!(
        "Lambda_1,0 {worst_lead:.1e}, (2s-1)^2 {worst_cheb:.1e}, spherical {:.1e}, 2000-point oracle {worst_dense:.1e}",
        (sph - 6.0).abs()
    ))
}

fn chebyshev_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for g in [0.3, 0.5, 0.9] {
        let prof = solve_k_gamma(2, 0.0, 0, g, 1e-12).map_err(|e| e.to_string())?;
        let scale = prof.value(1.0);
        for i in 1..=4000 {
            let t = i as f64 / 4000.0;
            worst = worst.max((prof.value(t) / scale - (g * t.acos()).cos()).abs());
        }
    }
    ensure(worst < 1e-6, || format!("sup error {worst:e}"))?;
    Ok(format!("gamma in {{0.3, 0.5, 0.9}}, sup error {worst:.1e}"))
}

fn explicit_harmonics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = 0.0f64;
    let mut worst_name = String::new();
    for tuple in 0..5 {
        let n = rng.gen_range(2..=6u32);
        let mu = rng.gen_range(-4.0..0.24);
        let t = derive_exponents(&ProblemParams::linear(n, mu).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let p = rng.gen_range(1.05..t.p_ko.min(8.0));
        let (_, am) = alpha_roots(mu);
        let build = |kind, gamma| harmonic(kind, n, mu, HarmonicExtra { gamma, s: None, m: 0 }, 1e-10).map(FieldSampler::harmonic);
        let fields = [
            build(HarmonicKind::SmallPlus, None).map_err(|e| e.to_string())?,
            build(HarmonicKind::SmallMinus, None).map_err(|e| e.to_string())?,
            build(HarmonicKind::SingularGamma, Some(am)).map_err(|e| e.to_string())?,
            build(HarmonicKind::SingularGamma, Some(-(am + n as f64 - 2.0))).map_err(|e| e.to_string())?,
            FieldSampler::u_star(n, mu, p).ok_or_else(|| format!("no U* at ({n}, {mu}, {p})"))?,
        ];
        for (i, u) in fields.iter().enumerate() {
            let nonlinear = i == 4;
            for x in interior_points(n, 100, SEED + tuple) {
                let r = pde_residual_extrapolated(u, &x, nonlinear).map_err(|e| e.to_string())?.abs();
                if r > worst {
                    worst = r;
                    worst_name = format!("{} at n={n}, mu={mu:.3}", u.name);
                }
            }
        }
    }
    ensure(worst < 1e-6, || format!("worst residual {worst:e} ({worst_name})"))?;
    Ok(format!("5 tuples x 5 fields x 100 points, worst {worst:.1e} ({worst_name})"))
}

fn constant_oracle() -> Outcome {
    let mut details = Vec::new();
    for (n, p, exact) in [(3, 2.0, 2.0), (4, 1.8, 1.25f64.powf(1.25))] {
        let prof = solve_profile(&params(n, 0.0, p), Branch::Minus, 1e-10).map_err(|e| e.to_string())?;
        let dev = (0..=1000)
            .map(|i| (prof.v(i as f64 / 1000.0) - exact).abs())
            .fold(0.0, f64::max);
        ensure(dev < 1e-6, || format!("({n}, 0, {p}): sup deviation {dev:e}"))?;
        details.push(format!("({n}, 0, {p}) dev {dev:.1e}"));
    }
    Ok(details.join(", "))
}

fn bracket_suite() -> Outcome {
    let mut details = Vec::new();
    for (row, (n, mu, p), branch) in [
        (1, (3, 0.0, 1.5), Branch::Plus),
        (2, (3, 0.0, 3.5), Branch::Minus),
        (3, (3, 0.0, 2.0), Branch::Minus),
        (4, (2, -0.2, 2.0), Branch::Minus),
    ] {
        let pr = params(n, mu, p);
        let b = build_bracket(&pr, branch).map_err(|e| format!("row {row}: {e}"))?;
        ensure(b.row == row, || format!("({n}, {mu}, {p}) classified as row {}", b.row))?;
        let prof = solve_profile(&pr, branch, 1e-8).map_err(|e| format!("row {row}: {e}"))?;
        ensure(prof.residual_sup < 1e-8, || format!("row {row}: residual {:e}", prof.residual_sup))?;
        let viol = prof.containment_violation();
        ensure(viol <= 1e-12, || format!("row {row}: containment violated by {viol:e}"))?;
        details.push(format!("row {row} residual {:.1e}", prof.residual_sup));
    }
    Ok(details.join(", "))
}

fn uniqueness() -> Outcome {
    let mut details = Vec::new();
    for (n, mu, p) in [(3, 0.0, 1.5), (3, 3.0 / 16.0, 1.8)] {
        let r = check_uniqueness_plus(&params(n, mu, p), 5, 1e-6, SEED).map_err(|e| format!("({n}, {mu}, {p}): {e}"))?;
        ensure(r.max_deviation <= 1e-6 && r.w0_positive, || format!("({n}, {mu}, {p}): {r:?}"))?;
        details.push(format!("({n}, {mu}, {p}) spread {:.1e}, w(0) = {:.4}", r.max_deviation, r.w0[0]));
    }
    Ok(details.join(", "))
}

fn nonexistence() -> Outcome {
    let t3 = derive_exponents(&ProblemParams::linear(3, 0.0).unwrap()).unwrap();
    for p in [2.0, 2.5] {
        let lambda_0 = lambda_of(3, -2.0 / (p - 1.0)) - t3.lambda_alpha_plus;
        ensure(lambda_0 <= 1e-12, || format!("p = {p}: Lambda_0 = {lambda_0}"))?;
        match build_bracket(&params(3, 0.0, p), Branch::Plus) {
            Err(Error::NoBracket(_)) => {}
            other => return Err(format!("plus branch at p = {p}: expected NoBracket, got {other:?}")),
        }
    }

    let (n, mu, p) = (3, -2.0, 4.0);
    let c = classify_regime(&params(n, mu, p)).unwrap();
    ensure(c.minus_branch == MinusBranch::NonexistentKo, || format!("classified {:?}", c.minus_branch))?;
    ensure(solve_profile(&params(n, mu, p), Branch::Minus, 1e-8).is_err(), || "minus solve succeeded".into())?;

    // formal candidates with the minus-branch boundary rate, with constants the bracket search
    // would try (powers of two from 1); each must break the local bound
    let (_, am) = alpha_roots(mu);
    let k = 2.0 / (p - 1.0);
    let mut attempts = 0;
    for scale in [1.0, 32.0, 1024.0] {
        for (kappa, sign) in [(0.5, -1.0), (2.0, 1.0)] {
            let u = FieldSampler::new("candidate", n, mu, move |x: &[f64]| {
                let r = norm(x);
                let t = x[0] / r;
                scale * r.powf(-k) * t.powf(am) * (1.0 + sign * kappa * t.sqrt())
            })
            .with_p(p);
            let report = ko_bound_check(&u, n, mu, p, 1.0).map_err(|e| e.to_string())?;
            ensure(!report.pass, || format!("candidate scale {scale}, kappa {kappa} satisfies the bound"))?;
            attempts += 1;
        }
    }
    Ok(format!("p_c sign test fires at p = 2, 2.5; (3, -2, 4) nonexistent_KO, {attempts}/{attempts} candidates violate the bound"))
}

fn accepted_plus_profiles() -> Vec<NonlinearProfile> {
    [(3, 0.0, 1.5), (3, 3.0 / 16.0, 1.5), (3, 3.0 / 16.0, 1.8), (4, -0.5, 1.4), (2, 0.0, 2.5), (3, -1.0, 1.3)]
        .iter()
        .filter_map(|&(n, mu, p)| solve_profile(&params(n, mu, p), Branch::Plus, 1e-9).ok())
        .collect()
}

fn integral_identity() -> Outcome {
    let profiles = accepted_plus_profiles();
    ensure(profiles.len() == 6, || format!("only {} of 6 plus profiles solved", profiles.len()))?;
    let mut worst = 0.0f64;
    let mut least_off = f64::INFINITY;
    for prof in &profiles {
        let d = integral_identity_check(prof).map_err(|e| e.to_string())?;
        worst = worst.max(d);
        let pr = &prof.params;
        let off = integral_identity_defect(pr.n, pr.mu, prof.p(), prof.alpha(), 1.1 * prof.v_limit, &|t| 1.1 * prof.v(t))
            .map_err(|e| e.to_string())?;
        least_off = least_off.min(off);
    }
    ensure(worst < 1e-6, || format!("worst defect {worst:e}"))?;
    ensure(least_off > 1e-2, || format!("perturbed defect only {least_off:e}"))?;
    Ok(format!("{} profiles, worst defect {worst:.1e}; perturbed (1.1 v) defect >= {least_off:.2e}", profiles.len()))
}

fn keller_osserman() -> Outcome {
    let c = ko_supersolution_constant(3, -2.0, 2.5, 1.0, 1e-3).map_err(|e| e.to_string())?;
    ensure(c.is_finite() && c > 0.0, || format!("constant {c}"))?;
    let mut solutions = accepted_plus_profiles();
    for (n, mu, p) in [(3, 0.0, 2.0), (3, 0.0, 3.5), (2, -0.2, 2.0), (4, 0.0, 1.8)] {
        solutions.push(solve_profile(&params(n, mu, p), Branch::Minus, 1e-9).map_err(|e| e.to_string())?);
    }
    let mut worst_ratio = 0.0f64;
    for prof in &solutions {
        let pr = &prof.params;
        let u = FieldSampler::profile(prof.clone());
        let report = ko_bound_check(&u, pr.n, pr.mu, prof.p(), 1.0).map_err(|e| e.to_string())?;
        ensure(report.pass, || format!("({}, {}, {}): {:e} > {:e}", pr.n, pr.mu, prof.p(), report.constant_found, report.bound))?;
        worst_ratio = worst_ratio.max(report.constant_found / report.bound);
    }
    Ok(format!("search terminated (c = {c}); {} solutions within bound, max ratio {worst_ratio:.3}", solutions.len()))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hardy-sep");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let run = |args: &[&str], workers: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(bin)
            .args(args)
            .env("HARDY_SEP_WORKERS", workers)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let profile = path("profile.json");
    let harm = path("harmonic.json");
    run(&["profile", "--n", "3", "--mu", "0", "--p", "1.5", "--branch", "plus", "--output", &profile], "1")?;
    run(&["harmonic", "--kind", "H_gamma", "--n", "3", "--mu", "0", "--gamma", "0.5", "--output", &harm], "1")?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["params", "--n", "3", "--mu", "-2", "--p", "4"],
        vec!["eigs", "--n", "3", "--mu", "-1", "--m", "0,1,2", "--count", "3"],
        vec!["profile", "--n", "3", "--mu", "0", "--p", "2", "--branch", "minus"],
        vec!["phase", "--n", "3", "--mu-min", "-4", "--mu-max", "0.24", "--mu-points", "40", "--p-min", "1.05", "--p-max", "6", "--p-points", "40"],
        vec!["sample", "--artifact", &profile],
        vec!["sample", "--artifact", &harm],
        vec!["verify", "--artifact", &profile, "--seed", "11"],
        vec!["verify", "--artifact", &harm, "--seed", "11"],
    ];
    let mut bytes = 0;
    for args in &commands {
        let a = run(args, "1")?;
        let b = run(args, "4")?;
        ensure(a == b, || format!("outputs differ for {args:?}"))?;
        bytes += a.len();
    }
    Ok(format!("{} commands run twice (1 and 4 workers), {bytes} bytes identical", commands.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("exponent suite", exponent_suite),
        ("eigenvalue oracles", eigenvalue_oracles),
        ("Chebyshev oracle", chebyshev_oracle),
        ("explicit-harmonic residuals", explicit_harmonics),
        ("nonlinear constant oracle", constant_oracle),
        ("bracket suite", bracket_suite),
        ("uniqueness", uniqueness),
        ("nonexistence", nonexistence),
        ("integral identity", integral_identity),
        ("Keller-Osserman bound", keller_osserman),
        ("determinism", cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
