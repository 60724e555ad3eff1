//! Acceptance criteria, one line each.
//!
//! Lines numbered `Nb` are supplementary checks run next to a criterion
//! whose literal form cannot hold; they do not replace it. The process exits
//! non-zero when any numbered criterion fails.

use std::process::{Command, ExitCode};

use heun_core::che::{self, CheParams};
use heun_core::expansions::{self, Alpha0, ExpansionError, Family};
use heun_core::kummer::{self, Identity, KummerArgs, SeriesControl};
use heun_core::numeric::pochhammer;
use heun_core::termination::{self, TerminationCondition, TerminationKind};
use heun_core::twostate::{self, ClosedForm, LorentzianModel};
use heun_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failed: Vec<String>,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        println!("[{}] {id:>3} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass && !id.ends_with('b') {
            self.failed.push(id.to_owned());
        }
    }
}

fn cplx(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(0.5..3.0), rng.random_range(-0.5..0.5))
}

fn small_cplx(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    loop {
        let z = C64::new(rng.random_range(-radius..radius), rng.random_range(-radius..radius));
        if z.norm() <= radius {
            return z;
        }
    }
}

fn ratio_to_frobenius(p: &CheParams, u: impl Fn(C64) -> Result<C64, ExpansionError>, zs: &[f64]) -> Result<f64, String> {
    let series = che::frobenius_coefficients(p, 120).map_err(|e| e.to_string())?;
    let frob = |z: f64| {
        che::frobenius_eval(&series, C64::new(z, 0.0))
            .map(|v| v.u)
            .map_err(|e| e.to_string())
    };
    let u_ref = u(C64::new(0.1, 0.0)).map_err(|e| e.to_string())?;
    let f_ref = frob(0.1)?;
    let mut worst = 0.0f64;
    for &z in zs {
        let a = u(C64::new(z, 0.0)).map_err(|e| e.to_string())? / u_ref;
        let b = frob(z)? / f_ref;
        worst = worst.max((a - b).norm() / b.norm());
    }
    Ok(worst)
}

fn criterion_1(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ctl = SeriesControl::default();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..200 {
        let (a, c, x) = (cplx(&mut rng), cplx(&mut rng), small_cplx(&mut rng, 5.0));
        for id in Identity::ALL {
            match kummer::identity_residual(id, a, c, x, ctl) {
                Ok(res) => worst = worst.max(res),
                Err(_) => errors += 1,
            }
        }
    }
    r.line(
        "1",
        "recurrence identities",
        worst <= 1e-10 && errors == 0,
        format!("200 draws x 7 identities, max residual {worst:.2e}, errors {errors}"),
    );
}

fn criterion_2(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut normalized, mut literal, mut s_max, mut shared, mut series): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut errors = 0;
    for _ in 0..50 {
        let p = CheParams::new(cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng));
        let s0 = -p.epsilon;
        let aoe = p.alpha_over_epsilon();
        for n in 0..=20i64 {
            let (Ok(b4), Ok(b3)) = (
                expansions::recurrence_coeffs(&p, Family::B4FourTerm, aoe, s0, n),
                expansions::recurrence_coeffs(&p, Family::B3ThreeTerm, aoe, s0, n),
            ) else {
                errors += 1;
                continue;
            };
            let rel = |x: C64, y: C64| (x - y).norm() / 1f64.max(y.norm());
            for (x, y) in [(b4.r, b3.r), (b4.q, b3.q), (b4.p, b3.p)] {
                normalized = normalized.max(rel(x / p.epsilon, y));
                literal = literal.max(rel(x, y));
            }
            s_max = s_max.max(b4.s.map_or(0.0, |s| s.norm()));
        }
        let b4 = expansions::build_series(&p, Family::B4FourTerm, 20, None, Some(s0));
        let b3 = expansions::build_series(&p, Family::B3ThreeTerm, 20, None, None);
        match (b4, b3) {
            (Ok(x), Ok(y)) => {
                for (a, b) in x.coefficients.iter().zip(&y.coefficients) {
                    series = series.max((a - b).norm() / 1f64.max(b.norm()));
                }
            }
            _ => errors += 1,
        }
        for n in 0..=20i64 {
            let (Ok(a2), Ok(cc)) = (
                expansions::recurrence_coeffs(&p, Family::A2ThreeTerm, aoe, s0, n),
                expansions::recurrence_coeffs(&p, Family::CThreeTerm, aoe, s0, n),
            ) else {
                errors += 1;
                continue;
            };
            let expected = -(n as f64) * (p.gamma + p.delta + n as f64 - 1.0);
            let scale = 1f64.max(expected.norm());
            shared = shared.max((a2.r - cc.r).norm() / scale).max((a2.r - expected).norm() / scale);
        }
    }
    r.line(
        "2",
        "B4(s0=-eps) coefficients equal B3, A2/C share R_n",
        literal <= 1e-12 && s_max == 0.0 && shared <= 1e-12 && errors == 0,
        format!(
            "max rel diff {literal:.2e} (B4 R, Q, P are eps times the B3 ones); max |S| {s_max:.1e}; A2/C R_n max diff {shared:.1e}; errors {errors}"
        ),
    );
    r.line(
        "2b",
        "B4(s0=-eps) and B3 define the same series",
        normalized <= 1e-12 && series <= 1e-12 && errors == 0,
        format!("B4/eps vs B3 max rel diff {normalized:.2e}; built coefficients a_n differ by {series:.2e}"),
    );
}

fn criterion_3(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let zs = [0.2, 0.3, 0.4];
    let families = [Family::A2ThreeTerm, Family::B3ThreeTerm, Family::CThreeTerm];
    let (mut gated, mut passed, mut sets) = (0, 0, 0);
    let mut ungated_worst: f64 = 0.0;
    while sets < 20 {
        let p = CheParams::new(cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng));
        if families.iter().any(|&f| !expansions::applicability(&p, f).is_empty()) {
            continue;
        }
        sets += 1;
        for f in families {
            let sol = match expansions::build_series(&p, f, 30, None, None) {
                Ok(s) => s,
                Err(_) => {
                    gated += 1;
                    continue;
                }
            };
            match ratio_to_frobenius(&p, |z| expansions::eval_series(&sol, z, 1e-10).map(|v| v.value), &zs) {
                Ok(d) if d <= 1e-8 => passed += 1,
                Ok(_) => {}
                Err(_) => gated += 1,
            }
            if let Ok(d) = ratio_to_frobenius(
                &p,
                |z| expansions::sum_series(&sol, z, SeriesControl::default()).map(|v| v.value),
                &zs,
            ) {
                ungated_worst = ungated_worst.max(d);
            }
        }
    }
    r.line(
        "3",
        "oracle equivalence, generic admissible sets",
        passed == 60,
        format!(
            "{passed}/60 family evaluations agree; {gated} rejected by the tail gate (left-terminated series for generic q do not converge to solutions); ungated partial sums differ by up to {ungated_worst:.2e}"
        ),
    );

    // Terminating sets: q from the spectrum, series finite.
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut failures = 0;
    let combos = [
        (Family::A2ThreeTerm, TerminationKind::AlphaOverEps),
        (Family::A2ThreeTerm, TerminationKind::DeltaInt),
        (Family::B3ThreeTerm, TerminationKind::DeltaInt),
        (Family::B3ThreeTerm, TerminationKind::AlphaOverEps),
        (Family::CThreeTerm, TerminationKind::GammaDeltaAlpha),
        (Family::CThreeTerm, TerminationKind::DeltaInt),
    ];
    while count < 20 {
        let (family, kind) = combos[count % combos.len()];
        let n = rng.random_range(0..=3usize);
        let p = terminating_params(&mut rng, family, kind, n);
        let cond = TerminationCondition { family, kind, n };
        let Ok(sp) = termination::q_spectrum(&p, family, cond) else {
            failures += 1;
            count += 1;
            continue;
        };
        let pq = p.with_q(sp.roots[0]);
        let outcome = expansions::build_series(&pq, family, 30, cond.alpha0(), None)
            .map_err(|e| e.to_string())
            .and_then(|sol| ratio_to_frobenius(&pq, |z| expansions::eval_series(&sol, z, 1e-10).map(|v| v.value), &zs));
        match outcome {
            Ok(d) => worst = worst.max(d),
            Err(_) => failures += 1,
        }
        count += 1;
    }
    r.line(
        "3b",
        "oracle equivalence, terminating sets",
        worst <= 1e-8 && failures == 0,
        format!("20 sets, max rel diff {worst:.2e}, failures {failures}"),
    );
}

/// Random parameters satisfying `kind = −n` for the family.
fn terminating_params(rng: &mut ChaCha8Rng, family: Family, kind: TerminationKind, n: usize) -> CheParams {
    let m = -(n as f64);
    loop {
        let (gamma, mut delta, eps, mut alpha) = (cplx(rng), cplx(rng), cplx(rng), cplx(rng));
        match kind {
            TerminationKind::AlphaOverEps => alpha = eps * m,
            TerminationKind::DeltaInt => delta = C64::new(m, 0.0),
            TerminationKind::GammaDeltaAlpha => alpha = eps * (gamma + delta - m),
        }
        let p = CheParams::new(gamma, delta, eps, alpha, C64::new(0.0, 0.0));
        let alpha0 = (family == Family::B3ThreeTerm && kind == TerminationKind::GammaDeltaAlpha).then_some(Alpha0::Gamma);
        let blocking = expansions::applicability_with(&p, family, alpha0)
            .into_iter()
            .any(|v| v.blocks_build());
        let detected = termination::detect_termination(&p, family, alpha0);
        if !blocking && detected.map(|c| (c.kind, c.n)) == Some((kind, n)) {
            return p;
        }
    }
}

fn criterion_4(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let z = C64::new(0.3, 0.0);
    let (mut worst_gap, mut worst_res): (f64, f64) = (0.0, 0.0);
    let mut all_n0 = true;
    for _ in 0..10 {
        let (gamma, eps, alpha) = (cplx(&mut rng), cplx(&mut rng), cplx(&mut rng));
        let p = CheParams::new(gamma, C64::new(0.0, 0.0), eps, alpha, alpha);
        let sol = expansions::build_series(&p, Family::A2ThreeTerm, 30, None, None).unwrap();
        all_n0 &= sol.terminated == Some(0);
        let v = expansions::eval_series(&sol, z, 1e-10).unwrap();
        let direct = kummer::eval_1f1(KummerArgs::new(alpha / eps, gamma, -eps * z), SeriesControl::default()).unwrap();
        worst_gap = worst_gap.max((v.value - direct).norm() / direct.norm());
        worst_res = worst_res.max(expansions::series_residual(&sol, z, 1e-10).unwrap());
    }
    r.line(
        "4",
        "closed-form degeneration delta=0, q=alpha",
        all_n0 && worst_gap <= 1e-14 && worst_res <= 1e-10,
        format!("10 draws, terminate at N=0: {all_n0}, max gap to 1F1 {worst_gap:.2e}, max residual {worst_res:.2e}"),
    );
}

fn criterion_5(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z = C64::new(0.25, 0.0);
    let (mut worst_res, mut worst_poch): (f64, f64) = (0.0, 0.0);
    let mut failures = Vec::new();
    for k in 0..10 {
        let (gamma, delta, eps) = (cplx(&mut rng), cplx(&mut rng), cplx(&mut rng));
        // Large Re γ₀ makes (1−γ₀)ₙ/n! decay fast enough to reach the tail gate.
        let gamma0 = C64::new(
            rng.random_range(8.0..12.0),
            rng.random_range(0.2..0.5) * if k % 2 == 0 { 1.0 } else { -1.0 },
        );
        let alpha = eps * (1.0 + gamma + delta - gamma0);
        let p = CheParams::new(gamma, delta, eps, alpha, alpha - delta * eps);
        let sol = match expansions::build_series(&p, Family::A1TwoTerm, 3000, None, None) {
            Ok(s) => s,
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        for (n, &a) in sol.coefficients.iter().enumerate().take(31) {
            let exact = pochhammer(1.0 - sol.gamma0(), n) / pochhammer(C64::new(1.0, 0.0), n);
            if exact.norm() > 0.0 {
                worst_poch = worst_poch.max((a - exact).norm() / exact.norm());
            }
        }
        match expansions::series_residual(&sol, z, 1e-10) {
            Ok(res) => worst_res = worst_res.max(res),
            Err(e) => failures.push(e.to_string()),
        }
    }
    r.line(
        "5",
        "A1 two-term series",
        failures.is_empty() && worst_res <= 1e-8 && worst_poch <= 1e-12,
        format!("10 draws (descending form from alpha0 = 0), max residual {worst_res:.2e}, recursive vs Pochhammer {worst_poch:.2e}, failures {failures:?}"),
    );

    // The ascending form with δ ≠ 0 leaves a boundary term at n = 0; so does
    // the descending form with a positive integer γ₀.
    let p = CheParams::real(1.3, 0.4, 1.1, 0.9, 0.9 - 0.4 * 1.1);
    let ascending = expansions::applicability_with(&p, Family::A1TwoTerm, Some(Alpha0::AlphaOverEpsilon))
        .contains(&expansions::Violation::AscendingLeftBoundary);
    let alpha = 1.1 * (1.0 + 1.3 + 0.4 - 3.0);
    let p = CheParams::real(1.3, 0.4, 1.1, alpha, alpha - 0.4 * 1.1);
    let integer = matches!(
        expansions::build_series(&p, Family::A1TwoTerm, 10, None, None),
        Err(ExpansionError::Inapplicable { ref violations, .. }) if violations.contains(&expansions::Violation::Gamma0PositiveInteger)
    );
    r.line(
        "5b",
        "A1 boundary terms are rejected",
        ascending && integer,
        format!("ascending with delta != 0 flagged: {ascending}; descending with gamma0 = 3 flagged: {integer}"),
    );
}

fn criterion_6(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let combos = [
        (Family::A2ThreeTerm, TerminationKind::AlphaOverEps),
        (Family::A2ThreeTerm, TerminationKind::DeltaInt),
        (Family::B3ThreeTerm, TerminationKind::AlphaOverEps),
        (Family::B3ThreeTerm, TerminationKind::DeltaInt),
        (Family::B3ThreeTerm, TerminationKind::GammaDeltaAlpha),
        (Family::CThreeTerm, TerminationKind::GammaDeltaAlpha),
        (Family::CThreeTerm, TerminationKind::DeltaInt),
    ];
    let mut problems = Vec::new();
    let (mut worst_res, mut worst_poly, mut cases): (f64, f64, usize) = (0.0, 0.0, 0);
    for (family, kind) in combos {
        for n in 0..=3 {
            cases += 1;
            let p = terminating_params(&mut rng, family, kind, n);
            let cond = TerminationCondition { family, kind, n };
            let sp = match termination::q_spectrum(&p, family, cond) {
                Ok(sp) => sp,
                Err(e) => {
                    problems.push(format!("{cond}: {e}"));
                    continue;
                }
            };
            if sp.roots.len() != n + 1 {
                problems.push(format!("{cond}: {} roots", sp.roots.len()));
            }
            match termination::verify_spectrum(&p, &sp) {
                Ok(checks) => {
                    for c in checks {
                        worst_res = worst_res.max(c.max_residual);
                        if !c.terminated {
                            problems.push(format!("{cond}: root {} does not terminate", c.root));
                        }
                        if family == Family::A2ThreeTerm && kind == TerminationKind::AlphaOverEps {
                            match termination::polynomial_defect(&c.solution, n) {
                                Ok(d) => worst_poly = worst_poly.max(d),
                                Err(e) => problems.push(format!("{cond}: {e}")),
                            }
                        }
                    }
                }
                Err(e) => problems.push(format!("{cond}: {e}")),
            }
        }
    }
    r.line(
        "6",
        "q-spectrum soundness",
        problems.is_empty() && worst_res <= 1e-8 && worst_poly <= 1e-9,
        format!("{cases} family/kind/N cases, max residual {worst_res:.2e}, polynomial defect {worst_poly:.2e}, problems {problems:?}"),
    );

    // Four-term family ends through α/ε = −N for any s₀.
    let mut problems = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 0..=3 {
        let p = terminating_params(&mut rng, Family::B4FourTerm, TerminationKind::AlphaOverEps, n);
        let s0 = cplx(&mut rng);
        let cond = TerminationCondition {
            family: Family::B4FourTerm,
            kind: TerminationKind::AlphaOverEps,
            n,
        };
        match termination::q_spectrum_with_s0(&p, Family::B4FourTerm, cond, Some(s0)).and_then(|sp| {
            let ok = sp.roots.len() == n + 1;
            termination::verify_spectrum(&p, &sp).map(|c| (ok, c))
        }) {
            Ok((ok, checks)) => {
                if !ok {
                    problems.push(format!("N={n}: wrong root count"));
                }
                for c in checks {
                    worst = worst.max(c.max_residual);
                    if !c.terminated {
                        problems.push(format!("N={n}: not terminated"));
                    }
                }
            }
            Err(e) => problems.push(format!("N={n}: {e}")),
        }
    }
    r.line(
        "6b",
        "four-term family with free s0",
        problems.is_empty() && worst <= 1e-8,
        format!("N=0..3, max residual {worst:.2e}, problems {problems:?}"),
    );
}

fn criterion_7(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..10 {
        let p = CheParams::new(
            cplx(&mut rng),
            C64::new(0.0, 0.0),
            cplx(&mut rng),
            cplx(&mut rng),
            C64::new(0.0, 0.0),
        );
        let cond = TerminationCondition {
            family: Family::A2ThreeTerm,
            kind: TerminationKind::DeltaInt,
            n: 0,
        };
        match termination::q_spectrum(&p, Family::A2ThreeTerm, cond) {
            Ok(sp) if sp.roots.len() == 1 => worst = worst.max((sp.roots[0] - p.alpha).norm()),
            _ => ok = false,
        }
    }
    r.line(
        "7",
        "N=0 root equals alpha",
        ok && worst <= 1e-12,
        format!("10 draws, max |root - alpha| {worst:.2e}"),
    );
}

fn two_state_check(u0: f64, delta1: f64, n: usize) -> (bool, String) {
    let (d0, residual) = match twostate::locate_delta0(u0, delta1, n, -3.0, 3.0, 61) {
        Ok(v) => v,
        Err(e) => return (false, format!("scan failed: {e}")),
    };
    let model = LorentzianModel::new(u0, d0, delta1);
    let red = twostate::reduce_to_che(model);
    let times: Vec<f64> = (0..20).map(|k| -5.0 + 10.0 * k as f64 / 19.0).collect();
    let reduction = red.verify(&times).unwrap_or(f64::INFINITY);
    let mut detail = format!(
        "R = {}, best delta0 = {d0:.6}, relation residual {residual:.2e}, reduction residual {reduction:.1e}",
        red.r.re
    );
    let located = residual < 1e-8;
    if !located {
        detail.push_str("; no admissible delta0 reaches the spectrum (the only root is q = 0, which needs delta0 = 0, i.e. eps = 0)");
    }
    let cmp =
        ClosedForm::new(model, Family::B3ThreeTerm, 30).and_then(|f| twostate::compare_with_rk(&f, -5.0, 5.0, twostate::DEFAULT_STEPS));
    match cmp {
        Ok(c) => {
            let norm = c.rk.norm_deviation();
            detail.push_str(&format!(
                "; closed form vs RK max |diff| {:.2e}, norm deviation {norm:.1e}",
                c.max_abs_diff
            ));
            (located && c.max_abs_diff <= 1e-6 && norm <= 1e-10 && reduction <= 1e-9, detail)
        }
        Err(e) => {
            detail.push_str(&format!("; closed form unavailable: {e}"));
            (false, detail)
        }
    }
}

fn criterion_8(r: &mut Report) {
    // U₀² + Δ₁²/4 = 1.
    let (pass, detail) = two_state_check(0.8, 1.2, 0);
    r.line("8", "two-state application at R = 1", pass, detail);
    // U₀² + Δ₁²/4 = 4; relation Δ₁Δ₀ = −4 on the spectrum.
    let (pass, detail) = two_state_check(3f64.sqrt(), 2.0, 1);
    r.line("8b", "two-state application at R = 2", pass, detail);
}

fn dyadic(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(
        rng.random_range(-4096i32..4096) as f64 / 1024.0,
        rng.random_range(-4096i32..4096) as f64 / 1024.0,
    )
}

fn criterion_9(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut exact = 0;
    let mut worst_res: f64 = 0.0;
    for _ in 0..100 {
        let p = CheParams::new(
            dyadic(&mut rng),
            dyadic(&mut rng),
            dyadic(&mut rng),
            dyadic(&mut rng),
            dyadic(&mut rng),
        );
        if che::transform_1_minus_z(&che::transform_1_minus_z(&p)) == p {
            exact += 1;
        }
    }
    // Floats off the grid: q' + α rounds.
    let mut float_exact = 0;
    for _ in 0..100 {
        let p = CheParams::new(cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng));
        if che::transform_1_minus_z(&che::transform_1_minus_z(&p)) == p {
            float_exact += 1;
        }
    }
    // u(z) = v(1 − z) with v the Frobenius series of the transformed equation.
    for _ in 0..20 {
        let p = CheParams::new(cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng), cplx(&mut rng));
        let t = che::transform_1_minus_z(&p);
        let series = che::frobenius_coefficients(&t, 120).unwrap();
        for w in [0.2, 0.3, 0.4] {
            let v = che::frobenius_eval(&series, C64::new(w, 0.05)).unwrap();
            let z = C64::new(1.0 - w, -0.05);
            // d/dz = −d/dw
            worst_res = worst_res.max(che::scaled_residual(&p, v.u, -v.du, v.d2u, z).unwrap());
        }
    }
    r.line(
        "9",
        "transform involution",
        float_exact == 100 && worst_res <= 1e-9,
        format!("{float_exact}/100 exact (the q entry returns as (q - alpha) + alpha, which rounds); transformed Frobenius residual {worst_res:.2e}"),
    );
    r.line(
        "9b",
        "transform involution on binary fractions",
        exact == 100,
        format!("{exact}/100 exact when q - alpha is representable"),
    );
}

fn criterion_10(r: &mut Report) {
    let exe = env!("CARGO_BIN_EXE_heun");
    let commands: [&[&str]; 4] = [
        &["eval-1f1", "--a", "1", "--c", "1", "--x", "1"],
        &[
            "q-spectrum",
            "--family",
            "a2",
            "--gamma",
            "2",
            "--delta",
            "-1",
            "--eps",
            "1",
            "--alpha",
            "1",
        ],
        &[
            "che-series",
            "--family",
            "a2",
            "--gamma",
            "1",
            "--delta",
            "0",
            "--eps",
            "1",
            "--alpha",
            "1",
            "--q",
            "1",
            "--z",
            "0.3",
        ],
        &[
            "return-spectrum-scan",
            "--u0",
            "1.7320508075688772",
            "--delta1",
            "2",
            "--n",
            "1",
            "--points",
            "13",
            "--jobs",
            "4",
        ],
    ];
    let mut same = 0;
    for args in commands {
        let outs: Vec<Vec<u8>> = (0..3)
            .map(|_| Command::new(exe).args(args).output().map(|o| o.stdout).unwrap_or_default())
            .collect();
        if !outs[0].is_empty() && outs.iter().all(|o| *o == outs[0]) {
            same += 1;
        }
    }
    r.line(
        "10",
        "CLI determinism",
        same == commands.len(),
        format!("{same}/{} commands byte-identical over 3 runs", commands.len()),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failed: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);
    if r.failed.is_empty() {
        println!("all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {}", r.failed.join(", "));
        ExitCode::FAILURE
    }
}
