//! End-to-end acceptance suite. The nine criteria run in order inside one
//! test so the timing-sensitive parts are not fighting each other for
//! cores; each prints one `acceptance criterion N: PASS/FAIL` line (use
//! `-- --nocapture` to watch them stream).

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use robinlab_core::analytic::disk_spectrum;
use robinlab_core::shooting::ball_lambda1;
use robinlab_core::{
    check_two_balls, crossover, make_dk, spectrum_of, sweep_alpha, sweep_volume, transfer_check,
    wentzell_eigs_detailed, BoundaryParams, CaseOutcome, DomainCurves, DomainSpec, SolveOptions,
    SolverChoice, Verdict, WentzellParams,
};

/// Radius of the disk of area 1.
const R_AREA1: f64 = 0.5641895835477563;

/// Dirichlet endpoints of the k = 3 crossover on the area-1 disk:
/// λ₃ of the disk is π·j₁,₁², λ₃ of D₃ is 3π·j₀,₁².
const DISK_DIRICHLET_L3: f64 = 46.124771109517442;
const D3_DIRICHLET_L3: f64 = 54.505243606611697;

fn opts(solver: SolverChoice, refine: usize) -> SolveOptions {
    SolveOptions { solver, refine, tol: 1e-10 }
}

fn auto() -> SolveOptions {
    opts(SolverChoice::Auto, 0)
}

fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    let h = (to - from) / (n - 1) as f64;
    (0..n).map(|i| from + h * i as f64).collect()
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(usize, fn() -> String)> = vec![
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(detail) => println!("acceptance criterion {n}: PASS — {detail}"),
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked without message".into());
                println!("acceptance criterion {n}: FAIL — {msg}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}

/// FEM (two refinement levels + Richardson) against the analytic spectra:
/// unit square λ₁..λ₆ and unit disk λ₁..λ₄ at α ∈ {0.5, 1, 5}, all within
/// 0.5%, in under 30 seconds.
fn criterion_1() -> String {
    let t0 = Instant::now();
    let analytic = opts(SolverChoice::Analytic, 0);
    let fem = opts(SolverChoice::Fem, 1);
    let mut worst: f64 = 0.0;
    for &alpha in &[0.5, 1.0, 5.0] {
        let bc = BoundaryParams::robin2(alpha);
        for (d, k) in [
            (DomainSpec::Rectangle { a: 1.0, b: 1.0 }, 6usize),
            (DomainSpec::Disk { radius: 1.0 }, 4),
        ] {
            let exact = spectrum_of(&d, &bc, k, &analytic).unwrap();
            let approx = spectrum_of(&d, &bc, k, &fem).unwrap();
            for n in 1..=k {
                let e = exact.value(n).unwrap();
                let f = approx.value(n).unwrap();
                let rel = ((f - e) / e).abs();
                assert!(rel < 5e-3, "{d} alpha={alpha} n={n}: rel dev {rel:.2e}");
                worst = worst.max(rel);
            }
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:.2?}, budget is 30 s");
    format!("max FEM/analytic rel deviation {worst:.2e} in {dt:.2?}")
}

/// Interval of length π: Neumann eigenvalues are (n−1)² to 1e-10 and at
/// α = 10⁶ the values sit within 1e-3 of the Dirichlet limit n².
fn criterion_2() -> String {
    let d = DomainSpec::Interval { length: PI };
    let neumann = spectrum_of(&d, &BoundaryParams::robin2(0.0), 4, &auto()).unwrap();
    let mut worst_neu: f64 = 0.0;
    for n in 1..=4 {
        let want = ((n - 1) as f64).powi(2);
        let dev = (neumann.value(n).unwrap() - want).abs();
        assert!(dev < 1e-10, "neumann n={n}: |λ − {want}| = {dev:.2e}");
        worst_neu = worst_neu.max(dev);
    }
    let stiff = spectrum_of(&d, &BoundaryParams::robin2(1e6), 4, &auto()).unwrap();
    let mut worst_dir: f64 = 0.0;
    for n in 1..=4 {
        let want = (n as f64).powi(2);
        let dev = (stiff.value(n).unwrap() - want).abs();
        assert!(dev < 1e-3, "alpha=1e6 n={n}: |λ − {want}| = {dev:.2e}");
        worst_dir = worst_dir.max(dev);
    }
    format!("Neumann dev {worst_neu:.1e}, Dirichlet-limit dev {worst_dir:.1e}")
}

fn interval_oracle(radius: f64, alpha: f64) -> f64 {
    let length = 2.0 * radius;
    let f = |w: f64| {
        (w * w - alpha * alpha) * (w * length).sin() - 2.0 * alpha * w * (w * length).cos()
    };
    let omega = bisect_oracle(f, 1e-12, PI / length - 1e-12);
    omega * omega
}

fn ball3_oracle(radius: f64, alpha: f64) -> f64 {
    let f = |w: f64| {
        let x = w * radius;
        x * x.cos() + (alpha * radius - 1.0) * x.sin()
    };
    let omega = bisect_oracle(f, 1e-12, PI / radius - 1e-12);
    omega * omega
}

fn bisect_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) < 0.0, "oracle bracket has no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radial shooting at p = 2 against analytic references on the full
/// (N, R, α) grid {1,2,3} × {0.5,1,2} × {0.1,1,10}, 1e-6 relative.
fn criterion_3() -> String {
    let mut worst: f64 = 0.0;
    for &n in &[1u32, 2, 3] {
        for &radius in &[0.5, 1.0, 2.0] {
            for &alpha in &[0.1, 1.0, 10.0] {
                let shot = ball_lambda1(n, radius, alpha, 2.0).unwrap().lambda1;
                let reference = match n {
                    1 => interval_oracle(radius, alpha),
                    2 => disk_spectrum(radius, alpha, 1).unwrap().value(1).unwrap(),
                    _ => ball3_oracle(radius, alpha),
                };
                let rel = ((shot - reference) / reference).abs();
                assert!(rel < 1e-6, "N={n} R={radius} alpha={alpha}: rel {rel:.2e}");
                worst = worst.max(rel);
            }
        }
    }
    format!("27 shooting/analytic pairs agree, worst rel {worst:.1e}")
}

/// Homothety law λ₁(tΩ, t^{1−p}α)·tᵖ = λ₁(Ω, α): 1e-6 relative on balls
/// for p ∈ {1.5, 2, 3}, and within the reported FEM error bars on the
/// square at p = 2, for t ∈ {0.5, 2}.
fn criterion_4() -> String {
    let mut worst_ball: f64 = 0.0;
    for &p in &[1.5, 2.0, 3.0] {
        for &n in &[1u32, 2, 3] {
            let reference = ball_lambda1(n, 1.0, 1.0, p).unwrap().lambda1;
            for &t in &[0.5f64, 2.0] {
                let scaled = ball_lambda1(n, t, t.powf(1.0 - p), p).unwrap().lambda1;
                let rel = ((scaled * t.powf(p) - reference) / reference).abs();
                assert!(rel < 1e-6, "ball N={n} p={p} t={t}: rel {rel:.2e}");
                worst_ball = worst_ball.max(rel);
            }
        }
    }

    let fem = opts(SolverChoice::Fem, 1);
    let bc = BoundaryParams::robin2(1.0);
    let square = DomainSpec::Rectangle { a: 1.0, b: 1.0 };
    let reference = spectrum_of(&square, &bc, 1, &fem).unwrap();
    let ref_val = reference.value(1).unwrap();
    let ref_err = reference.entries()[0].provenance.abs_error;
    let mut worst_sq: f64 = 0.0;
    for &t in &[0.5f64, 2.0] {
        let scaled_domain = DomainSpec::Rectangle { a: t, b: t };
        let scaled_bc = BoundaryParams::robin2(1.0 / t);
        let scaled = spectrum_of(&scaled_domain, &scaled_bc, 1, &fem).unwrap();
        let val = scaled.value(1).unwrap() * t * t;
        let err = scaled.entries()[0].provenance.abs_error * t * t;
        let dev = (val - ref_val).abs();
        let tol = 2.0 * (ref_err + err) + 1e-12;
        assert!(dev < tol, "square t={t}: |Δ| = {dev:.2e} > tol {tol:.2e}");
        worst_sq = worst_sq.max(dev);
    }
    format!("balls worst rel {worst_ball:.1e}; square FEM dev {worst_sq:.1e} inside error bars")
}

/// λ₂(Ω) > λ₂(D₂) with margin > 2× combined error for five area-1 shapes
/// at α ∈ {0.5, 5}, p = 2; D₂ itself reports the extremal equality; for
/// p = 3 the union-of-balls competitors give the same verdicts via
/// shooting.
fn criterion_5() -> String {
    let r04 = (0.4 / PI).sqrt();
    let r06 = (0.6 / PI).sqrt();
    let competitors = vec![
        DomainSpec::Disk { radius: R_AREA1 },
        DomainSpec::Rectangle { a: 1.0, b: 1.0 },
        DomainSpec::Rectangle { a: 2.0, b: 0.5 },
        DomainSpec::union(vec![
            DomainSpec::Disk { radius: r04 },
            DomainSpec::Disk { radius: r06 },
        ])
        .unwrap(),
        make_dk(1.0, 3, 2).unwrap(),
    ];
    let mut held = 0usize;
    for d in &competitors {
        for &alpha in &[0.5, 5.0] {
            let report = check_two_balls(d, &BoundaryParams::robin2(alpha), &auto()).unwrap();
            let case = &report.cases[0];
            assert!(
                report.verdict == Verdict::Holds && case.margin > case.tolerance,
                "{d} alpha={alpha}: verdict {:?}, margin {:.3e} vs tol {:.3e}",
                report.verdict,
                case.margin,
                case.tolerance
            );
            held += 1;
        }
    }

    let d2 = make_dk(1.0, 2, 2).unwrap();
    for &alpha in &[0.5, 5.0] {
        let report = check_two_balls(&d2, &BoundaryParams::robin2(alpha), &auto()).unwrap();
        assert!(
            report.cases[0].outcome == CaseOutcome::Extremal
                && report.verdict == Verdict::Inconclusive,
            "D_2 alpha={alpha} must report the extremal equality case"
        );
    }

    let p3_competitors = vec![
        DomainSpec::union(vec![
            DomainSpec::Disk { radius: r04 },
            DomainSpec::Disk { radius: r06 },
        ])
        .unwrap(),
        make_dk(1.0, 3, 2).unwrap(),
    ];
    for d in &p3_competitors {
        for &alpha in &[0.5, 5.0] {
            let report = check_two_balls(d, &BoundaryParams::robin(3.0, alpha), &auto()).unwrap();
            assert!(
                report.verdict == Verdict::Holds,
                "p=3 {d} alpha={alpha}: verdict {:?}",
                report.verdict
            );
            held += 1;
        }
    }
    for &alpha in &[0.5, 5.0] {
        let report = check_two_balls(&d2, &BoundaryParams::robin(3.0, alpha), &auto()).unwrap();
        assert!(report.cases[0].outcome == CaseOutcome::Extremal);
    }
    format!("{held} strict cases hold with margin > tolerance, D_2 extremal at p = 2 and p = 3")
}

/// k = 3 crossover on the area-1 disk: Δ(α) > 0 at α = 0.01, < 0 at 10³,
/// α* localized to 3 significant digits, FEM rerun at one extra
/// refinement moves α* by < 5%, and both Dirichlet endpoints match the
/// frozen Bessel-zero values.
fn criterion_6() -> String {
    let disk = DomainSpec::Disk { radius: R_AREA1 };

    let dirichlet = BoundaryParams::dirichlet(2.0);
    let own = spectrum_of(&disk, &dirichlet, 3, &auto()).unwrap().value(3).unwrap();
    let d3 = make_dk(1.0, 3, 2).unwrap();
    let reference = spectrum_of(&d3, &dirichlet, 3, &auto()).unwrap().value(3).unwrap();
    assert!(((own - DISK_DIRICHLET_L3) / own).abs() < 1e-9);
    assert!(((reference - D3_DIRICHLET_L3) / reference).abs() < 1e-9);
    assert!(own < reference, "Dirichlet endpoints must be ordered for a crossing");

    let report = crossover(&disk, 3, 0.01, 1000.0, 25, &auto()).unwrap();
    let first = &report.cases[0];
    let last = report.cases.last().unwrap();
    assert!(first.margin > first.tolerance, "Δ(0.01) must be decisively positive");
    assert!(last.margin < -last.tolerance, "Δ(1000) must be decisively negative");
    let a_star = report.alpha_star.expect("crossover must localize alpha*");

    let fem0 = crossover(&disk, 3, 0.01, 1000.0, 13, &opts(SolverChoice::Fem, 0)).unwrap();
    let fem1 = crossover(&disk, 3, 0.01, 1000.0, 13, &opts(SolverChoice::Fem, 1)).unwrap();
    let s0 = fem0.alpha_star.expect("FEM crossover (refine 0) must localize alpha*");
    let s1 = fem1.alpha_star.expect("FEM crossover (refine 1) must localize alpha*");
    let shift = ((s1 - s0) / s0).abs();
    assert!(shift < 0.05, "alpha* moved {:.1}% under refinement", 100.0 * shift);

    format!(
        "alpha* = {a_star:.4} (3 sig digits), FEM refinement shift {:.2}%, \
         Dirichlet endpoints {own:.2} < {reference:.2}",
        100.0 * shift
    )
}

/// Wentzell suite on four area-1 domains × three (β, γ) pairs: residuals
/// below 1e-10, Λ₁ < γ, Λ_n nondecreasing, Λ₂ minimized exactly by D₂,
/// and the transfer comparison on (square, D₂) confirms the Robin-to-
/// Wentzell direction.
fn criterion_7() -> String {
    let d2 = make_dk(1.0, 2, 2).unwrap();
    let domains = vec![
        ("disk", DomainSpec::Disk { radius: R_AREA1 }),
        ("square", DomainSpec::Rectangle { a: 1.0, b: 1.0 }),
        ("D2", d2.clone()),
        ("D3", make_dk(1.0, 3, 2).unwrap()),
    ];
    let params = [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)];
    let mut worst_residual: f64 = 0.0;
    for &(beta, gamma) in &params {
        let wp = WentzellParams::new(beta, gamma).unwrap();
        let mut lambda2 = Vec::new();
        for (name, d) in &domains {
            let curves = DomainCurves::with_options(d.clone(), auto()).unwrap();
            let eigs = wentzell_eigs_detailed(&wp, 2, &curves).unwrap();
            for e in &eigs {
                assert!(e.residual < 1e-10, "{name} ({beta},{gamma}) n={}: residual", e.n);
                worst_residual = worst_residual.max(e.residual);
            }
            assert!(eigs[0].lambda < gamma, "{name}: Lambda_1 must stay below gamma");
            assert!(eigs[1].lambda >= eigs[0].lambda - 1e-12, "{name}: ordering");
            lambda2.push((*name, eigs[1].lambda));
        }
        let base = lambda2.iter().find(|(n, _)| *n == "D2").unwrap().1;
        for (name, v) in &lambda2 {
            if *name == "D2" {
                continue;
            }
            assert!(
                *v > base + 1e-8,
                "({beta},{gamma}): Lambda_2({name}) = {v} must exceed Lambda_2(D2) = {base}"
            );
        }
    }

    let square = DomainSpec::Rectangle { a: 1.0, b: 1.0 };
    let wp = WentzellParams::new(1.0, 1.0).unwrap();
    let tc = transfer_check(&square, &d2, &wp, 2, &auto()).unwrap();
    assert!(tc.premise_holds, "Robin domination premise must hold decisively");
    assert!(!tc.conclusion_violated && tc.wentzell_margin > 0.0, "transfer direction");
    assert!(tc.consistent());

    format!(
        "12 domain/parameter runs, worst residual {worst_residual:.1e}, \
         D_2 minimizes Lambda_2, transfer margin {:.3}",
        tc.wentzell_margin
    )
}

/// Appendix invariants: α-monotonicity on 20-point grids, strict
/// domination by Dirichlet values, Neumann positivity of λ₂ on connected
/// shapes, strict volume monotonicity of λ₁ on balls for p ∈ {1.5,2,3}.
fn criterion_8() -> String {
    let grid20 = linspace(0.0, 5.0, 20);
    let mut columns = 0usize;
    for (d, k) in [
        (DomainSpec::Interval { length: PI }, 3usize),
        (DomainSpec::Rectangle { a: 1.0, b: 1.0 }, 3),
        (DomainSpec::Disk { radius: 1.0 }, 3),
    ] {
        let table = sweep_alpha(&d, 2.0, k, &grid20, &auto()).unwrap();
        assert!(table.monotone_ok.iter().all(|&ok| ok), "{d}: alpha-monotonicity");
        columns += table.monotone_ok.len();
    }
    let positive20 = linspace(0.25, 5.0, 20);
    for &p in &[1.5, 3.0] {
        let d = DomainSpec::Disk { radius: 1.0 };
        let table = sweep_alpha(&d, p, 1, &positive20, &auto()).unwrap();
        assert!(table.monotone_ok.iter().all(|&ok| ok), "p={p} alpha-monotonicity");
        columns += 1;
    }

    for (d, k) in [
        (DomainSpec::Interval { length: PI }, 4usize),
        (DomainSpec::Rectangle { a: 1.0, b: 1.0 }, 4),
        (DomainSpec::Disk { radius: 1.0 }, 4),
    ] {
        let hard = spectrum_of(&d, &BoundaryParams::dirichlet(2.0), k, &auto()).unwrap();
        for &alpha in &[1.0, 10.0] {
            let soft = spectrum_of(&d, &BoundaryParams::robin2(alpha), k, &auto()).unwrap();
            for n in 1..=k {
                assert!(
                    soft.value(n).unwrap() < hard.value(n).unwrap(),
                    "{d} alpha={alpha} n={n}: Robin must stay below Dirichlet"
                );
            }
        }
    }

    for d in [
        DomainSpec::Interval { length: PI },
        DomainSpec::Rectangle { a: 1.0, b: 1.0 },
        DomainSpec::Disk { radius: 1.0 },
    ] {
        let s = spectrum_of(&d, &BoundaryParams::neumann(2.0), 2, &auto()).unwrap();
        assert!(s.value(1).unwrap().abs() < 1e-9, "{d}: Neumann ground state is 0");
        assert!(s.value(2).unwrap() > 1e-6, "{d}: connected Neumann λ₂ must be positive");
    }

    let volumes = linspace(0.5, 2.0, 8);
    for &p in &[1.5, 2.0, 3.0] {
        let bc = BoundaryParams::robin(p, 1.0);
        let table = sweep_volume(2, &bc, 1, &volumes, &auto()).unwrap();
        assert!(table.monotone_ok[0], "p={p}: volume monotonicity of λ₁");
    }

    format!("{columns} alpha-monotone columns, Dirichlet domination, Neumann positivity, volume monotonicity: zero violations")
}

/// Byte-identical CSV from identical CLI invocations, twice in a row.
fn criterion_9() -> String {
    let bin = env!("CARGO_BIN_EXE_robinlab");
    let invocations: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--domain", "disk:R=1", "--alpha", "1", "--k", "4", "--solver", "fem"],
        vec!["crossover", "--domain", "disk:R=0.5641895835477563", "--k", "3"],
        vec![
            "sweep",
            "--domain",
            "interval:L=3.14159265358979",
            "--from",
            "0",
            "--to",
            "5",
            "--steps",
            "20",
            "--k",
            "3",
        ],
    ];
    for args in &invocations {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let run = Command::new(bin).args(args).output().unwrap();
            assert!(run.status.success(), "{args:?} failed: {:?}", run.status);
            outputs.push(run.stdout);
        }
        assert!(
            outputs[0] == outputs[1],
            "{args:?}: two runs differ ({} vs {} bytes)",
            outputs[0].len(),
            outputs[1].len()
        );
        assert!(!outputs[0].is_empty(), "{args:?}: produced no output");
    }
    format!("{} invocations byte-identical across two runs each", invocations.len())
}
