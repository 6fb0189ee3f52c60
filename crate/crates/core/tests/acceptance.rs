//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use aniso_robin::domain::{presets, solve_robin, triangulate, RobinSpec, SolverOptions};
use aniso_robin::finsler::wulff_polygon;
use aniso_robin::radial::{check_radial_structure, solve_dirichlet_radial, solve_radial, RadialProblem};
use aniso_robin::verify::{self, CheckReport, Context, FemSettings, FkMode, NamedDomain, Status, SuiteConfig};
use aniso_robin::NormSpec;
use common::bessel;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn reports_ok(reports: &[CheckReport]) -> Outcome {
    let bad: Vec<&str> = reports
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| r.check_id.as_str())
        .collect();
    let worst = reports
        .iter()
        .map(|r| r.slack + r.tol)
        .fold(f64::INFINITY, f64::min);
    if bad.is_empty() {
        outcome(true, format!("{} checks, min(slack + tol) = {worst:.3e}", reports.len()))
    } else {
        outcome(false, format!("not passing: {}", bad.join(", ")))
    }
}

fn collect(parts: Vec<aniso_robin::Result<Vec<CheckReport>>>) -> Outcome {
    let mut all = Vec::new();
    for p in parts {
        match p {
            Ok(r) => all.extend(r),
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    reports_ok(&all)
}

fn euclid() -> NormSpec {
    NormSpec::euclidean(2).unwrap()
}

fn ellipse() -> NormSpec {
    NormSpec::ellipse(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap()
}

fn c1_radial_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for beta in [0.5, 1.0, 5.0] {
        let k = bessel::robin_disk_root(beta);
        let start = Instant::now();
        let ell = solve_radial(&RadialProblem::new(2.0, 2, 1.0, beta).unwrap(), 1e-10).unwrap().ell1;
        slowest = slowest.max(start.elapsed());
        worst = worst.max((ell - k * k).abs() / (k * k));
    }
    outcome(
        worst <= 1e-8 && slowest < Duration::from_secs(1),
        format!("max rel err {worst:.2e} (tol 1e-8), slowest {slowest:.2?} (limit 1 s)"),
    )
}

fn c2_dirichlet_limit() -> Outcome {
    let j = bessel::j01();
    let dir = solve_dirichlet_radial(2.0, 2, 1.0, 1e-12).unwrap();
    let big = solve_radial(&RadialProblem::new(2.0, 2, 1.0, 1e6).unwrap(), 1e-10).unwrap().ell1;
    let e_dir = (dir - j * j).abs() / (j * j);
    let e_big = (big - dir).abs() / dir;
    outcome(
        e_dir <= 1e-8 && e_big <= 0.01,
        format!("Dirichlet vs j01^2 {e_dir:.2e} (tol 1e-8), beta=1e6 vs Dirichlet {e_big:.2e} (tol 1e-2)"),
    )
}

fn c3_fem_convergence() -> Outcome {
    let exact = solve_radial(&RadialProblem::new(2.0, 2, 1.0, 1.0).unwrap(), 1e-10).unwrap().ell1;
    let disk = presets::disk(256, 1.0).unwrap();
    let robin = RobinSpec::constant(1.0).unwrap();
    let mut errs = Vec::new();
    let mut finest = Duration::ZERO;
    for h in [0.08, 0.04, 0.02] {
        let start = Instant::now();
        let mesh = triangulate(&disk, h).unwrap();
        let ell = solve_robin(&mesh, &euclid(), 2.0, &robin, &SolverOptions::default()).unwrap().ell1;
        finest = start.elapsed();
        errs.push((ell - exact).abs() / exact);
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    outcome(
        monotone && errs[2] <= 0.02 && finest < Duration::from_secs(60),
        format!(
            "rel errors {:.2e}, {:.2e}, {:.2e} (monotone: {monotone}), finest run {finest:.2?} (limit 60 s)",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn c4_nonlinear_structure() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for p in [1.5, 3.0] {
        let sol = solve_radial(&RadialProblem::new(p, 2, 1.0, 1.0).unwrap(), 1e-10).unwrap();
        let s = check_radial_structure(&sol);
        ok &= s.passed();
        details.push(format!("p={p}: passed={} ode residual {:.2e}", s.passed(), s.max_ode_residual));
    }
    outcome(ok, details.join("; "))
}

fn c5_basic_properties(ctx: &Context) -> Outcome {
    let sq = NamedDomain::new("unit-square", presets::unit_square());
    let disk = NamedDomain::new("disk", presets::disk(256, 1.0).unwrap());
    collect(vec![
        verify::check_scaling(2.0, 2, 1.0, 1.0, 2.0).map(|r| vec![r]),
        verify::check_scaling_fem(ctx, &sq, &euclid(), 2.0, 1.0, 2.0).map(|r| vec![r]),
        verify::check_mean_bound(ctx, &disk, &euclid(), 2.0, &RobinSpec::constant(1.0).unwrap()).map(|r| vec![r]),
        verify::check_mean_bound(ctx, &sq, &euclid(), 2.0, &RobinSpec::linear(1.0, Some([0.5, 0.5])).unwrap())
            .map(|r| vec![r]),
        verify::check_euclid_sandwich(ctx, &sq, &ellipse(), 2.0, &RobinSpec::constant(1.0).unwrap()),
        verify::check_thin_rectangles(ctx, &euclid(), 2.0, 1.0, &[1.0, 2.0, 3.0, 4.0]),
    ])
}

fn c6_representation(ctx: &Context) -> Outcome {
    let disk = NamedDomain::new("disk", presets::disk(256, 1.0).unwrap());
    collect(vec![verify::check_representation(ctx, &disk, &euclid(), 2.0, 1.0, &[0.2, 0.4, 0.6, 0.8])])
}

fn c7_monotonicity(ctx: &Context) -> Outcome {
    let inner = NamedDomain::new(
        "inscribed-square",
        aniso_robin::Polygon::regular(4, 1.0, [0.0, 0.0], std::f64::consts::FRAC_PI_4).unwrap(),
    );
    let outer = NamedDomain::new("circumscribed-square", aniso_robin::Polygon::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap());
    collect(vec![verify::check_monotonicity(ctx, &euclid(), 2.0, 1.0, &inner, 1.0, &outer)])
}

fn c8_faber_krahn(ctx: &Context) -> Outcome {
    let doms = vec![
        NamedDomain::new("square", presets::centered_square()),
        NamedDomain::new("hexagon", presets::hexagon()),
    ];
    let mut parts = Vec::new();
    for norm in [euclid(), ellipse()] {
        for mode in [FkMode::Constant, FkMode::Variable] {
            parts.push(verify::check_faber_krahn(ctx, &norm, 2.0, 1.0, mode, &doms));
        }
    }
    collect(parts)
}

fn c9_cheeger(ctx: &Context) -> Outcome {
    let mut doms = vec![
        NamedDomain::new("square", presets::centered_square()),
        NamedDomain::new("hexagon", presets::hexagon()),
        NamedDomain::new("random-7", presets::random_convex(7, 9).unwrap()),
        NamedDomain::new("thin-2", presets::thin_rectangle(2.0).unwrap()),
    ];
    let weighted = doms[..3].to_vec();
    doms.push(NamedDomain::new("disk", presets::disk(256, 1.0).unwrap()));
    doms.push(NamedDomain::new("wulff-ellipse", wulff_polygon(&ellipse(), 1.0, [0.0, 0.0], 128).unwrap()));
    collect(vec![
        verify::check_cheeger_wulff(2.0, 2, 1.0, &[1.0, 2.0]),
        verify::check_dirichlet_cheeger(ctx, &euclid(), 2.0, &doms),
        verify::check_weighted_cheeger(ctx, &euclid(), 2.0, 1.0, &weighted),
    ])
}

fn c10_norm_identities() -> Outcome {
    let mut all = Vec::new();
    for norm in [euclid(), ellipse(), NormSpec::qnorm(3.0, 2).unwrap(), NormSpec::qnorm(1.5, 2).unwrap()] {
        all.extend(verify::check_norm_identities(&norm, 10_000, 7));
    }
    reports_ok(&all)
}

fn c11_determinism() -> Outcome {
    let jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let config = SuiteConfig {
        jobs,
        ..SuiteConfig::default()
    };
    let a = verify::run_suite(&config).unwrap();
    let b = verify::run_suite(&SuiteConfig { jobs: 1, ..config }).unwrap();
    let same = a.to_json() == b.to_json();
    outcome(
        same && a.ok(),
        format!(
            "byte-identical: {same} ({} bytes), suite passed {}/{} with {} inconclusive",
            a.to_json().len(),
            a.summary.passed,
            a.summary.total,
            a.summary.inconclusive
        ),
    )
}

fn main() {
    let ctx = Context::new(FemSettings::default());
    let gate = ctx.gate();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("radial solver matches the Bessel oracle", Box::new(c1_radial_oracle)),
        ("large-beta limit and Dirichlet value", Box::new(c2_dirichlet_limit)),
        ("FEM convergence on the disk", Box::new(c3_fem_convergence)),
        ("radial structure for p = 1.5, 3", Box::new(c4_nonlinear_structure)),
        ("scaling, mean bound, sandwich, thin rectangles", Box::new(|| c5_basic_properties(&ctx))),
        ("representation formula on the disk", Box::new(|| c6_representation(&ctx))),
        ("monotonicity sandwich", Box::new(|| c7_monotonicity(&ctx))),
        ("Faber-Krahn, constant and variable beta", Box::new(|| c8_faber_krahn(&ctx))),
        ("Cheeger-type bounds", Box::new(|| c9_cheeger(&ctx))),
        ("norm identities", Box::new(c10_norm_identities)),
        ("suite determinism", Box::new(c11_determinism)),
    ];
    match &gate {
        Ok(g) => println!("gate: disk FEM {:.10} vs radial {:.10}, rel err {:.2e}", g.fem, g.radial, g.rel_err),
        Err(e) => println!("gate: error {e}"),
    }
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.ok {
            failed += 1;
        }
        println!("criterion {:>2} {}: {name}: {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
