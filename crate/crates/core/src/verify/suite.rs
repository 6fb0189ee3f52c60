use std::f64::consts::FRAC_PI_4;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::json;

use super::checks::*;
use super::context::{Context, FemSettings, Gate};
use super::report::{CheckReport, Status};
use crate::domain::{presets, RobinSpec};
use crate::error::{Error, Result};
use crate::finsler::{wulff_polygon, NormSpec, Polygon};

/// Named collections of checks.
pub const PRESETS: &[&str] = &["paper-core", "radial"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub preset: String,
    /// Seeds the random convex domain and the norm-identity samples.
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[serde(skip)]
    pub jobs: usize,
    /// Treat `Inconclusive` as failure.
    pub strict: bool,
    pub fem: FemSettings,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            preset: "paper-core".into(),
            seed: 7,
            jobs: 1,
            strict: false,
            fem: FemSettings::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: String,
    pub config: SuiteConfig,
    pub gate: Option<Gate>,
    pub summary: Summary,
    pub reports: Vec<CheckReport>,
}

impl SuiteReport {
    /// No failures, and no inconclusive results when `strict`.
    pub fn ok(&self) -> bool {
        self.summary.failed == 0 && (!self.config.strict || self.summary.inconclusive == 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serializes")
    }

    /// Columns `check_id,lhs,rhs,slack,tol,pass,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check_id,lhs,rhs,slack,tol,pass,status\n");
        for r in &self.reports {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.3e},{},{:?}\n",
                r.check_id, r.lhs, r.rhs, r.slack, r.tol, r.pass, r.status
            ));
        }
        out
    }
}

type Job = Box<dyn Fn(&Context) -> Result<Vec<CheckReport>> + Send + Sync>;

struct Task {
    name: String,
    job: Job,
}

fn task(name: impl Into<String>, job: impl Fn(&Context) -> Result<Vec<CheckReport>> + Send + Sync + 'static) -> Task {
    Task {
        name: name.into(),
        job: Box::new(job),
    }
}

fn one(r: Result<CheckReport>) -> Result<Vec<CheckReport>> {
    r.map(|r| vec![r])
}

fn ellipse() -> NormSpec {
    NormSpec::ellipse(&[vec![4.0, 0.0], vec![0.0, 1.0]]).expect("SPD matrix")
}

fn euclid() -> NormSpec {
    NormSpec::euclidean(2).expect("n = 2")
}

fn unit_area_domains(seed: u64) -> Result<Vec<NamedDomain>> {
    Ok(vec![
        NamedDomain::new("square", presets::centered_square()),
        NamedDomain::new("hexagon", presets::hexagon()),
        NamedDomain::new(format!("random-{seed}"), presets::random_convex(seed, 9)?),
    ])
}

fn radial_tasks(seed: u64) -> Vec<Task> {
    let mut t = Vec::new();
    for (name, norm) in [
        ("euclidean", euclid()),
        ("ellipse", ellipse()),
        ("qnorm3", NormSpec::qnorm(3.0, 2).expect("q > 1")),
        ("qnorm1.5", NormSpec::qnorm(1.5, 2).expect("q > 1")),
    ] {
        t.push(task(format!("norm_identities/{name}"), move |_| Ok(check_norm_identities(&norm, 10_000, seed))));
    }
    for p in [1.5, 2.0, 3.0] {
        t.push(task(format!("radial_structure/{p}"), move |_| check_radial_structure(p, 2, 1.0, 1.0)));
    }
    for (p, n, r, b, s) in [(2.0, 2, 1.0, 1.0, 2.0), (2.0, 2, 1.0, 1.0, 1.0), (3.0, 2, 1.0, 1.0, 0.5), (1.5, 3, 1.0, 2.0, 3.0)] {
        t.push(task(format!("scaling/radial/{p},{s}"), move |_| one(check_scaling(p, n, r, b, s))));
    }
    for b in [0.0, 1.0, 5.0] {
        t.push(task(format!("mean_bound/radial/{b}"), move |_| one(check_mean_bound_radial(2.0, 2, 1.0, b))));
    }
    t.push(task("radius_monotone", |_| check_radius_monotone(2.0, 2, 1.0, &[0.5, 0.8, 1.0, 1.25, 2.0])));
    t.push(task("cheeger/wulff/p=2", |_| check_cheeger_wulff(2.0, 2, 1.0, &[0.5, 1.0, 2.0, 5.0])));
    t.push(task("cheeger/wulff/p=3", |_| check_cheeger_wulff(3.0, 2, 1.0, &[0.5, 1.0, 2.0])));
    t
}

fn paper_core_tasks(seed: u64) -> Result<Vec<Task>> {
    let mut t = vec![task("gate", |ctx| one(check_gate(ctx)))];
    t.extend(radial_tasks(seed));
    let doms = unit_area_domains(seed)?;
    let unit_square = NamedDomain::new("unit-square", presets::unit_square());
    let disk = NamedDomain::new("disk", presets::disk(256, 1.0)?);

    {
        let d = unit_square.clone();
        t.push(task("scaling/fem", move |ctx| one(check_scaling_fem(ctx, &d, &euclid(), 2.0, 1.0, 2.0))));
    }
    for (d, robin) in [
        (disk.clone(), RobinSpec::constant(1.0)?),
        (unit_square.clone(), RobinSpec::linear(1.0, Some([0.5, 0.5]))?),
        (unit_square.clone(), RobinSpec::constant(0.0)?),
    ] {
        t.push(task(format!("mean_bound/fem/{}", d.name), move |ctx| {
            one(check_mean_bound(ctx, &d, &euclid(), 2.0, &robin))
        }));
    }
    for (name, norm) in [
        ("euclidean", euclid()),
        ("ellipse", ellipse()),
        ("qnorm3", NormSpec::qnorm(3.0, 2)?),
    ] {
        let d = unit_square.clone();
        t.push(task(format!("euclid_sandwich/{name}"), move |ctx| {
            check_euclid_sandwich(ctx, &d, &norm, 2.0, &RobinSpec::constant(1.0)?)
        }));
    }
    t.push(task("thin_rectangles", |ctx| check_thin_rectangles(ctx, &euclid(), 2.0, 1.0, &[1.0, 2.0, 3.0, 4.0])));

    {
        let inner = NamedDomain::new("inscribed-square", Polygon::regular(4, 1.0, [0.0, 0.0], FRAC_PI_4)?);
        let outer = NamedDomain::new("circumscribed-square", Polygon::rectangle(-1.0, -1.0, 1.0, 1.0)?);
        t.push(task("monotonicity/euclidean", move |ctx| {
            check_monotonicity(ctx, &euclid(), 2.0, 1.0, &inner, 1.0, &outer)
        }));
        let e = ellipse();
        let inner = NamedDomain::new("wulff-0.8", wulff_polygon(&e, 0.8, [0.0, 0.0], 64)?);
        let outer = NamedDomain::new("wulff-1.25", wulff_polygon(&e, 1.25, [0.0, 0.0], 64)?);
        t.push(task("monotonicity/ellipse", move |ctx| {
            check_monotonicity(ctx, &ellipse(), 2.0, 1.0, &inner, 1.0, &outer)
        }));
    }
    for (name, norm) in [("euclidean", euclid()), ("ellipse", ellipse())] {
        t.push(task(format!("wulff_fem/{name}"), move |ctx| one(check_wulff_fem(ctx, &norm, 2.0, 1.0, 1.0))));
    }

    for (name, norm) in [("euclidean", euclid()), ("ellipse", ellipse())] {
        for mode in [FkMode::Constant, FkMode::Variable] {
            let (norm, doms) = (norm.clone(), doms.clone());
            t.push(task(format!("faber_krahn/{name}/{mode:?}"), move |ctx| {
                check_faber_krahn(ctx, &norm, 2.0, 1.0, mode, &doms)
            }));
        }
    }

    {
        let d = doms.clone();
        t.push(task("cheeger/robin", move |ctx| check_cheeger_robin(ctx, &euclid(), 2.0, &d, &[0.5, 1.0, 2.0])));
        let mut dd = doms.clone();
        dd.push(NamedDomain::new("thin-2", presets::thin_rectangle(2.0)?));
        for (name, norm) in [("euclidean", euclid()), ("ellipse", ellipse())] {
            let dd = dd.clone();
            t.push(task(format!("cheeger/dirichlet/{name}"), move |ctx| check_dirichlet_cheeger(ctx, &norm, 2.0, &dd)));
        }
        let d = doms.clone();
        t.push(task("cheeger/weighted", move |ctx| check_weighted_cheeger(ctx, &euclid(), 2.0, 1.0, &d)));
        let d = doms.clone();
        t.push(task("cheeger/interval", move |_| {
            let mut out = Vec::new();
            for norm in [euclid(), ellipse()] {
                for dom in &d {
                    out.push(check_cheeger_interval(&norm, dom)?);
                }
            }
            Ok(out)
        }));
    }

    for (name, norm) in [("euclidean", euclid()), ("ellipse", ellipse())] {
        let d = doms.clone();
        let n2 = norm.clone();
        t.push(task(format!("weighted_isoperimetric/{name}/linear"), move |_| {
            check_weighted_isoperimetric(&n2, &d, IsoWeight::Linear(1.0), TOL_RADIAL)
        }));
        let d = doms.clone();
        let n2 = norm.clone();
        t.push(task(format!("weighted_isoperimetric/{name}/profile"), move |_| {
            check_weighted_isoperimetric(&n2, &d, IsoWeight::RadialProfile { p: 2.0, beta_bar: 1.0 }, TOL_RADIAL)
        }));
        let w = NamedDomain::new("wulff-512", presets::wulff_with_area(&norm, 1.0, 512)?);
        t.push(task(format!("weighted_isoperimetric/{name}/wulff"), move |_| {
            check_weighted_isoperimetric(&norm, std::slice::from_ref(&w), IsoWeight::Linear(1.0), 1e-4)
        }));
    }

    for d in [disk, NamedDomain::new("square", presets::centered_square())] {
        t.push(task(format!("representation/{}", d.name), move |ctx| {
            check_representation(ctx, &d, &euclid(), 2.0, 1.0, &[0.2, 0.4, 0.6, 0.8])
        }));
    }
    Ok(t)
}

fn tasks_for(config: &SuiteConfig) -> Result<Vec<Task>> {
    match config.preset.as_str() {
        "paper-core" => paper_core_tasks(config.seed),
        "radial" => Ok(radial_tasks(config.seed)),
        other => Err(Error::InvalidInput(format!(
            "unknown suite preset {other:?} (known: {})",
            PRESETS.join(", ")
        ))),
    }
}

/// Runs every check of the preset on up to `config.jobs` threads. The report
/// order is the task order, independent of scheduling.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if !(config.fem.h > 0.0) || !(config.fem.gate_tol > 0.0) {
        return Err(Error::InvalidInput("mesh size and gate tolerance must be positive".into()));
    }
    let tasks = tasks_for(config)?;
    let ctx = Context::new(config.fem.clone());
    let slots: Vec<Mutex<Option<Vec<CheckReport>>>> = tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(t) = tasks.get(i) else { break };
        let out = (t.job)(&ctx).unwrap_or_else(|e| vec![CheckReport::error(&t.name, json!({}), &e)]);
        *slots[i].lock().expect("slot lock") = Some(out);
    };
    let jobs = config.jobs.max(1).min(tasks.len().max(1));
    std::thread::scope(|s| {
        for _ in 1..jobs {
            s.spawn(work);
        }
        work();
    });
    let reports: Vec<CheckReport> = slots
        .into_iter()
        .flat_map(|m| m.into_inner().expect("slot lock").unwrap_or_default())
        .collect();
    let mut summary = Summary {
        total: reports.len(),
        ..Summary::default()
    };
    for r in &reports {
        match r.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Inconclusive => summary.inconclusive += 1,
        }
    }
    let gate = if config.preset == "paper-core" { ctx.gate().ok() } else { None };
    Ok(SuiteReport {
        schema: format!("{}/suite-report/v1", crate::SCHEMA_PREFIX),
        config: config.clone(),
        gate,
        summary,
        reports,
    })
}
