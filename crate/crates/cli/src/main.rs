use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use aniso_robin::domain::{
    cheeger_bounds, presets, representation_functional_with, solve_dirichlet, solve_robin, triangulate,
    weighted_cheeger, EigenResult, Mesh, Phi, RobinSpec, SolverOptions,
};
use aniso_robin::radial::{solve_dirichlet_radial, solve_radial_with, RadialOptions, RadialProblem};
use aniso_robin::verify::{run_suite, FemSettings, SuiteConfig};
use aniso_robin::{Error, NormSpec, Polygon, SCHEMA_PREFIX};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "aniso-robin", version, about = "First Robin eigenvalue of the anisotropic p-Laplacian")]
struct Cli {
    /// Directory for JSON reports and CSV tables.
    #[arg(long, global = true, env = "ANISO_ROBIN_OUT", default_value = ".")]
    out: PathBuf,
    /// Worker threads for `sweep` and `verify-suite`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Radial eigenvalue on the Wulff shape of radius R.
    SolveRadial(RadialArgs),
    /// FEM Robin eigenvalue on a polygon.
    SolveDomain(DomainArgs),
    /// FEM Dirichlet eigenvalue on a polygon.
    Dirichlet(DomainArgs),
    /// Level-set representation functional of the FEM eigenfunction.
    Represent(RepresentArgs),
    /// Anisotropic inradius, Cheeger bounds and the weighted Cheeger bound.
    Cheeger(CheegerArgs),
    /// Run a named verification suite.
    VerifySuite(SuiteArgs),
    /// FEM eigenvalue over a grid of (p, β̄), next to the equal-area Wulff value.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct RadialArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long = "R", alias = "radius")]
    radius: f64,
    #[arg(long)]
    beta: f64,
    /// RadialOptions::tol
    #[arg(long, default_value_t = RadialOptions::default().tol)]
    tol: f64,
    /// RadialOptions::grid_size
    #[arg(long, default_value_t = RadialOptions::default().grid_size)]
    grid_size: usize,
    /// RadialOptions::rtol
    #[arg(long, default_value_t = RadialOptions::default().rtol)]
    rtol: f64,
    /// RadialOptions::atol
    #[arg(long, default_value_t = RadialOptions::default().atol)]
    atol: f64,
    /// Also solve the Dirichlet problem on the same Wulff shape.
    #[arg(long)]
    dirichlet: bool,
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// Preset name (unit-square, square, hexagon, disk, disk-<k>, thin-<k>, random-<seed>) or polygon JSON file.
    #[arg(long, default_value = "unit-square")]
    domain: String,
    /// euclidean, ellipse:a11,a12,a22, qnorm:<q>, inline JSON or a JSON file.
    #[arg(long, default_value = "euclidean")]
    norm: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Target mesh size.
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    /// SolverOptions::max_iterations
    #[arg(long, default_value_t = SolverOptions::default().max_iterations)]
    max_iterations: usize,
    /// SolverOptions::rel_tol
    #[arg(long, default_value_t = SolverOptions::default().rel_tol)]
    rel_tol: f64,
    /// SolverOptions::window
    #[arg(long, default_value_t = SolverOptions::default().window)]
    window: usize,
    /// Disable SolverOptions::precondition.
    #[arg(long)]
    no_precondition: bool,
}

#[derive(Args, Debug, Clone)]
struct RobinArgs {
    /// Constant β̄.
    #[arg(long, conflicts_with = "robin")]
    beta: Option<f64>,
    /// RobinSpec as inline JSON or a JSON file.
    #[arg(long)]
    robin: Option<String>,
}

#[derive(Args, Debug)]
struct DomainArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    robin: RobinArgs,
}

#[derive(Args, Debug)]
struct RepresentArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    robin: RobinArgs,
    /// Levels in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8")]
    t: Vec<f64>,
    /// Replace φ by this constant.
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Args, Debug)]
struct CheegerArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    robin: RobinArgs,
    /// Add superlevel sets of the FEM eigenfunction as candidates.
    #[arg(long)]
    with_eigen: bool,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value = "paper-core")]
    preset: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Count inconclusive checks as failures.
    #[arg(long)]
    strict: bool,
    /// FemSettings::h
    #[arg(long, default_value_t = FemSettings::default().h)]
    h: f64,
    /// FemSettings::gate_tol
    #[arg(long, default_value_t = FemSettings::default().gate_tol)]
    gate_tol: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    ps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    betas: Vec<f64>,
}

enum Failure {
    Check(String),
    Solver(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFiniteInput(_)
            | Error::InvalidNorm(_)
            | Error::DegenerateNorm(_)
            | Error::DegeneratePolygon(_)
            | Error::InvalidPolygon(_)
            | Error::InvalidExponent(_)
            | Error::InvalidMesh(_)
            | Error::NonConvexDomain
            | Error::InvalidInput(_)
            | Error::Json(_)
            | Error::Io(_) => Failure::Input(e.to_string()),
            other => Failure::Solver(other),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read_arg(s: &str) -> std::result::Result<String, Failure> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(s.to_string())
    } else {
        std::fs::read_to_string(s).map_err(|e| Failure::Input(format!("{s}: {e}")))
    }
}

fn parse_norm(s: &str) -> std::result::Result<NormSpec, Failure> {
    if s == "euclidean" {
        return Ok(NormSpec::euclidean(2)?);
    }
    let nums = |rest: &str| -> std::result::Result<Vec<f64>, Failure> {
        rest.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad number in norm {s:?}"))))
            .collect()
    };
    if let Some(rest) = s.strip_prefix("ellipse:") {
        let v = nums(rest)?;
        if v.len() != 3 {
            return Err(Failure::Input("ellipse expects a11,a12,a22".into()));
        }
        return Ok(NormSpec::ellipse(&[vec![v[0], v[1]], vec![v[1], v[2]]])?);
    }
    if let Some(rest) = s.strip_prefix("qnorm:") {
        let v = nums(rest)?;
        if v.len() != 1 {
            return Err(Failure::Input("qnorm expects one exponent".into()));
        }
        return Ok(NormSpec::qnorm(v[0], 2)?);
    }
    let norm = NormSpec::from_json(&read_arg(s)?)?;
    if norm.dim() != 2 {
        return Err(Failure::Input("domain solvers need a planar norm".into()));
    }
    Ok(norm)
}

fn parse_domain(s: &str) -> std::result::Result<Polygon, Failure> {
    if Path::new(s).is_file() {
        let text = std::fs::read_to_string(s).map_err(|e| Failure::Input(format!("{s}: {e}")))?;
        return Ok(Polygon::from_json(&text)?);
    }
    Ok(presets::named(s)?)
}

fn parse_robin(r: &RobinArgs) -> std::result::Result<RobinSpec, Failure> {
    match (&r.robin, r.beta) {
        (Some(s), _) => Ok(RobinSpec::from_json(&read_arg(s)?)?),
        (None, Some(b)) => Ok(RobinSpec::constant(b)?),
        (None, None) => Ok(RobinSpec::constant(1.0)?),
    }
}

fn solver_options(a: &ProblemArgs) -> std::result::Result<SolverOptions, Failure> {
    let o = SolverOptions {
        max_iterations: a.max_iterations,
        rel_tol: a.rel_tol,
        window: a.window,
        precondition: !a.no_precondition,
        initial: None,
    };
    Ok(SolverOptions::from_json(&serde_json::to_string(&o).expect("options serialize"))?)
}

struct Setup {
    poly: Polygon,
    norm: NormSpec,
    mesh: Mesh,
    opts: SolverOptions,
}

fn setup(a: &ProblemArgs) -> std::result::Result<Setup, Failure> {
    let poly = parse_domain(&a.domain)?;
    let norm = parse_norm(&a.norm)?;
    if !(a.p > 1.0) || !a.p.is_finite() {
        return Err(Failure::Input(format!("p = {} must exceed 1", a.p)));
    }
    if !(a.h > 0.0) || !a.h.is_finite() {
        return Err(Failure::Input(format!("h = {} must be positive", a.h)));
    }
    let opts = solver_options(a)?;
    let mesh = triangulate(&poly, a.h)?;
    Ok(Setup { poly, norm, mesh, opts })
}

fn write(out: &Path, name: &str, contents: &str) -> std::result::Result<(), Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    let path = out.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn solve_radial_cmd(out: &Path, a: &RadialArgs) -> Outcome {
    let prob = RadialProblem::new(a.p, a.n, a.radius, a.beta)?;
    let opts = RadialOptions {
        tol: a.tol,
        grid_size: a.grid_size,
        rtol: a.rtol,
        atol: a.atol,
        ..RadialOptions::default()
    };
    let sol = solve_radial_with(&prob, &opts)?;
    let mut header = sol.header_json();
    if a.dirichlet {
        header["lambda_D"] = json!(solve_dirichlet_radial(a.p, a.n, a.radius, a.tol)?);
    }
    write(out, "radial.json", &pretty(&header))?;
    write(out, "radial.csv", &sol.to_csv())?;
    println!("solve-radial p={} n={} R={} beta={} ell1={:.15e} cR={:.15e}", a.p, a.n, a.radius, a.beta, sol.ell1, sol.c_r);
    Ok(())
}

fn eigen_report(s: &Setup, eig: &EigenResult, robin: Option<&RobinSpec>) -> serde_json::Value {
    let mut v = eig.header_json(&s.mesh);
    v["norm"] = serde_json::to_value(&s.norm).expect("norm serializes");
    v["domain"] = serde_json::to_value(&s.poly).expect("polygon serializes");
    if let Some(r) = robin {
        v["robin"] = serde_json::to_value(r).expect("robin serializes");
        v["mean_bound"] = json!(r.boundary_mass(&s.norm, &s.mesh) / s.mesh.area());
    }
    v
}

fn solve_domain_cmd(out: &Path, a: &DomainArgs) -> Outcome {
    let s = setup(&a.problem)?;
    let robin = parse_robin(&a.robin)?;
    let eig = solve_robin(&s.mesh, &s.norm, a.problem.p, &robin, &s.opts)?;
    write(out, "eigen.json", &pretty(&eigen_report(&s, &eig, Some(&robin))))?;
    write(out, "eigen.csv", &eig.to_csv(&s.mesh))?;
    println!(
        "solve-domain domain={} norm={} p={} ell1={:.12e} iterations={} degenerate={}",
        a.problem.domain,
        s.norm.label(),
        a.problem.p,
        eig.ell1,
        eig.iterations,
        eig.degenerate
    );
    Ok(())
}

fn dirichlet_cmd(out: &Path, a: &DomainArgs) -> Outcome {
    let s = setup(&a.problem)?;
    let eig = solve_dirichlet(&s.mesh, &s.norm, a.problem.p, &s.opts)?;
    write(out, "dirichlet.json", &pretty(&eigen_report(&s, &eig, None)))?;
    write(out, "dirichlet.csv", &eig.to_csv(&s.mesh))?;
    println!(
        "dirichlet domain={} norm={} p={} lambda_D={:.12e} iterations={}",
        a.problem.domain,
        s.norm.label(),
        a.problem.p,
        eig.ell1,
        eig.iterations
    );
    Ok(())
}

fn represent_cmd(out: &Path, a: &RepresentArgs) -> Outcome {
    let s = setup(&a.problem)?;
    let robin = parse_robin(&a.robin)?;
    let eig = solve_robin(&s.mesh, &s.norm, a.problem.p, &robin, &s.opts)?;
    let phi = a.phi.map_or(Phi::Eigen, Phi::Constant);
    let mut rows = Vec::new();
    let mut csv = String::from("t,value,area,volume_term,level_term,boundary_term\n");
    for &t in &a.t {
        let r = representation_functional_with(&s.mesh, &s.norm, a.problem.p, &robin, &eig, t, phi)?;
        csv.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.t, r.value, r.area, r.volume_term, r.level_term, r.boundary_term
        ));
        println!("represent t={:.6} value={:.12e} ell1={:.12e}", r.t, r.value, eig.ell1);
        rows.push(r);
    }
    let v = json!({
        "schema": format!("{SCHEMA_PREFIX}/representation/v1"),
        "ell1": eig.ell1,
        "phi": phi,
        "levels": rows,
    });
    write(out, "representation.json", &pretty(&v))?;
    write(out, "representation.csv", &csv)
}

fn cheeger_cmd(out: &Path, a: &CheegerArgs) -> Outcome {
    let s = setup(&a.problem)?;
    let robin = parse_robin(&a.robin)?;
    let eig = if a.with_eigen {
        Some(solve_robin(&s.mesh, &s.norm, a.problem.p, &robin, &s.opts)?)
    } else {
        None
    };
    let with = eig.as_ref().map(|e| (&s.mesh, e));
    let b = cheeger_bounds(&s.poly, &s.norm, with)?;
    let w = weighted_cheeger(&s.poly, &s.norm, &robin, with)?;
    let v = json!({
        "schema": format!("{SCHEMA_PREFIX}/cheeger/v1"),
        "norm": s.norm,
        "bounds": b,
        "weighted": w,
        "robin": robin,
    });
    write(out, "cheeger.json", &pretty(&v))?;
    println!(
        "cheeger domain={} R_F={:.12e} lower={:.12e} upper={:.12e} weighted_upper={:.12e}",
        a.problem.domain, b.inradius, b.lower, b.upper, w.upper
    );
    Ok(())
}

fn suite_cmd(out: &Path, jobs: usize, a: &SuiteArgs) -> Outcome {
    let config = SuiteConfig {
        preset: a.preset.clone(),
        seed: a.seed,
        jobs,
        strict: a.strict,
        fem: FemSettings {
            h: a.h,
            gate_tol: a.gate_tol,
            ..FemSettings::default()
        },
    };
    let report = run_suite(&config)?;
    let mut json = report.to_json();
    json.push('\n');
    write(out, "suite.json", &json)?;
    write(out, "suite.csv", &report.to_csv())?;
    for r in &report.reports {
        println!("{:?} {} slack={:.3e} tol={:.1e}", r.status, r.check_id, r.slack, r.tol);
    }
    let s = &report.summary;
    println!(
        "verify-suite preset={} seed={} total={} passed={} failed={} inconclusive={}",
        a.preset, a.seed, s.total, s.passed, s.failed, s.inconclusive
    );
    if report.ok() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} failed, {} inconclusive", s.failed, s.inconclusive)))
    }
}

struct SweepRow {
    p: f64,
    beta: f64,
    fem: std::result::Result<EigenResult, Error>,
    wulff: std::result::Result<f64, Error>,
}

fn sweep_cmd(out: &Path, jobs: usize, a: &SweepArgs) -> Outcome {
    let s = setup(&a.problem)?;
    if a.ps.iter().any(|p| !(*p > 1.0)) || a.betas.iter().any(|b| !(*b >= 0.0)) {
        return Err(Failure::Input("need p > 1 and beta >= 0".into()));
    }
    let grid: Vec<(f64, f64)> = a.ps.iter().flat_map(|&p| a.betas.iter().map(move |&b| (p, b))).collect();
    let radius = (s.poly.area() / s.norm.kappa()).sqrt();
    let slots: Vec<Mutex<Option<SweepRow>>> = grid.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(p, beta)) = grid.get(i) else { break };
        let fem = RobinSpec::constant(beta).and_then(|r| solve_robin(&s.mesh, &s.norm, p, &r, &s.opts));
        let wulff = RadialProblem::new(p, 2, radius, beta)
            .and_then(|prob| aniso_robin::radial::solve_radial(&prob, 1e-10))
            .map(|sol| sol.ell1);
        *slots[i].lock().expect("slot lock") = Some(SweepRow { p, beta, fem, wulff });
    };
    std::thread::scope(|sc| {
        for _ in 1..jobs.max(1).min(grid.len().max(1)) {
            sc.spawn(work);
        }
        work();
    });
    let mut csv = String::from("p,beta,ell1,iterations,wulff_ell1\n");
    let mut rows = Vec::new();
    for slot in slots {
        let r = slot.into_inner().expect("slot lock").expect("every grid point ran");
        let eig = r.fem?;
        let w = r.wulff?;
        csv.push_str(&format!("{},{},{:.12e},{},{:.12e}\n", r.p, r.beta, eig.ell1, eig.iterations, w));
        println!("sweep p={} beta={} ell1={:.12e} wulff={:.12e}", r.p, r.beta, eig.ell1, w);
        rows.push(json!({"p": r.p, "beta": r.beta, "ell1": eig.ell1, "iterations": eig.iterations, "wulff_ell1": w}));
    }
    let v = json!({
        "schema": format!("{SCHEMA_PREFIX}/sweep/v1"),
        "domain": a.problem.domain,
        "norm": s.norm,
        "h": s.mesh.h(),
        "wulff_radius": radius,
        "rows": rows,
    });
    write(out, "sweep.json", &pretty(&v))?;
    write(out, "sweep.csv", &csv)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out.as_path();
    let res = match &cli.command {
        Command::SolveRadial(a) => solve_radial_cmd(out, a),
        Command::SolveDomain(a) => solve_domain_cmd(out, a),
        Command::Dirichlet(a) => dirichlet_cmd(out, a),
        Command::Represent(a) => represent_cmd(out, a),
        Command::Cheeger(a) => cheeger_cmd(out, a),
        Command::VerifySuite(a) => suite_cmd(out, cli.jobs, a),
        Command::Sweep(a) => sweep_cmd(out, cli.jobs, a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(3)
        }
    }
}
