//! `hexcurv`: validate meshes, evaluate curvatures and Jacobians, inspect hexagons, run identity
//! suites and solve prescribed-curvature problems.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

mod report;

use clap::{Args, Parser, Subcommand};
use hexcurv::checks::{self, Summary};
use hexcurv::conformal::{Family, StructureSpec};
use hexcurv::curvature::{definiteness, evaluate};
use hexcurv::exec::Exec;
use hexcurv::hexagon::{
    center_identities, compatibility_residual, gram_residual, split_edge, EdgeSplit, HexLengths,
    HexagonGeometry,
};
use hexcurv::lorentz::{CausalClass, MinkowskiVec};
use hexcurv::mesh::{self, Triangulation};
use hexcurv::solver::{
    default_initial, solve_prescribed_curvature, Initial, SolveOptions, EXISTENCE_NOTE,
};
use report::{Report, Val};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "hexcurv",
    version,
    about = "Discrete conformal structures on ideally triangulated surfaces"
)]
struct Cli {
    /// Print a single JSON document instead of line records.
    #[arg(long, global = true)]
    json: bool,
    /// Seed of every randomized command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Evaluate faces on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a mesh file.
    Validate { mesh: PathBuf },
    /// Boundary curvatures `K <vertex> <value>`.
    Curvature(Eval),
    /// Entries `L <row> <col> <value>` of dK/du and its definiteness.
    Jacobian(Eval),
    /// Full geometry of one hexagon.
    Hexagon(HexArgs),
    /// Run the identity suites for one family.
    CheckIdentities(CheckArgs),
    /// Solve K(f) = K* by damped Newton.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
struct Eval {
    mesh: PathBuf,
    /// File of `f <vertex> <value>` lines; defaults to the family's starting point.
    #[arg(long)]
    factors: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HexArgs {
    /// Boundary lengths `l_ij,l_jk,l_ki`.
    #[arg(long, value_parser = reals::<3>)]
    lengths: [f64; 3],
    /// Ratios `sinh d_ij / sinh d_ji` per edge, with product 1; the default puts the center on the bisectors.
    #[arg(long, value_parser = reals::<3>, conflicts_with = "splits")]
    ratios: Option<[f64; 3]>,
    /// Partial lengths `d_ij,d_ji,d_jk,d_kj,d_ki,d_ik`.
    #[arg(long, value_parser = reals::<6>)]
    splits: Option<[f64; 6]>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct SolveArgs {
    mesh: PathBuf,
    /// File of `K <vertex> <value>` lines.
    target: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// File of `f <vertex> <value>` lines to start from.
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Where to write the solve report; standard error when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Where to write the solved factors; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Exactly `N` comma-separated reals.
fn reals<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let n = v.len();
    v.try_into()
        .map_err(|_| format!("expected {N} comma-separated values, got {n}"))
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::from_tag(s).ok_or_else(|| {
        let tags: Vec<&str> = Family::ALL.iter().map(|f| f.tag()).collect();
        format!("unknown family `{s}`; expected one of {}", tags.join(", "))
    })
}

/// Domain failure: message printed to standard error, exit code 1.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(Report, bool), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_mesh(path: &Path) -> Result<(Triangulation, StructureSpec), Failure> {
    Ok(mesh::parse(&read(path)?)?)
}

fn load_factors(
    path: Option<&PathBuf>,
    spec: &StructureSpec,
    tri: &Triangulation,
) -> Result<Vec<f64>, Failure> {
    Ok(match path {
        Some(p) => mesh::parse_vertex_values(&read(p)?, "f", tri)?,
        None => default_initial(spec, tri)?,
    })
}

fn vec_vals(v: MinkowskiVec) -> Vec<Val> {
    vec![v.x1.into(), v.x2.into(), v.x3.into()]
}

fn validate(path: &Path) -> Outcome {
    let (tri, spec, warnings) = mesh::parse_with_warnings(&read(path)?)?;
    let mut r = Report::new("validate");
    let (n, e, f) = (tri.n_vertices(), tri.edges.len(), tri.faces.len());
    r.headline = Some(format!("ok, N={n}, |E|={e}, |F|={f}"));
    r.push("vertices", vec![n.into()]);
    r.push("edges", vec![e.into()]);
    r.push("faces", vec![f.into()]);
    r.push("family", vec![spec.family.tag().into()]);
    r.push("existence_proven", vec![spec.existence_proven(&tri).into()]);
    for w in warnings {
        r.push("warning", vec![w.to_string().into()]);
    }
    Ok((r, true))
}

fn curvature(args: &Eval, jacobian: bool, exec: Exec) -> Outcome {
    let (tri, spec) = load_mesh(&args.mesh)?;
    let f = load_factors(args.factors.as_ref(), &spec, &tri)?;
    let sys = evaluate(&spec, &tri, &f, jacobian, exec)?;
    let id = |v: usize| Val::Int(tri.vertex_ids[v] as i64);
    let mut r = Report::new(if jacobian { "jacobian" } else { "curvature" });
    match &sys.jacobian {
        None => {
            for (v, k) in sys.k.iter().enumerate() {
                r.push("K", vec![id(v), (*k).into()]);
            }
        }
        Some(m) => {
            for row in 0..m.nrows() {
                for col in 0..m.ncols() {
                    r.push("L", vec![id(row), id(col), m[(row, col)].into()]);
                }
            }
            let d = definiteness(m);
            let norm = m.abs().max();
            r.push("max_eigenvalue", vec![d.max_eigenvalue.into()]);
            r.push("cholesky", vec![d.cholesky_ok.into()]);
            r.push("asymmetry", vec![d.asymmetry.into()]);
            r.push("negative_definite", vec![d.negative_definite(norm).into()]);
            for (face, b) in sys.branches.iter().enumerate() {
                r.push("branch", vec![face.into(), b.name().into()]);
            }
        }
    }
    Ok((r, true))
}

fn hexagon(args: &HexArgs) -> Outcome {
    let lengths = HexLengths::new(args.lengths[0], args.lengths[1], args.lengths[2]);
    let l = lengths.as_array();
    let splits: [EdgeSplit; 3] = match (&args.splits, &args.ratios) {
        (Some(d), _) => {
            let mut out = [EdgeSplit {
                d_ij: 0.0,
                d_ji: 0.0,
            }; 3];
            for (e, s) in out.iter_mut().enumerate() {
                *s = EdgeSplit::new(d[2 * e], d[2 * e + 1])?;
                if (s.length() - l[e]).abs() > 1e-8 * l[e].max(1.0) {
                    return Err(Failure(format!(
                        "splits of edge {e} sum to {}, not {}",
                        s.length(),
                        l[e]
                    )));
                }
            }
            out
        }
        (None, ratios) => {
            let rho = ratios.unwrap_or([1.0; 3]);
            [
                split_edge(l[0], rho[0])?,
                split_edge(l[1], rho[1])?,
                split_edge(l[2], rho[2])?,
            ]
        }
    };
    let g = HexagonGeometry::new(lengths, splits)?;
    let mut r = Report::new("hexagon");
    r.push("lengths", l.iter().map(|x| (*x).into()).collect());
    r.push(
        "angles",
        g.angles.as_array().iter().map(|x| (*x).into()).collect(),
    );
    for (e, s) in g.splits.iter().enumerate() {
        r.push("split", vec![e.into(), s.d_ij.into(), s.d_ji.into()]);
    }
    if let Some(dual) = g.dual_splits {
        for (e, s) in dual.iter().enumerate() {
            r.push(
                "dual_split",
                vec![e.into(), s.theta_st.into(), s.theta_ts.into()],
            );
        }
    }
    for (k, v) in g.vertices.iter().enumerate() {
        r.push("vertex", [vec![k.into()], vec_vals(*v)].concat());
    }
    for (k, v) in g.polar.iter().enumerate() {
        r.push("polar", [vec![k.into()], vec_vals(*v)].concat());
    }
    for (k, v) in g.edge_centers.iter().enumerate() {
        r.push("edge_center", [vec![k.into()], vec_vals(*v)].concat());
    }
    r.push("face_center", vec_vals(g.face_center));
    r.push("center_class", vec![g.center_class.name().into()]);
    if let Some(h) = g.h {
        r.push("h", h.iter().map(|x| (*x).into()).collect());
    }
    if let Some(q) = g.q {
        r.push("q", q.iter().map(|x| (*x).into()).collect());
    }
    r.push(
        "domain",
        vec![g
            .domain
            .map_or("none".to_string(), |d| d.to_string())
            .into()],
    );
    r.push(
        "gram_residual",
        vec![gram_residual(&g.vertices, lengths).into()],
    );
    r.push(
        "compatibility_residual",
        vec![compatibility_residual(&g.splits).into()],
    );
    let ids = center_identities(&g);
    r.push("lemma", vec![ids.lemma.map_or("none", |m| m.name()).into()]);
    r.push(
        "identity_residual",
        vec![ids.max_residual.into(), ids.equations.into()],
    );
    r.push("signs_coherent", vec![ids.signs_coherent.into()]);
    Ok((r, true))
}

fn summary_vals(s: &Summary) -> Vec<Val> {
    vec![
        s.name.clone().into(),
        s.samples.into(),
        s.worst.into(),
        s.bound.into(),
        s.violations.into(),
        s.passed().into(),
    ]
}

fn check_identities(args: &CheckArgs, seed: u64, exec: Exec) -> Outcome {
    let (f, n) = (args.family, args.samples);
    let mut suites = vec![
        checks::compatibility(f, n, seed, exec),
        checks::glickenstein_thomas(f, n, seed, exec),
        checks::derivative_family(f, n, seed, exec),
        checks::face_symmetry(f, n, seed, exec),
        checks::path_independence(f, n.div_ceil(10), seed, exec),
    ];
    for c in [
        CausalClass::TimeLike,
        CausalClass::SpaceLike,
        CausalClass::LightLike,
    ] {
        suites.push(checks::center_suite(c, n, seed, exec));
    }
    let (gram, polar) = checks::embedding(n, seed, exec);
    suites.extend([gram, polar]);
    let mut r = Report::new("check-identities");
    r.push("family", vec![f.tag().into()]);
    for s in &suites {
        r.push("suite", summary_vals(s));
    }
    let ok = suites.iter().all(Summary::passed);
    r.push("result", vec![if ok { "pass" } else { "fail" }.into()]);
    Ok((r, ok))
}

fn solve(args: &SolveArgs, json: bool, exec: Exec) -> Outcome {
    let (tri, spec) = load_mesh(&args.mesh)?;
    let target = mesh::parse_vertex_values(&read(&args.target)?, "K", &tri)?;
    let initial = match &args.initial {
        Some(p) => Initial::UserSupplied(mesh::parse_vertex_values(&read(p)?, "f", &tri)?),
        None => Initial::FamilyDefault,
    };
    let opts = SolveOptions {
        tol_k: args.tol,
        max_iter: args.max_iter,
        initial,
        exec,
        ..SolveOptions::default()
    };
    let unproven = !spec.existence_proven(&tri);
    let mut rep = Report::new("solve");
    let (f, ok) = match solve_prescribed_curvature(&spec, &tri, &target, &opts) {
        Ok((f, s)) => {
            rep.push("converged", vec![s.converged.into()]);
            rep.push("iterations", vec![s.iterations.into()]);
            rep.push("residual", vec![s.residual.into()]);
            rep.push(
                "trajectory",
                s.trajectory.iter().map(|x| (*x).into()).collect(),
            );
            rep.push("boundary_hits", vec![s.boundary_hits.into()]);
            rep.push("residual_rejections", vec![s.residual_rejections.into()]);
            rep.push("lu_fallbacks", vec![s.lu_fallbacks.into()]);
            if let Some(c) = s.tail_constant {
                rep.push("tail_constant", vec![c.into()]);
            }
            (f, true)
        }
        Err(hexcurv::Error::NotConverged {
            iterations,
            residual,
            best_f,
        }) => {
            rep.push("converged", vec![false.into()]);
            rep.push("iterations", vec![iterations.into()]);
            rep.push("residual", vec![residual.into()]);
            (best_f, false)
        }
        Err(e) => return Err(e.into()),
    };
    rep.push("existence_proven", vec![(!unproven).into()]);
    if !ok && unproven {
        rep.push("note", vec![EXISTENCE_NOTE.into()]);
    }
    let mut out = Report::new("solve");
    for (v, x) in f.iter().enumerate() {
        out.push("f", vec![Val::Int(tri.vertex_ids[v] as i64), (*x).into()]);
    }
    match &args.report {
        Some(p) => write(p, &rep.render(json))?,
        None if !json => eprint!("{}", rep.render(false)),
        None => {}
    }
    if let Some(p) = &args.output {
        write(p, &out.render(false))?;
    }
    // With --json the document on standard output carries both the factors and the report.
    let mut doc = if args.output.is_some() && !json {
        Report::new("solve")
    } else {
        out
    };
    if json {
        doc.records.extend(rep.records);
    }
    Ok((doc, ok))
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HEXCURV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure(format!("HEXCURV_THREADS: `{raw}` is not a count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), Failure> {
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    configure_threads()?;
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match &cli.command {
        Command::Validate { mesh } => validate(mesh),
        Command::Curvature(a) => curvature(a, false, exec),
        Command::Jacobian(a) => curvature(a, true, exec),
        Command::Hexagon(a) => hexagon(a),
        Command::CheckIdentities(a) => check_identities(a, cli.seed, exec),
        Command::Solve(a) => solve(a, cli.json, exec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((report, ok)) => {
            print!("{}", report.render(cli.json));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
