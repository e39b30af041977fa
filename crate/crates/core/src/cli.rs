//! The `reciprocal` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::liealg::lrt;
use crate::liealg::{
    automorphism_constraints, verify_automorphism_solution, Generator, GeneratorFile, LieAlgebra,
};
use crate::numerics::{
    convergence_ratio, fd_residuals, loop_closedness, make_solution, transform_solution_with, unit_square, Family,
    Grid, GridSolution, TransformConfig,
};
use crate::prolong::{determining_residuals, solve_ansatz, AnsatzOptions};
use crate::report::{verdict, SCHEMA};
use crate::suite::{run_all, run_criterion, SuiteConfig};
use crate::symkernel::{parse, Expr};
use crate::transforms::verify::verify_reciprocal_seeded;
use crate::transforms::{
    automorphism_matrix, catalog, catalog_names, composition_check, decompose, lie_equation_check, pushforward,
    verify_point_symmetry, CatalogEntry, MapFile, OneParamFamily, PointMap, ReciprocalMap, SampleConfig,
};

#[derive(Parser, Debug)]
#[command(name = "reciprocal", version, about = "Reciprocal transformations of 2D stationary gas dynamics")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = crate::transforms::verify::DEFAULT_SEED)]
    seed: u64,
    /// Numeric tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Tolerance of loop integrals.
    #[arg(long, global = true, default_value_t = 1e-8)]
    loop_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Commutator table of a named algebra.
    Commutators {
        #[arg(long, value_enum, default_value_t = AlgebraName::Lrt)]
        algebra: AlgebraName,
    },
    /// Determining equations of a generator.
    VerifyGenerator(GenSel),
    /// Invariance and closedness checks of a reciprocal map.
    VerifyMap(MapSel),
    /// Symmetry check of a point map from the catalog.
    VerifyPoint {
        #[arg(long)]
        catalog: String,
        #[arg(long = "param", value_name = "NAME=EXPR")]
        params: Vec<String>,
    },
    /// Polynomial ansatz for the generators.
    SolveAnsatz {
        #[arg(long, default_value_t = 4)]
        degree: u32,
        /// Force the pressure component to zero.
        #[arg(long)]
        no_pressure: bool,
    },
    /// Image of a generator under a map, decomposed in the named basis.
    Pushforward {
        #[command(flatten)]
        map: MapSel,
        #[command(flatten)]
        generator: GenSel,
    },
    /// Action of a map on the second derived algebra.
    Automorphism(MapSel),
    /// Lie equations (and optionally the group law) of a one-parameter family.
    LieCheck {
        #[arg(long)]
        family: String,
        #[arg(long = "param", value_name = "NAME=EXPR")]
        params: Vec<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        composition: bool,
    },
    /// Maps a sampled exact solution and checks the residuals at h and h/2.
    Transform {
        #[command(flatten)]
        solution: SolutionSel,
        #[command(flatten)]
        map: MapSel,
        /// Quadrature samples per grid interval.
        #[arg(long, default_value_t = 1)]
        sub: usize,
    },
    /// Loop integral of the primed differentials.
    Closedness {
        #[command(flatten)]
        solution: SolutionSel,
        #[command(flatten)]
        map: MapSel,
        /// Lower-left corner of a unit square loop, `x,y`.
        #[arg(long, value_name = "X,Y", conflicts_with = "polyline")]
        square: Option<String>,
        /// Loop vertices, `x,y;x,y;...`.
        #[arg(long)]
        polyline: Option<String>,
    },
    /// Every reference check, with a summary table.
    PaperSuite {
        /// Run one criterion only.
        #[arg(long)]
        criterion: Option<u32>,
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AlgebraName {
    Lrt,
    SecondDerived,
}

#[derive(Args, Debug, Clone)]
struct GenSel {
    /// X1 .. X5, Y, X_h, X_F.
    #[arg(long = "generator", value_name = "NAME", required_unless_present = "generator_file")]
    generator: Option<String>,
    #[arg(long, value_name = "PATH", conflicts_with = "generator")]
    generator_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct MapSel {
    #[arg(long, required_unless_present = "file")]
    catalog: Option<String>,
    #[arg(long, conflicts_with = "catalog")]
    file: Option<PathBuf>,
    #[arg(long = "param", value_name = "NAME=EXPR")]
    params: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    b1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b4: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct SolutionSel {
    /// constant, shear or vortex.
    #[arg(long, default_value = "shear")]
    solution: String,
    #[arg(long = "sol-param", value_name = "NAME=EXPR")]
    sol_params: Vec<String>,
    /// Domain `x0,x1,y0,y1`.
    #[arg(long, allow_hyphen_values = true)]
    rect: Option<String>,
    /// Nodes per direction.
    #[arg(long, default_value_t = 17)]
    n: usize,
}

struct Outcome {
    pass: bool,
    text: String,
    body: Value,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    command: &'a str,
    seed: u64,
    verdict: &'a str,
    report: &'a Value,
}

/// Runs the command line and returns the exit code: 0 on PASS, 1 on FAIL, 2 on usage or input errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let name = command_name(&cli.command);
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let rendered = match cli.run.format {
        Format::Text => format!("{}verdict: {}\n", outcome.text, verdict(outcome.pass)),
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA,
                command: name,
                seed: cli.run.seed,
                verdict: verdict(outcome.pass),
                report: &outcome.body,
            };
            serde_json::to_string_pretty(&env).expect("report serializes") + "\n"
        }
    };
    match &cli.run.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, rendered) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return 2;
            }
        }
        None => print!("{rendered}"),
    }
    if outcome.pass {
        0
    } else {
        1
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Commutators { .. } => "commutators",
        Command::VerifyGenerator(_) => "verify-generator",
        Command::VerifyMap(_) => "verify-map",
        Command::VerifyPoint { .. } => "verify-point",
        Command::SolveAnsatz { .. } => "solve-ansatz",
        Command::Pushforward { .. } => "pushforward",
        Command::Automorphism(_) => "automorphism",
        Command::LieCheck { .. } => "lie-check",
        Command::Transform { .. } => "transform",
        Command::Closedness { .. } => "closedness",
        Command::PaperSuite { .. } => "paper-suite",
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let rc = &cli.run;
    if !(rc.tol > 0.0 && rc.loop_tol > 0.0) {
        return Err(Error::Input("tolerances must be positive".into()));
    }
    match &cli.command {
        Command::Commutators { algebra } => commutators(*algebra),
        Command::VerifyGenerator(g) => verify_generator(&generator(g)?),
        Command::VerifyMap(m) => verify_map(&map(m)?, rc.seed),
        Command::VerifyPoint { catalog: name, params } => verify_point(name, &parse_params(params)?),
        Command::SolveAnsatz { degree, no_pressure } => ansatz(*degree, *no_pressure),
        Command::Pushforward { map: m, generator: g } => push(&map(m)?, &generator(g)?),
        Command::Automorphism(m) => automorphism(&map(m)?),
        Command::LieCheck { family, params, samples, composition } => {
            lie(rc, family, &parse_params(params)?, *samples, *composition)
        }
        Command::Transform { solution, map: m, sub } => transform(solution, &map(m)?, *sub, rc.tol),
        Command::Closedness { solution, map: m, square, polyline } => {
            closedness(solution, &map(m)?, square.as_deref(), polyline.as_deref(), rc.loop_tol)
        }
        Command::PaperSuite { criterion, degree } => suite(rc, *criterion, *degree),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, Expr>> {
    let mut out = BTreeMap::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("parameter `{p}` is not NAME=EXPR")))?;
        out.insert(k.trim().to_string(), parse(v)?);
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn from_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn map(sel: &MapSel) -> Result<ReciprocalMap> {
    if let Some(path) = &sel.file {
        return from_json::<MapFile>(path)?.to_map();
    }
    let name = sel.catalog.as_deref().expect("clap requires one of the two");
    let mut params = parse_params(&sel.params)?;
    for (k, v) in [("b1", &sel.b1), ("b2", &sel.b2), ("b3", &sel.b3), ("b4", &sel.b4)] {
        if let Some(v) = v {
            params.insert(k.to_string(), parse(v)?);
        }
    }
    match catalog(name, &params)? {
        CatalogEntry::Reciprocal(m) => Ok(m),
        CatalogEntry::Family(f) => Ok(f.map),
        CatalogEntry::Point(_) => Err(Error::Input(format!("`{name}` is a point map; use verify-point"))),
    }
}

fn generator(sel: &GenSel) -> Result<Generator> {
    if let Some(path) = &sel.generator_file {
        return from_json::<GeneratorFile>(path)?.to_generator();
    }
    let name = sel.generator.as_deref().expect("clap requires one of the two");
    Ok(match name {
        "X1" => lrt::x1(),
        "X2" => lrt::x2(),
        "X3" => lrt::x3(),
        "X4" => lrt::x4(),
        "X5" => lrt::x5(),
        "Y" => lrt::y(),
        "X_h" => lrt::x_h(),
        "X_F" => lrt::x_f(),
        _ => return Err(Error::Input(format!("unknown generator `{name}`; expected X1..X5, Y, X_h or X_F"))),
    })
}

fn commutators(which: AlgebraName) -> Result<Outcome> {
    let l: LieAlgebra = match which {
        AlgebraName::Lrt => lrt::lrt(),
        AlgebraName::SecondDerived => lrt::lrt_second_derived(),
    };
    let t = l.table_report();
    let mut text = format!("{t}\n");
    let mut body = json!({ "table": to_value(&t) });
    if which == AlgebraName::Lrt {
        let sb = l.functional_self_brackets()?;
        let rendered: Vec<Value> = sb
            .iter()
            .map(|(i, c)| json!({ "element": l.basis[*i].label, "two_functions": l.render_combination(c) }))
            .collect();
        for (i, c) in &sb {
            writeln!(text, "[{0}(f), {0}(g)] = {1}", l.basis[*i].label, l.render_combination(c)).unwrap();
        }
        body["functional_self_brackets"] = Value::Array(rendered);
    }
    Ok(Outcome { pass: true, text, body })
}

fn verify_generator(g: &Generator) -> Result<Outcome> {
    let ds = determining_residuals(g)?;
    let text = format!("generator {g}\n{}\n", ds.to_string().lines().filter(|l| !l.starts_with("verdict")).collect::<Vec<_>>().join("\n"));
    Ok(Outcome {
        pass: ds.is_satisfied(),
        text,
        body: json!({ "generator": to_value(&g.to_file()), "residuals": to_value(&ds.residuals) }),
    })
}

fn verify_map(m: &ReciprocalMap, seed: u64) -> Result<Outcome> {
    let r = verify_reciprocal_seeded(m, seed);
    let mut text = format!("map {}\n", r.name);
    for res in r.transformed.iter().chain(&r.closedness) {
        let v = if res.reduced.is_zero() { "ok" } else { "nonzero" };
        writeln!(text, "{:<12} {:<8} {}", res.source, v, res.reduced).unwrap();
    }
    for s in &r.side {
        writeln!(text, "side {:<12} {} {}", s.name, if s.holds { "ok" } else { "VIOLATED" }, s.expr).unwrap();
    }
    if let Some(w) = &r.witness {
        let pt: Vec<String> = w.point.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(text, "witness {} = {} at {}", w.source, w.value, pt.join(", ")).unwrap();
    }
    Ok(Outcome { pass: r.pass, text, body: to_value(&r) })
}

fn verify_point(name: &str, params: &BTreeMap<String, Expr>) -> Result<Outcome> {
    let m: PointMap = match catalog(name, params)? {
        CatalogEntry::Point(m) => m,
        _ => return Err(Error::Input(format!("`{name}` is not a point map; use verify-map"))),
    };
    let r = verify_point_symmetry(&m);
    let mut text = format!("point map {}\njacobian {}\n", r.name, r.jacobian);
    for res in &r.residuals {
        writeln!(text, "{:<12} {}", res.source, res.reduced).unwrap();
    }
    Ok(Outcome { pass: r.pass, text, body: to_value(&r) })
}

fn ansatz(degree: u32, no_pressure: bool) -> Result<Outcome> {
    let mut opts = AnsatzOptions::degree(degree);
    opts.no_pressure = no_pressure;
    let s = solve_ansatz(&opts)?;
    let bad = s.basis.iter().filter(|g| !determining_residuals(g).is_ok_and(|d| d.is_satisfied())).count();
    let named = [
        ("X1", lrt::x1()),
        ("X2", lrt::x2()),
        ("X3", lrt::x3()),
        ("X4", lrt::x4()),
        ("X5", lrt::x5()),
        ("X_h=1", lrt::x_h_with(&Expr::one())),
        ("X_F=1", lrt::x_f_with(&Expr::one())),
    ];
    let contained: Vec<&str> = named.iter().filter(|(_, g)| s.contains(g)).map(|(n, _)| *n).collect();
    let mut text = format!(
        "degree {degree}: {} unknowns, {} equations, rank {}, dimension {}\n",
        s.columns.len(),
        s.equations,
        s.rank,
        s.dim()
    );
    for (i, g) in s.basis.iter().enumerate() {
        writeln!(text, "  Z{} = {g}", i + 1).unwrap();
    }
    writeln!(text, "contains {}", contained.join(", ")).unwrap();
    let basis: Vec<Value> = s.basis.iter().map(|g| to_value(&g.to_file())).collect();
    Ok(Outcome {
        pass: bad == 0,
        text,
        body: json!({
            "degree": degree,
            "no_pressure": no_pressure,
            "unknowns": s.columns.len(),
            "equations": s.equations,
            "rank": s.rank,
            "dimension": s.dim(),
            "basis": basis,
            "contains": contained,
            "failing_basis_elements": bad,
        }),
    })
}

fn named_basis() -> Vec<(&'static str, Generator)> {
    vec![("X1", lrt::x1()), ("X2", lrt::x2()), ("X3", lrt::x3()), ("X4", lrt::x4()), ("X5", lrt::x5())]
}

fn push(m: &ReciprocalMap, g: &Generator) -> Result<Outcome> {
    let img = pushforward(m, g)?;
    let basis = named_basis();
    let gens: Vec<Generator> = basis.iter().map(|(_, g)| g.clone()).collect();
    let mut text = format!("map {}\nimage {img}\n", m.name);
    let mut body = json!({ "map": m.name, "image": to_value(&img.to_file()) });
    match decompose(&img, &gens) {
        Ok(c) => {
            let terms: Vec<String> = c
                .iter()
                .zip(&basis)
                .filter(|(k, _)| !k.is_zero())
                .map(|(k, (n, _))| format!("({k}) {n}"))
                .collect();
            let combo = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            writeln!(text, "in the basis X1..X5: {combo}").unwrap();
            body["coefficients"] = json!(c.iter().map(|k| k.to_string()).collect::<Vec<_>>());
        }
        Err(Error::NotInSpan(r)) => {
            writeln!(text, "not in the span of X1..X5").unwrap();
            body["not_in_span"] = json!(r);
        }
        Err(e) => return Err(e),
    }
    Ok(Outcome { pass: true, text, body })
}

fn automorphism(m: &ReciprocalMap) -> Result<Outcome> {
    let labels = ["3", "4", "5"];
    let a = automorphism_matrix(m, &labels, &[lrt::x3(), lrt::x4(), lrt::x5()])?;
    let c = lrt::lrt_second_derived().constant_table().expect("constant table");
    let r = verify_automorphism_solution(&a, &automorphism_constraints(&c, &labels))?;
    let rows: Vec<Vec<String>> = a.a.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
    let mut text = format!("map {}\n", m.name);
    for (l, row) in labels.iter().zip(&rows) {
        writeln!(text, "  a{l}* = [{}]", row.join(", ")).unwrap();
    }
    writeln!(text, "det {}", r.det).unwrap();
    for res in r.residuals.iter().filter(|x| *x != "0") {
        writeln!(text, "violated: {res}").unwrap();
    }
    Ok(Outcome {
        pass: r.satisfied,
        text,
        body: json!({ "map": m.name, "matrix": rows, "det": r.det, "residuals": r.residuals }),
    })
}

fn family(name: &str, params: &BTreeMap<String, Expr>) -> Result<OneParamFamily> {
    match catalog(name, params)? {
        CatalogEntry::Family(f) => Ok(f),
        _ => {
            let fams: Vec<&str> = catalog_names().iter().filter(|(_, k)| *k == "family").map(|(n, _)| *n).collect();
            Err(Error::Input(format!("`{name}` is not a family; expected one of {}", fams.join(", "))))
        }
    }
}

fn lie(rc: &RunConfig, name: &str, params: &BTreeMap<String, Expr>, samples: usize, composition: bool) -> Result<Outcome> {
    let fam = family(name, params)?;
    let cfg = SampleConfig { samples, seed: rc.seed, ..Default::default() };
    let r = lie_equation_check(&fam, &cfg)?;
    let mut pass = r.identity_at_zero && r.max_residual < rc.tol;
    let mut text = format!(
        "family {}: max residual {:.3e} over {} points ({} rejected), two-point {:.3e}, identity at 0: {}\n",
        r.family, r.max_residual, r.accepted, r.rejected, r.second_order_residual, r.identity_at_zero
    );
    let mut body = json!({ "lie": to_value(&r) });
    if composition {
        let c = composition_check(&fam, &cfg)?;
        pass &= c.max_difference < rc.tol;
        writeln!(text, "composition: max difference {:.3e} over {} points", c.max_difference, c.accepted).unwrap();
        body["composition"] = to_value(&c);
    }
    Ok(Outcome { pass, text, body })
}

fn floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Input(format!("{what} `{s}`: {e}")))?;
    if v.len() != n {
        return Err(Error::Input(format!("{what} `{s}` needs {n} numbers")));
    }
    Ok(v)
}

fn solution(sel: &SolutionSel, n: usize) -> Result<GridSolution> {
    let fam = Family::parse(&sel.solution)?;
    let rect = match &sel.rect {
        Some(r) => floats(r, 4, "rectangle")?,
        None if fam == Family::Vortex => vec![1.0, 2.0, 0.0, 1.0],
        None => vec![0.0, 1.0, 0.0, 1.0],
    };
    let g = Grid::rect(rect[0], rect[1], rect[2], rect[3], n, n)?;
    make_solution(fam, &parse_params(&sel.sol_params)?, g)
}

fn transform(sel: &SolutionSel, m: &ReciprocalMap, sub: usize, tol: f64) -> Result<Outcome> {
    let cfg = TransformConfig { sub: sub.max(1), ..Default::default() };
    let first = transform_solution_with(&solution(sel, sel.n)?, m, &cfg)?;
    // both resolutions on one primed window inside the first image
    let pg = first.grid;
    let (wx, wy) = (0.02 * (pg.x1() - pg.x0), 0.02 * (pg.y1() - pg.y0));
    let cfg = TransformConfig { window: Some([pg.x0 + wx, pg.x1() - wx, pg.y0 + wy, pg.y1() - wy]), ..cfg };
    let coarse_sol = transform_solution_with(&solution(sel, sel.n)?, m, &cfg)?;
    let coarse = fd_residuals(&coarse_sol)?;
    let fine = fd_residuals(&transform_solution_with(&solution(sel, 2 * sel.n - 1)?, m, &cfg)?)?;
    let ratio = convergence_ratio(&coarse, &fine);
    // an equation passes if it is resolved exactly or converges at second order
    let ok: Vec<bool> = (0..4).map(|k| fine[k] < tol || (3.5..=4.5).contains(&ratio[k])).collect();
    let g = coarse_sol.grid;
    let mut text = format!(
        "{}\nprimed grid [{}, {}] x [{}, {}], {} x {} nodes\n",
        coarse_sol.provenance,
        g.x0,
        g.x1(),
        g.y0,
        g.y1(),
        g.nx,
        g.ny
    );
    for k in 0..4 {
        writeln!(
            text,
            "F{}  h {:.3e}  h/2 {:.3e}  ratio {:.3}  {}",
            k + 1,
            coarse[k],
            fine[k],
            ratio[k],
            if ok[k] { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    let nan_free = |v: &[f64; 4]| v.iter().map(|x| if x.is_nan() { Value::Null } else { json!(x) }).collect::<Vec<_>>();
    Ok(Outcome {
        pass: ok.iter().all(|b| *b),
        text,
        body: json!({
            "provenance": coarse_sol.provenance,
            "grid": to_value(&g),
            "residuals_h": coarse,
            "residuals_h2": fine,
            "ratios": nan_free(&ratio),
        }),
    })
}

fn closedness(
    sel: &SolutionSel,
    m: &ReciprocalMap,
    square: Option<&str>,
    polyline: Option<&str>,
    tol: f64,
) -> Result<Outcome> {
    let sol = solution(sel, sel.n)?;
    let pts: Vec<(f64, f64)> = match (square, polyline) {
        (_, Some(p)) => p
            .split(';')
            .map(|v| floats(v, 2, "vertex").map(|v| (v[0], v[1])))
            .collect::<Result<_>>()?,
        (Some(s), None) => {
            let c = floats(s, 2, "corner")?;
            unit_square(c[0], c[1])
        }
        (None, None) => unit_square(sol.grid.x0, sol.grid.y0),
    };
    let v = loop_closedness(&sol, m, &pts)?;
    let text = format!("{} under {}\nloop of {} vertices: |oint dx'| + |oint dy'| = {v:.3e}\n", sol.provenance, m.name, pts.len());
    Ok(Outcome {
        pass: v < tol,
        text,
        body: json!({ "solution": sol.provenance, "map": m.name, "loop": pts, "value": v, "tolerance": tol }),
    })
}

fn suite(rc: &RunConfig, criterion: Option<u32>, degree: u32) -> Result<Outcome> {
    let cfg = SuiteConfig { seed: rc.seed, tol: rc.tol, loop_tol: rc.loop_tol, degree };
    let results = match criterion {
        Some(id) => vec![run_criterion(id, &cfg).ok_or_else(|| Error::Input(format!("no criterion {id}")))?],
        None => run_all(&cfg),
    };
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.to_string());
        eprintln!("criterion {:>2}: {:.2}s of {}s", r.id, r.elapsed.as_secs_f64(), r.limit_secs);
    }
    text.push_str("\n id  verdict  title\n");
    for r in &results {
        writeln!(text, " {:>2}  {:<7}  {}", r.id, verdict(r.pass), r.title).unwrap();
    }
    Ok(Outcome { pass: results.iter().all(|r| r.pass), text, body: json!({ "criteria": to_value(&results) }) })
}
