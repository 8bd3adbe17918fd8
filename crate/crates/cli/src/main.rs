use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use foldlab::folding::FoldingContext;
use foldlab::formats::{self, FoldingDoc, GraphDoc, SectionDoc, SectionInput};
use foldlab::momentgraph::{
    build_graph, build_tau_graph, choose_theta, choose_theta_folded, MomentGraph, Side, DEFAULT_VERTEX_BOUND,
};
use foldlab::rootsys::{catalog_build, parse_theta, Family, FOLDED_FAMILIES};
use foldlab::structalg::{
    check_section, evaluate, iota_star, iota_star_expr, GradedStructure, Section, SectionReport,
    DEFAULT_UNKNOWN_BOUND,
};
use foldlab::verify::{run_suite, Suite, VerifyConfig, DEFAULT_CASES, DEFAULT_SEED};
use foldlab::{Alg, FoldError, Mode};

const MAP_SCHEMA: &str = "foldlab.map/1";
const CHECK_SCHEMA: &str = "foldlab.check/1";
const HILBERT_SCHEMA: &str = "foldlab.hilbert/1";
const VERIFY_SCHEMA: &str = "foldlab.verify/1";
const BENCH_SCHEMA: &str = "foldlab.bench/1";
const CATALOG_SCHEMA: &str = "foldlab.catalog/1";

#[derive(Parser)]
#[command(name = "foldlab", version, about = "Twisted quadratic foldings of root systems, moment graphs and structure algebras")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "FOLDLAB_THREADS")]
    threads: Option<usize>,
    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Source,
    Target,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum HilbertMode {
    Plain,
    Augmented,
    Reduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Theorem,
    Charm,
    Props,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in realizations.
    Catalog,
    /// Fold a root system and write the folded data.
    Fold {
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a moment graph.
    Graph {
        #[arg(long)]
        family: String,
        /// Θ: empty, `default`, a preset such as `d6`, or comma-separated root names.
        #[arg(long, default_value = "")]
        theta: String,
        #[arg(long, value_enum, default_value = "target")]
        side: SideArg,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_VERTEX_BOUND)]
        bound: usize,
    },
    /// Check the GKM conditions of a section on a graph.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        section: PathBuf,
        /// Require quotients with coefficients in the base ring.
        #[arg(long)]
        integral: bool,
    },
    /// Apply ι* to a source section and verify the image.
    Map {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "")]
        theta: String,
        #[arg(long)]
        section: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        integral: bool,
    },
    /// Graded dimensions of the structure algebra.
    Hilbert {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "")]
        theta: String,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        #[arg(long, value_enum, default_value = "augmented")]
        mode: HilbertMode,
        /// Defaults to the folded graph for folded families.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        #[arg(long, default_value_t = DEFAULT_UNKNOWN_BOUND)]
        bound: usize,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long)]
        family: String,
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        /// Test only this Θ instead of ∅ and the family default.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Time the main construction stages.
    Bench {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "")]
        theta: String,
    },
}

enum Failure {
    /// Exit 1: a verification did not pass; the report is on stdout.
    Verification,
    Error(FoldError),
}

impl From<FoldError> for Failure {
    fn from(e: FoldError) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(FoldError::Config(e.to_string()))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return report_error(&FoldError::Config("--threads must be at least 1".into()), cli.json_errors);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return report_error(&FoldError::Config(e.to_string()), cli.json_errors);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Error(e)) => report_error(&e, cli.json_errors),
    }
}

fn exit_code_of(e: &FoldError) -> u8 {
    match e {
        FoldError::Invariant(_) => 1,
        _ => 2,
    }
}

fn report_error(e: &FoldError, json: bool) -> ExitCode {
    let code = exit_code_of(e);
    if json {
        let kind = format!("{e:?}");
        let kind = kind.split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
        eprintln!("{}", json!({ "error": kind, "message": e.to_string(), "exit_code": code }));
    } else {
        eprintln!("foldlab: {e}");
    }
    ExitCode::from(code)
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Catalog => catalog(),
        Command::Fold { family, out } => fold(&family, out.as_deref()),
        Command::Graph { family, theta, side, format, out, bound } => {
            graph(&family, &theta, side, format, out.as_deref(), bound)
        }
        Command::Check { graph, section, integral } => check(&graph, &section, integral),
        Command::Map { family, theta, section, out, integral } => map(&family, &theta, &section, out.as_deref(), integral),
        Command::Hilbert { family, theta, max_degree, mode, side, bound } => {
            hilbert(&family, &theta, max_degree, mode, side, bound)
        }
        Command::Verify { family, suite, degree, seed, cases, theta } => {
            verify(&family, suite, degree, seed, cases, theta.as_deref())
        }
        Command::Bench { family, theta } => bench(&family, &theta),
    }
}

fn parse_family(s: &str) -> Result<Family, FoldError> {
    s.parse()
}

fn folded_context(family: Family) -> Result<FoldingContext, FoldError> {
    if !family.is_folded() {
        return Err(FoldError::Config(format!("family {family} carries no folding")));
    }
    FoldingContext::new(catalog_build(family)?)
}

fn read(path: &Path) -> Result<String, FoldError> {
    std::fs::read_to_string(path).map_err(|e| FoldError::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => {
            let mut f = File::create(p)?;
            f.write_all(text.as_bytes())?;
            f.write_all(b"\n")?;
        }
        None => {
            let mut w = io::stdout().lock();
            ignore_closed_pipe(writeln!(w, "{text}").and_then(|_| w.flush()))?;
        }
    }
    Ok(())
}

/// A reader that stops early (`| head`) is not an error.
fn ignore_closed_pipe(r: io::Result<()>) -> io::Result<()> {
    match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, doc: &T) -> Outcome {
    emit(out, &formats::to_string(doc)?)
}

#[derive(Serialize)]
struct CatalogEntry {
    family: String,
    description: String,
    source_rank: usize,
    source_roots: usize,
    folded_rank: Option<usize>,
    folded_roots: Option<usize>,
    w_tau_order: Option<u64>,
    default_theta: Vec<String>,
}

fn catalog() -> Outcome {
    let mut entries = Vec::new();
    for family in FOLDED_FAMILIES.into_iter().chain([Family::A(2)]) {
        let datum = catalog_build(family)?;
        let mut e = CatalogEntry {
            family: family.to_string(),
            description: family.describe(),
            source_rank: datum.rank(),
            source_roots: 2 * datum.system().num_positive(),
            folded_rank: None,
            folded_roots: None,
            w_tau_order: None,
            default_theta: family.default_theta().iter().map(|s| s.to_string()).collect(),
        };
        if family.is_folded() {
            let ctx = FoldingContext::new(datum)?;
            e.folded_rank = Some(ctx.target().rank());
            e.folded_roots = Some(ctx.phi_tau().len());
            e.w_tau_order = Some(ctx.w_tau_order());
        }
        entries.push(e);
    }
    emit_json(None, &json!({ "schema": CATALOG_SCHEMA, "families": entries }))
}

fn fold(family: &str, out: Option<&Path>) -> Outcome {
    let family = parse_family(family)?;
    let ctx = folded_context(family)?;
    emit_json(out, &FoldingDoc::new(&family.to_string(), &ctx))
}

/// The graph on the requested side together with its coefficient algebra.
fn build_side(family: Family, theta: &str, side: SideArg, bound: usize) -> Result<(MomentGraph, Alg), FoldError> {
    let datum = catalog_build(family)?;
    let alg = datum.space().alg();
    let theta = parse_theta(&datum, family, theta)?;
    if !family.is_folded() {
        if matches!(side, SideArg::Target) {
            return Err(FoldError::Config(format!("family {family} has no folded side")));
        }
        let cfg = choose_theta(&datum, &theta)?;
        return Ok((build_graph(&datum, &cfg, bound)?, alg));
    }
    let ctx = FoldingContext::new(datum)?;
    let cfg = choose_theta_folded(&ctx, &theta)?;
    let g = match side {
        SideArg::Source => build_graph(ctx.datum(), &cfg, bound)?,
        SideArg::Target => build_tau_graph(&ctx, &cfg, None, bound)?.graph,
    };
    Ok((g, alg))
}

fn graph(family: &str, theta: &str, side: SideArg, format: GraphFormat, out: Option<&Path>, bound: usize) -> Outcome {
    let family = parse_family(family)?;
    let (g, alg) = build_side(family, theta, side, bound)?;
    match format {
        GraphFormat::Json => emit_json(out, &GraphDoc::new(&g, alg)),
        GraphFormat::Dot => {
            let sink: Box<dyn Write> = match out {
                Some(p) => Box::new(File::create(p)?),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = BufWriter::new(sink);
            ignore_closed_pipe(formats::write_dot(&g, &mut w).and_then(|_| w.flush()))?;
            Ok(())
        }
    }
}

fn section_on(g: &MomentGraph, input: SectionInput) -> Result<Section, FoldError> {
    match input {
        SectionInput::Values(s) => Ok(s),
        SectionInput::Expr(e) => evaluate(g, &e),
    }
}

fn mode_of(integral: bool) -> Mode {
    if integral {
        Mode::Integral
    } else {
        Mode::Field
    }
}

fn check(graph: &Path, section: &Path, integral: bool) -> Outcome {
    let doc: GraphDoc = formats::parse(&read(graph)?)?;
    let (g, alg) = doc.to_graph(DEFAULT_VERTEX_BOUND)?;
    let s = section_on(&g, formats::parse_section_input(&read(section)?)?)?;
    let report = check_section(&g, &s, mode_of(integral), Some(alg))?;
    let valid = report.is_valid();
    emit_json(None, &json!({ "schema": CHECK_SCHEMA, "valid": valid, "report": report }))?;
    if valid {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct MapDoc {
    schema: &'static str,
    family: String,
    theta: Vec<String>,
    valid: bool,
    error: Option<String>,
    report: Option<SectionReport>,
    image: Option<SectionDoc>,
}

fn map(family: &str, theta: &str, section: &Path, out: Option<&Path>, integral: bool) -> Outcome {
    let family = parse_family(family)?;
    let ctx = folded_context(family)?;
    let alg = ctx.datum().space().alg();
    let theta = parse_theta(ctx.datum(), family, theta)?;
    let cfg = choose_theta_folded(&ctx, &theta)?;
    let mode = mode_of(integral);
    let input = formats::parse_section_input(&read(section)?)?;
    let result = match input {
        SectionInput::Expr(e) => {
            let tau = build_tau_graph(&ctx, &cfg, None, DEFAULT_VERTEX_BOUND)?;
            iota_star_expr(&ctx, &tau, &e, mode).map(|img| (tau, img))
        }
        SectionInput::Values(z) => {
            let src = build_graph(ctx.datum(), &cfg, DEFAULT_VERTEX_BOUND)?;
            let tau = build_tau_graph(&ctx, &cfg, Some(&src), DEFAULT_VERTEX_BOUND)?;
            iota_star(&ctx, &tau, &src, &z, mode, true).map(|img| (tau, img))
        }
    };
    let mut doc = MapDoc {
        schema: MAP_SCHEMA,
        family: family.to_string(),
        theta: theta.iter().map(|&i| ctx.datum().names()[i].clone()).collect(),
        valid: false,
        error: None,
        report: None,
        image: None,
    };
    match result {
        Ok((tau, img)) => {
            doc.report = Some(check_section(&tau.graph, &img, mode, Some(alg))?);
            doc.valid = true;
            doc.image = Some(SectionDoc::new(&img, ctx.target().names(), alg));
            emit_json(out, &doc)
        }
        Err(e @ (FoldError::Validation(_) | FoldError::Invariant(_))) => {
            doc.error = Some(e.to_string());
            emit_json(out, &doc)?;
            Err(Failure::Verification)
        }
        Err(e) => Err(e.into()),
    }
}

fn hilbert(family: &str, theta: &str, max_degree: u32, mode: HilbertMode, side: Option<SideArg>, bound: usize) -> Outcome {
    let family = parse_family(family)?;
    let side = side.unwrap_or(if family.is_folded() { SideArg::Target } else { SideArg::Source });
    let (g, _) = build_side(family, theta, side, DEFAULT_VERTEX_BOUND)?;
    let mut gs = GradedStructure::new(&g, bound);
    let reports = (0..=max_degree).map(|d| gs.report(d)).collect::<Result<Vec<_>, _>>()?;
    let dims: Vec<usize> = reports
        .iter()
        .map(|r| match mode {
            HilbertMode::Plain => r.dim_plain,
            HilbertMode::Augmented => r.dim_augmented,
            HilbertMode::Reduced => r.dim_reduced,
        })
        .collect();
    let side_name = match side {
        SideArg::Source => Side::Source,
        SideArg::Target => Side::Target,
    };
    emit_json(
        None,
        &json!({
            "schema": HILBERT_SCHEMA,
            "family": family.to_string(),
            "side": side_name,
            "vertices": g.num_vertices(),
            "mode": match mode { HilbertMode::Plain => "plain", HilbertMode::Augmented => "augmented", HilbertMode::Reduced => "reduced" },
            "dims": dims,
            "reports": reports,
        }),
    )
}

fn verify(family: &str, suite: SuiteArg, degree: u32, seed: u64, cases: usize, theta: Option<&str>) -> Outcome {
    let family = parse_family(family)?;
    let suite = match suite {
        SuiteArg::Theorem => Suite::Theorem,
        SuiteArg::Charm => Suite::Charm,
        SuiteArg::Props => Suite::Props,
    };
    let thetas = match theta {
        Some(spec) => {
            let datum = catalog_build(family)?;
            Some(vec![parse_theta(&datum, family, spec)?])
        }
        None => None,
    };
    let cfg = VerifyConfig { degree, seed, cases, thetas, ..VerifyConfig::default() };
    let report = run_suite(family, suite, &cfg)?;
    let passed = report.passed();
    emit_json(None, &json!({ "schema": VERIFY_SCHEMA, "passed": passed, "report": report }))?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn bench(family: &str, theta: &str) -> Outcome {
    let family = parse_family(family)?;
    let mut stages = Vec::new();
    let mut time = |name: &str, t: Instant, size: usize| {
        stages.push(json!({ "stage": name, "seconds": t.elapsed().as_secs_f64(), "size": size }));
    };
    let t = Instant::now();
    let ctx = folded_context(family)?;
    time("fold", t, ctx.phi_tau().len());
    let theta = parse_theta(ctx.datum(), family, theta)?;
    let cfg = choose_theta_folded(&ctx, &theta)?;
    let t = Instant::now();
    let src = match build_graph(ctx.datum(), &cfg, DEFAULT_VERTEX_BOUND) {
        Ok(g) => Some(g),
        Err(FoldError::Resource(_)) => None,
        Err(e) => return Err(e.into()),
    };
    time("source_graph", t, src.as_ref().map_or(0, |g| g.edges().len()));
    let t = Instant::now();
    let tau = build_tau_graph(&ctx, &cfg, src.as_ref(), DEFAULT_VERTEX_BOUND)?;
    time("folded_graph", t, tau.graph.edges().len());
    let inv = foldlab::structalg::invariants_gen(ctx.source(), &theta, 1, Mode::Field, None)?;
    if let Some(t1) = inv.first() {
        let t = Instant::now();
        let e = foldlab::structalg::SectionExpr::Char(t1.clone());
        iota_star_expr(&ctx, &tau, &e, Mode::Field)?;
        time("iota_star_degree1", t, tau.graph.num_vertices());
    }
    emit_json(None, &json!({ "schema": BENCH_SCHEMA, "family": family.to_string(), "stages": stages }))
}
