use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szkit::extremal::{compare, thm12_check};
use szkit::io::{self, fmt_g15, ResultRow};
use szkit::{
    construct_l, siciak_m, smith_normal_form, verify_map, ConvexBody, DensityWitness, Error, IntMatrix, LatticeMap,
    OracleKind, SiciakOptions, WeightSpec, WeightedSampleSet,
};

/// Weighted Siciak extremal functions for polynomials with exponents in dilates
/// of a convex body.
#[derive(Parser)]
#[command(name = "szkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a convex body.
    #[command(subcommand)]
    Body(BodyCmd),
    /// Integer lattice algebra.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// The monomial map F_L of a body's lattice map (or of an explicit L).
    #[command(subcommand)]
    Map(MapCmd),
    /// Fiber checks of the monomial map.
    #[command(subcommand)]
    Fibers(FibersCmd),
    /// Extremal function evaluation.
    #[command(subcommand)]
    Siciak(SiciakCmd),
    /// Certified values against a closed-form extremal function.
    Compare(CompareArgs),
    /// Direct values against values pulled back through the lattice map.
    Thm12(Thm12Args),
}

#[derive(Subcommand)]
enum BodyCmd {
    /// Print dimensions, vertices and the rational density verdict.
    Show {
        /// Body file (JSON).
        #[arg(long)]
        spec: PathBuf,
    },
    /// Print the support function at a real vector.
    Support {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated real coordinates.
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Construct L for a body and print its certificate.
    Map {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Smith normal form U·A·V = D of an integer matrix.
    Snf {
        /// Matrix file (JSON list of rows).
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Args)]
struct MapSource {
    /// Body file; L is constructed from it.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    spec: Option<PathBuf>,
    /// Explicit n×ℓ matrix L (JSON list of rows).
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MapCmd {
    /// F_L(z).
    Apply {
        #[command(flatten)]
        source: MapSource,
        /// Point in C^{*n}, e.g. `2,3+0.5i`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// A point z with F_L(z) = w.
    Preimage {
        #[command(flatten)]
        source: MapSource,
        /// Point in C^{*ℓ}.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
}

#[derive(Subcommand)]
enum FibersCmd {
    /// Largest relative change of F_L along random points of the fiber through z.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Number of fiber points.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct LpFlags {
    /// Facets of the polygonal modulus constraint (even, at least 8).
    #[arg(long, default_value_t = 64)]
    facets: usize,
}

impl LpFlags {
    fn options(&self) -> Result<SiciakOptions, Error> {
        if self.facets < 8 || self.facets % 2 != 0 {
            return Err(Error::Shape(format!("--facets must be even and at least 8, got {}", self.facets)));
        }
        Ok(SiciakOptions { facets: self.facets, ..SiciakOptions::default() })
    }
}

#[derive(Subcommand)]
enum SiciakCmd {
    /// log Φ at degree m for each query point.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        /// Sample-set file (JSON).
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        lp: LpFlags,
        /// Query points file (JSON list of points).
        #[arg(long, required_unless_present = "z", conflicts_with = "z")]
        points: Option<PathBuf>,
        /// A single query point instead of a file.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// CSV output; printed to standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    oracle: OracleKind,
    /// Sample-set file; defaults to the unit torus (32 per axis) or the unit
    /// circle (256 points) with weight 0.
    #[arg(long)]
    set: Option<PathBuf>,
    /// Ascending degrees, e.g. `2,4,8`.
    #[arg(long, value_delimiter = ',', required = true)]
    m_list: Vec<u32>,
    /// Query points file (JSON list of points).
    #[arg(long)]
    grid: PathBuf,
    #[command(flatten)]
    lp: LpFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Thm12Args {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    set: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    m_list: Vec<u32>,
    #[arg(long)]
    grid: PathBuf,
    #[command(flatten)]
    lp: LpFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

type Outcome = Result<String, Error>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.kind().to_string();
            let detail = e.render().to_string();
            let detail = detail.lines().next().unwrap_or(&msg).trim_start_matches("error: ");
            report("usage", detail);
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            if !summary.is_empty() {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            report(e.kind(), &e.to_string());
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn report(kind: &str, message: &str) {
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message }));
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Body(BodyCmd::Show { spec }) => body_show(&io::read_body(&spec)?),
        Command::Body(BodyCmd::Support { spec, xi }) => {
            let body = io::read_body(&spec)?;
            let xi = parse_reals(&xi)?;
            if xi.len() != body.dim_ambient() {
                return Err(Error::DimensionMismatch { expected: body.dim_ambient(), got: xi.len() });
            }
            Ok(fmt_g15(body.support_value(&xi) + 0.0))
        }
        Command::Lattice(LatticeCmd::Map { spec }) => lattice_map(&io::read_body(&spec)?),
        Command::Lattice(LatticeCmd::Snf { matrix }) => {
            let a = io::read_int_matrix(&matrix)?;
            let r = smith_normal_form(&a);
            Ok(format!("U =\n{}\nD =\n{}\nV =\n{}", show_matrix(&r.u), show_matrix(&r.d), show_matrix(&r.v)))
        }
        Command::Map(MapCmd::Apply { source, z }) => {
            let map = load_map(&source)?;
            Ok(show_point(&map.apply(&io::parse_point(&z)?)?))
        }
        Command::Map(MapCmd::Preimage { source, w }) => {
            let map = load_map(&source)?;
            Ok(show_point(&map.solve_preimage(&io::parse_point(&w)?)?))
        }
        Command::Fibers(FibersCmd::Check { spec, z, samples, seed }) => {
            fibers_check(&io::read_body(&spec)?, &io::parse_point(&z)?, samples, seed)
        }
        Command::Siciak(SiciakCmd::Eval { spec, set, m, lp, points, z, out }) => {
            let body = Arc::new(io::read_body(&spec)?);
            let samples = io::read_sample_set(&set)?;
            let points = match (points, z) {
                (Some(p), _) => io::read_points(&p)?,
                (None, Some(z)) => vec![io::parse_point(&z)?],
                (None, None) => unreachable!("clap requires one of --points, --z"),
            };
            siciak_eval(&body, &samples, m, &points, &lp.options()?, out.as_deref())
        }
        Command::Compare(args) => run_compare(args),
        Command::Thm12(args) => run_thm12(args),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("real number {x:?}"))))
        .collect()
}

fn show_vector<T: ToString>(v: &[T]) -> String {
    format!("[{}]", v.iter().map(T::to_string).collect::<Vec<_>>().join(", "))
}

fn show_matrix(m: &IntMatrix) -> String {
    (0..m.rows()).map(|i| format!("  {}", show_vector(&m.row(i)))).collect::<Vec<_>>().join("\n")
}

fn show_point(z: &[Complex64]) -> String {
    z.iter().map(|c| io::fmt_complex(*c)).collect::<Vec<_>>().join(" ")
}

fn body_show(body: &ConvexBody) -> Outcome {
    let report = body.is_rationally_dense();
    let mut lines = vec![
        format!("n = {}", body.dim_ambient()),
        format!("ℓ = {}", body.affine_dim()),
        format!("radicand = {}", body.radicand()),
        "vertices:".to_string(),
    ];
    lines.extend(body.vertices().iter().map(|v| format!("  {}", show_vector(v))));
    lines.push(format!("dense = {}", report.dense));
    match &report.witness {
        DensityWitness::RationalBasis(basis) => {
            lines.push(format!("rational basis ({} vectors):", basis.len()));
            lines.extend(basis.iter().map(|v| format!("  {}", show_vector(v))));
        }
        DensityWitness::SeparatingConstraint { index, rational_part, surd_part } => {
            lines.push(format!("separating constraint {index}:"));
            lines.push(format!("  rational part {}", show_vector(rational_part)));
            lines.push(format!("  surd part {}", show_vector(surd_part)));
        }
    }
    Ok(lines.join("\n"))
}

fn lattice_map(body: &ConvexBody) -> Outcome {
    let map = construct_l(body)?;
    let cert = verify_map(&map, body);
    let mut lines = vec!["L =".to_string(), show_matrix(map.eta())];
    lines.push("kernel rows:".into());
    lines.extend(map.kernel_rows().iter().map(|r| format!("  {}", show_vector(r))));
    lines.push(format!("SNF diagonal: {}", show_vector(&cert.snf_diagonal)));
    for (name, ok) in cert.rows() {
        lines.push(format!("  {name:<30} {}", if ok { "pass" } else { "FAIL" }));
    }
    if !cert.all_pass() {
        println!("{}", lines.join("\n"));
        return Err(Error::Certificate("lattice map failed verification".into()));
    }
    lines.push("certificate: pass".into());
    Ok(lines.join("\n"))
}

fn load_map(source: &MapSource) -> Result<LatticeMap, Error> {
    match (&source.spec, &source.matrix) {
        (Some(spec), _) => construct_l(&io::read_body(spec)?),
        (None, Some(m)) => LatticeMap::with_complement(io::read_int_matrix(m)?),
        (None, None) => unreachable!("clap requires one of --spec, --matrix"),
    }
}

fn fibers_check(body: &ConvexBody, z: &[Complex64], samples: usize, seed: u64) -> Outcome {
    const TOL: f64 = 1e-9;
    let map = construct_l(body)?;
    let image = map.apply(z)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let t: Vec<Complex64> = (0..map.n() - map.ell())
            .map(|_| Complex64::from_polar(rng.gen_range(-2.0f64..=2.0).exp(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
            .collect();
        let moved = map.apply(&map.fiber_point(z, &t)?)?;
        for (a, b) in image.iter().zip(&moved) {
            worst = worst.max((a - b).norm() / a.norm().max(b.norm()));
        }
    }
    let summary = format!("max fiber deviation {} over {samples} points (tolerance {})", fmt_g15(worst), fmt_g15(TOL));
    if !(worst <= TOL) {
        println!("{summary}");
        return Err(Error::Certificate(format!("fiber deviation {} exceeds {}", fmt_g15(worst), fmt_g15(TOL))));
    }
    Ok(summary)
}

fn write_csv(out: Option<&Path>, csv: &str) -> Result<bool, Error> {
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            Ok(true)
        }
        None => {
            print!("{csv}");
            Ok(false)
        }
    }
}

fn siciak_eval(
    body: &Arc<ConvexBody>,
    samples: &WeightedSampleSet,
    m: u32,
    points: &[Vec<Complex64>],
    opts: &SiciakOptions,
    out: Option<&Path>,
) -> Outcome {
    if m == 0 {
        return Err(Error::Shape("--m must be at least 1".into()));
    }
    if points.is_empty() {
        return Err(Error::Shape("no query points".into()));
    }
    let results = szkit::par::map(opts.exec, points, |z| siciak_m(body, samples, m, z, opts))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<ResultRow> = results
        .iter()
        .map(|r| ResultRow {
            z: r.z.clone(),
            m,
            log_phi_raw: r.log_phi_raw,
            log_phi_certified: r.log_phi_certified,
            oracle_v: f64::NAN,
            err: f64::NAN,
        })
        .collect();
    let best = rows.iter().map(|r| r.log_phi_certified).fold(f64::NEG_INFINITY, f64::max);
    if !write_csv(out, &io::results_csv(body.dim_ambient(), &rows))? {
        return Ok(String::new());
    }
    Ok(format!("{} points at m = {m}; largest certified log Φ {}", rows.len(), fmt_g15(best)))
}

fn default_set(kind: OracleKind, n: usize) -> Result<WeightedSampleSet, Error> {
    match kind {
        OracleKind::Torus => WeightedSampleSet::torus(n, 32, WeightSpec::Constant(0.0)),
        OracleKind::Circle => WeightedSampleSet::circle(256, 1.0, WeightSpec::Constant(0.0)),
    }
}

fn run_compare(args: CompareArgs) -> Outcome {
    let body = Arc::new(io::read_body(&args.spec)?);
    let samples = match &args.set {
        Some(path) => io::read_sample_set(path)?,
        None => default_set(args.oracle, body.dim_ambient())?,
    };
    let grid = io::read_points(&args.grid)?;
    let rep = compare(&body, args.oracle, &samples, &args.m_list, &grid, &args.lp.options()?)?;
    let rows: Vec<ResultRow> = rep
        .rows
        .iter()
        .map(|r| ResultRow {
            z: r.z.clone(),
            m: r.m,
            log_phi_raw: r.log_phi_raw,
            log_phi_certified: r.log_phi_certified,
            oracle_v: r.oracle,
            err: r.err,
        })
        .collect();
    let wrote = write_csv(args.out.as_deref(), &io::results_csv(body.dim_ambient(), &rows))?;
    let summary = format!(
        "max |err| {} and min err {} at m = {}; one-sided bound {}",
        fmt_g15(rep.max_abs_err),
        fmt_g15(rep.min_err),
        args.m_list.last().expect("non-empty m list"),
        if rep.one_sided_ok { "holds" } else { "VIOLATED" }
    );
    if !rep.one_sided_ok {
        if wrote {
            println!("{summary}");
        }
        return Err(Error::Certificate("certified value exceeds the oracle beyond tolerance".into()));
    }
    Ok(if wrote { summary } else { String::new() })
}

fn run_thm12(args: Thm12Args) -> Outcome {
    let body = Arc::new(io::read_body(&args.spec)?);
    let samples = io::read_sample_set(&args.set)?;
    let grid = io::read_points(&args.grid)?;
    let rep = thm12_check(&body, &samples, &args.m_list, &grid, &args.lp.options()?)?;
    // oracle_V holds the pulled-back certified value, err the larger of the
    // raw and certified differences
    let rows: Vec<ResultRow> = rep
        .rows
        .iter()
        .map(|r| ResultRow {
            z: r.z.clone(),
            m: r.m,
            log_phi_raw: r.direct_raw,
            log_phi_certified: r.direct_certified,
            oracle_v: r.pulled_certified,
            err: r.diff,
        })
        .collect();
    let wrote = write_csv(args.out.as_deref(), &io::results_csv(body.dim_ambient(), &rows))?;
    Ok(if wrote {
        format!(
            "max difference {} over {} rows (ell = {}, target body has {} vertices)",
            fmt_g15(rep.max_diff),
            rep.rows.len(),
            rep.map.ell(),
            rep.target.vertices().len()
        )
    } else {
        String::new()
    })
}
