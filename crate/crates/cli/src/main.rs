//! `resonant`: batch front end for the resonance, incidence, Strichartz and
//! HNLS kernels.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or parse error, 3 budget
//! exceeded.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use resonant::corpus::derive_seed;
use resonant::hnls::{self, EvolveConfig, SpectralState};
use resonant::incidence::{self, GreatCircle, ProjectivePoint};
use resonant::io::{self as rio, Mode};
use resonant::lattice::{enumerate_cone_irr, EnumerationMethod, LatticePoint};
use resonant::resonance::{self, planes, ResonanceConfig, DEFAULT_BUDGET};
use resonant::strichartz::{self, extremizer, ExtremizerKind, ExtremizerSpec};
use resonant::suite::{self, SuiteConfig};
use resonant::{arith, Error};

#[derive(Parser)]
#[command(name = "resonant", version, about = "Resonant quadruples, incidences and Strichartz ratios on Z³")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "RESONANT_THREADS")]
    threads: Option<usize>,
    /// Work budget in pair operations.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET as u64)]
    budget: u64,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Include wall times in reports.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Numeric,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Numeric => Mode::Numeric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Cube,
    Line,
    Product,
}

impl From<KindArg> for ExtremizerKind {
    fn from(k: KindArg) -> ExtremizerKind {
        match k {
            KindArg::Cube => ExtremizerKind::Cube,
            KindArg::Line => ExtremizerKind::Line,
            KindArg::Product => ExtremizerKind::Product,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Param,
}

#[derive(Args)]
struct Input {
    /// Point-set CSV (`x,y,z,w_re[,w_im]`).
    input: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
}

fn parse_point(s: &str) -> Result<LatticePoint, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c] => LatticePoint::try_new(*a, *b, *c).map_err(|e| e.to_string()),
        _ => Err(format!("{s:?}: expected x,y,z")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Ω, Ω₁, Ω₂ of a weighted set.
    Count {
        #[command(flatten)]
        input: Input,
        /// Also run the quadruple-loop oracle and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Points of `{h = b, ξ·a = b}` inside `[−n, n]³`.
    Slice {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        a: LatticePoint,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        n: i64,
    },
    /// Cone-normal planes carrying at least `‖f‖²/M²` of the mass.
    HeavyPlanes {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: i64,
    },
    /// Planar point–line incidences.
    Incidence {
        /// CSV `x,y`.
        #[arg(long)]
        points: PathBuf,
        /// CSV `a,b,c` for `a x + b y + c = 0`.
        #[arg(long)]
        lines: PathBuf,
    },
    /// Lines holding at least `k` of the points.
    RichLines {
        /// CSV `x,y,z`.
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Incidences between directions and great circles.
    SphereIncidence {
        /// CSV `x,y,z` of directions.
        #[arg(long)]
        points: PathBuf,
        /// CSV `x,y,z` of circle normals.
        #[arg(long)]
        circles: PathBuf,
    },
    /// Primitive cone points with `|ξ| ≤ M`.
    ConeEnum {
        #[arg(long)]
        m: i64,
        #[arg(long, value_enum, default_value = "param")]
        method: MethodArg,
    },
    /// Solutions of `z² = q y + ω` with `|z| ≤ N`, or a seeded scan.
    Parabola {
        #[arg(long)]
        q: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<i64>,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 200)]
        q_max: i64,
        #[arg(long, default_value_t = 10_000)]
        n_max: i64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 20251014)]
        seed: u64,
    },
    /// Write an extremizer as a point-set CSV.
    Extremizer {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: i64,
        /// Emit the exact indicator `χ_S` instead of the normalized datum.
        #[arg(long)]
        indicator: bool,
    },
    /// `‖u‖_{L⁴([0,1]×T³)}` of a weighted set.
    L4 {
        #[command(flatten)]
        input: Input,
        /// Cross-check by grid quadrature.
        #[arg(long)]
        quadrature: bool,
    },
    /// L⁴/ℓ² ratios of an extremizer family and their log-log slope.
    Scaling {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<i64>,
        #[arg(long, default_value_t = 4.0)]
        p: f64,
    },
    /// Rank-dyadic atomic decomposition.
    Decompose {
        #[command(flatten)]
        input: Input,
    },
    /// Good/bad split of the atomic blocks.
    GoodBad {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        c_threshold: f64,
    },
    /// `‖u₁u₂‖_{L²}` for two weighted sets.
    Bilinear {
        g1: PathBuf,
        g2: PathBuf,
        #[arg(long, value_enum, default_value = "numeric")]
        mode: ModeArg,
        /// Frequency scales for the normalized ratio.
        #[arg(long)]
        n1: Option<i64>,
        #[arg(long)]
        n2: Option<i64>,
    },
    /// Norms of `φ_N` and the first Picard iterate ratio.
    Illposed {
        #[arg(long)]
        n: i64,
        /// Write the iterate's coefficients as CSV instead.
        #[arg(long)]
        coefficients: bool,
    },
    /// Split-step evolution; diagnostics CSV on output.
    Evolve {
        input: PathBuf,
        #[arg(long)]
        radius: i64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i32,
        #[arg(long)]
        linear_only: bool,
        #[arg(long)]
        project: bool,
        #[arg(long, default_value_t = 0)]
        record_every: usize,
        /// Final state as a point-set CSV.
        #[arg(long)]
        state_out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Suite {
        /// TOML overrides of the pinned constants and tolerances.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        goldens: Option<PathBuf>,
        /// Run only these checks.
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Recompute and store the golden values, then exit.
        #[arg(long)]
        write_goldens: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Check(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type Outcome = Result<(), Failure>;

struct Out {
    sink: Box<dyn Write>,
}

impl Out {
    fn open(path: &Option<PathBuf>) -> io::Result<Out> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Out { sink })
    }

    fn json(&mut self, v: &impl serde::Serialize) -> Outcome {
        serde_json::to_writer_pretty(&mut self.sink, v)?;
        writeln!(self.sink)?;
        Ok(())
    }
}

impl Drop for Out {
    fn drop(&mut self) {
        let _ = self.sink.flush();
    }
}

fn read_set(input: &Input) -> Result<resonant::weighted::WeightedSet, Error> {
    rio::read_weighted_set_path(&input.input, input.mode.into())
}

fn open(path: &Path) -> Result<File, Error> {
    File::open(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    let budget = g.budget as u128;
    let rc = ResonanceConfig { budget, timing: g.timing };
    let mut out = Out::open(&g.output)?;
    match cli.command {
        Command::Count { input, oracle } => {
            let f = read_set(&input)?;
            let fast = resonance::omega_single_bucketed(&f, &rc)?;
            if oracle {
                let slow = resonance::omega_single_oracle(&f, &rc)?;
                let agree = fast.omega == slow.omega && fast.omega1 == slow.omega1 && fast.omega2 == slow.omega2;
                out.json(&json!({ "bucketed": fast, "oracle": slow, "agree": agree }))?;
                if !agree {
                    return Err(Failure::Check("bucketed and oracle counts differ".into()));
                }
            } else {
                out.json(&fast)?;
            }
        }
        Command::Slice { a, b, n } => {
            let pts = resonance::slice_a(a, b, n)?;
            out.json(&json!({ "a": a.0, "b": b, "n": n, "count": pts.len(), "points": pts.iter().map(|p| p.0).collect::<Vec<_>>() }))?;
        }
        Command::HeavyPlanes { input, m } => {
            let f = read_set(&input)?;
            let hp = planes::heavy_planes(&f, m)?;
            let rows: Vec<Value> = hp
                .iter()
                .map(|h| json!({ "normal": h.plane.normal().0, "offset": h.plane.offset(), "mass": h.mass }))
                .collect();
            out.json(&json!({ "m": m, "threshold_fraction": format!("1/{}", m * m), "count": hp.len(), "planes": rows }))?;
        }
        Command::Incidence { points, lines } => {
            let p = rio::read_planar_points(open(&points)?)?;
            let l = rio::read_planar_lines(open(&lines)?)?;
            let i = incidence::count_incidences_point_line(&p, &l);
            out.json(&json!({
                "points": p.len(),
                "lines": l.len(),
                "incidences": i,
                "st_ratio": incidence::szemeredi_trotter_ratio(i, p.len(), l.len()),
            }))?;
        }
        Command::RichLines { input, k } => {
            let p = rio::read_points(open(&input)?)?;
            let r = incidence::rich_lines(&p, k)?;
            let total: usize = r.iter().map(|l| l.count).sum();
            out.json(&json!({
                "k": k,
                "points": p.len(),
                "lines": r.len(),
                "incidences": total,
                "ratio": incidence::rich_line_ratio(total as u64, p.len(), k),
                "rich_lines": r,
            }))?;
        }
        Command::SphereIncidence { points, circles } => {
            let p: Vec<ProjectivePoint> = rio::read_points(open(&points)?)?.into_iter().map(ProjectivePoint::new).collect::<Result<_, _>>()?;
            let c: Vec<GreatCircle> = rio::read_points(open(&circles)?)?.into_iter().map(GreatCircle::new).collect::<Result<_, _>>()?;
            let s = incidence::count_incidences_sphere(&p, &c);
            out.json(&s)?;
            if !s.consistent() {
                return Err(Failure::Check("projection count disagrees with the direct count".into()));
            }
        }
        Command::ConeEnum { m, method } => {
            let method = match method {
                MethodArg::Brute => EnumerationMethod::BruteForce,
                MethodArg::Param => EnumerationMethod::Parametrized,
            };
            let cat = enumerate_cone_irr(m, method)?;
            rio::write_points(&mut out.sink, cat.points())?;
        }
        Command::Parabola { q, omega, n, scan, q_max, n_max, trials, seed } => {
            if scan {
                let s = arith::parabola_bound_scan(q_max, n_max, trials, derive_seed(seed, "parabola"))?;
                out.json(&s)?;
            } else {
                let (Some(q), Some(omega), Some(n)) = (q, omega, n) else {
                    return Err(Error::Invalid("parabola needs --q, --omega and --n (or --scan)".into()).into());
                };
                let query = arith::ParabolaQuery::new(q, omega, n)?;
                let c = arith::count_parabola_points(&query);
                out.json(&json!({ "query": query, "count": c, "ratio": query.ratio(c) }))?;
            }
        }
        Command::Extremizer { kind, n, indicator } => {
            let e = extremizer(ExtremizerSpec { kind: kind.into(), n })?;
            let f = if indicator { e.support.clone() } else { e.weighted_set() };
            rio::write_weighted_set(&mut out.sink, &f)?;
        }
        Command::L4 { input, quadrature } => {
            let f = read_set(&input)?;
            let v = strichartz::l4_fourth_power(&f, budget)?;
            let mut rep = json!({
                "l4_fourth_power": v,
                "l4_norm": v.to_f64().max(0.0).powf(0.25),
                "l2_norm": f.l2_norm(),
            });
            if quadrature {
                let q = strichartz::l4_fourth_power_quadrature(&f)?;
                rep["quadrature"] = json!(q);
                rep["relative_error"] = json!((q - v.to_f64()).abs() / v.to_f64().abs().max(f64::MIN_POSITIVE));
            }
            out.json(&rep)?;
        }
        Command::Scaling { kind, ns, p } => {
            let fit = strichartz::scaling_exponent(kind.into(), p, &ns, budget)?;
            writeln!(out.sink, "n,norm,ratio")?;
            for pt in &fit.points {
                writeln!(out.sink, "{},{:?},{:?}", pt.n, pt.l4, pt.ratio)?;
            }
            let summary = json!({ "kind": fit.kind, "p": fit.p, "slope": fit.slope, "intercept": fit.intercept, "stderr": fit.stderr });
            writeln!(out.sink, "# fit {}", serde_json::to_string(&summary)?)?;
        }
        Command::Decompose { input } => {
            let f = read_set(&input)?;
            out.json(&strichartz::atomic_decomposition(&f)?)?;
        }
        Command::GoodBad { input, n, delta, c_threshold } => {
            let f = read_set(&input)?;
            out.json(&strichartz::good_bad_split(&f, n, delta, c_threshold, &rc)?)?;
        }
        Command::Bilinear { g1, g2, mode, n1, n2 } => {
            let a = rio::read_weighted_set_path(&g1, mode.into())?;
            let b = rio::read_weighted_set_path(&g2, mode.into())?;
            let v = resonance::bilinear_l2(&a, &b, budget)?;
            let norm = v.to_f64().max(0.0).sqrt();
            let mut rep = json!({ "l2_sq": v, "l2": norm, "g1_norm": a.l2_norm(), "g2_norm": b.l2_norm() });
            if let (Some(n1), Some(n2)) = (n1, n2) {
                rep["ratio"] = json!(norm / ((n1.min(n2) as f64).sqrt() * a.l2_norm() * b.l2_norm()));
            }
            out.json(&rep)?;
        }
        Command::Illposed { n, coefficients } => {
            if coefficients {
                writeln!(out.sink, "k,coefficient")?;
                for (k, c) in hnls::picard_coefficients(n, hnls::PicardMethod::Auto)? {
                    writeln!(out.sink, "{k},{c:?}")?;
                }
            } else {
                hnls::illposed_data(n)?;
                let norm_sq = hnls::illposed_norm_sq(n);
                let log = (n as f64).ln();
                out.json(&json!({
                    "n": n,
                    "h_half_norm_sq": norm_sq,
                    "norm_sq_over_log_n": if n > 1 { json!(norm_sq / log) } else { Value::Null },
                    "picard_ratio": hnls::picard_ratio(n)?,
                }))?;
            }
        }
        Command::Evolve { input, radius, grid, dt, steps, k, sign, linear_only, project, record_every, state_out } => {
            let f = rio::read_weighted_set_path(&input, Mode::Numeric)?;
            let state = SpectralState::new(f, radius, 0.0)?;
            let cfg = EvolveConfig { k, sign, dt, steps, grid, linear_only, project, record_every };
            let e = hnls::splitstep_evolve(&state, &cfg)?;
            writeln!(out.sink, "step,t,mass,h_half")?;
            for d in &e.diagnostics {
                writeln!(out.sink, "{},{:?},{:?},{:?}", d.step, d.t, d.mass, d.h_half)?;
            }
            if let Some(p) = state_out {
                rio::write_weighted_set(BufWriter::new(File::create(p)?), &e.state.coefficients)?;
            }
        }
        Command::Suite { config, goldens, checks, write_goldens, seed } => {
            let mut cfg = match config {
                Some(p) => SuiteConfig::from_path(&p)?,
                None => SuiteConfig::default(),
            };
            if let Some(g) = goldens {
                cfg.goldens = g;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if !checks.is_empty() {
                cfg.checks = checks;
            }
            cfg.timing |= g.timing;
            cfg.budget = g.budget;
            if write_goldens {
                let path = cfg.goldens.clone();
                out.json(&suite::write_goldens(&cfg, &path)?)?;
                return Ok(());
            }
            let report = suite::run_suite(&cfg)?;
            out.json(&report)?;
            for c in &report.checks {
                eprintln!("{} {:>2} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name);
                for f in &c.failures {
                    eprintln!("        {f}");
                }
            }
            if report.checks.iter().any(|c| c.budget_exceeded) {
                return Err(Failure::Lib(Error::Budget {
                    work: 0,
                    budget,
                    detail: "a suite check exceeded the work budget".into(),
                }));
            }
            if !report.passed {
                return Err(Failure::Check(format!("failed checks: {}", report.failed().join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Budget { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
