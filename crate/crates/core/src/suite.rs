//! The acceptance checks: oracle equivalence, closed forms, exponent fits and
//! pinned-constant regressions over seeded corpora, plus golden values.
//!
//! Every constant and tolerance lives in [`SuiteConfig`]; the defaults are
//! the pinned values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{count_parabola_points, count_parabola_points_naive, parabola_bound_scan, ParabolaQuery};
use crate::corpus::{self, check_rng, derive_seed, WeightKind};
use crate::error::{Error, Result};
use crate::hnls::{self, EvolveConfig, SpectralState};
use crate::incidence::{self, GreatCircle, LatticeLine, PlanarLine, ProjectivePoint};
use crate::lattice::{crossing_form, enumerate_cone_irr, EnumerationMethod, LatticePoint};
use crate::resonance::{self, planes, ResonanceConfig};
use crate::strichartz::{self, extremizer, ExtremizerKind, ExtremizerSpec};
use crate::weighted::{Scalar, WeightedSet};

pub const DEFAULT_GOLDENS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/goldens/goldens.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub c_main: f64,
    /// The cube family must reach this fraction of `c_main`.
    pub main_fraction: f64,
    pub c_cone: f64,
    pub c_2: f64,
    pub c_err: f64,
    pub c_1: f64,
    pub parabola: f64,
    pub c_st: f64,
    pub c_rich: f64,
    pub c_cross: f64,
    pub c_bilin: f64,
    pub c_picard: f64,
    pub line_slope: [f64; 2],
    pub cube_slope: [f64; 2],
    pub product_slope: [f64; 2],
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c_main: 2.9,
            main_fraction: 0.4,
            c_cone: 8.0,
            c_2: 1.9,
            c_err: 2.1,
            c_1: 2.7,
            parabola: 3.0,
            c_st: 1.9,
            c_rich: 4.3,
            c_cross: 2.1,
            c_bilin: 1.45,
            c_picard: 0.32,
            line_slope: [0.20, 0.30],
            cube_slope: [0.19, 0.31],
            product_slope: [0.19, 0.31],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub l4_quadrature_rel: f64,
    pub linear_phase: f64,
    pub mass_drift: f64,
    pub min_contraction: f64,
    /// Relative band around `√2` for `‖φ_N‖²_{H^{1/2}}/log N`.
    pub illposed_band: f64,
    pub golden_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            l4_quadrature_rel: 1e-6,
            linear_phase: 1e-12,
            mass_drift: 1e-8,
            min_contraction: 3.0,
            illposed_band: 0.10,
            golden_rel: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub goldens: PathBuf,
    /// Names of the checks to run; empty runs all.
    pub checks: Vec<String>,
    /// Put wall times in the report.
    pub timing: bool,
    pub budget: u64,
    pub constants: Constants,
    pub tolerances: Tolerances,
    /// Seconds per check.
    pub runtime: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let runtime = [
            ("oracle_equivalence", 60.0),
            ("line_closed_form", 1.0),
            ("sharpness_exponents", 1800.0),
            ("cone_count", 120.0),
            ("off_cone_side", 600.0),
            ("parabola", 120.0),
            ("illposed", 60.0),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        SuiteConfig {
            seed: 20251014,
            goldens: PathBuf::from(DEFAULT_GOLDENS),
            checks: Vec::new(),
            timing: false,
            budget: resonance::DEFAULT_BUDGET as u64,
            constants: Constants::default(),
            tolerances: Tolerances::default(),
            runtime,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Invalid(format!("suite config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn budget(&self) -> u128 {
        self.budget as u128
    }

    fn resonance(&self) -> ResonanceConfig {
        ResonanceConfig {
            budget: self.budget(),
            timing: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: u32,
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub measured: BTreeMap<String, Value>,
    pub limits: BTreeMap<String, Value>,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    #[serde(skip)]
    pub budget_exceeded: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

struct Check {
    report: CheckReport,
    start: Instant,
}

impl Check {
    fn new(id: u32, name: &'static str, statement: &'static str) -> Self {
        Check {
            report: CheckReport {
                id,
                name,
                statement,
                passed: true,
                measured: BTreeMap::new(),
                limits: BTreeMap::new(),
                failures: Vec::new(),
                error: None,
                elapsed_ms: None,
                budget_exceeded: false,
            },
            start: Instant::now(),
        }
    }

    fn measure(&mut self, key: &str, v: impl Serialize) {
        self.report.measured.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn limit(&mut self, key: &str, v: impl Serialize) {
        self.report.limits.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.report.passed = false;
            self.report.failures.push(msg());
        }
    }

    fn finish(mut self, cfg: &SuiteConfig) -> CheckReport {
        let secs = self.start.elapsed().as_secs_f64();
        if let Some(&lim) = cfg.runtime.get(self.report.name) {
            self.require(secs <= lim, || format!("runtime {secs:.1} s exceeds {lim} s"));
        }
        if cfg.timing {
            self.report.elapsed_ms = Some(secs * 1e3);
        }
        self.report
    }
}

type CheckFn = fn(&SuiteConfig, &mut Check) -> Result<()>;

/// `(id, name, statement)` in run order.
pub const CHECKS: &[(u32, &str, &str)] = &[
    (1, "oracle_equivalence", "bucketed Ω, Ω₁, Ω₂ equal the quadruple-loop oracle exactly"),
    (2, "line_closed_form", "Ω(χ_line(N)) = N(N+1)(2N+1)/3 − N² and Ω₁ = 0"),
    (3, "sharpness_exponents", "L⁴/ℓ² ratios of the extremizer families grow like N^{1/4}"),
    (4, "main_estimate", "‖u‖_{L⁴} ≤ C·N^{1/4}‖f‖, attained up to a constant by the cube"),
    (5, "cone_count", "both cone enumerations agree and #Cone^irr_M ≤ C·M"),
    (6, "cone_side", "Ω₂(f) ≤ C·diam(S)‖f‖⁴, heavy planes ≤ M²·#Cone^irr_M, Ω₂ of the error part ≤ C·diam(S)‖f‖⁴/M"),
    (7, "off_cone_side", "Ω₁(χ_S) ≤ C·(#S)^{7/3}"),
    (8, "parabola", "#{|z| ≤ N : z² = qy + ω} ≤ C(√N + √q)"),
    (9, "incidence", "exact incidence counts match double loops; Szemerédi–Trotter and rich-line ratios bounded"),
    (10, "bilinear", "‖u₁u₂‖_{L²} ≤ C·min(N₁,N₂)^{1/2}‖g₁‖‖g₂‖ for shell-localized data"),
    (11, "l4_identity", "the resonance count equals grid quadrature of ∫|u|⁴"),
    (12, "illposed", "‖φ_N‖²_{H^{1/2}} ~ √2 log N and the first Picard iterate grows like log N ‖φ_N‖³"),
    (13, "integrator", "split-step evolution: exact linear phases, conserved mass, second-order convergence"),
    (14, "goldens", "pinned golden values reproduce"),
];

fn body(name: &str) -> CheckFn {
    match name {
        "oracle_equivalence" => oracle_equivalence,
        "line_closed_form" => line_closed_form,
        "sharpness_exponents" => sharpness_exponents,
        "main_estimate" => main_estimate,
        "cone_count" => cone_count,
        "cone_side" => cone_side,
        "off_cone_side" => off_cone_side,
        "parabola" => parabola,
        "incidence" => incidence_check,
        "bilinear" => bilinear,
        "l4_identity" => l4_identity,
        "illposed" => illposed,
        "integrator" => integrator,
        "goldens" => goldens,
        _ => unreachable!(),
    }
}

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|c| c.1)
}

pub fn run_check(name: &str, cfg: &SuiteConfig) -> Result<CheckReport> {
    let &(id, name, statement) = CHECKS
        .iter()
        .find(|c| c.1 == name)
        .ok_or_else(|| Error::Invalid(format!("unknown check {name:?}")))?;
    let mut c = Check::new(id, name, statement);
    if let Err(e) = body(name)(cfg, &mut c) {
        c.report.budget_exceeded = matches!(e, Error::Budget { .. });
        c.report.error = Some(e.to_string());
        c.require(false, || format!("error: {e}"));
    }
    Ok(c.finish(cfg))
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    for n in &cfg.checks {
        if !check_names().any(|c| c == n) {
            return Err(Error::Invalid(format!("unknown check {n:?}")));
        }
    }
    let mut checks = Vec::new();
    for name in check_names() {
        if cfg.checks.is_empty() || cfg.checks.iter().any(|c| c == name) {
            checks.push(run_check(name, cfg)?);
        }
    }
    Ok(SuiteReport {
        seed: cfg.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn line_support(n: i64) -> Result<WeightedSet> {
    WeightedSet::characteristic((1..=n).map(|k| LatticePoint::new(k, k, 0)))
}

fn oracle_equivalence(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let rc = cfg.resonance();
    let mut rng = check_rng(cfg.seed, "oracle_equivalence");
    let mut sets = Vec::new();
    for i in 0..100 {
        let n = rng.gen_range(1..=40);
        sets.push((format!("random{i}"), corpus::random_set(&mut rng, n, 10, WeightKind::Unit)?));
    }
    for n in 1..=8 {
        sets.push((format!("line{n}"), extremizer(ExtremizerSpec { kind: ExtremizerKind::Line, n })?.support));
        sets.push((format!("product{n}"), extremizer(ExtremizerSpec { kind: ExtremizerKind::Product, n })?.support));
    }
    let mut mismatches = Vec::new();
    for (name, f) in &sets {
        let a = resonance::omega_single_bucketed(f, &rc)?;
        let b = resonance::omega_single_oracle(f, &rc)?;
        if a.omega != b.omega || a.omega1 != b.omega1 || a.omega2 != b.omega2 {
            mismatches.push(format!("{name}: bucketed {}/{}/{} oracle {}/{}/{}", a.omega, a.omega1, a.omega2, b.omega, b.omega1, b.omega2));
        }
    }
    c.measure("sets", sets.len());
    c.measure("mismatches", mismatches.len());
    c.require(mismatches.is_empty(), || mismatches.join("; "));
    Ok(())
}

fn line_closed_form(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let rc = cfg.resonance();
    let mut bad = Vec::new();
    for n in 1..=50i128 {
        let r = resonance::omega_single_bucketed(&line_support(n as i64)?, &rc)?;
        let expect = n * (n + 1) * (2 * n + 1) / 3 - n * n;
        if r.omega != Scalar::int(expect) || !r.omega1.is_zero() {
            bad.push(format!("N={n}: Ω={} (expected {expect}), Ω₁={}", r.omega, r.omega1));
        }
    }
    c.measure("n_max", 50);
    c.require(bad.is_empty(), || bad.join("; "));
    Ok(())
}

fn sharpness_exponents(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let families: [(&str, ExtremizerKind, &[i64], [f64; 2]); 3] = [
        ("line", ExtremizerKind::Line, &[8, 16, 32, 64, 128, 256, 512], k.line_slope),
        ("product", ExtremizerKind::Product, &[8, 12, 16, 20, 24, 28, 32], k.product_slope),
        ("cube", ExtremizerKind::Cube, &[4, 6, 8, 12, 16], k.cube_slope),
    ];
    for (name, kind, ns, [lo, hi]) in families {
        let fit = strichartz::scaling_exponent(kind, 4.0, ns, cfg.budget())?;
        c.measure(&format!("{name}_slope"), fit.slope);
        c.measure(&format!("{name}_ratios"), fit.points.iter().map(|p| (p.n, p.ratio)).collect::<Vec<_>>());
        c.limit(&format!("{name}_slope"), [lo, hi]);
        c.require((lo..=hi).contains(&fit.slope), || format!("{name} slope {} outside [{lo}, {hi}]", fit.slope));
    }
    Ok(())
}

fn main_estimate(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let mut items = corpus::standard_corpus(cfg.seed)?;
    let mut rng = check_rng(cfg.seed, "main_estimate");
    for i in 0..12 {
        let kind = [WeightKind::Unit, WeightKind::Rational, WeightKind::Complex][i % 3];
        let n = rng.gen_range(5..=80);
        let r = rng.gen_range(1..=8);
        items.push(corpus::CorpusItem {
            name: format!("extra{i}"),
            set: corpus::random_set(&mut rng, n, r, kind)?,
        });
    }
    let mut worst = (String::new(), 0.0f64);
    for it in &items {
        let r = strichartz::main_estimate_ratio(&it.set, cfg.budget())?;
        if r > worst.1 {
            worst = (it.name.clone(), r);
        }
    }
    let mut cube = Vec::new();
    for n in [2, 4, 6, 8] {
        let e = extremizer(ExtremizerSpec { kind: ExtremizerKind::Cube, n })?;
        let r = strichartz::main_estimate_ratio(&e.weighted_set(), cfg.budget())?;
        if r > worst.1 {
            worst = (format!("cube{n}"), r);
        }
        cube.push((n, r));
    }
    let last = cube.last().unwrap().1;
    c.measure("max_ratio", worst.1);
    c.measure("argmax", &worst.0);
    c.measure("cube_ratios", &cube);
    c.limit("c_main", k.c_main);
    c.limit("cube_fraction", k.main_fraction);
    c.require(worst.1 <= k.c_main, || format!("ratio {} on {} exceeds {}", worst.1, worst.0, k.c_main));
    c.require(last >= k.main_fraction * k.c_main, || {
        format!("cube ratio {last} below {}·{}", k.main_fraction, k.c_main)
    });
    Ok(())
}

fn cone_count(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let ms: Vec<i64> = (1..=64).chain([96, 128, 200, 256, 384, 512]).collect();
    let mut bad = Vec::new();
    for &m in &ms {
        let a = enumerate_cone_irr(m, EnumerationMethod::BruteForce)?;
        let b = enumerate_cone_irr(m, EnumerationMethod::Parametrized)?;
        if a.points() != b.points() {
            bad.push(m);
        }
    }
    c.require(bad.is_empty(), || format!("enumerations differ at M ∈ {bad:?}"));
    let cat = enumerate_cone_irr(4096, EnumerationMethod::Parametrized)?;
    let mut norms: Vec<i64> = cat.points().iter().map(|p| p.norm_sq()).collect();
    norms.sort_unstable();
    let mut worst = (0, 0.0f64);
    for m in 2..=4096i64 {
        let r = norms.partition_point(|&x| x <= m * m) as f64 / m as f64;
        if r > worst.1 {
            worst = (m, r);
        }
    }
    c.measure("compared_m", ms.len());
    c.measure("max_ratio", worst.1);
    c.measure("argmax_m", worst.0);
    c.measure("count_4096", cat.len());
    c.limit("c_cone", k.c_cone);
    c.require(worst.1 <= k.c_cone, || format!("#Cone^irr_M/M = {} at M={} exceeds {}", worst.1, worst.0, k.c_cone));
    Ok(())
}

fn cone_side(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let rc = cfg.resonance();
    let items = corpus::standard_corpus(cfg.seed)?;
    let cats: Vec<(i64, usize)> = [2, 4, 8]
        .iter()
        .map(|&m| enumerate_cone_irr(m, EnumerationMethod::Parametrized).map(|cat| (m, cat.len())))
        .collect::<Result<_>>()?;
    let (mut worst2, mut worst_err) = ((String::new(), 0.0f64), (String::new(), 0.0f64));
    for it in &items {
        let f = &it.set;
        let d = f.diam();
        if d == 0.0 {
            continue;
        }
        let n4 = f.l2_norm_sq().powi(2);
        let r2 = resonance::omega2_single(f, &rc)?.to_f64() / (d * n4);
        if r2 > worst2.1 {
            worst2 = (it.name.clone(), r2);
        }
        for &(m, cone) in &cats {
            let hp = planes::heavy_planes(f, m)?;
            let cap = (m * m) as usize * cone;
            c.require(hp.len() <= cap, || format!("{}: {} heavy planes at M={m} exceed {cap}", it.name, hp.len()));
            let e = planes::error_part(f, m)?;
            let re = resonance::omega2_single(&e, &rc)?.to_f64() * m as f64 / (d * n4);
            if re > worst_err.1 {
                worst_err = (format!("{} M={m}", it.name), re);
            }
        }
    }
    c.measure("corpus", items.len());
    c.measure("max_omega2_ratio", worst2.1);
    c.measure("argmax_omega2", &worst2.0);
    c.measure("max_error_ratio", worst_err.1);
    c.measure("argmax_error", &worst_err.0);
    c.limit("c_2", k.c_2);
    c.limit("c_err", k.c_err);
    c.require(worst2.1 <= k.c_2, || format!("Ω₂ ratio {} on {} exceeds {}", worst2.1, worst2.0, k.c_2));
    c.require(worst_err.1 <= k.c_err, || format!("error-part ratio {} on {} exceeds {}", worst_err.1, worst_err.0, k.c_err));
    Ok(())
}

fn off_cone_side(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let rc = cfg.resonance();
    let mut sets: Vec<(String, WeightedSet)> = Vec::new();
    for n in [2, 4, 8, 12] {
        sets.push((format!("cube{n}"), extremizer(ExtremizerSpec { kind: ExtremizerKind::Cube, n })?.support));
    }
    for g in [4, 8, 16, 32] {
        sets.push((format!("grid{g}"), WeightedSet::characteristic(corpus::planar_grid(g))?));
    }
    for n in [8, 16, 32] {
        sets.push((format!("product{n}"), extremizer(ExtremizerSpec { kind: ExtremizerKind::Product, n })?.support));
    }
    sets.push((
        "skew_product".into(),
        WeightedSet::characteristic(corpus::product_points(LatticePoint::new(1, 2, 0), LatticePoint::new(0, 1, 3), 12, 10))?,
    ));
    let mut rng = check_rng(cfg.seed, "off_cone_side");
    for i in 0..10 {
        let n = rng.gen_range(50..=400);
        let r = rng.gen_range(3..=8);
        sets.push((format!("random{i}"), corpus::random_set(&mut rng, n, r, WeightKind::Unit)?));
    }
    let mut worst = (String::new(), 0.0f64);
    for (name, f) in &sets {
        let r = resonance::omega_single_bucketed(f, &rc)?;
        let v = r.omega1.to_f64() / (f.len() as f64).powf(7.0 / 3.0);
        if v > worst.1 {
            worst = (name.clone(), v);
        }
    }
    c.measure("corpus", sets.len());
    c.measure("max_ratio", worst.1);
    c.measure("argmax", &worst.0);
    c.limit("c_1", k.c_1);
    c.require(worst.1 <= k.c_1, || format!("Ω₁/(#S)^(7/3) = {} on {} exceeds {}", worst.1, worst.0, k.c_1));
    Ok(())
}

fn parabola(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let scan = parabola_bound_scan(200, 10_000, 10_000, derive_seed(cfg.seed, "parabola"))?;
    let mut rng = check_rng(cfg.seed, "parabola_oracle");
    let mut disagreements = Vec::new();
    let mut compared = 0;
    for q in 1..=20i64 {
        for n in [1, 2, 3, 7, 20, 64, 200] {
            for _ in 0..8 {
                let omega = rng.gen_range(-q * n - 5..=q * n + 5);
                let query = ParabolaQuery::new(q, omega, n)?;
                compared += 1;
                let (a, b) = (count_parabola_points(&query), count_parabola_points_naive(&query));
                if a != b {
                    disagreements.push(format!("q={q} ω={omega} N={n}: {a} vs {b}"));
                }
            }
        }
    }
    c.measure("oracle_queries", compared);
    c.measure("max_ratio", scan.max_ratio);
    c.measure("random_max", &scan.random_max);
    c.measure("adversarial_max", &scan.adversarial_max);
    c.limit("ratio", k.parabola);
    c.require(disagreements.is_empty(), || disagreements.join("; "));
    c.require(scan.max_ratio <= k.parabola, || format!("max ratio {} exceeds {}", scan.max_ratio, k.parabola));
    Ok(())
}

fn grid_lines(k: i64) -> Result<Vec<PlanarLine>> {
    let mut ls = Vec::new();
    for t in 0..k {
        ls.push(PlanarLine::new(0, 1, -t)?);
        ls.push(PlanarLine::new(1, 0, -t)?);
    }
    for t in -(k - 2)..=(k - 2) {
        ls.push(PlanarLine::new(1, -1, -t)?);
    }
    for t in 1..=2 * k - 3 {
        ls.push(PlanarLine::new(1, 1, -t)?);
    }
    Ok(ls)
}

fn incidence_check(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let mut rng = check_rng(cfg.seed, "incidence");
    let mut failures = Vec::new();
    let mut st_worst = (String::new(), 0.0f64);
    let mut st = |name: String, i: u64, n: usize, m: usize| {
        let r = incidence::szemeredi_trotter_ratio(i, n, m);
        if r > st_worst.1 {
            st_worst = (name, r);
        }
    };
    for g in [5, 10, 20, 50, 100] {
        let pts: Vec<[i64; 2]> = (0..g).flat_map(|x| (0..g).map(move |y| [x, y])).collect();
        let ls = grid_lines(g)?;
        let (a, b) = (incidence::count_incidences_point_line(&pts, &ls), incidence::count_incidences_point_line_naive(&pts, &ls));
        if a != b {
            failures.push(format!("grid {g}: {a} vs {b}"));
        }
        st(format!("grid{g}"), a, pts.len(), ls.len());
    }
    for kk in [4i64, 8, 16] {
        // [k] × [2k²] against y = a x + b, a ∈ [k], b ∈ [k²]
        let pts: Vec<[i64; 2]> = (1..=kk).flat_map(|x| (1..=2 * kk * kk).map(move |y| [x, y])).collect();
        let ls: Vec<PlanarLine> = (1..=kk)
            .flat_map(|a| (1..=kk * kk).map(move |b| PlanarLine::new(a, -1, b)))
            .collect::<Result<_>>()?;
        let (a, b) = (incidence::count_incidences_point_line(&pts, &ls), incidence::count_incidences_point_line_naive(&pts, &ls));
        if a != b {
            failures.push(format!("standard family k={kk}: {a} vs {b}"));
        }
        st(format!("standard{kk}"), a, pts.len(), ls.len());
    }
    for i in 0..20 {
        let pts: Vec<[i64; 2]> = (0..rng.gen_range(10..=2000)).map(|_| [rng.gen_range(-30..=30), rng.gen_range(-30..=30)]).collect();
        let ls: Vec<PlanarLine> = (0..rng.gen_range(10..=500))
            .filter_map(|_| PlanarLine::new(rng.gen_range(-4..=4), rng.gen_range(-4..=4), rng.gen_range(-40..=40)).ok())
            .collect();
        let (a, b) = (incidence::count_incidences_point_line(&pts, &ls), incidence::count_incidences_point_line_naive(&pts, &ls));
        if a != b {
            failures.push(format!("random planar {i}: {a} vs {b}"));
        }
    }
    let mut rich_worst = (String::new(), 0.0f64);
    for side in [10, 20] {
        let g = corpus::planar_grid(side);
        for kk in 2..=side as usize {
            let r = incidence::rich_lines(&g, kk)?;
            let inc: usize = r.iter().map(|l| l.count).sum();
            let v = incidence::rich_line_ratio(inc as u64, g.len(), kk);
            if v > rich_worst.1 {
                rich_worst = (format!("grid{side} k={kk}"), v);
            }
        }
    }
    for i in 0..10 {
        let n = rng.gen_range(20..=300);
        let pts = corpus::random_points(&mut rng, n, 4);
        let kk = rng.gen_range(2..=5);
        if incidence::rich_lines(&pts, kk)? != incidence::rich_lines_naive(&pts, kk)? {
            failures.push(format!("rich lines {i} differ from the pair loop"));
        }
    }
    let mut sphere_total = 0;
    let dir = |rng: &mut rand_chacha::ChaCha8Rng, r: i64| loop {
        let v = LatticePoint::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        if !v.is_zero() {
            return v;
        }
    };
    for i in 0..100 {
        let r = rng.gen_range(1..=6);
        let pts: Vec<ProjectivePoint> = (0..rng.gen_range(1..=60)).map(|_| ProjectivePoint::new(dir(&mut rng, r))).collect::<Result<_>>()?;
        let cs: Vec<GreatCircle> = (0..rng.gen_range(1..=60)).map(|_| GreatCircle::new(dir(&mut rng, r))).collect::<Result<_>>()?;
        let s = incidence::count_incidences_sphere(&pts, &cs);
        sphere_total += s.direct;
        if !s.consistent() {
            failures.push(format!("sphere {i}: direct {} vs projection {}", s.direct, s.via_projection));
        }
    }
    let mut cross_worst = (String::new(), 0.0f64);
    let xi = LatticePoint::new(3, -1, 2);
    let mut pencils: Vec<(String, Vec<LatticePoint>)> = Vec::new();
    for r in [1, 2, 3] {
        let mut d: Vec<LatticePoint> = corpus::cube_points(-r, r)
            .into_iter()
            .filter(|v| !v.is_zero())
            .map(|v| v.primitive_canonical())
            .collect();
        d.sort_unstable();
        d.dedup();
        pencils.push((format!("box{r}"), d));
    }
    pencils.push(("cone".into(), enumerate_cone_irr(30, EnumerationMethod::Parametrized)?.canonical_directions()));
    for i in 0..5 {
        let d: Vec<LatticePoint> = (0..rng.gen_range(5..=60)).map(|_| dir(&mut rng, 5)).collect();
        pencils.push((format!("random{i}"), d));
    }
    for (name, dirs) in &pencils {
        let lines: Vec<LatticeLine> = dirs.iter().map(|d| LatticeLine::new(xi, *d)).collect::<Result<_>>()?;
        let s = incidence::crossing_incidence_count(&xi, &lines, &lines)?;
        let mut naive = 0u64;
        for a in dirs {
            for b in dirs {
                if crossing_form(a, b)? == 0 {
                    naive += 1;
                }
            }
        }
        if s.direct != naive || !s.consistent() {
            failures.push(format!("crossing {name}: {} vs {naive}", s.direct));
        }
        let v = incidence::szemeredi_trotter_ratio(s.direct, lines.len(), lines.len());
        if v > cross_worst.1 {
            cross_worst = (name.clone(), v);
        }
    }
    c.measure("st_max_ratio", st_worst.1);
    c.measure("st_argmax", &st_worst.0);
    c.measure("rich_max_ratio", rich_worst.1);
    c.measure("rich_argmax", &rich_worst.0);
    c.measure("crossing_max_ratio", cross_worst.1);
    c.measure("crossing_argmax", &cross_worst.0);
    c.measure("sphere_incidences", sphere_total);
    c.limit("c_st", k.c_st);
    c.limit("c_rich", k.c_rich);
    c.limit("c_cross", k.c_cross);
    c.require(failures.is_empty(), || failures.join("; "));
    c.require(st_worst.1 <= k.c_st, || format!("ST ratio {} on {} exceeds {}", st_worst.1, st_worst.0, k.c_st));
    c.require(rich_worst.1 <= k.c_rich, || format!("rich ratio {} on {} exceeds {}", rich_worst.1, rich_worst.0, k.c_rich));
    c.require(cross_worst.1 <= k.c_cross, || format!("crossing ratio {} on {} exceeds {}", cross_worst.1, cross_worst.0, k.c_cross));
    Ok(())
}

fn bilinear(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let mut rng = check_rng(cfg.seed, "bilinear");
    let scales = [2i64, 4, 8, 16, 32];
    let mut worst = ((0, 0), 0.0f64);
    for &n1 in &scales {
        for &n2 in &scales {
            let g1 = corpus::shell_set(&mut rng, n1, 200, WeightKind::Complex)?;
            let g2 = corpus::shell_set(&mut rng, n2, 200, WeightKind::Complex)?;
            let v = resonance::bilinear_l2(&g1, &g2, cfg.budget())?.to_f64().max(0.0).sqrt();
            let r = v / ((n1.min(n2) as f64).sqrt() * g1.l2_norm() * g2.l2_norm());
            if r > worst.1 {
                worst = ((n1, n2), r);
            }
        }
    }
    c.measure("max_ratio", worst.1);
    c.measure("argmax", worst.0);
    c.limit("c_bilin", k.c_bilin);
    c.require(worst.1 <= k.c_bilin, || format!("ratio {} at {:?} exceeds {}", worst.1, worst.0, k.c_bilin));
    Ok(())
}

fn l4_identity(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let tol = cfg.tolerances.l4_quadrature_rel;
    let mut rng = check_rng(cfg.seed, "l4_identity");
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = rng.gen_range(2..=12);
        let kind = [WeightKind::Complex, WeightKind::Unit][i % 2];
        let f = corpus::random_set(&mut rng, n, 3, kind)?;
        let f = if f.is_exact() { f.to_numeric() } else { f };
        let exact = strichartz::l4_fourth_power(&f, cfg.budget())?.to_f64();
        let quad = strichartz::l4_fourth_power_quadrature(&f)?;
        worst = worst.max((exact - quad).abs() / exact);
    }
    c.measure("max_rel_error", worst);
    c.limit("rel_tol", tol);
    c.require(worst <= tol, || format!("relative error {worst:e} exceeds {tol:e}"));
    Ok(())
}

fn illposed(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let k = &cfg.constants;
    let band = cfg.tolerances.illposed_band;
    let n = 1i64 << 12;
    let norm_ratio = hnls::illposed_norm_sq(n) / (n as f64).ln();
    let rel = (norm_ratio - 2f64.sqrt()).abs() / 2f64.sqrt();
    c.measure("norm_sq_over_log_n", norm_ratio);
    c.measure("norm_rel_deviation", rel);
    c.limit("band", band);
    c.require(rel <= band, || format!("‖φ_N‖²/log N = {norm_ratio} is {rel:.4} away from √2 (band {band})"));
    let mut ratios = Vec::new();
    for e in 4..=12 {
        let n = 1i64 << e;
        ratios.push((n, hnls::picard_ratio(n)?));
    }
    let monotone = ratios.windows(2).all(|w| w[1].1 > w[0].1);
    let min_over_log = ratios.iter().map(|&(n, r)| r / (n as f64).ln()).fold(f64::INFINITY, f64::min);
    let x: Vec<f64> = ratios.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let y: Vec<f64> = ratios.iter().map(|&(_, r)| r).collect();
    let (slope, ..) = strichartz::linear_fit(&x, &y);
    c.measure("picard_ratios", &ratios);
    c.measure("picard_min_over_log_n", min_over_log);
    c.measure("picard_slope_vs_log_n", slope);
    c.limit("c_picard", k.c_picard);
    c.require(monotone, || "picard ratio is not strictly increasing".into());
    c.require(min_over_log >= k.c_picard, || format!("min ratio/log N = {min_over_log} below {}", k.c_picard));
    c.require(slope > 0.0, || format!("slope {slope} is not positive"));
    Ok(())
}

fn integrator(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let t = &cfg.tolerances;
    let mut rng = check_rng(cfg.seed, "integrator");
    let pts = corpus::random_points(&mut rng, 12, 2);
    let f = corpus::weighted_from_points(&mut rng, pts, WeightKind::Complex)?.to_numeric_scaled(0.4);
    let state = SpectralState::new(f, 2, 0.0)?;
    let base = EvolveConfig {
        k: 1,
        sign: 1,
        dt: 1.0 / 1024.0,
        steps: 1000,
        grid: 32,
        linear_only: true,
        project: false,
        record_every: 0,
    };
    let lin = hnls::splitstep_evolve(&state, &base)?;
    let mut phase_err = 0.0f64;
    let tf = lin.state.time;
    for (p, w) in state.coefficients.entries_c64() {
        let exact = w * num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (tf * p.h() as f64).fract());
        phase_err = phase_err.max((lin.state.coefficients.weight_at(&p) - exact).norm());
    }
    let full = hnls::splitstep_evolve(&state, &EvolveConfig { linear_only: false, record_every: 100, ..base })?;
    let m0 = state.mass();
    let drift = full.diagnostics.iter().map(|d| (d.mass - m0).abs() / m0).fold(0.0, f64::max);
    let conv = hnls::splitstep_convergence(&state, &EvolveConfig { linear_only: false, grid: 16, dt: 1.0 / 256.0, steps: 16, ..base }, 32)?;
    c.measure("linear_phase_error", phase_err);
    c.measure("mass_drift", drift);
    c.measure("contraction", conv.contraction);
    c.measure("error_dt", conv.error_dt);
    c.limit("linear_phase", t.linear_phase);
    c.limit("mass_drift", t.mass_drift);
    c.limit("min_contraction", t.min_contraction);
    c.require(phase_err <= t.linear_phase, || format!("linear phase error {phase_err:e}"));
    c.require(drift <= t.mass_drift, || format!("mass drift {drift:e}"));
    c.require(conv.contraction >= t.min_contraction, || format!("contraction {}", conv.contraction));
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodBadGolden {
    pub n: i64,
    pub delta: f64,
    pub c_threshold: f64,
    pub m: i64,
    /// `(j, size, good, heavy planes, bad points, Ω₂)` per block.
    pub blocks: Vec<(u32, usize, bool, usize, usize, String)>,
    pub f_bad_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Goldens {
    /// `‖u‖⁴_{L⁴}` of the normalized cube extremizer at `N = 2`.
    pub cube2_l4_fourth: String,
    pub picard_r16: f64,
    pub cube8_good_bad: GoodBadGolden,
}

pub fn compute_goldens(cfg: &SuiteConfig) -> Result<Goldens> {
    let e = extremizer(ExtremizerSpec { kind: ExtremizerKind::Cube, n: 2 })?;
    let x2 = e.l4_fourth_power(cfg.budget())?;
    let cube8 = extremizer(ExtremizerSpec { kind: ExtremizerKind::Cube, n: 8 })?;
    let (delta, c_threshold) = (0.1, 1.0);
    let split = strichartz::good_bad_split(&cube8.support, 8, delta, c_threshold, &cfg.resonance())?;
    Ok(Goldens {
        cube2_l4_fourth: Scalar::Exact(x2).to_string(),
        picard_r16: hnls::picard_ratio(16)?,
        cube8_good_bad: GoodBadGolden {
            n: split.n,
            delta,
            c_threshold,
            m: split.m,
            blocks: split
                .blocks
                .iter()
                .map(|b| (b.j, b.size, b.good, b.heavy_planes, b.bad_points, b.omega2.to_string()))
                .collect(),
            f_bad_size: split.f_bad_size,
        },
    })
}

pub fn write_goldens(cfg: &SuiteConfig, path: &Path) -> Result<Goldens> {
    let g = compute_goldens(cfg)?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(&g)? + "\n")?;
    Ok(g)
}

fn goldens(cfg: &SuiteConfig, c: &mut Check) -> Result<()> {
    let text = match std::fs::read_to_string(&cfg.goldens) {
        Ok(t) => t,
        Err(_) => {
            c.require(false, || format!("golden missing: {}", cfg.goldens.display()));
            return Ok(());
        }
    };
    let want: Goldens = serde_json::from_str(&text)?;
    let got = compute_goldens(cfg)?;
    let tol = cfg.tolerances.golden_rel;
    c.measure("cube2_l4_fourth", &got.cube2_l4_fourth);
    c.measure("picard_r16", got.picard_r16);
    c.measure("cube8_f_bad_size", got.cube8_good_bad.f_bad_size);
    c.limit("golden_rel", tol);
    c.require(got.cube2_l4_fourth == want.cube2_l4_fourth, || {
        format!("cube2 L⁴: {} vs golden {}", got.cube2_l4_fourth, want.cube2_l4_fourth)
    });
    let rel = (got.picard_r16 - want.picard_r16).abs() / want.picard_r16.abs();
    c.require(rel <= tol, || format!("r16 {} vs golden {} (rel {rel:e})", got.picard_r16, want.picard_r16));
    c.require(got.cube8_good_bad == want.cube8_good_bad, || "cube N=8 good/bad split differs from golden".into());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips_through_toml() {
        let cfg = SuiteConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = SuiteConfig::from_toml(&text).unwrap();
        assert_eq!(back.constants.c_main, cfg.constants.c_main);
        assert_eq!(back.runtime, cfg.runtime);
        let partial = SuiteConfig::from_toml("seed = 5\n[tolerances]\nl4_quadrature_rel = 0.0\n").unwrap();
        assert_eq!(partial.seed, 5);
        assert_eq!(partial.tolerances.l4_quadrature_rel, 0.0);
        assert_eq!(partial.tolerances.mass_drift, 1e-8);
        assert!(SuiteConfig::from_toml("bogus = 1\n").is_err());
    }

    #[test]
    fn zero_tolerance_fails_the_named_check() {
        let cfg = SuiteConfig {
            tolerances: Tolerances {
                l4_quadrature_rel: 0.0,
                ..Tolerances::default()
            },
            ..SuiteConfig::default()
        };
        let r = run_check("l4_identity", &cfg).unwrap();
        assert!(!r.passed);
        assert_eq!(r.name, "l4_identity");
    }

    #[test]
    fn missing_golden_is_reported() {
        let cfg = SuiteConfig {
            goldens: PathBuf::from("/nonexistent/goldens.json"),
            ..SuiteConfig::default()
        };
        let r = run_check("goldens", &cfg).unwrap();
        assert!(!r.passed);
        assert!(r.failures[0].starts_with("golden missing"));
    }

    #[test]
    fn unknown_checks_are_rejected() {
        assert!(run_check("nope", &SuiteConfig::default()).is_err());
        let cfg = SuiteConfig {
            checks: vec!["nope".into()],
            ..SuiteConfig::default()
        };
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn quick_checks_pass() {
        let cfg = SuiteConfig {
            checks: vec!["line_closed_form".into(), "l4_identity".into()],
            ..SuiteConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed, "{:?}", r.failed());
        assert_eq!(r.checks.len(), 2);
    }
}
