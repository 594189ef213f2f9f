//! Resonant quadruple sums `Ω`, `Ω₁`, `Ω₂` and the bucket machinery behind
//! them.
//!
//! `Q` is the set of `(ξ₁, ξ₂, ξ₃, ξ₄)` with `ξ₁ + ξ₃ = ξ₂ + ξ₄` and
//! `h(ξ₁) + h(ξ₃) = h(ξ₂) + h(ξ₄)`; `Q₂` those with `ξ₁ − ξ₂` or `ξ₁ − ξ₄` on
//! the cone (zero included), `Q₁` the rest. Degenerate quadruples count.
//!
//! Exact-mode sums run in `i128` on weights scaled by the lcm of their
//! denominators. Numeric-mode resonance sums use the moduli `|w|`.

pub mod bucket;
pub mod cone_side;
pub mod kernel;
pub mod planes;

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{cone_contains, exact_sqrt, LatticePoint, Plane};
use crate::weighted::{Scalar, Weight, WeightedSet};

pub use bucket::BucketTable;
pub use kernel::{KSet, KernelStats};
pub use planes::{error_part, heavy_planes, HeavyPlane};

/// Default bound on kernel work (pair operations).
pub const DEFAULT_BUDGET: u128 = 10_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Bucketed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceReport {
    pub omega: Scalar,
    pub omega1: Scalar,
    pub omega2: Scalar,
    pub bucket_count: u64,
    pub max_bucket_size: u64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct ResonanceConfig {
    pub budget: u128,
    /// Record wall time in the report (off by default so reports are
    /// reproducible byte for byte).
    pub timing: bool,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        ResonanceConfig {
            budget: DEFAULT_BUDGET,
            timing: false,
        }
    }
}

/// Kernel-ready weights for the four inputs, shared mode.
enum Prepared {
    Exact {
        w: Vec<Vec<i128>>,
        scale: BigInt,
    },
    Numeric {
        w: Vec<Vec<f64>>,
    },
}

fn prepare(fs: &[&WeightedSet]) -> Result<Prepared> {
    if fs.iter().all(|f| f.is_exact()) {
        let mut w = Vec::new();
        let mut scale = BigInt::one();
        let mut bound = BigInt::one();
        for f in fs {
            let (v, l) = f.scaled_integers()?;
            let s: i128 = v.iter().try_fold(0i128, |a, &x| a.checked_add(x)).ok_or_else(|| {
                Error::Overflow("weight sum".into())
            })?;
            bound *= BigInt::from(s.max(1));
            scale *= l;
            w.push(v);
        }
        // every partial sum is dominated by the product of the weight sums
        if bound > BigInt::from(i128::MAX / 8) {
            return Err(Error::Overflow(format!(
                "product of scaled weight sums {bound} exceeds the 128-bit range"
            )));
        }
        Ok(Prepared::Exact { w, scale })
    } else {
        Ok(Prepared::Numeric {
            w: fs.iter().map(|f| f.modulus_weights()).collect(),
        })
    }
}

fn exact_scalar(v: i128, scale: &BigInt) -> Scalar {
    Scalar::Exact(BigRational::new(BigInt::from(v), scale.clone()))
}

fn finish(
    omega: Scalar,
    omega2: Scalar,
    stats: KernelStats,
    method: Method,
    started: Instant,
    cfg: &ResonanceConfig,
) -> ResonanceReport {
    let omega1 = &omega - &omega2;
    ResonanceReport {
        omega,
        omega1,
        omega2,
        bucket_count: stats.bucket_count,
        max_bucket_size: stats.max_bucket_size,
        method,
        elapsed_ms: cfg.timing.then(|| started.elapsed().as_secs_f64() * 1e3),
    }
}

/// Quadruple loop over the four supports.
pub fn omega_oracle(fs: [&WeightedSet; 4], cfg: &ResonanceConfig) -> Result<ResonanceReport> {
    let started = Instant::now();
    let work = fs.iter().map(|f| f.len() as u128).product::<u128>();
    let budget = cfg.budget.min(DEFAULT_BUDGET);
    if work > budget {
        return Err(Error::Budget {
            work,
            budget,
            detail: "quadruple loop of the oracle".into(),
        });
    }
    let pts: Vec<&[LatticePoint]> = fs.iter().map(|f| f.points()).collect();
    let (omega, omega2, buckets) = match prepare(&fs)? {
        Prepared::Exact { w, scale } => {
            let (o, o2, b) = oracle_loop(&pts, &w);
            (exact_scalar(o, &scale), exact_scalar(o2, &scale), b)
        }
        Prepared::Numeric { w } => {
            let (o, o2, b) = oracle_loop(&pts, &w);
            (Scalar::Numeric(o), Scalar::Numeric(o2), b)
        }
    };
    let stats = KernelStats {
        bucket_count: buckets.0,
        max_bucket_size: buckets.1,
        pair_ops: 0,
    };
    Ok(finish(omega, omega2, stats, Method::Oracle, started, cfg))
}

fn oracle_loop<W: Weight>(pts: &[&[LatticePoint]], w: &[Vec<W>]) -> (W, W, (u64, u64)) {
    let mut all = Vec::new();
    let mut cone_part = Vec::new();
    for (i1, x1) in pts[0].iter().enumerate() {
        let mut acc = W::default();
        let mut acc2 = W::default();
        for (i2, x2) in pts[1].iter().enumerate() {
            let w12 = w[0][i1] * w[1][i2];
            let d = *x1 - *x2;
            let d_on_cone = cone_contains(&d);
            for (i3, x3) in pts[2].iter().enumerate() {
                let w123 = w12 * w[2][i3];
                let target = *x1 + *x3 - *x2;
                let hb = x1.h() + x3.h() - x2.h();
                for (i4, x4) in pts[3].iter().enumerate() {
                    if *x4 != target || x4.h() != hb {
                        continue;
                    }
                    let v = w123 * w[3][i4];
                    acc += v;
                    if d_on_cone || cone_contains(&(*x1 - *x4)) {
                        acc2 += v;
                    }
                }
            }
        }
        all.push(acc);
        cone_part.push(acc2);
    }
    // bucket statistics of the (f1, f3) pair-sum
    let mut counts = rustc_hash::FxHashMap::<(LatticePoint, i64), u64>::default();
    for x1 in pts[0] {
        for x3 in pts[2] {
            *counts.entry((*x1 + *x3, x1.h() + x3.h())).or_default() += 1;
        }
    }
    let max = counts.values().copied().max().unwrap_or(0);
    (
        W::sum_ordered(&all),
        W::sum_ordered(&cone_part),
        (counts.len() as u64, max),
    )
}

/// `Ω` from the `(a, b)` pair-sums, `Ω₂` from the cone-side count.
pub fn omega_bucketed(fs: [&WeightedSet; 4], cfg: &ResonanceConfig) -> Result<ResonanceReport> {
    let started = Instant::now();
    let (omega, omega2, stats) = match prepare(&fs)? {
        Prepared::Exact { w, scale } => {
            let (o, o2, s) = bucketed_parts(&fs, &w, cfg.budget)?;
            (exact_scalar(o, &scale), exact_scalar(o2, &scale), s)
        }
        Prepared::Numeric { w } => {
            let (o, o2, s) = bucketed_parts(&fs, &w, cfg.budget)?;
            (Scalar::Numeric(o), Scalar::Numeric(o2), s)
        }
    };
    Ok(finish(omega, omega2, stats, Method::Bucketed, started, cfg))
}

fn bucketed_parts<W: Weight>(fs: &[&WeightedSet; 4], w: &[Vec<W>], budget: u128) -> Result<(W, W, KernelStats)> {
    let k: Vec<KSet<'_, W>> = (0..4).map(|i| KSet::new(fs[i].points(), &w[i])).collect();
    let (omega, stats) = kernel::cross_sum(&k[0], &k[1], &k[2], &k[3], budget)?;
    let (omega2, _) = cone_side::omega2(
        &k[0],
        &k[1],
        &k[2],
        &k[3],
        budget.saturating_sub(stats.pair_ops),
    )?;
    Ok((omega, omega2, stats))
}

/// `Ω(f) = Ω(f, f, f, f)`.
pub fn omega_single_bucketed(f: &WeightedSet, cfg: &ResonanceConfig) -> Result<ResonanceReport> {
    omega_bucketed([f, f, f, f], cfg)
}

pub fn omega_single_oracle(f: &WeightedSet, cfg: &ResonanceConfig) -> Result<ResonanceReport> {
    omega_oracle([f, f, f, f], cfg)
}

/// `Ω₂(f)` alone.
pub fn omega2_single(f: &WeightedSet, cfg: &ResonanceConfig) -> Result<Scalar> {
    Ok(match prepare(&[f, f, f, f])? {
        Prepared::Exact { w, scale } => {
            let k = KSet::new(f.points(), &w[0]);
            let (v, _) = cone_side::omega2(&k, &k, &k, &k, cfg.budget)?;
            exact_scalar(v, &scale)
        }
        Prepared::Numeric { w } => {
            let k = KSet::new(f.points(), &w[0]);
            Scalar::Numeric(cone_side::omega2(&k, &k, &k, &k, cfg.budget)?.0)
        }
    })
}

/// `Ω(f)` alone, without the cone-side split.
pub fn omega_total(f: &WeightedSet, budget: u128) -> Result<Scalar> {
    Ok(match prepare(&[f, f, f, f])? {
        Prepared::Exact { w, scale } => {
            let k = KSet::new(f.points(), &w[0]);
            exact_scalar(kernel::square_sum(&k, &k, budget)?.0, &scale)
        }
        Prepared::Numeric { w } => {
            let k = KSet::new(f.points(), &w[0]);
            Scalar::Numeric(kernel::square_sum(&k, &k, budget)?.0)
        }
    })
}

/// Largest admissible box half-width for [`slice_a`].
pub const SLICE_SCAN_BOUND: i64 = 256;

/// `A_{a,b} ∩ [−N, N]³` with `A_{a,b} = {ξ : h(ξ) + h(a − ξ) = b}`.
pub fn slice_a(a: LatticePoint, b: i64, n: i64) -> Result<Vec<LatticePoint>> {
    a.check_bound()?;
    if !(0..=SLICE_SCAN_BOUND).contains(&n) {
        return Err(Error::out_of_range("N", n, "0 ≤ N ≤ 256"));
    }
    let (a1, a2, a3) = (a.0[0] as i128, a.0[1] as i128, a.0[2] as i128);
    let b = b as i128;
    let mut out = Vec::new();
    for x1 in -n..=n {
        for x2 in -n..=n {
            let (y1, y2) = (x1 as i128, x2 as i128);
            let r = y1 * y1 - y2 * y2 + (a1 - y1).pow(2) - (a2 - y2).pow(2);
            // 2x₃² − 2a₃x₃ + (a₃² + b − r) = 0
            let disc = 8 * (r - b) - 4 * a3 * a3;
            let Some(s) = exact_sqrt(disc) else {
                continue;
            };
            let mut roots = vec![2 * a3 + s, 2 * a3 - s];
            roots.dedup();
            for num in roots {
                if num % 4 == 0 {
                    let x3 = num / 4;
                    if x3.abs() <= n as i128 {
                        out.push(LatticePoint::new(x1, x2, x3 as i64));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `‖u₁u₂‖²_{L²([0,1]×T³)} = Σ_{a,b} |P_{g₁g₂}(a, b)|²`, exact when both
/// inputs are.
pub fn bilinear_l2(g1: &WeightedSet, g2: &WeightedSet, budget: u128) -> Result<Scalar> {
    if g1.is_exact() && g2.is_exact() {
        let (w1, l1) = g1.scaled_integers()?;
        let (w2, l2) = g2.scaled_integers()?;
        let bound = w1.iter().sum::<i128>().checked_mul(w2.iter().sum::<i128>());
        match bound.and_then(|b| b.checked_mul(b)) {
            Some(_) => {}
            None => return Err(Error::Overflow("bilinear pair-sum".into())),
        }
        let (v, _) = kernel::square_sum(&KSet::new(g1.points(), &w1), &KSet::new(g2.points(), &w2), budget)?;
        let s = &l1 * &l2;
        Ok(exact_scalar(v, &(&s * &s)))
    } else {
        let w1 = g1.complex_weights();
        let w2 = g2.complex_weights();
        let (v, _) = kernel::square_sum(&KSet::new(g1.points(), &w1), &KSet::new(g2.points(), &w2), budget)?;
        Ok(Scalar::Numeric(v.re))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaneRestrictedOmega1 {
    pub omega1: Scalar,
    pub bound: f64,
    pub ratio: f64,
    pub report: ResonanceReport,
}

/// `Ω₁(f₁,…,f₄)` for data on cone-normal planes, against
/// `M²N^{1/2}(M² + N^{1/4}) Π‖f_i‖`.
pub fn omega1_plane_restricted(
    fs: [&WeightedSet; 4],
    planes: [Plane; 4],
    n: i64,
    m: i64,
    cfg: &ResonanceConfig,
) -> Result<PlaneRestrictedOmega1> {
    for (f, h) in fs.iter().zip(&planes) {
        let normal = h.normal();
        if !cone_contains(&normal) || normal.norm_sq() > m * m {
            return Err(Error::Support(format!(
                "normal {normal:?} is not in the primitive cone catalog of radius {m}"
            )));
        }
        for p in f.points() {
            if !h.contains(p) || p.0.iter().any(|c| c.abs() > n) {
                return Err(Error::Support(format!(
                    "{p:?} lies outside the plane {normal:?}·ξ = {} or the box of radius {n}",
                    h.offset()
                )));
            }
        }
    }
    let report = omega_bucketed(fs, cfg)?;
    let (m, nf) = (m as f64, n as f64);
    let norms: f64 = fs.iter().map(|f| f.l2_norm()).product();
    let bound = m * m * nf.sqrt() * (m * m + nf.powf(0.25)) * norms;
    let omega1 = report.omega1.clone();
    let ratio = if bound > 0.0 { omega1.to_f64() / bound } else { 0.0 };
    Ok(PlaneRestrictedOmega1 {
        omega1,
        bound,
        ratio,
        report,
    })
}
