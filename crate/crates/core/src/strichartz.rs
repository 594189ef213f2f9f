//! Space-time `L⁴` norms of linear evolutions, the extremizer families, and
//! the rank-dyadic decompositions used to bound them.
//!
//! The propagator multiplies mode `ξ` by `e^{2πi t h(ξ)}`, so one time
//! period is `t ∈ [0, 1]` and
//! `‖u‖⁴_{L⁴([0,1]×T³)} = Σ_{a,b} |Σ_{ξ+η=a, h(ξ)+h(η)=b} f(ξ)f(η)|²`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::resonance::{self, heavy_planes, kernel, KSet, ResonanceConfig};
use crate::spectral::Fft3;
use crate::weighted::{Scalar, WeightedSet};

/// `μ(p) = max(3/2 − 5/p, 1/2 − 1/p)`.
pub fn mu(p: f64) -> Result<f64> {
    if p.is_nan() || p < 2.0 {
        return Err(Error::out_of_range("p", p, "p ≥ 2"));
    }
    if p.is_infinite() {
        return Ok(1.5);
    }
    Ok((1.5 - 5.0 / p).max(0.5 - 1.0 / p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremizerKind {
    Cube,
    Line,
    Product,
}

impl std::str::FromStr for ExtremizerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cube" => Ok(ExtremizerKind::Cube),
            "line" => Ok(ExtremizerKind::Line),
            "product" => Ok(ExtremizerKind::Product),
            _ => Err(Error::Invalid(format!(
                "unknown extremizer kind '{s}' (expected cube, line or product)"
            ))),
        }
    }
}

impl ExtremizerKind {
    pub fn max_n(self) -> i64 {
        match self {
            ExtremizerKind::Cube => 64,
            ExtremizerKind::Line => 100_000,
            ExtremizerKind::Product => 1_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremizerSpec {
    pub kind: ExtremizerKind,
    pub n: i64,
}

/// A constant-amplitude datum `a·χ_S`. `a²` is rational for every family,
/// so `‖f‖²` and `Ω(f) = a⁴ Ω(χ_S)` stay exact.
#[derive(Clone, Debug)]
pub struct Extremizer {
    pub spec: ExtremizerSpec,
    pub support: WeightedSet,
    pub amplitude_sq: BigRational,
}

pub fn extremizer(spec: ExtremizerSpec) -> Result<Extremizer> {
    let n = spec.n;
    if !(1..=spec.kind.max_n()).contains(&n) {
        return Err(Error::out_of_range("N", n, "1 ≤ N ≤ family bound (cube 64, line 10^5, product 10^3)"));
    }
    let (points, amp_sq): (Vec<LatticePoint>, BigRational) = match spec.kind {
        ExtremizerKind::Cube => (
            (-n..=n)
                .flat_map(|a| (-n..=n).flat_map(move |b| (-n..=n).map(move |c| LatticePoint::new(a, b, c))))
                .collect(),
            BigRational::new(BigInt::one(), BigInt::from(n).pow(3)),
        ),
        ExtremizerKind::Line => (
            (1..=n).map(|k| LatticePoint::new(k, k, 0)).collect(),
            BigRational::new(BigInt::one(), BigInt::from(n)),
        ),
        ExtremizerKind::Product => (
            (1..=n).flat_map(|x| (1..=n).map(move |y| LatticePoint::new(x, x, y))).collect(),
            BigRational::new(BigInt::one(), BigInt::from(n).pow(2)),
        ),
    };
    Ok(Extremizer {
        spec,
        support: WeightedSet::characteristic(points)?,
        amplitude_sq: amp_sq,
    })
}

impl Extremizer {
    pub fn amplitude(&self) -> f64 {
        self.amplitude_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// The Fourier coefficients as numeric weights.
    pub fn weighted_set(&self) -> WeightedSet {
        self.support.to_numeric_scaled(self.amplitude())
    }

    pub fn l2_norm_sq(&self) -> BigRational {
        &self.amplitude_sq * BigRational::from_integer(BigInt::from(self.support.len()))
    }

    /// `Ω(χ_S)`.
    pub fn omega_support(&self, budget: u128) -> Result<i128> {
        let w = vec![1i128; self.support.len()];
        let k = KSet::new(self.support.points(), &w);
        Ok(kernel::square_sum(&k, &k, budget)?.0)
    }

    /// `‖u‖⁴_{L⁴} = a⁴ Ω(χ_S)`.
    pub fn l4_fourth_power(&self, budget: u128) -> Result<BigRational> {
        let om = self.omega_support(budget)?;
        Ok(&self.amplitude_sq * &self.amplitude_sq * BigRational::from_integer(BigInt::from(om)))
    }

    pub fn l4_norm(&self, budget: u128) -> Result<f64> {
        Ok(self.l4_fourth_power(budget)?.to_f64().unwrap_or(f64::NAN).powf(0.25))
    }
}

/// `Σ_{a,b} |G(a, b)|²`: exact for exact weights, otherwise complex.
pub fn l4_fourth_power(f: &WeightedSet, budget: u128) -> Result<Scalar> {
    if f.is_exact() {
        resonance::omega_total(f, budget)
    } else {
        let w = f.complex_weights();
        let k = KSet::new(f.points(), &w);
        Ok(Scalar::Numeric(kernel::square_sum(&k, &k, budget)?.0.re))
    }
}

pub fn l4_norm_exact(f: &WeightedSet, budget: u128) -> Result<f64> {
    Ok(l4_fourth_power(f, budget)?.to_f64().max(0.0).powf(0.25))
}

/// `∫₀¹∫_{T³} |u|⁴` by sampling on a uniform grid fine enough that the mean
/// of the trigonometric polynomial `|u|⁴` is exact.
pub fn l4_fourth_power_quadrature(f: &WeightedSet) -> Result<f64> {
    let Some((lo, hi)) = f.support_box() else {
        return Ok(0.0);
    };
    let width = (0..3).map(|i| hi.0[i] - lo.0[i]).max().unwrap_or(0);
    let g = (2 * width + 1).max(1) as usize;
    let hs: Vec<i64> = f.points().iter().map(|p| p.h()).collect();
    let hspan = hs.iter().max().unwrap() - hs.iter().min().unwrap();
    let nt = (2 * hspan + 1) as usize;
    if g > 256 || nt > 1 << 16 {
        return Err(Error::Invalid(format!(
            "quadrature grid {g}³ × {nt} is too large"
        )));
    }
    let fft = Fft3::new(g);
    let mut buf = vec![Complex64::new(0.0, 0.0); fft.len()];
    let mut per_t = Vec::with_capacity(nt);
    for j in 0..nt {
        let t = j as f64 / nt as f64;
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (i, (p, w)) in f.entries_c64().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * ((hs[i] as f64 * t).fract());
            buf[fft.index(&p)] += w * Complex64::from_polar(1.0, phase);
        }
        fft.inverse(&mut buf);
        let v: Vec<f64> = buf.iter().map(|z| z.norm_sqr() * z.norm_sqr()).collect();
        per_t.push(crate::weighted::neumaier_sum(&v) / fft.len() as f64);
    }
    Ok(crate::weighted::neumaier_sum(&per_t) / nt as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingPoint {
    pub n: i64,
    pub l4: f64,
    pub l2: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingFit {
    pub kind: ExtremizerKind,
    pub p: f64,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub residuals: Vec<f64>,
    pub points: Vec<ScalingPoint>,
}

/// Least-squares `y = a + b x`; returns `(b, a, stderr(b), residuals)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res: Vec<f64> = x.iter().zip(y).map(|(u, v)| v - (a + b * u)).collect();
    let sse: f64 = res.iter().map(|r| r * r).sum();
    let se = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (b, a, se, res)
}

/// Slope of `log(‖u‖_{L⁴}/‖f‖)` against `log N` for one family.
pub fn scaling_exponent(kind: ExtremizerKind, p: f64, ns: &[i64], budget: u128) -> Result<ScalingFit> {
    if p != 4.0 {
        return Err(Error::Invalid("only p = 4 norms are computed exactly".into()));
    }
    let mut distinct = ns.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Invalid(format!(
            "scaling fit needs at least 2 distinct values of N, got {}",
            distinct.len()
        )));
    }
    let mut points = Vec::new();
    for &n in ns {
        let e = extremizer(ExtremizerSpec { kind, n })?;
        let l4 = e.l4_norm(budget)?;
        let l2 = e.l2_norm_sq().to_f64().unwrap().sqrt();
        points.push(ScalingPoint {
            n,
            l4,
            l2,
            ratio: l4 / l2,
        });
    }
    let x: Vec<f64> = points.iter().map(|q| (q.n as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|q| q.ratio.ln()).collect();
    let (slope, intercept, stderr, residuals) = linear_fit(&x, &y);
    Ok(ScalingFit {
        kind,
        p,
        slope,
        intercept,
        stderr,
        residuals,
        points,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomicBlock {
    pub j: u32,
    pub points: Vec<LatticePoint>,
    /// `f(ξ_{2^j})`.
    pub level: Scalar,
    /// `λ_j = 2^{j/2}·level`.
    pub lambda: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomicDecomposition {
    pub blocks: Vec<AtomicBlock>,
    pub j_max: u32,
}

impl AtomicDecomposition {
    pub fn lambda_sq_sum(&self) -> f64 {
        self.blocks.iter().map(|b| b.lambda * b.lambda).sum()
    }

    /// `Σ λ_j²` exactly, for exact levels.
    pub fn lambda_sq_sum_exact(&self) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for b in &self.blocks {
            let l = b.level.exact()?;
            acc += l * l * BigRational::from_integer(BigInt::from(2).pow(b.j));
        }
        Some(acc)
    }

    /// `f_j = level_j χ_{S_j}`, in the mode of the levels.
    pub fn block_function(&self, j: usize) -> Result<WeightedSet> {
        let b = &self.blocks[j];
        match &b.level {
            Scalar::Exact(l) => WeightedSet::from_exact(b.points.iter().map(|&p| (p, l.clone()))),
            Scalar::Numeric(l) => WeightedSet::from_numeric(b.points.iter().map(|&p| (p, Complex64::new(*l, 0.0)))),
        }
    }
}

/// Rank-dyadic blocks of `|f|`: sorted by weight descending, ties broken by
/// ascending coordinates; block `j` holds ranks `[2^j, 2^{j+1})`.
pub fn atomic_decomposition(f: &WeightedSet) -> Result<AtomicDecomposition> {
    if f.is_empty() {
        return Err(Error::Invalid("atomic decomposition of an empty function".into()));
    }
    let mut order: Vec<usize> = (0..f.len()).collect();
    let levels: Vec<Scalar> = match f.exact_weights() {
        Some(w) => {
            order.sort_by(|&a, &b| w[b].cmp(&w[a]).then(f.points()[a].cmp(&f.points()[b])));
            order.iter().map(|&i| Scalar::Exact(w[i].clone())).collect()
        }
        None => {
            let w = f.modulus_weights();
            order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(f.points()[a].cmp(&f.points()[b])));
            order.iter().map(|&i| Scalar::Numeric(w[i])).collect()
        }
    };
    let mut blocks = Vec::new();
    let mut j = 0u32;
    loop {
        let start = (1usize << j) - 1;
        if start >= order.len() {
            break;
        }
        let end = ((1usize << (j + 1)) - 1).min(order.len());
        let level = levels[start].clone();
        let lambda = 2f64.powf(j as f64 / 2.0) * level.to_f64();
        blocks.push(AtomicBlock {
            j,
            points: order[start..end].iter().map(|&i| f.points()[i]).collect(),
            level,
            lambda,
        });
        j += 1;
    }
    Ok(AtomicDecomposition {
        j_max: j - 1,
        blocks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSplit {
    pub j: u32,
    pub size: usize,
    pub level: Scalar,
    pub omega: Scalar,
    pub omega1: Scalar,
    pub omega2: Scalar,
    pub threshold: f64,
    pub good: bool,
    pub heavy_planes: usize,
    /// Points of the block moved into `f_bad`.
    pub bad_points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodBadSplit {
    pub n: i64,
    pub delta: f64,
    pub c_threshold: f64,
    pub m: i64,
    pub blocks: Vec<BlockSplit>,
    #[serde(skip)]
    pub f_bad: WeightedSet,
    #[serde(skip)]
    pub good_parts: Vec<WeightedSet>,
    pub f_bad_size: usize,
    /// `Σ_j f_j^good + f_bad ≥ f` pointwise.
    pub dominates: bool,
}

/// Heavy-plane parameter `⌈N^δ⌉`, at least 2.
pub fn heavy_plane_radius(n: i64, delta: f64) -> i64 {
    let target = delta * (n as f64).ln();
    let mut m = target.exp().ceil() as i64;
    // an exact integer power can land a rounding error above the integer
    while m > 1 && ((m - 1) as f64).ln() >= target - 1e-12 {
        m -= 1;
    }
    m.max(2)
}

pub fn good_bad_split(f: &WeightedSet, n: i64, delta: f64, c_threshold: f64, cfg: &ResonanceConfig) -> Result<GoodBadSplit> {
    if n < 1 {
        return Err(Error::out_of_range("N", n, "N ≥ 1"));
    }
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::out_of_range("delta", delta, "0 < δ < 1/4"));
    }
    if !(c_threshold > 0.0 && c_threshold.is_finite()) {
        return Err(Error::out_of_range("c_threshold", c_threshold, "c > 0"));
    }
    if let Some(p) = f.points().iter().find(|p| p.0.iter().any(|c| c.abs() > n)) {
        return Err(Error::Support(format!("{p:?} lies outside [−{n}, {n}]³")));
    }
    let dec = atomic_decomposition(f)?;
    let m = heavy_plane_radius(n, delta);
    let mut blocks = Vec::new();
    let mut good_parts = Vec::new();
    let mut bad_entries_exact: Vec<(LatticePoint, BigRational)> = Vec::new();
    let mut bad_entries_num: Vec<(LatticePoint, Complex64)> = Vec::new();
    for (idx, b) in dec.blocks.iter().enumerate() {
        let chi = WeightedSet::characteristic(b.points.iter().copied())?;
        let r = resonance::omega_single_bucketed(&chi, cfg)?;
        let level4 = level_pow4(&b.level);
        let size = b.points.len();
        // Ω₂(f_j) ≤ c N^{1−δ} ‖f_j‖⁴ with f_j = level·χ reduces to the support
        let threshold = c_threshold * (n as f64).powf(1.0 - delta) * (size as f64).powi(2);
        let good = r.omega2.to_f64() <= threshold;
        let fj = dec.block_function(idx)?;
        let (good_part, heavy) = if good {
            (fj.clone(), 0)
        } else {
            let planes = heavy_planes(&fj, m)?;
            (resonance::planes::off_planes(&fj, &planes), planes.len())
        };
        let bad_points = fj.len() - good_part.len();
        for (i, p) in fj.points().iter().enumerate() {
            if good_part.index_of(p).is_none() {
                match fj.exact_weights() {
                    Some(w) => bad_entries_exact.push((*p, w[i].clone())),
                    None => bad_entries_num.push((*p, fj.weight_c64(i))),
                }
            }
        }
        blocks.push(BlockSplit {
            j: b.j,
            size,
            omega: scale_scalar(&r.omega, &level4),
            omega1: scale_scalar(&r.omega1, &level4),
            omega2: scale_scalar(&r.omega2, &level4),
            level: b.level.clone(),
            threshold,
            good,
            heavy_planes: heavy,
            bad_points,
        });
        good_parts.push(good_part);
    }
    let f_bad = if f.is_exact() {
        WeightedSet::from_exact(bad_entries_exact)?
    } else {
        WeightedSet::from_numeric(bad_entries_num)?
    };
    let dominates = dominates(f, &good_parts, &f_bad);
    Ok(GoodBadSplit {
        n,
        delta,
        c_threshold,
        m,
        f_bad_size: f_bad.len(),
        blocks,
        f_bad,
        good_parts,
        dominates,
    })
}

fn level_pow4(l: &Scalar) -> Scalar {
    match l {
        Scalar::Exact(r) => {
            let r2 = r * r;
            Scalar::Exact(&r2 * &r2)
        }
        Scalar::Numeric(x) => Scalar::Numeric(x.powi(4)),
    }
}

fn scale_scalar(v: &Scalar, c: &Scalar) -> Scalar {
    match (v, c) {
        (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
        _ => Scalar::Numeric(v.to_f64() * c.to_f64()),
    }
}

fn dominates(f: &WeightedSet, parts: &[WeightedSet], bad: &WeightedSet) -> bool {
    match f.exact_weights() {
        Some(w) => f.points().iter().zip(w).all(|(p, x)| {
            let mut acc = BigRational::zero();
            for g in parts.iter().chain(std::iter::once(bad)) {
                if let Some(i) = g.index_of(p) {
                    acc += &g.exact_weights().unwrap()[i];
                }
            }
            acc >= *x
        }),
        None => f.points().iter().enumerate().all(|(i, p)| {
            let acc: f64 = parts
                .iter()
                .chain(std::iter::once(bad))
                .map(|g| g.weight_at(p).norm())
                .sum();
            acc >= f.weight_c64(i).norm() * (1.0 - 1e-12)
        }),
    }
}

/// `‖u‖_{L⁴}/(N^{1/4}‖f‖)` with `N` the sup-norm radius of the support.
pub fn main_estimate_ratio(f: &WeightedSet, budget: u128) -> Result<f64> {
    let n = f
        .points()
        .iter()
        .map(|p| p.0.iter().map(|c| c.abs()).max().unwrap())
        .max()
        .unwrap_or(1)
        .max(1);
    Ok(l4_norm_exact(f, budget)? / ((n as f64).powf(0.25) * f.l2_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn p(a: i64, b: i64, c: i64) -> LatticePoint {
        LatticePoint::new(a, b, c)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu(2.0).unwrap(), 0.0);
        assert_eq!(mu(4.0).unwrap(), 0.25);
        assert_eq!(mu(f64::INFINITY).unwrap(), 1.5);
        assert!((mu(1e12).unwrap() - 1.5).abs() < 1e-9);
        assert!(mu(1.9).is_err());
        // corner at p = 4: both branches agree
        assert_eq!(1.5 - 5.0 / 4.0, 0.5 - 1.0 / 4.0);
    }

    #[test]
    fn extremizer_norms() {
        let line = extremizer(ExtremizerSpec { kind: ExtremizerKind::Line, n: 2 }).unwrap();
        assert_eq!(line.l2_norm_sq(), q(1, 1));
        let cube = extremizer(ExtremizerSpec { kind: ExtremizerKind::Cube, n: 2 }).unwrap();
        assert_eq!(cube.l2_norm_sq(), q(125, 8));
        let prod = extremizer(ExtremizerSpec { kind: ExtremizerKind::Product, n: 2 }).unwrap();
        assert_eq!(prod.support.len(), 4);
        assert_eq!(prod.l2_norm_sq(), q(1, 1));
        assert!(extremizer(ExtremizerSpec { kind: ExtremizerKind::Cube, n: 65 }).is_err());
    }

    #[test]
    fn l4_examples() {
        let d = WeightedSet::characteristic([p(3, 1, 4)]).unwrap();
        assert_eq!(l4_norm_exact(&d, u128::MAX).unwrap(), 1.0);
        let line = extremizer(ExtremizerSpec { kind: ExtremizerKind::Line, n: 2 }).unwrap();
        assert_eq!(line.l4_fourth_power(u128::MAX).unwrap(), q(6, 4));
        let num = l4_norm_exact(&line.weighted_set(), u128::MAX).unwrap();
        assert!((num - 1.5f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let f = WeightedSet::from_numeric((0..12).map(|_| {
                (
                    p(rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2)),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            }))
            .unwrap();
            let a = l4_fourth_power(&f, u128::MAX).unwrap().to_f64();
            let b = l4_fourth_power_quadrature(&f).unwrap();
            assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn line_scaling_is_a_quarter() {
        let fit = scaling_exponent(ExtremizerKind::Line, 4.0, &[8, 16, 32, 64], u128::MAX).unwrap();
        assert!((fit.slope - 0.25).abs() <= 0.05, "{}", fit.slope);
        assert!(scaling_exponent(ExtremizerKind::Line, 4.0, &[8], u128::MAX).is_err());
    }

    #[test]
    fn atomic_examples() {
        let f = WeightedSet::characteristic([p(0, 0, 0), p(1, 0, 0), p(2, 0, 0), p(3, 0, 0)]).unwrap();
        let d = atomic_decomposition(&f).unwrap();
        assert_eq!(d.blocks.iter().map(|b| b.points.len()).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert!(d.blocks.iter().all(|b| b.level == Scalar::Exact(q(1, 1))));

        let delta = WeightedSet::from_exact([(p(5, 5, 5), q(7, 3))]).unwrap();
        let d = atomic_decomposition(&delta).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert!((d.blocks[0].lambda - 7.0 / 3.0).abs() < 1e-15);

        let f = WeightedSet::from_exact([
            (p(0, 0, 0), q(2, 1)),
            (p(1, 0, 0), q(4, 1)),
            (p(2, 0, 0), q(1, 1)),
            (p(3, 0, 0), q(3, 1)),
        ])
        .unwrap();
        let d = atomic_decomposition(&f).unwrap();
        let levels: Vec<f64> = d.blocks.iter().map(|b| b.level.to_f64()).collect();
        assert_eq!(levels, vec![4.0, 3.0, 1.0]);
        let lambdas: Vec<f64> = d.blocks.iter().map(|b| b.lambda).collect();
        for (a, b) in lambdas.iter().zip([4.0, 3.0 * 2f64.sqrt(), 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(atomic_decomposition(&WeightedSet::empty_exact()).is_err());
    }

    #[test]
    fn atomic_bounds_on_random_data() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = rng.gen_range(1..60);
            let f = WeightedSet::from_exact((0..n).map(|_| {
                (
                    p(rng.gen_range(-9..=9), rng.gen_range(-9..=9), rng.gen_range(-9..=9)),
                    q(rng.gen_range(1..20), rng.gen_range(1..5)),
                )
            }))
            .unwrap();
            let d = atomic_decomposition(&f).unwrap();
            let norm = f.l2_norm_sq_exact().unwrap();
            assert!(d.lambda_sq_sum_exact().unwrap() <= norm * q(3, 1));
            for w in d.blocks.windows(2) {
                assert!(w[0].level.exact().unwrap() >= w[1].level.exact().unwrap());
            }
            for (b, block) in d.blocks.iter().enumerate() {
                let l = block.level.exact().unwrap();
                for x in &block.points {
                    assert!(&f.exact_weights().unwrap()[f.index_of(x).unwrap()] <= l);
                }
                assert!(block.points.len() <= 1 << b);
            }
        }
    }

    #[test]
    fn good_bad_examples() {
        let cfg = ResonanceConfig::default();
        let line = extremizer(ExtremizerSpec { kind: ExtremizerKind::Line, n: 16 }).unwrap();
        let split = good_bad_split(&line.weighted_set(), 16, 0.1, 0.01, &cfg).unwrap();
        assert!(split.blocks.iter().all(|b| !b.good));
        assert_eq!(split.f_bad_size, 16);
        assert!(split.dominates);

        let delta = WeightedSet::characteristic([p(1, 2, 3)]).unwrap();
        let split = good_bad_split(&delta, 64, 0.1, 1.0, &cfg).unwrap();
        assert_eq!(split.blocks.len(), 1);
        assert!(split.blocks[0].good);
        assert_eq!(split.f_bad_size, 0);

        assert!(good_bad_split(&delta, 2, 0.3, 1.0, &cfg).is_err());
        assert!(good_bad_split(&delta, 2, 0.1, 1.0, &cfg).is_err());
    }

    #[test]
    fn heavy_plane_radius_rounds_up() {
        assert_eq!(heavy_plane_radius(8, 0.1), 2);
        assert_eq!(heavy_plane_radius(1 << 20, 0.2), 16);
        assert_eq!(heavy_plane_radius(1, 0.1), 2);
    }
}
