//! Seeded test corpora. A single 64-bit seed expands per named check by
//! `splitmix64(seed ^ fnv1a64(name))`; each check then draws from ChaCha8.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::lattice::LatticePoint;
use crate::strichartz::{extremizer, ExtremizerKind, ExtremizerSpec};
use crate::weighted::WeightedSet;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn fnv1a64(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn derive_seed(seed: u64, check: &str) -> u64 {
    splitmix64(seed ^ fnv1a64(check))
}

pub fn check_rng(seed: u64, check: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, check))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// Characteristic function.
    Unit,
    /// Exact `p/q` with `1 ≤ p ≤ 9`, `1 ≤ q ≤ 4`.
    Rational,
    /// Complex, components uniform in `[−1, 1)`.
    Complex,
}

fn random_weight(rng: &mut ChaCha8Rng, kind: WeightKind) -> (Option<BigRational>, Complex64) {
    match kind {
        WeightKind::Unit => (Some(BigRational::from_integer(1.into())), Complex64::new(1.0, 0.0)),
        WeightKind::Rational => {
            let (p, q) = (rng.gen_range(1..=9i64), rng.gen_range(1..=4i64));
            (Some(BigRational::new(p.into(), q.into())), Complex64::new(0.0, 0.0))
        }
        WeightKind::Complex => (None, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    }
}

pub fn weighted_from_points(rng: &mut ChaCha8Rng, pts: Vec<LatticePoint>, kind: WeightKind) -> Result<WeightedSet> {
    let mut exact = Vec::new();
    let mut numeric = Vec::new();
    for p in pts {
        match random_weight(rng, kind) {
            (Some(r), _) => exact.push((p, r)),
            (None, z) => numeric.push((p, z)),
        }
    }
    if kind == WeightKind::Complex {
        WeightedSet::from_numeric(numeric)
    } else {
        WeightedSet::from_exact(exact)
    }
}

/// `n` draws (duplicates merged) from `[−r, r]³`.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Vec<LatticePoint> {
    let mut v: Vec<LatticePoint> = (0..n)
        .map(|_| LatticePoint::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r), rng.gen_range(-r..=r)))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn random_set(rng: &mut ChaCha8Rng, n: usize, r: i64, kind: WeightKind) -> Result<WeightedSet> {
    let pts = random_points(rng, n, r);
    weighted_from_points(rng, pts, kind)
}

/// `[lo, hi]³`.
pub fn cube_points(lo: i64, hi: i64) -> Vec<LatticePoint> {
    let mut v = Vec::new();
    for a in lo..=hi {
        for b in lo..=hi {
            for c in lo..=hi {
                v.push(LatticePoint::new(a, b, c));
            }
        }
    }
    v
}

/// `[0, k)² × {0}`.
pub fn planar_grid(k: i64) -> Vec<LatticePoint> {
    (0..k).flat_map(|a| (0..k).map(move |b| LatticePoint::new(a, b, 0))).collect()
}

/// `{a·u + b·v : 0 ≤ a < n, 0 ≤ b < m}`.
pub fn product_points(u: LatticePoint, v: LatticePoint, n: i64, m: i64) -> Vec<LatticePoint> {
    let mut pts: Vec<LatticePoint> = (0..n).flat_map(|a| (0..m).map(move |b| u * a + v * b)).collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Points with `n ≤ |ξ| < 2n`, subsampled to at most `count`.
pub fn shell_points(rng: &mut ChaCha8Rng, n: i64, count: usize) -> Vec<LatticePoint> {
    let (lo, hi) = (n * n, 4 * n * n);
    let r = 2 * n;
    let mut all: Vec<LatticePoint> = cube_points(-r, r)
        .into_iter()
        .filter(|p| (lo..hi).contains(&p.norm_sq()))
        .collect();
    if all.len() > count {
        all.shuffle(rng);
        all.truncate(count);
        all.sort_unstable();
    }
    all
}

pub fn shell_set(rng: &mut ChaCha8Rng, n: i64, count: usize, kind: WeightKind) -> Result<WeightedSet> {
    let pts = shell_points(rng, n, count);
    weighted_from_points(rng, pts, kind)
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub name: String,
    pub set: WeightedSet,
}

fn item(name: impl Into<String>, set: WeightedSet) -> CorpusItem {
    CorpusItem { name: name.into(), set }
}

/// The structured and random sets the regression constants are measured on.
pub fn standard_corpus(seed: u64) -> Result<Vec<CorpusItem>> {
    let mut rng = check_rng(seed, "standard_corpus");
    let mut out = Vec::new();
    for n in [2, 3, 4, 6] {
        out.push(item(format!("cube{n}"), WeightedSet::characteristic(cube_points(-n, n))?));
    }
    for n in [4, 8, 16] {
        let e = extremizer(ExtremizerSpec { kind: ExtremizerKind::Line, n })?;
        out.push(item(format!("line{n}"), e.support.clone()));
        let e = extremizer(ExtremizerSpec { kind: ExtremizerKind::Product, n })?;
        out.push(item(format!("product{n}"), e.support.clone()));
    }
    for k in [4, 8, 12] {
        out.push(item(format!("grid{k}"), WeightedSet::characteristic(planar_grid(k))?));
    }
    out.push(item(
        "skew_product",
        WeightedSet::characteristic(product_points(LatticePoint::new(1, 2, 0), LatticePoint::new(0, 1, 3), 6, 5))?,
    ));
    for i in 0..8 {
        let kind = [WeightKind::Unit, WeightKind::Rational][i % 2];
        out.push(item(format!("random{i}"), random_set(&mut rng, 60, 6, kind)?));
    }
    for i in 0..4 {
        out.push(item(format!("complex{i}"), random_set(&mut rng, 60, 5, WeightKind::Complex)?));
    }
    Ok(out)
}
