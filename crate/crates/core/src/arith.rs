//! Counting oracles for the arithmetic side: points on `z² = qy + ω`, slices
//! `A_{a,b} ∩ H`, and the orthogonal frame `{n, An, n × An}` of a cone normal.

use num_integer::{Integer, Roots};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{cone_contains, LatticePoint, Plane};
use crate::resonance::slice_a;

const PARABOLA_BOUND: i128 = 1 << 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParabolaQuery {
    pub q: i64,
    pub omega: i64,
    pub n: i64,
}

impl ParabolaQuery {
    pub fn new(q: i64, omega: i64, n: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::out_of_range("q", q, "q ≥ 1"));
        }
        if n < 1 {
            return Err(Error::out_of_range("N", n, "N ≥ 1"));
        }
        if (q as i128) * (n as i128) > PARABOLA_BOUND || (omega as i128).abs() > PARABOLA_BOUND {
            return Err(Error::out_of_range("q·N, |ω|", format!("{q}·{n}, {omega}"), "≤ 2^60"));
        }
        Ok(ParabolaQuery { q, omega, n })
    }

    /// `count/(√N + √q)`.
    pub fn ratio(&self, count: u64) -> f64 {
        count as f64 / ((self.n as f64).sqrt() + (self.q as f64).sqrt())
    }
}

// Count of z ≡ r (mod q) with lo ≤ z ≤ hi.
fn count_in_class(r: i128, q: i128, lo: i128, hi: i128) -> i128 {
    if lo > hi {
        return 0;
    }
    Integer::div_floor(&(hi - r), &q) - Integer::div_floor(&(lo - 1 - r), &q)
}

fn ceil_sqrt(x: i128) -> i128 {
    if x <= 0 {
        return 0;
    }
    let r = x.sqrt();
    if r * r == x {
        r
    } else {
        r + 1
    }
}

/// `#{(y, z) ∈ [−N, N]² : z² = qy + ω}`.
pub fn count_parabola_points(query: &ParabolaQuery) -> u64 {
    let (q, w, n) = (query.q as i128, query.omega as i128, query.n as i128);
    // y ∈ [−N, N]  ⟺  z² ∈ [ω − qN, ω + qN]
    let top = w + q * n;
    if top < 0 {
        return 0;
    }
    let zmax = top.sqrt().min(n);
    let zmin = ceil_sqrt(w - q * n);
    if zmin > zmax {
        return 0;
    }
    let range = 2 * (zmax - zmin + 1);
    if range <= q {
        let mut c = 0u64;
        for z in zmin..=zmax {
            if (z * z - w).rem_euclid(q) == 0 {
                c += if z == 0 { 1 } else { 2 };
            }
        }
        return c;
    }
    let mut c = 0i128;
    for r in 0..q {
        if (r * r - w).rem_euclid(q) != 0 {
            continue;
        }
        c += count_in_class(r, q, zmin, zmax);
        c += count_in_class(r, q, -zmax, -zmin);
        if zmin == 0 && r == 0 {
            c -= 1; // z = 0 counted on both sides
        }
    }
    c as u64
}

/// Direct double loop over `(y, z)`.
pub fn count_parabola_points_naive(query: &ParabolaQuery) -> u64 {
    let (q, w, n) = (query.q, query.omega, query.n);
    let mut c = 0;
    for y in -n..=n {
        for z in -n..=n {
            if (z as i128) * (z as i128) == (q as i128) * (y as i128) + w as i128 {
                c += 1;
            }
        }
    }
    c
}

/// Number of square roots of `ω` mod `q`.
pub fn residue_roots(q: i64, omega: i64) -> usize {
    (0..q)
        .filter(|&r| ((r as i128) * (r as i128) - omega as i128).rem_euclid(q as i128) == 0)
        .count()
}

#[derive(Clone, Debug, Serialize)]
pub struct ParabolaExtreme {
    pub query: ParabolaQuery,
    pub count: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParabolaScan {
    pub trials: usize,
    pub random_max: Option<ParabolaExtreme>,
    pub adversarial_max: Option<ParabolaExtreme>,
    pub max_ratio: f64,
}

/// Random queries (`ω` uniform in `[−qN, qN]`) interleaved with adversarial
/// ones (`ω` in the residue class with the most square roots mod `q`).
pub fn parabola_bound_scan(q_max: i64, n_max: i64, trials: usize, seed: u64) -> Result<ParabolaScan> {
    if q_max < 1 || n_max < 1 {
        return Err(Error::Invalid("q_max and N_max must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // best residue class per modulus
    let best: Vec<i64> = (0..=q_max)
        .map(|q| {
            if q == 0 {
                return 0;
            }
            (0..q).max_by_key(|&w| (residue_roots(q, w), std::cmp::Reverse(w))).unwrap()
        })
        .collect();
    let mut random_max: Option<ParabolaExtreme> = None;
    let mut adversarial_max: Option<ParabolaExtreme> = None;
    let keep = |slot: &mut Option<ParabolaExtreme>, query: ParabolaQuery| {
        let count = count_parabola_points(&query);
        let ratio = query.ratio(count);
        if slot.as_ref().is_none_or(|e| ratio > e.ratio) {
            *slot = Some(ParabolaExtreme { query, count, ratio });
        }
    };
    for t in 0..trials {
        let q = rng.gen_range(1..=q_max);
        let n = rng.gen_range(1..=n_max);
        let qn = q * n;
        if t % 2 == 0 {
            let omega = rng.gen_range(-qn..=qn);
            keep(&mut random_max, ParabolaQuery::new(q, omega, n)?);
        } else {
            // shift within the best class, keeping |ω| ≤ qN
            let k = rng.gen_range(-n..=n);
            let mut omega = best[q as usize] + k * q;
            if omega > qn {
                omega -= q;
            }
            keep(&mut adversarial_max, ParabolaQuery::new(q, omega, n)?);
        }
    }
    let max_ratio = random_max
        .iter()
        .chain(adversarial_max.iter())
        .map(|e| e.ratio)
        .fold(0.0, f64::max);
    Ok(ParabolaScan {
        trials,
        random_max,
        adversarial_max,
        max_ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceCase {
    /// `a/2 ∉ H`.
    CurveCase,
    /// `a/2 ∈ H`, i.e. `n·a = 2c`.
    LineCase,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlicePlaneSize {
    pub count: usize,
    pub case: SliceCase,
    /// `M⁴N^{1/2}` in the curve case, `N` in the line case.
    pub bound: f64,
    pub ratio: f64,
    /// Distinct `ξ^⊥` components among the points (line case diagnostic).
    pub perp_classes: usize,
}

pub fn classify_slice(a: &LatticePoint, h: &Plane) -> SliceCase {
    if h.normal().dot(a) == 2 * h.offset() {
        SliceCase::LineCase
    } else {
        SliceCase::CurveCase
    }
}

/// `#(A_{a,b} ∩ H ∩ [−N, N]³)` with its case and bound ratio.
pub fn slice_plane_size(a: LatticePoint, b: i64, h: &Plane, m: i64, n: i64) -> Result<SlicePlaneSize> {
    let normal = h.normal();
    if !cone_contains(&normal) {
        return Err(Error::NotOnCone(normal));
    }
    if normal.norm_sq() > m * m {
        return Err(Error::out_of_range("|n|", normal.norm_sq(), "|n| ≤ M"));
    }
    let pts: Vec<LatticePoint> = slice_a(a, b, n)?.into_iter().filter(|p| h.contains(p)).collect();
    let case = classify_slice(&a, h);
    let bound = match case {
        SliceCase::CurveCase => (m as f64).powi(4) * (n as f64).sqrt(),
        SliceCase::LineCase => n as f64,
    };
    let axis = normal.cross_product(&normal.apply_form());
    let mut perp: Vec<i64> = pts.iter().map(|p| p.dot(&axis)).collect();
    perp.sort_unstable();
    perp.dedup();
    Ok(SlicePlaneSize {
        count: pts.len(),
        case,
        bound,
        ratio: pts.len() as f64 / bound,
        perp_classes: perp.len(),
    })
}

/// `ξ = (α/D) n + (β/D) An + ξ^⊥` with `D = |n|²` kept unreduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PerpDecomposition {
    pub denominator: i128,
    /// `ξ·n`.
    pub along_n: i128,
    /// `ξ·An`.
    pub along_an: i128,
    /// `D·ξ^⊥`.
    pub perp_numer: [i128; 3],
}

impl PerpDecomposition {
    /// `D·ξ` recomputed from the parts.
    pub fn reconstruct_scaled(&self, n: &LatticePoint) -> [i128; 3] {
        let an = n.apply_form();
        [0, 1, 2].map(|i| {
            self.along_n * n.0[i] as i128 + self.along_an * an.0[i] as i128 + self.perp_numer[i]
        })
    }
}

pub fn perp_decompose(xi: &LatticePoint, n: &LatticePoint) -> Result<PerpDecomposition> {
    xi.check_bound()?;
    n.check_bound()?;
    if n.is_zero() || !cone_contains(n) {
        return Err(Error::NotOnCone(*n));
    }
    let an = n.apply_form();
    let d = n.norm_sq() as i128;
    let a = xi.dot(n) as i128;
    let b = xi.dot(&an) as i128;
    let perp = [0, 1, 2].map(|i| d * xi.0[i] as i128 - a * n.0[i] as i128 - b * an.0[i] as i128);
    Ok(PerpDecomposition {
        denominator: d,
        along_n: a,
        along_an: b,
        perp_numer: perp,
    })
}

/// Gram matrix of `(n, An, n × An)`.
pub fn frame_gram(n: &LatticePoint) -> [[i128; 3]; 3] {
    let an = n.apply_form();
    let c = n.cross_product(&an);
    let v = [*n, an, c];
    let mut g = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (0..3).map(|k| v[i].0[k] as i128 * v[j].0[k] as i128).sum();
        }
    }
    g
}
