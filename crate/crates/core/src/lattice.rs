//! Integer lattice `Z³` with the hyperbolic form `h(ξ) = ξ₁² − ξ₂² − ξ₃²`.
//!
//! Everything here is exact integer arithmetic. Coordinates accepted from the
//! outside are bounded by [`COORD_BOUND`] so that `h`, the crossing form and
//! the bucket keys built from them stay well inside `i64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible absolute coordinate value.
pub const COORD_BOUND: i64 = 1 << 20;

/// A frequency `ξ ∈ Z³`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct LatticePoint(pub [i64; 3]);

impl LatticePoint {
    pub const ZERO: LatticePoint = LatticePoint([0, 0, 0]);

    pub const fn new(x1: i64, x2: i64, x3: i64) -> Self {
        LatticePoint([x1, x2, x3])
    }

    /// Constructs a point, rejecting coordinates beyond [`COORD_BOUND`].
    pub fn try_new(x1: i64, x2: i64, x3: i64) -> Result<Self> {
        let p = LatticePoint([x1, x2, x3]);
        p.check_bound()?;
        Ok(p)
    }

    pub fn check_bound(&self) -> Result<()> {
        for &c in &self.0 {
            if c.unsigned_abs() > COORD_BOUND as u64 {
                return Err(Error::CoordinateBound {
                    point: self.0,
                    value: c,
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn coords(&self) -> [i64; 3] {
        self.0
    }

    #[inline]
    pub fn x1(&self) -> i64 {
        self.0[0]
    }

    #[inline]
    pub fn x2(&self) -> i64 {
        self.0[1]
    }

    #[inline]
    pub fn x3(&self) -> i64 {
        self.0[2]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    /// `h(ξ)` without the bound check; callers validate coordinates upstream.
    #[inline]
    pub fn h(&self) -> i64 {
        let [a, b, c] = self.0;
        a * a - b * b - c * c
    }

    /// `s·At` without the bound check.
    #[inline]
    pub fn cross(&self, other: &LatticePoint) -> i64 {
        self.0[0] * other.0[0] - self.0[1] * other.0[1] - self.0[2] * other.0[2]
    }

    #[inline]
    pub fn dot(&self, other: &LatticePoint) -> i64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// `Aξ` with `A = diag(1, −1, −1)`.
    #[inline]
    pub fn apply_form(&self) -> LatticePoint {
        LatticePoint([self.0[0], -self.0[1], -self.0[2]])
    }

    pub fn cross_product(&self, other: &LatticePoint) -> LatticePoint {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        LatticePoint([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    #[inline]
    pub fn norm_sq(&self) -> i64 {
        self.dot(self)
    }

    pub fn gcd(&self) -> i64 {
        self.0[0].gcd(&self.0[1]).gcd(&self.0[2])
    }

    /// Divides out the gcd and fixes the sign so the first nonzero
    /// coordinate is positive. The zero vector maps to itself.
    pub fn primitive_canonical(&self) -> LatticePoint {
        let g = self.gcd();
        if g == 0 {
            return *self;
        }
        let p = LatticePoint([self.0[0] / g, self.0[1] / g, self.0[2] / g]);
        p.canonical_sign()
    }

    pub fn canonical_sign(&self) -> LatticePoint {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => -*self,
            _ => *self,
        }
    }

    pub fn is_canonical_direction(&self) -> bool {
        !self.is_zero() && self.gcd() == 1 && self.canonical_sign() == *self
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn neg(self) -> LatticePoint {
        LatticePoint([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<i64> for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn mul(self, k: i64) -> LatticePoint {
        LatticePoint([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
}

/// `h(ξ) = ξ₁² − ξ₂² − ξ₃²`.
pub fn form_h(xi: &LatticePoint) -> Result<i64> {
    xi.check_bound()?;
    Ok(xi.h())
}

/// gcd of the absolute coordinates; `0` only for the zero vector.
pub fn gcd_point(xi: &LatticePoint) -> i64 {
    xi.gcd()
}

/// Membership in `Cone = {h = 0}`. The origin belongs to the cone.
pub fn cone_contains(xi: &LatticePoint) -> bool {
    (xi.0[0] as i128).pow(2) == (xi.0[1] as i128).pow(2) + (xi.0[2] as i128).pow(2)
}

/// `s₁t₁ − s₂t₂ − s₃t₃`.
pub fn crossing_form(s: &LatticePoint, t: &LatticePoint) -> Result<i64> {
    s.check_bound()?;
    t.check_bound()?;
    Ok(s.cross(t))
}

/// Exact floor square root for nonnegative `n`; `None` if `n` is not a square.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// A lattice plane `n·ξ = c` with primitive, canonically signed normal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Plane {
    normal: LatticePoint,
    offset: i64,
}

impl Plane {
    /// Requires a primitive normal; the sign is canonicalized (flipping the
    /// offset with it).
    pub fn new(normal: LatticePoint, offset: i64) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::ZeroVector);
        }
        normal.check_bound()?;
        if normal.gcd() != 1 {
            return Err(Error::NotPrimitive(normal));
        }
        let canon = normal.canonical_sign();
        let offset = if canon == normal { offset } else { -offset };
        Ok(Plane {
            normal: canon,
            offset,
        })
    }

    /// The plane through `point` with normal direction `dir` (any nonzero
    /// multiple of the normal).
    pub fn through(dir: LatticePoint, point: LatticePoint) -> Result<Self> {
        if dir.is_zero() {
            return Err(Error::ZeroVector);
        }
        let n = dir.primitive_canonical();
        Ok(Plane {
            normal: n,
            offset: n.dot(&point),
        })
    }

    pub fn normal(&self) -> LatticePoint {
        self.normal
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    #[inline]
    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.normal.dot(p) == self.offset
    }
}

/// `Cone^irr_M`: primitive nonzero cone points of Euclidean norm at most `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeCatalog {
    m: i64,
    points: Vec<LatticePoint>,
}

impl ConeCatalog {
    pub fn m(&self) -> i64 {
        self.m
    }

    /// Sorted lexicographically.
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// One representative per `±` pair (the canonically signed one).
    pub fn canonical_directions(&self) -> Vec<LatticePoint> {
        self.points
            .iter()
            .copied()
            .filter(|p| p.canonical_sign() == *p)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationMethod {
    BruteForce,
    Parametrized,
}

pub fn enumerate_cone_irr(m: i64, method: EnumerationMethod) -> Result<ConeCatalog> {
    if !(1..=COORD_BOUND).contains(&m) {
        return Err(Error::out_of_range("M", m, "1 ≤ M ≤ 2^20"));
    }
    let mut points = match method {
        EnumerationMethod::BruteForce => cone_irr_scan(m),
        EnumerationMethod::Parametrized => cone_irr_param(m),
    };
    points.sort_unstable();
    Ok(ConeCatalog { m, points })
}

// Scans every (x1, x2) in the box and solves for x3 exactly.
fn cone_irr_scan(m: i64) -> Vec<LatticePoint> {
    let m2 = (m as i128) * (m as i128);
    let mut out = Vec::new();
    for x1 in -m..=m {
        let x1sq = (x1 as i128) * (x1 as i128);
        if 2 * x1sq > m2 {
            continue;
        }
        for x2 in -m..=m {
            let Some(s) = exact_sqrt(x1sq - (x2 as i128) * (x2 as i128)) else {
                continue;
            };
            let s = s as i64;
            let candidates: &[i64] = if s == 0 { &[0] } else { &[s, -s] };
            for &x3 in candidates {
                let p = LatticePoint::new(x1, x2, x3);
                if !p.is_zero() && p.gcd() == 1 && (p.norm_sq() as i128) <= m2 {
                    out.push(p);
                }
            }
        }
    }
    out
}

// Coprime odd (m, n) with x_odd = ±mn and (x1, x_even) = ±((n²+m²)/2, (n²−m²)/2).
fn cone_irr_param(bound: i64) -> Vec<LatticePoint> {
    // |ξ|² = 2·x1² = (m²+n²)²/2 ≤ M²
    let lim = 2 * (bound as i128) * (bound as i128);
    let mut out = Vec::new();
    let mut a: i64 = 1;
    while ((a * a + 1) as i128).pow(2) <= lim {
        let mut b: i64 = 1;
        while ((a * a + b * b) as i128).pow(2) <= lim {
            if a.gcd(&b) == 1 {
                let param = PythagoreanParam { m: a, n: b };
                for tag in SymmetryTag::all() {
                    out.push(param.point(tag));
                }
            }
            b += 2;
        }
        a += 2;
    }
    out
}

/// Which coordinate carries the odd leg and the two independent signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SymmetryTag {
    /// `true` when `x2` is the odd coordinate (so `x2 ↔ x3` relative to the
    /// base case where `x3` is odd).
    pub swapped: bool,
    /// Sign shared by `x1` and the even coordinate.
    pub sign_main: i8,
    /// Sign of the odd coordinate.
    pub sign_odd: i8,
}

impl SymmetryTag {
    pub fn all() -> impl Iterator<Item = SymmetryTag> {
        [false, true].into_iter().flat_map(|swapped| {
            [1i8, -1].into_iter().flat_map(move |sign_main| {
                [1i8, -1].into_iter().map(move |sign_odd| SymmetryTag {
                    swapped,
                    sign_main,
                    sign_odd,
                })
            })
        })
    }
}

/// Odd coprime positive integers with `|x1 − x_even| = m²`, `|x1 + x_even| = n²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PythagoreanParam {
    pub m: i64,
    pub n: i64,
}

impl PythagoreanParam {
    pub fn point(&self, tag: SymmetryTag) -> LatticePoint {
        let (m2, n2) = (self.m * self.m, self.n * self.n);
        let s = tag.sign_main as i64;
        let x1 = s * (n2 + m2) / 2;
        let even = s * (n2 - m2) / 2;
        let odd = tag.sign_odd as i64 * self.m * self.n;
        if tag.swapped {
            LatticePoint::new(x1, odd, even)
        } else {
            LatticePoint::new(x1, even, odd)
        }
    }
}

pub fn pythagorean_param(xi: &LatticePoint) -> Result<(PythagoreanParam, SymmetryTag)> {
    xi.check_bound()?;
    if xi.is_zero() || !cone_contains(xi) {
        return Err(Error::NotOnCone(*xi));
    }
    if xi.gcd() != 1 {
        return Err(Error::NotPrimitive(*xi));
    }
    let [x1, x2, x3] = xi.0;
    // exactly one of x2, x3 is odd for a primitive point
    let (swapped, even, odd) = if x3 % 2 != 0 { (false, x2, x3) } else { (true, x3, x2) };
    let sign_main: i8 = if x1 > 0 { 1 } else { -1 };
    let m2 = (x1 - even).abs();
    let n2 = (x1 + even).abs();
    let m = exact_sqrt(m2 as i128).expect("primitive cone point has square legs") as i64;
    let n = exact_sqrt(n2 as i128).expect("primitive cone point has square legs") as i64;
    let tag = SymmetryTag {
        swapped,
        sign_main,
        sign_odd: if odd > 0 { 1 } else { -1 },
    };
    Ok((PythagoreanParam { m, n }, tag))
}

/// Integer basis of the rank-2 lattice `{ξ ∈ Z³ : ξ·d = 0}`.
pub fn orthogonal_basis(d: &LatticePoint) -> Result<(LatticePoint, LatticePoint)> {
    if d.is_zero() {
        return Err(Error::ZeroVector);
    }
    // Column operations reduce the row d to (g, 0, 0) up to permutation; the
    // remaining columns of the unimodular transform span the kernel.
    let mut row = d.0;
    let mut cols = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    loop {
        let nonzero: Vec<usize> = (0..3).filter(|&i| row[i] != 0).collect();
        if nonzero.len() == 1 {
            let k = nonzero[0];
            let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
            return Ok((
                LatticePoint(cols[others[0]]),
                LatticePoint(cols[others[1]]),
            ));
        }
        let pivot = *nonzero
            .iter()
            .min_by_key(|&&i| row[i].unsigned_abs())
            .unwrap();
        for &j in &nonzero {
            if j == pivot {
                continue;
            }
            let q = Integer::div_floor(&row[j], &row[pivot]);
            row[j] -= q * row[pivot];
            let pv = cols[pivot];
            for (c, v) in cols[j].iter_mut().zip(pv) {
                *c -= q * v;
            }
        }
    }
}

/// Primitive cone directions `n` (canonical sign) with `n·d = 0`; at most two.
pub fn cone_directions_orthogonal_to(d: &LatticePoint) -> Result<Vec<LatticePoint>> {
    d.check_bound()?;
    let (u, w) = orthogonal_basis(d)?;
    // h(x·u + y·w) = α x² + 2β xy + γ y²
    let alpha = u.h() as i128;
    let beta = u.cross(&w) as i128;
    let gamma = w.h() as i128;
    let disc = beta * beta - alpha * gamma;
    let mut coeffs: Vec<(i128, i128)> = Vec::new();
    if alpha != 0 {
        if let Some(s) = exact_sqrt(disc) {
            coeffs.push((-beta + s, alpha));
            coeffs.push((-beta - s, alpha));
        }
    } else {
        // y (2β x + γ y) = 0
        coeffs.push((1, 0));
        if beta != 0 {
            coeffs.push((gamma, -2 * beta));
        }
    }
    let mut dirs: Vec<LatticePoint> = Vec::new();
    for (x, y) in coeffs {
        let v = [0, 1, 2].map(|i| x * u.0[i] as i128 + y * w.0[i] as i128);
        let g = v[0].gcd(&v[1]).gcd(&v[2]);
        if g == 0 {
            continue;
        }
        let p = LatticePoint(v.map(|c| (c / g) as i64)).canonical_sign();
        debug_assert!(p.h() == 0 && p.dot(d) == 0);
        if !dirs.contains(&p) {
            dirs.push(p);
        }
    }
    dirs.sort_unstable();
    Ok(dirs)
}

/// Nonzero cone points inside the axis box `[lo, hi]`, scanning `(x1, x2)`.
pub fn cone_points_in_box(lo: LatticePoint, hi: LatticePoint) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for x1 in lo.0[0]..=hi.0[0] {
        let x1sq = (x1 as i128).pow(2);
        for x2 in lo.0[1]..=hi.0[1] {
            let Some(s) = exact_sqrt(x1sq - (x2 as i128).pow(2)) else {
                continue;
            };
            let s = s as i64;
            let candidates: &[i64] = if s == 0 { &[0] } else { &[s, -s] };
            for &x3 in candidates {
                if (lo.0[2]..=hi.0[2]).contains(&x3) && !(x1 == 0 && x2 == 0 && x3 == 0) {
                    out.push(LatticePoint::new(x1, x2, x3));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(a: i64, b: i64, c: i64) -> LatticePoint {
        LatticePoint::new(a, b, c)
    }

    // Triple loop over the whole box, independent of the (x1, x2)-scan.
    fn cone_irr_triple_loop(m: i64) -> Vec<LatticePoint> {
        let mut out = Vec::new();
        for a in -m..=m {
            for b in -m..=m {
                for c in -m..=m {
                    let q = p(a, b, c);
                    if !q.is_zero() && q.h() == 0 && q.gcd() == 1 && q.norm_sq() <= m * m {
                        out.push(q);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn brute_orthogonal_cone_dirs(d: &LatticePoint, r: i64) -> Vec<LatticePoint> {
        let mut out = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    let q = p(a, b, c);
                    if q.is_canonical_direction() && q.h() == 0 && q.dot(d) == 0 {
                        out.push(q);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn form_h_examples() {
        assert_eq!(form_h(&p(1, 0, 0)).unwrap(), 1);
        assert_eq!(form_h(&p(1, 1, 0)).unwrap(), 0);
        assert_eq!(form_h(&p(5, 4, 3)).unwrap(), 0);
        assert!(matches!(
            form_h(&p(COORD_BOUND + 1, 0, 0)),
            Err(Error::CoordinateBound { .. })
        ));
    }

    #[test]
    fn gcd_and_cone_examples() {
        assert_eq!(gcd_point(&p(2, 4, 6)), 2);
        assert_eq!(gcd_point(&p(5, 4, 3)), 1);
        assert_eq!(gcd_point(&p(0, 0, 0)), 0);
        assert_eq!(gcd_point(&p(-3, 0, 6)), 3);
        assert!(cone_contains(&p(0, 0, 0)));
        assert!(cone_contains(&p(1, 1, 0)));
        assert!(!cone_contains(&p(1, 0, 0)));
    }

    #[test]
    fn crossing_form_examples() {
        assert_eq!(crossing_form(&p(1, 1, 0), &p(1, -1, 0)).unwrap(), 2);
        assert_eq!(crossing_form(&p(1, 1, 0), &p(1, 1, 0)).unwrap(), 0);
        assert_eq!(crossing_form(&p(1, 0, 0), &p(0, 1, 0)).unwrap(), 0);
    }

    #[test]
    fn cone_irr_small_m() {
        for method in [EnumerationMethod::BruteForce, EnumerationMethod::Parametrized] {
            assert!(enumerate_cone_irr(1, method).unwrap().is_empty());
            let two = enumerate_cone_irr(2, method).unwrap();
            let mut expected = vec![];
            for s in [1, -1] {
                for t in [1, -1] {
                    expected.push(p(s, t, 0));
                    expected.push(p(s, 0, t));
                }
            }
            expected.sort_unstable();
            assert_eq!(two.points(), &expected[..]);
        }
        assert!(enumerate_cone_irr(0, EnumerationMethod::BruteForce).is_err());
    }

    #[test]
    fn cone_irr_methods_match_triple_loop() {
        for m in 1..=24 {
            let oracle = cone_irr_triple_loop(m);
            let scan = enumerate_cone_irr(m, EnumerationMethod::BruteForce).unwrap();
            let param = enumerate_cone_irr(m, EnumerationMethod::Parametrized).unwrap();
            assert_eq!(scan.points(), &oracle[..], "scan M={m}");
            assert_eq!(param.points(), &oracle[..], "param M={m}");
        }
    }

    #[test]
    fn cone_catalog_negation_closed() {
        let cat = enumerate_cone_irr(200, EnumerationMethod::Parametrized).unwrap();
        for q in cat.points() {
            assert!(cat.contains(&-*q));
        }
        assert_eq!(cat.canonical_directions().len() * 2, cat.len());
    }

    #[test]
    fn pythagorean_param_examples() {
        let (pp, tag) = pythagorean_param(&p(5, 4, 3)).unwrap();
        assert_eq!((pp.m, pp.n), (1, 3));
        assert!(!tag.swapped);
        assert_eq!(pp.point(tag), p(5, 4, 3));

        let (pp, tag) = pythagorean_param(&p(1, 1, 0)).unwrap();
        assert_eq!((pp.m, pp.n), (1, 1));
        assert!(tag.swapped);
        assert_eq!(pp.point(tag), p(1, 1, 0));

        let (pp, tag) = pythagorean_param(&p(5, 3, 4)).unwrap();
        assert_eq!((pp.m, pp.n), (1, 3));
        assert!(tag.swapped);

        assert!(matches!(pythagorean_param(&p(10, 8, 6)), Err(Error::NotPrimitive(_))));
        assert!(matches!(pythagorean_param(&p(1, 0, 0)), Err(Error::NotOnCone(_))));
        assert!(pythagorean_param(&p(0, 0, 0)).is_err());
    }

    #[test]
    fn pythagorean_round_trip_over_catalog() {
        let cat = enumerate_cone_irr(300, EnumerationMethod::BruteForce).unwrap();
        for q in cat.points() {
            let (pp, tag) = pythagorean_param(q).unwrap();
            assert_eq!(pp.m % 2, 1);
            assert_eq!(pp.n % 2, 1);
            assert_eq!(pp.m.gcd(&pp.n), 1);
            assert_eq!(pp.point(tag), *q);
        }
    }

    #[test]
    fn orthogonal_cone_direction_examples() {
        assert_eq!(
            cone_directions_orthogonal_to(&p(0, 0, 1)).unwrap(),
            vec![p(1, -1, 0), p(1, 1, 0)]
        );
        assert!(cone_directions_orthogonal_to(&p(1, 0, 0)).unwrap().is_empty());
        assert_eq!(cone_directions_orthogonal_to(&p(1, 1, 0)).unwrap(), vec![p(1, -1, 0)]);
        assert_eq!(
            brute_orthogonal_cone_dirs(&p(1, 1, 0), 5),
            vec![p(1, -1, 0)]
        );
        assert!(matches!(cone_directions_orthogonal_to(&p(0, 0, 0)), Err(Error::ZeroVector)));
    }

    #[test]
    fn orthogonal_cone_directions_match_brute_force() {
        // Filter a large catalog rather than a box; orthogonal cone
        // directions can be much longer than d itself.
        let cat = cone_irr_scan(1000);
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -6i64..=6 {
                    let d = p(a, b, c);
                    if d.is_zero() || d.norm_sq() > 100 {
                        continue;
                    }
                    let fast = cone_directions_orthogonal_to(&d).unwrap();
                    let mut brute: Vec<_> = cat
                        .iter()
                        .copied()
                        .filter(|q| q.canonical_sign() == *q && q.dot(&d) == 0)
                        .collect();
                    brute.sort_unstable();
                    assert_eq!(fast, brute, "d = {d:?}");
                }
            }
        }
    }

    #[test]
    fn orthogonal_basis_spans_kernel() {
        let d = p(6, 10, 15);
        let (u, w) = orthogonal_basis(&d).unwrap();
        assert_eq!(u.dot(&d), 0);
        assert_eq!(w.dot(&d), 0);
        // unimodular completion: |det(u, w, x)| = 1 for some integer x means
        // the cross product is primitive and parallel to d
        assert_eq!(u.cross_product(&w).primitive_canonical(), d.primitive_canonical());
        assert_eq!(u.cross_product(&w).gcd(), 1);
    }

    #[test]
    fn plane_canonicalization() {
        let a = Plane::new(p(-1, 1, 0), 3).unwrap();
        assert_eq!(a.normal(), p(1, -1, 0));
        assert_eq!(a.offset(), -3);
        assert!(Plane::new(p(2, 2, 0), 0).is_err());
        let b = Plane::through(p(-2, -2, 0), p(3, 1, 7)).unwrap();
        assert_eq!(b, Plane::new(p(1, 1, 0), 4).unwrap());
        assert!(b.contains(&p(4, 0, -9)));
    }

    #[test]
    fn cone_points_in_box_matches_scan() {
        let lo = p(-4, -3, -5);
        let hi = p(5, 4, 2);
        let mut fast = cone_points_in_box(lo, hi);
        fast.sort_unstable();
        let mut slow = vec![];
        for a in -4..=5 {
            for b in -3..=4 {
                for c in -5..=2 {
                    let q = p(a, b, c);
                    if !q.is_zero() && q.h() == 0 {
                        slow.push(q);
                    }
                }
            }
        }
        assert_eq!(fast, slow);
    }

    proptest! {
        #[test]
        fn polarization_identity(
            a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000,
            d in -1000i64..1000, e in -1000i64..1000, f in -1000i64..1000,
        ) {
            let x = p(a, b, c);
            let y = p(d, e, f);
            prop_assert_eq!((x + y).h(), x.h() + y.h() + 2 * crossing_form(&x, &y).unwrap());
        }

        #[test]
        fn cone_count_monotone(m in 1i64..300) {
            let a = enumerate_cone_irr(m, EnumerationMethod::Parametrized).unwrap().len();
            let b = enumerate_cone_irr(m + 1, EnumerationMethod::Parametrized).unwrap().len();
            prop_assert!(a <= b);
        }
    }
}
