//! Finitely supported weights on `Z³`: the Fourier data fed to every kernel.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// Weight storage. Exact weights are nonnegative rationals; numeric weights
/// are complex doubles.
#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    Exact(Vec<BigRational>),
    Numeric(Vec<Complex64>),
}

/// Points are kept sorted and unique; zero weights are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSet {
    points: Vec<LatticePoint>,
    weights: Weights,
}

impl WeightedSet {
    pub fn empty_exact() -> Self {
        WeightedSet {
            points: Vec::new(),
            weights: Weights::Exact(Vec::new()),
        }
    }

    pub fn empty_numeric() -> Self {
        WeightedSet {
            points: Vec::new(),
            weights: Weights::Numeric(Vec::new()),
        }
    }

    /// Weight 1 on each point; duplicates collapse.
    pub fn characteristic<I: IntoIterator<Item = LatticePoint>>(points: I) -> Result<Self> {
        let mut pts: Vec<LatticePoint> = points.into_iter().collect();
        for p in &pts {
            p.check_bound()?;
        }
        pts.sort_unstable();
        pts.dedup();
        let n = pts.len();
        Ok(WeightedSet {
            points: pts,
            weights: Weights::Exact(vec![BigRational::one(); n]),
        })
    }

    /// Exact nonnegative weights. Repeated points have their weights added.
    pub fn from_exact<I: IntoIterator<Item = (LatticePoint, BigRational)>>(entries: I) -> Result<Self> {
        let mut map: BTreeMap<LatticePoint, BigRational> = BTreeMap::new();
        for (p, w) in entries {
            p.check_bound()?;
            if w.is_negative() {
                return Err(Error::Invalid(format!(
                    "exact weights must be nonnegative, got {w} at {p:?}"
                )));
            }
            *map.entry(p).or_insert_with(BigRational::zero) += w;
        }
        let (points, weights): (Vec<_>, Vec<_>) = map.into_iter().filter(|(_, w)| !w.is_zero()).unzip();
        Ok(WeightedSet {
            points,
            weights: Weights::Exact(weights),
        })
    }

    /// Complex weights. Repeated points have their weights added.
    pub fn from_numeric<I: IntoIterator<Item = (LatticePoint, Complex64)>>(entries: I) -> Result<Self> {
        let mut map: BTreeMap<LatticePoint, Complex64> = BTreeMap::new();
        for (p, w) in entries {
            p.check_bound()?;
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::Invalid(format!("non-finite weight at {p:?}")));
            }
            *map.entry(p).or_insert(Complex64::new(0.0, 0.0)) += w;
        }
        let (points, weights): (Vec<_>, Vec<_>) = map.into_iter().filter(|(_, w)| *w != Complex64::new(0.0, 0.0)).unzip();
        Ok(WeightedSet {
            points,
            weights: Weights::Numeric(weights),
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.weights, Weights::Exact(_))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// Numeric view of the weight at index `i`.
    pub fn weight_c64(&self, i: usize) -> Complex64 {
        match &self.weights {
            Weights::Exact(w) => Complex64::new(w[i].to_f64().unwrap_or(f64::NAN), 0.0),
            Weights::Numeric(w) => w[i],
        }
    }

    pub fn weight_at(&self, p: &LatticePoint) -> Complex64 {
        self.index_of(p)
            .map(|i| self.weight_c64(i))
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn exact_weights(&self) -> Option<&[BigRational]> {
        match &self.weights {
            Weights::Exact(w) => Some(w),
            Weights::Numeric(_) => None,
        }
    }

    pub fn complex_weights(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.weight_c64(i)).collect()
    }

    /// `|w|` per point, the weights used by the numeric resonance sums.
    pub fn modulus_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight_c64(i).norm()).collect()
    }

    /// Is every weight exactly one?
    pub fn is_characteristic(&self) -> bool {
        match &self.weights {
            Weights::Exact(w) => w.iter().all(|x| x.is_one()),
            Weights::Numeric(_) => false,
        }
    }

    /// Integer weights `w·L` with `L` the lcm of the denominators.
    pub fn scaled_integers(&self) -> Result<(Vec<i128>, BigInt)> {
        let w = self
            .exact_weights()
            .ok_or(Error::Mode("exact weights required"))?;
        let mut l = BigInt::one();
        for x in w {
            l = l.lcm(x.denom());
        }
        let mut out = Vec::with_capacity(w.len());
        for x in w {
            let v = x.numer() * (&l / x.denom());
            out.push(
                v.to_i128()
                    .ok_or_else(|| Error::Overflow(format!("scaled weight {v} does not fit")))?,
            );
        }
        Ok((out, l))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let v: Vec<f64> = (0..self.len()).map(|i| self.weight_c64(i).norm_sqr()).collect();
        neumaier_sum(&v)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l2_norm_sq_exact(&self) -> Option<BigRational> {
        self.exact_weights()
            .map(|w| w.iter().fold(BigRational::zero(), |acc, x| acc + x * x))
    }

    /// Squared norm as a [`Scalar`], exact when possible.
    pub fn l2_norm_sq_scalar(&self) -> Scalar {
        match self.l2_norm_sq_exact() {
            Some(v) => Scalar::Exact(v),
            None => Scalar::Numeric(self.l2_norm_sq()),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`; `None` when empty.
    pub fn support_box(&self) -> Option<(LatticePoint, LatticePoint)> {
        let first = *self.points.first()?;
        let mut lo = first.0;
        let mut hi = first.0;
        for p in &self.points {
            for i in 0..3 {
                lo[i] = lo[i].min(p.0[i]);
                hi[i] = hi[i].max(p.0[i]);
            }
        }
        Some((LatticePoint(lo), LatticePoint(hi)))
    }

    /// Largest squared Euclidean distance between support points.
    pub fn diam_sq(&self) -> i64 {
        // The farthest partner of any point is an extreme point of some
        // (x1, x2) column, so only column endpoints need comparing.
        let mut ends: Vec<LatticePoint> = Vec::new();
        let mut i = 0;
        while i < self.points.len() {
            let mut j = i;
            while j + 1 < self.points.len()
                && self.points[j + 1].0[..2] == self.points[i].0[..2]
            {
                j += 1;
            }
            ends.push(self.points[i]);
            if j > i {
                ends.push(self.points[j]);
            }
            i = j + 1;
        }
        let mut best = 0;
        for a in 0..ends.len() {
            for b in a + 1..ends.len() {
                best = best.max((ends[a] - ends[b]).norm_sq());
            }
        }
        best
    }

    pub fn diam(&self) -> f64 {
        (self.diam_sq() as f64).sqrt()
    }

    /// Same weights on `p + v`.
    pub fn translate(&self, v: LatticePoint) -> Result<Self> {
        self.map_points(|p| p + v)
    }

    /// Applies a bijection of `Z³` to the support.
    pub fn map_points(&self, f: impl Fn(LatticePoint) -> LatticePoint) -> Result<Self> {
        match &self.weights {
            Weights::Exact(w) => {
                WeightedSet::from_exact(self.points.iter().map(|&p| f(p)).zip(w.iter().cloned()))
            }
            Weights::Numeric(w) => {
                WeightedSet::from_numeric(self.points.iter().map(|&p| f(p)).zip(w.iter().copied()))
            }
        }
    }

    /// Keeps the points satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&LatticePoint) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.points[i])).collect();
        self.select(&idx)
    }

    fn select(&self, idx: &[usize]) -> Self {
        let points = idx.iter().map(|&i| self.points[i]).collect();
        let weights = match &self.weights {
            Weights::Exact(w) => Weights::Exact(idx.iter().map(|&i| w[i].clone()).collect()),
            Weights::Numeric(w) => Weights::Numeric(idx.iter().map(|&i| w[i]).collect()),
        };
        WeightedSet { points, weights }
    }

    /// Multiplies every weight by a nonnegative rational.
    pub fn scale_exact(&self, c: &BigRational) -> Result<Self> {
        let w = self
            .exact_weights()
            .ok_or(Error::Mode("exact weights required"))?;
        WeightedSet::from_exact(self.points.iter().copied().zip(w.iter().map(|x| x * c)))
    }

    /// Numeric copy with every weight multiplied by `c`.
    pub fn to_numeric_scaled(&self, c: f64) -> Self {
        WeightedSet {
            points: self.points.clone(),
            weights: Weights::Numeric(
                (0..self.len()).map(|i| self.weight_c64(i) * c).collect(),
            ),
        }
    }

    pub fn to_numeric(&self) -> Self {
        self.to_numeric_scaled(1.0)
    }

    pub fn entries_c64(&self) -> impl Iterator<Item = (LatticePoint, Complex64)> + '_ {
        (0..self.len()).map(move |i| (self.points[i], self.weight_c64(i)))
    }
}

/// An exact or numeric scalar result.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Numeric(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Numeric(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Numeric(_) => None,
        }
    }

    pub fn int(v: i128) -> Scalar {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Numeric(x) => *x == 0.0,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Numeric(x) => write!(f, "{x:e}"),
        }
    }
}

/// Integers that fit `i64` become JSON numbers, other exact values the
/// string `"p/q"` (or a decimal integer string), numeric values plain floats.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    if let Some(v) = r.numer().to_i64() {
                        return s.serialize_i64(v);
                    }
                }
                s.serialize_str(&self.to_string())
            }
            Scalar::Numeric(x) => s.serialize_f64(*x),
        }
    }
}

/// A list of `{"point": [x, y, z], "w": ...}` entries; exact weights as
/// scalars, numeric weights as `[re, im]`.
impl Serialize for WeightedSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::{SerializeMap, SerializeSeq};
        struct Entry<'a>(&'a LatticePoint, EntryWeight<'a>);
        enum EntryWeight<'a> {
            Exact(&'a BigRational),
            Numeric(Complex64),
        }
        impl Serialize for Entry<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("point", &self.0 .0)?;
                match &self.1 {
                    EntryWeight::Exact(r) => m.serialize_entry("w", &Scalar::Exact((*r).clone()))?,
                    EntryWeight::Numeric(z) => m.serialize_entry("w", &[z.re, z.im])?,
                }
                m.end()
            }
        }
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (i, p) in self.points.iter().enumerate() {
            let w = match &self.weights {
                Weights::Exact(v) => EntryWeight::Exact(&v[i]),
                Weights::Numeric(v) => EntryWeight::Numeric(v[i]),
            };
            seq.serialize_element(&Entry(p, w))?;
        }
        seq.end()
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Numeric(self.to_f64() - o.to_f64()),
        }
    }
}

/// Neumaier-compensated sum in the given order.
pub fn neumaier_sum(v: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &x in v {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Arithmetic needed by the resonance kernels.
pub trait Weight:
    Copy
    + Send
    + Sync
    + Default
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    fn conj(self) -> Self;
    /// Order-fixed reduction; compensated for floating types.
    fn sum_ordered(v: &[Self]) -> Self;
    fn double(self) -> Self {
        self + self
    }
}

impl Weight for i128 {
    fn conj(self) -> Self {
        self
    }
    fn sum_ordered(v: &[Self]) -> Self {
        v.iter().sum()
    }
}

impl Weight for f64 {
    fn conj(self) -> Self {
        self
    }
    fn sum_ordered(v: &[Self]) -> Self {
        neumaier_sum(v)
    }
}

impl Weight for Complex64 {
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn sum_ordered(v: &[Self]) -> Self {
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        let im: Vec<f64> = v.iter().map(|z| z.im).collect();
        Complex64::new(neumaier_sum(&re), neumaier_sum(&im))
    }
}
