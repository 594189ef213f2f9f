//! `Ω₂`: resonant quadruples with a side on the cone.
//!
//! With `d = ξ₁ − ξ₂` and `e = ξ₁ − ξ₄` a quadruple is resonant iff
//! `d·Ae = 0`, and then `ξ₃ = ξ₁ − d − e`. For a fixed cone vector `d ≠ 0`
//! the condition is `n·ξ₄ = n·ξ₁` with `n` the primitive normal along `Ad`,
//! so the `d`-family factors through plane offsets. When both sides lie on
//! the cone they are parallel (the cone contains no lattice 2-plane through
//! the origin), so the overlap factors through lines along `d`.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::lattice::{cone_contains, cone_points_in_box, LatticePoint};
use crate::resonance::kernel::KSet;
use crate::weighted::Weight;

struct Indexed<'a, W> {
    set: KSet<'a, W>,
    index: FxHashMap<LatticePoint, usize>,
}

impl<'a, W: Weight> Indexed<'a, W> {
    fn new(set: KSet<'a, W>) -> Self {
        let index = set.points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Indexed { set, index }
    }

    #[inline]
    fn get(&self, p: &LatticePoint) -> Option<W> {
        self.index.get(p).map(|&i| self.set.w[i])
    }

    fn bbox(&self) -> Option<([i64; 3], [i64; 3])> {
        let first = self.set.points.first()?;
        let (mut lo, mut hi) = (first.0, first.0);
        for p in self.set.points {
            for i in 0..3 {
                lo[i] = lo[i].min(p.0[i]);
                hi[i] = hi[i].max(p.0[i]);
            }
        }
        Some((lo, hi))
    }
}

/// Nonzero cone vectors `x − y` with `x ∈ X, y ∈ Y` and also `u − v` with
/// `u ∈ U, v ∈ V`; a superset is fine, an omission is not.
fn cone_differences<W: Weight>(
    x: &Indexed<'_, W>,
    y: &Indexed<'_, W>,
    u: &Indexed<'_, W>,
    v: &Indexed<'_, W>,
) -> Vec<LatticePoint> {
    let (Some((xl, xh)), Some((yl, yh)), Some((ul, uh)), Some((vl, vh))) =
        (x.bbox(), y.bbox(), u.bbox(), v.bbox())
    else {
        return Vec::new();
    };
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for i in 0..3 {
        lo[i] = (xl[i] - yh[i]).max(ul[i] - vh[i]);
        hi[i] = (xh[i] - yl[i]).min(uh[i] - vl[i]);
        if lo[i] > hi[i] {
            return Vec::new();
        }
    }
    let scan_cost = (hi[0] - lo[0] + 1) as u128 * (hi[1] - lo[1] + 1) as u128;
    let pair_cost = x.set.len() as u128 * y.set.len() as u128;
    if scan_cost <= pair_cost {
        cone_points_in_box(LatticePoint(lo), LatticePoint(hi))
    } else {
        let mut seen = FxHashSet::default();
        for a in x.set.points {
            for b in y.set.points {
                let d = *a - *b;
                if !d.is_zero() && cone_contains(&d) {
                    seen.insert(d);
                }
            }
        }
        let mut out: Vec<LatticePoint> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

/// `Σ_ξ f(ξ) g(ξ)` over the common support.
fn overlap<W: Weight>(f: &Indexed<'_, W>, g: &Indexed<'_, W>) -> W {
    let mut acc = W::default();
    for (p, &w) in f.set.points.iter().zip(f.set.w) {
        if let Some(v) = g.get(p) {
            acc += w * v;
        }
    }
    acc
}

fn products<'a, W: Weight>(f: &Indexed<'_, W>, g: &Indexed<'_, W>, store: &'a mut (Vec<LatticePoint>, Vec<W>)) -> KSet<'a, W> {
    store.0.clear();
    store.1.clear();
    for (p, &w) in f.set.points.iter().zip(f.set.w) {
        if let Some(v) = g.get(p) {
            store.0.push(*p);
            store.1.push(w * v);
        }
    }
    KSet::new(&store.0, &store.1)
}

// Quadruples with ξ₁ − ξ₂ ∈ Cone (as "a"), and those with both sides on the
// cone, for one ordering of the four functions.
struct Family<W> {
    side: W,
    both_nonzero_d: W,
    work: u128,
}

fn cone_family<W: Weight>(
    f1: &Indexed<'_, W>,
    f2: &Indexed<'_, W>,
    f3: &Indexed<'_, W>,
    f4: &Indexed<'_, W>,
    with_both: bool,
    budget: u128,
) -> Result<Family<W>> {
    let mut side = overlap(f1, f2) * overlap(f3, f4);
    let mut both = W::default();
    let ds = cone_differences(f1, f2, f4, f3);
    let per_d = (f1.set.len() + f4.set.len()) as u128 * if with_both { 2 } else { 1 };
    let work = ds.len() as u128 * per_d;
    if work > budget {
        return Err(Error::Budget {
            work,
            budget,
            detail: format!("{} cone differences in the cone-side count", ds.len()),
        });
    }
    let mut by_offset: FxHashMap<i64, W> = FxHashMap::default();
    let mut by_line: FxHashMap<LatticePoint, W> = FxHashMap::default();
    for d in ds {
        let n = d.apply_form().primitive_canonical();
        let v = d.primitive_canonical();
        by_offset.clear();
        by_line.clear();
        for (x1, &w1) in f1.set.points.iter().zip(f1.set.w) {
            if let Some(w2) = f2.get(&(*x1 - d)) {
                *by_offset.entry(n.dot(x1)).or_default() += w1 * w2;
            }
        }
        if by_offset.is_empty() {
            continue;
        }
        for (x4, &w4) in f4.set.points.iter().zip(f4.set.w) {
            if let Some(w3) = f3.get(&(*x4 - d)) {
                let t = w4 * w3;
                if let Some(&u) = by_offset.get(&n.dot(x4)) {
                    side += u * t;
                }
                if with_both {
                    *by_line.entry(x4.cross_product(&v)).or_default() += t;
                }
            }
        }
        if with_both && !by_line.is_empty() {
            for (x1, &w1) in f1.set.points.iter().zip(f1.set.w) {
                if let Some(w2) = f2.get(&(*x1 - d)) {
                    if let Some(&l) = by_line.get(&x1.cross_product(&v)) {
                        both += w1 * w2 * l;
                    }
                }
            }
        }
    }
    Ok(Family {
        side,
        both_nonzero_d: both,
        work,
    })
}

/// `Σ_{ξ₁−ξ₄ ∈ Cone} g(ξ₁) k(ξ₄)` including `ξ₁ = ξ₄`.
fn cone_correlation<W: Weight>(g: &Indexed<'_, W>, k: &Indexed<'_, W>) -> W {
    let mut acc = overlap(g, k);
    for e in cone_differences(g, k, g, k) {
        for (x, &w) in g.set.points.iter().zip(g.set.w) {
            if let Some(v) = k.get(&(*x - e)) {
                acc += w * v;
            }
        }
    }
    acc
}

/// `Ω₂(f₁, f₂, f₃, f₄)` for real weights, with the work spent.
pub fn omega2<W: Weight>(
    f1: &KSet<'_, W>,
    f2: &KSet<'_, W>,
    f3: &KSet<'_, W>,
    f4: &KSet<'_, W>,
    budget: u128,
) -> Result<(W, u128)> {
    let i1 = Indexed::new(*f1);
    let i2 = Indexed::new(*f2);
    let i3 = Indexed::new(*f3);
    let i4 = Indexed::new(*f4);
    let a = cone_family(&i1, &i2, &i3, &i4, true, budget)?;
    let b = if f2.points == f4.points && f2.w == f4.w {
        Family {
            side: a.side,
            both_nonzero_d: W::default(),
            work: 0,
        }
    } else {
        cone_family(&i1, &i4, &i3, &i2, false, budget.saturating_sub(a.work))?
    };
    let mut s12 = (Vec::new(), Vec::new());
    let mut s34 = (Vec::new(), Vec::new());
    let g = Indexed::new(products(&i1, &i2, &mut s12));
    let k = Indexed::new(products(&i3, &i4, &mut s34));
    let both = cone_correlation(&g, &k) + a.both_nonzero_d;
    Ok((a.side + b.side - both, a.work + b.work))
}
