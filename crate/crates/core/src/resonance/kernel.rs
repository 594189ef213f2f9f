//! Pair-sum kernels over `(a, b)` buckets.
//!
//! `P_fg(a, b) = Σ_{ξ+η=a, h(ξ)+h(η)=b} f(ξ) g(η)`. Pairs are enumerated one
//! `(a₁, a₂)` slab at a time: points are grouped into `(x₁, x₂)` columns, the
//! column pairs summing to a slab are collected, and only the `(a₃, b)`
//! sub-keys of that slab live in the hash map at once.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::weighted::Weight;

/// Borrowed kernel input: sorted unique points with parallel weights.
#[derive(Clone, Copy)]
pub struct KSet<'a, W> {
    pub points: &'a [LatticePoint],
    pub w: &'a [W],
}

impl<'a, W: Weight> KSet<'a, W> {
    pub fn new(points: &'a [LatticePoint], w: &'a [W]) -> Self {
        debug_assert_eq!(points.len(), w.len());
        debug_assert!(points.windows(2).all(|p| p[0] < p[1]));
        KSet { points, w }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn same_as(&self, o: &KSet<'_, W>) -> bool {
        self.points == o.points && self.w == o.w
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KernelStats {
    /// Number of distinct `(a, b)` keys of the first pair-sum.
    pub bucket_count: u64,
    /// Largest number of ordered pairs sharing one key.
    pub max_bucket_size: u64,
    /// Ordered pairs visited.
    pub pair_ops: u128,
}

impl KernelStats {
    fn merge(&mut self, o: &KernelStats) {
        self.bucket_count += o.bucket_count;
        self.max_bucket_size = self.max_bucket_size.max(o.max_bucket_size);
        self.pair_ops += o.pair_ops;
    }
}

struct Columns<W> {
    // (x1, x2) of each column, sorted
    keys: Vec<(i64, i64)>,
    start: Vec<usize>,
    x3: Vec<i64>,
    h: Vec<i64>,
    w: Vec<W>,
    // x1 value and the half-open column range of that row
    rows: Vec<(i64, usize, usize)>,
}

impl<W: Weight> Columns<W> {
    fn new(set: &KSet<'_, W>) -> Self {
        let mut keys = Vec::new();
        let mut start = Vec::new();
        for (i, p) in set.points.iter().enumerate() {
            let k = (p.0[0], p.0[1]);
            if keys.last() != Some(&k) {
                keys.push(k);
                start.push(i);
            }
        }
        start.push(set.points.len());
        let mut rows: Vec<(i64, usize, usize)> = Vec::new();
        for (c, &(x1, _)) in keys.iter().enumerate() {
            match rows.last_mut() {
                Some(r) if r.0 == x1 => r.2 = c + 1,
                _ => rows.push((x1, c, c + 1)),
            }
        }
        Columns {
            keys,
            start,
            x3: set.points.iter().map(|p| p.0[2]).collect(),
            h: set.points.iter().map(|p| p.h()).collect(),
            w: set.w.to_vec(),
            rows,
        }
    }

    fn row(&self, x1: i64) -> Option<(usize, usize)> {
        self.rows
            .binary_search_by_key(&x1, |r| r.0)
            .ok()
            .map(|i| (self.rows[i].1, self.rows[i].2))
    }
}

struct PairSide<W> {
    f: Columns<W>,
    g: Columns<W>,
    sym: bool,
}

impl<W: Weight> PairSide<W> {
    fn new(f: &KSet<'_, W>, g: &KSet<'_, W>) -> Self {
        let sym = f.same_as(g);
        let fc = Columns::new(f);
        let gc = if sym { Columns::new(f) } else { Columns::new(g) };
        PairSide { f: fc, g: gc, sym }
    }

    fn slab_targets(&self) -> Vec<i64> {
        let mut t: Vec<i64> = Vec::new();
        for r in &self.f.rows {
            for s in &self.g.rows {
                t.push(r.0 + s.0);
            }
        }
        t.sort_unstable();
        t.dedup();
        t
    }

    // Column pairs (a2, ci, cj) with x1 sum a1, sorted by a2.
    fn column_pairs(&self, a1: i64, out: &mut Vec<(i64, u32, u32)>) {
        out.clear();
        for &(r, lo, hi) in &self.f.rows {
            let s = a1 - r;
            if self.sym && r > s {
                continue;
            }
            let Some((glo, ghi)) = self.g.row(s) else {
                continue;
            };
            for ci in lo..hi {
                let jfrom = if self.sym && r == s { ci } else { glo };
                for cj in jfrom..ghi {
                    out.push((self.f.keys[ci].1 + self.g.keys[cj].1, ci as u32, cj as u32));
                }
            }
        }
        out.sort_unstable_by_key(|e| e.0);
    }

    // Calls visit(key, weight, multiplicity) for every pair of one column pair.
    #[inline]
    fn for_pairs(&self, ci: usize, cj: usize, mut visit: impl FnMut((i64, i64), W, u64)) {
        let (ilo, ihi) = (self.f.start[ci], self.f.start[ci + 1]);
        let (jlo, jhi) = (self.g.start[cj], self.g.start[cj + 1]);
        let diag = self.sym && ci == cj;
        for i in ilo..ihi {
            let (xi, hi, wi) = (self.f.x3[i], self.f.h[i], self.f.w[i]);
            let jfrom = if diag { i } else { jlo };
            for j in jfrom..jhi {
                let key = (xi + self.g.x3[j], hi + self.g.h[j]);
                let v = wi * self.g.w[j];
                if self.sym && !(diag && i == j) {
                    visit(key, v.double(), 2);
                } else {
                    visit(key, v, 1);
                }
            }
        }
    }

    fn pair_count(&self, n_f: usize, n_g: usize) -> u128 {
        let full = n_f as u128 * n_g as u128;
        if self.sym {
            (full + n_f as u128) / 2
        } else {
            full
        }
    }
}

fn group_ranges(pairs: &[(i64, u32, u32)]) -> Vec<(i64, usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i;
        while j < pairs.len() && pairs[j].0 == pairs[i].0 {
            j += 1;
        }
        out.push((pairs[i].0, i, j));
        i = j;
    }
    out
}

fn check_budget(work: u128, budget: u128, detail: impl FnOnce() -> String) -> Result<()> {
    if work > budget {
        return Err(Error::Budget {
            work,
            budget,
            detail: detail(),
        });
    }
    Ok(())
}

struct Scratch<W> {
    map: FxHashMap<(i64, i64), (W, u64)>,
    pairs13: Vec<(i64, u32, u32)>,
    pairs24: Vec<(i64, u32, u32)>,
}

impl<W> Scratch<W> {
    fn new() -> Self {
        Scratch {
            map: FxHashMap::default(),
            pairs13: Vec::new(),
            pairs24: Vec::new(),
        }
    }
}

/// `Σ_{a,b} |P_fg(a, b)|²`.
pub fn square_sum<W: Weight>(f: &KSet<'_, W>, g: &KSet<'_, W>, budget: u128) -> Result<(W, KernelStats)> {
    if f.is_empty() || g.is_empty() {
        return Ok((W::default(), KernelStats::default()));
    }
    let side = PairSide::new(f, g);
    let work = side.pair_count(f.len(), g.len());
    check_budget(work, budget, || {
        format!("{} x {} support points in the pair-sum", f.len(), g.len())
    })?;
    let targets = side.slab_targets();
    let per_slab: Vec<(W, KernelStats)> = targets
        .par_iter()
        .map_init(Scratch::<W>::new, |s, &a1| {
            side.column_pairs(a1, &mut s.pairs13);
            let mut acc: Vec<W> = Vec::new();
            let mut stats = KernelStats::default();
            for (_, lo, hi) in group_ranges(&s.pairs13) {
                s.map.clear();
                for &(_, ci, cj) in &s.pairs13[lo..hi] {
                    side.for_pairs(ci as usize, cj as usize, |k, v, m| {
                        let e = s.map.entry(k).or_insert((W::default(), 0));
                        e.0 += v;
                        e.1 += m;
                    });
                }
                let mut slab = W::default();
                for (v, m) in s.map.values() {
                    slab += v.conj() * *v;
                    stats.max_bucket_size = stats.max_bucket_size.max(*m);
                    stats.pair_ops += *m as u128;
                }
                stats.bucket_count += s.map.len() as u64;
                acc.push(slab);
            }
            (W::sum_ordered(&acc), stats)
        })
        .collect();
    Ok(reduce(per_slab))
}

/// `Σ_{a,b} conj(P₁₃(a, b)) · P₂₄(a, b)`; the resonance sum `Ω(f₁,f₂,f₃,f₄)`
/// for real weights.
pub fn cross_sum<W: Weight>(
    f1: &KSet<'_, W>,
    f2: &KSet<'_, W>,
    f3: &KSet<'_, W>,
    f4: &KSet<'_, W>,
    budget: u128,
) -> Result<(W, KernelStats)> {
    if f1.same_as(f2) && f3.same_as(f4) {
        return square_sum(f1, f3, budget);
    }
    if [f1, f2, f3, f4].iter().any(|f| f.is_empty()) {
        return Ok((W::default(), KernelStats::default()));
    }
    let s13 = PairSide::new(f1, f3);
    let s24 = PairSide::new(f2, f4);
    let work = s13.pair_count(f1.len(), f3.len()) + s24.pair_count(f2.len(), f4.len());
    check_budget(work, budget, || {
        format!(
            "pair-sums of {} x {} and {} x {} support points",
            f1.len(),
            f3.len(),
            f2.len(),
            f4.len()
        )
    })?;
    let targets = s13.slab_targets();
    let per_slab: Vec<(W, KernelStats)> = targets
        .par_iter()
        .map_init(Scratch::<W>::new, |s, &a1| {
            s13.column_pairs(a1, &mut s.pairs13);
            s24.column_pairs(a1, &mut s.pairs24);
            let g24 = group_ranges(&s.pairs24);
            let mut acc: Vec<W> = Vec::new();
            let mut stats = KernelStats::default();
            for (a2, lo, hi) in group_ranges(&s.pairs13) {
                let Ok(gi) = g24.binary_search_by_key(&a2, |g| g.0) else {
                    continue;
                };
                s.map.clear();
                for &(_, ci, cj) in &s.pairs13[lo..hi] {
                    s13.for_pairs(ci as usize, cj as usize, |k, v, m| {
                        let e = s.map.entry(k).or_insert((W::default(), 0));
                        e.0 += v;
                        e.1 += m;
                    });
                }
                for (_, m) in s.map.values() {
                    stats.max_bucket_size = stats.max_bucket_size.max(*m);
                    stats.pair_ops += *m as u128;
                }
                stats.bucket_count += s.map.len() as u64;
                let mut slab = W::default();
                let (_, lo2, hi2) = g24[gi];
                for &(_, ci, cj) in &s.pairs24[lo2..hi2] {
                    s24.for_pairs(ci as usize, cj as usize, |k, v, m| {
                        stats.pair_ops += m as u128;
                        if let Some((p, _)) = s.map.get(&k) {
                            slab += p.conj() * v;
                        }
                    });
                }
                acc.push(slab);
            }
            (W::sum_ordered(&acc), stats)
        })
        .collect();
    Ok(reduce(per_slab))
}

fn reduce<W: Weight>(per_slab: Vec<(W, KernelStats)>) -> (W, KernelStats) {
    let mut stats = KernelStats::default();
    let mut vals = Vec::with_capacity(per_slab.len());
    for (v, s) in &per_slab {
        vals.push(*v);
        stats.merge(s);
    }
    (W::sum_ordered(&vals), stats)
}
