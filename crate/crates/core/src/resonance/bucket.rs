//! Fully materialized `(a, b)` pair-sum table, for inspection and small
//! inputs. The kernels in [`super::kernel`] never build this.

use rustc_hash::FxHashMap;

use crate::lattice::LatticePoint;
use crate::weighted::Weight;

#[derive(Clone, Debug, Default)]
pub struct Bucket<W> {
    pub sum: W,
    pub pairs: u64,
    /// Contributing `(index in f, index in g)` pairs, when requested.
    pub members: Vec<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct BucketTable<W> {
    buckets: FxHashMap<(LatticePoint, i64), Bucket<W>>,
}

impl<W: Weight> BucketTable<W> {
    pub fn build(f: (&[LatticePoint], &[W]), g: (&[LatticePoint], &[W]), keep_pairs: bool) -> Self {
        let mut buckets: FxHashMap<(LatticePoint, i64), Bucket<W>> = FxHashMap::default();
        for (i, (x, &wx)) in f.0.iter().zip(f.1).enumerate() {
            for (j, (y, &wy)) in g.0.iter().zip(g.1).enumerate() {
                let b = buckets.entry((*x + *y, x.h() + y.h())).or_insert_with(|| Bucket {
                    sum: W::default(),
                    pairs: 0,
                    members: Vec::new(),
                });
                b.sum += wx * wy;
                b.pairs += 1;
                if keep_pairs {
                    b.members.push((i as u32, j as u32));
                }
            }
        }
        BucketTable { buckets }
    }

    pub fn get(&self, a: LatticePoint, b: i64) -> Option<&Bucket<W>> {
        self.buckets.get(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn total_pairs(&self) -> u64 {
        self.buckets.values().map(|b| b.pairs).sum()
    }

    pub fn max_bucket_size(&self) -> u64 {
        self.buckets.values().map(|b| b.pairs).max().unwrap_or(0)
    }

    /// Entries sorted by key.
    pub fn sorted(&self) -> Vec<((LatticePoint, i64), &Bucket<W>)> {
        let mut v: Vec<_> = self.buckets.iter().map(|(k, b)| (*k, b)).collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }

    /// `Σ conj(self) · other` over common keys.
    pub fn pair_with(&self, other: &BucketTable<W>) -> W {
        let mut terms: Vec<W> = Vec::new();
        for (k, b) in self.sorted() {
            if let Some(o) = other.buckets.get(&k) {
                terms.push(b.sum.conj() * o.sum);
            }
        }
        W::sum_ordered(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pair_count_is_conserved(
            a in prop::collection::vec((-5i64..5, -5i64..5, -5i64..5), 1..25),
            b in prop::collection::vec((-5i64..5, -5i64..5, -5i64..5), 1..25),
        ) {
            let pa: Vec<LatticePoint> = a.iter().map(|&(x, y, z)| LatticePoint::new(x, y, z)).collect();
            let pb: Vec<LatticePoint> = b.iter().map(|&(x, y, z)| LatticePoint::new(x, y, z)).collect();
            let wa = vec![1i128; pa.len()];
            let wb = vec![1i128; pb.len()];
            let t = BucketTable::build((&pa, &wa), (&pb, &wb), true);
            prop_assert_eq!(t.total_pairs(), (pa.len() * pb.len()) as u64);
            let members: usize = t.sorted().iter().map(|(_, b)| b.members.len()).sum();
            prop_assert_eq!(members, pa.len() * pb.len());
        }
    }
}
