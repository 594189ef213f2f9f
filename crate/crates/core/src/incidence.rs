//! Exact incidence counting: points and lines in the plane, rich lines of
//! lattice configurations, point–great-circle incidences on the sphere, and
//! the crossing count between two pencils of lines.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{cone_contains, LatticePoint};

/// `a x + b y + c = 0` with `gcd(a, b, c) = 1`, `(a, b) ≠ 0`, first nonzero
/// of `(a, b)` positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PlanarLine {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl PlanarLine {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(Error::Invalid("line with a = b = 0".into()));
        }
        let g = a.gcd(&b).gcd(&c);
        let (mut a, mut b, mut c) = (a / g, b / g, c / g);
        if a < 0 || (a == 0 && b < 0) {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(PlanarLine { a, b, c })
    }

    pub fn through(p: [i64; 2], q: [i64; 2]) -> Result<Self> {
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        PlanarLine::new(dy, -dx, dx * p[1] - dy * p[0])
    }

    #[inline]
    pub fn contains(&self, p: &[i64; 2]) -> bool {
        self.a as i128 * p[0] as i128 + self.b as i128 * p[1] as i128 + self.c as i128 == 0
    }
}

/// Exact count of incident (point, line) pairs; points and lines are sets.
pub fn count_incidences_point_line(points: &[[i64; 2]], lines: &[PlanarLine]) -> u64 {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut ls = lines.to_vec();
    ls.sort_unstable();
    ls.dedup();
    // lines sharing (a, b) are level sets of one linear form
    let mut by_normal: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
    for l in &ls {
        by_normal.entry((l.a, l.b)).or_default().push(l.c);
    }
    let mut total = 0u64;
    let mut counts: FxHashMap<i128, u64> = FxHashMap::default();
    for ((a, b), cs) in by_normal {
        counts.clear();
        for p in &pts {
            *counts.entry(a as i128 * p[0] as i128 + b as i128 * p[1] as i128).or_default() += 1;
        }
        for c in cs {
            total += counts.get(&-(c as i128)).copied().unwrap_or(0);
        }
    }
    total
}

pub fn count_incidences_point_line_naive(points: &[[i64; 2]], lines: &[PlanarLine]) -> u64 {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut ls = lines.to_vec();
    ls.sort_unstable();
    ls.dedup();
    let mut c = 0;
    for l in &ls {
        for p in &pts {
            if l.contains(p) {
                c += 1;
            }
        }
    }
    c
}

/// `I / (n^{2/3} m^{2/3} + n + m)`.
pub fn szemeredi_trotter_ratio(incidences: u64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    incidences as f64 / ((n * m).powf(2.0 / 3.0) + n + m)
}

/// `I / (n²/k² + n)`.
pub fn rich_line_ratio(incidences: u64, n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    incidences as f64 / (n * n / (k * k) + n)
}

/// A line in `Z³` through `base` with primitive canonical `direction`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeLine {
    pub base: LatticePoint,
    pub direction: LatticePoint,
}

impl LatticeLine {
    pub fn new(base: LatticePoint, direction: LatticePoint) -> Result<Self> {
        if direction.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(LatticeLine {
            base,
            direction: direction.primitive_canonical(),
        })
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        (*p - self.base).cross_product(&self.direction).is_zero()
    }

    /// Translation-invariant key: equal for every base point on the line.
    pub fn key(&self) -> (LatticePoint, LatticePoint) {
        (self.direction, self.base.cross_product(&self.direction))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RichLine {
    /// Based at the lexicographically least point of the input on it.
    pub line: LatticeLine,
    pub count: usize,
}

pub const RICH_LINES_MAX_POINTS: usize = 100_000;

/// Every line holding at least `k ≥ 2` of the points, with its exact count.
pub fn rich_lines(points: &[LatticePoint], k: usize) -> Result<Vec<RichLine>> {
    if k < 2 {
        return Err(Error::out_of_range("k", k, "k ≥ 2"));
    }
    if points.len() > RICH_LINES_MAX_POINTS {
        return Err(Error::out_of_range("#P", points.len(), "#P ≤ 10^5"));
    }
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let per_point: Vec<Vec<RichLine>> = (0..pts.len())
        .into_par_iter()
        .map_init(FxHashMap::<LatticePoint, (usize, bool)>::default, |dirs, i| {
            dirs.clear();
            let pi = pts[i];
            for (j, pj) in pts.iter().enumerate() {
                if j == i {
                    continue;
                }
                let e = dirs.entry((*pj - pi).primitive_canonical()).or_insert((0, false));
                e.0 += 1;
                e.1 |= j < i;
            }
            let mut out: Vec<RichLine> = dirs
                .iter()
                .filter(|(_, &(c, smaller))| !smaller && c + 1 >= k)
                .map(|(&d, &(c, _))| RichLine {
                    line: LatticeLine { base: pi, direction: d },
                    count: c + 1,
                })
                .collect();
            out.sort_unstable();
            out
        })
        .collect();
    let mut all: Vec<RichLine> = per_point.into_iter().flatten().collect();
    all.sort_unstable();
    Ok(all)
}

/// Reference construction: every point pair spans a line, grouped by key.
pub fn rich_lines_naive(points: &[LatticePoint], k: usize) -> Result<Vec<RichLine>> {
    if k < 2 {
        return Err(Error::out_of_range("k", k, "k ≥ 2"));
    }
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut lines: BTreeMap<(LatticePoint, LatticePoint), Vec<LatticePoint>> = BTreeMap::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let l = LatticeLine::new(*a, *b - *a)?;
            lines.entry(l.key()).or_default().extend([*a, *b]);
        }
    }
    let mut out: Vec<RichLine> = lines
        .into_iter()
        .filter_map(|((direction, _), mut members)| {
            members.sort_unstable();
            members.dedup();
            (members.len() >= k).then(|| RichLine {
                line: LatticeLine { base: members[0], direction },
                count: members.len(),
            })
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// A point of the projective plane, i.e. `±v` on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProjectivePoint {
    rep: LatticePoint,
}

impl ProjectivePoint {
    pub fn new(v: LatticePoint) -> Result<Self> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        v.check_bound()?;
        Ok(ProjectivePoint {
            rep: v.primitive_canonical(),
        })
    }

    pub fn rep(&self) -> LatticePoint {
        self.rep
    }
}

/// The great circle `{v : v·normal = 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GreatCircle {
    pub normal: ProjectivePoint,
}

impl GreatCircle {
    pub fn new(normal: LatticePoint) -> Result<Self> {
        Ok(GreatCircle {
            normal: ProjectivePoint::new(normal)?,
        })
    }

    pub fn contains(&self, p: &ProjectivePoint) -> bool {
        p.rep.dot(&self.normal.rep) == 0
    }
}

pub type Rational = Ratio<i128>;

/// Chart `i` (the dominant coordinate) and the planar image
/// `(v_j/v_i, v_k/v_i)` with `j < k` the other indices.
pub fn chart_image(p: &ProjectivePoint) -> (usize, [Rational; 2]) {
    let v = p.rep.0;
    let i = (0..3).max_by_key(|&i| (v[i].abs(), std::cmp::Reverse(i))).unwrap();
    let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
    let den = v[i] as i128;
    (
        i,
        [
            Rational::new(v[others[0]] as i128, den),
            Rational::new(v[others[1]] as i128, den),
        ],
    )
}

/// The circle seen in chart `i`: `A X + B Y + C = 0`.
pub fn chart_line(c: &GreatCircle, i: usize) -> [i128; 3] {
    let n = c.normal.rep.0;
    let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
    [n[others[0]] as i128, n[others[1]] as i128, n[i] as i128]
}

/// `Ψ(x) = (x₁/x₃, x₂/x₃)` for `x₃ ≠ 0`.
pub fn gnomonic(v: &LatticePoint) -> Option<[Rational; 2]> {
    (v.0[2] != 0).then(|| {
        [
            Rational::new(v.0[0] as i128, v.0[2] as i128),
            Rational::new(v.0[1] as i128, v.0[2] as i128),
        ]
    })
}

pub fn on_rational_line(p: &[Rational; 2], l: &[i128; 3]) -> bool {
    let v = p[0] * Rational::from_integer(l[0]) + p[1] * Rational::from_integer(l[1]) + Rational::from_integer(l[2]);
    v == Rational::from_integer(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SphereIncidences {
    pub direct: u64,
    pub via_projection: u64,
    pub per_chart: [u64; 3],
}

impl SphereIncidences {
    pub fn consistent(&self) -> bool {
        self.direct == self.via_projection
    }
}

/// Incident (point, circle) pairs, counted directly and through the three
/// gnomonic charts.
pub fn count_incidences_sphere(points: &[ProjectivePoint], circles: &[GreatCircle]) -> SphereIncidences {
    let mut direct = 0u64;
    for c in circles {
        for p in points {
            if c.contains(p) {
                direct += 1;
            }
        }
    }
    let images: Vec<(usize, [Rational; 2])> = points.iter().map(chart_image).collect();
    let mut per_chart = [0u64; 3];
    for c in circles {
        let lines = [chart_line(c, 0), chart_line(c, 1), chart_line(c, 2)];
        for (i, img) in &images {
            if on_rational_line(img, &lines[*i]) {
                per_chart[*i] += 1;
            }
        }
    }
    SphereIncidences {
        direct,
        via_projection: per_chart.iter().sum(),
        per_chart,
    }
}

/// Pairs `(ℓ, ℓ')` through `ξ` with `v_ℓ·Av_{ℓ'} = 0`, as incidences between
/// the directions of `L` and the circles with normals `Av_{ℓ'}`.
pub fn crossing_incidence_count(xi: &LatticePoint, l: &[LatticeLine], l2: &[LatticeLine]) -> Result<SphereIncidences> {
    for line in l.iter().chain(l2) {
        if !line.contains(xi) {
            return Err(Error::Invalid(format!("line {line:?} does not pass through {xi:?}")));
        }
    }
    let points: Vec<ProjectivePoint> = l.iter().map(|x| ProjectivePoint::new(x.direction)).collect::<Result<_>>()?;
    let circles: Vec<GreatCircle> = l2
        .iter()
        .map(|x| GreatCircle::new(x.direction.apply_form()))
        .collect::<Result<_>>()?;
    Ok(count_incidences_sphere(&points, &circles))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineFamily {
    /// Lines with `s ≤ #(ℓ ∩ S) < 2s`.
    pub s: usize,
    pub lines: usize,
    pub incidences: usize,
    /// `max_ξ J^s_ξ`, the most family lines through one point.
    pub max_lines_through_point: usize,
    /// `J^s_ξ` for the points with at least one family line.
    #[serde(skip)]
    pub per_point: BTreeMap<LatticePoint, usize>,
}

pub const LINE_FAMILY_MAX_POINTS: usize = 10_000;

/// Dyadic families of off-cone lines through at least two points of `S`.
pub fn line_family_statistics(s: &[LatticePoint]) -> Result<Vec<LineFamily>> {
    if s.len() > LINE_FAMILY_MAX_POINTS {
        return Err(Error::out_of_range("#S", s.len(), "#S ≤ 10^4"));
    }
    let lines = rich_lines(s, 2)?;
    let mut pts = s.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut families: BTreeMap<usize, LineFamily> = BTreeMap::new();
    for rl in lines.iter().filter(|rl| !cone_contains(&rl.line.direction)) {
        let dyadic = 1usize << (usize::BITS - 1 - rl.count.leading_zeros());
        let fam = families.entry(dyadic).or_insert_with(|| LineFamily {
            s: dyadic,
            lines: 0,
            incidences: 0,
            max_lines_through_point: 0,
            per_point: BTreeMap::new(),
        });
        fam.lines += 1;
        fam.incidences += rl.count;
        for p in pts.iter().filter(|p| rl.line.contains(p)) {
            *fam.per_point.entry(*p).or_default() += 1;
        }
    }
    let mut out: Vec<LineFamily> = families.into_values().collect();
    for f in &mut out {
        f.max_lines_through_point = f.per_point.values().copied().max().unwrap_or(0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    fn p(a: i64, b: i64, c: i64) -> LatticePoint {
        LatticePoint::new(a, b, c)
    }

    fn grid(k: i64) -> Vec<[i64; 2]> {
        (0..k).flat_map(|x| (0..k).map(move |y| [x, y])).collect()
    }

    fn grid_lines(k: i64) -> Vec<PlanarLine> {
        let pts = grid(k);
        let mut out = BTreeSet::new();
        for a in &pts {
            for b in &pts {
                if a < b {
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    if dx == 0 || dy == 0 || dx.abs() == dy.abs() {
                        out.insert(PlanarLine::through(*a, *b).unwrap());
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    // All lines with at least two points, from the pair loop.
    fn pair_loop_lines(s: &[LatticePoint]) -> BTreeMap<(LatticePoint, LatticePoint), BTreeSet<LatticePoint>> {
        let mut m: BTreeMap<_, BTreeSet<LatticePoint>> = BTreeMap::new();
        for a in s {
            for b in s {
                if a != b {
                    let l = LatticeLine::new(*a, *b - *a).unwrap();
                    let e = m.entry(l.key()).or_default();
                    e.insert(*a);
                    e.insert(*b);
                }
            }
        }
        m
    }

    #[test]
    fn planar_examples() {
        let line = PlanarLine::new(1, -1, 0).unwrap();
        let pts: Vec<[i64; 2]> = (0..7).map(|i| [i, i]).collect();
        assert_eq!(count_incidences_point_line(&pts, &[line]), 7);
        assert_eq!(count_incidences_point_line(&pts, &[]), 0);
        let k = 6;
        let g = grid(k);
        let ls = grid_lines(k);
        assert_eq!(count_incidences_point_line(&g, &ls), count_incidences_point_line_naive(&g, &ls));
        assert_eq!(PlanarLine::new(-2, 4, 6).unwrap(), PlanarLine { a: 1, b: -2, c: -3 });
    }

    #[test]
    fn planar_random_matches_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let pts: Vec<[i64; 2]> = (0..80).map(|_| [rng.gen_range(-6..=6), rng.gen_range(-6..=6)]).collect();
            let ls: Vec<PlanarLine> = (0..60)
                .filter_map(|_| PlanarLine::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-8..=8)).ok())
                .collect();
            assert_eq!(count_incidences_point_line(&pts, &ls), count_incidences_point_line_naive(&pts, &ls));
        }
    }

    #[test]
    fn rich_line_examples() {
        let col: Vec<LatticePoint> = (0..5).map(|i| p(2 * i, -i, 3 * i)).collect();
        let r = rich_lines(&col, 5).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].count, 5);

        let g: Vec<LatticePoint> = (0..4).flat_map(|x| (0..4).map(move |y| p(x, y, 0))).collect();
        let r = rich_lines(&g, 4).unwrap();
        assert_eq!(r.len(), 10);
        assert!(r.iter().all(|l| l.count == 4));

        let general = vec![p(0, 0, 0), p(1, 0, 0), p(0, 1, 0), p(0, 0, 1), p(1, 2, 4), p(3, 1, 7)];
        assert!(rich_lines(&general, 3).unwrap().is_empty());
        assert!(rich_lines(&general, 1).is_err());
    }

    #[test]
    fn rich_lines_match_pair_loop_and_ignore_order() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut s: Vec<LatticePoint> =
            (0..120).map(|_| p(rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-1..=1))).collect();
        s.sort_unstable();
        s.dedup();
        let oracle = pair_loop_lines(&s);
        for k in 2..=5 {
            let fast = rich_lines(&s, k).unwrap();
            let expected: BTreeMap<_, usize> =
                oracle.iter().filter(|(_, v)| v.len() >= k).map(|(key, v)| (*key, v.len())).collect();
            let got: BTreeMap<_, usize> = fast.iter().map(|r| (r.line.key(), r.count)).collect();
            assert_eq!(got, expected);
            for r in &fast {
                let members = &oracle[&r.line.key()];
                assert_eq!(Some(&r.line.base), members.iter().next());
            }
            assert_eq!(rich_lines_naive(&s, k).unwrap(), fast);
            let mut shuffled = s.clone();
            shuffled.reverse();
            assert_eq!(rich_lines(&shuffled, k).unwrap(), fast);
        }
    }

    #[test]
    fn sphere_examples() {
        let pt = ProjectivePoint::new(p(1, 1, 0)).unwrap();
        let c = GreatCircle::new(p(1, 1, 0).apply_form()).unwrap();
        assert!(c.contains(&pt));
        assert_eq!(count_incidences_sphere(&[pt], &[]).direct, 0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let rnd = |rng: &mut rand_chacha::ChaCha8Rng| loop {
            let v = p(rng.gen_range(-4..=4), rng.gen_range(-4..=4), rng.gen_range(-4..=4));
            if !v.is_zero() {
                return v;
            }
        };
        let pts: Vec<ProjectivePoint> = (0..50).map(|_| ProjectivePoint::new(rnd(&mut rng)).unwrap()).collect();
        let cs: Vec<GreatCircle> = (0..50).map(|_| GreatCircle::new(rnd(&mut rng)).unwrap()).collect();
        let s = count_incidences_sphere(&pts, &cs);
        assert!(s.consistent());
        assert!(s.direct > 0);
    }

    #[test]
    fn gnomonic_preserves_incidence() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..2000 {
            let v = p(rng.gen_range(-5..=5), rng.gen_range(-5..=5), rng.gen_range(1..=5));
            let n = p(rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            if n.0[0] == 0 && n.0[1] == 0 {
                continue;
            }
            let img = gnomonic(&v).unwrap();
            let line = [n.0[0] as i128, n.0[1] as i128, n.0[2] as i128];
            assert_eq!(v.dot(&n) == 0, on_rational_line(&img, &line));
        }
    }

    #[test]
    fn crossing_examples() {
        let xi = p(2, 3, 5);
        let l = |d: LatticePoint| LatticeLine::new(xi, d).unwrap();
        let c = crossing_incidence_count(&xi, &[l(p(1, 1, 0))], &[l(p(1, 1, 0))]).unwrap();
        assert_eq!(c.direct, 1);
        let c = crossing_incidence_count(&xi, &[l(p(1, 0, 0))], &[l(p(0, 1, 0))]).unwrap();
        assert_eq!(c.direct, 1);
        let far = LatticeLine::new(p(0, 0, 0), p(1, 0, 0)).unwrap();
        assert!(crossing_incidence_count(&xi, &[far], &[]).is_err());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let dirs: Vec<LatticeLine> = (0..20)
            .map(|_| loop {
                let d = p(rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3));
                if !d.is_zero() {
                    break l(d);
                }
            })
            .collect();
        let c = crossing_incidence_count(&xi, &dirs, &dirs).unwrap();
        let mut naive = 0;
        for a in &dirs {
            for b in &dirs {
                if a.direction.cross(&b.direction) == 0 {
                    naive += 1;
                }
            }
        }
        assert_eq!(c.direct, naive);
        assert!(c.consistent());
    }

    #[test]
    fn family_examples() {
        let off: Vec<LatticePoint> = (0..11).map(|i| p(i, 0, 2 * i)).collect();
        let t = line_family_statistics(&off).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].s, t[0].lines), (8, 1));

        let on: Vec<LatticePoint> = (0..11).map(|i| p(i, i, 0)).collect();
        assert!(line_family_statistics(&on).unwrap().is_empty());

        let slab: Vec<LatticePoint> = (0..5).flat_map(|x| (0..5).map(move |y| p(x, y, 0))).collect();
        let t = line_family_statistics(&slab).unwrap();
        let oracle = pair_loop_lines(&slab);
        let mut expected: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for ((dir, _), members) in &oracle {
            if cone_contains(dir) {
                continue;
            }
            let s = 1usize << (usize::BITS - 1 - members.len().leading_zeros());
            let e = expected.entry(s).or_default();
            e.0 += 1;
            e.1 += members.len();
        }
        let got: BTreeMap<usize, (usize, usize)> = t.iter().map(|f| (f.s, (f.lines, f.incidences))).collect();
        assert_eq!(got, expected);
        for f in &t {
            assert_eq!(f.per_point.values().sum::<usize>(), f.incidences);
        }
    }
}
