//! Heavy cone-normal planes and the error part left off them.

use num_rational::BigRational;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::Result;
use crate::lattice::{enumerate_cone_irr, EnumerationMethod, Plane};
use crate::weighted::{Scalar, WeightedSet};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeavyPlane {
    pub plane: Plane,
    /// `‖f χ_H‖²`.
    pub mass: Scalar,
}

/// Planes `n·ξ = c` with `n ∈ Cone^irr_M` (one sign per normal) carrying
/// squared mass at least `‖f‖²/M²`; sorted by plane.
pub fn heavy_planes(f: &WeightedSet, m: i64) -> Result<Vec<HeavyPlane>> {
    let cat = enumerate_cone_irr(m, EnumerationMethod::Parametrized)?;
    let m2 = (m as i128) * (m as i128);
    let mut out = Vec::new();
    match f.exact_weights() {
        Some(w) => {
            let total: BigRational = w.iter().map(|x| x * x).sum();
            let threshold = &total / BigRational::from_integer(m2.into());
            for n in cat.canonical_directions() {
                let mut by_c: FxHashMap<i64, BigRational> = FxHashMap::default();
                for (p, x) in f.points().iter().zip(w) {
                    *by_c.entry(n.dot(p)).or_default() += x * x;
                }
                for (c, mass) in by_c {
                    if mass >= threshold {
                        out.push(HeavyPlane {
                            plane: Plane::new(n, c)?,
                            mass: Scalar::Exact(mass),
                        });
                    }
                }
            }
        }
        None => {
            let w: Vec<f64> = (0..f.len()).map(|i| f.weight_c64(i).norm_sqr()).collect();
            let total = f.l2_norm_sq();
            for n in cat.canonical_directions() {
                let mut by_c: FxHashMap<i64, Vec<f64>> = FxHashMap::default();
                for (p, x) in f.points().iter().zip(&w) {
                    by_c.entry(n.dot(p)).or_default().push(*x);
                }
                for (c, parts) in by_c {
                    let mass = crate::weighted::neumaier_sum(&parts);
                    if mass * (m2 as f64) >= total {
                        out.push(HeavyPlane {
                            plane: Plane::new(n, c)?,
                            mass: Scalar::Numeric(mass),
                        });
                    }
                }
            }
        }
    }
    out.sort_unstable_by_key(|a| a.plane);
    Ok(out)
}

/// `f` restricted to the points on none of the heavy planes.
pub fn error_part(f: &WeightedSet, m: i64) -> Result<WeightedSet> {
    let planes = heavy_planes(f, m)?;
    Ok(off_planes(f, &planes))
}

pub fn off_planes(f: &WeightedSet, planes: &[HeavyPlane]) -> WeightedSet {
    f.filter(|p| !planes.iter().any(|h| h.plane.contains(p)))
}
