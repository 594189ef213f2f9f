//! Sobolev norms of Fourier data, the ill-posedness family `φ_N`, and a
//! split-step integrator for `i∂_t u + □u = ±|u|^{2k}u` on the 3-torus.
//!
//! Time runs with the phase `e^{2πi t h(ξ)}`, so one period is `t ∈ [0, 1]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::spectral::Fft3;
use crate::weighted::{neumaier_sum, WeightedSet};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `⟨ξ⟩^{2s} = (1 + |ξ|²)^s`.
pub fn bracket_weight(xi: &LatticePoint, s: f64) -> f64 {
    (1.0 + xi.norm_sq() as f64).powf(s)
}

pub fn hs_norm_sq(f: &WeightedSet, s: f64) -> f64 {
    let terms: Vec<f64> = f.entries_c64().map(|(p, w)| bracket_weight(&p, s) * w.norm_sqr()).collect();
    neumaier_sum(&terms)
}

pub fn hs_norm(f: &WeightedSet, s: f64) -> f64 {
    hs_norm_sq(f, s).sqrt()
}

pub const ILLPOSED_MAX_N: i64 = 1_000_000;

/// `φ_N = Σ_{k=1}^N e^{2πi(k,k,0)·x}/k`.
pub fn illposed_data(n: i64) -> Result<WeightedSet> {
    if !(1..=ILLPOSED_MAX_N).contains(&n) {
        return Err(Error::out_of_range("N", n, "1 ≤ N ≤ 10^6"));
    }
    WeightedSet::from_numeric((1..=n).map(|k| (LatticePoint::new(k, k, 0), Complex64::new(1.0 / k as f64, 0.0))))
}

/// `Σ_{k=1}^N √(1+2k²)/k²`, the squared `H^{1/2}` norm of `φ_N`.
pub fn illposed_norm_sq(n: i64) -> f64 {
    let terms: Vec<f64> = (1..=n)
        .map(|k| {
            let k = k as f64;
            (1.0 + 2.0 * k * k).sqrt() / (k * k)
        })
        .collect();
    neumaier_sum(&terms)
}

/// Fourier coefficients of `|u|²u`: `Σ_{k1−k2+k3=k} f(k1)·conj f(k2)·f(k3)`.
pub fn cubic_convolution(f: &WeightedSet, budget: u128) -> Result<WeightedSet> {
    let n = f.len() as u128;
    let work = n * n * n;
    if work > budget {
        return Err(Error::Budget {
            work,
            budget,
            detail: "cubic convolution".into(),
        });
    }
    let entries: Vec<(LatticePoint, Complex64)> = f.entries_c64().collect();
    let mut pair: FxHashMap<LatticePoint, Complex64> = FxHashMap::default();
    let mut order = Vec::new();
    for (p1, w1) in &entries {
        for (p3, w3) in &entries {
            let s = *p1 + *p3;
            let e = pair.entry(s).or_insert_with(|| {
                order.push(s);
                ZERO
            });
            *e += w1 * w3;
        }
    }
    let mut out: FxHashMap<LatticePoint, Complex64> = FxHashMap::default();
    let mut out_order = Vec::new();
    for s in &order {
        let ps = pair[s];
        for (p2, w2) in &entries {
            let k = *s - *p2;
            let e = out.entry(k).or_insert_with(|| {
                out_order.push(k);
                ZERO
            });
            *e += ps * w2.conj();
        }
    }
    WeightedSet::from_numeric(out_order.into_iter().map(|k| (k, out[&k])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PicardMethod {
    Direct,
    Fft,
    Auto,
}

pub const PICARD_MAX_N: i64 = 100_000;
pub const PICARD_DIRECT_MAX_N: i64 = 1 << 13;

/// Coefficients of `|φ_N|²φ_N` on the line `(k,k,0)`, for
/// `k ∈ [2−N, 2N−1]`.
pub fn picard_coefficients(n: i64, method: PicardMethod) -> Result<Vec<(i64, f64)>> {
    if !(1..=PICARD_MAX_N).contains(&n) {
        return Err(Error::out_of_range("N", n, "1 ≤ N ≤ 10^5"));
    }
    let nu = n as usize;
    let mut harmonic = vec![0.0f64; nu + 1];
    for k in 1..=nu {
        harmonic[k] = harmonic[k - 1] + 1.0 / k as f64;
    }
    // pair sums Σ_{k1+k3=s} 1/(k1 k3) = (2/s)·Σ_{k1} 1/k1
    let mut p = vec![0.0f64; 2 * nu + 1];
    for (s, ps) in p.iter_mut().enumerate().skip(2) {
        let hi = (s - 1).min(nu);
        let lo = s.saturating_sub(nu).max(1);
        *ps = 2.0 / s as f64 * (harmonic[hi] - harmonic[lo - 1]);
    }
    let use_fft = match method {
        PicardMethod::Direct => false,
        PicardMethod::Fft => true,
        PicardMethod::Auto => n > PICARD_DIRECT_MAX_N,
    };
    let ks = 2 - n..=2 * n - 1;
    if !use_fft {
        return Ok(ks
            .map(|k| {
                let lo = (2 - k).max(1);
                let hi = (2 * n - k).min(n);
                let terms: Vec<f64> = (lo..=hi).map(|k2| p[(k + k2) as usize] / k2 as f64).collect();
                (k, neumaier_sum(&terms))
            })
            .collect());
    }
    let len = (3 * nu + 2).next_power_of_two();
    let mut a = vec![ZERO; len];
    let mut b = vec![ZERO; len];
    for (i, v) in p.iter().enumerate() {
        a[i] = Complex64::new(*v, 0.0);
    }
    for j in 1..=nu {
        b[(len - j) % len] = Complex64::new(1.0 / j as f64, 0.0);
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inv.process(&mut a);
    let scale = 1.0 / len as f64;
    Ok(ks.map(|k| (k, a[k.rem_euclid(len as i64) as usize].re * scale)).collect())
}

/// `‖|φ_N|²φ_N‖_{H^{1/2}} / ‖φ_N‖³_{H^{1/2}}`.
pub fn picard_ratio(n: i64) -> Result<f64> {
    picard_ratio_with(n, PicardMethod::Auto)
}

pub fn picard_ratio_with(n: i64, method: PicardMethod) -> Result<f64> {
    let c = picard_coefficients(n, method)?;
    let terms: Vec<f64> = c
        .iter()
        .map(|&(k, v)| {
            let k = k as f64;
            (1.0 + 2.0 * k * k).sqrt() * v * v
        })
        .collect();
    Ok(neumaier_sum(&terms).sqrt() / illposed_norm_sq(n).powf(1.5))
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralState {
    pub coefficients: WeightedSet,
    /// Truncation radius: every mode satisfies `max |ξ_i| ≤ radius`.
    pub radius: i64,
    pub time: f64,
}

impl SpectralState {
    pub fn new(coefficients: WeightedSet, radius: i64, time: f64) -> Result<Self> {
        if radius < 0 {
            return Err(Error::out_of_range("radius", radius, "radius ≥ 0"));
        }
        let numeric = if coefficients.is_exact() { coefficients.to_numeric() } else { coefficients };
        if let Some(p) = numeric.points().iter().find(|p| p.0.iter().any(|c| c.abs() > radius)) {
            return Err(Error::Support(format!("{p:?} lies outside the box of radius {radius}")));
        }
        Ok(SpectralState {
            coefficients: numeric,
            radius,
            time,
        })
    }

    /// `‖u‖²_{L²} = Σ |û|²`.
    pub fn mass(&self) -> f64 {
        self.coefficients.l2_norm_sq()
    }

    pub fn hs_norm(&self, s: f64) -> f64 {
        hs_norm(&self.coefficients, s)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvolveConfig {
    /// Nonlinearity `|u|^{2k}u`.
    pub k: u32,
    /// `±1`.
    pub sign: i32,
    pub dt: f64,
    pub steps: usize,
    /// Grid points per axis, a power of two.
    pub grid: usize,
    /// Drop the nonlinear substep.
    pub linear_only: bool,
    /// Project onto the initial truncation box after each step.
    pub project: bool,
    /// Record diagnostics every this many steps (0: endpoints only).
    pub record_every: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    pub h_half: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evolution {
    pub state: SpectralState,
    pub diagnostics: Vec<Diagnostic>,
}

/// Largest initial support radius allowed on a grid: the 2/3 rule for the
/// cubic, `⌊g/(k+2)⌋` in general.
pub fn dealias_radius(grid: usize, k: u32) -> i64 {
    (grid / (k as usize + 2)) as i64
}

/// `max |h|` over the frequencies a grid represents.
pub fn grid_symbol_max(grid: usize) -> f64 {
    let r = (grid / 2) as f64;
    2.0 * r * r
}

fn check_config(state: &SpectralState, cfg: &EvolveConfig) -> Result<()> {
    if cfg.grid < 2 || !cfg.grid.is_power_of_two() || cfg.grid > 256 {
        return Err(Error::out_of_range("grid", cfg.grid, "a power of two in [2, 256]"));
    }
    if cfg.k == 0 {
        return Err(Error::out_of_range("k", cfg.k, "k ≥ 1"));
    }
    if cfg.sign != 1 && cfg.sign != -1 {
        return Err(Error::out_of_range("sign", cfg.sign, "±1"));
    }
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(Error::out_of_range("dt", cfg.dt, "dt > 0"));
    }
    let cfl = cfg.dt * grid_symbol_max(cfg.grid);
    if cfl > 0.5 {
        return Err(Error::Stability(format!("dt·max|h| = {cfl} exceeds 0.5")));
    }
    let rmax = dealias_radius(cfg.grid, cfg.k);
    if !cfg.linear_only {
        if let Some(p) = state.coefficients.points().iter().find(|p| p.0.iter().any(|c| c.abs() > rmax)) {
            return Err(Error::Stability(format!(
                "mode {p:?} violates the dealiasing margin {rmax} for grid {}",
                cfg.grid
            )));
        }
    } else if let Some(p) = state.coefficients.points().iter().find(|p| p.0.iter().any(|c| c.abs() >= (cfg.grid / 2) as i64)) {
        return Err(Error::Support(format!("mode {p:?} does not fit grid {}", cfg.grid)));
    }
    Ok(())
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * theta.fract())
}

fn diagnostic(fft: &Fft3, dense: &[Complex64], step: usize, t: f64) -> Diagnostic {
    let mass: Vec<f64> = dense.iter().map(|z| z.norm_sqr()).collect();
    let h: Vec<f64> = dense
        .iter()
        .enumerate()
        .map(|(i, z)| bracket_weight(&fft.frequency(i), 0.5) * z.norm_sqr())
        .collect();
    Diagnostic {
        step,
        t,
        mass: neumaier_sum(&mass),
        h_half: neumaier_sum(&h).sqrt(),
    }
}

/// Strang splitting: half linear step, exact nonlinear phase
/// `u ↦ u·e^{∓2πi dt |u|^{2k}}`, half linear step.
pub fn splitstep_evolve(state: &SpectralState, cfg: &EvolveConfig) -> Result<Evolution> {
    check_config(state, cfg)?;
    let fft = Fft3::new(cfg.grid);
    let len = fft.len();
    let mut dense = vec![ZERO; len];
    for (p, w) in state.coefficients.entries_c64() {
        dense[fft.index(&p)] = w;
    }
    let symbols: Vec<i64> = (0..len).map(|i| fft.frequency(i).h()).collect();
    let full: Vec<Complex64> = symbols.iter().map(|&h| phase(cfg.dt * h as f64)).collect();
    let half: Vec<Complex64> = symbols.iter().map(|&h| phase(0.5 * cfg.dt * h as f64)).collect();
    let box_mask: Vec<bool> = (0..len)
        .map(|i| fft.frequency(i).0.iter().all(|c| c.abs() <= state.radius))
        .collect();
    let every = cfg.record_every;
    let mut diagnostics = vec![diagnostic(&fft, &dense, 0, state.time)];
    let norm = 1.0 / len as f64;
    let strength = -(cfg.sign as f64) * cfg.dt;
    for step in 1..=cfg.steps {
        if cfg.linear_only {
            dense.iter_mut().zip(&full).for_each(|(z, m)| *z *= m);
        } else {
            dense.iter_mut().zip(&half).for_each(|(z, m)| *z *= m);
            fft.inverse(&mut dense);
            dense.par_chunks_mut(cfg.grid).for_each(|row| {
                for u in row {
                    let a = u.norm_sqr().powi(cfg.k as i32);
                    *u *= phase(strength * a);
                }
            });
            fft.forward(&mut dense);
            dense.iter_mut().zip(&half).for_each(|(z, m)| *z *= m * norm);
            if cfg.project {
                dense.iter_mut().zip(&box_mask).filter(|(_, m)| !**m).for_each(|(z, _)| *z = ZERO);
            }
        }
        if (every > 0 && step % every == 0) || step == cfg.steps {
            let t = state.time + step as f64 * cfg.dt;
            if diagnostics.last().map(|d| d.step) != Some(step) {
                diagnostics.push(diagnostic(&fft, &dense, step, t));
            }
        }
    }
    let coefficients = WeightedSet::from_numeric((0..len).map(|i| (fft.frequency(i), dense[i])))?;
    let radius = if cfg.linear_only || cfg.project {
        state.radius
    } else {
        (cfg.grid / 2) as i64
    };
    Ok(Evolution {
        state: SpectralState {
            coefficients,
            radius,
            time: state.time + cfg.steps as f64 * cfg.dt,
        },
        diagnostics,
    })
}

/// `Σ |a_ξ − b_ξ|²` over the union of supports, square-rooted.
pub fn state_distance(a: &WeightedSet, b: &WeightedSet) -> f64 {
    let mut terms = Vec::new();
    for (p, w) in a.entries_c64() {
        terms.push((w - b.weight_at(&p)).norm_sqr());
    }
    for (p, w) in b.entries_c64() {
        if a.index_of(&p).is_none() {
            terms.push(w.norm_sqr());
        }
    }
    neumaier_sum(&terms).sqrt()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Convergence {
    pub error_dt: f64,
    pub error_half_dt: f64,
    pub contraction: f64,
}

/// Terminal errors at `dt` and `dt/2` against a reference run at
/// `dt/refine`, all to the same final time.
pub fn splitstep_convergence(state: &SpectralState, cfg: &EvolveConfig, refine: usize) -> Result<Convergence> {
    if refine < 4 || !refine.is_power_of_two() {
        return Err(Error::out_of_range("refine", refine, "a power of two ≥ 4"));
    }
    let run = |factor: usize| {
        let c = EvolveConfig {
            dt: cfg.dt / factor as f64,
            steps: cfg.steps * factor,
            record_every: 0,
            ..*cfg
        };
        splitstep_evolve(state, &c).map(|e| e.state.coefficients)
    };
    let reference = run(refine)?;
    let e1 = state_distance(&run(1)?, &reference);
    let e2 = state_distance(&run(2)?, &reference);
    Ok(Convergence {
        error_dt: e1,
        error_half_dt: e2,
        contraction: e1 / e2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn p(a: i64, b: i64, c: i64) -> LatticePoint {
        LatticePoint::new(a, b, c)
    }

    fn random_set(seed: u64, n: usize, r: i64) -> WeightedSet {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        WeightedSet::from_numeric((0..n).map(|_| {
            (
                p(rng.gen_range(-r..=r), rng.gen_range(-r..=r), rng.gen_range(-r..=r)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        }))
        .unwrap()
    }

    fn triple_loop(f: &WeightedSet) -> FxHashMap<LatticePoint, Complex64> {
        let e: Vec<_> = f.entries_c64().collect();
        let mut out: FxHashMap<LatticePoint, Complex64> = FxHashMap::default();
        for (a, wa) in &e {
            for (b, wb) in &e {
                for (c, wc) in &e {
                    *out.entry(*a - *b + *c).or_insert(ZERO) += wa * wb.conj() * wc;
                }
            }
        }
        out
    }

    #[test]
    fn hs_norm_examples() {
        let delta = WeightedSet::from_numeric([(LatticePoint::ZERO, Complex64::new(1.0, 0.0))]).unwrap();
        for s in [0.0, 0.5, 3.0] {
            assert_eq!(hs_norm(&delta, s), 1.0);
        }
        let f = random_set(1, 30, 5);
        assert!((hs_norm(&f, 0.0) - f.l2_norm()).abs() < 1e-12);
        let phi1 = illposed_data(1).unwrap();
        assert!((hs_norm(&phi1, 0.5) - 3f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(illposed_data(2).unwrap().len(), 2);
        assert!(illposed_data(0).is_err());
        assert!(illposed_data(ILLPOSED_MAX_N + 1).is_err());
        assert!(phi1.points().iter().all(|q| q.h() == 0));
        let phi = illposed_data(300).unwrap();
        assert!((hs_norm_sq(&phi, 0.5) - illposed_norm_sq(300)).abs() < 1e-12);
    }

    #[test]
    fn cubic_convolution_matches_triple_loop() {
        let single = WeightedSet::from_numeric([(p(1, 2, 3), Complex64::new(0.5, -1.5))]).unwrap();
        let c = cubic_convolution(&single, u128::MAX).unwrap();
        let a = Complex64::new(0.5, -1.5);
        assert_eq!(c.len(), 1);
        assert!((c.weight_at(&p(1, 2, 3)) - a * a.norm_sqr()).norm() < 1e-15);

        let two = WeightedSet::from_numeric([(p(0, 0, 0), Complex64::new(1.0, 0.0)), (p(1, 0, 2), Complex64::new(1.0, 0.0))]).unwrap();
        let t = triple_loop(&two);
        let c = cubic_convolution(&two, u128::MAX).unwrap();
        assert_eq!(c.len(), t.values().filter(|z| **z != ZERO).count());
        for (k, v) in &t {
            assert!((c.weight_at(k) - v).norm() < 1e-12);
        }
        for seed in 0..20 {
            let f = random_set(seed, 20, 3);
            let t = triple_loop(&f);
            let c = cubic_convolution(&f, u128::MAX).unwrap();
            let scale: f64 = t.values().map(|z| z.norm()).fold(0.0, f64::max);
            for (k, v) in &t {
                assert!((c.weight_at(k) - v).norm() <= 1e-12 * scale);
            }
        }
        assert!(cubic_convolution(&random_set(0, 20, 3), 100).is_err());
    }

    #[test]
    fn picard_coefficients_collapse_to_one_dimension() {
        let n = 30;
        let c = cubic_convolution(&illposed_data(n).unwrap(), u128::MAX).unwrap();
        let one_d = picard_coefficients(n, PicardMethod::Direct).unwrap();
        assert_eq!(one_d.len() as i64, 3 * n - 2);
        for (k, v) in &one_d {
            assert!((c.weight_at(&p(*k, *k, 0)).re - v).abs() < 1e-12);
        }
        assert!(c.points().iter().all(|q| q.0[0] == q.0[1] && q.0[2] == 0));
    }

    #[test]
    fn picard_fft_matches_direct() {
        let d = picard_coefficients(500, PicardMethod::Direct).unwrap();
        let f = picard_coefficients(500, PicardMethod::Fft).unwrap();
        let scale = d.iter().map(|x| x.1.abs()).fold(0.0, f64::max);
        for (a, b) in d.iter().zip(&f) {
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() < 1e-11 * scale);
        }
        let r1 = picard_ratio_with(500, PicardMethod::Direct).unwrap();
        let r2 = picard_ratio_with(500, PicardMethod::Fft).unwrap();
        assert!((r1 - r2).abs() < 1e-11 * r1);
        assert!(picard_ratio(PICARD_MAX_N + 1).is_err());
    }

    #[test]
    fn picard_coefficients_grow_like_log_squared() {
        let n = 1 << 10;
        let c = picard_coefficients(n, PicardMethod::Direct).unwrap();
        let worst = c
            .iter()
            .filter(|(k, _)| (16..=n).contains(k))
            .map(|&(k, v)| v * k as f64 / (k as f64).ln().powi(2))
            .fold(f64::INFINITY, f64::min);
        assert!(worst > 0.5, "{worst}");
    }

    #[test]
    fn picard_ratio_increases() {
        let rs: Vec<f64> = (4..=10).map(|e| picard_ratio(1 << e).unwrap()).collect();
        assert!(rs.windows(2).all(|w| w[1] > w[0]), "{rs:?}");
    }

    fn smooth_state() -> SpectralState {
        let f = WeightedSet::from_numeric([
            (p(0, 0, 0), Complex64::new(0.6, 0.0)),
            (p(1, 0, -1), Complex64::new(0.3, 0.2)),
            (p(-1, 2, 0), Complex64::new(-0.2, 0.25)),
            (p(2, 1, 1), Complex64::new(0.1, -0.3)),
        ])
        .unwrap();
        SpectralState::new(f, 2, 0.0).unwrap()
    }

    fn cfg(grid: usize, dt: f64, steps: usize) -> EvolveConfig {
        EvolveConfig {
            k: 1,
            sign: 1,
            dt,
            steps,
            grid,
            linear_only: false,
            project: false,
            record_every: 0,
        }
    }

    #[test]
    fn linear_evolution_is_exact_and_norm_preserving() {
        let s = smooth_state();
        let c = EvolveConfig {
            linear_only: true,
            ..cfg(16, 1.0 / 300.0, 1000)
        };
        let e = splitstep_evolve(&s, &c).unwrap();
        let t = e.state.time;
        for (q, w) in s.coefficients.entries_c64() {
            let exact = w * phase(t * q.h() as f64);
            assert!((e.state.coefficients.weight_at(&q) - exact).norm() < 1e-12);
        }
        for sob in [0.0, 0.5, 1.0] {
            assert!((hs_norm(&e.state.coefficients, sob) - hs_norm(&s.coefficients, sob)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_solution() {
        let xi = p(1, -2, 1);
        let a = Complex64::new(0.7, 0.4);
        for sign in [1, -1] {
            let s = SpectralState::new(WeightedSet::from_numeric([(xi, a)]).unwrap(), 2, 0.0).unwrap();
            let c = EvolveConfig { sign, ..cfg(8, 1.0 / 128.0, 50) };
            let e = splitstep_evolve(&s, &c).unwrap();
            let t = e.state.time;
            let exact = a * phase(t * xi.h() as f64) * phase(-(sign as f64) * a.norm_sqr() * t);
            assert!((e.state.coefficients.weight_at(&xi) - exact).norm() < 1e-12);
            let rest: f64 = e
                .state
                .coefficients
                .entries_c64()
                .filter(|(q, _)| *q != xi)
                .map(|(_, w)| w.norm_sqr())
                .sum();
            assert!(rest < 1e-24);
        }
    }

    #[test]
    fn mass_is_conserved() {
        let s = smooth_state();
        let c = EvolveConfig { record_every: 100, ..cfg(32, 1.0 / 1024.0, 1000) };
        let e = splitstep_evolve(&s, &c).unwrap();
        let m0 = s.mass();
        assert_eq!(e.diagnostics.len(), 11);
        for d in &e.diagnostics {
            assert!((d.mass - m0).abs() <= 1e-8 * m0);
        }
        assert!(e.state.coefficients.len() > s.coefficients.len());
    }

    #[test]
    fn splitting_is_second_order() {
        let c = cfg(16, 1.0 / 256.0, 16);
        let r = splitstep_convergence(&smooth_state(), &c, 32).unwrap();
        assert!(r.contraction >= 3.0, "{r:?}");
    }

    #[test]
    fn preconditions() {
        let s = smooth_state();
        assert!(matches!(splitstep_evolve(&s, &cfg(16, 0.01, 1)), Err(Error::Stability(_))));
        assert!(splitstep_evolve(&s, &cfg(12, 0.001, 1)).is_err());
        let wide = SpectralState::new(WeightedSet::from_numeric([(p(6, 0, 0), Complex64::new(1.0, 0.0))]).unwrap(), 6, 0.0).unwrap();
        assert!(matches!(splitstep_evolve(&wide, &cfg(16, 0.001, 1)), Err(Error::Stability(_))));
        assert!(SpectralState::new(wide.coefficients.clone(), 5, 0.0).is_err());
        let projected = EvolveConfig { project: true, ..cfg(16, 1.0 / 256.0, 5) };
        let e = splitstep_evolve(&s, &projected).unwrap();
        assert!(e.state.coefficients.points().iter().all(|q| q.0.iter().all(|c| c.abs() <= 2)));
    }
}
