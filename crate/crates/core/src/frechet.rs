//! Fréchet functions, sample Fréchet means and modulation estimates.

use crate::distributions::{local_moments, population_mean_and_variance, DistributionSpec, PopulationMoments};
use crate::error::{FssError, Result};
use crate::geometry::{
    circle_distance, circle_log, dot, norm, sphere_distance, sphere_exp_ambient,
    sphere_log_ambient, tangent_basis, wrap_angle, SpherePoint, TAU,
};
use crate::rng::RandomStream;
use crate::sample::Sample;
use crate::stats;
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `F_n(p) = (1/n) Σ d(X_j, p)²`.
pub fn frechet_function(sample: &Sample, p: &SpherePoint) -> Result<f64> {
    if sample.is_empty() {
        return Err(FssError::EmptySample);
    }
    if sample.dim() != p.dim() {
        return Err(FssError::DimensionMismatch {
            expected: sample.dim(),
            found: p.dim(),
        });
    }
    Ok(match (sample, p) {
        (Sample::Circle(a), SpherePoint::Circle(q)) => circle_frechet(a, *q),
        (Sample::Sphere { dim, coords }, SpherePoint::Sphere(q)) => sphere_frechet(coords, *dim + 1, q),
        _ => unreachable!(),
    })
}

fn circle_frechet(angles: &[f64], p: f64) -> f64 {
    angles
        .iter()
        .map(|&x| {
            let d = circle_distance(x, p);
            d * d
        })
        .sum::<f64>()
        / angles.len() as f64
}

fn sphere_frechet(coords: &[f64], d: usize, p: &[f64]) -> f64 {
    let n = coords.len() / d;
    coords
        .chunks_exact(d)
        .map(|x| {
            let t = sphere_distance(x, p);
            t * t
        })
        .sum::<f64>()
        / n as f64
}

#[derive(Debug, Clone, Copy)]
pub struct MeanOptions {
    /// Low-discrepancy seed points on `S^m`.
    pub seeds: usize,
    /// Gradient descents started from the best seeds.
    pub descents: usize,
    pub max_iter: usize,
    pub gradient_tolerance: f64,
    /// Candidates whose `F_n` differ by less than this are tied.
    pub tie_tolerance: f64,
}

impl Default for MeanOptions {
    fn default() -> Self {
        Self {
            seeds: 32,
            descents: 3,
            max_iter: 1000,
            gradient_tolerance: 1e-10,
            tie_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrechetMeanResult {
    pub mean: SpherePoint,
    pub value: f64,
    pub candidates_evaluated: usize,
    pub tie_flag: bool,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Global sample Fréchet mean on the circle; local minimizer from the best of
/// several seeds on `S^m`. Ties are broken uniformly using `tie_stream`.
pub fn frechet_mean(sample: &Sample, options: &MeanOptions, tie_stream: &RandomStream) -> Result<FrechetMeanResult> {
    match sample {
        Sample::Circle(a) => {
            if a.is_empty() {
                return Err(FssError::EmptySample);
            }
            Ok(circular_mean(a, options.tie_tolerance, tie_stream))
        }
        Sample::Sphere { dim, coords } => {
            if coords.is_empty() {
                return Err(FssError::EmptySample);
            }
            sphere_mean(coords, *dim, options, tie_stream)
        }
    }
}

/// Fréchet mean found by descending from `start` only.
///
/// On the circle the local minimizer is the candidate nearest `start` among
/// the local minima of `F_n`.
pub fn local_frechet_mean(sample: &Sample, start: &SpherePoint, options: &MeanOptions) -> Result<FrechetMeanResult> {
    if sample.dim() != start.dim() {
        return Err(FssError::DimensionMismatch {
            expected: sample.dim(),
            found: start.dim(),
        });
    }
    match (sample, start) {
        (Sample::Circle(a), SpherePoint::Circle(s)) => {
            if a.is_empty() {
                return Err(FssError::EmptySample);
            }
            Ok(circular_local_mean(a, *s))
        }
        (Sample::Sphere { dim, coords }, SpherePoint::Sphere(s)) => {
            if coords.is_empty() {
                return Err(FssError::EmptySample);
            }
            let d = descend(coords, dim + 1, s.clone(), options)?;
            Ok(FrechetMeanResult {
                value: sphere_frechet(coords, dim + 1, &d.point),
                mean: SpherePoint::Sphere(d.point),
                candidates_evaluated: 1,
                tie_flag: false,
                gradient_norm: d.gradient_norm,
                iterations: d.iterations,
            })
        }
        _ => unreachable!(),
    }
}

/// Variances of the `n` cyclic representatives of sorted angles.
///
/// Representative `k` shifts the `k` smallest angles by `2π`; its
/// arithmetic mean is the candidate `x̄ + 2πk/n`. The variance of
/// representative `k` bounds `F_n` at its candidate from above, with
/// equality at the global minimizer, so the smallest variance is
/// `min F_n`.
fn cyclic_variances(sorted: &[f64]) -> Vec<(f64, f64)> {
    let n = sorted.len() as f64;
    let sum: f64 = sorted.iter().sum();
    let sq: f64 = sorted.iter().map(|x| x * x).sum();
    let mut prefix = 0.0;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let kf = k as f64;
            let s = sum + TAU * kf;
            let q = sq + 2.0 * TAU * prefix + TAU * TAU * kf;
            prefix += x;
            let m = s / n;
            (m, (q / n - m * m).max(0.0))
        })
        .collect()
}

fn circular_mean(angles: &[f64], tie_tolerance: f64, tie_stream: &RandomStream) -> FrechetMeanResult {
    let mut sorted = angles.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let reps = cyclic_variances(&sorted);
    let best = reps.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    // Screen with the cheap variances, then compare exact F_n values.
    let slack = tie_tolerance + 1e-12 * best.max(1.0);
    let mut finalists: Vec<(f64, f64)> = reps
        .iter()
        .filter(|r| r.1 <= best + slack)
        .map(|r| {
            let p = wrap_angle(r.0);
            (p, circle_frechet(angles, p))
        })
        .collect();
    finalists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let top = finalists[0].1;
    let tied: Vec<(f64, f64)> = finalists
        .into_iter()
        .filter(|c| c.1 - top < tie_tolerance)
        .collect();
    let tie_flag = tied.len() > 1;
    let pick = if tie_flag {
        tied[tie_stream.rng().random_range(0..tied.len())]
    } else {
        tied[0]
    };
    FrechetMeanResult {
        mean: SpherePoint::Circle(pick.0),
        value: pick.1,
        candidates_evaluated: angles.len(),
        tie_flag,
        gradient_norm: circle_gradient_norm(angles, pick.0),
        iterations: 0,
    }
}

fn circle_gradient_norm(angles: &[f64], p: f64) -> f64 {
    let g: f64 = angles.iter().map(|&x| wrap_angle(x - p)).sum::<f64>();
    2.0 * g.abs() / angles.len() as f64
}

/// Exact Fréchet mean of angles by evaluating `F_n` at all `n` candidates
/// `x̄ + 2πk/n`. Quadratic in `n`; kept as a reference for the sorted
/// prefix-sum method used by [`frechet_mean`].
pub fn circular_mean_by_candidates(angles: &[f64]) -> (f64, f64) {
    let n = angles.len();
    let xbar = angles.iter().sum::<f64>() / n as f64;
    (0..n)
        .map(|k| {
            let p = wrap_angle(xbar + TAU * k as f64 / n as f64);
            (p, circle_frechet(angles, p))
        })
        .fold((0.0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
}

fn circular_local_mean(angles: &[f64], start: f64) -> FrechetMeanResult {
    // fixed point p = p + mean(log_p X) started at `start`
    let mut p = start;
    let mut iterations = 0;
    for it in 0..10_000 {
        iterations = it;
        let shift: f64 = angles.iter().map(|&x| wrap_angle(x - p)).sum::<f64>() / angles.len() as f64;
        let next = wrap_angle(p + shift);
        if circle_distance(next, p) < 1e-15 {
            p = next;
            break;
        }
        p = next;
    }
    FrechetMeanResult {
        mean: SpherePoint::Circle(p),
        value: circle_frechet(angles, p),
        candidates_evaluated: 1,
        tie_flag: false,
        gradient_norm: circle_gradient_norm(angles, p),
        iterations,
    }
}

const HALTON_PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn halton(mut i: u32, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Deterministic, roughly uniform points on `S^m`: Halton pairs mapped to
/// Gaussian coordinates by Box–Muller, then normalized.
pub fn low_discrepancy_points(m: usize, count: usize) -> Vec<Vec<f64>> {
    let d = m + 1;
    (1..=count as u32)
        .map(|i| {
            let mut v = Vec::with_capacity(d + 1);
            for pair in 0..d.div_ceil(2) {
                let b1 = HALTON_PRIMES[(2 * pair) % HALTON_PRIMES.len()];
                let b2 = HALTON_PRIMES[(2 * pair + 1) % HALTON_PRIMES.len()];
                let u1 = halton(i, b1).max(1e-12);
                let u2 = halton(i, b2);
                let r = (-2.0 * u1.ln()).sqrt();
                v.push(r * (TAU * u2).cos());
                v.push(r * (TAU * u2).sin());
            }
            v.truncate(d);
            let n = norm(&v);
            v.iter_mut().for_each(|x| *x /= n);
            v
        })
        .collect()
}

struct Descent {
    point: Vec<f64>,
    value: f64,
    gradient_norm: f64,
    iterations: usize,
}

/// Ambient gradient `-(2/n) Σ log_p X_j`. An iterate antipodal to a data
/// point is nudged by 1e-9 along its first tangent axis.
fn gradient(coords: &[f64], d: usize, p: &mut Vec<f64>, grad: &mut [f64], scratch: &mut [f64]) {
    let n = coords.len() / d;
    'retry: for _ in 0..16 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for x in coords.chunks_exact(d) {
            if sphere_log_ambient(p, x, scratch).is_err() {
                let axis = tangent_basis(p).swap_remove(0);
                let nudge: Vec<f64> = axis.iter().map(|a| 1e-9 * a).collect();
                let mut out = vec![0.0; d];
                sphere_exp_ambient(p, &nudge, &mut out);
                *p = out;
                continue 'retry;
            }
            grad.iter_mut().zip(scratch.iter()).for_each(|(g, l)| *g += l);
        }
        break;
    }
    let s = -2.0 / n as f64;
    grad.iter_mut().for_each(|g| *g *= s);
}

fn descend(coords: &[f64], d: usize, start: Vec<f64>, options: &MeanOptions) -> Result<Descent> {
    const ARMIJO: f64 = 1e-4;
    let mut p = start;
    let mut grad = vec![0.0; d];
    let mut scratch = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut step_vec = vec![0.0; d];
    gradient(coords, d, &mut p, &mut grad, &mut scratch);
    let mut value = sphere_frechet(coords, d, &p);
    let mut step = 0.5;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for iter in 0..options.max_iter {
        let g2 = dot(&grad, &grad);
        let gnorm = g2.sqrt();
        if gnorm < options.gradient_tolerance {
            return Ok(Descent {
                point: p,
                value,
                gradient_norm: gnorm,
                iterations: iter,
            });
        }
        // Barzilai–Borwein step with Armijo backtracking
        if let Some((pp, pg)) = &prev {
            let s: Vec<f64> = p.iter().zip(pp).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = grad.iter().zip(pg).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 0.0 {
                step = (dot(&s, &s) / sy).clamp(1e-3, 50.0);
            } else {
                step = 0.5;
            }
        }
        let slack = 4.0 * f64::EPSILON * value.abs();
        let mut accepted = false;
        for _ in 0..60 {
            let len = step * gnorm;
            if len < PI {
                step_vec.iter_mut().zip(&grad).for_each(|(s, g)| *s = -step * g);
                sphere_exp_ambient(&p, &step_vec, &mut trial);
                let f = sphere_frechet(coords, d, &trial);
                if f <= value - ARMIJO * step * g2 + slack {
                    accepted = true;
                    value = f;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(FssError::NoConvergence {
                iterations: iter,
                gradient_norm: gnorm,
            });
        }
        prev = Some((p.clone(), grad.clone()));
        p.copy_from_slice(&trial);
        gradient(coords, d, &mut p, &mut grad, &mut scratch);
    }
    Err(FssError::NoConvergence {
        iterations: options.max_iter,
        gradient_norm: norm(&grad),
    })
}

fn sphere_mean(coords: &[f64], dim: usize, options: &MeanOptions, tie_stream: &RandomStream) -> Result<FrechetMeanResult> {
    let d = dim + 1;
    let n = coords.len() / d;
    let mut seeds: Vec<Vec<f64>> = Vec::with_capacity(options.seeds + 1);
    let mut ambient = vec![0.0; d];
    for x in coords.chunks_exact(d) {
        ambient.iter_mut().zip(x).for_each(|(a, b)| *a += b / n as f64);
    }
    let an = norm(&ambient);
    if an > 1e-12 {
        seeds.push(ambient.iter().map(|a| a / an).collect());
    }
    seeds.extend(low_discrepancy_points(dim, options.seeds));
    let mut scored: Vec<(f64, Vec<f64>)> = seeds
        .into_iter()
        .map(|s| (sphere_frechet(coords, d, &s), s))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let candidates_evaluated = scored.len();

    let mut found: Vec<Descent> = Vec::new();
    let mut last_err = None;
    for (_, seed) in scored.into_iter().take(options.descents.max(1)) {
        match descend(coords, d, seed, options) {
            Ok(r) => {
                if !found.iter().any(|f| sphere_distance(&f.point, &r.point) < 1e-7) {
                    found.push(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    if found.is_empty() {
        return Err(last_err.unwrap());
    }
    found.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    let top = found[0].value;
    let tied = found.iter().filter(|f| f.value - top < options.tie_tolerance).count();
    let index = if tied > 1 {
        tie_stream.rng().random_range(0..tied)
    } else {
        0
    };
    let iterations = found.iter().map(|f| f.iterations).sum();
    let pick = found.swap_remove(index);
    Ok(FrechetMeanResult {
        mean: SpherePoint::Sphere(pick.point),
        value: pick.value,
        candidates_evaluated,
        tie_flag: tied > 1,
        gradient_norm: pick.gradient_norm,
        iterations,
    })
}

/// Normal coordinates of every sample point at `base`, row-major `n × m`.
pub fn tangent_coordinates(sample: &Sample, base: &SpherePoint) -> Result<Vec<f64>> {
    if sample.dim() != base.dim() {
        return Err(FssError::DimensionMismatch {
            expected: sample.dim(),
            found: base.dim(),
        });
    }
    match (sample, base) {
        (Sample::Circle(a), SpherePoint::Circle(b)) => a.iter().map(|&x| circle_log(*b, x)).collect(),
        (Sample::Sphere { dim, coords }, SpherePoint::Sphere(b)) => {
            let basis = tangent_basis(b);
            let mut out = Vec::with_capacity(coords.len() / (dim + 1) * dim);
            let mut amb = vec![0.0; dim + 1];
            for x in coords.chunks_exact(dim + 1) {
                sphere_log_ambient(b, x, &mut amb)?;
                out.extend(basis.iter().map(|e| dot(e, &amb)));
            }
            Ok(out)
        }
        _ => unreachable!(),
    }
}

/// Centered covariance (`1/n`) of row-major `rows × m` data.
pub fn covariance(data: &[f64], m: usize) -> DMatrix<f64> {
    let n = data.len() / m;
    let mut mean = vec![0.0; m];
    for row in data.chunks_exact(m) {
        mean.iter_mut().zip(row).for_each(|(a, b)| *a += b);
    }
    mean.iter_mut().for_each(|a| *a /= n as f64);
    let mut cov = DMatrix::zeros(m, m);
    for row in data.chunks_exact(m) {
        for i in 0..m {
            let di = row[i] - mean[i];
            for j in 0..=i {
                cov[(i, j)] += di * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..m {
        for j in 0..=i {
            cov[(i, j)] /= n as f64;
            cov[(j, i)] = cov[(i, j)];
        }
    }
    cov
}

/// `Σ̂_n`: covariance of the log-map coordinates at `base`.
pub fn empirical_tangent_covariance(sample: &Sample, base: &SpherePoint) -> Result<DMatrix<f64>> {
    if sample.is_empty() {
        return Err(FssError::EmptySample);
    }
    let coords = tangent_coordinates(sample, base)?;
    Ok(covariance(&coords, sample.dim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationEntry {
    pub n: u64,
    pub modulation: f64,
    pub se: f64,
    pub replicates: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModulationCurve {
    pub entries: Vec<ModulationEntry>,
}

impl ModulationCurve {
    pub fn new(entries: Vec<ModulationEntry>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[1].n <= w[0].n {
                return Err(FssError::Format("curve sample sizes must be strictly increasing".into()));
            }
        }
        if let Some(e) = entries.iter().find(|e| !(e.se >= 0.0) || !(e.modulation >= 0.0)) {
            return Err(FssError::Format(format!("invalid curve entry at n = {}", e.n)));
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MeanSelection {
    /// Global means, or local means when the population mean is not unique.
    #[default]
    Auto,
    Global,
    /// Descend from the population mean: local Fréchet means.
    Local,
}

#[derive(Debug, Clone, Copy)]
pub struct ModulationOptions {
    pub mean: MeanOptions,
    pub selection: MeanSelection,
    /// Fraction of failed replicates tolerated per sample size.
    pub max_failure_fraction: f64,
}

impl Default for ModulationOptions {
    fn default() -> Self {
        Self {
            mean: MeanOptions::default(),
            selection: MeanSelection::Auto,
            max_failure_fraction: 1e-3,
        }
    }
}

fn moments_for(spec: &DistributionSpec, selection: MeanSelection) -> Result<(PopulationMoments, bool)> {
    match selection {
        MeanSelection::Local => Ok((local_moments(spec)?, true)),
        MeanSelection::Global => {
            let m = population_mean_and_variance(spec)?;
            if !m.unique {
                return Err(FssError::MeanNotUnique(
                    "population mean is tied; use local means".into(),
                ));
            }
            Ok((m, false))
        }
        MeanSelection::Auto => {
            let m = population_mean_and_variance(spec)?;
            let local = !m.unique;
            Ok((m, local))
        }
    }
}

fn summarize(values: Vec<Result<f64>>, max_failure_fraction: f64) -> Result<Vec<f64>> {
    let total = values.len();
    let mut ok = Vec::with_capacity(total);
    let mut failed = 0;
    let mut last = None;
    for v in values {
        match v {
            Ok(x) => ok.push(x),
            Err(e) => {
                failed += 1;
                last = Some(e);
            }
        }
    }
    if failed as f64 > max_failure_fraction * total as f64 {
        if failed == total {
            return Err(last.unwrap());
        }
        return Err(FssError::TooManyFailures { failed, total });
    }
    Ok(ok)
}

/// Monte Carlo estimate of `𝔪_n = n V_n / V` on a grid of sample sizes.
///
/// Each `(n, replicate)` pair draws from its own substream, so the curve is
/// bit-identical for any thread count. At `n = 1` the sample mean is the
/// single draw, `V_1 = V` and the entry is exactly 1 with zero error.
pub fn monte_carlo_modulation(
    spec: &DistributionSpec,
    n_grid: &[u64],
    replicates: usize,
    seed: u64,
    options: &ModulationOptions,
) -> Result<ModulationCurve> {
    if replicates < 2 {
        return Err(FssError::OutOfRange("need at least 2 replicates".into()));
    }
    let (moments, local) = moments_for(spec, options.selection)?;
    let sampler = spec.sampler()?;
    let root = RandomStream::new(seed);
    let mut entries = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        if n == 0 {
            return Err(FssError::OutOfRange("sample size 0".into()));
        }
        if n == 1 {
            entries.push(ModulationEntry {
                n,
                modulation: 1.0,
                se: 0.0,
                replicates: replicates as u64,
            });
            continue;
        }
        let base = root.child(n);
        let d2: Vec<Result<f64>> = (0..replicates as u64)
            .into_par_iter()
            .map(|r| {
                let stream = base.child(r);
                let mut rng = stream.rng();
                let s = sampler.sample_with(n as usize, &mut rng)?;
                let est = if local {
                    local_frechet_mean(&s, &moments.mean, &options.mean)?
                } else {
                    frechet_mean(&s, &options.mean, &stream.child(u64::MAX))?
                };
                let d = crate::geometry::geodesic_distance(&est.mean, &moments.mean)?;
                Ok(d * d)
            })
            .collect();
        let d2 = summarize(d2, options.max_failure_fraction)?;
        let scale = n as f64 / moments.variance;
        entries.push(ModulationEntry {
            n,
            modulation: scale * stats::mean(&d2),
            se: scale * stats::std_dev(&d2) / (d2.len() as f64).sqrt(),
            replicates: d2.len() as u64,
        });
    }
    ModulationCurve::new(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapModulation {
    pub estimate: f64,
    pub se: f64,
    pub n: usize,
    #[serde(rename = "B")]
    pub resamples: usize,
    pub seed: u64,
}

/// Fréchet means of `resamples` n-out-of-n bootstrap resamples.
pub(crate) fn bootstrap_means(
    sample: &Sample,
    resamples: usize,
    root: &RandomStream,
    options: &MeanOptions,
) -> Vec<Result<SpherePoint>> {
    let n = sample.len();
    (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let stream = root.child(b);
            let mut rng = stream.rng();
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let s = sample.select(&idx);
            Ok(frechet_mean(&s, options, &stream.child(u64::MAX))?.mean)
        })
        .collect()
}

/// Bootstrap estimate of the modulation of a data set:
/// `n · mean_b d(μ̂*_b, μ̂_n)² / trace Σ̂_n`.
pub fn bootstrap_modulation(sample: &Sample, resamples: usize, seed: u64) -> Result<BootstrapModulation> {
    let n = sample.len();
    if n < 2 {
        return Err(FssError::DegenerateSample("bootstrap modulation needs n >= 2".into()));
    }
    if resamples < 100 {
        return Err(FssError::OutOfRange("bootstrap modulation needs B >= 100".into()));
    }
    let first = sample.point(0);
    if sample.points().iter().all(|p| *p == first) {
        return Err(FssError::DegenerateSample("all points are equal".into()));
    }
    let options = MeanOptions::default();
    let root = RandomStream::new(seed);
    let mean = frechet_mean(sample, &options, &root.child(u64::MAX))?.mean;
    let trace = empirical_tangent_covariance(sample, &mean)?.trace();
    if trace <= 0.0 {
        return Err(FssError::DegenerateSample("zero tangent variance".into()));
    }
    let d2: Vec<Result<f64>> = bootstrap_means(sample, resamples, &root, &options)
        .into_iter()
        .map(|m| {
            let d = crate::geometry::geodesic_distance(&m?, &mean)?;
            Ok(d * d)
        })
        .collect();
    let d2 = summarize(d2, 1e-3)?;
    let scale = n as f64 / trace;
    Ok(BootstrapModulation {
        estimate: scale * stats::mean(&d2),
        se: scale * stats::std_dev(&d2) / (d2.len() as f64).sqrt(),
        n,
        resamples,
        seed,
    })
}
