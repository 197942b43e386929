//! Tests for equality of intrinsic means: the asymptotic χ² quantile test
//! and a bootstrap-studentized variant.

use crate::distributions::DistributionSpec;
use crate::error::{FssError, Result};
use crate::frechet::{bootstrap_means, covariance, frechet_mean, MeanOptions};
use crate::geometry::{circle_log, dot, sphere_log_ambient, tangent_basis, SpherePoint};
use crate::linalg::quadratic_form_inverse;
use crate::rng::RandomStream;
use crate::sample::Sample;
use crate::special::chi2_sf;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMethod {
    Quantile,
    Bootstrap,
}

impl fmt::Display for TestMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestMethod::Quantile => "quantile",
            TestMethod::Bootstrap => "bootstrap",
        })
    }
}

impl FromStr for TestMethod {
    type Err = FssError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantile" => Ok(TestMethod::Quantile),
            "bootstrap" => Ok(TestMethod::Bootstrap),
            _ => Err(FssError::InvalidSpec(format!("unknown test method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: TestMethod,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub n1: usize,
    /// Zero for one-sample tests.
    pub n2: usize,
    #[serde(rename = "B")]
    pub resamples: usize,
    pub seed: u64,
}

impl TestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// Normal coordinates at a base point in a fixed orthonormal tangent basis.
#[derive(Debug, Clone)]
pub struct Chart {
    base: SpherePoint,
    basis: Vec<Vec<f64>>,
}

impl Chart {
    pub fn new(base: &SpherePoint) -> Self {
        let basis = match base {
            SpherePoint::Circle(_) => Vec::new(),
            SpherePoint::Sphere(p) => tangent_basis(p),
        };
        Self {
            base: base.clone(),
            basis,
        }
    }

    /// Chart with a caller-supplied orthonormal basis of the tangent space.
    pub fn with_basis(base: &SpherePoint, basis: Vec<Vec<f64>>) -> Self {
        Self {
            base: base.clone(),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn coords(&self, x: &SpherePoint) -> Result<Vec<f64>> {
        match (&self.base, x) {
            (SpherePoint::Circle(b), SpherePoint::Circle(a)) => Ok(vec![circle_log(*b, *a)?]),
            (SpherePoint::Sphere(b), SpherePoint::Sphere(a)) => {
                let mut amb = vec![0.0; b.len()];
                sphere_log_ambient(b, a, &mut amb)?;
                Ok(self.basis.iter().map(|e| dot(e, &amb)).collect())
            }
            _ => Err(FssError::DimensionMismatch {
                expected: self.base.dim(),
                found: x.dim(),
            }),
        }
    }

    /// Covariance (`1/n`) of the chart coordinates of a sample.
    pub fn sample_covariance(&self, sample: &Sample) -> Result<DMatrix<f64>> {
        let m = self.dim();
        let mut rows = Vec::with_capacity(sample.len() * m);
        for p in sample.points() {
            rows.extend(self.coords(&p)?);
        }
        Ok(covariance(&rows, m))
    }
}

fn mean_of(sample: &Sample) -> Result<SpherePoint> {
    Ok(frechet_mean(sample, &MeanOptions::default(), &RandomStream::new(0))?.mean)
}

fn check_dims(s1: &Sample, s2: &Sample) -> Result<()> {
    if s1.dim() != s2.dim() {
        return Err(FssError::DimensionMismatch {
            expected: s1.dim(),
            found: s2.dim(),
        });
    }
    Ok(())
}

fn p_value(statistic: f64, dof: usize) -> f64 {
    chi2_sf(statistic, dof)
}

/// `n φ(μ̂)ᵀ Σ̂⁻¹ φ(μ̂)` with `φ` the log chart at `mu0`, against `χ²_m`.
pub fn one_sample_quantile_test(sample: &Sample, mu0: &SpherePoint) -> Result<TestReport> {
    let m = sample.dim();
    if mu0.dim() != m {
        return Err(FssError::DimensionMismatch {
            expected: m,
            found: mu0.dim(),
        });
    }
    let n = sample.len();
    if n <= m {
        return Err(FssError::DegenerateSample(format!("need n > m, got n = {n}")));
    }
    let chart = Chart::new(mu0);
    let sigma = chart.sample_covariance(sample)?;
    let phi = chart.coords(&mean_of(sample)?)?;
    let statistic = n as f64 * quadratic_form_inverse(&sigma, &phi, "sample covariance is singular")?;
    Ok(TestReport {
        method: TestMethod::Quantile,
        statistic,
        dof: m,
        p_value: p_value(statistic, m),
        n1: n,
        n2: 0,
        resamples: 0,
        seed: 0,
    })
}

struct TwoSampleSetup {
    chart: Chart,
    mean1: Vec<f64>,
    mean2: Vec<f64>,
    delta: Vec<f64>,
}

fn setup(s1: &Sample, s2: &Sample, basis: Option<Vec<Vec<f64>>>) -> Result<TwoSampleSetup> {
    check_dims(s1, s2)?;
    let pooled = mean_of(&s1.concat(s2)?)?;
    let chart = match basis {
        Some(b) => Chart::with_basis(&pooled, b),
        None => Chart::new(&pooled),
    };
    let mean1 = chart.coords(&mean_of(s1)?)?;
    let mean2 = chart.coords(&mean_of(s2)?)?;
    let delta = mean1.iter().zip(&mean2).map(|(a, b)| a - b).collect();
    Ok(TwoSampleSetup {
        chart,
        mean1,
        mean2,
        delta,
    })
}

fn statistic(cov: &DMatrix<f64>, delta: &[f64], hint: &'static str) -> Result<f64> {
    if delta.iter().all(|d| *d == 0.0) {
        return Ok(0.0);
    }
    quadratic_form_inverse(cov, delta, hint)
}

/// `Δᵀ (Σ̂₁/n₁ + Σ̂₂/n₂)⁻¹ Δ` in the chart at the pooled Fréchet mean.
pub fn two_sample_quantile_test(s1: &Sample, s2: &Sample) -> Result<TestReport> {
    two_sample_quantile_in_basis(s1, s2, None)
}

fn two_sample_quantile_in_basis(s1: &Sample, s2: &Sample, basis: Option<Vec<Vec<f64>>>) -> Result<TestReport> {
    let m = s1.dim();
    let (n1, n2) = (s1.len(), s2.len());
    if n1 <= m || n2 <= m {
        return Err(FssError::DegenerateSample("each sample needs more than m points".into()));
    }
    let st = setup(s1, s2, basis)?;
    let cov = st.chart.sample_covariance(s1)? / n1 as f64 + st.chart.sample_covariance(s2)? / n2 as f64;
    let statistic = statistic(&cov, &st.delta, "sample covariance is singular")?;
    Ok(TestReport {
        method: TestMethod::Quantile,
        statistic,
        dof: m,
        p_value: p_value(statistic, m),
        n1,
        n2,
        resamples: 0,
        seed: 0,
    })
}

/// Dispersion of bootstrap means about the sample mean, in chart coordinates.
fn bootstrap_dispersion(
    sample: &Sample,
    center: &[f64],
    chart: &Chart,
    resamples: usize,
    root: &RandomStream,
) -> Result<DMatrix<f64>> {
    let m = chart.dim();
    let means = bootstrap_means(sample, resamples, root, &MeanOptions::default());
    let total = means.len();
    let mut cov = DMatrix::zeros(m, m);
    let mut used = 0usize;
    let mut last_err = None;
    for mean in means {
        let c = match mean.and_then(|p| chart.coords(&p)) {
            Ok(c) => c,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        used += 1;
        for i in 0..m {
            let di = c[i] - center[i];
            for j in 0..m {
                cov[(i, j)] += di * (c[j] - center[j]);
            }
        }
    }
    let failed = total - used;
    if failed as f64 > 1e-3 * total as f64 {
        return Err(if used == 0 {
            last_err.unwrap()
        } else {
            FssError::TooManyFailures { failed, total }
        });
    }
    Ok(cov / used as f64)
}

/// Two-sample test studentized by bootstrap covariances of the sample means,
/// against `χ²_m`.
pub fn two_sample_bootstrap_test(s1: &Sample, s2: &Sample, resamples: usize, seed: u64) -> Result<TestReport> {
    let m = s1.dim();
    let (n1, n2) = (s1.len(), s2.len());
    if n1 < 10 || n2 < 10 {
        return Err(FssError::DegenerateSample("bootstrap test needs n1, n2 >= 10".into()));
    }
    if resamples < 100 {
        return Err(FssError::OutOfRange("bootstrap test needs B >= 100".into()));
    }
    let st = setup(s1, s2, None)?;
    let root = RandomStream::new(seed);
    let (c1, c2) = rayon::join(
        || bootstrap_dispersion(s1, &st.mean1, &st.chart, resamples, &root.child(1)),
        || bootstrap_dispersion(s2, &st.mean2, &st.chart, resamples, &root.child(2)),
    );
    let cov = c1? + c2?;
    let statistic = statistic(&cov, &st.delta, "bootstrap covariance is singular; increase B")?;
    Ok(TestReport {
        method: TestMethod::Bootstrap,
        statistic,
        dof: m,
        p_value: p_value(statistic, m),
        n1,
        n2,
        resamples,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionRow {
    pub offset: f64,
    pub method: TestMethod,
    pub n: usize,
    pub level: f64,
    pub rejections: usize,
    pub replicates: usize,
    pub rate: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RejectionOptions {
    pub n: usize,
    pub replicates: usize,
    pub level: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Rejection frequencies of the chosen tests for samples from `base` and
/// from `base` rotated by each offset.
///
/// Every `(offset, replicate)` pair draws its samples from dedicated
/// substreams, so both methods see the same data.
pub fn rejection_curve(
    base: &DistributionSpec,
    offsets: &[f64],
    methods: &[TestMethod],
    options: &RejectionOptions,
) -> Result<Vec<RejectionRow>> {
    if options.replicates < 100 {
        return Err(FssError::OutOfRange("rejection curve needs at least 100 replicates".into()));
    }
    if let Some(o) = offsets.iter().find(|o| !o.is_finite()) {
        return Err(FssError::OutOfRange(format!("offset {o} is not finite")));
    }
    if !(options.level > 0.0 && options.level < 1.0) {
        return Err(FssError::OutOfRange(format!("level {} outside (0, 1)", options.level)));
    }
    let sampler = base.sampler()?;
    let root = RandomStream::new(options.seed);
    let mut rows = Vec::new();
    for (k, &offset) in offsets.iter().enumerate() {
        let cell = root.child(k as u64);
        let mut outcomes: Vec<Result<Vec<Result<bool>>>> = (0..options.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let stream = cell.child(r);
                let s1 = sampler.sample(options.n, &stream.child(0))?;
                let s2 = sampler.sample(options.n, &stream.child(1))?.rotate_plane(offset);
                Ok(methods
                    .iter()
                    .map(|method| {
                        let report = match method {
                            TestMethod::Quantile => two_sample_quantile_test(&s1, &s2)?,
                            TestMethod::Bootstrap => {
                                two_sample_bootstrap_test(&s1, &s2, options.resamples, stream.child(2).id())?
                            }
                        };
                        Ok(report.rejects(options.level))
                    })
                    .collect())
            })
            .collect();
        for (j, &method) in methods.iter().enumerate() {
            let mut rejections = 0;
            let mut used = 0;
            for v in outcomes.iter().flatten() {
                if let Ok(reject) = v[j] {
                    used += 1;
                    rejections += reject as usize;
                }
            }
            let failed = options.replicates - used;
            if failed as f64 > 1e-3 * options.replicates as f64 {
                if used > 0 {
                    return Err(FssError::TooManyFailures {
                        failed,
                        total: options.replicates,
                    });
                }
                let first = outcomes.swap_remove(0);
                return Err(match first {
                    Err(e) => e,
                    Ok(mut v) => v.swap_remove(j).unwrap_err(),
                });
            }
            let rate = rejections as f64 / used as f64;
            rows.push(RejectionRow {
                offset,
                method,
                n: options.n,
                level: options.level,
                rejections,
                replicates: used,
                rate,
                se: (rate * (1.0 - rate) / used as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::sample as draw;
    use crate::stats::{kolmogorov_smirnov, ks_p_value};
    use std::f64::consts::PI;

    fn vm(mu: f64, kappa: f64) -> DistributionSpec {
        DistributionSpec::von_mises(mu, kappa).unwrap()
    }

    #[test]
    fn symmetric_sample_gives_zero_statistic() {
        let s = Sample::circle(vec![-0.3, -0.1, 0.1, 0.3]);
        let r = one_sample_quantile_test(&s, &SpherePoint::Circle(0.0)).unwrap();
        assert!(r.statistic.abs() < 1e-28);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(r.dof, 1);
    }

    #[test]
    fn one_sample_scalar_case() {
        let s = draw(&vm(0.2, 3.0), 40, &RandomStream::new(3)).unwrap();
        let r = one_sample_quantile_test(&s, &SpherePoint::Circle(0.0)).unwrap();
        let Sample::Circle(a) = &s else { panic!() };
        let mean = frechet_mean(&s, &MeanOptions::default(), &RandomStream::new(0)).unwrap().mean;
        let phi = mean.as_angle().unwrap();
        let xbar = a.iter().sum::<f64>() / 40.0;
        let var = a.iter().map(|x| (x - xbar).powi(2)).sum::<f64>() / 40.0;
        let want = 40.0 * phi * phi / var;
        assert!((r.statistic - want).abs() < 1e-9 * want);
        let oracle = statrs_chi2_sf(want, 1);
        assert!((r.p_value - oracle).abs() < 1e-10);
    }

    fn statrs_chi2_sf(x: f64, k: usize) -> f64 {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        ChiSquared::new(k as f64).unwrap().sf(x)
    }

    #[test]
    fn one_sample_errors() {
        let s = Sample::circle(vec![0.1]);
        assert!(one_sample_quantile_test(&s, &SpherePoint::Circle(0.0)).is_err());
        let s = Sample::circle(vec![0.1, 0.1, 0.1]);
        assert!(matches!(
            one_sample_quantile_test(&s, &SpherePoint::Circle(0.0)),
            Err(FssError::Singular { .. })
        ));
        let s = Sample::circle(vec![0.1, -PI, 0.3]);
        assert!(matches!(
            one_sample_quantile_test(&s, &SpherePoint::Circle(0.0)),
            Err(FssError::CutLocus)
        ));
    }

    fn null_statistics(kappa: f64, seed: u64) -> Vec<f64> {
        let sampler = vm(0.0, kappa).sampler().unwrap();
        let mu0 = SpherePoint::Circle(0.0);
        (0..10_000u64)
            .into_par_iter()
            .map(|r| {
                let s = sampler.sample(200, &RandomStream::with_id(seed, r)).unwrap();
                one_sample_quantile_test(&s, &mu0).unwrap().statistic
            })
            .collect()
    }

    fn uniformity_p(statistics: &[f64], scale: f64) -> f64 {
        let p: Vec<f64> = statistics.iter().map(|t| p_value(t / scale, 1)).collect();
        ks_p_value(kolmogorov_smirnov(&p, |x| x.clamp(0.0, 1.0)), p.len())
    }

    #[test]
    fn one_sample_null_calibration() {
        // concentrated data: no antipodal density to speak of
        assert!(uniformity_p(&null_statistics(8.0, 31), 1.0) > 0.01);
        // at κ = 2 the statistic is inflated by the limiting modulation
        // (about 1.13), which 10⁴ replicates resolve; rescaled it is χ²₁
        let t = null_statistics(2.0, 32);
        let limit = crate::analysis::clt_analysis(&vm(0.0, 2.0)).unwrap().limit_modulation;
        assert!(uniformity_p(&t, 1.0) < 0.01);
        assert!(uniformity_p(&t, limit) > 0.01, "limit {limit}");
    }

    #[test]
    fn identical_samples_give_zero() {
        let s = draw(&vm(0.0, 0.5), 50, &RandomStream::new(4)).unwrap();
        let q = two_sample_quantile_test(&s, &s).unwrap();
        assert_eq!(q.statistic, 0.0);
        assert_eq!(q.p_value, 1.0);
        let b = two_sample_bootstrap_test(&s, &s, 200, 5).unwrap();
        assert_eq!(b.statistic, 0.0);
        assert_eq!(b.p_value, 1.0);
        let spec = DistributionSpec::von_mises_fisher(2, None, 3.0).unwrap();
        let s = draw(&spec, 30, &RandomStream::new(6)).unwrap();
        assert_eq!(two_sample_quantile_test(&s, &s).unwrap().statistic, 0.0);
    }

    #[test]
    fn statistics_are_rotation_invariant() {
        let s1 = draw(&vm(0.0, 1.0), 40, &RandomStream::new(7)).unwrap();
        let s2 = draw(&vm(0.4, 1.0), 40, &RandomStream::new(8)).unwrap();
        let a = two_sample_quantile_test(&s1, &s2).unwrap();
        let b = two_sample_quantile_test(&s1.rotate_plane(1.3), &s2.rotate_plane(1.3)).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-10);
        let a = two_sample_bootstrap_test(&s1, &s2, 200, 9).unwrap();
        let b = two_sample_bootstrap_test(&s1.rotate_plane(1.3), &s2.rotate_plane(1.3), 200, 9).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-9);

        let spec = DistributionSpec::von_mises_fisher(2, None, 2.0).unwrap();
        let t1 = draw(&spec, 40, &RandomStream::new(10)).unwrap();
        let t2 = draw(&spec, 40, &RandomStream::new(11)).unwrap().rotate_plane(0.3);
        let a = two_sample_quantile_test(&t1, &t2).unwrap();
        let b = two_sample_quantile_test(&t1.rotate_plane(0.7), &t2.rotate_plane(0.7)).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-9);
        let a = two_sample_bootstrap_test(&t1, &t2, 150, 12).unwrap();
        let b = two_sample_bootstrap_test(&t1.rotate_plane(0.7), &t2.rotate_plane(0.7), 150, 12).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-9);
    }

    #[test]
    fn statistic_is_basis_invariant() {
        let spec = DistributionSpec::von_mises_fisher(3, None, 2.0).unwrap();
        let t1 = draw(&spec, 40, &RandomStream::new(13)).unwrap();
        let t2 = draw(&spec, 40, &RandomStream::new(14)).unwrap().rotate_plane(0.2);
        let plain = two_sample_quantile_test(&t1, &t2).unwrap();
        let pooled = mean_of(&t1.concat(&t2).unwrap()).unwrap();
        let e = tangent_basis(pooled.as_slice().unwrap());
        let (s, c) = 0.9f64.sin_cos();
        let mixed: Vec<Vec<f64>> = vec![
            e[0].iter().zip(&e[1]).map(|(a, b)| c * a + s * b).collect(),
            e[0].iter().zip(&e[1]).map(|(a, b)| -s * a + c * b).collect(),
            e[2].iter().map(|a| -a).collect(),
        ];
        let other = two_sample_quantile_in_basis(&t1, &t2, Some(mixed)).unwrap();
        assert!((plain.statistic - other.statistic).abs() < 1e-10);
    }

    #[test]
    fn p_value_decreases_with_statistic() {
        for dof in 1..5 {
            let mut prev = 1.0;
            for i in 1..200 {
                let p = p_value(0.1 * i as f64, dof);
                assert!(p < prev);
                prev = p;
            }
        }
    }

    #[test]
    fn bootstrap_tracks_quantile_in_euclidean_regime() {
        // support inside a closed half circle, so the modulation is 1
        let spec = DistributionSpec::conditioned_von_mises(0.0, 1.0, vec![(-0.7, 0.7)]).unwrap();
        let s1 = draw(&spec, 60, &RandomStream::new(15)).unwrap();
        let s2 = draw(&spec, 60, &RandomStream::new(16)).unwrap().rotate_plane(0.1);
        let q = two_sample_quantile_test(&s1, &s2).unwrap();
        let b = two_sample_bootstrap_test(&s1, &s2, 40_000, 17).unwrap();
        assert!(((b.statistic - q.statistic) / q.statistic).abs() < 0.05, "{} vs {}", b.statistic, q.statistic);
    }

    #[test]
    fn report_json_schema() {
        let r = TestReport {
            method: TestMethod::Bootstrap,
            statistic: 1.5,
            dof: 1,
            p_value: 0.2,
            n1: 365,
            n2: 365,
            resamples: 10000,
            seed: 7,
        };
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["method"], "bootstrap");
        assert_eq!(v["B"], 10000);
        assert_eq!(v["seed"], 7);
        let back: TestReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejection_curve_power_grows_with_offset() {
        let opts = RejectionOptions {
            n: 50,
            replicates: 400,
            level: 0.05,
            resamples: 0,
            seed: 18,
        };
        let offsets = [0.0, 0.4, 0.8, 1.2, PI / 2.0];
        let rows = rejection_curve(&vm(0.0, 2.0), &offsets, &[TestMethod::Quantile], &opts).unwrap();
        assert_eq!(rows.len(), offsets.len());
        for w in rows.windows(2) {
            assert!(w[1].rate >= w[0].rate - 3.0 * (w[0].se + w[1].se), "{w:?}");
        }
        assert!(rows[4].rate > 0.9);
        let again = rejection_curve(&vm(0.0, 2.0), &offsets, &[TestMethod::Quantile], &opts).unwrap();
        assert_eq!(rows, again);
        assert!(rejection_curve(&vm(0.0, 2.0), &[f64::NAN], &[TestMethod::Quantile], &opts).is_err());
    }

    #[test]
    fn bootstrap_power_grows_with_n() {
        let mut rates = Vec::new();
        for n in [50, 100] {
            let opts = RejectionOptions {
                n,
                replicates: 200,
                level: 0.05,
                resamples: 200,
                seed: 19,
            };
            let rows = rejection_curve(&vm(0.0, 0.5), &[1.0], &[TestMethod::Bootstrap], &opts).unwrap();
            rates.push(rows[0].rate);
        }
        assert!(rates[1] > rates[0], "{rates:?}");
    }
}
