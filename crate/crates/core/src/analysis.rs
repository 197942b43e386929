//! Closed-form limits, Hessian integrals, regime classification and fitting.

use crate::distributions::{
    antipodal_density, local_moments, population_mean_and_variance, DistributionSpec, PolarLaw,
    VmfPolarLaw,
};
use crate::error::{FssError, Result};
use crate::frechet::{ModulationCurve, ModulationEntry};
use crate::geometry::{circle_distance, wrap_angle, TAU};
use crate::special::{bisect, integrate, sine_power_integral, theta_cot_theta, Tolerance};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize, Serializer};
use std::f64::consts::{FRAC_PI_2, PI};

/// `lim 𝔪_n = 1 / (1 - 2π f(-π))²` for a circular law with antipodal
/// density `f_pi`; infinite when `2π f_pi = 1`.
pub fn circle_limit_modulation(f_pi: f64) -> Result<f64> {
    if !(f_pi >= 0.0) {
        return Err(FssError::OutOfRange(format!("antipodal density {f_pi} is negative")));
    }
    let gap = 1.0 - TAU * f_pi;
    if gap.abs() <= 4.0 * f64::EPSILON {
        return Ok(f64::INFINITY);
    }
    if gap < 0.0 {
        return Err(FssError::OutOfRange(format!(
            "antipodal density {f_pi} exceeds 1/(2π); limit is not covered"
        )));
    }
    Ok(1.0 / (gap * gap))
}

/// Geodesic distance `a(ψ, θ, φ)` from the point at polar angle `ψ`
/// (along the first tangent axis) to the ring point at polar angle `θ` and
/// azimuth `φ` measured from that axis.
fn ring_distance(theta: f64, psi: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    let (sf, cf) = phi.sin_cos();
    // u = (cos ψ, sin ψ, 0), v = (cos θ, sin θ cos φ, sin θ sin φ)
    let d = cp * ct + sp * st * cf;
    let cx = sp * st * sf;
    let cy = -cp * st * sf;
    let cz = cp * st * cf - sp * ct;
    (cx * cx + cy * cy + cz * cz).sqrt().atan2(d)
}

/// `a² - θ²`, without the cancellation of the direct difference.
fn ring_excess_integrand(theta: f64, psi: f64, phi: f64) -> f64 {
    let a = ring_distance(theta, psi, phi);
    let s = (0.5 * (a + theta)).sin();
    if s < 1e-3 {
        return a * a - theta * theta;
    }
    let half = (0.5 * psi).sin();
    let delta = -2.0 * half * half * theta.cos() + psi.sin() * theta.sin() * phi.cos();
    let diff = 2.0 * (-delta / (2.0 * s)).clamp(-1.0, 1.0).asin();
    diff * (a + theta)
}

/// `F_θ(ψ) - θ²`: excess of the ring Fréchet function over its value at
/// the pole.
pub fn ring_frechet_excess(m: usize, theta: f64, psi: f64) -> Result<f64> {
    check_ring_args(m, theta, psi)?;
    if psi == 0.0 {
        return Ok(0.0);
    }
    let k = (m - 2) as i32;
    let weight = sine_power_integral(m - 2);
    // Pairing φ with π - φ cancels the first-order term in ψ before
    // quadrature, leaving an integrand of the size of the result.
    let value = integrate(
        |phi| {
            phi.sin().powi(k)
                * (ring_excess_integrand(theta, psi, phi) + ring_excess_integrand(theta, psi, PI - phi))
        },
        0.0,
        FRAC_PI_2,
        Tolerance::relative(1e-10, 1e-300),
    )?;
    Ok(value / weight)
}

fn check_ring_args(m: usize, theta: f64, psi: f64) -> Result<()> {
    if m < 2 {
        return Err(FssError::OutOfRange(format!("ring Fréchet function needs m >= 2, got {m}")));
    }
    if !(0.0..=PI).contains(&theta) || !(0.0..=PI).contains(&psi) {
        return Err(FssError::OutOfRange(format!(
            "angles θ = {theta}, ψ = {psi} must lie in [0, π]"
        )));
    }
    Ok(())
}

/// Fréchet function at polar angle `ψ` of the uniform law on the ring of
/// polar angle `θ` in `S^m`. The azimuth weight is `|sin φ|^{m-2}`.
pub fn ring_frechet_function(m: usize, theta: f64, psi: f64) -> Result<f64> {
    Ok(theta * theta + ring_frechet_excess(m, theta, psi)?)
}

/// `h(θ) = 1/m + (m-1)/m · θ cot θ`, so that the Hessian of the ring
/// Fréchet function at the pole is `2 h(θ) Id`.
pub fn ring_hessian_coefficient(m: usize, theta: f64) -> f64 {
    let m = m as f64;
    if theta >= PI {
        return f64::NEG_INFINITY;
    }
    1.0 / m + (m - 1.0) / m * theta_cot_theta(theta)
}

/// `2 ∫ h(θ) dℙ(θ)`, the scalar of the rotationally symmetric Hessian.
pub fn rotsym_hessian_coefficient(m: usize, law: &(impl PolarLaw + ?Sized)) -> Result<f64> {
    if m < 2 {
        return Err(FssError::OutOfRange("needs m >= 2".into()));
    }
    let mut total = 0.0;
    for &(theta, w) in law.atoms() {
        if w == 0.0 {
            continue;
        }
        if theta >= PI {
            return Err(FssError::Quadrature(
                "Hessian integral diverges: mass at the antipode".into(),
            ));
        }
        total += w * ring_hessian_coefficient(m, theta);
    }
    if law.has_density() {
        if law.density(PI) > 1e-12 {
            return Err(FssError::Quadrature(
                "Hessian integral diverges: density does not vanish at the antipode".into(),
            ));
        }
        let mf = m as f64;
        // θ cot θ g(θ) = θ cos θ · g(θ)/sin θ stays finite at both ends
        total += integrate(
            |t| law.density(t) / mf + (mf - 1.0) / mf * t * t.cos() * law.density_over_sin(t),
            0.0,
            PI,
            Tolerance::relative(1e-13, 1e-14),
        )?;
    }
    Ok(2.0 * total)
}

pub fn rotsym_hessian(m: usize, law: &(impl PolarLaw + ?Sized)) -> Result<DMatrix<f64>> {
    Ok(DMatrix::identity(m, m) * rotsym_hessian_coefficient(m, law)?)
}

/// `∫ (F_θ(ψ) - θ²) dℙ(θ)`: excess of a rotationally symmetric population
/// Fréchet function over its value at the pole.
pub fn rotsym_frechet_excess(m: usize, law: &(impl PolarLaw + ?Sized), psi: f64) -> Result<f64> {
    let mut total = 0.0;
    for &(theta, w) in law.atoms() {
        total += w * ring_frechet_excess(m, theta, psi)?;
    }
    if law.has_density() {
        let err = std::cell::RefCell::new(None);
        let v = integrate(
            |t| match ring_frechet_excess(m, t, psi) {
                Ok(e) => law.density(t) * e,
                Err(e) => {
                    *err.borrow_mut() = Some(e);
                    f64::NAN
                }
            },
            0.0,
            PI,
            Tolerance::relative(1e-12, 1e-300),
        );
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        total += v?;
    }
    Ok(total)
}

fn matrix_rows<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    rows.serialize(s)
}

/// Asymptotic covariance of the sample mean in normal coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CLTResult {
    #[serde(serialize_with = "matrix_rows")]
    pub hessian: DMatrix<f64>,
    #[serde(serialize_with = "matrix_rows")]
    pub sigma: DMatrix<f64>,
    /// `4 H⁻¹ Σ H⁻¹`.
    #[serde(serialize_with = "matrix_rows")]
    pub asymptotic_cov: DMatrix<f64>,
    /// `trace(asymptotic_cov) / V`.
    pub limit_modulation: f64,
    /// `V`.
    pub variance: f64,
}

impl CLTResult {
    fn build(hessian: DMatrix<f64>, sigma: DMatrix<f64>, variance: f64) -> Result<Self> {
        let eig = hessian.clone().symmetric_eigen();
        let min = eig.eigenvalues.min();
        if !(min > 0.0) {
            return Err(FssError::NotPositiveDefinite(min));
        }
        let inv = crate::linalg::symmetric_inverse(&hessian, "Hessian")?;
        let asymptotic_cov = (&inv * &sigma * &inv) * 4.0;
        let asymptotic_cov = (&asymptotic_cov + asymptotic_cov.transpose()) * 0.5;
        Ok(Self {
            limit_modulation: asymptotic_cov.trace() / variance,
            hessian,
            sigma,
            asymptotic_cov,
            variance,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite matrices serialize")
    }
}

/// Hessian, tangent covariance and limiting modulation of a law at its
/// Fréchet mean.
pub fn clt_analysis(spec: &DistributionSpec) -> Result<CLTResult> {
    match spec {
        DistributionSpec::VonMises { .. }
        | DistributionSpec::ConditionedVonMises { .. }
        | DistributionSpec::TwoPoint { .. } => circle_clt(spec),
        DistributionSpec::VonMisesFisher { m, kappa, .. } => {
            rotsym_clt(*m, &VmfPolarLaw::new(*m, *kappa)?)
        }
        _ => {
            let law = spec.polar_law()?.expect("sphere law");
            rotsym_clt(spec.dim(), law.as_ref())
        }
    }
}

fn rotsym_clt(m: usize, law: &(impl PolarLaw + ?Sized)) -> Result<CLTResult> {
    let coefficient = rotsym_hessian_coefficient(m, law)?;
    let variance = crate::distributions::polar_expectation(law, |t| t * t, Tolerance::relative(1e-13, 1e-15))?;
    let sigma = DMatrix::identity(m, m) * (variance / m as f64);
    CLTResult::build(DMatrix::identity(m, m) * coefficient, sigma, variance)
}

fn circle_clt(spec: &DistributionSpec) -> Result<CLTResult> {
    let moments = local_moments(spec)?;
    let mu = moments.mean.as_angle().unwrap();
    let (f_pi, first, second) = match spec {
        DistributionSpec::TwoPoint { a, b, w } => {
            if circle_distance(*a, mu) == PI || circle_distance(*b, mu) == PI {
                return Err(FssError::NotPositiveDefinite(f64::NEG_INFINITY));
            }
            let (la, lb) = (wrap_angle(a - mu), wrap_angle(b - mu));
            (0.0, w * la + (1.0 - w) * lb, w * la * la + (1.0 - w) * lb * lb)
        }
        _ => {
            let f_pi = antipodal_density(spec)?;
            let density = |x: f64| crate::distributions::density(spec, &crate::geometry::SpherePoint::Circle(x));
            // log coordinates run over (-π, π) about μ
            let err = std::cell::RefCell::new(None);
            let tol = Tolerance::relative(1e-13, 1e-15);
            let moment = |k: i32| {
                integrate(
                    |t| match density(mu + t) {
                        Ok(f) => t.powi(k) * f,
                        Err(e) => {
                            *err.borrow_mut() = Some(e);
                            f64::NAN
                        }
                    },
                    -PI,
                    PI,
                    tol,
                )
            };
            let first = moment(1);
            let second = moment(2);
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            (f_pi, first?, second?)
        }
    };
    let h = 2.0 * (1.0 - TAU * f_pi);
    let sigma = second - first * first;
    CLTResult::build(
        DMatrix::from_element(1, 1, h),
        DMatrix::from_element(1, 1, sigma),
        moments.variance,
    )
}

/// Smallest `θ ∈ (π/2, π)` with `θ cot θ = -1/(m-1)`; above it the ring
/// Hessian coefficient is negative.
pub fn feasibility_threshold(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(FssError::OutOfRange("needs m >= 2".into()));
    }
    let target = -1.0 / (m as f64 - 1.0);
    bisect(|t| theta_cot_theta(t) - target, FRAC_PI_2, PI - 1e-12, 1e-15)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingSearchResult {
    pub m: usize,
    pub target: f64,
    pub theta: f64,
    pub alpha: f64,
    pub achieved_limit: f64,
    /// `2[(1-α) + α h(θ)]`.
    pub hessian_coefficient: f64,
    /// Smallest ring angle with a negative Hessian coefficient.
    pub theta_min: f64,
    /// The construction is proven for `m >= 4`; smaller `m` is computed
    /// from the same formula.
    pub proven_regime: bool,
    /// Whether the population scan confirms the pole as global minimizer.
    pub pole_is_global_minimum: bool,
}

const SEARCH_THETA_STEPS: usize = 2000;
const SEARCH_ALPHA_STEPS: usize = 2000;

/// Scans `θ ∈ (π/2, π)` and `α ∈ (0, 1)` in increasing order and returns
/// the first ring mixture whose limiting modulation exceeds `target`.
pub fn ring_mixture_search(m: usize, target: f64) -> Result<RingSearchResult> {
    if m < 2 {
        return Err(FssError::OutOfRange("needs m >= 2".into()));
    }
    if !(target >= 1.0) || !target.is_finite() {
        return Err(FssError::OutOfRange(format!("target {target} must be finite and >= 1")));
    }
    let mut best = 0.0f64;
    for i in 1..SEARCH_THETA_STEPS {
        let theta = FRAC_PI_2 + FRAC_PI_2 * i as f64 / SEARCH_THETA_STEPS as f64;
        let h = ring_hessian_coefficient(m, theta);
        for j in 1..SEARCH_ALPHA_STEPS {
            let alpha = j as f64 / SEARCH_ALPHA_STEPS as f64;
            let c = (1.0 - alpha) + alpha * h;
            if c <= 0.0 {
                break;
            }
            let limit = 1.0 / (c * c);
            best = best.max(limit);
            if limit > target {
                let spec = DistributionSpec::ring_mixture(m, theta, alpha)?;
                let pole_is_global_minimum = population_mean_and_variance(&spec).is_ok();
                return Ok(RingSearchResult {
                    m,
                    target,
                    theta,
                    alpha,
                    achieved_limit: limit,
                    hessian_coefficient: 2.0 * c,
                    theta_min: feasibility_threshold(m)?,
                    proven_regime: m >= 4,
                    pole_is_global_minimum,
                });
            }
        }
    }
    Err(FssError::Unreachable { target, best })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FssLabel {
    Euclidean,
    TypeI,
    TypeII,
    Smeary,
    Inconclusive,
}

fn real_or_infinity<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() && *x > 0.0 {
        s.serialize_str("Infinity")
    } else {
        s.serialize_f64(*x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FSSClass {
    pub label: FssLabel,
    #[serde(serialize_with = "real_or_infinity")]
    pub limit_modulation: f64,
    #[serde(serialize_with = "real_or_infinity")]
    pub sup_modulation: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl FSSClass {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("class serializes")
    }
}

fn band(e: &ModulationEntry) -> f64 {
    (3.0 * e.se).max(1e-12)
}

/// Analytic limits within this distance of 1 count as equal to 1.
const LIMIT_TOLERANCE: f64 = 1e-9;

/// Labels a modulation curve, preferring an analytic limit when given.
/// An infinite limit is the only route to `Smeary`.
pub fn classify_fss(curve: &ModulationCurve, limit: Option<f64>) -> Result<FSSClass> {
    let entries = &curve.entries;
    let last = entries
        .last()
        .ok_or_else(|| FssError::Format("empty modulation curve".into()))?;
    let mut diagnostics = Vec::new();
    let below: Vec<u64> = entries.iter().filter(|e| e.modulation < 1.0 - band(e)).map(|e| e.n).collect();
    if !below.is_empty() {
        diagnostics.push(format!("modulation significantly below 1 at n = {below:?}"));
    }
    let exceeds = entries.iter().any(|e| e.modulation > 1.0 + band(e));
    let flat = entries.iter().all(|e| (e.modulation - 1.0).abs() <= band(e));
    let sup = entries.iter().map(|e| e.modulation).fold(f64::NEG_INFINITY, f64::max);

    let (label, limit_value) = match limit {
        Some(l) if l.is_nan() || l < 1.0 - LIMIT_TOLERANCE => {
            diagnostics.push(format!("analytic limit {l} is below 1"));
            (FssLabel::Inconclusive, l)
        }
        Some(l) if l.is_infinite() => (FssLabel::Smeary, l),
        Some(l) if l > 1.0 + LIMIT_TOLERANCE => {
            if flat {
                diagnostics.push("curve is flat at 1 although the analytic limit exceeds 1".into());
            }
            (FssLabel::TypeI, l)
        }
        Some(l) => (if exceeds { FssLabel::TypeII } else { FssLabel::Euclidean }, l),
        None => {
            let l = last.modulation;
            let label = if flat {
                FssLabel::Euclidean
            } else if l > 1.0 + band(last) {
                FssLabel::TypeI
            } else if exceeds {
                FssLabel::TypeII
            } else {
                FssLabel::Inconclusive
            };
            (label, l)
        }
    };
    let label = if below.is_empty() { label } else { FssLabel::Inconclusive };
    Ok(FSSClass {
        label,
        limit_modulation: limit_value,
        sup_modulation: if label == FssLabel::Smeary { f64::INFINITY } else { sup },
        diagnostics,
    })
}

/// Power-law bounds `1 < C₋ n^{α₋} ≤ 𝔪_n ≤ C₊ n^{α₊}` on `[n₋, n₊]` and
/// `𝔪_n ≤ K` from `n₀` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeFit {
    pub c_minus: f64,
    pub c_plus: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    /// Central log-log slope and its standard error.
    pub exponent: f64,
    pub exponent_se: f64,
    pub n_minus: u64,
    pub n_plus: u64,
    /// `None` when the curve has no entries past `n₊`.
    pub n_zero: Option<u64>,
    pub k_bound: Option<f64>,
    /// RMS of the log-log residuals.
    pub residual: f64,
}

impl RegimeFit {
    /// Pointwise violations of the fitted bounds on `curve`.
    pub fn verify(&self, curve: &ModulationCurve) -> Vec<String> {
        let slack = 1e-12;
        let mut bad = Vec::new();
        let low = |n: u64| self.c_minus * (n as f64).powf(self.alpha_minus);
        let high = |n: u64| self.c_plus * (n as f64).powf(self.alpha_plus);
        if !(low(self.n_minus) > 1.0) {
            bad.push(format!("lower bound {} at n₋ is not above 1", low(self.n_minus)));
        }
        if high(self.n_minus) > low(self.n_plus) * (1.0 + slack) {
            bad.push("compatibility condition C₊ n₋^α₊ ≤ C₋ n₊^α₋ fails".into());
        }
        for e in &curve.entries {
            if (self.n_minus..=self.n_plus).contains(&e.n) {
                if e.modulation < low(e.n) * (1.0 - slack) {
                    bad.push(format!("n = {}: {} below lower bound {}", e.n, e.modulation, low(e.n)));
                }
                if e.modulation > high(e.n) * (1.0 + slack) {
                    bad.push(format!("n = {}: {} above upper bound {}", e.n, e.modulation, high(e.n)));
                }
            }
            if let (Some(n0), Some(k)) = (self.n_zero, self.k_bound) {
                if e.n >= n0 && e.modulation > k {
                    bad.push(format!("n = {}: {} above K = {k}", e.n, e.modulation));
                }
            }
        }
        bad
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serializes")
    }
}

struct Ols {
    slope: f64,
    slope_se: f64,
    intercept: f64,
    rms: f64,
}

fn ols(x: &[f64], y: &[f64]) -> Ols {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ols {
        slope,
        slope_se,
        intercept,
        rms: (sse / n).sqrt(),
    }
}

/// Minimum half-width of the exponent band `[α₋, α₊]`.
const MIN_EXPONENT_HALF_WIDTH: f64 = 0.01;

/// Fits power-law bounds to the first rising regime of a modulation curve.
pub fn fit_regimes(curve: &ModulationCurve) -> Result<RegimeFit> {
    let e = &curve.entries;
    if e.len() < 8 {
        return Err(FssError::OutOfRange(format!("need at least 8 curve entries, got {}", e.len())));
    }
    if (e[e.len() - 1].n as f64) < 100.0 * e[0].n as f64 {
        return Err(FssError::OutOfRange("curve must span at least two decades".into()));
    }
    let no_regime = || FssError::NoRegime("no FSS regime detected".into());
    let start = e.iter().position(|x| x.modulation > 1.0 + band(x)).ok_or_else(no_regime)?;
    let peak = (start..e.len())
        .max_by(|&a, &b| e[a].modulation.partial_cmp(&e[b].modulation).unwrap())
        .unwrap();
    if peak <= start {
        return Err(no_regime());
    }
    let logn: Vec<f64> = e.iter().map(|x| (x.n as f64).ln()).collect();
    let logm: Vec<f64> = e.iter().map(|x| x.modulation.ln()).collect();

    let fit_on = |lo: usize, hi: usize| -> Result<(Ols, f64, f64)> {
        let f = ols(&logn[lo..=hi], &logm[lo..=hi]);
        if !(f.slope > 0.0) {
            return Err(no_regime());
        }
        let half = (2.0 * f.slope_se).max(MIN_EXPONENT_HALF_WIDTH);
        let am = (f.slope - half).max(1e-6);
        let ap = (f.slope + half).min(1.0 - 1e-6);
        if am >= ap {
            return Err(FssError::NoRegime(format!(
                "fitted exponent {} is not sublinear",
                f.slope
            )));
        }
        Ok((f, am, ap))
    };
    // the segment ends before the local slope drops below α₋/2
    let segment_end = |lo: usize, am: f64| -> usize {
        let mut hi = lo;
        while hi + 1 < e.len() {
            let s = (logm[hi + 1] - logm[hi]) / (logn[hi + 1] - logn[hi]);
            if s < 0.5 * am {
                break;
            }
            hi += 1;
        }
        hi
    };

    let (mut lo, mut hi) = (start, peak);
    let mut fitted = fit_on(lo, hi)?;
    for _ in 0..10 {
        let next = segment_end(lo, fitted.1).max(lo + 1);
        if next == hi {
            break;
        }
        hi = next;
        fitted = fit_on(lo, hi)?;
    }

    loop {
        if hi <= lo {
            return Err(FssError::NoRegime("bounds cannot be made compatible".into()));
        }
        let (f, am, ap) = (&fitted.0, fitted.1, fitted.2);
        let nf = |i: usize| e[i].n as f64;
        let c_minus = (lo..=hi).map(|i| e[i].modulation / nf(i).powf(am)).fold(f64::INFINITY, f64::min);
        let c_plus = (lo..=hi).map(|i| e[i].modulation / nf(i).powf(ap)).fold(0.0, f64::max);
        if !(c_minus * nf(lo).powf(am) > 1.0) {
            lo += 1;
            continue;
        }
        if c_plus * nf(lo).powf(ap) > c_minus * nf(hi).powf(am) {
            hi -= 1;
            continue;
        }
        let tail = &e[hi + 1..];
        let (n_zero, k_bound) = if tail.is_empty() {
            (None, None)
        } else {
            let k = 1.05 * tail.iter().map(|x| x.modulation).fold(0.0, f64::max);
            (Some(tail[0].n), Some(k))
        };
        let _ = f.intercept;
        return Ok(RegimeFit {
            c_minus,
            c_plus,
            alpha_minus: am,
            alpha_plus: ap,
            exponent: f.slope,
            exponent_se: f.slope_se,
            n_minus: e[lo].n,
            n_plus: e[hi].n,
            n_zero,
            k_bound,
            residual: f.rms,
        });
    }
}
