//! Distributions on the circle and on spheres.
//!
//! Every built-in law has its Fréchet mean at a known symmetry center: the
//! location parameter for circular laws and the north pole `(1, 0, …, 0)`
//! for the rotationally symmetric sphere laws (the von Mises–Fisher law may
//! be rotated to an arbitrary `mu`).

use crate::analysis::ring_frechet_function;
use crate::error::{FssError, Result};
use crate::geometry::{
    circle_distance, from_coords, norm, tangent_basis, wrap_angle, SpherePoint, TAU,
};
use crate::rng::RandomStream;
use crate::sample::Sample;
use crate::special::{bessel_i0e, integrate, sphere_area, Tolerance};
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Cells in the tabulated inverse CDF of the circular von Mises law.
pub const VON_MISES_TABLE_CELLS: usize = 1 << 16;

/// Rejections allowed per accepted draw of a conditioned law.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// Piecewise-linear density on a uniform grid over `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    values: Vec<f64>,
    step: f64,
    cumulative: Vec<f64>,
}

impl TabulatedDensity {
    /// Rescales nonnegative `values` so the density carries `mass`.
    pub fn new(values: Vec<f64>, mass: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(FssError::InvalidSpec("tabulated density needs at least 2 values".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(FssError::InvalidSpec("tabulated density must be finite and nonnegative".into()));
        }
        let raw = Self::from_scaled(values.clone());
        let total = *raw.cumulative.last().unwrap();
        if total <= 0.0 {
            return Err(FssError::InvalidSpec("tabulated density has zero mass".into()));
        }
        Ok(Self::from_scaled(values.into_iter().map(|v| v * mass / total).collect()))
    }

    fn from_scaled(values: Vec<f64>) -> Self {
        let step = PI / (values.len() - 1) as f64;
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * step * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Self {
            values,
            step,
            cumulative,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn cell(&self, theta: f64) -> (usize, f64) {
        let cells = self.values.len() - 1;
        let i = ((theta / self.step).floor() as usize).min(cells - 1);
        (i, theta - i as f64 * self.step)
    }

    pub fn value(&self, theta: f64) -> f64 {
        if !(0.0..=PI).contains(&theta) {
            return 0.0;
        }
        let (i, x) = self.cell(theta);
        let t = x / self.step;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// `g(θ) / sin θ`, finite at an endpoint where the table vanishes.
    pub fn value_over_sin(&self, theta: f64) -> f64 {
        let (i, x) = self.cell(theta);
        let last = self.values.len() - 2;
        if i == last && self.values[last + 1] == 0.0 {
            let r = PI - theta;
            let ratio = if r < 1e-8 { 1.0 } else { r / r.sin() };
            return self.values[last] / self.step * ratio;
        }
        if i == 0 && self.values[0] == 0.0 {
            let ratio = if theta < 1e-8 { 1.0 } else { theta / theta.sin() };
            return self.values[1] / self.step * ratio;
        }
        let _ = x;
        self.value(theta) / theta.sin()
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        if theta >= PI {
            return self.mass();
        }
        let (i, x) = self.cell(theta);
        let slope = (self.values[i + 1] - self.values[i]) / self.step;
        self.cumulative[i] + self.values[i] * x + 0.5 * slope * x * x
    }

    /// Inverse of [`Self::cdf`] for `r ∈ [0, mass]`.
    pub fn quantile(&self, r: f64) -> f64 {
        let cells = self.values.len() - 1;
        let i = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&r).unwrap())
        {
            Ok(i) => i.min(cells - 1),
            Err(i) => i.saturating_sub(1).min(cells - 1),
        };
        let rem = (r - self.cumulative[i]).max(0.0);
        let v = self.values[i];
        let slope = (self.values[i + 1] - v) / self.step;
        let x = if slope.abs() < 1e-14 {
            if v > 0.0 {
                rem / v
            } else {
                0.0
            }
        } else {
            let disc = (v * v + 2.0 * slope * rem).max(0.0);
            2.0 * rem / (v + disc.sqrt())
        };
        (i as f64 * self.step + x.clamp(0.0, self.step)).min(PI)
    }
}

/// Law `dℙ(θ)` of the polar angle of a rotationally symmetric distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMeasure {
    /// `(θ_j, weight_j)`.
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<TabulatedDensity>,
}

impl MixingMeasure {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(atoms, None)
    }

    /// Atoms plus an optional tabulated density carrying the remaining mass.
    pub fn new(atoms: Vec<(f64, f64)>, density_values: Option<Vec<f64>>) -> Result<Self> {
        for &(theta, w) in &atoms {
            if !(0.0..=PI).contains(&theta) {
                return Err(FssError::InvalidSpec(format!("atom at θ = {theta} outside [0, π]")));
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(FssError::InvalidSpec(format!("atom weight {w} outside [0, 1]")));
            }
        }
        let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
        let density = match density_values {
            Some(values) => {
                let rest = 1.0 - atom_mass;
                if rest <= 1e-10 {
                    return Err(FssError::InvalidSpec(
                        "atoms carry all the mass; no room for a density".into(),
                    ));
                }
                Some(TabulatedDensity::new(values, rest)?)
            }
            None => {
                if (atom_mass - 1.0).abs() > 1e-10 {
                    return Err(FssError::InvalidSpec(format!(
                        "mixing measure mass {atom_mass} is not 1"
                    )));
                }
                None
            }
        };
        Ok(Self { atoms, density })
    }

    pub fn cdf(&self, theta: f64) -> f64 {
        let a: f64 = self.atoms.iter().filter(|a| a.0 <= theta).map(|a| a.1).sum();
        a + self.density.as_ref().map_or(0.0, |d| d.cdf(theta))
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(theta, w) in &self.atoms {
            acc += w;
            if u < acc {
                return theta;
            }
        }
        match &self.density {
            Some(d) => d.quantile((u - acc).clamp(0.0, d.mass())),
            None => self.atoms.last().map_or(0.0, |a| a.0),
        }
    }
}

/// Polar-angle law with atoms and a continuous part.
pub trait PolarLaw {
    fn atoms(&self) -> &[(f64, f64)];
    fn has_density(&self) -> bool;
    fn density(&self, theta: f64) -> f64;
    /// `density(θ) / sin θ` with endpoint limits.
    fn density_over_sin(&self, theta: f64) -> f64;
}

impl PolarLaw for MixingMeasure {
    fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
    fn has_density(&self) -> bool {
        self.density.is_some()
    }
    fn density(&self, theta: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.value(theta))
    }
    fn density_over_sin(&self, theta: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.value_over_sin(theta))
    }
}

/// Polar angle of a von Mises–Fisher law on `S^m`:
/// density `∝ exp(κ cos θ) sin^{m-1} θ` on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VmfPolarLaw {
    pub m: usize,
    pub kappa: f64,
    norm: f64,
}

impl VmfPolarLaw {
    pub fn new(m: usize, kappa: f64) -> Result<Self> {
        let k = |t: f64| (kappa * (t.cos() - 1.0)).exp() * t.sin().powi(m as i32 - 1);
        let z = integrate(k, 0.0, PI, Tolerance::relative(1e-14, 0.0))?;
        Ok(Self { m, kappa, norm: z })
    }

    fn kernel_over_sin(&self, theta: f64) -> f64 {
        (self.kappa * (theta.cos() - 1.0)).exp() * theta.sin().powi(self.m as i32 - 2) / self.norm
    }

    /// Surface density of the full law at polar angle `θ`.
    pub fn surface_density(&self, theta: f64) -> f64 {
        (self.kappa * (theta.cos() - 1.0)).exp() / (self.norm * sphere_area(self.m))
    }
}

impl PolarLaw for VmfPolarLaw {
    fn atoms(&self) -> &[(f64, f64)] {
        &[]
    }
    fn has_density(&self) -> bool {
        true
    }
    fn density(&self, theta: f64) -> f64 {
        self.kernel_over_sin(theta) * theta.sin()
    }
    fn density_over_sin(&self, theta: f64) -> f64 {
        self.kernel_over_sin(theta)
    }
}

/// `E[f(θ)]` under a polar law.
pub fn polar_expectation<L: PolarLaw + ?Sized, F: Fn(f64) -> f64>(
    law: &L,
    f: F,
    tol: Tolerance,
) -> Result<f64> {
    let mut total: f64 = law.atoms().iter().map(|&(t, w)| w * f(t)).sum();
    if law.has_density() {
        total += integrate(|t| law.density(t) * f(t), 0.0, PI, tol)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    VonMises {
        mu: f64,
        kappa: f64,
    },
    ConditionedVonMises {
        mu: f64,
        kappa: f64,
        /// Disjoint closed intervals inside `[-π, π]`, sorted.
        support: Vec<(f64, f64)>,
    },
    VonMisesFisher {
        m: usize,
        mu: Vec<f64>,
        kappa: f64,
    },
    TwoPoint {
        a: f64,
        b: f64,
        /// Probability of `a`.
        w: f64,
    },
    /// Mass `alpha` uniform on the ring at polar angle `theta`, the rest at
    /// the north pole.
    RingMixture {
        m: usize,
        theta: f64,
        alpha: f64,
    },
    RotSym {
        m: usize,
        mixing: MixingMeasure,
    },
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(FssError::InvalidSpec(format!("concentration {kappa} must be finite and >= 0")));
    }
    Ok(())
}

impl DistributionSpec {
    pub fn von_mises(mu: f64, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self::VonMises {
            mu: wrap_angle(mu),
            kappa,
        })
    }

    pub fn conditioned_von_mises(mu: f64, kappa: f64, mut support: Vec<(f64, f64)>) -> Result<Self> {
        check_kappa(kappa)?;
        if support.is_empty() {
            return Err(FssError::InvalidSpec("empty support".into()));
        }
        support.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for &(lo, hi) in &support {
            if !(lo < hi) || lo < -PI || hi > PI {
                return Err(FssError::InvalidSpec(format!(
                    "support interval [{lo}, {hi}] must be nonempty and inside [-π, π]"
                )));
            }
        }
        for w in support.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(FssError::InvalidSpec("support intervals overlap".into()));
            }
        }
        Ok(Self::ConditionedVonMises {
            mu: wrap_angle(mu),
            kappa,
            support,
        })
    }

    pub fn von_mises_fisher(m: usize, mu: Option<Vec<f64>>, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if m < 2 {
            return Err(FssError::InvalidSpec("von Mises–Fisher needs m >= 2".into()));
        }
        let mu = match mu {
            Some(v) if v.len() == m + 1 => match SpherePoint::normalized(v)? {
                SpherePoint::Sphere(v) => v,
                SpherePoint::Circle(_) => unreachable!(),
            },
            Some(v) => {
                return Err(FssError::DimensionMismatch {
                    expected: m + 1,
                    found: v.len(),
                })
            }
            None => SpherePoint::north_pole(m).as_slice().unwrap().to_vec(),
        };
        Ok(Self::VonMisesFisher { m, mu, kappa })
    }

    pub fn two_point(a: f64, b: f64, w: f64) -> Result<Self> {
        if !(w > 0.0 && w < 1.0) {
            return Err(FssError::InvalidSpec(format!("weight {w} must lie in (0, 1)")));
        }
        let (a, b) = (wrap_angle(a), wrap_angle(b));
        if a == b {
            return Err(FssError::InvalidSpec("two-point law needs distinct points".into()));
        }
        Ok(Self::TwoPoint { a, b, w })
    }

    pub fn ring_mixture(m: usize, theta: f64, alpha: f64) -> Result<Self> {
        if m < 2 {
            return Err(FssError::InvalidSpec("ring mixture needs m >= 2".into()));
        }
        if !(theta > 0.0 && theta < PI) {
            return Err(FssError::InvalidSpec(format!("ring angle {theta} must lie in (0, π)")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(FssError::InvalidSpec(format!("ring mass {alpha} must lie in (0, 1]")));
        }
        Ok(Self::RingMixture { m, theta, alpha })
    }

    pub fn rot_sym(m: usize, mixing: MixingMeasure) -> Result<Self> {
        if m < 2 {
            return Err(FssError::InvalidSpec("rotationally symmetric law needs m >= 2".into()));
        }
        let point_mass = mixing.density.is_none()
            && mixing.atoms.iter().all(|a| a.0 == 0.0 || a.1 == 0.0);
        if point_mass {
            return Err(FssError::InvalidSpec("law is a point mass at the pole".into()));
        }
        Ok(Self::RotSym { m, mixing })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::VonMises { .. } | Self::ConditionedVonMises { .. } | Self::TwoPoint { .. } => 1,
            Self::VonMisesFisher { m, .. } | Self::RingMixture { m, .. } | Self::RotSym { m, .. } => *m,
        }
    }

    pub fn is_circular(&self) -> bool {
        self.dim() == 1
    }

    /// Prepares the sampling tables for repeated draws.
    pub fn sampler(&self) -> Result<Sampler> {
        Sampler::new(self)
    }

    /// Polar-angle law about the north pole for rotationally symmetric sphere laws.
    pub fn polar_law(&self) -> Result<Option<Box<dyn PolarLaw + Send + Sync>>> {
        Ok(match self {
            Self::VonMisesFisher { m, mu, kappa } => {
                if mu[0] != 1.0 {
                    return Err(FssError::InvalidSpec(
                        "polar law is defined about the north pole".into(),
                    ));
                }
                Some(Box::new(VmfPolarLaw::new(*m, *kappa)?))
            }
            Self::RingMixture { theta, alpha, .. } => {
                let mut atoms = vec![(*theta, *alpha)];
                if *alpha < 1.0 {
                    atoms.insert(0, (0.0, 1.0 - alpha));
                }
                Some(Box::new(MixingMeasure { atoms, density: None }))
            }
            Self::RotSym { mixing, .. } => Some(Box::new(mixing.clone())),
            _ => None,
        })
    }
}

fn von_mises_kernel(kappa: f64, t: f64) -> f64 {
    (kappa * (t.cos() - 1.0)).exp()
}

fn von_mises_density_centered(kappa: f64, t: f64) -> f64 {
    von_mises_kernel(kappa, t) / (TAU * bessel_i0e(kappa))
}

fn support_contains(support: &[(f64, f64)], x: f64) -> bool {
    support.iter().any(|&(lo, hi)| lo <= x && x <= hi)
}

/// Probability that the von Mises law lands in `support`.
fn support_mass(mu: f64, kappa: f64, support: &[(f64, f64)]) -> Result<f64> {
    let mut mass = 0.0;
    for &(lo, hi) in support {
        mass += integrate(
            |x| von_mises_density_centered(kappa, x - mu),
            lo,
            hi,
            Tolerance::relative(1e-14, 1e-15),
        )?;
    }
    Ok(mass)
}

/// Density with respect to arc length (circle) or surface measure (sphere).
pub fn density(spec: &DistributionSpec, x: &SpherePoint) -> Result<f64> {
    if x.dim() != spec.dim() {
        return Err(FssError::DimensionMismatch {
            expected: spec.dim(),
            found: x.dim(),
        });
    }
    match spec {
        DistributionSpec::VonMises { mu, kappa } => {
            Ok(von_mises_density_centered(*kappa, x.as_angle().unwrap() - mu))
        }
        DistributionSpec::ConditionedVonMises { mu, kappa, support } => {
            let a = x.as_angle().unwrap();
            if !support_contains(support, a) {
                return Ok(0.0);
            }
            let mass = support_mass(*mu, *kappa, support)?;
            Ok(von_mises_density_centered(*kappa, a - mu) / mass)
        }
        DistributionSpec::VonMisesFisher { m, mu, kappa } => {
            let law = VmfPolarLaw::new(*m, *kappa)?;
            let theta = crate::geometry::sphere_distance(mu, x.as_slice().unwrap());
            Ok(law.surface_density(theta))
        }
        DistributionSpec::TwoPoint { .. } => Err(FssError::NoDensity("two-point law is atomic")),
        DistributionSpec::RingMixture { .. } => Err(FssError::NoDensity("ring mixture is atomic")),
        DistributionSpec::RotSym { .. } => {
            Err(FssError::NoDensity("rotationally symmetric laws are specified by their polar law"))
        }
    }
}

/// Density at the antipode of the population mean of a circular law.
pub fn antipodal_density(spec: &DistributionSpec) -> Result<f64> {
    if !spec.is_circular() {
        return Err(FssError::InvalidSpec("antipodal density is defined for circular laws".into()));
    }
    let mean = match spec {
        DistributionSpec::VonMises { mu, .. } | DistributionSpec::ConditionedVonMises { mu, .. } => *mu,
        _ => return Err(FssError::NoDensity("two-point law is atomic")),
    };
    density(spec, &SpherePoint::angle(mean + PI))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationMoments {
    pub mean: SpherePoint,
    /// `V = E[d(X, μ)²]`.
    pub variance: f64,
    /// False when another point ties with `mean` as a global minimizer.
    pub unique: bool,
}

/// Mean and variance about the symmetry center without checking that the
/// center is a global minimizer. Suitable for local Fréchet means.
pub fn local_moments(spec: &DistributionSpec) -> Result<PopulationMoments> {
    let tol = Tolerance::relative(1e-13, 1e-14);
    let (mean, variance) = match spec {
        DistributionSpec::VonMises { mu, kappa } => {
            let v = integrate(|t| t * t * von_mises_density_centered(*kappa, t), -PI, PI, tol)?;
            (SpherePoint::Circle(*mu), v)
        }
        DistributionSpec::ConditionedVonMises { mu, kappa, support } => {
            let mass = support_mass(*mu, *kappa, support)?;
            let mut v = 0.0;
            for &(lo, hi) in support {
                v += circle_integral(lo, hi, *mu, |x| {
                    let d = circle_distance(x, *mu);
                    d * d * von_mises_density_centered(*kappa, x - mu)
                }, tol)?;
            }
            (SpherePoint::Circle(*mu), v / mass)
        }
        DistributionSpec::TwoPoint { a, b, w } => {
            let delta = wrap_angle(b - a);
            let mean = wrap_angle(a + (1.0 - w) * delta);
            let da = circle_distance(*a, mean);
            let db = circle_distance(*b, mean);
            (SpherePoint::Circle(mean), w * da * da + (1.0 - w) * db * db)
        }
        DistributionSpec::VonMisesFisher { m, mu, kappa } => {
            let law = VmfPolarLaw::new(*m, *kappa)?;
            let v = polar_expectation(&law, |t| t * t, tol)?;
            (SpherePoint::Sphere(mu.clone()), v)
        }
        DistributionSpec::RingMixture { m, theta, alpha } => {
            (SpherePoint::north_pole(*m), alpha * theta * theta)
        }
        DistributionSpec::RotSym { m, mixing } => {
            (SpherePoint::north_pole(*m), polar_expectation(mixing, |t| t * t, tol)?)
        }
    };
    Ok(PopulationMoments {
        mean,
        variance,
        unique: true,
    })
}

/// Integral over `[lo, hi]` split at the antipode of `p` (kink of `d(·, p)²`).
fn circle_integral<F: Fn(f64) -> f64>(lo: f64, hi: f64, p: f64, f: F, tol: Tolerance) -> Result<f64> {
    let cut = wrap_angle(p + PI);
    if lo < cut && cut < hi {
        Ok(integrate(&f, lo, cut, tol)? + integrate(&f, cut, hi, tol)?)
    } else {
        integrate(&f, lo, hi, tol)
    }
}

/// Population Fréchet function `F(p) = E[d(X, p)²]` of a circular law.
pub fn circle_population_frechet(spec: &DistributionSpec, p: f64) -> Result<f64> {
    let tol = Tolerance::relative(1e-12, 1e-13);
    match spec {
        DistributionSpec::VonMises { mu, kappa } => circle_integral(-PI, PI, p, |x| {
            let d = circle_distance(x, p);
            d * d * von_mises_density_centered(*kappa, x - mu)
        }, tol),
        DistributionSpec::ConditionedVonMises { mu, kappa, support } => {
            let mass = support_mass(*mu, *kappa, support)?;
            let mut v = 0.0;
            for &(lo, hi) in support {
                v += circle_integral(lo, hi, p, |x| {
                    let d = circle_distance(x, p);
                    d * d * von_mises_density_centered(*kappa, x - mu)
                }, tol)?;
            }
            Ok(v / mass)
        }
        DistributionSpec::TwoPoint { a, b, w } => {
            let (da, db) = (circle_distance(*a, p), circle_distance(*b, p));
            Ok(w * da * da + (1.0 - w) * db * db)
        }
        _ => Err(FssError::InvalidSpec("not a circular law".into())),
    }
}

/// Population Fréchet function of a rotationally symmetric sphere law at
/// polar angle `psi` from the north pole.
pub fn sphere_population_frechet(spec: &DistributionSpec, psi: f64) -> Result<f64> {
    let law = spec
        .polar_law()?
        .ok_or_else(|| FssError::InvalidSpec("not a rotationally symmetric sphere law".into()))?;
    let m = spec.dim();
    let inner_err = std::cell::RefCell::new(None);
    let value = polar_expectation(
        law.as_ref(),
        |t| match ring_frechet_function(m, t, psi) {
            Ok(v) => v,
            Err(e) => {
                *inner_err.borrow_mut() = Some(e);
                f64::NAN
            }
        },
        Tolerance::relative(1e-10, 1e-12),
    );
    if let Some(e) = inner_err.into_inner() {
        return Err(e);
    }
    value
}

const SCAN_POINTS: usize = 360;
const TIE_TOLERANCE: f64 = 1e-9;

/// Fréchet mean `μ` and variance `V` of a law satisfying the uniqueness
/// assumption. Scans the population Fréchet function to confirm that the
/// symmetry center is a global minimizer; a tie elsewhere clears `unique`.
pub fn population_mean_and_variance(spec: &DistributionSpec) -> Result<PopulationMoments> {
    match spec {
        DistributionSpec::VonMises { kappa, .. } | DistributionSpec::VonMisesFisher { kappa, .. }
            if *kappa == 0.0 =>
        {
            return Err(FssError::MeanNotUnique("uniform law: every point is a Fréchet mean".into()));
        }
        _ => {}
    }
    let mut moments = local_moments(spec)?;
    let best = moments.variance;
    let mut tie = false;
    match spec {
        DistributionSpec::VonMises { .. } | DistributionSpec::VonMisesFisher { .. } => {}
        DistributionSpec::TwoPoint { a, b, .. } => {
            tie = wrap_angle(b - a) == -PI;
        }
        DistributionSpec::ConditionedVonMises { .. } => {
            let center = moments.mean.as_angle().unwrap();
            for i in 0..SCAN_POINTS {
                let p = -PI + TAU * i as f64 / SCAN_POINTS as f64;
                let f = circle_population_frechet(spec, p)?;
                if f < best - TIE_TOLERANCE {
                    return Err(FssError::MeanNotUnique(format!(
                        "F({p:.4}) = {f} is below F(center) = {best}"
                    )));
                }
                if f <= best + TIE_TOLERANCE && circle_distance(p, center) > 0.05 {
                    tie = true;
                }
            }
        }
        DistributionSpec::RingMixture { .. } | DistributionSpec::RotSym { .. } => {
            const PSI_POINTS: usize = 64;
            for i in 1..=PSI_POINTS {
                let psi = PI * i as f64 / PSI_POINTS as f64;
                let f = sphere_population_frechet(spec, psi)?;
                if f < best - TIE_TOLERANCE {
                    return Err(FssError::MeanNotUnique(format!(
                        "F at polar angle {psi:.4} is {f}, below F(pole) = {best}"
                    )));
                }
                if f <= best + TIE_TOLERANCE && psi > 0.05 {
                    tie = true;
                }
            }
        }
    }
    moments.unique = !tie;
    Ok(moments)
}

#[derive(Debug, Clone)]
enum SamplerKind {
    VonMises {
        mu: f64,
        table: Vec<f64>,
    },
    Conditioned {
        mu: f64,
        table: Vec<f64>,
        support: Vec<(f64, f64)>,
    },
    Vmf {
        m: usize,
        mu: Vec<f64>,
        basis: Vec<Vec<f64>>,
        kappa: f64,
    },
    TwoPoint {
        a: f64,
        b: f64,
        w: f64,
    },
    Polar {
        m: usize,
        mixing: MixingMeasure,
    },
}

/// Prepared sampler; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: SamplerKind,
}

fn von_mises_table(kappa: f64) -> Vec<f64> {
    let cells = VON_MISES_TABLE_CELLS;
    let h = TAU / cells as f64;
    let mut cdf = Vec::with_capacity(cells + 1);
    cdf.push(0.0);
    let mut acc = 0.0;
    let mut prev = von_mises_kernel(kappa, -PI);
    for i in 1..=cells {
        let k = von_mises_kernel(kappa, -PI + h * i as f64);
        acc += 0.5 * h * (prev + k);
        cdf.push(acc);
        prev = k;
    }
    cdf.iter_mut().for_each(|c| *c /= acc);
    cdf
}

/// Inverse-CDF draw from the tabulated centered von Mises law.
fn draw_table<R: Rng>(table: &[f64], rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let cells = table.len() - 1;
    let i = match table.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
        Ok(i) => i.min(cells - 1),
        Err(i) => (i - 1).min(cells - 1),
    };
    let span = table[i + 1] - table[i];
    let t = if span > 0.0 { (u - table[i]) / span } else { 0.5 };
    -PI + TAU * (i as f64 + t) / cells as f64
}

fn uniform_direction<R: Rng>(rng: &mut R, m: usize, out: &mut [f64]) {
    loop {
        for o in out.iter_mut().take(m) {
            *o = rng.sample(StandardNormal);
        }
        let n = norm(&out[..m]);
        if n > 1e-12 {
            out[..m].iter_mut().for_each(|o| *o /= n);
            return;
        }
    }
}

/// Cosine of the polar angle of a von Mises–Fisher draw (Wood 1994).
fn wood_cosine<R: Rng>(rng: &mut R, m: usize, kappa: f64) -> f64 {
    let d = m as f64;
    let b = d / (2.0 * kappa + (4.0 * kappa * kappa + d * d).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + d * (1.0 - x0 * x0).ln();
    let beta = Beta::new(0.5 * d, 0.5 * d).expect("valid beta parameters");
    loop {
        let z: f64 = beta.sample(rng);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.random();
        if kappa * w + d * (1.0 - x0 * w).ln() - c >= u.ln() {
            return w.clamp(-1.0, 1.0);
        }
    }
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Self> {
        let kind = match spec {
            DistributionSpec::VonMises { mu, kappa } => SamplerKind::VonMises {
                mu: *mu,
                table: von_mises_table(*kappa),
            },
            DistributionSpec::ConditionedVonMises { mu, kappa, support } => {
                let mass = support_mass(*mu, *kappa, support)?;
                if mass <= 0.0 {
                    return Err(FssError::InvalidSpec("support carries no mass".into()));
                }
                SamplerKind::Conditioned {
                    mu: *mu,
                    table: von_mises_table(*kappa),
                    support: support.clone(),
                }
            }
            DistributionSpec::VonMisesFisher { m, mu, kappa } => SamplerKind::Vmf {
                m: *m,
                mu: mu.clone(),
                basis: tangent_basis(mu),
                kappa: *kappa,
            },
            DistributionSpec::TwoPoint { a, b, w } => SamplerKind::TwoPoint {
                a: *a,
                b: *b,
                w: *w,
            },
            DistributionSpec::RingMixture { m, theta, alpha } => {
                let mut atoms = vec![(*theta, *alpha)];
                if *alpha < 1.0 {
                    atoms.insert(0, (0.0, 1.0 - alpha));
                }
                SamplerKind::Polar {
                    m: *m,
                    mixing: MixingMeasure { atoms, density: None },
                }
            }
            DistributionSpec::RotSym { m, mixing } => SamplerKind::Polar {
                m: *m,
                mixing: mixing.clone(),
            },
        };
        Ok(Self { kind })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SamplerKind::VonMises { .. } | SamplerKind::Conditioned { .. } | SamplerKind::TwoPoint { .. } => 1,
            SamplerKind::Vmf { m, .. } | SamplerKind::Polar { m, .. } => *m,
        }
    }

    /// `n` i.i.d. draws; a pure function of `(self, n, stream)`.
    pub fn sample(&self, n: usize, stream: &RandomStream) -> Result<Sample> {
        let mut rng = stream.rng();
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(FssError::EmptySample);
        }
        Ok(match &self.kind {
            SamplerKind::VonMises { mu, table } => {
                Sample::Circle((0..n).map(|_| wrap_angle(mu + draw_table(table, rng))).collect())
            }
            SamplerKind::Conditioned { mu, table, support } => {
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    let mut tries = 0;
                    loop {
                        let x = wrap_angle(mu + draw_table(table, rng));
                        if support_contains(support, x) {
                            out.push(x);
                            break;
                        }
                        tries += 1;
                        if tries > MAX_REJECTIONS {
                            return Err(FssError::InvalidSpec(format!(
                                "more than {MAX_REJECTIONS} rejections: support mass too small"
                            )));
                        }
                    }
                }
                Sample::Circle(out)
            }
            SamplerKind::TwoPoint { a, b, w } => Sample::Circle(
                (0..n)
                    .map(|_| if rng.random::<f64>() < *w { *a } else { *b })
                    .collect(),
            ),
            SamplerKind::Vmf { m, mu, basis, kappa } => {
                let d = m + 1;
                let mut coords = vec![0.0; n * d];
                let mut q = vec![0.0; *m];
                for row in coords.chunks_exact_mut(d) {
                    let w = wood_cosine(rng, *m, *kappa);
                    uniform_direction(rng, *m, &mut q);
                    let s = (1.0 - w * w).max(0.0).sqrt();
                    let scaled: Vec<f64> = q.iter().map(|x| s * x).collect();
                    let tangent = from_coords(basis, &scaled);
                    for ((r, p), t) in row.iter_mut().zip(mu).zip(&tangent) {
                        *r = w * p + t;
                    }
                    let r = norm(row);
                    row.iter_mut().for_each(|x| *x /= r);
                }
                Sample::Sphere { dim: *m, coords }
            }
            SamplerKind::Polar { m, mixing } => {
                let d = m + 1;
                let mut coords = vec![0.0; n * d];
                for row in coords.chunks_exact_mut(d) {
                    let theta = mixing.draw(rng);
                    if theta == 0.0 {
                        row[0] = 1.0;
                        continue;
                    }
                    uniform_direction(rng, *m, &mut row[1..]);
                    let (s, c) = theta.sin_cos();
                    row[0] = c;
                    row[1..].iter_mut().for_each(|x| *x *= s);
                    let r = norm(row);
                    row.iter_mut().for_each(|x| *x /= r);
                }
                Sample::Sphere { dim: *m, coords }
            }
        })
    }
}

/// One-shot sampling; prefer [`Sampler`] for repeated draws.
pub fn sample(spec: &DistributionSpec, n: usize, stream: &RandomStream) -> Result<Sample> {
    Sampler::new(spec)?.sample(n, stream)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum WireSpec {
    VonMises {
        mu: f64,
        kappa: f64,
    },
    ConditionedVonMises {
        mu: f64,
        kappa: f64,
        support: Vec<[f64; 2]>,
    },
    Vmf {
        m: usize,
        kappa: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu: Option<Vec<f64>>,
    },
    TwoPoint {
        a: f64,
        b: f64,
        w: f64,
    },
    RingMixture {
        m: usize,
        theta: f64,
        alpha: f64,
    },
    RotSym {
        m: usize,
        #[serde(default)]
        atoms: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<Vec<f64>>,
    },
}

impl TryFrom<WireSpec> for DistributionSpec {
    type Error = FssError;

    fn try_from(w: WireSpec) -> Result<Self> {
        match w {
            WireSpec::VonMises { mu, kappa } => Self::von_mises(mu, kappa),
            WireSpec::ConditionedVonMises { mu, kappa, support } => {
                Self::conditioned_von_mises(mu, kappa, support.into_iter().map(|[a, b]| (a, b)).collect())
            }
            WireSpec::Vmf { m, kappa, mu } => Self::von_mises_fisher(m, mu, kappa),
            WireSpec::TwoPoint { a, b, w } => Self::two_point(a, b, w),
            WireSpec::RingMixture { m, theta, alpha } => Self::ring_mixture(m, theta, alpha),
            WireSpec::RotSym { m, atoms, density } => Self::rot_sym(
                m,
                MixingMeasure::new(atoms.into_iter().map(|[t, w]| (t, w)).collect(), density)?,
            ),
        }
    }
}

impl From<&DistributionSpec> for WireSpec {
    fn from(s: &DistributionSpec) -> Self {
        match s {
            DistributionSpec::VonMises { mu, kappa } => WireSpec::VonMises { mu: *mu, kappa: *kappa },
            DistributionSpec::ConditionedVonMises { mu, kappa, support } => WireSpec::ConditionedVonMises {
                mu: *mu,
                kappa: *kappa,
                support: support.iter().map(|&(a, b)| [a, b]).collect(),
            },
            DistributionSpec::VonMisesFisher { m, mu, kappa } => WireSpec::Vmf {
                m: *m,
                kappa: *kappa,
                mu: (mu[0] != 1.0).then(|| mu.clone()),
            },
            DistributionSpec::TwoPoint { a, b, w } => WireSpec::TwoPoint { a: *a, b: *b, w: *w },
            DistributionSpec::RingMixture { m, theta, alpha } => WireSpec::RingMixture {
                m: *m,
                theta: *theta,
                alpha: *alpha,
            },
            DistributionSpec::RotSym { m, mixing } => WireSpec::RotSym {
                m: *m,
                atoms: mixing.atoms.iter().map(|&(t, w)| [t, w]).collect(),
                density: mixing.density.as_ref().map(|d| d.values().to_vec()),
            },
        }
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = WireSpec::deserialize(d)?;
        DistributionSpec::try_from(wire).map_err(serde::de::Error::custom)
    }
}

impl DistributionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}
