//! Fréchet means on circles and spheres, modulation estimates and finite
//! sample smeariness diagnostics.
//!
//! The modulation `𝔪_n = n V_n / V` compares the spread of the sample
//! Fréchet mean with the Euclidean prediction. It is identically 1 for
//! Euclidean behaviour and exceeds 1 under finite sample smeariness.

pub mod analysis;
pub mod distributions;
pub mod error;
pub mod frechet;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod sample;
pub mod special;
pub mod stats;
pub mod testing;

pub use analysis::{
    circle_limit_modulation, classify_fss, clt_analysis, feasibility_threshold, fit_regimes,
    ring_frechet_function, ring_hessian_coefficient, ring_mixture_search, rotsym_hessian,
    rotsym_hessian_coefficient, CLTResult, FSSClass, FssLabel, RegimeFit, RingSearchResult,
};
pub use distributions::{
    antipodal_density, population_mean_and_variance, DistributionSpec, MixingMeasure,
    PopulationMoments, Sampler,
};
pub use error::{ErrorKind, FssError, Result};
pub use frechet::{
    bootstrap_modulation, empirical_tangent_covariance, frechet_function, frechet_mean,
    local_frechet_mean, monte_carlo_modulation, BootstrapModulation, FrechetMeanResult,
    MeanOptions, MeanSelection, ModulationCurve, ModulationEntry, ModulationOptions,
};
pub use geometry::{exp_map, geodesic_distance, log_map, SpherePoint, TangentVector};
pub use io::{AngleDataset, AngleUnit};
pub use rng::RandomStream;
pub use sample::Sample;
pub use testing::{
    one_sample_quantile_test, rejection_curve, two_sample_bootstrap_test,
    two_sample_quantile_test, RejectionOptions, RejectionRow, TestMethod, TestReport,
};
