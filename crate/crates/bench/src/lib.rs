//! Fixed inputs shared by the benchmarks.

use fss_core::distributions::sample;
use fss_core::{DistributionSpec, RandomStream, Sample};

pub fn von_mises_sample(n: usize, kappa: f64, seed: u64) -> Sample {
    let spec = DistributionSpec::von_mises(0.0, kappa).expect("valid spec");
    sample(&spec, n, &RandomStream::new(seed)).expect("sample")
}

pub fn vmf_sample(m: usize, n: usize, kappa: f64, seed: u64) -> Sample {
    let spec = DistributionSpec::von_mises_fisher(m, None, kappa).expect("valid spec");
    sample(&spec, n, &RandomStream::new(seed)).expect("sample")
}
