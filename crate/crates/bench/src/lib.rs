//! Shared fixtures for the pipeline benchmarks.

use cjl_core::profile::integrate_profile;
use cjl_core::{ConeSpec, ProfileCurve, ShootingConfig, Start};

pub const CONES: [(u32, u32); 3] = [(2, 2), (3, 3), (4, 4)];

pub fn profile(m: u32, n: u32, s_max: f64) -> ProfileCurve {
    let spec = ConeSpec::new(m, n).expect("benchmark cones are valid");
    integrate_profile(&ShootingConfig::new(spec, Start::AxisM, s_max)).expect("benchmark profiles integrate")
}
