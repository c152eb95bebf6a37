use cjl_core::jacobi::{solve_jacobi, trace_rhs, JacobiConfig};
use cjl_core::profile::{cone_crossings, integrate_profile, zeta0_fit};
use cjl_core::{ConeSpec, SampleGrid, ShootingConfig, Start};
use proptest::prelude::*;

#[test]
fn stable_cone_end_to_end() {
    let sp = ConeSpec::new(4, 4).unwrap();
    let curve = integrate_profile(&ShootingConfig::new(sp, Start::AxisM, 2000.0)).unwrap();
    assert_eq!(cone_crossings(&curve), 0);
    let fit = zeta0_fit(&curve).unwrap();
    assert!((fit.exponent + 2.0).abs() < 0.05, "{}", fit.exponent);
    let sol = solve_jacobi(&curve, trace_rhs(&curve), &JacobiConfig::default()).unwrap();
    assert!(sol.residual_sup <= sol.target);
    assert!(sol.wronskian_drift() < 1e-8);
    assert!(sol.decay_report.nonincreasing);
}

#[test]
fn axis_starts_mirror_each_other() {
    // C(2,3) from the R^3 axis is C(3,2) from the R^2 axis with a and b swapped
    let a = integrate_profile(&ShootingConfig::new(ConeSpec::new(2, 3).unwrap(), Start::AxisN, 20.0)).unwrap();
    let b = integrate_profile(&ShootingConfig::new(ConeSpec::new(3, 2).unwrap(), Start::AxisM, 20.0)).unwrap();
    for s in [0.5, 3.0, 19.0] {
        let (p, q) = (a.at(s), b.at(s));
        assert!((p.a - q.b).abs() < 1e-8 && (p.b - q.a).abs() < 1e-8, "s = {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn profiles_stay_unit_speed(m in 2u32..7, n in 2u32..7, eps in 1e-4f64..1e-2) {
        let cfg = ShootingConfig::new(ConeSpec::new(m, n).unwrap(), Start::AxisM, 50.0)
            .with_epsilon(eps)
            .with_grid(SampleGrid::LogUniform { points_per_unit: 20 });
        let c = integrate_profile(&cfg).unwrap();
        for p in c.samples() {
            prop_assert!(c.arc_length_defect(p.s).abs() < 1e-9);
            prop_assert!(p.a > 0.0 && p.b >= 0.0);
        }
        let (ra, rb) = ((n as f64 - 1.0).sqrt(), (m as f64 - 1.0).sqrt());
        let end = c.at(50.0);
        // far out the profile hugs the cone ray
        prop_assert!((end.b / end.a - ra / rb).abs() < 0.05);
    }
}
