//! The radial exterior Plateau graph over `{|x| > R} ⊂ R^N`.
//!
//! The radial minimal graph with vertical tangent on `|x| = R` and zero limit
//! at infinity is
//!
//! ```text
//! v_R(r) = ∫_r^∞ ρ^{1-N} / √(R^{2-2N} - ρ^{2-2N}) dρ,
//! v_R'(r) = -q / √(1 - q²),  q = (R/r)^{N-1},
//! ```
//!
//! so the flux `r^{N-1} v' / √(1 + v'²)` equals `-R^{N-1}` identically. With
//! `u = R/ρ` the integral becomes `R ∫_0^{R/r} u^{N-3} / √(1 - u^{2N-2}) du`;
//! the square-root singularity at `u = 1` is removed by `w² = 1 - u^{2N-2}`.
//!
//! Far out `v_R(r) = R^{N-1} r^{2-N} / (N-2) + O(r^{4-3N})` and the dilation
//! field `ζ_0 = (v - r v') / √(1 + v'²)` behaves like
//! `(N-1) R^{N-1} r^{2-N} / (N-2)`, i.e. it decays at the rate `2 - N`.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::decay::{fit_power_law, DecayFit};
use crate::error::{Error, Result};

const GL_ORDER: usize = 48;
/// Split point in `u = R/ρ` between the plain and the substituted integral.
const U_SPLIT: f64 = 0.5;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(GL_ORDER).unwrap()))
}

fn check(dim: u32, radius: f64) -> Result<()> {
    if dim < 3 {
        return Err(Error::InvalidParameter(format!("dimension N = {dim} must be at least 3")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius R = {radius} must be positive")));
    }
    Ok(())
}

/// `∫_0^U u^{N-3} / √(1 - u^{2N-2}) du` for `0 ≤ U ≤ 1`.
fn unit_integral(dim: u32, upper: f64) -> f64 {
    let n = dim as f64;
    let e = 2.0 * n - 2.0;
    let smooth = |u: f64| u.powf(n - 3.0) / (-(e * u.ln()).exp_m1()).sqrt();
    let uc = upper.min(U_SPLIT);
    let mut total = if uc > 0.0 { rule().integrate(0.0, uc, smooth) } else { 0.0 };
    if upper > U_SPLIT {
        let w_of = |u: f64| (-(e * u.ln()).exp_m1()).sqrt();
        let (w_hi, w_lo) = (w_of(U_SPLIT), w_of(upper));
        let expo = -n / e;
        total += rule().integrate(w_lo, w_hi, |w| (1.0 - w * w).powf(expo)) / (n - 1.0);
    }
    total
}

/// `v_R(r)` for `r ≥ R`.
pub fn plateau_value(dim: u32, radius: f64, r: f64) -> Result<f64> {
    check(dim, radius)?;
    if !(r >= radius) {
        return Err(Error::InvalidParameter(format!("r = {r} lies inside the obstacle R = {radius}")));
    }
    Ok(radius * unit_integral(dim, radius / r))
}

/// `v_R'(r)` for `r > R`, in closed form.
pub fn plateau_slope(dim: u32, radius: f64, r: f64) -> f64 {
    let n = dim as f64;
    let lq = (n - 1.0) * (radius / r).ln();
    let one_minus_q2 = -(2.0 * lq).exp_m1();
    -lq.exp() / one_minus_q2.sqrt()
}

/// Boundary value `α(R) = v_R(R⁺)`.
#[allow(non_snake_case)]
pub fn alpha_of_R(dim: u32, radius: f64) -> Result<f64> {
    check(dim, radius)?;
    Ok(radius * unit_integral(dim, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGraph {
    pub dim: u32,
    pub radius: f64,
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    #[serde(rename = "alphaR")]
    pub alpha_r: f64,
}

impl RadialGraph {
    /// `R^{N-1}`, the magnitude of the conserved flux.
    pub fn flux_const(&self) -> f64 {
        self.radius.powi(self.dim as i32 - 1)
    }

    /// `R^{N-1} / (N-2)`, the coefficient of `r^{2-N}` in `v_R`.
    pub fn decay_coeff(&self) -> f64 {
        self.flux_const() / (self.dim as f64 - 2.0)
    }

    pub fn flux_residuals(&self) -> Vec<f64> {
        let n = self.dim as f64;
        let c = self.flux_const();
        self.r
            .iter()
            .zip(&self.dv)
            .map(|(&r, &dv)| r.powf(n - 1.0) * dv / (1.0 + dv * dv).sqrt() + c)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Samples `v_R` on `r ∈ [R(1 + 1e-8), r_max]`, log-uniformly with
/// `points_per_unit` points per unit of `log r`.
pub fn plateau_profile(dim: u32, radius: f64, r_max: f64, points_per_unit: usize) -> Result<RadialGraph> {
    check(dim, radius)?;
    if !(r_max > radius) {
        return Err(Error::InvalidParameter(format!("r_max = {r_max} must exceed R = {radius}")));
    }
    if points_per_unit == 0 {
        return Err(Error::InvalidParameter("points_per_unit must be positive".into()));
    }
    let r0 = radius * (1.0 + 1e-8);
    let r = crate::profile::log_uniform_grid(r0, r_max, points_per_unit);
    let v = r.iter().map(|&x| radius * unit_integral(dim, radius / x)).collect();
    let dv = r.iter().map(|&x| plateau_slope(dim, radius, x)).collect();
    Ok(RadialGraph { dim, radius, r, v, dv, alpha_r: alpha_of_R(dim, radius)? })
}

/// `ζ_0 = (v - r v') / √(1 + v'²)` on the graph samples.
pub fn plateau_zeta0_samples(graph: &RadialGraph) -> Vec<f64> {
    graph
        .r
        .iter()
        .zip(graph.v.iter().zip(&graph.dv))
        .map(|(&r, (&v, &dv))| (v - r * dv) / (1.0 + dv * dv).sqrt())
        .collect()
}

/// Sampled `ζ_0` and its power-law fit over `[10² R, 10³ R]`.
pub fn plateau_zeta0(graph: &RadialGraph) -> Result<(Vec<f64>, DecayFit)> {
    let z = plateau_zeta0_samples(graph);
    let pts: Vec<(f64, f64)> = graph.r.iter().copied().zip(z.iter().copied()).collect();
    let fit = fit_power_law(&pts, (1e2 * graph.radius, 1e3 * graph.radius), false)?;
    Ok((z, fit))
}

/// `sup |r^{N-1} v' / √(1 + v'²) + R^{N-1}|` over the grid.
pub fn minimal_graph_residual(graph: &RadialGraph) -> f64 {
    graph.flux_residuals().into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Composite Simpson on `∫_0^1 (1 - u⁴)^{-1/2} du` after `u = 1 - y²`.
    fn simpson_oracle(n: usize) -> f64 {
        // 1 - u⁴ = y² (1 + u)(1 + u²), so the factor y cancels against du
        let g = |y: f64| {
            let u = 1.0 - y * y;
            2.0 / ((1.0 + u) * (1.0 + u * u)).sqrt()
        };
        let h = 1.0 / n as f64;
        let mut s = g(0.0) + g(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn alpha_matches_oracle() {
        let oracle = simpson_oracle(20_000);
        assert_relative_eq!(oracle, 1.311028777146, max_relative = 1e-10);
        assert_relative_eq!(alpha_of_R(3, 1.0).unwrap(), oracle, max_relative = 1e-10);
    }

    #[test]
    fn scaling_law() {
        for n in [3, 4, 5, 7] {
            let a1 = alpha_of_R(n, 1.0).unwrap();
            for r in [0.5, 2.0] {
                assert_relative_eq!(alpha_of_R(n, r).unwrap() / r, a1, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn value_continuous_at_split() {
        // R/r = 1/2 exactly is where the two quadratures meet
        let below = plateau_value(4, 1.0, 2.0 * (1.0 + 1e-12)).unwrap();
        let above = plateau_value(4, 1.0, 2.0 * (1.0 - 1e-12)).unwrap();
        assert!((below - above).abs() < 1e-10);
    }

    #[test]
    fn slope_matches_quadrature_derivative() {
        let (n, r0) = (5, 1.7);
        let h = 1e-4;
        let fd = (plateau_value(n, 1.0, r0 + h).unwrap() - plateau_value(n, 1.0, r0 - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(fd, plateau_slope(n, 1.0, r0), max_relative = 1e-7);
    }

    #[test]
    fn slope_at_two() {
        let want = -0.25 / (1.0f64 - 1.0 / 16.0).sqrt();
        assert_relative_eq!(plateau_slope(3, 1.0, 2.0), want, max_relative = 1e-15);
    }

    #[test]
    fn profile_properties() {
        let g = plateau_profile(4, 1.0, 1e3, 100).unwrap();
        assert!(minimal_graph_residual(&g) < 1e-10);
        assert!(g.v.windows(2).all(|w| w[1] < w[0]));
        assert!(g.dv.iter().all(|&d| d < 0.0));
        assert!(plateau_slope(4, 1.0, 1.0 + 1e-7).abs() > 1e3);
        assert_relative_eq!(g.v[0], g.alpha_r, max_relative = 1e-3);
    }

    #[test]
    fn far_field_coefficients() {
        for n in [3u32, 5] {
            let g = plateau_profile(n, 1.0, 1e3, 50).unwrap();
            let r = *g.r.last().unwrap();
            let v = *g.v.last().unwrap();
            assert_relative_eq!(r.powi(n as i32 - 2) * v, g.decay_coeff(), max_relative = 1e-3);
            let (z, fit) = plateau_zeta0(&g).unwrap();
            let want = (n as f64 - 1.0) * g.decay_coeff();
            assert_relative_eq!(r.powi(n as i32 - 2) * z.last().unwrap(), want, max_relative = 1e-3);
            assert!((fit.exponent - (2.0 - n as f64)).abs() < 1e-3);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(plateau_profile(2, 1.0, 10.0, 10).is_err());
        assert!(plateau_profile(3, 1.0, 0.5, 10).is_err());
        assert!(plateau_value(3, 1.0, 0.9).is_err());
        assert!(alpha_of_R(3, -1.0).is_err());
    }
}
