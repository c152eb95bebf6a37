//! O(m)×O(n)-invariant minimal hypersurfaces as planar profile curves.
//!
//! A hypersurface `Σ = {(a(s) x, b(s) y) : x ∈ S^{m-1}, y ∈ S^{n-1}}` is
//! minimal iff its arc-length profile `γ(s) = (a, b)` with tangent angle `φ`
//! (`a' = cos φ`, `b' = sin φ`) satisfies
//!
//! ```text
//! φ' = (n-1) cos φ / b - (m-1) sin φ / a.
//! ```
//!
//! Internally the curve is integrated in polar form `(r, θ, δ)` with
//! `a = r cos θ`, `b = r sin θ` and `δ = φ - θ`. The dilation field
//! `ζ_0 = a b' - a' b = r sin δ` is then available without cancellation far
//! out along the cone, where `a` and `b` are large and `ζ_0` is tiny.
//!
//! Principal curvatures (normal `ν = (sin φ · x, -cos φ · y)` for a start on
//! the `R^m` axis) are `κ_0 = φ'`, `κ_a = sin φ / a` with multiplicity `m-1`
//! and `κ_b = -cos φ / b` with multiplicity `n-1`; their weighted sum is the
//! mean curvature.

use serde::{Deserialize, Serialize};

use crate::cone_spectra::{ConeSpec, Regime};
use crate::decay::{fit_power_law, DecayFit, DEFAULT_WINDOW, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution, StepControl, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// Orthogonal start on `R^m × {0}` at `(a, b) = (1, 0)`.
    AxisM,
    /// Orthogonal start on `{0} × R^n` at `(a, b) = (0, 1)`.
    AxisN,
    /// Arbitrary interior point with tangent angle `phi`, at arc length `s0`.
    Point { s0: f64, a: f64, b: f64, phi: f64 },
}

impl Start {
    /// Orientation sign making `ζ_0(0⁺) = +1` at an axis start.
    pub fn orientation(&self) -> f64 {
        match self {
            Start::AxisN => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleGrid {
    /// Integrator-accepted step endpoints.
    Steps,
    /// `points_per_unit` samples per unit of `log s`, starting at the first
    /// arc length (uniform in the Emden–Fowler variable).
    LogUniform { points_per_unit: usize },
    /// Uniform in `s` with the given spacing, starting at the first arc length.
    Uniform { ds: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub spec: ConeSpec,
    pub start: Start,
    pub epsilon: f64,
    pub s_max: f64,
    pub tol: Tolerance,
    pub grid: SampleGrid,
}

impl ShootingConfig {
    pub fn new(spec: ConeSpec, start: Start, s_max: f64) -> Self {
        Self {
            spec,
            start,
            epsilon: 1e-3,
            s_max,
            tol: Tolerance::new(1e-12, 1e-13),
            grid: SampleGrid::Steps,
        }
    }

    pub fn with_grid(mut self, grid: SampleGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn with_tol(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        let s0 = self.s_start();
        if !(self.epsilon > 0.0 && self.epsilon < 0.1) && !matches!(self.start, Start::Point { .. }) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 0.1), got {}", self.epsilon)));
        }
        if !(self.s_max > s0) {
            return Err(Error::InvalidParameter(format!("s_max = {} must exceed start {}", self.s_max, s0)));
        }
        if !(self.tol.rtol > 0.0 && self.tol.atol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        match self.grid {
            SampleGrid::LogUniform { points_per_unit: 0 } => {
                Err(Error::InvalidParameter("points_per_unit must be positive".into()))
            }
            SampleGrid::Uniform { ds } if !(ds > 0.0) => Err(Error::InvalidParameter("ds must be positive".into())),
            _ => Ok(()),
        }
    }

    fn s_start(&self) -> f64 {
        match self.start {
            Start::Point { s0, .. } => s0,
            _ => self.epsilon,
        }
    }
}

/// Series start `(a, b, φ)` at arc length `eps` from the `R^m` axis.
pub fn axis_series_start(spec: ConeSpec, eps: f64) -> (f64, f64, f64) {
    let (m, n) = (spec.mf(), spec.nf());
    let a = 1.0 + (m - 1.0) * eps * eps / (2.0 * n);
    let b = eps;
    let phi = std::f64::consts::FRAC_PI_2 - (m - 1.0) * eps / n;
    (a, b, phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub phi: f64,
    /// `φ - θ`, the angle between the tangent and the position vector.
    pub delta: f64,
}

impl ProfileSample {
    fn from_state(s: f64, y: &[f64; 3]) -> Self {
        let [r, theta, delta] = *y;
        Self { s, a: r * theta.cos(), b: r * theta.sin(), phi: theta + delta, delta }
    }

    pub fn radius(&self) -> f64 {
        self.a.hypot(self.b)
    }

    /// Unoriented `a b' - a' b`.
    pub fn raw_zeta0(&self) -> f64 {
        self.radius() * self.delta.sin()
    }

    /// `a a' + b b'`.
    pub fn zeta_m(&self) -> f64 {
        self.radius() * self.delta.cos()
    }
}

/// Curvature data at one point of a profile, for a given orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvatures {
    pub kappa0: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
}

pub fn phi_prime(spec: ConeSpec, a: f64, b: f64, phi: f64) -> f64 {
    (spec.nf() - 1.0) * phi.cos() / b - (spec.mf() - 1.0) * phi.sin() / a
}

pub fn curvatures(spec: ConeSpec, a: f64, b: f64, phi: f64, orientation: f64) -> Curvatures {
    Curvatures {
        kappa0: orientation * phi_prime(spec, a, b, phi),
        kappa_a: orientation * phi.sin() / a,
        kappa_b: -orientation * phi.cos() / b,
    }
}

pub(crate) fn polar_rhs(spec: ConeSpec, y: &[f64; 3]) -> [f64; 3] {
    let [r, theta, delta] = *y;
    let a = r * theta.cos();
    let b = r * theta.sin();
    if !(a > 0.0 && b > 0.0 && r > 0.0) {
        return [f64::NAN; 3];
    }
    let phi = theta + delta;
    let dtheta = delta.sin() / r;
    let dphi = phi_prime(spec, a, b, phi);
    [delta.cos(), dtheta, dphi - dtheta]
}

fn polar_state(a: f64, b: f64, phi: f64) -> [f64; 3] {
    let theta = b.atan2(a);
    [a.hypot(b), theta, phi - theta]
}

/// Arc-length sampled solution of the profile equation.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    spec: ConeSpec,
    start: Start,
    samples: Vec<ProfileSample>,
    dense: DenseSolution<3>,
}

impl ProfileCurve {
    pub fn spec(&self) -> ConeSpec {
        self.spec
    }

    pub fn start(&self) -> Start {
        self.start
    }

    pub fn orientation(&self) -> f64 {
        self.start.orientation()
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn arc_lengths(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.s).collect()
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.dense.x_start(), self.dense.x_end())
    }

    /// Number of accepted integrator steps.
    pub fn n_steps(&self) -> usize {
        self.dense.n_steps()
    }

    /// Continuous-extension state at any arc length in range.
    pub fn at(&self, s: f64) -> ProfileSample {
        ProfileSample::from_state(s, &self.dense.eval(s))
    }

    /// Polar state `(r, θ, δ)` at arc length `s`.
    pub fn polar_at(&self, s: f64) -> [f64; 3] {
        self.dense.eval(s)
    }

    /// `φ'` measured from the interpolated curve (derivative of the continuous
    /// extension), independent of the curvature formula.
    pub fn measured_phi_prime(&self, s: f64) -> f64 {
        let d = self.dense.eval_deriv(s);
        d[1] + d[2]
    }

    /// `|γ'|² - 1` measured from the continuous extension.
    pub fn arc_length_defect(&self, s: f64) -> f64 {
        let [r, _, _] = self.dense.eval(s);
        let d = self.dense.eval_deriv(s);
        d[0] * d[0] + (r * d[1]) * (r * d[1]) - 1.0
    }

    /// Oriented `ζ_0 = y · ν` at each sample.
    pub fn zeta0(&self) -> Vec<f64> {
        let o = self.orientation();
        self.samples.iter().map(|p| o * p.raw_zeta0()).collect()
    }
}

/// Integrates the profile equation per the shooting configuration.
pub fn integrate_profile(cfg: &ShootingConfig) -> Result<ProfileCurve> {
    cfg.validate()?;
    let spec = cfg.spec;
    let s0 = cfg.s_start();
    let y0 = match cfg.start {
        Start::AxisM => {
            let (a, b, phi) = axis_series_start(spec, cfg.epsilon);
            polar_state(a, b, phi)
        }
        Start::AxisN => {
            // mirror of the R^m start under (a, b, m, n, φ) -> (b, a, n, m, π/2 - φ)
            let mirrored = ConeSpec::new(spec.n(), spec.m())?;
            let (b, a, psi) = axis_series_start(mirrored, cfg.epsilon);
            polar_state(a, b, std::f64::consts::FRAC_PI_2 - psi)
        }
        Start::Point { a, b, phi, .. } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidParameter("point start must lie in the open quadrant".into()));
            }
            polar_state(a, b, phi)
        }
    };

    let h_init = if s0 > 0.0 { (s0 * 1e-3).min(1e-4) } else { 1e-4 };
    let ctrl = StepControl::new(cfg.tol).with_h_init(h_init);
    let dense = ode::integrate(|_, y| polar_rhs(spec, y), s0, y0, cfg.s_max, ctrl)
        .map_err(|e| Error::Integration { last_s: e.position(), source: e })?;

    let points: Vec<f64> = match cfg.grid {
        SampleGrid::Steps => dense.mesh(),
        SampleGrid::LogUniform { points_per_unit } => log_uniform_grid(s0, cfg.s_max, points_per_unit),
        SampleGrid::Uniform { ds } => {
            let count = ((cfg.s_max - s0) / ds).floor() as usize;
            (0..=count).map(|k| s0 + k as f64 * ds).collect()
        }
    };
    let samples = points
        .into_iter()
        .map(|s| ProfileSample::from_state(s, &dense.eval(s)))
        .collect();
    Ok(ProfileCurve { spec, start: cfg.start, samples, dense })
}

/// `s_k = s0 · exp(k / K)` for all `s_k ≤ s_max`.
pub fn log_uniform_grid(s0: f64, s_max: f64, points_per_unit: usize) -> Vec<f64> {
    let h = 1.0 / points_per_unit as f64;
    let t0 = s0.ln();
    let count = (((s_max.ln() - t0) / h) + 1e-9).floor() as usize;
    (0..=count).map(|k| (t0 + k as f64 * h).exp()).collect()
}

/// Per-sample geometric quantities along a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryTrace {
    pub s: Vec<f64>,
    pub alpha: Vec<f64>,
    #[serde(rename = "A2")]
    pub a2: Vec<f64>,
    #[serde(rename = "trA3")]
    pub tra3: Vec<f64>,
    pub zeta0: Vec<f64>,
    #[serde(rename = "Hres")]
    pub hres: Vec<f64>,
}

impl GeometryTrace {
    pub fn max_abs_hres(&self) -> f64 {
        self.hres.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `α = (m-1) a'/a + (n-1) b'/b`.
pub fn alpha(spec: ConeSpec, p: &ProfileSample) -> f64 {
    (spec.mf() - 1.0) * p.phi.cos() / p.a + (spec.nf() - 1.0) * p.phi.sin() / p.b
}

/// `|A|²` in the form `(−a''b' + a'b'')² + (m-1)(b'/a)² + (n-1)(a'/b)²`.
pub fn second_fundamental_form_sq(spec: ConeSpec, p: &ProfileSample) -> f64 {
    let k0 = phi_prime(spec, p.a, p.b, p.phi);
    let (sa, cb) = (p.phi.sin() / p.a, p.phi.cos() / p.b);
    k0 * k0 + (spec.mf() - 1.0) * sa * sa + (spec.nf() - 1.0) * cb * cb
}

pub fn trace_a3(spec: ConeSpec, p: &ProfileSample, orientation: f64) -> f64 {
    let k = curvatures(spec, p.a, p.b, p.phi, orientation);
    k.kappa0.powi(3) + (spec.mf() - 1.0) * k.kappa_a.powi(3) + (spec.nf() - 1.0) * k.kappa_b.powi(3)
}

pub fn geometry_trace(curve: &ProfileCurve) -> GeometryTrace {
    let spec = curve.spec();
    let o = curve.orientation();
    let n = curve.len();
    let mut tr = GeometryTrace {
        s: Vec::with_capacity(n),
        alpha: Vec::with_capacity(n),
        a2: Vec::with_capacity(n),
        tra3: Vec::with_capacity(n),
        zeta0: Vec::with_capacity(n),
        hres: Vec::with_capacity(n),
    };
    for p in curve.samples() {
        tr.s.push(p.s);
        tr.alpha.push(alpha(spec, p));
        tr.a2.push(second_fundamental_form_sq(spec, p));
        tr.tra3.push(trace_a3(spec, p, o));
        tr.zeta0.push(o * p.raw_zeta0());
        let k = curvatures(spec, p.a, p.b, p.phi, 1.0);
        let h_formula = (spec.mf() - 1.0) * k.kappa_a + (spec.nf() - 1.0) * k.kappa_b;
        tr.hres.push(curve.measured_phi_prime(p.s) + h_formula);
    }
    tr
}

pub fn jacobi_field_dilation(curve: &ProfileCurve) -> Vec<f64> {
    curve.zeta0()
}

/// Profiles `(a', b')` of the translation Jacobi fields `e_j · ν`.
pub fn jacobi_field_translation(curve: &ProfileCurve) -> Vec<(f64, f64)> {
    curve.samples().iter().map(|p| (p.phi.cos(), p.phi.sin())).collect()
}

/// Profile `a a' + b b'` of the rotation field mixing `x_1` and `y_1`; the
/// full field is this profile times the angular factor `-x̂_1 ŷ_1`.
pub fn jacobi_field_rotation(curve: &ProfileCurve) -> Vec<f64> {
    curve.samples().iter().map(ProfileSample::zeta_m).collect()
}

/// Strict sign changes of `(n-1) a² - (m-1) b²` along the samples. Values
/// within rounding of zero (relative to `r²`) count as on the cone.
pub fn cone_crossings(curve: &ProfileCurve) -> usize {
    let spec = curve.spec();
    let side = |p: &ProfileSample| (spec.nf() - 1.0) * p.a * p.a - (spec.mf() - 1.0) * p.b * p.b;
    let mut count = 0;
    let mut last = 0.0f64;
    for p in curve.samples() {
        let v = side(p);
        if v.abs() <= 1e-12 * (spec.nf() + spec.mf()) * (p.a * p.a + p.b * p.b) {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

/// Window in `s` for fitting the decay of `ζ_0`: one decade past the core for
/// stable cones, six decades for unstable ones, where only the envelope of
/// the oscillation is fitted.
pub fn zeta0_fit_window(regime: Regime) -> (f64, f64) {
    match regime {
        Regime::HighDim => DEFAULT_WINDOW,
        Regime::LowDim => (1e1, 1e7),
    }
}

/// Power-law fit of `ζ_0`, resampled at 200 points per unit of `log s` over
/// the fit window clipped to the curve.
pub fn zeta0_fit(curve: &ProfileCurve) -> Result<DecayFit> {
    let (lo, hi) = zeta0_fit_window(curve.spec().regime());
    let (s0, s1) = curve.s_range();
    let window = (lo.max(2.0 * s0), hi.min(s1));
    if window.0 >= window.1 {
        return Err(Error::InsufficientSamples { needed: MIN_SAMPLES, have: 0 });
    }
    let o = curve.orientation();
    let pts: Vec<(f64, f64)> = log_uniform_grid(window.0, window.1, 200)
        .into_iter()
        .map(|s| (s, o * curve.at(s).raw_zeta0()))
        .collect();
    fit_power_law(&pts, window, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(m: u32, n: u32) -> ConeSpec {
        ConeSpec::new(m, n).unwrap()
    }

    fn cone_ray(sp: ConeSpec, s0: f64, s1: f64) -> ProfileCurve {
        let th = sp.cone_angle();
        let cfg = ShootingConfig {
            spec: sp,
            start: Start::Point { s0, a: s0 * th.cos(), b: s0 * th.sin(), phi: th },
            epsilon: 1e-3,
            s_max: s1,
            tol: Tolerance::uniform(1e-12),
            grid: SampleGrid::Uniform { ds: 0.25 },
        };
        integrate_profile(&cfg).unwrap()
    }

    #[test]
    fn cone_ray_is_straight() {
        for (m, n) in [(2, 2), (2, 3), (4, 4), (3, 5)] {
            let sp = spec(m, n);
            let c = cone_ray(sp, 1.0, 50.0);
            let th = sp.cone_angle();
            for p in c.samples() {
                assert_relative_eq!(p.phi, th, epsilon = 1e-12);
                assert!(p.raw_zeta0().abs() < 1e-10 * p.s);
                assert_relative_eq!(p.zeta_m(), p.s, max_relative = 1e-12);
            }
            assert_eq!(cone_crossings(&c), 0);
            let tr = geometry_trace(&c);
            for (i, p) in c.samples().iter().enumerate() {
                let k = curvatures(sp, p.a, p.b, p.phi, 1.0);
                assert!(k.kappa0.abs() < 1e-12);
                let h = k.kappa0 + (sp.mf() - 1.0) * k.kappa_a + (sp.nf() - 1.0) * k.kappa_b;
                assert!(h.abs() < 1e-12);
                assert!(tr.hres[i].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cone_ray_curvature_for_simons_type_22() {
        // φ* = π/4, b = a: κ_a = sin(π/4)/a, κ_b = −cos(π/4)/a, so |A|² = 1/a².
        let sp = spec(2, 2);
        let c = cone_ray(sp, 1.0, 10.0);
        let tr = geometry_trace(&c);
        for (p, a2) in c.samples().iter().zip(&tr.a2) {
            assert_relative_eq!(*a2, 1.0 / (p.a * p.a), max_relative = 1e-12);
        }
        // m = n: the cone's principal curvatures cancel in tr(A³).
        assert!(tr.tra3.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn translation_fields_on_cone_ray() {
        let c = cone_ray(spec(2, 2), 1.0, 5.0);
        for (ap, bp) in jacobi_field_translation(&c) {
            assert_relative_eq!(ap, 0.5f64.sqrt(), epsilon = 1e-12);
            assert_relative_eq!(bp, 0.5f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn axis_start_values() {
        let sp = spec(3, 3);
        let cfg = ShootingConfig::new(sp, Start::AxisM, 1.0);
        let c = integrate_profile(&cfg).unwrap();
        let z = jacobi_field_dilation(&c);
        assert_relative_eq!(z[0], 1.0, epsilon = 1e-5);
        // ζ_M(ε) = a a' + b b' ≈ ε (1 + (m-1)/n)
        let rot = jacobi_field_rotation(&c);
        assert_relative_eq!(rot[0], 1e-3 * (1.0 + 2.0 / 3.0), max_relative = 1e-3);
        // axis_n start mirrors the geometry and keeps ζ_0(0+) = +1
        let c = integrate_profile(&ShootingConfig::new(sp, Start::AxisN, 1.0)).unwrap();
        assert_relative_eq!(c.zeta0()[0], 1.0, epsilon = 1e-5);
        assert_relative_eq!(c.samples()[0].b, 1.0, epsilon = 1e-5);
    }

    /// Independent oracle for the series start: fixed-step RK4 from s = 0 in
    /// (a, b, φ) variables with the axis singularity resolved by L'Hôpital.
    fn rk4_oracle(sp: ConeSpec, s_end: f64, steps: usize) -> (f64, f64, f64) {
        let (m, n) = (sp.mf(), sp.nf());
        let f = |y: [f64; 3]| -> [f64; 3] {
            let [a, b, phi] = y;
            let dphi = if b < 1e-9 {
                -(m - 1.0) / n
            } else {
                (n - 1.0) * phi.cos() / b - (m - 1.0) * phi.sin() / a
            };
            [phi.cos(), phi.sin(), dphi]
        };
        let h = s_end / steps as f64;
        let mut y = [1.0, 0.0, std::f64::consts::FRAC_PI_2];
        for _ in 0..steps {
            let k1 = f(y);
            let k2 = f(std::array::from_fn(|i| y[i] + 0.5 * h * k1[i]));
            let k3 = f(std::array::from_fn(|i| y[i] + 0.5 * h * k2[i]));
            let k4 = f(std::array::from_fn(|i| y[i] + h * k3[i]));
            y = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        }
        (y[0], y[1], y[2])
    }

    #[test]
    fn series_start_matches_small_step_oracle() {
        for (m, n) in [(2, 2), (3, 3), (4, 4), (2, 5)] {
            let sp = spec(m, n);
            let (a_o, b_o, phi_o) = rk4_oracle(sp, 0.2, 40_000);
            let c = integrate_profile(&ShootingConfig::new(sp, Start::AxisM, 0.2)).unwrap();
            let p = c.at(0.2);
            assert!((p.a - a_o).abs() < 1e-8, "{m},{n}: a {} vs {}", p.a, a_o);
            assert!((p.b - b_o).abs() < 1e-8);
            assert!((p.phi - phi_o).abs() < 1e-7, "{m},{n}: phi {} vs {}", p.phi, phi_o);
            // coefficient check: φ − π/2 ≈ −(m−1)s/n to O(s³)
            let (_, _, phi_small) = rk4_oracle(sp, 1e-3, 2_000);
            let (_, _, phi_series) = axis_series_start(sp, 1e-3);
            assert!((phi_small - phi_series).abs() < 1e-8);
        }
    }

    #[test]
    fn curvature_identity_and_positivity() {
        let sp = spec(2, 3);
        let c = integrate_profile(&ShootingConfig::new(sp, Start::AxisM, 30.0)).unwrap();
        let tr = geometry_trace(&c);
        for (i, p) in c.samples().iter().enumerate() {
            let k = curvatures(sp, p.a, p.b, p.phi, 1.0);
            let direct = k.kappa0.powi(2) + (sp.mf() - 1.0) * k.kappa_a.powi(2) + (sp.nf() - 1.0) * k.kappa_b.powi(2);
            assert_relative_eq!(tr.a2[i], direct, max_relative = 1e-14);
            assert!(tr.a2[i] >= k.kappa0 * k.kappa0);
            assert!(tr.tra3[i].is_finite() && tr.zeta0[i].is_finite());
        }
    }

    #[test]
    fn near_axis_curvature_limit() {
        // κ_0 → −(m−1)/n, κ_a → 1, κ_b → −(m−1)/n at the R^m axis.
        let sp = spec(3, 4);
        let c = integrate_profile(&ShootingConfig::new(sp, Start::AxisM, 0.01).with_epsilon(1e-4)).unwrap();
        let p = c.samples()[0];
        let k = curvatures(sp, p.a, p.b, p.phi, 1.0);
        let lim = -(sp.mf() - 1.0) / sp.nf();
        assert_relative_eq!(k.kappa0, lim, epsilon = 1e-6);
        assert_relative_eq!(k.kappa_b, lim, epsilon = 1e-6);
        assert_relative_eq!(k.kappa_a, 1.0, epsilon = 1e-6);
        let a2_lim = lim * lim * sp.nf() + (sp.mf() - 1.0);
        assert_relative_eq!(geometry_trace(&c).a2[0], a2_lim, epsilon = 1e-5);
    }

    #[test]
    fn invalid_configs() {
        let sp = spec(2, 2);
        let mut cfg = ShootingConfig::new(sp, Start::AxisM, 10.0);
        cfg.epsilon = 0.0;
        assert!(matches!(integrate_profile(&cfg), Err(Error::InvalidParameter(_))));
        let cfg = ShootingConfig::new(sp, Start::AxisM, 1e-4);
        assert!(integrate_profile(&cfg).is_err());
    }

    #[test]
    fn unattainable_tolerance_reports_last_arc_length() {
        let cfg = ShootingConfig::new(spec(3, 3), Start::AxisM, 5.0).with_tol(Tolerance::uniform(1e-300));
        match integrate_profile(&cfg) {
            Err(Error::Integration { last_s, source }) => {
                assert!((1e-3..5.0).contains(&last_s));
                assert_eq!(source.position(), last_s);
            }
            other => panic!("expected integration failure, got {:?}", other.map(|c| c.s_range())),
        }
    }

    #[test]
    fn profile_is_repelled_by_the_axis() {
        // aimed at the R^m axis, the profile turns away instead of hitting it
        let cfg = ShootingConfig {
            spec: spec(3, 3),
            start: Start::Point { s0: 0.0, a: 1.0, b: 0.05, phi: -1.8 },
            epsilon: 1e-3,
            s_max: 5.0,
            tol: Tolerance::uniform(1e-10),
            grid: SampleGrid::Steps,
        };
        let c = integrate_profile(&cfg).unwrap();
        assert!(c.samples().iter().all(|p| p.a > 0.0 && p.b > 0.0));
    }
}
