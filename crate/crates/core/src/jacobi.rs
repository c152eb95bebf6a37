//! The Jacobi equation `ψ_ss + α ψ_s + β ψ = f` on an invariant profile.
//!
//! Here `α = (m-1) a'/a + (n-1) b'/b` and `β = |A|²`. With `s = e^t`,
//! `A(t) = α s - 1` and `ψ = p u`, where
//!
//! ```text
//! p(t) = exp(-∫_0^t A/2 dτ),
//! ```
//!
//! the equation becomes `u_tt + V u = f̃` with `f̃ = s² f / p` and
//!
//! ```text
//! V = β s² - A²/4 - A_t/2,   A_t = α_s s² + α s.
//! ```
//!
//! `V` tends to `-(n-2)²/4` at the axis and to `-(N-2)²/4 + N - 1` at
//! infinity.
//!
//! The solve splits the `t` line at `t0 < t1`. On `(t_min, t0]` the dilation
//! field gives `u₊ = ζ_0 / p` and reduction of order gives `u₋ = u₊ G` with
//! `G' = u₊^{-2}`, so `u₊ u₋' - u₊' u₋ = 1`. The particular solution
//!
//! ```text
//! u = u₋ ∫ u₊ f̃ - u₊ ∫ u₋ f̃
//! ```
//!
//! starts from zero data at `t_min`. Past `t0` a homogeneous pair is obtained
//! from an initial value problem (carrying the profile along), and the
//! solution is continued by variation of parameters from the matched data at
//! `t0` and again at `t1`.

use serde::{Deserialize, Serialize};

use crate::cone_spectra::ConeSpec;
use crate::decay::{fit_power_law, DecayFit};
use crate::error::{Error, Result};
use crate::ode::{self, StepControl, Tolerance};
use crate::profile::{log_uniform_grid, phi_prime, polar_rhs, trace_a3, ProfileCurve, ProfileSample};
use crate::quadrature::{cumulative, cumulative_from};

/// Distance (in `t`) kept between `t0` and the first zero of `ζ_0`.
pub const T0_MARGIN: f64 = 1.0;
/// `t1` is where `|V - V(∞)|` drops below this for good.
pub const POTENTIAL_SETTLE: f64 = 1e-2;
/// Minimum length of the middle interval.
pub const MIDDLE_MIN: f64 = 2.0;
/// Ratio allowed between consecutive dyadic window sups.
pub const WINDOW_SLACK: f64 = 1.1;
/// Lower end of the dyadic windows.
pub const WINDOW_START: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiConfig {
    pub points_per_unit: usize,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
    /// Tolerance of the homogeneous initial value problem past `t0`.
    pub tol: Tolerance,
    /// Residual window in `s`; defaults to `[2 s_min, s_max / 2]`.
    pub residual_window: Option<(f64, f64)>,
    /// Residual target; defaults to `1e-6 (1 + ‖f‖_∞)`.
    pub target: Option<f64>,
    pub max_refinements: usize,
}

impl Default for JacobiConfig {
    fn default() -> Self {
        Self {
            points_per_unit: 2000,
            t0: None,
            t1: None,
            tol: Tolerance::new(1e-12, 1e-14),
            residual_window: None,
            target: None,
            max_refinements: 2,
        }
    }
}

/// Pointwise coefficients at one profile point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    /// `dα/ds`, from the profile equation.
    pub alpha_s: f64,
    /// `A = α s - 1`.
    pub a_coef: f64,
    pub potential: f64,
    /// Oriented `ζ_0`.
    pub zeta0: f64,
    /// `dζ_0/ds = φ' ζ_M`, oriented.
    pub zeta0_s: f64,
}

pub fn coefficients(spec: ConeSpec, orientation: f64, p: &ProfileSample) -> Coefficients {
    let (m1, n1) = (spec.mf() - 1.0, spec.nf() - 1.0);
    let (a, b, s) = (p.a, p.b, p.s);
    let (c, sn) = (p.phi.cos(), p.phi.sin());
    let dphi = phi_prime(spec, a, b, p.phi);
    let (ca, sb) = (c / a, sn / b);
    let alpha = m1 * ca + n1 * sb;
    let beta = dphi * dphi + m1 * (sn / a).powi(2) + n1 * (c / b).powi(2);
    // a'' = -sin φ φ', b'' = cos φ φ'
    let alpha_s = m1 * (-sn * dphi / a - ca * ca) + n1 * (c * dphi / b - sb * sb);
    let a_coef = alpha * s - 1.0;
    let a_t = alpha_s * s * s + alpha * s;
    let potential = beta * s * s - 0.25 * a_coef * a_coef - 0.5 * a_t;
    Coefficients {
        alpha,
        beta,
        alpha_s,
        a_coef,
        potential,
        zeta0: orientation * p.raw_zeta0(),
        zeta0_s: orientation * dphi * p.zeta_m(),
    }
}

fn sample_from_polar(s: f64, y: &[f64]) -> ProfileSample {
    let (r, theta, delta) = (y[0], y[1], y[2]);
    ProfileSample { s, a: r * theta.cos(), b: r * theta.sin(), phi: theta + delta, delta }
}

/// Limits of `V` at the axis and at infinity.
pub fn potential_limits(spec: ConeSpec) -> (f64, f64) {
    let (n, big) = (spec.nf(), spec.dimf());
    (-(n - 2.0).powi(2) / 4.0, -(big - 2.0).powi(2) / 4.0 + big - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmdenFowlerData {
    pub t_grid: Vec<f64>,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    pub f_tilde: Vec<f64>,
    pub f: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(rename = "A")]
    pub a_coef: Vec<f64>,
    pub zeta0: Vec<f64>,
    pub zeta0_s: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
    /// Grid indices of `t0` and `t1`.
    pub i0: usize,
    pub i1: usize,
    pub h: f64,
}

impl EmdenFowlerData {
    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    /// `V` at `t` by cubic interpolation.
    pub fn potential_at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.t_grid[0], *self.t_grid.last().unwrap());
        if t < lo || t > hi {
            return Err(Error::GridCoverage { lo: t, hi: t });
        }
        Ok(crate::quadrature::interpolate_cubic(&self.t_grid, &self.v, t))
    }
}

fn first_sign_change(z: &[f64]) -> Option<usize> {
    z.windows(2).position(|w| w[0] * w[1] <= 0.0 && w[0] != w[1])
}

/// Samples `p`, `V` and `f̃` on a log-uniform grid spanning the curve.
///
/// The curve must straddle `s = 1`, where `p` is normalised.
pub fn emden_fowler_transform<F: Fn(f64) -> f64>(
    curve: &ProfileCurve,
    f: F,
    points_per_unit: usize,
    t0: Option<f64>,
    t1: Option<f64>,
) -> Result<EmdenFowlerData> {
    let (s_lo, s_hi) = curve.s_range();
    if !(s_lo < 1.0 && s_hi > 1.0) {
        return Err(Error::GridCoverage { lo: s_lo, hi: s_hi });
    }
    if points_per_unit < 4 {
        return Err(Error::InvalidParameter("points_per_unit must be at least 4".into()));
    }
    let spec = curve.spec();
    let o = curve.orientation();
    let s = log_uniform_grid(s_lo, s_hi, points_per_unit);
    let h = 1.0 / points_per_unit as f64;
    let t_lo = s_lo.ln();
    let t_grid: Vec<f64> = (0..s.len()).map(|k| t_lo + k as f64 * h).collect();
    let n = s.len();
    if n < 16 {
        return Err(Error::GridCoverage { lo: s_lo, hi: s_hi });
    }

    let mut d = EmdenFowlerData {
        t_grid,
        s,
        p: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        f_tilde: Vec::with_capacity(n),
        f: Vec::with_capacity(n),
        alpha: Vec::with_capacity(n),
        beta: Vec::with_capacity(n),
        a_coef: Vec::with_capacity(n),
        zeta0: Vec::with_capacity(n),
        zeta0_s: Vec::with_capacity(n),
        t0: 0.0,
        t1: 0.0,
        i0: 0,
        i1: 0,
        h,
    };
    for &sk in &d.s {
        let c = coefficients(spec, o, &curve.at(sk));
        d.alpha.push(c.alpha);
        d.beta.push(c.beta);
        d.a_coef.push(c.a_coef);
        d.v.push(c.potential);
        d.zeta0.push(c.zeta0);
        d.zeta0_s.push(c.zeta0_s);
        d.f.push(f(sk));
    }
    let half_a: Vec<f64> = d.a_coef.iter().map(|a| 0.5 * a).collect();
    let log_p = cumulative_from(&d.t_grid, &half_a, 0.0);
    d.p = log_p.iter().map(|l| (-l).exp()).collect();
    d.f_tilde = (0..n).map(|k| d.s[k] * d.s[k] * d.f[k] / d.p[k]).collect();

    let index_at_or_below = |t: f64| (((t - t_lo) / h + 1e-9).floor().max(0.0) as usize).min(n - 1);
    let change = first_sign_change(&d.zeta0);
    let i0 = match t0 {
        Some(t) => {
            let i = index_at_or_below(t);
            if let Some(c) = change.filter(|&c| c < i) {
                return Err(Error::Breakpoint { t: d.t_grid[c] });
            }
            i
        }
        None => {
            let base = change.unwrap_or(n - 1);
            index_at_or_below(d.t_grid[base] - T0_MARGIN)
        }
    };
    if i0 < 8 {
        return Err(Error::Breakpoint { t: d.t_grid[i0] });
    }

    let (_, v_inf) = potential_limits(spec);
    let i1 = match t1 {
        Some(t) => index_at_or_below(t).max(i0),
        None => {
            let settled = d.v.iter().rposition(|v| (v - v_inf).abs() >= POTENTIAL_SETTLE).map_or(0, |k| k + 1);
            let min_i = i0 + (MIDDLE_MIN / h).round() as usize;
            settled.max(min_i).min(n - 1)
        }
    };
    d.i0 = i0;
    d.i1 = i1;
    d.t0 = d.t_grid[i0];
    d.t1 = d.t_grid[i1];
    Ok(d)
}

/// Two solutions of `u_tt + V u = 0` with their `t`-derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalPair {
    pub t: Vec<f64>,
    pub plus: Vec<f64>,
    pub plus_t: Vec<f64>,
    pub minus: Vec<f64>,
    pub minus_t: Vec<f64>,
    /// Nominal Wronskian `u₊ u₋' - u₊' u₋`.
    pub wronskian: f64,
}

impl FundamentalPair {
    pub fn wronskians(&self) -> Vec<f64> {
        (0..self.t.len())
            .map(|k| self.plus[k] * self.minus_t[k] - self.plus_t[k] * self.minus[k])
            .collect()
    }

    /// `max |W(t) - W_nominal| / |W_nominal|`.
    pub fn wronskian_drift(&self) -> f64 {
        self.wronskians()
            .into_iter()
            .fold(0.0, |m, w| m.max((w - self.wronskian).abs() / self.wronskian.abs()))
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// `u₊ = ζ_0/p` and `u₋ = u₊ ∫_{t0}^t u₊^{-2}` on `[t_min, t0]`.
///
/// The anchor of the reduction-of-order integral only adds a multiple of
/// `u₊` to `u₋`, which leaves the particular solution unchanged.
pub fn left_fundamental_pair(ef: &EmdenFowlerData) -> Result<FundamentalPair> {
    let end = ef.i0;
    if let Some(c) = first_sign_change(&ef.zeta0[..=end]) {
        return Err(Error::Breakpoint { t: ef.t_grid[c] });
    }
    let t = ef.t_grid[..=end].to_vec();
    let plus: Vec<f64> = (0..=end).map(|k| ef.zeta0[k] / ef.p[k]).collect();
    let plus_t: Vec<f64> = (0..=end)
        .map(|k| (ef.s[k] * ef.zeta0_s[k] + 0.5 * ef.a_coef[k] * ef.zeta0[k]) / ef.p[k])
        .collect();
    // accumulated backwards from t0: near the axis u₊^{-2} is huge and a
    // forward sum minus its final value would cancel catastrophically
    let rev_t: Vec<f64> = t.iter().rev().copied().collect();
    let rev_y: Vec<f64> = plus.iter().rev().map(|u| 1.0 / (u * u)).collect();
    let mut g = cumulative(&rev_t, &rev_y);
    g.reverse();
    let minus: Vec<f64> = (0..=end).map(|k| plus[k] * g[k]).collect();
    let minus_t: Vec<f64> = (0..=end).map(|k| plus_t[k] * g[k] + 1.0 / plus[k]).collect();
    Ok(FundamentalPair { t, plus, plus_t, minus, minus_t, wronskian: 1.0 })
}

/// Homogeneous pair on `[t0, t_max]` with `(u₊, u₊') = (1, 0)` and
/// `(u₋, u₋') = (0, 1)` at `t0`, integrated together with the profile.
pub fn middle_fundamental_pair(ef: &EmdenFowlerData, curve: &ProfileCurve, tol: Tolerance) -> Result<FundamentalPair> {
    let spec = curve.spec();
    let o = curve.orientation();
    let t_start = ef.t0;
    let t_end = *ef.t_grid.last().unwrap();
    let t: Vec<f64> = ef.t_grid[ef.i0..].to_vec();
    if t.len() < 2 {
        return Ok(FundamentalPair {
            plus: vec![1.0],
            plus_t: vec![0.0],
            minus: vec![0.0],
            minus_t: vec![1.0],
            t,
            wronskian: 1.0,
        });
    }
    let polar = curve.polar_at(t_start.exp());
    let y0 = [polar[0], polar[1], polar[2], 1.0, 0.0, 0.0, 1.0];
    let rhs = |tt: f64, y: &[f64; 7]| -> [f64; 7] {
        let s = tt.exp();
        let g = polar_rhs(spec, &[y[0], y[1], y[2]]);
        let v = coefficients(spec, o, &sample_from_polar(s, &y[..3])).potential;
        [s * g[0], s * g[1], s * g[2], y[4], -v * y[3], y[6], -v * y[5]]
    };
    let ctrl = StepControl::new(tol).with_h_init(1e-3).with_h_max(0.05);
    let sol = ode::integrate(rhs, t_start, y0, t_end, ctrl)
        .map_err(|e| Error::Integration { last_s: e.position().exp(), source: e })?;
    let mut pair = FundamentalPair {
        plus: Vec::with_capacity(t.len()),
        plus_t: Vec::with_capacity(t.len()),
        minus: Vec::with_capacity(t.len()),
        minus_t: Vec::with_capacity(t.len()),
        t,
        wronskian: 1.0,
    };
    for &tk in &pair.t {
        let y = sol.eval(tk);
        pair.plus.push(y[3]);
        pair.plus_t.push(y[4]);
        pair.minus.push(y[5]);
        pair.minus_t.push(y[6]);
    }
    Ok(pair)
}

/// Variation of parameters with a unit-Wronskian pair over `pair[lo..=hi]`,
/// matching `(u, u')` to `data` at index `lo`. Writes into `u`, `ut`.
#[allow(clippy::too_many_arguments)]
fn continue_segment(
    pair: &FundamentalPair,
    offset: usize,
    lo: usize,
    hi: usize,
    ftilde: &[f64],
    data: (f64, f64),
    u: &mut [f64],
    ut: &mut [f64],
) {
    if hi <= lo {
        return;
    }
    let r = lo - offset..hi - offset + 1;
    let (p0, p0t, m0, m0t) = (pair.plus[r.start], pair.plus_t[r.start], pair.minus[r.start], pair.minus_t[r.start]);
    let w = p0 * m0t - p0t * m0;
    // pair renormalised to (1,0), (0,1) at the matching point
    let e_plus = |k: usize| ((m0t * pair.plus[k] - p0t * pair.minus[k]) / w, (m0t * pair.plus_t[k] - p0t * pair.minus_t[k]) / w);
    let e_minus = |k: usize| ((-m0 * pair.plus[k] + p0 * pair.minus[k]) / w, (-m0 * pair.plus_t[k] + p0 * pair.minus_t[k]) / w);
    let t = &pair.t[r.clone()];
    let ep: Vec<(f64, f64)> = r.clone().map(e_plus).collect();
    let em: Vec<(f64, f64)> = r.clone().map(e_minus).collect();
    let fp: Vec<f64> = (0..t.len()).map(|j| ep[j].0 * ftilde[lo + j]).collect();
    let fm: Vec<f64> = (0..t.len()).map(|j| em[j].0 * ftilde[lo + j]).collect();
    let ip = cumulative(t, &fp);
    let im = cumulative(t, &fm);
    for j in 0..t.len() {
        let k = lo + j;
        u[k] = data.0 * ep[j].0 + data.1 * em[j].0 + em[j].0 * ip[j] - ep[j].0 * im[j];
        ut[k] = data.0 * ep[j].1 + data.1 * em[j].1 + em[j].1 * ip[j] - ep[j].1 * im[j];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `|ψ| (s+1)`, `N ≥ 5`.
    Plain,
    /// `|ψ| (s+1) / log(s+2)`, `N = 4`.
    Log,
    /// `|ψ| (s+1)^{1/2} / log(s+2)`, `N = 3`.
    SqrtLog,
}

impl Weight {
    pub fn for_dim(dim: u32) -> Self {
        match dim {
            3 => Weight::SqrtLog,
            4 => Weight::Log,
            _ => Weight::Plain,
        }
    }

    pub fn apply(&self, s: f64, psi: f64) -> f64 {
        let x = psi.abs();
        match self {
            Weight::Plain => x * (s + 1.0),
            Weight::Log => x * (s + 1.0) / (s + 2.0).ln(),
            Weight::SqrtLog => x * (s + 1.0).sqrt() / (s + 2.0).ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSup {
    pub lo: f64,
    pub hi: f64,
    pub sup: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearOrigin {
    pub window: (f64, f64),
    pub exponent: f64,
    pub log_exponent: f64,
    pub log_coeff: f64,
    pub log_detected: bool,
    /// `ψ / s²` at the lower end of the window.
    pub leading_coeff: f64,
    /// `f(0⁺) / (2n)`.
    pub predicted_coeff: f64,
}

/// A log-corrected fit counts as carrying a `|log s|` factor above this
/// (a genuine `s² |log s|` fits with coefficient 1).
pub const LOG_DETECTION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub dim: u32,
    pub weight: Weight,
    pub windows: Vec<WindowSup>,
    /// Largest ratio of consecutive window sups.
    pub max_ratio: f64,
    pub nonincreasing: bool,
    pub far_fit: Option<DecayFit>,
    pub near_origin: Option<NearOrigin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiSolution {
    pub spec: ConeSpec,
    pub ef: EmdenFowlerData,
    pub left: FundamentalPair,
    pub middle: FundamentalPair,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub residual: Vec<f64>,
    pub residual_window: (f64, f64),
    pub residual_sup: f64,
    pub f_sup: f64,
    pub target: f64,
    pub points_per_unit: usize,
    pub decay_report: DecayReport,
}

impl JacobiSolution {
    pub fn s(&self) -> &[f64] {
        &self.ef.s
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.ef.s.iter().copied().zip(self.psi.iter().copied()).collect()
    }

    pub fn wronskian_drift(&self) -> f64 {
        self.left.wronskian_drift().max(self.middle.wronskian_drift())
    }
}

/// `tr(A³)` along the curve as a function of arc length.
pub fn trace_rhs(curve: &ProfileCurve) -> impl Fn(f64) -> f64 + '_ {
    let spec = curve.spec();
    let o = curve.orientation();
    move |s| trace_a3(spec, &curve.at(s), o)
}

/// `t`-derivative on a uniform grid, fourth order everywhere.
fn derivative_uniform(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        return d;
    }
    let c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * g[0] + 48.0 * g[1] - 36.0 * g[2] + 16.0 * g[3] - 3.0 * g[4]);
    d[1] = c * (-3.0 * g[0] - 10.0 * g[1] + 18.0 * g[2] - 6.0 * g[3] + g[4]);
    for i in 2..n - 2 {
        d[i] = c * (g[i - 2] - 8.0 * g[i - 1] + 8.0 * g[i + 1] - g[i + 2]);
    }
    d[n - 2] = c * (3.0 * g[n - 1] + 10.0 * g[n - 2] - 18.0 * g[n - 3] + 6.0 * g[n - 4] - g[n - 5]);
    d[n - 1] = c * (25.0 * g[n - 1] - 48.0 * g[n - 2] + 36.0 * g[n - 3] - 16.0 * g[n - 4] + 3.0 * g[n - 5]);
    d
}

struct Solved {
    ef: EmdenFowlerData,
    left: FundamentalPair,
    middle: FundamentalPair,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    residual: Vec<f64>,
}

fn solve_once<F: Fn(f64) -> f64>(curve: &ProfileCurve, f: &F, cfg: &JacobiConfig, ppu: usize) -> Result<Solved> {
    let ef = emden_fowler_transform(curve, f, ppu, cfg.t0, cfg.t1)?;
    let left = left_fundamental_pair(&ef)?;
    let middle = middle_fundamental_pair(&ef, curve, cfg.tol)?;
    let n = ef.len();
    let mut u = vec![0.0; n];
    let mut ut = vec![0.0; n];

    let fp: Vec<f64> = (0..=ef.i0).map(|k| left.plus[k] * ef.f_tilde[k]).collect();
    let fm: Vec<f64> = (0..=ef.i0).map(|k| left.minus[k] * ef.f_tilde[k]).collect();
    let ip = cumulative(&left.t, &fp);
    let im = cumulative(&left.t, &fm);
    if ip.iter().chain(&im).any(|x| !x.is_finite()) {
        return Err(Error::NonIntegrable);
    }
    for k in 0..=ef.i0 {
        u[k] = left.minus[k] * ip[k] - left.plus[k] * im[k];
        ut[k] = left.minus_t[k] * ip[k] - left.plus_t[k] * im[k];
    }
    let at_t0 = (u[ef.i0], ut[ef.i0]);
    continue_segment(&middle, ef.i0, ef.i0, ef.i1, &ef.f_tilde, at_t0, &mut u, &mut ut);
    let at_t1 = (u[ef.i1], ut[ef.i1]);
    continue_segment(&middle, ef.i0, ef.i1, n - 1, &ef.f_tilde, at_t1, &mut u, &mut ut);

    let psi: Vec<f64> = (0..n).map(|k| ef.p[k] * u[k]).collect();
    let dpsi: Vec<f64> = (0..n)
        .map(|k| ef.p[k] * (ut[k] - 0.5 * ef.a_coef[k] * u[k]) / ef.s[k])
        .collect();
    let d_dpsi = derivative_uniform(&dpsi, ef.h);
    let residual: Vec<f64> = (0..n)
        .map(|k| d_dpsi[k] / ef.s[k] + ef.alpha[k] * dpsi[k] + ef.beta[k] * psi[k] - ef.f[k])
        .collect();
    if psi.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonIntegrable);
    }
    Ok(Solved { ef, left, middle, psi, dpsi, residual })
}

/// Solves `ψ_ss + α ψ_s + β ψ = f` along the curve, refining the grid until
/// the finite-difference residual meets the target.
pub fn solve_jacobi<F: Fn(f64) -> f64>(curve: &ProfileCurve, f: F, cfg: &JacobiConfig) -> Result<JacobiSolution> {
    let (s_lo, s_hi) = curve.s_range();
    let window = cfg.residual_window.unwrap_or((2.0 * s_lo, 0.5 * s_hi));
    let mut ppu = cfg.points_per_unit;
    let mut attempt = 0;
    loop {
        let solved = solve_once(curve, &f, cfg, ppu)?;
        let f_sup = solved.ef.f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let target = cfg.target.unwrap_or(1e-6 * (1.0 + f_sup));
        let residual_sup = solved
            .ef
            .s
            .iter()
            .zip(&solved.residual)
            .filter(|(s, _)| **s >= window.0 && **s <= window.1)
            .fold(0.0f64, |m, (_, r)| m.max(r.abs()));
        if residual_sup <= target || attempt >= cfg.max_refinements {
            if residual_sup > target {
                return Err(Error::ResidualTarget { residual: residual_sup, target });
            }
            let Solved { ef, left, middle, psi, dpsi, residual } = solved;
            let mut sol = JacobiSolution {
                spec: curve.spec(),
                ef,
                left,
                middle,
                psi,
                dpsi,
                residual,
                residual_window: window,
                residual_sup,
                f_sup,
                target,
                points_per_unit: ppu,
                decay_report: DecayReport {
                    dim: curve.spec().dim(),
                    weight: Weight::for_dim(curve.spec().dim()),
                    windows: Vec::new(),
                    max_ratio: 0.0,
                    nonincreasing: true,
                    far_fit: None,
                    near_origin: None,
                },
            };
            sol.decay_report = decay_diagnostics(&sol);
            return Ok(sol);
        }
        attempt += 1;
        ppu *= 2;
    }
}

/// Fits `ψ ~ s^ν` (and `s^ν |log s|^ℓ`) over `[20 s_min, 0.1]`.
pub fn near_origin_behavior(sol: &JacobiSolution) -> Option<NearOrigin> {
    let s_min = sol.ef.s[0];
    let window = (20.0 * s_min, 0.1);
    if window.0 >= window.1 {
        return None;
    }
    let samples = sol.samples();
    let plain = fit_power_law(&samples, window, false).ok()?;
    let logged = fit_power_law(&samples, window, true).ok()?;
    let k = sol.ef.s.iter().position(|&s| s >= window.0)?;
    let n = sol.spec.nf();
    Some(NearOrigin {
        window,
        exponent: plain.exponent,
        log_exponent: logged.exponent,
        log_coeff: logged.log_coeff,
        log_detected: logged.log_coeff > LOG_DETECTION_THRESHOLD,
        leading_coeff: sol.psi[k] / (sol.ef.s[k] * sol.ef.s[k]),
        predicted_coeff: sol.ef.f[0] / (2.0 * n),
    })
}

/// Dyadic window sups `[2^k, 2^{k+1}] ⊂ [100, s_max]` of the weight for `N`.
pub fn dyadic_window_sups(sol: &JacobiSolution, weight: Weight) -> Vec<WindowSup> {
    let s_end = *sol.ef.s.last().unwrap();
    let mut k = WINDOW_START.log2().ceil() as i32;
    let mut out = Vec::new();
    while 2f64.powi(k + 1) <= s_end {
        let (lo, hi) = (2f64.powi(k), 2f64.powi(k + 1));
        let sup = sol
            .ef
            .s
            .iter()
            .zip(&sol.psi)
            .filter(|(s, _)| **s >= lo && **s <= hi)
            .fold(0.0f64, |m, (&s, &p)| m.max(weight.apply(s, p)));
        out.push(WindowSup { lo, hi, sup });
        k += 1;
    }
    out
}

pub fn decay_diagnostics(sol: &JacobiSolution) -> DecayReport {
    let dim = sol.spec.dim();
    let weight = Weight::for_dim(dim);
    let windows = dyadic_window_sups(sol, weight);
    let max_ratio = windows.windows(2).map(|w| w[1].sup / w[0].sup).fold(0.0, f64::max);
    let s_end = *sol.ef.s.last().unwrap();
    let far_fit = fit_power_law(&sol.samples(), (WINDOW_START, s_end), false).ok();
    DecayReport {
        dim,
        weight,
        nonincreasing: max_ratio <= WINDOW_SLACK,
        max_ratio,
        windows,
        far_fit,
        near_origin: near_origin_behavior(sol),
    }
}

/// `max (s+1)^{-ν} |h(s)|` over the samples.
pub fn weighted_sup_norm(samples: &[(f64, f64)], nu: f64) -> f64 {
    samples.iter().fold(0.0, |m, &(s, h)| m.max((s + 1.0).powf(-nu) * h.abs()))
}
