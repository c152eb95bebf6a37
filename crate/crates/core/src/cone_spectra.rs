//! Link spectra, indicial roots and stability of Lawson cones.
//!
//! The link of `C(m, n)` is the product of round spheres
//! `S^{m-1}(ρ_a) × S^{n-1}(ρ_b)` with `ρ_a² = (m-1)/(N-1)`,
//! `ρ_b² = (n-1)/(N-1)`. It is minimal in `S^N` with `|A_Γ|² = N - 1`, so the
//! link Jacobi operator `-J_Γ = -Δ_Γ - (N-1)` has eigenvalues
//!
//! ```text
//! λ(ℓ, k) = ℓ(ℓ+m-2)/ρ_a² + k(k+n-2)/ρ_b² - (N-1),   ℓ, k ≥ 0
//! ```
//!
//! with multiplicity `dim H_ℓ(S^{m-1}) · dim H_k(S^{n-1})`. The constant
//! `N - 1` is not an input: it is the unique shift for which the lowest mode
//! `(0, 0)` equals `-(N-1)` and the first translation mode `(1, 0)` is zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair `(m, n)` defining `C(m, n) ⊂ R^m × R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConeSpec {
    m: u32,
    n: u32,
}

impl ConeSpec {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidCone { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Dimension of the cone (and of any hypersurface asymptotic to it).
    pub fn dim(&self) -> u32 {
        self.m + self.n - 1
    }

    /// Ambient dimension `m + n`.
    pub fn ambient_dim(&self) -> u32 {
        self.m + self.n
    }

    pub fn mf(&self) -> f64 {
        self.m as f64
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn dimf(&self) -> f64 {
        self.dim() as f64
    }

    /// Angle of the cone ray in the `(a, b)` quadrant: `tan² = (n-1)/(m-1)`.
    pub fn cone_angle(&self) -> f64 {
        ((self.nf() - 1.0) / (self.mf() - 1.0)).sqrt().atan()
    }

    /// Regime matching `m + n`.
    pub fn regime(&self) -> Regime {
        if self.ambient_dim() >= 8 {
            Regime::HighDim
        } else {
            Regime::LowDim
        }
    }
}

impl std::fmt::Display for ConeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "C({},{})", self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `m + n ≥ 8`: strictly stable cone, real `Λ_0 > 0`.
    HighDim,
    /// `4 ≤ m + n ≤ 7`: unstable cone, `Re Λ_0 = 0`.
    LowDim,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::HighDim => "high_dim",
            Regime::LowDim => "low_dim",
        }
    }
}

/// `Λ_j` stored as real and imaginary parts; exactly one is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicialRoot {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub dim: u32,
    pub lambdas: Vec<f64>,
    #[serde(rename = "Lambda_re")]
    pub lambda_re: Vec<f64>,
    #[serde(rename = "Lambda_im")]
    pub lambda_im: Vec<f64>,
    /// Pairs `-(N-2)/2 ∓ Re Λ_j`.
    pub indicial_roots: Vec<[f64; 2]>,
    pub j0: usize,
    pub stable: bool,
}

impl SpectralData {
    pub fn capital_lambda(&self, j: usize) -> IndicialRoot {
        IndicialRoot { re: self.lambda_re[j], im: self.lambda_im[j] }
    }

    /// All indicial roots, flattened and sorted ascending (duplicates kept).
    pub fn roots_flat(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.indicial_roots.iter().flat_map(|p| p.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spectral data serialises")
    }
}

pub fn link_radii(spec: ConeSpec) -> (f64, f64) {
    let nm1 = spec.dimf() - 1.0;
    (((spec.mf() - 1.0) / nm1).sqrt(), ((spec.nf() - 1.0) / nm1).sqrt())
}

/// Dimension of degree-`l` spherical harmonics on `S^{d-1} ⊂ R^d`.
pub fn harmonic_multiplicity(d: u32, l: u32) -> u64 {
    if d == 1 {
        return u64::from(l <= 1);
    }
    if l == 0 {
        return 1;
    }
    let top = binomial(u64::from(l + d - 1), u64::from(d - 1));
    let low = if l >= 2 { binomial(u64::from(l + d - 3), u64::from(d - 1)) } else { 0 };
    top - low
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn mode_eigenvalue(spec: ConeSpec, l: u32, k: u32) -> f64 {
    let nm1 = spec.dimf() - 1.0;
    let (l, k) = (l as f64, k as f64);
    l * (l + spec.mf() - 2.0) * nm1 / (spec.mf() - 1.0) + k * (k + spec.nf() - 2.0) * nm1 / (spec.nf() - 1.0)
        - nm1
}

/// The `count` lowest eigenvalues of `-J_Γ`, ascending, with multiplicity.
pub fn link_eigenvalues(spec: ConeSpec, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!("eigenvalue count must be ≥ 2, got {count}")));
    }
    let mut bound = 1u32;
    loop {
        let mut vals: Vec<f64> = Vec::new();
        for l in 0..=bound {
            for k in 0..=bound {
                let lam = mode_eigenvalue(spec, l, k);
                let mult = harmonic_multiplicity(spec.m(), l) * harmonic_multiplicity(spec.n(), k);
                vals.extend(std::iter::repeat_n(lam, mult as usize));
            }
        }
        vals.sort_by(f64::total_cmp);
        if vals.len() >= count {
            let cutoff = vals[count - 1];
            // eigenvalues are increasing in each index, so every mode outside the
            // box is at least the smaller of the two edge minima
            let outside = mode_eigenvalue(spec, bound + 1, 0).min(mode_eigenvalue(spec, 0, bound + 1));
            if outside > cutoff {
                vals.truncate(count);
                return Ok(vals);
            }
        }
        bound += 1;
    }
}

pub fn indicial_data(spec: ConeSpec, lambdas: &[f64]) -> SpectralData {
    indicial_data_for_dim(spec.dim(), lambdas)
}

/// Indicial data for any link spectrum of an `N`-dimensional cone.
pub fn indicial_data_for_dim(dim: u32, lambdas: &[f64]) -> SpectralData {
    let half = (dim as f64 - 2.0) / 2.0;
    let mut lambda_re = Vec::with_capacity(lambdas.len());
    let mut lambda_im = Vec::with_capacity(lambdas.len());
    let mut indicial_roots = Vec::with_capacity(lambdas.len());
    let mut j0 = lambdas.len();
    for (j, &lam) in lambdas.iter().enumerate() {
        let disc = half * half + lam;
        let (re, im) = if disc >= 0.0 { (disc.sqrt(), 0.0) } else { (0.0, (-disc).sqrt()) };
        if disc >= 0.0 && j0 == lambdas.len() {
            j0 = j;
        }
        lambda_re.push(re);
        lambda_im.push(im);
        indicial_roots.push([-half - re, -half + re]);
    }
    SpectralData { dim, lambdas: lambdas.to_vec(), lambda_re, lambda_im, indicial_roots, j0, stable: j0 == 0 }
}

/// Spectrum of the round unit sphere `S^{N-1}` (the link of a hyperplane,
/// `|A_Γ| = 0`): `j(j + N - 2)` with harmonic multiplicities.
pub fn flat_link_eigenvalues(dim: u32, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut j = 0u32;
    while out.len() < count {
        let lam = (j as f64) * (j as f64 + dim as f64 - 2.0);
        let mult = harmonic_multiplicity(dim, j) as usize;
        out.extend(std::iter::repeat_n(lam, mult.min(count - out.len())));
        j += 1;
    }
    out
}

pub fn spectral_data(spec: ConeSpec, count: usize) -> Result<SpectralData> {
    Ok(indicial_data(spec, &link_eigenvalues(spec, count)?))
}

/// Decay rate `ν̄` of the dilation Jacobi field predicted for the
/// O(m)×O(n)-invariant hypersurfaces asymptotic to `C(m, n)`.
pub fn predicted_nu_bar(spec: ConeSpec, regime: Regime) -> Result<f64> {
    if spec.regime() != regime {
        return Err(Error::RegimeMismatch { regime: regime.name(), sum: spec.ambient_dim() });
    }
    let half = (spec.dimf() - 2.0) / 2.0;
    Ok(match regime {
        Regime::HighDim => {
            let lambda0 = (half * half - (spec.dimf() - 1.0)).sqrt();
            -half + lambda0
        }
        Regime::LowDim => -half,
    })
}

/// Open interval of decay exponents `ν` for which `J_Σ φ = tr(A³)` is
/// solvable in the weighted space of order `ν`, with indicial roots removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityWindow {
    pub lower: f64,
    pub upper: f64,
    /// Indicial roots lying strictly inside `(lower, upper)`.
    pub excluded: Vec<f64>,
}

impl SolvabilityWindow {
    pub fn admits(&self, nu: f64) -> bool {
        const ROOT_TOL: f64 = 1e-12;
        nu > self.lower + ROOT_TOL
            && nu < self.upper - ROOT_TOL
            && self.excluded.iter().all(|r| (r - nu).abs() > ROOT_TOL)
    }
}

pub fn solvability_window(spec: ConeSpec, regime: Regime) -> Result<SolvabilityWindow> {
    let nu_bar = predicted_nu_bar(spec, regime)?;
    let data = spectral_data(spec, 2)?;
    let half = (spec.dimf() - 2.0) / 2.0;
    let upper = -half + data.lambda_re[1];
    let lower = nu_bar;
    let mut excluded: Vec<f64> = spectral_data(spec, 64)?
        .roots_flat()
        .into_iter()
        .filter(|&r| r > lower + 1e-12 && r < upper - 1e-12)
        .collect();
    excluded.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(SolvabilityWindow { lower, upper, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(m: u32, n: u32) -> ConeSpec {
        ConeSpec::new(m, n).unwrap()
    }

    #[test]
    fn rejects_degenerate_factors() {
        assert_eq!(ConeSpec::new(1, 4), Err(Error::InvalidCone { m: 1, n: 4 }));
        assert!(ConeSpec::new(2, 1).is_err());
    }

    #[test]
    fn radii_examples() {
        let (a, b) = link_radii(spec(2, 2));
        assert_relative_eq!(a, 0.5f64.sqrt());
        assert_relative_eq!(b, 0.5f64.sqrt());
        let (a, b) = link_radii(spec(4, 4));
        assert_relative_eq!(a, b);
        // N - 1 = 3 for (2, 3)
        let (a, b) = link_radii(spec(2, 3));
        assert_relative_eq!(a, (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(b, (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        for m in 2..8 {
            for n in 2..8 {
                let (a, b) = link_radii(spec(m, n));
                assert_relative_eq!(a * a + b * b, 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn multiplicities() {
        assert_eq!(harmonic_multiplicity(2, 0), 1);
        assert_eq!(harmonic_multiplicity(2, 3), 2);
        assert_eq!(harmonic_multiplicity(3, 2), 5);
        assert_eq!(harmonic_multiplicity(4, 1), 4);
        assert_eq!(harmonic_multiplicity(4, 2), 9);
    }

    /// Brute-force enumeration over a large box, independent of the
    /// adaptive bound used by `link_eigenvalues`.
    fn brute_force(spec: ConeSpec, count: usize) -> Vec<f64> {
        let mut v = Vec::new();
        for l in 0..=12u32 {
            for k in 0..=12u32 {
                let mult = harmonic_multiplicity(spec.m(), l) * harmonic_multiplicity(spec.n(), k);
                for _ in 0..mult {
                    v.push(mode_eigenvalue(spec, l, k));
                }
            }
        }
        v.sort_by(f64::total_cmp);
        v.truncate(count);
        v
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(link_eigenvalues(spec(2, 2), 6).unwrap(), vec![-2.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(link_eigenvalues(spec(4, 4), 2).unwrap(), vec![-6.0, 0.0]);
        assert!(link_eigenvalues(spec(3, 3), 1).is_err());
    }

    #[test]
    fn eigenvalues_match_brute_force() {
        for m in 2..=5 {
            for n in 2..=5 {
                let s = spec(m, n);
                assert_eq!(link_eigenvalues(s, 40).unwrap(), brute_force(s, 40), "{s}");
            }
        }
    }

    #[test]
    fn indicial_examples() {
        let d = spectral_data(spec(4, 4), 2).unwrap();
        assert_relative_eq!(d.lambda_re[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(d.indicial_roots[0][0], -3.0, epsilon = 1e-14);
        assert_relative_eq!(d.indicial_roots[0][1], -2.0, epsilon = 1e-14);
        assert!(d.stable);

        let d = spectral_data(spec(2, 2), 4).unwrap();
        assert_eq!(d.lambda_re[0], 0.0);
        assert_relative_eq!(d.lambda_im[0], 1.75f64.sqrt());
        assert!(d.j0 >= 1);
        assert!(!d.stable);
        for m in 2..=6 {
            let s = spec(m, 3);
            let d = spectral_data(s, 2).unwrap();
            assert_relative_eq!(d.lambda_re[1], (s.dimf() - 2.0) / 2.0);
        }
    }

    #[test]
    fn nu_bar_examples() {
        assert_relative_eq!(predicted_nu_bar(spec(4, 4), Regime::HighDim).unwrap(), -2.0, epsilon = 1e-14);
        assert_eq!(predicted_nu_bar(spec(2, 2), Regime::LowDim).unwrap(), -0.5);
        assert_eq!(predicted_nu_bar(spec(3, 3), Regime::LowDim).unwrap(), -1.5);
        assert!(matches!(
            predicted_nu_bar(spec(2, 2), Regime::HighDim),
            Err(Error::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn window_examples() {
        let w = solvability_window(spec(4, 4), Regime::HighDim).unwrap();
        assert!(w.admits(-1.0));
        let w = solvability_window(spec(2, 3), Regime::LowDim).unwrap();
        assert_eq!((w.lower, w.upper), (-1.0, 0.0));
        assert!(!w.admits(-1.0));
        assert!(w.admits(-0.5));
        let w = solvability_window(spec(2, 2), Regime::LowDim).unwrap();
        assert_eq!((w.lower, w.upper), (-0.5, 0.0));
        let w = solvability_window(spec(3, 3), Regime::LowDim).unwrap();
        assert!(w.admits(-1.0));
    }

    #[test]
    fn flat_link_gives_plane_roots() {
        let d = indicial_data_for_dim(3, &flat_link_eigenvalues(3, 4));
        assert_eq!(d.indicial_roots[0], [-1.0, 0.0]);
        assert!(d.stable);
    }
}
