//! Plain-text writers: CSV with ten significant digits and pretty JSON.

use std::fmt::Write as _;

use crate::jacobi::JacobiSolution;
use crate::plateau::{plateau_zeta0_samples, RadialGraph};
use crate::profile::GeometryTrace;
use crate::profile::ProfileCurve;

/// Ten significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.9e}")
    }
}

pub fn csv_table(header: &[&str], columns: &[&[f64]]) -> String {
    assert_eq!(header.len(), columns.len(), "header/column count mismatch");
    let rows = columns.first().map_or(0, |c| c.len());
    assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
    let mut out = String::with_capacity(rows * columns.len() * 17 + 64);
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        for (j, c) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_num(c[i]));
        }
        out.push('\n');
    }
    out
}

/// `s,a,b,phi,alpha,A2,trA3,zeta0,Hres`.
pub fn profile_csv(curve: &ProfileCurve, trace: &GeometryTrace) -> String {
    let col = |f: fn(&crate::profile::ProfileSample) -> f64| curve.samples().iter().map(f).collect::<Vec<f64>>();
    let (a, b, phi) = (col(|p| p.a), col(|p| p.b), col(|p| p.phi));
    csv_table(
        &["s", "a", "b", "phi", "alpha", "A2", "trA3", "zeta0", "Hres"],
        &[&trace.s, &a, &b, &phi, &trace.alpha, &trace.a2, &trace.tra3, &trace.zeta0, &trace.hres],
    )
}

/// `s,t,p,V,ftilde,psi,dpsi,residual`.
pub fn jacobi_csv(sol: &JacobiSolution) -> String {
    let ef = &sol.ef;
    csv_table(
        &["s", "t", "p", "V", "ftilde", "psi", "dpsi", "residual"],
        &[&ef.s, &ef.t_grid, &ef.p, &ef.v, &ef.f_tilde, &sol.psi, &sol.dpsi, &sol.residual],
    )
}

/// `r,v,dv,zeta0,flux_residual`.
pub fn plateau_csv(graph: &RadialGraph) -> String {
    let z = plateau_zeta0_samples(graph);
    let flux = graph.flux_residuals();
    csv_table(&["r", "v", "dv", "zeta0", "flux_residual"], &[&graph.r, &graph.v, &graph.dv, &z, &flux])
}

/// Pretty JSON with a trailing newline.
pub fn json_string(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.000000000e0");
        assert_eq!(fmt_num(-0.000123456789012), "-1.234567890e-4");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn table_layout() {
        let t = csv_table(&["x", "y"], &[&[1.0, 2.0], &[3.0, 4.5]]);
        assert_eq!(t, "x,y\n1.000000000e0,3.000000000e0\n2.000000000e0,4.500000000e0\n");
    }
}
