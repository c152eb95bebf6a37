use std::path::Path;

use cjl_core::cone_spectra::{link_radii, predicted_nu_bar, solvability_window, spectral_data};
use cjl_core::cone_spectra::{flat_link_eigenvalues, indicial_data_for_dim};
use cjl_core::decay::{classify_against_indicial, fit_json};
use cjl_core::jacobi::{solve_jacobi, trace_rhs, JacobiConfig};
use cjl_core::plateau::{minimal_graph_residual, plateau_profile, plateau_zeta0};
use cjl_core::profile::{cone_crossings, geometry_trace, integrate_profile, zeta0_fit, SampleGrid};
use cjl_core::{ConeSpec, JacobiSolution, ProfileCurve, ShootingConfig, Start, Tolerance};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::output::{FileRecord, OutputDir};
use crate::CliError;

const PROFILE_POINTS_PER_UNIT: usize = 200;
const PLATEAU_POINTS_PER_UNIT: usize = 100;

fn shooting(cfg: &RunConfig, spec: ConeSpec, grid: SampleGrid) -> ShootingConfig {
    ShootingConfig::new(spec, Start::AxisM, cfg.s_max)
        .with_epsilon(cfg.eps)
        .with_tol(Tolerance::new(cfg.tol, 0.1 * cfg.tol))
        .with_grid(grid)
}

fn fit_record(curve: &ProfileCurve) -> Result<Value, CliError> {
    let spectral = spectral_data(curve.spec(), 16)?;
    Ok(match zeta0_fit(curve) {
        Ok(fit) => fit_json(&fit, Some(&classify_against_indicial(&fit, &spectral))),
        Err(e) => json!({ "error": e.to_string() }),
    })
}

fn write_profile(out: &mut OutputDir, format: Format, curve: &ProfileCurve) -> Result<(), CliError> {
    let tr = geometry_trace(curve);
    let col = |f: fn(&cjl_core::profile::ProfileSample) -> f64| curve.samples().iter().map(f).collect::<Vec<f64>>();
    let (a, b, phi) = (col(|p| p.a), col(|p| p.b), col(|p| p.phi));
    out.write_table(
        "profile",
        format,
        &["s", "a", "b", "phi", "alpha", "A2", "trA3", "zeta0", "Hres"],
        &[&tr.s, &a, &b, &phi, &tr.alpha, &tr.a2, &tr.tra3, &tr.zeta0, &tr.hres],
    )
}

fn write_jacobi(out: &mut OutputDir, format: Format, sol: &JacobiSolution) -> Result<(), CliError> {
    let ef = &sol.ef;
    out.write_table(
        "jacobi",
        format,
        &["s", "t", "p", "V", "ftilde", "psi", "dpsi", "residual"],
        &[&ef.s, &ef.t_grid, &ef.p, &ef.v, &ef.f_tilde, &sol.psi, &sol.dpsi, &sol.residual],
    )
}

fn jacobi_summary(sol: &JacobiSolution) -> Value {
    json!({
        "residual_sup": sol.residual_sup,
        "residual_target": sol.target,
        "residual_window": [sol.residual_window.0, sol.residual_window.1],
        "points_per_unit": sol.points_per_unit,
        "wronskian_drift": sol.wronskian_drift(),
        "t0": sol.ef.t0,
        "t1": sol.ef.t1,
    })
}

pub fn spectrum(cfg: &RunConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let (m, n) = cfg.cone()?;
    let spec = ConeSpec::new(m, n)?;
    let regime = spec.regime();
    let data = spectral_data(spec, cfg.count.max(2))?;
    let window = solvability_window(spec, regime)?;
    let (ra, rb) = link_radii(spec);
    let nu_bar = predicted_nu_bar(spec, regime)?;
    let doc = json!({
        "m": m,
        "n": n,
        "N": spec.dim(),
        "regime": regime.name(),
        "stable": data.stable,
        "link_radii": [ra, rb],
        "cone_angle": spec.cone_angle(),
        "nu_bar": nu_bar,
        "solvability_window": window,
        "spectrum": data.to_json(),
    });
    out.write_json("spectrum.json", &doc)?;
    Ok(json!({ "regime": regime.name(), "stable": data.stable, "nu_bar": nu_bar }))
}

pub fn profile(cfg: &RunConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let (m, n) = cfg.cone()?;
    let spec = ConeSpec::new(m, n)?;
    let grid = SampleGrid::LogUniform { points_per_unit: PROFILE_POINTS_PER_UNIT };
    let curve = integrate_profile(&shooting(cfg, spec, grid))?;
    write_profile(out, cfg.format, &curve)?;
    Ok(json!({
        "samples": curve.len(),
        "steps": curve.n_steps(),
        "crossings": cone_crossings(&curve),
        "max_abs_Hres": geometry_trace(&curve).max_abs_hres(),
        "zeta0_fit": fit_record(&curve)?,
    }))
}

/// Profile plus Jacobi solve for one cone; returns the summary row.
fn jacobi_run(cfg: &RunConfig, spec: ConeSpec, out: &mut OutputDir) -> Result<Value, CliError> {
    let curve = integrate_profile(&shooting(cfg, spec, SampleGrid::Steps))?;
    let sol = solve_jacobi(&curve, trace_rhs(&curve), &JacobiConfig::default())?;
    write_profile(out, cfg.format, &curve)?;
    write_jacobi(out, cfg.format, &sol)?;
    let zeta0 = fit_record(&curve)?;
    let report = json!({
        "solve": jacobi_summary(&sol),
        "decay": sol.decay_report,
        "zeta0_fit": zeta0,
    });
    out.write_json("decay_report.json", &report)?;
    let regime = spec.regime();
    Ok(json!({
        "m": spec.m(),
        "n": spec.n(),
        "N": spec.dim(),
        "regime": regime.name(),
        "stable": regime == cjl_core::Regime::HighDim,
        "nu_bar": predicted_nu_bar(spec, regime)?,
        "zeta0_fit": zeta0,
        "crossings": cone_crossings(&curve),
        "residual_sup": sol.residual_sup,
        "max_ratio": sol.decay_report.max_ratio,
    }))
}

pub fn jacobi(cfg: &RunConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let (m, n) = cfg.cone()?;
    jacobi_run(cfg, ConeSpec::new(m, n)?, out)
}

pub fn plateau(cfg: &RunConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let graph = plateau_profile(cfg.dim, cfg.radius, cfg.r_max, PLATEAU_POINTS_PER_UNIT)?;
    let (z, fit) = match plateau_zeta0(&graph) {
        Ok((z, fit)) => (z, Some(fit)),
        Err(_) => (cjl_core::plateau::plateau_zeta0_samples(&graph), None),
    };
    let flux = graph.flux_residuals();
    out.write_table(
        "plateau",
        cfg.format,
        &["r", "v", "dv", "zeta0", "flux_residual"],
        &[&graph.r, &graph.v, &graph.dv, &z, &flux],
    )?;
    let spectral = indicial_data_for_dim(cfg.dim, &flat_link_eigenvalues(cfg.dim, 16));
    let fit_value = fit.map_or(Value::Null, |f| fit_json(&f, Some(&classify_against_indicial(&f, &spectral))));
    let summary = json!({
        "N": cfg.dim,
        "R": cfg.radius,
        "alphaR": graph.alpha_r,
        "alpha_over_R": graph.alpha_r / cfg.radius,
        "decay_coeff": graph.decay_coeff(),
        "minimal_graph_residual": minimal_graph_residual(&graph),
        "zeta0_fit": fit_value,
    });
    out.write_json("plateau_summary.json", &summary)?;
    Ok(summary)
}

pub fn report(cfg: &RunConfig, root: &Path, out: &mut OutputDir) -> Result<Value, CliError> {
    let specs = cfg
        .sweep
        .iter()
        .map(|&(m, n)| ConeSpec::new(m, n))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<(Value, Vec<FileRecord>), CliError>> = specs
        .par_iter()
        .map(|&spec| {
            let sub = format!("C{}x{}", spec.m(), spec.n());
            let mut dir = OutputDir::create(&root.join(&sub))?;
            let row = jacobi_run(cfg, spec, &mut dir)?;
            let files = dir
                .into_records()
                .into_iter()
                .map(|mut f| {
                    f.path = format!("{sub}/{}", f.path);
                    f
                })
                .collect();
            Ok((row, files))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        let (row, files) = r?;
        out.absorb(files);
        rows.push(row);
    }
    let doc = json!({ "rows": rows });
    out.write_json("report.json", &doc)?;
    Ok(json!({ "cones": rows.len() }))
}
