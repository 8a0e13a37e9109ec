//! Subcommand implementations.

use serde::Serialize;
use serde_json::json;

use fcc_core::analysis::{
    averages_closed, energy_residuals, sample_orbit, stability, steady_state,
    sweep_average_current, Averages, EnergyResiduals, StabilityReport, SteadyState,
};
use fcc_core::integrator::{integrate, IntegratorConfig};
use fcc_core::mat2::Vec2;
use fcc_core::model::build_system;

use crate::manifest::RunManifest;
use crate::output::{num, write_sidecar_manifest, CsvWriter};
use crate::params::{resolve, resolve_with_period};
use crate::{AnalyzeArgs, AppError, ProfilesArgs, SimulateArgs, Source, SweepArgs};

#[derive(Serialize)]
struct AnalyzeReport {
    manifest: RunManifest,
    stability_report: StabilityReport,
    steady_state: SteadyState,
    averages: Averages,
    energy_residuals: EnergyResiduals,
    summary: serde_json::Value,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), AppError> {
    let params = resolve(&args.params)?;
    let sys = build_system(&params)?;
    let report = stability(&sys)?;
    let ss = steady_state(&sys)?;
    let avg = averages_closed(&sys, &ss);
    let energy = energy_residuals(&sys, &ss);

    // headline values at the 4-decimal precision used by the reference
    // figures; full precision lives in the structured fields
    let summary = json!({
        "stable": report.stable,
        "spectral_radius": format!("{:.6}", report.spectral_radius),
        "i_avg_A": format!("{:.4}", avg.i_avg),
        "v_avg_V": format!("{:.4}", avg.v_avg),
        "i_nominal_A": format!("{:.4}", avg.i_nominal),
    });

    let output_paths = args
        .output
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    let doc = AnalyzeReport {
        manifest: RunManifest::new(
            "analyze",
            params,
            None,
            output_paths,
            args.params.deterministic,
        ),
        stability_report: report,
        steady_state: ss,
        averages: avg,
        energy_residuals: energy,
        summary,
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| AppError::Internal(format!("report serialization failed: {e}")))?;
    println!("{text}");
    if let Some(path) = &args.output {
        std::fs::write(path, text + "\n")
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    eprintln!(
        "stable: {} | <i> = {:.4} A, <v> = {:.4} V (nominal {:.4} A)",
        doc.stability_report.stable, doc.averages.i_avg, doc.averages.v_avg, doc.averages.i_nominal
    );
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<(), AppError> {
    let params = resolve(&args.params)?;
    if args.periods < 1 {
        return Err(AppError::Validation("--periods must be >= 1".into()));
    }
    if args.source == Source::ClosedForm && (args.i0.is_some() || args.v0.is_some()) {
        return Err(AppError::Validation(
            "--i0/--v0 apply only to --source rk45 (the closed form is the periodic orbit)".into(),
        ));
    }
    let sys = build_system(&params)?;
    let cfg = IntegratorConfig::default();
    let grid = cfg.output_grid;

    let mut csv = CsvWriter::new(&["t_s", "i_A", "v_V"]);
    match args.source {
        Source::ClosedForm => {
            let ss = steady_state(&sys)?;
            let orbit = sample_orbit(&sys, &ss, grid)?;
            let period = sys.period();
            for j in 0..=args.periods * grid {
                let t = period * (j as f64) / (grid as f64);
                let k = j % grid;
                csv.row(&[num(t), num(orbit.currents[k]), num(orbit.voltages[k])]);
            }
        }
        Source::Rk45 => {
            let x_init = Vec2::new(args.i0.unwrap_or(0.0), args.v0.unwrap_or(0.0));
            let ts = integrate(&sys, x_init, args.periods, &cfg)?;
            for j in 0..ts.times.len() {
                csv.row(&[num(ts.times[j]), num(ts.currents[j]), num(ts.voltages[j])]);
            }
        }
    }
    csv.write_to(&args.output)?;

    let manifest = RunManifest::new(
        "simulate",
        params,
        Some(cfg),
        vec![args.output.display().to_string()],
        args.params.deterministic,
    );
    write_sidecar_manifest(&args.output, &manifest)?;
    eprintln!(
        "wrote {} rows to {}",
        args.periods * grid + 1,
        args.output.display()
    );
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<(), AppError> {
    if args.t_from.is_nan() || args.t_to.is_nan() || args.t_from <= 0.0 || args.t_to <= args.t_from
    {
        return Err(AppError::Validation(
            "sweep range requires 0 < --t-from < --t-to".into(),
        ));
    }
    // the sweep supplies the period; a --T flag is only a manifest base
    let params = resolve_with_period(&args.params, args.t_from)?;
    if args.steps < 2 {
        return Err(AppError::Validation("--steps must be >= 2".into()));
    }

    let n = args.steps;
    let t_values: Vec<f64> = (0..n)
        .map(|j| {
            let w = j as f64 / (n - 1) as f64;
            match args.scale {
                crate::Scale::Linear => args.t_from + w * (args.t_to - args.t_from),
                crate::Scale::Log => {
                    (args.t_from.ln() + w * (args.t_to.ln() - args.t_from.ln())).exp()
                }
            }
        })
        .collect();

    let points = sweep_average_current(&params, &t_values)?;
    let mut csv = CsvWriter::new(&["T_s", "i_avg_A", "i_nominal_A", "bound_A", "conjecture_ok"]);
    let mut violations = 0usize;
    for pt in &points {
        if !pt.conjecture_satisfied {
            violations += 1;
        }
        csv.row(&[
            num(pt.t),
            num(pt.i_avg),
            num(pt.i_nominal),
            num(pt.i_deviation_bound),
            pt.conjecture_satisfied.to_string(),
        ]);
    }
    csv.write_to(&args.output)?;

    let manifest = RunManifest::new(
        "sweep",
        params,
        None,
        vec![args.output.display().to_string()],
        args.params.deterministic,
    );
    write_sidecar_manifest(&args.output, &manifest)?;
    if violations > 0 {
        eprintln!(
            "conjecture <i> <= Vdc/(2R) flagged at {violations} of {n} sweep points \
             (see conjecture_ok column)"
        );
    } else {
        eprintln!("conjecture <i> <= Vdc/(2R) satisfied at all {n} sweep points");
    }
    Ok(())
}

/// Samples per normalized period in profile output.
const PROFILE_GRID: usize = 512;

pub fn profiles(args: &ProfilesArgs) -> Result<(), AppError> {
    if args.t_list.is_empty() {
        return Err(AppError::Validation("--t-list must not be empty".into()));
    }
    // periods come from --t-list; a --T flag is only a manifest base
    let base = resolve_with_period(&args.params, args.t_list[0])?;

    // one steady orbit per period value, all on the shared normalized grid
    let mut orbits = Vec::with_capacity(args.t_list.len());
    for &t in &args.t_list {
        let p = fcc_core::model::CircuitParams { t, ..base };
        let sys = build_system(&p)?;
        let ss = steady_state(&sys)?;
        orbits.push(sample_orbit(&sys, &ss, PROFILE_GRID)?);
    }

    let mut header: Vec<String> = vec!["tau".into()];
    for idx in 1..=args.t_list.len() {
        header.push(format!("i_A_T{idx}"));
        header.push(format!("v_V_T{idx}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = CsvWriter::new(&header_refs);

    for j in 0..=2 * PROFILE_GRID {
        let tau = j as f64 / (PROFILE_GRID as f64);
        let k = if j <= PROFILE_GRID {
            j
        } else {
            j - PROFILE_GRID
        };
        let mut cells = vec![num(tau)];
        for orbit in &orbits {
            cells.push(num(orbit.currents[k]));
            cells.push(num(orbit.voltages[k]));
        }
        csv.row(&cells);
    }
    csv.write_to(&args.output)?;

    let manifest = RunManifest::new(
        "profiles",
        base,
        None,
        vec![args.output.display().to_string()],
        args.params.deterministic,
    );
    write_sidecar_manifest(&args.output, &manifest)?;
    eprintln!(
        "wrote {} profile pairs over tau in [0, 2] to {}",
        args.t_list.len(),
        args.output.display()
    );
    Ok(())
}
