//! The data-producing subcommands: `evolve`, `age-spectrum`, `lyapunov`.
//!
//! Every command writes its tables (and optional SVG plot) atomically into
//! the output directory, then a `report.json` echoing the scenario and
//! carrying a digest manifest of everything written (the report file
//! itself is the one artifact that cannot hold its own digest).

use crate::config::{ScenarioConfig, TableFormat};
use crate::output::{line_plot_svg, write_atomic, Cell, Table};
use crate::report::{manifest_entry, CheckRecord, Outcome, RunReport};
use crate::scenario::{build_scenario, BuiltScenario};
use crate::CliError;
use qage::{age_decompose, lyapunov_series, mean_trajectory};
use std::path::Path;

fn emit_table(
    report: &mut RunReport,
    dir: &Path,
    stem: &str,
    table: &Table,
    format: TableFormat,
) -> Result<(), CliError> {
    let name = table.file_name(stem, format);
    let bytes = table.render(format).into_bytes();
    write_atomic(&dir.join(&name), &bytes)?;
    report.manifest.push(manifest_entry(&name, &bytes));
    Ok(())
}

fn emit_plot(report: &mut RunReport, dir: &Path, name: &str, svg: String) -> Result<(), CliError> {
    let bytes = svg.into_bytes();
    write_atomic(&dir.join(name), &bytes)?;
    report.manifest.push(manifest_entry(name, &bytes));
    Ok(())
}

/// `evolve`: mean-value trajectory of the configured observable in the
/// configured state.
pub fn cmd_evolve(
    config: &ScenarioConfig,
    seed: u64,
    scale: f64,
    dir: &Path,
) -> Result<RunReport, CliError> {
    let BuiltScenario {
        state,
        observable,
        times,
        ..
    } = build_scenario(config)?;
    let mut report = RunReport::new("evolve", seed, scale, config.clone());
    let traj = mean_trajectory(&state, &observable, &times).map_err(CliError::numeric)?;

    let mut table = Table::new(vec!["t", "re_mean", "im_mean", "offdiag_magnitude"]);
    for i in 0..traj.len() {
        table.push(vec![
            Cell::Float(traj.times()[i]),
            Cell::Float(traj.means()[i].re),
            Cell::Float(traj.means()[i].im),
            Cell::Float(traj.offdiag_magnitude()[i]),
        ]);
    }
    emit_table(
        &mut report,
        dir,
        "trajectory",
        &table,
        config.outputs.format,
    )?;
    if config.outputs.plot {
        let points: Vec<(f64, f64)> = traj
            .times()
            .iter()
            .copied()
            .zip(traj.offdiag_magnitude().iter().copied())
            .collect();
        emit_plot(
            &mut report,
            dir,
            "trajectory.svg",
            line_plot_svg("correlation decay", "t", "offdiag magnitude", &points, true),
        )?;
    }
    report.write(dir)?;
    Ok(report)
}

/// `age-spectrum`: cumulative Parseval mass of the state's correlation
/// part below each distinct grid age.
pub fn cmd_age_spectrum(
    config: &ScenarioConfig,
    seed: u64,
    scale: f64,
    dir: &Path,
) -> Result<RunReport, CliError> {
    let BuiltScenario { state, .. } = build_scenario(config)?;
    let mut report = RunReport::new("age-spectrum", seed, scale, config.clone());

    let mut table = Table::new(vec!["s", "cumulative_mass"]);
    let spectrum = age_decompose(state.corr());
    let total = spectrum.parseval_norm_sq();
    if total > 0.0 {
        // every distinct grid age, in ascending order, with the mass of all
        // coefficients of age <= s (ties share one row)
        let chart = spectrum.chart().clone();
        let mut entries: Vec<(f64, f64)> = spectrum
            .modes()
            .map(|(j, _, s, c)| (s, chart.slice_weight(j) * c.norm_sqr()))
            .collect();
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite ages"));
        let mut cum = 0.0;
        let mut i = 0;
        while i < entries.len() {
            let s = entries[i].0;
            while i < entries.len() && entries[i].0 == s {
                cum += entries[i].1;
                i += 1;
            }
            table.push(vec![Cell::Float(s), Cell::Float(cum)]);
        }
    }
    emit_table(
        &mut report,
        dir,
        "age_spectrum",
        &table,
        config.outputs.format,
    )?;
    if config.outputs.plot {
        let points: Vec<(f64, f64)> = table
            .rows
            .iter()
            .map(|r| match (&r[0], &r[1]) {
                (Cell::Float(s), Cell::Float(m)) => (*s, *m),
                _ => unreachable!(),
            })
            .collect();
        emit_plot(
            &mut report,
            dir,
            "age_spectrum.svg",
            line_plot_svg("age spectrum", "s", "cumulative mass", &points, false),
        )?;
    }
    report.write(dir)?;
    Ok(report)
}

/// `lyapunov`: the Lyapunov variable along the configured times, spectral
/// and direct routes side by side.
pub fn cmd_lyapunov(
    config: &ScenarioConfig,
    seed: u64,
    scale: f64,
    dir: &Path,
) -> Result<RunReport, CliError> {
    let BuiltScenario {
        state,
        profile,
        times,
        ..
    } = build_scenario(config)?;
    let mut report = RunReport::new("lyapunov", seed, scale, config.clone());
    let series = lyapunov_series(&state, &profile, &times).map_err(CliError::numeric)?;

    let mut table = Table::new(vec!["t", "l_spectral", "l_direct", "monotone_ok"]);
    for p in &series.points {
        table.push(vec![
            Cell::Float(p.t),
            Cell::Float(p.spectral),
            Cell::Float(p.direct),
            Cell::Bool(p.monotone_ok),
        ]);
    }
    emit_table(&mut report, dir, "lyapunov", &table, config.outputs.format)?;
    if config.outputs.plot {
        let points: Vec<(f64, f64)> = series.points.iter().map(|p| (p.t, p.spectral)).collect();
        emit_plot(
            &mut report,
            dir,
            "lyapunov.svg",
            line_plot_svg("Lyapunov variable", "t", "L(t)", &points, true),
        )?;
    }

    let worst_step = series
        .points
        .windows(2)
        .map(|w| w[1].spectral - w[0].spectral)
        .fold(0.0f64, f64::max)
        .max(0.0);
    report.push_check(CheckRecord {
        name: "lyapunov_monotone".into(),
        outcome: if series.points.iter().all(|p| p.monotone_ok) {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        defect: Some(worst_step),
        tolerance: Some(0.0),
        note: None,
        ops: vec!["lyapunov_series".into()],
    });
    report.push_check(CheckRecord {
        name: "lyapunov_final_ratio".into(),
        outcome: Outcome::Pass,
        defect: Some(series.final_ratio),
        tolerance: None,
        note: Some(format!(
            "L(end)/L(0); direct path monotone within 1e-9: {}",
            series.direct_monotone_within_tol
        )),
        ops: vec![],
    });
    report.write(dir)?;
    Ok(report)
}
