//! Deterministic CSV and SVG exports of traces and reports.
//!
//! All writers are pure functions of their inputs: re-exporting the same
//! report produces byte-identical files. Numbers use Rust's shortest
//! round-trip float formatting in CSVs; the SVG uses fixed-precision
//! coordinates.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{EpisodeTrace, MetricsReport};

/// Export formats of the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Svg,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "svg" => Ok(ExportFormat::Svg),
            other => Err(Error::Config(format!("unknown export format '{other}'"))),
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn members_field(members: &[crate::domain::ClientId]) -> String {
    members.iter().map(|c| c.index().to_string()).collect::<Vec<_>>().join("|")
}

/// Writes one episode as CSV:
/// `slot,arm_id,members,reward,accuracy,cum_regret,bound`.
pub fn write_trace_csv(trace: &EpisodeTrace, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("slot,arm_id,members,reward,accuracy,cum_regret,bound\n");
    for s in &trace.slots {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.slot,
            s.arm_id.map(|a| a.to_string()).unwrap_or_default(),
            members_field(&s.members),
            s.reward,
            opt(s.accuracy),
            opt(s.cum_regret),
            opt(s.bound),
        );
    }
    write_file(path.as_ref(), &out)
}

/// Writes the aggregate report as sectioned CSV: per-slot curves, then mean
/// selection counts, then the time-to-accuracy table. An empty report
/// produces only the leading header.
pub fn write_report_csv(report: &MetricsReport, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("slot,mean_reward,mean_accuracy,std_accuracy,mean_regret,bound\n");
    for slot in 0..report.t {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            slot + 1,
            report.mean_reward.get(slot).map(|v| v.to_string()).unwrap_or_default(),
            opt(report.mean_accuracy.as_ref().and_then(|c| c.get(slot).copied())),
            opt(report.std_accuracy.as_ref().and_then(|c| c.get(slot).copied())),
            opt(report.mean_regret.as_ref().and_then(|c| c.get(slot).copied())),
            opt(report.bound.as_ref().and_then(|c| c.get(slot).copied())),
        );
    }
    if !report.selection_counts.is_empty() {
        out.push_str("\nclient,mean_selected\n");
        for (client, count) in report.selection_counts.iter().enumerate() {
            let _ = writeln!(out, "{client},{count}");
        }
    }
    if !report.tta.is_empty() {
        out.push_str("\ntarget,mean_slot,reached_trials\n");
        for e in &report.tta {
            let _ = writeln!(out, "{},{},{}", e.target, e.mean_slot, e.reached_trials);
        }
    }
    write_file(path.as_ref(), &out)
}

/// Writes the regret-versus-bound table: `t,regret,bound`.
pub fn write_bounds_csv(report: &MetricsReport, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("t,regret,theorem_bound\n");
    for slot in 0..report.t {
        let _ = writeln!(
            out,
            "{},{},{}",
            slot + 1,
            opt(report.mean_regret.as_ref().and_then(|c| c.get(slot).copied())),
            opt(report.bound.as_ref().and_then(|c| c.get(slot).copied())),
        );
    }
    write_file(path.as_ref(), &out)
}

/// Writes per-slot decentralized diagnostics across trials, one row per
/// client when index components were recorded, otherwise one row per slot:
/// `trial,slot,selected,bp_iterations,bp_residual,bp_converged,lambda,lambda_satisfied,gossip_rounds,client,mean,belief_term,bonus`.
pub fn write_bp_diagnostics_csv(traces: &[EpisodeTrace], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(
        "trial,slot,selected,bp_iterations,bp_residual,bp_residual_curve,bp_converged,lambda,lambda_satisfied,gossip_rounds,client,mean,belief_term,bonus\n",
    );
    for (trial, trace) in traces.iter().enumerate() {
        for s in &trace.slots {
            let Some(bp) = &s.bp else { continue };
            let curve = bp
                .residuals
                .iter()
                .map(|r| format!("{r:.3e}"))
                .collect::<Vec<_>>()
                .join("|");
            let prefix = format!(
                "{trial},{},{},{},{},{curve},{},{},{},{}",
                s.slot,
                members_field(&s.members),
                bp.iterations,
                bp.residual,
                bp.converged,
                bp.lambda,
                bp.lambda_satisfied,
                bp.gossip_rounds,
            );
            match &bp.components {
                Some(components) => {
                    for (client, c) in components.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{prefix},{client},{},{},{}",
                            c.mean, c.belief_term, c.bonus
                        );
                    }
                }
                None => {
                    let _ = writeln!(out, "{prefix},,,,");
                }
            }
        }
    }
    write_file(path.as_ref(), &out)
}

/// Renders the report as a single-panel SVG line plot: the accuracy band in
/// federated mode, or the regret-versus-bound curves in oracle mode.
pub fn write_report_svg(report: &MetricsReport, path: impl AsRef<Path>) -> Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 30.0;
    const MB: f64 = 45.0;

    struct Series<'a> {
        label: &'a str,
        color: &'a str,
        values: &'a [f64],
    }

    let mut series: Vec<Series> = Vec::new();
    let title;
    let y_label;
    if let Some(acc) = &report.mean_accuracy {
        title = format!("{} mean accuracy over {} trials", report.algorithm, report.trials);
        y_label = "accuracy";
        series.push(Series { label: "mean accuracy", color: "#1f77b4", values: acc });
        if let Some(rw) = Some(&report.mean_reward) {
            series.push(Series { label: "mean reward", color: "#2ca02c", values: rw });
        }
    } else {
        title = format!("{} regret over {} trials", report.algorithm, report.trials);
        y_label = "cumulative regret";
        if let Some(reg) = &report.mean_regret {
            series.push(Series { label: "mean regret", color: "#d62728", values: reg });
        }
        if let Some(bound) = &report.bound {
            series.push(Series { label: "upper bound", color: "#9467bd", values: bound });
        }
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"##
    );
    let _ = writeln!(svg, r##"<rect width="{W}" height="{H}" fill="white"/>"##);
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="18" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"##,
        W / 2.0
    );

    let plot_w = W - ML - MR;
    let plot_h = H - MT - MB;
    let _ = writeln!(
        svg,
        r##"<rect x="{ML:.1}" y="{MT:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#333" stroke-width="1"/>"##
    );

    let t_max = report.t.max(1) as f64;
    let y_max = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .fold(1e-9f64, f64::max);

    for s in &series {
        if s.values.is_empty() {
            continue;
        }
        let mut points = String::new();
        for (i, &v) in s.values.iter().enumerate() {
            let x = ML + plot_w * (i as f64 + 1.0) / t_max;
            let y = MT + plot_h * (1.0 - (v / y_max).clamp(0.0, 1.0));
            let _ = write!(points, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            svg,
            r##"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"##,
            points.trim_end(),
            s.color
        );
    }

    // Axis labels and extrema ticks.
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">slot</text>"##,
        ML + plot_w / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"##,
        MT + plot_h / 2.0,
        MT + plot_h / 2.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="{ML:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">1</text>"##,
        H - MB + 14.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"##,
        ML + plot_w,
        H - MB + 14.0,
        report.t
    );
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{y_max:.3}</text>"##,
        ML - 4.0,
        MT + 10.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">0</text>"##,
        ML - 4.0,
        MT + plot_h
    );

    // Legend.
    for (i, s) in series.iter().enumerate() {
        let y = MT + 14.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"/>"##,
            ML + 8.0,
            ML + 28.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"##,
            ML + 34.0,
            y + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    write_file(path.as_ref(), &svg)
}

/// Writes the report in the requested formats under `out_dir`, returning the
/// created paths.
pub fn export(
    report: &MetricsReport,
    formats: &[ExportFormat],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    let mut written = Vec::new();
    for format in formats {
        match format {
            ExportFormat::Csv => {
                let path = dir.join("report.csv");
                write_report_csv(report, &path)?;
                written.push(path);
            }
            ExportFormat::Svg => {
                let path = dir.join("report.svg");
                write_report_svg(report, &path)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
