//! Writes run artifacts to disk: comparison and estimate tables (CSV), a
//! single Markdown report, per-figure plot data, the split manifest, and the
//! serialized network models.
//!
//! Numeric rendering is fixed so identical runs emit byte-identical files:
//! efforts get four significant digits, metric columns two decimals.

use std::fs;
use std::path::{Path, PathBuf};

use crate::experiment::{ExperimentError, ModelKind, ReportFormat, RunArtifacts};

/// Render with the given number of significant digits (no exponent form).
pub fn format_significant(x: f64, significant: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", significant as usize - 1, 0.0);
    }
    let digits = significant as i32;
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(magnitude - digits + 1);
    let rounded = (x / scale).round() * scale;
    // rounding can carry into the next magnitude (999.96 -> 1000)
    let magnitude = rounded.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{rounded:.decimals$}")
}

/// Effort cell: four significant digits.
pub fn format_effort(x: f64) -> String {
    format_significant(x, 4)
}

/// Metric cell: two decimals.
pub fn format_metric(x: f64) -> String {
    format!("{x:.2}")
}

/// Write every artifact for the selected formats into `out_dir`; returns the
/// paths written.
pub fn emit(artifacts: &RunArtifacts, out_dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(out_dir).map_err(|source| ExperimentError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let write = |name: &str, contents: String| -> Result<PathBuf, ExperimentError> {
        let path = out_dir.join(name);
        fs::write(&path, contents)
            .map_err(|source| ExperimentError::Io { path: path.display().to_string(), source })?;
        Ok(path)
    };

    if let Some(plan) = &artifacts.split {
        written.push(write("split.json", plan.to_json())?);
    }
    if let Some(model) = &artifacts.rbnn_model {
        let mut json = serde_json::to_string_pretty(model).expect("model serializes");
        json.push('\n');
        written.push(write("rbnn_model.json", json)?);
    }
    if let Some(model) = &artifacts.grnn_model {
        let mut json = serde_json::to_string_pretty(model).expect("model serializes");
        json.push('\n');
        written.push(write("grnn_model.json", json)?);
    }

    let formats = &artifacts.config.formats;
    if formats.contains(&ReportFormat::Csv) {
        written.push(write("comparison.csv", comparison_csv(artifacts))?);
        written.push(write("estimates.csv", estimates_csv(artifacts))?);
    }
    if formats.contains(&ReportFormat::Markdown) {
        written.push(write("report.md", markdown_report(artifacts))?);
    }

    // plot-ready figure data
    if artifacts.run_for(ModelKind::Rbnn).is_some() {
        written.push(write("fig5_actual_vs_rbnn.csv", actual_vs_model_csv(artifacts, ModelKind::Rbnn))?);
    }
    written.push(write("fig6_all_models.csv", estimates_csv(artifacts))?);
    for (name, metric) in [
        ("fig7_mare.csv", MetricColumn::Mare),
        ("fig8_vare.csv", MetricColumn::Vare),
        ("fig9_mean_bre.csv", MetricColumn::MeanBre),
        ("fig10_mmre.csv", MetricColumn::Mmre),
        ("fig11_pred40.csv", MetricColumn::Pred40),
    ] {
        written.push(write(name, metric_bar_csv(artifacts, metric))?);
    }
    Ok(written)
}

#[derive(Clone, Copy)]
enum MetricColumn {
    Mare,
    Vare,
    MeanBre,
    Mmre,
    Pred40,
}

impl MetricColumn {
    fn header(self) -> &'static str {
        match self {
            MetricColumn::Mare => "mare_pct",
            MetricColumn::Vare => "vare_pct",
            MetricColumn::MeanBre => "mean_bre",
            MetricColumn::Mmre => "mmre_pct",
            MetricColumn::Pred40 => "pred40_pct",
        }
    }

    fn value(self, run: &crate::experiment::ModelRun) -> f64 {
        match self {
            MetricColumn::Mare => run.report.mare_pct,
            MetricColumn::Vare => run.report.vare_pct,
            MetricColumn::MeanBre => run.report.mean_bre,
            MetricColumn::Mmre => run.report.mmre_pct,
            MetricColumn::Pred40 => run.report.pred[&40],
        }
    }
}

fn comparison_csv(artifacts: &RunArtifacts) -> String {
    let mut out = String::from("model,mare_pct,vare_pct,mean_bre,mmre_pct,pred40_pct\n");
    for run in &artifacts.runs {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            run.model,
            format_metric(run.report.mare_pct),
            format_metric(run.report.vare_pct),
            format_metric(run.report.mean_bre),
            format_metric(run.report.mmre_pct),
            format_metric(run.report.pred[&40]),
        ));
    }
    out
}

fn estimates_csv(artifacts: &RunArtifacts) -> String {
    let mut header = String::from("id,actual");
    for run in &artifacts.runs {
        header.push(',');
        header.push_str(run.model.name());
    }
    let mut out = header + "\n";
    for (i, (id, actual)) in artifacts.projects.iter().enumerate() {
        out.push_str(&format!("{id},{}", format_effort(*actual)));
        for run in &artifacts.runs {
            out.push(',');
            out.push_str(&format_effort(run.estimates[i]));
        }
        out.push('\n');
    }
    out
}

fn actual_vs_model_csv(artifacts: &RunArtifacts, model: ModelKind) -> String {
    let run = artifacts.run_for(model).expect("model was run");
    let mut out = String::from("id,actual,predicted\n");
    for ((id, actual), estimate) in artifacts.projects.iter().zip(&run.estimates) {
        out.push_str(&format!("{id},{},{}\n", format_effort(*actual), format_effort(*estimate)));
    }
    out
}

fn metric_bar_csv(artifacts: &RunArtifacts, metric: MetricColumn) -> String {
    let mut out = format!("model,{}\n", metric.header());
    for run in &artifacts.runs {
        out.push_str(&format!("{},{}\n", run.model, format_metric(metric.value(run))));
    }
    out
}

fn markdown_report(artifacts: &RunArtifacts) -> String {
    let config = &artifacts.config;
    let mut out = String::from("# Effort estimation comparison\n\n");

    out.push_str("## Configuration\n\n");
    out.push_str(&format!("- data: `{}`\n", config.data_path.display()));
    let models: Vec<&str> = artifacts.runs.iter().map(|r| r.model.name()).collect();
    out.push_str(&format!("- models: {}\n", models.join(", ")));
    out.push_str(&format!("- projects: {}\n", artifacts.projects.len()));
    if artifacts.split.is_some() {
        out.push_str(&format!("- train count: {}\n", config.train_count));
        out.push_str(&format!("- seed: {}\n", config.seed));
    }
    out.push_str(&format!("- spread: {}\n", config.spread));
    out.push_str(&format!("- encoding: {}\n", config.encoding));
    out.push_str(&format!("- scaling: {}\n", if config.scale { "on" } else { "off" }));
    out.push_str(&format!("- solver: {}\n\n", config.solver));

    if let Some(plan) = &artifacts.split {
        out.push_str("## Split manifest\n\n");
        out.push_str(&format!("- seed: {}\n", plan.seed));
        out.push_str(&format!("- generator: `{}`\n", plan.generator));
        let ids: Vec<String> = plan.train_ids.iter().map(u32::to_string).collect();
        out.push_str(&format!("- train ids ({}): {}\n", plan.train_ids.len(), ids.join(", ")));
        out.push_str("- test set: all projects\n\n");
    }

    let mut flagged = Vec::new();
    for run in &artifacts.runs {
        if run.non_positive_predictions > 0 {
            flagged.push(format!(
                "- {}: {} non-positive prediction(s), kept in MARE/VARE/MMRE/Pred, excluded from BRE",
                run.model, run.non_positive_predictions
            ));
        }
        if run.report.bre_excluded > 0 {
            flagged.push(format!(
                "- {}: {} pair(s) excluded from mean BRE",
                run.model, run.report.bre_excluded
            ));
        }
    }
    for w in &artifacts.warnings {
        flagged.push(format!("- {w}"));
    }
    out.push_str("## Flags\n\n");
    if flagged.is_empty() {
        out.push_str("- none\n\n");
    } else {
        out.push_str(&flagged.join("\n"));
        out.push_str("\n\n");
    }

    out.push_str("## Comparison\n\n");
    out.push_str("| Model | MARE (%) | VARE (%) | Mean BRE | MMRE (%) | Pred(40) (%) |\n");
    out.push_str("|-------|----------|----------|----------|----------|--------------|\n");
    for run in &artifacts.runs {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            run.model,
            format_metric(run.report.mare_pct),
            format_metric(run.report.vare_pct),
            format_metric(run.report.mean_bre),
            format_metric(run.report.mmre_pct),
            format_metric(run.report.pred[&40]),
        ));
    }
    out.push('\n');

    out.push_str("## Per-project estimates (man-months)\n\n");
    let mut header = String::from("| id | actual |");
    let mut rule = String::from("|----|--------|");
    for run in &artifacts.runs {
        header.push_str(&format!(" {} |", run.model));
        rule.push_str("------|");
    }
    out.push_str(&header);
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for (i, (id, actual)) in artifacts.projects.iter().enumerate() {
        let mut line = format!("| {id} | {} |", format_effort(*actual));
        for run in &artifacts.runs {
            line.push_str(&format!(" {} |", format_effort(run.estimates[i])));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}
