//! Report output: JSON, accuracy tables and per-frame F1 figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use newsframe_core::taxonomy::FRAME_TABLE_MODALITIES;
use newsframe_core::{Frame, Task};
use plotters::prelude::*;

use super::{EvalReport, Subset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Table,
    Figure,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "table" => Ok(ReportFormat::Table),
            "figure" => Ok(ReportFormat::Figure),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

pub fn report_file_stem(r: &EvalReport) -> String {
    format!("report_{}_{}_{}", r.spec.task, r.spec.subset.as_str(), r.spec.modality)
}

/// Refuses report sets that mix corpora or repeat an experiment.
pub fn check_compatible(reports: &[EvalReport]) -> Result<()> {
    let sums: std::collections::BTreeSet<&Option<String>> = reports.iter().map(|r| &r.corpus_checksum).collect();
    if sums.len() > 1 {
        return Err(Error::Report("runs come from corpora with different checksums".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for r in reports {
        if !seen.insert(report_file_stem(r)) {
            return Err(Error::Report(format!("experiment {} appears more than once", report_file_stem(r))));
        }
    }
    Ok(())
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn emit_report(reports: &[EvalReport], format: ReportFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    check_compatible(reports)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    match format {
        ReportFormat::Json => {
            let mut out = Vec::new();
            for r in reports {
                let p = out_dir.join(format!("{}.json", report_file_stem(r)));
                write(&p, serde_json::to_vec_pretty(r)?)?;
                out.push(p);
            }
            Ok(out)
        }
        ReportFormat::Table => emit_tables(reports, out_dir),
        ReportFormat::Figure => emit_figures(reports, out_dir),
    }
}

/// Modality keys of `task` in table order: the fixed frame-table order first,
/// then any other keys in order of appearance.
pub fn table_rows(reports: &[EvalReport], task: Task) -> Vec<String> {
    let present: Vec<&str> = reports.iter().filter(|r| r.spec.task == task).map(|r| r.spec.modality.as_str()).collect();
    let mut rows: Vec<String> = Vec::new();
    if task == Task::Frame {
        rows.extend(FRAME_TABLE_MODALITIES.iter().filter(|m| present.contains(m)).map(|m| m.to_string()));
    }
    for m in present {
        if !rows.iter().any(|r| r == m) {
            rows.push(m.to_string());
        }
    }
    rows
}

/// Text table: one row per modality, one column per subset (mean accuracy, %).
pub fn render_table(reports: &[EvalReport], task: Task) -> (String, String) {
    let cell: BTreeMap<(String, Subset), &EvalReport> =
        reports.iter().filter(|r| r.spec.task == task).map(|r| ((r.spec.modality.clone(), r.spec.subset), r)).collect();
    let rows = table_rows(reports, task);
    let width = rows.iter().map(String::len).max().unwrap_or(8).max(8);
    let mut txt = String::new();
    let _ = writeln!(txt, "{task} task: mean micro accuracy (%)");
    let _ = writeln!(txt, "{:<width$}  {:>8}  {:>8}", "modality", "All", "Relevant");
    let mut csv = String::from("task,modality,all_mean,all_std,all_runs,relevant_mean,relevant_std,relevant_runs\n");
    for m in &rows {
        let fmt = |s: Subset| match cell.get(&(m.clone(), s)) {
            Some(r) => format!("{:.1}", 100.0 * r.aggregate.mean_accuracy),
            None => "-".into(),
        };
        let _ = writeln!(txt, "{m:<width$}  {:>8}  {:>8}", fmt(Subset::All), fmt(Subset::RelevantOnly));
        let nums = |s: Subset| match cell.get(&(m.clone(), s)) {
            Some(r) => format!("{},{},{}", r.aggregate.mean_accuracy, r.aggregate.std_accuracy, r.aggregate.n_runs),
            None => ",,".into(),
        };
        let _ = writeln!(csv, "{task},{m},{},{}", nums(Subset::All), nums(Subset::RelevantOnly));
    }
    (txt, csv)
}

fn emit_tables(reports: &[EvalReport], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for task in [Task::Frame, Task::Relevance] {
        if !reports.iter().any(|r| r.spec.task == task) {
            continue;
        }
        let (txt, csv) = render_table(reports, task);
        let t = out_dir.join(format!("table_{task}.txt"));
        let c = out_dir.join(format!("table_{task}.csv"));
        write(&t, txt)?;
        write(&c, csv)?;
        out.push(t);
        out.push(c);
    }
    Ok(out)
}

const PALETTE: [RGBColor; 8] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(127, 127, 127),
];

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Report(format!("drawing failed: {e}"))
}

/// Grouped per-frame F1 bars (frames in id order), one file per subset.
fn emit_figures(reports: &[EvalReport], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for subset in [Subset::All, Subset::RelevantOnly] {
        let group: Vec<&EvalReport> = reports.iter().filter(|r| r.spec.task == Task::Frame && r.spec.subset == subset).collect();
        if group.is_empty() {
            continue;
        }
        let order = table_rows(reports, Task::Frame);
        let mut series: Vec<&EvalReport> = group.clone();
        series.sort_by_key(|r| order.iter().position(|m| *m == r.spec.modality));
        let path = out_dir.join(format!("per_frame_f1_{}.svg", subset.as_str()));
        draw_f1_bars(&series, &path, subset)?;
        out.push(path);
    }
    if out.is_empty() {
        log::warn!("no frame-task runs to plot");
    }
    Ok(out)
}

fn draw_f1_bars(series: &[&EvalReport], path: &Path, subset: Subset) -> Result<()> {
    let root = SVGBackend::new(path, (1400, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let title = match subset {
        Subset::All => "Per-frame F1, all articles",
        Subset::RelevantOnly => "Per-frame F1, articles with relevant images",
    };
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(60)
        .y_label_area_size(50)
        .build_cartesian_2d(0f64..Frame::COUNT as f64, 0f64..100f64)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .disable_x_mesh()
        .x_labels(Frame::COUNT * 2 + 1)
        .x_label_formatter(&|x| {
            let i = x.floor() as usize;
            if (x - i as f64 - 0.5).abs() < 1e-6 {
                Frame::from_index(i).map(|f| f.name().to_string()).unwrap_or_default()
            } else {
                String::new()
            }
        })
        .x_label_style(("sans-serif", 11))
        .y_desc("F1 (%)")
        .draw()
        .map_err(plot_err)?;
    let n = series.len().max(1) as f64;
    let bar = 0.8 / n;
    for (s, r) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let bars = r.aggregate.per_class.iter().enumerate().map(|(i, c)| {
            let x0 = i as f64 + 0.1 + s as f64 * bar;
            Rectangle::new([(x0, 0.0), (x0 + bar, 100.0 * c.f1)], color.filled())
        });
        chart
            .draw_series(bars)
            .map_err(plot_err)?
            .label(r.spec.modality.clone())
            .legend(move |(x, y)| Rectangle::new([(x, y - 5), (x + 10, y + 5)], color.filled()));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .position(SeriesLabelPosition::UpperRight)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}
