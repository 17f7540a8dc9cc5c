//! `report`: collects earlier artifacts into a markdown summary with SVG charts.

use std::fmt::Write as _;
use std::path::Path;

use super::schema;
use super::{Command, ExperimentSpec, HarnessError};
use crate::sequential::HistoryEntry;

const CHART_W: f64 = 640.0;
const CHART_H: f64 = 400.0;
const MARGIN: f64 = 56.0;

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    let header = r
        .headers()
        .map_err(|e| HarnessError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(|e| HarnessError::csv(path, e))?.iter().map(str::to_string).collect());
    }
    Ok(Table { header, rows })
}

fn column(table: &Table, name: &str, path: &Path) -> Result<usize, HarnessError> {
    table.header.iter().position(|h| h == name).ok_or_else(|| HarnessError::Csv {
        path: path.to_path_buf(),
        source: csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("missing column `{name}`"),
        )),
    })
}

fn parse_num(s: &str, path: &Path) -> Result<f64, HarnessError> {
    s.parse().map_err(|_| HarnessError::Csv {
        path: path.to_path_buf(),
        source: csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("not a number: `{s}`"),
        )),
    })
}

fn markdown_table(out: &mut String, table: &Table) {
    let _ = writeln!(out, "| {} |", table.header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(table.header.len()));
    for row in &table.rows {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out.push('\n');
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Line chart with a fixed `[0, x_max] x [0, 1]` frame.
fn line_chart(title: &str, x_label: &str, y_label: &str, x_max: f64, series: &[Series], guides: &[(String, f64)]) -> String {
    let px = |x: f64| MARGIN + (CHART_W - 2.0 * MARGIN) * x / x_max;
    let py = |y: f64| CHART_H - MARGIN - (CHART_H - 2.0 * MARGIN) * y;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CHART_W}" height="{CHART_H}" viewBox="0 0 {CHART_W} {CHART_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, CHART_W / 2.0);

    let _ = writeln!(s, r#"<g class="x-axis" data-min="0" data-max="{x_max}">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        px(0.0),
        py(0.0),
        px(x_max),
        py(0.0)
    );
    for i in 0..=5 {
        let x = x_max * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(x),
            py(0.0) + 16.0,
            (x * 100.0).round() / 100.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text></g>"#,
        CHART_W / 2.0,
        CHART_H - 12.0
    );

    let _ = writeln!(s, r#"<g class="y-axis" data-min="0" data-max="1">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        px(0.0),
        py(0.0),
        px(0.0),
        py(1.0)
    );
    for i in 0..=4 {
        let y = i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y}</text>"#, px(0.0) - 6.0, py(y) + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text></g>"#,
        CHART_H / 2.0,
        CHART_H / 2.0
    );

    for (label, y) in guides {
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{:.1}" x2="{}" y2="{:.1}" stroke="gray" stroke-dasharray="4 4"/><text x="{}" y="{:.1}" fill="gray">{label}</text>"#,
            px(0.0),
            py(*y),
            px(x_max),
            py(*y),
            px(x_max) + 4.0,
            py(*y) + 4.0
        );
    }
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            ser.name
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            px(0.0) + 8.0,
            MARGIN + 14.0 * k as f64,
            ser.name
        );
    }
    s.push_str("</svg>\n");
    s
}

fn read_history(path: &Path) -> Result<Vec<HistoryEntry>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| HarnessError::json(path, e)))
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Which experiment outputs were found and summarised.
pub fn cmd_report(spec: &ExperimentSpec) -> Result<Vec<Command>, HarnessError> {
    let dir = &spec.output_dir;
    let groups = [Command::Validate, Command::Boundary, Command::Calibrate, Command::Sweep];
    let mut present = Vec::new();
    for g in groups {
        let files = schema::expected_outputs(g);
        let missing: Vec<String> = files
            .iter()
            .filter(|f| !dir.join(f).is_file())
            .map(|f| f.to_string())
            .collect();
        if missing.is_empty() {
            present.push(g);
        } else if missing.len() < files.len() {
            return Err(HarnessError::MissingInputs {
                dir: dir.clone(),
                missing,
            });
        }
    }
    if present.is_empty() {
        let all = groups
            .iter()
            .flat_map(|g| schema::expected_outputs(*g).iter().map(|f| f.to_string()))
            .collect();
        return Err(HarnessError::MissingInputs {
            dir: dir.clone(),
            missing: all,
        });
    }

    let cfg = spec.config.validation();
    let mut md = String::from("# Deployment approval report\n\n");
    for g in &present {
        match g {
            Command::Validate => {
                let log = dir.join(schema::SESSION_LOG);
                let history = read_history(&log)?;
                let last = history.last().ok_or_else(|| HarnessError::MissingInputs {
                    dir: dir.clone(),
                    missing: vec![format!("{} (empty)", schema::SESSION_LOG)],
                })?;
                let summary_path = dir.join(schema::SUMMARY);
                let text = std::fs::read_to_string(&summary_path).map_err(|e| HarnessError::io(&summary_path, e))?;
                let summary: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| HarnessError::json(&summary_path, e))?;
                let field = |k: &str| summary.get(k).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default();

                let _ = writeln!(md, "## Validation session\n");
                let _ = writeln!(md, "- policy: {}", field("policy"));
                let _ = writeln!(md, "- final decision: {}", last.decision);
                let _ = writeln!(md, "- status: {}", field("status"));
                let _ = writeln!(md, "- rollouts: {} ({} safe, {} unsafe)", last.n, last.successes, last.failures);
                let _ = writeln!(md, "- approval probability: {}", last.q);
                let _ = writeln!(md, "- validation saving: {}", field("validation_saving"));
                let _ = writeln!(md, "\n![approval trace]({})\n", schema::TRACE_CHART);

                let x_max = f64::from(cfg.n_max.max(last.n));
                let chart = line_chart(
                    "Approval probability during validation",
                    "rollouts n",
                    "q_n",
                    x_max,
                    &[Series {
                        name: "q_n".into(),
                        points: history.iter().map(|e| (f64::from(e.n), e.q)).collect(),
                    }],
                    &[("approve".into(), cfg.tau_a), ("reject".into(), cfg.tau_r)],
                );
                write_file(&dir.join(schema::TRACE_CHART), &chart)?;
            }
            Command::Boundary => {
                let path = dir.join(schema::BOUNDARY);
                let table = read_table(&path)?;
                let (ip, is, iq, inn) = (
                    column(&table, "p0", &path)?,
                    column(&table, "successes", &path)?,
                    column(&table, "q", &path)?,
                    column(&table, "n", &path)?,
                );
                let mut series: Vec<Series> = Vec::new();
                let mut x_max: f64 = 1.0;
                for row in &table.rows {
                    let name = format!("p0 = {}", row[ip]);
                    x_max = x_max.max(parse_num(&row[inn], &path)?);
                    let point = (parse_num(&row[is], &path)?, parse_num(&row[iq], &path)?);
                    match series.iter_mut().find(|s| s.name == name) {
                        Some(s) => s.points.push(point),
                        None => series.push(Series {
                            name,
                            points: vec![point],
                        }),
                    }
                }
                let chart = line_chart(
                    "Approval probability at the horizon",
                    "safe rollouts S",
                    "q",
                    x_max,
                    &series,
                    &[("approve".into(), cfg.tau_a)],
                );
                write_file(&dir.join(schema::BOUNDARY_CHART), &chart)?;

                let _ = writeln!(md, "## Approval boundary\n");
                markdown_table(&mut md, &read_table(&dir.join(schema::BOUNDARY_MINIMUM))?);
                let _ = writeln!(md, "![approval boundary]({})\n", schema::BOUNDARY_CHART);
            }
            Command::Calibrate => {
                let _ = writeln!(md, "## Calibration\n");
                markdown_table(&mut md, &read_table(&dir.join(schema::CALIBRATION))?);
            }
            Command::Sweep => {
                let _ = writeln!(md, "## Checkpoint sweep\n\n### Decisions\n");
                markdown_table(&mut md, &read_table(&dir.join(schema::DECISION_TABLE))?);
                let _ = writeln!(md, "### Stopping\n");
                markdown_table(&mut md, &read_table(&dir.join(schema::STOPPING_TABLE))?);
                let _ = writeln!(md, "### Capability\n");
                markdown_table(&mut md, &read_table(&dir.join(schema::CAPABILITY_TABLE))?);
            }
            Command::Report => {}
        }
    }
    write_file(&dir.join(schema::REPORT), &md)?;
    Ok(present)
}
