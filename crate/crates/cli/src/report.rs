//! Report rendering: CSV, JSON lines and a fixed-width table, all built from
//! one column list so the three formats agree field for field. Floats are
//! written with 6 significant digits.

use cgsim_core::SimReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    JsonLines,
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json-lines" => Ok(Self::JsonLines),
            "table" => Ok(Self::Table),
            other => Err(format!(
                "unknown format '{other}' (csv | json-lines | table)"
            )),
        }
    }
}

/// One emitted result row: scenario identity plus the simulation report,
/// optionally tagged with the sweep coordinate and the exact-oracle value.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario_id: String,
    pub scheme: String,
    pub t: u64,
    pub k: u32,
    pub gap: Option<u64>,
    pub epsilon: f64,
    pub collision: f64,
    pub packets: u64,
    pub seed: u64,
    pub report: SimReport,
    pub sweep: Option<(String, String)>,
    pub exact_reliability: Option<f64>,
}

/// Formats with 6 significant digits, plain notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn cell(value: CellValue) -> String {
    match value {
        CellValue::Text(s) => s,
        CellValue::Int(i) => i.to_string(),
        CellValue::Float(f) => sig6(f),
        CellValue::Missing => String::new(),
    }
}

enum CellValue {
    Text(String),
    Int(u64),
    Float(f64),
    Missing,
}

fn columns(row: &ReportRow) -> Vec<(&'static str, CellValue)> {
    let mut cols: Vec<(&'static str, CellValue)> = Vec::with_capacity(21);
    if let Some((param, value)) = &row.sweep {
        cols.push(("sweep_param", CellValue::Text(param.clone())));
        cols.push(("sweep_value", CellValue::Text(value.clone())));
    }
    cols.extend([
        ("scenario_id", CellValue::Text(row.scenario_id.clone())),
        ("scheme", CellValue::Text(row.scheme.clone())),
        ("T", CellValue::Int(row.t)),
        ("K", CellValue::Int(row.k as u64)),
        ("gap", row.gap.map_or(CellValue::Missing, CellValue::Int)),
        ("epsilon", CellValue::Float(row.epsilon)),
        ("collision", CellValue::Float(row.collision)),
        ("packets", CellValue::Int(row.packets)),
        ("seed", CellValue::Int(row.seed)),
        ("reliability", CellValue::Float(row.report.reliability)),
        ("ci_lo", CellValue::Float(row.report.ci_lo)),
        ("ci_hi", CellValue::Float(row.report.ci_hi)),
        (
            "latency_p50_slots",
            CellValue::Int(row.report.latency_slots.p50),
        ),
        (
            "latency_p99_slots",
            CellValue::Int(row.report.latency_slots.p99),
        ),
        (
            "latency_p99_ms",
            CellValue::Float(row.report.latency_ms.p99),
        ),
        (
            "mean_wastage_tos",
            CellValue::Float(row.report.mean_wastage_tos),
        ),
        (
            "tos_per_period",
            CellValue::Int(row.report.tos_allocated_per_period),
        ),
        (
            "shared_reps_used",
            CellValue::Int(row.report.shared_reps_used),
        ),
    ]);
    if row.sweep.is_some() {
        cols.push((
            "exact_reliability",
            row.exact_reliability
                .map_or(CellValue::Missing, CellValue::Float),
        ));
    }
    cols
}

/// Renders the rows in the requested format. Rows must share a shape
/// (all swept or none).
pub fn emit_report(rows: &[ReportRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(rows),
        ReportFormat::JsonLines => emit_json_lines(rows),
        ReportFormat::Table => emit_table(rows),
    }
}

fn emit_csv(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    for (index, row) in rows.iter().enumerate() {
        let cols = columns(row);
        if index == 0 {
            let header: Vec<&str> = cols.iter().map(|(name, _)| *name).collect();
            out.push_str(&header.join(","));
            out.push('\n');
        }
        let values: Vec<String> = cols.into_iter().map(|(_, value)| cell(value)).collect();
        out.push_str(&values.join(","));
        out.push('\n');
    }
    out
}

fn emit_json_lines(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let mut object = serde_json::Map::new();
        for (name, value) in columns(row) {
            let json_value = match value {
                CellValue::Text(s) => serde_json::Value::String(s),
                CellValue::Int(i) => serde_json::Value::from(i),
                // Round through the 6-significant-digit form so every format
                // reports identical numbers.
                CellValue::Float(f) => serde_json::Value::from(sig6(f).parse::<f64>().unwrap_or(f)),
                CellValue::Missing => serde_json::Value::Null,
            };
            object.insert(name.to_string(), json_value);
        }
        out.push_str(&serde_json::Value::Object(object).to_string());
        out.push('\n');
    }
    out
}

fn emit_table(rows: &[ReportRow]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let rendered: Vec<Vec<(&'static str, String)>> = rows
        .iter()
        .map(|row| {
            columns(row)
                .into_iter()
                .map(|(name, value)| (name, cell(value)))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = rendered[0]
        .iter()
        .enumerate()
        .map(|(column, (name, _))| {
            rendered
                .iter()
                .map(|row| row[column].1.len())
                .chain(std::iter::once(name.len()))
                .max()
                .unwrap()
        })
        .collect();
    let mut out = String::new();
    let header: Vec<String> = rendered[0]
        .iter()
        .zip(&widths)
        .map(|((name, _), width)| format!("{name:>width$}"))
        .collect();
    out.push_str(&header.join("  "));
    out.push('\n');
    for row in &rendered {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|((_, value), width)| format!("{value:>width$}"))
            .collect();
        out.push_str(&cells.join("  "));
        out.push('\n');
    }
    out
}
