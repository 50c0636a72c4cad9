//! Report writers: `report.csv`, `report.json` and a plain-text table of
//! feature names and p-values.

use std::fmt::Write as _;
use std::io::Write;

use hsicinf::InferenceReport;
use serde_json::{json, Value};

use crate::error::CliResult;

pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TABLE: &str = "report.txt";

pub const CSV_HEADER: [&str; 8] =
    ["feature_index", "feature_name", "hsic", "variance", "v_lower", "v_upper", "p_value", "reject"];

/// `x` rounded to 12 significant digits; fixed notation down to 1e-4,
/// scientific below.
pub fn format_p_value(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (_, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..=0).contains(&exp) {
        let rounded: f64 = sci.parse().expect("round trip");
        format!("{:.*}", (11 - exp) as usize, rounded)
    } else {
        sci
    }
}

/// Full precision, with `inf` / `-inf` for unbounded truncation points.
fn format_float(x: f64) -> String {
    x.to_string()
}

pub fn write_csv<W: Write>(writer: W, report: &InferenceReport) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for f in &report.features {
        w.write_record([
            (f.index + 1).to_string(),
            f.name.clone(),
            format_float(f.hsic),
            format_float(f.variance),
            format_float(f.lower),
            format_float(f.upper),
            format_p_value(f.p_value),
            f.reject.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format_float(x))
    }
}

pub fn to_json(report: &InferenceReport) -> Value {
    let features: Vec<Value> = report
        .features
        .iter()
        .map(|f| {
            json!({
                "feature_index": f.index + 1,
                "feature_name": f.name,
                "hsic": json_float(f.hsic),
                "variance": json_float(f.variance),
                "v_lower": json_float(f.lower),
                "v_upper": json_float(f.upper),
                "p_value": format_p_value(f.p_value),
                "reject": f.reject,
            })
        })
        .collect();
    json!({
        "method": report.method.name(),
        "seed": report.seed,
        "alpha": report.alpha,
        "block_size": report.block_size,
        "n": report.n,
        "d": report.d,
        "splits": {
            "covariance": report.splits.covariance,
            "selection": report.splits.selection,
            "testing": report.splits.testing,
        },
        "features": features,
        "warnings": report.warnings,
    })
}

pub fn write_json<W: Write>(mut writer: W, report: &InferenceReport) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut writer, &to_json(report)).map_err(std::io::Error::from)?;
    writeln!(writer)?;
    Ok(())
}

/// Two-column table: feature name and p-value, one row per selected
/// feature in selection order.
pub fn format_table(report: &InferenceReport) -> String {
    let width = report.features.iter().map(|f| f.name.chars().count()).max().unwrap_or(0).max("Feature".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} (n = {}, d = {}, k = {}, B = {}, alpha = {}, seed = {})",
        report.method,
        report.n,
        report.d,
        report.features.len(),
        report.block_size,
        report.alpha,
        report.seed
    );
    let _ = writeln!(out, "{:<width$}  p-value", "Feature");
    let _ = writeln!(out, "{}", "-".repeat(width + 2 + 18));
    for f in &report.features {
        let mark = if f.reject { " *" } else { "" };
        let _ = writeln!(out, "{:<width$}  {}{}", f.name, format_p_value(f.p_value), mark);
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_digits() {
        assert_eq!(format_p_value(0.033), "0.0330000000000");
        assert_eq!(format_p_value(1.0), "1.00000000000");
        assert_eq!(format_p_value(0.5), "0.500000000000");
        assert_eq!(format_p_value(1.234567890123456e-7), "1.23456789012e-7");
        assert_eq!(format_p_value(0.0), "0");
        assert_eq!(format_p_value(0.99999999999999), "1.00000000000");
    }

    #[test]
    fn twelve_significant_digits() {
        for &x in &[0.123456789012345, 0.000987654321098765, 0.04, 3.3e-12] {
            let s = format_p_value(x);
            let digits: String = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
            assert_eq!(digits.trim_start_matches('0').len(), 12, "{s}");
            let back: f64 = s.parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }
}
