//! Fixed-schema CSV for experiment reports.

use std::io::{self, Write};

use netsim::{ExperimentReport, PointReport};

pub const HEADER: [&str; 14] = [
    "model",
    "N",
    "c",
    "alpha",
    "rho_p",
    "model_params",
    "mean_rate",
    "std_rate",
    "sem",
    "asymptote",
    "rel_gap",
    "empirical_density",
    "predicted_density",
    "seed",
];

/// Nine significant digits, `%g` style: plain decimal notation for
/// exponents in `[-5, 9)`, scientific otherwise. Non-finite values are empty.
pub fn fmt_sig9(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig9).unwrap_or_default()
}

pub fn row(point: &PointReport, seed: u64) -> Vec<String> {
    let cfg = &point.config;
    vec![
        cfg.model.tag().to_string(),
        cfg.n_branches.to_string(),
        fmt_sig9(cfg.c),
        fmt_sig9(cfg.alpha),
        fmt_sig9(cfg.rho_p),
        cfg.model.params_label(),
        opt(point.rate.map(|r| r.mean)),
        opt(point.rate.and_then(|r| r.std)),
        opt(point.rate.filter(|r| r.std.is_some()).map(|r| r.sem())),
        fmt_sig9(point.asymptote),
        opt(point.rel_gap),
        opt(point.empirical_density),
        fmt_sig9(point.predicted_density),
        seed.to_string(),
    ]
}

pub fn write_report<W: Write>(report: &ExperimentReport, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", HEADER.join(","))?;
    for point in &report.points {
        writeln!(out, "{}", row(point, report.master_seed).join(","))?;
    }
    Ok(())
}

/// One parsed data row; empty numeric fields become `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub model: String,
    pub n_branches: usize,
    pub model_params: String,
    pub mean_rate: Option<f64>,
    pub std_rate: Option<f64>,
    pub asymptote: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct CsvError {
    pub line: usize,
    pub message: String,
}

/// Parses a CSV written by [`write_report`].
pub fn parse(text: &str) -> Result<Vec<Row>, CsvError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(CsvError { line: 1, message: "empty file".into() })?;
    if header.trim_end() != HEADER.join(",") {
        return Err(CsvError { line: 1, message: format!("unexpected header, expected `{}`", HEADER.join(",")) });
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let err = |message: String| CsvError { line: i + 1, message };
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != HEADER.len() {
            return Err(err(format!("expected {} fields, found {}", HEADER.len(), fields.len())));
        }
        let num = |k: usize| -> Result<Option<f64>, CsvError> {
            let f = fields[k].trim();
            if f.is_empty() {
                return Ok(None);
            }
            f.parse::<f64>().map(Some).map_err(|_| err(format!("column `{}`: `{f}` is not a number", HEADER[k])))
        };
        let n_branches = fields[1]
            .trim()
            .parse()
            .map_err(|_| err(format!("column `N`: `{}` is not an integer", fields[1])))?;
        for k in [2, 3, 4, 8, 10, 11, 12] {
            num(k)?;
        }
        rows.push(Row {
            model: fields[0].to_string(),
            n_branches,
            model_params: fields[5].to_string(),
            mean_rate: num(6)?,
            std_rate: num(7)?,
            asymptote: num(9)?,
        });
    }
    if rows.is_empty() {
        return Err(CsvError { line: 2, message: "no data rows".into() });
    }
    Ok(rows)
}
