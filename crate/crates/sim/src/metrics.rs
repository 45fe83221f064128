//! Per-round metrics rows and their CSV / JSON-lines rendering.
//!
//! Real numbers are printed with six significant digits in the style of C's
//! `%g`, so output is byte-stable across platforms.

use std::fmt::Write as _;

use offload_core::{Decision, SimTrace};

pub const CSV_HEADER: &str = "round,decision,n,tc_estimate,skewness,elapsed,energy,deadline_met";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub round: usize,
    pub split: bool,
    pub n: usize,
    pub tc_estimate: Option<f64>,
    pub skewness: Option<f64>,
    pub elapsed: f64,
    pub energy: f64,
    pub deadline_met: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub rounds: usize,
    pub split_rate: f64,
    pub deadline_miss_rate: f64,
    pub mean_energy: f64,
}

impl Summary {
    pub fn from_rows(rows: &[MetricsRow]) -> Self {
        let n = rows.len().max(1) as f64;
        Summary {
            rounds: rows.len(),
            split_rate: rows.iter().filter(|r| r.split).count() as f64 / n,
            deadline_miss_rate: rows.iter().filter(|r| !r.deadline_met).count() as f64 / n,
            mean_energy: rows.iter().map(|r| r.energy).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
    pub summary: Summary,
}

impl MetricsReport {
    pub fn from_trace(trace: &SimTrace) -> Self {
        let rows: Vec<MetricsRow> = trace
            .outcomes
            .iter()
            .map(|o| MetricsRow {
                round: o.round,
                split: matches!(o.plan.decision, Decision::Split(_)),
                n: o.plan.decision.cohort_size(),
                tc_estimate: o.plan.tc_estimate,
                skewness: o.plan.skewness,
                elapsed: o.elapsed,
                energy: o.energy,
                deadline_met: o.deadline_met,
            })
            .collect();
        let summary = Summary::from_rows(&rows);
        MetricsReport { rows, summary }
    }

    /// True when the stored summary is what the rows say it should be.
    pub fn is_consistent(&self) -> bool {
        Summary::from_rows(&self.rows) == self.summary
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(CSV_HEADER);
                out.push('\n');
                for r in &self.rows {
                    let opt = |v: Option<f64>| v.map(fmt_sig6).unwrap_or_default();
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.round,
                        decision_name(r.split),
                        r.n,
                        opt(r.tc_estimate),
                        opt(r.skewness),
                        fmt_sig6(r.elapsed),
                        fmt_sig6(r.energy),
                        r.deadline_met
                    )
                    .unwrap();
                }
            }
            Format::JsonLines => {
                for r in &self.rows {
                    writeln!(
                        out,
                        "{{\"round\":{},\"decision\":\"{}\",\"n\":{},\"tc_estimate\":{},\
                         \"skewness\":{},\"elapsed\":{},\"energy\":{},\"deadline_met\":{}}}",
                        r.round,
                        decision_name(r.split),
                        r.n,
                        json_num(r.tc_estimate),
                        json_num(r.skewness),
                        json_num(Some(r.elapsed)),
                        json_num(Some(r.energy)),
                        r.deadline_met
                    )
                    .unwrap();
                }
            }
        }
        out
    }
}

fn decision_name(split: bool) -> &'static str {
    if split {
        "split"
    } else {
        "local"
    }
}

fn json_num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => fmt_sig6(x),
        _ => "null".to_string(),
    }
}

pub fn emit_metrics(trace: &SimTrace, format: Format) -> String {
    MetricsReport::from_trace(trace).render(format)
}

/// `%g` with six significant digits: fixed notation for exponents in
/// `-4..6`, scientific otherwise, trailing zeros dropped.
pub fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
