//! CSV and JSON renderings of a sweep.

use std::io::{self, Write};

use semcom_core::sim::{SweepPoint, SweepReport};
use serde::Serialize;

use crate::config::ScenarioFile;

pub const CSV_HEADER: &str = "ebn0_db,semantic_error_rate,packet_error_rate,mean_total_distortion,\
mean_encoder_distortion,lemma1_bound,lemma2_bound,trials,ci_semantic,ci_packet";

/// `printf("%.9g", x)`.
pub fn fmt_g9(x: f64) -> String {
    const P: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    // exponent after rounding to P significant digits
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_row(p: &SweepPoint) -> String {
    [
        fmt_g9(p.ebn0_db),
        fmt_g9(p.semantic_error_rate()),
        fmt_g9(p.packet_error_rate()),
        fmt_g9(p.mean_total_distortion()),
        fmt_g9(p.mean_encoder_distortion()),
        fmt_g9(p.lemma1_bound),
        fmt_g9(p.lemma2_bound),
        p.trials.to_string(),
        fmt_g9(p.ci_semantic()),
        fmt_g9(p.ci_packet()),
    ]
    .join(",")
}

pub fn write_csv(report: &SweepReport, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for p in &report.points {
        writeln!(w, "{}", csv_row(p))?;
    }
    Ok(())
}

pub fn to_csv(report: &SweepReport) -> String {
    let mut buf = Vec::new();
    write_csv(report, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

#[derive(Debug, Serialize)]
struct PointJson {
    ebn0_db: Option<f64>,
    trials: u64,
    semantic_errors: u64,
    packets: u64,
    packet_errors: u64,
    semantic_error_rate: f64,
    packet_error_rate: f64,
    mean_total_distortion: f64,
    mean_encoder_distortion: f64,
    lemma1_bound: f64,
    lemma2_bound: f64,
    ci_semantic: f64,
    ci_packet: f64,
    low_event_count: bool,
}

#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    scenario_id: String,
    scenario: &'a ScenarioFile,
    points: Vec<PointJson>,
}

/// JSON document with the full scenario for provenance. The noiseless grid
/// point is written with `ebn0_db: null`.
pub fn to_json(scenario: &ScenarioFile, report: &SweepReport) -> String {
    let doc = ReportJson {
        scenario_id: format!("{:016x}", report.scenario_id),
        scenario,
        points: report
            .points
            .iter()
            .map(|p| PointJson {
                ebn0_db: p.ebn0_db.is_finite().then_some(p.ebn0_db),
                trials: p.trials,
                semantic_errors: p.semantic_errors,
                packets: p.packets,
                packet_errors: p.packet_errors,
                semantic_error_rate: p.semantic_error_rate(),
                packet_error_rate: p.packet_error_rate(),
                mean_total_distortion: p.mean_total_distortion(),
                mean_encoder_distortion: p.mean_encoder_distortion(),
                lemma1_bound: p.lemma1_bound,
                lemma2_bound: p.lemma2_bound,
                ci_semantic: p.ci_semantic(),
                ci_packet: p.ci_packet(),
                low_event_count: p.low_event_count(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_matches_printf() {
        // expected strings from C printf("%.9g")
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.35355339059327373, "0.353553391"),
            (0.1761789017337687, "0.176178902"),
            (602112.0, "602112"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (9.9999999996, "10"),
            (0.99999999996, "1"),
            (f64::INFINITY, "inf"),
            (1e100, "1e+100"),
            (0.9998937, "0.9998937"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g9(x), s, "{x}");
        }
    }

    #[test]
    fn header_has_ten_columns() {
        assert_eq!(CSV_HEADER.split(',').count(), 10);
    }
}
