//! Certificate files, partition dumps and trajectory CSV.

use std::fmt::Write as _;

use lyapcert_core::cones::Simplex;
use lyapcert_core::conic::{ConicCertificate, PartitionedSection, RationalCandidate};
use lyapcert_core::flow::Trajectory;
use lyapcert_core::oracle::Report;
use lyapcert_core::poly::{parse_polynomial, FloatPoly};
use lyapcert_core::sos::{DecreaseMargin, SosCertificate, Tier};

#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("missing key '{0}'")]
    Missing(&'static str),
}

/// `a,b;c,d`: vertices separated by `;`, coordinates by `,`.
pub fn format_cell(s: &Simplex) -> String {
    s.vertices()
        .iter()
        .map(|v| v.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn format_partitions(parts: &[PartitionedSection]) -> String {
    let mut out = String::new();
    for ps in parts {
        match ps.face {
            None => {
                let _ = writeln!(out, "# section orthant={} cells={}", ps.section.orthant, ps.partition.len());
            }
            Some(i) => {
                let _ = writeln!(out, "# face {} orthant={} cells={}", i + 1, ps.section.orthant, ps.partition.len());
            }
        }
        for cell in ps.partition.cells() {
            let _ = writeln!(out, "{}", format_cell(cell));
        }
    }
    out
}

fn report_lines(out: &mut String, report: &Report) {
    for line in report.summary().lines() {
        let _ = writeln!(out, "verify: {line}");
    }
}

pub fn write_conic(echo: &str, cert: &ConicCertificate, report: &Report) -> String {
    let mut out = String::from("# lyapcert certificate\nkind: conic\n");
    out.push_str(echo);
    let _ = writeln!(out, "d: {}", cert.d);
    let _ = writeln!(out, "r: {}", cert.candidate.r);
    let _ = writeln!(out, "h: {}", cert.candidate.h);
    let _ = writeln!(out, "margin: {:?}", cert.margin);
    let _ = writeln!(out, "sweeps: {}", cert.sweeps);
    let _ = writeln!(out, "lp_rows: {}", cert.lp_rows);
    let _ = writeln!(out, "lp_pivots: {}", cert.lp_pivots);
    let _ = writeln!(out, "corner_conservative: {}", cert.corner_conservative);
    for line in format_partitions(&cert.partitions).lines() {
        match line.strip_prefix("# ") {
            Some(header) => {
                let _ = writeln!(out, "partition: {header}");
            }
            None => {
                let _ = writeln!(out, "cell: {line}");
            }
        }
    }
    report_lines(&mut out, report);
    let _ = writeln!(out, "oracle: {}", if report.pass() { "PASS" } else { "FAIL" });
    out
}

fn margin_text(m: &DecreaseMargin) -> String {
    match m {
        DecreaseMargin::None => "none".into(),
        DecreaseMargin::Power { eps, q } => format!("{eps:?}*|x|^{}", 2 * q),
    }
}

pub fn write_sos(echo: &str, cert: &SosCertificate, report: &Report) -> String {
    let mut out = String::from("# lyapcert certificate\nkind: sos\n");
    out.push_str(echo);
    let _ = writeln!(out, "tier: {}", if cert.tier == Tier::Sdp { "sdp" } else { "dsos" });
    let _ = writeln!(out, "deg: {}", cert.deg_v);
    let _ = writeln!(out, "slack: {}", cert.slack);
    let _ = writeln!(out, "eps_pd: {:?}", cert.eps_pd);
    let _ = writeln!(out, "decrease_margin: {}", margin_text(&cert.margin));
    let _ = writeln!(out, "weak_decrease: {}", cert.weak_decrease);
    let _ = writeln!(out, "decrease_region: all of S");
    let _ = writeln!(out, "V: {}", cert.v);
    let _ = writeln!(out, "t: {:?}", cert.t);
    let _ = writeln!(out, "max_residual: {:?}", cert.max_residual());
    let _ = writeln!(out, "min_gram_eigenvalue: {:?}", cert.min_gram_eigenvalue());
    for (name, r) in &cert.residuals {
        let _ = writeln!(out, "residual {name}: {r:?}");
    }
    for m in &cert.multipliers {
        let _ = writeln!(out, "multiplier {}: {}", m.label, m.polynomial);
        let _ = writeln!(out, "min_eig {}: {:?}", m.label, m.min_eigenvalue);
    }
    for (label, p) in &cert.free {
        let _ = writeln!(out, "multiplier {label}: {p}");
    }
    report_lines(&mut out, report);
    let _ = writeln!(out, "oracle: {}", if report.pass() { "PASS" } else { "FAIL" });
    out
}

/// The candidate stored in a certificate file.
#[derive(Clone, Debug, PartialEq)]
pub enum StoredCandidate {
    Conic(RationalCandidate),
    Sos(FloatPoly),
}

pub fn read_candidate(text: &str, dim: usize) -> Result<StoredCandidate, CertificateError> {
    let mut kind = None;
    let mut h = None;
    let mut r = None;
    let mut v = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap_or("");
        let Some((key, value)) = content.split_once(':') else { continue };
        let value = value.trim();
        let parse = |s: &str| {
            parse_polynomial(s, dim)
                .map(|p| p.to_f64())
                .map_err(|e| CertificateError::Format { line: line_no, message: e.to_string() })
        };
        match key.trim() {
            "kind" => kind = Some(value.to_string()),
            "h" => h = Some(parse(value)?),
            "V" => v = Some(parse(value)?),
            "r" => {
                r = Some(value.parse::<u32>().map_err(|_| CertificateError::Format {
                    line: line_no,
                    message: format!("invalid r '{value}'"),
                })?)
            }
            _ => {}
        }
    }
    match kind.as_deref() {
        Some("conic") => {
            let h = h.ok_or(CertificateError::Missing("h"))?;
            let r = r.ok_or(CertificateError::Missing("r"))?;
            RationalCandidate::new(h, r)
                .map(StoredCandidate::Conic)
                .map_err(|e| CertificateError::Format { line: 0, message: e.to_string() })
        }
        Some("sos") => Ok(StoredCandidate::Sos(v.ok_or(CertificateError::Missing("V"))?)),
        _ => Err(CertificateError::Missing("kind")),
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",eta{i}");
    }
    if traj.v_values.is_some() {
        out.push_str(",V");
    }
    out.push('\n');
    for k in 0..traj.len() {
        let _ = write!(out, "{}", traj.times[k]);
        for v in traj.states[k].iter().chain(&traj.eta_log[k]) {
            let _ = write!(out, ",{v}");
        }
        if let Some(vals) = &traj.v_values {
            let _ = write!(out, ",{}", vals[k]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header() {
        let traj = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![vec![1.0, 2.0], vec![0.5, 1.0]],
            eta_log: vec![vec![0.0, 0.0], vec![0.0, -1.0]],
            v_values: Some(vec![5.0, 1.25]),
        };
        let csv = trajectory_csv(&traj);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x1,x2,eta1,eta2,V"));
        assert_eq!(lines.next(), Some("0,1,2,0,0,5"));
        assert_eq!(lines.next(), Some("0.5,0.5,1,0,-1,1.25"));
    }

    #[test]
    fn cell_format() {
        let s = Simplex::new(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap();
        assert_eq!(format_cell(&s), "0.8,0.2;0.2,0.8");
    }

    #[test]
    fn candidate_round_trip() {
        let text = "kind: conic\nr: 1\nh: 2.9*x1^2 + 1*x1*x2 + 1*x2^2\n";
        let StoredCandidate::Conic(c) = read_candidate(text, 2).unwrap() else { panic!() };
        assert_eq!(c.r, 1);
        assert_eq!(c.h.eval(&[1.0, 0.0]), 2.9);
        assert!(matches!(read_candidate("kind: sos\n", 2), Err(CertificateError::Missing("V"))));
    }
}
