//! Deterministic CSV and JSON output with 17 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::hopf::{AmplitudeTrajectory, HopfPoint, OnsetReport};
use crate::simulator::{AttractorClass, ConcentrationState, Trajectory};
use crate::spectral::{RootSet, SweepRow};
use crate::steady::SteadyStateSolution;

/// Scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Writes a header line followed by one comma-separated line per row.
pub fn write_csv<I, R>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.as_ref().join(","));
        out.push('\n');
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    write_csv(
        path,
        "t,M,P",
        traj.times
            .iter()
            .zip(&traj.mass_m)
            .zip(&traj.mass_p)
            .map(|((t, m), p)| [num(*t), num(*m), num(*p)]),
    )
}

pub fn write_snapshot(path: &Path, x: &[f64], state: &ConcentrationState) -> Result<()> {
    write_csv(
        path,
        "x,m,p",
        x.iter()
            .zip(&state.m)
            .zip(&state.p)
            .map(|((x, m), p)| [num(*x), num(*m), num(*p)]),
    )
}

pub fn write_profile(path: &Path, sol: &SteadyStateSolution) -> Result<()> {
    write_csv(
        path,
        "x,m_star,p_star",
        sol.x
            .iter()
            .zip(&sol.m_profile)
            .zip(&sol.p_profile)
            .map(|((x, m), p)| [num(*x), num(*m), num(*p)]),
    )
}

pub const STEADY_SUMMARY_HEADER: &str = "D,p_at_gene,residual";

pub fn steady_summary_row(sol: &SteadyStateSolution) -> String {
    [num(sol.d), num(sol.p_at_gene), num(sol.residual)].join(",")
}

pub fn write_roots(path: &Path, sets: &[RootSet]) -> Result<()> {
    write_csv(
        path,
        "D,re_lambda,im_lambda,residual,re_Rprime,im_Rprime",
        sets.iter().flat_map(|s| {
            s.roots.iter().map(move |r| {
                [
                    num(s.d),
                    num(r.lambda.re),
                    num(r.lambda.im),
                    num(r.residual),
                    num(r.r_prime.re),
                    num(r.r_prime.im),
                ]
            })
        }),
    )
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_csv(
        path,
        "D,max_re_lambda,unstable_count",
        rows.iter()
            .map(|r| [num(r.d), num(r.max_re), r.unstable.to_string()]),
    )
}

pub fn write_amplitude(path: &Path, traj: &AmplitudeTrajectory) -> Result<()> {
    write_csv(
        path,
        "T,re_A,im_A,abs_A",
        traj.t
            .iter()
            .zip(&traj.a)
            .map(|(t, a)| [num(*t), num(a.re), num(a.im), num(a.norm())]),
    )
}

pub fn write_onset(path: &Path, report: &OnsetReport) -> Result<()> {
    let rows = report
        .rows
        .iter()
        .map(|r| ("unstable", r))
        .chain(report.stable_side.iter().map(|r| ("stable", r)));
    write_csv(
        path,
        "side,offset,D,amplitude,kind,period",
        rows.map(|(side, r)| {
            [
                side.to_string(),
                num(r.offset),
                num(r.d),
                num(r.amplitude),
                r.kind.as_str().to_string(),
                r.period.map(num).unwrap_or_default(),
            ]
        }),
    )
}

/// JSON value for the small fixed-order documents this crate emits.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Num(f64),
    Int(i64),
    Str(String),
    Null,
}

impl Json {
    fn render(&self, out: &mut String) {
        match self {
            Json::Num(x) if x.is_finite() => out.push_str(&num(*x)),
            Json::Num(_) | Json::Null => out.push_str("null"),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
        }
    }
}

/// Renders `{"k": v, ...}` in the given key order on one line.
pub fn json_object(fields: &[(&str, Json)]) -> String {
    let mut out = String::from("{");
    for (i, (k, v)) in fields.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        Json::Str((*k).to_string()).render(&mut out);
        out.push_str(": ");
        v.render(&mut out);
    }
    out.push('}');
    out
}

pub fn hopf_fields(h: &HopfPoint) -> Vec<(&'static str, Json)> {
    vec![
        ("j", Json::Int(h.j as i64)),
        ("D_c", Json::Num(h.critical.d_c)),
        ("omega_c", Json::Num(h.critical.omega_c)),
        ("period", Json::Num(h.critical.period())),
        ("dlambda_dD_re", Json::Num(h.a.re)),
        ("dlambda_dD_im", Json::Num(h.a.im)),
        ("b_re", Json::Num(h.b.re)),
        ("b_im", Json::Num(h.b.im)),
        ("classification", Json::Str(h.classification.as_str().to_string())),
    ]
}

pub fn hopf_json(h: &HopfPoint) -> String {
    json_object(&hopf_fields(h))
}

pub fn classification_json(d: f64, class: &AttractorClass) -> String {
    json_object(&[
        ("D", Json::Num(d)),
        ("kind", Json::Str(class.kind.as_str().to_string())),
        ("relative_amplitude", Json::Num(class.relative_amplitude)),
        ("sustain_ratio", Json::Num(class.sustain_ratio)),
        ("period", class.period.map(Json::Num).unwrap_or(Json::Null)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-3.0), "-3.0000000000000000e0");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        let back: f64 = num(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn json_keeps_order_and_escapes() {
        let s = json_object(&[
            ("b", Json::Int(2)),
            ("a", Json::Str("x\"y".into())),
            ("c", Json::Num(f64::NAN)),
        ]);
        assert_eq!(s, r#"{"b": 2, "a": "x\"y", "c": null}"#);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_sweep(&p, &[SweepRow { d: 1e-3, max_re: 0.5, unstable: 1 }]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "D,max_re_lambda,unstable_count\n1.0000000000000000e-3,5.0000000000000000e-1,1\n");
    }
}
