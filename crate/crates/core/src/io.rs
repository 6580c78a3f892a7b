//! CSV serialization of trajectories, window records and phase portraits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{EigenPair, Mat2};
use crate::pipeline::{WindowEstimate, WindowRecord};
use crate::sde::TimeSeriesFrame;
use crate::var::LogMethod;

pub const TRAJECTORY_HEADER: &str = "t,x,y,lambda";

pub const RECORDS_HEADER: &str = "end_time,end_lambda,re_mu1,im_mu1,re_mu2,im_mu2,se_re_mu1,se_re_mu2,is_complex_pair,method,ar1_x,ar1_y,ar1_rate_x,ar1_rate_y,analytic_re_mu1,analytic_re_mu2,a11,a12,a21,a22,se_a11,se_a12,se_a21,se_a22,failed";

pub const PORTRAIT_HEADER: &str = "set,x,y";

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// exponent form outside `[1e-4, 1e17)`.
pub fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => fmt_g17(x),
        _ => String::new(),
    }
}

pub fn trajectory_csv(frame: &TimeSeriesFrame) -> String {
    let mut out = String::with_capacity(frame.len() * 80);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for i in 0..frame.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_g17(frame.t[i]),
            fmt_g17(frame.x[i]),
            fmt_g17(frame.y[i]),
            fmt_g17(frame.lambda[i])
        );
    }
    out
}

fn record_row(r: &WindowRecord) -> String {
    let e = r.estimate.as_ref();
    let mut fields: Vec<String> = vec![fmt_g17(r.end_time), fmt_g17(r.end_lambda)];
    match e {
        Some(e) => {
            fields.push(fmt_g17(e.eigen.mu1.re));
            fields.push(fmt_g17(e.eigen.mu1.im));
            fields.push(fmt_g17(e.eigen.mu2.re));
            fields.push(fmt_g17(e.eigen.mu2.im));
            fields.push(opt(e.se_re_mu.map(|s| s[0])));
            fields.push(opt(e.se_re_mu.map(|s| s[1])));
            fields.push(u8::from(e.eigen.is_complex_pair).to_string());
            fields.push(e.method.name().to_string());
        }
        None => fields.extend(std::iter::repeat_n(String::new(), 8)),
    }
    fields.extend(r.ar1.iter().map(|v| opt(*v)));
    fields.extend(r.ar1_rate.iter().map(|v| opt(*v)));
    fields.push(opt(r.analytic_re.map(|a| a[0])));
    fields.push(opt(r.analytic_re.map(|a| a[1])));
    match e {
        Some(e) => {
            for m in [&e.a_hat, &e.se_a] {
                for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    fields.push(fmt_g17(m[(i, j)]));
                }
            }
        }
        None => fields.extend(std::iter::repeat_n(String::new(), 8)),
    }
    fields.push(u8::from(r.failed()).to_string());
    fields.join(",")
}

pub fn records_csv(records: &[WindowRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 400);
    out.push_str(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_row(r));
        out.push('\n');
    }
    out
}

fn parse_opt(field: &str, line: usize, name: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse::<f64>().map(Some).map_err(|_| Error::Parse {
        line,
        reason: format!("column `{name}`: cannot parse `{field}` as a number"),
    })
}

/// Parses a records CSV written by [`records_csv`]. Failed rows come back
/// with `estimate = None` and no failure detail.
pub fn parse_records_csv(text: &str) -> Result<Vec<WindowRecord>> {
    let mut lines = text.lines().enumerate();
    let columns: Vec<&str> = RECORDS_HEADER.split(',').collect();
    match lines.next() {
        Some((_, h)) if h.trim() == RECORDS_HEADER => {}
        Some((_, h)) => {
            let got: Vec<&str> = h.trim().split(',').collect();
            let bad = columns
                .iter()
                .zip(got.iter().chain(std::iter::repeat(&"")))
                .find(|(want, have)| want != have)
                .map(|(want, _)| *want)
                .unwrap_or("<extra column>");
            return Err(Error::Parse {
                line: 1,
                reason: format!("header mismatch at column `{bad}`"),
            });
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                reason: "empty file".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != columns.len() {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("expected {} fields, got {}", columns.len(), f.len()),
            });
        }
        let num = |k: usize| parse_opt(f[k], lineno, columns[k]);
        let req = |k: usize| {
            num(k)?.ok_or_else(|| Error::Parse {
                line: lineno,
                reason: format!("column `{}` is empty", columns[k]),
            })
        };
        let failed = match f[24] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("column `failed`: expected 0 or 1, got `{other}`"),
                })
            }
        };
        let estimate = if failed {
            None
        } else {
            let (re1, im1, re2, im2) = (req(2)?, req(3)?, req(4)?, req(5)?);
            let is_complex = match f[8] {
                "1" => true,
                "0" => false,
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        reason: format!("column `is_complex_pair`: expected 0 or 1, got `{other}`"),
                    })
                }
            };
            let eigen = EigenPair {
                mu1: num_complex::Complex64::new(re1, im1),
                mu2: num_complex::Complex64::new(re2, im2),
                is_complex_pair: is_complex,
            };
            let method: LogMethod = f[9].parse().map_err(|_| Error::Parse {
                line: lineno,
                reason: format!("column `method`: unknown value `{}`", f[9]),
            })?;
            let se_re_mu = match (num(6)?, num(7)?) {
                (Some(a), Some(b)) => Some([a, b]),
                _ => None,
            };
            let a_hat = Mat2::new(req(16)?, req(17)?, req(18)?, req(19)?);
            let se_a = Mat2::new(req(20)?, req(21)?, req(22)?, req(23)?);
            Some(WindowEstimate {
                eigen,
                method,
                a_hat,
                se_a,
                se_re_mu,
                se_delta: None,
            })
        };
        let analytic_re = match (num(14)?, num(15)?) {
            (Some(a), Some(b)) => Some([a, b]),
            _ => None,
        };
        out.push(WindowRecord {
            end_time: req(0)?,
            end_lambda: req(1)?,
            estimate,
            failure: None,
            ar1: [num(10)?, num(11)?],
            ar1_rate: [num(12)?, num(13)?],
            analytic_re,
        });
    }
    Ok(out)
}

/// Named polyline sets for a phase portrait.
pub fn portrait_csv(sets: &[(String, Vec<[f64; 2]>)]) -> String {
    let mut out = String::from(PORTRAIT_HEADER);
    out.push('\n');
    for (name, pts) in sets {
        for p in pts {
            let _ = writeln!(out, "{name},{},{}", fmt_g17(p[0]), fmt_g17(p[1]));
        }
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(300.0), "300");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        assert_eq!(fmt_g17(123456789.125), "123456789.125");
    }

    #[test]
    fn g17_round_trips() {
        for v in [0.1, 1.0 / 3.0, -7.25e-9, 6.02214076e23, 299.99999999999994] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn header_mismatch_names_column() {
        let err = parse_records_csv("end_time,end_lambda,re_mu_1\n").unwrap_err();
        match err {
            Error::Parse { reason, .. } => assert!(reason.contains("re_mu1"), "{reason}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trajectory_header() {
        let f = TimeSeriesFrame {
            t: vec![0.0, 0.5],
            x: vec![1.0, 2.0],
            y: vec![0.1, 0.2],
            lambda: vec![0.3, 0.25],
            dt_sample: 0.5,
        };
        let csv = trajectory_csv(&f);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x,y,lambda"));
        assert_eq!(
            lines.next(),
            Some("0,1,0.10000000000000001,0.29999999999999999")
        );
    }
}
