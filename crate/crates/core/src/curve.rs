//! CSV export of squeezing sweeps.
//!
//! One row per (grid point, party), plus two marker rows per grid point
//! labelled `best=<party>` and `worst=<party>` that repeat that party's
//! values. Rows are sorted by `db`, then by label as a string.

use std::fmt::Write as _;

use crate::channel::{PartyQuality, SqueezeGridPoint};
use crate::{Error, Result};

pub const HEADER: &str = "db,r,party,nu_max,fidelity,class";

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub db: f64,
    pub r: f64,
    pub party: String,
    pub nu_max: f64,
    pub fidelity: f64,
    pub class: String,
}

/// `printf("%.9g")`: nine significant digits, trailing zeros removed.
pub fn format_g9(x: f64) -> String {
    const P: i32 = 9;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row(point: &SqueezeGridPoint, label: String, q: &PartyQuality) -> CurveRow {
    CurveRow {
        db: point.db,
        r: point.r,
        party: label,
        nu_max: q.nu_max,
        fidelity: q.fidelity,
        class: q.class.as_str().to_string(),
    }
}

pub fn curve_rows(points: &[SqueezeGridPoint]) -> Vec<CurveRow> {
    let mut rows = Vec::new();
    for p in points {
        for q in &p.parties {
            rows.push(row(p, q.party.label(), q));
        }
        rows.push(row(p, format!("best={}", p.best.label()), p.best_quality()));
        rows.push(row(p, format!("worst={}", p.worst.label()), p.worst_quality()));
    }
    rows.sort_by(|a, b| a.db.total_cmp(&b.db).then_with(|| a.party.cmp(&b.party)));
    rows
}

pub fn to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_g9(r.db),
            format_g9(r.r),
            r.party,
            format_g9(r.nu_max),
            format_g9(r.fidelity),
            r.class
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(Error::Validation(format!("curve file must start with '{HEADER}'")));
    }
    let num = |s: &str, line: usize| {
        s.parse::<f64>().map_err(|_| Error::Validation(format!("line {line}: bad number '{s}'")))
    };
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(Error::Validation(format!("line {line}: expected 6 fields, got {}", f.len())));
            }
            Ok(CurveRow {
                db: num(f[0], line)?,
                r: num(f[1], line)?,
                party: f[2].to_string(),
                nu_max: num(f[3], line)?,
                fidelity: num(f[4], line)?,
                class: f[5].to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_matches_printf() {
        // reference strings from C printf("%.9g")
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (40.0, "40"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (135.06184236415496, "135.061842"),
            (0.00016623627843821977, "0.000166236278"),
            (1.2345e-5, "1.2345e-05"),
            (123456789.0, "123456789"),
            (1234567891.0, "1.23456789e+09"),
            (-2.5, "-2.5"),
            (0.999999999999, "1"),
            (9.9999999996, "10"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g9(x), s, "{x}");
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_csv("a,b\n").is_err());
        assert!(parse_csv(&format!("{HEADER}\n1,2,3\n")).is_err());
        assert_eq!(parse_csv(&format!("{HEADER}\n")).unwrap().len(), 0);
    }
}
