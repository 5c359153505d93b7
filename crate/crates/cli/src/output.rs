use std::fs;
use std::io::{self, Write};
use std::path::Path;

use lognsum::DistributionCurve;

/// Formats `v` like C's `printf("%.12g", v)`.
pub fn g12(v: f64) -> String {
    const P: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    // the exponent after rounding to P significant digits decides the style
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, v);
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

/// A CSV document: `#` metadata lines, a header row and numeric rows.
pub struct Table {
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// One row per grid point; a column with standard errors is followed by
    /// a `<name>_stderr` column, or plain `stderr` when it is the only one.
    pub fn from_curve(curve: &DistributionCurve, metadata: Vec<String>) -> Self {
        let single = curve.columns.len() == 1;
        let mut header = vec!["gamma".to_string()];
        for c in &curve.columns {
            header.push(c.name.clone());
            if c.stderr.is_some() {
                header.push(if single { "stderr".into() } else { format!("{}_stderr", c.name) });
            }
        }
        let rows = (0..curve.gammas.len())
            .map(|i| {
                let mut row = vec![curve.gammas[i]];
                for c in &curve.columns {
                    row.push(c.values[i]);
                    if let Some(se) = &c.stderr {
                        row.push(se[i]);
                    }
                }
                row
            })
            .collect();
        Self {
            metadata,
            header,
            rows,
        }
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        for m in &self.metadata {
            writeln!(w, "# {m}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| g12(v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()
    }

    pub fn write_file(&self, path: &Path) -> io::Result<()> {
        let file = fs::File::create(path)?;
        self.write_to(io::BufWriter::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.75, "0.75"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5e-300, "-2.5e-300"),
            (999999999999.5, "1e+12"),
            (0.0, "0"),
            (f64::NAN, "nan"),
            (f64::INFINITY, "inf"),
        ];
        for (v, want) in cases {
            assert_eq!(g12(v), want, "{v:e}");
        }
    }
}
