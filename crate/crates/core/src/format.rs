//! Fixed numeric formatting shared by the CSV and JSON emitters.
//!
//! Numbers carry 12 significant digits. Magnitudes below 1e-4 (and
//! absurdly large ones) switch to scientific notation. Trailing zeros are
//! trimmed, and negative zero prints as `0`.

use serde_json::Value;

pub const SIGNIFICANT_DIGITS: usize = 12;

const SCI_BELOW: f64 = 1e-4;
const SCI_ABOVE: f64 = 1e15;

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Format `x` with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if !(SCI_BELOW..SCI_ABOVE).contains(&a) {
        let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
        let (mantissa, exp) = s.split_once('e').expect("scientific format has an exponent");
        return format!("{}e{}", trim_fraction(mantissa), exp);
    }
    let magnitude = a.log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let t = trim_fraction(&s);
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

/// `x` rounded to what [`fmt_num`] prints.
pub fn rounded(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_num(x).parse().expect("formatted number parses")
}

/// JSON number holding the rounded value; non-finite values become null.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(rounded(x)).map_or(Value::Null, Value::Number)
}

/// Minimal CSV writer with LF line endings and formatted numerics.
#[derive(Debug, Default, Clone)]
pub struct Csv {
    buf: String,
}

/// One CSV cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
        }
    }

    /// JSON value with the same numeric content as the CSV cell.
    pub fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => json_num(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(t) => Value::String(t.clone()),
        }
    }
}

impl Csv {
    pub fn with_header(cols: &[&str]) -> Self {
        let mut c = Csv::default();
        c.buf.push_str(&cols.join(","));
        c.buf.push('\n');
        c
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        self.buf.push_str(&line.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_range() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-1.0351455), "-1.0351455");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(46600.0), "46600");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(2.0f64.sqrt()), "1.41421356237");
        assert_eq!(fmt_num(1e-4), "0.0001");
    }

    #[test]
    fn scientific_range() {
        assert_eq!(fmt_num(1.5e-5), "1.5e-5");
        assert_eq!(fmt_num(-2.0 / 3.0 * 1e-9), "-6.66666666667e-10");
        assert_eq!(fmt_num(1e20), "1e20");
    }

    #[test]
    fn small_negative_values() {
        assert_eq!(fmt_num(-1e-17), "-1e-17");
        assert_eq!(fmt_num(-0.00049999999999999), "-0.0005");
    }

    #[test]
    fn rounded_matches_text() {
        for &x in &[0.123456789012345, -7.5e-7, 3.0, 123456.7890123456] {
            assert_eq!(rounded(x).to_string().parse::<f64>().unwrap(), rounded(x));
            assert_eq!(fmt_num(rounded(x)), fmt_num(x));
        }
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::with_header(&["a", "b", "c"]);
        c.row(&[0.25.into(), "x,y".into(), true.into()]);
        assert_eq!(c.finish(), "a,b,c\n0.25,\"x,y\",true\n");
    }
}
