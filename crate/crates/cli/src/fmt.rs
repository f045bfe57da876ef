//! Number and point formatting plus point parsing for the CLI surface.

use num_complex::Complex64;

use odot_core::scalar::Scalar;

use crate::io::CliError;

/// Format with nine significant digits by default, or shortest
/// round-trip precision with `full`.
pub fn sig(x: f64, full: bool) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if full {
        return format!("{x:?}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..=12).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let mut s = format!("{x:.decimals$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        format!("{x:.8e}")
    }
}

pub fn scalar(value: &Scalar, full: bool) -> String {
    match value {
        Scalar::Real(x) => sig(*x, full),
        Scalar::Complex(z) => {
            if z.im >= 0.0 {
                format!("{}+{}i", sig(z.re, full), sig(z.im, full))
            } else {
                format!("{}-{}i", sig(z.re, full), sig(z.im.abs(), full))
            }
        }
    }
}

pub fn point(values: &[Scalar], full: bool) -> String {
    let parts: Vec<String> = values.iter().map(|v| scalar(v, full)).collect();
    format!("({})", parts.join(", "))
}

/// Parse one coordinate: a real like `-0.25`, or a complex like
/// `0.1+0.2i`, `1e-3-2i`, `0.5i`, `-i`.
fn parse_coordinate(token: &str) -> Result<Scalar, CliError> {
    let t = token.trim();
    if t.is_empty() {
        return Err(CliError::Validation("empty coordinate".into()));
    }
    let invalid = || CliError::Validation(format!("cannot parse coordinate \"{token}\""));
    if !t.ends_with(['i', 'I']) {
        return t.parse::<f64>().map(Scalar::Real).map_err(|_| invalid());
    }
    let body = &t[..t.len() - 1];
    // Split at the last sign that is not a leading sign or an exponent
    // sign; that separates the real part from the imaginary part.
    let mut split = None;
    for (pos, c) in body.char_indices().skip(1) {
        if (c == '+' || c == '-') && !matches!(body.as_bytes()[pos - 1], b'e' | b'E') {
            split = Some(pos);
        }
    }
    let (re_str, im_str) = match split {
        Some(pos) => (&body[..pos], &body[pos..]),
        None => ("0", body),
    };
    let re = if re_str.is_empty() {
        0.0
    } else {
        re_str.parse::<f64>().map_err(|_| invalid())?
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| invalid())?,
    };
    Ok(Scalar::Complex(Complex64::new(re, im)))
}

/// Parse a comma-separated point.
pub fn parse_point(text: &str) -> Result<Vec<Scalar>, CliError> {
    text.split(',').map(parse_coordinate).collect()
}
