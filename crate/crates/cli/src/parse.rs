//! Value parsers for command-line literals.

use num_complex::Complex64;
use serde::Serialize;

/// `a`, `bi`, `a+bi`, `a-bi` or polar `r@theta` (radians).
pub fn complex(text: &str) -> Result<Complex64, String> {
    let t = text.trim();
    if let Some((r, theta)) = t.split_once('@') {
        let r: f64 = r.trim().parse().map_err(|_| format!("bad modulus in `{text}`"))?;
        let theta: f64 = theta.trim().parse().map_err(|_| format!("bad angle in `{text}`"))?;
        return Ok(Complex64::from_polar(r, theta));
    }
    let z: Complex64 = t.replace(' ', "").parse().map_err(|_| format!("malformed complex literal `{text}`"))?;
    if z.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite complex literal `{text}`"))
    }
}

pub fn positive(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got `{text}`")),
    }
}

pub fn nonnegative(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a nonnegative number, got `{text}`")),
    }
}

/// A list of scales `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ladder(pub Vec<f64>);

/// Comma-separated scales; `2^-k` is accepted next to plain decimals.
pub fn eps_ladder(text: &str) -> Result<Ladder, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let x = match item.split_once('^') {
            Some((b, e)) => {
                let b: f64 = b.parse().map_err(|_| format!("bad base in `{item}`"))?;
                let e: i32 = e.parse().map_err(|_| format!("bad exponent in `{item}`"))?;
                b.powi(e)
            }
            None => item.parse().map_err(|_| format!("bad scale `{item}`"))?,
        };
        if !(x > 0.0 && x.is_finite()) {
            return Err(format!("scale `{item}` must be positive"));
        }
        out.push(x);
    }
    if out.is_empty() {
        return Err("empty ε ladder".into());
    }
    Ok(Ladder(out))
}
