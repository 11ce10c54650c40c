//! Shifted factorials and generalized hypergeometric series.

#[cfg(test)]
use std::f64::consts::PI;

use statrs::function::gamma::{digamma, gamma, ln_gamma};

use crate::{Error, Result};

/// Above this length shifted factorials go through `ln Gamma`.
const LOG_SPACE_ABOVE: u32 = 20;
const SERIES_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 200_000;
/// Beyond this `|x|` the Gauss series is replaced by a transformation.
const DIRECT_SERIES_LIMIT: f64 = 0.9;

/// Pochhammer symbol `(x)_n = x (x+1) ... (x+n-1)`.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    if n > LOG_SPACE_ABOVE && x > 0.0 {
        return (ln_gamma(x + n as f64) - ln_gamma(x)).exp();
    }
    (0..n).map(|k| x + k as f64).product()
}

fn nonpositive_integer(x: f64) -> Option<usize> {
    (x <= 0.0 && x.fract() == 0.0 && x > -(MAX_TERMS as f64)).then(|| (-x) as usize)
}

/// `1 / Gamma(x)`, zero at the poles.
fn rgamma(x: f64) -> f64 {
    if nonpositive_integer(x).is_some() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Which generalized hypergeometric function to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypergeometricKind {
    /// Gauss `2F1(a, b; c; x)`, params `[a, b, c]`.
    F21,
    /// `4F3(a1..a4; b1..b3; x)`, params `[a1, a2, a3, a4, b1, b2, b3]`.
    F43,
}

pub fn hypergeometric(kind: HypergeometricKind, params: &[f64], x: f64) -> Result<f64> {
    match (kind, params) {
        (HypergeometricKind::F21, &[a, b, c]) => hyp2f1(a, b, c, x),
        (HypergeometricKind::F43, p) if p.len() == 7 => pfq(&p[..4], &p[4..], x),
        _ => Err(Error::Hypergeometric(format!(
            "{kind:?} takes {} parameters, got {}",
            if kind == HypergeometricKind::F21 { 3 } else { 7 },
            params.len()
        ))),
    }
}

/// Length of the series when some upper parameter is a nonpositive integer.
fn terminating_length(upper: &[f64]) -> Option<usize> {
    upper.iter().filter_map(|&a| nonpositive_integer(a)).min()
}

/// `pFq(upper; lower; x)`. Terminating series are summed exactly term by term;
/// otherwise the series must converge (`|x| < 1` when `p = q + 1`).
pub fn pfq(upper: &[f64], lower: &[f64], x: f64) -> Result<f64> {
    if upper.iter().chain(lower).any(|p| !p.is_finite()) || !x.is_finite() {
        return Err(Error::Hypergeometric("non-finite parameter or argument".into()));
    }
    let terms = terminating_length(upper);
    let last = terms.unwrap_or(MAX_TERMS);
    // A lower parameter -m is harmless only if the series stops before k = m.
    if let Some(m) = lower.iter().filter_map(|&b| nonpositive_integer(b)).min() {
        if m < last {
            return Err(Error::Hypergeometric(format!(
                "lower parameter {} hits a pole before the series terminates",
                -(m as f64)
            )));
        }
    }
    if terms.is_none() {
        let diverges = upper.len() > lower.len() + 1 || (upper.len() == lower.len() + 1 && x.abs() >= 1.0);
        if diverges {
            return Err(Error::Hypergeometric(format!(
                "{}F{} series does not converge at x = {x}",
                upper.len(),
                lower.len()
            )));
        }
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..last {
        let kf = k as f64;
        let num: f64 = upper.iter().map(|a| a + kf).product();
        let den: f64 = lower.iter().map(|b| b + kf).product();
        term *= num / den * x / (kf + 1.0);
        sum += term;
        if terms.is_none() && term.abs() <= SERIES_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    if terms.is_none() {
        return Err(Error::Hypergeometric(format!("series did not converge in {MAX_TERMS} terms")));
    }
    Ok(sum)
}

/// Gauss hypergeometric function `2F1(a, b; c; x)` for real `x <= 1`.
///
/// Uses the direct series for `|x| <= 0.9`, the Pfaff transformation for
/// `x < -0.9`, and the connection formulas around `x = 1` (including the
/// logarithmic case `c = a + b`) for `x > 0.9`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if [a, b, c, x].iter().any(|p| !p.is_finite()) {
        return Err(Error::Hypergeometric("non-finite parameter or argument".into()));
    }
    if terminating_length(&[a, b]).is_some() {
        return pfq(&[a, b], &[c], x);
    }
    if nonpositive_integer(c).is_some() {
        return Err(Error::Hypergeometric(format!("c = {c} is a pole")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x > 1.0 {
        return Err(Error::Hypergeometric(format!("x = {x} lies on the branch cut")));
    }
    if x == 1.0 {
        let s = c - a - b;
        if s <= 0.0 {
            return Err(Error::Hypergeometric(format!("2F1 diverges at x = 1 when c - a - b = {s} <= 0")));
        }
        return Ok(gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b));
    }
    if x.abs() <= DIRECT_SERIES_LIMIT {
        return pfq(&[a, b], &[c], x);
    }
    if x < 0.0 {
        // Pfaff: 2F1(a,b;c;x) = (1-x)^{-a} 2F1(a, c-b; c; x/(x-1)), argument in (0.47, 1).
        let y = x / (x - 1.0);
        return Ok((1.0 - x).powf(-a) * hyp2f1(a, c - b, c, y)?);
    }
    near_one(a, b, c, x)
}

/// `2F1` for `0.9 < x < 1` via series in `1 - x`.
fn near_one(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let s = c - a - b;
    let w = 1.0 - x;
    if s.fract() != 0.0 {
        let t1 = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b);
        let t2 = gamma(c) * gamma(-s) * rgamma(a) * rgamma(b);
        let f1 = if t1 == 0.0 { 0.0 } else { t1 * pfq(&[a, b], &[1.0 - s], w)? };
        let f2 = if t2 == 0.0 { 0.0 } else { t2 * w.powf(s) * pfq(&[c - a, c - b], &[s + 1.0], w)? };
        return Ok(f1 + f2);
    }
    if s == 0.0 {
        return Ok(log_case(a, b, w));
    }
    // Integer c - a - b other than zero: fall back to the slowly converging series.
    pfq(&[a, b], &[c], x)
}

/// `2F1(a, b; a + b; 1 - w)` for small `w > 0`:
/// `Gamma(a+b)/(Gamma(a)Gamma(b)) sum_n (a)_n (b)_n/(n!)^2 [2 psi(n+1) - psi(a+n) - psi(b+n) - ln w] w^n`.
fn log_case(a: f64, b: f64, w: f64) -> f64 {
    let prefactor = gamma(a + b) * rgamma(a) * rgamma(b);
    let ln_w = w.ln();
    let mut coeff = 1.0;
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let bracket = 2.0 * digamma(nf + 1.0) - digamma(a + nf) - digamma(b + nf) - ln_w;
        let term = coeff * bracket;
        sum += term;
        if term.abs() <= SERIES_TOL * sum.abs() && n > 2 {
            break;
        }
        coeff *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0)) * w;
    }
    prefactor * sum
}

/// Complete elliptic integral `K(m) = (pi/2) 2F1(1/2, 1/2; 1; m)`, used only as
/// an independent reference in tests.
#[cfg(test)]
pub(crate) fn elliptic_k_agm(m: f64) -> f64 {
    let (mut a, mut g) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..60 {
        let (an, gn) = (0.5 * (a + g), (a * g).sqrt());
        a = an;
        g = gn;
    }
    PI / (2.0 * a)
}
