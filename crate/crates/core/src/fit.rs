//! Fitting conventions shared by the inequality audits.
//!
//! Every audited inequality `lhs <= C rhs` is fitted on `log(lhs / rhs)`:
//! the reported constant is the smallest one that holds on every sample,
//! and the least-squares level and its residual are kept alongside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedConstant {
    /// Smallest `C` with `lhs <= C rhs` on every sample.
    pub value: f64,
    /// `exp` of the mean of `log(lhs / rhs)`.
    pub least_squares: f64,
    /// Root-mean-square residual of the log ratios about their mean.
    pub log_residual: f64,
    pub samples: usize,
}

/// Fits `lhs <= C rhs`; pairs with `lhs == 0` hold for every `C` and are skipped.
pub fn fit_ratio(pairs: &[(f64, f64)]) -> Result<FittedConstant> {
    let mut logs = Vec::with_capacity(pairs.len());
    for &(lhs, rhs) in pairs {
        if !(lhs.is_finite() && rhs.is_finite()) || lhs < 0.0 || rhs < 0.0 {
            return Err(Error::Inconsistent(format!("cannot fit the pair ({lhs:e}, {rhs:e})")));
        }
        if lhs == 0.0 {
            continue;
        }
        if rhs == 0.0 {
            return Err(Error::Inconsistent(format!("lhs {lhs:e} against a vanishing rhs")));
        }
        logs.push(lhs.ln() - rhs.ln());
    }
    if logs.is_empty() {
        return Ok(FittedConstant { value: 0.0, least_squares: 0.0, log_residual: 0.0, samples: 0 });
    }
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n;
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FittedConstant { value: max.exp(), least_squares: mean.exp(), log_residual: var.sqrt(), samples: logs.len() })
}

/// Least-squares line `y = a + b x`, returned as `(a, b, rms residual)`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Inconsistent("a line needs at least two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Inconsistent("abscissae coincide".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res = (points.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok((a, b, res))
}

/// Smallest `C >= 0` with `ratio_i <= C exp(C expo_i)` for all samples,
/// where `ratio_i = ||f(t_i)|| / ||f_0||` and `expo_i >= 0`.
pub fn gronwall_fit(samples: &[(f64, f64)]) -> Result<f64> {
    let mut c = 0.0f64;
    for &(ratio, expo) in samples {
        if !(ratio.is_finite() && expo.is_finite()) || ratio < 0.0 || expo < 0.0 {
            return Err(Error::Inconsistent(format!("cannot fit ratio {ratio:e} with exponent {expo:e}")));
        }
        c = c.max(gronwall_root(ratio, expo));
    }
    Ok(c)
}

/// Root of `C exp(C e) = ratio`; the left side increases in `C`.
fn gronwall_root(ratio: f64, e: f64) -> f64 {
    if ratio == 0.0 {
        return 0.0;
    }
    if e == 0.0 {
        return ratio;
    }
    let g = |c: f64| c * (c * e).exp();
    let (mut lo, mut hi) = (0.0, ratio.min(1.0 / e).max(f64::MIN_POSITIVE));
    while g(hi) < ratio {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Cumulative trapezoid rule: `out[i] = int_{t_0}^{t_i} f`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_fit() {
        let f = fit_ratio(&[(2.0, 1.0), (3.0, 2.0), (0.0, 5.0)]).unwrap();
        assert!((f.value - 2.0).abs() < 1e-15);
        assert!((f.least_squares - 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(f.samples, 2);
        assert!(fit_ratio(&[(1.0, 0.0)]).is_err());
    }

    #[test]
    fn gronwall_roots() {
        assert_eq!(gronwall_fit(&[(1.0, 0.0), (1.0, 0.0)]).unwrap(), 1.0);
        for &(c, e) in &[(0.3f64, 2.0f64), (1.5, 0.1), (4.0, 3.0), (1e-3, 50.0)] {
            let ratio = c * (c * e).exp();
            let got = gronwall_fit(&[(ratio, e)]).unwrap();
            assert!((got - c).abs() < 1e-12 * c, "{got} vs {c}");
        }
    }

    #[test]
    fn line_and_trapezoid() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 1.0 + 2.0 * i as f64)).collect();
        let (a, b, r) = linear_fit(&pts).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14 && r < 1e-14);
        let t = [0.0, 0.5, 1.0];
        let u = cumulative_trapezoid(&t, &[1.0, 1.0, 1.0]);
        assert_eq!(u, vec![0.0, 0.5, 1.0]);
    }
}
