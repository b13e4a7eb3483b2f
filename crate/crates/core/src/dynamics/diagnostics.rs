use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::axisym::radial_quotient;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::norms::{besov_norm_vector, lebesgue_norm, lorentz_norm, BesovParams, LorentzParams};
use crate::partition::PartitionOfUnity;
use crate::vector::VectorField;

use super::config::DiagnosticsLevel;

pub const BASIC_CHANNELS: [&str; 11] = [
    "alpha_L1",
    "alpha_L2",
    "alpha_Linf",
    "alpha_L31",
    "omega_inf",
    "u_inf",
    "ur_over_r_inf",
    "energy",
    "grad_u_inf",
    "divergence",
    "cfl",
];

pub const FULL_CHANNELS: [&str; 2] = ["omega_Binf1", "u_B1inf1"];

/// Named scalar series sampled at increasing times.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub channels: BTreeMap<String, Vec<f64>>,
}

impl DiagnosticsSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one row; the first row fixes the channel set.
    pub fn push(&mut self, t: f64, values: &[(&str, f64)]) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Inconsistent(format!("diagnostics time {t} does not follow {last}")));
            }
            if values.len() != self.channels.len() || values.iter().any(|(k, _)| !self.channels.contains_key(*k)) {
                return Err(Error::Inconsistent("diagnostics row does not match the channel set".into()));
            }
        } else {
            for (k, _) in values {
                self.channels.insert((*k).to_string(), Vec::new());
            }
        }
        self.times.push(t);
        for (k, v) in values {
            self.channels.get_mut(*k).expect("registered channel").push(*v);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.get(name).map(|v| v.as_slice())
    }

    fn require(&self, name: &str) -> Result<&[f64]> {
        self.channel(name).ok_or_else(|| Error::Inconsistent(format!("no channel {name}")))
    }

    /// `max_t |c(t) - c(0)| / |c(0)|`.
    pub fn drift(&self, name: &str) -> Result<f64> {
        let c = self.require(name)?;
        let c0 = c[0];
        let d = c.iter().fold(0.0f64, |a, v| a.max((v - c0).abs()));
        Ok(if c0 == 0.0 { d } else { d / c0.abs() })
    }

    /// Whether the channel never rises more than `rel_tol` above its running minimum.
    pub fn nonincreasing(&self, name: &str, rel_tol: f64) -> Result<bool> {
        let c = self.require(name)?;
        let mut low = f64::INFINITY;
        for &v in c {
            if v > low * (1.0 + rel_tol) {
                return Ok(false);
            }
            low = low.min(v);
        }
        Ok(true)
    }

    /// CSV with a `t` column followed by the channels in name order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for k in self.channels.keys() {
            s.push(',');
            s.push_str(k);
        }
        s.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            let _ = write!(s, "{t:.17e}");
            for v in self.channels.values() {
                let _ = write!(s, ",{:.17e}", v[i]);
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Inconsistent("empty diagnostics file".into()))?;
        let names: Vec<&str> = header.split(',').collect();
        if names.first() != Some(&"t") {
            return Err(Error::Inconsistent("diagnostics header must start with t".into()));
        }
        let mut out = DiagnosticsSeries::new();
        for (row, line) in lines.enumerate() {
            let vals = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Inconsistent(format!("row {row}: {e}")))?;
            if vals.len() != names.len() {
                return Err(Error::Inconsistent(format!("row {row} has {} fields", vals.len())));
            }
            let pairs: Vec<(&str, f64)> = names[1..].iter().copied().zip(vals[1..].iter().copied()).collect();
            out.push(vals[0], &pairs)?;
        }
        Ok(out)
    }
}

/// `omega_theta = r alpha` evaluated as `|alpha| r` on the samples.
fn omega_sup(alpha: &SpectralField) -> f64 {
    alpha.map_with_position(|x, a| a * x[0].hypot(x[1])).max_abs()
}

/// One row of Euler diagnostics.
pub fn euler_row(
    alpha: &SpectralField,
    u: &VectorField,
    cfl: f64,
    level: DiagnosticsLevel,
    pu: &PartitionOfUnity,
) -> Result<Vec<(&'static str, f64)>> {
    let g = u.grid();
    let energy = 0.5 * g.volume() * (0..3).map(|i| u.component(i).spectral_energy()).sum::<f64>();
    let l31 = LorentzParams::new(3.0, 1.0)?;
    let ur_r = radial_quotient(u.component(0), u.component(1))?;
    let mut row = vec![
        ("alpha_L1", lebesgue_norm(alpha, 1.0)?),
        ("alpha_L2", lebesgue_norm(alpha, 2.0)?),
        ("alpha_Linf", alpha.interpolated_max_abs()),
        ("alpha_L31", lorentz_norm(alpha, l31)),
        ("omega_inf", omega_sup(alpha)),
        ("u_inf", u.max_norm()),
        ("ur_over_r_inf", ur_r.max_abs()),
        ("energy", energy),
        ("grad_u_inf", u.gradient_sup()),
        ("divergence", u.relative_divergence()),
        ("cfl", cfl),
    ];
    if level == DiagnosticsLevel::Full {
        let omega = super::euler::vorticity_of(alpha)?;
        row.push(("omega_Binf1", besov_norm_vector(&omega, BesovParams::new(0.0, f64::INFINITY, 1.0)?, pu)?));
        row.push(("u_B1inf1", besov_norm_vector(u, BesovParams::new(1.0, f64::INFINITY, 1.0)?, pu)?));
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_bookkeeping_and_csv() {
        let mut d = DiagnosticsSeries::new();
        d.push(0.0, &[("a", 1.0), ("b", 2.0)]).unwrap();
        d.push(0.5, &[("a", 0.99), ("b", 2.5)]).unwrap();
        d.push(1.0, &[("a", 0.995), ("b", 2.0)]).unwrap();
        assert!(d.push(1.0, &[("a", 1.0), ("b", 1.0)]).is_err());
        assert!(d.push(2.0, &[("a", 1.0)]).is_err());
        assert!((d.drift("a").unwrap() - 0.01).abs() < 1e-12);
        assert!(d.nonincreasing("a", 0.01).unwrap());
        assert!(!d.nonincreasing("b", 0.01).unwrap());
        let back = DiagnosticsSeries::from_csv(&d.to_csv()).unwrap();
        assert_eq!(back, d);
        assert!(d.to_csv().starts_with("t,a,b\n"));
    }
}
