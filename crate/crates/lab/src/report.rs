//! Experiment reports and the acceptance checks their pass flags refer to.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

/// One acceptance check: a pass flag name and the numbered criterion it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Check {
    pub id: &'static str,
    pub criterion: u8,
    pub description: &'static str,
}

const fn check(id: &'static str, criterion: u8, description: &'static str) -> Check {
    Check { id, criterion, description }
}

/// Every pass flag an experiment may raise.
pub const CHECKS: &[Check] = &[
    check("partition.identity", 1, "|chi + sum phi - 1| <= 1e-12 on every lattice radius"),
    check("partition.supports", 1, "non-adjacent annuli and chi against phi(2^-q) for q >= 1 never overlap"),
    check("partition.homogeneous", 1, "homogeneous window sums to one on its band within 1e-12"),
    check("reconstruction.residual", 2, "sum of blocks reconstructs random band-limited fields within 1e-10"),
    check("bony.identity", 3, "T_u v + T_v u + R(u, v) equals the dealiased product within 1e-10"),
    check("bony.localization", 3, "paraproduct summands leak at most 1e-10 of their energy outside their annulus"),
    check("commutator.four_terms", 3, "R1 + R2 + R3 + R4 matches the direct commutator within 1e-9"),
    check("commutator.gain", 3, "2^-q ||[Delta_q, u.grad] f|| / (||f||_{B^-1} ||u||_{B^1}) has a finite fitted constant"),
    check("stretching.bound", 3, "||omega.grad u||_{B^{3/p}_{p,1}} <= C ||omega||_{B^{3/p}_{p,1}} ||grad u||_inf with finite C"),
    check("remainder.divergence", 3, "sum_j R(omega^j, d_j u) matches d_j R(omega^j, u) within 1e-9"),
    check("bernstein.derivative", 4, "k = 1, a = b = inf constants vary by at most 4x over q"),
    check("bernstein.mixed", 4, "k = 1, a = 2, b = inf constants vary by at most 4x over q"),
    check("lorentz.indicator", 5, "indicator norms match (p/q)^{1/q} m^{1/p} within 1e-6"),
    check("lorentz.diagonal", 5, "L^{p,p} agrees with L^p within 1e-8"),
    check("lorentz.product", 5, "||uv||_{L^{p,q}} <= C ||u||_inf ||v||_{L^{p,q}} with C <= 1 + 1e-8"),
    check("lorentz.nesting", 5, "L^{p,q} into L^{p,q'} constants are finite"),
    check("embedding.bounded", 5, "||omega/r||_{L^{3,1}} / ||u||_{B^{1+3/p}_{p,1}} finite over the corpus"),
    check("embedding.refinement", 5, "embedding constant stable within 2x under grid refinement"),
    check("geometry.fields", 6, "realized fields and their curls pass the structure checks within 1e-8"),
    check("geometry.blocks", 6, "every dyadic block passes the structure checks within 1e-8"),
    check("geometry.biot_savart", 6, "biot_savart(curl u) returns u minus its mean within 1e-9"),
    check("geometry.quotient", 6, "the quotient of r alpha e_theta returns alpha within 1e-8, on the axis too"),
    check("conservation.alpha_L1", 7, "||alpha||_{L^1} drift <= 1%"),
    check("conservation.alpha_L2", 7, "||alpha||_{L^2} drift <= 1%"),
    check("conservation.alpha_Linf", 7, "||alpha||_{L^inf} drift <= 1%"),
    check("conservation.alpha_L31", 7, "||alpha||_{L^{3,1}} drift <= 1%"),
    check("conservation.energy", 7, "kinetic energy drift <= 1%"),
    check("conservation.monotone", 7, "alpha_L31 nonincreasing within 1%"),
    check("conservation.refinement", 7, "every drift strictly smaller on the refined grid"),
    check("model.divergence", 8, "div Omega stays below 1e-6 ||Omega|| for divergence-free data"),
    check("model.angular", 8, "radial and axial parts stay below 1e-6 ||Omega|| for angular data"),
    check("model.stretching", 8, "Omega.grad u equals (u_r/r) Omega within 1e-6 for angular data"),
    check("model.linearity", 8, "the model is linear in Omega within 1e-10"),
    check("model.rest", 8, "u = 0 leaves Omega unchanged"),
    check("decomposition.closure", 9, "sum_q omega_q matches the model vorticity within 1e-6"),
    check("decomposition.initial_leak", 9, "||Delta_j omega_q(0)|| <= 1e-12 for |j - q| >= 2"),
    check("decomposition.initial_offset", 9, "b(0) <= 1"),
    check("decomposition.offsets", 9, "b(t) finite at every report time"),
    check("decomposition.offsets_nondecreasing", 9, "b(t) nondecreasing in t"),
    check("decomposition.growth", 9, "one finite C bounds every block by ||Delta_q omega_0|| exp(C t ||alpha_0||_{L^{3,1}})"),
    check("decomposition.quotient_lemma", 9, "||Delta_q omega_0^1 / x2||_{B^0_{inf,1}} <= C 2^q ||Delta_q omega_0|| with finite C"),
    check("growth.finite", 9, "Besov norms of omega and u stay finite"),
    check("growth.refinement", 9, "growth factors stable within 2x under grid refinement"),
    check("biot_savart.bounded", 10, "||u_r/r||_inf / ||alpha||_{L^{3,1}} finite over the corpus"),
    check("biot_savart.refinement", 10, "that constant stable within 2x from n to 2n"),
    check("vorticity.ur_bound", 10, "||u_r/r(t)||_inf <= C ||alpha_0||_{L^{3,1}} with finite C along the run"),
    check("vorticity.growth", 10, "log ||omega(t)||_inf grows at rate <= C ||alpha_0||_{L^{3,1}} with finite C"),
    check("dilation.bounded", 11, "dilation constants finite for every lambda"),
    check("dilation.no_trend", 11, "dilation constants grow at most 2x beyond their value at lambda = 1/2"),
    check("transport.finite", 12, "Gronwall constants finite for every regularity"),
    check("transport.refinement", 12, "Gronwall constants stable within 2x under dt halving"),
    check("transport.rest", 12, "u = 0 gives C = 1 within 1e-10"),
];

pub fn find_check(id: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.id == id)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub key: String,
    pub fitted_constants: BTreeMap<String, f64>,
    pub pass_flags: BTreeMap<String, bool>,
    /// Paths relative to the scenario output directory.
    pub artifact_paths: Vec<PathBuf>,
    /// Measured values behind the flags.
    pub measurements: BTreeMap<String, f64>,
}

impl ExperimentReport {
    pub fn new(key: &str) -> Self {
        ExperimentReport { key: key.to_string(), ..Default::default() }
    }

    /// Records a flag; unknown check ids are a programming error.
    pub fn flag(&mut self, id: &str, pass: bool) {
        assert!(find_check(id).is_some(), "unregistered check {id}");
        self.pass_flags.insert(id.to_string(), pass);
    }

    /// Records `value` and flags `value <= limit`.
    pub fn bound(&mut self, id: &str, value: f64, limit: f64) {
        self.measure(id, value);
        self.flag(id, value <= limit);
    }

    pub fn measure(&mut self, name: &str, value: f64) {
        self.measurements.insert(name.to_string(), value);
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.fitted_constants.insert(name.to_string(), value);
    }

    pub fn artifact(&mut self, path: impl Into<PathBuf>) {
        self.artifact_paths.push(path.into());
    }

    pub fn passed(&self) -> bool {
        self.pass_flags.values().all(|&p| p)
    }

    pub fn validate(&self) -> Result<()> {
        for id in self.pass_flags.keys() {
            if find_check(id).is_none() {
                bail!("report {} raises unregistered check {id}", self.key);
            }
        }
        Ok(())
    }
}

/// One row of an inequality audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub corpus_id: usize,
    pub q: i32,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl AuditRow {
    pub fn new(corpus_id: usize, q: i32, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
        AuditRow { corpus_id, q, lhs, rhs, ratio }
    }
}

pub fn audit_csv(rows: &[AuditRow]) -> String {
    let mut s = String::from("corpus_id,q,lhs,rhs,ratio\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.17e},{:.17e},{:.17e}", r.corpus_id, r.q, r.lhs, r.rhs, r.ratio);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_ids_are_unique_and_cover_every_criterion() {
        let mut ids: Vec<_> = CHECKS.iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
        for n in 1..=12 {
            assert!(CHECKS.iter().any(|c| c.criterion == n), "criterion {n}");
        }
    }

    #[test]
    fn bound_records_value_and_flag() {
        let mut r = ExperimentReport::new("partition_audit");
        r.bound("partition.identity", 2e-13, 1e-12);
        r.bound("reconstruction.residual", 1.0, 1e-10);
        assert_eq!(r.pass_flags["partition.identity"], true);
        assert!(!r.passed());
        assert_eq!(r.measurements["reconstruction.residual"], 1.0);
        assert!(r.validate().is_ok());
    }

    #[test]
    fn audit_rows_format() {
        let csv = audit_csv(&[AuditRow::new(3, -1, 1.0, 2.0)]);
        assert!(csv.starts_with("corpus_id,q,lhs,rhs,ratio\n3,-1,"));
        assert!(csv.trim_end().ends_with("5.00000000000000000e-1"));
    }
}
