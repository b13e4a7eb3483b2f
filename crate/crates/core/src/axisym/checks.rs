use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{interpolation_weights, SpectralField};
use crate::lp::{block, block_window};
use crate::partition::PartitionOfUnity;
use crate::vector::VectorField;

/// Relative structural defect tolerated by operations that need axisymmetry.
pub const STRUCTURE_TOL: f64 = 1e-6;

/// Which cylindrical structure a field is expected to have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// `v = v_r e_r + v_z e_z`: no angular part, `v^1(0, x2, z) = v^2(x1, 0, z) = 0`.
    Meridional,
    /// `v = v_theta e_theta`: no radial or axial part, `v^1(x1, 0, z) = v^2(0, x2, z) = 0`.
    Angular,
}

/// Largest violations, each relative to `sup |v|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Angular part for meridional fields; radial plus axial part for angular ones.
    pub component: f64,
    /// Values that must vanish on the coordinate planes through the axis.
    pub plane: f64,
    /// Defect of `v(Rx) = R v(x)` for the quarter turn `R`.
    pub quarter_turn: f64,
    /// Defect of the mirror symmetry `x2 -> -x2`.
    pub reflection: f64,
    /// Defect of `v(R x) = R v(x)` for a generic angle, measured by interpolation.
    pub rotation: f64,
}

impl StructureReport {
    pub fn worst(&self) -> f64 {
        [self.component, self.plane, self.quarter_turn, self.reflection, self.rotation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStructure {
    pub q: i32,
    pub report: StructureReport,
}

/// Structure of a velocity, of its curl and of every block of the velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisymmetryReport {
    pub field: StructureReport,
    pub curl: StructureReport,
    pub blocks: Vec<BlockStructure>,
}

impl AxisymmetryReport {
    pub fn field_worst(&self) -> f64 {
        self.field.worst().max(self.curl.worst())
    }

    pub fn blocks_worst(&self) -> f64 {
        self.blocks.iter().map(|b| b.report.worst()).fold(0.0, f64::max)
    }

    pub fn worst(&self) -> f64 {
        self.field_worst().max(self.blocks_worst())
    }
}

/// Full structural audit of an axisymmetric velocity without swirl.
pub fn check_axisymmetry(v: &VectorField, pu: &PartitionOfUnity) -> Result<AxisymmetryReport> {
    let field = structure(v, FieldKind::Meridional, true)?;
    let curl = structure(&v.curl()?, FieldKind::Angular, true)?;
    let (lo, hi) = block_window(v.grid());
    let blocks = (lo..=hi)
        .map(|q| {
            let b = v.map_components(|c| block(c, q, pu));
            Ok(BlockStructure { q, report: structure(&b, FieldKind::Meridional, true)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AxisymmetryReport { field, curl, blocks })
}

/// Structural defects of `v`; the interpolated rotation test is optional
/// because it costs a full pass over the grid per probe point.
pub fn structure(v: &VectorField, kind: FieldKind, with_rotation: bool) -> Result<StructureReport> {
    let g = *v.grid();
    if g.dim() != 3 {
        return Err(Error::InvalidGrid("axisymmetry needs a three-dimensional grid".into()));
    }
    let scale = v.max_norm();
    if scale == 0.0 {
        return Ok(StructureReport::default());
    }
    let n = g.n();
    let [a, b, c] = [0, 1, 2].map(|i| v.component(i).samples());
    let idx = |i0: usize, i1: usize, i2: usize| (i0 * n + i1) * n + i2;
    let mut component = 0.0f64;
    let mut quarter = 0.0f64;
    let mut reflection = 0.0f64;
    for i0 in 0..n {
        let x1 = g.coordinate(i0);
        for i1 in 0..n {
            let x2 = g.coordinate(i1);
            let r = (x1 * x1 + x2 * x2).sqrt();
            // R(x1, x2) = (-x2, x1): the index of -x2 is n-1-i1
            let rot = (n - 1 - i1, i0);
            let mir = (i0, n - 1 - i1);
            for i2 in 0..n {
                let k = idx(i0, i1, i2);
                let (v1, v2, v3) = (a[k], b[k], c[k]);
                let defect = match kind {
                    FieldKind::Meridional => (x1 * v2 - x2 * v1).abs() / r,
                    FieldKind::Angular => ((x1 * v1 + x2 * v2) / r).hypot(v3),
                };
                component = component.max(defect);
                let kr = idx(rot.0, rot.1, i2);
                let dq = (a[kr] + v2).abs().max((b[kr] - v1).abs()).max((c[kr] - v3).abs());
                quarter = quarter.max(dq);
                let km = idx(mir.0, mir.1, i2);
                // meridional fields are even in x2 for the first and third
                // components; the angular unit vector flips the first instead
                let sign = if kind == FieldKind::Meridional { 1.0 } else { -1.0 };
                let dm = (a[km] - sign * v1).abs().max((b[km] + sign * v2).abs()).max((c[km] - v3).abs());
                reflection = reflection.max(dm);
            }
        }
    }
    let plane = match kind {
        FieldKind::Meridional => plane_value(v.component(0), 0).max(plane_value(v.component(1), 1)),
        FieldKind::Angular => plane_value(v.component(0), 1).max(plane_value(v.component(1), 0)),
    };
    let rotation = if with_rotation { rotation_defect(v) } else { 0.0 };
    Ok(StructureReport {
        component: component / scale,
        plane: plane / scale,
        quarter_turn: quarter / scale,
        reflection: reflection / scale,
        rotation: rotation / scale,
    })
}

/// `sup |f|` on the plane `x_axis = 0`, by interpolation across the axis.
pub fn plane_value(f: &SpectralField, axis: usize) -> f64 {
    let g = f.grid();
    let n = g.n();
    let w = interpolation_weights(g, 0.0);
    let s = f.samples();
    let stride = [n * n, n, 1][axis];
    let mut worst = 0.0f64;
    for base in 0..n * n * n {
        if (base / stride) % n != 0 {
            continue;
        }
        let v: f64 = (0..n).map(|j| w[j] * s[base + j * stride]).sum();
        worst = worst.max(v.abs());
    }
    worst
}

const ROTATION_ANGLE: f64 = 0.7;

fn rotation_defect(v: &VectorField) -> f64 {
    let g = v.grid();
    let l = g.box_length();
    let (cs, sn) = (ROTATION_ANGLE.cos(), ROTATION_ANGLE.sin());
    let mut worst = 0.0f64;
    for k in 0..8 {
        // probes spread over the central quarter of the box
        let t = k as f64 / 8.0;
        let r = l * (0.02 + 0.16 * t);
        let phi = 2.4 * k as f64;
        let z = l * 0.12 * (1.7 * k as f64).sin();
        let p = [r * phi.cos(), r * phi.sin(), z];
        let q = [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1], z];
        let vp = [0, 1, 2].map(|i| v.component(i).evaluate(p));
        let vq = [0, 1, 2].map(|i| v.component(i).evaluate(q));
        let rv = [cs * vp[0] - sn * vp[1], sn * vp[0] + cs * vp[1], vp[2]];
        for i in 0..3 {
            worst = worst.max((vq[i] - rv[i]).abs());
        }
    }
    worst
}

/// Rejects velocities that are visibly not axisymmetric without swirl.
pub fn require_axisymmetric_velocity(u: &VectorField) -> Result<()> {
    let r = structure(u, FieldKind::Meridional, false)?;
    if r.worst() > STRUCTURE_TOL {
        return Err(Error::NotAxisymmetric(format!(
            "meridional structure defect {:.3e} exceeds {STRUCTURE_TOL:e}",
            r.worst()
        )));
    }
    Ok(())
}

/// Rejects vorticities that are not purely angular.
pub fn require_angular_vorticity(omega: &VectorField) -> Result<()> {
    let r = structure(omega, FieldKind::Angular, false)?;
    if r.worst() > STRUCTURE_TOL {
        return Err(Error::NotAxisymmetric(format!(
            "angular structure defect {:.3e} exceeds {STRUCTURE_TOL:e}",
            r.worst()
        )));
    }
    Ok(())
}
