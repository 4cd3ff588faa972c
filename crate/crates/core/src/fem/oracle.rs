//! Single-element check against the homogeneous bar.
//!
//! One axisymmetric element with free lateral faces is in uniaxial stress, so
//! every quadrature point must follow the 1D solver cycle by cycle.

use serde::{Deserialize, Serialize};

use super::assembly::FemProblem;
use super::mesh::single_element_mesh;
use super::run::{FemCycleOutcome, FemOptions, FemSimulator};
use crate::error::{Error, Result};
use crate::fatigue::{FatigueDegradation, FatigueParams};
use crate::homogeneous::{BarSimulator, ControlMode, CycleLoad, CycleOutcome, FailureMode, HomogeneousBar, LifeOptions};
use crate::material::{MaterialParams, PfModel, SplitKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub model: PfModel,
    pub control: ControlMode,
    pub amplitude: f64,
    pub cycles: u64,
}

impl OracleCase {
    /// Model material with F1, n = 2 and σ_e = 0.2.
    pub fn setup(&self) -> Result<(MaterialParams, FatigueParams)> {
        let l = match self.model {
            PfModel::At1 => 0.375,
            PfModel::At2 => 0.1055,
        };
        let mat = MaterialParams::new(1.0, 0.3, 1.0, l)?;
        let fp = FatigueParams::for_material(&mat, self.model, 100.0, 2.0, 0.5, 0.2, FatigueDegradation::F1)?;
        Ok((mat, fp))
    }

    /// Displacement control, load control to failure, load control to the cap.
    pub fn standard() -> [OracleCase; 3] {
        [
            OracleCase {
                model: PfModel::At2,
                control: ControlMode::Displacement,
                amplitude: 0.55,
                cycles: 1000,
            },
            OracleCase {
                model: PfModel::At1,
                control: ControlMode::Load,
                amplitude: 0.8,
                cycles: 1000,
            },
            OracleCase {
                model: PfModel::At2,
                control: ControlMode::Load,
                amplitude: 0.5,
                cycles: 1000,
            },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub cycles_compared: u64,
    /// Largest relative mismatch in φ over all cycles and nodes.
    pub max_rel_phi: f64,
    pub max_rel_alpha_bar: f64,
    pub max_rel_peak_stress: f64,
    /// Whether φ left zero during the comparison.
    pub damaged: bool,
    pub failure: Option<FailureMode>,
}

impl OracleReport {
    pub fn worst(&self) -> f64 {
        self.max_rel_phi.max(self.max_rel_alpha_bar).max(self.max_rel_peak_stress)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Steps both solvers side by side. Diverging outcomes (one fails, the other
/// survives) are reported as an error.
pub fn single_element_lockstep(case: &OracleCase) -> Result<OracleReport> {
    let (mat, fp) = case.setup()?;
    let split = SplitKind::NoTension;
    let load = CycleLoad::new(case.control, case.amplitude, -1.0)?.with_max_cycles(case.cycles);
    let bar = HomogeneousBar::new(mat, case.model, split, fp)?;
    let mut oracle = BarSimulator::new(bar, load, LifeOptions::default())?;
    let p = FemProblem::new(single_element_mesh(1.0, 0.5, 0.5)?, mat, case.model, split, case.control)?;
    let mut sim = FemSimulator::new(p, fp, load, FemOptions::default())?;
    let mut rep = OracleReport {
        cycles_compared: 0,
        max_rel_phi: 0.0,
        max_rel_alpha_bar: 0.0,
        max_rel_peak_stress: 0.0,
        damaged: false,
        failure: None,
    };
    for c in 1..=case.cycles {
        match (oracle.step(), sim.step()) {
            (CycleOutcome::Survived(a), FemCycleOutcome::Survived(b)) => {
                let phi_min = sim.state().phi.iter().copied().fold(f64::INFINITY, f64::min);
                let phi_max = sim.state().max_phi();
                rep.max_rel_phi = rep
                    .max_rel_phi
                    .max(rel(a.phi, b.phi))
                    .max(rel(a.phi, phi_min))
                    .max(rel(a.phi, phi_max));
                rep.max_rel_alpha_bar = rep.max_rel_alpha_bar.max(rel(a.alpha_bar, b.alpha_bar));
                rep.max_rel_peak_stress = rep.max_rel_peak_stress.max(rel(a.peak_stress, b.peak_stress));
                rep.damaged |= a.phi > 0.0;
                rep.cycles_compared = c;
            }
            (CycleOutcome::Failed(a), FemCycleOutcome::Failed(_)) => {
                rep.failure = Some(a);
                rep.cycles_compared = c;
                return Ok(rep);
            }
            (a, b) => {
                return Err(Error::Config(format!(
                    "outcomes diverge at cycle {c}: homogeneous {a:?}, element {b:?}"
                )))
            }
        }
    }
    Ok(rep)
}
