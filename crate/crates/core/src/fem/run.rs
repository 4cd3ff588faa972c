//! Cyclic fatigue driver for the axisymmetric problem.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::assembly::{FemProblem, FieldState, PointEval};
use super::bfgs::{bfgs_solve, BfgsOptions};
use super::element::extrapolate_to_nodes;
use super::linsolve::SparseCholesky;
use super::mesh::{generate_notched_mesh_with, Mesh, MeshOptions, NotchGeometry, AXIS, NOTCH, ROOT};
use crate::error::{invalid, Error, Result};
use crate::fatigue::{
    accumulate_generalized, accumulate_legacy_reformulated, accumulate_legacy_representative, AccumulationRule,
    CycleObservation, FatigueParams,
};
use crate::homogeneous::{ControlMode, CycleLoad, CycleRecord, FailureMode, LifeOptions, LifeResult};
use crate::material::{g, threshold_energy, MaterialParams, PfModel, SplitKind, SymTensor};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FemOptions {
    pub life: LifeOptions,
    pub solver: BfgsOptions,
}

/// Linear elastic response to a unit load level with φ = 0.
#[derive(Debug, Clone)]
struct ElasticUnit {
    u: Vec<f64>,
    psi: Vec<f64>,
}

/// Element graph used to detect a damaged band crossing the net section.
#[derive(Debug, Clone)]
struct SeveranceCheck {
    adjacency: Vec<Vec<usize>>,
    start: Vec<bool>,
    target: Vec<bool>,
}

impl SeveranceCheck {
    fn build(mesh: &Mesh) -> Option<Self> {
        if mesh.node_set(NOTCH).is_empty() || mesh.node_set(AXIS).is_empty() {
            return None;
        }
        let ne = mesh.elements.len();
        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, conn) in mesh.elements.iter().enumerate() {
            for k in 0..4 {
                let (a, b) = (conn[k], conn[(k + 1) % 4]);
                edges.entry((a.min(b), a.max(b))).or_default().push(e);
            }
        }
        let mut adjacency = vec![Vec::new(); ne];
        for els in edges.values() {
            for &a in els {
                for &b in els {
                    if a != b {
                        adjacency[a].push(b);
                    }
                }
            }
        }
        let mark = |set: &[usize]| {
            let mut on = vec![false; mesh.nodes.len()];
            set.iter().for_each(|&n| on[n] = true);
            mesh.elements.iter().map(|c| c.iter().any(|&n| on[n])).collect::<Vec<_>>()
        };
        Some(Self {
            adjacency,
            start: mark(mesh.node_set(NOTCH)),
            target: mark(mesh.node_set(AXIS)),
        })
    }

    fn severed(&self, mesh: &Mesh, phi: &[f64], threshold: f64) -> bool {
        let damaged: Vec<bool> = mesh
            .elements
            .iter()
            .map(|c| c.iter().map(|&n| phi[n]).fold(0.0, f64::max) > threshold)
            .collect();
        let mut seen = vec![false; damaged.len()];
        let mut queue: VecDeque<usize> = (0..damaged.len()).filter(|&e| damaged[e] && self.start[e]).collect();
        queue.iter().for_each(|&e| seen[e] = true);
        while let Some(e) = queue.pop_front() {
            if self.target[e] {
                return true;
            }
            for &n in &self.adjacency[e] {
                if damaged[n] && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        false
    }
}

/// Outcome of one FEM cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FemCycleOutcome {
    Survived(CycleRecord),
    Failed(FailureMode),
}

/// Result of a full FEM fatigue run.
#[derive(Debug, Clone, PartialEq)]
pub struct FemRun {
    pub life: LifeResult,
    pub final_state: FieldState,
    /// Node holding the largest φ when initiation was detected.
    pub initiation_node: Option<usize>,
    pub solver_iterations: u64,
}

/// Cycle-by-cycle simulator of a [`FemProblem`].
///
/// The load level is a nominal stress under load control (edge traction =
/// level · `traction_per_level`) and a nominal strain under displacement
/// control (end displacement = level · height of the loaded end).
#[derive(Debug, Clone)]
pub struct FemSimulator {
    problem: FemProblem,
    fatigue: FatigueParams,
    load: CycleLoad,
    options: FemOptions,
    state: FieldState,
    cycle: u64,
    traction_per_level: f64,
    nominal_area: f64,
    elastic: Option<ElasticUnit>,
    severance: Option<SeveranceCheck>,
    solver_iterations: u64,
}

impl FemSimulator {
    pub fn new(problem: FemProblem, fatigue: FatigueParams, load: CycleLoad, options: FemOptions) -> Result<Self> {
        load.validate()?;
        fatigue.validate()?;
        options.solver.validate()?;
        if load.control != problem.control {
            return Err(invalid("control", "load and problem control modes differ"));
        }
        if fatigue.accumulation == AccumulationRule::LegacyPerIncrement {
            return Err(invalid(
                "accumulation",
                "legacy-per-increment is only available in the homogeneous solver",
            ));
        }
        let nominal_area = problem.unit_load_resultant();
        let severance = SeveranceCheck::build(&problem.mesh);
        Ok(Self {
            state: problem.empty_state(),
            problem,
            fatigue,
            load,
            options,
            cycle: 0,
            traction_per_level: 1.0,
            nominal_area: if nominal_area > 0.0 { nominal_area } else { 1.0 },
            elastic: None,
            severance,
            solver_iterations: 0,
        })
    }

    /// Sets the traction per unit level and the area used to report nominal stress.
    pub fn with_nominal_section(mut self, traction_per_level: f64, nominal_area: f64) -> Self {
        self.traction_per_level = traction_per_level;
        self.nominal_area = nominal_area;
        self
    }

    pub fn problem(&self) -> &FemProblem {
        &self.problem
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn fatigue_factors(&self) -> Vec<f64> {
        self.state.points.iter().map(|p| self.fatigue.degradation(p.fatigue.alpha_bar)).collect()
    }

    fn boundary(&self, level: f64) -> (f64, f64) {
        match self.load.control {
            ControlMode::Load => (0.0, level * self.traction_per_level),
            ControlMode::Displacement => (level * self.problem.load_height(), 0.0),
        }
    }

    fn elastic_unit(&mut self) -> Result<&ElasticUnit> {
        if self.elastic.is_none() {
            let p = &self.problem;
            let blank = p.empty_state();
            let (disp, trac) = self.boundary(1.0);
            let mut x = p.pack(&blank, disp);
            let ones = vec![1.0; p.num_points()];
            let (ku, _) = p.free_tangents(&x, &blank.points, &ones);
            let (free_u, n_u) = p.free_u();
            let chol = SparseCholesky::factorize(n_u, &ku)?;
            let r = p.residual(&x, &blank.points, &ones, trac);
            let mut rhs = vec![0.0; n_u];
            for (dof, &k) in free_u.iter().enumerate() {
                if k != super::assembly::NOT_FREE {
                    rhs[k] = -r.values[dof];
                }
            }
            chol.solve_in_place(&mut rhs);
            for (dof, &k) in free_u.iter().enumerate() {
                if k != super::assembly::NOT_FREE {
                    x[dof] += rhs[k];
                }
            }
            let mut s = blank;
            p.unpack(&x, &mut s);
            let psi = p.evaluate(&s).iter().map(|e| e.psi_plus).collect();
            self.elastic = Some(ElasticUnit { u: s.u, psi });
        }
        Ok(self.elastic.as_ref().unwrap())
    }

    /// AT1 states whose driving force stays on the (fatigue-scaled) elastic
    /// floor keep φ = 0 and respond linearly.
    fn try_elastic(&mut self, level: f64, f: &[f64]) -> Option<Vec<f64>> {
        if self.problem.model != PfModel::At1 || level < 0.0 || self.state.phi.iter().any(|&v| v != 0.0) {
            return None;
        }
        let floor = threshold_energy(PfModel::At1, &self.problem.mat);
        let points = self.state.points.clone();
        let unit = self.elastic_unit().ok()?;
        let below = unit
            .psi
            .iter()
            .zip(&points)
            .zip(f)
            .all(|((&psi, pt), &fq)| pt.psi_max.max(level * level * psi) <= fq * floor);
        below.then(|| unit.u.iter().map(|v| v * level).collect())
    }

    /// Solves the equilibrium state at one load level and updates φ and the
    /// energy history.
    fn solve_level(&mut self, level: f64, f: &[f64]) -> std::result::Result<Vec<PointEval>, FailureMode> {
        let (disp, trac) = self.boundary(level);
        let phi_prev = self.state.phi.clone();
        if let Some(u) = self.try_elastic(level, f) {
            self.state.u = u;
        } else {
            let mut x = self.problem.pack(&self.state, disp);
            let rep = bfgs_solve(&self.problem, &mut x, &self.state.points, f, trac, &self.options.solver)
                .map_err(|_| FailureMode::SolverFailure)?;
            self.solver_iterations += rep.iterations as u64;
            self.problem.unpack(&x, &mut self.state);
            for (v, &prev) in self.state.phi.iter_mut().zip(&phi_prev) {
                *v = v.clamp(prev, 1.0);
            }
        }
        let evals = self.problem.evaluate(&self.state);
        for (pt, ev) in self.state.points.iter_mut().zip(&evals) {
            pt.psi_max = pt.psi_max.max(ev.psi_plus);
            pt.phi = ev.phi;
        }
        Ok(evals)
    }

    fn degraded_stress(&self, ev: &PointEval) -> SymTensor {
        ev.stress_tensor().scale(g(ev.phi) + self.problem.mat.residual_stiffness)
    }

    fn record(&self, level: f64, f: &[f64]) -> CycleRecord {
        let (_, trac) = self.boundary(level);
        CycleRecord {
            cycle: self.cycle,
            alpha_bar: self.state.max_alpha_bar(),
            phi: self.state.max_phi(),
            peak_stress: self.problem.load_reaction(&self.state, f, trac) / self.nominal_area,
            peak_strain: self.problem.mean_load_displacement(&self.state) / self.problem.load_height(),
        }
    }

    fn accumulate(&mut self, obs: &[CycleObservation]) {
        let p = self.fatigue;
        for (pt, o) in self.state.points.iter_mut().zip(obs) {
            match p.accumulation {
                AccumulationRule::GeneralizedOnePerCycle => pt.fatigue = accumulate_generalized(pt.fatigue, o, &p),
                AccumulationRule::LegacyReformulated => {
                    pt.fatigue.alpha_bar += accumulate_legacy_reformulated(o, p.n, p.alpha_n)
                }
                AccumulationRule::LegacyRepresentative => {
                    pt.fatigue.alpha_bar += accumulate_legacy_representative(o.alpha_max, o.ratio, p.n, p.alpha_n)
                }
                AccumulationRule::LegacyPerIncrement => {}
            }
        }
    }

    fn step_representative(&mut self, f: &[f64]) -> std::result::Result<CycleRecord, FailureMode> {
        let ratio = self.load.ratio;
        let evals = self.solve_level(self.load.peak(), f)?;
        let rec = self.record(self.load.peak(), f);
        let mut obs = Vec::with_capacity(evals.len());
        for (pt, ev) in self.state.points.iter_mut().zip(&evals) {
            let gphi = g(ev.phi);
            let valley = ev.strain.map(|v| ratio * v);
            let psi_v = self.problem.active_energy(&valley);
            pt.psi_max = pt.psi_max.max(psi_v);
            let sigma1 = ev
                .stress_tensor()
                .scale(g(ev.phi) + self.problem.mat.residual_stiffness)
                .max_principal()
                .unwrap_or(0.0);
            obs.push(CycleObservation::new(gphi * ev.psi_plus, gphi * psi_v, ratio).with_peak_stress(sigma1));
        }
        self.accumulate(&obs);
        Ok(rec)
    }

    fn step_substepped(&mut self, f: &[f64]) -> std::result::Result<CycleRecord, FailureMode> {
        let path = self.load.cycle_path(self.cycle == 1);
        let np = self.problem.num_points();
        let mut alpha_max = vec![0.0f64; np];
        let mut alpha_valley = vec![0.0; np];
        let mut peak = vec![SymTensor::default(); np];
        let mut valley = vec![SymTensor::default(); np];
        let mut rec = None;
        for (t, level) in path {
            let evals = self.solve_level(level, f)?;
            for (q, ev) in evals.iter().enumerate() {
                let a = g(ev.phi) * ev.psi_plus;
                alpha_max[q] = alpha_max[q].max(a);
                if (t - 0.25).abs() < 1e-12 {
                    peak[q] = self.degraded_stress(ev);
                }
                if (t - 0.75).abs() < 1e-12 {
                    alpha_valley[q] = a;
                    valley[q] = self.degraded_stress(ev);
                }
            }
            if (t - 0.25).abs() < 1e-12 {
                rec = Some(self.record(level, f));
            }
        }
        let obs: Vec<CycleObservation> = (0..np)
            .map(|q| {
                let (s1, dir) = principal_direction(&peak[q]);
                let ratio = if s1 != 0.0 { project(&valley[q], &dir) / s1 } else { self.load.ratio };
                CycleObservation::new(alpha_max[q], alpha_valley[q], ratio).with_peak_stress(s1)
            })
            .collect();
        self.accumulate(&obs);
        Ok(rec.expect("cycle path samples the peak"))
    }

    /// Advances one cycle.
    pub fn step(&mut self) -> FemCycleOutcome {
        self.cycle += 1;
        let f = self.fatigue_factors();
        let outcome = if self.load.substeps_per_cycle <= 1 {
            self.step_representative(&f)
        } else {
            self.step_substepped(&f)
        };
        match outcome {
            Err(mode) => FemCycleOutcome::Failed(mode),
            Ok(mut rec) => {
                rec.alpha_bar = self.state.max_alpha_bar();
                let threshold = self.options.life.failure_phase_field;
                match &self.severance {
                    Some(s) if s.severed(&self.problem.mesh, &self.state.phi, threshold) => {
                        FemCycleOutcome::Failed(FailureMode::Severance)
                    }
                    None if self.load.control == ControlMode::Displacement && rec.phi >= threshold => {
                        FemCycleOutcome::Failed(FailureMode::PhaseFieldThreshold)
                    }
                    _ => FemCycleOutcome::Survived(rec),
                }
            }
        }
    }

    fn argmax_phi(&self) -> Option<usize> {
        self.state
            .phi
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }

    /// Runs to failure or the cycle cap, calling `observe` after every cycle.
    pub fn run_observed(mut self, mut observe: impl FnMut(&FemSimulator, Option<&CycleRecord>)) -> FemRun {
        let opts = self.options.life;
        let max = self.load.max_cycles;
        let mut trace = Vec::new();
        let mut next_log_record = 1e4;
        let mut initiation = None;
        let mut initiation_node = None;
        let mut failure = None;
        while self.cycle < max {
            let before = self.state.clone();
            match self.step() {
                FemCycleOutcome::Failed(mode) => {
                    if initiation.is_none() {
                        initiation = Some(self.cycle);
                        initiation_node = self.argmax_phi();
                    }
                    observe(&self, None);
                    failure = Some(mode);
                    break;
                }
                FemCycleOutcome::Survived(rec) => {
                    if initiation.is_none() && rec.phi > opts.initiation_threshold {
                        initiation = Some(self.cycle);
                        initiation_node = self.argmax_phi();
                    }
                    observe(&self, Some(&rec));
                    let steady = self.cycle > 1 && self.state == before;
                    if opts.record_trace && (self.cycle as f64 <= 1e4 || self.cycle as f64 >= next_log_record || steady)
                    {
                        trace.push(rec);
                        if self.cycle as f64 >= next_log_record {
                            next_log_record *= 10f64.powf(0.01);
                        }
                    }
                    if steady {
                        self.cycle = max;
                    }
                }
            }
        }
        let life = LifeResult {
            cycles_to_initiation: initiation,
            cycles_to_failure: failure.map(|_| self.cycle),
            runout: failure.is_none(),
            cycles_run: self.cycle,
            failure,
            trace,
        };
        FemRun {
            life,
            final_state: self.state,
            initiation_node,
            solver_iterations: self.solver_iterations,
        }
    }

    pub fn run(self) -> FemRun {
        self.run_observed(|_, _| {})
    }
}

/// Largest principal value and its direction.
fn principal_direction(t: &SymTensor) -> (f64, nalgebra::Vector3<f64>) {
    let eig = t.to_matrix().symmetric_eigen();
    let k = eig.eigenvalues.imax();
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

fn project(t: &SymTensor, n: &nalgebra::Vector3<f64>) -> f64 {
    (n.transpose() * t.to_matrix() * n)[(0, 0)]
}

/// Runs a fatigue simulation on an arbitrary mesh.
pub fn run_fatigue_fem(
    mesh: Mesh,
    load: CycleLoad,
    mat: &MaterialParams,
    model: PfModel,
    split: SplitKind,
    fp: &FatigueParams,
    options: FemOptions,
) -> Result<FemRun> {
    let problem = FemProblem::new(mesh, *mat, model, split, load.control)?;
    Ok(FemSimulator::new(problem, *fp, load, options)?.run())
}

/// Notched round bar: geometry, mesh controls and solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotchedSetup {
    pub geometry: NotchGeometry,
    #[serde(default)]
    pub mesh: MeshOptions,
    #[serde(default)]
    pub fem: FemOptions,
}

impl NotchedSetup {
    pub fn new(geometry: NotchGeometry) -> Self {
        Self {
            geometry,
            mesh: MeshOptions::default(),
            fem: FemOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.fem.solver.validate()
    }

    pub fn net_area(&self) -> f64 {
        0.25 * PI * self.geometry.net_diameter.powi(2)
    }
}

/// Summary of a notched specimen run.
#[derive(Debug, Clone, PartialEq)]
pub struct NotchedRun {
    pub life: LifeResult,
    pub final_state: FieldState,
    pub initiation_node: Option<usize>,
    /// Distance from the initiation node to the notch root.
    pub initiation_distance: Option<f64>,
    pub nodes: usize,
    pub elements: usize,
}

/// Builds the simulator for a notched specimen; the load level is the net
/// section nominal stress (load control) or the nominal end strain.
pub fn notched_simulator(
    setup: &NotchedSetup,
    load: CycleLoad,
    mat: &MaterialParams,
    model: PfModel,
    split: SplitKind,
    fp: &FatigueParams,
) -> Result<FemSimulator> {
    setup.validate()?;
    let mesh = generate_notched_mesh_with(&setup.geometry, mat.length_scale, &setup.mesh)?;
    let problem = FemProblem::new(mesh, *mat, model, split, load.control)?;
    Ok(FemSimulator::new(problem, *fp, load, setup.fem)?
        .with_nominal_section(setup.geometry.area_ratio(), setup.net_area()))
}

pub fn run_notched(
    setup: &NotchedSetup,
    load: CycleLoad,
    mat: &MaterialParams,
    model: PfModel,
    split: SplitKind,
    fp: &FatigueParams,
) -> Result<NotchedRun> {
    run_notched_observed(setup, load, mat, model, split, fp, |_, _| {})
}

pub fn run_notched_observed(
    setup: &NotchedSetup,
    load: CycleLoad,
    mat: &MaterialParams,
    model: PfModel,
    split: SplitKind,
    fp: &FatigueParams,
    observe: impl FnMut(&FemSimulator, Option<&CycleRecord>),
) -> Result<NotchedRun> {
    let sim = notched_simulator(setup, load, mat, model, split, fp)?;
    let mesh = sim.problem().mesh.clone();
    let run = sim.run_observed(observe);
    let root = mesh.node_set(ROOT).first().map(|&n| mesh.nodes[n]);
    let initiation_distance = match (run.initiation_node, root) {
        (Some(n), Some(r)) => Some((mesh.nodes[n][0] - r[0]).hypot(mesh.nodes[n][1] - r[1])),
        _ => None,
    };
    Ok(NotchedRun {
        life: run.life,
        final_state: run.final_state,
        initiation_node: run.initiation_node,
        initiation_distance,
        nodes: mesh.nodes.len(),
        elements: mesh.elements.len(),
    })
}

/// Elastic stress concentration: axial stress at the notch root over the
/// net-section nominal stress.
pub fn elastic_scf(geometry: &NotchGeometry, mat: &MaterialParams, opts: &MeshOptions) -> Result<f64> {
    let setup = NotchedSetup {
        geometry: *geometry,
        mesh: *opts,
        fem: FemOptions::default(),
    };
    let load = CycleLoad::new(ControlMode::Load, 1.0, 0.0)?;
    let fp = FatigueParams::for_material(mat, PfModel::At1, 1.0, 1.0, 0.5, 0.0, crate::fatigue::FatigueDegradation::F0)?;
    let mut sim = notched_simulator(&setup, load, mat, PfModel::At1, SplitKind::None, &fp)?;
    let u = sim.elastic_unit()?.u.clone();
    let p = sim.problem();
    let mut state = p.empty_state();
    state.u = u;
    let evals = p.evaluate(&state);
    let root = *p
        .mesh
        .node_set(ROOT)
        .first()
        .ok_or_else(|| Error::Mesh("mesh has no `root` node".into()))?;
    let (mut sum, mut count) = (0.0, 0);
    for (e, conn) in p.mesh.elements.iter().enumerate() {
        if let Some(a) = conn.iter().position(|&n| n == root) {
            let szz = [0, 1, 2, 3].map(|q| evals[4 * e + q].stress0[1]);
            sum += extrapolate_to_nodes(&szz)[a];
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Mesh("root node belongs to no element".into()));
    }
    // The unit level is a net-section nominal stress of 1.
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fatigue::FatigueDegradation;
    use crate::fem::mesh::single_element_mesh;

    fn model_setup(model: PfModel) -> (MaterialParams, FatigueParams) {
        let l = if model == PfModel::At1 { 0.375 } else { 0.1055 };
        let mat = MaterialParams::new(1.0, 0.3, 1.0, l).unwrap();
        let fp = FatigueParams::for_material(&mat, model, 100.0, 2.0, 0.5, 0.2, FatigueDegradation::F1).unwrap();
        (mat, fp)
    }

    #[test]
    fn legacy_per_increment_is_rejected() {
        let (mat, mut fp) = model_setup(PfModel::At1);
        fp.accumulation = AccumulationRule::LegacyPerIncrement;
        let load = CycleLoad::new(ControlMode::Load, 0.5, -1.0).unwrap();
        let p = FemProblem::new(
            single_element_mesh(1.0, 1.0, 1.0).unwrap(),
            mat,
            PfModel::At1,
            SplitKind::NoTension,
            ControlMode::Load,
        )
        .unwrap();
        assert!(FemSimulator::new(p, fp, load, FemOptions::default()).is_err());
    }

    #[test]
    fn below_endurance_runs_out_immediately() {
        let (mat, fp) = model_setup(PfModel::At1);
        let load = CycleLoad::new(ControlMode::Load, 0.1, -1.0).unwrap();
        let run = run_fatigue_fem(
            single_element_mesh(1.0, 1.0, 1.0).unwrap(),
            load,
            &mat,
            PfModel::At1,
            SplitKind::NoTension,
            &fp,
            FemOptions::default(),
        )
        .unwrap();
        assert!(run.life.runout);
        assert_eq!(run.life.cycles_run, load.max_cycles);
        assert_eq!(run.final_state.max_alpha_bar(), 0.0);
    }

    #[test]
    fn severance_needs_connected_band() {
        // Two stacked columns of elements; notch on the right, axis on the left.
        let mut nodes = Vec::new();
        for j in 0..2 {
            for i in 0..3 {
                nodes.push([i as f64, j as f64]);
            }
        }
        let mut node_sets = BTreeMap::new();
        node_sets.insert(AXIS.to_string(), vec![0, 3]);
        node_sets.insert(NOTCH.to_string(), vec![2, 5]);
        let mesh = Mesh {
            nodes,
            elements: vec![[0, 1, 4, 3], [1, 2, 5, 4]],
            node_sets,
            edge_sets: BTreeMap::new(),
        };
        let s = SeveranceCheck::build(&mesh).unwrap();
        let mut phi = vec![0.0; 6];
        phi[2] = 1.0;
        assert!(!s.severed(&mesh, &phi, 0.95));
        phi[0] = 1.0;
        assert!(s.severed(&mesh, &phi, 0.95));
    }
}
