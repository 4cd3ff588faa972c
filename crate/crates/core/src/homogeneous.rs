//! Cycle-by-cycle solution of a homogeneous bar under uniaxial stress.
//!
//! The strain state of the bar is diag(ε, −νε, −νε), so every energy split
//! is a quadratic in ε on each side of zero and reduces to two coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fatigue::{
    accumulate_generalized, accumulate_legacy_per_increment, accumulate_legacy_reformulated,
    accumulate_legacy_representative, AccumulationRule, CycleObservation, FatigueParams, FatigueState,
};
use crate::material::{
    crack_function, critical_point_closed_form, driving_force, g, golden_section_max, split_energy,
    MaterialParams, PfModel, SplitKind, SymTensor,
};

pub const DEFAULT_MAX_CYCLES: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlMode {
    #[serde(alias = "load-control")]
    Load,
    #[serde(alias = "displacement-control")]
    Displacement,
}

impl ControlMode {
    pub fn name(self) -> &'static str {
        match self {
            ControlMode::Load => "load",
            ControlMode::Displacement => "displacement",
        }
    }
}

/// Constant-amplitude proportional cyclic load.
///
/// `amplitude` is a stress under load control and a strain under
/// displacement control. The peak value is 2·amplitude/(1 − R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleLoad {
    pub control: ControlMode,
    pub amplitude: f64,
    pub ratio: f64,
    pub max_cycles: u64,
    /// 1 selects the representative-load mode.
    pub substeps_per_cycle: u32,
}

impl CycleLoad {
    pub fn new(control: ControlMode, amplitude: f64, ratio: f64) -> Result<Self> {
        let load = Self {
            control,
            amplitude,
            ratio,
            max_cycles: DEFAULT_MAX_CYCLES,
            substeps_per_cycle: 1,
        };
        load.validate()?;
        Ok(load)
    }

    /// Load defined by its peak value instead of its amplitude.
    pub fn from_peak(control: ControlMode, peak: f64, ratio: f64) -> Result<Self> {
        Self::new(control, 0.5 * peak * (1.0 - ratio), ratio)
    }

    pub fn with_max_cycles(mut self, max_cycles: u64) -> Self {
        self.max_cycles = max_cycles;
        self
    }

    pub fn with_substeps(mut self, substeps: u32) -> Self {
        self.substeps_per_cycle = substeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(invalid("amplitude", format!("must be > 0 (got {})", self.amplitude)));
        }
        if !(self.ratio.is_finite() && self.ratio < 1.0) {
            return Err(invalid("ratio", format!("must be finite and < 1 (got {})", self.ratio)));
        }
        if self.max_cycles < 1 {
            return Err(invalid("max_cycles", "must be >= 1"));
        }
        if self.substeps_per_cycle < 1 {
            return Err(invalid("substeps_per_cycle", "must be >= 1"));
        }
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        2.0 * self.amplitude / (1.0 - self.ratio)
    }

    pub fn valley(&self) -> f64 {
        self.ratio * self.peak()
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.peak() + self.valley())
    }

    /// Load levels sampled within one cycle as fractions of the cycle, in
    /// order. The cycle runs mean → peak → valley → mean, the first cycle
    /// starts from zero. Peak and valley are always sampled.
    pub(crate) fn cycle_path(&self, first: bool) -> Vec<(f64, f64)> {
        let m = self.substeps_per_cycle.max(1) as usize;
        let mut ts: Vec<f64> = (1..=m).map(|j| j as f64 / m as f64).collect();
        ts.extend([0.25, 0.75]);
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let start = if first { 0.0 } else { self.mean() };
        let (peak, valley, mean) = (self.peak(), self.valley(), self.mean());
        ts.into_iter()
            .map(|t| {
                let level = if t <= 0.25 {
                    start + (peak - start) * t / 0.25
                } else if t <= 0.75 {
                    peak + (valley - peak) * (t - 0.25) / 0.5
                } else {
                    valley + (mean - valley) * (t - 0.75) / 0.25
                };
                (t, level)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LifeOptions {
    /// φ above which a crack counts as initiated.
    pub initiation_threshold: f64,
    /// φ at which a displacement-controlled bar counts as failed.
    pub failure_phase_field: f64,
    /// Upper strain bracket for the load-control root, in multiples of ε_c.
    pub strain_limit_factor: f64,
    pub record_trace: bool,
}

impl Default for LifeOptions {
    fn default() -> Self {
        Self {
            initiation_threshold: 1e-3,
            failure_phase_field: 0.95,
            strain_limit_factor: 10.0,
            record_trace: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: u64,
    pub alpha_bar: f64,
    pub phi: f64,
    pub peak_stress: f64,
    pub peak_strain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureMode {
    /// The applied load exceeds the load-carrying capacity.
    LoadInstability,
    /// φ reached the failure threshold.
    PhaseFieldThreshold,
    /// A fully damaged band crosses the net section.
    Severance,
    /// The nonlinear solver gave up at the applied load.
    SolverFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifeResult {
    pub cycles_to_initiation: Option<u64>,
    pub cycles_to_failure: Option<u64>,
    pub runout: bool,
    pub cycles_run: u64,
    pub failure: Option<FailureMode>,
    pub trace: Vec<CycleRecord>,
}

/// Evolving state of one material point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointState {
    /// Running maximum of ψ⁺, without any threshold floor.
    pub psi_max: f64,
    pub phi: f64,
    pub fatigue: FatigueState,
}

/// Solves the homogeneous phase field balance
/// (Gc·f/(2c_w))·w'(φ)/(2ℓ) + g'(φ)·H = 0 and enforces irreversibility.
pub fn solve_phi_homogeneous(h: f64, f: f64, model: PfModel, mat: &MaterialParams, phi_prev: f64) -> f64 {
    let (gc, l) = (mat.toughness, mat.length_scale);
    let phi = if h <= 0.0 {
        0.0
    } else {
        match model {
            PfModel::At1 => 1.0 - 3.0 * gc * f / (16.0 * l * h),
            PfModel::At2 => 2.0 * l * h / (f * gc + 2.0 * l * h),
        }
    };
    phi.clamp(0.0, 1.0).max(phi_prev)
}

/// Residual of the homogeneous balance, used to cross-check the closed forms.
pub fn homogeneous_balance(phi: f64, h: f64, f: f64, model: PfModel, mat: &MaterialParams) -> f64 {
    let (_, wp, _) = crack_function(model, phi);
    mat.toughness * f / (2.0 * model.c_w()) * wp / (2.0 * mat.length_scale) - 2.0 * (1.0 - phi) * h
}

/// Closed-form uniaxial response of a bar.
#[derive(Debug, Clone)]
pub struct HomogeneousBar {
    pub mat: MaterialParams,
    pub model: PfModel,
    pub split: SplitKind,
    pub fatigue: FatigueParams,
    /// ψ⁺ = c_tension·ε² for ε ≥ 0.
    c_tension: f64,
    /// ψ⁺ = c_compression·ε² for ε < 0.
    c_compression: f64,
    strain_scale: f64,
}

impl HomogeneousBar {
    pub fn new(mat: MaterialParams, model: PfModel, split: SplitKind, fatigue: FatigueParams) -> Result<Self> {
        mat.validate()?;
        fatigue.validate()?;
        let nu = mat.poisson_ratio;
        let c_tension = split_energy(&SymTensor::diag(1.0, -nu, -nu), &mat, split)?.0;
        let c_compression = split_energy(&SymTensor::diag(-1.0, nu, nu), &mat, split)?.0;
        Ok(Self {
            mat,
            model,
            split,
            fatigue,
            c_tension,
            c_compression,
            strain_scale: critical_point_closed_form(model, &mat).strain,
        })
    }

    pub fn active_energy(&self, eps: f64) -> f64 {
        let c = if eps >= 0.0 { self.c_tension } else { self.c_compression };
        c * eps * eps
    }

    /// φ reached when the bar is strained to `eps` from `state`.
    pub fn phase_field_at(&self, eps: f64, state: &PointState, f: f64) -> f64 {
        let h = driving_force(state.psi_max.max(self.active_energy(eps)), self.model, &self.mat, f);
        solve_phi_homogeneous(h, f, self.model, &self.mat, state.phi)
    }

    pub fn stress_at(&self, eps: f64, state: &PointState, f: f64) -> f64 {
        let phi = self.phase_field_at(eps, state, f);
        (g(phi) + self.mat.residual_stiffness) * self.mat.youngs_modulus * eps
    }

    fn secant_modulus(&self, phi: f64) -> f64 {
        (g(phi) + self.mat.residual_stiffness) * self.mat.youngs_modulus
    }

    /// Smallest strain of the same sign as `target` at which the bar carries
    /// the stress `target`, or `None` if the load exceeds the capacity.
    /// `hint` is a strain magnitude known not to exceed the root.
    pub fn equilibrium_strain(&self, target: f64, state: &PointState, f: f64, limit: f64, hint: f64) -> Option<f64> {
        if target == 0.0 {
            return Some(0.0);
        }
        let sign = target.signum();
        let tgt = target.abs();
        let h = |t: f64| sign * self.stress_at(sign * t, state, f) - tgt;

        // Linear branch with the current damage.
        let t_lin = tgt / self.secant_modulus(state.phi);
        if t_lin <= limit && self.phase_field_at(sign * t_lin, state, f) == state.phi {
            return Some(sign * t_lin);
        }

        let mut lo = hint.clamp(0.0, t_lin.min(limit));
        let mut h_lo = h(lo);
        if h_lo > 0.0 {
            lo = 0.0;
            h_lo = -tgt;
        }
        let mut prev = 0.0;
        let mut step = (1e-3 * lo).max(1e-6 * self.strain_scale);
        loop {
            let hi = (lo + step).min(limit);
            let h_hi = h(hi);
            if h_hi >= 0.0 {
                return Some(sign * illinois(&h, lo, hi, h_lo, h_hi));
            }
            if h_hi < h_lo {
                // Passed the maximum of the response without reaching the target.
                let (t_max, h_max) = golden_section_max(&h, prev, hi, 1e-13);
                if h_max < 0.0 {
                    return None;
                }
                let (a, ha) = if t_max > lo { (lo, h_lo) } else { (prev, h(prev)) };
                return Some(sign * illinois(&h, a, t_max, ha, h_max));
            }
            if hi >= limit {
                return None;
            }
            prev = lo;
            lo = hi;
            h_lo = h_hi;
            step *= 2.0;
        }
    }

    /// Strain limit used for load-control roots.
    pub fn strain_limit(&self, factor: f64) -> f64 {
        factor * self.strain_scale
    }
}

/// Regula falsi with the Illinois modification on a sign-changing bracket.
fn illinois(h: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() <= 1e-15 * b.abs().max(a.abs()) {
            return b;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = h(c);
        if fc == 0.0 {
            return c;
        }
        if (fc < 0.0) == (fa < 0.0) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() { a } else { b }
}

/// Outcome of one simulated cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CycleOutcome {
    Survived(CycleRecord),
    Failed(FailureMode),
}

/// Stateful cycle simulator; [`run_cycles`] drives it to failure or runout.
#[derive(Debug, Clone)]
pub struct BarSimulator {
    bar: HomogeneousBar,
    load: CycleLoad,
    options: LifeOptions,
    state: PointState,
    cycle: u64,
    last_strain: f64,
    last_alpha: f64,
}

impl BarSimulator {
    pub fn new(bar: HomogeneousBar, load: CycleLoad, options: LifeOptions) -> Result<Self> {
        load.validate()?;
        Ok(Self {
            bar,
            load,
            options,
            state: PointState::default(),
            cycle: 0,
            last_strain: 0.0,
            last_alpha: 0.0,
        })
    }

    pub fn state(&self) -> &PointState {
        &self.state
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn bar(&self) -> &HomogeneousBar {
        &self.bar
    }

    /// Solves the bar at a load level; returns (strain, stress) and updates
    /// the history and phase field.
    fn apply_level(&mut self, level: f64, f: f64, hint: f64) -> std::result::Result<(f64, f64), FailureMode> {
        let eps = match self.load.control {
            ControlMode::Displacement => level,
            ControlMode::Load => {
                let limit = self.bar.strain_limit(self.options.strain_limit_factor);
                self.bar
                    .equilibrium_strain(level, &self.state, f, limit, hint)
                    .ok_or(FailureMode::LoadInstability)?
            }
        };
        self.state.phi = self.bar.phase_field_at(eps, &self.state, f);
        self.state.psi_max = self.state.psi_max.max(self.bar.active_energy(eps));
        let sigma = self.bar.secant_modulus(self.state.phi) * eps;
        Ok((eps, sigma))
    }

    /// Advances one cycle.
    pub fn step(&mut self) -> CycleOutcome {
        self.cycle += 1;
        let outcome = if self.load.substeps_per_cycle <= 1 {
            self.step_representative()
        } else {
            self.step_substepped()
        };
        match outcome {
            Ok((eps, sigma)) => {
                if self.load.control == ControlMode::Displacement
                    && self.state.phi >= self.options.failure_phase_field
                {
                    return CycleOutcome::Failed(FailureMode::PhaseFieldThreshold);
                }
                CycleOutcome::Survived(CycleRecord {
                    cycle: self.cycle,
                    alpha_bar: self.state.fatigue.alpha_bar,
                    phi: self.state.phi,
                    peak_stress: sigma,
                    peak_strain: eps,
                })
            }
            Err(mode) => CycleOutcome::Failed(mode),
        }
    }

    fn step_representative(&mut self) -> std::result::Result<(f64, f64), FailureMode> {
        let p = self.bar.fatigue;
        let f = p.degradation(self.state.fatigue.alpha_bar);
        let hint = self.last_strain.abs();
        let (eps_p, sigma_p) = self.apply_level(self.load.peak(), f, hint)?;
        self.last_strain = eps_p;
        let eps_v = self.load.ratio * eps_p;
        let gphi = g(self.state.phi);
        let alpha_max = gphi * self.bar.active_energy(eps_p);
        let alpha_min = gphi * self.bar.active_energy(eps_v);
        self.state.psi_max = self.state.psi_max.max(self.bar.active_energy(eps_v));
        let obs = CycleObservation::new(alpha_max, alpha_min, self.load.ratio).with_peak_stress(sigma_p);
        let delta = match p.accumulation {
            AccumulationRule::GeneralizedOnePerCycle => {
                self.state.fatigue = accumulate_generalized(self.state.fatigue, &obs, &p);
                0.0
            }
            AccumulationRule::LegacyReformulated => accumulate_legacy_reformulated(&obs, p.n, p.alpha_n),
            AccumulationRule::LegacyRepresentative => {
                accumulate_legacy_representative(alpha_max, self.load.ratio, p.n, p.alpha_n)
            }
            AccumulationRule::LegacyPerIncrement => {
                // Proportional path with φ frozen: α(t) = g(φ)·ψ⁺(ε(t)).
                let path = self.load.with_substeps(8).cycle_path(self.cycle == 1);
                let mut seq = vec![self.last_alpha];
                seq.extend(
                    path.iter()
                        .map(|&(_, level)| gphi * self.bar.active_energy(eps_p * level / self.load.peak())),
                );
                self.last_alpha = *seq.last().unwrap();
                accumulate_legacy_per_increment(&seq)
            }
        };
        self.state.fatigue.alpha_bar += delta;
        Ok((eps_p, sigma_p))
    }

    fn step_substepped(&mut self) -> std::result::Result<(f64, f64), FailureMode> {
        let p = self.bar.fatigue;
        let path = self.load.cycle_path(self.cycle == 1);
        let mut f = p.degradation(self.state.fatigue.alpha_bar);
        let mut peak = (0.0, 0.0);
        let mut alpha_max: f64 = 0.0;
        let mut valley_alpha = 0.0;
        let mut valley_sigma = 0.0;
        let mut hint = 0.0;
        let mut prev_level = if self.cycle == 1 { 0.0 } else { self.load.mean() };
        for (t, level) in path {
            if level.signum() != prev_level.signum() {
                hint = 0.0;
            }
            let (eps, sigma) = self.apply_level(level, f, hint)?;
            hint = eps.abs();
            prev_level = level;
            let alpha = g(self.state.phi) * self.bar.active_energy(eps);
            if self.load.control == ControlMode::Displacement && self.state.phi >= self.options.failure_phase_field {
                return Ok((eps, sigma));
            }
            if p.accumulation == AccumulationRule::LegacyPerIncrement {
                self.state.fatigue.alpha_bar += (alpha - self.last_alpha).max(0.0);
                f = p.degradation(self.state.fatigue.alpha_bar);
            }
            self.last_alpha = alpha;
            alpha_max = alpha_max.max(alpha);
            if (t - 0.25).abs() < 1e-12 {
                peak = (eps, sigma);
            }
            if (t - 0.75).abs() < 1e-12 {
                valley_alpha = alpha;
                valley_sigma = sigma;
            }
        }
        let ratio = if peak.1 != 0.0 { valley_sigma / peak.1 } else { self.load.ratio };
        let obs = CycleObservation::new(alpha_max, valley_alpha, ratio).with_peak_stress(peak.1);
        match p.accumulation {
            AccumulationRule::GeneralizedOnePerCycle => {
                self.state.fatigue = accumulate_generalized(self.state.fatigue, &obs, &p);
            }
            AccumulationRule::LegacyReformulated => {
                self.state.fatigue.alpha_bar += accumulate_legacy_reformulated(&obs, p.n, p.alpha_n);
            }
            AccumulationRule::LegacyRepresentative => {
                self.state.fatigue.alpha_bar += accumulate_legacy_representative(alpha_max, ratio, p.n, p.alpha_n);
            }
            AccumulationRule::LegacyPerIncrement => {}
        }
        self.last_strain = peak.0;
        Ok(peak)
    }

    /// Runs until failure or the cycle cap.
    pub fn run(mut self) -> LifeResult {
        let mut trace = Vec::new();
        let mut next_log_record = 1e4;
        let mut initiation = None;
        let max = self.load.max_cycles;
        while self.cycle < max {
            let before = (self.state, self.last_alpha, self.last_strain);
            match self.step() {
                CycleOutcome::Failed(mode) => {
                    if self.options.record_trace && mode == FailureMode::LoadInstability {
                        // The bar is driven through the top of its degraded envelope.
                        let f = self.bar.fatigue.degradation(self.state.fatigue.alpha_bar);
                        let env = monotonic_response_from(&self.bar, &self.state, 200);
                        trace.push(CycleRecord {
                            cycle: self.cycle,
                            alpha_bar: self.state.fatigue.alpha_bar,
                            phi: self.bar.phase_field_at(env.peak_strain, &self.state, f),
                            peak_stress: env.peak_stress,
                            peak_strain: env.peak_strain,
                        });
                    }
                    if initiation.is_none() {
                        initiation = Some(self.cycle);
                    }
                    return LifeResult {
                        cycles_to_initiation: initiation,
                        cycles_to_failure: Some(self.cycle),
                        runout: false,
                        cycles_run: self.cycle,
                        failure: Some(mode),
                        trace,
                    };
                }
                CycleOutcome::Survived(rec) => {
                    if initiation.is_none() && rec.phi > self.options.initiation_threshold {
                        initiation = Some(self.cycle);
                    }
                    let steady = (self.state, self.last_alpha, self.last_strain) == before && self.cycle > 1;
                    if self.options.record_trace
                        && (self.cycle as f64 <= 1e4 || self.cycle as f64 >= next_log_record || steady)
                    {
                        trace.push(rec);
                        if self.cycle as f64 >= next_log_record {
                            next_log_record *= 10f64.powf(0.01);
                        }
                    }
                    if steady {
                        // Every later cycle repeats this one exactly.
                        self.cycle = max;
                    }
                }
            }
        }
        LifeResult {
            cycles_to_initiation: initiation,
            cycles_to_failure: None,
            runout: true,
            cycles_run: self.cycle,
            failure: None,
            trace,
        }
    }
}

pub fn run_cycles(
    load: CycleLoad,
    mat: &MaterialParams,
    model: PfModel,
    split: SplitKind,
    fp: &FatigueParams,
) -> Result<LifeResult> {
    run_cycles_with(load, mat, model, split, fp, LifeOptions::default())
}

pub fn run_cycles_with(
    load: CycleLoad,
    mat: &MaterialParams,
    model: PfModel,
    split: SplitKind,
    fp: &FatigueParams,
    options: LifeOptions,
) -> Result<LifeResult> {
    let bar = HomogeneousBar::new(*mat, model, split, *fp)?;
    Ok(BarSimulator::new(bar, load, options)?.run())
}

/// Strain-driven monotonic response with frozen fatigue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicCurve {
    pub points: Vec<(f64, f64)>,
    pub peak_stress: f64,
    pub peak_strain: f64,
}

/// Monotonic tension of a pristine bar whose fatigue history is `alpha_bar_start`.
pub fn monotonic_response(
    mat: &MaterialParams,
    model: PfModel,
    split: SplitKind,
    fp: &FatigueParams,
    alpha_bar_start: f64,
) -> Result<MonotonicCurve> {
    if !(alpha_bar_start >= 0.0) {
        return Err(invalid("alpha_bar_start", "must be >= 0"));
    }
    let bar = HomogeneousBar::new(*mat, model, split, *fp)?;
    let state = PointState {
        fatigue: FatigueState {
            alpha_bar: alpha_bar_start,
            peak_tracker: 0.0,
        },
        ..PointState::default()
    };
    Ok(monotonic_response_from(&bar, &state, 400))
}

/// Monotonic tension starting from an arbitrary state (e.g. after cycling).
pub fn monotonic_response_from(bar: &HomogeneousBar, state: &PointState, samples: usize) -> MonotonicCurve {
    let f = bar.fatigue.degradation(state.fatigue.alpha_bar);
    let limit = bar.strain_limit(LifeOptions::default().strain_limit_factor);
    let sigma = |e: f64| bar.stress_at(e, state, f);
    let samples = samples.max(2);
    let points: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let e = limit * i as f64 / (samples - 1) as f64;
            (e, sigma(e))
        })
        .collect();
    // Bracket the maximum on the sampled grid before refining it.
    let imax = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let a = points[imax.saturating_sub(1)].0;
    let b = points[(imax + 1).min(samples - 1)].0;
    let (peak_strain, peak_stress) = golden_section_max(sigma, a, b, 1e-14);
    MonotonicCurve {
        points,
        peak_stress,
        peak_strain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fatigue::FatigueDegradation;
    use crate::material::critical_point;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn model_material(model: PfModel) -> MaterialParams {
        let l = match model {
            PfModel::At1 => 0.375,
            PfModel::At2 => 0.1055,
        };
        MaterialParams::new(1.0, 0.3, 1.0, l).unwrap()
    }

    fn fatigue(model: PfModel, n: f64) -> FatigueParams {
        FatigueParams::for_material(&model_material(model), model, 100.0, n, 0.5, 0.2, FatigueDegradation::F2).unwrap()
    }

    #[test]
    fn closed_form_phase_field() {
        let m = model_material(PfModel::At1);
        let hmin = 3.0 / (16.0 * 0.375);
        assert_eq!(solve_phi_homogeneous(hmin, 1.0, PfModel::At1, &m, 0.0), 0.0);
        assert_eq!(solve_phi_homogeneous(0.3, 0.0, PfModel::At1, &m, 0.0), 1.0);
        assert_eq!(solve_phi_homogeneous(0.0, 1.0, PfModel::At2, &m, 0.2), 0.2);
        assert_eq!(solve_phi_homogeneous(0.0, 0.0, PfModel::At2, &m, 0.0), 0.0);
    }

    #[test]
    fn closed_forms_zero_the_balance() {
        // Bisection oracle on the scalar balance.
        for model in [PfModel::At1, PfModel::At2] {
            let m = model_material(model);
            for &(h, f) in &[(0.7, 1.0), (2.5, 0.4), (0.9, 0.9), (10.0, 0.05)] {
                let phi = solve_phi_homogeneous(h, f, model, &m, 0.0);
                let (mut a, mut b) = (0.0, 1.0 - 1e-15);
                let r = |p: f64| homogeneous_balance(p, h, f, model, &m);
                for _ in 0..200 {
                    let c = 0.5 * (a + b);
                    if (r(c) < 0.0) == (r(a) < 0.0) { a = c } else { b = c }
                }
                assert_relative_eq!(phi, 0.5 * (a + b), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn peak_and_valley_of_load() {
        let load = CycleLoad::new(ControlMode::Load, 0.5, -1.0).unwrap();
        assert_eq!(load.peak(), 0.5);
        assert_eq!(load.valley(), -0.5);
        let load = CycleLoad::from_peak(ControlMode::Load, 0.4, 0.5).unwrap();
        assert_relative_eq!(load.amplitude, 0.1);
        assert!(CycleLoad::new(ControlMode::Load, -0.1, 0.0).is_err());
        assert!(CycleLoad::new(ControlMode::Load, 0.1, 1.0).is_err());
        let path = load.with_substeps(8).cycle_path(false);
        assert_eq!(path.len(), 8);
        assert_relative_eq!(path[1].1, 0.4);
        assert_relative_eq!(path[5].1, 0.2);
    }

    #[test]
    fn pristine_monotonic_peak_matches_critical_strength() {
        for model in [PfModel::At1, PfModel::At2] {
            let m = model_material(model);
            let curve = monotonic_response(&m, model, SplitKind::None, &fatigue(model, 1.0), 0.0).unwrap();
            assert_relative_eq!(curve.peak_stress, critical_point(model, &m).stress, max_relative = 1e-6);
        }
    }

    #[test]
    fn fatigued_monotonic_peak() {
        let model = PfModel::At1;
        let m = model_material(model);
        let p = fatigue(model, 1.0);
        let half = monotonic_response(&m, model, SplitKind::None, &p, 50.0).unwrap();
        assert_relative_eq!(half.peak_stress, 0.5, max_relative = 1e-6);
        let dead = monotonic_response(&m, model, SplitKind::None, &p, 100.0).unwrap();
        assert!(dead.peak_stress < 1e-5);
    }

    #[test]
    fn load_control_finite_life() {
        let model = PfModel::At1;
        let m = model_material(model);
        let load = CycleLoad::new(ControlMode::Load, 0.5, -1.0).unwrap();
        let life = run_cycles(load, &m, model, SplitKind::NoTension, &fatigue(model, 1.0)).unwrap();
        assert!(!life.runout);
        assert_eq!(life.failure, Some(FailureMode::LoadInstability));
        let nf = life.cycles_to_failure.unwrap();
        assert!(nf > 10 && nf < 10_000, "{nf}");
    }

    /// Independent per-cycle recursion for the AT1/F2 no-tension bar: φ stays
    /// zero until the degraded strength drops below the applied stress.
    #[test]
    fn at1_life_matches_scripted_recursion() {
        let model = PfModel::At1;
        let m = model_material(model);
        let p = fatigue(model, 1.0);
        let sigma = 0.5;
        let nu: f64 = 0.3;
        let ct = 0.5 - nu * nu / (1.0 - nu);
        let hmin = 3.0 / (16.0 * 0.375);
        let eps = sigma / (1.0 + 1e-7);
        let alpha = ct * eps * eps;
        let mut abar: f64 = 0.0;
        let mut n = 0u64;
        loop {
            n += 1;
            let f = (1.0 - abar / 100.0).max(0.0).powi(2);
            if alpha > f * hmin {
                break;
            }
            abar += alpha / p.alpha_n;
        }
        let load = CycleLoad::new(ControlMode::Load, sigma, -1.0).unwrap();
        let life = run_cycles(load, &m, model, SplitKind::NoTension, &p).unwrap();
        assert_eq!(life.cycles_to_failure, Some(n));
    }

    #[test]
    fn endurance_runout_is_detected_quickly() {
        let model = PfModel::At1;
        let m = model_material(model);
        let load = CycleLoad::new(ControlMode::Load, 0.15, -1.0).unwrap();
        let life = run_cycles(load, &m, model, SplitKind::NoTension, &fatigue(model, 1.0)).unwrap();
        assert!(life.runout);
        assert_eq!(life.cycles_run, DEFAULT_MAX_CYCLES);
        assert_eq!(life.cycles_to_failure, None);
    }

    #[test]
    fn higher_alpha0_lives_longer() {
        let model = PfModel::At1;
        let m = model_material(model);
        let mut lives = vec![];
        for a0 in [1e2, 1e3, 1e4] {
            let mut p = fatigue(model, 1.0);
            p.alpha0 = a0;
            let load = CycleLoad::new(ControlMode::Load, 0.5, -1.0).unwrap();
            lives.push(run_cycles(load, &m, model, SplitKind::NoTension, &p).unwrap().cycles_to_failure.unwrap());
        }
        assert!(lives[0] < lives[1] && lives[1] < lives[2], "{lives:?}");
    }

    #[test]
    fn at2_load_control_accelerates_before_failure() {
        let model = PfModel::At2;
        let m = model_material(model);
        let load = CycleLoad::new(ControlMode::Load, 0.5, -1.0).unwrap();
        let life = run_cycles(load, &m, model, SplitKind::NoTension, &fatigue(model, 1.0)).unwrap();
        let t = &life.trace;
        assert!(t.len() > 3);
        let first = t[0].phi;
        let last = t[t.len() - 1].phi - t[t.len() - 2].phi;
        assert!(last > first, "{last} vs {first}");
        for w in t.windows(2) {
            assert!(w[1].phi >= w[0].phi && w[1].alpha_bar >= w[0].alpha_bar);
        }
    }

    #[test]
    fn displacement_control_fails_by_threshold() {
        let model = PfModel::At2;
        let m = model_material(model);
        let eps_c = critical_point(model, &m).strain;
        let load = CycleLoad::new(ControlMode::Displacement, 0.5 * eps_c, -1.0).unwrap();
        let life = run_cycles(load, &m, model, SplitKind::NoTension, &fatigue(model, 1.0)).unwrap();
        assert_eq!(life.failure, Some(FailureMode::PhaseFieldThreshold));
        assert!(life.trace.iter().all(|r| r.phi < 1.0));
    }

    #[test]
    fn substepped_generalized_matches_representative() {
        let model = PfModel::At1;
        let m = model_material(model);
        let mut p = fatigue(model, 1.0);
        p.alpha_n = 1.0;
        p.alpha_e = 0.0;
        let load = CycleLoad::new(ControlMode::Load, 0.5, -1.0).unwrap();
        let rep = run_cycles(load, &m, model, SplitKind::NoTension, &p).unwrap();
        let sub = run_cycles(load.with_substeps(16), &m, model, SplitKind::NoTension, &p).unwrap();
        let (a, b) = (rep.cycles_to_failure.unwrap(), sub.cycles_to_failure.unwrap());
        assert!(a.abs_diff(b) <= 1, "{a} vs {b}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sn_monotone_in_amplitude(s1 in 0.3f64..0.8, s2 in 0.3f64..0.8) {
            prop_assume!((s1 - s2).abs() > 0.02);
            let model = PfModel::At1;
            let m = model_material(model);
            let p = fatigue(model, 2.0);
            let life = |s: f64| {
                let load = CycleLoad::new(ControlMode::Load, s, -1.0).unwrap();
                run_cycles_with(load, &m, model, SplitKind::NoTension, &p, LifeOptions { record_trace: false, ..Default::default() })
                    .unwrap().cycles_to_failure.unwrap()
            };
            let (lo, hi) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
            prop_assert!(life(lo) > life(hi));
        }
    }
}
