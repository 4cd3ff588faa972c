//! Fatigue degradation of the toughness and accumulation of the fatigue
//! history variable ᾱ.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::material::{critical_point, g, MaterialParams, PfModel};

/// Fatigue degradation function applied to Gc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FatigueDegradation {
    /// Threshold form: no degradation until ᾱ reaches ᾱ₀.
    F0,
    /// Asymptotic form.
    F1,
    /// Vanishes at ᾱ = ᾱ₀.
    F2,
}

impl FatigueDegradation {
    pub const ALL: [FatigueDegradation; 3] = [Self::F0, Self::F1, Self::F2];

    pub fn name(self) -> &'static str {
        match self {
            Self::F0 => "F0",
            Self::F1 => "F1",
            Self::F2 => "F2",
        }
    }
}

/// How ᾱ is accumulated over a load cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccumulationRule {
    /// One increment per cycle with endurance gate and Walker correction.
    GeneralizedOnePerCycle,
    /// Sum of positive increments of α sampled within the cycle.
    LegacyPerIncrement,
    /// Per-cycle closed form using peak and valley values.
    LegacyReformulated,
    /// Per-cycle closed form using the peak value and the load ratio.
    LegacyRepresentative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatigueParams {
    /// Fatigue susceptibility ᾱ₀.
    pub alpha0: f64,
    pub n: f64,
    /// Walker exponent κ.
    pub kappa: f64,
    /// Endurance threshold α_e.
    pub alpha_e: f64,
    /// Normalization α_n.
    pub alpha_n: f64,
    pub fdeg: FatigueDegradation,
    pub accumulation: AccumulationRule,
}

impl FatigueParams {
    /// Parameters with the default normalization ½σ_cε_c and the endurance
    /// threshold σ_e²/(2E).
    pub fn for_material(
        mat: &MaterialParams,
        model: PfModel,
        alpha0: f64,
        n: f64,
        kappa: f64,
        endurance_stress: f64,
        fdeg: FatigueDegradation,
    ) -> Result<Self> {
        let cp = critical_point(model, mat);
        let p = Self {
            alpha0,
            n,
            kappa,
            alpha_e: endurance_stress * endurance_stress / (2.0 * mat.youngs_modulus),
            alpha_n: 0.5 * cp.stress * cp.strain,
            fdeg,
            accumulation: AccumulationRule::GeneralizedOnePerCycle,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0.is_finite() && self.alpha0 > 0.0) {
            return Err(invalid("alpha0", format!("must be > 0 (got {})", self.alpha0)));
        }
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(invalid("n", format!("must be >= 1 (got {})", self.n)));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(invalid("kappa", format!("must lie in [0, 1] (got {})", self.kappa)));
        }
        if !(self.alpha_e.is_finite() && self.alpha_e >= 0.0) {
            return Err(invalid("alpha_e", format!("must be >= 0 (got {})", self.alpha_e)));
        }
        if !(self.alpha_n.is_finite() && self.alpha_n > 0.0) {
            return Err(invalid("alpha_n", format!("must be > 0 (got {})", self.alpha_n)));
        }
        Ok(())
    }

    pub fn degradation(&self, alpha_bar: f64) -> f64 {
        fatigue_degradation(self.fdeg, alpha_bar, self.alpha0)
    }
}

/// Per-point fatigue history.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FatigueState {
    pub alpha_bar: f64,
    /// Running maximum of α_max·((1−R)/2)^{2κ}.
    pub peak_tracker: f64,
}

/// Peak and valley values of the fatigue driving variable over one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleObservation {
    pub alpha_max: f64,
    pub alpha_min: f64,
    /// σ₁,min / σ₁,max.
    pub ratio: f64,
    /// Maximum principal stress at the peak, when known. Cycles whose peak is
    /// not tensile do not accumulate.
    pub peak_stress: Option<f64>,
}

impl CycleObservation {
    pub fn new(alpha_max: f64, alpha_min: f64, ratio: f64) -> Self {
        Self {
            alpha_max,
            alpha_min,
            ratio,
            peak_stress: None,
        }
    }

    pub fn with_peak_stress(mut self, sigma: f64) -> Self {
        self.peak_stress = Some(sigma);
        self
    }
}

pub fn fatigue_degradation(fdeg: FatigueDegradation, alpha_bar: f64, alpha0: f64) -> f64 {
    let a = alpha_bar.max(0.0);
    match fdeg {
        FatigueDegradation::F0 => {
            if a <= alpha0 {
                1.0
            } else {
                (1.0 - (a - alpha0) / (a + alpha0)).powi(2)
            }
        }
        FatigueDegradation::F1 => (1.0 - a / (a + alpha0)).powi(2),
        FatigueDegradation::F2 => {
            if a >= alpha0 {
                0.0
            } else {
                (1.0 - a / alpha0).powi(2)
            }
        }
    }
}

/// α = g(φ)·ψ⁺.
pub fn fatigue_driving(psi_plus: f64, phi: f64) -> f64 {
    g(phi.clamp(0.0, 1.0)) * psi_plus
}

/// Walker mean-stress factor ((1−R)/2)^κ.
pub fn walker_factor(ratio: f64, kappa: f64) -> Result<f64> {
    let base = 0.5 * (1.0 - ratio);
    if !(base >= 0.0) {
        return Err(Error::Domain {
            name: "R",
            value: ratio,
            expected: "R <= 1",
        });
    }
    Ok(base.powf(kappa))
}

/// One-per-cycle increment with latching endurance gate.
pub fn accumulate_generalized(state: FatigueState, obs: &CycleObservation, p: &FatigueParams) -> FatigueState {
    let tensile = obs.peak_stress.is_none_or(|s| s > 0.0);
    let base = 0.5 * (1.0 - obs.ratio);
    if !tensile || !(obs.alpha_max > 0.0) || !(base > 0.0) {
        return state;
    }
    let w2 = base.powf(2.0 * p.kappa);
    let peak_tracker = state.peak_tracker.max(obs.alpha_max * w2);
    let delta = if peak_tracker > p.alpha_e {
        (obs.alpha_max / p.alpha_n).powf(p.n) * w2.powf(p.n)
    } else {
        0.0
    };
    FatigueState {
        alpha_bar: state.alpha_bar + delta,
        peak_tracker,
    }
}

/// Sum of the positive increments of a sampled α history.
pub fn accumulate_legacy_per_increment(alpha_seq: &[f64]) -> f64 {
    alpha_seq.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum()
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// (α_max^n − sgn(R)·α_min^n)/α_n^n.
pub fn accumulate_legacy_reformulated(obs: &CycleObservation, n: f64, alpha_n: f64) -> f64 {
    let a_max = obs.alpha_max.max(0.0);
    let a_min = obs.alpha_min.max(0.0);
    ((a_max.powf(n) - sgn(obs.ratio) * a_min.powf(n)) / alpha_n.powf(n)).max(0.0)
}

/// (α_max/α_n)^n·(1 − sgn(R)|R|^{2n}).
pub fn accumulate_legacy_representative(alpha_max: f64, ratio: f64, n: f64, alpha_n: f64) -> f64 {
    let a = alpha_max.max(0.0) / alpha_n;
    (a.powf(n) * (1.0 - sgn(ratio) * ratio.abs().powf(2.0 * n))).max(0.0)
}

/// ᾱ₀ that makes an AT1/F2 bar at stress ratio `s = σ/σ_c` fail after
/// `n_ref` cycles, with the elastic energy evaluated in the undamaged state.
pub fn estimate_alpha0(n_ref: f64, s: f64, n: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain {
            name: "sigma/sigma_c",
            value: s,
            expected: "0 < sigma/sigma_c < 1",
        });
    }
    if !(n_ref > 0.0) {
        return Err(Error::Domain {
            name: "N_ref",
            value: n_ref,
            expected: "N_ref > 0",
        });
    }
    Ok(n_ref * s.powf(2.0 * n) / (1.0 - s))
}

/// Coefficients (C1, C2) of n = C1·m + C2.
pub fn slope_table_coefficients(model: PfModel, fdeg: FatigueDegradation) -> (f64, f64) {
    use FatigueDegradation::*;
    match (model, fdeg) {
        (PfModel::At1, F0) => (0.50, -0.56),
        (PfModel::At1, F1) => (0.50, -0.63),
        (PfModel::At1, F2) => (0.50, -0.13),
        (PfModel::At2, F0) => (0.50, -0.55),
        (PfModel::At2, F1) => (0.49, -0.61),
        (PfModel::At2, F2) => (0.49, -0.12),
    }
}

/// Power exponent n for a target S-N slope `m = −1/m*`.
pub fn slope_to_exponent(m: f64, model: PfModel, fdeg: FatigueDegradation) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Domain {
            name: "m",
            value: m,
            expected: "m > 0",
        });
    }
    let (c1, c2) = slope_table_coefficients(model, fdeg);
    Ok(c1 * m + c2)
}
