//! S-N campaigns, Basquin fits and regeneration of the n–slope coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fatigue::{slope_table_coefficients, FatigueDegradation, FatigueParams};
use crate::fem::{run_notched, NotchedSetup};
use crate::homogeneous::{run_cycles_with, ControlMode, CycleLoad, LifeOptions, LifeResult};
use crate::material::{critical_point, MaterialParams, PfModel, SplitKind};

/// One point of a virtual S-N curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SNPoint {
    /// Stress amplitude, or peak stress for peak-defined grids.
    pub amplitude: f64,
    pub ratio: f64,
    /// Cycles to failure; equals the cycle cap for runouts.
    pub cycles_to_failure: u64,
    pub runout: bool,
    pub cycles_to_initiation: Option<u64>,
    /// Set when the run could not be carried out.
    pub error: Option<String>,
}

impl SNPoint {
    pub fn from_life(amplitude: f64, ratio: f64, life: &LifeResult) -> Self {
        Self {
            amplitude,
            ratio,
            cycles_to_failure: life.cycles_to_failure.unwrap_or(life.cycles_run),
            runout: life.runout,
            cycles_to_initiation: life.cycles_to_initiation,
            error: None,
        }
    }

    fn usable(&self) -> bool {
        !self.runout && self.error.is_none()
    }
}

/// Basquin fit σ = C*·N^{m*}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasquinFit {
    pub c_star: f64,
    pub m_star: f64,
    /// −1/m*.
    pub m: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Least-squares line `y = a + b·x`; returns (a, b, r²).
fn linear_regression(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 1e-300) {
        return None;
    }
    let b = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Some((my - b * mx, b, r2))
}

/// Fits log σ against log N over the finite-life points.
pub fn fit_basquin(points: &[SNPoint]) -> Result<BasquinFit> {
    let used: Vec<&SNPoint> = points.iter().filter(|p| p.usable()).collect();
    if used.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 finite-life points, got {}", used.len())));
    }
    let x: Vec<f64> = used.iter().map(|p| (p.cycles_to_failure as f64).log10()).collect();
    let y: Vec<f64> = used.iter().map(|p| p.amplitude.log10()).collect();
    let (a, b, r2) =
        linear_regression(&x, &y).ok_or_else(|| Error::Fit("all points share one life (vertical data)".into()))?;
    if b == 0.0 {
        return Err(Error::Fit("zero slope".into()));
    }
    Ok(BasquinFit {
        c_star: 10f64.powf(a),
        m_star: b,
        m: -1.0 / b,
        r_squared: r2,
        points_used: used.len(),
    })
}

/// Window used to fit the linear part of a virtual S-N curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearRegime {
    /// Largest amplitude kept, as a fraction of the reference strength.
    pub max_amplitude_ratio: f64,
    pub min_cycles: u64,
    /// Only lives within this many decades of the longest finite life.
    pub decades: f64,
}

impl Default for LinearRegime {
    fn default() -> Self {
        Self {
            max_amplitude_ratio: 0.7,
            min_cycles: 100,
            decades: 1.0,
        }
    }
}

/// Keeps the finite-life points in the low-amplitude linear regime.
pub fn select_linear_regime(points: &[SNPoint], strength: f64, window: &LinearRegime) -> Vec<SNPoint> {
    let finite: Vec<&SNPoint> = points
        .iter()
        .filter(|p| {
            p.usable() && p.amplitude <= window.max_amplitude_ratio * strength * (1.0 + 1e-12)
                && p.cycles_to_failure >= window.min_cycles
        })
        .collect();
    let Some(longest) = finite.iter().map(|p| p.cycles_to_failure).max() else {
        return Vec::new();
    };
    let floor = longest as f64 / 10f64.powf(window.decades);
    finite
        .into_iter()
        .filter(|p| p.cycles_to_failure as f64 >= floor)
        .cloned()
        .collect()
}

/// Built-in material with its fatigue calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialPreset {
    pub name: &'static str,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub toughness: f64,
    /// Length scale for (AT1, AT2).
    pub length_scale: (f64, f64),
    pub endurance_stress: f64,
    pub alpha0: f64,
    pub n: f64,
    pub kappa: f64,
}

impl MaterialPreset {
    pub fn material(&self, model: PfModel) -> MaterialParams {
        let l = match model {
            PfModel::At1 => self.length_scale.0,
            PfModel::At2 => self.length_scale.1,
        };
        MaterialParams::new(self.youngs_modulus, self.poisson_ratio, self.toughness, l)
            .expect("preset constants are valid")
    }

    pub fn fatigue(&self, model: PfModel, fdeg: FatigueDegradation) -> FatigueParams {
        FatigueParams::for_material(
            &self.material(model),
            model,
            self.alpha0,
            self.n,
            self.kappa,
            self.endurance_stress,
            fdeg,
        )
        .expect("preset constants are valid")
    }
}

/// Units: N, mm, MPa; toughness in kJ/m² = N/mm.
pub fn material_presets() -> Vec<MaterialPreset> {
    vec![
        MaterialPreset {
            name: "AISI4340",
            youngs_modulus: 210e3,
            poisson_ratio: 0.3,
            toughness: 20.0,
            length_scale: (0.318, 0.318),
            endurance_stress: 530.0,
            alpha0: 5.0e-4,
            n: 10.0,
            kappa: 0.55,
        },
        MaterialPreset {
            name: "300M",
            youngs_modulus: 210e3,
            poisson_ratio: 0.3,
            toughness: 13.0,
            length_scale: (0.315, 0.315),
            endurance_stress: 650.0,
            alpha0: 1.7e1,
            n: 6.0,
            kappa: 0.5,
        },
        MaterialPreset {
            name: "ModelMaterial",
            youngs_modulus: 1.0,
            poisson_ratio: 0.3,
            toughness: 1.0,
            length_scale: (0.375, 0.1055),
            endurance_stress: 0.2,
            alpha0: 100.0,
            n: 1.0,
            kappa: 0.5,
        },
    ]
}

pub fn preset(name: &str) -> Option<MaterialPreset> {
    let key = name.to_ascii_lowercase().replace(['-', '_', ' '], "");
    material_presets().into_iter().find(|p| {
        let pk = p.name.to_ascii_lowercase();
        pk == key || (key == "m300" && pk == "300m")
    })
}

/// How grid values are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeKind {
    #[default]
    Amplitude,
    /// Grid values are peak loads.
    Peak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Solver {
    Homogeneous,
    Notched(NotchedSetup),
}

/// A grid of constant-amplitude runs sharing one material and model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub material_name: String,
    pub material: MaterialParams,
    pub model: PfModel,
    pub split: SplitKind,
    pub fatigue: FatigueParams,
    pub control: ControlMode,
    pub amplitude_kind: AmplitudeKind,
    pub amplitudes: Vec<f64>,
    pub ratios: Vec<f64>,
    pub max_cycles: u64,
    pub substeps_per_cycle: u32,
    pub options: LifeOptions,
    pub solver: Solver,
}

impl Campaign {
    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.fatigue.validate()?;
        if self.amplitudes.is_empty() || self.ratios.is_empty() {
            return Err(invalid("loading", "load grid must not be empty"));
        }
        for &(a, r) in &self.grid() {
            self.load(a, r)?;
        }
        Ok(())
    }

    /// Grid points in output order: ratio-major, then amplitude.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.ratios
            .iter()
            .flat_map(|&r| self.amplitudes.iter().map(move |&a| (a, r)))
            .collect()
    }

    pub fn load(&self, value: f64, ratio: f64) -> Result<CycleLoad> {
        let load = match self.amplitude_kind {
            AmplitudeKind::Amplitude => CycleLoad::new(self.control, value, ratio)?,
            AmplitudeKind::Peak => CycleLoad::from_peak(self.control, value, ratio)?,
        };
        Ok(load.with_max_cycles(self.max_cycles).with_substeps(self.substeps_per_cycle))
    }

    pub fn run_point(&self, value: f64, ratio: f64) -> Result<LifeResult> {
        let load = self.load(value, ratio)?;
        match &self.solver {
            Solver::Homogeneous => {
                run_cycles_with(load, &self.material, self.model, self.split, &self.fatigue, self.options)
            }
            Solver::Notched(setup) => {
                let mut setup = setup.clone();
                setup.fem.life = self.options;
                Ok(run_notched(&setup, load, &self.material, self.model, self.split, &self.fatigue)?.life)
            }
        }
    }
}

/// Runs every grid point; failures are kept per point.
pub fn sn_curve(campaign: &Campaign) -> Vec<SNPoint> {
    campaign
        .grid()
        .par_iter()
        .map(|&(a, r)| match campaign.run_point(a, r) {
            Ok(life) => SNPoint::from_life(a, r, &life),
            Err(e) => SNPoint {
                amplitude: a,
                ratio: r,
                cycles_to_failure: 0,
                runout: false,
                cycles_to_initiation: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// Result row of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub material: String,
    pub model: String,
    pub split: String,
    pub fdeg: String,
    pub n: f64,
    pub kappa: f64,
    pub alpha0: f64,
    pub alpha_e: f64,
    pub control: String,
    pub amplitude: f64,
    #[serde(rename = "R")]
    pub ratio: f64,
    #[serde(rename = "N_i")]
    pub n_i: Option<u64>,
    #[serde(rename = "N_f")]
    pub n_f: Option<u64>,
    pub runout: bool,
}

pub fn csv_rows(campaign: &Campaign, points: &[SNPoint]) -> Vec<CsvRow> {
    let fp = &campaign.fatigue;
    points
        .iter()
        .map(|p| CsvRow {
            material: campaign.material_name.clone(),
            model: campaign.model.name().into(),
            split: campaign.split.name().into(),
            fdeg: fp.fdeg.name().into(),
            n: fp.n,
            kappa: fp.kappa,
            alpha0: fp.alpha0,
            alpha_e: fp.alpha_e,
            control: campaign.control.name().into(),
            amplitude: p.amplitude,
            ratio: p.ratio,
            n_i: p.cycles_to_initiation,
            n_f: if p.error.is_some() { None } else { Some(p.cycles_to_failure) },
            runout: p.runout,
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Settings of the n–slope regression study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeTableSettings {
    /// Amplitudes as fractions of σ_c, swept downwards until the first runout.
    pub amplitude_ratios: Vec<f64>,
    pub ratio: f64,
    pub max_cycles: u64,
    pub split: SplitKind,
    pub window: LinearRegime,
}

impl Default for SlopeTableSettings {
    fn default() -> Self {
        Self {
            amplitude_ratios: (0..50).map(|i| 0.70 - 0.01 * i as f64).collect(),
            ratio: -1.0,
            max_cycles: 10_000_000,
            split: SplitKind::NoTension,
            window: LinearRegime::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeTableFit {
    pub c1: f64,
    pub c2: f64,
    /// (n, fitted S-N slope) per exponent.
    pub fits: Vec<(f64, BasquinFit)>,
}

/// S-N curve of the model material for one exponent, swept from the highest
/// amplitude down to the first runout.
pub fn model_material_sn(
    model: PfModel,
    fdeg: FatigueDegradation,
    n: f64,
    settings: &SlopeTableSettings,
) -> Result<Vec<SNPoint>> {
    let preset = preset("ModelMaterial").expect("built-in preset");
    let mat = preset.material(model);
    let mut fp = preset.fatigue(model, fdeg);
    fp.n = n;
    let sigma_c = critical_point(model, &mat).stress;
    let options = LifeOptions {
        record_trace: false,
        ..LifeOptions::default()
    };
    let mut amps = settings.amplitude_ratios.clone();
    amps.sort_by(|a, b| b.total_cmp(a));
    let mut points = Vec::new();
    for s in amps {
        let load = CycleLoad::new(ControlMode::Load, s * sigma_c, settings.ratio)?.with_max_cycles(settings.max_cycles);
        let life = run_cycles_with(load, &mat, model, settings.split, &fp, options)?;
        let p = SNPoint::from_life(s * sigma_c, settings.ratio, &life);
        let stop = p.runout;
        points.push(p);
        if stop {
            break;
        }
    }
    Ok(points)
}

/// Regresses n against the fitted slope m over `n_grid`.
pub fn regenerate_slope_table(
    model: PfModel,
    fdeg: FatigueDegradation,
    n_grid: &[f64],
    settings: &SlopeTableSettings,
) -> Result<SlopeTableFit> {
    if n_grid.len() < 4 {
        return Err(invalid("n_grid", "needs at least 4 exponents"));
    }
    let preset = preset("ModelMaterial").expect("built-in preset");
    let sigma_c = critical_point(model, &preset.material(model)).stress;
    let fits = n_grid
        .par_iter()
        .map(|&n| {
            let pts = model_material_sn(model, fdeg, n, settings)?;
            let window = select_linear_regime(&pts, sigma_c, &settings.window);
            Ok((n, fit_basquin(&window)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let m: Vec<f64> = fits.iter().map(|(_, f)| f.m).collect();
    let ns: Vec<f64> = fits.iter().map(|(n, _)| *n).collect();
    let (c2, c1, _) = linear_regression(&m, &ns).ok_or_else(|| Error::Fit("degenerate slopes".into()))?;
    Ok(SlopeTableFit { c1, c2, fits })
}

/// Tabulated coefficients for comparison with a regenerated fit.
pub fn reference_slope_table(model: PfModel, fdeg: FatigueDegradation) -> (f64, f64) {
    slope_table_coefficients(model, fdeg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(a: f64, n: u64, runout: bool) -> SNPoint {
        SNPoint {
            amplitude: a,
            ratio: -1.0,
            cycles_to_failure: n,
            runout,
            cycles_to_initiation: None,
            error: None,
        }
    }

    #[test]
    fn exact_basquin_recovery() {
        let pts: Vec<SNPoint> = [1e2, 1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&n: &f64| pt(n.powf(-0.1), n as u64, false))
            .collect();
        let fit = fit_basquin(&pts).unwrap();
        assert_relative_eq!(fit.m_star, -0.1, max_relative = 1e-10);
        assert_relative_eq!(fit.m, 10.0, max_relative = 1e-10);
        assert_relative_eq!(fit.c_star, 1.0, max_relative = 1e-10);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn runouts_are_excluded() {
        let mut pts: Vec<SNPoint> = [1e2, 1e3, 1e4].iter().map(|&n: &f64| pt(n.powf(-0.1), n as u64, false)).collect();
        pts.push(pt(0.01, 10_000_000, true));
        let fit = fit_basquin(&pts).unwrap();
        assert_eq!(fit.points_used, 3);
        assert_relative_eq!(fit.m, 10.0, max_relative = 1e-10);
    }

    #[test]
    fn fit_errors() {
        assert!(fit_basquin(&[pt(1.0, 10, false), pt(0.5, 100, false)]).is_err());
        assert!(fit_basquin(&[pt(1.0, 10, false), pt(0.5, 10, false), pt(0.2, 10, false)]).is_err());
    }

    #[test]
    fn window_keeps_lowest_decade() {
        let pts = vec![pt(0.8, 50, false), pt(0.6, 200, false), pt(0.4, 5000, false), pt(0.35, 20000, false)];
        let sel = select_linear_regime(&pts, 1.0, &LinearRegime::default());
        let amps: Vec<f64> = sel.iter().map(|p| p.amplitude).collect();
        assert_eq!(amps, vec![0.4, 0.35]);
    }

    #[test]
    fn presets() {
        let p = preset("AISI4340").unwrap();
        assert_eq!(p.kappa, 0.55);
        assert_eq!(preset("300M").unwrap().toughness, 13.0);
        assert_eq!(preset("m300").unwrap().name, "300M");
        let mm = preset("ModelMaterial").unwrap();
        assert_eq!(mm.material(PfModel::At1).length_scale, 0.375);
        assert_eq!(mm.material(PfModel::At2).length_scale, 0.1055);
    }

    #[test]
    fn at1_f2_slope_consistent_with_table() {
        let s = SlopeTableSettings::default();
        let pts = model_material_sn(PfModel::At1, FatigueDegradation::F2, 1.0, &s).unwrap();
        let fit = fit_basquin(&select_linear_regime(&pts, 1.0, &s.window)).unwrap();
        let n_pred = 0.50 * fit.m - 0.13;
        // Same bound as the intercept tolerance of the regression check.
        assert!((n_pred - 1.0).abs() <= 0.15, "m = {}, n = {n_pred}", fit.m);
    }
}
