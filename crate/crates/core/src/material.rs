//! Isotropic elasticity, phase field functions, energy splits and the
//! homogeneous critical point.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Residual stiffness kept in fully broken material.
pub const DEFAULT_RESIDUAL_STIFFNESS: f64 = 1e-7;

const PHI_TOL: f64 = 1e-12;

/// Elastic and fracture constants of an isotropic solid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Young's modulus.
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Critical energy release rate Gc.
    pub toughness: f64,
    /// Phase field length scale ℓ.
    pub length_scale: f64,
    pub residual_stiffness: f64,
}

impl MaterialParams {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64, toughness: f64, length_scale: f64) -> Result<Self> {
        let m = Self {
            youngs_modulus,
            poisson_ratio,
            toughness,
            length_scale,
            residual_stiffness: DEFAULT_RESIDUAL_STIFFNESS,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_residual_stiffness(mut self, k: f64) -> Result<Self> {
        self.residual_stiffness = k;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.youngs_modulus) {
            return Err(invalid("youngs_modulus", format!("must be > 0 (got {})", self.youngs_modulus)));
        }
        if !(self.poisson_ratio > -1.0 && self.poisson_ratio < 0.5) {
            return Err(invalid(
                "poisson_ratio",
                format!("must satisfy -1 < nu < 0.5 (got {})", self.poisson_ratio),
            ));
        }
        if !finite_pos(self.toughness) {
            return Err(invalid("toughness", format!("must be > 0 (got {})", self.toughness)));
        }
        if !finite_pos(self.length_scale) {
            return Err(invalid("length_scale", format!("must be > 0 (got {})", self.length_scale)));
        }
        if !(self.residual_stiffness.is_finite() && self.residual_stiffness >= 0.0) {
            return Err(invalid(
                "residual_stiffness",
                format!("must be >= 0 (got {})", self.residual_stiffness),
            ));
        }
        Ok(())
    }

    /// First Lamé constant λ.
    pub fn lambda(&self) -> f64 {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    }

    /// Shear modulus μ.
    pub fn mu(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }

    pub fn bulk_modulus(&self) -> f64 {
        self.lambda() + 2.0 * self.mu() / 3.0
    }
}

/// Phase field model variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PfModel {
    #[serde(rename = "AT1", alias = "at1")]
    At1,
    #[serde(rename = "AT2", alias = "at2")]
    At2,
}

impl PfModel {
    pub fn c_w(self) -> f64 {
        match self {
            PfModel::At1 => 2.0 / 3.0,
            PfModel::At2 => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PfModel::At1 => "AT1",
            PfModel::At2 => "AT2",
        }
    }
}

/// Which part of the strain energy drives damage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    Spectral,
    NoTension,
    VolDev,
    /// The whole energy is active.
    None,
}

impl SplitKind {
    pub fn name(self) -> &'static str {
        match self {
            SplitKind::Spectral => "spectral",
            SplitKind::NoTension => "no-tension",
            SplitKind::VolDev => "vol-dev",
            SplitKind::None => "none",
        }
    }
}

/// Symmetric 3×3 tensor stored by its six independent components.
///
/// Axisymmetric fields map (r, z, θ) onto (x, y, z) with the hoop component
/// on `zz`, so `xz` and `yz` stay zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub yz: f64,
    pub xz: f64,
}

pub type StrainTensor = SymTensor;
pub type StressTensor = SymTensor;

impl SymTensor {
    pub fn new(xx: f64, yy: f64, zz: f64, xy: f64, yz: f64, xz: f64) -> Self {
        Self { xx, yy, zz, xy, yz, xz }
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0, 0.0, 0.0)
    }

    /// Promotes an axisymmetric strain `[ε_rr, ε_zz, ε_θθ, γ_rz]`.
    pub fn from_axisymmetric(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], 0.5 * v[3], 0.0, 0.0)
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    /// Double contraction with itself.
    pub fn norm_squared(&self) -> f64 {
        self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + 2.0 * (self.xy * self.xy + self.yz * self.yz + self.xz * self.xz)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.xx * s, self.yy * s, self.zz * s, self.xy * s, self.yz * s, self.xz * s)
    }

    pub fn is_finite(&self) -> bool {
        [self.xx, self.yy, self.zz, self.xy, self.yz, self.xz]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn to_matrix(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::new(
            self.xx, self.xy, self.xz, //
            self.xy, self.yy, self.yz, //
            self.xz, self.yz, self.zz,
        )
    }

    /// Eigenvalues sorted in descending order.
    pub fn eigenvalues(&self) -> Result<[f64; 3]> {
        if !self.is_finite() {
            return Err(Error::NonFinite("tensor component"));
        }
        let mut e = if self.xz == 0.0 && self.yz == 0.0 {
            let mean = 0.5 * (self.xx + self.yy);
            let half = 0.5 * (self.xx - self.yy);
            let rad = half.hypot(self.xy);
            [mean + rad, mean - rad, self.zz]
        } else {
            let v = self.to_matrix().symmetric_eigenvalues();
            [v[0], v[1], v[2]]
        };
        e.sort_by(|a, b| b.total_cmp(a));
        Ok(e)
    }

    /// Largest principal value.
    pub fn max_principal(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }
}

fn check_phi(phi: f64) -> Result<f64> {
    if !(phi >= -PHI_TOL && phi <= 1.0 + PHI_TOL) {
        return Err(Error::Domain {
            name: "phi",
            value: phi,
            expected: "0 <= phi <= 1",
        });
    }
    Ok(phi.clamp(0.0, 1.0))
}

/// Quadratic degradation g(φ) = (1 − φ)².
pub fn degrade(phi: f64) -> Result<f64> {
    let phi = check_phi(phi)?;
    Ok(g(phi))
}

#[inline]
pub(crate) fn g(phi: f64) -> f64 {
    (1.0 - phi) * (1.0 - phi)
}

#[inline]
pub(crate) fn g_prime(phi: f64) -> f64 {
    -2.0 * (1.0 - phi)
}

pub(crate) const G_SECOND: f64 = 2.0;

/// Geometric crack function and its first two derivatives.
pub fn geometric_crack(model: PfModel, phi: f64) -> Result<(f64, f64, f64)> {
    let phi = check_phi(phi)?;
    Ok(crack_function(model, phi))
}

#[inline]
pub(crate) fn crack_function(model: PfModel, phi: f64) -> (f64, f64, f64) {
    match model {
        PfModel::At1 => (phi, 1.0, 0.0),
        PfModel::At2 => (phi * phi, 2.0 * phi, 2.0),
    }
}

/// Undamaged strain energy ½ ε:𝓛₀:ε.
pub fn strain_energy(eps: &StrainTensor, mat: &MaterialParams) -> f64 {
    let tr = eps.trace();
    0.5 * mat.lambda() * tr * tr + mat.mu() * eps.norm_squared()
}

/// Splits the strain energy into active and inactive parts.
pub fn split_energy(eps: &StrainTensor, mat: &MaterialParams, kind: SplitKind) -> Result<(f64, f64)> {
    if !eps.is_finite() {
        return Err(Error::NonFinite("strain component"));
    }
    let psi0 = strain_energy(eps, mat);
    let (plus, minus) = match kind {
        SplitKind::None => (psi0, 0.0),
        SplitKind::VolDev => {
            let tr = eps.trace();
            let k = mat.bulk_modulus();
            let dev = eps.norm_squared() - tr * tr / 3.0;
            let pos = tr.max(0.0);
            let neg = tr.min(0.0);
            (0.5 * k * pos * pos + mat.mu() * dev.max(0.0), 0.5 * k * neg * neg)
        }
        SplitKind::Spectral => spectral_from_eigenvalues(&eps.eigenvalues()?, mat),
        SplitKind::NoTension => no_tension_from_eigenvalues(&eps.eigenvalues()?, psi0, mat),
    };
    Ok((plus.max(0.0), minus.max(0.0)))
}

pub(crate) fn spectral_from_eigenvalues(e: &[f64; 3], mat: &MaterialParams) -> (f64, f64) {
    let tr = e[0] + e[1] + e[2];
    let (lambda, mu) = (mat.lambda(), mat.mu());
    let mut plus = 0.5 * lambda * tr.max(0.0).powi(2);
    let mut minus = 0.5 * lambda * tr.min(0.0).powi(2);
    for &v in e {
        plus += mu * v.max(0.0).powi(2);
        minus += mu * v.min(0.0).powi(2);
    }
    (plus, minus)
}

/// Masonry-like split: the inactive part is the energy carried by the
/// compressive principal stresses of the no-tension solution.
/// `e` must be sorted in descending order.
pub(crate) fn no_tension_from_eigenvalues(e: &[f64; 3], psi0: f64, mat: &MaterialParams) -> (f64, f64) {
    let (e1, e2, e3) = (e[0], e[1], e[2]);
    let (ym, nu) = (mat.youngs_modulus, mat.poisson_ratio);
    let minus = if e3 >= 0.0 {
        0.0
    } else if e2 + nu * e3 >= 0.0 {
        0.5 * ym * e3 * e3
    } else if (1.0 - nu) * e1 + nu * (e2 + e3) >= 0.0 {
        0.5 * ym / (1.0 - nu * nu) * (e2 * e2 + 2.0 * nu * e2 * e3 + e3 * e3)
    } else {
        psi0
    };
    let minus = minus.min(psi0);
    (psi0 - minus, minus)
}

/// Cauchy stress of the hybrid formulation: the full isotropic stiffness is
/// degraded by g(φ) + k regardless of the energy split.
pub fn stress(eps: &StrainTensor, phi: f64, mat: &MaterialParams) -> Result<StressTensor> {
    let phi = check_phi(phi)?;
    Ok(undamaged_stress(eps, mat).scale(g(phi) + mat.residual_stiffness))
}

pub(crate) fn undamaged_stress(eps: &StrainTensor, mat: &MaterialParams) -> StressTensor {
    let lt = mat.lambda() * eps.trace();
    let two_mu = 2.0 * mat.mu();
    SymTensor::new(
        lt + two_mu * eps.xx,
        lt + two_mu * eps.yy,
        lt + two_mu * eps.zz,
        two_mu * eps.xy,
        two_mu * eps.yz,
        two_mu * eps.xz,
    )
}

/// AT1 elastic threshold 3Gc/(16ℓ); zero for AT2.
pub fn threshold_energy(model: PfModel, mat: &MaterialParams) -> f64 {
    match model {
        PfModel::At1 => 3.0 * mat.toughness / (16.0 * mat.length_scale),
        PfModel::At2 => 0.0,
    }
}

/// History update with the pristine AT1 threshold floor.
pub fn update_history(h_prev: f64, psi_plus: f64, model: PfModel, mat: &MaterialParams) -> f64 {
    h_prev.max(psi_plus).max(threshold_energy(model, mat))
}

/// Damage driving force seen by the phase field equation once the
/// toughness has been scaled by the fatigue factor `f`.
///
/// The AT1 floor scales with `f`, so the elastic limit shrinks together with
/// the toughness. `psi_max` is the running maximum of ψ⁺ without any floor.
pub fn driving_force(psi_max: f64, model: PfModel, mat: &MaterialParams, f: f64) -> f64 {
    psi_max.max(f * threshold_energy(model, mat))
}

/// Peak of the homogeneous uniaxial response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub stress: f64,
    pub strain: f64,
}

/// Critical strength and strain. AT1 uses the closed form, AT2 maximizes the
/// homogeneous response numerically.
pub fn critical_point(model: PfModel, mat: &MaterialParams) -> CriticalPoint {
    match model {
        PfModel::At1 => critical_point_closed_form(model, mat),
        PfModel::At2 => critical_point_by_maximization(model, mat),
    }
}

pub fn critical_point_closed_form(model: PfModel, mat: &MaterialParams) -> CriticalPoint {
    let (e, gc, l) = (mat.youngs_modulus, mat.toughness, mat.length_scale);
    match model {
        PfModel::At1 => CriticalPoint {
            stress: (3.0 * e * gc / (8.0 * l)).sqrt(),
            strain: (3.0 * gc / (8.0 * l * e)).sqrt(),
        },
        PfModel::At2 => CriticalPoint {
            stress: 9.0 / 16.0 * (e * gc / (3.0 * l)).sqrt(),
            strain: (gc / (3.0 * l * e)).sqrt(),
        },
    }
}

/// Homogeneous uniaxial stress g(φ(ε))·E·ε with ψ = ½Eε² driving damage.
pub fn homogeneous_stress(strain: f64, model: PfModel, mat: &MaterialParams) -> f64 {
    let e = mat.youngs_modulus;
    let h = update_history(0.0, 0.5 * e * strain * strain, model, mat);
    let phi = crate::homogeneous::solve_phi_homogeneous(h, 1.0, model, mat, 0.0);
    g(phi) * e * strain
}

pub fn critical_point_by_maximization(model: PfModel, mat: &MaterialParams) -> CriticalPoint {
    let upper = 10.0 * critical_point_closed_form(model, mat).strain;
    let (strain, stress) = golden_section_max(|x| homogeneous_stress(x, model, mat), 0.0, upper, 1e-14);
    CriticalPoint { stress, strain }
}

/// Maximizes a unimodal function on `[a, b]`; returns (argmax, max).
pub(crate) fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let scale = b.abs().max(a.abs());
    while (b - a) > rel_tol * scale {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit() -> MaterialParams {
        MaterialParams::new(1.0, 0.3, 1.0, 0.375).unwrap()
    }

    #[test]
    fn lame_constants() {
        let m = MaterialParams::new(210e3, 0.3, 13.0, 0.315).unwrap();
        assert_relative_eq!(m.lambda(), 121153.846153846, max_relative = 1e-12);
        assert_relative_eq!(m.mu(), 80769.2307692308, max_relative = 1e-12);
        assert_eq!(m.residual_stiffness, 1e-7);
    }

    #[test]
    fn rejects_bad_poisson_ratio() {
        let err = MaterialParams::new(1.0, 0.7, 1.0, 1.0).unwrap_err().to_string();
        assert!(err.contains("poisson_ratio"), "{err}");
        assert!(MaterialParams::new(1.0, 0.3, 0.0, 1.0).is_err());
    }

    #[test]
    fn degradation_values() {
        assert_eq!(degrade(0.0).unwrap(), 1.0);
        assert_eq!(degrade(1.0).unwrap(), 0.0);
        assert_eq!(degrade(0.5).unwrap(), 0.25);
        assert!(degrade(1.0 + 1e-9).is_err());
        assert!(degrade(-1e-9).is_err());
        assert_eq!(degrade(1.0 + 1e-13).unwrap(), 0.0);
    }

    #[test]
    fn crack_functions() {
        assert_eq!(geometric_crack(PfModel::At1, 0.3).unwrap(), (0.3, 1.0, 0.0));
        let (w, wp, wpp) = geometric_crack(PfModel::At2, 0.3).unwrap();
        assert_relative_eq!(w, 0.09, max_relative = 1e-15);
        assert_relative_eq!(wp, 0.6, max_relative = 1e-15);
        assert_eq!(wpp, 2.0);
        assert_eq!(geometric_crack(PfModel::At2, 0.0).unwrap(), (0.0, 0.0, 2.0));
        assert_eq!(PfModel::At1.c_w(), 2.0 / 3.0);
        assert_eq!(PfModel::At2.c_w(), 0.5);
    }

    #[test]
    fn uniaxial_strain_tension_is_fully_active() {
        let m = unit();
        let eps = 0.01;
        let expected = 0.5 * m.lambda() * eps * eps + m.mu() * eps * eps;
        for kind in [SplitKind::Spectral, SplitKind::NoTension, SplitKind::VolDev, SplitKind::None] {
            let (p, n) = split_energy(&SymTensor::diag(eps, 0.0, 0.0), &m, kind).unwrap();
            assert_relative_eq!(p, expected, max_relative = 1e-12);
            assert!(n.abs() < 1e-18, "{kind:?}: {n}");
        }
    }

    #[test]
    fn spectral_uniaxial_stress_compression() {
        let m = unit();
        let (e, nu) = (0.02, m.poisson_ratio);
        let eps = SymTensor::diag(-e, nu * e, nu * e);
        let (p, n) = split_energy(&eps, &m, SplitKind::Spectral).unwrap();
        assert_relative_eq!(p, 2.0 * m.mu() * nu * nu * e * e, max_relative = 1e-12);
        assert_relative_eq!(p + n, strain_energy(&eps, &m), max_relative = 1e-12);
    }

    #[test]
    fn voldev_pure_shear() {
        let m = unit();
        let gamma = 0.03;
        let eps = SymTensor::new(0.0, 0.0, 0.0, 0.5 * gamma, 0.0, 0.0);
        let (p, n) = split_energy(&eps, &m, SplitKind::VolDev).unwrap();
        assert_relative_eq!(p, m.mu() * gamma * gamma / 2.0, max_relative = 1e-12);
        assert_eq!(n, 0.0);
    }

    #[test]
    fn no_tension_uniaxial_stress_states() {
        let m = unit();
        let (e, nu) = (0.01, m.poisson_ratio);
        let tension = SymTensor::diag(e, -nu * e, -nu * e);
        let psi0 = 0.5 * e * e;
        let (p, n) = split_energy(&tension, &m, SplitKind::NoTension).unwrap();
        assert_relative_eq!(n, nu * nu * e * e / (1.0 - nu), max_relative = 1e-12);
        assert_relative_eq!(p + n, psi0, max_relative = 1e-12);
        let compression = tension.scale(-1.0);
        let (p, n) = split_energy(&compression, &m, SplitKind::NoTension).unwrap();
        assert_eq!(p, 0.0);
        assert_relative_eq!(n, psi0, max_relative = 1e-12);
    }

    #[test]
    fn no_tension_is_continuous_across_branches() {
        let m = unit();
        let nu = m.poisson_ratio;
        let psi_minus = |e: [f64; 3]| {
            no_tension_from_eigenvalues(&e, strain_energy(&SymTensor::diag(e[0], e[1], e[2]), &m), &m).1
        };
        let h = 1e-9;
        // boundary between uniaxial and biaxial compression branches
        let e3 = -1.0;
        let e2 = -nu * e3 - 1e-3;
        let a = psi_minus([1.0, e2 + h, e3]);
        let b = psi_minus([1.0, e2 - h, e3]);
        assert!((a - b).abs() < 1e-6, "{a} {b}");
        // boundary between biaxial and fully compressive branches
        let (e2, e3) = (-0.5, -1.0);
        let e1 = -nu * (e2 + e3) / (1.0 - nu);
        let a = psi_minus([e1 + h, e2, e3]);
        let b = psi_minus([e1 - h, e2, e3]);
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn stress_examples() {
        let m = unit();
        let eps = SymTensor::diag(0.5, -0.15, -0.15);
        let s = stress(&eps, 0.5, &m).unwrap();
        assert_relative_eq!(s.xx, 0.125 * (1.0 + 4e-7), max_relative = 1e-12);
        assert!(s.yy.abs() < 1e-14);
        let full = stress(&eps, 1.0, &m).unwrap();
        assert_relative_eq!(full.xx, 1e-7 * 0.5, max_relative = 1e-10);
    }

    #[test]
    fn history_examples() {
        let at1 = unit();
        assert_eq!(update_history(0.2, 0.1, PfModel::At2, &at1), 0.2);
        assert_relative_eq!(update_history(0.0, 0.0, PfModel::At1, &at1), 0.5, max_relative = 1e-15);
        assert_eq!(update_history(0.0, 0.3, PfModel::At2, &at1), 0.3);
        assert_relative_eq!(driving_force(0.0, PfModel::At1, &at1, 0.25), 0.125, max_relative = 1e-15);
    }

    #[test]
    fn critical_points() {
        let at1 = unit();
        let cp = critical_point(PfModel::At1, &at1);
        assert_relative_eq!(cp.stress, 1.0, max_relative = 1e-10);
        assert_relative_eq!(cp.strain, 1.0, max_relative = 1e-10);
        let num = critical_point_by_maximization(PfModel::At1, &at1);
        assert_relative_eq!(num.stress, 1.0, max_relative = 1e-8);
        assert_relative_eq!(num.strain, 1.0, max_relative = 1e-8);

        let at2 = MaterialParams::new(1.0, 0.3, 1.0, 0.1055).unwrap();
        let cp = critical_point(PfModel::At2, &at2);
        assert!((cp.stress - 1.0).abs() < 5e-3, "{}", cp.stress);
        let closed = critical_point_closed_form(PfModel::At2, &at2);
        assert_relative_eq!(cp.stress, closed.stress, max_relative = 1e-10);
        assert_relative_eq!(cp.strain, closed.strain, max_relative = 1e-6);
        assert_relative_eq!(closed.strain, 1.7776, max_relative = 1e-4);
    }

    fn tensor() -> impl Strategy<Value = SymTensor> {
        prop::array::uniform6(-1.0f64..1.0).prop_map(|c| SymTensor::new(c[0], c[1], c[2], c[3], c[4], c[5]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn additive_splits_partition_energy(eps in tensor()) {
            let m = unit();
            let psi0 = strain_energy(&eps, &m);
            for kind in [SplitKind::Spectral, SplitKind::VolDev] {
                let (p, n) = split_energy(&eps, &m, kind).unwrap();
                prop_assert!(p >= 0.0 && n >= 0.0);
                prop_assert!((p + n - psi0).abs() <= 1e-10 * psi0.max(1e-300));
            }
        }

        #[test]
        fn no_tension_sign_behaviour(eps in tensor()) {
            let m = unit();
            let mat = eps.to_matrix();
            let psd = mat * mat.transpose();
            let psd = SymTensor::new(psd[(0,0)], psd[(1,1)], psd[(2,2)], psd[(0,1)], psd[(1,2)], psd[(0,2)]);
            let (_, n) = split_energy(&psd, &m, SplitKind::NoTension).unwrap();
            prop_assert!(n <= 1e-12 * strain_energy(&psd, &m));
            let nsd = psd.scale(-1.0);
            let (p, _) = split_energy(&nsd, &m, SplitKind::NoTension).unwrap();
            prop_assert!(p <= 1e-12 * strain_energy(&nsd, &m));
        }

        #[test]
        fn history_is_monotone(seq in prop::collection::vec(0.0f64..2.0, 1..50)) {
            let m = unit();
            let mut h = 0.0;
            for psi in seq {
                let next = update_history(h, psi, PfModel::At1, &m);
                prop_assert!(next >= h);
                h = next;
            }
        }

        #[test]
        fn degradation_is_non_increasing(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(degrade(lo).unwrap() >= degrade(hi).unwrap());
            prop_assert!(g_prime(lo) <= 0.0);
            let (w0, _, _) = geometric_crack(PfModel::At2, 0.0).unwrap();
            prop_assert_eq!(w0, 0.0);
            for model in [PfModel::At1, PfModel::At2] {
                let (_, wp, _) = geometric_crack(model, lo).unwrap();
                prop_assert!(wp >= 0.0);
                prop_assert!(geometric_crack(model, 1.0).unwrap().0 > 0.0);
            }
        }
    }
}
