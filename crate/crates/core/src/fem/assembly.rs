//! Coupled displacement / phase field problem on an axisymmetric mesh.

use serde::{Deserialize, Serialize};

use super::element::{elasticity_matrix, mat_vec, ElementGeometry, QuadPoint};
use super::mesh::{Mesh, AXIS, LOAD, SYMMETRY};
use crate::error::{Error, Result};
use crate::homogeneous::{ControlMode, PointState};
use crate::material::{
    crack_function, driving_force, g, g_prime, no_tension_from_eigenvalues, spectral_from_eigenvalues, split_energy,
    MaterialParams, PfModel, SplitKind, SymTensor, G_SECOND,
};

/// Nodal fields and quadrature point history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    /// (u_r, u_z) per node, interleaved.
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    /// Four entries per element.
    pub points: Vec<PointState>,
}

impl FieldState {
    pub fn new(mesh: &Mesh) -> Self {
        Self {
            u: vec![0.0; 2 * mesh.nodes.len()],
            phi: vec![0.0; mesh.nodes.len()],
            points: vec![PointState::default(); 4 * mesh.elements.len()],
        }
    }

    pub fn max_phi(&self) -> f64 {
        self.phi.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_alpha_bar(&self) -> f64 {
        self.points.iter().map(|p| p.fatigue.alpha_bar).fold(0.0, f64::max)
    }
}

/// Quantities evaluated at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    /// [ε_rr, ε_zz, ε_θθ, γ_rz].
    pub strain: [f64; 4],
    /// Undamaged stress 𝓛₀:ε in the same layout.
    pub stress0: [f64; 4],
    pub psi_plus: f64,
    pub phi: f64,
}

impl PointEval {
    pub fn strain_tensor(&self) -> SymTensor {
        SymTensor::from_axisymmetric(self.strain)
    }

    pub fn stress_tensor(&self) -> SymTensor {
        let s = self.stress0;
        SymTensor::new(s[0], s[1], s[2], s[3], 0.0, 0.0)
    }
}

/// Residual of the coupled system with per-field magnitude scales.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    /// Full-length vector [u (2 per node), φ (1 per node)]; constrained
    /// entries are zero.
    pub values: Vec<f64>,
    pub scale_u: f64,
    pub scale_phi: f64,
}

/// Residuals and block tangents over all degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemBlocks {
    pub residual_u: Vec<f64>,
    pub residual_phi: Vec<f64>,
    /// Full (both triangles) triplets; u indices are 2·node + component.
    pub k_u: Vec<(usize, usize, f64)>,
    pub k_phi: Vec<(usize, usize, f64)>,
}

/// Outcome of [`FemProblem::check_tangents`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentCheck {
    pub fd_mismatch_u: f64,
    pub fd_mismatch_phi: f64,
    pub asymmetry_u: f64,
    pub asymmetry_phi: f64,
}

/// Mesh, constitutive model and boundary conditions.
#[derive(Debug, Clone)]
pub struct FemProblem {
    pub mesh: Mesh,
    pub geometry: Vec<ElementGeometry>,
    pub mat: MaterialParams,
    pub model: PfModel,
    pub split: SplitKind,
    pub control: ControlMode,
    d: [[f64; 4]; 4],
    fixed: Vec<bool>,
    /// u_z dofs driven under displacement control.
    driven: Vec<usize>,
    /// External force per unit traction on the loaded edge.
    unit_load: Vec<f64>,
    free_u: Vec<usize>,
    free_phi: Vec<usize>,
    n_free_u: usize,
    n_free_phi: usize,
    c_tension: f64,
    c_compression: f64,
}

pub(crate) const NOT_FREE: usize = usize::MAX;

impl FemProblem {
    pub fn new(mesh: Mesh, mat: MaterialParams, model: PfModel, split: SplitKind, control: ControlMode) -> Result<Self> {
        mesh.validate()?;
        mat.validate()?;
        if mesh.node_set(LOAD).is_empty() {
            return Err(Error::Mesh("mesh has no `load` node set".into()));
        }
        let nn = mesh.nodes.len();
        let geometry = (0..mesh.elements.len())
            .map(|e| ElementGeometry::new(&mesh.element_coords(e), e))
            .collect::<Result<Vec<_>>>()?;
        let mut fixed = vec![false; 3 * nn];
        for &n in mesh.node_set(AXIS) {
            fixed[2 * n] = true;
        }
        for &n in mesh.node_set(SYMMETRY) {
            fixed[2 * n + 1] = true;
        }
        let mut driven = Vec::new();
        if control == ControlMode::Displacement {
            for &n in mesh.node_set(LOAD) {
                fixed[2 * n + 1] = true;
                driven.push(2 * n + 1);
            }
        } else if mesh.edge_set(LOAD).is_empty() {
            return Err(Error::Mesh("load control needs a `load` edge set".into()));
        }
        let mut unit_load = vec![0.0; 3 * nn];
        let g = 1.0 / 3f64.sqrt();
        for &[a, b] in mesh.edge_set(LOAD) {
            let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
            let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
            for s in [-g, g] {
                let (na, nb) = (0.5 * (1.0 - s), 0.5 * (1.0 + s));
                let r = na * pa[0] + nb * pb[0];
                let w = 2.0 * std::f64::consts::PI * r * 0.5 * len;
                unit_load[2 * a + 1] += na * w;
                unit_load[2 * b + 1] += nb * w;
            }
        }
        let mut free_u = vec![NOT_FREE; 2 * nn];
        let mut n_free_u = 0;
        for (dof, slot) in free_u.iter_mut().enumerate() {
            if !fixed[dof] {
                *slot = n_free_u;
                n_free_u += 1;
            }
        }
        let free_phi: Vec<usize> = (0..nn).collect();
        let nu = mat.poisson_ratio;
        let c_tension = split_energy(&SymTensor::diag(1.0, -nu, -nu), &mat, split)?.0;
        let c_compression = split_energy(&SymTensor::diag(-1.0, nu, nu), &mat, split)?.0;
        Ok(Self {
            d: elasticity_matrix(&mat),
            mesh,
            geometry,
            mat,
            model,
            split,
            control,
            fixed,
            driven,
            unit_load,
            free_u,
            free_phi,
            n_free_u,
            n_free_phi: nn,
            c_tension,
            c_compression,
        })
    }

    /// Mean axial coordinate of the loaded end.
    pub fn load_height(&self) -> f64 {
        let set = self.mesh.node_set(LOAD);
        set.iter().map(|&n| self.mesh.nodes[n][1]).sum::<f64>() / set.len() as f64
    }

    pub fn mean_load_displacement(&self, state: &FieldState) -> f64 {
        let set = self.mesh.node_set(LOAD);
        set.iter().map(|&n| state.u[2 * n + 1]).sum::<f64>() / set.len() as f64
    }

    pub fn num_nodes(&self) -> usize {
        self.mesh.nodes.len()
    }

    pub fn num_points(&self) -> usize {
        4 * self.mesh.elements.len()
    }

    pub fn is_fixed(&self, dof: usize) -> bool {
        self.fixed[dof]
    }

    pub(crate) fn free_u(&self) -> (&[usize], usize) {
        (&self.free_u, self.n_free_u)
    }

    pub(crate) fn free_phi(&self) -> (&[usize], usize) {
        (&self.free_phi, self.n_free_phi)
    }

    /// Area of the loaded end (force per unit traction).
    pub fn unit_load_resultant(&self) -> f64 {
        self.unit_load.iter().sum()
    }

    pub fn empty_state(&self) -> FieldState {
        FieldState::new(&self.mesh)
    }

    /// Packs a state into the full unknown vector and imposes the load level
    /// on driven displacements.
    pub fn pack(&self, state: &FieldState, level: f64) -> Vec<f64> {
        let mut x = Vec::with_capacity(3 * self.num_nodes());
        x.extend_from_slice(&state.u);
        x.extend_from_slice(&state.phi);
        for (dof, &f) in self.fixed.iter().enumerate().take(2 * self.num_nodes()) {
            if f {
                x[dof] = 0.0;
            }
        }
        for &dof in &self.driven {
            x[dof] = level;
        }
        x
    }

    pub fn unpack(&self, x: &[f64], state: &mut FieldState) {
        let n2 = 2 * self.num_nodes();
        state.u.copy_from_slice(&x[..n2]);
        state.phi.copy_from_slice(&x[n2..]);
    }

    fn gather(&self, x: &[f64], e: usize) -> ([[f64; 2]; 4], [f64; 4], [usize; 4]) {
        let conn = self.mesh.elements[e];
        let n2 = 2 * self.num_nodes();
        let u = conn.map(|n| [x[2 * n], x[2 * n + 1]]);
        let phi = conn.map(|n| x[n2 + n]);
        (u, phi, conn)
    }

    /// Active energy of the strain at a quadrature point.
    pub fn active_energy(&self, strain: &[f64; 4]) -> f64 {
        let t = SymTensor::from_axisymmetric(*strain);
        let e = t.eigenvalues().unwrap_or([0.0; 3]);
        let psi0 = 0.5 * {
            let s = mat_vec(&self.d, strain);
            (0..4).map(|i| s[i] * strain[i]).sum::<f64>()
        };
        match self.split {
            SplitKind::None => psi0,
            SplitKind::Spectral => spectral_from_eigenvalues(&e, &self.mat).0,
            SplitKind::NoTension => no_tension_from_eigenvalues(&e, psi0, &self.mat).0,
            SplitKind::VolDev => split_energy(&t, &self.mat, SplitKind::VolDev).map(|v| v.0).unwrap_or(0.0),
        }
        .max(0.0)
    }

    /// Active energy of a uniaxial-stress state ε along the load axis; used by
    /// oracles that compare against the bar solution.
    pub fn uniaxial_active_energy(&self, eps: f64) -> f64 {
        let c = if eps >= 0.0 { self.c_tension } else { self.c_compression };
        c * eps * eps
    }

    fn eval_point(&self, q: &QuadPoint, u: &[[f64; 2]; 4], phi: &[f64; 4]) -> PointEval {
        let strain = q.strain(u);
        PointEval {
            strain,
            stress0: mat_vec(&self.d, &strain),
            psi_plus: self.active_energy(&strain),
            phi: q.interpolate(phi),
        }
    }

    /// Evaluates every quadrature point of a state.
    pub fn evaluate(&self, state: &FieldState) -> Vec<PointEval> {
        let x = self.pack_raw(state);
        let mut out = Vec::with_capacity(self.num_points());
        for e in 0..self.mesh.elements.len() {
            let (u, phi, _) = self.gather(&x, e);
            for q in &self.geometry[e].points {
                out.push(self.eval_point(q, &u, &phi));
            }
        }
        out
    }

    fn pack_raw(&self, state: &FieldState) -> Vec<f64> {
        let mut x = state.u.clone();
        x.extend_from_slice(&state.phi);
        x
    }

    /// Driving force at a point given its history and fatigue factor.
    fn history(&self, psi_plus: f64, point: &PointState, f: f64) -> f64 {
        driving_force(point.psi_max.max(psi_plus), self.model, &self.mat, f)
    }

    /// Residual of the coupled system at `x` (internal minus external).
    pub fn residual(&self, x: &[f64], points: &[PointState], f: &[f64], traction: f64) -> Residual {
        self.assemble(x, points, f, traction, false, true).0
    }

    fn assemble(
        &self,
        x: &[f64],
        points: &[PointState],
        f: &[f64],
        traction: f64,
        tangent: bool,
        constrain: bool,
    ) -> (Residual, Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>) {
        let nn = self.num_nodes();
        let n2 = 2 * nn;
        let mut r = vec![0.0; 3 * nn];
        let mut absum = vec![0.0; 3 * nn];
        let mut ku = Vec::new();
        let mut kphi = Vec::new();
        if tangent {
            ku.reserve(64 * self.mesh.elements.len());
            kphi.reserve(16 * self.mesh.elements.len());
        }
        let (gc, l, k) = (self.mat.toughness, self.mat.length_scale, self.mat.residual_stiffness);
        let cw = self.model.c_w();
        for e in 0..self.mesh.elements.len() {
            let (u, phi, conn) = self.gather(x, e);
            for (qi, q) in self.geometry[e].points.iter().enumerate() {
                let gp = 4 * e + qi;
                let ev = self.eval_point(q, &u, &phi);
                let fq = f[gp];
                let h = self.history(ev.psi_plus, &points[gp], fq);
                let (_, wp, wpp) = crack_function(self.model, ev.phi);
                let gd = g(ev.phi) + k;
                let grad = q.gradient(&phi);
                let dv = q.dv;
                for a in 0..4 {
                    let ba = q.b(a);
                    for c in 0..2 {
                        let v: f64 = (0..4).map(|i| ba[i][c] * ev.stress0[i]).sum::<f64>() * gd * dv;
                        r[2 * conn[a] + c] += v;
                        absum[2 * conn[a] + c] += v.abs();
                    }
                    let t1 = g_prime(ev.phi) * q.n[a] * h;
                    let t2 = fq * gc / (4.0 * cw) * wp / l * q.n[a];
                    let t3 = fq * gc / (4.0 * cw) * 2.0 * l * (q.dn[a][0] * grad[0] + q.dn[a][1] * grad[1]);
                    r[n2 + conn[a]] += (t1 + t2 + t3) * dv;
                    absum[n2 + conn[a]] += (t1.abs() + t2.abs() + t3.abs()) * dv;
                }
                if tangent {
                    let bs: [[[f64; 2]; 4]; 4] = [q.b(0), q.b(1), q.b(2), q.b(3)];
                    let reac = (G_SECOND * h + fq * gc * wpp / (4.0 * cw * l)) * dv;
                    let diff = fq * gc * l / (2.0 * cw) * dv;
                    for a in 0..4 {
                        // D·B_a
                        let mut db = [[0.0; 2]; 4];
                        for i in 0..4 {
                            for c in 0..2 {
                                db[i][c] = (0..4).map(|j| self.d[i][j] * bs[a][j][c]).sum();
                            }
                        }
                        for b in 0..4 {
                            for c in 0..2 {
                                for d in 0..2 {
                                    let v: f64 = (0..4).map(|i| bs[b][i][c] * db[i][d]).sum::<f64>() * gd * dv;
                                    ku.push((2 * conn[b] + c, 2 * conn[a] + d, v));
                                }
                            }
                            let v = reac * q.n[a] * q.n[b]
                                + diff * (q.dn[a][0] * q.dn[b][0] + q.dn[a][1] * q.dn[b][1]);
                            kphi.push((conn[a], conn[b], v));
                        }
                    }
                }
            }
        }
        if traction != 0.0 && self.control == ControlMode::Load {
            for dof in 0..n2 {
                let fe = traction * self.unit_load[dof];
                r[dof] -= fe;
                absum[dof] += fe.abs();
            }
        }
        let mut scale_u: f64 = 0.0;
        let mut scale_phi: f64 = 0.0;
        // Constrained dofs count towards the scale: their reactions carry the
        // load under displacement control.
        for dof in 0..3 * nn {
            if dof < n2 {
                scale_u = scale_u.max(absum[dof]);
                if constrain && self.fixed[dof] {
                    r[dof] = 0.0;
                }
            } else {
                scale_phi = scale_phi.max(absum[dof]);
            }
        }
        (
            Residual {
                values: r,
                scale_u,
                scale_phi,
            },
            ku,
            kphi,
        )
    }

    /// Residuals (unconstrained) and block tangents over all dofs.
    pub fn assemble_system(&self, state: &FieldState, f: &[f64], traction: f64) -> SystemBlocks {
        let x = self.pack_raw(state);
        let (res, ku, kphi) = self.assemble(&x, &state.points, f, traction, true, false);
        let n2 = 2 * self.num_nodes();
        SystemBlocks {
            residual_u: res.values[..n2].to_vec(),
            residual_phi: res.values[n2..].to_vec(),
            k_u: ku,
            k_phi: kphi,
        }
    }

    /// Compares the assembled blocks with central differences of the
    /// unconstrained residual (step `h`). Mismatches are relative to max|K|.
    pub fn check_tangents(&self, state: &FieldState, f: &[f64], traction: f64, h: f64) -> TangentCheck {
        let sys = self.assemble_system(state, f, traction);
        let n2 = 2 * self.num_nodes();
        let nn = self.num_nodes();
        let dense = |n: usize, t: &[(usize, usize, f64)]| {
            let mut a = vec![0.0; n * n];
            for &(i, j, v) in t {
                a[i * n + j] += v;
            }
            a
        };
        let ku = dense(n2, &sys.k_u);
        let kphi = dense(nn, &sys.k_phi);
        let mut fd_u = vec![0.0; n2 * n2];
        for j in 0..n2 {
            let (mut a, mut b) = (state.clone(), state.clone());
            a.u[j] += h;
            b.u[j] -= h;
            let (ra, rb) = (self.assemble_system(&a, f, traction), self.assemble_system(&b, f, traction));
            for i in 0..n2 {
                fd_u[i * n2 + j] = (ra.residual_u[i] - rb.residual_u[i]) / (2.0 * h);
            }
        }
        let mut fd_phi = vec![0.0; nn * nn];
        for j in 0..nn {
            let (mut a, mut b) = (state.clone(), state.clone());
            a.phi[j] += h;
            b.phi[j] -= h;
            let (ra, rb) = (self.assemble_system(&a, f, traction), self.assemble_system(&b, f, traction));
            for i in 0..nn {
                fd_phi[i * nn + j] = (ra.residual_phi[i] - rb.residual_phi[i]) / (2.0 * h);
            }
        }
        let compare = |k: &[f64], fd: &[f64], n: usize| {
            let scale = k.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            let (mut fdm, mut asym) = (0.0f64, 0.0f64);
            for i in 0..n {
                for j in 0..n {
                    fdm = fdm.max((k[i * n + j] - fd[i * n + j]).abs());
                    asym = asym.max((k[i * n + j] - k[j * n + i]).abs());
                }
            }
            (fdm / scale, asym / scale)
        };
        let (fd_mismatch_u, asymmetry_u) = compare(&ku, &fd_u, n2);
        let (fd_mismatch_phi, asymmetry_phi) = compare(&kphi, &fd_phi, nn);
        TangentCheck {
            fd_mismatch_u,
            fd_mismatch_phi,
            asymmetry_u,
            asymmetry_phi,
        }
    }

    /// Axial force transmitted through the loaded end.
    pub fn load_reaction(&self, state: &FieldState, f: &[f64], traction: f64) -> f64 {
        match self.control {
            ControlMode::Load => traction * self.unit_load_resultant(),
            ControlMode::Displacement => {
                let x = self.pack_raw(state);
                let (res, _, _) = self.assemble(&x, &state.points, f, 0.0, false, false);
                self.driven.iter().map(|&d| res.values[d]).sum()
            }
        }
    }

    /// Lower-triangle triplets of the free-dof blocks.
    pub(crate) fn free_tangents(
        &self,
        x: &[f64],
        points: &[PointState],
        f: &[f64],
    ) -> (Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>) {
        let (_, ku, kphi) = self.assemble(x, points, f, 0.0, true, true);
        let ku = ku
            .into_iter()
            .filter_map(|(i, j, v)| {
                let (fi, fj) = (self.free_u[i], self.free_u[j]);
                (fi != NOT_FREE && fj != NOT_FREE && fi >= fj).then_some((fi, fj, v))
            })
            .collect();
        let kphi = kphi
            .into_iter()
            .filter_map(|(i, j, v)| {
                let (fi, fj) = (self.free_phi[i], self.free_phi[j]);
                (fi >= fj).then_some((fi, fj, v))
            })
            .collect();
        (ku, kphi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::{patch_mesh, single_element_mesh};

    fn unit() -> MaterialParams {
        MaterialParams::new(1.0, 0.3, 1.0, 0.375).unwrap()
    }

    #[test]
    fn unloaded_body_is_in_equilibrium() {
        let p = FemProblem::new(
            single_element_mesh(0.0, 1.0, 1.0).unwrap(),
            unit(),
            PfModel::At2,
            SplitKind::Spectral,
            ControlMode::Load,
        )
        .unwrap();
        let s = p.empty_state();
        let r = p.residual(&p.pack(&s, 0.0), &s.points, &vec![1.0; 4], 0.0);
        assert!(r.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unit_load_integrates_area() {
        let p = FemProblem::new(
            single_element_mesh(0.0, 2.0, 1.0).unwrap(),
            unit(),
            PfModel::At1,
            SplitKind::None,
            ControlMode::Load,
        )
        .unwrap();
        assert!((p.unit_load_resultant() - std::f64::consts::PI * 4.0).abs() < 1e-12);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn tangents_match_finite_differences(
            shift in proptest::collection::vec(-0.3f64..0.3, 2),
            u in proptest::collection::vec(-0.05f64..0.05, 18),
            phi in proptest::collection::vec(0.0f64..0.9, 9),
            hist in proptest::collection::vec(0.0f64..0.5, 16),
            f in proptest::collection::vec(0.05f64..1.0, 16),
            at1 in proptest::bool::ANY,
            split in 0usize..4,
        ) {
            let model = if at1 { PfModel::At1 } else { PfModel::At2 };
            let split = [SplitKind::Spectral, SplitKind::NoTension, SplitKind::VolDev, SplitKind::None][split];
            let p = FemProblem::new(patch_mesh([shift[0], shift[1]]).unwrap(), unit(), model, split, ControlMode::Load).unwrap();
            let mut s = p.empty_state();
            s.u = u;
            s.phi = phi;
            for (pt, h) in s.points.iter_mut().zip(&hist) {
                pt.psi_max = *h;
            }
            let c = p.check_tangents(&s, &f, 0.3, 1e-6);
            proptest::prop_assert!(c.fd_mismatch_u <= 1e-6 && c.fd_mismatch_phi <= 1e-6, "{c:?}");
            proptest::prop_assert!(c.asymmetry_u <= 1e-14 && c.asymmetry_phi <= 1e-14, "{c:?}");
            let sys = p.assemble_system(&s, &f, 0.3);
            // K^u stays positive definite for any φ thanks to k > 0.
            let lower: Vec<_> = sys.k_u.iter().copied().filter(|t| t.0 >= t.1).collect();
            let mut shifted = lower.clone();
            shifted.extend((0..18).map(|i| (i, i, 0.0)));
            let fixed = [1, 3, 5];
            let reduced: Vec<_> = shifted
                .into_iter()
                .map(|(i, j, v)| if fixed.contains(&i) || fixed.contains(&j) { (i, j, if i == j { 1.0 } else { 0.0 }) } else { (i, j, v) })
                .collect();
            proptest::prop_assert!(crate::fem::linsolve::SparseCholesky::factorize(18, &reduced).is_ok());
        }
    }
}
