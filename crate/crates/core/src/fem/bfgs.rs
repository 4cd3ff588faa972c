//! Monolithic quasi-Newton solve of the coupled u/φ residual.
//!
//! The initial operator is the block-diagonal tangent diag(K^u, K^φ), factorized
//! once per solve and again after `refresh_every` iterations or a failed line
//! search. Updates use the limited-memory two-loop recursion.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::assembly::{FemProblem, NOT_FREE};
use super::linsolve::SparseCholesky;
use crate::error::{Error, Result};
use crate::homogeneous::PointState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BfgsOptions {
    /// Per-field tolerance on ‖r‖∞ relative to the residual magnitude scale.
    pub rtol: f64,
    pub max_iterations: usize,
    pub refresh_every: usize,
    /// Stored correction pairs.
    pub memory: usize,
    pub max_halvings: u32,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            max_iterations: 200,
            refresh_every: 50,
            memory: 30,
            max_halvings: 8,
        }
    }
}

impl BfgsOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol < 1.0) {
            return Err(crate::error::invalid("solver.rtol", "must lie in (0, 1)"));
        }
        if self.max_iterations == 0 || self.refresh_every == 0 {
            return Err(crate::error::invalid("solver.max_iterations", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BfgsReport {
    pub iterations: usize,
    pub factorizations: usize,
    pub residual_u: f64,
    pub residual_phi: f64,
}

struct Preconditioner {
    ku: SparseCholesky,
    kphi: SparseCholesky,
}

/// Full-vector indices of the unknowns, u block first.
struct Layout {
    dofs: Vec<usize>,
    n_u: usize,
}

impl Layout {
    fn new(p: &FemProblem) -> Self {
        let (free_u, n_u) = p.free_u();
        let mut dofs = vec![0; n_u];
        for (dof, &k) in free_u.iter().enumerate() {
            if k != NOT_FREE {
                dofs[k] = dof;
            }
        }
        let n2 = 2 * p.num_nodes();
        let (free_phi, _) = p.free_phi();
        let base = dofs.len();
        dofs.resize(base + free_phi.len(), 0);
        for (node, &k) in free_phi.iter().enumerate() {
            dofs[base + k] = n2 + node;
        }
        Self { dofs, n_u }
    }

    fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.dofs.iter().map(|&d| full[d]).collect()
    }
}

fn factorize(n: usize, mut t: Vec<(usize, usize, f64)>) -> Result<SparseCholesky> {
    match SparseCholesky::factorize(n, &t) {
        Ok(c) => Ok(c),
        Err(_) => {
            // Regions with no driving force and vanishing fatigue factor leave
            // K^φ singular; a tiny diagonal shift keeps the operator usable.
            let mut diag = vec![0.0; n];
            for &(i, j, v) in &t {
                if i == j {
                    diag[i] += v;
                }
            }
            let scale = diag.iter().copied().fold(0.0, f64::max).max(1e-300);
            t.extend((0..n).map(|i| (i, i, 1e-10 * scale)));
            SparseCholesky::factorize(n, &t)
        }
    }
}

impl Preconditioner {
    fn build(p: &FemProblem, x: &[f64], points: &[PointState], f: &[f64]) -> Result<Self> {
        let (ku, kphi) = p.free_tangents(x, points, f);
        Ok(Self {
            ku: factorize(p.free_u().1, ku)?,
            kphi: factorize(p.free_phi().1, kphi)?,
        })
    }

    fn apply(&self, v: &mut [f64], n_u: usize) {
        let (a, b) = v.split_at_mut(n_u);
        self.ku.solve_in_place(a);
        self.kphi.solve_in_place(b);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves r(x) = 0 for the free entries of `x` (prescribed entries are left
/// untouched). `f` is the fatigue factor per quadrature point and `traction`
/// the applied load-edge traction.
pub fn bfgs_solve(
    p: &FemProblem,
    x: &mut [f64],
    points: &[PointState],
    f: &[f64],
    traction: f64,
    opts: &BfgsOptions,
) -> Result<BfgsReport> {
    let layout = Layout::new(p);
    let n_u = layout.n_u;
    let eval = |x: &[f64]| {
        let r = p.residual(x, points, f, traction);
        let red = layout.gather(&r.values);
        (red, r.scale_u, r.scale_phi)
    };
    let norms = |r: &[f64]| (inf_norm(&r[..n_u]), inf_norm(&r[n_u..]));
    let converged = |r: &[f64], su: f64, sp: f64| {
        let (nu, np) = norms(r);
        nu <= opts.rtol * su && np <= opts.rtol * sp
    };

    let (mut r, su, sp) = eval(x);
    let mut report = BfgsReport::default();
    let finish = |r: &[f64], mut rep: BfgsReport| {
        let (a, b) = norms(r);
        rep.residual_u = a;
        rep.residual_phi = b;
        rep
    };
    if converged(&r, su, sp) {
        return Ok(finish(&r, report));
    }
    // Line-search merit rᵀ·K0⁻¹·r, independent of the field scales.
    let merit = |pre: &Preconditioner, r: &[f64]| {
        let mut z = r.to_vec();
        pre.apply(&mut z, n_u);
        dot(r, &z)
    };

    let mut pre = Preconditioner::build(p, x, points, f)?;
    report.factorizations = 1;
    let mut since_refresh = 0;
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut m0 = merit(&pre, &r);
    let mut scales = (su, sp);

    while report.iterations < opts.max_iterations {
        report.iterations += 1;
        since_refresh += 1;
        // Two-loop recursion for d = −H·r.
        let mut q = r.clone();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        pre.apply(&mut q, n_u);
        for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let d: Vec<f64> = q.iter().map(|v| -v).collect();

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut xt = x.to_vec();
            for (k, &dof) in layout.dofs.iter().enumerate() {
                xt[dof] += step * d[k];
            }
            let (rt, su_t, sp_t) = eval(&xt);
            if rt.iter().all(|v| v.is_finite()) {
                let mt = merit(&pre, &rt);
                if mt < m0 || converged(&rt, su_t, sp_t) {
                    accepted = Some((xt, rt, mt, su_t, sp_t));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((xt, rt, mt, su_t, sp_t)) => {
                let s: Vec<f64> = d.iter().map(|v| step * v).collect();
                let y: Vec<f64> = rt.iter().zip(&r).map(|(a, b)| a - b).collect();
                x.copy_from_slice(&xt);
                r = rt;
                m0 = mt;
                if converged(&r, su_t, sp_t) {
                    return Ok(finish(&r, report));
                }
                let sy = dot(&s, &y);
                if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
                    pairs.push_back((s, y, 1.0 / sy));
                    if pairs.len() > opts.memory {
                        pairs.pop_front();
                    }
                }
                scales = (su_t, sp_t);
                if since_refresh >= opts.refresh_every {
                    pre = Preconditioner::build(p, x, points, f)?;
                    report.factorizations += 1;
                    pairs.clear();
                    since_refresh = 0;
                    m0 = merit(&pre, &r);
                }
            }
            None => {
                if since_refresh <= 1 && pairs.is_empty() {
                    break;
                }
                pre = Preconditioner::build(p, x, points, f)?;
                report.factorizations += 1;
                pairs.clear();
                since_refresh = 0;
                m0 = merit(&pre, &r);
            }
        }
    }
    let (a, b) = norms(&r);
    Err(Error::NoConvergence {
        iterations: report.iterations,
        residual: (a / scales.0.max(f64::MIN_POSITIVE)).max(b / scales.1.max(f64::MIN_POSITIVE)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::single_element_mesh;
    use crate::homogeneous::ControlMode;
    use crate::material::{MaterialParams, PfModel, SplitKind};

    #[test]
    fn elastic_at1_step_is_linear_and_leaves_phi_zero() {
        let mat = MaterialParams::new(1.0, 0.3, 1.0, 0.375).unwrap();
        let p = FemProblem::new(
            single_element_mesh(1.0, 1.0, 1.0).unwrap(),
            mat,
            PfModel::At1,
            SplitKind::NoTension,
            ControlMode::Load,
        )
        .unwrap();
        let s = p.empty_state();
        let mut x = p.pack(&s, 0.0);
        let f = vec![1.0; 4];
        let rep = bfgs_solve(&p, &mut x, &s.points, &f, 0.5, &BfgsOptions::default()).unwrap();
        assert!(rep.iterations <= 2, "{rep:?}");
        assert!(x[8..].iter().all(|v| v.abs() < 1e-12));
        // Uniaxial stress 0.5 with E = 1 (1+k): top displacement 0.5/(1+k).
        let uz = x[2 * 2 + 1];
        assert!((uz - 0.5 / (1.0 + 1e-7)).abs() < 1e-9, "{uz}");
    }
}
