//! Four-node axisymmetric quadrilateral with 2×2 Gauss integration.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::material::MaterialParams;

const NODE_XI: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Natural coordinates of the quadrature points, unit weights.
pub fn gauss_points() -> [[f64; 2]; 4] {
    let g = 1.0 / 3f64.sqrt();
    [[-g, -g], [g, -g], [g, g], [-g, g]]
}

pub fn shape(xi: f64, eta: f64) -> [f64; 4] {
    NODE_XI.map(|[a, b]| 0.25 * (1.0 + a * xi) * (1.0 + b * eta))
}

fn shape_derivatives(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    NODE_XI.map(|[a, b]| [0.25 * a * (1.0 + b * eta), 0.25 * b * (1.0 + a * xi)])
}

/// Quadrature point data of one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub n: [f64; 4],
    /// ∂N/∂r, ∂N/∂z per node.
    pub dn: [[f64; 2]; 4],
    pub r: f64,
    pub z: f64,
    /// 2π·r·det J·w.
    pub dv: f64,
}

impl QuadPoint {
    /// Voigt strain [ε_rr, ε_zz, ε_θθ, γ_rz] from nodal displacements.
    pub fn strain(&self, u: &[[f64; 2]; 4]) -> [f64; 4] {
        let mut e = [0.0; 4];
        for a in 0..4 {
            let [ur, uz] = u[a];
            e[0] += self.dn[a][0] * ur;
            e[1] += self.dn[a][1] * uz;
            e[2] += self.n[a] / self.r * ur;
            e[3] += self.dn[a][1] * ur + self.dn[a][0] * uz;
        }
        e
    }

    /// Strain-displacement block of node `a` (4 × 2).
    pub fn b(&self, a: usize) -> [[f64; 2]; 4] {
        let [dr, dz] = self.dn[a];
        [[dr, 0.0], [0.0, dz], [self.n[a] / self.r, 0.0], [dz, dr]]
    }

    pub fn interpolate(&self, v: &[f64; 4]) -> f64 {
        (0..4).map(|a| self.n[a] * v[a]).sum()
    }

    pub fn gradient(&self, v: &[f64; 4]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for a in 0..4 {
            g[0] += self.dn[a][0] * v[a];
            g[1] += self.dn[a][1] * v[a];
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    pub points: [QuadPoint; 4],
}

impl ElementGeometry {
    pub fn new(x: &[[f64; 2]; 4], element: usize) -> Result<Self> {
        let gp = gauss_points();
        let mut points = [QuadPoint {
            n: [0.0; 4],
            dn: [[0.0; 2]; 4],
            r: 0.0,
            z: 0.0,
            dv: 0.0,
        }; 4];
        for (q, &[xi, eta]) in gp.iter().enumerate() {
            let n = shape(xi, eta);
            let dnat = shape_derivatives(xi, eta);
            let mut j = [[0.0; 2]; 2];
            for a in 0..4 {
                for k in 0..2 {
                    j[0][k] += dnat[a][0] * x[a][k];
                    j[1][k] += dnat[a][1] * x[a][k];
                }
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let r: f64 = (0..4).map(|a| n[a] * x[a][0]).sum();
            let z: f64 = (0..4).map(|a| n[a] * x[a][1]).sum();
            if !(det > 0.0) || !(r > 0.0) {
                return Err(Error::InvertedElement { element, det });
            }
            let mut dn = [[0.0; 2]; 4];
            for a in 0..4 {
                dn[a][0] = (j[1][1] * dnat[a][0] - j[0][1] * dnat[a][1]) / det;
                dn[a][1] = (-j[1][0] * dnat[a][0] + j[0][0] * dnat[a][1]) / det;
            }
            points[q] = QuadPoint {
                n,
                dn,
                r,
                z,
                dv: 2.0 * PI * r * det,
            };
        }
        Ok(Self { points })
    }
}

/// Isotropic elasticity matrix for [ε_rr, ε_zz, ε_θθ, γ_rz].
pub fn elasticity_matrix(mat: &MaterialParams) -> [[f64; 4]; 4] {
    let (l, m) = (mat.lambda(), mat.mu());
    let d = l + 2.0 * m;
    [[d, l, l, 0.0], [l, d, l, 0.0], [l, l, d, 0.0], [0.0, 0.0, 0.0, m]]
}

pub fn mat_vec(d: &[[f64; 4]; 4], e: &[f64; 4]) -> [f64; 4] {
    let mut s = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            s[i] += d[i][j] * e[j];
        }
    }
    s
}

/// Bilinear extrapolation of quadrature values to the element nodes.
pub fn extrapolate_to_nodes(values: &[f64; 4]) -> [f64; 4] {
    let s = 3f64.sqrt();
    NODE_XI.map(|[a, b]| {
        let n = shape(a * s, b * s);
        (0..4).map(|q| n[q] * values[q]).sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn partition_of_unity_and_volume() {
        let x = [[1.0, 0.0], [3.0, 0.0], [3.0, 2.0], [1.0, 2.0]];
        let g = ElementGeometry::new(&x, 0).unwrap();
        for p in &g.points {
            assert_relative_eq!(p.n.iter().sum::<f64>(), 1.0, max_relative = 1e-15);
            let sdr: f64 = p.dn.iter().map(|d| d[0]).sum();
            assert!(sdr.abs() < 1e-14);
        }
        let v: f64 = g.points.iter().map(|p| p.dv).sum();
        assert_relative_eq!(v, PI * (9.0 - 1.0) * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn affine_displacement_gives_exact_strain() {
        // u_r = a·r, u_z = b·z + c·r: ε_rr = ε_θθ = a, ε_zz = b, γ = c.
        let x = [[0.5, 0.1], [2.0, 0.0], [2.2, 1.5], [0.4, 1.2]];
        let g = ElementGeometry::new(&x, 0).unwrap();
        let (a, b, c) = (0.01, -0.02, 0.003);
        let u = x.map(|p| [a * p[0], b * p[1] + c * p[0]]);
        for p in &g.points {
            let e = p.strain(&u);
            assert_relative_eq!(e[0], a, max_relative = 1e-12);
            assert_relative_eq!(e[1], b, max_relative = 1e-12);
            assert_relative_eq!(e[2], a, max_relative = 1e-12);
            assert_relative_eq!(e[3], c, max_relative = 1e-10);
        }
    }

    #[test]
    fn extrapolation_reproduces_bilinear_fields() {
        let gp = gauss_points();
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - 3.0 * y + 0.5 * x * y;
        let vals = [0, 1, 2, 3].map(|q| f(gp[q][0], gp[q][1]));
        let nodal = extrapolate_to_nodes(&vals);
        for (a, [x, y]) in NODE_XI.iter().enumerate() {
            assert_relative_eq!(nodal[a], f(*x, *y), max_relative = 1e-12);
        }
    }
}
