//! Legacy ASCII VTK snapshots of the axisymmetric fields.

use std::fmt::Write as _;
use std::path::Path;

use super::assembly::FieldState;
use super::mesh::Mesh;
use crate::error::Result;

/// Renders nodal u and φ and per-cell ᾱ and H (maxima over the cell's
/// quadrature points) as an unstructured grid in the r-z plane.
pub fn render_vtk(mesh: &Mesh, state: &FieldState, title: &str) -> String {
    let nn = mesh.nodes.len();
    let ne = mesh.elements.len();
    let mut s = String::new();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {nn} double");
    for [r, z] in &mesh.nodes {
        let _ = writeln!(s, "{r:e} {z:e} 0");
    }
    let _ = writeln!(s, "CELLS {ne} {}", 5 * ne);
    for c in &mesh.elements {
        let _ = writeln!(s, "4 {} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        s.push_str("9\n");
    }
    let _ = writeln!(s, "POINT_DATA {nn}\nVECTORS u double");
    for n in 0..nn {
        let _ = writeln!(s, "{:e} {:e} 0", state.u[2 * n], state.u[2 * n + 1]);
    }
    s.push_str("SCALARS phi double 1\nLOOKUP_TABLE default\n");
    for v in &state.phi {
        let _ = writeln!(s, "{v:e}");
    }
    let _ = writeln!(s, "CELL_DATA {ne}");
    s.push_str("SCALARS alpha_bar double 1\nLOOKUP_TABLE default\n");
    for v in cell_max(ne, |q| state.points[q].fatigue.alpha_bar) {
        let _ = writeln!(s, "{v:e}");
    }
    s.push_str("SCALARS H double 1\nLOOKUP_TABLE default\n");
    for v in cell_max(ne, |q| state.points[q].psi_max) {
        let _ = writeln!(s, "{v:e}");
    }
    s
}

fn cell_max(ne: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..ne).map(|e| (0..4).map(|q| f(4 * e + q)).fold(0.0, f64::max)).collect()
}

pub fn write_vtk(path: &Path, mesh: &Mesh, state: &FieldState, title: &str) -> Result<()> {
    std::fs::write(path, render_vtk(mesh, state, title))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::single_element_mesh;

    #[test]
    fn sections_have_consistent_counts() {
        let mesh = single_element_mesh(0.0, 1.0, 2.0).unwrap();
        let mut state = FieldState::new(&mesh);
        state.phi[2] = 0.5;
        state.points[3].fatigue.alpha_bar = 7.0;
        let text = render_vtk(&mesh, &state, "t");
        assert!(text.contains("POINTS 4 double"));
        assert!(text.contains("CELLS 1 5"));
        assert!(text.contains("4 0 1 2 3"));
        assert!(text.contains("POINT_DATA 4"));
        assert!(text.contains("CELL_DATA 1"));
        let alpha = text.split("SCALARS alpha_bar double 1\nLOOKUP_TABLE default\n").nth(1).unwrap();
        assert!(alpha.starts_with("7e0"));
    }
}
