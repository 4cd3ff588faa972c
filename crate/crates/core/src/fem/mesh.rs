//! Axisymmetric quadrilateral meshes: notched bar generator, single element
//! and a JSON exchange format.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::element::ElementGeometry;
use crate::error::{invalid, Error, Result};

/// Node set with u_r = 0.
pub const AXIS: &str = "axis";
/// Node set with u_z = 0 (mid-plane of the specimen).
pub const SYMMETRY: &str = "symmetry";
/// Loaded end: node set and edge set.
pub const LOAD: &str = "load";
/// Nodes on the notch surface.
pub const NOTCH: &str = "notch";
/// Single node at the notch root.
pub const ROOT: &str = "root";

const FORMAT: &str = "pf-fatigue-mesh";
const VERSION: u32 = 1;

/// Bilinear quadrilaterals in the (r, z) half plane, nodes counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 4]>,
    #[serde(default)]
    pub node_sets: BTreeMap<String, Vec<usize>>,
    /// Boundary edges as node pairs.
    #[serde(default)]
    pub edge_sets: BTreeMap<String, Vec<[usize; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshFile {
    format: String,
    version: u32,
    nodes: Vec<[f64; 2]>,
    elements: Vec<[usize; 4]>,
    #[serde(default)]
    node_sets: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    edge_sets: BTreeMap<String, Vec<[usize; 2]>>,
}

impl Mesh {
    pub fn node_set(&self, name: &str) -> &[usize] {
        self.node_sets.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge_set(&self, name: &str) -> &[[usize; 2]] {
        self.edge_sets.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Checks connectivity, set references and element orientation.
    pub fn validate(&self) -> Result<()> {
        let nn = self.nodes.len();
        if nn == 0 || self.elements.is_empty() {
            return Err(Error::Mesh("mesh has no nodes or no elements".into()));
        }
        for (i, p) in self.nodes.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) || p[0] < 0.0 {
                return Err(Error::Mesh(format!("node {i} has invalid coordinates {p:?} (r must be >= 0)")));
            }
        }
        for (e, conn) in self.elements.iter().enumerate() {
            if conn.iter().any(|&n| n >= nn) {
                return Err(Error::Mesh(format!("element {e} references a missing node")));
            }
        }
        for (name, set) in &self.node_sets {
            if set.iter().any(|&n| n >= nn) {
                return Err(Error::Mesh(format!("node set `{name}` references a missing node")));
            }
        }
        for (name, set) in &self.edge_sets {
            if set.iter().flatten().any(|&n| n >= nn) {
                return Err(Error::Mesh(format!("edge set `{name}` references a missing node")));
            }
        }
        for e in 0..self.elements.len() {
            ElementGeometry::new(&self.element_coords(e), e)?;
        }
        Ok(())
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 2]; 4] {
        self.elements[e].map(|n| self.nodes[n])
    }

    /// Volume of the solid of revolution.
    pub fn volume(&self) -> Result<f64> {
        let mut v = 0.0;
        for e in 0..self.elements.len() {
            v += ElementGeometry::new(&self.element_coords(e), e)?.points.iter().map(|p| p.dv).sum::<f64>();
        }
        Ok(v)
    }

    /// Largest edge length among elements touching `node`.
    pub fn size_near(&self, node: usize) -> f64 {
        let mut h: f64 = 0.0;
        for conn in self.elements.iter().filter(|c| c.contains(&node)) {
            for k in 0..4 {
                let (a, b) = (self.nodes[conn[k]], self.nodes[conn[(k + 1) % 4]]);
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }

    pub fn to_json(&self) -> Result<String> {
        let file = MeshFile {
            format: FORMAT.into(),
            version: VERSION,
            nodes: self.nodes.clone(),
            elements: self.elements.clone(),
            node_sets: self.node_sets.clone(),
            edge_sets: self.edge_sets.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeshFile = serde_json::from_str(text)?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::Mesh(format!(
                "unsupported mesh format `{}` version {} (expected `{FORMAT}` version {VERSION})",
                file.format, file.version
            )));
        }
        let mesh = Mesh {
            nodes: file.nodes,
            elements: file.elements,
            node_sets: file.node_sets,
            edge_sets: file.edge_sets,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Circumferentially V-grooved cylindrical bar. Lengths in mm, angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotchGeometry {
    pub outer_diameter: f64,
    pub net_diameter: f64,
    pub root_radius: f64,
    pub groove_angle: f64,
    /// Distance from the notch plane to the loaded end.
    pub half_length: f64,
}

impl NotchGeometry {
    /// 12.7 mm bar with a 60° groove down to 6.35 mm.
    pub fn standard(root_radius: f64) -> Self {
        Self {
            outer_diameter: 12.7,
            net_diameter: 6.35,
            root_radius,
            groove_angle: 60.0,
            half_length: 25.4,
        }
    }

    /// Standard bar with the nominal stress concentration 2, 3 or 5.
    pub fn for_kt(kt: u32) -> Option<Self> {
        let rho = match kt {
            2 => 1.016,
            3 => 0.368,
            5 => 0.107,
            _ => return None,
        };
        Some(Self::standard(rho))
    }

    fn half_angle(&self) -> f64 {
        0.5 * self.groove_angle.to_radians()
    }

    /// Point where the root arc meets the flank.
    fn tangent_point(&self) -> [f64; 2] {
        let theta = 0.5 * PI + self.half_angle();
        let c = 0.5 * self.net_diameter + self.root_radius;
        [c + self.root_radius * theta.cos(), self.root_radius * theta.sin()]
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.outer_diameter) || !pos(self.net_diameter) || !pos(self.half_length) {
            return Err(invalid("geometry", "diameters and half_length must be > 0"));
        }
        if self.net_diameter >= self.outer_diameter {
            return Err(invalid("geometry.net_diameter", "must be smaller than outer_diameter"));
        }
        if !pos(self.root_radius) {
            return Err(invalid("geometry.root_radius", "must be > 0"));
        }
        if !(self.groove_angle > 0.0 && self.groove_angle < 180.0) {
            return Err(invalid("geometry.groove_angle", "must lie in (0, 180) degrees"));
        }
        let t = self.tangent_point();
        if t[0] >= 0.5 * self.outer_diameter {
            return Err(invalid("geometry.root_radius", "too large for the groove depth"));
        }
        if self.profile_top() >= self.half_length {
            return Err(invalid("geometry.half_length", "shorter than the groove"));
        }
        Ok(())
    }

    fn flank_length(&self) -> f64 {
        (0.5 * self.outer_diameter - self.tangent_point()[0]) / self.half_angle().cos()
    }

    fn profile_top(&self) -> f64 {
        self.tangent_point()[1] + self.flank_length() * self.half_angle().sin()
    }

    fn arc_length(&self) -> f64 {
        self.root_radius * (0.5 * PI - self.half_angle())
    }

    /// Length of the notch surface from the root to the loaded end.
    pub fn profile_length(&self) -> f64 {
        self.arc_length() + self.flank_length() + (self.half_length - self.profile_top())
    }

    /// Point on the outer surface at arc length `s` from the root.
    pub fn profile_point(&self, s: f64) -> [f64; 2] {
        let (sa, sf) = (self.arc_length(), self.flank_length());
        let c = 0.5 * self.net_diameter + self.root_radius;
        if s <= 0.0 {
            [0.5 * self.net_diameter, 0.0]
        } else if s <= sa {
            let a = s / self.root_radius;
            [c - self.root_radius * a.cos(), self.root_radius * a.sin()]
        } else if s <= sa + sf {
            let t = self.tangent_point();
            let b = self.half_angle();
            [t[0] + (s - sa) * b.cos(), t[1] + (s - sa) * b.sin()]
        } else {
            [0.5 * self.outer_diameter, self.profile_top() + (s - sa - sf)]
        }
    }

    /// Surface radius at height `z`.
    pub fn radius_at(&self, z: f64) -> f64 {
        let t = self.tangent_point();
        let c = 0.5 * self.net_diameter + self.root_radius;
        if z <= t[1] {
            c - (self.root_radius.powi(2) - z * z).max(0.0).sqrt()
        } else if z <= self.profile_top() {
            t[0] + (z - t[1]) / self.half_angle().tan()
        } else {
            0.5 * self.outer_diameter
        }
    }

    /// Volume of the modelled half specimen.
    pub fn volume(&self) -> f64 {
        // Composite Simpson on the piecewise-smooth profile.
        let breaks = [0.0, self.tangent_point()[1], self.profile_top(), self.half_length];
        let mut v = 0.0;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = 20_000;
            let h = (b - a) / n as f64;
            let f = |z: f64| PI * self.radius_at(z).powi(2);
            let mut s = f(a) + f(b);
            for i in 1..n {
                s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            v += s * h / 3.0;
        }
        v
    }

    /// Net-section to gross-section area ratio (d/D)².
    pub fn area_ratio(&self) -> f64 {
        (self.net_diameter / self.outer_diameter).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshOptions {
    /// Root element size is at most ℓ/ref_ratio.
    pub ref_ratio: f64,
    /// Root element size is at most root_radius/notch_resolution.
    pub notch_resolution: f64,
    /// Ratio between neighbouring element sizes.
    pub growth: f64,
    /// Largest element along the net section, in multiples of ℓ.
    pub ligament_size: f64,
    /// Largest element far from the notch, as a fraction of the outer diameter.
    pub far_size: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            ref_ratio: 5.0,
            notch_resolution: 4.0,
            growth: 1.15,
            ligament_size: 0.5,
            far_size: 0.125,
        }
    }
}

/// Positions from 0 to `length` with sizes growing geometrically from `h0`
/// up to `h_max`; the last pass rescales them to end exactly at `length`.
pub(crate) fn graded_positions(length: f64, h0: f64, growth: f64, h_max: f64) -> Vec<f64> {
    let mut sizes = Vec::new();
    let mut total = 0.0;
    let mut h = h0.min(length);
    while total + 0.5 * h < length {
        sizes.push(h);
        total += h;
        h = (h * growth).min(h_max.max(h0));
    }
    if sizes.is_empty() {
        sizes.push(length);
        total = length;
    }
    // Stretch everything but the first element onto the remaining length.
    let first = sizes[0];
    let rest: f64 = total - first;
    let scale = if rest > 0.0 { (length - first) / rest } else { 1.0 };
    let mut pos = vec![0.0, first.min(length)];
    for &s in &sizes[1..] {
        pos.push(pos.last().unwrap() + s * scale);
    }
    *pos.last_mut().unwrap() = length;
    pos
}

/// Root element size used by the generator.
pub fn root_element_size(geom: &NotchGeometry, ell: f64, opts: &MeshOptions) -> f64 {
    (ell / opts.ref_ratio).min(geom.root_radius / opts.notch_resolution)
}

pub fn generate_notched_mesh(geom: &NotchGeometry, ell: f64, ref_ratio: f64) -> Result<Mesh> {
    generate_notched_mesh_with(
        geom,
        ell,
        &MeshOptions {
            ref_ratio,
            ..MeshOptions::default()
        },
    )
}

/// Transfinite (Coons) mesh of the upper half of a notched bar, graded
/// toward the notch root.
pub fn generate_notched_mesh_with(geom: &NotchGeometry, ell: f64, opts: &MeshOptions) -> Result<Mesh> {
    geom.validate()?;
    if !(opts.ref_ratio > 0.0 && opts.ref_ratio.is_finite()) {
        return Err(invalid("mesh.ref_ratio", format!("must be > 0 (got {})", opts.ref_ratio)));
    }
    if !(ell > 0.0) {
        return Err(invalid("length_scale", "must be > 0"));
    }
    if !(opts.growth >= 1.0) || !(opts.notch_resolution > 0.0) || !(opts.ligament_size > 0.0) || !(opts.far_size > 0.0) {
        return Err(invalid("mesh", "growth must be >= 1 and sizes must be > 0"));
    }
    let h0 = root_element_size(geom, ell, opts);
    let a = 0.5 * geom.net_diameter;
    let big_r = 0.5 * geom.outer_diameter;
    let len = geom.half_length;

    // Ligament positions measured from the root, converted to r ascending.
    let lig = graded_positions(a, h0, opts.growth, (opts.ligament_size * ell).max(h0));
    let xi_bottom: Vec<f64> = lig.iter().rev().map(|t| 1.0 - t / a).collect();
    let nx = xi_bottom.len() - 1;
    let xi_top: Vec<f64> = (0..=nx).map(|i| i as f64 / nx as f64).collect();

    let total = geom.profile_length();
    let s_right = graded_positions(total, h0, opts.growth, (opts.far_size * geom.outer_diameter).max(h0));
    let ny = s_right.len() - 1;
    let eta: Vec<f64> = s_right.iter().map(|s| s / total).collect();

    let bottom = |x: f64| [x * a, 0.0];
    let top = |x: f64| [x * big_r, len];
    let left = |e: f64| [0.0, e * len];
    let p00 = [0.0, 0.0];
    let p10 = [a, 0.0];
    let p01 = [0.0, len];
    let p11 = [big_r, len];

    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for (j, &e) in eta.iter().enumerate() {
        let r_side = geom.profile_point(s_right[j]);
        let l_side = left(e);
        for i in 0..=nx {
            let x = (1.0 - e) * xi_bottom[i] + e * xi_top[i];
            let b = bottom(xi_bottom[i]);
            let t = top(xi_top[i]);
            let mut p = [0.0; 2];
            for k in 0..2 {
                p[k] = (1.0 - x) * l_side[k] + x * r_side[k] + (1.0 - e) * b[k] + e * t[k]
                    - ((1.0 - x) * (1.0 - e) * p00[k] + x * (1.0 - e) * p10[k] + (1.0 - x) * e * p01[k] + x * e * p11[k]);
            }
            if i == 0 {
                p[0] = 0.0;
            }
            if j == 0 {
                p[1] = 0.0;
            }
            if i == nx {
                p = r_side;
            }
            nodes.push(p);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut node_sets = BTreeMap::new();
    node_sets.insert(AXIS.to_string(), (0..=ny).map(|j| id(0, j)).collect());
    node_sets.insert(SYMMETRY.to_string(), (0..=nx).map(|i| id(i, 0)).collect());
    node_sets.insert(LOAD.to_string(), (0..=nx).map(|i| id(i, ny)).collect());
    node_sets.insert(NOTCH.to_string(), (0..=ny).map(|j| id(nx, j)).collect());
    node_sets.insert(ROOT.to_string(), vec![id(nx, 0)]);
    let mut edge_sets = BTreeMap::new();
    edge_sets.insert(LOAD.to_string(), (0..nx).map(|i| [id(i, ny), id(i + 1, ny)]).collect());
    let mesh = Mesh {
        nodes,
        elements,
        node_sets,
        edge_sets,
    };
    mesh.validate()
        .map_err(|e| Error::Mesh(format!("generated mesh is invalid ({e}); try a smaller growth ratio")))?;
    Ok(mesh)
}

/// One element [r0, r0 + width] × [0, height]. The left edge is the axis
/// when `r0` is zero; the bottom is the symmetry plane and the top is loaded.
pub fn single_element_mesh(r0: f64, width: f64, height: f64) -> Result<Mesh> {
    if !(r0 >= 0.0 && width > 0.0 && height > 0.0) {
        return Err(invalid("single_element", "need r0 >= 0 and positive width and height"));
    }
    let nodes = vec![[r0, 0.0], [r0 + width, 0.0], [r0 + width, height], [r0, height]];
    let mut node_sets = BTreeMap::new();
    node_sets.insert(AXIS.to_string(), if r0 == 0.0 { vec![0, 3] } else { vec![] });
    node_sets.insert(SYMMETRY.to_string(), vec![0, 1]);
    node_sets.insert(LOAD.to_string(), vec![3, 2]);
    node_sets.insert(NOTCH.to_string(), vec![1, 2]);
    node_sets.insert(ROOT.to_string(), vec![1]);
    let mut edge_sets = BTreeMap::new();
    edge_sets.insert(LOAD.to_string(), vec![[3, 2]]);
    let mesh = Mesh {
        nodes,
        elements: vec![[0, 1, 2, 3]],
        node_sets,
        edge_sets,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// 2 × 2 patch on [0.5, 2.5] × [0, 2] whose centre node is moved by
/// `jitter`; keep |jitter| < 0.5 to avoid inverted elements.
pub fn patch_mesh(jitter: [f64; 2]) -> Result<Mesh> {
    let mut nodes = Vec::new();
    for j in 0..3 {
        for i in 0..3 {
            nodes.push([0.5 + i as f64, j as f64]);
        }
    }
    nodes[4][0] += jitter[0];
    nodes[4][1] += jitter[1];
    let mut node_sets = BTreeMap::new();
    node_sets.insert(AXIS.to_string(), vec![]);
    node_sets.insert(SYMMETRY.to_string(), vec![0, 1, 2]);
    node_sets.insert(LOAD.to_string(), vec![6, 7, 8]);
    node_sets.insert(NOTCH.to_string(), vec![2, 5, 8]);
    node_sets.insert(ROOT.to_string(), vec![2]);
    let mut edge_sets = BTreeMap::new();
    edge_sets.insert(LOAD.to_string(), vec![[6, 7], [7, 8]]);
    let mesh = Mesh {
        nodes,
        elements: vec![[0, 1, 4, 3], [1, 2, 5, 4], [3, 4, 7, 6], [4, 5, 8, 7]],
        node_sets,
        edge_sets,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Side length of the smallest element touching the root, a sanity measure.
pub fn root_size(mesh: &Mesh) -> Option<f64> {
    mesh.node_set(ROOT).first().map(|&n| mesh.size_near(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_positions_cover_length() {
        let p = graded_positions(3.0, 0.05, 1.2, 0.5);
        assert_eq!(p[0], 0.0);
        assert_eq!(*p.last().unwrap(), 3.0);
        assert!((p[1] - 0.05).abs() < 1e-15);
        for w in p.windows(2) {
            assert!(w[1] > w[0]);
            assert!(w[1] - w[0] <= 0.5 * 1.2);
        }
    }

    #[test]
    fn notched_mesh_is_valid_and_refined() {
        let g = NotchGeometry::for_kt(2).unwrap();
        let m = generate_notched_mesh(&g, 0.315, 5.0).unwrap();
        let root = m.node_set(ROOT)[0];
        assert_eq!(m.nodes[root], [3.175, 0.0]);
        assert!(root_size(&m).unwrap() <= 0.315 / 5.0 * 1.5);
        assert!(m.node_set(AXIS).iter().all(|&n| m.nodes[n][0] == 0.0));
        assert!(m.node_set(SYMMETRY).iter().all(|&n| m.nodes[n][1] == 0.0));
        assert!(m.node_set(LOAD).iter().all(|&n| (m.nodes[n][1] - 25.4).abs() < 1e-12));
    }

    #[test]
    fn volume_matches_solid_of_revolution() {
        for kt in [2, 3, 5] {
            let g = NotchGeometry::for_kt(kt).unwrap();
            let m = generate_notched_mesh(&g, 0.315, 5.0).unwrap();
            let (vm, va) = (m.volume().unwrap(), g.volume());
            assert!((vm - va).abs() / va < 5e-3, "Kt={kt}: {vm} vs {va}");
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let g = NotchGeometry::for_kt(3).unwrap();
        assert!(generate_notched_mesh(&g, 0.315, 0.0).is_err());
        let mut bad = g;
        bad.root_radius = 10.0;
        assert!(generate_notched_mesh(&bad, 0.315, 5.0).is_err());
        bad = g;
        bad.net_diameter = 13.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = single_element_mesh(0.0, 1.0, 1.0).unwrap();
        let back = Mesh::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(m, back);
        let bad = m.to_json().unwrap().replace("\"version\": 1", "\"version\": 9");
        assert!(Mesh::from_json(&bad).is_err());
    }

    #[test]
    fn inverted_element_is_rejected() {
        let mut m = single_element_mesh(0.0, 1.0, 1.0).unwrap();
        m.elements[0] = [0, 3, 2, 1];
        assert!(matches!(m.validate(), Err(Error::InvertedElement { .. })));
    }
}
