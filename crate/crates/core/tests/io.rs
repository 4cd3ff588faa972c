use pf_fatigue::fatigue::FatigueDegradation;
use pf_fatigue::fem::{generate_notched_mesh, write_vtk, FieldState, Mesh, NotchGeometry};
use pf_fatigue::homogeneous::{ControlMode, LifeOptions};
use pf_fatigue::material::{PfModel, SplitKind};
use pf_fatigue::study::{csv_rows, preset, sn_curve, write_csv, AmplitudeKind, Campaign, Solver};

#[test]
fn mesh_json_roundtrip_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = generate_notched_mesh(&NotchGeometry::for_kt(2).unwrap(), 0.315, 5.0).unwrap();
    let path = dir.path().join("kt2.json");
    mesh.write(&path).unwrap();
    assert_eq!(Mesh::read(&path).unwrap(), mesh);
}

#[test]
fn vtk_file_lists_every_node_and_cell() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = generate_notched_mesh(&NotchGeometry::for_kt(5).unwrap(), 0.315, 5.0).unwrap();
    let path = dir.path().join("kt5.vtk");
    write_vtk(&path, &mesh, &FieldState::new(&mesh), "kt5").unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains(&format!("POINTS {} double", mesh.nodes.len())));
    assert!(text.contains(&format!("CELLS {} {}", mesh.elements.len(), 5 * mesh.elements.len())));
}

fn campaign() -> Campaign {
    let p = preset("ModelMaterial").unwrap();
    let model = PfModel::At2;
    Campaign {
        material_name: p.name.into(),
        material: p.material(model),
        model,
        split: SplitKind::NoTension,
        fatigue: p.fatigue(model, FatigueDegradation::F1),
        control: ControlMode::Load,
        amplitude_kind: AmplitudeKind::Amplitude,
        amplitudes: vec![0.7, 0.5, 0.35, 0.25, 0.1],
        ratios: vec![-1.0, 0.0, 0.3],
        max_cycles: 1_000_000,
        substeps_per_cycle: 1,
        options: LifeOptions::default(),
        solver: Solver::Homogeneous,
    }
}

#[test]
fn identical_campaigns_write_identical_csv() {
    let render = || {
        let c = campaign();
        let mut buf = Vec::new();
        write_csv(&mut buf, &csv_rows(&c, &sn_curve(&c))).unwrap();
        buf
    };
    let (a, b) = (render(), render());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 15);
    // Runouts are flagged, not dropped.
    assert!(text.lines().any(|l| l.ends_with(",true")));
}
