use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pf_fatigue::fem::Mesh;

const SMOOTH: &str = r#"
schema_version = 1
seed = 3

[material]
preset = "ModelMaterial"

[fatigue]
degradation = "F2"

[loading]
values = [0.6, 0.45, 0.3, 0.1]
ratios = [-1.0, 0.0]
max_cycles = 1000000
"#;

fn pffatigue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pffatigue"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn smooth_campaign_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "smooth.toml", SMOOTH);
    let out = dir.path().join("out");
    let o = pffatigue(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "material,model,split,fdeg,n,kappa,alpha0,alpha_e,control,amplitude,R,N_i,N_f,runout"
    );
    assert_eq!(lines.len(), 1 + 8);
    // 0.1 lies below the endurance stress and runs out at the cap.
    assert!(lines[4].ends_with(",1000000,true"), "{}", lines[4]);
    assert!(lines[1].ends_with(",false"));
    assert!(out.join("manifest.toml").exists());
}

#[test]
fn manifest_reproduces_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "smooth.toml", SMOOTH);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(pffatigue(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    let manifest = a.join("manifest.toml");
    let o = pffatigue(&["run", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["results.csv", "manifest.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("[provenance]") && text.contains("version = \"0.1.0\""), "{text}");
}

#[test]
fn max_cycles_override_caps_the_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "smooth.toml", SMOOTH);
    let out = dir.path().join("out");
    let o = pffatigue(&[
        "--threads",
        "1",
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--max-cycles-override",
        "50",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",50,true") || !l.ends_with("true")), "{csv}");
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("max_cycles = 50"));
}

#[test]
fn out_of_range_poisson_ratio_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMOOTH.replace("preset = \"ModelMaterial\"", "preset = \"ModelMaterial\"\npoisson_ratio = 0.7");
    let cfg = write_config(dir.path(), "bad.toml", &text);
    let o = pffatigue(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("material.poisson_ratio"), "{}", stderr(&o));
    assert!(!dir.path().join("o").exists(), "nothing is written for a rejected configuration");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &SMOOTH.replace("[fatigue]", "[fatigue]\nexponent = 2"));
    let o = pffatigue(&["run", "--config", &cfg]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("exponent"), "{}", stderr(&o));
}

#[test]
fn notched_run_writes_vtk_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
schema_version = 1
[material]
preset = "300M"
[loading]
values = [700.0]
max_cycles = 3
[solver]
kind = "notched"
[notched]
kt = 5
[output]
snapshot_every = 1
"#;
    let cfg = write_config(dir.path(), "notched.toml", text);
    let out = dir.path().join("out");
    let o = pffatigue(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let vtk = out.join("vtk");
    for name in ["point000_cycle00000001.vtk", "point000_initiation.vtk", "point000_final.vtk"] {
        let text = fs::read_to_string(vtk.join(name)).unwrap_or_else(|_| panic!("missing {name}"));
        assert!(text.starts_with("# vtk DataFile Version"));
        assert!(text.contains("SCALARS phi"));
    }
}

#[test]
fn verify_oracle_passes() {
    let o = pffatigue(&["verify", "oracle"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{text}");
}

#[test]
fn verify_invariants_passes() {
    let o = pffatigue(&["verify", "invariants", "--seed", "11"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn mesh_command_writes_readable_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kt3.json");
    let o = pffatigue(&["mesh", "--kt", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mesh = Mesh::read(&path).unwrap();
    assert!(mesh.elements.len() > 100);
    assert!(!mesh.node_set("root").is_empty());
    let o = pffatigue(&["mesh", "--kt", "4", "--out", path.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn presets_lists_builtin_materials() {
    let o = pffatigue(&["presets"]);
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["AISI4340", "300M", "ModelMaterial"] {
        assert!(text.contains(name), "{text}");
    }
}
