use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use pf_fatigue::fem::{generate_notched_mesh_with, render_vtk, write_vtk, FieldState, NotchGeometry, NotchedSetup};
use pf_fatigue::fem::mesh::root_size;
use pf_fatigue::material::{critical_point, PfModel};
use pf_fatigue::study::{csv_rows, fit_basquin, material_presets, sn_curve, write_csv, Campaign, SNPoint, Solver};

use crate::config::{OutputSection, RunConfig};

const DEFAULT_OUT: &str = "pffatigue-out";

pub fn run(config: &Path, out: Option<PathBuf>, max_cycles: Option<u64>) -> Result<()> {
    let mut cfg = RunConfig::read(config)?;
    if let Some(n) = max_cycles {
        cfg.loading.max_cycles = n;
        cfg.validate().context("after --max-cycles-override")?;
    }
    let campaign = cfg.campaign()?;
    let dir = out
        .or_else(|| cfg.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let points = match &campaign.solver {
        Solver::Homogeneous => sn_curve(&campaign),
        Solver::Notched(setup) => notched_points(&campaign, setup, &dir, &cfg.output)?,
    };

    let csv_path = dir.join("results.csv");
    let file = fs::File::create(&csv_path).with_context(|| format!("cannot create {}", csv_path.display()))?;
    write_csv(file, &csv_rows(&campaign, &points))?;

    let mut manifest = cfg.clone();
    let mut prov = toml::Table::new();
    prov.insert("tool".into(), "pffatigue".into());
    prov.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    prov.insert("results".into(), "results.csv".into());
    manifest.provenance = Some(prov);
    fs::write(dir.join("manifest.toml"), manifest.to_toml_string()?)?;

    for p in &points {
        if let Some(e) = &p.error {
            eprintln!("point amplitude={} R={}: {e}", p.amplitude, p.ratio);
        } else if cfg.output.verbosity > 0 {
            let ni = p.cycles_to_initiation.map_or("-".into(), |n| n.to_string());
            let tag = if p.runout { " (runout)" } else { "" };
            println!("amplitude={} R={} N_i={ni} N_f={}{tag}", p.amplitude, p.ratio, p.cycles_to_failure);
        }
    }
    if cfg.output.verbosity > 0 {
        if let Ok(fit) = fit_basquin(&points) {
            println!(
                "Basquin fit over {} points: C* = {:.4e}, m* = {:.4}, m = {:.4}",
                fit.points_used, fit.c_star, fit.m_star, fit.m
            );
        }
    }
    println!("wrote {} rows to {}", points.len(), csv_path.display());
    Ok(())
}

fn snapshot_name(index: usize, tag: &str) -> String {
    format!("point{index:03}_{tag}.vtk")
}

/// Runs the notched grid, writing VTK snapshots under `dir/vtk`.
fn notched_points(campaign: &Campaign, setup: &NotchedSetup, dir: &Path, output: &OutputSection) -> Result<Vec<SNPoint>> {
    let vtk_dir = dir.join("vtk");
    fs::create_dir_all(&vtk_dir)?;
    let mut setup = setup.clone();
    setup.fem.life = campaign.options;
    let mesh = generate_notched_mesh_with(&setup.geometry, campaign.material.length_scale, &setup.mesh)?;
    let threshold = campaign.options.initiation_threshold;
    let grid = campaign.grid();
    let write_error = Mutex::new(None::<anyhow::Error>);
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(a, r))| {
            let record = |e: pf_fatigue::Error| SNPoint {
                amplitude: a,
                ratio: r,
                cycles_to_failure: 0,
                runout: false,
                cycles_to_initiation: None,
                error: Some(e.to_string()),
            };
            let load = match campaign.load(a, r) {
                Ok(l) => l,
                Err(e) => return record(e),
            };
            let mut initiated = false;
            let save = |state: &FieldState, tag: &str| {
                let path = vtk_dir.join(snapshot_name(i, tag));
                let title = format!("amplitude {a} R {r} {tag}");
                if let Err(e) = write_vtk(&path, &mesh, state, &title) {
                    write_error.lock().unwrap().get_or_insert(e.into());
                }
            };
            let result = pf_fatigue::fem::run_notched_observed(
                &setup,
                load,
                &campaign.material,
                campaign.model,
                campaign.split,
                &campaign.fatigue,
                |sim, rec| {
                    let state = sim.state();
                    if !initiated && state.max_phi() > threshold {
                        initiated = true;
                        save(state, "initiation");
                    }
                    if let Some(rec) = rec {
                        if output.snapshot_every > 0 && rec.cycle % output.snapshot_every == 0 {
                            save(state, &format!("cycle{:08}", rec.cycle));
                        }
                    }
                },
            );
            match result {
                Ok(run) => {
                    save(&run.final_state, "final");
                    SNPoint::from_life(a, r, &run.life)
                }
                Err(e) => record(e),
            }
        })
        .collect();
    if let Some(e) = write_error.into_inner().unwrap() {
        return Err(e.context("writing VTK snapshots"));
    }
    Ok(points)
}

pub fn mesh(kt: Option<u32>, config: Option<&Path>, length_scale: f64, out: &Path) -> Result<()> {
    let (setup, ell) = match (kt, config) {
        (Some(kt), None) => {
            let g = NotchGeometry::for_kt(kt).with_context(|| format!("no standard notch for kt = {kt}"))?;
            (NotchedSetup::new(g), length_scale)
        }
        (None, Some(path)) => {
            let cfg = RunConfig::read(path)?;
            let setup = cfg
                .notched_setup()?
                .context("the configuration does not describe a notched specimen")?;
            (setup, cfg.material()?.length_scale)
        }
        _ => bail!("give exactly one of --kt and --config"),
    };
    if !(ell.is_finite() && ell > 0.0) {
        bail!("invalid length scale {ell}");
    }
    let mesh = generate_notched_mesh_with(&setup.geometry, ell, &setup.mesh)?;
    if out.extension().is_some_and(|e| e == "vtk") {
        fs::write(out, render_vtk(&mesh, &FieldState::new(&mesh), "notched specimen mesh"))?;
    } else {
        mesh.write(out)?;
    }
    println!(
        "{} nodes, {} elements, root element size {:.4} mm (length scale {ell} mm) -> {}",
        mesh.nodes.len(),
        mesh.elements.len(),
        root_size(&mesh).unwrap_or(f64::NAN),
        out.display()
    );
    Ok(())
}

pub fn presets() {
    println!(
        "{:<14} {:>9} {:>5} {:>6} {:>8} {:>8} {:>7} {:>9} {:>5} {:>5} {:>10}",
        "name", "E", "nu", "Gc", "l(AT1)", "l(AT2)", "sig_e", "alpha0", "n", "kappa", "sig_c(AT1)"
    );
    for p in material_presets() {
        let sc = critical_point(PfModel::At1, &p.material(PfModel::At1)).stress;
        println!(
            "{:<14} {:>9} {:>5} {:>6} {:>8} {:>8} {:>7} {:>9} {:>5} {:>5} {:>10.2}",
            p.name,
            p.youngs_modulus,
            p.poisson_ratio,
            p.toughness,
            p.length_scale.0,
            p.length_scale.1,
            p.endurance_stress,
            p.alpha0,
            p.n,
            p.kappa,
            sc
        );
    }
    println!("units: E, sig_e, sig_c in MPa; Gc in kJ/m2 (= N/mm); l in mm");
}
