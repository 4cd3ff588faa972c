//! Verification suites behind `pffatigue verify`.

use anyhow::Result;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pf_fatigue::fatigue::{FatigueDegradation, FatigueParams};
use pf_fatigue::fem::{patch_mesh, single_element_lockstep, FemProblem, OracleCase};
use pf_fatigue::homogeneous::{run_cycles_with, ControlMode, CycleLoad, LifeOptions};
use pf_fatigue::material::{
    critical_point, critical_point_by_maximization, split_energy, strain_energy, update_history, MaterialParams,
    PfModel, SplitKind, SymTensor,
};
use pf_fatigue::study::{reference_slope_table, regenerate_slope_table, SlopeTableSettings};

struct Report {
    all_passed: bool,
}

impl Report {
    fn new() -> Self {
        Self { all_passed: true }
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl std::fmt::Display) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.all_passed &= ok;
    }
}

fn random_strain(rng: &mut StdRng) -> SymTensor {
    let mut c = || rng.random_range(-1.0..1.0);
    SymTensor::new(c(), c(), c(), c(), c(), c())
}

/// A·Aᵀ for a random 3×3 matrix A, positive semidefinite by construction.
fn random_psd(rng: &mut StdRng) -> SymTensor {
    let a: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
    let m = |i: usize, j: usize| (0..3).map(|k| a[i][k] * a[j][k]).sum::<f64>();
    SymTensor::new(m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(1, 2), m(0, 2))
}

pub fn invariants(seed: u64) -> Result<bool> {
    let mut rep = Report::new();
    let mut rng = StdRng::seed_from_u64(seed);

    let at1 = MaterialParams::new(1.0, 0.3, 1.0, 0.375)?;
    let sc = critical_point(PfModel::At1, &at1).stress;
    rep.check("AT1 critical stress", (sc - 1.0).abs() <= 1e-10, format!("sigma_c = {sc:.12}"));
    let at2 = MaterialParams::new(1.0, 0.3, 1.0, 0.1055)?;
    let sc = critical_point_by_maximization(PfModel::At2, &at2).stress;
    rep.check("AT2 critical stress by maximization", (sc - 1.0).abs() <= 5e-3, format!("sigma_c = {sc:.6}"));

    let mat = MaterialParams::new(210e3, 0.3, 13.0, 0.315)?;
    let (mut partition, mut tension, mut compression) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let eps = random_strain(&mut rng);
        let psi0 = strain_energy(&eps, &mat);
        for kind in [SplitKind::Spectral, SplitKind::VolDev] {
            let (p, m) = split_energy(&eps, &mat, kind)?;
            partition = partition.max((p + m - psi0).abs() / psi0);
        }
        let pos = random_psd(&mut rng);
        let (_, m) = split_energy(&pos, &mat, SplitKind::NoTension)?;
        tension = tension.max(m.abs() / strain_energy(&pos, &mat));
        let neg = random_psd(&mut rng).scale(-1.0);
        let (p, _) = split_energy(&neg, &mat, SplitKind::NoTension)?;
        compression = compression.max(p.abs() / strain_energy(&neg, &mat));
    }
    rep.check(
        "spectral and vol-dev partitions sum to the strain energy",
        partition <= 1e-10,
        format!("max relative error {partition:.2e} over 1000 strains"),
    );
    rep.check(
        "no-tension: no passive energy under tension",
        tension <= 1e-10,
        format!("max psi-/psi0 {tension:.2e}"),
    );
    rep.check(
        "no-tension: no active energy under compression",
        compression <= 1e-10,
        format!("max psi+/psi0 {compression:.2e}"),
    );

    let mut h = 0.0;
    let mut monotone = true;
    for _ in 0..1000 {
        let next = update_history(h, rng.random_range(0.0..2.0), PfModel::At1, &at1);
        monotone &= next >= h;
        h = next;
    }
    rep.check("history variable never decreases", monotone, format!("final H = {h:.4}"));

    let fp = FatigueParams::for_material(&at1, PfModel::At1, 100.0, 2.0, 0.5, 0.2, FatigueDegradation::F2)?;
    let opts = LifeOptions {
        record_trace: true,
        ..LifeOptions::default()
    };
    let load = CycleLoad::new(ControlMode::Load, 0.5, -1.0)?;
    let life = run_cycles_with(load, &at1, PfModel::At1, SplitKind::NoTension, &fp, opts)?;
    let ok = life.trace.windows(2).all(|w| w[1].alpha_bar >= w[0].alpha_bar && w[1].phi >= w[0].phi);
    rep.check(
        "fatigue history and phase field never decrease",
        ok && !life.trace.is_empty(),
        format!("{} recorded cycles", life.trace.len()),
    );
    let below = CycleLoad::new(ControlMode::Load, 0.15, -1.0)?.with_max_cycles(10_000);
    let life = run_cycles_with(below, &at1, PfModel::At1, SplitKind::NoTension, &fp, opts)?;
    let untouched = life.trace.iter().all(|r| r.alpha_bar == 0.0);
    rep.check(
        "no accumulation below the endurance threshold",
        life.runout && untouched,
        format!("runout = {}", life.runout),
    );

    let (mut fd, mut asym) = (0.0f64, 0.0f64);
    for k in 0..16 {
        let model = if k % 2 == 0 { PfModel::At1 } else { PfModel::At2 };
        let split = [SplitKind::Spectral, SplitKind::NoTension, SplitKind::VolDev, SplitKind::None][k / 2 % 4];
        let mesh = patch_mesh([rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)])?;
        let p = FemProblem::new(mesh, at1, model, split, ControlMode::Load)?;
        let mut s = p.empty_state();
        s.u.iter_mut().for_each(|v| *v = rng.random_range(-0.05..0.05));
        s.phi.iter_mut().for_each(|v| *v = rng.random_range(0.0..0.9));
        s.points.iter_mut().for_each(|pt| pt.psi_max = rng.random_range(0.0..0.5));
        let f: Vec<f64> = (0..p.num_points()).map(|_| rng.random_range(0.05..1.0)).collect();
        let c = p.check_tangents(&s, &f, 0.3, 1e-6);
        fd = fd.max(c.fd_mismatch_u).max(c.fd_mismatch_phi);
        asym = asym.max(c.asymmetry_u).max(c.asymmetry_phi);
    }
    rep.check(
        "tangents match finite differences",
        fd <= 1e-6,
        format!("max mismatch {fd:.2e} relative to max|K|"),
    );
    rep.check("tangents are symmetric", asym <= 1e-14, format!("max asymmetry {asym:.2e}"));
    Ok(rep.all_passed)
}

pub fn slope_table() -> Result<bool> {
    let mut rep = Report::new();
    let settings = SlopeTableSettings::default();
    let ns = [1.0, 2.0, 3.0, 4.0, 5.0];
    for model in [PfModel::At1, PfModel::At2] {
        for fdeg in FatigueDegradation::ALL {
            let fit = regenerate_slope_table(model, fdeg, &ns, &settings)?;
            let (c1, c2) = reference_slope_table(model, fdeg);
            let ok = (fit.c1 - c1).abs() <= 0.05 && (fit.c2 - c2).abs() <= 0.15;
            rep.check(
                &format!("{}/{}", model.name(), fdeg.name()),
                ok,
                format!("C1 = {:.3} (table {c1:.3}), C2 = {:.3} (table {c2:.3})", fit.c1, fit.c2),
            );
        }
    }
    Ok(rep.all_passed)
}

pub fn oracle() -> Result<bool> {
    let mut rep = Report::new();
    for case in OracleCase::standard() {
        let name = format!("{} {} control, amplitude {}", case.model.name(), case.control.name(), case.amplitude);
        match single_element_lockstep(&case) {
            Ok(r) => rep.check(
                &name,
                r.worst() <= 1e-6,
                format!(
                    "{} cycles, max relative mismatch phi {:.1e}, alpha_bar {:.1e}, stress {:.1e}{}",
                    r.cycles_compared,
                    r.max_rel_phi,
                    r.max_rel_alpha_bar,
                    r.max_rel_peak_stress,
                    r.failure.map_or(String::new(), |m| format!(", both failed ({m:?})"))
                ),
            ),
            Err(e) => rep.check(&name, false, e),
        }
    }
    Ok(rep.all_passed)
}
