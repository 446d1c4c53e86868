//! Isospectrality of the integrated flow: eigenvalues, both Casimirs, and
//! the energy must all stay put along the trajectories.

use toda_toric_core::dynamics::{
    hamiltonian_hbar, integrate_flaschka, sample_on_leaf, FlaschkaPoint, LeafParam,
};
use toda_toric_core::sample::SampleRng;
use toda_toric_core::spectral::toda_eigenvalues;

use crate::config::EffectiveConfig;
use crate::report::{fmt_sci, CsvTable, Report, RunOutput, Verdict};

use super::{RunError, RunResult};

const T_END: f64 = 50.0;
const DT: f64 = 1e-3;
const CHECKPOINTS: usize = 100;

struct Drifts {
    spectrum: f64,
    casimir_sum: f64,
    casimir_prod: f64,
    energy: f64,
}

fn drifts(f0: &FlaschkaPoint) -> Result<Drifts, RunError> {
    let traj = integrate_flaschka(f0, T_END, DT)?;
    let spec0 = toda_eigenvalues(f0)?;
    let sum0 = f0.casimir_sum();
    let logprod0 = f0.casimir_log_prod();
    let h0 = hamiltonian_hbar(f0);
    let mut out = Drifts { spectrum: 0.0, casimir_sum: 0.0, casimir_prod: 0.0, energy: 0.0 };
    let stride = (traj.len() / CHECKPOINTS).max(1);
    for f in traj.iter().step_by(stride).chain(std::iter::once(traj.last().unwrap())) {
        let spec = toda_eigenvalues(f)?;
        let d = spec
            .values()
            .iter()
            .zip(spec0.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        out.spectrum = out.spectrum.max(d);
        out.casimir_sum = out.casimir_sum.max((f.casimir_sum() - sum0).abs());
        out.casimir_prod =
            out.casimir_prod.max(((f.casimir_log_prod() - logprod0).exp() - 1.0).abs());
        out.energy = out.energy.max(((hamiltonian_hbar(f) - h0) / h0).abs());
    }
    Ok(out)
}

pub fn run(cfg: &EffectiveConfig) -> RunResult {
    let alpha = LeafParam::new(1.0).expect("unit coupling");
    let mut report = Report::new(cfg);
    let mut table = CsvTable::new(
        "isospectral_drifts",
        &["case", "spectrum_drift", "casimir_sum_drift", "casimir_prod_drift", "energy_drift"],
    );

    // case 0: the equilibrium stays put to round-off
    let equilibrium = FlaschkaPoint::new(vec![0.0; cfg.n], vec![1.0; cfg.n])
        .expect("equilibrium is a valid point");
    let eq = drifts(&equilibrium)?;
    table.push(vec![
        "0".into(),
        fmt_sci(eq.spectrum),
        fmt_sci(eq.casimir_sum),
        fmt_sci(eq.casimir_prod),
        fmt_sci(eq.energy),
    ]);
    report.metric("equilibrium_spectrum_drift", eq.spectrum);

    let mut worst = Drifts { spectrum: 0.0, casimir_sum: 0.0, casimir_prod: 0.0, energy: 0.0 };
    for case in 1..=cfg.samples {
        let mut rng = SampleRng::stream(cfg.seed, case);
        let f0 = sample_on_leaf(&mut rng, cfg.n, &alpha, 0.4);
        let d = drifts(&f0)?;
        table.push(vec![
            case.to_string(),
            fmt_sci(d.spectrum),
            fmt_sci(d.casimir_sum),
            fmt_sci(d.casimir_prod),
            fmt_sci(d.energy),
        ]);
        worst.spectrum = worst.spectrum.max(d.spectrum);
        worst.casimir_sum = worst.casimir_sum.max(d.casimir_sum);
        worst.casimir_prod = worst.casimir_prod.max(d.casimir_prod);
        worst.energy = worst.energy.max(d.energy);
    }

    report.metric("max_spectrum_drift", worst.spectrum);
    report.metric("max_casimir_sum_drift", worst.casimir_sum);
    report.metric("max_casimir_prod_drift", worst.casimir_prod);
    report.metric("max_energy_drift", worst.energy);
    report.verdict(Verdict::le(
        "spectrum_drift",
        worst.spectrum,
        cfg.tolerance("spectrum_drift"),
    ));
    report.verdict(Verdict::le(
        "casimir_sum_drift",
        worst.casimir_sum,
        cfg.tolerance("casimir_sum_drift"),
    ));
    report.verdict(Verdict::le(
        "casimir_prod_drift",
        worst.casimir_prod,
        cfg.tolerance("casimir_prod_drift"),
    ));
    report.verdict(Verdict::le("energy_drift", worst.energy, cfg.tolerance("energy_drift")));
    report.verdict(Verdict::le(
        "equilibrium_drift",
        eq.spectrum,
        cfg.tolerance("equilibrium_drift"),
    ));

    Ok(RunOutput { report, tables: vec![table] })
}
