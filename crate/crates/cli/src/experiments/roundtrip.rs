//! Forward/inverse spectral round trip: Dirichlet data down, orthogonal
//! polynomials back up, closing with both Casimirs.

use toda_toric_core::action::reconstruct_ba;
use toda_toric_core::dynamics::{flaschka_inverse, sample_on_leaf, FlaschkaPoint, LeafParam};
use toda_toric_core::sample::SampleRng;
use toda_toric_core::spectral::dirichlet_data;

use crate::config::EffectiveConfig;
use crate::report::{fmt_sci, CsvTable, Report, RunOutput, Verdict};

use super::RunResult;

pub fn run(cfg: &EffectiveConfig) -> RunResult {
    let alpha = LeafParam::new(1.0).expect("unit coupling");
    let mut report = Report::new(cfg);
    let mut table = CsvTable::new("roundtrip_errors", &["n", "case", "rel_error"]);

    let gap_floor = cfg.tolerance("mu_gap_floor");
    let mut max_rel = 0.0_f64;
    let mut resamples = 0u64;
    for n in [3usize, 4, 5] {
        let mut case = 0u64;
        let mut attempt = 0u64;
        while case < cfg.samples {
            attempt += 1;
            let mut rng = SampleRng::stream(cfg.seed ^ (n as u64) << 32, attempt);
            let f0 = sample_on_leaf(&mut rng, n, &alpha, 0.5);
            let d = match dirichlet_data(&f0) {
                Ok(d) => d,
                Err(_) => {
                    resamples += 1;
                    continue;
                }
            };
            if d.mu().windows(2).any(|w| w[1] - w[0] < gap_floor) {
                resamples += 1;
                continue;
            }
            let back = reconstruct_ba(&d, &alpha)?;
            let mut rel = 0.0_f64;
            for i in 0..n {
                rel = rel.max((back.b()[i] - f0.b()[i]).abs() / (1.0 + f0.b()[i].abs()));
                rel = rel.max((back.a()[i] - f0.a()[i]).abs() / f0.a()[i]);
            }
            table.push(vec![n.to_string(), case.to_string(), fmt_sci(rel)]);
            max_rel = max_rel.max(rel);
            case += 1;
        }
    }

    // exact case: the equilibrium reconstructs to round-off
    let equilibrium = FlaschkaPoint::new(vec![0.0; 3], vec![1.0; 3]).expect("equilibrium");
    let d = dirichlet_data(&equilibrium)?;
    let back = reconstruct_ba(&d, &alpha)?;
    let mut eq_err = 0.0_f64;
    for i in 0..3 {
        eq_err = eq_err.max(back.b()[i].abs());
        eq_err = eq_err.max((back.a()[i] - 1.0).abs());
    }

    // off-leaf input is rejected rather than silently inverted
    let off = FlaschkaPoint::new(vec![0.0; 3], vec![1.1, 1.0, 1.0]).expect("positive entries");
    let rejected = flaschka_inverse(&off, &alpha).is_err();

    report.metric("max_rel_error", max_rel);
    report.metric("equilibrium_error", eq_err);
    report.metric("resamples", resamples as f64);
    report.metric("off_leaf_rejected", if rejected { 1.0 } else { 0.0 });
    report.verdict(Verdict::le("max_rel_error", max_rel, cfg.tolerance("max_rel_error")));
    report.verdict(Verdict::le(
        "equilibrium_error",
        eq_err,
        cfg.tolerance("equilibrium_error"),
    ));
    report.verdict(Verdict::ge(
        "off_leaf_rejected",
        if rejected { 1.0 } else { 0.0 },
        1.0,
    ));

    Ok(RunOutput { report, tables: vec![table] })
}
