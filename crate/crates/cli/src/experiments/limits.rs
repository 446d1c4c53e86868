//! Stiff-limit ladders: rescaled actions against the sorted-difference
//! limit, band-edge convergence, the trace identity, and the collapse of
//! the scaled eigenvalue map onto sorted momenta.

use toda_toric_core::action::{f_c, j_c_with, ActionContext, SpectralPoint};
use toda_toric_core::dynamics::{DeformParam, PhasePoint};
use toda_toric_core::geometry::{scale_region, simplex_s, simplex_facet_margin, RegionSampler};
use toda_toric_core::linalg::project_to_w;
use toda_toric_core::sample::SampleRng;
use toda_toric_core::spectral::band_structure;

use crate::config::EffectiveConfig;
use crate::report::{fmt_sci, CsvTable, Report, RunOutput, Verdict};

use super::{RunError, RunResult};

pub fn run(cfg: &EffectiveConfig) -> RunResult {
    if cfg.c_ladder.is_empty() {
        return Err(RunError::Usage("the limits experiment needs a stiffness ladder".into()));
    }
    let mut report = Report::new(cfg);
    let mut ctx = ActionContext::new();
    let y = SpectralPoint::new(vec![-1.0, 0.0, 1.0]).expect("reference spectrum");
    let target = [3.0, 3.0];

    // rescaled-action ladder against the sorted-difference limit
    let mut ladder_table = CsvTable::new(
        "jc_ladder",
        &["c", "j_1", "j_2", "max_error", "max_edge_error"],
    );
    let mut errors = Vec::new();
    for &cv in &cfg.c_ladder {
        let c = DeformParam::new(cv)?;
        let j = j_c_with(&mut ctx, &y, &c)?;
        let err = j
            .values()
            .iter()
            .zip(target.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        let bands = band_structure(y.values(), &c.coupling())?;
        let edge_err = y
            .values()
            .iter()
            .enumerate()
            .map(|(i, yi)| {
                (bands.edges()[2 * i] - yi).abs().max((bands.edges()[2 * i + 1] - yi).abs())
            })
            .fold(0.0_f64, f64::max);
        ladder_table.push(vec![
            fmt_sci(cv),
            fmt_sci(j.values()[0]),
            fmt_sci(j.values()[1]),
            fmt_sci(err),
            fmt_sci(edge_err),
        ]);
        errors.push(err);
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let cmax = cfg.c_ladder.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rel_at_cmax = errors.last().unwrap() / 3.0;
    report.metric("jc_ladder_monotone", if monotone { 1.0 } else { 0.0 });
    report.metric("jc_rel_error_at_cmax", rel_at_cmax);
    report.verdict(Verdict::ge(
        "jc_ladder_monotone",
        if monotone { 1.0 } else { 0.0 },
        1.0,
    ));
    report.verdict(Verdict::le(
        "jc_rel_error_at_cmax",
        rel_at_cmax,
        cfg.tolerance("jc_rel_error_at_cmax"),
    ));

    // band-edge convergence at c = 40
    let c40 = DeformParam::new(40.0)?;
    let bands = band_structure(y.values(), &c40.coupling())?;
    let edge_err_40 = y
        .values()
        .iter()
        .enumerate()
        .map(|(i, yi)| {
            (bands.edges()[2 * i] - yi).abs().max((bands.edges()[2 * i + 1] - yi).abs())
        })
        .fold(0.0_f64, f64::max);
    report.metric("edge_error_at_c40", edge_err_40);
    report.verdict(Verdict::le(
        "edge_error_at_c40",
        edge_err_40,
        cfg.tolerance("edge_error_at_c40"),
    ));

    // trace identity |F_c|^2 = |p|^2 + 2 sum c^2 e^{c (q_i - q_{i+1} - 1)}
    let c_tr = DeformParam::new(cmax)?;
    let mut trace_err = 0.0_f64;
    for case in 0..cfg.samples {
        let mut rng = SampleRng::stream(cfg.seed ^ 0xace1, case);
        let x = toda_toric_core::dynamics::sample_phase_point(&mut rng, cfg.n, 0.3);
        let spec = f_c(&x, &c_tr)?;
        let lhs: f64 = spec.values().iter().map(|v| v * v).sum();
        let mut rhs: f64 = x.p.as_slice().iter().map(|p| p * p).sum();
        for i in 0..cfg.n {
            rhs += 2.0
                * c_tr.c()
                * c_tr.c()
                * (c_tr.c() * (x.q.cyclic_diff(i) - 1.0)).exp();
        }
        trace_err = trace_err.max(((lhs - rhs) / rhs).abs());
    }
    report.metric("trace_identity_error", trace_err);
    report.verdict(Verdict::le("trace_identity", trace_err, cfg.tolerance("trace_identity")));

    // collapse onto sorted momenta away from the facets
    let margin = cfg.tolerance("fc_margin");
    let inner = scale_region(&simplex_s(cfg.n)?, 0.6)?;
    let sampler = RegionSampler::new(&inner)?;
    let mut fc_err = 0.0_f64;
    let mut rng = SampleRng::stream(cfg.seed ^ 0xfc, 0);
    let mut tested = 0;
    while tested < 100 {
        let q = sampler.sample(&mut rng);
        if simplex_facet_margin(q.as_slice()) < margin {
            continue;
        }
        // sorted momenta with comfortably separated gaps
        let g1 = rng.range(0.5, 1.5);
        let g2 = rng.range(0.5, 1.5);
        let mut p = vec![0.0, g1, g1 + g2];
        let sorted = {
            let mean = p.iter().sum::<f64>() / 3.0;
            p.iter().map(|v| v - mean).collect::<Vec<_>>()
        };
        rng.shuffle(&mut p);
        let x = PhasePoint::new(q, project_to_w(&p))?;
        let spec = f_c(&x, &c_tr)?;
        let err = spec
            .values()
            .iter()
            .zip(sorted.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        fc_err = fc_err.max(err);
        tested += 1;
    }
    report.metric("fc_limit_error", fc_err);
    report.verdict(Verdict::le("fc_limit_error", fc_err, cfg.tolerance("fc_limit_error")));

    Ok(RunOutput { report, tables: vec![ladder_table] })
}
