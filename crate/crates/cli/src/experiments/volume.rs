//! Volume consistency: exact planar identities and Monte-Carlo agreement
//! between factor-volume products and toric-base volumes.

use toda_toric_core::geometry::{
    region_pe, region_pp, simplex_s, volume, voronoi_p, VolumeMethod, WRegion,
};

use crate::config::EffectiveConfig;
use crate::report::{fmt_sci, CsvTable, Report, RunOutput, Verdict};

use super::RunResult;

pub fn run(cfg: &EffectiveConfig) -> RunResult {
    let mut report = Report::new(cfg);
    let mut table = CsvTable::new(
        "volume_identity",
        &[
            "region",
            "n",
            "method",
            "factor_volume",
            "factor_std_err",
            "simplex_volume",
            "product",
            "toric_target_volume",
            "sigmas",
        ],
    );

    // exact planar route
    let s2 = volume(&simplex_s(3)?, VolumeMethod::Exact2d)?.value;
    let p2 = volume(&voronoi_p(3)?, VolumeMethod::Exact2d)?.value;
    let t3 = voronoi_p(3)?.rho_image()?.volume();
    let exact_defect = (s2 * p2 - 4.5).abs().max((t3 - 4.5).abs());
    table.push(vec![
        "P".into(),
        "3".into(),
        "exact2d".into(),
        fmt_sci(p2),
        fmt_sci(0.0),
        fmt_sci(s2),
        fmt_sci(s2 * p2),
        fmt_sci(t3),
        fmt_sci(0.0),
    ]);
    report.metric("exact_identity_defect", exact_defect);
    report.verdict(Verdict::le(
        "exact_identity",
        exact_defect,
        cfg.tolerance("exact_identity"),
    ));

    // Monte-Carlo identities in the plane
    let planar: Vec<(&str, WRegion)> = vec![
        ("P", voronoi_p(3)?),
        ("PE", region_pe(1.0, 2.0)?),
        ("PP", region_pp(1.0, 2.0)?),
    ];
    let mut worst_sigmas = 0.0_f64;
    for (i, (tag, region)) in planar.iter().enumerate() {
        let est = volume(
            region,
            VolumeMethod::MonteCarlo { samples: cfg.samples, seed: cfg.seed ^ (i as u64) },
        )?;
        let target = region.rho_image()?.volume();
        let product = s2 * est.value;
        let sigma = s2 * est.std_err;
        let sigmas = (product - target).abs() / sigma;
        worst_sigmas = worst_sigmas.max(sigmas);
        table.push(vec![
            tag.to_string(),
            "3".into(),
            "montecarlo".into(),
            fmt_sci(est.value),
            fmt_sci(est.std_err),
            fmt_sci(s2),
            fmt_sci(product),
            fmt_sci(target),
            fmt_sci(sigmas),
        ]);
    }

    // dimension four: both factors by Monte Carlo against 4^3 / 3!
    let target4 = 64.0 / 6.0;
    let es = volume(
        &simplex_s(4)?,
        VolumeMethod::MonteCarlo { samples: cfg.samples, seed: cfg.seed ^ 0x51 },
    )?;
    let ep = volume(
        &voronoi_p(4)?,
        VolumeMethod::MonteCarlo { samples: cfg.samples, seed: cfg.seed ^ 0x52 },
    )?;
    let product4 = es.value * ep.value;
    let sigma4 = (ep.value * es.std_err).hypot(es.value * ep.std_err);
    let sigmas4 = (product4 - target4).abs() / sigma4;
    worst_sigmas = worst_sigmas.max(sigmas4);
    table.push(vec![
        "P".into(),
        "4".into(),
        "montecarlo".into(),
        fmt_sci(ep.value),
        fmt_sci(ep.std_err),
        fmt_sci(es.value),
        fmt_sci(product4),
        fmt_sci(target4),
        fmt_sci(sigmas4),
    ]);

    report.metric("worst_mc_sigmas", worst_sigmas);
    report.verdict(Verdict::le("mc_sigmas", worst_sigmas, cfg.tolerance("mc_sigmas")));

    Ok(RunOutput { report, tables: vec![table] })
}
