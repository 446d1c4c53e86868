//! The embedding mechanism: moment images of shrunken Lagrangian products
//! land inside the toric base, an unshrunk control run shows boundary
//! violations at finite stiffness, and near-boundary points of the enlarged
//! product map outside a shrunken base.

use toda_toric_core::action::{moment_image_with, ActionContext};
use toda_toric_core::dynamics::{DeformParam, PhasePoint};
use toda_toric_core::geometry::{
    scale_region, simplex_s, RegionSampler, ToricBase, WRegion,
};
use toda_toric_core::sample::SampleRng;

use crate::config::EffectiveConfig;
use crate::report::{fmt_sci, CsvTable, Report, RunOutput, Verdict};

use super::{RunError, RunResult};

/// Signed slack of a point relative to the base: positive inside.
fn base_slack(base: &ToricBase, r: &[f64]) -> f64 {
    match base {
        ToricBase::Simplex { a, .. } => {
            let sum: f64 = r.iter().sum();
            (a - sum).min(r.iter().cloned().fold(f64::INFINITY, f64::min))
        }
        ToricBase::Triangle { a, b } => {
            (1.0 - r[0] / a - r[1] / b).min(r[0].min(r[1]))
        }
        ToricBase::Rectangle { a, b } => {
            (a - r[0]).min(b - r[1]).min(r[0].min(r[1]))
        }
    }
}

struct RegionCase {
    tag: &'static str,
    region: WRegion,
}

fn region_case(tag: &'static str, spec: crate::regions::RegionSpec) -> Result<RegionCase, RunError> {
    let region = spec.to_w_region().map_err(RunError::Usage)?;
    Ok(RegionCase { tag, region })
}

pub fn run(cfg: &EffectiveConfig) -> RunResult {
    let cmax = cfg
        .c_ladder
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !cmax.is_finite() {
        return Err(RunError::Usage("the embed experiment needs a stiffness ladder".into()));
    }
    let c = DeformParam::new(cmax)?;
    let epsilon = cfg.tolerance("epsilon");
    let mut report = Report::new(cfg);
    let mut ctx = ActionContext::new();
    let mut samples_table = CsvTable::new(
        "embed_samples",
        &["region", "case", "r_1", "r_2", "inside", "slack"],
    );
    let mut summary = CsvTable::new(
        "embed_summary",
        &[
            "region",
            "fraction_inside",
            "min_slack",
            "control_violations",
            "reverse_fraction_outside",
        ],
    );

    let cases = [
        region_case("P", crate::regions::RegionSpec::new("P").with_n(3))?,
        region_case("PE", crate::regions::RegionSpec::new("PE").with_params(1.0, 2.0))?,
        region_case("PP", crate::regions::RegionSpec::new("PP").with_params(1.0, 2.0))?,
    ];

    let simplex = simplex_s(3)?;
    let mut all_inside = 1.0_f64;
    let mut min_control_violations = f64::INFINITY;
    let mut min_reverse = 1.0_f64;

    for case in &cases {
        let base = case.region.rho_image()?;
        let q_sampler = RegionSampler::new(&scale_region(&simplex, 1.0 - epsilon)?)?;
        let p_sampler = RegionSampler::new(&scale_region(&case.region, 1.0 - epsilon)?)?;

        // main run: every image of the shrunken product lies in the base
        let mut inside = 0u64;
        let mut min_slack = f64::INFINITY;
        for k in 0..cfg.samples {
            let mut rng = SampleRng::stream(cfg.seed ^ 0xe0_0000, k);
            let q = q_sampler.sample(&mut rng);
            let p = p_sampler.sample(&mut rng);
            let x = PhasePoint::new(q, p)?;
            let img = moment_image_with(&mut ctx, &x, &c)?;
            let ok = base.contains(img.values());
            let slack = base_slack(&base, img.values());
            if ok {
                inside += 1;
            }
            min_slack = min_slack.min(slack);
            samples_table.push(vec![
                case.tag.to_string(),
                k.to_string(),
                fmt_sci(img.values()[0]),
                fmt_sci(img.values()[1]),
                (ok as u8).to_string(),
                fmt_sci(slack),
            ]);
        }
        let fraction = inside as f64 / cfg.samples as f64;
        all_inside = all_inside.min(fraction);

        // control run without the shrink: boundary effects must show
        let q_full = RegionSampler::new(&simplex)?;
        let p_full = RegionSampler::new(&case.region)?;
        let mut violations = 0u64;
        for k in 0..cfg.samples {
            let mut rng = SampleRng::stream(cfg.seed ^ 0xc0_0000, k);
            let q = q_full.sample(&mut rng);
            let p = p_full.sample(&mut rng);
            let x = PhasePoint::new(q, p)?;
            let img = moment_image_with(&mut ctx, &x, &c)?;
            if !base.contains(img.values()) {
                violations += 1;
            }
        }
        min_control_violations = min_control_violations.min(violations as f64);

        // reverse spot check: images of points near the boundary of the
        // enlarged product stay outside the shrunken base
        let enlarged = scale_region(&case.region, 1.0 + epsilon)?;
        let inner_shell = scale_region(&enlarged, 0.98)?;
        let shell_sampler = RegionSampler::new(&enlarged)?;
        let q_inner = RegionSampler::new(&scale_region(&simplex, 0.75)?)?;
        let shrunk_base = base.scaled(0.95);
        let mut outside = 0u64;
        let mut k_found = 0u64;
        let mut draw = 0u64;
        while k_found < cfg.samples {
            let mut rng = SampleRng::stream(cfg.seed ^ 0x4e_0000, draw);
            draw += 1;
            let p = shell_sampler.sample(&mut rng);
            if inner_shell.contains(p.as_slice()) {
                continue;
            }
            let q = q_inner.sample(&mut rng);
            let x = PhasePoint::new(q, p)?;
            let img = moment_image_with(&mut ctx, &x, &c)?;
            if !shrunk_base.contains(img.values()) {
                outside += 1;
            }
            k_found += 1;
        }
        let reverse_fraction = outside as f64 / cfg.samples as f64;
        min_reverse = min_reverse.min(reverse_fraction);

        summary.push(vec![
            case.tag.to_string(),
            fmt_sci(fraction),
            fmt_sci(min_slack),
            violations.to_string(),
            fmt_sci(reverse_fraction),
        ]);
        report.metric(&format!("fraction_inside_{}", case.tag), fraction);
        report.metric(&format!("control_violations_{}", case.tag), violations as f64);
        report.metric(&format!("reverse_fraction_outside_{}", case.tag), reverse_fraction);
    }

    report.verdict(Verdict::ge(
        "inside_fraction",
        all_inside,
        cfg.tolerance("inside_fraction"),
    ));
    report.verdict(Verdict::ge("control_violations", min_control_violations, 1.0));
    report.verdict(Verdict::ge(
        "reverse_outside_fraction",
        min_reverse,
        cfg.tolerance("reverse_outside_fraction"),
    ));

    Ok(RunOutput { report, tables: vec![summary, samples_table] })
}
