//! The Dirichlet chart is a symplectomorphism: its finite-difference
//! Jacobian conjugates the standard form onto the standard form.

use toda_toric_core::action::{chart_symplecticity_defect, phi_alpha_chart};
use toda_toric_core::dynamics::{sample_phase_point, LeafParam, PhasePoint};
use toda_toric_core::linalg::WPoint;
use toda_toric_core::sample::SampleRng;

#[test]
fn equilibrium_chart_values() {
    let alpha = LeafParam::new(1.0).unwrap();
    let x = PhasePoint::new(WPoint::zeros(3), WPoint::zeros(3)).unwrap();
    let d = phi_alpha_chart(&x, &alpha).unwrap();
    assert!((d.mu()[0] + 1.0).abs() < 1e-12);
    assert!((d.mu()[1] - 1.0).abs() < 1e-12);
    assert!(d.f()[0].abs() < 1e-12);
    assert!(d.f()[1].abs() < 1e-12);
}

#[test]
fn jacobian_defect_below_tolerance() {
    let mut rng = SampleRng::seed_from_u64(701);
    let alpha = LeafParam::new(1.0).unwrap();
    for n in [3usize, 4] {
        let mut tested = 0;
        while tested < 50 {
            let x = sample_phase_point(&mut rng, n, 0.4);
            // keep the Dirichlet divisor well separated so the finite
            // differences stay on one smooth branch
            let d = match phi_alpha_chart(&x, &alpha) {
                Ok(d) => d,
                Err(_) => continue,
            };
            if d.mu().windows(2).any(|w| w[1] - w[0] < 1e-2) {
                continue;
            }
            let defect = chart_symplecticity_defect(&x, &alpha, 1e-5).unwrap();
            assert!(defect < 1e-3, "n = {n}: defect {defect:e}");
            tested += 1;
        }
    }
}

#[test]
fn chart_orders_the_divisor() {
    let mut rng = SampleRng::seed_from_u64(709);
    let alpha = LeafParam::new(0.8).unwrap();
    let mut tested = 0;
    while tested < 200 {
        let x = sample_phase_point(&mut rng, 4, 0.5);
        match phi_alpha_chart(&x, &alpha) {
            Ok(d) => {
                assert!(d.mu().windows(2).all(|w| w[1] > w[0]));
                tested += 1;
            }
            Err(_) => continue,
        }
    }
}
