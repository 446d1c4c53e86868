//! Straight-line billiard in the closed simplex, solved event by event in
//! closed form, and its quantitative comparison with the stiff lattice flows.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float; // float math in no_std builds

use crate::dynamics::{hamiltonian_hc, verlet_observe, DeformParam, PhasePoint};
use crate::error::{Error, Result};
use crate::linalg::{project_to_w, WPoint};

/// Two facet hit times closer than this abort as a corner hit.
pub const CORNER_TOL: f64 = 1e-9;

/// A billiard state: position in the closed simplex, momentum, clock.
#[derive(Debug, Clone, PartialEq)]
pub struct BilliardState {
    pub q: WPoint,
    pub p: WPoint,
    pub time: f64,
}

impl BilliardState {
    pub fn new(q: WPoint, p: WPoint, time: f64) -> Result<Self> {
        let n = q.len();
        for i in 0..n {
            if q.cyclic_diff(i) > 1.0 + 1e-12 {
                return Err(Error::ParamOutOfRange {
                    what: "billiard position outside the closed simplex",
                    value: q.cyclic_diff(i),
                });
            }
        }
        Ok(BilliardState { q, p, time })
    }
}

/// An elastic reflection record. The reflection at the facet
/// `q_i - q_{i+1} = 1` with unit normal `(e_i - e_{i+1}) / sqrt(2)` swaps
/// the momentum components `i` and `i+1`, preserving speed and the
/// tangential part.
#[derive(Debug, Clone, PartialEq)]
pub struct BounceEvent {
    pub time: f64,
    pub facet: usize,
    pub p_in: Vec<f64>,
    pub p_out: Vec<f64>,
}

struct Propagator {
    q: Vec<f64>,
    p: Vec<f64>,
    time: f64,
}

impl Propagator {
    /// Next facet hit within `horizon`, or `None` when the free drift
    /// outlasts it. Only a hit that will actually be taken is screened for
    /// corner degeneracy.
    fn next_event(&self, horizon: f64) -> Result<Option<(f64, usize)>> {
        let n = self.q.len();
        let mut best: Option<(f64, usize)> = None;
        let mut second = f64::INFINITY;
        for i in 0..n {
            let gap = 1.0 - (self.q[i] - self.q[(i + 1) % n]);
            let speed = self.p[i] - self.p[(i + 1) % n];
            if speed <= 0.0 {
                continue; // receding facets cannot fire, including the one just left
            }
            // a stop exactly on a facet must still reflect: clamp to zero
            // rather than dropping the event
            let tau = (gap / speed).max(0.0);
            match best {
                None => best = Some((tau, i)),
                Some((tb, _)) if tau < tb => {
                    second = tb;
                    best = Some((tau, i));
                }
                Some(_) => second = second.min(tau),
            }
        }
        match best {
            Some((tb, _)) if tb <= horizon => {
                if second - tb < CORNER_TOL {
                    return Err(Error::CornerDegeneracy { time: self.time + tb });
                }
                Ok(best)
            }
            _ => Ok(None),
        }
    }

    fn drift(&mut self, dt: f64) {
        for (qi, pi) in self.q.iter_mut().zip(self.p.iter()) {
            *qi += dt * pi;
        }
        self.time += dt;
    }

    /// Advances to absolute time `t_stop`, recording bounces.
    fn run_until(&mut self, t_stop: f64, events: &mut Vec<BounceEvent>) -> Result<()> {
        let n = self.q.len();
        // 10^6 bounces per call is far beyond any sane trajectory
        for _ in 0..1_000_000 {
            let remaining = t_stop - self.time;
            if remaining <= 0.0 {
                return Ok(());
            }
            match self.next_event(remaining)? {
                Some((tau, facet)) => {
                    self.drift(tau);
                    let p_in = self.p.clone();
                    self.p.swap(facet, (facet + 1) % n);
                    events.push(BounceEvent {
                        time: self.time,
                        facet,
                        p_in,
                        p_out: self.p.clone(),
                    });
                }
                _ => {
                    self.drift(remaining);
                    return Ok(());
                }
            }
        }
        Err(Error::Internal("bounce budget exhausted"))
    }
}

/// Exact event-driven propagation for duration `t`; returns the final state
/// and every bounce along the way. Trajectories passing within tolerance of
/// a codimension-two face abort; callers perturb and retry.
pub fn advance_billiard(s: &BilliardState, t: f64) -> Result<(BilliardState, Vec<BounceEvent>)> {
    if t < 0.0 {
        return Err(Error::ParamOutOfRange { what: "duration", value: t });
    }
    let mut prop = Propagator {
        q: s.q.as_slice().to_vec(),
        p: s.p.as_slice().to_vec(),
        time: s.time,
    };
    let mut events = Vec::new();
    prop.run_until(s.time + t, &mut events)?;
    let state = BilliardState {
        q: project_to_w(&prop.q),
        p: project_to_w(&prop.p),
        time: prop.time,
    };
    Ok((state, events))
}

/// Positions of the billiard trajectory at the given nondecreasing times.
pub fn sample_billiard(s: &BilliardState, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut prop = Propagator {
        q: s.q.as_slice().to_vec(),
        p: s.p.as_slice().to_vec(),
        time: s.time,
    };
    let mut events = Vec::new();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < prop.time - 1e-12 {
            return Err(Error::ParamOutOfRange { what: "sample times must increase", value: t });
        }
        prop.run_until(t, &mut events)?;
        out.push(prop.q.clone());
    }
    Ok(out)
}

/// Outcome of one stiffness rung of the comparison ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TodaBilliardReport {
    pub c: f64,
    pub dt: f64,
    pub sup_distance: f64,
    pub energy_drift: f64,
}

/// Step-size policy for the stiff flows: the force gradient grows like
/// `c^3` in the turning layer, so `dt ~ 1/c^2` keeps the stability margin
/// roughly independent of `c`. The step is snapped to divide the grid
/// spacing exactly.
pub fn verlet_step_for(c: &DeformParam, grid_spacing: f64) -> f64 {
    let policy = (1e-4_f64).min(1.0 / (c.c() * c.c()));
    let substeps = (grid_spacing / policy).ceil().max(1.0);
    grid_spacing / substeps
}

/// Integrates the stiff flow for each ladder rung from the same start as an
/// exact billiard trajectory and reports the sup position distance on a
/// uniform time grid, together with the relative energy drift.
pub fn compare_toda_billiard(
    x0: &PhasePoint,
    t_end: f64,
    ladder: &[DeformParam],
    grid: usize,
) -> Result<Vec<TodaBilliardReport>> {
    if grid == 0 {
        return Err(Error::ParamOutOfRange { what: "grid", value: 0.0 });
    }
    let state = BilliardState::new(x0.q.clone(), x0.p.clone(), 0.0)?;
    let times: Vec<f64> = (0..=grid).map(|k| t_end * k as f64 / grid as f64).collect();
    let reference = sample_billiard(&state, &times)?;

    let mut reports = Vec::with_capacity(ladder.len());
    for c in ladder {
        let spacing = t_end / grid as f64;
        let dt = verlet_step_for(c, spacing);
        let every = (spacing / dt).round() as usize;
        let e0 = hamiltonian_hc(x0, c)?;
        let mut sup = 0.0_f64;
        let mut drift = 0.0_f64;
        let mut idx = 0usize;
        verlet_observe(x0, c, t_end, dt, every, |_, q, p| {
            let target = &reference[idx.min(grid)];
            let d2: f64 = q.iter().zip(target.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            sup = sup.max(d2.sqrt());
            let kinetic: f64 = p.iter().map(|v| v * v).sum::<f64>() / 2.0;
            let potential =
                crate::dynamics::potential_uc(&project_to_w(q), c).unwrap_or(f64::INFINITY);
            drift = drift.max(((kinetic + potential - e0) / e0).abs());
            idx += 1;
        })?;
        reports.push(TodaBilliardReport { c: c.c(), dt, sup_distance: sup, energy_drift: drift });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::SampleRng;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn state(q: [f64; 3], p: [f64; 3]) -> BilliardState {
        BilliardState::new(
            WPoint::new(q.to_vec()).unwrap(),
            WPoint::new(p.to_vec()).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn normal_incidence_flips_momentum() {
        // p along the facet normal (e_1 - e_2)/sqrt(2): bounce reverses it
        let s = state([0.0, 0.0, 0.0], [1.0, -1.0, 0.0]);
        let (end, events) = advance_billiard(&s, 1.0).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].facet, 0);
        assert_relative_eq!(events[0].time, 0.5, epsilon = 1e-12);
        for (pin, pout) in events[0].p_in.iter().zip(events[0].p_out.iter()) {
            assert_relative_eq!(*pin, -pout, epsilon = 1e-12);
        }
        // after the full unit of time the particle is back at the origin
        for i in 0..3 {
            assert!(end.q[i].abs() < 1e-12);
        }
    }

    #[test]
    fn speed_and_tangential_component_preserved() {
        let mut rng = SampleRng::seed_from_u64(127);
        let mut total_bounces = 0usize;
        while total_bounces < 10_000 {
            let p = crate::linalg::project_to_w(&rng.normals(3));
            if p.norm() < 0.1 {
                continue;
            }
            let s = BilliardState::new(WPoint::zeros(3), p.clone(), 0.0).unwrap();
            let speed0 = p.norm();
            match advance_billiard(&s, 20.0) {
                Ok((end, events)) => {
                    let n = 3usize;
                    let sqrt2 = 2.0_f64.sqrt();
                    for e in &events {
                        let sin: f64 = e.p_in.iter().map(|v| v * v).sum();
                        let sout: f64 = e.p_out.iter().map(|v| v * v).sum();
                        assert!((sin.sqrt() - sout.sqrt()).abs() < 1e-12);
                        // normal projection reverses, tangential part is fixed
                        let nin = (e.p_in[e.facet] - e.p_in[(e.facet + 1) % n]) / sqrt2;
                        let nout = (e.p_out[e.facet] - e.p_out[(e.facet + 1) % n]) / sqrt2;
                        assert_relative_eq!(nin, -nout, epsilon = 1e-12);
                        for k in 0..n {
                            let nu_k = if k == e.facet {
                                1.0 / sqrt2
                            } else if k == (e.facet + 1) % n {
                                -1.0 / sqrt2
                            } else {
                                0.0
                            };
                            let tin = e.p_in[k] - nin * nu_k;
                            let tout = e.p_out[k] - nout * nu_k;
                            assert!((tin - tout).abs() < 1e-12);
                        }
                    }
                    total_bounces += events.len();
                    assert_relative_eq!(end.p.norm(), speed0, epsilon = 1e-12);
                }
                Err(Error::CornerDegeneracy { .. }) => continue,
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn time_reversibility() {
        let mut rng = SampleRng::seed_from_u64(131);
        let mut tested = 0;
        while tested < 50 {
            let q = crate::linalg::project_to_w(
                &rng.normals(3).iter().map(|x| 0.2 * x).collect::<Vec<_>>(),
            );
            let p = crate::linalg::project_to_w(&rng.normals(3));
            if p.norm() < 0.1 {
                continue;
            }
            let s = match BilliardState::new(q.clone(), p.clone(), 0.0) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let fwd = match advance_billiard(&s, 7.0) {
                Ok(r) => r,
                Err(Error::CornerDegeneracy { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let back_state =
                BilliardState::new(fwd.0.q.clone(), fwd.0.p.scaled(-1.0), 0.0).unwrap();
            let back = match advance_billiard(&back_state, 7.0) {
                Ok(r) => r,
                Err(Error::CornerDegeneracy { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            for i in 0..3 {
                assert!((back.0.q[i] - q[i]).abs() < 1e-9);
                assert!((back.0.p[i] + p[i]).abs() < 1e-9);
            }
            tested += 1;
        }
    }

    #[test]
    fn corner_hit_aborts() {
        // aiming at the vertex (1, 0, -1) reaches two facets simultaneously
        let s = state([0.0, 0.0, 0.0], [1.0, 0.0, -1.0]);
        assert!(matches!(advance_billiard(&s, 5.0), Err(Error::CornerDegeneracy { .. })));
    }

    #[test]
    fn rejects_position_outside_closure() {
        let q = WPoint::new(vec![1.0, -1.0, 0.0]).unwrap();
        let p = WPoint::zeros(3);
        assert!(BilliardState::new(q, p, 0.0).is_err());
    }

    #[test]
    fn sampling_matches_piecewise_linear_motion() {
        let s = state([0.0, 0.0, 0.0], [1.0, -1.0, 0.0]);
        let times = [0.0, 0.25, 0.5, 0.75, 1.0];
        let qs = sample_billiard(&s, &times).unwrap();
        // breakpoint exactly at the bounce time 0.5
        assert_relative_eq!(qs[1][0], 0.25, epsilon = 1e-12);
        assert_relative_eq!(qs[2][0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(qs[3][0], 0.25, epsilon = 1e-12);
        assert!(qs[4][0].abs() < 1e-12);
    }
}
