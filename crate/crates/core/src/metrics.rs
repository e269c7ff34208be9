//! Verdict functionals: zero-resistance and invisibility residuals, the
//! resistance force, and the flux-weighted trajectory-length integrals.
//!
//! Every estimator draws sample `i` from its own random stream and merges
//! chunk accumulators in index order, so reports are reproducible bit for bit
//! regardless of the worker count. Degenerate and trapped trajectories form a
//! null set; they are counted, excluded from residuals and means, and
//! reported as `excluded_fraction`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::billiard::{trace, TraceLimits, TraceResult, TraceStatus};
use crate::bodies::{body_volume, Body};
use crate::geom::{AmbientBody, UnitVec3, Vec3};
use crate::measures::{
    cross_section, omega_uniformity, sample_cross_section, sample_mu_minus, ChiSquareTest,
};
use crate::sampling::{map_chunks, sample_rng, Estimate, McOptions, RunningStats};

const PURPOSE_VERIFY: u64 = 1;
const PURPOSE_RESISTANCE: u64 = 2;
const PURPOSE_PHASE: u64 = 3;
const PURPOSE_EXCESS: u64 = 4;
const PURPOSE_BODY_VOLUME: u64 = 5;

/// Slack allowed in `tau >= |xi_plus - xi|` for rounding.
pub const EQ1_SLACK: f64 = 1e-12;

/// Outcome counts shared by every report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceCounts {
    pub exited: u64,
    pub degenerate: u64,
    pub trapped: u64,
    /// Exited traces whose length falls short of the chord `|xi_plus - xi|`.
    pub length_violations: u64,
    /// Bounce count -> number of exited traces.
    pub bounce_histogram: BTreeMap<usize, u64>,
}

impl TraceCounts {
    fn record(&mut self, xi: Vec3, r: &TraceResult) {
        match r.status {
            TraceStatus::Exited => {
                self.exited += 1;
                *self.bounce_histogram.entry(r.bounces).or_default() += 1;
                if r.path_length < (r.exit_point - xi).norm() - EQ1_SLACK {
                    self.length_violations += 1;
                }
            }
            TraceStatus::Degenerate => self.degenerate += 1,
            TraceStatus::Trapped => self.trapped += 1,
        }
    }

    fn merge(&mut self, o: &TraceCounts) {
        self.exited += o.exited;
        self.degenerate += o.degenerate;
        self.trapped += o.trapped;
        self.length_violations += o.length_violations;
        for (&k, &v) in &o.bounce_histogram {
            *self.bounce_histogram.entry(k).or_default() += v;
        }
    }

    pub fn total(&self) -> u64 {
        self.exited + self.degenerate + self.trapped
    }

    pub fn excluded_fraction(&self) -> f64 {
        let n = self.total();
        if n == 0 {
            0.0
        } else {
            (self.degenerate + self.trapped) as f64 / n as f64
        }
    }
}

/// Residuals of the zero-resistance and invisibility properties along one direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub direction: Vec3,
    pub samples: u64,
    /// Max `|v_plus - v|` over exited traces.
    pub max_velocity_residual: f64,
    /// Max distance of the exit point from the entry line.
    pub max_perp_displacement: f64,
    pub excluded_fraction: f64,
    pub counts: TraceCounts,
}

impl VerdictReport {
    pub fn zero_resistance(&self, threshold: f64) -> bool {
        self.max_velocity_residual < threshold
    }

    pub fn invisible(&self, threshold: f64) -> bool {
        self.zero_resistance(threshold) && self.max_perp_displacement < threshold
    }
}

/// Traces `samples` rays along `v`, entering uniformly over the shadow domain.
pub fn verify_direction(
    body: &Body,
    c: &AmbientBody,
    v: UnitVec3,
    opts: &McOptions,
    limits: &TraceLimits,
) -> VerdictReport {
    #[derive(Default)]
    struct Acc {
        max_vel: f64,
        max_perp: f64,
        counts: TraceCounts,
    }
    let cs = cross_section(c, v);
    let chunks = map_chunks(opts.samples, opts.workers, |range| {
        let mut acc = Acc::default();
        for i in range {
            let mut rng = sample_rng(opts.seed, PURPOSE_VERIFY, i);
            let xi = sample_cross_section(&cs, &mut rng);
            let r = trace(body, c, xi, v, limits).expect("cross-section samples are incoming");
            acc.counts.record(xi, &r);
            if r.is_exited() {
                acc.max_vel = acc.max_vel.max((r.exit_velocity.get() - *v).norm());
                acc.max_perp = acc.max_perp.max((r.exit_point - xi).reject(v).norm());
            }
        }
        acc
    });
    let mut total = Acc::default();
    for a in &chunks {
        total.max_vel = total.max_vel.max(a.max_vel);
        total.max_perp = total.max_perp.max(a.max_perp);
        total.counts.merge(&a.counts);
    }
    VerdictReport {
        direction: *v,
        samples: opts.samples,
        max_velocity_residual: total.max_vel,
        max_perp_displacement: total.max_perp,
        excluded_fraction: total.counts.excluded_fraction(),
        counts: total.counts,
    }
}

/// Momentum-transfer resistance `R(v) = int (v - v_plus) (-n . v) dxi` over the
/// incoming boundary, i.e. `|omega|` times the mean of `v - v_plus`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResistanceReport {
    pub direction: Vec3,
    pub samples: u64,
    pub force: Vec3,
    /// Per-component standard error of `force`.
    pub stderr: Vec3,
    /// Component of the force along the direction of motion.
    pub drag: Estimate,
    /// A-priori bound on the floating-point error of `force` (per component):
    /// `|omega|` times the mean of `ROUNDING_PER_BOUNCE * bounces`.
    pub rounding_bound: f64,
    pub excluded_fraction: f64,
    pub counts: TraceCounts,
}

impl ResistanceReport {
    /// Every component within `k` standard errors (plus the rounding bound) of zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.force
            .to_array()
            .iter()
            .zip(self.stderr.to_array())
            .all(|(f, s)| f.abs() <= k * s + self.rounding_bound)
    }
}

/// Worst-case floating-point error of an exit velocity, per reflection.
pub const ROUNDING_PER_BOUNCE: f64 = 32.0 * f64::EPSILON;

pub fn resistance(
    body: &Body,
    c: &AmbientBody,
    v: UnitVec3,
    opts: &McOptions,
    limits: &TraceLimits,
) -> ResistanceReport {
    let cs = cross_section(c, v);
    let chunks = map_chunks(opts.samples, opts.workers, |range| {
        let mut comps = [RunningStats::default(); 5];
        let mut counts = TraceCounts::default();
        for i in range {
            let mut rng = sample_rng(opts.seed, PURPOSE_RESISTANCE, i);
            let xi = sample_cross_section(&cs, &mut rng);
            let r = trace(body, c, xi, v, limits).expect("cross-section samples are incoming");
            counts.record(xi, &r);
            if r.is_exited() {
                let dv = *v - r.exit_velocity.get();
                let rounding = ROUNDING_PER_BOUNCE * r.bounces as f64;
                for (s, x) in comps
                    .iter_mut()
                    .zip([dv.x, dv.y, dv.z, dv.dot(*v), rounding])
                {
                    s.push(x);
                }
            }
        }
        (comps, counts)
    });
    let mut comps = [RunningStats::default(); 5];
    let mut counts = TraceCounts::default();
    for (cc, k) in &chunks {
        for (a, b) in comps.iter_mut().zip(cc) {
            a.merge(b);
        }
        counts.merge(k);
    }
    let area = cs.omega.area();
    let e: Vec<Estimate> = comps.iter().map(|s| s.scaled(area)).collect();
    ResistanceReport {
        direction: *v,
        samples: opts.samples,
        force: Vec3::new(e[0].value, e[1].value, e[2].value),
        stderr: Vec3::new(e[0].stderr, e[1].stderr, e[2].stderr),
        drag: e[3],
        rounding_bound: e[4].value,
        excluded_fraction: counts.excluded_fraction(),
        counts,
    }
}

/// Flux-weighted trajectory-length integrals over all incoming states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVolumeReport {
    pub samples: u64,
    /// `int tau dmu_minus`: the reachable phase volume.
    pub l_body: Estimate,
    /// `4 pi |C|`, the phase volume of the empty container.
    pub l_empty: f64,
    pub body_volume: Estimate,
    /// `4 pi |C \ B|`.
    pub reachable_bound: Estimate,
    /// `int |xi_plus - xi| dmu_minus`.
    pub displacement_integral: Estimate,
    pub excluded_fraction: f64,
    pub counts: TraceCounts,
}

impl PhaseVolumeReport {
    /// `l_body <= reachable_bound + k * combined stderr`.
    pub fn within_reachable_bound(&self, k: f64) -> bool {
        let s = self.l_body.stderr.hypot(self.reachable_bound.stderr);
        self.l_body.value <= self.reachable_bound.value + k * s
    }
}

pub fn phase_volume_audit(
    body: &Body,
    c: &AmbientBody,
    opts: &McOptions,
    limits: &TraceLimits,
) -> PhaseVolumeReport {
    let chunks = map_chunks(opts.samples, opts.workers, |range| {
        let mut tau = RunningStats::default();
        let mut disp = RunningStats::default();
        let mut counts = TraceCounts::default();
        for i in range {
            let mut rng = sample_rng(opts.seed, PURPOSE_PHASE, i);
            let s = sample_mu_minus(c, &mut rng);
            let r = trace(body, c, s.xi, s.v, limits).expect("flux samples are incoming");
            counts.record(s.xi, &r);
            if r.is_exited() {
                tau.push(r.path_length);
                disp.push((r.exit_point - s.xi).norm());
            }
        }
        (tau, disp, counts)
    });
    let mut tau = RunningStats::default();
    let mut disp = RunningStats::default();
    let mut counts = TraceCounts::default();
    for (a, b, k) in &chunks {
        tau.merge(a);
        disp.merge(b);
        counts.merge(k);
    }
    let weight = c.surface_area() * PI;
    let vol_opts = McOptions {
        seed: opts.seed ^ PURPOSE_BODY_VOLUME,
        ..*opts
    };
    let bv = body_volume(body, &vol_opts);
    let reachable_bound = Estimate {
        value: 4.0 * PI * (c.volume() - bv.value),
        stderr: 4.0 * PI * bv.stderr,
    };
    PhaseVolumeReport {
        samples: opts.samples,
        l_body: tau.scaled(weight),
        l_empty: 4.0 * PI * c.volume(),
        body_volume: bv,
        reachable_bound,
        displacement_integral: disp.scaled(weight),
        excluded_fraction: counts.excluded_fraction(),
        counts,
    }
}

/// Excess of trajectory length over the free chord along one direction,
/// `int (tau - tau0) (-n . v) dxi`, together with a uniformity test of the
/// exit-position map on the shadow domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthExcessReport {
    pub direction: Vec3,
    pub samples: u64,
    pub excess: Estimate,
    /// Fraction of exited rays whose path is longer than the free chord by
    /// more than `1e-9`.
    pub strict_fraction: f64,
    pub max_excess: f64,
    /// Pushforward of the shadow-domain measure by the exit-position map.
    pub exit_uniformity: ChiSquareTest,
    pub excluded_fraction: f64,
    pub counts: TraceCounts,
}

pub fn directional_length_excess(
    body: &Body,
    c: &AmbientBody,
    v: UnitVec3,
    opts: &McOptions,
    limits: &TraceLimits,
) -> LengthExcessReport {
    let cs = cross_section(c, v);
    let chunks = map_chunks(opts.samples, opts.workers, |range| {
        let mut excess = RunningStats::default();
        let mut strict = 0u64;
        let mut max_excess = 0.0f64;
        let mut exits = Vec::with_capacity((range.end - range.start) as usize);
        let mut counts = TraceCounts::default();
        for i in range {
            let mut rng = sample_rng(opts.seed, PURPOSE_EXCESS, i);
            let q = cs.sample_omega(&mut rng);
            let Some((lo, hi)) = cs.heights(q) else {
                continue;
            };
            let xi = cs.lift_minus(q).expect("q lies in the shadow domain");
            let r = trace(body, c, xi, v, limits).expect("cross-section samples are incoming");
            counts.record(xi, &r);
            if r.is_exited() {
                let d = r.path_length - (hi - lo);
                excess.push(d);
                max_excess = max_excess.max(d);
                if d > 1e-9 {
                    strict += 1;
                }
                exits.push(cs.project(r.exit_point));
            }
        }
        (excess, strict, max_excess, exits, counts)
    });
    let mut excess = RunningStats::default();
    let mut strict = 0u64;
    let mut max_excess = 0.0f64;
    let mut exits = Vec::new();
    let mut counts = TraceCounts::default();
    for (e, s, m, x, k) in chunks {
        excess.merge(&e);
        strict += s;
        max_excess = max_excess.max(m);
        exits.extend(x);
        counts.merge(&k);
    }
    LengthExcessReport {
        direction: *v,
        samples: opts.samples,
        excess: excess.scaled(cs.omega.area()),
        strict_fraction: if counts.exited == 0 {
            0.0
        } else {
            strict as f64 / counts.exited as f64
        },
        max_excess,
        exit_uniformity: omega_uniformity(&cs.omega, &exits),
        excluded_fraction: counts.excluded_fraction(),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{
        make_ball, make_invisible_union, make_two_dir_body, DESIGN_DIR_Y, DESIGN_DIR_Z,
    };

    fn limits() -> TraceLimits {
        TraceLimits::default()
    }

    #[test]
    fn empty_body_has_no_resistance_or_excess() {
        let c = AmbientBody::sphere(1.0);
        let v = Vec3::new(0.3, -0.2, 0.9).normalize().unwrap();
        let opts = McOptions::new(5_000, 1);
        let r = resistance(&Body::empty(), &c, v, &opts, &limits());
        assert_eq!(r.force, Vec3::ZERO);
        let e = directional_length_excess(&Body::empty(), &c, v, &opts, &limits());
        assert!(e.max_excess.abs() < 1e-12);
        assert!(e.excess.value.abs() < 1e-12);
    }

    #[test]
    fn single_body_is_zero_resistance_but_not_invisible() {
        let body = make_two_dir_body(1.0, 1.0, 0.6).unwrap();
        let c = AmbientBody::sphere(3.0);
        let rep = verify_direction(
            &body,
            &c,
            DESIGN_DIR_Y,
            &McOptions::new(20_000, 3),
            &limits(),
        );
        assert!(rep.zero_resistance(1e-9), "{rep:?}");
        assert!(rep.max_perp_displacement > 1.0);
        assert_eq!(rep.counts.length_violations, 0);
    }

    #[test]
    fn union_is_invisible_in_both_directions() {
        let body = make_invisible_union(1.0, 1.0, 0.6).unwrap();
        let c = AmbientBody::sphere(4.0);
        for v in [DESIGN_DIR_Y, DESIGN_DIR_Z] {
            let rep = verify_direction(&body, &c, v, &McOptions::new(20_000, 3), &limits());
            assert!(rep.invisible(1e-9), "{rep:?}");
            let hist: Vec<usize> = rep.counts.bounce_histogram.keys().copied().collect();
            assert_eq!(hist, vec![0, 4]);
        }
    }

    #[test]
    fn union_is_visible_along_the_diagonal() {
        let body = make_invisible_union(1.0, 1.0, 0.6).unwrap();
        let c = AmbientBody::sphere(4.0);
        let v = Vec3::new(1.0, 1.0, 1.0).normalize().unwrap();
        let rep = verify_direction(&body, &c, v, &McOptions::new(5_000, 3), &limits());
        assert!(rep.max_velocity_residual > 0.1);
    }

    #[test]
    fn ball_drag_is_pi() {
        let body = make_ball(Vec3::ZERO, 1.0);
        let c = AmbientBody::sphere(2.0);
        let rep = resistance(
            &body,
            &c,
            DESIGN_DIR_Z,
            &McOptions::new(100_000, 8),
            &limits(),
        );
        assert!(rep.drag.within_sigmas(PI, 4.0), "{:?}", rep.drag);
    }

    #[test]
    fn reports_do_not_depend_on_worker_count() {
        let body = make_two_dir_body(1.0, 1.0, 0.4).unwrap();
        let c = AmbientBody::sphere(3.0);
        let a = phase_volume_audit(
            &body,
            &c,
            &McOptions::new(9_000, 5).with_workers(1),
            &limits(),
        );
        let b = phase_volume_audit(
            &body,
            &c,
            &McOptions::new(9_000, 5).with_workers(4),
            &limits(),
        );
        assert_eq!(a, b);
    }
}
