//! Rotational profile curves and their phase-plane orbits.
//!
//! Profiles are integrated in the angle formulation
//!
//! ```text
//! x' = cos(theta),  z' = sin(theta),
//! theta' = n h(cos(theta)) - (n-1) sin(theta) / x
//! ```
//!
//! which stays regular where the orbit meets `y = +-1`. The phase point is
//! `(x, y) = (x, cos(theta))` and `eps = sign(sin(theta))`, so switching
//! between the two copies of the phase plane is implicit.

mod comparison;
mod profile;

pub use comparison::{comparison_orbit_check, comparison_orbit_report, ComparisonReport};
pub use profile::{
    curvature_residual, profile_from_samples, reconstruct_profile, reconstruct_profile_with_cap, CurvatureResidual,
    ProfileCurve, ProfileSample,
};

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, LastGoodState, Result};
use crate::model::{ModelParams, Orientation, PrescribedFunction, SpecialSolution};
use crate::ode::{integrate_span, Dopri5, OdeSystem};
use crate::phaseplane::{equilibrium_analysis, nullcline, Equilibrium};

/// Length of the sampled piece returned for exact solutions.
pub const EXACT_SPAN: f64 = 10.0;
/// Events are localised until the bracketing interval is this short.
pub const EVENT_TOL: f64 = 1e-12;
/// Below this distance to the axis the orbit is treated as having reached it.
pub const AXIS_CONTACT_X: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedKind {
    AxisUp,
    AxisDown,
    Interior { x0: f64, y0: f64, eps0: i8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSeed {
    pub kind: SeedKind,
    pub params: ModelParams,
}

impl OrbitSeed {
    pub fn axis_up(p: &ModelParams) -> Self {
        Self { kind: SeedKind::AxisUp, params: *p }
    }

    pub fn axis_down(p: &ModelParams) -> Self {
        Self { kind: SeedKind::AxisDown, params: *p }
    }

    /// The orbit with endpoint `(0, delta)` in the copy `eps`. It exists only
    /// when `eps (delta + lambda) > 0`; `delta = -1, lambda = 1` is the
    /// hyperplane and accepts either sign.
    pub fn axis(p: &ModelParams, delta: i8, eps: i8) -> Result<Self> {
        if delta != 1 && delta != -1 {
            return Err(Error::InvalidSeed(format!("delta must be +1 or -1, got {delta}")));
        }
        let side = f64::from(eps) * (f64::from(delta) + p.lambda);
        if side < 0.0 || (side == 0.0 && delta == 1) || (eps != 1 && eps != -1) {
            return Err(Error::InvalidSeed(format!(
                "There is no such an orbit in Theta_{eps} with endpoint (0, {delta}) for lambda = {}",
                p.lambda
            )));
        }
        Ok(if delta == 1 { Self::axis_up(p) } else { Self::axis_down(p) })
    }

    pub fn interior(p: &ModelParams, x0: f64, y0: f64, eps0: i8) -> Result<Self> {
        if !(x0 > 0.0 && x0.is_finite()) || !(y0 > -1.0 && y0 < 1.0) || (eps0 != 1 && eps0 != -1) {
            return Err(Error::InvalidSeed(format!(
                "interior seed ({x0}, {y0}, {eps0}) is outside (0,inf) x (-1,1) x {{-1,1}}"
            )));
        }
        Ok(Self { kind: SeedKind::Interior { x0, y0, eps0 }, params: *p })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Self::Forward => 1.0,
            Self::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    pub tol: f64,
    pub s_max: f64,
    /// `None` selects `1e3 (n-1)/(lambda n)`.
    pub x_max: Option<f64>,
    pub e0_radius: f64,
    pub winding_cap: u32,
    pub sample_step: f64,
    pub s0: f64,
    /// Integration direction for interior seeds; axis seeds fix their own.
    pub direction: Direction,
    /// Stop at this many `y = 0` crossings.
    pub stop_after_y0_crossings: Option<usize>,
    pub intersection_cap: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            s_max: 500.0,
            x_max: None,
            e0_radius: 1e-4,
            winding_cap: 12,
            sample_step: 1e-3,
            s0: 1e-5,
            direction: Direction::Forward,
            stop_after_y0_crossings: None,
            intersection_cap: 10_000,
        }
    }
}

impl OrbitOptions {
    pub fn x_max_for(&self, p: &ModelParams) -> f64 {
        self.x_max.unwrap_or(1e3 * p.cylinder_radius())
    }

    fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && self.s_max > 0.0
            && self.e0_radius > 0.0
            && self.sample_step > 0.0
            && self.s0 > 0.0
            && self.s0 <= 1e-4
            && self.x_max.is_none_or(|x| x > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid orbit options {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    AxisContact,
    TurnAtYPlus1,
    TurnAtYMinus1,
    CrossY0,
    CrossGamma,
    ConvergedToE0,
    ConvergedToAsymptote,
    Escaped,
    SBudgetExhausted,
    /// The seed is an exact special solution; samples are exact.
    ExactSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
}

impl TraceSample {
    pub fn y(&self) -> f64 {
        self.theta.cos()
    }

    pub fn eps(&self) -> i8 {
        if self.theta.sin() >= 0.0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub seed: OrbitSeed,
    pub prescribed: PrescribedFunction,
    /// `+1` when `s` increases along `samples`, `-1` otherwise.
    pub direction: i8,
    pub samples: Vec<TraceSample>,
    pub events: Vec<Event>,
    pub termination: EventKind,
    /// Completed turns of `(x - x_c, y)` around the centre.
    pub winding: u32,
    /// Total signed angle swept around the centre.
    pub phase_angle: f64,
    /// `x_c`, the `y = 0` point of the nullcline in `Theta_1`.
    pub center: Option<f64>,
    pub x_max: f64,
    pub y_lim: Option<f64>,
    pub exact: Option<SpecialSolution>,
}

impl OrbitTrace {
    pub fn params(&self) -> &ModelParams {
        &self.seed.params
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> + '_ {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// `x` at every `y = +-1` event, in order along the trace.
    pub fn turn_radii(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::TurnAtYPlus1 | EventKind::TurnAtYMinus1))
            .map(|e| e.x)
            .collect()
    }

    /// Number of sign changes of `x - x_c` along the samples.
    pub fn center_crossings(&self, x_c: f64) -> usize {
        let mut count = 0;
        let mut prev = 0.0f64;
        for smp in &self.samples {
            let d = smp.x - x_c;
            if d != 0.0 {
                if prev != 0.0 && d.signum() != prev.signum() {
                    count += 1;
                }
                prev = d;
            }
        }
        count
    }

    pub fn last(&self) -> &TraceSample {
        self.samples.last().expect("traces always hold the start sample")
    }
}

/// Initial state `(s, x, z, theta)` a distance `s0` from the axis on the
/// orbit with endpoint `(0, delta)`.
///
/// The vertex curvature is `kappa0 = h(delta)`, which equals `lambda + delta`
/// for the linear prescription.
pub fn axis_start_state_for(f: PrescribedFunction, delta: i8, s0: f64) -> TraceSample {
    let kappa0 = f.value(f64::from(delta));
    if delta > 0 {
        TraceSample { s: s0, x: s0, z: 0.5 * kappa0 * s0 * s0, theta: kappa0 * s0 }
    } else {
        // The profile reaches the axis at s = 0 travelling towards it.
        TraceSample { s: -s0, x: s0, z: -0.5 * kappa0 * s0 * s0, theta: PI - kappa0 * s0 }
    }
}

pub fn axis_start_state(p: &ModelParams, delta: i8, s0: f64) -> TraceSample {
    axis_start_state_for(PrescribedFunction::linear(p), delta, s0)
}

pub(crate) struct ProfileSystem {
    pub n: f64,
    pub f: PrescribedFunction,
}

impl ProfileSystem {
    pub fn new(p: &ModelParams, f: PrescribedFunction) -> Self {
        Self { n: p.nf(), f }
    }

    pub fn curvature(&self, x: f64, theta: f64) -> f64 {
        let (sn, cs) = theta.sin_cos();
        self.n * self.f.value(cs) - (self.n - 1.0) * sn / x
    }
}

impl OdeSystem<3> for ProfileSystem {
    fn rhs(&self, _s: f64, y: &[f64; 3]) -> [f64; 3] {
        let (sn, cs) = y[2].sin_cos();
        [cs, sn, self.n * self.f.value(cs) - (self.n - 1.0) * sn / y[0]]
    }
}

const GUARD_ZERO: f64 = 1e-14;

fn sgn(v: f64) -> i8 {
    if v.abs() <= GUARD_ZERO {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// The three event functions: `cos(theta)`, `sin(theta)` and `theta'`.
fn event_values(sys: &ProfileSystem, st: &[f64; 3]) -> [f64; 3] {
    [st[2].cos(), st[2].sin(), sys.curvature(st[0], st[2])]
}

fn exact_trace(
    seed: OrbitSeed,
    f: PrescribedFunction,
    opts: &OrbitOptions,
    sol: SpecialSolution,
    start: f64,
    dir: f64,
    center: Option<f64>,
) -> OrbitTrace {
    let len = opts.s_max.min(EXACT_SPAN);
    let count = (len / opts.sample_step).round() as usize;
    let samples = (0..=count)
        .map(|k| {
            let s = start + dir * k as f64 * opts.sample_step;
            match sol {
                SpecialSolution::RoundCylinder { radius } => TraceSample { s, x: radius, z: s, theta: FRAC_PI_2 },
                _ => TraceSample { s, x: -s, z: 0.0, theta: PI },
            }
        })
        .collect();
    OrbitTrace {
        seed,
        prescribed: f,
        direction: dir as i8,
        samples,
        events: vec![],
        termination: EventKind::ExactSolution,
        winding: 0,
        phase_angle: 0.0,
        center,
        x_max: opts.x_max_for(&seed.params),
        y_lim: None,
        exact: Some(sol),
    }
}

fn step_failure(t: f64, y: &[f64; 3]) -> Error {
    Error::StepFailure(LastGoodState { s: t, x: y[0], z: y[1], theta: y[2] })
}

/// Localises a sign change of event function `idx` inside `(a.s, b_s]` by
/// bisection, re-integrating from `a`. Returns the state at the right end of
/// the final bracket.
fn localize(sys: &ProfileSystem, a: &TraceSample, b_s: f64, idx: usize, tol: f64) -> Result<TraceSample> {
    let y_a = [a.x, a.z, a.theta];
    let g_a = sgn(event_values(sys, &y_a)[idx]);
    let (mut lo, mut hi) = (a.s, b_s);
    let mut hi_state = integrate_span(sys, a.s, y_a, hi, tol).map_err(|e| step_failure(e.t, &e.y))?;
    while (hi - lo).abs() > EVENT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let st = integrate_span(sys, a.s, y_a, mid, tol).map_err(|e| step_failure(e.t, &e.y))?;
        let g = sgn(event_values(sys, &st)[idx]);
        if g == g_a {
            lo = mid;
        } else {
            hi = mid;
            hi_state = st;
        }
    }
    Ok(TraceSample { s: hi, x: hi_state[0], z: hi_state[1], theta: hi_state[2] })
}

struct Monitor {
    center: Option<f64>,
    eq: Option<Equilibrium>,
    last_angle: f64,
    angle: f64,
    half_turns: u32,
    lyap_recent: [f64; 3],
    lyap_count: usize,
    lyap_at_half_turn: Vec<f64>,
}

impl Monitor {
    fn winding(&self) -> u32 {
        self.half_turns / 2
    }

    fn update(&mut self, smp: &TraceSample) {
        if let Some(c) = self.center {
            let a = smp.y().atan2(smp.x - c);
            let mut d = a - self.last_angle;
            if d > PI {
                d -= 2.0 * PI;
            } else if d < -PI {
                d += 2.0 * PI;
            }
            self.angle += d;
            self.last_angle = a;
            let h = (self.angle.abs() / PI) as u32;
            if let Some(eq) = &self.eq {
                let v = eq.lyapunov_value(smp.x, smp.y());
                self.lyap_recent = [self.lyap_recent[1], self.lyap_recent[2], v];
                self.lyap_count += 1;
                if h > self.half_turns {
                    self.lyap_at_half_turn.push(v);
                }
            }
            self.half_turns = self.half_turns.max(h);
        }
    }

    fn lyapunov_decreasing(&self) -> bool {
        self.lyap_count >= 3 && self.lyap_recent[0] > self.lyap_recent[1] && self.lyap_recent[1] > self.lyap_recent[2]
    }

    fn contracting_over_turn(&self) -> bool {
        let v = &self.lyap_at_half_turn;
        v.len() >= 3 && v[v.len() - 1] < v[v.len() - 3]
    }
}

/// Integrates the orbit of `seed` for the prescribed function `f` on the
/// uniform grid `s_k = s_start + k * sample_step` (in the integration
/// direction), logging every crossing of `y = 0`, `y = +-1` and the
/// nullcline, and stopping at the first terminal condition.
pub fn integrate_orbit(seed: OrbitSeed, f: PrescribedFunction, opts: &OrbitOptions) -> Result<OrbitTrace> {
    opts.validate()?;
    let p = seed.params;
    let n = p.nf();
    let linear = matches!(f, PrescribedFunction::Linear { .. });
    let center = nullcline(p.n, f, 1, 0.0);
    let x_max = opts.x_max_for(&p);

    let (start, dir) = match seed.kind {
        SeedKind::AxisUp | SeedKind::AxisDown => {
            let delta: i8 = if seed.kind == SeedKind::AxisUp { 1 } else { -1 };
            let kappa0 = f.value(f64::from(delta));
            if kappa0 == 0.0 {
                if linear {
                    let sol = SpecialSolution::Hyperplane { orientation: Orientation::Downward };
                    return Ok(exact_trace(seed, f, opts, sol, 0.0, -1.0, center));
                }
                return Err(Error::InvalidSeed(format!(
                    "no orbit of the given prescribed function ends at (0, {delta})"
                )));
            }
            if delta > 0 && kappa0 < 0.0 {
                return Err(Error::InvalidSeed("There is no such an orbit in Theta_{-eps}".into()));
            }
            (axis_start_state_for(f, delta, opts.s0), f64::from(delta))
        }
        SeedKind::Interior { x0, y0, eps0 } => {
            let dir = opts.direction.sign();
            if let Some(c) = center {
                if eps0 == 1 && y0 == 0.0 && (x0 - c).abs() <= 1e-12 * c {
                    let sol = SpecialSolution::RoundCylinder { radius: c };
                    return Ok(exact_trace(seed, f, opts, sol, 0.0, dir, center));
                }
            }
            let theta = if eps0 > 0 { y0.acos() } else { -y0.acos() };
            (TraceSample { s: 0.0, x: x0, z: 0.0, theta }, dir)
        }
    };

    let sys = ProfileSystem { n, f };
    let eq = (linear && center.is_some()).then(|| equilibrium_analysis(&p));
    let y_lim = (linear && p.lambda < 1.0).then_some(-p.lambda);
    let mut mon = Monitor {
        center,
        eq,
        last_angle: center.map_or(0.0, |c| start.y().atan2(start.x - c)),
        angle: 0.0,
        half_turns: 0,
        lyap_recent: [0.0; 3],
        lyap_count: 0,
        lyap_at_half_turn: vec![],
    };
    mon.update(&start);

    let mut samples = vec![start];
    let mut events: Vec<Event> = Vec::new();
    let mut y0_crossings = 0usize;
    let mut st = Dopri5::new(&sys, start.s, [start.x, start.z, start.theta], opts.tol, opts.sample_step);
    let mut prev_g = event_values(&sys, &[start.x, start.z, start.theta]);
    let termination;
    let mut k: u64 = 0;

    loop {
        k += 1;
        let s_next = start.s + dir * k as f64 * opts.sample_step;
        if (s_next - start.s).abs() > opts.s_max * (1.0 + 1e-12) {
            termination = EventKind::SBudgetExhausted;
            break;
        }
        if let Err(e) = st.advance_to(s_next) {
            if e.y[0] < 1e-6 {
                let y = e.y[2].cos();
                events.push(Event { kind: EventKind::AxisContact, s: e.t, x: e.y[0], y });
                termination = EventKind::AxisContact;
                break;
            }
            return Err(step_failure(e.t, &e.y));
        }
        let [x, z, theta] = *st.y();
        let cur = TraceSample { s: s_next, x, z, theta };
        let g = event_values(&sys, st.y());

        // Sign changes of the event functions over the last grid interval.
        let prev = *samples.last().unwrap();
        let mut found: Vec<Event> = Vec::new();
        for idx in 0..3 {
            let (a, b) = (sgn(prev_g[idx]), sgn(g[idx]));
            if a == 0 || a == b {
                continue;
            }
            let at = if b == 0 { cur } else { localize(&sys, &prev, s_next, idx, opts.tol)? };
            let kind = match idx {
                0 => EventKind::CrossY0,
                1 if at.theta.cos() > 0.0 => EventKind::TurnAtYPlus1,
                1 => EventKind::TurnAtYMinus1,
                _ => EventKind::CrossGamma,
            };
            found.push(Event { kind, s: at.s, x: at.x, y: at.theta.cos() });
        }
        found.sort_by(|a, b| (dir * a.s).total_cmp(&(dir * b.s)));
        let mut stop = false;
        for e in found {
            if e.kind == EventKind::CrossY0 {
                y0_crossings += 1;
            }
            events.push(e);
            if opts.stop_after_y0_crossings.is_some_and(|m| y0_crossings >= m) {
                stop = true;
                break;
            }
        }
        prev_g = g;
        samples.push(cur);
        mon.update(&cur);
        if stop {
            termination = EventKind::CrossY0;
            break;
        }

        let y = cur.y();
        if x < AXIS_CONTACT_X {
            events.push(Event { kind: EventKind::AxisContact, s: cur.s, x, y });
            termination = EventKind::AxisContact;
            break;
        }
        if let (Some(c), true) = (center, mon.eq.is_some()) {
            let inside = (x - c).hypot(y) < opts.e0_radius;
            let capped = mon.winding() >= opts.winding_cap && mon.contracting_over_turn();
            if cur.eps() == 1 && ((inside && mon.lyapunov_decreasing()) || capped) {
                events.push(Event { kind: EventKind::ConvergedToE0, s: cur.s, x, y });
                termination = EventKind::ConvergedToE0;
                break;
            }
        }
        if let Some(yl) = y_lim {
            if x > 0.5 * x_max && (y - yl).abs() < opts.e0_radius {
                events.push(Event { kind: EventKind::ConvergedToAsymptote, s: cur.s, x, y });
                termination = EventKind::ConvergedToAsymptote;
                break;
            }
        }
        if x > x_max {
            events.push(Event { kind: EventKind::Escaped, s: cur.s, x, y });
            termination = EventKind::Escaped;
            break;
        }
    }

    Ok(OrbitTrace {
        seed,
        prescribed: f,
        direction: dir as i8,
        samples,
        events,
        termination,
        winding: mon.winding(),
        phase_angle: mon.angle,
        center,
        x_max,
        y_lim,
        exact: None,
    })
}
