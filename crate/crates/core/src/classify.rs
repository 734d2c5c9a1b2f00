//! Reading orbit traces as statements about the rotational hypersurface:
//! topology, embeddedness and the behaviour of each end.
//!
//! "Infinitely many" can only ever be witnessed on a truncated trace. It is
//! reported as `InfiniteWitnessed` when the trace shows the mechanism that
//! produces it (a spiral still crossing the cylinder radius when it enters
//! the e0 ball, loops whose turn radii keep growing, or a saturated count).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, PrescribedFunction};
use crate::orbits::{
    curvature_residual, integrate_orbit, profile_from_samples, reconstruct_profile_with_cap, Direction, EventKind,
    OrbitOptions, OrbitSeed, OrbitTrace, ProfileCurve, TraceSample,
};
use crate::phaseplane::{regime, Regime};

pub use crate::orbits::OrbitOptions as ClassifyOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceTopology {
    Disk,
    #[serde(rename = "Cylinder_Sn1xR")]
    CylinderSn1xR,
    Hyperplane,
    RoundCylinder,
    EntireGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntersectionClass {
    None,
    Finite(usize),
    InfiniteWitnessed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingClass {
    InfiniteWitnessed,
    Finite(usize),
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum End {
    ConvergesToCMCCylinder { radius: f64, crossing_class: CrossingClass },
    GraphOutsideCompact,
    UnboundedLooping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKindLabel {
    AxisUp,
    AxisDown,
    OffAxis,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub winding_cap: u32,
    pub intersection_cap: usize,
    pub winding: Option<u32>,
    pub center_crossings: Option<usize>,
    pub self_intersections: usize,
    pub turn_radii: Vec<f64>,
    pub terminations: Vec<EventKind>,
    pub curvature_residual: Option<f64>,
    pub min_curvature_along: Option<f64>,
    /// For off-axis seeds with `lambda < 1`: embeddedness predicted from the
    /// side of e0 on which the seed lies.
    pub seed_side_embedded: Option<bool>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub params: ModelParams,
    pub seed_kind: SeedKindLabel,
    pub x_hat: Option<f64>,
    pub surface_topology: SurfaceTopology,
    pub embedded: bool,
    pub self_intersection_class: IntersectionClass,
    pub ends: Vec<End>,
    pub regime: Regime,
    /// Set when integration failed; the remaining fields then describe the
    /// part computed before the failure.
    pub truncated: Option<String>,
    pub metadata: ReportMetadata,
}

fn base_report(
    p: &ModelParams,
    seed_kind: SeedKindLabel,
    topo: SurfaceTopology,
    opts: &OrbitOptions,
) -> ClassificationReport {
    ClassificationReport {
        params: *p,
        seed_kind,
        x_hat: None,
        surface_topology: topo,
        embedded: true,
        self_intersection_class: IntersectionClass::None,
        ends: vec![],
        regime: regime(p),
        truncated: None,
        metadata: ReportMetadata {
            winding_cap: opts.winding_cap,
            intersection_cap: opts.intersection_cap,
            ..ReportMetadata::default()
        },
    }
}

fn crossing_class(reg: Regime, converged: bool, crossings: usize) -> CrossingClass {
    match reg {
        Regime::Spiral if converged && crossings >= 2 => CrossingClass::InfiniteWitnessed,
        Regime::Sink if crossings == 0 => CrossingClass::Zero,
        _ => CrossingClass::Finite(crossings),
    }
}

/// Turn radii strictly increasing over at least three turns.
fn looping_witnessed(trace: &OrbitTrace) -> bool {
    let r = trace.turn_radii();
    r.len() >= 3 && r.windows(2).all(|w| w[1] > w[0])
}

fn intersection_class(profile: &ProfileCurve, infinite: bool) -> IntersectionClass {
    match profile.self_intersections {
        0 => IntersectionClass::None,
        _ if infinite || profile.intersections_saturated => IntersectionClass::InfiniteWitnessed,
        k => IntersectionClass::Finite(k),
    }
}

/// Past its last turn or `y = 0` crossing (the only places where `x` can
/// stop increasing), the orbit keeps moving away from the axis.
fn graph_tail(trace: &OrbitTrace) -> bool {
    if !matches!(trace.termination, EventKind::Escaped | EventKind::ConvergedToAsymptote | EventKind::SBudgetExhausted)
    {
        return false;
    }
    let dir = f64::from(trace.direction);
    let last_turn = trace
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::TurnAtYPlus1 | EventKind::TurnAtYMinus1 | EventKind::CrossY0))
        .map(|e| e.s)
        .next_back();
    let tail: Vec<&TraceSample> =
        trace.samples.iter().filter(|s| last_turn.is_none_or(|t| dir * (s.s - t) > 0.0)).collect();
    tail.len() >= 2 && tail.windows(2).all(|w| w[1].x > w[0].x)
}

fn cmc_end(p: &ModelParams, trace: &OrbitTrace, report: &mut ClassificationReport) {
    let radius = p.cylinder_radius();
    let crossings = trace.center_crossings(radius);
    let converged = trace.termination == EventKind::ConvergedToE0;
    report.metadata.winding = Some(trace.winding);
    report.metadata.center_crossings = Some(crossings);
    if converged {
        report.ends.push(End::ConvergesToCMCCylinder {
            radius,
            crossing_class: crossing_class(report.regime, true, crossings),
        });
    } else {
        report.metadata.notes.push(format!("orbit did not reach the e0 ball (termination {:?})", trace.termination));
    }
}

/// Classifies the hypersurface meeting the axis with endpoint `(0, delta)`.
pub fn classify_axis_surface(p: &ModelParams, delta: i8, opts: &OrbitOptions) -> Result<ClassificationReport> {
    let f = PrescribedFunction::linear(p);
    let (seed, label) = match delta {
        1 => (OrbitSeed::axis_up(p), SeedKindLabel::AxisUp),
        -1 => (OrbitSeed::axis_down(p), SeedKindLabel::AxisDown),
        _ => return Err(Error::InvalidSeed(format!("delta must be +1 or -1, got {delta}"))),
    };
    let mut report = base_report(p, label, SurfaceTopology::Disk, opts);
    if delta == -1 && p.lambda == 1.0 {
        report.surface_topology = SurfaceTopology::Hyperplane;
        report.ends.push(End::GraphOutsideCompact);
        report.metadata.terminations.push(EventKind::ExactSolution);
        report.metadata.notes.push("exact horizontal hyperplane; no integration".into());
        return Ok(report);
    }
    let trace = match integrate_orbit(seed, f, opts) {
        Ok(t) => t,
        Err(e) => {
            report.truncated = Some(e.to_string());
            return Ok(report);
        }
    };
    report.metadata.terminations.push(trace.termination);
    let profile = reconstruct_profile_with_cap(&trace, opts.intersection_cap);
    fill_profile_metadata(&mut report, p, &profile, trace.direction);
    report.metadata.turn_radii = trace.turn_radii();

    if delta == 1 {
        cmc_end(p, &trace, &mut report);
        report.self_intersection_class = intersection_class(&profile, false);
        report.embedded = profile.self_intersections == 0;
    } else if p.lambda > 1.0 {
        let looping = looping_witnessed(&trace);
        if looping {
            report.ends.push(End::UnboundedLooping);
        } else {
            report.metadata.notes.push("growing loops not witnessed within the budget".into());
        }
        report.self_intersection_class = intersection_class(&profile, looping);
        report.embedded = profile.self_intersections == 0;
    } else {
        let convex = report.metadata.min_curvature_along.is_some_and(|k| k > 0.0);
        let graph = graph_tail(&trace) && profile.self_intersections == 0 && trace.turn_radii().is_empty();
        if graph {
            report.ends.push(End::GraphOutsideCompact);
        }
        if graph && convex {
            report.surface_topology = SurfaceTopology::EntireGraph;
        } else {
            report.metadata.notes.push("entire convex graph not confirmed on the truncated profile".into());
        }
        report.self_intersection_class = intersection_class(&profile, false);
        report.embedded = profile.self_intersections == 0;
    }
    Ok(report)
}

fn fill_profile_metadata(report: &mut ClassificationReport, p: &ModelParams, profile: &ProfileCurve, direction: i8) {
    report.metadata.self_intersections = profile.self_intersections;
    if profile.samples.len() >= 3 {
        report.metadata.curvature_residual = Some(curvature_residual(profile, p).max_residual);
    }
    report.metadata.min_curvature_along =
        Some(profile.samples.iter().map(|s| f64::from(direction) * s.kappa).fold(f64::INFINITY, f64::min));
}

/// Classifies the hypersurface whose profile crosses `y = 0` at
/// `(x_hat, 0)` in `Theta_1`. The forward orbit gives the end asymptotic to
/// the CMC cylinder, the backward orbit the other end.
pub fn classify_offaxis_surface(p: &ModelParams, x_hat: f64, opts: &OrbitOptions) -> Result<ClassificationReport> {
    if !(x_hat > 0.0 && x_hat.is_finite()) {
        return Err(Error::InvalidSeed(format!("x_hat must be positive, got {x_hat}")));
    }
    let f = PrescribedFunction::linear(p);
    let radius = p.cylinder_radius();
    let mut report = base_report(p, SeedKindLabel::OffAxis, SurfaceTopology::CylinderSn1xR, opts);
    report.x_hat = Some(x_hat);
    if (x_hat - radius).abs() <= 1e-12 * radius {
        report.surface_topology = SurfaceTopology::RoundCylinder;
        let end = End::ConvergesToCMCCylinder { radius, crossing_class: CrossingClass::Zero };
        report.ends = vec![end, end];
        report.metadata.terminations.push(EventKind::ExactSolution);
        report.metadata.notes.push("seed is the equilibrium: exact round cylinder".into());
        return Ok(report);
    }
    let seed = OrbitSeed::interior(p, x_hat, 0.0, 1)?;
    let run = |direction| integrate_orbit(seed, f, &OrbitOptions { direction, ..*opts });
    let (fwd, bwd) = match (run(Direction::Forward), run(Direction::Backward)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            report.truncated = Some(e.to_string());
            return Ok(report);
        }
    };
    report.metadata.terminations = vec![fwd.termination, bwd.termination];
    report.metadata.turn_radii = bwd.turn_radii();

    // Whole profile ordered by increasing s.
    let mut joined: Vec<TraceSample> = bwd.samples.iter().rev().copied().collect();
    joined.extend_from_slice(&fwd.samples[1..]);
    let profile = profile_from_samples(p, f, &joined, opts.intersection_cap);
    fill_profile_metadata(&mut report, p, &profile, 1);
    report.metadata.min_curvature_along = None;

    cmc_end(p, &fwd, &mut report);
    let looping = p.lambda > 1.0 && looping_witnessed(&bwd);
    if p.lambda > 1.0 {
        if looping {
            report.ends.push(End::UnboundedLooping);
        } else {
            report.metadata.notes.push("growing loops not witnessed within the budget".into());
        }
    } else if graph_tail(&bwd) {
        report.ends.push(End::GraphOutsideCompact);
    } else {
        report.metadata.notes.push(format!("graph end not confirmed (backward termination {:?})", bwd.termination));
    }
    report.self_intersection_class = intersection_class(&profile, looping);
    report.embedded = profile.self_intersections == 0;
    if p.lambda < 1.0 {
        let predicted = x_hat < radius;
        report.metadata.seed_side_embedded = Some(predicted);
        if predicted != report.embedded {
            report
                .metadata
                .notes
                .push(format!("seed-side prediction (embedded = {predicted}) disagrees with the truncated profile"));
        }
    }
    report.metadata.notes.push("embeddedness is judged on the truncated profile".into());
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TableSeed {
    Axis { delta: i8 },
    OffAxis { x_hat: f64 },
}

/// Classifies every cell in parallel, preserving the grid order. Errors in a
/// cell are recorded in that cell's report.
pub fn classification_table(
    p_grid: &[ModelParams],
    seed: TableSeed,
    opts: &OrbitOptions,
) -> Result<Vec<ClassificationReport>> {
    if p_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(p_grid
        .par_iter()
        .map(|p| {
            let res = match seed {
                TableSeed::Axis { delta } => classify_axis_surface(p, delta, opts),
                TableSeed::OffAxis { x_hat } => classify_offaxis_surface(p, x_hat, opts),
            };
            res.unwrap_or_else(|e| {
                let (label, topo) = match seed {
                    TableSeed::Axis { delta: 1 } => (SeedKindLabel::AxisUp, SurfaceTopology::Disk),
                    TableSeed::Axis { .. } => (SeedKindLabel::AxisDown, SurfaceTopology::Disk),
                    TableSeed::OffAxis { .. } => (SeedKindLabel::OffAxis, SurfaceTopology::CylinderSn1xR),
                };
                let mut r = base_report(p, label, topo, opts);
                r.truncated = Some(e.to_string());
                r
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(n: u32, lambda: f64) -> ModelParams {
        ModelParams::rotational(n, lambda).unwrap()
    }

    #[test]
    fn hyperplane_without_integration() {
        let r = classify_axis_surface(&rot(2, 1.0), -1, &OrbitOptions::default()).unwrap();
        assert_eq!(r.surface_topology, SurfaceTopology::Hyperplane);
        assert!(r.embedded);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"surface_topology\":\"Hyperplane\""));
    }

    #[test]
    fn spiral_disk() {
        let r = classify_axis_surface(&rot(2, 2.0), 1, &OrbitOptions::default()).unwrap();
        assert_eq!(r.surface_topology, SurfaceTopology::Disk);
        assert!(r.embedded);
        assert_eq!(
            r.ends,
            vec![End::ConvergesToCMCCylinder { radius: 0.25, crossing_class: CrossingClass::InfiniteWitnessed }]
        );
    }

    #[test]
    fn equilibrium_seed_is_round_cylinder() {
        let r = classify_offaxis_surface(&rot(2, 2.0), 0.25, &OrbitOptions::default()).unwrap();
        assert_eq!(r.surface_topology, SurfaceTopology::RoundCylinder);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let err = classification_table(&[], TableSeed::Axis { delta: 1 }, &OrbitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyGrid));
    }

    #[test]
    fn invalid_delta() {
        assert!(classify_axis_surface(&rot(2, 2.0), 0, &OrbitOptions::default()).is_err());
    }
}
