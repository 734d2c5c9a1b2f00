//! Orbits of the even comparison function `cos(pi y / 2) / 2`, which close up
//! symmetrically about `y = 0`.

use serde::{Deserialize, Serialize};

use super::{integrate_orbit, Direction, EventKind, OrbitOptions, OrbitSeed};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PrescribedFunction};
use crate::phaseplane::nullcline;
use crate::polyline::hausdorff;

pub const CLOSURE_TOL: f64 = 1e-6;
pub const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub x0_star: f64,
    pub center: f64,
    pub degenerate: bool,
    pub closure_gap: f64,
    pub hausdorff: f64,
    pub avoids_poles: bool,
    pub period: f64,
}

impl ComparisonReport {
    pub fn passes(&self) -> bool {
        self.degenerate || (self.closure_gap < CLOSURE_TOL && self.hausdorff < SYMMETRY_TOL && self.avoids_poles)
    }
}

/// Runs the comparison orbit through `(x0_star, 0)` in `Theta_1` for one
/// full revolution.
pub fn comparison_orbit_report(p: &ModelParams, x0_star: f64) -> Result<ComparisonReport> {
    if p.lambda != 1.0 {
        return Err(Error::InvalidParams(format!("the comparison orbit is defined for lambda = 1, got {}", p.lambda)));
    }
    if !(x0_star > 0.0) {
        return Err(Error::InvalidParams(format!("x0_star must be positive, got {x0_star}")));
    }
    let f = PrescribedFunction::CosineComparison;
    let center = nullcline(p.n, f, 1, 0.0).expect("h(0) > 0");
    if (x0_star - center).abs() <= 1e-12 * center {
        return Ok(ComparisonReport {
            x0_star,
            center,
            degenerate: true,
            closure_gap: 0.0,
            hausdorff: 0.0,
            avoids_poles: true,
            period: 0.0,
        });
    }
    let opts = OrbitOptions {
        sample_step: 1e-4,
        s_max: 200.0,
        stop_after_y0_crossings: Some(2),
        direction: Direction::Forward,
        ..OrbitOptions::default()
    };
    let trace = integrate_orbit(OrbitSeed::interior(p, x0_star, 0.0, 1)?, f, &opts)?;
    let crossings: Vec<_> = trace.events_of(EventKind::CrossY0).copied().collect();
    let avoids_poles =
        trace.events.iter().all(|e| !matches!(e.kind, EventKind::TurnAtYPlus1 | EventKind::TurnAtYMinus1));
    if crossings.len() < 2 {
        return Ok(ComparisonReport {
            x0_star,
            center,
            degenerate: false,
            closure_gap: f64::INFINITY,
            hausdorff: f64::INFINITY,
            avoids_poles,
            period: f64::NAN,
        });
    }
    let (c1, c2) = (crossings[0], crossings[1]);
    let closure_gap = (c2.x - x0_star).hypot(c2.y);
    let mut first = vec![[x0_star, 0.0]];
    let mut second = vec![[c1.x, c1.y]];
    for smp in &trace.samples[1..] {
        if smp.s < c1.s {
            first.push([smp.x, smp.y()]);
        } else if smp.s < c2.s {
            second.push([smp.x, -smp.y()]);
        }
    }
    first.push([c1.x, c1.y]);
    second.push([c2.x, -c2.y]);
    Ok(ComparisonReport {
        x0_star,
        center,
        degenerate: false,
        closure_gap,
        hausdorff: hausdorff(&first, &second, 1.0),
        avoids_poles,
        period: c2.s,
    })
}

/// True when the comparison orbit through `(x0_star, 0)` closes, is
/// symmetric under `y -> -y` and never reaches `y = +-1`.
pub fn comparison_orbit_check(p: &ModelParams, x0_star: f64) -> Result<bool> {
    Ok(comparison_orbit_report(p, x0_star)?.passes())
}
