use serde::{Deserialize, Serialize};

use super::{OrbitTrace, ProfileSystem, TraceSample};
use crate::model::{ModelParams, PrescribedFunction};
use crate::polyline::count_self_intersections;

/// Sampling steps above this trigger a precision warning in
/// [`curvature_residual`].
pub const MAX_RESIDUAL_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub params: ModelParams,
    pub prescribed: PrescribedFunction,
    pub samples: Vec<ProfileSample>,
    pub self_intersections: usize,
    /// The intersection count stopped at the cap.
    pub intersections_saturated: bool,
    pub is_graph_over_axis: bool,
}

impl ProfileCurve {
    pub fn min_curvature(&self) -> f64 {
        self.samples.iter().map(|s| s.kappa).fold(f64::INFINITY, f64::min)
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| [s.x, s.z]).collect()
    }
}

/// Builds a profile from samples ordered along the curve.
pub fn profile_from_samples(
    params: &ModelParams,
    f: PrescribedFunction,
    samples: &[TraceSample],
    intersection_cap: usize,
) -> ProfileCurve {
    let sys = ProfileSystem::new(params, f);
    let samples: Vec<ProfileSample> = samples
        .iter()
        .map(|t| ProfileSample { s: t.s, x: t.x, z: t.z, theta: t.theta, kappa: sys.curvature(t.x, t.theta) })
        .collect();
    let pts: Vec<[f64; 2]> = samples.iter().map(|s| [s.x, s.z]).collect();
    let self_intersections = count_self_intersections(&pts, intersection_cap);
    let increasing = samples.windows(2).all(|w| w[1].z > w[0].z);
    let decreasing = samples.windows(2).all(|w| w[1].z < w[0].z);
    ProfileCurve {
        params: *params,
        prescribed: f,
        self_intersections,
        intersections_saturated: self_intersections >= intersection_cap,
        is_graph_over_axis: samples.len() >= 2 && (increasing || decreasing),
        samples,
    }
}

pub fn reconstruct_profile(trace: &OrbitTrace) -> ProfileCurve {
    reconstruct_profile_with_cap(trace, 10_000)
}

pub fn reconstruct_profile_with_cap(trace: &OrbitTrace, cap: usize) -> ProfileCurve {
    profile_from_samples(trace.params(), trace.prescribed, &trace.samples, cap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureResidual {
    pub max_residual: f64,
    /// `s` at which the maximum occurs.
    pub s_at_max: f64,
    pub samples_checked: usize,
    pub warning: Option<String>,
}

/// Mean curvature of the rotational hypersurface computed from three-point
/// finite differences of the sampled `(x(s), z(s))` alone,
/// `H = (x' z'' - x'' z' + (n-1) z'/x) / n`, compared with `h(x')`.
pub fn curvature_residual(profile: &ProfileCurve, p: &ModelParams) -> CurvatureResidual {
    let n = p.nf();
    let mut worst = 0.0f64;
    let mut s_at = f64::NAN;
    let mut max_step = 0.0f64;
    let mut checked = 0;
    for w in profile.samples.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let h1 = b.s - a.s;
        let h2 = c.s - b.s;
        max_step = max_step.max(h1.abs()).max(h2.abs());
        let (dx1, dx2) = ((b.x - a.x) / h1, (c.x - b.x) / h2);
        let (dz1, dz2) = ((b.z - a.z) / h1, (c.z - b.z) / h2);
        let x1 = (h2 * dx1 + h1 * dx2) / (h1 + h2);
        let z1 = (h2 * dz1 + h1 * dz2) / (h1 + h2);
        let x2 = 2.0 * (dx2 - dx1) / (h1 + h2);
        let z2 = 2.0 * (dz2 - dz1) / (h1 + h2);
        let h_fd = (x1 * z2 - x2 * z1 + (n - 1.0) * z1 / b.x) / n;
        let r = (h_fd - profile.prescribed.value(x1.clamp(-1.0, 1.0))).abs();
        checked += 1;
        if !(r <= worst) {
            worst = r;
            s_at = b.s;
        }
    }
    let warning = (max_step > MAX_RESIDUAL_STEP * (1.0 + 1e-9)).then(|| {
        format!("sampling step {max_step:e} exceeds {MAX_RESIDUAL_STEP:e}; finite differences are too coarse for the stated bound")
    });
    CurvatureResidual { max_residual: worst, s_at_max: s_at, samples_checked: checked, warning }
}
