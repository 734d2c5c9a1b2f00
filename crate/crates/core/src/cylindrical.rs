//! Base curves of cylindrical flat hypersurfaces `alpha x R^{n-1}`.
//!
//! An arc-length base curve `(x(s), z(s))` with tangent angle `theta(s)`
//! satisfies
//!
//! ```text
//! x' = cos(theta),  z' = sin(theta),  theta' = n (v cos(theta) + lambda)
//! ```
//!
//! where `v` is the component of the density vector normal to the rulings.
//! The angle equation separates, which gives the closed forms implemented in
//! [`theta_closed_form`] and [`base_curve_closed_form`]; the numerical
//! integration of the full system is the independent route they are checked
//! against in [`verify_closed_forms`].
//!
//! Closed forms are written for `v > 0`. For `v < 0` the half-turn
//! `(x, z, theta) -> (-x, -z, theta + pi)` maps solutions for `|v|` onto
//! solutions for `v`, and is applied automatically. `v = 0` gives circles of
//! radius `1/(lambda n)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, LastGoodState, Result};
use crate::model::ModelParams;
use crate::ode::{Dopri5, OdeSystem};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylCase {
    /// `lambda > |v|`: periodic angle, translating loops.
    LambdaGreater,
    /// `lambda = |v|`, non-linear branch through `theta(0) = 0`.
    LambdaEqual,
    /// `lambda < |v|`, branch through `theta(0) = 0`.
    LambdaLess0,
    /// `lambda < |v|`, branch through `theta(0) = pi`.
    LambdaLessPi,
}

impl CylCase {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LambdaGreater => "lambda_greater",
            Self::LambdaEqual => "lambda_equal",
            Self::LambdaLess0 => "lambda_less_0",
            Self::LambdaLessPi => "lambda_less_pi",
        }
    }

    /// The case selected by `sign(lambda - |v|)`; in the `<` regime the
    /// `theta(0) = 0` branch is chosen.
    pub fn auto(p: &ModelParams) -> Self {
        let v = p.v_last.abs();
        if p.lambda > v {
            Self::LambdaGreater
        } else if p.lambda == v {
            Self::LambdaEqual
        } else {
            Self::LambdaLess0
        }
    }

    pub fn check(&self, p: &ModelParams) -> Result<()> {
        let v = p.v_last.abs();
        let ok = match self {
            Self::LambdaGreater => p.lambda > v,
            Self::LambdaEqual => p.lambda == v,
            Self::LambdaLess0 | Self::LambdaLessPi => p.lambda < v,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCase { case: self.name(), lambda: p.lambda, v_last: p.v_last })
        }
    }

    /// `theta(0)` of the closed form for these parameters (includes the half
    /// turn for `v < 0`).
    pub fn initial_theta(&self, p: &ModelParams) -> f64 {
        let base = match self {
            Self::LambdaLessPi => PI,
            _ => 0.0,
        };
        if p.v_last < 0.0 {
            base + PI
        } else {
            base
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseCurveSample {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub kappa: f64,
}

/// `(x, z, theta)` of the closed form for `v = |v_last| > 0`, before the
/// half-turn for negative `v_last`.
fn closed_form_positive(n: f64, lambda: f64, v: f64, case: CylCase, s: f64) -> (f64, f64, f64) {
    match case {
        CylCase::LambdaGreater if v == 0.0 => {
            let w = n * lambda;
            ((w * s).sin() / w, -(w * s).cos() / w, w * s)
        }
        CylCase::LambdaGreater => {
            let omega = n * (lambda * lambda - v * v).sqrt();
            let k = ((lambda + v) / (lambda - v)).sqrt();
            // Continuous branch of 2 arctan(k tan(omega s / 2)).
            let phi = 0.5 * omega * s;
            let j = (phi / PI).round();
            let psi = phi - j * PI;
            let theta = 2.0 * (k * psi.sin()).atan2(psi.cos()) + 2.0 * PI * j;
            let x = (theta / n - lambda * s) / v;
            let z = (lambda - v * (omega * s).cos()).ln() / (n * v);
            (x, z, theta)
        }
        CylCase::LambdaEqual => {
            let a = n * v * s;
            let theta = 2.0 * a.atan();
            let x = -s + 2.0 / (n * v) * a.atan();
            let z = (1.0 + a * a).ln() / (n * v);
            (x, z, theta)
        }
        CylCase::LambdaLess0 => {
            let omega = n * (v * v - lambda * lambda).sqrt();
            let k = ((v + lambda) / (v - lambda)).sqrt();
            let theta = 2.0 * (k * (0.5 * omega * s).tanh()).atan();
            let x = (theta / n - lambda * s) / v;
            let z = (v * (omega * s).cosh() - lambda).ln() / (n * v);
            (x, z, theta)
        }
        CylCase::LambdaLessPi => {
            let omega = n * (v * v - lambda * lambda).sqrt();
            let m = ((v - lambda) / (v + lambda)).sqrt();
            let a = (m * (0.5 * omega * s).tanh()).atan();
            let theta = PI - 2.0 * a;
            let x = -lambda * s / v - 2.0 / (n * v) * a;
            let z = (lambda + v * (omega * s).cosh()).ln() / (n * v);
            (x, z, theta)
        }
    }
}

/// `theta(s)` for the given case, continuous in `s`.
pub fn theta_closed_form(p: &ModelParams, case: CylCase, s: f64) -> Result<f64> {
    Ok(base_curve_closed_form(p, case, s)?.theta)
}

/// Closed-form base curve sample. `x(0) = 0`; `z` is the explicit formula
/// (defined up to a vertical translation).
pub fn base_curve_closed_form(p: &ModelParams, case: CylCase, s: f64) -> Result<BaseCurveSample> {
    case.check(p)?;
    let n = p.nf();
    let (x, z, theta) = closed_form_positive(n, p.lambda, p.v_last.abs(), case, s);
    let (x, z, theta) = if p.v_last < 0.0 { (-x, -z, theta + PI) } else { (x, z, theta) };
    let kappa = n * (p.v_last * theta.cos() + p.lambda);
    Ok(BaseCurveSample { s, x, z, theta, kappa })
}

/// The x and z coordinates exactly as they are usually printed for `v = 1`
/// (including the `n/2` coefficient in the `lambda = v` case and the
/// reciprocal square root in the `theta(0) = pi` case). Used only to report
/// how far those expressions sit from the integrated curve.
pub fn printed_coordinates(p: &ModelParams, case: CylCase, s: f64) -> Result<(f64, f64)> {
    case.check(p)?;
    let n = p.nf();
    let (lambda, v) = (p.lambda, p.v_last.abs());
    Ok(match case {
        CylCase::LambdaGreater => {
            let omega = n * (lambda * lambda - v * v).sqrt();
            let theta = closed_form_positive(n, lambda, v, case, s).2;
            (-lambda * s + theta / n, (lambda - (omega * s).cos()).ln() / n)
        }
        CylCase::LambdaEqual => (-s + 0.5 * n * (n * s).atan(), (1.0 + n * n * s * s).ln() / n),
        CylCase::LambdaLess0 | CylCase::LambdaLessPi => {
            let omega = n * (v * v - lambda * lambda).sqrt();
            let k = ((v + lambda) / (v - lambda)).sqrt();
            let a = 2.0 / (n * v) * (k * (0.5 * omega * s).tanh()).atan();
            if case == CylCase::LambdaLess0 {
                (-lambda * s + a, (-lambda + (omega * s).cosh()).ln() / (n * v))
            } else {
                (-lambda * s - a, (lambda + (omega * s).cosh()).ln() / (n * v))
            }
        }
    })
}

/// Period of `z` (and of `theta` modulo `2 pi`) in the `lambda > |v|` case.
pub fn period(p: &ModelParams) -> Option<f64> {
    let v = p.v_last.abs();
    (p.lambda > v).then(|| 2.0 * PI / (p.nf() * (p.lambda * p.lambda - v * v).sqrt()))
}

struct AngleSystem {
    n: f64,
    lambda: f64,
    v: f64,
}

impl OdeSystem<3> for AngleSystem {
    fn rhs(&self, _s: f64, y: &[f64; 3]) -> [f64; 3] {
        let (sn, cs) = y[2].sin_cos();
        [cs, sn, self.n * (self.v * cs + self.lambda)]
    }
}

fn run_direction(
    sys: &AngleSystem,
    theta0: f64,
    end: f64,
    tol: f64,
    step: f64,
    out: &mut Vec<BaseCurveSample>,
) -> Result<()> {
    let mut st = Dopri5::new(sys, 0.0, [0.0, 0.0, theta0], tol, step);
    let count = (end.abs() / step).ceil() as usize;
    for k in 1..=count {
        let s = (end.signum() * k as f64 * step).clamp(end.min(0.0), end.max(0.0));
        st.advance_to(s)
            .map_err(|e| Error::StepFailure(LastGoodState { s: e.t, x: e.y[0], z: e.y[1], theta: e.y[2] }))?;
        let [x, z, theta] = *st.y();
        out.push(BaseCurveSample { s, x, z, theta, kappa: st.dy()[2] });
    }
    Ok(())
}

/// Integrates the base-curve system from `(0, 0, theta0)` at `s = 0` over
/// `span`, which must contain 0. Samples are spaced by `step` and sorted by
/// `s`; every accepted step has local error below `tol`.
pub fn integrate_base_curve(
    p: &ModelParams,
    theta0: f64,
    span: (f64, f64),
    tol: f64,
    step: f64,
) -> Result<Vec<BaseCurveSample>> {
    if !(tol > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParams("tol and step must be positive".into()));
    }
    let (a, b) = span;
    if !(a <= 0.0 && b >= 0.0) {
        return Err(Error::InvalidParams(format!("span ({a}, {b}) must contain s = 0")));
    }
    let sys = AngleSystem { n: p.nf(), lambda: p.lambda, v: p.v_last };
    let mut back = Vec::new();
    if a < 0.0 {
        run_direction(&sys, theta0, a, tol, step, &mut back)?;
    }
    let mut out: Vec<BaseCurveSample> = back.into_iter().rev().collect();
    out.push(BaseCurveSample { s: 0.0, x: 0.0, z: 0.0, theta: theta0, kappa: sys.rhs(0.0, &[0.0, 0.0, theta0])[2] });
    if b > 0.0 {
        run_direction(&sys, theta0, b, tol, step, &mut out)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: CylCase,
    pub params: ModelParams,
    pub s_span: (f64, f64),
    pub tol: f64,
    pub samples: usize,
    pub max_dx: f64,
    pub max_dz: f64,
    pub max_dtheta: f64,
    /// Coordinates whose deviation from the closed form exceeds `tol`.
    pub flagged: Vec<String>,
    pub printed_max_dx: f64,
    pub printed_max_dz: f64,
    /// Coefficient of the arctan term in `x(s)` for the `lambda = v` case.
    pub x_coefficient: Option<f64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passes(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// Integrates from the case's initial angle and compares every sample with
/// the closed forms. `z` is aligned at `s = 0` on both sides. The printed
/// variants are compared as well and reported as notes when they deviate.
pub fn verify_closed_forms(p: &ModelParams, case: CylCase, span: (f64, f64), tol: f64) -> Result<VerificationReport> {
    case.check(p)?;
    let integration_tol = tol.min(DEFAULT_TOL);
    let samples = integrate_base_curve(p, case.initial_theta(p), span, integration_tol, DEFAULT_SAMPLE_STEP)?;
    let z0 = base_curve_closed_form(p, case, 0.0)?.z;
    let printed_z0 = printed_coordinates(p, case, 0.0)?.1;
    let (mut dx, mut dz, mut dth, mut pdx, mut pdz) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for smp in &samples {
        let cf = base_curve_closed_form(p, case, smp.s)?;
        dx = dx.max((cf.x - smp.x).abs());
        dz = dz.max((cf.z - z0 - smp.z).abs());
        dth = dth.max((cf.theta - smp.theta).abs());
        let (px, pz) = printed_coordinates(p, case, smp.s)?;
        pdx = pdx.max((px - smp.x).abs());
        pdz = pdz.max((pz - printed_z0 - smp.z).abs());
    }
    let mut flagged = Vec::new();
    for (name, d) in [("x", dx), ("z", dz), ("theta", dth)] {
        if !(d <= tol) {
            flagged.push(name.to_string());
        }
    }
    let mut notes = Vec::new();
    let x_coefficient = (case == CylCase::LambdaEqual).then(|| 2.0 / (p.nf() * p.v_last.abs()));
    if let Some(c) = x_coefficient {
        notes.push(format!(
            "x(s) = -s + c arctan(n v s) with c = 2/(n v) = {c}; the n/2 form gives c = {}",
            p.nf() / 2.0
        ));
    }
    if pdx > tol {
        notes.push(format!("printed x(s) deviates from the integrated curve by {pdx:e}"));
    }
    if pdz > tol {
        notes.push(format!("printed z(s) deviates from the integrated curve by {pdz:e}"));
    }
    Ok(VerificationReport {
        case,
        params: *p,
        s_span: span,
        tol,
        samples: samples.len(),
        max_dx: dx,
        max_dz: dz,
        max_dtheta: dth,
        flagged,
        printed_max_dx: pdx,
        printed_max_dz: pdz,
        x_coefficient,
        notes,
    })
}

/// Samples the closed form on the uniform grid `s = a + k step`.
pub fn sample_closed_form(p: &ModelParams, case: CylCase, span: (f64, f64), step: f64) -> Result<Vec<BaseCurveSample>> {
    case.check(p)?;
    let count = ((span.1 - span.0) / step).round() as usize;
    (0..=count).map(|k| base_curve_closed_form(p, case, span.0 + k as f64 * step)).collect()
}
