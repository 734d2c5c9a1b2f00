//! The phase plane of rotational profiles.
//!
//! A profile `(x(s), z(s))` with angle function `y = x'` and `eps = sign(z')`
//! projects to an orbit of
//!
//! ```text
//! x' = y
//! y' = (n-1)(1-y^2)/x - n eps h(y) sqrt(1-y^2)
//! ```
//!
//! in the half-strip `(0, inf) x (-1, 1)`, one copy per `eps`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, PrescribedFunction};

/// Distance below which a point is labelled as lying on `y = 0` or on the
/// nullcline.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub eps: i8,
}

impl PhaseState {
    pub fn new(x: f64, y: f64, eps: i8) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) || !(y > -1.0 && y < 1.0) || (eps != 1 && eps != -1) {
            return Err(Error::InvalidParams(format!(
                "phase state ({x}, {y}, {eps}) is outside (0,inf) x (-1,1) x {{-1,1}}"
            )));
        }
        Ok(Self { x, y, eps })
    }
}

/// Right-hand side `(x', y')` of the phase system.
pub fn rhs(p: &ModelParams, f: PrescribedFunction, s: &PhaseState) -> (f64, f64) {
    let n = p.nf();
    let w = 1.0 - s.y * s.y;
    let dy = (n - 1.0) * w / s.x - n * f64::from(s.eps) * f.value(s.y) * w.sqrt();
    (s.y, dy)
}

/// Nullcline of `y'` for an arbitrary prescribed function, where
/// `eps h(y) > 0`.
pub fn nullcline(n: u32, f: PrescribedFunction, eps: i8, y: f64) -> Option<f64> {
    let d = f64::from(eps) * f.value(y);
    if !(d > 0.0) || !(y > -1.0 && y < 1.0) {
        return None;
    }
    let n = f64::from(n);
    Some((n - 1.0) * (1.0 - y * y).sqrt() / (n * d))
}

/// `Gamma_eps(y)` for the linear prescription.
pub fn gamma_curve(p: &ModelParams, eps: i8, y: f64) -> Option<f64> {
    nullcline(p.n, PrescribedFunction::linear(p), eps, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Spiral,
    ImproperNode,
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x0: f64,
    pub mu: [Complex64; 2],
    pub regime: Regime,
    /// Linearisation `[[0, 1], [a, -n]]` at `e0`, row-major.
    pub jacobian: [[f64; 2]; 2],
    /// Solution `P` of `A^T P + P A = -I`; `V = d^T P d` decreases along the
    /// linearised flow.
    pub lyapunov: [[f64; 2]; 2],
}

impl Equilibrium {
    /// Lyapunov quadratic form at `(x, y)` relative to `e0`.
    pub fn lyapunov_value(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.x0;
        let p = &self.lyapunov;
        p[0][0] * dx * dx + 2.0 * p[0][1] * dx * y + p[1][1] * y * y
    }
}

/// The regime is decided by comparing `4 lambda^2` with `n - 1` exactly, so
/// `n = 5, lambda = 1` lands on the improper node.
pub fn regime(p: &ModelParams) -> Regime {
    let lhs = 4.0 * p.lambda * p.lambda;
    let rhs = p.nf() - 1.0;
    if lhs > rhs {
        Regime::Spiral
    } else if lhs == rhs {
        Regime::ImproperNode
    } else {
        Regime::Sink
    }
}

pub fn equilibrium_analysis(p: &ModelParams) -> Equilibrium {
    let n = p.nf();
    let a = -n * n * p.lambda * p.lambda / (n - 1.0);
    let b = -n;
    let reg = regime(p);
    let disc = 1.0 - 4.0 * p.lambda * p.lambda / (n - 1.0);
    let mu = match reg {
        Regime::ImproperNode => [Complex64::new(-0.5 * n, 0.0); 2],
        Regime::Sink => {
            let r = n * disc.sqrt();
            [Complex64::new(0.5 * (-n + r), 0.0), Complex64::new(0.5 * (-n - r), 0.0)]
        }
        Regime::Spiral => {
            let im = 0.5 * n * (-disc).sqrt();
            [Complex64::new(-0.5 * n, im), Complex64::new(-0.5 * n, -im)]
        }
    };
    let q = -1.0 / (2.0 * a);
    let r = (-1.0 - 2.0 * q) / (2.0 * b);
    let pp = -a * r - b * q;
    Equilibrium {
        x0: p.cylinder_radius(),
        mu,
        regime: reg,
        jacobian: [[0.0, 1.0], [a, b]],
        lyapunov: [[pp, q], [q, r]],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    /// `eps = 1`, `lambda >= 1`.
    Lambda1,
    Lambda2,
    Lambda3,
    Lambda4,
    /// `eps = 1`, `lambda < 1`.
    Lambda1Plus,
    Lambda2Plus,
    Lambda3Plus,
    Lambda4Plus,
    /// `eps = -1`, `lambda >= 1`.
    LambdaPlus,
    LambdaMinus,
    /// `eps = -1`, `lambda < 1`.
    Lambda1Minus,
    Lambda2Minus,
    Lambda3Minus,
    OnAxisY0,
    OnGamma,
}

impl RegionLabel {
    pub fn symbol(&self) -> &'static str {
        use RegionLabel::*;
        match self {
            Lambda1 => "Λ1",
            Lambda2 => "Λ2",
            Lambda3 => "Λ3",
            Lambda4 => "Λ4",
            Lambda1Plus => "Λ1⁺",
            Lambda2Plus => "Λ2⁺",
            Lambda3Plus => "Λ3⁺",
            Lambda4Plus => "Λ4⁺",
            LambdaPlus => "Λ+",
            LambdaMinus => "Λ−",
            Lambda1Minus => "Λ1⁻",
            Lambda2Minus => "Λ2⁻",
            Lambda3Minus => "Λ3⁻",
            OnAxisY0 => "y=0",
            OnGamma => "Γ",
        }
    }

    /// Signs of `(x', y')` throughout the open region; `None` on boundaries.
    pub fn signs(&self) -> Option<(i8, i8)> {
        use RegionLabel::*;
        Some(match self {
            Lambda1 | Lambda1Plus => (1, -1),
            Lambda2 | Lambda2Plus => (-1, -1),
            Lambda3 | Lambda3Plus => (-1, 1),
            Lambda4 | Lambda4Plus => (1, 1),
            LambdaPlus | Lambda1Minus => (1, 1),
            LambdaMinus | Lambda2Minus => (-1, 1),
            Lambda3Minus => (-1, -1),
            OnAxisY0 | OnGamma => return None,
        })
    }

    /// Open regions of `Theta_eps` for the given parameters.
    pub fn layout(p: &ModelParams, eps: i8) -> &'static [RegionLabel] {
        use RegionLabel::*;
        match (eps > 0, p.lambda >= 1.0) {
            (true, true) => &[Lambda1, Lambda2, Lambda3, Lambda4],
            (true, false) => &[Lambda1Plus, Lambda2Plus, Lambda3Plus, Lambda4Plus],
            (false, true) => &[LambdaPlus, LambdaMinus],
            (false, false) => &[Lambda1Minus, Lambda2Minus, Lambda3Minus],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub label: RegionLabel,
    pub sign_dx: i8,
    pub sign_dy: i8,
}

impl Region {
    fn open(label: RegionLabel) -> Self {
        let (sign_dx, sign_dy) = label.signs().unwrap_or((0, 0));
        Self { label, sign_dx, sign_dy }
    }
}

/// Region of `Theta_eps` containing `s`, decided by `sign(y)` and the side of
/// the nullcline.
pub fn classify_region(p: &ModelParams, s: &PhaseState) -> Region {
    use RegionLabel::*;
    let gamma = gamma_curve(p, s.eps, s.y);
    if let Some(g) = gamma {
        if (s.x - g).abs() <= BOUNDARY_TOL * g.max(1.0) {
            let sign_dx = if s.y.abs() <= BOUNDARY_TOL { 0 } else { s.y.signum() as i8 };
            return Region { label: OnGamma, sign_dx, sign_dy: 0 };
        }
    }
    if s.y.abs() <= BOUNDARY_TOL {
        let (_, dy) = rhs(p, PrescribedFunction::linear(p), s);
        return Region { label: OnAxisY0, sign_dx: 0, sign_dy: dy.signum() as i8 };
    }
    let up = s.y > 0.0;
    let outside = gamma.map(|g| s.x > g);
    let label = match (s.eps > 0, p.lambda >= 1.0) {
        (true, big) => {
            // Where Gamma_1 is absent (y <= -lambda < 0) the point lies on the
            // inner side.
            let outside = outside.unwrap_or(false);
            let idx = match (up, outside) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            if big {
                [Lambda1, Lambda2, Lambda3, Lambda4][idx]
            } else {
                [Lambda1Plus, Lambda2Plus, Lambda3Plus, Lambda4Plus][idx]
            }
        }
        (false, true) => {
            if up {
                LambdaPlus
            } else {
                LambdaMinus
            }
        }
        (false, false) => match (up, outside) {
            (true, _) => Lambda1Minus,
            (false, Some(true)) => Lambda3Minus,
            (false, _) => Lambda2Minus,
        },
    };
    Region::open(label)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSummary {
    pub x0: f64,
    pub mu: [[f64; 2]; 2],
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub params: ModelParams,
    pub eps: i8,
    pub regions: Vec<Region>,
    pub gamma_polyline: Vec<[f64; 2]>,
    pub equilibrium: EquilibriumSummary,
}

/// Regions, nullcline samples on `m` interior points of `(-1, 1)` and the
/// equilibrium summary for `Theta_eps`.
pub fn portrait(p: &ModelParams, eps: i8, m: usize) -> Portrait {
    let regions = RegionLabel::layout(p, eps).iter().map(|&l| Region::open(l)).collect();
    let gamma_polyline = (1..=m)
        .filter_map(|k| {
            let y = -1.0 + 2.0 * k as f64 / (m + 1) as f64;
            gamma_curve(p, eps, y).map(|x| [x, y])
        })
        .collect();
    let e = equilibrium_analysis(p);
    Portrait {
        params: *p,
        eps,
        regions,
        gamma_polyline,
        equilibrium: EquilibriumSummary {
            x0: e.x0,
            mu: [[e.mu[0].re, e.mu[0].im], [e.mu[1].re, e.mu[1].im]],
            regime: e.regime,
        },
    }
}
