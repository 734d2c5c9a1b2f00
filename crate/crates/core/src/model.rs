//! Problem parameters, the prescribed mean curvature function and the exact
//! invariant solutions that serve as baselines for everything numerical.
//!
//! Throughout, `y` is the vertical component of the unit normal (for a
//! rotational profile this is the angle function `x'`), and the linear
//! prescription is `h(y) = y + lambda` with the density vector normalised to
//! unit length.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One problem instance: dimension, prescribed constant and the relevant
/// component of the density vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    pub lambda: f64,
    pub v_last: f64,
}

impl ModelParams {
    pub fn new(n: u32, lambda: f64, v_last: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("dimension n must be >= 2, got {n}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParams("lambda must be finite".into()));
        }
        if lambda == 0.0 {
            return Err(Error::InvalidParams(
                "lambda = 0 describes translating solitons, which are out of scope".into(),
            ));
        }
        if lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be positive (flip the orientation for lambda < 0), got {lambda}"
            )));
        }
        if !v_last.is_finite() || v_last.abs() > 1.0 {
            return Err(Error::InvalidParams(format!("|v_last| must be <= 1, got {v_last}")));
        }
        Ok(Self { n, lambda, v_last })
    }

    /// Rotational setting: the density vector is the rotation axis, `v = e_{n+1}`.
    pub fn rotational(n: u32, lambda: f64) -> Result<Self> {
        Self::new(n, lambda, 1.0)
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Radius `(n-1)/(lambda n)` of the CMC cylinder, i.e. the x-coordinate of
    /// the phase-plane equilibrium.
    pub fn cylinder_radius(&self) -> f64 {
        (self.nf() - 1.0) / (self.lambda * self.nf())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrescribedFunction {
    /// `h(y) = y + lambda`.
    Linear { lambda: f64 },
    /// `h(y) = cos(pi y / 2) / 2`, the even comparison function used for
    /// `lambda = 1`.
    CosineComparison,
}

impl PrescribedFunction {
    pub fn linear(p: &ModelParams) -> Self {
        Self::Linear { lambda: p.lambda }
    }

    /// Evaluates without a domain check; callers guarantee `|y| <= 1`.
    #[inline]
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            Self::Linear { lambda } => y + lambda,
            Self::CosineComparison => 0.5 * (0.5 * PI * y).cos(),
        }
    }

    pub fn is_even(&self) -> bool {
        matches!(self, Self::CosineComparison)
    }
}

/// `h(y)` for `y` in `[-1, 1]`.
pub fn eval_prescribed(f: PrescribedFunction, y: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::Domain { value: y });
    }
    Ok(f.value(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Cylindrical,
    Rotational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Unit normal `-e_{n+1}`.
    Downward,
    Upward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecialSolution {
    Hyperplane { orientation: Orientation },
    RoundCylinder { radius: f64 },
    StraightLineBase { theta0: f64 },
    CircleBase { radius: f64 },
}

impl SpecialSolution {
    /// Residual of the defining curvature relation when the exact data of the
    /// solution is substituted into it.
    ///
    /// Cylindrical: `kappa - n (v cos(theta) + lambda)`.
    /// Rotational: `kappa + (n-1) z'/x - n (x' + lambda)`.
    pub fn residual(&self, p: &ModelParams, setting: Setting) -> f64 {
        let n = p.nf();
        match (*self, setting) {
            (Self::StraightLineBase { theta0 }, Setting::Cylindrical) => 0.0 - n * (p.v_last * theta0.cos() + p.lambda),
            (Self::CircleBase { radius }, Setting::Cylindrical) => {
                // Only produced for v_last = 0, where the relation reduces to
                // kappa = lambda n.
                1.0 / radius - n * p.lambda
            }
            (Self::Hyperplane { orientation }, Setting::Rotational) => {
                // Profile z = const traversed towards the axis (x' = -1) has
                // normal -e_{n+1}; traversed away from it, +e_{n+1}.
                let dx = match orientation {
                    Orientation::Downward => -1.0,
                    Orientation::Upward => 1.0,
                };
                0.0 + 0.0 - n * (dx + p.lambda)
            }
            (Self::RoundCylinder { radius }, Setting::Rotational) => {
                // x = radius, z = s: kappa = 0, x' = 0, z' = 1.
                0.0 + (n - 1.0) / radius - n * (0.0 + p.lambda)
            }
            (Self::Hyperplane { orientation }, Setting::Cylindrical) => {
                let y = match orientation {
                    Orientation::Downward => -1.0,
                    Orientation::Upward => 1.0,
                };
                0.0 - n * (p.v_last * y + p.lambda)
            }
            (Self::RoundCylinder { radius }, Setting::Cylindrical) => 1.0 / radius - n * p.lambda,
            (Self::StraightLineBase { .. } | Self::CircleBase { .. }, Setting::Rotational) => f64::NAN,
        }
    }
}

/// Every exact invariant solution for the given setting.
pub fn special_solutions(p: &ModelParams, setting: Setting) -> Vec<SpecialSolution> {
    let mut out = Vec::new();
    match setting {
        Setting::Cylindrical => {
            if p.v_last == 0.0 {
                // Rulings parallel to the density vector: constant curvature lambda n.
                out.push(SpecialSolution::CircleBase { radius: 1.0 / (p.lambda * p.nf()) });
                return out;
            }
            let c = -p.lambda / p.v_last;
            if c.abs() <= 1.0 {
                let theta0 = c.acos();
                out.push(SpecialSolution::StraightLineBase { theta0 });
                if theta0 != 0.0 && theta0 != PI {
                    out.push(SpecialSolution::StraightLineBase { theta0: -theta0 });
                }
            }
        }
        Setting::Rotational => {
            out.push(SpecialSolution::RoundCylinder { radius: p.cylinder_radius() });
            if p.lambda == 1.0 {
                out.push(SpecialSolution::Hyperplane { orientation: Orientation::Downward });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 1.0, 1.0).is_err());
        assert!(ModelParams::new(2, -1.0, 1.0).is_err());
        assert!(ModelParams::new(2, 1.0, 1.5).is_err());
        let err = ModelParams::new(3, 0.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("translating solitons"));
        assert!(ModelParams::new(2, 0.5, -1.0).is_ok());
    }

    #[test]
    fn prescribed_values() {
        let lin = PrescribedFunction::Linear { lambda: 2.0 };
        assert_eq!(eval_prescribed(lin, 0.0).unwrap(), 2.0);
        let cos = PrescribedFunction::CosineComparison;
        assert!(eval_prescribed(cos, -1.0).unwrap().abs() < 1e-16);
        assert!(eval_prescribed(cos, 1.0).unwrap().abs() < 1e-16);
        assert_eq!(eval_prescribed(cos, 0.0).unwrap(), 0.5);
        assert!(matches!(eval_prescribed(cos, 1.01), Err(Error::Domain { .. })));
    }

    #[test]
    fn cosine_is_dominated_by_linear_one() {
        let lin = PrescribedFunction::Linear { lambda: 1.0 };
        let cos = PrescribedFunction::CosineComparison;
        let m = 10_000;
        for i in 0..=m {
            let y = -1.0 + 2.0 * i as f64 / m as f64;
            let (c, l) = (cos.value(y), lin.value(y));
            assert!(c >= 0.0);
            assert!((c - cos.value(-y)).abs() < 1e-15);
            if i == 0 {
                assert!((c - l).abs() < 1e-15);
            } else {
                assert!(c < l, "y = {y}: {c} >= {l}");
            }
        }
    }

    #[test]
    fn rotational_special_solutions() {
        let p = ModelParams::rotational(2, 2.0).unwrap();
        let sols = special_solutions(&p, Setting::Rotational);
        assert!(sols.contains(&SpecialSolution::RoundCylinder { radius: 0.25 }));
        assert_eq!(sols.len(), 1);

        let p1 = ModelParams::rotational(4, 1.0).unwrap();
        let sols = special_solutions(&p1, Setting::Rotational);
        assert!(sols.contains(&SpecialSolution::Hyperplane { orientation: Orientation::Downward }));
        for s in &sols {
            assert!(s.residual(&p1, Setting::Rotational).abs() < 1e-14);
        }
        assert_ne!(
            SpecialSolution::Hyperplane { orientation: Orientation::Upward }.residual(&p1, Setting::Rotational),
            0.0
        );
    }

    #[test]
    fn cylindrical_special_solutions() {
        let p = ModelParams::new(2, 1.0, 1.0).unwrap();
        let sols = special_solutions(&p, Setting::Cylindrical);
        assert_eq!(sols, vec![SpecialSolution::StraightLineBase { theta0: PI }]);

        let p = ModelParams::new(2, 2.0, 1.0).unwrap();
        assert!(special_solutions(&p, Setting::Cylindrical).is_empty());

        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let sols = special_solutions(&p, Setting::Cylindrical);
        assert_eq!(sols.len(), 2);
        for s in &sols {
            assert!(s.residual(&p, Setting::Cylindrical).abs() < 1e-14);
        }

        let p = ModelParams::new(3, 0.5, 0.0).unwrap();
        let sols = special_solutions(&p, Setting::Cylindrical);
        assert_eq!(sols, vec![SpecialSolution::CircleBase { radius: 1.0 / 1.5 }]);
        assert!(sols[0].residual(&p, Setting::Cylindrical).abs() < 1e-14);
    }
}
