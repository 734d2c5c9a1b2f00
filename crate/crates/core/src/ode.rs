//! Dormand–Prince 5(4) stepper with local-error control.
//!
//! Callers drive the stepper towards explicit output abscissae with
//! [`Dopri5::advance_to`], which always lands exactly on the target. Sampled
//! output therefore consists of integrator states rather than interpolants,
//! which keeps finite differences of the samples smooth.

/// Autonomous or non-autonomous first-order system `y' = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUnderflow<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// One explicit Dormand–Prince step of size `h` from `(t, y)` without error
/// control. Returns the fifth-order solution.
pub fn single_step<S: OdeSystem<N>, const N: usize>(sys: &S, t: f64, y: &[f64; N], h: f64) -> [f64; N] {
    let k1 = sys.rhs(t, y);
    stages(sys, t, y, h, &k1).0
}

fn stages<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    h: f64,
    k1: &[f64; N],
) -> ([f64; N], [f64; N], [f64; N]) {
    let k2 = sys.rhs(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = sys.rhs(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = sys.rhs(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = sys.rhs(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, k7, err)
}

/// Adaptive stepper. The step sign follows the direction of the last target.
pub struct Dopri5<'a, S, const N: usize> {
    sys: &'a S,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    tol: f64,
    h_max: f64,
    steps: u64,
}

impl<'a, S: OdeSystem<N>, const N: usize> Dopri5<'a, S, N> {
    /// `tol` bounds the mixed absolute/relative local error of every accepted
    /// step; `h_max` caps the step length.
    pub fn new(sys: &'a S, t0: f64, y0: [f64; N], tol: f64, h_max: f64) -> Self {
        let k1 = sys.rhs(t0, &y0);
        Self { sys, t: t0, y: y0, k1, h: h_max.min(1e-3), tol, h_max, steps: 0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Derivative at the current state (first stage of the next step).
    pub fn dy(&self) -> &[f64; N] {
        &self.k1
    }

    pub fn accepted_steps(&self) -> u64 {
        self.steps
    }

    fn error_norm(&self, y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..N {
            let sc = self.tol + self.tol * self.y[i].abs().max(y_new[i].abs());
            m = m.max((err[i] / sc).abs());
        }
        m
    }

    /// Advances to exactly `target`, taking as many accepted steps as needed.
    pub fn advance_to(&mut self, target: f64) -> Result<(), StepUnderflow<N>> {
        let dir = if target >= self.t { 1.0 } else { -1.0 };
        let mut h = self.h.abs().min(self.h_max);
        while self.t != target {
            let remaining = (target - self.t).abs();
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            let h_min = 1e-14 * self.t.abs().max(1.0);
            if h_try < h_min && !last {
                return Err(StepUnderflow { t: self.t, y: self.y });
            }
            let (y_new, k7, err) = stages(self.sys, self.t, &self.y, dir * h_try, &self.k1);
            let e = self.error_norm(&y_new, &err);
            if e.is_finite() && e <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
                self.t = if last { target } else { self.t + dir * h_try };
                self.y = y_new;
                self.k1 = k7;
                self.steps += 1;
                // A truncated final step says nothing about the working step size.
                if !last {
                    let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (h_try * fac).min(self.h_max);
                }
            } else {
                let fac = if e.is_finite() { (0.9 * e.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
                h = h_try * fac;
                if h < h_min {
                    return Err(StepUnderflow { t: self.t, y: self.y });
                }
            }
        }
        self.h = h;
        Ok(())
    }
}

/// Adaptive integration from `(t0, y0)` to `t1`, returning the final state.
pub fn integrate_span<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: f64,
) -> Result<[f64; N], StepUnderflow<N>> {
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(y0);
    }
    let mut st = Dopri5::new(sys, t0, y0, tol, span);
    st.h = span;
    st.advance_to(t1)?;
    Ok(st.y)
}
