use approx::assert_relative_eq;
use hlk_core::cylindrical::{verify_closed_forms, BaseCurveSample, CylCase};
use hlk_core::export::{fmt_f64, read_curve_csv, read_trace_csv, write_curve_csv, write_trace_csv};
use hlk_core::orbits::{integrate_orbit, EventKind, OrbitOptions, OrbitSeed, OrbitTrace, TraceSample};
use hlk_core::phaseplane::{classify_region, equilibrium_analysis, gamma_curve, rhs, PhaseState, Regime};
use hlk_core::polyline::{closest_approach, hausdorff, proper_crossing, self_crossings, Point};
use hlk_core::{special_solutions, ModelParams, PrescribedFunction, Setting};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (2u32..=12, 0.05f64..4.0).prop_map(|(n, l)| ModelParams::rotational(n, l).unwrap())
}

fn eps() -> impl Strategy<Value = i8> {
    prop_oneof![Just(1i8), Just(-1i8)]
}

fn lin(p: &ModelParams) -> PrescribedFunction {
    PrescribedFunction::linear(p)
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

fn point_to_polyline(p: Point, q: &[Point]) -> f64 {
    q.windows(2).map(|w| seg_dist(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
}

fn polyline(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y)| [x, y]), len)
}

proptest! {
    #[test]
    fn nullcline_zeroes_the_second_component(p in params(), e in eps(), y in -0.999f64..0.999) {
        if let Some(g) = gamma_curve(&p, e, y) {
            let (_, dy) = rhs(&p, lin(&p), &PhaseState::new(g, y, e).unwrap());
            let scale = (p.nf() - 1.0) * (1.0 - y * y) / g;
            prop_assert!(dy.abs() <= 1e-12 * scale, "dy = {dy:e}, scale {scale:e}");
        } else {
            prop_assert!(f64::from(e) * (y + p.lambda) <= 0.0);
        }
    }

    #[test]
    fn region_signs_match_the_vector_field(p in params(), e in eps(), x in 1e-3f64..20.0, y in -0.999f64..0.999) {
        let s = PhaseState::new(x, y, e).unwrap();
        let (dx, dy) = rhs(&p, lin(&p), &s);
        let scale = (p.nf() - 1.0) * (1.0 - y * y) / x;
        prop_assume!(y.abs() > 1e-9 && dy.abs() > 1e-9 * scale);
        let r = classify_region(&p, &s);
        let signs = r.label.signs().expect("open region");
        prop_assert_eq!(signs, (dx.signum() as i8, dy.signum() as i8), "{:?}", r.label);
        prop_assert_eq!((r.sign_dx, r.sign_dy), signs);
    }

    #[test]
    fn eigenvalues_are_characteristic_roots(p in params()) {
        let eq = equilibrium_analysis(&p);
        let n = p.nf();
        let c = n * n * p.lambda * p.lambda / (n - 1.0);
        for mu in eq.mu {
            let r = mu * mu + mu * n + c;
            prop_assert!(r.norm() < 1e-12 * (n * n + c), "residual {:e} at {mu}", r.norm());
        }
        prop_assert_eq!(eq.regime == Regime::Spiral, eq.mu[0].im != 0.0);
        prop_assert!(eq.mu.iter().all(|m| m.re < 0.0));
    }

    #[test]
    fn comparison_function_lies_below_linear(y in -1.0f64..=1.0) {
        let one = lin(&ModelParams::rotational(2, 1.0).unwrap());
        let (c, l) = (PrescribedFunction::CosineComparison.value(y), one.value(y));
        if y == -1.0 {
            prop_assert!(c.abs() < 1e-16 && l == 0.0);
        } else {
            prop_assert!(c < l, "{c} >= {l} at y = {y}");
        }
    }

    #[test]
    fn special_solutions_are_exact(n in 2u32..=9, lambda in 0.05f64..4.0, v in 0.05f64..1.0) {
        let p = ModelParams::new(n, lambda, v).unwrap();
        for setting in [Setting::Cylindrical, Setting::Rotational] {
            let q = if setting == Setting::Rotational { ModelParams::rotational(n, lambda).unwrap() } else { p };
            for sol in special_solutions(&q, setting) {
                let r = sol.residual(&q, setting);
                prop_assert!(r.abs() <= 1e-13 * (q.nf() * (1.0 + lambda)), "{sol:?}: {r:e}");
            }
        }
    }

    #[test]
    fn fmt_f64_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = fmt_f64(v).parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }

    #[test]
    fn trace_csv_round_trips(rows in prop::collection::vec(prop::array::uniform4(-1e6f64..1e6), 0..40)) {
        let samples: Vec<TraceSample> =
            rows.iter().map(|r| TraceSample { s: r[0], x: r[1].abs(), z: r[2], theta: r[3] }).collect();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &samples).unwrap();
        prop_assert_eq!(read_trace_csv(&buf[..]).unwrap(), samples);
    }

    #[test]
    fn curve_csv_round_trips(rows in prop::collection::vec(prop::array::uniform5(any::<f64>().prop_filter("finite", |v| v.is_finite())), 0..40)) {
        let samples: Vec<BaseCurveSample> = rows
            .iter()
            .map(|r| BaseCurveSample { s: r[0], x: r[1], z: r[2], theta: r[3], kappa: r[4] })
            .collect();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &samples).unwrap();
        let back = read_curve_csv(&buf[..]).unwrap();
        prop_assert_eq!(back.len(), samples.len());
        for (a, b) in back.iter().zip(&samples) {
            prop_assert_eq!([a.s, a.x, a.z, a.theta, a.kappa].map(f64::to_bits), [b.s, b.x, b.z, b.theta, b.kappa].map(f64::to_bits));
        }
    }

    #[test]
    fn closest_approach_matches_brute_force(a in polyline(2..25), b in polyline(2..25), radius in 0.05f64..3.0) {
        let brute = a
            .windows(2)
            .flat_map(|w| b.windows(2).map(move |u| (w, u)))
            .map(|(w, u)| {
                if proper_crossing(w[0], w[1], u[0], u[1]).is_some() {
                    0.0
                } else {
                    seg_dist(w[0], u[0], u[1]).min(seg_dist(w[1], u[0], u[1])).min(seg_dist(u[0], w[0], w[1])).min(seg_dist(u[1], w[0], w[1]))
                }
            })
            .fold(f64::INFINITY, f64::min);
        let got = closest_approach(&a, &b, radius, |_| false);
        prop_assert!((got - brute.min(radius)).abs() < 1e-12, "{got} vs {brute}");
    }

    #[test]
    fn hausdorff_matches_brute_force(a in polyline(2..25), b in polyline(2..25), radius in 0.05f64..20.0) {
        let dir = |p: &[Point], q: &[Point]| p.iter().map(|&x| point_to_polyline(x, q).min(radius)).fold(0.0, f64::max);
        let brute = dir(&a, &b).max(dir(&b, &a));
        assert_relative_eq!(hausdorff(&a, &b, radius), brute, max_relative = 1e-12);
    }

    #[test]
    fn self_crossings_match_brute_force(pts in polyline(4..30)) {
        let mut brute = 0;
        for i in 0..pts.len() - 1 {
            for j in i + 2..pts.len() - 1 {
                if proper_crossing(pts[i], pts[i + 1], pts[j], pts[j + 1]).is_some() {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(self_crossings(&pts, usize::MAX).len(), brute);
    }
}

fn orbit_opts() -> OrbitOptions {
    OrbitOptions { s_max: 40.0, ..OrbitOptions::default() }
}

fn check_orbit(tr: &OrbitTrace, from_axis: bool) -> Result<(), TestCaseError> {
    let contacts = tr.events_of(EventKind::AxisContact).count() + usize::from(from_axis);
    prop_assert!(contacts <= 1, "two axis contacts");
    for e in tr.events_of(EventKind::CrossY0) {
        prop_assert!(e.y.abs() < 1e-9, "x' = {:e} at a y = 0 crossing", e.y);
    }
    for w in tr.samples.windows(2) {
        let dx = (w[1].x - w[0].x) / (w[1].s - w[0].s);
        let dz = (w[1].z - w[0].z) / (w[1].s - w[0].s);
        prop_assert!((dx * dx + dz * dz - 1.0).abs() < 1e-3);
        let t = w[0].theta;
        prop_assert!(((t.cos().powi(2) + t.sin().powi(2)) - 1.0).abs() < 1e-9);
    }
    // Between consecutive events the phase point stays in one region.
    let p = tr.params();
    let dir = f64::from(tr.direction);
    let stops: Vec<f64> = tr.events.iter().map(|e| e.s).collect();
    let mut current: Option<(usize, _)> = None;
    for smp in &tr.samples {
        let y = smp.y();
        if smp.x <= 0.0 || y.abs() >= 1.0 - 1e-9 || stops.iter().any(|&s| (s - smp.s).abs() < 1e-6) {
            continue;
        }
        let Ok(state) = PhaseState::new(smp.x, y, smp.eps()) else { continue };
        let g = gamma_curve(p, state.eps, y);
        if y.abs() < 1e-9 || g.is_some_and(|g| (smp.x - g).abs() < 1e-9 * g.max(1.0)) {
            continue;
        }
        let slot = stops.iter().filter(|&&s| dir * (smp.s - s) > 0.0).count();
        let label = classify_region(p, &state).label;
        match current {
            Some((k, l)) if k == slot => prop_assert_eq!(l, label, "region changed at s = {} without an event", smp.s),
            _ => current = Some((slot, label)),
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbits_respect_the_structural_invariants(n in 2u32..=8, lambda in 0.3f64..3.0, start in 0usize..4) {
        let p = ModelParams::rotational(n, lambda).unwrap();
        let x_c = p.cylinder_radius();
        let seed = match start {
            0 => OrbitSeed::axis_up(&p),
            1 => OrbitSeed::axis_down(&p),
            2 => OrbitSeed::interior(&p, 0.4 * x_c, 0.0, 1).unwrap(),
            _ => OrbitSeed::interior(&p, 2.5 * x_c, 0.3, -1).unwrap(),
        };
        let tr = integrate_orbit(seed, lin(&p), &orbit_opts()).unwrap();
        check_orbit(&tr, start < 2)?;
    }

    #[test]
    fn closed_forms_agree_with_integration(n in 2u32..=6, v in 0.2f64..1.0, ratio in prop_oneof![0.1f64..0.9, 1.15f64..3.0], zero in any::<bool>()) {
        let p = ModelParams::new(n, ratio * v, v).unwrap();
        let case = match CylCase::auto(&p) {
            CylCase::LambdaLess0 | CylCase::LambdaLessPi if zero => CylCase::LambdaLess0,
            CylCase::LambdaLess0 | CylCase::LambdaLessPi => CylCase::LambdaLessPi,
            c => c,
        };
        let r = verify_closed_forms(&p, case, (-2.0, 2.0), 1e-8).unwrap();
        prop_assert!(r.passes(), "{:?}", r.flagged);
    }
}

#[test]
fn winding_grows_across_the_sink_spiral_boundary() {
    for n in [2u32, 3, 5, 8] {
        let boundary = f64::from(n - 1).sqrt() / 2.0;
        let windings: Vec<(f64, u32)> = (0..12)
            .map(|k| {
                let lambda = boundary * (0.5 + 0.15 * f64::from(k));
                let p = ModelParams::rotational(n, lambda).unwrap();
                let tr = integrate_orbit(OrbitSeed::axis_up(&p), lin(&p), &OrbitOptions::default()).unwrap();
                (lambda, tr.winding)
            })
            .collect();
        assert!(windings.windows(2).all(|w| w[0].1 <= w[1].1), "n = {n}: {windings:?}");
        assert!(windings.iter().filter(|w| w.0 < boundary).all(|w| w.1 == 0), "n = {n}: {windings:?}");
        assert!(windings.last().unwrap().1 > 0, "n = {n}: {windings:?}");
    }
}
