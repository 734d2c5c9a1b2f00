use std::io::Write;
use std::path::Path;

use hlk_core::classify::{classification_table, classify_axis_surface, classify_offaxis_surface, TableSeed};
use hlk_core::cylindrical::{integrate_base_curve, verify_closed_forms, CylCase};
use hlk_core::export::{event_log, read_columns, revolve, write_curve_csv, write_obj, write_trace_csv};
use hlk_core::orbits::{integrate_orbit, Direction, OrbitSeed};
use hlk_core::{ModelParams, PrescribedFunction};
use serde::Serialize;

use crate::{model, CaseArg, ClassifyArgs, CylinderArgs, DirectionArg, Failure, MeshArgs, PrescribedArg, TraceArgs};

const DEFAULT_GRID_N: [u32; 4] = [2, 3, 4, 5];
const DEFAULT_GRID_LAMBDA: [f64; 3] = [0.5, 1.0, 2.0];

fn parse_span(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::usage(format!("--s-span expects `a:b` with a <= 0 <= b, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a <= 0.0 && 0.0 <= b) || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_trace_seed(s: &str, p: &ModelParams) -> Result<OrbitSeed, Failure> {
    match s {
        "axis-up" => Ok(OrbitSeed::axis_up(p)),
        "axis-down" => Ok(OrbitSeed::axis_down(p)),
        _ => {
            let bad = || Failure::usage(format!("unknown seed '{s}' (axis-up, axis-down or interior:x0,y0,eps)"));
            let rest = s.strip_prefix("interior:").ok_or_else(bad)?;
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            let [x0, y0, eps] = parts[..] else { return Err(bad()) };
            let x0: f64 = x0.parse().map_err(|_| bad())?;
            let y0: f64 = y0.parse().map_err(|_| bad())?;
            let eps: i8 = eps.trim_start_matches('+').parse().map_err(|_| bad())?;
            Ok(OrbitSeed::interior(p, x0, y0, eps)?)
        }
    }
}

fn parse_table_seed(s: &str) -> Result<TableSeed, Failure> {
    match s {
        "axis-up" => Ok(TableSeed::Axis { delta: 1 }),
        "axis-down" => Ok(TableSeed::Axis { delta: -1 }),
        _ => s
            .strip_prefix("off-axis:")
            .and_then(|x| x.trim().parse().ok())
            .map(|x_hat| TableSeed::OffAxis { x_hat })
            .ok_or_else(|| Failure::usage(format!("unknown seed '{s}' (axis-up, axis-down or off-axis:x_hat)"))),
    }
}

enum Sink<'a> {
    File(&'a Path),
    Stdout,
    Stderr,
}

fn emit(sink: Sink, bytes: &[u8]) -> Result<(), Failure> {
    let res = match sink {
        Sink::File(path) => std::fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        Sink::Stdout => std::io::stdout().lock().write_all(bytes).map_err(|e| e.to_string()),
        Sink::Stderr => std::io::stderr().lock().write_all(bytes).map_err(|e| e.to_string()),
    };
    res.map_err(Failure::numeric)
}

fn json_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(value).expect("reports serialize");
    out.push(b'\n');
    out
}

fn primary(path: Option<&Path>) -> Sink<'_> {
    path.map_or(Sink::Stdout, Sink::File)
}

/// Secondary documents go to stdout when the primary output went to a file.
fn secondary(primary_path: Option<&Path>) -> Sink<'static> {
    if primary_path.is_some() {
        Sink::Stdout
    } else {
        Sink::Stderr
    }
}

pub fn cylinder(a: &CylinderArgs) -> Result<(), Failure> {
    let p = model(&a.model, a.v)?;
    let span = parse_span(&a.s_span)?;
    let case = match a.case {
        CaseArg::Auto => CylCase::auto(&p),
        CaseArg::LambdaGreater => CylCase::LambdaGreater,
        CaseArg::LambdaEqual => CylCase::LambdaEqual,
        CaseArg::LambdaLess0 => CylCase::LambdaLess0,
        CaseArg::LambdaLessPi => CylCase::LambdaLessPi,
    };
    case.check(&p)?;
    let samples = integrate_base_curve(&p, case.initial_theta(&p), span, a.tol, a.sample_step)?;
    let mut csv = Vec::new();
    write_curve_csv(&mut csv, &samples)?;
    emit(primary(a.out.as_deref()), &csv)?;
    if a.verify {
        let report = verify_closed_forms(&p, case, span, 1e-8)?;
        emit(secondary(a.out.as_deref()), &json_line(&report))?;
        if !report.passes() {
            return Err(Failure::numeric(format!("closed forms disagree in {:?}", report.flagged)));
        }
    }
    Ok(())
}

pub fn trace(a: &TraceArgs) -> Result<(), Failure> {
    let p = model(&a.model, 1.0)?;
    let seed = parse_trace_seed(&a.seed, &p)?;
    let f = match a.prescribed {
        PrescribedArg::Linear => PrescribedFunction::linear(&p),
        PrescribedArg::Cosine => PrescribedFunction::CosineComparison,
    };
    let direction = match a.direction {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    };
    let tr = integrate_orbit(seed, f, &a.numeric.options(direction))?;
    let mut csv = Vec::new();
    write_trace_csv(&mut csv, &tr.samples)?;
    emit(primary(a.out.as_deref()), &csv)?;
    let log = json_line(&event_log(&tr));
    match &a.events {
        Some(path) => emit(Sink::File(path), &log),
        None => emit(secondary(a.out.as_deref()), &log),
    }
}

fn jobs(flag: Option<usize>) -> Result<usize, Failure> {
    if let Ok(v) = std::env::var("HLK_JOBS") {
        return match v.trim().parse::<usize>() {
            Ok(j) if j > 0 => Ok(j),
            _ => Err(Failure::usage(format!("HLK_JOBS must be a positive integer, got '{v}'"))),
        };
    }
    match flag {
        Some(0) => Err(Failure::usage("--jobs must be positive")),
        Some(j) => Ok(j),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn classify(a: &ClassifyArgs) -> Result<(), Failure> {
    let seed = parse_table_seed(&a.seed)?;
    let opts = a.numeric.options(Direction::Forward);
    let out = if a.grid {
        let ns = if a.n.is_empty() { DEFAULT_GRID_N.to_vec() } else { a.n.clone() };
        let lambdas = if a.lambda.is_empty() { DEFAULT_GRID_LAMBDA.to_vec() } else { a.lambda.clone() };
        let grid = ns
            .iter()
            .flat_map(|&n| lambdas.iter().map(move |&l| ModelParams::rotational(n, l)))
            .collect::<Result<Vec<_>, _>>()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs(a.jobs)?)
            .build()
            .map_err(|e| Failure::numeric(e.to_string()))?;
        let table = pool.install(|| classification_table(&grid, seed, &opts))?;
        json_line(&table)
    } else {
        let (&[n], &[lambda]) = (&a.n[..], &a.lambda[..]) else {
            return Err(Failure::usage("classify needs exactly one --n and one --lambda (or --grid)"));
        };
        let p = ModelParams::rotational(n, lambda)?;
        let report = match seed {
            TableSeed::Axis { delta } => classify_axis_surface(&p, delta, &opts)?,
            TableSeed::OffAxis { x_hat } => classify_offaxis_surface(&p, x_hat, &opts)?,
        };
        json_line(&report)
    };
    emit(primary(a.out.as_deref()), &out)
}

pub fn export_mesh(a: &MeshArgs) -> Result<(), Failure> {
    if a.n != 2 {
        return Err(Failure::usage(format!("only surfaces in R^3 (n = 2) can be meshed; got n = {}", a.n)));
    }
    let file = std::fs::File::open(&a.profile)
        .map_err(|e| Failure::usage(format!("cannot open {}: {e}", a.profile.display())))?;
    let profile: Vec<[f64; 2]> = read_columns(file, &["x", "z"])?.into_iter().map(|r| [r[0], r[1]]).collect();
    let mesh = revolve(&profile, a.segments)?;
    let mut obj = Vec::new();
    write_obj(&mut obj, &mesh)?;
    emit(primary(a.out.as_deref()), &obj)
}
