//! File formats: curve and trace CSV, the event log JSON and OBJ meshes of
//! surfaces of revolution.
//!
//! Numbers are written as the shortest decimal that parses back to the same
//! `f64`, so every CSV re-imports bit-exactly.

use std::f64::consts::TAU;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cylindrical::BaseCurveSample;
use crate::error::{Error, Result};
use crate::orbits::{EventKind, OrbitTrace, TraceSample};

pub const CURVE_HEADER: [&str; 5] = ["s", "x", "z", "theta", "kappa"];
pub const TRACE_HEADER: [&str; 5] = ["s", "x", "z", "theta", "eps"];

/// Shortest round-trip representation of `v`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

fn write_rows<W: Write>(w: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header).map_err(io_err)?;
    for r in rows {
        wr.write_record(&r).map_err(io_err)?;
    }
    wr.flush().map_err(io_err)
}

/// Reads a CSV and returns the requested columns by name, one `Vec` per row.
pub fn read_columns<R: Read>(r: R, wanted: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(io_err)?.clone();
    let idx: Vec<usize> = wanted
        .iter()
        .map(|w| {
            header.iter().position(|h| h.trim() == *w).ok_or_else(|| Error::Parse(format!("missing column '{w}'")))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        let row = idx
            .iter()
            .map(|&i| {
                let field = rec.get(i).unwrap_or("").trim();
                field.parse::<f64>().map_err(|_| Error::Parse(format!("row {}: bad number '{field}'", line + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(row);
    }
    Ok(out)
}

pub fn write_curve_csv<W: Write>(w: W, samples: &[BaseCurveSample]) -> Result<()> {
    write_rows(w, &CURVE_HEADER, samples.iter().map(|b| [b.s, b.x, b.z, b.theta, b.kappa].map(fmt_f64).to_vec()))
}

pub fn read_curve_csv<R: Read>(r: R) -> Result<Vec<BaseCurveSample>> {
    Ok(read_columns(r, &CURVE_HEADER)?
        .into_iter()
        .map(|v| BaseCurveSample { s: v[0], x: v[1], z: v[2], theta: v[3], kappa: v[4] })
        .collect())
}

pub fn write_trace_csv<W: Write>(w: W, samples: &[TraceSample]) -> Result<()> {
    write_rows(
        w,
        &TRACE_HEADER,
        samples.iter().map(|t| {
            let mut row = [t.s, t.x, t.z, t.theta].map(fmt_f64).to_vec();
            row.push(t.eps().to_string());
            row
        }),
    )
}

pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceSample>> {
    Ok(read_columns(r, &TRACE_HEADER)?
        .into_iter()
        .map(|v| TraceSample { s: v[0], x: v[1], z: v[2], theta: v[3] })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<EventRecord>,
    pub termination: EventKind,
    pub winding: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

pub fn event_log(trace: &OrbitTrace) -> EventLog {
    EventLog {
        events: trace.events.iter().map(|e| EventRecord { kind: e.kind, s: e.s, x: e.x, y: e.y }).collect(),
        termination: trace.termination,
        winding: trace.winding,
        note: trace.exact.map(|sol| format!("exact special solution: {sol:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counter-clockwise around `r_phi x r_s`.
    pub faces: Vec<[usize; 3]>,
}

/// Revolves the profile `(x, z)` around the vertical axis. Ring `j`,
/// segment `i` is vertex `j * segments + i`.
pub fn revolve(profile: &[[f64; 2]], segments: usize) -> Result<Mesh> {
    if segments < 3 {
        return Err(Error::InvalidParams(format!("need at least 3 segments, got {segments}")));
    }
    if profile.len() < 2 {
        return Err(Error::InvalidParams("profile needs at least 2 samples".into()));
    }
    let mut vertices = Vec::with_capacity(profile.len() * segments);
    for &[x, z] in profile {
        for i in 0..segments {
            let (sn, cs) = (TAU * i as f64 / segments as f64).sin_cos();
            vertices.push([x * cs, x * sn, z]);
        }
    }
    let mut faces = Vec::with_capacity(2 * segments * (profile.len() - 1));
    for j in 0..profile.len() - 1 {
        for i in 0..segments {
            let i1 = (i + 1) % segments;
            let a = j * segments + i;
            let b = j * segments + i1;
            let c = (j + 1) * segments + i1;
            let d = (j + 1) * segments + i;
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    Ok(Mesh { vertices, faces })
}

pub fn write_obj<W: Write>(mut w: W, mesh: &Mesh) -> Result<()> {
    let mut out = String::with_capacity(mesh.vertices.len() * 48);
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])));
    }
    for f in &mesh.faces {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}
