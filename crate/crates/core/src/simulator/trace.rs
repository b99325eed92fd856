use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{MracError, Result};
use crate::projection::ThetaRegion;

pub const CSV_HEADER: &str = "t,r,u,v,x_p,x_m,e,theta,region";

/// Whole-run extremes, taken over every integration step (not only the
/// stored samples).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RunStats {
    pub max_abs_e: f64,
    pub max_abs_theta: f64,
    pub max_abs_e_x_p: f64,
    /// Steps after which `θ` had to be clamped back onto `±θ_max`.
    pub clamp_events: u64,
    pub steps: u64,
}

/// Uniformly sampled closed-loop signals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub x_p: Vec<f64>,
    pub x_m: Vec<f64>,
    pub e: Vec<f64>,
    pub theta: Vec<f64>,
    pub region: Vec<ThetaRegion>,
    pub stats: RunStats,
}

impl SimTrace {
    pub(crate) fn with_capacity(n: usize) -> Self {
        SimTrace {
            t: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
            x_p: Vec::with_capacity(n),
            x_m: Vec::with_capacity(n),
            e: Vec::with_capacity(n),
            theta: Vec::with_capacity(n),
            region: Vec::with_capacity(n),
            stats: RunStats::default(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push(&mut self, t: f64, r: f64, u: f64, v: f64, x_p: f64, x_m: f64, theta: f64, region: ThetaRegion) {
        self.t.push(t);
        self.r.push(r);
        self.u.push(u);
        self.v.push(v);
        self.x_p.push(x_p);
        self.x_m.push(x_m);
        self.e.push(x_p - x_m);
        self.theta.push(theta);
        self.region.push(region);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn max_abs_e(&self) -> f64 {
        self.e.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_theta(&self) -> f64 {
        self.theta.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn final_region(&self) -> Option<ThetaRegion> {
        self.region.last().copied()
    }

    /// Writes the trace as CSV. Numbers use the shortest representation that
    /// parses back to the same `f64`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{}",
                self.t[i],
                self.r[i],
                self.u[i],
                self.v[i],
                self.x_p[i],
                self.x_m[i],
                self.e[i],
                self.theta[i],
                self.region[i].label()
            )?;
        }
        w.flush()
    }

    /// Reads a trace written by [`SimTrace::write_csv`]. Run statistics are
    /// recomputed from the samples.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<SimTrace> {
        let bad = |line: usize, msg: &str| MracError::InvalidConfig(format!("trace CSV line {line}: {msg}"));
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| bad(1, "empty file"))?.map_err(|e| bad(1, &e.to_string()))?;
        if header.trim_end() != CSV_HEADER {
            return Err(bad(1, &format!("expected header `{CSV_HEADER}`")));
        }
        let mut trace = SimTrace::default();
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line.map_err(|e| bad(lineno, &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            if fields.len() != 9 {
                return Err(bad(lineno, &format!("expected 9 fields, found {}", fields.len())));
            }
            let mut nums = [0.0; 8];
            for (slot, text) in nums.iter_mut().zip(&fields[..8]) {
                *slot = text.parse().map_err(|_| bad(lineno, &format!("`{text}` is not a number")))?;
            }
            let region =
                ThetaRegion::from_label(fields[8]).ok_or_else(|| bad(lineno, &format!("unknown region `{}`", fields[8])))?;
            let [t, r, u, v, x_p, x_m, e, theta] = nums;
            trace.t.push(t);
            trace.r.push(r);
            trace.u.push(u);
            trace.v.push(v);
            trace.x_p.push(x_p);
            trace.x_m.push(x_m);
            trace.e.push(e);
            trace.theta.push(theta);
            trace.region.push(region);
        }
        trace.stats = RunStats {
            max_abs_e: trace.max_abs_e(),
            max_abs_theta: trace.max_abs_theta(),
            max_abs_e_x_p: trace.e.iter().zip(&trace.x_p).fold(0.0, |m, (e, x)| m.max((e * x).abs())),
            clamp_events: 0,
            steps: trace.len().saturating_sub(1) as u64,
        };
        Ok(trace)
    }
}
