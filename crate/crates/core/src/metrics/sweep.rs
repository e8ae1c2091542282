//! Parameter sweeps over `n`, `γ`, `M` or `dp` for uniform sources.

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use super::codebook_metrics;
use crate::codebook::{CodeKind, Codebook};
use crate::costmodel::{uniform_source, CostModel};
use crate::error::{Error, Result};
use crate::fixedopt::{fixed_codebook, min_length, optimize_fixed};
use crate::varopt::{optimize_prefix_with, PrefixOptions};

/// First line of every sweep CSV.
pub const BASELINE_NOTE: &str = "# epsilon baseline: 0.5*(beta0+beta1)*log2(M) for uniform sources; \
     sum_i p_i*f(natural ceil(log2 M)-bit index of i) otherwise; beta0=1, beta1=gamma";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    N,
    Gamma,
    M,
    Dp,
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepVar::N),
            "gamma" => Ok(SweepVar::Gamma),
            "m" => Ok(SweepVar::M),
            "dp" => Ok(SweepVar::Dp),
            other => Err(Error::invalid("var", format!("expected n, gamma, m or dp, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub grid: Vec<f64>,
    /// Alphabet sizes held fixed (ignored when sweeping `m`).
    pub ms: Vec<usize>,
    /// Cost ratios held fixed (ignored when sweeping `gamma`).
    pub gammas: Vec<f64>,
    pub kinds: Vec<CodeKind>,
    /// Depth for prefix codes when not sweeping `dp`.
    pub dp: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub kind: CodeKind,
    pub m: usize,
    pub gamma: f64,
    pub n_or_dp: u32,
    pub l_src: f64,
    pub eta: f64,
    pub beta_code: f64,
    pub epsilon: f64,
}

/// Parse `a:b` (unit step), `a:b:step`, `a:b:logN`, `a:b:linN` or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::invalid("grid", format!("{text:?}: {why}"));
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| bad(&format!("{s:?} is not a number")))?;
        if v.is_nan() {
            return Err(bad("NaN"));
        }
        Ok(v)
    };
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        [a, b] => stepped(num(a)?, num(b)?, 1.0).ok_or_else(|| bad("bad range"))?,
        [a, b, step] => {
            let (a, b) = (num(a)?, num(b)?);
            if let Some(count) = step.strip_prefix("log") {
                let count: usize = count.parse().map_err(|_| bad("bad point count"))?;
                if a <= 0.0 || b <= 0.0 || count < 2 {
                    return Err(bad("log grids need positive ends and at least 2 points"));
                }
                let (la, lb) = (a.log10(), b.log10());
                (0..count)
                    .map(|i| if i + 1 == count { b } else { 10f64.powf(la + (lb - la) * i as f64 / (count - 1) as f64) })
                    .collect()
            } else if let Some(count) = step.strip_prefix("lin") {
                let count: usize = count.parse().map_err(|_| bad("bad point count"))?;
                if count < 2 {
                    return Err(bad("linear grids need at least 2 points"));
                }
                (0..count).map(|i| if i + 1 == count { b } else { a + (b - a) * i as f64 / (count - 1) as f64 }).collect()
            } else {
                stepped(a, b, num(step)?).ok_or_else(|| bad("bad step"))?
            }
        }
        _ => return Err(bad("too many ':'")),
    };
    if grid.is_empty() {
        return Err(bad("empty grid"));
    }
    Ok(grid)
}

fn stepped(a: f64, b: f64, step: f64) -> Option<Vec<f64>> {
    if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
        return None;
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    Some((0..count).map(|i| a + step * i as f64).collect())
}

/// Cost model with `β₀ = 1, β₁ = γ`; `γ = ∞` becomes `β₀ = 0, β₁ = 1`.
fn model_for(gamma: f64) -> Result<CostModel> {
    if gamma.is_infinite() && gamma > 0.0 {
        CostModel::new(0.0, 1.0, 1.0, 1.0)
    } else {
        CostModel::from_gamma(gamma)
    }
}

fn as_integer(field: &'static str, v: f64) -> Result<u64> {
    if v.fract() == 0.0 && (0.0..1e15).contains(&v) {
        Ok(v as u64)
    } else {
        Err(Error::invalid(field, format!("{v} is not a non-negative integer")))
    }
}

struct Point {
    kind: CodeKind,
    m: usize,
    gamma: f64,
    /// Fixed length or tree depth when pinned by the sweep.
    pinned: Option<u32>,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::invalid("kinds", "at least one kind is required"));
        }
        match self.var {
            SweepVar::N if self.kinds.contains(&CodeKind::Prefix) => {
                Err(Error::invalid("kinds", "sweeping n applies to fixed codes only"))
            }
            SweepVar::Dp if self.kinds.contains(&CodeKind::Fixed) => {
                Err(Error::invalid("kinds", "sweeping dp applies to prefix codes only"))
            }
            SweepVar::M => Ok(()),
            _ if self.ms.is_empty() => Err(Error::invalid("m", "at least one alphabet size is required")),
            _ => Ok(()),
        }?;
        if self.var != SweepVar::Gamma && self.gammas.is_empty() {
            return Err(Error::invalid("gamma", "at least one cost ratio is required"));
        }
        Ok(())
    }

    fn points(&self) -> Result<Vec<Point>> {
        self.validate()?;
        let mut points = Vec::new();
        for &kind in &self.kinds {
            match self.var {
                SweepVar::Gamma => {
                    for &m in &self.ms {
                        for &gamma in &self.grid {
                            points.push(Point { kind, m, gamma, pinned: None });
                        }
                    }
                }
                SweepVar::M => {
                    for &gamma in &self.gammas {
                        for &v in &self.grid {
                            let m = as_integer("grid", v)? as usize;
                            points.push(Point { kind, m, gamma, pinned: None });
                        }
                    }
                }
                SweepVar::N | SweepVar::Dp => {
                    for &m in &self.ms {
                        for &gamma in &self.gammas {
                            for &v in &self.grid {
                                let pinned = u32::try_from(as_integer("grid", v)?)
                                    .map_err(|_| Error::invalid("grid", format!("{v} is too large")))?;
                                points.push(Point { kind, m, gamma, pinned: Some(pinned) });
                            }
                        }
                    }
                }
            }
        }
        Ok(points)
    }
}

/// Evaluate one point; `None` when the point is infeasible for its kind.
fn evaluate(spec: &SweepSpec, p: &Point) -> Result<Option<SweepRow>> {
    if p.m < 2 {
        return Ok(None);
    }
    let src = uniform_source(p.m)?;
    let cm = model_for(p.gamma)?;
    let (cb, n_or_dp): (Codebook, u32) = match (p.kind, p.pinned) {
        (CodeKind::Fixed, Some(n)) => {
            if n < min_length(p.m) {
                return Ok(None);
            }
            (fixed_codebook(&src, n, &cm)?, n)
        }
        (CodeKind::Fixed, None) => {
            let (cb, scan) = optimize_fixed(p.m, &cm, None)?;
            (cb, scan.n_opt)
        }
        (CodeKind::Prefix, pinned) => {
            let opts = PrefixOptions { depth: pinned.or(spec.dp), ..PrefixOptions::default() };
            match optimize_prefix_with(&src, &cm, &opts) {
                Ok(sol) => (sol.codebook, sol.depth),
                Err(Error::InfeasibleDepth { .. } | Error::DepthOutOfRange { .. }) if pinned.is_some() => {
                    return Ok(None)
                }
                Err(e) => return Err(e),
            }
        }
    };
    let metrics = codebook_metrics(&src, &cb, &cm)?;
    Ok(Some(SweepRow {
        kind: p.kind,
        m: p.m,
        gamma: p.gamma,
        n_or_dp,
        l_src: metrics.l_src,
        eta: metrics.eta,
        beta_code: metrics.beta_code,
        epsilon: metrics.epsilon,
    }))
}

/// Evaluate every grid point. Rows come back in grid order whether or not
/// the points are evaluated in parallel.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let points = spec.points()?;
    #[cfg(feature = "parallel")]
    let rows: Vec<Option<SweepRow>> = {
        use rayon::prelude::*;
        points.par_iter().map(|p| evaluate(spec, p)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Option<SweepRow>> = points.iter().map(|p| evaluate(spec, p)).collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// CSV with a leading `#` comment describing the baseline, then the header
/// `kind,m,gamma,n_or_dp,l_src,eta,beta_code,epsilon`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{BASELINE_NOTE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "m", "gamma", "n_or_dp", "l_src", "eta", "beta_code", "epsilon"])?;
    for r in rows {
        w.write_record([
            r.kind.to_string(),
            r.m.to_string(),
            r.gamma.to_string(),
            r.n_or_dp.to_string(),
            r.l_src.to_string(),
            r.eta.to_string(),
            r.beta_code.to_string(),
            r.epsilon.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
