//! Datasets behind the classic tables and figures of minimum-energy coding.

use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::json;

use mecode::metrics::{parse_grid, sweep, write_sweep_csv, SweepSpec, SweepVar};
use mecode::{
    average_cost_exact, codebook_metrics, optimize_fixed, optimize_prefix, uniform_source, CodeKind, Codebook,
    CodebookMetrics, CostModel,
};

use super::{emit, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Table1,
    Table2,
    Table4,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    All,
}

const ALL: [Target; 7] =
    [Target::Table1, Target::Table2, Target::Table4, Target::Fig2, Target::Fig3, Target::Fig4, Target::Fig5];

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "table1" => Target::Table1,
            "table2" => Target::Table2,
            "table4" => Target::Table4,
            "fig2" => Target::Fig2,
            "fig3" => Target::Fig3,
            "fig4" => Target::Fig4,
            "fig5" => Target::Fig5,
            "all" => Target::All,
            other => return Err(format!("unknown target {other:?}; expected table1, table2, table4, fig2..fig5 or all")),
        })
    }
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Table1 => "table1",
            Target::Table2 => "table2",
            Target::Table4 => "table4",
            Target::Fig2 => "fig2",
            Target::Fig3 => "fig3",
            Target::Fig4 => "fig4",
            Target::Fig5 => "fig5",
            Target::All => "all",
        }
    }
}

#[derive(Serialize)]
struct Entry {
    m: usize,
    codebook: Codebook,
    average_cost: String,
    metrics: CodebookMetrics,
}

fn entry(m: usize, cb: Codebook, cm: &CostModel) -> Result<Entry> {
    let src = uniform_source(m)?;
    let exact = average_cost_exact(&src, &cb, cm)?;
    Ok(Entry { m, average_cost: exact.to_string(), metrics: codebook_metrics(&src, &cb, cm)?, codebook: cb })
}

fn pretty(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn csv_of(spec: &SweepSpec) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_sweep_csv(&sweep(spec)?, &mut out)?;
    Ok(out)
}

fn gamma_spec(ms: Vec<usize>, grid: &str, kinds: Vec<CodeKind>) -> Result<SweepSpec> {
    Ok(SweepSpec { var: SweepVar::Gamma, grid: parse_grid(grid)?, ms, gammas: vec![], kinds, dp: None })
}

/// Build one target, returning (file name, contents).
fn build(target: Target) -> Result<Vec<(String, Vec<u8>)>> {
    let name = target.name();
    let file = |ext: &str| format!("{name}.{ext}");
    Ok(match target {
        Target::Table1 => {
            // Zeros are free: fixed codes of length 2^k − 1 with at most one 1.
            let cm = CostModel::new(0.0, 1.0, 1.0, 1.0)?;
            let rows = [2u32, 3]
                .into_iter()
                .map(|k| {
                    let m = 1usize << k;
                    let (cb, _) = optimize_fixed(m, &cm, None)?;
                    entry(m, cb, &cm)
                })
                .collect::<Result<Vec<_>>>()?;
            vec![(file("json"), pretty(&json!({ "beta0": 0.0, "beta1": 1.0, "codes": rows }))?)]
        }
        Target::Table2 => {
            let cm = CostModel::new(0.0, 1.0, 1.0, 1.0)?;
            let rows = [2u32, 3]
                .into_iter()
                .map(|k| {
                    let m = 1usize << k;
                    let cb = optimize_prefix(&uniform_source(m)?, &cm, None)?;
                    let length_formula = 0.5 * (m as f64 + 1.0 - 2f64.powi(1 - k as i32));
                    Ok(json!({ "k": k, "length_formula": length_formula, "code": entry(m, cb, &cm)? }))
                })
                .collect::<Result<Vec<_>>>()?;
            vec![(file("json"), pretty(&json!({ "beta0": 0.0, "beta1": 1.0, "codes": rows }))?)]
        }
        Target::Table4 => {
            let cm = CostModel::new(1.0, 5.0, 1.0, 1.0)?;
            let src = uniform_source(8)?;
            let (fixed, _) = optimize_fixed(8, &cm, None)?;
            let prefix = optimize_prefix(&src, &cm, None)?;
            let mut csv = String::from("symbol,fixed,prefix\n");
            for s in 0..8 {
                csv.push_str(&format!("{s:03b},{},{}\n", fixed.entries()[s], prefix.entries()[s]));
            }
            let f = entry(8, fixed, &cm)?;
            let p = entry(8, prefix, &cm)?;
            csv.push_str(&format!("average cost,{},{}\n", f.average_cost, p.average_cost));
            vec![
                (file("json"), pretty(&json!({ "beta0": 1.0, "beta1": 5.0, "fixed": f, "prefix": p }))?),
                (file("csv"), csv.into_bytes()),
            ]
        }
        Target::Fig2 => {
            let spec = SweepSpec {
                var: SweepVar::N,
                grid: parse_grid("7:127")?,
                ms: vec![128],
                gammas: vec![1.0, 2.0, 5.0, 10.0, 100.0],
                kinds: vec![CodeKind::Fixed],
                dp: None,
            };
            vec![(file("csv"), csv_of(&spec)?)]
        }
        Target::Fig3 | Target::Fig4 => {
            let spec = gamma_spec(vec![8, 16, 32, 128], "1:1e4:log41", vec![CodeKind::Fixed])?;
            vec![(file("csv"), csv_of(&spec)?)]
        }
        Target::Fig5 => {
            let spec = gamma_spec(vec![8], "1:100:log25", vec![CodeKind::Fixed, CodeKind::Prefix])?;
            vec![(file("csv"), csv_of(&spec)?)]
        }
        Target::All => bail!("'all' expands to the individual targets"),
    })
}

pub fn run(target: Target, out_dir: &Path) -> Result<Outcome> {
    let targets: Vec<Target> = if target == Target::All { ALL.to_vec() } else { vec![target] };
    let mut written = Vec::new();
    for t in targets {
        for (name, data) in build(t)? {
            written.push(emit(out_dir, &name, &data)?);
        }
    }
    let mut text = String::new();
    for p in &written {
        text.push_str(&format!("wrote {}\n", p.display()));
    }
    Ok(Outcome::ok(json!({ "target": target.name(), "files": written }), text))
}
