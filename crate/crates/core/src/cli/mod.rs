//! `mecode` command line.

mod reproduce;
mod selftest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mecode::codec::{decode, encode, BitStream};
use mecode::fixedopt::optimize_fixed_for;
use mecode::metrics::{codebook_metrics, parse_grid, sweep, write_sweep_csv, SweepSpec, SweepVar};
use mecode::rfid::{wavelength, RfidLink, DEFAULT_ENERGY_SCALE};
use mecode::varopt::{optimize_prefix_with, PrefixOptions, DEFAULT_NODE_BUDGET};
use mecode::{uniform_source, CodeKind, Codebook, CostModel, Gamma, SymbolSource};

#[derive(Debug, Parser)]
#[command(name = "mecode", version, about = "Minimum-energy source coding for asymmetric binary channels")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true, env = "MECODE_JSON", action = clap::ArgAction::SetTrue, value_parser = clap::builder::FalseyValueParser::new())]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find the cheapest fixed-length or prefix codebook.
    Optimize(OptimizeArgs),
    /// Encode whitespace-separated symbol indices into a bit stream.
    Encode(CodecArgs),
    /// Decode a bit stream back into symbol indices.
    Decode(CodecArgs),
    /// Evaluate optimized codebooks over a parameter grid.
    Sweep(SweepArgs),
    /// Bit costs and cost ratio of a backscatter RFID link.
    RfidGamma(RfidArgs),
    /// Regenerate a table or figure dataset.
    Reproduce(ReproduceArgs),
    /// Run the built-in property checks on small instances.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Energy of a 0 bit.
    #[arg(long, env = "MECODE_BETA0", allow_negative_numbers = true)]
    beta0: Option<f64>,
    /// Energy of a 1 bit.
    #[arg(long, env = "MECODE_BETA1", allow_negative_numbers = true)]
    beta1: Option<f64>,
    /// Duration of a 0 bit.
    #[arg(long, env = "MECODE_T0", default_value_t = 1.0)]
    t0: f64,
    /// Duration of a 1 bit.
    #[arg(long, env = "MECODE_T1", default_value_t = 1.0)]
    t1: f64,
    /// Cost model JSON (`{"beta0","beta1","t0","t1"}`) instead of the flags above.
    #[arg(long, env = "MECODE_COST_MODEL", conflicts_with_all = ["beta0", "beta1"])]
    cost_model: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self) -> Result<CostModel> {
        if let Some(path) = &self.cost_model {
            let text = read_text(path)?;
            return serde_json::from_str(&text).with_context(|| format!("invalid cost model {}", path.display()));
        }
        match (self.beta0, self.beta1) {
            (Some(b0), Some(b1)) => Ok(CostModel::new(b0, b1, self.t0, self.t1)?),
            _ => bail!("--beta0 and --beta1 (or --cost-model) are required"),
        }
    }
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long, env = "MECODE_KIND")]
    kind: CodeKind,
    /// Number of equiprobable symbols (or the size check for --probs).
    #[arg(long, env = "MECODE_M")]
    m: Option<usize>,
    /// Source distribution JSON (`{"probs":[...]}`).
    #[arg(long, env = "MECODE_PROBS")]
    probs: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Longest fixed length to scan (fixed only).
    #[arg(long, env = "MECODE_N_MAX")]
    n_max: Option<u32>,
    /// Code tree depth (prefix only).
    #[arg(long, env = "MECODE_DP")]
    dp: Option<u32>,
    /// Largest allowed rate-reduction factor (prefix only).
    #[arg(long, env = "MECODE_ETA_MAX")]
    eta_max: Option<f64>,
    /// Search node budget (prefix only).
    #[arg(long, env = "MECODE_NODE_BUDGET")]
    node_budget: Option<u64>,
    /// Codebook JSON output.
    #[arg(short, long)]
    output: PathBuf,
    /// CSV of the length scan `n,lmin,cost` (fixed only).
    #[arg(long)]
    scan: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CodecArgs {
    /// Codebook JSON.
    #[arg(short, long, env = "MECODE_CODEBOOK")]
    codebook: PathBuf,
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Swept variable: n, gamma, m or dp.
    #[arg(long)]
    var: SweepVar,
    /// `a:b`, `a:b:step`, `a:b:logN`, `a:b:linN` or `x,y,z`.
    #[arg(long)]
    grid: String,
    /// Alphabet sizes held fixed.
    #[arg(long, value_delimiter = ',', env = "MECODE_M")]
    m: Vec<usize>,
    /// Cost ratios held fixed.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "fixed,prefix")]
    kinds: Vec<CodeKind>,
    /// Tree depth for prefix codes.
    #[arg(long, env = "MECODE_DP")]
    dp: Option<u32>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct RfidArgs {
    /// Reader transmit power (W).
    #[arg(long, env = "MECODE_PT")]
    pt: f64,
    /// Reader antenna gain (linear).
    #[arg(long, env = "MECODE_GT")]
    gt: f64,
    /// Tag antenna gain (linear).
    #[arg(long, env = "MECODE_GR")]
    gr: f64,
    /// Carrier frequency (Hz).
    #[arg(long, env = "MECODE_FREQ")]
    freq: f64,
    /// Reader-tag distance (m).
    #[arg(long, env = "MECODE_R")]
    r: f64,
    /// Polarization loss (linear, at most 1).
    #[arg(long, env = "MECODE_LP", default_value_t = 1.0)]
    lp: f64,
    /// Antenna resistance (Ω).
    #[arg(long, env = "MECODE_RANT")]
    rant: f64,
    /// Rectifier stages.
    #[arg(long, env = "MECODE_NSTAGES")]
    nstages: u32,
    /// Diode threshold voltage (V).
    #[arg(long, env = "MECODE_VT")]
    vt: f64,
    /// Tag power consumption (W).
    #[arg(long, env = "MECODE_PTAG")]
    ptag: f64,
    /// Duration of a 0 bit (s).
    #[arg(long, env = "MECODE_T0")]
    t0: f64,
    /// Duration of a 1 bit (s).
    #[arg(long, env = "MECODE_T1")]
    t1: f64,
    /// Impedance mismatch loss (linear, at most 1).
    #[arg(long, env = "MECODE_MISMATCH", default_value_t = 1.0)]
    mismatch: f64,
    /// Joules per cost unit in the emitted model.
    #[arg(long, env = "MECODE_ENERGY_SCALE", default_value_t = DEFAULT_ENERGY_SCALE)]
    scale: f64,
    /// Write the resulting cost model JSON here.
    #[arg(long)]
    emit_costmodel: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// table1, table2, table4, fig2, fig3, fig4, fig5 or all.
    target: reproduce::Target,
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, env = "MECODE_SEED", default_value_t = 0)]
    seed: u64,
    /// Deliberately break the named property.
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(Outcome { report, text, ok }) => {
            let out = if json {
                format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable report"))
            } else {
                text
            };
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().write_all(out.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            if json {
                let _ = writeln!(std::io::stdout(), "{}", json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// What a subcommand produced, in both output formats.
struct Outcome {
    report: Value,
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(report: Value, text: String) -> Self {
        Outcome { report, text, ok: true }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Optimize(a) => optimize(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::RfidGamma(a) => rfid_gamma(a),
        Command::Reproduce(a) => reproduce::run(a.target, &a.out_dir),
        Command::Selftest(a) => Ok(selftest::run(a.seed, a.inject_fault.as_deref())),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, data: &[u8]) -> Result<()> {
    fs::write(path, data).with_context(|| format!("cannot write {}", path.display()))
}

fn load_source(m: Option<usize>, probs: Option<&Path>) -> Result<SymbolSource> {
    match (m, probs) {
        (_, Some(path)) => {
            let src: SymbolSource =
                serde_json::from_str(&read_text(path)?).with_context(|| format!("invalid source {}", path.display()))?;
            if let Some(m) = m {
                if m != src.m() {
                    bail!("--m {m} disagrees with the {} probabilities in {}", src.m(), path.display());
                }
            }
            Ok(src)
        }
        (Some(m), None) => Ok(uniform_source(m)?),
        (None, None) => bail!("one of --m or --probs is required"),
    }
}

fn optimize(a: OptimizeArgs) -> Result<Outcome> {
    match a.kind {
        CodeKind::Fixed if a.dp.is_some() || a.eta_max.is_some() || a.node_budget.is_some() => {
            bail!("--dp, --eta-max and --node-budget apply to --kind prefix only")
        }
        CodeKind::Prefix if a.n_max.is_some() || a.scan.is_some() => {
            bail!("--n-max and --scan apply to --kind fixed only")
        }
        _ => {}
    }
    let src = load_source(a.m, a.probs.as_deref())?;
    let cm = a.model.load()?;
    let (cb, size, extra) = match a.kind {
        CodeKind::Fixed => {
            let (cb, scan) = optimize_fixed_for(&src, &cm, a.n_max)?;
            if let Some(path) = &a.scan {
                let mut out = Vec::new();
                scan.write_csv(&mut out)?;
                write_file(path, &out)?;
            }
            let n = scan.n_opt;
            (cb, json!({ "n": n }), format!("n = {n}"))
        }
        CodeKind::Prefix => {
            let opts = PrefixOptions {
                depth: a.dp,
                eta_max: a.eta_max,
                node_budget: a.node_budget.unwrap_or(DEFAULT_NODE_BUDGET),
            };
            let sol = optimize_prefix_with(&src, &cm, &opts)?;
            let dp = sol.depth;
            (sol.codebook, json!({ "dp": dp, "explored": sol.explored }), format!("dp = {dp}"))
        }
    };
    write_file(&a.output, cb.to_json()?.as_bytes())?;
    let metrics = codebook_metrics(&src, &cb, &cm)?;
    let mut report = json!({
        "kind": cb.kind(),
        "m": src.m(),
        "metrics": metrics,
        "codebook": cb,
        "output": a.output,
    });
    merge(&mut report, size);
    let text = format!(
        "{} codebook for {} symbols, {extra}\naverage cost {}\naverage length {}\neta {}\nepsilon {}\nwritten to {}\n",
        cb.kind(),
        src.m(),
        metrics.beta_code,
        metrics.avg_length,
        metrics.eta,
        metrics.epsilon,
        a.output.display()
    );
    Ok(Outcome::ok(report, text))
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn load_codebook(path: &Path) -> Result<Codebook> {
    Codebook::from_json(&read_text(path)?).with_context(|| format!("invalid codebook {}", path.display()))
}

fn parse_symbols(text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .enumerate()
        .map(|(i, tok)| tok.parse().with_context(|| format!("symbol {i} ({tok:?}) is not a non-negative integer")))
        .collect()
}

fn cmd_encode(a: CodecArgs) -> Result<Outcome> {
    let cb = load_codebook(&a.codebook)?;
    let symbols = parse_symbols(&read_text(&a.input)?)?;
    let bs = encode(&symbols, &cb)?;
    write_file(&a.output, &bs.to_bytes())?;
    let report = json!({ "symbols": symbols.len(), "bits": bs.len(), "output": a.output });
    let text = format!("encoded {} symbols into {} bits\n", symbols.len(), bs.len());
    Ok(Outcome::ok(report, text))
}

fn cmd_decode(a: CodecArgs) -> Result<Outcome> {
    let cb = load_codebook(&a.codebook)?;
    let data = fs::read(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let bs = BitStream::from_bytes(&data)?;
    let symbols = decode(&bs, &cb)?;
    let mut out = symbols.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    out.push('\n');
    write_file(&a.output, out.as_bytes())?;
    let report = json!({ "symbols": symbols.len(), "bits": bs.len(), "output": a.output });
    let text = format!("decoded {} bits into {} symbols\n", bs.len(), symbols.len());
    Ok(Outcome::ok(report, text))
}

fn cmd_sweep(a: SweepArgs) -> Result<Outcome> {
    let spec = SweepSpec { var: a.var, grid: parse_grid(&a.grid)?, ms: a.m, gammas: a.gamma, kinds: a.kinds, dp: a.dp };
    let rows = sweep(&spec)?;
    let mut out = Vec::new();
    write_sweep_csv(&rows, &mut out)?;
    write_file(&a.output, &out)?;
    let report = json!({ "rows": rows.len(), "output": a.output });
    let text = format!("{} rows written to {}\n", rows.len(), a.output.display());
    Ok(Outcome::ok(report, text))
}

fn rfid_gamma(a: RfidArgs) -> Result<Outcome> {
    if !(a.freq > 0.0 && a.freq.is_finite()) {
        bail!("--freq must be positive, got {}", a.freq);
    }
    let link = RfidLink {
        p_t: a.pt,
        g_t: a.gt,
        g_r: a.gr,
        lambda: wavelength(a.freq),
        r: a.r,
        l_p: a.lp,
        r_ant: a.rant,
        n_stages: a.nstages,
        v_t: a.vt,
        p_tag: a.ptag,
        t0: a.t0,
        t1: a.t1,
        mismatch: a.mismatch,
    };
    link.validate()?;
    let costs = link.tag_costs();
    let gamma = link.cost_ratio();
    let cm = link.cost_model(a.scale)?;
    if let Some(path) = &a.emit_costmodel {
        write_file(path, serde_json::to_string_pretty(&cm)?.as_bytes())?;
    }
    let gamma_json = match gamma {
        Gamma::Finite(g) => json!(g),
        Gamma::Infinite => json!("inf"),
    };
    let report = json!({
        "p_in": link.input_power(),
        "p_in_dc": link.harvested_dc_power(),
        "v_ant": link.antenna_voltage(),
        "v_dc": link.rectified_voltage(),
        "beta0": costs.beta0,
        "beta1": costs.beta1,
        "gamma": gamma_json,
        "regime": costs.regime,
        "surplus_range": link.surplus_range(),
        "cost_model": cm,
    });
    let text = format!(
        "P_in     {:e} W\nP_in,DC  {:e} W\nV_ant    {} V\nV_DC     {} V\nbeta0    {:e} J\nbeta1    {:e} J\ngamma    {gamma}\nregime   {}\nsurplus up to {} m\n",
        link.input_power(),
        link.harvested_dc_power(),
        link.antenna_voltage(),
        link.rectified_voltage(),
        costs.beta0,
        costs.beta1,
        serde_json::to_value(costs.regime)?.as_str().unwrap_or_default(),
        link.surplus_range(),
    );
    Ok(Outcome::ok(report, text))
}

/// Write `text` to `dir/name`, creating `dir` when needed.
fn emit(dir: &Path, name: &str, data: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    let mut f = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    f.write_all(data)?;
    Ok(path)
}
