//! The `scl` command line: argument parsing and dispatch.

use crate::chain::{parse_group_spec, parse_with_group, Chain, GroupSpec};
use crate::cone::{disk_box, extremal_rays, support_graph};
use crate::engine::{scl_with, verify_witness, DiskStrategy, EngineError, SclOptions, SclProblem, SclResult};
use crate::histogram::{check_sample, histogram};
use crate::lp::PivotRule;
use crate::rational::{parse_rational, to_pq, Rational};
use crate::sails::{enumerate_disk_vectors_limited, klein_profile};
use crate::surgery::{closed_form_w, closed_form_wprime, parse_line, sweep};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;

/// Pricing states allowed per column-generation round without `--long`.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

#[derive(Parser, Debug)]
#[command(name = "scl", version, about = "Exact stable commutator length in free products of free Abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute scl of a chain.
    Scl(SclArgs),
    /// Print arcs, coordinates, cone rays, the disk box and optionally disks.
    Inspect(InspectArgs),
    /// Evaluate scl along a line of surgeries.
    Sweep(SweepArgs),
    /// Evaluate a closed-form scl formula.
    Formula(FormulaArgs),
    /// Histogram of closed-form values of the w and w′ families.
    Histogram(HistogramArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// Chain, e.g. "abAB + 2*a^-1" (uppercase letters are inverses).
    pub chain: String,
    /// Group, e.g. "Z^2(a,c) * Z(b)"; defaults to one Z per letter.
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Strategy {
    Colgen,
    Enumerate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Pivot {
    Bland,
    Dantzig,
}

#[derive(Args, Debug)]
pub struct EngineFlags {
    #[arg(long, value_enum, default_value = "colgen")]
    pub strategy: Strategy,
    /// Multiply the disk box by this factor.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
    pub box_scale: i64,
    #[arg(long, value_enum, default_value = "bland")]
    pub pivot: Pivot,
    /// Lift the pricing budget for large chains.
    #[arg(long)]
    pub long: bool,
}

impl EngineFlags {
    pub fn options(&self) -> SclOptions {
        SclOptions {
            strategy: match self.strategy {
                Strategy::Colgen => DiskStrategy::ColumnGeneration,
                Strategy::Enumerate => DiskStrategy::Enumerate,
            },
            box_scale: self.box_scale,
            pivot: match self.pivot {
                Pivot::Bland => PivotRule::Bland,
                Pivot::Dantzig => PivotRule::Dantzig,
            },
            state_budget: if self.long { None } else { Some(DEFAULT_STATE_BUDGET) },
        }
    }
}

#[derive(Args, Debug)]
pub struct SclArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub engine: EngineFlags,
    /// Print the result and witness as JSON.
    #[arg(long)]
    pub json: bool,
    /// Print the witness: per-factor vectors, disks and boundary circuits.
    #[arg(long)]
    pub witness: bool,
    /// Verify a JSON witness file against the chain instead of solving.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["json", "witness"])]
    pub verify: Option<String>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[command(flatten)]
    pub common: Common,
    /// Enumerate disk vectors in the box.
    #[arg(long)]
    pub disks: bool,
    #[arg(long, default_value_t = 200)]
    pub max_disks: usize,
    /// κ along a segment, given as "x1,x2,...:y1,y2,..." (rationals allowed).
    #[arg(long)]
    pub profile: Option<String>,
    /// Restrict output to one factor (0-based).
    #[arg(long)]
    pub factor: Option<usize>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
    pub box_scale: i64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Line of surgeries, e.g. "a->a; c->p*a; b->b".
    #[arg(long)]
    pub line: String,
    /// Target group; inferred from the line when omitted.
    #[arg(long)]
    pub target: Option<String>,
    /// Inclusive range "from..to".
    #[arg(long, default_value = "1..4")]
    pub p: String,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub engine: EngineFlags,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormulaFamily {
    W,
    Wprime,
}

#[derive(Args, Debug)]
pub struct FormulaArgs {
    #[arg(value_enum)]
    pub family: FormulaFamily,
    #[arg(allow_negative_numbers = true)]
    pub a1: i64,
    #[arg(allow_negative_numbers = true)]
    pub a2: i64,
    #[arg(allow_negative_numbers = true)]
    pub b1: i64,
    #[arg(allow_negative_numbers = true)]
    pub b2: i64,
}

#[derive(Args, Debug)]
pub struct HistogramArgs {
    /// Largest α1 and β1.
    #[arg(long = "max", default_value_t = 10, value_parser = clap::value_parser!(i64).range(2..))]
    pub max: i64,
    /// Re-verify this many random tuples with the engine.
    #[arg(long, default_value_t = 0)]
    pub check: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Outcome of a command: exit code 1 for domain errors, 2 for usage errors.
enum Failure {
    Domain(String),
    Usage(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Chain(c) => Failure::Usage(c.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Scl(a) => cmd_scl(&a, out),
        Command::Inspect(a) => cmd_inspect(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Formula(a) => cmd_formula(&a, out),
        Command::Histogram(a) => cmd_histogram(&a, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Domain(format!("output failed: {e}"))
}

fn parse(common: &Common) -> Result<(GroupSpec, Chain), Failure> {
    parse_with_group(&common.chain, common.group.as_deref()).map_err(|e| Failure::Usage(e.to_string()))
}

fn render_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(to_pq).collect();
    format!("({})", parts.join(", "))
}

fn cmd_scl(a: &SclArgs, out: &mut dyn Write) -> Outcome {
    let (spec, chain) = parse(&a.common)?;
    if let Some(path) = &a.verify {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
        let result = SclResult::from_json(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
        let report = verify_witness(&chain, &spec, &result);
        if report.ok() {
            writeln!(out, "witness ok: scl = {}", to_pq(&result.value)).map_err(io)?;
            return Ok(());
        }
        return Err(Failure::Domain(format!("witness rejected: {}", report.problems.join("; "))));
    }
    let result = scl_with(&chain, &spec, &a.engine.options()).map_err(|e| match e {
        EngineError::Pricing(p) if !a.engine.long => Failure::Domain(format!("{p}; rerun with --long")),
        other => other.into(),
    })?;
    if a.json {
        writeln!(out, "{}", result.to_json()).map_err(io)?;
        return Ok(());
    }
    writeln!(out, "scl = {}", to_pq(&result.value)).map_err(io)?;
    if a.witness {
        write_witness(&chain, &spec, &result, out).map_err(io)?;
    }
    Ok(())
}

fn write_witness(chain: &Chain, spec: &GroupSpec, result: &SclResult, out: &mut dyn Write) -> std::io::Result<()> {
    let problem = SclProblem::new(chain, spec, 1).expect("chain was already solved");
    // Circuit vertices are factor-local arc indices.
    writeln!(out, "scaling N = {}", to_pq(&result.scaling))?;
    writeln!(out, "chi = {}", to_pq(&result.chi))?;
    for (f, w) in result.factors.iter().enumerate() {
        let cone = &problem.cones[f];
        writeln!(out, "factor {f}: kappa = {}, |v| = {}", to_pq(&w.kappa), to_pq(&w.norm))?;
        writeln!(out, "  coords {}", cone.labels.join(" "))?;
        writeln!(out, "  v = {}", render_vec(&w.v))?;
        for term in &w.expression {
            writeln!(out, "  {} * disk {}", to_pq(&term.t), render_vec(&term.disk))?;
        }
        writeln!(out, "  remainder = {}", render_vec(&w.remainder))?;
        for term in &w.expression {
            if let Ok(circuits) = support_graph(cone, &term.disk).eulerian_circuits() {
                for c in circuits {
                    let arcs: Vec<String> = c.iter().map(|&t| format!("τ{}", t + 1)).collect();
                    writeln!(out, "  disk boundary {}", arcs.join(" "))?;
                }
            }
        }
    }
    for p in &result.polygons {
        let sides: Vec<String> = p.sides.iter().map(|&c| format!("{}@{}", problem.arcs.label(c), c.factor)).collect();
        writeln!(out, "junction polygon {} * {}", to_pq(&p.weight), sides.join(" "))?;
    }
    let report = verify_witness(chain, spec, result);
    writeln!(out, "witness {}", if report.ok() { "verified" } else { "REJECTED" })
}

fn parse_point(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).ok_or_else(|| Failure::Usage(format!("bad rational '{s}' in --profile"))))
        .collect()
}

fn cmd_inspect(a: &InspectArgs, out: &mut dyn Write) -> Outcome {
    let (spec, chain) = parse(&a.common)?;
    let problem = SclProblem::new(&chain, &spec, a.box_scale)?;
    if let Some(f) = a.factor {
        if f >= spec.num_factors() {
            return Err(Failure::Usage(format!("factor {f} out of range")));
        }
    }
    writeln!(out, "group {spec}").map_err(io)?;
    writeln!(out, "chain {}", problem.chain.render(&spec)).map_err(io)?;
    for (f, cone) in problem.cones.iter().enumerate() {
        if a.factor.is_some_and(|g| g != f) {
            continue;
        }
        let arcs = &problem.arcs;
        writeln!(out, "factor {f} {}", spec.factors()[f].name).map_err(io)?;
        for &t in &arcs.factors[f].taus {
            let tau = &arcs.taus[t];
            writeln!(out, "  τ{} = {:?}{}", tau.local, tau.element, if tau.abelian_loop { " (loop)" } else { "" })
                .map_err(io)?;
        }
        for (j, label) in cone.labels.iter().enumerate() {
            let c = arcs.coord(cone.coord_ref(j));
            let partner = match (c.partner, c.forced_zero) {
                _ if !c.is_genuine() => "dummy".into(),
                (_, true) => "forced zero".into(),
                (Some(p), _) if !arcs.junctions => format!("glued to {} in factor {}", arcs.label(p), p.factor),
                (Some(p), _) => format!("glued to {} in factor {} or around a junction polygon", arcs.label(p), p.factor),
                (None, false) => "glued around junction polygons".into(),
            };
            writeln!(out, "  {label} {partner}").map_err(io)?;
        }
        let rays = extremal_rays(cone);
        writeln!(out, "  rays over {}", cone.labels.join(" ")).map_err(io)?;
        for r in &rays {
            let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(out, "    ({})", parts.join(", ")).map_err(io)?;
        }
        let bound = disk_box(cone, &rays);
        let boxed: Vec<i64> = bound.iter().map(|x| x * a.box_scale).collect();
        writeln!(out, "  box {boxed:?}").map_err(io)?;
        let needs_model = a.disks || a.profile.is_some();
        if !needs_model {
            continue;
        }
        let limit = if a.disks { Some(a.max_disks) } else { None };
        let model = enumerate_disk_vectors_limited(cone, &boxed, limit);
        if a.disks {
            writeln!(out, "  disks {}{}", model.disks.len(), if model.complete { "" } else { " (truncated)" })
                .map_err(io)?;
            for d in &model.disks {
                let parts: Vec<String> = d.v.iter().zip(&cone.labels).map(|(x, l)| format!("{l}={x}")).collect();
                writeln!(out, "    {}", parts.join(" ")).map_err(io)?;
            }
        }
        if let Some(seg) = &a.profile {
            let (from, to) = seg
                .split_once(':')
                .ok_or_else(|| Failure::Usage("--profile expects 'start:end'".into()))?;
            let (from, to) = (parse_point(from)?, parse_point(to)?);
            if from.len() != cone.dim() || to.len() != cone.dim() {
                writeln!(out, "  profile skipped: factor has {} coordinates", cone.dim()).map_err(io)?;
                continue;
            }
            let profile = klein_profile(&model, cone, &from, &to).map_err(|e| Failure::Domain(e.to_string()))?;
            let bps: Vec<String> = profile.breakpoints().iter().map(to_pq).collect();
            writeln!(out, "  profile breakpoints [{}]", bps.join(", ")).map_err(io)?;
            for p in &profile.pieces {
                writeln!(
                    out,
                    "    [{}, {}] slope {} intercept {}",
                    to_pq(&p.from),
                    to_pq(&p.to),
                    to_pq(&p.slope),
                    to_pq(&p.intercept)
                )
                .map_err(io)?;
            }
        }
    }
    Ok(())
}

fn parse_range(text: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("--p expects 'from..to', got '{text}'"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let from: i64 = a.trim().parse().map_err(|_| bad())?;
    let to: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if from > to {
        return Err(bad());
    }
    Ok((from, to))
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Outcome {
    let (spec, chain) = parse(&a.common)?;
    let target = match &a.target {
        Some(t) => Some(parse_group_spec(t).map_err(|e| Failure::Usage(e.to_string()))?),
        None => None,
    };
    let line = parse_line(&a.line, &spec, target.as_ref()).map_err(|e| Failure::Usage(e.to_string()))?;
    let (from, to) = parse_range(&a.p)?;
    let table = sweep(&line, &chain, from, to, &a.engine.options());
    if a.json {
        writeln!(out, "{}", table.to_json()).map_err(io)?;
    } else {
        write!(out, "{}", table.to_csv()).map_err(io)?;
    }
    Ok(())
}

fn cmd_formula(a: &FormulaArgs, out: &mut dyn Write) -> Outcome {
    let f = match a.family {
        FormulaFamily::W => closed_form_w,
        FormulaFamily::Wprime => closed_form_wprime,
    };
    let value = f(a.a1, a.a2, a.b1, a.b2).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out, "scl = {}", to_pq(&value)).map_err(io)?;
    Ok(())
}

fn cmd_histogram(a: &HistogramArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let h = histogram(a.max);
    write!(out, "{}", h.to_csv()).map_err(io)?;
    if a.check == 0 {
        return Ok(());
    }
    let checks = check_sample(a.max, a.check, a.seed, &SclOptions::default());
    let bad: Vec<_> = checks.iter().filter(|c| !c.agrees()).collect();
    writeln!(err, "checked {} tuples with the engine: {} disagreements", checks.len(), bad.len()).map_err(io)?;
    for c in &bad {
        writeln!(err, "  {:?} {:?}: closed form {} engine {:?}", c.family, c.tuple, to_pq(&c.expected), c.computed)
            .map_err(io)?;
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain("engine disagrees with the closed form".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("scl").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn computes_a_value() {
        let (code, out, _) = call(&["scl", "--group", "Z(a)*Z(b)", "a^-2 + b^-2 + a^3 b^3 + a^-1 b^-1"]);
        assert_eq!((code, out.as_str()), (0, "scl = 2/3\n"));
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = call(&["scl", "ab"]);
        assert_eq!(code, 1);
        assert!(err.contains("chain is not a boundary"));
        assert_eq!(call(&["scl", "a^"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["formula", "w", "4", "-2", "3", "-1"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn formula_and_histogram() {
        assert_eq!(call(&["formula", "wprime", "5", "-2", "3", "-1"]).1, "scl = 7/9\n");
        assert_eq!(call(&["histogram", "--max", "2"]).1, "scl,count\n1/2,2\n");
    }

    #[test]
    fn ranges() {
        assert!(matches!(parse_range("1..4"), Ok((1, 4))));
        assert!(matches!(parse_range("2..=3"), Ok((2, 3))));
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("x").is_err());
    }
}
