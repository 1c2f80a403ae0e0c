use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use drtcalc_core::lts::{default_max_states, explore};
use drtcalc_core::model::prepare;
use drtcalc_core::rewrite::{linearize, to_basic_term, to_ts_basic};
use drtcalc_core::{Model, Term};
use drtcalc_par::{run_report, CheckKind, ParParams};
use serde_json::json;

#[derive(Parser)]
#[command(name = "drtcalc", version, about = "Process algebra with discrete relative time: state spaces, equivalences, normal forms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a model file, then print it back.
    Parse { file: PathBuf },
    /// Explore a process and dump its transition system.
    Lts {
        file: PathBuf,
        #[arg(long)]
        proc: String,
        #[arg(long)]
        max_states: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a process to a normal form.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        proc: String,
        #[arg(long, value_enum)]
        form: Form,
    },
    /// Run every check directive of a model file.
    Check {
        file: PathBuf,
        #[arg(long)]
        max_states: Option<usize>,
        /// Print a JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Build the PAR protocol and run one of its checks.
    Par {
        #[arg(long = "tS", default_value_t = 1)]
        t_s: u32,
        #[arg(long = "tR", default_value_t = 1)]
        t_r: u32,
        #[arg(long = "tK", default_value_t = 1)]
        t_k: u32,
        #[arg(long = "tL", default_value_t = 1)]
        t_l: u32,
        #[arg(long = "tSp", default_value_t = 5)]
        t_sp: u32,
        #[arg(long = "tRp", default_value_t = 1)]
        t_rp: u32,
        #[arg(long, default_value_t = 1)]
        data: usize,
        #[arg(long, value_enum)]
        check: ParCheck,
        /// Horizon for the delay sets of the performance check.
        #[arg(long, default_value_t = 20)]
        horizon: u32,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check axiom soundness on random closed instances.
    Axioms {
        #[arg(long, default_value = "all")]
        axiom: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Basic,
    TsBasic,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParCheck {
    Functional,
    Performance,
    SpecMatch,
}

fn load(path: &Path) -> Result<Model> {
    let src = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let model = drtcalc_dsl::parse(&src).map_err(|e| anyhow!("{}:{e}", path.display()))?;
    model.validate().map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok(model)
}

fn proc_of(model: &Model, name: &str) -> Result<Term> {
    let t = model.proc(name).ok_or_else(|| anyhow!("no process named {name}"))?;
    Ok(prepare(t)?)
}

fn cmd_parse(file: &Path) -> Result<bool> {
    let m = load(file)?;
    for (name, spec) in &m.specs {
        println!("spec {name} {{");
        for (x, t) in spec.equations() {
            println!("  {x} = {t};");
        }
        println!("}}");
    }
    for (name, t) in m.procs() {
        println!("proc {name} = {t};");
    }
    for d in &m.checks {
        let expect = d.expect.map(|a| format!(" expect {a}")).unwrap_or_default();
        println!("check {} {} ~ {}{expect};", d.relation, d.lhs, d.rhs);
    }
    Ok(true)
}

fn cmd_lts(file: &Path, name: &str, max: Option<usize>, out: Option<&Path>) -> Result<bool> {
    let m = load(file)?;
    let t = proc_of(&m, name)?;
    let l = explore(&m.sem(), &t, max.unwrap_or_else(default_max_states))?;
    match out {
        Some(p) => std::fs::write(p, l.dump()).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{}", l.dump()),
    }
    Ok(true)
}

fn cmd_normalize(file: &Path, name: &str, form: Form) -> Result<bool> {
    let m = load(file)?;
    let t = proc_of(&m, name)?;
    match form {
        Form::Basic => println!("{}", to_basic_term(&m.table, &t)?),
        Form::TsBasic => println!("{}", to_ts_basic(&to_basic_term(&m.table, &t)?)?),
        Form::Linear => {
            let (spec, root) = linearize(&m.sem(), &t, default_max_states())?;
            println!("root {root}");
            for (x, rhs) in spec.equations() {
                println!("{x} = {rhs};");
            }
        }
    }
    Ok(true)
}

fn cmd_check(file: &Path, max: Option<usize>, json_out: bool) -> Result<bool> {
    let m = load(file)?;
    let max = max.unwrap_or_else(default_max_states);
    // compute everything first so an error leaves no partial output
    let mut results = Vec::new();
    for d in &m.checks {
        let v = m.run_check(d, max).with_context(|| format!("check on line {}", d.line))?;
        results.push((d, v));
    }
    let all = results.iter().all(|(d, v)| d.passes(v));
    if json_out {
        let items: Vec<_> = results
            .iter()
            .map(|(d, v)| {
                json!({
                    "line": d.line,
                    "relation": d.relation.name(),
                    "lhs": d.lhs.to_string(),
                    "rhs": d.rhs.to_string(),
                    "expect": d.expect,
                    "verdict": v,
                    "pass": d.passes(v),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&json!({ "checks": items, "pass": all }))?);
    } else {
        for (d, v) in &results {
            let status = if d.passes(v) { "PASS" } else { "FAIL" };
            let expect = d.expect.map(|a| format!(" (expected {a})")).unwrap_or_default();
            println!("{status} line {}: {} {} ~ {}: {}{expect}", d.line, d.relation, d.lhs, d.rhs, v.answer);
            if !d.passes(v) {
                for e in &v.evidence {
                    println!("    {e}");
                }
            }
        }
    }
    Ok(all)
}

fn cmd_par(p: ParParams, check: ParCheck, horizon: u32, report: Option<&Path>) -> Result<bool> {
    let kind = match check {
        ParCheck::Functional => CheckKind::Functional,
        ParCheck::Performance => CheckKind::Performance,
        ParCheck::SpecMatch => CheckKind::SpecMatch,
    };
    let r = run_report(&p, kind, horizon)?;
    println!("states {} cycle_ok {}", r.states, r.cycle_ok);
    if let Some(v) = &r.functional {
        println!("functional (untimed-rb against buffer): {}", v.answer);
    }
    if let Some(v) = &r.performance {
        println!("system ~rb-ts X2: {}", v.system_x2_rbts.answer);
        println!("system ~da-rb X3: {}", v.system_x3_da.answer);
        println!("X2 ~rb-ts X3: {}", v.x2_x3_rbts.answer);
        println!("X2 ~da-rb X3: {}", v.x2_x3_da.answer);
        println!("X3 ~da-rb iterated X3: {}", v.x3_iterated_da.answer);
    }
    if let Some(v) = &r.expansion {
        println!("spec-match (rb-ts against expanded X): {}", v.answer);
    }
    if let Some(t) = r.first_delivery {
        println!("first delivery: {t}");
    }
    if let (Some(d), Some(g)) = (&r.delivery_delays, &r.post_delivery_gaps) {
        println!("delivery delays: {d:?}");
        println!("post-delivery gaps: {g:?}");
    }
    if let Some(path) = report {
        std::fs::write(path, serde_json::to_string_pretty(&r)?).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(r.ok)
}

fn cmd_axioms(axiom: &str, samples: usize, seed: u64, json_out: bool) -> Result<bool> {
    let ids: Vec<&str> = if axiom == "all" { drtcalc_harness::AXIOM_IDS.to_vec() } else { vec![axiom] };
    let mut reports = Vec::new();
    for id in ids {
        match drtcalc_harness::check_axiom_soundness(id, samples, seed) {
            Some(r) => reports.push(r),
            None => bail!("unknown axiom {id}"),
        }
    }
    let all = reports.iter().all(|r| r.ok());
    if json_out {
        println!("{}", serde_json::to_string_pretty(&json!({ "axioms": reports, "pass": all }))?);
    } else {
        let mut out = std::io::stdout().lock();
        for r in &reports {
            writeln!(out, "{} {:<7} {:<6} {}/{}", if r.ok() { "PASS" } else { "FAIL" }, r.axiom, r.relation, r.passed, r.samples)?;
            for f in &r.failures {
                writeln!(out, "    #{}: {}  vs  {}: {:?} {}", f.index, f.lhs, f.rhs, f.answer, f.detail.join("; "))?;
            }
        }
    }
    Ok(all)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Parse { file } => cmd_parse(&file),
        Cmd::Lts { file, proc, max_states, output } => cmd_lts(&file, &proc, max_states, output.as_deref()),
        Cmd::Normalize { file, proc, form } => cmd_normalize(&file, &proc, form),
        Cmd::Check { file, max_states, json } => cmd_check(&file, max_states, json),
        Cmd::Par { t_s, t_r, t_k, t_l, t_sp, t_rp, data, check, horizon, report } => {
            cmd_par(ParParams { data, t_s, t_r, t_k, t_l, t_sp, t_rp }, check, horizon, report.as_deref())
        }
        Cmd::Axioms { axiom, samples, seed, json } => cmd_axioms(&axiom, samples, seed, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
