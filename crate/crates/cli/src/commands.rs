use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use lop_core::asymptotics::{evaluate_limit, ObservationSet, Strategy, Trace};
use lop_core::multidist::{parse_ratio, Decision, LiftChoice, MultiDist};
use lop_core::oracle::{
    regression_report, run_suite, standardization_report, Check, CheckReport, CheckVerdict, TermGen,
};
use lop_core::redex::{self, Redex};
use lop_core::translate::Translation;
use lop_core::{Calculus, Term};
use rayon::prelude::*;
use serde_json::json;

use crate::{CheckArgs, EvalArgs, StepArgs, Suite, TranslateArgs, Variant};

fn default_obs(c: Calculus) -> &'static str {
    match c {
        Calculus::Cbv => "values",
        Calculus::Cbn => "hnf",
        Calculus::Bang => "surface-nf-bang",
    }
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

pub fn eval(a: EvalArgs) -> Result<ExitCode> {
    let c = a.calculus;
    let strategy = Strategy::parse(&a.strategy, c)?;
    let obs = ObservationSet::parse(a.obs.as_deref().unwrap_or(default_obs(c)), c)?
        .with_join_fuel(a.join_fuel);
    let epsilon = parse_ratio(&a.epsilon)?;
    let t = a.input.term(c)?;
    let (res, trace) = evaluate_limit(&MultiDist::unit(t), &strategy, &obs, a.max_steps, &epsilon)?;
    if let Some(path) = &a.trace_out {
        write_json(path, &trace.to_json())?;
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&res.to_json())?);
    } else {
        println!("{res}");
    }
    Ok(ExitCode::from(if res.converged { 0 } else { 2 }))
}

fn load_trace(path: &Path) -> Result<Trace> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("in {}", path.display()))?;
    let trace = Trace::from_json(&v).with_context(|| format!("in {}", path.display()))?;
    trace
        .replay()
        .with_context(|| format!("in {}", path.display()))?;
    Ok(trace)
}

pub fn step(a: StepArgs) -> Result<ExitCode> {
    let mut trace = if a.input.is_given() {
        let c = a.calculus.unwrap_or(Calculus::Cbv);
        Trace::new(c, "manual", MultiDist::unit(a.input.term(c)?))
    } else {
        match &a.trace {
            Some(p) if p.exists() => {
                let t = load_trace(p)?;
                if let Some(c) = a.calculus.filter(|&c| c != t.calculus) {
                    bail!("trace {} is in {}, not {c}", p.display(), t.calculus);
                }
                t
            }
            Some(p) => bail!("no input term and no trace at {}", p.display()),
            None => bail!("no input term: pass -e TERM, a file, or --trace FILE"),
        }
    };
    let c = trace.calculus;
    let state = trace.last().clone();
    println!("{state}");
    let listed: Vec<(usize, Redex)> = state
        .terms()
        .enumerate()
        .flat_map(|(i, t)| redex::redexes(t, c).into_iter().map(move |r| (i, r)))
        .collect();
    if listed.is_empty() {
        println!("no redexes");
    } else {
        if a.show_redexes || a.pick.is_none() {
            for (k, (i, r)) in listed.iter().enumerate() {
                let sub: &Term = state.entries()[*i]
                    .1
                    .at(&r.position)
                    .expect("redex position");
                println!("[{k}] entry {i}: {r}  {sub}");
            }
        }
        if let Some(k) = a.pick {
            let (i, r) = listed.get(k).ok_or_else(|| {
                anyhow!(
                    "no redex {k}: there are {} (0 to {})",
                    listed.len(),
                    listed.len() - 1
                )
            })?;
            let mut choice = LiftChoice::keep_all(state.len());
            choice.0[*i] = Decision::Reduce(r.clone());
            println!("-> {}", trace.extend(choice)?);
        }
    }
    if let Some(p) = &a.trace {
        write_json(p, &trace.to_json())?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn translate(a: TranslateArgs) -> Result<ExitCode> {
    let which = match (a.from, a.variant) {
        (Calculus::Cbv, Variant::Simple) => Translation::CbvSimple,
        (Calculus::Cbv, Variant::Surface) => Translation::CbvSurface,
        (Calculus::Bang, _) => Translation::Bang,
        (Calculus::Cbn, _) => Translation::Cbn,
    };
    let t = a.input.term(a.from)?;
    let image = which.apply(&t)?;
    if a.json {
        let v = json!({
            "translation": which.name(),
            "source": t.to_string(),
            "target": which.target(),
            "image": image.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{image}");
    }
    Ok(ExitCode::SUCCESS)
}

fn universe(a: &CheckArgs, c: Calculus) -> Vec<Term> {
    let size = a.size.unwrap_or(if c == Calculus::Bang { 8 } else { 9 });
    match a.seed {
        Some(seed) => TermGen::random(c, size, a.free_vars, seed).sample(a.count),
        None => TermGen::exhaustive(c, size, a.free_vars).terms(),
    }
}

#[derive(Default)]
struct Tally {
    pass: usize,
    fail: usize,
    budget: usize,
}

pub fn check(a: CheckArgs) -> Result<ExitCode> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()?;
    let out = Mutex::new((io::stdout(), Tally::default()));
    let sink = |mut r: CheckReport| {
        if r.seed.is_none() {
            r.seed = a.seed;
        }
        let mut guard = out.lock().expect("report sink");
        let (stdout, tally) = &mut *guard;
        match r.verdict {
            CheckVerdict::Pass => tally.pass += 1,
            CheckVerdict::Fail => tally.fail += 1,
            CheckVerdict::Budget => tally.budget += 1,
        }
        let _ = writeln!(stdout.lock(), "{}", r.to_json_line());
    };
    pool.install(|| -> Result<()> {
        match a.suite {
            Suite::Regressions => {
                for c in [Calculus::Cbv, Calculus::Cbn] {
                    sink(regression_report(c)?);
                }
            }
            Suite::Standardize => {
                let terms = universe(&a, a.calculus);
                let base = a.seed.unwrap_or(0);
                terms.par_iter().enumerate().for_each(|(i, t)| {
                    sink(standardization_report(
                        t,
                        a.calculus,
                        base.wrapping_add(i as u64),
                        a.length,
                        a.budget,
                    ))
                });
            }
            Suite::Simulate => {
                let translations: Vec<Translation> = match &a.translation {
                    Some(name) => vec![name.parse()?],
                    None => Translation::ALL
                        .into_iter()
                        .filter(|t| t.source() == a.calculus)
                        .collect(),
                };
                for tr in translations {
                    let terms = universe(&a, tr.source());
                    run_suite(Check::Simulation(tr), tr.source(), &terms, a.budget, &sink);
                }
            }
            suite => {
                let check = match suite {
                    Suite::Confluence => Check::Confluence,
                    Suite::Diamond => Check::Diamond,
                    Suite::Commute => Check::Commute,
                    Suite::Postpone => Check::Postponement,
                    Suite::Parallel => Check::Parallel,
                    _ => unreachable!("handled above"),
                };
                let c = check.input_calculus(a.calculus)?;
                run_suite(check, c, &universe(&a, c), a.budget, &sink);
            }
        }
        Ok(())
    })?;
    let (_, tally) = out.into_inner().expect("report sink");
    eprintln!(
        "{} pass, {} fail, {} budget",
        tally.pass, tally.fail, tally.budget
    );
    Ok(if tally.fail > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
