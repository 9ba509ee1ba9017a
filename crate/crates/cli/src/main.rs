use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use roadrules_core::agents::PolicyKind;
use roadrules_core::harness::{emit_trace, judge, run_with, Outcome, RunOptions};
use roadrules_core::rule_core::{Label, RuleBase, Situation};
use roadrules_core::rulebook::{
    bench_situation, check_consistency, load_corpus, load_rulefile, UK_HIGHWAY_SAMPLE,
};
use roadrules_core::simworld::SCENARIO_NAMES;

#[derive(Parser)]
#[command(name = "roadrules", version, about = "Rules-of-the-road advisor and virtual driving test")]
struct Cli {
    #[command(flatten)]
    source: RuleSourceArgs,

    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RuleSourceArgs {
    /// Named corpus, looked up in the corpus path and then among the built-in ones.
    #[arg(long, global = true, default_value = UK_HIGHWAY_SAMPLE, conflicts_with = "rules")]
    corpus: String,

    /// Rule file to load instead of a named corpus.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,

    /// Directories searched for `<corpus>.rules`.
    #[arg(long, global = true, env = "ROADRULES_CORPUS_PATH", hide_env_values = true)]
    corpus_path: Option<OsString>,
}

impl RuleSourceArgs {
    fn load(&self) -> Result<RuleBase, String> {
        match &self.rules {
            Some(path) => load_rulefile(path).map(|(rb, _)| rb),
            None => load_corpus(&self.corpus, self.corpus_path.as_deref()),
        }
        .map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the recommended directives for a situation.
    Query {
        #[arg(long, default_value = "standard")]
        context: String,
        /// Comma-separated belief atoms.
        #[arg(long, default_value = "")]
        beliefs: String,
        /// Comma-separated intention atoms.
        #[arg(long, default_value = "")]
        intentions: String,
    },
    /// Report contradictory `must` directives and duplicate rules.
    Check,
    /// Run one scenario and write its trace.
    Run {
        #[arg(long, value_parser = SCENARIO_NAMES)]
        scenario: String,
        #[arg(long, default_value = "reactive", value_parser = parse_agent)]
        agent: PolicyKind,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Step limit (defaults to the scenario's own).
        #[arg(long)]
        steps: Option<u32>,
        /// Trace file; standard output when absent.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print an ASCII frame per step to standard error.
        #[arg(long)]
        frames: bool,
    },
    /// Run every scenario for one agent and print the verdict.
    Test {
        #[arg(long, default_value = "reactive", value_parser = parse_agent)]
        agent: PolicyKind,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        steps: Option<u32>,
    },
    /// Time the fifteen-belief red-light query.
    Bench {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        iterations: u64,
    },
}

fn parse_agent(s: &str) -> Result<PolicyKind, String> {
    s.parse().map_err(|e: roadrules_core::agents::AgentError| e.to_string())
}

fn csv(list: &str) -> impl Iterator<Item = &str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Usage or load failure: exit status 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(Fatal(msg)) => {
            eprintln!("roadrules: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Fatal> {
    let rules = cli.source.load().map_err(Fatal)?;
    match &cli.command {
        Command::Query {
            context,
            beliefs,
            intentions,
        } => query(&rules, cli.json, context, beliefs, intentions),
        Command::Check => Ok(check(&rules, cli.json)),
        Command::Run {
            scenario,
            agent,
            seed,
            steps,
            trace,
            frames,
        } => run(&rules, cli.json, scenario, *agent, *seed, *steps, trace.as_ref(), *frames),
        Command::Test { agent, seed, steps } => test(&rules, cli.json, *agent, *seed, *steps),
        Command::Bench { iterations } => Ok(bench(&rules, cli.json, *iterations)),
    }
}

fn query(
    rules: &RuleBase,
    json: bool,
    context: &str,
    beliefs: &str,
    intentions: &str,
) -> Result<ExitCode, Fatal> {
    let situation = Situation::parse(context, csv(beliefs), csv(intentions))?;
    let advice = rules.advise(&situation);
    if json {
        println!(
            "{}",
            json!({
                "record": "query",
                "situation": situation,
                "directives": advice.directives,
                "unknown_atoms": advice.unknown_atoms,
            })
        );
    } else {
        for pair in &advice.directives {
            println!("{pair}");
        }
    }
    if !advice.unknown_atoms.is_empty() {
        let names: Vec<&str> = advice.unknown_atoms.iter().map(|a| a.as_str()).collect();
        eprintln!("note: atoms not in the corpus vocabulary: {}", names.join(", "));
    }
    Ok(ExitCode::SUCCESS)
}

fn check(rules: &RuleBase, json: bool) -> ExitCode {
    let report = check_consistency(rules);
    if json {
        let mut value = serde_json::to_value(&report).expect("report serializes");
        value["record"] = json!("check");
        value["clean"] = json!(report.is_clean());
        println!("{value}");
    } else {
        print!("{report}");
    }
    if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[allow(clippy::too_many_arguments)]
fn run(
    rules: &RuleBase,
    json: bool,
    scenario: &str,
    agent: PolicyKind,
    seed: u64,
    steps: Option<u32>,
    trace_path: Option<&PathBuf>,
    frames: bool,
) -> Result<ExitCode, Fatal> {
    let options = RunOptions {
        step_limit: steps,
        frames,
    };
    let trace = run_with(agent, scenario, seed, rules, options)?;
    for (i, frame) in trace.frames.iter().enumerate() {
        eprintln!("step {i}\n{frame}");
    }
    let text = emit_trace(&trace);
    let must = trace.count(Label::Must);
    let should = trace.count(Label::Should);
    match trace_path {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
            if json {
                println!(
                    "{}",
                    json!({
                        "record": "run",
                        "scenario": scenario,
                        "agent": agent,
                        "seed": seed,
                        "outcome": trace.outcome,
                        "steps": trace.steps.len(),
                        "must_violations": must,
                        "should_violations": should,
                        "trace": path,
                    })
                );
            } else {
                println!(
                    "{scenario} {agent} seed {seed}: {} after {} steps, {must} must / {should} should violations",
                    trace.outcome.as_str(),
                    trace.steps.len()
                );
            }
        }
        None => print!("{text}"),
    }
    let pass = trace.outcome == Outcome::GoalReached && must + should == 0;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn test(
    rules: &RuleBase,
    json: bool,
    agent: PolicyKind,
    seed: u64,
    steps: Option<u32>,
) -> Result<ExitCode, Fatal> {
    let options = RunOptions {
        step_limit: steps,
        frames: false,
    };
    let traces = SCENARIO_NAMES
        .iter()
        .map(|name| run_with(agent, name, seed, rules, options))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = judge(&traces)?;
    if json {
        println!("{}", verdict.summary_json());
    } else {
        print!("{}", verdict.table());
        for line in verdict.reason_lines() {
            println!("  {line}");
        }
    }
    Ok(if verdict.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench(rules: &RuleBase, json: bool, iterations: u64) -> ExitCode {
    let situation = bench_situation();
    let mut samples = Vec::with_capacity(iterations as usize);
    let mut directives = 0;
    let start = Instant::now();
    for _ in 0..iterations {
        let t = Instant::now();
        let out = rules.recommended(std::hint::black_box(&situation));
        samples.push(t.elapsed().as_nanos() as u64);
        directives = std::hint::black_box(out).len();
    }
    let total = start.elapsed().as_secs_f64();
    samples.sort_unstable();
    let pick = |q: f64| samples[((samples.len() - 1) as f64 * q).round() as usize];
    let (min, median, p99) = (samples[0], pick(0.5), pick(0.99));
    let per_second = iterations as f64 / total;
    if json {
        println!(
            "{}",
            json!({
                "record": "bench",
                "iterations": iterations,
                "rules": rules.len(),
                "directives": directives,
                "min_ns": min,
                "median_ns": median,
                "p99_ns": p99,
                "queries_per_second": per_second,
            })
        );
    } else {
        println!("rules: {}  directives per query: {directives}", rules.len());
        println!("iterations: {iterations}");
        println!("min: {:.3} us", min as f64 / 1e3);
        println!("median: {:.3} us", median as f64 / 1e3);
        println!("p99: {:.3} us", p99 as f64 / 1e3);
        println!("queries/s: {per_second:.0}");
    }
    ExitCode::SUCCESS
}
