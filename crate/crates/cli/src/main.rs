mod codec;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use encbound::bitcodes::{BitString, PackedBits};
use encbound::bounds::{ParamSpec, BOUNDS};
use encbound::experiments::{fmt_g17, to_csv, to_json, ExperimentReport, EXPERIMENTS};
use encbound::suite::{run_suite, CriterionResult, SUITES};
use serde_json::{json, Value};

use codec::CodecParams;

const DEFAULT_SEED: u64 = 0;
const DEFAULT_CODEC_TRIALS: u64 = 10_000;

#[derive(Parser)]
#[command(
    name = "encbound",
    version,
    about = "Tail bounds from encoding arguments, with codecs and simulators to check them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a tail-bound calculator and print the bound as JSON.
    Bound {
        id: String,
        /// Parameters as key=value.
        #[arg(value_name = "KEY=VALUE")]
        pairs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Encode, decode or roundtrip a codec.
    Codec {
        id: String,
        #[arg(value_parser = codec::MODES)]
        mode: String,
        /// key=value parameters, then inputs for encode/decode.
        #[arg(value_name = "ARGS")]
        args: Vec<String>,
        /// Read the codeword to decode from a packed-bits file.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a registered experiment and print its report.
    Experiment {
        id: String,
        /// Parameters as key=value; `trials=` and `seed=` are accepted too.
        #[arg(value_name = "KEY=VALUE")]
        pairs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a fixed battery of checks with pinned seeds.
    Suite {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Number of trials (experiments default to their registered count).
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// More key=value parameters.
    #[arg(long, value_name = "KEY=VALUE", num_args = 1.., action = ArgAction::Append)]
    params: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Failures mapped onto the exit-code contract.
enum Failure {
    Usage(String),
    Violation(String),
}

impl From<encbound::Error> for Failure {
    fn from(e: encbound::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn describe_params(params: &[ParamSpec]) -> String {
    params
        .iter()
        .map(|p| match p.default {
            Some(d) => format!("{}={d}", p.name),
            None => p.name.to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn bound_help() -> String {
    let mut s = String::from("Calculators (parameters, with defaults where optional):\n");
    for b in BOUNDS {
        s.push_str(&format!("  {:<22} {}\n  {:<22}   {}\n", b.id, b.about, "", describe_params(b.params)));
    }
    s
}

fn experiment_help() -> String {
    let mut s = String::from("Experiments (parameters, with defaults where optional):\n");
    for e in EXPERIMENTS {
        s.push_str(&format!(
            "  {:<22} {} [trials={}]\n  {:<22}   {}\n",
            e.id,
            e.about,
            e.default_trials,
            "",
            describe_params(e.params)
        ));
    }
    s.push_str("\nExit status: 0 pass or asymptotic-info, 1 usage error, 2 bound violated.\n");
    s
}

fn codec_help() -> String {
    let mut s = String::from("Codecs:\n");
    for (id, about) in codec::CODECS {
        s.push_str(&format!("  {id:<12} {about}\n"));
    }
    s.push_str(&format!(
        "\nModes: {}.\nInteger codes take max={} for roundtrips. Random roundtrips default to {} trials, seed {}.\n\
         encode prints the codeword as 0/1, or writes packed bytes with --out; decode reads a 0/1 string or --input.\n\
         Exit status: 0 ok, 1 usage error, 2 roundtrip failure.\n",
        codec::MODES.join(", "),
        codec::DEFAULT_MAX,
        DEFAULT_CODEC_TRIALS,
        DEFAULT_SEED
    ));
    s
}

fn suite_help() -> String {
    format!(
        "Suites: {}.\nPer-criterion lines go to stderr; the report goes to stdout or --out.\n\
         Exit status: 0 all passed, 1 usage error, 2 some criterion failed.\n",
        SUITES.join(", ")
    )
}

fn command() -> clap::Command {
    Cli::command()
        .mut_subcommand("bound", |c| c.after_help(bound_help()))
        .mut_subcommand("experiment", |c| c.after_help(experiment_help()))
        .mut_subcommand("codec", |c| c.after_help(codec_help()))
        .mut_subcommand("suite", |c| c.after_help(suite_help()))
}

/// Splits `key=value` tokens; anything without `=` is returned as an input.
fn split_pairs(tokens: &[String]) -> Result<(BTreeMap<String, String>, Vec<String>), Failure> {
    let mut pairs = BTreeMap::new();
    let mut inputs = Vec::new();
    for t in tokens {
        match t.split_once('=') {
            Some((k, v)) if !k.is_empty() => {
                if pairs.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(usage(format!("parameter `{k}` given twice")));
                }
            }
            _ => inputs.push(t.clone()),
        }
    }
    Ok((pairs, inputs))
}

fn numeric(pairs: BTreeMap<String, String>) -> Result<BTreeMap<String, f64>, Failure> {
    pairs
        .into_iter()
        .map(|(k, v)| match v.parse::<f64>() {
            Ok(x) => Ok((k, x)),
            Err(_) => Err(usage(format!("parameter `{k}`: `{v}` is not a number"))),
        })
        .collect()
}

/// Takes `key` out of the pairs as a count, accepting forms like `1e5`.
fn take_count(pairs: &mut BTreeMap<String, String>, key: &str, flag: Option<u64>) -> Result<Option<u64>, Failure> {
    let Some(v) = pairs.remove(key) else { return Ok(flag) };
    if flag.is_some() {
        return Err(usage(format!("`{key}` given both as --{key} and {key}=")));
    }
    let parsed = v.parse::<u64>().ok().or_else(|| {
        v.parse::<f64>().ok().filter(|x| x.fract() == 0.0 && *x >= 0.0 && *x < 2f64.powi(64)).map(|x| x as u64)
    });
    parsed.map(Some).ok_or_else(|| usage(format!("`{key}={v}` is not a non-negative integer")))
}

fn all_pairs(positional: &[String], common: &Common) -> Result<(BTreeMap<String, String>, Vec<String>), Failure> {
    let tokens: Vec<String> = positional.iter().chain(&common.params).cloned().collect();
    split_pairs(&tokens)
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// One CSV row from the scalar fields of a JSON object; nested objects become
/// `prefix.key` columns.
fn flat_csv(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            Value::Null => out.push((prefix.into(), String::new())),
            Value::String(s) => out.push((prefix.into(), csv_field(s))),
            Value::Number(n) => out.push((prefix.into(), n.as_f64().map_or_else(|| n.to_string(), fmt_g17))),
            other => out.push((prefix.into(), other.to_string())),
        }
    }
    let mut cols = Vec::new();
    walk("", value, &mut cols);
    let header: Vec<_> = cols.iter().map(|c| c.0.as_str()).collect();
    let row: Vec<_> = cols.iter().map(|c| c.1.as_str()).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn no_inputs(inputs: &[String]) -> Result<(), Failure> {
    match inputs.first() {
        Some(t) => Err(usage(format!("expected key=value, got `{t}`"))),
        None => Ok(()),
    }
}

fn run_bound(id: &str, positional: &[String], common: &Common) -> Result<(), Failure> {
    let (pairs, inputs) = all_pairs(positional, common)?;
    no_inputs(&inputs)?;
    let bound = encbound::bounds::evaluate(id, &numeric(pairs)?)?;
    let text = match common.format {
        Format::Json => to_json(&bound) + "\n",
        Format::Csv => flat_csv(&serde_json::from_str(&to_json(&bound)).expect("own JSON parses")),
    };
    emit(common, &text)
}

fn run_experiment(id: &str, positional: &[String], common: &Common) -> Result<(), Failure> {
    let (mut pairs, inputs) = all_pairs(positional, common)?;
    no_inputs(&inputs)?;
    let trials = take_count(&mut pairs, "trials", common.trials)?;
    let seed = take_count(&mut pairs, "seed", common.seed)?.unwrap_or(DEFAULT_SEED);
    let report = encbound::experiments::run_experiment(id, &numeric(pairs)?, trials, seed)?;
    let text = match common.format {
        Format::Json => to_json(&report) + "\n",
        Format::Csv => to_csv(std::slice::from_ref(&report)),
    };
    emit(common, &text)?;
    check_verdict(&report)
}

fn check_verdict(report: &ExperimentReport) -> Result<(), Failure> {
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{}: verdict {}", report.experiment, report.verdict)))
    }
}

fn run_codec(id: &str, mode: &str, args: &[String], input: Option<&PathBuf>, common: &Common) -> Result<(), Failure> {
    let (mut pairs, inputs) = all_pairs(args, common)?;
    let trials = take_count(&mut pairs, "trials", common.trials)?;
    let seed = take_count(&mut pairs, "seed", common.seed)?;
    let params = CodecParams::new(pairs);
    if mode != "decode" && input.is_some() {
        return Err(usage("--input is only read by decode"));
    }
    if !mode.starts_with("roundtrip") && (trials.is_some() || seed.is_some()) {
        return Err(usage(format!("{mode} takes no trials or seed")));
    }
    match mode {
        "roundtrip-exhaustive" | "roundtrip-random" => {
            no_inputs(&inputs)?;
            let mut out = json!({ "codec": id, "mode": mode, "params": params.to_json() });
            let rt = if mode == "roundtrip-exhaustive" {
                if trials.is_some() || seed.is_some() {
                    return Err(usage("roundtrip-exhaustive takes no trials or seed"));
                }
                codec::roundtrip_exhaustive(id, &params)?
            } else {
                let (trials, seed) = (trials.unwrap_or(DEFAULT_CODEC_TRIALS), seed.unwrap_or(DEFAULT_SEED));
                out["trials"] = json!(trials);
                out["seed"] = json!(seed);
                codec::roundtrip_random(id, &params, trials, seed)?
            };
            for (k, v) in
                [("domain", rt.domain), ("skipped", rt.skipped), ("failures", rt.failures), ("distinct", rt.distinct)]
            {
                out[k] = json!(v);
            }
            // Random inputs can repeat, so only exhaustive runs must see one
            // codeword per input.
            let broken = rt.failures > 0 || (mode == "roundtrip-exhaustive" && rt.distinct != rt.domain);
            let text = match common.format {
                Format::Json => to_json(&out) + "\n",
                Format::Csv => flat_csv(&out),
            };
            emit(common, &text)?;
            if broken {
                return Err(Failure::Violation(format!("{id}: {} roundtrip failures", rt.failures)));
            }
            Ok(())
        }
        "encode" => {
            if inputs.is_empty() {
                return Err(usage("encode needs an input"));
            }
            let bits = codec::encode(id, &params, &inputs.join(" "))?;
            match &common.out {
                Some(path) => std::fs::write(path, bits.to_packed().to_file_bytes())?,
                None => println!("{bits}"),
            }
            Ok(())
        }
        "decode" => {
            let bits = match (input, inputs.as_slice()) {
                (Some(path), []) => BitString::from_packed(&PackedBits::from_file_bytes(&std::fs::read(path)?)?)?,
                (None, [one]) => one.parse::<BitString>()?,
                _ => return Err(usage("decode needs exactly one 0/1 string or --input PATH")),
            };
            emit(common, &(codec::decode(id, &params, &bits)? + "\n"))
        }
        _ => unreachable!("clap restricts the mode"),
    }
}

fn suite_csv(results: &[CriterionResult]) -> String {
    let mut s = String::from("criterion,title,passed,check,check_passed,detail\n");
    for r in results {
        for c in &r.checks {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.id,
                csv_field(r.title),
                r.passed,
                csv_field(&c.label),
                c.passed,
                csv_field(&c.detail)
            ));
        }
    }
    s
}

fn run_suite_cmd(name: &str, common: &Common) -> Result<(), Failure> {
    if common.trials.is_some() || common.seed.is_some() || !common.params.is_empty() {
        return Err(usage("suites use pinned trials, seeds and parameters"));
    }
    let results = run_suite(name)?;
    for r in &results {
        eprintln!("{}", r.line());
    }
    let text = match common.format {
        Format::Json => to_json(&results) + "\n",
        Format::Csv => suite_csv(&results),
    };
    emit(common, &text)?;
    match results.iter().filter(|r| !r.passed).map(|r| r.id).collect::<Vec<_>>() {
        failed if failed.is_empty() => Ok(()),
        failed => Err(Failure::Violation(format!("failed criteria: {}", failed.join(", ")))),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ENCBOUND_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| usage(format!("ENCBOUND_THREADS={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| usage(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Bound { id, pairs, common } => run_bound(id, pairs, common),
        Command::Codec { id, mode, args, input, common } => run_codec(id, mode, args, input.as_ref(), common),
        Command::Experiment { id, pairs, common } => run_experiment(id, pairs, common),
        Command::Suite { name, common } => run_suite_cmd(name, common),
    }
}

fn exit_code(outcome: &Result<(), Failure>) -> u8 {
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(_)) => 1,
        Err(Failure::Violation(_)) => 2,
    }
}

fn main() -> ExitCode {
    let cli = match command().try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = run(cli);
    match &outcome {
        Ok(()) => {}
        Err(Failure::Usage(msg)) => eprintln!("error: {msg}"),
        Err(Failure::Violation(msg)) => eprintln!("violation: {msg}"),
    }
    ExitCode::from(exit_code(&outcome))
}
