use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use edsketch::lab::{self, ExperimentParams, ExperimentReport, Generator, InstanceSpec};
use edsketch::protocol::{encode_party, referee_decode, run_protocol, FullSketch, ProtocolParams, Verdict};
use edsketch::strings::{Alphabet, InputString};

#[derive(Parser)]
#[command(name = "edsketch", version, about = "Simultaneous sketches for exact edit distance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sketch one string.
    Encode {
        /// Token file: `n alphabet_size`, then the symbols.
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Referee: decode two sketches made with the same parameters.
    Decode {
        x: PathBuf,
        y: PathBuf,
        /// Alphabet size; decoded symbols outside it are rejected.
        #[arg(long)]
        alphabet: Option<u64>,
    },
    /// Run the protocol end to end, on two files or on planted pairs.
    Roundtrip {
        #[arg(long, requires = "y")]
        x: Option<PathBuf>,
        #[arg(long, requires = "x")]
        y: Option<PathBuf>,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Planted edits per pair; defaults to `k`.
        #[arg(long)]
        edits: Option<usize>,
        #[arg(long, default_value_t = 4)]
        alphabet: u64,
        #[arg(long)]
        tau_factor: Option<f64>,
        #[arg(long)]
        c_walk: Option<usize>,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Generate an instance pair.
    Gen {
        #[arg(long, value_parser = ["random_edits", "independent", "periodic_adversarial", "hamming_reduction_binary", "hamming_reduction_large", "self_similar"])]
        generator: String,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        alphabet: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Planted edits, or `k` of the adversarial family.
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        bits: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 4)]
        period: usize,
        #[arg(long, default_value_t = 8)]
        singletons: usize,
        /// Writes `PREFIX.x` and `PREFIX.y`.
        #[arg(long, default_value = "instance")]
        prefix: PathBuf,
    },
    /// Run a named Monte Carlo experiment.
    Experiment {
        /// Omit with `--list`.
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `key=value`, repeatable.
        #[arg(long = "param", short = 'p', value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[command(flatten)]
        out: ReportArgs,
    },
    /// Round trip success over a grid of walk-count factors and budgets.
    Calibrate {
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0])]
        tau_factors: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8])]
        c_walks: Vec<usize>,
    },
}

#[derive(Args)]
struct ProtocolArgs {
    /// Defaults to the input length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Shared randomness; both parties must use the same value.
    #[arg(long, default_value_t = 0)]
    seed: u128,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long)]
    c_walk: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Also write one CSV row per trial.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected key=value")?;
    let v: f64 = v.parse().map_err(|_| format!("{v:?} is not a number"))?;
    Ok((k.to_string(), v))
}

enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_string(path: &Path) -> Result<(InputString, Alphabet), Failure> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    InputString::read_tokens(BufReader::new(file)).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn verdict_code(v: &Verdict) -> ExitCode {
    if v.is_error() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit_report(report: &ExperimentReport, out: &ReportArgs) -> Result<(), Failure> {
    if let Some(path) = &out.csv {
        report.write_csv(BufWriter::new(File::create(path)?))?;
    }
    print_json(report)
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Encode { input, output, protocol } => {
            let (s, _) = read_string(&input)?;
            let mut params = ProtocolParams::new(protocol.n.unwrap_or(s.len()), protocol.k, protocol.delta, protocol.seed)?;
            if let Some(tau) = protocol.tau {
                params = params.with_tau(tau)?;
            }
            if let Some(c) = protocol.c_walk {
                params = params.with_c_walk(c)?;
            }
            let sketch = encode_party(&s, &params)?;
            std::fs::write(&output, sketch.to_bytes())?;
            print_json(&json!({ "output": output, "bytes": sketch.encoded_len(), "n": params.n, "k": params.k, "tau": params.tau }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decode { x, y, alphabet } => {
            let sx = FullSketch::from_bytes(&std::fs::read(&x)?)?;
            let sy = FullSketch::from_bytes(&std::fs::read(&y)?)?;
            let alphabet = alphabet.map(Alphabet::new).transpose()?;
            let verdict = referee_decode(&sx, &sy, alphabet)?;
            print_json(&verdict)?;
            Ok(verdict_code(&verdict))
        }
        Command::Roundtrip { x: Some(xp), y: Some(yp), k, delta, seed, tau_factor, c_walk, .. } => {
            let (x, ax) = read_string(&xp)?;
            let (y, ay) = read_string(&yp)?;
            let alphabet = if ax.size() >= ay.size() { ax } else { ay };
            let mut params = ProtocolParams::new(x.len(), k, delta, u128::from(seed))?;
            if let Some(f) = tau_factor {
                params = params.with_tau(edsketch::protocol::tau_for(f, x.len(), k, delta))?;
            }
            if let Some(c) = c_walk {
                params = params.with_c_walk(c)?;
            }
            let outcome = run_protocol(&x, &y, &params, Some(alphabet))?;
            print_json(&outcome.verdict)?;
            Ok(verdict_code(&outcome.verdict))
        }
        Command::Roundtrip { n, k, delta, trials, seed, edits, alphabet, tau_factor, c_walk, out, .. } => {
            let mut p = ExperimentParams::new(seed)
                .trials(trials)
                .set("n", n as f64)
                .set("k", k as f64)
                .set("delta", delta)
                .set("alphabet", alphabet as f64);
            for (key, v) in [("edits", edits.map(|e| e as f64)), ("tau_factor", tau_factor), ("c_walk", c_walk.map(|c| c as f64))] {
                if let Some(v) = v {
                    p = p.set(key, v);
                }
            }
            emit_report(&lab::run_experiment("roundtrip", &p)?, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { generator, n, alphabet, seed, k, bits, d, period, singletons, prefix } => {
            let g = match generator.as_str() {
                "random_edits" => Generator::RandomEdits { edits: k },
                "independent" => Generator::Independent,
                "periodic_adversarial" => Generator::PeriodicAdversarial { k },
                "hamming_reduction_binary" => Generator::HammingReductionBinary { bits, d },
                "hamming_reduction_large" => Generator::HammingReductionLarge { bits, d },
                "self_similar" => Generator::SelfSimilar { period, singletons },
                other => return Err(Failure::Usage(format!("unknown generator {other}"))),
            };
            let spec = InstanceSpec::new(g, n, alphabet, seed);
            let inst = lab::generate(&spec)?;
            let mut paths = Vec::new();
            for (suffix, s) in [("x", &inst.x), ("y", &inst.y)] {
                let mut path = prefix.clone().into_os_string();
                path.push(format!(".{suffix}"));
                let path = PathBuf::from(path);
                s.write_tokens(inst.alphabet, BufWriter::new(File::create(&path)?))?;
                paths.push(path);
            }
            print_json(&json!({ "spec": spec, "x": paths[0], "y": paths[1], "ground_truth": inst.ground_truth }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { list: true, .. } => {
            let listing: Vec<_> = lab::experiments()
                .iter()
                .map(|e| json!({ "name": e.name, "summary": e.summary, "default_trials": e.default_trials }))
                .collect();
            print_json(&listing)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { name: None, .. } => Err(Failure::Usage("an experiment name or --list is required".into())),
        Command::Experiment { name: Some(name), trials, seed, params, out, .. } => {
            let mut p = ExperimentParams::new(seed);
            if let Some(t) = trials {
                p = p.trials(t);
            }
            for (k, v) in params {
                p = p.set(&k, v);
            }
            emit_report(&lab::run_experiment(&name, &p)?, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate { n, k, delta, trials, seed, tau_factors, c_walks } => {
            let base = ExperimentParams::new(seed).trials(trials).set("n", n as f64).set("k", k as f64).set("delta", delta);
            let reports = lab::calibrate(&base, &tau_factors, &c_walks)?;
            print_json(&reports)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
