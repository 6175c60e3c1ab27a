//! Batch CLI for the simulation engines.
//!
//! Exit codes: 0 success, 1 circuit parse/read failure (or a failed
//! `verify`), 2 invalid flags or guard violations, 3 engine failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsim_core::{
    calc_amp, parse_circuit, simulate_dense, BasisState, Circuit, CircuitDocument, EngineMetrics,
    EngineRegistry, Error, InitialCondition, OutputMode, ResultMetrics, RunRequest, RunResult,
};

const EXIT_PARSE: u8 = 1;
const EXIT_FLAGS: u8 = 2;
const EXIT_ENGINE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qsim",
    version,
    about = "Quantum circuit simulator: path-integral, dense, and hybrid engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a circuit and print the outcome histogram.
    Run(RunArgs),
    /// Print final amplitudes of selected basis states.
    Amps(AmpsArgs),
    /// Print circuit statistics (width, gates, nontrivial count, branching).
    Stats(StatsArgs),
    /// Cross-check the path (and optionally hybrid) engine against the
    /// dense oracle.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Circuit file in the qsim text format.
    circuit: PathBuf,
    /// Input bitstring (most-significant qubit first); overrides the file's
    /// `input` directive.
    #[arg(long)]
    input: Option<String>,
    /// Engine: path, dense, or hybrid.
    #[arg(long, default_value = "path")]
    engine: String,
    #[arg(long, default_value_t = 1)]
    shots: u64,
    /// RNG seed; defaults to OS entropy and is echoed in the output.
    #[arg(long)]
    seed: Option<u64>,
    /// State-vector entry budget for the hybrid engine.
    #[arg(long)]
    mem_budget: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputArg::Text)]
    output: OutputArg,
    /// Stream one line per trajectory step to stderr (path engine).
    #[arg(long)]
    trace: bool,
    /// Worker threads for shot-level parallelism.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct AmpsArgs {
    circuit: PathBuf,
    /// Basis states to query, as bitstrings.
    #[arg(required = true)]
    targets: Vec<String>,
    #[arg(long)]
    input: Option<String>,
    /// Engine: path (recursive path sum) or dense (oracle).
    #[arg(long, default_value = "path")]
    engine: String,
}

#[derive(Args)]
struct StatsArgs {
    circuit: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    circuit: PathBuf,
    #[arg(long)]
    input: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Total-variation acceptance threshold.
    #[arg(long, default_value_t = 0.05)]
    tv: f64,
    /// Also check the hybrid engine at this budget.
    #[arg(long)]
    mem_budget: Option<usize>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Copy, Clone, ValueEnum)]
enum OutputArg {
    Text,
    Json,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn flags(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FLAGS,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    fn engine(error: Error) -> Self {
        Failure {
            code: EXIT_ENGINE,
            message: error.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Amps(args) => cmd_amps(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_document(path: &Path) -> Result<CircuitDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    parse_circuit(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn resolve_input(doc: &CircuitDocument, flag: Option<&str>) -> Result<BasisState, Failure> {
    let width = doc.circuit().width();
    match flag {
        Some(bits) => {
            let state = BasisState::from_bitstring(bits)
                .map_err(|e| Failure::flags(format!("--input: {e}")))?;
            if state.width() != width {
                return Err(Failure::flags(format!(
                    "--input has {} bits, circuit has {width} qubits",
                    state.width()
                )));
            }
            Ok(state)
        }
        None => doc.default_input().cloned().ok_or_else(|| {
            Failure::flags("no input: pass --input or add an `input` directive to the file")
        }),
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.unwrap_or_else(rand::random)
}

fn cmd_run(args: RunArgs) -> Result<u8, Failure> {
    if args.shots == 0 {
        return Err(Failure::flags("--shots must be at least 1"));
    }
    if args.jobs == 0 {
        return Err(Failure::flags("--jobs must be at least 1"));
    }
    let registry = EngineRegistry::with_builtins();
    let Some(engine) = registry.get(&args.engine) else {
        return Err(Failure::flags(format!(
            "unknown engine '{}' (available: {})",
            args.engine,
            registry.names().join(", ")
        )));
    };
    if args.engine == "hybrid" {
        match args.mem_budget {
            None => return Err(Failure::flags("--engine hybrid requires --mem-budget")),
            Some(0) => return Err(Failure::flags("--mem-budget must be at least 1")),
            Some(_) => {}
        }
    }

    let doc = load_document(&args.circuit)?;
    let input = resolve_input(&doc, args.input.as_deref())?;
    let seed = resolve_seed(args.seed);

    let mut request = RunRequest::new(doc.circuit(), input, args.shots, seed);
    request.jobs = args.jobs;
    request.mem_budget = args.mem_budget;
    request.trace = args.trace;

    let started = Instant::now();
    let output = engine.run(&request).map_err(Failure::engine)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;

    for (shot, trace) in &output.traces {
        for record in trace {
            eprintln!(
                "trace shot={shot} pc={} state={} |amp|^2={:.6} p={:.6}",
                record.pc,
                record.state,
                record.amplitude.norm_sqr(),
                record.chosen_probability
            );
        }
    }

    let histogram: BTreeMap<String, u64> = output
        .histogram
        .iter()
        .map(|(state, &count)| (state.to_string(), count))
        .collect();
    let result = RunResult::new(
        engine.name(),
        args.shots,
        seed,
        histogram,
        ResultMetrics {
            calc_amp_calls: output.metrics.calc_amp_calls,
            max_depth: output.metrics.max_depth,
            peak_frames: output.metrics.peak_frames,
            largest_alloc: output.metrics.largest_alloc,
            switch_pc: output.switch_pc,
            snapshot_size: output.snapshot_size,
        },
        elapsed_ms,
    )
    .map_err(Failure::engine)?;

    let mode = match args.output {
        OutputArg::Text => OutputMode::Text,
        OutputArg::Json => OutputMode::Json,
    };
    println!("{}", qsim_core::format_result(&result, mode));
    Ok(0)
}

fn cmd_amps(args: AmpsArgs) -> Result<u8, Failure> {
    if args.engine != "path" && args.engine != "dense" {
        return Err(Failure::flags(format!(
            "amps supports --engine path or dense, got '{}'",
            args.engine
        )));
    }
    let doc = load_document(&args.circuit)?;
    let input = resolve_input(&doc, args.input.as_deref())?;
    let width = doc.circuit().width();

    let mut targets = Vec::with_capacity(args.targets.len());
    for raw in &args.targets {
        let state = BasisState::from_bitstring(raw)
            .map_err(|e| Failure::flags(format!("target: {e}")))?;
        if state.width() != width {
            return Err(Failure::flags(format!(
                "target '{raw}' has {} bits, circuit has {width} qubits",
                state.width()
            )));
        }
        targets.push(state);
    }

    let amplitudes: Vec<_> = if args.engine == "dense" {
        let sv = simulate_dense(doc.circuit(), &input).map_err(Failure::engine)?;
        targets.iter().map(|t| sv.amplitude(t)).collect()
    } else {
        let init = InitialCondition::SingleState(input);
        let mut metrics = EngineMetrics::default();
        let mut out = Vec::with_capacity(targets.len());
        for target in &targets {
            let amp = calc_amp(doc.circuit(), &init, doc.circuit().len(), target, &mut metrics)
                .map_err(Failure::engine)?;
            out.push(amp);
        }
        out
    };

    for (target, amp) in targets.iter().zip(&amplitudes) {
        println!(
            "{target} re={:.12} im={:.12} |amp|={:.12}",
            amp.re,
            amp.im,
            amp.norm()
        );
    }
    Ok(0)
}

fn cmd_stats(args: StatsArgs) -> Result<u8, Failure> {
    let doc = load_document(&args.circuit)?;
    let stats = doc.circuit().stats();
    let bound = match stats.leaf_bound() {
        Some(b) => b.to_string(),
        None => format!(
            "~2^{:.0}",
            stats.nontrivial_count as f64 * (stats.max_branching as f64).log2()
        ),
    };
    println!("{stats} bound={bound}");
    Ok(0)
}

fn tv_distance(
    histogram: &BTreeMap<BasisState, u64>,
    shots: u64,
    expected: &BTreeMap<BasisState, f64>,
) -> f64 {
    let mut states: std::collections::BTreeSet<&BasisState> = histogram.keys().collect();
    states.extend(expected.keys());
    0.5 * states
        .into_iter()
        .map(|s| {
            let observed = *histogram.get(s).unwrap_or(&0) as f64 / shots as f64;
            let reference = *expected.get(s).unwrap_or(&0.0);
            (observed - reference).abs()
        })
        .sum::<f64>()
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    const WIDTH_GUARD: usize = 20;
    const AMP_SWEEP_GUARD: usize = 8;
    const AMP_TOLERANCE: f64 = 1e-9;

    if args.shots == 0 {
        return Err(Failure::flags("--shots must be at least 1"));
    }
    let doc = load_document(&args.circuit)?;
    let circuit: &Circuit = doc.circuit();
    if circuit.width() > WIDTH_GUARD {
        return Err(Failure::flags(format!(
            "verify is guarded to {WIDTH_GUARD} qubits (circuit has {})",
            circuit.width()
        )));
    }
    let input = resolve_input(&doc, args.input.as_deref())?;
    let seed = resolve_seed(args.seed);
    println!("seed: {seed}");

    let dense = simulate_dense(circuit, &input)
        .map_err(Failure::engine)?
        .distribution()
        .map_err(Failure::engine)?;

    let mut report = String::new();
    let mut pass = true;

    let init = InitialCondition::SingleState(input.clone());
    if circuit.width() <= AMP_SWEEP_GUARD {
        let sv = simulate_dense(circuit, &input).map_err(Failure::engine)?;
        let mut metrics = EngineMetrics::default();
        let mut worst = 0.0f64;
        for value in 0..1u64 << circuit.width() {
            let target = BasisState::from_value(circuit.width(), value).unwrap();
            let path_amp = calc_amp(circuit, &init, circuit.len(), &target, &mut metrics)
                .map_err(Failure::engine)?;
            worst = worst.max((path_amp - sv.amplitude(&target)).norm());
        }
        let ok = worst <= AMP_TOLERANCE;
        pass &= ok;
        writeln!(
            report,
            "amplitude deviation (path vs dense, exhaustive over {} states): {worst:.3e} [{}]",
            1u64 << circuit.width(),
            if ok { "ok" } else { "FAIL" }
        )
        .unwrap();
    } else {
        writeln!(
            report,
            "amplitude sweep skipped (width {} > {AMP_SWEEP_GUARD})",
            circuit.width()
        )
        .unwrap();
    }

    let outcome = qsim_core::sample_parallel(circuit, &init, args.shots, seed, args.jobs)
        .map_err(Failure::engine)?;
    let tv = tv_distance(&outcome.histogram, args.shots, &dense);
    let ok = tv <= args.tv;
    pass &= ok;
    writeln!(
        report,
        "tv distance (path, {} shots, vs dense): {tv:.4} [{}]",
        args.shots,
        if ok { "ok" } else { "FAIL" }
    )
    .unwrap();

    if let Some(budget) = args.mem_budget {
        if budget == 0 {
            return Err(Failure::flags("--mem-budget must be at least 1"));
        }
        let hybrid =
            qsim_core::run_hybrid_parallel(circuit, &input, budget, args.shots, seed, args.jobs)
                .map_err(Failure::engine)?;
        let tv = tv_distance(&hybrid.histogram, args.shots, &dense);
        let ok = tv <= args.tv;
        pass &= ok;
        writeln!(
            report,
            "tv distance (hybrid, budget {budget}, switch_pc {}): {tv:.4} [{}]",
            hybrid.switch_pc,
            if ok { "ok" } else { "FAIL" }
        )
        .unwrap();
    }

    print!("{report}");
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { EXIT_PARSE })
}
