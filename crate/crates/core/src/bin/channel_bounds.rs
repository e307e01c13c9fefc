//! Command-line front end: bound sweeps, measure solves, diamond distances,
//! channel twirling, and the verification suites.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 solver flagged,
//! 3 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use channel_bounds::channels::{channel_to_json, parse_channel_json, KrausChannel};
use channel_bounds::diamond::diamond_distance;
use channel_bounds::entmeasures::{
    measure, parse_state_json, MeasureKind, OptimizerConfig,
};
use channel_bounds::linalg::SubsystemCut;
use channel_bounds::sweep::{run_sweep, render, OutputFormat, SweepConfig};
use channel_bounds::twirl::{one_design_deviation, twirl_channel, UnitaryRep};
use channel_bounds::verify::{run_suite, Suite};

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "channel-bounds", version, about = "Capacity bounds for finite-dimensional quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// RNG seed for all randomized paths
    #[arg(long, global = true, env = "CHANNEL_BOUNDS_SEED", default_value_t = 0)]
    seed: u64,
    /// Concurrency limit for sweep rows
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Solver tolerance (diamond-norm SDP)
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Output file; stdout summaries are printed either way
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for files: csv or json
    #[arg(long, global = true, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Bound computations over the mixed qubit channel family
    Bounds {
        #[command(subcommand)]
        cmd: BoundsCmd,
    },
    /// Relative-entropy entanglement measure of a state file
    Measure {
        /// rains, eppt, or er2x2
        kind: String,
        /// State JSON file: {"dims": [...], "matrix": [[[re,im],...],...]}
        state: PathBuf,
        /// Comma-separated subsystem indices on the left of the cut
        #[arg(long, default_value = "0")]
        left: String,
        /// Right side of the cut; defaults to all remaining subsystems
        #[arg(long)]
        right: Option<String>,
    },
    /// Diamond distance between two channels
    Diamond {
        /// Channel JSON file (first argument)
        channel_a: Option<PathBuf>,
        /// Channel JSON file (second argument)
        channel_b: Option<PathBuf>,
        /// Use the built-in mixed channel N_p instead of the first file
        #[arg(long)]
        np: Option<f64>,
        /// Use the built-in twirled channel instead of the second file
        #[arg(long)]
        np_twirled: Option<f64>,
    },
    /// Twirl a channel by a named unitary representation
    Twirl {
        /// Channel JSON file
        channel: Option<PathBuf>,
        /// Use the built-in mixed channel N_p instead of a file
        #[arg(long)]
        np: Option<f64>,
        /// Representation: pauli, ix, or iz
        #[arg(long, default_value = "pauli")]
        rep: String,
    },
    /// Run a verification suite: lemmas, twirl, continuity, overlap, amortized
    Verify {
        suite: String,
        /// Random samples per check
        #[arg(long, default_value_t = 30)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Sweep the bound report over a p-grid
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
}

/// Six significant digits for stdout; files keep full precision.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn read_file(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    if let Some(p) = path {
        std::fs::write(p, content).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn parse_indices(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|e| format!("bad index {s:?}: {e}")))
        .collect()
}

fn load_channel(
    file: Option<&PathBuf>,
    builtin_p: Option<f64>,
    what: &str,
) -> Result<KrausChannel, String> {
    match (file, builtin_p) {
        (_, Some(p)) => channel_bounds::channels::mixed_channel_np(p)
            .map_err(|e| format!("bad p for built-in channel: {e}")),
        (Some(path), None) => {
            let parsed = parse_channel_json(&read_file(path)?).map_err(|e| e.to_string())?;
            if parsed.tp_residual > 1e-8 {
                return Err(format!(
                    "channel in {} is not trace preserving (residual {:.2e})",
                    path.display(),
                    parsed.tp_residual
                ));
            }
            Ok(parsed.channel)
        }
        (None, None) => Err(format!("{what}: provide a channel file or a built-in flag")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version are successful exits
            if e.use_stderr() {
                let _ = e.print();
                return ExitCode::from(EXIT_USAGE);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };

    let mut opt = OptimizerConfig::default();
    opt.rng_seed = cli.global.seed;

    match cli.command {
        Command::Bounds { cmd: BoundsCmd::Sweep { p_min, p_max, steps } } => {
            cmd_sweep(&cli.global, &opt, p_min, p_max, steps)
        }
        Command::Measure { kind, state, left, right } => {
            cmd_measure(&cli.global, &opt, &kind, &state, &left, right.as_deref())
        }
        Command::Diamond { channel_a, channel_b, np, np_twirled } => {
            cmd_diamond(&cli.global, channel_a.as_ref(), channel_b.as_ref(), np, np_twirled)
        }
        Command::Twirl { channel, np, rep } => {
            cmd_twirl(&cli.global, channel.as_ref(), np, &rep)
        }
        Command::Verify { suite, samples } => cmd_verify(&cli.global, &opt, &suite, samples),
    }
}

fn cmd_sweep(g: &GlobalArgs, opt: &OptimizerConfig, p_min: f64, p_max: f64, steps: usize) -> ExitCode {
    let format = match OutputFormat::parse(&g.format) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let config = SweepConfig { p_min, p_max, steps, seed: g.seed, tol: g.tol, jobs: g.jobs };
    if let Err(e) = config.validate() {
        return fail(EXIT_USAGE, e);
    }
    let result = match run_sweep(&config, opt) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_SOLVER, e),
    };

    println!("p        upper_ska  upper_ppt_q  lower_coh  lower_rev  epsilon");
    for row in &result.rows {
        println!(
            "{:<8} {:<10} {:<12} {:<10} {:<10} {}",
            sig6(row.p),
            sig6(row.upper_ska),
            sig6(row.upper_ppt_q),
            sig6(row.lower_coherent),
            sig6(row.lower_rev_coherent),
            sig6(row.epsilon)
        );
    }
    for v in &result.violations {
        println!("violation: {v}");
    }

    let rendered = match render(&result.rows, format) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_SOLVER, e),
    };
    if let Err(e) = write_out(&g.out, &rendered) {
        return fail(EXIT_USAGE, e);
    }
    if result.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

fn cmd_measure(
    g: &GlobalArgs,
    opt: &OptimizerConfig,
    kind: &str,
    state_path: &PathBuf,
    left: &str,
    right: Option<&str>,
) -> ExitCode {
    let kind = match kind {
        "rains" => MeasureKind::Rains,
        "eppt" => MeasureKind::EPpt,
        "er2x2" => MeasureKind::ER2x2,
        other => return fail(EXIT_USAGE, format!("unknown measure kind {other:?}")),
    };
    let text = match read_file(state_path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let rho = match parse_state_json(&text) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let left_idx = match parse_indices(left) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let right_idx = match right {
        Some(r) => match parse_indices(r) {
            Ok(v) => v,
            Err(e) => return fail(EXIT_USAGE, e),
        },
        None => (0..rho.dims().len()).filter(|i| !left_idx.contains(i)).collect(),
    };
    let cut = SubsystemCut::new(left_idx, right_idx);

    let result = match measure(kind, &rho, &cut, opt) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    println!("value       {}", sig6(result.value));
    println!("certificate {}", sig6(result.certificate));
    println!("iterations  {}", result.iterations);
    println!("converged   {}", result.converged);

    let summary = serde_json::to_string_pretty(&result.summary()).expect("serializable");
    if let Err(e) = write_out(&g.out, &format!("{summary}\n")) {
        return fail(EXIT_USAGE, e);
    }
    if result.converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("solver flagged: certificate above tolerance or iteration limit hit");
        ExitCode::from(EXIT_SOLVER)
    }
}

fn cmd_diamond(
    g: &GlobalArgs,
    file_a: Option<&PathBuf>,
    file_b: Option<&PathBuf>,
    np: Option<f64>,
    np_twirled: Option<f64>,
) -> ExitCode {
    let a = match load_channel(file_a, np, "first channel") {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let b = match (file_b, np_twirled) {
        (_, Some(p)) => match channel_bounds::twirl::nbar_channel(p) {
            Ok(c) => c,
            Err(e) => return fail(EXIT_USAGE, e),
        },
        (Some(path), None) => match load_channel(Some(path), None, "second channel") {
            Ok(c) => c,
            Err(e) => return fail(EXIT_USAGE, e),
        },
        (None, None) => return fail(EXIT_USAGE, "second channel: provide a file or --np-twirled"),
    };

    let result = match diamond_distance(&a, &b, g.tol) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    println!("value       {}", sig6(result.value));
    println!("lower_bound {}", sig6(result.lower_bound));
    println!("bracket     {}", sig6(result.value - result.lower_bound));
    println!("iterations  {}", result.iterations);
    println!("converged   {}", result.converged);
    if result.converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("solver flagged: residual targets not met; bracket above is still valid");
        ExitCode::from(EXIT_SOLVER)
    }
}

fn cmd_twirl(g: &GlobalArgs, file: Option<&PathBuf>, np: Option<f64>, rep_name: &str) -> ExitCode {
    let n = match load_channel(file, np, "channel") {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let rep = match UnitaryRep::named(rep_name) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let twirled = match twirl_channel(&n, &rep) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    println!("rep                 {rep_name} ({} elements)", rep.len());
    println!("one_design_dev      {}", sig6(one_design_deviation(&rep)));
    println!("kraus_ops           {}", twirled.kraus_ops().len());
    println!("tp_residual         {}", sig6(twirled.trace_preservation_residual()));
    if let Err(e) = write_out(&g.out, &channel_to_json(&twirled)) {
        return fail(EXIT_USAGE, e);
    }
    ExitCode::SUCCESS
}

fn cmd_verify(g: &GlobalArgs, opt: &OptimizerConfig, suite: &str, samples: usize) -> ExitCode {
    let suite = match Suite::parse(suite) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let report = match run_suite(suite, g.seed, samples, opt) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_SOLVER, e),
    };
    println!("suite: {}", report.suite);
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        println!(
            "  [{status}] {:<40} margin {:>12} ({} samples)",
            c.name,
            sig6(c.margin),
            c.samples
        );
    }
    if report.passed() {
        println!("all checks passed");
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed");
        ExitCode::from(EXIT_VERIFY)
    }
}
