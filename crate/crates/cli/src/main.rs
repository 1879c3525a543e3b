//! Batch front end: synthesize C controllers from BLIF relations, verify
//! them against the cube-list oracle, and report sharing statistics.
//!
//! Exit status: 0 success, 1 usage or input errors, 2 internal invariant
//! violations, 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ctrlsynth::blif::{self, BlifModel};
use ctrlsynth::codegen::{self, BlockProgram};
use ctrlsynth::dot;
use ctrlsynth::mutate::{self, Mutation};
use ctrlsynth::oracle::{self, OracleError, VerifyMode};
use ctrlsynth::solver::{self, ControllerSpec, SolvedController};

#[derive(Parser)]
#[command(
    name = "ctrlsynth",
    about = "Synthesize WCET-bounded C controllers from boolean control relations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// BLIF file holding the control relation as an on-set cube cover.
    blif: PathBuf,
    /// Comma-separated state variable names, most significant first.
    #[arg(long, value_delimiter = ',', required = true)]
    state: Vec<String>,
    /// Comma-separated action variable names; the order fixes bit priority.
    #[arg(long, value_delimiter = ',', required = true)]
    action: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the relation and emit the controller as C source.
    Synth {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Path of the emitted C file.
        #[arg(long)]
        out: PathBuf,
        /// Also export the solved functions as a DOT graph.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Also write a key=value synthesis report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the synthesized controller against the cube-list ground truth.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Enumerate every state (requires n + r within the exhaustive cap).
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Check this many seeded random states instead.
        #[arg(long)]
        samples: Option<u64>,
        /// Seed for sampled mode.
        #[arg(long, conflicts_with = "exhaustive")]
        seed: Option<u64>,
        /// Fault-injection hook for tests: corrupt the program before
        /// verification (flip:<block>, swap:<block> or init:<entry>).
        #[arg(long, hide = true)]
        mutate: Option<String>,
    },
    /// Print the synthesis statistics row for the instance.
    Stats {
        #[command(flatten)]
        instance: InstanceArgs,
    },
}

enum AppError {
    /// Bad input: unreadable files, parse errors, bad variable lists.
    Input(String),
    /// A violated internal contract; not reachable from well-formed input.
    Internal(String),
}

fn main() -> ExitCode {
    let code = match std::panic::catch_unwind(run) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("internal error: unexpected panic");
            2
        }
    };
    ExitCode::from(code)
}

fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(AppError::Input(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(AppError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, AppError> {
    match cli.command {
        Command::Synth {
            instance,
            out,
            dot,
            report,
        } => cmd_synth(&instance, &out, dot.as_deref(), report.as_deref()),
        Command::Verify {
            instance,
            exhaustive,
            samples,
            seed,
            mutate,
        } => cmd_verify(&instance, exhaustive, samples, seed, mutate.as_deref()),
        Command::Stats { instance } => cmd_stats(&instance),
    }
}

struct Loaded {
    model: BlifModel,
    spec: ControllerSpec,
    solved: SolvedController,
    program: BlockProgram,
}

fn load(instance: &InstanceArgs) -> Result<Loaded, AppError> {
    let text = std::fs::read_to_string(&instance.blif)
        .map_err(|e| AppError::Input(format!("cannot read {}: {e}", instance.blif.display())))?;
    let model = blif::parse_blif(&text)
        .map_err(|e| AppError::Input(format!("{}: {e}", instance.blif.display())))?;
    let mut spec = blif::build_spec(&model, &instance.state, &instance.action)
        .map_err(|e| AppError::Input(e.to_string()))?;
    // past this point failures are bugs, not bad input
    let solved =
        solver::solve_functional_eq(&mut spec).map_err(|e| AppError::Internal(e.to_string()))?;
    let program = codegen::generate_program(&spec, &solved);
    Ok(Loaded {
        model,
        spec,
        solved,
        program,
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), AppError> {
    std::fs::write(path, content)
        .map_err(|e| AppError::Input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_synth(
    instance: &InstanceArgs,
    out: &Path,
    dot_path: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<u8, AppError> {
    let loaded = load(instance)?;
    write_file(out, &codegen::emit_c_source(&loaded.program))?;
    if let Some(path) = dot_path {
        let labels: Vec<String> = (1..=loaded.spec.r()).map(|i| format!("f{i}")).collect();
        let text = dot::emit_dot(&loaded.spec.manager, &loaded.solved.functions, &labels)
            .map_err(|e| AppError::Internal(e.to_string()))?;
        write_file(path, &text)?;
    }
    if let Some(path) = report_path {
        let report = codegen::compute_stats(&loaded.spec, &loaded.solved, &loaded.program);
        let (cpu_seconds, peak_mem_bytes) = resource_usage();
        let content = format!(
            "{}cpu_seconds={cpu_seconds:.6}\npeak_mem_bytes={peak_mem_bytes}\n",
            report.key_value_lines()
        );
        write_file(path, &content)?;
    }
    Ok(0)
}

fn cmd_verify(
    instance: &InstanceArgs,
    exhaustive: bool,
    samples: Option<u64>,
    seed: Option<u64>,
    mutate_spec: Option<&str>,
) -> Result<u8, AppError> {
    let loaded = load(instance)?;
    let mode = if exhaustive {
        VerifyMode::Exhaustive
    } else if let Some(samples) = samples {
        VerifyMode::Sampled {
            samples,
            seed: seed.unwrap_or(oracle::DEFAULT_SEED),
        }
    } else if loaded.spec.n() + loaded.spec.r() <= oracle::EXHAUSTIVE_CAP {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Sampled {
            samples: 1000,
            seed: seed.unwrap_or(oracle::DEFAULT_SEED),
        }
    };
    let program = match mutate_spec {
        None => loaded.program,
        Some(text) => {
            let mutation = Mutation::parse(text).map_err(|e| AppError::Input(e.to_string()))?;
            mutate::apply_mutation(&loaded.program, mutation)
                .map_err(|e| AppError::Input(e.to_string()))?
        }
    };
    let outcome =
        oracle::verify_controller(&loaded.model, &loaded.spec, &loaded.solved, &program, mode)
            .map_err(|e| match e {
                OracleError::TooManyVariables(_) => AppError::Input(e.to_string()),
                other => AppError::Internal(other.to_string()),
            })?;
    println!("{outcome}");
    Ok(if outcome.pass { 0 } else { 3 })
}

fn cmd_stats(instance: &InstanceArgs) -> Result<u8, AppError> {
    let loaded = load(instance)?;
    let report = codegen::compute_stats(&loaded.spec, &loaded.solved, &loaded.program);
    let (cpu_seconds, peak_mem_bytes) = resource_usage();
    println!("r CPU MEM |K| |F_unsh| |Sw| %");
    println!(
        "{} {:.2e} {:.2e} {} {} {} {:.2}",
        loaded.spec.r(),
        cpu_seconds,
        peak_mem_bytes as f64,
        report.k_nodes,
        report.f_unshared,
        report.sw_blocks,
        report.gain_percent
    );
    Ok(0)
}

/// CPU time and peak resident set of this process so far.
fn resource_usage() -> (f64, u64) {
    unsafe {
        let mut usage: libc::rusage = std::mem::zeroed();
        if libc::getrusage(libc::RUSAGE_SELF, &mut usage) != 0 {
            return (0.0, 0);
        }
        let cpu = usage.ru_utime.tv_sec as f64
            + usage.ru_utime.tv_usec as f64 * 1e-6
            + usage.ru_stime.tv_sec as f64
            + usage.ru_stime.tv_usec as f64 * 1e-6;
        // ru_maxrss is in kilobytes on Linux
        (cpu, usage.ru_maxrss as u64 * 1024)
    }
}
