//! `qcr`: entropy, coherence, discord and bound computations on states
//! stored as JSON files, plus seeded Monte Carlo inequality sweeps.
//!
//! Exit codes: 0 success and every checked inequality holds; 1 an
//! inequality is violated beyond tolerance (a counterexample bundle is
//! written); 2 input, usage or validation error.

mod bundle;
mod fail;
mod files;
mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use itertools::Itertools;

use qcr_core::{
    bound_b_ordered, bound_b_with_policy, check_coherence_relation, check_discord_relation,
    check_multipartite_conditional, check_tripartite_pair, conditional_entropy,
    post_measurement_conditional_entropy, rel_entropy_coherence, signals_entanglement,
    thermal_discord, thermal_discord_identity, von_neumann_entropy, BoundPolicy, DensityMatrix,
    MultipartiteBoundSet, ProjectiveMeasurement, RelationOptions, RelationReport,
};

use bundle::Counterexample;
use fail::CliResult;
use files::{read_measurements, read_state};
use output::{fmt_entropic, fmt_sig, print_bound, print_report, Unit};

#[derive(Parser)]
#[command(
    name = "qcr",
    version,
    about = "Quantum coherence, discord and conditional-entropy toolkit",
    long_about = "Computes von Neumann entropy, relative-entropy coherence, thermal discord \
                  and the measurement-overlap bound b for finite-dimensional states stored as \
                  JSON files, and verifies the complementarity inequalities tying them \
                  together, one-shot or over seeded Monte Carlo ensembles."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Ordering policy for the bound b. Absent means automatic: exhaustive
/// search for up to 5 measurements, the given order beyond that.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// Use the measurements exactly in the order supplied.
    GivenOrder,
    /// Search all orderings for the smallest b.
    BestOrder,
}

fn policy(opt: Option<PolicyArg>) -> BoundPolicy {
    match opt {
        None => BoundPolicy::Auto,
        Some(PolicyArg::GivenOrder) => BoundPolicy::GivenOrder,
        Some(PolicyArg::BestOrder) => BoundPolicy::BestOrder,
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundSetArg {
    /// Bound over measurements 1..N, matching the telescoped derivation.
    Tail,
    /// Bound over all N+1 measurements.
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Print the von Neumann entropy of a state.
    Entropy {
        /// State file (JSON: dims, re, im).
        state: PathBuf,
        /// Display in nats instead of bits.
        #[arg(long)]
        nats: bool,
    },
    /// Per-basis relative-entropy coherence and its lower-bound inequality.
    Coherence {
        /// State file (JSON: dims, re, im).
        state: PathBuf,
        /// At least two measurement files on the full state dimension.
        #[arg(num_args = 2.., required = true)]
        measurements: Vec<PathBuf>,
        /// Verdict tolerance in bits.
        #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
        tolerance: f64,
        /// Ordering policy for the bound b.
        #[arg(long, value_enum)]
        b_policy: Option<PolicyArg>,
        /// Display entropic quantities in nats.
        #[arg(long)]
        nats: bool,
    },
    /// Per-basis thermal discord and its lower-bound inequality.
    Discord {
        /// State file (JSON: dims, re, im).
        state: PathBuf,
        /// At least two measurement files on the measured subsystem.
        #[arg(num_args = 2.., required = true)]
        measurements: Vec<PathBuf>,
        /// Index of the measured subsystem; all others act as memory.
        #[arg(long, default_value_t = 0)]
        measured: usize,
        /// Verdict tolerance in bits.
        #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
        tolerance: f64,
        /// Ordering policy for the bound b.
        #[arg(long, value_enum)]
        b_policy: Option<PolicyArg>,
        /// Display entropic quantities in nats.
        #[arg(long)]
        nats: bool,
    },
    /// Post-measurement conditional-entropy inequality, one memory per
    /// measurement. Expects N+1 measurements on an (N+2)-party state; the
    /// three-party two-measurement case is dispatched to its own relation.
    Multi {
        /// State file (JSON: dims, re, im).
        state: PathBuf,
        /// Measurement files on the first subsystem, one per memory party.
        #[arg(num_args = 2.., required = true)]
        measurements: Vec<PathBuf>,
        /// Verdict tolerance in bits.
        #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
        tolerance: f64,
        /// Ordering policy for the bound b.
        #[arg(long, value_enum)]
        b_policy: Option<PolicyArg>,
        /// Which measurements feed the bound.
        #[arg(long, value_enum, default_value_t = BoundSetArg::Tail)]
        b_set: BoundSetArg,
        /// Display entropic quantities in nats.
        #[arg(long)]
        nats: bool,
    },
    /// The measurement-overlap bound b of a basis family.
    Bound {
        /// At least two measurement files of equal dimension.
        #[arg(num_args = 2.., required = true)]
        measurements: Vec<PathBuf>,
        /// Ordering policy for the bound b.
        #[arg(long, value_enum)]
        b_policy: Option<PolicyArg>,
        /// Display -log2(b) in nats.
        #[arg(long)]
        nats: bool,
    },
    /// Run a seeded Monte Carlo sweep described by a JSON config file.
    Sweep {
        /// Sweep config file (JSON).
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`qcr ... | head`) instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Entropy { state, nats } => cmd_entropy(&state, Unit::from_flag(nats)),
        Command::Coherence {
            state,
            measurements,
            tolerance,
            b_policy,
            nats,
        } => cmd_coherence(
            &state,
            &measurements,
            relation_options(tolerance, b_policy, None),
            Unit::from_flag(nats),
        ),
        Command::Discord {
            state,
            measurements,
            measured,
            tolerance,
            b_policy,
            nats,
        } => cmd_discord(
            &state,
            &measurements,
            measured,
            relation_options(tolerance, b_policy, None),
            Unit::from_flag(nats),
        ),
        Command::Multi {
            state,
            measurements,
            tolerance,
            b_policy,
            b_set,
            nats,
        } => cmd_multi(
            &state,
            &measurements,
            relation_options(tolerance, b_policy, Some(b_set)),
            Unit::from_flag(nats),
        ),
        Command::Bound {
            measurements,
            b_policy,
            nats,
        } => cmd_bound(&measurements, policy(b_policy), Unit::from_flag(nats)),
        Command::Sweep { config, seed, out } => cmd_sweep(&config, seed, out),
    }
}

fn relation_options(
    tolerance: f64,
    b_policy: Option<PolicyArg>,
    b_set: Option<BoundSetArg>,
) -> RelationOptions {
    RelationOptions {
        tolerance,
        bound_policy: policy(b_policy),
        bound_set: match b_set {
            None | Some(BoundSetArg::Tail) => MultipartiteBoundSet::TailMeasurements,
            Some(BoundSetArg::All) => MultipartiteBoundSet::AllMeasurements,
        },
    }
}

/// Shared tail of the verdict commands: success exits 0; a violation
/// writes a replayable bundle beside the working directory and exits 1.
fn verdict_exit(
    report: RelationReport,
    measured: Option<usize>,
    memory: Option<Vec<usize>>,
    rho: &DensityMatrix,
    ms: &[ProjectiveMeasurement],
) -> CliResult<ExitCode> {
    if report.holds {
        return Ok(ExitCode::SUCCESS);
    }
    let bundle = Counterexample::new(report, 0, None, measured, memory, rho, ms);
    let path = bundle.write(Path::new("."))?;
    eprintln!(
        "inequality violated; counterexample written: {}",
        path.display()
    );
    Ok(ExitCode::from(1))
}

fn cmd_entropy(state: &Path, unit: Unit) -> CliResult<ExitCode> {
    let rho = read_state(state)?;
    let s = von_neumann_entropy(&rho)?;
    println!("{}", fmt_sig(s * unit.scale()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_coherence(
    state: &Path,
    measurements: &[PathBuf],
    opts: RelationOptions,
    unit: Unit,
) -> CliResult<ExitCode> {
    let rho = read_state(state)?;
    let ms = read_measurements(measurements)?;

    println!(
        "S(rho):      {}",
        fmt_entropic(von_neumann_entropy(&rho)?, unit)
    );
    println!("coherence per basis:");
    for (i, m) in ms.iter().enumerate() {
        let c = rel_entropy_coherence(&rho, m)?;
        println!("  [{i}] {}: {}", m.label(), fmt_entropic(c, unit));
    }

    let report = check_coherence_relation(&rho, &ms, &opts)?;
    print_report(&report, unit);
    verdict_exit(report, None, None, &rho, &ms)
}

fn cmd_discord(
    state: &Path,
    measurements: &[PathBuf],
    measured: usize,
    opts: RelationOptions,
    unit: Unit,
) -> CliResult<ExitCode> {
    let rho = read_state(state)?;
    let ms = read_measurements(measurements)?;
    let parties = rho.layout().subsystem_count();
    let memory: Vec<usize> = (0..parties).filter(|&i| i != measured).collect();

    let cond = conditional_entropy(&rho, &memory)?;
    let entangled = if signals_entanglement(cond, opts.tolerance) {
        " (negative: entanglement across the cut)"
    } else {
        ""
    };
    println!("S(A|B):      {}{entangled}", fmt_entropic(cond, unit));

    println!("discord per basis:");
    for (i, m) in ms.iter().enumerate() {
        let breakdown = thermal_discord(&rho, m, measured)?;
        let identity = thermal_discord_identity(&rho, m, measured)?;
        println!("  [{i}] {}:", m.label());
        println!(
            "    avg conditional entropy:   {}",
            fmt_entropic(breakdown.avg_conditional_entropy, unit)
        );
        println!(
            "    dephased marginal entropy: {}",
            fmt_entropic(breakdown.post_meas_marginal_entropy, unit)
        );
        println!(
            "    joint entropy:             {}",
            fmt_entropic(breakdown.joint_entropy, unit)
        );
        println!(
            "    discord:                   {}",
            fmt_entropic(breakdown.discord, unit)
        );
        println!(
            "    identity-route residual:   {:.3e} bits",
            (breakdown.discord - identity).abs()
        );
    }

    let report = check_discord_relation(&rho, &ms, measured, &memory, &opts)?;
    print_report(&report, unit);
    verdict_exit(report, Some(measured), Some(memory), &rho, &ms)
}

fn cmd_multi(
    state: &Path,
    measurements: &[PathBuf],
    opts: RelationOptions,
    unit: Unit,
) -> CliResult<ExitCode> {
    let rho = read_state(state)?;
    let ms = read_measurements(measurements)?;
    let parties = rho.layout().subsystem_count();

    println!("conditional entropy per measurement:");
    for (k, m) in ms.iter().enumerate() {
        // Measurement k is scored against its own memory, subsystem k+1.
        let s = post_measurement_conditional_entropy(&rho, m, 0, &[k + 1])?;
        println!(
            "  [{k}] {} | memory {}: {}",
            m.label(),
            k + 1,
            fmt_entropic(s, unit)
        );
    }

    let report = if parties == 3 && ms.len() == 2 {
        check_tripartite_pair(&rho, &ms[0], &ms[1], &opts)?
    } else {
        check_multipartite_conditional(&rho, &ms, &opts)?
    };
    print_report(&report, unit);
    verdict_exit(report, Some(0), None, &rho, &ms)
}

fn cmd_bound(measurements: &[PathBuf], policy: BoundPolicy, unit: Unit) -> CliResult<ExitCode> {
    let ms = read_measurements(measurements)?;
    let result = bound_b_with_policy(&ms, policy)?;
    print_bound(&result, unit);

    // Small families get the full per-ordering table.
    let n = ms.len();
    let orderings: usize = (1..=n).product();
    if orderings <= 24 {
        println!("per ordering:");
        for perm in (0..n).permutations(n) {
            let ordered: Vec<ProjectiveMeasurement> = perm.iter().map(|&i| ms[i].clone()).collect();
            let one = bound_b_ordered(&ordered)?;
            let tags = perm
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "  [{tags}]  b: {}  -log2(b): {}",
                fmt_sig(one.b),
                fmt_entropic(one.neg_log2_b, unit)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> CliResult<ExitCode> {
    let summary = sweep::run(config, seed, out)?;
    if summary.violations > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
