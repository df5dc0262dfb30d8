//! `basis-exchange`: solver, brute-force checks, instance generator and self-test.
//!
//! Exit codes: 0 success, 1 invalid input, 2 infeasible pair, 3 internal error or
//! potential counterexample, 4 capacity exceeded, 5 self-test failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use basis_exchange::format::{
    CrossCheck, DistanceRecord, EquitableRecord, GabowRecord, InstanceFile, MonotoneRecord, ReportFile,
    SolveRecord, White2Record,
};
use basis_exchange::generators::{all_compatible_pairs, Family, GeneratorConfig};
use basis_exchange::harness::{Harness, Scale};
use basis_exchange::oracle::{
    bf_exchange_distance, bf_longest_monotone, equitable_check, equitable_sampled, gabow_ordering,
    white2_equivalent, CyclicOrdering, Distance, Equitability, OracleCaps,
};
use basis_exchange::{
    all_bases, compatible, verify_sequence, BasisPairInstance, Error, SolveResult, Solver, SplitRepresentation,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "basis-exchange", version, about = "Shortest symmetric basis exchanges in split matroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Node cap for breadth-first searches.
    #[arg(long, default_value_t = OracleCaps::default().max_nodes)]
    cap_nodes: usize,
    /// Rank cap for depth-first and backtracking searches.
    #[arg(long, default_value_t = OracleCaps::default().max_rank)]
    cap_rank: usize,
}

impl Common {
    fn caps(&self) -> OracleCaps {
        OracleCaps {
            max_nodes: self.cap_nodes,
            max_rank: self.cap_rank,
            ..OracleCaps::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Shortest exchange sequence for every pair in the instance.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also run the brute-force oracles and record the comparison.
        #[arg(long)]
        cross_check: bool,
    },
    /// Breadth-first exchange distance.
    DistanceBf {
        #[command(flatten)]
        common: Common,
    },
    /// Longest strictly monotone sequence, compared against brute force.
    LongestMonotone {
        #[command(flatten)]
        common: Common,
    },
    /// Cyclic orderings for each pair (A1, A2), or for all ordered basis pairs.
    CheckGabow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        witness: WitnessArg,
    },
    /// Finite distance exactly for compatible pairs.
    CheckWhite2 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        witness: WitnessArg,
    },
    /// Balanced splitting bases for every subset.
    CheckEquitable {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        witness: WitnessArg,
        /// Seed for the sampled check used above the subset cap.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Write a reproducible instance file.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target number of hyperedges.
        #[arg(long, default_value_t = 0)]
        density: usize,
        /// Number of random compatible pairs to include.
        #[arg(long, default_value_t = 0)]
        pairs: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, default_value_t = Scale::Small)]
        scale: Scale,
        /// Where to write the first failing case; standard error when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Args)]
struct WitnessArg {
    /// Where to write a replayable witness if a check fails; standard error when omitted.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(String),
    #[error("potential counterexample: {0}")]
    Counterexample(String),
    #[error("{0}")]
    Selftest(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Input(_)) | CliError::Io(_) => 1,
            CliError::Core(Error::Infeasible(_)) => 2,
            CliError::Core(Error::Internal(_)) | CliError::Counterexample(_) => 3,
            CliError::Core(Error::Capacity(_)) => 4,
            CliError::Selftest(_) => 5,
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Solve { common, cross_check } => cmd_solve(&common, cross_check),
        Command::DistanceBf { common } => cmd_distance_bf(&common),
        Command::LongestMonotone { common } => cmd_longest_monotone(&common),
        Command::CheckGabow { common, witness } => cmd_check_gabow(&common, &witness),
        Command::CheckWhite2 { common, witness } => cmd_check_white2(&common, &witness),
        Command::CheckEquitable {
            common,
            witness,
            seed,
            samples,
        } => cmd_check_equitable(&common, &witness, seed, samples),
        Command::Gen {
            family,
            n,
            r,
            seed,
            density,
            pairs,
            output,
        } => cmd_gen(GeneratorConfig::new(family, n, r, seed, density), pairs, output.as_deref()),
        Command::Selftest {
            scale,
            output,
            inject_fault,
        } => cmd_selftest(scale, output.as_deref(), inject_fault),
    }
}

struct Loaded {
    file: InstanceFile,
    rep: SplitRepresentation,
}

fn load(path: &Path) -> CliResult<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let file = InstanceFile::from_json(&text)?;
    let rep = file.representation()?;
    let violations = rep.validate();
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        return Err(Error::Input(format!("{} violated split conditions", violations.len())).into());
    }
    Ok(Loaded { file, rep })
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("cannot write report: {e}"))),
            _ => Ok(()),
        },
    }
}

fn emit<R: Serialize>(common: &Common, loaded: &Loaded, command: &str, records: Vec<R>) -> CliResult {
    let report = ReportFile {
        instance: loaded.file.name.clone(),
        command: command.to_string(),
        records,
    };
    write_text(common.output.as_deref(), &report.to_json())
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k.min(n)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All bases, refusing when `C(n, r)` exceeds the node cap.
fn bases_within_caps(rep: &SplitRepresentation, caps: &OracleCaps) -> CliResult<Vec<basis_exchange::ElementSet>> {
    let candidates = binomial(rep.size(), rep.rank());
    if candidates > caps.max_nodes as u128 {
        return Err(Error::Capacity(format!(
            "enumerating {candidates} candidate bases exceeds the node cap {}",
            caps.max_nodes
        ))
        .into());
    }
    Ok(all_bases(rep))
}

/// The listed pairs, or every compatible pair when the file lists none.
fn pairs_or_all(loaded: &Loaded, caps: &OracleCaps) -> CliResult<Vec<BasisPairInstance>> {
    let pairs = loaded.file.checked_pairs()?;
    if !pairs.is_empty() {
        return Ok(pairs);
    }
    let bases = bases_within_caps(&loaded.rep, caps)?;
    if (bases.len() as u128).pow(2) > caps.max_nodes as u128 {
        return Err(Error::Capacity(format!("{} bases give too many pairs to enumerate", bases.len())).into());
    }
    Ok(all_compatible_pairs(&loaded.rep, false))
}

fn micros(start: Instant) -> u64 {
    start.elapsed().as_micros().try_into().unwrap_or(u64::MAX)
}

fn cmd_solve(common: &Common, cross_check: bool) -> CliResult {
    let loaded = load(&common.instance)?;
    let caps = common.caps();
    let solver = Solver::new(&loaded.rep)?;
    let mut records = Vec::new();
    for pair in pairs_or_all(&loaded, &caps)? {
        let start = Instant::now();
        let result = solver.solve(&pair)?;
        let mut record = SolveRecord::new(pair, &result, micros(start));
        if cross_check {
            let check = cross_check_record(&loaded.rep, &pair, &result, &caps)?;
            if !check.agrees {
                return Err(CliError::Core(Error::Internal(format!(
                    "solver disagrees with brute force on {pair:?}: {check:?}"
                ))));
            }
            record.cross_check = Some(check);
        }
        records.push(record);
    }
    emit(common, &loaded, "solve", records)
}

fn cross_check_record(
    rep: &SplitRepresentation,
    pair: &BasisPairInstance,
    result: &SolveResult,
    caps: &OracleCaps,
) -> CliResult<CrossCheck> {
    let bf_distance = bf_exchange_distance(rep, pair, caps)?;
    let bf_longest_monotone = bf_longest_monotone(rep, pair, caps)?;
    let agrees = bf_distance == Distance::Finite(result.distance)
        && bf_longest_monotone == result.monotone_length
        && verify_sequence(rep, pair, &result.sequence)?;
    Ok(CrossCheck {
        bf_distance,
        bf_longest_monotone,
        agrees,
    })
}

fn cmd_distance_bf(common: &Common) -> CliResult {
    let loaded = load(&common.instance)?;
    let caps = common.caps();
    let mut records = Vec::new();
    for pair in pairs_or_all(&loaded, &caps)? {
        let start = Instant::now();
        let distance = bf_exchange_distance(&loaded.rep, &pair, &caps)?;
        records.push(DistanceRecord {
            pair,
            distance,
            elapsed_us: micros(start),
        });
    }
    emit(common, &loaded, "distance-bf", records)
}

fn cmd_longest_monotone(common: &Common) -> CliResult {
    let loaded = load(&common.instance)?;
    let caps = common.caps();
    let solver = Solver::new(&loaded.rep)?;
    let mut records = Vec::new();
    for pair in pairs_or_all(&loaded, &caps)? {
        let start = Instant::now();
        let sequence = solver.longest_monotone(&pair)?;
        let elapsed_us = micros(start);
        let bf = bf_longest_monotone(&loaded.rep, &pair, &caps)?;
        if bf != sequence.len() {
            return Err(Error::Internal(format!(
                "monotone length {} differs from brute force {bf} on {pair:?}",
                sequence.len()
            ))
            .into());
        }
        records.push(MonotoneRecord {
            pair,
            length: sequence.len(),
            sequence,
            bf_length: Some(bf),
            elapsed_us,
        });
    }
    emit(common, &loaded, "longest-monotone", records)
}

/// Writes a replayable witness and returns the matching error.
fn counterexample(
    witness: &WitnessArg,
    loaded: &Loaded,
    pairs: Vec<BasisPairInstance>,
    what: String,
) -> CliResult {
    let mut file = loaded.file.clone();
    file.name = format!("{}-witness", file.name);
    file.pairs = pairs;
    write_witness(witness.witness.as_deref(), &file.to_json())?;
    Err(CliError::Counterexample(what))
}

fn write_witness(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

fn cmd_check_gabow(common: &Common, witness: &WitnessArg) -> CliResult {
    let loaded = load(&common.instance)?;
    let caps = common.caps();
    let listed = loaded.file.checked_pairs()?;
    let basis_pairs: Vec<_> = if listed.is_empty() {
        let bases = bases_within_caps(&loaded.rep, &caps)?;
        bases.iter().flat_map(|&a| bases.iter().map(move |&b| (a, b))).collect()
    } else {
        listed.iter().map(|p| (p.a1, p.a2)).collect()
    };
    let solver = Solver::new(&loaded.rep)?;
    let mut records = Vec::new();
    for (a, b) in basis_pairs {
        let ordering = gabow_ordering(&loaded.rep, a, b, &caps)?;
        let swap = BasisPairInstance::swap(a, b);
        let from_solver = CyclicOrdering::from_exchanges(a, b, &solver.solve(&swap)?.sequence);
        let valid = from_solver.is_valid(&loaded.rep) && ordering.as_ref().is_some_and(|o| o.is_valid(&loaded.rep));
        if !valid {
            return counterexample(witness, &loaded, vec![swap], format!("no valid cyclic ordering for {a} and {b}"));
        }
        records.push(GabowRecord {
            a,
            b,
            ordering,
            from_solver: Some(from_solver),
            valid,
        });
    }
    emit(common, &loaded, "check-gabow", records)
}

fn cmd_check_white2(common: &Common, witness: &WitnessArg) -> CliResult {
    let loaded = load(&common.instance)?;
    let caps = common.caps();
    let mut records = Vec::new();
    for pair in pairs_or_all(&loaded, &caps)? {
        pair.check_bases(&loaded.rep)?;
        let is_compatible = compatible(&pair);
        let equivalent = white2_equivalent(&loaded.rep, &pair, &caps)?;
        let consistent = is_compatible == equivalent;
        if !consistent {
            return counterexample(
                witness,
                &loaded,
                vec![pair],
                format!("compatible = {is_compatible} but finite distance = {equivalent}"),
            );
        }
        records.push(White2Record {
            pair,
            compatible: is_compatible,
            equivalent,
            consistent,
        });
    }
    emit(common, &loaded, "check-white2", records)
}

fn cmd_check_equitable(common: &Common, witness: &WitnessArg, seed: u64, samples: usize) -> CliResult {
    let loaded = load(&common.instance)?;
    let caps = common.caps();
    let result = if loaded.rep.size() <= caps.max_subset_elements {
        equitable_check(&loaded.rep, &caps)?
    } else {
        equitable_sampled(&loaded.rep, seed, samples)?
    };
    if let Equitability::Counterexample { subset } = result {
        return counterexample(witness, &loaded, Vec::new(), format!("subset {subset} has no balanced splitting basis"));
    }
    let skipped = result == Equitability::NotPartitionable;
    if skipped {
        eprintln!("skipped: ground set is not partitionable into two bases");
    }
    emit(common, &loaded, "check-equitable", vec![EquitableRecord { result, skipped }])
}

fn cmd_gen(config: GeneratorConfig, pair_count: usize, output: Option<&Path>) -> CliResult {
    let rep = config.generate()?;
    let pairs = basis_exchange::generators::gen_compatible_pairs(&rep, config.seed, pair_count);
    let name = match config.family {
        Family::K4 => "k4".to_string(),
        f => format!("{f}-n{}-r{}-s{}-d{}", config.n, config.r, config.seed, config.density),
    };
    let file = InstanceFile::new(name, &rep, pairs)?.with_generator(config);
    write_text(output, &file.to_json())
}

fn faulty_solve(solver: &Solver, pair: &BasisPairInstance) -> basis_exchange::Result<SolveResult> {
    let mut result = solver.solve(pair)?;
    if result.sequence.steps.pop().is_some() {
        result.distance -= 1;
    }
    Ok(result)
}

fn cmd_selftest(scale: Scale, output: Option<&Path>, inject_fault: bool) -> CliResult {
    let start = Instant::now();
    let reports = if inject_fault {
        Harness::with_solve(scale, &faulty_solve).run()
    } else {
        Harness::new(scale).run()
    };
    println!("selftest ({scale}, {:.1}s)", start.elapsed().as_secs_f64());
    for report in &reports {
        println!("{report}");
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).collect();
    println!("selftest: {} of {} criteria passed", reports.len() - failed.len(), reports.len());
    let Some(first) = failed.first() else {
        return Ok(());
    };
    if let Some(case) = &first.first_failure {
        eprintln!("criterion {} first failure: {}", case.criterion, case.message);
        write_witness(output, &case.instance.to_json())?;
    }
    Err(CliError::Selftest(format!("{} criteria failed", failed.len())))
}
