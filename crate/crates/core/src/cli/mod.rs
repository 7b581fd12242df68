//! The `hamgadget` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification suite has a failing
//! assertion, 2 on usage errors and malformed or invalid input.

pub mod instance;
pub mod io;
pub mod suites;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::kitaev::{compile, CircuitJson, ClockEncoding};
use crate::operators::json::HamiltonianJson;
use crate::queryham::{build_query_hamiltonian_with, BitString, QueryEncoding, QueryOptions};
use crate::reductions::{
    build_apx_2corr, build_apx_sim_with, build_spectral_gap_instance_with, decide_apx_2corr, decide_apx_sim,
    decide_spectral_gap, minimum_steps, simulator_circuit, Verdict,
};
use crate::spectra::{SolverConfig, DEFAULT_DENSE_CUTOFF};
use crate::voting::{exact_voting_distribution, simulate_voting, verify_delta_positive, VerifierModel, VotingOutcome};
use crate::{Error, Result};

use instance::{Apx2CorrFile, ApxSimFile, InstanceBody, InstanceFile, Provenance, SpectralGapFile};
use io::{emit, load_machine, parse_json, read_input, to_json_string, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hamgadget", version, about = "Circuit-to-Hamiltonian gadgets and reduction checks")]
pub struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// log2 of the largest dimension diagonalised densely.
    #[arg(long, global = true, default_value_t = DEFAULT_DENSE_CUTOFF)]
    pub dense_cutoff: u32,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "HAMGADGET_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a circuit into its clock Hamiltonian.
    Compile {
        circuit: PathBuf,
        #[arg(long, default_value = "unary")]
        encoding: ClockEncoding,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Include the output penalty on W1 at the final step.
        #[arg(long)]
        hout: bool,
    },
    /// Build the query Hamiltonian of a machine (file or fixture:NAME[:EPS]).
    BuildQueryham {
        machine: String,
        #[arg(long, default_value = "binary", value_parser = parse_query_encoding)]
        encoding: QueryEncoding,
        /// Energy scale; the machine's own ε when absent.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        stab_scale: f64,
    },
    /// Build an observable-threshold instance from a machine.
    BuildApxsim {
        machine: String,
        /// Simulator length; the machine's minimum when absent.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value = "unary")]
        encoding: ClockEncoding,
    },
    /// Build a two-point-correlation instance from a machine.
    BuildApx2corr {
        machine: String,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Build a spectral-gap instance from a machine.
    BuildSpectralgap {
        machine: String,
        /// Query threshold; the machine's own ε when absent.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: f64,
        /// Skip query validation.
        #[arg(long)]
        skip_validation: bool,
    },
    /// Decide an instance file.
    Decide {
        instance: PathBuf,
        /// Random feasible states checked for correlation instances.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Run a verification suite.
    Verify {
        suite: String,
        /// Suite config; the bundled default when absent.
        config: Option<PathBuf>,
    },
    /// Exact and sampled hierarchical-voting distribution of a machine.
    Vote {
        machine: String,
        #[arg(long)]
        p_amp: u32,
        /// Rounds; defaults to 2^m.
        #[arg(long)]
        n_c: Option<u64>,
        /// Monte Carlo trials (0 skips sampling).
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Acceptance probability of an invalid query, as PREFIX=P.
        #[arg(long = "invalid-p", value_parser = parse_prefix_value)]
        invalid_p: Vec<(String, f64)>,
        /// JSON map from every prefix to its acceptance probability.
        #[arg(long, conflicts_with = "invalid_p")]
        probs: Option<PathBuf>,
        #[arg(long, default_value_t = 3.0)]
        k_sigma: f64,
    },
}

fn parse_query_encoding(s: &str) -> std::result::Result<QueryEncoding, String> {
    match s {
        "binary" => Ok(QueryEncoding::Binary),
        "unary" => Ok(QueryEncoding::Unary),
        _ => Err(format!("unknown query encoding '{s}' (binary or unary)")),
    }
}

fn parse_prefix_value(s: &str) -> std::result::Result<(String, f64), String> {
    let (p, v) = s.split_once('=').ok_or_else(|| format!("expected PREFIX=P, got '{s}'"))?;
    let v = v.parse::<f64>().map_err(|e| format!("bad probability '{v}': {e}"))?;
    Ok((p.to_string(), v))
}

/// Outcome of a command before it is written.
struct Output {
    value: serde_json::Value,
    exit: i32,
}

struct Session {
    cli: Cli,
    argv: Vec<String>,
    hashes: BTreeMap<String, String>,
}

impl Session {
    fn solver(&self) -> SolverConfig {
        SolverConfig {
            dense_cutoff: self.cli.dense_cutoff,
            tol: self.cli.tol,
            seed: self.cli.seed,
            ..SolverConfig::default()
        }
    }

    fn manifest(&self, started: Instant) -> RunManifest {
        let limit = self.cli.dense_cutoff.min(crate::operators::DENSE_LIMIT_LOG2);
        RunManifest {
            command: self.argv.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_hashes: self.hashes.clone(),
            seed: self.cli.seed,
            tol: self.cli.tol,
            dense_cutoff: self.cli.dense_cutoff,
            jobs: rayon::current_num_threads(),
            backend: format!("dense up to 2^{limit}, lanczos above"),
            wall_time_ms: started.elapsed().as_millis() as u64,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let argv = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.jobs);
            return EXIT_USAGE;
        }
    };
    let mut session = Session { cli, argv, hashes: BTreeMap::new() };
    let started = Instant::now();
    let result = pool.install(|| -> Result<i32> {
        let out = execute(&mut session)?;
        let mut value = out.value;
        if let serde_json::Value::Object(map) = &mut value {
            map.insert("manifest".into(), to_value(&session.manifest(started))?);
        }
        emit(session.cli.out.as_deref(), &to_json_string(&value)?)?;
        Ok(out.exit)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(s: &mut Session) -> Result<Output> {
    let solver = s.solver();
    let ok = |value| Ok(Output { value, exit: EXIT_OK });
    match &s.cli.command {
        Command::Compile { circuit, encoding, delta, hout } => {
            let bytes = read_input(circuit, "circuit", &mut s.hashes)?;
            let c = parse_json::<CircuitJson>(&bytes, "circuit")?.to_circuit()?;
            let comp = compile(&c, *encoding, *delta, *hout)?;
            #[derive(Serialize)]
            struct Compiled {
                #[serde(flatten)]
                hamiltonian: HamiltonianJson,
                encoding: ClockEncoding,
                delta: f64,
                steps: usize,
                clock_sites: Vec<usize>,
                include_output: bool,
            }
            ok(to_value(&Compiled {
                hamiltonian: HamiltonianJson::from_hamiltonian(&comp.hamiltonian),
                encoding: comp.encoding,
                delta: comp.delta,
                steps: comp.steps,
                clock_sites: comp.clock_sites,
                include_output: *hout,
            })?)
        }
        Command::BuildQueryham { machine, encoding, epsilon, stab_scale } => {
            let mach = load_machine(machine, &mut s.hashes)?;
            let eps = epsilon.unwrap_or(mach.epsilon());
            let opts = QueryOptions { encoding: *encoding, stab_scale: *stab_scale, ..QueryOptions::binary() };
            let qh = build_query_hamiltonian_with(&mach, eps, &opts)?;
            #[derive(Serialize)]
            struct Built {
                #[serde(flatten)]
                hamiltonian: HamiltonianJson,
                encoding: QueryEncoding,
                epsilon: f64,
                m: usize,
                x_sites: Vec<usize>,
                y_sites: Vec<Vec<usize>>,
            }
            ok(to_value(&Built {
                hamiltonian: HamiltonianJson::from_hamiltonian(&qh.hamiltonian),
                encoding: qh.encoding,
                epsilon: qh.epsilon,
                m: qh.m,
                x_sites: qh.x_sites,
                y_sites: qh.y_sites,
            })?)
        }
        Command::BuildApxsim { machine, steps, gamma, encoding } => {
            let mach = load_machine(machine, &mut s.hashes)?;
            let sim = simulator_circuit(&mach, steps.unwrap_or(minimum_steps(&mach)), 1)?;
            let inst = build_apx_sim_with(&mach, &sim, *gamma, *encoding)?;
            let file = InstanceFile {
                body: InstanceBody::ApxSim(ApxSimFile::from_instance(&inst)),
                provenance: provenance(s, Some(*gamma), Some(mach.epsilon()), None),
                manifest: None,
            };
            ok(to_value(&file)?)
        }
        Command::BuildApx2corr { machine, steps, gamma } => {
            let mach = load_machine(machine, &mut s.hashes)?;
            let sim = simulator_circuit(&mach, steps.unwrap_or(minimum_steps(&mach)), 3)?;
            let inst = build_apx_2corr(&mach, &sim, *gamma)?;
            let file = InstanceFile {
                body: InstanceBody::Apx2Corr(Apx2CorrFile::from_instance(&inst)),
                provenance: provenance(s, Some(*gamma), Some(mach.epsilon()), None),
                manifest: None,
            };
            ok(to_value(&file)?)
        }
        Command::BuildSpectralgap { machine, epsilon, delta, skip_validation } => {
            let mach = load_machine(machine, &mut s.hashes)?;
            let eps = epsilon.unwrap_or(mach.epsilon());
            let oracle = crate::queryham::DiagonalizingOracle::new();
            let inst = build_spectral_gap_instance_with(
                &mach,
                eps,
                *delta,
                if *skip_validation { None } else { Some(&oracle) },
            )?;
            let file = InstanceFile {
                body: InstanceBody::SpectralGap(SpectralGapFile::from_instance(&inst)),
                provenance: provenance(s, None, Some(eps), Some(*delta)),
                manifest: None,
            };
            ok(to_value(&file)?)
        }
        Command::Decide { instance, samples } => {
            let bytes = read_input(instance, "instance", &mut s.hashes)?;
            let file: InstanceFile = parse_json(&bytes, "instance")?;
            let (kind, verdict, details) = match &file.body {
                InstanceBody::ApxSim(f) => {
                    let d = decide_apx_sim(&f.to_instance()?, &solver)?;
                    ("apx-sim", d.verdict, to_value(&d)?)
                }
                InstanceBody::Apx2Corr(f) => {
                    let d = decide_apx_2corr(&f.to_instance()?, *samples, s.cli.seed)?;
                    ("apx-2corr", d.verdict, to_value(&d)?)
                }
                InstanceBody::SpectralGap(f) => {
                    if !(f.alpha > 0.0 && f.alpha.is_finite()) {
                        return Err(Error::Input(format!("α must be positive and finite, got {}", f.alpha)));
                    }
                    let d = decide_spectral_gap(&f.hamiltonian.to_hamiltonian()?, f.alpha, &solver)?;
                    ("spectral-gap", d.verdict, to_value(&d)?)
                }
            };
            #[derive(Serialize)]
            struct Decided<'a> {
                kind: &'a str,
                verdict: Verdict,
                details: serde_json::Value,
            }
            ok(to_value(&Decided { kind, verdict, details })?)
        }
        Command::Verify { suite, config } => {
            let default = suites::default_config(suite).ok_or_else(|| {
                Error::Input(format!("unknown suite '{suite}' (expected one of {})", suites::SUITES.join(", ")))
            })?;
            let text = match config {
                Some(p) => String::from_utf8(read_input(p, "config", &mut s.hashes)?)
                    .map_err(|_| Error::Input("config is not UTF-8".into()))?,
                None => {
                    s.hashes.insert("config".into(), io::sha256_hex(default.as_bytes()));
                    default.to_string()
                }
            };
            let ctx = suites::SuiteContext { solver, seed: s.cli.seed };
            let report = suites::run_suite(suite, &text, &ctx)?;
            for a in report.failures() {
                eprintln!(
                    "FAIL {} [{}]: measured {:.6e}, bound {:.6e}; {}",
                    a.id, a.anchor, a.measured, a.bound, a.detail
                );
            }
            let exit = if report.passed { EXIT_OK } else { EXIT_FAIL };
            Ok(Output { value: to_value(&report)?, exit })
        }
        Command::Vote { machine, p_amp, n_c, trials, invalid_p, probs, k_sigma } => {
            let mach = load_machine(machine, &mut s.hashes)?;
            let verifier = match probs {
                Some(p) => {
                    let bytes = read_input(p, "probs", &mut s.hashes)?;
                    let map: BTreeMap<String, f64> = parse_json(&bytes, "probability map")?;
                    let map = map.into_iter().map(|(k, v)| Ok((BitString::parse(&k)?, v))).collect::<Result<_>>()?;
                    VerifierModel::from_probabilities(&mach, &map)?.with_amplification(*p_amp)
                }
                None => {
                    let inv = invalid_p
                        .iter()
                        .map(|(k, v)| Ok((BitString::parse(k)?, *v)))
                        .collect::<Result<BTreeMap<_, _>>>()?;
                    VerifierModel::canonical(&mach, *p_amp, &inv)?
                }
            };
            let n_c = n_c.unwrap_or(1 << mach.m());
            let exact = exact_voting_distribution(&mach, &verifier, n_c)?;
            let empirical =
                if *trials > 0 { Some(simulate_voting(&mach, &verifier, n_c, *trials, s.cli.seed)?) } else { None };
            let outcome = VotingOutcome::new(&exact, empirical, *k_sigma);
            let report = verify_delta_positive(&mach, &verifier, n_c)?;
            #[derive(Serialize)]
            struct Voted {
                outcome: VotingOutcome,
                bounds: crate::voting::DeltaReport,
            }
            ok(to_value(&Voted { outcome, bounds: report })?)
        }
    }
}

fn provenance(s: &Session, gamma: Option<f64>, epsilon: Option<f64>, delta: Option<f64>) -> Provenance {
    Provenance { machine_sha256: s.hashes.get("machine").cloned(), gamma, epsilon, delta }
}
