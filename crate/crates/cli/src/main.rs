//! `extremal` -- command-line driver for the extremality toolkit.
//!
//! Every subcommand prints a machine-readable JSON report on stdout and a
//! short human summary on stderr. Exit codes: 0 success, 2 validation
//! failure (bad inputs or a failed predicate), 1 internal error.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use extremal_core::crabb_davie::{build_crabb_davie, cd_extension_evidence, structural_report};
use extremal_core::extensions::probe_with_report;
use extremal_core::parrott::{
    build_parrott, commutator_kernel, favoritism_check, parrott_extension, ParrottInput,
};
use extremal_core::tuples::{check_commuting, check_contractive, check_partial_isometries};
use extremal_core::varopoulos::{analyze, build_varopoulos, VaropoulosInput};
use extremal_core::vonneumann::{vn_defect, vn_violation_search, MultiPolynomial};
use extremal_core::{OperatorTuple, ToleranceConfig};

#[derive(Parser)]
#[command(
    name = "extremal",
    about = "Extremality analysis for commuting contraction tuples",
    version
)]
struct Cli {
    /// Commutator / invariance residual tolerance.
    #[arg(long, global = true)]
    eps_comm: Option<f64>,
    /// Contractivity excess tolerance.
    #[arg(long, global = true)]
    eps_contr: Option<f64>,
    /// Relative rank cutoff (also via EXTREMAL_EPS_RANK).
    #[arg(long, global = true)]
    eps_rank: Option<f64>,
    /// Orthonormality residual tolerance.
    #[arg(long, global = true)]
    eps_orth: Option<f64>,
    /// Relative determinant-zero threshold.
    #[arg(long, global = true)]
    eps_det: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the class-membership predicates on a tuple.
    Check {
        /// Tuple JSON file: {"n": .., "dim": .., "ops": [matrix, ..]}.
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Analyze a Parrott tuple built from unitaries.
    Parrott {
        /// Unitaries JSON file: {"unitaries": [matrix, ..]}.
        #[arg(long)]
        unitaries: PathBuf,
        /// 1-based pivot used for the extremality decision (default: n).
        #[arg(long)]
        pivot: Option<usize>,
        /// Attach an extension certificate when the tuple is not extremal.
        #[arg(long)]
        extend: bool,
    },
    /// Inspect the fixed 8x8 Crabb-Davie triple.
    #[command(name = "crabb-davie")]
    CrabbDavie {
        /// Verify the structural identities (default action).
        #[arg(long)]
        check: bool,
        /// Run the extension probe: K SAMPLES SEED.
        #[arg(long, num_args = 3, value_names = ["K", "SAMPLES", "SEED"])]
        probe: Option<Vec<u64>>,
        /// Write the triple as tuple JSON to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide extremality of a Varopoulos triple.
    Varopoulos {
        /// Vectors JSON file: {"J": .., "x": [[..], [..], [..]]}.
        #[arg(long)]
        vectors: PathBuf,
        /// Write the built tuple as JSON to this file.
        #[arg(long)]
        emit_tuple: Option<PathBuf>,
    },
    /// Probe an arbitrary tuple for rank-k extensions.
    Probe {
        #[arg(long)]
        tuple: PathBuf,
        /// Extension dimension (capped at 4).
        #[arg(long)]
        k: usize,
        #[arg(long)]
        samples: usize,
        /// RNG seed; generated and reported when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Von Neumann inequality checks.
    Vn {
        #[arg(long)]
        tuple: PathBuf,
        /// Polynomial JSON file: {"n_vars": .., "terms": [{"alpha": [..], "c": [re, im]}]}.
        #[arg(long, conflicts_with = "search")]
        poly: Option<PathBuf>,
        /// Violation search: DEGREE RESTARTS.
        #[arg(long, num_args = 2, value_names = ["DEGREE", "RESTARTS"])]
        search: Option<Vec<u64>>,
        /// Grid points per variable.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// RNG seed; generated and reported when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build a named tuple and emit it as JSON.
    Build {
        /// One of: crabb-davie, parrott, varopoulos.
        #[arg(long)]
        kind: String,
        /// Unitaries JSON (for --kind parrott).
        #[arg(long)]
        unitaries: Option<PathBuf>,
        /// Vectors JSON (for --kind varopoulos).
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Output file; the tuple is embedded in the report either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Parrott { .. } => "parrott",
            Command::CrabbDavie { .. } => "crabb-davie",
            Command::Varopoulos { .. } => "varopoulos",
            Command::Probe { .. } => "probe",
            Command::Vn { .. } => "vn",
            Command::Build { .. } => "build",
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs: Value,
    tolerances: ToleranceConfig,
    seed: Option<u64>,
    results: Value,
    wall_time_ms: f64,
}

struct CommandOutput {
    inputs: Value,
    results: Value,
    seed: Option<u64>,
    summary: String,
    validation_failed: bool,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let command = cli.command.name().to_string();
    let tolerances = match resolve_tolerances(&cli) {
        Ok(t) => t,
        Err(err) => return emit_failure(&command, &ToleranceConfig::default(), &err),
    };

    let started = Instant::now();
    match dispatch(&cli.command, &tolerances) {
        Ok(output) => {
            let report = RunReport {
                command,
                inputs: output.inputs,
                tolerances,
                seed: output.seed,
                results: output.results,
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            let Ok(text) = serde_json::to_string_pretty(&report) else {
                eprintln!("internal error: report serialization failed");
                return 1;
            };
            println!("{text}");
            eprintln!("{}", output.summary);
            if output.validation_failed {
                2
            } else {
                0
            }
        }
        Err(err) => emit_failure(&command, &tolerances, &err),
    }
}

fn emit_failure(command: &str, tolerances: &ToleranceConfig, err: &anyhow::Error) -> i32 {
    let report = json!({
        "command": command,
        "error": format!("{err:#}"),
        "tolerances": tolerances,
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
    eprintln!("error: {err:#}");
    2
}

fn resolve_tolerances(cli: &Cli) -> Result<ToleranceConfig> {
    let mut tol = ToleranceConfig::default();
    if let Ok(text) = std::env::var("EXTREMAL_EPS_RANK") {
        tol.eps_rank = text
            .parse()
            .with_context(|| format!("EXTREMAL_EPS_RANK={text} is not a number"))?;
    }
    if let Some(v) = cli.eps_comm {
        tol.eps_comm = v;
    }
    if let Some(v) = cli.eps_contr {
        tol.eps_contr = v;
    }
    if let Some(v) = cli.eps_rank {
        tol.eps_rank = v;
    }
    if let Some(v) = cli.eps_orth {
        tol.eps_orth = v;
    }
    if let Some(v) = cli.eps_det {
        tol.eps_det = v;
    }
    tol.validate()?;
    Ok(tol)
}

fn load_json<T: serde::de::DeserializeOwned>(path: &PathBuf, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {what} from {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} from {}", path.display()))
}

fn dispatch(command: &Command, tol: &ToleranceConfig) -> Result<CommandOutput> {
    match command {
        Command::Check { tuple } => run_check(tuple, tol),
        Command::Parrott {
            unitaries,
            pivot,
            extend,
        } => run_parrott(unitaries, *pivot, *extend, tol),
        Command::CrabbDavie { check, probe, emit } => {
            run_crabb_davie(*check, probe.as_deref(), emit.as_ref(), tol)
        }
        Command::Varopoulos {
            vectors,
            emit_tuple,
        } => run_varopoulos(vectors, emit_tuple.as_ref(), tol),
        Command::Probe {
            tuple,
            k,
            samples,
            seed,
        } => run_probe(tuple, *k, *samples, *seed, tol),
        Command::Vn {
            tuple,
            poly,
            search,
            grid,
            seed,
        } => run_vn(tuple, poly.as_ref(), search.as_deref(), *grid, *seed, tol),
        Command::Build {
            kind,
            unitaries,
            vectors,
            out,
        } => run_build(kind, unitaries.as_ref(), vectors.as_ref(), out.as_ref(), tol),
    }
}

fn run_check(path: &PathBuf, tol: &ToleranceConfig) -> Result<CommandOutput> {
    let tuple: OperatorTuple = load_json(path, "tuple")?;
    let commuting = check_commuting(&tuple, tol);
    let contractive = check_contractive(&tuple, tol);
    let partial_isometries = check_partial_isometries(&tuple);
    let passed = commuting.passed && contractive.passed;
    let summary = format!(
        "n={} dim={}: commuting={} contractive={} partial_isometries={}",
        tuple.n(),
        tuple.dim(),
        commuting.passed,
        contractive.passed,
        partial_isometries.passed
    );
    Ok(CommandOutput {
        inputs: serde_json::to_value(&tuple)?,
        results: json!({
            "commuting": commuting,
            "contractive": contractive,
            "partial_isometries": partial_isometries,
            "norms": tuple.norms(),
        }),
        seed: None,
        summary,
        validation_failed: !passed,
    })
}

fn run_parrott(
    path: &PathBuf,
    pivot: Option<usize>,
    extend: bool,
    tol: &ToleranceConfig,
) -> Result<CommandOutput> {
    let input: ParrottInput = load_json(path, "unitaries")?;
    let n = input.n();
    let pivot_1based = pivot.unwrap_or(n);
    if pivot_1based == 0 || pivot_1based > n {
        bail!("pivot {pivot_1based} out of range 1..={n}");
    }
    let kernel_dims: Vec<usize> = (0..n)
        .map(|p| commutator_kernel(&input, p, tol).map(|s| s.dim()))
        .collect::<extremal_core::Result<_>>()?;
    let extremal = kernel_dims[pivot_1based - 1] == 0;
    let favoritism_ok = favoritism_check(&input, tol);
    let certificate = if extend && !extremal {
        Some(parrott_extension(&input, tol)?)
    } else {
        None
    };
    let summary = format!(
        "parrott n={n} dim={}: extremal={extremal} kernel_dims={kernel_dims:?}",
        input.dim()
    );
    Ok(CommandOutput {
        inputs: serde_json::to_value(&input)?,
        results: json!({
            "extremal": extremal,
            "pivot": pivot_1based,
            "kernel_dims": kernel_dims,
            "favoritism_ok": favoritism_ok,
            "tuple": build_parrott(&input),
            "certificate": certificate,
        }),
        seed: None,
        summary,
        validation_failed: false,
    })
}

fn run_crabb_davie(
    check: bool,
    probe: Option<&[u64]>,
    emit: Option<&PathBuf>,
    tol: &ToleranceConfig,
) -> Result<CommandOutput> {
    let triple = build_crabb_davie();
    let mut results = serde_json::Map::new();
    let run_check = check || (probe.is_none() && emit.is_none());
    let mut validation_failed = false;
    let mut summary_parts = Vec::new();

    if run_check {
        let report = structural_report(&triple);
        validation_failed |= !report.exact;
        summary_parts.push(format!("structural identities exact: {}", report.exact));
        results.insert("structure".into(), serde_json::to_value(&report)?);
    }
    let mut seed = None;
    if let Some(args) = probe {
        let (k, samples, probe_seed) = (args[0] as usize, args[1] as usize, args[2]);
        let evidence = cd_extension_evidence(k, samples, probe_seed, tol)?;
        seed = Some(probe_seed);
        summary_parts.push(format!("probe k={k} samples={samples}: {}", evidence.verdict));
        results.insert("evidence".into(), serde_json::to_value(&evidence)?);
    }
    if let Some(path) = emit {
        let text = serde_json::to_string_pretty(&triple.tuple)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        summary_parts.push(format!("tuple written to {}", path.display()));
        results.insert("emitted".into(), json!(path.display().to_string()));
    }

    Ok(CommandOutput {
        inputs: json!({}),
        results: Value::Object(results),
        seed,
        summary: summary_parts.join("; "),
        validation_failed,
    })
}

fn run_varopoulos(
    path: &PathBuf,
    emit_tuple: Option<&PathBuf>,
    tol: &ToleranceConfig,
) -> Result<CommandOutput> {
    let input: VaropoulosInput = load_json(path, "vectors")?;
    let analysis = analyze(&input, tol);
    let mut results = serde_json::to_value(&analysis)?;
    if let Some(path) = emit_tuple {
        let tuple = build_varopoulos(&input);
        let text = serde_json::to_string_pretty(&tuple)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        results
            .as_object_mut()
            .expect("analysis serializes to an object")
            .insert("emitted".into(), json!(path.display().to_string()));
    }
    let summary = format!(
        "varopoulos J={} r={}: {:?}",
        input.j_size(),
        analysis.lambda_data.r,
        analysis.decision
    );
    Ok(CommandOutput {
        inputs: serde_json::to_value(&input)?,
        results,
        seed: None,
        summary,
        validation_failed: false,
    })
}

fn run_probe(
    path: &PathBuf,
    k: usize,
    samples: usize,
    seed: Option<u64>,
    tol: &ToleranceConfig,
) -> Result<CommandOutput> {
    if k == 0 || k > 4 {
        bail!("probe dimension k={k} out of range 1..=4");
    }
    if samples == 0 {
        bail!("probe needs at least one sample");
    }
    let tuple: OperatorTuple = load_json(path, "tuple")?;
    let commuting = check_commuting(&tuple, tol);
    if !commuting.passed {
        bail!(
            "tuple does not commute (worst residual {:.3e}); the probe needs a commuting tuple",
            commuting.worst_value
        );
    }
    let seed = seed.unwrap_or_else(rand::random);
    let report = probe_with_report(&tuple, samples, k, seed, tol);
    let summary = match &report.certificate {
        Some(_) => format!(
            "certificate found at sample {} (seed {seed})",
            report.found_at_sample.unwrap_or(0)
        ),
        None => format!("no certificate in {samples} samples (seed {seed})"),
    };
    Ok(CommandOutput {
        inputs: serde_json::to_value(&tuple)?,
        results: serde_json::to_value(&report)?,
        seed: Some(seed),
        summary,
        validation_failed: false,
    })
}

fn run_vn(
    tuple_path: &PathBuf,
    poly: Option<&PathBuf>,
    search: Option<&[u64]>,
    grid: usize,
    seed: Option<u64>,
    tol: &ToleranceConfig,
) -> Result<CommandOutput> {
    if grid < 8 {
        bail!("grid must be at least 8 points per variable");
    }
    let tuple: OperatorTuple = load_json(tuple_path, "tuple")?;
    match (poly, search) {
        (Some(poly_path), None) => {
            let polynomial: MultiPolynomial = load_json(poly_path, "polynomial")?;
            let defect = vn_defect(&tuple, &polynomial, grid, tol)?;
            let summary = format!(
                "|p(T)| = {:.6}, sup in [{:.6}, {:.6}], certified violation: {}",
                defect.norm_pt, defect.sup_lower, defect.sup_upper, defect.certified_violation
            );
            Ok(CommandOutput {
                inputs: json!({"tuple": tuple, "poly": polynomial}),
                results: serde_json::to_value(defect)?,
                seed: None,
                summary,
                validation_failed: false,
            })
        }
        (None, Some(args)) => {
            let (degree, restarts) = (args[0] as u32, args[1] as usize);
            if degree == 0 || restarts == 0 {
                bail!("search needs degree >= 1 and restarts >= 1");
            }
            let seed = seed.unwrap_or_else(rand::random);
            let outcome = vn_violation_search(&tuple, degree, restarts, grid, seed, tol)?;
            let summary = format!(
                "best ratio {:.6} (certified figure {:.6}), certified violation: {} (seed {seed})",
                outcome.objective_ratio, outcome.defect.ratio_certified, outcome.certified
            );
            Ok(CommandOutput {
                inputs: serde_json::to_value(&tuple)?,
                results: serde_json::to_value(&outcome)?,
                seed: Some(seed),
                summary,
                validation_failed: false,
            })
        }
        _ => Err(anyhow!("vn needs exactly one of --poly or --search")),
    }
}

fn run_build(
    kind: &str,
    unitaries: Option<&PathBuf>,
    vectors: Option<&PathBuf>,
    out: Option<&PathBuf>,
    _tol: &ToleranceConfig,
) -> Result<CommandOutput> {
    let (inputs, tuple) = match kind {
        "crabb-davie" => (json!({}), build_crabb_davie().tuple),
        "parrott" => {
            let path = unitaries.ok_or_else(|| anyhow!("--kind parrott needs --unitaries"))?;
            let input: ParrottInput = load_json(path, "unitaries")?;
            (serde_json::to_value(&input)?, build_parrott(&input))
        }
        "varopoulos" => {
            let path = vectors.ok_or_else(|| anyhow!("--kind varopoulos needs --vectors"))?;
            let input: VaropoulosInput = load_json(path, "vectors")?;
            (serde_json::to_value(&input)?, build_varopoulos(&input))
        }
        other => bail!("unknown kind {other:?}; expected crabb-davie, parrott or varopoulos"),
    };
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&tuple)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = format!(
        "built {kind} tuple: n={} dim={}{}",
        tuple.n(),
        tuple.dim(),
        out.map(|p| format!(", written to {}", p.display()))
            .unwrap_or_default()
    );
    Ok(CommandOutput {
        inputs,
        results: json!({
            "tuple": tuple,
            "out": out.map(|p| p.display().to_string()),
        }),
        seed: None,
        summary,
        validation_failed: false,
    })
}
