//! The `bellcert` command line: scriptable access to event vectors, cone
//! membership, certificates, witnesses, violation search, and tomography.
//!
//! Exit codes are the machine-readable verdict channel:
//!
//! * `0`: success; for verdict commands: feasible / none-found / pass
//! * `2`: usage, parse, or dimension errors
//! * `3`: infeasible with certificate (membership), violation found
//!   (search), or detection failed (witness verify)
//! * `4`: numerically marginal verdict
//!
//! Every emitted JSON document embeds a manifest (command, resolved
//! inputs, seed, tolerances, version, wall-clock duration). Output is
//! byte-identical across reruns with the same inputs and seed, except for
//! the duration field.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::certify::{
    cone_membership, violation_search, MembershipStatus, SearchBudget, SearchOutcome, SearchShape,
    DEFAULT_FEASIBILITY_TOL,
};
use crate::lhvcone::build_generators;
use crate::measurements::{complete_config, event_vector, reconstruct_state, MeasurementConfig};
use crate::qcore::DensityMatrix;
use crate::states::{maximally_mixed, random_density, singlet, tiles_upb_state, werner};
use crate::witness::{
    chsh_canonical_config, verify_witness, witness_from_farkas, witness_to_farkas, Witness,
};

/// Environment variable capping internal parallelism (search restarts).
pub const THREADS_ENV: &str = "BELLCERT_THREADS";

#[derive(Parser)]
#[command(
    name = "bellcert",
    version,
    about = "LHV cone membership, Bell certificates, and entanglement witnesses",
    after_help = "State names: singlet | werner:p=<x> | tiles | maxmixed:dA,dB | random:dA,dB \
                  (seeded) | a JSON file path.\nConfig names: chsh-canonical | complete:dA,dB | \
                  a JSON file path."
)]
struct Cli {
    /// Feasibility tolerance (scaled by the event vector's 1-norm).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for all randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result document to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the result document to standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the event vector of a state under a configuration.
    EventVector(StateConfigArgs),
    /// Decide whether the event vector admits an LHV model.
    Membership(StateConfigArgs),
    /// Build, verify, or decompose entanglement witnesses.
    Witness {
        #[command(subcommand)]
        action: WitnessAction,
    },
    /// Search measurement angles for a Bell-inequality violation.
    Search {
        #[arg(long)]
        state: String,
        /// Scenario shape `<nA>x<kA>,<nB>x<lB>`, e.g. `2x2,2x2`.
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Reconstruct a state from its complete-configuration statistics.
    Tomography {
        #[arg(long)]
        state: String,
    },
    /// Inspect registry states.
    State {
        #[command(subcommand)]
        action: ShowAction,
    },
    /// Inspect registry configurations.
    Config {
        #[command(subcommand)]
        action: ShowAction,
    },
}

#[derive(Args)]
struct StateConfigArgs {
    #[arg(long)]
    state: String,
    #[arg(long)]
    config: String,
}

#[derive(Subcommand)]
enum WitnessAction {
    /// Assemble a witness from a certificate document (or a raw F vector
    /// plus a configuration).
    Build {
        /// Certificate or membership document with an embedded config.
        #[arg(long, conflicts_with_all = ["farkas", "config"])]
        certificate: Option<PathBuf>,
        /// JSON array holding a raw F vector (requires --config).
        #[arg(long, requires = "config")]
        farkas: Option<PathBuf>,
        #[arg(long)]
        config: Option<String>,
    },
    /// Evaluate a witness against a state (value + product minimum).
    Verify {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        state: String,
        /// Random separable states to sample as a cross-check.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Decompose a witness over the complete configuration of its dims.
    Decompose {
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Subcommand)]
enum ShowAction {
    Show {
        #[arg(long)]
        name: String,
    },
}

struct Context {
    tol: f64,
    seed: u64,
    out: Option<PathBuf>,
    json: bool,
    started: Instant,
    inputs: BTreeMap<String, String>,
    tolerances: BTreeMap<String, f64>,
}

impl Context {
    fn manifest(&self, command: &str) -> Value {
        json!({
            "command": command,
            "inputs": self.inputs,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "version": env!("CARGO_PKG_VERSION"),
            "duration_seconds": self.started.elapsed().as_secs_f64(),
        })
    }

    /// Merge the manifest into a payload object and write/print it.
    fn emit(&self, command: &str, payload: Value) -> Result<(), CliError> {
        let mut doc = payload;
        doc.as_object_mut()
            .expect("payload documents are objects")
            .insert("manifest".into(), self.manifest(command));
        let text = serde_json::to_string_pretty(&doc).expect("documents serialize");
        if let Some(path) = &self.out {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::new(format!("cannot write {}: {e}", path.display())))?;
            file.write_all(text.as_bytes())
                .and_then(|_| file.write_all(b"\n"))
                .map_err(|e| CliError::new(format!("cannot write {}: {e}", path.display())))?;
        }
        if self.json {
            println!("{text}");
        }
        Ok(())
    }
}

#[derive(Debug)]
struct CliError {
    message: String,
}

impl CliError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        Self {
            message: e.to_string(),
        }
    }
}

/// Parse a state registry name or load a density-matrix JSON file.
fn resolve_state(name: &str, seed: u64) -> Result<DensityMatrix, CliError> {
    if name == "singlet" {
        return Ok(singlet());
    }
    if name == "tiles" {
        return Ok(tiles_upb_state());
    }
    if let Some(rest) = name.strip_prefix("werner:p=") {
        let p: f64 = rest
            .parse()
            .map_err(|_| CliError::new(format!("bad werner parameter '{rest}'")))?;
        return Ok(werner(p)?);
    }
    if let Some(rest) = name.strip_prefix("maxmixed:") {
        let (da, db) = parse_dims(rest)?;
        return Ok(maximally_mixed(da, db));
    }
    if let Some(rest) = name.strip_prefix("random:") {
        let (da, db) = parse_dims(rest)?;
        return Ok(random_density(da, db, seed)?);
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| CliError::new(format!("cannot read state '{name}': {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new(format!("cannot parse state '{name}': {e}")))
}

fn resolve_config(name: &str) -> Result<MeasurementConfig, CliError> {
    if name == "chsh-canonical" {
        return Ok(chsh_canonical_config());
    }
    if let Some(rest) = name.strip_prefix("complete:") {
        let (da, db) = parse_dims(rest)?;
        return Ok(complete_config(da, db)?);
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| CliError::new(format!("cannot read config '{name}': {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new(format!("cannot parse config '{name}': {e}")))
}

fn parse_dims(text: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::new(format!("expected 'dA,dB', got '{text}'")))?;
    let da = a
        .trim()
        .parse()
        .map_err(|_| CliError::new("bad dimension"))?;
    let db = b
        .trim()
        .parse()
        .map_err(|_| CliError::new("bad dimension"))?;
    if da < 2 || db < 2 {
        return Err(CliError::new("dimensions must be at least 2"));
    }
    Ok((da, db))
}

/// `<nA>x<kA>,<nB>x<lB>`.
fn parse_shape(text: &str) -> Result<SearchShape, CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::new(format!("expected '<nA>x<kA>,<nB>x<lB>', got '{text}'")))?;
    let parse_side = |side: &str| -> Result<(usize, usize), CliError> {
        let (n, k) = side
            .split_once('x')
            .ok_or_else(|| CliError::new(format!("expected '<n>x<k>', got '{side}'")))?;
        Ok((
            n.trim()
                .parse()
                .map_err(|_| CliError::new("bad measurement count"))?,
            k.trim()
                .parse()
                .map_err(|_| CliError::new("bad outcome count"))?,
        ))
    };
    let (na, ka) = parse_side(a)?;
    let (nb, lb) = parse_side(b)?;
    Ok(SearchShape {
        alice_measurements: na,
        alice_outcomes: ka,
        bob_measurements: nb,
        bob_outcomes: lb,
    })
}

fn thread_cap(restarts: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(available);
    cap.min(restarts.max(1))
}

fn certificate_doc(cert: &crate::certify::FarkasCertificate, config: &MeasurementConfig) -> Value {
    json!({
        "F": cert.f,
        "layout": cert.layout,
        "violation": cert.violation,
        "min_generator_value": cert.min_generator_value,
        "config": config,
    })
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let mut ctx = Context {
        tol: cli.tol.unwrap_or(DEFAULT_FEASIBILITY_TOL),
        seed: cli.seed,
        out: cli.out.clone(),
        json: cli.json,
        started: Instant::now(),
        inputs: BTreeMap::new(),
        tolerances: BTreeMap::new(),
    };
    ctx.tolerances.insert("feasibility".into(), ctx.tol);
    match dispatch(&cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            2
        }
    }
}

fn dispatch(command: &Command, ctx: &mut Context) -> Result<i32, CliError> {
    match command {
        Command::EventVector(args) => cmd_event_vector(args, ctx),
        Command::Membership(args) => cmd_membership(args, ctx),
        Command::Witness { action } => match action {
            WitnessAction::Build {
                certificate,
                farkas,
                config,
            } => cmd_witness_build(
                certificate.as_deref(),
                farkas.as_deref(),
                config.as_deref(),
                ctx,
            ),
            WitnessAction::Verify {
                witness,
                state,
                samples,
                restarts,
            } => cmd_witness_verify(witness, state, *samples, *restarts, ctx),
            WitnessAction::Decompose { witness } => cmd_witness_decompose(witness, ctx),
        },
        Command::Search {
            state,
            shape,
            restarts,
        } => cmd_search(state, shape, *restarts, ctx),
        Command::Tomography { state } => cmd_tomography(state, ctx),
        Command::State {
            action: ShowAction::Show { name },
        } => cmd_state_show(name, ctx),
        Command::Config {
            action: ShowAction::Show { name },
        } => cmd_config_show(name, ctx),
    }
}

fn cmd_event_vector(args: &StateConfigArgs, ctx: &mut Context) -> Result<i32, CliError> {
    ctx.inputs.insert("state".into(), args.state.clone());
    ctx.inputs.insert("config".into(), args.config.clone());
    let rho = resolve_state(&args.state, ctx.seed)?;
    let config = resolve_config(&args.config)?;
    let p = event_vector(&rho, &config)?;
    println!(
        "event vector: {} entries ({} joint + {} margA + {} margB)",
        p.total_len(),
        p.joint.len(),
        p.marg_a.len(),
        p.marg_b.len()
    );
    ctx.emit(
        "event-vector",
        serde_json::to_value(&p).expect("event vector serializes"),
    )?;
    Ok(0)
}

fn cmd_membership(args: &StateConfigArgs, ctx: &mut Context) -> Result<i32, CliError> {
    ctx.inputs.insert("state".into(), args.state.clone());
    ctx.inputs.insert("config".into(), args.config.clone());
    let rho = resolve_state(&args.state, ctx.seed)?;
    let config = resolve_config(&args.config)?;
    let p = event_vector(&rho, &config)?;
    let gens = build_generators(&config)?;
    let result = cone_membership(&p, &gens, ctx.tol)?;

    let (code, payload) = match result.status {
        MembershipStatus::Feasible => {
            let weights = result.weights.as_deref().unwrap_or(&[]);
            let support: Vec<Value> = weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 1e-12)
                .map(|(i, &w)| json!({"lambda": i, "weight": w}))
                .collect();
            println!(
                "feasible: LHV model with {} active generators, residual {:.3e}",
                support.len(),
                result.residual
            );
            (
                0,
                json!({
                    "status": result.status,
                    "residual": result.residual,
                    "support": support,
                }),
            )
        }
        MembershipStatus::Infeasible => {
            let cert = result
                .certificate
                .as_ref()
                .expect("infeasible carries a certificate");
            println!(
                "infeasible: Bell inequality violated, F.P = {:.6}, min over generators {:.3e}",
                cert.violation, cert.min_generator_value
            );
            (
                3,
                json!({
                    "status": result.status,
                    "residual": result.residual,
                    "certificate": certificate_doc(cert, &config),
                }),
            )
        }
        MembershipStatus::NumericallyMarginal => {
            println!(
                "numerically marginal: slack {:.3e} too close to the threshold",
                result.residual
            );
            (
                4,
                json!({
                    "status": result.status,
                    "residual": result.residual,
                }),
            )
        }
    };
    ctx.emit("membership", payload)?;
    Ok(code)
}

fn load_certificate_file(path: &Path) -> Result<(Vec<f64>, MeasurementConfig), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::new(format!("cannot parse {}: {e}", path.display())))?;
    // accept either a bare certificate document or a membership document
    let cert = if doc.get("F").is_some() {
        &doc
    } else {
        doc.get("certificate")
            .ok_or_else(|| CliError::new("document holds no certificate"))?
    };
    let f: Vec<f64> = serde_json::from_value(
        cert.get("F")
            .ok_or_else(|| CliError::new("certificate lacks F"))?
            .clone(),
    )
    .map_err(|e| CliError::new(format!("bad F vector: {e}")))?;
    let config: MeasurementConfig = serde_json::from_value(
        cert.get("config")
            .ok_or_else(|| CliError::new("certificate lacks an embedded config"))?
            .clone(),
    )
    .map_err(|e| CliError::new(format!("bad embedded config: {e}")))?;
    Ok((f, config))
}

fn load_witness_file(path: &Path) -> Result<Witness, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new(format!("cannot parse witness {}: {e}", path.display())))
}

fn cmd_witness_build(
    certificate: Option<&Path>,
    farkas: Option<&Path>,
    config_name: Option<&str>,
    ctx: &mut Context,
) -> Result<i32, CliError> {
    let (f, config) = match (certificate, farkas) {
        (Some(path), None) => {
            ctx.inputs
                .insert("certificate".into(), path.display().to_string());
            load_certificate_file(path)?
        }
        (None, Some(path)) => {
            let name = config_name.expect("clap enforces --config with --farkas");
            ctx.inputs
                .insert("farkas".into(), path.display().to_string());
            ctx.inputs.insert("config".into(), name.to_string());
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
            let f: Vec<f64> = serde_json::from_str(&text)
                .map_err(|e| CliError::new(format!("bad F vector: {e}")))?;
            (f, resolve_config(name)?)
        }
        _ => {
            return Err(CliError::new(
                "pass either --certificate or --farkas with --config",
            ))
        }
    };
    let w = witness_from_farkas(&f, &config)?;
    println!(
        "witness built: {}x{} operator from a {}-entry vector",
        w.dim_a(),
        w.dim_b(),
        f.len()
    );
    ctx.emit(
        "witness-build",
        serde_json::to_value(&w).expect("witness serializes"),
    )?;
    Ok(0)
}

fn cmd_witness_verify(
    witness: &Path,
    state: &str,
    samples: usize,
    restarts: usize,
    ctx: &mut Context,
) -> Result<i32, CliError> {
    ctx.inputs
        .insert("witness".into(), witness.display().to_string());
    ctx.inputs.insert("state".into(), state.to_string());
    let w = load_witness_file(witness)?;
    let rho = resolve_state(state, ctx.seed)?;
    let report = verify_witness(&w, &rho, samples, restarts, ctx.seed)?;
    println!(
        "witness value {:.6}, product minimum {:.6} -> {}",
        report.value,
        report.product_min.value,
        if report.pass { "pass" } else { "fail" }
    );
    let code = if report.pass { 0 } else { 3 };
    ctx.emit(
        "witness-verify",
        serde_json::to_value(&report).expect("report serializes"),
    )?;
    Ok(code)
}

fn cmd_witness_decompose(witness: &Path, ctx: &mut Context) -> Result<i32, CliError> {
    ctx.inputs
        .insert("witness".into(), witness.display().to_string());
    let w = load_witness_file(witness)?;
    let complete = complete_config(w.dim_a(), w.dim_b())?;
    let (f, c) = witness_to_farkas(&w, &complete)?;
    // report how well the decomposition rebuilds the operator
    let rebuilt = witness_from_farkas(&f, &complete)?;
    let with_offset = rebuilt
        .op()
        .matrix()
        .add_matrix(&crate::qcore::ComplexMatrix::identity(w.dim_a() * w.dim_b()).scale_re(c));
    let deviation = with_offset.max_deviation(w.op().matrix());
    println!(
        "decomposed over complete:{},{}: c = {:.6}, rebuild deviation {:.3e}",
        w.dim_a(),
        w.dim_b(),
        c,
        deviation
    );
    ctx.emit(
        "witness-decompose",
        json!({
            "F": f,
            "c": c,
            "layout": complete.layout(),
            "config": complete,
            "rebuild_deviation": deviation,
        }),
    )?;
    Ok(0)
}

fn cmd_search(
    state: &str,
    shape_text: &str,
    restarts: usize,
    ctx: &mut Context,
) -> Result<i32, CliError> {
    ctx.inputs.insert("state".into(), state.to_string());
    ctx.inputs.insert("shape".into(), shape_text.to_string());
    let rho = resolve_state(state, ctx.seed)?;
    let shape = parse_shape(shape_text)?;
    let budget = SearchBudget {
        restarts,
        max_iters: 400,
        threads: thread_cap(restarts),
    };
    let outcome = violation_search(&rho, shape, budget, ctx.seed)?;
    match &outcome {
        SearchOutcome::Found {
            certificate,
            config,
            violation,
        } => {
            println!(
                "violation found: F.P = {:.6} over {} restarts",
                violation, restarts
            );
            ctx.emit(
                "search",
                json!({
                    "outcome": "found",
                    "violation": violation,
                    "certificate": certificate_doc(certificate, config),
                }),
            )?;
            Ok(3)
        }
        SearchOutcome::NoneFound { best_residual } => {
            println!(
                "none found: best residual {:.3e} over {} restarts",
                best_residual, restarts
            );
            ctx.emit(
                "search",
                json!({
                    "outcome": "none-found",
                    "best_residual": best_residual,
                }),
            )?;
            Ok(0)
        }
    }
}

fn cmd_tomography(state: &str, ctx: &mut Context) -> Result<i32, CliError> {
    ctx.inputs.insert("state".into(), state.to_string());
    let rho = resolve_state(state, ctx.seed)?;
    let dims = rho.dims();
    if !matches!(dims, (2, 2) | (2, 3) | (3, 3)) {
        return Err(CliError::new(format!(
            "unsupported dims {:?}: tomography runs at (2,2), (2,3), (3,3)",
            dims
        )));
    }
    let config = complete_config(dims.0, dims.1)?;
    let p = event_vector(&rho, &config)?;
    let reconstruction = reconstruct_state(&p, &config)?;
    let deviation = reconstruction.matrix().max_deviation(rho.matrix());
    println!(
        "tomography at dims {:?}: {} probabilities, max reconstruction deviation {:.3e}",
        dims,
        p.total_len(),
        deviation
    );
    ctx.emit(
        "tomography",
        json!({
            "dims": [dims.0, dims.1],
            "probability_count": p.total_len(),
            "max_deviation": deviation,
            "reconstruction": reconstruction,
        }),
    )?;
    Ok(0)
}

fn cmd_state_show(name: &str, ctx: &mut Context) -> Result<i32, CliError> {
    ctx.inputs.insert("name".into(), name.to_string());
    let rho = resolve_state(name, ctx.seed)?;
    println!("state '{}': dims ({}, {})", name, rho.dim_a(), rho.dim_b());
    ctx.emit("state-show", json!({"state": rho}))?;
    Ok(0)
}

fn cmd_config_show(name: &str, ctx: &mut Context) -> Result<i32, CliError> {
    ctx.inputs.insert("name".into(), name.to_string());
    let config = resolve_config(name)?;
    let layout = config.layout();
    println!(
        "config '{}': {} Alice measurements, {} Bob measurements, event length {}",
        name,
        config.alice().len(),
        config.bob().len(),
        layout.total_len()
    );
    ctx.emit("config-show", json!({"config": config}))?;
    Ok(0)
}
