//! The five subcommands. Listings go to the given writer; traces and
//! references are written under the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use symqite_core::lattice::total_hamiltonian;
use symqite_core::validation::{run_suite, ValidationReport};
use symqite_core::varqite::format_float;
use symqite_core::{build_hamiltonian, evolve, relevant_basis, Ansatz, Error, ReductionMode, Spectrum};

use crate::config::{blob_hash, ConfigError, ExperimentConfig, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

/// Core errors raised while setting up a run come from the inputs.
fn setup(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

fn io(e: std::io::Error) -> CliError {
    CliError::Runtime(format!("I/O: {e}"))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn reduce(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let rb = relevant_basis(&cfg.model, cfg.mode, cfg.form).map_err(setup)?;
    for (term, gb) in &rb {
        let qubits: Vec<String> = term.qubits.iter().map(|q| q.to_string()).collect();
        writeln!(out, "# {} qubits {}: {} elements", term.label, qubits.join(" "), gb.len()).map_err(io)?;
        for line in gb.to_lines() {
            writeln!(out, "{line}").map_err(io)?;
        }
    }
    Ok(())
}

pub fn counts(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mut modes = vec![ReductionMode::TrOnly, ReductionMode::InternalPlusTr];
    if !modes.contains(&cfg.mode) {
        modes.push(cfg.mode);
    }
    writeln!(out, "model,mode,form,layers,n_params,naive_cnots").map_err(io)?;
    for mode in modes {
        let rb = relevant_basis(&cfg.model, mode, cfg.form).map_err(setup)?;
        let report = Ansatz::build(cfg.model.n_qubits(), &rb, cfg.layers)
            .map_err(setup)?
            .counts_report();
        writeln!(
            out,
            "{},{mode},{},{},{},{}",
            cfg.model.kind,
            cfg.resolved["reduction.form"],
            cfg.layers,
            report.n_params,
            report.naive_cnots.map_or(String::new(), |c| c.to_string())
        )
        .map_err(io)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a BTreeMap<String, String>,
    seed: u64,
    content_hash: String,
    n_qubits: usize,
    n_params: usize,
    rows: usize,
    complete: bool,
    files: BTreeMap<String, String>,
}

pub fn evolve_cmd(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let n = cfg.model.n_qubits();
    let terms = build_hamiltonian(&cfg.model).map_err(setup)?;
    let h = total_hamiltonian(&cfg.model, &terms).map_err(setup)?;
    let rb = relevant_basis(&cfg.model, cfg.mode, cfg.form).map_err(setup)?;
    let a = Ansatz::build(n, &rb, cfg.layers).map_err(setup)?;
    log::info!("{} qubits, {} parameters, {} steps", n, a.n_params(), cfg.evolution.n_steps());

    let (trace, failure) = match evolve(&a, &cfg.evolution, &h) {
        Ok(t) => (t, None),
        Err(Error::NonFinite { step, trace }) => (*trace, Some(format!("non-finite parameters at step {step}"))),
        Err(e) => return Err(CliError::Runtime(e.to_string())),
    };
    let csv = trace.to_csv();
    let mut files = BTreeMap::new();
    if cfg.formats.contains(&Format::Csv) {
        write_file(&cfg.out_dir, "trace.csv", &csv)?;
        files.insert("trace.csv".to_string(), blob_hash(csv.as_bytes()));
    }
    if cfg.formats.contains(&Format::Json) {
        let manifest = Manifest {
            tool: "symqite",
            version: env!("CARGO_PKG_VERSION"),
            command: "evolve",
            config: &cfg.resolved,
            seed: cfg.evolution.rng_seed,
            content_hash: cfg.content_hash(),
            n_qubits: n,
            n_params: a.n_params(),
            rows: trace.rows.len(),
            complete: failure.is_none(),
            files,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
        write_file(&cfg.out_dir, "manifest.json", &(text + "\n"))?;
    }
    if let Some(msg) = failure {
        return Err(CliError::Runtime(msg));
    }
    if let Some(last) = trace.rows.last() {
        writeln!(
            out,
            "{} rows, final beta {}, energy {}",
            trace.rows.len(),
            format_float(last.beta),
            format_float(last.energy)
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Exact Gibbs energies (and observables) on the trace's beta grid.
pub fn oracle(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let terms = build_hamiltonian(&cfg.model).map_err(setup)?;
    let h = total_hamiltonian(&cfg.model, &terms).map_err(setup)?;
    let sp = Spectrum::of(&h).map_err(setup)?;
    let mut head = vec!["tau".to_string(), "beta".into(), "energy".into()];
    head.extend(cfg.evolution.observables.iter().map(|(l, _)| l.clone()));
    let mut csv = head.join(",") + "\n";
    for s in 0..=cfg.evolution.n_steps() {
        let tau = s as f64 * cfg.evolution.delta_tau;
        let beta = 2.0 * tau;
        let mut cells = vec![format_float(tau), format_float(beta)];
        cells.push(format_float(sp.gibbs_expectation(&h, beta).map_err(setup)?));
        for (_, o) in &cfg.evolution.observables {
            cells.push(format_float(sp.gibbs_expectation(o, beta).map_err(setup)?));
        }
        csv += &(cells.join(",") + "\n");
    }
    if cfg.formats.contains(&Format::Csv) {
        write_file(&cfg.out_dir, "oracle.csv", &csv)?;
    }
    writeln!(out, "ground energy {}", format_float(sp.ground_energy())).map_err(io)?;
    Ok(())
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    passed: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    passed: bool,
    checks: Vec<CheckJson<'a>>,
}

pub fn report_json(report: &ValidationReport) -> String {
    let r = ReportJson {
        passed: report.passed(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckJson {
                name: &c.name,
                passed: c.passed,
                detail: &c.detail,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&r).expect("plain data serializes") + "\n"
}

/// Runs the invariant suite; `save_dir` also receives `validation.json`.
pub fn validate(save_dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run_suite().map_err(|e| CliError::Runtime(e.to_string()))?;
    let json = report_json(&report);
    out.write_all(json.as_bytes()).map_err(io)?;
    if let Some(dir) = save_dir {
        write_file(dir, "validation.json", &json)?;
    }
    if !report.passed() {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        return Err(CliError::Validation(names.join(", ")));
    }
    Ok(())
}
