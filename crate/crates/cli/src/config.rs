//! Experiment configuration: flat `key = value` text with dotted keys, or
//! JSON whose nested objects flatten to the same keys.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use symqite_core::lattice::{Boundary, Encoding, Lattice};
use symqite_core::{build_hamiltonian, BasisForm, EvolutionConfig, ModelKind, ModelSpec, PauliSum, ReductionMode};

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Largest term width for which `reduction.mode = none` keeps the full `4^w` pool.
pub const FULL_POOL_MAX_WIDTH: usize = 4;

const KEYS: [&str; 17] = [
    "model.kind",
    "model.q",
    "model.lx",
    "model.ly",
    "model.boundary",
    "model.encoding",
    "reduction.mode",
    "reduction.form",
    "ansatz.layers",
    "evolution.delta_tau",
    "evolution.tau_max",
    "evolution.svd_cutoff",
    "evolution.noise_sigma",
    "evolution.seed",
    "evolution.observables",
    "outputs.dir",
    "outputs.formats",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub mode: ReductionMode,
    pub form: BasisForm,
    pub layers: usize,
    pub evolution: EvolutionConfig,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    /// Every key with its effective value, defaults filled in.
    pub resolved: BTreeMap<String, String>,
}

/// Reads a config file; `.json` files and text starting with `{` are JSON.
pub fn load_raw(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    if is_json {
        parse_json(&text)
    } else {
        parse_text(&text)
    }
}

pub fn parse_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {}: expected `key = value`", i + 1)))?;
        let k = k.trim().to_string();
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(err(format!("line {}: duplicate key `{k}`", i + 1)));
        }
    }
    Ok(out)
}

/// A run manifest is accepted too: its `config` object is used.
pub fn parse_json(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))?;
    let root = match value.get("config") {
        Some(c) if c.is_object() => c,
        _ => &value,
    };
    if !root.is_object() {
        return Err(err("JSON config must be an object"));
    }
    let mut out = BTreeMap::new();
    flatten("", root, &mut out)?;
    Ok(out)
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) -> Result<(), ConfigError> {
    use serde_json::Value;
    let scalar = |v: &Value| -> Result<String, ConfigError> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            Value::Bool(b) => Ok(b.to_string()),
            other => Err(err(format!("`{prefix}`: unsupported value {other}"))),
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out)?;
            }
        }
        Value::Array(items) => {
            let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
            let sep = if prefix == "outputs.formats" { "," } else { ";" };
            out.insert(prefix.to_string(), parts.join(sep));
        }
        other => {
            out.insert(prefix.to_string(), scalar(other)?);
        }
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| err(format!("`{key}`: cannot parse `{v}`")))
}

impl ExperimentConfig {
    /// Builds the config from raw keys. `seed` and `out` are command-line overrides.
    pub fn from_raw(
        raw: &BTreeMap<String, String>,
        seed: Option<u64>,
        out: Option<&Path>,
    ) -> Result<Self, ConfigError> {
        if let Some(k) = raw.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(err(format!("unknown key `{k}`")));
        }
        let get = |k: &str| raw.get(k).map(String::as_str);

        let kind: ModelKind = get("model.kind")
            .unwrap_or("ising")
            .parse()
            .map_err(|e| err(format!("`model.kind`: {e}")))?;
        let q_default = match kind {
            ModelKind::Potts | ModelKind::Clock => 4,
            _ => 2,
        };
        let (lx_default, ly_default) = match kind {
            ModelKind::Hopping => (4, 1),
            _ => (2, 2),
        };
        let q: usize = get("model.q").map_or(Ok(q_default), |v| parse_num("model.q", v))?;
        let lx: usize = get("model.lx").map_or(Ok(lx_default), |v| parse_num("model.lx", v))?;
        let ly: usize = get("model.ly").map_or(Ok(ly_default), |v| parse_num("model.ly", v))?;
        let boundary = match get("model.boundary") {
            None if kind == ModelKind::Gauge => Boundary::Periodic,
            None | Some("open") => Boundary::Open,
            Some("periodic") => Boundary::Periodic,
            Some(other) => return Err(err(format!("`model.boundary`: expected open or periodic, got `{other}`"))),
        };
        let encoding = match get("model.encoding") {
            None | Some("real") => Encoding::Real,
            Some("imaginary") => Encoding::Imaginary,
            Some(other) => return Err(err(format!("`model.encoding`: expected real or imaginary, got `{other}`"))),
        };
        let lattice = Lattice::new(lx, ly, boundary).map_err(|e| err(format!("lattice: {e}")))?;
        let mut model = ModelSpec::new(kind, q, lattice).map_err(|e| err(format!("model: {e}")))?;
        model.encoding = encoding;

        let mode: ReductionMode = get("reduction.mode")
            .unwrap_or("internal_plus_tr")
            .parse()
            .map_err(|e| err(format!("`reduction.mode`: {e}")))?;
        let form: BasisForm = get("reduction.form")
            .unwrap_or("strings")
            .parse()
            .map_err(|e| err(format!("`reduction.form`: {e}")))?;
        if mode == ReductionMode::None {
            let terms = build_hamiltonian(&model).map_err(|e| err(format!("model: {e}")))?;
            if let Some(t) = terms.iter().find(|t| t.qubits.len() > FULL_POOL_MAX_WIDTH) {
                return Err(err(format!(
                    "reduction.mode = none needs terms on at most {FULL_POOL_MAX_WIDTH} qubits; `{}` has {}",
                    t.label,
                    t.qubits.len()
                )));
            }
        }
        let layers: usize = get("ansatz.layers").map_or(Ok(1), |v| parse_num("ansatz.layers", v))?;
        if layers == 0 {
            return Err(err("`ansatz.layers` must be at least 1"));
        }

        let d = EvolutionConfig::default();
        let mut evolution = EvolutionConfig {
            delta_tau: get("evolution.delta_tau").map_or(Ok(d.delta_tau), |v| parse_num("evolution.delta_tau", v))?,
            tau_max: get("evolution.tau_max").map_or(Ok(d.tau_max), |v| parse_num("evolution.tau_max", v))?,
            svd_cutoff: get("evolution.svd_cutoff").map_or(Ok(d.svd_cutoff), |v| parse_num("evolution.svd_cutoff", v))?,
            noise_sigma: get("evolution.noise_sigma")
                .map_or(Ok(d.noise_sigma), |v| parse_num("evolution.noise_sigma", v))?,
            rng_seed: get("evolution.seed").map_or(Ok(d.rng_seed), |v| parse_num("evolution.seed", v))?,
            observables: Vec::new(),
        };
        if let Some(s) = seed {
            evolution.rng_seed = s;
        }
        let n = model.n_qubits();
        if let Some(list) = get("evolution.observables") {
            for item in list.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let (label, sum) = item
                    .split_once(':')
                    .ok_or_else(|| err(format!("`evolution.observables`: expected `label: pauli sum`, got `{item}`")))?;
                let o: PauliSum = sum
                    .trim()
                    .parse()
                    .map_err(|e| err(format!("`evolution.observables` `{}`: {e}", label.trim())))?;
                if o.n_qubits() != n {
                    return Err(err(format!(
                        "observable `{}` acts on {} qubits, the model has {n}",
                        label.trim(),
                        o.n_qubits()
                    )));
                }
                evolution.observables.push((label.trim().to_string(), o));
            }
        }
        evolution.validate().map_err(|e| err(format!("evolution: {e}")))?;

        let out_dir = match out {
            Some(p) => p.to_path_buf(),
            None => PathBuf::from(get("outputs.dir").unwrap_or("out")),
        };
        let formats = get("outputs.formats")
            .unwrap_or("csv,json")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|f| match f {
                "csv" => Ok(Format::Csv),
                "json" => Ok(Format::Json),
                other => Err(err(format!("`outputs.formats`: unknown format `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut resolved = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            resolved.insert(k.to_string(), v);
        };
        put("model.kind", kind.to_string());
        put("model.q", q.to_string());
        put("model.lx", lx.to_string());
        put("model.ly", ly.to_string());
        put("model.boundary", if boundary == Boundary::Periodic { "periodic" } else { "open" }.into());
        put("model.encoding", if encoding == Encoding::Imaginary { "imaginary" } else { "real" }.into());
        put("reduction.mode", mode.to_string());
        put("reduction.form", if form == BasisForm::Combined { "combined" } else { "strings" }.into());
        put("ansatz.layers", layers.to_string());
        put("evolution.delta_tau", evolution.delta_tau.to_string());
        put("evolution.tau_max", evolution.tau_max.to_string());
        put("evolution.svd_cutoff", evolution.svd_cutoff.to_string());
        put("evolution.noise_sigma", evolution.noise_sigma.to_string());
        put("evolution.seed", evolution.rng_seed.to_string());
        put(
            "evolution.observables",
            evolution
                .observables
                .iter()
                .map(|(l, o)| format!("{l}: {o}"))
                .collect::<Vec<_>>()
                .join("; "),
        );
        put(
            "outputs.formats",
            formats
                .iter()
                .map(|f| if *f == Format::Csv { "csv" } else { "json" })
                .collect::<Vec<_>>()
                .join(","),
        );

        Ok(ExperimentConfig {
            model,
            mode,
            form,
            layers,
            evolution,
            out_dir,
            formats,
            resolved,
        })
    }

    /// Resolved config as sorted `key = value` lines.
    pub fn canonical_text(&self) -> String {
        self.resolved.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Git blob hash of [`Self::canonical_text`].
    pub fn content_hash(&self) -> String {
        blob_hash(self.canonical_text().as_bytes())
    }
}

/// `sha256("blob <len>\0" ++ bytes)`, hex encoded.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_raw(&parse_text(text)?, None, None)
    }

    #[test]
    fn defaults() {
        let c = cfg("").unwrap();
        assert_eq!(c.model.kind, ModelKind::Ising);
        assert_eq!(c.model.n_qubits(), 4);
        assert_eq!(c.mode, ReductionMode::InternalPlusTr);
        assert_eq!(c.evolution, EvolutionConfig::default());
        assert_eq!(c.formats, [Format::Csv, Format::Json]);
    }

    #[test]
    fn text_and_json_agree() {
        let text = "model.kind = potts # comment\nevolution.delta_tau = 0.05\nevolution.seed = 3\n";
        let json = r#"{"model": {"kind": "potts"}, "evolution": {"delta_tau": 0.05, "seed": 3}}"#;
        let a = ExperimentConfig::from_raw(&parse_text(text).unwrap(), None, None).unwrap();
        let b = ExperimentConfig::from_raw(&parse_json(json).unwrap(), None, None).unwrap();
        assert_eq!(a.canonical_text(), b.canonical_text());
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.model.q, 4);
    }

    #[test]
    fn seed_flag_overrides() {
        let raw = parse_text("evolution.seed = 3").unwrap();
        let c = ExperimentConfig::from_raw(&raw, Some(9), None).unwrap();
        assert_eq!(c.evolution.rng_seed, 9);
        assert_eq!(c.resolved["evolution.seed"], "9");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(cfg("model.colour = red").is_err());
        assert!(cfg("model.kind = heisenberg").is_err());
        assert!(cfg("evolution.delta_tau = -1").is_err());
        assert!(cfg("no equals sign").is_err());
        assert!(cfg("model.kind = gauge\nmodel.q = 4\nreduction.mode = none").is_err());
        assert!(cfg("evolution.observables = z: ZZ").is_err());
    }

    #[test]
    fn observables_parse() {
        let c = cfg("evolution.observables = z0: ZIII; zz: ZZII + IIZZ").unwrap();
        assert_eq!(c.evolution.observables.len(), 2);
        assert_eq!(c.evolution.observables[1].0, "zz");
    }

    #[test]
    fn blob_hash_matches_git() {
        // `printf 'hello\n' | git hash-object --object-format=sha256 --stdin`
        assert_eq!(
            blob_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }
}
