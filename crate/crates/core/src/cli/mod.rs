//! Batch experiment runner behind the `weakstat` binary.
//!
//! A run is described by one JSON file. It is first validated against the
//! shipped schema (`schema/experiment_config.schema.json`), then decoded
//! into an [`ExperimentConfig`]; either failure reports a JSON pointer to the
//! offending field. Command-line flags only override the seed and the output
//! path.
//!
//! Exit status: [`EXIT_OK`] on success, [`EXIT_CHECK_FAILED`] when the
//! pipeline ran but some check failed, [`EXIT_ERROR`] for config and runtime
//! errors.
//!
//! Every stage draws from its own child stream of the config seed and all
//! parallel reductions are ordered, so a config produces byte-identical
//! output for any `WEAKSTAT_THREADS`.

mod config;
mod runner;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde_json::Value;

pub use config::{
    BoundSettings, CandidateSpec, ClassSpec, ClusterSettings, ComplexitySettings, DomainSpec, ExperimentConfig,
    ExperimentKind, KernelSpec, LossSpec, MethodName, OutputFormat, OutputSettings, RankSettings, SamplerSpec,
    SeminormSettings, SimulateSettings, StatisticSpec, VerifySettings, WeightSpec,
};
pub use runner::{run, ClusteringSummary, RankingSummary, ResidualRow, ResultDocument};
pub use table::{emit_table, table_columns};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "WEAKSTAT_THREADS";

const CONFIG_SCHEMA: &str = include_str!("../../schema/experiment_config.schema.json");
const CERTIFICATE_SCHEMA: &str = include_str!("../../schema/certificate.schema.json");

fn compiled(cell: &'static OnceLock<jsonschema::Validator>, text: &str) -> &'static jsonschema::Validator {
    cell.get_or_init(|| {
        let schema: Value = serde_json::from_str(text).expect("shipped schema is valid JSON");
        jsonschema::validator_for(&schema).expect("shipped schema compiles")
    })
}

fn config_validator() -> &'static jsonschema::Validator {
    static CELL: OnceLock<jsonschema::Validator> = OnceLock::new();
    compiled(&CELL, CONFIG_SCHEMA)
}

fn certificate_validator() -> &'static jsonschema::Validator {
    static CELL: OnceLock<jsonschema::Validator> = OnceLock::new();
    compiled(&CELL, CERTIFICATE_SCHEMA)
}

/// The experiment config schema.
pub fn config_schema() -> Value {
    serde_json::from_str(CONFIG_SCHEMA).expect("shipped schema is valid JSON")
}

/// The bound certificate schema.
pub fn certificate_schema() -> Value {
    serde_json::from_str(CERTIFICATE_SCHEMA).expect("shipped schema is valid JSON")
}

fn validate_against(validator: &jsonschema::Validator, value: &Value) -> Result<()> {
    match validator.iter_errors(value).next() {
        None => Ok(()),
        Some(e) => Err(Error::Config {
            pointer: e.instance_path().to_string(),
            message: e.to_string(),
        }),
    }
}

/// Checks a certificate document against the certificate schema.
pub fn validate_certificate(value: &Value) -> Result<()> {
    validate_against(certificate_validator(), value)
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

/// Schema validation followed by typed decoding. Defaults stay implicit;
/// see [`ExperimentConfig::resolved`].
pub fn parse_config(value: &Value) -> Result<ExperimentConfig> {
    validate_against(config_validator(), value)?;
    serde_path_to_error::deserialize(value).map_err(|e| Error::Config {
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })
}

/// Parses config text; malformed JSON is reported at the root pointer.
pub fn load_config(text: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Config {
        pointer: String::new(),
        message: e.to_string(),
    })?;
    parse_config(&value)
}

/// A rayon pool honoring `WEAKSTAT_THREADS` (unset: one worker per core).
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Err(_) => 0,
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => t,
            _ => {
                return Err(Error::Config {
                    pointer: THREADS_ENV.into(),
                    message: format!("expected a positive worker count, got `{v}`"),
                })
            }
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// One command-line invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub kind: ExperimentKind,
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Loads, overrides and resolves the config of an invocation.
pub fn prepare(inv: &Invocation) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&inv.config)?;
    let mut config = load_config(&text)?;
    if config.kind != inv.kind {
        return Err(Error::Config {
            pointer: "/kind".into(),
            message: format!(
                "config describes a {} run but the {} subcommand was given",
                config.kind.as_str(),
                inv.kind.as_str()
            ),
        });
    }
    if let Some(seed) = inv.seed {
        config.seed = seed;
    }
    if let Some(out) = &inv.out {
        config.output.path = Some(out.clone());
    }
    Ok(config.resolved())
}

/// Pretty JSON with a trailing newline.
pub fn render_document(doc: &ResultDocument) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    Ok(text)
}

fn write_outputs(doc: &ResultDocument) -> Result<()> {
    let json = render_document(doc)?;
    match &doc.config.output.path {
        None => std::io::stdout().write_all(json.as_bytes())?,
        Some(path) => {
            std::fs::write(path, json)?;
            if doc.config.output.format == OutputFormat::JsonAndCsv {
                std::fs::write(csv_path(path), emit_table(std::slice::from_ref(doc))?)?;
            }
        }
    }
    Ok(())
}

/// Where the CSV table of a JSON output goes.
pub fn csv_path(json_path: &Path) -> PathBuf {
    json_path.with_extension("csv")
}

/// Runs an invocation end to end and writes its artifacts.
pub fn try_execute(inv: &Invocation) -> Result<ResultDocument> {
    let config = prepare(inv)?;
    let doc = worker_pool()?.install(|| run(&config))?;
    write_outputs(&doc)?;
    Ok(doc)
}

/// [`try_execute`] mapped to an exit status, with errors on stderr.
pub fn execute(inv: &Invocation) -> i32 {
    match try_execute(inv) {
        Ok(doc) if doc.passed => EXIT_OK,
        Ok(doc) => {
            for c in doc.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} (slack {})", c.name, c.slack);
            }
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn mean_verify() -> Value {
        json!({"kind": "verify", "n": 8, "statistic": {"family": "mean"}, "verify": {"pairs": 10, "probes": 10}})
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let mut v = mean_verify();
        v["verify"]["pairs"] = json!(0);
        match parse_config(&v) {
            Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/verify/pairs"),
            other => panic!("{other:?}"),
        }
        let mut v = mean_verify();
        v["bogus"] = json!(1);
        assert!(matches!(parse_config(&v), Err(Error::Config { .. })));
        assert!(matches!(load_config("{"), Err(Error::Config { .. })));
    }

    #[test]
    fn resolved_config_is_schema_valid() {
        for kind in ["seminorm", "complexity", "bound", "verify", "cluster", "rank"] {
            let mut v = mean_verify();
            v["kind"] = json!(kind);
            let config = parse_config(&v).unwrap().resolved();
            let back = serde_json::to_value(&config).unwrap();
            validate_against(config_validator(), &back).unwrap();
            assert_eq!(parse_config(&back).unwrap(), config);
        }
    }

    #[test]
    fn mean_verify_passes() {
        let config = parse_config(&mean_verify()).unwrap().resolved();
        let doc = run(&config).unwrap();
        assert!(doc.passed);
        assert_eq!(doc.residuals.len(), 10);
        assert!(doc.residuals.iter().all(|r| r.residual <= 1e-9));
    }

    #[test]
    fn missing_section_is_a_config_error() {
        let v = json!({"kind": "bound", "n": 8, "statistic": {"family": "mean"}});
        let config = parse_config(&v).unwrap();
        match run(&config) {
            Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/class"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tables() {
        let header = table_columns().join(",") + "\n";
        assert_eq!(emit_table(&[]).unwrap(), header);
        let config = parse_config(&mean_verify()).unwrap().resolved();
        let a = run(&config).unwrap();
        let mut other = config.clone();
        other.seed = 1;
        let b = run(&other).unwrap();
        let text = emit_table(&[a.clone(), b]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_ne!(lines[1], lines[2]);
        assert_eq!(lines[1].split(',').count(), table_columns().len());
        let mut seminorm = config.clone();
        seminorm.kind = ExperimentKind::Seminorm;
        seminorm.seminorm.methods = vec![MethodName::Analytic];
        let c = run(&seminorm).unwrap();
        assert!(matches!(emit_table(&[a, c]), Err(Error::MixedKinds(_, _))));
    }
}
