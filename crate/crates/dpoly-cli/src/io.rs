//! File loading with positioned diagnostics and artifact emission.
//!
//! Every command output is a JSON object; `emit` injects the seed into it so
//! reruns are self-describing, then pretty-prints with sorted keys, which
//! keeps byte output identical for identical inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::Value;

/// A failed invocation, partitioned by exit code: usage and parse problems
/// exit 2, exceeded budgets exit 3. Definite negative answers are not
/// failures; commands report those through [`Outcome::negative`].
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Parse { path: PathBuf, line: usize, column: usize, msg: String },
    Cap { what: String, requested: usize, limit: usize },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Parse { .. } => 2,
            Failure::Cap { .. } => 3,
        }
    }

    pub fn report(&self) -> String {
        match self {
            Failure::Usage(msg) => format!("error: {msg}"),
            Failure::Parse { path, line, column, msg } => {
                format!("error: {}:{line}:{column}: {msg}", path.display())
            }
            Failure::Cap { what, requested, limit } => {
                format!("error: {what} exceeds cap: {requested} > {limit}")
            }
        }
    }
}

/// Maps library errors onto the exit-code partition: budget overruns keep
/// their numbers for exit 3, everything else is a bad-input report.
pub fn lib_failure(e: dpoly::Error) -> Failure {
    match e {
        dpoly::Error::CapacityExceeded { what, requested, limit } => {
            Failure::Cap { what, requested, limit }
        }
        other => Failure::Usage(other.to_string()),
    }
}

/// Reads and deserializes a JSON file; malformed content reports the
/// offending line and column.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

/// One command's answer: the JSON payload, whether it is a definite negative
/// (exit 1 instead of 0), and an optional DOT rendering for `--dot`.
pub struct Outcome {
    pub value: Value,
    pub negative: bool,
    pub dot: Option<String>,
}

impl Outcome {
    pub fn pass(value: Value) -> Self {
        Outcome { value, negative: false, dot: None }
    }

    pub fn negative(value: Value) -> Self {
        Outcome { value, negative: true, dot: None }
    }

    pub fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }
}

/// Renders the artifact (JSON with the seed injected, or DOT) and writes it
/// to standard output or `--output`.
pub fn emit(
    out: &Outcome,
    seed: u64,
    dot: bool,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let artifact = if dot {
        out.dot
            .clone()
            .ok_or_else(|| Failure::Usage("this subcommand has no DOT rendering".into()))?
    } else {
        let mut value = out.value.clone();
        value
            .as_object_mut()
            .expect("command outputs are JSON objects")
            .insert("seed".into(), Value::from(seed));
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        text
    };
    match output {
        Some(path) => fs::write(path, artifact)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}

/// Serializes a library value into a JSON tree.
pub fn val<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("library types serialize")
}
