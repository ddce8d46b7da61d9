use reslat::FiniteAlgebra;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct Input {
    pub name: String,
    pub size: usize,
    pub sha256: String,
}

impl Input {
    pub fn of(a: &FiniteAlgebra) -> Input {
        Input { name: a.name().to_string(), size: a.size(), sha256: digest(&a.to_json()) }
    }
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// The envelope printed on stdout. Timing is kept out of it so that reports
/// are byte-identical across runs.
#[derive(Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<Input>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
}

impl Report {
    pub fn new(command: Vec<String>) -> Report {
        Report { tool: "reslat", version: env!("CARGO_PKG_VERSION"), command, inputs: Vec::new(), result: None, error: None }
    }
}

/// An algebra as its file object.
pub fn algebra_value(a: &FiniteAlgebra) -> Value {
    serde_json::from_str(&a.to_json()).expect("algebra JSON is well formed")
}
