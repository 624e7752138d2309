//! Canonical JSON, content digests and the per-run report.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::cost::{Cost, CostReport};
use crate::error::Result;

/// Compact JSON with object keys sorted.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // `serde_json::Map` is ordered by key, so a round trip through `Value` sorts.
    Ok(serde_json::to_string(&serde_json::to_value(value)?)?)
}

/// Hex SHA-256 of the canonical form of `value`.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let text = canonical_json(value)?;
    Ok(Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub digest: String,
    pub p: String,
    pub field: u32,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostReport>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<f64>,
}

impl RunReport {
    pub fn with_cost(mut self, cost: &Cost) -> Self {
        self.cost = Some(cost.into());
        self
    }
}
