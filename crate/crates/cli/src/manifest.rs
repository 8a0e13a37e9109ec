//! Self-describing run manifest, embedded in JSON reports and written as a
//! sidecar next to CSV outputs.

use serde::Serialize;

use fcc_core::integrator::IntegratorConfig;
use fcc_core::model::CircuitParams;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: CircuitParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<IntegratorConfig>,
    pub output_paths: Vec<String>,
    pub tool_version: String,
    /// Seconds since the Unix epoch; omitted in deterministic mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        params: CircuitParams,
        config: Option<IntegratorConfig>,
        output_paths: Vec<String>,
        deterministic: bool,
    ) -> Self {
        let timestamp = if deterministic {
            None
        } else {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .ok()
                .map(|d| d.as_secs().to_string())
        };
        Self {
            command: command.to_string(),
            params,
            config,
            output_paths,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }
}
