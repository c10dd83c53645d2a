//! Scenario runner for the `gamow` command.

pub mod config;
pub mod output;
pub mod runner;

use std::path::Path;

pub use config::{validate_config, ConfigError, ScenarioConfig, Task};
pub use runner::{run_scenario, RunError, RunReport};

/// The shipped example scenarios as `(file name, JSON text)`.
pub const EXAMPLES: [(&str, &str); 3] = [
    (
        "lambda_sweep.json",
        include_str!("../scenarios/lambda_sweep.json"),
    ),
    (
        "poisson_echo.json",
        include_str!("../scenarios/poisson_echo.json"),
    ),
    (
        "decoherence.json",
        include_str!("../scenarios/decoherence.json"),
    ),
];

/// Writes the example scenarios into `dir`.
pub fn seed_examples(dir: &Path) -> std::io::Result<Vec<std::path::PathBuf>> {
    EXAMPLES
        .iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            output::write_atomic(&path, text.as_bytes())?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_examples_validate() {
        for (name, text) in EXAMPLES {
            let v: serde_json::Value = serde_json::from_str(text).unwrap();
            assert!(validate_config(&v).is_ok(), "{name}");
        }
    }
}
