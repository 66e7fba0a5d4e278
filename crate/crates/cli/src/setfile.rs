use std::path::Path;

use anyhow::{anyhow, Context, Result};
use mfdft::ambiguity::Variant;
use mfdft::detection::{table_environments, table_noise_cases, TableSpec};
use mfdft::radar_sim::{NoiseModel, Scenario};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    pub name: String,
    pub scenario: Scenario,
}

/// Environments × noise cases × variants. Each environment's own `noise`
/// block is replaced by every entry of `noise_cases`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSet {
    pub environments: Vec<Environment>,
    pub noise_cases: Vec<NoiseModel>,
    pub variants: Vec<Variant>,
}

impl ScenarioSet {
    pub fn builtin() -> Self {
        Self {
            environments: table_environments()
                .into_iter()
                .map(|(name, build)| Environment { name: name.to_string(), scenario: build(NoiseModel::none(), 0) })
                .collect(),
            noise_cases: table_noise_cases(),
            variants: vec![Variant::Eq12a, Variant::Eq11],
        }
    }

    pub fn specs(&self) -> Result<Vec<TableSpec>> {
        let mut specs = Vec::new();
        for &variant in &self.variants {
            for env in &self.environments {
                for noise in &self.noise_cases {
                    let mut scenario = env.scenario.clone();
                    scenario.noise = *noise;
                    scenario.validate().map_err(|e| anyhow!("environment `{}`: {e}", env.name))?;
                    specs.push(TableSpec { environment: env.name.clone(), scenario, variant });
                }
            }
        }
        Ok(specs)
    }
}

/// Parses JSON, reporting the path of the offending key on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow!("invalid {what}: at key `{path}`: {}", e.into_inner())
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scenario: Scenario = parse_json(&text, "scenario")?;
    scenario.validate().map_err(|e| anyhow!("invalid scenario: {e}"))?;
    Ok(scenario)
}

pub fn load_set(path: &Path) -> Result<ScenarioSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_json(&text, "scenario set")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_set_expands_to_default_specs() {
        assert_eq!(ScenarioSet::builtin().specs().unwrap(), mfdft::detection::default_table_specs());
    }

    #[test]
    fn shipped_default_set_matches_builtin() {
        let text = include_str!("../scenarios/default_set.json");
        let set: ScenarioSet = parse_json(text, "scenario set").unwrap();
        assert_eq!(set, ScenarioSet::builtin());
    }

    #[test]
    fn error_names_the_offending_key() {
        let text = r#"{"fm": {"seed": 1}, "tx_km": [0, 10], "rx_km": [0, 0],
            "obstacles": [{"x_km": 1, "y_km": 0, "dopler_hz": 3}], "noise": {"kind": "none"}}"#;
        let err = parse_json::<Scenario>(text, "scenario").unwrap_err().to_string();
        assert!(err.contains("obstacles[0]"), "{err}");
        assert!(err.contains("dopler_hz"), "{err}");
        let missing = r#"{"fm": {"seed": 1}, "rx_km": [0, 0], "obstacles": [], "noise": {"kind": "none"}}"#;
        let err = parse_json::<Scenario>(missing, "scenario").unwrap_err().to_string();
        assert!(err.contains("tx_km"), "{err}");
    }
}
