use serde::{Deserialize, Serialize};

use okounkov::io::{
    from_json, BodyJson, FiltrationJson, FlagJson, ModelJson, SeriesJson, TestFunctionJson, WeightJson,
};
use okounkov::series::BodyMode;
use okounkov::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeJson {
    #[default]
    Stabilized,
    Union,
}

impl From<ModeJson> for BodyMode {
    fn from(m: ModeJson) -> Self {
        match m {
            ModeJson::Stabilized => BodyMode::Stabilized,
            ModeJson::Union => BodyMode::Union,
        }
    }
}

/// One job. Each command reads the blocks it needs and rejects a config
/// that names a different command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    // body
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<FlagJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<BodyJson>,

    // mixedvol, intersection
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bodies: Option<Vec<BodyJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_list: Option<Vec<SeriesJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<ModelJson>>,

    // dh, bc
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_function: Option<TestFunctionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<FiltrationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_steps: Option<u32>,

    // chebyshev
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightJson>>,

    // series-distance
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<Vec<SeriesJson>>,

    // proptest
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u32>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl JobConfig {
    pub fn parse(src: &str) -> Result<Self> {
        from_json(src)
    }

    pub fn check_command(&self, name: &str) -> Result<()> {
        match &self.command {
            Some(c) if c != name => Err(Error::Schema(format!("config is for {c:?}, not {name:?}"))),
            _ => Ok(()),
        }
    }

    pub fn k_max(&self) -> u32 {
        self.k_max.unwrap_or(6).max(1)
    }

    /// Explicit levels, or `1..=k_max`.
    pub fn levels(&self) -> Vec<u32> {
        match &self.ks {
            Some(ks) => ks.clone(),
            None => (1..=self.k_max()).collect(),
        }
    }

    pub fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field.as_ref().ok_or_else(|| Error::Schema(format!("missing field {name:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use okounkov::io::to_json;

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(matches!(JobConfig::parse(r#"{"k_maxx": 3}"#), Err(Error::Schema(_))));
    }

    #[test]
    fn roundtrip_is_identity() {
        let src = r#"{
            "command": "body",
            "series": {"backend": "polynomial", "variety": "p1xp1", "bidegree": [1, 2]},
            "flag": {"type": "surface", "variety": "p1xp1", "curve": "u - v", "point": [["0","1"],["0","1"]], "chart": 0},
            "k_max": 4
        }"#;
        let c = JobConfig::parse(src).unwrap();
        let once = to_json(&c);
        assert_eq!(to_json(&JobConfig::parse(&once).unwrap()), once);
        assert_eq!(c.levels(), vec![1, 2, 3, 4]);
        assert!(c.check_command("dh").is_err());
    }
}
